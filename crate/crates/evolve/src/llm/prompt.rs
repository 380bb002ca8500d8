use std::fmt::Write as _;

use netrobust_core::hdsl::{render, HeuristicProgram};
use netrobust_core::nos::{render_nos, NosEntry};
use serde::{Deserialize, Serialize};

use super::{ChatRequest, LlmError, Message, Role};

/// Strategies shown in every E1 and M1 prompt.
pub const NOS_PER_PROMPT: usize = 12;

/// The first line of every user prompt is `TASK: <kind>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskKind {
    Init,
    E1,
    M1,
    M2,
}

impl TaskKind {
    pub fn marker(self) -> &'static str {
        match self {
            TaskKind::Init => "INIT",
            TaskKind::E1 => "E1",
            TaskKind::M1 => "M1",
            TaskKind::M2 => "M2",
        }
    }

    pub fn from_marker(s: &str) -> Option<Self> {
        [TaskKind::Init, TaskKind::E1, TaskKind::M1, TaskKind::M2]
            .into_iter()
            .find(|k| k.marker() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSpec {
    pub problem: String,
}

impl Default for TaskSpec {
    fn default() -> Self {
        Self {
            problem: DEFAULT_PROBLEM.to_string(),
        }
    }
}

const DEFAULT_PROBLEM: &str = "\
An attacker repeatedly deletes the node of highest current degree (lowest id on ties) \
until no node is left. After each deletion we record the fraction of the original N nodes \
that still sit in the largest connected component; robustness R is the mean of these N \
fractions. Your program rewires a given undirected network to raise R. Every applied move \
costs one evaluation of R from a fixed budget, and a move is kept or rolled back according \
to the program's acceptance rule. Programs are scored on several networks at once and are \
penalized for changing node degrees or the number of edges, increasingly so as evolution \
proceeds.";

const LANGUAGE: &str = "\
```
HEURISTIC \"<name>\"
ACCEPT improve                     # keep a move only if R strictly increases
ACCEPT anneal t0=<real> alpha=<real>  # simulated annealing, 0 < alpha < 1
RULE                               # 1 to 8 rules
  <var> := <selector>              # 1 to 8 bindings per rule
  MOVE <move>
END
```
Selectors (arguments must be variables bound earlier in the same rule):
- highest_degree, lowest_degree, highest_betweenness: ties go to the lowest id
- random_node: uniform over all nodes
- similar_degree(v, k): random node other than v whose degree differs from v's by at most k
- neighbor_of(v): random neighbor of v
- highest_degree_neighbor_of(v): neighbor of v with the largest degree
- non_adjacent_to(v): random node other than v that is not adjacent to v
Moves:
- add_edge(a, b)
- remove_edge(a, b)
- relocate_edge(a, b, c): remove (a,b), add (c,b)
- swap_edges(a, b, c, d): remove (a,b) and (c,d), add (a,d) and (c,b); keeps every degree
Each iteration tries the rules in order and applies the first one whose selectors bind \
and whose move is legal (no self-loops, no duplicate edges, removed edges must exist).";

const SYSTEM: &str = "You design rewiring heuristics for undirected networks, written in a \
small domain-specific language. Reply with a short plain-text description of the idea, \
then exactly one fenced code block tagged dsl that holds the complete program.";

/// One parent as shown to the model.
#[derive(Debug, Clone, Copy)]
pub struct Parent<'a> {
    pub description: &'a str,
    pub program: &'a HeuristicProgram,
}

/// Builds the initialization and variation prompts.
#[derive(Debug, Clone, PartialEq)]
pub struct Prompter {
    pub model: String,
    pub temperature: f64,
    pub task: TaskSpec,
}

fn fenced(out: &mut String, program: &HeuristicProgram) {
    out.push_str("```dsl\n");
    out.push_str(&render(program));
    out.push_str("```\n");
}

impl Prompter {
    pub fn new(model: impl Into<String>, temperature: f64, task: TaskSpec) -> Self {
        Self {
            model: model.into(),
            temperature,
            task,
        }
    }

    fn header(&self, kind: TaskKind) -> String {
        let mut out = format!("TASK: {}\n\n## Problem\n{}\n\n## Language\n{}\n", kind.marker(), self.task.problem, LANGUAGE);
        out.push('\n');
        out
    }

    fn parent(out: &mut String, title: &str, p: &Parent) {
        let _ = writeln!(out, "## {title}");
        let _ = writeln!(out, "Description: {}", p.description.trim());
        fenced(out, p.program);
        out.push('\n');
    }

    fn strategies(out: &mut String, nos: &[NosEntry]) -> Result<(), LlmError> {
        if nos.len() != NOS_PER_PROMPT {
            return Err(LlmError::NosCount {
                expected: NOS_PER_PROMPT,
                found: nos.len(),
            });
        }
        out.push_str("## Strategies\nEach line is feature | strategy | action.\n");
        out.push_str(&render_nos(nos).expect("non-empty"));
        out.push('\n');
        Ok(())
    }

    fn finish(&self, body: String) -> ChatRequest {
        ChatRequest {
            model: self.model.clone(),
            temperature: self.temperature,
            messages: vec![
                Message {
                    role: Role::System,
                    content: SYSTEM.to_string(),
                },
                Message {
                    role: Role::User,
                    content: body,
                },
            ],
        }
    }

    /// Prompt for the `index`-th (0-based) member of an initial population
    /// of `count`; the index keeps otherwise identical prompts distinct.
    pub fn init(&self, seed: Option<&HeuristicProgram>, index: usize, count: usize) -> ChatRequest {
        let mut out = self.header(TaskKind::Init);
        if let Some(seed) = seed {
            out.push_str("## Seed\nA working program you may start from:\n");
            fenced(&mut out, seed);
            out.push('\n');
        }
        let _ = write!(
            out,
            "## Instructions\nWrite candidate {} of {} for the initial population. Explore a \
             distinct idea rather than a minor edit of a known one.\n",
            index + 1,
            count
        );
        self.finish(out)
    }

    pub fn e1(&self, p1: Parent, p2: Parent, nos: &[NosEntry]) -> Result<ChatRequest, LlmError> {
        let mut out = self.header(TaskKind::E1);
        Self::parent(&mut out, "Parent 1", &p1);
        Self::parent(&mut out, "Parent 2", &p2);
        Self::strategies(&mut out, nos)?;
        out.push_str(
            "## Instructions\nWrite a program whose approach differs clearly from both parents. \
             Use the strategies above as inspiration.\n",
        );
        Ok(self.finish(out))
    }

    pub fn m1(&self, p: Parent, nos: &[NosEntry]) -> Result<ChatRequest, LlmError> {
        let mut out = self.header(TaskKind::M1);
        Self::parent(&mut out, "Parent", &p);
        Self::strategies(&mut out, nos)?;
        out.push_str(
            "## Instructions\nImprove the parent by working one or more of the strategies above \
             into it.\n",
        );
        Ok(self.finish(out))
    }

    pub fn m2(&self, p: Parent) -> ChatRequest {
        let mut out = self.header(TaskKind::M2);
        Self::parent(&mut out, "Parent", &p);
        out.push_str(
            "## Instructions\nMake a small, local adjustment to the parent (a parameter, a \
             selector or the order of bindings) that may raise its score.\n",
        );
        self.finish(out)
    }

    /// `req` followed by a note on why the previous answer was rejected.
    pub fn retry(&self, req: &ChatRequest, attempt: usize, problem: &str) -> ChatRequest {
        let mut next = req.clone();
        next.messages.push(Message {
            role: Role::User,
            content: format!(
                "Attempt {attempt}: the previous answer could not be used ({problem}). Reply again \
                 with a description and exactly one fenced dsl block."
            ),
        });
        next
    }
}
