//! A small line-oriented language for rewiring heuristics.
//!
//! ```text
//! HEURISTIC "hc"
//! ACCEPT improve
//! RULE
//!   a := random_node
//!   b := neighbor_of(a)
//!   c := random_node
//!   d := neighbor_of(c)
//!   MOVE swap_edges(a, b, c, d)
//! END
//! ```
//!
//! Each iteration tries the rules in order; the first rule whose selectors
//! all bind and whose move is structurally legal is applied and costs one
//! robustness evaluation.

mod interp;
mod parse;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::heuristics::{Acceptance, AnnealParams};

pub use interp::{interpret, interpret_with, DslProposer};
pub use parse::parse;
pub use validate::{validate, Warning};

pub const MAX_RULES: usize = 8;
pub const MAX_BINDINGS: usize = 8;

/// The hill-climbing baseline expressed in the DSL.
pub const HC_PROGRAM: &str = "HEURISTIC \"hc\"
ACCEPT improve
RULE
  a := random_node
  b := neighbor_of(a)
  c := random_node
  d := neighbor_of(c)
  MOVE swap_edges(a, b, c, d)
END
";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicProgram {
    pub name: String,
    pub acceptance: Acceptance,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub bindings: Vec<Binding>,
    pub action: MoveExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub var: String,
    pub selector: Selector,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Selector {
    HighestDegree,
    LowestDegree,
    RandomNode,
    HighestBetweenness,
    /// A node other than `reference` whose degree differs by at most `max_diff`.
    SimilarDegree { reference: String, max_diff: usize },
    NeighborOf(String),
    HighestDegreeNeighborOf(String),
    /// A node other than the reference and not adjacent to it.
    NonAdjacentTo(String),
}

impl Selector {
    pub const NAMES: [&'static str; 8] = [
        "highest_degree",
        "lowest_degree",
        "random_node",
        "highest_betweenness",
        "similar_degree",
        "neighbor_of",
        "highest_degree_neighbor_of",
        "non_adjacent_to",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Selector::HighestDegree => "highest_degree",
            Selector::LowestDegree => "lowest_degree",
            Selector::RandomNode => "random_node",
            Selector::HighestBetweenness => "highest_betweenness",
            Selector::SimilarDegree { .. } => "similar_degree",
            Selector::NeighborOf(_) => "neighbor_of",
            Selector::HighestDegreeNeighborOf(_) => "highest_degree_neighbor_of",
            Selector::NonAdjacentTo(_) => "non_adjacent_to",
        }
    }

    pub fn reference(&self) -> Option<&str> {
        match self {
            Selector::SimilarDegree { reference, .. }
            | Selector::NeighborOf(reference)
            | Selector::HighestDegreeNeighborOf(reference)
            | Selector::NonAdjacentTo(reference) => Some(reference),
            _ => None,
        }
    }

    /// Whether evaluation consumes randomness.
    pub fn is_random(&self) -> bool {
        matches!(
            self,
            Selector::RandomNode
                | Selector::SimilarDegree { .. }
                | Selector::NeighborOf(_)
                | Selector::NonAdjacentTo(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveExpr {
    AddEdge(String, String),
    RemoveEdge(String, String),
    /// Remove `(a, b)`, add `(c, b)`.
    RelocateEdge(String, String, String),
    /// Remove `(a, b)` and `(c, d)`, add `(a, d)` and `(c, b)`.
    SwapEdges(String, String, String, String),
}

impl MoveExpr {
    pub const NAMES: [&'static str; 4] = ["add_edge", "remove_edge", "relocate_edge", "swap_edges"];

    pub fn name(&self) -> &'static str {
        match self {
            MoveExpr::AddEdge(..) => "add_edge",
            MoveExpr::RemoveEdge(..) => "remove_edge",
            MoveExpr::RelocateEdge(..) => "relocate_edge",
            MoveExpr::SwapEdges(..) => "swap_edges",
        }
    }

    pub fn args(&self) -> Vec<&str> {
        match self {
            MoveExpr::AddEdge(a, b) | MoveExpr::RemoveEdge(a, b) => vec![a, b],
            MoveExpr::RelocateEdge(a, b, c) => vec![a, b, c],
            MoveExpr::SwapEdges(a, b, c, d) => vec![a, b, c, d],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("program has no rules")]
    NoRules,
    #[error("program has {0} rules, at most {MAX_RULES} allowed")]
    TooManyRules(usize),
    #[error("rule {rule} has {count} bindings, at most {MAX_BINDINGS} allowed")]
    TooManyBindings { rule: usize, count: usize },
    #[error("rule {rule} has no bindings")]
    NoBindings { rule: usize },
    #[error("rule {rule}: variable `{var}` is not bound")]
    Unbound { rule: usize, var: String },
    #[error("rule {rule}: variable `{var}` is bound twice")]
    Rebound { rule: usize, var: String },
    #[error("invalid annealing parameters: {0}")]
    InvalidAnneal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Lexical(String),
    #[error("{0}")]
    Syntax(String),
    #[error("unknown selector `{0}`")]
    UnknownSelector(String),
    #[error("unknown move `{0}`")]
    UnknownMove(String),
    #[error("`{name}` takes {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("variable `{0}` is already bound in this rule")]
    Rebound(String),
    #[error("missing ACCEPT line")]
    MissingAccept,
    #[error("{0}")]
    Program(ProgramError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

/// Structural checks shared by the parser and the interpreter.
pub fn check(p: &HeuristicProgram) -> Result<(), ProgramError> {
    if let Acceptance::Anneal(params) = p.acceptance {
        params
            .validate()
            .map_err(|e| ProgramError::InvalidAnneal(e.to_string()))?;
    }
    if p.rules.is_empty() {
        return Err(ProgramError::NoRules);
    }
    if p.rules.len() > MAX_RULES {
        return Err(ProgramError::TooManyRules(p.rules.len()));
    }
    for (i, rule) in p.rules.iter().enumerate() {
        let rule_no = i + 1;
        if rule.bindings.is_empty() {
            return Err(ProgramError::NoBindings { rule: rule_no });
        }
        if rule.bindings.len() > MAX_BINDINGS {
            return Err(ProgramError::TooManyBindings {
                rule: rule_no,
                count: rule.bindings.len(),
            });
        }
        let mut bound: Vec<&str> = Vec::new();
        let unbound = |var: &str| ProgramError::Unbound {
            rule: rule_no,
            var: var.to_string(),
        };
        for b in &rule.bindings {
            if let Some(r) = b.selector.reference() {
                if !bound.contains(&r) {
                    return Err(unbound(r));
                }
            }
            if bound.contains(&b.var.as_str()) {
                return Err(ProgramError::Rebound {
                    rule: rule_no,
                    var: b.var.clone(),
                });
            }
            bound.push(&b.var);
        }
        for arg in rule.action.args() {
            if !bound.contains(&arg) {
                return Err(unbound(arg));
            }
        }
    }
    Ok(())
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::SimilarDegree {
                reference,
                max_diff,
            } => write!(f, "similar_degree({reference}, {max_diff})"),
            Selector::NeighborOf(r)
            | Selector::HighestDegreeNeighborOf(r)
            | Selector::NonAdjacentTo(r) => write!(f, "{}({r})", self.name()),
            _ => f.write_str(self.name()),
        }
    }
}

impl fmt::Display for MoveExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.args().join(", "))
    }
}

/// Canonical text: two-space indentation, `, ` between arguments, trailing
/// newline. Floats use the shortest representation that parses back exactly.
pub fn render(p: &HeuristicProgram) -> String {
    p.to_string()
}

impl fmt::Display for HeuristicProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "HEURISTIC {}", quote(&self.name))?;
        match self.acceptance {
            Acceptance::Improve => writeln!(f, "ACCEPT improve")?,
            Acceptance::Anneal(AnnealParams { t0, alpha }) => {
                writeln!(f, "ACCEPT anneal t0={t0:?} alpha={alpha:?}")?
            }
        }
        for rule in &self.rules {
            writeln!(f, "RULE")?;
            for b in &rule.bindings {
                writeln!(f, "  {} := {}", b.var, b.selector)?;
            }
            writeln!(f, "  MOVE {}", rule.action)?;
            writeln!(f, "END")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binding(var: &str, selector: Selector) -> Binding {
        Binding {
            var: var.into(),
            selector,
        }
    }

    #[test]
    fn check_reports_structure_errors() {
        let mut p = parse(HC_PROGRAM).unwrap();
        assert_eq!(check(&p), Ok(()));

        p.rules[0].action = MoveExpr::AddEdge("a".into(), "zz".into());
        assert_eq!(
            check(&p),
            Err(ProgramError::Unbound {
                rule: 1,
                var: "zz".into()
            })
        );

        p.rules[0].bindings.push(binding("a", Selector::RandomNode));
        p.rules[0].action = MoveExpr::AddEdge("a".into(), "b".into());
        assert!(matches!(check(&p), Err(ProgramError::Rebound { .. })));

        p.rules.clear();
        assert_eq!(check(&p), Err(ProgramError::NoRules));
    }

    #[test]
    fn check_rejects_bad_anneal() {
        let mut p = parse(HC_PROGRAM).unwrap();
        p.acceptance = Acceptance::Anneal(AnnealParams { t0: 0.01, alpha: 1.5 });
        assert!(matches!(check(&p), Err(ProgramError::InvalidAnneal(_))));
    }

    #[test]
    fn render_is_canonical() {
        let text = "HEURISTIC   \"hc\"\nACCEPT improve\nRULE\n a:=random_node\n\tb := neighbor_of( a )\n c := random_node\n d := neighbor_of(c)\n MOVE swap_edges(a,b,c,d)\nEND\n";
        let p = parse(text).unwrap();
        assert_eq!(render(&p), HC_PROGRAM);
        assert!(!render(&p).contains('\t'));
    }

    #[test]
    fn render_escapes_names_and_keeps_floats_exact() {
        let mut p = parse(HC_PROGRAM).unwrap();
        p.name = "tab\there \"q\" \\ end".into();
        p.acceptance = Acceptance::Anneal(AnnealParams {
            t0: 0.1 + 0.2,
            alpha: 0.999,
        });
        let text = render(&p);
        assert!(!text.contains('\t'));
        assert!(text.contains("t0=0.30000000000000004 alpha=0.999"));
        assert_eq!(parse(&text).unwrap(), p);
    }
}
