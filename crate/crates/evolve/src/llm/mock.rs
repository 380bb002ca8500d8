//! Offline stand-in for a language model.
//!
//! Reads the task marker and the `dsl` blocks of a prompt and answers with a
//! seeded edit of those programs. Replies always hold exactly one valid
//! program, so runs exercise the whole pipeline without network access.

use netrobust_core::hdsl::{check, parse, Binding, HeuristicProgram, MoveExpr, Rule, Selector, MAX_RULES};
use netrobust_core::heuristics::Acceptance;
use netrobust_core::nos::Action;
use netrobust_core::{seeded_rng, AnnealParams, SearchRng};
use rand::Rng;

use super::{ChatRequest, Role, TaskKind};

/// Reply to `req`; identical requests and seeds give identical replies.
pub fn respond(req: &ChatRequest, seed: u64) -> String {
    let hash = req.hash();
    let salt = u64::from_str_radix(&hash[..16], 16).expect("hex digest");
    let mut rng = seeded_rng(seed ^ salt);

    let text: String = req
        .messages
        .iter()
        .filter(|m| m.role == Role::User)
        .map(|m| m.content.as_str())
        .collect::<Vec<_>>()
        .join("\n");
    let kind = text
        .lines()
        .find_map(|l| l.strip_prefix("TASK: "))
        .and_then(|m| TaskKind::from_marker(m.trim()));
    let parents = dsl_blocks(&text);
    let actions = nos_actions(&text);

    let program = match (kind, parents.as_slice()) {
        (Some(TaskKind::E1), [a, b, ..]) => {
            let child = crossover(a, b, &mut rng);
            mutate(&child, &mut rng)
        }
        (Some(TaskKind::M1), [p, ..]) => guided(p, &actions, &mut rng),
        (Some(TaskKind::M2), [p, ..]) => tweak(p, &mut rng),
        (_, [p, ..]) => mutate(&mutate(p, &mut rng), &mut rng),
        (_, []) => random_program(&mut rng),
    };
    let mut program = program;
    program.name = format!("mock-{:08x}", rng.random::<u32>());
    format!("{}\n\n```dsl\n{}```\n", describe(&program), program)
}

fn dsl_blocks(text: &str) -> Vec<HeuristicProgram> {
    let mut out = Vec::new();
    let mut body: Option<String> = None;
    for line in text.lines() {
        match body.as_mut() {
            None if line.trim() == "```dsl" => body = Some(String::new()),
            None => {}
            Some(b) if line.trim() == "```" => {
                if let Ok(p) = parse(b) {
                    out.push(p);
                }
                body = None;
            }
            Some(b) => {
                b.push_str(line);
                b.push('\n');
            }
        }
    }
    out
}

/// Actions named in the strategy lines of a prompt, in order.
fn nos_actions(text: &str) -> Vec<Action> {
    text.lines()
        .filter_map(|l| l.rsplit(" | ").next().filter(|_| l.contains(" | ")))
        .filter_map(|name| Action::ALL.into_iter().find(|a| a.name() == name.trim()))
        .collect()
}

fn describe(p: &HeuristicProgram) -> String {
    let moves: Vec<&str> = p.rules.iter().map(|r| r.action.name()).collect();
    let accept = match p.acceptance {
        Acceptance::Improve => "keeps only improving moves".to_string(),
        Acceptance::Anneal(a) => format!("anneals from t0={} with alpha={}", a.t0, a.alpha),
    };
    format!(
        "Tries {} rule(s) in order ({}) and {}.",
        p.rules.len(),
        moves.join(", "),
        accept
    )
}

const ANCHORS: [Selector; 4] = [
    Selector::RandomNode,
    Selector::RandomNode,
    Selector::HighestDegree,
    Selector::HighestBetweenness,
];

fn bind(var: &str, selector: Selector) -> Binding {
    Binding {
        var: var.to_string(),
        selector,
    }
}

fn anchor(rng: &mut SearchRng) -> Selector {
    ANCHORS[rng.random_range(0..ANCHORS.len())].clone()
}

/// A selector for a partner of `of`, drawn at random.
fn partner(of: &str, rng: &mut SearchRng) -> Selector {
    match rng.random_range(0..4) {
        0 => Selector::SimilarDegree {
            reference: of.to_string(),
            max_diff: rng.random_range(0..4),
        },
        1 => Selector::NonAdjacentTo(of.to_string()),
        2 => Selector::LowestDegree,
        _ => Selector::RandomNode,
    }
}

fn swap_rule(rng: &mut SearchRng) -> Rule {
    Rule {
        bindings: vec![
            bind("a", anchor(rng)),
            bind("b", Selector::NeighborOf("a".into())),
            bind("c", partner("a", rng)),
            bind("d", Selector::NeighborOf("c".into())),
        ],
        action: MoveExpr::SwapEdges("a".into(), "b".into(), "c".into(), "d".into()),
    }
}

fn relocate_rule(rng: &mut SearchRng) -> Rule {
    let neighbor = if rng.random_bool(0.5) {
        Selector::NeighborOf("h".into())
    } else {
        Selector::HighestDegreeNeighborOf("h".into())
    };
    Rule {
        bindings: vec![
            bind("h", anchor(rng)),
            bind("x", neighbor),
            bind("l", partner("x", rng)),
        ],
        action: MoveExpr::RelocateEdge("h".into(), "x".into(), "l".into()),
    }
}

fn add_rule(rng: &mut SearchRng) -> Rule {
    Rule {
        bindings: vec![bind("u", anchor(rng)), bind("v", partner("u", rng))],
        action: MoveExpr::AddEdge("u".into(), "v".into()),
    }
}

fn rule_for(action: Action, rng: &mut SearchRng) -> Rule {
    match action {
        Action::EdgeAddition => add_rule(rng),
        Action::EdgeRelocation => relocate_rule(rng),
        Action::EdgeSwapping => swap_rule(rng),
    }
}

fn random_rule(rng: &mut SearchRng) -> Rule {
    // additions change the edge count and are penalized, so they are rare
    match rng.random_range(0..10) {
        0 => add_rule(rng),
        1..=4 => relocate_rule(rng),
        _ => swap_rule(rng),
    }
}

fn random_acceptance(rng: &mut SearchRng) -> Acceptance {
    if rng.random_bool(0.5) {
        Acceptance::Improve
    } else {
        Acceptance::Anneal(AnnealParams {
            t0: [0.001, 0.01, 0.05][rng.random_range(0..3)],
            alpha: [0.99, 0.995, 0.999][rng.random_range(0..3)],
        })
    }
}

pub fn random_program(rng: &mut SearchRng) -> HeuristicProgram {
    let rules = (0..rng.random_range(1..=3)).map(|_| random_rule(rng)).collect();
    HeuristicProgram {
        name: "random".into(),
        acceptance: random_acceptance(rng),
        rules,
    }
}

/// Rules of `a` up to a cut point followed by rules of `b` after one.
pub fn crossover(a: &HeuristicProgram, b: &HeuristicProgram, rng: &mut SearchRng) -> HeuristicProgram {
    let cut_a = rng.random_range(1..=a.rules.len());
    let cut_b = rng.random_range(0..b.rules.len());
    let mut rules: Vec<Rule> = a.rules[..cut_a]
        .iter()
        .chain(&b.rules[cut_b..])
        .cloned()
        .collect();
    rules.truncate(MAX_RULES);
    HeuristicProgram {
        name: a.name.clone(),
        acceptance: if rng.random_bool(0.5) { a.acceptance } else { b.acceptance },
        rules,
    }
}

/// Replaces the selector of one binding with another that only reads
/// variables bound before it.
fn reselect(rule: &mut Rule, rng: &mut SearchRng) {
    let i = rng.random_range(0..rule.bindings.len());
    let selector = match i {
        0 => anchor(rng),
        _ => {
            let earlier = rule.bindings[rng.random_range(0..i)].var.clone();
            match rng.random_range(0..3) {
                0 => Selector::NeighborOf(earlier),
                1 => Selector::HighestDegreeNeighborOf(earlier),
                _ => partner(&earlier, rng),
            }
        }
    };
    rule.bindings[i].selector = selector;
}

/// One random structural or parametric edit; the result always passes
/// [`check`].
pub fn mutate(p: &HeuristicProgram, rng: &mut SearchRng) -> HeuristicProgram {
    for _ in 0..16 {
        let mut q = p.clone();
        let r = rng.random_range(0..q.rules.len());
        match rng.random_range(0..6) {
            0 => reselect(&mut q.rules[r], rng),
            1 => q.rules[r] = random_rule(rng),
            2 if q.rules.len() < MAX_RULES => {
                let at = rng.random_range(0..=q.rules.len());
                q.rules.insert(at, random_rule(rng));
            }
            3 if q.rules.len() > 1 => {
                q.rules.remove(r);
            }
            4 if q.rules.len() > 1 => {
                let s = rng.random_range(0..q.rules.len());
                q.rules.swap(r, s);
            }
            _ => q = tweak(&q, rng),
        }
        if q != *p && check(&q).is_ok() {
            return q;
        }
    }
    tweak(p, rng)
}

/// Small numeric edit: a `similar_degree` tolerance or the acceptance rule.
pub fn tweak(p: &HeuristicProgram, rng: &mut SearchRng) -> HeuristicProgram {
    let mut q = p.clone();
    let tolerances: Vec<(usize, usize)> = q
        .rules
        .iter()
        .enumerate()
        .flat_map(|(r, rule)| {
            rule.bindings
                .iter()
                .enumerate()
                .filter(|(_, b)| matches!(b.selector, Selector::SimilarDegree { .. }))
                .map(move |(i, _)| (r, i))
        })
        .collect();
    if !tolerances.is_empty() && rng.random_bool(0.5) {
        let (r, i) = tolerances[rng.random_range(0..tolerances.len())];
        if let Selector::SimilarDegree { max_diff, .. } = &mut q.rules[r].bindings[i].selector {
            *max_diff = if *max_diff == 0 || rng.random_bool(0.5) {
                *max_diff + 1
            } else {
                *max_diff - 1
            };
        }
        return q;
    }
    q.acceptance = match q.acceptance {
        Acceptance::Improve => Acceptance::Anneal(AnnealParams { t0: 0.01, alpha: 0.995 }),
        Acceptance::Anneal(_) if rng.random_bool(0.3) => Acceptance::Improve,
        Acceptance::Anneal(a) => {
            let scale = [0.5, 2.0][rng.random_range(0..2)];
            let alpha = (a.alpha + rng.random_range(-0.004..0.004)).clamp(0.9, 0.9999);
            Acceptance::Anneal(AnnealParams {
                t0: a.t0 * scale,
                alpha,
            })
        }
    };
    q
}

/// Inserts or substitutes a rule whose move follows one of the offered
/// strategies; falls back to a plain mutation when none were offered.
fn guided(p: &HeuristicProgram, actions: &[Action], rng: &mut SearchRng) -> HeuristicProgram {
    if actions.is_empty() {
        return mutate(p, rng);
    }
    let rule = rule_for(actions[rng.random_range(0..actions.len())], rng);
    let mut q = p.clone();
    if q.rules.len() < MAX_RULES && rng.random_bool(0.5) {
        q.rules.insert(0, rule);
    } else {
        let r = rng.random_range(0..q.rules.len());
        q.rules[r] = rule;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::prompt::Parent;
    use crate::llm::{extract_program, Prompter, TaskSpec};
    use netrobust_core::hdsl::HC_PROGRAM;
    use netrobust_core::nos::sample_nos;

    fn prompter() -> Prompter {
        Prompter::new("m", 1.0, TaskSpec::default())
    }

    #[test]
    fn generated_programs_are_always_valid() {
        let mut rng = seeded_rng(1);
        let mut p = random_program(&mut rng);
        for _ in 0..500 {
            assert!(check(&p).is_ok(), "{p}");
            assert_eq!(parse(&p.to_string()).unwrap(), p);
            let other = random_program(&mut rng);
            p = mutate(&crossover(&p, &other, &mut rng), &mut rng);
            p = tweak(&p, &mut rng);
        }
    }

    #[test]
    fn every_task_yields_one_parseable_program() {
        let hc = parse(HC_PROGRAM).unwrap();
        let parent = Parent {
            description: "random swaps",
            program: &hc,
        };
        let nos = sample_nos(2, 12).unwrap();
        let requests = [
            prompter().init(None, 0, 4),
            prompter().init(Some(&hc), 1, 4),
            prompter().e1(parent, parent, &nos).unwrap(),
            prompter().m1(parent, &nos).unwrap(),
            prompter().m2(parent),
        ];
        for req in &requests {
            let reply = respond(req, 9);
            assert_eq!(reply.matches("```dsl").count(), 1);
            let got = extract_program(&reply).unwrap();
            assert!(!got.description.is_empty());
            assert_eq!(reply, respond(req, 9));
        }
        assert_ne!(respond(&requests[0], 9), respond(&requests[0], 10));
    }

    #[test]
    fn m1_uses_an_offered_action() {
        let hc = parse(HC_PROGRAM).unwrap();
        let parent = Parent {
            description: "",
            program: &hc,
        };
        let nos: Vec<_> = sample_nos(0, 48)
            .unwrap()
            .into_iter()
            .filter(|e| e.action == Action::EdgeRelocation)
            .take(12)
            .collect();
        let req = prompter().m1(parent, &nos).unwrap();
        assert_eq!(nos_actions(req.user_text()).len(), 12);
        let got = extract_program(&respond(&req, 0)).unwrap();
        assert!(got.program.rules.iter().any(|r| r.action.name() == "relocate_edge"));
    }
}
