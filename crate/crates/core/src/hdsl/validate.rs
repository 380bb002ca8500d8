use std::fmt;

use serde::{Deserialize, Serialize};

use super::{HeuristicProgram, MoveExpr, Rule, Selector};

/// Non-fatal findings about a parsed program. Rules are numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Warning {
    /// A binding that no later selector or the move reads.
    DeadBinding { rule: usize, var: String },
    /// The move can never be legal, whatever the graph.
    IllegalMove { rule: usize, reason: String },
    /// No selector draws randomly, so a rejected move is proposed again
    /// unchanged and the search can stall.
    Deterministic,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DeadBinding { rule, var } => {
                write!(f, "rule {rule}: binding `{var}` is never used")
            }
            Warning::IllegalMove { rule, reason } => {
                write!(f, "rule {rule}: move is never legal ({reason})")
            }
            Warning::Deterministic => {
                f.write_str("no selector is random; a rejected move will repeat and the search may stall")
            }
        }
    }
}

fn selector_of<'a>(rule: &'a Rule, var: &str) -> Option<&'a Selector> {
    rule.bindings.iter().find(|b| b.var == var).map(|b| &b.selector)
}

/// `x` and `y` always denote the same node: identical deterministic
/// selectors over identical references.
fn always_equal(rule: &Rule, x: &str, y: &str) -> bool {
    if x == y {
        return true;
    }
    match (selector_of(rule, x), selector_of(rule, y)) {
        (Some(sx), Some(sy)) => !sx.is_random() && sx == sy,
        _ => false,
    }
}

/// `(x, y)` is always an edge when the move is evaluated.
fn always_adjacent(rule: &Rule, x: &str, y: &str) -> bool {
    let from = |a: &str, b: &str| {
        matches!(
            selector_of(rule, b),
            Some(Selector::NeighborOf(r) | Selector::HighestDegreeNeighborOf(r)) if r == a
        )
    };
    from(x, y) || from(y, x)
}

/// `(x, y)` is never an edge when the move is evaluated.
fn never_adjacent(rule: &Rule, x: &str, y: &str) -> bool {
    let from = |a: &str, b: &str| matches!(selector_of(rule, b), Some(Selector::NonAdjacentTo(r)) if r == a);
    from(x, y) || from(y, x)
}

fn illegal_reason(rule: &Rule) -> Option<String> {
    let same = |x: &String, y: &String| always_equal(rule, x, y);
    let loop_msg = |x: &str, y: &str| Some(format!("`{x}` and `{y}` always denote the same node"));
    match &rule.action {
        MoveExpr::AddEdge(a, b) => {
            if same(a, b) {
                return loop_msg(a, b);
            }
            if always_adjacent(rule, a, b) {
                return Some(format!("`{a}`-`{b}` is always an existing edge"));
            }
        }
        MoveExpr::RemoveEdge(a, b) => {
            if same(a, b) {
                return loop_msg(a, b);
            }
            if never_adjacent(rule, a, b) {
                return Some(format!("`{a}`-`{b}` is never an edge"));
            }
        }
        MoveExpr::RelocateEdge(a, b, c) => {
            for (x, y) in [(a, b), (a, c), (b, c)] {
                if same(x, y) {
                    return loop_msg(x, y);
                }
            }
            if never_adjacent(rule, a, b) {
                return Some(format!("`{a}`-`{b}` is never an edge"));
            }
            if always_adjacent(rule, c, b) {
                return Some(format!("`{c}`-`{b}` is always an existing edge"));
            }
        }
        MoveExpr::SwapEdges(a, b, c, d) => {
            for (x, y) in [(a, b), (a, c), (a, d), (b, c), (b, d), (c, d)] {
                if same(x, y) {
                    return loop_msg(x, y);
                }
            }
            for (x, y) in [(a, b), (c, d)] {
                if never_adjacent(rule, x, y) {
                    return Some(format!("`{x}`-`{y}` is never an edge"));
                }
            }
            for (x, y) in [(a, d), (c, b)] {
                if always_adjacent(rule, x, y) {
                    return Some(format!("`{x}`-`{y}` is always an existing edge"));
                }
            }
        }
    }
    None
}

/// Static warnings, in rule order. A clean program yields an empty list.
pub fn validate(p: &HeuristicProgram) -> Vec<Warning> {
    let mut warnings = Vec::new();
    for (i, rule) in p.rules.iter().enumerate() {
        let n = i + 1;
        for (j, b) in rule.bindings.iter().enumerate() {
            let used_later = rule.bindings[j + 1..]
                .iter()
                .any(|later| later.selector.reference() == Some(b.var.as_str()));
            let used_by_move = rule.action.args().contains(&b.var.as_str());
            if !used_later && !used_by_move {
                warnings.push(Warning::DeadBinding {
                    rule: n,
                    var: b.var.clone(),
                });
            }
        }
        if let Some(reason) = illegal_reason(rule) {
            warnings.push(Warning::IllegalMove { rule: n, reason });
        }
    }
    let random = p
        .rules
        .iter()
        .flat_map(|r| &r.bindings)
        .any(|b| b.selector.is_random());
    if !random {
        warnings.push(Warning::Deterministic);
    }
    warnings
}
