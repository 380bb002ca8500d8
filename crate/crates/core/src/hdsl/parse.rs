use super::{
    Binding, HeuristicProgram, MoveExpr, ParseError, ParseErrorKind, ProgramError, Rule, Selector,
    MAX_BINDINGS, MAX_RULES,
};
use crate::heuristics::{Acceptance, AnnealParams};

const KEYWORDS: [&str; 5] = ["HEURISTIC", "ACCEPT", "RULE", "MOVE", "END"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(String),
    Assign,
    Eq,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Num(s) => format!("`{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

struct Line {
    number: usize,
    tokens: Vec<Token>,
    end_col: usize,
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

fn lex_line(number: usize, text: &str) -> Result<Line, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let lexical = |col: usize, msg: String| err(number, col, ParseErrorKind::Lexical(msg));
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        let tok = match c {
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            '=' => {
                i += 1;
                Tok::Eq
            }
            ':' => {
                if chars.get(i + 1) != Some(&'=') {
                    return Err(lexical(col, "expected `:=`".into()));
                }
                i += 2;
                Tok::Assign
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(lexical(col, "unterminated string literal".into())),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            let escaped = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some('r') => '\r',
                                other => {
                                    return Err(lexical(
                                        i + 1,
                                        format!("invalid escape `\\{}`", other.map_or(String::new(), |c| c.to_string())),
                                    ))
                                }
                            };
                            s.push(escaped);
                            i += 2;
                        }
                        Some(&c) => {
                            s.push(c);
                            i += 1;
                        }
                    }
                }
                Tok::Str(s)
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == '$' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    i += 1;
                    if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                        i += 1;
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
                    return Err(lexical(col, "malformed number".into()));
                }
                Tok::Num(chars[start..i].iter().collect())
            }
            c => return Err(lexical(col, format!("unexpected character `{c}`"))),
        };
        tokens.push(Token { tok, col });
    }
    Ok(Line {
        number,
        tokens,
        end_col: chars.len() + 1,
    })
}

/// Cursor over one line's tokens.
struct Cursor<'a> {
    line: &'a Line,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: &'a Line) -> Self {
        Self { line, pos: 0 }
    }

    fn col(&self) -> usize {
        self.line
            .tokens
            .get(self.pos)
            .map_or(self.line.end_col, |t| t.col)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        err(self.line.number, self.col(), kind)
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.line.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.syntax(format!("expected {}, found {}", want.describe(), t.describe()))),
            None => Err(self.syntax(format!("expected {}", want.describe()))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<&'a str, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            Some(t) => Err(self.syntax(format!("expected {what}, found {}", t.describe()))),
            None => Err(self.syntax(format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == word => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(format!("expected `{word}`"))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.syntax(format!("unexpected {}", t.describe()))),
        }
    }

    fn starts_with(&self, word: &str) -> bool {
        matches!(self.line.tokens.first(), Some(Token { tok: Tok::Ident(s), .. }) if s == word)
    }
}

struct Arg<'a> {
    tok: &'a Tok,
    col: usize,
}

/// `'(' arg {',' arg} ')'`, or nothing at all.
fn arguments<'a>(c: &mut Cursor<'a>) -> Result<Vec<Arg<'a>>, ParseError> {
    let mut args = Vec::new();
    if c.peek() != Some(&Tok::LParen) {
        return Ok(args);
    }
    c.pos += 1;
    if c.peek() == Some(&Tok::RParen) {
        c.pos += 1;
        return Ok(args);
    }
    loop {
        let col = c.col();
        match c.next() {
            Some(tok @ (Tok::Ident(_) | Tok::Num(_))) => args.push(Arg { tok, col }),
            Some(t) => return Err(err(c.line.number, col, ParseErrorKind::Syntax(format!("unexpected {}", t.describe())))),
            None => return Err(c.syntax("expected argument")),
        }
        match c.next() {
            Some(Tok::Comma) => continue,
            Some(Tok::RParen) => break,
            _ => {
                c.pos = c.pos.saturating_sub(1);
                return Err(c.syntax("expected `,` or `)`"));
            }
        }
    }
    Ok(args)
}

fn arity(line: usize, col: usize, name: &str, expected: usize, found: usize) -> Result<(), ParseError> {
    if expected == found {
        Ok(())
    } else {
        Err(err(
            line,
            col,
            ParseErrorKind::Arity {
                name: name.to_string(),
                expected,
                found,
            },
        ))
    }
}

fn bound_var(line: usize, arg: &Arg, bound: &[String]) -> Result<String, ParseError> {
    match arg.tok {
        Tok::Ident(s) if bound.iter().any(|b| b == s) => Ok(s.clone()),
        Tok::Ident(s) => Err(err(line, arg.col, ParseErrorKind::Unbound(s.clone()))),
        t => Err(err(
            line,
            arg.col,
            ParseErrorKind::Syntax(format!("expected variable, found {}", t.describe())),
        )),
    }
}

fn selector(c: &mut Cursor, bound: &[String]) -> Result<Selector, ParseError> {
    let line = c.line.number;
    let col = c.col();
    let name = c.ident("selector")?;
    if !Selector::NAMES.contains(&name) {
        return Err(err(line, col, ParseErrorKind::UnknownSelector(name.to_string())));
    }
    let args = arguments(c)?;
    let expected = match name {
        "similar_degree" => 2,
        "neighbor_of" | "highest_degree_neighbor_of" | "non_adjacent_to" => 1,
        _ => 0,
    };
    arity(line, col, name, expected, args.len())?;
    Ok(match name {
        "highest_degree" => Selector::HighestDegree,
        "lowest_degree" => Selector::LowestDegree,
        "random_node" => Selector::RandomNode,
        "highest_betweenness" => Selector::HighestBetweenness,
        "neighbor_of" => Selector::NeighborOf(bound_var(line, &args[0], bound)?),
        "highest_degree_neighbor_of" => Selector::HighestDegreeNeighborOf(bound_var(line, &args[0], bound)?),
        "non_adjacent_to" => Selector::NonAdjacentTo(bound_var(line, &args[0], bound)?),
        _ => {
            let reference = bound_var(line, &args[0], bound)?;
            let max_diff = match args[1].tok {
                Tok::Num(s) => s.parse::<usize>().ok(),
                _ => None,
            }
            .ok_or_else(|| {
                err(
                    line,
                    args[1].col,
                    ParseErrorKind::Syntax("max_diff must be a non-negative integer".into()),
                )
            })?;
            Selector::SimilarDegree { reference, max_diff }
        }
    })
}

fn move_expr(c: &mut Cursor, bound: &[String]) -> Result<MoveExpr, ParseError> {
    let line = c.line.number;
    let col = c.col();
    let name = c.ident("move name")?;
    if !MoveExpr::NAMES.contains(&name) {
        return Err(err(line, col, ParseErrorKind::UnknownMove(name.to_string())));
    }
    if c.peek() != Some(&Tok::LParen) {
        return Err(c.syntax("expected `(`"));
    }
    let args = arguments(c)?;
    let expected = match name {
        "add_edge" | "remove_edge" => 2,
        "relocate_edge" => 3,
        _ => 4,
    };
    arity(line, col, name, expected, args.len())?;
    let v = args
        .iter()
        .map(|a| bound_var(line, a, bound))
        .collect::<Result<Vec<_>, _>>()?;
    let mut v = v.into_iter();
    let mut take = || v.next().expect("arity checked");
    Ok(match name {
        "add_edge" => MoveExpr::AddEdge(take(), take()),
        "remove_edge" => MoveExpr::RemoveEdge(take(), take()),
        "relocate_edge" => MoveExpr::RelocateEdge(take(), take(), take()),
        _ => MoveExpr::SwapEdges(take(), take(), take(), take()),
    })
}

fn number(c: &mut Cursor, what: &str) -> Result<f64, ParseError> {
    let col = c.col();
    match c.next() {
        Some(Tok::Num(s)) => s.parse::<f64>().map_err(|_| {
            err(
                c.line.number,
                col,
                ParseErrorKind::Syntax(format!("{what} is not a number")),
            )
        }),
        _ => Err(err(
            c.line.number,
            col,
            ParseErrorKind::Syntax(format!("expected a number for {what}")),
        )),
    }
}

fn acceptance(c: &mut Cursor) -> Result<Acceptance, ParseError> {
    let col = c.col();
    let kind = c.ident("`improve` or `anneal`")?;
    let acc = match kind {
        "improve" => Acceptance::Improve,
        "anneal" => {
            c.keyword("t0")?;
            c.expect(Tok::Eq)?;
            let t0 = number(c, "t0")?;
            c.keyword("alpha")?;
            c.expect(Tok::Eq)?;
            let alpha = number(c, "alpha")?;
            let params = AnnealParams { t0, alpha };
            params.validate().map_err(|e| {
                err(
                    c.line.number,
                    col,
                    ParseErrorKind::Program(ProgramError::InvalidAnneal(e.to_string())),
                )
            })?;
            Acceptance::Anneal(params)
        }
        other => {
            return Err(err(
                c.line.number,
                col,
                ParseErrorKind::Syntax(format!("unknown acceptance `{other}`")),
            ))
        }
    };
    c.finish()?;
    Ok(acc)
}

fn rule(lines: &[Line], at: &mut usize, index: usize) -> Result<Rule, ParseError> {
    let header = &lines[*at];
    let mut c = Cursor::new(header);
    c.keyword("RULE")?;
    c.finish()?;
    *at += 1;

    let mut bound: Vec<String> = Vec::new();
    let mut bindings = Vec::new();
    loop {
        let Some(line) = lines.get(*at) else {
            return Err(err(
                header.number,
                1,
                ParseErrorKind::Syntax("RULE without MOVE and END".into()),
            ));
        };
        let mut c = Cursor::new(line);
        if c.starts_with("MOVE") {
            if bindings.is_empty() {
                return Err(err(
                    line.number,
                    1,
                    ParseErrorKind::Program(ProgramError::NoBindings { rule: index }),
                ));
            }
            c.pos = 1;
            let action = move_expr(&mut c, &bound)?;
            c.finish()?;
            *at += 1;
            let end = lines.get(*at).ok_or_else(|| {
                err(line.number + 1, 1, ParseErrorKind::Syntax("expected `END`".into()))
            })?;
            let mut c = Cursor::new(end);
            c.keyword("END")?;
            c.finish()?;
            *at += 1;
            return Ok(Rule { bindings, action });
        }

        let var_col = c.col();
        let var = c.ident("binding or MOVE")?;
        if KEYWORDS.contains(&var) {
            return Err(err(
                line.number,
                var_col,
                ParseErrorKind::Syntax(format!("unexpected `{var}` inside RULE")),
            ));
        }
        c.expect(Tok::Assign)?;
        if bindings.len() == MAX_BINDINGS {
            return Err(err(
                line.number,
                var_col,
                ParseErrorKind::Program(ProgramError::TooManyBindings {
                    rule: index,
                    count: MAX_BINDINGS + 1,
                }),
            ));
        }
        if bound.iter().any(|b| b == var) {
            return Err(err(line.number, var_col, ParseErrorKind::Rebound(var.to_string())));
        }
        let selector = selector(&mut c, &bound)?;
        c.finish()?;
        bound.push(var.to_string());
        bindings.push(Binding {
            var: var.to_string(),
            selector,
        });
        *at += 1;
    }
}

/// Parses program text. Blank lines and `#` comments are ignored.
pub fn parse(text: &str) -> Result<HeuristicProgram, ParseError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = lex_line(i + 1, raw)?;
        if !line.tokens.is_empty() {
            lines.push(line);
        }
    }
    let after_last = text.lines().count() + 1;

    let Some(first) = lines.first() else {
        return Err(err(1, 1, ParseErrorKind::Syntax("expected `HEURISTIC \"name\"`".into())));
    };
    let mut c = Cursor::new(first);
    c.keyword("HEURISTIC")?;
    let name = match c.next() {
        Some(Tok::Str(s)) => s.clone(),
        _ => return Err(c.syntax("expected quoted heuristic name")),
    };
    c.finish()?;

    let Some(accept_line) = lines.get(1) else {
        return Err(err(after_last, 1, ParseErrorKind::MissingAccept));
    };
    let mut c = Cursor::new(accept_line);
    if !c.starts_with("ACCEPT") {
        return Err(err(accept_line.number, 1, ParseErrorKind::MissingAccept));
    }
    c.pos = 1;
    let acceptance = acceptance(&mut c)?;

    let mut rules = Vec::new();
    let mut at = 2;
    while at < lines.len() {
        if rules.len() == MAX_RULES {
            return Err(err(
                lines[at].number,
                1,
                ParseErrorKind::Program(ProgramError::TooManyRules(MAX_RULES + 1)),
            ));
        }
        rules.push(rule(&lines, &mut at, rules.len() + 1)?);
    }
    if rules.is_empty() {
        return Err(err(after_last, 1, ParseErrorKind::Program(ProgramError::NoRules)));
    }
    Ok(HeuristicProgram {
        name,
        acceptance,
        rules,
    })
}
