//! Line-oriented program files.
//!
//! ```text
//! # comment
//! (VAR x y)
//! (MODE lp)
//! f(x,s(y)) -> f(s(s(x)),y)
//! f(x,0) -> f(s(0),x)
//! ```
//!
//! Identifiers are `[A-Za-z0-9_']+`. Identifiers declared in the `VAR`
//! header are variables, everything else is a function symbol whose arity
//! is fixed by its first occurrence. Constants are written without
//! parentheses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::engine::Mode;
use crate::term::{Program, Rule, Symbol, Term, Var};

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("symbol `{symbol}` used with arity {found}, but it has arity {expected} (first used at {first})")]
    ArityConflict {
        symbol: String,
        expected: usize,
        found: usize,
        first: Location,
    },
    #[error("the hole symbol is reserved and cannot appear in programs or terms")]
    ReservedHole,
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("program has no rules")]
    EmptyProgram,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected {
        expected: &'static str,
        found: String,
    },
    #[error("variable `{0}` cannot take arguments")]
    AppliedVariable(String),
    #[error("unknown header `({0} ...)`")]
    UnknownHeader(String),
    #[error("{0}")]
    BadMode(String),
    #[error("declarations must come before the first rule")]
    LateDeclaration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: {kind}")]
pub struct ParseError {
    pub location: Location,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        ParseError {
            location: Location { line, column },
            kind,
        }
    }
}

/// A parsed program file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProgramFile {
    pub vars: Vec<Var>,
    pub rules: Vec<(Rule, Location)>,
    pub mode_hint: Option<Mode>,
    /// Arity of each function symbol with its first occurrence.
    pub signature: BTreeMap<Symbol, (usize, Location)>,
}

impl ProgramFile {
    /// A file for in-memory rules: variables are declared in order of first
    /// occurrence, rule locations are their line in [`format_program`].
    pub fn from_rules(rules: Vec<Rule>, mode_hint: Option<Mode>) -> Self {
        let mut vars = Vec::new();
        let mut seen = BTreeSet::new();
        for r in &rules {
            for t in [&r.lhs, &r.rhs] {
                visit_vars_in_order(t, &mut |v| {
                    if seen.insert(v.clone()) {
                        vars.push(v.clone());
                    }
                });
            }
        }
        let header_lines = 1 + usize::from(mode_hint.is_some());
        let mut file = ProgramFile {
            vars,
            rules: Vec::new(),
            mode_hint,
            signature: BTreeMap::new(),
        };
        for (i, r) in rules.into_iter().enumerate() {
            let loc = Location {
                line: header_lines + i + 1,
                column: 1,
            };
            for t in [&r.lhs, &r.rhs] {
                record_signature(t, loc, &mut file.signature);
            }
            file.rules.push((r, loc));
        }
        file
    }

    pub fn program(&self) -> Program {
        self.rules.iter().map(|(r, _)| r.clone()).collect()
    }

    pub fn declared(&self) -> BTreeSet<Var> {
        self.vars.iter().cloned().collect()
    }

    /// Parses a term over this file's variables and signature.
    pub fn parse_term(&self, text: &str) -> Result<Term, ParseError> {
        let mut sig = self.signature.clone();
        let declared = self.declared();
        let mut p = LineParser::new(text, 1, &declared, &mut sig)?;
        let t = p.term()?;
        p.expect_end()?;
        Ok(t)
    }
}

fn visit_vars_in_order(t: &Term, f: &mut impl FnMut(&Var)) {
    match t {
        Term::Var(v) => f(v),
        Term::App(_, args) => args.iter().for_each(|a| visit_vars_in_order(a, f)),
    }
}

fn record_signature(t: &Term, loc: Location, sig: &mut BTreeMap<Symbol, (usize, Location)>) {
    if let Term::App(f, args) = t {
        sig.entry(f.clone()).or_insert((args.len(), loc));
        args.iter().for_each(|a| record_signature(a, loc, sig));
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Arrow,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Comma => f.write_str("`,`"),
            Token::Arrow => f.write_str("`->`"),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Tokens of one line with their 1-based columns. Comments are dropped.
fn lex(text: &str, line: usize) -> Result<Vec<(Token, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push((Token::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Token::RParen, col));
                i += 1;
            }
            ',' => {
                out.push((Token::Comma, col));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Token::Arrow, col));
                i += 2;
            }
            '□' => return Err(ParseError::new(line, col, ParseErrorKind::ReservedHole)),
            '[' if chars.get(i + 1) == Some(&']') => {
                return Err(ParseError::new(line, col, ParseErrorKind::ReservedHole))
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push((Token::Ident(chars[start..i].iter().collect()), col));
            }
            other => {
                return Err(ParseError::new(
                    line,
                    col,
                    ParseErrorKind::UnexpectedChar(other),
                ))
            }
        }
    }
    Ok(out)
}

struct LineParser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    line: usize,
    end_column: usize,
    declared: &'a BTreeSet<Var>,
    signature: &'a mut BTreeMap<Symbol, (usize, Location)>,
}

impl<'a> LineParser<'a> {
    fn new(
        text: &str,
        line: usize,
        declared: &'a BTreeSet<Var>,
        signature: &'a mut BTreeMap<Symbol, (usize, Location)>,
    ) -> Result<Self, ParseError> {
        let tokens = lex(text, line)?;
        check_balance(&tokens, line)?;
        let end_column = text.chars().take_while(|&c| c != '#').count() + 1;
        Ok(LineParser {
            tokens,
            pos: 0,
            line,
            end_column,
            declared,
            signature,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.end_column, |(_, c)| *c)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError::new(self.line, self.column(), kind)
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let found = self
            .peek()
            .map_or_else(|| "end of line".to_owned(), ToString::to_string);
        self.error(ParseErrorKind::Unexpected { expected, found })
    }

    fn expect(&mut self, tok: Token, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of line")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let column = self.column();
        let name = match self.peek() {
            Some(Token::Ident(name)) => name.clone(),
            _ => return Err(self.unexpected("a term")),
        };
        self.pos += 1;
        let var = Var::new(&name);
        let has_args = self.peek() == Some(&Token::LParen);
        if self.declared.contains(&var) {
            if has_args {
                return Err(ParseError::new(
                    self.line,
                    column,
                    ParseErrorKind::AppliedVariable(name),
                ));
            }
            return Ok(Term::Var(var));
        }
        let mut args = Vec::new();
        if has_args {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(Token::Comma) => self.pos += 1,
                    Some(Token::RParen) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.unexpected("`,` or `)`")),
                }
            }
        }
        let symbol = Symbol::new(&name);
        let here = Location {
            line: self.line,
            column,
        };
        let (arity, first) = *self
            .signature
            .entry(symbol.clone())
            .or_insert((args.len(), here));
        if arity != args.len() {
            return Err(ParseError::new(
                self.line,
                column,
                ParseErrorKind::ArityConflict {
                    symbol: name,
                    expected: arity,
                    found: args.len(),
                    first,
                },
            ));
        }
        Ok(Term::apply_symbol(symbol, args))
    }
}

fn check_balance(tokens: &[(Token, usize)], line: usize) -> Result<(), ParseError> {
    let mut open = Vec::new();
    for (tok, col) in tokens {
        match tok {
            Token::LParen => open.push(*col),
            Token::RParen if open.pop().is_none() => {
                return Err(ParseError::new(
                    line,
                    *col,
                    ParseErrorKind::UnbalancedParens,
                ))
            }
            _ => {}
        }
    }
    match open.first() {
        Some(&col) => Err(ParseError::new(line, col, ParseErrorKind::UnbalancedParens)),
        None => Ok(()),
    }
}

/// Parses a whole program file.
pub fn parse_program(text: &str) -> Result<ProgramFile, ParseError> {
    let mut file = ProgramFile::default();
    let mut declared = BTreeSet::new();
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let tokens = lex(raw, line)?;
        if tokens.is_empty() {
            continue;
        }
        if let [(Token::LParen, _), (Token::Ident(head), head_col), ..] = tokens.as_slice() {
            if head == "VAR" || head == "MODE" {
                if !file.rules.is_empty() {
                    return Err(ParseError::new(
                        line,
                        tokens[0].1,
                        ParseErrorKind::LateDeclaration,
                    ));
                }
                check_balance(&tokens, line)?;
                parse_header(
                    head,
                    *head_col,
                    &tokens[2..],
                    line,
                    &mut file,
                    &mut declared,
                )?;
                continue;
            }
            if head.chars().all(|c| c.is_ascii_uppercase()) && head.len() > 1 {
                return Err(ParseError::new(
                    line,
                    *head_col,
                    ParseErrorKind::UnknownHeader(head.clone()),
                ));
            }
        }
        let mut p = LineParser::new(raw, line, &declared, &mut file.signature)?;
        let start = p.column();
        let lhs = p.term()?;
        p.expect(Token::Arrow, "`->`")?;
        let rhs = p.term()?;
        p.expect_end()?;
        file.rules.push((
            Rule::new(lhs, rhs),
            Location {
                line,
                column: start,
            },
        ));
    }
    if file.rules.is_empty() {
        return Err(ParseError::new(last_line, 1, ParseErrorKind::EmptyProgram));
    }
    Ok(file)
}

fn parse_header(
    head: &str,
    head_col: usize,
    rest: &[(Token, usize)],
    line: usize,
    file: &mut ProgramFile,
    declared: &mut BTreeSet<Var>,
) -> Result<(), ParseError> {
    let Some(((Token::RParen, _), items)) = rest.split_last() else {
        let col = rest.last().map_or(head_col, |(_, c)| *c);
        return Err(ParseError::new(
            line,
            col,
            ParseErrorKind::Unexpected {
                expected: "`)` closing the header",
                found: "more input".to_owned(),
            },
        ));
    };
    let mut names = Vec::new();
    for (tok, col) in items {
        match tok {
            Token::Ident(name) => names.push((name.clone(), *col)),
            other => {
                return Err(ParseError::new(
                    line,
                    *col,
                    ParseErrorKind::Unexpected {
                        expected: "an identifier",
                        found: other.to_string(),
                    },
                ))
            }
        }
    }
    if head == "VAR" {
        for (name, _) in names {
            let v = Var::new(&name);
            if declared.insert(v.clone()) {
                file.vars.push(v);
            }
        }
        return Ok(());
    }
    match names.as_slice() {
        [(name, col)] => {
            let mode = name
                .parse::<Mode>()
                .map_err(|e| ParseError::new(line, *col, ParseErrorKind::BadMode(e)))?;
            file.mode_hint = Some(mode);
            Ok(())
        }
        _ => Err(ParseError::new(
            line,
            head_col,
            ParseErrorKind::BadMode("MODE takes exactly one of trs, lp".into()),
        )),
    }
}

/// Parses a single term with the given variables and a fresh signature.
pub fn parse_term(text: &str, declared: &BTreeSet<Var>) -> Result<Term, ParseError> {
    let mut sig = BTreeMap::new();
    let mut p = LineParser::new(text, 1, declared, &mut sig)?;
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

/// Canonical text of a program file: the `VAR` header (always present),
/// the optional `MODE` header, then one rule per line.
pub fn format_program(file: &ProgramFile) -> String {
    let mut out = String::from("(VAR");
    for v in &file.vars {
        write!(out, " {v}").expect("writing to a string");
    }
    out.push_str(")\n");
    if let Some(mode) = file.mode_hint {
        writeln!(out, "(MODE {mode})").expect("writing to a string");
    }
    for (r, _) in &file.rules {
        writeln!(out, "{r}").expect("writing to a string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRS: &str = "(VAR x y)\nf(x,s(y)) -> f(s(s(x)),y)\nf(x,0) -> f(s(0),x)";

    #[test]
    fn parses_two_rule_program() {
        let file = parse_program(TRS).unwrap();
        assert_eq!(file.vars, vec![Var::new("x"), Var::new("y")]);
        let rules: Vec<String> = file.program().iter().map(ToString::to_string).collect();
        assert_eq!(
            rules,
            vec!["f(x,s(y)) -> f(s(s(x)),y)", "f(x,0) -> f(s(0),x)"]
        );
        assert_eq!(file.rules[1].1, Location { line: 3, column: 1 });
        assert!(file.program().rules[0].lhs.root().unwrap().1[0].is_var());
    }

    #[test]
    fn parses_unary_and_ground_programs() {
        let file = parse_program("(VAR x)\nf(x) -> s(x)").unwrap();
        assert_eq!(
            file.program().rules,
            vec![Rule::new(
                Term::app("f", vec![Term::var("x")]),
                Term::app("s", vec![Term::var("x")])
            )]
        );
        let file = parse_program("(VAR)\n0 -> 0").unwrap();
        assert_eq!(
            file.program().rules,
            vec![Rule::new(Term::constant("0"), Term::constant("0"))]
        );
        assert!(file.program().rules[0].is_ground());
    }

    #[test]
    fn missing_header_means_no_variables() {
        let file = parse_program("f(x) -> x").unwrap();
        assert!(file.program().rules[0].is_ground());
    }

    #[test]
    fn comments_blank_lines_and_mode() {
        let text = "# sample\n\n(VAR x y)  # vars\n(MODE lp)\nf(x,0) -> f(x,s(x)) # r2\n";
        let file = parse_program(text).unwrap();
        assert_eq!(file.mode_hint, Some(Mode::Lp));
        assert_eq!(file.rules.len(), 1);
        assert_eq!(file.rules[0].1.line, 5);
    }

    #[test]
    fn parse_term_examples() {
        let vars: BTreeSet<Var> = [Var::new("x")].into_iter().collect();
        assert_eq!(
            parse_term("f(s(0),0)", &vars).unwrap().to_string(),
            "f(s(0),0)"
        );
        assert_eq!(parse_term("x", &vars).unwrap(), Term::var("x"));
        let t = parse_term("f(g(x,x))", &vars).unwrap();
        assert_eq!(
            t,
            Term::app(
                "f",
                vec![Term::app("g", vec![Term::var("x"), Term::var("x")])]
            )
        );
    }

    fn err(text: &str) -> ParseError {
        parse_program(text).unwrap_err()
    }

    #[test]
    fn error_positions() {
        let e = err("(VAR x)\nf(x) -> f(x,x)");
        assert!(matches!(
            e.kind,
            ParseErrorKind::ArityConflict {
                expected: 1,
                found: 2,
                ..
            }
        ));
        assert_eq!(e.location, Location { line: 2, column: 9 });

        let e = err("(VAR x)\nf(x -> x");
        assert_eq!(e.kind, ParseErrorKind::UnbalancedParens);
        assert_eq!(e.location, Location { line: 2, column: 2 });

        let e = err("f(x)) -> x");
        assert_eq!(e.kind, ParseErrorKind::UnbalancedParens);
        assert_eq!(e.location.column, 5);

        let e = err("(VAR x)\nf(□) -> x");
        assert_eq!(e.kind, ParseErrorKind::ReservedHole);
        assert_eq!(e.location, Location { line: 2, column: 3 });
        assert_eq!(err("f([]) -> 0").kind, ParseErrorKind::ReservedHole);

        assert_eq!(
            err("(VAR x)\n# nothing\n").kind,
            ParseErrorKind::EmptyProgram
        );
        assert_eq!(err("").kind, ParseErrorKind::EmptyProgram);
    }

    #[test]
    fn other_errors() {
        assert!(matches!(
            err("(VAR x)\nx(0) -> 0").kind,
            ParseErrorKind::AppliedVariable(_)
        ));
        assert!(matches!(
            err("f(x) 0").kind,
            ParseErrorKind::Unexpected { .. }
        ));
        assert!(matches!(
            err("f(x) -> 0 0").kind,
            ParseErrorKind::Unexpected { .. }
        ));
        assert!(matches!(
            err("f(x) -> f(,)").kind,
            ParseErrorKind::Unexpected { .. }
        ));
        assert!(matches!(
            err("f(x) -> 0\n(VAR x)").kind,
            ParseErrorKind::LateDeclaration
        ));
        assert!(matches!(
            err("(RULES f(x) -> x)").kind,
            ParseErrorKind::UnknownHeader(_)
        ));
        assert!(matches!(
            err("(MODE both)\n0 -> 0").kind,
            ParseErrorKind::BadMode(_)
        ));
        assert!(matches!(
            err("f(x) -> 0 ; 1").kind,
            ParseErrorKind::UnexpectedChar(';')
        ));
    }

    #[test]
    fn file_level_term_parsing_uses_signature() {
        let file = parse_program(TRS).unwrap();
        assert!(file.parse_term("f(s(0),0)").is_ok());
        let e = file.parse_term("f(0)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityConflict { .. }));
    }

    #[test]
    fn format_is_canonical() {
        let file = parse_program("f(x,s(y))->f(s(s(x)),y) # c\n(VAR y x)").unwrap_err();
        assert_eq!(file.kind, ParseErrorKind::LateDeclaration);

        let file = parse_program("(VAR y x)\n(MODE TRS)\nf( x , s(y) )->f(s(s(x)),y)").unwrap();
        let text = format_program(&file);
        assert_eq!(text, "(VAR y x)\n(MODE trs)\nf(x,s(y)) -> f(s(s(x)),y)\n");
        assert_eq!(format_program(&parse_program(&text).unwrap()), text);
    }
}
