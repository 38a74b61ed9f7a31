//! Reader for rules, programs and goals.
//!
//! The syntax is a small Prolog-style operator grammar:
//!
//! ```text
//! rule := [name '@'] head '<=>' [guard '|'] body '.'
//! ```
//!
//! Guards and bodies are comma-separated goals, lists use `[a,b|T]` sugar and
//! `%` starts a comment that runs to the end of the line.

use num_bigint::BigInt;

use crate::builtins::NOT_EQUAL;
use crate::error::{Error, ParseError, Result, ValidationError};
use crate::rule::{Predicate, Program, Rule};
use crate::term::{Term, VarGen, VarId};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Var(String),
    Punct(char),
    End,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
    /// Whitespace or a comment precedes the token.
    spaced: bool,
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

fn is_symbol_char(c: char) -> bool {
    SYMBOL_CHARS.contains(c)
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut spaced = true;

    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            spaced = true;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            spaced = true;
            continue;
        }
        let (tl, tc) = (line, col);
        let start = i;
        let tok = if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            advance(&mut i, &mut line, &mut col, j - start);
            Tok::Int(digits.parse().expect("digits"))
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            advance(&mut i, &mut line, &mut col, j - start);
            if c.is_uppercase() || c == '_' {
                Tok::Var(word)
            } else {
                Tok::Name(word)
            }
        } else if c == '\'' {
            let mut j = i + 1;
            let mut name = String::new();
            loop {
                match chars.get(j) {
                    None => {
                        return Err(ParseError {
                            line: tl,
                            column: tc,
                            message: "unterminated quoted atom".into(),
                        })
                    }
                    Some('\'') if chars.get(j + 1) == Some(&'\'') => {
                        name.push('\'');
                        j += 2;
                    }
                    Some('\'') => {
                        j += 1;
                        break;
                    }
                    Some('\\') if j + 1 < chars.len() => {
                        name.push(chars[j + 1]);
                        j += 2;
                    }
                    Some(&ch) => {
                        name.push(ch);
                        j += 1;
                    }
                }
            }
            advance(&mut i, &mut line, &mut col, j - start);
            Tok::Name(name)
        } else if "()[],|".contains(c) {
            advance(&mut i, &mut line, &mut col, 1);
            Tok::Punct(c)
        } else if c == '.'
            && chars
                .get(i + 1)
                .is_none_or(|&n| n.is_whitespace() || n == '%')
        {
            advance(&mut i, &mut line, &mut col, 1);
            Tok::End
        } else if is_symbol_char(c) {
            let mut j = i;
            while j < chars.len() && is_symbol_char(chars[j]) {
                j += 1;
            }
            let sym: String = chars[i..j].iter().collect();
            advance(&mut i, &mut line, &mut col, j - start);
            Tok::Name(sym)
        } else if c == '≠' || c == '!' || c == ';' {
            advance(&mut i, &mut line, &mut col, 1);
            Tok::Name(c.to_string())
        } else {
            return Err(ParseError {
                line: tl,
                column: tc,
                message: format!("unexpected character {c:?}"),
            });
        };
        toks.push(Token {
            tok,
            line: tl,
            column: tc,
            spaced,
        });
        spaced = false;
    }
    toks.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
        spaced: true,
    });
    Ok(toks)
}

/// Infix operators as (precedence, max left precedence, max right precedence).
fn infix(name: &str) -> Option<(u16, u16, u16)> {
    Some(match name {
        "@" => (1190, 1189, 1189),
        "<=>" => (1180, 1179, 1179),
        "|" => (1100, 1099, 1100),
        "," => (1000, 999, 1000),
        "=" | "is" | "<" | ">" | ">=" | "=<" | "=\\=" | "\\=" | "≠" | "=:=" => (700, 699, 699),
        "+" | "-" => (500, 500, 499),
        "*" => (400, 400, 399),
        _ => return None,
    })
}

/// Canonical spelling of an operator or functor name.
fn canonical(name: &str) -> &str {
    match name {
        "\\=" | "≠" => NOT_EQUAL,
        other => other,
    }
}

struct Parser<'g> {
    toks: Vec<Token>,
    pos: usize,
    vars: Vec<(String, VarId)>,
    gen: &'g mut VarGen,
}

impl<'g> Parser<'g> {
    fn new(src: &str, gen: &'g mut VarGen) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            vars: Vec::new(),
            gen,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, tok: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            line: tok.line,
            column: tok.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, p: char) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == Tok::Punct(p) {
            Ok(())
        } else {
            Err(self.error_at(&t, format!("expected `{p}`, found {}", describe(&t.tok))))
        }
    }

    fn var(&mut self, name: &str) -> Term {
        if name == "_" {
            return self.gen.fresh_term();
        }
        if let Some((_, v)) = self.vars.iter().find(|(n, _)| n == name) {
            return Term::Var(*v);
        }
        let v = self.gen.fresh();
        self.vars.push((name.to_string(), v));
        Term::Var(v)
    }

    fn starts_term(tok: &Tok) -> bool {
        matches!(
            tok,
            Tok::Int(_) | Tok::Name(_) | Tok::Var(_) | Tok::Punct('(') | Tok::Punct('[')
        )
    }

    fn parse(&mut self, max: u16) -> Result<Term, ParseError> {
        let (mut left, mut left_prec) = self.primary(max)?;
        loop {
            let tok = self.peek().clone();
            let name = match &tok.tok {
                Tok::Name(n) => n.clone(),
                Tok::Punct(c @ (',' | '|')) => c.to_string(),
                _ => break,
            };
            let Some((prec, lmax, rmax)) = infix(&name) else {
                return Err(self.error_at(&tok, format!("unknown operator `{name}`")));
            };
            if prec > max || left_prec > lmax {
                break;
            }
            self.next();
            let right = self.parse(rmax)?;
            left = Term::app(canonical(&name), [left, right]);
            left_prec = prec;
        }
        Ok(left)
    }

    fn primary(&mut self, max: u16) -> Result<(Term, u16), ParseError> {
        let tok = self.next();
        match tok.tok {
            Tok::Int(i) => Ok((Term::from(i), 0)),
            Tok::Var(name) => Ok((self.var(&name), 0)),
            Tok::Name(name) => {
                let follow = self.peek().clone();
                if follow.tok == Tok::Punct('(') && !follow.spaced {
                    self.next();
                    let mut args = vec![self.parse(999)?];
                    while self.peek().tok == Tok::Punct(',') {
                        self.next();
                        args.push(self.parse(999)?);
                    }
                    self.expect(')')?;
                    return Ok((Term::app(canonical(&name), args), 0));
                }
                if name == "-" {
                    if let Tok::Int(i) = &follow.tok {
                        if !follow.spaced {
                            let v = -i.clone();
                            self.next();
                            return Ok((Term::from(v), 0));
                        }
                    }
                    if Self::starts_term(&follow.tok) && infix_name(&follow.tok).is_none() {
                        let arg = self.parse(200.min(max))?;
                        return Ok((Term::app("-", [arg]), 200));
                    }
                }
                Ok((Term::atom(canonical(&name)), 0))
            }
            Tok::Punct('(') => {
                let t = self.parse(1200)?;
                self.expect(')')?;
                Ok((t, 0))
            }
            Tok::Punct('[') => {
                if self.peek().tok == Tok::Punct(']') {
                    self.next();
                    return Ok((Term::nil(), 0));
                }
                let mut items = vec![self.parse(999)?];
                while self.peek().tok == Tok::Punct(',') {
                    self.next();
                    items.push(self.parse(999)?);
                }
                let tail = if self.peek().tok == Tok::Punct('|') {
                    self.next();
                    self.parse(999)?
                } else {
                    Term::nil()
                };
                self.expect(']')?;
                Ok((Term::list_with_tail(items, tail), 0))
            }
            ref other => Err(self.error_at(&tok, format!("unexpected {}", describe(other)))),
        }
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }
}

fn infix_name(tok: &Tok) -> Option<(u16, u16, u16)> {
    match tok {
        Tok::Name(n) => infix(n),
        _ => None,
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Int(i) => format!("integer {i}"),
        Tok::Name(n) => format!("`{n}`"),
        Tok::Var(v) => format!("variable {v}"),
        Tok::Punct(c) => format!("`{c}`"),
        Tok::End => "end of clause".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Splits a `,`-conjunction into goals, dropping `true`.
fn conjuncts(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match t.functor() {
            Some((f, 2)) if f == "," => {
                stack.push(&t.args()[1]);
                stack.push(&t.args()[0]);
            }
            _ if t.is_atom("true") => {}
            _ => out.push(t.clone()),
        }
    }
    out
}

fn clause_to_rule(clause: Term, at: &Token) -> Result<Rule> {
    let err = |msg: &str| {
        Error::Parse(ParseError {
            line: at.line,
            column: at.column,
            message: msg.into(),
        })
    };
    let (name, body) = match clause.functor() {
        Some((f, 2)) if f == "@" => {
            let [n, b] = clause.args() else {
                unreachable!()
            };
            let Term::Atom(n) = n else {
                return Err(err("rule name must be an atom"));
            };
            (Some(n.to_string()), b.clone())
        }
        _ => (None, clause),
    };
    let Some((f, 2)) = body.functor() else {
        return Err(err("expected `head <=> body`"));
    };
    if f != "<=>" {
        return Err(err("expected `head <=> body`"));
    }
    let head = body.args()[0].clone();
    let rhs = &body.args()[1];
    let (guard, goals) = match rhs.functor() {
        Some((f, 2)) if f == "|" => (conjuncts(&rhs.args()[0]), conjuncts(&rhs.args()[1])),
        _ => (Vec::new(), conjuncts(rhs)),
    };
    let pred = match &head {
        Term::Compound(_) => Predicate::of(&head).unwrap(),
        _ => return Err(err("rule head must be a compound term")),
    };
    if let Some(g) = guard
        .iter()
        .chain(&goals)
        .find(|g| g.is_var() || g.as_int().is_some())
    {
        return Err(err(&format!("{g} is not a goal")));
    }
    let mut pre = Vec::new();
    let mut rec = None;
    let mut post = Vec::new();
    for g in goals {
        if pred.matches(&g) {
            if rec.is_some() {
                return Err(ValidationError::NonLinearRecursion { rule: 0 }.into());
            }
            rec = Some(g);
        } else if rec.is_some() {
            post.push(g);
        } else {
            pre.push(g);
        }
    }
    Ok(Rule::new(name, head, guard, pre, rec, post))
}

/// Parses and validates a program.
pub fn parse_program(text: &str) -> Result<Program> {
    Ok(Program::new(parse_rules(text)?)?)
}

/// Parses a sequence of rules without validating them as a program.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>> {
    let mut gen = VarGen::new();
    let mut p = Parser::new(text, &mut gen)?;
    let mut rules = Vec::new();
    while !p.at_eof() {
        p.vars.clear();
        let start = p.peek().clone();
        let clause = p.parse(1200)?;
        let end = p.next();
        if end.tok != Tok::End {
            return Err(p
                .error_at(&end, format!("expected `.`, found {}", describe(&end.tok)))
                .into());
        }
        match clause_to_rule(clause, &start) {
            Ok(r) => rules.push(r),
            Err(Error::Validation(ValidationError::NonLinearRecursion { .. })) => {
                return Err(ValidationError::NonLinearRecursion { rule: rules.len() }.into())
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rules)
}

/// Parses a single rule.
pub fn parse_rule(text: &str) -> Result<Rule> {
    let mut rules = parse_rules(text)?;
    match rules.len() {
        1 => Ok(rules.pop().unwrap()),
        n => Err(ParseError {
            line: 1,
            column: 1,
            message: format!("expected one rule, found {n}"),
        }
        .into()),
    }
}

/// Parses a goal or other term, allocating fresh variables from `gen`.
/// Returns the term and its named variables in order of first occurrence.
/// A trailing `.` is optional.
pub fn parse_goal(
    text: &str,
    gen: &mut VarGen,
) -> Result<(Term, Vec<(String, VarId)>), ParseError> {
    let mut p = Parser::new(text, gen)?;
    let t = p.parse(1200)?;
    if p.peek().tok == Tok::End {
        p.next();
    }
    if !p.at_eof() {
        let tok = p.peek().clone();
        return Err(p.error_at(&tok, format!("unexpected {}", describe(&tok.tok))));
    }
    let vars = std::mem::take(&mut p.vars);
    Ok((t, vars))
}
