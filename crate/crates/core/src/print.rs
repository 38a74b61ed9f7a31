//! Printing terms and rules in the concrete syntax accepted by
//! [`crate::parse`].

use std::fmt::{self, Write};

use crate::rule::Rule;
use crate::term::{Term, VarId};

/// Letter name for the `i`-th variable: `A`..`Z`, then `A1`..`Z1`, ...
pub fn var_name(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    match i / 26 {
        0 => letter.to_string(),
        n => format!("{letter}{n}"),
    }
}

fn infix_op(name: &str) -> Option<(u16, u16, u16)> {
    Some(match name {
        "@" => (1190, 1189, 1189),
        "<=>" => (1180, 1179, 1179),
        "|" => (1100, 1099, 1100),
        "," => (1000, 999, 1000),
        "=" | "is" | "<" | ">" | ">=" | "=<" | "=\\=" | "=:=" => (700, 699, 699),
        "+" | "-" => (500, 500, 499),
        "*" => (400, 400, 399),
        _ => return None,
    })
}

fn atom_needs_quotes(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return true;
    };
    if first.is_lowercase() {
        return !name.chars().all(|c| c.is_alphanumeric() || c == '_');
    }
    if matches!(name, "[]" | "≠" | "!" | ";") {
        return false;
    }
    name == "." || !name.chars().all(|c| "+-*/\\^<>=~:.?@#&$".contains(c))
}

fn write_atom(out: &mut String, name: &str) {
    if atom_needs_quotes(name) {
        out.push('\'');
        for c in name.chars() {
            if c == '\'' || c == '\\' {
                out.push('\\');
            }
            out.push(c);
        }
        out.push('\'');
    } else {
        out.push_str(name);
    }
}

/// Writes `t` with variable names from `names`. `max` is the highest
/// operator precedence allowed without parentheses; `operand` is set when
/// `t` is an argument of an operator.
fn write_term(
    out: &mut String,
    t: &Term,
    max: u16,
    operand: bool,
    names: &dyn Fn(VarId) -> String,
) {
    match t {
        Term::Var(v) => out.push_str(&names(*v)),
        Term::Int(i) => {
            if operand && i.sign() == num_bigint::Sign::Minus {
                let _ = write!(out, "({i})");
            } else {
                let _ = write!(out, "{i}");
            }
        }
        Term::Atom(a) => write_atom(out, a.as_str()),
        Term::Compound(c) => {
            if t.as_cons().is_some() {
                out.push('[');
                let mut cur = t;
                let mut first = true;
                while let Some((h, tail)) = cur.as_cons() {
                    if !first {
                        out.push(',');
                    }
                    first = false;
                    write_term(out, h, 999, false, names);
                    cur = tail;
                }
                if !cur.is_nil() {
                    out.push('|');
                    write_term(out, cur, 999, false, names);
                }
                out.push(']');
                return;
            }
            let f = c.functor().as_str();
            match (infix_op(f), c.args()) {
                (Some((prec, lmax, rmax)), [l, r]) => {
                    let paren = prec > max;
                    if paren {
                        out.push('(');
                    }
                    write_term(out, l, lmax, true, names);
                    match f {
                        "," => out.push_str(", "),
                        "is" | "<=>" | "|" | "@" => {
                            out.push(' ');
                            out.push_str(f);
                            out.push(' ');
                        }
                        _ => out.push_str(f),
                    }
                    write_term(out, r, rmax, true, names);
                    if paren {
                        out.push(')');
                    }
                }
                (_, [arg]) if f == "-" => {
                    let paren = operand || max < 200;
                    if paren {
                        out.push('(');
                    }
                    out.push('-');
                    if arg.is_var() {
                        write_term(out, arg, 200, true, names);
                    } else {
                        out.push('(');
                        write_term(out, arg, 1200, false, names);
                        out.push(')');
                    }
                    if paren {
                        out.push(')');
                    }
                }
                _ => {
                    write_atom(out, f);
                    out.push('(');
                    for (i, a) in c.args().iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        write_term(out, a, 999, false, names);
                    }
                    out.push(')');
                }
            }
        }
    }
}

/// Prints a term using `names` for variables.
pub fn term_to_string_with(t: &Term, names: &dyn Fn(VarId) -> String) -> String {
    let mut out = String::new();
    write_term(&mut out, t, 1200, false, names);
    out
}

/// Prints a term whose variables are rule-local ids, naming them by letter.
pub fn term_to_string_lettered(t: &Term) -> String {
    term_to_string_with(t, &|v| var_name(v.0 as usize))
}

fn conj(goals: &[&Term], paren_many: bool) -> String {
    match goals {
        [] => "true".into(),
        [g] => {
            let mut s = String::new();
            write_term(&mut s, g, 999, false, &|v| var_name(v.0 as usize));
            s
        }
        many => {
            let inner = many
                .iter()
                .map(|g| conj(&[g], false))
                .collect::<Vec<_>>()
                .join(", ");
            if paren_many {
                format!("({inner})")
            } else {
                inner
            }
        }
    }
}

/// Prints a rule in three-part body form; empty parts print as `true`.
pub fn rule_to_string(r: &Rule) -> String {
    let mut s = String::new();
    if let Some(name) = &r.name {
        write_atom(&mut s, name);
        s.push_str(" @ ");
    }
    s.push_str(&term_to_string_lettered(&r.head));
    s.push_str(" <=> ");
    s.push_str(&conj(&r.guard.iter().collect::<Vec<_>>(), false));
    s.push_str(" | ");
    let pre: Vec<&Term> = r.body_pre.iter().collect();
    let rec: Vec<&Term> = r.body_rec.iter().collect();
    let post: Vec<&Term> = r.body_post.iter().collect();
    s.push_str(&conj(&pre, true));
    s.push_str(", ");
    s.push_str(&conj(&rec, true));
    s.push_str(", ");
    s.push_str(&conj(&post, true));
    s.push('.');
    s
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&term_to_string_with(self, &|v| format!("_G{}", v.0)))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rule_to_string(self))
    }
}
