//! Built-in constraints.
//!
//! Builtins either succeed, fail, or raise an [`EvalError`]. A failing or
//! erroring builtin leaves the binding store exactly as it found it.

use std::borrow::Cow;
use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::error::EvalError;
use crate::store::BindingStore;
use crate::term::{int_words, Term};

/// Spelling of the arithmetic inequality used internally. The parser maps
/// `\=` and `≠` to it.
pub const NOT_EQUAL: &str = "=\\=";

const BUILTINS: &[(&str, usize)] = &[
    ("true", 0),
    ("false", 0),
    ("=", 2),
    ("is", 2),
    (">", 2),
    ("<", 2),
    (">=", 2),
    ("=<", 2),
    (NOT_EQUAL, 2),
    ("\\=", 2),
    ("≠", 2),
    ("append", 3),
    ("m", 3),
];

pub fn is_builtin_name(name: &str, arity: usize) -> bool {
    BUILTINS.iter().any(|&(n, a)| n == name && a == arity)
}

pub fn is_builtin(goal: &Term) -> bool {
    goal.functor()
        .is_some_and(|(f, a)| is_builtin_name(f.as_str(), a))
}

/// Evaluates an integer expression over `+`, `-`, `*` and unary minus.
pub fn eval_arith(expr: &Term, store: &mut BindingStore) -> Result<BigInt, EvalError> {
    let mut units = 0u64;
    let value = eval(expr, None, store, &mut units).map(Cow::into_owned);
    store.add_work(units);
    value
}

/// With `env`, variables of `expr` are rule-local and stand for the terms in
/// `env`; the store is only consulted below those.
fn eval<'a>(
    expr: &'a Term,
    env: Option<&'a [Option<Term>]>,
    store: &'a BindingStore,
    units: &mut u64,
) -> Result<Cow<'a, BigInt>, EvalError> {
    let t = match (expr, env) {
        (Term::Var(v), Some(env)) => {
            return match &env[v.0 as usize] {
                Some(t) => eval(t, None, store, units),
                None => Err(EvalError::UnboundVariable),
            }
        }
        (t, Some(_)) => t,
        (t, None) => store.walk(t),
    };
    match t {
        Term::Int(i) => {
            *units += int_words(i) as u64;
            Ok(Cow::Borrowed(&**i))
        }
        Term::Var(_) => Err(EvalError::UnboundVariable),
        Term::Atom(a) => Err(EvalError::Type(format!("{a} is not a number"))),
        Term::Compound(c) => {
            let f = c.functor().as_str();
            *units += 1;
            let mut ev = |a| eval(a, env, store, units);
            let v = match (f, c.args()) {
                ("+", [a, b]) => &*ev(a)? + &*ev(b)?,
                ("-", [a, b]) => &*ev(a)? - &*ev(b)?,
                ("*", [a, b]) => &*ev(a)? * &*ev(b)?,
                ("-", [a]) => -&*ev(a)?,
                _ => return Err(EvalError::UnknownOperator(format!("{f}/{}", c.arity()))),
            };
            Ok(Cow::Owned(v))
        }
    }
}

fn compare(op: &str, ord: Ordering) -> bool {
    match op {
        ">" => ord == Ordering::Greater,
        "<" => ord == Ordering::Less,
        ">=" => ord != Ordering::Less,
        "=<" => ord != Ordering::Greater,
        _ => ord != Ordering::Equal,
    }
}

/// Runs an arithmetic goal of a rule without instantiating it: `goal` is
/// rule-local and `env` holds the values of its variables. The target of
/// `is/2` may be a local not yet in `env`, in which case it gets the value
/// directly. Returns `None` for other goals and whenever evaluation fails;
/// the caller then takes the general path.
pub(crate) fn exec_local(
    goal: &Term,
    env: &mut [Option<Term>],
    store: &mut BindingStore,
) -> Option<bool> {
    let (f, 2) = goal.functor()? else {
        return None;
    };
    let args = goal.args();
    let mut units = 0u64;
    let ok = match f.as_str() {
        "is" => {
            let Term::Var(target) = &args[0] else {
                return None;
            };
            let v = eval(&args[1], Some(env), store, &mut units)
                .ok()?
                .into_owned();
            let v = Term::from(v);
            match &env[target.0 as usize] {
                None => {
                    env[target.0 as usize] = Some(v);
                    units += 1;
                    true
                }
                Some(t) => {
                    let t = t.clone();
                    store.add_work(units);
                    return Some(store.unify(&t, &v));
                }
            }
        }
        op @ (">" | "<" | ">=" | "=<" | "=\\=" | "\\=" | "≠") => {
            let a = eval(&args[0], Some(env), store, &mut units).ok()?;
            let b = eval(&args[1], Some(env), store, &mut units).ok()?;
            compare(op, a.cmp(&b))
        }
        _ => return None,
    };
    store.add_work(units);
    Some(ok)
}

fn ground_error(e: EvalError, what: &str) -> EvalError {
    match e {
        EvalError::UnboundVariable => {
            EvalError::Instantiation(format!("{what} needs ground arguments"))
        }
        other => other,
    }
}

fn eval_ground(expr: &Term, store: &mut BindingStore, what: &str) -> Result<BigInt, EvalError> {
    eval_arith(expr, store).map_err(|e| ground_error(e, what))
}

/// Runs one builtin goal.
pub fn exec_builtin(goal: &Term, store: &mut BindingStore) -> Result<bool, EvalError> {
    let goal = store.walk(goal).clone();
    let Some((f, arity)) = goal.functor() else {
        return Err(EvalError::Instantiation("goal is a variable".into()));
    };
    let args = goal.args();
    match (f.as_str(), arity) {
        ("true", 0) => Ok(true),
        ("false", 0) => Ok(false),
        ("=", 2) => Ok(store.unify(&args[0], &args[1])),
        ("is", 2) => {
            let v = eval_ground(&args[1], store, "is/2")?;
            Ok(store.unify(&args[0], &Term::from(v)))
        }
        (op @ (">" | "<" | ">=" | "=<" | "=\\=" | "\\=" | "≠"), 2) => {
            let mut units = 0u64;
            let ord = {
                let a = eval(&args[0], None, store, &mut units).map_err(|e| ground_error(e, op))?;
                let b = eval(&args[1], None, store, &mut units).map_err(|e| ground_error(e, op))?;
                a.cmp(&b)
            };
            store.add_work(units);
            Ok(compare(op, ord))
        }
        ("append", 3) => append(&args[0], &args[1], &args[2], store),
        ("m", 3) => merge(&args[0], &args[1], &args[2], store),
        (name, n) => Err(EvalError::UnknownBuiltin(format!("{name}/{n}"))),
    }
}

/// Runs goals left to right. On failure or error, all of their bindings are
/// undone.
pub fn check_guard(goals: &[Term], store: &mut BindingStore) -> Result<bool, EvalError> {
    let mark = store.mark();
    for g in goals {
        match exec_builtin(g, store) {
            Ok(true) => {}
            Ok(false) => {
                store.undo_to(mark);
                return Ok(false);
            }
            Err(e) => {
                store.undo_to(mark);
                return Err(e);
            }
        }
    }
    Ok(true)
}

/// Elements of a proper list under the current bindings, not resolved.
fn list_items<'a>(
    list: &'a Term,
    store: &'a BindingStore,
    what: &str,
) -> Result<Vec<&'a Term>, EvalError> {
    let mut items = Vec::new();
    let mut cur = store.walk(list);
    loop {
        if let Some((h, t)) = cur.as_cons() {
            items.push(h);
            cur = store.walk(t);
        } else if cur.is_nil() {
            return Ok(items);
        } else if cur.is_var() {
            return Err(EvalError::Instantiation(format!(
                "{what} needs a proper list"
            )));
        } else {
            return Err(EvalError::Type(format!(
                "{what} expects a list, found {cur}"
            )));
        }
    }
}

fn append(x: &Term, y: &Term, z: &Term, store: &mut BindingStore) -> Result<bool, EvalError> {
    let items = list_items(x, store, "append/3")?;
    let work = items.len() as u64 + 1;
    let tail = store.resolve(y);
    let joined = Term::list_rev(items.into_iter().rev().map(|t| store.resolve(t)), tail);
    store.add_work(work);
    Ok(store.unify(z, &joined))
}

fn sorted_ints(list: &Term, store: &BindingStore) -> Result<Vec<Term>, EvalError> {
    let items = list_items(list, store, "m/3")?;
    let mut out: Vec<Term> = Vec::with_capacity(items.len());
    for item in items {
        let item = store.walk(item);
        match item {
            Term::Int(i) => {
                if let Some(Term::Int(prev)) = out.last() {
                    if prev > i {
                        return Err(EvalError::Type("m/3 expects ascending lists".into()));
                    }
                }
                out.push(item.clone());
            }
            Term::Var(_) => return Err(EvalError::Instantiation("m/3 needs ground lists".into())),
            other => {
                return Err(EvalError::Type(format!(
                    "m/3 expects integers, found {other}"
                )))
            }
        }
    }
    Ok(out)
}

/// Stable merge of two ascending integer lists; ties take from `x` first.
fn merge(x: &Term, y: &Term, z: &Term, store: &mut BindingStore) -> Result<bool, EvalError> {
    let xs = sorted_ints(x, store)?;
    let ys = sorted_ints(y, store)?;
    store.add_work((xs.len() + ys.len()) as u64);
    let mut merged = Vec::with_capacity(xs.len() + ys.len());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        if ys[j].as_int() < xs[i].as_int() {
            merged.push(ys[j].clone());
            j += 1;
        } else {
            merged.push(xs[i].clone());
            i += 1;
        }
    }
    merged.extend_from_slice(&xs[i..]);
    merged.extend_from_slice(&ys[j..]);
    Ok(store.unify(z, &Term::list_rev(merged.into_iter().rev(), Term::nil())))
}
