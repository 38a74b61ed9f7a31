//! Variable bindings with a trail for rollback.

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::{smallvec, SmallVec};

use crate::term::{rebuild, Term, VarId};

/// A position in the trail; see [`BindingStore::mark`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark(usize);

/// Maps variables to the terms they are bound to.
///
/// Bindings are never overwritten. Every binding is recorded on the trail so
/// that guard checks can be undone. Once a rule application is committed the
/// trail is cleared with [`BindingStore::commit`].
#[derive(Default, Debug)]
pub struct BindingStore {
    bindings: FxHashMap<VarId, Term>,
    trail: Vec<VarId>,
    work: u64,
}

impl BindingStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mark(&self) -> Mark {
        Mark(self.trail.len())
    }

    /// Removes every binding made since `mark`.
    pub fn undo_to(&mut self, mark: Mark) {
        debug_assert!(mark.0 <= self.trail.len(), "stale mark");
        while self.trail.len() > mark.0 {
            let v = self.trail.pop().unwrap();
            self.bindings.remove(&v);
        }
    }

    /// Forgets the trail. Marks taken before this call become invalid.
    pub fn commit(&mut self) {
        self.trail.clear();
    }

    /// Number of bindings made since the last commit.
    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    pub(crate) fn trailed_since(&self, mark: Mark) -> &[VarId] {
        &self.trail[mark.0..]
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn lookup(&self, v: VarId) -> Option<&Term> {
        self.bindings.get(&v)
    }

    pub fn is_bound(&self, v: VarId) -> bool {
        self.bindings.contains_key(&v)
    }

    /// Cumulative work units spent in unification and builtins.
    pub fn work(&self) -> u64 {
        self.work
    }

    pub fn add_work(&mut self, units: u64) {
        self.work += units;
    }

    /// Follows variable bindings until reaching an unbound variable or a
    /// non-variable term.
    pub fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Binds an unbound variable. The caller is responsible for the occurs
    /// check.
    pub fn bind(&mut self, v: VarId, t: Term) {
        debug_assert!(!self.bindings.contains_key(&v), "rebinding {v:?}");
        self.bindings.insert(v, t);
        self.trail.push(v);
    }

    /// True if `v` occurs in `t` under the current bindings.
    pub fn occurs(&self, v: VarId, t: &Term) -> bool {
        let mut stack: SmallVec<[&Term; 8]> = smallvec![t];
        while let Some(t) = stack.pop() {
            match self.walk(t) {
                Term::Var(w) => {
                    if *w == v {
                        return true;
                    }
                }
                Term::Compound(c) if !c.is_ground() => stack.extend(c.args()),
                _ => {}
            }
        }
        false
    }

    /// Unifies two terms with the occurs check. On failure every binding made
    /// by this call is undone.
    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        match (self.walk(a), self.walk(b)) {
            (Term::Var(u), t) | (t, Term::Var(u)) if t.is_ground() => {
                let (u, t) = (*u, t.clone());
                self.work += 1;
                self.bind(u, t);
                return true;
            }
            _ => {}
        }
        let mark = self.mark();
        if self.unify_inner(a, b) {
            true
        } else {
            self.undo_to(mark);
            false
        }
    }

    fn unify_inner(&mut self, a: &Term, b: &Term) -> bool {
        let mut stack: SmallVec<[(Term, Term); 8]> = smallvec![(a.clone(), b.clone())];
        let mut steps = 0u64;
        let ok = loop {
            let Some((x, y)) = stack.pop() else {
                break true;
            };
            steps += 1;
            let x = self.walk(&x).clone();
            let y = self.walk(&y).clone();
            match (&x, &y) {
                (Term::Var(u), Term::Var(w)) => {
                    if u != w {
                        // Older variables stay representative.
                        let (young, old) = if u > w { (*u, y) } else { (*w, x) };
                        self.bind(young, old);
                    }
                }
                (Term::Var(u), other) | (other, Term::Var(u)) => {
                    if !other.is_ground() && self.occurs(*u, other) {
                        break false;
                    }
                    self.bind(*u, other.clone());
                }
                (Term::Int(p), Term::Int(q)) => {
                    if p != q {
                        break false;
                    }
                }
                (Term::Atom(p), Term::Atom(q)) => {
                    if p != q {
                        break false;
                    }
                }
                (Term::Compound(p), Term::Compound(q)) => {
                    if std::sync::Arc::ptr_eq(p, q) {
                        continue;
                    }
                    if p.is_ground() && q.is_ground() {
                        steps += 1;
                        if x != y {
                            break false;
                        }
                        continue;
                    }
                    if p.functor() != q.functor() || p.arity() != q.arity() {
                        break false;
                    }
                    stack.extend(p.args().iter().cloned().zip(q.args().iter().cloned()).rev());
                }
                _ => break false,
            }
        };
        self.work += steps;
        ok
    }

    /// Replaces every bound variable in `t` by its value, recursively.
    pub fn resolve(&self, t: &Term) -> Term {
        if t.is_ground() {
            return t.clone();
        }
        rebuild(t, &|t| self.walk(t), &mut Term::Var)
    }

    /// Drops every binding that cannot be reached from `roots`. Must only be
    /// called with an empty trail.
    pub fn retain_reachable<'a>(&mut self, roots: impl IntoIterator<Item = &'a Term>) {
        debug_assert!(self.trail.is_empty(), "collection with pending marks");
        let mut live: FxHashSet<VarId> = FxHashSet::default();
        let mut stack: Vec<&Term> = roots.into_iter().collect();
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(v) => {
                    if let Some(next) = self.bindings.get(v) {
                        if live.insert(*v) {
                            stack.push(next);
                        }
                    }
                }
                Term::Compound(c) if !c.is_ground() => stack.extend(c.args()),
                _ => {}
            }
        }
        self.bindings.retain(|v, _| live.contains(v));
    }
}
