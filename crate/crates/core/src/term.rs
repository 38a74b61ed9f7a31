//! Logic terms.
//!
//! Terms are immutable and cheaply clonable: compound nodes and integers
//! live behind [`Arc`]. Every compound records whether it is syntactically
//! ground (contains no variables at all), which lets renaming, resolution and
//! the occurs check skip ground subterms in constant time.
//!
//! Lists are compounds with functor `'.'/2` terminated by the atom `[]`. Long
//! lists nest deeply along their last argument, so every traversal in this
//! crate loops along the last argument instead of recursing into it.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

/// Identifier of a logic variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u64);

/// An interned name for atoms and functors.
///
/// Names are interned for the life of the process, so a symbol is a single
/// pointer and equality is pointer equality.
#[derive(Clone, Copy)]
pub struct Symbol(&'static &'static str);

static CONS_NAME: &str = ".";
static NIL_NAME: &str = "[]";
static TRUE_NAME: &str = "true";

const CONS: Symbol = Symbol(&CONS_NAME);
const NIL: Symbol = Symbol(&NIL_NAME);
const TRUE: Symbol = Symbol(&TRUE_NAME);

static INTERNED: LazyLock<Mutex<FxHashMap<&'static str, Symbol>>> =
    LazyLock::new(|| Mutex::new([CONS, NIL, TRUE].into_iter().map(|s| (*s.0, s)).collect()));

impl Symbol {
    pub fn new(name: &str) -> Self {
        let mut table = INTERNED.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(&s) = table.get(name) {
            return s;
        }
        let name: &'static str = Box::leak(name.into());
        let sym = Symbol(Box::leak(Box::new(name)));
        table.insert(name, sym);
        sym
    }

    pub fn cons() -> Self {
        CONS
    }

    pub fn nil() -> Self {
        NIL
    }

    pub fn as_str(&self) -> &'static str {
        self.0
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.as_str().hash(state)
    }
}

impl PartialEq<str> for Symbol {
    fn eq(&self, other: &str) -> bool {
        self.as_str() == other
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type Args = SmallVec<[Term; 2]>;

/// A compound term `functor(args...)` with at least one argument.
pub struct Compound {
    functor: Symbol,
    args: Args,
    ground: bool,
}

impl Compound {
    pub fn functor(&self) -> &Symbol {
        &self.functor
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// True when no variable occurs anywhere below this node.
    pub fn is_ground(&self) -> bool {
        self.ground
    }
}

impl Drop for Compound {
    fn drop(&mut self) {
        // Unlink children we own exclusively so that dropping a long list
        // does not recurse once per cell.
        let owned = |t: &Term| matches!(t, Term::Compound(c) if Arc::strong_count(c) == 1);
        if !self.args.iter().any(owned) {
            return;
        }
        let mut pending: Vec<Arc<Compound>> = Vec::new();
        let take = |args: &mut Args, pending: &mut Vec<Arc<Compound>>| {
            for arg in std::mem::take(args) {
                if let Term::Compound(c) = arg {
                    pending.push(c);
                }
            }
        };
        take(&mut self.args, &mut pending);
        while let Some(node) = pending.pop() {
            if let Ok(mut node) = Arc::try_unwrap(node) {
                if node.args.iter().any(owned) {
                    take(&mut node.args, &mut pending);
                }
            }
        }
    }
}

/// A logic term.
#[derive(Clone)]
pub enum Term {
    Var(VarId),
    Int(Arc<BigInt>),
    Atom(Symbol),
    Compound(Arc<Compound>),
}

impl Term {
    pub fn var(id: VarId) -> Self {
        Term::Var(id)
    }

    pub fn int(value: impl Into<BigInt>) -> Self {
        Term::Int(Arc::new(value.into()))
    }

    pub fn atom(name: &str) -> Self {
        Term::Atom(Symbol::new(name))
    }

    pub fn nil() -> Self {
        Term::Atom(Symbol::nil())
    }

    /// Builds `functor(args...)`; an empty argument list yields the atom.
    pub fn compound(functor: Symbol, args: impl IntoIterator<Item = Term>) -> Self {
        let args: Args = args.into_iter().collect();
        if args.is_empty() {
            return Term::Atom(functor);
        }
        let ground = args.iter().all(Term::is_ground);
        Term::Compound(Arc::new(Compound {
            functor,
            args,
            ground,
        }))
    }

    /// Convenience for building terms from string functors.
    pub fn app(functor: &str, args: impl IntoIterator<Item = Term>) -> Self {
        Term::compound(Symbol::new(functor), args)
    }

    pub fn cons(head: Term, tail: Term) -> Self {
        let ground = head.is_ground() && tail.is_ground();
        let mut args = Args::new();
        args.push(head);
        args.push(tail);
        Term::Compound(Arc::new(Compound {
            functor: Symbol::cons(),
            args,
            ground,
        }))
    }

    /// A proper list of the given items.
    pub fn list(items: impl IntoIterator<Item = Term>) -> Self {
        Term::list_with_tail(items, Term::nil())
    }

    /// A list of the given items ending in `tail` (an open list when `tail`
    /// is a variable).
    pub fn list_with_tail(items: impl IntoIterator<Item = Term>, tail: Term) -> Self {
        let items: Vec<Term> = items.into_iter().collect();
        Term::list_rev(items.into_iter().rev(), tail)
    }

    /// Conses the items onto `tail`, last item first.
    pub fn list_rev(items: impl IntoIterator<Item = Term>, tail: Term) -> Self {
        items
            .into_iter()
            .fold(tail, |acc, item| Term::cons(item, acc))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<VarId> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Term::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_compound(&self) -> Option<&Compound> {
        match self {
            Term::Compound(c) => Some(c),
            _ => None,
        }
    }

    /// Syntactic groundness: no variables at all, bound or not.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) | Term::Atom(_) => true,
            Term::Compound(c) => c.ground,
        }
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Atom(s) if *s == NIL)
    }

    pub fn is_atom(&self, name: &str) -> bool {
        matches!(self, Term::Atom(s) if s == name)
    }

    /// Functor name and arity; atoms have arity zero.
    pub fn functor(&self) -> Option<(&Symbol, usize)> {
        match self {
            Term::Atom(s) => Some((s, 0)),
            Term::Compound(c) => Some((&c.functor, c.args.len())),
            _ => None,
        }
    }

    /// Arguments of a compound, empty for everything else.
    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(c) => &c.args,
            _ => &[],
        }
    }

    /// `Some((head, tail))` if this is a list cell.
    pub fn as_cons(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::Compound(c) if c.args.len() == 2 && c.functor == CONS => {
                Some((&c.args[0], &c.args[1]))
            }
            _ => None,
        }
    }

    /// Splits a (possibly open) list syntactically into its elements and the
    /// final tail. No dereferencing happens here.
    pub fn list_parts(&self) -> (Vec<&Term>, &Term) {
        let mut items = Vec::new();
        let mut cur = self;
        while let Some((h, t)) = cur.as_cons() {
            items.push(h);
            cur = t;
        }
        (items, cur)
    }

    /// Elements of a proper list, or `None` if the list is open or improper.
    pub fn proper_list(&self) -> Option<Vec<&Term>> {
        let (items, tail) = self.list_parts();
        tail.is_nil().then_some(items)
    }

    /// Distinct variables in left-to-right order of first occurrence.
    pub fn vars(&self) -> Vec<VarId> {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut out = Vec::new();
        self.visit_vars(&mut |v| {
            if seen.insert(v) {
                out.push(v);
            }
        });
        out
    }

    /// Calls `f` on every variable occurrence, left to right.
    pub fn visit_vars(&self, f: &mut impl FnMut(VarId)) {
        let mut stack: Vec<&Term> = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(v) => f(*v),
                Term::Compound(c) if !c.ground => stack.extend(c.args.iter().rev()),
                _ => {}
            }
        }
    }

    /// Rebuilds the term with every variable replaced by `leaf(var)`.
    /// Ground subterms are shared, not copied.
    pub fn map_vars(&self, leaf: &mut impl FnMut(VarId) -> Term) -> Term {
        rebuild(self, &|t| t, &mut |v| leaf(v))
    }

    /// Structural equality up to a consistent bijective renaming of variables.
    pub fn is_variant(&self, other: &Term) -> bool {
        let mut fwd = FxHashMap::default();
        let mut bwd = FxHashMap::default();
        variant_with(self, other, &mut fwd, &mut bwd)
    }
}

/// Shared variant check; the maps persist so callers can check several term
/// pairs under one renaming.
pub(crate) fn variant_with(
    a: &Term,
    b: &Term,
    fwd: &mut FxHashMap<VarId, VarId>,
    bwd: &mut FxHashMap<VarId, VarId>,
) -> bool {
    let mut stack: Vec<(&Term, &Term)> = vec![(a, b)];
    while let Some((x, y)) = stack.pop() {
        match (x, y) {
            (Term::Var(u), Term::Var(w)) => {
                let f = *fwd.entry(*u).or_insert(*w);
                let g = *bwd.entry(*w).or_insert(*u);
                if f != *w || g != *u {
                    return false;
                }
            }
            (Term::Int(p), Term::Int(q)) => {
                if p != q {
                    return false;
                }
            }
            (Term::Atom(p), Term::Atom(q)) => {
                if p != q {
                    return false;
                }
            }
            (Term::Compound(p), Term::Compound(q)) => {
                if p.functor != q.functor || p.args.len() != q.args.len() {
                    return false;
                }
                stack.extend(p.args.iter().zip(q.args.iter()).rev());
            }
            _ => return false,
        }
    }
    true
}

/// Generic bottom-up rebuild. `walk` dereferences a term before it is
/// inspected; `leaf` maps variables that remain after dereferencing.
///
/// Recursion happens only into non-final arguments, the final argument is
/// followed in a loop, so list length never grows the host stack.
pub(crate) fn rebuild<'a>(
    term: &'a Term,
    walk: &dyn Fn(&'a Term) -> &'a Term,
    leaf: &mut dyn FnMut(VarId) -> Term,
) -> Term {
    let mut spine: SmallVec<[(Symbol, Args); 4]> = SmallVec::new();
    let mut cur = walk(term);
    let last = loop {
        match cur {
            Term::Var(v) => break leaf(*v),
            Term::Compound(c) if !c.ground => {
                let n = c.args.len();
                let mut done = Args::with_capacity(n);
                for arg in &c.args[..n - 1] {
                    done.push(rebuild(arg, walk, leaf));
                }
                spine.push((c.functor, done));
                cur = walk(&c.args[n - 1]);
            }
            other => break other.clone(),
        }
    };
    spine
        .into_iter()
        .rev()
        .fold(last, |acc, (functor, mut args)| {
            args.push(acc);
            let ground = args.iter().all(Term::is_ground);
            Term::Compound(Arc::new(Compound {
                functor,
                args,
                ground,
            }))
        })
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        let mut stack: Vec<(&Term, &Term)> = vec![(self, other)];
        while let Some((x, y)) = stack.pop() {
            match (x, y) {
                (Term::Var(a), Term::Var(b)) if a == b => {}
                (Term::Int(a), Term::Int(b)) if a == b => {}
                (Term::Atom(a), Term::Atom(b)) if a == b => {}
                (Term::Compound(a), Term::Compound(b)) => {
                    if Arc::ptr_eq(a, b) {
                        continue;
                    }
                    if a.functor != b.functor || a.args.len() != b.args.len() {
                        return false;
                    }
                    stack.extend(a.args.iter().zip(b.args.iter()));
                }
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Term {}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Term {
    fn from(v: i64) -> Self {
        Term::int(v)
    }
}

impl From<BigInt> for Term {
    fn from(v: BigInt) -> Self {
        Term::Int(Arc::new(v))
    }
}

/// Issues fresh variable identifiers. Never reissues an id.
#[derive(Debug, Clone, Default)]
pub struct VarGen {
    next: u64,
}

impl VarGen {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> VarId {
        let id = VarId(self.next);
        self.next += 1;
        id
    }

    pub fn fresh_term(&mut self) -> Term {
        Term::Var(self.fresh())
    }

    /// Number of ids issued so far.
    pub fn issued(&self) -> u64 {
        self.next
    }
}

/// Copies `term` with every distinct variable consistently replaced by a
/// fresh one. Bindings are not consulted; resolve first if needed.
pub fn rename_apart(term: &Term, gen: &mut VarGen) -> Term {
    let mut map: FxHashMap<VarId, VarId> = FxHashMap::default();
    term.map_vars(&mut |v| Term::Var(*map.entry(v).or_insert_with(|| gen.fresh())))
}

/// Work units for a term: one per node, with integers counting one per
/// 64-bit word of magnitude (at least one).
pub fn term_size(term: &Term) -> usize {
    let mut total = 0usize;
    let mut stack: Vec<&Term> = vec![term];
    while let Some(t) = stack.pop() {
        match t {
            Term::Var(_) | Term::Atom(_) => total += 1,
            Term::Int(i) => total += int_words(i),
            Term::Compound(c) => {
                total += 1;
                stack.extend(c.args.iter());
            }
        }
    }
    total
}

pub(crate) fn int_words(i: &BigInt) -> usize {
    (i.bits() as usize).div_ceil(64).max(1)
}
