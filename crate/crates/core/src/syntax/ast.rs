use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::perm::{perm_of_word, PermWord, Permutation};

/// Prefix reserved for generated symbols (`@dom`, `@L_R`, `@F1`, ...).
pub const RESERVED_PREFIX: char = '@';

/// Names of the built-in unary relations in relation-algebra terms.
pub const TOP_NAME: &str = "top";
pub const BOT_NAME: &str = "bot";

/// The counting bound `k` of a number restriction. Arbitrary precision, so
/// binary-encoded bounds of any magnitude parse faithfully.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grade(BigUint);

impl Grade {
    pub fn new(k: u64) -> Self {
        Grade(BigUint::from(k))
    }

    pub fn from_biguint(k: BigUint) -> Self {
        Grade(k)
    }

    pub fn one() -> Self {
        Grade(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn succ(&self) -> Grade {
        Grade(&self.0 + 1u32)
    }

    /// `k - 1`, saturating at zero.
    pub fn pred(&self) -> Grade {
        if self.0.is_zero() {
            self.clone()
        } else {
            Grade(&self.0 - 1u32)
        }
    }

    /// Whether a count reaches this bound.
    pub fn reached_by(&self, count: usize) -> bool {
        BigUint::from(count) >= self.0
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }
}

impl From<u64> for Grade {
    fn from(k: u64) -> Self {
        Grade::new(k)
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Arity map for concept names (arity 1) and role/relation names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    concepts: BTreeSet<String>,
    roles: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_concept(mut self, name: impl Into<String>) -> Self {
        self.add_concept(name);
        self
    }

    pub fn with_role(mut self, name: impl Into<String>, arity: usize) -> Self {
        self.add_role(name, arity);
        self
    }

    pub fn add_concept(&mut self, name: impl Into<String>) {
        self.concepts.insert(name.into());
    }

    pub fn add_role(&mut self, name: impl Into<String>, arity: usize) {
        self.roles.insert(name.into(), arity);
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> {
        self.concepts.iter().map(String::as_str)
    }

    pub fn roles(&self) -> impl Iterator<Item = (&str, usize)> {
        self.roles.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn has_concept(&self, name: &str) -> bool {
        self.concepts.contains(name)
    }

    pub fn role_arity(&self, name: &str) -> Option<usize> {
        self.roles.get(name).copied()
    }

    /// Arity of a relation symbol as an algebra atom: roles by declaration,
    /// concepts and the built-ins `top`/`bot` are unary.
    pub fn atom_arity(&self, name: &str) -> Option<usize> {
        if let Some(a) = self.roles.get(name) {
            Some(*a)
        } else if self.concepts.contains(name) || name == TOP_NAME || name == BOT_NAME {
            Some(1)
        } else {
            None
        }
    }

    pub fn merge(&mut self, other: &Signature) {
        self.concepts.extend(other.concepts.iter().cloned());
        for (n, a) in &other.roles {
            self.roles.insert(n.clone(), *a);
        }
    }

    pub fn max_role_arity(&self) -> usize {
        self.roles.values().copied().max().unwrap_or(0)
    }
}

/// A role of ALCQP(p,s): an atomic role followed by a permutation word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleExpr {
    pub name: String,
    pub arity: usize,
    pub word: PermWord,
}

impl RoleExpr {
    pub fn new(name: impl Into<String>, arity: usize, word: PermWord) -> Self {
        RoleExpr {
            name: name.into(),
            arity,
            word,
        }
    }

    pub fn atomic(name: impl Into<String>, arity: usize) -> Self {
        Self::new(name, arity, PermWord::empty())
    }

    pub fn permutation(&self) -> Permutation {
        perm_of_word(&self.word, self.arity)
    }
}

/// Concepts of ALCQP(p,s) in core form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bot,
    Atomic(String),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    /// `>=k R.(C2, ..., Cn)`; `args.len() + 1 == role.arity`.
    AtLeast {
        k: Grade,
        role: RoleExpr,
        args: Vec<Concept>,
    },
}

impl Concept {
    pub fn atomic(name: impl Into<String>) -> Self {
        Concept::Atomic(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn and(a: Concept, b: Concept) -> Self {
        Concept::And(Box::new(a), Box::new(b))
    }

    pub fn at_least(k: impl Into<Grade>, role: RoleExpr, args: Vec<Concept>) -> Self {
        Concept::AtLeast {
            k: k.into(),
            role,
            args,
        }
    }

    /// Left-associated conjunction; `top` for an empty iterator.
    pub fn and_all(items: impl IntoIterator<Item = Concept>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Concept::Top,
            Some(first) => it.fold(first, Concept::and),
        }
    }

    /// Number of AST nodes; roles and their words count as one node each.
    pub fn size(&self) -> usize {
        match self {
            Concept::Top | Concept::Bot | Concept::Atomic(_) => 1,
            Concept::Not(c) => 1 + c.size(),
            Concept::And(a, b) => 1 + a.size() + b.size(),
            Concept::AtLeast { args, .. } => 2 + args.iter().map(Concept::size).sum::<usize>(),
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Concept::Top | Concept::Bot | Concept::Atomic(_) => 0,
            Concept::Not(c) => c.modal_depth(),
            Concept::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Concept::AtLeast { args, .. } => 1 + args.iter().map(Concept::modal_depth).max().unwrap_or(0),
        }
    }

    pub fn concept_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| {
            if let Concept::Atomic(n) = c {
                out.insert(n.clone());
            }
        });
        out
    }

    /// Role names with their arities.
    pub fn role_names(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.visit(&mut |c| {
            if let Concept::AtLeast { role, .. } = c {
                out.insert(role.name.clone(), role.arity);
            }
        });
        out
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for c in self.concept_names() {
            sig.add_concept(c);
        }
        for (r, a) in self.role_names() {
            sig.add_role(r, a);
        }
        sig
    }

    pub fn max_arity(&self) -> usize {
        self.role_names().values().copied().max().unwrap_or(0)
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Concept)) {
        f(self);
        match self {
            Concept::Top | Concept::Bot | Concept::Atomic(_) => {}
            Concept::Not(c) => c.visit(f),
            Concept::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Concept::AtLeast { args, .. } => args.iter().for_each(|a| a.visit(f)),
        }
    }
}

/// A binary role of ALCQI, possibly inverted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinRole {
    pub name: String,
    pub inverse: bool,
}

impl BinRole {
    pub fn forward(name: impl Into<String>) -> Self {
        BinRole {
            name: name.into(),
            inverse: false,
        }
    }

    pub fn inverse(name: impl Into<String>) -> Self {
        BinRole {
            name: name.into(),
            inverse: true,
        }
    }

    pub fn inverted(&self) -> Self {
        BinRole {
            name: self.name.clone(),
            inverse: !self.inverse,
        }
    }
}

/// Concepts of ALCQI in core form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlcqiConcept {
    Top,
    Bot,
    Atomic(String),
    Not(Box<AlcqiConcept>),
    And(Box<AlcqiConcept>, Box<AlcqiConcept>),
    AtLeast {
        k: Grade,
        role: BinRole,
        filler: Box<AlcqiConcept>,
    },
}

impl AlcqiConcept {
    pub fn atomic(name: impl Into<String>) -> Self {
        AlcqiConcept::Atomic(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: AlcqiConcept) -> Self {
        AlcqiConcept::Not(Box::new(c))
    }

    pub fn and(a: AlcqiConcept, b: AlcqiConcept) -> Self {
        AlcqiConcept::And(Box::new(a), Box::new(b))
    }

    pub fn at_least(k: impl Into<Grade>, role: BinRole, filler: AlcqiConcept) -> Self {
        AlcqiConcept::AtLeast {
            k: k.into(),
            role,
            filler: Box::new(filler),
        }
    }

    /// `exists role.filler`, i.e. `>=1 role.filler`.
    pub fn some(role: BinRole, filler: AlcqiConcept) -> Self {
        Self::at_least(1, role, filler)
    }

    /// `forall role.filler`, i.e. `not >=1 role.(not filler)`.
    pub fn all(role: BinRole, filler: AlcqiConcept) -> Self {
        Self::not(Self::some(role, Self::not(filler)))
    }

    /// `=k role.filler`, i.e. `>=k role.filler and not >=(k+1) role.filler`.
    pub fn exactly(k: impl Into<Grade>, role: BinRole, filler: AlcqiConcept) -> Self {
        let k = k.into();
        let upper = k.succ();
        Self::and(
            Self::at_least(k, role.clone(), filler.clone()),
            Self::not(Self::at_least(upper, role, filler)),
        )
    }

    pub fn and_all(items: impl IntoIterator<Item = AlcqiConcept>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => AlcqiConcept::Top,
            Some(first) => it.fold(first, AlcqiConcept::and),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            AlcqiConcept::Top | AlcqiConcept::Bot | AlcqiConcept::Atomic(_) => 1,
            AlcqiConcept::Not(c) => 1 + c.size(),
            AlcqiConcept::And(a, b) => 1 + a.size() + b.size(),
            AlcqiConcept::AtLeast { filler, .. } => 2 + filler.size(),
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            AlcqiConcept::Top | AlcqiConcept::Bot | AlcqiConcept::Atomic(_) => 0,
            AlcqiConcept::Not(c) => c.modal_depth(),
            AlcqiConcept::And(a, b) => a.modal_depth().max(b.modal_depth()),
            AlcqiConcept::AtLeast { filler, .. } => 1 + filler.modal_depth(),
        }
    }

    pub fn visit(&self, f: &mut impl FnMut(&AlcqiConcept)) {
        f(self);
        match self {
            AlcqiConcept::Top | AlcqiConcept::Bot | AlcqiConcept::Atomic(_) => {}
            AlcqiConcept::Not(c) => c.visit(f),
            AlcqiConcept::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            AlcqiConcept::AtLeast { filler, .. } => filler.visit(f),
        }
    }

    pub fn concept_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| {
            if let AlcqiConcept::Atomic(n) = c {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn role_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| {
            if let AlcqiConcept::AtLeast { role, .. } = c {
                out.insert(role.name.clone());
            }
        });
        out
    }

    pub fn max_grade(&self) -> Option<Grade> {
        let mut best: Option<Grade> = None;
        self.visit(&mut |c| {
            if let AlcqiConcept::AtLeast { k, .. } = c {
                if best.as_ref().is_none_or(|b| k > b) {
                    best = Some(k.clone());
                }
            }
        });
        best
    }
}

/// Terms of the general relation algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraTerm {
    Atom(String),
    /// The equality relation `e`.
    Eq,
    P(Box<GraTerm>),
    S(Box<GraTerm>),
    I(Box<GraTerm>),
    Neg(Box<GraTerm>),
    Join(Box<GraTerm>, Box<GraTerm>),
    Ex(Box<GraTerm>),
    DotCap(Box<GraTerm>, Box<GraTerm>),
    Ex1(Box<GraTerm>),
    Cap1(Box<GraTerm>, Box<GraTerm>),
    Neg1(Box<GraTerm>),
}

impl GraTerm {
    pub fn atom(name: impl Into<String>) -> Self {
        GraTerm::Atom(name.into())
    }

    pub fn p(t: GraTerm) -> Self {
        GraTerm::P(Box::new(t))
    }

    pub fn s(t: GraTerm) -> Self {
        GraTerm::S(Box::new(t))
    }

    pub fn i(t: GraTerm) -> Self {
        GraTerm::I(Box::new(t))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(t: GraTerm) -> Self {
        GraTerm::Neg(Box::new(t))
    }

    pub fn join(a: GraTerm, b: GraTerm) -> Self {
        GraTerm::Join(Box::new(a), Box::new(b))
    }

    pub fn ex(t: GraTerm) -> Self {
        GraTerm::Ex(Box::new(t))
    }

    pub fn dotcap(a: GraTerm, b: GraTerm) -> Self {
        GraTerm::DotCap(Box::new(a), Box::new(b))
    }

    pub fn ex1(t: GraTerm) -> Self {
        GraTerm::Ex1(Box::new(t))
    }

    pub fn cap1(a: GraTerm, b: GraTerm) -> Self {
        GraTerm::Cap1(Box::new(a), Box::new(b))
    }

    pub fn neg1(t: GraTerm) -> Self {
        GraTerm::Neg1(Box::new(t))
    }

    pub fn size(&self) -> usize {
        match self {
            GraTerm::Atom(_) | GraTerm::Eq => 1,
            GraTerm::P(t)
            | GraTerm::S(t)
            | GraTerm::I(t)
            | GraTerm::Neg(t)
            | GraTerm::Ex(t)
            | GraTerm::Ex1(t)
            | GraTerm::Neg1(t) => 1 + t.size(),
            GraTerm::Join(a, b) | GraTerm::DotCap(a, b) | GraTerm::Cap1(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            GraTerm::Atom(n) => {
                out.insert(n.clone());
            }
            GraTerm::Eq => {}
            GraTerm::P(t)
            | GraTerm::S(t)
            | GraTerm::I(t)
            | GraTerm::Neg(t)
            | GraTerm::Ex(t)
            | GraTerm::Ex1(t)
            | GraTerm::Neg1(t) => t.collect_atoms(out),
            GraTerm::Join(a, b) | GraTerm::DotCap(a, b) | GraTerm::Cap1(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }
}
