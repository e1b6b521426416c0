//! Finite interpretations over arity-definite relations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Signature, BOT_NAME, TOP_NAME};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("empty domain")]
    EmptyDomain,
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{elem}` in {context}")]
    UnknownElement { elem: String, context: String },
    #[error("role `{role}` declared with arity {expected} but has a tuple of length {found}")]
    ArityMismatch {
        role: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate {what} in `{name}`")]
    Duplicate { what: &'static str, name: String },
    #[error("`{0}` is built in and cannot be interpreted")]
    BuiltIn(String),
    #[error("`{0}` is used both as a concept and as a role")]
    NameClash(String),
    #[error("role `{role}` has arity {found}, signature says {expected}")]
    SignatureArity {
        role: String,
        expected: usize,
        found: usize,
    },
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Index of an element in its interpretation's domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Elem {
    fn from(i: usize) -> Self {
        Elem(i as u32)
    }
}

/// A subset of a domain `{0, ..., len-1}`, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElemSet {
    len: usize,
    words: Vec<u64>,
}

impl ElemSet {
    pub fn empty(len: usize) -> Self {
        ElemSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for i in 0..len {
            s.insert(Elem::from(i));
        }
        s
    }

    pub fn from_elems(len: usize, elems: impl IntoIterator<Item = Elem>) -> Self {
        let mut s = Self::empty(len);
        for e in elems {
            s.insert(e);
        }
        s
    }

    /// Size of the underlying domain.
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, e: Elem) {
        let i = e.index();
        assert!(i < self.len, "element {i} outside domain of size {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, e: Elem) {
        let i = e.index();
        if i < self.len {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn contains(&self, e: Elem) -> bool {
        let i = e.index();
        i < self.len && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.len).map(Elem::from).filter(|e| self.contains(*e))
    }

    pub fn union(&self, other: &ElemSet) -> ElemSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersect(&self, other: &ElemSet) -> ElemSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn complement(&self) -> ElemSet {
        let mut out = self.zip(self, |a, _| !a);
        if !self.len.is_multiple_of(64) {
            if let Some(last) = out.words.last_mut() {
                *last &= (1u64 << (self.len % 64)) - 1;
            }
        }
        out
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn zip(&self, other: &ElemSet, f: impl Fn(u64, u64) -> u64) -> ElemSet {
        assert_eq!(self.len, other.len, "element sets over different domains");
        ElemSet {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|e| e.0)).finish()
    }
}

/// A relation carrying its arity, so that empty relations of different
/// arities stay distinct. The nullary relation is either empty or `{()}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArityRel {
    arity: usize,
    tuples: BTreeSet<Vec<Elem>>,
}

impl ArityRel {
    pub fn empty(arity: usize) -> Self {
        ArityRel {
            arity,
            tuples: BTreeSet::new(),
        }
    }

    /// The nullary relation `{()}`.
    pub fn unit() -> Self {
        let mut r = Self::empty(0);
        r.tuples.insert(Vec::new());
        r
    }

    /// Builds a relation, panicking on tuples of the wrong length.
    pub fn from_tuples(arity: usize, tuples: impl IntoIterator<Item = Vec<Elem>>) -> Self {
        let mut r = Self::empty(arity);
        for t in tuples {
            r.insert(t);
        }
        r
    }

    pub fn unary(set: &ElemSet) -> Self {
        Self::from_tuples(1, set.iter().map(|e| vec![e]))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn insert(&mut self, tuple: Vec<Elem>) -> bool {
        assert_eq!(tuple.len(), self.arity, "tuple length differs from arity");
        self.tuples.insert(tuple)
    }

    pub fn contains(&self, tuple: &[Elem]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn tuples(&self) -> impl Iterator<Item = &[Elem]> + '_ {
        self.tuples.iter().map(Vec::as_slice)
    }

    /// First coordinates of a relation of arity at least one.
    pub fn firsts(&self, domain: usize) -> ElemSet {
        ElemSet::from_elems(domain, self.tuples().filter_map(|t| t.first().copied()))
    }

    /// Image under an element renaming.
    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> ArityRel {
        Self::from_tuples(self.arity, self.tuples().map(|t| t.iter().map(|e| f(*e)).collect()))
    }
}

/// A finite interpretation. Elements are opaque names; internally they are
/// indices into the domain list.
#[derive(Clone, Debug)]
pub struct Interp {
    names: Vec<String>,
    index: HashMap<String, Elem>,
    concepts: BTreeMap<String, ElemSet>,
    roles: BTreeMap<String, ArityRel>,
}

impl PartialEq for Interp {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.concepts == other.concepts && self.roles == other.roles
    }
}

impl Eq for Interp {}

impl Interp {
    pub fn new(names: impl IntoIterator<Item = impl Into<String>>) -> Result<Self, ModelError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), Elem::from(i)).is_some() {
                return Err(ModelError::DuplicateElement(n.clone()));
            }
        }
        Ok(Interp {
            names,
            index,
            concepts: BTreeMap::new(),
            roles: BTreeMap::new(),
        })
    }

    /// Domain `{e0, ..., e(n-1)}`.
    pub fn numbered(n: usize) -> Result<Self, ModelError> {
        Self::new((0..n).map(|i| format!("e{i}")))
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn elems(&self) -> impl Iterator<Item = Elem> {
        (0..self.names.len()).map(Elem::from)
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn elem(&self, name: &str) -> Option<Elem> {
        self.index.get(name).copied()
    }

    pub fn full(&self) -> ElemSet {
        ElemSet::full(self.size())
    }

    pub fn empty_set(&self) -> ElemSet {
        ElemSet::empty(self.size())
    }

    pub fn concept(&self, name: &str) -> Option<&ElemSet> {
        self.concepts.get(name)
    }

    pub fn role(&self, name: &str) -> Option<&ArityRel> {
        self.roles.get(name)
    }

    pub fn concepts(&self) -> impl Iterator<Item = (&str, &ElemSet)> {
        self.concepts.iter().map(|(n, s)| (n.as_str(), s))
    }

    pub fn roles(&self) -> impl Iterator<Item = (&str, &ArityRel)> {
        self.roles.iter().map(|(n, r)| (n.as_str(), r))
    }

    /// Concept and role names with arities.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for c in self.concepts.keys() {
            sig.add_concept(c.clone());
        }
        for (r, rel) in &self.roles {
            sig.add_role(r.clone(), rel.arity());
        }
        sig
    }

    fn check_name(&self, name: &str, as_role: bool) -> Result<(), ModelError> {
        if name == TOP_NAME || name == BOT_NAME {
            return Err(ModelError::BuiltIn(name.to_string()));
        }
        let clash = if as_role {
            self.concepts.contains_key(name)
        } else {
            self.roles.contains_key(name)
        };
        if clash {
            return Err(ModelError::NameClash(name.to_string()));
        }
        Ok(())
    }

    /// Sets the extension of a concept name, replacing any previous one.
    pub fn set_concept(&mut self, name: impl Into<String>, set: ElemSet) -> Result<(), ModelError> {
        let name = name.into();
        self.check_name(&name, false)?;
        assert_eq!(set.universe(), self.size(), "concept over a different domain");
        self.concepts.insert(name, set);
        Ok(())
    }

    /// Sets the relation of a role name, replacing any previous one.
    pub fn set_role(&mut self, name: impl Into<String>, rel: ArityRel) -> Result<(), ModelError> {
        let name = name.into();
        self.check_name(&name, true)?;
        if let Some(bad) = rel.tuples().flatten().find(|e| e.index() >= self.size()) {
            return Err(ModelError::UnknownElement {
                elem: format!("#{}", bad.0),
                context: format!("role `{name}`"),
            });
        }
        self.roles.insert(name, rel);
        Ok(())
    }

    /// Adds one element to a concept, declaring the concept if needed.
    pub fn add_member(&mut self, concept: &str, e: Elem) -> Result<(), ModelError> {
        if !self.concepts.contains_key(concept) {
            self.set_concept(concept, self.empty_set())?;
        }
        self.concepts.get_mut(concept).expect("just declared").insert(e);
        Ok(())
    }

    /// Adds one tuple to a role, declaring the role with the tuple's length
    /// if needed.
    pub fn add_tuple(&mut self, role: &str, tuple: Vec<Elem>) -> Result<(), ModelError> {
        if !self.roles.contains_key(role) {
            self.set_role(role, ArityRel::empty(tuple.len()))?;
        }
        let rel = self.roles.get_mut(role).expect("just declared");
        if rel.arity() != tuple.len() {
            return Err(ModelError::ArityMismatch {
                role: role.to_string(),
                expected: rel.arity(),
                found: tuple.len(),
            });
        }
        if let Some(bad) = tuple.iter().find(|e| e.index() >= self.names.len()) {
            return Err(ModelError::UnknownElement {
                elem: format!("#{}", bad.0),
                context: format!("role `{role}`"),
            });
        }
        rel.insert(tuple);
        Ok(())
    }

    /// Declares every symbol of `sig` (empty if absent) and checks arities
    /// of roles already present.
    pub fn declare(&mut self, sig: &Signature) -> Result<(), ModelError> {
        for c in sig.concepts() {
            if !self.concepts.contains_key(c) {
                self.set_concept(c, self.empty_set())?;
            }
        }
        for (r, n) in sig.roles() {
            match self.roles.get(r) {
                Some(rel) if rel.arity() != n => {
                    return Err(ModelError::SignatureArity {
                        role: r.to_string(),
                        expected: n,
                        found: rel.arity(),
                    })
                }
                Some(_) => {}
                None => self.set_role(r, ArityRel::empty(n))?,
            }
        }
        Ok(())
    }

    /// Keeps only the symbols of `sig`, declaring missing ones as empty.
    pub fn restrict(&self, sig: &Signature) -> Result<Interp, ModelError> {
        let mut out = Interp::new(self.names.clone())?;
        for c in sig.concepts() {
            if let Some(s) = self.concepts.get(c) {
                out.set_concept(c, s.clone())?;
            }
        }
        for (r, _) in sig.roles() {
            if let Some(rel) = self.roles.get(r) {
                out.set_role(r, rel.clone())?;
            }
        }
        out.declare(sig)?;
        Ok(out)
    }

    /// The isomorphic copy in which element `e` becomes `g[e]`, names
    /// included.
    pub fn rename(&self, g: &[Elem]) -> Interp {
        assert_eq!(g.len(), self.size(), "renaming must cover the domain");
        let mut names = vec![String::new(); self.size()];
        for (i, n) in self.names.iter().enumerate() {
            names[g[i].index()] = n.clone();
        }
        let mut out = Interp::new(names).expect("renaming must be a bijection");
        for (c, s) in &self.concepts {
            let image = ElemSet::from_elems(self.size(), s.iter().map(|e| g[e.index()]));
            out.concepts.insert(c.clone(), image);
        }
        for (r, rel) in &self.roles {
            out.roles.insert(r.clone(), rel.map(|e| g[e.index()]));
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Interp, ModelError> {
        let file: InterpFile = serde_json::from_str(text)?;
        file.into_interp()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InterpFile::from_interp(self)).expect("model serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(InterpFile::from_interp(self)).expect("model serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Interp, ModelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InterpFile {
    domain: Vec<String>,
    #[serde(default)]
    concepts: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    roles: BTreeMap<String, RoleFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoleFile {
    arity: usize,
    tuples: Vec<Vec<String>>,
}

impl InterpFile {
    fn from_interp(i: &Interp) -> Self {
        let concepts = i
            .concepts
            .iter()
            .map(|(c, s)| (c.clone(), s.iter().map(|e| i.name(e).to_string()).collect()))
            .collect();
        let roles = i
            .roles
            .iter()
            .map(|(r, rel)| {
                let tuples = rel
                    .tuples()
                    .map(|t| t.iter().map(|e| i.name(*e).to_string()).collect())
                    .collect();
                (
                    r.clone(),
                    RoleFile {
                        arity: rel.arity(),
                        tuples,
                    },
                )
            })
            .collect();
        InterpFile {
            domain: i.names.clone(),
            concepts,
            roles,
        }
    }

    fn into_interp(self) -> Result<Interp, ModelError> {
        let mut interp = Interp::new(self.domain)?;
        let lookup = |interp: &Interp, name: &str, context: &str| {
            interp.elem(name).ok_or_else(|| ModelError::UnknownElement {
                elem: name.to_string(),
                context: context.to_string(),
            })
        };
        for (c, members) in &self.concepts {
            let mut set = interp.empty_set();
            for m in members {
                let e = lookup(&interp, m, &format!("concept `{c}`"))?;
                if set.contains(e) {
                    return Err(ModelError::Duplicate {
                        what: "member",
                        name: c.clone(),
                    });
                }
                set.insert(e);
            }
            interp.set_concept(c.clone(), set)?;
        }
        for (r, file) in &self.roles {
            let mut rel = ArityRel::empty(file.arity);
            for t in &file.tuples {
                if t.len() != file.arity {
                    return Err(ModelError::ArityMismatch {
                        role: r.clone(),
                        expected: file.arity,
                        found: t.len(),
                    });
                }
                let tuple = t
                    .iter()
                    .map(|n| lookup(&interp, n, &format!("role `{r}`")))
                    .collect::<Result<Vec<_>, _>>()?;
                if !rel.insert(tuple) {
                    return Err(ModelError::Duplicate {
                        what: "tuple",
                        name: r.clone(),
                    });
                }
            }
            interp.set_role(r.clone(), rel)?;
        }
        Ok(interp)
    }
}

/// A seeded random interpretation over `{e0, ..., e(size-1)}`. Concept
/// memberships, then role tuples (names in sorted order, tuples in
/// lexicographic order) are each included with probability `density`.
pub fn random_interp(seed: u64, size: usize, sig: &Signature, density: f64) -> Interp {
    assert!(size >= 1, "domain must be nonempty");
    let density = density.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut interp = Interp::numbered(size).expect("nonempty domain");
    for c in sig.concepts() {
        let set = ElemSet::from_elems(size, (0..size).map(Elem::from).filter(|_| rng.gen_bool(density)));
        interp.set_concept(c, set).expect("signature names are valid");
    }
    for (r, n) in sig.roles() {
        let mut rel = ArityRel::empty(n);
        for t in all_tuples(size, n) {
            if rng.gen_bool(density) {
                rel.insert(t);
            }
        }
        interp.set_role(r, rel).expect("signature names are valid");
    }
    interp
}

/// Every interpretation of `sig` over `{e0, ..., e(size-1)}`, in a fixed
/// order. Each concept membership and each possible role tuple is one bit,
/// so this is only usable for tiny domains and signatures.
pub fn all_interps(size: usize, sig: &Signature) -> impl Iterator<Item = Interp> + '_ {
    assert!(size >= 1, "domain must be nonempty");
    let concepts: Vec<&str> = sig.concepts().collect();
    let roles: Vec<(&str, usize)> = sig.roles().collect();
    let bits = concepts.len() * size + roles.iter().map(|(_, n)| size.pow(*n as u32)).sum::<usize>();
    assert!(bits < 32, "too many interpretations to enumerate");
    (0u64..1 << bits).map(move |code| {
        let mut bit = 0;
        let mut next = || {
            let b = code >> bit & 1 == 1;
            bit += 1;
            b
        };
        let mut interp = Interp::numbered(size).expect("nonempty domain");
        for c in &concepts {
            let set = ElemSet::from_elems(size, (0..size).map(Elem::from).filter(|_| next()));
            interp.set_concept(*c, set).expect("signature names are valid");
        }
        for (r, n) in &roles {
            let rel = ArityRel::from_tuples(*n, all_tuples(size, *n).filter(|_| next()));
            interp.set_role(*r, rel).expect("signature names are valid");
        }
        interp
    })
}

/// The disjoint union of `parts`. Element `e` of part `i` is renamed
/// `i:e` and sits at index `offsets[i] + e`.
pub fn disjoint_union(parts: &[Interp]) -> Result<(Interp, Vec<usize>), ModelError> {
    let mut names = Vec::new();
    let mut offsets = Vec::with_capacity(parts.len());
    for (i, part) in parts.iter().enumerate() {
        offsets.push(names.len());
        names.extend(part.names.iter().map(|n| format!("{i}:{n}")));
    }
    let mut out = Interp::new(names)?;
    for (part, &off) in parts.iter().zip(&offsets) {
        let shift = |e: Elem| Elem::from(e.index() + off);
        for (c, set) in &part.concepts {
            if !out.concepts.contains_key(c) {
                out.set_concept(c.clone(), out.empty_set())?;
            }
            let target = out.concepts.get_mut(c).expect("just declared");
            for e in set.iter() {
                target.insert(shift(e));
            }
        }
        for (r, rel) in &part.roles {
            if !out.roles.contains_key(r) {
                out.set_role(r.clone(), ArityRel::empty(rel.arity()))?;
            }
            for t in rel.tuples() {
                out.add_tuple(r, t.iter().map(|&e| shift(e)).collect())?;
            }
        }
    }
    Ok((out, offsets))
}

/// All `n`-tuples over `{0, ..., size-1}` in lexicographic order.
pub fn all_tuples(size: usize, n: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = if size == 0 && n > 0 { 0 } else { size.pow(n as u32) };
    (0..total).map(move |mut code| {
        let mut t = vec![Elem(0); n];
        for slot in t.iter_mut().rev() {
            *slot = Elem::from(code % size);
            code /= size;
        }
        t
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SAMPLE: &str = r#"{"domain":["a"],"concepts":{"A":["a"]},"roles":{"R":{"arity":2,"tuples":[["a","a"]]}}}"#;

    #[test]
    fn sample_loads() {
        let i = Interp::from_json(SAMPLE).unwrap();
        assert_eq!(i.size(), 1);
        assert!(i.concept("A").unwrap().contains(Elem(0)));
        assert!(i.role("R").unwrap().contains(&[Elem(0), Elem(0)]));
    }

    #[test]
    fn empty_domain_rejected() {
        let err = Interp::from_json(r#"{"domain":[],"concepts":{},"roles":{}}"#).unwrap_err();
        assert_eq!(err.to_string(), "empty domain");
    }

    #[test]
    fn short_tuple_rejected() {
        let text = r#"{"domain":["a"],"roles":{"R":{"arity":3,"tuples":[["a","a"]]}}}"#;
        assert!(matches!(
            Interp::from_json(text),
            Err(ModelError::ArityMismatch {
                expected: 3,
                found: 2,
                ..
            })
        ));
    }

    #[test]
    fn bad_files_rejected() {
        let cases = [
            r#"{"domain":["a"],"extra":1}"#,
            r#"{"domain":["a","a"]}"#,
            r#"{"domain":["a"],"concepts":{"A":["b"]}}"#,
            r#"{"domain":["a"],"concepts":{"A":["a","a"]}}"#,
            r#"{"domain":["a"],"concepts":{"top":["a"]}}"#,
            r#"{"domain":["a"],"concepts":{"R":[]},"roles":{"R":{"arity":2,"tuples":[]}}}"#,
            r#"{"domain":["a"],"roles":{"R":{"arity":1,"tuples":[["a"],["a"]]}}}"#,
            r#"{"domain":["a"],"roles":{"R":{"arity":1,"tuples":[["z"]]}}}"#,
            r#"{"domain":["a"],"roles":{"R":{"arity":1}}}"#,
            r#"{"domain":["a"],"roles":{"R":{"arity":1,"tuples":[],"x":0}}}"#,
            r#"{"domain":"a"}"#,
        ];
        for text in cases {
            assert!(Interp::from_json(text).is_err(), "accepted {text}");
        }
    }

    #[test]
    fn empty_relations_keep_their_arity() {
        let mut i = Interp::numbered(2).unwrap();
        i.set_role("R", ArityRel::empty(2)).unwrap();
        i.set_role("S", ArityRel::empty(3)).unwrap();
        let back = Interp::from_json(&i.to_json()).unwrap();
        assert_eq!(back.role("R").unwrap().arity(), 2);
        assert_eq!(back.role("S").unwrap().arity(), 3);
        assert_ne!(back.role("R"), back.role("S"));
        assert_eq!(back, i);
    }

    #[test]
    fn nullary_relations() {
        let mut i = Interp::numbered(1).unwrap();
        i.set_role("T", ArityRel::unit()).unwrap();
        i.set_role("F", ArityRel::empty(0)).unwrap();
        let back = Interp::from_json(&i.to_json()).unwrap();
        assert_eq!(back.role("T").unwrap().len(), 1);
        assert!(back.role("F").unwrap().is_empty());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let sig = Signature::new().with_concept("A").with_role("R", 3);
        let i = random_interp(3, 4, &sig, 0.3);
        i.save(&path).unwrap();
        assert_eq!(Interp::load(&path).unwrap(), i);
    }

    #[test]
    fn single_full_element() {
        let sig = Signature::new().with_concept("A").with_role("R", 2).with_role("S", 3);
        let i = random_interp(0, 1, &sig, 1.0);
        assert_eq!(i.concept("A").unwrap().count(), 1);
        assert_eq!(i.role("R").unwrap().len(), 1);
        assert_eq!(i.role("S").unwrap().len(), 1);
    }

    #[test]
    fn random_is_deterministic() {
        let sig = Signature::new().with_concept("A").with_role("R", 3);
        assert_eq!(random_interp(42, 4, &sig, 0.5), random_interp(42, 4, &sig, 0.5));
    }

    #[test]
    fn ternary_density_mean() {
        // 64 candidate tuples at density 1/4; sd of the mean over 1000
        // seeds is sqrt(64 * 0.25 * 0.75 / 1000) ~ 0.11.
        let sig = Signature::new().with_role("R", 3);
        let total: usize = (0..1000)
            .map(|s| random_interp(7 + s, 4, &sig, 0.25).role("R").unwrap().len())
            .sum();
        let mean = total as f64 / 1000.0;
        assert!((mean - 16.0).abs() <= 0.33, "mean {mean}");
    }

    #[test]
    fn elem_set_ops() {
        let a = ElemSet::from_elems(70, [Elem(1), Elem(65)]);
        let b = ElemSet::from_elems(70, [Elem(65), Elem(3)]);
        assert_eq!(a.intersect(&b).iter().collect::<Vec<_>>(), vec![Elem(65)]);
        assert_eq!(a.union(&b).count(), 3);
        assert_eq!(a.complement().count(), 68);
        assert_eq!(a.complement().complement(), a);
        assert!(!a.complement().contains(Elem(69)) || !a.contains(Elem(69)));
        assert!(a.intersect(&b).is_subset(&a));
    }

    #[test]
    fn tuples_enumerate_lexicographically() {
        let ts: Vec<_> = all_tuples(2, 2).collect();
        assert_eq!(
            ts,
            vec![
                vec![Elem(0), Elem(0)],
                vec![Elem(0), Elem(1)],
                vec![Elem(1), Elem(0)],
                vec![Elem(1), Elem(1)]
            ]
        );
        assert_eq!(all_tuples(3, 0).count(), 1);
    }

    #[test]
    fn small_interps_are_all_distinct() {
        let sig = Signature::new().with_concept("A").with_role("R", 2);
        let all: Vec<Interp> = all_interps(2, &sig).collect();
        assert_eq!(all.len(), 64);
        let distinct: BTreeSet<String> = all.iter().map(Interp::to_json).collect();
        assert_eq!(distinct.len(), 64);
    }

    #[test]
    fn union_keeps_parts_apart() {
        let mut a = Interp::new(["x", "y"]).unwrap();
        a.add_tuple("R", vec![Elem(0), Elem(1)]).unwrap();
        let mut b = Interp::new(["x"]).unwrap();
        b.add_member("A", Elem(0)).unwrap();
        let (u, off) = disjoint_union(&[a, b]).unwrap();
        assert_eq!(off, [0, 2]);
        assert_eq!(u.names(), ["0:x", "0:y", "1:x"]);
        assert!(u.role("R").unwrap().contains(&[Elem(0), Elem(1)]));
        assert_eq!(u.concept("A").unwrap().iter().collect::<Vec<_>>(), [Elem(2)]);
    }

    proptest! {
        #[test]
        fn json_round_trip(seed in any::<u64>(), size in 1usize..5, density in 0.0f64..1.0) {
            let sig = Signature::new()
                .with_concept("A")
                .with_concept("B")
                .with_role("R", 2)
                .with_role("T", 3);
            let i = random_interp(seed, size, &sig, density);
            prop_assert_eq!(Interp::from_json(&i.to_json()).unwrap(), i);
        }

        #[test]
        fn rename_preserves_counts(seed in any::<u64>(), size in 1usize..5) {
            let sig = Signature::new().with_concept("A").with_role("R", 2);
            let i = random_interp(seed, size, &sig, 0.5);
            let g: Vec<Elem> = (0..size).rev().map(Elem::from).collect();
            let j = i.rename(&g);
            prop_assert_eq!(j.role("R").unwrap().len(), i.role("R").unwrap().len());
            prop_assert_eq!(j.rename(&g), i);
        }
    }
}
