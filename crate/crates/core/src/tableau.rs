//! A graded tableau for ALCQI concept satisfiability, and the
//! ALCQP(p,s) pipeline through reification, unraveling and extraction.
//!
//! Without a TBox, node labels at depth `d` only hold concepts of modal
//! depth at most `q - d`, so the completion tree has depth at most `q` and
//! no blocking is needed.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Elem, Interp};
use crate::reify::{extract_polyadic, reify, ReifyError, ReifySignature};
use crate::semantics::{check_alcqi, check_concept, SemanticsError, Witness};
use crate::syntax::{AlcqiConcept, BinRole, Concept, Grade};
use crate::unravel::{g_unravel, UnravelError};

pub const DEFAULT_K_CAP: u64 = 64;

#[derive(Clone, Copy, Debug)]
pub struct TableauConfig {
    /// Largest grade the calculus will materialize.
    pub k_cap: u64,
    /// Drives the choice among applicable rule instances and the order of
    /// branch alternatives. Verdicts never depend on it.
    pub seed: u64,
    /// Rule applications before giving up.
    pub max_steps: u64,
}

impl Default for TableauConfig {
    fn default() -> Self {
        TableauConfig {
            k_cap: DEFAULT_K_CAP,
            seed: 0,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum TableauError {
    #[error("grade {k} exceeds the cap of {cap}")]
    KCap { k: Grade, cap: u64 },
    #[error("tableau gave up after {0} rule applications")]
    Steps(u64),
    #[error("witness fails to model-check: {0}")]
    Unsound(String),
    #[error(transparent)]
    Reify(#[from] ReifyError),
    #[error(transparent)]
    Unravel(#[from] UnravelError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(Witness),
    Unsat,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }
}

/// ALCQI concepts in negation normal form. `AtMost(k, r, C)` stands for
/// `not >=(k+1) r.C`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NnfConcept {
    Top,
    Bot,
    Atom(String),
    NotAtom(String),
    And(Vec<NnfConcept>),
    Or(Vec<NnfConcept>),
    AtLeast(u64, BinRole, Box<NnfConcept>),
    AtMost(u64, BinRole, Box<NnfConcept>),
}

impl NnfConcept {
    /// Back to core syntax, for model checking.
    pub fn to_alcqi(&self) -> AlcqiConcept {
        match self {
            NnfConcept::Top => AlcqiConcept::Top,
            NnfConcept::Bot => AlcqiConcept::Bot,
            NnfConcept::Atom(a) => AlcqiConcept::atomic(a.clone()),
            NnfConcept::NotAtom(a) => AlcqiConcept::not(AlcqiConcept::atomic(a.clone())),
            NnfConcept::And(cs) => AlcqiConcept::and_all(cs.iter().map(NnfConcept::to_alcqi)),
            NnfConcept::Or(cs) => AlcqiConcept::not(AlcqiConcept::and_all(
                cs.iter().map(|c| AlcqiConcept::not(c.to_alcqi())),
            )),
            NnfConcept::AtLeast(k, r, c) => AlcqiConcept::at_least(*k, r.clone(), c.to_alcqi()),
            NnfConcept::AtMost(k, r, c) => AlcqiConcept::not(AlcqiConcept::at_least(k + 1, r.clone(), c.to_alcqi())),
        }
    }
}

impl fmt::Display for NnfConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let role = |r: &BinRole| format!("{}{}", r.name, if r.inverse { "^-" } else { "" });
        let join = |f: &mut fmt::Formatter<'_>, cs: &[NnfConcept], op: &str| {
            write!(f, "(")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        };
        match self {
            NnfConcept::Top => write!(f, "top"),
            NnfConcept::Bot => write!(f, "bot"),
            NnfConcept::Atom(a) => write!(f, "{a}"),
            NnfConcept::NotAtom(a) => write!(f, "not {a}"),
            NnfConcept::And(cs) => join(f, cs, "and"),
            NnfConcept::Or(cs) => join(f, cs, "or"),
            NnfConcept::AtLeast(k, r, c) => write!(f, ">={k} {}.{c}", role(r)),
            NnfConcept::AtMost(k, r, c) => write!(f, "<={k} {}.{c}", role(r)),
        }
    }
}

/// Negation normal form. Grades above `u64::MAX` saturate.
pub fn nnf(c: &AlcqiConcept) -> NnfConcept {
    nnf_pol(c, true)
}

fn nnf_pol(c: &AlcqiConcept, pos: bool) -> NnfConcept {
    match c {
        AlcqiConcept::Top => {
            if pos {
                NnfConcept::Top
            } else {
                NnfConcept::Bot
            }
        }
        AlcqiConcept::Bot => {
            if pos {
                NnfConcept::Bot
            } else {
                NnfConcept::Top
            }
        }
        AlcqiConcept::Atomic(a) => {
            if pos {
                NnfConcept::Atom(a.clone())
            } else {
                NnfConcept::NotAtom(a.clone())
            }
        }
        AlcqiConcept::Not(x) => nnf_pol(x, !pos),
        AlcqiConcept::And(a, b) => {
            let mut parts = Vec::new();
            for x in [a, b] {
                match nnf_pol(x, pos) {
                    NnfConcept::And(cs) if pos => parts.extend(cs),
                    NnfConcept::Or(cs) if !pos => parts.extend(cs),
                    other => parts.push(other),
                }
            }
            if pos {
                NnfConcept::And(parts)
            } else {
                NnfConcept::Or(parts)
            }
        }
        AlcqiConcept::AtLeast { k, role, filler } => {
            let k = k.to_u64().unwrap_or(u64::MAX);
            let filler = Box::new(nnf_pol(filler, true));
            if pos {
                NnfConcept::AtLeast(k, role.clone(), filler)
            } else {
                NnfConcept::AtMost(k - 1, role.clone(), filler)
            }
        }
    }
}

/// Decides satisfiability of an ALCQI concept.
pub fn alcqi_sat(c: &AlcqiConcept, config: &TableauConfig) -> Result<Verdict, TableauError> {
    if let Some(k) = c.max_grade() {
        if k.to_u64().is_none_or(|v| v > config.k_cap) {
            return Err(TableauError::KCap { k, cap: config.k_cap });
        }
    }
    let mut store = Store::default();
    let root = store.intern(&nnf(c));
    let mut search = Search {
        store,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        steps: 0,
        max_steps: config.max_steps,
    };
    let Some(graph) = search.run(root)? else {
        return Ok(Verdict::Unsat);
    };
    let interp = graph.to_interp(&search.store, c);
    if !check_alcqi(c, &interp)?.contains(Elem(0)) {
        return Err(TableauError::Unsound(format!("{c}")));
    }
    Ok(Verdict::Sat(Witness { interp, root: Elem(0) }))
}

/// Decides satisfiability of an ALCQP(p,s) concept: the reified concept is
/// decided by the tableau, and a sat witness is unraveled to the modal
/// depth of the translation and read back as a polyadic interpretation.
pub fn alcqp_sat(c: &Concept, config: &TableauConfig) -> Result<Verdict, TableauError> {
    let t = reify(c);
    let Verdict::Sat(w) = alcqi_sat(&t, config)? else {
        return Ok(Verdict::Unsat);
    };
    let tree = g_unravel(&w.interp, w.root, t.modal_depth())?;
    let poly = extract_polyadic(&tree.tree, &ReifySignature::of_concept(c))?;
    let root = poly
        .elem(tree.tree.name(Elem(0)))
        .ok_or_else(|| TableauError::Unsound("root left the domain".into()))?;
    if !check_concept(c, &poly)?.contains(root) {
        return Err(TableauError::Unsound(format!("{c}")));
    }
    Ok(Verdict::Sat(Witness { interp: poly, root }))
}

type Id = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Top,
    Bot,
    Atom(Id),
    NotAtom(Id),
    And(Vec<Id>),
    Or(Vec<Id>),
    AtLeast(u64, Id, Id),
    AtMost(u64, Id, Id),
}

/// Hash-consed NNF concepts. Roles are numbered `2 * name + inverse`.
#[derive(Default)]
struct Store {
    nodes: Vec<Node>,
    ids: HashMap<Node, Id>,
    neg: HashMap<Id, Id>,
    atoms: Vec<String>,
    atom_ids: HashMap<String, Id>,
    roles: Vec<String>,
    role_ids: HashMap<String, Id>,
}

fn inv(r: Id) -> Id {
    r ^ 1
}

impl Store {
    fn add(&mut self, n: Node) -> Id {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len() as Id;
        self.nodes.push(n.clone());
        self.ids.insert(n, id);
        id
    }

    fn atom(&mut self, a: &str) -> Id {
        if let Some(&id) = self.atom_ids.get(a) {
            return id;
        }
        self.atoms.push(a.to_string());
        let id = (self.atoms.len() - 1) as Id;
        self.atom_ids.insert(a.to_string(), id);
        id
    }

    fn role(&mut self, r: &BinRole) -> Id {
        let base = match self.role_ids.get(&r.name) {
            Some(&id) => id,
            None => {
                self.roles.push(r.name.clone());
                let id = (self.roles.len() - 1) as Id;
                self.role_ids.insert(r.name.clone(), id);
                id
            }
        };
        2 * base + Id::from(r.inverse)
    }

    fn intern(&mut self, c: &NnfConcept) -> Id {
        let n = match c {
            NnfConcept::Top => Node::Top,
            NnfConcept::Bot => Node::Bot,
            NnfConcept::Atom(a) => Node::Atom(self.atom(a)),
            NnfConcept::NotAtom(a) => Node::NotAtom(self.atom(a)),
            NnfConcept::And(cs) => {
                let mut ids: Vec<Id> = cs.iter().map(|c| self.intern(c)).collect();
                ids.sort_unstable();
                ids.dedup();
                Node::And(ids)
            }
            NnfConcept::Or(cs) => {
                let mut ids: Vec<Id> = cs.iter().map(|c| self.intern(c)).collect();
                ids.sort_unstable();
                ids.dedup();
                Node::Or(ids)
            }
            NnfConcept::AtLeast(k, r, f) => Node::AtLeast(*k, self.role(r), self.intern(f)),
            NnfConcept::AtMost(k, r, f) => Node::AtMost(*k, self.role(r), self.intern(f)),
        };
        self.add(n)
    }

    /// The NNF of the complement.
    fn negate(&mut self, id: Id) -> Id {
        if let Some(&n) = self.neg.get(&id) {
            return n;
        }
        let n = match self.nodes[id as usize].clone() {
            Node::Top => Node::Bot,
            Node::Bot => Node::Top,
            Node::Atom(a) => Node::NotAtom(a),
            Node::NotAtom(a) => Node::Atom(a),
            Node::And(cs) => {
                let mut ids: Vec<Id> = cs.into_iter().map(|c| self.negate(c)).collect();
                ids.sort_unstable();
                Node::Or(ids)
            }
            Node::Or(cs) => {
                let mut ids: Vec<Id> = cs.into_iter().map(|c| self.negate(c)).collect();
                ids.sort_unstable();
                Node::And(ids)
            }
            Node::AtLeast(0, _, _) => Node::Bot,
            Node::AtLeast(k, r, f) => Node::AtMost(k - 1, r, f),
            Node::AtMost(k, r, f) => Node::AtLeast(k + 1, r, f),
        };
        let out = self.add(n);
        self.neg.insert(id, out);
        self.neg.insert(out, id);
        out
    }
}

#[derive(Clone, Debug)]
struct TNode {
    label: BTreeSet<Id>,
    parent: Option<usize>,
    /// Role from the parent to this node.
    edge: Id,
    children: Vec<usize>,
    alive: bool,
}

#[derive(Clone, Debug)]
struct Graph {
    nodes: Vec<TNode>,
    neq: HashSet<(usize, usize)>,
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Graph {
    fn new(root: Id, top: Id) -> Self {
        Graph {
            nodes: vec![TNode {
                label: BTreeSet::from([root, top]),
                parent: None,
                edge: 0,
                children: Vec::new(),
                alive: true,
            }],
            neq: HashSet::new(),
        }
    }

    fn alive(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&x| self.nodes[x].alive)
    }

    /// The `r`-neighbours of `x`: children along `r` and the parent if `x`
    /// hangs off it along the inverse of `r`.
    fn neighbours(&self, x: usize, r: Id) -> Vec<usize> {
        let n = &self.nodes[x];
        let mut out: Vec<usize> = n
            .children
            .iter()
            .copied()
            .filter(|&y| self.nodes[y].edge == r)
            .collect();
        if let Some(p) = n.parent {
            if n.edge == inv(r) {
                out.push(p);
            }
        }
        out
    }

    fn distinct(&self, a: usize, b: usize) -> bool {
        self.neq.contains(&pair(a, b))
    }

    /// Whether `k` of `cands` are pairwise distinct.
    fn has_clique(&self, cands: &[usize], k: usize) -> bool {
        fn go(g: &Graph, cands: &[usize], chosen: &mut Vec<usize>, k: usize) -> bool {
            if chosen.len() == k {
                return true;
            }
            for (i, &c) in cands.iter().enumerate() {
                if chosen.iter().all(|&d| g.distinct(c, d)) {
                    chosen.push(c);
                    if go(g, &cands[i + 1..], chosen, k) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        k == 0 || (cands.len() >= k && go(self, cands, &mut Vec::new(), k))
    }

    fn add_child(&mut self, x: usize, r: Id, label: BTreeSet<Id>) -> usize {
        self.nodes.push(TNode {
            label,
            parent: Some(x),
            edge: r,
            children: Vec::new(),
            alive: true,
        });
        let y = self.nodes.len() - 1;
        self.nodes[x].children.push(y);
        y
    }

    /// Folds `y` into `z`: labels, children and distinctness move over.
    fn merge(&mut self, y: usize, z: usize) {
        let label = std::mem::take(&mut self.nodes[y].label);
        self.nodes[z].label.extend(label);
        let kids = std::mem::take(&mut self.nodes[y].children);
        for &c in &kids {
            self.nodes[c].parent = Some(z);
        }
        self.nodes[z].children.extend(kids);
        if let Some(p) = self.nodes[y].parent {
            self.nodes[p].children.retain(|&c| c != y);
        }
        let moved: Vec<(usize, usize)> = self.neq.iter().copied().filter(|&(a, b)| a == y || b == y).collect();
        for (a, b) in moved {
            self.neq.remove(&(a, b));
            let w = if a == y { b } else { a };
            self.neq.insert(pair(w, z));
        }
        self.nodes[y].alive = false;
    }

    fn to_interp(&self, store: &Store, c: &AlcqiConcept) -> Interp {
        // Number nodes in breadth-first order from the root.
        let mut order = vec![0usize];
        let mut i = 0;
        while i < order.len() {
            order.extend(self.nodes[order[i]].children.iter().copied());
            i += 1;
        }
        let mut pos = vec![0usize; self.nodes.len()];
        for (i, &x) in order.iter().enumerate() {
            pos[x] = i;
        }
        let mut interp = Interp::numbered(order.len()).expect("nonempty");
        for a in c.concept_names() {
            interp.set_concept(a, interp.empty_set()).expect("valid name");
        }
        for r in c.role_names() {
            interp
                .set_role(r, crate::model::ArityRel::empty(2))
                .expect("valid name");
        }
        for &x in &order {
            for &l in &self.nodes[x].label {
                if let Node::Atom(a) = &store.nodes[l as usize] {
                    interp
                        .add_member(&store.atoms[*a as usize], Elem::from(pos[x]))
                        .expect("declared");
                }
            }
            if let Some(p) = self.nodes[x].parent {
                let r = self.nodes[x].edge;
                let name = &store.roles[(r / 2) as usize];
                let (a, b) = if r % 2 == 1 { (pos[x], pos[p]) } else { (pos[p], pos[x]) };
                interp
                    .add_tuple(name, vec![Elem::from(a), Elem::from(b)])
                    .expect("binary");
            }
        }
        interp
    }
}

/// A rule instance that needs a choice.
enum Branch {
    Or { x: usize, ds: Vec<Id> },
    Choose { y: usize, c: Id },
    Merge { x: usize, pairs: Vec<(usize, usize)> },
}

struct Search {
    store: Store,
    rng: ChaCha8Rng,
    steps: u64,
    max_steps: u64,
}

impl Search {
    fn tick(&mut self) -> Result<(), TableauError> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(TableauError::Steps(self.max_steps));
        }
        Ok(())
    }

    fn run(&mut self, root: Id) -> Result<Option<Graph>, TableauError> {
        let top = self.store.add(Node::Top);
        let mut stack = vec![Graph::new(root, top)];
        while let Some(mut g) = stack.pop() {
            loop {
                self.tick()?;
                if !self.saturate(&mut g) {
                    break;
                }
                if self.generate(&mut g) {
                    continue;
                }
                match self.force(&mut g) {
                    None => break,
                    Some(true) => continue,
                    Some(false) => {}
                }
                match self.pick_branch(&g) {
                    Some(b) => {
                        let mut alts = self.alternatives(&g, b);
                        alts.reverse();
                        stack.extend(alts);
                        break;
                    }
                    None => return Ok(Some(g)),
                }
            }
        }
        Ok(None)
    }

    /// Deterministic rules to a fixpoint. Returns false on a clash.
    fn saturate(&mut self, g: &mut Graph) -> bool {
        loop {
            let mut changed = false;
            for x in g.alive().collect::<Vec<_>>() {
                let label: Vec<Id> = g.nodes[x].label.iter().copied().collect();
                for l in label {
                    match self.store.nodes[l as usize].clone() {
                        Node::And(cs) => {
                            for c in cs {
                                changed |= g.nodes[x].label.insert(c);
                            }
                        }
                        Node::AtMost(0, r, f) => {
                            let nf = self.store.negate(f);
                            for y in g.neighbours(x, r) {
                                changed |= g.nodes[y].label.insert(nf);
                            }
                        }
                        _ => {}
                    }
                }
            }
            if !changed {
                break;
            }
        }
        !self.clash(g)
    }

    fn clash(&mut self, g: &Graph) -> bool {
        for x in g.alive() {
            let label = &g.nodes[x].label;
            for &l in label {
                match &self.store.nodes[l as usize] {
                    Node::Bot => return true,
                    Node::Atom(a) => {
                        if self
                            .store
                            .ids
                            .get(&Node::NotAtom(*a))
                            .is_some_and(|n| label.contains(n))
                        {
                            return true;
                        }
                    }
                    Node::AtMost(k, r, f) => {
                        let with: Vec<usize> = g
                            .neighbours(x, *r)
                            .into_iter()
                            .filter(|y| g.nodes[*y].label.contains(f))
                            .collect();
                        if with.len() as u64 > *k && g.has_clique(&with, *k as usize + 1) {
                            return true;
                        }
                    }
                    _ => {}
                }
            }
        }
        false
    }

    /// Whether `c` is bound to hold at `y` in every completion of `g`:
    /// it is in the label, or follows from the label and the neighbours
    /// already present.
    fn entails(&self, g: &Graph, y: usize, c: Id) -> bool {
        if g.nodes[y].label.contains(&c) {
            return true;
        }
        match &self.store.nodes[c as usize] {
            Node::Top => true,
            Node::And(cs) => cs.iter().all(|&d| self.entails(g, y, d)),
            Node::Or(ds) => ds.iter().any(|&d| self.entails(g, y, d)),
            Node::AtLeast(k, r, f) => {
                let with: Vec<usize> = g
                    .neighbours(y, *r)
                    .into_iter()
                    .filter(|&z| self.entails(g, z, *f))
                    .collect();
                g.has_clique(&with, *k as usize)
            }
            _ => false,
        }
    }

    fn refutes(&mut self, g: &Graph, y: usize, c: Id) -> bool {
        let n = self.store.negate(c);
        self.entails(g, y, n)
    }

    /// Settles disjunctions and choices whose outcome is already entailed.
    /// Returns `None` on a clash, otherwise whether a label grew.
    fn force(&mut self, g: &mut Graph) -> Option<bool> {
        let mut adds: Vec<(usize, Id)> = Vec::new();
        for x in g.alive().collect::<Vec<_>>() {
            let label: Vec<Id> = g.nodes[x].label.iter().copied().collect();
            for l in label {
                match self.store.nodes[l as usize].clone() {
                    Node::Or(ds) if !ds.iter().any(|d| g.nodes[x].label.contains(d)) => {
                        if let Some(&d) = ds.iter().find(|&&d| self.entails(g, x, d)) {
                            adds.push((x, d));
                            continue;
                        }
                        let open: Vec<Id> = ds.iter().copied().filter(|&d| !self.refutes(g, x, d)).collect();
                        match open.as_slice() {
                            [] => return None,
                            [d] => adds.push((x, *d)),
                            _ => {}
                        }
                    }
                    Node::AtMost(_, r, f) => {
                        let nf = self.store.negate(f);
                        for y in g.neighbours(x, r) {
                            let ly = &g.nodes[y].label;
                            if ly.contains(&f) || ly.contains(&nf) {
                                continue;
                            }
                            if self.entails(g, y, f) {
                                adds.push((y, f));
                            } else if self.entails(g, y, nf) {
                                adds.push((y, nf));
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        let mut grew = false;
        for (y, c) in adds {
            grew |= g.nodes[y].label.insert(c);
        }
        Some(grew)
    }

    fn pick_branch(&mut self, g: &Graph) -> Option<Branch> {
        let mut ors = Vec::new();
        let mut chooses = Vec::new();
        let mut merges = Vec::new();
        for x in g.alive() {
            let label = &g.nodes[x].label;
            for &l in label {
                match self.store.nodes[l as usize].clone() {
                    Node::Or(ds) if !ds.iter().any(|d| label.contains(d)) => ors.push(Branch::Or { x, ds }),
                    Node::AtMost(k, r, f) => {
                        let nf = self.store.negate(f);
                        let nbrs = g.neighbours(x, r);
                        for &y in &nbrs {
                            let ly = &g.nodes[y].label;
                            if !ly.contains(&f) && !ly.contains(&nf) {
                                chooses.push(Branch::Choose { y, c: f });
                            }
                        }
                        let with: Vec<usize> = nbrs.into_iter().filter(|y| g.nodes[*y].label.contains(&f)).collect();
                        if with.len() as u64 > k {
                            let mut pairs = Vec::new();
                            for (i, &a) in with.iter().enumerate() {
                                for &b in &with[i + 1..] {
                                    if !g.distinct(a, b) {
                                        pairs.push((a, b));
                                    }
                                }
                            }
                            merges.push(Branch::Merge { x, pairs });
                        }
                    }
                    _ => {}
                }
            }
        }
        for mut group in [ors, chooses, merges] {
            if !group.is_empty() {
                let i = self.rng.gen_range(0..group.len());
                return Some(group.swap_remove(i));
            }
        }
        None
    }

    fn alternatives(&mut self, g: &Graph, b: Branch) -> Vec<Graph> {
        match b {
            Branch::Or { x, mut ds } => {
                ds.shuffle(&mut self.rng);
                // Later alternatives also assume the earlier disjuncts fail.
                let mut out = Vec::new();
                let mut failed = Vec::new();
                for d in ds {
                    let mut h = g.clone();
                    h.nodes[x].label.insert(d);
                    h.nodes[x].label.extend(failed.iter().copied());
                    failed.push(self.store.negate(d));
                    out.push(h);
                }
                out
            }
            Branch::Choose { y, c } => {
                let mut opts = [c, self.store.negate(c)];
                if self.rng.gen_bool(0.5) {
                    opts.swap(0, 1);
                }
                opts.iter()
                    .map(|&o| {
                        let mut h = g.clone();
                        h.nodes[y].label.insert(o);
                        h
                    })
                    .collect()
            }
            Branch::Merge { x, mut pairs } => {
                pairs.shuffle(&mut self.rng);
                let parent = g.nodes[x].parent;
                pairs
                    .into_iter()
                    .map(|(a, b)| {
                        let mut h = g.clone();
                        // Never fold the parent of x into one of its children.
                        let (from, into) = if Some(a) == parent { (b, a) } else { (a, b) };
                        h.merge(from, into);
                        h
                    })
                    .collect()
            }
        }
    }

    /// The at-least rule on every unsatisfied instance. Returns whether
    /// anything was generated.
    fn generate(&mut self, g: &mut Graph) -> bool {
        let mut todo = Vec::new();
        for x in g.alive() {
            for &l in &g.nodes[x].label {
                if let Node::AtLeast(k, r, f) = self.store.nodes[l as usize] {
                    let with: Vec<usize> = g
                        .neighbours(x, r)
                        .into_iter()
                        .filter(|y| g.nodes[*y].label.contains(&f))
                        .collect();
                    if !g.has_clique(&with, k as usize) {
                        todo.push((x, k, r, f));
                    }
                }
            }
        }
        let any = !todo.is_empty();
        for (x, k, r, f) in todo {
            let top = self.store.add(Node::Top);
            let fresh: Vec<usize> = (0..k).map(|_| g.add_child(x, r, BTreeSet::from([f, top]))).collect();
            for (i, &a) in fresh.iter().enumerate() {
                for &b in &fresh[i + 1..] {
                    g.neq.insert(pair(a, b));
                }
            }
        }
        any
    }
}
