//! Bounded model finding for ALCQP(p,s) concepts.
//!
//! A concept is grounded into propositional clauses over a fixed set of
//! elements: one variable per concept-name membership and per candidate
//! role tuple, plus Tseitin variables for subconcepts at elements. Number
//! restrictions become sequential-counter cardinality constraints over
//! per-tuple indicators. Element 0 is the root. Adding isolated elements to
//! a model changes no extension, so a model of size at most `n` exists iff
//! one of size exactly `n` does.

use std::collections::HashMap;

use super::sat::{Lit, SolveResult, Solver};
use super::{check_concept, SemanticsError};
use crate::model::{ArityRel, Elem, ElemSet, Interp};
use crate::syntax::{Concept, Permutation};

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Total conflict budget over all solver calls.
    pub max_conflicts: u64,
    /// Sizes `1..=probe` are tried one by one before jumping to the bound,
    /// so small witnesses come back minimal.
    pub probe: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_conflicts: 2_000_000,
            probe: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub interp: Interp,
    pub root: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Sat(Witness),
    /// No model with at most the given number of elements.
    NoModel(usize),
}

impl OracleOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleOutcome::Sat(_))
    }
}

fn grade_u64(k: &crate::syntax::Grade) -> u64 {
    k.to_u64().unwrap_or(u64::MAX)
}

/// `1 + b + b^2` where `b` is the largest `k * (arity - 1)` over the number
/// restrictions of `c`.
pub fn domain_bound(c: &Concept) -> usize {
    let mut b = 0u64;
    c.visit(&mut |d| {
        if let Concept::AtLeast { k, role, .. } = d {
            b = b.max(grade_u64(k).saturating_mul(role.arity as u64 - 1));
        }
    });
    let b = usize::try_from(b).unwrap_or(usize::MAX);
    1usize.saturating_add(b).saturating_add(b.saturating_mul(b))
}

/// Size of a tree model pruned to restriction witnesses: with `q` the modal
/// depth and `B_l` the summed `k * (arity - 1)` over distinct restrictions
/// of depth at most `q - l`, this is `1 + B_0 + B_0 B_1 + ... + B_0...B_(q-1)`.
pub fn filtration_bound(c: &Concept) -> usize {
    let q = c.modal_depth();
    let mut restrictions: Vec<Concept> = Vec::new();
    c.visit(&mut |d| {
        if matches!(d, Concept::AtLeast { .. }) && !restrictions.contains(d) {
            restrictions.push(d.clone());
        }
    });
    let mut total = 1usize;
    let mut layer = 1usize;
    for l in 0..q {
        let b: u64 = restrictions
            .iter()
            .filter(|d| d.modal_depth() <= q - l)
            .map(|d| match d {
                Concept::AtLeast { k, role, .. } => grade_u64(k).saturating_mul(role.arity as u64 - 1),
                _ => 0,
            })
            .fold(0u64, u64::saturating_add);
        layer = layer.saturating_mul(usize::try_from(b).unwrap_or(usize::MAX));
        total = total.saturating_add(layer);
    }
    total
}

/// Skeletons larger than this are not built.
const SKELETON_CAP: usize = 200_000;
/// Flat groundings with more candidate tuples than this are refused.
const FLAT_CAP: u64 = 3_000_000;

/// Decides whether some interpretation with at most `max_domain` elements
/// has an element satisfying `c`.
///
/// Sizes `1..=probe` are searched exhaustively over all interpretations, so
/// small witnesses come back minimal. Past that, if the filtration bound
/// fits under `max_domain`, the search runs over a tree-shaped skeleton:
/// every satisfiable concept has a tree-like model, and pruning one to
/// restriction witnesses leaves a model embedded in the skeleton. Otherwise
/// all interpretations of size `max_domain` are grounded.
pub fn oracle_sat(c: &Concept, max_domain: usize, config: OracleConfig) -> Result<OracleOutcome, SemanticsError> {
    assert!(max_domain >= 1, "domain bound must be positive");
    let mut spent = 0u64;
    for n in 1..=config.probe.min(max_domain) {
        if let Some(w) = solve(Grounding::flat(c, n)?, c, &config, &mut spent)? {
            return Ok(OracleOutcome::Sat(w));
        }
    }
    if max_domain > config.probe {
        let f = filtration_bound(c);
        let enc = if f <= max_domain && f <= SKELETON_CAP {
            Grounding::skeleton(c)
        } else {
            Grounding::flat(c, max_domain)?
        };
        if let Some(w) = solve(enc, c, &config, &mut spent)? {
            return Ok(OracleOutcome::Sat(w));
        }
    }
    Ok(OracleOutcome::NoModel(max_domain))
}

fn solve(
    mut enc: Grounding,
    c: &Concept,
    config: &OracleConfig,
    spent: &mut u64,
) -> Result<Option<Witness>, SemanticsError> {
    let root = enc.lit(enc.root, 0);
    enc.solver.add_clause(&[root]);
    let before = enc.solver.conflicts;
    let res = enc.solver.solve(config.max_conflicts.saturating_sub(*spent));
    *spent += enc.solver.conflicts - before;
    match res {
        SolveResult::Sat => {
            let interp = enc.decode(c);
            let ext = check_concept(c, &interp)?;
            assert!(ext.contains(Elem(0)), "oracle witness fails to model-check");
            Ok(Some(Witness { interp, root: Elem(0) }))
        }
        SolveResult::Unsat => Ok(None),
        SolveResult::Unknown => Err(SemanticsError::Budget(config.max_conflicts)),
    }
}

/// Hash-consed subconcept.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Node {
    Top,
    Bot,
    Atom(usize),
    Not(usize),
    And(usize, usize),
    AtLeast {
        k: u64,
        role: usize,
        perm: Vec<usize>,
        args: Vec<usize>,
    },
}

/// Candidate tuples of one role, each with its membership variable.
struct Candidates {
    arity: usize,
    tuples: Vec<Vec<usize>>,
    lits: Vec<Lit>,
    index: HashMap<Vec<usize>, usize>,
    /// `(coordinate, element)` to the candidates holding that element there.
    by_pos: HashMap<(usize, usize), Vec<usize>>,
}

impl Candidates {
    fn new(arity: usize) -> Self {
        Candidates {
            arity,
            tuples: Vec::new(),
            lits: Vec::new(),
            index: HashMap::new(),
            by_pos: HashMap::new(),
        }
    }

    fn add(&mut self, t: Vec<usize>, solver: &mut Solver) {
        if self.index.contains_key(&t) {
            return;
        }
        let id = self.tuples.len();
        for (j, &e) in t.iter().enumerate() {
            self.by_pos.entry((j, e)).or_default().push(id);
        }
        self.index.insert(t.clone(), id);
        self.tuples.push(t);
        self.lits.push(solver.new_var());
    }
}

struct Grounding {
    solver: Solver,
    n: usize,
    tru: Lit,
    nodes: Vec<Node>,
    ids: HashMap<Node, usize>,
    root: usize,
    atom_names: Vec<String>,
    atoms: Vec<Vec<Lit>>,
    role_names: Vec<String>,
    roles: Vec<Candidates>,
    memo: HashMap<(usize, usize), Lit>,
}

impl Grounding {
    fn empty(c: &Concept, n: usize) -> Self {
        let mut solver = Solver::new();
        let tru = solver.new_var();
        solver.add_clause(&[tru]);
        let atom_names: Vec<String> = c.concept_names().into_iter().collect();
        let atoms = atom_names
            .iter()
            .map(|_| (0..n).map(|_| solver.new_var()).collect())
            .collect();
        let role_list: Vec<(String, usize)> = c.role_names().into_iter().collect();
        let mut g = Grounding {
            solver,
            n,
            tru,
            nodes: Vec::new(),
            ids: HashMap::new(),
            root: 0,
            atom_names,
            atoms,
            roles: role_list.iter().map(|(_, a)| Candidates::new(*a)).collect(),
            role_names: role_list.into_iter().map(|(r, _)| r).collect(),
            memo: HashMap::new(),
        };
        g.root = g.intern(c);
        g
    }

    /// Every tuple over `{0, ..., n-1}` is a candidate.
    fn flat(c: &Concept, n: usize) -> Result<Self, SemanticsError> {
        let tuples = c
            .role_names()
            .values()
            .map(|&a| (n as u64).saturating_pow(a as u32))
            .fold(0u64, u64::saturating_add);
        if tuples > FLAT_CAP {
            return Err(SemanticsError::Grounding(tuples));
        }
        let mut g = Grounding::empty(c, n);
        for cands in &mut g.roles {
            for t in crate::model::all_tuples(n, cands.arity) {
                cands.add(t.into_iter().map(Elem::index).collect(), &mut g.solver);
            }
        }
        Ok(g)
    }

    /// Element 0 is the root. An element at level `l` gets `k` fresh
    /// hyperedges for every restriction `>=k R^pi.(...)` of modal depth at
    /// most `q - l`, sitting at source coordinate `pi_1` with new elements
    /// at the other coordinates.
    fn skeleton(c: &Concept) -> Self {
        let q = c.modal_depth();
        let mut restrictions: Vec<(usize, Concept)> = Vec::new();
        c.visit(&mut |d| {
            if matches!(d, Concept::AtLeast { .. }) && !restrictions.iter().any(|(_, e)| e == d) {
                restrictions.push((d.modal_depth(), d.clone()));
            }
        });
        let role_list: Vec<String> = c.role_names().into_keys().collect();
        let mut edges: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut n = 1;
        let mut layer = vec![0usize];
        for l in 0..q {
            let mut next = Vec::new();
            for &x in &layer {
                for (depth, d) in &restrictions {
                    let Concept::AtLeast { k, role, .. } = d else {
                        unreachable!()
                    };
                    if *depth > q - l {
                        continue;
                    }
                    let pi = role.permutation();
                    let r = role_list.binary_search(&role.name).expect("collected");
                    for _ in 0..grade_u64(k) {
                        let mut t = vec![0usize; role.arity];
                        t[pi.source(0)] = x;
                        for i in 1..role.arity {
                            t[pi.source(i)] = n;
                            next.push(n);
                            n += 1;
                        }
                        edges.push((r, t));
                    }
                }
            }
            layer = next;
        }
        let mut g = Grounding::empty(c, n);
        for (r, t) in edges {
            g.roles[r].add(t, &mut g.solver);
        }
        g
    }

    fn intern(&mut self, c: &Concept) -> usize {
        let node = match c {
            Concept::Top => Node::Top,
            Concept::Bot => Node::Bot,
            Concept::Atomic(a) => Node::Atom(self.atom_names.binary_search(a).expect("collected")),
            Concept::Not(x) => Node::Not(self.intern(x)),
            Concept::And(a, b) => Node::And(self.intern(a), self.intern(b)),
            Concept::AtLeast { k, role, args } => Node::AtLeast {
                k: grade_u64(k),
                role: self.role_names.binary_search(&role.name).expect("collected"),
                perm: role.permutation().coords().to_vec(),
                args: args.iter().map(|a| self.intern(a)).collect(),
            },
        };
        if let Some(&id) = self.ids.get(&node) {
            return id;
        }
        self.nodes.push(node.clone());
        self.ids.insert(node, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn and(&mut self, lits: &[Lit]) -> Lit {
        let fls = !self.tru;
        if lits.contains(&fls) {
            return fls;
        }
        let mut rest: Vec<Lit> = lits.iter().copied().filter(|l| *l != self.tru).collect();
        rest.sort_unstable();
        rest.dedup();
        match rest.len() {
            0 => self.tru,
            1 => rest[0],
            _ => {
                let x = self.solver.new_var();
                let mut long = vec![x];
                for &l in &rest {
                    self.solver.add_clause(&[!x, l]);
                    long.push(!l);
                }
                self.solver.add_clause(&long);
                x
            }
        }
    }

    fn or(&mut self, lits: &[Lit]) -> Lit {
        let negated: Vec<Lit> = lits.iter().map(|l| !*l).collect();
        !self.and(&negated)
    }

    /// A literal equivalent to "at least `k` of `xs` hold".
    fn at_least(&mut self, xs: &[Lit], k: u64) -> Lit {
        let m = xs.len() as u64;
        if k == 0 {
            return self.tru;
        }
        if k > m {
            return !self.tru;
        }
        if k == 1 {
            return self.or(xs);
        }
        if k == m {
            return self.and(xs);
        }
        let k = k as usize;
        let fls = !self.tru;
        // prev[j]: at least j of the indicators seen so far.
        let mut prev = vec![fls; k + 1];
        prev[0] = self.tru;
        for (i, &x) in xs.iter().enumerate() {
            let mut cur = vec![fls; k + 1];
            cur[0] = self.tru;
            for j in 1..=k.min(i + 1) {
                let c = self.solver.new_var();
                self.solver.add_clause(&[!prev[j], c]);
                self.solver.add_clause(&[!prev[j - 1], !x, c]);
                self.solver.add_clause(&[!c, prev[j], prev[j - 1]]);
                self.solver.add_clause(&[!c, prev[j], x]);
                cur[j] = c;
            }
            prev = cur;
        }
        prev[k]
    }

    /// The literal for "node `id` holds at element `e`".
    fn lit(&mut self, id: usize, e: usize) -> Lit {
        if let Some(&l) = self.memo.get(&(id, e)) {
            return l;
        }
        let l = match self.nodes[id].clone() {
            Node::Top => self.tru,
            Node::Bot => !self.tru,
            Node::Atom(a) => self.atoms[a][e],
            Node::Not(x) => !self.lit(x, e),
            Node::And(a, b) => {
                let (la, lb) = (self.lit(a, e), self.lit(b, e));
                self.and(&[la, lb])
            }
            Node::AtLeast { k, role, perm, args } => {
                let perm = Permutation::from_coords(perm).expect("stored from a permutation");
                // The permuted tuple starts at e; output i reads source
                // coordinate perm_i.
                let ids = self.roles[role]
                    .by_pos
                    .get(&(perm.source(0), e))
                    .cloned()
                    .unwrap_or_default();
                let mut indicators = Vec::new();
                for t in ids {
                    let mut conj = vec![self.roles[role].lits[t]];
                    for (i, &arg) in args.iter().enumerate() {
                        let u = self.roles[role].tuples[t][perm.source(i + 1)];
                        conj.push(self.lit(arg, u));
                    }
                    let ind = self.and(&conj);
                    if ind != !self.tru {
                        indicators.push(ind);
                    }
                }
                self.at_least(&indicators, k)
            }
        };
        self.memo.insert((id, e), l);
        l
    }

    fn decode(&self, c: &Concept) -> Interp {
        let mut interp = Interp::numbered(self.n).expect("positive size");
        interp.declare(&c.signature()).expect("concept names are valid");
        for (name, vars) in self.atom_names.iter().zip(&self.atoms) {
            let set = ElemSet::from_elems(
                self.n,
                (0..self.n)
                    .filter(|&e| self.solver.model_value(vars[e]))
                    .map(Elem::from),
            );
            interp.set_concept(name.clone(), set).expect("valid name");
        }
        for (name, cands) in self.role_names.iter().zip(&self.roles) {
            let rel = ArityRel::from_tuples(
                cands.arity,
                cands
                    .tuples
                    .iter()
                    .zip(&cands.lits)
                    .filter(|(_, v)| self.solver.model_value(**v))
                    .map(|(t, _)| t.iter().map(|&e| Elem::from(e)).collect::<Vec<_>>()),
            );
            interp.set_role(name.clone(), rel).expect("valid name");
        }
        interp
    }
}
