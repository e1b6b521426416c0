//! The graded spoiler/duplicator game on pointed interpretations, a
//! partition-refinement characterisation of its outcome, and an enumerator
//! of concepts of bounded depth and grade.
//!
//! A round: the spoiler picks `n <= p` distinct tuples starting at the
//! current point of one side that all share a role type; the duplicator
//! answers with `n` distinct tuples of that type at the other point; the
//! spoiler picks a coordinate of any chosen tuple on either side and the
//! duplicator answers with the same coordinate of a tuple on the other
//! side. Only tuples with a nonempty role type are playable.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::model::{Elem, Interp};
use crate::syntax::{all_permutations, perm_of_word, Concept, PermOp, PermWord, Permutation, RoleExpr, Signature};

/// Cap on the number of response checks in one call to the solver.
pub const STEP_CAP: u64 = 50_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("role `{role}` has arity {left} on the left and {right} on the right")]
    ArityMismatch { role: String, left: usize, right: usize },
    #[error("game search exceeded {0} steps")]
    Steps(u64),
    #[error("more than {0} concepts")]
    Budget(usize),
}

/// The pairs `(S, sigma)` such that `sigma` applied to a tuple lies in `S`.
/// Permutations are kept as one-based coordinate vectors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleType(BTreeSet<(String, Vec<usize>)>);

impl RoleType {
    pub fn contains(&self, role: &str, perm: &Permutation) -> bool {
        self.0.contains(&(role.to_string(), perm.one_based()))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for RoleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (r, p)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let coords: Vec<String> = p.iter().map(usize::to_string).collect();
            write!(f, "{r}[{}]", coords.join(""))?;
        }
        write!(f, "}}")
    }
}

fn type_with(tuple: &[Elem], interp: &Interp, perms: &[Permutation]) -> RoleType {
    let mut out = BTreeSet::new();
    for (name, rel) in interp.roles() {
        if rel.arity() != tuple.len() {
            continue;
        }
        for sigma in perms {
            if rel.contains(&sigma.apply(tuple)) {
                out.insert((name.to_string(), sigma.one_based()));
            }
        }
    }
    RoleType(out)
}

fn perms_of(m: usize) -> Vec<Permutation> {
    all_permutations(m).into_iter().map(|(_, p)| p).collect()
}

/// The role type of `tuple` in `interp`.
pub fn role_type(tuple: &[Elem], interp: &Interp) -> RoleType {
    type_with(tuple, interp, &perms_of(tuple.len()))
}

/// A role type and the spoiler's tuples of that type.
type SpoilerMove = (RoleType, Vec<Vec<Elem>>);

/// Per element: playable tuples starting there, grouped by role type.
type Moves = Vec<BTreeMap<RoleType, Vec<Vec<Elem>>>>;

fn moves(interp: &Interp) -> Moves {
    let mut starts: Vec<BTreeSet<Vec<Elem>>> = vec![BTreeSet::new(); interp.size()];
    let mut perms: BTreeMap<usize, Vec<Permutation>> = BTreeMap::new();
    for (_, rel) in interp.roles() {
        let ps = perms.entry(rel.arity()).or_insert_with(|| perms_of(rel.arity()));
        for t in rel.tuples() {
            for sigma in ps.iter() {
                let u = sigma.apply(t);
                starts[u[0].index()].insert(u);
            }
        }
    }
    starts
        .into_iter()
        .map(|ts| {
            let mut by: BTreeMap<RoleType, Vec<Vec<Elem>>> = BTreeMap::new();
            for u in ts {
                by.entry(type_with(&u, interp, &perms[&u.len()])).or_default().push(u);
            }
            by
        })
        .collect()
}

fn atoms_of(left: &Interp, right: &Interp) -> Vec<String> {
    let mut names: BTreeSet<String> = left.concepts().map(|(c, _)| c.to_string()).collect();
    names.extend(right.concepts().map(|(c, _)| c.to_string()));
    names.into_iter().collect()
}

fn props(interp: &Interp, atoms: &[String]) -> Vec<Vec<bool>> {
    interp
        .elems()
        .map(|e| {
            atoms
                .iter()
                .map(|a| interp.concept(a).is_some_and(|s| s.contains(e)))
                .collect()
        })
        .collect()
}

/// All `n`-element subsets of `items`, as index lists in lexicographic
/// order.
fn subsets(len: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, len: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            if len - i < n - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, len, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, len, n, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// The result of a game together with a one-line account of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameOutcome {
    pub duplicator_wins: bool,
    pub trace: String,
}

struct Solver<'a> {
    left: &'a Interp,
    right: &'a Interp,
    grading: usize,
    props: [Vec<Vec<bool>>; 2],
    moves: [Moves; 2],
    memo: HashMap<(Elem, Elem, usize), bool>,
    steps: u64,
}

impl<'a> Solver<'a> {
    fn new(left: &'a Interp, right: &'a Interp, grading: usize) -> Result<Self, GameError> {
        for (name, rel) in left.roles() {
            if let Some(other) = right.role(name) {
                if other.arity() != rel.arity() {
                    return Err(GameError::ArityMismatch {
                        role: name.to_string(),
                        left: rel.arity(),
                        right: other.arity(),
                    });
                }
            }
        }
        let atoms = atoms_of(left, right);
        Ok(Solver {
            left,
            right,
            grading,
            props: [props(left, &atoms), props(right, &atoms)],
            moves: [moves(left), moves(right)],
            memo: HashMap::new(),
            steps: 0,
        })
    }

    fn interp(&self, side: Side) -> &'a Interp {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    fn idx(side: Side) -> usize {
        match side {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    fn same_props(&self, a: Elem, b: Elem) -> bool {
        self.props[0][a.index()] == self.props[1][b.index()]
    }

    fn wins(&mut self, a: Elem, b: Elem, r: usize) -> Result<bool, GameError> {
        if !self.same_props(a, b) {
            return Ok(false);
        }
        if r == 0 {
            return Ok(true);
        }
        if let Some(&w) = self.memo.get(&(a, b, r)) {
            return Ok(w);
        }
        let w = self.spoiler_move(Side::Left, a, b, r)?.is_none() && self.spoiler_move(Side::Right, a, b, r)?.is_none();
        self.memo.insert((a, b, r), w);
        Ok(w)
    }

    /// A winning first move for a spoiler who plays on `side` at position
    /// `(a, b)` with `r` rounds left.
    fn spoiler_move(&mut self, side: Side, a: Elem, b: Elem, r: usize) -> Result<Option<SpoilerMove>, GameError> {
        let (own, other) = match side {
            Side::Left => (a, b),
            Side::Right => (b, a),
        };
        let theirs = match side {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        };
        let mine = self.moves[Self::idx(side)][own.index()].clone();
        for (ty, tuples) in mine {
            let answers = self.moves[Self::idx(theirs)][other.index()]
                .get(&ty)
                .cloned()
                .unwrap_or_default();
            for n in 1..=self.grading.min(tuples.len()) {
                for pick in subsets(tuples.len(), n) {
                    let xs: Vec<Vec<Elem>> = pick.iter().map(|&i| tuples[i].clone()).collect();
                    if self.answer(side, &xs, &answers, r)?.is_none() {
                        return Ok(Some((ty, xs)));
                    }
                }
            }
        }
        Ok(None)
    }

    /// A duplicator answer to the spoiler's tuples `xs` on `side`, chosen
    /// among `answers` on the other side.
    fn answer(
        &mut self,
        side: Side,
        xs: &[Vec<Elem>],
        answers: &[Vec<Elem>],
        r: usize,
    ) -> Result<Option<Vec<Vec<Elem>>>, GameError> {
        for pick in subsets(answers.len(), xs.len()) {
            self.steps += 1;
            if self.steps > STEP_CAP {
                return Err(GameError::Steps(STEP_CAP));
            }
            let ys: Vec<Vec<Elem>> = pick.iter().map(|&i| answers[i].clone()).collect();
            let (ls, rs) = match side {
                Side::Left => (xs, ys.as_slice()),
                Side::Right => (ys.as_slice(), xs),
            };
            if self.point_failure(ls, rs, r)?.is_none() {
                return Ok(Some(ys));
            }
        }
        Ok(None)
    }

    /// A point the spoiler can pick after tuples `ls` (left) and `rs`
    /// (right) are on the table that the duplicator cannot answer:
    /// `(side, tuple, coordinate)`.
    fn point_failure(
        &mut self,
        ls: &[Vec<Elem>],
        rs: &[Vec<Elem>],
        r: usize,
    ) -> Result<Option<(Side, usize, usize)>, GameError> {
        let m = ls[0].len();
        for (t, x) in ls.iter().enumerate() {
            for i in 0..m {
                let mut ok = false;
                for y in rs {
                    if self.wins(x[i], y[i], r - 1)? {
                        ok = true;
                        break;
                    }
                }
                if !ok {
                    return Ok(Some((Side::Left, t, i)));
                }
            }
        }
        for (t, y) in rs.iter().enumerate() {
            for i in 0..m {
                let mut ok = false;
                for x in ls {
                    if self.wins(x[i], y[i], r - 1)? {
                        ok = true;
                        break;
                    }
                }
                if !ok {
                    return Ok(Some((Side::Right, t, i)));
                }
            }
        }
        Ok(None)
    }

    fn show_tuple(&self, side: Side, t: &[Elem]) -> String {
        let i = self.interp(side);
        let names: Vec<&str> = t.iter().map(|&e| i.name(e)).collect();
        format!("({})", names.join(","))
    }

    /// One line of play in which the spoiler wins from `(a, b)`.
    fn spoiler_line(
        &mut self,
        a: Elem,
        b: Elem,
        r: usize,
        round: usize,
        out: &mut Vec<String>,
    ) -> Result<(), GameError> {
        if !self.same_props(a, b) {
            out.push(format!(
                "round {round}: {} and {} differ on propositions",
                self.left.name(a),
                self.right.name(b)
            ));
            return Ok(());
        }
        for side in [Side::Left, Side::Right] {
            let Some((ty, xs)) = self.spoiler_move(side, a, b, r)? else {
                continue;
            };
            let shown: Vec<String> = xs.iter().map(|x| self.show_tuple(side, x)).collect();
            out.push(format!(
                "round {}: spoiler picks {} of type {ty} on the {side}",
                round + 1,
                shown.join(" ")
            ));
            let (own, other) = match side {
                Side::Left => (a, b),
                Side::Right => (b, a),
            };
            let _ = own;
            let theirs = if side == Side::Left { Side::Right } else { Side::Left };
            let answers = self.moves[Self::idx(theirs)][other.index()]
                .get(&ty)
                .cloned()
                .unwrap_or_default();
            let subs = subsets(answers.len(), xs.len());
            let Some(first) = subs.first() else {
                out.push(format!("duplicator has fewer than {} tuples of that type", xs.len()));
                return Ok(());
            };
            // Follow the first answer; every answer loses.
            let ys: Vec<Vec<Elem>> = first.iter().map(|&i| answers[i].clone()).collect();
            let shown: Vec<String> = ys.iter().map(|y| self.show_tuple(theirs, y)).collect();
            out.push(format!("duplicator answers {}", shown.join(" ")));
            let (ls, rs) = match side {
                Side::Left => (xs.clone(), ys),
                Side::Right => (ys, xs.clone()),
            };
            let (pside, t, i) = self.point_failure(&ls, &rs, r)?.expect("the answer loses");
            let (chosen, pool) = match pside {
                Side::Left => (&ls[t], &rs),
                Side::Right => (&rs[t], &ls),
            };
            out.push(format!(
                "spoiler takes coordinate {} of {} on the {pside}",
                i + 1,
                self.show_tuple(pside, chosen)
            ));
            // Continue against the duplicator's first reply.
            let reply = pool[0][i];
            let (na, nb) = match pside {
                Side::Left => (chosen[i], reply),
                Side::Right => (reply, chosen[i]),
            };
            return self.spoiler_line(na, nb, r - 1, round + 1, out);
        }
        unreachable!("spoiler_line is only called on spoiler wins")
    }
}

/// Whether the duplicator survives `rounds` rounds of the grading-`grading`
/// game from `(w in left, w2 in right)`.
pub fn duplicator_wins(
    left: &Interp,
    w: Elem,
    right: &Interp,
    w2: Elem,
    rounds: usize,
    grading: usize,
) -> Result<bool, GameError> {
    Ok(play(left, w, right, w2, rounds, grading, false)?.duplicator_wins)
}

/// Plays the game and, when `trace` is set, describes a line of play.
pub fn play(
    left: &Interp,
    w: Elem,
    right: &Interp,
    w2: Elem,
    rounds: usize,
    grading: usize,
    trace: bool,
) -> Result<GameOutcome, GameError> {
    if w.index() >= left.size() {
        return Err(GameError::UnknownElement(format!("#{}", w.0)));
    }
    if w2.index() >= right.size() {
        return Err(GameError::UnknownElement(format!("#{}", w2.0)));
    }
    let mut s = Solver::new(left, right, grading.max(1))?;
    let won = s.wins(w, w2, rounds)?;
    let line = if !trace {
        String::new()
    } else if won {
        format!("duplicator answers every spoiler move for {rounds} round(s)")
    } else {
        let mut steps = Vec::new();
        s.spoiler_line(w, w2, rounds, 0, &mut steps)?;
        steps.join("; ")
    };
    Ok(GameOutcome {
        duplicator_wins: won,
        trace: line,
    })
}

/// Class labels of the duplicator-win relation on one interpretation:
/// `x` and `y` get the same label iff the duplicator wins from `(x, y)`
/// with `rounds` rounds at grading `grading`.
///
/// Computed by refinement rather than search: the answer to a spoiler
/// set only matters through the classes met at each coordinate, so a point
/// is summarised by the sets of per-coordinate class sets its tuples of
/// each type can realise with `n <= grading` tuples.
pub fn game_classes(interp: &Interp, rounds: usize, grading: usize) -> Vec<usize> {
    let atoms = atoms_of(interp, interp);
    let ps = props(interp, &atoms);
    let mv = moves(interp);
    let mut ids: HashMap<&Vec<bool>, usize> = HashMap::new();
    let mut class: Vec<usize> = ps
        .iter()
        .map(|p| {
            let n = ids.len();
            *ids.entry(p).or_insert(n)
        })
        .collect();
    let base = class.clone();
    type Profile = Vec<BTreeSet<usize>>;
    type Key = (usize, Vec<(RoleType, Vec<BTreeSet<Profile>>)>);
    for _ in 0..rounds {
        let mut ids: HashMap<Key, usize> = HashMap::new();
        let mut next = Vec::with_capacity(class.len());
        for e in 0..interp.size() {
            let mut parts = Vec::new();
            for (ty, tuples) in &mv[e] {
                let per_n: Vec<BTreeSet<Profile>> = (1..=grading.max(1).min(tuples.len()))
                    .map(|n| {
                        subsets(tuples.len(), n)
                            .into_iter()
                            .map(|pick| {
                                let m = tuples[0].len();
                                (0..m)
                                    .map(|i| pick.iter().map(|&t| class[tuples[t][i].index()]).collect())
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                parts.push((ty.clone(), per_n));
            }
            let key = (base[e], parts);
            let n = ids.len();
            next.push(*ids.entry(key).or_insert(n));
        }
        let stable = ids.len() == class.iter().collect::<BTreeSet<_>>().len();
        class = next;
        if stable {
            break;
        }
    }
    class
}

/// Words realising each permutation of arity `m` once, except that the
/// single letters `p` and `s` are both kept at arity 2.
fn role_words(m: usize) -> Vec<PermWord> {
    let mut out = vec![PermWord::empty()];
    if m >= 2 {
        out.push(PermWord::from_ops([PermOp::P]));
        out.push(PermWord::from_ops([PermOp::S]));
    }
    let mut seen: BTreeSet<Permutation> = out.iter().map(|w| perm_of_word(w, m)).collect();
    for (w, perm) in all_permutations(m) {
        if seen.insert(perm) {
            out.push(w);
        }
    }
    out
}

/// Concepts of modal depth at most `depth` with every grade at most
/// `grading`, up to the Boolean layer.
///
/// Basic concepts of depth `d` are the atoms and every `>=n R^w.(C2, ...)`
/// with `n <= grading`, `w` ranging over one word per permutation (plus
/// both one-letter words), and arguments drawn from the argument pool of
/// depth `d - 1`. The pool of a depth consists of `top`, `bot`, literals
/// over its basic concepts and conjunctions of two literals that are
/// neither equal nor complementary. The output is `top`, `bot` and every
/// literal over the basic concepts of depth `depth`: two points agree on
/// all Boolean combinations of these iff they agree on the literals.
pub fn enumerate_concepts(
    sig: &Signature,
    depth: usize,
    grading: u64,
    budget: usize,
) -> Result<Vec<Concept>, GameError> {
    let atoms: Vec<Concept> = sig.concepts().map(Concept::atomic).collect();
    let roles: Vec<(String, usize, Vec<PermWord>)> =
        sig.roles().map(|(r, n)| (r.to_string(), n, role_words(n))).collect();
    let check = |n: usize| {
        if n > budget {
            Err(GameError::Budget(budget))
        } else {
            Ok(())
        }
    };
    let mut basics = atoms.clone();
    for _ in 0..depth {
        let pool = boolean_pool(&basics);
        check(pool.len())?;
        let mut next = atoms.clone();
        for (name, arity, words) in &roles {
            let combos = (pool.len() as u128).checked_pow(*arity as u32 - 1).unwrap_or(u128::MAX);
            check(
                (next.len() as u128 + combos * words.len() as u128 * u128::from(grading)).min(usize::MAX as u128)
                    as usize,
            )?;
            for w in words {
                let role = RoleExpr::new(name.clone(), *arity, w.clone());
                for args in tuples_over(&pool, arity - 1) {
                    for k in 1..=grading {
                        next.push(Concept::at_least(k, role.clone(), args.clone()));
                    }
                }
            }
        }
        check(next.len())?;
        basics = next;
    }
    let mut out = vec![Concept::Top, Concept::Bot];
    for b in basics {
        out.push(Concept::not(b.clone()));
        out.push(b);
    }
    check(out.len())?;
    Ok(out)
}

fn boolean_pool(basics: &[Concept]) -> Vec<Concept> {
    let lits: Vec<(usize, bool, Concept)> = basics
        .iter()
        .enumerate()
        .flat_map(|(i, b)| [(i, true, b.clone()), (i, false, Concept::not(b.clone()))])
        .collect();
    let mut out = vec![Concept::Top, Concept::Bot];
    out.extend(lits.iter().map(|(_, _, c)| c.clone()));
    for (x, (i, _, a)) in lits.iter().enumerate() {
        for (j, _, b) in &lits[x + 1..] {
            if i != j {
                out.push(Concept::and(a.clone(), b.clone()));
            }
        }
    }
    out
}

fn tuples_over(pool: &[Concept], n: usize) -> Vec<Vec<Concept>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                pool.iter().map(move |c| {
                    let mut t = t.clone();
                    t.push(c.clone());
                    t
                })
            })
            .collect();
    }
    out
}
