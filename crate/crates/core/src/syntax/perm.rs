//! Permutation words over the cyclic shift `p` and the swap `s`, and the
//! coordinate maps they induce on tuples of a fixed arity.

use std::collections::{HashSet, VecDeque};
use std::fmt;

/// One letter of a permutation word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PermOp {
    /// Cyclic shift: `(a1, ..., ak)` becomes `(ak, a1, ..., a(k-1))`.
    P,
    /// Swap of the last two coordinates.
    S,
}

impl PermOp {
    pub fn letter(self) -> char {
        match self {
            PermOp::P => 'p',
            PermOp::S => 's',
        }
    }

    /// Applies the operator to a tuple in place. Tuples shorter than two are
    /// left untouched.
    pub fn apply_in_place<T>(self, tuple: &mut [T]) {
        let n = tuple.len();
        if n < 2 {
            return;
        }
        match self {
            PermOp::P => tuple.rotate_right(1),
            PermOp::S => tuple.swap(n - 2, n - 1),
        }
    }
}

/// A finite word over `{p, s}`, applied left to right. The empty word is a
/// valid (identity) word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermWord(Vec<PermOp>);

impl PermWord {
    pub fn empty() -> Self {
        PermWord(Vec::new())
    }

    pub fn from_ops(ops: impl IntoIterator<Item = PermOp>) -> Self {
        PermWord(ops.into_iter().collect())
    }

    /// Parses a string of `p`/`s` letters. Returns `None` on any other
    /// character.
    pub fn parse(letters: &str) -> Option<Self> {
        letters
            .chars()
            .map(|c| match c {
                'p' => Some(PermOp::P),
                's' => Some(PermOp::S),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(PermWord)
    }

    pub fn ops(&self) -> &[PermOp] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, op: PermOp) {
        self.0.push(op);
    }

    /// The word `self` followed by `other`.
    pub fn concat(&self, other: &PermWord) -> PermWord {
        let mut ops = self.0.clone();
        ops.extend_from_slice(&other.0);
        PermWord(ops)
    }
}

impl fmt::Display for PermWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.0 {
            write!(f, "{}", op.letter())?;
        }
        Ok(())
    }
}

/// A bijection on the coordinates of `n`-tuples, stored as a coordinate
/// vector: output position `i` receives the input coordinate `coords[i]`.
///
/// Coordinates are zero-based internally; [`Permutation::one_based`] gives
/// the conventional `(π1, ..., πn)` with values in `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    coords: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            coords: (0..n).collect(),
        }
    }

    /// Builds a permutation from a zero-based coordinate vector, checking
    /// that it is a bijection.
    pub fn from_coords(coords: Vec<usize>) -> Option<Self> {
        let n = coords.len();
        let mut seen = vec![false; n];
        for &c in &coords {
            if c >= n || seen[c] {
                return None;
            }
            seen[c] = true;
        }
        Some(Permutation { coords })
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    /// Zero-based input coordinate that lands at output position `i`.
    pub fn source(&self, i: usize) -> usize {
        self.coords[i]
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.coords.iter().map(|c| c + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().enumerate().all(|(i, &c)| i == c)
    }

    /// Rearranges a tuple: `out[i] = tuple[coords[i]]`.
    pub fn apply<T: Clone>(&self, tuple: &[T]) -> Vec<T> {
        debug_assert_eq!(tuple.len(), self.arity());
        self.coords.iter().map(|&c| tuple[c].clone()).collect()
    }

    /// The permutation obtained by applying `self` first and `next` second.
    pub fn then(&self, next: &Permutation) -> Permutation {
        assert_eq!(self.arity(), next.arity(), "arity mismatch in composition");
        Permutation {
            coords: next.coords.iter().map(|&c| self.coords[c]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut coords = vec![0; self.arity()];
        for (i, &c) in self.coords.iter().enumerate() {
            coords[c] = i;
        }
        Permutation { coords }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.one_based().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The coordinate map realised by applying `word` to a relation of arity `n`.
///
/// For `n < 2` every letter acts as the identity.
pub fn perm_of_word(word: &PermWord, n: usize) -> Permutation {
    // Applying the word to the tuple (0, ..., n-1) yields the coordinate
    // vector directly.
    let mut coords: Vec<usize> = (0..n).collect();
    for op in word.ops() {
        op.apply_in_place(&mut coords);
    }
    Permutation { coords }
}

/// Breadth-first enumeration of the distinct permutations of arity `n`
/// reachable by words of length at most `max_len`, each paired with a
/// shortest word realising it. Results are ordered by word length, then by
/// discovery order (`p` before `s`).
pub fn reachable_permutations(n: usize, max_len: usize) -> Vec<(PermWord, Permutation)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    let start = PermWord::empty();
    seen.insert(perm_of_word(&start, n));
    out.push((start.clone(), perm_of_word(&start, n)));
    queue.push_back(start);
    while let Some(word) = queue.pop_front() {
        if word.len() >= max_len {
            continue;
        }
        for op in [PermOp::P, PermOp::S] {
            let mut next = word.clone();
            next.push(op);
            let perm = perm_of_word(&next, n);
            if seen.insert(perm.clone()) {
                out.push((next.clone(), perm));
                queue.push_back(next);
            }
        }
    }
    out
}

/// All permutations of arity `n` with a shortest generating word each.
pub fn all_permutations(n: usize) -> Vec<(PermWord, Permutation)> {
    // Every element of S_n has a word of length well below n^2 over {p, s}.
    reachable_permutations(n, n * n + 1)
}
