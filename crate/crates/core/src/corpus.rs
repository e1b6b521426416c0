//! Seeded random generators for concepts and terms, shared by tests,
//! benchmarks and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::{AlcqiConcept, BinRole, Concept, GraTerm, PermOp, PermWord, RoleExpr, Signature};

/// Random ALCQP(p,s) concepts over a fixed signature.
#[derive(Clone, Debug)]
pub struct ConceptGen {
    atoms: Vec<String>,
    roles: Vec<(String, usize)>,
    pub max_depth: usize,
    pub max_grade: u64,
    /// Upper bound on the number of connectives per sample.
    pub fuel: usize,
    /// Whether permutation words may decorate roles.
    pub permute: bool,
}

impl ConceptGen {
    pub fn new(sig: &Signature, max_depth: usize, max_grade: u64) -> Self {
        ConceptGen {
            atoms: sig.concepts().map(str::to_string).collect(),
            roles: sig.roles().map(|(r, n)| (r.to_string(), n)).collect(),
            max_depth,
            max_grade: max_grade.max(1),
            fuel: 6,
            permute: true,
        }
    }

    /// ALC over the binary roles of `sig`: grade 1, no permutations.
    pub fn alc(sig: &Signature, max_depth: usize) -> Self {
        let mut g = Self::new(sig, max_depth, 1);
        g.roles.retain(|(_, n)| *n == 2);
        g.permute = false;
        g
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Concept {
        let mut fuel = self.fuel;
        self.node(rng, self.max_depth, &mut fuel)
    }

    fn literal(&self, rng: &mut impl Rng) -> Concept {
        let base = if self.atoms.is_empty() || rng.gen_bool(0.1) {
            if rng.gen_bool(0.5) {
                Concept::Top
            } else {
                Concept::Bot
            }
        } else {
            Concept::atomic(self.atoms.choose(rng).expect("nonempty").clone())
        };
        if rng.gen_bool(0.4) {
            Concept::not(base)
        } else {
            base
        }
    }

    fn node(&self, rng: &mut impl Rng, depth: usize, fuel: &mut usize) -> Concept {
        if *fuel == 0 || rng.gen_bool(0.2) {
            return self.literal(rng);
        }
        *fuel -= 1;
        let modal = depth > 0 && !self.roles.is_empty();
        match rng.gen_range(0..if modal { 5 } else { 2 }) {
            0 => Concept::and(self.node(rng, depth, fuel), self.node(rng, depth, fuel)),
            1 => Concept::not(self.node(rng, depth, fuel)),
            _ => {
                let (name, arity) = self.roles.choose(rng).expect("nonempty").clone();
                let word = if self.permute {
                    let len = rng.gen_range(0..=3);
                    PermWord::from_ops((0..len).map(|_| if rng.gen_bool(0.5) { PermOp::P } else { PermOp::S }))
                } else {
                    PermWord::empty()
                };
                let k = rng.gen_range(1..=self.max_grade);
                let args = (1..arity).map(|_| self.node(rng, depth - 1, fuel)).collect();
                Concept::at_least(k, RoleExpr::new(name, arity, word), args)
            }
        }
    }
}

/// Systematically unsatisfiable or borderline counting patterns: a lower
/// bound next to a capped upper bound over related fillers, possibly
/// through permuted views of the same role.
pub fn counting_pattern(rng: &mut impl Rng, gen: &ConceptGen) -> Concept {
    let (name, arity) = gen.roles.choose(rng).expect("a role").clone();
    let atom = |rng: &mut dyn rand::RngCore| -> Concept {
        match gen.atoms.choose(rng) {
            Some(a) => Concept::atomic(a.clone()),
            None => Concept::Top,
        }
    };
    let word = |rng: &mut dyn rand::RngCore| {
        if gen.permute && rng.gen_bool(0.5) {
            PermWord::from_ops((0..rng.gen_range(1..=2)).map(|_| if rng.gen_bool(0.5) { PermOp::P } else { PermOp::S }))
        } else {
            PermWord::empty()
        }
    };
    let a = atom(rng);
    let k = rng.gen_range(1..=gen.max_grade);
    let role = RoleExpr::new(name.clone(), arity, PermWord::empty());
    let mut narrow: Vec<Concept> = (1..arity).map(|_| Concept::Top).collect();
    narrow[0] = a.clone();
    let wide: Vec<Concept> = (1..arity).map(|_| Concept::Top).collect();
    match rng.gen_range(0..4) {
        // >=k R.(A, ...) and <k' R.(top, ...) with k' around k.
        0 => {
            let j = rng.gen_range(1..=k);
            Concept::and(
                Concept::at_least(k, role.clone(), narrow),
                Concept::not(Concept::at_least(j, role, wide)),
            )
        }
        // Split witnesses: >=k R.(A, ..) and >=k R.(not A, ..) against a
        // cap on all tuples.
        1 => {
            let mut neg = narrow.clone();
            neg[0] = Concept::not(a);
            let cap = rng.gen_range(k..=2 * k + 1);
            Concept::and_all([
                Concept::at_least(k, role.clone(), narrow),
                Concept::at_least(k, role.clone(), neg),
                Concept::not(Concept::at_least(cap, role, wide)),
            ])
        }
        // A permuted view that must see the same tuples.
        2 => {
            let view = RoleExpr::new(name, arity, word(rng));
            Concept::and_all([
                a.clone(),
                Concept::at_least(k, role, narrow),
                Concept::not(Concept::at_least(
                    1,
                    view,
                    wide.iter().map(|_| Concept::not(a.clone())).collect(),
                )),
            ])
        }
        // Box against diamond with a nested restriction.
        _ => {
            let shallow = ConceptGen {
                max_depth: gen.max_depth.saturating_sub(1),
                ..gen.clone()
            };
            let inner = shallow.sample(rng);
            let mut args = wide.clone();
            args[arity - 2] = inner.clone();
            let mut boxed = wide;
            boxed[arity - 2] = Concept::not(inner);
            Concept::and(
                Concept::at_least(k, role.clone(), args),
                Concept::not(Concept::at_least(1, role, boxed)),
            )
        }
    }
}

/// Random ALCQI concepts over binary role names.
#[derive(Clone, Debug)]
pub struct AlcqiGen {
    pub atoms: Vec<String>,
    pub roles: Vec<String>,
    pub max_depth: usize,
    pub max_grade: u64,
    pub fuel: usize,
}

impl AlcqiGen {
    pub fn sample(&self, rng: &mut impl Rng) -> AlcqiConcept {
        let mut fuel = self.fuel;
        self.node(rng, self.max_depth, &mut fuel)
    }

    fn node(&self, rng: &mut impl Rng, depth: usize, fuel: &mut usize) -> AlcqiConcept {
        if *fuel == 0 || rng.gen_bool(0.2) {
            let a = AlcqiConcept::atomic(self.atoms.choose(rng).expect("an atom").clone());
            return if rng.gen_bool(0.4) { AlcqiConcept::not(a) } else { a };
        }
        *fuel -= 1;
        match rng.gen_range(0..if depth > 0 { 5 } else { 2 }) {
            0 => AlcqiConcept::and(self.node(rng, depth, fuel), self.node(rng, depth, fuel)),
            1 => AlcqiConcept::not(self.node(rng, depth, fuel)),
            _ => {
                let name = self.roles.choose(rng).expect("a role").clone();
                let role = if rng.gen_bool(0.5) {
                    BinRole::forward(name)
                } else {
                    BinRole::inverse(name)
                };
                let k = rng.gen_range(1..=self.max_grade.max(1));
                AlcqiConcept::at_least(k, role, self.node(rng, depth - 1, fuel))
            }
        }
    }
}

/// Random terms built from unary and binary atoms with `neg1` and `cap1`,
/// of size at most `max_size`.
pub fn gra2_term(rng: &mut impl Rng, unary: &[String], binary: &[String], max_size: usize) -> GraTerm {
    let size = rng.gen_range(1..=max_size.max(1));
    gra2_sized(rng, unary, binary, size)
}

fn gra2_sized(rng: &mut impl Rng, unary: &[String], binary: &[String], size: usize) -> GraTerm {
    if size <= 1 {
        let pool: Vec<&String> = unary.iter().chain(binary).collect();
        return GraTerm::atom((*pool.choose(rng).expect("an atom")).clone());
    }
    if size == 2 || rng.gen_bool(0.3) {
        return GraTerm::neg1(gra2_sized(rng, unary, binary, size - 1));
    }
    let left = rng.gen_range(1..size - 1);
    GraTerm::cap1(
        gra2_sized(rng, unary, binary, left),
        gra2_sized(rng, unary, binary, size - 1 - left),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sig() -> Signature {
        Signature::new()
            .with_concept("A")
            .with_concept("B")
            .with_role("R", 3)
            .with_role("S", 2)
    }

    #[test]
    fn samples_respect_limits() {
        let gen = ConceptGen::new(&sig(), 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let c = gen.sample(&mut rng);
            assert!(c.modal_depth() <= 2);
            c.visit(&mut |d| {
                if let Concept::AtLeast { k, .. } = d {
                    assert!(k.to_u64().unwrap() <= 3);
                }
            });
            let p = counting_pattern(&mut rng, &gen);
            assert!(p.modal_depth() <= 2);
        }
    }

    #[test]
    fn alc_samples_are_plain() {
        let gen = ConceptGen::alc(&sig(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            gen.sample(&mut rng).visit(&mut |d| {
                if let Concept::AtLeast { k, role, .. } = d {
                    assert_eq!(k.to_u64(), Some(1));
                    assert_eq!(role.arity, 2);
                    assert!(role.word.is_empty());
                }
            });
        }
    }

    #[test]
    fn gra2_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (u, b) = (vec!["A".to_string()], vec!["R".to_string()]);
        for _ in 0..200 {
            assert!(gra2_term(&mut rng, &u, &b, 6).size() <= 6);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let gen = ConceptGen::new(&sig(), 2, 3);
        let a: Vec<_> = (0..20).map(|i| gen.sample(&mut ChaCha8Rng::seed_from_u64(i))).collect();
        let b: Vec<_> = (0..20).map(|i| gen.sample(&mut ChaCha8Rng::seed_from_u64(i))).collect();
        assert_eq!(a, b);
    }
}
