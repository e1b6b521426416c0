//! Model checking for ALCQP(p,s) and ALCQI, and a bounded satisfiability
//! oracle.

mod oracle;
pub mod sat;

use thiserror::Error;

use crate::model::{ArityRel, Interp};
use crate::syntax::{AlcqiConcept, Concept};

pub use crate::model::ElemSet;
pub use oracle::{domain_bound, filtration_bound, oracle_sat, OracleConfig, OracleOutcome, Witness};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("role `{role}` is used with arity {used} but interpreted with arity {interpreted}")]
    ArityMismatch {
        role: String,
        used: usize,
        interpreted: usize,
    },
    #[error("role `{role}` has arity {arity}; ALCQI roles must be binary")]
    NonBinary { role: String, arity: usize },
    #[error("oracle search exceeded its budget of {0} conflicts")]
    Budget(u64),
    #[error("grounding would need {0} candidate role tuples")]
    Grounding(u64),
}

/// The extension of `c` in `interp`. Symbols the interpretation does not
/// mention are read as empty.
pub fn check_concept(c: &Concept, interp: &Interp) -> Result<ElemSet, SemanticsError> {
    Ok(match c {
        Concept::Top => interp.full(),
        Concept::Bot => interp.empty_set(),
        Concept::Atomic(a) => interp.concept(a).cloned().unwrap_or_else(|| interp.empty_set()),
        Concept::Not(x) => check_concept(x, interp)?.complement(),
        Concept::And(a, b) => check_concept(a, interp)?.intersect(&check_concept(b, interp)?),
        Concept::AtLeast { k, role, args } => {
            let fillers = args
                .iter()
                .map(|a| check_concept(a, interp))
                .collect::<Result<Vec<_>, _>>()?;
            let Some(rel) = role_or_empty(interp, &role.name, role.arity)? else {
                return Ok(if k.is_zero() { interp.full() } else { interp.empty_set() });
            };
            let pi = role.permutation();
            let mut counts = vec![0usize; interp.size()];
            for t in rel.tuples() {
                // Output coordinate i of the permuted tuple is t[pi_i].
                let start = t[pi.source(0)];
                if (1..t.len()).all(|i| fillers[i - 1].contains(t[pi.source(i)])) {
                    counts[start.index()] += 1;
                }
            }
            at_least(interp, k, &counts)
        }
    })
}

/// The extension of an ALCQI concept. `F^-` counts predecessors.
pub fn check_alcqi(c: &AlcqiConcept, interp: &Interp) -> Result<ElemSet, SemanticsError> {
    Ok(match c {
        AlcqiConcept::Top => interp.full(),
        AlcqiConcept::Bot => interp.empty_set(),
        AlcqiConcept::Atomic(a) => interp.concept(a).cloned().unwrap_or_else(|| interp.empty_set()),
        AlcqiConcept::Not(x) => check_alcqi(x, interp)?.complement(),
        AlcqiConcept::And(a, b) => check_alcqi(a, interp)?.intersect(&check_alcqi(b, interp)?),
        AlcqiConcept::AtLeast { k, role, filler } => {
            let filler = check_alcqi(filler, interp)?;
            let mut counts = vec![0usize; interp.size()];
            if let Some(rel) = interp.role(&role.name) {
                if rel.arity() != 2 {
                    return Err(SemanticsError::NonBinary {
                        role: role.name.clone(),
                        arity: rel.arity(),
                    });
                }
                let (from, to) = if role.inverse { (1, 0) } else { (0, 1) };
                for t in rel.tuples() {
                    if filler.contains(t[to]) {
                        counts[t[from].index()] += 1;
                    }
                }
            }
            at_least(interp, k, &counts)
        }
    })
}

/// Rejects every non-binary role of an interpretation.
pub fn require_binary(interp: &Interp) -> Result<(), SemanticsError> {
    match interp.roles().find(|(_, r)| r.arity() != 2) {
        Some((name, r)) => Err(SemanticsError::NonBinary {
            role: name.to_string(),
            arity: r.arity(),
        }),
        None => Ok(()),
    }
}

fn role_or_empty<'a>(interp: &'a Interp, name: &str, arity: usize) -> Result<Option<&'a ArityRel>, SemanticsError> {
    match interp.role(name) {
        Some(r) if r.arity() != arity => Err(SemanticsError::ArityMismatch {
            role: name.to_string(),
            used: arity,
            interpreted: r.arity(),
        }),
        other => Ok(other),
    }
}

fn at_least(interp: &Interp, k: &crate::syntax::Grade, counts: &[usize]) -> ElemSet {
    ElemSet::from_elems(
        interp.size(),
        interp.elems().filter(|e| k.reached_by(counts[e.index()])),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_interp, Elem};
    use crate::syntax::{parse_alcqi, parse_concept, parse_concept_infer, RoleExpr, Signature};
    use proptest::prelude::*;

    fn ternary_sample() -> Interp {
        let mut i = Interp::new(["a", "b", "c"]).unwrap();
        i.add_tuple("R", vec![Elem(0), Elem(1), Elem(2)]).unwrap();
        i
    }

    fn names(i: &Interp, s: &ElemSet) -> Vec<String> {
        s.iter().map(|e| i.name(e).to_string()).collect()
    }

    fn check(text: &str, i: &Interp) -> Vec<String> {
        let c = parse_concept(text, &i.signature()).unwrap();
        names(i, &check_concept(&c, i).unwrap())
    }

    #[test]
    fn counting_examples() {
        let i = ternary_sample();
        assert_eq!(check(">=1 R.(top, top)", &i), ["a"]);
        assert_eq!(check(">=1 R^pp.(top, top)", &i), ["b"]);
        assert_eq!(check(">=1 R^p.(top, top)", &i), ["c"]);

        let mut j = Interp::new(["a", "b"]).unwrap();
        j.add_tuple("R", vec![Elem(0), Elem(1)]).unwrap();
        j.add_tuple("R", vec![Elem(0), Elem(0)]).unwrap();
        assert_eq!(check(">=2 R.(top)", &j), ["a"]);
    }

    #[test]
    fn tuples_not_successors_are_counted() {
        // Two tuples from a share the successor vector prefix but differ.
        let mut i = Interp::new(["a", "b", "c"]).unwrap();
        i.add_tuple("R", vec![Elem(0), Elem(1), Elem(1)]).unwrap();
        i.add_tuple("R", vec![Elem(0), Elem(1), Elem(2)]).unwrap();
        assert_eq!(check(">=2 R.(top, top)", &i), ["a"]);
    }

    #[test]
    fn arity_mismatch_reported() {
        let i = ternary_sample();
        let c = Concept::at_least(1, RoleExpr::atomic("R", 2), vec![Concept::Top]);
        assert!(matches!(
            check_concept(&c, &i),
            Err(SemanticsError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn alcqi_examples() {
        let mut i = Interp::new(["a", "b"]).unwrap();
        i.add_tuple("F", vec![Elem(1), Elem(0)]).unwrap();
        let ev = |text: &str, i: &Interp| names(i, &check_alcqi(&parse_alcqi(text).unwrap(), i).unwrap());
        assert_eq!(ev(">=1 F^-.top", &i), ["a"]);
        assert_eq!(ev("not bot", &i), ["a", "b"]);

        let mut j = Interp::new(["a", "b", "c"]).unwrap();
        j.add_tuple("F", vec![Elem(0), Elem(1)]).unwrap();
        j.add_tuple("F", vec![Elem(0), Elem(2)]).unwrap();
        j.add_member("A", Elem(1)).unwrap();
        assert_eq!(ev(">=2 F.top and not >=2 F.A", &j), ["a"]);

        let mut k = Interp::numbered(2).unwrap();
        k.add_tuple("G", vec![Elem(0)]).unwrap();
        assert!(matches!(
            check_alcqi(&parse_alcqi(">=1 G.top").unwrap(), &k),
            Err(SemanticsError::NonBinary { .. })
        ));
    }

    fn random_ternary(seed: u64) -> Interp {
        let sig = Signature::new().with_concept("A").with_concept("B").with_role("R", 3);
        random_interp(seed, 4, &sig, 0.3)
    }

    proptest! {
        #[test]
        fn exists_is_at_least_one(seed in any::<u64>()) {
            let i = random_ternary(seed);
            let (sugar, _) = parse_concept_infer("E R^ps.(A, not B)").unwrap();
            let (core, _) = parse_concept_infer(">=1 R^ps.(A, not B)").unwrap();
            prop_assert_eq!(check_concept(&sugar, &i).unwrap(), check_concept(&core, &i).unwrap());
        }

        #[test]
        fn box_de_morgan(seed in any::<u64>()) {
            let i = random_ternary(seed);
            let (boxed, _) = parse_concept_infer("A R^p.(A, B)").unwrap();
            let (dual, _) = parse_concept_infer("not E R^p.(not A, not B)").unwrap();
            prop_assert_eq!(check_concept(&boxed, &i).unwrap(), check_concept(&dual, &i).unwrap());
        }

        #[test]
        fn grades_are_monotone(seed in any::<u64>(), k in 1u64..6) {
            let i = random_ternary(seed);
            let role = RoleExpr::new("R", 3, crate::syntax::PermWord::parse("sp").unwrap());
            let args = vec![Concept::atomic("A"), Concept::Top];
            let hi = check_concept(&Concept::at_least(k + 1, role.clone(), args.clone()), &i).unwrap();
            let lo = check_concept(&Concept::at_least(k, role, args), &i).unwrap();
            prop_assert!(hi.is_subset(&lo));
        }

        /// Counting through a permuted role agrees with counting source
        /// tuples directly through the coordinate map.
        #[test]
        fn permutation_coherence(seed in any::<u64>(), word in "[ps]{0,5}", k in 1u64..3) {
            let i = random_ternary(seed);
            let role = RoleExpr::new("R", 3, crate::syntax::PermWord::parse(&word).unwrap());
            let pi = role.permutation();
            let c = Concept::at_least(k, role, vec![Concept::atomic("A"), Concept::atomic("B")]);
            let got = check_concept(&c, &i).unwrap();
            let a = i.concept("A").unwrap();
            let b = i.concept("B").unwrap();
            for x in i.elems() {
                let direct = i
                    .role("R")
                    .unwrap()
                    .tuples()
                    .filter(|t| {
                        let v = pi.apply(t);
                        v[0] == x && a.contains(v[1]) && b.contains(v[2])
                    })
                    .count();
                prop_assert_eq!(got.contains(x), direct as u64 >= k);
            }
        }
    }
}
