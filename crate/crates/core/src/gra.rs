//! Relation operators and evaluation of algebra terms over an
//! interpretation.

use thiserror::Error;

use crate::model::{all_tuples, ArityRel, Elem, ElemSet, Interp};
use crate::syntax::{GraTerm, Signature, BOT_NAME, TOP_NAME};

/// Default cap on materialized complement size.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraError {
    #[error("undeclared relation symbol `{0}`")]
    UndeclaredAtom(String),
    #[error("complement of arity {arity} over {domain} elements exceeds the budget of {budget} tuples")]
    Budget { arity: usize, domain: usize, budget: u64 },
}

/// Moves the last coordinate of every tuple to the front.
pub fn apply_p(r: &ArityRel) -> ArityRel {
    if r.arity() < 2 {
        return r.clone();
    }
    ArityRel::from_tuples(
        r.arity(),
        r.tuples().map(|t| {
            let mut v = t.to_vec();
            v.rotate_right(1);
            v
        }),
    )
}

/// Swaps the last two coordinates of every tuple.
pub fn apply_s(r: &ArityRel) -> ArityRel {
    let n = r.arity();
    if n < 2 {
        return r.clone();
    }
    ArityRel::from_tuples(
        n,
        r.tuples().map(|t| {
            let mut v = t.to_vec();
            v.swap(n - 2, n - 1);
            v
        }),
    )
}

/// Keeps tuples whose last two coordinates agree and drops the last one.
pub fn apply_i(r: &ArityRel) -> ArityRel {
    let n = r.arity();
    if n < 2 {
        return r.clone();
    }
    ArityRel::from_tuples(
        n - 1,
        r.tuples().filter(|t| t[n - 2] == t[n - 1]).map(|t| t[..n - 1].to_vec()),
    )
}

fn check_budget(arity: usize, domain: usize, budget: u64) -> Result<(), GraError> {
    let within = u32::try_from(arity)
        .ok()
        .and_then(|a| (domain as u64).checked_pow(a))
        .is_some_and(|total| total <= budget);
    if within {
        Ok(())
    } else {
        Err(GraError::Budget { arity, domain, budget })
    }
}

/// `A^k \ R` over a domain of the given size.
pub fn complement(r: &ArityRel, domain: usize, budget: u64) -> Result<ArityRel, GraError> {
    check_budget(r.arity(), domain, budget)?;
    Ok(ArityRel::from_tuples(
        r.arity(),
        all_tuples(domain, r.arity()).filter(|t| !r.contains(t)),
    ))
}

/// Cartesian product.
pub fn join(r: &ArityRel, s: &ArityRel) -> ArityRel {
    let mut out = ArityRel::empty(r.arity() + s.arity());
    for a in r.tuples() {
        for b in s.tuples() {
            out.insert([a, b].concat());
        }
    }
    out
}

/// Existential projection of the last coordinate; identity on arity 0.
pub fn project(r: &ArityRel) -> ArityRel {
    let n = r.arity();
    if n == 0 {
        return r.clone();
    }
    ArityRel::from_tuples(n - 1, r.tuples().map(|t| t[..n - 1].to_vec()))
}

/// The diagonal `{(a, a)}`.
pub fn equality_rel(domain: usize) -> ArityRel {
    ArityRel::from_tuples(2, (0..domain).map(|i| vec![Elem::from(i); 2]))
}

/// Suffix intersection: tuples of length `max(k, l)` whose length-`k`
/// suffix is in `r` and whose length-`l` suffix is in `s`.
pub fn suffix_intersect(r: &ArityRel, s: &ArityRel) -> ArityRel {
    let (long, short) = if r.arity() >= s.arity() { (r, s) } else { (s, r) };
    let cut = long.arity() - short.arity();
    ArityRel::from_tuples(
        long.arity(),
        long.tuples()
            .filter(|t| short.contains(&t[cut..]))
            .map(<[Elem]>::to_vec),
    )
}

/// One-dimensional projection: first coordinates, or identity on arity at
/// most one.
pub fn project1(r: &ArityRel) -> ArityRel {
    if r.arity() <= 1 {
        return r.clone();
    }
    ArityRel::from_tuples(1, r.tuples().map(|t| vec![t[0]]))
}

/// Unary intersection.
pub fn cap1(r: &ArityRel, s: &ArityRel) -> ArityRel {
    if r.arity().min(s.arity()) <= 1 {
        project1(&suffix_intersect(r, s))
    } else {
        ArityRel::empty(1)
    }
}

/// Unary negation.
pub fn neg1(r: &ArityRel, domain: usize) -> ArityRel {
    if r.arity() <= 1 {
        complement(r, domain, u64::MAX).expect("arity at most one")
    } else {
        ArityRel::empty(1)
    }
}

/// Evaluation context: the structure plus the complement budget.
#[derive(Clone, Copy, Debug)]
pub struct EvalEnv<'a> {
    pub interp: &'a Interp,
    pub budget: u64,
}

impl<'a> EvalEnv<'a> {
    pub fn new(interp: &'a Interp) -> Self {
        EvalEnv {
            interp,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    fn atom(&self, name: &str) -> Result<ArityRel, GraError> {
        let i = self.interp;
        if let Some(r) = i.role(name) {
            Ok(r.clone())
        } else if let Some(c) = i.concept(name) {
            Ok(ArityRel::unary(c))
        } else if name == TOP_NAME {
            Ok(ArityRel::unary(&i.full()))
        } else if name == BOT_NAME {
            Ok(ArityRel::empty(1))
        } else {
            Err(GraError::UndeclaredAtom(name.to_string()))
        }
    }
}

/// Static arity of a term.
pub fn arity_of_term(t: &GraTerm, sig: &Signature) -> Result<usize, GraError> {
    let ar = |u: &GraTerm| arity_of_term(u, sig);
    Ok(match t {
        GraTerm::Atom(n) => sig.atom_arity(n).ok_or_else(|| GraError::UndeclaredAtom(n.clone()))?,
        GraTerm::Eq => 2,
        GraTerm::P(u) | GraTerm::S(u) | GraTerm::Neg(u) => ar(u)?,
        GraTerm::I(u) => {
            let n = ar(u)?;
            if n >= 2 {
                n - 1
            } else {
                n
            }
        }
        GraTerm::Ex(u) => ar(u)?.saturating_sub(1),
        GraTerm::Join(a, b) => ar(a)? + ar(b)?,
        GraTerm::DotCap(a, b) => ar(a)?.max(ar(b)?),
        GraTerm::Ex1(u) => ar(u)?.min(1),
        GraTerm::Cap1(a, b) => {
            let (k, l) = (ar(a)?, ar(b)?);
            if k.min(l) <= 1 {
                k.max(l).min(1)
            } else {
                1
            }
        }
        GraTerm::Neg1(u) => {
            let n = ar(u)?;
            if n <= 1 {
                n
            } else {
                1
            }
        }
    })
}

/// Bottom-up evaluation of a term.
pub fn eval_term(t: &GraTerm, env: &EvalEnv<'_>) -> Result<ArityRel, GraError> {
    let ev = |u: &GraTerm| eval_term(u, env);
    let n = env.interp.size();
    Ok(match t {
        GraTerm::Atom(name) => env.atom(name)?,
        GraTerm::Eq => equality_rel(n),
        GraTerm::P(u) => apply_p(&ev(u)?),
        GraTerm::S(u) => apply_s(&ev(u)?),
        GraTerm::I(u) => apply_i(&ev(u)?),
        GraTerm::Neg(u) => complement(&ev(u)?, n, env.budget)?,
        GraTerm::Join(a, b) => join(&ev(a)?, &ev(b)?),
        GraTerm::Ex(u) => project(&ev(u)?),
        GraTerm::DotCap(a, b) => suffix_intersect(&ev(a)?, &ev(b)?),
        GraTerm::Ex1(u) => project1(&ev(u)?),
        GraTerm::Cap1(a, b) => cap1(&ev(a)?, &ev(b)?),
        GraTerm::Neg1(u) => neg1(&ev(u)?, n),
    })
}

/// The element set of a relation of arity one.
pub fn as_elem_set(r: &ArityRel, domain: usize) -> Option<ElemSet> {
    (r.arity() == 1).then(|| r.firsts(domain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::random_interp;
    use crate::syntax::parse_gra;
    use proptest::prelude::*;

    fn rel(arity: usize, tuples: &[&[u32]]) -> ArityRel {
        ArityRel::from_tuples(arity, tuples.iter().map(|t| t.iter().map(|e| Elem(*e)).collect()))
    }

    #[test]
    fn p_examples() {
        assert_eq!(apply_p(&rel(3, &[&[1, 2, 3]])), rel(3, &[&[3, 1, 2]]));
        assert_eq!(apply_p(&rel(1, &[&[1]])), rel(1, &[&[1]]));
        assert_eq!(apply_p(&ArityRel::empty(4)), ArityRel::empty(4));
    }

    #[test]
    fn s_examples() {
        assert_eq!(apply_s(&rel(3, &[&[1, 2, 3]])), rel(3, &[&[1, 3, 2]]));
        assert_eq!(apply_s(&rel(2, &[&[1, 2]])), rel(2, &[&[2, 1]]));
        assert_eq!(apply_s(&ArityRel::unit()), ArityRel::unit());
    }

    #[test]
    fn i_examples() {
        assert_eq!(apply_i(&rel(3, &[&[1, 2, 2], &[1, 2, 3]])), rel(2, &[&[1, 2]]));
        assert_eq!(apply_i(&rel(2, &[&[5, 5]])), rel(1, &[&[5]]));
        assert_eq!(apply_i(&rel(1, &[&[1]])), rel(1, &[&[1]]));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(
            complement(&ArityRel::empty(2), 1, DEFAULT_BUDGET).unwrap(),
            rel(2, &[&[0, 0]])
        );
        assert_eq!(
            complement(&rel(1, &[&[0]]), 2, DEFAULT_BUDGET).unwrap(),
            rel(1, &[&[1]])
        );
        assert_eq!(
            complement(&ArityRel::empty(0), 3, DEFAULT_BUDGET).unwrap(),
            ArityRel::unit()
        );
        assert!(matches!(
            complement(&ArityRel::empty(7), 10, DEFAULT_BUDGET),
            Err(GraError::Budget { .. })
        ));
    }

    #[test]
    fn join_examples() {
        assert_eq!(join(&rel(1, &[&[1]]), &rel(2, &[&[2, 3]])), rel(3, &[&[1, 2, 3]]));
        let r = rel(2, &[&[1, 2], &[2, 2]]);
        assert_eq!(join(&r, &ArityRel::unit()), r);
        assert_eq!(join(&r, &ArityRel::empty(3)), ArityRel::empty(5));
    }

    #[test]
    fn project_examples() {
        assert_eq!(project(&rel(2, &[&[1, 2], &[1, 3]])), rel(1, &[&[1]]));
        assert_eq!(project(&rel(1, &[&[1]])), ArityRel::unit());
        assert_eq!(project(&ArityRel::empty(2)), ArityRel::empty(1));
        assert_eq!(project(&ArityRel::empty(0)), ArityRel::empty(0));
    }

    #[test]
    fn equality_examples() {
        let e = equality_rel(2);
        assert_eq!(e, rel(2, &[&[0, 0], &[1, 1]]));
        assert_eq!(apply_s(&e), e);
    }

    #[test]
    fn suffix_intersection_examples() {
        assert_eq!(
            suffix_intersect(&rel(2, &[&[1, 2]]), &rel(1, &[&[2]])),
            rel(2, &[&[1, 2]])
        );
        let a = rel(2, &[&[1, 2], &[2, 2]]);
        let b = rel(2, &[&[2, 2], &[2, 1]]);
        assert_eq!(suffix_intersect(&a, &b), rel(2, &[&[2, 2]]));
        assert_eq!(suffix_intersect(&a, &ArityRel::empty(0)), ArityRel::empty(2));
        assert_eq!(suffix_intersect(&a, &ArityRel::unit()), a);
    }

    #[test]
    fn unary_operator_examples() {
        assert_eq!(project1(&rel(2, &[&[1, 2], &[3, 2]])), rel(1, &[&[1], &[3]]));
        assert_eq!(project1(&rel(1, &[&[1]])), rel(1, &[&[1]]));
        assert_eq!(project1(&ArityRel::empty(3)), ArityRel::empty(1));
        assert_eq!(cap1(&rel(2, &[&[0, 1]]), &rel(1, &[&[1]])), rel(1, &[&[0]]));
        assert_eq!(cap1(&rel(2, &[&[0, 1]]), &rel(2, &[&[0, 1]])), ArityRel::empty(1));
        assert_eq!(neg1(&rel(2, &[&[0, 1]]), 2), ArityRel::empty(1));
    }

    fn sample() -> Interp {
        let mut i = Interp::numbered(3).unwrap();
        i.add_tuple("R", vec![Elem(0), Elem(1)]).unwrap();
        i.add_member("A", Elem(1)).unwrap();
        i.set_role("T", ArityRel::empty(3)).unwrap();
        i.set_role("Q", ArityRel::empty(2)).unwrap();
        i
    }

    #[test]
    fn term_examples() {
        let i = sample();
        let env = EvalEnv::new(&i);
        let ev = |s: &str| eval_term(&parse_gra(s).unwrap(), &env).unwrap();
        assert_eq!(ev("R"), rel(2, &[&[0, 1]]));
        assert_eq!(ev("neg(neg(R))"), rel(2, &[&[0, 1]]));
        assert_eq!(ev("neg(neg(T))"), ArityRel::empty(3));
        assert_eq!(ev("ex1(dotcap(R, A))"), rel(1, &[&[0]]));
        assert_eq!(ev("cap1(R, A)"), ev("ex1(dotcap(R, A))"));
        assert_eq!(ev("top"), rel(1, &[&[0], &[1], &[2]]));
        assert_eq!(ev("bot"), ArityRel::empty(1));
        assert_eq!(
            eval_term(&parse_gra("Z").unwrap(), &env),
            Err(GraError::UndeclaredAtom("Z".into()))
        );
    }

    #[test]
    fn arity_examples() {
        let sig = Signature::new().with_role("R", 2).with_role("S", 3).with_concept("A");
        let ar = |s: &str| arity_of_term(&parse_gra(s).unwrap(), &sig).unwrap();
        assert_eq!(ar("I(S)"), 2);
        assert_eq!(ar("join(R, S)"), 5);
        assert_eq!(ar("cap1(R, R)"), 1);
        assert_eq!(ar("cap1(ex(A), R)"), 1);
        assert_eq!(ar("cap1(ex(A), ex(A))"), 0);
        assert_eq!(ar("neg1(S)"), 1);
        assert_eq!(ar("neg1(ex(A))"), 0);
        assert_eq!(ar("ex(ex(A))"), 0);
        assert_eq!(ar("dotcap(A, S)"), 3);
    }

    /// Pairs of FO atoms and GRA(p,s,I) terms defining the same relation.
    #[test]
    fn atoms_as_terms() {
        let sig = Signature::new().with_role("R", 3).with_role("B", 2);
        type Case = (&'static str, fn(&Interp, &[Elem]) -> bool, usize);
        let cases: &[Case] = &[
            // R(x2, x3, x1)
            ("p(R)", |i, t| i.role("R").unwrap().contains(&[t[1], t[2], t[0]]), 3),
            // R(x1, x2, x2)
            ("I(R)", |i, t| i.role("R").unwrap().contains(&[t[0], t[1], t[1]]), 2),
            // R(x2, x1, x1)
            (
                "s(I(s(R)))",
                |i, t| i.role("R").unwrap().contains(&[t[1], t[0], t[0]]),
                2,
            ),
            // B(x1, x1)
            ("I(B)", |i, t| i.role("B").unwrap().contains(&[t[0], t[0]]), 1),
            // B(x2, x1)
            ("s(B)", |i, t| i.role("B").unwrap().contains(&[t[1], t[0]]), 2),
        ];
        for seed in 0..25 {
            let i = random_interp(seed, 3, &sig, 0.4);
            let env = EvalEnv::new(&i);
            for (term, atom, arity) in cases {
                let got = eval_term(&parse_gra(term).unwrap(), &env).unwrap();
                let want = ArityRel::from_tuples(*arity, all_tuples(3, *arity).filter(|t| atom(&i, t)));
                assert_eq!(got, want, "{term} on seed {seed}");
            }
        }
    }

    fn arb_rel(max_arity: usize, domain: usize) -> impl Strategy<Value = ArityRel> {
        (0..=max_arity).prop_flat_map(move |k| {
            let all: Vec<Vec<Elem>> = all_tuples(domain, k).collect();
            proptest::sample::subsequence(all.clone(), 0..=all.len()).prop_map(move |ts| ArityRel::from_tuples(k, ts))
        })
    }

    proptest! {
        #[test]
        fn rotation_order(r in arb_rel(4, 3)) {
            let mut x = r.clone();
            for _ in 0..r.arity().max(1) {
                x = apply_p(&x);
            }
            prop_assert_eq!(x, r.clone());
            prop_assert_eq!(apply_s(&apply_s(&r)), r);
        }

        #[test]
        fn complement_involution(r in arb_rel(3, 3)) {
            let c = complement(&r, 3, DEFAULT_BUDGET).unwrap();
            prop_assert_eq!(c.len() + r.len(), 3usize.pow(r.arity() as u32));
            prop_assert_eq!(complement(&c, 3, DEFAULT_BUDGET).unwrap(), r);
        }

        #[test]
        fn cap1_is_projected_suffix_intersection(r in arb_rel(3, 3), s in arb_rel(1, 3)) {
            prop_assert_eq!(cap1(&r, &s), project1(&suffix_intersect(&r, &s)));
            prop_assert_eq!(cap1(&s, &r), project1(&suffix_intersect(&s, &r)));
        }
    }
}
