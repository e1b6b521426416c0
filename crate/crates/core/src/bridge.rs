//! Translations between ALC over binary roles and the algebra fragment
//! built from unary and binary atoms with `neg1` and `cap1`.

use std::fmt;

use thiserror::Error;

use crate::syntax::{Concept, GraTerm, RoleExpr, Signature, BOT_NAME, TOP_NAME};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BridgeError {
    #[error("not an ALC concept: {0}")]
    NotAlc(String),
    #[error("operator `{0}` is outside the neg1/cap1 fragment")]
    Operator(&'static str),
    #[error("relation symbol `{0}` is not declared")]
    Undeclared(String),
    #[error("relation symbol `{atom}` has arity {arity}; only unary and binary atoms are allowed")]
    AtomArity { atom: String, arity: usize },
}

/// An ALC concept or a bare binary role name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlcExpr {
    Concept(Concept),
    Role(String),
}

impl fmt::Display for AlcExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlcExpr::Concept(c) => write!(f, "{c}"),
            AlcExpr::Role(r) => write!(f, "{r}"),
        }
    }
}

impl AlcExpr {
    pub fn kind(&self) -> &'static str {
        match self {
            AlcExpr::Concept(_) => "concept",
            AlcExpr::Role(_) => "role",
        }
    }
}

/// The translation into the algebra.
pub fn to_gra(e: &AlcExpr) -> Result<GraTerm, BridgeError> {
    match e {
        AlcExpr::Concept(c) => concept_to_gra(c),
        AlcExpr::Role(r) => Ok(GraTerm::atom(r.clone())),
    }
}

pub fn concept_to_gra(c: &Concept) -> Result<GraTerm, BridgeError> {
    Ok(match c {
        Concept::Top => GraTerm::atom(TOP_NAME),
        Concept::Bot => GraTerm::atom(BOT_NAME),
        Concept::Atomic(a) => GraTerm::atom(a.clone()),
        Concept::Not(x) => GraTerm::neg1(concept_to_gra(x)?),
        Concept::And(a, b) => GraTerm::cap1(concept_to_gra(a)?, concept_to_gra(b)?),
        Concept::AtLeast { k, role, args } => {
            if k.to_u64() != Some(1) {
                return Err(BridgeError::NotAlc(format!("grade {k} in `{c}`")));
            }
            if role.arity != 2 {
                return Err(BridgeError::NotAlc(format!(
                    "role `{}` has arity {}",
                    role.name, role.arity
                )));
            }
            if !role.word.is_empty() {
                return Err(BridgeError::NotAlc(format!("permuted role `{role}`")));
            }
            GraTerm::cap1(GraTerm::atom(role.name.clone()), concept_to_gra(&args[0])?)
        }
    })
}

/// The translation back, by case analysis on the arity of subterms.
/// Concept names and the built-ins are unary; roles take their arity from
/// `sig`.
pub fn to_alc(t: &GraTerm, sig: &Signature) -> Result<AlcExpr, BridgeError> {
    Ok(match t {
        GraTerm::Atom(name) => match sig.atom_arity(name) {
            None => return Err(BridgeError::Undeclared(name.clone())),
            Some(1) => AlcExpr::Concept(match name.as_str() {
                TOP_NAME => Concept::Top,
                BOT_NAME => Concept::Bot,
                _ => Concept::atomic(name.clone()),
            }),
            Some(2) => AlcExpr::Role(name.clone()),
            Some(arity) => {
                return Err(BridgeError::AtomArity {
                    atom: name.clone(),
                    arity,
                })
            }
        },
        GraTerm::Neg1(u) => match to_alc(u, sig)? {
            AlcExpr::Concept(c) => AlcExpr::Concept(Concept::not(c)),
            AlcExpr::Role(_) => AlcExpr::Concept(Concept::Bot),
        },
        GraTerm::Cap1(a, b) => AlcExpr::Concept(match (to_alc(a, sig)?, to_alc(b, sig)?) {
            (AlcExpr::Concept(x), AlcExpr::Concept(y)) => Concept::and(x, y),
            (AlcExpr::Role(_), AlcExpr::Role(_)) => Concept::Bot,
            (AlcExpr::Role(r), AlcExpr::Concept(c)) | (AlcExpr::Concept(c), AlcExpr::Role(r)) => {
                Concept::at_least(1, RoleExpr::atomic(r, 2), vec![c])
            }
        }),
        GraTerm::Eq => return Err(BridgeError::Operator("e")),
        GraTerm::P(_) => return Err(BridgeError::Operator("p")),
        GraTerm::S(_) => return Err(BridgeError::Operator("s")),
        GraTerm::I(_) => return Err(BridgeError::Operator("I")),
        GraTerm::Neg(_) => return Err(BridgeError::Operator("neg")),
        GraTerm::Join(..) => return Err(BridgeError::Operator("join")),
        GraTerm::Ex(_) => return Err(BridgeError::Operator("ex")),
        GraTerm::DotCap(..) => return Err(BridgeError::Operator("dotcap")),
        GraTerm::Ex1(_) => return Err(BridgeError::Operator("ex1")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{gra2_term, ConceptGen};
    use crate::gra::{arity_of_term, as_elem_set, eval_term, EvalEnv};
    use crate::model::random_interp;
    use crate::semantics::check_concept;
    use crate::syntax::{parse_concept, parse_gra};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sig() -> Signature {
        Signature::new()
            .with_concept("A")
            .with_concept("B")
            .with_role("R", 2)
            .with_role("S", 2)
    }

    fn concept(text: &str) -> AlcExpr {
        AlcExpr::Concept(parse_concept(text, &sig()).unwrap())
    }

    #[test]
    fn to_gra_examples() {
        assert_eq!(to_gra(&concept("E R.(A)")).unwrap(), parse_gra("cap1(R, A)").unwrap());
        assert_eq!(
            to_gra(&concept("not (A and B)")).unwrap(),
            parse_gra("neg1(cap1(A, B))").unwrap()
        );
        assert_eq!(to_gra(&AlcExpr::Role("R".into())).unwrap(), GraTerm::atom("R"));
        assert_eq!(
            to_gra(&concept("top and bot")).unwrap(),
            parse_gra("cap1(top, bot)").unwrap()
        );
    }

    #[test]
    fn to_gra_rejects_non_alc() {
        assert!(matches!(to_gra(&concept(">=2 R.(A)")), Err(BridgeError::NotAlc(_))));
        assert!(matches!(to_gra(&concept("E R^s.(A)")), Err(BridgeError::NotAlc(_))));
        let tern = parse_concept("E T.(A, B)", &Signature::new().with_role("T", 3)).unwrap();
        assert!(matches!(to_gra(&AlcExpr::Concept(tern)), Err(BridgeError::NotAlc(_))));
    }

    #[test]
    fn to_alc_examples() {
        let s = |t: &str| to_alc(&parse_gra(t).unwrap(), &sig()).unwrap();
        assert_eq!(s("cap1(R, A)"), concept("E R.(A)"));
        assert_eq!(s("cap1(A, R)"), concept("E R.(A)"));
        assert_eq!(s("neg1(R)"), AlcExpr::Concept(Concept::Bot));
        assert_eq!(s("cap1(R, S)"), AlcExpr::Concept(Concept::Bot));
        assert_eq!(s("R"), AlcExpr::Role("R".into()));
        assert_eq!(s("neg1(cap1(A, top))"), concept("not (A and top)"));
    }

    #[test]
    fn to_alc_errors() {
        let s = |t: &str, sig: &Signature| to_alc(&parse_gra(t).unwrap(), sig);
        assert_eq!(s("ex1(R)", &sig()), Err(BridgeError::Operator("ex1")));
        assert_eq!(s("cap1(e, A)", &sig()), Err(BridgeError::Operator("e")));
        assert_eq!(s("neg1(Q)", &sig()), Err(BridgeError::Undeclared("Q".into())));
        let t = Signature::new().with_role("T", 3);
        assert_eq!(
            s("neg1(T)", &t),
            Err(BridgeError::AtomArity {
                atom: "T".into(),
                arity: 3
            })
        );
    }

    proptest! {
        #[test]
        fn translations_preserve_extensions(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let i = random_interp(seed, 4, &sig(), 0.4);
            let env = EvalEnv::new(&i);
            let c = ConceptGen::alc(&sig(), 3).sample(&mut rng);
            let t = concept_to_gra(&c).unwrap();
            prop_assert_eq!(arity_of_term(&t, &sig()).unwrap(), 1);
            let ext = as_elem_set(&eval_term(&t, &env).unwrap(), i.size()).unwrap();
            prop_assert_eq!(&ext, &check_concept(&c, &i).unwrap());
            let AlcExpr::Concept(back) = to_alc(&t, &sig()).unwrap() else {
                panic!("a concept translates to a concept");
            };
            prop_assert_eq!(check_concept(&back, &i).unwrap(), ext);

            let (u, b) = (vec!["A".to_string(), "B".to_string()], vec!["R".to_string(), "S".to_string()]);
            let term = gra2_term(&mut rng, &u, &b, 6);
            let val = eval_term(&term, &env).unwrap();
            match to_alc(&term, &sig()).unwrap() {
                AlcExpr::Concept(c) => {
                    prop_assert_eq!(val.arity(), 1);
                    prop_assert_eq!(as_elem_set(&val, i.size()).unwrap(), check_concept(&c, &i).unwrap());
                }
                AlcExpr::Role(r) => prop_assert_eq!(&val, i.role(&r).unwrap()),
            }
        }
    }
}
