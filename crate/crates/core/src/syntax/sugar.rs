//! Surface syntax with shorthands, and their expansion into core concepts.

use super::ast::{AlcqiConcept, BinRole, Concept, Grade, RoleExpr};

/// Counting prefix of a restriction as written by the user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quantifier {
    AtLeast(Grade),
    Less(Grade),
    Exactly(Grade),
    Exists,
    Forall,
}

/// A concept that may still contain `E`, `A`, `<k` and `=k` shorthands.
/// `R` is the role type of the language (ALCQP roles or ALCQI roles).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Surface<R> {
    Top,
    Bot,
    Atomic(String),
    Not(Box<Surface<R>>),
    And(Box<Surface<R>>, Box<Surface<R>>),
    Restrict {
        quant: Quantifier,
        role: R,
        args: Vec<Surface<R>>,
    },
}

impl<R> Surface<R> {
    pub fn visit(&self, f: &mut impl FnMut(&Surface<R>)) {
        f(self);
        match self {
            Surface::Top | Surface::Bot | Surface::Atomic(_) => {}
            Surface::Not(c) => c.visit(f),
            Surface::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Surface::Restrict { args, .. } => args.iter().for_each(|a| a.visit(f)),
        }
    }
}

/// Rewrites shorthands into `>=`, `not` and `and`:
///
/// * `E R.(Cs)` becomes `>=1 R.(Cs)`
/// * `<k R.(Cs)` becomes `not >=k R.(Cs)`
/// * `A R.(C2, ..., Cn)` becomes `not >=1 R.(not C2, ..., not Cn)`
/// * `=k R.(Cs)` becomes `>=k R.(Cs) and not >=(k+1) R.(Cs)`
pub fn expand_shorthand(c: &Surface<RoleExpr>) -> Concept {
    expand_with(c, &mut |k, role: &RoleExpr, args| Concept::AtLeast {
        k,
        role: role.clone(),
        args,
    })
}

/// The same expansion for ALCQI concepts.
pub fn expand_alcqi(c: &Surface<BinRole>) -> AlcqiConcept {
    expand_alcqi_inner(c)
}

fn expand_with<R>(c: &Surface<R>, mk: &mut impl FnMut(Grade, &R, Vec<Concept>) -> Concept) -> Concept {
    match c {
        Surface::Top => Concept::Top,
        Surface::Bot => Concept::Bot,
        Surface::Atomic(n) => Concept::Atomic(n.clone()),
        Surface::Not(x) => Concept::not(expand_with(x, mk)),
        Surface::And(a, b) => Concept::and(expand_with(a, mk), expand_with(b, mk)),
        Surface::Restrict { quant, role, args } => {
            let plain: Vec<Concept> = args.iter().map(|a| expand_with(a, mk)).collect();
            match quant {
                Quantifier::AtLeast(k) => mk(k.clone(), role, plain),
                Quantifier::Exists => mk(Grade::one(), role, plain),
                Quantifier::Less(k) => Concept::not(mk(k.clone(), role, plain)),
                Quantifier::Forall => {
                    let negated = plain.into_iter().map(Concept::not).collect();
                    Concept::not(mk(Grade::one(), role, negated))
                }
                Quantifier::Exactly(k) => Concept::and(
                    mk(k.clone(), role, plain.clone()),
                    Concept::not(mk(k.succ(), role, plain)),
                ),
            }
        }
    }
}

fn expand_alcqi_inner(c: &Surface<BinRole>) -> AlcqiConcept {
    match c {
        Surface::Top => AlcqiConcept::Top,
        Surface::Bot => AlcqiConcept::Bot,
        Surface::Atomic(n) => AlcqiConcept::Atomic(n.clone()),
        Surface::Not(x) => AlcqiConcept::not(expand_alcqi_inner(x)),
        Surface::And(a, b) => AlcqiConcept::and(expand_alcqi_inner(a), expand_alcqi_inner(b)),
        Surface::Restrict { quant, role, args } => {
            debug_assert_eq!(args.len(), 1);
            let filler = expand_alcqi_inner(&args[0]);
            let role = role.clone();
            match quant {
                Quantifier::AtLeast(k) => AlcqiConcept::at_least(k.clone(), role, filler),
                Quantifier::Exists => AlcqiConcept::some(role, filler),
                Quantifier::Less(k) => AlcqiConcept::not(AlcqiConcept::at_least(k.clone(), role, filler)),
                Quantifier::Forall => AlcqiConcept::all(role, filler),
                Quantifier::Exactly(k) => AlcqiConcept::exactly(k.clone(), role, filler),
            }
        }
    }
}
