//! Pretty-printers. Output always re-parses to the same AST: conjunction is
//! left-associative, so a conjunction on the right of `and` is parenthesised.

use std::fmt::{self, Display, Formatter};

use super::ast::{AlcqiConcept, BinRole, Concept, GraTerm, RoleExpr};

impl Display for RoleExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.word.is_empty() {
            write!(f, "^{}", self.word)?;
        }
        Ok(())
    }
}

impl Display for BinRole {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if self.inverse {
            write!(f, "^-")?;
        }
        Ok(())
    }
}

/// Shared printing skeleton for both concept languages.
trait Printable {
    fn is_and(&self) -> bool;
    fn write_conj_parts(&self, f: &mut Formatter<'_>) -> Option<fmt::Result>;
    fn write_atomic(&self, f: &mut Formatter<'_>) -> fmt::Result;
}

fn write_top<T: Printable>(c: &T, f: &mut Formatter<'_>) -> fmt::Result {
    match c.write_conj_parts(f) {
        Some(r) => r,
        None => c.write_atomic(f),
    }
}

fn write_unary<T: Printable>(c: &T, f: &mut Formatter<'_>) -> fmt::Result {
    if c.is_and() {
        write!(f, "(")?;
        write_top(c, f)?;
        write!(f, ")")
    } else {
        c.write_atomic(f)
    }
}

impl Printable for Concept {
    fn is_and(&self) -> bool {
        matches!(self, Concept::And(..))
    }

    fn write_conj_parts(&self, f: &mut Formatter<'_>) -> Option<fmt::Result> {
        let Concept::And(a, b) = self else {
            return None;
        };
        Some((|| {
            write_top(a.as_ref(), f)?;
            write!(f, " and ")?;
            write_unary(b.as_ref(), f)
        })())
    }

    fn write_atomic(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => write!(f, "top"),
            Concept::Bot => write!(f, "bot"),
            Concept::Atomic(n) => write!(f, "{n}"),
            Concept::Not(c) => {
                write!(f, "not ")?;
                write_unary(c.as_ref(), f)
            }
            Concept::And(..) => write_unary(self, f),
            Concept::AtLeast { k, role, args } => {
                write!(f, ">={k} {role}.(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_top(a, f)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Printable for AlcqiConcept {
    fn is_and(&self) -> bool {
        matches!(self, AlcqiConcept::And(..))
    }

    fn write_conj_parts(&self, f: &mut Formatter<'_>) -> Option<fmt::Result> {
        let AlcqiConcept::And(a, b) = self else {
            return None;
        };
        Some((|| {
            write_top(a.as_ref(), f)?;
            write!(f, " and ")?;
            write_unary(b.as_ref(), f)
        })())
    }

    fn write_atomic(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            AlcqiConcept::Top => write!(f, "top"),
            AlcqiConcept::Bot => write!(f, "bot"),
            AlcqiConcept::Atomic(n) => write!(f, "{n}"),
            AlcqiConcept::Not(c) => {
                write!(f, "not ")?;
                write_unary(c.as_ref(), f)
            }
            AlcqiConcept::And(..) => write_unary(self, f),
            AlcqiConcept::AtLeast { k, role, filler } => {
                write!(f, ">={k} {role}.(")?;
                write_top(filler.as_ref(), f)?;
                write!(f, ")")
            }
        }
    }
}

impl Display for Concept {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_top(self, f)
    }
}

impl Display for AlcqiConcept {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_top(self, f)
    }
}

impl Display for GraTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let (name, args): (&str, Vec<&GraTerm>) = match self {
            GraTerm::Atom(n) => return write!(f, "{n}"),
            GraTerm::Eq => return write!(f, "e"),
            GraTerm::P(t) => ("p", vec![t]),
            GraTerm::S(t) => ("s", vec![t]),
            GraTerm::I(t) => ("I", vec![t]),
            GraTerm::Neg(t) => ("neg", vec![t]),
            GraTerm::Ex(t) => ("ex", vec![t]),
            GraTerm::Ex1(t) => ("ex1", vec![t]),
            GraTerm::Neg1(t) => ("neg1", vec![t]),
            GraTerm::Join(a, b) => ("join", vec![a, b]),
            GraTerm::DotCap(a, b) => ("dotcap", vec![a, b]),
            GraTerm::Cap1(a, b) => ("cap1", vec![a, b]),
        };
        write!(f, "{name}(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}
