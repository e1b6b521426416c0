//! Abstract and concrete syntax for ALCQP(p,s), ALCQI and relation-algebra
//! terms.
//!
//! Concrete grammar (see `docs/grammar.md` for the EBNF):
//!
//! ```text
//! >=2 R^pp.(A, not B) and not bot      ALCQP(p,s)
//! >=1 @F1^-.(not @dom and @L_R)        ALCQI
//! cap1(R, neg1(A))                     relation algebra
//! ```

mod ast;
mod parse;
mod perm;
mod print;
mod sugar;

pub use ast::{
    AlcqiConcept, BinRole, Concept, GraTerm, Grade, RoleExpr, Signature, BOT_NAME, RESERVED_PREFIX, TOP_NAME,
};
pub use parse::{parse_alcqi_surface, parse_gra, parse_surface, parse_surface_infer, SyntaxError};
pub use perm::{all_permutations, perm_of_word, reachable_permutations, PermOp, PermWord, Permutation};
pub use sugar::{expand_alcqi, expand_shorthand, Quantifier, Surface};

/// Parses an ALCQP(p,s) concept against declared role arities and expands
/// all shorthands.
pub fn parse_concept(text: &str, sig: &Signature) -> Result<Concept, SyntaxError> {
    Ok(expand_shorthand(&parse_surface(text, sig)?))
}

/// Parses an ALCQP(p,s) concept, inferring role arities from usage.
pub fn parse_concept_infer(text: &str) -> Result<(Concept, Signature), SyntaxError> {
    let (surface, sig) = parse_surface_infer(text)?;
    Ok((expand_shorthand(&surface), sig))
}

/// Parses an ALCQI concept and expands all shorthands.
pub fn parse_alcqi(text: &str) -> Result<AlcqiConcept, SyntaxError> {
    Ok(expand_alcqi(&parse_alcqi_surface(text)?))
}

/// Whether `name` is a legal user-level symbol: `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_user_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Whether `name` is a generated symbol: `@` followed by a user-level tail.
pub fn is_generated_name(name: &str) -> bool {
    name.strip_prefix(RESERVED_PREFIX)
        .is_some_and(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
}
