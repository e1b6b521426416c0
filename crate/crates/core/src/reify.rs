//! Reification of polyadic roles into binary ones.
//!
//! Every tuple of an `n`-ary role becomes a lantern element `l` with
//! `(l, u_i)` in `@F<i>` for each coordinate `i`. Lanterns carry `@L_<R>`
//! for their role and lie outside `@dom`, which marks the original domain.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::model::{ArityRel, Elem, ElemSet, Interp, ModelError};
use crate::semantics::{check_alcqi, SemanticsError};
use crate::syntax::{is_generated_name, AlcqiConcept, BinRole, Concept, Signature};

pub const DOM: &str = "@dom";

#[derive(Debug, Error)]
pub enum ReifyError {
    #[error("out-degree constraints need arity at least 2, got {0}")]
    OutdegArity(usize),
    #[error("role `{0}` is not a source role")]
    UnknownRole(String),
    #[error("role `{role}` has arity {found} here but {expected} in the source signature")]
    Arity {
        role: String,
        expected: usize,
        found: usize,
    },
    #[error("`{DOM}` is empty, so there is no polyadic domain")]
    EmptyDomain,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// The lantern marker `@L_<role>`.
pub fn lantern_concept(role: &str) -> String {
    format!("@L_{role}")
}

/// The coordinate role `@F<i>`, with `i` counted from 1.
pub fn coord_role(i: usize) -> String {
    format!("@F{i}")
}

/// Source roles with their arities. The generated coordinate roles
/// `@F1..@Fm` are shared by all of them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReifySignature {
    roles: BTreeMap<String, usize>,
}

impl ReifySignature {
    pub fn new(roles: impl IntoIterator<Item = (String, usize)>) -> Self {
        ReifySignature {
            roles: roles.into_iter().collect(),
        }
    }

    /// The role symbols of `c`.
    pub fn of_concept(c: &Concept) -> Self {
        ReifySignature { roles: c.role_names() }
    }

    pub fn of_signature(sig: &Signature) -> Self {
        Self::new(sig.roles().map(|(r, n)| (r.to_string(), n)))
    }

    pub fn roles(&self) -> impl Iterator<Item = (&str, usize)> {
        self.roles.iter().map(|(r, &n)| (r.as_str(), n))
    }

    pub fn arity(&self, role: &str) -> Option<usize> {
        self.roles.get(role).copied()
    }

    pub fn max_arity(&self) -> usize {
        self.roles.values().copied().max().unwrap_or(0)
    }

    /// Generated symbols: `@dom`, one `@L_R` per source role and the
    /// binary roles `@F1..@Fm`.
    pub fn generated(&self) -> Signature {
        let mut sig = Signature::new().with_concept(DOM);
        for r in self.roles.keys() {
            sig.add_concept(lantern_concept(r));
        }
        for i in 1..=self.max_arity() {
            sig.add_role(coord_role(i), 2);
        }
        sig
    }
}

/// `(=1 F1.top and ... and =1 Fn.top) and (A F1.@dom and ... and A Fn.@dom)`.
pub fn build_outdeg(n: usize) -> Result<AlcqiConcept, ReifyError> {
    if n < 2 {
        return Err(ReifyError::OutdegArity(n));
    }
    Ok(outdeg(n))
}

fn outdeg(n: usize) -> AlcqiConcept {
    let f = |i| BinRole::forward(coord_role(i));
    AlcqiConcept::and(
        AlcqiConcept::and_all((1..=n).map(|i| AlcqiConcept::exactly(1, f(i), AlcqiConcept::Top))),
        AlcqiConcept::and_all((1..=n).map(|i| AlcqiConcept::all(f(i), AlcqiConcept::atomic(DOM)))),
    )
}

/// `@L_R` and the negated markers of every other source role.
pub fn build_chi(role: &str, sig: &ReifySignature) -> Result<AlcqiConcept, ReifyError> {
    if sig.arity(role).is_none() {
        return Err(ReifyError::UnknownRole(role.to_string()));
    }
    Ok(AlcqiConcept::and_all(
        std::iter::once(AlcqiConcept::atomic(lantern_concept(role))).chain(
            sig.roles
                .keys()
                .filter(|s| *s != role)
                .map(|s| AlcqiConcept::not(AlcqiConcept::atomic(lantern_concept(s)))),
        ),
    ))
}

/// The translation over the roles of `c` itself. Callers conjoin `@dom`.
pub fn translate(c: &Concept) -> AlcqiConcept {
    translate_with(c, &ReifySignature::of_concept(c)).expect("signature taken from the concept")
}

/// The translation with `χ_R` ranging over the roles of `sig`.
pub fn translate_with(c: &Concept, sig: &ReifySignature) -> Result<AlcqiConcept, ReifyError> {
    Ok(match c {
        Concept::Top => AlcqiConcept::Top,
        Concept::Bot => AlcqiConcept::Bot,
        Concept::Atomic(a) => AlcqiConcept::atomic(a.clone()),
        Concept::Not(x) => AlcqiConcept::not(translate_with(x, sig)?),
        Concept::And(a, b) => AlcqiConcept::and(translate_with(a, sig)?, translate_with(b, sig)?),
        Concept::AtLeast { k, role, args } => {
            let expected = sig
                .arity(&role.name)
                .ok_or_else(|| ReifyError::UnknownRole(role.name.clone()))?;
            if expected != role.arity {
                return Err(ReifyError::Arity {
                    role: role.name.clone(),
                    expected,
                    found: role.arity,
                });
            }
            let pi = role.permutation();
            // F indices are one-based source coordinates.
            let f = |i: usize| coord_role(pi.source(i) + 1);
            let mut parts = vec![
                AlcqiConcept::not(AlcqiConcept::atomic(DOM)),
                build_chi(&role.name, sig)?,
                build_outdeg(role.arity)?,
            ];
            for (i, arg) in args.iter().enumerate() {
                parts.push(AlcqiConcept::some(
                    BinRole::forward(f(i + 1)),
                    translate_with(arg, sig)?,
                ));
            }
            AlcqiConcept::at_least(k.clone(), BinRole::inverse(f(0)), AlcqiConcept::and_all(parts))
        }
    })
}

/// `@dom and T(c)`.
pub fn reify(c: &Concept) -> AlcqiConcept {
    AlcqiConcept::and(AlcqiConcept::atomic(DOM), translate(c))
}

/// The lantern model: the domain of `interp` plus one fresh lantern per
/// tuple of each source role. Concept names are copied unchanged.
pub fn lanternize(interp: &Interp, sig: &ReifySignature) -> Result<Interp, ReifyError> {
    let mut names: Vec<String> = interp.names().to_vec();
    let mut taken: HashSet<String> = names.iter().cloned().collect();
    let mut lanterns: Vec<(&str, Vec<Elem>)> = Vec::new();
    for (role, arity) in sig.roles() {
        let Some(rel) = interp.role(role) else { continue };
        if rel.arity() != arity {
            return Err(ReifyError::Arity {
                role: role.to_string(),
                expected: arity,
                found: rel.arity(),
            });
        }
        for t in rel.tuples() {
            let members: Vec<&str> = t.iter().map(|&e| interp.name(e)).collect();
            let mut name = format!("@{role}({})", members.join(","));
            while taken.contains(&name) {
                name.push('\'');
            }
            taken.insert(name.clone());
            names.push(name);
            lanterns.push((role, t.to_vec()));
        }
    }
    let base = interp.size();
    let mut out = Interp::new(names)?;
    for (c, set) in interp.concepts() {
        out.set_concept(c, ElemSet::from_elems(out.size(), set.iter()))?;
    }
    out.set_concept(DOM, ElemSet::from_elems(out.size(), interp.elems()))?;
    out.declare(&sig.generated())?;
    for (offset, (role, tuple)) in lanterns.into_iter().enumerate() {
        let l = Elem::from(base + offset);
        out.add_member(&lantern_concept(role), l)?;
        for (i, u) in tuple.into_iter().enumerate() {
            out.add_tuple(&coord_role(i + 1), vec![l, u])?;
        }
    }
    Ok(out)
}

/// Reads a polyadic interpretation off a binary one. The domain is
/// `@dom`, concept names are cut down to it, and `(u_1..u_n)` is in `R`
/// iff some `l` in `not @dom and χ_R and Outdeg_n` has `u_i` as its
/// `@F<i>`-successor for each `i`.
pub fn extract_polyadic(j: &Interp, sig: &ReifySignature) -> Result<Interp, ReifyError> {
    let dom = j.concept(DOM).cloned().unwrap_or_else(|| j.empty_set());
    if dom.is_empty() {
        return Err(ReifyError::EmptyDomain);
    }
    let kept: Vec<Elem> = dom.iter().collect();
    let mut position = vec![None; j.size()];
    for (i, &e) in kept.iter().enumerate() {
        position[e.index()] = Some(Elem::from(i));
    }
    let mut out = Interp::new(kept.iter().map(|&e| j.name(e).to_string()))?;
    for (c, set) in j.concepts() {
        if is_generated_name(c) {
            continue;
        }
        out.set_concept(
            c,
            ElemSet::from_elems(kept.len(), set.iter().filter_map(|e| position[e.index()])),
        )?;
    }
    let succ = successor_lists(j, sig.max_arity())?;
    for (role, n) in sig.roles() {
        let shape = AlcqiConcept::and_all([
            AlcqiConcept::not(AlcqiConcept::atomic(DOM)),
            build_chi(role, sig)?,
            build_outdeg(n)?,
        ]);
        let lanterns = check_alcqi(&shape, j)?;
        let rel = ArityRel::from_tuples(
            n,
            lanterns.iter().map(|l| {
                (0..n)
                    .map(|i| {
                        let u = succ[i][l.index()][0];
                        position[u.index()].expect("Outdeg keeps successors in @dom")
                    })
                    .collect()
            }),
        );
        out.set_role(role, rel)?;
    }
    Ok(out)
}

/// `succ[i][x]`: the `@F<i+1>`-successors of `x`.
fn successor_lists(j: &Interp, m: usize) -> Result<Vec<Vec<Vec<Elem>>>, SemanticsError> {
    let mut succ = vec![vec![Vec::new(); j.size()]; m];
    for (i, lists) in succ.iter_mut().enumerate() {
        let name = coord_role(i + 1);
        let Some(rel) = j.role(&name) else { continue };
        if rel.arity() != 2 {
            return Err(SemanticsError::NonBinary {
                role: name,
                arity: rel.arity(),
            });
        }
        for t in rel.tuples() {
            lists[t[0].index()].push(t[1]);
        }
    }
    Ok(succ)
}

/// Generated-name hygiene: the user-level names occurring in a translation.
pub fn user_symbols(c: &AlcqiConcept) -> BTreeSet<String> {
    c.concept_names()
        .into_iter()
        .chain(c.role_names())
        .filter(|n| !is_generated_name(n))
        .collect()
}
