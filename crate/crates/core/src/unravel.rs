//! Depth-bounded graded unraveling of binary interpretations.
//!
//! Nodes are walks `(u0, E1, u1, ..., En, un)` from the root that never
//! step straight back along the inverse of the edge they just took. A walk
//! extended by `R` is an `R`-successor of its prefix; one extended by `R^-`
//! is an `R`-predecessor.

use std::collections::BTreeMap;

use serde_json::Value;
use thiserror::Error;

use crate::model::{ArityRel, Elem, ElemSet, Interp, ModelError};
use crate::syntax::BinRole;

/// Refuse to build more nodes than this.
pub const NODE_CAP: usize = 2_000_000;

#[derive(Debug, Error)]
pub enum UnravelError {
    #[error("role `{role}` has arity {arity}; unraveling needs binary roles")]
    NonBinary { role: String, arity: usize },
    #[error("unknown root element `{0}`")]
    UnknownRoot(String),
    #[error("unknown tree node {0}")]
    UnknownNode(usize),
    #[error("unraveling exceeds {NODE_CAP} nodes")]
    TooLarge,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The unraveled tree. Node 0 is the one-element walk at the root; every
/// other node records its parent and the step that reached it.
#[derive(Clone, Debug)]
pub struct UnravelResult {
    pub tree: Interp,
    canon: Vec<Elem>,
    parent: Vec<Option<(usize, BinRole)>>,
    depth: Vec<usize>,
}

impl UnravelResult {
    /// The last element of the walk at `node`.
    pub fn canonical_map(&self, node: usize) -> Result<Elem, UnravelError> {
        self.canon.get(node).copied().ok_or(UnravelError::UnknownNode(node))
    }

    pub fn canon(&self) -> &[Elem] {
        &self.canon
    }

    pub fn parent(&self, node: usize) -> Option<(usize, &BinRole)> {
        self.parent[node].as_ref().map(|(p, r)| (*p, r))
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depth[node]
    }

    pub fn len(&self) -> usize {
        self.canon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canon.is_empty()
    }

    /// The tree in the model file format plus a `canon` object from node
    /// names to source element names.
    pub fn to_json_value(&self, source: &Interp) -> Value {
        let mut v = self.tree.to_json_value();
        let canon: serde_json::Map<String, Value> = self
            .tree
            .elems()
            .map(|n| {
                (
                    self.tree.name(n).to_string(),
                    Value::String(source.name(self.canon[n.index()]).to_string()),
                )
            })
            .collect();
        v.as_object_mut()
            .expect("model JSON is an object")
            .insert("canon".into(), Value::Object(canon));
        v
    }
}

/// A role name with successor and predecessor lists per element.
type Adjacency = (String, Vec<Vec<Elem>>, Vec<Vec<Elem>>);

/// Unravels `interp` from `root` to walks of at most `depth` steps.
pub fn g_unravel(interp: &Interp, root: Elem, depth: usize) -> Result<UnravelResult, UnravelError> {
    if root.index() >= interp.size() {
        return Err(UnravelError::UnknownRoot(format!("#{}", root.0)));
    }
    // Per role: successor and predecessor lists, in tuple order.
    let mut adj: Vec<Adjacency> = Vec::new();
    for (name, rel) in interp.roles() {
        if rel.arity() != 2 {
            return Err(UnravelError::NonBinary {
                role: name.to_string(),
                arity: rel.arity(),
            });
        }
        let mut fwd = vec![Vec::new(); interp.size()];
        let mut bwd = vec![Vec::new(); interp.size()];
        for t in rel.tuples() {
            fwd[t[0].index()].push(t[1]);
            bwd[t[1].index()].push(t[0]);
        }
        adj.push((name.to_string(), fwd, bwd));
    }

    let mut canon = vec![root];
    let mut parent: Vec<Option<(usize, BinRole)>> = vec![None];
    let mut depths = vec![0usize];
    let mut names = vec![interp.name(root).to_string()];
    let mut frontier = vec![0usize];
    for d in 1..=depth {
        let mut next = Vec::new();
        for &s in &frontier {
            let u = canon[s];
            // The step that reached s and the element before it.
            let back = parent[s].as_ref().map(|(p, r)| (canon[*p], r.clone()));
            for (name, fwd, bwd) in &adj {
                for (inverse, targets) in [(false, &fwd[u.index()]), (true, &bwd[u.index()])] {
                    for &v in targets {
                        let step = BinRole {
                            name: name.clone(),
                            inverse,
                        };
                        if let Some((prev, last)) = &back {
                            if *prev == v && *last == step.inverted() {
                                continue;
                            }
                        }
                        if canon.len() >= NODE_CAP {
                            return Err(UnravelError::TooLarge);
                        }
                        let suffix = if inverse { "^-" } else { "" };
                        names.push(format!("{}/{name}{suffix}/{}", names[s], interp.name(v)));
                        canon.push(v);
                        parent.push(Some((s, step)));
                        depths.push(d);
                        next.push(canon.len() - 1);
                    }
                }
            }
        }
        frontier = next;
    }

    let mut tree = Interp::new(names)?;
    let size = canon.len();
    for (c, set) in interp.concepts() {
        tree.set_concept(
            c,
            ElemSet::from_elems(size, (0..size).filter(|&n| set.contains(canon[n])).map(Elem::from)),
        )?;
    }
    let mut rels: BTreeMap<&str, ArityRel> = adj.iter().map(|(n, ..)| (n.as_str(), ArityRel::empty(2))).collect();
    for (child, link) in parent.iter().enumerate() {
        if let Some((p, step)) = link {
            let (a, b) = if step.inverse { (child, *p) } else { (*p, child) };
            rels.get_mut(step.name.as_str())
                .expect("role of the source")
                .insert(vec![Elem::from(a), Elem::from(b)]);
        }
    }
    for (name, rel) in rels {
        tree.set_role(name, rel)?;
    }
    Ok(UnravelResult {
        tree,
        canon,
        parent,
        depth: depths,
    })
}
