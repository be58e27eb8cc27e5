//! Quantifier-free types of tuples of ends: the atom table, and the
//! contracted tree a tuple spans.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ends::{d_from_c, End};
use crate::error::{Error, Result};
use crate::tree::{median, ray_step, tree_distance, TreeVertex};

/// Every `=` and `D` atom over a tuple, indexed by positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomTable {
    n: usize,
    eq: Vec<bool>,
    d: Vec<bool>,
}

impl AtomTable {
    pub fn of(t: &[End]) -> Self {
        Self::from_fns(t.len(), |i, j| t[i] == t[j], |i, j, k, l| d_from_c(&t[i], &t[j], &t[k], &t[l]))
    }

    pub fn from_fns(
        n: usize,
        eq: impl Fn(usize, usize) -> bool,
        d: impl Fn(usize, usize, usize, usize) -> bool,
    ) -> Self {
        let mut table = AtomTable {
            n,
            eq: Vec::with_capacity(n * n),
            d: Vec::with_capacity(n.pow(4)),
        };
        for i in 0..n {
            for j in 0..n {
                table.eq.push(eq(i, j));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        table.d.push(d(i, j, k, l));
                    }
                }
            }
        }
        table
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn d(&self, i: usize, j: usize, k: usize, l: usize) -> bool {
        let n = self.n;
        self.d[((i * n + j) * n + k) * n + l]
    }

    /// The table of the tuple whose entry `i` is entry `perm[i]` here.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        Self::from_fns(
            self.n,
            |i, j| self.eq[perm[i] * self.n + perm[j]],
            |i, j, k, l| self.d(perm[i], perm[j], perm[k], perm[l]),
        )
    }
}

/// The tree spanned by a tuple of distinct ends, contracted to its centres.
///
/// Centres are identified by the index triples whose median they are, so two
/// shapes are equal exactly when a label-respecting isomorphism exists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TupleShape {
    len: usize,
    /// Each centre, as the sorted triples of positions having it as median.
    nodes: Vec<Vec<[u8; 3]>>,
    /// Pairs of centres with no third centre between them.
    edges: Vec<(u8, u8)>,
    /// For each entry, the centre at which it leaves the spanned tree.
    attachments: Vec<u8>,
}

/// A [`TupleShape`] together with the tree distances between its centres.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MetricShape {
    pub shape: TupleShape,
    pub distances: Vec<u64>,
}

struct Spanned {
    shape: TupleShape,
    vertices: Vec<TreeVertex>,
}

fn span(t: &[End]) -> Result<Spanned> {
    for i in 0..t.len() {
        if t[i + 1..].contains(&t[i]) {
            return Err(Error::NotDistinct);
        }
    }
    let n = t.len();
    let mut groups: BTreeMap<TreeVertex, Vec<[u8; 3]>> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let m = median(&t[i], &t[j], &t[k])?;
                groups.entry(m).or_default().push([i as u8, j as u8, k as u8]);
            }
        }
    }
    let mut nodes: Vec<(Vec<[u8; 3]>, TreeVertex)> = groups.into_iter().map(|(v, ts)| (ts, v)).collect();
    nodes.sort();
    let vertices: Vec<TreeVertex> = nodes.iter().map(|(_, v)| v.clone()).collect();
    let mut edges = Vec::new();
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            let dab = tree_distance(&vertices[a], &vertices[b]);
            let blocked = (0..vertices.len()).any(|c| {
                c != a
                    && c != b
                    && tree_distance(&vertices[a], &vertices[c]) + tree_distance(&vertices[c], &vertices[b]) == dab
            });
            if !blocked {
                edges.push((a as u8, b as u8));
            }
        }
    }
    let attachments = if vertices.is_empty() {
        Vec::new()
    } else {
        t.iter()
            .map(|x| {
                (0..vertices.len())
                    .find(|&c| {
                        let out = ray_step(&vertices[c], x);
                        vertices.iter().all(|w| vertices[c].direction_to(w) != Some(out))
                    })
                    .expect("some centre is outermost toward each entry") as u8
            })
            .collect()
    };
    Ok(Spanned {
        shape: TupleShape {
            len: n,
            nodes: nodes.into_iter().map(|(ts, _)| ts).collect(),
            edges,
            attachments,
        },
        vertices,
    })
}

/// The contracted spanned tree of a tuple of distinct ends.
pub fn shape(t: &[End]) -> Result<TupleShape> {
    Ok(span(t)?.shape)
}

pub fn metric_shape(t: &[End]) -> Result<MetricShape> {
    let s = span(t)?;
    let v = &s.vertices;
    let mut distances = Vec::new();
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            distances.push(tree_distance(&v[a], &v[b]));
        }
    }
    Ok(MetricShape {
        shape: s.shape,
        distances,
    })
}

/// Whether two tuples of distinct ends have the same quantifier-free type.
pub fn qf_type_equal(t1: &[End], t2: &[End]) -> Result<bool> {
    if t1.len() != t2.len() {
        return Err(Error::LengthMismatch(t1.len(), t2.len()));
    }
    Ok(shape(t1)? == shape(t2)?)
}

impl TupleShape {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn centre_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The shape of the tuple whose entry `i` is entry `perm[i]` here.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0u8; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i as u8;
        }
        let mut nodes: Vec<(Vec<[u8; 3]>, usize)> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(old, ts)| {
                let mut mapped: Vec<[u8; 3]> = ts
                    .iter()
                    .map(|t| {
                        let mut m = t.map(|i| inv[i as usize]);
                        m.sort_unstable();
                        m
                    })
                    .collect();
                mapped.sort_unstable();
                (mapped, old)
            })
            .collect();
        nodes.sort();
        let mut position = vec![0u8; nodes.len()];
        for (new, (_, old)) in nodes.iter().enumerate() {
            position[*old] = new as u8;
        }
        let mut edges: Vec<(u8, u8)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (position[a as usize], position[b as usize]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        let attachments = if self.attachments.is_empty() {
            Vec::new()
        } else {
            perm.iter().map(|&p| position[self.attachments[p] as usize]).collect()
        };
        TupleShape {
            len: self.len,
            nodes: nodes.into_iter().map(|(ts, _)| ts).collect(),
            edges,
            attachments,
        }
    }
}
