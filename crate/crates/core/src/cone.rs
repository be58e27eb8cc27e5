//! Cones: the three classes of ends seen from a vertex, in a canonical
//! form that makes set equality structural.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ends::{xor, End, EndSampler};
use crate::error::{parse_err, Error, Result};
use crate::tree::{ray_step, Direction, TreeVertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConeKind {
    /// Ends agreeing with the vertex prefix below its level.
    Prefix,
    /// The complement of the corresponding prefix set.
    CoPrefix,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    kind: ConeKind,
    vertex: TreeVertex,
}

/// How two cones sit relative to each other as sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConeRelation {
    Equal,
    Disjoint,
    FirstInsideSecond,
    SecondInsideFirst,
    /// The cones overlap without nesting, or are complementary; either way
    /// their union is every end.
    UnionIsEverything,
}

impl ConeRelation {
    pub fn flip(self) -> Self {
        match self {
            ConeRelation::FirstInsideSecond => ConeRelation::SecondInsideFirst,
            ConeRelation::SecondInsideFirst => ConeRelation::FirstInsideSecond,
            r => r,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PrefixOrder {
    Equal,
    Sub,
    Super,
    Disjoint,
}

/// Compares the prefix sets of two vertices.
fn prefix_order(a: &TreeVertex, b: &TreeVertex) -> PrefixOrder {
    let (n, m) = (a.level(), b.level());
    if n <= m {
        if b.prefix().restrict_below(n) != *a.prefix() {
            PrefixOrder::Disjoint
        } else if n == m {
            PrefixOrder::Equal
        } else {
            PrefixOrder::Super
        }
    } else {
        match prefix_order(b, a) {
            PrefixOrder::Super => PrefixOrder::Sub,
            other => other,
        }
    }
}

impl Cone {
    pub fn prefix(vertex: TreeVertex) -> Self {
        Cone {
            kind: ConeKind::Prefix,
            vertex,
        }
    }

    pub fn coprefix(vertex: TreeVertex) -> Self {
        Cone {
            kind: ConeKind::CoPrefix,
            vertex,
        }
    }

    pub fn kind(&self) -> ConeKind {
        self.kind
    }

    pub fn vertex(&self) -> &TreeVertex {
        &self.vertex
    }

    pub fn level(&self) -> i64 {
        self.vertex.level()
    }

    /// The cone of ends leaving `v` in direction `dir`.
    pub fn at(v: &TreeVertex, dir: Direction) -> Self {
        match dir {
            Direction::Down => Cone::coprefix(v.clone()),
            ext => Cone::prefix(v.neighbor(ext)),
        }
    }

    /// The vertex this cone hangs from.
    pub fn base_vertex(&self) -> TreeVertex {
        match self.kind {
            ConeKind::Prefix => self.vertex.neighbor(Direction::Down),
            ConeKind::CoPrefix => self.vertex.clone(),
        }
    }

    /// The cone as a (vertex, direction) pair.
    pub fn view(&self) -> (TreeVertex, Direction) {
        match self.kind {
            ConeKind::Prefix => {
                let n = self.vertex.level();
                let bit = self.vertex.prefix().bit(n - 1);
                (self.base_vertex(), Direction::ext(bit))
            }
            ConeKind::CoPrefix => (self.vertex.clone(), Direction::Down),
        }
    }

    pub fn contains(&self, x: &End) -> bool {
        self.vertex.lies_below(x) == (self.kind == ConeKind::Prefix)
    }

    pub fn complement(&self) -> Self {
        Cone {
            kind: match self.kind {
                ConeKind::Prefix => ConeKind::CoPrefix,
                ConeKind::CoPrefix => ConeKind::Prefix,
            },
            vertex: self.vertex.clone(),
        }
    }

    /// A deterministic finite-support member: the prefix followed by zeros.
    pub fn canonical_end(&self) -> End {
        match self.kind {
            ConeKind::Prefix => self.vertex.prefix().clone(),
            ConeKind::CoPrefix => xor(self.vertex.prefix(), &End::new([self.vertex.level() - 1])),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, sampler: &EndSampler, rng: &mut R) -> End {
        let n = self.vertex.level();
        match self.kind {
            ConeKind::Prefix => sampler.sample_with_prefix(rng, self.vertex.prefix(), n),
            ConeKind::CoPrefix => {
                let x = sampler.sample(rng);
                if self.contains(&x) {
                    x
                } else {
                    xor(&x, &End::new([n - 1]))
                }
            }
        }
    }
}

/// The three cones at `v`, indexed by [`Direction`].
pub fn cones_at(v: &TreeVertex) -> [Cone; 3] {
    Direction::ALL.map(|d| Cone::at(v, d))
}

/// The cone at `v` containing `x`.
pub fn cone_containing(v: &TreeVertex, x: &End) -> Cone {
    Cone::at(v, ray_step(v, x))
}

pub fn relate(c1: &Cone, c2: &Cone) -> ConeRelation {
    use ConeKind::*;
    use ConeRelation as R;
    let order = prefix_order(&c1.vertex, &c2.vertex);
    match (c1.kind, c2.kind) {
        (Prefix, Prefix) => match order {
            PrefixOrder::Equal => R::Equal,
            PrefixOrder::Sub => R::FirstInsideSecond,
            PrefixOrder::Super => R::SecondInsideFirst,
            PrefixOrder::Disjoint => R::Disjoint,
        },
        (Prefix, CoPrefix) => match order {
            PrefixOrder::Equal | PrefixOrder::Super => R::UnionIsEverything,
            PrefixOrder::Sub => R::Disjoint,
            PrefixOrder::Disjoint => R::FirstInsideSecond,
        },
        (CoPrefix, Prefix) => relate(c2, c1).flip(),
        (CoPrefix, CoPrefix) => match order {
            PrefixOrder::Equal => R::Equal,
            PrefixOrder::Sub => R::SecondInsideFirst,
            PrefixOrder::Super => R::FirstInsideSecond,
            PrefixOrder::Disjoint => R::UnionIsEverything,
        },
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            ConeKind::Prefix => 'P',
            ConeKind::CoPrefix => 'C',
        };
        write!(f, "{tag}({};{})", self.vertex.prefix(), self.vertex.level())
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Cone {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (kind, rest) = if let Some(r) = t.strip_prefix('P') {
            (ConeKind::Prefix, r)
        } else if let Some(r) = t.strip_prefix('C') {
            (ConeKind::CoPrefix, r)
        } else {
            return Err(parse_err(s, "expected `P(..;n)` or `C(..;n)`"));
        };
        let vertex: TreeVertex = rest.parse().map_err(|e: Error| parse_err(s, e.to_string()))?;
        Ok(Cone { kind, vertex })
    }
}

impl Serialize for Cone {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cone {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
