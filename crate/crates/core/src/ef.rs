//! A rank-bounded Ehrenfeucht-Fraïssé game on tuples of ends.
//!
//! Both players move only to canonical ends of the orbit descriptor cones of
//! the current tuple, with TypeB rays cut off at a depth bound. The verdict
//! is exact for that finite game.

use std::collections::{BTreeSet, HashMap};

use crate::ends::End;
use crate::error::{Error, Result};
use crate::orbits::{orbit_classification, OrbitFamily};
use crate::shape::{shape, TupleShape};

/// Label attached to verdicts of the restricted game.
pub const RESTRICTED_GAME_EXACT: &str = "restricted-game-exact";

/// Whether the duplicator wins the restricted game of rank `m` on `t1`, `t2`.
pub fn ef_equiv_m(t1: &[End], t2: &[End], m: u32, depth_bound: u64) -> Result<bool> {
    if t1.len() != t2.len() {
        return Err(Error::LengthMismatch(t1.len(), t2.len()));
    }
    EfGame::new(depth_bound).equiv(t1, t2, m)
}

/// Game state shared across positions: memoized move lists and the sets of
/// one-move extension shapes.
pub struct EfGame {
    depth_bound: u64,
    moves: HashMap<Vec<End>, Vec<End>>,
    extension_shapes: HashMap<Vec<End>, BTreeSet<TupleShape>>,
}

impl EfGame {
    pub fn new(depth_bound: u64) -> Self {
        EfGame {
            depth_bound,
            moves: HashMap::new(),
            extension_shapes: HashMap::new(),
        }
    }

    pub fn equiv(&mut self, t1: &[End], t2: &[End], m: u32) -> Result<bool> {
        if t1.len() != t2.len() || shape(t1)? != shape(t2)? {
            return Ok(false);
        }
        match m {
            0 => Ok(true),
            1 => Ok(self.extensions(t1)? == self.extensions(t2)?),
            _ => Ok(self.one_sided(t1, t2, m)? && self.one_sided(t2, t1, m)?),
        }
    }

    /// Every spoiler move on `t1` has an answer on `t2`.
    fn one_sided(&mut self, t1: &[End], t2: &[End], m: u32) -> Result<bool> {
        let left = self.moves(t1)?;
        let right = self.moves(t2)?;
        for x in &left {
            let s1 = extended(t1, x);
            let target = shape(&s1)?;
            let mut answered = false;
            for y in &right {
                let s2 = extended(t2, y);
                if shape(&s2)? == target && self.equiv(&s1, &s2, m - 1)? {
                    answered = true;
                    break;
                }
            }
            if !answered {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn extensions(&mut self, t: &[End]) -> Result<BTreeSet<TupleShape>> {
        if let Some(s) = self.extension_shapes.get(t) {
            return Ok(s.clone());
        }
        let mut out = BTreeSet::new();
        for x in self.moves(t)? {
            out.insert(shape(&extended(t, &x))?);
        }
        self.extension_shapes.insert(t.to_vec(), out.clone());
        Ok(out)
    }

    /// Representatives of every orbit over `t`, parameters excluded.
    pub fn moves(&mut self, t: &[End]) -> Result<Vec<End>> {
        if let Some(m) = self.moves.get(t) {
            return Ok(m.clone());
        }
        let out = match t.len() {
            0 => vec![End::zero()],
            1 | 2 => vec![fresh_end(t)],
            _ => {
                let cls = orbit_classification(t)?;
                cls.unrolled(self.depth_bound)
                    .into_iter()
                    .map(|l| l.cone.canonical_end())
                    .collect()
            }
        };
        self.moves.insert(t.to_vec(), out.clone());
        Ok(out)
    }
}

fn extended(t: &[End], x: &End) -> Vec<End> {
    let mut v = t.to_vec();
    v.push(x.clone());
    v
}

// Any end outside a set of at most two: the stabilizer of two ends is
// transitive on the rest.
fn fresh_end(t: &[End]) -> End {
    let top = t.iter().filter_map(End::max_index).max().unwrap_or(0);
    End::new([top + 1])
}

/// The tuple `a` followed by the canonical end of the member cone at `depth`
/// along the ray of TypeB descriptor `family`.
pub fn ray_instance(a: &[End], family: usize, depth: u64) -> Result<Vec<End>> {
    let cls = orbit_classification(a)?;
    let cone = cls.member_cone(family, depth)?;
    Ok(extended(a, &cone.canonical_end()))
}

/// Indices of the TypeB descriptors over `a`.
pub fn ray_families(a: &[End]) -> Result<Vec<usize>> {
    let cls = orbit_classification(a)?;
    Ok(cls
        .families()
        .iter()
        .enumerate()
        .filter(|(_, f)| matches!(f, OrbitFamily::TypeB { .. }))
        .map(|(i, _)| i)
        .collect())
}
