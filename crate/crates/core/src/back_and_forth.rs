//! Extending finite partial isomorphisms one point at a time.

use std::fmt;

use crate::cone::{cone_containing, cones_at, Cone};
use crate::ends::End;
use crate::error::{Error, Result};
use crate::orbits::on_ray;
use crate::shape::metric_shape;
use crate::tree::{line, median, ray_step, tree_distance, Direction, TreeVertex};

/// A finite injective map between sets of ends, kept in insertion order.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct PartialIso {
    pairs: Vec<(End, End)>,
}

impl PartialIso {
    pub fn new() -> Self {
        PartialIso::default()
    }

    pub fn from_pairs(pairs: Vec<(End, End)>) -> Result<Self> {
        for (i, (a, b)) in pairs.iter().enumerate() {
            if pairs[i + 1..].iter().any(|(c, d)| c == a || d == b) {
                return Err(Error::NotDistinct);
            }
        }
        Ok(PartialIso { pairs })
    }

    pub fn pairs(&self) -> &[(End, End)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn domain(&self) -> Vec<End> {
        self.pairs.iter().map(|(a, _)| a.clone()).collect()
    }

    pub fn range(&self) -> Vec<End> {
        self.pairs.iter().map(|(_, b)| b.clone()).collect()
    }

    pub fn get(&self, x: &End) -> Option<&End> {
        self.pairs.iter().find(|(a, _)| a == x).map(|(_, b)| b)
    }

    pub fn inverse(&self) -> Self {
        PartialIso {
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    /// Whether the map carries the tree spanned by its domain isometrically
    /// onto the tree spanned by its range, entry by entry.
    pub fn preserves_spanned_trees(&self) -> bool {
        metric_shape(&self.domain()).ok() == metric_shape(&self.range()).ok()
    }
}

impl fmt::Debug for PartialIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.pairs.iter().map(|(a, b)| (a, b))).finish()
    }
}

/// Finds an image for `a1` so that the extended map still preserves the
/// spanned trees.
pub fn back_and_forth_extend(f: &PartialIso, a1: &End) -> Result<(End, PartialIso)> {
    if f.get(a1).is_some() {
        return Err(Error::AlreadyInDomain(a1.to_string()));
    }
    if !f.preserves_spanned_trees() {
        return Err(Error::ShapeMismatch);
    }
    let dom = f.domain();
    let ran = f.range();
    let a2 = match dom.len() {
        0 => End::zero(),
        1 => {
            let b = &ran[0];
            b.with_bit(0, !b.bit(0))
        }
        2 => {
            let branch = line(&ran[0], &ran[1])?.branch().clone();
            Cone::at(&branch, Direction::Down).canonical_end()
        }
        _ => mirror_attachment(&dom, &ran, a1)?,
    };
    let mut pairs = f.pairs.clone();
    pairs.push((a1.clone(), a2.clone()));
    Ok((a2, PartialIso { pairs }))
}

fn mirror_attachment(dom: &[End], ran: &[End], a1: &End) -> Result<End> {
    // The new centre: the median toward a1 that no other median lies beyond.
    let mut candidates: Vec<(TreeVertex, usize, usize)> = Vec::new();
    for i in 0..dom.len() {
        for j in i + 1..dom.len() {
            candidates.push((median(a1, &dom[i], &dom[j])?, i, j));
        }
    }
    let (p1, b, c) = candidates
        .iter()
        .find(|(m, _, _)| {
            let out = ray_step(m, a1);
            candidates.iter().all(|(w, _, _)| m.direction_to(w) != Some(out))
        })
        .cloned()
        .expect("an outermost median exists");
    let e = (0..dom.len()).find(|&k| k != b && k != c).expect("at least three points");
    let u1 = median(&dom[b], &dom[c], &dom[e])?;
    let side = if on_ray(&u1, &dom[b], &p1) { b } else { c };
    let depth = tree_distance(&u1, &p1);
    let u2 = median(&ran[b], &ran[c], &ran[e])?;
    let mut p2 = u2;
    for _ in 0..depth {
        p2 = p2.neighbor(ray_step(&p2, &ran[side]));
    }
    let free = cones_at(&p2)
        .into_iter()
        .find(|k| !k.contains(&ran[b]) && !k.contains(&ran[c]))
        .expect("three cones at a vertex");
    debug_assert_eq!(cone_containing(&p2, &free.canonical_end()), free);
    Ok(free.canonical_end())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ends::EndSampler;
    use crate::shape::AtomTable;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(s: &str) -> End {
        s.parse().unwrap()
    }

    #[test]
    fn empty_map_takes_any_point() {
        let (a2, f) = back_and_forth_extend(&PartialIso::new(), &e("{4}")).unwrap();
        assert_eq!(f.get(&e("{4}")), Some(&a2));
    }

    #[test]
    fn two_point_map_carries_the_median() {
        let f = PartialIso::from_pairs(vec![(e("{}"), e("{5}")), (e("{0}"), e("{7}"))]).unwrap();
        let a1 = e("{2}");
        let (a2, _) = back_and_forth_extend(&f, &a1).unwrap();
        let v1 = median(&a1, &e("{}"), &e("{0}")).unwrap();
        let v2 = median(&a2, &e("{5}"), &e("{7}")).unwrap();
        assert_eq!(v1, line(&e("{}"), &e("{2}")).unwrap().branch().clone());
        assert_eq!(v2, line(&e("{5}"), &e("{7}")).unwrap().branch().clone());
    }

    #[test]
    fn mismatched_trees_are_rejected() {
        // Centres at distance 1 on one side and 3 on the other.
        let dom = [e("{}"), e("{0}"), e("{2}"), e("{2,3}")];
        let ran = [e("{}"), e("{0}"), e("{2}"), e("{2,5}")];
        let f = PartialIso::from_pairs(dom.iter().cloned().zip(ran.iter().cloned()).collect()).unwrap();
        assert!(crate::shape::qf_type_equal(&dom, &ran).unwrap());
        assert_eq!(back_and_forth_extend(&f, &e("{9}")), Err(Error::ShapeMismatch));
        assert!(back_and_forth_extend(&f, &e("{}")).is_err());
    }

    #[test]
    fn random_six_point_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let s = EndSampler::new(7);
        for _ in 0..50 {
            let mut pts: Vec<End> = Vec::new();
            while pts.len() < 6 {
                let x = s.sample(&mut rng);
                if !pts.contains(&x) {
                    pts.push(x);
                }
            }
            let mut f = PartialIso::new();
            for x in &pts {
                if rng.random_bool(0.5) && !f.is_empty() {
                    // Extend backwards through the inverse as well.
                    let fresh = s.sample(&mut rng);
                    if f.range().contains(&fresh) || f.get(&fresh).is_some() {
                        continue;
                    }
                    let (pre, g) = back_and_forth_extend(&f.inverse(), &fresh).unwrap();
                    if f.get(&pre).is_none() {
                        f = g.inverse();
                    }
                }
                if f.get(x).is_some() {
                    continue;
                }
                let (_, g) = back_and_forth_extend(&f, x).unwrap();
                f = g;
                assert!(f.preserves_spanned_trees());
            }
            assert_eq!(AtomTable::of(&f.domain()), AtomTable::of(&f.range()));
        }
    }
}
