//! Automorphisms of the ends as finite words in explicit generators.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::cone::{Cone, ConeKind};
use crate::ends::{d_from_c, xor, End};
use crate::error::{Error, Result};
use crate::tree::{median, ray_step, Direction, TreeVertex};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `x ↦ x ⊕ t`.
    GlobalXor(End),
    /// Moves the value at index `i` to `i + k`.
    Shift(i64),
    /// `x ↦ x ⊕ s` on a Prefix cone, identity elsewhere.
    ConeXor { cone: Cone, mask: End },
    /// The involution fixing the vertex `({};0)` that swaps its Down and Ext1
    /// cones and maps its Ext0 cone to itself.
    Reflect,
}

impl Generator {
    pub fn cone_xor(cone: Cone, mask: End) -> Result<Self> {
        if cone.kind() != ConeKind::Prefix {
            return Err(Error::InvalidGenerator(format!("{cone} is not a Prefix cone")));
        }
        if mask.min_index().is_some_and(|m| m < cone.level()) {
            return Err(Error::InvalidGenerator(format!(
                "mask {mask} reaches below level {}",
                cone.level()
            )));
        }
        Ok(Generator::ConeXor { cone, mask })
    }

    pub fn apply(&self, x: &End) -> End {
        match self {
            Generator::GlobalXor(t) => xor(x, t),
            Generator::Shift(k) => x.shift(*k),
            Generator::ConeXor { cone, mask } => {
                if cone.contains(x) {
                    xor(x, mask)
                } else {
                    x.clone()
                }
            }
            Generator::Reflect => reflect(x),
        }
    }

    pub fn inverse(&self) -> Generator {
        match self {
            Generator::Shift(k) => Generator::Shift(-k),
            g => g.clone(),
        }
    }
}

fn reflect(x: &End) -> End {
    let s = x.support();
    match s.first() {
        None => x.clone(),
        Some(&n) if n >= 1 => x.clone(),
        Some(&n) if n < 0 => {
            let m = -n;
            End::new((0..m).chain(s[1..].iter().map(|j| j + 2 * m)))
        }
        Some(_) => {
            // Starts with a run of ones at 0..m, then a zero at m.
            let m = (1..).find(|&i| !x.bit(i)).expect("finite support");
            let rest = s.iter().filter(|&&j| j > m).map(|j| j - 2 * m);
            End::new(std::iter::once(-m).chain(rest))
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::GlobalXor(t) => write!(f, "GX{t}"),
            Generator::Shift(k) => write!(f, "SH{{{k}}}"),
            Generator::ConeXor { cone, mask } => write!(f, "CX{{{cone};{mask}}}"),
            Generator::Reflect => f.write_str("RF"),
        }
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A generator word, applied left to right.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Automorphism {
    gens: Vec<Generator>,
}

impl Automorphism {
    pub fn identity() -> Self {
        Automorphism::default()
    }

    pub fn from_gens(gens: Vec<Generator>) -> Self {
        Automorphism { gens }
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn is_identity_word(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn then(mut self, g: Generator) -> Self {
        self.gens.push(g);
        self
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Automorphism) -> Self {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Automorphism { gens }
    }

    pub fn inverse(&self) -> Self {
        Automorphism {
            gens: self.gens.iter().rev().map(Generator::inverse).collect(),
        }
    }

    pub fn apply(&self, x: &End) -> End {
        self.gens.iter().fold(x.clone(), |acc, g| g.apply(&acc))
    }

    /// The image of a vertex, as the median of the images of three ends
    /// leaving it in different directions.
    pub fn apply_vertex(&self, v: &TreeVertex) -> TreeVertex {
        let [a, b, c] = spanning_ends(v);
        median(&self.apply(&a), &self.apply(&b), &self.apply(&c)).expect("automorphisms are injective")
    }
}

/// Three ends whose median is `v`, one per direction in [`Direction`] order.
pub fn spanning_ends(v: &TreeVertex) -> [End; 3] {
    let n = v.level();
    let p = v.prefix();
    [xor(p, &End::new([n - 1])), p.clone(), p.with_bit(n, true)]
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return f.write_str("id");
        }
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Automorphism {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The first quadruple on which `g` changes the D-relation, if any.
pub fn find_d_violation<'a>(g: &Automorphism, quads: &'a [[End; 4]]) -> Option<&'a [End; 4]> {
    quads.iter().find(|[x, y, z, w]| {
        let [gx, gy, gz, gw] = [x, y, z, w].map(|e| g.apply(e));
        d_from_c(x, y, z, w) != d_from_c(&gx, &gy, &gz, &gw)
    })
}

pub fn preserves_d(g: &Automorphism, quads: &[[End; 4]]) -> bool {
    find_d_violation(g, quads).is_none()
}

/// Carries a CoPrefix cone onto `P({0};1)`.
fn coprefix_chart(cone: &Cone) -> Automorphism {
    let v = cone.vertex();
    Automorphism::from_gens(vec![
        Generator::GlobalXor(v.prefix().clone()),
        Generator::Shift(-v.level()),
        Generator::Reflect,
    ])
}

fn unit_cone() -> Cone {
    Cone::prefix(TreeVertex::on_end(&End::new([0]), 1))
}

/// An automorphism swapping `x` and `y` and fixing every end outside `c`.
pub fn jordan_witness(c: &Cone, x: &End, y: &End) -> Result<Automorphism> {
    for p in [x, y] {
        if !c.contains(p) {
            return Err(Error::NotInCone {
                cone: c.to_string(),
                end: p.to_string(),
            });
        }
    }
    match c.kind() {
        ConeKind::Prefix => Ok(Automorphism::from_gens(vec![Generator::cone_xor(c.clone(), xor(x, y))?])),
        ConeKind::CoPrefix => {
            let h = coprefix_chart(c);
            let mask = xor(&h.apply(x), &h.apply(y));
            let swap = Generator::cone_xor(unit_cone(), mask)?;
            Ok(h.clone().then(swap).compose(&h.inverse()))
        }
    }
}

/// Maps a triple of distinct ends to `({-1}, {}, {0})`.
fn normalise_triple(t: [&End; 3]) -> Result<Automorphism> {
    let v = median(t[0], t[1], t[2])?;
    let mut g = Automorphism::from_gens(vec![
        Generator::GlobalXor(v.prefix().clone()),
        Generator::Shift(-v.level()),
    ]);
    let root = TreeVertex::root();
    let dir = |g: &Automorphism, i: usize| ray_step(&root, &g.apply(t[i]));
    let swap_ext = Generator::GlobalXor(End::new([0]));
    match dir(&g, 0) {
        Direction::Ext1 => g = g.then(Generator::Reflect),
        Direction::Ext0 => g = g.then(swap_ext.clone()).then(Generator::Reflect),
        Direction::Down => {}
    }
    if dir(&g, 1) == Direction::Ext1 {
        g = g.then(swap_ext);
    }
    let [x, y, z] = t.map(|e| g.apply(e));
    g = g.then(Generator::cone_xor(Cone::prefix(TreeVertex::on_end(&End::zero(), 1)), y)?);
    g = g.then(Generator::cone_xor(unit_cone(), xor(&z, &End::new([0])))?);
    let down = Cone::coprefix(root);
    Ok(g.compose(&jordan_witness(&down, &x, &End::new([-1]))?))
}

/// An automorphism carrying `src` onto `tgt` entrywise.
pub fn three_transitivity_witness(src: [&End; 3], tgt: [&End; 3]) -> Result<Automorphism> {
    for t in [src, tgt] {
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            return Err(Error::NotDistinct);
        }
    }
    if src == tgt {
        return Ok(Automorphism::identity());
    }
    Ok(normalise_triple(src)?.compose(&normalise_triple(tgt)?.inverse()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::cones_at;
    use crate::ends::EndSampler;
    use crate::tree::d_from_tree;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(s: &str) -> End {
        s.parse().unwrap()
    }

    fn c(s: &str) -> Cone {
        s.parse().unwrap()
    }

    fn quads(seed: u64, n: usize) -> Vec<[End; 4]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = EndSampler::new(6);
        (0..n)
            .map(|_| {
                let mut q: [End; 4] = std::array::from_fn(|_| s.sample(&mut rng));
                if rng.random_bool(0.1) {
                    q[1] = q[0].clone();
                }
                q
            })
            .collect()
    }

    fn word(gens: Vec<Generator>) -> Automorphism {
        Automorphism::from_gens(gens)
    }

    #[test]
    fn apply_examples() {
        assert_eq!(word(vec![Generator::GlobalXor(e("{0}"))]).apply(&e("{}")), e("{0}"));
        assert_eq!(word(vec![Generator::Shift(2)]).apply(&e("{0,3}")), e("{2,5}"));
        let cx = Generator::cone_xor(c("P({};0)"), e("{0,3}")).unwrap();
        assert_eq!(cx.apply(&e("{-1}")), e("{-1}"));
        assert_eq!(cx.apply(&e("{3}")), e("{0}"));
        assert!(Generator::cone_xor(c("C({};0)"), e("{}")).is_err());
        assert!(Generator::cone_xor(c("P({};1)"), e("{0}")).is_err());
    }

    #[test]
    fn reflect_examples() {
        let r = Generator::Reflect;
        assert_eq!(r.apply(&e("{}")), e("{}"));
        assert_eq!(r.apply(&e("{2,5}")), e("{2,5}"));
        assert_eq!(r.apply(&e("{-1}")), e("{0}"));
        assert_eq!(r.apply(&e("{-2,1}")), e("{0,1,5}"));
        assert_eq!(r.apply(&e("{0,1,5}")), e("{-2,1}"));
        let root = TreeVertex::root();
        assert_eq!(word(vec![r]).apply_vertex(&root), root);
    }

    #[test]
    fn every_generator_preserves_d() {
        let qs = quads(1, 10_000);
        let gens = [
            Generator::GlobalXor(e("{-3,0,4}")),
            Generator::Shift(3),
            Generator::Shift(-5),
            Generator::cone_xor(c("P({-1};1)"), e("{1,2,6}")).unwrap(),
            Generator::Reflect,
        ];
        for g in gens {
            assert!(preserves_d(&word(vec![g.clone()]), &qs), "{g}");
        }
        // A D-relation computed on the tree side is preserved too.
        let g = word(vec![Generator::Reflect, Generator::Shift(1), Generator::Reflect]);
        for [x, y, z, w] in &qs[..2000] {
            let [a, b, cc, d] = [x, y, z, w].map(|p| g.apply(p));
            assert_eq!(d_from_tree(x, y, z, w), d_from_tree(&a, &b, &cc, &d));
        }
    }

    #[test]
    fn xor_on_a_half_space_breaks_d() {
        // Ends with bit 2 set form no cone; toggling bit 0 on them is not
        // an automorphism.
        let qs = quads(2, 10_000);
        let broken = |x: &End| if x.bit(2) { xor(x, &e("{0}")) } else { x.clone() };
        let bad = qs.iter().find(|[x, y, z, w]| {
            d_from_c(x, y, z, w) != d_from_c(&broken(x), &broken(y), &broken(z), &broken(w))
        });
        assert!(bad.is_some());
    }

    #[test]
    fn jordan_witness_examples() {
        let k = c("P({};0)");
        let g = jordan_witness(&k, &e("{0}"), &e("{3}")).unwrap();
        assert_eq!(g.gens(), &[Generator::cone_xor(k.clone(), e("{0,3}")).unwrap()]);
        assert_eq!(g.apply(&e("{0}")), e("{3}"));
        let same = jordan_witness(&k, &e("{1}"), &e("{1}")).unwrap();
        assert_eq!(same.gens(), &[Generator::cone_xor(k.clone(), e("{}")).unwrap()]);
        assert!(jordan_witness(&k, &e("{-1}"), &e("{1}")).is_err());
    }

    #[test]
    fn coprefix_jordan_witnesses() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = EndSampler::new(8);
        let qs = quads(5, 300);
        for _ in 0..100 {
            let v = TreeVertex::on_end(&s.sample(&mut rng), rng.random_range(-4..4));
            let k = Cone::coprefix(v);
            let (x, y) = (k.sample(&s, &mut rng), k.sample(&s, &mut rng));
            let g = jordan_witness(&k, &x, &y).unwrap();
            assert_eq!(g.apply(&x), y);
            assert_eq!(g.apply(&y), x);
            for _ in 0..20 {
                let out = k.complement().sample(&s, &mut rng);
                assert_eq!(g.apply(&out), out);
                let inside = k.sample(&s, &mut rng);
                assert_eq!(g.apply(&g.apply(&inside)), inside);
            }
            assert!(preserves_d(&g, &qs));
        }
    }

    #[test]
    fn three_transitivity_examples() {
        let (a, b, cc) = (e("{}"), e("{0}"), e("{2}"));
        let (x, y, z) = (e("{}"), e("{1}"), e("{3}"));
        let g = three_transitivity_witness([&a, &b, &cc], [&x, &y, &z]).unwrap();
        assert_eq!([&a, &b, &cc].map(|p| g.apply(p)), [x.clone(), y.clone(), z.clone()]);
        let id = three_transitivity_witness([&a, &b, &cc], [&a, &b, &cc]).unwrap();
        assert!(id.is_identity_word());
        assert!(three_transitivity_witness([&a, &a, &cc], [&x, &y, &z]).is_err());
    }

    #[test]
    fn apply_vertex_commutes_with_ray_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = EndSampler::new(6);
        for _ in 0..200 {
            let t: [End; 6] = std::array::from_fn(|_| s.sample(&mut rng));
            if t[..3].iter().enumerate().any(|(i, p)| t[..3].iter().skip(i + 1).any(|q| p == q)) {
                continue;
            }
            if t[3..].iter().enumerate().any(|(i, p)| t[3..].iter().skip(i + 1).any(|q| p == q)) {
                continue;
            }
            let g = three_transitivity_witness([&t[0], &t[1], &t[2]], [&t[3], &t[4], &t[5]]).unwrap();
            let v = TreeVertex::on_end(&s.sample(&mut rng), rng.random_range(-3..3));
            let gv = g.apply_vertex(&v);
            for k in cones_at(&v) {
                let x = k.sample(&s, &mut rng);
                let gx = g.apply(&x);
                // Equal directions at v map to equal directions at g(v).
                let y = k.sample(&s, &mut rng);
                assert_eq!(ray_step(&gv, &gx), ray_step(&gv, &g.apply(&y)));
            }
            let dirs: Vec<_> = spanning_ends(&v).iter().map(|p| ray_step(&gv, &g.apply(p))).collect();
            assert!(dirs[0] != dirs[1] && dirs[1] != dirs[2] && dirs[0] != dirs[2]);
        }
    }

    proptest! {
        #[test]
        fn reflect_is_an_involution(x in proptest::collection::btree_set(-10i64..10, 0..6)) {
            let x = End::new(x);
            prop_assert_eq!(reflect(&reflect(&x)), x.clone());
            // The three cones at the root go Down <-> Ext1 and Ext0 to itself.
            let root = TreeVertex::root();
            let d = ray_step(&root, &x);
            let image = ray_step(&root, &reflect(&x));
            let expected = match d {
                Direction::Down => Direction::Ext1,
                Direction::Ext1 => Direction::Down,
                Direction::Ext0 => Direction::Ext0,
            };
            prop_assert_eq!(image, expected);
        }

        #[test]
        fn inverse_undoes_words(seed in any::<u64>(), x in proptest::collection::btree_set(-10i64..10, 0..6)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = EndSampler::new(5);
            let gens: Vec<Generator> = (0..6).map(|_| match rng.random_range(0..4) {
                0 => Generator::GlobalXor(s.sample(&mut rng)),
                1 => Generator::Shift(rng.random_range(-3..=3)),
                2 => {
                    let v = TreeVertex::on_end(&s.sample(&mut rng), rng.random_range(-3..3));
                    let mask = s.sample(&mut rng).restrict_from(v.level());
                    Generator::cone_xor(Cone::prefix(v), mask).unwrap()
                }
                _ => Generator::Reflect,
            }).collect();
            let g = Automorphism::from_gens(gens);
            let x = End::new(x);
            prop_assert_eq!(g.inverse().apply(&g.apply(&x)), x.clone());
            prop_assert_eq!(g.apply(&g.inverse().apply(&x)), x);
        }
    }
}
