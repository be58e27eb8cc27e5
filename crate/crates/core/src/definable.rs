//! Finite unions of disjoint cones, up to finitely many exceptional points.
//!
//! Internally a union of cones is a binary trie over the bits of an end from
//! some base index upward; everything with support below the base is
//! uniformly in or out. Reduced tries with a maximal base are canonical,
//! which is what makes the cone lists canonical.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cone::{Cone, ConeKind};
use crate::ends::End;
use crate::tree::TreeVertex;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Leaf(bool),
    Split(Box<Node>, Box<Node>),
}

fn split(zero: Node, one: Node) -> Node {
    match (&zero, &one) {
        (Node::Leaf(a), Node::Leaf(b)) if a == b => zero,
        _ => Node::Split(Box::new(zero), Box::new(one)),
    }
}

impl Node {
    fn negate(&self) -> Node {
        match self {
            Node::Leaf(b) => Node::Leaf(!b),
            Node::Split(z, o) => Node::Split(Box::new(z.negate()), Box::new(o.negate())),
        }
    }

    fn has(&self, value: bool) -> bool {
        match self {
            Node::Leaf(b) => *b == value,
            Node::Split(z, o) => z.has(value) || o.has(value),
        }
    }

    fn zip(&self, other: &Node, op: fn(bool, bool) -> bool) -> Node {
        match (self, other) {
            (Node::Leaf(a), Node::Leaf(b)) => Node::Leaf(op(*a, *b)),
            (Node::Split(z, o), leaf @ Node::Leaf(_)) => split(z.zip(leaf, op), o.zip(leaf, op)),
            (leaf @ Node::Leaf(_), Node::Split(z, o)) => split(leaf.zip(z, op), leaf.zip(o, op)),
            (Node::Split(z1, o1), Node::Split(z2, o2)) => split(z1.zip(z2, op), o1.zip(o2, op)),
        }
    }

    /// Prefix cones of the `true` leaves below the vertex `at`.
    fn true_leaves(&self, at: TreeVertex, out: &mut Vec<Cone>) {
        match self {
            Node::Leaf(true) => out.push(Cone::prefix(at)),
            Node::Leaf(false) => {}
            Node::Split(z, o) => {
                z.true_leaves(at.neighbor(crate::tree::Direction::Ext0), out);
                o.true_leaves(at.neighbor(crate::tree::Direction::Ext1), out);
            }
        }
    }
}

/// A finite union of cones.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Clopen {
    base: i64,
    outside: bool,
    root: Node,
}

impl Clopen {
    fn constant(value: bool) -> Self {
        Clopen {
            base: 0,
            outside: value,
            root: Node::Leaf(value),
        }
    }

    fn from_cone(cone: &Cone) -> Self {
        let v = cone.vertex();
        let n = v.level();
        let base = v.prefix().min_index().unwrap_or(n).min(n);
        let mut root = Node::Leaf(true);
        for j in (base..n).rev() {
            root = if v.prefix().bit(j) {
                Node::Split(Box::new(Node::Leaf(false)), Box::new(root))
            } else {
                Node::Split(Box::new(root), Box::new(Node::Leaf(false)))
            };
        }
        let prefix = Clopen {
            base,
            outside: false,
            root,
        };
        match cone.kind() {
            ConeKind::Prefix => prefix,
            ConeKind::CoPrefix => prefix.complement(),
        }
    }

    fn contains(&self, x: &End) -> bool {
        if x.min_index().is_some_and(|m| m < self.base) {
            return self.outside;
        }
        let mut node = &self.root;
        let mut j = self.base;
        loop {
            match node {
                Node::Leaf(b) => return *b,
                Node::Split(z, o) => {
                    node = if x.bit(j) { o } else { z };
                    j += 1;
                }
            }
        }
    }

    fn complement(&self) -> Self {
        Clopen {
            base: self.base,
            outside: !self.outside,
            root: self.root.negate(),
        }
    }

    fn lowered(&self, base: i64) -> Node {
        let mut root = self.root.clone();
        for _ in base..self.base {
            root = Node::Split(Box::new(root), Box::new(Node::Leaf(self.outside)));
        }
        root
    }

    fn combine(&self, other: &Clopen, op: fn(bool, bool) -> bool) -> Clopen {
        let base = self.base.min(other.base);
        let root = self.lowered(base).zip(&other.lowered(base), op);
        let mut out = Clopen {
            base,
            outside: op(self.outside, other.outside),
            root,
        };
        out.canonicalize();
        out
    }

    fn canonicalize(&mut self) {
        loop {
            match &self.root {
                Node::Leaf(b) if *b == self.outside => {
                    self.base = 0;
                    return;
                }
                Node::Split(z, o) if **o == Node::Leaf(self.outside) => {
                    self.root = (**z).clone();
                    self.base += 1;
                }
                _ => return,
            }
        }
    }

    /// The maximal cones inside the set; pairwise disjoint, no two sharing a
    /// base vertex.
    fn cones(&self) -> Vec<Cone> {
        let root_vertex = TreeVertex::on_end(&End::zero(), self.base);
        let mut out = Vec::new();
        if self.root == Node::Leaf(self.outside) {
            if self.outside {
                out.push(Cone::prefix(TreeVertex::root()));
                out.push(Cone::coprefix(TreeVertex::root()));
            }
            return out;
        }
        if !self.outside {
            self.root.true_leaves(root_vertex, &mut out);
            return out;
        }
        // Walk to the deepest vertex whose complement lies inside the set.
        let (mut node, mut at) = (&self.root, root_vertex);
        while let Node::Split(z, o) = node {
            match (z.has(false), o.has(false)) {
                (true, false) => {
                    node = z;
                    at = at.neighbor(crate::tree::Direction::Ext0);
                }
                (false, true) => {
                    node = o;
                    at = at.neighbor(crate::tree::Direction::Ext1);
                }
                _ => break,
            }
        }
        out.push(Cone::coprefix(at.clone()));
        node.true_leaves(at, &mut out);
        out
    }
}

/// A set of ends: a union of pairwise disjoint cones, plus some points
/// outside it, minus some points inside it. Always held in normal form, so
/// derived equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "RawSet", into = "RawSet")]
pub struct DefinableSet {
    cones: Vec<Cone>,
    plus: Vec<End>,
    minus: Vec<End>,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    cones: Vec<Cone>,
    #[serde(default)]
    plus: Vec<End>,
    #[serde(default)]
    minus: Vec<End>,
}

impl From<RawSet> for DefinableSet {
    fn from(raw: RawSet) -> Self {
        DefinableSet::from_parts(&raw.cones, &raw.plus, &raw.minus)
    }
}

impl From<DefinableSet> for RawSet {
    fn from(set: DefinableSet) -> Self {
        RawSet {
            cones: set.cones,
            plus: set.plus,
            minus: set.minus,
        }
    }
}

impl DefinableSet {
    pub fn empty() -> Self {
        DefinableSet::from_clopen(&Clopen::constant(false), BTreeSet::new(), BTreeSet::new())
    }

    pub fn full() -> Self {
        DefinableSet::from_clopen(&Clopen::constant(true), BTreeSet::new(), BTreeSet::new())
    }

    pub fn cone(cone: &Cone) -> Self {
        DefinableSet::union_collapse(std::slice::from_ref(cone))
    }

    pub fn point(x: &End) -> Self {
        DefinableSet::from_parts(&[], std::slice::from_ref(x), &[])
    }

    /// `(⋃ cones ∪ plus) \ minus`, in normal form.
    pub fn from_parts(cones: &[Cone], plus: &[End], minus: &[End]) -> Self {
        let clopen = union_of(cones);
        let minus: BTreeSet<End> = minus.iter().cloned().collect();
        let plus_out = plus
            .iter()
            .filter(|p| !minus.contains(*p) && !clopen.contains(p))
            .cloned()
            .collect();
        let minus_out = minus.iter().filter(|p| clopen.contains(p)).cloned().collect();
        DefinableSet::from_clopen(&clopen, plus_out, minus_out)
    }

    /// The union of `cones` with sibling cones merged as far as possible.
    pub fn union_collapse(cones: &[Cone]) -> Self {
        DefinableSet::from_parts(cones, &[], &[])
    }

    fn from_clopen(clopen: &Clopen, plus: BTreeSet<End>, minus: BTreeSet<End>) -> Self {
        let mut cones = clopen.cones();
        cones.sort();
        DefinableSet {
            cones,
            plus: plus.into_iter().collect(),
            minus: minus.into_iter().collect(),
        }
    }

    fn clopen(&self) -> Clopen {
        union_of(&self.cones)
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn plus(&self) -> &[End] {
        &self.plus
    }

    pub fn minus(&self) -> &[End] {
        &self.minus
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty() && self.plus.is_empty()
    }

    pub fn is_full(&self) -> bool {
        *self == DefinableSet::full()
    }

    /// Whether the set is a finite union of cones with no exceptional points.
    pub fn is_clopen(&self) -> bool {
        self.plus.is_empty() && self.minus.is_empty()
    }

    pub fn contains(&self, x: &End) -> bool {
        if self.minus.binary_search(x).is_ok() {
            return false;
        }
        self.plus.binary_search(x).is_ok() || self.cones.iter().any(|c| c.contains(x))
    }

    pub fn complement(&self) -> Self {
        let mut out =
            DefinableSet::from_clopen(&self.clopen().complement(), BTreeSet::new(), BTreeSet::new());
        out.plus = self.minus.clone();
        out.minus = self.plus.clone();
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    /// The same set with the membership of one point forced.
    pub fn with_point(&self, x: &End, member: bool) -> Self {
        if member {
            self.union(&DefinableSet::point(x))
        } else {
            self.difference(&DefinableSet::point(x))
        }
    }

    fn combine(&self, other: &Self, op: fn(bool, bool) -> bool) -> Self {
        let clopen = self.clopen().combine(&other.clopen(), op);
        let (mut plus, mut minus) = (BTreeSet::new(), BTreeSet::new());
        let exceptional = self.plus.iter().chain(&self.minus).chain(&other.plus).chain(&other.minus);
        for p in exceptional {
            let member = op(self.contains(p), other.contains(p));
            match (member, clopen.contains(p)) {
                (true, false) => {
                    plus.insert(p.clone());
                }
                (false, true) => {
                    minus.insert(p.clone());
                }
                _ => {}
            }
        }
        DefinableSet::from_clopen(&clopen, plus, minus)
    }
}

fn union_of(cones: &[Cone]) -> Clopen {
    cones
        .iter()
        .fold(Clopen::constant(false), |acc, c| acc.combine(&Clopen::from_cone(c), |a, b| a || b))
}

pub fn ds_complement(a: &DefinableSet) -> DefinableSet {
    a.complement()
}

pub fn ds_union(a: &DefinableSet, b: &DefinableSet) -> DefinableSet {
    a.union(b)
}

pub fn ds_intersect(a: &DefinableSet, b: &DefinableSet) -> DefinableSet {
    a.intersect(b)
}

pub fn union_collapse(cones: &[Cone]) -> DefinableSet {
    DefinableSet::union_collapse(cones)
}

impl fmt::Display for DefinableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cones.is_empty() {
            f.write_str("∅")?;
        }
        for (i, c) in self.cones.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{c}")?;
        }
        for p in &self.plus {
            write!(f, " + {p}")?;
        }
        for p in &self.minus {
            write!(f, " - {p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DefinableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::relate;
    use crate::cone::ConeRelation;
    use crate::ends::{all_ends_in, EndSampler};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(s: &str) -> Cone {
        s.parse().unwrap()
    }

    fn e(s: &str) -> End {
        s.parse().unwrap()
    }

    fn cone() -> impl Strategy<Value = Cone> {
        (-3i64..=3, proptest::collection::btree_set(-4i64..3, 0..4), any::<bool>()).prop_map(|(n, s, p)| {
            let v = TreeVertex::on_end(&End::new(s), n);
            if p {
                Cone::prefix(v)
            } else {
                Cone::coprefix(v)
            }
        })
    }

    fn point() -> impl Strategy<Value = End> {
        proptest::collection::btree_set(-5i64..4, 0..4).prop_map(End::new)
    }

    fn set() -> impl Strategy<Value = DefinableSet> {
        (
            proptest::collection::vec(cone(), 0..4),
            proptest::collection::vec(point(), 0..3),
            proptest::collection::vec(point(), 0..3),
        )
            .prop_map(|(cs, p, m)| DefinableSet::from_parts(&cs, &p, &m))
    }

    /// Every end relevant to the generated cones and points.
    fn window() -> Vec<End> {
        all_ends_in(-6, 4)
    }

    fn check_normal_form(s: &DefinableSet) {
        for (i, a) in s.cones().iter().enumerate() {
            for b in &s.cones()[i + 1..] {
                let disjoint = relate(a, b) == ConeRelation::Disjoint || *a == b.complement();
                assert!(disjoint, "overlapping cones in {s}");
                assert_ne!(a.base_vertex(), b.base_vertex(), "mergeable cones in {s}");
            }
        }
        let in_cones = |p: &End| s.cones().iter().any(|c| c.contains(p));
        assert!(s.plus().iter().all(|p| !in_cones(p)), "{s}");
        assert!(s.minus().iter().all(in_cones), "{s}");
        assert!(s.plus().windows(2).all(|w| w[0] < w[1]));
        assert!(s.minus().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sibling_cones_merge() {
        let u = union_collapse(&[c("P({};1)"), c("P({0};1)")]);
        assert_eq!(u.cones(), &[c("P({};0)")]);
        let k = c("P({1};2)");
        assert!(union_collapse(&[k.clone(), k.complement()]).is_full());
        assert_eq!(union_collapse(std::slice::from_ref(&k)).cones(), &[k]);
        assert!(union_collapse(&[]).is_empty());
    }

    #[test]
    fn complement_examples() {
        let p = DefinableSet::cone(&c("P({};0)"));
        assert_eq!(p.complement().cones(), &[c("C({};0)")]);
        let siblings = union_collapse(&[c("P({2};3)"), c("P({};3)")]);
        assert_eq!(siblings.complement().cones(), &[c("C({};2)")]);
        assert!(p.intersect(&p.complement()).is_empty());
        assert!(p.union(&p.complement()).is_full());
    }

    #[test]
    fn deep_coprefix_absorbs_siblings() {
        // Everything except the cone P({0,1};2) is the CoPrefix at ({0};1)
        // together with the Prefix cone at ({0};2).
        let s = DefinableSet::cone(&c("C({0,1};2)"));
        assert_eq!(s.cones(), &[c("C({0,1};2)")]);
        let t = DefinableSet::cone(&c("C({0};1)")).union(&DefinableSet::cone(&c("P({0};2)")));
        assert_eq!(t, s);
    }

    #[test]
    fn points_are_tracked() {
        let k = c("P({};0)");
        let s = DefinableSet::cone(&k).with_point(&e("{0}"), false).with_point(&e("{-1}"), true);
        assert_eq!(s.minus(), &[e("{0}")]);
        assert_eq!(s.plus(), &[e("{-1}")]);
        assert!(!s.contains(&e("{0}")));
        assert!(s.contains(&e("{-1}")));
        assert!(s.contains(&e("{1}")));
        let back = s.with_point(&e("{0}"), true).with_point(&e("{-1}"), false);
        assert_eq!(back, DefinableSet::cone(&k));
    }

    #[test]
    fn json_round_trip() {
        let s = DefinableSet::from_parts(&[c("P({};2)"), c("C({-1};0)")], &[e("{-1}")], &[e("{1}")]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<DefinableSet>(&json).unwrap(), s);
        let unnormalised = r#"{"cones":["P({};1)","P({0};1)"]}"#;
        let parsed: DefinableSet = serde_json::from_str(unnormalised).unwrap();
        assert_eq!(parsed.cones(), &[c("P({};0)")]);
    }

    #[test]
    fn random_operations_agree_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sampler = EndSampler::new(8);
        let random_cone = |rng: &mut ChaCha8Rng| {
            let v = TreeVertex::on_end(&sampler.sample(rng), rng.random_range(-6..6));
            if rng.random_bool(0.5) {
                Cone::prefix(v)
            } else {
                Cone::coprefix(v)
            }
        };
        for _ in 0..100 {
            let a: Vec<Cone> = (0..rng.random_range(0..4)).map(|_| random_cone(&mut rng)).collect();
            let b: Vec<Cone> = (0..rng.random_range(0..4)).map(|_| random_cone(&mut rng)).collect();
            let pts: Vec<End> = (0..4).map(|_| sampler.sample(&mut rng)).collect();
            let sa = DefinableSet::from_parts(&a, &pts[..1], &pts[1..2]);
            let sb = DefinableSet::from_parts(&b, &pts[2..3], &pts[3..]);
            let ops = [sa.union(&sb), sa.intersect(&sb), sa.complement(), sa.difference(&sb)];
            for s in &ops {
                check_normal_form(s);
            }
            let probes = (0..1000).map(|_| sampler.sample(&mut rng)).chain(pts.iter().cloned());
            for x in probes {
                let (ia, ib) = (sa.contains(&x), sb.contains(&x));
                assert_eq!(ops[0].contains(&x), ia || ib);
                assert_eq!(ops[1].contains(&x), ia && ib);
                assert_eq!(ops[2].contains(&x), !ia);
                assert_eq!(ops[3].contains(&x), ia && !ib);
            }
        }
    }

    proptest! {
        #[test]
        fn from_parts_matches_definition(cs in proptest::collection::vec(cone(), 0..5),
                                         plus in proptest::collection::vec(point(), 0..3),
                                         minus in proptest::collection::vec(point(), 0..3)) {
            let s = DefinableSet::from_parts(&cs, &plus, &minus);
            check_normal_form(&s);
            for x in window() {
                let expected = (cs.iter().any(|c| c.contains(&x)) || plus.contains(&x)) && !minus.contains(&x);
                prop_assert_eq!(s.contains(&x), expected, "{} at {}", s, x);
            }
        }

        #[test]
        fn union_collapse_ignores_order(cs in proptest::collection::vec(cone(), 0..6), seed in any::<u64>()) {
            let mut shuffled = cs.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.random_range(0..=i));
            }
            prop_assert_eq!(union_collapse(&cs), union_collapse(&shuffled));
        }

        #[test]
        fn normal_form_is_canonical(a in set(), b in set()) {
            let same = window().iter().all(|x| a.contains(x) == b.contains(x));
            prop_assert_eq!(same, a == b);
            prop_assert_eq!(DefinableSet::from_parts(a.cones(), a.plus(), a.minus()), a.clone());
        }

        #[test]
        fn boolean_laws(a in set(), b in set()) {
            prop_assert_eq!(a.complement().complement(), a.clone());
            prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
            prop_assert!(a.intersect(&a.complement()).is_empty());
            prop_assert!(a.union(&a.complement()).is_full());
            for x in window() {
                prop_assert_eq!(a.union(&b).contains(&x), a.contains(&x) || b.contains(&x));
                prop_assert_eq!(a.intersect(&b).contains(&x), a.contains(&x) && b.contains(&x));
            }
        }
    }
}
