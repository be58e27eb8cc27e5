//! Orbits of the pointwise stabiliser of a finite parameter set `A`, and
//! the sets that are unions of them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cone::{cone_containing, cones_at, Cone};
use crate::definable::DefinableSet;
use crate::ends::End;
use crate::error::{Error, Result};
use crate::tree::{median, path, ray_step, tree_distance, TreeVertex};

/// Medians of all triples of distinct elements of `a`.
pub fn a_centres(a: &[End]) -> BTreeSet<TreeVertex> {
    let a = dedup(a);
    let mut out = BTreeSet::new();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            for k in j + 1..a.len() {
                out.insert(median(&a[i], &a[j], &a[k]).expect("distinct"));
            }
        }
    }
    out
}

/// The finite subtree spanned by the centres of a parameter set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ATree {
    pub vertices: BTreeSet<TreeVertex>,
    pub edges: BTreeSet<(TreeVertex, TreeVertex)>,
}

pub fn a_vertices(a: &[End]) -> ATree {
    let centres: Vec<TreeVertex> = a_centres(a).into_iter().collect();
    let mut tree = ATree::default();
    tree.vertices.extend(centres.iter().cloned());
    for (i, u) in centres.iter().enumerate() {
        for v in &centres[i + 1..] {
            let p = path(u, v);
            for pair in p.windows(2) {
                let (x, y) = (pair[0].clone(), pair[1].clone());
                tree.edges.insert(if x < y { (x, y) } else { (y, x) });
            }
            tree.vertices.extend(p);
        }
    }
    tree
}

fn dedup(a: &[End]) -> Vec<End> {
    let set: BTreeSet<End> = a.iter().cloned().collect();
    set.into_iter().collect()
}

/// Whether `w` lies on the ray from `v` toward `a`.
pub fn on_ray(v: &TreeVertex, a: &End, w: &TreeVertex) -> bool {
    match w.direction_to(v) {
        None => true,
        Some(back) => ray_step(w, a) != back,
    }
}

/// One orbit descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrbitFamily {
    /// A single cone at a non-centre vertex of the A-tree, missing `A`.
    TypeA(Cone),
    /// The cones hanging off the ray from a centre toward a parameter that
    /// is alone in its cone at that centre, one per vertex of the ray past
    /// the centre.
    TypeB { centre: TreeVertex, anchor: End },
}

/// Where an end outside `A` sits among the orbit descriptors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub family: usize,
    /// Distance from the centre for TypeB descriptors.
    pub depth: Option<u64>,
    pub cone: Cone,
}

#[derive(Clone, Debug)]
pub struct OrbitClassification {
    params: Vec<End>,
    centres: BTreeSet<TreeVertex>,
    tree: ATree,
    families: Vec<OrbitFamily>,
    /// For TypeB entries, a parameter outside the anchor's cone.
    guides: Vec<Option<End>>,
}

pub fn orbit_classification(a: &[End]) -> Result<OrbitClassification> {
    let params = dedup(a);
    if params.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: params.len(),
        });
    }
    let centres = a_centres(&params);
    let tree = a_vertices(&params);
    let mut families: Vec<(OrbitFamily, Option<End>)> = Vec::new();
    for w in tree.vertices.iter().filter(|w| !centres.contains(*w)) {
        for k in cones_at(w) {
            if !params.iter().any(|x| k.contains(x)) {
                families.push((OrbitFamily::TypeA(k), None));
            }
        }
    }
    for u in &centres {
        for k in cones_at(u) {
            let inside: Vec<&End> = params.iter().filter(|x| k.contains(x)).collect();
            if let [anchor] = inside[..] {
                let guide = params.iter().find(|x| !k.contains(x)).cloned();
                families.push((
                    OrbitFamily::TypeB {
                        centre: u.clone(),
                        anchor: anchor.clone(),
                    },
                    guide,
                ));
            }
        }
    }
    families.sort();
    let (families, guides) = families.into_iter().unzip();
    Ok(OrbitClassification {
        params,
        centres,
        tree,
        families,
        guides,
    })
}

impl OrbitClassification {
    pub fn params(&self) -> &[End] {
        &self.params
    }

    pub fn centres(&self) -> &BTreeSet<TreeVertex> {
        &self.centres
    }

    pub fn tree(&self) -> &ATree {
        &self.tree
    }

    pub fn families(&self) -> &[OrbitFamily] {
        &self.families
    }

    pub fn is_param(&self, x: &End) -> bool {
        self.params.binary_search(x).is_ok()
    }

    /// The vertex at distance `depth` from the centre along a TypeB ray.
    pub fn ray_vertex(&self, family: usize, depth: u64) -> Result<TreeVertex> {
        let (centre, anchor) = self.type_b(family)?;
        let mut v = centre.clone();
        for _ in 0..depth {
            v = v.neighbor(ray_step(&v, anchor));
        }
        Ok(v)
    }

    /// The member cone of a TypeB family at the given depth (at least 1).
    pub fn member_cone(&self, family: usize, depth: u64) -> Result<Cone> {
        if depth == 0 {
            return Err(Error::InvalidSelection("TypeB depths start at 1".into()));
        }
        let (_, anchor) = self.type_b(family)?;
        let v = self.ray_vertex(family, depth)?;
        let prev = self.ray_vertex(family, depth - 1)?;
        let forward = ray_step(&v, anchor);
        let back = v.direction_to(&prev).expect("adjacent");
        let side = crate::tree::Direction::ALL
            .into_iter()
            .find(|d| *d != forward && *d != back)
            .expect("three directions");
        Ok(Cone::at(&v, side))
    }

    /// The cone containing the anchor at the vertex of depth `depth - 1`;
    /// without the anchor it is the union of all member cones from `depth` on.
    pub fn tail_cone(&self, family: usize, depth: u64) -> Result<Cone> {
        if depth == 0 {
            return Err(Error::InvalidSelection("TypeB depths start at 1".into()));
        }
        let (_, anchor) = self.type_b(family)?;
        Ok(cone_containing(&self.ray_vertex(family, depth - 1)?, anchor))
    }

    fn type_b(&self, family: usize) -> Result<(&TreeVertex, &End)> {
        match self.families.get(family) {
            Some(OrbitFamily::TypeB { centre, anchor }) => Ok((centre, anchor)),
            Some(OrbitFamily::TypeA(_)) => {
                Err(Error::InvalidSelection(format!("descriptor {family} is not TypeB")))
            }
            None => Err(Error::InvalidSelection(format!("no descriptor {family}"))),
        }
    }

    /// The descriptor claiming `x`, or `None` for parameters.
    pub fn locate(&self, x: &End) -> Option<Located> {
        (0..self.families.len()).find_map(|i| self.claim(i, x))
    }

    /// Every descriptor whose cones contain `x`; one for each end outside `A`.
    pub fn claims(&self, x: &End) -> Vec<usize> {
        (0..self.families.len()).filter(|&i| self.claim(i, x).is_some()).collect()
    }

    fn claim(&self, family: usize, x: &End) -> Option<Located> {
        if self.is_param(x) {
            return None;
        }
        match &self.families[family] {
            OrbitFamily::TypeA(k) => k.contains(x).then(|| Located {
                family,
                depth: None,
                cone: k.clone(),
            }),
            OrbitFamily::TypeB { centre, anchor } => {
                if !cone_containing(centre, anchor).contains(x) {
                    return None;
                }
                let guide = self.guides[family].as_ref().expect("TypeB has a guide");
                let v = median(x, anchor, guide).expect("distinct");
                Some(Located {
                    family,
                    depth: Some(tree_distance(centre, &v)),
                    cone: cone_containing(&v, x),
                })
            }
        }
    }

    /// Every descriptor cone, TypeB families unrolled to `depth`.
    pub fn unrolled(&self, depth: u64) -> Vec<Located> {
        let mut out = Vec::new();
        for (i, f) in self.families.iter().enumerate() {
            match f {
                OrbitFamily::TypeA(k) => out.push(Located {
                    family: i,
                    depth: None,
                    cone: k.clone(),
                }),
                OrbitFamily::TypeB { .. } => {
                    for d in 1..=depth {
                        out.push(Located {
                            family: i,
                            depth: Some(d),
                            cone: self.member_cone(i, d).expect("TypeB"),
                        });
                    }
                }
            }
        }
        out
    }
}

/// Which member cones of a TypeB family are selected: finitely many depths,
/// and optionally every depth from some point on.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthSelection {
    finite: BTreeSet<u64>,
    tail_from: Option<u64>,
}

impl DepthSelection {
    pub fn none() -> Self {
        DepthSelection::default()
    }

    pub fn depths(depths: impl IntoIterator<Item = u64>) -> Self {
        DepthSelection {
            finite: depths.into_iter().collect(),
            tail_from: None,
        }
    }

    pub fn tail(from: u64) -> Self {
        DepthSelection {
            finite: BTreeSet::new(),
            tail_from: Some(from),
        }
    }

    pub fn with_tail(mut self, from: u64) -> Self {
        self.tail_from = Some(from);
        self
    }

    /// Reads a selection off an indicator over depths. The indicator must be
    /// constant on `(horizon, 2 * horizon]`; that value is taken to persist.
    pub fn from_indicator(f: impl Fn(u64) -> bool, horizon: u64) -> Result<Self> {
        let horizon = horizon.max(1);
        let last = f(2 * horizon);
        if (horizon + 1..=2 * horizon).any(|d| f(d) != last) {
            return Err(Error::InvalidSelection(format!(
                "indicator is not constant beyond depth {horizon}"
            )));
        }
        let mut start = horizon + 1;
        while start > 1 && f(start - 1) == last {
            start -= 1;
        }
        Ok(DepthSelection {
            finite: (1..start).filter(|&d| f(d)).collect(),
            tail_from: last.then_some(start),
        })
    }

    pub fn contains(&self, depth: u64) -> bool {
        self.finite.contains(&depth) || self.tail_from.is_some_and(|t| depth >= t)
    }

    pub fn finite(&self) -> &BTreeSet<u64> {
        &self.finite
    }

    pub fn tail_from(&self) -> Option<u64> {
        self.tail_from
    }
}

/// A choice of orbit descriptors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selection {
    Cone(usize),
    Family { index: usize, depths: DepthSelection },
}

/// Parameters forced into or out of a set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exceptions {
    pub plus: Vec<End>,
    pub minus: Vec<End>,
}

/// A set written relative to parameters `A`: disjoint cones, each at an
/// A-vertex and missing `A`, or at a vertex of a ray from a centre toward a
/// parameter; adjusted by parameters only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterForm {
    pub cones: Vec<Cone>,
    pub plus: Vec<End>,
    pub minus: Vec<End>,
}

impl ParameterForm {
    pub fn contains(&self, x: &End) -> bool {
        if self.minus.contains(x) {
            return false;
        }
        self.plus.contains(x) || self.cones.iter().any(|c| c.contains(x))
    }

    pub fn to_set(&self) -> DefinableSet {
        DefinableSet::from_parts(&self.cones, &self.plus, &self.minus)
    }

    /// Checks the shape against the parameters of `cls`: pairwise disjoint
    /// cones, each at an A-vertex and missing `A`, or at a vertex of some
    /// ray from a centre toward a parameter; exceptions among the parameters.
    pub fn is_parameter_shaped(&self, cls: &OrbitClassification) -> bool {
        let disjoint = self.cones.iter().enumerate().all(|(i, a)| {
            self.cones[i + 1..]
                .iter()
                .all(|b| crate::cone::relate(a, b) == crate::cone::ConeRelation::Disjoint)
        });
        let exceptions_ok = self.plus.iter().chain(&self.minus).all(|p| cls.is_param(p));
        let cones_ok = self.cones.iter().all(|k| {
            let base = k.base_vertex();
            let type_i = cls.tree.vertices.contains(&base) && !cls.params.iter().any(|a| k.contains(a));
            let type_ii = cls
                .centres
                .iter()
                .any(|v| cls.params.iter().any(|a| on_ray(v, a, &base)));
            type_i || type_ii
        });
        disjoint && exceptions_ok && cones_ok
    }
}

/// The set selected by orbit descriptors, adjusted by parameter exceptions.
pub fn normalize_from_orbits(
    cls: &OrbitClassification,
    selections: &[Selection],
    exceptions: &Exceptions,
) -> Result<ParameterForm> {
    if let Some(p) = exceptions.plus.iter().chain(&exceptions.minus).find(|p| !cls.is_param(p)) {
        return Err(Error::InvalidSelection(format!("exception {p} is not a parameter")));
    }
    let mut cones = Vec::new();
    let mut removed: BTreeSet<End> = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for sel in selections {
        match sel {
            Selection::Cone(i) => match cls.families.get(*i) {
                Some(OrbitFamily::TypeA(k)) => {
                    if seen.insert(*i) {
                        cones.push(k.clone());
                    }
                }
                _ => return Err(Error::InvalidSelection(format!("descriptor {i} is not TypeA"))),
            },
            Selection::Family { index, depths } => {
                let (_, anchor) = cls.type_b(*index)?;
                if !seen.insert(*index) {
                    return Err(Error::InvalidSelection(format!("descriptor {index} selected twice")));
                }
                if depths.finite.contains(&0) || depths.tail_from == Some(0) {
                    return Err(Error::InvalidSelection("TypeB depths start at 1".into()));
                }
                for &d in &depths.finite {
                    if depths.tail_from.is_none_or(|t| d < t) {
                        cones.push(cls.member_cone(*index, d)?);
                    }
                }
                if let Some(t) = depths.tail_from {
                    cones.push(cls.tail_cone(*index, t)?);
                    removed.insert(anchor.clone());
                }
            }
        }
    }
    let plus: BTreeSet<End> = exceptions.plus.iter().cloned().collect();
    let minus: BTreeSet<End> = exceptions.minus.iter().cloned().collect();
    let in_cones = |p: &End| cones.iter().any(|c: &Cone| c.contains(p));
    let mut form = ParameterForm {
        cones: Vec::new(),
        plus: Vec::new(),
        minus: Vec::new(),
    };
    for p in &cls.params {
        let member = !minus.contains(p) && (plus.contains(p) || (in_cones(p) && !removed.contains(p)));
        match (member, in_cones(p)) {
            (true, false) => form.plus.push(p.clone()),
            (false, true) => form.minus.push(p.clone()),
            _ => {}
        }
    }
    cones.sort();
    form.cones = cones;
    Ok(form)
}

/// Recovers the orbit decomposition of a set defined over the parameters of
/// `cls`, and returns it in parameter form.
pub fn parameter_form(cls: &OrbitClassification, set: &DefinableSet) -> Result<ParameterForm> {
    let covers = |part: &DefinableSet| part.difference(set).is_empty();
    let misses = |part: &DefinableSet| part.intersect(set).is_empty();
    let mut selections = Vec::new();
    for (i, f) in cls.families.iter().enumerate() {
        match f {
            OrbitFamily::TypeA(k) => {
                let part = DefinableSet::cone(k);
                if covers(&part) {
                    selections.push(Selection::Cone(i));
                } else if !misses(&part) {
                    return Err(Error::NotParameterShaped(format!("{k} is split by {set}")));
                }
            }
            OrbitFamily::TypeB { anchor, .. } => {
                let mut depths = DepthSelection::none();
                let mut d = 1;
                loop {
                    let tail = DefinableSet::cone(&cls.tail_cone(i, d)?).with_point(anchor, false);
                    if covers(&tail) {
                        depths.tail_from = Some(d);
                        break;
                    }
                    if misses(&tail) {
                        break;
                    }
                    let member = DefinableSet::cone(&cls.member_cone(i, d)?);
                    if covers(&member) {
                        depths.finite.insert(d);
                    } else if !misses(&member) {
                        return Err(Error::NotParameterShaped(format!(
                            "member cone at depth {d} of descriptor {i} is split by {set}"
                        )));
                    }
                    d += 1;
                }
                if depths != DepthSelection::none() {
                    selections.push(Selection::Family { index: i, depths });
                }
            }
        }
    }
    let (plus, minus): (Vec<End>, Vec<End>) = (
        cls.params.iter().filter(|p| set.contains(p)).cloned().collect(),
        cls.params.iter().filter(|p| !set.contains(p)).cloned().collect(),
    );
    let form = normalize_from_orbits(cls, &selections, &Exceptions { plus, minus })?;
    if form.to_set() != *set {
        return Err(Error::NotParameterShaped(format!("{set} is not a union of orbits")));
    }
    Ok(form)
}
