//! Balls in the distance-transitive graphs Γ_{k,l}: copies of K_{k+1} glued
//! in a treelike way, `l` copies through every vertex.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SIZE_CAP: u128 = 1_000_000;

const NONE: u32 = u32::MAX;

/// Number of vertices at distance `s` from a vertex: `l k^s (l-1)^(s-1)`.
pub fn gamma_s(k: u64, l: u64, s: u32) -> Option<u128> {
    if s == 0 {
        return Some(1);
    }
    let (k, l) = (k as u128, l as u128);
    l.checked_mul(k.checked_pow(s)?)?.checked_mul((l - 1).checked_pow(s - 1)?)
}

/// Number of vertices within distance `s`:
/// `1 + l k ((l-1)^s k^s - 1) / ((l-1) k - 1)`.
pub fn ball_size(k: u64, l: u64, s: u32) -> Option<u128> {
    let (k, l) = (k as u128, l as u128);
    let q = (l - 1).checked_mul(k)?;
    let num = q.checked_pow(s)?.checked_sub(1)?;
    Some(1 + l.checked_mul(k)?.checked_mul(num)? / (q - 1))
}

fn check_params(k: u64, l: u64) -> Result<()> {
    if k < 2 || l < 3 {
        return Err(Error::InvalidParameters(format!("need k >= 2 and l >= 3, got k={k}, l={l}")));
    }
    Ok(())
}

/// The ball of radius `radius` about a root vertex of Γ_{k,l}.
///
/// A vertex is named by the clique slot and position taken at each step
/// away from the root. Vertices are stored in BFS order, so the members a
/// vertex adds to its cliques are contiguous.
#[derive(Clone)]
pub struct GammaBall {
    k: u64,
    l: u64,
    radius: u32,
    owner: Vec<u32>,
    slot: Vec<u16>,
    position: Vec<u16>,
    depth: Vec<u32>,
    first_child: Vec<u32>,
}

pub fn build_ball(k: u64, l: u64, radius: u32) -> Result<GammaBall> {
    build_ball_capped(k, l, radius, DEFAULT_SIZE_CAP)
}

pub fn build_ball_capped(k: u64, l: u64, radius: u32, cap: u128) -> Result<GammaBall> {
    check_params(k, l)?;
    if radius == 0 {
        return Err(Error::InvalidParameters("radius must be at least 1".into()));
    }
    if k > u16::MAX as u64 || l > u16::MAX as u64 {
        return Err(Error::InvalidParameters("k and l must fit in 16 bits".into()));
    }
    let projected = ball_size(k, l, radius).unwrap_or(u128::MAX);
    if projected > cap || projected >= NONE as u128 {
        return Err(Error::SizeCap { projected, cap });
    }
    let n = projected as usize;
    let mut ball = GammaBall {
        k,
        l,
        radius,
        owner: Vec::with_capacity(n),
        slot: Vec::with_capacity(n),
        position: Vec::with_capacity(n),
        depth: Vec::with_capacity(n),
        first_child: Vec::with_capacity(n),
    };
    ball.push(NONE, 0, 0, 0);
    let mut next = 0usize;
    while next < ball.len() {
        let v = next as u32;
        next += 1;
        let d = ball.depth[next - 1];
        ball.first_child[v as usize] = ball.len() as u32;
        if d == radius {
            continue;
        }
        for s in 0..ball.cliques_of(v) {
            for p in 0..k {
                ball.push(v, s as u16, p as u16, d + 1);
            }
        }
    }
    debug_assert_eq!(ball.len(), n);
    Ok(ball)
}

impl GammaBall {
    fn push(&mut self, owner: u32, slot: u16, position: u16, depth: u32) {
        self.owner.push(owner);
        self.slot.push(slot);
        self.position.push(position);
        self.depth.push(depth);
        self.first_child.push(NONE);
    }

    fn cliques_of(&self, v: u32) -> u64 {
        if v == 0 {
            self.l
        } else {
            self.l - 1
        }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn dist_from_root(&self, v: u32) -> u32 {
        self.depth[v as usize]
    }

    /// Slot and position pairs from the root down to `v`.
    pub fn word(&self, v: u32) -> Vec<(u16, u16)> {
        let mut out = Vec::new();
        let mut a = v;
        while a != 0 {
            out.push((self.slot[a as usize], self.position[a as usize]));
            a = self.owner[a as usize];
        }
        out.reverse();
        out
    }

    pub fn word_string(&self, v: u32) -> String {
        let w = self.word(v);
        if w.is_empty() {
            return "root".into();
        }
        w.iter().map(|(s, p)| format!("{s}.{p}")).collect::<Vec<_>>().join("/")
    }

    /// Neighbours of `v` that lie in the ball.
    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        let i = v as usize;
        let mut out = Vec::new();
        let o = self.owner[i];
        if o != NONE {
            out.push(o);
            let base = self.first_child[o as usize] + self.slot[i] as u32 * self.k as u32;
            out.extend((base..base + self.k as u32).filter(|&w| w != v));
        }
        if self.depth[i] < self.radius {
            let first = self.first_child[i];
            out.extend(first..first + (self.cliques_of(v) * self.k) as u32);
        }
        out
    }

    pub fn adjacent(&self, u: u32, v: u32) -> bool {
        self.distance(u, v) == 1
    }

    /// Graph distance, from the clique tree.
    pub fn distance(&self, u: u32, v: u32) -> u32 {
        let (mut a, mut b) = (u, v);
        let mut steps = 0;
        while self.depth[a as usize] > self.depth[b as usize] {
            a = self.owner[a as usize];
            steps += 1;
        }
        while self.depth[b as usize] > self.depth[a as usize] {
            b = self.owner[b as usize];
            steps += 1;
        }
        loop {
            if a == b {
                return steps;
            }
            let (ai, bi) = (a as usize, b as usize);
            if self.owner[ai] == self.owner[bi] && self.slot[ai] == self.slot[bi] {
                return steps + 1;
            }
            a = self.owner[ai];
            b = self.owner[bi];
            steps += 2;
        }
    }

    /// Distances from `src` to every vertex within `limit`, by BFS inside
    /// the ball. Unreached vertices get `u32::MAX`.
    pub fn bfs(&self, src: u32, limit: u32) -> Vec<u32> {
        let mut dist = vec![NONE; self.len()];
        dist[src as usize] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            if d == limit {
                continue;
            }
            for w in self.neighbors(v) {
                if dist[w as usize] == NONE {
                    dist[w as usize] = d + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices within `r` of `v`, found by BFS, in increasing order.
    pub fn ball_around(&self, v: u32, r: u32) -> Vec<u32> {
        self.local_bfs(v, r).into_iter().map(|(w, _)| w).collect::<BTreeSet<_>>().into_iter().collect()
    }

    fn local_bfs(&self, src: u32, limit: u32) -> Vec<(u32, u32)> {
        let mut seen = vec![(src, 0u32)];
        let mut visited = std::collections::HashSet::from([src]);
        let mut i = 0;
        while i < seen.len() {
            let (v, d) = seen[i];
            i += 1;
            if d == limit {
                continue;
            }
            for w in self.neighbors(v) {
                if visited.insert(w) {
                    seen.push((w, d + 1));
                }
            }
        }
        seen
    }

    /// Vertices whose ball of radius `r` lies entirely in this ball.
    pub fn safe_region(&self, r: u32) -> Vec<u32> {
        let bound = self.radius.saturating_sub(r);
        if r > self.radius {
            return Vec::new();
        }
        (0..self.len() as u32).take_while(|&v| self.depth[v as usize] <= bound).collect()
    }

    /// Vertex counts at each distance from the root.
    pub fn sphere_counts(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.radius as usize + 1];
        for &d in &self.depth {
            out[d as usize] += 1;
        }
        out
    }

    /// Whether the neighbourhood of `v` splits into `l` disjoint cliques of
    /// size `k` with no edges between them.
    pub fn neighborhood_is_cliques(&self, v: u32) -> bool {
        let nb = self.neighbors(v);
        if nb.len() as u64 != self.l * self.k {
            return false;
        }
        let mut parts: Vec<Vec<u32>> = Vec::new();
        for &w in &nb {
            match parts.iter_mut().find(|p| self.adjacent(p[0], w)) {
                Some(p) => p.push(w),
                None => parts.push(vec![w]),
            }
        }
        parts.len() as u64 == self.l
            && parts.iter().all(|p| {
                p.len() as u64 == self.k
                    && p.iter().all(|&a| p.iter().all(|&b| a == b || self.adjacent(a, b)))
            })
            && parts.iter().enumerate().all(|(i, p)| {
                parts[i + 1..]
                    .iter()
                    .all(|q| p.iter().all(|&a| q.iter().all(|&b| !self.adjacent(a, b))))
            })
    }
}

impl fmt::Debug for GammaBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GammaBall(k={}, l={}, radius={}, {} vertices)", self.k, self.l, self.radius, self.len())
    }
}

/// Sphere and ball counts from BFS against the closed forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub k: u64,
    pub l: u64,
    pub radius: u32,
    pub sphere_counts: Vec<u64>,
    pub expected_spheres: Vec<u64>,
    pub ball_counts: Vec<u64>,
    pub expected_balls: Vec<u64>,
    pub interior_degree_ok: bool,
    pub holds: bool,
}

pub fn count_report(k: u64, l: u64, radius: u32) -> Result<CountReport> {
    let ball = build_ball(k, l, radius)?;
    let sphere_counts = ball.sphere_counts();
    let mut ball_counts = Vec::new();
    let mut acc = 0;
    for c in &sphere_counts {
        acc += c;
        ball_counts.push(acc);
    }
    let expected_spheres: Vec<u64> = (0..=radius).map(|s| gamma_s(k, l, s).unwrap() as u64).collect();
    let expected_balls: Vec<u64> = (0..=radius).map(|s| ball_size(k, l, s).unwrap() as u64).collect();
    let interior_degree_ok = (0..ball.len() as u32)
        .filter(|&v| ball.dist_from_root(v) < radius)
        .all(|v| ball.neighbors(v).len() as u64 == l * k);
    let holds = sphere_counts == expected_spheres && ball_counts == expected_balls && interior_degree_ok;
    Ok(CountReport {
        k,
        l,
        radius,
        sphere_counts,
        expected_spheres,
        ball_counts,
        expected_balls,
        interior_degree_ok,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub k: u64,
    pub l: u64,
    pub distances: Vec<u32>,
    pub radius: u32,
    pub pairs_checked: u64,
    /// Pairs within `2n` that have a common witness.
    pub near_pairs: u64,
    /// `(u, v, distance)` pairs where the equivalence breaks.
    pub violations: Vec<(String, String, u32)>,
    pub holds: bool,
}

/// With `n` the largest distance in the set: checks that two vertices are
/// within `2n` exactly when some third vertex lies at an allowed distance
/// from both.
///
/// The first vertex ranges over the root ball of radius `R - 2n` and the
/// second over radius `R - n`, so pairs up to `3n` apart are covered.
pub fn claim_check(k: u64, l: u64, distances: &[u32]) -> Result<ClaimReport> {
    let set: BTreeSet<u32> = distances.iter().copied().collect();
    let Some(&n) = set.iter().next_back() else {
        return Err(Error::InvalidParameters("empty distance set".into()));
    };
    if set.contains(&0) {
        return Err(Error::InvalidParameters("distances must be positive".into()));
    }
    claim_check_in(&build_ball(k, l, 3 * n)?, &set)
}

pub fn claim_check_in(ball: &GammaBall, set: &BTreeSet<u32>) -> Result<ClaimReport> {
    let n = *set.iter().next_back().expect("non-empty");
    if ball.radius < 3 * n {
        return Err(Error::RadiusTooSmall {
            radius: ball.radius,
            needed: 3 * n,
        });
    }
    let outer = ball.safe_region(n);
    let mut report = ClaimReport {
        k: ball.k,
        l: ball.l,
        distances: set.iter().copied().collect(),
        radius: ball.radius,
        pairs_checked: 0,
        near_pairs: 0,
        violations: Vec::new(),
        holds: true,
    };
    let mut mark = vec![false; ball.len()];
    for u in ball.safe_region(2 * n) {
        let witnesses: Vec<u32> = ball
            .local_bfs(u, n)
            .into_iter()
            .filter(|(_, d)| set.contains(d))
            .map(|(w, _)| w)
            .collect();
        let mut touched = Vec::new();
        for &w in &witnesses {
            for (v, d) in ball.local_bfs(w, n) {
                if set.contains(&d) && !mark[v as usize] {
                    mark[v as usize] = true;
                    touched.push(v);
                }
            }
        }
        for &v in &outer {
            let d = ball.distance(u, v);
            let reached = mark[v as usize];
            report.pairs_checked += 1;
            if reached && d <= 2 * n {
                report.near_pairs += 1;
            }
            if reached != (d <= 2 * n) {
                report.holds = false;
                if report.violations.len() < 20 {
                    report.violations.push((ball.word_string(u), ball.word_string(v), d));
                }
            }
        }
        for v in touched {
            mark[v as usize] = false;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub k: u64,
    pub l: u64,
    pub n: u32,
    /// `|B_2n| - ((l-1)k)^(2n)`.
    pub gamma: u64,
    pub adjacent_pairs: u64,
    pub adjacent_counts: BTreeSet<u64>,
    pub other_pairs: u64,
    pub max_other_count: u64,
    pub holds: bool,
}

/// Intersection sizes of radius-`2n` balls for every pair of distinct
/// vertices in the safe region.
pub fn adjacency_reconstruction(k: u64, l: u64, n: u32) -> Result<ReconstructionReport> {
    if n == 0 {
        return Err(Error::InvalidParameters("n must be positive".into()));
    }
    adjacency_reconstruction_in(&build_ball(k, l, 4 * n + 1)?, n)
}

pub fn adjacency_reconstruction_in(ball: &GammaBall, n: u32) -> Result<ReconstructionReport> {
    if ball.radius < 4 * n + 1 {
        return Err(Error::RadiusTooSmall {
            radius: ball.radius,
            needed: 4 * n + 1,
        });
    }
    let (k, l) = (ball.k, ball.l);
    let q = ((l - 1) * k) as u128;
    let gamma = ball_size(k, l, 2 * n)
        .zip(q.checked_pow(2 * n))
        .map(|(b, p)| (b - p) as u64)
        .ok_or_else(|| Error::InvalidParameters("overflow".into()))?;
    let safe = ball.safe_region(2 * n);
    let balls: Vec<Vec<u32>> = safe.iter().map(|&u| ball.ball_around(u, 2 * n)).collect();
    let mut report = ReconstructionReport {
        k,
        l,
        n,
        gamma,
        adjacent_pairs: 0,
        adjacent_counts: BTreeSet::new(),
        other_pairs: 0,
        max_other_count: 0,
        holds: true,
    };
    for i in 0..safe.len() {
        for j in i + 1..safe.len() {
            let c = sorted_intersection(&balls[i], &balls[j]);
            if ball.adjacent(safe[i], safe[j]) {
                report.adjacent_pairs += 1;
                report.adjacent_counts.insert(c);
                report.holds &= c == gamma;
            } else {
                report.other_pairs += 1;
                report.max_other_count = report.max_other_count.max(c);
                report.holds &= c < gamma;
            }
        }
    }
    Ok(report)
}

fn sorted_intersection(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub t: u64,
    pub radius: u32,
    pub components: usize,
    pub components_are_parity_classes: bool,
    /// Sphere counts in the distance-two graph about a vertex of each
    /// component, as far as the ball allows.
    pub sphere_counts: [Vec<u64>; 2],
    pub expected: Vec<u64>,
    pub holds: bool,
}

/// Splits the distance-two graph on a ball of the `t`-regular tree into its
/// components and compares each with Γ_{t-1,t}.
pub fn t2_decomposition(t: u64, radius: u32) -> Result<DecompositionReport> {
    if t < 3 {
        return Err(Error::InvalidParameters(format!("need t >= 3, got {t}")));
    }
    let projected = (0..=radius).try_fold(0u128, |acc, s| {
        let sphere = if s == 0 { Some(1) } else { (t as u128).checked_mul(((t - 1) as u128).checked_pow(s - 1)?) };
        acc.checked_add(sphere?)
    });
    let projected = projected.unwrap_or(u128::MAX);
    if projected > DEFAULT_SIZE_CAP {
        return Err(Error::SizeCap {
            projected,
            cap: DEFAULT_SIZE_CAP,
        });
    }
    // The tree ball in BFS order, by parent pointers.
    let mut parent: Vec<u32> = vec![NONE];
    let mut depth: Vec<u32> = vec![0];
    let mut children: Vec<Vec<u32>> = vec![Vec::new()];
    let mut i = 0;
    while i < parent.len() {
        if depth[i] < radius {
            let count = if i == 0 { t } else { t - 1 };
            for _ in 0..count {
                let c = parent.len() as u32;
                parent.push(i as u32);
                depth.push(depth[i] + 1);
                children.push(Vec::new());
                children[i].push(c);
            }
        }
        i += 1;
    }
    let tree_nb = |v: usize| -> Vec<u32> {
        let mut out = children[v].clone();
        if parent[v] != NONE {
            out.push(parent[v]);
        }
        out
    };
    let square_nb = |v: usize| -> Vec<u32> {
        let mut out = BTreeSet::new();
        for m in tree_nb(v) {
            for w in tree_nb(m as usize) {
                if w as usize != v {
                    out.insert(w);
                }
            }
        }
        out.into_iter().collect()
    };
    let square_bfs = |src: usize| -> Vec<u32> {
        let mut dist = vec![NONE; parent.len()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for w in square_nb(v) {
                if dist[w as usize] == NONE {
                    dist[w as usize] = dist[v] + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        dist
    };
    let mut component = vec![NONE; parent.len()];
    let mut components = 0usize;
    for v in 0..parent.len() {
        if component[v] == NONE {
            for (w, d) in square_bfs(v).iter().enumerate() {
                if *d != NONE {
                    component[w] = components as u32;
                }
            }
            components += 1;
        }
    }
    let components_are_parity_classes =
        (0..parent.len()).all(|v| (component[v] == component[0]) == depth[v].is_multiple_of(2));
    // Centres: the root and one of its neighbours. A square-graph sphere of
    // radius s about a centre at depth c is complete when c + 2s <= radius.
    let mut sphere_counts: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
    for (slot, centre) in [0usize, 1].into_iter().enumerate() {
        if centre >= parent.len() {
            continue;
        }
        let dist = square_bfs(centre);
        let c = depth[centre];
        let max_s = radius.saturating_sub(c) / 2;
        let mut counts = vec![0u64; max_s as usize + 1];
        for d in dist {
            if d != NONE && d <= max_s {
                counts[d as usize] += 1;
            }
        }
        sphere_counts[slot] = counts;
    }
    let max_s = sphere_counts[0].len().max(sphere_counts[1].len()) as u32;
    let expected: Vec<u64> = (0..max_s).map(|s| gamma_s(t - 1, t, s).unwrap() as u64).collect();
    let holds = components == 2
        && components_are_parity_classes
        && sphere_counts.iter().all(|c| c[..] == expected[..c.len()]);
    Ok(DecompositionReport {
        t,
        radius,
        components,
        components_are_parity_classes,
        sphere_counts,
        expected,
        holds,
    })
}
