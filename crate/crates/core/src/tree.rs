//! The trivalent tree whose ends are the finite-support sequences.
//!
//! A vertex is a level `n` with a prefix: the support of a sequence
//! restricted to `(-∞, n)`. Its neighbours are the restriction to
//! `(-∞, n-1)` and the two extensions to `(-∞, n+1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ends::{first_diff, End, Level};
use crate::error::{parse_err, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    prefix: End,
    level: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Down,
    Ext0,
    Ext1,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Down, Direction::Ext0, Direction::Ext1];

    pub fn ext(bit: bool) -> Direction {
        if bit {
            Direction::Ext1
        } else {
            Direction::Ext0
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl TreeVertex {
    pub fn new(prefix: End, level: i64) -> Result<Self> {
        if prefix.max_index().is_some_and(|m| m >= level) {
            return Err(Error::InvalidParameters(format!(
                "prefix {prefix} has an index at or above level {level}"
            )));
        }
        Ok(TreeVertex { prefix, level })
    }

    /// The vertex `(x restricted below n, n)`, which lies on every ray of `x`
    /// from far enough down.
    pub fn on_end(x: &End, level: i64) -> Self {
        TreeVertex {
            prefix: x.restrict_below(level),
            level,
        }
    }

    pub fn root() -> Self {
        TreeVertex {
            prefix: End::zero(),
            level: 0,
        }
    }

    pub fn prefix(&self) -> &End {
        &self.prefix
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn neighbor(&self, dir: Direction) -> TreeVertex {
        match dir {
            Direction::Down => TreeVertex::on_end(&self.prefix, self.level - 1),
            Direction::Ext0 => TreeVertex {
                prefix: self.prefix.clone(),
                level: self.level + 1,
            },
            Direction::Ext1 => TreeVertex {
                prefix: self.prefix.with_bit(self.level, true),
                level: self.level + 1,
            },
        }
    }

    pub fn neighbors(&self) -> [TreeVertex; 3] {
        Direction::ALL.map(|d| self.neighbor(d))
    }

    /// True when `x` restricted below this level equals the prefix.
    pub fn lies_below(&self, x: &End) -> bool {
        x.agrees_below(&self.prefix, self.level)
    }

    /// The first step on the path from `self` to `other`, or `None` if equal.
    pub fn direction_to(&self, other: &TreeVertex) -> Option<Direction> {
        if self == other {
            return None;
        }
        if other.level > self.level && self.lies_below(&other.prefix) {
            Some(Direction::ext(other.prefix.bit(self.level)))
        } else {
            Some(Direction::Down)
        }
    }
}

/// Graph distance in the tree.
pub fn tree_distance(u: &TreeVertex, v: &TreeVertex) -> u64 {
    let meet = meeting_level(u, v);
    ((u.level - meet) + (v.level - meet)) as u64
}

/// Level of the lowest vertex on the path between `u` and `v`.
fn meeting_level(u: &TreeVertex, v: &TreeVertex) -> i64 {
    let m = u.level.min(v.level);
    match first_diff(&u.prefix, &v.prefix) {
        Level::Finite(i) => i.min(m),
        Level::Infinite => m,
    }
}

/// Vertices of the path from `u` to `v`, both included.
pub fn path(u: &TreeVertex, v: &TreeVertex) -> Vec<TreeVertex> {
    let meet = meeting_level(u, v);
    let mut out: Vec<TreeVertex> = (meet..=u.level)
        .rev()
        .map(|n| TreeVertex::on_end(&u.prefix, n))
        .collect();
    out.extend((meet + 1..=v.level).map(|n| TreeVertex::on_end(&v.prefix, n)));
    out
}

/// The direction at `v` of the ray toward the end `x`.
pub fn ray_step(v: &TreeVertex, x: &End) -> Direction {
    if v.lies_below(x) {
        Direction::ext(x.bit(v.level))
    } else {
        Direction::Down
    }
}

/// The vertices of the ray from `v` toward `x`, starting at `v`.
pub fn ray<'a>(v: &TreeVertex, x: &'a End) -> impl Iterator<Item = TreeVertex> + 'a {
    std::iter::successors(Some(v.clone()), move |w| Some(w.neighbor(ray_step(w, x))))
}

/// Whether `x` and `y` leave `a` along the same edge.
pub fn e_a(a: &TreeVertex, x: &End, y: &End) -> bool {
    ray_step(a, x) == ray_step(a, y)
}

/// The two-way infinite path joining two distinct ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    ends: [End; 2],
    branch: TreeVertex,
}

impl Line {
    /// The lowest vertex of the line, where the two ends part.
    pub fn branch(&self) -> &TreeVertex {
        &self.branch
    }

    pub fn ends(&self) -> &[End; 2] {
        &self.ends
    }

    pub fn contains(&self, w: &TreeVertex) -> bool {
        w.level >= self.branch.level && self.ends.iter().any(|x| w.lies_below(x))
    }

    /// Whether two lines share a vertex, from their branch levels alone.
    pub fn meets(&self, other: &Line) -> bool {
        let need = Level::Finite(self.branch.level.max(other.branch.level));
        self.ends
            .iter()
            .any(|a| other.ends.iter().any(|c| first_diff(a, c) >= need))
    }
}

pub fn line(x: &End, y: &End) -> Result<Line> {
    let Level::Finite(i) = first_diff(x, y) else {
        return Err(Error::NotDistinct);
    };
    Ok(Line {
        ends: [x.clone(), y.clone()],
        branch: TreeVertex::on_end(x, i),
    })
}

/// The vertex at which three distinct ends lie in three distinct cones.
pub fn median(x: &End, y: &End, z: &End) -> Result<TreeVertex> {
    let pairs = [(x, first_diff(x, y)), (y, first_diff(y, z)), (x, first_diff(x, z))];
    if pairs.iter().any(|(_, l)| *l == Level::Infinite) {
        return Err(Error::NotDistinct);
    }
    let (a, level) = pairs.iter().max_by_key(|(_, l)| *l).expect("three pairs");
    let i = level.finite().expect("distinct");
    Ok(TreeVertex::on_end(a, i))
}

/// `D(x, y; z, w)` read off the tree: the lines `l(x,y)` and `l(z,w)` are
/// disjoint, with the usual degenerate cases for repeated arguments.
pub fn d_from_tree(x: &End, y: &End, z: &End, w: &End) -> bool {
    if x == y {
        return z != x && w != x;
    }
    if z == w {
        return x != z && y != z;
    }
    if x == z || x == w || y == z || y == w {
        return false;
    }
    let (l1, l2) = (line(x, y).expect("distinct"), line(z, w).expect("distinct"));
    !l1.meets(&l2)
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{})", self.prefix, self.level)
    }
}

impl fmt::Debug for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for TreeVertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| parse_err(s, "expected `({..};n)`"))?;
        let (prefix, level) = inner
            .rsplit_once(';')
            .ok_or_else(|| parse_err(s, "missing `;`"))?;
        let prefix: End = prefix.parse()?;
        let level: i64 = level
            .trim()
            .parse()
            .map_err(|e| parse_err(s, format!("bad level: {e}")))?;
        TreeVertex::new(prefix, level).map_err(|e| parse_err(s, e.to_string()))
    }
}

impl Serialize for TreeVertex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TreeVertex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ends::{all_ends_in, d_from_c, EndSampler};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{HashMap, VecDeque};

    fn v(s: &str) -> TreeVertex {
        s.parse().unwrap()
    }

    fn e(s: &str) -> End {
        s.parse().unwrap()
    }

    /// BFS distances from `start` out to `radius`.
    fn bfs(start: &TreeVertex, radius: u64) -> HashMap<TreeVertex, u64> {
        let mut dist = HashMap::from([(start.clone(), 0)]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            if d == radius {
                continue;
            }
            for w in u.neighbors() {
                if !dist.contains_key(&w) {
                    dist.insert(w.clone(), d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Line membership by walking both rays out from the branch vertex for a
    /// bounded number of steps.
    fn line_window(x: &End, y: &End, steps: usize) -> Vec<TreeVertex> {
        let b = line(x, y).unwrap().branch().clone();
        let mut out: Vec<_> = ray(&b, x).take(steps).collect();
        out.extend(ray(&b, y).take(steps).skip(1));
        out
    }

    fn vertex() -> impl Strategy<Value = TreeVertex> {
        (-6i64..6, proptest::collection::btree_set(-12i64..12, 0..5)).prop_map(|(n, s)| {
            TreeVertex::on_end(&End::new(s), n)
        })
    }

    fn end() -> impl Strategy<Value = End> {
        proptest::collection::btree_set(-8i64..8, 0..6).prop_map(End::new)
    }

    #[test]
    fn neighbor_examples() {
        assert_eq!(v("({};1)").neighbor(Direction::Down), v("({};0)"));
        assert_eq!(v("({};0)").neighbor(Direction::Ext1), v("({0};1)"));
        assert_eq!(v("({0,3};4)").neighbor(Direction::Down), v("({0};3)"));
        assert!(TreeVertex::new(e("{2}"), 2).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(tree_distance(&v("({};0)"), &v("({};1)")), 1);
        assert_eq!(tree_distance(&v("({0};1)"), &v("({};1)")), 2);
        assert_eq!(tree_distance(&v("({-1};3)"), &v("({-1};3)")), 0);
    }

    #[test]
    fn distance_matches_bfs_on_radius_eight_ball() {
        let centre = v("({-1};1)");
        let ball: Vec<_> = bfs(&centre, 8).into_keys().collect();
        assert_eq!(ball.len(), 1 + 3 * ((1 << 8) - 1));
        // Exhaustive over pairs from a subsample of sources.
        for u in ball.iter().step_by(37) {
            let from_u = bfs(u, 16);
            for w in &ball {
                assert_eq!(tree_distance(u, w), from_u[w], "{u} -> {w}");
            }
        }
    }

    #[test]
    fn ray_step_examples() {
        assert_eq!(ray_step(&v("({};0)"), &e("{}")), Direction::Ext0);
        assert_eq!(ray_step(&v("({};0)"), &e("{0,3}")), Direction::Ext1);
        assert_eq!(ray_step(&v("({0};1)"), &e("{}")), Direction::Down);
    }

    #[test]
    fn line_examples() {
        assert_eq!(line(&e("{}"), &e("{0}")).unwrap().branch(), &v("({};0)"));
        assert_eq!(line(&e("{}"), &e("{2,3}")).unwrap().branch(), &v("({};2)"));
        assert!(line(&e("{1}"), &e("{1}")).is_err());
    }

    #[test]
    fn median_examples() {
        let m = median(&e("{}"), &e("{0}"), &e("{2}")).unwrap();
        assert_eq!(m, v("({};2)"));
        let dirs = [e("{}"), e("{0}"), e("{2}")].map(|x| ray_step(&m, &x));
        assert_eq!(dirs, [Direction::Ext0, Direction::Down, Direction::Ext1]);
        assert!(median(&e("{}"), &e("{}"), &e("{2}")).is_err());
        assert!(!e_a(&m, &e("{}"), &e("{0}")));
    }

    #[test]
    fn median_separates_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = EndSampler::new(6);
        let mut done = 0;
        while done < 1000 {
            let (x, y, z) = (s.sample(&mut rng), s.sample(&mut rng), s.sample(&mut rng));
            if x == y || y == z || x == z {
                continue;
            }
            let m = median(&x, &y, &z).unwrap();
            let mut dirs = [ray_step(&m, &x), ray_step(&m, &y), ray_step(&m, &z)];
            dirs.sort();
            assert_eq!(dirs, Direction::ALL);
            for p in [[&y, &x, &z], [&z, &y, &x], [&y, &z, &x]] {
                assert_eq!(median(p[0], p[1], p[2]).unwrap(), m);
            }
            done += 1;
        }
    }

    #[test]
    fn d_from_tree_examples() {
        let (x, y, z, w) = (e("{}"), e("{0}"), e("{2}"), e("{2,3}"));
        assert!(d_from_tree(&x, &x, &z, &w));
        assert!(d_from_tree(&x, &y, &z, &w));
        assert!(!d_from_tree(&x, &z, &y, &w));
    }

    #[test]
    fn d_from_tree_matches_d_from_c_on_small_window() {
        let ends = all_ends_in(-1, 2);
        for x in &ends {
            for y in &ends {
                for z in &ends {
                    for w in &ends {
                        assert_eq!(d_from_tree(x, y, z, w), d_from_c(x, y, z, w), "{x} {y} {z} {w}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn neighbors_are_adjacent_and_symmetric(u in vertex()) {
            for w in u.neighbors() {
                prop_assert_eq!(tree_distance(&u, &w), 1);
                prop_assert!(w.neighbors().contains(&u));
            }
        }

        #[test]
        fn path_is_a_geodesic(u in vertex(), w in vertex()) {
            let p = path(&u, &w);
            prop_assert_eq!(p.len() as u64, tree_distance(&u, &w) + 1);
            prop_assert_eq!(p.first().unwrap(), &u);
            prop_assert_eq!(p.last().unwrap(), &w);
            for pair in p.windows(2) {
                prop_assert_eq!(tree_distance(&pair[0], &pair[1]), 1);
                prop_assert_eq!(pair[0].neighbor(pair[0].direction_to(&pair[1]).unwrap()), pair[1].clone());
            }
        }

        #[test]
        fn ray_steps_follow_the_end(u in vertex(), x in end()) {
            // From far enough out, ray vertices are restrictions of x.
            let far: Vec<_> = ray(&u, &x).take(40).collect();
            let last = far.last().unwrap();
            prop_assert!(last.lies_below(&x));
            for pair in far.windows(2) {
                prop_assert_eq!(tree_distance(&pair[0], &pair[1]), 1);
            }
            prop_assert_eq!(tree_distance(&u, last), 39);
        }

        #[test]
        fn line_membership_matches_window(x in end(), y in end(), u in vertex()) {
            prop_assume!(x != y);
            let l = line(&x, &y).unwrap();
            let window = line_window(&x, &y, 40);
            if u.level() < 15 {
                prop_assert_eq!(l.contains(&u), window.contains(&u));
            }
            prop_assert!(l.contains(l.branch()));
        }

        #[test]
        fn lines_meet_matches_window(x in end(), y in end(), z in end(), w in end()) {
            prop_assume!(x != y && z != w);
            let (l1, l2) = (line(&x, &y).unwrap(), line(&z, &w).unwrap());
            let a = line_window(&x, &y, 40);
            let b = line_window(&z, &w, 40);
            let window_meet = a.iter().any(|p| b.contains(p));
            prop_assert_eq!(l1.meets(&l2), window_meet);
        }

        #[test]
        fn e_a_detects_lines(a in vertex(), x in end(), y in end()) {
            prop_assume!(x != y);
            prop_assert_eq!(e_a(&a, &x, &y), !line(&x, &y).unwrap().contains(&a));
        }

        #[test]
        fn separation_at_median(x in end(), y in end(), z in end(), w in end()) {
            prop_assume!(x != y && y != z && x != z && w != z);
            let m = median(&x, &y, &z).unwrap();
            let disjoint = !line(&x, &y).unwrap().meets(&line(&w, &z).unwrap());
            prop_assert_eq!(e_a(&m, &w, &z), disjoint);
        }

        #[test]
        fn vertex_literals_round_trip(u in vertex()) {
            prop_assert_eq!(u.to_string().parse::<TreeVertex>().unwrap(), u);
        }
    }
}
