//! Relations on the rationals: betweenness, circular order, separation,
//! the p-adic C-relations and the cross-ratio D-relations, plus the
//! distance-power graphs on the integers.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::axioms::{check_d_axioms, RelationHandle, SuiteReport};
use crate::ends::d_via_c;
use crate::error::{Error, Result};
use crate::rational::{v_p, v_p_of_difference, Prime, ProjPoint, Rational, Valuation};

/// `B(x; y, z)`: `x` lies strictly between `y` and `z`.
pub fn b_rel(x: &Rational, y: &Rational, z: &Rational) -> bool {
    (y < x && x < z) || (z < x && x < y)
}

/// `K(x, y, z)`: the three points occur in this cyclic order.
pub fn k_rel(x: &Rational, y: &Rational, z: &Rational) -> bool {
    (x < y && y < z) || (y < z && z < x) || (z < x && x < y)
}

/// `S(x, y; z, w)` for distinct points: after sorting, `{x, y}` is one of
/// the two alternating pairs.
pub fn s_rel(x: &Rational, y: &Rational, z: &Rational, w: &Rational) -> Result<bool> {
    let pts = [x, y, z, w];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                return Err(Error::NotDistinct);
            }
        }
    }
    let mut sorted = pts;
    sorted.sort();
    let rank = |q: &Rational| sorted.iter().position(|s| *s == q).expect("present");
    let pair: BTreeSet<usize> = [rank(x), rank(y)].into();
    Ok(pair == BTreeSet::from([0, 2]) || pair == BTreeSet::from([1, 3]))
}

/// The separation relation extended to repeated arguments: true when the
/// two pairs meet, false when either pair is degenerate, [`s_rel`] otherwise.
pub fn s_rel_total<T: PartialEq>(x: &T, y: &T, z: &T, w: &T, separated: impl Fn() -> bool) -> bool {
    if x == z || x == w || y == z || y == w {
        true
    } else if x == y || z == w {
        false
    } else {
        separated()
    }
}

pub fn s_rel_total_q(x: &Rational, y: &Rational, z: &Rational, w: &Rational) -> bool {
    s_rel_total(x, y, z, w, || s_rel(x, y, z, w).expect("distinct"))
}

/// The separation induced by the circular order: `z` and `w` lie on
/// different arcs between `x` and `y`.
pub fn s_from_k(x: &Rational, y: &Rational, z: &Rational, w: &Rational) -> bool {
    k_rel(x, z, y) != k_rel(x, w, y)
}

/// `C_p(x; y, z)`: `v_p(x - y) < v_p(y - z)`.
pub fn c_p(p: Prime, x: &Rational, y: &Rational, z: &Rational) -> bool {
    v_p_of_difference(p, x, y) < v_p_of_difference(p, y, z)
}

/// The quaternary relation built from `C_p` by the two-clause construction.
pub fn d_from_c_p(p: Prime, x: &Rational, y: &Rational, z: &Rational, w: &Rational) -> bool {
    d_via_c(|a, b, c| c_p(p, a, b, c), x, y, z, w)
}

/// `x ↦ a x + b` with `a ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    a: Rational,
    b: Rational,
}

impl AffineMap {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::InvalidParameters("affine map with a = 0".into()));
        }
        Ok(AffineMap { a, b })
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &(&self.a * x) + &self.b
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub p: Prime,
    pub maps: u64,
    pub triples: u64,
    pub checked: u64,
    pub violations: Vec<[String; 3]>,
    pub holds: bool,
}

/// Whether `C_p` is preserved by every map on every triple.
pub fn invariance_check(
    p: Prime,
    maps: &[&dyn Fn(&Rational) -> Rational],
    triples: &[[Rational; 3]],
) -> InvarianceReport {
    let mut report = InvarianceReport {
        p,
        maps: maps.len() as u64,
        triples: triples.len() as u64,
        checked: 0,
        violations: Vec::new(),
        holds: true,
    };
    for f in maps {
        for [x, y, z] in triples {
            report.checked += 1;
            if c_p(p, x, y, z) != c_p(p, &f(x), &f(y), &f(z)) {
                report.holds = false;
                if report.violations.len() < 20 {
                    report.violations.push([x.to_string(), y.to_string(), z.to_string()]);
                }
            }
        }
    }
    report
}

pub fn affine_invariance_check(p: Prime, maps: &[AffineMap], triples: &[[Rational; 3]]) -> InvarianceReport {
    let fs: Vec<_> = maps.iter().map(|m| move |x: &Rational| m.apply(x)).collect();
    let refs: Vec<&dyn Fn(&Rational) -> Rational> = fs.iter().map(|f| f as &dyn Fn(&Rational) -> Rational).collect();
    invariance_check(p, &refs, triples)
}

/// Random rationals: half with numerator and denominator in `[-n, n]`,
/// half a small integer plus a unit times a power of one of the primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalSampler {
    pub bound: i64,
    pub primes: Vec<u64>,
    pub max_exponent: i64,
}

impl RationalSampler {
    pub fn new(bound: i64, primes: &[Prime]) -> Self {
        RationalSampler {
            bound: bound.max(1),
            primes: primes.iter().map(|p| p.get()).collect(),
            max_exponent: 8,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Rational {
        if self.primes.is_empty() || rng.random_bool(0.5) {
            let num = rng.random_range(-self.bound..=self.bound);
            let den = rng.random_range(1..=self.bound);
            Rational::new(num, den).expect("positive denominator")
        } else {
            let p = self.primes[rng.random_range(0..self.primes.len())];
            let e = rng.random_range(-self.max_exponent..=self.max_exponent);
            let unit = Rational::new(rng.random_range(-6..=6), rng.random_range(1..=6)).expect("positive");
            let base = Rational::integer(rng.random_range(-2..=2));
            &base + &(&unit * &Rational::power(p, e))
        }
    }

    /// Occasionally the point at infinity, otherwise [`Self::sample`].
    pub fn sample_projective<R: Rng + ?Sized>(&self, rng: &mut R) -> ProjPoint {
        if rng.random_bool(0.05) {
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(self.sample(rng))
        }
    }
}

/// Points close to `z` in the p-adic metric, for the D5 witness search.
pub fn p_adic_witnesses(p: Prime, z: &Rational) -> Vec<Rational> {
    (-4..=40).map(|k| z + &Rational::power(p.get(), k)).collect()
}

pub fn projective_witnesses(p: Prime, z: &ProjPoint) -> Vec<ProjPoint> {
    match z {
        ProjPoint::Finite(q) => p_adic_witnesses(p, q).into_iter().map(ProjPoint::Finite).collect(),
        ProjPoint::Infinity => (-4..=40).map(|k| ProjPoint::Finite(Rational::power(p.get(), -k))).collect(),
    }
}

/// `(x - z)(y - w) / ((x - w)(y - z))` for pairwise distinct points, with
/// factors involving the point at infinity cancelled.
pub fn cross_ratio(x: &ProjPoint, y: &ProjPoint, z: &ProjPoint, w: &ProjPoint) -> Result<Rational> {
    let pts = [x, y, z, w];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                return Err(Error::NotDistinct);
            }
        }
    }
    let diff = |a: &ProjPoint, b: &ProjPoint| -> Option<Rational> { Some(a.finite()? - b.finite()?) };
    let factor = |v: Option<Rational>| v.unwrap_or_else(Rational::one);
    let num = &factor(diff(x, z)) * &factor(diff(y, w));
    let den = &factor(diff(x, w)) * &factor(diff(y, z));
    Ok(num.checked_div(&den).expect("distinct points give a non-zero denominator"))
}

/// Which argument order is fed to [`cross_ratio`]: entry `i` names the
/// argument of `D(x, y; z, w)` placed in position `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Convention(pub [usize; 4]);

impl Convention {
    pub fn all() -> Vec<Convention> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        if BTreeSet::from([a, b, c, d]).len() == 4 {
                            out.push(Convention([a, b, c, d]));
                        }
                    }
                }
            }
        }
        out
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names = ["x", "y", "z", "w"];
        let [a, b, c, d] = self.0.map(|i| names[i]);
        write!(f, "cr({a},{b},{c},{d})")
    }
}

/// `D_p(x, y; z, w)`. Distinct points: the cross-ratio under `conv` has
/// valuation at least 1. Otherwise the degenerate clauses: `x = y` apart
/// from `z, w`, or `z = w` apart from `x, y`.
pub fn d_p(conv: Convention, p: Prime, x: &ProjPoint, y: &ProjPoint, z: &ProjPoint, w: &ProjPoint) -> bool {
    let args = [x, y, z, w];
    match cross_ratio(args[conv.0[0]], args[conv.0[1]], args[conv.0[2]], args[conv.0[3]]) {
        Ok(cr) => v_p(p, &cr) >= Valuation::Finite(1),
        Err(_) => (x == y && x != z && x != w) || (z == w && x != z && y != z),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionChoice {
    pub p: Prime,
    pub convention: Convention,
    pub label: String,
    /// Conventions tried in order, with whether they passed screening.
    pub screened: Vec<(Convention, bool)>,
    pub reports: Vec<SuiteReport>,
}

/// Screens the 24 argument orders with a small axiom run and confirms the
/// first survivor on `n` samples.
pub fn select_convention(p: Prime, sampler: &RationalSampler, screen: u64, n: u64, seed: u64) -> Result<ConventionChoice> {
    let mut screened = Vec::new();
    for conv in Convention::all() {
        let ok = d_p_reports(conv, p, sampler, screen, seed).iter().all(SuiteReport::passed);
        screened.push((conv, ok));
        if ok {
            let reports = d_p_reports(conv, p, sampler, n, seed);
            if reports.iter().all(SuiteReport::passed) {
                return Ok(ConventionChoice {
                    p,
                    convention: conv,
                    label: conv.to_string(),
                    screened,
                    reports,
                });
            }
        }
    }
    Err(Error::InvalidParameters(format!("no cross-ratio convention passes for p = {p}")))
}

pub fn d_p_reports(conv: Convention, p: Prime, sampler: &RationalSampler, n: u64, seed: u64) -> Vec<SuiteReport> {
    let rel = RelationHandle::quaternary(format!("D_{p}"), move |x, y, z, w| d_p(conv, p, x, y, z, w));
    let mut sample = |rng: &mut ChaCha8Rng| sampler.sample_projective(rng);
    check_d_axioms(&rel, &mut sample, &|_, _, z| projective_witnesses(p, z), n, seed)
}

pub fn c_p_d_reports(p: Prime, sampler: &RationalSampler, n: u64, seed: u64) -> Vec<SuiteReport> {
    let rel = RelationHandle::quaternary(format!("D(C_{p})"), move |x, y, z, w| d_from_c_p(p, x, y, z, w));
    let mut sample = |rng: &mut ChaCha8Rng| sampler.sample(rng);
    check_d_axioms(&rel, &mut sample, &|_, _, z| p_adic_witnesses(p, z), n, seed)
}

/// The first triple of small integers, in lexicographic order, on which
/// `C_p` and `C_r` disagree.
pub fn separating_triple(p: Prime, r: Prime) -> Option<[Rational; 3]> {
    let top = p.get().max(r.get()) as i64 + 1;
    for x in 0..=top {
        for y in 0..=top {
            for z in 0..=top {
                let t = [Rational::integer(x), Rational::integer(y), Rational::integer(z)];
                if c_p(p, &t[0], &t[1], &t[2]) != c_p(r, &t[0], &t[1], &t[2]) {
                    return Some(t);
                }
            }
        }
    }
    None
}

/// `x ↦ (a x + b) / (c x + d)` with `ad - bc ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mobius {
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
}

impl Mobius {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        if (&(&a * &d) - &(&b * &c)).is_zero() {
            return Err(Error::InvalidParameters("singular Möbius map".into()));
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn apply(&self, x: &ProjPoint) -> ProjPoint {
        match x {
            ProjPoint::Infinity => match self.a.checked_div(&self.c) {
                Some(q) => ProjPoint::Finite(q),
                None => ProjPoint::Infinity,
            },
            ProjPoint::Finite(q) => {
                let num = &(&self.a * q) + &self.b;
                let den = &(&self.c * q) + &self.d;
                match num.checked_div(&den) {
                    Some(v) => ProjPoint::Finite(v),
                    None => ProjPoint::Infinity,
                }
            }
        }
    }
}

/// The graph on an integer window joining `u` and `v` when `|u - v| = 2^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZGraph {
    pub n: u32,
    pub lo: i64,
    pub hi: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZGraphReport {
    pub n: u32,
    pub lo: i64,
    pub hi: i64,
    pub components: usize,
    pub all_paths: bool,
    pub holds: bool,
}

pub fn z_graph_family(n: u32, lo: i64, hi: i64) -> Result<ZGraph> {
    let step = 1i64.checked_shl(n).filter(|s| *s > 0).ok_or_else(|| Error::WindowTooSmall(format!("2^{n} overflows")))?;
    let need = step.saturating_mul(4);
    if hi < lo || hi - lo + 1 < need {
        return Err(Error::WindowTooSmall(format!("window [{lo}, {hi}] shorter than {need}")));
    }
    Ok(ZGraph { n, lo, hi })
}

impl ZGraph {
    pub fn step(&self) -> i64 {
        1 << self.n
    }

    pub fn adjacent(&self, u: i64, v: i64) -> bool {
        (u - v).abs() == self.step()
    }

    pub fn neighbors(&self, u: i64) -> Vec<i64> {
        [u - self.step(), u + self.step()]
            .into_iter()
            .filter(|v| (self.lo..=self.hi).contains(v))
            .collect()
    }

    /// Connected components, each listed in increasing order.
    pub fn components(&self) -> Vec<Vec<i64>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for s in self.lo..=self.hi {
            if !seen.insert(s) {
                continue;
            }
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for v in self.neighbors(u) {
                    if seen.insert(v) {
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    pub fn report(&self) -> ZGraphReport {
        let comps = self.components();
        let all_paths = comps.iter().all(|c| {
            c.windows(2).all(|w| self.adjacent(w[0], w[1]))
                && c.iter().all(|&u| self.neighbors(u).len() <= 2)
        });
        ZGraphReport {
            n: self.n,
            lo: self.lo,
            hi: self.hi,
            components: comps.len(),
            all_paths,
            holds: all_paths && comps.len() == 1 << self.n,
        }
    }
}
