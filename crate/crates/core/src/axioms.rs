//! Sampling checkers for the D and S axioms, syzygetic families, structural
//! partitions and Jordan sets.

use std::fmt::{self, Display};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automorphism::{jordan_witness, Automorphism};
use crate::cone::{cone_containing, cones_at, Cone};
use crate::ends::{End, EndSampler};
use crate::error::{Error, Result};
use crate::tree::{median, ray_step};

/// Failure lists are truncated to this many entries; the count is kept in full.
pub const MAX_REPORTED_FAILURES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// An existential axiom found no witness in the search pool.
    NoWitness,
    /// Too few samples landed where the check applies.
    Insufficient,
}

impl Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::NoWitness => "no-witness",
            Verdict::Insufficient => "insufficient",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub axiom: String,
    pub samples: u64,
    /// Samples where the hypothesis of the axiom held.
    pub antecedent_hits: u64,
    pub failure_count: u64,
    /// Counterexample tuples, each entry rendered with `Display`.
    pub failures: Vec<Vec<String>>,
    pub seed: u64,
    pub verdict: Verdict,
}

impl SuiteReport {
    fn new(axiom: &str, seed: u64) -> Self {
        SuiteReport {
            axiom: axiom.to_string(),
            samples: 0,
            antecedent_hits: 0,
            failure_count: 0,
            failures: Vec::new(),
            seed,
            verdict: Verdict::Pass,
        }
    }

    fn fail<P: Display>(&mut self, tuple: &[&P]) {
        self.failure_count += 1;
        if self.failures.len() < MAX_REPORTED_FAILURES {
            self.failures.push(tuple.iter().map(|p| p.to_string()).collect());
        }
    }

    fn finish(mut self, on_failure: Verdict) -> Self {
        if self.failure_count > 0 {
            self.verdict = on_failure;
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

type Evaluator<P> = Box<dyn Fn(&[&P]) -> bool + Send + Sync>;

/// A relation under test.
pub struct RelationHandle<P> {
    pub name: String,
    pub arity: usize,
    eval: Evaluator<P>,
}

impl<P> RelationHandle<P> {
    pub fn new(name: impl Into<String>, arity: usize, eval: impl Fn(&[&P]) -> bool + Send + Sync + 'static) -> Self {
        RelationHandle {
            name: name.into(),
            arity,
            eval: Box::new(eval),
        }
    }

    pub fn quaternary(name: impl Into<String>, f: impl Fn(&P, &P, &P, &P) -> bool + Send + Sync + 'static) -> Self {
        RelationHandle::new(name, 4, move |a: &[&P]| f(a[0], a[1], a[2], a[3]))
    }

    pub fn holds(&self, args: &[&P]) -> bool {
        (self.eval)(args)
    }

    fn q(&self, x: &P, y: &P, z: &P, w: &P) -> bool {
        (self.eval)(&[x, y, z, w])
    }
}

fn arity_report(name: &str, arity: usize, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new(&format!("arity({name})"), seed);
    r.failure_count = 1;
    r.failures.push(vec![format!("expected arity 4, got {arity}")]);
    r.verdict = Verdict::Fail;
    r
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws `k` points, reusing an earlier one a fifth of the time so that
/// coincidence clauses get exercised.
fn draw<P: Clone, R: Rng>(rng: &mut R, sample: &mut dyn FnMut(&mut R) -> P, k: usize) -> Vec<P> {
    let mut out: Vec<P> = Vec::with_capacity(k);
    for _ in 0..k {
        if !out.is_empty() && rng.random_bool(0.2) {
            let i = rng.random_range(0..out.len());
            out.push(out[i].clone());
        } else {
            out.push(sample(rng));
        }
    }
    out
}

/// Candidate witnesses for the existential axiom at `(x, y, z)`.
pub type WitnessFn<'a, P> = &'a dyn Fn(&P, &P, &P) -> Vec<P>;

/// One report per axiom D1 to D5. The D5 witness is searched among recent
/// samples and the candidates from `witnesses`.
pub fn check_d_axioms<P: Clone + PartialEq + Display>(
    rel: &RelationHandle<P>,
    sample: &mut dyn FnMut(&mut ChaCha8Rng) -> P,
    witnesses: WitnessFn<P>,
    n: u64,
    seed: u64,
) -> Vec<SuiteReport> {
    if rel.arity != 4 {
        return vec![arity_report(&rel.name, rel.arity, seed)];
    }
    let mut reports = Vec::new();

    let mut rng = stream(seed, 1);
    let mut r = SuiteReport::new("D1", seed);
    for _ in 0..n {
        let p = draw(&mut rng, sample, 4);
        let (x, y, z, w) = (&p[0], &p[1], &p[2], &p[3]);
        r.samples += 1;
        if rel.q(x, y, z, w) {
            r.antecedent_hits += 1;
            if !(rel.q(y, x, z, w) && rel.q(x, y, w, z) && rel.q(z, w, x, y)) {
                r.fail(&[x, y, z, w]);
            }
        }
    }
    reports.push(r.finish(Verdict::Fail));

    let mut rng = stream(seed, 2);
    let mut r = SuiteReport::new("D2", seed);
    for _ in 0..n {
        let p = draw(&mut rng, sample, 4);
        let (x, y, z, w) = (&p[0], &p[1], &p[2], &p[3]);
        r.samples += 1;
        if rel.q(x, y, z, w) {
            r.antecedent_hits += 1;
            if rel.q(x, z, y, w) {
                r.fail(&[x, y, z, w]);
            }
        }
    }
    reports.push(r.finish(Verdict::Fail));

    let mut rng = stream(seed, 3);
    let mut r = SuiteReport::new("D3", seed);
    for _ in 0..n {
        let p = draw(&mut rng, sample, 5);
        let (x, y, z, w, u) = (&p[0], &p[1], &p[2], &p[3], &p[4]);
        r.samples += 1;
        if rel.q(x, y, z, w) {
            r.antecedent_hits += 1;
            if !(rel.q(u, y, z, w) || rel.q(x, y, z, u)) {
                r.fail(&[x, y, z, w, u]);
            }
        }
    }
    reports.push(r.finish(Verdict::Fail));

    let mut rng = stream(seed, 4);
    let mut r = SuiteReport::new("D4", seed);
    for _ in 0..n {
        let p = draw(&mut rng, sample, 3);
        let (x, y, z) = (&p[0], &p[1], &p[2]);
        r.samples += 1;
        if x != z && y != z {
            r.antecedent_hits += 1;
            if !rel.q(x, y, z, z) {
                r.fail(&[x, y, z]);
            }
        }
    }
    reports.push(r.finish(Verdict::Fail));

    let mut rng = stream(seed, 5);
    let mut r = SuiteReport::new("D5", seed);
    let mut pool: Vec<P> = Vec::new();
    for i in 0..n {
        let p = draw(&mut rng, sample, 3);
        let (x, y, z) = (&p[0], &p[1], &p[2]);
        r.samples += 1;
        if x != y && y != z && x != z {
            r.antecedent_hits += 1;
            let found = pool
                .iter()
                .chain(witnesses(x, y, z).iter())
                .any(|w| w != z && rel.q(x, y, z, w));
            if !found {
                r.fail(&[x, y, z]);
            }
        }
        let slot = (i % 64) as usize;
        if pool.len() < 64 {
            pool.push(p[0].clone());
        } else {
            pool[slot] = p[0].clone();
        }
    }
    reports.push(r.finish(Verdict::NoWitness));
    reports
}

/// D5 witnesses among ends: canonical ends of the cones at the median of
/// `x, y, z` and at its neighbour toward `z`.
pub fn end_witnesses(x: &End, y: &End, z: &End) -> Vec<End> {
    let Ok(v) = median(x, y, z) else {
        return Vec::new();
    };
    let u = v.neighbor(ray_step(&v, z));
    let mut out: Vec<End> = cones_at(&v).iter().map(Cone::canonical_end).collect();
    out.extend(cones_at(&u).iter().map(Cone::canonical_end));
    out.push(cone_containing(&u, z).complement().canonical_end());
    out
}

/// One report per axiom S1 to S4; S2 is checked in both directions.
pub fn check_s_axioms<P: Clone + PartialEq + Display>(
    rel: &RelationHandle<P>,
    sample: &mut dyn FnMut(&mut ChaCha8Rng) -> P,
    n: u64,
    seed: u64,
) -> Vec<SuiteReport> {
    if rel.arity != 4 {
        return vec![arity_report(&rel.name, rel.arity, seed)];
    }
    let mut reports = Vec::new();

    let mut rng = stream(seed, 11);
    let mut r = SuiteReport::new("S1", seed);
    for _ in 0..n {
        let p = draw(&mut rng, sample, 4);
        let (x, y, z, w) = (&p[0], &p[1], &p[2], &p[3]);
        r.samples += 1;
        if rel.q(x, y, z, w) {
            r.antecedent_hits += 1;
            if !(rel.q(y, x, z, w) && rel.q(z, w, x, y)) {
                r.fail(&[x, y, z, w]);
            }
        }
    }
    reports.push(r.finish(Verdict::Fail));

    let mut rng = stream(seed, 12);
    let mut r = SuiteReport::new("S2", seed);
    for _ in 0..n {
        let p = draw(&mut rng, sample, 4);
        let (x, y, z, w) = (&p[0], &p[1], &p[2], &p[3]);
        r.samples += 1;
        let lhs = rel.q(x, y, z, w) && rel.q(x, z, y, w);
        let rhs = y == z || x == w;
        if rhs {
            r.antecedent_hits += 1;
        }
        if lhs != rhs {
            r.fail(&[x, y, z, w]);
        }
    }
    reports.push(r.finish(Verdict::Fail));

    let mut rng = stream(seed, 13);
    let mut r = SuiteReport::new("S3", seed);
    for _ in 0..n {
        let p = draw(&mut rng, sample, 5);
        let (x, y, z, w, t) = (&p[0], &p[1], &p[2], &p[3], &p[4]);
        r.samples += 1;
        if rel.q(x, y, z, w) {
            r.antecedent_hits += 1;
            if !(rel.q(x, y, z, t) || rel.q(x, y, w, t)) {
                r.fail(&[x, y, z, w, t]);
            }
        }
    }
    reports.push(r.finish(Verdict::Fail));

    let mut rng = stream(seed, 14);
    let mut r = SuiteReport::new("S4", seed);
    for _ in 0..n {
        let p = draw(&mut rng, sample, 4);
        let (x, y, z, w) = (&p[0], &p[1], &p[2], &p[3]);
        r.samples += 1;
        r.antecedent_hits += 1;
        if !(rel.q(x, y, z, w) || rel.q(x, z, w, y) || rel.q(x, w, y, z)) {
            r.fail(&[x, y, z, w]);
        }
    }
    reports.push(r.finish(Verdict::Fail));
    reports
}

/// A named membership predicate.
pub struct NamedSet<'a, P> {
    pub name: String,
    pub contains: Box<dyn Fn(&P) -> bool + 'a>,
}

impl<'a, P> NamedSet<'a, P> {
    pub fn new(name: impl Into<String>, contains: impl Fn(&P) -> bool + 'a) -> Self {
        NamedSet {
            name: name.into(),
            contains: Box::new(contains),
        }
    }
}

impl<'a> NamedSet<'a, End> {
    pub fn cone(c: &Cone) -> Self {
        let c = c.clone();
        NamedSet::new(c.to_string(), move |x| c.contains(x))
    }
}

/// Whether every pair of sets overlapping in all three regions covers the
/// sampled universe. Failures name both sets and an uncovered point.
pub fn check_syzygetic<P: Display>(sets: &[NamedSet<P>], universe: &[P], seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("syzygetic", seed);
    let member: Vec<Vec<bool>> = sets
        .iter()
        .map(|s| universe.iter().map(|x| (s.contains)(x)).collect())
        .collect();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            r.samples += 1;
            let (u, v) = (&member[i], &member[j]);
            let regions = |a: bool, b: bool| u.iter().zip(v).any(|(&p, &q)| p == a && q == b);
            if !(regions(true, false) && regions(false, true) && regions(true, true)) {
                continue;
            }
            r.antecedent_hits += 1;
            if let Some(k) = (0..universe.len()).find(|&k| !u[k] && !v[k]) {
                r.failure_count += 1;
                if r.failures.len() < MAX_REPORTED_FAILURES {
                    r.failures
                        .push(vec![sets[i].name.clone(), sets[j].name.clone(), universe[k].to_string()]);
                }
            }
        }
    }
    r.finish(Verdict::Fail)
}

/// Checks both clauses of a structural partition on `n` stratified samples
/// each. Needs at least three parts; a part missed by the sample makes the
/// report insufficient.
pub fn check_structural_partition<P: Display>(
    parts: &[NamedSet<P>],
    rel: &RelationHandle<P>,
    universe: &[P],
    n: u64,
    seed: u64,
) -> Result<SuiteReport> {
    if parts.len() < 3 {
        return Err(Error::TooFewParts(parts.len()));
    }
    if rel.arity != 4 {
        return Ok(arity_report(&rel.name, rel.arity, seed));
    }
    let mut r = SuiteReport::new("structural-partition", seed);
    let mut strata: Vec<Vec<&P>> = vec![Vec::new(); parts.len()];
    for x in universe {
        let owners: Vec<usize> = (0..parts.len()).filter(|&i| (parts[i].contains)(x)).collect();
        if let [i] = owners[..] {
            strata[i].push(x);
        } else {
            r.fail(&[x]);
        }
    }
    if strata.iter().any(|s| s.is_empty()) {
        r.verdict = Verdict::Insufficient;
        return Ok(r);
    }
    let mut rng = stream(seed, 21);
    let pick = |rng: &mut ChaCha8Rng, s: &[&'_ P]| -> usize { rng.random_range(0..s.len()) };
    for _ in 0..n {
        let i = rng.random_range(0..parts.len());
        let x = strata[i][pick(&mut rng, &strata[i])];
        let y = strata[i][pick(&mut rng, &strata[i])];
        let mut other = || {
            let mut j = rng.random_range(0..parts.len() - 1);
            if j >= i {
                j += 1;
            }
            strata[j][rng.random_range(0..strata[j].len())]
        };
        let (z, w) = (other(), other());
        r.samples += 1;
        r.antecedent_hits += 1;
        if !rel.q(x, y, z, w) {
            r.fail(&[x, y, z, w]);
        }
    }
    if parts.len() >= 4 {
        for _ in 0..n {
            let mut idx: Vec<usize> = Vec::new();
            while idx.len() < 4 {
                let j = rng.random_range(0..parts.len());
                if !idx.contains(&j) {
                    idx.push(j);
                }
            }
            let p: Vec<&P> = idx.iter().map(|&j| strata[j][pick(&mut rng, &strata[j])]).collect();
            r.samples += 1;
            r.antecedent_hits += 1;
            if permutations4().iter().any(|s| rel.q(p[s[0]], p[s[1]], p[s[2]], p[s[3]])) {
                r.fail(&[p[0], p[1], p[2], p[3]]);
            }
        }
    }
    Ok(r.finish(Verdict::Fail))
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// Jordan-set check for a cone using the constructed witnesses.
pub fn check_jordan(c: &Cone, sampler: &EndSampler, n: u64, seed: u64) -> SuiteReport {
    check_jordan_with(
        &|x| c.contains(x),
        &mut |rng| c.sample(sampler, rng),
        sampler,
        &|x, y| jordan_witness(c, x, y),
        n,
        seed,
    )
}

/// For `n` sampled pairs inside the set, the witness must exist, send the
/// first to the second and fix 50 sampled points outside the set.
pub fn check_jordan_with(
    member: &dyn Fn(&End) -> bool,
    inside: &mut dyn FnMut(&mut ChaCha8Rng) -> End,
    sampler: &EndSampler,
    witness: &dyn Fn(&End, &End) -> Result<Automorphism>,
    n: u64,
    seed: u64,
) -> SuiteReport {
    let mut r = SuiteReport::new("jordan", seed);
    let mut rng = stream(seed, 31);
    for _ in 0..n {
        let x = inside(&mut rng);
        let y = inside(&mut rng);
        r.samples += 1;
        r.antecedent_hits += 1;
        let Ok(g) = witness(&x, &y) else {
            r.fail(&[&x, &y]);
            continue;
        };
        if g.apply(&x) != y {
            r.fail(&[&x, &y]);
            continue;
        }
        let mut fixed = 0;
        for _ in 0..1000 {
            if fixed == 50 {
                break;
            }
            let z = sampler.sample(&mut rng);
            if member(&z) {
                continue;
            }
            fixed += 1;
            if g.apply(&z) != z {
                r.fail(&[&x, &y, &z]);
                break;
            }
        }
    }
    r.finish(Verdict::Fail)
}
