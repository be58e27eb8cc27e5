//! Runs the verification suites from a single configuration and collects a
//! deterministic report.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::automorphism::{preserves_d, three_transitivity_witness, Automorphism, Generator};
use crate::axioms::{
    check_d_axioms, check_jordan, check_s_axioms, check_structural_partition, check_syzygetic, end_witnesses,
    NamedSet, RelationHandle, SuiteReport, Verdict,
};
use crate::back_and_forth::{back_and_forth_extend, PartialIso};
use crate::classical::{
    affine_invariance_check, c_p_d_reports, invariance_check, s_from_k, s_rel, s_rel_total_q, select_convention,
    separating_triple, z_graph_family, AffineMap, RationalSampler,
};
use crate::cone::{cones_at, Cone};
use crate::definable::DefinableSet;
use crate::dt::{adjacency_reconstruction, build_ball, claim_check, count_report, t2_decomposition};
use crate::ef::{ef_equiv_m, ray_families, ray_instance, RESTRICTED_GAME_EXACT};
use crate::ends::{d_from_c, End, EndSampler};
use crate::error::{Error, Result};
use crate::orbits::{
    normalize_from_orbits, orbit_classification, parameter_form, DepthSelection, Exceptions, OrbitClassification,
    OrbitFamily, Selection,
};
use crate::rational::{Prime, Rational};
use crate::shape::{qf_type_equal, AtomTable};
use crate::tree::{d_from_tree, Direction, TreeVertex};

pub const SCHEMA: &str = "treelike-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format {s:?}, expected text or json"))),
        }
    }
}

/// Everything that determines a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Samples per universally quantified axiom.
    pub samples: u64,
    /// Constructed witnesses per suite (Jordan, 3-transitivity, back-and-forth, set algebra).
    pub instances: u64,
    /// Sampled ends have support inside `[-window, window]`.
    pub window: i64,
    /// TypeB rays are unrolled to this depth.
    pub depth_bound: u64,
    pub ef_max_rank: u32,
    /// Restrict the graph suite to one `(k, l)`; both or neither must be set.
    pub k: Option<u64>,
    pub l: Option<u64>,
    pub radius: u32,
    pub distance_sets: Vec<Vec<u32>>,
    pub n: u32,
    pub t_values: Vec<u64>,
    pub primes: Vec<u64>,
    pub classical_samples: u64,
    pub affine_maps: u64,
    pub affine_triples: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            samples: 10_000,
            instances: 200,
            window: 12,
            depth_bound: 6,
            ef_max_rank: 2,
            k: None,
            l: None,
            radius: 4,
            distance_sets: vec![vec![1], vec![2], vec![1, 2], vec![1, 3]],
            n: 1,
            t_values: vec![3, 4],
            primes: vec![2, 3, 5],
            classical_samples: 2000,
            affine_maps: 100,
            affine_triples: 100,
            format: Format::Text,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.k.is_some() != self.l.is_some() {
            return bad("k and l must be given together".into());
        }
        if let (Some(k), Some(l)) = (self.k, self.l) {
            if k < 2 || l < 3 {
                return bad(format!("graph parameters need k >= 2 and l >= 3, got k={k}, l={l}"));
            }
        }
        if self.window < 1 || self.window > 60 {
            return bad(format!("window must be in 1..=60, got {}", self.window));
        }
        if self.samples == 0 || self.instances == 0 || self.classical_samples == 0 {
            return bad("sample counts must be positive".into());
        }
        if self.radius == 0 || self.n == 0 {
            return bad("radius and n must be positive".into());
        }
        if self.depth_bound == 0 {
            return bad("depth_bound must be positive".into());
        }
        if self.ef_max_rank > 3 {
            return bad(format!("ef_max_rank is at most 3, got {}", self.ef_max_rank));
        }
        if self.distance_sets.iter().any(|s| s.is_empty() || s.contains(&0)) {
            return bad("distance sets must be non-empty sets of positive integers".into());
        }
        if let Some(t) = self.t_values.iter().find(|&&t| t < 3) {
            return bad(format!("t values must be at least 3, got {t}"));
        }
        for &p in &self.primes {
            Prime::new(p).map_err(|_| Error::Config(format!("{p} is not prime")))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyAxioms,
    VerifyIsomorphism,
    VerifyJordan,
    VerifyOrbits,
    VerifyFraisse,
    VerifyEf,
    DtGraphs,
    Classical,
    All,
}

impl Command {
    pub const SUITES: [Command; 8] = [
        Command::VerifyAxioms,
        Command::VerifyIsomorphism,
        Command::VerifyJordan,
        Command::VerifyOrbits,
        Command::VerifyFraisse,
        Command::VerifyEf,
        Command::DtGraphs,
        Command::Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyAxioms => "verify-axioms",
            Command::VerifyIsomorphism => "verify-isomorphism",
            Command::VerifyJordan => "verify-jordan",
            Command::VerifyOrbits => "verify-orbits",
            Command::VerifyFraisse => "verify-fraisse",
            Command::VerifyEf => "verify-ef",
            Command::DtGraphs => "dt-graphs",
            Command::Classical => "classical",
            Command::All => "all",
        }
    }

    fn index(self) -> u64 {
        Command::SUITES.iter().position(|c| *c == self).unwrap_or(8) as u64
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::SUITES
            .into_iter()
            .chain([Command::All])
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownCommand(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Verdict,
    pub samples: u64,
    pub failures: u64,
    pub detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, samples: u64, failures: u64, detail: Value) -> Self {
        Check {
            name: name.into(),
            status: if ok { Verdict::Pass } else { Verdict::Fail },
            samples,
            failures,
            detail,
        }
    }

    fn from_suite(name: &str, r: &SuiteReport) -> Self {
        Check {
            name: format!("{}({name})", r.axiom),
            status: r.verdict,
            samples: r.samples,
            failures: r.failure_count,
            detail: json!({ "antecedent_hits": r.antecedent_hits, "failures": r.failures, "seed": r.seed }),
        }
    }

    fn errored(name: impl Into<String>, e: &Error) -> Self {
        Check::new(name, false, 0, 1, json!({ "error": e.to_string() }))
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Verdict::Pass | Verdict::Insufficient)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: Command,
    pub config: RunConfig,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let mark = if s.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "[{mark}] {} (seed {})", s.name, s.seed);
            for c in &s.checks {
                let _ = writeln!(
                    out,
                    "    {:<12} {:<44} samples={:<8} failures={}",
                    c.status.to_string(),
                    c.name,
                    c.samples,
                    c.failures
                );
            }
        }
        let _ = writeln!(out, "{}", if self.passed { "all checks passed" } else { "some checks FAILED" });
        out
    }

    pub fn render(&self) -> String {
        match self.config.format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The seed a suite runs with, derived from the run seed and the suite.
pub fn suite_seed(seed: u64, command: Command) -> u64 {
    splitmix64(seed ^ splitmix64(command.index() + 1))
}

pub fn run(command: Command, config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let selected: Vec<Command> = if command == Command::All {
        Command::SUITES.to_vec()
    } else {
        vec![command]
    };
    let suites: Vec<SuiteResult> = selected.into_iter().map(|c| run_suite(c, config)).collect();
    let passed = suites.iter().all(|s| s.passed);
    Ok(Report {
        schema: SCHEMA.to_string(),
        command,
        config: config.clone(),
        suites,
        passed,
    })
}

fn run_suite(command: Command, config: &RunConfig) -> SuiteResult {
    let seed = suite_seed(config.seed, command);
    let checks = match command {
        Command::VerifyAxioms => suite_axioms(config, seed),
        Command::VerifyIsomorphism => suite_isomorphism(config, seed),
        Command::VerifyJordan => suite_jordan(config, seed),
        Command::VerifyOrbits => suite_orbits(config, seed),
        Command::VerifyFraisse => suite_fraisse(config, seed),
        Command::VerifyEf => suite_ef(config, seed),
        Command::DtGraphs => suite_dt(config),
        Command::Classical => suite_classical(config, seed),
        Command::All => unreachable!("expanded by run"),
    };
    SuiteResult {
        name: command.name().to_string(),
        seed,
        passed: checks.iter().all(Check::passed),
        checks,
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn distinct_ends(rng: &mut ChaCha8Rng, s: &EndSampler, n: usize) -> Vec<End> {
    let mut out: Vec<End> = Vec::with_capacity(n);
    while out.len() < n {
        let x = s.sample(rng);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn random_quads(rng: &mut ChaCha8Rng, s: &EndSampler, n: usize) -> Vec<[End; 4]> {
    (0..n).map(|_| [0, 1, 2, 3].map(|_| s.sample(rng))).collect()
}

fn random_cone(rng: &mut ChaCha8Rng, s: &EndSampler) -> Cone {
    let x = s.sample(rng);
    let level = rng.random_range(-s.window / 2..=s.window / 2);
    Cone::at(&TreeVertex::on_end(&x, level), Direction::ALL[rng.random_range(0..3)])
}

fn suite_axioms(config: &RunConfig, seed: u64) -> Vec<Check> {
    let sampler = EndSampler::new(config.window);
    let mut checks = Vec::new();
    let c_rel = RelationHandle::quaternary("d_from_c", d_from_c);
    let t_rel = RelationHandle::quaternary("d_from_tree", d_from_tree);
    let mut sample = |rng: &mut ChaCha8Rng| sampler.sample(rng);
    let from_c = check_d_axioms(&c_rel, &mut sample, &end_witnesses, config.samples, seed);
    let from_tree = check_d_axioms(&t_rel, &mut sample, &end_witnesses, config.samples, seed);
    checks.extend(from_c.iter().map(|r| Check::from_suite("d_from_c", r)));
    checks.extend(from_tree.iter().map(|r| Check::from_suite("d_from_tree", r)));
    checks.push(Check::new(
        "d_from_tree and d_from_c reports agree",
        from_c == from_tree,
        from_c.len() as u64,
        u64::from(from_c != from_tree),
        Value::Null,
    ));

    let qs = RationalSampler::new(1000, &[]);
    let s_rel = RelationHandle::quaternary("S on Q", s_rel_total_q);
    let mut qsample = |rng: &mut ChaCha8Rng| qs.sample(rng);
    for r in check_s_axioms(&s_rel, &mut qsample, config.samples, seed) {
        checks.push(Check::from_suite("S on Q", &r));
    }

    let mut rng = rng_for(seed, 100);
    let universe: Vec<End> = (0..2000).map(|_| sampler.sample(&mut rng)).collect();
    let cones: Vec<Cone> = (0..50).map(|_| random_cone(&mut rng, &sampler)).collect();
    let sets: Vec<NamedSet<End>> = cones.iter().map(NamedSet::cone).collect();
    checks.push(Check::from_suite("50 random cones", &check_syzygetic(&sets, &universe, seed)));

    let d = RelationHandle::quaternary("d_from_c", d_from_c);
    for i in 0..10 {
        let x = &universe[rng.random_range(0..universe.len())];
        let v = TreeVertex::on_end(x, rng.random_range(-2..=2));
        let parts: Vec<NamedSet<End>> = cones_at(&v).iter().map(NamedSet::cone).collect();
        match check_structural_partition(&parts, &d, &universe, 500, seed.wrapping_add(i)) {
            Ok(r) => checks.push(Check::from_suite(&format!("cones at {v}"), &r)),
            Err(e) => checks.push(Check::errored(format!("structural-partition(cones at {v})"), &e)),
        }
    }
    checks
}

fn suite_isomorphism(config: &RunConfig, seed: u64) -> Vec<Check> {
    let sampler = EndSampler::new(config.window);
    let mut rng = rng_for(seed, 1);
    let mut checks = Vec::new();

    let quads = random_quads(&mut rng, &sampler, config.samples as usize);
    let mismatches: Vec<String> = quads
        .iter()
        .filter(|[x, y, z, w]| d_from_tree(x, y, z, w) != d_from_c(x, y, z, w))
        .map(|q| format!("{q:?}"))
        .collect();
    checks.push(Check::new(
        "d_from_tree equals d_from_c",
        mismatches.is_empty(),
        quads.len() as u64,
        mismatches.len() as u64,
        json!({ "mismatches": mismatches.iter().take(20).collect::<Vec<_>>() }),
    ));

    let mut failures = Vec::new();
    let n = config.instances;
    for _ in 0..n {
        let src = distinct_ends(&mut rng, &sampler, 3);
        let tgt = distinct_ends(&mut rng, &sampler, 3);
        let ok = match three_transitivity_witness([&src[0], &src[1], &src[2]], [&tgt[0], &tgt[1], &tgt[2]]) {
            Ok(g) => {
                (0..3).all(|i| g.apply(&src[i]) == tgt[i])
                    && preserves_d(&g, &random_quads(&mut rng, &sampler, 100))
            }
            Err(_) => false,
        };
        if !ok {
            failures.push(format!("{src:?} -> {tgt:?}"));
        }
    }
    checks.push(Check::new(
        "3-transitivity witnesses",
        failures.is_empty(),
        n,
        failures.len() as u64,
        json!({ "failures": failures.iter().take(20).collect::<Vec<_>>() }),
    ));

    let runs = (config.instances / 2).max(1);
    let mut failures = Vec::new();
    let small = EndSampler::new(config.window.min(8));
    for _ in 0..runs {
        let pts = distinct_ends(&mut rng, &small, 6);
        let mut order: Vec<usize> = (0..6).collect();
        for i in (1..6).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let mut f = PartialIso::new();
        let mut ok = true;
        for &i in &order {
            match back_and_forth_extend(&f, &pts[i]) {
                Ok((_, g)) => f = g,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || AtomTable::of(&f.domain()) != AtomTable::of(&f.range()) {
            failures.push(format!("{pts:?}"));
        }
    }
    checks.push(Check::new(
        "back-and-forth 6-point runs",
        failures.is_empty(),
        runs,
        failures.len() as u64,
        json!({ "failures": failures.iter().take(20).collect::<Vec<_>>() }),
    ));
    checks
}

fn suite_jordan(config: &RunConfig, seed: u64) -> Vec<Check> {
    let sampler = EndSampler::new(config.window);
    let mut rng = rng_for(seed, 2);
    let cones = (config.instances / 10).max(2);
    let mut checks = Vec::new();
    let mut agg = [(0u64, 0u64); 2];
    for i in 0..cones {
        let c = random_cone(&mut rng, &sampler);
        let c = if i % 2 == 0 { Cone::prefix(c.vertex().clone()) } else { Cone::coprefix(c.vertex().clone()) };
        let r = check_jordan(&c, &sampler, 10, seed.wrapping_add(i));
        let slot = &mut agg[(i % 2) as usize];
        slot.0 += r.samples;
        slot.1 += r.failure_count;
    }
    for (name, (samples, failures)) in ["prefix cones", "coprefix cones"].into_iter().zip(agg) {
        checks.push(Check::new(format!("jordan witnesses on {name}"), failures == 0, samples, failures, Value::Null));
    }
    checks
}

fn suite_orbits(config: &RunConfig, seed: u64) -> Vec<Check> {
    let sampler = EndSampler::new(config.window.min(8));
    let mut rng = rng_for(seed, 3);
    let mut claimed = (0u64, 0u64);
    let mut atoms = (0u64, 0u64);
    for _ in 0..20 {
        let size = rng.random_range(3..=5);
        let a = distinct_ends(&mut rng, &sampler, size);
        let cls = orbit_classification(&a).expect("three distinct points");
        for _ in 0..100 {
            let x = sampler.sample(&mut rng);
            if cls.is_param(&x) {
                continue;
            }
            claimed.0 += 1;
            if cls.claims(&x).len() != 1 {
                claimed.1 += 1;
            }
        }
        for loc in cls.unrolled(config.depth_bound.min(4)) {
            let mut t = a.clone();
            t.push(loc.cone.canonical_end());
            let reference = AtomTable::of(&t);
            for _ in 0..3 {
                *t.last_mut().expect("non-empty") = loc.cone.sample(&sampler, &mut rng);
                atoms.0 += 1;
                if AtomTable::of(&t) != reference {
                    atoms.1 += 1;
                }
            }
        }
    }
    vec![
        Check::new("outside ends claimed exactly once", claimed.1 == 0, claimed.0, claimed.1, Value::Null),
        Check::new("descriptor cones have constant atoms", atoms.1 == 0, atoms.0, atoms.1, Value::Null),
    ]
}

/// A boolean combination of descriptor selections.
#[derive(Clone, Debug)]
pub enum SetExpr {
    Leaf(Selection),
    Not(Box<SetExpr>),
    And(Box<SetExpr>, Box<SetExpr>),
    Or(Box<SetExpr>, Box<SetExpr>),
}

impl SetExpr {
    /// Membership from the orbit location of `x`, without building any set.
    pub fn eval(&self, cls: &OrbitClassification, x: &End) -> bool {
        match self {
            SetExpr::Leaf(sel) => {
                let Some(loc) = cls.locate(x) else {
                    return false;
                };
                match sel {
                    Selection::Cone(i) => loc.family == *i,
                    Selection::Family { index, depths } => {
                        loc.family == *index && loc.depth.is_some_and(|d| depths.contains(d))
                    }
                }
            }
            SetExpr::Not(e) => !e.eval(cls, x),
            SetExpr::And(a, b) => a.eval(cls, x) && b.eval(cls, x),
            SetExpr::Or(a, b) => a.eval(cls, x) || b.eval(cls, x),
        }
    }

    pub fn to_set(&self, cls: &OrbitClassification) -> Result<DefinableSet> {
        Ok(match self {
            SetExpr::Leaf(sel) => normalize_from_orbits(cls, std::slice::from_ref(sel), &Exceptions::default())?.to_set(),
            SetExpr::Not(e) => e.to_set(cls)?.complement(),
            SetExpr::And(a, b) => a.to_set(cls)?.intersect(&b.to_set(cls)?),
            SetExpr::Or(a, b) => a.to_set(cls)?.union(&b.to_set(cls)?),
        })
    }

    /// A random expression with `leaves` leaves.
    pub fn random(rng: &mut impl Rng, cls: &OrbitClassification, leaves: usize) -> SetExpr {
        if leaves <= 1 {
            let i = rng.random_range(0..cls.families().len());
            let leaf = SetExpr::Leaf(match cls.families()[i] {
                OrbitFamily::TypeA(_) => Selection::Cone(i),
                OrbitFamily::TypeB { .. } => {
                    let finite: Vec<u64> = (0..rng.random_range(0..3)).map(|_| rng.random_range(1..6)).collect();
                    let mut depths = DepthSelection::depths(finite);
                    if rng.random_bool(0.5) {
                        depths = depths.with_tail(rng.random_range(1..7));
                    }
                    Selection::Family { index: i, depths }
                }
            });
            return if rng.random_bool(0.3) { SetExpr::Not(Box::new(leaf)) } else { leaf };
        }
        let left = rng.random_range(1..leaves);
        let a = Box::new(SetExpr::random(rng, cls, left));
        let b = Box::new(SetExpr::random(rng, cls, leaves - left));
        let e = if rng.random_bool(0.5) { SetExpr::And(a, b) } else { SetExpr::Or(a, b) };
        if rng.random_bool(0.2) {
            SetExpr::Not(Box::new(e))
        } else {
            e
        }
    }
}

fn suite_fraisse(config: &RunConfig, seed: u64) -> Vec<Check> {
    let mut rng = rng_for(seed, 4);
    let small = EndSampler::new(3);
    let mut qf = (0u64, 0u64);
    for i in 0..config.instances * 5 {
        let len = rng.random_range(1..=5);
        let t1 = distinct_ends(&mut rng, &small, len);
        let t2 = if i % 2 == 0 {
            let g = Automorphism::from_gens(vec![
                Generator::GlobalXor(small.sample(&mut rng)),
                Generator::Shift(rng.random_range(-3..=3)),
            ]);
            t1.iter().map(|x| g.apply(x)).collect()
        } else {
            distinct_ends(&mut rng, &small, len)
        };
        qf.0 += 1;
        let by_shape = qf_type_equal(&t1, &t2).expect("same length");
        if by_shape != (AtomTable::of(&t1) == AtomTable::of(&t2)) {
            qf.1 += 1;
        }
    }

    let sampler = EndSampler::new(config.window.min(8));
    let mut forms = (0u64, 0u64);
    let mut membership = 0u64;
    for _ in 0..(config.instances / 4).max(1) {
        let size = rng.random_range(3..=5);
        let a = distinct_ends(&mut rng, &sampler, size);
        let cls = orbit_classification(&a).expect("three distinct points");
        let leaves = rng.random_range(1..=4);
        let expr = SetExpr::random(&mut rng, &cls, leaves);
        forms.0 += 1;
        let ok = expr
            .to_set(&cls)
            .and_then(|set| parameter_form(&cls, &set))
            .map(|form| {
                form.is_parameter_shaped(&cls)
                    && (0..200).all(|_| {
                        let x = sampler.sample(&mut rng);
                        form.contains(&x) == expr.eval(&cls, &x)
                    })
                    && a.iter().all(|x| form.contains(x) == expr.eval(&cls, x))
            })
            .unwrap_or(false);
        membership += 200;
        if !ok {
            forms.1 += 1;
        }
    }
    vec![
        Check::new("qf-type by shape equals atom tables", qf.1 == 0, qf.0, qf.1, Value::Null),
        Check::new(
            "boolean combinations reach parameter form",
            forms.1 == 0,
            forms.0,
            forms.1,
            json!({ "membership_probes": membership }),
        ),
    ]
}

/// Parameter sets used by the game suite: a fixed one and two random ones.
fn ef_bases(seed: u64) -> Vec<Vec<End>> {
    let mut rng = rng_for(seed, 5);
    let s = EndSampler::new(5);
    let mut out = vec![["{}", "{0}", "{4}", "{4,7}"].iter().map(|l| l.parse().expect("literal")).collect()];
    for n in [3, 4] {
        out.push(distinct_ends(&mut rng, &s, n));
    }
    out
}

fn suite_ef(config: &RunConfig, seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    for m in 1..=config.ef_max_rank {
        let threshold = 1u64 << m;
        let bound = config.depth_bound.max(threshold + 2);
        let mut equivalent = (0u64, 0u64);
        let mut crafted = (0u64, 0u64);
        let mut failures = Vec::new();
        for a in ef_bases(seed) {
            let fams = ray_families(&a).unwrap_or_default();
            for &fam in fams.iter().take(2) {
                for (d1, d2) in [(threshold, threshold + 1), (threshold, threshold + 2)] {
                    equivalent.0 += 1;
                    let ok = ray_instance(&a, fam, d1)
                        .and_then(|t1| ef_equiv_m(&t1, &ray_instance(&a, fam, d2)?, m, bound))
                        .unwrap_or(false);
                    if !ok {
                        equivalent.1 += 1;
                        failures.push(format!("{a:?} family {fam} depths {d1},{d2}"));
                    }
                }
                let (d1, d2) = (threshold / 2, threshold / 2 + 1);
                crafted.0 += 1;
                let inequivalent = ray_instance(&a, fam, d1)
                    .and_then(|t1| ef_equiv_m(&t1, &ray_instance(&a, fam, d2)?, m, bound))
                    .map(|v| !v)
                    .unwrap_or(false);
                if inequivalent {
                    crafted.1 += 1;
                }
            }
        }
        checks.push(Check::new(
            format!("rank {m}: depths >= {threshold} equivalent"),
            equivalent.1 == 0,
            equivalent.0,
            equivalent.1,
            json!({ "verdicts": RESTRICTED_GAME_EXACT, "failures": failures }),
        ));
        checks.push(Check::new(
            format!("rank {m}: a shorter pair is distinguished"),
            crafted.1 > 0,
            crafted.0,
            u64::from(crafted.1 == 0),
            json!({ "verdicts": RESTRICTED_GAME_EXACT, "distinguished": crafted.1 }),
        ));
    }
    checks
}

fn suite_dt(config: &RunConfig) -> Vec<Check> {
    let cases: Vec<(u64, u64)> = match (config.k, config.l) {
        (Some(k), Some(l)) => vec![(k, l)],
        _ => vec![(2, 3), (3, 3), (2, 4)],
    };
    let mut checks = Vec::new();
    for &(k, l) in &cases {
        let name = format!("counts k={k} l={l} radius={}", config.radius);
        checks.push(match count_report(k, l, config.radius) {
            Ok(r) => Check::new(name, r.holds, r.sphere_counts.len() as u64, u64::from(!r.holds), json!(r)),
            Err(e) => Check::errored(name, &e),
        });
        let name = format!("clique neighbourhoods k={k} l={l}");
        checks.push(match build_ball(k, l, 3) {
            Ok(ball) => {
                let inner = ball.safe_region(2);
                let bad = inner.iter().filter(|&&v| !ball.neighborhood_is_cliques(v)).count() as u64;
                Check::new(name, bad == 0, inner.len() as u64, bad, Value::Null)
            }
            Err(e) => Check::errored(name, &e),
        });
        for set in &config.distance_sets {
            let name = format!("distance claim k={k} l={l} set={set:?}");
            checks.push(match claim_check(k, l, set) {
                Ok(r) => Check::new(
                    name,
                    r.holds,
                    r.pairs_checked,
                    r.violations.len() as u64,
                    json!({ "near_pairs": r.near_pairs, "violations": r.violations }),
                ),
                Err(e @ Error::SizeCap { .. }) => Check {
                    status: Verdict::Insufficient,
                    ..Check::errored(name, &e)
                },
                Err(e) => Check::errored(name, &e),
            });
        }
        let name = format!("adjacency reconstruction k={k} l={l} n={}", config.n);
        checks.push(match adjacency_reconstruction(k, l, config.n) {
            Ok(r) => Check::new(name, r.holds, r.adjacent_pairs + r.other_pairs, u64::from(!r.holds), json!(r)),
            Err(e @ Error::SizeCap { .. }) => Check {
                status: Verdict::Insufficient,
                ..Check::errored(name, &e)
            },
            Err(e) => Check::errored(name, &e),
        });
    }
    for &t in &config.t_values {
        let name = format!("square of the {t}-regular tree");
        checks.push(match t2_decomposition(t, 6) {
            Ok(r) => Check::new(name, r.holds, r.components as u64, u64::from(!r.holds), json!(r)),
            Err(e) => Check::errored(name, &e),
        });
    }
    checks
}

fn suite_classical(config: &RunConfig, seed: u64) -> Vec<Check> {
    let primes: Vec<Prime> = config.primes.iter().map(|&p| Prime::new(p).expect("validated")).collect();
    let n = config.classical_samples;
    let mut checks = Vec::new();
    let mut rng = rng_for(seed, 6);
    for &p in &primes {
        let s = RationalSampler::new(1000, &[p]);
        for r in c_p_d_reports(p, &s, n, seed) {
            checks.push(Check::from_suite(&format!("D from C_{p}"), &r));
        }
        let name = format!("D_{p} cross-ratio convention");
        checks.push(match select_convention(p, &s, 300.min(n), n, seed) {
            Ok(c) => Check::new(
                name,
                true,
                n,
                0,
                json!({ "convention": c.label, "screened": c.screened.len() }),
            ),
            Err(e) => Check::errored(name, &e),
        });
        let maps: Vec<AffineMap> = (0..config.affine_maps)
            .map(|_| loop {
                let a = s.sample(&mut rng);
                if let Ok(m) = AffineMap::new(a, s.sample(&mut rng)) {
                    break m;
                }
            })
            .collect();
        let triples: Vec<[Rational; 3]> =
            (0..config.affine_triples).map(|_| [0, 1, 2].map(|_| s.sample(&mut rng))).collect();
        let r = affine_invariance_check(p, &maps, &triples);
        checks.push(Check::new(
            format!("C_{p} affine invariance"),
            r.holds,
            r.checked,
            r.violations.len() as u64,
            json!({ "violations": r.violations }),
        ));
        let square = |x: &Rational| x * x;
        let pool: Vec<[Rational; 3]> = (0..500).map(|_| [0, 1, 2].map(|_| s.sample(&mut rng))).collect();
        let r = invariance_check(p, &[&square], &pool);
        checks.push(Check::new(
            format!("C_{p} broken by x^2"),
            !r.holds,
            r.checked,
            u64::from(r.holds),
            json!({ "example": r.violations.first() }),
        ));
    }
    for (i, &p) in primes.iter().enumerate() {
        for &r in &primes[i + 1..] {
            let t = separating_triple(p, r);
            checks.push(Check::new(
                format!("C_{p} and C_{r} differ"),
                t.is_some(),
                1,
                u64::from(t.is_none()),
                json!({ "triple": t }),
            ));
        }
    }

    let qs = RationalSampler::new(1000, &[]);
    let rel = RelationHandle::quaternary("S on Q", s_rel_total_q);
    let mut sample = |rng: &mut ChaCha8Rng| qs.sample(rng);
    for r in check_s_axioms(&rel, &mut sample, n, seed) {
        checks.push(Check::from_suite("S on Q", &r));
    }
    let mut agree = (0u64, 0u64);
    while agree.0 < n {
        let q: Vec<Rational> = (0..4).map(|_| qs.sample(&mut rng)).collect();
        if let Ok(v) = s_rel(&q[0], &q[1], &q[2], &q[3]) {
            agree.0 += 1;
            if v != s_from_k(&q[0], &q[1], &q[2], &q[3]) {
                agree.1 += 1;
            }
        }
    }
    checks.push(Check::new("S agrees with the circular order", agree.1 == 0, agree.0, agree.1, Value::Null));

    for (k, hi) in [(0u32, 15i64), (1, 15), (2, 31), (3, 63)] {
        let name = format!("integer graph |u-v| = 2^{k} on [0, {hi}]");
        checks.push(match z_graph_family(k, 0, hi) {
            Ok(g) => {
                let r = g.report();
                Check::new(name, r.holds, (hi + 1) as u64, u64::from(!r.holds), json!({ "components": r.components }))
            }
            Err(e) => Check::errored(name, &e),
        });
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> RunConfig {
        RunConfig {
            samples: 500,
            instances: 20,
            classical_samples: 200,
            affine_maps: 10,
            affine_triples: 10,
            ef_max_rank: 1,
            distance_sets: vec![vec![1], vec![2]],
            radius: 3,
            ..RunConfig::default()
        }
    }

    #[test]
    fn commands_round_trip() {
        for c in Command::SUITES.into_iter().chain([Command::All]) {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!(matches!("nope".parse::<Command>(), Err(Error::UnknownCommand(_))));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = RunConfig {
            k: Some(1),
            l: Some(3),
            ..RunConfig::default()
        };
        assert!(matches!(run(Command::DtGraphs, &c), Err(Error::Config(_))));
        c.k = Some(2);
        c.primes = vec![4];
        assert!(run(Command::Classical, &c).is_err());
    }

    #[test]
    fn every_suite_passes_on_a_small_config() {
        let report = run(Command::All, &quick()).unwrap();
        for s in &report.suites {
            for c in &s.checks {
                assert!(c.passed(), "{} / {}: {:?}", s.name, c.name, c.detail);
            }
        }
        assert_eq!(report.exit_code(), 0);
        assert!(report.to_text().contains("all checks passed"));
    }

    #[test]
    fn reports_are_deterministic() {
        let c = quick();
        let a = run(Command::VerifyAxioms, &c).unwrap().to_json();
        let b = run(Command::VerifyAxioms, &c).unwrap().to_json();
        assert_eq!(a, b);
        let other = RunConfig { seed: 7, ..c };
        assert_ne!(a, run(Command::VerifyAxioms, &other).unwrap().to_json());
    }

    #[test]
    fn config_deserializes_with_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"seed": 9, "format": "json"}"#).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.samples, RunConfig::default().samples);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed": 9}"#).is_err());
    }
}
