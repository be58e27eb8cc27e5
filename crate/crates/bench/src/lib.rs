//! Seeded fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treelike::{Cone, End, EndSampler, Prime, Rational, RationalSampler, TreeVertex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn quads(n: usize, window: i64, seed: u64) -> Vec<[End; 4]> {
    let s = EndSampler::new(window);
    let mut r = rng(seed);
    (0..n).map(|_| std::array::from_fn(|_| s.sample(&mut r))).collect()
}

/// `n` distinct ends.
pub fn tuple(n: usize, window: i64, seed: u64) -> Vec<End> {
    let s = EndSampler::new(window);
    let mut r = rng(seed);
    let mut out: Vec<End> = Vec::new();
    while out.len() < n {
        let x = s.sample(&mut r);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// A prefix cone at level 2 on a sampled end, with two members.
pub fn cone_pair(seed: u64) -> (Cone, End, End) {
    let s = EndSampler::new(12);
    let mut r = rng(seed);
    let base = s.sample(&mut r);
    let c = Cone::prefix(TreeVertex::on_end(&base, 2));
    let x = c.sample(&s, &mut r);
    let y = c.sample(&s, &mut r);
    (c, x, y)
}

pub fn rationals(n: usize, p: u64, seed: u64) -> Vec<Rational> {
    let s = RationalSampler::new(1000, &[Prime::new(p).expect("prime")]);
    let mut r = rng(seed);
    (0..n).map(|_| s.sample(&mut r)).collect()
}
