//! Finite-support 0/1 sequences over the integers, the C-relation on them,
//! and the D-relation it induces.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{parse_err, Error, Result};

/// A 0/1 sequence indexed by the integers with finitely many ones.
///
/// Stored as its strictly increasing support.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct End {
    support: Vec<i64>,
}

/// An integer index or `+∞`, ordered with `+∞` above every integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Finite(i64),
    Infinite,
}

impl Level {
    pub fn finite(self) -> Option<i64> {
        match self {
            Level::Finite(n) => Some(n),
            Level::Infinite => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(n) => write!(f, "{n}"),
            Level::Infinite => f.write_str("inf"),
        }
    }
}

impl End {
    /// The all-zero sequence.
    pub fn zero() -> Self {
        End::default()
    }

    /// Builds an end from any collection of indices, treated as a set.
    pub fn new(indices: impl IntoIterator<Item = i64>) -> Self {
        let mut support: Vec<i64> = indices.into_iter().collect();
        support.sort_unstable();
        support.dedup();
        End { support }
    }

    /// Builds an end from a support that must already be strictly increasing.
    pub fn from_support(support: Vec<i64>) -> Result<Self> {
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameters(format!(
                "support {support:?} is not strictly increasing"
            )));
        }
        Ok(End { support })
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn bit(&self, i: i64) -> bool {
        self.support.binary_search(&i).is_ok()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.support.first().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.support.last().copied()
    }

    /// The part of the support strictly below `n`.
    pub fn restrict_below(&self, n: i64) -> End {
        let cut = self.support.partition_point(|&i| i < n);
        End {
            support: self.support[..cut].to_vec(),
        }
    }

    /// The part of the support at or above `n`.
    pub fn restrict_from(&self, n: i64) -> End {
        let cut = self.support.partition_point(|&i| i < n);
        End {
            support: self.support[cut..].to_vec(),
        }
    }

    /// True when `self` and `other` agree at every index below `n`.
    pub fn agrees_below(&self, other: &End, n: i64) -> bool {
        first_diff(self, other) >= Level::Finite(n)
    }

    /// Moves the value at index `i` to index `i + k`.
    pub fn shift(&self, k: i64) -> End {
        End {
            support: self.support.iter().map(|&i| i + k).collect(),
        }
    }

    pub fn with_bit(&self, i: i64, value: bool) -> End {
        let mut support = self.support.clone();
        match (support.binary_search(&i), value) {
            (Ok(pos), false) => {
                support.remove(pos);
            }
            (Err(pos), true) => support.insert(pos, i),
            _ => {}
        }
        End { support }
    }
}

/// Pointwise sum modulo 2.
pub fn xor(a: &End, b: &End) -> End {
    let (x, y) = (&a.support, &b.support);
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            Ordering::Less => {
                out.push(x[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(y[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    End { support: out }
}

/// Least index at which `a` and `b` differ, `+∞` when they are equal.
pub fn first_diff(a: &End, b: &End) -> Level {
    let (x, y) = (&a.support, &b.support);
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        if x[i] == y[j] {
            i += 1;
            j += 1;
        } else {
            return Level::Finite(x[i].min(y[j]));
        }
    }
    match (x.get(i), y.get(j)) {
        (Some(&n), _) | (_, Some(&n)) => Level::Finite(n),
        (None, None) => Level::Infinite,
    }
}

/// `C(x; y, z)`: `y` and `z` agree strictly further than `x` and `y` do.
pub fn c_rel(x: &End, y: &End, z: &End) -> bool {
    first_diff(x, y) < first_diff(y, z)
}

/// The quaternary relation obtained from a ternary C-relation:
/// `C(x;z,w) ∧ C(y;z,w)` or `C(z;x,y) ∧ C(w;x,y)`.
pub fn d_via_c<T, F>(c: F, x: &T, y: &T, z: &T, w: &T) -> bool
where
    F: Fn(&T, &T, &T) -> bool,
{
    (c(x, z, w) && c(y, z, w)) || (c(z, x, y) && c(w, x, y))
}

/// `D(x, y; z, w)` on ends, derived from [`c_rel`].
pub fn d_from_c(x: &End, y: &End, z: &End, w: &End) -> bool {
    d_via_c(c_rel, x, y, z, w)
}

/// Random ends with support inside `[-window, window]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndSampler {
    pub window: i64,
    pub density: f64,
}

impl Default for EndSampler {
    fn default() -> Self {
        EndSampler {
            window: 12,
            density: 0.3,
        }
    }
}

impl EndSampler {
    pub fn new(window: i64) -> Self {
        EndSampler {
            window,
            ..Default::default()
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> End {
        End {
            support: (-self.window..=self.window)
                .filter(|_| rng.random_bool(self.density))
                .collect(),
        }
    }

    /// A sample that agrees with `prefix` below `level`.
    pub fn sample_with_prefix<R: Rng + ?Sized>(&self, rng: &mut R, prefix: &End, level: i64) -> End {
        let tail = self.sample(rng).restrict_from(level);
        xor(&prefix.restrict_below(level), &tail)
    }
}

/// Every end whose support lies in `lo..=hi`, in a fixed order.
pub fn all_ends_in(lo: i64, hi: i64) -> Vec<End> {
    let width = (hi - lo + 1).max(0) as u32;
    (0u64..1 << width)
        .map(|mask| End::new((0..width).filter(|b| mask >> b & 1 == 1).map(|b| lo + b as i64)))
        .collect()
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.support.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for End {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| parse_err(s, "expected `{i1,i2,...}`"))?;
        let support = parse_index_list(inner).map_err(|reason| parse_err(s, reason))?;
        End::from_support(support).map_err(|_| parse_err(s, "indices must be strictly increasing"))
    }
}

pub(crate) fn parse_index_list(inner: &str) -> std::result::Result<Vec<i64>, String> {
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("bad index `{}`: {e}", t.trim())))
        .collect()
}

impl Serialize for End {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for End {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
