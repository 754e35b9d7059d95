//! Points of the unit cube `[0,1]^k`, the pair domain `D_k`, the simplices
//! `Γ_n`, and the deterministic lattice grids over them.
//!
//! All arithmetic is componentwise. Results that land within [`CUBE_TOL`] of
//! the cube are clamped onto it; anything further out is an error.

use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Rounding slack accepted when an arithmetic result leaves the cube.
pub const CUBE_TOL: f64 = 1e-12;
/// Absolute tolerance on simplex sums.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Largest denominator considered when recovering a lattice key.
const KEY_MAX_DEN: u64 = 1 << 18;
const KEY_TOL: f64 = 1e-13;
const FLOAT_TAG: u64 = 1 << 63;

pub(crate) type Coords = SmallVec<[f64; 4]>;

/// A point of `[0,1]^k`.
#[derive(Clone, PartialEq)]
pub struct KVec(Coords);

impl KVec {
    pub fn new<I: IntoIterator<Item = f64>>(coords: I) -> Result<Self> {
        let coords: Coords = coords.into_iter().collect();
        for (index, &value) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfCube { index, value });
            }
        }
        Ok(KVec(coords))
    }

    pub fn splat(k: usize, value: f64) -> Result<Self> {
        Self::new(std::iter::repeat_n(value, k))
    }

    pub fn ones(k: usize) -> Self {
        KVec(SmallVec::from_elem(1.0, k))
    }

    pub fn zeros(k: usize) -> Self {
        KVec(SmallVec::from_elem(0.0, k))
    }

    /// Builds `codes / m` componentwise.
    pub fn from_lattice(codes: &[u32], m: u32) -> Self {
        KVec(codes.iter().map(|&c| f64::from(c) / f64::from(m)).collect())
    }

    // Clamps values within CUBE_TOL of the cube, rejects the rest.
    fn from_raw(raw: Coords) -> Result<Self> {
        let mut out = raw;
        for (index, v) in out.iter_mut().enumerate() {
            if v.is_nan() || *v < -CUBE_TOL || *v > 1.0 + CUBE_TOL {
                return Err(Error::OutOfCube { index, value: *v });
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(KVec(out))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    fn check_dim(&self, other: &KVec) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &KVec, op: impl Fn(f64, f64) -> f64) -> Result<KVec> {
        self.check_dim(other)?;
        Self::from_raw(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        )
    }

    pub fn add(&self, other: &KVec) -> Result<KVec> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &KVec) -> Result<KVec> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &KVec) -> Result<KVec> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `1 - x`.
    pub fn complement(&self) -> KVec {
        KVec(self.0.iter().map(|v| 1.0 - v).collect())
    }

    /// Componentwise `self / z` with the convention `0 / 0 = 0`.
    pub fn safe_div(&self, z: &KVec) -> Result<KVec> {
        self.check_dim(z)?;
        let mut out = Coords::with_capacity(self.dim());
        for (index, (&y, &d)) in self.0.iter().zip(&z.0).enumerate() {
            if d > 0.0 {
                out.push(y / d);
            } else if y == 0.0 {
                out.push(0.0);
            } else {
                return Err(Error::NonzeroOverZero {
                    index,
                    numerator: y,
                });
            }
        }
        Self::from_raw(out)
    }

    /// True when every coordinate lies in the open interval `]0,1[`.
    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&v| v > 0.0 && v < 1.0)
    }

    pub fn key(&self) -> PointKey {
        PointKey(self.0.iter().map(|&v| coord_key(v)).collect())
    }
}

impl fmt::Debug for KVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl Serialize for KVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.dim()))?;
        for v in &self.0 {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

/// Canonical identity of a point, stable across the different floating-point
/// routes that reach the same lattice rational.
///
/// Each coordinate is keyed by its reduced fraction `p/q` when one with
/// `q <= 2^18` lies within `1e-13`, and by its bit pattern otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointKey(pub(crate) SmallVec<[u64; 4]>);

impl PointKey {
    pub fn words(&self) -> &[u64] {
        &self.0
    }
}

/// Smallest-denominator continued-fraction convergent of `v` within `tol`,
/// as `(numerator, denominator)`.
pub fn recover_rational(v: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    if !(0.0..=1.0).contains(&v) {
        return None;
    }
    let (mut h_prev, mut h) = (0u64, 1u64);
    let (mut k_prev, mut k) = (1u64, 0u64);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        if a > max_den as f64 {
            return None;
        }
        let a = a as u64;
        let h_next = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > max_den {
            return None;
        }
        if (v - h_next as f64 / k_next as f64).abs() <= tol {
            return Some((h_next, k_next));
        }
        let frac = x - a as f64;
        if frac <= 0.0 {
            return None;
        }
        x = 1.0 / frac;
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
    }
    None
}

pub(crate) fn coord_key(v: f64) -> u64 {
    match recover_rational(v, KEY_MAX_DEN, KEY_TOL) {
        Some((p, q)) => (p << 32) | q,
        None => v.to_bits() | FLOAT_TAG,
    }
}

/// A pair `(x, y)` of `D_k`: `x, y ∈ [0,1[^k` with `x + y <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DkPair {
    x: KVec,
    y: KVec,
}

impl DkPair {
    pub fn new(x: KVec, y: KVec) -> Result<Self> {
        x.check_dim(&y)?;
        for j in 0..x.dim() {
            let (a, b) = (x.0[j], y.0[j]);
            if a >= 1.0 || b >= 1.0 || a + b > 1.0 + CUBE_TOL {
                return Err(Error::NotInDk(format!("coordinate {j}: x = {a}, y = {b}")));
            }
        }
        Ok(DkPair { x, y })
    }

    pub fn x(&self) -> &KVec {
        &self.x
    }

    pub fn y(&self) -> &KVec {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }
}

/// A point `(p_1, ..., p_n)` of `Γ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexTuple {
    parts: Vec<KVec>,
}

impl SimplexTuple {
    pub fn new(parts: Vec<KVec>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::NotInSimplex(format!(
                "need at least 2 parts, got {}",
                parts.len()
            )));
        }
        let k = parts[0].dim();
        for p in &parts {
            if p.dim() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: p.dim(),
                });
            }
        }
        for j in 0..k {
            let sum: f64 = parts.iter().map(|p| p.0[j]).sum();
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::NotInSimplex(format!("coordinate {j} sums to {sum}")));
            }
        }
        Ok(SimplexTuple { parts })
    }

    pub fn parts(&self) -> &[KVec] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }
}

/// Mixed-radix counter over `0..=bounds[i]`, last digit fastest.
fn odometer(bounds: SmallVec<[u32; 8]>) -> impl Iterator<Item = SmallVec<[u32; 8]>> {
    let mut next: Option<SmallVec<[u32; 8]>> = Some(SmallVec::from_elem(0, bounds.len()));
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            if succ[i] < bounds[i] {
                succ[i] += 1;
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    })
}

/// All `(x, y) ∈ D_k` with coordinates in `{0, 1/m, ..., (m-1)/m}`, in
/// lexicographic order of the lattice code `(x·m, y·m)`.
pub fn dk_grid(k: usize, m: u32) -> impl Iterator<Item = DkPair> {
    assert!(k >= 1 && m >= 2, "dk_grid needs k >= 1 and m >= 2");
    odometer(SmallVec::from_elem(m - 1, k)).flat_map(move |xi| {
        let x = KVec::from_lattice(&xi, m);
        let bounds = xi.iter().map(|&i| (m - 1).min(m - i)).collect();
        odometer(bounds).map(move |yj| DkPair {
            x: x.clone(),
            y: KVec::from_lattice(&yj, m),
        })
    })
}

/// `{0, 1/m, ..., 1}^k` in lexicographic order.
pub fn cube_grid(k: usize, m: u32) -> impl Iterator<Item = KVec> {
    assert!(k >= 1 && m >= 1);
    odometer(SmallVec::from_elem(m, k)).map(move |c| KVec::from_lattice(&c, m))
}

/// `{1/m, ..., (m-1)/m}^k` in lexicographic order.
pub fn interior_grid(k: usize, m: u32) -> impl Iterator<Item = KVec> {
    assert!(k >= 1 && m >= 2);
    odometer(SmallVec::from_elem(m - 2, k)).map(move |c| {
        let shifted: SmallVec<[u32; 8]> = c.iter().map(|v| v + 1).collect();
        KVec::from_lattice(&shifted, m)
    })
}

/// Compositions of `m` into `n` nonnegative parts, lexicographic.
pub fn compositions(m: u32, n: usize) -> Vec<Vec<u32>> {
    fn rec(rest: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in 0..=rest {
            prefix.push(c);
            rec(rest - c, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(m, n, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// All tuples of `Γ_n` whose coordinates are compositions of `m` divided by
/// `m`. Coordinate 1 is the most significant digit of the order.
pub fn simplex_grid(n: usize, k: usize, m: u32) -> impl Iterator<Item = SimplexTuple> {
    assert!(n >= 2 && k >= 1 && m >= 1);
    let comps = compositions(m, n);
    let last = (comps.len() - 1) as u32;
    odometer(SmallVec::from_elem(last, k)).map(move |idx| {
        let parts = (0..n)
            .map(|i| {
                KVec(
                    idx.iter()
                        .map(|&c| f64::from(comps[c as usize][i]) / f64::from(m))
                        .collect(),
                )
            })
            .collect();
        SimplexTuple { parts }
    })
}
