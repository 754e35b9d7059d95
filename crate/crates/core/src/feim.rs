//! The fundamental equation of information of multiplicative type
//!
//! ```text
//! f(x) + M(1-x) f(y/(1-x)) = f(y) + M(1-y) f(x/(1-y)),   (x, y) ∈ D_k
//! ```
//!
//! its exact solutions `a M(x) + b (M(1-x) - 1)`, and the stability
//! certificate: from the measured residual `ε` and a witness `q*`, build
//! `(a, b)` constructively and check that `f` stays within
//!
//! ```text
//! K(x) = (4ε + 3ε M(1 - x q*)) / |M(q*) + M(1-q*) - 1|
//! ```
//!
//! of the exact solution at every point of a cube grid.

use std::collections::HashMap;

use serde::Serialize;

use crate::domain::{DkPair, KVec, PointKey};
use crate::error::{Error, Result};
use crate::harness::NoiseSpec;
use crate::multiplicative::{MultiplicativeSpec, DEFAULT_TAU};
use crate::scan::{self, ArgMax, Exec};

/// Slack on every inequality check, covering accumulated rounding.
pub const NUMERICAL_SLACK: f64 = 1e-9;

/// Values of a function on a finite set of lattice points. Lookups off the
/// table fail; there is no interpolation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    values: HashMap<PointKey, f64>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    /// Tabulates `f` at each point. Duplicate points keep the first value.
    pub fn from_fn<'a, I, F>(points: I, mut f: F) -> Result<Self>
    where
        I: IntoIterator<Item = &'a KVec>,
        F: FnMut(&KVec) -> Result<f64>,
    {
        let mut table = Table::new();
        for x in points {
            if let std::collections::hash_map::Entry::Vacant(e) = table.values.entry(x.key()) {
                e.insert(f(x)?);
            }
        }
        Ok(table)
    }

    pub fn insert(&mut self, x: &KVec, value: f64) {
        self.values.insert(x.key(), value);
    }

    pub fn get(&self, x: &KVec) -> Option<f64> {
        self.values.get(&x.key()).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A real function on `[0,1]^k`.
#[derive(Debug, Clone, PartialEq)]
pub enum Fcn {
    /// `a M(x) + b (M(1-x) - 1)`.
    Exact {
        a: f64,
        b: f64,
        m: MultiplicativeSpec,
    },
    Tabulated(Table),
    /// `base(x) + η(x)` with `|η| <= noise.amplitude`.
    Perturbed {
        base: Box<Fcn>,
        noise: NoiseSpec,
    },
}

impl Fcn {
    pub fn exact(a: f64, b: f64, m: MultiplicativeSpec) -> Self {
        Fcn::Exact { a, b, m }
    }

    pub fn eval(&self, x: &KVec) -> Result<f64> {
        match self {
            Fcn::Exact { a, b, m } => Ok(a * m.eval(x) + b * (m.eval(&x.complement()) - 1.0)),
            Fcn::Tabulated(t) => t
                .get(x)
                .ok_or_else(|| Error::EvaluationOutsideTable(x.coords().to_vec())),
            Fcn::Perturbed { base, noise } => Ok(base.eval(x)? + noise.eta(0, x.coords())),
        }
    }
}

/// `f(x) + M(1-x) f(y/(1-x)) - f(y) - M(1-y) f(x/(1-y))`.
pub fn feim_residual(f: &Fcn, m: &MultiplicativeSpec, pair: &DkPair) -> Result<f64> {
    let (x, y) = (pair.x(), pair.y());
    let cx = x.complement();
    let cy = y.complement();
    let lhs = f.eval(x)? + m.eval(&cx) * f.eval(&y.safe_div(&cx)?)?;
    let rhs = f.eval(y)? + m.eval(&cy) * f.eval(&x.safe_div(&cy)?)?;
    Ok(lhs - rhs)
}

/// Largest `|residual|` over the grid, with its position in the grid.
pub fn sup_residual(f: &Fcn, m: &MultiplicativeSpec, grid: &[DkPair]) -> Result<ArgMax> {
    sup_residual_with(Exec::default(), f, m, grid)
}

pub fn sup_residual_with(
    exec: Exec,
    f: &Fcn,
    m: &MultiplicativeSpec,
    grid: &[DkPair],
) -> Result<ArgMax> {
    scan::try_max(exec, grid, |p| feim_residual(f, m, p).map(f64::abs))?.ok_or(Error::EmptyGrid)
}

/// Every point at which [`feim_residual`] evaluates `f` over the grid.
pub fn feim_eval_points(grid: &[DkPair]) -> Result<Vec<KVec>> {
    let mut out = Vec::with_capacity(4 * grid.len());
    for p in grid {
        let (x, y) = (p.x(), p.y());
        out.push(x.clone());
        out.push(y.clone());
        out.push(y.safe_div(&x.complement())?);
        out.push(x.safe_div(&y.complement())?);
    }
    Ok(out)
}

/// `F(p, q) = f(1-p) + M(p) f(q) - f(pq) - M(1-pq) f((1-p)/(1-pq))`, the
/// residual at `x = 1-p`, `y = pq`.
pub fn f_eval(f: &Fcn, m: &MultiplicativeSpec, p: &KVec, q: &KVec) -> Result<f64> {
    if !p.is_interior() || !q.is_interior() {
        return Err(Error::NotInDk(format!(
            "F needs p, q in the open cube, got {p:?}, {q:?}"
        )));
    }
    let pq = p.mul(q)?;
    let cpq = pq.complement();
    let cp = p.complement();
    Ok(f.eval(&cp)? + m.eval(p) * f.eval(q)?
        - f.eval(&pq)?
        - m.eval(&cpq) * f.eval(&cp.safe_div(&cpq)?)?)
}

/// Open-cube pairs `(p, q) = (1-x, y/(1-x))` for the grid pairs where both
/// are interior, so that `F(p, q)` is the residual at a grid pair.
pub fn open_cube_pairs(grid: &[DkPair]) -> Result<Vec<(KVec, KVec)>> {
    let mut out = Vec::new();
    for pair in grid {
        let p = pair.x().complement();
        if !p.is_interior() {
            continue;
        }
        let q = pair.y().safe_div(&p)?;
        if q.is_interior() {
            out.push((p, q));
        }
    }
    Ok(out)
}

fn checked_defect(m: &MultiplicativeSpec, qstar: &KVec, tau: f64) -> Result<f64> {
    let defect = m.additivity_defect(qstar);
    if defect.abs() < tau {
        return Err(Error::DegenerateWitness { defect, tau });
    }
    Ok(defect)
}

/// Constructive parameters from `f(1)` and `f(q*)`:
/// `b = (f(q*) - f(1) M(q*)) / defect(q*)`, `a = f(1) + b`.
pub fn construct_ab(f: &Fcn, m: &MultiplicativeSpec, qstar: &KVec, tau: f64) -> Result<(f64, f64)> {
    let defect = checked_defect(m, qstar, tau)?;
    let f_one = f.eval(&KVec::ones(m.dim()))?;
    let b = (f.eval(qstar)? - f_one * m.eval(qstar)) / defect;
    Ok((f_one + b, b))
}

/// `K(x)` for residual level `eps` and witness `q*`.
pub fn k_bound(m: &MultiplicativeSpec, qstar: &KVec, eps: f64, x: &KVec, tau: f64) -> Result<f64> {
    let defect = checked_defect(m, qstar, tau)?;
    Ok(k_with_defect(m, qstar, eps, x, defect))
}

fn k_with_defect(m: &MultiplicativeSpec, qstar: &KVec, eps: f64, x: &KVec, defect: f64) -> f64 {
    let xq = x
        .mul(qstar)
        .expect("product of cube points stays in the cube");
    (4.0 * eps + 3.0 * eps * m.eval(&xq.complement())) / defect.abs()
}

/// `(4 + 3B) ε / |defect(q*)|`, an `x`-free majorant of [`k_bound`].
pub fn uniform_bound(m: &MultiplicativeSpec, qstar: &KVec, eps: f64, tau: f64) -> Result<f64> {
    let defect = checked_defect(m, qstar, tau)?;
    Ok((4.0 + 3.0 * m.upper_bound()) * eps / defect.abs())
}

/// How `q*` is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum QStar {
    /// Best interior point of the `resolution` lattice.
    Auto {
        resolution: u32,
    },
    Explicit(KVec),
}

impl QStar {
    /// Returns `(q*, defect)`.
    pub fn resolve(&self, m: &MultiplicativeSpec, tau: f64) -> Result<(KVec, f64)> {
        match self {
            QStar::Auto { resolution } => {
                let w = m.find_witness(*resolution, tau)?;
                Ok((w.qstar, w.defect))
            }
            QStar::Explicit(q) => {
                if q.dim() != m.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: m.dim(),
                        got: q.dim(),
                    });
                }
                if !q.is_interior() {
                    return Err(Error::Config(format!(
                        "q* must lie in the open cube, got {q:?}"
                    )));
                }
                let defect = checked_defect(m, q, tau)?;
                Ok((q.clone(), defect))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    pub tau: f64,
    pub slack: f64,
    pub exec: Exec,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            tau: DEFAULT_TAU,
            slack: NUMERICAL_SLACK,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// Outcome of checking one function against the stability bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityCertificate {
    pub qstar: KVec,
    /// `M(q*) + M(1-q*) - 1`.
    pub defect: f64,
    pub eps_measured: f64,
    pub a: f64,
    pub b: f64,
    /// `max |f(x) - (a M(x) + b (M(1-x) - 1))|` over the cube grid.
    pub sup_deviation: f64,
    /// `max (deviation(x) - K(x))` over the cube grid.
    pub max_violation: f64,
    pub verdict: Verdict,
    pub points_checked: usize,
}

/// Measures `ε` on `dgrid`, fits `(a, b)` at `q*`, and checks the
/// pointwise bound on `cube`.
pub fn certify(
    f: &Fcn,
    m: &MultiplicativeSpec,
    dgrid: &[DkPair],
    cube: &[KVec],
    qstar: &QStar,
    opts: &CertifyOptions,
) -> Result<StabilityCertificate> {
    let (qstar, defect) = qstar.resolve(m, opts.tau)?;
    let eps = sup_residual_with(opts.exec, f, m, dgrid)?.value;
    let f_one = f.eval(&KVec::ones(m.dim()))?;
    let b = (f.eval(&qstar)? - f_one * m.eval(&qstar)) / defect;
    let a = f_one + b;
    let fitted = Fcn::exact(a, b, m.clone());

    let checks = scan::map(opts.exec, cube, |x| -> Result<(f64, f64)> {
        let dev = (f.eval(x)? - fitted.eval(x)?).abs();
        Ok((dev, dev - k_with_defect(m, &qstar, eps, x, defect)))
    });
    if checks.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut sup_deviation = 0.0f64;
    let mut max_violation = f64::NEG_INFINITY;
    for c in checks {
        let (dev, viol) = c?;
        sup_deviation = sup_deviation.max(dev);
        max_violation = max_violation.max(viol);
    }
    Ok(StabilityCertificate {
        qstar,
        defect,
        eps_measured: eps,
        a,
        b,
        sup_deviation,
        max_violation,
        verdict: Verdict::from_pass(max_violation <= opts.slack),
        points_checked: cube.len(),
    })
}
