//! Information measures `I_n: Γ_n -> R`: the exact family
//! `J_n = c(Σ M(p_i) - 1) + d(M(p_1) - 1)`, measures generated by the
//! `M`-recursion from an `I_2`, level-wise perturbations, the deficiencies
//! `ε_n`, and the system stability certificate.

use serde::Serialize;
use smallvec::SmallVec;

use crate::domain::{cube_grid, dk_grid, simplex_grid, KVec, SimplexTuple};
use crate::error::{Error, Result};
use crate::feim::{self, CertifyOptions, Fcn, QStar, Table, Verdict};
use crate::harness::NoiseSpec;
use crate::multiplicative::MultiplicativeSpec;
use crate::scan::{self, Exec};

#[derive(Debug, Clone, PartialEq)]
pub struct JFamily {
    pub c: f64,
    pub d: f64,
    pub m: MultiplicativeSpec,
}

impl JFamily {
    pub fn new(c: f64, d: f64, m: MultiplicativeSpec) -> Self {
        JFamily { c, d, m }
    }

    pub fn eval(&self, parts: &[KVec]) -> f64 {
        let sum: f64 = parts.iter().map(|p| self.m.eval(p)).sum();
        self.c * (sum - 1.0) + self.d * (self.m.eval(&parts[0]) - 1.0)
    }

    /// `x ↦ J_2(1-x, x)`, which is the exact solution with `a = c`, `b = c + d`.
    pub fn i2_fcn(&self) -> Fcn {
        Fcn::exact(self.c, self.c + self.d, self.m.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureFamily {
    ExactJ(JFamily),
    /// `I_2(1-x, x) = i2(x)`, higher levels by the `M`-recursion.
    Recursive {
        i2: Fcn,
        m: MultiplicativeSpec,
    },
    /// Adds `η_n` with `|η_n| <= noise[n-2].amplitude` at level `n`.
    /// Levels past the end of `noise` are unperturbed.
    PerturbedLevels {
        base: Box<MeasureFamily>,
        noise: Vec<NoiseSpec>,
    },
}

impl MeasureFamily {
    pub fn m(&self) -> &MultiplicativeSpec {
        match self {
            MeasureFamily::ExactJ(j) => &j.m,
            MeasureFamily::Recursive { m, .. } => m,
            MeasureFamily::PerturbedLevels { base, .. } => base.m(),
        }
    }

    /// The same noise settings on levels `2..=max_level`.
    pub fn perturbed_levels(base: MeasureFamily, noise: NoiseSpec, max_level: usize) -> Self {
        MeasureFamily::PerturbedLevels {
            base: Box::new(base),
            noise: vec![noise; max_level.saturating_sub(1)],
        }
    }

    pub fn eval(&self, tuple: &SimplexTuple) -> Result<f64> {
        self.eval_parts(tuple.parts())
    }

    /// Evaluates at `parts` without checking simplex membership. The
    /// conditional pairs `(p_1/s, p_2/s)` produced by the `0/0 = 0`
    /// convention are not in `Γ_2` when a coordinate of `s` vanishes.
    pub fn eval_parts(&self, parts: &[KVec]) -> Result<f64> {
        assert!(parts.len() >= 2, "measures are defined for n >= 2");
        match self {
            MeasureFamily::ExactJ(j) => Ok(j.eval(parts)),
            MeasureFamily::Recursive { i2, m } => {
                let n = parts.len();
                let mut head = parts[0].clone();
                let mut total = 0.0;
                for p in &parts[1..n - 1] {
                    let s = head.add(p)?;
                    total += m.eval(&s) * i2.eval(&p.safe_div(&s)?)?;
                    head = s;
                }
                Ok(total + i2.eval(&parts[n - 1])?)
            }
            MeasureFamily::PerturbedLevels { base, noise } => {
                let n = parts.len();
                let eta = match noise.get(n - 2) {
                    Some(spec) => {
                        let flat: SmallVec<[f64; 16]> = parts
                            .iter()
                            .flat_map(|p| p.coords().iter().copied())
                            .collect();
                        spec.eta(n as u64, &flat)
                    }
                    None => 0.0,
                };
                Ok(base.eval_parts(parts)? + eta)
            }
        }
    }
}

pub fn measure_eval(family: &MeasureFamily, tuple: &SimplexTuple) -> Result<f64> {
    family.eval(tuple)
}

/// `|I_n(p) - I_{n-1}(p_1+p_2, p_3, ...) - M(p_1+p_2) I_2(p_1/s, p_2/s)|`.
fn recursion_gap(family: &MeasureFamily, parts: &[KVec]) -> Result<f64> {
    let m = family.m();
    let s = parts[0].add(&parts[1])?;
    let cond = [parts[0].safe_div(&s)?, parts[1].safe_div(&s)?];
    let mut reduced = Vec::with_capacity(parts.len() - 1);
    reduced.push(s.clone());
    reduced.extend_from_slice(&parts[2..]);
    let gap = family.eval_parts(parts)?
        - family.eval_parts(&reduced)?
        - m.eval(&s) * family.eval_parts(&cond)?;
    Ok(gap.abs())
}

/// Measured `ε_{n-1}`: the largest recursion gap over a `Γ_n` grid.
pub fn recursivity_defect(family: &MeasureFamily, n: usize, grid: &[SimplexTuple]) -> Result<f64> {
    recursivity_defect_with(Exec::default(), family, n, grid)
}

pub fn recursivity_defect_with(
    exec: Exec,
    family: &MeasureFamily,
    n: usize,
    grid: &[SimplexTuple],
) -> Result<f64> {
    assert!(n >= 3, "recursivity is defined from level 3 on");
    let best = scan::try_max(exec, grid, |t| {
        if t.n() != n {
            return Err(Error::NotInSimplex(format!(
                "expected a Γ_{n} tuple, got n = {}",
                t.n()
            )));
        }
        recursion_gap(family, t.parts())
    })?;
    best.map(|b| b.value).ok_or(Error::EmptyGrid)
}

/// Measured `ε_1`: `max |I_3(p_1, p_2, p_3) - I_3(p_1, p_3, p_2)|`.
pub fn semisymmetry_defect(family: &MeasureFamily, grid: &[SimplexTuple]) -> Result<f64> {
    let best = scan::try_max(Exec::default(), grid, |t| {
        if t.n() != 3 {
            return Err(Error::NotInSimplex(format!(
                "expected a Γ_3 tuple, got n = {}",
                t.n()
            )));
        }
        let p = t.parts();
        let swapped = [p[0].clone(), p[2].clone(), p[1].clone()];
        Ok((family.eval_parts(p)? - family.eval_parts(&swapped)?).abs())
    })?;
    best.map(|b| b.value).ok_or(Error::EmptyGrid)
}

/// Tabulates `f(x) = I_2(1-x, x)` at the given points.
pub fn derive_f<'a, I>(family: &MeasureFamily, points: I) -> Result<Fcn>
where
    I: IntoIterator<Item = &'a KVec>,
{
    let table = Table::from_fn(points, |x| family.eval_parts(&[x.complement(), x.clone()]))?;
    Ok(Fcn::Tabulated(table))
}

/// Right-hand side of the system bound at level `n`:
/// `Σ_{k=2}^{n-1} ε_k + (1 + (n-2) M(p_1+p_2)) K(p_2)`, with `K` taken at
/// residual level `ε_1 + 2ε_2`. `eps_seq[i]` holds `ε_{i+1}`.
pub fn system_bound(
    n: usize,
    eps_seq: &[f64],
    m: &MultiplicativeSpec,
    qstar: &KVec,
    tuple: &SimplexTuple,
    tau: f64,
) -> Result<f64> {
    assert!(n >= 2 && tuple.n() == n);
    let needed = (n - 1).max(2);
    if eps_seq.len() < needed {
        return Err(Error::Config(format!(
            "level {n} needs ε_1..ε_{needed}, got {} values",
            eps_seq.len()
        )));
    }
    let tail: f64 = eps_seq[1..n - 1].iter().sum();
    let k_eps = eps_seq[0] + 2.0 * eps_seq[1];
    let p = tuple.parts();
    let k = feim::k_bound(m, qstar, k_eps, &p[1], tau)?;
    let s = p[0].add(&p[1])?;
    Ok(tail + (1.0 + (n as f64 - 2.0) * m.eval(&s)) * k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelCheck {
    pub n: usize,
    pub points_checked: usize,
    /// `max |I_n - J_n|`.
    pub max_deviation: f64,
    /// `max (|I_n - J_n| - bound)`.
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemCertificate {
    pub c: f64,
    pub d: f64,
    pub qstar: KVec,
    pub defect: f64,
    /// `ε_1, ε_2, ...`.
    pub eps_seq: Vec<f64>,
    /// Measured residual of the derived `f`; at most `ε_1 + 2ε_2`.
    pub feim_eps: f64,
    pub levels: Vec<LevelCheck>,
    pub verdict: Verdict,
}

impl SystemCertificate {
    pub fn max_violation(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| l.max_violation)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn points_checked(&self) -> usize {
        self.levels.iter().map(|l| l.points_checked).sum()
    }
}

/// Measures the deficiencies up to level `max_level` on resolution-`m`
/// grids, fits `(c, d)` through the derived `f`, and checks
/// `|I_n - J_n| <= system_bound` on every `Γ_n` grid point, `n = 2..=max_level`.
pub fn certify_system(
    family: &MeasureFamily,
    max_level: usize,
    m: u32,
    qstar: &QStar,
    opts: &CertifyOptions,
) -> Result<SystemCertificate> {
    assert!(max_level >= 2 && m >= 2);
    let mult = family.m();
    let k = mult.dim();
    let (qstar, defect) = qstar.resolve(mult, opts.tau)?;

    let gamma3: Vec<SimplexTuple> = simplex_grid(3, k, m).collect();
    let mut eps_seq = vec![
        semisymmetry_defect(family, &gamma3)?,
        recursivity_defect_with(opts.exec, family, 3, &gamma3)?,
    ];
    let mut grids: Vec<Vec<SimplexTuple>> = vec![simplex_grid(2, k, m).collect(), gamma3];
    for n in 4..=max_level {
        let g: Vec<SimplexTuple> = simplex_grid(n, k, m).collect();
        eps_seq.push(recursivity_defect_with(opts.exec, family, n, &g)?);
        grids.push(g);
    }
    grids.truncate(max_level - 1);

    let dgrid: Vec<_> = dk_grid(k, m).collect();
    let mut points = feim::feim_eval_points(&dgrid)?;
    points.extend(cube_grid(k, m));
    points.push(KVec::ones(k));
    points.push(qstar.clone());
    let f = derive_f(family, &points)?;
    let feim_eps = feim::sup_residual_with(opts.exec, &f, mult, &dgrid)?.value;
    let (a, b) = feim::construct_ab(&f, mult, &qstar, opts.tau)?;
    let exact = JFamily::new(a, b - a, mult.clone());

    let mut levels = Vec::with_capacity(grids.len());
    for (offset, grid) in grids.iter().enumerate() {
        let n = offset + 2;
        let checks = scan::map(opts.exec, grid, |t| -> Result<(f64, f64)> {
            let dev = (family.eval(t)? - exact.eval(t.parts())).abs();
            Ok((
                dev,
                dev - system_bound(n, &eps_seq, mult, &qstar, t, opts.tau)?,
            ))
        });
        let mut max_deviation = 0.0f64;
        let mut max_violation = f64::NEG_INFINITY;
        for c in checks {
            let (dev, viol) = c?;
            max_deviation = max_deviation.max(dev);
            max_violation = max_violation.max(viol);
        }
        levels.push(LevelCheck {
            n,
            points_checked: grid.len(),
            max_deviation,
            max_violation,
        });
    }
    let verdict = Verdict::from_pass(levels.iter().all(|l| l.max_violation <= opts.slack));
    Ok(SystemCertificate {
        c: exact.c,
        d: exact.d,
        qstar,
        defect,
        eps_seq,
        feim_eps,
        levels,
        verdict,
    })
}
