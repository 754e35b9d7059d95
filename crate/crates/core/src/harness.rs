//! Perturbations, the minimax-fit oracle, and the batch suite runner.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{coord_key, cube_grid, dk_grid, KVec};
use crate::error::{Error, Result};
use crate::feim::{
    self, CertifyOptions, Fcn, QStar, StabilityCertificate, Verdict, NUMERICAL_SLACK,
};
use crate::measures::{self, JFamily, MeasureFamily, SystemCertificate};
use crate::multiplicative::{Atom, Class, MultiplicativeSpec, DEFAULT_TAU};
use crate::scan::{self, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseKind {
    /// Independent uniform draws in `[-amplitude, amplitude]`.
    Uniform,
    /// `±amplitude`, sign flipping between neighbouring cells of width
    /// `1/resolution`.
    Checkerboard { resolution: u32 },
}

/// Deterministic bounded noise `η(x)`, a pure function of
/// `(seed, stream, point)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub amplitude: f64,
    pub seed: u64,
    #[serde(flatten)]
    pub kind: NoiseKind,
}

// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl NoiseSpec {
    pub fn uniform(amplitude: f64, seed: u64) -> Self {
        NoiseSpec {
            amplitude,
            seed,
            kind: NoiseKind::Uniform,
        }
    }

    pub fn checkerboard(amplitude: f64, seed: u64, resolution: u32) -> Self {
        NoiseSpec {
            amplitude,
            seed,
            kind: NoiseKind::Checkerboard { resolution },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Config(format!(
                "noise amplitude must be finite and >= 0, got {}",
                self.amplitude
            )));
        }
        if let NoiseKind::Checkerboard { resolution: 0 } = self.kind {
            return Err(Error::Config(
                "checkerboard resolution must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `η` at a point given by its coordinates. Points that reach the same
    /// lattice rational by different floating-point routes get the same value.
    pub fn eta(&self, stream: u64, coords: &[f64]) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        match self.kind {
            NoiseKind::Uniform => {
                let mut h = mix(self.seed ^ mix(stream));
                for &c in coords {
                    h = mix(h ^ coord_key(c));
                }
                ChaCha8Rng::seed_from_u64(h).random_range(-self.amplitude..=self.amplitude)
            }
            NoiseKind::Checkerboard { resolution } => {
                let r = f64::from(resolution);
                let parity = coords
                    .iter()
                    .map(|&c| (c * r + 1e-9).floor() as u64)
                    .sum::<u64>()
                    + (self.seed & 1);
                if parity.is_multiple_of(2) {
                    self.amplitude
                } else {
                    -self.amplitude
                }
            }
        }
    }
}

pub fn perturb(f: Fcn, noise: NoiseSpec) -> Fcn {
    Fcn::Perturbed {
        base: Box::new(f),
        noise,
    }
}

/// Result of [`minimax_fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimaxFit {
    pub a: f64,
    pub b: f64,
    pub deviation: f64,
}

/// Final parameter step of the minimax refinement.
pub const MINIMAX_STEP: f64 = 1e-6;
const LATTICE_RADIUS: i32 = 5;

/// Chebyshev fit of `f` by `a M(x) + b (M(1-x) - 1)` over the grid, started
/// from the constructive estimate (or the origin when `M` has no witness).
pub fn minimax_fit(f: &Fcn, m: &MultiplicativeSpec, cube: &[KVec]) -> Result<MinimaxFit> {
    let start = match m.find_witness(16, DEFAULT_TAU) {
        Ok(w) => feim::construct_ab(f, m, &w.qstar, DEFAULT_TAU)?,
        Err(Error::NoWitness { .. }) => (0.0, 0.0),
        Err(e) => return Err(e),
    };
    minimax_fit_from(f, m, cube, start)
}

/// Minimises `max |f(x) - a u(x) - b v(x)|` by scanning an 11×11 parameter
/// lattice around the incumbent, moving to the best lattice point, and
/// halving the step whenever the best point is not on the lattice rim. Ends
/// after a scan at step `<= 1e-6` whose optimum is interior. The incumbent
/// only changes on strict improvement, so the result is never worse than
/// `start`.
pub fn minimax_fit_from(
    f: &Fcn,
    m: &MultiplicativeSpec,
    cube: &[KVec],
    start: (f64, f64),
) -> Result<MinimaxFit> {
    if cube.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let rows: Vec<(f64, f64, f64)> = cube
        .iter()
        .map(|x| Ok((f.eval(x)?, m.eval(x), m.eval(&x.complement()) - 1.0)))
        .collect::<Result<_>>()?;
    let objective = |a: f64, b: f64| {
        rows.iter()
            .map(|&(fx, u, v)| (fx - a * u - b * v).abs())
            .fold(0.0f64, f64::max)
    };

    let (mut a, mut b) = start;
    let mut best = objective(a, b);
    let mut step = best.max(MINIMAX_STEP);
    for _ in 0..10_000 {
        let mut arg = (0, 0);
        for i in -LATTICE_RADIUS..=LATTICE_RADIUS {
            for j in -LATTICE_RADIUS..=LATTICE_RADIUS {
                let val = objective(a + f64::from(i) * step, b + f64::from(j) * step);
                if val < best {
                    best = val;
                    arg = (i, j);
                }
            }
        }
        a += f64::from(arg.0) * step;
        b += f64::from(arg.1) * step;
        let on_rim = arg.0.abs() == LATTICE_RADIUS || arg.1.abs() == LATTICE_RADIUS;
        if on_rim {
            continue;
        }
        if step <= MINIMAX_STEP {
            break;
        }
        step = (step * 0.5).max(MINIMAX_STEP * 0.5);
    }
    Ok(MinimaxFit {
        a,
        b,
        deviation: best,
    })
}

/// Expected outcome of a suite case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    #[default]
    Pass,
    NoWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CaseSpec {
    /// Residual of an exact solution must stay below `1e-10`.
    Residual {
        id: String,
        m: MultiplicativeSpec,
        a: f64,
        b: f64,
        grid: u32,
    },
    /// Stability certificate of a (perturbed) exact solution, together with
    /// the uniform bound, the minimax oracle and the `F` bound.
    Certify {
        id: String,
        m: MultiplicativeSpec,
        a: f64,
        b: f64,
        noise: Option<NoiseSpec>,
        grid: u32,
        #[serde(default)]
        expect: Expect,
    },
    /// System certificate of a (perturbed) `J_n` family.
    CertifySystem {
        id: String,
        m: MultiplicativeSpec,
        c: f64,
        d: f64,
        noise: Option<NoiseSpec>,
        levels: usize,
        grid: u32,
        #[serde(default)]
        expect: Expect,
    },
}

impl CaseSpec {
    pub fn id(&self) -> &str {
        match self {
            CaseSpec::Residual { id, .. }
            | CaseSpec::Certify { id, .. }
            | CaseSpec::CertifySystem { id, .. } => id,
        }
    }

    fn validate(&self) -> Result<()> {
        let (grid, noise) = match self {
            CaseSpec::Residual { grid, .. } => (*grid, None),
            CaseSpec::Certify { grid, noise, .. } => (*grid, noise.as_ref()),
            CaseSpec::CertifySystem {
                grid,
                noise,
                levels,
                ..
            } => {
                if *levels < 2 {
                    return Err(Error::Config(format!(
                        "case {}: levels must be >= 2",
                        self.id()
                    )));
                }
                (*grid, noise.as_ref())
            }
        };
        if grid < 2 {
            return Err(Error::Config(format!(
                "case {}: grid must be >= 2",
                self.id()
            )));
        }
        noise.map_or(Ok(()), NoiseSpec::validate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SuiteConfig {
    pub cases: Vec<CaseSpec>,
}

/// Per-case outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub id: String,
    pub expect: Expect,
    /// `pass`, `fail`, `no_witness`, or `error: ...`.
    pub outcome: String,
    /// Whether the outcome matches the expectation.
    pub verdict: Verdict,
    pub residual: Option<f64>,
    pub certificate: Option<StabilityCertificate>,
    pub uniform_bound: Option<f64>,
    pub minimax_deviation: Option<f64>,
    pub f_bound_max: Option<f64>,
    pub system: Option<SystemCertificate>,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub passed: usize,
    pub failed: usize,
    pub results: Vec<CaseResult>,
    pub runtime_ms: f64,
}

/// Checks carried out for a `certify` case beyond the certificate itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyChecks {
    pub certificate: StabilityCertificate,
    pub uniform_bound: f64,
    pub minimax: MinimaxFit,
    /// `max |F(p, q)|` over the open-cube pairs of the grid.
    pub f_bound_max: f64,
}

impl CertifyChecks {
    pub fn all_pass(&self) -> bool {
        let c = &self.certificate;
        c.verdict.is_pass()
            && c.sup_deviation <= self.uniform_bound + NUMERICAL_SLACK
            && self.minimax.deviation <= c.sup_deviation + NUMERICAL_SLACK
            && self.f_bound_max <= c.eps_measured + NUMERICAL_SLACK
    }
}

/// Certificate plus uniform bound, minimax oracle and `F` bound for `f` on
/// resolution-`grid` lattices.
pub fn certify_with_checks(f: &Fcn, m: &MultiplicativeSpec, grid: u32) -> Result<CertifyChecks> {
    let k = m.dim();
    let dgrid: Vec<_> = dk_grid(k, grid).collect();
    let cube: Vec<_> = cube_grid(k, grid).collect();
    let certificate = feim::certify(
        f,
        m,
        &dgrid,
        &cube,
        &QStar::Auto { resolution: grid },
        &CertifyOptions::default(),
    )?;
    let uniform_bound =
        feim::uniform_bound(m, &certificate.qstar, certificate.eps_measured, DEFAULT_TAU)?;
    let minimax = minimax_fit_from(f, m, &cube, (certificate.a, certificate.b))?;
    let pairs = feim::open_cube_pairs(&dgrid)?;
    let f_bound_max = scan::try_max(Exec::default(), &pairs, |(p, q)| {
        feim::f_eval(f, m, p, q).map(f64::abs)
    })?
    .map_or(0.0, |a| a.value);
    Ok(CertifyChecks {
        certificate,
        uniform_bound,
        minimax,
        f_bound_max,
    })
}

fn outcome_of(expect: Expect, r: &Result<bool>) -> (String, Verdict) {
    let outcome = match r {
        Ok(true) => "pass".to_string(),
        Ok(false) => "fail".to_string(),
        Err(Error::NoWitness { .. }) | Err(Error::DegenerateWitness { .. }) => {
            "no_witness".to_string()
        }
        Err(e) => format!("error: {e}"),
    };
    let ok = match expect {
        Expect::Pass => outcome == "pass",
        Expect::NoWitness => outcome == "no_witness",
    };
    (outcome, Verdict::from_pass(ok))
}

fn run_case(case: &CaseSpec) -> CaseResult {
    let start = Instant::now();
    let mut res = CaseResult {
        id: case.id().to_string(),
        expect: Expect::Pass,
        outcome: String::new(),
        verdict: Verdict::Fail,
        residual: None,
        certificate: None,
        uniform_bound: None,
        minimax_deviation: None,
        f_bound_max: None,
        system: None,
        runtime_ms: 0.0,
    };
    let passed: Result<bool> = match case {
        CaseSpec::Residual { m, a, b, grid, .. } => {
            let dgrid: Vec<_> = dk_grid(m.dim(), *grid).collect();
            feim::sup_residual(&Fcn::exact(*a, *b, m.clone()), m, &dgrid).map(|r| {
                res.residual = Some(r.value);
                r.value <= 1e-10
            })
        }
        CaseSpec::Certify {
            m,
            a,
            b,
            noise,
            grid,
            expect,
            ..
        } => {
            res.expect = *expect;
            let mut f = Fcn::exact(*a, *b, m.clone());
            if let Some(n) = noise {
                f = perturb(f, *n);
            }
            certify_with_checks(&f, m, *grid).map(|c| {
                let ok = c.all_pass();
                res.residual = Some(c.certificate.eps_measured);
                res.uniform_bound = Some(c.uniform_bound);
                res.minimax_deviation = Some(c.minimax.deviation);
                res.f_bound_max = Some(c.f_bound_max);
                res.certificate = Some(c.certificate);
                ok
            })
        }
        CaseSpec::CertifySystem {
            m,
            c,
            d,
            noise,
            levels,
            grid,
            expect,
            ..
        } => {
            res.expect = *expect;
            let mut fam = MeasureFamily::ExactJ(JFamily::new(*c, *d, m.clone()));
            if let Some(n) = noise {
                fam = MeasureFamily::perturbed_levels(fam, *n, *levels);
            }
            measures::certify_system(
                &fam,
                *levels,
                *grid,
                &QStar::Auto { resolution: *grid },
                &CertifyOptions::default(),
            )
            .map(|cert| {
                let ok = cert.verdict.is_pass();
                res.system = Some(cert);
                ok
            })
        }
    };
    let (outcome, verdict) = outcome_of(res.expect, &passed);
    res.outcome = outcome;
    res.verdict = verdict;
    res.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    res
}

/// Runs every case and aggregates the results in case order.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    for c in &config.cases {
        c.validate()?;
    }
    let start = Instant::now();
    let results = scan::map(Exec::default(), &config.cases, run_case);
    let passed = results.iter().filter(|r| r.verdict.is_pass()).count();
    Ok(SuiteReport {
        config: config.clone(),
        passed,
        failed: results.len() - passed,
        results,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Atoms used when drawing random non-additive specs.
pub const ATOM_POOL: [Atom; 5] = [
    Atom::Power { alpha: 0.5 },
    Atom::Power { alpha: 1.0 },
    Atom::Power { alpha: 2.0 },
    Atom::Power { alpha: 3.0 },
    Atom::One,
];

/// Lattice resolution of the randomized certify cases.
pub const RANDOM_CASE_GRID: u32 = 16;

/// `count` random perturbed exact solutions with non-additive `M`,
/// `k ∈ {1, 2}`, `a, b ∈ [-2, 2]`, `δ` log-uniform in `[1e-4, 1e-2]`, and
/// alternating uniform/checkerboard noise.
pub fn random_certify_cases(seed: u64, count: usize) -> Vec<CaseSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let k = rng.random_range(1..=2usize);
            let m = loop {
                let atoms = (0..k)
                    .map(|_| ATOM_POOL[rng.random_range(0..ATOM_POOL.len())])
                    .collect();
                let m = MultiplicativeSpec::new(atoms).expect("pool atoms are valid");
                if m.classify() == Class::NonAdditive {
                    break m;
                }
            };
            let grid = RANDOM_CASE_GRID;
            let a = rng.random_range(-2.0..=2.0);
            let b = rng.random_range(-2.0..=2.0);
            let delta = 10f64.powf(rng.random_range(-4.0..=-2.0));
            let noise_seed = rng.random::<u64>();
            let noise = if i % 2 == 0 {
                NoiseSpec::uniform(delta, noise_seed)
            } else {
                NoiseSpec::checkerboard(delta, noise_seed, grid)
            };
            CaseSpec::Certify {
                id: format!("random-{i:03}"),
                m,
                a,
                b,
                noise: Some(noise),
                grid,
                expect: Expect::Pass,
            }
        })
        .collect()
}

/// Projections in one and two dimensions.
pub fn projection_specs() -> Vec<MultiplicativeSpec> {
    vec![
        MultiplicativeSpec::power(1.0, 1),
        MultiplicativeSpec::new(vec![Atom::power(1.0), Atom::One]).expect("valid"),
        MultiplicativeSpec::new(vec![Atom::One, Atom::power(1.0)]).expect("valid"),
    ]
}

/// The full matrix run by `suite` without a config file.
pub fn default_suite(seed: u64) -> SuiteConfig {
    let mut cases = Vec::new();
    for k in 1..=2 {
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            for a in -2..=2 {
                for b in -2..=2 {
                    cases.push(CaseSpec::Residual {
                        id: format!("exact-k{k}-alpha{alpha}-a{a}-b{b}"),
                        m: MultiplicativeSpec::power(alpha, k),
                        a: f64::from(a),
                        b: f64::from(b),
                        grid: 16,
                    });
                }
            }
        }
    }
    cases.extend(random_certify_cases(seed, 100));
    cases.push(CaseSpec::CertifySystem {
        id: "system-alpha2-k1".into(),
        m: MultiplicativeSpec::power(2.0, 1),
        c: 1.0,
        d: 0.5,
        noise: Some(NoiseSpec::uniform(1e-3, seed)),
        levels: 5,
        grid: 8,
        expect: Expect::Pass,
    });
    for (i, m) in projection_specs().into_iter().enumerate() {
        cases.push(CaseSpec::Certify {
            id: format!("projection-{i}-certify"),
            m: m.clone(),
            a: 1.0,
            b: 0.0,
            noise: None,
            grid: 8,
            expect: Expect::NoWitness,
        });
        cases.push(CaseSpec::CertifySystem {
            id: format!("projection-{i}-system"),
            m,
            c: 1.0,
            d: 0.0,
            noise: None,
            levels: 3,
            grid: 8,
            expect: Expect::NoWitness,
        });
    }
    SuiteConfig { cases }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> MultiplicativeSpec {
        MultiplicativeSpec::power(2.0, 1)
    }

    #[test]
    fn zero_amplitude_is_identity() {
        let base = Fcn::exact(1.0, -1.0, p2());
        let f = perturb(base.clone(), NoiseSpec::uniform(0.0, 3));
        for x in cube_grid(1, 10) {
            assert_eq!(f.eval(&x).unwrap(), base.eval(&x).unwrap());
        }
    }

    #[test]
    fn checkerboard_alternates_on_the_lattice() {
        let n = NoiseSpec::checkerboard(0.5, 0, 10);
        let vals: Vec<f64> = (0..=10).map(|i| n.eta(0, &[f64::from(i) / 10.0])).collect();
        for w in vals.windows(2) {
            assert_eq!(w[0], -w[1]);
            assert_eq!(w[0].abs(), 0.5);
        }
        let odd = NoiseSpec::checkerboard(0.5, 1, 10);
        assert_eq!(odd.eta(0, &[0.0]), -0.5);
    }

    #[test]
    fn noise_is_deterministic_and_bounded() {
        let n = NoiseSpec::uniform(1e-3, 42);
        let pts: Vec<KVec> = cube_grid(2, 12).collect();
        let a: Vec<f64> = pts.iter().map(|x| n.eta(0, x.coords())).collect();
        let b: Vec<f64> = pts.iter().map(|x| n.eta(0, x.coords())).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|v| v.abs() <= 1e-3));
        assert!(a.iter().any(|&v| v != a[0]));
        let other = NoiseSpec::uniform(1e-3, 43);
        assert_ne!(a[5], other.eta(0, pts[5].coords()));
        assert_ne!(n.eta(0, pts[5].coords()), n.eta(1, pts[5].coords()));
    }

    #[test]
    fn noise_json_shape() {
        let n = NoiseSpec::checkerboard(1e-3, 7, 16);
        let s = serde_json::to_string(&n).unwrap();
        assert_eq!(
            s,
            r#"{"amplitude":0.001,"seed":7,"kind":"checkerboard","resolution":16}"#
        );
        assert_eq!(serde_json::from_str::<NoiseSpec>(&s).unwrap(), n);
        let u: NoiseSpec =
            serde_json::from_str(r#"{"amplitude":0.5,"seed":1,"kind":"uniform"}"#).unwrap();
        assert_eq!(u, NoiseSpec::uniform(0.5, 1));
        assert!(NoiseSpec::uniform(-1.0, 0).validate().is_err());
    }

    #[test]
    fn minimax_on_exact_member() {
        let cube: Vec<_> = cube_grid(1, 16).collect();
        let f = Fcn::exact(2.0, 3.0, p2());
        let fit = minimax_fit(&f, &p2(), &cube).unwrap();
        assert!(fit.deviation <= 1e-9);
        let g = Fcn::exact(fit.a, fit.b, p2());
        for x in &cube {
            assert!((f.eval(x).unwrap() - g.eval(x).unwrap()).abs() <= 1e-8);
        }
    }

    #[test]
    fn minimax_on_zero() {
        let cube: Vec<_> = cube_grid(1, 16).collect();
        let fit = minimax_fit(&Fcn::exact(0.0, 0.0, p2()), &p2(), &cube).unwrap();
        assert_eq!((fit.a, fit.b, fit.deviation), (0.0, 0.0, 0.0));
    }

    #[test]
    fn minimax_never_worse_than_start() {
        let cube: Vec<_> = cube_grid(1, 16).collect();
        let f = perturb(Fcn::exact(1.0, -0.5, p2()), NoiseSpec::uniform(1e-2, 8));
        let (a, b) =
            feim::construct_ab(&f, &p2(), &KVec::new([0.5]).unwrap(), DEFAULT_TAU).unwrap();
        let start_dev = cube
            .iter()
            .map(|x| (f.eval(x).unwrap() - Fcn::exact(a, b, p2()).eval(x).unwrap()).abs())
            .fold(0.0, f64::max);
        let fit = minimax_fit_from(&f, &p2(), &cube, (a, b)).unwrap();
        assert!(fit.deviation <= start_dev + 1e-12);
        // equioscillation should bring the fit near the noise level
        assert!(fit.deviation <= 1e-2 + 1e-9, "{fit:?}");
    }

    #[test]
    fn minimax_matches_brute_force_scan() {
        // Oracle: exhaustive scan of a fine (a, b) window around the optimum.
        let cube: Vec<_> = cube_grid(1, 8).collect();
        for seed in 0..4 {
            let f = perturb(
                Fcn::exact(0.3, 0.6, p2()),
                NoiseSpec::checkerboard(0.05, seed, 8),
            );
            let fit = minimax_fit(&f, &p2(), &cube).unwrap();
            let vals: Vec<(f64, f64, f64)> = cube
                .iter()
                .map(|x| {
                    (
                        f.eval(x).unwrap(),
                        p2().eval(x),
                        p2().eval(&x.complement()) - 1.0,
                    )
                })
                .collect();
            let obj = |a: f64, b: f64| {
                vals.iter()
                    .map(|&(y, u, v)| (y - a * u - b * v).abs())
                    .fold(0.0, f64::max)
            };
            let mut brute = f64::INFINITY;
            for i in -200..=200 {
                for j in -200..=200 {
                    brute = brute.min(obj(0.3 + f64::from(i) * 1e-3, 0.6 + f64::from(j) * 1e-3));
                }
            }
            assert!(
                fit.deviation <= brute + MINIMAX_STEP,
                "seed {seed}: {} vs {brute}",
                fit.deviation
            );
        }
    }

    #[test]
    fn empty_suite_is_empty_report() {
        let r = run_suite(&SuiteConfig::default()).unwrap();
        assert_eq!((r.passed, r.failed, r.results.len()), (0, 0, 0));
    }

    #[test]
    fn projection_cases_count_as_expected_failures() {
        let cfg = SuiteConfig {
            cases: projection_specs()
                .into_iter()
                .enumerate()
                .map(|(i, m)| CaseSpec::Certify {
                    id: format!("p{i}"),
                    m,
                    a: 1.0,
                    b: 0.0,
                    noise: None,
                    grid: 8,
                    expect: Expect::NoWitness,
                })
                .collect(),
        };
        let r = run_suite(&cfg).unwrap();
        assert_eq!(r.passed, 3);
        assert!(r.results.iter().all(|c| c.outcome == "no_witness"));
    }

    #[test]
    fn random_cases_are_reproducible_and_non_additive() {
        let a = random_certify_cases(5, 20);
        assert_eq!(a, random_certify_cases(5, 20));
        for c in &a {
            let CaseSpec::Certify { m, noise, .. } = c else {
                panic!()
            };
            assert_eq!(m.classify(), Class::NonAdditive);
            let d = noise.unwrap().amplitude;
            assert!((1e-4..=1e-2).contains(&d));
        }
    }

    #[test]
    fn invalid_case_is_config_error() {
        let cfg = SuiteConfig {
            cases: vec![CaseSpec::Residual {
                id: "x".into(),
                m: p2(),
                a: 0.0,
                b: 0.0,
                grid: 1,
            }],
        };
        assert!(matches!(run_suite(&cfg), Err(Error::Config(_))));
    }
}
