use proptest::prelude::*;

use feistab::domain::{compositions, cube_grid, dk_grid, simplex_grid, KVec, SimplexTuple};
use feistab::feim::{self, CertifyOptions, Fcn, QStar};
use feistab::harness::{perturb, NoiseSpec};
use feistab::measures::{self, JFamily, MeasureFamily};
use feistab::multiplicative::{Atom, MultiplicativeSpec, DEFAULT_TAU};
use feistab::scan::Exec;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn atom_strategy(with_zero: bool) -> BoxedStrategy<Atom> {
    let nonzero = prop_oneof![Just(Atom::One), (0.25f64..4.0).prop_map(Atom::power)];
    if with_zero {
        prop_oneof![1 => Just(Atom::Zero), 6 => nonzero].boxed()
    } else {
        nonzero.boxed()
    }
}

fn spec_strategy(with_zero: bool) -> impl Strategy<Value = MultiplicativeSpec> {
    prop::collection::vec(atom_strategy(with_zero), 1..=3)
        .prop_map(|a| MultiplicativeSpec::new(a).unwrap())
}

fn lattice_point(k: usize, m: u32) -> impl Strategy<Value = KVec> {
    prop::collection::vec(0..=m, k).prop_map(move |c| KVec::from_lattice(&c, m))
}

fn interior_point(k: usize) -> impl Strategy<Value = KVec> {
    prop::collection::vec(0.01f64..0.99, k).prop_map(|c| KVec::new(c).unwrap())
}

/// A lattice tuple of `Γ_n` with one random composition per coordinate.
fn simplex_tuple(n: usize, k: usize, m: u32) -> impl Strategy<Value = SimplexTuple> {
    let count = compositions(m, n).len();
    prop::collection::vec(0..count, k).prop_map(move |idx| {
        let comps = compositions(m, n);
        let parts = (0..n)
            .map(|i| KVec::new(idx.iter().map(|&c| f64::from(comps[c][i]) / f64::from(m))).unwrap())
            .collect();
        SimplexTuple::new(parts).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn simplex_grid_count_is_stars_and_bars(n in 2usize..=4, k in 1usize..=2, m in 1u32..=6) {
        let per_coord = binomial(u64::from(m) + n as u64 - 1, n as u64 - 1);
        prop_assert_eq!(simplex_grid(n, k, m).count() as u64, per_coord.pow(k as u32));
    }

    #[test]
    fn dk_grid_count_matches_closed_form(k in 1usize..=2, m in 2u32..=9) {
        // per coordinate: x code i < m; i = 0 admits j < m, i >= 1 admits j <= m - i
        let m64 = u64::from(m);
        let per_coord = m64 + m64 * (m64 + 1) / 2 - 1;
        prop_assert_eq!(dk_grid(k, m).count() as u64, per_coord.pow(k as u32));
        for p in dk_grid(k, m) {
            let s = p.x().add(p.y()).unwrap();
            prop_assert!(s.coords().iter().all(|&t| t <= 1.0));
            prop_assert!(p.x().coords().iter().all(|&t| t < 1.0));
            prop_assert!(p.y().coords().iter().all(|&t| t < 1.0));
        }
    }

    #[test]
    fn grids_are_reproducible(k in 1usize..=2, m in 2u32..=6) {
        prop_assert_eq!(dk_grid(k, m).collect::<Vec<_>>(), dk_grid(k, m).collect::<Vec<_>>());
        prop_assert_eq!(simplex_grid(3, k, m).collect::<Vec<_>>(), simplex_grid(3, k, m).collect::<Vec<_>>());
    }

    #[test]
    fn m_is_nonnegative_and_multiplicative(
        spec in spec_strategy(true),
        xs in prop::collection::vec(0.0f64..=1.0, 3),
        ys in prop::collection::vec(0.0f64..=1.0, 3),
    ) {
        let k = spec.dim();
        let x = KVec::new(xs[..k].iter().copied()).unwrap();
        let y = KVec::new(ys[..k].iter().copied()).unwrap();
        prop_assert!(spec.eval(&x) >= 0.0);
        let lhs = spec.eval(&x.mul(&y).unwrap());
        let rhs = spec.eval(&x) * spec.eval(&y);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
        prop_assert!(spec.eval(&x) <= spec.upper_bound() + 1e-12);
    }

    #[test]
    fn additivity_on_dk_iff_unit_sum(spec in spec_strategy(false)) {
        let k = spec.dim();
        let m = if k == 3 { 6 } else { 10 };
        let grid: Vec<_> = dk_grid(k, m).collect();
        let dk = spec.dk_additivity_defect(&grid).unwrap();
        let unit = cube_grid(k, m).map(|q| spec.additivity_defect(&q).abs()).fold(0.0, f64::max);
        prop_assert_eq!(dk <= 1e-10, unit <= 1e-10, "dk {} vs unit {}", dk, unit);
    }

    #[test]
    fn recursion_reproduces_j_n(
        alpha in 0.25f64..4.0,
        c in -2.0f64..2.0,
        d in -2.0f64..2.0,
        tuple in (2usize..=6, 1usize..=2).prop_flat_map(|(n, k)| simplex_tuple(n, k, 7)),
    ) {
        let m = MultiplicativeSpec::power(alpha, tuple.dim());
        let j = JFamily::new(c, d, m.clone());
        let rec = MeasureFamily::Recursive { i2: j.i2_fcn(), m: m.clone() };
        let closed = j.eval(tuple.parts());
        prop_assert!((rec.eval(&tuple).unwrap() - closed).abs() <= 1e-10);
    }

    #[test]
    fn d_term_depends_on_first_part_only(
        alpha in 0.25f64..4.0,
        d in -2.0f64..2.0,
        tuple in (3usize..=6).prop_flat_map(|n| simplex_tuple(n, 1, 9)),
    ) {
        let m = MultiplicativeSpec::power(alpha, 1);
        let rec = MeasureFamily::Recursive { i2: JFamily::new(0.0, d, m.clone()).i2_fcn(), m: m.clone() };
        let p1 = &tuple.parts()[0];
        prop_assert!((rec.eval(&tuple).unwrap() - d * (m.eval(p1) - 1.0)).abs() <= 1e-10);
    }

    #[test]
    fn k_bound_is_dominated_by_uniform_bound(
        spec in spec_strategy(false),
        eps in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let k = spec.dim();
        let Ok(w) = spec.find_witness(8, DEFAULT_TAU) else { return Ok(()) };
        let x = KVec::new((0..k).map(|i| ((seed >> (8 * i)) & 0xff) as f64 / 255.0)).unwrap();
        let kb = feim::k_bound(&spec, &w.qstar, eps, &x, DEFAULT_TAU).unwrap();
        let ub = feim::uniform_bound(&spec, &w.qstar, eps, DEFAULT_TAU).unwrap();
        prop_assert!(kb >= 0.0 && kb <= ub + 1e-12);
    }

    #[test]
    fn system_bound_is_monotone_in_eps(
        eps in prop::collection::vec(0.0f64..1e-2, 4),
        bump in 0usize..4,
        extra in 0.0f64..1e-2,
        tuple in simplex_tuple(5, 1, 8),
    ) {
        let m = MultiplicativeSpec::power(2.0, 1);
        let q = KVec::new([0.5]).unwrap();
        let base = measures::system_bound(5, &eps, &m, &q, &tuple, DEFAULT_TAU).unwrap();
        let mut more = eps.clone();
        more[bump] += extra;
        let bumped = measures::system_bound(5, &more, &m, &q, &tuple, DEFAULT_TAU).unwrap();
        prop_assert!(bumped >= base);
    }

    #[test]
    fn exact_solutions_satisfy_the_equation(
        spec in spec_strategy(true),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let k = spec.dim();
        let grid: Vec<_> = dk_grid(k, if k == 3 { 4 } else { 8 }).collect();
        let f = Fcn::exact(a, b, spec.clone());
        prop_assert!(feim::sup_residual(&f, &spec, &grid).unwrap().value <= 1e-10);
    }

    #[test]
    fn perturbed_certificates_hold(
        alpha in prop_oneof![Just(0.5), Just(2.0), Just(3.0)],
        k in 1usize..=2,
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        delta in 1e-4f64..1e-1,
        seed in any::<u64>(),
        checker in any::<bool>(),
    ) {
        let spec = MultiplicativeSpec::power(alpha, k);
        let noise = if checker { NoiseSpec::checkerboard(delta, seed, 8) } else { NoiseSpec::uniform(delta, seed) };
        let f = perturb(Fcn::exact(a, b, spec.clone()), noise);
        let dgrid: Vec<_> = dk_grid(k, 8).collect();
        let cube: Vec<_> = cube_grid(k, 8).collect();
        let cert = feim::certify(&f, &spec, &dgrid, &cube, &QStar::Auto { resolution: 8 }, &CertifyOptions::default()).unwrap();
        prop_assert!(cert.verdict.is_pass(), "{:?}", cert);
        prop_assert!(cert.eps_measured <= 4.0 * delta * (1.0 + spec.upper_bound()) + 1e-12);
    }

    #[test]
    fn noise_is_bounded_and_deterministic(
        amplitude in 0.0f64..1.0,
        seed in any::<u64>(),
        stream in 0u64..8,
        x in lattice_point(2, 12),
    ) {
        let n = NoiseSpec::uniform(amplitude, seed);
        let e = n.eta(stream, x.coords());
        prop_assert!(e.abs() <= amplitude);
        prop_assert_eq!(e, n.eta(stream, x.coords()));
        let rerouted: Vec<f64> = x.coords().iter().map(|&t| (t * 3.0) / 3.0).collect();
        prop_assert_eq!(e, n.eta(stream, &rerouted));
    }

    #[test]
    fn serial_and_parallel_scans_agree(
        spec in spec_strategy(false),
        delta in 0.0f64..1e-2,
        seed in any::<u64>(),
        q in interior_point(1),
    ) {
        let k = spec.dim();
        let grid: Vec<_> = dk_grid(k, if k == 3 { 4 } else { 8 }).collect();
        let f = perturb(Fcn::exact(1.0, q.coords()[0], spec.clone()), NoiseSpec::uniform(delta, seed));
        let s = feim::sup_residual_with(Exec::Serial, &f, &spec, &grid).unwrap();
        let p = feim::sup_residual_with(Exec::Parallel, &f, &spec, &grid).unwrap();
        prop_assert_eq!(s, p);
    }
}
