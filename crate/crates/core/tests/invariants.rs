use nalgebra::DMatrix;
use proptest::prelude::*;

use parity_anneal::closed_dynamics::{evolve_closed, fidelity, initial_ground_state};
use parity_anneal::experiments::{read_csv, write_csv, Cell, ResultTable};
use parity_anneal::hamiltonians::schedule_derivative;
use parity_anneal::open_dynamics::{
    bohr_decomposition, gamma, GammaMode, GkslModel, NoiseSpec, RedfieldModel, SpectralDensity,
};
use parity_anneal::spectrum::{diagonalize, snapshot_at};
use parity_anneal::spin_algebra::{commutator, magnetization_operator, parity_operator};
use parity_anneal::*;

fn problem_strategy() -> impl Strategy<Value = ProblemKind> {
    prop_oneof![
        Just(ProblemKind::IsingFc),
        (0.5f64..3.0).prop_map(|delta| ProblemKind::XxzFc { delta }),
    ]
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn random_rho(d: usize, entries: &[(f64, f64)]) -> DMatrix<C64> {
    let m = DMatrix::from_fn(d, d, |r, c| {
        let (a, b) = entries[(r * d + c) % entries.len()];
        C64::new(a + 0.01 * r as f64, b - 0.02 * c as f64)
    });
    let p = &m * m.adjoint();
    let tr = p.trace();
    p / tr
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn su2_closure_and_casimir(n in 1usize..=12) {
        let b = CollectiveBasis::new(n).unwrap();
        let mx = magnetization_operator(b, Axis::X);
        let my = magnetization_operator(b, Axis::Y);
        let mz = magnetization_operator(b, Axis::Z);
        // [M_x, M_y] = 2i M_z and cyclic
        for (a, c, e) in [(&mx, &my, &mz), (&my, &mz, &mx), (&mz, &mx, &my)] {
            let lhs = commutator(a, c).unwrap();
            let rhs = e.scaled_complex(C64::new(0.0, 2.0));
            prop_assert!(lhs.distance(&rhs) < 1e-10);
        }
        let cas = &(&(&mx * &mx) + &(&my * &my)) + &(&mz * &mz);
        let s = n as f64 / 2.0;
        prop_assert!(cas.distance(&Operator::identity(b).scaled(4.0 * s * (s + 1.0))) < 1e-9);
    }

    #[test]
    fn parity_commutes_with_every_schedule_point(
        n in 1usize..=8, alpha in 0.0f64..200.0, s in 0.0f64..=1.0, problem in problem_strategy()
    ) {
        let b = CollectiveBasis::new(n).unwrap();
        let sched = AnnealSchedule::new(b, 1000.0, alpha, problem).unwrap();
        let h = sched.endpoints().at_fraction(s);
        let k = parity_operator(b);
        let c = commutator(&h, &k).unwrap();
        prop_assert!(c.norm_max() < 1e-9 * h.norm_max().max(1.0));
    }

    #[test]
    fn derivative_never_couples_sectors(
        n in 2usize..=7, alpha in 0.0f64..150.0, s in 0.0f64..=1.0, problem in problem_strategy()
    ) {
        let b = CollectiveBasis::new(n).unwrap();
        let sched = AnnealSchedule::new(b, 1000.0, alpha, problem).unwrap();
        let snap = snapshot_at(&sched, s, &parity_operator(b)).unwrap();
        let dh = schedule_derivative(&sched);
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                if snap.sectors[i] != snap.sectors[j] {
                    let el = snap.eigenvectors[i].amplitudes()
                        .dotc(&(dh.matrix() * snap.eigenvectors[j].amplitudes()));
                    prop_assert!(el.norm() < 1e-10, "{} {}: {}", i, j, el);
                }
            }
        }
    }

    #[test]
    fn snapshots_are_orthonormal_and_labelled(
        n in 1usize..=8, alpha in 0.0f64..150.0, s in 0.0f64..=1.0, problem in problem_strategy()
    ) {
        let b = CollectiveBasis::new(n).unwrap();
        let sched = AnnealSchedule::new(b, 1000.0, alpha, problem).unwrap();
        let k = parity_operator(b);
        let snap = diagonalize(&sched.endpoints().at_fraction(s), &k).unwrap();
        prop_assert!(snap.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let u = snap.unitary();
        let dev = max_abs(&(u.adjoint() * &u - DMatrix::identity(b.dim(), b.dim())));
        prop_assert!(dev < 1e-9);
        for (v, sector) in snap.eigenvectors.iter().zip(&snap.sectors) {
            let kv = v.amplitudes().dotc(&(k.matrix() * v.amplitudes()));
            prop_assert!((kv - sector.value()).norm() < 1e-6);
        }
    }

    #[test]
    fn bohr_components_complete_and_conjugate(
        n in 1usize..=6, alpha in 0.0f64..150.0, s in 0.0f64..=1.0, problem in problem_strategy()
    ) {
        let b = CollectiveBasis::new(n).unwrap();
        let sched = AnnealSchedule::new(b, 1000.0, alpha, problem).unwrap();
        let h = sched.endpoints().at_fraction(s);
        let a = magnetization_operator(b, Axis::Y);
        let dec = bohr_decomposition(&h, &a).unwrap();
        prop_assert!(max_abs(&(dec.sum() - a.matrix())) < 1e-12 * a.norm_max().max(1.0) * 10.0);
        for i in 0..dec.frequencies.len() {
            let j = dec.conjugate_index(i).expect("mirror frequency");
            prop_assert!(dec.components[j].distance(&dec.components[i].adjoint()) < 1e-12 * 10.0);
        }
        let mut sorted = dec.frequencies.clone();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), dec.frequencies.len());
    }

    #[test]
    fn kms_detailed_balance(omega in 0.01f64..60.0, t_env in 0.1f64..200.0) {
        let sd = SpectralDensity::with_defaults(t_env, GammaMode::Kms).unwrap();
        let ratio = gamma(-omega, &sd) / gamma(omega, &sd);
        let want = (-omega / t_env).exp();
        prop_assert!((ratio - want).abs() <= 1e-4 * want, "{} vs {}", ratio, want);
        prop_assert!(gamma(omega, &sd) >= 0.0 && gamma(-omega, &sd) >= 0.0);
    }

    #[test]
    fn kms_detailed_balance_in_the_tail(x in 0.01f64..50.0, t_env in 0.1f64..5.0) {
        let sd = SpectralDensity::with_defaults(t_env, GammaMode::Kms).unwrap();
        let omega = x * t_env;
        let ratio = gamma(-omega, &sd) / gamma(omega, &sd);
        prop_assert!((ratio / (-x).exp() - 1.0).abs() <= 1e-4, "{} at x = {}", ratio, x);
    }

    #[test]
    fn master_equation_generators_preserve_trace_and_hermiticity(
        n in 1usize..=6, s in 0.0f64..=1.0, t_env in 0.1f64..100.0,
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4..16)
    ) {
        let b = CollectiveBasis::new(n).unwrap();
        let sched = AnnealSchedule::new(b, 1000.0, 100.0, ProblemKind::IsingFc).unwrap();
        let h = sched.endpoints().at_fraction(s);
        let rho = random_rho(b.dim(), &entries);
        let sd = SpectralDensity::with_defaults(t_env, GammaMode::Kms).unwrap();
        let red = RedfieldModel::new(NoiseSpec::collective_y(b), sd).rhs(&h, &rho).unwrap();
        let gk = GkslModel::new(0.1, t_env).unwrap().rhs(&h, &rho);
        for d in [red, gk] {
            let scale = max_abs(&d).max(1.0);
            prop_assert!(d.trace().norm() < 1e-10 * scale);
            prop_assert!(max_abs(&(&d - d.adjoint())) < 1e-10 * scale);
        }
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(
        re in prop::collection::vec(-1.0f64..1.0, 6), im in prop::collection::vec(-1.0f64..1.0, 6)
    ) {
        let b = CollectiveBasis::new(2).unwrap();
        let v = |o: usize| nalgebra::DVector::from_fn(3, |i, _| C64::new(re[i + o], im[i + o]) + C64::new(0.1, 0.0));
        let a = PureState::normalized(b, v(0)).unwrap();
        let c = PureState::normalized(b, v(3)).unwrap();
        let f = fidelity(&a, &c).unwrap();
        prop_assert!((-1e-15..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - fidelity(&c, &a).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trips_any_finite_value(values in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..20)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let mut t = ResultTable::new(["s", "v"]);
        for (i, v) in values.iter().enumerate() {
            t.rows.push(vec![Cell::Num(i as f64), Cell::Num(*v)]);
        }
        write_csv(&t, &path).unwrap();
        let back = read_csv(&path).unwrap();
        for (row, v) in back.rows.iter().zip(&values) {
            prop_assert_eq!(row[1].as_f64().unwrap().to_bits(), v.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn closed_evolution_conserves_norm_and_parity(
        n in 1usize..=6, alpha in 0.0f64..120.0, t_anneal in 5.0f64..60.0, problem in problem_strategy()
    ) {
        let b = CollectiveBasis::new(n).unwrap();
        let sched = AnnealSchedule::new(b, t_anneal, alpha, problem).unwrap();
        let psi0 = initial_ground_state(&sched).unwrap();
        let tr = evolve_closed(&sched, &psi0, &IntegratorOptions::default(), 21).unwrap();
        prop_assert!(tr.max_norm_drift() < 1e-6);
        prop_assert!(tr.max_parity_drift() < 1e-6);
        if b.has_integer_spin() {
            prop_assert!(tr.parity.iter().all(|k| k.im.abs() < 1e-8));
        }
    }
}
