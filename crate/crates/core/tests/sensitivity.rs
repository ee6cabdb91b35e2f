use amc_core::classify::{enumerate_superclasses, SuperClass};
use amc_core::constellation::ModulationType::{self, *};
use amc_core::sensitivity::{error_indicator_2d, error_region_1d, fsc_perturbed, p_correct_1d, PerturbedFeature, SensitivityProblem};
use proptest::prelude::*;

fn m2() -> Vec<SuperClass> {
    enumerate_superclasses(&[Bpsk, Qpsk, Pam4], 2).unwrap()
}

fn m3() -> Vec<SuperClass> {
    enumerate_superclasses(&ModulationType::ALL, 3).unwrap()
}

#[test]
fn feature_examples() {
    let sc1 = &m2()[0];
    assert_eq!(sc1.label(), "BPSK+QPSK");
    assert!((fsc_perturbed(sc1, &[0.0]).unwrap() + 3.0).abs() < 1e-12);
    assert!((fsc_perturbed(sc1, &[-1.0]).unwrap() + 8.0).abs() < 1e-12);
    assert!((fsc_perturbed(sc1, &[1e6]).unwrap() + 4.0).abs() < 1e-5);
    for sc in m2().iter().chain(m3().iter()) {
        let z = vec![0.0; sc.size() - 1];
        assert!((fsc_perturbed(sc, &z).unwrap() - sc.theoretical_feature).abs() < 1e-12);
    }
    let sc4 = m3().into_iter().find(|s| s.members == [Bpsk, Qpsk, Qam16]).unwrap();
    assert!((fsc_perturbed(&sc4, &[0.0, 0.0]).unwrap() + 3.68).abs() < 1e-12);
}

/// Verdicts at 10⁵ grid points across [−4, 4] agree with the root-found
/// region everywhere except within one grid step of an endpoint.
#[test]
fn error_region_1d_matches_brute_force() {
    let all = m2();
    let n = 100_000;
    let step = 8.0 / (n - 1) as f64;
    for (i, sc) in all.iter().enumerate() {
        let problem = SensitivityProblem::new(&all, i).unwrap();
        let region = error_region_1d(sc, &all).unwrap();
        let ends: Vec<f64> = region
            .intervals
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .filter(|x| x.is_finite())
            .collect();
        for &e in &ends {
            let f = fsc_perturbed(sc, &[e]).unwrap();
            assert!(
                problem.thresholds().iter().any(|t| (f - t).abs() <= 1e-9),
                "{}: f({e}) = {f}",
                sc.label()
            );
        }
        for k in 0..n {
            let d = -4.0 + k as f64 * step;
            let wrong = !problem.is_correct(&[d]);
            if wrong != region.contains(d) {
                assert!(ends.iter().any(|e| (e - d).abs() <= step), "{} disagrees at {d}", sc.label());
            }
        }
        assert!(!region.contains(0.0));
    }
}

#[test]
fn p_correct_1d_is_monotone_and_continuous() {
    let all = m2();
    let grid: Vec<f64> = (1..=400).map(|k| 0.005 * k as f64).collect();
    for sc in &all {
        let p: Vec<f64> = grid.iter().map(|&s| p_correct_1d(sc, &all, s).unwrap()).collect();
        assert!(p_correct_1d(sc, &all, 1e-6).unwrap() > 1.0 - 1e-12);
        for w in p.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{}: {w:?}", sc.label());
            assert!(w[0] - w[1] < 0.02, "{}: jump {w:?}", sc.label());
        }
        assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

/// Root-found δ1 regions along fixed δ2 agree with the indicator on a
/// 200×200 grid, away from boundaries.
#[test]
fn error_region_2d_matches_grid() {
    let all = m3();
    let n = 200;
    let step = 6.0 / (n - 1) as f64;
    for (i, sc) in all.iter().enumerate() {
        let problem = SensitivityProblem::new(&all, i).unwrap();
        assert!(error_indicator_2d(sc, &all, 0.0, 0.0).unwrap());
        let mut flips = 0;
        for b in 0..n {
            let d2 = -3.0 + b as f64 * step;
            let region = problem.error_region_along(&[0.0, d2], 0);
            let ends: Vec<f64> = region
                .intervals
                .iter()
                .flat_map(|&(a, b)| [a, b])
                .filter(|x| x.is_finite())
                .collect();
            for a in 0..n {
                let d1 = -3.0 + a as f64 * step;
                let wrong = !error_indicator_2d(sc, &all, d1, d2).unwrap();
                flips += wrong as usize;
                if wrong != region.contains(d1) {
                    assert!(ends.iter().any(|e| (e - d1).abs() <= step), "{} at ({d1}, {d2})", sc.label());
                }
            }
        }
        // every class has an error region inside the window
        assert!(flips > 0, "{}", sc.label());
    }
}

#[test]
fn analytic_matches_monte_carlo_within_three_se() {
    for (all, sigmas) in [(m2(), vec![0.05, 0.2, 0.5]), (m3(), vec![0.07, 0.2, 0.5])] {
        for i in 0..all.len() {
            let problem = SensitivityProblem::new(&all, i).unwrap();
            for &s in &sigmas {
                let p = problem.p_correct(s).unwrap();
                let (mc, se) = problem.p_correct_monte_carlo(s, 100_000, 17).unwrap();
                // 1e-3 slack for the 2-D quadrature target
                assert!((p - mc).abs() <= 3.0 * se + 1e-3, "{} σ={s}: {p} vs {mc} ± {se}", all[i].label());
            }
        }
    }
}

#[test]
fn p_correct_2d_limits_and_continuity() {
    let all = m3();
    for i in 0..all.len() {
        let problem = SensitivityProblem::new(&all, i).unwrap();
        assert!(problem.p_correct(1e-4).unwrap() > 1.0 - 1e-9);
        let mut prev = None;
        for k in 1..=100 {
            let p = problem.p_correct(0.005 * k as f64).unwrap();
            assert!((0.0..=1.0).contains(&p));
            if let Some(q) = prev {
                let q: f64 = q;
                assert!((p - q).abs() < 0.05, "{}: {q} -> {p}", all[i].label());
            }
            prev = Some(p);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Swapping two members along with their δ values leaves f unchanged.
    #[test]
    fn exchange_symmetry(perm in Just(()).prop_perturb(|_, mut rng| {
            let mut idx = [0usize, 1, 2, 3];
            for i in (1..4).rev() {
                let j = (rng.next_u32() as usize) % (i + 1);
                idx.swap(i, j);
            }
            idx
        }),
        d in prop::array::uniform3(-3.0..3.0f64),
        d0 in -0.9..3.0f64) {
        let members: Vec<ModulationType> = perm.iter().map(|&i| ModulationType::ALL[i]).collect();
        // express everything relative to a common absolute amplitude
        let amps = [1.0 + d0, 1.0 + d[0], 1.0 + d[1], 1.0 + d[2]];
        let base = PerturbedFeature::new(members.clone()).unwrap();
        let f = base.eval(&[amps[1] / amps[0] - 1.0, amps[2] / amps[0] - 1.0, amps[3] / amps[0] - 1.0]);
        let swapped: Vec<ModulationType> = vec![members[2], members[1], members[0], members[3]];
        let g = PerturbedFeature::new(swapped)
            .unwrap()
            .eval(&[amps[1] / amps[2] - 1.0, amps[0] / amps[2] - 1.0, amps[3] / amps[2] - 1.0]);
        prop_assume!(amps.iter().all(|a| a.abs() > 1e-3));
        prop_assert!((f - g).abs() <= 1e-9 * f.abs().max(1.0), "{f} vs {g}");
    }
}
