use amc_core::classify::{enumerate_superclasses, MumcClassifier};
use amc_core::constellation::{alphabet, theoretical_cumulants, ModulationType};
use amc_core::cumulants::{estimate_cumulants, estimate_fc, estimate_fsc, MomentSet, SampleStream};
use amc_core::synth::noise_only;
use num_complex::Complex64;
use proptest::prelude::*;

const CASES: u32 = 1000;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Mixtures of alphabet points and free-form jitter, so both structured and
/// unstructured streams show up.
fn stream() -> impl Strategy<Value = SampleStream> {
    (prop::collection::vec((0usize..4, 0usize..16, complex()), 16..256), 0.0..0.5f64).prop_map(|(picks, jitter)| {
        let samples = picks
            .into_iter()
            .map(|(m, i, z)| {
                let pts = alphabet(ModulationType::ALL[m]);
                pts.points()[i % pts.size()] + z * jitter
            })
            .collect();
        SampleStream::new(samples).unwrap()
    })
}

fn scale() -> impl Strategy<Value = Complex64> {
    (0.05..20.0f64, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, th)| Complex64::from_polar(r, th))
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn fc_is_scale_invariant(s in stream(), a in scale()) {
        let c = estimate_cumulants(&s);
        prop_assume!(c.c63.abs() > 1e-3 * c.c21.powi(3));
        let f = estimate_fc(&s).unwrap();
        let g = estimate_fc(&s.scaled(a)).unwrap();
        // error in c42 is relative to c21², so bound by that scale
        let ref_scale = f.max(c.c21 * c.c21 / c.c63.abs().powf(2.0 / 3.0));
        prop_assert!(close(f, g, ref_scale), "{f} vs {g}");
    }

    #[test]
    fn cumulant_scale_laws(s in stream(), a in scale()) {
        let c = estimate_cumulants(&s);
        let d = estimate_cumulants(&s.scaled(a));
        let r2 = a.norm_sqr();
        prop_assert!(close(d.c21, r2 * c.c21, r2 * c.c21));
        prop_assert!(close(d.c42, r2.powi(2) * c.c42, (r2 * c.c21).powi(2)));
        prop_assert!(close(d.c63, r2.powi(3) * c.c63, (r2 * c.c21).powi(3)));
    }

    #[test]
    fn phase_rotation_leaves_cumulants_unchanged(s in stream(), th in -std::f64::consts::PI..std::f64::consts::PI) {
        let c = estimate_cumulants(&s);
        let d = estimate_cumulants(&s.scaled(Complex64::from_polar(1.0, th)));
        prop_assert!(close(c.c21, d.c21, c.c21));
        prop_assert!(close(c.c42, d.c42, c.c21 * c.c21));
        prop_assert!(close(c.c63, d.c63, c.c21.powi(3)));
    }

    #[test]
    fn mumc_verdict_survives_common_scaling(s in stream(), a in scale(), m in 2usize..4, nv in 0.0..0.05f64) {
        let scs = enumerate_superclasses(&ModulationType::ALL, m).unwrap();
        let r2 = a.norm_sqr();
        let before = MumcClassifier::new(&scs, m, nv).unwrap().classify(&s);
        let after = MumcClassifier::new(&scs, m, nv * r2).unwrap().classify(&s.scaled(a));
        match (before, after) {
            (Ok(b), Ok(x)) => {
                prop_assert!(close(b.estimated_feature, x.estimated_feature, b.estimated_feature.abs().max(1.0)));
                // a feature sitting on a threshold could legitimately flip
                prop_assume!(b.margin > 1e-9);
                prop_assert_eq!(b.decided, x.decided);
            }
            (Err(_), Err(_)) => {}
            (b, x) => prop_assert!(false, "{b:?} vs {x:?}"),
        }
        if nv == 0.0 {
            let f = estimate_fsc(&s, m, 0.0).unwrap();
            let g = estimate_fsc(&s.scaled(a), m, 0.0).unwrap();
            prop_assert!(close(f, g, f.abs().max(1.0)));
        }
    }
}

fn sums(parts: &[(ModulationType, Complex64)]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for &(m, a) in parts {
        let pts = alphabet(m);
        out = out.iter().flat_map(|&s| pts.points().iter().map(move |&p| s + a * p)).collect();
    }
    out
}

fn check_superposition(parts: &[(ModulationType, Complex64)]) {
    let joint = MomentSet::from_samples(&sums(parts)).cumulants();
    let (mut c21, mut c42, mut c63) = (0.0, 0.0, 0.0);
    for &(m, a) in parts {
        let c = theoretical_cumulants(&alphabet(m));
        let r2 = a.norm_sqr();
        c21 += r2 * c.c21;
        c42 += r2 * r2 * c.c42;
        c63 += r2 * r2 * r2 * c.c63;
    }
    let tag: Vec<_> = parts.iter().map(|p| p.0.name()).collect();
    assert!((joint.c21 - c21).abs() < 1e-10, "{tag:?} c21 {} vs {c21}", joint.c21);
    assert!((joint.c42 - c42).abs() < 1e-10, "{tag:?} c42 {} vs {c42}", joint.c42);
    assert!((joint.c63 - c63).abs() < 1e-10, "{tag:?} c63 {} vs {c63}", joint.c63);
}

/// Exact joint expectation over every combination of alphabet points.
#[test]
fn superposition_brute_force() {
    let gains = [
        Complex64::new(1.0, 0.0),
        Complex64::from_polar(0.7, 0.4),
        Complex64::from_polar(1.3, -2.1),
    ];
    let all = ModulationType::ALL;
    for i in 0..4 {
        for j in (i + 1)..4 {
            check_superposition(&[(all[i], gains[0]), (all[j], gains[0])]);
            check_superposition(&[(all[i], gains[1]), (all[j], gains[2])]);
            for k in (j + 1)..4 {
                check_superposition(&[(all[i], gains[0]), (all[j], gains[0]), (all[k], gains[0])]);
                check_superposition(&[(all[i], gains[2]), (all[j], gains[0]), (all[k], gains[1])]);
            }
        }
    }
    // same type twice is still two independent users
    check_superposition(&[(ModulationType::Qam16, gains[0]), (ModulationType::Qam16, gains[1])]);
}

#[test]
fn gaussian_noise_is_invisible_to_c42() {
    for seed in 0..5 {
        let s = noise_only(100_000, 1.0, seed).unwrap();
        let c = estimate_cumulants(&s);
        assert!(c.c42.abs() <= 0.05, "seed {seed}: {}", c.c42);
        assert!((c.c21 - 1.0).abs() < 0.02);
    }
}
