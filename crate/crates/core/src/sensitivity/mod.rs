//! Sensitivity of the super-class classifier to unequal received powers.
//!
//! With amplitudes α_{k+1} = α_1·(1 + δ_k), the noiseless super-class feature
//! becomes
//!
//! ```text
//!            C42(x_1) + Σ_k |1 + δ_k|⁴ C42(x_{k+1})
//! f(δ) = ─────────────────────────────────────────────
//!          ((1 + Σ_k |1 + δ_k|²) / M)²
//! ```
//!
//! For Gaussian δ the probability of a correct decision is the Gaussian
//! measure of the set where f stays inside the true class's decision band
//! (the open interval between the midpoints to its neighbours). Band edges
//! are located by scanning for sign changes and bisecting; the measure is
//! then exact per interval in one dimension, and a composite Simpson rule
//! over δ2 of that exact inner measure in two dimensions.

mod reference;

pub use reference::{spot_check, BranchCheck, ReferenceBoundary, SpotCheck, SpotSample, REFERENCE_BOUNDARIES};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::classify::{decision_interval, enumerate_superclasses, nearest_feature, SuperClass};
use crate::constellation::{theoretical_c42, ModulationType};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, substream, StreamRole};

/// f(δ) for an ordered member list; the first member is the amplitude anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedFeature {
    members: Vec<ModulationType>,
    c42: Vec<f64>,
}

impl PerturbedFeature {
    /// Members in the given order; `members[k + 1]` carries `deltas[k]`.
    pub fn new(members: Vec<ModulationType>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::invalid("a perturbed feature needs at least two members"));
        }
        let c42 = members.iter().map(|&m| theoretical_c42(m)).collect();
        Ok(PerturbedFeature { members, c42 })
    }

    /// Anchored on the member that comes first in registry order.
    pub fn anchored(sc: &SuperClass) -> Result<Self> {
        let mut members = sc.members.clone();
        members.sort();
        Self::new(members)
    }

    pub fn members(&self) -> &[ModulationType] {
        &self.members
    }

    pub fn n_deltas(&self) -> usize {
        self.members.len() - 1
    }

    /// Feature value at perturbation `deltas` (length M − 1).
    #[inline]
    pub fn eval(&self, deltas: &[f64]) -> f64 {
        debug_assert_eq!(deltas.len(), self.n_deltas());
        let mut num = self.c42[0];
        let mut pow = 1.0;
        for (&d, &c) in deltas.iter().zip(&self.c42[1..]) {
            let w = (1.0 + d) * (1.0 + d);
            num += w * w * c;
            pow += w;
        }
        let m = self.members.len() as f64;
        let p = pow / m;
        num / (p * p)
    }

    /// lim f as the perturbation on `slot` grows without bound.
    pub fn asymptote(&self, slot: usize) -> f64 {
        let m = self.members.len() as f64;
        m * m * self.c42[slot + 1]
    }
}

/// Evaluate the anchored perturbed feature of `sc`.
pub fn fsc_perturbed(sc: &SuperClass, deltas: &[f64]) -> Result<f64> {
    let pf = PerturbedFeature::anchored(sc)?;
    if deltas.len() != pf.n_deltas() {
        return Err(Error::invalid(format!("expected {} deltas, got {}", pf.n_deltas(), deltas.len())));
    }
    Ok(pf.eval(deltas))
}

/// Numerical settings for boundary search and integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityConfig {
    /// Initial half-width of the δ scan window.
    pub window: f64,
    /// Largest half-width the window may be widened to.
    pub max_window: f64,
    /// Scan grid step.
    pub scan_step: f64,
    /// Required |f(root) − threshold|.
    pub root_tolerance: f64,
    /// Two successive 2-D estimates must agree this closely.
    pub integration_tolerance: f64,
    /// Outer integration range in units of σ_δ.
    pub outer_span_sigmas: f64,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        SensitivityConfig {
            window: 4.0,
            max_window: 4096.0,
            scan_step: 1e-3,
            root_tolerance: 1e-10,
            integration_tolerance: 5e-4,
            outer_span_sigmas: 8.0,
        }
    }
}

/// Sorted, disjoint intervals of δ where the verdict is wrong. Endpoints may
/// be infinite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRegion1D {
    pub intervals: Vec<(f64, f64)>,
}

impl ErrorRegion1D {
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// Mass of N(0, σ²) on the region.
    pub fn gaussian_measure(&self, sigma: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| (normal_cdf(b / sigma) - normal_cdf(a / sigma)).max(0.0))
            .sum::<f64>()
            .min(1.0)
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
    }
}

/// One super class under test against the full set of alternatives.
#[derive(Debug, Clone)]
pub struct SensitivityProblem {
    superclasses: Vec<SuperClass>,
    features: Vec<f64>,
    target: usize,
    model: PerturbedFeature,
    lower: f64,
    upper: f64,
    config: SensitivityConfig,
}

impl SensitivityProblem {
    /// Anchored on the registry-first member of the target super class.
    pub fn new(superclasses: &[SuperClass], target: usize) -> Result<Self> {
        let sc = superclasses
            .get(target)
            .ok_or_else(|| Error::invalid(format!("super class index {target} out of range")))?;
        Self::with_model(superclasses, target, PerturbedFeature::anchored(sc)?)
    }

    /// Use an explicit member ordering (which member is anchored and which
    /// carries each δ). The ordering must be a permutation of the target's members.
    pub fn with_model(superclasses: &[SuperClass], target: usize, model: PerturbedFeature) -> Result<Self> {
        if superclasses.len() < 2 {
            return Err(Error::invalid("need at least two super classes"));
        }
        let m = superclasses[0].size();
        if superclasses.iter().any(|s| s.size() != m) {
            return Err(Error::invalid("super classes must share the same size"));
        }
        let sc = superclasses
            .get(target)
            .ok_or_else(|| Error::invalid(format!("super class index {target} out of range")))?;
        let mut a = sc.members.clone();
        let mut b = model.members().to_vec();
        a.sort();
        b.sort();
        if a != b {
            return Err(Error::invalid("model members differ from the target super class"));
        }
        let features: Vec<f64> = superclasses.iter().map(|s| s.theoretical_feature).collect();
        let (lower, upper) = decision_interval(&features, target);
        Ok(SensitivityProblem {
            superclasses: superclasses.to_vec(),
            features,
            target,
            model,
            lower,
            upper,
            config: SensitivityConfig::default(),
        })
    }

    /// All super classes of size `m` drawn from `candidates`, target `target`.
    pub fn from_candidates(candidates: &[ModulationType], m: usize, target: usize) -> Result<Self> {
        Self::new(&enumerate_superclasses(candidates, m)?, target)
    }

    pub fn with_config(mut self, config: SensitivityConfig) -> Self {
        self.config = config;
        self
    }

    pub fn config(&self) -> &SensitivityConfig {
        &self.config
    }

    pub fn model(&self) -> &PerturbedFeature {
        &self.model
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn superclasses(&self) -> &[SuperClass] {
        &self.superclasses
    }

    /// Finite decision thresholds that bound the target class.
    pub fn thresholds(&self) -> Vec<f64> {
        [self.lower, self.upper].into_iter().filter(|t| t.is_finite()).collect()
    }

    pub fn decision_band(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// Oracle: apply the nearest-feature rule to f(δ).
    pub fn is_correct(&self, deltas: &[f64]) -> bool {
        nearest_feature(&self.features, self.model.eval(deltas)).decided == self.target
    }

    #[inline]
    fn in_band(&self, f: f64) -> bool {
        self.lower < f && f < self.upper
    }

    /// Error set along the `slot`-th δ with the others fixed at `base`
    /// (the value of `base[slot]` is ignored).
    pub fn error_region_along(&self, base: &[f64], slot: usize) -> ErrorRegion1D {
        let mut deltas = base.to_vec();
        let f = |x: f64, d: &mut Vec<f64>| {
            d[slot] = x;
            self.model.eval(d)
        };

        let limit_ok = self.in_band(self.model.asymptote(slot));
        let mut w = self.config.window;
        while w < self.config.max_window && (self.in_band(f(w, &mut deltas)) != limit_ok || self.in_band(f(-w, &mut deltas)) != limit_ok) {
            w *= 2.0;
        }

        let steps = (2.0 * w / self.config.scan_step).ceil() as usize;
        let h = 2.0 * w / steps as f64;
        let grid: Vec<f64> = (0..=steps).map(|i| -w + i as f64 * h).collect();
        let values: Vec<f64> = grid.iter().map(|&x| f(x, &mut deltas)).collect();

        let mut roots = Vec::new();
        for t in self.thresholds() {
            for i in 0..steps {
                let (a, b) = (values[i] > t, values[i + 1] > t);
                if a != b {
                    roots.push(self.bisect(&mut deltas, slot, t, grid[i], grid[i + 1], a));
                }
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

        let mut edges = Vec::with_capacity(roots.len() + 2);
        edges.push(f64::NEG_INFINITY);
        edges.extend(roots.iter().copied());
        edges.push(f64::INFINITY);

        let mut intervals: Vec<(f64, f64)> = Vec::new();
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let probe = match (a.is_finite(), b.is_finite()) {
                (true, true) => 0.5 * (a + b),
                (false, true) => 0.5 * (-w + b),
                (true, false) => 0.5 * (a + w),
                (false, false) => 0.0,
            };
            if self.in_band(f(probe, &mut deltas)) {
                continue;
            }
            match intervals.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => intervals.push((a, b)),
            }
        }
        ErrorRegion1D { intervals }
    }

    fn bisect(&self, deltas: &mut [f64], slot: usize, t: f64, mut lo: f64, mut hi: f64, lo_above: bool) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            deltas[slot] = mid;
            let v = self.model.eval(deltas);
            if (v - t).abs() <= self.config.root_tolerance * 1e-2 || hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
                return mid;
            }
            if (v > t) == lo_above {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Error region in δ1 for M = 2.
    pub fn error_region_1d(&self) -> Result<ErrorRegion1D> {
        if self.model.n_deltas() != 1 {
            return Err(Error::invalid("one-dimensional analysis needs super classes of size 2"));
        }
        Ok(self.error_region_along(&[0.0], 0))
    }

    /// 1 − N(0, σ²)-measure of the δ1 error region (M = 2).
    pub fn p_correct_1d(&self, sigma_delta: f64) -> Result<f64> {
        check_sigma(sigma_delta)?;
        Ok((1.0 - self.error_region_1d()?.gaussian_measure(sigma_delta)).clamp(0.0, 1.0))
    }

    /// P(correct) for δ1, δ2 i.i.d. N(0, σ²) (M = 3). The inner δ1 measure is
    /// exact; the outer δ2 integral uses composite Simpson panels doubled
    /// until two successive estimates agree within the configured tolerance.
    pub fn p_correct_2d(&self, sigma_delta: f64) -> Result<f64> {
        check_sigma(sigma_delta)?;
        if self.model.n_deltas() != 2 {
            return Err(Error::invalid("two-dimensional analysis needs super classes of size 3"));
        }
        let span = self.config.outer_span_sigmas;
        let inner = |t: f64| {
            let d2 = sigma_delta * t;
            let region = self.error_region_along(&[0.0, d2], 0);
            let density = (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
            density * (1.0 - region.gaussian_measure(sigma_delta))
        };

        let mut panels = 32usize;
        let mut values: Vec<f64> = (0..=panels).map(|i| inner(-span + 2.0 * span * i as f64 / panels as f64)).collect();
        let simpson = |v: &[f64], n: usize| {
            let h = 2.0 * span / n as f64;
            let mut s = v[0] + v[n];
            for (i, &x) in v.iter().enumerate().take(n).skip(1) {
                s += if i % 2 == 1 { 4.0 * x } else { 2.0 * x };
            }
            s * h / 3.0
        };
        let mut prev = simpson(&values, panels);
        loop {
            let next_panels = panels * 2;
            let mut refined = Vec::with_capacity(next_panels + 1);
            for (i, &v) in values[..panels].iter().enumerate() {
                refined.push(v);
                refined.push(inner(-span + 2.0 * span * (2 * i + 1) as f64 / next_panels as f64));
            }
            refined.push(values[panels]);
            let est = simpson(&refined, next_panels);
            panels = next_panels;
            values = refined;
            if (est - prev).abs() < self.config.integration_tolerance || panels >= 1 << 14 {
                return Ok(est.clamp(0.0, 1.0));
            }
            prev = est;
        }
    }

    /// Analytical P(correct) for whichever dimension the problem has.
    pub fn p_correct(&self, sigma_delta: f64) -> Result<f64> {
        match self.model.n_deltas() {
            1 => self.p_correct_1d(sigma_delta),
            2 => self.p_correct_2d(sigma_delta),
            n => Err(Error::invalid(format!("no analytical integral for {n} perturbations"))),
        }
    }

    /// Monte Carlo oracle: draws δ i.i.d. N(0, σ²) and applies the
    /// nearest-feature rule. Returns (p, standard error).
    pub fn p_correct_monte_carlo(&self, sigma_delta: f64, draws: usize, seed: u64) -> Result<(f64, f64)> {
        check_sigma(sigma_delta)?;
        if draws == 0 {
            return Err(Error::invalid("need at least one draw"));
        }
        let mut rng = substream(derive_seed(seed, &[self.target as u64]), StreamRole::Perturbation);
        let mut deltas = vec![0.0; self.model.n_deltas()];
        let mut hits = 0usize;
        for _ in 0..draws {
            for d in deltas.iter_mut() {
                *d = sigma_delta * rng.sample::<f64, _>(StandardNormal);
            }
            hits += self.is_correct(&deltas) as usize;
        }
        let p = hits as f64 / draws as f64;
        Ok((p, (p * (1.0 - p) / draws as f64).sqrt()))
    }

    /// Points (δ2, δ1) with f(δ1, δ2) = `threshold`, for each δ2 in `delta2` (M = 3).
    pub fn contour(&self, threshold: f64, delta2: &[f64]) -> Result<Vec<(f64, f64)>> {
        if self.model.n_deltas() != 2 {
            return Err(Error::invalid("contours need super classes of size 3"));
        }
        let mut out = Vec::new();
        for &d2 in delta2 {
            for r in self.roots_along(&[0.0, d2], 0, threshold) {
                out.push((d2, r));
            }
        }
        Ok(out)
    }

    /// All roots of f − `threshold` along `slot` inside the scan window.
    pub fn roots_along(&self, base: &[f64], slot: usize, threshold: f64) -> Vec<f64> {
        let mut deltas = base.to_vec();
        let w = self.config.window;
        let steps = (2.0 * w / self.config.scan_step).ceil() as usize;
        let h = 2.0 * w / steps as f64;
        let mut roots = Vec::new();
        deltas[slot] = -w;
        let mut prev = self.model.eval(&deltas) > threshold;
        for i in 1..=steps {
            let x = -w + i as f64 * h;
            deltas[slot] = x;
            let cur = self.model.eval(&deltas) > threshold;
            if cur != prev {
                roots.push(self.bisect(&mut deltas, slot, threshold, x - h, x, prev));
            }
            prev = cur;
        }
        roots
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("sigma_delta must be positive and finite, got {sigma}")))
    }
}

fn target_index(sc: &SuperClass, all: &[SuperClass]) -> Result<usize> {
    all.iter()
        .position(|s| s == sc)
        .ok_or_else(|| Error::invalid(format!("{} is not among the given super classes", sc.label())))
}

pub fn error_region_1d(sc: &SuperClass, all: &[SuperClass]) -> Result<ErrorRegion1D> {
    SensitivityProblem::new(all, target_index(sc, all)?)?.error_region_1d()
}

pub fn p_correct_1d(sc: &SuperClass, all: &[SuperClass], sigma_delta: f64) -> Result<f64> {
    SensitivityProblem::new(all, target_index(sc, all)?)?.p_correct_1d(sigma_delta)
}

/// `true` when (d1, d2) keeps `sc` correctly classified.
pub fn error_indicator_2d(sc: &SuperClass, all: &[SuperClass], d1: f64, d2: f64) -> Result<bool> {
    let p = SensitivityProblem::new(all, target_index(sc, all)?)?;
    if p.model.n_deltas() != 2 {
        return Err(Error::invalid("two-dimensional indicator needs super classes of size 3"));
    }
    Ok(p.is_correct(&[d1, d2]))
}

pub fn p_correct_2d(sc: &SuperClass, all: &[SuperClass], sigma_delta: f64) -> Result<f64> {
    SensitivityProblem::new(all, target_index(sc, all)?)?.p_correct_2d(sigma_delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ModulationType::*;

    fn three() -> Vec<SuperClass> {
        enumerate_superclasses(&[Bpsk, Qpsk, Pam4], 2).unwrap()
    }

    fn four() -> Vec<SuperClass> {
        enumerate_superclasses(&ModulationType::ALL, 3).unwrap()
    }

    #[test]
    fn zero_perturbation_is_nominal_feature() {
        for sc in three().iter().chain(four().iter()) {
            let zeros = vec![0.0; sc.size() - 1];
            assert!((fsc_perturbed(sc, &zeros).unwrap() - sc.theoretical_feature).abs() < 1e-12);
        }
    }

    #[test]
    fn bpsk_qpsk_perturbation_examples() {
        let sc = SuperClass::new(vec![Bpsk, Qpsk]).unwrap();
        assert!((fsc_perturbed(&sc, &[-1.0]).unwrap() + 8.0).abs() < 1e-12);
        assert!((fsc_perturbed(&sc, &[1e6]).unwrap() + 4.0).abs() < 1e-5);
        assert!(fsc_perturbed(&sc, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn exchange_symmetry() {
        let a = PerturbedFeature::new(vec![Bpsk, Qpsk, Qam16]).unwrap();
        let b = PerturbedFeature::new(vec![Bpsk, Qam16, Qpsk]).unwrap();
        for (d1, d2) in [(0.3, -0.7), (1.5, 2.0), (-2.2, 0.1)] {
            assert!((a.eval(&[d1, d2]) - b.eval(&[d2, d1])).abs() < 1e-12);
        }
    }

    #[test]
    fn nominal_point_is_correct() {
        let scs = three();
        for i in 0..scs.len() {
            let p = SensitivityProblem::new(&scs, i).unwrap();
            assert!(!p.error_region_1d().unwrap().contains(0.0));
        }
        let scs = four();
        for sc in &scs {
            assert!(error_indicator_2d(sc, &scs, 0.0, 0.0).unwrap());
        }
    }

    #[test]
    fn one_dimensional_roots_hit_thresholds() {
        let scs = three();
        for i in 0..scs.len() {
            let p = SensitivityProblem::new(&scs, i).unwrap();
            let region = p.error_region_1d().unwrap();
            for &(a, b) in &region.intervals {
                for x in [a, b].into_iter().filter(|x| x.is_finite()) {
                    let v = p.model().eval(&[x]);
                    let gap = p.thresholds().iter().map(|t| (v - t).abs()).fold(f64::INFINITY, f64::min);
                    assert!(gap <= 1e-10, "residual {gap} at {x}");
                }
            }
        }
    }

    #[test]
    fn measure_limits() {
        let scs = three();
        let p = SensitivityProblem::new(&scs, 0).unwrap();
        assert!((p.p_correct_1d(1e-4).unwrap() - 1.0).abs() < 1e-12);
        assert!(p.p_correct_1d(0.0).is_err());
        let r = ErrorRegion1D {
            intervals: vec![(f64::NEG_INFINITY, 0.0)],
        };
        assert!((r.gaussian_measure(2.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn superclass_with_recorded_feature() {
        let scs = four();
        let sc4 = scs.iter().find(|s| s.members == vec![Bpsk, Qpsk, Qam16]).unwrap();
        assert!((fsc_perturbed(sc4, &[0.0, 0.0]).unwrap() + 3.68).abs() < 1e-12);
    }

    #[test]
    fn with_model_rejects_foreign_members() {
        let scs = four();
        let model = PerturbedFeature::new(vec![Bpsk, Qpsk, Qam16]).unwrap();
        let idx = scs.iter().position(|s| s.members == vec![Bpsk, Qpsk, Pam4]).unwrap();
        assert!(SensitivityProblem::with_model(&scs, idx, model).is_err());
    }
}
