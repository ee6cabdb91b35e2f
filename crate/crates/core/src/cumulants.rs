//! Sample moment and cumulant estimators over complex baseband streams.
//!
//! All candidate alphabets are zero-mean, so the estimators plug sample
//! moments into the zero-mean cumulant expressions and never subtract the
//! sample mean. The theoretical tables are computed the same way, which
//! keeps the estimate unbiased in the mean term.

use num_complex::Complex64;

use crate::constellation::CumulantSet;
use crate::error::{Error, Result};

/// Default |ĉ63| floor, relative to ĉ21³.
pub const DEFAULT_C63_FLOOR_RATIO: f64 = 1e-6;

/// A non-empty run of finite received samples y(n).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream(Vec<Complex64>);

impl SampleStream {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyStream);
        }
        if let Some(index) = samples.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(SampleStream(samples))
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Multiply every sample by `factor`.
    pub fn scaled(&self, factor: Complex64) -> SampleStream {
        SampleStream(self.0.iter().map(|&z| z * factor).collect())
    }
}

impl AsRef<[Complex64]> for SampleStream {
    fn as_ref(&self) -> &[Complex64] {
        &self.0
    }
}

/// Sample moments entering the C21/C42/C63 expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    /// E[y²]
    pub m20: Complex64,
    /// E[|y|²]
    pub m21: f64,
    /// E[|y|⁴]
    pub m42: f64,
    /// E[y*·y³]; E[y*³·y] is its conjugate.
    pub m41: Complex64,
    /// E[|y|⁶]
    pub m63: f64,
}

impl MomentSet {
    /// Equiprobable average over `samples`. Panics on an empty slice; use
    /// [`sample_moments`] for checked input.
    pub fn from_samples(samples: &[Complex64]) -> MomentSet {
        let mut acc = MomentAccumulator::default();
        acc.extend(samples);
        acc.finish().expect("non-empty sample slice")
    }

    pub fn cumulants(&self) -> CumulantSet {
        let m20_sq = self.m20.norm_sqr();
        let m21 = self.m21;
        let c42 = self.m42 - m20_sq - 2.0 * m21 * m21;
        // -3·E[y*³y]·E[y²] - 3·E[y*y³]·E[y*²] collapses to a real part.
        let mixed = (self.m41 * self.m20.conj()).re;
        let c63 = self.m63 - 9.0 * self.m42 * m21 - 6.0 * mixed + 18.0 * m20_sq * m21 + 12.0 * m21 * m21 * m21;
        CumulantSet { c21: m21, c42, c63 }
    }
}

/// Running sums for [`MomentSet`]. Accumulators over disjoint chunks can be
/// merged; the result depends on merge order only through floating-point
/// rounding.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    s20: Complex64,
    s21: f64,
    s42: f64,
    s41: Complex64,
    s63: f64,
}

impl MomentAccumulator {
    #[inline]
    pub fn push(&mut self, y: Complex64) {
        let p = y.norm_sqr();
        let y2 = y * y;
        self.count += 1;
        self.s20 += y2;
        self.s21 += p;
        self.s42 += p * p;
        // y*·y³ = |y|²·y²
        self.s41 += y2 * p;
        self.s63 += p * p * p;
    }

    pub fn extend(&mut self, samples: &[Complex64]) {
        for &y in samples {
            self.push(y);
        }
    }

    pub fn merge(&mut self, other: &MomentAccumulator) {
        self.count += other.count;
        self.s20 += other.s20;
        self.s21 += other.s21;
        self.s42 += other.s42;
        self.s41 += other.s41;
        self.s63 += other.s63;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn finish(&self) -> Result<MomentSet> {
        if self.count == 0 {
            return Err(Error::EmptyStream);
        }
        let n = self.count as f64;
        Ok(MomentSet {
            m20: self.s20 / n,
            m21: self.s21 / n,
            m42: self.s42 / n,
            m41: self.s41 / n,
            m63: self.s63 / n,
        })
    }
}

pub fn sample_moments(stream: &SampleStream) -> MomentSet {
    MomentSet::from_samples(stream.samples())
}

pub fn estimate_cumulants(stream: &SampleStream) -> CumulantSet {
    sample_moments(stream).cumulants()
}

pub fn estimate_c21(stream: &SampleStream) -> f64 {
    estimate_cumulants(stream).c21
}

pub fn estimate_c42(stream: &SampleStream) -> f64 {
    estimate_cumulants(stream).c42
}

pub fn estimate_c63(stream: &SampleStream) -> f64 {
    estimate_cumulants(stream).c63
}

/// |ĉ42| / |ĉ63|^(2/3), rejecting |ĉ63| at or below `floor_ratio · ĉ21³`.
pub fn fc_from_cumulants(c: &CumulantSet, floor_ratio: f64) -> Result<f64> {
    let floor = floor_ratio * c.c21.powi(3);
    let c63_abs = c.c63.abs();
    if c63_abs <= floor || c63_abs.is_nan() {
        return Err(Error::DegenerateFeature { c63_abs, floor });
    }
    Ok(c.c42.abs() / c63_abs.powf(2.0 / 3.0))
}

/// ĉ42 / ((ĉ21 − σ²)/M)².
pub fn fsc_from_cumulants(c: &CumulantSet, transmitters: usize, noise_variance: f64) -> Result<f64> {
    if transmitters == 0 {
        return Err(Error::invalid("transmitter count must be at least 1"));
    }
    let power = c.c21 - noise_variance;
    if power <= 0.0 || power.is_nan() {
        return Err(Error::NonPositiveSignalPower {
            c21: c.c21,
            noise_variance,
        });
    }
    let per_user = power / transmitters as f64;
    Ok(c.c42 / (per_user * per_user))
}

/// Sixth-order feature with the default degeneracy floor.
pub fn estimate_fc(stream: &SampleStream) -> Result<f64> {
    fc_from_cumulants(&estimate_cumulants(stream), DEFAULT_C63_FLOOR_RATIO)
}

/// Super-class feature of an `transmitters`-user stream with known noise variance.
pub fn estimate_fsc(stream: &SampleStream, transmitters: usize, noise_variance: f64) -> Result<f64> {
    fsc_from_cumulants(&estimate_cumulants(stream), transmitters, noise_variance)
}
