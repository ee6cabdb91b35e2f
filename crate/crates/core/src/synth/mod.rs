//! Symbol-rate synthesis of the received multiuser waveform.
//!
//! y(n) = Σ_k α_k · [(1 − ε_k)·x_k(n) + ε_k·x_k(n − 1)] + g(n)
//!
//! where x_k are i.i.d. unit-variance symbols, ε_k is the timing offset of
//! transmitter k expressed as a causal two-tap channel, and g is
//! circularly-symmetric complex white Gaussian noise of total variance σ².

mod dump;

pub use dump::{read_stream, write_stream, StreamHeader};

use std::collections::HashSet;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constellation::{alphabet, ModulationType};
use crate::cumulants::SampleStream;
use crate::error::{Error, Result};
use crate::rng::{substream, StreamRole};

/// One co-channel transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmitterSpec {
    pub modulation: ModulationType,
    /// Received amplitude α; power is α² for unit-variance alphabets.
    pub amplitude: f64,
    /// Fractional timing offset ε in [0, 1).
    #[serde(default)]
    pub sync_error: f64,
}

impl TransmitterSpec {
    pub fn new(modulation: ModulationType, amplitude: f64) -> Self {
        TransmitterSpec {
            modulation,
            amplitude,
            sync_error: 0.0,
        }
    }

    pub fn with_sync_error(mut self, eps: f64) -> Self {
        self.sync_error = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(Error::invalid(format!(
                "{} amplitude must be finite and positive, got {}",
                self.modulation, self.amplitude
            )));
        }
        check_sync_error(self.sync_error)
    }
}

/// Full channel description for one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub transmitters: Vec<TransmitterSpec>,
    pub noise_variance: f64,
    pub n_symbols: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.transmitters.is_empty() {
            return Err(Error::invalid("scenario needs at least one transmitter"));
        }
        let mut seen = HashSet::new();
        for t in &self.transmitters {
            t.validate()?;
            if !seen.insert(t.modulation) {
                return Err(Error::invalid(format!("modulation {} used by two transmitters", t.modulation)));
            }
        }
        if !(self.noise_variance.is_finite() && self.noise_variance >= 0.0) {
            return Err(Error::invalid(format!(
                "noise variance must be finite and >= 0, got {}",
                self.noise_variance
            )));
        }
        if self.n_symbols == 0 {
            return Err(Error::invalid("n_symbols must be positive"));
        }
        Ok(())
    }

    /// Σ α_k², the noiseless received power.
    pub fn signal_power(&self) -> f64 {
        self.transmitters.iter().map(|t| t.amplitude * t.amplitude).sum()
    }
}

fn check_sync_error(eps: f64) -> Result<()> {
    if (0.0..1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::invalid(format!("sync error must lie in [0, 1), got {eps}")))
    }
}

/// `n` i.i.d. uniform draws from the alphabet of `modulation`.
pub fn generate_symbols<R: Rng + ?Sized>(modulation: ModulationType, n: usize, rng: &mut R) -> Vec<Complex64> {
    let c = alphabet(modulation);
    let pts = c.points();
    (0..n).map(|_| pts[rng.random_range(0..pts.len())]).collect()
}

/// Two-tap timing-offset channel: out(n) = (1 − ε)·x(n) + ε·x(n − 1), with
/// `preceding` standing in for x(−1).
pub fn apply_sync_error(symbols: &[Complex64], preceding: Complex64, eps: f64) -> Result<Vec<Complex64>> {
    check_sync_error(eps)?;
    if eps == 0.0 {
        return Ok(symbols.to_vec());
    }
    let mut prev = preceding;
    Ok(symbols
        .iter()
        .map(|&x| {
            let y = x * (1.0 - eps) + prev * eps;
            prev = x;
            y
        })
        .collect())
}

/// The noiseless contribution α·h∗x of transmitter `index`, drawn from its
/// own substream of `seed`. Always consumes n + 1 symbols so the draws do
/// not depend on ε.
pub fn transmitter_component(spec: &TransmitterSpec, index: usize, n: usize, seed: u64) -> Result<Vec<Complex64>> {
    spec.validate()?;
    let mut rng = substream(seed, StreamRole::Transmitter(index));
    let symbols = generate_symbols(spec.modulation, n + 1, &mut rng);
    let mut out = apply_sync_error(&symbols[1..], symbols[0], spec.sync_error)?;
    for y in &mut out {
        *y *= spec.amplitude;
    }
    Ok(out)
}

/// Complex white Gaussian noise of total variance `variance`.
pub fn noise_component(n: usize, variance: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = substream(seed, StreamRole::Noise);
    gaussian_samples(n, variance, &mut rng)
}

pub(crate) fn gaussian_samples<R: Rng + ?Sized>(n: usize, variance: f64, rng: &mut R) -> Vec<Complex64> {
    let s = (variance / 2.0).sqrt();
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(s * re, s * im)
        })
        .collect()
}

/// A pure-noise stream, for tests and calibration.
pub fn noise_only(n: usize, variance: f64, seed: u64) -> Result<SampleStream> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    SampleStream::new(noise_component(n, variance, seed))
}

pub fn synthesize(scenario: &Scenario) -> Result<SampleStream> {
    scenario.validate()?;
    let n = scenario.n_symbols;
    let mut out = if scenario.noise_variance > 0.0 {
        noise_component(n, scenario.noise_variance, scenario.seed)
    } else {
        vec![Complex64::new(0.0, 0.0); n]
    };
    for (k, spec) in scenario.transmitters.iter().enumerate() {
        let component = transmitter_component(spec, k, n, scenario.seed)?;
        for (y, c) in out.iter_mut().zip(component) {
            *y += c;
        }
    }
    SampleStream::new(out)
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Amplitudes for a desired user at `snr_db` over noise `noise_variance`,
/// plus `m − 1` interferers sharing the total interference power
/// α_d²·10^(−SIR/10) equally. The desired amplitude comes first.
/// An infinite SIR requires `m == 1`.
pub fn amplitudes_from_snr_sir(snr_db: f64, sir_db: f64, m: usize, noise_variance: f64) -> Result<Vec<f64>> {
    if !snr_db.is_finite() || sir_db.is_nan() || sir_db == f64::NEG_INFINITY {
        return Err(Error::invalid(format!(
            "SNR/SIR must be finite (SIR may be +inf), got {snr_db}/{sir_db}"
        )));
    }
    if !(noise_variance.is_finite() && noise_variance > 0.0) {
        return Err(Error::invalid("noise variance must be positive to set an SNR"));
    }
    if m == 0 {
        return Err(Error::invalid("need at least one transmitter"));
    }
    let desired = db_to_linear(snr_db) * noise_variance;
    if sir_db.is_infinite() {
        if m != 1 {
            return Err(Error::invalid("infinite SIR leaves no power for interferers; use m = 1"));
        }
        return Ok(vec![desired.sqrt()]);
    }
    if m < 2 {
        return Err(Error::invalid("a finite SIR needs at least one interferer"));
    }
    let per_interferer = desired * db_to_linear(-sir_db) / (m - 1) as f64;
    let mut amps = vec![desired.sqrt()];
    amps.extend(std::iter::repeat_n(per_interferer.sqrt(), m - 1));
    Ok(amps)
}

/// Equal amplitudes whose total power Σα² sits `snr_db` above the noise.
pub fn amplitudes_for_total_snr(snr_db: f64, m: usize, noise_variance: f64) -> Result<Vec<f64>> {
    if !snr_db.is_finite() {
        return Err(Error::invalid(format!("SNR must be finite, got {snr_db}")));
    }
    if !(noise_variance.is_finite() && noise_variance > 0.0) {
        return Err(Error::invalid("noise variance must be positive to set an SNR"));
    }
    if m == 0 {
        return Err(Error::invalid("need at least one transmitter"));
    }
    let each = db_to_linear(snr_db) * noise_variance / m as f64;
    Ok(vec![each.sqrt(); m])
}
