use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constellation::ModulationType;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// SUMC and baseline accuracy versus desired-user SNR (dB).
    SumcSnrSweep,
    /// MUMC accuracy versus total SNR (dB), equal powers.
    MumcSnrSweep,
    /// Two-user super classes with δ1 ~ N(0, σ²), versus σ².
    #[serde(rename = "sensitivity_1d")]
    Sensitivity1d,
    /// Three-user super classes with δ1, δ2 ~ N(0, σ²), versus σ².
    #[serde(rename = "sensitivity_2d")]
    Sensitivity2d,
    /// SUMC accuracy versus asynchronous interval ϑ.
    SumcSyncSweep,
    /// MUMC accuracy versus asynchronous interval ϑ.
    MumcSyncSweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SumcSnrSweep => "sumc_snr_sweep",
            ExperimentKind::MumcSnrSweep => "mumc_snr_sweep",
            ExperimentKind::Sensitivity1d => "sensitivity_1d",
            ExperimentKind::Sensitivity2d => "sensitivity_2d",
            ExperimentKind::SumcSyncSweep => "sumc_sync_sweep",
            ExperimentKind::MumcSyncSweep => "mumc_sync_sweep",
        }
    }

    pub fn axis_name(self) -> &'static str {
        match self {
            ExperimentKind::SumcSnrSweep | ExperimentKind::MumcSnrSweep => "snr_db",
            ExperimentKind::Sensitivity1d | ExperimentKind::Sensitivity2d => "sigma_delta_sq",
            ExperimentKind::SumcSyncSweep | ExperimentKind::MumcSyncSweep => "sync_interval",
        }
    }

    pub fn is_sumc(self) -> bool {
        matches!(self, ExperimentKind::SumcSnrSweep | ExperimentKind::SumcSyncSweep)
    }

    pub fn is_mumc(self) -> bool {
        matches!(self, ExperimentKind::MumcSnrSweep | ExperimentKind::MumcSyncSweep)
    }

    pub fn is_sensitivity(self) -> bool {
        matches!(self, ExperimentKind::Sensitivity1d | ExperimentKind::Sensitivity2d)
    }

    pub fn is_sync_sweep(self) -> bool {
        matches!(self, ExperimentKind::SumcSyncSweep | ExperimentKind::MumcSyncSweep)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_candidates() -> Vec<ModulationType> {
    ModulationType::ALL.to_vec()
}

fn default_noise_variance() -> f64 {
    1.0
}

/// A full-factorial Monte Carlo experiment: axis × classes × trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub name: String,
    pub kind: ExperimentKind,
    /// SNR in dB, ϑ, or σ_δ² depending on `kind`.
    pub axis: Vec<f64>,
    /// Symbols per trial; unused by the sensitivity kinds.
    #[serde(default)]
    pub n_symbols: usize,
    /// Trials per class per axis point.
    pub n_trials: usize,
    pub base_seed: u64,
    #[serde(default = "default_candidates")]
    pub candidates: Vec<ModulationType>,
    /// Number of simultaneous transmitters M. SUMC defaults to every
    /// candidate transmitting; MUMC defaults to 3, sensitivity to 2 or 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transmitters: Option<usize>,
    /// Fixed SNR (dB) for synchronization sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    /// SIR (dB) for SUMC kinds; absent means a single interference-free user.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sir_db: Option<f64>,
    #[serde(default = "default_noise_variance")]
    pub noise_variance: f64,
    /// Asynchronous interval ϑ applied in SNR sweeps; sync sweeps take it from the axis.
    #[serde(default)]
    pub sync_interval: f64,
}

impl Experiment {
    pub fn transmitter_count(&self) -> usize {
        match self.kind {
            ExperimentKind::SumcSnrSweep | ExperimentKind::SumcSyncSweep => match self.sir_db {
                None => 1,
                Some(_) => self.transmitters.unwrap_or(self.candidates.len()),
            },
            ExperimentKind::MumcSnrSweep | ExperimentKind::MumcSyncSweep => self.transmitters.unwrap_or(3),
            ExperimentKind::Sensitivity1d => self.transmitters.unwrap_or(2),
            ExperimentKind::Sensitivity2d => self.transmitters.unwrap_or(3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("experiment `{}`: {msg}", self.name)));
        if self.axis.is_empty() {
            return bad("axis is empty".into());
        }
        if self.axis.iter().any(|v| !v.is_finite()) {
            return bad("axis values must be finite".into());
        }
        let increasing = self.axis.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.axis.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return bad("axis must be strictly monotone".into());
        }
        if self.n_trials == 0 {
            return bad("n_trials must be at least 1".into());
        }
        if !self.kind.is_sensitivity() && self.n_symbols == 0 {
            return bad("n_symbols must be at least 1".into());
        }
        if self.candidates.len() < 2 {
            return bad("need at least two candidates".into());
        }
        for (i, m) in self.candidates.iter().enumerate() {
            if self.candidates[..i].contains(m) {
                return bad(format!("candidate {m} listed twice"));
            }
        }
        if !(self.noise_variance.is_finite() && self.noise_variance > 0.0) {
            return bad("noise_variance must be positive".into());
        }
        if !(0.0..1.0).contains(&self.sync_interval) {
            return bad("sync_interval must lie in [0, 1)".into());
        }
        let m = self.transmitter_count();
        let q = self.candidates.len();
        if m == 0 || m > q {
            return bad(format!("transmitters = {m} must lie in 1..={q}"));
        }
        match self.kind {
            ExperimentKind::SumcSnrSweep | ExperimentKind::SumcSyncSweep => {
                if let Some(sir) = self.sir_db {
                    if sir.is_nan() || sir == f64::NEG_INFINITY {
                        return bad("sir_db must be a number".into());
                    }
                    if sir.is_finite() && m < 2 {
                        return bad("a finite SIR needs at least two transmitters".into());
                    }
                }
            }
            ExperimentKind::MumcSnrSweep | ExperimentKind::MumcSyncSweep => {
                if m == q {
                    return bad("MUMC needs at least two super classes (transmitters < candidates)".into());
                }
            }
            ExperimentKind::Sensitivity1d | ExperimentKind::Sensitivity2d => {
                let want = if self.kind == ExperimentKind::Sensitivity1d { 2 } else { 3 };
                if m != want {
                    return bad(format!("{} needs transmitters = {want}", self.kind));
                }
                if m == q {
                    return bad("need at least two super classes".into());
                }
                if self.axis.iter().any(|&v| v <= 0.0) {
                    return bad("sigma_delta_sq values must be positive".into());
                }
            }
        }
        if self.kind.is_sync_sweep() {
            if self.snr_db.is_none_or(|s| !s.is_finite()) {
                return bad("sync sweeps need a finite snr_db".into());
            }
            if self.axis.iter().any(|v| !(0.0..1.0).contains(v)) {
                return bad("sync intervals must lie in [0, 1)".into());
            }
        }
        Ok(())
    }
}

/// Top-level layout of an experiment config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentFile {
    #[serde(rename = "experiment")]
    pub experiments: Vec<Experiment>,
}

pub fn parse_config(text: &str) -> Result<Vec<Experiment>> {
    let file: ExperimentFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if file.experiments.is_empty() {
        return Err(Error::Config("no [[experiment]] entries".into()));
    }
    for e in &file.experiments {
        e.validate()?;
    }
    Ok(file.experiments)
}

pub fn load_config(path: &Path) -> Result<Vec<Experiment>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Shipped experiment configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
        }
    }

    pub fn source(self) -> &'static str {
        match self {
            Preset::Fig2 => include_str!("../../presets/fig2.toml"),
            Preset::Fig3 => include_str!("../../presets/fig3.toml"),
            Preset::Fig4 => include_str!("../../presets/fig4.toml"),
            // boundary contours come from the same three-user setup
            Preset::Fig5 | Preset::Fig6 => include_str!("../../presets/fig6.toml"),
            Preset::Fig7 => include_str!("../../presets/fig7.toml"),
            Preset::Fig8 => include_str!("../../presets/fig8.toml"),
        }
    }

    pub fn experiments(self) -> Result<Vec<Experiment>> {
        parse_config(self.source())
    }

    pub fn is_sensitivity(self) -> bool {
        matches!(self, Preset::Fig4 | Preset::Fig5 | Preset::Fig6)
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown preset `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Experiment {
        Experiment {
            name: "t".into(),
            kind: ExperimentKind::MumcSnrSweep,
            axis: vec![0.0, 10.0],
            n_symbols: 100,
            n_trials: 10,
            base_seed: 1,
            candidates: default_candidates(),
            transmitters: None,
            snr_db: None,
            sir_db: None,
            noise_variance: 1.0,
            sync_interval: 0.0,
        }
    }

    #[test]
    fn presets_parse_and_validate() {
        for p in Preset::ALL {
            let exps = p.experiments().unwrap_or_else(|e| panic!("{}: {e}", p.name()));
            assert!(!exps.is_empty());
            assert_eq!(p.is_sensitivity(), exps[0].kind.is_sensitivity());
        }
        assert!("FIG3".parse::<Preset>().is_ok());
        assert!("fig9".parse::<Preset>().is_err());
    }

    #[test]
    fn rejects_bad_experiments() {
        assert!(base().validate().is_ok());
        let mut e = base();
        e.axis.clear();
        assert!(e.validate().is_err());
        let mut e = base();
        e.axis = vec![0.0, 5.0, 5.0];
        assert!(e.validate().is_err());
        let mut e = base();
        e.n_trials = 0;
        assert!(e.validate().is_err());
        let mut e = base();
        e.transmitters = Some(4);
        assert!(e.validate().is_err());
        let mut e = base();
        e.kind = ExperimentKind::MumcSyncSweep;
        e.axis = vec![0.0, 0.1];
        assert!(e.validate().is_err());
        e.snr_db = Some(20.0);
        assert!(e.validate().is_ok());
        let mut e = base();
        e.kind = ExperimentKind::Sensitivity1d;
        e.axis = vec![0.0, 0.1];
        assert!(e.validate().is_err());
    }

    #[test]
    fn config_round_trip() {
        let file = ExperimentFile { experiments: vec![base()] };
        let text = toml::to_string(&file).unwrap();
        assert_eq!(parse_config(&text).unwrap(), file.experiments);
        assert!(parse_config("").is_err());
    }
}
