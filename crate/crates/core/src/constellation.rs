//! Candidate modulation alphabets and their exact theoretical cumulants.
//!
//! Every alphabet is normalized to zero mean and unit average power over
//! equiprobable symbols. Theoretical cumulants are exact averages over the
//! alphabet points; nothing here is sampled.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cumulants::MomentSet;
use crate::error::{Error, Result};

/// A registered candidate modulation.
///
/// Adding a variant only requires extending [`ModulationType::ALL`],
/// the name tables and [`alphabet`]; all theoretical values derive from
/// the alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModulationType {
    #[serde(rename = "BPSK")]
    Bpsk,
    #[serde(rename = "QPSK")]
    Qpsk,
    #[serde(rename = "PAM4", alias = "4-PAM")]
    Pam4,
    #[serde(rename = "QAM16", alias = "16-QAM")]
    Qam16,
}

impl ModulationType {
    /// Registry order. Super-class enumeration and tie-breaking follow it.
    pub const ALL: [ModulationType; 4] = [
        ModulationType::Bpsk,
        ModulationType::Qpsk,
        ModulationType::Pam4,
        ModulationType::Qam16,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModulationType::Bpsk => "BPSK",
            ModulationType::Qpsk => "QPSK",
            ModulationType::Pam4 => "PAM4",
            ModulationType::Qam16 => "QAM16",
        }
    }

    /// Position in [`ModulationType::ALL`].
    pub fn index(self) -> usize {
        ModulationType::ALL
            .iter()
            .position(|&m| m == self)
            .expect("every variant is registered")
    }
}

impl fmt::Display for ModulationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModulationType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_uppercase();
        match key.as_str() {
            "BPSK" => Ok(ModulationType::Bpsk),
            "QPSK" => Ok(ModulationType::Qpsk),
            "PAM4" | "4PAM" => Ok(ModulationType::Pam4),
            "QAM16" | "16QAM" => Ok(ModulationType::Qam16),
            _ => Err(Error::UnknownModulation(s.to_string())),
        }
    }
}

/// Parse a comma-separated candidate list such as `"BPSK,QPSK,4-PAM"`.
pub fn parse_candidates(list: &str) -> Result<Vec<ModulationType>> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect()
}

/// An equiprobable symbol alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    modulation: ModulationType,
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn modulation(&self) -> ModulationType {
        self.modulation
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Modulation order.
    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn mean(&self) -> Complex64 {
        self.points.iter().sum::<Complex64>() / self.points.len() as f64
    }

    pub fn mean_power(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Exact equiprobable moments of the alphabet.
    pub fn moments(&self) -> MomentSet {
        MomentSet::from_samples(&self.points)
    }
}

/// The unit-variance, zero-mean alphabet of `modulation`.
pub fn alphabet(modulation: ModulationType) -> Constellation {
    let points = match modulation {
        ModulationType::Bpsk => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        ModulationType::Qpsk => {
            let a = std::f64::consts::FRAC_1_SQRT_2;
            vec![
                Complex64::new(a, a),
                Complex64::new(-a, a),
                Complex64::new(-a, -a),
                Complex64::new(a, -a),
            ]
        }
        ModulationType::Pam4 => {
            let a = 1.0 / 5f64.sqrt();
            [-3.0, -1.0, 1.0, 3.0].iter().map(|&v| Complex64::new(v * a, 0.0)).collect()
        }
        ModulationType::Qam16 => {
            let a = 1.0 / 10f64.sqrt();
            let levels = [-3.0, -1.0, 1.0, 3.0];
            levels
                .iter()
                .flat_map(|&i| levels.iter().map(move |&q| Complex64::new(i * a, q * a)))
                .collect()
        }
    };
    Constellation { modulation, points }
}

/// The conjugate-balanced cumulant triple (C21, C42, C63).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantSet {
    pub c21: f64,
    pub c42: f64,
    pub c63: f64,
}

impl CumulantSet {
    /// |C42| / |C63|^(2/3); `None` when C63 is exactly zero.
    pub fn fc(&self) -> Option<f64> {
        if self.c63 == 0.0 {
            None
        } else {
            Some(self.c42.abs() / self.c63.abs().powf(2.0 / 3.0))
        }
    }
}

pub fn theoretical_cumulants(constellation: &Constellation) -> CumulantSet {
    constellation.moments().cumulants()
}

/// Theoretical sixth-order feature |C42| / |C63|^(2/3) of a noise-free alphabet.
pub fn theoretical_fc(modulation: ModulationType) -> Result<f64> {
    theoretical_cumulants(&alphabet(modulation))
        .fc()
        .ok_or_else(|| Error::UndefinedFeature(modulation.to_string()))
}

/// Theoretical C42 of a unit-variance alphabet.
pub fn theoretical_c42(modulation: ModulationType) -> f64 {
    theoretical_cumulants(&alphabet(modulation)).c42
}
