//! Published closed-form threshold contours for the 3-of-4 super-class
//! problem, kept as verification targets for the numerical boundaries.
//!
//! Each contour has the shape
//!
//! ```text
//! δ1 = −1 ± k·( A·(1 + δ2 + δ2²/2) ± B·√P(δ2) )^½
//! ```
//!
//! with P a quartic. Setting f(δ1, δ2) = T and solving the quadratic in
//! (1 + δ1)² gives k² = T / ((M²·C42(x_δ1) − T)·A/2) exactly, so the
//! multiplier implied by the integer constants can be recomputed and
//! compared with the printed one.

use serde::Serialize;

use super::{PerturbedFeature, SensitivityConfig, SensitivityProblem};
use crate::classify::enumerate_superclasses;
use crate::constellation::{theoretical_c42, ModulationType};
use crate::error::Result;

use ModulationType::*;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceBoundary {
    pub label: &'static str,
    /// (anchor, member carrying δ1, member carrying δ2).
    pub members: [ModulationType; 3],
    pub threshold: f64,
    pub multiplier: f64,
    pub quadratic: f64,
    pub discriminant_scale: f64,
    /// Quartic coefficients, constant term first.
    pub discriminant: [f64; 5],
}

pub const REFERENCE_BOUNDARIES: [ReferenceBoundary; 6] = [
    ReferenceBoundary {
        label: "BPSK+QPSK+PAM4 @ -4.20",
        members: [Bpsk, Pam4, Qpsk],
        threshold: -4.20,
        multiplier: 0.01492,
        quadratic: 4690.0,
        discriminant_scale: 67.0,
        discriminant: [-795.0, 8460.0, -1590.0, -5820.0, -1455.0],
    },
    ReferenceBoundary {
        label: "QAM16+QPSK+PAM4 @ -3.36",
        members: [Qam16, Pam4, Qpsk],
        threshold: -3.36,
        multiplier: 0.0135,
        quadratic: 4144.0,
        discriminant_scale: 74.0,
        discriminant: [2100.0, 648.0, -10452.0, -10776.0, -2694.0],
    },
    ReferenceBoundary {
        label: "BPSK+QAM16+PAM4 @ -4.20",
        members: [Bpsk, Pam4, Qam16],
        threshold: -4.20,
        multiplier: 0.01492,
        quadratic: 4690.0,
        discriminant_scale: 67.0,
        discriminant: [813.0, 14892.0, 8058.0, 612.0, 153.0],
    },
    ReferenceBoundary {
        label: "BPSK+QAM16+PAM4 @ -3.86",
        members: [Bpsk, Pam4, Qam16],
        threshold: -3.86,
        multiplier: 0.00238,
        quadratic: 161734.0,
        discriminant_scale: 1257.0,
        discriminant: [-3650.0, 48008.0, 19516.0, -4488.0, -1122.0],
    },
    ReferenceBoundary {
        label: "BPSK+QPSK+QAM16 @ -3.36",
        members: [Bpsk, Qam16, Qpsk],
        threshold: -3.36,
        multiplier: 0.04347,
        quadratic: 1288.0,
        discriminant_scale: 23.0,
        discriminant: [537.0, 4524.0, 1074.0, -1188.0, -297.0],
    },
    ReferenceBoundary {
        label: "BPSK+QPSK+QAM16 @ -3.86",
        members: [Bpsk, Qam16, Qpsk],
        threshold: -3.86,
        multiplier: 0.00884,
        quadratic: 43618.0,
        discriminant_scale: 339.0,
        discriminant: [9298.0, 29896.0, 18596.0, 3648.0, 912.0],
    },
];

impl ReferenceBoundary {
    /// δ1(δ2) on the (outer, inner) sign branch, or `None` where it is not real.
    pub fn delta1(&self, multiplier: f64, delta2: f64, outer: f64, inner: f64) -> Option<f64> {
        let p = self.discriminant.iter().rev().fold(0.0, |acc, &c| acc * delta2 + c);
        if p < 0.0 {
            return None;
        }
        let q = self.quadratic * (1.0 + delta2 + 0.5 * delta2 * delta2) + inner * self.discriminant_scale * p.sqrt();
        if q < 0.0 {
            return None;
        }
        Some(-1.0 + outer * multiplier * q.sqrt())
    }

    /// The multiplier the integer constants and threshold imply.
    pub fn implied_multiplier(&self) -> f64 {
        let m2 = 9.0;
        let c = theoretical_c42(self.members[1]);
        (self.threshold / ((m2 * c - self.threshold) * self.quadratic / 2.0)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpotSample {
    pub delta2: f64,
    pub delta1_closed: f64,
    pub delta1_contour: Option<f64>,
    /// |closed − nearest contour root|; infinite if no root was found.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchCheck {
    pub outer_sign: f64,
    pub inner_sign: f64,
    pub samples: Vec<SpotSample>,
}

impl BranchCheck {
    pub fn max_deviation(&self) -> f64 {
        self.samples.iter().map(|s| s.deviation).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpotCheck {
    pub label: &'static str,
    pub multiplier: f64,
    pub branches: Vec<BranchCheck>,
}

impl SpotCheck {
    pub fn max_deviation(&self) -> f64 {
        self.branches.iter().map(BranchCheck::max_deviation).fold(0.0, f64::max)
    }

    pub fn n_samples(&self) -> usize {
        self.branches.iter().map(|b| b.samples.len()).sum()
    }
}

/// Compare `boundary` (evaluated with `multiplier`) against numerically
/// located contour roots at `per_branch` δ2 points of every real branch.
/// Sample points sit at evenly spaced interior quantiles of the δ2 values
/// in [−1.5, 1.5] where the branch is real.
pub fn spot_check(boundary: &ReferenceBoundary, multiplier: f64, per_branch: usize) -> Result<SpotCheck> {
    let scs = enumerate_superclasses(&ModulationType::ALL, 3)?;
    let mut sorted = boundary.members.to_vec();
    sorted.sort();
    let target = scs
        .iter()
        .position(|s| s.members == sorted)
        .expect("reference members form a registered super class");
    // outer branches reach past δ1 = −4 for |δ2| near 1.5
    let config = SensitivityConfig {
        window: 6.0,
        scan_step: 1e-4,
        ..SensitivityConfig::default()
    };
    let problem = SensitivityProblem::with_model(&scs, target, PerturbedFeature::new(boundary.members.to_vec())?)?.with_config(config);

    let grid: Vec<f64> = (0..=300).map(|i| -1.5 + 0.01 * i as f64).collect();
    let mut branches = Vec::new();
    for outer in [1.0, -1.0] {
        for inner in [1.0, -1.0] {
            let real: Vec<(f64, f64)> = grid
                .iter()
                .filter_map(|&d2| boundary.delta1(multiplier, d2, outer, inner).map(|d1| (d2, d1)))
                .collect();
            if real.is_empty() {
                continue;
            }
            let picks: Vec<usize> = (0..per_branch)
                .map(|j| (((j as f64 + 0.5) / per_branch as f64) * (real.len() - 1) as f64).round() as usize)
                .collect();
            let samples = picks
                .into_iter()
                .map(|i| {
                    let (d2, d1) = real[i];
                    let nearest = problem
                        .roots_along(&[0.0, d2], 0, boundary.threshold)
                        .into_iter()
                        .min_by(|a, b| (a - d1).abs().total_cmp(&(b - d1).abs()));
                    SpotSample {
                        delta2: d2,
                        delta1_closed: d1,
                        delta1_contour: nearest,
                        deviation: nearest.map_or(f64::INFINITY, |r| (r - d1).abs()),
                    }
                })
                .collect();
            branches.push(BranchCheck {
                outer_sign: outer,
                inner_sign: inner,
                samples,
            });
        }
    }
    Ok(SpotCheck {
        label: boundary.label,
        multiplier,
        branches,
    })
}
