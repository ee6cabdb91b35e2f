//! Nearest-feature classifiers.
//!
//! * SUMC: the sixth-order feature |ĉ42|/|ĉ63|^(2/3) of the strongest user,
//!   compared against the noise-free alphabet table. Needs no noise variance.
//! * Baseline: the fourth-order feature |ĉ42/(ĉ21 − σ²)²| against |C42|.
//! * MUMC: the super-class feature ĉ42/((ĉ21 − σ²)/M)² against Σ C42 over
//!   each M-subset of the candidates.
//!
//! All decisions are the argmin of the absolute feature distance, tie-broken
//! by lowest index.

use serde::Serialize;

use crate::constellation::{theoretical_c42, theoretical_fc, CumulantSet, ModulationType};
use crate::cumulants::{estimate_cumulants, fc_from_cumulants, fsc_from_cumulants, SampleStream, DEFAULT_C63_FLOOR_RATIO};
use crate::error::{Error, Result};

/// Outcome of one classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassVerdict {
    /// Index into the candidate (or super-class) list.
    pub decided: usize,
    pub estimated_feature: f64,
    /// Gap between the second-smallest and smallest distance.
    pub margin: f64,
}

/// Argmin of |theory_i − estimate| with lowest-index tie-break.
pub fn nearest_feature(theory: &[f64], estimate: f64) -> ClassVerdict {
    assert!(!theory.is_empty(), "no candidate features");
    let mut best = (0usize, f64::INFINITY);
    let mut second = f64::INFINITY;
    for (i, &t) in theory.iter().enumerate() {
        let d = (t - estimate).abs();
        if d < best.1 {
            second = best.1;
            best = (i, d);
        } else if d < second {
            second = d;
        }
    }
    let margin = if second.is_finite() { second - best.1 } else { 0.0 };
    ClassVerdict {
        decided: best.0,
        estimated_feature: estimate,
        margin,
    }
}

/// Midpoints between adjacent values of `features` after sorting.
pub fn midpoint_thresholds(features: &[f64]) -> Vec<f64> {
    let mut sorted = features.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// The open interval of feature values classified as `index`: bounded by
/// the midpoints to its nearest lower and upper neighbours.
pub fn decision_interval(features: &[f64], index: usize) -> (f64, f64) {
    let own = features[index];
    let lower = features.iter().copied().filter(|&f| f < own).fold(f64::NEG_INFINITY, f64::max);
    let upper = features.iter().copied().filter(|&f| f > own).fold(f64::INFINITY, f64::min);
    (0.5 * (lower + own), 0.5 * (own + upper))
}

fn check_candidates(candidates: &[ModulationType]) -> Result<()> {
    if candidates.len() < 2 {
        return Err(Error::invalid("classification needs at least two candidates"));
    }
    check_distinct(candidates)
}

fn check_distinct(candidates: &[ModulationType]) -> Result<()> {
    for (i, m) in candidates.iter().enumerate() {
        if candidates[..i].contains(m) {
            return Err(Error::invalid(format!("candidate {m} listed twice")));
        }
    }
    Ok(())
}

/// Sixth-order single-user classifier with a precomputed feature table.
#[derive(Debug, Clone)]
pub struct SumcClassifier {
    candidates: Vec<ModulationType>,
    theory: Vec<f64>,
    floor_ratio: f64,
}

impl SumcClassifier {
    pub fn new(candidates: &[ModulationType]) -> Result<Self> {
        check_candidates(candidates)?;
        let theory = candidates.iter().map(|&m| theoretical_fc(m)).collect::<Result<_>>()?;
        Ok(SumcClassifier {
            candidates: candidates.to_vec(),
            theory,
            floor_ratio: DEFAULT_C63_FLOOR_RATIO,
        })
    }

    pub fn with_floor_ratio(mut self, ratio: f64) -> Self {
        self.floor_ratio = ratio;
        self
    }

    pub fn candidates(&self) -> &[ModulationType] {
        &self.candidates
    }

    pub fn theory(&self) -> &[f64] {
        &self.theory
    }

    pub fn classify_cumulants(&self, c: &CumulantSet) -> Result<ClassVerdict> {
        let f = fc_from_cumulants(c, self.floor_ratio)?;
        Ok(nearest_feature(&self.theory, f))
    }

    pub fn classify(&self, stream: &SampleStream) -> Result<ClassVerdict> {
        self.classify_cumulants(&estimate_cumulants(stream))
    }
}

pub fn classify_sumc(stream: &SampleStream, candidates: &[ModulationType]) -> Result<ClassVerdict> {
    SumcClassifier::new(candidates)?.classify(stream)
}

/// Fourth-order classifier with known noise variance, for comparison.
#[derive(Debug, Clone)]
pub struct BaselineClassifier {
    candidates: Vec<ModulationType>,
    theory: Vec<f64>,
    noise_variance: f64,
}

impl BaselineClassifier {
    pub fn new(candidates: &[ModulationType], noise_variance: f64) -> Result<Self> {
        check_candidates(candidates)?;
        Ok(BaselineClassifier {
            candidates: candidates.to_vec(),
            theory: candidates.iter().map(|&m| theoretical_c42(m).abs()).collect(),
            noise_variance,
        })
    }

    pub fn candidates(&self) -> &[ModulationType] {
        &self.candidates
    }

    pub fn classify_cumulants(&self, c: &CumulantSet) -> Result<ClassVerdict> {
        let f = fsc_from_cumulants(c, 1, self.noise_variance)?.abs();
        Ok(nearest_feature(&self.theory, f))
    }

    pub fn classify(&self, stream: &SampleStream) -> Result<ClassVerdict> {
        self.classify_cumulants(&estimate_cumulants(stream))
    }
}

pub fn classify_baseline_c42(stream: &SampleStream, candidates: &[ModulationType], noise_variance: f64) -> Result<ClassVerdict> {
    BaselineClassifier::new(candidates, noise_variance)?.classify(stream)
}

/// An M-subset of the candidate modulations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperClass {
    pub members: Vec<ModulationType>,
    /// Σ C42 over the members.
    pub theoretical_feature: f64,
}

impl SuperClass {
    pub fn new(members: Vec<ModulationType>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("a super class needs at least one member"));
        }
        for (i, m) in members.iter().enumerate() {
            if members[..i].contains(m) {
                return Err(Error::invalid(format!("super class lists {m} twice")));
            }
        }
        let theoretical_feature = members.iter().map(|&m| theoretical_c42(m)).sum();
        Ok(SuperClass {
            members,
            theoretical_feature,
        })
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn label(&self) -> String {
        self.members.iter().map(|m| m.name()).collect::<Vec<_>>().join("+")
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Every `m`-subset of `candidates` in lexicographic order of candidate position.
pub fn enumerate_superclasses(candidates: &[ModulationType], m: usize) -> Result<Vec<SuperClass>> {
    let q = candidates.len();
    if m == 0 || m > q {
        return Err(Error::invalid(format!("super-class size {m} must lie in 1..={q}")));
    }
    check_distinct(candidates)?;
    let mut out = Vec::with_capacity(binomial(q, m));
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        out.push(SuperClass::new(idx.iter().map(|&i| candidates[i]).collect())?);
        // advance to the next combination
        let Some(pos) = (0..m).rev().find(|&p| idx[p] < q - m + p) else {
            break;
        };
        idx[pos] += 1;
        for p in pos + 1..m {
            idx[p] = idx[p - 1] + 1;
        }
    }
    debug_assert_eq!(out.len(), binomial(q, m));
    Ok(out)
}

/// Super-class classifier for M equal-power users with known noise variance.
#[derive(Debug, Clone)]
pub struct MumcClassifier {
    superclasses: Vec<SuperClass>,
    theory: Vec<f64>,
    transmitters: usize,
    noise_variance: f64,
}

impl MumcClassifier {
    pub fn new(superclasses: &[SuperClass], transmitters: usize, noise_variance: f64) -> Result<Self> {
        if superclasses.len() < 2 {
            return Err(Error::invalid("MUMC needs at least two super classes"));
        }
        if let Some(sc) = superclasses.iter().find(|sc| sc.size() != transmitters) {
            return Err(Error::invalid(format!(
                "super class {} has {} members, expected {transmitters}",
                sc.label(),
                sc.size()
            )));
        }
        Ok(MumcClassifier {
            superclasses: superclasses.to_vec(),
            theory: superclasses.iter().map(|s| s.theoretical_feature).collect(),
            transmitters,
            noise_variance,
        })
    }

    pub fn superclasses(&self) -> &[SuperClass] {
        &self.superclasses
    }

    pub fn theory(&self) -> &[f64] {
        &self.theory
    }

    pub fn classify_feature(&self, fsc: f64) -> ClassVerdict {
        nearest_feature(&self.theory, fsc)
    }

    pub fn classify_cumulants(&self, c: &CumulantSet) -> Result<ClassVerdict> {
        let f = fsc_from_cumulants(c, self.transmitters, self.noise_variance)?;
        Ok(self.classify_feature(f))
    }

    pub fn classify(&self, stream: &SampleStream) -> Result<ClassVerdict> {
        self.classify_cumulants(&estimate_cumulants(stream))
    }
}

pub fn classify_mumc(stream: &SampleStream, superclasses: &[SuperClass], transmitters: usize, noise_variance: f64) -> Result<ClassVerdict> {
    MumcClassifier::new(superclasses, transmitters, noise_variance)?.classify(stream)
}
