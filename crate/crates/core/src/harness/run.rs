use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::experiment::{Experiment, ExperimentKind};
use crate::classify::{enumerate_superclasses, BaselineClassifier, ClassVerdict, MumcClassifier, SumcClassifier, SuperClass};
use crate::constellation::ModulationType;
use crate::cumulants::estimate_cumulants;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, substream, StreamRole};
use crate::sensitivity::SensitivityProblem;
use crate::synth::{amplitudes_for_total_snr, amplitudes_from_snr_sir, synthesize, Scenario, TransmitterSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Correct,
    Incorrect,
    /// The feature could not be formed; counts as incorrect.
    Degenerate,
}

impl Outcome {
    fn from_verdict(v: Result<ClassVerdict>, truth: usize) -> Outcome {
        match v {
            Ok(v) if v.decided == truth => Outcome::Correct,
            Ok(_) => Outcome::Incorrect,
            Err(_) => Outcome::Degenerate,
        }
    }

    pub fn is_correct(self) -> bool {
        self == Outcome::Correct
    }
}

/// Result of one Monte Carlo realization. `baseline` is only set for SUMC
/// kinds, where the fourth-order classifier runs on the same stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub primary: Outcome,
    pub baseline: Option<Outcome>,
}

enum Plan {
    Sumc {
        sumc: SumcClassifier,
        baseline: BaselineClassifier,
    },
    Mumc {
        classifier: MumcClassifier,
    },
    Sensitivity {
        problems: Vec<SensitivityProblem>,
    },
}

/// An experiment with its classifiers built once.
pub struct PreparedExperiment<'a> {
    exp: &'a Experiment,
    plan: Plan,
    labels: Vec<String>,
}

impl<'a> PreparedExperiment<'a> {
    pub fn new(exp: &'a Experiment) -> Result<Self> {
        exp.validate()?;
        let m = exp.transmitter_count();
        let (plan, labels) = match exp.kind {
            ExperimentKind::SumcSnrSweep | ExperimentKind::SumcSyncSweep => (
                Plan::Sumc {
                    sumc: SumcClassifier::new(&exp.candidates)?,
                    baseline: BaselineClassifier::new(&exp.candidates, exp.noise_variance)?,
                },
                exp.candidates.iter().map(|c| c.to_string()).collect(),
            ),
            ExperimentKind::MumcSnrSweep | ExperimentKind::MumcSyncSweep => {
                let scs = enumerate_superclasses(&exp.candidates, m)?;
                let labels = scs.iter().map(SuperClass::label).collect();
                (
                    Plan::Mumc {
                        classifier: MumcClassifier::new(&scs, m, exp.noise_variance)?,
                    },
                    labels,
                )
            }
            ExperimentKind::Sensitivity1d | ExperimentKind::Sensitivity2d => {
                let scs = enumerate_superclasses(&exp.candidates, m)?;
                let problems = (0..scs.len()).map(|i| SensitivityProblem::new(&scs, i)).collect::<Result<_>>()?;
                (Plan::Sensitivity { problems }, scs.iter().map(SuperClass::label).collect())
            }
        };
        Ok(PreparedExperiment { exp, plan, labels })
    }

    pub fn experiment(&self) -> &Experiment {
        self.exp
    }

    pub fn n_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn class_labels(&self) -> &[String] {
        &self.labels
    }

    pub fn classifiers(&self) -> &'static [&'static str] {
        match self.plan {
            Plan::Sumc { .. } => &["sumc", "baseline_c42"],
            Plan::Mumc { .. } | Plan::Sensitivity { .. } => &["mumc"],
        }
    }

    pub fn sensitivity_problems(&self) -> Option<&[SensitivityProblem]> {
        match &self.plan {
            Plan::Sensitivity { problems } => Some(problems),
            _ => None,
        }
    }

    fn snr_and_interval(&self, axis_value: f64) -> (f64, f64) {
        if self.exp.kind.is_sync_sweep() {
            (self.exp.snr_db.unwrap_or_default(), axis_value)
        } else {
            (axis_value, self.exp.sync_interval)
        }
    }

    /// One realization for (axis point, true class, trial).
    pub fn trial(&self, axis_index: usize, class_index: usize, trial_index: usize) -> Result<TrialOutcome> {
        let exp = self.exp;
        if axis_index >= exp.axis.len() || class_index >= self.n_classes() || trial_index >= exp.n_trials {
            return Err(Error::invalid("trial index out of range"));
        }
        let seed = derive_seed(exp.base_seed, &[axis_index as u64, class_index as u64, trial_index as u64]);
        let axis_value = exp.axis[axis_index];
        match &self.plan {
            Plan::Sumc { sumc, baseline } => {
                let m = exp.transmitter_count();
                let (snr, interval) = self.snr_and_interval(axis_value);
                let amps = amplitudes_from_snr_sir(snr, exp.sir_db.unwrap_or(f64::INFINITY), m, exp.noise_variance)?;
                let q = exp.candidates.len();
                let mods: Vec<ModulationType> = (0..m).map(|k| exp.candidates[(class_index + k) % q]).collect();
                let stream = self.synthesize(&mods, &amps, interval, seed)?;
                let c = estimate_cumulants(&stream);
                Ok(TrialOutcome {
                    primary: Outcome::from_verdict(sumc.classify_cumulants(&c), class_index),
                    baseline: Some(Outcome::from_verdict(baseline.classify_cumulants(&c), class_index)),
                })
            }
            Plan::Mumc { classifier } => {
                let m = exp.transmitter_count();
                let (snr, interval) = self.snr_and_interval(axis_value);
                let amps = amplitudes_for_total_snr(snr, m, exp.noise_variance)?;
                let mods = &classifier.superclasses()[class_index].members;
                let stream = self.synthesize(mods, &amps, interval, seed)?;
                let c = estimate_cumulants(&stream);
                Ok(TrialOutcome {
                    primary: Outcome::from_verdict(classifier.classify_cumulants(&c), class_index),
                    baseline: None,
                })
            }
            Plan::Sensitivity { problems } => {
                let problem = &problems[class_index];
                let sigma = axis_value.sqrt();
                let mut rng = substream(seed, StreamRole::Perturbation);
                let deltas: Vec<f64> = (0..problem.model().n_deltas())
                    .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let primary = if problem.is_correct(&deltas) {
                    Outcome::Correct
                } else {
                    Outcome::Incorrect
                };
                Ok(TrialOutcome { primary, baseline: None })
            }
        }
    }

    fn synthesize(&self, mods: &[ModulationType], amps: &[f64], interval: f64, seed: u64) -> Result<crate::cumulants::SampleStream> {
        let mut sync = substream(seed, StreamRole::SyncError);
        let transmitters = mods
            .iter()
            .zip(amps)
            .map(|(&m, &a)| {
                let eps = if interval > 0.0 { interval * sync.random::<f64>() } else { 0.0 };
                TransmitterSpec::new(m, a).with_sync_error(eps)
            })
            .collect();
        synthesize(&Scenario {
            transmitters,
            noise_variance: self.exp.noise_variance,
            n_symbols: self.exp.n_symbols,
            seed,
        })
    }
}

/// Run a single trial of `exp`.
pub fn run_trial(exp: &Experiment, axis_index: usize, class_index: usize, trial_index: usize) -> Result<TrialOutcome> {
    PreparedExperiment::new(exp)?.trial(axis_index, class_index, trial_index)
}

/// One output line: either a per-class conditional probability or, with
/// `class_id` empty, the equal-prior average over classes.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SweepRow {
    pub experiment: String,
    pub kind: String,
    pub axis_value: f64,
    pub classifier: String,
    pub class_id: Option<usize>,
    pub class_label: String,
    pub p_correct: f64,
    pub std_error: f64,
    pub n_trials: usize,
    pub n_degenerate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub experiment: Experiment,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Equal-prior average row for `classifier` at `axis_index`.
    pub fn average(&self, classifier: &str, axis_index: usize) -> Option<&SweepRow> {
        let x = *self.experiment.axis.get(axis_index)?;
        self.rows
            .iter()
            .find(|r| r.class_id.is_none() && r.classifier == classifier && r.axis_value == x)
    }

    pub fn class_row(&self, classifier: &str, axis_index: usize, class_id: usize) -> Option<&SweepRow> {
        let x = *self.experiment.axis.get(axis_index)?;
        self.rows
            .iter()
            .find(|r| r.class_id == Some(class_id) && r.classifier == classifier && r.axis_value == x)
    }
}

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Full factorial axis × classes × trials on a pool of `jobs` threads.
/// Trials are collected in index order, so the result does not depend on `jobs`.
pub fn run_sweep(exp: &Experiment, jobs: usize) -> Result<SweepResult> {
    let prepared = PreparedExperiment::new(exp)?;
    let n_axis = exp.axis.len();
    let n_classes = prepared.n_classes();
    let n_trials = exp.n_trials;
    let total = n_axis * n_classes * n_trials;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let outcomes: Vec<TrialOutcome> = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|flat| {
                let trial = flat % n_trials;
                let class = (flat / n_trials) % n_classes;
                let axis = flat / (n_trials * n_classes);
                prepared.trial(axis, class, trial)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut rows = Vec::new();
    for (ai, &x) in exp.axis.iter().enumerate() {
        for (ci, &classifier) in prepared.classifiers().iter().enumerate() {
            let mut p_sum = 0.0;
            let mut var_sum = 0.0;
            let mut degenerate_sum = 0;
            for class in 0..n_classes {
                let start = (ai * n_classes + class) * n_trials;
                let (mut hits, mut degenerate) = (0usize, 0usize);
                for o in &outcomes[start..start + n_trials] {
                    let o = if ci == 0 {
                        o.primary
                    } else {
                        o.baseline.expect("baseline outcome")
                    };
                    hits += o.is_correct() as usize;
                    degenerate += (o == Outcome::Degenerate) as usize;
                }
                let p = hits as f64 / n_trials as f64;
                p_sum += p;
                var_sum += p * (1.0 - p) / n_trials as f64;
                degenerate_sum += degenerate;
                rows.push(SweepRow {
                    experiment: exp.name.clone(),
                    kind: exp.kind.name().to_string(),
                    axis_value: x,
                    classifier: classifier.to_string(),
                    class_id: Some(class),
                    class_label: prepared.class_labels()[class].clone(),
                    p_correct: p,
                    std_error: binomial_se(p, n_trials),
                    n_trials,
                    n_degenerate: degenerate,
                });
            }
            let h = n_classes as f64;
            rows.push(SweepRow {
                experiment: exp.name.clone(),
                kind: exp.kind.name().to_string(),
                axis_value: x,
                classifier: classifier.to_string(),
                class_id: None,
                class_label: "average".to_string(),
                p_correct: p_sum / h,
                std_error: var_sum.sqrt() / h,
                n_trials: n_trials * n_classes,
                n_degenerate: degenerate_sum,
            });
        }
    }
    Ok(SweepResult {
        experiment: exp.clone(),
        rows,
    })
}
