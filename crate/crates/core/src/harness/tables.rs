use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiment::{Experiment, ExperimentKind};
use super::run::run_sweep;
use crate::classify::{enumerate_superclasses, BaselineClassifier, MumcClassifier, SumcClassifier, SuperClass};
use crate::constellation::{alphabet, theoretical_cumulants, ModulationType};
use crate::cumulants::{estimate_cumulants, SampleStream};
use crate::error::{Error, Result};
use crate::sensitivity::SensitivityProblem;

/// Theoretical cumulants and SUMC feature of one alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantRow {
    pub modulation: ModulationType,
    pub c42: f64,
    pub c63: f64,
    pub fc: f64,
}

pub fn cumulant_table() -> Vec<CumulantRow> {
    ModulationType::ALL
        .iter()
        .map(|&m| {
            let c = theoretical_cumulants(&alphabet(m));
            CumulantRow {
                modulation: m,
                c42: c.c42,
                c63: c.c63,
                fc: c.fc().expect("every registered alphabet has C63 != 0"),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub experiment: String,
    pub sigma_delta_sq: f64,
    pub superclass_id: usize,
    pub superclass_label: String,
    pub p_analytic: f64,
    pub p_montecarlo: f64,
    pub mc_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityResult {
    pub experiment: Experiment,
    pub rows: Vec<SensitivityRow>,
}

impl SensitivityResult {
    pub fn row(&self, axis_index: usize, superclass_id: usize) -> Option<&SensitivityRow> {
        let x = *self.experiment.axis.get(axis_index)?;
        self.rows.iter().find(|r| r.sigma_delta_sq == x && r.superclass_id == superclass_id)
    }
}

fn superclasses_of(exp: &Experiment) -> Result<Vec<SuperClass>> {
    if !exp.kind.is_sensitivity() {
        return Err(Error::Config(format!("experiment `{}` is not a sensitivity experiment", exp.name)));
    }
    exp.validate()?;
    enumerate_superclasses(&exp.candidates, exp.transmitter_count())
}

/// Analytical p_S(i|i) next to the Monte Carlo estimate from `exp.n_trials`
/// perturbation draws per (σ², super class).
pub fn run_sensitivity(exp: &Experiment, jobs: usize) -> Result<SensitivityResult> {
    let scs = superclasses_of(exp)?;
    let problems = (0..scs.len())
        .map(|i| SensitivityProblem::new(&scs, i))
        .collect::<Result<Vec<_>>>()?;
    let mc = run_sweep(exp, jobs)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let cells: Vec<(usize, usize)> = (0..exp.axis.len()).flat_map(|a| (0..scs.len()).map(move |s| (a, s))).collect();
    let analytic: Vec<f64> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(a, s)| problems[s].p_correct(exp.axis[a].sqrt()))
            .collect::<Result<Vec<_>>>()
    })?;

    let rows = cells
        .iter()
        .zip(analytic)
        .map(|(&(a, s), p)| {
            let sim = mc.class_row("mumc", a, s).expect("monte carlo row");
            SensitivityRow {
                experiment: exp.name.clone(),
                sigma_delta_sq: exp.axis[a],
                superclass_id: s,
                superclass_label: scs[s].label(),
                p_analytic: p,
                p_montecarlo: sim.p_correct,
                mc_stderr: sim.std_error,
            }
        })
        .collect();
    Ok(SensitivityResult {
        experiment: exp.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourRow {
    pub superclass_id: usize,
    pub superclass_label: String,
    pub threshold: f64,
    pub delta2: f64,
    pub delta1: f64,
}

/// Points on every decision threshold bounding each super class's
/// correct band, over a δ2 grid (three-user experiments only).
pub fn contour_table(exp: &Experiment, delta2: &[f64]) -> Result<Vec<ContourRow>> {
    if exp.kind != ExperimentKind::Sensitivity2d {
        return Err(Error::Config(format!(
            "experiment `{}`: contours need kind sensitivity_2d",
            exp.name
        )));
    }
    let scs = superclasses_of(exp)?;
    let mut rows = Vec::new();
    for (id, sc) in scs.iter().enumerate() {
        let problem = SensitivityProblem::new(&scs, id)?;
        for t in problem.thresholds() {
            for (d2, d1) in problem.contour(t, delta2)? {
                rows.push(ContourRow {
                    superclass_id: id,
                    superclass_label: sc.label(),
                    threshold: t,
                    delta2: d2,
                    delta1: d1,
                });
            }
        }
    }
    Ok(rows)
}

/// δ2 ∈ [−2, 2] at step 0.01.
pub fn default_contour_grid() -> Vec<f64> {
    (0..=400).map(|i| -2.0 + 0.01 * i as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifyMode {
    Sumc,
    /// Fourth-order single-user rule, for comparison with SUMC.
    Baseline,
    Mumc,
}

impl ClassifyMode {
    pub fn name(self) -> &'static str {
        match self {
            ClassifyMode::Sumc => "sumc",
            ClassifyMode::Baseline => "baseline",
            ClassifyMode::Mumc => "mumc",
        }
    }
}

/// Verdict for one recorded stream, with the cumulants behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRow {
    pub mode: String,
    pub decision: String,
    pub estimated_feature: f64,
    pub margin: f64,
    pub n_samples: usize,
    pub c21: f64,
    pub c42: f64,
    pub c63: f64,
}

/// `transmitters` only matters for MUMC; `noise_variance` is ignored by SUMC.
pub fn classify_stream(
    stream: &SampleStream,
    mode: ClassifyMode,
    candidates: &[ModulationType],
    transmitters: usize,
    noise_variance: f64,
) -> Result<ClassificationRow> {
    let c = estimate_cumulants(stream);
    let (verdict, decision) = match mode {
        ClassifyMode::Sumc => {
            let v = SumcClassifier::new(candidates)?.classify_cumulants(&c)?;
            (v, candidates[v.decided].to_string())
        }
        ClassifyMode::Baseline => {
            let v = BaselineClassifier::new(candidates, noise_variance)?.classify_cumulants(&c)?;
            (v, candidates[v.decided].to_string())
        }
        ClassifyMode::Mumc => {
            let scs = enumerate_superclasses(candidates, transmitters)?;
            let v = MumcClassifier::new(&scs, transmitters, noise_variance)?.classify_cumulants(&c)?;
            (v, scs[v.decided].label())
        }
    };
    Ok(ClassificationRow {
        mode: mode.name().to_string(),
        decision,
        estimated_feature: verdict.estimated_feature,
        margin: verdict.margin,
        n_samples: stream.len(),
        c21: c.c21,
        c42: c.c42,
        c63: c.c63,
    })
}
