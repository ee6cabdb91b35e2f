//! Cumulant-based modulation classification over multiuser AWGN channels.
//!
//! Single-user classification (SUMC) decides the strongest transmitter's
//! modulation from the sixth-order feature |C42| / |C63|^(2/3); multiuser
//! classification (MUMC) decides the set of modulations present from the
//! normalized fourth-order cumulant of the superposition. Supporting pieces
//! generate synthetic multiuser streams, analyze sensitivity to amplitude
//! mismatch, and run seeded Monte Carlo sweeps.

pub mod classify;
pub mod constellation;
pub mod cumulants;
pub mod error;
pub mod harness;
pub mod rng;
pub mod sensitivity;
pub mod synth;

pub use classify::{
    classify_baseline_c42, classify_mumc, classify_sumc, enumerate_superclasses, BaselineClassifier, ClassVerdict, MumcClassifier,
    SumcClassifier, SuperClass,
};
pub use constellation::{alphabet, theoretical_cumulants, theoretical_fc, Constellation, CumulantSet, ModulationType};
pub use cumulants::{estimate_c21, estimate_c42, estimate_c63, estimate_cumulants, estimate_fc, estimate_fsc, SampleStream};
pub use error::{Error, Result};
pub use synth::{synthesize, Scenario, TransmitterSpec};
