//! Raw stream files: little-endian interleaved f64 (re, im) pairs, with an
//! optional sidecar `<path>.hdr` TOML header describing how the stream was
//! produced.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Scenario, TransmitterSpec};
use crate::cumulants::SampleStream;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamHeader {
    pub format: String,
    pub length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_variance: Option<f64>,
    #[serde(default)]
    pub transmitters: Vec<TransmitterSpec>,
}

pub const STREAM_FORMAT: &str = "cf64le";

impl StreamHeader {
    pub fn for_scenario(scenario: &Scenario) -> Self {
        StreamHeader {
            format: STREAM_FORMAT.to_string(),
            length: scenario.n_symbols,
            seed: Some(scenario.seed),
            noise_variance: Some(scenario.noise_variance),
            transmitters: scenario.transmitters.clone(),
        }
    }
}

pub fn header_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".hdr");
    PathBuf::from(s)
}

pub fn write_stream(path: &Path, stream: &SampleStream, header: Option<&StreamHeader>) -> Result<()> {
    let mut bytes = Vec::with_capacity(stream.len() * 16);
    for z in stream.samples() {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    if let Some(h) = header {
        let hp = header_path(path);
        let text = toml::to_string(h).map_err(|e| Error::Serialization(e.to_string()))?;
        fs::write(&hp, text).map_err(|e| Error::io(hp, e))?;
    }
    Ok(())
}

/// Read a stream file and its sidecar header, if present.
pub fn read_stream(path: &Path) -> Result<(SampleStream, Option<StreamHeader>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() % 16 != 0 {
        return Err(Error::Config(format!(
            "{}: length {} is not a multiple of 16 bytes",
            path.display(),
            bytes.len()
        )));
    }
    let samples: Vec<Complex64> = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    let hp = header_path(path);
    let header = if hp.exists() {
        let text = fs::read_to_string(&hp).map_err(|e| Error::io(&hp, e))?;
        let h: StreamHeader = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", hp.display())))?;
        if h.length != samples.len() {
            return Err(Error::Config(format!(
                "{}: header length {} does not match {} samples",
                hp.display(),
                h.length,
                samples.len()
            )));
        }
        Some(h)
    } else {
        None
    };
    Ok((SampleStream::new(samples)?, header))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synthesize;
    use crate::ModulationType;

    #[test]
    fn stream_file_round_trip() {
        let sc = Scenario {
            transmitters: vec![
                TransmitterSpec::new(ModulationType::Qam16, 1.5),
                TransmitterSpec::new(ModulationType::Bpsk, 0.5).with_sync_error(0.25),
            ],
            noise_variance: 0.1,
            n_symbols: 257,
            seed: 77,
        };
        let s = synthesize(&sc).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("y.cf64");
        write_stream(&p, &s, Some(&StreamHeader::for_scenario(&sc))).unwrap();
        assert_eq!(std::fs::metadata(&p).unwrap().len(), 257 * 16);
        let (back, h) = read_stream(&p).unwrap();
        assert_eq!(back, s);
        let h = h.unwrap();
        assert_eq!(h.seed, Some(77));
        assert_eq!(h.transmitters, sc.transmitters);
    }

    #[test]
    fn rejects_truncated_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad");
        std::fs::write(&p, [0u8; 20]).unwrap();
        assert!(matches!(read_stream(&p), Err(Error::Config(_))));
        assert!(matches!(read_stream(&dir.path().join("missing")), Err(Error::Io { .. })));
    }
}
