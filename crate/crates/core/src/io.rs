//! File formats: channel and dilation JSON, search reports, and the sweep
//! point-cloud CSV. Complex entries are `[re, im]` pairs; matrices are
//! lists of rows.

use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channel::QuantumChannel;
use crate::depolarizing::SweepPoint;
use crate::dilation::{DilationModel, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::search::{SearchConfig, SearchResult};

pub type MatrixRows = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_rows(m: &ComplexMatrix<f64>) -> MatrixRows {
    m.row_vecs().into_iter().map(|row| row.into_iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn matrix_from_rows(rows: &MatrixRows) -> Result<ComplexMatrix<f64>> {
    let rows: Vec<Vec<Complex<f64>>> =
        rows.iter().map(|r| r.iter().map(|&[re, im]| Complex::new(re, im)).collect()).collect();
    ComplexMatrix::from_rows(&rows)
}

/// `{"in_dim": n, "out_dim": m, "kraus": [ <m x n matrix>, ... ]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<MatrixRows>,
}

impl ChannelFile {
    pub fn from_channel(ch: &QuantumChannel<f64>) -> Self {
        Self { in_dim: ch.in_dim(), out_dim: ch.out_dim(), kraus: ch.kraus().iter().map(matrix_to_rows).collect() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel files serialize")
    }

    /// Shapes checked; trace preservation not enforced.
    pub fn to_channel_unvalidated(&self) -> Result<QuantumChannel<f64>> {
        let kraus = self.kraus.iter().map(matrix_from_rows).collect::<Result<Vec<_>>>()?;
        QuantumChannel::unvalidated(self.in_dim, self.out_dim, kraus)
    }

    /// Rejects files whose trace-preservation residual exceeds `tol`.
    pub fn to_channel(&self, tol: f64) -> Result<QuantumChannel<f64>> {
        let kraus = self.kraus.iter().map(matrix_from_rows).collect::<Result<Vec<_>>>()?;
        QuantumChannel::with_tolerance(self.in_dim, self.out_dim, kraus, tol)
    }
}

/// `{"n": ..., "m": ..., "spectrum": [...], "unitary": <matrix>}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DilationFile {
    pub n: usize,
    pub m: usize,
    pub spectrum: Vec<f64>,
    pub unitary: MatrixRows,
}

impl DilationFile {
    pub fn from_model(model: &DilationModel<f64>) -> Self {
        Self {
            n: model.in_dim(),
            m: model.out_dim(),
            spectrum: model.env().spectrum().to_vec(),
            unitary: matrix_to_rows(model.unitary()),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dilation files serialize")
    }

    pub fn to_model(&self) -> Result<DilationModel<f64>> {
        let env = EnvironmentSpec::new(self.spectrum.clone())?;
        DilationModel::new(self.n, self.m, env, matrix_from_rows(&self.unitary)?)
    }
}

/// Outcome of one environment search, with the target it was run on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub target: ChannelFile,
    pub d: usize,
    pub config: SearchConfig,
    pub best_residual: f64,
    pub success: bool,
    /// `"certificate"` on success, `"evidence"` otherwise.
    pub verdict: String,
    pub per_restart: Vec<f64>,
    pub evals_used: usize,
    pub best_spectrum: Vec<f64>,
    pub best_unitary_params: Vec<f64>,
}

impl SearchReport {
    pub fn new(target: &QuantumChannel<f64>, d: usize, config: &SearchConfig, result: &SearchResult) -> Self {
        Self {
            target: ChannelFile::from_channel(target),
            d,
            config: config.clone(),
            best_residual: result.best_residual,
            success: result.success,
            verdict: verdict(result.success).into(),
            per_restart: result.per_restart_residuals.clone(),
            evals_used: result.evals_used,
            best_spectrum: result.best_spectrum.clone(),
            best_unitary_params: result.best_unitary_params.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("search reports serialize")
    }
}

pub fn verdict(success: bool) -> &'static str {
    if success {
        "certificate"
    } else {
        "evidence"
    }
}

pub const SWEEP_HEADER: &str = "theta,phi1,phi2,eps1,eps2,eps3,eps4,x,y,z";

/// One header line plus one row per point, 17 significant digits.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for p in points {
        let e = p.eps.weights();
        let fields = [
            p.angles.theta,
            p.angles.phi1,
            p.angles.phi2,
            e[0],
            e[1],
            e[2],
            e[3],
            p.tetra.x,
            p.tetra.y,
            p.tetra.z,
        ];
        let line: Vec<String> = fields.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depolarizing::{solution_set_sweep, TwoPauliParam};

    #[test]
    fn channel_file_schema() {
        let text = r#"{"in_dim": 2, "out_dim": 2, "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        let file = ChannelFile::parse(text).unwrap();
        let ch = file.to_channel(1e-9).unwrap();
        assert!(ch.distance(&QuantumChannel::identity(2)).unwrap() < 1e-15);

        let short = r#"{"in_dim": 2, "out_dim": 2, "kraus": [[[[0.9,0],[0,0]],[[0,0],[0.9,0]]]]}"#;
        let file = ChannelFile::parse(short).unwrap();
        assert!(matches!(file.to_channel(1e-9), Err(Error::NotTracePreserving { .. })));
        assert!(file.to_channel_unvalidated().is_ok());

        assert!(matches!(ChannelFile::parse("{\"in_dim\": 2}"), Err(Error::Format(_))));
        let extra = r#"{"in_dim": 1, "out_dim": 1, "kraus": [[[[1,0]]]], "bogus": 1}"#;
        assert!(ChannelFile::parse(extra).is_err());
    }

    #[test]
    fn channel_file_round_trip() {
        let ch = TwoPauliParam::new(0.3).unwrap().channel();
        let text = ChannelFile::from_channel(&ch).to_json();
        let back = ChannelFile::parse(&text).unwrap().to_channel(1e-9).unwrap();
        assert_eq!(back.kraus(), ch.kraus());
    }

    #[test]
    fn dilation_file_validates() {
        let ch = TwoPauliParam::new(0.5).unwrap().channel();
        let model = DilationModel::stinespring(&ch).unwrap();
        let text = DilationFile::from_model(&model).to_json();
        let back = DilationFile::parse(&text).unwrap().to_model().unwrap();
        assert_eq!(back.unitary(), model.unitary());

        let mut bad = DilationFile::from_model(&model);
        bad.unitary[0][0] = [2.0, 0.0];
        assert!(matches!(bad.to_model(), Err(Error::NotUnitary { .. })));
        let mut bad = DilationFile::from_model(&model);
        bad.spectrum = vec![0.5, 0.6, 0.0, 0.0];
        assert!(matches!(bad.to_model(), Err(Error::InvalidSpectrum(_))));
    }

    #[test]
    fn sweep_csv_layout() {
        let points = solution_set_sweep(2).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&points, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines.len(), 9);
        assert_eq!(
            lines[1],
            "0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,\
             1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,\
             1.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0"
        );
        for line in &lines[1..] {
            let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
            assert_eq!(fields.len(), 10);
        }
    }
}
