//! Serialization: self-describing JSON records for matrices and 1RDMs,
//! plain delimited text for grid data, and JSON sidecars with provenance.

use std::io::Write;
use std::path::Path;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::analytic::FunctionalKind;
use crate::error::{DimerError, Result};
use crate::model::{InteractionParams, Rdm};
use crate::search::GridField;
use crate::varrep::{SweepSample, VrepVerdict};

pub const BASIS_LABEL: &str = "phi1,phi2,phi3";
pub const TRACE_CONVENTION: &str = "per_spin_block_trace1";

/// Self-describing record for singlet-basis matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub basis: String,
    pub trace_convention: String,
    /// Row-major entries in the fixed basis order.
    pub data: Vec<f64>,
}

impl MatrixRecord {
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let mut data = Vec::with_capacity(9);
        for i in 0..3 {
            for j in 0..3 {
                data.push(m[(i, j)]);
            }
        }
        Self {
            basis: BASIS_LABEL.into(),
            trace_convention: TRACE_CONVENTION.into(),
            data,
        }
    }
}

/// Self-describing record for a (possibly complex) 1RDM.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RdmRecord {
    pub basis: String,
    pub trace_convention: String,
    /// `[g11, Re g12, Im g12]`.
    pub data: Vec<f64>,
}

impl RdmRecord {
    pub fn from_rdm(r: &Rdm) -> Self {
        Self {
            basis: BASIS_LABEL.into(),
            trace_convention: TRACE_CONVENTION.into(),
            data: vec![r.g11, r.g12.re, r.g12.im],
        }
    }
}

/// Sidecar describing a grid export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSidecar {
    pub resolution: usize,
    pub mask_rule: String,
    pub provenance: String,
    pub columns: Vec<String>,
}

fn io_err(e: std::io::Error) -> DimerError {
    DimerError::InvalidArgument(format!("io error: {e}"))
}

/// Writes `(g11, g12, value)` rows for the unmasked nodes, tab-separated
/// with a header line, plus a JSON sidecar next to it.
pub fn write_grid(field: &GridField<f64>, path: &Path, provenance: &str) -> Result<()> {
    let mut out = String::from("g11\tg12\tvalue\n");
    for (_, _, x, y, v) in field.iter() {
        out.push_str(&format!("{x}\t{y}\t{v}\n"));
    }
    std::fs::write(path, out).map_err(io_err)?;
    let sidecar = GridSidecar {
        resolution: field.resolution(),
        mask_rule: "(g11-1/2)^2 + g12^2 <= 1/4 + 1e-12".into(),
        provenance: provenance.into(),
        columns: vec!["g11".into(), "g12".into(), "value".into()],
    };
    let mut sc_path = path.to_path_buf();
    let ext = match path.extension().and_then(|e| e.to_str()) {
        Some(e) => format!("{e}.json"),
        None => "json".into(),
    };
    sc_path.set_extension(ext);
    std::fs::write(
        &sc_path,
        serde_json::to_string_pretty(&sidecar)
            .map_err(|e| DimerError::InvalidArgument(e.to_string()))?,
    )
    .map_err(io_err)?;
    Ok(())
}

/// Batch export for functional evaluations:
/// `(g11, g12, value, kind, U, V, X)`.
pub fn write_functional_rows(
    field: &GridField<f64>,
    kind: FunctionalKind,
    w: &InteractionParams,
    path: &Path,
) -> Result<()> {
    let mut out = String::from("g11\tg12\tvalue\tkind\tU\tV\tX\n");
    for (_, _, x, y, v) in field.iter() {
        out.push_str(&format!(
            "{x}\t{y}\t{v}\t{}\t{}\t{}\t{}\n",
            kind.name(),
            w.u,
            w.v,
            w.x
        ));
    }
    std::fs::write(path, out).map_err(io_err)
}

/// Verdict field export with integer-coded status plus the raw gap.
pub fn write_verdicts(field: &GridField<VrepVerdict>, path: &Path) -> Result<()> {
    let mut out = String::from("g11\tg12\tstatus\tgap\n");
    for (_, _, x, y, v) in field.iter() {
        out.push_str(&format!("{x}\t{y}\t{}\t{}\n", v.status.code(), v.gap));
    }
    std::fs::write(path, out).map_err(io_err)
}

/// Sweep rows: `(t, eps1, eps2, g11, g12, energy, degeneracy)`.
pub fn write_sweep_rows(rows: &[SweepSample], path: &Path) -> Result<()> {
    let mut out = String::from("t\teps1\teps2\tg11\tg12\tenergy\tdegeneracy\n");
    for s in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            s.t, s.eps1, s.eps2, s.g11, s.g12, s.energy, s.degeneracy
        ));
    }
    std::fs::write(path, out).map_err(io_err)
}

/// Generic table writer: a header plus rows of plain `Display` floats.
pub fn write_table(header: &[&str], rows: &[Vec<f64>], path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join("\t"));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(io_err)
}

/// Writes pretty JSON to a path.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    let text =
        serde_json::to_string_pretty(value).map_err(|e| DimerError::InvalidArgument(e.to_string()))?;
    file.write_all(text.as_bytes()).map_err(io_err)?;
    file.write_all(b"\n").map_err(io_err)?;
    Ok(())
}
