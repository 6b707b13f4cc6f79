//! CSV artifacts. Reals are written with 17 significant digits so every
//! table reloads bit-for-bit.

use std::fs::File;
use std::path::Path;

use crate::analysis::audit::AuditRow;
use crate::analysis::convergence::ConvergenceTable;
use crate::analysis::decay::DecayFit;
use crate::analysis::sobolev::SobolevSummary;
use crate::energy::ClosureAudit;
use crate::error::{Error, Result};
use crate::fields::{BoundaryData, BoundarySide, CauchyData, EdgeTrace, ModeSpec};
use crate::scattering::ScatteringReport;

pub const CAUCHY_HEADER: [&str; 3] = ["rstar", "psi0", "psi1"];
pub const HPLUS_HEADER: [&str; 3] = ["v", "xi", "dxi_dv"];
pub const IPLUS_HEADER: [&str; 3] = ["u", "zeta", "dzeta_du"];
pub const ENERGY_AUDIT_HEADER: [&str; 8] = [
    "T",
    "E_N_inner",
    "E_N_outer",
    "E_H_T",
    "E_ST_total",
    "E_Hplus_cum",
    "E_Iplus_cum",
    "residual",
];
pub const SCATTERING_HEADER: [&str; 6] = [
    "run_id",
    "h",
    "forward_norm_ratio",
    "roundtrip_residual",
    "lipschitz_max_ratio",
    "ball_radius",
];
pub const DECAY_HEADER: [&str; 5] = ["region", "tau_lo", "tau_hi", "slope", "r2"];
pub const AUDIT_HEADER: [&str; 5] = ["inequality_id", "lhs", "rhs", "margin", "pass"];
pub const CONVERGENCE_HEADER: [&str; 6] = ["quantity", "level", "n", "error", "order", "flag"];
pub const SOBOLEV_HEADER: [&str; 8] = [
    "index", "cells", "amplitude", "center", "width", "l6_pow6", "h1_sq", "ratio",
];

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

fn writer(path: &Path, header: &[&str]) -> Result<csv::Writer<File>> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    Ok(w)
}

fn table_error(path: &Path, reason: impl Into<String>) -> Error {
    Error::Table {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Rows of a table whose header must match `header` exactly.
fn read_records(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(table_error(path, format!("expected header {header:?}, found {found:?}")));
    }
    Ok(r.records().collect::<std::result::Result<Vec<_>, _>>()?)
}

fn real(path: &Path, rec: &csv::StringRecord, col: usize) -> Result<f64> {
    let s = rec.get(col).unwrap_or("");
    s.trim()
        .parse()
        .map_err(|_| table_error(path, format!("column {col}: '{s}' is not a real")))
}

fn opt_real(path: &Path, rec: &csv::StringRecord, col: usize) -> Result<Option<f64>> {
    match rec.get(col).map(str::trim) {
        None | Some("") => Ok(None),
        Some(_) => real(path, rec, col).map(Some),
    }
}

fn text(rec: &csv::StringRecord, col: usize) -> String {
    rec.get(col).unwrap_or("").to_string()
}

fn integer(path: &Path, rec: &csv::StringRecord, col: usize) -> Result<usize> {
    let s = rec.get(col).unwrap_or("");
    s.trim()
        .parse()
        .map_err(|_| table_error(path, format!("column {col}: '{s}' is not an integer")))
}

fn write_columns(path: &Path, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let mut w = writer(path, header)?;
    let rows = columns.first().map_or(0, |c| c.len());
    for k in 0..rows {
        w.write_record(columns.iter().map(|c| fmt_real(c[k])))?;
    }
    w.flush()?;
    Ok(())
}

fn read_columns<const N: usize>(path: &Path, header: &[&str; N]) -> Result<[Vec<f64>; N]> {
    let records = read_records(path, header)?;
    let mut cols: [Vec<f64>; N] = std::array::from_fn(|_| Vec::with_capacity(records.len()));
    for rec in &records {
        for (c, col) in cols.iter_mut().enumerate() {
            col.push(real(path, rec, c)?);
        }
    }
    Ok(cols)
}

pub fn write_cauchy(path: &Path, data: &CauchyData) -> Result<()> {
    write_columns(path, &CAUCHY_HEADER, &[data.rstar(), data.psi0(), data.psi1()])
}

pub fn read_cauchy(path: &Path, mode: ModeSpec) -> Result<CauchyData> {
    let [rstar, psi0, psi1] = read_columns(path, &CAUCHY_HEADER)?;
    CauchyData::new(rstar, psi0, psi1, mode)
}

fn write_edge(path: &Path, header: &[&str; 3], edge: &EdgeTrace) -> Result<()> {
    write_columns(path, header, &[&edge.coords, &edge.values, &edge.slopes])
}

/// Edge samples; slopes are recomputed from the values on load.
fn read_edge(path: &Path, header: &[&str; 3]) -> Result<EdgeTrace> {
    let [coords, values, _] = read_columns(path, header)?;
    EdgeTrace::new(coords, values)
}

pub fn write_radiation(hplus: &Path, iplus: &Path, bdata: &BoundaryData) -> Result<()> {
    write_edge(hplus, &HPLUS_HEADER, bdata.horizon())?;
    write_edge(iplus, &IPLUS_HEADER, bdata.infinity())
}

pub fn read_radiation(hplus: &Path, iplus: &Path, side: BoundarySide, mode: ModeSpec) -> Result<BoundaryData> {
    BoundaryData::new(
        side,
        read_edge(hplus, &HPLUS_HEADER)?,
        read_edge(iplus, &IPLUS_HEADER)?,
        mode,
    )
}

/// One `energy_audit` row; `residual` is signed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyAuditRecord {
    pub t: f64,
    pub e_n_inner: f64,
    pub e_n_outer: f64,
    pub e_h_t: f64,
    pub e_st_total: f64,
    pub e_hplus_cum: f64,
    pub e_iplus_cum: f64,
    pub residual: f64,
}

impl From<&ClosureAudit> for EnergyAuditRecord {
    fn from(c: &ClosureAudit) -> Self {
        EnergyAuditRecord {
            t: c.t,
            e_n_inner: c.slice.inner,
            e_n_outer: c.slice.outer,
            e_h_t: c.slice.null,
            e_st_total: c.slice.total,
            e_hplus_cum: c.e_hplus_cum,
            e_iplus_cum: c.e_iplus_cum,
            residual: c.signed_residual,
        }
    }
}

pub fn write_energy_audit(path: &Path, rows: &[EnergyAuditRecord]) -> Result<()> {
    let mut w = writer(path, &ENERGY_AUDIT_HEADER)?;
    for r in rows {
        w.write_record(
            [
                r.t,
                r.e_n_inner,
                r.e_n_outer,
                r.e_h_t,
                r.e_st_total,
                r.e_hplus_cum,
                r.e_iplus_cum,
                r.residual,
            ]
            .map(fmt_real),
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_energy_audit(path: &Path) -> Result<Vec<EnergyAuditRecord>> {
    let [t, inner, outer, null, total, hp, ip, res] = read_columns(path, &ENERGY_AUDIT_HEADER)?;
    Ok((0..t.len())
        .map(|k| EnergyAuditRecord {
            t: t[k],
            e_n_inner: inner[k],
            e_n_outer: outer[k],
            e_h_t: null[k],
            e_st_total: total[k],
            e_hplus_cum: hp[k],
            e_iplus_cum: ip[k],
            residual: res[k],
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringRecord {
    pub run_id: String,
    pub h: f64,
    pub forward_norm_ratio: f64,
    pub roundtrip_residual: f64,
    pub lipschitz_max_ratio: f64,
    pub ball_radius: f64,
}

impl From<&ScatteringReport> for ScatteringRecord {
    fn from(r: &ScatteringReport) -> Self {
        ScatteringRecord {
            run_id: r.run_id.clone(),
            h: r.h,
            forward_norm_ratio: r.forward_norm_ratio,
            roundtrip_residual: r.roundtrip_residual,
            lipschitz_max_ratio: r.lipschitz_max_ratio,
            ball_radius: r.ball_radius,
        }
    }
}

pub fn write_scattering_report(path: &Path, rows: &[ScatteringRecord]) -> Result<()> {
    let mut w = writer(path, &SCATTERING_HEADER)?;
    for r in rows {
        w.write_record([
            r.run_id.clone(),
            fmt_real(r.h),
            fmt_real(r.forward_norm_ratio),
            fmt_real(r.roundtrip_residual),
            fmt_real(r.lipschitz_max_ratio),
            fmt_real(r.ball_radius),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scattering_report(path: &Path) -> Result<Vec<ScatteringRecord>> {
    read_records(path, &SCATTERING_HEADER)?
        .iter()
        .map(|rec| {
            Ok(ScatteringRecord {
                run_id: text(rec, 0),
                h: real(path, rec, 1)?,
                forward_norm_ratio: real(path, rec, 2)?,
                roundtrip_residual: real(path, rec, 3)?,
                lipschitz_max_ratio: real(path, rec, 4)?,
                ball_radius: real(path, rec, 5)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRecord {
    pub region: String,
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub slope: f64,
    pub r2: f64,
}

impl From<&DecayFit> for DecayRecord {
    fn from(f: &DecayFit) -> Self {
        DecayRecord {
            region: f.region.name().to_string(),
            tau_lo: f.tau_lo,
            tau_hi: f.tau_hi,
            slope: f.slope,
            r2: f.r2,
        }
    }
}

pub fn write_decay_fits(path: &Path, rows: &[DecayRecord]) -> Result<()> {
    let mut w = writer(path, &DECAY_HEADER)?;
    for r in rows {
        w.write_record([
            r.region.clone(),
            fmt_real(r.tau_lo),
            fmt_real(r.tau_hi),
            fmt_real(r.slope),
            fmt_real(r.r2),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_decay_fits(path: &Path) -> Result<Vec<DecayRecord>> {
    read_records(path, &DECAY_HEADER)?
        .iter()
        .map(|rec| {
            Ok(DecayRecord {
                region: text(rec, 0),
                tau_lo: real(path, rec, 1)?,
                tau_hi: real(path, rec, 2)?,
                slope: real(path, rec, 3)?,
                r2: real(path, rec, 4)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRecord {
    pub inequality_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl From<&AuditRow> for AuditRecord {
    fn from(r: &AuditRow) -> Self {
        AuditRecord {
            inequality_id: r.id.name().to_string(),
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            pass: r.pass,
        }
    }
}

pub fn write_audit(path: &Path, rows: &[AuditRecord]) -> Result<()> {
    let mut w = writer(path, &AUDIT_HEADER)?;
    for r in rows {
        w.write_record([
            r.inequality_id.clone(),
            fmt_real(r.lhs),
            fmt_real(r.rhs),
            fmt_real(r.margin),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_audit(path: &Path) -> Result<Vec<AuditRecord>> {
    read_records(path, &AUDIT_HEADER)?
        .iter()
        .map(|rec| {
            let pass = match rec.get(4).map(str::trim) {
                Some("true") => true,
                Some("false") => false,
                other => return Err(table_error(path, format!("pass column: {other:?}"))),
            };
            Ok(AuditRecord {
                inequality_id: text(rec, 0),
                lhs: real(path, rec, 1)?,
                rhs: real(path, rec, 2)?,
                margin: real(path, rec, 3)?,
                pass,
            })
        })
        .collect()
}

/// One error level of a convergence row. `order` compares with the
/// previous level and is empty on the first.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub quantity: String,
    pub level: usize,
    pub n: usize,
    pub error: f64,
    pub order: Option<f64>,
    pub flag: String,
}

/// Flatten a table. The field row's errors are differences between
/// successive lattices, labeled with the finer `n`.
pub fn convergence_records(table: &ConvergenceTable) -> Vec<ConvergenceRecord> {
    let mut out = Vec::new();
    for row in &table.rows {
        let offset = table.resolutions.len() - row.errors.len();
        for (level, err) in row.errors.iter().enumerate() {
            out.push(ConvergenceRecord {
                quantity: row.quantity.name().to_string(),
                level,
                n: table.resolutions[level + offset],
                error: *err,
                order: level.checked_sub(1).map(|k| row.orders[k]),
                flag: row.flag.name().to_string(),
            });
        }
    }
    out
}

pub fn write_convergence(path: &Path, rows: &[ConvergenceRecord]) -> Result<()> {
    let mut w = writer(path, &CONVERGENCE_HEADER)?;
    for r in rows {
        w.write_record([
            r.quantity.clone(),
            r.level.to_string(),
            r.n.to_string(),
            fmt_real(r.error),
            fmt_opt(r.order),
            r.flag.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_convergence(path: &Path) -> Result<Vec<ConvergenceRecord>> {
    read_records(path, &CONVERGENCE_HEADER)?
        .iter()
        .map(|rec| {
            Ok(ConvergenceRecord {
                quantity: text(rec, 0),
                level: integer(path, rec, 1)?,
                n: integer(path, rec, 2)?,
                error: real(path, rec, 3)?,
                order: opt_real(path, rec, 4)?,
                flag: text(rec, 5),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevRecord {
    pub index: usize,
    pub cells: usize,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub l6_pow6: f64,
    pub h1_sq: f64,
    pub ratio: f64,
}

pub fn sobolev_records(summary: &SobolevSummary) -> Vec<SobolevRecord> {
    summary
        .rows
        .iter()
        .map(|r| SobolevRecord {
            index: r.index,
            cells: summary.cells,
            amplitude: r.bump.amplitude,
            center: r.bump.center,
            width: r.bump.width,
            l6_pow6: r.norms.l6_pow6,
            h1_sq: r.norms.h1_sq,
            ratio: r.ratio,
        })
        .collect()
}

pub fn write_sobolev(path: &Path, rows: &[SobolevRecord]) -> Result<()> {
    let mut w = writer(path, &SOBOLEV_HEADER)?;
    for r in rows {
        w.write_record([
            r.index.to_string(),
            r.cells.to_string(),
            fmt_real(r.amplitude),
            fmt_real(r.center),
            fmt_real(r.width),
            fmt_real(r.l6_pow6),
            fmt_real(r.h1_sq),
            fmt_real(r.ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sobolev(path: &Path) -> Result<Vec<SobolevRecord>> {
    read_records(path, &SOBOLEV_HEADER)?
        .iter()
        .map(|rec| {
            Ok(SobolevRecord {
                index: integer(path, rec, 0)?,
                cells: integer(path, rec, 1)?,
                amplitude: real(path, rec, 2)?,
                center: real(path, rec, 3)?,
                width: real(path, rec, 4)?,
                l6_pow6: real(path, rec, 5)?,
                h1_sq: real(path, rec, 6)?,
                ratio: real(path, rec, 7)?,
            })
        })
        .collect()
}
