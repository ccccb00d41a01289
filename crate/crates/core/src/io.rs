//! File formats: surface grid CSV, fundamental-data CSV, and the JSON
//! model/manifest specs consumed by the CLI.
//!
//! All floating point output is printed with 17 significant digits so
//! identical inputs give bit-identical files.

use crate::error::Error;
use crate::grid::{Axes, Grid};
use crate::linalg::Vec3;
use crate::model::{
    make_dim4_model, make_model, FamilyKind, MetricLieGroupModel, Signature, StructureConstants,
};
use crate::surface::SurfaceGrid;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a surface grid CSV (`u,v,x,y,z`), rows in `v`-major order.
pub fn write_surface_csv<W: Write>(
    out: &mut W,
    axes: &Axes,
    positions: &Grid<Vec3>,
) -> Result<()> {
    writeln!(out, "u,v,x,y,z")?;
    for (j, &v) in axes.vs.iter().enumerate() {
        for (i, &u) in axes.us.iter().enumerate() {
            let p = positions.at(i, j);
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(u),
                fmt_f64(v),
                fmt_f64(p[0]),
                fmt_f64(p[1]),
                fmt_f64(p[2])
            )?;
        }
    }
    Ok(())
}

/// A parsed surface grid file.
pub struct SurfaceCsv {
    pub axes: Axes,
    pub positions: Grid<Vec3>,
}

/// Read a surface grid CSV, recovering the tensor-grid axes from the `u, v`
/// columns (any row order is accepted; the grid must be complete).
pub fn read_surface_csv(text: &str) -> Result<SurfaceCsv> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Data("empty file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["u", "v", "x", "y", "z"] {
        return Err(Error::Data(format!("bad header `{header}`; expected u,v,x,y,z")));
    }
    let mut rows: Vec<[f64; 5]> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = [0.0; 5];
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Data(format!("row {}: expected 5 fields", lineno + 2)));
        }
        for (k, f) in fields.iter().enumerate() {
            row[k] = f.trim().parse::<f64>().map_err(|e| {
                Error::Data(format!("row {}: bad number `{}`: {e}", lineno + 2, f))
            })?;
            if !row[k].is_finite() {
                return Err(Error::Data(format!(
                    "row {}: non-finite value in column {}",
                    lineno + 2,
                    k
                )));
            }
        }
        rows.push(row);
    }
    let mut us: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let mut vs: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    us.sort_by(f64::total_cmp);
    us.dedup();
    vs.sort_by(f64::total_cmp);
    vs.dedup();
    if us.len() * vs.len() != rows.len() {
        return Err(Error::Data(format!(
            "grid incomplete: {} x {} axes but {} rows",
            us.len(),
            vs.len(),
            rows.len()
        )));
    }
    let axes = Axes { us: us.clone(), vs: vs.clone() };
    let find = |vals: &[f64], x: f64| -> usize {
        vals.binary_search_by(|a| a.total_cmp(&x)).expect("axis value")
    };
    let mut positions = Grid::fill(us.len(), vs.len(), [f64::NAN; 3]);
    for r in &rows {
        let i = find(&us, r[0]);
        let j = find(&vs, r[1]);
        *positions.at_mut(i, j) = [r[2], r[3], r[4]];
    }
    if positions.data.iter().any(|p| p.iter().any(|x| x.is_nan())) {
        return Err(Error::Data("duplicate rows leave grid holes".into()));
    }
    Ok(SurfaceCsv { axes, positions })
}

/// Write the fundamental-data CSV with header
/// `u,v,S11,S12,S22,T1_1,T1_2,T2_1,T2_2,T3_1,T3_2,nu1,nu2,nu3,H,K`.
pub fn write_fundamental_csv<W: Write>(out: &mut W, grid: &SurfaceGrid) -> Result<()> {
    writeln!(out, "u,v,S11,S12,S22,T1_1,T1_2,T2_1,T2_2,T3_1,T3_2,nu1,nu2,nu3,H,K")?;
    for (j, &v) in grid.axes.vs.iter().enumerate() {
        for (i, &u) in grid.axes.us.iter().enumerate() {
            let d = grid.data.at(i, j);
            let fields = [
                u,
                v,
                d.s[0][0],
                0.5 * (d.s[0][1] + d.s[1][0]),
                d.s[1][1],
                d.t[0][0],
                d.t[0][1],
                d.t[1][0],
                d.t[1][1],
                d.t[2][0],
                d.t[2][1],
                d.nu[0],
                d.nu[1],
                d.nu[2],
                d.h,
                d.k,
            ];
            let line: Vec<String> = fields.iter().map(|x| fmt_f64(*x)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
    }
    Ok(())
}

/// JSON model spec: either raw constants or a named family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Constants { c: [f64; 3], eps: [i8; 3] },
    Family { family: FamilySpec, kappa: f64, tau: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilySpec {
    #[serde(rename = "EKT")]
    Ekt,
    #[serde(rename = "LKT")]
    Lkt,
    #[serde(rename = "LKT_HAT")]
    LktHat,
}

impl From<FamilySpec> for FamilyKind {
    fn from(f: FamilySpec) -> FamilyKind {
        match f {
            FamilySpec::Ekt => FamilyKind::Ekt,
            FamilySpec::Lkt => FamilyKind::Lkt,
            FamilySpec::LktHat => FamilyKind::LktHat,
        }
    }
}

impl GroupSpec {
    pub fn build(&self) -> Result<MetricLieGroupModel> {
        match self {
            GroupSpec::Constants { c, eps } => {
                let sig = Signature::new(eps[0], eps[1], eps[2])?;
                if c.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Data("non-finite structure constants".into()));
                }
                Ok(make_model(StructureConstants::new(c[0], c[1], c[2]), sig))
            }
            GroupSpec::Family { family, kappa, tau } => {
                make_dim4_model((*family).into(), *kappa, *tau)
            }
        }
    }
}

/// Reconstruction manifest:
/// `{"mode": "from_T"|"from_angles"|"dim4", "q0": [x,y,z], "H_sign": 1,
///   "tolerances": {...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructManifest {
    pub mode: ReconstructMode,
    pub q0: [f64; 3],
    #[serde(default = "default_h_sign")]
    pub h_sign: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_h_sign() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReconstructMode {
    #[serde(rename = "from_T")]
    FromT,
    #[serde(rename = "from_angles")]
    FromAngles,
    #[serde(rename = "dim4")]
    Dim4,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_orthonormality")]
    pub orthonormality: f64,
    #[serde(default = "default_symmetry")]
    pub symmetry: f64,
    /// `None` means the spec default `100 h^2` from the grid spacing.
    #[serde(default)]
    pub condition: Option<f64>,
}

fn default_orthonormality() -> f64 {
    1e-6
}

fn default_symmetry() -> f64 {
    1e-4
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            orthonormality: default_orthonormality(),
            symmetry: default_symmetry(),
            condition: None,
        }
    }
}

/// Correspondence manifest: `{"theta": t, "target_family": "auto"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrespondManifest {
    pub theta: f64,
    #[serde(default = "default_target_family")]
    pub target_family: String,
}

fn default_target_family() -> String {
    "auto".into()
}
