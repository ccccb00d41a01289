//! Recovery of immersions from prescribed data.
//!
//! Three routes are implemented:
//!
//! * **from tangent projections** — `T_1, T_2, T_3` determine the frame
//!   matrix `M` pointwise; only the position equation is integrated
//!   (Frobenius once);
//! * **from angle functions** — `nu_1, nu_2, nu_3` determine the `T_i` up
//!   to the sign of the mean curvature through the fields `X_i`; the two
//!   sign branches give angular companions when the companion residual
//!   vanishes;
//! * **dim-4 route** — in the two-parameter families the data `(S, T, nu)`
//!   of the distinguished Killing direction suffice; the frame equation is
//!   integrated first and then the position (Frobenius twice).
//!
//! All routes check their hypotheses numerically and report residuals
//! rather than silently producing a surface from incompatible data.

use crate::error::Error;
use crate::frame::{
    build_m_from_t, darboux_residual, integrate_frame, integrate_position,
    omega_matrix, FrameField, Sweep, ThetaField,
};
use crate::grid::{Axes, Grid, ResidualStats};
use crate::linalg::{
    cross_eps, inner_eps, mat3_add, mat3_scale, normalize_eps, Mat2, Mat3, Vec2,
    Vec3,
};
use crate::model::{FamilyKind, MetricLieGroupModel, ModelPoint};
use crate::surface::{
    shape_from_t_nu, FundamentalData, GridCalc, SurfaceGrid,
};
use crate::Result;

/// Tolerances and sweep choices for the reconstruction pipelines.
#[derive(Debug, Clone, Copy)]
pub struct ReconstructionOptions {
    /// Tolerance on the orthonormality hypothesis of the `T_i`.
    pub orthonormality_tol: f64,
    /// Tolerance on the self-adjointness defect of the shape candidate.
    pub symmetry_tol: f64,
    /// Acceptance threshold for differential-condition residuals.
    pub condition_tol: f64,
    /// Darboux residual acceptance as a fraction of the grid diameter.
    pub darboux_tol_factor: f64,
    pub sweep: Sweep,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        ReconstructionOptions {
            orthonormality_tol: 1e-6,
            symmetry_tol: 1e-4,
            condition_tol: 1e-3,
            darboux_tol_factor: 1e-3,
            sweep: Sweep::RowFirst,
        }
    }
}

impl ReconstructionOptions {
    /// The spec'd default condition tolerance `100 h^2` for a given grid.
    pub fn for_axes(axes: &Axes) -> Self {
        let h = axes.hu().abs().max(axes.hv().abs());
        ReconstructionOptions { condition_tol: 100.0 * h * h, ..Default::default() }
    }
}

/// Reconstruction output: the integrated chart plus diagnostics.
pub struct Reconstruction {
    pub model: MetricLieGroupModel,
    pub axes: Axes,
    pub positions: Grid<Vec3>,
    pub frame: Option<FrameField>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub orthonormality_defect: f64,
    pub shape_symmetry_defect: f64,
    /// Residuals of the `nabla T_i` equations (route from T) or of the five
    /// dim-4 conditions (dim-4 route).
    pub condition_residuals: Vec<(String, ResidualStats)>,
    pub darboux: Option<ResidualStats>,
    /// Sup distance between row-first and column-first position sweeps.
    pub path_independence_gap: f64,
    /// Sup deviation of the integrated frame row from the prescribed data
    /// (dim-4 route only).
    pub row_tracking_error: f64,
}

/// Prescribed tangent-projection data.
pub struct TangentData {
    pub model: MetricLieGroupModel,
    pub axes: Axes,
    pub ehat: Vec3,
    pub gauge: Grid<Mat2>,
    pub t: [Grid<Vec2>; 3],
}

impl TangentData {
    pub fn from_surface(s: &SurfaceGrid) -> TangentData {
        TangentData {
            model: s.model.clone(),
            axes: s.axes.clone(),
            ehat: s.ehat,
            gauge: s.gauge.clone(),
            t: [s.t_grid(0), s.t_grid(1), s.t_grid(2)],
        }
    }
}

/// Prescribed angle-function data.
pub struct AngleData {
    pub model: MetricLieGroupModel,
    pub axes: Axes,
    pub ehat: Vec3,
    pub gauge: Grid<Mat2>,
    pub nu: [Grid<f64>; 3],
}

/// Mean-curvature choice for the angle route.
pub enum HChoice {
    /// Take `H = sign * sqrt(ehat1 ehat2 (psi - zeta^2)) / 2` pointwise.
    Sign(f64),
    /// Prescribe the whole field (validated against `psi`).
    Field(Grid<f64>),
}

/// Reconstruct from the tangent projections `T_1, T_2, T_3`.
///
/// The frame matrix is known pointwise, so only the position equation is
/// integrated. Hypotheses checked: column orthonormality, self-adjointness
/// of the induced shape candidate, and the `nabla T_i` equations.
pub fn reconstruct_from_t(
    data: &TangentData,
    q0: ModelPoint,
    opts: &ReconstructionOptions,
) -> Result<Reconstruction> {
    data.axes.check_size(9)?;
    let (m, nus) = build_m_from_t(&data.model, data.ehat, &data.t, opts.orthonormality_tol)?;
    // synthesize a data grid with the shape candidate for the residuals
    let cand_input = surface_from_parts(data, &nus);
    let cand = shape_from_t_nu(&cand_input)?;
    if cand.defect_stats.max > opts.symmetry_tol {
        return Err(Error::precondition(
            "shape candidate self-adjoint",
            format!(
                "defect {:.3e} exceeds tolerance {:.3e}",
                cand.defect_stats.max, opts.symmetry_tol
            ),
        ));
    }
    let mut grid = cand_input;
    let ehat = grid.ehat;
    let a = grid.model.a;
    for (d, s) in grid.data.data.iter_mut().zip(cand.s.data.iter()) {
        // symmetrize: the defect was already checked
        let sym = [
            [s[0][0], 0.5 * (s[0][1] + s[1][0])],
            [0.5 * (s[0][1] + s[1][0]), s[1][1]],
        ];
        d.s = sym;
        d.h = 0.5 * grid_ehat_h(&ehat, &sym);
        let det_s = ehat[0] * ehat[1] * (sym[0][0] * sym[1][1] - sym[0][1] * sym[1][0]);
        d.k = ehat[2] * det_s
            - ehat[0] * ehat[1]
                * (a[0] * d.nu[0] * d.nu[0] + a[1] * d.nu[1] * d.nu[1] + a[2] * d.nu[2] * d.nu[2]);
    }
    let report = crate::surface::compatibility_residuals(&grid)?;
    let mut condition_residuals = Vec::new();
    let mut worst = 0.0f64;
    for (i, st) in report.grad_t.iter().enumerate() {
        condition_residuals.push((format!("grad T_{}", i + 1), *st));
        worst = worst.max(st.max);
    }
    if worst > opts.condition_tol {
        return Err(Error::precondition(
            "compatibility of the T_i derivatives",
            format!("residual {:.3e} exceeds tolerance {:.3e}", worst, opts.condition_tol),
        ));
    }
    let pos = integrate_position(&data.model, &data.axes, &data.gauge, &m, q0, opts.sweep)?;
    let pos_alt = integrate_position(
        &data.model,
        &data.axes,
        &data.gauge,
        &m,
        q0,
        alt_sweep(opts.sweep),
    )?;
    let gap = sup_distance(&pos, &pos_alt);
    Ok(Reconstruction {
        model: data.model.clone(),
        axes: data.axes.clone(),
        positions: if opts.sweep == Sweep::RowFirst { pos } else { pos_alt },
        frame: Some(m),
        diagnostics: Diagnostics {
            orthonormality_defect: 0.0,
            shape_symmetry_defect: cand.defect_stats.max,
            condition_residuals,
            darboux: None,
            path_independence_gap: gap,
            row_tracking_error: 0.0,
        },
    })
}

fn grid_ehat_h(ehat: &Vec3, s: &Mat2) -> f64 {
    ehat[2] * (ehat[0] * s[0][0] + ehat[1] * s[1][1])
}

fn alt_sweep(s: Sweep) -> Sweep {
    match s {
        Sweep::RowFirst => Sweep::ColumnFirst,
        Sweep::ColumnFirst => Sweep::RowFirst,
    }
}

fn sup_distance(a: &Grid<Vec3>, b: &Grid<Vec3>) -> f64 {
    a.data
        .iter()
        .zip(b.data.iter())
        .map(|(p, q)| {
            (0..3).map(|c| (p[c] - q[c]).abs()).fold(0.0f64, f64::max)
        })
        .fold(0.0, f64::max)
}

fn surface_from_parts(data: &TangentData, nus: &[Grid<f64>; 3]) -> SurfaceGrid {
    let nu_pts = data.gauge.nu;
    let nv_pts = data.gauge.nv;
    let fd = Grid::from_fn(nu_pts, nv_pts, |i, j| FundamentalData {
        s: [[0.0; 2]; 2],
        t: [*data.t[0].at(i, j), *data.t[1].at(i, j), *data.t[2].at(i, j)],
        nu: [*nus[0].at(i, j), *nus[1].at(i, j), *nus[2].at(i, j)],
        h: 0.0,
        k: 0.0,
    });
    SurfaceGrid {
        model: data.model.clone(),
        axes: data.axes.clone(),
        ehat: data.ehat,
        gauge: data.gauge.clone(),
        data: fd,
        embedding: None,
    }
}

/// Outcome of the angle route: the reconstruction plus the derived
/// mean-curvature field that realized the requested branch.
pub struct AngleReconstruction {
    pub reconstruction: Reconstruction,
    pub h: Grid<f64>,
    pub t: [Grid<Vec2>; 3],
}

/// Reconstruct from prescribed angle functions and orientation.
///
/// Fails when `psi` vanishes (constant-angle regime) or when the requested
/// branch is inconsistent with `ehat1 ehat2 (psi - zeta^2) >= 0`.
pub fn reconstruct_from_angles(
    data: &AngleData,
    h_choice: HChoice,
    q0: ModelPoint,
    opts: &ReconstructionOptions,
) -> Result<AngleReconstruction> {
    data.axes.check_size(9)?;
    let e = data.model.eps_vec();
    if data.ehat != e {
        return Err(Error::precondition(
            "surface signs match ambient signs",
            "the angle route requires ehat = eps; relabel the chart",
        ));
    }
    let calc = GridCalc::new(&data.axes, &data.gauge, data.ehat);
    let nu_pts = data.gauge.nu;
    let nv_pts = data.gauge.nv;
    // sphere constraint
    let mut worst = 0.0f64;
    for i in 0..nu_pts {
        for j in 0..nv_pts {
            let s: f64 = (0..3)
                .map(|a| e[a] * data.nu[a].at(i, j) * data.nu[a].at(i, j))
                .sum();
            worst = worst.max((s - data.ehat[2]).abs());
        }
    }
    if worst > opts.orthonormality_tol {
        return Err(Error::precondition(
            "sum eps nu^2 = ehat3",
            format!("defect {worst:.3e}"),
        ));
    }
    let grads: Vec<Grid<Vec2>> = (0..3)
        .map(|a| Grid::from_fn(nu_pts, nv_pts, |i, j| calc.grad(&data.nu[a], i, j)))
        .collect();
    let mk_x = |p: usize, q: usize, r: usize| -> Grid<Vec2> {
        Grid::from_fn(nu_pts, nv_pts, |i, j| {
            let jg = calc.jrot(*grads[p].at(i, j));
            let coef = e[q] * e[r];
            let gq = grads[q].at(i, j);
            let gr = grads[r].at(i, j);
            let nq = *data.nu[q].at(i, j);
            let nr = *data.nu[r].at(i, j);
            [jg[0] + coef * (nr * gq[0] - nq * gr[0]), jg[1] + coef * (nr * gq[1] - nq * gr[1])]
        })
    };
    let x = [mk_x(0, 1, 2), mk_x(1, 2, 0), mk_x(2, 0, 1)];
    let c = data.model.c_vec();
    let zeta = Grid::from_fn(nu_pts, nv_pts, |i, j| {
        (0..3).map(|a| c[a] * data.nu[a].at(i, j) * data.nu[a].at(i, j)).sum()
    });
    let psi = Grid::from_fn(nu_pts, nv_pts, |i, j| {
        let mut best_den = 0.0f64;
        let mut best = 0usize;
        for g in 0..3 {
            let den = e[g] - data.ehat[2] * data.nu[g].at(i, j) * data.nu[g].at(i, j);
            if den.abs() > best_den.abs() {
                best_den = den;
                best = g;
            }
        }
        let xg = *x[best].at(i, j);
        calc.finner(xg, xg) / best_den
    });
    let psi_scale = psi.data.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let zeta_scale = zeta.data.iter().fold(0.0f64, |m, z: &f64| m.max(z.abs()));
    let psi_floor = 1e-10 * psi_scale.max(1.0);
    if psi_scale < 1e-12 {
        let reason = if data.ehat[0] * data.ehat[1] < 0.0 && zeta_scale > 1e-8 {
            "psi = 0 with zeta != 0 on a timelike surface: lightlike X fields, not supported"
        } else {
            "psi = 0: constant-angle data describe a coset surface, not recoverable from angles"
        };
        return Err(Error::precondition("psi nonvanishing", reason));
    }
    let s12 = data.ehat[0] * data.ehat[1];
    for i in 0..nu_pts {
        for j in 0..nv_pts {
            let p = *psi.at(i, j);
            if p.abs() < psi_floor {
                return Err(Error::precondition(
                    "psi nonvanishing",
                    format!(
                        "psi vanishes at (u, v) = ({}, {}): constant-angle regime",
                        data.axes.us[i], data.axes.vs[j]
                    ),
                ));
            }
            let h2 = s12 * (p - zeta.at(i, j) * zeta.at(i, j));
            if h2 < -opts.condition_tol {
                return Err(Error::precondition(
                    "branch consistency ehat1 ehat2 (psi - zeta^2) >= 0",
                    format!("value {h2:.3e} at ({}, {})", data.axes.us[i], data.axes.vs[j]),
                ));
            }
        }
    }
    let h = match h_choice {
        HChoice::Sign(sign) => Grid::from_fn(nu_pts, nv_pts, |i, j| {
            let h2 = s12 * (psi.at(i, j) - zeta.at(i, j) * zeta.at(i, j));
            sign.signum() * h2.max(0.0).sqrt() / 2.0
        }),
        HChoice::Field(hg) => {
            let mut worst = 0.0f64;
            for i in 0..nu_pts {
                for j in 0..nv_pts {
                    let want = 4.0 * hg.at(i, j) * hg.at(i, j) * s12
                        + zeta.at(i, j) * zeta.at(i, j);
                    worst = worst.max((want - psi.at(i, j)).abs());
                }
            }
            if worst > opts.condition_tol.max(1e-6) {
                return Err(Error::precondition(
                    "psi = 4 H^2 ehat1 ehat2 + zeta^2",
                    format!("defect {worst:.3e}"),
                ));
            }
            hg
        }
    };
    // T_a = (eps1 eps2 eps3 zeta / psi) X_a + (2 H eps3 / psi) J X_a
    let sgn = e[0] * e[1] * e[2];
    let mk_t = |a: usize| -> Grid<Vec2> {
        Grid::from_fn(nu_pts, nv_pts, |i, j| {
            let xa = *x[a].at(i, j);
            let jx = calc.jrot(xa);
            let p = *psi.at(i, j);
            let ca = sgn * zeta.at(i, j) / p;
            let cb = 2.0 * h.at(i, j) * e[2] / p;
            [ca * xa[0] + cb * jx[0], ca * xa[1] + cb * jx[1]]
        })
    };
    let t = [mk_t(0), mk_t(1), mk_t(2)];
    let tdata = TangentData {
        model: data.model.clone(),
        axes: data.axes.clone(),
        ehat: data.ehat,
        gauge: data.gauge.clone(),
        t: [t[0].clone(), t[1].clone(), t[2].clone()],
    };
    let reconstruction = reconstruct_from_t(&tdata, q0, opts)?;
    Ok(AngleReconstruction { reconstruction, h, t })
}

/// Residual of the angular-companion condition
/// `zeta grad log|H| = grad zeta + sum eps_a mu_a nu_a J X_a`.
/// Nodes with `|H|` below `h_floor` are masked out.
pub struct CompanionReport {
    pub residual: Grid<f64>,
    pub stats: ResidualStats,
    pub masked: usize,
}

pub fn companion_residual(s: &SurfaceGrid, h_floor: f64) -> Result<CompanionReport> {
    s.axes.check_size(9)?;
    let df = crate::surface::derived_fields(s)?;
    let calc = GridCalc::from_surface(s);
    let e = s.model.eps_vec();
    let mu = s.model.mu;
    let log_h = s.data.map(|d| if d.h.abs() > h_floor { d.h.abs().ln() } else { 0.0 });
    let (iu, jv) = calc.interior();
    let mut residual = Grid::fill(s.gauge.nu, s.gauge.nv, 0.0);
    let mut samples = Vec::new();
    let mut masked = 0usize;
    for i in iu {
        for j in jv.clone() {
            let d = s.data.at(i, j);
            if d.h.abs() <= h_floor {
                masked += 1;
                continue;
            }
            // mask when the log-H stencil touches a masked node
            let mut stencil_ok = true;
            for di in -4i64..=4 {
                for dj in -4i64..=4 {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii >= 0
                        && jj >= 0
                        && (ii as usize) < s.gauge.nu
                        && (jj as usize) < s.gauge.nv
                        && (di == 0 || dj == 0)
                        && s.data.at(ii as usize, jj as usize).h.abs() <= h_floor
                    {
                        stencil_ok = false;
                    }
                }
            }
            if !stencil_ok {
                masked += 1;
                continue;
            }
            let glh = calc.grad(&log_h, i, j);
            let gz = calc.grad(&df.zeta, i, j);
            let z = *df.zeta.at(i, j);
            let mut rhs = gz;
            for a in 0..3 {
                let jx = calc.jrot(*df.x[a].at(i, j));
                rhs[0] += e[a] * mu[a] * d.nu[a] * jx[0];
                rhs[1] += e[a] * mu[a] * d.nu[a] * jx[1];
            }
            let res = ((z * glh[0] - rhs[0]).powi(2) + (z * glh[1] - rhs[1]).powi(2)).sqrt();
            *residual.at_mut(i, j) = res;
            samples.push(res);
        }
    }
    Ok(CompanionReport { residual, stats: ResidualStats::from_samples(samples), masked })
}

// ---------------------------------------------------------------------------
// dim-4 route
// ---------------------------------------------------------------------------

/// Prescribed data for the dim-4 fundamental theorem: the shape operator
/// and the tangent projection / angle function of the distinguished Killing
/// direction, together with the intrinsic metric (gauge).
pub struct Dim4Data {
    pub model: MetricLieGroupModel,
    pub axes: Axes,
    /// Surface signs `(ehat1, ehat2, ehat3)`.
    pub ehat: Vec3,
    pub gauge: Grid<Mat2>,
    pub s: Grid<Mat2>,
    /// Frame components of the distinguished tangent projection.
    pub t_d: Grid<Vec2>,
    pub nu_d: Grid<f64>,
}

impl Dim4Data {
    /// Pull the distinguished-direction data out of an extracted grid.
    pub fn from_surface(s: &SurfaceGrid) -> Result<Dim4Data> {
        let d = distinguished_index(&s.model)?;
        Ok(Dim4Data {
            model: s.model.clone(),
            axes: s.axes.clone(),
            ehat: s.ehat,
            gauge: s.gauge.clone(),
            s: s.data.map(|f| f.s),
            t_d: s.t_grid(d),
            nu_d: s.nu_grid(d),
        })
    }
}

/// Index of the distinguished Killing direction: the one whose weighted
/// constant differs from the equal pair (any index for isotropic models
/// with `c3 != 0`).
pub fn distinguished_index(model: &MetricLieGroupModel) -> Result<usize> {
    if let Some(f) = &model.family {
        return Ok(f.killing_index);
    }
    let w = {
        let c = model.c_vec();
        let e = model.eps_vec();
        [e[0] * c[0], e[1] * c[1], e[2] * c[2]]
    };
    if model.iso_dim == 6 && w[2] != 0.0 {
        // isotropic curved case: every direction works; use index 3
        return Ok(2);
    }
    Err(Error::precondition(
        "model admits a distinguished Killing direction",
        format!("iso_dim = {} with c = {:?}", model.iso_dim, model.c_vec()),
    ))
}

/// Cyclic relabeling of a model: `new_i = old_(i+shift mod 3)`.
pub fn rotate_model(model: &MetricLieGroupModel, shift: usize) -> MetricLieGroupModel {
    let c = model.c_vec();
    let e = model.eps.as_vec();
    let idx = |i: usize| (i + shift) % 3;
    let eps = crate::model::Signature {
        eps1: e[idx(0)] as i8,
        eps2: e[idx(1)] as i8,
        eps3: e[idx(2)] as i8,
    };
    crate::model::make_model(
        crate::model::StructureConstants::new(c[idx(0)], c[idx(1)], c[idx(2)]),
        eps,
    )
}

/// Unified coefficients of the five dim-4 compatibility conditions, valid
/// for any presentation with the distinguished direction at index `d`:
///
/// ```text
/// (i)   K = ehat3 det S + P + Q nu^2
/// (ii)  nabla_X SY - nabla_Y SX - S[X,Y] = R nu (<Y,T>X - <X,T>Y)
/// (iii) <T,T> = eps_amb - ehat3 nu^2
/// (iv)  nabla_X T = ehat3 nu S X + W nu J X
/// (v)   grad nu = -S T + V J T
/// ```
#[derive(Debug, Clone, Copy)]
pub struct Dim4Coefficients {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub w: f64,
    pub v: f64,
    pub eps_amb: f64,
}

impl Dim4Coefficients {
    /// From a model with the distinguished direction at index `d` (the two
    /// remaining weighted constants must agree).
    pub fn from_model(model: &MetricLieGroupModel, d: usize, ehat3: f64) -> Result<Dim4Coefficients> {
        let c = model.c_vec();
        let e = model.eps_vec();
        let w = [e[0] * c[0], e[1] * c[1], e[2] * c[2]];
        let (i1, i2) = ((d + 1) % 3, (d + 2) % 3);
        if (w[i1] - w[i2]).abs() > 1e-12 {
            return Err(Error::precondition(
                "equal weighted constants off the Killing direction",
                format!("w = {w:?}, d = {d}"),
            ));
        }
        let prod = e[0] * e[1] * e[2];
        let diff = w[i1] - w[d];
        Ok(Dim4Coefficients {
            p: 0.25 * prod * c[d] * c[d],
            q: prod * ehat3 * diff * c[d],
            r: prod * c[d] * diff,
            w: -0.5 * e[d] * ehat3 * c[d],
            v: -0.5 * e[d] * c[d],
            eps_amb: e[d],
        })
    }

    /// From the `(kappa, tau)` family parameters; continuous at `tau = 0`.
    pub fn from_family(kind: FamilyKind, kappa: f64, tau: f64, ehat3: f64) -> Dim4Coefficients {
        match kind {
            FamilyKind::Ekt => Dim4Coefficients {
                p: tau * tau,
                q: ehat3 * (kappa - 4.0 * tau * tau),
                r: kappa - 4.0 * tau * tau,
                w: -ehat3 * tau,
                v: -tau,
                eps_amb: 1.0,
            },
            FamilyKind::Lkt => Dim4Coefficients {
                p: -tau * tau,
                q: -ehat3 * (kappa + 4.0 * tau * tau),
                r: -(kappa + 4.0 * tau * tau),
                w: -ehat3 * tau,
                v: -tau,
                eps_amb: -1.0,
            },
            FamilyKind::LktHat => Dim4Coefficients {
                p: -tau * tau,
                q: ehat3 * (kappa + 4.0 * tau * tau),
                r: kappa + 4.0 * tau * tau,
                w: -ehat3 * tau,
                v: -tau,
                eps_amb: 1.0,
            },
        }
    }
}

/// Residuals of the five dim-4 conditions on prescribed `(S, T, nu)` data.
#[derive(Debug, Clone)]
pub struct Dim4Report {
    pub gauss: ResidualStats,
    pub codazzi: ResidualStats,
    pub algebraic: ResidualStats,
    pub grad_t: ResidualStats,
    pub grad_nu: ResidualStats,
}

impl Dim4Report {
    pub fn max_overall(&self) -> f64 {
        self.gauss
            .max
            .max(self.codazzi.max)
            .max(self.algebraic.max)
            .max(self.grad_t.max)
            .max(self.grad_nu.max)
    }
}

/// Evaluate the five conditions as residual statistics.
pub fn dim4_residuals(
    coeffs: &Dim4Coefficients,
    axes: &Axes,
    ehat: Vec3,
    gauge: &Grid<Mat2>,
    s: &Grid<Mat2>,
    t_d: &Grid<Vec2>,
    nu_d: &Grid<f64>,
) -> Result<Dim4Report> {
    axes.check_size(9)?;
    let calc = GridCalc::new(axes, gauge, ehat);
    let kint = {
        let p = calc.w12_coord.map(|pq| pq[0]);
        let q = calc.w12_coord.map(|pq| pq[1]);
        Grid::from_fn(gauge.nu, gauge.nv, |i, j| {
            let d = crate::grid::du_at(&q, axes, i, j) - crate::grid::dv_at(&p, axes, i, j);
            ehat[1] * d * crate::linalg::det2(calc.gauge.at(i, j))
        })
    };
    let sx: [[Grid<f64>; 2]; 2] = [
        [s.map(|m| ehat[0] * m[0][0]), s.map(|m| ehat[1] * m[0][1])],
        [s.map(|m| ehat[0] * m[1][0]), s.map(|m| ehat[1] * m[1][1])],
    ];
    let t0 = t_d.map(|t| t[0]);
    let t1 = t_d.map(|t| t[1]);
    let (iu, jv) = calc.interior();
    let mut gauss = Vec::new();
    let mut codazzi = Vec::new();
    let mut algebraic = Vec::new();
    let mut grad_t = Vec::new();
    let mut grad_nu = Vec::new();
    for i in iu {
        for j in jv.clone() {
            let sm = s.at(i, j);
            let t = *t_d.at(i, j);
            let nu = *nu_d.at(i, j);
            let det_s = ehat[0] * ehat[1] * (sm[0][0] * sm[1][1] - sm[0][1] * sm[1][0]);
            gauss.push(kint.at(i, j) - (ehat[2] * det_s + coeffs.p + coeffs.q * nu * nu));
            algebraic.push(calc.finner(t, t) - (coeffs.eps_amb - ehat[2] * nu * nu));
            // (ii) on (e1, e2)
            let n1 = calc.covd(&sx[1][0], &sx[1][1], i, j, 0);
            let n2 = calc.covd(&sx[0][0], &sx[0][1], i, j, 1);
            let w = calc.w12.at(i, j);
            let br = [w[0], ehat[0] * ehat[1] * w[1]];
            let se1 = [*sx[0][0].at(i, j), *sx[0][1].at(i, j)];
            let se2 = [*sx[1][0].at(i, j), *sx[1][1].at(i, j)];
            let sbr = [
                br[0] * se1[0] + br[1] * se2[0],
                br[0] * se1[1] + br[1] * se2[1],
            ];
            // <e1,T> = ehat1 t[0], <e2,T> = ehat2 t[1]
            let rhs = [
                -coeffs.r * nu * ehat[1] * t[1],
                coeffs.r * nu * ehat[0] * t[0],
            ];
            let res = [n1[0] - n2[0] - sbr[0] - rhs[0], n1[1] - n2[1] - sbr[1] - rhs[1]];
            codazzi.push(res[0].abs().max(res[1].abs()));
            // (iv)
            for k in 0..2 {
                let lhs = calc.covd(&t0, &t1, i, j, k);
                let sek = [*sx[k][0].at(i, j), *sx[k][1].at(i, j)];
                let jek = calc.jrot(if k == 0 { [1.0, 0.0] } else { [0.0, 1.0] });
                let rhs = [
                    ehat[2] * nu * sek[0] + coeffs.w * nu * jek[0],
                    ehat[2] * nu * sek[1] + coeffs.w * nu * jek[1],
                ];
                grad_t.push((lhs[0] - rhs[0]).abs().max((lhs[1] - rhs[1]).abs()));
            }
            // (v)
            let gn = calc.grad(nu_d, i, j);
            let st = [
                t[0] * se1[0] + t[1] * se2[0],
                t[0] * se1[1] + t[1] * se2[1],
            ];
            let jt = calc.jrot(t);
            let rhs = [-st[0] + coeffs.v * jt[0], -st[1] + coeffs.v * jt[1]];
            grad_nu.push((gn[0] - rhs[0]).abs().max((gn[1] - rhs[1]).abs()));
        }
    }
    Ok(Dim4Report {
        gauss: ResidualStats::from_samples(gauss),
        codazzi: ResidualStats::from_samples(codazzi),
        algebraic: ResidualStats::from_samples(algebraic),
        grad_t: ResidualStats::from_samples(grad_t),
        grad_nu: ResidualStats::from_samples(grad_nu),
    })
}

/// The Case A / Case B algebraic matrix of the dim-4 frame equation: with
/// the model in the matching presentation and `row` the model index of the
/// distinguished direction (2 for case A, 1 for case B),
/// `L = f * K(T,nu) * T^flat + (w_half/2) * J-block`.
pub fn dim4_l_matrix(
    model: &MetricLieGroupModel,
    row: usize,
    t_amb: Vec2,
    nu: f64,
    k: usize,
    ehat: Vec3,
) -> Mat3 {
    let e = model.eps_vec();
    let c = model.c_vec();
    let w = [e[0] * c[0], e[1] * c[1], e[2] * c[2]];
    let (i1, i2) = ((row + 1) % 3, (row + 2) % 3);
    debug_assert!((w[i1] - w[i2]).abs() < 1e-12);
    // prefactor: case A (row = 2): (e1c1 - e3c3) e1 e2; case B (row = 1):
    // (e1c1 - e2c2) e1 e3; both are (w_pair - w_row) e1 e2 e3 e_row
    let f = (w[i1] - w[row]) * e[0] * e[1] * e[2] * e[row];
    let t1 = t_amb[0];
    let t2 = t_amb[1];
    let first = [
        [0.0, e[1] * nu, -e[2] * t2],
        [-e[0] * nu, 0.0, e[2] * t1],
        [e[0] * t2, -e[1] * t1, 0.0],
    ];
    // T^flat(e_k) = <T, e_k> = ehat_k * frame component
    let tflat = ehat[k] * [t1, t2][k];
    let mut out = mat3_scale(f * tflat, &first);
    let half = 0.5 * e[row] * c[row];
    let (w1, w2) = if k == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
    out[0][2] += half * (-e[0] * w2);
    out[1][2] += half * (e[1] * w1);
    out[2][0] += half * (e[2] * w2);
    out[2][1] += half * (-e[2] * w1);
    out
}

/// Reconstruction through the dim-4 fundamental theorem: build
/// `Theta = Omega + L`, integrate the frame, then the position.
///
/// The model is relabeled cyclically so the distinguished direction sits at
/// the index matching the causal type of the data (case A: surface signs
/// equal the rotated model signs; case B: `ehat3 = -eps3'`). The returned
/// reconstruction carries the relabeled model whose cylinder coordinates
/// the positions live in.
pub fn reconstruct_dim4(
    data: &Dim4Data,
    q0: ModelPoint,
    m0: Option<Mat3>,
    opts: &ReconstructionOptions,
) -> Result<Reconstruction> {
    data.axes.check_size(9)?;
    let d = distinguished_index(&data.model)?;
    // rotate so the distinguished direction is at index 2 (case A form)
    let shift_a = (d + 1) % 3;
    let model_a = rotate_model(&data.model, shift_a);
    let ea = model_a.eps_vec();
    let (model_used, row) = if data.ehat == ea {
        (model_a, 2usize)
    } else if data.ehat[2] == -ea[2] {
        // case B: distinguished direction at index 1
        let model_b = rotate_model(&model_a, 1);
        if data.ehat != model_b.eps_vec() {
            return Err(Error::precondition(
                "surface signs compatible with the family",
                format!("ehat = {:?}, model signs = {:?}", data.ehat, model_b.eps_vec()),
            ));
        }
        (model_b, 1usize)
    } else {
        return Err(Error::precondition(
            "surface signs compatible with the family",
            format!("ehat = {:?}, case-A signs = {ea:?}", data.ehat),
        ));
    };
    // check the five conditions first
    let coeffs = Dim4Coefficients::from_model(&model_used, row, data.ehat[2])?;
    let report = dim4_residuals(
        &coeffs, &data.axes, data.ehat, &data.gauge, &data.s, &data.t_d, &data.nu_d,
    )?;
    let named = [
        ("gauss (i*)", report.gauss),
        ("codazzi (ii*)", report.codazzi),
        ("algebraic (iii*)", report.algebraic),
        ("grad T (iv*)", report.grad_t),
        ("grad nu (v*)", report.grad_nu),
    ];
    for (name, st) in &named {
        if st.max > opts.condition_tol {
            return Err(Error::precondition(
                name,
                format!("residual {:.3e} exceeds tolerance {:.3e}", st.max, opts.condition_tol),
            ));
        }
    }
    // assemble Theta
    let calc = GridCalc::new(&data.axes, &data.gauge, data.ehat);
    let e = model_used.eps_vec();
    let on_e = Grid::from_fn(data.gauge.nu, data.gauge.nv, |i, j| {
        let w12 = calc.w12.at(i, j);
        let sm = data.s.at(i, j);
        let t = *data.t_d.at(i, j);
        // ambient-style components <T, e_i>
        let t_amb = [data.ehat[0] * t[0], data.ehat[1] * t[1]];
        let nu = *data.nu_d.at(i, j);
        [
            mat3_add(
                &omega_matrix(e, w12[0], sm[0]),
                &dim4_l_matrix(&model_used, row, t_amb, nu, 0, data.ehat),
            ),
            mat3_add(
                &omega_matrix(e, w12[1], sm[1]),
                &dim4_l_matrix(&model_used, row, t_amb, nu, 1, data.ehat),
            ),
        ]
    });
    let theta = ThetaField {
        axes: data.axes.clone(),
        ehat: e,
        gauge: data.gauge.clone(),
        on_e,
    };
    let darboux = darboux_residual(&theta)?;
    let diam = {
        let du = data.axes.us.last().unwrap() - data.axes.us[0];
        let dv = data.axes.vs.last().unwrap() - data.axes.vs[0];
        (du * du + dv * dv).sqrt()
    };
    let darboux_ok = darboux.stats.max <= opts.darboux_tol_factor * diam.max(1.0);
    // seed frame: prescribed row completed to SO3^eps
    let m0 = match m0 {
        Some(m) => m,
        None => {
            let t = *data.t_d.at(0, 0);
            let nu = *data.nu_d.at(0, 0);
            let prescribed = [
                e[row] * data.ehat[0] * t[0],
                e[row] * data.ehat[1] * t[1],
                e[row] * nu,
            ];
            complete_frame_rows(e, row, prescribed)?
        }
    };
    let frame = integrate_frame(&theta, &m0, opts.sweep)?;
    // the integrated row must track the prescribed data
    let mut row_err = 0.0f64;
    for i in 0..data.gauge.nu {
        for j in 0..data.gauge.nv {
            let m = frame.m.at(i, j);
            let t = *data.t_d.at(i, j);
            let nu = *data.nu_d.at(i, j);
            let want = [
                e[row] * data.ehat[0] * t[0],
                e[row] * data.ehat[1] * t[1],
                e[row] * nu,
            ];
            for k in 0..3 {
                row_err = row_err.max((m[row][k] - want[k]).abs());
            }
        }
    }
    let positions =
        integrate_position(&model_used, &data.axes, &data.gauge, &frame, q0, opts.sweep)?;
    let pos_alt = integrate_position(
        &model_used,
        &data.axes,
        &data.gauge,
        &frame,
        q0,
        alt_sweep(opts.sweep),
    )?;
    let gap = sup_distance(&positions, &pos_alt);
    let mut condition_residuals: Vec<(String, ResidualStats)> =
        named.iter().map(|(n, s)| (n.to_string(), *s)).collect();
    if !darboux_ok {
        condition_residuals.push(("darboux (exceeded)".to_string(), darboux.stats));
    }
    Ok(Reconstruction {
        model: model_used,
        axes: data.axes.clone(),
        positions,
        frame: Some(frame),
        diagnostics: Diagnostics {
            orthonormality_defect: 0.0,
            shape_symmetry_defect: 0.0,
            condition_residuals,
            darboux: Some(darboux.stats),
            path_independence_gap: gap,
            row_tracking_error: row_err,
        },
    })
}

/// Complete one prescribed eps-orthonormal row of an SO3^eps matrix to a
/// full matrix with determinant 1 (rows `r_a` satisfy
/// `<r_a, r_b>_eps = eps_a delta_ab` and `r_(a+2) = eps_(a+2) r_a x r_(a+1)`).
fn complete_frame_rows(eps: Vec3, row: usize, r: Vec3) -> Result<Mat3> {
    let n = inner_eps(eps, r, r);
    if (n - eps[row]).abs() > 1e-6 {
        return Err(Error::precondition(
            "prescribed frame row eps-unit",
            format!("<r,r> = {n}, want {}", eps[row]),
        ));
    }
    let next = (row + 1) % 3;
    let prev = (row + 2) % 3;
    // find a seed whose Gram-Schmidt complement has the causal type of `next`
    let mut best: Option<(f64, Vec3)> = None;
    for seed in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
        let w = crate::linalg::axpy3(-eps[row] * inner_eps(eps, seed, r), r, seed);
        let q = inner_eps(eps, w, w);
        if q.signum() == eps[next] && q.abs() > best.as_ref().map_or(0.0, |b| b.0) {
            best = Some((q.abs(), w));
        }
    }
    let (_, w) = best.ok_or_else(|| {
        Error::precondition("frame completion", "no seed with the required causal type")
    })?;
    let r_next = normalize_eps(eps, w);
    let r_prev = crate::linalg::scale3(eps[prev], cross_eps(eps, r, r_next));
    let mut m = [[0.0; 3]; 3];
    m[row] = r;
    m[next] = r_next;
    m[prev] = r_prev;
    // the cyclic cross completion already gives det = +1; if rounding ever
    // flips it, negating a single completed row restores the sign while
    // keeping eps-orthonormality
    if crate::linalg::det3(&m) < 0.0 {
        for k in 0..3 {
            m[next][k] = -m[next][k];
        }
    }
    let defect = crate::linalg::so3_eps_defect(eps, &m).max((crate::linalg::det3(&m) - 1.0).abs());
    if defect > 1e-8 {
        return Err(Error::precondition(
            "frame completion in SO3^eps",
            format!("defect {defect:.3e}"),
        ));
    }
    Ok(m)
}

/// Check that two reconstructions from identical intrinsic data differ by
/// the left translation matching their base points: valid on semidirect
/// products (`c3 = 0`), where the group law on the model is explicit:
/// `(p1, p2, p3) * (q1, q2, q3) = (p_xy + A(p3) q_xy, p3 + q3)` with
/// `A(z) = [[c(z), -c1 s(z)], [c2 s(z), c(z)]]`.
pub fn semidirect_translate(model: &MetricLieGroupModel, p: Vec3, q: Vec3) -> Result<Vec3> {
    if model.c_vec()[2] != 0.0 {
        return Err(Error::precondition(
            "explicit group law",
            "only semidirect products (c3 = 0) carry the explicit model group law",
        ));
    }
    let (cz, sz) = model.cs_eval(p[2]);
    let c = model.c_vec();
    Ok([
        p[0] + cz * q[0] - c[0] * sz * q[1],
        p[1] + c[1] * sz * q[0] + cz * q[1],
        p[2] + q[2],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axes;
    use crate::frame::l_matrix;
    use crate::linalg::mat3_max_abs;
    use crate::model::{make_dim4_model, make_model, FamilyKind, Signature, StructureConstants};
    use crate::surface::{extract_fundamental_data, SurfacePatch};

    fn nil3_cylinder_grid(n: usize, span: f64) -> SurfaceGrid {
        let tau = 0.5;
        let m = make_model(StructureConstants::new(0.0, 0.0, 2.0 * tau), Signature::RIEMANNIAN);
        let patch = SurfacePatch::new(m, move |u, v| [u.cos(), u.sin(), v + tau * u])
            .with_jacobian(move |u, _| [[-u.sin(), u.cos(), tau], [0.0, 0.0, 1.0]])
            .with_hessian(move |u, _| {
                let mut h = [[[0.0; 3]; 2]; 2];
                h[0][0] = [-u.cos(), -u.sin(), 0.0];
                h
            });
        let axes = Axes::new(0.0, span, n, 0.0, span, n);
        extract_fundamental_data(&patch, &axes).unwrap()
    }

    #[test]
    fn from_t_roundtrip_on_cylinder() {
        let grid = nil3_cylinder_grid(50, 0.98);
        let data = TangentData::from_surface(&grid);
        let q0 = ModelPoint::from_coords(grid.embedding.as_ref().unwrap().at(0, 0).pos);
        let opts = ReconstructionOptions::for_axes(&grid.axes);
        let rec = reconstruct_from_t(&data, q0, &opts).unwrap();
        let emb = grid.embedding.as_ref().unwrap();
        let mut worst = 0.0f64;
        for i in 0..50 {
            for j in 0..50 {
                let got = rec.positions.at(i, j);
                let want = emb.at(i, j).pos;
                for c in 0..3 {
                    worst = worst.max((got[c] - want[c]).abs());
                }
            }
        }
        assert!(worst < 1e-4, "sup error {worst}");
        assert!(rec.diagnostics.path_independence_gap < 1e-5);
    }

    #[test]
    fn from_t_rejects_perturbed_data() {
        let grid = nil3_cylinder_grid(21, 0.8);
        let mut data = TangentData::from_surface(&grid);
        // 1e-2 noise on T_1 breaks the derivative conditions
        for (idx, t) in data.t[0].data.iter_mut().enumerate() {
            t[0] += 1e-2 * ((idx as f64) * 0.7).sin();
        }
        let q0 = ModelPoint::new(1.0, 0.0, 0.0);
        let opts = ReconstructionOptions::for_axes(&grid.axes);
        let err = reconstruct_from_t(&data, q0, &opts);
        assert!(err.is_err(), "noisy data must be rejected");
    }

    #[test]
    fn left_translation_moves_base_point() {
        // two reconstructions from identical data with different q0 differ
        // by the left translation mapping one base point to the other
        // (semidirect case Sol3: c = (1,-1,0))
        let m = make_model(StructureConstants::new(1.0, -1.0, 0.0), Signature::RIEMANNIAN);
        let patch = SurfacePatch::new(m.clone(), |u, v| [u, v, 0.1 * (u + v)]);
        let axes = Axes::new(0.0, 0.5, 21, 0.0, 0.5, 21);
        let grid = extract_fundamental_data(&patch, &axes).unwrap();
        let data = TangentData::from_surface(&grid);
        let opts = ReconstructionOptions::for_axes(&axes);
        let q0 = ModelPoint::from_coords(grid.embedding.as_ref().unwrap().at(0, 0).pos);
        let q1 = ModelPoint::new(0.3, -0.2, 0.4);
        let rec0 = reconstruct_from_t(&data, q0, &opts).unwrap();
        let rec1 = reconstruct_from_t(&data, q1, &opts).unwrap();
        // g = q1 * q0^{-1} in the semidirect group law; then rec1 = g * rec0
        // compute q0^{-1}: (x,y,z)^{-1} = (-A(-z)(x,y), -z)
        let (cz, sz) = m.cs_eval(-q0.z);
        let c = m.c_vec();
        let inv0 = [
            -(cz * q0.x - c[0] * sz * q0.y),
            -(c[1] * sz * q0.x + cz * q0.y),
            -q0.z,
        ];
        let g = semidirect_translate(&m, q1.coords(), inv0).unwrap();
        let mut worst = 0.0f64;
        for i in 0..21 {
            for j in 0..21 {
                let wanted = semidirect_translate(&m, g, *rec0.positions.at(i, j)).unwrap();
                let got = rec1.positions.at(i, j);
                for k in 0..3 {
                    worst = worst.max((got[k] - wanted[k]).abs());
                }
            }
        }
        assert!(worst < 1e-6, "translation defect {worst}");
    }

    #[test]
    fn dim4_coefficients_family_vs_model() {
        // the c-form and the (kappa,tau)-form agree on all three families
        for (kind, kappa, tau) in [
            (FamilyKind::Ekt, 3.0, 0.7),
            (FamilyKind::Ekt, -1.0, 1.0),
            (FamilyKind::Lkt, 0.0, 1.0),
            (FamilyKind::Lkt, 2.0, 0.5),
            (FamilyKind::LktHat, 1.0, 0.5),
        ] {
            let m = make_dim4_model(kind, kappa, tau).unwrap();
            let d = distinguished_index(&m).unwrap();
            let shift = (d + 1) % 3;
            let rotated = rotate_model(&m, shift);
            for ehat3 in [1.0, -1.0] {
                // only causal types that actually occur
                if kind == FamilyKind::Ekt && ehat3 < 0.0 {
                    continue;
                }
                let a = Dim4Coefficients::from_model(&rotated, 2, ehat3).unwrap();
                let b = Dim4Coefficients::from_family(kind, kappa, tau, ehat3);
                for (x, y) in [
                    (a.p, b.p),
                    (a.q, b.q),
                    (a.r, b.r),
                    (a.w, b.w),
                    (a.v, b.v),
                    (a.eps_amb, b.eps_amb),
                ] {
                    assert!((x - y).abs() < 1e-12, "{kind:?} ehat3={ehat3}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn dim4_l_matches_general_l_case_a() {
        // on extracted Nil3 data the specialized L equals the general L(M)
        let grid = nil3_cylinder_grid(15, 0.8);
        let data = TangentData::from_surface(&grid);
        let (m, _) = build_m_from_t(&grid.model, grid.ehat, &data.t, 1e-8).unwrap();
        let mut worst = 0.0f64;
        for i in 0..15 {
            for j in 0..15 {
                let d = grid.data.at(i, j);
                let t_amb = [grid.ehat[0] * d.t[2][0], grid.ehat[1] * d.t[2][1]];
                for k in 0..2 {
                    let la = dim4_l_matrix(&grid.model, 2, t_amb, d.nu[2], k, grid.ehat);
                    let lg = l_matrix(grid.model.eps_vec(), grid.model.mu, m.m.at(i, j), k);
                    worst = worst.max(mat3_max_abs(&crate::linalg::mat3_sub(&la, &lg)));
                }
            }
        }
        assert!(worst < 1e-12, "worst {worst}");
    }

    #[test]
    fn dim4_l_matches_general_l_case_b() {
        // spacelike patch in Lhat(1, 0.5): rotate to case B and compare the
        // specialized L with the general L(M) built from full data
        let lhat = make_dim4_model(FamilyKind::LktHat, 1.0, 0.5).unwrap();
        // distinguished index 1; case-A rotation shift 2, case-B one more
        let model_b = rotate_model(&rotate_model(&lhat, 2), 1);
        assert_eq!(model_b.eps_vec(), [1.0, 1.0, -1.0]);
        // spacelike graph z = eps(x,y) near the origin in the rotated model
        let patch = SurfacePatch::new(model_b.clone(), |u, v| [u, v, 0.05 * u * v]);
        let axes = Axes::new(-0.2, 0.2, 15, -0.2, 0.2, 15);
        let grid = extract_fundamental_data(&patch, &axes).unwrap();
        assert_eq!(grid.ehat, [1.0, 1.0, -1.0]);
        let data = TangentData::from_surface(&grid);
        let (m, _) = build_m_from_t(&grid.model, grid.ehat, &data.t, 1e-6).unwrap();
        let mut worst = 0.0f64;
        for i in 0..15 {
            for j in 0..15 {
                let d = grid.data.at(i, j);
                let t_amb = [grid.ehat[0] * d.t[1][0], grid.ehat[1] * d.t[1][1]];
                for k in 0..2 {
                    let lb = dim4_l_matrix(&model_b, 1, t_amb, d.nu[1], k, grid.ehat);
                    let lg = l_matrix(model_b.eps_vec(), model_b.mu, m.m.at(i, j), k);
                    worst = worst.max(mat3_max_abs(&crate::linalg::mat3_sub(&lb, &lg)));
                }
            }
        }
        assert!(worst < 1e-12, "worst {worst}");
    }

    #[test]
    fn dim4_roundtrip_nil3_cylinder() {
        let grid = nil3_cylinder_grid(41, 0.8);
        let data = Dim4Data::from_surface(&grid).unwrap();
        let emb = grid.embedding.as_ref().unwrap();
        let q0 = ModelPoint::from_coords(emb.at(0, 0).pos);
        // seed the frame with the extracted one so the roundtrip is exact up
        // to integration error
        let tdata = TangentData::from_surface(&grid);
        let (m_ex, _) = build_m_from_t(&grid.model, grid.ehat, &tdata.t, 1e-8).unwrap();
        let opts = ReconstructionOptions::for_axes(&grid.axes);
        let rec = reconstruct_dim4(&data, q0, Some(*m_ex.m.at(0, 0)), &opts).unwrap();
        let mut worst = 0.0f64;
        for i in 0..41 {
            for j in 0..41 {
                let got = rec.positions.at(i, j);
                let want = emb.at(i, j).pos;
                for c in 0..3 {
                    worst = worst.max((got[c] - want[c]).abs());
                }
            }
        }
        assert!(worst < 5e-4, "sup error {worst}");
        assert!(rec.diagnostics.row_tracking_error < 1e-3);
    }

    #[test]
    fn dim4_rejects_violated_algebraic_condition() {
        // scale T_3 so that <T3,T3> - (eps3 - ehat3 nu3^2) = 0.1
        let grid = nil3_cylinder_grid(41, 0.8);
        let mut data = Dim4Data::from_surface(&grid).unwrap();
        let factor = 1.1f64.sqrt();
        for t in data.t_d.data.iter_mut() {
            t[0] *= factor;
            t[1] *= factor;
        }
        let q0 = ModelPoint::new(1.0, 0.0, 0.0);
        let opts = ReconstructionOptions::for_axes(&grid.axes);
        match reconstruct_dim4(&data, q0, None, &opts) {
            Err(Error::Precondition { condition, .. }) => {
                assert!(condition.contains("iii"), "condition: {condition}");
            }
            other => panic!("expected precondition failure, got ok={}", other.is_ok()),
        }
    }
}
