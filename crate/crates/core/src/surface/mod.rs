//! Parametrized surface patches and extraction of fundamental data.
//!
//! A patch is a chart `(u, v) -> D x R` into the cylinder model of a metric
//! Lie group. Extraction produces, per grid node, the adapted orthonormal
//! frame `{e1, e2, N}` (with `e1` along `phi_u`), the shape operator in
//! frame components, the tangent projections `T_i = E_i - ehat3 nu_i N`,
//! the angle functions `nu_i = <N, E_i>`, and the curvatures `H`, `K`.
//!
//! Sign conventions: `N = ehat3 * (e1 x e2)` so that `{e1, e2, N}` is always
//! positively oriented; the causal types `ehat = (<e1,e1>, <e2,e2>, <N,N>)`
//! form a cyclic permutation of the ambient signs. Timelike surfaces are
//! supported only with `e1` spacelike; a chart whose `phi_u` is timelike or
//! lightlike at a node is rejected there.

mod residuals;

pub use residuals::{
    compatibility_residuals, derived_fields, divergence_identities, intrinsic_curvature,
    omega12_from_gauge, shape_from_t_nu, CompatibilityReport, DerivedFields, GridCalc,
    ShapeCandidate,
};

use crate::error::Error;
use crate::grid::{build_grid_parallel, Axes, Grid};
use crate::linalg::{
    axpy3, cross_eps, inner_eps, mat2_inv, mat3_vec, Mat2, Vec2, Vec3,
};
use crate::model::{MetricLieGroupModel, ModelPoint};
use crate::Result;

/// Tolerance on `|<n,n>| = 1` and frame degeneracy during extraction.
const FRAME_TOL: f64 = 1e-7;

type PosFn = dyn Fn(f64, f64) -> Vec3 + Send + Sync;
type JacFn = dyn Fn(f64, f64) -> [Vec3; 2] + Send + Sync;
type HessFn = dyn Fn(f64, f64) -> [[Vec3; 2]; 2] + Send + Sync;

/// A parametrized surface patch with analytic or finite-difference
/// derivative access.
pub struct SurfacePatch {
    pub model: MetricLieGroupModel,
    pos: Box<PosFn>,
    jac: Option<Box<JacFn>>,
    hess: Option<Box<HessFn>>,
    /// Step for finite-difference position derivatives when no analytic
    /// callbacks are given.
    pub fd_step: f64,
}

impl SurfacePatch {
    pub fn new(
        model: MetricLieGroupModel,
        pos: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
    ) -> SurfacePatch {
        SurfacePatch { model, pos: Box::new(pos), jac: None, hess: None, fd_step: 1e-4 }
    }

    /// Attach analytic first partials `(phi_u, phi_v)`.
    pub fn with_jacobian(
        mut self,
        jac: impl Fn(f64, f64) -> [Vec3; 2] + Send + Sync + 'static,
    ) -> SurfacePatch {
        self.jac = Some(Box::new(jac));
        self
    }

    /// Attach analytic second partials `[[phi_uu, phi_uv], [phi_vu, phi_vv]]`.
    pub fn with_hessian(
        mut self,
        hess: impl Fn(f64, f64) -> [[Vec3; 2]; 2] + Send + Sync + 'static,
    ) -> SurfacePatch {
        self.hess = Some(Box::new(hess));
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> SurfacePatch {
        self.fd_step = h;
        self
    }

    pub fn position(&self, u: f64, v: f64) -> Vec3 {
        (self.pos)(u, v)
    }

    pub fn jacobian(&self, u: f64, v: f64) -> [Vec3; 2] {
        if let Some(jac) = &self.jac {
            return jac(u, v);
        }
        let h = self.fd_step;
        let d = |f: &dyn Fn(f64) -> Vec3| -> Vec3 {
            let (m2, m1, p1, p2) = (f(-2.0 * h), f(-h), f(h), f(2.0 * h));
            let mut out = [0.0; 3];
            for k in 0..3 {
                out[k] = (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * h);
            }
            out
        };
        [d(&|t| (self.pos)(u + t, v)), d(&|t| (self.pos)(u, v + t))]
    }

    pub fn hessian(&self, u: f64, v: f64) -> [[Vec3; 2]; 2] {
        if let Some(hess) = &self.hess {
            return hess(u, v);
        }
        let h = self.fd_step;
        let second = |f: &dyn Fn(f64) -> Vec3| -> Vec3 {
            let (m2, m1, p0, p1, p2) =
                (f(-2.0 * h), f(-h), f(0.0), f(h), f(2.0 * h));
            let mut out = [0.0; 3];
            for k in 0..3 {
                out[k] = (-m2[k] + 16.0 * m1[k] - 30.0 * p0[k] + 16.0 * p1[k] - p2[k])
                    / (12.0 * h * h);
            }
            out
        };
        let uu = second(&|t| (self.pos)(u + t, v));
        let vv = second(&|t| (self.pos)(u, v + t));
        // mixed partial: 4th-order cross stencil on phi_v along u
        let dv_at = |uu: f64| -> Vec3 {
            let f = |t: f64| (self.pos)(uu, v + t);
            let (m2, m1, p1, p2) = (f(-2.0 * h), f(-h), f(h), f(2.0 * h));
            let mut out = [0.0; 3];
            for k in 0..3 {
                out[k] = (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * h);
            }
            out
        };
        let (m2, m1, p1, p2) = (dv_at(u - 2.0 * h), dv_at(u - h), dv_at(u + h), dv_at(u + 2.0 * h));
        let mut uv = [0.0; 3];
        for k in 0..3 {
            uv[k] = (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * h);
        }
        [[uu, uv], [uv, vv]]
    }
}

/// Fundamental data of the immersion at one grid node, in the adapted frame.
#[derive(Debug, Clone, Copy)]
pub struct FundamentalData {
    /// `<S e_k, e_l>` (self-adjointness means symmetry of this matrix).
    pub s: Mat2,
    /// Frame components of the tangent projections `T_1, T_2, T_3`.
    pub t: [Vec2; 3],
    /// Angle functions `nu_i = <N, E_i>`.
    pub nu: Vec3,
    /// Mean curvature `H = (ehat3/2)(ehat1 <Se1,e1> + ehat2 <Se2,e2>)`.
    pub h: f64,
    /// Gauss curvature through the Gauss equation.
    pub k: f64,
}

/// Ambient embedding data kept alongside the fundamental data when the grid
/// comes from an actual patch.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingData {
    pub pos: Vec3,
    /// Adapted frame in ambient frame components.
    pub e1: Vec3,
    pub e2: Vec3,
    pub n: Vec3,
    /// First fundamental form in chart coordinates.
    pub first_ff: Mat2,
}

/// Extracted (or prescribed) surface data over a rectangular grid.
pub struct SurfaceGrid {
    pub model: MetricLieGroupModel,
    pub axes: Axes,
    /// Causal types `(ehat1, ehat2, ehat3)`, constant over the grid.
    pub ehat: Vec3,
    /// Chart gauge per node: `e_k = gauge[0][k] d_u + gauge[1][k] d_v`.
    pub gauge: Grid<Mat2>,
    pub data: Grid<FundamentalData>,
    pub embedding: Option<Grid<EmbeddingData>>,
}

/// Everything extracted at a single point.
#[derive(Debug, Clone, Copy)]
pub struct PointData {
    pub ehat: Vec3,
    pub gauge: Mat2,
    pub fundamental: FundamentalData,
    pub embedding: EmbeddingData,
}

/// First fundamental form of the patch at `(u, v)`, in chart coordinates.
pub fn first_fundamental_form(patch: &SurfacePatch, u: f64, v: f64) -> Result<Mat2> {
    let p = ModelPoint::from_coords(patch.position(u, v));
    let bi = patch.model.frame_b_inv(p)?;
    let jac = patch.jacobian(u, v);
    let au = mat3_vec(&bi, jac[0]);
    let av = mat3_vec(&bi, jac[1]);
    let e = patch.model.eps_vec();
    let g = [
        [inner_eps(e, au, au), inner_eps(e, au, av)],
        [inner_eps(e, av, au), inner_eps(e, av, av)],
    ];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if det.abs() < FRAME_TOL {
        return Err(Error::Degenerate { u, v, what: format!("det I = {det:.3e}") });
    }
    Ok(g)
}

/// Adapted frame `(e1, e2, N, ehat)` at `(u, v)`, in ambient frame
/// components. `e1` is the normalized `phi_u`, `e2` the orthonormal
/// completion of `phi_v`, and `N = ehat3 (e1 x e2)`.
pub fn adapted_frame(patch: &SurfacePatch, u: f64, v: f64) -> Result<(Vec3, Vec3, Vec3, Vec3)> {
    let p = ModelPoint::from_coords(patch.position(u, v));
    let bi = patch.model.frame_b_inv(p)?;
    let jac = patch.jacobian(u, v);
    let au = mat3_vec(&bi, jac[0]);
    let av = mat3_vec(&bi, jac[1]);
    adapted_frame_from(&patch.model, au, av, u, v)
}

fn adapted_frame_from(
    model: &MetricLieGroupModel,
    au: Vec3,
    av: Vec3,
    u: f64,
    v: f64,
) -> Result<(Vec3, Vec3, Vec3, Vec3)> {
    let e = model.eps_vec();
    let n1 = inner_eps(e, au, au);
    if n1.abs() < FRAME_TOL {
        return Err(Error::Degenerate { u, v, what: "phi_u lightlike".into() });
    }
    if n1 < 0.0 {
        return Err(Error::Degenerate {
            u,
            v,
            what: "phi_u timelike; only charts with spacelike e1 are supported".into(),
        });
    }
    let eh1 = 1.0;
    let e1 = crate::linalg::scale3(1.0 / n1.sqrt(), au);
    let w = axpy3(-eh1 * inner_eps(e, av, e1), e1, av);
    let n2 = inner_eps(e, w, w);
    if n2.abs() < FRAME_TOL {
        return Err(Error::Degenerate { u, v, what: "tangent plane degenerate".into() });
    }
    let eh2 = n2.signum();
    let e2 = crate::linalg::scale3(1.0 / n2.abs().sqrt(), w);
    let nt = cross_eps(e, e1, e2);
    let q = inner_eps(e, nt, nt);
    if (q.abs() - 1.0).abs() > 1e-6 {
        return Err(Error::Degenerate { u, v, what: format!("|<n,n>| = {} != 1", q.abs()) });
    }
    let eh3 = q.signum();
    let n = crate::linalg::scale3(eh3, nt);
    let ehat = [eh1, eh2, eh3];
    // ehat must be a cyclic permutation of eps
    let cyclic = (0..3).any(|r| (0..3).all(|i| ehat[i] == e[(i + r) % 3]));
    if !cyclic {
        return Err(Error::Degenerate {
            u,
            v,
            what: format!("causal types {ehat:?} not a cyclic permutation of {e:?}"),
        });
    }
    Ok((e1, e2, n, ehat))
}

/// Full pointwise extraction at `(u, v)`.
pub fn extract_point(patch: &SurfacePatch, u: f64, v: f64) -> Result<PointData> {
    let model = &patch.model;
    let e = model.eps_vec();
    let pos = patch.position(u, v);
    if pos.iter().any(|x| !x.is_finite()) {
        return Err(Error::Data(format!("non-finite position at ({u}, {v})")));
    }
    let p = ModelPoint::from_coords(pos);
    let bi = model.frame_b_inv(p)?;
    let jac = patch.jacobian(u, v);
    let au = mat3_vec(&bi, jac[0]);
    let av = mat3_vec(&bi, jac[1]);
    let (e1, e2, n, ehat) = adapted_frame_from(model, au, av, u, v)?;

    let g = [
        [inner_eps(e, au, au), inner_eps(e, au, av)],
        [inner_eps(e, av, au), inner_eps(e, av, av)],
    ];
    // gauge: e_k = C[0][k] d_u + C[1][k] d_v, C = P^{-1} with
    // P[k][m] = ehat_k <phi_m, e_k>
    let frames = [e1, e2];
    let mut pmat = [[0.0; 2]; 2];
    for k in 0..2 {
        for (m, a) in [au, av].iter().enumerate() {
            pmat[k][m] = ehat[k] * inner_eps(e, *a, frames[k]);
        }
    }
    let gauge = mat2_inv(&pmat);

    // second fundamental form h_ij = <nabla_{d_i} phi_j, N>
    let hess = patch.hessian(u, v);
    let mut hmat = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let cov = ambient_cov_deriv(model, p, jac[i], jac[j], hess[i][j])?;
            hmat[i][j] = inner_eps(e, cov, n);
        }
    }
    // shape operator in chart coordinates: S = G^{-1} h
    let ginv = mat2_inv(&g);
    let scoord = crate::linalg::mat2_mul(&ginv, &hmat);
    // frame components <S e_k, e_l>
    let mut s = [[0.0; 2]; 2];
    for k in 0..2 {
        let ck = [gauge[0][k], gauge[1][k]];
        let sck = crate::linalg::mat2_vec(&scoord, ck);
        let samb = axpy3(sck[0], au, crate::linalg::scale3(sck[1], av));
        for l in 0..2 {
            s[k][l] = inner_eps(e, samb, frames[l]);
        }
    }
    let nu = [e[0] * n[0], e[1] * n[1], e[2] * n[2]];
    let mut t = [[0.0; 2]; 3];
    for i in 0..3 {
        for k in 0..2 {
            t[i][k] = ehat[k] * e[i] * frames[k][i];
        }
    }
    let h = 0.5 * ehat[2] * (ehat[0] * s[0][0] + ehat[1] * s[1][1]);
    let det_s = ehat[0] * ehat[1] * (s[0][0] * s[1][1] - s[0][1] * s[1][0]);
    let a = model.a;
    let k_gauss = ehat[2] * det_s
        - ehat[0] * ehat[1] * (a[0] * nu[0] * nu[0] + a[1] * nu[1] * nu[1] + a[2] * nu[2] * nu[2]);
    Ok(PointData {
        ehat,
        gauge,
        fundamental: FundamentalData { s, t, nu, h, k: k_gauss },
        embedding: EmbeddingData { pos, e1, e2, n, first_ff: g },
    })
}

/// Wrap a stored position grid as a patch: position lookups snap to the
/// nearest node and derivatives are grid finite differences at the stored
/// spacing. Extraction over the same axes is then interpolation-free.
pub fn sampled_patch(
    model: &MetricLieGroupModel,
    axes: &Axes,
    positions: Grid<Vec3>,
) -> Result<SurfacePatch> {
    axes.check_size(5)?;
    let grid = std::sync::Arc::new(positions);
    let (u0, hu) = (axes.us[0], axes.hu());
    let (v0, hv) = (axes.vs[0], axes.hv());
    let (nu, nv) = (axes.us.len(), axes.vs.len());
    let node = move |u: f64, v: f64| -> (usize, usize) {
        let i = (((u - u0) / hu).round() as isize).clamp(0, nu as isize - 1) as usize;
        let j = (((v - v0) / hv).round() as isize).clamp(0, nv as isize - 1) as usize;
        (i, j)
    };
    let g_pos = grid.clone();
    let pos = move |u: f64, v: f64| -> Vec3 {
        let (i, j) = node(u, v);
        *g_pos.at(i, j)
    };
    let g_jac = grid.clone();
    let jac = move |u: f64, v: f64| -> [Vec3; 2] {
        let (i, j) = node(u, v);
        let mut out = [[0.0; 3]; 2];
        for k in 0..3 {
            out[0][k] = crate::grid::d1_line(&|t| g_jac.at(t, j)[k], nu, i, hu);
            out[1][k] = crate::grid::d1_line(&|t| g_jac.at(i, t)[k], nv, j, hv);
        }
        out
    };
    let g_hess = grid;
    let hess = move |u: f64, v: f64| -> [[Vec3; 2]; 2] {
        let (i, j) = node(u, v);
        let mut out = [[[0.0; 3]; 2]; 2];
        for k in 0..3 {
            out[0][0][k] = crate::grid::d2_line(&|t| g_hess.at(t, j)[k], nu, i, hu);
            out[1][1][k] = crate::grid::d2_line(&|t| g_hess.at(i, t)[k], nv, j, hv);
            let dv_at = |ii: usize| -> f64 {
                crate::grid::d1_line(&|t| g_hess.at(ii, t)[k], nv, j, hv)
            };
            let uv = crate::grid::d1_line(&dv_at, nu, i, hu);
            out[0][1][k] = uv;
            out[1][0][k] = uv;
        }
        out
    };
    Ok(SurfacePatch::new(model.clone(), pos)
        .with_jacobian(jac)
        .with_hessian(hess))
}

/// Ambient covariant derivative `nabla_X W` along the surface, in frame
/// components. `x`, `w` are coordinate vectors at `p` and `dw` is the
/// coordinate derivative of `W` along `X`.
pub fn ambient_cov_deriv(
    model: &MetricLieGroupModel,
    p: ModelPoint,
    x: Vec3,
    w: Vec3,
    dw: Vec3,
) -> Result<Vec3> {
    let bi = model.frame_b_inv(p)?;
    let dbi = model.frame_b_inv_d(p, x)?;
    let x_f = mat3_vec(&bi, x);
    let w_f = mat3_vec(&bi, w);
    let dw_f = crate::linalg::add3(mat3_vec(&dbi, w), mat3_vec(&bi, dw));
    Ok(model.connection_apply(x_f, w_f, dw_f))
}

/// Extract fundamental data over a grid. The causal type must be constant
/// across the grid.
pub fn extract_fundamental_data(patch: &SurfacePatch, axes: &Axes) -> Result<SurfaceGrid> {
    axes.check_size(5)?;
    let nu = axes.us.len();
    let nv = axes.vs.len();
    let pts = build_grid_parallel(nu, nv, |i, j| extract_point(patch, axes.us[i], axes.vs[j]))?;
    let ehat = pts.at(0, 0).ehat;
    for i in 0..nu {
        for j in 0..nv {
            if pts.at(i, j).ehat != ehat {
                return Err(Error::Degenerate {
                    u: axes.us[i],
                    v: axes.vs[j],
                    what: "causal type changes across the grid".into(),
                });
            }
        }
    }
    Ok(SurfaceGrid {
        model: patch.model.clone(),
        axes: axes.clone(),
        ehat,
        gauge: pts.map(|p| p.gauge),
        data: pts.map(|p| p.fundamental),
        embedding: Some(pts.map(|p| p.embedding)),
    })
}

impl SurfaceGrid {
    pub fn nu_grid(&self, i: usize) -> Grid<f64> {
        self.data.map(|d| d.nu[i])
    }

    pub fn t_grid(&self, i: usize) -> Grid<Vec2> {
        self.data.map(|d| d.t[i])
    }

    pub fn h_grid(&self) -> Grid<f64> {
        self.data.map(|d| d.h)
    }

    /// Frame inner product of tangent vectors in frame components.
    pub fn finner(&self, a: Vec2, b: Vec2) -> f64 {
        self.ehat[0] * a[0] * b[0] + self.ehat[1] * a[1] * b[1]
    }

    /// Rotation `J` on frame components: `J e1 = ehat2 e2`, `J e2 = -ehat1 e1`.
    pub fn jrot(&self, a: Vec2) -> Vec2 {
        [-self.ehat[0] * a[1], self.ehat[1] * a[0]]
    }

    /// Relative spread of H over the grid (CMC detector); absolute spread
    /// for near-minimal surfaces where the mean is itself numerical noise.
    pub fn cmc_spread(&self) -> f64 {
        let n = self.data.data.len() as f64;
        let mean: f64 = self.data.data.iter().map(|d| d.h).sum::<f64>() / n;
        let var: f64 =
            self.data.data.iter().map(|d| (d.h - mean) * (d.h - mean)).sum::<f64>() / n;
        if mean.abs() < 1e-9 {
            var.sqrt()
        } else {
            var.sqrt() / mean.abs()
        }
    }

    pub fn mean_h(&self) -> f64 {
        self.data.data.iter().map(|d| d.h).sum::<f64>() / self.data.data.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_model, Signature, StructureConstants};

    fn r3() -> MetricLieGroupModel {
        make_model(StructureConstants::new(0.0, 0.0, 0.0), Signature::RIEMANNIAN)
    }

    fn nil3(tau: f64) -> MetricLieGroupModel {
        make_model(StructureConstants::new(0.0, 0.0, 2.0 * tau), Signature::RIEMANNIAN)
    }

    /// The z = 0 plane in R^3.
    fn plane_patch() -> SurfacePatch {
        SurfacePatch::new(r3(), |u, v| [u, v, 0.0])
            .with_jacobian(|_, _| [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
            .with_hessian(|_, _| [[[0.0; 3]; 2]; 2])
    }

    /// Unit-speed vertical cylinder over the unit circle in Nil3.
    fn nil3_cylinder(tau: f64) -> SurfacePatch {
        SurfacePatch::new(nil3(tau), move |u, v| [u.cos(), u.sin(), v + tau * u])
            .with_jacobian(move |u, _| {
                [[-u.sin(), u.cos(), tau], [0.0, 0.0, 1.0]]
            })
            .with_hessian(move |u, _| {
                let mut h = [[[0.0; 3]; 2]; 2];
                h[0][0] = [-u.cos(), -u.sin(), 0.0];
                h
            })
    }

    #[test]
    fn plane_first_fundamental_form_is_identity() {
        let g = first_fundamental_form(&plane_patch(), 0.3, -0.2).unwrap();
        assert!((g[0][0] - 1.0).abs() < 1e-15 && (g[1][1] - 1.0).abs() < 1e-15);
        assert!(g[0][1].abs() < 1e-15);
    }

    #[test]
    fn nil3_cylinder_metric_is_flat() {
        let g = first_fundamental_form(&nil3_cylinder(0.5), 0.4, 0.1).unwrap();
        assert!((g[0][0] - 1.0).abs() < 1e-12);
        assert!((g[1][1] - 1.0).abs() < 1e-12);
        assert!(g[0][1].abs() < 1e-12);
    }

    #[test]
    fn ekt_cylinder_conformal_factor() {
        // E(-1, 1) cylinder of radius 1: induced metric 16/9 (du^2 + dv^2)
        let (kappa, tau, r) = (-1.0f64, 1.0f64, 1.0f64);
        let m = make_model(
            StructureConstants::new(kappa / (2.0 * tau), kappa / (2.0 * tau), 2.0 * tau),
            Signature::RIEMANNIAN,
        );
        let c = 4.0 * r / (4.0 + kappa * r * r);
        let patch = SurfacePatch::new(m, move |u, v| {
            [r * u.cos(), r * u.sin(), c * (v + tau * r * u)]
        });
        let g = first_fundamental_form(&patch, 0.3, 0.2).unwrap();
        assert!((g[0][0] - 16.0 / 9.0).abs() < 1e-9, "{}", g[0][0]);
        assert!((g[1][1] - 16.0 / 9.0).abs() < 1e-9);
        assert!(g[0][1].abs() < 1e-9);
    }

    #[test]
    fn plane_adapted_frame() {
        let (e1, e2, n, ehat) = adapted_frame(&plane_patch(), 0.0, 0.0).unwrap();
        assert_eq!(e1, [1.0, 0.0, 0.0]);
        assert_eq!(e2, [0.0, 1.0, 0.0]);
        assert_eq!(n, [0.0, 0.0, 1.0]);
        assert_eq!(ehat, [1.0, 1.0, 1.0]);
    }

    #[test]
    fn lorentz_plane_frames() {
        let l3 = make_model(StructureConstants::new(0.0, 0.0, 0.0), Signature::LORENTZIAN);
        // spacelike graph z = 0: N = E3 timelike
        let p = SurfacePatch::new(l3.clone(), |u, v| [u, v, 0.0]);
        let (_, _, n, ehat) = adapted_frame(&p, 0.1, 0.2).unwrap();
        assert_eq!(ehat, [1.0, 1.0, -1.0]);
        assert_eq!(n, [0.0, 0.0, 1.0]);
        // timelike plane y = 0 (chart (u,v) -> (u, 0, v)): ehat = (1,-1,1)
        let q = SurfacePatch::new(l3.clone(), |u, v| [u, 0.0, v]);
        let (_, _, _, ehat) = adapted_frame(&q, 0.0, 0.0).unwrap();
        assert_eq!(ehat, [1.0, -1.0, 1.0]);
        // chart with timelike phi_u is rejected
        let bad = SurfacePatch::new(l3, |u, v| [v, 0.0, u]);
        assert!(adapted_frame(&bad, 0.0, 0.0).is_err());
    }

    #[test]
    fn plane_extraction_values() {
        let d = extract_point(&plane_patch(), 0.3, 0.7).unwrap();
        let f = d.fundamental;
        assert!(f.s.iter().flatten().all(|x| x.abs() < 1e-14));
        assert_eq!(f.nu, [0.0, 0.0, 1.0]);
        assert!(f.t[2][0].abs() < 1e-15 && f.t[2][1].abs() < 1e-15);
        assert!(f.h.abs() < 1e-15 && f.k.abs() < 1e-15);
    }

    #[test]
    fn nil3_cylinder_mean_curvature() {
        // tau = 1/2, r = 1: H = (-4 + kappa r^2)/(8r) = -1/2 with kappa = 0
        let d = extract_point(&nil3_cylinder(0.5), 0.3, 0.2).unwrap();
        assert!((d.fundamental.h + 0.5).abs() < 1e-12, "H = {}", d.fundamental.h);
        assert!(d.fundamental.nu[2].abs() < 1e-14);
    }

    #[test]
    fn sphere_extraction_inner_normal() {
        // chart ordered so the inner normal comes out: S = id, H = 1, K = 1
        let patch = SurfacePatch::new(r3(), |u, v| {
            [v.sin() * u.cos(), v.sin() * u.sin(), v.cos()]
        })
        .with_fd_step(1e-4);
        let d = extract_point(&patch, 0.4, 1.1).unwrap();
        let f = d.fundamental;
        assert!((f.s[0][0] - 1.0).abs() < 1e-6 && (f.s[1][1] - 1.0).abs() < 1e-6);
        assert!(f.s[0][1].abs() < 1e-6);
        assert!((f.h - 1.0).abs() < 1e-6, "H = {}", f.h);
        assert!((f.k - 1.0).abs() < 1e-6);
        // nu = -position for the inner normal
        let pos = d.embedding.pos;
        for i in 0..3 {
            assert!((f.nu[i] + pos[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn algebraic_relations_hold_pointwise() {
        // sum eps nu^2 = ehat3, <T_i,T_j> = eps_i delta - ehat3 nu_i nu_j,
        // sum eps nu T = 0 on a generic patch in a generic model
        let m = make_model(StructureConstants::new(1.1, -0.4, 0.6), Signature::RIEMANNIAN);
        let patch = SurfacePatch::new(m, |u, v| {
            [0.3 * u + 0.1 * (v as f64).sin(), v, 0.2 * (u * v).cos()]
        });
        let d = extract_point(&patch, 0.25, -0.4).unwrap();
        let f = d.fundamental;
        let e = [1.0, 1.0, 1.0];
        let eh = d.ehat;
        let sum_nu: f64 = (0..3).map(|i| e[i] * f.nu[i] * f.nu[i]).sum();
        assert!((sum_nu - eh[2]).abs() < 1e-12);
        for i in 0..3 {
            for j in 0..3 {
                let tij = eh[0] * f.t[i][0] * f.t[j][0] + eh[1] * f.t[i][1] * f.t[j][1];
                let want = e[i] * if i == j { 1.0 } else { 0.0 } - eh[2] * f.nu[i] * f.nu[j];
                assert!((tij - want).abs() < 1e-12, "i={i} j={j}");
            }
        }
        for k in 0..2 {
            let s: f64 = (0..3).map(|i| e[i] * f.nu[i] * f.t[i][k]).sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn fd_jacobian_matches_analytic() {
        let with = nil3_cylinder(0.5);
        let without = SurfacePatch::new(nil3(0.5), |u, v| [u.cos(), u.sin(), v + 0.5 * u]);
        let ja = with.jacobian(0.7, 0.2);
        let jf = without.jacobian(0.7, 0.2);
        for d in 0..2 {
            for k in 0..3 {
                assert!((ja[d][k] - jf[d][k]).abs() < 1e-10);
            }
        }
        let ha = with.hessian(0.7, 0.2);
        let hf = without.hessian(0.7, 0.2);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..3 {
                    assert!((ha[i][j][k] - hf[i][j][k]).abs() < 1e-7);
                }
            }
        }
    }
}
