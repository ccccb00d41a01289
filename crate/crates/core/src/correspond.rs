//! Lawson/Daniel-type isometric deformations of fundamental data.
//!
//! In the two-parameter families, rotating the traceless shape operator by
//! a constant phase angle while keeping `J` and the distinguished angle
//! function sends the fundamental data of a CMC immersion to the data of
//! another CMC immersion in a (possibly different) member of the family:
//!
//! ```text
//! (S~, J~, T~, nu~) = (ehat3 H~ id + Rot_theta (S - ehat3 H id), J, Rot_theta T, nu)
//! ```
//!
//! with `(ehat3 H~, tau~)` the trigonometric (spacelike) or hyperbolic
//! (timelike) rotation of `(ehat3 H, tau)`, and the target curvature fixed
//! by the family invariant: `kappa - 4 tau^2` in the Riemannian family,
//! `kappa + 4 tau^2` in the two Lorentzian ones.

use crate::error::Error;
use crate::grid::{Axes, Grid};
use crate::linalg::{Mat2, Vec2, Vec3};
use crate::model::{make_dim4_model, Family, FamilyKind, MetricLieGroupModel};
use crate::reconstruct::{dim4_residuals, distinguished_index, Dim4Coefficients, Dim4Data, Dim4Report};
use crate::surface::SurfaceGrid;
use crate::Result;

/// Relative CMC tolerance: `stddev(H)/mean(|H|)`.
pub const CMC_TOL: f64 = 1e-6;

/// Parameters of one correspondence instance.
#[derive(Debug, Clone, Copy)]
pub struct CorrespondenceParams {
    pub theta: f64,
    /// `true` for the trigonometric rotation (spacelike surface), `false`
    /// for the hyperbolic one (timelike surface).
    pub trig: bool,
    pub source_kind: FamilyKind,
    pub source: (f64, f64, f64),
    /// Target `(kappa~, tau~, H~)`.
    pub target: (f64, f64, f64),
    pub ehat3: f64,
}

/// `Rot_theta` applied to a tangent vector in frame components:
/// `cos(theta) id + sin(theta) J` (trig) or `cosh + sinh J` (hyperbolic).
pub fn rot_theta(v: Vec2, theta: f64, ehat: Vec3, trig: bool) -> Vec2 {
    let (a, b) = if trig { (theta.cos(), theta.sin()) } else { (theta.cosh(), theta.sinh()) };
    let jv = [-ehat[0] * v[1], ehat[1] * v[0]];
    [a * v[0] + b * jv[0], a * v[1] + b * jv[1]]
}

/// The rotated pair `(H~, tau~)` of the correspondence:
/// trig: `eps H~ = eps H cos(theta) + tau sin(theta)`,
/// `tau~ = -eps H sin(theta) + tau cos(theta)`;
/// hyperbolic: `eps H~ = eps H cosh(theta) - tau sinh(theta)`,
/// `tau~ = -eps H sinh(theta) + tau cosh(theta)`.
pub fn lawson_params(h: f64, tau: f64, theta: f64, eps: f64, trig: bool) -> (f64, f64) {
    if trig {
        let (c, s) = (theta.cos(), theta.sin());
        let eh = eps * h * c + tau * s;
        let tt = -eps * h * s + tau * c;
        (eps * eh, tt)
    } else {
        let (c, s) = (theta.cosh(), theta.sinh());
        let eh = eps * h * c - tau * s;
        let tt = -eps * h * s + tau * c;
        (eps * eh, tt)
    }
}

/// Where the transformed data lives.
pub enum TargetSpace {
    Model(MetricLieGroupModel),
    /// `tau~ = 0`: product-limit space; only residual checks apply.
    ProductLimit { kind: FamilyKind, kappa: f64 },
}

/// Transformed dim-4 data, ready for residual checks or reconstruction.
pub struct DanielTarget {
    pub params: CorrespondenceParams,
    pub axes: Axes,
    pub ehat: Vec3,
    pub gauge: Grid<Mat2>,
    pub s: Grid<Mat2>,
    pub t_d: Grid<Vec2>,
    pub nu_d: Grid<f64>,
    pub target: TargetSpace,
}

impl DanielTarget {
    /// Residuals of the five dim-4 conditions in the target family.
    pub fn verify(&self) -> Result<Dim4Report> {
        let (kind, kappa, tau) = match &self.target {
            TargetSpace::Model(_) => {
                (self.params.source_kind, self.params.target.0, self.params.target.1)
            }
            TargetSpace::ProductLimit { kind, kappa } => (*kind, *kappa, 0.0),
        };
        let coeffs = Dim4Coefficients::from_family(kind, kappa, tau, self.ehat[2]);
        dim4_residuals(&coeffs, &self.axes, self.ehat, &self.gauge, &self.s, &self.t_d, &self.nu_d)
    }

    /// The transformed data as reconstruction input (fails at `tau~ = 0`).
    pub fn dim4_data(&self) -> Result<Dim4Data> {
        match &self.target {
            TargetSpace::Model(m) => Ok(Dim4Data {
                model: m.clone(),
                axes: self.axes.clone(),
                ehat: self.ehat,
                gauge: self.gauge.clone(),
                s: self.s.clone(),
                t_d: self.t_d.clone(),
                nu_d: self.nu_d.clone(),
            }),
            TargetSpace::ProductLimit { .. } => Err(Error::ProductLimit),
        }
    }
}

/// Family data of the source model, accepting the isotropic `iso_dim = 6`
/// members (round spheres and their Lorentzian analogues) where every
/// direction is a unit Killing field.
pub fn family_of(model: &MetricLieGroupModel) -> Result<Family> {
    if let Some(f) = model.family {
        return Ok(f);
    }
    let c = model.c_vec();
    let e = model.eps_vec();
    let w = [e[0] * c[0], e[1] * c[1], e[2] * c[2]];
    if model.iso_dim == 6 && w[0] == w[1] && w[1] == w[2] && c[2] != 0.0 {
        let tau = e[2] * c[2] / 2.0;
        let kappa = c[0] * c[2];
        let kind = if model.eps.is_riemannian() { FamilyKind::Ekt } else { FamilyKind::Lkt };
        return Ok(Family { kind, kappa, tau, killing_index: 2 });
    }
    Err(Error::precondition(
        "source model in a two-parameter family",
        format!("c = {:?}, iso_dim = {}", model.c_vec(), model.iso_dim),
    ))
}

/// Apply the correspondence with phase `theta` to a CMC data grid.
///
/// The grid must be CMC (relative spread below [`CMC_TOL`]) and extracted
/// from a family member. Returns the transformed `(S~, T~, nu~)` plus the
/// target parameters.
pub fn daniel_transform(grid: &SurfaceGrid, theta: f64) -> Result<DanielTarget> {
    let fam = family_of(&grid.model)?;
    let spread = grid.cmc_spread();
    if spread > CMC_TOL {
        return Err(Error::precondition(
            "constant mean curvature",
            format!("relative H spread {spread:.3e} exceeds {CMC_TOL:.1e}"),
        ));
    }
    let h = grid.mean_h();
    let ehat = grid.ehat;
    let trig = ehat[0] * ehat[1] > 0.0;
    let (h_t, tau_t) = lawson_params(h, fam.tau, theta, ehat[2], trig);
    let kappa_t = match fam.kind {
        FamilyKind::Ekt => fam.kappa - 4.0 * fam.tau * fam.tau + 4.0 * tau_t * tau_t,
        FamilyKind::Lkt | FamilyKind::LktHat => {
            fam.kappa + 4.0 * fam.tau * fam.tau - 4.0 * tau_t * tau_t
        }
    };
    let params = CorrespondenceParams {
        theta,
        trig,
        source_kind: fam.kind,
        source: (fam.kappa, fam.tau, h),
        target: (kappa_t, tau_t, h_t),
        ehat3: ehat[2],
    };
    let d = distinguished_index(&grid.model)?;
    let nu_pts = grid.gauge.nu;
    let nv_pts = grid.gauge.nv;
    // S~ = ehat3 H~ id + Rot_theta (S - ehat3 H id), as <S e_k, e_l> entries
    let (ca, sb) = if trig { (theta.cos(), theta.sin()) } else { (theta.cosh(), theta.sinh()) };
    let s_t = Grid::from_fn(nu_pts, nv_pts, |i, j| {
        let s = grid.data.at(i, j).s;
        // operator matrix O[l][k]: (S e_k) components = ehat_l s[k][l]
        let o = [
            [ehat[0] * s[0][0], ehat[0] * s[1][0]],
            [ehat[1] * s[0][1], ehat[1] * s[1][1]],
        ];
        let jop = [[0.0, -ehat[0]], [ehat[1], 0.0]];
        let rot = [
            [ca + sb * jop[0][0], sb * jop[0][1]],
            [sb * jop[1][0], ca + sb * jop[1][1]],
        ];
        let tr = ehat[2] * h;
        let traceless = [[o[0][0] - tr, o[0][1]], [o[1][0], o[1][1] - tr]];
        let rotated = crate::linalg::mat2_mul(&rot, &traceless);
        let new_o = [
            [rotated[0][0] + ehat[2] * h_t, rotated[0][1]],
            [rotated[1][0], rotated[1][1] + ehat[2] * h_t],
        ];
        // back to <S~ e_k, e_l> = ehat_l * new_o[l][k]
        [
            [ehat[0] * new_o[0][0], ehat[1] * new_o[1][0]],
            [ehat[0] * new_o[0][1], ehat[1] * new_o[1][1]],
        ]
    });
    let t_t = Grid::from_fn(nu_pts, nv_pts, |i, j| {
        rot_theta(grid.data.at(i, j).t[d], theta, ehat, trig)
    });
    let nu_t = grid.nu_grid(d);
    let target = if tau_t.abs() < 1e-14 {
        TargetSpace::ProductLimit { kind: fam.kind, kappa: kappa_t }
    } else {
        TargetSpace::Model(make_dim4_model(fam.kind, kappa_t, tau_t)?)
    };
    Ok(DanielTarget {
        params,
        axes: grid.axes.clone(),
        ehat,
        gauge: grid.gauge.clone(),
        s: s_t,
        t_d: t_t,
        nu_d: nu_t,
        target,
    })
}

/// Companion data of a CMC immersion in the round-sphere model
/// `c = (2, 2, 2)`: the correspondence with `theta = -2 arctan(H)`, which
/// lands back in the same model with `H~ = -H` and all angle functions
/// preserved. Returns the full transformed data grid (every `T_i` rotates
/// by the same angle).
pub fn twin_s3(grid: &SurfaceGrid) -> Result<(SurfaceGrid, CorrespondenceParams)> {
    if grid.model.c_vec() != [2.0, 2.0, 2.0] || !grid.model.eps.is_riemannian() {
        return Err(Error::precondition(
            "round-sphere model c = (2,2,2)",
            format!("c = {:?}", grid.model.c_vec()),
        ));
    }
    let spread = grid.cmc_spread();
    if spread > CMC_TOL {
        return Err(Error::precondition(
            "constant mean curvature",
            format!("relative H spread {spread:.3e}"),
        ));
    }
    let h = grid.mean_h();
    if h.abs() < 1e-12 {
        return Err(Error::precondition(
            "H != 0",
            "minimal surfaces are their own twin (theta = 0)",
        ));
    }
    let theta = -2.0 * h.atan();
    let target = daniel_transform(grid, theta)?;
    debug_assert!(matches!(&target.target, TargetSpace::Model(m)
        if m.c_vec() == [2.0, 2.0, 2.0]));
    // rotate every tangent projection; angles are untouched
    let data = Grid::from_fn(grid.gauge.nu, grid.gauge.nv, |i, j| {
        let mut d = *grid.data.at(i, j);
        for a in 0..3 {
            d.t[a] = rot_theta(d.t[a], theta, grid.ehat, true);
        }
        d.s = *target.s.at(i, j);
        d.h = target.params.target.2;
        // Gauss equation value with the new shape operator
        let eh = grid.ehat;
        let det_s = eh[0] * eh[1] * (d.s[0][0] * d.s[1][1] - d.s[0][1] * d.s[1][0]);
        let a_c = grid.model.a;
        d.k = eh[2] * det_s
            - eh[0] * eh[1]
                * (a_c[0] * d.nu[0] * d.nu[0] + a_c[1] * d.nu[1] * d.nu[1]
                    + a_c[2] * d.nu[2] * d.nu[2]);
        d
    });
    let twin = SurfaceGrid {
        model: grid.model.clone(),
        axes: grid.axes.clone(),
        ehat: grid.ehat,
        gauge: grid.gauge.clone(),
        data,
        embedding: None,
    };
    Ok((twin, target.params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rot_theta_is_isometric() {
        for ehat in [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0]] {
            let v = [0.7, -0.4];
            let w = [0.2, 0.9];
            let finner = |a: Vec2, b: Vec2| ehat[0] * a[0] * b[0] + ehat[1] * a[1] * b[1];
            for theta in [0.0, 0.3, 1.2, -2.0] {
                let rv = rot_theta(v, theta, ehat, true);
                let rw = rot_theta(w, theta, ehat, true);
                assert!((finner(rv, rw) - finner(v, w)).abs() < 1e-12);
            }
        }
        // theta = 0 is the identity, theta = pi/2 (Riemannian) is J
        let v = [0.3, 0.8];
        assert_eq!(rot_theta(v, 0.0, [1.0, 1.0, 1.0], true), v);
        let j = rot_theta(v, std::f64::consts::FRAC_PI_2, [1.0, 1.0, 1.0], true);
        assert!((j[0] + v[1]).abs() < 1e-15 && (j[1] - v[0]).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_rotation_preserves_lorentz_inner() {
        let ehat = [1.0, -1.0, 1.0];
        let finner = |a: Vec2, b: Vec2| ehat[0] * a[0] * b[0] + ehat[1] * a[1] * b[1];
        let v = [0.7, -0.4];
        let rv = rot_theta(v, 0.8, ehat, false);
        assert!((finner(rv, rv) - finner(v, v)).abs() < 1e-12);
    }

    #[test]
    fn lawson_params_values() {
        // theta = 0 is the identity
        assert_eq!(lawson_params(0.7, 0.3, 0.0, 1.0, true), (0.7, 0.3));
        // eps = 1, (H, tau) = (0, 1), theta = pi/2 -> (1, 0)
        let (h, t) = lawson_params(0.0, 1.0, std::f64::consts::FRAC_PI_2, 1.0, true);
        assert!((h - 1.0).abs() < 1e-15 && t.abs() < 1e-15);
        // eps = -1 (spacelike Lorentzian), same input -> H~ = -1, tau~ = 0
        let (h, t) = lawson_params(0.0, 1.0, std::f64::consts::FRAC_PI_2, -1.0, true);
        assert!((h + 1.0).abs() < 1e-15 && t.abs() < 1e-15);
    }

    #[test]
    fn twin_angle_formula() {
        // H = 1 -> theta = -pi/2; H = sqrt(3) -> theta = -2pi/3
        assert!((-2.0 * 1.0f64.atan() + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((-2.0 * 3.0f64.sqrt().atan() + 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
    }
}
