//! Cylinder coordinate models of unimodular metric Lie groups of
//! diagonalizable type.
//!
//! The model lives on `D x R` where `D = {(x,y) : lambda(x,y) > 0}` and
//! `lambda(x,y) = (1 + (c3/4)(c2 x^2 + c1 y^2))^{-1}`. The orthonormal frame
//! is
//!
//! ```text
//! E1 = (1/lambda)(c(z) dx + c2 s(z) dy) + (c3/2)(c2 x s(z) - y c(z)) dz
//! E2 = (1/lambda)(-c1 s(z) dx + c(z) dy) + (c3/2)(x c(z) + c1 y s(z)) dz
//! E3 = dz
//! ```
//!
//! with `c(z), s(z)` the solutions of `c' = -c1 c2 s`, `s' = c`, `c(0) = 1`,
//! `s(0) = 0`. Both are evaluated through entire series in `c1 c2 z^2`, so
//! every model quantity is analytic in the structure constants.

use crate::error::Error;
use crate::linalg::{self, alpha, beta, cross_eps, inner_eps, Mat3, Vec3};
use crate::Result;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Metric signs `(eps1, eps2, eps3)`, each +1 or -1.
///
/// Only the Riemannian `(1,1,1)` and the Lorentzian `(1,1,-1)` layouts are
/// supported; other sign placements are reached by relabeling the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub eps1: i8,
    pub eps2: i8,
    pub eps3: i8,
}

impl Signature {
    pub const RIEMANNIAN: Signature = Signature { eps1: 1, eps2: 1, eps3: 1 };
    pub const LORENTZIAN: Signature = Signature { eps1: 1, eps2: 1, eps3: -1 };

    pub fn new(eps1: i8, eps2: i8, eps3: i8) -> Result<Signature> {
        match (eps1, eps2, eps3) {
            (1, 1, 1) | (1, 1, -1) => Ok(Signature { eps1, eps2, eps3 }),
            _ => Err(Error::UnsupportedSignature(eps1, eps2, eps3)),
        }
    }

    pub fn as_vec(&self) -> Vec3 {
        [self.eps1 as f64, self.eps2 as f64, self.eps3 as f64]
    }

    pub fn is_riemannian(&self) -> bool {
        self.eps3 == 1
    }
}

/// Structure constants `(c1, c2, c3)` of the Lie bracket relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl StructureConstants {
    pub fn new(c1: f64, c2: f64, c3: f64) -> StructureConstants {
        StructureConstants { c1, c2, c3 }
    }

    pub fn as_vec(&self) -> Vec3 {
        [self.c1, self.c2, self.c3]
    }
}

/// Underlying simply connected Lie group, read off the signs of the `c_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupType {
    Su2,
    Sl2R,
    E2,
    Sol3,
    Nil3,
    R3,
}

impl std::fmt::Display for GroupType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GroupType::Su2 => "SU2",
            GroupType::Sl2R => "SL2R~",
            GroupType::E2 => "E2~",
            GroupType::Sol3 => "Sol3",
            GroupType::Nil3 => "Nil3",
            GroupType::R3 => "R3",
        };
        write!(f, "{s}")
    }
}

/// Two-parameter families with 4-dimensional isometry group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// Riemannian E(kappa, tau), Killing field E3 spacelike fiber direction.
    Ekt,
    /// Lorentzian L(kappa, tau), Killing field E3 timelike.
    Lkt,
    /// Lorentzian Lhat(kappa, tau): spacelike Killing fiber over a Lorentzian
    /// base. Stored with the timelike direction relabeled to index 3, which
    /// puts the Killing direction at index 2 (`relabel = swap23`).
    LktHat,
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FamilyKind::Ekt => "EKT",
            FamilyKind::Lkt => "LKT",
            FamilyKind::LktHat => "LKT_HAT",
        };
        write!(f, "{s}")
    }
}

/// Detected `(kappa, tau)` family data of a dim-4 model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub kind: FamilyKind,
    pub kappa: f64,
    pub tau: f64,
    /// Index (0-based) of the distinguished unit Killing direction.
    pub killing_index: usize,
}

/// A point of the cylinder model `D x R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ModelPoint {
    pub fn new(x: f64, y: f64, z: f64) -> ModelPoint {
        ModelPoint { x, y, z }
    }

    pub fn coords(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    pub fn from_coords(v: Vec3) -> ModelPoint {
        ModelPoint { x: v[0], y: v[1], z: v[2] }
    }
}

/// Which basis the components of a [`TangentVector3`] refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    /// Coordinate basis `{d/dx, d/dy, d/dz}`.
    Coordinate,
    /// Left-invariant orthonormal frame `{E1, E2, E3}`.
    Frame,
}

/// Ambient tangent vector with an explicit basis tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector3 {
    pub components: Vec3,
    pub basis: BasisTag,
}

impl TangentVector3 {
    pub fn coordinate(components: Vec3) -> TangentVector3 {
        TangentVector3 { components, basis: BasisTag::Coordinate }
    }

    pub fn frame(components: Vec3) -> TangentVector3 {
        TangentVector3 { components, basis: BasisTag::Frame }
    }
}

/// A metric Lie group model: structure constants, signs and the derived
/// constants `mu_i` (connection) and `a_i` (curvature), plus classification
/// metadata. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricLieGroupModel {
    pub c: StructureConstants,
    pub eps: Signature,
    /// `mu_1 = (-e1 c1 + e2 c2 + e3 c3)/2` and cyclic.
    pub mu: Vec3,
    /// Curvature coefficients `a_i = eps_i mu_j mu_k - c_i mu_i`.
    pub a: Vec3,
    pub group_type: GroupType,
    pub iso_dim: u8,
    /// Whether `D x R` covers the whole group (`c1 c3 <= 0` and `c2 c3 <= 0`).
    pub is_global: bool,
    pub family: Option<Family>,
}

/// Construct a model from structure constants and signs, populating all
/// derived constants and classification fields.
pub fn make_model(c: StructureConstants, eps: Signature) -> MetricLieGroupModel {
    let cv = c.as_vec();
    let ev = eps.as_vec();
    let w = [ev[0] * cv[0], ev[1] * cv[1], ev[2] * cv[2]];
    let mu = [
        (-w[0] + w[1] + w[2]) / 2.0,
        (w[0] - w[1] + w[2]) / 2.0,
        (w[0] + w[1] - w[2]) / 2.0,
    ];
    let a = [
        ev[0] * mu[1] * mu[2] - cv[0] * mu[0],
        ev[1] * mu[0] * mu[2] - cv[1] * mu[1],
        ev[2] * mu[0] * mu[1] - cv[2] * mu[2],
    ];
    let group_type = classify_group(cv);
    let iso_dim = isometry_dimension(w);
    let is_global = cv[0] * cv[2] <= 0.0 && cv[1] * cv[2] <= 0.0;
    let family = detect_family(cv, ev, w, iso_dim);
    MetricLieGroupModel { c, eps, mu, a, group_type, iso_dim, is_global, family }
}

/// Lie group type from the sign pattern of `(c1,c2,c3)`, invariant under
/// permutations and a global sign change.
fn classify_group(c: Vec3) -> GroupType {
    let pos = c.iter().filter(|&&x| x > 0.0).count();
    let neg = c.iter().filter(|&&x| x < 0.0).count();
    let zero = 3 - pos - neg;
    // normalize so the majority sign is positive
    let (p, n) = if neg > pos { (neg, pos) } else { (pos, neg) };
    match (p, n, zero) {
        (3, 0, 0) => GroupType::Su2,
        (2, 1, 0) => GroupType::Sl2R,
        (2, 0, 1) => GroupType::E2,
        (1, 1, 1) => GroupType::Sol3,
        (1, 0, 2) => GroupType::Nil3,
        _ => GroupType::R3,
    }
}

/// Isometry group dimension from the weighted constants `w_i = eps_i c_i`.
///
/// 6 when all `w_i` agree, or two agree nonzero and the third vanishes;
/// 4 when two agree and the third is nonzero and different; 3 otherwise.
fn isometry_dimension(w: Vec3) -> u8 {
    let eq = |a: f64, b: f64| a == b;
    if eq(w[0], w[1]) && eq(w[1], w[2]) {
        return 6;
    }
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        if eq(w[i], w[j]) {
            if w[k] == 0.0 && w[i] != 0.0 {
                return 6; // flat E(2)~ / Lorentzian-flat case
            }
            if w[k] != 0.0 {
                return 4;
            }
        }
    }
    3
}

/// Detect the `(kappa, tau)` family of a dim-4 model. The Killing index is
/// the one whose `w` differs from the equal pair; `tau = eps_d c_d / 2` and
/// `kappa = c_d * c_b` with `b` the base index that carries the sign of the
/// base curvature (the timelike one for a Lorentzian base).
fn detect_family(c: Vec3, eps: Vec3, w: Vec3, iso_dim: u8) -> Option<Family> {
    if iso_dim != 4 {
        return None;
    }
    let d = (0..3).find(|&d| {
        let (i, j) = other_two(d);
        w[i] == w[j] && w[d] != w[i] && w[d] != 0.0
    })?;
    let tau = eps[d] * c[d] / 2.0;
    let riemannian = eps == [1.0, 1.0, 1.0];
    let (kind, kappa) = if riemannian {
        (FamilyKind::Ekt, c[d] * c[(d + 1) % 3])
    } else if d == 2 {
        // timelike Killing direction: L(kappa, tau)
        (FamilyKind::Lkt, c[2] * c[0])
    } else {
        // spacelike Killing direction over a Lorentzian base: Lhat(kappa, tau)
        (FamilyKind::LktHat, c[d] * c[2])
    };
    Some(Family { kind, kappa, tau, killing_index: d })
}

fn other_two(d: usize) -> (usize, usize) {
    ((d + 1) % 3, (d + 2) % 3)
}

/// Construct the canonical model of a dim-4 family member.
///
/// * `Ekt  -> c = (k/2t, k/2t, 2t),    eps = (1,1,1)`
/// * `Lkt  -> c = (-k/2t, -k/2t, -2t), eps = (1,1,-1)`
/// * `LktHat -> c = (-k/2t, 2t, k/2t), eps = (1,1,-1)`, the presentation with
///   a spacelike Killing direction at index 2 after relabeling the timelike
///   direction to index 3 (recorded through `Family::killing_index = 1`).
///
/// `tau = 0` is rejected: the limit is a product metric, not a Lie group;
/// see [`product_limit_metric`].
pub fn make_dim4_model(kind: FamilyKind, kappa: f64, tau: f64) -> Result<MetricLieGroupModel> {
    if tau == 0.0 {
        return Err(Error::ProductLimit);
    }
    let (c, eps) = match kind {
        FamilyKind::Ekt => (
            StructureConstants::new(kappa / (2.0 * tau), kappa / (2.0 * tau), 2.0 * tau),
            Signature::RIEMANNIAN,
        ),
        FamilyKind::Lkt => (
            StructureConstants::new(-kappa / (2.0 * tau), -kappa / (2.0 * tau), -2.0 * tau),
            Signature::LORENTZIAN,
        ),
        FamilyKind::LktHat => (
            StructureConstants::new(-kappa / (2.0 * tau), 2.0 * tau, kappa / (2.0 * tau)),
            Signature::LORENTZIAN,
        ),
    };
    Ok(make_model(c, eps))
}

/// Product-limit metric tensor at `tau = 0`: `lambda^2 (dx^2 +- dy^2) + eps3 dz^2`
/// with `lambda = (1 + (kappa/4)(x^2 +- y^2))^{-1}`. Only the metric exists;
/// there is no left-invariant frame. Returns the 3x3 coordinate metric.
pub fn product_limit_metric(kind: FamilyKind, kappa: f64, p: ModelPoint) -> Mat3 {
    let (base_sign, eps3) = match kind {
        FamilyKind::Ekt => (1.0, 1.0),
        FamilyKind::Lkt => (1.0, -1.0),
        FamilyKind::LktHat => (-1.0, 1.0),
    };
    let lam = 1.0 / (1.0 + 0.25 * kappa * (p.x * p.x + base_sign * p.y * p.y));
    [
        [lam * lam, 0.0, 0.0],
        [0.0, base_sign * lam * lam, 0.0],
        [0.0, 0.0, eps3],
    ]
}

impl MetricLieGroupModel {
    pub fn eps_vec(&self) -> Vec3 {
        self.eps.as_vec()
    }

    pub fn c_vec(&self) -> Vec3 {
        self.c.as_vec()
    }

    /// `lambda(x, y) = (1 + (c3/4)(c2 x^2 + c1 y^2))^{-1}`, positive on D.
    pub fn lambda(&self, x: f64, y: f64) -> f64 {
        1.0 / (1.0 + 0.25 * self.c.c3 * (self.c.c2 * x * x + self.c.c1 * y * y))
    }

    fn check_domain(&self, p: ModelPoint) -> Result<f64> {
        let denom = 1.0 + 0.25 * self.c.c3 * (self.c.c2 * p.x * p.x + self.c.c1 * p.y * p.y);
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(Error::OutsideDomain { x: p.x, y: p.y, z: p.z, lambda: 1.0 / denom });
        }
        Ok(1.0 / denom)
    }

    /// `(c(z), s(z))`: solutions of `c' = -c1 c2 s`, `s' = c` with
    /// `c(0) = 1`, `s(0) = 0`; satisfies `c^2 + c1 c2 s^2 = 1`.
    pub fn cs_eval(&self, z: f64) -> (f64, f64) {
        let t = self.c.c1 * self.c.c2 * z * z;
        (alpha(t), z * beta(t))
    }

    /// Change-of-frame matrix `B`: columns are `E1, E2, E3` in coordinates.
    pub fn frame_b(&self, p: ModelPoint) -> Result<Mat3> {
        let lam = self.check_domain(p)?;
        let (cz, sz) = self.cs_eval(p.z);
        let [c1, c2, c3] = self.c_vec();
        Ok([
            [cz / lam, -c1 * sz / lam, 0.0],
            [c2 * sz / lam, cz / lam, 0.0],
            [
                0.5 * c3 * (c2 * p.x * sz - p.y * cz),
                0.5 * c3 * (p.x * cz + c1 * p.y * sz),
                1.0,
            ],
        ])
    }

    /// Closed-form inverse of `B` (rows convert coordinates to frame
    /// components).
    pub fn frame_b_inv(&self, p: ModelPoint) -> Result<Mat3> {
        let lam = self.check_domain(p)?;
        let (cz, sz) = self.cs_eval(p.z);
        let [c1, c2, c3] = self.c_vec();
        Ok([
            [lam * cz, c1 * lam * sz, 0.0],
            [-c2 * lam * sz, lam * cz, 0.0],
            [0.5 * c3 * p.y * lam, -0.5 * c3 * p.x * lam, 1.0],
        ])
    }

    /// Frame vectors and both change-of-frame matrices at `p`.
    pub fn frame_at(&self, p: ModelPoint) -> Result<(Vec3, Vec3, Vec3, Mat3, Mat3)> {
        let b = self.frame_b(p)?;
        let b_inv = self.frame_b_inv(p)?;
        let col = |j: usize| [b[0][j], b[1][j], b[2][j]];
        Ok((col(0), col(1), col(2), b, b_inv))
    }

    /// Directional derivative of `B^{-1}` at `p` along the coordinate vector
    /// `w`, in closed form.
    pub fn frame_b_inv_d(&self, p: ModelPoint, w: Vec3) -> Result<Mat3> {
        let lam = self.check_domain(p)?;
        let (cz, sz) = self.cs_eval(p.z);
        let [c1, c2, c3] = self.c_vec();
        let lam_x = -lam * lam * 0.5 * c3 * c2 * p.x;
        let lam_y = -lam * lam * 0.5 * c3 * c1 * p.y;
        let dlam = lam_x * w[0] + lam_y * w[1];
        let dcz = -c1 * c2 * sz * w[2];
        let dsz = cz * w[2];
        Ok([
            [dlam * cz + lam * dcz, c1 * (dlam * sz + lam * dsz), 0.0],
            [-c2 * (dlam * sz + lam * dsz), dlam * cz + lam * dcz, 0.0],
            [
                0.5 * c3 * (w[1] * lam + p.y * dlam),
                -0.5 * c3 * (w[0] * lam + p.x * dlam),
                0.0,
            ],
        ])
    }

    /// Coordinate metric `B^{-t} diag(eps) B^{-1}` at `p`.
    pub fn metric_at(&self, p: ModelPoint) -> Result<Mat3> {
        let bi = self.frame_b_inv(p)?;
        let e = self.eps_vec();
        let mut g = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = (0..3).map(|k| bi[k][i] * e[k] * bi[k][j]).sum();
            }
        }
        Ok(g)
    }

    /// Inner product of two coordinate-basis tangent vectors at `p`.
    pub fn inner(&self, u: Vec3, v: Vec3, p: ModelPoint) -> Result<f64> {
        let bi = self.frame_b_inv(p)?;
        Ok(inner_eps(self.eps_vec(), linalg::mat3_vec(&bi, u), linalg::mat3_vec(&bi, v)))
    }

    /// Cross product of two coordinate-basis tangent vectors at `p`,
    /// returned in coordinates.
    pub fn cross(&self, u: Vec3, v: Vec3, p: ModelPoint) -> Result<Vec3> {
        let bi = self.frame_b_inv(p)?;
        let b = self.frame_b(p)?;
        let w = cross_eps(self.eps_vec(), linalg::mat3_vec(&bi, u), linalg::mat3_vec(&bi, v));
        Ok(linalg::mat3_vec(&b, w))
    }

    /// Levi-Civita connection on frame fields: `nabla_{E_i} E_j` in frame
    /// components (constant over the group).
    pub fn connection(&self, i: usize, j: usize) -> Vec3 {
        let e = self.eps_vec();
        let m = self.mu;
        let mut out = [0.0; 3];
        match (i, j) {
            (0, 1) => out[2] = e[2] * m[0],
            (0, 2) => out[1] = -e[1] * m[0],
            (1, 0) => out[2] = -e[2] * m[1],
            (1, 2) => out[0] = e[0] * m[1],
            (2, 0) => out[1] = e[1] * m[2],
            (2, 1) => out[0] = -e[0] * m[2],
            _ => {}
        }
        out
    }

    /// `nabla_X W` for frame-component vectors at a point, given the frame
    /// derivative `dW` of the components of `W` along `X` (zero for
    /// left-invariant `W`).
    pub fn connection_apply(&self, x: Vec3, w: Vec3, dw: Vec3) -> Vec3 {
        let mut out = dw;
        for d in 0..3 {
            for g in 0..3 {
                let cdg = self.connection(d, g);
                for k in 0..3 {
                    out[k] += x[d] * w[g] * cdg[k];
                }
            }
        }
        out
    }

    /// Curvature tensor `R(X,Y)Z` in frame components, from the closed form
    /// `R = sum_i a_i eps_j eps_k R_i`.
    pub fn curvature_r(&self, x: Vec3, y: Vec3, z: Vec3) -> Vec3 {
        let e = self.eps_vec();
        let a = self.a;
        let ip = |u: Vec3, v: Vec3| inner_eps(e, u, v);
        let xz = ip(x, z);
        let yz = ip(y, z);
        let mut out = [0.0; 3];
        for i in 0..3 {
            // R_i(X,Y)Z with <Z,E_i> = eps_i z_i etc.
            let coef = a[i] * e[(i + 1) % 3] * e[(i + 2) % 3];
            let zi = e[i] * z[i];
            let xi = e[i] * x[i];
            let yi = e[i] * y[i];
            let mut ri = [0.0; 3];
            for k in 0..3 {
                ri[k] = xz * y[k] - yz * x[k] - e[i] * zi * xi * y[k] + e[i] * zi * yi * x[k];
            }
            ri[i] += -e[i] * yi * xz + e[i] * xi * yz;
            for k in 0..3 {
                out[k] += coef * ri[k];
            }
        }
        out
    }

    /// Sectional curvature of the plane spanned by frame-component vectors
    /// `x, y`; `None` when the plane is degenerate.
    pub fn sectional_curvature(&self, x: Vec3, y: Vec3) -> Option<f64> {
        let e = self.eps_vec();
        let q = inner_eps(e, x, x) * inner_eps(e, y, y) - inner_eps(e, x, y).powi(2);
        if q.abs() < 1e-10 {
            return None;
        }
        let r = self.curvature_r(x, y, y);
        Some(inner_eps(e, r, x) / q)
    }

    /// Global-model criterion: `c1 c3 <= 0` and `c2 c3 <= 0`.
    pub fn global_model(&self) -> bool {
        self.is_global
    }

    /// Covering map onto the matrix-group quadric, for the SU(2) branch
    /// (`c1,c2,c3 > 0`, lands in `|a|^2 + |b|^2 = 1`) and the SL2(R) branch
    /// (`c1,c2 > 0 > c3`, lands in `|a|^2 - |b|^2 = 1`).
    pub fn cover_map(&self, p: ModelPoint) -> Result<(Complex64, Complex64)> {
        let [c1, c2, c3] = self.c_vec();
        let su2 = c1 > 0.0 && c2 > 0.0 && c3 > 0.0;
        let sl2 = c1 > 0.0 && c2 > 0.0 && c3 < 0.0;
        if !su2 && !sl2 {
            return Err(Error::NoCoverMap(c1, c2, c3));
        }
        self.check_domain(p)?;
        let r = (1.0 + 0.25 * c3 * (c2 * p.x * p.x + c1 * p.y * p.y)).sqrt();
        let phase = Complex64::new(0.0, 0.5 * (c1 * c2).sqrt() * p.z).exp();
        let s = if su2 { 1.0 } else { -1.0 };
        let a = phase / r;
        let b = Complex64::new(0.5 * (s * c1 * c3).sqrt() * p.y, 0.5 * (s * c2 * c3).sqrt() * p.x)
            * phase
            / r;
        Ok((a, b))
    }

    /// The left-invariant quadric frame the covering map pushes `E_i` onto:
    /// `X_i` evaluated at `(a, b)`, as a pair of complex components.
    pub fn cover_frame(&self, i: usize, a: Complex64, b: Complex64) -> Result<(Complex64, Complex64)> {
        let [c1, c2, c3] = self.c_vec();
        let su2 = c1 > 0.0 && c2 > 0.0 && c3 > 0.0;
        let sl2 = c1 > 0.0 && c2 > 0.0 && c3 < 0.0;
        if !su2 && !sl2 {
            return Err(Error::NoCoverMap(c1, c2, c3));
        }
        let s = if su2 { 1.0 } else { -1.0 };
        let i_unit = Complex64::new(0.0, 1.0);
        Ok(match i {
            0 => {
                let k = 0.5 * (s * c2 * c3).sqrt();
                // SU(2): (-i conj b, i conj a); SL2: (i conj b, i conj a)
                (k * i_unit * (-s) * b.conj(), k * i_unit * a.conj())
            }
            1 => {
                let k = 0.5 * (s * c1 * c3).sqrt();
                // SU(2): (-conj b, conj a); SL2: (conj b, conj a)
                (k * (-s) * b.conj(), k * a.conj())
            }
            _ => {
                let k = 0.5 * (c1 * c2).sqrt();
                (k * i_unit * a, k * i_unit * b)
            }
        })
    }

    /// Convert a tangent vector to frame components.
    pub fn to_frame(&self, v: &TangentVector3, p: ModelPoint) -> Result<Vec3> {
        match v.basis {
            BasisTag::Frame => Ok(v.components),
            BasisTag::Coordinate => Ok(linalg::mat3_vec(&self.frame_b_inv(p)?, v.components)),
        }
    }

    /// Convert a tangent vector to coordinate components.
    pub fn to_coordinate(&self, v: &TangentVector3, p: ModelPoint) -> Result<Vec3> {
        match v.basis {
            BasisTag::Coordinate => Ok(v.components),
            BasisTag::Frame => Ok(linalg::mat3_vec(&self.frame_b(p)?, v.components)),
        }
    }
}

/// `true` iff the model satisfies the global-model criterion.
pub fn is_global(model: &MetricLieGroupModel) -> bool {
    model.is_global
}
