//! Explicit surface families: constant-angle coset surfaces, totally
//! geodesic distributions, and vertical cylinders with their angular
//! companions.

use crate::error::Error;
use crate::linalg::{dot3, Vec3};
use crate::model::{FamilyKind, MetricLieGroupModel, ModelPoint};
use crate::surface::SurfacePatch;
use crate::Result;

// ---------------------------------------------------------------------------
// constant-angle solution sets
// ---------------------------------------------------------------------------

/// Solution set of `sum eps_a nu_a^2 = ehat3` and `sum c_a nu_a^2 = 0`
/// (the admissible constant angle triples).
pub enum ConstantAngleSolutionSet {
    Empty,
    Points(Vec<Vec3>),
    Curves(Vec<ConicCurve>),
    /// `c = 0`: every unit normal works (every plane is a coset).
    WholeSphere,
}

impl ConstantAngleSolutionSet {
    pub fn describe(&self) -> String {
        match self {
            ConstantAngleSolutionSet::Empty => "empty".into(),
            ConstantAngleSolutionSet::Points(p) => format!("{} isolated points", p.len()),
            ConstantAngleSolutionSet::Curves(c) => format!("{} curve(s)", c.len()),
            ConstantAngleSolutionSet::WholeSphere => "the whole unit sphere".into(),
        }
    }
}

/// One solution curve, sampled in closed form. Every sample satisfies both
/// quadric constraints exactly.
pub struct ConicCurve {
    kind: CurveKind,
}

enum CurveKind {
    /// Great circle `nu(t) = cos(t) b1 + sin(t) b2`.
    Circle { b1: Vec3, b2: Vec3 },
    /// Cone nappe `nu(t) = normalize(apex + cos(t) w1 + sin(t) w2)`.
    ConeNappe { apex: Vec3, w1: Vec3, w2: Vec3 },
    /// Sign branch of the squares-space line `x(t) = x0 + t d`,
    /// `nu_i = s_i sqrt(x_i)`; `t` runs over `[t0, t1]`.
    Branch { x0: Vec3, dir: Vec3, t0: f64, t1: f64, signs: Vec3 },
}

impl ConicCurve {
    /// Sample the curve; `t` is an angle for the closed kinds and a
    /// parameter in `[0, 1]` spanning the admissible interval for branches.
    pub fn sample(&self, t: f64) -> Vec3 {
        match &self.kind {
            CurveKind::Circle { b1, b2 } => {
                let (c, s) = (t.cos(), t.sin());
                [
                    c * b1[0] + s * b2[0],
                    c * b1[1] + s * b2[1],
                    c * b1[2] + s * b2[2],
                ]
            }
            CurveKind::ConeNappe { apex, w1, w2 } => {
                let (c, s) = (t.cos(), t.sin());
                let u = [
                    apex[0] + c * w1[0] + s * w2[0],
                    apex[1] + c * w1[1] + s * w2[1],
                    apex[2] + c * w1[2] + s * w2[2],
                ];
                let n = dot3(u, u).sqrt();
                [u[0] / n, u[1] / n, u[2] / n]
            }
            CurveKind::Branch { x0, dir, t0, t1, signs } => {
                let s = t0 + (t1 - t0) * t.clamp(0.0, 1.0);
                let mut nu = [0.0; 3];
                for i in 0..3 {
                    nu[i] = signs[i] * (x0[i] + s * dir[i]).max(0.0).sqrt();
                }
                nu
            }
        }
    }
}

/// Compute the admissible constant-angle triples of a model.
pub fn constant_angle_set(model: &MetricLieGroupModel, ehat3: f64) -> ConstantAngleSolutionSet {
    let c = model.c_vec();
    let e = model.eps_vec();
    if c == [0.0; 3] {
        return ConstantAngleSolutionSet::WholeSphere;
    }
    if model.eps.is_riemannian() {
        if ehat3 < 0.0 {
            return ConstantAngleSolutionSet::Empty;
        }
        return riemannian_constant_angle_set(c);
    }
    lorentzian_constant_angle_set(c, e, ehat3)
}

fn riemannian_constant_angle_set(c: Vec3) -> ConstantAngleSolutionSet {
    let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let pos: Vec<usize> = (0..3).filter(|&i| c[i] > 0.0).collect();
    let neg: Vec<usize> = (0..3).filter(|&i| c[i] < 0.0).collect();
    let zero: Vec<usize> = (0..3).filter(|&i| c[i] == 0.0).collect();
    match (pos.len(), neg.len(), zero.len()) {
        // all nonzero, same sign: zeta has a fixed sign on the sphere
        (3, 0, 0) | (0, 3, 0) => ConstantAngleSolutionSet::Empty,
        // two zeros: great circle nu_k = 0
        (_, _, 2) => {
            let k = if c[0] != 0.0 { 0 } else if c[1] != 0.0 { 1 } else { 2 };
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            ConstantAngleSolutionSet::Curves(vec![ConicCurve {
                kind: CurveKind::Circle { b1: basis[i], b2: basis[j] },
            }])
        }
        // one zero, other two of the same sign: two antipodal points
        (2, 0, 1) | (0, 2, 1) => {
            let k = zero[0];
            ConstantAngleSolutionSet::Points(vec![
                basis[k],
                [-basis[k][0], -basis[k][1], -basis[k][2]],
            ])
        }
        // one zero, mixed signs: the cone degenerates into two planes
        (1, 1, 1) => {
            let (i, j, k) = (pos[0], neg[0], zero[0]);
            // planes sqrt(c_i) nu_i = +- sqrt(-c_j) nu_j
            let d = (c[i] - c[j]).sqrt();
            let mut curves = Vec::new();
            for s in [1.0, -1.0] {
                let mut b2 = [0.0; 3];
                b2[i] = (-c[j]).sqrt() / d;
                b2[j] = s * c[i].sqrt() / d;
                curves.push(ConicCurve { kind: CurveKind::Circle { b1: basis[k], b2 } });
            }
            ConstantAngleSolutionSet::Curves(curves)
        }
        // no zeros, mixed signs: a genuine cone, two nappes around the
        // minority-sign axis
        _ => {
            let m = if pos.len() == 1 { pos[0] } else { neg[0] };
            let (i, j) = ((m + 1) % 3, (m + 2) % 3);
            let ratio_i = (c[m] / -c[i]).sqrt();
            let ratio_j = (c[m] / -c[j]).sqrt();
            let mut curves = Vec::new();
            for s in [1.0, -1.0] {
                let mut apex = [0.0; 3];
                apex[m] = s;
                let mut w1 = [0.0; 3];
                w1[i] = ratio_i;
                let mut w2 = [0.0; 3];
                w2[j] = ratio_j;
                curves.push(ConicCurve { kind: CurveKind::ConeNappe { apex, w1, w2 } });
            }
            ConstantAngleSolutionSet::Curves(curves)
        }
    }
}

fn lorentzian_constant_angle_set(c: Vec3, e: Vec3, ehat3: f64) -> ConstantAngleSolutionSet {
    // work in squares space: x_i = nu_i^2 >= 0,
    // plane 1: <e, x> = ehat3, plane 2: <c, x> = 0
    let cross = crate::linalg::cross_eps([1.0, 1.0, 1.0], e, c);
    if dot3(cross, cross) < 1e-28 {
        // c parallel to e: <c,x> = k ehat3 != 0 unless k = 0 (handled above)
        return ConstantAngleSolutionSet::Empty;
    }
    // particular solution x0 = a e + b c
    let g = [[dot3(e, e), dot3(e, c)], [dot3(c, e), dot3(c, c)]];
    let ab = crate::linalg::mat2_solve(&g, [ehat3, 0.0]);
    let x0 = [
        ab[0] * e[0] + ab[1] * c[0],
        ab[0] * e[1] + ab[1] * c[1],
        ab[0] * e[2] + ab[1] * c[2],
    ];
    let dir = cross;
    // admissible t interval: x0_i + t dir_i >= 0 for all i
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..3 {
        if dir[i].abs() < 1e-14 {
            if x0[i] < -1e-14 {
                return ConstantAngleSolutionSet::Empty;
            }
            continue;
        }
        let t = -x0[i] / dir[i];
        if dir[i] > 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
    }
    if lo > hi {
        return ConstantAngleSolutionSet::Empty;
    }
    if (hi - lo).abs() < 1e-14 && lo.is_finite() {
        let t = lo;
        let mut pts = Vec::new();
        let x = [x0[0] + t * dir[0], x0[1] + t * dir[1], x0[2] + t * dir[2]];
        for s0 in [1.0, -1.0] {
            for s1 in [1.0, -1.0] {
                for s2 in [1.0, -1.0] {
                    let p = [
                        s0 * x[0].max(0.0).sqrt(),
                        s1 * x[1].max(0.0).sqrt(),
                        s2 * x[2].max(0.0).sqrt(),
                    ];
                    if !pts.iter().any(|q: &Vec3| {
                        (0..3).all(|i| (q[i] - p[i]).abs() < 1e-14)
                    }) {
                        pts.push(p);
                    }
                }
            }
        }
        return ConstantAngleSolutionSet::Points(pts);
    }
    // unbounded pieces are truncated for sampling purposes
    let t0 = if lo.is_finite() { lo } else { hi - 10.0 };
    let t1 = if hi.is_finite() { hi } else { lo + 10.0 };
    let mut curves = Vec::new();
    for s0 in [1.0, -1.0] {
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                let signs = [s0, s1, s2];
                // skip redundant sign choices on identically-zero components
                let redundant = (0..3).any(|i| {
                    signs[i] < 0.0 && x0[i].abs() < 1e-14 && dir[i].abs() < 1e-14
                });
                if !redundant {
                    curves.push(ConicCurve {
                        kind: CurveKind::Branch { x0, dir, t0, t1, signs },
                    });
                }
            }
        }
    }
    ConstantAngleSolutionSet::Curves(curves)
}

// ---------------------------------------------------------------------------
// totally geodesic surfaces
// ---------------------------------------------------------------------------

/// One totally geodesic distribution: a frame-constant 2-plane field with
/// its constant unit normal angles.
#[derive(Debug, Clone, Copy)]
pub struct TotallyGeodesicDistribution {
    /// Spanning left-invariant vectors, in frame components.
    pub span: [Vec3; 2],
    /// Constant angle functions of the normal.
    pub nu: Vec3,
}

/// Classification result for totally geodesic surfaces.
#[derive(Debug, Clone)]
pub enum TotallyGeodesic {
    /// Constant-curvature model: totally geodesic planes in all directions.
    ConstantCurvature,
    /// No totally geodesic surface exists.
    Empty,
    /// Exactly two integrable distributions.
    Distributions([TotallyGeodesicDistribution; 2]),
}

/// Classify the totally geodesic surfaces of a model: they exist iff (up to
/// relabeling and a global sign change) `e3 c3 = e1 c1 + e2 c2` with
/// `c2 > 0 > c1`, in which case they are the integral surfaces of
/// `{sqrt(-c1) E1 +- sqrt(c2) E2, E3}`.
pub fn totally_geodesic(model: &MetricLieGroupModel) -> TotallyGeodesic {
    if model.iso_dim == 6 {
        return TotallyGeodesic::ConstantCurvature;
    }
    let c0 = model.c_vec();
    let e0 = model.eps_vec();
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [1, 0, 2],
        [0, 2, 1],
        [2, 1, 0],
    ];
    for g in [1.0, -1.0] {
        for p in perms {
            let c = [g * c0[p[0]], g * c0[p[1]], g * c0[p[2]]];
            let e = [e0[p[0]], e0[p[1]], e0[p[2]]];
            let w = [e[0] * c[0], e[1] * c[1], e[2] * c[2]];
            let sum_ok = (w[2] - w[0] - w[1]).abs() < 1e-13;
            let signs_ok = c[0] < 0.0 && c[1] > 0.0;
            let nondeg = (w[0] - w[1]).abs() > 1e-13;
            let denom = e[0] * c[1] - e[1] * c[0];
            if sum_ok && signs_ok && nondeg && denom > 0.0 {
                let nu1 = (c[1] / denom).sqrt();
                let nu2 = (-c[0] / denom).sqrt();
                let mut out = [TotallyGeodesicDistribution { span: [[0.0; 3]; 2], nu: [0.0; 3] };
                    2];
                for (bi, s) in [1.0f64, -1.0].iter().enumerate() {
                    let mut v1 = [0.0; 3];
                    v1[p[0]] = (-c[0]).sqrt();
                    v1[p[1]] = s * c[1].sqrt();
                    let mut v2 = [0.0; 3];
                    v2[p[2]] = 1.0;
                    let mut nu = [0.0; 3];
                    nu[p[0]] = nu1;
                    nu[p[1]] = -s * nu2;
                    out[bi] = TotallyGeodesicDistribution { span: [v1, v2], nu };
                }
                return TotallyGeodesic::Distributions(out);
            }
        }
    }
    TotallyGeodesic::Empty
}

// ---------------------------------------------------------------------------
// integral surfaces of constant-angle distributions
// ---------------------------------------------------------------------------

fn flow_rk4(model: &MetricLieGroupModel, y: Vec3, t: f64, from: Vec3, steps: usize) -> Vec3 {
    if t == 0.0 {
        return from;
    }
    let velocity = |p: Vec3| -> Vec3 {
        match model.frame_b(ModelPoint::from_coords(p)) {
            Ok(b) => crate::linalg::mat3_vec(&b, y),
            Err(_) => [f64::NAN; 3],
        }
    };
    let h = t / steps as f64;
    let mut p = from;
    for _ in 0..steps {
        let k1 = velocity(p);
        let k2 = velocity(crate::linalg::axpy3(0.5 * h, k1, p));
        let k3 = velocity(crate::linalg::axpy3(0.5 * h, k2, p));
        let k4 = velocity(crate::linalg::axpy3(h, k3, p));
        for c in 0..3 {
            p[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
    }
    p
}

/// Integral surface of the constant-angle distribution of `nu`, built as
/// flow-of-flow from `q0`: first along `Y1`, then along `Y2`, with
///
/// * `nu3 != 0`: `Y1 = nu3 E1 - nu1 E3`, `Y2 = nu3 E2 - nu2 E3`;
/// * `nu3 == 0`: `Y1 = nu2 E1 - nu1 E2`, `Y2 = E3`.
///
/// Returns the patch together with the commutativity defect of the two
/// flows at the far corner (the chosen flows need not commute even though
/// the distribution is integrable).
pub struct IntegralSurface {
    pub patch: SurfacePatch,
    pub commutativity_defect: f64,
}

pub fn integral_surface(
    model: &MetricLieGroupModel,
    nu: Vec3,
    q0: ModelPoint,
    extent: f64,
) -> Result<IntegralSurface> {
    integral_surface_with_substep(model, nu, q0, extent, 1.0 / 400.0)
}

/// As [`integral_surface`] with an explicit flow substep length.
pub fn integral_surface_with_substep(
    model: &MetricLieGroupModel,
    nu: Vec3,
    q0: ModelPoint,
    extent: f64,
    substep: f64,
) -> Result<IntegralSurface> {
    let e = model.eps_vec();
    let c = model.c_vec();
    let sphere: f64 = (0..3).map(|i| e[i] * nu[i] * nu[i]).sum();
    if (sphere.abs() - 1.0).abs() > 1e-10 {
        return Err(Error::precondition(
            "unit angle triple",
            format!("sum eps nu^2 = {sphere}"),
        ));
    }
    let zeta: f64 = (0..3).map(|i| c[i] * nu[i] * nu[i]).sum();
    if zeta.abs() > 1e-10 {
        return Err(Error::precondition(
            "constant-angle admissibility sum c nu^2 = 0",
            format!("zeta = {zeta}"),
        ));
    }
    model.check_point(q0)?;
    let (mut y1, y2) = if nu[2].abs() > 1e-12 {
        ([nu[2], 0.0, -nu[0]], [0.0, nu[2], -nu[1]])
    } else {
        ([nu[1], -nu[0], 0.0], [0.0, 0.0, 1.0])
    };
    // orient the chart so the extracted normal is +nu, not -nu: the adapted
    // frame takes e1 along the u-direction (the Y1 flow)
    {
        let n1 = crate::linalg::inner_eps(e, y1, y1);
        let e1 = crate::linalg::scale3(1.0 / n1.abs().sqrt(), y1);
        let w = crate::linalg::axpy3(
            -n1.signum() * crate::linalg::inner_eps(e, y2, e1),
            e1,
            y2,
        );
        let n2 = crate::linalg::inner_eps(e, w, w);
        let e2 = crate::linalg::scale3(1.0 / n2.abs().sqrt(), w);
        let nt = crate::linalg::cross_eps(e, e1, e2);
        let q = crate::linalg::inner_eps(e, nt, nt);
        let n0 = crate::linalg::scale3(q.signum(), nt);
        let nu_amb = [e[0] * nu[0], e[1] * nu[1], e[2] * nu[2]];
        if crate::linalg::inner_eps(e, n0, nu_amb) < 0.0 {
            y1 = crate::linalg::scale3(-1.0, y1);
        }
    }
    // fixed substep counts keep the chart smooth in (u, v)
    let steps = ((extent.abs() / substep.abs().max(1e-6)).ceil() as usize).clamp(64, 65536);
    let m = model.clone();
    let q = q0.coords();
    let pos = move |u: f64, v: f64| -> Vec3 {
        let mid = flow_rk4(&m, y1, u, q, steps);
        flow_rk4(&m, y2, v, mid, steps)
    };
    // commutativity defect of the two flows at the far corner
    let m2 = model.clone();
    let a = {
        let mid = flow_rk4(&m2, y1, extent, q, steps);
        flow_rk4(&m2, y2, extent, mid, steps)
    };
    let b = {
        let mid = flow_rk4(&m2, y2, extent, q, steps);
        flow_rk4(&m2, y1, extent, mid, steps)
    };
    let defect = (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0f64, f64::max);
    if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
        return Err(Error::Integration {
            u: extent,
            v: extent,
            what: "flow left the model domain".into(),
        });
    }
    Ok(IntegralSurface {
        patch: SurfacePatch::new(model.clone(), pos).with_fd_step(1e-4),
        commutativity_defect: defect,
    })
}

// ---------------------------------------------------------------------------
// vertical cylinders with companions
// ---------------------------------------------------------------------------

/// A vertical cylinder in an `E(kappa, tau)` model, with its angular
/// companion (same angle functions, opposite mean curvature).
pub struct VerticalCylinder {
    pub patch: SurfacePatch,
    pub companion: SurfacePatch,
    /// `H = (-4 + kappa r^2)/(8 r)`.
    pub h: f64,
    /// Conformal factor of the induced metric (`kappa != 0` chart).
    pub conformal_factor: f64,
}

/// Build the radius-`r` vertical cylinder. For `kappa != 0` the chart is
/// `(r cos u, r sin u, 4r/(4 + kappa r^2) (v + tau r u))`; for `kappa = 0`
/// the unit-speed chart `(r cos(u/r), r sin(u/r), v + tau r u)` is used.
pub fn vertical_cylinder(model: &MetricLieGroupModel, r: f64) -> Result<VerticalCylinder> {
    let fam = crate::correspond::family_of(model)?;
    if fam.kind != FamilyKind::Ekt {
        return Err(Error::precondition(
            "Riemannian E(kappa, tau) model",
            format!("family {:?}", fam.kind),
        ));
    }
    let (kappa, tau) = (fam.kappa, fam.tau);
    if tau == 0.0 {
        return Err(Error::ProductLimit);
    }
    if 4.0 + kappa * r * r <= 0.0 {
        return Err(Error::precondition(
            "radius constraint 4 + kappa r^2 > 0",
            format!("kappa = {kappa}, r = {r}"),
        ));
    }
    let h = (-4.0 + kappa * r * r) / (8.0 * r);
    if kappa == 0.0 {
        // Nil3: unit-speed circle lift
        let m = model.clone();
        let patch = SurfacePatch::new(m.clone(), move |u, v| {
            [r * (u / r).cos(), r * (u / r).sin(), v + tau * r * u]
        })
        .with_jacobian(move |u, _| {
            [[-(u / r).sin(), (u / r).cos(), tau * r], [0.0, 0.0, 1.0]]
        })
        .with_hessian(move |u, _| {
            let mut h = [[[0.0; 3]; 2]; 2];
            h[0][0] = [-(u / r).cos() / r, -(u / r).sin() / r, 0.0];
            h
        });
        // companion: (-x(u), -y(u), -v + tau z(u)) with z(u) = r u
        let companion = SurfacePatch::new(m, move |u, v| {
            [-r * (u / r).cos(), -r * (u / r).sin(), -v + tau * r * u]
        })
        .with_jacobian(move |u, _| {
            [[(u / r).sin(), -(u / r).cos(), tau * r], [0.0, 0.0, -1.0]]
        })
        .with_hessian(move |u, _| {
            let mut h = [[[0.0; 3]; 2]; 2];
            h[0][0] = [(u / r).cos() / r, (u / r).sin() / r, 0.0];
            h
        });
        return Ok(VerticalCylinder { patch, companion, h, conformal_factor: r * r });
    }
    let cc = 4.0 * r / (4.0 + kappa * r * r);
    let m = model.clone();
    let patch = SurfacePatch::new(m.clone(), move |u, v| {
        [r * u.cos(), r * u.sin(), cc * (v + tau * r * u)]
    })
    .with_jacobian(move |u, _| {
        [[-r * u.sin(), r * u.cos(), cc * tau * r], [0.0, 0.0, cc]]
    })
    .with_hessian(move |u, _| {
        let mut hh = [[[0.0; 3]; 2]; 2];
        hh[0][0] = [-r * u.cos(), -r * u.sin(), 0.0];
        hh
    });
    // companion: parameter rotation by the companion angle,
    // (u, v) -> (-r cos(ub), r sin(ub), cc (vb - tau r ub)) with
    // ub = A u - B v, vb = B u + A v
    let den = kappa * kappa + 16.0 * h * h * tau * tau;
    let a = (kappa * kappa - 16.0 * h * h * tau * tau) / den;
    let b = 8.0 * h * kappa * tau / den;
    let companion = SurfacePatch::new(m, move |u, v| {
        let ub = a * u - b * v;
        let vb = b * u + a * v;
        [-r * ub.cos(), r * ub.sin(), cc * (vb - tau * r * ub)]
    })
    .with_jacobian(move |u, v| {
        let ub = a * u - b * v;
        let dub = [a, -b];
        let dvb = [b, a];
        [
            [
                r * ub.sin() * dub[0],
                r * ub.cos() * dub[0],
                cc * (dvb[0] - tau * r * dub[0]),
            ],
            [
                r * ub.sin() * dub[1],
                r * ub.cos() * dub[1],
                cc * (dvb[1] - tau * r * dub[1]),
            ],
        ]
    })
    .with_hessian(move |u, v| {
        let ub = a * u - b * v;
        let dub = [a, -b];
        let mut hh = [[[0.0; 3]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                hh[i][j] = [
                    r * ub.cos() * dub[i] * dub[j],
                    -r * ub.sin() * dub[i] * dub[j],
                    0.0,
                ];
            }
        }
        hh
    });
    Ok(VerticalCylinder {
        patch,
        companion,
        h,
        conformal_factor: 16.0 * r * r / ((4.0 + kappa * r * r) * (4.0 + kappa * r * r)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axes;
    use crate::model::{make_dim4_model, make_model, Signature, StructureConstants};
    use crate::surface::{extract_fundamental_data, extract_point};

    fn model(c: [f64; 3], eps: [i8; 3]) -> MetricLieGroupModel {
        make_model(
            StructureConstants::new(c[0], c[1], c[2]),
            Signature::new(eps[0], eps[1], eps[2]).unwrap(),
        )
    }

    fn check_constraints(m: &MetricLieGroupModel, ehat3: f64, nu: Vec3) {
        let e = m.eps_vec();
        let c = m.c_vec();
        let s: f64 = (0..3).map(|i| e[i] * nu[i] * nu[i]).sum();
        let z: f64 = (0..3).map(|i| c[i] * nu[i] * nu[i]).sum();
        assert!((s - ehat3).abs() < 1e-12, "sphere constraint {s} vs {ehat3}");
        assert!(z.abs() < 1e-12, "zeta = {z}");
    }

    #[test]
    fn constant_angle_classification() {
        // S3: empty
        assert!(matches!(
            constant_angle_set(&model([2.0, 2.0, 2.0], [1, 1, 1]), 1.0),
            ConstantAngleSolutionSet::Empty
        ));
        // Nil3: the circle nu3 = 0
        let nil = model([0.0, 0.0, 1.0], [1, 1, 1]);
        match constant_angle_set(&nil, 1.0) {
            ConstantAngleSolutionSet::Curves(cs) => {
                assert_eq!(cs.len(), 1);
                for k in 0..20 {
                    let nu = cs[0].sample(0.37 * k as f64);
                    assert!(nu[2].abs() < 1e-15);
                    check_constraints(&nil, 1.0, nu);
                }
            }
            _ => panic!("expected one circle"),
        }
        // Sol3-type c = (1,-1,0): two circles nu1 = +-nu2
        let sol = model([1.0, -1.0, 0.0], [1, 1, 1]);
        match constant_angle_set(&sol, 1.0) {
            ConstantAngleSolutionSet::Curves(cs) => {
                assert_eq!(cs.len(), 2);
                for cv in &cs {
                    for k in 0..20 {
                        let nu = cv.sample(0.41 * k as f64);
                        assert!((nu[0].abs() - nu[1].abs()).abs() < 1e-12);
                        check_constraints(&sol, 1.0, nu);
                    }
                }
            }
            _ => panic!("expected two circles"),
        }
        // generic mixed signs: cone nappes satisfy the constraints
        let mixed = model([2.0, -1.0, -1.0], [1, 1, 1]);
        match constant_angle_set(&mixed, 1.0) {
            ConstantAngleSolutionSet::Curves(cs) => {
                assert_eq!(cs.len(), 2);
                for cv in &cs {
                    for k in 0..20 {
                        check_constraints(&mixed, 1.0, cv.sample(0.3 * k as f64));
                    }
                }
            }
            _ => panic!("expected two nappes"),
        }
        // one zero with same-sign pair: isolated points
        let pts_model = model([1.0, 2.0, 0.0], [1, 1, 1]);
        match constant_angle_set(&pts_model, 1.0) {
            ConstantAngleSolutionSet::Points(p) => {
                assert_eq!(p.len(), 2);
                for nu in p {
                    check_constraints(&pts_model, 1.0, nu);
                }
            }
            _ => panic!("expected points"),
        }
        // flat: whole sphere
        assert!(matches!(
            constant_angle_set(&model([0.0, 0.0, 0.0], [1, 1, 1]), 1.0),
            ConstantAngleSolutionSet::WholeSphere
        ));
        // Lorentzian branch curves satisfy their constraints too
        let lor = model([0.0, 0.0, -2.0], [1, 1, -1]);
        match constant_angle_set(&lor, 1.0) {
            ConstantAngleSolutionSet::Curves(cs) => {
                for cv in &cs {
                    for k in 0..10 {
                        let nu = cv.sample(k as f64 / 10.0);
                        check_constraints(&lor, 1.0, nu);
                    }
                }
            }
            other => panic!("expected curves, got {}", other.describe()),
        }
    }

    #[test]
    fn totally_geodesic_classification() {
        // c = (-1, 1, 0): distributions {E1 +- E2, E3}
        match totally_geodesic(&model([-1.0, 1.0, 0.0], [1, 1, 1])) {
            TotallyGeodesic::Distributions(ds) => {
                for d in &ds {
                    assert!((d.span[0][0].abs() - 1.0).abs() < 1e-14);
                    assert!((d.span[0][1].abs() - 1.0).abs() < 1e-14);
                    assert_eq!(d.span[1], [0.0, 0.0, 1.0]);
                    assert!(d.nu[2].abs() < 1e-14);
                    assert!((d.nu[0] * d.nu[0] - 0.5).abs() < 1e-14);
                }
            }
            _ => panic!("expected two distributions"),
        }
        // c = (1, 2, 3): sum holds but the sign condition fails -> empty
        assert!(matches!(
            totally_geodesic(&model([1.0, 2.0, 3.0], [1, 1, 1])),
            TotallyGeodesic::Empty
        ));
        // Nil3 relabeled: empty
        assert!(matches!(
            totally_geodesic(&model([1.0, 0.0, 0.0], [1, 1, 1])),
            TotallyGeodesic::Empty
        ));
        // constant curvature flag
        assert!(matches!(
            totally_geodesic(&model([2.0, 2.0, 2.0], [1, 1, 1])),
            TotallyGeodesic::ConstantCurvature
        ));
    }

    #[test]
    fn integral_surface_plane_in_r3() {
        let r3 = model([0.0, 0.0, 0.0], [1, 1, 1]);
        let s = integral_surface(&r3, [0.0, 0.0, 1.0], ModelPoint::new(0.0, 0.0, 0.0), 0.5)
            .unwrap();
        // nu = (0,0,1), nu3 != 0 branch: Y1 = E1 - 0, wait nu3 = 1:
        // Y1 = nu3 E1 - nu1 E3 = E1, Y2 = E2: plane z = 0
        let p = s.patch.position(0.3, 0.4);
        assert!((p[0] - 0.3).abs() < 1e-9 && (p[1] - 0.4).abs() < 1e-9 && p[2].abs() < 1e-12);
        assert!(s.commutativity_defect < 1e-9);
    }

    #[test]
    fn integral_surface_nil3_vertical_plane() {
        // Nil3, nu = (cos b, sin b, 0): vertical plane through the axis
        let nil = model([0.0, 0.0, 1.0], [1, 1, 1]);
        let b = 0.7f64;
        let s = integral_surface(
            &nil,
            [b.cos(), b.sin(), 0.0],
            ModelPoint::new(0.0, 0.0, 0.0),
            0.5,
        )
        .unwrap();
        // Y1 = sin(b) E1 - cos(b) E2 direction: at origin E = coordinate
        // axes, so the u-line is the straight line in direction
        // (sin b, -cos b, 0); the surface is the vertical plane containing
        // it. The analytic plane: points (t sin b, -t cos b, s).
        for (u, v) in [(0.2, 0.1), (0.4, -0.3)] {
            let p = s.patch.position(u, v);
            // containment in the plane { x sin... normal (cos b, sin b, 0) }
            let d = p[0] * b.cos() + p[1] * b.sin();
            assert!(d.abs() < 1e-8, "off-plane distance {d}");
        }
        // extraction: constant angles and H = 0 within tolerance
        let axes = Axes::new(-0.2, 0.2, 9, -0.2, 0.2, 9);
        let g = extract_fundamental_data(&s.patch, &axes).unwrap();
        for d in &g.data.data {
            assert!((d.nu[0] - b.cos()).abs() < 1e-6, "nu1 {}", d.nu[0]);
            assert!((d.nu[1] - b.sin()).abs() < 1e-6);
            assert!(d.nu[2].abs() < 1e-6);
            assert!(d.h.abs() < 1e-5, "H = {}", d.h);
        }
    }

    #[test]
    fn integral_surface_rejects_inadmissible_angles() {
        let nil = model([0.0, 0.0, 1.0], [1, 1, 1]);
        assert!(integral_surface(&nil, [0.0, 0.0, 1.0], ModelPoint::new(0.0, 0.0, 0.0), 0.5)
            .is_err());
    }

    #[test]
    fn cylinder_values() {
        // Nil3 tau = 1/2, r = 1: H = -1/2
        let nil = make_dim4_model(FamilyKind::Ekt, 0.0, 0.5).unwrap();
        let cyl = vertical_cylinder(&nil, 1.0).unwrap();
        assert!((cyl.h + 0.5).abs() < 1e-15);
        let d = extract_point(&cyl.patch, 0.3, 0.2).unwrap();
        assert!((d.fundamental.h - cyl.h).abs() < 1e-10);
        // E(-1, 1), r = 1: H = -5/8, conformal factor 16/9
        let ekt = make_dim4_model(FamilyKind::Ekt, -1.0, 1.0).unwrap();
        let cyl = vertical_cylinder(&ekt, 1.0).unwrap();
        assert!((cyl.h + 0.625).abs() < 1e-15);
        assert!((cyl.conformal_factor - 16.0 / 9.0).abs() < 1e-12);
        let d = extract_point(&cyl.patch, 0.4, -0.1).unwrap();
        assert!((d.fundamental.h - cyl.h).abs() < 1e-10);
        // radius constraint
        assert!(vertical_cylinder(&ekt, 2.5).is_err());
    }

    #[test]
    fn cylinder_companion_shares_angles() {
        for (kappa, tau, r) in [(-1.0, 1.0, 1.0), (0.0, 0.5, 1.0), (2.0, 0.7, 0.8)] {
            let m = make_dim4_model(FamilyKind::Ekt, kappa, tau).unwrap();
            let cyl = vertical_cylinder(&m, r).unwrap();
            for (u, v) in [(0.3, 0.2), (0.6, -0.1), (0.0, 0.0)] {
                let a = extract_point(&cyl.patch, u, v).unwrap().fundamental;
                let b = extract_point(&cyl.companion, u, v).unwrap().fundamental;
                for i in 0..3 {
                    assert!(
                        (a.nu[i] - b.nu[i]).abs() < 1e-9,
                        "kappa={kappa} nu{i}: {} vs {}",
                        a.nu[i],
                        b.nu[i]
                    );
                }
                assert!((a.h + b.h).abs() < 1e-9, "H {} vs {}", a.h, b.h);
            }
        }
    }
}
