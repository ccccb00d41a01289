//! Shared surface constructors for the integration suites.

use mls_core::grid::Axes;
use mls_core::model::{make_model, MetricLieGroupModel, Signature, StructureConstants};
use mls_core::surface::{extract_fundamental_data, SurfaceGrid, SurfacePatch};

pub fn model(c: [f64; 3], eps: [i8; 3]) -> MetricLieGroupModel {
    make_model(
        StructureConstants::new(c[0], c[1], c[2]),
        Signature::new(eps[0], eps[1], eps[2]).unwrap(),
    )
}

pub fn r3() -> MetricLieGroupModel {
    model([0.0, 0.0, 0.0], [1, 1, 1])
}

/// Unit sphere in R^3, chart ordered so the inner normal comes out
/// (H = +1, nu = -position).
pub fn sphere_patch() -> SurfacePatch {
    SurfacePatch::new(r3(), |u, v| [v.sin() * u.cos(), v.sin() * u.sin(), v.cos()])
        .with_jacobian(|u, v| {
            [
                [-v.sin() * u.sin(), v.sin() * u.cos(), 0.0],
                [v.cos() * u.cos(), v.cos() * u.sin(), -v.sin()],
            ]
        })
        .with_hessian(|u, v| {
            let uu = [-v.sin() * u.cos(), -v.sin() * u.sin(), 0.0];
            let uv = [-v.cos() * u.sin(), v.cos() * u.cos(), 0.0];
            let vv = [-v.sin() * u.cos(), -v.sin() * u.sin(), -v.cos()];
            [[uu, uv], [uv, vv]]
        })
}

/// Unit-speed vertical cylinder over the unit circle in Nil3 (tau = 1/2).
pub fn nil3_cylinder_patch() -> SurfacePatch {
    let tau = 0.5;
    SurfacePatch::new(model([0.0, 0.0, 2.0 * tau], [1, 1, 1]), move |u, v| {
        [u.cos(), u.sin(), v + tau * u]
    })
    .with_jacobian(move |u, _| [[-u.sin(), u.cos(), tau], [0.0, 0.0, 1.0]])
    .with_hessian(move |u, _| {
        let mut h = [[[0.0; 3]; 2]; 2];
        h[0][0] = [-u.cos(), -u.sin(), 0.0];
        h
    })
}

/// Vertical cylinder over a parametrized plane curve in an E(kappa, tau)
/// model (chart `(u, v) -> (x(u), y(u), v)`).
pub fn vertical_cylinder_over_curve(
    m: MetricLieGroupModel,
    x: impl Fn(f64) -> (f64, f64, f64, f64, f64, f64) + Send + Sync + Copy + 'static,
) -> SurfacePatch {
    // x(u) returns (x, y, x', y', x'', y'')
    SurfacePatch::new(m, move |u, v| {
        let (a, b, _, _, _, _) = x(u);
        [a, b, v]
    })
    .with_jacobian(move |u, _| {
        let (_, _, da, db, _, _) = x(u);
        [[da, db, 0.0], [0.0, 0.0, 1.0]]
    })
    .with_hessian(move |u, _| {
        let (_, _, _, _, dda, ddb) = x(u);
        let mut h = [[[0.0; 3]; 2]; 2];
        h[0][0] = [dda, ddb, 0.0];
        h
    })
}

pub fn extract(patch: &SurfacePatch, u0: f64, u1: f64, v0: f64, v1: f64, n: usize) -> SurfaceGrid {
    let axes = Axes::new(u0, u1, n, v0, v1, n);
    extract_fundamental_data(patch, &axes).unwrap()
}

pub fn sup3(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0f64, f64::max)
}
