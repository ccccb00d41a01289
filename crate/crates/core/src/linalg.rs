//! Small dense linear algebra over `[f64; 3]` / `[[f64; 3]; 3]`.
//!
//! Matrices are row-major: `m[i][j]` is row `i`, column `j`. The metric of
//! signature `eps = (eps1, eps2, eps3)` enters through `inner_eps` and
//! `cross_eps`; the Euclidean case is `eps = [1,1,1]`.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];
pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub const ZERO3: Vec3 = [0.0; 3];
pub const ID3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale3(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn axpy3(s: f64, a: Vec3, b: Vec3) -> Vec3 {
    [s * a[0] + b[0], s * a[1] + b[1], s * a[2] + b[2]]
}

pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

/// Semi-Riemannian inner product `sum_i eps_i a_i b_i`.
pub fn inner_eps(eps: Vec3, a: Vec3, b: Vec3) -> f64 {
    eps[0] * a[0] * b[0] + eps[1] * a[1] * b[1] + eps[2] * a[2] * b[2]
}

/// Cross product of the metric with signs `eps`, in eps-orthonormal
/// components: `E1 x E2 = eps3 E3` and cyclic.
pub fn cross_eps(eps: Vec3, a: Vec3, b: Vec3) -> Vec3 {
    [
        eps[0] * (a[1] * b[2] - a[2] * b[1]),
        eps[1] * (a[2] * b[0] - a[0] * b[2]),
        eps[2] * (a[0] * b[1] - a[1] * b[0]),
    ]
}

pub fn mat3_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mat3_add(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j] + b[i][j];
        }
    }
    out
}

pub fn mat3_sub(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}

pub fn mat3_scale(s: f64, a: &Mat3) -> Mat3 {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    out
}

pub fn mat3_transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn mat3_max_abs(m: &Mat3) -> f64 {
    let mut out: f64 = 0.0;
    for row in m {
        for x in row {
            out = out.max(x.abs());
        }
    }
    out
}

/// Inverse of a 3x3 matrix by cofactors. Panics on exactly singular input;
/// callers work with change-of-basis matrices that stay well conditioned.
pub fn mat3_inv(m: &Mat3) -> Mat3 {
    let d = det3(m);
    assert!(d != 0.0, "singular 3x3 matrix");
    let inv_d = 1.0 / d;
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let r0 = (j + 1) % 3;
            let r1 = (j + 2) % 3;
            let c0 = (i + 1) % 3;
            let c1 = (i + 2) % 3;
            out[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) * inv_d;
        }
    }
    out
}

pub fn mat2_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn mat2_inv(m: &Mat2) -> Mat2 {
    let d = det2(m);
    assert!(d != 0.0, "singular 2x2 matrix");
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

pub fn mat2_solve(m: &Mat2, rhs: Vec2) -> Vec2 {
    mat2_vec(&mat2_inv(m), rhs)
}

// ---------------------------------------------------------------------------
// Entire analytic helpers: alpha(t) = sum (-t)^n/(2n)!, beta(t) = sum (-t)^n/(2n+1)!
// so that cos(r z) = alpha(r^2 z^2) and sin(r z)/r = z beta(r^2 z^2). They keep
// every model quantity smooth in the structure constants across c1*c2 = 0.
// ---------------------------------------------------------------------------

/// Threshold below which the truncated series replaces the closed form.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// `alpha(t) = cos(sqrt t)` for `t >= 0`, `cosh(sqrt -t)` for `t < 0`.
pub fn alpha(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        // 1 - t/2 + t^2/24 - t^3/720; next term ~ t^4/40320 < 3e-21
        1.0 + t * (-0.5 + t * (1.0 / 24.0 + t * (-1.0 / 720.0)))
    } else if t > 0.0 {
        t.sqrt().cos()
    } else {
        (-t).sqrt().cosh()
    }
}

/// `beta(t) = sin(sqrt t)/sqrt t` for `t >= 0`, `sinh(sqrt -t)/sqrt -t` for `t < 0`.
pub fn beta(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        1.0 + t * (-1.0 / 6.0 + t * (1.0 / 120.0 + t * (-1.0 / 5040.0)))
    } else if t > 0.0 {
        let r = t.sqrt();
        r.sin() / r
    } else {
        let r = (-t).sqrt();
        r.sinh() / r
    }
}

/// `gamma2(t) = (1 - cos(sqrt t))/t`, the versine ratio; `1/2` at `t = 0`.
pub fn gamma2(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        0.5 + t * (-1.0 / 24.0 + t * (1.0 / 720.0 + t * (-1.0 / 40320.0)))
    } else {
        (1.0 - alpha(t)) / t
    }
}

// ---------------------------------------------------------------------------
// so3^eps: matrices A with eps_a A^a_b + eps_b A^b_a = 0, generated by the
// eps-cross product. exp is closed-form through A^3 = -q A with
// q = eps1 eps2 eps3 <xi, xi>_eps.
// ---------------------------------------------------------------------------

/// Matrix of `v -> xi x v` (eps-cross product) as an element of so3^eps.
pub fn so3_eps_generator(eps: Vec3, xi: Vec3) -> Mat3 {
    [
        [0.0, -eps[0] * xi[2], eps[0] * xi[1]],
        [eps[1] * xi[2], 0.0, -eps[1] * xi[0]],
        [-eps[2] * xi[1], eps[2] * xi[0], 0.0],
    ]
}

/// Closed-form exponential of `A in so3^eps`:
/// `exp(A) = I + beta(q) A + gamma2(q) A^2` with `q = eps1 eps2 eps3 <xi,xi>_eps`
/// read off the entries of `A` (so the rotation/boost split is automatic).
pub fn so3_eps_exp(eps: Vec3, a: &Mat3) -> Mat3 {
    // xi from the generator layout above
    let xi = [eps[1] * a[1][2] * -1.0, eps[0] * a[0][2], eps[1] * a[1][0]];
    let q = eps[0] * eps[1] * eps[2] * inner_eps(eps, xi, xi);
    let a2 = mat3_mul(a, a);
    let (b, g) = (beta(q), gamma2(q));
    let mut out = ID3;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] += b * a[i][j] + g * a2[i][j];
        }
    }
    out
}

/// Re-orthonormalize the columns of `m` with respect to `diag(eps)` by
/// Gram-Schmidt, preserving `det = 1`. Column `b` keeps norm `eps_b`.
pub fn gram_schmidt_eps(eps: Vec3, m: &Mat3) -> Mat3 {
    let col = |m: &Mat3, j: usize| -> Vec3 { [m[0][j], m[1][j], m[2][j]] };
    let mut v1 = col(m, 0);
    let n1 = inner_eps(eps, v1, v1);
    v1 = scale3(1.0 / n1.abs().sqrt(), v1);
    let mut v2 = col(m, 1);
    v2 = axpy3(-eps[0] * inner_eps(eps, v2, v1), v1, v2);
    let n2 = inner_eps(eps, v2, v2);
    v2 = scale3(1.0 / n2.abs().sqrt(), v2);
    // third column determined by the first two up to sign; cross keeps det = 1
    let v3 = scale3(eps[2], cross_eps(eps, v1, v2));
    [
        [v1[0], v2[0], v3[0]],
        [v1[1], v2[1], v3[1]],
        [v1[2], v2[2], v3[2]],
    ]
}

/// Scale `v` so that `|<v, v>_eps| = 1`. Panics on eps-null input.
pub fn normalize_eps(eps: Vec3, v: Vec3) -> Vec3 {
    let n = inner_eps(eps, v, v).abs();
    assert!(n > 0.0, "cannot normalize an eps-null vector");
    scale3(1.0 / n.sqrt(), v)
}

/// Max-abs defect of `M^t diag(eps) M = diag(eps)`.
pub fn so3_eps_defect(eps: Vec3, m: &Mat3) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                s += m[k][a] * eps[k] * m[k][b];
            }
            let want = if a == b { eps[a] } else { 0.0 };
            worst = worst.max((s - want).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expm_series(a: &Mat3) -> Mat3 {
        let mut out = ID3;
        let mut term = ID3;
        for k in 1..60 {
            term = mat3_scale(1.0 / k as f64, &mat3_mul(&term, a));
            out = mat3_add(&out, &term);
        }
        out
    }

    #[test]
    fn exp_matches_series_riemannian_and_lorentzian() {
        for eps in [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0]] {
            for xi in [[0.3, -0.7, 0.5], [1.4, 0.2, -0.9], [1e-6, -2e-6, 3e-7]] {
                let a = so3_eps_generator(eps, xi);
                let e1 = so3_eps_exp(eps, &a);
                let e2 = expm_series(&a);
                let err = mat3_max_abs(&mat3_sub(&e1, &e2));
                assert!(err < 1e-13, "eps={eps:?} xi={xi:?} err={err}");
            }
        }
    }

    #[test]
    fn exp_stays_in_group() {
        for eps in [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0]] {
            let a = so3_eps_generator(eps, [0.4, 0.1, -0.8]);
            let e = so3_eps_exp(eps, &a);
            assert!(so3_eps_defect(eps, &e) < 1e-12);
            assert!((det3(&e) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_schmidt_restores_group_membership() {
        let eps = [1.0, 1.0, -1.0];
        let mut m = so3_eps_exp(eps, &so3_eps_generator(eps, [0.2, -0.5, 0.3]));
        m[1][0] += 3e-6;
        m[2][2] -= 2e-6;
        let g = gram_schmidt_eps(eps, &m);
        assert!(so3_eps_defect(eps, &g) < 1e-14);
        assert!((det3(&g) - 1.0).abs() < 1e-13);
        assert!(mat3_max_abs(&mat3_sub(&g, &m)) < 1e-4);
    }

    #[test]
    fn series_branch_is_continuous() {
        // values straddling the series/closed-form switch agree to 1e-12
        for t in [SERIES_THRESHOLD * 0.999, SERIES_THRESHOLD * 1.001] {
            for s in [t, -t] {
                let closed = if s > 0.0 { s.sqrt().cos() } else { (-s).sqrt().cosh() };
                assert!((alpha(s) - closed).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mat3_inv_roundtrip() {
        let m = [[2.0, 0.3, -0.1], [0.0, 1.5, 0.7], [-0.4, 0.2, 1.1]];
        let inv = mat3_inv(&m);
        let err = mat3_max_abs(&mat3_sub(&mat3_mul(&m, &inv), &ID3));
        assert!(err < 1e-14);
    }
}
