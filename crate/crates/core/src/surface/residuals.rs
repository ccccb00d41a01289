//! Numerical evaluation of the compatibility equations and derived fields.
//!
//! Everything here works on grids of fundamental data. Tangent fields are
//! held in adapted-frame components; intrinsic derivatives go through the
//! connection form `omega^1_2`, which is computed from the chart gauge via
//! the Cartan structure equations (no ambient data needed, so the same code
//! serves extracted and prescribed data).

use crate::grid::{du_at, dv_at, Axes, Grid, ResidualStats};
use crate::linalg::{det2, mat2_inv, Mat2, Vec2, Vec3};
use crate::surface::SurfaceGrid;
use crate::Result;

/// Boundary band excluded from residual statistics (stencil influence).
pub const INTERIOR_MARGIN: usize = 4;

/// Differential operators over one grid: directional derivatives along the
/// adapted frame, gradients, covariant derivatives and the connection form.
pub struct GridCalc {
    pub axes: Axes,
    pub ehat: Vec3,
    /// Chart gauge `C` per node: `e_k = C[0][k] d_u + C[1][k] d_v`.
    pub gauge: Grid<Mat2>,
    /// `omega^1_2` coefficients in coordinates: `omega12 = p du + q dv`.
    pub w12_coord: Grid<Vec2>,
    /// `omega^1_2(e_k)` per node.
    pub w12: Grid<Vec2>,
}

/// Solve the structure equations `d omega^i + omega^i_k ^ omega^k = 0`
/// for `omega^1_2` given the coframe in coordinates.
pub fn omega12_from_gauge(axes: &Axes, gauge: &Grid<Mat2>, ehat: Vec3) -> Grid<Vec2> {
    let nu = gauge.nu;
    let nv = gauge.nv;
    // coframe rows W[k][m] = omega^k(d_m) = (C^{-1})[k][m]
    let winv = gauge.map(mat2_inv);
    let w_entry = |k: usize, m: usize| -> Grid<f64> { winv.map(|w| w[k][m]) };
    let w00 = w_entry(0, 0);
    let w01 = w_entry(0, 1);
    let w10 = w_entry(1, 0);
    let w11 = w_entry(1, 1);
    let s12 = ehat[0] * ehat[1];
    Grid::from_fn(nu, nv, |i, j| {
        let dw1 = du_at(&w01, axes, i, j) - dv_at(&w00, axes, i, j);
        let dw2 = du_at(&w11, axes, i, j) - dv_at(&w10, axes, i, j);
        // [-W11  W10 ] [p]   [dw1]
        // [ s W01 -s W00] [q] = [dw2]
        let m = [
            [-*w11.at(i, j), *w10.at(i, j)],
            [s12 * *w01.at(i, j), -s12 * *w00.at(i, j)],
        ];
        crate::linalg::mat2_solve(&m, [dw1, dw2])
    })
}

impl GridCalc {
    pub fn new(axes: &Axes, gauge: &Grid<Mat2>, ehat: Vec3) -> GridCalc {
        let w12_coord = omega12_from_gauge(axes, gauge, ehat);
        let w12 = Grid::from_fn(gauge.nu, gauge.nv, |i, j| {
            let c = gauge.at(i, j);
            let pq = w12_coord.at(i, j);
            [
                pq[0] * c[0][0] + pq[1] * c[1][0],
                pq[0] * c[0][1] + pq[1] * c[1][1],
            ]
        });
        GridCalc { axes: axes.clone(), ehat, gauge: gauge.clone(), w12_coord, w12 }
    }

    pub fn from_surface(s: &SurfaceGrid) -> GridCalc {
        GridCalc::new(&s.axes, &s.gauge, s.ehat)
    }

    /// Directional derivative of a scalar grid along `e_k` at node `(i, j)`.
    pub fn ek_of(&self, f: &Grid<f64>, i: usize, j: usize, k: usize) -> f64 {
        let c = self.gauge.at(i, j);
        c[0][k] * du_at(f, &self.axes, i, j) + c[1][k] * dv_at(f, &self.axes, i, j)
    }

    /// Gradient of a scalar grid in frame components.
    pub fn grad(&self, f: &Grid<f64>, i: usize, j: usize) -> Vec2 {
        [
            self.ehat[0] * self.ek_of(f, i, j, 0),
            self.ehat[1] * self.ek_of(f, i, j, 1),
        ]
    }

    pub fn finner(&self, a: Vec2, b: Vec2) -> f64 {
        self.ehat[0] * a[0] * b[0] + self.ehat[1] * a[1] * b[1]
    }

    pub fn jrot(&self, a: Vec2) -> Vec2 {
        [-self.ehat[0] * a[1], self.ehat[1] * a[0]]
    }

    /// Covariant derivative along `e_k` of a tangent field in frame
    /// components: `nabla_{e_k} e_1 = -ehat1 ehat2 w12(e_k) e_2`,
    /// `nabla_{e_k} e_2 = w12(e_k) e_1`.
    pub fn covd(&self, f0: &Grid<f64>, f1: &Grid<f64>, i: usize, j: usize, k: usize) -> Vec2 {
        let w = self.w12.at(i, j)[k];
        [
            self.ek_of(f0, i, j, k) + f1.at(i, j) * w,
            self.ek_of(f1, i, j, k) - f0.at(i, j) * self.ehat[0] * self.ehat[1] * w,
        ]
    }

    /// Interior index ranges for residual statistics.
    pub fn interior(&self) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let nu = self.gauge.nu;
        let nv = self.gauge.nv;
        let m = INTERIOR_MARGIN.min(nu / 2).min(nv / 2);
        (m..nu - m, m..nv - m)
    }
}

/// Intrinsic curvature grid of a surface (induced metric only).
pub fn intrinsic_curvature(s: &SurfaceGrid) -> Grid<f64> {
    // precompute the coordinate coefficients once, then differentiate
    let calc = GridCalc::from_surface(s);
    let p = calc.w12_coord.map(|pq| pq[0]);
    let q = calc.w12_coord.map(|pq| pq[1]);
    Grid::from_fn(s.gauge.nu, s.gauge.nv, |i, j| {
        let d = du_at(&q, &calc.axes, i, j) - dv_at(&p, &calc.axes, i, j);
        calc.ehat[1] * d * det2(calc.gauge.at(i, j))
    })
}

/// Per-equation residual statistics for the compatibility equations.
#[derive(Debug, Clone)]
pub struct CompatibilityReport {
    /// (i) `K_intrinsic - [ehat3 det S - ehat1 ehat2 sum a_i nu_i^2]`.
    pub gauss: ResidualStats,
    /// (ii) Codazzi tested on `(X, Y) = (e1, e2)`.
    pub codazzi: ResidualStats,
    /// (iii) algebraic relations (worst entry per node).
    pub algebraic: ResidualStats,
    /// (iv) the three `nabla T_i` equations.
    pub grad_t: [ResidualStats; 3],
    /// (v) the three `nabla nu_i` equations.
    pub grad_nu: [ResidualStats; 3],
}

impl CompatibilityReport {
    pub fn max_overall(&self) -> f64 {
        let mut m = self.gauss.max.max(self.codazzi.max).max(self.algebraic.max);
        for s in self.grad_t.iter().chain(self.grad_nu.iter()) {
            m = m.max(s.max);
        }
        m
    }
}

impl std::fmt::Display for CompatibilityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "gauss      (i)   {}", self.gauss)?;
        writeln!(f, "codazzi    (ii)  {}", self.codazzi)?;
        writeln!(f, "algebraic  (iii) {}", self.algebraic)?;
        for (i, s) in self.grad_t.iter().enumerate() {
            writeln!(f, "grad T_{}   (iv)  {}", i + 1, s)?;
        }
        for (i, s) in self.grad_nu.iter().enumerate() {
            writeln!(f, "grad nu_{}  (v)   {}", i + 1, s)?;
        }
        Ok(())
    }
}

/// Evaluate all compatibility equations of a data grid as residuals.
pub fn compatibility_residuals(s: &SurfaceGrid) -> Result<CompatibilityReport> {
    s.axes.check_size(2 * INTERIOR_MARGIN + 1)?;
    let calc = GridCalc::from_surface(s);
    let e = s.model.eps_vec();
    let eh = s.ehat;
    let mu = s.model.mu;
    let a = s.model.a;
    let (iu, jv) = calc.interior();

    let nu_g: Vec<Grid<f64>> = (0..3).map(|i| s.nu_grid(i)).collect();
    let t0: Vec<Grid<f64>> = (0..3).map(|i| s.data.map(|d| d.t[i][0])).collect();
    let t1: Vec<Grid<f64>> = (0..3).map(|i| s.data.map(|d| d.t[i][1])).collect();
    // S e_k in frame components: (Se_k) = ehat_l s[k][l] e_l
    let sx: Vec<[Grid<f64>; 2]> = (0..2)
        .map(|k| {
            [
                s.data.map(|d| eh[0] * d.s[k][0]),
                s.data.map(|d| eh[1] * d.s[k][1]),
            ]
        })
        .collect();

    let mut gauss = Vec::new();
    let mut codazzi = Vec::new();
    let mut algebraic = Vec::new();
    let mut grad_t: [Vec<f64>; 3] = Default::default();
    let mut grad_nu: [Vec<f64>; 3] = Default::default();

    let kint = intrinsic_curvature(s);
    for i in iu.clone() {
        for j in jv.clone() {
            let d = s.data.at(i, j);
            // (i)
            gauss.push(kint.at(i, j) - d.k);
            // (iii)
            let mut worst: f64 = 0.0;
            let sum_nu: f64 = (0..3).map(|x| e[x] * d.nu[x] * d.nu[x]).sum();
            worst = worst.max((sum_nu - eh[2]).abs());
            for p in 0..3 {
                for q in 0..3 {
                    let tpq = calc.finner(d.t[p], d.t[q]);
                    let want = e[p] * if p == q { 1.0 } else { 0.0 } - eh[2] * d.nu[p] * d.nu[q];
                    worst = worst.max((tpq - want).abs());
                }
                let z: f64 = (0..2)
                    .map(|k| (0..3).map(|x| e[x] * d.nu[x] * d.t[x][k]).sum::<f64>().abs())
                    .fold(0.0, f64::max);
                worst = worst.max(z);
            }
            algebraic.push(worst);
            // (ii) Codazzi on (e1, e2):
            // nabla_{e1}(S e2) - nabla_{e2}(S e1) - S[e1,e2]
            //   = eps1 eps2 eps3 (<e1,T> e2 - <e2,T> e1)
            let n1 = calc.covd(&sx[1][0], &sx[1][1], i, j, 0);
            let n2 = calc.covd(&sx[0][0], &sx[0][1], i, j, 1);
            // [e1,e2] = w12(e1) e1 + ehat1 ehat2 w12(e2) e2
            let w = calc.w12.at(i, j);
            let br = [w[0], eh[0] * eh[1] * w[1]];
            let se1 = [*sx[0][0].at(i, j), *sx[0][1].at(i, j)];
            let se2 = [*sx[1][0].at(i, j), *sx[1][1].at(i, j)];
            let sbr = [
                br[0] * se1[0] + br[1] * se2[0],
                br[0] * se1[1] + br[1] * se2[1],
            ];
            let mut taux = [0.0; 2];
            for x in 0..3 {
                for k in 0..2 {
                    taux[k] += a[x] * d.nu[x] * d.t[x][k];
                }
            }
            let sgn = e[0] * e[1] * e[2];
            // <e1, T> = ehat1 taux[0], <e2, T> = ehat2 taux[1]
            let rhs = [
                -sgn * eh[1] * taux[1], // coefficient on e1
                sgn * eh[0] * taux[0],  // coefficient on e2
            ];
            let res = [
                n1[0] - n2[0] - sbr[0] - rhs[0],
                n1[1] - n2[1] - sbr[1] - rhs[1],
            ];
            codazzi.push(res[0].abs().max(res[1].abs()));
            // (iv) and (v), cyclically
            for (p, q, r) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
                for k in 0..2 {
                    let lhs = calc.covd(&t0[p], &t1[p], i, j, k);
                    let sek = [*sx[k][0].at(i, j), *sx[k][1].at(i, j)];
                    // <e_k, T_q> = ehat_k t_q^k
                    let xq = eh[k] * d.t[q][k];
                    let xr = eh[k] * d.t[r][k];
                    let coef = e[q] * e[r];
                    let rhs = [
                        eh[2] * d.nu[p] * sek[0] + coef * (mu[r] * xr * d.t[q][0] - mu[q] * xq * d.t[r][0]),
                        eh[2] * d.nu[p] * sek[1] + coef * (mu[r] * xr * d.t[q][1] - mu[q] * xq * d.t[r][1]),
                    ];
                    grad_t[p].push((lhs[0] - rhs[0]).abs().max((lhs[1] - rhs[1]).abs()));
                }
                let gnu = calc.grad(&nu_g[p], i, j);
                let st = [
                    d.t[p][0] * *sx[0][0].at(i, j) + d.t[p][1] * *sx[1][0].at(i, j),
                    d.t[p][0] * *sx[0][1].at(i, j) + d.t[p][1] * *sx[1][1].at(i, j),
                ];
                let coef = e[q] * e[r];
                let rhs = [
                    -st[0] + coef * (mu[r] * d.nu[q] * d.t[r][0] - mu[q] * d.nu[r] * d.t[q][0]),
                    -st[1] + coef * (mu[r] * d.nu[q] * d.t[r][1] - mu[q] * d.nu[r] * d.t[q][1]),
                ];
                grad_nu[p].push((gnu[0] - rhs[0]).abs().max((gnu[1] - rhs[1]).abs()));
            }
        }
    }
    Ok(CompatibilityReport {
        gauss: ResidualStats::from_samples(gauss),
        codazzi: ResidualStats::from_samples(codazzi),
        algebraic: ResidualStats::from_samples(algebraic),
        grad_t: grad_t.map(ResidualStats::from_samples),
        grad_nu: grad_nu.map(ResidualStats::from_samples),
    })
}

/// Derived fields of a data grid: `zeta`, the vector fields `X_i`, the
/// robust `psi`, and the auxiliary Codazzi field `T = sum a_i nu_i T_i`.
pub struct DerivedFields {
    pub zeta: Grid<f64>,
    pub psi: Grid<f64>,
    pub x: [Grid<Vec2>; 3],
    pub t_aux: Grid<Vec2>,
    /// `|psi - (4 H^2 ehat1 ehat2 + zeta^2)|` over interior nodes.
    pub psi_consistency: ResidualStats,
}

/// Compute the derived fields. The `X_i` need one finite-difference layer
/// (gradients of the angle functions).
pub fn derived_fields(s: &SurfaceGrid) -> Result<DerivedFields> {
    s.axes.check_size(5)?;
    let calc = GridCalc::from_surface(s);
    let e = s.model.eps_vec();
    let eh = s.ehat;
    let c = s.model.c_vec();
    let a = s.model.a;
    let nu_g: Vec<Grid<f64>> = (0..3).map(|i| s.nu_grid(i)).collect();
    let nu_pts = s.gauge.nu;
    let nv_pts = s.gauge.nv;

    let zeta = Grid::from_fn(nu_pts, nv_pts, |i, j| {
        let d = s.data.at(i, j);
        (0..3).map(|x| c[x] * d.nu[x] * d.nu[x]).sum()
    });
    let grads: Vec<Grid<Vec2>> = (0..3)
        .map(|x| Grid::from_fn(nu_pts, nv_pts, |i, j| calc.grad(&nu_g[x], i, j)))
        .collect();
    let mk_x = |p: usize, q: usize, r: usize| -> Grid<Vec2> {
        Grid::from_fn(nu_pts, nv_pts, |i, j| {
            let d = s.data.at(i, j);
            let jg = calc.jrot(*grads[p].at(i, j));
            let coef = e[q] * e[r];
            [
                jg[0] + coef * (d.nu[r] * grads[q].at(i, j)[0] - d.nu[q] * grads[r].at(i, j)[0]),
                jg[1] + coef * (d.nu[r] * grads[q].at(i, j)[1] - d.nu[q] * grads[r].at(i, j)[1]),
            ]
        })
    };
    let x = [mk_x(0, 1, 2), mk_x(1, 2, 0), mk_x(2, 0, 1)];
    let psi = Grid::from_fn(nu_pts, nv_pts, |i, j| {
        let d = s.data.at(i, j);
        // index with the largest |eps_g - ehat3 nu_g^2|
        let mut best = 0;
        let mut best_den = 0.0f64;
        for g in 0..3 {
            let den = e[g] - eh[2] * d.nu[g] * d.nu[g];
            if den.abs() > best_den.abs() {
                best = g;
                best_den = den;
            }
        }
        let xg = *x[best].at(i, j);
        calc.finner(xg, xg) / best_den
    });
    let t_aux = Grid::from_fn(nu_pts, nv_pts, |i, j| {
        let d = s.data.at(i, j);
        let mut out = [0.0; 2];
        for xi in 0..3 {
            for k in 0..2 {
                out[k] += a[xi] * d.nu[xi] * d.t[xi][k];
            }
        }
        out
    });
    let (iu, jv) = calc.interior();
    let mut cons = Vec::new();
    for i in iu {
        for j in jv.clone() {
            let d = s.data.at(i, j);
            let want = 4.0 * d.h * d.h * eh[0] * eh[1] + zeta.at(i, j) * zeta.at(i, j);
            cons.push(psi.at(i, j) - want);
        }
    }
    Ok(DerivedFields {
        zeta,
        psi,
        x,
        t_aux,
        psi_consistency: ResidualStats::from_samples(cons),
    })
}

/// Unique shape-operator candidate from `T_i` and `nu_i` alone:
/// `S X = sum_a eps_a (mu_a <T_a, X> J T_a - <grad nu_a, X> T_a)`,
/// with the self-adjointness defect
/// `sum_a (eps_a <grad nu_a, J T_a> + eps1 eps2 eps3 c_a nu_a^2)`.
pub struct ShapeCandidate {
    /// Candidate `<S e_k, e_l>` per node.
    pub s: Grid<Mat2>,
    /// Pointwise self-adjointness defect.
    pub defect: Grid<f64>,
    pub defect_stats: ResidualStats,
}

pub fn shape_from_t_nu(s: &SurfaceGrid) -> Result<ShapeCandidate> {
    s.axes.check_size(5)?;
    let calc = GridCalc::from_surface(s);
    let e = s.model.eps_vec();
    let eh = s.ehat;
    let mu = s.model.mu;
    let c = s.model.c_vec();
    let nu_g: Vec<Grid<f64>> = (0..3).map(|i| s.nu_grid(i)).collect();
    let nu_pts = s.gauge.nu;
    let nv_pts = s.gauge.nv;
    let grads: Vec<Grid<Vec2>> = (0..3)
        .map(|x| Grid::from_fn(nu_pts, nv_pts, |i, j| calc.grad(&nu_g[x], i, j)))
        .collect();
    let cand = Grid::from_fn(nu_pts, nv_pts, |i, j| {
        let d = s.data.at(i, j);
        let mut m = [[0.0; 2]; 2];
        for k in 0..2 {
            let mut col = [0.0; 2];
            for al in 0..3 {
                let t = d.t[al];
                let jt = calc.jrot(t);
                let t_dot_ek = eh[k] * t[k];
                let gn = *grads[al].at(i, j);
                // <grad nu, e_k> = e_k(nu); grad comps carry an ehat_k factor
                let gn_dot_ek = eh[k] * gn[k];
                for l in 0..2 {
                    col[l] += e[al] * (mu[al] * t_dot_ek * jt[l] - gn_dot_ek * t[l]);
                }
            }
            for l in 0..2 {
                m[k][l] = eh[l] * col[l];
            }
        }
        m
    });
    let defect = Grid::from_fn(nu_pts, nv_pts, |i, j| {
        let d = s.data.at(i, j);
        let mut out = 0.0;
        for al in 0..3 {
            let gn = *grads[al].at(i, j);
            out += e[al] * calc.finner(gn, calc.jrot(d.t[al]))
                + e[0] * e[1] * e[2] * c[al] * d.nu[al] * d.nu[al];
        }
        out
    });
    let (iu, jv) = calc.interior();
    let mut samples = Vec::new();
    for i in iu {
        for j in jv.clone() {
            samples.push(*defect.at(i, j));
        }
    }
    Ok(ShapeCandidate {
        s: cand,
        defect,
        defect_stats: ResidualStats::from_samples(samples),
    })
}

/// Residuals of the divergence identities
/// `div(T3) = 2 H nu3 + (c2 - c1) nu1 nu2` and `div(J T3) = c3 nu3`.
/// Stated for the Riemannian case; evaluation elsewhere is flagged.
pub struct DivergenceReport {
    pub div_t3: ResidualStats,
    pub div_jt3: ResidualStats,
    /// `false` when the grid is not Riemannian (identities unproven there).
    pub riemannian: bool,
}

pub fn divergence_identities(s: &SurfaceGrid) -> Result<DivergenceReport> {
    s.axes.check_size(2 * INTERIOR_MARGIN + 1)?;
    let calc = GridCalc::from_surface(s);
    let c = s.model.c_vec();
    let t3_0 = s.data.map(|d| d.t[2][0]);
    let t3_1 = s.data.map(|d| d.t[2][1]);
    let jt3_0 = s.data.map(|d| -s.ehat[0] * d.t[2][1]);
    let jt3_1 = s.data.map(|d| s.ehat[1] * d.t[2][0]);
    let (iu, jv) = calc.interior();
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    for i in iu {
        for j in jv.clone() {
            let d = s.data.at(i, j);
            let div_t3 = calc.covd(&t3_0, &t3_1, i, j, 0)[0] + calc.covd(&t3_0, &t3_1, i, j, 1)[1];
            let div_jt3 =
                calc.covd(&jt3_0, &jt3_1, i, j, 0)[0] + calc.covd(&jt3_0, &jt3_1, i, j, 1)[1];
            r1.push(div_t3 - (2.0 * d.h * d.nu[2] + (c[1] - c[0]) * d.nu[0] * d.nu[1]));
            r2.push(div_jt3 - c[2] * d.nu[2]);
        }
    }
    Ok(DivergenceReport {
        div_t3: ResidualStats::from_samples(r1),
        div_jt3: ResidualStats::from_samples(r2),
        riemannian: s.model.eps.is_riemannian(),
    })
}
