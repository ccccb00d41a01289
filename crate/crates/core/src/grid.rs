//! Dense rectangular grids and finite-difference stencils.
//!
//! A `Grid<T>` stores values at the nodes of a tensor grid
//! `u_i = u0 + i*hu`, `v_j = v0 + j*hv`, row-major with `u` as the slow
//! index. First derivatives use 4th-order central stencils in the interior
//! and 4th-order one-sided stencils in a band of width 2 at the boundary.

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone)]
pub struct Grid<T> {
    pub nu: usize,
    pub nv: usize,
    pub data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn from_fn(nu: usize, nv: usize, mut f: impl FnMut(usize, usize) -> T) -> Grid<T> {
        let mut data = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                data.push(f(i, j));
            }
        }
        Grid { nu, nv, data }
    }

    pub fn fill(nu: usize, nv: usize, value: T) -> Grid<T> {
        Grid { nu, nv, data: vec![value; nu * nv] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.nv + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.nv + j]
    }

    pub fn map<U: Clone>(&self, mut f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            nu: self.nu,
            nv: self.nv,
            data: self.data.iter().map(|t| f(t)).collect(),
        }
    }
}

/// Uniform parameter axes of a grid.
#[derive(Debug, Clone)]
pub struct Axes {
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
}

impl Axes {
    pub fn new(u0: f64, u1: f64, nu: usize, v0: f64, v1: f64, nv: usize) -> Axes {
        let us = (0..nu)
            .map(|i| u0 + (u1 - u0) * i as f64 / (nu - 1).max(1) as f64)
            .collect();
        let vs = (0..nv)
            .map(|j| v0 + (v1 - v0) * j as f64 / (nv - 1).max(1) as f64)
            .collect();
        Axes { us, vs }
    }

    pub fn hu(&self) -> f64 {
        if self.us.len() > 1 { self.us[1] - self.us[0] } else { 1.0 }
    }

    pub fn hv(&self) -> f64 {
        if self.vs.len() > 1 { self.vs[1] - self.vs[0] } else { 1.0 }
    }

    pub fn check_size(&self, need: usize) -> Result<()> {
        if self.us.len() < need || self.vs.len() < need {
            return Err(Error::GridTooSmall { nu: self.us.len(), nv: self.vs.len(), need });
        }
        Ok(())
    }
}

/// 4th-order first derivative of a sampled line at index `i`.
///
/// Central 5-point stencil where possible, shifted 5-point stencils of the
/// same order at the two boundary bands.
pub fn d1_line(f: &dyn Fn(usize) -> f64, n: usize, i: usize, h: f64) -> f64 {
    debug_assert!(n >= 5);
    let g = |k: usize| f(k);
    let inv12h = 1.0 / (12.0 * h);
    if i >= 2 && i + 2 < n {
        (g(i - 2) - 8.0 * g(i - 1) + 8.0 * g(i + 1) - g(i + 2)) * inv12h
    } else if i == 0 {
        (-25.0 * g(0) + 48.0 * g(1) - 36.0 * g(2) + 16.0 * g(3) - 3.0 * g(4)) * inv12h
    } else if i == 1 {
        (-3.0 * g(0) - 10.0 * g(1) + 18.0 * g(2) - 6.0 * g(3) + g(4)) * inv12h
    } else if i == n - 1 {
        (25.0 * g(n - 1) - 48.0 * g(n - 2) + 36.0 * g(n - 3) - 16.0 * g(n - 4) + 3.0 * g(n - 5))
            * inv12h
    } else {
        (3.0 * g(n - 1) + 10.0 * g(n - 2) - 18.0 * g(n - 3) + 6.0 * g(n - 4) - g(n - 5)) * inv12h
    }
}

/// 4th-order second derivative of a sampled line at index `i` (2nd-order
/// one-sided in the outermost two-node bands).
pub fn d2_line(f: &dyn Fn(usize) -> f64, n: usize, i: usize, h: f64) -> f64 {
    debug_assert!(n >= 5);
    let g = |k: usize| f(k);
    if i >= 2 && i + 2 < n {
        (-g(i - 2) + 16.0 * g(i - 1) - 30.0 * g(i) + 16.0 * g(i + 1) - g(i + 2)) / (12.0 * h * h)
    } else if i < 2 {
        (2.0 * g(i) - 5.0 * g(i + 1) + 4.0 * g(i + 2) - g(i + 3)) / (h * h)
    } else {
        (2.0 * g(i) - 5.0 * g(i - 1) + 4.0 * g(i - 2) - g(i - 3)) / (h * h)
    }
}

/// Derivative in the `u` direction of a scalar grid, evaluated at `(i, j)`.
pub fn du_at(g: &Grid<f64>, axes: &Axes, i: usize, j: usize) -> f64 {
    d1_line(&|k| *g.at(k, j), g.nu, i, axes.hu())
}

/// Derivative in the `v` direction of a scalar grid, evaluated at `(i, j)`.
pub fn dv_at(g: &Grid<f64>, axes: &Axes, i: usize, j: usize) -> f64 {
    d1_line(&|k| *g.at(i, k), g.nv, j, axes.hv())
}

/// Cubic (4-point) interpolation of a sampled line at the midpoint between
/// nodes `i` and `i+1`.
pub fn midpoint_line(f: &dyn Fn(usize) -> f64, n: usize, i: usize) -> f64 {
    debug_assert!(i + 1 < n);
    if i >= 1 && i + 2 < n {
        (-f(i - 1) + 9.0 * f(i) + 9.0 * f(i + 1) - f(i + 2)) / 16.0
    } else if i == 0 && n >= 4 {
        // one-sided cubic through nodes 0..3 evaluated at 1/2
        (5.0 * f(0) + 15.0 * f(1) - 5.0 * f(2) + f(3)) / 16.0
    } else if i + 2 == n && n >= 4 {
        (5.0 * f(n - 1) + 15.0 * f(n - 2) - 5.0 * f(n - 3) + f(n - 4)) / 16.0
    } else {
        0.5 * (f(i) + f(i + 1))
    }
}

/// Max and root-mean-square of a residual sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ResidualStats {
    pub max: f64,
    pub rms: f64,
    pub count: usize,
}

impl ResidualStats {
    pub fn from_samples<I: IntoIterator<Item = f64>>(iter: I) -> ResidualStats {
        let mut max: f64 = 0.0;
        let mut sq = 0.0;
        let mut count = 0usize;
        for x in iter {
            max = max.max(x.abs());
            sq += x * x;
            count += 1;
        }
        let rms = if count > 0 { (sq / count as f64).sqrt() } else { 0.0 };
        ResidualStats { max, rms, count }
    }
}

impl std::fmt::Display for ResidualStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "max {:.3e} rms {:.3e} (n={})", self.max, self.rms, self.count)
    }
}

/// Number of threads allowed by the `MLS_THREADS` environment variable
/// (default 1).
pub fn thread_budget() -> usize {
    std::env::var("MLS_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// Evaluate `f(i, j)` over an `nu x nv` grid, row-parallel when the thread
/// budget allows. Each node is computed independently, so the result does
/// not depend on the thread count.
pub fn build_grid_parallel<T, F>(nu: usize, nv: usize, f: F) -> Result<Grid<T>>
where
    T: Clone + Send,
    F: Fn(usize, usize) -> Result<T> + Sync,
{
    let threads = thread_budget().min(nu.max(1));
    if threads <= 1 {
        let mut data = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                data.push(f(i, j)?);
            }
        }
        return Ok(Grid { nu, nv, data });
    }
    let mut rows: Vec<Option<Result<Vec<T>>>> = (0..nu).map(|_| None).collect();
    let chunk = nu.div_ceil(threads);
    std::thread::scope(|scope| {
        for (t, slice) in rows.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (off, slot) in slice.iter_mut().enumerate() {
                    let i = t * chunk + off;
                    let row: Result<Vec<T>> = (0..nv).map(|j| f(i, j)).collect();
                    *slot = Some(row);
                }
            });
        }
    });
    let mut data = Vec::with_capacity(nu * nv);
    for row in rows {
        data.extend(row.expect("row computed")?);
    }
    Ok(Grid { nu, nv, data })
}
