//! Two-grid discretization with the front-fixing map `s = h₀ r / h(t)`.
//!
//! `S` lives on a fixed physical grid `r_i = iΔr` over `[0, L]`; `I` and `R`
//! live on the computational grid `s_j = jΔs` over `[0, h₀]`, where the
//! moving front is pinned at `s = h₀`. The two grids are coupled by linear
//! interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of `L` the front may reach before the truncated domain is
/// considered exhausted.
pub const ESCAPE_FRACTION: f64 = 0.95;

/// Minimum number of intervals on either grid.
pub const MIN_INTERVALS: usize = 16;

/// Grid resolution and truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Truncation radius `L` of the susceptible domain.
    pub length: f64,
    /// Intervals on the physical grid.
    pub n_l: usize,
    /// Intervals on the computational grid.
    pub n_h: usize,
}

/// Node layout for a given `GridSpec`, initial radius and dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    pub spec: GridSpec,
    pub h0: f64,
    pub dim: usize,
    pub dr: f64,
    pub ds: f64,
    /// Emitted when `L <= 4 h₀`.
    pub warning: Option<String>,
}

impl Grids {
    pub fn new(spec: GridSpec, h0: f64, dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(spec.length.is_finite() && spec.length > 0.0) {
            return Err(Error::InvalidGrid(format!("L must be finite and > 0, got {}", spec.length)));
        }
        if spec.n_l < MIN_INTERVALS || spec.n_h < MIN_INTERVALS {
            return Err(Error::InvalidGrid(format!(
                "n_l and n_h must be >= {MIN_INTERVALS}, got {} and {}",
                spec.n_l, spec.n_h
            )));
        }
        if !(h0 > 0.0) || h0 >= ESCAPE_FRACTION * spec.length {
            return Err(Error::InvalidGrid(format!(
                "h0 = {h0} must lie in (0, {ESCAPE_FRACTION} L) with L = {}",
                spec.length
            )));
        }
        let warning = (spec.length <= 4.0 * h0).then(|| {
            format!("L = {} <= 4 h0 = {}; far-field truncation may be felt", spec.length, 4.0 * h0)
        });
        Ok(Grids {
            spec,
            h0,
            dim,
            dr: spec.length / spec.n_l as f64,
            ds: h0 / spec.n_h as f64,
            warning,
        })
    }

    pub fn r_node(&self, i: usize) -> f64 {
        i as f64 * self.dr
    }

    pub fn s_node(&self, j: usize) -> f64 {
        j as f64 * self.ds
    }

    pub fn escape_limit(&self) -> f64 {
        ESCAPE_FRACTION * self.spec.length
    }
}

/// Time, front position and nodal values of the three fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub h: f64,
    /// `S` at `r_i`, `i = 0..=N_L`.
    pub s_phys: Vec<f64>,
    /// `I` at `s_j`, `j = 0..=N_h`.
    pub v_comp: Vec<f64>,
    /// `R` at `s_j`, `j = 0..=N_h`.
    pub w_comp: Vec<f64>,
}

impl SimState {
    /// Samples the initial profiles onto both grids.
    pub fn initial(init: &crate::model::InitialData, grids: &Grids) -> Self {
        let s_phys = (0..=grids.spec.n_l).map(|i| init.s0_at(grids.r_node(i))).collect();
        let mut v_comp: Vec<f64> = (0..=grids.spec.n_h).map(|j| init.i0_at(grids.s_node(j))).collect();
        let mut w_comp: Vec<f64> = (0..=grids.spec.n_h).map(|j| init.r0_at(grids.s_node(j))).collect();
        *v_comp.last_mut().unwrap() = 0.0;
        *w_comp.last_mut().unwrap() = 0.0;
        SimState {
            t: 0.0,
            h: init.h0,
            s_phys,
            v_comp,
            w_comp,
        }
    }

    /// Physical positions of the computational nodes.
    pub fn mapped_nodes(&self, grids: &Grids) -> Vec<f64> {
        (0..self.v_comp.len())
            .map(|j| map_to_physical(grids.s_node(j), self.h, grids.h0))
            .collect()
    }
}

/// `r = s h / h₀`.
pub fn map_to_physical(s: f64, h: f64, h0: f64) -> f64 {
    s * h / h0
}

/// `s = h₀ r / h`.
pub fn map_to_computational(r: f64, h: f64, h0: f64) -> f64 {
    h0 * r / h
}

/// Treatment of the last node of a radial grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterBoundary {
    /// Value prescribed; the operator returns 0 there.
    Dirichlet,
    /// Zero slope via a mirrored ghost node.
    Neumann,
}

/// Stencil `(lower, diag, upper)` of the radial Laplacian at node `i` of a
/// uniform grid with `len` nodes.
///
/// Interior nodes use `w'' + (n-1)/r w'` with centered differences; `r = 0`
/// uses `Δw(0) = n w''(0)` with a mirrored ghost node.
pub fn laplacian_stencil(i: usize, len: usize, spacing: f64, dim: usize, outer: OuterBoundary) -> (f64, f64, f64) {
    let inv2 = 1.0 / (spacing * spacing);
    let last = len - 1;
    if i == 0 {
        let k = 2.0 * dim as f64 * inv2;
        (0.0, -k, k)
    } else if i == last {
        match outer {
            OuterBoundary::Dirichlet => (0.0, 0.0, 0.0),
            OuterBoundary::Neumann => (2.0 * inv2, -2.0 * inv2, 0.0),
        }
    } else {
        let adv = (dim as f64 - 1.0) / (2.0 * i as f64) * inv2;
        (inv2 - adv, -2.0 * inv2, inv2 + adv)
    }
}

/// Radial Laplacian of a field sampled on a uniform grid starting at `r = 0`.
pub fn radial_laplacian(field: &[f64], spacing: f64, dim: usize, outer: OuterBoundary) -> Vec<f64> {
    let len = field.len();
    assert!(len >= 3, "radial_laplacian needs at least 3 nodes");
    (0..len)
        .map(|i| {
            let (lo, di, up) = laplacian_stencil(i, len, spacing, dim, outer);
            let left = if i > 0 { lo * field[i - 1] } else { 0.0 };
            let right = if i + 1 < len { up * field[i + 1] } else { 0.0 };
            left + di * field[i] + right
        })
        .collect()
}

/// Centered approximation of `c s v_s` on the computational grid; 0 at both ends.
pub fn front_advection(v: &[f64], c: f64) -> Vec<f64> {
    let len = v.len();
    (0..len)
        .map(|j| {
            if j + 1 == len || j == 0 {
                return 0.0;
            }
            // s_j / (2Δs) = j / 2
            0.5 * c * j as f64 * (v[j + 1] - v[j - 1])
        })
        .collect()
}

/// Spatial part of the transformed I- or R-equation,
/// `d (h₀/h)² Δ_s v + (h'/h) s v_s`, with `v` vanishing at `s = h₀`.
pub fn transformed_operator(v: &[f64], h: f64, h_dot: f64, h0: f64, diffusion: f64, dim: usize) -> Vec<f64> {
    let ds = h0 / (v.len() - 1) as f64;
    let scale = diffusion * (h0 / h).powi(2);
    let lap = radial_laplacian(v, ds, dim, OuterBoundary::Dirichlet);
    let adv = front_advection(v, h_dot / h);
    lap.iter().zip(&adv).map(|(l, a)| scale * l + a).collect()
}

/// One-sided second-order `v_s` at `s = h₀`:
/// `(v_{N-2} - 4 v_{N-1} + 3 v_N) / (2Δs)`.
pub fn front_gradient(v: &[f64], ds: f64) -> f64 {
    let n = v.len() - 1;
    (v[n - 2] - 4.0 * v[n - 1] + 3.0 * v[n]) / (2.0 * ds)
}

/// Linear interpolation of samples on a uniform grid with spacing `dx`,
/// clamped to the last node.
pub fn interp_uniform(values: &[f64], dx: f64, x: f64) -> f64 {
    let last = values.len() - 1;
    let pos = (x / dx).max(0.0);
    let k = pos.floor() as usize;
    if k >= last {
        return values[last];
    }
    let th = pos - k as f64;
    values[k] + th * (values[k + 1] - values[k])
}

/// Values of a computational-grid field at the physical nodes; zero at and
/// beyond the front.
pub fn comp_to_phys(field: &[f64], h: f64, grids: &Grids) -> Vec<f64> {
    (0..=grids.spec.n_l)
        .map(|i| {
            let r = grids.r_node(i);
            if r >= h {
                0.0
            } else {
                interp_uniform(field, grids.ds, map_to_computational(r, h, grids.h0))
            }
        })
        .collect()
}

/// `S` sampled at the mapped computational nodes.
pub fn phys_to_comp(s_phys: &[f64], h: f64, grids: &Grids) -> Vec<f64> {
    (0..=grids.spec.n_h)
        .map(|j| interp_uniform(s_phys, grids.dr, map_to_physical(grids.s_node(j), h, grids.h0)))
        .collect()
}

/// `S` on the computational nodes and `I` on the physical nodes.
pub fn cross_interpolate(state: &SimState, grids: &Grids) -> Result<(Vec<f64>, Vec<f64>)> {
    if state.h >= grids.escape_limit() {
        return Err(Error::FrontEscape {
            t: state.t,
            h: state.h,
            limit: grids.escape_limit(),
        });
    }
    Ok((
        phys_to_comp(&state.s_phys, state.h, grids),
        comp_to_phys(&state.v_comp, state.h, grids),
    ))
}

/// Solves a tridiagonal system in place (Thomas algorithm).
///
/// `lower[0]` and `upper[len-1]` are ignored. The matrices assembled here are
/// diagonally dominant, so no pivoting is needed.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = rhs.len();
    debug_assert!(lower.len() == n && diag.len() == n && upper.len() == n);
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / beta } else { 0.0 };
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Backward-Euler diffusion solve `(1 - dt κ L) u_new = rhs`, with the
/// last node either fixed at 0 (Dirichlet) or mirrored (Neumann).
pub fn implicit_diffusion(rhs: &mut [f64], spacing: f64, dim: usize, kappa_dt: f64, outer: OuterBoundary) {
    implicit_diffusion_advection(rhs, spacing, dim, kappa_dt, 0.0, outer)
}

/// Backward-Euler solve of `u_t = κ Δu + c s u_s` with `c s u_s` centered,
/// `(1 - dt κ L - dt c A) u_new = rhs`; `c_dt = c dt`.
///
/// The matrix stays an M-matrix while the cell Péclet number
/// `|c| s Δs / κ` is below 2.
pub fn implicit_diffusion_advection(
    rhs: &mut [f64],
    spacing: f64,
    dim: usize,
    kappa_dt: f64,
    c_dt: f64,
    outer: OuterBoundary,
) {
    let len = rhs.len();
    let unknowns = match outer {
        OuterBoundary::Dirichlet => len - 1,
        OuterBoundary::Neumann => len,
    };
    let mut lo = vec![0.0; unknowns];
    let mut di = vec![0.0; unknowns];
    let mut up = vec![0.0; unknowns];
    for i in 0..unknowns {
        let (l, d, u) = laplacian_stencil(i, len, spacing, dim, outer);
        // c s_i (u_{i+1} - u_{i-1}) / (2Δs) with s_i = iΔs.
        let a = if i == 0 || i == len - 1 { 0.0 } else { 0.5 * c_dt * i as f64 };
        lo[i] = -kappa_dt * l + a;
        di[i] = 1.0 - kappa_dt * d;
        // With a Dirichlet zero at the last node its coupling drops out.
        up[i] = if i + 1 < unknowns { -kappa_dt * u - a } else { 0.0 };
    }
    if outer == OuterBoundary::Dirichlet {
        rhs[len - 1] = 0.0;
    }
    solve_tridiagonal(&lo, &di, &up, &mut rhs[..unknowns]);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_examples() {
        assert_eq!(map_to_physical(2.0, 5.0, 2.0), 5.0);
        assert_eq!(map_to_physical(0.0, 5.0, 2.0), 0.0);
        assert_eq!(map_to_physical(1.0, 6.0, 2.0), 3.0);
    }

    #[test]
    fn laplacian_of_constant_and_quadratics() {
        for dim in 1..=3 {
            let c = vec![3.5; 40];
            assert!(radial_laplacian(&c, 0.1, dim, OuterBoundary::Neumann)
                .iter()
                .all(|x| x.abs() < 1e-11));
            let q: Vec<f64> = (0..40).map(|i| (i as f64 * 0.1).powi(2)).collect();
            let lap = radial_laplacian(&q, 0.1, dim, OuterBoundary::Dirichlet);
            for x in &lap[..39] {
                assert!((x - 2.0 * dim as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn laplacian_of_bump_in_2d() {
        // Δ(1 - (r/R)²) = -2n/R² with n = 2.
        let r_max = 2.0;
        let n = 50;
        let h = r_max / n as f64;
        let f: Vec<f64> = (0..=n).map(|i| 1.0 - (i as f64 * h / r_max).powi(2)).collect();
        let lap = radial_laplacian(&f, h, 2, OuterBoundary::Dirichlet);
        for x in &lap[..n] {
            assert!((x + 4.0 / (r_max * r_max)).abs() < 1e-11);
        }
    }

    #[test]
    fn front_gradient_examples() {
        let n = 20;
        let h0 = 2.0;
        let ds = h0 / n as f64;
        let lin: Vec<f64> = (0..=n).map(|j| 1.7 * (h0 - j as f64 * ds)).collect();
        assert!((front_gradient(&lin, ds) + 1.7).abs() < 1e-12);
        assert_eq!(front_gradient(&vec![0.0; n + 1], ds), 0.0);
        let quad: Vec<f64> = (0..=n).map(|j| (h0 - j as f64 * ds).powi(2)).collect();
        assert!(front_gradient(&quad, ds).abs() < 1e-13);
    }

    #[test]
    fn transformed_operator_scaling() {
        let v: Vec<f64> = (0..=32).map(|j| 1.0 - (j as f64 / 32.0).powi(2)).collect();
        let a = transformed_operator(&v, 1.0, 0.0, 1.0, 1.0, 2);
        let b = transformed_operator(&v, 2.0, 0.0, 1.0, 1.0, 2);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - 4.0 * y).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let lo = [0.0, -1.0, -0.5, -2.0];
        let di = [4.0, 5.0, 4.5, 6.0];
        let up = [-1.0, -2.0, -1.0, 0.0];
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut b: Vec<f64> = (0..4)
            .map(|i| {
                di[i] * x[i] + if i > 0 { lo[i] * x[i - 1] } else { 0.0 } + if i < 3 { up[i] * x[i + 1] } else { 0.0 }
            })
            .collect();
        solve_tridiagonal(&lo, &di, &up, &mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_validation() {
        let spec = GridSpec {
            length: 10.0,
            n_l: 100,
            n_h: 50,
        };
        assert!(Grids::new(spec, 1.0, 2).unwrap().warning.is_none());
        assert!(Grids::new(spec, 3.0, 2).unwrap().warning.is_some());
        assert!(Grids::new(spec, 10.0, 2).is_err());
        assert!(Grids::new(GridSpec { n_h: 8, ..spec }, 1.0, 2).is_err());
        assert!(Grids::new(spec, 1.0, 0).is_err());
    }
}
