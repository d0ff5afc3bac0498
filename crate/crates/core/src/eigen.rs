//! Principal Dirichlet eigenvalue of `-Δ` on a ball and the critical radius
//! it induces.
//!
//! For a radially symmetric ball `B_R ⊂ ℝⁿ` the principal eigenfunction is
//! `r^{-ν} J_ν(j_{ν,1} r / R)` with `ν = n/2 - 1`, so
//! `λ₁(R) = (j_{ν,1} / R)²` where `j_{ν,1}` is the first positive zero of
//! the Bessel function `J_ν`.

use crate::error::{Error, Result};
use crate::model::{compute_r0, ModelParams};

/// Absolute tolerance on the located Bessel zero.
pub const ZERO_TOL: f64 = 1e-13;

/// A ball of radius `radius` in dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenQuery {
    pub radius: f64,
    pub dim: usize,
}

impl EigenQuery {
    pub fn new(radius: f64, dim: usize) -> Result<Self> {
        let q = EigenQuery { radius, dim };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::param("radius", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// Bessel order `ν = n/2 - 1` associated with dimension `n`.
pub fn bessel_order(dim: usize) -> f64 {
    dim as f64 / 2.0 - 1.0
}

fn gamma_half_integer(x: f64) -> f64 {
    // Γ at x ∈ {1/2, 1, 3/2, 2, ...}; enough for ν + 1 with ν = n/2 - 1, n ≤ 3.
    let twice = (2.0 * x).round() as i64;
    debug_assert!(twice >= 1 && (2.0 * x - twice as f64).abs() < 1e-12);
    let (mut acc, mut z) = if twice % 2 == 0 {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    while z + 0.5 < x {
        acc *= z;
        z += 1.0;
    }
    acc
}

/// `J_ν(x)` by its ascending power series, for half-integer `ν ≥ -1/2`.
///
/// Summation stops once a term falls below `1e-17` of the running sum;
/// accurate to near machine precision for `0 < x ≲ 10`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = half.powf(nu) / gamma_half_integer(nu + 1.0);
    let mut sum = term;
    for k in 0..200 {
        let k = k as f64;
        term *= q / ((k + 1.0) * (k + nu + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// First positive zero `j_{ν,1}` of `J_ν`, located by bracketing and bisection.
pub fn first_bessel_zero(nu: f64) -> f64 {
    // Scan for the first sign change, then bisect.
    let step = 0.05;
    let mut a = step;
    let mut fa = bessel_j(nu, a);
    let mut b = a + step;
    let mut fb = bessel_j(nu, b);
    while fa.signum() == fb.signum() {
        a = b;
        fa = fb;
        b += step;
        fb = bessel_j(nu, b);
    }
    while b - a > ZERO_TOL * 0.1 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = bessel_j(nu, m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `j_{ν,1}` for `ν = n/2 - 1`.
pub fn principal_zero(dim: usize) -> Result<f64> {
    match dim {
        1..=3 => Ok(first_bessel_zero(bessel_order(dim))),
        _ => Err(Error::UnsupportedDimension(dim)),
    }
}

/// Principal Dirichlet eigenvalue `λ₁(R)` of `-Δ` on the ball of radius `R`.
pub fn lambda1(query: EigenQuery) -> Result<f64> {
    query.validate()?;
    let j = principal_zero(query.dim)?;
    Ok((j / query.radius).powi(2))
}

/// Radius `h₀*` solving `λ₁(h₀*) = (μ₂ + α)(R₀ - 1) / d₂`.
///
/// `λ₁(R) R²` is constant in `R`, so the inversion is closed form.
pub fn critical_radius(params: &ModelParams) -> Result<f64> {
    let r0 = compute_r0(params);
    if r0 <= 1.0 {
        return Err(Error::NoCriticalRadius { r0 });
    }
    let target = (params.mu2 + params.alpha) * (r0 - 1.0) / params.d2;
    let j = principal_zero(params.n)?;
    Ok(j / target.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_order_zeros_are_closed_form() {
        assert!((first_bessel_zero(-0.5) - PI / 2.0).abs() < 1e-13);
        assert!((first_bessel_zero(0.5) - PI).abs() < 1e-13);
    }

    #[test]
    fn half_order_series_matches_elementary_forms() {
        for &x in &[0.3, 1.0, 2.2, 4.5] {
            let jm = (2.0 / (PI * x)).sqrt() * x.cos();
            let jp = (2.0 / (PI * x)).sqrt() * x.sin();
            assert!((bessel_j(-0.5, x) - jm).abs() < 1e-14);
            assert!((bessel_j(0.5, x) - jp).abs() < 1e-14);
        }
    }

    #[test]
    fn lambda1_examples() {
        let l3 = lambda1(EigenQuery::new(1.0, 3).unwrap()).unwrap();
        assert!((l3 - PI * PI).abs() < 1e-12);
        let l1 = lambda1(EigenQuery::new(2.0, 1).unwrap()).unwrap();
        assert!((l1 - (PI / 4.0).powi(2)).abs() < 1e-14);
        let l2 = lambda1(EigenQuery::new(1.0, 2).unwrap()).unwrap();
        assert!((l2 - 5.783_185_962_946_784).abs() < 1e-11);
    }

    #[test]
    fn rejects_bad_queries() {
        assert_eq!(
            EigenQuery::new(1.0, 4).unwrap_err(),
            Error::UnsupportedDimension(4)
        );
        assert!(EigenQuery::new(0.0, 2).is_err());
        assert!(EigenQuery::new(f64::NAN, 2).is_err());
    }
}
