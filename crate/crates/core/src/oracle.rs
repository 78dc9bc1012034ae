//! Closed-form reference solution: the shrinking round sphere.
//!
//! An n-sphere of initial radius `R` under mean-curvature flow stays round
//! with radius `r(t) = sqrt(R^2 - 2nt)`, mean curvature `H = n/r`, and first
//! nonzero unweighted Laplacian eigenvalue `lambda = n/r^2`, collapsing at
//! `T = R^2/(2n)`. The flow library is validated against these values.

use crate::{Error, Result};

/// Shrinking-sphere solution for a round n-sphere (n = 1 is the circle).
#[derive(Debug, Clone, Copy)]
pub struct SphereSolution {
    radius0: f64,
    dim: u32,
}

/// Snapshot of the exact solution at one time.
#[derive(Debug, Clone, Copy)]
pub struct SphereValues {
    pub t: f64,
    pub radius: f64,
    pub mean_curvature: f64,
    pub lambda: f64,
    pub singular_time: f64,
}

impl SphereSolution {
    pub fn new(radius0: f64, dim: u32) -> Result<Self> {
        if !(radius0 > 0.0) || !radius0.is_finite() {
            return Err(Error::OutOfDomain(format!(
                "initial radius must be positive and finite, got {radius0}"
            )));
        }
        if dim == 0 {
            return Err(Error::OutOfDomain(
                "sphere dimension must be at least 1".into(),
            ));
        }
        Ok(SphereSolution { radius0, dim })
    }

    /// Collapse time `R^2 / (2n)`.
    pub fn singular_time(&self) -> f64 {
        self.radius0 * self.radius0 / (2.0 * self.dim as f64)
    }

    pub fn radius(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::OutOfDomain(format!("time {t} is negative")));
        }
        let r_sq = self.radius0 * self.radius0 - 2.0 * self.dim as f64 * t;
        if r_sq <= 0.0 {
            return Err(Error::OutOfDomain(format!(
                "time {t} is at or past the singular time {}",
                self.singular_time()
            )));
        }
        Ok(r_sq.sqrt())
    }

    /// Mean curvature `n / r(t)` (sum of principal curvatures).
    pub fn mean_curvature(&self, t: f64) -> Result<f64> {
        Ok(self.dim as f64 / self.radius(t)?)
    }

    /// First nonzero Laplacian eigenvalue `n / r(t)^2`.
    pub fn lambda(&self, t: f64) -> Result<f64> {
        let r = self.radius(t)?;
        Ok(self.dim as f64 / (r * r))
    }

    pub fn at(&self, t: f64) -> Result<SphereValues> {
        let radius = self.radius(t)?;
        Ok(SphereValues {
            t,
            radius,
            mean_curvature: self.dim as f64 / radius,
            lambda: self.dim as f64 / (radius * radius),
            singular_time: self.singular_time(),
        })
    }
}

/// Convenience wrapper: exact sphere data at time `t`.
pub fn sphere_at(radius0: f64, dim: u32, t: f64) -> Result<SphereValues> {
    SphereSolution::new(radius0, dim)?.at(t)
}

/// Eigenvalue growth rate `2 H^2 lambda / n` of the shrinking sphere, which
/// equals `d lambda / dt` along the flow.
pub fn example_rate(radius0: f64, dim: u32, t: f64) -> Result<f64> {
    let v = sphere_at(radius0, dim, t)?;
    Ok(2.0 * v.mean_curvature * v.mean_curvature * v.lambda / dim as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn unit_sphere_reference_values() {
        let s = SphereSolution::new(1.0, 2).unwrap();
        assert_relative_eq!(s.singular_time(), 0.25);
        let v = s.at(0.0).unwrap();
        assert_relative_eq!(v.radius, 1.0);
        assert_relative_eq!(v.mean_curvature, 2.0);
        assert_relative_eq!(v.lambda, 2.0);
        let v = s.at(0.2).unwrap();
        assert_relative_eq!(v.radius, 0.2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(v.lambda, 10.0, max_relative = 1e-12);
    }

    #[test]
    fn circle_reference_values() {
        let s = SphereSolution::new(1.0, 1).unwrap();
        assert_relative_eq!(s.singular_time(), 0.5);
        let v = s.at(0.4).unwrap();
        assert_relative_eq!(v.lambda, 5.0, max_relative = 1e-12);
        assert_relative_eq!(v.mean_curvature, 1.0 / 0.2f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(SphereSolution::new(0.0, 2).is_err());
        assert!(SphereSolution::new(1.0, 0).is_err());
        let s = SphereSolution::new(1.0, 2).unwrap();
        assert!(s.radius(-0.1).is_err());
        assert!(s.radius(0.25).is_err());
        assert!(s.radius(1.0).is_err());
    }

    proptest! {
        /// The reported rate must match the time derivative of lambda,
        /// computed symbolically: d/dt [n / (R^2 - 2nt)] = 2n^2 / (R^2 - 2nt)^2.
        #[test]
        fn rate_matches_symbolic_derivative(
            radius0 in 0.5f64..4.0,
            dim in 1u32..4,
            frac in 0.0f64..0.9,
        ) {
            let s = SphereSolution::new(radius0, dim).unwrap();
            let t = frac * s.singular_time();
            let denom = radius0 * radius0 - 2.0 * dim as f64 * t;
            let symbolic = 2.0 * (dim as f64) * (dim as f64) / (denom * denom);
            let rate = example_rate(radius0, dim, t).unwrap();
            prop_assert!((rate / symbolic - 1.0).abs() < 1e-12);
        }

        /// Radius, curvature, and eigenvalue obey lambda = H^2 / n exactly.
        #[test]
        fn lambda_equals_h_squared_over_n(
            radius0 in 0.5f64..4.0,
            dim in 1u32..4,
            frac in 0.0f64..0.9,
        ) {
            let s = SphereSolution::new(radius0, dim).unwrap();
            let t = frac * s.singular_time();
            let v = s.at(t).unwrap();
            let expected = v.mean_curvature * v.mean_curvature / dim as f64;
            prop_assert!((v.lambda / expected - 1.0).abs() < 1e-12);
        }
    }
}
