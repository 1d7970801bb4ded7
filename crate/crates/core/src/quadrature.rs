//! Gauss–Legendre nodes and averages over the unit sphere.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Nodes and weights on [−1, 1], found by Newton iteration on the
/// three-term Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::Computation("Gauss-Legendre needs at least one node".into()));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        let mut converged = false;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Computation("Gauss-Legendre Newton iteration did not converge".into()));
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    Ok(out)
}

/// Product rule on the sphere: Gauss–Legendre in cosθ times the periodic
/// trapezoid rule in φ.
#[derive(Clone, Debug)]
pub struct SphereRule {
    /// (θ, φ, weight), weights summing to 1 over the retained nodes.
    pub nodes: Vec<(f64, f64, f64)>,
}

impl SphereRule {
    /// `polar_cap` excludes nodes with θ < cap or θ > π − cap.
    pub fn new(n_theta: usize, n_phi: usize, polar_cap: f64) -> Result<Self> {
        if n_phi == 0 {
            return Err(Error::Computation("sphere rule needs azimuthal nodes".into()));
        }
        let gl = gauss_legendre(n_theta)?;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        for &(x, w) in &gl {
            let theta = x.acos();
            if theta < polar_cap || theta > core::f64::consts::PI - polar_cap {
                continue;
            }
            for j in 0..n_phi {
                let phi = 2.0 * core::f64::consts::PI * j as f64 / n_phi as f64;
                nodes.push((theta, phi, w / (2.0 * n_phi as f64)));
            }
        }
        Ok(SphereRule { nodes })
    }

    /// Uniform-measure average of `f(θ, φ)`.
    pub fn average<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().map(|&(t, p, w)| w * f(t, p)).sum()
    }

    /// Average under the density `prior(θ, φ)` relative to the uniform
    /// measure; the prior need not be normalized.
    pub fn weighted_average<F, P>(&self, mut f: F, prior: P) -> Result<f64>
    where
        F: FnMut(f64, f64) -> f64,
        P: Fn(f64, f64) -> f64,
    {
        let (mut num, mut den) = (0.0, 0.0);
        for &(t, p, w) in &self.nodes {
            let q = prior(t, p);
            if !(q >= 0.0 && q.is_finite()) {
                return Err(Error::Computation("prior must be finite and non-negative".into()));
            }
            num += w * q * f(t, p);
            den += w * q;
        }
        if den <= 0.0 {
            return Err(Error::Computation("prior has zero mass on the quadrature nodes".into()));
        }
        Ok(num / den)
    }
}
