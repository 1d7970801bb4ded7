//! Fringe fitting and Fisher-information extraction from P(α) data.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{domain, Error, Result};
use crate::optimize::golden_max;

pub const MIN_POINTS: usize = 6;
pub const MAX_ITER: usize = 50;
pub const SCAN_POINTS: usize = 720;
/// Fits with a smaller amplitude have no meaningful phase.
pub const DEGENERATE_AMPLITUDE: f64 = 1e-6;
/// Relative margin a candidate must beat the incumbent by, so exact ties
/// resolve to the smallest α.
const TIE_REL: f64 = 1e-9;
const EDGE: f64 = 1e-9;
/// The scan stays this far inside (0, 1) so the sensitivity stencil at α*
/// remains a valid probability.
const SCAN_MARGIN: f64 = 1e-5;
const SENSITIVITY_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FringePoint {
    pub alpha: f64,
    pub frequency: f64,
    pub shots: u64,
}

/// P(α) = A cos(kα + φ₀) + B.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FringeFit {
    pub amplitude: f64,
    pub phase: f64,
    pub offset: f64,
    pub k: u32,
    /// Over (A, φ₀, B). The φ₀ row and column are zero when the phase is
    /// degenerate.
    pub covariance: [[f64; 3]; 3],
    pub degenerate_phase: bool,
    pub chi2_reduced: f64,
    pub rms_residual: f64,
    pub iterations: usize,
}

impl FringeFit {
    pub fn eval(&self, alpha: f64) -> f64 {
        model(&[self.amplitude, self.phase, self.offset], self.k, alpha)
    }

    pub fn slope(&self, alpha: f64) -> f64 {
        -(self.k as f64) * self.amplitude * (self.k as f64 * alpha + self.phase).sin()
    }

    /// Whether the curve stays within [−eps, 1 + eps].
    pub fn in_range(&self, eps: f64) -> bool {
        self.offset - self.amplitude >= -eps && self.offset + self.amplitude <= 1.0 + eps
    }

    /// Noiseless fringe with the given parameters and zero covariance.
    pub fn exact(amplitude: f64, phase: f64, offset: f64, k: u32) -> Self {
        FringeFit {
            amplitude,
            phase,
            offset,
            k,
            covariance: [[0.0; 3]; 3],
            degenerate_phase: amplitude < DEGENERATE_AMPLITUDE,
            chi2_reduced: 0.0,
            rms_residual: 0.0,
            iterations: 0,
        }
    }
}

fn model(p: &[f64; 3], k: u32, alpha: f64) -> f64 {
    p[0] * (k as f64 * alpha + p[1]).cos() + p[2]
}

fn inv3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = crate::linalg::det3(m);
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(det.abs() > 1e-13 * scale.powi(3)) {
        return None;
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            out[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    Some(out)
}

fn clamp_p(p: f64, n: u64) -> f64 {
    let e = 0.5 / (n as f64 + 1.0);
    p.clamp(e, 1.0 - e)
}

/// Weighted least squares on the linear form a·cos kα + b·sin kα + B,
/// reweighted with binomial variances of the current fit until the
/// coefficients settle.
pub fn fit_fringe(data: &[FringePoint], k: u32) -> Result<FringeFit> {
    if k == 0 {
        return Err(domain("k must be at least 1"));
    }
    if data.len() < MIN_POINTS {
        return Err(domain(format!("need at least {MIN_POINTS} points, got {}", data.len())));
    }
    for d in data {
        if d.shots == 0 {
            return Err(domain("every point needs at least one shot"));
        }
        if !(0.0..=1.0).contains(&d.frequency) || !d.alpha.is_finite() {
            return Err(domain("frequencies must lie in [0, 1] at finite alpha"));
        }
    }
    let kf = k as f64;
    let lo = data.iter().map(|d| d.alpha).fold(f64::INFINITY, f64::min);
    let hi = data.iter().map(|d| d.alpha).fold(f64::NEG_INFINITY, f64::max);
    if kf * (hi - lo) < PI - 1e-12 {
        return Err(domain("data must span at least half a fringe period"));
    }

    let rows: Vec<[f64; 3]> = data.iter().map(|d| [(kf * d.alpha).cos(), (kf * d.alpha).sin(), 1.0]).collect();
    let mut p_w: Vec<f64> = data.iter().map(|d| clamp_p((d.frequency * d.shots as f64 + 0.5) / (d.shots as f64 + 1.0), d.shots)).collect();
    let mut coef = [0.0; 3];
    let mut normal_inv = [[0.0; 3]; 3];
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=MAX_ITER {
        iterations = it;
        let mut xtwx = [[0.0; 3]; 3];
        let mut xtwy = [0.0; 3];
        for ((r, d), &p) in rows.iter().zip(data).zip(&p_w) {
            let w = d.shots as f64 / (p * (1.0 - p));
            for i in 0..3 {
                xtwy[i] += w * r[i] * d.frequency;
                for j in 0..3 {
                    xtwx[i][j] += w * r[i] * r[j];
                }
            }
        }
        normal_inv = inv3(&xtwx).ok_or_else(|| domain("alpha grid does not identify the fringe"))?;
        let new = crate::linalg::matvec3(&normal_inv, &xtwy);
        let change = (0..3).map(|i| (new[i] - coef[i]).abs()).fold(0.0, f64::max);
        coef = new;
        if it > 1 && change < 1e-12 {
            converged = true;
            break;
        }
        for ((p, r), d) in p_w.iter_mut().zip(&rows).zip(data) {
            *p = clamp_p(r[0] * coef[0] + r[1] * coef[1] + coef[2], d.shots);
        }
    }

    let (a, b, offset) = (coef[0], coef[1], coef[2]);
    let amplitude = (a * a + b * b).sqrt();
    let degenerate_phase = amplitude < DEGENERATE_AMPLITUDE;
    let phase = if degenerate_phase { 0.0 } else { (-b).atan2(a) };
    let params = [amplitude, phase, offset];

    let (mut chi2, mut ss) = (0.0, 0.0);
    for d in data {
        let r = d.frequency - model(&params, k, d.alpha);
        let p = clamp_p(model(&params, k, d.alpha), d.shots);
        chi2 += d.shots as f64 * r * r / (p * (1.0 - p));
        ss += r * r;
    }
    let rms_residual = (ss / data.len() as f64).sqrt();
    if !converged {
        return Err(Error::Fit { reason: format!("no convergence after {MAX_ITER} reweighting steps"), residual: rms_residual });
    }

    // Jacobian of (A, φ₀, B) with respect to (a, b, B)
    let jac = if degenerate_phase {
        [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
    } else {
        let a2 = amplitude * amplitude;
        [[a / amplitude, b / amplitude, 0.0], [b / a2, -a / a2, 0.0], [0.0, 0.0, 1.0]]
    };
    let covariance = crate::linalg::matmul3(&crate::linalg::matmul3(&jac, &normal_inv), &crate::linalg::transpose3(&jac));
    Ok(FringeFit {
        amplitude,
        phase,
        offset,
        k,
        covariance,
        degenerate_phase,
        chi2_reduced: chi2 / (data.len() - 3) as f64,
        rms_residual,
        iterations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiEstimate {
    pub fi: f64,
    pub alpha_star: f64,
    pub delta: f64,
    /// The fitted curve left [0, 1] and its amplitude was shrunk to
    /// min(A, B, 1 − B) before the scan.
    pub amplitude_clipped: bool,
}

/// [P′]² / (P(1 − P)) of the fringe with parameters `p`, or `None` where
/// P leaves (0, 1).
fn fringe_fi(p: &[f64; 3], k: u32, alpha: f64) -> Option<f64> {
    fringe_fi_within(p, k, alpha, 0.0)
}

fn fringe_fi_within(p: &[f64; 3], k: u32, alpha: f64, margin: f64) -> Option<f64> {
    let prob = model(p, k, alpha);
    if !(prob > margin && prob < 1.0 - margin) {
        return None;
    }
    let slope = -(k as f64) * p[0] * (k as f64 * alpha + p[1]).sin();
    Some(slope * slope / (prob * (1.0 - prob)))
}

/// Maximum over one period of the fringe's FI, by a 720-point scan and a
/// golden-section polish around the best point.
///
/// A fit that overshoots [0, 1] (near-perfect contrast plus shot noise)
/// would put an unbounded FI at the crossing, so its amplitude is first
/// shrunk until the curve just touches the boundary.
pub fn extract_fi(fit: &FringeFit) -> Result<FiEstimate> {
    let mut p = [fit.amplitude, fit.phase, fit.offset];
    let k = fit.k;
    if k == 0 || p.iter().any(|v| !v.is_finite()) {
        return Err(domain("fit parameters are invalid"));
    }
    let physical = p[2].min(1.0 - p[2]);
    let amplitude_clipped = p[0] > physical;
    if amplitude_clipped {
        if physical <= 0.0 {
            return Err(Error::Degenerate(format!("fitted offset {} lies outside (0, 1)", p[2])));
        }
        p[0] = physical;
    }
    let period = 2.0 * PI / k as f64;
    let h = period / SCAN_POINTS as f64;
    let mut best: Option<(f64, f64)> = None;
    for j in 0..SCAN_POINTS {
        let a = j as f64 * h;
        if let Some(v) = fringe_fi_within(&p, k, a, SCAN_MARGIN) {
            match best {
                Some((_, bv)) if v <= bv * (1.0 + TIE_REL) => {}
                _ => best = Some((a, v)),
            }
        }
    }
    let (mut alpha_star, mut fi) = best.ok_or_else(|| Error::Degenerate("fitted curve never lies inside (0, 1)".into()))?;
    let (x, v) = golden_max(|a| fringe_fi_within(&p, k, a, SCAN_MARGIN).unwrap_or(f64::NEG_INFINITY), alpha_star - h, alpha_star + h, 1e-12);
    if v > fi * (1.0 + TIE_REL) {
        alpha_star = x - period * (x / period).floor();
        fi = v;
    }
    let prob = model(&p, k, alpha_star);
    if !(EDGE..=1.0 - EDGE).contains(&prob) {
        return Err(Error::Degenerate(format!("fitted P(alpha*) = {prob} touches the boundary")));
    }

    // envelope theorem: the maximum moves with θ like FI(α*; θ) does
    let mut g = [0.0; 3];
    for i in 0..3 {
        let (mut up, mut dn) = (p, p);
        up[i] += SENSITIVITY_STEP;
        dn[i] -= SENSITIVITY_STEP;
        g[i] = match (fringe_fi(&up, k, alpha_star), fringe_fi(&dn, k, alpha_star)) {
            (Some(u), Some(d)) => (u - d) / (2.0 * SENSITIVITY_STEP),
            _ => return Err(Error::Degenerate("FI sensitivity stencil leaves (0, 1)".into())),
        };
    }
    let var: f64 = (0..3).map(|i| (0..3).map(|j| g[i] * fit.covariance[i][j] * g[j]).sum::<f64>()).sum();
    Ok(FiEstimate { fi, alpha_star, delta: var.max(0.0).sqrt(), amplitude_clipped })
}

/// (1/3)·√(δx² + δy² + δz²), the uncertainty of the mean of three
/// independent per-axis estimates.
pub fn combine_axis_uncertainty(dx: f64, dy: f64, dz: f64) -> Result<f64> {
    if [dx, dy, dz].iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
        return Err(domain("uncertainties must be finite and non-negative"));
    }
    Ok((dx * dx + dy * dy + dz * dz).sqrt() / 3.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BootstrapSummary {
    pub mean: f64,
    pub std: f64,
    /// Resamples whose fit and extraction succeeded.
    pub n_ok: usize,
}

/// Resamples every point's count from Binomial(shots, frequency), refits
/// and re-extracts. Resample r draws from stream r of the seed, so any
/// subset can be recomputed in isolation.
pub fn bootstrap_fi_resample(data: &[FringePoint], k: u32, seed: u64, r: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    let mut resampled = Vec::with_capacity(data.len());
    for d in data {
        let b = Binomial::new(d.shots, d.frequency).map_err(|e| domain(format!("binomial: {e}")))?;
        let c = b.sample(&mut rng);
        resampled.push(FringePoint { frequency: c as f64 / d.shots as f64, ..*d });
    }
    Ok(extract_fi(&fit_fringe(&resampled, k)?)?.fi)
}

pub fn bootstrap_fi(data: &[FringePoint], k: u32, n_resamples: u64, seed: u64) -> Result<BootstrapSummary> {
    let vals: Vec<f64> = (0..n_resamples).filter_map(|r| bootstrap_fi_resample(data, k, seed, r).ok()).collect();
    summarize(&vals)
}

pub fn summarize(vals: &[f64]) -> Result<BootstrapSummary> {
    if vals.len() < 2 {
        return Err(Error::Computation("fewer than two bootstrap resamples succeeded".into()));
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(BootstrapSummary { mean, std: var.sqrt(), n_ok: vals.len() })
}
