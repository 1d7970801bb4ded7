//! Multiparameter estimation over (α, θ, φ): symmetric logarithmic
//! derivatives, the QFIM, and the Schur-complement precision on α when
//! the field direction is a nuisance.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::linalg::{inner, norm_sqr, rotation_unitary, sym3_eigen, Axis, CMat, C64};
use crate::quadrature::SphereRule;
use crate::states::qubit;

/// Order of the QFIM rows and columns.
pub const PARAMS: [&str; 3] = ["alpha", "theta", "phi"];
pub const FD_STEP: f64 = 1e-5;
/// Eigenvalue cutoff of the nuisance-block pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-10;
pub const POLAR_CAP: f64 = 1e-3;
pub const SPHERE_NODES: (usize, usize) = (64, 128);
/// Smallest α used when extrapolating the separable QFIM to α → 0.
pub const ALPHA0: f64 = 2e-3;

/// 3×3 QFIM in [`PARAMS`] order.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Qfim3 {
    pub m: [[f64; 3]; 3],
}

/// L = 2∂ρ = 2(|∂ψ⟩⟨ψ| + |ψ⟩⟨∂ψ|) for a pure state.
pub fn sld_pure<const N: usize>(psi: &[C64; N], dpsi: &[C64; N]) -> Result<CMat<N>> {
    if (norm_sqr(psi) - 1.0).abs() > 1e-8 {
        return Err(domain("state is not normalized"));
    }
    let mut l = CMat::<N>::zeros();
    for i in 0..N {
        for j in 0..N {
            l.0[i][j] = (dpsi[i] * psi[j].conj() + psi[i] * dpsi[j].conj()) * 2.0;
        }
    }
    Ok(l)
}

/// M_ij = ½Tr(ρ{L_i, L_j}) = Re⟨L_iψ|L_jψ⟩ with central differences.
pub fn qfim<const N: usize, F>(family: F, point: [f64; 3], step: f64) -> Result<Qfim3>
where
    F: Fn([f64; 3]) -> [C64; N],
{
    let psi = family(point);
    if (norm_sqr(&psi) - 1.0).abs() > 1e-8 {
        return Err(domain("family is not normalized"));
    }
    let mut lpsi = [[C64::new(0.0, 0.0); N]; 3];
    for k in 0..3 {
        let mut hi = point;
        let mut lo = point;
        hi[k] += step;
        lo[k] -= step;
        let (ph, pl) = (family(hi), family(lo));
        if (norm_sqr(&ph) - 1.0).abs() > 1e-8 || (norm_sqr(&pl) - 1.0).abs() > 1e-8 {
            return Err(domain("derivative stencil leaves the unit sphere"));
        }
        let mut d = [C64::new(0.0, 0.0); N];
        for i in 0..N {
            d[i] = (ph[i] - pl[i]) / (2.0 * step);
        }
        lpsi[k] = sld_pure(&psi, &d)?.apply(&psi);
    }
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = inner(&lpsi[i], &lpsi[j]).re;
        }
    }
    Ok(Qfim3 { m })
}

/// Moore–Penrose inverse of a symmetric 2×2 matrix, dropping eigenvalues
/// below [`PINV_CUTOFF`].
fn pinv_sym2(a: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let (p, q, r) = (a[0][0], a[0][1], a[1][1]);
    let mean = (p + r) / 2.0;
    let rad = (((p - r) / 2.0).powi(2) + q * q).sqrt();
    let vals = [mean + rad, mean - rad];
    let theta = 0.5 * (2.0 * q).atan2(p - r);
    let (s, c) = theta.sin_cos();
    let vecs = [[c, s], [-s, c]];
    let mut out = [[0.0; 2]; 2];
    for k in 0..2 {
        if vals[k].abs() <= PINV_CUTOFF {
            continue;
        }
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += vecs[k][i] * vecs[k][j] / vals[k];
            }
        }
    }
    out
}

/// (M⁻¹)_αα = 1 / (M_αα − mᵀ N⁺ m), with N the (θ, φ) block and m the
/// α–nuisance couplings.
pub fn effective_inverse_alpha(q: &Qfim3) -> Result<f64> {
    let m = &q.m;
    for i in 0..3 {
        for j in 0..3 {
            if (m[i][j] - m[j][i]).abs() > 1e-10 {
                return Err(domain("QFIM is not symmetric"));
            }
        }
    }
    if sym3_eigen(m).0[2] < -1e-9 {
        return Err(domain("QFIM is not positive semidefinite"));
    }
    let n = pinv_sym2([[m[1][1], m[1][2]], [m[2][1], m[2][2]]]);
    let c = [m[0][1], m[0][2]];
    let mut quad = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            quad += c[i] * n[i][j] * c[j];
        }
    }
    let schur = m[0][0] - quad;
    if schur <= PINV_CUTOFF {
        return Err(Error::Computation("alpha is not identifiable at this point".into()));
    }
    Ok(1.0 / schur)
}

/// (1/8)[7 + cos2θ + 2cos2φ sin²θ].
pub fn closed_form_inverse_alpha(theta: f64, phi: f64) -> f64 {
    (7.0 + (2.0 * theta).cos() + 2.0 * (2.0 * phi).cos() * theta.sin().powi(2)) / 8.0
}

/// (U_α|x+⟩) ⊗ (U_α†|z+⟩) with n̂ = n̂(θ, φ).
pub fn separable_family(p: [f64; 3]) -> [C64; 4] {
    let u = rotation_unitary(p[0], &Axis::from_angles(p[1], p[2]));
    let a = u.apply(&qubit::x_plus());
    let b = u.adjoint().apply(&qubit::z_plus());
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// (M⁻¹)_αα of the separable family in the weak-field limit α → 0,
/// by three-point extrapolation from α0, 2α0, 4α0.
pub fn separable_inverse_alpha(theta: f64, phi: f64) -> Result<f64> {
    let f = |a: f64| effective_inverse_alpha(&qfim(separable_family, [a, theta, phi], FD_STEP)?);
    let (f1, f2, f4) = (f(ALPHA0)?, f(2.0 * ALPHA0)?, f(4.0 * ALPHA0)?);
    Ok((8.0 * f1 - 6.0 * f2 + f4) / 3.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SphereAverage {
    /// ⟨(M⁻¹)_αα⟩ from the closed form.
    pub mean_inverse_closed: f64,
    /// ⟨(M⁻¹)_αα⟩ from numerically differentiated QFIMs.
    pub mean_inverse_numeric: f64,
    pub effective_qfi_closed: f64,
    pub effective_qfi_numeric: f64,
}

/// Uniform-sphere average of (M⁻¹)_αα, run on the closed form and on the
/// numeric QFIM path; fails if the two disagree by more than 1e-5.
pub fn sphere_average_effective_qfi() -> Result<SphereAverage> {
    sphere_average_with_prior(|_, _| 1.0)
}

/// As [`sphere_average_effective_qfi`] under a caller-supplied prior
/// density on (θ, φ).
pub fn sphere_average_with_prior<P: Fn(f64, f64) -> f64>(prior: P) -> Result<SphereAverage> {
    let rule = SphereRule::new(SPHERE_NODES.0, SPHERE_NODES.1, POLAR_CAP)?;
    let closed = rule.weighted_average(closed_form_inverse_alpha, &prior)?;
    let mut failure = None;
    let numeric = rule.weighted_average(
        |t, p| match separable_inverse_alpha(t, p) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &prior,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let out = SphereAverage {
        mean_inverse_closed: closed,
        mean_inverse_numeric: numeric,
        effective_qfi_closed: 1.0 / closed,
        effective_qfi_numeric: 1.0 / numeric,
    };
    if (out.effective_qfi_closed - out.effective_qfi_numeric).abs() > 1e-5 {
        return Err(Error::Computation("closed-form and numeric sphere averages disagree".into()));
    }
    Ok(out)
}

/// QFIM of a product family is the sum of the factors' QFIMs; exposed for
/// the additivity check.
pub fn product_family<FA, FB>(fa: FA, fb: FB) -> impl Fn([f64; 3]) -> [C64; 4]
where
    FA: Fn([f64; 3]) -> [C64; 2],
    FB: Fn([f64; 3]) -> [C64; 2],
{
    move |p| {
        let (a, b) = (fa(p), fb(p));
        [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
    }
}
