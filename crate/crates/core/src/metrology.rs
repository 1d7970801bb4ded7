//! Fisher information, quantum Fisher information and the two-TLS bounds.
//!
//! The generator of a single-TLS rotation is H = n̂·σ/2, so one qubit has
//! QFI 1. For two TLSs evolving as U ⊗ U (s = +1) or U ⊗ U† (s = −1) the
//! generator is (n̂·σ⊗1 + s 1⊗n̂·σ)/2 and the QFI is the quadratic form
//! 2(1 + s n̂ᵀTn̂) − (n̂·r_A + s n̂·r_B)².

use num_complex::Complex;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Result};
use crate::linalg::{inner, kron2, norm_sqr, pauli_dot, rotation_unitary, Axis, CMat, Mat2, Mat4, C64};
use crate::optimize::maximize_on_sphere;
use crate::states::{apply_local, bloch_vectors, correlation_tensor, reference_state, TwoTlsState};

/// Terms with a probability below this are dropped from the FI sum.
pub const P_FLOOR: f64 = 1e-12;
/// Default central-difference step in radians.
pub const FD_STEP: f64 = 1e-5;
/// Axis grid size used by [`max_qfi_over_axes`].
pub const AXIS_GRID: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EvolutionSign {
    /// U ⊗ U
    Plus,
    /// U ⊗ U†
    Minus,
}

impl EvolutionSign {
    pub fn value(self) -> f64 {
        match self {
            EvolutionSign::Plus => 1.0,
            EvolutionSign::Minus => -1.0,
        }
    }
}

impl TryFrom<i32> for EvolutionSign {
    type Error = crate::Error;
    fn try_from(s: i32) -> Result<Self> {
        match s {
            1 => Ok(EvolutionSign::Plus),
            -1 => Ok(EvolutionSign::Minus),
            _ => Err(domain("evolution sign must be +1 or -1")),
        }
    }
}

/// Σ_j (∂_α P_j)² / P_j by central differences.
pub fn classical_fi<const N: usize, F>(dist: F, alpha: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> [f64; N],
{
    if !(step > 0.0) {
        return Err(domain("finite-difference step must be positive"));
    }
    let p = dist(alpha);
    let hi = dist(alpha + step);
    let lo = dist(alpha - step);
    for q in [&p, &hi, &lo] {
        if q.iter().any(|&v| v < -P_FLOOR || !v.is_finite()) {
            return Err(domain("negative probability in outcome distribution"));
        }
        if (q.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
            return Err(domain("outcome distribution does not sum to one"));
        }
    }
    let mut fi = 0.0;
    for j in 0..N {
        if p[j] < P_FLOOR {
            continue;
        }
        let d = (hi[j] - lo[j]) / (2.0 * step);
        fi += d * d / p[j];
    }
    Ok(fi)
}

/// 4(⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²) with ∂ψ from central differences.
pub fn qfi_pure<const N: usize, F>(family: F, alpha: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> [C64; N],
{
    let psi = family(alpha);
    let hi = family(alpha + step);
    let lo = family(alpha - step);
    for v in [&psi, &hi, &lo] {
        if (norm_sqr(v) - 1.0).abs() > 1e-8 {
            return Err(domain("state family leaves the unit sphere"));
        }
    }
    let inv = Complex::new(1.0 / (2.0 * step), 0.0);
    let mut d = [C64::new(0.0, 0.0); N];
    for i in 0..N {
        d[i] = (hi[i] - lo[i]) * inv;
    }
    Ok(4.0 * (norm_sqr(&d) - inner(&psi, &d).norm_sqr()))
}

/// 4·Var_ψ(H).
pub fn generator_variance_qfi<const N: usize>(h: &CMat<N>, psi: &[C64; N]) -> Result<f64> {
    if !h.is_hermitian(1e-12) {
        return Err(domain("generator must be Hermitian"));
    }
    let m = h.expectation(psi).re;
    let m2 = norm_sqr(&h.apply(psi));
    Ok(4.0 * (m2 - m * m))
}

/// (n̂·σ ⊗ 1 + s 1 ⊗ n̂·σ)/2.
pub fn two_tls_generator(s: EvolutionSign, n: &Axis) -> Mat4 {
    let p = pauli_dot(n);
    let id = Mat2::identity();
    (kron2(&p, &id) + kron2(&id, &p).scale(Complex::new(s.value(), 0.0))).scale(Complex::new(0.5, 0.0))
}

/// The QFI as a symmetric matrix M with QFI = n̂ᵀMn̂:
/// M = 2·1 + s(T + Tᵀ) − vvᵀ, v = r_A + s r_B.
pub fn qfi_quadratic_form(psi: &TwoTlsState, s: EvolutionSign) -> [[f64; 3]; 3] {
    let t = correlation_tensor(psi);
    let (ra, rb) = bloch_vectors(psi);
    let sv = s.value();
    let v = [0, 1, 2].map(|i| ra[i] + sv * rb[i]);
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = sv * (t[i][j] + t[j][i]) - v[i] * v[j] + if i == j { 2.0 } else { 0.0 };
        }
    }
    m
}

pub fn two_tls_qfi(psi: &TwoTlsState, s: EvolutionSign, n: &Axis) -> f64 {
    let t = correlation_tensor(psi);
    let (ra, rb) = bloch_vectors(psi);
    let nv = n.to_array();
    let mut ntn = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            ntn += nv[i] * t[i][j] * nv[j];
        }
    }
    let r = n.dot(&ra) + s.value() * n.dot(&rb);
    2.0 * (1.0 + s.value() * ntn) - r * r
}

/// 2(1 + C).
pub fn concurrence_bound(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(domain("concurrence must lie in [0, 1]"));
    }
    Ok(2.0 * (1.0 + c))
}

/// Shape of the relative rotation in an optimal input state
/// (U_id ⊗ U_id U_rel)|χ⟩.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OptimalBranch {
    /// Rotation by φ about ŷ (s = −1) or x̂ (s = +1).
    AxisRotation,
    /// π rotation about (0, cosφ, sinφ) for s = −1 or (cosφ, 0, sinφ) for s = +1.
    PiRotation,
    /// −i m̂·σ on TLS B; maximally entangled χ with s = −1 only.
    PauliFlip(Axis),
    /// Rotation by θ about (cosφ, 0, sinφ); maximally entangled χ with s = +1 only.
    XzPlaneRotation { theta: f64 },
}

pub fn optimal_state(c0: f64, s: EvolutionSign, phi: f64, branch: OptimalBranch, u_id: &Mat2) -> Result<TwoTlsState> {
    let chi = reference_state(c0)?;
    let maximal = (c0 - 1.0).abs() <= 1e-12;
    let (sp, cp) = phi.sin_cos();
    let u_rel = match (branch, s) {
        (OptimalBranch::AxisRotation, EvolutionSign::Minus) => rotation_unitary(phi, &Axis::Y),
        (OptimalBranch::AxisRotation, EvolutionSign::Plus) => rotation_unitary(phi, &Axis::X),
        (OptimalBranch::PiRotation, EvolutionSign::Minus) => {
            rotation_unitary(core::f64::consts::PI, &Axis::normalized([0.0, cp, sp])?)
        }
        (OptimalBranch::PiRotation, EvolutionSign::Plus) => {
            rotation_unitary(core::f64::consts::PI, &Axis::normalized([cp, 0.0, sp])?)
        }
        (OptimalBranch::PauliFlip(m), EvolutionSign::Minus) if maximal => pauli_dot(&m).scale(-crate::linalg::I),
        (OptimalBranch::XzPlaneRotation { theta }, EvolutionSign::Plus) if maximal => {
            rotation_unitary(theta, &Axis::normalized([cp, 0.0, sp])?)
        }
        _ => return Err(domain("optimal-state branch does not exist for this sign and concurrence")),
    };
    if !u_id.is_unitary(1e-10) {
        return Err(domain("U_id must be unitary"));
    }
    apply_local(u_id, &(*u_id * u_rel), &chi)
}

/// Largest QFI over field directions and an axis attaining it.
pub fn max_qfi_over_axes(psi: &TwoTlsState, s: EvolutionSign) -> (f64, Axis) {
    let m = qfi_quadratic_form(psi, s);
    let form = |n: &Axis| {
        let v = n.to_array();
        let mut q = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                q += v[i] * m[i][j] * v[j];
            }
        }
        q
    };
    maximize_on_sphere(form, AXIS_GRID)
}

/// ‖T − s·1‖_max ≤ tol.
pub fn is_axis_independent_optimal(psi: &TwoTlsState, s: EvolutionSign, tol: f64) -> bool {
    let t = correlation_tensor(psi);
    let sv = s.value();
    (0..3).all(|i| (0..3).all(|j| (t[i][j] - if i == j { sv } else { 0.0 }).abs() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sigma_y, sigma_z, sym3_eigen, I, ONE, ZERO};
    use crate::optimize::fibonacci_sphere;
    use crate::states::qubit;
    use crate::states::tests::{state_strategy, unitary_strategy};
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn axis_strategy() -> impl Strategy<Value = Axis> {
        (-1.0f64..1.0, 0.0f64..(2.0 * PI)).prop_map(|(c, p)| Axis::from_angles(c.acos(), p))
    }

    fn lambda_max(psi: &TwoTlsState, s: EvolutionSign) -> f64 {
        sym3_eigen(&qfi_quadratic_form(psi, s)).0[0]
    }

    fn positronium(alpha: f64, n: &Axis) -> [C64; 4] {
        let u = rotation_unitary(alpha, n);
        kron2(&u, &u.adjoint()).apply(&TwoTlsState::singlet().amplitudes())
    }

    #[test]
    fn classical_fi_examples() {
        let fi = classical_fi(|a| [a.cos().powi(2), a.sin().powi(2)], PI / 8.0, FD_STEP).unwrap();
        assert!((fi - 4.0).abs() < 1e-6);
        let fi = classical_fi(|_| [0.3, 0.7], 0.4, FD_STEP).unwrap();
        assert_eq!(fi, 0.0);
        // analytic (∂P)²/(P(1−P)) for cos²(α/2) is 1 everywhere
        let fi = classical_fi(|a| [(a / 2.0).cos().powi(2), (a / 2.0).sin().powi(2)], PI / 3.0, FD_STEP).unwrap();
        assert!((fi - 1.0).abs() < 1e-6);
        assert!(classical_fi(|_| [1.1, -0.1], 0.0, FD_STEP).is_err());
        assert!(classical_fi(|_| [0.5, 0.5], 0.0, 0.0).is_err());
    }

    #[test]
    fn qfi_pure_examples() {
        let zp = |a: f64| rotation_unitary(a, &Axis::Z).apply(&qubit::z_plus());
        assert!(qfi_pure(zp, 0.7, FD_STEP).unwrap().abs() < 1e-8);
        let xp = |a: f64| rotation_unitary(a, &Axis::Z).apply(&qubit::x_plus());
        assert!((qfi_pure(xp, 0.7, FD_STEP).unwrap() - 1.0).abs() < 1e-8);
        let n = Axis::from_angles(0.4, 2.2);
        assert!((qfi_pure(|a| positronium(a, &n), 0.3, FD_STEP).unwrap() - 4.0).abs() < 1e-8);
        let drifting = |a: f64| [C64::new(1.0 + a, 0.0), ZERO];
        assert!(qfi_pure(drifting, 0.0, FD_STEP).is_err());
    }

    #[test]
    fn generator_variance_examples() {
        let h = sigma_z().scale(Complex::new(0.5, 0.0));
        assert!((generator_variance_qfi(&h, &qubit::x_plus()).unwrap() - 1.0).abs() < 1e-15);
        assert!(generator_variance_qfi(&h, &qubit::z_plus()).unwrap().abs() < 1e-15);
        let singlet = TwoTlsState::singlet().amplitudes();
        for n in fibonacci_sphere(10) {
            let h = two_tls_generator(EvolutionSign::Minus, &n);
            assert!((generator_variance_qfi(&h, &singlet).unwrap() - 4.0).abs() < 1e-12);
        }
        let not_hermitian = Mat2::new(ZERO, ONE, ZERO, ZERO);
        assert!(generator_variance_qfi(&not_hermitian, &qubit::x_plus()).is_err());
    }

    #[test]
    fn variance_matches_derivative_definition() {
        let n = Axis::from_angles(1.0, 0.5);
        let h = pauli_dot(&n).scale(Complex::new(0.5, 0.0));
        let psi = qubit::y_plus();
        let family = |a: f64| rotation_unitary(a, &n).apply(&psi);
        let q1 = generator_variance_qfi(&h, &psi).unwrap();
        let q2 = qfi_pure(family, 0.0, FD_STEP).unwrap();
        assert!((q1 - q2).abs() < 1e-8);
    }

    #[test]
    fn two_tls_examples() {
        let s = TwoTlsState::singlet();
        for n in fibonacci_sphere(25) {
            assert!((two_tls_qfi(&s, EvolutionSign::Minus, &n) - 4.0).abs() < 1e-12);
            assert!(two_tls_qfi(&s, EvolutionSign::Plus, &n).abs() < 1e-12);
        }
        let p = TwoTlsState::product(&qubit::x_plus(), &qubit::z_plus()).unwrap();
        assert!((two_tls_qfi(&p, EvolutionSign::Minus, &Axis::Z) - 1.0).abs() < 1e-12);
        let h = two_tls_generator(EvolutionSign::Minus, &Axis::Z);
        assert!((generator_variance_qfi(&h, &p.amplitudes()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bound_values() {
        assert_eq!(concurrence_bound(0.0).unwrap(), 2.0);
        assert_eq!(concurrence_bound(1.0).unwrap(), 4.0);
        assert_eq!(concurrence_bound(0.5).unwrap(), 3.0);
        assert!(concurrence_bound(1.5).is_err());
    }

    #[test]
    fn optimal_state_examples() {
        let id = Mat2::identity();
        // π rotation about ŷ sends Φ⁺ to the singlet
        let s = optimal_state(1.0, EvolutionSign::Minus, 0.0, OptimalBranch::PiRotation, &id).unwrap();
        assert!(s.phase_distance(&TwoTlsState::singlet()) < 1e-15);
        let flip = optimal_state(1.0, EvolutionSign::Minus, 0.0, OptimalBranch::PauliFlip(Axis::Y), &id).unwrap();
        assert!(flip.phase_distance(&TwoTlsState::singlet()) < 1e-15);
        let _ = sigma_y().scale(-I);

        let p = optimal_state(0.0, EvolutionSign::Minus, 0.0, OptimalBranch::AxisRotation, &id).unwrap();
        let (q, n) = max_qfi_over_axes(&p, EvolutionSign::Minus);
        assert!((q - 2.0).abs() < 1e-8);
        assert!(n.z().abs() < 1e-4);

        let u = rotation_unitary(0.9, &Axis::from_angles(0.3, 0.2));
        let q06 = optimal_state(0.6, EvolutionSign::Plus, PI / 4.0, OptimalBranch::AxisRotation, &u).unwrap();
        assert!((crate::states::concurrence(&q06) - 0.6).abs() < 1e-12);
        let (q, _) = max_qfi_over_axes(&q06, EvolutionSign::Plus);
        assert!((q - 3.2).abs() < 1e-6);
        assert!((lambda_max(&q06, EvolutionSign::Plus) - 3.2).abs() < 1e-12);
    }

    #[test]
    fn invalid_branches_rejected() {
        let id = Mat2::identity();
        let e = optimal_state(0.5, EvolutionSign::Minus, 0.0, OptimalBranch::PauliFlip(Axis::X), &id);
        assert!(e.is_err());
        let e = optimal_state(1.0, EvolutionSign::Minus, 0.0, OptimalBranch::XzPlaneRotation { theta: 1.0 }, &id);
        assert!(e.is_err());
        let e = optimal_state(0.3, EvolutionSign::Plus, 0.0, OptimalBranch::XzPlaneRotation { theta: 1.0 }, &id);
        assert!(e.is_err());
    }

    #[test]
    fn max_over_axes_examples() {
        let (q, _) = max_qfi_over_axes(&TwoTlsState::singlet(), EvolutionSign::Minus);
        assert!((q - 4.0).abs() < 1e-12);
        let (q, n) = max_qfi_over_axes(&TwoTlsState::phi_plus(), EvolutionSign::Plus);
        assert!((q - 4.0).abs() < 1e-10);
        assert!(n.y().abs() < 1e-5);
        let p = TwoTlsState::product(&qubit::x_plus(), &qubit::z_plus()).unwrap();
        let (q, n) = max_qfi_over_axes(&p, EvolutionSign::Minus);
        assert!((q - 2.0).abs() < 1e-10);
        assert!(n.x().abs() < 1e-5 && n.z().abs() < 1e-5);
    }

    #[test]
    fn axis_independence_examples() {
        let s = TwoTlsState::singlet();
        assert!(is_axis_independent_optimal(&s, EvolutionSign::Minus, 1e-10));
        assert!(!is_axis_independent_optimal(&s, EvolutionSign::Plus, 1e-10));
        assert!(!is_axis_independent_optimal(&TwoTlsState::phi_plus(), EvolutionSign::Minus, 1e-10));
    }

    #[test]
    fn singlet_qfi_is_flat() {
        let s = TwoTlsState::singlet();
        let vals: std::vec::Vec<f64> = fibonacci_sphere(1000).iter().map(|n| two_tls_qfi(&s, EvolutionSign::Minus, n)).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt();
        assert!(sd < 1e-10);
    }

    fn sign_strategy() -> impl Strategy<Value = EvolutionSign> {
        prop_oneof![Just(EvolutionSign::Plus), Just(EvolutionSign::Minus)]
    }

    proptest! {
        #[test]
        fn closed_form_equals_generator_variance(psi in state_strategy(), s in sign_strategy(), n in axis_strategy()) {
            let h = two_tls_generator(s, &n);
            let v = generator_variance_qfi(&h, &psi.amplitudes()).unwrap();
            prop_assert!((two_tls_qfi(&psi, s, &n) - v).abs() < 1e-10);
        }

        #[test]
        fn concurrence_bound_holds(psi in state_strategy(), s in sign_strategy()) {
            let (q, _) = max_qfi_over_axes(&psi, s);
            let c = crate::states::concurrence(&psi);
            prop_assert!(q <= 2.0 * (1.0 + c) + 1e-6);
            prop_assert!((q - lambda_max(&psi, s)).abs() < 1e-9);
        }

        #[test]
        fn optimal_states_saturate(c0 in 0.0f64..=1.0, phi in 0.0f64..(2.0 * PI), u in unitary_strategy(),
                                   pi_branch in any::<bool>(), s in sign_strategy()) {
            let branch = if pi_branch { OptimalBranch::PiRotation } else { OptimalBranch::AxisRotation };
            let psi = optimal_state(c0, s, phi, branch, &u).unwrap();
            let (q, _) = max_qfi_over_axes(&psi, s);
            prop_assert!((q - 2.0 * (1.0 + c0)).abs() < 1e-6);
        }

        #[test]
        fn maximally_entangled_branches_saturate(m in axis_strategy(), theta in -6.0f64..6.0, phi in 0.0f64..(2.0 * PI), u in unitary_strategy()) {
            let a = optimal_state(1.0, EvolutionSign::Minus, phi, OptimalBranch::PauliFlip(m), &u).unwrap();
            prop_assert!((max_qfi_over_axes(&a, EvolutionSign::Minus).0 - 4.0).abs() < 1e-6);
            let b = optimal_state(1.0, EvolutionSign::Plus, phi, OptimalBranch::XzPlaneRotation { theta }, &u).unwrap();
            prop_assert!((max_qfi_over_axes(&b, EvolutionSign::Plus).0 - 4.0).abs() < 1e-6);
        }

        #[test]
        fn fi_never_exceeds_qfi(u in unitary_strategy(), n in axis_strategy(), alpha in 0.1f64..3.0, basis in unitary_strategy()) {
            let psi0 = u.apply(&qubit::z_plus());
            let family = |a: f64| rotation_unitary(a, &n).apply(&psi0);
            let q = qfi_pure(family, alpha, FD_STEP).unwrap();
            let dist = |a: f64| {
                let v = basis.adjoint().apply(&family(a));
                [v[0].norm_sqr(), v[1].norm_sqr()]
            };
            let fi = classical_fi(dist, alpha, FD_STEP).unwrap();
            prop_assert!(fi <= q + 1e-6);
        }
    }
}
