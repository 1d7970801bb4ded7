//! Pure two-TLS states: Bloch vectors, correlation tensor, concurrence and
//! the canonical reference family.

use num_complex::Complex;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};
use crate::linalg::{inner, kron2, norm_sqr, pauli, Mat2, C64, ONE, ZERO};

/// Normalization tolerance enforced at construction.
pub const NORM_TOL: f64 = 1e-12;

/// a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩, first index on TLS A.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoTlsState {
    amp: [C64; 4],
}

impl TwoTlsState {
    pub fn new(amp: [C64; 4]) -> Result<Self> {
        let n = norm_sqr(&amp);
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
            return Err(domain("two-TLS state is not normalized"));
        }
        Ok(TwoTlsState { amp })
    }

    /// Divides by the norm; for noisy trajectories that drift off the sphere.
    pub fn renormalized(amp: [C64; 4]) -> Result<Self> {
        let n = norm_sqr(&amp).sqrt();
        if !(n.is_finite() && n > 1e-300) {
            return Err(domain("cannot renormalize a zero vector"));
        }
        Ok(TwoTlsState { amp: amp.map(|a| a / n) })
    }

    pub fn product(a: &[C64; 2], b: &[C64; 2]) -> Result<Self> {
        Self::new([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    /// (|01⟩ − |10⟩)/√2.
    pub fn singlet() -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        TwoTlsState { amp: [ZERO, Complex::new(h, 0.0), Complex::new(-h, 0.0), ZERO] }
    }

    /// (|00⟩ + |11⟩)/√2.
    pub fn phi_plus() -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        TwoTlsState { amp: [Complex::new(h, 0.0), ZERO, ZERO, Complex::new(h, 0.0)] }
    }

    pub fn amplitudes(&self) -> [C64; 4] {
        self.amp
    }

    pub fn overlap(&self, other: &TwoTlsState) -> C64 {
        inner(&self.amp, &other.amp)
    }

    /// 1 − |⟨φ|ψ⟩|; zero iff equal up to a global phase.
    pub fn phase_distance(&self, other: &TwoTlsState) -> f64 {
        (1.0 - self.overlap(other).norm()).abs()
    }
}

/// Single-TLS eigenstates of the Pauli operators.
pub mod qubit {
    use super::*;

    pub fn z_plus() -> [C64; 2] {
        [ONE, ZERO]
    }
    pub fn z_minus() -> [C64; 2] {
        [ZERO, ONE]
    }
    pub fn x_plus() -> [C64; 2] {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        [Complex::new(h, 0.0), Complex::new(h, 0.0)]
    }
    pub fn x_minus() -> [C64; 2] {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        [Complex::new(h, 0.0), Complex::new(-h, 0.0)]
    }
    pub fn y_plus() -> [C64; 2] {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        [Complex::new(h, 0.0), Complex::new(0.0, h)]
    }

    /// ⟨ψ|σ|ψ⟩.
    pub fn bloch(psi: &[C64; 2]) -> [f64; 3] {
        [0, 1, 2].map(|i| pauli(i).expectation(psi).re)
    }
}

/// (r_A, r_B) with r_A = ⟨σ⊗1⟩ and r_B = ⟨1⊗σ⟩.
pub fn bloch_vectors(psi: &TwoTlsState) -> ([f64; 3], [f64; 3]) {
    let id = Mat2::identity();
    let a = [0, 1, 2].map(|i| kron2(&pauli(i), &id).expectation(&psi.amp).re);
    let b = [0, 1, 2].map(|i| kron2(&id, &pauli(i)).expectation(&psi.amp).re);
    (a, b)
}

/// T_ij = ⟨σ_i ⊗ σ_j⟩ from the closed form in the amplitudes.
pub fn correlation_tensor(psi: &TwoTlsState) -> [[f64; 3]; 3] {
    let [a, b, c, d] = psi.amp;
    let ad = a * d.conj();
    let bc = b * c.conj();
    let ac = a * c.conj();
    let bd = b * d.conj();
    let ab = a * b.conj();
    let cd = c * d.conj();
    [
        [2.0 * (ad + bc).re, 2.0 * (bc - ad).im, 2.0 * (ac - bd).re],
        [-2.0 * (ad + bc).im, 2.0 * (bc - ad).re, 2.0 * (bd - ac).im],
        [
            2.0 * (ab - cd).re,
            2.0 * (cd - ab).im,
            a.norm_sqr() - b.norm_sqr() - c.norm_sqr() + d.norm_sqr(),
        ],
    ]
}

/// 2|ad − bc|, which is 1 for Bell states.
pub fn concurrence(psi: &TwoTlsState) -> f64 {
    let [a, b, c, d] = psi.amp;
    (2.0 * (a * d - b * c).norm()).min(1.0)
}

/// √λ₁|00⟩ + √λ₂|11⟩ with λ = (1 ± √(1 − C0²))/2.
pub fn reference_state(c0: f64) -> Result<TwoTlsState> {
    if !(0.0..=1.0).contains(&c0) {
        return Err(domain("concurrence must lie in [0, 1]"));
    }
    let r = (1.0 - c0 * c0).sqrt();
    let l1 = (1.0 + r) / 2.0;
    let l2 = (1.0 - r) / 2.0;
    TwoTlsState::new([Complex::new(l1.sqrt(), 0.0), ZERO, ZERO, Complex::new(l2.sqrt(), 0.0)])
}

/// (U_A ⊗ U_B)|ψ⟩.
pub fn apply_local(ua: &Mat2, ub: &Mat2, psi: &TwoTlsState) -> Result<TwoTlsState> {
    if !ua.is_unitary(1e-10) || !ub.is_unitary(1e-10) {
        return Err(domain("local operations must be unitary"));
    }
    TwoTlsState::renormalized(kron2(ua, ub).apply(&psi.amp))
}

/// Haar-random pure state from normalized complex Gaussian amplitudes.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> TwoTlsState {
    loop {
        let amp: [C64; 4] = core::array::from_fn(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        if let Ok(s) = TwoTlsState::renormalized(amp) {
            return s;
        }
    }
}

/// Haar-random element of SU(2), from a uniform point on S³.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    loop {
        let v: [f64; 4] = core::array::from_fn(|_| rng.sample(StandardNormal));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            let (a, b) = (Complex::new(v[0] / n, v[1] / n), Complex::new(v[2] / n, v[3] / n));
            return Mat2::new(a, -b.conj(), b, a.conj());
        }
    }
}
