//! Dense complex matrices of size 2 and 4, Pauli algebra, SU(2) rotations
//! and their SO(3) images.
//!
//! Conventions: |0⟩ = |z+⟩, two-TLS products are ordered A ⊗ B, and a
//! rotation by α about n̂ is `cos(α/2)·1 − i sin(α/2)·n̂·σ`.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Result};

pub type C64 = Complex<f64>;

pub const ZERO: C64 = Complex::new(0.0, 0.0);
pub const ONE: C64 = Complex::new(1.0, 0.0);
pub const I: C64 = Complex::new(0.0, 1.0);

/// Tolerance on |n| for axis construction.
pub const AXIS_TOL: f64 = 1e-12;

/// Square complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = CMat<2>;
pub type Mat4 = CMat<4>;

impl<const N: usize> CMat<N> {
    pub const fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn diag(d: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn apply(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for i in 0..N {
            out[i] = (0..N).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Self::identity()) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// ⟨ψ|M|ψ⟩.
    pub fn expectation(&self, psi: &[C64; N]) -> C64 {
        inner(psi, &self.apply(psi))
    }

    /// Equality up to a global phase, measured entrywise after aligning
    /// the phase on the largest entry of `self`.
    pub fn phase_distance(&self, other: &Self) -> f64 {
        let (mut bi, mut bj, mut best) = (0, 0, -1.0);
        for i in 0..N {
            for j in 0..N {
                let n = self.0[i][j].norm();
                if n > best {
                    best = n;
                    bi = i;
                    bj = j;
                }
            }
        }
        let o = other.0[bi][bj];
        if o.norm() == 0.0 {
            return f64::INFINITY;
        }
        let phase = self.0[bi][bj] / o;
        let phase = phase / phase.norm();
        self.max_abs_diff(&other.scale(phase))
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Neg for CMat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        CMat([[a, b], [c, d]])
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

/// Σ conj(a_i) b_i.
pub fn inner<const N: usize>(a: &[C64; N], b: &[C64; N]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr<const N: usize>(a: &[C64; N]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn sigma_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// σ_x, σ_y, σ_z for index 0, 1, 2.
pub fn pauli(i: usize) -> Mat2 {
    match i {
        0 => sigma_x(),
        1 => sigma_y(),
        _ => sigma_z(),
    }
}

/// Unit vector on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "[f64; 3]", into = "[f64; 3]"))]
pub struct Axis {
    x: f64,
    y: f64,
    z: f64,
}

impl Axis {
    pub const X: Axis = Axis { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Axis = Axis { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Axis = Axis { x: 0.0, y: 0.0, z: 1.0 };

    /// Rejects vectors whose norm differs from 1 by more than [`AXIS_TOL`].
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > AXIS_TOL {
            return Err(domain("axis must be a unit vector"));
        }
        Ok(Axis { x, y, z })
    }

    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(n.is_finite() && n > 1e-300) {
            return Err(domain("cannot normalize a zero or non-finite vector"));
        }
        Ok(Axis { x: v[0] / n, y: v[1] / n, z: v[2] / n })
    }

    /// (sinθ cosφ, sinθ sinφ, cosθ).
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Axis { x: st * cp, y: st * sp, z: ct }
    }

    /// Polar and azimuthal angle, φ in (−π, π].
    pub fn angles(&self) -> (f64, f64) {
        (self.z.clamp(-1.0, 1.0).acos(), self.y.atan2(self.x))
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, v: &[f64; 3]) -> f64 {
        self.x * v[0] + self.y * v[1] + self.z * v[2]
    }
}

impl TryFrom<[f64; 3]> for Axis {
    type Error = crate::Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        Axis::new(v[0], v[1], v[2])
    }
}

impl From<Axis> for [f64; 3] {
    fn from(a: Axis) -> Self {
        a.to_array()
    }
}

/// n̂·σ.
pub fn pauli_dot(n: &Axis) -> Mat2 {
    let (x, y, z) = (n.x, n.y, n.z);
    Mat2::new(
        Complex::new(z, 0.0),
        Complex::new(x, -y),
        Complex::new(x, y),
        Complex::new(-z, 0.0),
    )
}

/// e^{−iα n̂·σ/2} from the closed cos/sin form.
pub fn rotation_unitary(alpha: f64, n: &Axis) -> Mat2 {
    let (s, c) = (alpha / 2.0).sin_cos();
    let (x, y, z) = (n.x * s, n.y * s, n.z * s);
    Mat2::new(
        Complex::new(c, -z),
        Complex::new(-y, -x),
        Complex::new(y, -x),
        Complex::new(c, z),
    )
}

/// Real 3×3 matrix, expected to lie in SO(3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rot3(pub [[f64; 3]; 3]);

impl Rot3 {
    pub const IDENTITY: Rot3 = Rot3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn transpose(&self) -> Self {
        Rot3(transpose3(&self.0))
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        matvec3(&self.0, v)
    }

    pub fn det(&self) -> f64 {
        det3(&self.0)
    }

    pub fn is_rotation(&self, tol: f64) -> bool {
        let rtr = matmul3(&transpose3(&self.0), &self.0);
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((rtr[i][j] - e).abs());
            }
        }
        worst <= tol && (self.det() - 1.0).abs() <= tol
    }
}

impl Mul for Rot3 {
    type Output = Rot3;
    fn mul(self, rhs: Rot3) -> Rot3 {
        Rot3(matmul3(&self.0, &rhs.0))
    }
}

/// R with U†σ_iU = Σ_j R_ij σ_j, i.e. R_ij = ½Tr(U†σ_iUσ_j).
///
/// A global phase drops out, so any unitary is accepted (the Z gate has
/// determinant −1 yet is a legitimate input).
pub fn su2_to_so3(u: &Mat2) -> Result<Rot3> {
    if !u.is_unitary(1e-10) {
        return Err(domain("su2_to_so3 needs a unitary matrix"));
    }
    let ud = u.adjoint();
    let mut r = [[0.0; 3]; 3];
    for (i, row) in r.iter_mut().enumerate() {
        let conj = ud * pauli(i) * *u;
        for (j, v) in row.iter_mut().enumerate() {
            *v = 0.5 * (conj * pauli(j)).trace().re;
        }
    }
    Ok(Rot3(r))
}

/// A ⊗ B with A acting on the first (most significant) index.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

pub fn matmul3(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

pub fn transpose3(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[j][i];
        }
    }
    m
}

pub fn matvec3(a: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}

pub fn det3(a: &[[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Eigen-decomposition of a real symmetric 3×3 matrix by cyclic Jacobi
/// sweeps. Eigenvalues come back in descending order; column k of the
/// second element is the eigenvector for eigenvalue k.
pub fn sym3_eigen(a: &[[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut m = *a;
    let mut v = Rot3::IDENTITY.0;
    for _ in 0..64 {
        let off = m[0][1].abs() + m[0][2].abs() + m[1][2].abs();
        if off < 1e-300 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if m[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let (mkp, mkq) = (m[k][p], m[k][q]);
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let (mpk, mqk) = (m[p][k], m[q][k]);
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).unwrap_or(core::cmp::Ordering::Equal));
    let vals = [m[idx[0]][idx[0]], m[idx[1]][idx[1]], m[idx[2]][idx[2]]];
    let mut vecs = [[0.0; 3]; 3];
    for (col, &k) in idx.iter().enumerate() {
        for row in 0..3 {
            vecs[row][col] = v[row][k];
        }
    }
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};
    use proptest::prelude::*;

    /// Scaling-and-squaring Taylor exponential of −iH; oracle only.
    pub(crate) fn expm_minus_i<const N: usize>(h: &CMat<N>) -> CMat<N> {
        let a = h.scale(-I).scale(Complex::new(1.0 / 1024.0, 0.0));
        let mut term = CMat::<N>::identity();
        let mut sum = CMat::<N>::identity();
        for k in 1..30 {
            term = (term * a).scale(Complex::new(1.0 / k as f64, 0.0));
            sum = sum + term;
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        sum
    }

    fn axis_strategy() -> impl Strategy<Value = Axis> {
        (-1.0f64..1.0, 0.0f64..(2.0 * PI)).prop_map(|(c, p)| Axis::from_angles(c.acos(), p))
    }

    #[test]
    fn pauli_dot_basics() {
        assert_eq!(pauli_dot(&Axis::Z), sigma_z());
        assert_eq!(pauli_dot(&Axis::X), sigma_x());
        let s = 1.0 / 3f64.sqrt();
        let n = Axis::new(s, s, s).unwrap();
        let m = pauli_dot(&n);
        assert!(m.is_hermitian(1e-15));
        assert!(m.trace().norm() < 1e-15);
        // eigenvalues of a traceless Hermitian 2×2 are ±sqrt(−det)
        let ev = (-m.det()).sqrt();
        assert!((ev.re - 1.0).abs() < 1e-12 && ev.im.abs() < 1e-12);
    }

    #[test]
    fn non_unit_axis_rejected() {
        assert!(Axis::new(1.0, 1.0, 0.0).is_err());
        assert!(Axis::new(1.0 + 1e-9, 0.0, 0.0).is_err());
        assert!(Axis::normalized([0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn rotation_examples() {
        let n = Axis::from_angles(0.3, 1.1);
        assert!(rotation_unitary(0.0, &n).max_abs_diff(&Mat2::identity()) < 1e-15);
        let want = Mat2::diag([-I, I]);
        assert!(rotation_unitary(PI, &Axis::Z).max_abs_diff(&want) < 1e-15);
        let r = rotation_unitary(PI / 2.0, &Axis::X);
        let oracle = expm_minus_i(&pauli_dot(&Axis::X).scale(Complex::new(PI / 4.0, 0.0)));
        assert!(r.max_abs_diff(&oracle) < 1e-12);
        let h = FRAC_1_SQRT_2;
        let want = Mat2::new(Complex::new(h, 0.0), Complex::new(0.0, -h), Complex::new(0.0, -h), Complex::new(h, 0.0));
        assert!(r.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn so3_examples() {
        let r = su2_to_so3(&Mat2::identity()).unwrap();
        assert_eq!(r, Rot3::IDENTITY);
        let z = su2_to_so3(&sigma_z()).unwrap();
        let want = [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((z.0[i][j] - want[i][j]).abs() < 1e-15);
            }
        }
        // quarter turn about y: U†σ_zU = −σ_x, so R x̂ = −ẑ
        let u = rotation_unitary(PI / 2.0, &Axis::Y);
        let r = su2_to_so3(&u).unwrap();
        let conj = u.adjoint() * sigma_z() * u;
        assert!(conj.max_abs_diff(&(-sigma_x())) < 1e-15);
        let rx = r.apply(&[1.0, 0.0, 0.0]);
        assert!(rx[0].abs() < 1e-15 && rx[1].abs() < 1e-15 && (rx[2] + 1.0).abs() < 1e-15);
        assert!(r.is_rotation(1e-12));
    }

    #[test]
    fn so3_rejects_non_unitary() {
        let m = Mat2::new(ONE, ONE, ZERO, ONE);
        assert!(su2_to_so3(&m).is_err());
    }

    #[test]
    fn kron_examples() {
        let id = kron2(&Mat2::identity(), &Mat2::identity());
        assert_eq!(id, Mat4::identity());
        let zz = kron2(&sigma_z(), &Mat2::identity());
        assert_eq!(zz, Mat4::diag([ONE, ONE, -ONE, -ONE]));
        let xx = kron2(&sigma_x(), &sigma_x());
        assert_eq!(xx.apply(&[ONE, ZERO, ZERO, ZERO]), [ZERO, ZERO, ZERO, ONE]);
    }

    #[test]
    fn jacobi_matches_characteristic_polynomial() {
        let a = [[2.0, -1.0, 0.3], [-1.0, 0.5, 0.7], [0.3, 0.7, -1.2]];
        let (vals, vecs) = sym3_eigen(&a);
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
        for k in 0..3 {
            let v = [vecs[0][k], vecs[1][k], vecs[2][k]];
            let av = matvec3(&a, &v);
            for i in 0..3 {
                assert!((av[i] - vals[k] * v[i]).abs() < 1e-12);
            }
        }
        let tr: f64 = vals.iter().sum();
        assert!((tr - (2.0 + 0.5 - 1.2)).abs() < 1e-12);
        assert!((vals[0] * vals[1] * vals[2] - det3(&a)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn rotations_compose(a in -10.0f64..10.0, b in -10.0f64..10.0, n in axis_strategy()) {
            let lhs = rotation_unitary(a, &n) * rotation_unitary(b, &n);
            prop_assert!(lhs.max_abs_diff(&rotation_unitary(a + b, &n)) < 1e-10);
        }

        #[test]
        fn rotation_is_unitary_with_unit_det(a in -10.0f64..10.0, n in axis_strategy()) {
            let u = rotation_unitary(a, &n);
            prop_assert!(u.is_unitary(1e-12));
            prop_assert!((u.det() - ONE).norm() < 1e-12);
        }

        #[test]
        fn rotation_matches_exponential(a in -6.0f64..6.0, n in axis_strategy()) {
            let h = pauli_dot(&n).scale(Complex::new(a / 2.0, 0.0));
            prop_assert!(rotation_unitary(a, &n).max_abs_diff(&expm_minus_i(&h)) < 1e-10);
        }

        #[test]
        fn so3_is_homomorphism(a in -6.0f64..6.0, b in -6.0f64..6.0, n in axis_strategy(), m in axis_strategy()) {
            let u = rotation_unitary(a, &n);
            let v = rotation_unitary(b, &m);
            let ruv = su2_to_so3(&(u * v)).unwrap();
            let prod = su2_to_so3(&u).unwrap() * su2_to_so3(&v).unwrap();
            for i in 0..3 { for j in 0..3 {
                prop_assert!((ruv.0[i][j] - prod.0[i][j]).abs() < 1e-10);
            }}
            prop_assert!(ruv.is_rotation(1e-12));
        }

        #[test]
        fn so3_reproduces_conjugation(a in -6.0f64..6.0, n in axis_strategy()) {
            let u = rotation_unitary(a, &n);
            let r = su2_to_so3(&u).unwrap();
            for i in 0..3 {
                let lhs = u.adjoint() * pauli(i) * u;
                let mut rhs = Mat2::zeros();
                for j in 0..3 {
                    rhs = rhs + pauli(j).scale(Complex::new(r.0[i][j], 0.0));
                }
                prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            }
        }

        #[test]
        fn z_conjugation_flips_transverse(a in -6.0f64..6.0, n in axis_strategy()) {
            let z = sigma_z();
            let lhs = z * rotation_unitary(a, &n) * z;
            let flipped = Axis::new(-n.x(), -n.y(), n.z()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rotation_unitary(a, &flipped)) < 1e-12);
        }
    }
}
