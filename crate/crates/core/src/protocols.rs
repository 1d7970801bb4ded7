//! The sensing strategies as exact outcome distributions, with
//! space–time-volume accounting.
//!
//! v_st counts TLSs times sequential field applications. Results are
//! compared per two units of v_st.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{domain, Result};
use crate::linalg::{inner, kron2, norm_sqr, rotation_unitary, Axis, Mat2, C64};
use crate::metrology::{classical_fi, qfi_pure, FD_STEP};
use crate::qfim::sphere_average_effective_qfi;
use crate::states::{qubit, TwoTlsState};

/// Probabilities below this mark α as a point where FI needs an offset.
pub const DEGENERATE_P: f64 = 1e-10;
/// Shift applied to α at degenerate points.
pub const DEGENERATE_OFFSET: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ProtocolKind {
    SingleQubitThreeAxis,
    Agnostic,
    SeparableAntimatter,
    Positronium,
    PositroniumSequential { n_reps: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    pub axis: Axis,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolResult {
    /// One distribution per measurement performed in a trial.
    pub probabilities: Vec<Vec<f64>>,
    pub fi: f64,
    pub v_st: u32,
    pub fi_per_two_vst: f64,
    /// FI was evaluated at α + [`DEGENERATE_OFFSET`].
    pub offset_applied: bool,
}

/// P(Ψ⁻) and its complement for an evolved two-TLS amplitude vector. The
/// complement is the squared norm of the orthogonal part, not 1 − P.
fn singlet_projection(psi: &[C64; 4]) -> [f64; 2] {
    let s = TwoTlsState::singlet().amplitudes();
    let c = inner(&s, psi);
    let mut rest = *psi;
    for i in 0..4 {
        rest[i] -= s[i] * c;
    }
    [c.norm_sqr(), norm_sqr(&rest)]
}

fn evolve(ua: &Mat2, ub: &Mat2) -> [C64; 4] {
    kron2(ua, ub).apply(&TwoTlsState::singlet().amplitudes())
}

/// (U_α ⊗ U_α†)|Ψ⁻⟩ measured with {|Ψ⁻⟩⟨Ψ⁻|, 1 − |Ψ⁻⟩⟨Ψ⁻|}.
pub fn positronium_probs(alpha: f64, n: &Axis) -> [f64; 2] {
    let u = rotation_unitary(alpha, n);
    singlet_projection(&evolve(&u, &u.adjoint()))
}

/// (U_α ⊗ 1)|Ψ⁻⟩ on the same POVM.
pub fn agnostic_probs(alpha: f64, n: &Axis) -> [f64; 2] {
    singlet_projection(&evolve(&rotation_unitary(alpha, n), &Mat2::identity()))
}

/// (U_α^k ⊗ U_α†^k)|Ψ⁻⟩.
pub fn sequential_probs(alpha: f64, n: &Axis, n_reps: u32) -> [f64; 2] {
    positronium_probs(alpha * n_reps as f64, n)
}

/// (P(x+) of U_α|x+⟩, P(z+) of U_α†|z+⟩).
pub fn separable_probs(alpha: f64, n: &Axis) -> (f64, f64) {
    let u = rotation_unitary(alpha, n);
    let px = inner(&qubit::x_plus(), &u.apply(&qubit::x_plus())).norm_sqr();
    let pz = inner(&qubit::z_plus(), &u.adjoint().apply(&qubit::z_plus())).norm_sqr();
    (px, pz)
}

fn separable_joint(alpha: f64, n: &Axis) -> [f64; 4] {
    let u = rotation_unitary(alpha, n);
    let a = u.apply(&qubit::x_plus());
    let b = u.adjoint().apply(&qubit::z_plus());
    let px = [inner(&qubit::x_plus(), &a).norm_sqr(), inner(&qubit::x_minus(), &a).norm_sqr()];
    let pz = [b[0].norm_sqr(), b[1].norm_sqr()];
    [px[0] * pz[0], px[0] * pz[1], px[1] * pz[0], px[1] * pz[1]]
}

/// Classical FI at α, moved by [`DEGENERATE_OFFSET`] when some outcome
/// has vanishing probability. Returns (fi, offset applied).
pub fn fi_with_offset<const N: usize, F>(dist: F, alpha: f64) -> Result<(f64, bool)>
where
    F: Fn(f64) -> [f64; N],
{
    let degenerate = dist(alpha).iter().any(|&p| p < DEGENERATE_P);
    let at = if degenerate { alpha + DEGENERATE_OFFSET } else { alpha };
    Ok((classical_fi(dist, at, FD_STEP)?, degenerate))
}

/// Per-batch (FI, P(+)) of one qubit prepared in `probe` and measured
/// along the direction in which its Bloch vector moves, n̂ × r(α).
fn three_axis_batch(alpha: f64, n: &Axis, probe: &[C64; 2]) -> Result<(f64, f64)> {
    let r = qubit::bloch(&rotation_unitary(alpha, n).apply(probe));
    let nv = n.to_array();
    let v = [nv[1] * r[2] - nv[2] * r[1], nv[2] * r[0] - nv[0] * r[2], nv[0] * r[1] - nv[1] * r[0]];
    // an unrotatable probe: any fixed measurement gives nothing
    let m = match Axis::normalized(v) {
        Ok(m) if v.iter().map(|x| x * x).sum::<f64>() > 1e-20 => m,
        _ => return Ok((0.0, 0.5 * (1.0 + r[2]))),
    };
    let dist = |a: f64| {
        let b = qubit::bloch(&rotation_unitary(a, n).apply(probe));
        let p = (0.5 * (1.0 + m.dot(&b))).clamp(0.0, 1.0);
        [p, 1.0 - p]
    };
    Ok((fi_with_offset(dist, alpha)?.0, dist(alpha)[0]))
}

/// Average per-trial FI of one qubit over batches probed in |x+⟩, |y+⟩
/// and |z+⟩.
pub fn single_qubit_three_axis_fi(alpha: f64, n: &Axis) -> Result<f64> {
    let mut total = 0.0;
    for probe in [qubit::x_plus(), qubit::y_plus(), qubit::z_plus()] {
        total += three_axis_batch(alpha, n, &probe)?.0;
    }
    Ok(total / 3.0)
}

/// QFI of (U_α ⊗ U_α†)^k on the singlet and its v_st = 2k.
pub fn sequential_positronium_qfi(n_reps: u32) -> Result<(f64, u32)> {
    if n_reps == 0 {
        return Err(domain("n_reps must be at least 1"));
    }
    let n = Axis::from_angles(0.7, 0.3);
    let family = |a: f64| {
        let u = rotation_unitary(a, &n);
        let (mut ua, mut ub) = (Mat2::identity(), Mat2::identity());
        for _ in 0..n_reps {
            ua = ua * u;
            ub = ub * u.adjoint();
        }
        evolve(&ua, &ub)
    };
    let q = qfi_pure(family, 0.37, FD_STEP / n_reps as f64)?;
    Ok((q, 2 * n_reps))
}

pub fn run_ideal(spec: &ProtocolSpec) -> Result<ProtocolResult> {
    let (a, n) = (spec.alpha, &spec.axis);
    if !a.is_finite() {
        return Err(domain("alpha must be finite"));
    }
    let (probabilities, fi, v_st, offset) = match spec.kind {
        ProtocolKind::Positronium => {
            let (fi, off) = fi_with_offset(|x| positronium_probs(x, n), a)?;
            (vec![positronium_probs(a, n).to_vec()], fi, 2, off)
        }
        ProtocolKind::Agnostic => {
            let (fi, off) = fi_with_offset(|x| agnostic_probs(x, n), a)?;
            (vec![agnostic_probs(a, n).to_vec()], fi, 2, off)
        }
        ProtocolKind::PositroniumSequential { n_reps } => {
            if n_reps == 0 {
                return Err(domain("n_reps must be at least 1"));
            }
            let (fi, off) = fi_with_offset(|x| sequential_probs(x, n, n_reps), a)?;
            (vec![sequential_probs(a, n, n_reps).to_vec()], fi, 2 * n_reps, off)
        }
        ProtocolKind::SeparableAntimatter => {
            let (fi, off) = fi_with_offset(|x| separable_joint(x, n), a)?;
            let (px, pz) = separable_probs(a, n);
            (vec![vec![px, 1.0 - px], vec![pz, 1.0 - pz]], fi, 2, off)
        }
        ProtocolKind::SingleQubitThreeAxis => {
            let mut probs = Vec::new();
            for p in [qubit::x_plus(), qubit::y_plus(), qubit::z_plus()] {
                let (_, plus) = three_axis_batch(a, n, &p)?;
                probs.push(vec![plus, 1.0 - plus]);
            }
            (probs, single_qubit_three_axis_fi(a, n)?, 1, false)
        }
    };
    Ok(ProtocolResult { probabilities, fi, v_st, fi_per_two_vst: fi * 2.0 / v_st as f64, offset_applied: offset })
}

/// Separable qubit–antiqubit FI averaged over field along x̂, ŷ and ẑ.
pub fn separable_axis_average_fi(alpha: f64) -> Result<f64> {
    let mut total = 0.0;
    for n in [Axis::X, Axis::Y, Axis::Z] {
        total += run_ideal(&ProtocolSpec { kind: ProtocolKind::SeparableAntimatter, axis: n, alpha })?.fi;
    }
    Ok(total / 3.0)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TableRow {
    pub protocol: String,
    pub fi: f64,
    pub v_st: u32,
    pub fi_per_two_vst: f64,
}

/// FI per two units of v_st for each strategy, evaluated at `alpha` about
/// `axis` (the separable row averages x̂, ŷ, ẑ; the effective row is the
/// sphere-averaged nuisance-limited QFI).
pub fn comparison_table(alpha: f64, axis: &Axis) -> Result<Vec<TableRow>> {
    let row = |name: &str, r: ProtocolResult| TableRow { protocol: name.into(), fi: r.fi, v_st: r.v_st, fi_per_two_vst: r.fi_per_two_vst };
    let run = |kind| run_ideal(&ProtocolSpec { kind, axis: *axis, alpha });
    let sep = separable_axis_average_fi(alpha)?;
    let eff = sphere_average_effective_qfi()?.effective_qfi_closed;
    Ok(vec![
        row("positronium", run(ProtocolKind::Positronium)?),
        row("single_qubit_three_axis", run(ProtocolKind::SingleQubitThreeAxis)?),
        row("agnostic", run(ProtocolKind::Agnostic)?),
        TableRow { protocol: "separable_antimatter_axis_average".into(), fi: sep, v_st: 2, fi_per_two_vst: sep },
        TableRow { protocol: "separable_antimatter_effective".into(), fi: eff, v_st: 2, fi_per_two_vst: eff },
    ])
}
