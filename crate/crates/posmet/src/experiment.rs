//! The end-to-end pipeline: simulate shots on an α grid, correct readout,
//! fit the fringe and extract the FI, per axis.

use std::f64::consts::PI;

use posmet_core::estimation::{bootstrap_fi_resample, combine_axis_uncertainty, extract_fi, fit_fringe, summarize, FiEstimate, FringeFit, FringePoint};
use posmet_core::hardware::{correct_frequencies, NoiseModel, ShotPlan};
use posmet_core::protocols::{ProtocolKind, ProtocolSpec};
use posmet_core::Axis;
use serde::{Deserialize, Serialize};

use crate::error::AppError;
use crate::sim::{derive_seed, simulate_parallel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentProtocol {
    Positronium,
    Separable,
}

impl ExperimentProtocol {
    pub fn kind(self) -> ProtocolKind {
        match self {
            ExperimentProtocol::Positronium => ProtocolKind::Positronium,
            ExperimentProtocol::Separable => ProtocolKind::SeparableAntimatter,
        }
    }

    /// Fringe multiplier of each recorded series and its name.
    fn series(self) -> &'static [(&'static str, u32)] {
        match self {
            ExperimentProtocol::Positronium => &[("singlet", 2)],
            ExperimentProtocol::Separable => &[("qubit_x", 1), ("antiqubit_z", 1)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedAxis {
    pub name: String,
    pub axis: Axis,
}

impl NamedAxis {
    pub fn xyz() -> Vec<NamedAxis> {
        vec![
            NamedAxis { name: "x".into(), axis: Axis::X },
            NamedAxis { name: "y".into(), axis: Axis::Y },
            NamedAxis { name: "z".into(), axis: Axis::Z },
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub protocol: ExperimentProtocol,
    pub alpha_points: usize,
    pub shots: u64,
    pub seed: u64,
    pub noise: NoiseModel,
    pub readout_correction: bool,
    pub threads: usize,
    /// Resamples per series; 0 disables the bootstrap.
    pub bootstrap: u64,
    pub axes: Vec<NamedAxis>,
    /// Largest α a single pulse can apply.
    pub max_alpha: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub measurement: String,
    pub fit: FringeFit,
    /// Absent when the fringe is flat and carries no information.
    pub estimate: Option<FiEstimate>,
    pub bootstrap_std: Option<f64>,
    pub data: Vec<FringePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisReport {
    pub axis: String,
    pub n: [f64; 3],
    pub fi: f64,
    pub delta: f64,
    pub bootstrap_std: Option<f64>,
    /// Largest rms fit residual among the axis's series.
    pub rms_residual: f64,
    /// Points where readout correction had to clip.
    pub clipped_points: usize,
    pub series: Vec<SeriesReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub protocol: ExperimentProtocol,
    pub alpha_points: usize,
    pub shots_per_point: u64,
    pub seed: u64,
    pub readout_correction: bool,
    pub noise: NoiseModel,
    pub axes: Vec<AxisReport>,
    pub mean_fi: f64,
    /// (1/3)√Σδ² for three axes; the same quadratic mean scaled by 1/N
    /// otherwise.
    pub delta: f64,
}

/// n evenly spaced points on [0, 2π].
pub fn alpha_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / (n - 1) as f64).collect()
}

pub fn run(s: &Settings) -> Result<ExperimentReport, AppError> {
    if s.alpha_points < 6 {
        return Err(AppError::Config("alpha_points must be at least 6".into()));
    }
    if s.shots == 0 {
        return Err(AppError::Config("shots must be at least 1".into()));
    }
    if s.axes.is_empty() {
        return Err(AppError::Config("no axes requested".into()));
    }
    if let Some(m) = s.max_alpha {
        if 2.0 * PI > m + 1e-9 {
            return Err(AppError::Config(format!("alpha grid reaches 2π but one pulse reaches only {m:.4} rad")));
        }
    }
    let grid = alpha_grid(s.alpha_points);
    let series = s.protocol.series();
    let mut axes = Vec::new();
    for (ai, na) in s.axes.iter().enumerate() {
        let mut data: Vec<Vec<FringePoint>> = vec![Vec::new(); series.len()];
        let mut clipped_points = 0;
        for (i, &alpha) in grid.iter().enumerate() {
            let spec = ProtocolSpec { kind: s.protocol.kind(), axis: na.axis, alpha };
            let plan = ShotPlan::new(&spec, &s.noise).map_err(AppError::numerical(format!("simulation (axis {})", na.name)))?;
            let seed = derive_seed(s.seed, ((ai as u64) << 32) | i as u64);
            let rec = simulate_parallel(&plan, s.shots, seed, s.threads);
            let mut p = rec.frequencies();
            if s.readout_correction {
                let c = correct_frequencies(p, &s.noise.readout_qubit, &s.noise.readout_antiqubit)
                    .map_err(AppError::numerical(format!("readout correction (axis {})", na.name)))?;
                clipped_points += c.clipped as usize;
                p = c.probs;
            }
            let values: Vec<f64> = match s.protocol {
                ExperimentProtocol::Positronium => vec![p[1]],
                ExperimentProtocol::Separable => vec![p[0] + p[1], p[0] + p[2]],
            };
            for (d, v) in data.iter_mut().zip(values) {
                d.push(FringePoint { alpha, frequency: v.clamp(0.0, 1.0), shots: s.shots });
            }
        }

        let mut reports = Vec::new();
        let (mut fi, mut var, mut boot_var, mut rms) = (0.0, 0.0, 0.0, 0.0f64);
        for (si, ((name, k), d)) in series.iter().zip(data).enumerate() {
            let stage = format!("fit (axis {}, {name})", na.name);
            let fit = fit_fringe(&d, *k).map_err(AppError::numerical(stage.clone()))?;
            let estimate = if fit.degenerate_phase { None } else { Some(extract_fi(&fit).map_err(AppError::numerical(stage.replace("fit", "extraction")))?) };
            let bootstrap_std = if s.bootstrap > 0 && estimate.is_some() {
                let bseed = derive_seed(derive_seed(s.seed, u64::MAX), ((ai as u64) << 32) | si as u64);
                let vals: Vec<f64> = (0..s.bootstrap).filter_map(|r| bootstrap_fi_resample(&d, *k, bseed, r).ok()).collect();
                Some(summarize(&vals).map_err(AppError::numerical(format!("bootstrap (axis {}, {name})", na.name)))?.std)
            } else {
                None
            };
            if let Some(e) = &estimate {
                fi += e.fi;
                var += e.delta * e.delta;
            }
            boot_var += bootstrap_std.unwrap_or(0.0).powi(2);
            rms = rms.max(fit.rms_residual);
            reports.push(SeriesReport { measurement: name.to_string(), fit, estimate, bootstrap_std, data: d });
        }
        axes.push(AxisReport {
            axis: na.name.clone(),
            n: na.axis.to_array(),
            fi,
            delta: var.sqrt(),
            bootstrap_std: (s.bootstrap > 0).then(|| boot_var.sqrt()),
            rms_residual: rms,
            clipped_points,
            series: reports,
        });
    }
    let n = axes.len() as f64;
    let mean_fi = axes.iter().map(|a| a.fi).sum::<f64>() / n;
    let delta = if axes.len() == 3 {
        combine_axis_uncertainty(axes[0].delta, axes[1].delta, axes[2].delta).map_err(AppError::numerical("uncertainty combination"))?
    } else {
        axes.iter().map(|a| a.delta * a.delta).sum::<f64>().sqrt() / n
    };
    Ok(ExperimentReport {
        protocol: s.protocol,
        alpha_points: s.alpha_points,
        shots_per_point: s.shots,
        seed: s.seed,
        readout_correction: s.readout_correction,
        noise: s.noise.clone(),
        axes,
        mean_fi,
        delta,
    })
}
