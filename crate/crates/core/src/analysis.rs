//! Crossover search and cross-model deviation reports.

use std::fmt;

use crate::error::{Result, TunnelError};
use crate::models::ModelKind;
use crate::oracle::{integrate_transmission, IntegratorConfig};
use crate::physics::{BarrierSpec, IncidenceSpec, ParticleSpec};
use crate::sweep::{compute_point, EnergyGrid};
use crate::transfer::PotentialProfile;

fn difference(
    a: ModelKind,
    b: ModelKind,
    energy: f64,
    theta1: f64,
    barrier: &BarrierSpec,
    particle: ParticleSpec,
) -> Result<f64> {
    let inc = IncidenceSpec::new(energy, theta1, particle)?;
    let ta = compute_point(a, &inc, barrier)?.transmission;
    let tb = compute_point(b, &inc, barrier)?.transmission;
    Ok(ta - tb)
}

/// Moves `bad` toward `good` until it is the last energy at which both
/// models are in regime. Every model's domain is one-sided in `E`, so the
/// valid set is an interval.
fn pull_into_regime(
    eval: &dyn Fn(f64) -> Result<f64>,
    good: f64,
    mut bad: f64,
) -> Result<(f64, f64)> {
    let mut good = (good, eval(good)?);
    loop {
        let mid = 0.5 * (good.0 + bad);
        if mid == good.0 || mid == bad {
            return Ok(good);
        }
        match eval(mid) {
            Ok(v) => good = (mid, v),
            Err(TunnelError::Regime { .. }) => bad = mid,
            Err(e) => return Err(e),
        }
    }
}

/// Energy in `bracket` where `T_a = T_b`, by bisection on `T_a − T_b`.
///
/// Bisection runs until the bracket cannot be split in floating point.
/// A bracket end outside either model's regime is pulled in to the edge of
/// the common domain first. No strict sign change gives `NoCrossover`.
pub fn find_crossover(
    model_a: ModelKind,
    model_b: ModelKind,
    theta1: f64,
    barrier: &BarrierSpec,
    particle: ParticleSpec,
    bracket: (f64, f64),
) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
        return Err(TunnelError::domain(format!(
            "bracket must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    let eval = |e: f64| difference(model_a, model_b, e, theta1, barrier, particle);
    let (mut lo, mut f_lo, mut hi, mut f_hi) = match (eval(lo), eval(hi)) {
        (Ok(fl), Ok(fh)) => (lo, fl, hi, fh),
        (Ok(_), Err(TunnelError::Regime { .. })) => {
            let (h, fh) = pull_into_regime(&eval, lo, hi)?;
            (lo, eval(lo)?, h, fh)
        }
        (Err(TunnelError::Regime { .. }), Ok(_)) => {
            let (l, fl) = pull_into_regime(&eval, hi, lo)?;
            (l, fl, hi, eval(hi)?)
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    // strict: a difference that merely touches zero is not a crossing
    if f_lo == 0.0 || f_hi == 0.0 || f_lo.signum() == f_hi.signum() {
        return Err(TunnelError::NoCrossover(format!(
            "{model_a} − {model_b} does not change sign on [{lo}, {hi}] eV"
        )));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi });
        }
        let f_mid = eval(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
}

/// A transmission source in a validation report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Model(ModelKind),
    OdeOracle,
}

impl Source {
    pub fn name(&self) -> &'static str {
        match self {
            Source::Model(m) => m.name(),
            Source::OdeOracle => "ode_oracle",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Order of the report. Approximate models first, then the exact solvers,
/// so each pair's reference (the second member) is the more exact one.
pub const VALIDATION_SOURCES: [Source; 8] = [
    Source::Model(ModelKind::UsualThick),
    Source::Model(ModelKind::AngularPaperLiteral),
    Source::Model(ModelKind::AngularPaperBeta),
    Source::Model(ModelKind::AngularConsistentThick),
    Source::Model(ModelKind::StepRegime),
    Source::Model(ModelKind::ExactClosedForm),
    Source::Model(ModelKind::TransferMatrix),
    Source::OdeOracle,
];

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationGrid {
    pub energies: EnergyGrid,
    /// Degrees.
    pub angles: Vec<f64>,
    pub integrator: IntegratorConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDeviation {
    pub a: Source,
    pub b: Source,
    /// Grid points where both sources are defined.
    pub samples: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    /// Points entering the relative statistics; those with `T_b = 0 ≠ T_a`
    /// are left out.
    pub rel_samples: usize,
    /// Relative to `b`: `|T_a − T_b| / |T_b|`, taken as 0 when both vanish.
    pub max_rel: f64,
    pub mean_rel: f64,
    /// (eV, degrees) of the largest relative deviation.
    pub max_rel_at: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnityExcess {
    pub source: Source,
    pub energy: f64,
    pub angle: f64,
    pub transmission: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub pairs: Vec<PairDeviation>,
    pub exceeds_unity: Vec<UnityExcess>,
    pub points: usize,
}

impl ValidationReport {
    pub fn pair(&self, a: Source, b: Source) -> Option<&PairDeviation> {
        self.pairs
            .iter()
            .find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
    }
}

fn evaluate(
    source: Source,
    inc: &IncidenceSpec,
    barrier: &BarrierSpec,
    profile: &PotentialProfile,
    integrator: &IntegratorConfig,
) -> Result<Option<f64>> {
    match source {
        Source::Model(m) => match compute_point(m, inc, barrier) {
            Ok(r) => Ok(Some(r.transmission)),
            Err(TunnelError::Regime { .. }) => Ok(None),
            Err(e) => Err(e),
        },
        Source::OdeOracle => {
            integrate_transmission(profile, inc, integrator).map(|o| Some(o.transmission))
        }
    }
}

/// Compares every pair of [`VALIDATION_SOURCES`] over the grid and lists
/// the points where an approximate model exceeds one.
pub fn validate_models(
    barrier: &BarrierSpec,
    particle: ParticleSpec,
    grid: &ValidationGrid,
) -> Result<ValidationReport> {
    use rayon::prelude::*;

    let profile = PotentialProfile::single_barrier(barrier);
    let energies = grid.energies.energies();
    let points: Vec<(f64, f64)> = grid
        .angles
        .iter()
        .flat_map(|&a| energies.iter().map(move |&e| (e, a)))
        .collect();
    let table: Vec<Vec<Option<f64>>> = points
        .par_iter()
        .map(|&(e, a)| {
            let inc = IncidenceSpec::from_degrees(e, a, particle)?;
            VALIDATION_SOURCES
                .iter()
                .map(|&s| evaluate(s, &inc, barrier, &profile, &grid.integrator))
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut pairs = Vec::new();
    for i in 0..VALIDATION_SOURCES.len() {
        for j in i + 1..VALIDATION_SOURCES.len() {
            let mut dev = PairDeviation {
                a: VALIDATION_SOURCES[i],
                b: VALIDATION_SOURCES[j],
                samples: 0,
                rel_samples: 0,
                max_abs: 0.0,
                mean_abs: 0.0,
                max_rel: 0.0,
                mean_rel: 0.0,
                max_rel_at: None,
            };
            for (row, &(e, a)) in table.iter().zip(&points) {
                let (Some(ta), Some(tb)) = (row[i], row[j]) else {
                    continue;
                };
                let abs = (ta - tb).abs();
                dev.samples += 1;
                dev.mean_abs += abs;
                dev.max_abs = dev.max_abs.max(abs);
                let rel = if abs == 0.0 {
                    0.0
                } else if tb == 0.0 {
                    continue;
                } else {
                    abs / tb.abs()
                };
                dev.rel_samples += 1;
                dev.mean_rel += rel;
                if dev.max_rel_at.is_none() || rel > dev.max_rel {
                    dev.max_rel = rel;
                    dev.max_rel_at = Some((e, a));
                }
            }
            if dev.samples > 0 {
                dev.mean_abs /= dev.samples as f64;
            }
            if dev.rel_samples > 0 {
                dev.mean_rel /= dev.rel_samples as f64;
            }
            pairs.push(dev);
        }
    }

    let mut exceeds_unity = Vec::new();
    for (row, &(energy, angle)) in table.iter().zip(&points) {
        for (value, &source) in row.iter().zip(&VALIDATION_SOURCES) {
            let is_approx = matches!(source, Source::Model(m) if m.is_approximate());
            if let (true, Some(t)) = (is_approx, *value) {
                if t > 1.0 {
                    exceeds_unity.push(UnityExcess {
                        source,
                        energy,
                        angle,
                        transmission: t,
                    });
                }
            }
        }
    }

    Ok(ValidationReport {
        pairs,
        exceeds_unity,
        points: points.len(),
    })
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<26} {:<26} {:>5} {:>11} {:>11} {:>5} {:>11} {:>11}  max_rel_at",
            "model_a", "model_b", "n", "max_abs", "mean_abs", "n_rel", "max_rel", "mean_rel"
        )?;
        for p in &self.pairs {
            let at = match p.max_rel_at {
                Some((e, a)) => format!("{e:.4} eV, {a} deg"),
                None => "-".into(),
            };
            writeln!(
                f,
                "{:<26} {:<26} {:>5} {:>11.4e} {:>11.4e} {:>5} {:>11.4e} {:>11.4e}  {at}",
                p.a.name(),
                p.b.name(),
                p.samples,
                p.max_abs,
                p.mean_abs,
                p.rel_samples,
                p.max_rel,
                p.mean_rel
            )?;
        }
        if self.exceeds_unity.is_empty() {
            writeln!(
                f,
                "no approximate model exceeds 1 on the grid ({} points)",
                self.points
            )?;
        } else {
            writeln!(f, "approximate models above 1:")?;
            for x in &self.exceeds_unity {
                writeln!(
                    f,
                    "  {} at {:.4} eV, {} deg: {:.6e}",
                    x.source, x.energy, x.angle, x.transmission
                )?;
            }
        }
        Ok(())
    }
}
