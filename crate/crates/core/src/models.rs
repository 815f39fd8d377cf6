//! Closed-form transmission models for a single rectangular barrier.
//!
//! | model | defined for | reflection reported |
//! |---|---|---|
//! | [`ModelKind::UsualThick`] | `0 < E < V`, angle ignored | no |
//! | [`ModelKind::AngularPaperLiteral`] | `0 < E < V`, `0 ≤ θ₁ ≤ π/2` | no |
//! | [`ModelKind::AngularPaperBeta`] | `0 < E < V`, `0 ≤ θ₁ ≤ π/2` (limit at π/2) | no |
//! | [`ModelKind::AngularConsistentThick`] | `E·cos²θ₁ < V` | no |
//! | [`ModelKind::ExactClosedForm`] | `E > 0`, every regime | yes |
//! | [`ModelKind::StepRegime`] | propagating interior only | default form only |
//! | [`ModelKind::TransferMatrix`] | `E > 0`, every regime | yes |
//!
//! The thick-barrier models are returned unclamped; a value above one carries
//! [`Warning::ExceedsUnity`].

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TunnelError};
use crate::physics::{
    angle_trig, classify_regime, kinematics, wavenumber_sq, BarrierSpec, IncidenceSpec, Kinematics,
    ParticleSpec, RegimeKind,
};

// Excess over one smaller than this is rounding, not approximation breakdown.
const UNITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `16(E/V)(1 − E/V)e^{−2Ka}`.
    UsualThick,
    /// The angular formula taken term for term, coefficient 8 on the `sin²2θ₁` term.
    AngularPaperLiteral,
    /// `16β²/(β² + 1)² e^{−2Ka}` with `β` from [`crate::physics::beta_paper`].
    AngularPaperBeta,
    /// Thick-barrier limit of the exact result with conserved parallel momentum.
    AngularConsistentThick,
    ExactClosedForm,
    /// Amplitude formula for the above-barrier regime.
    StepRegime,
    /// The barrier solved as a one-segment profile by [`crate::transfer::solve_profile`].
    TransferMatrix,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::UsualThick,
        ModelKind::AngularPaperLiteral,
        ModelKind::AngularPaperBeta,
        ModelKind::AngularConsistentThick,
        ModelKind::ExactClosedForm,
        ModelKind::StepRegime,
        ModelKind::TransferMatrix,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::UsualThick => "usual_thick",
            ModelKind::AngularPaperLiteral => "angular_paper_literal",
            ModelKind::AngularPaperBeta => "angular_paper_beta",
            ModelKind::AngularConsistentThick => "angular_consistent_thick",
            ModelKind::ExactClosedForm => "exact_closed_form",
            ModelKind::StepRegime => "step_regime",
            ModelKind::TransferMatrix => "transfer_matrix",
        }
    }

    pub fn is_approximate(&self) -> bool {
        !matches!(
            self,
            ModelKind::ExactClosedForm | ModelKind::StepRegime | ModelKind::TransferMatrix
        )
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = TunnelError;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ModelKind::ALL.iter().map(|m| m.name()).collect();
                TunnelError::Config(format!(
                    "unknown model `{s}` (expected one of {})",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Warning {
    /// An approximate model returned a probability above one.
    ExceedsUnity,
    /// Growth factors overflowed; transmission reported as zero.
    Overflow,
}

impl Warning {
    pub fn tag(&self) -> &'static str {
        match self {
            Warning::ExceedsUnity => "exceeds_unity",
            Warning::Overflow => "overflow",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionResult {
    pub model: ModelKind,
    pub transmission: f64,
    /// Present only for models that conserve flux.
    pub reflection: Option<f64>,
    /// Transmitted amplitude relative to a unit incident wave, both referred to
    /// `e^{ik⊥x}` in the global coordinate with the barrier starting at `x = 0`.
    pub amplitude: Option<Complex64>,
    pub regime: RegimeKind,
    pub warnings: Vec<Warning>,
}

impl TransmissionResult {
    fn approximate(model: ModelKind, transmission: f64, regime: RegimeKind) -> Self {
        let mut warnings = Vec::new();
        if transmission > 1.0 + UNITY_SLACK {
            warnings.push(Warning::ExceedsUnity);
        }
        TransmissionResult {
            model,
            transmission,
            reflection: None,
            amplitude: None,
            regime,
            warnings,
        }
    }
}

/// `Z₁ = e^{ik₁a cos θ₁}` and `Z₂ = e^{ik₂a cos θ₂}`, the phases accumulated
/// across the barrier outside and inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFactors {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl PhaseFactors {
    pub fn new(kin: &Kinematics, width: f64) -> Self {
        let i = Complex64::i();
        PhaseFactors {
            z1: (i * kin.k_perp * width).exp(),
            z2: (i * kin.q * width).exp(),
        }
    }
}

fn require_below_barrier(model: ModelKind, energy: f64, height: f64) -> Result<()> {
    if energy < height {
        Ok(())
    } else {
        Err(TunnelError::Regime {
            model: model.name(),
            requirement: "0 < E < V",
        })
    }
}

// e^{−2Ka}
fn thick_attenuation(energy: f64, barrier: &BarrierSpec, mass: f64) -> f64 {
    let decay = wavenumber_sq(barrier.height() - energy, mass).sqrt();
    (-2.0 * decay * barrier.width()).exp()
}

pub fn usual_thick_transmission(
    energy: f64,
    barrier: &BarrierSpec,
    particle: ParticleSpec,
) -> Result<TransmissionResult> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(TunnelError::domain(format!(
            "energy must be positive, got {energy}"
        )));
    }
    require_below_barrier(ModelKind::UsualThick, energy, barrier.height())?;
    let height = barrier.height();
    // (E/V)(1 − E/V) without the cancellation in 1 − E/V near the top
    let prefactor = 16.0 * energy * (height - energy) / (height * height);
    let t = prefactor * thick_attenuation(energy, barrier, particle.mass());
    Ok(TransmissionResult::approximate(
        ModelKind::UsualThick,
        t,
        classify_regime(energy, 0.0, barrier.height()),
    ))
}

/// `𝕴 − 𝕴 sin²θ₁ + (8/V²)(V − E)² sin²(2θ₁) e^{−2Ka}`, term for term.
pub fn angular_paper_literal_transmission(
    incidence: &IncidenceSpec,
    barrier: &BarrierSpec,
) -> Result<TransmissionResult> {
    let (energy, height) = (incidence.energy(), barrier.height());
    require_below_barrier(ModelKind::AngularPaperLiteral, energy, height)?;
    let regime = classify_regime(energy, incidence.theta1(), height);
    if incidence.is_grazing() {
        return Ok(TransmissionResult::approximate(
            ModelKind::AngularPaperLiteral,
            0.0,
            regime,
        ));
    }
    let usual = usual_thick_transmission(energy, barrier, incidence.particle())?.transmission;
    let theta = incidence.theta1();
    let s2 = theta.sin().powi(2);
    let s2_double = (2.0 * theta).sin().powi(2);
    let attenuation = thick_attenuation(energy, barrier, incidence.mass());
    let t = usual - usual * s2
        + 8.0 / (height * height) * (height - energy).powi(2) * s2_double * attenuation;
    Ok(TransmissionResult::approximate(
        ModelKind::AngularPaperLiteral,
        t,
        regime,
    ))
}

/// `16β²/(β² + 1)² e^{−2Ka}`; zero at grazing incidence where `β → ∞`.
pub fn angular_paper_beta_transmission(
    incidence: &IncidenceSpec,
    barrier: &BarrierSpec,
) -> Result<TransmissionResult> {
    let (energy, height) = (incidence.energy(), barrier.height());
    require_below_barrier(ModelKind::AngularPaperBeta, energy, height)?;
    let regime = classify_regime(energy, incidence.theta1(), height);
    if incidence.is_grazing() {
        return Ok(TransmissionResult::approximate(
            ModelKind::AngularPaperBeta,
            0.0,
            regime,
        ));
    }
    let eta = crate::physics::eta(energy, height)?;
    let beta2 = crate::physics::beta_paper(eta, incidence.theta1())?.powi(2);
    let prefactor = 16.0 * beta2 / (beta2 + 1.0).powi(2);
    let t = prefactor * thick_attenuation(energy, barrier, incidence.mass());
    Ok(TransmissionResult::approximate(
        ModelKind::AngularPaperBeta,
        t,
        regime,
    ))
}

/// `16·E cos²θ₁ (V − E cos²θ₁)/V² · e^{−2κa}` with `κ = kappa_eff`.
pub fn angular_consistent_thick_transmission(
    incidence: &IncidenceSpec,
    barrier: &BarrierSpec,
) -> Result<TransmissionResult> {
    let (energy, height) = (incidence.energy(), barrier.height());
    let (c, s) = angle_trig(incidence.theta1());
    let perp_energy = energy * c * c;
    if perp_energy >= height {
        return Err(TunnelError::Regime {
            model: ModelKind::AngularConsistentThick.name(),
            requirement: "E·cos²θ₁ < V",
        });
    }
    let deficit = (height - energy) + energy * s * s;
    let kappa = wavenumber_sq(deficit, incidence.mass()).sqrt();
    let t =
        16.0 * perp_energy * deficit / (height * height) * (-2.0 * kappa * barrier.width()).exp();
    Ok(TransmissionResult::approximate(
        ModelKind::AngularConsistentThick,
        t,
        classify_regime(energy, incidence.theta1(), height),
    ))
}

/// `(cos(qa), sin(qa)/q)` for real `q² = s`, continued analytically through
/// `s = 0` and into `s < 0` (where they become `cosh`, `sinh/κ`).
pub(crate) fn slab_cos_sinc(s: f64, width: f64, regime: RegimeKind) -> (f64, f64) {
    match regime {
        RegimeKind::PropagatingInterior if s > 0.0 => {
            let q = s.sqrt();
            ((q * width).cos(), (q * width).sin() / q)
        }
        RegimeKind::EvanescentInterior if s < 0.0 => {
            let kappa = (-s).sqrt();
            ((kappa * width).cosh(), (kappa * width).sinh() / kappa)
        }
        _ => {
            // cos(x) = Σ (−x²)ⁿ/(2n)!, sin(x)/x = Σ (−x²)ⁿ/(2n+1)!
            let neg_x2 = -s * width * width;
            let (mut c_term, mut s_term) = (1.0, 1.0);
            let (mut c_sum, mut s_sum) = (1.0, 1.0);
            for n in 1..40 {
                let n = n as f64;
                c_term *= neg_x2 / ((2.0 * n - 1.0) * (2.0 * n));
                s_term *= neg_x2 / ((2.0 * n) * (2.0 * n + 1.0));
                c_sum += c_term;
                s_sum += s_term;
                if c_term.abs() < 1e-18 * c_sum.abs() && s_term.abs() < 1e-18 * s_sum.abs() {
                    break;
                }
            }
            (c_sum, s_sum * width)
        }
    }
}

/// Transmission and global-convention amplitude through one slab of width
/// `width`, given the outside perpendicular wavenumber squared `k_sq > 0` and the
/// inside one `s` (negative when evanescent).
///
/// `T = 1/(1 + (k² − s)²/(4k²) · (sin(qa)/q)²)`; `width = 0` gives `T = 1`.
pub(crate) fn slab_transmission(
    k_sq: f64,
    s: f64,
    width: f64,
    regime: RegimeKind,
) -> (f64, Complex64) {
    let (cos_qa, sinc) = slab_cos_sinc(s, width, regime);
    let mismatch = (k_sq - s) / (2.0 * k_sq.sqrt());
    let t = 1.0 / (1.0 + (mismatch * sinc).powi(2));

    let k = k_sq.sqrt();
    let denom = Complex64::new(cos_qa, -(k_sq + s) / (2.0 * k) * sinc);
    let amplitude = if denom.re.is_finite() && denom.im.is_finite() {
        (-Complex64::i() * k * width).exp() / denom
    } else {
        Complex64::new(0.0, 0.0)
    };
    (t, amplitude)
}

/// Exact single-barrier transmission with conserved parallel momentum. Valid
/// in every regime; `T = 0` at grazing incidence.
pub fn exact_barrier_transmission(
    incidence: &IncidenceSpec,
    barrier: &BarrierSpec,
) -> TransmissionResult {
    let (energy, height) = (incidence.energy(), barrier.height());
    let regime = classify_regime(energy, incidence.theta1(), height);
    if incidence.is_grazing() {
        return TransmissionResult {
            model: ModelKind::ExactClosedForm,
            transmission: 0.0,
            reflection: Some(1.0),
            amplitude: Some(Complex64::new(0.0, 0.0)),
            regime,
            warnings: Vec::new(),
        };
    }
    let mass = incidence.mass();
    let (c, s) = angle_trig(incidence.theta1());
    let k_sq = wavenumber_sq(energy * c * c, mass);
    let q_sq = -wavenumber_sq((height - energy) + energy * s * s, mass);
    let (t, amplitude) = slab_transmission(k_sq, q_sq, barrier.width(), regime);
    TransmissionResult {
        model: ModelKind::ExactClosedForm,
        transmission: t,
        reflection: Some(1.0 - t),
        amplitude: Some(amplitude),
        regime,
        warnings: Vec::new(),
    }
}

/// Above-barrier amplitude `T = 4N Z₂/Z₁ · 1/(N + 1)² · 1/[1 − ((N − 1)/(N + 1))² Z₂²]`.
///
/// With `literal` set, the literal variant is evaluated instead: the `Z₂²`
/// factor is moved out of the bracket into an overall `e^{2ik₂a}` and the
/// total wavenumbers `k₁`, `k₂` appear in the exponents. That variant is not
/// flux-conserving and reports no reflection.
pub fn step_regime_transmission(
    incidence: &IncidenceSpec,
    barrier: &BarrierSpec,
    literal: bool,
) -> Result<TransmissionResult> {
    let kin = kinematics(incidence, barrier);
    let n_eff = match (kin.regime, kin.effective_index) {
        (RegimeKind::PropagatingInterior, Some(n)) => n,
        _ => {
            return Err(TunnelError::Regime {
                model: ModelKind::StepRegime.name(),
                requirement: "E·cos²θ₁ > V (propagating interior)",
            })
        }
    };
    let a = barrier.width();
    let one = Complex64::new(1.0, 0.0);
    let ratio = ((n_eff - one) / (n_eff + one)).powi(2);
    let lead = 4.0 * n_eff / (n_eff + one).powi(2);

    if literal {
        let i = Complex64::i();
        let phase = (i * (kin.k2 - kin.k1) * a).exp();
        let amplitude = lead * phase / ((one - ratio) * (2.0 * i * kin.k2 * a).exp());
        let t = amplitude.norm_sqr();
        let mut result = TransmissionResult::approximate(ModelKind::StepRegime, t, kin.regime);
        result.amplitude = Some(amplitude);
        return Ok(result);
    }

    let z = PhaseFactors::new(&kin, a);
    let amplitude = lead * z.z2 / z.z1 / (one - ratio * z.z2 * z.z2);
    let t = amplitude.norm_sqr();
    Ok(TransmissionResult {
        model: ModelKind::StepRegime,
        transmission: t,
        reflection: Some(1.0 - t),
        amplitude: Some(amplitude),
        regime: kin.regime,
        warnings: Vec::new(),
    })
}

/// `A/E` from the amplitude system, `(1/4N)(Z₁/Z₂)(1 + N)²[1 − ((N − 1)/(N + 1))² Z₂²]`.
/// `None` when `N` is undefined (critical interior).
pub fn incident_to_transmitted_ratio(kin: &Kinematics, width: f64) -> Option<Complex64> {
    let n = kin.effective_index?;
    let z = PhaseFactors::new(kin, width);
    let one = Complex64::new(1.0, 0.0);
    let ratio = ((n - one) / (n + one)).powi(2);
    Some(z.z1 / z.z2 * (one + n).powi(2) / (4.0 * n) * (one - ratio * z.z2 * z.z2))
}
