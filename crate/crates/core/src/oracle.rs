//! Brute-force transmission by direct integration of the perpendicular
//! Schrödinger equation, `ψ'' = −k⊥²(x) ψ`.
//!
//! The integration starts on the transmitted side with a pure outgoing wave and
//! runs backward to the incidence side, where the solution is split into
//! incident and reflected plane waves. Each constant-potential piece gets its
//! own uniform sub-grid so that potential steps fall on grid nodes; the step is
//! the largest one not exceeding [`IntegratorConfig::step`].

use num_complex::Complex64;

use crate::error::{Result, TunnelError};
use crate::physics::{angle_trig, wavenumber_sq, IncidenceSpec};
use crate::transfer::{PotentialProfile, OVERFLOW_EXPONENT};

const GROWTH_LIMIT: f64 = 1e250;
const RESOLUTION_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationMethod {
    /// Classical fixed-step fourth-order Runge–Kutta.
    RungeKutta4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// nm
    pub step: f64,
    /// Flat zero-potential padding on each side of the profile, nm.
    pub pad: f64,
    pub method: IntegrationMethod,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            step: 1e-4,
            pad: 0.5,
            method: IntegrationMethod::RungeKutta4,
        }
    }
}

impl IntegratorConfig {
    pub fn with_step(step: f64) -> Self {
        IntegratorConfig {
            step,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleTransmission {
    pub transmission: f64,
    /// Growth through an evanescent region exceeded the representable range;
    /// `transmission` is then reported as 0.
    pub overflowed: bool,
}

type State = (Complex64, Complex64);

fn rk4_step((psi, dpsi): State, k_sq: f64, h: f64) -> State {
    let f = |p: Complex64, d: Complex64| (d, -k_sq * p);
    let (a1, b1) = f(psi, dpsi);
    let (a2, b2) = f(psi + 0.5 * h * a1, dpsi + 0.5 * h * b1);
    let (a3, b3) = f(psi + 0.5 * h * a2, dpsi + 0.5 * h * b2);
    let (a4, b4) = f(psi + h * a3, dpsi + h * b3);
    (
        psi + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        dpsi + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
    )
}

/// Integrates across `length` nm of constant `k_sq`, moving in −x.
fn integrate_piece(mut y: State, k_sq: f64, length: f64, step: f64) -> Option<State> {
    if length <= 0.0 {
        return Some(y);
    }
    let n = (length / step).ceil().max(1.0) as usize;
    let h = -length / n as f64;
    for _ in 0..n {
        y = rk4_step(y, k_sq, h);
        if y.0.norm().is_nan() || y.0.norm() >= GROWTH_LIMIT {
            return None;
        }
    }
    Some(y)
}

pub fn integrate_transmission(
    profile: &PotentialProfile,
    incidence: &IncidenceSpec,
    config: &IntegratorConfig,
) -> Result<OracleTransmission> {
    if !(config.step.is_finite() && config.step > 0.0) {
        return Err(TunnelError::Config(format!(
            "integrator step must be positive, got {}",
            config.step
        )));
    }
    if !(config.pad.is_finite() && config.pad >= 0.0) {
        return Err(TunnelError::Config(format!(
            "integrator padding must be non-negative, got {}",
            config.pad
        )));
    }
    if incidence.is_grazing() {
        return Ok(OracleTransmission {
            transmission: 0.0,
            overflowed: false,
        });
    }

    let mass = incidence.mass();
    let (c, _) = angle_trig(incidence.theta1());
    let perp_energy = incidence.energy() * c * c;
    let outer_sq = wavenumber_sq(perp_energy, mass);
    let pieces: Vec<(f64, f64)> = profile
        .segments()
        .iter()
        .map(|s| (wavenumber_sq(perp_energy - s.potential, mass), s.width))
        .collect();

    let max_k = pieces
        .iter()
        .map(|(k_sq, _)| k_sq.abs().sqrt())
        .fold(outer_sq.sqrt(), f64::max);
    if config.step * max_k >= RESOLUTION_LIMIT {
        return Err(TunnelError::Config(format!(
            "step {} nm under-resolves |k| = {max_k:.4} nm⁻¹ (need step·|k| < {RESOLUTION_LIMIT})",
            config.step
        )));
    }
    let overflow = OracleTransmission {
        transmission: 0.0,
        overflowed: true,
    };
    if pieces
        .iter()
        .any(|&(k_sq, w)| k_sq < 0.0 && (-k_sq).sqrt() * w > OVERFLOW_EXPONENT)
    {
        return Ok(overflow);
    }

    let k0 = Complex64::new(outer_sq.sqrt(), 0.0);
    let ik0 = Complex64::i() * k0;
    // ψ = e^{ik₀(x − x_R)} on the transmitted side; only |A| is needed.
    let mut y: State = (Complex64::new(1.0, 0.0), ik0);
    let walk = std::iter::once((outer_sq, config.pad))
        .chain(pieces.iter().rev().copied())
        .chain(std::iter::once((outer_sq, config.pad)));
    for (k_sq, length) in walk {
        match integrate_piece(y, k_sq, length, config.step) {
            Some(next) => y = next,
            None => return Ok(overflow),
        }
    }

    let incident = 0.5 * (y.0 + y.1 / ik0);
    Ok(OracleTransmission {
        transmission: 1.0 / incident.norm_sqr(),
        overflowed: false,
    })
}
