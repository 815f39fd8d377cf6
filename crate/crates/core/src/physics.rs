//! Units, constants and scattering kinematics.
//!
//! Energies are in eV, lengths in nm and masses in multiples of the electron
//! rest mass. Every wavenumber in the crate is derived from the single pinned
//! constant [`HBAR2_OVER_2ME`], so a given input always produces the same bits.
//!
//! Angles are radians internally; [`IncidenceSpec::from_degrees`] is the
//! conversion used at the external interface.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Result, TunnelError};

/// ħ²/(2mₑ) in eV·nm².
pub const HBAR2_OVER_2ME: f64 = 0.038_099_821_2;

/// Half-width (eV) of the band of `E·cos²θ₁ − V` classified as critical.
pub const CRITICAL_TOLERANCE_EV: f64 = 1e-9;

/// Grazing incidence, θ₁ = π/2.
pub const GRAZING: f64 = FRAC_PI_2;

// Inputs this far above π/2 are rounding noise from a degree conversion.
const ANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleSpec {
    mass: f64,
}

impl ParticleSpec {
    pub fn new(mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(TunnelError::domain(format!(
                "particle mass must be positive, got {mass}"
            )));
        }
        Ok(ParticleSpec { mass })
    }

    pub fn electron() -> Self {
        ParticleSpec { mass: 1.0 }
    }

    /// Mass in electron masses.
    pub fn mass(&self) -> f64 {
        self.mass
    }
}

impl Default for ParticleSpec {
    fn default() -> Self {
        Self::electron()
    }
}

/// A rectangular barrier of `height` eV occupying `0 ≤ x ≤ width` nm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec {
    height: f64,
    width: f64,
}

impl BarrierSpec {
    pub fn new(height: f64, width: f64) -> Result<Self> {
        if !(height.is_finite() && height > 0.0) {
            return Err(TunnelError::domain(format!(
                "barrier height must be positive, got {height}"
            )));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(TunnelError::domain(format!(
                "barrier width must be positive, got {width}"
            )));
        }
        Ok(BarrierSpec { height, width })
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn width(&self) -> f64 {
        self.width
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceSpec {
    energy: f64,
    theta1: f64,
    particle: ParticleSpec,
}

impl IncidenceSpec {
    /// `theta1` in radians, within `[0, π/2]`.
    pub fn new(energy: f64, theta1: f64, particle: ParticleSpec) -> Result<Self> {
        if !(energy.is_finite() && energy > 0.0) {
            return Err(TunnelError::domain(format!(
                "incident energy must be positive, got {energy}"
            )));
        }
        if !(theta1.is_finite() && (0.0..=GRAZING + ANGLE_SLACK).contains(&theta1)) {
            return Err(TunnelError::domain(format!(
                "incidence angle must lie in [0, π/2] rad, got {theta1}"
            )));
        }
        Ok(IncidenceSpec {
            energy,
            theta1: theta1.min(GRAZING),
            particle,
        })
    }

    /// Same as [`IncidenceSpec::new`] with the angle in degrees. 90° maps to
    /// exactly [`GRAZING`].
    pub fn from_degrees(energy: f64, degrees: f64, particle: ParticleSpec) -> Result<Self> {
        if !(degrees.is_finite() && (0.0..=90.0).contains(&degrees)) {
            return Err(TunnelError::domain(format!(
                "incidence angle must lie in [0, 90] degrees, got {degrees}"
            )));
        }
        let theta1 = if degrees == 90.0 {
            GRAZING
        } else {
            degrees.to_radians()
        };
        Self::new(energy, theta1, particle)
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn particle(&self) -> ParticleSpec {
        self.particle
    }

    pub fn mass(&self) -> f64 {
        self.particle.mass
    }

    pub fn is_grazing(&self) -> bool {
        is_grazing(self.theta1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeKind {
    /// `E·cos²θ₁ > V`: the perpendicular motion oscillates inside the barrier.
    PropagatingInterior,
    /// `E·cos²θ₁ < V`: tunneling, evanescent interior.
    EvanescentInterior,
    /// Zero perpendicular kinetic energy at the barrier top, within
    /// [`CRITICAL_TOLERANCE_EV`].
    CriticalInterior,
}

impl RegimeKind {
    pub fn tag(&self) -> &'static str {
        match self {
            RegimeKind::PropagatingInterior => "propagating",
            RegimeKind::EvanescentInterior => "evanescent",
            RegimeKind::CriticalInterior => "critical",
        }
    }
}

pub(crate) fn is_grazing(theta1: f64) -> bool {
    theta1 >= GRAZING
}

/// `(cos θ, sin θ)`, exact `(0, 1)` at grazing incidence.
pub(crate) fn angle_trig(theta1: f64) -> (f64, f64) {
    if is_grazing(theta1) {
        (0.0, 1.0)
    } else {
        (theta1.cos(), theta1.sin())
    }
}

pub fn classify_regime(energy: f64, theta1: f64, height: f64) -> RegimeKind {
    let (c, _) = angle_trig(theta1);
    let margin = energy * c * c - height;
    if margin > CRITICAL_TOLERANCE_EV {
        RegimeKind::PropagatingInterior
    } else if margin < -CRITICAL_TOLERANCE_EV {
        RegimeKind::EvanescentInterior
    } else {
        RegimeKind::CriticalInterior
    }
}

/// Squared wavenumber (nm⁻²) of a particle with kinetic energy `energy`.
/// Negative for classically forbidden motion.
pub(crate) fn wavenumber_sq(energy: f64, mass: f64) -> f64 {
    energy * mass / HBAR2_OVER_2ME
}

/// Principal root of a real squared wavenumber: `√s` for `s ≥ 0`, `i√(−s)` otherwise.
pub(crate) fn complex_wavenumber(k_sq: f64) -> Complex64 {
    if k_sq >= 0.0 {
        Complex64::new(k_sq.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-k_sq).sqrt())
    }
}

/// `k = √(2mE)/ħ` in nm⁻¹.
pub fn free_wavenumber(energy: f64, mass: f64) -> Result<f64> {
    if !(energy.is_finite() && energy >= 0.0) {
        return Err(TunnelError::domain(format!(
            "energy must be non-negative, got {energy}"
        )));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(TunnelError::domain(format!(
            "mass must be positive, got {mass}"
        )));
    }
    Ok(wavenumber_sq(energy, mass).sqrt())
}

/// Decay constant `K = √(2m(V − E))/ħ` inside a barrier the particle cannot classically cross.
pub fn decay_constant(energy: f64, height: f64, mass: f64) -> Result<f64> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(TunnelError::domain(format!(
            "energy must be positive, got {energy}"
        )));
    }
    if energy >= height {
        return Err(TunnelError::Regime {
            model: "decay constant",
            requirement: "energy below the barrier height",
        });
    }
    free_wavenumber(height - energy, mass)
}

/// `η = √(E/(V − E))`, the modulus of the imaginary index ratio `k₁/K`.
pub fn eta(energy: f64, height: f64) -> Result<f64> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(TunnelError::domain(format!(
            "energy must be positive, got {energy}"
        )));
    }
    if energy >= height {
        return Err(TunnelError::Regime {
            model: "eta",
            requirement: "energy below the barrier height",
        });
    }
    Ok((energy / (height - energy)).sqrt())
}

/// `β = √((η² + sin²θ₁)/(1 − sin²θ₁))`, evaluated as written in the
/// angular-tunneling derivation. Diverges at grazing incidence.
pub fn beta_paper(eta: f64, theta1: f64) -> Result<f64> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(TunnelError::domain(format!(
            "eta must be positive, got {eta}"
        )));
    }
    if !(theta1.is_finite() && theta1 >= 0.0) {
        return Err(TunnelError::domain(format!(
            "incidence angle must lie in [0, π/2), got {theta1}"
        )));
    }
    if is_grazing(theta1) {
        return Err(TunnelError::Divergence(
            "beta is unbounded at grazing incidence".into(),
        ));
    }
    let s2 = theta1.sin().powi(2);
    Ok(((eta * eta + s2) / (1.0 - s2)).sqrt())
}

/// Refraction angle from Snell's law `k₁ sin θ₁ = k₂ sin θ₂`, i.e.
/// `sin θ₂ = n·sin θ₁` with `n = k₁/k₂`. Principal branch of the complex
/// arcsine; real whenever the interior propagates.
pub fn refraction_angle(theta1: f64, n: Complex64) -> Result<Complex64> {
    if n == Complex64::new(0.0, 0.0) || !(n.re.is_finite() && n.im.is_finite()) {
        return Err(TunnelError::domain(format!(
            "index ratio must be finite and nonzero, got {n}"
        )));
    }
    if !(theta1.is_finite() && (0.0..=GRAZING + ANGLE_SLACK).contains(&theta1)) {
        return Err(TunnelError::domain(format!(
            "incidence angle must lie in [0, π/2], got {theta1}"
        )));
    }
    if theta1 == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if n == Complex64::new(1.0, 0.0) {
        return Ok(Complex64::new(theta1.min(GRAZING), 0.0));
    }
    let (_, s) = angle_trig(theta1);
    Ok((n * s).asin())
}

/// Every derived quantity for one (energy, barrier, angle) point.
///
/// Quantities that do not exist in the point's regime are `None`: `decay`,
/// `eta` and `beta` need `E < V`; `kappa_eff` needs `E·cos²θ₁ ≤ V`; the
/// index ratios need a nonzero interior wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    /// Total wavenumber outside the barrier.
    pub k1: f64,
    /// Total wavenumber inside the barrier, `iK` when `E < V`.
    pub k2: Complex64,
    /// `K`, the normal-incidence decay constant.
    pub decay: Option<f64>,
    /// `√(K² + k₁² sin²θ₁)`, the decay constant once parallel momentum is conserved.
    pub kappa_eff: Option<f64>,
    pub eta: Option<f64>,
    /// `β` of the angular thick-barrier formula; `None` at grazing incidence or for `E ≥ V`.
    pub beta: Option<f64>,
    /// `n = k₁/k₂`.
    pub index_ratio: Option<Complex64>,
    /// `N = n·cos θ₁ / cos θ₂`, equal to the ratio of perpendicular wavenumbers.
    pub effective_index: Option<Complex64>,
    pub theta2: Option<Complex64>,
    pub k_parallel: f64,
    /// Perpendicular wavenumber outside the barrier, `k₁ cos θ₁`.
    pub k_perp: f64,
    /// Perpendicular wavenumber inside the barrier; `i·kappa_eff` when evanescent.
    pub q: Complex64,
    pub regime: RegimeKind,
}

pub fn kinematics(incidence: &IncidenceSpec, barrier: &BarrierSpec) -> Kinematics {
    let energy = incidence.energy();
    let height = barrier.height();
    let mass = incidence.mass();
    let theta1 = incidence.theta1();
    let (c, s) = angle_trig(theta1);

    let k1 = wavenumber_sq(energy, mass).sqrt();
    let k2 = complex_wavenumber(wavenumber_sq(energy - height, mass));
    let below = energy < height;
    let decay = below.then(|| wavenumber_sq(height - energy, mass).sqrt());
    let eta = below.then(|| (energy / (height - energy)).sqrt());
    let beta = match eta {
        Some(e) if !is_grazing(theta1) => beta_paper(e, theta1).ok(),
        _ => None,
    };

    // V − E cos²θ₁ written as (V − E) + E sin²θ₁ keeps full relative precision.
    let perp_deficit = (height - energy) + energy * s * s;
    let kappa_eff = (perp_deficit >= 0.0).then(|| wavenumber_sq(perp_deficit, mass).sqrt());
    let q = complex_wavenumber(-wavenumber_sq(perp_deficit, mass));

    let zero = Complex64::new(0.0, 0.0);
    let index_ratio = (k2 != zero).then(|| Complex64::new(k1, 0.0) / k2);
    let theta2 = index_ratio.and_then(|n| refraction_angle(theta1, n).ok());
    let effective_index = match index_ratio {
        Some(n) if q != zero => {
            let cos_theta2 = q / k2;
            Some(n * c / cos_theta2)
        }
        _ => None,
    };

    Kinematics {
        k1,
        k2,
        decay,
        kappa_eff,
        eta,
        beta,
        index_ratio,
        effective_index,
        theta2,
        k_parallel: k1 * s,
        k_perp: k1 * c,
        q,
        regime: classify_regime(energy, theta1, height),
    }
}
