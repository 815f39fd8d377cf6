//! Transfer-matrix scattering through piecewise-constant potentials.
//!
//! The problem is reduced to one dimension at fixed parallel momentum
//! `k∥ = k₁ sin θ₁`; each region then carries a perpendicular wavenumber
//! `k⊥² = (2m/ħ²)(E cos²θ₁ − V)`, imaginary where the motion is forbidden.
//!
//! Conventions:
//! - matrices map amplitudes on the right of an interface or slab to the left,
//!   so the product is built in the order the profile is written;
//! - a region's amplitudes `(forward, backward)` multiply `e^{±ik(x − x₀)}`
//!   where `x₀` is the region's left edge (`x₀ = 0` for the incidence region);
//! - the profile starts at `x = 0` and both outer media sit at 0 eV.
//!
//! A segment whose `k⊥²` lies within the critical band has no usable
//! plane-wave basis. It is carried in the `(ψ, ψ')` basis instead and its
//! amplitudes are reported with [`AmplitudeBasis::Linear`].

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Result, TunnelError};
use crate::models::{slab_cos_sinc, ModelKind, TransmissionResult, Warning};
use crate::physics::{
    angle_trig, complex_wavenumber, wavenumber_sq, BarrierSpec, IncidenceSpec, RegimeKind,
    CRITICAL_TOLERANCE_EV,
};

/// Evanescent segments with `κd` above this are treated as opaque.
pub const OVERFLOW_EXPONENT: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    /// eV
    pub potential: f64,
    /// nm
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialProfile {
    segments: Vec<Segment>,
}

impl PotentialProfile {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for (i, s) in segments.iter().enumerate() {
            if !(s.width.is_finite() && s.width > 0.0) {
                return Err(TunnelError::domain(format!(
                    "segment {i} width must be positive, got {}",
                    s.width
                )));
            }
            if !s.potential.is_finite() {
                return Err(TunnelError::domain(format!(
                    "segment {i} potential must be finite"
                )));
            }
        }
        Ok(PotentialProfile { segments })
    }

    pub fn empty() -> Self {
        PotentialProfile::default()
    }

    pub fn single_barrier(barrier: &BarrierSpec) -> Self {
        PotentialProfile {
            segments: vec![Segment {
                potential: barrier.height(),
                width: barrier.width(),
            }],
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_width(&self) -> f64 {
        self.segments.iter().map(|s| s.width).sum()
    }

    pub fn max_potential(&self) -> Option<f64> {
        self.segments.iter().map(|s| s.potential).reduce(f64::max)
    }

    pub fn reversed(&self) -> Self {
        let mut segments = self.segments.clone();
        segments.reverse();
        PotentialProfile { segments }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoByTwoComplex {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TwoByTwoComplex {
    pub fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        TwoByTwoComplex {
            m11: one,
            m12: zero,
            m21: zero,
            m22: one,
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m11 * v[0] + self.m12 * v[1],
            self.m21 * v[0] + self.m22 * v[1],
        ]
    }

    fn is_finite(&self) -> bool {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Mul for TwoByTwoComplex {
    type Output = TwoByTwoComplex;

    fn mul(self, o: TwoByTwoComplex) -> TwoByTwoComplex {
        TwoByTwoComplex {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }
}

/// Matching of `ψ` and `ψ'` across an interface: maps the amplitude pair on
/// the right to the pair on the left, `½[[1 + r, 1 − r], [1 − r, 1 + r]]` with
/// `r = k_right/k_left`.
pub fn interface_matrix(k_left: Complex64, k_right: Complex64) -> Result<TwoByTwoComplex> {
    if k_left == Complex64::new(0.0, 0.0) {
        return Err(TunnelError::SingularInterface);
    }
    let r = k_right / k_left;
    let one = Complex64::new(1.0, 0.0);
    let (p, m) = ((one + r) * 0.5, (one - r) * 0.5);
    Ok(TwoByTwoComplex {
        m11: p,
        m12: m,
        m21: m,
        m22: p,
    })
}

/// `diag(e^{−ikd}, e^{+ikd})`: re-references amplitudes from the right edge of
/// a slab of width `d` to its left edge.
pub fn propagation_matrix(k: Complex64, width: f64) -> TwoByTwoComplex {
    debug_assert!(width >= 0.0);
    let phase = Complex64::i() * k * width;
    let zero = Complex64::new(0.0, 0.0);
    TwoByTwoComplex {
        m11: (-phase).exp(),
        m12: zero,
        m21: zero,
        m22: phase.exp(),
    }
}

// Amplitudes → (ψ, ψ') at the reference point.
fn to_linear(k: Complex64) -> TwoByTwoComplex {
    let ik = Complex64::i() * k;
    TwoByTwoComplex {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(1.0, 0.0),
        m21: ik,
        m22: -ik,
    }
}

// (ψ, ψ') → amplitudes; k must be nonzero.
fn from_linear(k: Complex64) -> TwoByTwoComplex {
    let half_over_ik = 0.5 / (Complex64::i() * k);
    let half = Complex64::new(0.5, 0.0);
    TwoByTwoComplex {
        m11: half,
        m12: half_over_ik,
        m21: half,
        m22: -half_over_ik,
    }
}

// (ψ, ψ') at the right edge of a slab → the left edge, for k² = s.
fn linear_slab(s: f64, width: f64) -> TwoByTwoComplex {
    let (c, sinc) = slab_cos_sinc(s, width, RegimeKind::CriticalInterior);
    TwoByTwoComplex {
        m11: Complex64::new(c, 0.0),
        m12: Complex64::new(-sinc, 0.0),
        m21: Complex64::new(s * sinc, 0.0),
        m22: Complex64::new(c, 0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeBasis {
    /// `ψ = forward·e^{ik(x−x₀)} + backward·e^{−ik(x−x₀)}`.
    PlaneWave,
    /// `forward = ψ(x₀)`, `backward = ψ'(x₀)`; used when `k ≈ 0`.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    /// Left edge; 0 for the incidence region.
    pub origin: f64,
    /// `None` for the two semi-infinite outer media.
    pub width: Option<f64>,
    /// Perpendicular wavenumber.
    pub k: Complex64,
    /// `k²`, real.
    pub k_sq: f64,
    pub basis: AmplitudeBasis,
    pub forward: Complex64,
    pub backward: Complex64,
}

impl Region {
    /// `(ψ(x), ψ'(x))` from this region's amplitudes.
    pub fn psi_at(&self, x: f64) -> (Complex64, Complex64) {
        let dx = x - self.origin;
        match self.basis {
            AmplitudeBasis::PlaneWave => {
                let ik = Complex64::i() * self.k;
                let f = self.forward * (ik * dx).exp();
                let b = self.backward * (-ik * dx).exp();
                (f + b, ik * (f - b))
            }
            AmplitudeBasis::Linear => {
                let (c, sinc) = slab_cos_sinc(self.k_sq, dx, RegimeKind::CriticalInterior);
                (
                    c * self.forward + sinc * self.backward,
                    -self.k_sq * sinc * self.forward + c * self.backward,
                )
            }
        }
    }
}

/// One entry per region, incidence side first. The incident amplitude is 1 and
/// the last region's backward amplitude is exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionAmplitudes {
    pub regions: Vec<Region>,
}

impl RegionAmplitudes {
    pub fn incident(&self) -> &Region {
        &self.regions[0]
    }

    pub fn transmitted(&self) -> &Region {
        self.regions.last().expect("at least two regions")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSolution {
    /// `None` at grazing incidence or when an opaque segment short-circuits the solve.
    pub amplitudes: Option<RegionAmplitudes>,
    pub result: TransmissionResult,
}

struct Layer {
    k: Complex64,
    k_sq: f64,
    width: f64,
    critical: bool,
}

fn profile_regime(profile: &PotentialProfile, incidence: &IncidenceSpec) -> RegimeKind {
    match profile.max_potential() {
        Some(v) => crate::physics::classify_regime(incidence.energy(), incidence.theta1(), v),
        None => RegimeKind::PropagatingInterior,
    }
}

fn opaque(regime: RegimeKind, warnings: Vec<Warning>) -> ProfileSolution {
    ProfileSolution {
        amplitudes: None,
        result: TransmissionResult {
            model: ModelKind::TransferMatrix,
            transmission: 0.0,
            reflection: Some(1.0),
            amplitude: Some(Complex64::new(0.0, 0.0)),
            regime,
            warnings,
        },
    }
}

/// Solves the scattering problem for a unit plane wave incident from the left.
///
/// `T = |t|²` and `R = |r|²` need no flux weighting because both outer media
/// are identical. Grazing incidence returns `T = 0, R = 1`.
pub fn solve_profile(
    profile: &PotentialProfile,
    incidence: &IncidenceSpec,
) -> Result<ProfileSolution> {
    let regime = profile_regime(profile, incidence);
    if incidence.is_grazing() {
        return Ok(opaque(regime, Vec::new()));
    }
    let mass = incidence.mass();
    let (c, _) = angle_trig(incidence.theta1());
    let perp_energy = incidence.energy() * c * c;
    let critical_band = wavenumber_sq(CRITICAL_TOLERANCE_EV, mass);

    let k0_sq = wavenumber_sq(perp_energy, mass);
    let k0 = complex_wavenumber(k0_sq);
    let layers: Vec<Layer> = profile
        .segments()
        .iter()
        .map(|s| {
            let k_sq = wavenumber_sq(perp_energy - s.potential, mass);
            Layer {
                k: complex_wavenumber(k_sq),
                k_sq,
                width: s.width,
                critical: k_sq.abs() <= critical_band,
            }
        })
        .collect();

    if layers
        .iter()
        .any(|l| !l.critical && l.k_sq < 0.0 && l.k.im * l.width > OVERFLOW_EXPONENT)
    {
        return Ok(opaque(regime, vec![Warning::Overflow]));
    }

    // Forward product M with [1, r]ᵀ = M [t', 0]ᵀ.
    let mut total = TwoByTwoComplex::identity();
    let mut linear = false;
    let mut k_prev = k0;
    for layer in &layers {
        if layer.critical {
            if !linear {
                total = total * from_linear(k_prev);
                linear = true;
            }
            total = total * linear_slab(layer.k_sq, layer.width);
        } else {
            total = if linear {
                total * to_linear(layer.k)
            } else {
                total * interface_matrix(k_prev, layer.k)?
            };
            linear = false;
            total = total * propagation_matrix(layer.k, layer.width);
        }
        k_prev = layer.k;
    }
    total = if linear {
        total * to_linear(k0)
    } else {
        total * interface_matrix(k_prev, k0)?
    };
    if !total.is_finite() {
        return Ok(opaque(regime, vec![Warning::Overflow]));
    }

    let t_local = Complex64::new(1.0, 0.0) / total.m11;
    let r = total.m21 * t_local;
    let end = profile.total_width();

    // Backward sweep for the per-region amplitudes.
    let zero = Complex64::new(0.0, 0.0);
    let mut regions = Vec::with_capacity(layers.len() + 2);
    regions.push(Region {
        origin: end,
        width: None,
        k: k0,
        k_sq: k0_sq,
        basis: AmplitudeBasis::PlaneWave,
        forward: t_local,
        backward: zero,
    });
    let mut state = [t_local, zero];
    let mut state_linear = false;
    let mut k_right = k0;
    let mut origin = end;
    for layer in layers.iter().rev() {
        origin -= layer.width;
        if layer.critical {
            let at_right = if state_linear {
                state
            } else {
                to_linear(k_right).apply(state)
            };
            state = linear_slab(layer.k_sq, layer.width).apply(at_right);
            state_linear = true;
        } else {
            let at_right = if state_linear {
                from_linear(layer.k).apply(state)
            } else {
                interface_matrix(layer.k, k_right)?.apply(state)
            };
            state = propagation_matrix(layer.k, layer.width).apply(at_right);
            state_linear = false;
        }
        regions.push(Region {
            origin,
            width: Some(layer.width),
            k: layer.k,
            k_sq: layer.k_sq,
            basis: if layer.critical {
                AmplitudeBasis::Linear
            } else {
                AmplitudeBasis::PlaneWave
            },
            forward: state[0],
            backward: state[1],
        });
        k_right = layer.k;
    }
    regions.push(Region {
        origin: 0.0,
        width: None,
        k: k0,
        k_sq: k0_sq,
        basis: AmplitudeBasis::PlaneWave,
        forward: Complex64::new(1.0, 0.0),
        backward: r,
    });
    regions.reverse();

    let transmission = t_local.norm_sqr();
    Ok(ProfileSolution {
        amplitudes: Some(RegionAmplitudes { regions }),
        result: TransmissionResult {
            model: ModelKind::TransferMatrix,
            transmission,
            reflection: Some(r.norm_sqr()),
            amplitude: Some(t_local * (-Complex64::i() * k0 * end).exp()),
            regime,
            warnings: Vec::new(),
        },
    })
}
