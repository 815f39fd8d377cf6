//! Transmission of a particle through a rectangular barrier at oblique
//! incidence: the thick-barrier approximations, the exact closed form, a
//! transfer-matrix solver for piecewise-constant profiles and a direct ODE
//! integrator used as an independent check.
//!
//! Units: energies in eV, lengths in nm, masses in electron masses, angles in
//! radians unless a name says degrees.

pub mod analysis;
pub mod error;
pub mod models;
pub mod oracle;
pub mod physics;
pub mod sweep;
pub mod transfer;

pub use analysis::{
    find_crossover, validate_models, PairDeviation, Source, ValidationGrid, ValidationReport,
};
pub use error::{Result, TunnelError};
pub use models::{
    angular_consistent_thick_transmission, angular_paper_beta_transmission,
    angular_paper_literal_transmission, exact_barrier_transmission, step_regime_transmission,
    usual_thick_transmission, ModelKind, TransmissionResult, Warning,
};
pub use oracle::{integrate_transmission, IntegrationMethod, IntegratorConfig};
pub use physics::{
    classify_regime, BarrierSpec, IncidenceSpec, Kinematics, ParticleSpec, RegimeKind,
};
pub use sweep::{
    compute_point, emit_csv, emit_plot_script, execute_sweep, run_sweep, EnergyGrid, SweepConfig,
    SweepRow,
};
pub use transfer::{solve_profile, PotentialProfile, Segment};
