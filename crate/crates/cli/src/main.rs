use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tunneling_core::{
    compute_point, execute_sweep, find_crossover, validate_models, BarrierSpec, EnergyGrid,
    IncidenceSpec, IntegratorConfig, ModelKind, ParticleSpec, SweepConfig, TunnelError,
    ValidationGrid,
};

/// Transmission through a rectangular barrier at oblique incidence.
///
/// Energies in eV, widths in nm, masses in electron masses, angles in degrees.
/// Exit status: 0 ok, 1 domain or regime error, 2 i/o or configuration error.
#[derive(Parser)]
#[command(name = "tunneling", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Barrier {
    /// Barrier height V (eV)
    #[arg(long)]
    height: f64,
    /// Barrier width a (nm)
    #[arg(long)]
    width: f64,
    /// Particle mass (electron masses)
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
}

impl Barrier {
    fn specs(&self) -> Result<(BarrierSpec, ParticleSpec), TunnelError> {
        Ok((
            BarrierSpec::new(self.height, self.width)?,
            ParticleSpec::new(self.mass)?,
        ))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one model at one point
    Point {
        #[arg(long)]
        model: ModelKind,
        #[arg(long)]
        energy: f64,
        /// Incidence angle (degrees)
        #[arg(long)]
        angle: f64,
        #[command(flatten)]
        barrier: Barrier,
    },
    /// Run an energy/angle sweep described by a TOML file and write CSV
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output` from the config
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Find the energy where two models give equal transmission
    Crossover {
        #[arg(long)]
        model_a: ModelKind,
        #[arg(long)]
        model_b: ModelKind,
        /// Incidence angle (degrees)
        #[arg(long)]
        angle: f64,
        #[command(flatten)]
        barrier: Barrier,
        /// Search bracket in eV
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        bracket: Vec<f64>,
    },
    /// Cross-model deviation table over an (E, angle) grid
    Validate {
        #[command(flatten)]
        barrier: Barrier,
        #[arg(long, default_value_t = 1.0)]
        e_start: f64,
        #[arg(long, default_value_t = 12.0)]
        e_stop: f64,
        #[arg(long, default_value_t = 111)]
        e_count: usize,
        /// Comma-separated angles (degrees)
        #[arg(long, value_delimiter = ',', default_value = "0,30,45,60,90")]
        angles: Vec<f64>,
        /// ODE oracle step (nm)
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
}

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn run(cli: Cli) -> Result<(), TunnelError> {
    match cli.command {
        Command::Point {
            model,
            energy,
            angle,
            barrier,
        } => {
            let (bar, particle) = barrier.specs()?;
            let inc = IncidenceSpec::from_degrees(energy, angle, particle)?;
            let r = compute_point(model, &inc, &bar)?;
            println!("model: {}", r.model);
            println!("transmission: {}", num(r.transmission));
            if let Some(refl) = r.reflection {
                println!("reflection: {}", num(refl));
            }
            println!("regime: {}", r.regime.tag());
            let tags: Vec<_> = r.warnings.iter().map(|w| w.tag()).collect();
            println!("warnings: {}", tags.join(";"));
        }
        Command::Sweep {
            config,
            out,
            threads,
        } => {
            let mut cfg = SweepConfig::load(&config)?;
            if let Some(out) = out {
                cfg.output = out;
            }
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads {
                pool = pool.num_threads(n);
            }
            let pool = pool
                .build()
                .map_err(|e| TunnelError::Config(format!("thread pool: {e}")))?;
            let (rows, written) = pool.install(|| execute_sweep(&cfg))?;
            for path in written {
                eprintln!("wrote {}", path.display());
            }
            eprintln!("{} rows", rows.len());
        }
        Command::Crossover {
            model_a,
            model_b,
            angle,
            barrier,
            bracket,
        } => {
            let (bar, particle) = barrier.specs()?;
            let theta = IncidenceSpec::from_degrees(1.0, angle, particle)?.theta1();
            let e = find_crossover(
                model_a,
                model_b,
                theta,
                &bar,
                particle,
                (bracket[0], bracket[1]),
            )?;
            println!("{e:.9}");
        }
        Command::Validate {
            barrier,
            e_start,
            e_stop,
            e_count,
            angles,
            step,
        } => {
            let (bar, particle) = barrier.specs()?;
            if let Some(bad) = angles.iter().find(|a| !(0.0..=90.0).contains(*a)) {
                return Err(TunnelError::Config(format!(
                    "angles must lie in [0, 90] degrees, got {bad}"
                )));
            }
            let grid = ValidationGrid {
                energies: EnergyGrid::new(e_start, e_stop, e_count)?,
                angles,
                integrator: IntegratorConfig::with_step(step),
            };
            print!("{}", validate_models(&bar, particle, &grid)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io_or_config() { 2 } else { 1 })
        }
    }
}
