//! Energy/angle sweeps and their CSV and gnuplot output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Result, TunnelError};
use crate::models::{
    angular_consistent_thick_transmission, angular_paper_beta_transmission,
    angular_paper_literal_transmission, exact_barrier_transmission, step_regime_transmission,
    usual_thick_transmission, ModelKind, TransmissionResult,
};
use crate::physics::{classify_regime, BarrierSpec, IncidenceSpec, ParticleSpec, RegimeKind};
use crate::transfer::{solve_profile, PotentialProfile};

/// Evaluates one model at one point. Values are identical to calling the
/// model function directly; `StepRegime` uses the flux-conserving form.
pub fn compute_point(
    model: ModelKind,
    incidence: &IncidenceSpec,
    barrier: &BarrierSpec,
) -> Result<TransmissionResult> {
    match model {
        ModelKind::UsualThick => {
            usual_thick_transmission(incidence.energy(), barrier, incidence.particle())
        }
        ModelKind::AngularPaperLiteral => angular_paper_literal_transmission(incidence, barrier),
        ModelKind::AngularPaperBeta => angular_paper_beta_transmission(incidence, barrier),
        ModelKind::AngularConsistentThick => {
            angular_consistent_thick_transmission(incidence, barrier)
        }
        ModelKind::ExactClosedForm => Ok(exact_barrier_transmission(incidence, barrier)),
        ModelKind::StepRegime => step_regime_transmission(incidence, barrier, false),
        ModelKind::TransferMatrix => {
            solve_profile(&PotentialProfile::single_barrier(barrier), incidence).map(|s| s.result)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl EnergyGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        let grid = EnergyGrid { start, stop, count };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(TunnelError::Config(format!(
                "energy_grid.count must be at least 2, got {}",
                self.count
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(TunnelError::Config(format!(
                "energy_grid needs start < stop, got {} and {}",
                self.start, self.stop
            )));
        }
        if self.start <= 0.0 {
            return Err(TunnelError::Config(format!(
                "energy_grid.start must be positive, got {}",
                self.start
            )));
        }
        Ok(())
    }

    /// `start + (stop − start)·i/(count − 1)`; the last point is `stop` exactly.
    pub fn energies(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBarrier {
    height: f64,
    width: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweepConfig {
    barrier: RawBarrier,
    #[serde(default = "electron_mass")]
    mass: f64,
    models: Vec<ModelKind>,
    energy_grid: EnergyGrid,
    angle_list: Vec<f64>,
    output: PathBuf,
    #[serde(default)]
    emit_plot_script: bool,
}

fn electron_mass() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub barrier: BarrierSpec,
    /// Electron masses.
    pub mass: f64,
    pub models: Vec<ModelKind>,
    pub energy_grid: EnergyGrid,
    /// Degrees.
    pub angle_list: Vec<f64>,
    pub output: PathBuf,
    pub emit_plot_script: bool,
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawSweepConfig =
            toml::from_str(text).map_err(|e| TunnelError::Config(e.to_string()))?;
        let barrier = BarrierSpec::new(raw.barrier.height, raw.barrier.width)
            .map_err(|e| TunnelError::Config(e.to_string()))?;
        let config = SweepConfig {
            barrier,
            mass: raw.mass,
            models: raw.models,
            energy_grid: raw.energy_grid,
            angle_list: raw.angle_list,
            output: raw.output,
            emit_plot_script: raw.emit_plot_script,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| TunnelError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.energy_grid.validate()?;
        ParticleSpec::new(self.mass).map_err(|e| TunnelError::Config(e.to_string()))?;
        if self.models.is_empty() {
            return Err(TunnelError::Config("models must not be empty".into()));
        }
        if self.angle_list.is_empty() {
            return Err(TunnelError::Config("angle_list must not be empty".into()));
        }
        if let Some(bad) = self.angle_list.iter().find(|a| !(0.0..=90.0).contains(*a)) {
            return Err(TunnelError::Config(format!(
                "angle_list entries must lie in [0, 90] degrees, got {bad}"
            )));
        }
        Ok(())
    }

    pub fn particle(&self) -> ParticleSpec {
        ParticleSpec::new(self.mass).expect("validated mass")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub energy: f64,
    /// Degrees.
    pub angle: f64,
    /// One entry per requested model, in config order; `None` when the point
    /// lies outside the model's regime.
    pub cells: Vec<(ModelKind, Option<f64>)>,
    pub regime: RegimeKind,
    /// `<model>:<tag>` entries, in model order.
    pub warnings: Vec<String>,
}

fn sweep_row(
    config: &SweepConfig,
    particle: ParticleSpec,
    angle: f64,
    energy: f64,
) -> Result<SweepRow> {
    let incidence = IncidenceSpec::from_degrees(energy, angle, particle)?;
    let mut cells = Vec::with_capacity(config.models.len());
    let mut warnings = Vec::new();
    for &model in &config.models {
        match compute_point(model, &incidence, &config.barrier) {
            Ok(result) => {
                warnings.extend(
                    result
                        .warnings
                        .iter()
                        .map(|w| format!("{}:{}", model.name(), w.tag())),
                );
                cells.push((model, Some(result.transmission)));
            }
            Err(TunnelError::Regime { .. }) => {
                warnings.push(format!("{}:out_of_regime", model.name()));
                cells.push((model, None));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(SweepRow {
        energy,
        angle,
        cells,
        regime: classify_regime(energy, incidence.theta1(), config.barrier.height()),
        warnings,
    })
}

fn probe_writable(path: &Path) -> Result<()> {
    fs::OpenOptions::new()
        .write(true)
        .create(true)
        .truncate(false)
        .open(path)
        .map(drop)
        .map_err(|e| TunnelError::io(path, e))
}

/// Evaluates every (angle, energy, model) cell. Rows come back angle-major
/// in `angle_list` order, energies ascending within each angle. The output
/// path is checked for writability before anything is computed.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    probe_writable(&config.output)?;
    let particle = config.particle();
    let energies = config.energy_grid.energies();
    let points: Vec<(f64, f64)> = config
        .angle_list
        .iter()
        .flat_map(|&a| energies.iter().map(move |&e| (a, e)))
        .collect();
    points
        .par_iter()
        .map(|&(a, e)| sweep_row(config, particle, a, e))
        .collect()
}

/// Runs the sweep and writes the CSV, plus the plot script when requested.
/// Returns the rows and the paths written.
pub fn execute_sweep(config: &SweepConfig) -> Result<(Vec<SweepRow>, Vec<PathBuf>)> {
    let rows = run_sweep(config)?;
    emit_csv(&rows, &config.output)?;
    let mut written = vec![config.output.clone()];
    if config.emit_plot_script {
        written.push(emit_plot_script(&rows, &config.output)?);
    }
    Ok((rows, written))
}

fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn render_csv(rows: &[SweepRow]) -> Result<String> {
    let first = rows
        .first()
        .ok_or_else(|| TunnelError::domain("cannot emit an empty sweep"))?;
    let mut out = String::from("energy_eV,angle_deg");
    for (model, _) in &first.cells {
        out.push(',');
        out.push_str(model.name());
    }
    out.push_str(",regime,warnings\n");
    for row in rows {
        out.push_str(&fmt_num(row.energy));
        out.push(',');
        out.push_str(&fmt_num(row.angle));
        for (_, value) in &row.cells {
            out.push(',');
            if let Some(v) = value {
                out.push_str(&fmt_num(*v));
            }
        }
        out.push(',');
        out.push_str(row.regime.tag());
        out.push(',');
        out.push_str(&row.warnings.join(";"));
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let text = render_csv(rows)?;
    fs::write(path, text).map_err(|e| TunnelError::io(path, e))
}

fn gnuplot_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// A gnuplot script with one panel per angle. It refers to the CSV by file
/// name, so it must sit next to it.
pub fn render_plot_script(rows: &[SweepRow], csv_name: &str) -> Result<String> {
    let first = rows
        .first()
        .ok_or_else(|| TunnelError::domain("cannot plot an empty sweep"))?;
    let mut angles: Vec<f64> = Vec::new();
    for row in rows {
        if !angles.contains(&row.angle) {
            angles.push(row.angle);
        }
    }
    let cols = angles.len().min(3);
    let layout_rows = angles.len().div_ceil(cols);

    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot -persist <this file>");
    let _ = writeln!(s, "csv = {}", gnuplot_quote(csv_name));
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile missing ''");
    let _ = writeln!(s, "set xlabel 'E (eV)'");
    let _ = writeln!(s, "set ylabel 'T'");
    let _ = writeln!(s, "set key top left");
    let _ = writeln!(s, "set multiplot layout {layout_rows},{cols}");
    for angle in &angles {
        let _ = writeln!(
            s,
            "set title {}",
            gnuplot_quote(&format!("theta = {angle} deg"))
        );
        let series: Vec<String> = first
            .cells
            .iter()
            .enumerate()
            .map(|(i, (model, _))| {
                format!(
                    "csv every ::1 using 1:(${} == {} ? ${} : 1/0) with lines title {}",
                    2,
                    fmt_num(*angle),
                    i + 3,
                    gnuplot_quote(model.name())
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    }
    let _ = writeln!(s, "unset multiplot");
    Ok(s)
}

/// Writes the script beside `csv_path` with a `.gp` extension.
pub fn emit_plot_script(rows: &[SweepRow], csv_path: &Path) -> Result<PathBuf> {
    let name = csv_path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| TunnelError::Config(format!("bad csv path {}", csv_path.display())))?;
    let text = render_plot_script(rows, name)?;
    let script = csv_path.with_extension("gp");
    fs::write(&script, text).map_err(|e| TunnelError::io(&script, e))?;
    Ok(script)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(output: PathBuf) -> SweepConfig {
        SweepConfig {
            barrier: BarrierSpec::new(12.0, 0.18).unwrap(),
            mass: 1.0,
            models: vec![ModelKind::UsualThick, ModelKind::AngularPaperLiteral],
            energy_grid: EnergyGrid::new(1.0, 12.0, 12).unwrap(),
            angle_list: vec![30.0],
            output,
            emit_plot_script: false,
        }
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let e = EnergyGrid::new(1.0, 12.0, 111).unwrap().energies();
        assert_eq!(e.len(), 111);
        assert_eq!(e[0], 1.0);
        assert_eq!(e[110], 12.0);
        assert!((e[50] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn twelve_rows_make_thirteen_lines() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path().join("out.csv"));
        let (rows, _) = execute_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 12);
        let text = fs::read_to_string(&cfg.output).unwrap();
        assert_eq!(text.lines().count(), 13);
        assert!(!text.contains('\r'));
        assert!(text.starts_with(
            "energy_eV,angle_deg,usual_thick,angular_paper_literal,regime,warnings\n"
        ));
    }

    #[test]
    fn out_of_regime_cells_are_empty_and_tagged() {
        let dir = tempfile::tempdir().unwrap();
        let rows = run_sweep(&config(dir.path().join("out.csv"))).unwrap();
        let last = rows.last().unwrap();
        assert_eq!(last.energy, 12.0);
        assert_eq!(last.cells[0].1, None);
        assert_eq!(
            last.warnings,
            vec![
                "usual_thick:out_of_regime",
                "angular_paper_literal:out_of_regime"
            ]
        );
        let csv = render_csv(&rows).unwrap();
        assert!(csv.ends_with(
            ",,,evanescent,usual_thick:out_of_regime;angular_paper_literal:out_of_regime\n"
        ));
    }

    #[test]
    fn cells_match_compute_point() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path().join("out.csv"));
        cfg.models = ModelKind::ALL.to_vec();
        cfg.angle_list = vec![0.0, 45.0, 90.0];
        cfg.energy_grid = EnergyGrid::new(1.0, 20.0, 9).unwrap();
        for row in run_sweep(&cfg).unwrap() {
            let inc = IncidenceSpec::from_degrees(row.energy, row.angle, ParticleSpec::electron())
                .unwrap();
            for (model, value) in row.cells {
                let direct = compute_point(model, &inc, &cfg.barrier)
                    .ok()
                    .map(|r| r.transmission);
                assert_eq!(value.map(f64::to_bits), direct.map(f64::to_bits));
            }
        }
    }

    #[test]
    fn rows_are_angle_major() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path().join("out.csv"));
        cfg.angle_list = vec![0.0, 30.0, 60.0];
        let rows = run_sweep(&cfg).unwrap();
        let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.angle, r.energy)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
    }

    #[test]
    fn unwritable_output_fails_before_computing() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path().join("missing").join("out.csv"));
        assert!(matches!(run_sweep(&cfg), Err(TunnelError::Io { .. })));
    }

    #[test]
    fn parses_toml_and_rejects_unknown_keys() {
        let text = r#"
mass = 1.0
models = ["usual_thick", "exact_closed_form"]
angle_list = [0, 45]
output = "out.csv"
emit_plot_script = true

[barrier]
height = 12.0
width = 0.18

[energy_grid]
start = 1.0
stop = 12.0
count = 12
"#;
        let cfg = SweepConfig::from_toml_str(text).unwrap();
        assert_eq!(
            cfg.models,
            vec![ModelKind::UsualThick, ModelKind::ExactClosedForm]
        );
        assert_eq!(cfg.angle_list, vec![0.0, 45.0]);
        assert!(cfg.emit_plot_script);

        let typo = text.replace("emit_plot_script", "emit_plot_scirpt");
        assert!(matches!(
            SweepConfig::from_toml_str(&typo),
            Err(TunnelError::Config(_))
        ));
        let bad_model = text.replace("usual_thick", "usual");
        assert!(matches!(
            SweepConfig::from_toml_str(&bad_model),
            Err(TunnelError::Config(_))
        ));
        let bad_angle = text.replace("[0, 45]", "[0, 95]");
        assert!(matches!(
            SweepConfig::from_toml_str(&bad_angle),
            Err(TunnelError::Config(_))
        ));
        let one_point = text.replace("count = 12", "count = 1");
        assert!(matches!(
            SweepConfig::from_toml_str(&one_point),
            Err(TunnelError::Config(_))
        ));
        let reversed = text.replace("start = 1.0", "start = 13.0");
        assert!(matches!(
            SweepConfig::from_toml_str(&reversed),
            Err(TunnelError::Config(_))
        ));
    }

    #[test]
    fn plot_script_references_csv_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path().join("fig.csv"));
        cfg.emit_plot_script = true;
        let (_, written) = execute_sweep(&cfg).unwrap();
        assert_eq!(written[1], dir.path().join("fig.gp"));
        let script = fs::read_to_string(&written[1]).unwrap();
        assert!(script.contains("csv = 'fig.csv'"));
        assert!(!script.contains(dir.path().to_str().unwrap()));
        assert!(script.contains("$2 == 3.00000000000e1"));
    }
}
