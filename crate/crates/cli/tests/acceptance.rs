//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are printed as FAIL but do not fail
//! the run; README explains each one. Anything else failing exits nonzero.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tunneling_core::analysis::VALIDATION_SOURCES;
use tunneling_core::{
    compute_point, exact_barrier_transmission, find_crossover, integrate_transmission,
    solve_profile, validate_models, BarrierSpec, EnergyGrid, IncidenceSpec, IntegratorConfig,
    ModelKind, ParticleSpec, PotentialProfile, Segment, Source, ValidationGrid,
};

// The expected UsualThick value 0.043669 is 1.23e-5 away from the formula
// evaluated with the pinned ħ²/2mₑ; see README.
const KNOWN_FAILURES: &[u32] = &[8];

const SEED: u64 = 0x5eed_7a1e;
const V: f64 = 12.0;
const A: f64 = 0.18;

struct Outcome {
    pass: bool,
    detail: String,
}

fn electron() -> ParticleSpec {
    ParticleSpec::electron()
}

fn inc(e: f64, deg: f64) -> IncidenceSpec {
    IncidenceSpec::from_degrees(e, deg, electron()).unwrap()
}

fn inc_rad(e: f64, theta: f64) -> IncidenceSpec {
    IncidenceSpec::new(e, theta, electron()).unwrap()
}

fn paper_barrier() -> BarrierSpec {
    BarrierSpec::new(V, A).unwrap()
}

fn t(model: ModelKind, i: &IncidenceSpec, b: &BarrierSpec) -> f64 {
    compute_point(model, i, b).unwrap().transmission
}

fn reproduction_energies() -> Vec<f64> {
    EnergyGrid::new(1.0, 12.0, 111).unwrap().energies()
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn normal_incidence_reduction(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let v = rng.gen_range(0.5..50.0);
        let e = v * rng.gen_range(0.001..0.999);
        let a = rng.gen_range(0.02..2.0);
        let bar = BarrierSpec::new(v, a).unwrap();
        let i = inc(e, 0.0);
        let usual = t(ModelKind::UsualThick, &i, &bar);
        for m in [
            ModelKind::AngularPaperLiteral,
            ModelKind::AngularPaperBeta,
            ModelKind::AngularConsistentThick,
        ] {
            worst = worst.max((t(m, &i, &bar) - usual).abs() / usual);
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-14 && within(elapsed, 1.0),
        detail: format!(
            "max relative deviation {worst:.2e} over 1000 draws x 3 models ({:.3} s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn grazing_limit() -> Outcome {
    let bar = paper_barrier();
    let (mut literal_zero, mut literal_defined, mut exact_zero) = (0, 0, 0);
    let energies = reproduction_energies();
    for &e in &energies {
        let i = inc(e, 90.0);
        if let Ok(r) = compute_point(ModelKind::AngularPaperLiteral, &i, &bar) {
            literal_defined += 1;
            literal_zero += usize::from(r.transmission == 0.0);
        }
        exact_zero += usize::from(exact_barrier_transmission(&i, &bar).transmission == 0.0);
    }
    let n = energies.len();
    Outcome {
        pass: literal_zero == literal_defined && exact_zero == n && literal_defined == n - 1,
        detail: format!(
            "literal exactly 0 at {literal_zero}/{literal_defined} in-regime energies \
             (E = V is outside its domain), exact exactly 0 at {exact_zero}/{n}"
        ),
    }
}

fn paper_claim() -> Outcome {
    let start = Instant::now();
    let bar = paper_barrier();
    let mut favourable = true;
    let mut checked = 0;
    let mut roots = Vec::new();
    let mut roots_ok = true;
    for (deg, expected) in [(30.0_f64, 7.2), (45.0, 6.0)] {
        let fine = (1..=2000).map(|k| expected * (1.0 - 1e-6) * k as f64 / 2000.0);
        let grid = reproduction_energies()
            .into_iter()
            .filter(|&e| e < expected);
        for e in grid.chain(fine) {
            let i = inc(e, deg);
            checked += 1;
            favourable &=
                t(ModelKind::AngularPaperLiteral, &i, &bar) > t(ModelKind::UsualThick, &i, &bar);
        }
        let root = find_crossover(
            ModelKind::AngularPaperLiteral,
            ModelKind::UsualThick,
            deg.to_radians(),
            &bar,
            electron(),
            (1.0, 12.0),
        );
        match root {
            Ok(r) => {
                roots_ok &= (r - expected).abs() <= 1e-5;
                roots.push(format!("{r:.6} eV at {deg} deg"));
            }
            Err(e) => {
                roots_ok = false;
                roots.push(format!("{e} at {deg} deg"));
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: favourable && roots_ok && within(elapsed, 1.0),
        detail: format!(
            "literal > usual at all {checked} sampled energies below the root: {favourable}; \
             crossovers {} ({:.3} s)",
            roots.join(", "),
            elapsed.as_secs_f64()
        ),
    }
}

fn coefficient_audit() -> Outcome {
    let grid = ValidationGrid {
        energies: EnergyGrid::new(1.0, 12.0, 111).unwrap(),
        angles: vec![0.0, 30.0, 45.0, 60.0, 90.0],
        integrator: IntegratorConfig::default(),
    };
    let report = validate_models(&paper_barrier(), electron(), &grid).unwrap();
    let literal = Source::Model(ModelKind::AngularPaperLiteral);
    let beta = Source::Model(ModelKind::AngularPaperBeta);
    let pair = report.pair(literal, beta).unwrap();
    let i = inc(3.0, 45.0);
    let tl = t(ModelKind::AngularPaperLiteral, &i, &paper_barrier());
    let tb = t(ModelKind::AngularPaperBeta, &i, &paper_barrier());
    let gap = (tl - tb) / tb;
    let at = pair
        .max_rel_at
        .map(|(e, a)| format!("{e:.1} eV, {a} deg"))
        .unwrap_or_default();
    Outcome {
        pass: pair.max_rel > 0.0 && gap >= 0.2,
        detail: format!(
            "literal vs beta: max relative gap {:.4} at {at} over {} points; \
             at (3 eV, 45 deg) {tl:.6} vs {tb:.6}, gap {gap:.6}",
            pair.max_rel, pair.rel_samples
        ),
    }
}

fn random_single_barrier(rng: &mut ChaCha8Rng, regime: usize) -> (IncidenceSpec, BarrierSpec) {
    let v = rng.gen_range(0.5..40.0);
    let theta = rng.gen_range(0.0..89.0_f64).to_radians();
    let c2 = theta.cos().powi(2);
    let e = match regime {
        0 => v / c2 * rng.gen_range(0.02..0.98),
        1 => v / c2 * rng.gen_range(1.02..3.0),
        _ => v / c2,
    };
    let a = rng.gen_range(0.01..1.5);
    (inc_rad(e, theta), BarrierSpec::new(v, a).unwrap())
}

fn oracle_chain(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut tm_worst: f64 = 0.0;
    let mut regimes = [0usize; 3];
    for n in 0..1000 {
        let (i, bar) = random_single_barrier(rng, n % 3);
        let exact = exact_barrier_transmission(&i, &bar);
        regimes[match exact.regime.tag() {
            "evanescent" => 0,
            "propagating" => 1,
            _ => 2,
        }] += 1;
        let tm = solve_profile(&PotentialProfile::single_barrier(&bar), &i)
            .unwrap()
            .result
            .transmission;
        tm_worst = tm_worst.max((tm - exact.transmission).abs());
    }

    let bar = paper_barrier();
    let profile = PotentialProfile::single_barrier(&bar);
    let cfg = IntegratorConfig::default();
    let mut ode_worst: f64 = 0.0;
    let energies = EnergyGrid::new(1.0, 20.0, 20).unwrap().energies();
    for deg in [0.0, 30.0, 45.0, 60.0] {
        for &e in &energies {
            let i = inc(e, deg);
            let ode = integrate_transmission(&profile, &i, &cfg)
                .unwrap()
                .transmission;
            let exact = exact_barrier_transmission(&i, &bar).transmission;
            let tm = solve_profile(&profile, &i).unwrap().result.transmission;
            ode_worst = ode_worst.max((ode - exact).abs()).max((ode - tm).abs());
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: tm_worst <= 1e-10
            && ode_worst <= 1e-6
            && regimes.iter().all(|&c| c > 0)
            && within(elapsed, 30.0),
        detail: format!(
            "exact vs transfer matrix {tm_worst:.2e} over 1000 barriers \
             (evanescent/propagating/critical = {}/{}/{}); ODE vs both {ode_worst:.2e} \
             on 20x4 grid ({:.2} s)",
            regimes[0],
            regimes[1],
            regimes[2],
            elapsed.as_secs_f64()
        ),
    }
}

fn flux_conservation(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let n = rng.gen_range(0..=5);
        let segments = (0..n)
            .map(|_| Segment {
                potential: rng.gen_range(-5.0..25.0),
                width: rng.gen_range(0.005..0.5),
            })
            .collect();
        let profile = PotentialProfile::new(segments).unwrap();
        let i = inc(rng.gen_range(0.1..40.0), rng.gen_range(0.0..89.0));
        let r = solve_profile(&profile, &i).unwrap().result;
        worst = worst.max((r.transmission + r.reflection.unwrap() - 1.0).abs());
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-12 && within(elapsed, 5.0),
        detail: format!(
            "max |T + R - 1| = {worst:.2e} over 10000 profiles of 0-5 segments ({:.2} s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn thick_asymptotics(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for _ in 0..1000 {
        let v = rng.gen_range(0.5..40.0);
        let theta = rng.gen_range(0.0..89.0_f64).to_radians();
        let e = v / theta.cos().powi(2) * rng.gen_range(0.01..0.99);
        let probe = inc_rad(e, theta);
        let kappa = tunneling_core::physics::kinematics(&probe, &BarrierSpec::new(v, 1.0).unwrap())
            .kappa_eff
            .unwrap();
        let a = rng.gen_range(3.0..20.0) / kappa;
        let bar = BarrierSpec::new(v, a).unwrap();
        let ratio = t(ModelKind::AngularConsistentThick, &probe, &bar)
            / exact_barrier_transmission(&probe, &bar).transmission;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let (mut ulo, mut uhi) = (f64::INFINITY, 0.0_f64);
    for _ in 0..1000 {
        let v = rng.gen_range(0.5..40.0);
        let e = v * rng.gen_range(0.01..0.99);
        let k = tunneling_core::physics::decay_constant(e, v, 1.0).unwrap();
        let a = rng.gen_range(3.0..20.0) / k;
        let bar = BarrierSpec::new(v, a).unwrap();
        let i = inc(e, 0.0);
        let ratio =
            t(ModelKind::UsualThick, &i, &bar) / exact_barrier_transmission(&i, &bar).transmission;
        ulo = ulo.min(ratio);
        uhi = uhi.max(ratio);
    }
    Outcome {
        pass: (0.99..=1.01).contains(&lo)
            && (0.99..=1.01).contains(&hi)
            && (0.95..=1.05).contains(&ulo)
            && (0.95..=1.05).contains(&uhi),
        detail: format!(
            "consistent/exact in [{lo:.5}, {hi:.5}] for kappa_eff*a >= 3; \
             usual/exact at 0 deg in [{ulo:.5}, {uhi:.5}] for K*a >= 3 (1000 draws each)"
        ),
    }
}

fn derived_point_values() -> Outcome {
    let bar = paper_barrier();
    let profile = PotentialProfile::single_barrier(&bar);
    let cfg = IntegratorConfig::default();
    let normal = inc(6.0, 0.0);
    let oblique = inc(3.0, 45.0);
    let usual = t(ModelKind::UsualThick, &normal, &bar);
    let exact6 = t(ModelKind::ExactClosedForm, &normal, &bar);
    let literal = t(ModelKind::AngularPaperLiteral, &oblique, &bar);
    let exact3 = t(ModelKind::ExactClosedForm, &oblique, &bar);
    let ode6 = integrate_transmission(&profile, &normal, &cfg)
        .unwrap()
        .transmission;
    let ode3 = integrate_transmission(&profile, &oblique, &cfg)
        .unwrap()
        .transmission;

    let checks = [
        ("usual(6, 0)", usual, 0.043669),
        ("exact(6, 0)", exact6, 0.042710),
        ("literal(3, 45)", literal, 0.023722),
        ("exact(3, 45)", exact3, 0.004444),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, got, want) in checks {
        let off = (got - want).abs();
        pass &= off <= 1e-5;
        parts.push(format!("{name} = {got:.7} vs {want} (off by {off:.2e})"));
    }
    let oracle_ok = (ode6 - exact6).abs() < 1e-6 && (ode3 - exact3).abs() < 1e-6;
    pass &= oracle_ok;
    Outcome {
        pass,
        detail: format!(
            "{}; ODE oracle reproduces exact at both points: {oracle_ok}",
            parts.join(", ")
        ),
    }
}

fn cli_determinism() -> Outcome {
    let config =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/paper_reproduction.toml");
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| -> Option<Vec<u8>> {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_tunneling"))
            .arg("sweep")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--threads", threads])
            .output()
            .ok()?
            .status;
        status.success().then(|| fs::read(&out).ok()).flatten()
    };
    let runs = [run("a.csv", "4"), run("b.csv", "4"), run("c.csv", "1")];
    let all_ok = runs.iter().all(Option::is_some);
    let identical = all_ok && runs[0] == runs[1] && runs[0] == runs[2];
    let bytes = runs[0].as_ref().map_or(0, Vec::len);
    Outcome {
        pass: identical,
        detail: format!(
            "shipped config: two runs on 4 threads and one on 1 thread byte-identical: \
             {identical} ({bytes} bytes)"
        ),
    }
}

fn main() -> ExitCode {
    // keep the audit table in sync with the models this gate exercises
    assert_eq!(VALIDATION_SOURCES.len(), 8);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let criteria: Vec<(u32, &str, Outcome)> = vec![
        (
            1,
            "normal-incidence reduction",
            normal_incidence_reduction(&mut rng),
        ),
        (2, "grazing limit", grazing_limit()),
        (3, "crossover reproduction", paper_claim()),
        (4, "coefficient audit", coefficient_audit()),
        (5, "oracle chain", oracle_chain(&mut rng)),
        (6, "flux conservation", flux_conservation(&mut rng)),
        (7, "thick-barrier asymptotics", thick_asymptotics(&mut rng)),
        (8, "derived point values", derived_point_values()),
        (9, "CLI determinism", cli_determinism()),
    ];

    let mut unexpected = Vec::new();
    for (n, name, outcome) in &criteria {
        let known = KNOWN_FAILURES.contains(n);
        let tag = match (outcome.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{tag} {n}. {name}: {}", outcome.detail);
        if !outcome.pass && !known {
            unexpected.push(*n);
        }
    }
    let passed = criteria.iter().filter(|c| c.2.pass).count();
    println!("{passed}/{} criteria pass", criteria.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
