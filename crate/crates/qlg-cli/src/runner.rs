//! Experiment execution and file output: manifests, CSV series, kernel
//! tables, the gate-algebra residual report, and state snapshots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use serde::Serialize;
use serde_json::json;

use qlg::engine::{many_body_step, StateVector};
use qlg::evolution::{
    build_collide, grid_dispersion, m_grid, observables, p_grid, CollideParams, Stepper,
};
use qlg::experiments::{
    profile_l2_deviation, projective_l2_error, random_normalized_field, HarmonicExperiment,
    SplitMix64, SquareWellExperiment,
};
use qlg::gates::{
    chiral_collide_gate, chiral_collide_gate_from_ladder, chiral_collide_generator,
    conservative_gate, gate_hamiltonian, jw_ladder, rotate_bloch, rotate_bloch_su2, Branch,
    GateFamily, GateSpec,
};
use qlg::kernel::{
    count_paths, enumerate_kernel, enumerate_kernel_summed, enumerate_path_count, transfer_kernel,
    transfer_kernel_summed, PathProblem, Spin,
};
use qlg::numerics::{DenseMat, Mat4, SpinorField, C64};
use qlg::snapshot::write_snapshot;

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Free {
        grid: usize,
        steps: u64,
        mass: f64,
        gamma: f64,
    },
    SquareWell {
        grid: usize,
        steps: u64,
        well_sites: usize,
        inner_mass: f64,
        barrier_mass: f64,
    },
    Harmonic {
        grid: usize,
        steps: u64,
        mass: f64,
        kappa: f64,
        level: usize,
    },
    Kernel {
        n_steps: usize,
        magnetization: i64,
        mass: f64,
    },
    GatesSelftest,
    ManyBody {
        sites: usize,
        steps: u64,
        mass: f64,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub record_every: u64,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct DispersionConfig {
    pub mass: f64,
    pub ell: f64,
    pub tau: f64,
    pub samples: usize,
    pub out: PathBuf,
}

/// 17 significant digits, locale independent.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn profile_hash(profile: &[f64]) -> String {
    let mut bytes = Vec::with_capacity(profile.len() * 8);
    for v in profile {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    format!("{:016x}", fnv1a64(&bytes))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct Manifest {
    tool: String,
    version: String,
    experiment: String,
    config: serde_json::Value,
    derived: serde_json::Value,
    outputs: Vec<String>,
}

fn write_manifest(out: &Path, manifest: &Manifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    write_file(&out.join("manifest.json"), &(text + "\n"))
}

fn record_times(steps: u64, every: u64) -> Vec<u64> {
    let mut times: Vec<u64> = (0..=steps).filter(|t| t % every == 0).collect();
    if times.last() != Some(&steps) {
        times.push(steps);
    }
    times
}

fn timeseries_csv(records: &[(u64, SpinorField)]) -> String {
    let mut text = String::from("t,site,density,flux0,re_up,im_up,re_down,im_down\n");
    for (t, field) in records {
        let obs = observables(field);
        for (site, s) in field.sites().iter().enumerate() {
            let _ = writeln!(
                text,
                "{t},{site},{},{},{},{},{},{}",
                fmt(obs.density[site]),
                fmt(obs.flux0[site]),
                fmt(s.up.re),
                fmt(s.up.im),
                fmt(s.down.re),
                fmt(s.down.im),
            );
        }
    }
    text
}

fn error_series_csv(rows: &[(u64, f64)]) -> String {
    let mut text = String::from("t,l2_error_vs_analytic\n");
    for (t, err) in rows {
        let _ = writeln!(text, "{t},{}", fmt(*err));
    }
    text
}

pub fn run(config: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("creating output directory {}", config.out.display()))?;
    match &config.experiment {
        Experiment::Free {
            grid,
            steps,
            mass,
            gamma,
        } => run_free(config, *grid, *steps, *mass, *gamma),
        Experiment::SquareWell {
            grid,
            steps,
            well_sites,
            inner_mass,
            barrier_mass,
        } => run_square_well(
            config,
            *grid,
            *steps,
            *well_sites,
            *inner_mass,
            *barrier_mass,
        ),
        Experiment::Harmonic {
            grid,
            steps,
            mass,
            kappa,
            level,
        } => run_harmonic(config, *grid, *steps, *mass, *kappa, *level),
        Experiment::Kernel {
            n_steps,
            magnetization,
            mass,
        } => run_kernel(config, *n_steps, *magnetization, *mass),
        Experiment::GatesSelftest => run_gates_selftest(config),
        Experiment::ManyBody { sites, steps, mass } => run_many_body(config, *sites, *steps, *mass),
    }
}

fn run_free(config: &RunConfig, grid: usize, steps: u64, mass: f64, gamma: f64) -> Result<()> {
    let params = CollideParams::uniform(mass, gamma, 1.0, 1.0, grid)?;
    let stepper = Stepper::new(&params)?;
    let mut field = random_normalized_field(grid, 1.0, 1.0, config.seed)?;
    let times = record_times(steps, config.record_every);
    let mut records = vec![(0u64, field.clone())];
    let mut max_drift = 0.0f64;
    for t in 1..=steps {
        field = stepper.step(&field)?;
        max_drift = max_drift.max((field.l2_norm() - 1.0).abs());
        if times.contains(&t) {
            records.push((t, field.clone()));
        }
    }
    write_file(
        &config.out.join("timeseries.csv"),
        &timeseries_csv(&records),
    )?;
    write_manifest(
        &config.out,
        &Manifest {
            tool: "qlg".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment: "free".into(),
            config: json!({
                "grid": grid,
                "steps": steps,
                "mass": mass,
                "gamma": gamma,
                "ell": 1.0,
                "tau": 1.0,
                "record_every": config.record_every,
                "seed": config.seed,
            }),
            derived: json!({
                "eps": params.eps(0),
                "xi": params.xi(0),
                "max_norm_drift": max_drift,
                "mass_profile_hash": profile_hash(params.mass_profile()),
                "gamma_profile_hash": profile_hash(params.gamma_profile()),
            }),
            outputs: vec!["timeseries.csv".into()],
        },
    )
}

fn run_square_well(
    config: &RunConfig,
    grid: usize,
    steps: u64,
    well_sites: usize,
    inner_mass: f64,
    barrier_mass: f64,
) -> Result<()> {
    let experiment = SquareWellExperiment {
        grid,
        well_sites,
        inner_mass,
        barrier_mass,
    };
    let setup = experiment.build()?;
    let stepper = Stepper::new(&setup.params)?;
    let reference_obs = observables(&setup.field0);
    let peak = reference_obs.density.iter().cloned().fold(0.0, f64::max);
    let times = record_times(steps, config.record_every);
    let mut records = vec![(0u64, setup.field0.clone())];
    let mut errors = vec![(0u64, 0.0f64)];
    let mut max_density_dev = 0.0f64;
    let mut max_barrier_frac = 0.0f64;
    let mut field = setup.field0.clone();
    for t in 1..=steps {
        field = stepper.step_rotating(&field)?;
        let obs = observables(&field);
        max_density_dev =
            max_density_dev.max(profile_l2_deviation(&obs.density, &reference_obs.density));
        let barrier = obs
            .density
            .iter()
            .enumerate()
            .filter(|(j, _)| *j < setup.wall_lo || *j > setup.wall_hi)
            .map(|(_, d)| *d)
            .fold(0.0, f64::max);
        max_barrier_frac = max_barrier_frac.max(barrier / peak);
        if times.contains(&t) {
            records.push((t, field.clone()));
            errors.push((t, projective_l2_error(&field, &setup.field0)));
        }
    }
    write_file(
        &config.out.join("timeseries.csv"),
        &timeseries_csv(&records),
    )?;
    write_file(
        &config.out.join("error_series.csv"),
        &error_series_csv(&errors),
    )?;
    write_manifest(
        &config.out,
        &Manifest {
            tool: "qlg".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment: "square_well".into(),
            config: json!({
                "grid": grid,
                "steps": steps,
                "well_sites": well_sites,
                "inner_mass": inner_mass,
                "barrier_mass": barrier_mass,
                "ell": 1.0,
                "tau": 1.0,
                "record_every": config.record_every,
                "seed": config.seed,
            }),
            derived: json!({
                "solved_k": setup.k,
                "energy": setup.energy,
                "gamma_inner": setup.energy / inner_mass,
                "p_ratio": setup.spec.p_ratio(setup.k),
                "eps_inner": setup.params.eps(setup.wall_lo + 1),
                "eps_barrier": setup.params.eps(0),
                "wall_lo": setup.wall_lo,
                "wall_hi": setup.wall_hi,
                "mass_profile_hash": profile_hash(setup.params.mass_profile()),
                "gamma_profile_hash": profile_hash(setup.params.gamma_profile()),
                "max_density_deviation": max_density_dev,
                "max_barrier_density_fraction": max_barrier_frac,
            }),
            outputs: vec!["timeseries.csv".into(), "error_series.csv".into()],
        },
    )
}

fn run_harmonic(
    config: &RunConfig,
    grid: usize,
    steps: u64,
    mass: f64,
    kappa: f64,
    level: usize,
) -> Result<()> {
    let setup = HarmonicExperiment {
        grid,
        mass,
        kappa,
        level,
    }
    .build()?;
    let stepper = Stepper::new(&setup.params)?;
    let times = record_times(steps, config.record_every);
    let mut records = vec![(0u64, setup.field0.clone())];
    let mut errors = vec![(0u64, 0.0f64)];
    let mut min_error = f64::INFINITY;
    let mut min_error_t = 0u64;
    let mut field = setup.field0.clone();
    for t in 1..=steps {
        field = stepper.step_rotating(&field)?;
        if times.contains(&t) {
            let err = projective_l2_error(&field, &setup.reference);
            if err < min_error {
                min_error = err;
                min_error_t = t;
            }
            records.push((t, field.clone()));
            errors.push((t, err));
        }
    }
    write_file(
        &config.out.join("timeseries.csv"),
        &timeseries_csv(&records),
    )?;
    write_file(
        &config.out.join("error_series.csv"),
        &error_series_csv(&errors),
    )?;
    write_manifest(
        &config.out,
        &Manifest {
            tool: "qlg".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment: "harmonic".into(),
            config: json!({
                "grid": grid,
                "steps": steps,
                "mass": mass,
                "kappa": kappa,
                "level": level,
                "ell": 1.0,
                "tau": 1.0,
                "record_every": config.record_every,
                "seed": config.seed,
            }),
            derived: json!({
                "b": setup.spec.b(),
                "varsigma": setup.spec.varsigma(),
                "run_gamma": 1.0,
                "mass_profile_hash": profile_hash(setup.params.mass_profile()),
                "gamma_profile_hash": profile_hash(setup.params.gamma_profile()),
                "analytic_gamma_profile_hash": profile_hash(&setup.profile_gamma),
                "eps_center": setup.params.eps(grid / 2),
                "eps_edge": setup.params.eps(0),
                "min_l2_error": min_error,
                "min_l2_error_t": min_error_t,
            }),
            outputs: vec!["timeseries.csv".into(), "error_series.csv".into()],
        },
    )
}

fn spin_label(s: Spin) -> &'static str {
    match s {
        Spin::Up => "+1",
        Spin::Down => "-1",
    }
}

fn run_kernel(config: &RunConfig, n_steps: usize, magnetization: i64, mass: f64) -> Result<()> {
    let prob = PathProblem::new(n_steps, magnetization, mass, 1.0)?;
    let path_count = count_paths(&prob);
    let enumerated = enumerate_path_count(&prob)?;
    let mut text = String::from("s0,sN,re_enum,im_enum,re_transfer,im_transfer,abs_diff\n");
    let mut max_diff = 0.0f64;
    for s0 in Spin::BOTH {
        for sn in Spin::BOTH {
            let a = enumerate_kernel(&prob, s0, sn)?;
            let b = transfer_kernel(&prob, s0, sn)?;
            let diff = (a - b).norm();
            max_diff = max_diff.max(diff);
            let _ = writeln!(
                text,
                "{},{},{},{},{},{},{}",
                spin_label(s0),
                spin_label(sn),
                fmt(a.re),
                fmt(a.im),
                fmt(b.re),
                fmt(b.im),
                fmt(diff),
            );
        }
    }
    for sn in Spin::BOTH {
        let a = enumerate_kernel_summed(&prob, sn)?;
        let b = transfer_kernel_summed(&prob, sn)?;
        let diff = (a - b).norm();
        max_diff = max_diff.max(diff);
        let _ = writeln!(
            text,
            "sum,{},{},{},{},{},{}",
            spin_label(sn),
            fmt(a.re),
            fmt(a.im),
            fmt(b.re),
            fmt(b.im),
            fmt(diff),
        );
    }
    write_file(&config.out.join("kernel.csv"), &text)?;
    write_manifest(
        &config.out,
        &Manifest {
            tool: "qlg".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment: "kernel".into(),
            config: json!({
                "n_steps": n_steps,
                "magnetization": magnetization,
                "mass": mass,
                "tau": 1.0,
                "seed": config.seed,
            }),
            derived: json!({
                "path_count": path_count.to_string(),
                "enumerated_path_count": enumerated.to_string(),
                "eps": prob.eps(),
                "max_route_difference": max_diff,
            }),
            outputs: vec!["kernel.csv".into()],
        },
    )
}

fn run_many_body(config: &RunConfig, sites: usize, steps: u64, mass: f64) -> Result<()> {
    let params = CollideParams::uniform(mass, 1.0, 1.0, 1.0, sites)?;
    let field0 = random_normalized_field(sites, 1.0, 1.0, config.seed)?;
    let mut state = StateVector::from_one_body(&field0)?;
    let stepper = Stepper::new(&params)?;
    let times = record_times(steps, config.record_every);
    let mut reference = field0.clone();
    let mut records = vec![(0u64, field0)];
    let mut errors = vec![(0u64, 0.0f64)];
    let mut max_dev = 0.0f64;
    for t in 1..=steps {
        many_body_step(&mut state, &params)?;
        reference = stepper.step(&reference)?;
        if times.contains(&t) {
            let circuit = state.to_one_body(1.0, 1.0)?;
            let mut dev = 0.0f64;
            for (a, b) in circuit.sites().iter().zip(reference.sites()) {
                dev = dev.max((a.up - b.up).norm());
                dev = dev.max((a.down - b.down).norm());
            }
            max_dev = max_dev.max(dev);
            errors.push((t, dev));
            records.push((t, circuit));
        }
    }
    let snapshot_name = "state_final.qsv";
    write_snapshot(&config.out.join(snapshot_name), &state, sites as u32, steps)?;
    write_file(
        &config.out.join("timeseries.csv"),
        &timeseries_csv(&records),
    )?;
    write_file(
        &config.out.join("error_series.csv"),
        &error_series_csv(&errors),
    )?;
    write_manifest(
        &config.out,
        &Manifest {
            tool: "qlg".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment: "many_body".into(),
            config: json!({
                "sites": sites,
                "qubits": 2 * sites,
                "steps": steps,
                "mass": mass,
                "ell": 1.0,
                "tau": 1.0,
                "record_every": config.record_every,
                "seed": config.seed,
            }),
            derived: json!({
                "eps": params.eps(0),
                "final_norm": state.norm(),
                "final_total_number": state.total_number(),
                "max_cross_engine_deviation": max_dev,
                "mass_profile_hash": profile_hash(params.mass_profile()),
                "gamma_profile_hash": profile_hash(params.gamma_profile()),
            }),
            outputs: vec![
                "timeseries.csv".into(),
                "error_series.csv".into(),
                snapshot_name.into(),
            ],
        },
    )
}

fn run_gates_selftest(config: &RunConfig) -> Result<()> {
    let mut rng = SplitMix64::new(config.seed);
    let mut residuals = serde_json::Map::new();

    // anticommutation relations up to Q = 6
    let mut anti = 0.0f64;
    for q in [2usize, 4, 6] {
        let dim = 1 << q;
        for i in 1..=q {
            for j in 1..=q {
                let (ai, aid) = jw_ladder(i, q);
                let (aj, ajd) = jw_ladder(j, q);
                let want = if i == j {
                    DenseMat::identity(dim)
                } else {
                    DenseMat::zeros(dim)
                };
                anti = anti.max(ai.anticommutator(&ajd).max_abs_diff(&want));
                anti = anti.max(ai.anticommutator(&aj).max_abs());
                anti = anti.max(aid.anticommutator(&ajd).max_abs());
            }
        }
    }
    residuals.insert("anticommutators_q_le_6".into(), json!(anti));

    // swap family against closed forms at a random phase
    let xi = rng.in_range(0.0, std::f64::consts::TAU);
    let mut swaps = 0.0f64;
    for delta in [0u8, 1] {
        let gate = conservative_gate(&GateSpec::swap(xi, delta)?)?;
        let mut want = Mat4::identity();
        want.0[1][1] = C64::new(0.0, 0.0);
        want.0[2][2] = C64::new(0.0, 0.0);
        want.0[1][2] = C64::from_polar(1.0, -xi);
        want.0[2][1] = C64::from_polar(1.0, xi);
        want.0[3][3] = C64::new(1.0 - 2.0 * delta as f64, 0.0);
        swaps = swaps.max(gate.max_abs_diff(&want));
        let root = conservative_gate(&GateSpec::sqrt_swap(xi, delta)?)?;
        swaps = swaps.max(root.mul(&root).max_abs_diff(&gate));
        let aswap = conservative_gate(&GateSpec::aswap(xi, delta)?)?;
        let sqrt_aswap = conservative_gate(&GateSpec::sqrt_aswap(xi, delta)?)?;
        swaps = swaps.max(sqrt_aswap.mul(&sqrt_aswap).max_abs_diff(&aswap));
        swaps = swaps.max(aswap.unitarity_error());
        swaps = swaps.max(sqrt_aswap.unitarity_error());
    }
    residuals.insert("swap_family_forms".into(), json!(swaps));

    // gate family identities and inverse pairs on random couplings
    let mut family = 0.0f64;
    for _ in 0..25 {
        let angle = rng.in_range(-3.0, 3.0);
        let b = C64::from_polar(
            rng.in_range(0.01, 0.49),
            rng.in_range(0.0, std::f64::consts::TAU),
        );
        let spec = GateSpec::new(
            C64::new(0.0, angle),
            0.0,
            1,
            b,
            GateFamily::Idempotent,
            Branch::Plus,
        )?;
        let h = gate_hamiltonian(&spec)?;
        family = family.max(h.mul(&h).max_abs_diff(&h));
        let fwd = conservative_gate(&spec)?;
        let bwd = conservative_gate(&GateSpec::new(
            C64::new(0.0, -angle),
            0.0,
            1,
            b,
            GateFamily::Idempotent,
            Branch::Plus,
        )?)?;
        family = family.max(fwd.mul(&bwd).max_abs_diff(&Mat4::identity()));

        let b3 = C64::from_polar(
            rng.in_range(0.1, 0.99),
            rng.in_range(0.0, std::f64::consts::TAU),
        );
        let spec3 = GateSpec::new(
            C64::new(0.0, angle),
            0.0,
            0,
            b3,
            GateFamily::TriIdempotent,
            Branch::Plus,
        )?;
        let h3 = gate_hamiltonian(&spec3)?;
        family = family.max(h3.mul(&h3).mul(&h3).max_abs_diff(&h3));
    }
    residuals.insert("gate_family_identities".into(), json!(family));

    // SU(2) similarity vs Rodrigues rotation
    let mut rot = 0.0f64;
    for _ in 0..100 {
        let unit = |rng: &mut SplitMix64| {
            let v = [
                rng.in_range(-1.0, 1.0),
                rng.in_range(-1.0, 1.0),
                rng.in_range(-1.0, 1.0),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().max(1e-9);
            [v[0] / n, v[1] / n, v[2] / n]
        };
        let q = unit(&mut rng);
        let axis = unit(&mut rng);
        let angle = rng.in_range(-6.3, 6.3);
        let a = rotate_bloch(q, axis, angle)?;
        let b = rotate_bloch_su2(q, axis, angle)?;
        for i in 0..3 {
            rot = rot.max((a[i] - b[i]).abs());
        }
    }
    residuals.insert("rotation_su2_vs_rodrigues".into(), json!(rot));

    // chiral collide gate: dual construction and generator identity
    let mut chiral = 0.0f64;
    for _ in 0..25 {
        let m = rng.in_range(0.05, 0.95);
        let g = rng.in_range(1.0, 2.5);
        let ell = rng.in_range(0.1, 1.5) / g;
        let params = CollideParams::uniform(m, g, ell, 1.0f64.min(0.999 / m), 2)?;
        let direct = chiral_collide_gate(&params, 0)?;
        let ladder = chiral_collide_gate_from_ladder(&params, 0)?;
        chiral = chiral.max(direct.max_abs_diff(&ladder));
        chiral = chiral.max(direct.unitarity_error());
        let central = build_collide(&params, 0)?;
        chiral = chiral.max((direct.0[1][1] - central.0[0][0]).norm());
        chiral = chiral.max((direct.0[1][2] - central.0[0][1]).norm());
        let n = chiral_collide_generator(&params, 0)?;
        let n2 = n.mul(&n);
        chiral = chiral.max(n2.mul(&n).max_abs_diff(&n));
    }
    residuals.insert("chiral_gate_dual_construction".into(), json!(chiral));

    let worst = [anti, swaps, family, rot, chiral]
        .into_iter()
        .fold(0.0f64, f64::max);

    let tolerance = 1e-12;
    let passed = worst < tolerance;
    let report = json!({
        "seed": config.seed,
        "tolerance": tolerance,
        "pass": passed,
        "worst_residual": worst,
        "residuals": serde_json::Value::Object(residuals),
    });
    write_file(
        &config.out.join("report.json"),
        &(serde_json::to_string_pretty(&report)? + "\n"),
    )?;
    write_manifest(
        &config.out,
        &Manifest {
            tool: "qlg".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment: "gates_selftest".into(),
            config: json!({ "seed": config.seed }),
            derived: json!({ "pass": passed, "worst_residual": worst }),
            outputs: vec!["report.json".into()],
        },
    )?;
    ensure!(passed, "gate self test failed with residual {worst:e}");
    Ok(())
}

pub fn emit_dispersion_table(config: &DispersionConfig) -> Result<()> {
    ensure!(config.samples >= 2, "need at least 2 samples");
    ensure!(
        config.mass >= 0.0 && config.ell > 0.0 && config.tau > 0.0,
        "need mass >= 0 and positive grid scales"
    );
    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("creating output directory {}", config.out.display()))?;
    let mut text = String::from("k,p_grid,m_grid,E_grid,E_continuum\n");
    let k_max = std::f64::consts::PI / config.ell;
    for j in 0..config.samples {
        let k = k_max * j as f64 / (config.samples - 1) as f64;
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            fmt(k),
            fmt(p_grid(k, config.ell, config.tau)),
            fmt(m_grid(k, config.mass, config.ell)),
            fmt(grid_dispersion(k, config.mass, config.ell, config.tau)),
            fmt((k * k + config.mass * config.mass).sqrt()),
        );
    }
    write_file(&config.out.join("dispersion.csv"), &text)
}
