//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p yawrate-core --test acceptance -- --nocapture` to
//! see the report. Criteria 7-9 train a full-size model (several minutes).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use yawrate_core::cnp::{backward, gaussian_nll, Checkpoint, CnpConfig, CnpModel, NormStats};
use yawrate_core::eval::{
    run_friction_experiment, run_mass_experiment, run_scenario_experiment, run_vehicle_experiment, EvalConfig,
    EvalReport, Predictor, AVG,
};
use yawrate_core::meta::{generate_meta, load_meta, save_meta};
use yawrate_core::sim::{
    scenario_catalog, simulate_with, CatalogSet, Integrator, SimOptions, DEFAULT_DT, TRAINING_FRICTIONS,
};
use yawrate_core::train::{train, TrainConfig};
use yawrate_core::vehicle::{
    cornering_stiffness, dst_axle_forces, dst_derivative, kst_derivative, kst_yaw_rate, longitudinal_slip,
    pacejka_combined, slip_angles, tire_contact_velocities, vertical_forces, ControlInput, ModelKind,
    StateDerivative, VehicleParams, VehicleState,
};

const SEED: u64 = 42;
const TRAIN_STEPS: usize = 20_000;
const TRAIN_EVAL_EVERY: usize = 2_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// `|a - b| <= tol * scale`, where `scale` is the magnitude of the quantity
/// (at least `|b|`).
fn close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * scale.max(b.abs()).max(f64::MIN_POSITIVE)
}

fn random_params(rng: &mut ChaCha8Rng) -> VehicleParams {
    let l_f = rng.random_range(0.8..1.8);
    let l_r = rng.random_range(0.8..1.8);
    VehicleParams {
        m: rng.random_range(800.0..2500.0),
        i_z: rng.random_range(1000.0..4000.0),
        l_f,
        l_r,
        l_wb: l_f + l_r,
        h_cg: rng.random_range(0.3..0.8),
        c_sf: rng.random_range(8.0..25.0),
        c_sr: rng.random_range(8.0..25.0),
        mu: rng.random_range(0.05..1.2),
        r_w: rng.random_range(0.28..0.38),
        ..VehicleParams::default()
    }
}

// ---------------------------------------------------------------- criterion 1

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 7];
    let mut ok = true;
    let mut track = |i: usize, a: f64, b: f64, tol: f64, scale: f64| {
        let rel = (a - b).abs() / scale.max(b.abs()).max(f64::MIN_POSITIVE);
        worst[i] = worst[i].max(rel);
        ok &= close(a, b, tol, scale);
    };
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let v: f64 = rng.random_range(1.0..60.0);
        let beta: f64 = rng.random_range(-0.3..0.3);
        let psi_dot = rng.random_range(-1.0..1.0);
        let delta: f64 = rng.random_range(-0.5..0.5);
        let a_long = rng.random_range(-6.0..4.0);

        // kinematic yaw rate
        let oracle = v * delta.sin() / (delta.cos() * (p.l_f + p.l_r));
        track(0, kst_yaw_rate(v, delta, p.l_wb), oracle, 1e-12, 0.0);

        // cornering stiffness
        let f_z = rng.random_range(1000.0..10000.0);
        let oracle = p.c_sf * f_z * p.mu;
        track(1, cornering_stiffness(p.mu, p.c_sf, f_z), oracle, 1e-12, 0.0);

        // axle loads with load transfer
        let (f_zf, f_zr) = vertical_forces(&p, a_long).unwrap();
        let l = p.l_f + p.l_r;
        track(2, f_zf, p.m * p.g * p.l_r / l - p.m * a_long * p.h_cg / l, 1e-12, p.m * p.g);
        track(2, f_zr, p.m * p.g * p.l_f / l + p.m * a_long * p.h_cg / l, 1e-12, p.m * p.g);

        // lateral slip angles
        let (af, ar) = slip_angles(v, beta, psi_dot, delta, &p).unwrap();
        let lead_f = (v * beta.sin() + p.l_f * psi_dot).atan2(v * beta.cos());
        let lead_r = (v * beta.sin() - p.l_r * psi_dot).atan2(v * beta.cos());
        track(3, af, lead_f - delta, 1e-12, lead_f.abs() + delta.abs());
        track(3, ar, lead_r, 1e-12, 0.0);

        // longitudinal slip in its unclamped range
        let u_w = rng.random_range(1.0..60.0);
        let omega = u_w / p.r_w * rng.random_range(0.6..1.4);
        let oracle = (u_w - p.r_w * omega) / u_w;
        track(4, longitudinal_slip(omega, u_w, p.r_w).unwrap(), oracle, 1e-12, 1.0);

        // contact-patch velocities
        let (u_wf, u_wr) = tire_contact_velocities(v, beta, psi_dot, delta, &p);
        let vx = v * beta.cos();
        let vy = v * beta.sin() + p.l_f * psi_dot;
        let oracle_f = vx * delta.cos() + vy * delta.sin();
        track(5, u_wf, oracle_f, 1e-12, vx.abs() + vy.abs());
        track(5, u_wr, vx, 1e-12, 0.0);

        // dynamic yaw acceleration against its axle-force expansion
        let state = VehicleState { psi_dot, v, beta, delta, ..VehicleState::default() };
        let u = ControlInput::new(delta, a_long);
        let d = dst_derivative(&state, &u, &p).unwrap();
        let (f_f, f_r) = dst_axle_forces(&state, &u, &p).unwrap();
        let c_f = p.mu * p.c_sf * f_zf;
        let c_r = p.mu * p.c_sr * f_zr;
        let f_f_oracle = c_f * (delta - beta - p.l_f * psi_dot / v);
        let f_r_oracle = c_r * (p.l_r * psi_dot / v - beta);
        track(6, f_f, f_f_oracle, 1e-9, 0.0);
        track(6, f_r, f_r_oracle, 1e-9, 0.0);
        let moment = p.l_f * f_f_oracle - p.l_r * f_r_oracle;
        let scale = (p.l_f * f_f_oracle).abs() + (p.l_r * f_r_oracle).abs();
        track(6, d.psi_ddot * p.i_z, moment, 1e-9, scale);
    }
    let elapsed = start.elapsed();
    let ok = ok && elapsed < Duration::from_secs(5);
    outcome(
        ok,
        format!(
            "1000 draws; worst rel err yaw {:.1e} stiffness {:.1e} loads {:.1e} slip-angle {:.1e} slip {:.1e} \
             contact-vel {:.1e} (tol 1e-12), yaw-moment {:.1e} (tol 1e-9); {:.2?} (< 5 s)",
            worst[0], worst[1], worst[2], worst[3], worst[4], worst[5], worst[6], elapsed
        ),
    )
}

// ---------------------------------------------------------------- criterion 2

fn yaw_channels(d: &StateDerivative) -> [f64; 4] {
    [d.psi_dot, d.psi_ddot, d.beta_dot, d.delta_dot]
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut load_err = 0.0f64;
    let mut odd_err = 0.0f64;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let a_long = rng.random_range(-6.0..4.0);
        let (f_zf, f_zr) = vertical_forces(&p, a_long).unwrap();
        load_err = load_err.max(((f_zf + f_zr) - p.m * p.g).abs() / (p.m * p.g));

        let state = VehicleState {
            psi_dot: rng.random_range(-1.0..1.0),
            v: rng.random_range(1.0..60.0),
            beta: rng.random_range(-0.3..0.3),
            delta: rng.random_range(-0.5..0.5),
            ..VehicleState::default()
        };
        let cmd = rng.random_range(-0.5..0.5);
        let mirrored = VehicleState {
            psi_dot: -state.psi_dot,
            beta: -state.beta,
            delta: -state.delta,
            ..state
        };
        let u = ControlInput::new(cmd, a_long);
        let um = ControlInput::new(-cmd, a_long);
        let pairs = [
            (kst_derivative(&state, &u, &p), kst_derivative(&mirrored, &um, &p)),
            (dst_derivative(&state, &u, &p).unwrap(), dst_derivative(&mirrored, &um, &p).unwrap()),
        ];
        for (a, b) in pairs {
            for (x, y) in yaw_channels(&a).iter().zip(yaw_channels(&b)) {
                odd_err = odd_err.max((x + y).abs() / x.abs().max(1.0));
            }
            odd_err = odd_err.max((a.v_dot - b.v_dot).abs());
        }
    }

    let p = VehicleParams::bundled("default").unwrap();
    let mut ellipse = 0.0f64;
    for i in 0..100 {
        for j in 0..100 {
            let s = -1.5 + 3.0 * i as f64 / 99.0;
            let alpha = -0.8 + 1.6 * j as f64 / 99.0;
            for (f_z, mu) in [(4000.0, 1.0), (6500.0, 0.5), (3000.0, 0.1)] {
                let c = &p.pacejka;
                let (fx, fy) = pacejka_combined(s, alpha, f_z, mu, &c.longitudinal, &c.lateral_front);
                ellipse = ellipse.max(fx.hypot(fy) / (mu * f_z));
            }
        }
    }
    let pass = load_err <= 1e-6 && odd_err <= 1e-12 && ellipse <= 1.0 + 1e-12;
    outcome(
        pass,
        format!(
            "load sum rel err {load_err:.1e} (tol 1e-6); KST/DST odd-symmetry err {odd_err:.1e} (tol 1e-12); \
             max |F|/(mu F_z) on 100x100 grid {ellipse:.12} (<= 1)"
        ),
    )
}

// ---------------------------------------------------------------- criterion 3

type Task = (Vec<[f64; 3]>, Vec<f64>, Vec<[f64; 3]>, Vec<f64>);

fn synthetic_task(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Task {
    let mut x = || [rng.random_range(-0.1..0.1), rng.random_range(5.0..30.0), rng.random_range(-2.0..2.0)];
    let xs: Vec<_> = (0..n).map(|_| x()).collect();
    let ts: Vec<_> = (0..m).map(|_| x()).collect();
    let f = |x: &[f64; 3]| x[1] * x[0].tan() / 2.6;
    let ys = xs.iter().map(f).collect();
    let yt = ts.iter().map(f).collect();
    (xs, ys, ts, yt)
}

fn miniature(seed: u64) -> CnpModel {
    let mut m = CnpModel::new(&CnpConfig::miniature(), seed);
    m.norm = NormStats {
        mean: [0.0, 17.0, 0.0, 0.1],
        std: [0.06, 7.0, 1.2, 0.3],
    };
    // nonzero biases keep pre-activations off the ReLU kinks
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31) + 5);
    for net in [&mut m.feature_encoder, &mut m.context_encoder, &mut m.decoder] {
        for layer in &mut net.layers {
            layer.b.mapv_inplace(|_| rng.random_range(-0.2..0.2));
        }
    }
    m
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let h = 1e-5;
    let mut checked = 0;
    let mut bad = Vec::new();
    for seed in [11, 12, 13] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = miniature(seed);
        assert_eq!(model.d_e, 4);
        let t = synthetic_task(&mut rng, 8, 6);
        let loss = |m: &CnpModel| gaussian_nll(&m.predict(&t.0, &t.1, &t.2).unwrap(), &t.3).unwrap();
        let (_, grads) = backward(&model, &t.0, &t.1, &t.2, &t.3).unwrap();
        let analytic: Vec<f64> = grads.param_slices().concat();
        let mut probe = model.clone();
        let mut k = 0;
        for s in 0..model.param_slices().len() {
            for i in 0..model.param_slices()[s].len() {
                let orig = model.param_slices()[s][i];
                probe.param_slices_mut()[s][i] = orig + h;
                let up = loss(&probe);
                probe.param_slices_mut()[s][i] = orig - h;
                let down = loss(&probe);
                probe.param_slices_mut()[s][i] = orig;
                let fd = (up - down) / (2.0 * h);
                let a = analytic[k];
                let diff = (fd - a).abs();
                if !(diff <= 1e-7 || diff <= 1e-4 * fd.abs().max(a.abs())) {
                    bad.push(format!("seed {seed} param {k}: fd {fd:e} vs {a:e}"));
                }
                k += 1;
            }
        }
        checked += k;
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed < Duration::from_secs(30),
        format!(
            "{checked} parameters over 3 seeds, {} outside 1e-4 rel / 1e-7 abs{}; {elapsed:.2?} (< 30 s)",
            bad.len(),
            bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut model = CnpModel::new(&CnpConfig::default(), 4);
    model.norm = NormStats {
        mean: [0.0, 17.0, 0.0, 0.1],
        std: [0.06, 7.0, 1.2, 0.3],
    };
    let t = synthetic_task(&mut rng, 200, 50);
    let reference = model.predict(&t.0, &t.1, &t.2).unwrap();
    let mut order: Vec<usize> = (0..t.0.len()).collect();
    let mut identical = 0;
    for _ in 0..100 {
        order.shuffle(&mut rng);
        let xs: Vec<_> = order.iter().map(|&i| t.0[i]).collect();
        let ys: Vec<_> = order.iter().map(|&i| t.1[i]).collect();
        let p = model.predict(&xs, &ys, &t.2).unwrap();
        let same = p
            .iter()
            .zip(&reference)
            .all(|(a, b)| a.mu.to_bits() == b.mu.to_bits() && a.sigma2.to_bits() == b.sigma2.to_bits());
        identical += usize::from(same);
    }
    let mut sizes_ok = true;
    for n in [1, 10, 100, 1000, 10_000] {
        let c = synthetic_task(&mut rng, n, 5);
        sizes_ok &= model
            .predict(&c.0, &c.1, &c.2)
            .is_ok_and(|p| p.len() == 5 && p.iter().all(|g| g.mu.is_finite() && g.sigma2 > 0.0));
    }
    outcome(
        identical == 100 && sizes_ok,
        format!("{identical}/100 shuffles bit-identical; context sizes 1..10000 accepted: {sizes_ok}"),
    )
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5() -> Outcome {
    let catalog = scenario_catalog(SEED);
    let template = catalog
        .templates(CatalogSet::Training)
        .iter()
        .find(|t| t.id == "lat_step_steer_mid")
        .expect("lateral template");
    let base = template.instantiate(65.0, 1.0, 0.0, 0.02);
    let p = VehicleParams::bundled("default").unwrap();
    let run = |dt: f64, integrator: Integrator| {
        let opts = SimOptions { integrator, ..SimOptions::default() };
        simulate_with(ModelKind::Std, &base.with_dt(dt), &p, &opts).unwrap()
    };
    let coarse = 0.02;
    let reference = run(coarse / 16.0, Integrator::Rk4);
    let error = |dt: f64| {
        let ts = run(dt, Integrator::Euler);
        // compare on the coarse grid shared by every run
        let stride = (coarse / dt).round() as usize;
        (0..)
            .take_while(|k| k * stride < ts.len() && k * 16 < reference.len())
            .map(|k| (ts.psi_dot[k * stride] - reference.psi_dot[k * 16]).abs())
            .fold(0.0f64, f64::max)
    };
    let e: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&dt| error(dt)).collect();
    let o1 = (e[0] / e[1]).log2();
    let o2 = (e[1] / e[2]).log2();
    outcome(
        o1.min(o2) >= 0.9,
        format!(
            "max yaw-rate error vs RK4 (dt 0.00125): {:.3e} / {:.3e} / {:.3e} at dt 0.02/0.01/0.005; \
             orders {o1:.3}, {o2:.3} (>= 0.9)",
            e[0], e[1], e[2]
        ),
    )
}

// ---------------------------------------------------------- criteria 6 to 9

struct Trained {
    model: CnpModel,
    train_time: Duration,
    steps: usize,
    best_step: u64,
    best_val: f64,
}

fn train_default_vehicle() -> Trained {
    let catalog = scenario_catalog(SEED);
    let vehicle = VehicleParams::bundled("default").unwrap();
    let start = Instant::now();
    let scenarios = catalog.instances(CatalogSet::Training, &TRAINING_FRICTIONS, 0.0, DEFAULT_DT);
    let (meta, failures) = generate_meta(&scenarios, &vehicle, &SimOptions::default(), SEED);
    assert!(failures.is_empty(), "generation failures: {failures:?}");
    let cfg = TrainConfig {
        max_steps: TRAIN_STEPS,
        eval_every: TRAIN_EVAL_EVERY,
        seed: SEED,
        ..TrainConfig::default()
    };
    let out = train(&meta, &cfg).unwrap();
    Trained {
        model: out.checkpoint.model,
        train_time: start.elapsed(),
        steps: out.steps,
        best_step: out.checkpoint.step,
        best_val: out.checkpoint.best_val_nll,
    }
}

struct Reports {
    friction: EvalReport,
    mass: EvalReport,
    scenario: EvalReport,
    vehicle: EvalReport,
    eval_time: Duration,
}

fn evaluate(model: &CnpModel) -> Reports {
    let catalog = scenario_catalog(SEED);
    let vehicle = VehicleParams::bundled("default").unwrap();
    let cfg = EvalConfig::default();
    let start = Instant::now();
    let friction = run_friction_experiment(model, &vehicle, &catalog, &cfg).unwrap();
    let mass = run_mass_experiment(model, &vehicle, &catalog, &cfg).unwrap();
    let scenario = run_scenario_experiment(model, &vehicle, &catalog, &cfg).unwrap();
    let vehicle = run_vehicle_experiment(model, &VehicleParams::all_bundled(), &catalog, &cfg).unwrap();
    Reports {
        friction,
        mass,
        scenario,
        vehicle,
        eval_time: start.elapsed(),
    }
}

fn criterion_6(r: &Reports) -> Outcome {
    let mut worst = 0.0f64;
    let mut runs = 0;
    let mut missing = 0;
    for report in [&r.friction, &r.mass, &r.scenario, &r.vehicle] {
        for run in &report.runs {
            match run.rmse[Predictor::StdIdeal.index()] {
                Some(e) => worst = worst.max(e),
                None => missing += 1,
            }
            runs += 1;
        }
    }
    outcome(
        missing == 0 && worst < 1e-6,
        format!("{runs} runs over all four experiments, {missing} without a value; max STD(mu) RMSE {worst:.3e} (< 1e-6)"),
    )
}

fn criterion_7(r: &Reports, t: &Trained) -> Outcome {
    let f = &r.friction;
    let cell = |p: Predictor, c: &str| f.cell(p, "", c).unwrap_or(f64::NAN);
    let conds = ["0.75", "0.35", "0.1"];
    let cnp: Vec<f64> = conds.iter().map(|c| cell(Predictor::Cnp, c)).collect();
    let ratio = cnp.iter().cloned().fold(f64::MIN, f64::max) / cnp.iter().cloned().fold(f64::MAX, f64::min);
    let kst_ratio = cell(Predictor::Kst, "0.1") / cell(Predictor::Kst, "0.75");
    let (cnp_avg, kst_avg, dst_avg) = (cell(Predictor::Cnp, AVG), cell(Predictor::Kst, AVG), cell(Predictor::Dst, AVG));
    let a = ratio <= 2.0;
    let b = kst_ratio >= 2.0;
    let c = cnp_avg < kst_avg && cnp_avg < dst_avg;
    let budget = t.train_time <= Duration::from_secs(30 * 60) && r.eval_time <= Duration::from_secs(5 * 60);
    outcome(
        a && b && c && budget,
        format!(
            "(a) CNP {:.4}/{:.4}/{:.4}, max/min {ratio:.3} (<= 2): {a}; (b) KST 0.1 vs 0.75 ratio {kst_ratio:.3} (>= 2): {b}; \
             (c) avg CNP {cnp_avg:.4} < KST {kst_avg:.4}, DST {dst_avg:.4}: {c}; train {:.0?} for {} steps (best val NLL {:.4} \
             at {}), eval {:.1?}",
            cnp[0], cnp[1], cnp[2], t.train_time, t.steps, t.best_val, t.best_step, r.eval_time
        ),
    )
}

fn criterion_8(r: &Reports) -> Outcome {
    let v = &r.vehicle;
    let unseen = ["small_car", "suv", "van", "sports_car"];
    let all_finite = v
        .rows
        .iter()
        .filter(|row| row.predictor == Predictor::Cnp.label(false))
        .all(|row| row.rmse.is_finite());
    let mut wins = 0;
    let mut parts = Vec::new();
    for id in unseen {
        let get = |p: Predictor| v.cell(p, id, AVG).unwrap_or(f64::NAN);
        let (cnp, kst, dst) = (get(Predictor::Cnp), get(Predictor::Kst), get(Predictor::Dst));
        let win = cnp < kst && cnp < dst;
        wins += usize::from(win);
        parts.push(format!("{id} CNP {cnp:.4} KST {kst:.4} DST {dst:.4}"));
    }
    outcome(
        all_finite && wins >= 3,
        format!("CNP finite everywhere: {all_finite}; beats KST and DST on {wins}/4 (>= 3): {}", parts.join("; ")),
    )
}

fn criterion_9(r: &Reports) -> Outcome {
    let (mut inside, mut total) = (0usize, 0usize);
    for report in [&r.friction, &r.mass, &r.scenario, &r.vehicle] {
        for run in &report.runs {
            inside += run.inside_2sigma;
            total += run.targets;
        }
    }
    let coverage = inside as f64 / total as f64;
    outcome(
        (0.80..=0.99).contains(&coverage),
        format!("{inside}/{total} held-out targets inside +-2 sigma: coverage {coverage:.4} (in [0.80, 0.99])"),
    )
}

// --------------------------------------------------------------- criterion 10

fn read_tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

/// generate -> train -> eval into `root`, through files at every stage.
fn pipeline(root: &Path) {
    let catalog = scenario_catalog(SEED);
    let vehicle = VehicleParams::bundled("default").unwrap();
    let scenarios = catalog.instances(CatalogSet::Training, &TRAINING_FRICTIONS, 0.0, DEFAULT_DT);
    let (meta, _) = generate_meta(&scenarios, &vehicle, &SimOptions::default(), SEED);
    let manifest = save_meta(&meta, &root.join("data")).unwrap();
    let meta = load_meta(&manifest).unwrap();
    let cfg = TrainConfig {
        max_steps: 200,
        eval_every: 100,
        seed: SEED,
        ..TrainConfig::default()
    };
    let ckpt = root.join("model.ckpt");
    train(&meta, &cfg).unwrap().checkpoint.save(&ckpt).unwrap();
    let model = Checkpoint::load(&ckpt).unwrap().model;
    let cfg = EvalConfig::default();
    let reports = root.join("reports");
    run_friction_experiment(&model, &vehicle, &catalog, &cfg).unwrap().write(&reports).unwrap();
    run_scenario_experiment(&model, &vehicle, &catalog, &cfg).unwrap().write(&reports).unwrap();
    run_vehicle_experiment(&model, &VehicleParams::all_bundled(), &catalog, &cfg)
        .unwrap()
        .write(&reports)
        .unwrap();
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    pipeline(&a);
    pipeline(&b);
    let (ta, tb) = (read_tree(&a), read_tree(&b));
    let reports = ta.iter().filter(|(p, _)| p.starts_with("reports")).count();
    outcome(
        ta == tb && reports > 0,
        format!("{} files ({reports} report files) byte-identical across two runs: {}", ta.len(), ta == tb),
    )
}

// ------------------------------------------------------------------- driver

#[test]
fn acceptance_criteria() {
    let mut results: Vec<(usize, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4()),
        (5, criterion_5()),
    ];
    let trained = train_default_vehicle();
    let reports = evaluate(&trained.model);
    for line in [reports.friction.to_table(), reports.vehicle.to_table()] {
        println!("{line}");
    }
    results.push((6, criterion_6(&reports)));
    results.push((7, criterion_7(&reports, &trained)));
    results.push((8, criterion_8(&reports)));
    results.push((9, criterion_9(&reports)));
    results.push((10, criterion_10()));

    for (n, o) in &results {
        println!("criterion {n:>2}: {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<usize> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
