//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ptcd_core::adiabaticity::{adiabaticity_parameter, Pair};
use ptcd_core::counterdiabatic::{cd_exact, cd_general_form, cd_parallel_transport, CdMode};
use ptcd_core::metrics::bloch_trace_distance;
use ptcd_core::paths::{tracked_angle, ControlSchedule, Direction, PhaseRamp};
use ptcd_core::propagator::{evolve, evolve_with_cd, InitialState};
use ptcd_core::spectrum::{build_hamiltonian, chiral_checks, eigensystem, mixing_angle, SystemParams};
use ptcd_core::{Mat2, Vec2, C64};
use ptcd_experiments::config::ExperimentConfig;
use ptcd_experiments::runners;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fig3(direction: Direction, period: f64) -> ControlSchedule {
    ControlSchedule::cosine_loop(0.0, 30.0, direction.sign() * 10.0 * PI, period, 0.29).unwrap()
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let k = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[k].parse().unwrap()).collect()
}

fn summaries(path: &Path) -> Vec<serde_json::Value> {
    serde_json::from_str::<serde_json::Value>(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .as_array()
        .unwrap()
        .clone()
}

fn run_experiment(text: &str, out: &Path) {
    let settings = ExperimentConfig::parse(text).unwrap().resolve().unwrap();
    runners::run(&settings, out).unwrap();
}

fn eigenstructure() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut chiral = 0.0f64;
    let mut count = 0;
    while count < 1000 {
        let p = SystemParams::real(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0), rng.gen_range(0.0..1.0))
            .unwrap();
        if p.discriminant().norm() < 1e-3 {
            continue;
        }
        count += 1;
        let a = mixing_angle(&p, None).unwrap();
        let e = eigensystem(&p, &a).unwrap();
        let b = e.biorthogonality();
        let h = build_hamiltonian(&p);
        let residuals = [
            (b[0][0] - 1.0).norm(),
            (b[1][1] - 1.0).norm(),
            b[0][1].norm(),
            b[1][0].norm(),
            (e.right_plus.inner(&e.right_plus) - a.im.cosh()).norm(),
            (e.right_minus.inner(&e.right_minus) - a.im.cosh()).norm(),
            (e.right_minus.inner(&e.right_plus) - C64::new(0.0, a.im.sinh())).norm(),
            // characteristic polynomial λ² − tr(H)λ + det(H) = 0
            (e.lambda_plus * e.lambda_plus - h.trace() * e.lambda_plus + h.det()).norm()
                / (1.0 + e.lambda_plus.norm_sqr()),
            (h.apply(&e.right_minus) - e.right_minus * e.lambda_minus).norm() / (1.0 + e.lambda_minus.norm()),
        ];
        let c = chiral_checks(&p);
        let eig = c.eigen.unwrap();
        let chiral_res =
            [eig.exchange_plus, eig.exchange_minus, eig.energy_identity, eig.coupling_identity, eig.xi_eigen];
        worst = residuals.into_iter().chain(chiral_res).fold(worst, f64::max);
        chiral = chiral.max(c.anticommutation);
    }
    check(
        worst < 1e-10 && chiral < 1e-12,
        format!("1000 samples, worst identity residual {worst:.2e}, ΓH′Γ+H′ {chiral:.2e}"),
    )
}

fn transport() -> Outcome {
    let s = fig3(Direction::Clockwise, 0.2);
    let traj = evolve_with_cd(&s, CdMode::Full, InitialState::Minus, 1e-5, None).unwrap();
    let d = traj.trace_distances().unwrap().into_iter().fold(0.0, f64::max);
    check(d < 1e-6, format!("max_t D = {d:.2e} (cw loop, full drive, dt = 1e-5)"))
}

fn cd_oracle() -> Outcome {
    let cases = [
        fig3(Direction::Clockwise, 0.2),
        fig3(Direction::CounterClockwise, 0.2),
        fig3(Direction::Clockwise, 5.0),
        ControlSchedule::cosine_loop(0.007, 30.3, 0.7 * PI, 0.2, 0.413).unwrap(),
        ControlSchedule::cosine_loop(-1.0, 30.0, -10.0 * PI, 0.2, 0.21).unwrap(),
        ControlSchedule::apollonius(0.9733, 0.413, 0.2).unwrap(),
    ];
    let mut worst = 0.0f64;
    for s in &cases {
        let path = tracked_angle(s).unwrap();
        let exact = cd_exact(&path);
        let general = cd_general_form(s, &path).unwrap();
        for (e, g) in exact.samples.iter().zip(&general.samples) {
            worst = worst.max((e.full - g.full).frobenius() / (1.0 + e.full.frobenius()));
        }
    }
    check(worst < 1e-8, format!("max ‖exact − general‖/(1+‖H_CD‖) = {worst:.2e} over 6 loops"))
}

fn adiabaticity(dir: &Path) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for d in [Direction::Clockwise, Direction::CounterClockwise] {
        let s = fig3(d, 0.2);
        let r = adiabaticity_parameter(&tracked_angle(&s).unwrap(), Pair::PlusMinus).unwrap();
        let hit = r.breakdown_windows.iter().find(|&&(a, b)| a <= 0.1 && 0.1 <= b);
        ok &= hit.is_some();
        match hit {
            Some((a, b)) => notes.push(format!("{d} window t/T ∈ [{:.3}, {:.3}]", a / 0.2, b / 0.2)),
            None => notes.push(format!("{d} no window at t/T = 0.5")),
        }
    }
    run_experiment("experiment = \"adiabaticity_sweep\"\n[sweep]\nperiods = [0.02, 0.04, 5.0]\n", dir);
    let rows = read_csv(&dir.join("adiabaticity_sweep.csv"));
    let get = |t: f64, d: &str| -> f64 {
        rows.iter()
            .find(|r| (r[0].parse::<f64>().unwrap() - t).abs() < 1e-12 && &r[1] == d)
            .map(|r| r[2].parse().unwrap())
            .unwrap()
    };
    let (cw, ccw) = (get(5.0, "cw"), get(5.0, "ccw"));
    let asym = cw.max(ccw) / cw.min(ccw);
    ok &= asym >= 5.0;
    notes.push(format!("T=5 ratio {asym:.2}"));
    for d in ["cw", "ccw"] {
        let ratio = get(0.04, d) / get(0.02, d);
        ok &= (ratio - 0.5).abs() <= 0.05;
        notes.push(format!("{d} max a(0.04)/max a(0.02) = {ratio:.4}"));
    }
    check(ok, notes.join("; "))
}

fn encircling(dir: &Path) -> Outcome {
    run_experiment("experiment = \"encircle\"\n[integration]\ncd = \"none\"\n", &dir.join("none"));
    run_experiment("experiment = \"encircle\"\n[integration]\ncd = \"hermitian\"\n", &dir.join("hermitian"));
    let mut ok = true;
    let mut notes = Vec::new();
    for (mode, bound_ok) in [("none", (|d: f64| d > 0.3) as fn(f64) -> bool), ("hermitian", |d: f64| d < 0.05)] {
        for s in summaries(&dir.join(mode).join("summary.json")) {
            let d = s["Dbar"].as_f64().unwrap();
            ok &= bound_ok(d);
            notes.push(format!("{} {mode} D̄={d:.4}", s["direction"].as_str().unwrap()));
        }
    }
    check(ok && notes.len() == 4, notes.join(", "))
}

fn apollonius(dir: &Path) -> Outcome {
    let circle = ControlSchedule::apollonius(0.9733, 0.413, 0.2).unwrap();
    let path = tracked_angle(&circle).unwrap();
    let max_i = path.iter().map(|p| p.alpha_dot.im.abs()).fold(0.0, f64::max);
    let max_rate = path.iter().map(|p| p.alpha_dot.norm()).fold(0.0, f64::max);
    let mut ok = max_i < 1e-9 * max_rate;
    let mut notes = vec![format!("max|α̇_I|/max|α̇| = {:.1e}", max_i / max_rate)];

    run_experiment("experiment = \"apollonius_deviation\"\n", dir);
    let by_mode = |name: &str| {
        summaries(&dir.join(format!("summary_{name}.json")))
            .into_iter()
            .map(|s| (s["cdMode"].as_str().unwrap().to_string(), s["Dbar"].as_f64().unwrap()))
            .collect::<Vec<_>>()
    };
    let circ = by_mode("apollonius");
    let gap = circ[0].1 - circ[1].1;
    ok &= circ[0].0 == "hermitian" && circ[1].0 == "full" && gap < 1e-8;
    notes.push(format!("circle D̄_herm − D̄_full = {gap:.1e}"));

    let herm = dir.join("deviation_ellipse_hermitian.csv");
    let (t, d) = (column(&herm, "t"), column(&herm, "D"));
    let k = (0..d.len()).max_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
    let peak = t[k] / t.last().unwrap();
    ok &= (0.35..=0.65).contains(&peak);
    let full_max = column(&dir.join("deviation_ellipse_full.csv"), "D").into_iter().fold(0.0, f64::max);
    ok &= full_max < 1e-6;
    notes.push(format!("ellipse hermitian peak D={:.3} at t/T={peak:.3}, full max D={full_max:.1e}", d[k]));
    check(ok, notes.join("; "))
}

fn topology(dir: &Path) -> Outcome {
    run_experiment("experiment = \"topology_scan\"\n", dir);
    let kappa = 0.21;
    let rows = read_csv(&dir.join("topology_scan.csv"));
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for r in &rows {
        let j: f64 = r[0].parse().unwrap();
        let x: f64 = r[1].parse().unwrap();
        let expected = if j > kappa + 0.05 || j < -kappa - 0.05 {
            -1.0
        } else if j.abs() < kappa - 0.05 {
            1.0
        } else {
            continue;
        };
        checked += 1;
        let err = (x - expected).abs();
        worst = worst.max(if err.is_nan() { f64::INFINITY } else { err });
        if err.is_nan() || err >= 0.05 {
            bad.push(format!("jMin={j:.3} xT={x:.3}"));
        }
    }
    check(
        bad.is_empty() && checked > 0,
        format!(
            "{checked}/{} scan points outside ±0.05 of ±κ on their plateau, worst |ΔxT| {worst:.1e} {bad:?}",
            rows.len()
        ),
    )
}

fn torus(windings: f64) -> ControlSchedule {
    ControlSchedule::angle_sweep(0.4, windings * PI, 0.35, 0.0, 1.0, 0.3)
        .unwrap()
        .with_phase(PhaseRamp { phi0: 0.0, rate: 2.0 })
        .with_samples(4001)
        .unwrap()
}

fn dynamical_phase() -> Outcome {
    let double = cd_parallel_transport(&tracked_angle(&torus(2.0)).unwrap());
    let single = cd_parallel_transport(&tracked_angle(&torus(1.0)).unwrap());
    let d = double.berry_integral.iter().map(|b| b.norm()).fold(0.0, f64::max);
    let s = single.berry_integral.iter().map(|b| b.norm()).fold(f64::INFINITY, f64::min);
    check(d < 1e-8 && s > 1e-3, format!("two windings |∫⟨L|∂R⟩| = {d:.1e}, one winding {s:.3}"))
}

fn shift_and_convergence() -> Outcome {
    let s = fig3(Direction::Clockwise, 0.2);
    let base = |t: f64| Ok(build_hamiltonian(&s.params_at(t)?));
    let c = |t: f64| C64::new(2.0 * (5.0 * t).cos() - 1.0, 1.3 * (9.0 * t).sin() + 0.4);
    let shifted = |t: f64| base(t).map(|h: Mat2| h + Mat2::identity() * c(t));
    let init = Vec2::real(0.6, -0.8);
    let a = evolve(base, init, 0.2, 1e-5, None).unwrap();
    let b = evolve(shifted, init, 0.2, 1e-5, None).unwrap();
    let shift = a.pauli.iter().zip(&b.pauli).map(|(p, q)| bloch_trace_distance(*p, *q)).fold(0.0, f64::max);

    let smooth = ControlSchedule::cosine_loop(0.0, 5.0, 4.0, 1.0, 0.3).unwrap();
    let h = |t: f64| Ok(build_hamiltonian(&smooth.params_at(t)?));
    let end = |n: usize| *evolve(h, init, 1.0, 1.0 / n as f64, None).unwrap().states.last().unwrap();
    let exact = end(20_000);
    let ratio = (end(200) - exact).norm() / (end(400) - exact).norm();
    check(
        shift < 1e-10 && (12.0..=20.0).contains(&ratio),
        format!("shift max D = {shift:.1e}, RK4 halving ratio {ratio:.2}"),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().unwrap();
    let dir = |name: &str| tmp.path().join(name);
    let criteria: Vec<Criterion> = vec![
        ("eigenstructure identities", Box::new(eigenstructure)),
        ("transport exactness", Box::new(transport)),
        ("cd oracle equivalence", Box::new(cd_oracle)),
        ("adiabaticity breakdown", Box::new(move || adiabaticity(&dir("adiabaticity")))),
        ("encircling contrast", Box::new(move || encircling(&dir("encircle")))),
        ("apollonius hermiticity", Box::new(move || apollonius(&dir("apollonius")))),
        ("topology scan", Box::new(move || topology(&dir("topology")))),
        ("dynamical-phase cancellation", Box::new(dynamical_phase)),
        ("shift invariance and convergence", Box::new(shift_and_convergence)),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        match f() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
