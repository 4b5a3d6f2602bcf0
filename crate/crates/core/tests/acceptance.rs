//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion
//! with the measured numbers and exits nonzero if any criterion fails.

use std::fs;
use std::panic;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use vortex_align::bessel::bessel_j;
use vortex_align::channel::{delta, simulate_measurement, ChannelModel, MeasurementPlan, NoiseSpec};
use vortex_align::correction::phase_mask;
use vortex_align::estimator::{estimate, select_antennas, EstimationConfig};
use vortex_align::geometry::{RxPose, Scenario, UcaGeometry};
use vortex_align::harness::{run, Config, ExperimentKind, ExperimentOutput, ExperimentSpec, Overrides};
use vortex_align::phase::wrap_pi;

const LINK: &str = r#"{
    "scenario": {
        "tx": {"n": 202, "radius_m": 0.04},
        "rx": {"n": 20, "radius_m": 0.008},
        "distance_m": 0.4,
        "carrier_hz": 120e9,
        "subcarriers": {"start_hz": 119.5e9, "step_hz": 10e6, "count": 71}
    }
}"#;

const WIDE_APERTURE: &str = r#"{
    "scenario": {
        "tx": {"n": 160, "radius_m": 0.03},
        "rx": {"n": 160, "radius_m": 0.03},
        "distance_m": 100.0,
        "carrier_hz": 120e9
    },
    "imi": {"modes": [-2, -1, 0, 1, 2], "tilt_deg": 10.0},
    "validation": {
        "rings": [
            {"n": 120, "radius_m": 0.02},
            {"n": 160, "radius_m": 0.03},
            {"n": 200, "radius_m": 0.04}
        ],
        "modes": [-2, -1, 0, 1, 2],
        "poses": [
            {"theta_deg": 0.0, "phi_deg": 0.0},
            {"theta_deg": 17.9, "phi_deg": -34.2}
        ]
    }
}"#;

fn config_with(base: &str, patch: serde_json::Value) -> Config {
    let mut doc: serde_json::Value = serde_json::from_str(base).unwrap();
    merge(&mut doc, patch);
    Config::from_json(&doc.to_string()).unwrap()
}

fn merge(into: &mut serde_json::Value, patch: serde_json::Value) {
    match (into, patch) {
        (serde_json::Value::Object(a), serde_json::Value::Object(b)) => {
            for (k, v) in b {
                merge(a.entry(k).or_insert(serde_json::Value::Null), v);
            }
        }
        (slot, v) => *slot = v,
    }
}

fn run_kind(kind: ExperimentKind, config: Config, overrides: Overrides) -> (ExperimentSpec, ExperimentOutput) {
    let spec = ExperimentSpec::new(kind, config, &overrides).unwrap();
    let out = run(&spec).unwrap();
    (spec, out)
}

fn report(n: u32, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {n}: {verdict} {detail}");
}

fn within(start: Instant, limit_s: u64) -> (bool, f64) {
    let e = start.elapsed();
    (e <= Duration::from_secs(limit_s), e.as_secs_f64())
}

fn num(v: &serde_json::Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or(f64::NAN)
}

/// Evenly spread (θ, φ) targets in degrees.
fn angle_poses(n: usize, theta: (f64, f64), phi: (f64, f64)) -> serde_json::Value {
    let poses: Vec<_> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            // a coprime stride decorrelates φ from θ
            let s = ((i * 7) % n) as f64 / (n - 1) as f64;
            serde_json::json!({
                "theta_deg": theta.0 + t * (theta.1 - theta.0),
                "phi_deg": phi.0 + s * (phi.1 - phi.0),
            })
        })
        .collect();
    serde_json::Value::Array(poses)
}

fn max_errors(out: &ExperimentOutput) -> (f64, f64, usize) {
    let failures = out.rows.iter().filter(|r| r.error.is_some()).count();
    let t = out.rows.iter().filter_map(|r| r.theta_err_deg).fold(0.0, f64::max);
    let p = out.rows.iter().filter_map(|r| r.phi_err_deg).fold(0.0, f64::max);
    (t, p, failures)
}

fn criterion_1_farfield_model_matches_exact_summation() -> bool {
    let start = Instant::now();
    let (_, out) = run_kind(
        ExperimentKind::ValidateModel,
        Config::from_json(WIDE_APERTURE).unwrap(),
        Overrides::default(),
    );
    let min = out.summary_f64("min_correlation").unwrap();
    let rows = out.table("correlation").unwrap().rows.len();
    let (fast, secs) = within(start, 30);
    let pass = min > 0.99 && rows == 3 * 2 * 5 && fast;
    report(
        1,
        pass,
        format!("min correlation {min:.8} over {rows} ring/pose/mode cases (> 0.99), {secs:.1} s"),
    );
    pass
}

fn criterion_2_noiseless_farfield_recovery() -> bool {
    let start = Instant::now();
    let config = config_with(
        LINK,
        serde_json::json!({
            "scenario": {"distance_m": 2.0},
            "poses": angle_poses(15, (5.0, 70.0), (-180.0, -90.0)),
            "estimation": {"modes": [-1, 1], "q": 6, "p": 1},
            "noise": {"snr_db": null}
        }),
    );
    let overrides = Overrides {
        trials: Some(1),
        model: Some(ChannelModel::FarField),
        ..Overrides::default()
    };
    let (_, out) = run_kind(ExperimentKind::AngleSweep, config, overrides);
    let (t, p, failures) = max_errors(&out);
    let (fast, secs) = within(start, 120);
    let pass = out.rows.len() == 15 && failures == 0 && t < 0.1 && p < 0.1 && fast;
    report(
        2,
        pass,
        format!("max error theta {t:.2e} deg, phi {p:.2e} deg over 15 poses (< 0.1), {secs:.1} s"),
    );
    pass
}

fn criterion_3_accuracy_band_at_default_snr() -> bool {
    let start = Instant::now();
    let (spec, out) = run_kind(
        ExperimentKind::AngleSweep,
        Config::from_json(LINK).unwrap(),
        Overrides::default(),
    );
    let t = out.summary_f64("mae_theta_deg").unwrap();
    let p = out.summary_f64("mae_phi_deg").unwrap();
    let (fast, secs) = within(start, 600);
    let pass = spec.trials == 50 && (0.5..=8.0).contains(&t) && (0.1..=3.0).contains(&p) && fast;
    report(
        3,
        pass,
        format!(
            "MAE theta {t:.3} deg in [0.5, 8], phi {p:.3} deg in [0.1, 3] at {} dB, {} poses x {} trials, {secs:.1} s",
            spec.snr_db.unwrap(),
            spec.poses.len(),
            spec.trials
        ),
    );
    pass
}

fn criterion_4_correction_restores_orthogonality() -> bool {
    let start = Instant::now();
    let (_, out) = run_kind(
        ExperimentKind::ImiDemo,
        Config::from_json(WIDE_APERTURE).unwrap(),
        Overrides::default(),
    );
    let aligned = out.summary_f64("min_aligned_dominance_db").unwrap();
    let diag_dev = out.summary_f64("max_corrected_diagonal_deviation_db").unwrap();
    let share_dev = out.summary_f64("max_corrected_share_deviation_db").unwrap();
    let degradation = out.summary_f64("max_diagonal_degradation_db").unwrap();
    let (fast, secs) = within(start, 60);
    let pass = aligned >= 30.0 && diag_dev <= 3.0 && share_dev <= 3.0 && degradation >= 10.0 && fast;
    report(
        4,
        pass,
        format!(
            "corrected diagonal within {diag_dev:.3} dB, share within {share_dev:.3} dB of aligned (<= 3); \
             uncorrected drop {degradation:.2} dB (>= 10); aligned dominance {aligned:.1} dB, {secs:.1} s"
        ),
    );
    pass
}

fn criteria_5_and_6_sir_and_capacity_gain() -> bool {
    let start = Instant::now();
    let (_, out) = run_kind(
        ExperimentKind::Ccdf,
        Config::from_json(LINK).unwrap(),
        Overrides::default(),
    );
    let est = out.summary_f64("mean_sir_gain_db").unwrap();
    let truth = out.summary_f64("mean_sir_gain_true_db").unwrap();
    let ratio = out.summary_f64("mean_capacity_ratio").unwrap();
    let (fast, secs) = within(start, 600);
    let pass5 = est >= 10.0 && truth >= 12.0 && fast;
    let pass6 = ratio >= 4.0 && fast;
    report(
        5,
        pass5,
        format!("mean SIR gain {est:.2} dB estimated (>= 10), {truth:.2} dB true angles (>= 12), {secs:.1} s"),
    );
    report(6, pass6, format!("mean capacity ratio {ratio:.2} (>= 4)"));
    pass5 && pass6
}

/// Checks that each curve is non-increasing within one standard error of
/// the difference between neighbouring points.
fn non_increasing(points: &[serde_json::Value], mae: &str, se: &str) -> bool {
    points.windows(2).all(|w| {
        let tol = num(&w[0], se).hypot(num(&w[1], se));
        num(&w[1], mae) <= num(&w[0], mae) + tol
    })
}

fn sweep_line(points: &[serde_json::Value], label: &str) -> String {
    points
        .iter()
        .map(|p| {
            format!(
                "{label}={}: {:.2}/{:.2}",
                p[label],
                num(p, "mae_theta_deg"),
                num(p, "mae_phi_deg")
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn criterion_7_more_subcarriers_lower_error() -> bool {
    let start = Instant::now();
    let config = config_with(LINK, serde_json::json!({"sweep": {"p_values": [1, 4, 16, 64]}}));
    let overrides = Overrides {
        trials: Some(200),
        snr_db: Some(10.0),
        ..Overrides::default()
    };
    let (_, out) = run_kind(ExperimentKind::SubcarrierSweep, config, overrides);
    let points = out.summary["sweep"].as_array().unwrap().clone();
    let (first, last) = (&points[0], &points[points.len() - 1]);
    let strict = ["mae_theta_deg", "mae_phi_deg"]
        .iter()
        .all(|k| num(last, k) < num(first, k));
    let monotone = non_increasing(&points, "mae_theta_deg", "se_theta_deg")
        && non_increasing(&points, "mae_phi_deg", "se_phi_deg");
    let (fast, secs) = within(start, 600);
    let pass = points.len() == 4 && strict && monotone && fast;
    report(
        7,
        pass,
        format!(
            "MAE theta/phi deg at 10 dB: {}; P=64 < P=1: {strict}, non-increasing within 1 SE: {monotone}, {secs:.1} s",
            sweep_line(&points, "p")
        ),
    );
    pass
}

fn criterion_8_antenna_gains_saturate() -> bool {
    let start = Instant::now();
    let config = config_with(LINK, serde_json::json!({"sweep": {"q_values": [3, 6, 12]}}));
    let overrides = Overrides {
        trials: Some(200),
        ..Overrides::default()
    };
    let (_, out) = run_kind(ExperimentKind::AntennaSweep, config, overrides);
    let points = out.summary["sweep"].as_array().unwrap().clone();
    let mut pass = points.len() == 3;
    for (mae, se) in [("mae_theta_deg", "se_theta_deg"), ("mae_phi_deg", "se_phi_deg")] {
        let (q3, q6, q12) = (num(&points[0], mae), num(&points[1], mae), num(&points[2], mae));
        pass &= q12 <= q3 - num(&points[0], se).hypot(num(&points[2], se));
        pass &= q3 - q6 > q6 - q12;
    }
    let (fast, secs) = within(start, 600);
    pass &= fast;
    report(
        8,
        pass,
        format!(
            "MAE theta/phi deg: {}; Q=12 below Q=3 by more than 1 SE and 3->6 gain exceeds 6->12 gain, {secs:.1} s",
            sweep_line(&points, "q")
        ),
    );
    pass
}

fn bessel_parity() -> bool {
    (-9..=9).all(|l: i32| {
        [0.0, 0.3, 1.7, 5.0, 12.5, 40.0].iter().all(|&x| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            (bessel_j(-l, x) - sign * bessel_j(l, x)).abs() <= 1e-14
        })
    })
}

fn delta_trivial_cases() -> bool {
    let mut ok = true;
    for &phi in &[-3.0, -1.2, 0.0, 0.4, 2.9] {
        for &phi_m in &[0.0, 0.7, 3.1, 5.5] {
            ok &= (wrap_pi(delta(0.0, phi, phi_m) - wrap_pi(phi - phi_m))).abs() < 1e-12;
            for &theta in &[0.0, 0.3, 1.2] {
                ok &= delta(theta, phi_m, phi_m).abs() < 1e-15;
            }
        }
    }
    ok
}

fn mask_zero_at_boresight() -> bool {
    let rx = UcaGeometry::new(20, 0.008).unwrap();
    [-2.0, 0.0, 1.3].iter().all(|&phi| {
        phase_mask(0.0, phi, vortex_align::wavenumber(120e9), &rx)
            .phases
            .iter()
            .all(|p| p.abs() < 1e-15)
    })
}

fn link_scenario(model_distance: f64, tones: Vec<f64>) -> Scenario {
    let tx = UcaGeometry::new(202, 0.04).unwrap();
    let rx = UcaGeometry::new(20, 0.008).unwrap();
    let pose = RxPose::from_angles(model_distance, 35f64.to_radians(), -130f64.to_radians()).unwrap();
    Scenario::new(tx, rx, pose, 120e9, tones, Complex64::new(1.0, 0.0)).unwrap()
}

fn scale_invariance() -> bool {
    let s = link_scenario(0.4, vec![120e9]);
    let plan = MeasurementPlan {
        modes: vec![-1, 1],
        subcarriers: vec![0],
        antennas: None,
    };
    let tensor = simulate_measurement(&s, &plan, &NoiseSpec::snr_db(25.0, 11), ChannelModel::Exact).unwrap();
    let config = EstimationConfig::new(vec![-1, 1], select_antennas(20, 6).unwrap(), vec![0]);
    let a = estimate(&tensor, &s.rx, &config).unwrap();
    [
        Complex64::new(3.7, -2.2),
        Complex64::new(-1e-6, 0.0),
        Complex64::from_polar(1e4, 2.0),
    ]
    .iter()
    .all(|&c| {
        let b = estimate(&tensor.scaled(c), &s.rx, &config).unwrap();
        (a.theta - b.theta).abs() < 1e-9 && wrap_pi(a.phi - b.phi).abs() < 1e-9
    })
}

fn frequency_invariance() -> bool {
    let tones: Vec<f64> = (0..71).map(|i| 119.5e9 + 10e6 * i as f64).collect();
    let s = link_scenario(2.0, tones);
    let plan = MeasurementPlan {
        modes: vec![-2, -1, 1, 2],
        subcarriers: (0..71).collect(),
        antennas: None,
    };
    let tensor = simulate_measurement(&s, &plan, &NoiseSpec::noiseless(), ChannelModel::FarField).unwrap();
    let mut worst: f64 = 0.0;
    for m in 0..s.rx.n_elements() {
        for (li, lj) in [(1, -1), (2, -2), (2, 1), (-1, -2)] {
            let doubled = |k| {
                let z = tensor.get(m, li, k).unwrap() * tensor.get(m, lj, k).unwrap().conj();
                (z * z).arg()
            };
            let reference = doubled(0);
            for k in 1..71 {
                worst = worst.max(wrap_pi(doubled(k) - reference).abs());
            }
        }
    }
    worst < 1e-9
}

fn file_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> bool {
    let overrides = Overrides {
        trials: Some(4),
        seed: Some(2024),
        ..Overrides::default()
    };
    let mut dirs = Vec::new();
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let (spec, out) = run_kind(
            ExperimentKind::Ccdf,
            Config::from_json(LINK).unwrap(),
            overrides.clone(),
        );
        let dir = tempfile::tempdir().unwrap();
        out.write(&spec, dir.path()).unwrap();
        outputs.push(file_bytes(dir.path()));
        dirs.push(dir);
    }
    !outputs[0].is_empty() && outputs[0] == outputs[1]
}

fn criterion_9_property_suites() -> bool {
    let start = Instant::now();
    let checks = [
        ("bessel parity", bessel_parity()),
        ("delta trivial cases", delta_trivial_cases()),
        ("mask zero at theta=0", mask_zero_at_boresight()),
        ("scale invariance", scale_invariance()),
        ("frequency invariance 1e-9 rad", frequency_invariance()),
        ("determinism", determinism()),
    ];
    let (fast, secs) = within(start, 60);
    let pass = checks.iter().all(|c| c.1) && fast;
    let detail: Vec<String> = checks
        .iter()
        .map(|(n, ok)| format!("{n} {}", if *ok { "ok" } else { "FAILED" }))
        .collect();
    report(9, pass, format!("{}, {secs:.1} s", detail.join("; ")));
    pass
}

fn criterion_10_near_field_robustness() -> bool {
    let start = Instant::now();
    let config = config_with(
        LINK,
        serde_json::json!({
            "poses": angle_poses(8, (10.0, 45.0), (-180.0, -90.0)),
            "noise": {"snr_db": null}
        }),
    );
    let overrides = Overrides {
        trials: Some(1),
        model: Some(ChannelModel::Exact),
        ..Overrides::default()
    };
    let (_, out) = run_kind(ExperimentKind::AngleSweep, config, overrides);
    let (t, p, failures) = max_errors(&out);
    let (fast, secs) = within(start, 120);
    let pass = failures == 0 && t < 2.0 && p < 2.0 && fast;
    report(
        10,
        pass,
        format!("exact model at 0.4 m: max error theta {t:.3} deg, phi {p:.3} deg over 8 poses (< 2), {secs:.1} s"),
    );
    pass
}

type Check = (&'static str, fn() -> bool);

fn main() -> ExitCode {
    let checks: [Check; 9] = [
        ("1", criterion_1_farfield_model_matches_exact_summation),
        ("2", criterion_2_noiseless_farfield_recovery),
        ("3", criterion_3_accuracy_band_at_default_snr),
        ("4", criterion_4_correction_restores_orthogonality),
        ("5 and 6", criteria_5_and_6_sir_and_capacity_gain),
        ("7", criterion_7_more_subcarriers_lower_error),
        ("8", criterion_8_antenna_gains_saturate),
        ("9", criterion_9_property_suites),
        ("10", criterion_10_near_field_robustness),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match panic::catch_unwind(check) {
            Ok(true) => {}
            Ok(false) => failed += 1,
            Err(_) => {
                println!("criterion {name}: FAIL (panicked)");
                failed += 1;
            }
        }
    }
    println!(
        "acceptance: {} of {} checks passed",
        checks.len() - failed,
        checks.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
