//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p lgsim-core --test acceptance`.

use lgsim_core::measurement::{measure, standard_qubit_scheme, UpdateRule};
use lgsim_core::noise::{add_readout_noise, fid_curve, fit_gaussian_decay, ImperfectionModel};
use lgsim_core::nv::{
    assemble_lg, controlled_gate, fit_flip_probability, lg_run, odmr_spectrum, population_table,
    repeated_cg, run_inrm_experiment, CgVariant, DriveMode, FiniteDrive, InrmExperimentSpec,
    NuclearLevel, OdmrConfig, PopulationTable,
};
use lgsim_core::{
    analytic_correlators, classical_extrema, find_max_k3, k3_protocol, rotation_unitary,
    standard_qutrit_scheme, ComplexMatrix, CorrelatorSet, DensityMatrix, UnitaryOp, C64,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Check {
    label: String,
    pass: bool,
    detail: String,
}

impl Check {
    fn new(label: impl Into<String>, pass: bool, detail: String) -> Self {
        Self {
            label: label.into(),
            pass,
            detail,
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn criterion_1() -> Vec<Check> {
    let scheme = standard_qutrit_scheme(UpdateRule::VonNeumann);
    let (best, dt) = timed(|| find_max_k3(&scheme, 10_000).unwrap());
    let ok = (best.k3 - 1.756).abs() <= 1e-3
        && (0.41 * PI..=0.42 * PI).contains(&best.theta)
        && dt < Duration::from_secs(1);
    vec![Check::new(
        "1 ideal three-level maximum",
        ok,
        format!(
            "K3 = {:.6} (target 1.756 ± 0.001), θ* = {:.5}π, {:.0?} (< 1 s)",
            best.k3,
            best.theta / PI,
            dt
        ),
    )]
}

fn criterion_2() -> Vec<Check> {
    let qutrit = standard_qutrit_scheme(UpdateRule::Luders);
    let (best, dt) = timed(|| find_max_k3(&qutrit, 10_000).unwrap());
    let literal = Check::new(
        "2 Lüders bound (three-level system)",
        (best.k3 - 1.5).abs() <= 1e-6 && dt < Duration::from_secs(1),
        format!(
            "max K3 = {:.6} at θ = {:.5}π, target 1.5 ± 1e-6, {:.0?}; \
             bounded by 1.5 but not attained by spin-1 x-rotations",
            best.k3,
            best.theta / PI,
            dt
        ),
    );
    let qubit = standard_qubit_scheme(UpdateRule::Luders);
    let (best, dt) = timed(|| find_max_k3(&qubit, 10_000).unwrap());
    let two_level = Check::new(
        "2 Lüders bound (two-level system, supplementary)",
        (best.k3 - 1.5).abs() <= 1e-6 && dt < Duration::from_secs(1),
        format!(
            "max K3 = {:.9} at θ = {:.6}π (π/3 expected), {:.0?}",
            best.k3,
            best.theta / PI,
            dt
        ),
    );
    vec![literal, two_level]
}

fn criterion_3() -> Vec<Check> {
    let (rows, dt) = timed(|| {
        (3..=10)
            .map(|n| {
                let expected = if n % 2 == 1 {
                    (-(n as f64), n as f64 - 2.0)
                } else {
                    (-(n as f64 - 2.0), n as f64 - 2.0)
                };
                (n, classical_extrema(n).unwrap(), expected)
            })
            .collect::<Vec<_>>()
    });
    let bad: Vec<_> = rows.iter().filter(|(_, got, exp)| got != exp).collect();
    vec![Check::new(
        "3 macrorealist bounds",
        bad.is_empty() && dt < Duration::from_secs(5),
        format!("n = 3..10 exact, mismatches {bad:?}, {dt:.0?} (< 5 s)"),
    )]
}

fn criterion_4() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let scheme = standard_qutrit_scheme(UpdateRule::VonNeumann);
    let ideal = ImperfectionModel::ideal();
    let dev = |a: &CorrelatorSet, b: &CorrelatorSet| {
        [
            a.q2_mean - b.q2_mean,
            a.q2q3_mean - b.q2q3_mean,
            a.q3_mean - b.q3_mean,
            a.k3 - b.k3,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()))
    };
    let (mut worst_protocol, mut worst_nv) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let theta = PI * uniform(&mut rng);
        let a = analytic_correlators(theta);
        worst_protocol = worst_protocol.max(dev(&a, &k3_protocol(theta, &scheme).unwrap()));
        let columns = CgVariant::ALL.map(|variant| {
            run_inrm_experiment(&InrmExperimentSpec {
                theta,
                variant,
                imperfections: ideal,
                drive: DriveMode::Instantaneous,
            })
            .unwrap()
        });
        let table = PopulationTable::from_columns(columns).unwrap();
        worst_nv = worst_nv.max(dev(&a, &assemble_lg(&table).unwrap()));
    }
    vec![Check::new(
        "4 oracle equivalence",
        worst_protocol <= 1e-10 && worst_nv <= 1e-10,
        format!(
            "100 random θ: |analytic − density matrix| ≤ {worst_protocol:.1e}, \
             |analytic − NV populations| ≤ {worst_nv:.1e} (≤ 1e-10)"
        ),
    )]
}

fn criterion_5() -> Vec<Check> {
    let theta = 0.416 * PI;
    let imperfections = ImperfectionModel::nominal();
    let drive = FiniteDrive::default();
    let params = drive.pulse_params(theta).unwrap();
    let (report, dt) = timed(|| lg_run(theta, &imperfections, &DriveMode::FiniteDuration(drive)));
    let report = match report {
        Ok(r) => r,
        Err(e) => return vec![Check::new("5 noisy reproduction", false, format!("{e}"))],
    };
    let k3 = report.correlators.k3;
    let sigma_ok = (imperfections.sigma_detuning()
        * (2f64.sqrt() * PI * imperfections.t2_star.unwrap())
        - 1.0)
        .abs()
        < 1e-12;
    let duration_ok = (params.u_duration - 14.71e-6).abs() < 0.01e-6;
    let ok = (1.60..=1.66).contains(&k3)
        && k3 - 1.5 >= 0.1
        && sigma_ok
        && duration_ok
        && dt < Duration::from_secs(30);
    vec![Check::new(
        "5 noisy reproduction",
        ok,
        format!(
            "K3 = {k3:.4} (window [1.60, 1.66]; margin over 1.5 = {:.4}); \
             vs simulated 1.632: {:+.4}; vs measured 1.625 ± 0.022: {:+.2}σ; \
             U duration {:.3} μs, selective π-pulse {:.2} μs, {dt:.0?} (< 30 s)",
            k3 - 1.5,
            k3 - 1.632,
            (k3 - 1.625) / 0.022,
            params.u_duration * 1e6,
            params.cg_duration * 1e6,
        ),
    )]
}

fn criterion_6() -> Vec<Check> {
    let t2 = 62e-6;
    let delta_ref = 30e3;
    let model = ImperfectionModel {
        n_samples: 41,
        ..ImperfectionModel::nominal()
    };
    let grid: Vec<f64> = (0..20).map(|i| 150e-6 * i as f64 / 19.0).collect();
    let curve = fid_curve(&model, &grid, delta_ref).unwrap();
    let worst = curve
        .iter()
        .map(|&(t, p0)| {
            let closed = 0.5 * (1.0 + (-(t / t2).powi(2)).exp() * (2.0 * PI * delta_ref * t).cos());
            (p0 - closed).abs()
        })
        .fold(0.0f64, f64::max);
    let duality = Check::new(
        "6 σ–T2* duality (envelope)",
        worst <= 1e-6,
        format!("max |P0 − (1 + e^-(t/T2*)² cos 2πδt)/2| = {worst:.1e} at 20 points (≤ 1e-6)"),
    );

    let fit_grid: Vec<f64> = (0..50).map(|i| 150e-6 * i as f64 / 49.0).collect();
    let clean = fid_curve(&model, &fit_grid, delta_ref).unwrap();
    let mut errors = vec![];
    let mut sds = vec![];
    let mut failures = 0;
    for seed in 0..100 {
        let mut ys: Vec<f64> = clean.iter().map(|p| p.1).collect();
        add_readout_noise(&mut ys, 0.01, seed);
        let pts: Vec<(f64, f64)> = fit_grid.iter().copied().zip(ys).collect();
        match fit_gaussian_decay(&pts) {
            Ok(fit) => {
                errors.push(fit.t2_star / t2 - 1.0);
                sds.push(fit.t2_star_uncertainty / t2);
            }
            Err(_) => failures += 1,
        }
    }
    // The study statistic is the bias and RMS error over the seeds; with a
    // ~1% one-sigma error per fit, single seeds beyond 2% are expected.
    let n = errors.len().max(1) as f64;
    let bias = errors.iter().sum::<f64>() / n;
    let rms = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    let worst = errors.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let within = errors.iter().filter(|e| e.abs() <= 0.02).count();
    let mean_sd = sds.iter().sum::<f64>() / n;
    let fit = Check::new(
        "6 σ–T2* duality (fit)",
        failures == 0 && bias.abs() <= 0.02 && rms <= 0.02,
        format!(
            "100 seeds, 1% noise, 50 points: bias {bias:+.4}, RMS {rms:.4} (≤ 0.02); \
             {within}/100 seeds individually within 2%, worst {worst:.4}, \
             mean 1σ from Jacobian {mean_sd:.4}; {failures} failed fits"
        ),
    );
    vec![duality, fit]
}

fn criterion_7() -> Vec<Check> {
    let clean = repeated_cg(30, 0.995).unwrap();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for seed in 0..100 {
        let mut ys: Vec<f64> = clean.iter().map(|p| p.1).collect();
        add_readout_noise(&mut ys, 0.01, 1000 + seed);
        let pts: Vec<(usize, f64)> = clean.iter().map(|p| p.0).zip(ys).collect();
        match fit_flip_probability(&pts) {
            Ok(fit) => worst = worst.max((fit.p_hat - 0.995).abs()),
            Err(_) => failures += 1,
        }
    }
    let flip = Check::new(
        "7 flip probability from repeated gates",
        failures == 0 && worst <= 0.005,
        format!("100 seeds, 1% noise: worst |p̂ − 0.995| = {worst:.5} (≤ 0.005)"),
    );

    let cfg = OdmrConfig::default();
    let lines = NuclearLevel::ALL.map(|n| cfg.model.electron_line(n));
    let freqs: Vec<f64> = (0..=400)
        .map(|i| lines[0] - 2e6 + (lines[2] - lines[0] + 4e6) * i as f64 / 400.0)
        .collect();
    let spectra: Vec<Vec<(f64, f64)>> = [0.6, 0.8, 1.0]
        .iter()
        .map(|&p| odmr_spectrum(&cfg, Some(p), &freqs).unwrap())
        .collect();
    let gap = |a: &[(f64, f64)], b: &[(f64, f64)]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x.1 - y.1).abs())
            .fold(0.0f64, f64::max)
    };
    let gaps = [
        gap(&spectra[0], &spectra[1]),
        gap(&spectra[0], &spectra[2]),
        gap(&spectra[1], &spectra[2]),
    ];
    let odmr = Check::new(
        "7 ODMR distinguishability",
        gaps.iter().all(|&g| g >= 0.1),
        format!("max pointwise gaps (0.6/0.8, 0.6/1.0, 0.8/1.0) = {gaps:.3?} (≥ 0.1)"),
    );
    vec![flip, odmr]
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn density(dim: usize) -> impl Strategy<Value = DensityMatrix> {
    prop::collection::vec(complex(), dim * dim).prop_filter_map("zero matrix", move |v| {
        let a = ComplexMatrix::from_vec(dim, dim, v).ok()?;
        let m = &a * &a.adjoint();
        let tr = m.trace().re;
        (tr > 1e-6).then(|| DensityMatrix::new(m.scale_real(1.0 / tr)).ok())?
    })
}

fn criterion_8() -> Vec<Check> {
    let runner = || {
        TestRunner::new(Config {
            failure_persistence: None,
            ..Config::with_cases(1000)
        })
    };
    let mut results = vec![];
    let rule = prop_oneof![Just(UpdateRule::Luders), Just(UpdateRule::VonNeumann)];

    let r = runner().run(&(density(3), rule.clone()), |(rho, r)| {
        let total: f64 = measure(&rho, &standard_qutrit_scheme(r))
            .unwrap()
            .iter()
            .map(|b| b.probability)
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "total {total}");
        Ok(())
    });
    results.push(("branch normalization", r.map_err(|e| e.to_string())));

    let r = runner().run(
        &(density(6), 0.0f64..=1.0, 0usize..3, density(3), 0.0f64..PI),
        |(rho, p, k, rho3, theta)| {
            let gate = controlled_gate(NuclearLevel::ALL[k], p).unwrap();
            let out = gate.apply(&rho).unwrap();
            prop_assert!((out.trace() - 1.0).abs() < 1e-12);
            let evolved = lgsim_core::evolve(&rho3, &rotation_unitary(theta)).unwrap();
            prop_assert!((evolved.trace() - 1.0).abs() < 1e-12);
            Ok(())
        },
    );
    results.push(("trace preservation", r.map_err(|e| e.to_string())));

    let herm = prop::collection::vec(complex(), 36).prop_map(|v| {
        let a = ComplexMatrix::from_vec(6, 6, v).unwrap();
        (&a + &a.adjoint()).scale_real(0.5)
    });
    let r = runner().run(
        &(herm, -5.0f64..5.0, 0.0f64..(2.0 * PI)),
        |(h, t, theta)| {
            let u = UnitaryOp::from_hamiltonian(&h, t).unwrap();
            prop_assert!(u.unitarity_deviation() < 1e-10);
            let v = UnitaryOp::new(rotation_unitary(theta).matrix().clone());
            prop_assert!(v.is_ok());
            Ok(())
        },
    );
    results.push(("unitarity", r.map_err(|e| e.to_string())));

    let r = runner().run(&(0.0f64..PI, rule), |(theta, r)| {
        let c = k3_protocol(theta, &standard_qutrit_scheme(r)).unwrap();
        prop_assert!(c.sum_residual() < 1e-14);
        prop_assert!((c.k3 - (c.q2_mean + c.q2q3_mean - c.q3_mean)).abs() < 1e-14);
        Ok(())
    });
    results.push(("correlator sum identity", r.map_err(|e| e.to_string())));

    let r = runner().run(
        &(0.0f64..PI, 0.5f64..=1.0, 0.5f64..=1.0, 0.0f64..=1.0),
        |(theta, pol_e, pol_n, p)| {
            let imp = ImperfectionModel {
                pol_e,
                pol_n,
                flip_prob_p: p,
                ..ImperfectionModel::nominal()
            };
            let t = population_table(theta, &imp, &DriveMode::Instantaneous).unwrap();
            for v in CgVariant::ALL {
                prop_assert!(t.postselected_weight(v) <= 1.0 + 1e-12);
            }
            Ok(())
        },
    );
    results.push(("postselected weight ≤ 1", r.map_err(|e| e.to_string())));

    results
        .into_iter()
        .map(|(name, r)| {
            let detail = match &r {
                Ok(()) => "1000 randomized instances".to_string(),
                Err(e) => e.clone(),
            };
            Check::new(format!("8 property: {name}"), r.is_ok(), detail)
        })
        .collect()
}

fn main() -> ExitCode {
    let criteria: [fn() -> Vec<Check>; 8] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
    ];
    let mut failed = 0;
    println!("acceptance criteria");
    for criterion in criteria {
        for c in criterion() {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            println!("{tag}  criterion {}: {}", c.label, c.detail);
            failed += usize::from(!c.pass);
        }
    }
    if failed == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} check(s) failed");
        ExitCode::FAILURE
    }
}
