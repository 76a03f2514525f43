//! Command implementations: merge flags, config and defaults, run the
//! library, and package a [`ResultRecord`].

use crate::cli::{
    CgRepeatArgs, Characterize, Command, DriveArgs, DriveKind, FidArgs, IdealArgs,
    ImperfectionArgs, NvArgs, OdmrArgs, Preset, ReproduceArgs, T2Star,
};
use crate::config::{self, FileConfig};
use crate::error::{usage, CliError};
use crate::record::{Comparison, Inputs, Outputs, ReproducedValue, SchemeName};
use crate::units::{format_theta, Unit, Value};
use lgsim_core::noise::{add_readout_noise, fid_curve, fit_gaussian_decay, ImperfectionModel};
use lgsim_core::nv::{
    fit_flip_probability, lg_run, odmr_spectrum, repeated_cg, DriveMode, FiniteDrive, NuclearLevel,
    NvModel, OdmrConfig, PulseParams, DEFAULT_SYNC_ORDER,
};
use lgsim_core::{
    find_max_k3, k3_protocol, kn_string, standard_qubit_scheme, standard_qutrit_scheme,
    MeasurementScheme, UpdateRule,
};
use std::f64::consts::PI;

pub const DEFAULT_THETA: f64 = 0.416 * PI;

/// Parameters every command sees besides its own flags.
pub struct Context {
    pub file: FileConfig,
    pub seed: u64,
}

pub fn execute(command: &Command, ctx: &Context) -> Result<(String, Inputs, Outputs), CliError> {
    let (name, (inputs, outputs)) = match command {
        Command::Ideal(a) => ("ideal", ideal(a, ctx)?),
        Command::Nv(a) => ("nv", nv(a, ctx)?),
        Command::Characterize(Characterize::Odmr(a)) => ("characterize odmr", odmr(a, ctx)?),
        Command::Characterize(Characterize::CgRepeat(a)) => {
            ("characterize cg-repeat", cg_repeat(a, ctx)?)
        }
        Command::Characterize(Characterize::Fid(a)) => ("characterize fid", fid(a, ctx)?),
        Command::Reproduce(a) => ("reproduce", reproduce(a, ctx)?),
    };
    Ok((name.to_string(), inputs, outputs))
}

fn scheme(name: SchemeName, dim: usize) -> Result<MeasurementScheme, CliError> {
    let rule = match name {
        SchemeName::Neumann => UpdateRule::VonNeumann,
        SchemeName::Luders => UpdateRule::Luders,
    };
    match dim {
        2 => Ok(standard_qubit_scheme(rule)),
        3 => Ok(standard_qutrit_scheme(rule)),
        d => Err(usage(format!("--dim must be 2 or 3, got {d}"))),
    }
}

fn ideal(a: &IdealArgs, ctx: &Context) -> Result<(Inputs, Outputs), CliError> {
    let f = &ctx.file.ideal;
    let theta = a
        .theta
        .or(config::theta(&f.theta, "ideal.theta")?)
        .unwrap_or(DEFAULT_THETA);
    let scheme_name = a.scheme.or(f.scheme).unwrap_or(SchemeName::Neumann);
    let dim = a.dim.or(f.dim).unwrap_or(3);
    let n = a.n.or(f.n).unwrap_or(3);
    let sweep = a.sweep || f.sweep.unwrap_or(false);
    let grid = a.grid.or(f.grid_points).unwrap_or(10_000);
    let s = scheme(scheme_name, dim)?;

    let correlators = k3_protocol(theta, &s)?;
    let string = kn_string(n, theta, &s)?;
    let maximum = sweep.then(|| find_max_k3(&s, grid)).transpose()?;
    let inputs = Inputs::Ideal {
        theta: format_theta(theta),
        scheme: scheme_name,
        dim,
        n,
        sweep,
        grid,
    };
    let outputs = Outputs::Ideal {
        theta: format_theta(theta),
        correlators,
        string,
        maximum,
    };
    Ok((inputs, outputs))
}

fn model(ctx: &Context) -> Result<NvModel, CliError> {
    let m = &ctx.file.model;
    let d = NvModel::default();
    let hz = |v: &Option<Value>, key: &str| config::quantity(v, Unit::Hertz, key);
    let model = NvModel {
        d_zfs: hz(&m.d_zfs, "model.d_zfs")?.unwrap_or(d.d_zfs),
        q_quad: hz(&m.q_quad, "model.q_quad")?.unwrap_or(d.q_quad),
        a_hf: hz(&m.a_hf, "model.a_hf")?.unwrap_or(d.a_hf),
        b_field: m.b_field.unwrap_or(d.b_field),
        gamma_e: m.gamma_e.unwrap_or(d.gamma_e),
        gamma_n: m.gamma_n.unwrap_or(d.gamma_n),
    };
    model.validate()?;
    Ok(model)
}

fn config_t2(v: &Option<Value>, key: &str) -> Result<Option<T2Star>, CliError> {
    match v {
        Some(Value::Text(s)) => crate::cli::t2_star(s)
            .map(Some)
            .map_err(|e| usage(format!("{key}: {e}"))),
        other => Ok(config::quantity(other, Unit::Seconds, key)?.map(|t| T2Star(Some(t)))),
    }
}

fn imperfections(
    a: &ImperfectionArgs,
    ctx: &Context,
    default_preset: Preset,
) -> Result<ImperfectionModel, CliError> {
    let f = &ctx.file.imperfections;
    let base = match a.preset.or(f.preset).unwrap_or(default_preset) {
        Preset::Nominal => ImperfectionModel::nominal(),
        Preset::Ideal => ImperfectionModel::ideal(),
    };
    let t2 = match a
        .t2_star
        .or(config_t2(&f.t2_star, "imperfections.t2_star")?)
    {
        Some(T2Star(t)) => t,
        None => base.t2_star,
    };
    let model = ImperfectionModel {
        t2_star: t2,
        pol_e: a.pol_e.or(f.pol_e).unwrap_or(base.pol_e),
        pol_n: a.pol_n.or(f.pol_n).unwrap_or(base.pol_n),
        flip_prob_p: a.flip_prob_p.or(f.flip_prob_p).unwrap_or(base.flip_prob_p),
        n_samples: a.samples.or(f.n_samples).unwrap_or(base.n_samples),
        seed: ctx.seed,
        averaging: a
            .averaging
            .or(f.averaging)
            .map(Into::into)
            .unwrap_or(base.averaging),
    };
    model.validate()?;
    Ok(model)
}

fn drive(a: &DriveArgs, ctx: &Context, default: DriveKind) -> Result<DriveMode, CliError> {
    let p = &ctx.file.pulse;
    let kind = a.drive.or(ctx.file.nv.drive).unwrap_or(default);
    if kind == DriveKind::Instantaneous {
        return Ok(DriveMode::Instantaneous);
    }
    let model = model(ctx)?;
    let f_rabi = a
        .f_rabi
        .or(config::quantity(&p.f_rabi, Unit::Hertz, "pulse.f_rabi")?)
        .unwrap_or(FiniteDrive::default().f_rabi);
    let order = a.sync_order.or(p.sync_order).unwrap_or(DEFAULT_SYNC_ORDER);
    if order == 0 {
        return Err(usage("--sync-order must be at least 1"));
    }
    let cg_pi_duration = a
        .cg_pi_duration
        .or(config::quantity(
            &p.cg_pi_duration,
            Unit::Seconds,
            "pulse.cg_pi_duration",
        )?)
        .unwrap_or_else(|| model.synchronized_pi_duration(order));
    if !(f_rabi > 0.0 && cg_pi_duration > 0.0) {
        return Err(usage("f_rabi and cg_pi_duration must be positive"));
    }
    Ok(DriveMode::FiniteDuration(FiniteDrive {
        model,
        f_rabi,
        cg_pi_duration,
    }))
}

fn nv(a: &NvArgs, ctx: &Context) -> Result<(Inputs, Outputs), CliError> {
    let theta = a
        .theta
        .or(config::theta(&ctx.file.nv.theta, "nv.theta")?)
        .unwrap_or(DEFAULT_THETA);
    let imp = imperfections(&a.imperfections, ctx, Preset::Nominal)?;
    let drive = drive(&a.drive, ctx, DriveKind::Instantaneous)?;
    let report = lg_run(theta, &imp, &drive)?;
    let inputs = Inputs::Nv {
        theta: format_theta(theta),
        imperfections: imp,
        drive,
    };
    let outputs = Outputs::Nv {
        comparison: Comparison::for_k3(report.correlators.k3),
        correlators: report.correlators,
        table: report.table,
        postselected_weights: report.postselected_weights,
        renormalized: report.renormalized,
    };
    Ok((inputs, outputs))
}

fn check_points(points: usize, min: usize) -> Result<(), CliError> {
    if points < min {
        return Err(usage(format!(
            "at least {min} points are needed, got {points}"
        )));
    }
    Ok(())
}

/// Line centres where `|P0 − baseline|` has a local maximum of at least half
/// the largest excursion, refined by a three-point parabola.
pub fn find_resonances(curve: &[(f64, f64)]) -> Vec<f64> {
    let Some(&(_, baseline)) = curve.first() else {
        return vec![];
    };
    let dev: Vec<f64> = curve.iter().map(|p| (p.1 - baseline).abs()).collect();
    let peak = dev.iter().copied().fold(0.0, f64::max);
    if peak < 1e-6 {
        return vec![];
    }
    let mut out = vec![];
    for i in 1..dev.len().saturating_sub(1) {
        let (l, c, r) = (dev[i - 1], dev[i], dev[i + 1]);
        if c >= 0.5 * peak && c > l && c >= r {
            let denom = l - 2.0 * c + r;
            let shift = if denom.abs() > 0.0 {
                0.5 * (l - r) / denom
            } else {
                0.0
            };
            let step = curve[i + 1].0 - curve[i].0;
            out.push(curve[i].0 + shift.clamp(-0.5, 0.5) * step);
        }
    }
    out
}

fn odmr(a: &OdmrArgs, ctx: &Context) -> Result<(Inputs, Outputs), CliError> {
    let f = &ctx.file.odmr;
    let model = model(ctx)?;
    let defaults = OdmrConfig {
        model,
        ..OdmrConfig::default()
    };
    let lines = NuclearLevel::ALL.map(|n| model.electron_line(n));
    let lo = lines.iter().copied().fold(f64::INFINITY, f64::min) - 2e6;
    let hi = lines.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2e6;
    let start = a
        .start
        .or(config::quantity(&f.start, Unit::Hertz, "odmr.start")?)
        .unwrap_or(lo);
    let stop = a
        .stop
        .or(config::quantity(&f.stop, Unit::Hertz, "odmr.stop")?)
        .unwrap_or(hi);
    let points = a.points.or(f.points).unwrap_or(601);
    check_points(points, 3)?;
    if !(stop > start) {
        return Err(usage("odmr stop must exceed start"));
    }
    let cfg = OdmrConfig {
        model,
        nuclear_populations: f
            .nuclear_populations
            .unwrap_or(defaults.nuclear_populations),
        protected: a
            .protected
            .or(f.protected)
            .map(Into::into)
            .unwrap_or(defaults.protected),
        mw_pi_duration: a
            .pi_duration
            .or(config::quantity(
                &f.pi_duration,
                Unit::Seconds,
                "odmr.pi_duration",
            )?)
            .unwrap_or(defaults.mw_pi_duration),
    };
    let p = a.flip_prob_p.or(f.flip_prob_p);
    let freqs: Vec<f64> = (0..points)
        .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
        .collect();
    let curve = odmr_spectrum(&cfg, p, &freqs)?;
    let resonances = find_resonances(&curve);
    let spacings = resonances.windows(2).map(|w| w[1] - w[0]).collect();
    let inputs = Inputs::Odmr {
        model,
        flip_prob_p: p,
        protected: cfg.protected,
        nuclear_populations: cfg.nuclear_populations,
        mw_pi_duration: cfg.mw_pi_duration,
        freq_start: start,
        freq_stop: stop,
        points,
    };
    Ok((
        inputs,
        Outputs::Odmr {
            curve,
            resonances,
            spacings,
        },
    ))
}

fn cg_repeat(a: &CgRepeatArgs, ctx: &Context) -> Result<(Inputs, Outputs), CliError> {
    let f = &ctx.file.cg_repeat;
    let p = a.flip_prob_p.or(f.flip_prob_p).unwrap_or(0.995);
    let k_max = a.kmax.or(f.k_max).unwrap_or(30);
    let noise = a.noise.or(f.readout_noise).unwrap_or(0.01);
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(usage("--noise must be non-negative"));
    }
    let clean = repeated_cg(k_max, p)?;
    let mut ys: Vec<f64> = clean.iter().map(|c| c.1).collect();
    add_readout_noise(&mut ys, noise, ctx.seed);
    let curve: Vec<(usize, f64)> = clean.iter().map(|c| c.0).zip(ys).collect();
    let fit = fit_flip_probability(&curve)?;
    let inputs = Inputs::CgRepeat {
        flip_prob_p: p,
        k_max,
        readout_noise: noise,
    };
    Ok((inputs, Outputs::CgRepeat { curve, fit }))
}

fn fid(a: &FidArgs, ctx: &Context) -> Result<(Inputs, Outputs), CliError> {
    let f = &ctx.file.fid;
    let t2 = a
        .t2_star
        .or(config::quantity(&f.t2_star, Unit::Seconds, "fid.t2_star")?)
        .unwrap_or(ImperfectionModel::NOMINAL_T2_STAR);
    let delta_ref = a
        .delta_ref
        .or(config::quantity(
            &f.delta_ref,
            Unit::Hertz,
            "fid.delta_ref",
        )?)
        .unwrap_or(30e3);
    let span = a
        .span
        .or(config::quantity(&f.span, Unit::Seconds, "fid.span")?)
        .unwrap_or(150e-6);
    let points = a.points.or(f.points).unwrap_or(50);
    check_points(points, 5)?;
    let noise = a.noise.or(f.readout_noise).unwrap_or(0.01);
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(usage("--noise must be non-negative"));
    }
    if !(t2 > 0.0 && span > 0.0) {
        return Err(usage("t2star and span must be positive"));
    }
    let base = ImperfectionModel::nominal();
    let imp = ImperfectionModel {
        t2_star: Some(t2),
        n_samples: a.samples.or(f.n_samples).unwrap_or(41),
        averaging: a
            .averaging
            .or(f.averaging)
            .map(Into::into)
            .unwrap_or(base.averaging),
        seed: ctx.seed,
        ..base
    };
    imp.validate()?;
    let grid: Vec<f64> = (0..points)
        .map(|i| span * i as f64 / (points - 1) as f64)
        .collect();
    let clean = fid_curve(&imp, &grid, delta_ref)?;
    let mut ys: Vec<f64> = clean.iter().map(|c| c.1).collect();
    add_readout_noise(&mut ys, noise, ctx.seed);
    let curve: Vec<(f64, f64)> = grid.into_iter().zip(ys).collect();
    let fit = fit_gaussian_decay(&curve)?;
    let inputs = Inputs::Fid {
        imperfections: imp,
        delta_ref,
        span,
        points,
        readout_noise: noise,
    };
    Ok((inputs, Outputs::Fid { curve, fit }))
}

fn row(quantity: &str, reproduced: f64, reference: Option<f64>, note: &str) -> ReproducedValue {
    ReproducedValue {
        quantity: quantity.to_string(),
        reproduced,
        reference,
        note: note.to_string(),
    }
}

fn reproduce(a: &ReproduceArgs, ctx: &Context) -> Result<(Inputs, Outputs), CliError> {
    let imp = imperfections(&a.imperfections, ctx, Preset::Nominal)?;
    let drive = drive(&a.drive, ctx, DriveKind::Finite)?;
    let model = model(ctx)?;
    let mut values = vec![];

    let vn = find_max_k3(&standard_qutrit_scheme(UpdateRule::VonNeumann), 10_000)?;
    values.push(row(
        "K3 maximum, qutrit, von Neumann",
        vn.k3,
        Some(1.756),
        "",
    ));
    values.push(row("theta at maximum / pi", vn.theta / PI, Some(0.416), ""));
    let qubit = find_max_k3(&standard_qubit_scheme(UpdateRule::Luders), 10_000)?;
    values.push(row(
        "K3 maximum, qubit (Luders bound)",
        qubit.k3,
        Some(1.5),
        "",
    ));
    let lu = find_max_k3(&standard_qutrit_scheme(UpdateRule::Luders), 10_000)?;
    values.push(row(
        "K3 maximum, qutrit, Luders update",
        lu.k3,
        None,
        "stays below the qubit bound",
    ));

    let f_rabi = match drive {
        DriveMode::FiniteDuration(d) => d.f_rabi,
        DriveMode::Instantaneous => FiniteDrive::default().f_rabi,
    };
    let pulse = PulseParams::for_theta(
        &model,
        DEFAULT_THETA,
        f_rabi,
        model.synchronized_pi_duration(DEFAULT_SYNC_ORDER),
    )?;
    values.push(row(
        "U duration at 0.416pi / us",
        pulse.u_duration * 1e6,
        Some(14.71),
        "",
    ));

    let nominal = lg_run(DEFAULT_THETA, &imp, &drive)?;
    let mode = match drive {
        DriveMode::Instantaneous => "instantaneous drive",
        DriveMode::FiniteDuration(_) => "finite-duration drive",
    };
    values.push(row(
        "K3 with imperfections at 0.416pi",
        nominal.correlators.k3,
        Some(1.632),
        &format!("{mode}; measured value 1.625 +/- 0.022"),
    ));
    values.push(row(
        "sigma detuning / Hz",
        imp.sigma_detuning(),
        None,
        "1/(sqrt2 pi T2*)",
    ));

    let (_, Outputs::Odmr { spacings, .. }) = odmr(&OdmrArgs::default(), ctx)? else {
        unreachable!()
    };
    let mean_spacing = spacings.iter().sum::<f64>() / spacings.len().max(1) as f64;
    values.push(row(
        "ODMR line spacing / MHz",
        mean_spacing / 1e6,
        Some(2.16),
        "",
    ));

    let (_, Outputs::CgRepeat { fit, .. }) = cg_repeat(&CgRepeatArgs::default(), ctx)? else {
        unreachable!()
    };
    values.push(row(
        "flip probability p",
        fit.p_hat,
        Some(0.995),
        "seeded synthetic data",
    ));

    let (_, Outputs::Fid { fit, .. }) = fid(&FidArgs::default(), ctx)? else {
        unreachable!()
    };
    values.push(row(
        "T2* fit / us",
        fit.t2_star * 1e6,
        Some(62.0),
        "seeded synthetic data",
    ));

    let inputs = Inputs::Reproduce {
        imperfections: imp,
        drive,
    };
    Ok((inputs, Outputs::Reproduce { values }))
}
