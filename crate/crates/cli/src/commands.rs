//! Subcommand implementations. Each writes CSV data, a JSON summary, and a
//! run manifest into the output directory and returns the list of files it
//! produced (manifest excluded).

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::Serialize;

use qbm_core::evolution::{
    attenuation, exact_reference, fit_decoherence_time, spatial_density, FitLaw, InitialState,
};
use qbm_core::fluctuations::{divergence_probe, msd, x_moments};
use qbm_core::green::{diffusion_coefficients, green, local_coefficients};
use qbm_core::model::{BathKind, TemperatureRegime};
use qbm_core::oracle::{
    build_discrete_bath, integrate_master_equation, integrate_moment_odes, mc_estimate, McConfig,
    OracleReport, PhaseSpaceGrid,
};
use qbm_core::par;

use crate::config::ScenarioSpec;
use crate::emit::{write_csv, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(&self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn json(&self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

pub struct RunContext<'a> {
    pub spec: &'a ScenarioSpec,
    pub out: &'a Path,
    pub seed: u64,
    pub format: Format,
}

fn push_if<T: Serialize>(
    ctx: &RunContext,
    outputs: &mut Vec<String>,
    name: &str,
    value: &T,
) -> anyhow::Result<()> {
    if ctx.format.json() {
        write_json(&ctx.out.join(name), value)?;
        outputs.push(name.to_string());
    }
    Ok(())
}

fn push_csv(
    ctx: &RunContext,
    outputs: &mut Vec<String>,
    name: &str,
    header: &[&str],
    rows: &[Vec<f64>],
) -> anyhow::Result<()> {
    if ctx.format.csv() {
        write_csv(&ctx.out.join(name), header, rows)?;
        outputs.push(name.to_string());
    }
    Ok(())
}

pub fn coefficients(ctx: &RunContext) -> anyhow::Result<Vec<String>> {
    let spec = ctx.spec;
    let config = &spec.physical;
    let times = spec.grid.times();
    if config.bath.kind == BathKind::SingleRelaxationTime && spec.grid.t_start == 0.0 {
        bail!(
            "coefficients with the exponential-memory bath need t_start > 0: \
             h(t) = P_h/(2 hbar Gamma) diverges at t = 0 where Gamma vanishes"
        );
    }
    if config.thermal.regime != TemperatureRegime::HighTemperature && spec.grid.t_start == 0.0 {
        bail!("coefficients at zero-point weights need t_start > 0");
    }
    let rows: Vec<anyhow::Result<Vec<f64>>> = par::map_indexed(times.len(), |i| {
        let t = times[i];
        let ge = green(config, t)?;
        let lc = local_coefficients(config, t)?;
        let (f, h) = if t == 0.0 {
            // Ohmic classical-weight limits
            (0.0, 2.0 * config.kt() / config.hbar())
        } else {
            let d = diffusion_coefficients(config, t)?;
            (d.f, d.h)
        };
        Ok(vec![
            t,
            ge.g,
            ge.g1,
            ge.g2,
            lc.two_gamma,
            lc.omega_sq.value,
            f,
            h,
        ])
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<anyhow::Result<_>>()?;
    let mut outputs = Vec::new();
    push_csv(
        ctx,
        &mut outputs,
        "coefficients.csv",
        &["t", "G", "Gdot", "Gddot", "two_gamma", "omega_sq", "f", "h"],
        &rows,
    )?;

    #[derive(Serialize)]
    struct Summary {
        name: String,
        bath_kind: BathKind,
        units_note: &'static str,
        gamma_plus: Option<f64>,
        gamma_minus: Option<f64>,
        omega_sq_delta_weight_at_origin: Option<f64>,
    }
    let gammas = qbm_core::model::gamma_pm(config).ok();
    let summary = Summary {
        name: spec.name.clone(),
        bath_kind: config.bath.kind,
        units_note: "G in time/mass, two_gamma in 1/time, omega_sq in 1/time^2, \
                     f dimensionless, h in 1/time",
        gamma_plus: gammas.map(|g| g.0),
        gamma_minus: gammas.map(|g| g.1),
        omega_sq_delta_weight_at_origin: local_coefficients(config, 0.0)
            .ok()
            .and_then(|lc| lc.omega_sq.delta),
    };
    push_if(ctx, &mut outputs, "coefficients_summary.json", &summary)?;
    Ok(outputs)
}

pub fn fluctuations(ctx: &RunContext) -> anyhow::Result<Vec<String>> {
    let spec = ctx.spec;
    let config = &spec.physical;
    let times = spec.grid.times();
    let rows: Vec<anyhow::Result<Vec<f64>>> = par::map_indexed(times.len(), |i| {
        let t = times[i];
        let d = msd(config, t)?;
        let xm = x_moments(config, t)?;
        let flag = if xm.cutoff.is_some() { 1.0 } else { 0.0 };
        Ok(vec![t, d.s, d.s1, xm.xx, xm.vv, xm.xv_sym, flag])
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<anyhow::Result<_>>()?;
    let mut outputs = Vec::new();
    push_csv(
        ctx,
        &mut outputs,
        "fluctuations.csv",
        &["t", "s", "s_dot", "X2", "V2", "XV_sym", "cutoff_flag"],
        &rows,
    )?;

    #[derive(Serialize)]
    struct Summary {
        name: String,
        regime: TemperatureRegime,
        cutoff: Option<f64>,
        units_note: &'static str,
        final_t: f64,
        final_x2: f64,
    }
    let last = rows.last().unwrap();
    push_if(
        ctx,
        &mut outputs,
        "fluctuations_summary.json",
        &Summary {
            name: spec.name.clone(),
            regime: config.thermal.regime,
            cutoff: config.cutoff(),
            units_note: "s and X2 in length^2, V2 in (length/time)^2",
            final_t: last[0],
            final_x2: last[3],
        },
    )?;
    Ok(outputs)
}

pub fn spread(ctx: &RunContext) -> anyhow::Result<Vec<String>> {
    let spec = ctx.spec;
    let config = &spec.physical;
    let times = spec.grid.times();
    let rows: Vec<anyhow::Result<Vec<f64>>> = par::map_indexed(times.len(), |i| {
        let t = times[i];
        let d = spatial_density(&spec.state, config, t)?;
        Ok(vec![t, d.mean, d.variance])
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<anyhow::Result<_>>()?;
    let mut outputs = Vec::new();
    push_csv(
        ctx,
        &mut outputs,
        "spread.csv",
        &["t", "mean", "variance"],
        &rows,
    )?;

    #[derive(Serialize)]
    struct Summary {
        name: String,
        state: InitialState,
        cutoff: Option<f64>,
        units_note: &'static str,
        final_mean: f64,
        final_variance: f64,
    }
    let last = rows.last().unwrap();
    push_if(
        ctx,
        &mut outputs,
        "spread_summary.json",
        &Summary {
            name: spec.name.clone(),
            state: spec.state,
            cutoff: config.cutoff(),
            units_note: "mean in length, variance in length^2",
            final_mean: last[1],
            final_variance: last[2],
        },
    )?;
    Ok(outputs)
}

pub fn cat(ctx: &RunContext) -> anyhow::Result<Vec<String>> {
    let spec = ctx.spec;
    let config = &spec.physical;
    let state = &spec.state;
    let d = state
        .separation()
        .ok_or_else(|| anyhow!("the cat subcommand needs a cat-family state"))?;
    let times = spec.grid.times();
    let rows: Vec<anyhow::Result<Vec<f64>>> = par::map_indexed(times.len(), |i| {
        let t = times[i];
        Ok(vec![t, attenuation(state, config, t)?.a])
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<anyhow::Result<_>>()?;
    let mut outputs = Vec::new();
    push_csv(ctx, &mut outputs, "cat.csv", &["t", "a"], &rows)?;

    // density slices
    for (k, &ts) in spec.output.density_slices.iter().enumerate() {
        let den = spatial_density(state, config, ts)?;
        let half = 0.5 * d + 6.0 * den.variance.sqrt();
        let n = spec.output.x_points.max(3);
        let slice: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let x = -half + 2.0 * half * i as f64 / (n - 1) as f64;
                vec![x, den.eval(x)]
            })
            .collect();
        push_csv(
            ctx,
            &mut outputs,
            &format!("cat_density_{k}.csv"),
            &["x", "density"],
            &slice,
        )?;
    }

    let sigma = state.width();
    let law = if state.is_thermal() {
        FitLaw::GaussT2
    } else {
        FitLaw::ExpT3
    };
    let fit = fit_decoherence_time(state, config, law);
    #[derive(Serialize)]
    struct Summary {
        name: String,
        separation: f64,
        width: f64,
        long_time_plateau: f64,
        fit_law: &'static str,
        tau_d: Option<f64>,
        fit_error: Option<String>,
        cutoff: Option<f64>,
        units_note: &'static str,
    }
    let summary = Summary {
        units_note: "a dimensionless in (0, 1], tau_d in time units",
        name: spec.name.clone(),
        separation: d,
        width: sigma,
        long_time_plateau: (-d * d / (8.0 * sigma * sigma)).exp(),
        fit_law: match law {
            FitLaw::ExpT3 => "exp_t3",
            FitLaw::GaussT2 => "gauss_t2",
        },
        tau_d: fit.as_ref().ok().and_then(|f| f.tau_d),
        fit_error: fit.as_ref().err().map(|e| e.to_string()),
        cutoff: config.cutoff(),
    };
    push_if(ctx, &mut outputs, "cat_summary.json", &summary)?;
    Ok(outputs)
}

pub fn reference(ctx: &RunContext) -> anyhow::Result<Vec<String>> {
    let spec = ctx.spec;
    let config = &spec.physical;
    let state = &spec.state;
    let times = spec.grid.times();
    let is_cat = state.is_cat();
    let rows: Vec<anyhow::Result<Vec<f64>>> = par::map_indexed(times.len(), |i| {
        let t = times[i];
        let r = exact_reference(state, config, t)?;
        let mut row = vec![t, r.commutator, r.w_sq];
        if is_cat {
            row.push(r.a_exact.unwrap());
        }
        Ok(row)
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<anyhow::Result<_>>()?;
    let header: &[&str] = if is_cat {
        &["t", "commutator", "w_sq", "a_exact"]
    } else {
        &["t", "commutator", "w_sq"]
    };
    let mut outputs = Vec::new();
    push_csv(ctx, &mut outputs, "reference.csv", header, &rows)?;

    #[derive(Serialize)]
    struct Summary {
        name: String,
        state: InitialState,
        cutoff: Option<f64>,
        units_note: &'static str,
        /// max |C(t) - hbar G(t)| over the grid (free-particle identity)
        commutator_green_identity_error: Option<f64>,
    }
    let identity = if config.is_free_particle() {
        let mut worst = 0.0f64;
        for (i, &t) in times.iter().enumerate() {
            let g = green(config, t).map_err(|e| anyhow!("{e}"))?;
            worst = worst.max((rows[i][1] - config.hbar() * g.g).abs());
        }
        Some(worst)
    } else {
        None
    };
    push_if(
        ctx,
        &mut outputs,
        "reference_summary.json",
        &Summary {
            name: spec.name.clone(),
            state: *state,
            cutoff: config.cutoff(),
            units_note: "commutator in hbar * time/mass, w_sq in length^2",
            commutator_green_identity_error: identity,
        },
    )?;
    Ok(outputs)
}

pub fn divergence(ctx: &RunContext) -> anyhow::Result<Vec<String>> {
    let spec = ctx.spec;
    let config = &spec.physical;
    if spec.output.cutoffs.len() < 3 {
        bail!("divergence needs output.cutoffs with at least three entries spanning two decades");
    }
    let t_probe = spec
        .output
        .probe_time
        .unwrap_or(20.0 * config.mass() / config.friction());
    let probe =
        divergence_probe(config, t_probe, &spec.output.cutoffs).map_err(|e| anyhow!("{e}"))?;
    let rows: Vec<Vec<f64>> = probe.samples.iter().map(|&(wc, v)| vec![wc, v]).collect();
    let mut outputs = Vec::new();
    push_csv(
        ctx,
        &mut outputs,
        "divergence.csv",
        &["cutoff", "X2"],
        &rows,
    )?;

    #[derive(Serialize)]
    struct Summary {
        name: String,
        t_probe: f64,
        slope: f64,
        expected_slope: f64,
        relative_error: f64,
        rms_residual: f64,
        units_note: &'static str,
    }
    let expected = config.hbar() / (std::f64::consts::PI * config.friction());
    push_if(
        ctx,
        &mut outputs,
        "divergence_summary.json",
        &Summary {
            name: spec.name.clone(),
            t_probe,
            slope: probe.slope,
            expected_slope: expected,
            relative_error: (probe.slope / expected - 1.0).abs(),
            rms_residual: probe.rms_residual,
            units_note: "slope in length^2 per log cutoff",
        },
    )?;
    Ok(outputs)
}

pub fn validate(ctx: &RunContext, suite: &str) -> anyhow::Result<(Vec<String>, bool)> {
    let mut outputs = Vec::new();
    let mut reports = Vec::new();
    let suites: Vec<&str> = match suite {
        "all" => vec!["pde", "mc", "moments", "bath"],
        s @ ("pde" | "mc" | "moments" | "bath") => vec![s],
        other => bail!("unknown validation suite '{other}' (pde|mc|moments|bath|all)"),
    };
    for s in suites {
        let report = match s {
            "pde" => validate_pde(ctx, &mut outputs)?,
            "mc" => validate_mc(ctx, &mut outputs)?,
            "moments" => validate_moments(ctx)?,
            "bath" => validate_bath(ctx)?,
            _ => unreachable!(),
        };
        let name = format!("validate_{s}.json");
        write_json(&ctx.out.join(&name), &report)?;
        outputs.push(name);
        reports.push(report);
    }
    let passed = reports.iter().all(|r| r.passed);
    Ok((outputs, passed))
}

fn validate_pde(ctx: &RunContext, outputs: &mut Vec<String>) -> anyhow::Result<OracleReport> {
    let spec = ctx.spec;
    let config = &spec.physical;
    let state = &spec.state;
    let t_final = spec.grid.t_end;
    let grid = PhaseSpaceGrid::auto(config, state, t_final, spec.output.pde_points, 7.5)
        .map_err(|e| anyhow!("{e}"))?;
    let result =
        integrate_master_equation(config, state, &grid, t_final).map_err(|e| anyhow!("{e}"))?;
    let last = result.moments.last().unwrap();
    let mut report = OracleReport::new(format!("{} / grid integrator", spec.name));
    report.check_below("mass_error", (last.mass - 1.0).abs(), 1e-4);
    let expected =
        qbm_core::evolution::variance_report(state, config, t_final).map_err(|e| anyhow!("{e}"))?;
    report.check_rel("x_variance", last.x2_central, expected, 1e-2);
    let den = spatial_density(state, config, t_final).map_err(|e| anyhow!("{e}"))?;
    let marg = result.q_marginal();
    let nodes = result.q_nodes();
    let l1: f64 = nodes
        .iter()
        .zip(marg.iter())
        .map(|(x, pm)| (pm - den.eval(*x)).abs() * result.grid.dq())
        .sum();
    report.check_below("density_l1_distance", l1, 1e-2);
    if ctx.format.csv() {
        let rows: Vec<Vec<f64>> = nodes
            .iter()
            .zip(marg.iter())
            .map(|(&x, &pm)| vec![x, pm, den.eval(x)])
            .collect();
        write_csv(
            &ctx.out.join("validate_pde_marginal.csv"),
            &["x", "numeric", "analytic"],
            &rows,
        )?;
        outputs.push("validate_pde_marginal.csv".to_string());
    }
    Ok(report)
}

fn validate_mc(ctx: &RunContext, outputs: &mut Vec<String>) -> anyhow::Result<OracleReport> {
    let spec = ctx.spec;
    let config = &spec.physical;
    let state = &spec.state;
    let t = spec.grid.t_end;
    let mut mc = McConfig::new(
        spec.output.mc_samples,
        ctx.seed,
        spec.output.mc_modes,
        spec.output.mc_cutoff,
        vec![t],
    );
    mc.hist_bins = 60;
    let est = mc_estimate(config, state, &mc).map_err(|e| anyhow!("{e}"))?;
    let mom = &est.moments[0];
    let xm = x_moments(config, mom.t).map_err(|e| anyhow!("{e}"))?;
    let mut report = OracleReport::new(format!("{} / discrete-bath sampler", spec.name));
    report.check("x2_vs_closed", mom.x2_mean, xm.xx, 3.0 * mom.x2_se);
    let expected_var =
        qbm_core::evolution::variance_report(state, config, mom.t).map_err(|e| anyhow!("{e}"))?;
    report.check("var_vs_closed", mom.x_var, expected_var, 3.0 * mom.x_var_se);
    let ge = green(config, mom.t).map_err(|e| anyhow!("{e}"))?;
    let mean_expected = config.mass() * ge.g1 * state.center();
    report.check(
        "mean_vs_drift",
        mom.x_mean,
        mean_expected,
        3.0 * mom.x_mean_se,
    );
    // sampled position density against the closed form
    let hist = est.histogram.as_ref().unwrap();
    let den = spatial_density(state, config, mom.t).map_err(|e| anyhow!("{e}"))?;
    let width = (hist.hi - hist.lo) / hist.density.len() as f64;
    let l1: f64 = hist
        .centers()
        .iter()
        .enumerate()
        .map(|(i, &x)| (hist.density[i] - den.eval(x)).abs() * width)
        .sum();
    report.check_below("density_l1_distance", l1, 0.1);
    if ctx.format.csv() {
        let rows: Vec<Vec<f64>> = hist
            .centers()
            .iter()
            .enumerate()
            .map(|(i, &x)| vec![x, hist.density[i], hist.se[i], den.eval(x)])
            .collect();
        write_csv(
            &ctx.out.join("validate_mc_histogram.csv"),
            &["x", "mc_density", "mc_se", "analytic"],
            &rows,
        )?;
        outputs.push("validate_mc_histogram.csv".to_string());
    }
    Ok(report)
}

fn validate_moments(ctx: &RunContext) -> anyhow::Result<OracleReport> {
    let spec = ctx.spec;
    let config = &spec.physical;
    let state = &spec.state;
    let sigma = state.width();
    let hbar = config.hbar();
    let mut p0 = hbar * hbar / (4.0 * sigma * sigma);
    if state.is_thermal() {
        p0 += config.mass() * config.kt();
    }
    let x0 = state.center();
    let t_final = spec.grid.t_end;
    let curves = integrate_moment_odes(config, [sigma * sigma + x0 * x0, 0.0, p0], t_final, 8)
        .map_err(|e| anyhow!("{e}"))?;
    let mut report = OracleReport::new(format!("{} / moment odes", spec.name));
    let i = curves.t.len() - 1;
    let ge = green(config, t_final).map_err(|e| anyhow!("{e}"))?;
    let xm = x_moments(config, t_final).map_err(|e| anyhow!("{e}"))?;
    let m = config.mass();
    let x2_expect = m * m * ge.g1 * ge.g1 * (sigma * sigma + x0 * x0) + ge.g * ge.g * p0 + xm.xx;
    let p2_expect = m * m * m * m * ge.g2 * ge.g2 * (sigma * sigma + x0 * x0)
        + m * m * ge.g1 * ge.g1 * p0
        + m * m * xm.vv;
    report.check_rel("x2_final", curves.x2[i], x2_expect, 1e-5);
    report.check_rel("p2_final", curves.p2[i], p2_expect, 1e-5);
    Ok(report)
}

fn validate_bath(ctx: &RunContext) -> anyhow::Result<OracleReport> {
    let spec = ctx.spec;
    let config = &spec.physical;
    let bath = build_discrete_bath(config, spec.output.mc_modes, spec.output.mc_cutoff)
        .map_err(|e| anyhow!("{e}"))?;
    let mut report = OracleReport::new(format!("{} / bath discretization", spec.name));
    // kernel reconstruction over the first quarter recurrence
    let kernel0 = match config.bath.kind {
        BathKind::Ohmic => bath.mass_sum(), // delta surrogate: compare at t=0 only
        BathKind::SingleRelaxationTime => config.friction() / config.bath.relaxation_time,
    };
    let mut worst = 0.0f64;
    if config.bath.kind == BathKind::SingleRelaxationTime {
        for k in 1..=40 {
            let t = bath.recurrence_time / 4.0 * k as f64 / 40.0;
            let exact = config.friction() / config.bath.relaxation_time
                * (-t / config.bath.relaxation_time).exp();
            worst = worst.max((bath.memory_kernel(t) - exact).abs());
        }
        report.check_below("kernel_reconstruction_linf", worst / kernel0, 1e-2);
    }
    let dw = bath.omega_max / spec.output.mc_modes as f64;
    report.check_rel(
        "recurrence_time",
        bath.recurrence_time,
        2.0 * std::f64::consts::PI / dw,
        1e-12,
    );
    // spectral mass against the integrated weight
    let integrated = match config.bath.kind {
        BathKind::Ohmic => 2.0 / std::f64::consts::PI * config.friction() * bath.omega_max,
        BathKind::SingleRelaxationTime => {
            let tau = config.bath.relaxation_time;
            2.0 / std::f64::consts::PI * config.friction() / tau * (bath.omega_max * tau).atan()
        }
    };
    report.check_rel("spectral_mass", bath.mass_sum(), integrated, 1e-3);
    Ok(report)
}

// column-wise comparison of two run directories
pub fn compare(run_a: &Path, run_b: &Path, out: &Path) -> anyhow::Result<Vec<String>> {
    #[derive(Serialize)]
    struct ColumnDiff {
        name: String,
        max_abs: f64,
        max_rel: f64,
    }
    #[derive(Serialize)]
    struct FileDiff {
        file: String,
        columns: Vec<ColumnDiff>,
    }
    #[derive(Serialize)]
    struct CompareReport {
        run_a: String,
        run_b: String,
        files: Vec<FileDiff>,
    }

    let list = |dir: &Path| -> anyhow::Result<Vec<String>> {
        let mut names = Vec::new();
        for entry in std::fs::read_dir(dir)
            .with_context(|| format!("reading run directory {}", dir.display()))?
        {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().to_string();
            if name.ends_with(".csv") {
                names.push(name);
            }
        }
        names.sort();
        Ok(names)
    };
    let names_a = list(run_a)?;
    let names_b = list(run_b)?;
    let common: Vec<&String> = names_a.iter().filter(|n| names_b.contains(n)).collect();
    if common.is_empty() {
        bail!("no common CSV outputs between the two runs (same subcommand required)");
    }
    let mut files = Vec::new();
    for name in common {
        let (ha, ra) = read_csv(&run_a.join(name))?;
        let (hb, rb) = read_csv(&run_b.join(name))?;
        if ha != hb {
            bail!("{name}: column sets differ ({ha:?} vs {hb:?})");
        }
        if ra.len() != rb.len() {
            bail!(
                "{name}: grid mismatch: {} rows vs {} rows",
                ra.len(),
                rb.len()
            );
        }
        // first column is the grid; require identity
        for (x, y) in ra.iter().zip(rb.iter()) {
            if x[0] != y[0] {
                bail!("{name}: grid mismatch at {} vs {}", x[0], y[0]);
            }
        }
        let mut columns = Vec::new();
        for (c, col_name) in ha.iter().enumerate() {
            let mut max_abs = 0.0f64;
            let mut max_rel = 0.0f64;
            for (x, y) in ra.iter().zip(rb.iter()) {
                let d = (x[c] - y[c]).abs();
                max_abs = max_abs.max(d);
                let scale = x[c].abs().max(y[c].abs());
                if scale > 0.0 {
                    max_rel = max_rel.max(d / scale);
                }
            }
            columns.push(ColumnDiff {
                name: col_name.clone(),
                max_abs,
                max_rel,
            });
        }
        files.push(FileDiff {
            file: name.clone(),
            columns,
        });
    }
    let report = CompareReport {
        run_a: run_a.display().to_string(),
        run_b: run_b.display().to_string(),
        files,
    };
    write_json(&out.join("compare.json"), &report)?;
    Ok(vec!["compare.json".to_string()])
}

fn read_csv(path: &Path) -> anyhow::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| anyhow!("{}: empty file", path.display()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| cell.parse::<f64>().map_err(|e| anyhow!("{e}: '{cell}'")))
            .collect::<anyhow::Result<_>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
