use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use momentmono_core::distributions::{log_moment, moment, pdf, root_moment, sample};
use momentmono_core::estimation::fit_moments;
use momentmono_core::verification::run_full_sweep;
use momentmono_core::{
    BisectionConfig, DistributionParams, QuadratureConfig, SampleMoments, SweepSettings,
};
use serde_json::{json, Value};

use crate::args::{
    Command, FitArgs, Format, MomentsArgs, ParamArgs, PdfDataArgs, SampleArgs, VerifyArgs,
};
use crate::error::{exit, CliError};
use crate::input::read_samples;
use crate::output::{fmt_num, fmt_opt, CommandOutput, Table};

pub const MAX_MOMENT_ORDER: u32 = 50;

/// What `main` should print once a command has run.
pub enum Rendered {
    Report {
        output: CommandOutput,
        format: Format,
        dest: Option<PathBuf>,
    },
    /// The command already wrote everything it produces.
    Done,
}

pub fn run(command: &Command) -> Result<Rendered, CliError> {
    match command {
        Command::Moments(a) => Ok(Rendered::Report {
            output: moments(a)?,
            format: a.out.format,
            dest: a.out.output.clone(),
        }),
        Command::Fit(a) => Ok(Rendered::Report {
            output: fit(a)?,
            format: a.out.format,
            dest: a.out.output.clone(),
        }),
        Command::Sample(a) => sample_cmd(a),
        Command::Verify(a) => Ok(Rendered::Report {
            output: verify(a)?,
            format: a.out.format,
            dest: a.out.output.clone(),
        }),
        Command::PdfData(a) => Ok(Rendered::Report {
            output: pdf_data(a)?,
            format: a.format,
            dest: a.output.clone(),
        }),
    }
}

/// Shape and nuisance value lists for the selected family. Flags belonging
/// to another family are rejected rather than ignored.
fn param_lists(p: &ParamArgs) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let all = [
        ("k", &p.k),
        ("lambda", &p.lambda),
        ("alpha", &p.alpha),
        ("beta", &p.beta),
        ("mu", &p.mu),
        ("sigma", &p.sigma),
    ];
    let (shape_name, nuisance_name) = p.family.parameter_names();
    for (name, values) in all {
        if !values.is_empty() && name != shape_name && name != nuisance_name {
            return Err(CliError::input(format!(
                "--{name} does not apply to the {} family",
                p.family
            )));
        }
    }
    let get = |wanted: &str| {
        all.iter()
            .find(|(name, _)| *name == wanted)
            .map(|(_, v)| (*v).clone())
            .unwrap_or_default()
    };
    let (shape, nuisance) = (get(shape_name), get(nuisance_name));
    for (name, values) in [(shape_name, &shape), (nuisance_name, &nuisance)] {
        if values.is_empty() {
            return Err(CliError::input(format!(
                "--{name} is required for the {} family",
                p.family
            )));
        }
    }
    Ok((shape, nuisance))
}

fn single_params(p: &ParamArgs) -> Result<DistributionParams, CliError> {
    let (shape, nuisance) = param_lists(p)?;
    if shape.len() != 1 || nuisance.len() != 1 {
        return Err(CliError::input("this command takes one value per parameter"));
    }
    Ok(DistributionParams::from_shape_nuisance(p.family, shape[0], nuisance[0])?)
}

/// Parameter sets for `pdf-data`: lists of equal length pair up
/// element-wise, and a single value is reused for every set.
fn param_sets(p: &ParamArgs) -> Result<Vec<DistributionParams>, CliError> {
    let (shape, nuisance) = param_lists(p)?;
    let len = shape.len().max(nuisance.len());
    if (shape.len() != 1 && shape.len() != len) || (nuisance.len() != 1 && nuisance.len() != len) {
        return Err(CliError::input(
            "parameter lists must have equal lengths or a single value",
        ));
    }
    (0..len)
        .map(|j| {
            let s = shape[if shape.len() == 1 { 0 } else { j }];
            let v = nuisance[if nuisance.len() == 1 { 0 } else { j }];
            DistributionParams::from_shape_nuisance(p.family, s, v).map_err(CliError::from)
        })
        .collect()
}

fn params_json(p: &DistributionParams) -> Value {
    serde_json::to_value(p).expect("parameter records serialize")
}

fn param_label(p: &DistributionParams) -> String {
    let (s, v) = p.family().parameter_names();
    format!("{s}={};{v}={}", fmt_num(p.shape()), fmt_num(p.nuisance()))
}

fn moments(a: &MomentsArgs) -> Result<CommandOutput, CliError> {
    let params = single_params(&a.params)?;
    if !(1..=MAX_MOMENT_ORDER).contains(&a.max_order) {
        return Err(CliError::input(format!(
            "--max-order must be between 1 and {MAX_MOMENT_ORDER}, got {}",
            a.max_order
        )));
    }
    let mut rows = Vec::new();
    let mut table = Table::new(["i", "moment", "root_moment", "log_moment", "overflow"]);
    let mut prev_log_root = f64::NEG_INFINITY;
    let mut ordered = true;
    for i in 1..=a.max_order {
        let i = f64::from(i);
        let lm = log_moment(&params, i)?;
        // Unrepresentable values are flagged, not fatal.
        let m = moment(&params, i).ok();
        let r = root_moment(&params, i).ok();
        ordered &= lm / i >= prev_log_root;
        prev_log_root = lm / i;
        rows.push(json!({
            "i": i,
            "moment": m,
            "root_moment": r,
            "log_moment": lm,
            "overflow": m.is_none(),
        }));
        table.push(vec![
            fmt_num(i),
            fmt_opt(m),
            fmt_opt(r),
            fmt_num(lm),
            m.is_none().to_string(),
        ]);
    }
    Ok(CommandOutput {
        inputs: json!({ "params": params_json(&params), "max_order": a.max_order }),
        results: json!({ "rows": rows, "root_moments_nondecreasing": ordered }),
        violations: Vec::new(),
        table,
        exit_code: exit::OK,
    })
}

fn bisection_config(a: &FitArgs) -> Result<BisectionConfig, CliError> {
    let mut cfg = BisectionConfig::default();
    if let Some(v) = a.abs_tol {
        cfg.abs_tol = v;
    }
    if let Some(v) = a.residual_tol {
        cfg.residual_tol = v;
    }
    if let Some(v) = a.max_iterations {
        cfg.max_iterations = v;
    }
    if let Some(b) = &a.bracket {
        match b.as_slice() {
            &[lo, hi] => cfg.initial_bracket = (lo, hi),
            _ => return Err(CliError::input("--bracket takes exactly two values: lo,hi")),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fit(a: &FitArgs) -> Result<CommandOutput, CliError> {
    let cfg = bisection_config(a)?;
    let data = read_samples(&a.input)?;
    let moments = SampleMoments::from_data(&data, a.orders)?;
    let est = fit_moments(a.family, &moments, &cfg)?;

    let (s_name, v_name) = a.family.parameter_names();
    let mut table = Table::new([
        "family",
        s_name,
        v_name,
        "residual",
        "iterations",
        "bracket_lo",
        "bracket_hi",
        "count",
    ]);
    table.push(vec![
        a.family.to_string(),
        fmt_num(est.params.shape()),
        fmt_num(est.params.nuisance()),
        fmt_num(est.residual),
        est.iterations.to_string(),
        fmt_opt(est.bracket_used.map(|b| b.0)),
        fmt_opt(est.bracket_used.map(|b| b.1)),
        data.len().to_string(),
    ]);
    Ok(CommandOutput {
        inputs: json!({
            "family": a.family,
            "orders": { "n": a.orders.n, "m": a.orders.m },
            "input": a.input.display().to_string(),
            "bisection": {
                "abs_tol": cfg.abs_tol,
                "residual_tol": cfg.residual_tol,
                "max_iterations": cfg.max_iterations,
                "initial_bracket": [cfg.initial_bracket.0, cfg.initial_bracket.1],
            },
        }),
        results: json!({
            "params": params_json(&est.params),
            "residual": est.residual,
            "iterations": est.iterations,
            "bracket_used": est.bracket_used.map(|(lo, hi)| [lo, hi]),
            "count": data.len(),
            "sample_moments": { "m_n": moments.m_n, "m_m": moments.m_m },
        }),
        violations: Vec::new(),
        table,
        exit_code: exit::OK,
    })
}

fn sample_cmd(a: &SampleArgs) -> Result<Rendered, CliError> {
    let params = single_params(&a.params)?;
    let values = sample(&params, a.count, a.seed)?;
    let write_values = |sink: &mut dyn Write| -> io::Result<()> {
        for v in &values {
            writeln!(sink, "{}", fmt_num(*v))?;
        }
        sink.flush()
    };
    let Some(path) = &a.output else {
        write_values(&mut BufWriter::new(io::stdout().lock()))?;
        return Ok(Rendered::Done);
    };
    let file = File::create(path)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    write_values(&mut BufWriter::new(file))
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;

    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let mut table = Table::new(["path", "count", "seed", "mean"]);
    table.push(vec![
        path.display().to_string(),
        values.len().to_string(),
        a.seed.to_string(),
        fmt_num(mean),
    ]);
    Ok(Rendered::Report {
        output: CommandOutput {
            inputs: json!({ "params": params_json(&params), "count": a.count, "seed": a.seed }),
            results: json!({ "path": path.display().to_string(), "count": values.len(), "mean": mean }),
            violations: Vec::new(),
            table,
            exit_code: exit::OK,
        },
        format: a.format,
        dest: None,
    })
}

fn verify(a: &VerifyArgs) -> Result<CommandOutput, CliError> {
    let mut settings = SweepSettings::default();
    if let Some(p) = a.points {
        settings.shape_points = p;
    }
    if let Some(t) = a.tolerance {
        settings.slack = t;
    }
    if let Some(s) = a.max_subdivisions {
        settings.quadrature = QuadratureConfig::new(
            s,
            settings.quadrature.abs_tol,
            settings.quadrature.rel_tol,
        )?;
    }
    let report = run_full_sweep(&settings)?;

    let mut table = Table::new([
        "check_name",
        "families",
        "total_checks",
        "violations",
        "worst_margin",
        "elapsed_ms",
    ]);
    let mut checks = Vec::new();
    for r in &report.reports {
        let families: Vec<&str> = r.families.iter().map(|f| f.as_str()).collect();
        let elapsed_ms = r.elapsed.as_secs_f64() * 1e3;
        table.push(vec![
            r.check_name.clone(),
            families.join(";"),
            r.total_checks.to_string(),
            r.violations.len().to_string(),
            fmt_num(r.worst_margin),
            fmt_num(elapsed_ms),
        ]);
        checks.push(json!({
            "check_name": r.check_name,
            "families": r.families,
            "total_checks": r.total_checks,
            "violation_count": r.violations.len(),
            "worst_margin": r.worst_margin,
            "elapsed_ms": elapsed_ms,
        }));
    }
    let violations = report
        .violations()
        .map(|v| serde_json::to_value(v).expect("violation records serialize"))
        .collect();
    Ok(CommandOutput {
        inputs: json!({
            "points": settings.shape_points,
            "tolerance": settings.slack,
            "max_subdivisions": settings.quadrature.max_subdivisions,
        }),
        results: json!({
            "pass": report.passed(),
            "total_checks": report.total_checks,
            "violation_count": report.violation_count,
            "checks": checks,
        }),
        violations,
        table,
        exit_code: if report.passed() { exit::OK } else { exit::VIOLATION },
    })
}

fn pdf_data(a: &PdfDataArgs) -> Result<CommandOutput, CliError> {
    if !(a.x_min.is_finite() && a.x_max.is_finite() && a.x_min < a.x_max) {
        return Err(CliError::input(format!(
            "need finite x-min < x-max, got [{}, {}]",
            a.x_min, a.x_max
        )));
    }
    if a.points < 2 {
        return Err(CliError::input("--points must be at least 2"));
    }
    let sets = param_sets(&a.params)?;
    let step = (a.x_max - a.x_min) / (a.points - 1) as f64;
    let xs: Vec<f64> = (0..a.points)
        .map(|j| if j == a.points - 1 { a.x_max } else { a.x_min + step * j as f64 })
        .collect();
    let columns: Vec<Vec<f64>> = sets
        .iter()
        .map(|p| xs.iter().map(|&x| pdf(p, x)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;

    let mut header = vec!["x".to_string()];
    header.extend(sets.iter().map(param_label));
    let mut table = Table::new(header);
    for (j, &x) in xs.iter().enumerate() {
        let mut row = vec![fmt_num(x)];
        row.extend(columns.iter().map(|c| fmt_num(c[j])));
        table.push(row);
    }
    let series: Vec<Value> = sets
        .iter()
        .zip(&columns)
        .map(|(p, c)| json!({ "params": params_json(p), "label": param_label(p), "pdf": c }))
        .collect();
    Ok(CommandOutput {
        inputs: json!({
            "family": a.params.family,
            "x_min": a.x_min,
            "x_max": a.x_max,
            "points": a.points,
            "params": sets.iter().map(params_json).collect::<Vec<_>>(),
        }),
        results: json!({ "x": xs, "series": series }),
        violations: Vec::new(),
        table,
        exit_code: exit::OK,
    })
}
