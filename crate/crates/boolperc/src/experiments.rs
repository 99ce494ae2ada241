//! Named experiments: each resolves its parameters, calls the estimators and
//! produces CSV/JSON/SVG artifacts plus pass/fail agreement checks.

use std::path::{Path, PathBuf};
use std::time::Instant;

use boolperc_core::estimate::{
    derivative_report, estimate_volume_fraction, mecke_check, rate_bound_report,
    stabilization_survey, theta_curve, Problem,
};
use boolperc_core::threshold::{estimate_tc, slab_crossing_profile};
use boolperc_core::{Estimate, RadiusMeasure, TargetSet};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::least_squares;
use crate::config::{ConfigError, ExperimentConfig, Kind};
use crate::output::{csv_string, json_string, svg_plot, OutputDir, Row, Series, VERSION};
use crate::runner::Parallel;

/// Default output directory when neither the config nor `--out` names one.
pub const DEFAULT_OUTPUT_DIR: &str = "boolperc-out";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("estimator failed: {0}")]
    Estimator(#[from] boolperc_core::Error),
    #[error("could not write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunError {
    /// Process exit status: 1 for configuration errors, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            _ => 2,
        }
    }
}

/// One agreement check reported in `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    /// The main JSON document of the experiment.
    pub result: Value,
    pub all_pass: bool,
}

/// Artifacts of one experiment before they are written.
#[derive(Default)]
struct Artifacts {
    files: Vec<(String, String)>,
    checks: Vec<Check>,
    result: Value,
}

impl Artifacts {
    fn csv(&mut self, name: &str, cfg: &ExperimentConfig, rows: &[Row]) {
        self.files.push((
            name.into(),
            csv_string(cfg.master_seed, cfg.kind.name(), rows),
        ));
    }

    fn json(&mut self, name: &str, v: &Value) {
        self.files.push((name.into(), json_string(v)));
    }

    fn svg(&mut self, name: &str, contents: String) {
        self.files.push((name.into(), contents));
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, pass, detail));
    }
}

fn est_json(e: &Estimate) -> Value {
    json!({ "mean": e.mean, "stderr": e.stderr, "reps": e.reps, "seed": format!("{}/{}", e.seed.master_seed, e.seed.stream_label) })
}

/// Resolves `config`, runs it on a pool of `config.workers` threads and writes
/// every artifact into the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let cfg = config.resolve()?;
    let runner = Parallel::new(cfg.workers())?;
    let started = Instant::now();
    let art = match cfg.kind {
        Kind::VolumeFraction => volume_fraction(&cfg, &runner)?,
        Kind::Mecke => mecke(&cfg, &runner)?,
        Kind::ThetaCurve => theta(&cfg, &runner)?,
        Kind::Derivative => derivative(&cfg, &runner)?,
        Kind::Threshold => threshold(&cfg, &runner)?,
        Kind::RateBound => rate_bound(&cfg, &runner)?,
        Kind::Slab => slab(&cfg, &runner)?,
        Kind::StabRadius => stab_radius(&cfg, &runner)?,
    };
    let wall = started.elapsed().as_secs_f64();

    let root = PathBuf::from(cfg.output_dir.as_deref().unwrap_or(DEFAULT_OUTPUT_DIR));
    let mut out = OutputDir::create(&root)?;
    for (name, contents) in &art.files {
        out.write(name, contents)?;
    }
    let all_pass = art.checks.iter().all(|c| c.pass);
    let summary = json!({
        "kind": cfg.kind.name(),
        "master_seed": cfg.master_seed,
        "all_pass": all_pass,
        "checks": art.checks,
    });
    out.write("summary.json", &json_string(&summary))?;
    let manifest = json!({
        "library_version": VERSION,
        "config": cfg,
        "workers": runner.workers(),
        "wall_time_seconds": wall,
    });
    out.write("manifest.json", &json_string(&manifest))?;
    Ok(RunOutput {
        out_dir: out.root().to_path_buf(),
        files: out.files().to_vec(),
        checks: art.checks,
        result: art.result,
        all_pass,
    })
}

/// Reads, overrides and runs a configuration file; the CLI entry point.
pub fn run_file(
    path: &Path,
    seed: Option<u64>,
    out: Option<&Path>,
    workers: Option<usize>,
) -> Result<RunOutput, RunError> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    if let Some(o) = out {
        cfg.output_dir = Some(o.to_string_lossy().into_owned());
    }
    if let Some(w) = workers {
        cfg.workers = Some(w);
    }
    run_experiment(&cfg)
}

fn problem(
    cfg: &ExperimentConfig,
    f: &RadiusMeasure,
    target: &TargetSet,
) -> Result<Problem, RunError> {
    let n = cfg.params.n.expect("resolved");
    Problem::new(f.clone(), target.clone(), n, cfg.dimension).map_err(|e| match e {
        boolperc_core::Error::TargetTooLarge { .. } => {
            ConfigError::new("params.n", e.to_string()).into()
        }
        other => other.into(),
    })
}

fn volume_fraction(cfg: &ExperimentConfig, runner: &Parallel) -> Result<Artifacts, RunError> {
    let f = cfg.radius_measure()?;
    let p = &cfg.params;
    let (reps, k) = (p.reps.unwrap(), cfg.k_sigma());
    let mut art = Artifacts::default();
    let mut rows = Vec::new();
    let mut doc = Vec::new();
    let mut est_series = Series {
        label: "estimate".into(),
        x: vec![],
        y: vec![],
        se: vec![],
    };
    let mut exact_series = Series {
        label: "closed form".into(),
        x: vec![],
        y: vec![],
        se: vec![],
    };
    for &t in p.t_grid.as_ref().unwrap() {
        let e = estimate_volume_fraction(&f, t, cfg.dimension, reps, cfg.master_seed, runner)?;
        let exact = f.closed_form_volume_fraction(t, cfg.dimension);
        let dev = (e.mean - exact).abs();
        let pass = dev < k * e.stderr;
        rows.push(
            Row::from_estimate("volume_fraction", Some(t), None, &e)
                .with_extra("exact", crate::output::fmt_f64(exact)),
        );
        art.check(
            format!("volume_fraction t={t}"),
            pass,
            format!(
                "|mean - exact| = {dev:.3e}, {k} stderr = {:.3e}",
                k * e.stderr
            ),
        );
        doc.push(json!({ "t": t, "estimate": est_json(&e), "exact": exact, "pass": pass }));
        est_series.x.push(t);
        est_series.y.push(e.mean);
        est_series.se.push(e.stderr);
        exact_series.x.push(t);
        exact_series.y.push(exact);
        exact_series.se.push(0.0);
    }
    art.csv("volume_fraction.csv", cfg, &rows);
    art.result = json!({ "rows": doc });
    art.json("volume_fraction.json", &art.result.clone());
    art.svg(
        "volume_fraction.svg",
        svg_plot(
            "volume fraction",
            "t",
            "P(origin covered)",
            &[est_series, exact_series],
            k,
        ),
    );
    Ok(art)
}

fn mecke(cfg: &ExperimentConfig, runner: &Parallel) -> Result<Artifacts, RunError> {
    let f = cfg.radius_measure()?;
    let p = &cfg.params;
    let (t, reps, k) = (p.t.unwrap(), p.reps.unwrap(), cfg.k_sigma());
    let (radius, m) = (p.region_radius.unwrap(), p.max_count.unwrap());
    let capped = mecke_check(
        &f,
        t,
        cfg.dimension,
        radius,
        m,
        reps,
        cfg.master_seed,
        runner,
    )?;
    let first = mecke_check(
        &f,
        t,
        cfg.dimension,
        radius,
        u64::MAX,
        reps,
        cfg.master_seed,
        runner,
    )?;
    let mut art = Artifacts::default();
    let within = |e: &Estimate, v: f64| e.mean == v || (e.mean - v).abs() < k * e.stderr;
    let diff = (capped.lhs.mean - capped.rhs.mean).abs();
    art.check(
        format!("mecke max_count={m}"),
        capped.agrees(k),
        format!(
            "|lhs - rhs| = {diff:.3e}, {k} combined stderr = {:.3e}",
            k * capped.lhs.combined_stderr(&capped.rhs)
        ),
    );
    art.check(
        "mecke first moment lhs",
        within(&first.lhs, first.first_moment),
        format!(
            "lhs = {:.6}, t|F|vol(D) = {:.6}",
            first.lhs.mean, first.first_moment
        ),
    );
    art.check(
        "mecke first moment rhs",
        within(&first.rhs, first.first_moment),
        format!(
            "rhs = {:.6}, t|F|vol(D) = {:.6}",
            first.rhs.mean, first.first_moment
        ),
    );
    let rows = vec![
        Row::from_estimate("mecke_lhs", Some(t), None, &capped.lhs).with_extra("max_count", m),
        Row::from_estimate("mecke_rhs", Some(t), None, &capped.rhs).with_extra("max_count", m),
        Row::from_estimate("mecke_lhs", Some(t), None, &first.lhs).with_extra("max_count", "inf"),
        Row::from_estimate("mecke_rhs", Some(t), None, &first.rhs).with_extra("max_count", "inf"),
    ];
    art.csv("mecke.csv", cfg, &rows);
    art.result = json!({
        "t": t,
        "region_radius": radius,
        "capped": { "max_count": m, "lhs": est_json(&capped.lhs), "rhs": est_json(&capped.rhs) },
        "first_moment": { "lhs": est_json(&first.lhs), "rhs": est_json(&first.rhs), "exact": first.first_moment },
    });
    art.json("mecke.json", &art.result.clone());
    Ok(art)
}

fn theta(cfg: &ExperimentConfig, runner: &Parallel) -> Result<Artifacts, RunError> {
    let f = cfg.radius_measure()?;
    let pr = problem(cfg, &f, &cfg.target_set()?)?;
    let p = &cfg.params;
    let grid = p.t_grid.as_ref().unwrap();
    let est = theta_curve(&pr, grid, p.reps.unwrap(), cfg.master_seed, runner)?;
    let inversions = est.windows(2).filter(|w| w[1].mean < w[0].mean).count();
    let mut art = Artifacts::default();
    art.check(
        "theta monotone in t",
        inversions == 0,
        format!("{inversions} inversions over {} points", grid.len()),
    );
    let rows: Vec<Row> = grid
        .iter()
        .zip(&est)
        .map(|(&t, e)| Row::from_estimate("theta", Some(t), Some(pr.n), e))
        .collect();
    art.csv("theta_curve.csv", cfg, &rows);
    art.result = json!({
        "n": pr.n,
        "inversions": inversions,
        "rows": grid.iter().zip(&est).map(|(&t, e)| json!({ "t": t, "theta": est_json(e) })).collect::<Vec<_>>(),
    });
    art.json("theta_curve.json", &art.result.clone());
    let series = Series {
        label: format!("n = {}", pr.n),
        x: grid.clone(),
        y: est.iter().map(|e| e.mean).collect(),
        se: est.iter().map(|e| e.stderr).collect(),
    };
    art.svg(
        "theta_curve.svg",
        svg_plot(
            "connection probability",
            "t",
            "theta",
            &[series],
            cfg.k_sigma(),
        ),
    );
    Ok(art)
}

fn derivative(cfg: &ExperimentConfig, runner: &Parallel) -> Result<Artifacts, RunError> {
    let f = cfg.radius_measure()?;
    let pr = problem(cfg, &f, &cfg.target_set()?)?;
    let p = &cfg.params;
    let (t, k) = (p.t.unwrap(), cfg.k_sigma());
    let rep = derivative_report(
        &pr,
        t,
        p.dt.unwrap(),
        p.reps.unwrap(),
        p.mc_points.unwrap(),
        cfg.master_seed,
        runner,
    )?;
    let mut art = Artifacts::default();
    let mut estimates = serde_json::Map::new();
    for (name, e) in rep.estimates() {
        let row = Row::from_estimate(name, Some(t), Some(pr.n), e);
        let row = match name {
            "finite_difference" => row.with_extra("dt", p.dt.unwrap()),
            "added_grain" => row.with_extra("mc_points", p.mc_points.unwrap()),
            _ => row,
        };
        art.csv(&format!("derivative_{name}.csv"), cfg, &[row]);
        let positive = e.mean > k * e.stderr;
        art.check(
            format!("{name} positive"),
            positive,
            format!("mean = {:.6}, {k} stderr = {:.6}", e.mean, k * e.stderr),
        );
        estimates.insert(
            name.into(),
            json!({ "estimate": est_json(e), "positive": positive }),
        );
    }
    let mut pairs = Vec::new();
    for (a, b, d, se) in rep.pairwise() {
        let pass = d < k * se;
        art.check(
            format!("{a} vs {b}"),
            pass,
            format!(
                "|difference| = {d:.3e}, {k} combined stderr = {:.3e}",
                k * se
            ),
        );
        pairs.push(
            json!({ "a": a, "b": b, "abs_difference": d, "combined_stderr": se, "pass": pass }),
        );
    }
    art.result = json!({
        "t": t,
        "n": pr.n,
        "k_sigma": k,
        "estimates": estimates,
        "pairwise": pairs,
        "all_agree": rep.agrees(k),
    });
    art.json("derivative_report.json", &art.result.clone());
    Ok(art)
}

fn threshold(cfg: &ExperimentConfig, runner: &Parallel) -> Result<Artifacts, RunError> {
    let f = cfg.radius_measure()?;
    let p = &cfg.params;
    let sizes = p.sizes.as_ref().unwrap();
    let res = estimate_tc(
        &f,
        sizes,
        cfg.dimension,
        p.reps.unwrap(),
        p.tol.unwrap(),
        cfg.master_seed,
        runner,
    )?;
    let mut art = Artifacts::default();
    let seed = format!("{}/threshold", cfg.master_seed);
    let mut rows: Vec<Row> = res
        .per_size
        .iter()
        .map(|s| {
            Row {
                op: "t_half".into(),
                t: None,
                n: None,
                reps: p.reps.unwrap(),
                mean: s.t_half,
                stderr: s.stderr,
                seed: seed.clone(),
                extra: String::new(),
            }
            .with_extra("size", s.size)
        })
        .collect();
    rows.push(
        Row {
            op: "tc_hat".into(),
            t: None,
            n: None,
            reps: p.reps.unwrap(),
            mean: res.tc_hat,
            stderr: res.per_size.last().map_or(f64::NAN, |s| s.stderr),
            seed,
            extra: String::new(),
        }
        .with_extra("ci_half_width", crate::output::fmt_f64(res.ci_half_width)),
    );
    art.csv("threshold.csv", cfg, &rows);
    let ok = res.tc_hat.is_finite() && res.tc_hat > 0.0 && res.ci_half_width.is_finite();
    art.check(
        "threshold bracketed",
        ok,
        format!("tc_hat = {:.6} +- {:.6}", res.tc_hat, res.ci_half_width),
    );
    let m = res.per_size.len();
    let spread = if m >= 2 {
        (res.per_size[m - 1].t_half - res.per_size[m - 2].t_half).abs() / res.per_size[m - 1].t_half
    } else {
        f64::NAN
    };
    art.check(
        "spread between two largest sizes below 10%",
        spread < 0.1,
        format!("relative spread = {spread:.4}"),
    );
    art.result = json!({
        "tc_hat": res.tc_hat,
        "relative_spread": spread,
        "ci_half_width": res.ci_half_width,
        "sizes_used": res.sizes_used,
        "tol": p.tol.unwrap(),
        "per_size": res.per_size.iter().map(|s| json!({ "size": s.size, "t_half": s.t_half, "stderr": s.stderr })).collect::<Vec<_>>(),
    });
    art.json("threshold.json", &art.result.clone());
    let series = Series {
        label: "t_half".into(),
        x: res.per_size.iter().map(|s| s.size).collect(),
        y: res.per_size.iter().map(|s| s.t_half).collect(),
        se: res.per_size.iter().map(|s| s.stderr).collect(),
    };
    art.svg(
        "threshold.svg",
        svg_plot(
            "half-crossing intensity",
            "size a",
            "t_half",
            &[series],
            cfg.k_sigma(),
        ),
    );
    Ok(art)
}

fn rate_bound(cfg: &ExperimentConfig, runner: &Parallel) -> Result<Artifacts, RunError> {
    let f = cfg.radius_measure()?;
    let pr = problem(cfg, &f, &cfg.target_set()?)?;
    let p = &cfg.params;
    let (tc, k) = (p.tc_hat.unwrap(), cfg.k_sigma());
    let grid = p.t_grid.as_ref().unwrap();
    let b = f.support_bound();
    let rep = rate_bound_report(
        &pr,
        grid,
        tc,
        b,
        p.reps.unwrap(),
        p.delta.unwrap(),
        k,
        cfg.master_seed,
        runner,
    )?;
    let power_alpha = p.power_alpha.unwrap();
    let power_violations = rep.violations_with(power_alpha);
    let mut art = Artifacts::default();
    art.check(
        "rate bound holds",
        rep.violations == 0,
        format!(
            "{} violations beyond {k} combined stderr, alpha_hat = {:.6}",
            rep.violations, rep.alpha_hat.mean
        ),
    );
    art.check(
        format!("power check alpha={power_alpha}"),
        power_violations >= 1,
        format!("{power_violations} violations"),
    );
    let mut rows = vec![
        Row::from_estimate("theta", Some(tc), Some(pr.n), &rep.theta_at_tc),
        Row::from_estimate("alpha", Some(tc), None, &rep.alpha_hat)
            .with_extra("b", b)
            .with_extra("delta", p.delta.unwrap()),
    ];
    let table = rep.rows();
    let power = rep.rows_with(power_alpha, 0.0);
    let mut doc_rows = Vec::new();
    for (i, &t) in grid.iter().enumerate() {
        let (lhs, rhs, se, violated) = table[i];
        rows.push(Row::from_estimate(
            "theta",
            Some(t),
            Some(pr.n),
            &rep.theta[i],
        ));
        rows.push(
            Row::from_estimate("increment", Some(t), Some(pr.n), &rep.increment[i])
                .with_extra("rhs", crate::output::fmt_f64(rhs))
                .with_extra("violated", violated),
        );
        doc_rows.push(json!({
            "t": t,
            "theta": est_json(&rep.theta[i]),
            "lhs": lhs,
            "rhs": rhs,
            "combined_stderr": se,
            "violated": violated,
            "power_rhs": power[i].1,
            "power_violated": power[i].3,
        }));
    }
    art.csv("rate_bound.csv", cfg, &rows);
    art.result = json!({
        "tc_hat": tc,
        "n": pr.n,
        "b": b,
        "k_sigma": k,
        "theta_at_tc": est_json(&rep.theta_at_tc),
        "alpha_hat": est_json(&rep.alpha_hat),
        "rows": doc_rows,
        "violations": rep.violations,
        "power_alpha": power_alpha,
        "power_violations": power_violations,
        "pass": rep.violations == 0,
        "power_pass": power_violations >= 1,
    });
    art.json("rate_bound.json", &art.result.clone());
    let lhs = Series {
        label: "theta(t) - theta(tc)".into(),
        x: grid.clone(),
        y: table.iter().map(|r| r.0).collect(),
        se: rep.increment.iter().map(|e| e.stderr).collect(),
    };
    let rhs = Series {
        label: "bound".into(),
        x: grid.clone(),
        y: table.iter().map(|r| r.1).collect(),
        se: table
            .iter()
            .zip(&rep.increment)
            .map(|(r, e)| (r.2 * r.2 - e.stderr * e.stderr).max(0.0).sqrt())
            .collect(),
    };
    art.svg(
        "rate_bound.svg",
        svg_plot("rate bound", "t", "increment", &[lhs, rhs], k),
    );
    Ok(art)
}

fn slab(cfg: &ExperimentConfig, runner: &Parallel) -> Result<Artifacts, RunError> {
    let f = cfg.radius_measure()?;
    let p = &cfg.params;
    let (t, k) = (p.t.unwrap(), cfg.k_sigma());
    let ks = p.k_grid.as_ref().unwrap();
    let side = p.side.unwrap();
    let est = slab_crossing_profile(
        &f,
        t,
        ks,
        side,
        cfg.dimension,
        p.reps.unwrap(),
        cfg.master_seed,
        runner,
    )?;
    let mut art = Artifacts::default();
    let inversions = est.windows(2).filter(|w| w[1].mean < w[0].mean).count();
    art.check(
        "slab crossing monotone in K",
        inversions == 0,
        format!("{inversions} inversions"),
    );
    let (lo, hi) = (&est[0], &est[est.len() - 1]);
    let gap = hi.mean - lo.mean;
    let se = lo.combined_stderr(hi);
    art.check(
        format!("slab K={} exceeds K={}", ks[ks.len() - 1], ks[0]),
        gap > k * se,
        format!(
            "difference = {gap:.4e}, {k} combined stderr = {:.4e}",
            k * se
        ),
    );
    let first_half = ks
        .iter()
        .zip(&est)
        .find(|(_, e)| e.mean > 0.5)
        .map(|(&kk, _)| kk);
    let rows: Vec<Row> = ks
        .iter()
        .zip(&est)
        .map(|(&kk, e)| {
            Row::from_estimate("slab_crossing", Some(t), None, e)
                .with_extra("K", kk)
                .with_extra("side", side)
        })
        .collect();
    art.csv("slab.csv", cfg, &rows);
    art.result = json!({
        "t": t,
        "side": side,
        "rows": ks.iter().zip(&est).map(|(&kk, e)| json!({ "K": kk, "crossing": est_json(e) })).collect::<Vec<_>>(),
        "first_K_above_half": first_half,
    });
    art.json("slab.json", &art.result.clone());
    let series = Series {
        label: format!("t = {t}"),
        x: ks.clone(),
        y: est.iter().map(|e| e.mean).collect(),
        se: est.iter().map(|e| e.stderr).collect(),
    };
    art.svg(
        "slab.svg",
        svg_plot(
            "slab crossing probability",
            "K",
            "P(crossing)",
            &[series],
            k,
        ),
    );
    Ok(art)
}

fn stab_radius(cfg: &ExperimentConfig, runner: &Parallel) -> Result<Artifacts, RunError> {
    let f = cfg.radius_measure()?;
    let target = cfg.target_set()?;
    let p = &cfg.params;
    let (t, reps, k_max) = (p.t.unwrap(), p.reps.unwrap(), p.k_max.unwrap());
    let survey = stabilization_survey(
        &f,
        t,
        &target,
        cfg.dimension,
        p.half_width.unwrap(),
        reps,
        cfg.master_seed,
        runner,
    )?;
    let counts = survey.survival_counts(k_max);
    let total = survey.uncensored() as f64;
    let mut art = Artifacts::default();
    let seed = format!("{}/stab-radius", cfg.master_seed);
    let mut rows = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut doc_rows = Vec::new();
    for (i, &c) in counts.iter().enumerate() {
        let kk = (i + 1) as u64;
        let s = c as f64 / total;
        let se = (s * (1.0 - s) / total).sqrt();
        rows.push(
            Row {
                op: "survival".into(),
                t: Some(t),
                n: Some(kk as f64),
                reps,
                mean: s,
                stderr: se,
                seed: seed.clone(),
                extra: String::new(),
            }
            .with_extra("count", c),
        );
        if c > 0 {
            xs.push(kk as f64);
            ys.push(s.ln());
        }
        doc_rows.push(json!({ "n": kk, "count": c, "survival": s, "stderr": se }));
    }
    art.csv("stab_radius.csv", cfg, &rows);
    let fit = least_squares(&xs, &ys);
    match &fit {
        Some(fit) => art.check(
            "log-survival slope negative",
            fit.slope_negative(),
            format!(
                "slope = {:.4} +- {:.4} (95%) over {} points",
                fit.slope, fit.slope_ci95, fit.points
            ),
        ),
        None => art.check(
            "log-survival slope negative",
            false,
            format!("only {} nonzero survival points", xs.len()),
        ),
    }
    let cf = survey.censored_fraction();
    art.check(
        "censored fraction below 5%",
        cf < 0.05,
        format!("censored fraction = {cf:.4}"),
    );
    art.result = json!({
        "t": t,
        "b": survey.b,
        "half_width": p.half_width.unwrap(),
        "reps": reps,
        "censored": survey.censored(),
        "censored_fraction": cf,
        "rows": doc_rows,
        "fit": fit,
    });
    art.json("stab_radius.json", &art.result.clone());
    Ok(art)
}
