//! Reports behind the command-line tool: one function per subcommand, each
//! returning a [`Report`] that renders as CSV or as a single JSON object.
//!
//! Floats are written with 17 significant digits so that they round-trip.
//! Logarithms are natural and their fields are prefixed `ln_`.

use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{Map, Number, Value};

use crate::asymptotics::{
    alpha_tau, classify, log_chi_asymptotic, log_chi_crossover, mean_length_asymptotic, Regime,
};
use crate::error::{domain, Error, Result};
use crate::exact::SawModel;
use crate::exact::{
    length_pmf, log_chi_gamma, log_chi_sum_with_cap, log_mgf_length, mean_length, variance_length,
};
use crate::limit_laws::{
    convergence_distance, ks_distance, ks_grid, levy_to_point_mass, tv_distance_discrete, LimitLaw,
    Metric,
};
use crate::sampling::{monte_carlo_summary, EmpiricalCdf};
use crate::scaling::Scaling;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest number of rows an alpha table may have.
pub const MAX_TABLE_ROWS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    UInt(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// `x` with 17 significant digits; `NaN`, `inf` and `-inf` otherwise.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_owned()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::UInt(v) => Value::from(*v),
            Cell::Float(v) if v.is_finite() => {
                Value::Number(Number::from_str(&format_float(*v)).expect("formatted float parses"))
            }
            Cell::Float(_) => Value::Null,
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

type Fields = Vec<(String, Cell)>;

fn fields_json(fields: &Fields) -> Value {
    Value::Object(fields.iter().map(|(k, v)| (k.clone(), v.json())).collect())
}

/// Inputs, regime, a table of quantities and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    inputs: Fields,
    regime: Option<Fields>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    diagnostics: Fields,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            inputs: vec![("command".to_owned(), command.into())],
            regime: None,
            columns: Vec::new(),
            rows: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.inputs.push((key.to_owned(), value.into()));
        self
    }

    pub fn diagnostic(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.diagnostics.push((key.to_owned(), value.into()));
        self
    }

    pub fn set_regime(&mut self, regime: &Regime, window_exponent: f64) -> &mut Self {
        let mut fields: Fields = vec![("name".to_owned(), regime.name().into())];
        match *regime {
            Regime::Subcritical { delta } | Regime::Supercritical { delta } => {
                fields.push(("delta".to_owned(), delta.into()))
            }
            Regime::Critical { tau_n } => fields.push(("tau_n".to_owned(), tau_n.into())),
        }
        fields.push(("window_exponent".to_owned(), window_exponent.into()));
        self.regime = Some(fields);
        self
    }

    pub fn set_columns(&mut self, columns: &[&str]) -> &mut Self {
        self.columns = columns.iter().map(|c| (*c).to_owned()).collect();
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> &mut Self {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
        self
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Value of `column` in the first row.
    pub fn quantity(&self, column: &str) -> Option<&Cell> {
        let i = self.columns.iter().position(|c| c == column)?;
        self.rows.first().map(|r| &r[i])
    }

    pub fn diagnostic_value(&self, key: &str) -> Option<&Cell> {
        self.diagnostics
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
    }

    /// The quantity table with a header row, `\n`-terminated.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let quantities = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::json))
                        .collect::<Map<_, _>>(),
                )
            })
            .collect();
        let mut obj = Map::new();
        obj.insert("version".to_owned(), Value::String(VERSION.to_owned()));
        obj.insert("inputs".to_owned(), fields_json(&self.inputs));
        obj.insert(
            "regime".to_owned(),
            self.regime.as_ref().map_or(Value::Null, fields_json),
        );
        obj.insert("quantities".to_owned(), Value::Array(quantities));
        obj.insert("diagnostics".to_owned(), fields_json(&self.diagnostics));
        Value::Object(obj)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// What the model was specified by on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Weight(f64),
    Scaled(Scaling),
}

impl ModelSpec {
    pub fn model(&self, n: u64) -> Result<SawModel> {
        match self {
            ModelSpec::Weight(z) => SawModel::new(n, *z),
            ModelSpec::Scaled(s) => s.model(n),
        }
    }

    pub fn scaling(&self) -> Option<Scaling> {
        match self {
            ModelSpec::Weight(_) => None,
            ModelSpec::Scaled(s) => Some(*s),
        }
    }

    fn describe(&self) -> String {
        match self {
            ModelSpec::Weight(z) => format!("z={}", format_float(*z)),
            ModelSpec::Scaled(s) => s.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Asymptotic,
    Both,
}

impl Mode {
    fn name(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Asymptotic => "asymptotic",
            Mode::Both => "both",
        }
    }
}

fn check_cap(n: u64, cap: u64) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

fn model_inputs(report: &mut Report, n: u64, spec: &ModelSpec, model: &SawModel) {
    report
        .input("n", n)
        .input("spec", spec.describe())
        .input("z", model.z())
        .input("y", model.y());
}

/// `ln χ` exactly (incomplete gamma, cross-checked by the direct sum),
/// asymptotically, or both with their ratio.
pub fn chi_report(n: u64, spec: &ModelSpec, mode: Mode, w: f64, cap: u64) -> Result<Report> {
    let model = spec.model(n)?;
    let regime = classify(&model, w)?;
    let mut report = Report::new("chi");
    model_inputs(&mut report, n, spec, &model);
    report.input("mode", mode.name()).set_regime(&regime, w);

    let mut columns = vec!["n", "z", "y", "regime"];
    let mut row: Vec<Cell> = vec![
        n.into(),
        model.z().into(),
        model.y().into(),
        regime.name().into(),
    ];
    let mut exact = None;
    if mode != Mode::Asymptotic {
        check_cap(n, cap)?;
        let gamma = log_chi_gamma(&model)?.ln();
        let sum = log_chi_sum_with_cap(&model, cap)?.ln();
        report
            .diagnostic("ln_chi_sum", sum)
            .diagnostic("ln_chi_sum_gamma_gap", (sum - gamma).abs());
        columns.push("ln_chi_exact");
        row.push(gamma.into());
        exact = Some(gamma);
    }
    if mode != Mode::Exact {
        let asym = log_chi_asymptotic(&model, &regime)?.ln();
        columns.push("ln_chi_asymptotic");
        row.push(asym.into());
        if let Some(exact) = exact {
            columns.push("ratio");
            row.push((asym - exact).exp().into());
        }
    }
    report.set_columns(&columns).push_row(row);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthStat {
    Mean,
    Var,
    /// Rows stop once the remaining tail mass is below `tail_eps`.
    Pmf {
        tail_eps: Option<f64>,
    },
    Mgf {
        t: f64,
    },
}

/// Exact statistics of the length `L`.
pub fn length_report(
    n: u64,
    spec: &ModelSpec,
    stat: LengthStat,
    w: f64,
    cap: u64,
) -> Result<Report> {
    let model = spec.model(n)?;
    check_cap(n, cap)?;
    let regime = classify(&model, w)?;
    let mut report = Report::new("length");
    model_inputs(&mut report, n, spec, &model);
    report.set_regime(&regime, w);
    match stat {
        LengthStat::Mean => {
            let exact = mean_length(&model)?;
            let asym = mean_length_asymptotic(&model, &regime)?;
            report.input("stats", "mean");
            report
                .set_columns(&["n", "z", "regime", "mean", "mean_asymptotic", "ratio"])
                .push_row(vec![
                    n.into(),
                    model.z().into(),
                    regime.name().into(),
                    exact.into(),
                    asym.into(),
                    (exact / asym).into(),
                ]);
        }
        LengthStat::Var => {
            let var = variance_length(&model)?;
            let z_var = model.z() * var;
            report.input("stats", "var");
            report
                .set_columns(&["n", "z", "regime", "variance", "z_times_variance"])
                .push_row(vec![
                    n.into(),
                    model.z().into(),
                    regime.name().into(),
                    var.into(),
                    z_var.into(),
                ]);
            report.diagnostic(
                "z_times_variance_within_1pct_of_1",
                (z_var - 1.0).abs() <= 0.01,
            );
        }
        LengthStat::Mgf { t } => {
            let ln_mgf = log_mgf_length(&model, t)?;
            report.input("stats", "mgf").input("t", t);
            report
                .set_columns(&["n", "z", "t", "ln_mgf", "mgf"])
                .push_row(vec![
                    n.into(),
                    model.z().into(),
                    t.into(),
                    ln_mgf.into(),
                    ln_mgf.exp().into(),
                ]);
        }
        LengthStat::Pmf { tail_eps } => {
            if let Some(eps) = tail_eps {
                if !(eps > 0.0 && eps < 1.0) {
                    return domain(format!("tail-eps must lie in (0, 1), got {eps}"));
                }
                report.input("tail_eps", eps);
            }
            report.input("stats", "pmf");
            report.set_columns(&["N", "p"]);
            let pmf = length_pmf(&model)?;
            let mut cumulative = 0.0;
            let mut emitted = 0u64;
            for (k, p) in pmf.iter().enumerate() {
                report.push_row(vec![(k as u64).into(), p.into()]);
                emitted += 1;
                cumulative += p;
                if tail_eps.is_some_and(|eps| 1.0 - cumulative < eps) {
                    break;
                }
            }
            report
                .diagnostic("rows", emitted)
                .diagnostic("mass_emitted", cumulative);
        }
    }
    Ok(report)
}

/// Point `i` of `m` equal steps from `a` to `b`, rounded once.
fn lerp(a: f64, b: f64, i: u64, m: u64) -> f64 {
    (a * (m - i) as f64 + b * i as f64) / m as f64
}

/// `τ ↦ α_τ` on `tau_min, tau_min + step, …, <= tau_max`.
pub fn alpha_table_report(tau_min: f64, tau_max: f64, step: f64) -> Result<Report> {
    if !tau_min.is_finite() || !tau_max.is_finite() || tau_min > tau_max {
        return domain(format!(
            "need finite tau-min <= tau-max, got [{tau_min}, {tau_max}]"
        ));
    }
    if step <= 0.0 || !step.is_finite() {
        return domain(format!("step must be positive, got {step}"));
    }
    let range = tau_max - tau_min;
    let intervals = (range / step + 1e-9).floor();
    if intervals + 1.0 > MAX_TABLE_ROWS as f64 {
        return domain(format!(
            "alpha table would have more than {MAX_TABLE_ROWS} rows"
        ));
    }
    let intervals = intervals as u64;
    // Interpolate when the step divides the range so that both endpoints
    // (and points like τ = 0) come out exact.
    let divides = (intervals as f64 * step - range).abs() <= 1e-9 * range.max(step);
    let mut report = Report::new("alpha-table");
    report
        .input("tau_min", tau_min)
        .input("tau_max", tau_max)
        .input("step", step);
    report.set_columns(&["tau", "alpha_tau"]);
    let mut strictly_decreasing = true;
    let mut prev = f64::INFINITY;
    for i in 0..=intervals {
        let tau = if divides && intervals > 0 {
            lerp(tau_min, tau_max, i, intervals)
        } else {
            tau_min + i as f64 * step
        };
        let a = alpha_tau(tau)?;
        strictly_decreasing &= a < prev;
        prev = a;
        report.push_row(vec![tau.into(), a.into()]);
    }
    report.diagnostic("strictly_decreasing", strictly_decreasing);
    Ok(report)
}

/// Exact against crossover `ln χ` and mean across `z = 1/(n + τ√n)`.
pub fn window_scan_report(
    n: u64,
    tau_min: f64,
    tau_max: f64,
    points: u64,
    w: f64,
    cap: u64,
) -> Result<Report> {
    if !tau_min.is_finite() || !tau_max.is_finite() || tau_min > tau_max {
        return domain(format!(
            "need finite tau-min <= tau-max, got [{tau_min}, {tau_max}]"
        ));
    }
    if !(2..=MAX_TABLE_ROWS).contains(&points) {
        return domain(format!(
            "points must lie in [2, {MAX_TABLE_ROWS}], got {points}"
        ));
    }
    check_cap(n, cap)?;
    crate::asymptotics::check_window_exponent(w)?;
    let sqrt_n = (n as f64).sqrt();
    let rows: Vec<Vec<Cell>> = (0..points)
        .into_par_iter()
        .map(|i| -> Result<Vec<Cell>> {
            let tau = lerp(tau_min, tau_max, i, points - 1);
            let model = Scaling::Critical { tau }.model(n)?;
            let regime = classify(&model, w)?;
            let exact = log_chi_gamma(&model)?.ln();
            let crossover = log_chi_crossover(n, tau)?;
            let mean = mean_length(&model)?;
            let mean_asym = alpha_tau(tau)? * sqrt_n;
            Ok(vec![
                tau.into(),
                model.z().into(),
                regime.name().into(),
                exact.into(),
                crossover.into(),
                (crossover - exact).exp().into(),
                mean.into(),
                mean_asym.into(),
                (mean / mean_asym).into(),
            ])
        })
        .collect::<Result<_>>()?;
    let mut report = Report::new("window-scan");
    report
        .input("n", n)
        .input("tau_min", tau_min)
        .input("tau_max", tau_max)
        .input("points", points)
        .input("window_exponent", w);
    report.set_columns(&[
        "tau",
        "z",
        "regime",
        "ln_chi_exact",
        "ln_chi_crossover",
        "chi_ratio",
        "mean_exact",
        "mean_crossover",
        "mean_ratio",
    ]);
    let mut worst = 0.0f64;
    for row in rows {
        if let Cell::Float(r) = row[5] {
            worst = worst.max((r - 1.0).abs());
        }
        report.push_row(row);
    }
    report.diagnostic("max_abs_chi_ratio_minus_1", worst);
    Ok(report)
}

fn empirical_distance(law: &LimitLaw, scale: f64, ecdf: &EmpiricalCdf, n: u64) -> Result<f64> {
    let cdf = |x: f64| ecdf.cdf(x * scale);
    Ok(match *law {
        LimitLaw::ShiftedGeometric { p } => {
            let counts = ecdf.counts(n);
            let total: u64 = counts.iter().sum();
            let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
            let limit: Vec<f64> = (0..n).map(|k| law.pmf(k as f64).unwrap_or(0.0)).collect();
            let tail = (n as f64 * (-p).ln_1p()).exp();
            (tv_distance_discrete(&freq, &limit) + 0.5 * tail).min(1.0)
        }
        LimitLaw::PointMass { c } => {
            // Lengths are integers, so L < x·scale means L <= ⌈x·scale⌉ - 1.
            let cdf_left = |x: f64| ecdf.cdf((x * scale).ceil() - 1.0);
            levy_to_point_mass(cdf_left, cdf, c)
        }
        _ => {
            let jumps: Vec<f64> = ecdf.support().iter().map(|&k| k as f64 / scale).collect();
            ks_distance(cdf, |x| law.cdf(x), &ks_grid(law, &jumps))?
        }
    })
}

/// Distance of the rescaled length from its limit law, exactly and (with
/// `samples > 0`) from a Monte Carlo sample.
pub fn limits_report(
    n: u64,
    scaling: Scaling,
    samples: u64,
    seed: u64,
    w: f64,
    cap: u64,
) -> Result<Report> {
    let model = scaling.model(n)?;
    check_cap(n, cap)?;
    let regime = classify(&model, w)?;
    let conv = convergence_distance(&model, scaling)?;
    let mut report = Report::new("limits");
    model_inputs(&mut report, n, &ModelSpec::Scaled(scaling), &model);
    report
        .input("samples", samples)
        .input("seed", seed)
        .set_regime(&regime, w);

    let law_name = match conv.law {
        LimitLaw::ShiftedGeometric { .. } => "shifted-geometric",
        LimitLaw::Exponential { .. } => "exponential",
        LimitLaw::XTau { .. } => "x-tau",
        LimitLaw::PointMass { .. } => "point-mass",
    };
    let law_param = match conv.law {
        LimitLaw::ShiftedGeometric { p } => p,
        LimitLaw::Exponential { rate } => rate,
        LimitLaw::XTau { tau } => tau,
        LimitLaw::PointMass { c } => c,
    };
    let mut columns = vec![
        "n",
        "law",
        "law_parameter",
        "scale",
        "metric",
        "distance_exact",
        "mean_exact",
        "mean_limit",
    ];
    let mut row: Vec<Cell> = vec![
        n.into(),
        law_name.into(),
        law_param.into(),
        conv.scale.into(),
        conv.metric.name().into(),
        conv.distance.into(),
        conv.exact_mean.into(),
        conv.law.mean().into(),
    ];
    if samples > 0 {
        let summary = monte_carlo_summary(&model, samples, seed)?;
        let dist = empirical_distance(&conv.law, conv.scale, &summary.ecdf, n)?;
        columns.extend(["distance_sampled", "mean_sampled"]);
        row.extend([dist.into(), (summary.mean / conv.scale).into()]);
        report.diagnostic("sampler", summary.strategy.name());
    }
    if conv.metric == Metric::Levy {
        report.diagnostic(
            "note",
            "Levy distance used: Kolmogorov distance to a point mass does not vanish under weak convergence",
        );
    }
    report.set_columns(&columns).push_row(row);
    Ok(report)
}
