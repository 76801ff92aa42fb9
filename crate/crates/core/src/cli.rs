//! The `foliate` experiment runner.
//!
//! Three subcommands share one flag set:
//!
//! * `run` integrates one method from one initial condition or a bundle and
//!   writes the trajectory with its leaf values.
//! * `compare` runs several methods on the same system, step and initial
//!   conditions and adds the per-step leaf spread of each method.
//! * `order` estimates the convergence order of one method.
//!
//! Values are resolved in three layers: built-in defaults, then a JSON
//! `--config` file, then command-line flags (and `FOLIATE_SEED`).
//!
//! CSV columns:
//!
//! | command   | columns                                                  |
//! |-----------|----------------------------------------------------------|
//! | `run`     | `[ic,] step, t, x0.., I0..`                              |
//! | `compare` | `method, ic, step, t, x0.., I0.., spread`                |
//! | `order`   | `tau, error, local_slope, fitted_slope`                  |
//!
//! The `ic` column appears in `run` output only when more than one initial
//! condition is given. JSON output is `{"meta": .., "data": {"columns": ..,
//! "rows": ..}}` with the same columns; `meta` holds the resolved
//! configuration.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::diagnostics::{circle_points, convergence_order, integrate_builtin, leaf_spread, Trajectory};
use crate::error::{Error, Result};
use crate::integrators::{
    ButcherTableau, DiscreteGradient, ImplicitMidpoint, LieEuler, Projection, Rkmk, RungeKutta,
    SolveConfig, Stepper,
};
use crate::matgroup::Matrix;
use crate::systems::{builtin_system, BuiltinSystem, Params};

/// Method tags accepted by `--method`.
pub const METHOD_NAMES: [&str; 10] = [
    "euler",
    "midpoint",
    "rk4",
    "rk",
    "lie-euler",
    "rkmk",
    "rkmk4",
    "projection",
    "discrete-gradient",
    "split",
];

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_UNMEASURABLE: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: String,
    pub params: Params,
    pub method: String,
    pub tableau: Option<String>,
    pub dt: f64,
    pub steps: usize,
    /// `None` selects the system's default initial condition.
    pub ic: Option<String>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub t_final: f64,
    pub dt_list: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            system: "eq1".into(),
            params: Params::new(),
            method: "lie-euler".into(),
            tableau: None,
            dt: 0.1,
            steps: 4,
            ic: None,
            format: Format::Csv,
            out: None,
            seed: 0,
            t_final: 1.0,
            dt_list: vec![0.1, 0.05, 0.025, 0.0125],
        }
    }
}

impl RunConfig {
    /// Checks the invariants shared by every subcommand.
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Config("steps must be ≥ 1".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::Config("t-final must be positive".into()));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Debug, Parser)]
#[command(name = "foliate", version, about = "Foliation-preserving integrator experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one method and write the trajectory.
    Run(CommonArgs),
    /// Run several methods on shared initial conditions and compare leaf spread.
    Compare(CompareArgs),
    /// Estimate the convergence order of one method.
    Order(OrderArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Vec<PathBuf>,
    #[arg(long)]
    pub system: Option<String>,
    /// System parameter override, `name=value`.
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    #[arg(long = "method")]
    pub methods: Vec<String>,
    /// Butcher tableau for `rk`, `rkmk` and `projection`.
    #[arg(long)]
    pub tableau: Option<String>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// `x0,x1,..` | `circle:R:N` | `leaf-bundle:SEED:COUNT` | `leaf-bundle:COUNT`
    #[arg(long)]
    pub ic: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, env = "FOLIATE_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// eq1, lie-euler vs euler, dt 0.1, 4 steps, 20 points on the radius-2 circle.
    #[arg(long)]
    pub figure2: bool,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated decreasing step sizes.
    #[arg(long, value_delimiter = ',')]
    pub dt_list: Option<Vec<f64>>,
    #[arg(long)]
    pub t_final: Option<f64>,
}

fn parse_param(s: &str) -> Result<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("parameter `{s}` is not of the form name=value")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("parameter `{k}` has a non-numeric value `{v}`")))?;
    Ok((k.trim().to_string(), v))
}

impl CommonArgs {
    /// Layers the flags over `base`. `method` picks which `--method` applies.
    fn apply(&self, base: &mut RunConfig, method: Option<&str>) -> Result<()> {
        if let Some(s) = &self.system {
            base.system = s.clone();
        }
        for p in &self.params {
            let (k, v) = parse_param(p)?;
            base.params.insert(k, v);
        }
        if let Some(m) = method {
            base.method = m.to_string();
        }
        if let Some(t) = &self.tableau {
            base.tableau = Some(t.clone());
        }
        if let Some(dt) = self.dt {
            base.dt = dt;
        }
        if let Some(n) = self.steps {
            base.steps = n;
        }
        if let Some(ic) = &self.ic {
            base.ic = Some(ic.clone());
        }
        if let Some(o) = &self.out {
            base.out = Some(o.clone());
        }
        if let Some(f) = self.format {
            base.format = f;
        }
        if let Some(s) = self.seed {
            base.seed = s;
        }
        Ok(())
    }

    fn single(&self) -> Result<RunConfig> {
        if self.config.len() > 1 {
            return Err(Error::Config("only one --config is accepted here".into()));
        }
        if self.methods.len() > 1 {
            return Err(Error::Config("only one --method is accepted here".into()));
        }
        let mut cfg = match self.config.first() {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        self.apply(&mut cfg, self.methods.first().map(String::as_str))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Builds the stepper named by `method` for `sys`.
pub fn build_stepper(
    sys: &BuiltinSystem,
    method: &str,
    tableau: Option<&str>,
) -> Result<Arc<dyn Stepper>> {
    let tab = |default: fn() -> ButcherTableau| -> Result<ButcherTableau> {
        tableau.map_or_else(|| Ok(default()), ButcherTableau::by_name)
    };
    let needs = |what: &str| {
        Error::Config(format!("method `{method}` needs {what}, which `{}` does not provide", sys.name()))
    };
    let plain = sys.plain().clone();
    Ok(match method {
        "euler" => Arc::new(RungeKutta::new(ButcherTableau::euler(), plain)),
        "rk4" => Arc::new(RungeKutta::new(ButcherTableau::rk4(), plain)),
        "midpoint" => Arc::new(ImplicitMidpoint::new(plain, SolveConfig::default())),
        "rk" => {
            let name = tableau.ok_or_else(|| Error::Config("method `rk` needs --tableau".into()))?;
            Arc::new(RungeKutta::new(ButcherTableau::by_name(name)?, plain))
        }
        "lie-euler" => Arc::new(LieEuler::new(
            sys.foliate().ok_or_else(|| needs("a group-split form"))?.clone(),
        )),
        "rkmk" | "rkmk4" => {
            let t = if method == "rkmk4" { ButcherTableau::rk4() } else { tab(ButcherTableau::rk4)? };
            Arc::new(Rkmk::new(
                sys.foliate().ok_or_else(|| needs("a group-split form"))?.clone(),
                t,
            ))
        }
        "projection" => Arc::new(Projection::with_tableau(
            sys.plain(),
            tab(ButcherTableau::rk4)?,
            SolveConfig::default(),
        )?),
        "discrete-gradient" => Arc::new(DiscreteGradient::new(
            sys.gradient_form().ok_or_else(|| needs("a skew-gradient form"))?.clone(),
            SolveConfig::default(),
        )),
        "split" => Arc::new(sys.splitting().ok_or_else(|| needs("a splitting"))?.clone()),
        other => {
            return Err(Error::Catalogue {
                kind: "method",
                name: other.into(),
                valid: METHOD_NAMES.iter().map(|s| s.to_string()).collect(),
            })
        }
    })
}

/// Parses an initial-condition spec into one or more states.
pub fn parse_ic(spec: Option<&str>, sys: &BuiltinSystem, seed: u64) -> Result<Vec<Matrix>> {
    let shape = sys.state_shape();
    let Some(spec) = spec else {
        return Ok(vec![sys.default_ic().clone()]);
    };
    let bad = |why: &str| Error::Config(format!("invalid --ic `{spec}`: {why}"));
    if let Some(rest) = spec.strip_prefix("circle:") {
        if shape != (2, 1) {
            return Err(bad("circle initial conditions need a planar system"));
        }
        let (r, n) = rest.split_once(':').ok_or_else(|| bad("expected circle:R:N"))?;
        let r: f64 = r.parse().map_err(|_| bad("radius is not a number"))?;
        let n: usize = n.parse().map_err(|_| bad("count is not an integer"))?;
        if n == 0 || !r.is_finite() {
            return Err(bad("need a finite radius and at least one point"));
        }
        return Ok(circle_points(r, n));
    }
    if let Some(rest) = spec.strip_prefix("leaf-bundle:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let (s, n) = match parts.as_slice() {
            [n] => (seed, *n),
            [s, n] => (s.parse().map_err(|_| bad("seed is not an integer"))?, *n),
            _ => return Err(bad("expected leaf-bundle:SEED:COUNT")),
        };
        let n: usize = n.parse().map_err(|_| bad("count is not an integer"))?;
        if n == 0 {
            return Err(bad("count must be at least 1"));
        }
        return Ok(sys.leaf_bundle(sys.default_ic(), n, s));
    }
    let values = spec
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| bad("components must be numbers"))?;
    if values.len() != shape.0 * shape.1 {
        return Err(bad(&format!(
            "{} needs {} components, got {}",
            sys.name(),
            shape.0 * shape.1,
            values.len()
        )));
    }
    Ok(vec![Matrix::from_vec(shape.0, shape.1, values).map_err(|e| bad(&e.to_string()))?])
}

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Num(f64),
    Text(String),
}

/// Column-labelled rows, serialised as CSV or JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Num(v) => format_number(*v),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, meta: Value) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|c| match c {
                            Cell::Int(i) => json!(i),
                            Cell::Num(v) if v.is_finite() => json!(v),
                            Cell::Num(_) => Value::Null,
                            Cell::Text(t) => json!(t),
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = json!({ "meta": meta, "data": { "columns": self.columns, "rows": rows } });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values serialise");
        s.push('\n');
        s
    }
}

fn state_columns(sys: &BuiltinSystem) -> Vec<String> {
    let (r, c) = sys.state_shape();
    let k = sys.leaf().dim();
    (0..r * c)
        .map(|i| format!("x{i}"))
        .chain((0..k).map(|i| format!("I{i}")))
        .collect()
}

fn trajectory_cells(traj: &Trajectory, n: usize) -> Vec<Cell> {
    let mut row = vec![Cell::Int(n), Cell::Num(traj.times[n])];
    row.extend(traj.states[n].as_slice().iter().map(|v| Cell::Num(*v)));
    row.extend(traj.leaf_values[n].iter().map(|v| Cell::Num(*v)));
    row
}

fn run_bundle(cfg: &RunConfig) -> Result<(BuiltinSystem, Vec<Trajectory>)> {
    let sys = builtin_system(&cfg.system, &cfg.params)?;
    let stepper = build_stepper(&sys, &cfg.method, cfg.tableau.as_deref())?;
    let ics = parse_ic(cfg.ic.as_deref(), &sys, cfg.seed)?;
    let trajs = ics
        .iter()
        .map(|x| integrate_builtin(&sys, stepper.as_ref(), x, cfg.dt, cfg.steps))
        .collect::<Result<Vec<_>>>()?;
    Ok((sys, trajs))
}

/// `run`: the trajectory table for one configuration.
pub fn cmd_run(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let (sys, trajs) = run_bundle(cfg)?;
    let bundle = trajs.len() > 1;
    let mut columns: Vec<String> = if bundle { vec!["ic".into()] } else { vec![] };
    columns.extend(["step".to_string(), "t".to_string()]);
    columns.extend(state_columns(&sys));
    let mut rows = Vec::new();
    for (j, traj) in trajs.iter().enumerate() {
        for n in 0..traj.states.len() {
            let mut row = if bundle { vec![Cell::Int(j)] } else { vec![] };
            row.extend(trajectory_cells(traj, n));
            rows.push(row);
        }
    }
    Ok(Table { columns, rows })
}

/// Fields that every run of a comparison must share.
fn shared_key(cfg: &RunConfig) -> Value {
    json!({
        "system": cfg.system,
        "params": cfg.params,
        "dt": cfg.dt,
        "steps": cfg.steps,
        "ic": cfg.ic,
        "seed": cfg.seed,
    })
}

/// `compare`: every run's bundle plus its per-step leaf spread.
pub fn cmd_compare(cfgs: &[RunConfig]) -> Result<Table> {
    if cfgs.len() < 2 {
        return Err(Error::Config("compare needs at least two methods".into()));
    }
    let key = shared_key(&cfgs[0]);
    for c in &cfgs[1..] {
        if shared_key(c) != key {
            return Err(Error::Config(
                "compared runs must share system, params, dt, steps, ic and seed".into(),
            ));
        }
    }
    let mut columns = vec!["method".to_string(), "ic".into(), "step".into(), "t".into()];
    let mut rows = Vec::new();
    for (i, cfg) in cfgs.iter().enumerate() {
        cfg.validate()?;
        let (sys, trajs) = run_bundle(cfg)?;
        if i == 0 {
            columns.extend(state_columns(&sys));
            columns.push("spread".into());
        }
        let spread = leaf_spread(&trajs);
        for (j, traj) in trajs.iter().enumerate() {
            for n in 0..traj.states.len() {
                let mut row = vec![Cell::Text(cfg.method.clone()), Cell::Int(j)];
                row.extend(trajectory_cells(traj, n));
                row.push(Cell::Num(spread[n]));
                rows.push(row);
            }
        }
    }
    Ok(Table { columns, rows })
}

/// `order`: the convergence table of one method.
pub fn cmd_order(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let sys = builtin_system(&cfg.system, &cfg.params)?;
    let stepper = build_stepper(&sys, &cfg.method, cfg.tableau.as_deref())?;
    let ics = parse_ic(cfg.ic.as_deref(), &sys, cfg.seed)?;
    if ics.len() != 1 {
        return Err(Error::Config("order needs a single initial condition".into()));
    }
    let est = convergence_order(stepper.as_ref(), &ics[0], cfg.t_final, &cfg.dt_list)
        .map_err(|e| match e {
            Error::Domain(m) => Error::Config(m),
            e => e,
        })?;
    let rows = (0..est.taus.len())
        .map(|i| {
            vec![
                Cell::Num(est.taus[i]),
                Cell::Num(est.errors[i]),
                Cell::Num(est.local_slopes[i]),
                Cell::Num(est.slope),
            ]
        })
        .collect();
    Ok(Table {
        columns: ["tau", "error", "local_slope", "fitted_slope"].map(String::from).to_vec(),
        rows,
    })
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Divergence(_) | Error::NonConvergence { .. } | Error::SingularLeaf(_) => {
            EXIT_DIVERGENCE
        }
        Error::PrecisionFloor { .. } => EXIT_UNMEASURABLE,
        _ => EXIT_CONFIG,
    }
}

fn emit(table: &Table, format: Format, out: Option<&Path>, meta: Value, stdout: &mut dyn Write) -> Result<()> {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(meta),
    };
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::Config(format!("cannot write output: {e}"))),
    }
}

fn compare_configs(args: &CompareArgs) -> Result<Vec<RunConfig>> {
    let c = &args.common;
    let mut bases: Vec<RunConfig> = if c.config.is_empty() {
        vec![RunConfig::default()]
    } else {
        c.config.iter().map(|p| RunConfig::load(p)).collect::<Result<_>>()?
    };
    if args.figure2 {
        for b in &mut bases {
            b.system = "eq1".into();
            b.dt = 0.1;
            b.steps = 4;
            b.ic = Some("circle:2:20".into());
        }
    }
    let methods: Vec<Option<String>> = if !c.methods.is_empty() {
        c.methods.iter().cloned().map(Some).collect()
    } else if args.figure2 && bases.len() == 1 {
        vec![Some("lie-euler".into()), Some("euler".into())]
    } else {
        vec![None; bases.len()]
    };
    let runs: Vec<(RunConfig, Option<String>)> = match (bases.len(), methods.len()) {
        (1, _) => methods.into_iter().map(|m| (bases[0].clone(), m)).collect(),
        (b, m) if b == m => bases.into_iter().zip(methods).collect(),
        (b, m) => {
            return Err(Error::Config(format!(
                "{b} config files but {m} methods; give one method per config file"
            )))
        }
    };
    runs.into_iter()
        .map(|(mut cfg, m)| {
            c.apply(&mut cfg, m.as_deref())?;
            Ok(cfg)
        })
        .collect()
}

/// Runs a parsed command, writing to `--out` or `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Run(c) => {
            let cfg = c.single()?;
            let table = cmd_run(&cfg)?;
            let meta = json!({ "command": "run", "config": cfg });
            emit(&table, cfg.format, cfg.out.as_deref(), meta, stdout)
        }
        Command::Compare(a) => {
            let cfgs = compare_configs(a)?;
            let table = cmd_compare(&cfgs)?;
            let meta = json!({ "command": "compare", "runs": cfgs });
            emit(&table, cfgs[0].format, cfgs[0].out.as_deref(), meta, stdout)
        }
        Command::Order(a) => {
            let mut cfg = a.common.single()?;
            if let Some(l) = &a.dt_list {
                cfg.dt_list = l.clone();
            }
            if let Some(t) = a.t_final {
                cfg.t_final = t;
            }
            cfg.validate()?;
            let table = cmd_order(&cfg)?;
            let meta = json!({ "command": "order", "config": cfg });
            emit(&table, cfg.format, cfg.out.as_deref(), meta, stdout)
        }
    }
}

/// Parses `args`, runs, reports errors on stderr and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("foliate: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("foliate").chain(args.iter().copied())).unwrap()
    }

    fn output(args: &[&str]) -> Result<String> {
        let mut buf = Vec::new();
        execute(&parse(args), &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn run_eq1_lie_euler_csv() {
        let s = output(&["run", "--system", "eq1", "--method", "lie-euler", "--dt", "0.1", "--steps", "4", "--ic", "2,0"]).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "step,t,x0,x1,I0");
        assert_eq!(lines.len(), 6);
        let i: Vec<f64> = lines[1..].iter().map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
        assert!((i[0] - 4.0).abs() < 1e-14);
        assert!((i[1] - 1.96).abs() < 1e-14);
        assert!((i[2] - 1.2656f64.powi(2)).abs() < 1e-12);
        assert!(!s.contains('\r'));
    }

    #[test]
    fn zero_steps_is_a_config_error() {
        let e = output(&["run", "--steps", "0"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CONFIG);
        assert!(e.to_string().contains("steps must be ≥ 1"));
    }

    #[test]
    fn unknown_names_list_the_catalogue() {
        let e = output(&["run", "--system", "nope"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CONFIG);
        assert!(e.to_string().contains("lorenz"));
        let e = output(&["run", "--method", "leapfrog"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CONFIG);
        assert!(e.to_string().contains("discrete-gradient"));
    }

    #[test]
    fn divergence_and_floor_codes() {
        let e = Error::AtStep { step: 7, source: Box::new(Error::Divergence("rk4 stage 2".into())) };
        assert_eq!(exit_code(&e), EXIT_DIVERGENCE);
        assert!(e.to_string().contains("step 7"));
        assert_eq!(exit_code(&Error::PrecisionFloor { error: 1e-17 }), EXIT_UNMEASURABLE);
    }

    #[test]
    fn compare_identical_methods_have_equal_spread() {
        let s = output(&["compare", "--method", "euler", "--method", "euler", "--ic", "circle:2:5"]).unwrap();
        let spreads: Vec<&str> = s.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
        let half = spreads.len() / 2;
        assert_eq!(spreads[..half], spreads[half..]);
    }

    #[test]
    fn mismatched_configs_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        fs::write(&a, r#"{"method":"euler","dt":0.1}"#).unwrap();
        fs::write(&b, r#"{"method":"lie-euler","dt":0.05}"#).unwrap();
        let e = output(&["compare", "--config", a.to_str().unwrap(), "--config", b.to_str().unwrap()]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CONFIG);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(&p, r#"{"system":"eq2","method":"rk4","dt":0.2,"steps":3}"#).unwrap();
        let cli = parse(&["run", "--config", p.to_str().unwrap(), "--steps", "2"]);
        let Command::Run(c) = &cli.command else { unreachable!() };
        let cfg = c.single().unwrap();
        assert_eq!((cfg.system.as_str(), cfg.method.as_str(), cfg.dt, cfg.steps), ("eq2", "rk4", 0.2, 2));
    }

    #[test]
    fn ic_specs() {
        let sys = builtin_system("eq1", &Params::new()).unwrap();
        assert_eq!(parse_ic(Some("circle:2:20"), &sys, 0).unwrap().len(), 20);
        let b = parse_ic(Some("leaf-bundle:3:8"), &sys, 0).unwrap();
        assert_eq!(b.len(), 8);
        for x in &b {
            assert!((x.dot(x) - 4.0).abs() < 1e-12);
        }
        assert!(parse_ic(Some("1,2,3"), &sys, 0).is_err());
        assert!(parse_ic(Some("circle:2"), &sys, 0).is_err());
        let lorenz = builtin_system("lorenz", &Params::new()).unwrap();
        assert!(parse_ic(Some("circle:1:4"), &lorenz, 0).is_err());
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn order_table_and_floor() {
        let s = output(&["order", "--system", "eq2", "--method", "rk4", "--ic", "0.5,0.5"]).unwrap();
        assert!(s.starts_with("tau,error,local_slope,fitted_slope\n"));
        let e = output(&["order", "--system", "skew-product", "--param", "a=0", "--param", "b=0", "--method", "rk4"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_UNMEASURABLE, "{e}");
    }

    #[test]
    fn json_has_meta_and_data() {
        let s = output(&["run", "--format", "json", "--steps", "2"]).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["meta"]["config"]["steps"], 2);
        assert_eq!(v["data"]["columns"][0], "step");
        assert_eq!(v["data"]["rows"].as_array().unwrap().len(), 3);
    }
}
