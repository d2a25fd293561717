//! Command-line front end. One command per process; every command writes a
//! single report, and identical inputs and seed give byte-identical output.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flow::{
    dth_flow, finsler_norm_flow, max_cycle_ratio, pressure_norm_flow, FlowTangent, SuspensionFlow,
    ENTROPY_RESIDUAL,
};
use crate::io::{load_graph, load_rep, parse_functional, GraphInput};
use crate::repmetrics::{dth_reps, entropy_from_table, finsler_norm_reps, length_spectrum};
use crate::report::{csv_float, json_text, to_value, write_atomic, Table};
use crate::selftest::self_test;
use crate::sft::{
    livsic_reduce_with_tol, perron_data, pressure, topological_entropy, Cycle, EdgePotential,
    RoofFunction, SubshiftGraph, LIVSIC_TOL,
};
use crate::words::{class_rows, enumerate_classes, DEFAULT_CLASS_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Pressure of an edge potential (zero when the document has none).
    Pressure,
    /// Topological entropy of the subshift.
    Entropy,
    /// Entropy of the suspension flow under a roof.
    FlowEntropy,
    /// Asymmetric distance between the flows of --input and --input2.
    FlowDth,
    /// Finsler and pressure norms of a tangent direction.
    FlowFinsler,
    /// Maximum cycle ratio of two potentials.
    MaxCycleRatio,
    /// Livšic reduction of a potential modulo coboundaries.
    LivsicCheck,
    /// Conjugacy classes of the free group up to --cutoff.
    EnumerateClasses,
    /// Marked length spectrum of a representation.
    RepLengths,
    /// Entropy of a marked length spectrum.
    RepEntropy,
    /// Asymmetric distance between the representations of --input and --input2.
    RepDth,
    /// Finsler norm of a family of representations.
    RepFinsler,
    /// Fast seeded property suite.
    SelfTest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pressure => "pressure",
            Command::Entropy => "entropy",
            Command::FlowEntropy => "flow-entropy",
            Command::FlowDth => "flow-dth",
            Command::FlowFinsler => "flow-finsler",
            Command::MaxCycleRatio => "max-cycle-ratio",
            Command::LivsicCheck => "livsic-check",
            Command::EnumerateClasses => "enumerate-classes",
            Command::RepLengths => "rep-lengths",
            Command::RepEntropy => "rep-entropy",
            Command::RepDth => "rep-dth",
            Command::RepFinsler => "rep-finsler",
            Command::SelfTest => "self-test",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "thurston",
    version,
    about = "Thurston-type asymmetric distances for flows and representations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Graph or representation document.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Second document for two-argument commands.
    #[arg(long, global = true)]
    pub input2: Option<PathBuf>,
    /// Length functional (preset, coefficient list or JSON), or the potential
    /// name for graph commands.
    #[arg(long, global = true)]
    pub functional: Option<String>,
    /// Largest word length of enumerated classes.
    #[arg(long, global = true, default_value_t = 10)]
    pub cutoff: usize,
    /// Tolerance for Livšic residuals.
    #[arg(long, global = true, default_value_t = LIVSIC_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Free-group rank for enumerate-classes without --input.
    #[arg(long, global = true, default_value_t = 2)]
    pub rank: usize,
    /// Restrict enumerate-classes to primitive classes.
    #[arg(long, global = true)]
    pub primitive: bool,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub input2: Option<PathBuf>,
    pub functional: Option<String>,
    pub cutoff: usize,
    pub tol: f64,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub rank: usize,
    pub primitive: bool,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        if cli.cutoff == 0 {
            return Err(Error::Parse("--cutoff must be at least 1".into()));
        }
        if !(cli.tol > 0.0 && cli.tol.is_finite()) {
            return Err(Error::Parse("--tol must be positive".into()));
        }
        Ok(RunConfig {
            command: cli.command,
            input: cli.input,
            input2: cli.input2,
            functional: cli.functional,
            cutoff: cli.cutoff,
            tol: cli.tol,
            seed: cli.seed,
            format: cli.format,
            out: cli.out,
            rank: cli.rank,
            primitive: cli.primitive,
        })
    }

    fn input(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Error::Parse(format!("{} needs --input", self.command.name())))
    }

    fn input2(&self) -> Result<&Path> {
        self.input2
            .as_deref()
            .ok_or_else(|| Error::Parse(format!("{} needs --input2", self.command.name())))
    }
}

/// A command's output: the JSON document and its CSV rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    pub table: Table,
}

impl Report {
    fn scalars(json: Value) -> Self {
        let table = Table::from_scalars(&json);
        Report { json, table }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(json_text(&self.json)),
            Format::Csv => self.table.text(),
        }
    }
}

fn cycle_states(g: &SubshiftGraph, c: &Cycle) -> Vec<String> {
    c.states(g)
        .into_iter()
        .map(|s| g.states()[s].clone())
        .collect()
}

fn roof_of(input: &GraphInput) -> Result<(String, RoofFunction)> {
    let (name, p) = input.potential_or_nth("roof", 0)?;
    Ok((name, RoofFunction::new(p)?))
}

fn flow_of(input: GraphInput) -> Result<(String, SuspensionFlow)> {
    let (name, roof) = roof_of(&input)?;
    Ok((name, SuspensionFlow::new(Arc::new(input.graph), roof)?))
}

fn pressure_report(cfg: &RunConfig) -> Result<Report> {
    let input = load_graph(cfg.input()?)?;
    let (name, f) = if input.potentials.is_empty() && cfg.functional.is_none() {
        ("zero".to_string(), EdgePotential::zero(&input.graph))
    } else {
        input.potential(cfg.functional.as_deref())?
    };
    let p = pressure(&input.graph, &f)?;
    let perron = perron_data(&input.graph, &f)?;
    let mut report = Report::scalars(json!({
        "command": "pressure",
        "potential": name,
        "pressure": p,
        "states": input.graph.num_states(),
        "edges": input.graph.num_edges(),
    }));
    report.json["state_weights"] = json!(perron.weights);
    Ok(report)
}

fn entropy_report(cfg: &RunConfig) -> Result<Report> {
    let input = load_graph(cfg.input()?)?;
    Ok(Report::scalars(json!({
        "command": "entropy",
        "entropy": topological_entropy(&input.graph),
        "states": input.graph.num_states(),
        "edges": input.graph.num_edges(),
    })))
}

fn flow_entropy_report(cfg: &RunConfig) -> Result<Report> {
    let (name, flow) = flow_of(load_graph(cfg.input()?)?)?;
    let h = flow.entropy()?;
    let residual = pressure(flow.base(), &flow.roof().potential().scale(-h))?;
    Ok(Report::scalars(json!({
        "command": "flow-entropy",
        "roof": name,
        "entropy": h,
        "pressure_residual": residual,
        "residual_tolerance": ENTROPY_RESIDUAL,
    })))
}

fn flow_dth_report(cfg: &RunConfig) -> Result<Report> {
    let first = load_graph(cfg.input()?)?;
    let second = load_graph(cfg.input2()?)?;
    if first.graph != second.graph {
        return Err(Error::GraphMismatch);
    }
    let (_, roof2) = roof_of(&second)?;
    let (_, flow1) = flow_of(first)?;
    let flow2 = SuspensionFlow::new(flow1.base_arc(), roof2)?;
    let r = dth_flow(&flow1, &flow2)?;
    let mut report = Report::scalars(json!({
        "command": "flow-dth",
        "value": r.value,
        "h1": r.h1,
        "h2": r.h2,
        "period_ratio": r.period_ratio,
        "method": to_value(&r.method)?,
        "projectively_equivalent": r.projectively_equivalent,
    }));
    report.json["cycle"] = json!(cycle_states(flow1.base(), &r.cycle));
    Ok(report)
}

fn flow_finsler_report(cfg: &RunConfig) -> Result<Report> {
    let input = load_graph(cfg.input()?)?;
    let (tangent_name, g) = match cfg.functional.as_deref() {
        Some(n) => input.potential(Some(n))?,
        None => input.potential_or_nth("tangent", 1)?,
    };
    let (roof_name, flow) = flow_of(input)?;
    let tangent = FlowTangent::project(&flow, &g)?;
    Ok(Report::scalars(json!({
        "command": "flow-finsler",
        "roof": roof_name,
        "tangent": tangent_name,
        "finsler_norm": finsler_norm_flow(&flow, &tangent)?,
        "reverse_finsler_norm": finsler_norm_flow(&flow, &FlowTangent::new(&flow, tangent.direction().scale(-1.0))?)?,
        "pressure_norm": pressure_norm_flow(&flow, &tangent)?,
        "tangency_residual": tangent.residual(),
        "entropy": flow.entropy()?,
    })))
}

fn max_cycle_ratio_report(cfg: &RunConfig) -> Result<Report> {
    let input = load_graph(cfg.input()?)?;
    let (num_name, num) = input.potential_or_nth("numerator", 0)?;
    let (den_name, den) = input.potential_or_nth("denominator", 1)?;
    let r = max_cycle_ratio(&input.graph, &num, &RoofFunction::new(den)?)?;
    let mut report = Report::scalars(json!({
        "command": "max-cycle-ratio",
        "numerator": num_name,
        "denominator": den_name,
        "value": r.value,
        "method": to_value(&r.method)?,
    }));
    report.json["cycle"] = json!(cycle_states(&input.graph, &r.cycle));
    Ok(report)
}

fn livsic_report(cfg: &RunConfig) -> Result<Report> {
    let input = load_graph(cfg.input()?)?;
    let (name, f) = input.potential(cfg.functional.as_deref())?;
    let red = livsic_reduce_with_tol(&input.graph, &f, cfg.tol)?;
    let mut report = Report::scalars(json!({
        "command": "livsic-check",
        "potential": name,
        "is_coboundary_up_to_constant": red.is_coboundary_up_to_constant,
        "constant": red.c,
        "max_residual": red.max_residual,
        "tol": cfg.tol,
    }));
    report.json["u"] = json!(red.u);
    report.json["witness"] = match &red.witness {
        Some(c) => json!(cycle_states(&input.graph, c)),
        None => Value::Null,
    };
    Ok(report)
}

fn enumerate_report(cfg: &RunConfig) -> Result<Report> {
    let rank = match &cfg.input {
        Some(p) => load_rep(p)?.rep.rank(),
        None => cfg.rank,
    };
    let classes = enumerate_classes(rank, cfg.cutoff, cfg.primitive)?;
    let rows = class_rows(&classes);
    let mut table = Table::new(&["word", "length", "primitive"]);
    for r in &rows {
        table.push(vec![
            r.word.clone(),
            r.length.to_string(),
            r.primitive_flag.to_string(),
        ]);
    }
    let json = json!({
        "command": "enumerate-classes",
        "rank": rank,
        "cutoff": cfg.cutoff,
        "primitive_only": cfg.primitive,
        "cap": DEFAULT_CLASS_CAP,
        "count": rows.len(),
        "classes": to_value(&rows)?,
    });
    Ok(Report { json, table })
}

fn rep_lengths_report(cfg: &RunConfig) -> Result<Report> {
    let input = load_rep(cfg.input()?)?;
    let functional = parse_functional(
        cfg.functional.as_deref().unwrap_or("lambda1"),
        input.rep.dim(),
    )?;
    let classes = enumerate_classes(input.rep.rank(), cfg.cutoff, cfg.primitive)?;
    let lengths = length_spectrum(&input.rep, &functional, &classes)?;
    let rows = lengths.rows();
    let mut table = Table::new(&["class", "word_length", "primitive", "length"]);
    for r in &rows {
        table.push(vec![
            r.class.clone(),
            r.word_length.to_string(),
            r.primitive.to_string(),
            csv_float(r.length),
        ]);
    }
    let json = json!({
        "command": "rep-lengths",
        "label": lengths.label(),
        "functional": lengths.functional(),
        "cutoff": cfg.cutoff,
        "classes": to_value(&rows)?,
    });
    Ok(Report { json, table })
}

fn rep_entropy_report(cfg: &RunConfig) -> Result<Report> {
    let input = load_rep(cfg.input()?)?;
    let functional = parse_functional(
        cfg.functional.as_deref().unwrap_or("lambda1"),
        input.rep.dim(),
    )?;
    let classes = enumerate_classes(input.rep.rank(), cfg.cutoff, false)?;
    let e = entropy_from_table(&length_spectrum(&input.rep, &functional, &classes)?)?;
    let mut report = Report::scalars(json!({
        "command": "rep-entropy",
        "label": input.rep.label(),
        "functional": functional.describe(),
        "cutoff": cfg.cutoff,
        "value": e.value,
        "stderr": e.stderr,
        "t_min": e.t_min,
        "t_max": e.t_max,
        "mode": to_value(&e.mode)?,
        "unstable": e.unstable,
    }));
    report.json["half_slopes"] = json!([e.half_slopes.0, e.half_slopes.1]);
    report.json["samples"] = json!(e
        .samples
        .iter()
        .map(|(t, n)| json!({"t": t, "count": n}))
        .collect::<Vec<_>>());
    Ok(report)
}

fn rep_dth_report(cfg: &RunConfig) -> Result<Report> {
    let first = load_rep(cfg.input()?)?;
    let second = load_rep(cfg.input2()?)?;
    let functional = parse_functional(
        cfg.functional.as_deref().unwrap_or("lambda1"),
        first.rep.dim(),
    )?;
    let r = dth_reps(&first.rep, &second.rep, &functional, cfg.cutoff)?;
    let mut json = to_value(&r)?;
    json["command"] = json!("rep-dth");
    let mut table = Table::new(&["cutoff", "value"]);
    for p in &r.trace {
        table.push(vec![p.cutoff.to_string(), csv_float(p.value)]);
    }
    Ok(Report { json, table })
}

fn rep_finsler_report(cfg: &RunConfig) -> Result<Report> {
    let first = load_rep(cfg.input()?)?;
    let target = match &cfg.input2 {
        Some(p) => Some(load_rep(p)?.rep),
        None => None,
    };
    let family = first.family(target.as_ref())?;
    let functional = parse_functional(
        cfg.functional.as_deref().unwrap_or("lambda1"),
        first.rep.dim(),
    )?;
    let r = finsler_norm_reps(&family, &functional, cfg.cutoff)?;
    let mut json = to_value(&r)?;
    json["command"] = json!("rep-finsler");
    json["functional"] = json!(functional.describe());
    Ok(Report::scalars(json))
}

fn self_test_report(cfg: &RunConfig) -> Result<Report> {
    let r = self_test(cfg.seed)?;
    let mut table = Table::new(&["check", "passed", "worst", "tolerance"]);
    for c in &r.checks {
        table.push(vec![
            c.name.clone(),
            c.passed.to_string(),
            csv_float(c.worst),
            csv_float(c.tolerance),
        ]);
    }
    let mut json = to_value(&r)?;
    json["command"] = json!("self-test");
    Ok(Report { json, table })
}

/// Runs one command and returns its report without writing it.
pub fn dispatch(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::Pressure => pressure_report(cfg),
        Command::Entropy => entropy_report(cfg),
        Command::FlowEntropy => flow_entropy_report(cfg),
        Command::FlowDth => flow_dth_report(cfg),
        Command::FlowFinsler => flow_finsler_report(cfg),
        Command::MaxCycleRatio => max_cycle_ratio_report(cfg),
        Command::LivsicCheck => livsic_report(cfg),
        Command::EnumerateClasses => enumerate_report(cfg),
        Command::RepLengths => rep_lengths_report(cfg),
        Command::RepEntropy => rep_entropy_report(cfg),
        Command::RepDth => rep_dth_report(cfg),
        Command::RepFinsler => rep_finsler_report(cfg),
        Command::SelfTest => self_test_report(cfg),
    }
}

/// Runs a command and writes its report; returns the process exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    let outcome = dispatch(cfg).and_then(|report| {
        let text = report.render(cfg.format)?;
        match &cfg.out {
            Some(path) => write_atomic(path, &text)?,
            None => print!("{text}"),
        }
        Ok(report)
    });
    match outcome {
        Ok(report) if report.json.get("passed") == Some(&Value::Bool(false)) => {
            eprintln!("error: self-test failed");
            2
        }
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parses process arguments and runs; usage errors exit with status 3.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match RunConfig::from_cli(cli) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
