//! The `ttmetric` command line.
//!
//! Exit codes: 0 success, 1 parse or I/O error, 2 validation failure,
//! 3 metric-axiom violation, 4 existence failure after capacity removal.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use ttmetric_core::analysis::{capacity_scenario, rolling_metrics, stability_metric, AnalysisError, RollingSpec};
use ttmetric_core::builtin::BuiltinExample;
use ttmetric_core::engine::{earliest_arrival, SearchPolicy};
use ttmetric_core::io::{load_network, load_scenario, to_json, write_matrix, MatrixFormat};
use ttmetric_core::metric::{
    aggregate, compute_epsilon, directed_worst_best_matrix, regularized, verify_metric_axioms, Aggregator, AxiomReport,
    MetricError, MetricMatrix, MetricValue,
};
use ttmetric_core::model::{Network, WaitingPolicy};
use ttmetric_core::time::TimePoint;
use ttmetric_core::validate::validate_network;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_AXIOM: i32 = 3;
pub const EXIT_EXISTENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ttmetric", version, about = "Travel-time metrics over time-dependent route networks")]
pub struct Cli {
    /// Worker threads for the all-pairs, all-ticks loops (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    /// Write the primary output to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out_file: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregatorArg {
    Maxmin,
    Minmin,
    Integral,
}

impl From<AggregatorArg> for Aggregator {
    fn from(a: AggregatorArg) -> Self {
        match a {
            AggregatorArg::Maxmin => Aggregator::MaxMin,
            AggregatorArg::Minmin => Aggregator::MinMin,
            AggregatorArg::Integral => Aggregator::IntegralUniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoArg {
    Minmin,
    Boundary,
    Integral,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check consistency requirements; prints the report as JSON.
    Validate { network: PathBuf },
    /// Best travel time and walk for one departure.
    Tt {
        network: PathBuf,
        /// Origin location id.
        #[arg(long)]
        from: String,
        /// Destination location id.
        #[arg(long)]
        to: String,
        /// Departure tick.
        #[arg(long, allow_negative_numbers = true)]
        depart: i64,
        /// Forbid waiting between legs regardless of the network's policy.
        #[arg(long)]
        no_wait: bool,
        /// Add the boundary regularization routes first.
        #[arg(long)]
        regularize: bool,
    },
    /// Aggregated matrix and axiom report.
    Metric {
        network: PathBuf,
        /// Aggregate the network as given, without boundary regularization.
        #[arg(long)]
        no_regularize: bool,
        #[arg(long, value_enum, default_value_t = AggregatorArg::Maxmin)]
        aggregator: AggregatorArg,
        #[arg(long, value_enum, default_value_t = OutFormat::Json)]
        out: OutFormat,
    },
    /// Max-min, min-min and mean aggregates side by side.
    CompareAggregators {
        network: PathBuf,
        /// Aggregate the network as given, without boundary regularization.
        #[arg(long)]
        no_regularize: bool,
    },
    /// Max-min metric with the fastest walk excluded.
    Stability { network: PathBuf },
    /// Metric after removing segments at capacity.
    Capacity {
        network: PathBuf,
        /// Scenario document mapping segment ids to current volumes.
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = OutFormat::Json)]
        out: OutFormat,
    },
    /// One metric per sliding window over the period.
    Rolling {
        network: PathBuf,
        /// Window length in ticks.
        #[arg(long)]
        window: i64,
        /// Distance in ticks between consecutive window ends.
        #[arg(long)]
        stride: i64,
    },
    /// Runs a built-in example end to end against its expected values.
    Demo {
        #[arg(value_enum)]
        example: DemoArg,
    },
}

/// A failed command: exit code plus message for standard error. Some
/// failures still carry a primary output (a report explaining the failure).
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub output: Option<String>,
}

impl Failure {
    fn new(code: i32, message: impl ToString) -> Self {
        Self { code, message: message.to_string(), output: None }
    }

    fn with_output(mut self, output: String) -> Self {
        self.output = Some(output);
        self
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        Failure::new(EXIT_INVALID, e)
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Existence(report) => {
                Failure::new(EXIT_EXISTENCE, "existence requirement violated after capacity removal")
                    .with_output(to_json(&report))
            }
            AnalysisError::BadRollingSpec | AnalysisError::WindowOutsidePeriod { .. } => Failure::new(EXIT_IO, e),
            other => Failure::new(EXIT_INVALID, other),
        }
    }
}

/// Primary output and exit code of a successful (possibly negative) run.
pub struct Outcome {
    pub output: String,
    pub code: i32,
    /// Diagnostics for standard error.
    pub note: Option<String>,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self::with_code(output, EXIT_OK)
    }

    fn with_code(output: String, code: i32) -> Self {
        Self { output, code, note: None }
    }
}

fn read_network(path: &Path) -> Result<Network, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
    load_network(&text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn require_valid(net: &Network) -> Result<(), Failure> {
    let report = validate_network(net);
    if report.ok {
        Ok(())
    } else {
        Err(Failure::new(EXIT_INVALID, "network fails validation").with_output(to_json(&report)))
    }
}

fn prepare(net: &Network, regularize: bool) -> Result<Network, Failure> {
    require_valid(net)?;
    Ok(if regularize { regularized(net)? } else { net.clone() })
}

fn axiom_exit(report: &AxiomReport) -> i32 {
    if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_AXIOM
    }
}

fn axiom_summary(report: &AxiomReport) -> String {
    let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
    let mut out = format!(
        "non-negativity: {}\nidentity: {}\nsymmetry: {}\ntriangle: {}\n",
        mark(report.non_negativity.passed),
        mark(report.identity_of_indiscernibles.passed),
        mark(report.symmetry.passed),
        mark(report.triangle.passed),
    );
    for w in report.triangle.witnesses.iter().take(5) {
        let _ = writeln!(out, "  m({},{}) = {} > m({},{}) + m({},{}) = {}", w.a, w.c, w.lhs, w.a, w.b, w.b, w.c, w.rhs);
    }
    if report.triangle.witnesses.len() > 5 {
        let _ = writeln!(out, "  ... {} more", report.triangle.witnesses.len() - 5);
    }
    out
}

fn matrix_output(m: &MetricMatrix, report: &AxiomReport, out: OutFormat) -> String {
    match out {
        OutFormat::Csv => write_matrix(m, MatrixFormat::Csv),
        OutFormat::Json => to_json(&json!({ "matrix": m, "axioms": report })),
    }
}

fn cmd_validate(network: &Path) -> Result<Outcome, Failure> {
    let report = validate_network(&read_network(network)?);
    let code = if report.ok { EXIT_OK } else { EXIT_INVALID };
    Ok(Outcome::with_code(to_json(&report), code))
}

fn cmd_tt(
    network: &Path,
    from: &str,
    to: &str,
    depart: i64,
    no_wait: bool,
    regularize: bool,
) -> Result<Outcome, Failure> {
    let mut net = read_network(network)?;
    if no_wait {
        net = net.with_waiting(WaitingPolicy::NoWaiting);
    }
    if regularize {
        net = regularized(&net)?;
    }
    let t = TimePoint::from_ticks(depart);
    let labels =
        earliest_arrival(&net, from, t, SearchPolicy::for_network(&net)).map_err(|e| Failure::new(EXIT_INVALID, e))?;
    let dest = net.location_index(to).ok_or_else(|| Failure::new(EXIT_INVALID, format!("unknown location `{to}`")))?;
    let walk: Vec<Value> = labels
        .walk(dest)
        .unwrap_or_default()
        .iter()
        .map(|leg| {
            let seg = &net.segments()[leg.segment];
            json!({
                "segment": seg.id,
                "from": net.location_id(seg.from),
                "to": net.location_id(seg.to),
                "board": leg.board,
                "arrive": leg.arrive,
                "synthetic": seg.synthetic,
            })
        })
        .collect();
    let body = json!({
        "from": from,
        "to": to,
        "departure": t,
        "waitingPolicy": net.waiting(),
        "regularized": net.is_regularized(),
        "travelTime": labels.travel_time(dest),
        "arrival": labels.arrival(dest),
        "walk": walk,
    });
    Ok(Outcome::ok(to_json(&body)))
}

fn cmd_metric(network: &Path, no_regularize: bool, aggregator: Aggregator, out: OutFormat) -> Result<Outcome, Failure> {
    let net = prepare(&read_network(network)?, !no_regularize)?;
    let m = aggregate(&net, aggregator, SearchPolicy::for_network(&net))?;
    let report = verify_metric_axioms(&m);
    let mut outcome = Outcome::with_code(matrix_output(&m, &report, out), axiom_exit(&report));
    if out == OutFormat::Csv && !report.all_pass() {
        outcome.note = Some(axiom_summary(&report));
    }
    Ok(outcome)
}

fn cmd_compare(network: &Path, no_regularize: bool) -> Result<Outcome, Failure> {
    let net = prepare(&read_network(network)?, !no_regularize)?;
    let policy = SearchPolicy::for_network(&net);
    let mut output = String::new();
    for (label, aggregator) in
        [("maxmin", Aggregator::MaxMin), ("minmin", Aggregator::MinMin), ("integral", Aggregator::IntegralUniform)]
    {
        let m = aggregate(&net, aggregator, policy)?;
        let report = verify_metric_axioms(&m);
        let _ = writeln!(output, "== {label} ==");
        output.push_str(&write_matrix(&m, MatrixFormat::Csv));
        output.push_str(&axiom_summary(&report));
        output.push('\n');
    }
    Ok(Outcome::ok(output))
}

fn cmd_stability(network: &Path) -> Result<Outcome, Failure> {
    let net = prepare(&read_network(network)?, true)?;
    Ok(Outcome::ok(to_json(&stability_metric(&net)?)))
}

fn cmd_capacity(network: &Path, scenario: &Path, out: OutFormat) -> Result<Outcome, Failure> {
    let net = read_network(network)?;
    require_valid(&net)?;
    let text =
        fs::read_to_string(scenario).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", scenario.display())))?;
    let sc = load_scenario(&text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", scenario.display())))?;
    let m = capacity_scenario(&net, &sc)?;
    let report = verify_metric_axioms(&m);
    Ok(Outcome::with_code(matrix_output(&m, &report, out), axiom_exit(&report)))
}

fn cmd_rolling(network: &Path, window: i64, stride: i64) -> Result<Outcome, Failure> {
    let net = read_network(network)?;
    require_valid(&net)?;
    let spec = RollingSpec::from_ticks(window, stride)?;
    let series = rolling_metrics(&net, &spec)?;
    let mut code = EXIT_OK;
    let windows: Vec<Value> = series
        .iter()
        .map(|(end, m)| {
            let report = verify_metric_axioms(m);
            code = code.max(axiom_exit(&report));
            json!({ "windowEnd": end, "matrix": m, "axiomsPass": report.all_pass() })
        })
        .collect();
    Ok(Outcome::with_code(to_json(&json!({ "window": spec.window, "stride": spec.stride, "windows": windows })), code))
}

struct DemoLog {
    text: String,
    all_match: bool,
}

impl DemoLog {
    fn new(title: &str) -> Self {
        Self { text: format!("{title}\n"), all_match: true }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn expect(&mut self, label: &str, expected: impl ToString, computed: impl ToString) {
        let (expected, computed) = (expected.to_string(), computed.to_string());
        let ok = expected == computed;
        self.all_match &= ok;
        let _ = writeln!(
            self.text,
            "  {label:<28} expected {expected:>8}  computed {computed:>8}  {}",
            if ok { "ok" } else { "MISMATCH" }
        );
    }

    fn cell(m: &MetricMatrix, a: &str, b: &str) -> MetricValue {
        m.get(a, b).expect("built-in location ids")
    }

    fn expect_matrix(&mut self, name: &str, m: &MetricMatrix, cells: &[(&str, &str, i64)]) {
        for &(a, b, v) in cells {
            self.expect(&format!("{name}({a},{b})"), v, Self::cell(m, a, b));
        }
    }
}

fn cmd_demo(example: DemoArg) -> Result<Outcome, Failure> {
    let log = match example {
        DemoArg::Minmin => demo_minmin()?,
        DemoArg::Boundary => demo_boundary()?,
        DemoArg::Integral => demo_integral()?,
    };
    let mut output = log.text;
    output.push_str(if log.all_match {
        "all expected values reproduced\n"
    } else {
        "some values differ from the expected ones\n"
    });
    Ok(Outcome::with_code(output, if log.all_match { EXIT_OK } else { EXIT_AXIOM }))
}

fn demo_minmin() -> Result<DemoLog, Failure> {
    let net = BuiltinExample::MinMinCounterexample.network();
    let policy = SearchPolicy::for_network(&net);
    let mut log = DemoLog::new("rush-hour network: a->b fast 17:00-18:00, b->c fast 10:00-11:00, a->c 45");
    let directed = directed_worst_best_matrix(&net, policy)?;
    log.expect_matrix("T_U", &directed, &[("a", "b", 60), ("b", "c", 60), ("a", "c", 45)]);

    let minmin = aggregate(&net, Aggregator::MinMin, policy)?;
    log.expect_matrix("minmin", &minmin, &[("a", "b", 10), ("b", "c", 10), ("a", "c", 45)]);
    let report = verify_metric_axioms(&minmin);
    let witness =
        report.triangle.witnesses.iter().find(|w| (w.a.as_str(), w.b.as_str(), w.c.as_str()) == ("a", "b", "c"));
    log.expect("minmin triangle (a,b,c)", "violated", if witness.is_some() { "violated" } else { "holds" });
    if let Some(w) = witness {
        log.line(format!(
            "    {} + {} < {}",
            DemoLog::cell(&minmin, "a", "b"),
            DemoLog::cell(&minmin, "b", "c"),
            w.lhs
        ));
    }

    let reg = regularized(&net)?;
    let maxmin = aggregate(&reg, Aggregator::MaxMin, SearchPolicy::for_network(&reg))?;
    log.expect_matrix("maxmin", &maxmin, &[("a", "b", 60), ("b", "c", 60), ("a", "c", 45)]);
    log.expect("maxmin axioms", "pass", if verify_metric_axioms(&maxmin).all_pass() { "pass" } else { "fail" });
    Ok(log)
}

fn demo_boundary() -> Result<DemoLog, Failure> {
    let net = BuiltinExample::BoundaryExample.network();
    let mut log = DemoLog::new("boundary network: a->c 120, a->b 30, b->c 30 over eight hours");
    let raw = directed_worst_best_matrix(&net, SearchPolicy::for_network(&net))?;
    log.expect_matrix("T_U unregularized", &raw, &[("a", "c", 120), ("a", "b", 30), ("b", "c", 30)]);
    log.expect(
        "unregularized triangle",
        "violated",
        if verify_metric_axioms(&raw).triangle.passed { "holds" } else { "violated" },
    );

    let eps = compute_epsilon(&net)?;
    log.expect("epsilon", 15, eps.value);
    let reg = regularized(&net)?;
    let m = aggregate(&reg, Aggregator::MaxMin, SearchPolicy::for_network(&reg))?;
    log.expect_matrix("T regularized", &m, &[("a", "c", 60), ("a", "b", 30), ("b", "c", 30)]);
    log.expect("regularized axioms", "pass", if verify_metric_axioms(&m).all_pass() { "pass" } else { "fail" });
    Ok(log)
}

fn demo_integral() -> Result<DemoLog, Failure> {
    let net = BuiltinExample::IntegralViolation.network();
    let mut log = DemoLog::new("increasing b->c profile with a timed a->b feeder, uniform mean aggregate");
    let reg = regularized(&net)?;
    let m = aggregate(&reg, Aggregator::IntegralUniform, SearchPolicy::for_network(&reg))?;
    log.expect_matrix("T_I", &m, &[("a", "b", 10), ("b", "c", 60), ("a", "c", 80)]);
    if let Some(exact) = DemoLog::cell(&m, "a", "c").as_ratio() {
        log.line(format!("    exact T_I(a,c) = {exact}"));
    }
    let report = verify_metric_axioms(&m);
    let violated =
        report.triangle.witnesses.iter().any(|w| (w.a.as_str(), w.b.as_str(), w.c.as_str()) == ("a", "b", "c"));
    log.expect("mean triangle (a,b,c)", "violated", if violated { "violated" } else { "holds" });
    Ok(log)
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Validate { network } => cmd_validate(&network),
        Command::Tt { network, from, to, depart, no_wait, regularize } => {
            cmd_tt(&network, &from, &to, depart, no_wait, regularize)
        }
        Command::Metric { network, no_regularize, aggregator, out } => {
            cmd_metric(&network, no_regularize, aggregator.into(), out)
        }
        Command::CompareAggregators { network, no_regularize } => cmd_compare(&network, no_regularize),
        Command::Stability { network } => cmd_stability(&network),
        Command::Capacity { network, scenario, out } => cmd_capacity(&network, &scenario, out),
        Command::Rolling { network, window, stride } => cmd_rolling(&network, window, stride),
        Command::Demo { example } => cmd_demo(example),
    }
}

fn emit(out_file: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out_file {
        Some(path) => fs::write(path, text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::new(EXIT_IO, e)),
    }
}

/// Runs a parsed command line, writing primary output to `stdout` (or the
/// `--out-file`) and diagnostics to `stderr`. Returns the exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_IO;
        }
    };
    let out_file = cli.out_file.clone();
    let result = pool.install(|| dispatch(cli.command));
    let (output, code, message) = match result {
        Ok(o) => (Some(o.output), o.code, o.note),
        Err(f) => (f.output, f.code, Some(format!("error: {}\n", f.message))),
    };
    if let Some(text) = output {
        if let Err(f) = emit(out_file.as_deref(), &text, stdout) {
            let _ = writeln!(stderr, "error: {}", f.message);
            return f.code;
        }
    }
    if let Some(message) = message {
        let _ = stderr.write_all(message.as_bytes());
    }
    code
}

/// Parses `argv` (including the program name) and runs it. Usage errors
/// exit with 1.
pub fn run_args<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(cli, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            code
        }
    }
}
