//! Command-line front end: argument parsing, rendering and exit codes.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use allocflow_core::lattice::count_flows;
use allocflow_core::optimizer::{pareto_front, ParetoScatter};
use allocflow_core::sim::{scaling_benchmark, ComparisonStats, ScalingReport};
use allocflow_core::time::SegmentKind;
use allocflow_core::{
    all_flows, baseline_overall, flow_cap_from_env, location_memory, monte_carlo_compare, parse_problem, robot_memory,
    serialize_problem, solve_baseline, solve_baseline_bruteforce, solve_branch_bound, solve_bruteforce, validate,
    AllocationResult, Bits, Dag, DelayMode, LatticeError, Model, MonteCarloConfig, Objective, ObjectiveKind, Placement,
    ProblemInstance, RandomParams, SolveError, TimeAggregate, DEFAULT_ENUMERATION_CAP,
};
use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "allocflow", version, about = "Place robot algorithms on edge, fog and cloud nodes")]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for enumeration and simulation.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Distance,
    TimeMax,
    TimeTotal,
    Memory,
}

impl From<ObjectiveArg> for ObjectiveKind {
    fn from(a: ObjectiveArg) -> Self {
        match a {
            ObjectiveArg::Distance => ObjectiveKind::Distance,
            ObjectiveArg::TimeMax => ObjectiveKind::TimeMax,
            ObjectiveArg::TimeTotal => ObjectiveKind::TimeTotal,
            ObjectiveArg::Memory => ObjectiveKind::Memory,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggregateArg {
    Max,
    Total,
    Mean,
}

impl From<AggregateArg> for TimeAggregate {
    fn from(a: AggregateArg) -> Self {
        match a {
            AggregateArg::Max => TimeAggregate::MaxFlow,
            AggregateArg::Total => TimeAggregate::TotalFlows,
            AggregateArg::Mean => TimeAggregate::MeanFlows,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ours,
    Baseline,
}

#[derive(Debug, Clone, clap::Args)]
pub struct ObjectiveArgs {
    #[arg(long, value_enum, default_value = "distance")]
    pub objective: ObjectiveArg,
    /// Memory weight (overrides the instance option).
    #[arg(long)]
    pub wm: Option<f64>,
    /// Time weight (overrides the instance option).
    #[arg(long)]
    pub wt: Option<f64>,
}

impl ObjectiveArgs {
    fn build(&self, instance: &ProblemInstance) -> anyhow::Result<Objective> {
        let mut o = Objective::new(self.objective.into(), instance);
        for (w, slot, name) in [(self.wm, &mut o.memory_weight, "--wm"), (self.wt, &mut o.time_weight, "--wt")] {
            if let Some(w) = w {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Usage(format!("{name} must be a positive number")).into());
                }
                *slot = w;
            }
        }
        Ok(o)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an instance and list every violation.
    Validate { instance: PathBuf },
    /// List execution flows, one per line.
    Flows {
        instance: PathBuf,
        /// Print only the number of flows.
        #[arg(long)]
        count_only: bool,
    },
    /// Per-flow time breakdown of a placement.
    Time {
        instance: PathBuf,
        #[arg(long)]
        placement: PathBuf,
        #[arg(long, value_enum)]
        aggregate: Option<AggregateArg>,
    },
    /// Memory per location and on the robot for a placement.
    Memory {
        instance: PathBuf,
        #[arg(long)]
        placement: PathBuf,
        /// Count only the largest step's processing memory.
        #[arg(long)]
        peak: bool,
    },
    /// Find the best placement.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        objective: ObjectiveArgs,
        #[arg(long, value_enum, default_value = "ours")]
        method: Method,
        /// Enumerate every placement instead of branch-and-bound.
        #[arg(long)]
        oracle: bool,
        /// Starting incumbent for branch-and-bound.
        #[arg(long)]
        initial_guess: Option<PathBuf>,
        /// Enumeration limit for --oracle.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Memory/time scatter of all placements with the non-dominated ones flagged.
    Pareto {
        instance: PathBuf,
        #[command(flatten)]
        objective: ObjectiveArgs,
        /// Placements evaluated at most; beyond this a regular subsample is used.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Compare ours against the baseline under random link delays.
    Simulate {
        instance: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: u32,
        #[command(flatten)]
        objective: ObjectiveArgs,
        /// Solve again on every sampled realization.
        #[arg(long)]
        resolve_per_trial: bool,
    },
    /// Solver run time over random instances of growing size.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "4,6,8,10,12,16,20")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        reps: u32,
        #[arg(long)]
        layers: Option<usize>,
        #[arg(long, default_value_t = 0.3)]
        edge_prob: f64,
        /// Draw execution times without the cloud <= fog <= edge ordering.
        #[arg(long)]
        unordered_times: bool,
    },
    /// Write the bundled instances to a directory.
    Examples {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
}

/// Bad flag values found after parsing.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Invalid input: unreadable, malformed or inadmissible.
#[derive(Debug)]
struct Invalid(String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    if let Some(e) = err.downcast_ref::<SolveError>() {
        if e.is_cap() {
            return EXIT_CAP;
        }
    }
    if let Some(LatticeError::FlowExplosion { .. }) = err.downcast_ref::<LatticeError>() {
        return EXIT_CAP;
    }
    EXIT_INVALID
}

/// Runs one invocation and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stderr) {
        Ok(Outcome { text, code }) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display())),
                None => stdout.write_all(text.as_bytes()).map_err(Into::into),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e:#}");
                return EXIT_INVALID;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            exit_code(&e)
        }
    }
}

pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: EXIT_OK }
    }
}

pub fn load_instance(path: &Path) -> anyhow::Result<ProblemInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Invalid(format!("reading {}: {e}", path.display())))?;
    parse_problem(&text).map_err(|e| Invalid(format!("{}: {e}", path.display())).into())
}

fn load_placement(path: &Path) -> anyhow::Result<Placement> {
    let text = std::fs::read_to_string(path).map_err(|e| Invalid(format!("reading {}: {e}", path.display())))?;
    Placement::from_json(&text).map_err(|e| Invalid(format!("{}: {e}", path.display())).into())
}

fn model(instance: &ProblemInstance) -> anyhow::Result<Model> {
    Ok(Model::new(instance, flow_cap_from_env())?)
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Validate { instance } => {
            let inst = load_instance(instance)?;
            let report = validate(&inst);
            let text = render_json(&json!({
                "valid": report.is_empty(),
                "violations": report.violations,
            }));
            Ok(Outcome {
                text,
                code: if report.is_empty() { EXIT_OK } else { EXIT_INVALID },
            })
        }
        Command::Flows { instance, count_only } => {
            let inst = load_instance(instance)?;
            let dag = Dag::from_instance(&inst);
            if *count_only {
                return Ok(Outcome::ok(format!("{}\n", count_flows(&dag)?)));
            }
            Ok(Outcome::ok(render_flows(&all_flows(&dag, flow_cap_from_env())?)))
        }
        Command::Time {
            instance,
            placement,
            aggregate,
        } => {
            let inst = load_instance(instance)?;
            let placement = load_placement(placement)?;
            let aggregate = aggregate.map(Into::into).unwrap_or(inst.options.time_aggregate);
            Ok(Outcome::ok(render_time(&inst, &placement, aggregate)?))
        }
        Command::Memory { instance, placement, peak } => {
            let inst = load_instance(instance)?;
            let placement = load_placement(placement)?;
            Ok(Outcome::ok(render_memory(&inst, &placement, *peak)?))
        }
        Command::Solve {
            instance,
            objective,
            method,
            oracle,
            initial_guess,
            cap,
        } => {
            let inst = load_instance(instance)?;
            let objective = objective.build(&inst)?;
            let model = model(&inst)?;
            let guess = initial_guess.as_deref().map(load_placement).transpose()?;
            let result = match (method, oracle) {
                (Method::Ours, false) => solve_branch_bound(&model, &objective, guess.as_ref())?,
                (Method::Ours, true) => solve_bruteforce(&model, &objective, *cap, cli.threads)?,
                (Method::Baseline, false) => solve_baseline(&model)?,
                (Method::Baseline, true) => solve_baseline_bruteforce(&model, *cap, cli.threads)?,
            };
            Ok(Outcome::ok(render_solve(&model, &objective, *method, &result)?))
        }
        Command::Pareto { instance, objective, cap } => {
            let inst = load_instance(instance)?;
            let objective = objective.build(&inst)?;
            let model = model(&inst)?;
            let scatter = pareto_front(&model, &objective, *cap, cli.threads)?;
            if scatter.subsampled() {
                let _ = writeln!(
                    stderr,
                    "warning: {} placements exceed the cap of {cap}; every {}th placement evaluated",
                    scatter.total, scatter.stride
                );
            }
            Ok(Outcome::ok(render_pareto(&scatter)?))
        }
        Command::Simulate {
            instance,
            trials,
            objective,
            resolve_per_trial,
        } => {
            if *trials == 0 {
                return Err(Usage("--trials must be at least 1".into()).into());
            }
            let inst = load_instance(instance)?;
            let objective = objective.build(&inst)?;
            let model = model(&inst)?;
            let config = MonteCarloConfig {
                trials: *trials,
                seed: cli.seed,
                threads: cli.threads,
                resolve_per_trial: *resolve_per_trial,
            };
            Ok(Outcome::ok(render_stats(&monte_carlo_compare(&model, &objective, &config)?)))
        }
        Command::Bench {
            sizes,
            reps,
            layers,
            edge_prob,
            unordered_times,
        } => {
            if sizes.is_empty() || sizes.contains(&0) || *reps == 0 {
                return Err(Usage("--sizes must list positive sizes and --reps must be positive".into()).into());
            }
            if !(0.0..=1.0).contains(edge_prob) {
                return Err(Usage("--edge-prob must lie in [0, 1]".into()).into());
            }
            let params = RandomParams {
                layers: *layers,
                edge_prob: *edge_prob,
                ordered_times: !unordered_times,
                ..RandomParams::default()
            };
            Ok(Outcome::ok(render_scaling(&scaling_benchmark(sizes, *reps, cli.seed, &params)?)?))
        }
        Command::Examples { dir } => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let mut listing = String::new();
            for (name, inst) in allocflow_core::fixtures::bundled() {
                let path = dir.join(&name);
                std::fs::write(&path, serialize_problem(&inst)).with_context(|| format!("writing {}", path.display()))?;
                listing.push_str(&format!("{}\n", path.display()));
            }
            Ok(Outcome::ok(listing))
        }
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

pub fn render_flows(flows: &[allocflow_core::ExecutionFlow]) -> String {
    flows.iter().map(|f| format!("{}\n", f.ids().join(","))).collect()
}

fn csv_text(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w)?;
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

fn aggregate_name(a: TimeAggregate) -> &'static str {
    match a {
        TimeAggregate::MaxFlow => "max",
        TimeAggregate::TotalFlows => "total",
        TimeAggregate::MeanFlows => "mean",
    }
}

/// Per-flow CSV followed by a comment line with the aggregate.
pub fn render_time(instance: &ProblemInstance, placement: &Placement, aggregate: TimeAggregate) -> anyhow::Result<String> {
    let report = validate(instance);
    if !report.is_empty() {
        return Err(Invalid(format!("instance is not admissible:\n{report}")).into());
    }
    let flows = all_flows(&Dag::from_instance(instance), flow_cap_from_env())?;
    let mut timings = Vec::with_capacity(flows.len());
    for flow in &flows {
        timings.push(allocflow_core::flow_time(instance, flow, placement, DelayMode::Mean)?);
    }
    let totals: Vec<f64> = timings.iter().map(|t| t.total_seconds).collect();
    let overall = allocflow_core::overall_time(&totals, aggregate);
    let mut text = csv_text(|w| {
        w.write_record(["flow", "request_hop_s", "exec_s", "inter_hop_s", "return_hop_s", "total_s"])?;
        for t in &timings {
            w.write_record([
                t.flow.ids().join(">"),
                t.seconds_of(SegmentKind::RequestHop).to_string(),
                t.seconds_of(SegmentKind::Exec).to_string(),
                t.seconds_of(SegmentKind::InterHop).to_string(),
                t.seconds_of(SegmentKind::ReturnHop).to_string(),
                t.total_seconds.to_string(),
            ])?;
        }
        Ok(())
    })?;
    text.push_str(&format!("# {} {overall}\n", aggregate_name(aggregate)));
    Ok(text)
}

/// Bytes per location in declaration order, then the robot total.
pub fn render_memory(instance: &ProblemInstance, placement: &Placement, peak: bool) -> anyhow::Result<String> {
    let model = model(instance)?;
    model.assignment(placement)?;
    let partition = model.partition();
    csv_text(|w| {
        w.write_record(["location", "bytes"])?;
        for node in &instance.nodes {
            let bits = location_memory(instance, placement, partition, &node.id, peak);
            w.write_record([node.id.clone(), bits.bytes().to_string()])?;
        }
        w.write_record(["robot".to_string(), robot_memory(instance, placement, partition, peak).bytes().to_string()])?;
        Ok(())
    })
}

fn objective_name(kind: ObjectiveKind) -> &'static str {
    match kind {
        ObjectiveKind::Distance => "distance",
        ObjectiveKind::TimeMax => "time-max",
        ObjectiveKind::TimeTotal => "time-total",
        ObjectiveKind::Memory => "memory",
    }
}

pub fn render_solve(model: &Model, objective: &Objective, method: Method, r: &AllocationResult) -> anyhow::Result<String> {
    let mut v = json!({
        "placement": r.placement,
        "memory_bytes": r.cost.memory_bytes(),
        "time_seconds": r.cost.time_seconds,
        "distance": r.cost.distance,
        "explored_nodes": r.explored_nodes,
        "optimal": r.optimal,
    });
    let obj = v.as_object_mut().expect("object");
    match method {
        Method::Ours => {
            obj.insert("method".into(), json!("ours"));
            obj.insert("objective".into(), json!(objective_name(objective.kind)));
        }
        Method::Baseline => {
            obj.insert("method".into(), json!("baseline"));
            obj.insert(
                "overall_with_return_seconds".into(),
                json!(baseline_overall(model, &r.placement)?),
            );
        }
    }
    Ok(render_json(&v))
}

pub fn render_pareto(scatter: &ParetoScatter) -> anyhow::Result<String> {
    csv_text(|w| {
        w.write_record(["placement_lex_index", "memory_mb", "time_s", "distance", "on_front"])?;
        for p in &scatter.points {
            w.write_record([
                p.lex_index.to_string(),
                Bits(p.memory_bits).megabytes().to_string(),
                p.time_seconds.to_string(),
                p.distance.to_string(),
                p.on_front.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn render_stats(stats: &ComparisonStats) -> String {
    render_json(&serde_json::to_value(stats).expect("stats serialize"))
}

pub fn render_scaling(report: &ScalingReport) -> anyhow::Result<String> {
    let mut text = csv_text(|w| {
        w.write_record(["n", "mean_seconds"])?;
        for p in &report.points {
            w.write_record([p.n.to_string(), p.mean_seconds.to_string()])?;
        }
        Ok(())
    })?;
    let show = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| v.to_string());
    text.push_str(&format!(
        "# slope={} intercept={} r2={}\n",
        show(report.fit.map(|f| f.slope)),
        show(report.fit.map(|f| f.intercept)),
        show(report.fit.and_then(|f| f.r2)),
    ));
    Ok(text)
}
