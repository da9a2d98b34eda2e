//! Command-line front end. The `kbrecon` binary only calls [`main`].
//!
//! Exit codes are listed in [`exit`].

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;
use sha2::{Digest, Sha256};

use crate::backbone::{compute_backbone, sample_backbone, BackboneError};
use crate::cnf_tweak::tweak_cnf;
use crate::formula::{parse_dimacs, parse_query, write_dimacs, write_literal_list, CnfFormula};
use crate::planning::{
    encode_bounded, encode_with_layout, explain_plan, ground, optimal_plan_search, optimality_query, parse_pddl,
    parse_plan, tweak_model, write_plan, ExplainConfig, ExplainError, PlanExplanation, PlanningError,
    PlanningProblem, TweakParams, VarLayout, DEFAULT_STATE_CAP,
};
use crate::reconcile::{
    parse_explanation_records, reconcile_with, verify_explanation, write_records, write_text, Mode, ReconcileConfig,
    ReconcileError, ReconcileProblem, Stats,
};

pub mod exit {
    pub const OK: i32 = 0;
    /// I/O and anything not covered below.
    pub const FAILURE: i32 = 1;
    /// Unreadable CNF, query, explanation, plan or PDDL input.
    pub const PARSE: i32 = 2;
    /// A premise of the problem does not hold.
    pub const PREMISE: i32 = 3;
    pub const TIMEOUT: i32 = 4;
    pub const VERIFY_FAILED: i32 = 5;
    /// Planning failures other than parse errors.
    pub const PLANNING: i32 = 6;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<PlanningError> for CliError {
    fn from(e: PlanningError) -> Self {
        let code = match e {
            PlanningError::Syntax { .. }
            | PlanningError::Unsupported(_)
            | PlanningError::ArityMismatch { .. }
            | PlanningError::UndefinedPredicate(_)
            | PlanningError::UndefinedType(_)
            | PlanningError::UndefinedObject(_)
            | PlanningError::UnknownAction(_) => exit::PARSE,
            PlanningError::InvalidScenario(_) => exit::FAILURE,
            _ => exit::PLANNING,
        };
        CliError::new(code, e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "kbrecon", version, about = "Minimal model reconciliation between propositional KBs")]
pub struct Cli {
    /// More logging; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimum update that makes the human KB entail the query.
    Reconcile(ReconcileArgs),
    /// Explain the feasibility and optimality of a plan to a tweaked model.
    ExplainPlan(ExplainPlanArgs),
    /// Derive a human KB from a CNF (scenarios 9 to 12).
    TweakCnf(TweakCnfArgs),
    /// Derive a human planning KB from a PDDL task (scenarios 1 to 8).
    TweakModel(TweakModelArgs),
    /// Write a query made of backbone literals.
    Backbone(BackboneArgs),
    /// Check an explanation against a human KB and a query.
    Verify(VerifyArgs),
    /// Bounded SAT encoding of a PDDL task.
    EncodePlan(EncodePlanArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Records,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn parse_timeout(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number of seconds"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("the time limit must be positive".into())
    }
}

#[derive(Args, Debug)]
pub struct ReconcileArgs {
    pub kb_a: PathBuf,
    pub kb_h: PathBuf,
    /// Literal list or DIMACS CNF.
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long, default_value_t = Mode::General)]
    pub mode: Mode,
    /// Recorded in the report; the algorithm itself is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seconds.
    #[arg(long, default_value = "1500", value_parser = parse_timeout)]
    pub timeout: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TweakParamArgs {
    /// Preconditions removed per action in scenario 4.
    #[arg(long, default_value_t = 2)]
    pub preconditions: usize,
    /// Effects removed per action in scenario 4.
    #[arg(long, default_value_t = 2)]
    pub effects: usize,
    /// Initial-state atoms removed in scenario 6.
    #[arg(long, default_value_t = 2)]
    pub init_atoms: usize,
}

impl TweakParamArgs {
    fn params(&self) -> TweakParams {
        TweakParams {
            preconditions: self.preconditions,
            effects: self.effects,
            init_atoms: self.init_atoms,
        }
    }
}

#[derive(Args, Debug)]
pub struct ExplainPlanArgs {
    pub domain: PathBuf,
    pub problem: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
    pub scenario: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Explain this plan instead of a shortest one found by search.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long, default_value_t = Mode::Restricted)]
    pub mode: Mode,
    #[arg(long, default_value = "1500", value_parser = parse_timeout)]
    pub timeout: f64,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: usize,
    #[command(flatten)]
    pub tweak: TweakParamArgs,
    /// Also write both KBs, the query, the variable map, the plan and the
    /// tweak log into this directory.
    #[arg(long)]
    pub kb_dir: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TweakCnfArgs {
    pub kb: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u8).range(9..=12))]
    pub scenario: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output KB; the edit log goes to `<out>.log`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TweakModelArgs {
    pub domain: PathBuf,
    pub problem: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
    pub scenario: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Encoding horizon; defaults to the length of a shortest agent plan.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: usize,
    #[command(flatten)]
    pub tweak: TweakParamArgs,
    /// Human KB; `<out>.log` and `<out>.map` are written beside it.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the agent KB here, with its own log and map.
    #[arg(long)]
    pub agent_out: Option<PathBuf>,
    /// Also write the optimality query here.
    #[arg(long)]
    pub query_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BackboneArgs {
    pub kb: PathBuf,
    /// Literals to sample; 0 keeps the whole backbone.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the query here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub kb_h: PathBuf,
    /// Records written by `reconcile`, or a DIMACS file taken as the support.
    pub explanation: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct EncodePlanArgs {
    pub domain: PathBuf,
    pub problem: PathBuf,
    #[arg(long)]
    pub horizon: usize,
    /// Leave out the goal units.
    #[arg(long)]
    pub no_goal: bool,
    /// CNF output; `<out>.map` and `<out>.log` are written beside it.
    #[arg(long)]
    pub out: PathBuf,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new(exit::FAILURE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::new(exit::FAILURE, format!("{}: {e}", path.display())))
}

fn sidecar(path: &Path, ext: &str) -> PathBuf {
    let mut s: OsString = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn sha256(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn read_cnf(path: &Path) -> Result<(CnfFormula, String), CliError> {
    let text = read(path)?;
    let f = parse_dimacs(&text).map_err(|e| CliError::new(exit::PARSE, format!("{}: {e}", path.display())))?;
    Ok((f, sha256(&text)))
}

fn read_query(path: &Path) -> Result<(CnfFormula, String), CliError> {
    let text = read(path)?;
    let f = parse_query(&text).map_err(|e| CliError::new(exit::PARSE, format!("{}: {e}", path.display())))?;
    Ok((f, sha256(&text)))
}

fn read_task(domain: &Path, problem: &Path) -> Result<(PlanningProblem, String, String), CliError> {
    let d = read(domain)?;
    let p = read(problem)?;
    let task = parse_pddl(&d, &p)?;
    Ok((ground(&task)?, sha256(&d), sha256(&p)))
}

/// Key/value lines that open every report and log.
#[derive(Default)]
struct Header {
    lines: String,
}

impl Header {
    fn new(command: &str) -> Self {
        let mut h = Header::default();
        h.kv("command", command);
        h
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        writeln!(self.lines, "{key}={value}").unwrap();
        self
    }

    /// The same lines as `#` comments, for files that have their own syntax.
    fn commented(&self, prefix: &str) -> String {
        self.lines.lines().map(|l| format!("{prefix} {l}\n")).collect()
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stats_records(stats: &Stats) -> String {
    let seeds: Vec<String> = stats.seed_sizes.iter().map(|s| s.to_string()).collect();
    format!(
        "iterations={}\nmcs_count={}\noracle_calls={}\nseed_sizes={}\ntime.elapsed_ms={:.3}\n",
        stats.iterations,
        stats.mcs_count,
        stats.oracle_calls,
        seeds.join(" "),
        stats.elapsed.as_secs_f64() * 1e3
    )
}

/// Report for a failed reconciliation and its exit code.
fn reconcile_failure(mut header: Header, err: &ReconcileError, format: Format) -> (String, i32) {
    let (status, code) = match err {
        ReconcileError::TimedOut { .. } | ReconcileError::Cancelled { .. } => ("timeout", exit::TIMEOUT),
        e if e.is_premise_violation() => ("premise-violation", exit::PREMISE),
        ReconcileError::Query(_) => ("query-error", exit::PARSE),
        _ => ("error", exit::FAILURE),
    };
    header.kv("status", status).kv("error", err);
    let mut text = match format {
        Format::Records => header.lines,
        Format::Text => format!("{status}: {err}\n"),
    };
    if let ReconcileError::TimedOut { stats } | ReconcileError::Cancelled { stats } = err {
        text.push_str(&stats_records(stats));
    }
    (text, code)
}

fn cmd_reconcile(args: &ReconcileArgs) -> Result<i32, CliError> {
    let (kb_a, ha) = read_cnf(&args.kb_a)?;
    let (kb_h, hh) = read_cnf(&args.kb_h)?;
    let (query, hq) = read_query(&args.query)?;
    let mut header = Header::new("reconcile");
    header
        .kv("provenance.seed", args.seed)
        .kv("provenance.kb_a.sha256", ha)
        .kv("provenance.kb_h.sha256", hh)
        .kv("provenance.query.sha256", hq)
        .kv("config.mode", args.mode)
        .kv("config.timeout_s", args.timeout);
    let problem = ReconcileProblem::new(kb_a, kb_h.clone(), query.clone()).with_mode(args.mode);
    let config = ReconcileConfig::with_time_limit(Duration::from_secs_f64(args.timeout));
    match reconcile_with(&problem, &config) {
        Ok(e) => {
            let v = verify_explanation(&e.reduced_kb_h(&kb_h), &e.support, &query)
                .map_err(|err| CliError::new(exit::PARSE, err.to_string()))?;
            let text = match args.output.format {
                Format::Records => {
                    header.kv("status", "ok");
                    format!("{}{}", header.lines, write_records(&e, Some(&v)))
                }
                Format::Text => write_text(&e, Some(&v)),
            };
            emit(&args.output, &text)?;
            Ok(if v.passed() { exit::OK } else { exit::VERIFY_FAILED })
        }
        Err(err) => {
            let (text, code) = reconcile_failure(header, &err, args.output.format);
            emit(&args.output, &text)?;
            eprintln!("kbrecon: {err}");
            Ok(code)
        }
    }
}

fn plan_records(header: &mut Header, e: &PlanExplanation) {
    let layout = e.layout();
    header.kv("plan.length", e.plan.len());
    for step in &e.plan.steps {
        header.kv("plan", step);
    }
    header.kv("tweak.deletions", e.tweak_log.deletions());
    for d in &e.tweak_log.entries {
        header.kv("tweak", d);
    }
    header
        .kv("kb_a.clauses", e.kb_a.cnf.len())
        .kv("kb_h.clauses", e.kb_h.cnf.len())
        .kv("vars", layout.num_vars())
        .kv("feasible", e.feasibility.feasible);
    for a in &e.restored_actions {
        header.kv("repair.action", a);
    }
    for f in &e.restored_init {
        header.kv("repair.init", f);
    }
    for c in &e.repair_clauses {
        header.kv("repair.clause", layout.describe_clause(c));
    }
    header.kv("feasible_after_repair", e.feasible_after_repair);
}

fn plan_text(e: &PlanExplanation) -> String {
    let layout = e.layout();
    let mut out = String::new();
    writeln!(out, "plan ({} steps):", e.plan.len()).unwrap();
    for step in &e.plan.steps {
        writeln!(out, "  {step}").unwrap();
    }
    writeln!(out, "{}", e.tweak_log.to_string().trim_end()).unwrap();
    if !e.feasibility.feasible {
        writeln!(out, "the plan is infeasible in the human model; restored plan actions:").unwrap();
        for a in &e.restored_actions {
            writeln!(out, "  {a}").unwrap();
        }
        if !e.restored_init.is_empty() {
            writeln!(out, "restored initial atoms: {}", e.restored_init.join(", ")).unwrap();
        }
        writeln!(out, "missing clauses ({}):", e.repair_clauses.len()).unwrap();
        for c in &e.repair_clauses {
            writeln!(out, "  {}", layout.describe_clause(c)).unwrap();
        }
    }
    writeln!(out, "explanation ({} clauses):", e.explanation.update.len()).unwrap();
    for c in &e.explanation.update {
        writeln!(out, "  {}", layout.describe_clause(c)).unwrap();
    }
    writeln!(
        out,
        "support: {} clauses, iterations: {}, MCSes: {}, elapsed: {:.3}s",
        e.explanation.support.len(),
        e.explanation.stats.iterations,
        e.explanation.stats.mcs_count,
        e.explanation.stats.elapsed.as_secs_f64()
    )
    .unwrap();
    writeln!(out, "verification: {}", e.verification).unwrap();
    out
}

fn query_literals(query: &CnfFormula) -> Option<Vec<crate::formula::Literal>> {
    query
        .clauses()
        .iter()
        .map(|c| c.is_unit().then(|| c.lits()[0]))
        .collect()
}

fn write_query(path: &Path, query: &CnfFormula) -> Result<(), CliError> {
    match query_literals(query) {
        Some(lits) => write(path, &write_literal_list(&lits)),
        None => write(path, &write_dimacs(query)),
    }
}

fn write_plan_kbs(dir: &Path, e: &PlanExplanation, header: &Header) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|err| CliError::new(exit::FAILURE, format!("{}: {err}", dir.display())))?;
    let map = e.layout().write_var_map();
    write(&dir.join("kb_a.cnf"), &write_dimacs(&e.kb_a.cnf))?;
    write(&dir.join("kb_a.cnf.map"), &map)?;
    write(&dir.join("kb_a.cnf.log"), &header.lines)?;
    write(&dir.join("kb_h.cnf"), &write_dimacs(&e.kb_h.cnf))?;
    write(&dir.join("kb_h.cnf.map"), &map)?;
    write(&dir.join("kb_h.cnf.log"), &format!("{}{}", header.lines, e.tweak_log))?;
    write_query(&dir.join("query.txt"), &e.query)?;
    write(&dir.join("plan.txt"), &write_plan(&e.plan))
}

fn cmd_explain_plan(args: &ExplainPlanArgs) -> Result<i32, CliError> {
    let (agent, hd, hp) = read_task(&args.domain, &args.problem)?;
    let mut header = Header::new("explain-plan");
    header
        .kv("provenance.seed", args.seed)
        .kv("provenance.domain.sha256", hd)
        .kv("provenance.problem.sha256", hp);
    let mut config = ExplainConfig::new(args.scenario, args.seed);
    if let Some(path) = &args.plan {
        let text = read(path)?;
        header.kv("provenance.plan.sha256", sha256(&text));
        config.plan = Some(parse_plan(&text, &agent)?);
    }
    config.params = args.tweak.params();
    config.mode = args.mode;
    config.time_limit = Some(Duration::from_secs_f64(args.timeout));
    config.state_cap = args.state_cap;
    header
        .kv("config.scenario", args.scenario)
        .kv("config.mode", args.mode)
        .kv("config.timeout_s", args.timeout)
        .kv("config.state_cap", args.state_cap)
        .kv("config.preconditions", config.params.preconditions)
        .kv("config.effects", config.params.effects)
        .kv("config.init_atoms", config.params.init_atoms);

    let e = match explain_plan(&agent, &config) {
        Ok(e) => e,
        Err(ExplainError::Planning(err)) => return Err(err.into()),
        Err(ExplainError::Query(err)) => return Err(CliError::new(exit::FAILURE, err.to_string())),
        Err(ExplainError::Reconcile(err)) => {
            let (text, code) = reconcile_failure(header, &err, args.output.format);
            emit(&args.output, &text)?;
            eprintln!("kbrecon: {err}");
            return Ok(code);
        }
    };
    if let Some(dir) = &args.kb_dir {
        write_plan_kbs(dir, &e, &header)?;
    }
    let text = match args.output.format {
        Format::Records => {
            header.kv("status", "ok");
            plan_records(&mut header, &e);
            let layout = e.layout();
            let mut text = header.lines;
            text.push_str(&write_records(&e.explanation, Some(&e.verification)));
            for c in &e.explanation.update {
                writeln!(text, "decoded.update={}", layout.describe_clause(c)).unwrap();
            }
            text
        }
        Format::Text => plan_text(&e),
    };
    emit(&args.output, &text)?;
    Ok(if e.verification.passed() {
        exit::OK
    } else {
        exit::VERIFY_FAILED
    })
}

fn cmd_tweak_cnf(args: &TweakCnfArgs) -> Result<i32, CliError> {
    let (kb, hash) = read_cnf(&args.kb)?;
    let (out, log) = tweak_cnf(&kb, args.scenario, args.seed).map_err(|e| CliError::new(exit::FAILURE, e.to_string()))?;
    let mut header = Header::new("tweak-cnf");
    header
        .kv("provenance.seed", args.seed)
        .kv("provenance.kb.sha256", hash)
        .kv("config.scenario", args.scenario);
    write(&args.out, &format!("{}{}", header.commented("c"), write_dimacs(&out)))?;
    write(&sidecar(&args.out, "log"), &format!("{}{log}", header.lines))?;
    println!(
        "{} of {} clauses removed, {} picked for trimming; wrote {}",
        log.removed(),
        kb.len(),
        log.picked_for_trim(),
        args.out.display()
    );
    Ok(exit::OK)
}

fn write_encoding(path: &Path, cnf: &CnfFormula, layout: &VarLayout, log: &str) -> Result<(), CliError> {
    write(path, &write_dimacs(cnf))?;
    write(&sidecar(path, "map"), &layout.write_var_map())?;
    write(&sidecar(path, "log"), log)
}

fn cmd_tweak_model(args: &TweakModelArgs) -> Result<i32, CliError> {
    let (agent, hd, hp) = read_task(&args.domain, &args.problem)?;
    let n = match args.horizon {
        Some(n) => n,
        None => optimal_plan_search(&agent, args.state_cap)?.len(),
    };
    let (human, log) = tweak_model(&agent, args.scenario, args.seed, args.tweak.params())?;
    let layout = VarLayout::new(&agent, n);
    let mut header = Header::new("tweak-model");
    header
        .kv("provenance.seed", args.seed)
        .kv("provenance.domain.sha256", hd)
        .kv("provenance.problem.sha256", hp)
        .kv("config.scenario", args.scenario)
        .kv("config.horizon", n)
        .kv("config.preconditions", args.tweak.preconditions)
        .kv("config.effects", args.tweak.effects)
        .kv("config.init_atoms", args.tweak.init_atoms);
    let mut kb_h = encode_with_layout(&human, &layout, false)?;
    let mut kb_a = encode_with_layout(&agent, &layout, false)?;
    // goal definitions are shared by both models
    let query = optimality_query(&mut kb_a)?;
    optimality_query(&mut kb_h)?;
    write_encoding(&args.out, &kb_h.cnf, &layout, &format!("{}{log}", header.lines))?;
    if let Some(path) = &args.agent_out {
        write_encoding(path, &kb_a.cnf, &layout, &header.lines)?;
    }
    if let Some(path) = &args.query_out {
        write_query(path, &query)?;
    }
    println!(
        "horizon {n}: {} deletions, human KB {} clauses, agent KB {} clauses; wrote {}",
        log.deletions(),
        kb_h.cnf.len(),
        kb_a.cnf.len(),
        args.out.display()
    );
    Ok(exit::OK)
}

fn cmd_backbone(args: &BackboneArgs) -> Result<i32, CliError> {
    let (kb, _) = read_cnf(&args.kb)?;
    let bb = compute_backbone(&kb).map_err(|e| match e {
        BackboneError::Unsatisfiable => CliError::new(exit::PREMISE, e.to_string()),
    })?;
    if bb.is_empty() {
        return Err(CliError::new(exit::PREMISE, "no backbone query derivable"));
    }
    if args.k > bb.len() {
        warn!("k = {} exceeds the backbone size {}; using all of it", args.k, bb.len());
        eprintln!("kbrecon: warning: k = {} exceeds the backbone size {}; using all of it", args.k, bb.len());
    }
    let lits = sample_backbone(&bb, args.k, args.seed);
    let text = write_literal_list(&lits);
    match &args.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(exit::OK)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let (kb_h, hh) = read_cnf(&args.kb_h)?;
    let (query, hq) = read_query(&args.query)?;
    let text = read(&args.explanation)?;
    let parsed = parse_explanation_records(&text)
        .map_err(|e| CliError::new(exit::PARSE, format!("{}: {e}", args.explanation.display())))?;
    let reduced = kb_h.without(&parsed.removed);
    let v = verify_explanation(&reduced, &parsed.support, &query).map_err(|e| CliError::new(exit::PARSE, e.to_string()))?;
    let report = match args.output.format {
        Format::Records => {
            let mut header = Header::new("verify");
            header
                .kv("provenance.kb_h.sha256", hh)
                .kv("provenance.explanation.sha256", sha256(&text))
                .kv("provenance.query.sha256", hq)
                .kv("support_size", parsed.support.len())
                .kv("verify.entailment", v.entailment)
                .kv("verify.minimality", v.minimality)
                .kv("verify.consistency", v.consistency)
                .kv("status", if v.passed() { "pass" } else { "fail" });
            header.lines
        }
        Format::Text => format!("{}: {v}\n", if v.passed() { "pass" } else { "fail" }),
    };
    emit(&args.output, &report)?;
    Ok(if v.passed() { exit::OK } else { exit::VERIFY_FAILED })
}

fn cmd_encode_plan(args: &EncodePlanArgs) -> Result<i32, CliError> {
    let (problem, hd, hp) = read_task(&args.domain, &args.problem)?;
    let enc = encode_bounded(&problem, args.horizon, !args.no_goal);
    let mut header = Header::new("encode-plan");
    header
        .kv("provenance.domain.sha256", hd)
        .kv("provenance.problem.sha256", hp)
        .kv("config.horizon", args.horizon)
        .kv("config.goal", !args.no_goal);
    write_encoding(&args.out, &enc.cnf, &enc.layout, &header.lines)?;
    println!(
        "{} fluents, {} actions, horizon {}: {} variables, {} clauses; wrote {}",
        problem.fluents.len(),
        problem.actions.len(),
        args.horizon,
        enc.layout.num_vars(),
        enc.cnf.len(),
        args.out.display()
    );
    Ok(exit::OK)
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Reconcile(a) => cmd_reconcile(a),
        Command::ExplainPlan(a) => cmd_explain_plan(a),
        Command::TweakCnf(a) => cmd_tweak_cnf(a),
        Command::TweakModel(a) => cmd_tweak_model(a),
        Command::Backbone(a) => cmd_backbone(a),
        Command::Verify(a) => cmd_verify(a),
        Command::EncodePlan(a) => cmd_encode_plan(a),
    }
}

/// Parse `args`, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::PARSE } else { exit::OK };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kbrecon: {}", e.message);
            e.code
        }
    }
}

pub fn main() -> ! {
    std::process::exit(main_with_args(std::env::args_os()))
}
