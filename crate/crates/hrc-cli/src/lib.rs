//! Command-line front end for the matching toolkit in `hrc-core`.
//!
//! One binary, seven subcommands, deterministic output. Results go to
//! stdout and nowhere else; parse errors, shape complaints and the one-line
//! run report go to stderr. Identical inputs produce byte-identical stdout,
//! so runs can be diffed, cached, and replayed in scripts.
//!
//! Exit codes, uniformly: 0 = success with a result; 1 = a well-formed
//! negative answer (no stable matching, violations found); 2 = usage or
//! format error; 3 = a solver result failed its own re-check. Every `solve`
//! success is re-verified by the independent stability checker before a
//! single byte is printed.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use hrc_core::gen::{
    gen_dual_market_from_sat, gen_from_smti, gen_minbp_from_smti, gen_random, CoupleMix, GenParams,
};
use hrc_core::model::{
    classify_couple, parse_cnf, parse_hrc, parse_matching, parse_smti, write_hrc, CoupleType,
    DoctorRole, HrcInstance, HrcMatching, SepClass, Slot,
};
use hrc_core::oracle::{enumerate_stable, min_bp, verify_rural_hospitals, SearchBudget};
use hrc_core::reductions::{
    reduce_general, reduce_typed, solve, ReductionError, SolveMode, SolvePath, SolveResult,
};
use hrc_core::sf::solve_half_integral;
use hrc_core::sf::write_sf;
use hrc_core::stability::{check_stability, BlockingPair, FeasibilityError};

pub const EXIT_OK: i32 = 0;
/// A well-formed negative answer: no stable matching, or violations found.
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
/// A solver result contradicted the independent checker.
pub const EXIT_SELF_CHECK: i32 = 3;

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "hrc",
    about = "Stable matching for hospitals/residents with couples",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Capacities may move by one; works for every sub-responsive,
    /// sub-complete instance.
    Near,
    /// Capacities are kept; requires every couple to have a supported shape.
    Exact,
    /// Exact when every couple has a supported shape, near otherwise.
    Auto,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an instance and report structural problems, one per line.
    Validate { file: PathBuf },
    /// Report separability class and shape for every couple.
    Classify { file: PathBuf },
    /// Compute a stable matching, adjusting capacities by at most one when
    /// the exact encoding does not apply.
    Solve {
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        /// Write the reduced fixtures instance and its half-integral
        /// solution to this file.
        #[arg(long, value_name = "PATH")]
        dump_sf: Option<PathBuf>,
        /// Accepted for script compatibility; output is deterministic
        /// regardless.
        #[arg(long)]
        seedless: bool,
        file: PathBuf,
    },
    /// Check a matching file against an instance and print every
    /// feasibility error and blocking pair.
    Check { instance: PathBuf, matching: PathBuf },
    /// Exhaustive-search probes for desk-scale instances.
    Oracle {
        /// List every stable matching.
        #[arg(long)]
        enumerate: bool,
        /// Report the smallest number of blocking pairs over all feasible
        /// matchings, with a witness.
        #[arg(long)]
        min_bp: bool,
        /// Check the three persistence clauses across all stable matchings.
        #[arg(long)]
        rural: bool,
        /// Stop enumerating after this many stable matchings.
        #[arg(long, value_name = "N")]
        limit: Option<usize>,
        /// Abort after this many search nodes (default 20000000).
        #[arg(long, value_name = "N")]
        budget_nodes: Option<u64>,
        file: PathBuf,
    },
    /// Generate instances for testing and benchmarking.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Print the fixtures reduction of an instance together with its
    /// half-integral solution.
    DumpSf {
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Random instance with planted couple classes.
    Random {
        /// Equal seeds reproduce the instance byte for byte.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        singles: usize,
        #[arg(long, default_value_t = 2)]
        couples: usize,
        #[arg(long, default_value_t = 4)]
        hospitals: usize,
        #[arg(long, default_value_t = 1, value_name = "Q")]
        cap_min: u32,
        #[arg(long, default_value_t = 2, value_name = "Q")]
        cap_max: u32,
        /// Shortest individual preference list.
        #[arg(long, default_value_t = 1, value_name = "LEN")]
        list_min: usize,
        #[arg(long, default_value_t = 3, value_name = "LEN")]
        list_max: usize,
        /// Weight of separable couples in the mix.
        #[arg(long, default_value_t = 1, value_name = "W")]
        separable: u32,
        /// Weight of couples with exactly one employable member.
        #[arg(long, default_value_t = 1, value_name = "W")]
        half_separable: u32,
        /// Weight of couples matched together or not at all.
        #[arg(long, default_value_t = 1, value_name = "W")]
        connected: u32,
        /// Weight of couples whose members apply to disjoint hospitals.
        #[arg(long, default_value_t = 1, value_name = "W")]
        type_a: u32,
        /// Weight of couples with one shared hospital taking the member it
        /// ranks worse only there.
        #[arg(long, default_value_t = 1, value_name = "W")]
        type_b: u32,
        /// Weight of couples with one shared hospital ranked last by both.
        #[arg(long, default_value_t = 1, value_name = "W")]
        type_c: u32,
        /// Weight of couples with no structural constraint.
        #[arg(long, default_value_t = 1, value_name = "W")]
        unrestricted: u32,
        /// Split the hospitals into two sides, one per couple member.
        #[arg(long)]
        dual_market: bool,
    },
    /// Encode a small marriage core (strict men, women strict or with one
    /// tie of two) as an instance whose stable matchings mirror the core's
    /// complete weakly-stable ones.
    SmtiHrc { file: PathBuf },
    /// Encode a (2,2)-E3-SAT formula as a capacity-one dual-market
    /// instance that is solvable exactly when the formula is satisfiable.
    SatDual {
        file: PathBuf,
        /// Add the gadget that forces couples to be matched or blocked.
        #[arg(long)]
        enforcers: bool,
        /// Emit master preference lists as header comments.
        #[arg(long)]
        master_lists: bool,
    },
    /// Amplify a marriage core into a pairs-only instance separating
    /// "few blocking pairs" from "many".
    Minbp {
        file: PathBuf,
        /// Exponent in the default replication factor.
        #[arg(long, value_name = "N")]
        c_exp: u32,
        /// Use this replication factor instead of the computed one.
        #[arg(long, value_name = "B")]
        b_override: Option<u64>,
        /// Seed for the recorded tie-break coin.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

// ---------------------------------------------------------------------------
// Failure plumbing and the run report
// ---------------------------------------------------------------------------

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn broken(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_SELF_CHECK, message: message.into() }
}

/// Shape errors in the instance are the caller's problem; a reduction
/// guarantee failing mid-pipeline is ours.
fn reduction_failure(e: &ReductionError) -> Failure {
    match e {
        ReductionError::UnsupportedCouple { .. } | ReductionError::UntypedCouple { .. } => {
            usage(e.to_string())
        }
        ReductionError::UnstableWeights | ReductionError::FractionalWeights => {
            broken(e.to_string())
        }
    }
}

struct Counters {
    doctors: usize,
    singles: usize,
    couples: usize,
    type_a: usize,
    type_b: usize,
    type_c: usize,
    untyped: usize,
    hospitals: usize,
    /// Total length of the hospitals' preference lists.
    m: usize,
}

impl Counters {
    fn of(inst: &HrcInstance) -> Counters {
        let mut c = Counters {
            doctors: inst.doctors.len(),
            singles: inst
                .doctors
                .iter()
                .filter(|d| matches!(d.role, DoctorRole::Single { .. }))
                .count(),
            couples: inst.couples.len(),
            type_a: 0,
            type_b: 0,
            type_c: 0,
            untyped: 0,
            hospitals: inst.hospitals.len(),
            m: inst.hospitals.iter().map(|h| h.pref.len()).sum(),
        };
        for ci in 0..inst.couples.len() {
            match classify_couple(inst, ci).couple_type {
                CoupleType::A => c.type_a += 1,
                CoupleType::B => c.type_b += 1,
                CoupleType::C => c.type_c += 1,
                CoupleType::Other => c.untyped += 1,
            }
        }
        c
    }
}

/// One line on stderr per invocation: what ran, on what, and how it went.
struct Report {
    subcommand: &'static str,
    digest: Option<u64>,
    mode: Option<&'static str>,
    status: &'static str,
    counters: Option<Counters>,
}

impl Report {
    fn new(subcommand: &'static str) -> Report {
        Report { subcommand, digest: None, mode: None, status: "error", counters: None }
    }

    fn line(&self, millis: u128) -> String {
        let mut s = format!("report subcommand={}", self.subcommand);
        match self.digest {
            Some(d) => write!(s, " digest={d:016x}").unwrap(),
            None => s.push_str(" digest=-"),
        }
        write!(s, " mode={}", self.mode.unwrap_or("-")).unwrap();
        write!(s, " status={}", self.status).unwrap();
        if let Some(c) = &self.counters {
            write!(
                s,
                " doctors={} singles={} couples={} type-a={} type-b={} type-c={} untyped={} hospitals={} m={}",
                c.doctors, c.singles, c.couples, c.type_a, c.type_b, c.type_c, c.untyped,
                c.hospitals, c.m
            )
            .unwrap();
        }
        write!(s, " millis={millis}").unwrap();
        s
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Parse `argv` (program name first), run the subcommand, and write the
/// result to `stdout` and diagnostics plus the run report to `stderr`.
/// Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes and belong on stdout.
            return if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            };
        }
    };

    let started = Instant::now();
    let mut report = Report::new(subcommand_name(&cli.cmd));
    let outcome = dispatch(cli.cmd, &mut report);
    let code = match outcome {
        Ok((text, code)) => {
            let _ = stdout.write_all(text.as_bytes());
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    };
    let _ = writeln!(stderr, "{}", report.line(started.elapsed().as_millis()));
    code
}

fn subcommand_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Validate { .. } => "validate",
        Cmd::Classify { .. } => "classify",
        Cmd::Solve { .. } => "solve",
        Cmd::Check { .. } => "check",
        Cmd::Oracle { .. } => "oracle",
        Cmd::Gen(GenCmd::Random { .. }) => "gen-random",
        Cmd::Gen(GenCmd::SmtiHrc { .. }) => "gen-smti-hrc",
        Cmd::Gen(GenCmd::SatDual { .. }) => "gen-sat-dual",
        Cmd::Gen(GenCmd::Minbp { .. }) => "gen-minbp",
        Cmd::DumpSf { .. } => "dump-sf",
    }
}

fn dispatch(cmd: Cmd, report: &mut Report) -> Result<(String, i32), Failure> {
    match cmd {
        Cmd::Validate { file } => run_validate(&file, report),
        Cmd::Classify { file } => run_classify(&file, report),
        Cmd::Solve { mode, dump_sf, seedless: _, file } => {
            run_solve(mode, dump_sf.as_deref(), &file, report)
        }
        Cmd::Check { instance, matching } => run_check(&instance, &matching, report),
        Cmd::Oracle { enumerate, min_bp, rural, limit, budget_nodes, file } => {
            run_oracle(enumerate, min_bp, rural, limit, budget_nodes, &file, report)
        }
        Cmd::Gen(which) => run_gen(which, report),
        Cmd::DumpSf { mode, file } => run_dump_sf(mode, &file, report),
    }
}

// ---------------------------------------------------------------------------
// Input loading
// ---------------------------------------------------------------------------

fn read_input(path: &Path, report: &mut Report) -> Result<String, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    report.digest = Some(fnv1a(text.as_bytes()));
    Ok(text)
}

fn load_instance(path: &Path, report: &mut Report) -> Result<HrcInstance, Failure> {
    let text = read_input(path, report)?;
    let inst =
        parse_hrc(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    report.counters = Some(Counters::of(&inst));
    Ok(inst)
}

/// Load an instance and insist it passes validation; every subcommand other
/// than `validate` itself refuses malformed inputs.
fn load_valid_instance(path: &Path, report: &mut Report) -> Result<HrcInstance, Failure> {
    let inst = load_instance(path, report)?;
    let issues = inst.validate();
    if issues.is_empty() {
        return Ok(inst);
    }
    let mut msg = format!("{}: instance fails validation", path.display());
    for issue in issues {
        write!(msg, "\n  {issue}").unwrap();
    }
    Err(usage(msg))
}

// ---------------------------------------------------------------------------
// Result rendering
// ---------------------------------------------------------------------------

fn slot_name(inst: &HrcInstance, s: Slot) -> &str {
    match s {
        Some(h) => &inst.hospitals[h].name,
        None => "-",
    }
}

/// `match <doctor> <hospital-or-->` lines for every doctor, sorted by
/// doctor identifier.
fn push_match_lines(out: &mut String, inst: &HrcInstance, m: &HrcMatching) {
    let mut rows: Vec<(&str, &str)> = inst
        .doctors
        .iter()
        .enumerate()
        .map(|(d, doc)| (doc.name.as_str(), slot_name(inst, m.assignment[d])))
        .collect();
    rows.sort();
    for (doctor, hospital) in rows {
        writeln!(out, "match {doctor} {hospital}").unwrap();
    }
}

/// The full solve result: status line, changed capacities, assignments.
fn render_solution(inst: &HrcInstance, m: &HrcMatching) -> String {
    let mut out = String::from("status stable\n");
    let mut caps: Vec<(&str, u32)> = inst
        .hospitals
        .iter()
        .enumerate()
        .filter(|&(h, hosp)| m.capacities[h] != hosp.capacity)
        .map(|(h, hosp)| (hosp.name.as_str(), m.capacities[h]))
        .collect();
    caps.sort();
    for (hospital, cap) in caps {
        writeln!(out, "capacity {hospital} {cap}").unwrap();
    }
    push_match_lines(&mut out, inst, m);
    out
}

fn feasibility_line(inst: &HrcInstance, e: &FeasibilityError) -> String {
    match e {
        FeasibilityError::UnacceptableAssignment { doctor, hospital } => format!(
            "infeasible unacceptable {} {}",
            inst.doctors[*doctor].name, inst.hospitals[*hospital].name
        ),
        FeasibilityError::JointUnlisted { couple, slots } => {
            let [a, b] = inst.couples[*couple].members;
            format!(
                "infeasible joint {} {} {} {}",
                inst.doctors[a].name,
                inst.doctors[b].name,
                slot_name(inst, slots.0),
                slot_name(inst, slots.1)
            )
        }
        FeasibilityError::Oversubscribed { hospital, load, capacity } => format!(
            "infeasible oversubscribed {} {load} {capacity}",
            inst.hospitals[*hospital].name
        ),
    }
}

fn blocking_line(inst: &HrcInstance, b: &BlockingPair) -> String {
    match b {
        BlockingPair::Single { doctor, hospital } => format!(
            "blocking {} {} {}",
            b.label(),
            inst.doctors[*doctor].name,
            inst.hospitals[*hospital].name
        ),
        BlockingPair::Couple { couple, slots, .. } => {
            let [a, b_] = inst.couples[*couple].members;
            format!(
                "blocking {} {} {} {} {}",
                b.label(),
                inst.doctors[a].name,
                inst.doctors[b_].name,
                slot_name(inst, slots.0),
                slot_name(inst, slots.1)
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_validate(file: &Path, report: &mut Report) -> Result<(String, i32), Failure> {
    let inst = load_instance(file, report)?;
    let issues = inst.validate();
    let mut out = String::new();
    for issue in &issues {
        writeln!(out, "violation {issue}").unwrap();
    }
    if issues.is_empty() {
        report.status = "ok";
        Ok((out, EXIT_OK))
    } else {
        report.status = "invalid";
        Ok((out, EXIT_NEGATIVE))
    }
}

fn run_classify(file: &Path, report: &mut Report) -> Result<(String, i32), Failure> {
    let inst = load_valid_instance(file, report)?;
    let mut out = String::new();
    for (ci, couple) in inst.couples.iter().enumerate() {
        let p = classify_couple(&inst, ci);
        let sep = match p.sep_class {
            SepClass::Separable => "separable",
            SepClass::HalfSeparable { .. } => "half-separable",
            SepClass::Connected => "connected",
        };
        let shape = match p.couple_type {
            CoupleType::A => "type-a",
            CoupleType::B => "type-b",
            CoupleType::C => "type-c",
            CoupleType::Other => "untyped",
        };
        writeln!(
            out,
            "couple {} {} : {sep} {shape} {} {}",
            inst.doctors[couple.members[0]].name,
            inst.doctors[couple.members[1]].name,
            if p.sub_responsive { "sub-responsive" } else { "not-sub-responsive" },
            if p.sub_complete { "sub-complete" } else { "not-sub-complete" },
        )
        .unwrap();
    }
    report.status = "ok";
    Ok((out, EXIT_OK))
}

/// Re-check a solver result with the independent checker before printing.
/// `deltas` is the reported per-hospital capacity adjustment, if any.
fn self_check(
    inst: &HrcInstance,
    m: &HrcMatching,
    deltas: Option<&[i32]>,
) -> Result<(), Failure> {
    for (h, hosp) in inst.hospitals.iter().enumerate() {
        let delta = deltas.map_or(0, |d| d[h]);
        if delta.abs() > 1 {
            return Err(broken(format!(
                "capacity of {} adjusted by {delta}, beyond the permitted unit",
                hosp.name
            )));
        }
        let want = i64::from(hosp.capacity) + i64::from(delta);
        if i64::from(m.capacities[h]) != want {
            return Err(broken(format!(
                "capacity of {} is {}, but the reported adjustment implies {want}",
                hosp.name, m.capacities[h]
            )));
        }
    }
    let rep = check_stability(inst, m);
    if let Some(e) = rep.feasibility.first() {
        return Err(broken(format!(
            "solver produced an infeasible matching: {}",
            feasibility_line(inst, e)
        )));
    }
    if let Some(b) = rep.blocking.first() {
        return Err(broken(format!(
            "solver matching admits a blocking pair: {}",
            blocking_line(inst, b)
        )));
    }
    Ok(())
}

fn solve_mode(mode: ModeArg) -> SolveMode {
    match mode {
        ModeArg::Near => SolveMode::NearFeasible,
        ModeArg::Exact => SolveMode::ExactTyped,
        ModeArg::Auto => SolveMode::Auto,
    }
}

fn path_word(path: SolvePath) -> &'static str {
    match path {
        SolvePath::NearFeasible => "near",
        SolvePath::ExactTyped => "exact",
    }
}

/// The reduced fixtures instance for `path`, dumped together with its
/// half-integral solution.
fn dump_reduction(inst: &HrcInstance, path: SolvePath) -> Result<String, Failure> {
    let (sf, _) = match path {
        SolvePath::NearFeasible => reduce_general(inst),
        SolvePath::ExactTyped => reduce_typed(inst),
    }
    .map_err(|e| reduction_failure(&e))?;
    let half = solve_half_integral(&sf);
    Ok(write_sf(&sf, Some(&half)))
}

fn run_solve(
    mode: ModeArg,
    dump_sf: Option<&Path>,
    file: &Path,
    report: &mut Report,
) -> Result<(String, i32), Failure> {
    let inst = load_valid_instance(file, report)?;
    let run = solve(&inst, solve_mode(mode)).map_err(|e| reduction_failure(&e))?;
    report.mode = Some(path_word(run.path));

    if let Some(dump_path) = dump_sf {
        let text = dump_reduction(&inst, run.path)?;
        std::fs::write(dump_path, text)
            .map_err(|e| usage(format!("{}: {e}", dump_path.display())))?;
    }

    match run.result {
        SolveResult::NoStable => {
            report.status = "none";
            Ok((String::from("status none\n"), EXIT_NEGATIVE))
        }
        SolveResult::Stable(m) => {
            self_check(&inst, &m, None)?;
            report.status = "stable";
            Ok((render_solution(&inst, &m), EXIT_OK))
        }
        SolveResult::NearFeasible(outcome) => {
            self_check(&inst, &outcome.matching, Some(&outcome.deltas))?;
            report.status = "stable";
            Ok((render_solution(&inst, &outcome.matching), EXIT_OK))
        }
    }
}

fn run_check(
    instance: &Path,
    matching: &Path,
    report: &mut Report,
) -> Result<(String, i32), Failure> {
    let inst = load_valid_instance(instance, report)?;
    let text = std::fs::read_to_string(matching)
        .map_err(|e| usage(format!("{}: {e}", matching.display())))?;
    let m = parse_matching(&text, &inst)
        .map_err(|e| usage(format!("{}: {e}", matching.display())))?;

    let rep = check_stability(&inst, &m);
    let mut out = String::new();
    for e in &rep.feasibility {
        writeln!(out, "{}", feasibility_line(&inst, e)).unwrap();
    }
    for b in &rep.blocking {
        writeln!(out, "{}", blocking_line(&inst, b)).unwrap();
    }
    if out.is_empty() {
        report.status = "stable";
        Ok((out, EXIT_OK))
    } else {
        report.status = "unstable";
        Ok((out, EXIT_NEGATIVE))
    }
}

fn run_oracle(
    enumerate: bool,
    want_min_bp: bool,
    rural: bool,
    limit: Option<usize>,
    budget_nodes: Option<u64>,
    file: &Path,
    report: &mut Report,
) -> Result<(String, i32), Failure> {
    let inst = load_valid_instance(file, report)?;
    let budget = SearchBudget {
        max_nodes: budget_nodes.unwrap_or_else(|| SearchBudget::default().max_nodes),
        ..SearchBudget::default()
    };
    // With no probe selected, run the whole battery.
    let all = !(enumerate || want_min_bp || rural);

    let mut out = String::new();
    let mut negative = false;

    if enumerate || all {
        let (matchings, _) =
            enumerate_stable(&inst, limit, budget).map_err(|e| usage(e.to_string()))?;
        writeln!(out, "stable-count {}", matchings.len()).unwrap();
        for (i, m) in matchings.iter().enumerate() {
            writeln!(out, "matching {}", i + 1).unwrap();
            push_match_lines(&mut out, &inst, m);
        }
        negative |= matchings.is_empty();
    }
    if want_min_bp || all {
        let (value, witness, _) =
            min_bp(&inst, budget).map_err(|e| usage(e.to_string()))?;
        writeln!(out, "min-bp {value}").unwrap();
        push_match_lines(&mut out, &inst, &witness);
        negative |= value > 0;
    }
    if rural || all {
        let r = verify_rural_hospitals(&inst, budget).map_err(|e| usage(e.to_string()))?;
        let word = |b: bool| if b { "holds" } else { "fails" };
        writeln!(out, "rural matched-singles {}", word(r.i_holds)).unwrap();
        writeln!(out, "rural fill-counts {}", word(r.ii_holds)).unwrap();
        writeln!(out, "rural undersubscribed {}", word(r.iii_holds)).unwrap();
        for detail in &r.details {
            writeln!(out, "rural detail {detail}").unwrap();
        }
        negative |= !r.all_hold();
    }

    if negative {
        report.status = "negative";
        Ok((out, EXIT_NEGATIVE))
    } else {
        report.status = "ok";
        Ok((out, EXIT_OK))
    }
}

fn run_dump_sf(mode: ModeArg, file: &Path, report: &mut Report) -> Result<(String, i32), Failure> {
    let inst = load_valid_instance(file, report)?;
    let path = match mode {
        ModeArg::Near => SolvePath::NearFeasible,
        ModeArg::Exact => SolvePath::ExactTyped,
        ModeArg::Auto => {
            let all_typed = (0..inst.couples.len())
                .all(|c| classify_couple(&inst, c).couple_type != CoupleType::Other);
            if all_typed { SolvePath::ExactTyped } else { SolvePath::NearFeasible }
        }
    };
    report.mode = Some(path_word(path));
    let out = dump_reduction(&inst, path)?;
    report.status = "ok";
    Ok((out, EXIT_OK))
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Finish a generator run: header comments, then the instance text. The
/// digest and counters describe the produced instance.
fn finish_gen(
    header: String,
    notes: &[String],
    inst: &HrcInstance,
    report: &mut Report,
) -> Result<(String, i32), Failure> {
    let mut out = header;
    for note in notes {
        writeln!(out, "# note: {note}").unwrap();
    }
    let body = write_hrc(inst);
    report.digest = Some(fnv1a(body.as_bytes()));
    report.counters = Some(Counters::of(inst));
    report.status = "generated";
    out.push_str(&body);
    Ok((out, EXIT_OK))
}

fn run_gen(which: GenCmd, report: &mut Report) -> Result<(String, i32), Failure> {
    match which {
        GenCmd::Random {
            seed,
            singles,
            couples,
            hospitals,
            cap_min,
            cap_max,
            list_min,
            list_max,
            separable,
            half_separable,
            connected,
            type_a,
            type_b,
            type_c,
            unrestricted,
            dual_market,
        } => {
            let params = GenParams {
                seed,
                singles,
                couples,
                hospitals,
                capacity: (cap_min, cap_max),
                list_len: (list_min, list_max),
                mix: CoupleMix {
                    separable,
                    half_separable,
                    connected,
                    type_a,
                    type_b,
                    type_c,
                    unrestricted,
                },
                dual_market,
            };
            let inst = gen_random(&params).map_err(|e| usage(e.to_string()))?;
            let mut header = String::from("# hrc gen random\n");
            writeln!(header, "# seed {seed}").unwrap();
            writeln!(header, "# singles {singles} couples {couples} hospitals {hospitals}")
                .unwrap();
            writeln!(
                header,
                "# capacity {cap_min}..{cap_max} list-length {list_min}..{list_max}"
            )
            .unwrap();
            writeln!(
                header,
                "# mix separable={separable} half-separable={half_separable} \
                 connected={connected} type-a={type_a} type-b={type_b} type-c={type_c} \
                 unrestricted={unrestricted}"
            )
            .unwrap();
            writeln!(header, "# dual-market {}", if dual_market { "yes" } else { "no" })
                .unwrap();
            finish_gen(header, &[], &inst, report)
        }
        GenCmd::SmtiHrc { file } => {
            let text = read_input(&file, report)?;
            let smti =
                parse_smti(&text).map_err(|e| usage(format!("{}: {e}", file.display())))?;
            let issues = smti.validate();
            if !issues.is_empty() {
                let mut msg = format!("{}: marriage core fails validation", file.display());
                for issue in issues {
                    write!(msg, "\n  {issue}").unwrap();
                }
                return Err(usage(msg));
            }
            let build = gen_from_smti(&smti).map_err(|e| usage(e.to_string()))?;
            let mut header = String::from("# hrc gen smti-hrc\n");
            writeln!(header, "# men {} women {}", smti.men.len(), smti.women.len()).unwrap();
            finish_gen(header, &build.notes, &build.instance, report)
        }
        GenCmd::SatDual { file, enforcers, master_lists } => {
            let text = read_input(&file, report)?;
            let formula =
                parse_cnf(&text).map_err(|e| usage(format!("{}: {e}", file.display())))?;
            let build = gen_dual_market_from_sat(&formula, enforcers, master_lists)
                .map_err(|e| usage(e.to_string()))?;
            let mut header = String::from("# hrc gen sat-dual\n");
            writeln!(
                header,
                "# variables {} clauses {}",
                formula.num_vars,
                formula.clauses.len()
            )
            .unwrap();
            writeln!(header, "# enforcers {}", if enforcers { "yes" } else { "no" }).unwrap();
            if let Some(lists) = &build.master_lists {
                let inst = &build.instance;
                for &(a, b) in &lists.couple_pairs {
                    writeln!(header, "# master-couple {} {}", slot_name(inst, a), slot_name(inst, b))
                        .unwrap();
                }
                for &h in &lists.single_hospitals {
                    writeln!(header, "# master-single {}", inst.hospitals[h].name).unwrap();
                }
                for &d in &lists.hospital_doctors {
                    writeln!(header, "# master-hospital {}", inst.doctors[d].name).unwrap();
                }
            }
            finish_gen(header, &build.notes, &build.instance, report)
        }
        GenCmd::Minbp { file, c_exp, b_override, seed } => {
            let text = read_input(&file, report)?;
            let smti =
                parse_smti(&text).map_err(|e| usage(format!("{}: {e}", file.display())))?;
            let issues = smti.validate();
            if !issues.is_empty() {
                let mut msg = format!("{}: marriage core fails validation", file.display());
                for issue in issues {
                    write!(msg, "\n  {issue}").unwrap();
                }
                return Err(usage(msg));
            }
            let build = gen_minbp_from_smti(&smti, c_exp, b_override, seed)
                .map_err(|e| usage(e.to_string()))?;
            let mut header = String::from("# hrc gen minbp\n");
            writeln!(header, "# c-exp {c_exp} seed {seed}").unwrap();
            writeln!(header, "# replication {}", build.replication).unwrap();
            writeln!(header, "# tie-women {} edges {}", build.tie_women, build.edge_count)
                .unwrap();
            finish_gen(header, &build.notes, &build.instance, report)
        }
    }
}
