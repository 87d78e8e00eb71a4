//! Analysis reports and the `detect`, `witness` and `rewrite` commands.
//!
//! Commands take program text and return what should be printed together
//! with the process exit code, so they can be tested without spawning a
//! process.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use serde::Serialize;

use crate::chain::{verify_prefix, ChainWitness, SizeGuard};
use crate::engine::{step_traced, Mode};
use crate::recurrence::{detect, RecurrentPair, TKind};
use crate::syntax::{parse_program, ProgramFile};
use crate::term::{FreshSupply, Program};

pub const DEFAULT_STEPS: usize = 8;

/// Exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// At least one verified certificate (or a successful rewrite).
    Found = 0,
    /// Nothing found.
    NotFound = 1,
    /// Bad input.
    InputError = 2,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub stderr: String,
    pub exit: Exit,
}

impl CommandOutput {
    fn input_error(msg: impl Into<String>) -> Self {
        CommandOutput {
            stdout: String::new(),
            stderr: msg.into(),
            exit: Exit::InputError,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeSelection {
    Trs,
    Lp,
    #[default]
    Both,
}

impl ModeSelection {
    pub fn modes(self) -> Vec<Mode> {
        match self {
            ModeSelection::Trs => vec![Mode::Trs],
            ModeSelection::Lp => vec![Mode::Lp],
            ModeSelection::Both => Mode::ALL.to_vec(),
        }
    }
}

impl FromStr for ModeSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "both" => Ok(ModeSelection::Both),
            other => match other.parse::<Mode>() {
                Ok(Mode::Trs) => Ok(ModeSelection::Trs),
                Ok(Mode::Lp) => Ok(ModeSelection::Lp),
                Err(_) => Err(format!("unknown mode `{s}` (expected trs, lp or both)")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub modes: ModeSelection,
    /// Length of the witness prefix to replay.
    pub steps: usize,
    pub guard: SizeGuard,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            modes: ModeSelection::Both,
            steps: DEFAULT_STEPS,
            guard: SizeGuard::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub modes: Vec<Mode>,
    pub steps: usize,
    pub max_term_size: usize,
    pub certificates: Vec<CertificateReport>,
    pub timing_ms: f64,
}

impl Report {
    pub fn any_verified(&self) -> bool {
        self.certificates.iter().any(CertificateReport::verified)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub r1_index: usize,
    pub r2_index: usize,
    pub r1: String,
    pub r2: String,
    pub f: String,
    pub c: String,
    pub s: String,
    pub t: TKind,
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub verified_trs: Option<bool>,
    pub verified_lp: Option<bool>,
    /// First witness index not replayed because of the size guard.
    pub truncated_at: Option<usize>,
    pub notes: Vec<String>,
    pub witness: Vec<WitnessReport>,
}

impl CertificateReport {
    /// Every requested mode replayed all attempted segments.
    pub fn verified(&self) -> bool {
        let checks = [self.verified_trs, self.verified_lp];
        checks.iter().any(Option::is_some) && checks.iter().all(|v| v.unwrap_or(true))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub n: usize,
    pub pi: serde_json::Number,
    pub pi_prime: serde_json::Number,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term: Option<String>,
}

fn big_number(v: &BigUint) -> serde_json::Number {
    v.to_string()
        .parse()
        .expect("decimal integers are JSON numbers")
}

/// Detects recurrent pairs and replays a witness prefix for each in every
/// requested mode.
pub fn analyze(program: &Program, opts: &AnalysisOptions) -> Report {
    let started = Instant::now();
    let certificates = detect(program)
        .iter()
        .map(|p| certificate_report(p, opts))
        .collect();
    Report {
        modes: opts.modes.modes(),
        steps: opts.steps,
        max_term_size: opts.guard.max_term_size,
        certificates,
        timing_ms: started.elapsed().as_secs_f64() * 1000.0,
    }
}

pub fn certificate_report(pair: &RecurrentPair, opts: &AnalysisOptions) -> CertificateReport {
    let mut report = CertificateReport {
        r1_index: pair.r1_index,
        r2_index: pair.r2_index,
        r1: pair.r1.to_string(),
        r2: pair.r2.to_string(),
        f: pair.f.to_string(),
        c: pair.c.to_string(),
        s: pair.s.to_string(),
        t: pair.t_kind,
        n1: pair.n1,
        n2: pair.n2,
        n3: pair.n3,
        verified_trs: None,
        verified_lp: None,
        truncated_at: None,
        notes: Vec::new(),
        witness: Vec::new(),
    };
    if pair.is_degenerate() {
        report
            .notes
            .push("n1 = 0: r1 removes c without moving it".to_owned());
    }
    for mode in opts.modes.modes() {
        // Each mode gets its own supply so runs are independent of order.
        let mut supply = FreshSupply::new();
        let witness: ChainWitness<BigUint> =
            match verify_prefix(pair, opts.steps, mode, opts.guard, &mut supply) {
                Ok(w) => w,
                Err(e) => {
                    report.notes.push(format!("{mode}: {e}"));
                    set_verified(&mut report, mode, false);
                    continue;
                }
            };
        set_verified(&mut report, mode, witness.verified());
        if let Some(failure) = &witness.failure {
            report.notes.push(format!("{mode}: {failure}"));
        }
        if let Some(cut) = witness.truncated_at {
            report.truncated_at = Some(cut);
            report.notes.push(format!(
                "{mode}: partial verification, segments up to a{cut} replayed; a{} exceeds {} nodes",
                cut + 1,
                opts.guard.max_term_size
            ));
        }
        if report.witness.is_empty() {
            report.witness = witness
                .entries
                .iter()
                .map(|e| WitnessReport {
                    n: e.n,
                    pi: big_number(&e.pi),
                    pi_prime: big_number(&e.pi_prime),
                    term: e.term.as_ref().map(ToString::to_string),
                })
                .collect();
        }
    }
    report
}

fn set_verified(report: &mut CertificateReport, mode: Mode, ok: bool) {
    match mode {
        Mode::Trs => report.verified_trs = Some(ok),
        Mode::Lp => report.verified_lp = Some(ok),
    }
}

fn verdict(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "yes",
        Some(false) => "NO",
        None => "not run",
    }
}

/// Human-readable rendering of a report.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    if report.certificates.is_empty() {
        out.push_str("no recurrent pair found\n");
        return out;
    }
    for (k, c) in report.certificates.iter().enumerate() {
        let _ = writeln!(
            out,
            "certificate {k}: rules ({}, {}), f = {}, c = {}, s = {}, t = {}, (n1, n2, n3) = ({}, {}, {})",
            c.r1_index, c.r2_index, c.f, c.c, c.s, c.t, c.n1, c.n2, c.n3
        );
        let _ = writeln!(out, "  r1: {}", c.r1);
        let _ = writeln!(out, "  r2: {}", c.r2);
        let _ = writeln!(
            out,
            "  verified ({} segments): trs {}, lp {}",
            report.steps,
            verdict(c.verified_trs),
            verdict(c.verified_lp)
        );
        for w in &c.witness {
            match &w.term {
                Some(t) => {
                    let t = abbreviate(t);
                    let _ = writeln!(out, "  a{} = {t}  (heights {}, {})", w.n, w.pi, w.pi_prime);
                }
                None => {
                    let _ = writeln!(
                        out,
                        "  a{} has heights {}, {} (not materialized)",
                        w.n, w.pi, w.pi_prime
                    );
                }
            }
        }
        for note in &c.notes {
            let _ = writeln!(out, "  note: {note}");
        }
    }
    out
}

const TEXT_TERM_WIDTH: usize = 160;

fn abbreviate(t: &str) -> String {
    let len = t.chars().count();
    if len <= TEXT_TERM_WIDTH {
        return t.to_owned();
    }
    let head: String = t.chars().take(TEXT_TERM_WIDTH).collect();
    format!("{head}... ({len} characters, see --json)")
}

fn load(text: &str) -> Result<ProgramFile, CommandOutput> {
    parse_program(text).map_err(|e| CommandOutput::input_error(format!("error: {e}\n")))
}

fn finish(report: &Report, json: bool) -> CommandOutput {
    let stdout = if json {
        report.to_json() + "\n"
    } else {
        render_text(report)
    };
    let exit = if report.any_verified() {
        Exit::Found
    } else {
        Exit::NotFound
    };
    CommandOutput {
        stdout,
        stderr: String::new(),
        exit,
    }
}

/// `detect FILE`.
pub fn cmd_detect(text: &str, opts: &AnalysisOptions, json: bool) -> CommandOutput {
    match load(text) {
        Ok(file) => finish(&analyze(&file.program(), opts), json),
        Err(out) => out,
    }
}

/// `witness FILE --pair I,J`: the certificates for one ordered rule pair.
pub fn cmd_witness(
    text: &str,
    pair: (usize, usize),
    opts: &AnalysisOptions,
    json: bool,
) -> CommandOutput {
    let file = match load(text) {
        Ok(file) => file,
        Err(out) => return out,
    };
    let n = file.rules.len();
    if pair.0 >= n || pair.1 >= n {
        return CommandOutput::input_error(format!(
            "error: rule pair {},{} out of range (program has {n} rules, indices start at 0)\n",
            pair.0, pair.1
        ));
    }
    let started = Instant::now();
    let certificates = detect(&file.program())
        .iter()
        .filter(|p| (p.r1_index, p.r2_index) == pair)
        .map(|p| certificate_report(p, opts))
        .collect();
    let report = Report {
        modes: opts.modes.modes(),
        steps: opts.steps,
        max_term_size: opts.guard.max_term_size,
        certificates,
        timing_ms: started.elapsed().as_secs_f64() * 1000.0,
    };
    finish(&report, json)
}

/// `rewrite FILE --term T`: root steps from `T`, using rule `rule` only or
/// else the first applicable rule in program order.
pub fn cmd_rewrite(
    text: &str,
    term: &str,
    rule: Option<usize>,
    steps: usize,
    mode: Option<Mode>,
) -> CommandOutput {
    let file = match load(text) {
        Ok(file) => file,
        Err(out) => return out,
    };
    let mode = mode.or(file.mode_hint).unwrap_or(Mode::Trs);
    if let Some(k) = rule {
        if k >= file.rules.len() {
            return CommandOutput::input_error(format!(
                "error: rule {k} out of range (program has {} rules, indices start at 0)\n",
                file.rules.len()
            ));
        }
    }
    let mut current = match file.parse_term(term) {
        Ok(t) => t,
        Err(e) => return CommandOutput::input_error(format!("error in --term: {e}\n")),
    };
    let program = file.program();
    let mut supply = FreshSupply::new();
    let mut out = format!("0: {current}\n");
    let mut taken = 0;
    for i in 1..=steps {
        let trace = program
            .iter()
            .enumerate()
            .filter(|(k, _)| rule.is_none_or(|r| r == *k))
            .find_map(|(k, r)| step_traced(mode, k, r, &current, &mut supply));
        match trace {
            Some(trace) => {
                let _ = writeln!(
                    out,
                    "{i}: {}  (rule {}, {mode}, {})",
                    trace.result, trace.rule, trace.substitution
                );
                current = trace.result;
                taken += 1;
            }
            None => {
                out.push_str("no rule applies\n");
                break;
            }
        }
    }
    let exit = if taken > 0 || steps == 0 {
        Exit::Found
    } else {
        Exit::NotFound
    };
    CommandOutput {
        stdout: out,
        stderr: String::new(),
        exit,
    }
}
