//! The `neatgames` command-line tool.
//!
//! [`run`] parses arguments, runs one subcommand and returns the process exit
//! code: 0 on success, 1 when `--expect` names a verdict that did not come
//! out, 2 on usage or input errors, 3 when a solver gives up.

pub mod interchange;

use clap::{Args, Parser, Subcommand, ValueEnum};
use interchange::{
    export_explicit, export_network, export_ra, export_strategy, import_network, export_structure, import_graph, import_ra, import_strategy,
    import_structure, parse, parse_rounds, to_bytes, winner_name, ImportError,
};
use neatgames_core::bases::{find_basis, find_hyperbasis, HyperbasisOutcome};
use neatgames_core::budget::Budget;
use neatgames_core::fullset::build_full_set_structure;
use neatgames_core::games::{solve_game, verify_strategy, GameSpec, Rounds, SolveError, Variant, Winner};
use neatgames_core::network::is_valid_network;
use neatgames_core::graph::{chromatic_number, ef_pebble_game, SimpleGraph};
use neatgames_core::ra::{basic_matrices, validate_ra_frame, BlurParams, RaAtomStructure};
use neatgames_core::split::{split_reds, theta_check};
use neatgames_core::term::{assignment_from_names, check_inequality, eval_term, parse_term, CheckMode, CheckScope};
use neatgames_core::{validate_ca_frame, CaAtomStructure, ExplicitCa, RainbowFrame, RainbowSignature, StructureError};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "neatgames", version, about = "Atom structures, network games and basis search")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Write the produced document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Exit with status 1 unless the verdict is this one.
    #[arg(long, global = true, value_enum)]
    pub expect: Option<Verdict>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker budget handed to the solvers.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rainbow frame with greens 1..=g and reds 0..r-1.
    Rainbow {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        greens: usize,
        #[arg(long)]
        reds: usize,
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Order-restricted rainbow frame on integer intervals.
    RainbowZnn {
        #[arg(long)]
        n: usize,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        a_range: Vec<i64>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        b_range: Vec<i64>,
    },
    /// Splits every red of a rainbow frame into copies.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        copies: usize,
    },
    /// Checks the copy map from a rainbow frame into its split.
    ThetaCheck {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        split: PathBuf,
    },
    /// Monk relation-algebra atom structure over a graph.
    Monk {
        /// A graph file or a builtin name (edge, two-triangles, petersen, k<n>, c<n>, e<n>).
        #[arg(long)]
        graph: String,
        #[arg(long)]
        colours: usize,
    },
    /// Basic matrices of a relation-algebra atom structure as a CA_m frame.
    Matrices {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Blur relation-algebra atom structure.
    Blur {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        i_size: usize,
        #[arg(long)]
        copies: usize,
        #[arg(long)]
        include_p_outside: bool,
    },
    /// Atom structure of the full set algebra on ^n base.
    Fullset {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        base: usize,
    },
    /// Exact chromatic number of a graph.
    Chromatic {
        #[arg(long)]
        graph: String,
    },
    /// Solves a network game.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        variant: GameVariant,
        #[arg(long)]
        m: usize,
        #[arg(long, value_parser = parse_rounds)]
        rounds: Rounds,
        /// Skip re-checking the certificate.
        #[arg(long)]
        no_verify: bool,
    },
    /// Checks a strategy certificate against a structure.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Searches for an m-dimensional basis.
    Basis {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Searches for an m-dimensional hyperbasis with a bounded label alphabet.
    Hyperbasis {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        lambda_max: usize,
    },
    /// Decides m-square representability of the complex algebra.
    Square {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Evaluates a term in the complex algebra.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        term: String,
        /// Variable assignment `x=atom;atom;...`, repeatable.
        #[arg(long)]
        assign: Vec<String>,
    },
    /// Checks lhs ≤ rhs in the complex algebra.
    CheckLeq {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(long, value_enum, default_value_t = LeqMode::AtomsOnly)]
        mode: LeqMode,
        /// Assignments drawn in sampled mode.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Forth-only pebble game between two graphs.
    Ef {
        #[arg(long)]
        g1: String,
        #[arg(long)]
        g2: String,
        #[arg(long)]
        pebbles: usize,
        #[arg(long)]
        rounds: u32,
    },
    /// Rewrites a document in canonical form.
    Export {
        #[arg(long = "in")]
        input: PathBuf,
        /// Structure that network and strategy documents refer to.
        #[arg(long)]
        structure: Option<PathBuf>,
        /// List every relation of a rainbow frame instead of its signature.
        #[arg(long)]
        explicit: bool,
    },
    /// Reads and validates a document.
    Import {
        #[arg(long = "in")]
        input: PathBuf,
        /// Structure that network and strategy documents refer to.
        #[arg(long)]
        structure: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameVariant {
    #[value(name = "G", alias = "g")]
    G,
    #[value(name = "F", alias = "f")]
    F,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeqMode {
    AtomsOnly,
    Exhaustive,
    Sampled,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    NoAtBound,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::NoAtBound => "no-at-bound",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Import { path: PathBuf, source: ImportError },
    #[error("{0}")]
    Structure(#[from] StructureError),
    #[error("solver failed: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// What a subcommand produced.
pub struct Report {
    pub command: &'static str,
    pub verdict: Verdict,
    pub lines: Vec<String>,
    pub details: Value,
    pub document: Option<Value>,
    /// The document is the main output and goes to stdout when `--out` is absent.
    pub document_is_output: bool,
}

impl Report {
    fn new(command: &'static str, verdict: Verdict) -> Self {
        Report {
            command,
            verdict,
            lines: Vec::new(),
            details: json!({}),
            document: None,
            document_is_output: false,
        }
    }

    fn line(mut self, s: impl Into<String>) -> Self {
        self.lines.push(s.into());
        self
    }

    fn details(mut self, v: Value) -> Self {
        self.details = v;
        self
    }

    fn output(mut self, doc: Value) -> Self {
        self.document = Some(doc);
        self.document_is_output = true;
        self
    }

    fn attach(mut self, doc: Value) -> Self {
        self.document = Some(doc);
        self
    }

    pub fn to_document(&self, elapsed_ms: u128) -> Value {
        json!({
            "kind": "report",
            "version": interchange::VERSION,
            "command": self.command,
            "verdict": self.verdict.to_string(),
            "details": self.details,
            "text": self.lines,
            "wall_ms": elapsed_ms,
        })
    }
}

/// Runs one command line; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let start = Instant::now();
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let elapsed = start.elapsed().as_millis();
    match emit(&cli.global, &report, elapsed, out) {
        Err(CliError::Write { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => {}
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
        Ok(()) => {}
    }
    if report.verdict == Verdict::Inconclusive {
        return 3;
    }
    match cli.global.expect {
        Some(want) if want != report.verdict => {
            let _ = writeln!(err, "expected verdict {want}, got {}", report.verdict);
            1
        }
        _ => 0,
    }
}

fn emit(g: &GlobalArgs, r: &Report, elapsed: u128, out: &mut dyn Write) -> Result<(), CliError> {
    let stdout_err = |source| CliError::Write {
        path: PathBuf::from("<stdout>"),
        source,
    };
    if let (Some(doc), Some(path)) = (&r.document, &g.out) {
        std::fs::write(path, to_bytes(doc)).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
    }
    if r.document_is_output && g.out.is_none() {
        out.write_all(&to_bytes(r.document.as_ref().unwrap())).map_err(stdout_err)?;
        return Ok(());
    }
    for l in &r.lines {
        writeln!(out, "{l}").map_err(stdout_err)?;
    }
    writeln!(out, "verdict: {}", r.verdict).map_err(stdout_err)?;
    writeln!(out, "--- report").map_err(stdout_err)?;
    out.write_all(&to_bytes(&r.to_document(elapsed))).map_err(stdout_err)?;
    Ok(())
}

fn read_doc(path: &Path) -> Result<Value, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&bytes).map_err(|source| CliError::Import {
        path: path.to_path_buf(),
        source,
    })
}

fn import_err(path: &Path) -> impl FnOnce(ImportError) -> CliError + '_ {
    move |source| CliError::Import {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads a ca-structure; explicit frames must pass the validator.
pub fn load_structure(path: &Path) -> Result<CaAtomStructure, CliError> {
    let s = import_structure(&read_doc(path)?).map_err(import_err(path))?;
    if let CaAtomStructure::Explicit(_) = s {
        let rep = validate_ca_frame(&s);
        if !rep.is_valid() {
            return Err(CliError::Import {
                path: path.to_path_buf(),
                source: ImportError::Schema {
                    place: "structure".into(),
                    message: format!("fails validation: {rep}"),
                },
            });
        }
    }
    Ok(s)
}

fn load_rainbow(path: &Path) -> Result<Arc<RainbowFrame>, CliError> {
    match load_structure(path)? {
        CaAtomStructure::Rainbow(r) => Ok(r),
        CaAtomStructure::Explicit(_) => Err(CliError::Usage(format!("{} is not a rainbow frame", path.display()))),
    }
}

fn load_explicit(path: &Path) -> Result<ExplicitCa, CliError> {
    Ok(load_structure(path)?.to_explicit()?)
}

/// A builtin graph name, or a file holding `{vertices, edges}`.
pub fn load_graph(spec: &str) -> Result<SimpleGraph, CliError> {
    let p = Path::new(spec);
    if p.is_file() {
        return import_graph(&read_doc(p)?).map_err(import_err(p));
    }
    SimpleGraph::builtin(spec).ok_or_else(|| CliError::Usage(format!("{spec:?} is neither a graph file nor a builtin graph")))
}

fn inconclusive(command: &'static str, why: impl Into<String>) -> Report {
    let why = why.into();
    Report::new(command, Verdict::Inconclusive)
        .line(format!("inconclusive: {why}"))
        .details(json!({ "reason": why }))
}

fn solver_result<T>(command: &'static str, r: Result<T, SolveError>) -> Result<Result<T, Report>, CliError> {
    match r {
        Ok(x) => Ok(Ok(x)),
        Err(SolveError::Inconclusive(why)) => Ok(Err(inconclusive(command, why))),
        Err(SolveError::InvalidSpec(why)) => Err(CliError::Usage(why)),
    }
}

fn yes_no(b: bool) -> Verdict {
    if b {
        Verdict::Yes
    } else {
        Verdict::No
    }
}

fn structure_made(command: &'static str, s: &CaAtomStructure) -> Report {
    Report::new(command, Verdict::Yes)
        .line(format!("{} atoms, hash {}", s.atom_count(), s.fingerprint()))
        .details(json!({ "atoms": s.atom_count(), "structure_hash": s.fingerprint() }))
        .output(export_structure(s))
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Rainbow { n, greens, reds, copies } => {
            let r = RainbowFrame::new(RainbowSignature::pea(*n, *greens, *reds).with_copies(*copies))?;
            Ok(structure_made("rainbow", &CaAtomStructure::from(r)))
        }
        Command::RainbowZnn { n, a_range, b_range } => {
            let r = RainbowFrame::new(RainbowSignature::order_restricted(
                *n, a_range[0], a_range[1], b_range[0], b_range[1],
            ))?;
            Ok(structure_made("rainbow-znn", &CaAtomStructure::from(r)))
        }
        Command::Split { input, copies } => {
            let base = load_rainbow(input)?;
            let s = split_reds(&base, *copies)?;
            Ok(structure_made("split", &CaAtomStructure::from(s)))
        }
        Command::ThetaCheck { base, split } => {
            let (b, s) = (load_rainbow(base)?, load_rainbow(split)?);
            let rep = theta_check(&b, &s)?;
            let mut r = Report::new("theta-check", yes_no(rep.holds()))
                .line(format!(
                    "{} base atoms, {} split atoms, {} faces checked",
                    rep.base_atoms, rep.split_atoms, rep.faces_checked
                ))
                .line(format!(
                    "injective: {}, partition: {}, lifting: {}",
                    rep.injective, rep.partition, rep.lifting
                ))
                .details(json!({
                    "injective": rep.injective,
                    "partition": rep.partition,
                    "lifting": rep.lifting,
                    "base_atoms": rep.base_atoms,
                    "split_atoms": rep.split_atoms,
                    "faces_checked": rep.faces_checked,
                    "problems": rep.problems,
                }));
            for p in &rep.problems {
                r = r.line(format!("problem: {p}"));
            }
            Ok(r)
        }
        Command::Monk { graph, colours } => {
            let g = load_graph(graph)?;
            let ra = RaAtomStructure::monk(&g, *colours);
            Ok(ra_made("monk", &ra))
        }
        Command::Blur {
            l,
            i_size,
            copies,
            include_p_outside,
        } => {
            let p = BlurParams {
                l: *l,
                i_size: *i_size,
                rows: *copies,
            };
            let ra = RaAtomStructure::blur(&p, *include_p_outside)?;
            Ok(ra_made("blur", &ra))
        }
        Command::Matrices { input, m } => {
            let ra = import_ra(&read_doc(input)?).map_err(import_err(input))?;
            let bm = basic_matrices(&ra, *m)?;
            let mut r = Report::new("matrices", yes_no(bm.cylindric_basis))
                .line(format!("{} basic {m}x{m} matrices", bm.matrices.len()))
                .line(format!("cylindric basis: {}", bm.cylindric_basis))
                .details(json!({
                    "matrices": bm.matrices.len(),
                    "cylindric_basis": bm.cylindric_basis,
                    "violations": bm.report.to_string(),
                }))
                .attach(export_explicit(&bm.frame));
            if !bm.cylindric_basis {
                r = r.line(format!("violations: {}", bm.report));
            }
            Ok(r)
        }
        Command::Fullset { n, base } => {
            let e = build_full_set_structure(*n, *base)?;
            Ok(structure_made("fullset", &CaAtomStructure::from(e)))
        }
        Command::Chromatic { graph } => {
            let g = load_graph(graph)?;
            let chi = match solver_result("chromatic", chromatic_number(&g, &Budget::from_env()))? {
                Ok(c) => c,
                Err(r) => return Ok(r),
            };
            Ok(Report::new("chromatic", Verdict::Yes)
                .line(format!("chromatic number {chi} ({} vertices, {} edges)", g.len(), g.edges().len()))
                .details(json!({ "chromatic_number": chi, "vertices": g.len() })))
        }
        Command::Solve {
            input,
            variant,
            m,
            rounds,
            no_verify,
        } => {
            let s = load_structure(input)?;
            let v = match variant {
                GameVariant::G => Variant::G,
                GameVariant::F => Variant::F,
            };
            let spec = GameSpec::new(v, *m, *rounds, s).map_err(|e| CliError::Usage(e.to_string()))?;
            let o = match solver_result("solve", solve_game(&spec))? {
                Ok(o) => o,
                Err(r) => return Ok(r),
            };
            let verified = if *no_verify {
                None
            } else {
                Some(verify_strategy(&spec, &o.certificate))
            };
            if let Some(Err(why)) = &verified {
                return Err(CliError::Solver(format!("certificate failed verification: {why}")));
            }
            let who = match o.winner {
                Winner::Exists => "∃",
                Winner::Forall => "∀",
            };
            Ok(Report::new("solve", yes_no(o.winner == Winner::Exists))
                .line(format!("{who} wins {v:?}^{m} with {rounds} rounds"))
                .line(format!(
                    "certificate: {} entries, {}",
                    o.certificate.len(),
                    if verified.is_some() { "verified" } else { "not verified" }
                ))
                .line(format!("method: {}, positions: {}", o.stats.method, o.stats.positions))
                .details(json!({
                    "winner": winner_name(o.winner),
                    "certificate_entries": o.certificate.len(),
                    "verified": verified.is_some(),
                    "method": o.stats.method,
                    "positions": o.stats.positions,
                }))
                .attach(export_strategy(&spec, &o.certificate)))
        }
        Command::Verify { input, strategy } => {
            let s = load_structure(input)?;
            let (spec, cert) = import_strategy(&s, &read_doc(strategy)?).map_err(import_err(strategy))?;
            let res = verify_strategy(&spec, &cert);
            let mut r = Report::new("verify", yes_no(res.is_ok())).details(json!({
                "winner": winner_name(cert.winner()),
                "entries": cert.len(),
                "error": res.as_ref().err(),
            }));
            r = match &res {
                Ok(()) => r.line(format!("certificate for {} verified", winner_name(cert.winner()))),
                Err(e) => r.line(format!("certificate rejected: {e}")),
            };
            Ok(r)
        }
        Command::Basis { input, m } => {
            let s = load_structure(input)?;
            let b = match solver_result("basis", find_basis(&s, *m))? {
                Ok(b) => b,
                Err(r) => return Ok(r),
            };
            Ok(match b {
                Some(b) => Report::new("basis", Verdict::Yes)
                    .line(format!("{m}-dimensional basis with {} networks", b.len()))
                    .details(json!({ "m": m, "networks": b.len() })),
                None => Report::new("basis", Verdict::No)
                    .line(format!("no {m}-dimensional basis"))
                    .details(json!({ "m": m })),
            })
        }
        Command::Hyperbasis { input, m, lambda_max } => {
            let s = load_structure(input)?;
            let h = match solver_result("hyperbasis", find_hyperbasis(&s, *m, *lambda_max))? {
                Ok(h) => h,
                Err(r) => return Ok(r),
            };
            Ok(match h {
                HyperbasisOutcome::Found(hb) => Report::new("hyperbasis", Verdict::Yes)
                    .line(format!(
                        "{m}-dimensional hyperbasis with {} hypernetworks over {} label(s)",
                        hb.members.len(),
                        hb.alphabet
                    ))
                    .details(json!({ "m": m, "hypernetworks": hb.members.len(), "alphabet": hb.alphabet })),
                HyperbasisOutcome::NoneAtBound { lambda_max, reason } => Report::new("hyperbasis", Verdict::NoAtBound)
                    .line(format!("no {m}-dimensional hyperbasis with at most {lambda_max} label(s): {reason}"))
                    .details(json!({ "m": m, "lambda_max": lambda_max, "reason": reason })),
            })
        }
        Command::Square { input, m } => {
            let s = load_structure(input)?;
            let b = match solver_result("square", find_basis(&s, *m))? {
                Ok(b) => b,
                Err(r) => return Ok(r),
            };
            let yes = b.is_some();
            Ok(Report::new("square", yes_no(yes))
                .line(if yes {
                    format!("the complex algebra is {m}-square representable")
                } else {
                    format!("the complex algebra is not {m}-square representable")
                })
                .details(json!({ "m": m, "m_square": yes })))
        }
        Command::Eval { input, term, assign } => {
            let e = load_explicit(input)?;
            let t = parse_term(term).map_err(|e| CliError::Usage(format!("term: {e}")))?;
            let mut vars = BTreeMap::new();
            for a in assign {
                let (v, atoms) = a
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("assignment {a:?} is not of the form x=atom;atom")))?;
                let names: Vec<String> = atoms
                    .split(';')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(String::from)
                    .collect();
                vars.insert(v.trim().to_string(), names);
            }
            let env = assignment_from_names(&e, &vars).map_err(CliError::Usage)?;
            let val = eval_term(&e, &t, &env).map_err(|x| CliError::Usage(format!("evaluation: {x}")))?;
            let names: Vec<&str> = val.iter().map(|a| e.name(a)).collect();
            Ok(Report::new("eval", Verdict::Yes)
                .line(format!("{t} = {{{}}}", names.join(", ")))
                .line(format!("{} atoms", names.len()))
                .details(json!({ "term": t.to_string(), "atoms": names, "size": names.len() })))
        }
        Command::CheckLeq {
            input,
            lhs,
            rhs,
            mode,
            samples,
        } => {
            let e = load_explicit(input)?;
            let l = parse_term(lhs).map_err(|e| CliError::Usage(format!("lhs: {e}")))?;
            let r = parse_term(rhs).map_err(|e| CliError::Usage(format!("rhs: {e}")))?;
            let mode = match mode {
                LeqMode::AtomsOnly => CheckMode::AtomsOnly,
                LeqMode::Exhaustive => CheckMode::Exhaustive,
                LeqMode::Sampled => CheckMode::Sampled {
                    samples: *samples,
                    seed: cli.global.seed,
                },
            };
            let rep = check_inequality(&e, &l, &r, mode).map_err(|x| CliError::Usage(format!("check: {x}")))?;
            let scope = match rep.scope {
                CheckScope::AllAssignments => "all assignments".to_string(),
                CheckScope::AtomAssignments => "atom-valued assignments".to_string(),
                CheckScope::SampledAssignments { samples } => format!("{samples} sampled assignments"),
            };
            let cex: Option<BTreeMap<String, Vec<String>>> = rep.counterexample.as_ref().map(|c| {
                c.iter()
                    .map(|(v, ids)| (v.clone(), ids.iter().map(|&a| e.name(a).to_string()).collect()))
                    .collect()
            });
            let mut out = Report::new("check-leq", yes_no(rep.holds))
                .line(format!(
                    "{l} ≤ {r} {} over {scope} ({} checked)",
                    if rep.holds { "holds" } else { "fails" },
                    rep.checked
                ))
                .details(json!({ "holds": rep.holds, "scope": scope, "checked": rep.checked, "counterexample": cex }));
            if let Some(c) = &cex {
                out = out.line(format!("counterexample: {c:?}"));
            }
            Ok(out)
        }
        Command::Ef {
            g1,
            g2,
            pebbles,
            rounds,
        } => {
            let (a, b) = (load_graph(g1)?, load_graph(g2)?);
            let w = ef_pebble_game(&a, &b, *pebbles, *rounds);
            Ok(Report::new("ef", yes_no(w == Winner::Exists))
                .line(format!(
                    "{} wins the {pebbles}-pebble {rounds}-round game",
                    match w {
                        Winner::Exists => "∃",
                        Winner::Forall => "∀",
                    }
                ))
                .details(json!({ "winner": winner_name(w), "pebbles": pebbles, "rounds": rounds })))
        }
        Command::Export {
            input,
            structure,
            explicit,
        } => {
            let v = read_doc(input)?;
            let kind = interchange::kind_of(&v).map_err(import_err(input))?.to_string();
            let doc = match kind.as_str() {
                "ca-structure" => {
                    let s = import_structure(&v).map_err(import_err(input))?;
                    if *explicit {
                        export_explicit(&s.to_explicit()?)
                    } else {
                        export_structure(&s)
                    }
                }
                "ra-structure" => export_ra(&import_ra(&v).map_err(import_err(input))?),
                "network" => {
                    let s = load_structure(needs_structure(structure, &kind)?)?;
                    export_network(&s, &import_network(&s, &v).map_err(import_err(input))?)
                }
                "strategy" => {
                    let s = load_structure(needs_structure(structure, &kind)?)?;
                    let (spec, cert) = import_strategy(&s, &v).map_err(import_err(input))?;
                    export_strategy(&spec, &cert)
                }
                other => return Err(CliError::Usage(format!("cannot export a {other:?} document"))),
            };
            Ok(Report::new("export", Verdict::Yes).output(doc))
        }
        Command::Import { input, structure } => {
            let v = read_doc(input)?;
            let kind = interchange::kind_of(&v).map_err(import_err(input))?.to_string();
            match kind.as_str() {
                "ca-structure" => {
                    let s = import_structure(&v).map_err(import_err(input))?;
                    let rep = validate_ca_frame(&s);
                    Ok(Report::new("import", yes_no(rep.is_valid()))
                        .line(format!("ca-structure, dimension {}, {} atoms", s.dim(), s.atom_count()))
                        .line(format!("validation: {rep}"))
                        .details(json!({
                            "kind": kind,
                            "atoms": s.atom_count(),
                            "structure_hash": s.fingerprint(),
                            "valid": rep.is_valid(),
                        })))
                }
                "ra-structure" => {
                    let ra = import_ra(&v).map_err(import_err(input))?;
                    let rep = validate_ra_frame(&ra);
                    Ok(Report::new("import", yes_no(rep.is_valid()))
                        .line(format!("ra-structure, {} atoms", ra.len()))
                        .line(format!("validation: {rep}"))
                        .details(json!({ "kind": kind, "atoms": ra.len(), "valid": rep.is_valid() })))
                }
                "network" => {
                    let s = load_structure(needs_structure(structure, &kind)?)?;
                    let n = import_network(&s, &v).map_err(import_err(input))?;
                    let ok = is_valid_network(&s, &n);
                    Ok(Report::new("import", yes_no(ok))
                        .line(format!(
                            "network on {} nodes, {}",
                            n.size(),
                            if ok { "valid" } else { "not a valid network" }
                        ))
                        .details(json!({ "kind": kind, "nodes": n.size(), "valid": ok })))
                }
                "strategy" => {
                    let s = load_structure(needs_structure(structure, &kind)?)?;
                    let (spec, cert) = import_strategy(&s, &v).map_err(import_err(input))?;
                    Ok(Report::new("import", Verdict::Yes)
                        .line(format!(
                            "strategy for {}, {} entries, spec {:?}^{} with {} rounds",
                            winner_name(cert.winner()),
                            cert.len(),
                            spec.variant,
                            spec.pebbles,
                            spec.rounds
                        ))
                        .details(json!({ "kind": kind, "winner": winner_name(cert.winner()), "entries": cert.len() })))
                }
                other => Err(CliError::Usage(format!("cannot import a {other:?} document"))),
            }
        }
    }
}

fn needs_structure<'a>(structure: &'a Option<PathBuf>, kind: &str) -> Result<&'a Path, CliError> {
    structure
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("a {kind} document needs --structure")))
}

fn ra_made(command: &'static str, ra: &RaAtomStructure) -> Report {
    let rep = validate_ra_frame(ra);
    Report::new(command, yes_no(rep.is_valid()))
        .line(format!("{} atoms", ra.len()))
        .line(format!("validation: {rep}"))
        .details(json!({ "atoms": ra.len(), "valid": rep.is_valid() }))
        .output(export_ra(ra))
}
