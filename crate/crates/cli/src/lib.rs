//! Front end for the `limcov` binary: argument grammar, subcommand runners
//! and report rendering.

pub mod report;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use limcov::fatou::{fatou_specializes_measure, fatou_specializes_sets, run_fatou, Specialization};
use limcov::generate::{
    gen_decoder, gen_omega, gen_partial_function, gen_test_approximation, generate, GenConfig,
};
use limcov::kernel::{format_rational, parse_rational, CylinderSet, Rational, Word};
use limcov::measurecover::{
    frequency_semimeasures, run_measure_cover, run_tree_cover, PartialFunction, RationalGrid,
};
use limcov::opencover::{omega_family, run_cover, run_trim_cover, CoverMode};
use limcov::randlab::{
    bar_deficiency, cover_parameters, deficiency_cover_trace, deficiency_sets, stabilize_test, DecoderTable,
    TestApproximation,
};
use limcov::setcover::run_set_cover;
use limcov::traces::{liminf_measure_value, liminf_open, liminf_sets, FamilyKind, Trace};
use limcov::verify::{self, grid_floor, Verification};

pub use report::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{context}: {message}")]
    Input { context: String, message: String },
}

impl CliError {
    fn input(context: impl Into<String>, message: impl ToString) -> CliError {
        CliError::Input {
            context: context.into(),
            message: message.to_string(),
        }
    }

    fn from_core(context: &str, e: limcov::Error) -> CliError {
        match e {
            limcov::Error::Parse { line, message } => CliError::Parse {
                path: context.to_string(),
                line,
                message,
            },
            limcov::Error::Input(message) => CliError::input(context, message),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a rational p/q"))
}

fn word_arg(s: &str) -> Result<Word, String> {
    s.parse().map_err(|e| format!("`{s}` is not a binary word: {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "limcov", version, about = "Exact covers of limit inferiors, with brute-force verification")]
pub struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cover the liminf of a `sets` family by at most 2^k elements.
    Setcover {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Semimeasure dominating the liminf of a `measure` family.
    Measurecover {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = 4)]
        grid: u32,
    },
    /// Tree semimeasure dominating the liminf of a `tree` family.
    Treecover {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = 4)]
        grid: u32,
    },
    /// Frequency semimeasures of a partial function, then measurecover.
    Freq {
        #[arg(long)]
        func: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 4)]
        grid: u32,
    },
    /// Cover the liminf of an `open` family by a set of small measure.
    Opencover {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
        #[arg(long = "eps-prime", value_parser = rational_arg)]
        eps_prime: Rational,
        #[arg(long, default_value = "trim")]
        mode: CoverMode,
    },
    /// Interval family for an eventually periodic sequence.
    Omegademo {
        /// Comma-separated rationals; may be empty.
        #[arg(long, default_value = "")]
        prefix: String,
        /// Comma-separated rationals, at least one.
        #[arg(long)]
        cycle: String,
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
    },
    /// Cover the liminf of step functions; `sets` and `measure` traces are
    /// embedded into cells and compared with the discrete covers.
    Fatou {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        eps: Option<Rational>,
        #[arg(long = "eps-prime", value_parser = rational_arg)]
        eps_prime: Option<Rational>,
        #[arg(long, default_value_t = 3)]
        grid: u32,
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Embedding depth for `sets`/`measure` traces.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Deficiency sets and tests built from a decoder table.
    #[command(subcommand)]
    Randlab(Randlab),
    /// Print a random input.
    Gen(GenArgs),
    /// Run many generated instances and summarize their verdicts.
    Sweep {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long = "eps-prime", value_parser = rational_arg)]
        eps_prime: Option<Rational>,
        #[arg(long, default_value_t = 3)]
        grid: u32,
        #[arg(long, default_value = "trim")]
        mode: CoverMode,
    },
}

#[derive(Debug, Subcommand)]
pub enum Randlab {
    /// All D_n^c for n up to `len`.
    Deficiency {
        #[arg(long)]
        decoder: PathBuf,
        #[arg(long, default_value_t = 6)]
        len: usize,
    },
    /// The open family U_n^c and its trimmed cover.
    Cover {
        #[arg(long)]
        decoder: PathBuf,
        #[arg(long)]
        c: usize,
        /// Number of explicit members.
        #[arg(long, default_value_t = 6)]
        len: usize,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Deletion pass and coding of a test approximation.
    Stabilize {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        c: usize,
    },
    /// Minimum deficiency over extensions of `x` up to length `len`.
    Bard {
        #[arg(long)]
        decoder: PathBuf,
        #[arg(long, value_parser = word_arg)]
        x: Word,
        #[arg(long)]
        len: usize,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct GenArgs {
    /// sets, open, measure, tree, func, partial, decoder, test or omega.
    #[arg(long)]
    pub kind: String,
    #[arg(long, default_value_t = 6)]
    pub nmax: usize,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub size: usize,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, value_parser = rational_arg, default_value = "1/4")]
    pub eps: Rational,
    #[arg(long, default_value_t = 1)]
    pub c: usize,
}

/// What a run produced: the bytes to write and whether every check passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub passed: bool,
}

impl From<RunReport> for Output {
    fn from(r: RunReport) -> Output {
        Output {
            passed: r.passed(),
            text: r.render(),
        }
    }
}

fn read(path: &Path) -> CliResult<(String, Vec<u8>)> {
    let label = path.display().to_string();
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: label.clone(),
        source,
    })?;
    Ok((label, bytes))
}

fn text<'a>(label: &str, bytes: &'a [u8]) -> CliResult<&'a str> {
    std::str::from_utf8(bytes).map_err(|_| CliError::input(label, "not valid UTF-8"))
}

fn load_trace(path: &Path, kinds: &[FamilyKind]) -> CliResult<(String, Vec<u8>, Trace)> {
    let (label, bytes) = read(path)?;
    let trace = Trace::parse(text(&label, &bytes)?).map_err(|e| CliError::from_core(&label, e))?;
    if !kinds.contains(&trace.kind()) {
        let want: Vec<String> = kinds.iter().map(|k| k.to_string()).collect();
        return Err(CliError::input(
            &label,
            format!("expected a {} family, found {}", want.join(" or "), trace.kind()),
        ));
    }
    Ok((label, bytes, trace))
}

fn grid(g: u32) -> CliResult<RationalGrid> {
    RationalGrid::new(g).map_err(|e| CliError::from_core("--grid", e))
}

fn q(v: &Rational) -> String {
    format_rational(v)
}

fn words(set: &CylinderSet) -> String {
    set.to_string()
}

fn join<I: IntoIterator<Item = T>, T: ToString>(items: I) -> String {
    let parts: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    if parts.is_empty() {
        "-".to_string()
    } else {
        parts.join(" ")
    }
}

pub fn run(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Setcover { trace, k } => setcover(trace, *k).map(Output::from),
        Command::Measurecover { trace, grid } => measurecover(trace, *grid).map(Output::from),
        Command::Treecover { trace, grid } => treecover(trace, *grid).map(Output::from),
        Command::Freq { func, horizon, grid } => freq(func, *horizon, *grid).map(Output::from),
        Command::Opencover {
            trace,
            eps,
            eps_prime,
            mode,
        } => opencover(trace, eps, eps_prime, *mode).map(Output::from),
        Command::Omegademo { prefix, cycle, eps } => omegademo(prefix, cycle, eps).map(Output::from),
        Command::Fatou {
            trace,
            eps,
            eps_prime,
            grid,
            k,
            depth,
        } => fatou(trace, eps.as_ref(), eps_prime.as_ref(), *grid, *k, *depth).map(Output::from),
        Command::Randlab(cmd) => randlab(cmd).map(Output::from),
        Command::Gen(args) => gen(args).map(|text| Output { text, passed: true }),
        Command::Sweep {
            gen,
            count,
            eps_prime,
            grid,
            mode,
        } => sweep(gen, *count, eps_prime.as_ref(), *grid, *mode).map(Output::from),
    }
}

pub fn setcover(path: &Path, k: u32) -> CliResult<RunReport> {
    let (label, bytes, trace) = load_trace(path, &[FamilyKind::Sets])?;
    let f = trace.sets().map_err(|e| CliError::from_core(&label, e))?;
    let res = run_set_cover(&f, k).map_err(|e| CliError::from_core(&label, e))?;
    let mut r = RunReport::new("setcover");
    r.digest("trace", &bytes);
    r.param("k", k);
    r.param("nmax", f.nmax());
    r.line("COVER", join(&res.cover));
    r.line("SIZE", res.cover.len());
    r.line("BOUND", res.bound);
    for op in &res.log {
        r.line("OP", format!("{} {}", op.start, op.element));
    }
    r.line("LIMINF", join(&liminf_sets(&f)));
    r.verify(verify::verify_set_cover(&f, k, &res));
    Ok(r)
}

pub fn measurecover(path: &Path, g: u32) -> CliResult<RunReport> {
    let (label, bytes, trace) = load_trace(path, &[FamilyKind::Measure])?;
    let f = trace.measure().map_err(|e| CliError::from_core(&label, e))?;
    let res = run_measure_cover(&f, grid(g)?).map_err(|e| CliError::from_core(&label, e))?;
    let mut r = RunReport::new("measurecover");
    r.digest("trace", &bytes);
    r.param("grid", g);
    r.param("nmax", f.nmax());
    for u in f.universe() {
        r.line(
            "COVER",
            format!("{u} {} liminf {}", q(&res.table.get(u)), q(&liminf_measure_value(&f, u))),
        );
    }
    r.line("MEASURE", q(&res.table.total()));
    r.line("BOUND", "1/1");
    for op in &res.log {
        r.line("OP", format!("{} {} {}", op.start, op.key, q(&op.value)));
    }
    r.verify(verify::verify_measure_cover(&f, g, &res));
    Ok(r)
}

pub fn treecover(path: &Path, g: u32) -> CliResult<RunReport> {
    let (label, bytes, trace) = load_trace(path, &[FamilyKind::Tree])?;
    let f = trace.tree().map_err(|e| CliError::from_core(&label, e))?;
    let res = run_tree_cover(&f, grid(g)?).map_err(|e| CliError::from_core(&label, e))?;
    let mut r = RunReport::new("treecover");
    r.digest("trace", &bytes);
    r.param("grid", g);
    r.param("nmax", f.nmax());
    for (w, v) in res.table.values() {
        r.line("COVER", format!("{w} {}", q(v)));
    }
    r.line("MEASURE", q(&res.table.root()));
    r.line("BOUND", "1/1");
    for op in &res.log {
        r.line("OP", format!("{} {} {}", op.start, op.key, q(&op.value)));
    }
    r.verify(verify::verify_tree_cover(&f, g, &res));
    Ok(r)
}

pub fn freq(path: &Path, horizon: usize, g: u32) -> CliResult<RunReport> {
    let (label, bytes) = read(path)?;
    let pf = PartialFunction::parse(text(&label, &bytes)?).map_err(|e| CliError::from_core(&label, e))?;
    let family = frequency_semimeasures(&pf, horizon).map_err(|e| CliError::from_core(&label, e))?;
    let f = family.trace.measure().map_err(|e| CliError::from_core(&label, e))?;
    let res = run_measure_cover(&f, grid(g)?).map_err(|e| CliError::from_core(&label, e))?;
    let mut r = RunReport::new("freq");
    r.digest("func", &bytes);
    r.param("horizon", horizon);
    r.param("grid", g);
    let last = family.tables.last().expect("horizon is positive");
    for (x, v) in last.values() {
        r.line("FREQ", format!("{x} {}", q(v)));
    }
    for u in f.universe() {
        r.line("COVER", format!("{u} {}", q(&res.table.get(u))));
    }
    r.line("MEASURE", q(&res.table.total()));
    r.line("BOUND", "1/1");
    r.verify(verify::verify_frequency(&pf, horizon, g, &family, &res));
    r.verify(verify::verify_measure_cover(&f, g, &res));
    Ok(r)
}

pub fn opencover(path: &Path, eps: &Rational, eps_prime: &Rational, mode: CoverMode) -> CliResult<RunReport> {
    let (label, bytes, trace) = load_trace(path, &[FamilyKind::Open])?;
    let f = trace.open().map_err(|e| CliError::from_core(&label, e))?;
    let res = run_cover(&f, eps, eps_prime, mode).map_err(|e| CliError::from_core(&label, e))?;
    let mut r = RunReport::new("opencover");
    r.digest("trace", &bytes);
    r.param("mode", mode);
    r.param("eps", q(eps));
    r.param("eps-prime", q(eps_prime));
    r.param("nmax", f.nmax());
    r.line("COVER", words(&res.cover));
    r.line("MEASURE", q(&res.cover.measure()));
    r.line("BOUND", q(eps_prime));
    r.line("THRESHOLD", q(&res.threshold));
    r.line("ATTEMPTS", res.attempts);
    for p in &res.pieces {
        r.line(
            "PIECE",
            format!("{} {} {} trims {} set {}", p.attempt, p.start, p.word, p.trims, words(&p.set)),
        );
    }
    r.line("LIMINF", words(&liminf_open(&f)));
    r.verify(verify::verify_open_cover(&f, eps, eps_prime, &res));
    Ok(r)
}

fn rational_list(flag: &str, s: &str) -> CliResult<Vec<Rational>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| rational_arg(p).map_err(|m| CliError::input(flag, m)))
        .collect()
}

pub fn omegademo(prefix: &str, cycle: &str, eps: &Rational) -> CliResult<RunReport> {
    let prefix_v = rational_list("--prefix", prefix)?;
    let cycle_v = rational_list("--cycle", cycle)?;
    let fam = omega_family(&prefix_v, &cycle_v, eps).map_err(|e| CliError::from_core("omegademo", e))?;
    let mut r = RunReport::new("omegademo");
    let canonical = format!(
        "prefix={} cycle={} eps={}",
        prefix_v.iter().map(q).collect::<Vec<_>>().join(","),
        cycle_v.iter().map(q).collect::<Vec<_>>().join(","),
        q(eps)
    );
    r.digest("params", canonical.as_bytes());
    r.param("prefix", if prefix.is_empty() { "-" } else { prefix });
    r.param("cycle", cycle);
    r.param("eps", q(eps));
    for (i, u) in fam.intervals.iter().enumerate() {
        r.line("INTERVAL", format!("{i} {u} measure {}", q(&u.measure())));
    }
    r.line("WMIN", q(&fam.w_min));
    for c in &fam.checks {
        r.line("IDENTITY", format!("{} {} {}", c.position, c.name, if c.holds { "holds" } else { "fails" }));
    }
    r.verify(verify::verify_omega(&prefix_v, &cycle_v, eps, &fam));
    Ok(r)
}

fn embedding_depth(elements: usize) -> usize {
    let mut d = 1;
    while (1usize << d) < elements {
        d += 1;
    }
    d
}

pub fn fatou(
    path: &Path,
    eps: Option<&Rational>,
    eps_prime: Option<&Rational>,
    g: u32,
    k: u32,
    depth: Option<usize>,
) -> CliResult<RunReport> {
    let (label, bytes, trace) = load_trace(path, &[FamilyKind::Func, FamilyKind::Sets, FamilyKind::Measure])?;
    let core = |e| CliError::from_core(&label, e);
    let mut r = RunReport::new("fatou");
    r.digest("trace", &bytes);
    r.param("grid", g);
    match trace.kind() {
        FamilyKind::Func => {
            let (Some(eps), Some(eps_prime)) = (eps, eps_prime) else {
                return Err(CliError::input("fatou", "func traces need --eps and --eps-prime"));
            };
            let f = trace.func().map_err(core)?;
            let res = run_fatou(&f, eps, eps_prime, grid(g)?).map_err(core)?;
            r.param("eps", q(eps));
            r.param("eps-prime", q(eps_prime));
            let d = res.phi.depth();
            for (c, v) in res.phi.cells().iter().enumerate() {
                if *v > Rational::from_integer(0.into()) {
                    r.line("PHI", format!("{} {}", Word::cell(c as u64, d), q(v)));
                }
            }
            r.line("MEASURE", q(&res.phi.integral()));
            r.line("BOUND", q(eps_prime));
            r.line("THRESHOLD", q(&res.threshold));
            r.line("ATTEMPTS", res.attempts);
            for t in &res.trim_log {
                r.line(
                    "TRIM",
                    format!("{} {} {} {} trims {}", t.attempt, t.start, t.cell, q(&t.value), t.trims),
                );
            }
            r.verify(verify::verify_fatou(&f, eps, eps_prime, g, &res));
        }
        FamilyKind::Sets => {
            let f = trace.sets().map_err(core)?;
            let d = depth.unwrap_or_else(|| embedding_depth(f.universe().len()));
            let sp = fatou_specializes_sets(&f, k, d, grid(g)?).map_err(core)?;
            let limit = liminf_sets(&f);
            r.param("k", k);
            specialization_report(&mut r, &sp, g, |u| {
                if limit.contains(u) {
                    Rational::from_integer(1.into())
                } else {
                    Rational::from_integer(0.into())
                }
            });
        }
        _ => {
            let f = trace.measure().map_err(core)?;
            let d = depth.unwrap_or_else(|| embedding_depth(f.universe().len()));
            let sp = fatou_specializes_measure(&f, d, grid(g)?).map_err(core)?;
            specialization_report(&mut r, &sp, g, |u| liminf_measure_value(&f, u));
        }
    }
    Ok(r)
}

fn specialization_report(r: &mut RunReport, sp: &Specialization, g: u32, limit: impl Fn(&str) -> Rational) {
    r.param("depth", sp.depth);
    r.param("eps", q(&sp.eps));
    r.param("eps-prime", q(&sp.eps_prime));
    for row in &sp.rows {
        r.line(
            "ELEMENT",
            format!("{} {} floor {} phi {} cover {}", row.element, row.cell, q(&row.bound), q(&row.phi), q(&row.other)),
        );
    }
    r.line("MEASURE", q(&sp.phi_integral));
    r.line("BOUND", q(&sp.eps_prime));
    let mut v = Verification::new();
    v.check(
        "integral",
        sp.phi_integral <= sp.eps_prime,
        format!("{} <= {}", q(&sp.phi_integral), q(&sp.eps_prime)),
    );
    for row in &sp.rows {
        let need = grid_floor(&limit(&row.element), g);
        v.check(
            format!("element-{}", row.element),
            row.phi >= need && row.other >= need,
            format!("phi {} cover {} floor {}", q(&row.phi), q(&row.other), q(&need)),
        );
    }
    r.verify(v);
}

fn load_decoder(path: &Path) -> CliResult<(String, Vec<u8>, DecoderTable)> {
    let (label, bytes) = read(path)?;
    let dec = DecoderTable::parse(text(&label, &bytes)?).map_err(|e| CliError::from_core(&label, e))?;
    Ok((label, bytes, dec))
}

/// Longest level `deficiency` enumerates exhaustively.
pub const MAX_ENUMERATED_LEN: usize = 16;

pub fn randlab(cmd: &Randlab) -> CliResult<RunReport> {
    match cmd {
        Randlab::Deficiency { decoder, len } => {
            if *len > MAX_ENUMERATED_LEN {
                return Err(CliError::input("--len", format!("at most {MAX_ENUMERATED_LEN}")));
            }
            let (_, bytes, dec) = load_decoder(decoder)?;
            let mut r = RunReport::new("randlab deficiency");
            r.digest("decoder", &bytes);
            r.param("len", len);
            let sets: Vec<Vec<BTreeSet<Word>>> = (0..=*len)
                .map(|n| (0..=n).map(|c| deficiency_sets(&dec, n, c)).collect())
                .collect();
            for (n, row) in sets.iter().enumerate() {
                for (c, set) in row.iter().enumerate() {
                    r.line("D", format!("{n} {c} {}", join(set)));
                }
            }
            r.verify(verify::verify_deficiency_sets(&dec, &sets));
            Ok(r)
        }
        Randlab::Cover { decoder, c, len, depth } => {
            let (label, bytes, dec) = load_decoder(decoder)?;
            let core = |e| CliError::from_core(&label, e);
            let depth = depth.unwrap_or(*len);
            let trace = deficiency_cover_trace(&dec, *c, *len, depth).map_err(core)?;
            let f = trace.open().map_err(core)?;
            let (eps, eps_prime) = cover_parameters(*c).map_err(|e| CliError::from_core("--c", e))?;
            let res = run_trim_cover(&f, &eps, &eps_prime).map_err(core)?;
            let mut r = RunReport::new("randlab cover");
            r.digest("decoder", &bytes);
            r.param("c", c);
            r.param("nmax", len);
            r.param("depth", depth);
            for (n, u) in f.members().iter().enumerate() {
                r.line("MEMBER", format!("{n} {} measure {}", words(u), q(&u.measure())));
            }
            r.line("COVER", words(&res.cover));
            r.line("MEASURE", q(&res.cover.measure()));
            r.line("BOUND", q(&eps_prime));
            r.verify(verify::verify_deficiency_family(&f, *c));
            r.verify(verify::verify_open_cover(&f, &eps, &eps_prime, &res));
            Ok(r)
        }
        Randlab::Stabilize { table, c } => {
            let (label, bytes) = read(table)?;
            let t = TestApproximation::parse(text(&label, &bytes)?).map_err(|e| CliError::from_core(&label, e))?;
            let res = stabilize_test(&t, *c).map_err(|e| CliError::from_core(&label, e))?;
            let mut r = RunReport::new("randlab stabilize");
            r.digest("table", &bytes);
            r.param("c", c);
            for level in &res.levels {
                let show = |v: &[(usize, Word)]| join(v.iter().map(|(i, w)| format!("{i}:{w}")));
                r.line(
                    "LEVEL",
                    format!("{} kept {} deleted {}", level.n, show(&level.kept), show(&level.deleted)),
                );
                for (u, code) in &level.codes {
                    r.line("CODE", format!("{} {u} {code}", level.n));
                }
            }
            r.verify(verify::verify_stabilized(&t, *c, &res));
            Ok(r)
        }
        Randlab::Bard { decoder, x, len } => {
            let (label, bytes, dec) = load_decoder(decoder)?;
            let res = bar_deficiency(&dec, *x, *len).map_err(|e| CliError::from_core(&label, e))?;
            let mut r = RunReport::new("randlab bard");
            r.digest("decoder", &bytes);
            r.param("x", x);
            r.param("len", len);
            match (res.value, res.witness) {
                (Some(d), Some(y)) => {
                    r.line("BARD", d);
                    r.line("EXTENSION", y);
                }
                _ => r.line("BARD", "none (no described extension)"),
            }
            r.line("BOUND", res.bound);
            r.verify(verify::verify_bar_deficiency(&dec, *x, &res));
            Ok(r)
        }
    }
}

fn gen_config(args: &GenArgs, kind: FamilyKind) -> GenConfig {
    let mut cfg = GenConfig::new(kind, args.nmax, if kind.has_depth() { Some(args.depth.unwrap_or(4)) } else { None });
    cfg.size = args.size;
    cfg.k = args.k;
    cfg.eps = args.eps.clone();
    cfg
}

pub fn gen(args: &GenArgs) -> CliResult<String> {
    let bad = |e| CliError::from_core("gen", e);
    let out = match args.kind.as_str() {
        "partial" => gen_partial_function(args.seed, args.nmax, args.size).render(),
        "decoder" => gen_decoder(args.seed, args.size, args.depth.unwrap_or(8), args.nmax).render(),
        "test" => gen_test_approximation(args.seed, args.nmax, args.c).render(),
        "omega" => {
            let o = gen_omega(args.seed);
            let list = |v: &[Rational]| v.iter().map(q).collect::<Vec<_>>().join(",");
            format!("prefix {}\ncycle {}\neps {}\n", list(&o.prefix), list(&o.cycle), q(&o.eps))
        }
        other => {
            let kind: FamilyKind = other.parse().map_err(|m: String| CliError::input("--kind", m))?;
            generate(&gen_config(args, kind), args.seed).map_err(bad)?.render()
        }
    };
    Ok(out)
}

/// One generated instance of a sweep: its construction and verification.
fn sweep_one(
    args: &GenArgs,
    seed: u64,
    eps_prime: &Rational,
    g: u32,
    mode: CoverMode,
) -> Result<Verification, limcov::Error> {
    let grid = RationalGrid::new(g)?;
    match args.kind.as_str() {
        "partial" => {
            let pf = gen_partial_function(seed, args.nmax, args.size);
            let fam = frequency_semimeasures(&pf, args.nmax)?;
            let res = run_measure_cover(&fam.trace.measure()?, grid)?;
            Ok(verify::verify_frequency(&pf, args.nmax, g, &fam, &res))
        }
        "decoder" => {
            let dec = gen_decoder(seed, args.size, args.depth.unwrap_or(8), args.nmax);
            let c = args.c.max(1);
            let f = deficiency_cover_trace(&dec, c, args.nmax, args.nmax)?.open()?;
            let (eps, eps_prime) = cover_parameters(c)?;
            let res = run_trim_cover(&f, &eps, &eps_prime)?;
            let mut v = verify::verify_deficiency_family(&f, c);
            v.extend(verify::verify_open_cover(&f, &eps, &eps_prime, &res));
            Ok(v)
        }
        "omega" => {
            let o = gen_omega(seed);
            let fam = omega_family(&o.prefix, &o.cycle, &o.eps)?;
            Ok(verify::verify_omega(&o.prefix, &o.cycle, &o.eps, &fam))
        }
        other => {
            let kind: FamilyKind = other.parse().map_err(limcov::Error::Input)?;
            let trace = generate(&gen_config(args, kind), seed)?;
            match kind {
                FamilyKind::Sets => {
                    let f = trace.sets()?;
                    Ok(verify::verify_set_cover(&f, args.k, &run_set_cover(&f, args.k)?))
                }
                FamilyKind::Measure => {
                    let f = trace.measure()?;
                    Ok(verify::verify_measure_cover(&f, g, &run_measure_cover(&f, grid)?))
                }
                FamilyKind::Tree => {
                    let f = trace.tree()?;
                    Ok(verify::verify_tree_cover(&f, g, &run_tree_cover(&f, grid)?))
                }
                FamilyKind::Open => {
                    let f = trace.open()?;
                    let res = run_cover(&f, &args.eps, eps_prime, mode)?;
                    Ok(verify::verify_open_cover(&f, &args.eps, eps_prime, &res))
                }
                FamilyKind::Func => {
                    let f = trace.func()?;
                    let res = run_fatou(&f, &args.eps, eps_prime, grid)?;
                    Ok(verify::verify_fatou(&f, &args.eps, eps_prime, g, &res))
                }
            }
        }
    }
}

pub fn sweep(
    args: &GenArgs,
    count: u64,
    eps_prime: Option<&Rational>,
    g: u32,
    mode: CoverMode,
) -> CliResult<RunReport> {
    let eps_prime = eps_prime
        .cloned()
        .unwrap_or_else(|| &args.eps + Rational::new(1.into(), 8.into()));
    let seeds: Vec<u64> = (args.seed..args.seed.saturating_add(count)).collect();
    let outcomes: Vec<(u64, Result<Verification, limcov::Error>)> = seeds
        .par_iter()
        .map(|&s| (s, sweep_one(args, s, &eps_prime, g, mode)))
        .collect();

    let mut r = RunReport::new("sweep");
    r.param("kind", &args.kind);
    r.param("seed", args.seed);
    r.param("count", count);
    r.param("nmax", args.nmax);
    if let Some(d) = args.depth {
        r.param("depth", d);
    }
    r.param("size", args.size);
    r.param("k", args.k);
    r.param("eps", q(&args.eps));
    r.param("eps-prime", q(&eps_prime));
    r.param("grid", g);
    r.param("mode", mode);
    let mut passed = 0;
    for (seed, outcome) in &outcomes {
        match outcome {
            Ok(v) if v.passed() => {
                passed += 1;
                r.line("SEED", format!("{seed} PASS"));
            }
            Ok(v) => r.line(
                "SEED",
                format!("{seed} FAIL {}", v.failures().map(|c| c.name.as_str()).collect::<Vec<_>>().join(",")),
            ),
            Err(e) => return Err(CliError::input(format!("seed {seed}"), e)),
        }
    }
    let mut v = Verification::new();
    v.check("all-seeds", passed == outcomes.len(), format!("{passed}/{} passed", outcomes.len()));
    r.verify(v);
    Ok(r)
}
