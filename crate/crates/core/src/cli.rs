//! Command-line front end: `check`, `simulate`, `oracle` and `export`.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::automaton::extend;
use crate::checker::Monitor;
use crate::dot;
use crate::logic::{Polarity, PropertySet, Verdict3};
use crate::oracle::{oracle_check, oracle_horizon};
use crate::sim::{generate_trace, Profile, SimConfig};
use crate::trace::{parse_trace_line, Quantum, TraceHeader, TraceLine, TraceRecord};
use crate::Error;

/// Exit status for usage and runtime errors; 0-2 are verdict outcomes.
pub const EXIT_ERROR: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "skewmon", version, about = "Timed property monitor for skewed distributed traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stream a trace through the monitor and print a verdict per step.
    Check(CheckArgs),
    /// Generate a synthetic trace.
    Simulate(SimulateArgs),
    /// Decide formulas on a whole trace by brute-force enumeration.
    Oracle(OracleArgs),
    /// Write the lattice or an automaton as Graphviz DOT.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
struct TraceArgs {
    /// Line-delimited JSON trace; `-` reads standard input.
    #[arg(long)]
    trace: PathBuf,
    /// Clock skew bound in raw units; defaults to the trace header's.
    #[arg(long)]
    epsilon: Option<u64>,
    /// Time quantum in raw units; defaults to the trace header's, else 1.
    #[arg(long)]
    unit: Option<u64>,
    /// Comma-separated process names, when the trace has no header.
    #[arg(long, value_delimiter = ',')]
    procs: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct PropArgs {
    /// Property file: formulas and `name := expr` definitions.
    #[arg(long)]
    prop: Option<PathBuf>,
    /// One formula or definition; may be repeated.
    #[arg(long = "prop-inline")]
    prop_inline: Vec<String>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    trace: TraceArgs,
    #[command(flatten)]
    props: PropArgs,
    /// Write one JSON line per closed state.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write lattice and automata DOT files here at end of trace.
    #[arg(long = "export-dot")]
    export_dot: Option<PathBuf>,
    /// Keep reading as the trace file grows.
    #[arg(long)]
    watch: bool,
    /// With --watch, stop after this many milliseconds without new data.
    #[arg(long = "idle-ms")]
    idle_ms: Option<u64>,
    /// Print only the final verdicts.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileArg {
    Generic,
    Gathering,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// TOML file with SimConfig keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    epsilon: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    duration: Option<u64>,
    #[arg(long = "sample-period")]
    sample_period: Option<u64>,
    #[arg(long = "mean-active")]
    mean_active: Option<u64>,
    #[arg(long = "mean-idle")]
    mean_idle: Option<u64>,
    #[arg(long)]
    unit: Option<u64>,
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
    /// Per-process assembly times for the gathering profile.
    #[arg(long, value_delimiter = ',')]
    assembly: Option<Vec<u64>>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    trace: TraceArgs,
    #[command(flatten)]
    props: PropArgs,
    /// Enumeration horizon in raw units; the smallest sound value by default.
    #[arg(long)]
    horizon: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Lattice,
    Ta,
    ExtTop,
    ExtBot,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    trace: TraceArgs,
    #[command(flatten)]
    props: PropArgs,
    #[arg(long, value_enum)]
    what: What,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Maps final verdicts to an exit status: all TRUE 0, any FALSE 1, else 2.
pub fn verdict_exit_code(verdicts: &[Verdict3]) -> u8 {
    if verdicts.contains(&Verdict3::Bot) {
        1
    } else if verdicts.iter().all(|v| *v == Verdict3::Top) {
        0
    } else {
        2
    }
}

fn io_err(path: &Path, e: io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn read_to_string(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn load_props(args: &PropArgs) -> Result<PropertySet, Error> {
    let mut set = match &args.prop {
        Some(p) => PropertySet::parse(&read_to_string(p)?)?,
        None => PropertySet::default(),
    };
    for line in &args.prop_inline {
        set.add_line(line)?;
    }
    Ok(set)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
    }
}

/// Reads trace lines, optionally waiting for more at end of file.
struct LineSource {
    reader: Box<dyn BufRead>,
    /// Lines read ahead while looking for the process list.
    pending: std::collections::VecDeque<String>,
    watch: bool,
    idle: Option<Duration>,
}

impl LineSource {
    fn open(path: &Path, watch: bool, idle: Option<Duration>) -> Result<Self, Error> {
        let reader: Box<dyn BufRead> = if path == Path::new("-") {
            Box::new(BufReader::new(io::stdin()))
        } else {
            Box::new(BufReader::new(File::open(path).map_err(|e| io_err(path, e))?))
        };
        Ok(LineSource { reader, pending: Default::default(), watch, idle })
    }

    fn next_line(&mut self) -> Result<Option<String>, Error> {
        if let Some(l) = self.pending.pop_front() {
            return Ok(Some(l));
        }
        let mut buf = String::new();
        let mut last_data = Instant::now();
        loop {
            let n = self.reader.read_line(&mut buf).map_err(|e| Error::Io(e.to_string()))?;
            // a partial line at end of a growing file is completed on a later read
            if buf.ends_with('\n') || (n == 0 && !self.watch && !buf.is_empty()) {
                return Ok(Some(buf));
            }
            if n > 0 {
                last_data = Instant::now();
                continue;
            }
            if !self.watch || self.idle.is_some_and(|d| last_data.elapsed() >= d) {
                return Ok(if buf.is_empty() { None } else { Some(buf) });
            }
            thread::sleep(Duration::from_millis(50));
        }
    }
}

/// Resolved trace settings plus the source positioned after the header.
struct TraceInput {
    header: TraceHeader,
    epsilon: u64,
    quantum: Quantum,
    source: LineSource,
}

fn open_trace(args: &TraceArgs, watch: bool, idle: Option<Duration>) -> Result<TraceInput, Error> {
    let mut source = LineSource::open(&args.trace, watch, idle)?;
    let mut header = None;
    // the header, if any, is the first non-blank line
    while let Some(line) = source.next_line()? {
        match parse_trace_line(&line)? {
            TraceLine::Blank => continue,
            TraceLine::Header(h) => header = Some(h),
            TraceLine::Record(_) => source.pending.push_back(line),
        }
        break;
    }
    let mut header = header.unwrap_or_default();
    if let Some(p) = &args.procs {
        header.procs = p.clone();
    }
    if header.procs.is_empty() {
        if watch {
            return Err(Error::Usage("--watch needs a trace header or --procs".into()));
        }
        // no declared process list: read ahead and take first appearances
        while let Some(line) = source.next_line()? {
            source.pending.push_back(line);
        }
        for line in &source.pending {
            if let TraceLine::Record(r) = parse_trace_line(line)? {
                if !header.procs.contains(&r.proc) {
                    header.procs.push(r.proc);
                }
            }
        }
        if header.procs.is_empty() {
            return Err(Error::Usage("trace has no records and no process list".into()));
        }
    }
    let epsilon = args
        .epsilon
        .or(header.epsilon)
        .ok_or_else(|| Error::Usage("--epsilon is required when the trace header has none".into()))?;
    let quantum = Quantum::new(args.unit.or(header.unit).unwrap_or(1))?;
    Ok(TraceInput { header, epsilon, quantum, source })
}

fn next_record(source: &mut LineSource) -> Result<Option<TraceRecord>, Error> {
    while let Some(line) = source.next_line()? {
        match parse_trace_line(&line)? {
            TraceLine::Record(r) => return Ok(Some(r)),
            TraceLine::Blank => {}
            TraceLine::Header(_) => return Err(Error::Usage("header must be the first line".into())),
        }
    }
    Ok(None)
}

/// Feeds the whole trace into a monitor without printing.
fn load_monitor(args: &TraceArgs, props: &PropertySet) -> Result<Monitor, Error> {
    let mut input = open_trace(args, false, None)?;
    let mut m = Monitor::new(input.header.procs.clone(), props, input.epsilon, input.quantum)?;
    while let Some(r) = next_record(&mut input.source)? {
        m.ingest(&r)?;
    }
    Ok(m)
}

fn export_all(m: &Monitor, dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let unit = m.quantum().unit();
    let write = |name: &str, text: String| {
        let p = dir.join(name);
        fs::write(&p, text).map_err(|e| io_err(&p, e))
    };
    write("lattice.dot", dot::lattice_dot(m.store(), unit))?;
    if let Some(ta) = m.automaton() {
        write("ta.dot", dot::ta_dot(ta, unit))?;
        for f in m.formulas() {
            for (pol, tag) in [(Polarity::Top, "top"), (Polarity::Bot, "bot")] {
                let eta = extend(ta, pol, ta.gmax())?;
                write(&format!("ext_{tag}_{}.dot", f.id), dot::extended_dot(&eta, &f.source.phi.to_string(), unit))?;
            }
        }
    }
    Ok(())
}

fn run_check(args: CheckArgs) -> Result<u8, Error> {
    let props = load_props(&args.props)?;
    if props.formulas.is_empty() {
        return Err(Error::Usage("no formula given (--prop or --prop-inline)".into()));
    }
    let mut input = open_trace(&args.trace, args.watch, args.idle_ms.map(Duration::from_millis))?;
    let mut m = Monitor::new(input.header.procs.clone(), &props, input.epsilon, input.quantum)?;
    let mut report = match &args.report {
        Some(p) => Some(io::BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?)),
        None => None,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let w = |e: io::Error| Error::Io(e.to_string());
    while let Some(r) = next_record(&mut input.source)? {
        let Some(step) = m.ingest(&r)? else { continue };
        if let Some(rep) = report.as_mut() {
            writeln!(rep, "{}", step.to_json()).map_err(w)?;
        }
        if !args.quiet {
            let verdicts: Vec<String> = step.verdicts.iter().map(|(id, v)| format!("{id}={}", v.symbol())).collect();
            writeln!(out, "step {} {}#{} |Loc|={} {}", step.step, step.proc, step.index, step.locations, verdicts.join(" "))
                .map_err(w)?;
        }
    }
    if let Some(mut rep) = report {
        rep.flush().map_err(w)?;
    }
    if let Some(dir) = &args.export_dot {
        export_all(&m, dir)?;
    }
    for (f, v) in m.formulas().iter().zip(m.verdicts()) {
        writeln!(out, "{} {v}", f.id).map_err(w)?;
    }
    Ok(verdict_exit_code(m.verdicts()))
}

fn run_simulate(args: SimulateArgs) -> Result<u8, Error> {
    let mut cfg = match &args.config {
        Some(p) => SimConfig::from_toml(&read_to_string(p)?)?,
        None => SimConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = args.$field { cfg.$field = v; })* };
    }
    set!(n, epsilon, seed, duration, sample_period, mean_active, mean_idle);
    if let Some(u) = args.unit {
        cfg.quantum = u;
    }
    match (args.profile, args.assembly) {
        (Some(ProfileArg::Generic), _) => cfg.profile = Profile::Generic,
        (_, Some(assembly)) => cfg.profile = Profile::Gathering { assembly },
        (Some(ProfileArg::Gathering), None) if !matches!(cfg.profile, Profile::Gathering { .. }) => {
            return Err(Error::Usage("--profile gathering needs --assembly".into()))
        }
        _ => {}
    }
    let trace = generate_trace(&cfg)?;
    write_output(args.out.as_deref(), &trace.to_jsonl())?;
    Ok(0)
}

fn run_oracle(args: OracleArgs) -> Result<u8, Error> {
    let props = load_props(&args.props)?;
    if props.formulas.is_empty() {
        return Err(Error::Usage("no formula given (--prop or --prop-inline)".into()));
    }
    let m = load_monitor(&args.trace, &props)?;
    let mut verdicts = Vec::new();
    for f in m.formulas() {
        let h = match args.horizon {
            Some(h) => m.quantum().to_ticks(h)?,
            None => oracle_horizon(m.store(), &f.formula),
        };
        let v = oracle_check(m.store(), &f.formula, h)?;
        println!("{} {v}", f.id);
        verdicts.push(v);
    }
    Ok(verdict_exit_code(&verdicts))
}

fn run_export(args: ExportArgs) -> Result<u8, Error> {
    let props = load_props(&args.props)?;
    let m = load_monitor(&args.trace, &props)?;
    let unit = m.quantum().unit();
    let text = match args.what {
        What::Lattice => dot::lattice_dot(m.store(), unit),
        what => {
            let ta = m.automaton().ok_or(crate::automaton::AutomatonError::NotReady)?;
            match what {
                What::Ta => dot::ta_dot(ta, unit),
                _ => {
                    let pol = if what == What::ExtTop { Polarity::Top } else { Polarity::Bot };
                    let phi = m.formulas().first().map_or("phi".to_string(), |f| f.source.phi.to_string());
                    dot::extended_dot(&extend(ta, pol, ta.gmax())?, &phi, unit)
                }
            }
        }
    };
    write_output(args.out.as_deref(), &text)?;
    Ok(0)
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Check(a) => run_check(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Export(a) => run_export(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        use Verdict3::*;
        assert_eq!(verdict_exit_code(&[Top, Top]), 0);
        assert_eq!(verdict_exit_code(&[Top, Bot, Unknown]), 1);
        assert_eq!(verdict_exit_code(&[Top, Unknown]), 2);
    }

    #[test]
    fn parses_subcommands() {
        let cli = Cli::try_parse_from([
            "skewmon", "check", "--trace", "t.jsonl", "--prop-inline", "A<>[0,5] a", "--epsilon", "10",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Check(_)));
        let cli = Cli::try_parse_from(["skewmon", "simulate", "--n", "2", "--assembly", "15000,15500"]).unwrap();
        let Command::Simulate(a) = cli.command else { panic!() };
        assert_eq!(a.assembly, Some(vec![15000, 15500]));
        assert!(Cli::try_parse_from(["skewmon", "export", "--trace", "t", "--what", "bogus"]).is_err());
        assert_eq!(run(["skewmon", "frobnicate"]), EXIT_ERROR);
    }
}
