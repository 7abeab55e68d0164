//! `convk` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid data or configuration.
//! Diagnostics and the resolved configuration go to standard error; data
//! goes to files or standard output.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use clap::{Args, Parser, Subcommand, ValueEnum};
use convk_core::analysis::{complexity_profile, free_distance_with, search_generators, SearchOptions};
use convk_core::bcjr::{bcjr_decode, MapVariant};
use convk_core::channel::{transmit, ChannelConfig, ChannelModel, GeParams, Received};
use convk_core::viterbi::{default_window, viterbi_decode_stream, ViterbiDecoder};
use convk_core::{encode_block, CodeSpec, PunctureScheme, SoftWord, Trellis};

use crate::error::{Error, Result};
use crate::format::{self, Coded, Header, Payload};
use crate::harness::run_sweep;
use crate::plan::{SweepPlan, PRESETS};

#[derive(Parser, Debug)]
#[command(
    name = "convk",
    version,
    about = "Convolutional codes of configurable constraint length: encode, decode, simulate, analyse",
    after_help = "Exit codes: 0 success, 1 usage error, 2 invalid data or configuration."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encode a binary message file, optionally passing it through a channel
    Encode(EncodeArgs),
    /// Decode a coded file produced by `encode`
    Decode(DecodeArgs),
    /// Run a Monte Carlo BER/FER sweep and write CSV
    Sweep(SweepArgs),
    /// Exhaustive search for the best rate-1/2 codes of one constraint length
    Search(SearchArgs),
    /// Report free distance, spectrum and complexity of a code
    Analyze(AnalyzeArgs),
    /// Print the trellis transition table of a code
    TrellisDump(TrellisDumpArgs),
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// Code as K:1/n:g1,g2,... with octal generators, e.g. 7:1/2:171,133
    #[arg(long)]
    pub code: String,
    /// Puncturing pattern, one row per generator, e.g. p=110/101
    #[arg(long)]
    pub puncture: Option<String>,
    /// Do not flush the encoder with K-1 zero tail bits
    #[arg(long)]
    pub unterminated: bool,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Message file, raw bytes read MSB-first [default: standard input]
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Coded output file [default: standard output]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    /// BPSK over additive white Gaussian noise; writes f32 LLRs
    Awgn,
    /// Binary symmetric channel; writes flipped bits
    Bsc,
    /// Gilbert-Elliott two-state burst channel; writes flipped bits
    Ge,
}

#[derive(Args, Debug)]
pub struct ChannelArgs {
    /// Send the coded bits through this channel before writing them
    #[arg(long, value_enum)]
    pub channel: Option<ChannelArg>,
    /// Information-bit Eb/N0 in dB (awgn)
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub ebno_db: f64,
    /// Crossover probability (bsc)
    #[arg(long, default_value_t = 0.05)]
    pub bsc_p: f64,
    /// Good-to-bad transition probability (ge)
    #[arg(long, default_value_t = GeParams::default().p_good_to_bad)]
    pub ge_pgb: f64,
    /// Bad-to-good transition probability (ge)
    #[arg(long, default_value_t = GeParams::default().p_bad_to_good)]
    pub ge_pbg: f64,
    /// Error probability in the good state (ge)
    #[arg(long, default_value_t = GeParams::default().error_good)]
    pub ge_eg: f64,
    /// Error probability in the bad state (ge)
    #[arg(long, default_value_t = GeParams::default().error_bad)]
    pub ge_eb: f64,
    /// Channel noise seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Viterbi on hard decisions (Hamming metric)
    ViterbiHard,
    /// Viterbi on LLRs
    ViterbiSoft,
    /// Log-MAP forward-backward; terminated blocks only
    BcjrLogmap,
    /// Max-log-MAP forward-backward; terminated blocks only
    BcjrMaxlog,
    /// Same as bcjr-logmap
    Bcjr,
    /// Fixed-lag streaming Viterbi on LLRs, see --window
    Stream,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Code as K:1/n:g1,g2,... with octal generators; must match the file header
    #[arg(long)]
    pub code: String,
    /// Decoding algorithm
    #[arg(long, value_enum, default_value_t = Algo::ViterbiSoft)]
    pub algo: Algo,
    /// Traceback window in steps for --algo stream [default: 5K]
    #[arg(long)]
    pub window: Option<usize>,
    /// Puncturing pattern used when encoding, e.g. p=110/101
    #[arg(long)]
    pub puncture: Option<String>,
    /// Coded input file [default: standard input]
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Decoded message file [default: standard output]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Start from a named plan: paper-sweep, burst-demo or k-scaling
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    pub preset: Option<String>,
    /// Plan file of key=value lines (# starts a comment), applied after the preset
    #[arg(long)]
    pub plan: Option<PathBuf>,
    /// Override any plan key, e.g. --set ge_eb=0.4 (repeatable)
    #[arg(long, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Schemes separated by ';', e.g. "7:1/2:171,133+p=110/101;uncoded"
    #[arg(long)]
    pub codes: Option<String>,
    /// Constraint lengths using the default code for each, e.g. 3,5,7
    #[arg(long)]
    pub k: Option<String>,
    /// Decoders separated by ',': viterbi-hard, viterbi-soft, bcjr-logmap, bcjr-maxlog
    #[arg(long)]
    pub decoders: Option<String>,
    /// Channel model: awgn, bsc or ge
    #[arg(long)]
    pub model: Option<String>,
    /// Eb/N0 grid in dB: a list "0,1.5,3" or a range "0:6:1"
    #[arg(long, allow_hyphen_values = true)]
    pub ebno_db: Option<String>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stop a point after this many bit errors (0 runs to --max-bits)
    #[arg(long)]
    pub min_errors: Option<u64>,
    /// Stop a point after this many information bits
    #[arg(long)]
    pub max_bits: Option<u64>,
    /// Information bits per block
    #[arg(long)]
    pub block_len: Option<usize>,
    /// Fill the elapsed_seconds and decoded_bits_per_second columns
    #[arg(long)]
    pub timing: bool,
    /// Give every scheme its own message and noise streams
    #[arg(long)]
    pub unpaired: bool,
    /// Worker threads [default: available cores]
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV output file [default: standard output]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Plot file (series, ebno_db, ber, ci_low, ci_high) [default: <output>.plot.csv when -o is given]
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Constraint length to search (2..9)
    #[arg(long)]
    pub k: u8,
    /// Outputs per input bit (only 2 is searchable)
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Spectrum terms counted beyond the free distance
    #[arg(long, default_value_t = convk_core::analysis::DEFAULT_SPECTRUM_SPAN)]
    pub span: u32,
    /// Keep only the best N rows
    #[arg(long)]
    pub top: Option<usize>,
    /// CSV output file [default: standard output]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Code as K:1/n:g1,g2,... with octal generators
    #[arg(long)]
    pub code: String,
    /// Spectrum terms counted beyond the free distance
    #[arg(long, default_value_t = convk_core::analysis::DEFAULT_SPECTRUM_SPAN)]
    pub span: u32,
    /// Longest detour explored for the spectrum [default: 20K]
    #[arg(long)]
    pub depth_cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct TrellisDumpArgs {
    /// Code as K:1/n:g1,g2,... with octal generators
    #[arg(long)]
    pub code: String,
    /// Output file [default: standard output]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("convk: error: {}", e);
            2
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Sweep(a) => sweep(a),
        Command::Search(a) => search(a),
        Command::Analyze(a) => analyze(a),
        Command::TrellisDump(a) => trellis_dump(a),
    }
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>> {
    match path {
        Some(p) if p != Path::new("-") => Ok(fs::read(p)?),
        _ => {
            let mut buf = Vec::new();
            io::stdin().lock().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => Ok(fs::write(p, bytes)?),
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            Ok(out.flush()?)
        }
    }
}

fn display_path(path: Option<&Path>, fallback: &str) -> String {
    path.map_or_else(|| fallback.to_string(), |p| p.display().to_string())
}

fn parse_code(text: &str) -> Result<CodeSpec> {
    Ok(text.parse()?)
}

fn parse_puncture(text: Option<&str>, code: &CodeSpec) -> Result<Option<PunctureScheme>> {
    let Some(text) = text else { return Ok(None) };
    let p: PunctureScheme = text.parse()?;
    if p.n() != code.n() {
        return Err(Error::Format(format!("{} does not have one row per output of {}", p, code)));
    }
    Ok(Some(p))
}

fn encode(a: EncodeArgs) -> Result<i32> {
    let code = parse_code(&a.code)?;
    let puncture = parse_puncture(a.puncture.as_deref(), &code)?;
    let terminated = !a.unterminated;
    let rate = puncture.as_ref().map_or(code.rate(), |p| p.rate());
    let ch = &a.channel;
    let config = a.channel.channel.map(|model| ChannelConfig {
        model: match model {
            ChannelArg::Awgn => ChannelModel::Awgn,
            ChannelArg::Bsc => ChannelModel::Bsc,
            ChannelArg::Ge => ChannelModel::GilbertElliott,
        },
        ebno_db: ch.ebno_db,
        rate,
        seed: ch.seed,
        stream: 0,
        bsc_p: ch.bsc_p,
        ge: GeParams {
            p_good_to_bad: ch.ge_pgb,
            p_bad_to_good: ch.ge_pbg,
            error_good: ch.ge_eg,
            error_bad: ch.ge_eb,
        },
    });
    eprintln!(
        "convk encode: code={} puncture={} terminated={} channel={} input={} output={}",
        code,
        puncture.as_ref().map_or("none".into(), |p| p.to_string()),
        terminated,
        config.map_or("none".into(), |c| describe_channel(&c)),
        display_path(a.input.as_deref(), "stdin"),
        display_path(a.output.as_deref(), "stdout"),
    );

    let bytes = read_input(a.input.as_deref())?;
    let message = format::unpack_bits(&bytes, bytes.len() * 8)?;
    let coded = encode_block(&code, &message, terminated)?;
    let sent = match &puncture {
        Some(p) => p.puncture(&coded)?,
        None => coded,
    };
    let header = |payload| Header::for_code(&code, terminated, payload, message.len() as u64);
    let file = match config {
        None => format::write_bits(&header(Payload::Bits), &sent),
        Some(config) => match transmit(&sent, &config)? {
            Received::Soft(llrs) => format::write_llrs(&header(Payload::Llrs), &llrs),
            Received::Hard(bits) => format::write_bits(&header(Payload::Bits), &bits),
        },
    };
    write_output(a.output.as_deref(), &file)?;
    Ok(0)
}

fn describe_channel(c: &ChannelConfig) -> String {
    match c.model {
        ChannelModel::Awgn => format!("awgn ebno_db={} rate={} seed={}", c.ebno_db, c.rate, c.seed),
        ChannelModel::Bsc => format!("bsc p={} seed={}", c.bsc_p, c.seed),
        ChannelModel::GilbertElliott => format!(
            "ge pgb={} pbg={} eg={} eb={} seed={}",
            c.ge.p_good_to_bad, c.ge.p_bad_to_good, c.ge.error_good, c.ge.error_bad, c.seed
        ),
    }
}

fn decode(a: DecodeArgs) -> Result<i32> {
    let code = parse_code(&a.code)?;
    let puncture = parse_puncture(a.puncture.as_deref(), &code)?;
    let window = a.window.unwrap_or(default_window(code.constraint_length()));
    eprintln!(
        "convk decode: code={} algo={:?} window={} puncture={} input={} output={}",
        code,
        a.algo,
        window,
        puncture.as_ref().map_or("none".into(), |p| p.to_string()),
        display_path(a.input.as_deref(), "stdin"),
        display_path(a.output.as_deref(), "stdout"),
    );

    let bytes = read_input(a.input.as_deref())?;
    let (header, coded) = format::read_coded(&bytes, |h| {
        let steps = h.steps();
        puncture.as_ref().map_or(steps * usize::from(h.n), |p| p.kept_len(steps))
    })?;
    header.check_code(&code)?;
    if header.message_bits == 0 {
        return Err(Error::Format("empty message".into()));
    }
    let steps = header.steps();
    let terminated = header.terminated;
    let trellis = Trellis::new(&code);

    // soft view of the received word with punctured positions erased
    let soft = |values: Vec<f64>| -> Result<SoftWord> {
        match &puncture {
            Some(p) => Ok(p.depuncture(&values, steps)?),
            None => Ok(SoftWord::new(values)?),
        }
    };
    let signs = |bits: &[u8]| -> Vec<f64> { bits.iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect() };

    let mut decoded = match a.algo {
        Algo::ViterbiHard => {
            let mut dec = ViterbiDecoder::new(&trellis);
            match (&coded, &puncture) {
                (Coded::Bits(bits), None) => dec.decode_hard(bits, terminated)?.decoded,
                (Coded::Bits(bits), Some(_)) => dec.decode_soft(&soft(signs(bits))?, terminated)?.decoded,
                (Coded::Llrs(llrs), _) => {
                    let hard: Vec<f64> = llrs.iter().map(|&l| if l < 0.0 { -1.0 } else { 1.0 }).collect();
                    dec.decode_soft(&soft(hard)?, terminated)?.decoded
                }
            }
        }
        algo => {
            let word = match coded {
                Coded::Bits(bits) => soft(signs(&bits))?,
                Coded::Llrs(llrs) => soft(llrs)?,
            };
            match algo {
                Algo::ViterbiSoft => ViterbiDecoder::new(&trellis).decode_soft(&word, terminated)?.decoded,
                Algo::BcjrLogmap | Algo::Bcjr => {
                    bcjr_decode(&trellis, &word, terminated, MapVariant::LogMap)?.hard_decisions()
                }
                Algo::BcjrMaxlog => {
                    bcjr_decode(&trellis, &word, terminated, MapVariant::MaxLogMap)?.hard_decisions()
                }
                Algo::Stream => viterbi_decode_stream(&trellis, &word, window)?,
                Algo::ViterbiHard => unreachable!("handled above"),
            }
        }
    };
    decoded.truncate(header.message_bits as usize);
    write_output(a.output.as_deref(), &format::pack_bits(&decoded))?;
    Ok(0)
}

static CANCEL: AtomicBool = AtomicBool::new(false);

#[cfg(unix)]
fn install_interrupt_handler() {
    extern "C" fn on_interrupt(_: libc::c_int) {
        CANCEL.store(true, Ordering::SeqCst);
        // a second Ctrl-C kills the process
        unsafe {
            libc::signal(libc::SIGINT, libc::SIG_DFL);
        }
    }
    unsafe {
        libc::signal(libc::SIGINT, on_interrupt as extern "C" fn(libc::c_int) as libc::sighandler_t);
    }
}

#[cfg(not(unix))]
fn install_interrupt_handler() {}

fn sweep(a: SweepArgs) -> Result<i32> {
    let mut plan = SweepPlan::default();
    if let Some(preset) = &a.preset {
        plan = SweepPlan::preset(preset)?;
    }
    if let Some(path) = &a.plan {
        let text = fs::read_to_string(path)?;
        plan.apply_text(&text)
            .map_err(|e| Error::Plan(format!("{}: {}", path.display(), e)))?;
    }
    for kv in &a.set {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Error::Plan(format!("--set expects KEY=VALUE, got '{}'", kv)))?;
        plan.apply(key, value)?;
    }
    let overrides: [(&str, Option<String>); 9] = [
        ("codes", a.codes.clone()),
        ("k", a.k.clone()),
        ("decoders", a.decoders.clone()),
        ("model", a.model.clone()),
        ("ebno_db", a.ebno_db.clone()),
        ("seed", a.seed.map(|v| v.to_string())),
        ("min_errors", a.min_errors.map(|v| v.to_string())),
        ("max_bits", a.max_bits.map(|v| v.to_string())),
        ("block_len", a.block_len.map(|v| v.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(value) = value {
            plan.apply(key, &value)?;
        }
    }
    if a.timing {
        plan.timing = true;
    }
    if a.unpaired {
        plan.paired = false;
    }
    plan.validate()?;
    let workers = a
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let plot = a
        .plot
        .clone()
        .or_else(|| a.output.as_ref().map(|o| o.with_extension("plot.csv")));
    eprintln!(
        "convk sweep: workers={} points={} output={} plot={}",
        workers,
        plan.points().len(),
        display_path(a.output.as_deref(), "stdout"),
        display_path(plot.as_deref(), "none"),
    );
    for line in plan.describe().lines() {
        eprintln!("  {}", line);
    }

    install_interrupt_handler();
    let result = run_sweep(&plan, workers, &CANCEL)?;
    let mut csv = Vec::new();
    result.write_csv(&mut csv)?;
    write_output(a.output.as_deref(), &csv)?;
    if let Some(plot) = &plot {
        result.write_plot(fs::File::create(plot)?)?;
    }
    for e in &result.errors {
        eprintln!("convk: point failed: {}", e);
    }
    if let Some(t) = &result.truncated {
        eprintln!("convk: sweep truncated: {}", t);
    }
    Ok(if result.errors.is_empty() && result.truncated.is_none() { 0 } else { 2 })
}

fn search(a: SearchArgs) -> Result<i32> {
    eprintln!(
        "convk search: k={} n={} span={} top={} output={}",
        a.k,
        a.n,
        a.span,
        a.top.map_or("all".into(), |t| t.to_string()),
        display_path(a.output.as_deref(), "stdout"),
    );
    let table = search_generators(a.k, a.n, SearchOptions { spectrum_span: a.span })?;
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["k", "g1_octal", "g2_octal", "d_free", "spectrum_counts", "catastrophic_excluded_count"])?;
        let rows = table.entries.iter().take(a.top.unwrap_or(usize::MAX));
        for e in rows {
            let g = e.code.generators();
            let spectrum: Vec<String> = e.report.spectrum.iter().map(|c| c.to_string()).collect();
            w.write_record([
                table.k.to_string(),
                g[0].to_string(),
                g[1].to_string(),
                e.report.d_free.to_string(),
                spectrum.join(";"),
                table.catastrophic_excluded.to_string(),
            ])?;
        }
        w.flush()?;
    }
    write_output(a.output.as_deref(), &buf)?;
    Ok(0)
}

fn analyze(a: AnalyzeArgs) -> Result<i32> {
    let code = parse_code(&a.code)?;
    let depth_cap = a.depth_cap.unwrap_or(20 * code.constraint_length() as usize);
    eprintln!("convk analyze: code={} span={} depth_cap={}", code, a.span, depth_cap);
    let profile = complexity_profile(&code);
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        out.push_str(k);
        out.push('=');
        out.push_str(&v);
        out.push('\n');
    };
    line("code", code.to_string());
    line("id", code.id().to_string());
    line("rate", code.rate().to_string());
    line("states", profile.states.to_string());
    line("branches_per_step", profile.branches_per_step.to_string());
    line("survivor_bits_per_step", profile.survivor_bits_per_step.to_string());
    match code.catastrophic_factor() {
        Some(factor) => {
            line("catastrophic", "yes".into());
            line("common_factor", factor.to_string());
            line("d_free", "none".into());
        }
        None => {
            line("catastrophic", "no".into());
            let report = free_distance_with(&Trellis::new(&code), a.span, depth_cap)?;
            let spectrum: Vec<String> = report.spectrum.iter().map(|c| c.to_string()).collect();
            line("d_free", report.d_free.to_string());
            line("spectrum", spectrum.join(";"));
            line("spectrum_truncated", report.truncated.to_string());
            line("search_depth_used", report.search_depth_used.to_string());
        }
    }
    write_output(None, out.as_bytes())?;
    Ok(0)
}

fn trellis_dump(a: TrellisDumpArgs) -> Result<i32> {
    let code = parse_code(&a.code)?;
    eprintln!(
        "convk trellis-dump: code={} output={}",
        code,
        display_path(a.output.as_deref(), "stdout")
    );
    write_output(a.output.as_deref(), Trellis::new(&code).dump().as_bytes())?;
    Ok(0)
}
