//! The `nrconv` command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage or input error,
//! 3 capacity exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cadence::{
    count_3cadences, count_3subcadences_all, count_partial_cadences_all, detect_error_cadences,
    enumerate_3subcadences, enumerate_partial_cadences, required_capacity_error_cadences,
    required_capacity_partial, required_capacity_subcadences, Branch, CadenceHit, CharCounts,
    PartialCadenceCounts, PartialCadenceSpec, SubCadenceCounts, Text,
};
use crate::error::{Error, Result};
use crate::geometry::parse_polygon;
use crate::ntt::{make_plan, NttPlan};
use crate::oracle::{
    conv_polygon_bruteforce, count_3subcadences_bruteforce, count_partial_bruteforce_char,
    error_cadence_witness_bruteforce, schoolbook_conv, validate_hit, HitKind, InstanceGenerator,
    RandomInstanceConfig,
};
use crate::polyconv::{conv_polygon, DiagonalSums};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "nrconv",
    version,
    about = "Non-rectangular convolution and cadence search"
)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the transform length L, prime p and order-L root q for capacity N.
    Prime {
        #[arg(long)]
        n: usize,
    },
    /// Acyclic convolution of two sequence files.
    Conv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        verify: bool,
    },
    /// Diagonal sums over a convex polygon.
    Polyconv(PolyconvArgs),
    /// 3-sub-cadences.
    Subcadences {
        #[arg(value_enum)]
        action: Action,
        #[command(flatten)]
        text: TextArgs,
        /// Restrict to one character.
        #[arg(long = "char")]
        character: Option<String>,
    },
    /// 3-cadences.
    Cadences {
        #[arg(value_enum)]
        action: Action,
        #[command(flatten)]
        text: TextArgs,
    },
    /// (a,b,c)-partial-k-cadences.
    Partial {
        #[arg(value_enum)]
        action: Action,
        #[command(flatten)]
        text: TextArgs,
        /// Offsets `a,b,c` with a < b.
        #[arg(long)]
        offsets: String,
        #[arg(long)]
        k: usize,
    },
    /// k-cadences with at most k-3 errors.
    ErrorCadences {
        #[arg(value_enum)]
        action: DetectAction,
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = AlphabetMode::Raw)]
        alphabet: AlphabetMode,
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Debug, Args)]
pub struct PolyconvArgs {
    #[arg(long, required_unless_present = "random")]
    pub a: Option<PathBuf>,
    #[arg(long, required_unless_present = "random")]
    pub b: Option<PathBuf>,
    #[arg(long, required_unless_present = "random")]
    pub polygon: Option<PathBuf>,
    /// Use a seeded random polygon and sequences instead of files.
    #[arg(long, conflicts_with_all = ["a", "b", "polygon"])]
    pub random: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compare against the brute-force enumeration.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct TextArgs {
    #[arg(long)]
    pub text: PathBuf,
    /// Number of hits to report (default: all).
    #[arg(long)]
    pub o: Option<u64>,
    #[arg(long, value_enum)]
    pub force_branch: Option<ForcedBranch>,
    #[arg(long, value_enum, default_value_t = AlphabetMode::Raw)]
    pub alphabet: AlphabetMode,
    /// Compare counts and hits against the brute-force definitions.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Action {
    Count,
    Find,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectAction {
    Detect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ForcedBranch {
    Rare,
    Fft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlphabetMode {
    /// Characters are raw bytes.
    Raw,
    /// Bytes are renamed to their rank among the distinct bytes.
    Sorted,
}

enum Failure {
    Error(Error),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the command, writing results
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(&config.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Mismatch(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            EXIT_MISMATCH
        }
        Err(Failure::Error(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Capacity(_) => EXIT_CAPACITY,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
}

fn read_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// Whitespace-separated decimal integers.
pub fn parse_sequence(text: &str, name: &str) -> Result<Vec<u64>> {
    text.split_whitespace()
        .enumerate()
        .map(|(t, tok)| {
            tok.parse::<u64>().map_err(|e| {
                Error::Parse(format!("{name}: value {} ({tok:?}): {e}", t + 1))
            })
        })
        .collect()
}

fn read_sequence(path: &Path) -> Result<Vec<u64>> {
    parse_sequence(&read_string(path)?, &path.display().to_string())
}

fn check_reduced(values: &[u64], p: u64, name: &str) -> Result<()> {
    match values.iter().position(|&v| v >= p) {
        Some(t) => Err(Error::invalid(format!(
            "{name}: value {} ({}) is not below the modulus {p}",
            t + 1,
            values[t]
        ))),
        None => Ok(()),
    }
}

fn read_text(path: &Path, mode: AlphabetMode) -> Result<Text> {
    let raw = std::fs::read(path).map_err(|e| io_err(path, e))?;
    let text = Text::from_file_bytes(&raw);
    Ok(match mode {
        AlphabetMode::Raw => text,
        AlphabetMode::Sorted => text.with_sorted_alphabet(),
    })
}

fn show_char(c: u8, mode: AlphabetMode) -> String {
    match mode {
        AlphabetMode::Sorted => c.to_string(),
        AlphabetMode::Raw if c.is_ascii_graphic() => (c as char).to_string(),
        AlphabetMode::Raw => format!("\\x{c:02x}"),
    }
}

fn branch_of(forced: Option<ForcedBranch>) -> Branch {
    match forced {
        None => Branch::Auto,
        Some(ForcedBranch::Rare) => Branch::Rare,
        Some(ForcedBranch::Fft) => Branch::Convolution,
    }
}

fn plan_for(capacity: usize) -> Result<NttPlan> {
    make_plan(capacity.max(1))
}

fn write_sums(out: &mut dyn Write, sums: &DiagonalSums) -> Result<()> {
    for (k, v) in sums.iter() {
        writeln!(out, "{k} {v}").map_err(|e| Error::invalid(e.to_string()))?;
    }
    Ok(())
}

fn line(out: &mut dyn Write, s: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(s)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| Error::invalid(format!("write failed: {e}")))
}

fn execute(cmd: &Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Prime { n } => {
            let plan = make_plan(*n)?;
            line(out, format_args!("{}", plan.transform_len()))?;
            line(out, format_args!("{}", plan.modulus()))?;
            line(out, format_args!("{}", plan.root()))?;
            Ok(())
        }
        Command::Conv { a, b, verify } => {
            let (va, vb) = (read_sequence(a)?, read_sequence(b)?);
            let plan = plan_for(va.len().max(vb.len()))?;
            check_reduced(&va, plan.modulus(), &a.display().to_string())?;
            check_reduced(&vb, plan.modulus(), &b.display().to_string())?;
            let c = plan.conv_acyclic(&va, &vb)?;
            for (k, v) in c.iter().enumerate() {
                line(out, format_args!("{k} {v}"))?;
            }
            if *verify {
                if c != schoolbook_conv(&va, &vb, plan.modulus()) {
                    return Err(Failure::Mismatch("convolution differs from schoolbook".into()));
                }
                line(out, format_args!("VERIFIED"))?;
            }
            Ok(())
        }
        Command::Polyconv(args) => polyconv(args, out),
        Command::Subcadences {
            action,
            text,
            character,
        } => subcadences(*action, text, character.as_deref(), out),
        Command::Cadences { action, text } => {
            partial(*action, text, PartialCadenceSpec::three_cadence(), out)
        }
        Command::Partial {
            action,
            text,
            offsets,
            k,
        } => {
            let spec = parse_offsets(offsets, *k)?;
            partial(*action, text, spec, out)
        }
        Command::ErrorCadences {
            action: DetectAction::Detect,
            text,
            k,
            alphabet,
            verify,
        } => {
            let t = read_text(text, *alphabet)?;
            let plan = plan_for(required_capacity_error_cadences(t.len(), *k)?)?;
            let found = detect_error_cadences(&t, *k, &plan)?;
            match found {
                Some(spec) => line(out, format_args!("true {spec}"))?,
                None => line(out, format_args!("false"))?,
            }
            if *verify {
                let want = error_cadence_witness_bruteforce(&t, *k)?;
                if want != found {
                    return Err(Failure::Mismatch(format!(
                        "detected {found:?}, brute force found {want:?}"
                    )));
                }
                line(out, format_args!("VERIFIED"))?;
            }
            Ok(())
        }
    }
}

/// `"a,b,c"` with cadence length `k`.
pub fn parse_offsets(s: &str, k: usize) -> Result<PartialCadenceSpec> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("--offsets {s:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    match parts[..] {
        [a, b, c] => PartialCadenceSpec::new(a, b, c, k),
        _ => Err(Error::Parse(format!(
            "--offsets {s:?}: expected three comma-separated offsets"
        ))),
    }
}

fn polyconv(args: &PolyconvArgs, out: &mut dyn Write) -> Outcome {
    let (a, b, poly, plan) = if args.random {
        let config = RandomInstanceConfig {
            seed: args.seed,
            ..Default::default()
        };
        let mut gen = InstanceGenerator::new(config)?;
        let poly = gen.next_polygon();
        let plan = plan_for(config.seq_len)?;
        let a = gen.next_sequence(config.seq_len, plan.modulus());
        let b = gen.next_sequence(config.seq_len, plan.modulus());
        (a, b, poly, plan)
    } else {
        let (pa, pb, pp) = (
            args.a.as_deref().expect("required by clap"),
            args.b.as_deref().expect("required by clap"),
            args.polygon.as_deref().expect("required by clap"),
        );
        let a = read_sequence(pa)?;
        let b = read_sequence(pb)?;
        let poly = parse_polygon(&read_string(pp)?)
            .map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{}: {m}", pp.display())),
                other => other,
            })?;
        let plan = plan_for(a.len().max(b.len()))?;
        check_reduced(&a, plan.modulus(), &pa.display().to_string())?;
        check_reduced(&b, plan.modulus(), &pb.display().to_string())?;
        (a, b, poly, plan)
    };
    let sums = conv_polygon(&a, &b, &poly, &plan)?;
    write_sums(out, &sums)?;
    if args.verify {
        let want = conv_polygon_bruteforce(&a, &b, &poly, &plan)?;
        if want != sums {
            return Err(Failure::Mismatch("diagonal sums differ from enumeration".into()));
        }
        line(out, format_args!("VERIFIED"))?;
    }
    Ok(())
}

fn write_counts<C>(
    out: &mut dyn Write,
    counts: &CharCounts<C>,
    total_of: impl Fn(&C) -> u64,
    mode: AlphabetMode,
) -> Result<()> {
    for (c, v) in &counts.per_char {
        line(out, format_args!("{} {}", show_char(*c, mode), total_of(v)))?;
    }
    line(out, format_args!("total {}", counts.total))
}

fn write_hits(out: &mut dyn Write, hits: &[CadenceHit]) -> Result<()> {
    for h in hits {
        line(out, format_args!("{h}"))?;
    }
    Ok(())
}

fn check_hits(text: &Text, kind: HitKind, hits: &[CadenceHit]) -> Outcome {
    let mut seen = hits.to_vec();
    seen.sort();
    seen.dedup();
    if seen.len() != hits.len() {
        return Err(Failure::Mismatch("duplicate hits".into()));
    }
    if let Some(h) = hits.iter().find(|&&h| !validate_hit(text, kind, h)) {
        return Err(Failure::Mismatch(format!("hit {h} fails the definition")));
    }
    Ok(())
}

fn subcadences(action: Action, args: &TextArgs, character: Option<&str>, out: &mut dyn Write) -> Outcome {
    let raw = read_text(&args.text, AlphabetMode::Raw)?;
    let text = match args.alphabet {
        AlphabetMode::Raw => raw.clone(),
        AlphabetMode::Sorted => raw.with_sorted_alphabet(),
    };
    let sigma = match character {
        None => None,
        Some(c) => {
            let &[byte] = c.as_bytes() else {
                return Err(Error::invalid(format!("--char {c:?} must be a single byte")).into());
            };
            Some(byte)
        }
    };
    let plan = plan_for(required_capacity_subcadences(text.len()))?;
    let mut counts = count_3subcadences_all(&text, &plan, branch_of(args.force_branch))?;
    if let Some(byte) = sigma {
        let present = !raw.occurrences(byte).is_empty();
        // Sorted ids follow byte order, so the id of `byte` is its rank.
        let key = match args.alphabet {
            AlphabetMode::Raw => byte,
            AlphabetMode::Sorted => raw.alphabet().take_while(|&x| x < byte).count() as u8,
        };
        counts.per_char.retain(|(c, _)| present && *c == key);
        if !present {
            let empty = SubCadenceCounts {
                s: vec![0; text.len() + 1],
                total: 0,
            };
            counts.per_char.push((key, empty));
        }
        counts.total = counts.per_char.iter().map(|(_, v)| v.total).sum();
    }
    if args.verify {
        for (c, v) in &counts.per_char {
            let want = count_3subcadences_bruteforce(&text, *c)?;
            if want != v.total {
                return Err(Failure::Mismatch(format!(
                    "character {}: counted {}, brute force {want}",
                    show_char(*c, args.alphabet),
                    v.total
                )));
            }
        }
    }
    match action {
        Action::Count => write_counts(out, &counts, |v| v.total, args.alphabet)?,
        Action::Find => {
            let mut left = args.o.unwrap_or(counts.total);
            if left > counts.total {
                return Err(Error::invalid(format!(
                    "--o {left} exceeds the {} existing hits",
                    counts.total
                ))
                .into());
            }
            let mut hits = Vec::new();
            for (c, v) in &counts.per_char {
                let take = left.min(v.total);
                hits.extend(enumerate_3subcadences(&text, *c, v, take)?);
                left -= take;
            }
            if args.verify {
                check_hits(&text, HitKind::SubCadence, &hits)?;
            }
            write_hits(out, &hits)?;
        }
    }
    if args.verify {
        line(out, format_args!("VERIFIED"))?;
    }
    Ok(())
}

fn partial(action: Action, args: &TextArgs, spec: PartialCadenceSpec, out: &mut dyn Write) -> Outcome {
    let text = read_text(&args.text, args.alphabet)?;
    let plan = plan_for(required_capacity_partial(text.len(), &spec))?;
    let branch = branch_of(args.force_branch);
    let counts = if spec == PartialCadenceSpec::three_cadence() {
        count_3cadences(&text, &plan, branch)?
    } else {
        count_partial_cadences_all(&text, &spec, &plan, branch)?
    };
    if args.verify {
        for (c, v) in &counts.per_char {
            let want = count_partial_bruteforce_char(&text, *c, &spec)?;
            if want != v.total {
                return Err(Failure::Mismatch(format!(
                    "character {}: counted {}, brute force {want}",
                    show_char(*c, args.alphabet),
                    v.total
                )));
            }
        }
    }
    match action {
        Action::Count => write_counts(out, &counts, |v| v.total, args.alphabet)?,
        Action::Find => {
            let o = args.o.unwrap_or(counts.total);
            let mut merged = PartialCadenceCounts {
                per_z: vec![0; text.len() + 1],
                total: counts.total,
            };
            for (_, v) in &counts.per_char {
                for (m, x) in merged.per_z.iter_mut().zip(&v.per_z) {
                    *m += x;
                }
            }
            let hits = enumerate_partial_cadences(&text, &spec, &merged, o)?;
            if args.verify {
                let kind = if spec == PartialCadenceSpec::three_cadence() {
                    HitKind::Cadence
                } else {
                    HitKind::Partial(spec)
                };
                check_hits(&text, kind, &hits)?;
            }
            write_hits(out, &hits)?;
        }
    }
    if args.verify {
        line(out, format_args!("VERIFIED"))?;
    }
    Ok(())
}
