use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ringfourier::arith::prime_power;
use ringfourier::budget::{parse_amount, Budget};
use ringfourier::dual::{Dual, Frequency};
use ringfourier::fourier::{salem_lower_bound, variety_spectrum, Method, SalemReport};
use ringfourier::poly::NcPolynomial;
use ringfourier::structure::{all_ideals, ideal_lattice, jacobson_radical, lattice_info, Side};
use ringfourier::variety::{variety_points, VarietySpec};
use ringfourier::verify::{run_suite, suite_names, Context, Status};
use ringfourier::{Error, Ring};

#[derive(Parser)]
#[command(name = "ringfourier", version, about = "Fourier spectra of polynomial graphs over finite rings")]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Work budget, e.g. 1e9. Defaults to RINGFOURIER_BUDGET or 1e8.
    #[arg(long, global = true)]
    budget: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inspect a ring.
    Ring {
        #[command(subcommand)]
        cmd: RingCmd,
    },
    /// Salem constant of a variety (or a lower bound from probes).
    Salem(SalemArgs),
    /// Salem constants across a family of rings, as CSV.
    Sweep(SweepArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Dump the points of a variety as CSV.
    Variety(VarietyArgs),
}

#[derive(Subcommand)]
enum RingCmd {
    /// Size, characteristic, additive structure, units, ideals and radical.
    Info {
        spec: String,
        #[arg(long)]
        json: bool,
    },
    /// The ideal lattice of one side, as JSON.
    Ideals {
        spec: String,
        #[arg(long, default_value = "left")]
        side: Side,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Graph,
    Hamming,
}

#[derive(Args, Clone)]
struct VarietyOpts {
    /// `parab` or a polynomial such as `x1^2 + 3*x1*x2`.
    #[arg(long, default_value = "parab")]
    poly: String,
    #[arg(short = 'd', long = "dim")]
    d: usize,
    /// Shift for graphs, `x_d = f + c`.
    #[arg(short = 'c', long, default_value_t = 0, allow_hyphen_values = true)]
    c: i64,
    #[arg(long, value_enum, default_value = "graph")]
    variety: Shape,
    /// Right-hand side for hyperbolas, `x_1 ... x_d = j`.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    j: i64,
}

impl VarietyOpts {
    fn spec(&self) -> ringfourier::Result<VarietySpec> {
        Ok(match self.variety {
            Shape::Graph => VarietySpec::graph(polynomial(&self.poly, self.d)?, self.c),
            Shape::Hamming => VarietySpec::Hamming { j: self.j },
        })
    }
}

#[derive(Args)]
struct SalemArgs {
    spec: String,
    #[command(flatten)]
    variety: VarietyOpts,
    #[arg(long, default_value = "auto")]
    method: Method,
    /// Write the full spectrum to this CSV file.
    #[arg(long)]
    spectrum: Option<PathBuf>,
    /// Probe only these frequencies and report a lower bound. Each item is a
    /// ring element (`e11`, `1`, an index) used on every coordinate through the
    /// trace pairing, or a raw frequency such as `1|0,2`.
    #[arg(long, num_args = 1.., value_delimiter = ';')]
    probe: Vec<String>,
    /// Ignore the work budget.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Fields,
    ZmodPrimePowers,
    Mat2,
    Mat3,
    Products,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Largest ring size |R| included.
    #[arg(long)]
    max_size: usize,
    #[arg(long, default_value = "parab")]
    poly: String,
    #[arg(short = 'd', long = "dim", default_value_t = 2)]
    d: usize,
    #[arg(short = 'c', long, default_value_t = 0, allow_hyphen_values = true)]
    c: i64,
    /// CSV destination (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add a wall-time column (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSONL destination; without it records go to stdout and the summary to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record per-check wall time.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct VarietyArgs {
    spec: String,
    #[command(flatten)]
    variety: VarietyOpts,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn polynomial(text: &str, d: usize) -> ringfourier::Result<NcPolynomial> {
    if text == "parab" {
        NcPolynomial::paraboloid(d)
    } else {
        NcPolynomial::parse(text)
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => 3,
        Some(Error::Invariant(_)) | Some(Error::AxiomViolation(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    let budget = match &cli.budget {
        Some(text) => match parse_amount(text) {
            Some(v) => Budget::new(v),
            None => return Err(Error::Parse(format!("bad budget '{text}'")).into()),
        },
        None => Budget::from_env(),
    };
    match cli.cmd {
        Cmd::Ring { cmd } => ring_cmd(cmd),
        Cmd::Salem(args) => salem(args, budget),
        Cmd::Sweep(args) => sweep(args, budget),
        Cmd::Verify(args) => verify(args, budget),
        Cmd::Variety(args) => dump_variety(args, budget),
    }
}

#[derive(Serialize)]
struct RingInfo {
    spec: String,
    size: usize,
    characteristic: u64,
    additive_factors: Vec<u64>,
    unit_count: usize,
    is_field: bool,
    is_commutative: bool,
    left_ideals: Option<usize>,
    right_ideals: Option<usize>,
    two_sided_ideals: Option<usize>,
    radical_size: Option<usize>,
    quotient_size: Option<usize>,
}

/// `None` when the ring is too large to enumerate.
fn optional<T>(r: ringfourier::Result<T>) -> anyhow::Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn ring_cmd(cmd: RingCmd) -> anyhow::Result<ExitCode> {
    match cmd {
        RingCmd::Info { spec, json } => {
            let r = Ring::parse(&spec)?;
            let s = r.summary();
            let count = |side| optional(all_ideals(&r, side).map(|v| v.len()));
            let radical = optional(jacobson_radical(&r))?;
            let info = RingInfo {
                spec: s.spec,
                size: s.size,
                characteristic: s.characteristic,
                additive_factors: s.additive_factors,
                unit_count: s.unit_count,
                is_field: r.is_field(),
                is_commutative: r.is_commutative(),
                left_ideals: count(Side::Left)?,
                right_ideals: count(Side::Right)?,
                two_sided_ideals: count(Side::TwoSided)?,
                radical_size: radical.as_ref().map(|j| j.radical_size()),
                quotient_size: radical.as_ref().map(|j| j.quotient.ring.size()),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&info)?);
            } else {
                let show = |v: Option<usize>| v.map_or("n/a".to_string(), |x| x.to_string());
                println!("ring            {}", info.spec);
                println!("size            {}", info.size);
                println!("characteristic  {}", info.characteristic);
                println!("additive        {:?}", info.additive_factors);
                println!("units           {}", info.unit_count);
                println!("field           {}", info.is_field);
                println!("commutative     {}", info.is_commutative);
                println!("ideals (l/r/2)  {} / {} / {}", show(info.left_ideals), show(info.right_ideals), show(info.two_sided_ideals));
                println!("|J|             {}", show(info.radical_size));
                println!("|R/J|           {}", show(info.quotient_size));
            }
        }
        RingCmd::Ideals { spec, side } => {
            let r = Ring::parse(&spec)?;
            let lattice = ideal_lattice(&r, side)?;
            println!("{}", serde_json::to_string_pretty(&lattice_info(&lattice))?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// `eIJ` (1-based matrix unit), `1`, `0`, or an element index.
fn parse_element(r: &Ring, text: &str) -> ringfourier::Result<usize> {
    let bad = || Error::Parse(format!("bad probe element '{text}'"));
    if let Some(rest) = text.strip_prefix('e') {
        let digits: Vec<usize> = rest.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>().ok_or_else(bad)?;
        let [i, j] = digits[..] else { return Err(bad()) };
        if i == 0 || j == 0 {
            return Err(bad());
        }
        return r.matrix_unit(i - 1, j - 1).ok_or_else(|| Error::Parse(format!("{r} has no matrix unit {text}")));
    }
    let idx: usize = text.parse().map_err(|_| bad())?;
    match idx {
        1 => Ok(r.one()),
        _ if idx < r.size() => Ok(idx),
        _ => Err(Error::CoordinateOutOfRange(format!("element {idx} of {r}"))),
    }
}

fn probe_frequencies(r: &Ring, d: usize, items: &[String]) -> ringfourier::Result<Vec<Frequency>> {
    let dual = Dual::new(r, d)?;
    let mut out = Vec::new();
    for item in items {
        if item.contains('|') || d == 1 && item.contains(',') {
            out.push(item.parse()?);
        } else {
            for part in item.split(',').filter(|s| !s.is_empty()) {
                let a = parse_element(r, part.trim())?;
                out.push(dual.trace_frequency(&vec![a; d])?);
            }
        }
    }
    Ok(out)
}

fn salem(args: SalemArgs, budget: Budget) -> anyhow::Result<ExitCode> {
    let budget = if args.force { Budget::unlimited() } else { budget };
    let r = Ring::parse(&args.spec)?;
    let d = args.variety.d;
    let spec = args.variety.spec()?;
    let report = if args.probe.is_empty() {
        let spectrum = variety_spectrum(&spec, &r, d, args.method, &budget)?;
        if let Some(path) = &args.spectrum {
            spectrum.write_csv(output(Some(path))?)?;
        }
        spectrum.salem_report(&spec)?
    } else {
        let VarietySpec::Graph { f, c } = &spec else {
            bail!(Error::Precondition("--probe needs a graph variety".into()));
        };
        if args.spectrum.is_some() {
            bail!(Error::Precondition("--spectrum cannot be combined with --probe".into()));
        }
        salem_lower_bound(f, *c, &r, d, &probe_frequencies(&r, d, &args.probe)?, &budget)?
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn family_rings(family: Family, max: usize) -> anyhow::Result<Vec<Ring>> {
    let prime_powers: Vec<u64> = (2..=max as u64).filter(|&q| prime_power(q).is_some()).collect();
    let specs: Vec<String> = match family {
        Family::Fields => prime_powers.iter().map(|q| format!("gf({q})")).collect(),
        Family::ZmodPrimePowers => prime_powers.iter().map(|q| format!("zmod({q})")).collect(),
        Family::Mat2 => prime_powers
            .iter()
            .filter(|&&q| (q as u128).pow(4) <= max as u128)
            .map(|q| format!("mat(2,gf({q}))"))
            .collect(),
        Family::Mat3 => prime_powers
            .iter()
            .filter(|&&q| (q as u128).pow(9) <= max as u128)
            .map(|q| format!("mat(3,gf({q}))"))
            .collect(),
        Family::Products => {
            let mut v = Vec::new();
            for (i, &a) in prime_powers.iter().enumerate() {
                for &b in &prime_powers[i..] {
                    if (a * b) as usize <= max {
                        v.push(format!("prod(gf({a}),gf({b}))"));
                    }
                }
            }
            v
        }
    };
    let mut rings: Vec<Ring> = specs.iter().map(|s| Ring::parse(s)).collect::<ringfourier::Result<_>>()?;
    rings.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.to_string().cmp(&b.to_string())));
    Ok(rings)
}

/// Full spectrum when the budget allows it; otherwise trace probes at
/// `(a, ..., a)` for `a = 1` and, in matrix rings, `a = E11`.
fn sweep_report(r: &Ring, f: &NcPolynomial, c: i64, d: usize, budget: &Budget) -> anyhow::Result<SalemReport> {
    let spec = VarietySpec::graph(f.clone(), c);
    match variety_spectrum(&spec, r, d, Method::Auto, budget) {
        Ok(s) => Ok(s.salem_report(&spec)?),
        Err(Error::BudgetExceeded { .. }) => {
            let mut items = vec!["1".to_string()];
            if r.matrix_parts().is_some() {
                items.push("e11".into());
            }
            Ok(salem_lower_bound(f, c, r, d, &probe_frequencies(r, d, &items)?, budget)?)
        }
        Err(e) => Err(e.into()),
    }
}

fn sweep(args: SweepArgs, budget: Budget) -> anyhow::Result<ExitCode> {
    let f = polynomial(&args.poly, args.d)?;
    let rings = family_rings(args.family, args.max_size)?;
    let mut w = output(args.out.as_deref())?;
    let mut header = vec!["ring", "size", "characteristic", "d", "variety", "variety_size", "C", "lower_bound", "argmax"];
    if args.timings {
        header.push("runtime_s");
    }
    writeln!(w, "{}", header.join(","))?;
    for r in &rings {
        let start = Instant::now();
        let rep = sweep_report(r, &f, args.c, args.d, &budget)?;
        let mut row = vec![
            csv_field(&rep.ring),
            r.size().to_string(),
            r.characteristic().to_string(),
            rep.d.to_string(),
            csv_field(&rep.variety),
            rep.size.to_string(),
            format!("{:.12}", rep.c),
            rep.lower_bound.to_string(),
            csv_field(&rep.argmax.to_string()),
        ];
        if args.timings {
            row.push(format!("{:.3}", start.elapsed().as_secs_f64()));
        }
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn verify(args: VerifyArgs, budget: Budget) -> anyhow::Result<ExitCode> {
    if !suite_names().contains(&args.suite.as_str()) {
        bail!(Error::Parse(format!(
            "unknown suite '{}'; expected one of {}",
            args.suite,
            suite_names().join(", ")
        )));
    }
    let ctx = Context::new(budget, args.seed);
    let records = run_suite(&args.suite, &ctx, args.timings)?;
    let to_file = args.out.is_some();
    let mut w = output(args.out.as_deref())?;
    for r in &records {
        writeln!(w, "{}", serde_json::to_string(r)?)?;
    }
    w.flush()?;
    drop(w);
    let mut summary: Box<dyn Write> = if to_file { Box::new(io::stdout().lock()) } else { Box::new(io::stderr().lock()) };
    writeln!(summary, "{:<18} {:<40} {:<6} {:>12}", "check", "rings", "status", "max dev")?;
    for r in &records {
        writeln!(summary, "{:<18} {:<40} {:<6} {:>12.3e}", r.name, r.rings.join(" "), r.status, r.max_deviation)?;
    }
    let failed = records.iter().filter(|r| r.status == Status::Fail).count();
    let skipped = records.iter().filter(|r| r.status == Status::Skip).count();
    writeln!(summary, "{} checks, {failed} failed, {skipped} skipped", records.len())?;
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn dump_variety(args: VarietyArgs, budget: Budget) -> anyhow::Result<ExitCode> {
    let r = Ring::parse(&args.spec)?;
    let spec = args.variety.spec()?;
    let points = variety_points(&spec, &r, args.variety.d, &budget)?;
    points.write_csv(&spec, output(args.out.as_deref())?)?;
    Ok(ExitCode::SUCCESS)
}
