//! Command-line front end. [`run`] takes the argument list and output
//! streams so the binary and the tests share one code path.
//!
//! Exit codes: `0` success, `1` the checked property fails, `2` usage,
//! parse or precondition error, `3` a search budget ran out.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::construct::{compose_threads, gdd, greedy_covering, patches};
use crate::error::{Error, Result};
use crate::format::{emit_json, emit_text, load, save, SystemFile};
use crate::setsystem::Params;
use crate::solve::{
    density_report, exact_min_lottery_with, fmt_ratio, ratio_to_f64, BoundPair, Budget, SolveOptions,
};
use crate::verify::{verify_lottery_threads, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;

/// Worker cap for verification; unset or `0` means sequential.
pub const THREADS_ENV: &str = "LOTTERYFORGE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "lotteryforge", version, about = "Lottery systems, coverings and Turán systems")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the lottery property of a system file.
    Verify(VerifyArgs),
    /// Build designs, coverings, patch families and compositions.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Compute L(n,k,r,p) exactly, or bracket it within a budget.
    Solve(SolveArgs),
    /// Tabulate bounds and densities against known limits.
    Density(DensityArgs),
}

fn parse_params(s: &str) -> std::result::Result<Params, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let nums: Vec<u32> = parts
        .iter()
        .map(|x| x.parse::<u32>().map_err(|_| format!("`{x}` is not a non-negative integer")))
        .collect::<std::result::Result<_, _>>()?;
    match nums[..] {
        [n, k, r, p] => Params::new(n, k, r, p).map_err(|e| e.to_string()),
        _ => Err("expected n,k,r,p".into()),
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    file: PathBuf,
    /// Parameters n,k,r,p; defaults to the file header.
    #[arg(long, value_parser = parse_params)]
    params: Option<Params>,
    /// Print the verdict as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the system to this file (.json selects JSON).
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Print systems as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum ConstructCmd {
    /// k-partite design in which r vertices from distinct parts lie in exactly one block.
    Gdd {
        #[arg(short = 'N')]
        part_size: u32,
        #[arg(short)]
        k: u32,
        #[arg(short)]
        r: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Greedy (n,k,r)-covering.
    Cover {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        k: u32,
        #[arg(short)]
        r: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Patch family for m base vertices blown up N times.
    Patches {
        #[arg(short)]
        m: u32,
        #[arg(short = 'N')]
        part_size: u32,
        #[arg(short)]
        k: u32,
        #[arg(short)]
        r: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compose a lottery system H on m vertices into one on mN vertices.
    Compose {
        #[arg(short = 'H')]
        base: PathBuf,
        #[arg(short = 'N')]
        part_size: u32,
        /// Parameters of H; defaults to the file header.
        #[arg(long, value_parser = parse_params)]
        params: Option<Params>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_seconds: Option<f64>,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget> {
        if let Some(s) = self.budget_seconds {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::param(format!("--budget-seconds must be positive, got {s}")));
            }
        }
        Ok(Budget {
            max_nodes: self.budget_nodes,
            max_seconds: self.budget_seconds,
        })
    }
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
struct SolveArgs {
    #[command(subcommand)]
    turan: Option<SolveCmd>,
    #[arg(short)]
    n: Option<u32>,
    #[arg(short)]
    k: Option<u32>,
    #[arg(short)]
    r: Option<u32>,
    #[arg(short)]
    p: Option<u32>,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Fix the first block to {0,...,k-1}.
    #[arg(long)]
    symmetry_break: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Subcommand)]
enum SolveCmd {
    /// T(n,p,r) = L(n,r,r,p).
    Turan {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        p: u32,
        #[arg(short, default_value_t = 2)]
        r: u32,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        symmetry_break: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct DensityArgs {
    #[arg(short)]
    k: u32,
    #[arg(short)]
    r: u32,
    #[arg(short)]
    p: u32,
    #[arg(long)]
    n_min: u32,
    #[arg(long)]
    n_max: u32,
    /// Node budget for each exact solve.
    #[arg(long, default_value_t = 200_000)]
    budget_nodes: u64,
    #[arg(long)]
    budget_seconds: Option<f64>,
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let threads = threads_from_env();
    match dispatch(cli.command, threads, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

fn dispatch(command: Command, threads: usize, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Verify(args) => cmd_verify(args, threads, out),
        Command::Construct(cmd) => cmd_construct(cmd, threads, out),
        Command::Solve(args) => cmd_solve(args, out),
        Command::Density(args) => cmd_density(args, out),
    }
}

fn header_params(file: &SystemFile, given: Option<Params>, path: &Path) -> Result<Params> {
    if let Some(p) = given {
        return Ok(p);
    }
    file.params().unwrap_or_else(|| {
        Err(Error::param(format!(
            "{}: no --params given and the header lacks r= and p=",
            path.display()
        )))
    })
}

fn cmd_verify(args: VerifyArgs, threads: usize, out: &mut dyn Write) -> Result<i32> {
    let file = load(&args.file)?;
    let params = header_params(&file, args.params, &args.file)?;
    let verdict = verify_lottery_threads(&file.system, &params, threads)?;
    if args.json {
        writeln!(out, "{}", verdict_json(&params, &verdict))?;
    } else {
        writeln!(out, "verify ({params}): {verdict}")?;
    }
    Ok(if verdict.ok { EXIT_OK } else { EXIT_FAIL })
}

fn verdict_json(params: &Params, v: &Verdict) -> String {
    serde_json::json!({
        "params": [params.n(), params.k(), params.r(), params.p()],
        "ok": v.ok,
        "witness": v.witness,
        "detail": v.detail,
    })
    .to_string()
}

fn write_system(file: &SystemFile, opts: &OutputArgs, comments: &[String], out: &mut dyn Write) -> Result<()> {
    match &opts.emit {
        Some(path) => {
            save(path, file)?;
            for c in comments {
                writeln!(out, "{c}")?;
            }
            writeln!(out, "wrote {} blocks to {}", file.system.len(), path.display())?;
        }
        None if opts.json => {
            out.write_all(emit_json(file).as_bytes())?;
        }
        None => {
            for c in comments {
                writeln!(out, "# {c}")?;
            }
            out.write_all(emit_text(file).as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_construct(cmd: ConstructCmd, threads: usize, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        ConstructCmd::Gdd { part_size, k, r, out: opts } => {
            let sys = gdd(part_size, k, r)?;
            let note = format!("gdd N={part_size} k={k} r={r}: {} blocks", sys.len());
            let file = SystemFile::new(sys).labeled(format!("gdd-N{part_size}-k{k}-r{r}"));
            write_system(&file, &opts, &[note], out)?;
        }
        ConstructCmd::Cover { n, k, r, out: opts } => {
            let sys = greedy_covering(n, k, r)?;
            let note = format!("greedy ({n},{k},{r})-covering: {} blocks", sys.len());
            let params = Params::new(n, k, r, r)?;
            let file = SystemFile::with_params(sys, &params).labeled(format!("cover-{n}-{k}-{r}"));
            write_system(&file, &opts, &[note], out)?;
        }
        ConstructCmd::Patches { m, part_size, k, r, out: opts } => {
            let sys = patches(m, part_size, k, r)?;
            let note = format!("patches m={m} N={part_size} k={k} r={r}: {} blocks", sys.len());
            let file = SystemFile::new(sys).labeled(format!("patches-m{m}-N{part_size}-k{k}-r{r}"));
            write_system(&file, &opts, &[note], out)?;
        }
        ConstructCmd::Compose { base, part_size, params, out: opts } => {
            let file = load(&base)?;
            let params = header_params(&file, params, &base)?;
            let (sys, report) = compose_threads(&file.system, &params, part_size, threads)?;
            let target = Params::new(sys.n(), params.k(), params.r(), params.p())?;
            let lines: Vec<String> = report.to_string().lines().map(str::to_string).collect();
            let file = SystemFile::with_params(sys, &target).labeled(format!("compose-N{part_size}"));
            write_system(&file, &opts, &lines, out)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_solve(args: SolveArgs, out: &mut dyn Write) -> Result<i32> {
    if let Some(SolveCmd::Turan { n, p, r, budget, symmetry_break, out: opts }) = args.turan {
        let params = Params::new(n, r, r, p)?;
        let opts_solve = SolveOptions {
            budget: budget.budget()?,
            symmetry_break,
        };
        let bp = exact_min_lottery_with(&params, &opts_solve)?;
        let name = format!("T({n},{p},{r})");
        writeln!(out, "{}", render_bound(&bp, &name))?;
        return finish_solve(&bp, &params, &opts, out);
    }
    let missing = |x: Option<u32>, flag: &str| {
        x.ok_or_else(|| Error::param(format!("solve needs -{flag}")))
    };
    let params = Params::new(
        missing(args.n, "n")?,
        missing(args.k, "k")?,
        missing(args.r, "r")?,
        missing(args.p, "p")?,
    )?;
    let opts_solve = SolveOptions {
        budget: args.budget.budget()?,
        symmetry_break: args.symmetry_break,
    };
    let bp = exact_min_lottery_with(&params, &opts_solve)?;
    writeln!(out, "{bp}")?;
    finish_solve(&bp, &params, &args.out, out)
}

fn render_bound(bp: &BoundPair, name: &str) -> String {
    match (bp.complete, bp.upper) {
        (true, Some(v)) => format!("{name} = {v}"),
        (_, Some(hi)) => format!("{} ≤ {name} ≤ {hi} [incomplete]", bp.lower),
        (_, None) => format!("{} ≤ {name} [incomplete]", bp.lower),
    }
}

fn finish_solve(bp: &BoundPair, params: &Params, opts: &OutputArgs, out: &mut dyn Write) -> Result<i32> {
    if let (Some(path), Some(cert)) = (&opts.emit, &bp.certificate) {
        let file = SystemFile::with_params(cert.clone(), params).labeled(if bp.complete {
            "optimal"
        } else {
            "best-found"
        });
        save(path, &file)?;
        writeln!(out, "wrote certificate ({} blocks) to {}", cert.len(), path.display())?;
    }
    Ok(if bp.complete { EXIT_OK } else { EXIT_INCOMPLETE })
}

fn cmd_density(args: DensityArgs, out: &mut dyn Write) -> Result<i32> {
    if args.n_min > args.n_max {
        return Err(Error::param("--n-min exceeds --n-max"));
    }
    let budget = Budget {
        max_nodes: Some(args.budget_nodes),
        max_seconds: args.budget_seconds,
    };
    let (k, r, p) = (args.k, args.r, args.p);
    writeln!(out, "# density of L(n,{k},{r},{p}) / C(n,{r})")?;
    for reference in crate::solve::reference_limits(k, r, p) {
        let tag = if reference.conjectural { "conjectural" } else { "reference" };
        writeln!(
            out,
            "# {tag}: {} = {} ≈ {:.6}",
            reference.label,
            fmt_ratio(&reference.value),
            ratio_to_f64(&reference.value)
        )?;
    }
    writeln!(out, "n\tT(n,{p},{r})\tlower\texact\tupper\td_lower\td_exact\td_upper")?;
    let render = |x: &Option<num::rational::BigRational>| match x {
        Some(v) => format!("{} ({:.6})", fmt_ratio(v), ratio_to_f64(v)),
        None => "-".to_string(),
    };
    let opt = |x: Option<u64>| x.map_or_else(|| "-".to_string(), |v| v.to_string());
    for n in args.n_min.max(k)..=args.n_max {
        let params = Params::new(n, k, r, p)?;
        let row = density_report(&params, budget)?;
        writeln!(
            out,
            "{n}\t{} [{}]\t{}\t{}\t{}\t{}\t{}\t{}",
            row.turan,
            row.turan_method,
            row.lower,
            opt(row.exact),
            opt(row.upper),
            render(&Some(row.density_lower.clone())),
            render(&row.density_exact),
            render(&row.density_upper),
        )?;
    }
    Ok(EXIT_OK)
}
