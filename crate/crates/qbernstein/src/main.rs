//! Command-line front end: non-crossing partition enumeration, exact
//! moment/cumulant conversion, and the kernel-backed verification
//! scenarios with machine-readable reports.
//!
//! Exit codes: 0 when every case verifies, 2 when any case is refuted,
//! 3 when any case is inconclusive (refutation dominates), 1 on
//! operational errors such as bad arguments or I/O failures.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use qbernstein::coeff::{Rat, Scalar};
use qbernstein::cumulant::{
    cumulants_from_moments, is_semicircular, moments_from_cumulants, DistributionSpec,
};
use qbernstein::nc::{catalan, enumerate_nc};
use qbernstein::scenario::{
    clt_demo, scenario_d2_remark, scenario_even, scenario_hplus_preservation, scenario_o_minus_one,
    scenario_odd, scenario_relation_equivalence, scenario_semicircle_conclusion, Report,
    ScenarioContext, Verdict, DEFAULT_SEED,
};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "qbernstein",
    version,
    about = "Exact free-probability combinatorics and kernel-checked verification scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count (and optionally list) the non-crossing partitions of n points.
    Nc {
        /// Number of points.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Print every partition, one per line.
        #[arg(long)]
        list: bool,
    },
    /// Convert exact free cumulants to moments or back.
    Cumulants {
        /// Comma-separated cumulants kappa_1,kappa_2,... as rationals.
        #[arg(long, value_delimiter = ',', conflicts_with = "moments")]
        kappa: Option<Vec<String>>,
        /// Comma-separated moments m_1,m_2,... as rationals.
        #[arg(long, value_delimiter = ',')]
        moments: Option<Vec<String>>,
        /// How many orders to print (defaults to the input length).
        #[arg(long)]
        order: Option<usize>,
        /// Also run the semicircularity recognizer on the spec.
        #[arg(long)]
        check_semicircle: bool,
    },
    /// Run a kernel-backed verification scenario.
    #[command(subcommand)]
    Verify(VerifyTarget),
    /// Demonstrate the central-limit scaling on exact cumulants.
    Clt {
        /// Truncation order (2 through 8).
        #[arg(long, default_value_t = 6)]
        order: usize,
        /// Comma-separated summand counts; each must be a perfect square.
        #[arg(long, value_delimiter = ',', default_value = "4,100,10000")]
        counts: Vec<u64>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// Even-order cumulant vanishing chain for identically distributed rows.
    Even {
        /// Grid size.
        #[arg(long, default_value_t = 2)]
        d: u8,
        /// Cumulant order (even, at least 4).
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Odd-order cumulant vanishing chain for identically distributed rows.
    Odd {
        /// Grid size.
        #[arg(long, default_value_t = 2)]
        d: u8,
        /// Cumulant order (odd, at least 3).
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Two-variable chain with independent cumulant parameters; the
    /// non-identical analysis is defined for d = 2 only, so larger grids
    /// are not accepted rather than guessed at.
    D2 {
        /// Cumulant order (at least 3).
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Freeness preservation under hyperoctahedral rotation, with inserted
    /// monomials.
    Hplus {
        /// Grid size.
        #[arg(long, default_value_t = 2)]
        d: u8,
        /// Largest cumulant order to sweep.
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// Total degree budget for inserted monomials.
        #[arg(long, default_value_t = 2)]
        b_degree: usize,
        /// Degree bound for the fallback membership search.
        #[arg(long, default_value_t = 4)]
        degree_bound: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Non-triviality probes for the sign-twisted orthogonal presentation;
    /// contains a designed refutation, so it exits 2 at d = 3.
    Ominus {
        /// Grid size (at least 3).
        #[arg(long, default_value_t = 3)]
        d: u8,
        /// Degree bound for the membership searches.
        #[arg(long, default_value_t = 4)]
        degree_bound: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Equivalence of the pair-annihilation relations with the cubic
    /// relations, plus a negative control that must be refuted.
    Equiv {
        /// Grid size.
        #[arg(long, default_value_t = 2)]
        d: u8,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Aggregate even and odd chains for every order up to a bound and
    /// cross-check the surviving spec against the semicircular recognizer.
    Semicircle {
        /// Grid size.
        #[arg(long, default_value_t = 2)]
        d: u8,
        /// Largest cumulant order to cover.
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Args)]
struct CommonOpts {
    /// Append the report as one JSON line to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write every session transcript into this directory.
    #[arg(long)]
    transcript_dir: Option<PathBuf>,
    /// Size of the worker thread pool (defaults to the core count).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for the randomized soundness spot checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl CommonOpts {
    fn context(&self) -> ScenarioContext {
        ScenarioContext {
            transcript_dir: self.transcript_dir.clone(),
            seed: self.seed,
            ..ScenarioContext::new()
        }
    }

    fn install_thread_pool(&self) -> anyhow::Result<()> {
        if let Some(threads) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .context("configuring the thread pool")?;
        }
        Ok(())
    }
}

fn main() {
    // Die quietly when the read end of a pipe closes (e.g. `qbernstein nc
    // --list | head`), as line-oriented tools are expected to.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Nc { n, list } => run_nc(n, list),
        Command::Cumulants {
            kappa,
            moments,
            order,
            check_semicircle,
        } => run_cumulants(kappa, moments, order, check_semicircle),
        Command::Verify(target) => run_verify(target),
        Command::Clt {
            order,
            counts,
            common,
        } => {
            common.install_thread_pool()?;
            let report = clt_demo(order, &counts)?;
            emit(&report, &common)
        }
    }
}

fn run_nc(n: usize, list: bool) -> anyhow::Result<i32> {
    let partitions = enumerate_nc(n)?;
    println!(
        "{} non-crossing partitions of {n} points (Catalan number {})",
        partitions.len(),
        catalan(n)
    );
    if list {
        for pi in &partitions {
            println!("{pi}");
        }
    }
    Ok(0)
}

fn parse_scalars(values: &[String]) -> anyhow::Result<Vec<Scalar>> {
    values
        .iter()
        .map(|text| {
            let value = Rat::from_str(text.trim())
                .map_err(|e| anyhow::anyhow!("cannot parse {text:?} as a rational: {e}"))?;
            Ok(Scalar::from_rat(value))
        })
        .collect()
}

fn print_row(label: &str, values: &[Scalar]) {
    let rendered = values
        .iter()
        .map(Scalar::to_string)
        .collect::<Vec<_>>()
        .join(", ");
    println!("{label}: {rendered}");
}

fn run_cumulants(
    kappa: Option<Vec<String>>,
    moments: Option<Vec<String>>,
    order: Option<usize>,
    check_semicircle: bool,
) -> anyhow::Result<i32> {
    let spec = match (&kappa, &moments) {
        (Some(kappa), None) => DistributionSpec::new(parse_scalars(kappa)?)?,
        (None, Some(moments)) => cumulants_from_moments(&parse_scalars(moments)?)?,
        _ => bail!("pass exactly one of --kappa or --moments"),
    };
    let order = order.unwrap_or(spec.order());
    if order > spec.order() {
        bail!(
            "--order {order} exceeds the {} orders determined by the input",
            spec.order()
        );
    }
    let kappa_row: Vec<Scalar> = (1..=order)
        .map(|n| spec.kappa(n).map(Scalar::clone))
        .collect::<Result<_, _>>()?;
    print_row("cumulants", &kappa_row);
    print_row("moments", &moments_from_cumulants(&spec, order)?);
    if check_semicircle {
        let (flag, mean, variance) = is_semicircular(&spec)?;
        if flag {
            println!("semicircular: yes (mean {mean}, variance {variance})");
        } else {
            println!("semicircular: no");
        }
    }
    Ok(0)
}

fn run_verify(target: VerifyTarget) -> anyhow::Result<i32> {
    let (report, common) = match target {
        VerifyTarget::Even { d, n, common } => {
            common.install_thread_pool()?;
            (scenario_even(d, n, &common.context())?, common)
        }
        VerifyTarget::Odd { d, n, common } => {
            common.install_thread_pool()?;
            (scenario_odd(d, n, &common.context())?, common)
        }
        VerifyTarget::D2 { n, common } => {
            common.install_thread_pool()?;
            (scenario_d2_remark(n, &common.context())?, common)
        }
        VerifyTarget::Hplus {
            d,
            n_max,
            b_degree,
            degree_bound,
            common,
        } => {
            common.install_thread_pool()?;
            (
                scenario_hplus_preservation(d, n_max, b_degree, degree_bound, &common.context())?,
                common,
            )
        }
        VerifyTarget::Ominus {
            d,
            degree_bound,
            common,
        } => {
            common.install_thread_pool()?;
            (scenario_o_minus_one(d, degree_bound, &common.context())?, common)
        }
        VerifyTarget::Equiv { d, common } => {
            common.install_thread_pool()?;
            (scenario_relation_equivalence(d, &common.context())?, common)
        }
        VerifyTarget::Semicircle { d, n_max, common } => {
            common.install_thread_pool()?;
            (
                scenario_semicircle_conclusion(d, n_max, &common.context())?,
                common,
            )
        }
    };
    emit(&report, &common)
}

/// Prints the human summary, appends the JSON line when requested, and
/// returns the report's exit code.
fn emit(report: &Report, common: &CommonOpts) -> anyhow::Result<i32> {
    println!("scenario: {}", report.scenario);
    for (key, value) in &report.params {
        println!("  {key}: {value}");
    }
    println!(
        "cases: {} verified, {} refuted, {} inconclusive ({} ms)",
        report.totals.verified, report.totals.refuted, report.totals.inconclusive,
        report.duration_ms
    );
    for case in &report.cases {
        let note = case.witness.as_deref().unwrap_or("");
        match case.verdict {
            Verdict::Verified => {}
            Verdict::RefutedWithWitness => println!("  refuted      {}: {note}", case.key),
            Verdict::Inconclusive => println!("  inconclusive {}: {note}", case.key),
        }
    }
    if let Some(path) = &common.out {
        report
            .append_jsonl(path)
            .with_context(|| format!("appending the report to {}", path.display()))?;
        println!("report appended to {}", path.display());
    }
    Ok(report.exit_code())
}
