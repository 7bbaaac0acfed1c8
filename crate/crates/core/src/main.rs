use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use formsum::arith::eval_fn;
use formsum::harness::{
    emit, ladder_steps, run_ladder, run_lemma_suite, run_theorem_check, with_workers, write_report, Format,
    HarnessError, Report, Scenario, Suite,
};
use formsum::nt;
use formsum::numfield::PrimeExclusion;

/// Largest allowed ratio growth between consecutive ladder rungs.
const LADDER_GROWTH: f64 = 2.0;

#[derive(Parser)]
#[command(name = "formsum", version, about = "Weighted sums over values of binary forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the weighted sum and the two terms bounding it.
    Run {
        config: PathBuf,
        /// Report path; `.csv` selects CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated volumes; the region is rescaled to each.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Include wall time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Run one verification suite: L21, L22, L23, L24, L32 or SIEVE.
    Lemma {
        suite: Suite,
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Factor the values of the forms at one point.
    Factor {
        config: PathBuf,
        /// The point as `s,t`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, ladder, workers, timing } => {
            run(&config, out.as_deref(), ladder.as_deref(), workers, timing)
        }
        Command::Lemma { suite, config, workers } => lemma(suite, &config, workers),
        Command::Factor { config, point } => factor(&config, &point),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("formsum: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| HarnessError::Io(e.to_string()))?;
    writeln!(std::io::stdout(), "{text}").map_err(|e| HarnessError::Io(e.to_string()))
}

fn run(
    config: &Path,
    out: Option<&Path>,
    ladder: Option<&[f64]>,
    workers: usize,
    timing: bool,
) -> Result<bool, HarnessError> {
    let sc = Scenario::from_path(config)?;
    let reports: Vec<Report> = match ladder {
        Some(vs) => with_workers(workers, || run_ladder(&sc, vs, timing))??,
        None => vec![with_workers(workers, || run_theorem_check(&sc, timing))??],
    };
    let target = out
        .map(|p| {
            let fmt = if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) { Format::Csv } else { Format::Json };
            (p.to_path_buf(), fmt)
        })
        .or_else(|| sc.config.output.as_ref().map(|o| (o.path.clone(), o.format)));
    match target {
        Some((path, fmt)) => write_report(&reports, fmt, &path)?,
        None => {
            let fmt = if ladder.is_some() { Format::Csv } else { Format::Json };
            emit(&reports, fmt, std::io::stdout().lock())?;
        }
    }
    if ladder.is_some() {
        let s = ladder_steps(&reports);
        eprintln!("ladder: max growth {:.4}, max ratio {:.6e}", s.max_growth, s.max_ratio);
        return Ok(s.max_growth <= LADDER_GROWTH);
    }
    Ok(true)
}

fn lemma(suite: Suite, config: &Path, workers: usize) -> Result<bool, HarnessError> {
    let sc = Scenario::from_path(config)?;
    let rep = with_workers(workers, || run_lemma_suite(suite, &sc))??;
    print_json(&rep)?;
    Ok(rep.passed)
}

fn parse_point(text: &str) -> Result<(i64, i64), HarnessError> {
    let bad = || HarnessError::Config(format!("point must be `s,t`, got {text:?}"));
    let (s, t) = text.split_once(',').ok_or_else(bad)?;
    Ok((s.trim().parse().map_err(|_| bad())?, t.trim().parse().map_err(|_| bad())?))
}

fn factor(config: &Path, point: &str) -> Result<bool, HarnessError> {
    let sc = Scenario::from_path(config)?;
    let (s, t) = parse_point(point)?;
    if nt::gcd_i128(s as i128, t as i128) != 1 {
        return Err(HarnessError::Config(format!("({s}, {t}) is not primitive")));
    }
    let q_g = sc.lattice.det() as u128;
    let mut forms = Vec::new();
    for ((k, f), form) in sc.fields.iter().zip(&sc.fns).zip(&sc.config.forms) {
        let value = k.value(s, t)?;
        if value == 0 {
            return Err(HarnessError::Config(format!("form {form} vanishes at ({s}, {t})")));
        }
        let all = PrimeExclusion::none().with_primes(k.bad_primes().iter().copied());
        let restricted = PrimeExclusion::up_to_and_dividing(sc.config.w, q_g)
            .map_err(|e| HarnessError::Compute(e.to_string()))?
            .with_primes(k.bad_primes().iter().copied());
        let ideal = k.factor_principal(s, t, &all)?;
        let part = k.factor_principal(s, t, &restricted)?;
        let integer = nt::factor(value.unsigned_abs()).map_err(|e| HarnessError::Compute(e.to_string()))?;
        forms.push(json!({
            "form": form,
            "value": form.eval(&s.into(), &t.into()).to_string(),
            "norm": value.to_string(),
            "integer_factors": integer,
            "ideal": ideal,
            "restricted": part,
            "f": eval_fn(f, &part)?,
        }));
    }
    print_json(&json!({"s": s, "t": t, "w": sc.config.w, "q_G": q_g as u64, "forms": forms}))?;
    Ok(true)
}
