use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use comploc::composition::format_key;
use comploc::info::FactsReport;
use comploc::text::{parse_bp, parse_composition, serialize_composition, serialize_depth3};
use comploc::{
    bp_to_composition, build_hw, build_maj, build_parity, check_key_lemma, composition_to_depth3,
    end_to_end_pipeline, exact_cc, extract_bias_witness, info_report, validate_information_facts,
    verify_against, Composition, Domain, Error, NamedFunction, Polarity, SearchBudget,
    SearchOutcome, TruthTable, Verification,
};

#[derive(Parser)]
#[command(
    name = "comploc",
    version,
    about = "Compositions of k-local boolean functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Parity,
    Hw,
    Maj,
}

impl From<Family> for NamedFunction {
    fn from(f: Family) -> Self {
        match f {
            Family::Parity => NamedFunction::Parity,
            Family::Hw => NamedFunction::Hw,
            Family::Maj => NamedFunction::Maj,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolarityArg {
    Sigma3,
    Pi3,
}

/// Weight interval `LO:HI`.
#[derive(Clone, Copy, Debug)]
struct Band(u32, u32);

fn parse_band(s: &str) -> Result<Band, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo = lo.parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi = hi.parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    Ok(Band(lo, hi))
}

#[derive(Subcommand)]
enum Command {
    /// Build the standard composition for a function family.
    Construct {
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustively check a composition against a named function.
    Verify {
        file: PathBuf,
        #[arg(long)]
        target: Family,
        #[arg(long, value_parser = parse_band)]
        band: Option<Band>,
    },
    /// Turn a branching program into a composition of k-local inners.
    ReduceBp {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lower a composition to a depth-3 circuit and report its size.
    ToDepth3 {
        file: PathBuf,
        #[arg(long, value_enum)]
        polarity: PolarityArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Per-variable information report.
    Info {
        file: PathBuf,
        #[arg(long, value_parser = parse_band)]
        band: Option<Band>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the per-variable entropy gap of a Hamming-weight composition.
    CheckLemma {
        file: PathBuf,
        #[arg(long, default_value = "hw")]
        target: Family,
        #[arg(long, value_parser = parse_band)]
        band: Option<Band>,
    },
    /// Derive a partial Hamming-weight instance from a majority composition.
    ReduceMaj {
        file: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Locate the biased conditional behind a variable's information.
    Witness {
        file: PathBuf,
        #[arg(long)]
        var: usize,
        #[arg(long, default_value = "hw")]
        target: Family,
        #[arg(long, value_parser = parse_band)]
        band: Option<Band>,
    },
    /// Exact minimum number of k-local inners for a small function.
    Search {
        #[arg(long)]
        target: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        m_max: usize,
        /// Wall-clock limit in seconds.
        #[arg(long, default_value_t = 60)]
        time_limit: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Randomized check of basic entropy identities.
    Facts {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

const VIOLATION: u8 = 1;
const USAGE: u8 = 2;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path) -> anyhow::Result<Composition> {
    Ok(parse_composition(&read(path)?)?)
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn domain(n: usize, band: Option<Band>) -> comploc::Result<Domain> {
    match band {
        Some(Band(lo, hi)) => Domain::band(n, lo, hi),
        None => Domain::full(n),
    }
}

fn report_verification(v: &Verification) -> ExitCode {
    match v {
        Verification::Pass => {
            println!("PASS");
            ExitCode::SUCCESS
        }
        Verification::Counterexample {
            input,
            expected,
            got,
        } => {
            let got = got.map_or_else(|| "undefined".to_string(), |g| g.to_string());
            println!("FAIL at x={input}: expected {expected}, got {got}");
            ExitCode::from(VIOLATION)
        }
    }
}

fn ratio(n: usize, k: usize) -> String {
    if n.is_multiple_of(k) {
        (n / k).to_string()
    } else {
        format!("{n}/{k}")
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Construct {
            family,
            n,
            k,
            output,
        } => {
            let c = match family {
                Family::Parity => build_parity(n, k)?,
                Family::Hw => build_hw(n, k)?,
                Family::Maj => build_maj(n, k)?,
            };
            emit(output.as_deref(), &serialize_composition(&c))?;
            if output.is_some() {
                println!("m={}", c.m());
            }
        }
        Command::Verify { file, target, band } => {
            let c = load(&file)?;
            let f = TruthTable::named(target.into(), c.n())?;
            return Ok(report_verification(&verify_against(
                &c,
                &f,
                &domain(c.n(), band)?,
            )?));
        }
        Command::ReduceBp { file, k, output } => {
            let bp = parse_bp(&read(&file)?)?;
            let c = bp_to_composition(&bp, k)?;
            emit(output.as_deref(), &serialize_composition(&c))?;
            if output.is_some() {
                println!("m={}", c.m());
            }
        }
        Command::ToDepth3 {
            file,
            polarity,
            output,
        } => {
            let c = load(&file)?;
            let polarity = match polarity {
                PolarityArg::Sigma3 => Polarity::Sigma3,
                PolarityArg::Pi3 => Polarity::Pi3,
            };
            let circuit = composition_to_depth3(&c, polarity)?;
            if let Some(path) = &output {
                emit(Some(path), &serialize_depth3(&circuit))?;
            }
            let size = circuit.size();
            println!(
                "gates={} bottom_fanin={} top_fanin={} bound={}",
                size.gate_count,
                size.bottom_fanin,
                size.top_fanin,
                (1u64 << c.m()) + (c.m() as u64) * (1u64 << c.k())
            );
        }
        Command::Info { file, band, csv } => {
            let c = load(&file)?;
            let report = info_report(&c, &domain(c.n(), band)?)?;
            match &csv {
                Some(path) => {
                    emit(Some(path), &report.to_csv())?;
                    println!(
                        "I_total={:.6} sum_I={:.6} m={}",
                        report.total_info,
                        report.sum_var_info(),
                        report.m
                    );
                }
                None => print!("{}", report.to_csv()),
            }
        }
        Command::CheckLemma { file, target, band } => {
            let c = load(&file)?;
            let f = TruthTable::named(target.into(), c.n())?;
            let d = domain(c.n(), band)?;
            let v = verify_against(&c, &f, &d)?;
            if !v.passed() {
                return Ok(report_verification(&v));
            }
            let report = check_key_lemma(&c, &f, &d)?;
            println!("var,q,escape,Hcond,gap,pass");
            for r in &report.rows {
                println!(
                    "{},{},{},{},{},{}",
                    r.var, r.q, r.escape, r.cond_entropy, r.gap, r.pass
                );
            }
            println!("gap_sum={}", report.gap_sum());
            if !report.passed() {
                let bad: Vec<String> = report
                    .rows
                    .iter()
                    .filter(|r| !r.pass)
                    .map(|r| r.var.to_string())
                    .collect();
                println!("FAIL at variables {}", bad.join(","));
                return Ok(ExitCode::from(VIOLATION));
            }
            println!("PASS");
        }
        Command::ReduceMaj { file, t, output } => {
            if t == 0 {
                bail!("--t must be at least 1");
            }
            let c = load(&file)?;
            let maj = TruthTable::named(NamedFunction::Maj, c.n())?;
            let v = verify_against(&c, &maj, &Domain::full(c.n())?)?;
            if !v.passed() {
                print!("input does not compute majority: ");
                return Ok(report_verification(&v));
            }
            let report = end_to_end_pipeline(&c, t)?;
            let p = &report.partial;
            emit(output.as_deref(), &serialize_composition(&p.composition))?;
            let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            println!("control={}", list(&p.split.control));
            println!(
                "buffer={} buffer_ones={}",
                list(&p.split.buffer),
                list(&p.buffer_ones)
            );
            println!("free={}", list(&p.split.free));
            println!(
                "band={}:{} m={} q_max={}",
                p.band.0, p.band.1, report.m, report.q_max
            );
            println!(
                "log_deficit={} gap_sum={} escape_bound={}",
                report.log_deficit, report.gap_sum, report.escape_bound
            );
            if !report.escapes_within_bound() || !report.key_lemma.passed() {
                println!("FAIL: derived instance violates the escape or gap bound");
                return Ok(ExitCode::from(VIOLATION));
            }
        }
        Command::Witness {
            file,
            var,
            target,
            band,
        } => {
            let c = load(&file)?;
            let f = TruthTable::named(target.into(), c.n())?;
            let d = domain(c.n(), band)?;
            let v = verify_against(&c, &f, &d)?;
            if !v.passed() {
                return Ok(report_verification(&v));
            }
            let w = extract_bias_witness(&c, &f, &d, var)?;
            let free: Vec<String> = w.free_inners.iter().map(|j| (j + 1).to_string()).collect();
            println!("var={} free_inners={}", w.var, free.join(","));
            println!("v={}", format_key(w.free_inners.len(), w.v));
            println!(
                "w*={} p_cond={} mass={} jump={}",
                w.w_star, w.p_cond, w.mass, w.jump
            );
            let wv: Vec<String> = w.w_v.iter().map(u32::to_string).collect();
            println!(
                "W_v={} |W_v|={} max|W_v|={} reachable={} score={}",
                wv.join(","),
                w.w_v_size,
                w.max_w_v_size,
                w.reachable,
                w.score
            );
        }
        Command::Search {
            target,
            n,
            k,
            m_max,
            time_limit,
            output,
        } => {
            let f = TruthTable::named(target.into(), n)?;
            let budget = SearchBudget {
                m_max,
                time_limit: Duration::from_secs(time_limit),
                ..SearchBudget::default()
            };
            match exact_cc(&f, k, &budget)? {
                SearchOutcome::Found {
                    m_star,
                    witness,
                    refuted,
                    ..
                } => {
                    let cmp = match (m_star * k).cmp(&n) {
                        std::cmp::Ordering::Greater => ">",
                        std::cmp::Ordering::Equal => "=",
                        std::cmp::Ordering::Less => "<",
                    };
                    println!("m*={m_star} ({cmp}{})", ratio(n, k));
                    for level in &refuted {
                        eprintln!("m={}: {:?}", level.m, level.result);
                    }
                    emit(output.as_deref(), &serialize_composition(&witness))?;
                }
                SearchOutcome::Inconclusive {
                    lower_bound,
                    reason,
                    ..
                } => {
                    println!("m*>={lower_bound} (inconclusive: {reason})");
                    return Ok(ExitCode::from(USAGE));
                }
            }
        }
        Command::Facts { trials, seed } => {
            let FactsReport {
                trials,
                checks,
                failures,
            } = validate_information_facts(trials, seed);
            println!(
                "trials={trials} checks={checks} failures={}",
                failures.len()
            );
            for f in &failures {
                println!("FAIL {f}");
            }
            if !failures.is_empty() {
                return Ok(ExitCode::from(VIOLATION));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Conflict { .. }
            | Error::Infeasible(_)
            | Error::Invariant(_)
            | Error::UnmappedKey { .. },
        ) => VIOLATION,
        _ => USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("COMPLOC_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_syntax() {
        let b = parse_band("2:5").unwrap();
        assert_eq!((b.0, b.1), (2, 5));
        assert!(parse_band("2").is_err());
        assert!(parse_band("a:3").is_err());
    }

    #[test]
    fn ratios() {
        assert_eq!(ratio(4, 2), "2");
        assert_eq!(ratio(5, 2), "5/2");
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
