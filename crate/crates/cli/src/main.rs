use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tmsr_core::encode::{gen_3sat, gen_drone, gen_tm, Cnf3, DroneParams, Strategy, TmSpec, Wind};
use tmsr_core::encode::drone::Heading;
use tmsr_core::report::{digest, parse_report, render, replay};
use tmsr_core::{
    bounded_realizability, bounded_survivability, check_balanced, check_progressive, compute_dmax, count_bound,
    parse_spec, realizability, survivability, Error, Model, Outcome, SearchBudget, Verdict, Witness,
};

const INPUT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "tmsr", version, about = "Realizability and survivability of timed multiset rewriting systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a spec and report whether it is a progressive timed system.
    Check { spec: PathBuf },
    /// Decide realizability or survivability.
    Verify(VerifyArgs),
    /// Generate a spec file.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Check the trace stored in a report against a spec.
    Replay { spec: PathBuf, report: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Realizability,
    Survivability,
}

#[derive(Args)]
struct VerifyArgs {
    spec: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Bounded check up to the N-th tick; without N, the spec's `param ticks`.
    #[arg(long, num_args = 0..=1, value_name = "N")]
    ticks: Option<Option<u64>>,
    #[arg(long, default_value_t = 5_000_000)]
    max_states: usize,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Drones photographing points on a grid.
    Drone(DroneArgs),
    /// 3-SAT reduction of a DIMACS CNF file.
    #[command(name = "3sat")]
    Sat {
        cnf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turing-machine encoding of a machine description file.
    Tm {
        machine: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Greedy,
    Unguarded,
}

#[derive(Args)]
struct DroneArgs {
    /// Grid size, e.g. `3x3`.
    #[arg(long, default_value = "3x3")]
    grid: String,
    /// Base position, e.g. `1,1`.
    #[arg(long, default_value = "1,1")]
    base: String,
    /// Points, e.g. `0,0;2,1`.
    #[arg(long, default_value = "0,0")]
    points: String,
    #[arg(long, default_value_t = 1)]
    drones: usize,
    /// Largest allowed picture age.
    #[arg(long = "m", default_value_t = 4)]
    m: u64,
    #[arg(long, default_value_t = 10)]
    emax: u64,
    /// Wind cells, e.g. `0,1,north;2,2,west`.
    #[arg(long)]
    wind: Option<String>,
    /// Add a single-slot charging station with this stay limit.
    #[arg(long)]
    station: Option<u64>,
    #[arg(long, value_enum, default_value = "greedy")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 200_000)]
    max_rules: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Argument(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Argument(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<(String, Model), Error> {
    let text = read(path)?;
    let model = parse_spec(&text)
        .and_then(|s| s.load())
        .map_err(|e| match e {
            Error::Parse { .. } => Error::Argument(format!("{}:{e}", path.display())),
            other => other,
        })?;
    Ok((text, model))
}

fn check(path: &Path) -> Result<u8, Error> {
    let (_, m) = load(path)?;
    let sys = &m.system;
    let balanced = check_balanced(sys);
    let progressive = check_progressive(sys);
    for v in balanced.failures().chain(progressive.failures()) {
        println!("rule `{}` (variant {}): {}", v.rule, v.variant, v.detail);
    }
    let dmax = compute_dmax(sys, &m.init, &m.critical);
    let facts = m.init.len() as u64;
    println!("rules: {}", sys.rules.len());
    println!("facts: {facts}");
    println!("k: {}", sys.declared_k);
    println!("dmax: {dmax}");
    println!(
        "delta-configuration bound: {}",
        count_bound(facts, sys.declared_k as u64, dmax, sys.signature.j() as u64, sys.signature.e() as u64)
    );
    println!("balanced: {}", balanced.ok());
    println!("progressive: {}", progressive.ok());
    Ok(if balanced.ok() && progressive.ok() { 0 } else { 1 })
}

fn summary(v: &Verdict) {
    let mode = match v.ticks {
        Some(n) => format!("{} within {n} ticks", v.mode.as_str()),
        None => v.mode.as_str().to_string(),
    };
    println!("{mode}: {}", v.outcome.as_str());
    if let Some(h) = &v.critical {
        println!("critical: {} (pair {})", h.name, h.index);
    }
    if let Some(t) = &v.counterexample {
        println!("counterexample: {} steps, {} ticks", t.len(), t.ticks());
    }
    match &v.witness {
        Some(Witness::Trace(t)) => println!("witness: {} steps", t.len()),
        Some(Witness::Lasso(l)) => println!("witness: lasso, stem {} steps, cycle {} steps", l.stem.len(), l.cycle.len()),
        None => {}
    }
    println!("states: {}", v.stats.states);
    println!("elapsed: {} ms", v.stats.elapsed_ms);
}

fn verify(a: &VerifyArgs) -> Result<u8, Error> {
    let (text, m) = load(&a.spec)?;
    let budget = SearchBudget {
        max_states: a.max_states,
        timeout: a.timeout.map(Duration::from_secs_f64),
        workers: a.workers.max(1),
    };
    let ticks = match a.ticks {
        None => None,
        Some(Some(n)) => Some(n),
        Some(None) => Some(m.ticks.ok_or_else(|| {
            Error::Argument("--ticks without a value needs `param ticks` in the spec".into())
        })?),
    };
    let (sys, init, cs) = (&m.system, &m.init, &m.critical);
    let v = match (a.mode, ticks) {
        (ModeArg::Realizability, None) => realizability(sys, init, cs, &budget)?,
        (ModeArg::Survivability, None) => survivability(sys, init, cs, &budget)?,
        (ModeArg::Realizability, Some(n)) => bounded_realizability(sys, init, cs, n, &budget)?,
        (ModeArg::Survivability, Some(n)) => bounded_survivability(sys, init, cs, n, &budget)?,
    };
    summary(&v);
    if let Some(out) = &a.out {
        write_out(Some(out), &render(&v, &text))?;
    }
    Ok(match v.outcome {
        Outcome::Holds => 0,
        Outcome::Fails => 1,
        Outcome::Unknown => 2,
    })
}

fn pair(s: &str, sep: char) -> Result<(u64, u64), Error> {
    let bad = || Error::Argument(format!("cannot read `{s}`"));
    let (a, b) = s.split_once(sep).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn drone_params(a: &DroneArgs) -> Result<DroneParams, Error> {
    let (x_max, y_max) = pair(&a.grid, 'x')?;
    let points = a
        .points
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| pair(s, ','))
        .collect::<Result<Vec<_>, _>>()?;
    let mut p = DroneParams::new(x_max, y_max, pair(&a.base, ',')?, points, a.m, a.emax);
    p.drones = a.drones;
    p.station = a.station;
    p.rule_ceiling = a.max_rules;
    p.strategy = match a.strategy {
        StrategyArg::Greedy => Strategy::Greedy,
        StrategyArg::Unguarded => Strategy::Unguarded,
    };
    if let Some(w) = &a.wind {
        for cell in w.split(';').filter(|s| !s.trim().is_empty()) {
            let parts: Vec<&str> = cell.split(',').map(str::trim).collect();
            let bad = || Error::Argument(format!("cannot read wind cell `{cell}`"));
            if parts.len() != 3 {
                return Err(bad());
            }
            p.wind.push(Wind {
                x: parts[0].parse().map_err(|_| bad())?,
                y: parts[1].parse().map_err(|_| bad())?,
                dir: Heading::parse(parts[2]).ok_or_else(bad)?,
            });
        }
    }
    Ok(p)
}

fn generate(g: &GenCommand) -> Result<u8, Error> {
    let (spec, out) = match g {
        GenCommand::Drone(a) => (gen_drone(&drone_params(a)?)?, a.out.as_deref()),
        GenCommand::Sat { cnf, out } => (gen_3sat(&Cnf3::parse_dimacs(&read(cnf)?)?)?, out.as_deref()),
        GenCommand::Tm { machine, out } => (gen_tm(&TmSpec::parse(&read(machine)?)?)?, out.as_deref()),
    };
    write_out(out, &spec.to_string())?;
    Ok(0)
}

fn run_replay(spec: &Path, report: &Path) -> Result<u8, Error> {
    let (text, m) = load(spec)?;
    let parsed = parse_report(&m, &read(report)?)?;
    if parsed.input_digest != digest(&text) {
        eprintln!("warning: report was produced from a different input");
    }
    let check = replay(&m, &parsed)?;
    if check.ok {
        println!("valid {} trace", parsed.mode.as_str());
        Ok(0)
    } else {
        println!(
            "invalid trace at position {}: {}",
            check.failing_step.unwrap_or(0),
            check.message
        );
        Ok(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { spec } => check(spec),
        Command::Verify(a) => verify(a),
        Command::Gen(g) => generate(g),
        Command::Replay { spec, report } => run_replay(spec, report),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
