use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cliffdesign::designs::{design_report, orbit_frame_potential, sym_dim, OrbitMode};
use cliffdesign::fiducial::{
    algorithm1, algorithm2, algorithm2_default_seeds, named_fiducial, singer_epsilon_row,
    singer_mub_deviation, singer_unitary, weighted_two_orbit, BisectionMode, FiducialName,
    FiducialOutput,
};
use cliffdesign::moments::{
    concentration_report, exact_second_moment, lipschitz_probe, MIN_LIPSCHITZ_PAIRS,
};
use cliffdesign::stabrep::{tables_report, RationalOut};
use cliffdesign::state::{StateFile, StateVector};
use cliffdesign::{Error, Result};

/// Clifford-orbit 4-designs: exact tables, design checks and constructions.
#[derive(Parser, Debug)]
#[command(name = "cliffdesign", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Tolerance for pass/fail decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension table, string-orbit oracle and exact group sums for one n.
    Tables {
        #[arg(long)]
        n: usize,
    },
    /// Design metrics of a state.
    Check(StateSource),
    /// Build a 4-design fiducial or a weighted 4-design.
    Construct(ConstructArgs),
    /// Monte-Carlo moments of α₊ and ε against exact values.
    Moments {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Tail thresholds ξ for Prob{|ε| ≥ ξ}.
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        xi: Vec<f64>,
        /// Pairs for the Lipschitz probe (0 skips it).
        #[arg(long, default_value_t = 0)]
        lipschitz_pairs: usize,
    },
    /// ε(ψ_n ⊗ ψ_T) for Singer-unitary eigenvectors.
    Singer {
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
    },
    /// Frame potential of a Clifford orbit.
    Orbit {
        #[command(flatten)]
        source: StateSource,
        #[arg(long)]
        t: u32,
        /// Expected number of qubits.
        #[arg(long)]
        n: Option<usize>,
        /// Sample random Cliffords instead of summing the whole group.
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct StateSource {
    /// psi_T, hoggar, bloch:x,y,z, or a product such as hoggar*psi_T.
    #[arg(long)]
    named: Option<String>,
    /// JSON file {"n": int, "amplitudes": [[re, im], ...]}.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(skip)]
#[command(group(ArgGroup::new("mode").required(true).args(["alg1", "alg2", "weighted"])))]
struct ConstructArgs {
    /// Tensor completion of --base by one qubit.
    #[arg(long)]
    alg1: bool,
    /// Bisection between a stabilizer state and a negative-ε seed.
    #[arg(long)]
    alg2: bool,
    /// Weighted union of two orbits with opposite ε.
    #[arg(long)]
    weighted: bool,
    #[arg(long)]
    n: usize,
    #[arg(long, required_if_eq("alg1", "true"))]
    base: Option<String>,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Use the ε-weighted combination instead of the midpoint.
    #[arg(long)]
    secant: bool,
}

fn parse_named(spec: &str) -> Result<StateVector> {
    let mut parts = spec.split('*');
    let first = parts.next().unwrap_or_default();
    let mut psi = named_fiducial(first.parse::<FiducialName>()?)?;
    for p in parts {
        psi = psi.kron(&named_fiducial(p.parse::<FiducialName>()?)?);
    }
    Ok(psi)
}

fn load_state(src: &StateSource) -> Result<(String, StateVector)> {
    match (&src.named, &src.file) {
        (Some(name), _) => Ok((name.clone(), parse_named(name)?)),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)?;
            Ok((path.display().to_string(), StateVector::from_json(&text)?))
        }
        (None, None) => Err(Error::InvalidArgument("need --named or --file".into())),
    }
}

/// Command output: the JSON document, an optional CSV rendering, and whether
/// every embedded check passed.
struct Output {
    json: Value,
    csv: Option<String>,
    pass: bool,
}

fn run(cli: &Cli) -> Result<Output> {
    let config = json!({
        "seed": cli.seed,
        "tol": cli.tol,
        "threads": cli.threads,
        "command": format!("{:?}", cli.command),
    });
    let mut out = match &cli.command {
        Command::Tables { n } => cmd_tables(*n)?,
        Command::Check(src) => cmd_check(src, cli.tol)?,
        Command::Construct(args) => cmd_construct(args, cli.tol)?,
        Command::Moments {
            n,
            samples,
            xi,
            lipschitz_pairs,
        } => cmd_moments(*n, *samples, xi, *lipschitz_pairs, cli.seed)?,
        Command::Singer { n } => cmd_singer(n)?,
        Command::Orbit {
            source,
            t,
            n,
            samples,
        } => cmd_orbit(source, *t, *n, *samples, cli.seed, cli.tol)?,
    };
    if let Value::Object(map) = &mut out.json {
        map.insert("config".into(), config);
        map.insert("pass".into(), Value::Bool(out.pass));
    }
    Ok(out)
}

fn cmd_tables(n: usize) -> Result<Output> {
    let report = tables_report(n)?;
    let expected_phi4 = match n {
        1 => Some("15"),
        2 => Some("29"),
        3 => Some("30"),
        _ => None,
    };
    let phi_ok = match (&report.frame_potential_phi4, expected_phi4) {
        (Some(got), Some(want)) => got.exact == want,
        _ => true,
    };
    let pass = report.completeness
        && report.appendix_a.as_ref().is_none_or(|a| a.agrees)
        && phi_ok;
    let mut csv = String::from("lambda,d_lambda,D,D_plus,D_minus\n");
    for r in &report.rows {
        csv.push_str(&format!(
            "\"{}\",{},{},{},{}\n",
            r.lambda, r.d_lambda, r.d_weyl, r.d_plus, r.d_minus
        ));
    }
    Ok(Output {
        json: json!({ "tables": serde_json::to_value(&report)? }),
        csv: Some(csv),
        pass,
    })
}

fn cmd_check(src: &StateSource, tol: f64) -> Result<Output> {
    let (name, psi) = load_state(src)?;
    let report = design_report(&psi)?;
    let csv = format!(
        "n,d,ell4,alpha_plus,epsilon,phi4\n{},{},{},{},{},{}\n",
        report.n, report.d, report.ell4, report.alpha_plus, report.epsilon, report.phi4
    );
    Ok(Output {
        json: json!({
            "state": name,
            "report": serde_json::to_value(report)?,
            "is_4design_fiducial": report.epsilon.abs() <= tol,
        }),
        csv: Some(csv),
        pass: report.all_bounds_ok(),
    })
}

fn cmd_construct(args: &ConstructArgs, tol: f64) -> Result<Output> {
    if args.weighted {
        let (a, b) = algorithm2_default_seeds(args.n)?;
        let w = weighted_two_orbit(&a, &b)?;
        let phi4 = w.frame_potential(4)?;
        let target = 1.0 / sym_dim(1u64 << args.n, 4) as f64;
        let states: Vec<Value> = w
            .states
            .iter()
            .zip(&w.weights)
            .map(|(s, wt)| json!({ "weight": wt, "state": StateFile::from(s) }))
            .collect();
        return Ok(Output {
            json: json!({
                "mode": "weighted",
                "n": args.n,
                "phi4": phi4,
                "phi4_design": target,
                "orbit_sizes": w.orbit_sizes,
                "design": states,
            }),
            csv: None,
            pass: (phi4 - target).abs() <= tol,
        });
    }
    let (mode, psi, extra) = if args.alg1 {
        let base = args.base.as_deref().expect("clap enforces --base");
        let prev = parse_named(base)?;
        let psi = algorithm1(&prev, args.n)?;
        ("alg1", psi, json!({ "base": base }))
    } else {
        let (a, b) = algorithm2_default_seeds(args.n)?;
        let mode = if args.secant {
            BisectionMode::Secant
        } else {
            BisectionMode::Midpoint
        };
        let outcome = algorithm2(&a, &b, tol, args.max_iter, mode)?;
        (
            "alg2",
            outcome.state.clone(),
            json!({ "iterations": outcome.iterations, "bisection": format!("{mode:?}") }),
        )
    };
    let fid = FiducialOutput::new(mode, &psi)?;
    let pass = fid.report.epsilon.abs() <= tol.max(1e-10);
    let csv = std::iter::once("re,im".to_string())
        .chain(fid.amplitudes.iter().map(|[re, im]| format!("{re},{im}")))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n";
    Ok(Output {
        json: json!({
            "mode": mode,
            "n": args.n,
            "details": extra,
            "fiducial": serde_json::to_value(&fid)?,
        }),
        csv: Some(csv),
        pass,
    })
}

fn cmd_moments(
    n: usize,
    samples: usize,
    xi: &[f64],
    lipschitz_pairs: usize,
    seed: u64,
) -> Result<Output> {
    let report = concentration_report(n, samples, xi, seed)?;
    let exact = RationalOut::from(exact_second_moment(n)?);
    let mut pass = report.pass;
    let lipschitz = if lipschitz_pairs > 0 {
        let l = lipschitz_probe(n, lipschitz_pairs.max(MIN_LIPSCHITZ_PAIRS), seed)?;
        pass &= l.pass;
        Some(l)
    } else {
        None
    };
    Ok(Output {
        json: json!({
            "moments": serde_json::to_value(&report)?,
            "exact_second_moment": exact,
            "lipschitz": lipschitz,
        }),
        csv: None,
        pass,
    })
}

fn cmd_singer(ns: &[usize]) -> Result<Output> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument("need --n".into()));
    }
    let mut rows = Vec::new();
    let mut pass = true;
    let mut csv = String::from("n,minus_epsilon,spread,ell4\n");
    for &n in ns {
        let row = singer_epsilon_row(n)?;
        let (want, tol) = match n {
            1 => (2.0 / 9.0, 1e-10),
            2 => (0.12, 5e-3),
            4 => (0.0312, 5e-4),
            _ => (0.0020, 5e-4),
        };
        let ok = (-row.epsilon - want).abs() <= tol;
        let mub = if n <= 4 {
            Some(singer_mub_deviation(&singer_unitary(n)?))
        } else {
            None
        };
        let mub_ok = mub.is_none_or(|m| m < 1e-9);
        pass &= ok && mub_ok;
        csv.push_str(&format!("{n},{},{},{}\n", -row.epsilon, row.spread, row.ell4));
        rows.push(json!({
            "n": n,
            "minus_epsilon": -row.epsilon,
            "reference": want,
            "reference_tol": tol,
            "spread": row.spread,
            "ell4": row.ell4,
            "mub_deviation": mub,
            "pass": ok && mub_ok,
        }));
    }
    Ok(Output {
        json: json!({ "singer": rows }),
        csv: Some(csv),
        pass,
    })
}

fn cmd_orbit(
    src: &StateSource,
    t: u32,
    n: Option<usize>,
    samples: Option<usize>,
    seed: u64,
    tol: f64,
) -> Result<Output> {
    let (name, psi) = load_state(src)?;
    if let Some(n) = n {
        if n != psi.n() {
            return Err(Error::Dimension(format!("--n {n} but the state has {} qubits", psi.n())));
        }
    }
    let mode = match samples {
        Some(samples) => OrbitMode::MonteCarlo { samples, seed },
        None => OrbitMode::Exact,
    };
    let est = orbit_frame_potential(&psi, t, mode)?;
    let floor = 1.0 / sym_dim(psi.dim() as u64, t as u64) as f64;
    let slack = tol.max(4.0 * est.stderr);
    Ok(Output {
        json: json!({
            "state": name,
            "n": psi.n(),
            "t": t,
            "mode": serde_json::to_value(mode)?,
            "phi": est.mean,
            "stderr": est.stderr,
            "group_elements": est.samples,
            "phi_design": floor,
        }),
        csv: Some(format!("t,phi,stderr,phi_design\n{t},{},{},{floor}\n", est.mean, est.stderr)),
        pass: est.mean >= floor - slack,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match (cli.format, &out.csv) {
        (Format::Csv, Some(csv)) => csv.clone(),
        (Format::Csv, None) => {
            eprintln!("error: this command has no CSV form; use --format json");
            return ExitCode::from(2);
        }
        (Format::Json, _) => {
            serde_json::to_string_pretty(&out.json).expect("serializable") + "\n"
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if out.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
