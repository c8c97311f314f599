//! `rswalk`: exact Rudin-Shapiro identities and moments, circle statistics,
//! SU(2) representation matrices, halving-operator spectra, and lacunary
//! walk distributions, from one binary.
//!
//! Reports are JSON (or CSV where a table is the natural shape), carry a
//! `schema_version` field, echo the resolved configuration, and are byte
//! identical for identical configurations. Exit statuses: 0 success,
//! 1 validation error, 2 numerical failure, 3 resource limit.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use rswalk_core::acceptance::{self, Level};
use rswalk_core::circle;
use rswalk_core::halving;
use rswalk_core::rudin_shapiro::{self, RudinShapiroPair};
use rswalk_core::su2;
use rswalk_core::walk::{self, DyadicStepFunction, FiniteGroup, WalkInstance, WalkKind};
use rswalk_core::Error;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "rswalk",
    about = "Rudin-Shapiro polynomials, SU(2) walks, halving-operator spectra and dyadic group walks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format (commands with a natural table shape honor csv).
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Rudin-Shapiro pairs: generation, exact identities, exact moments.
    #[command(subcommand)]
    Rs(RsCommand),
    /// Evaluation at roots of unity and distribution statistics.
    #[command(subcommand)]
    Circle(CircleCommand),
    /// SU(2) irreducible representation matrices.
    #[command(subcommand)]
    Rep(RepCommand),
    /// Halving operators and their spectra.
    #[command(subcommand)]
    Spec(SpecCommand),
    /// Lacunary walks: exact distributions on finite groups, Monte Carlo
    /// matrix walks.
    #[command(subcommand)]
    Walk(WalkCommand),
    /// Run the acceptance suite.
    Accept(AcceptArgs),
}

#[derive(Subcommand)]
enum RsCommand {
    /// Generate the coefficient pair (P_k, Q_k).
    Gen {
        #[arg(long)]
        k: u32,
    },
    /// Check P(z)P(1/z) + Q(z)Q(1/z) = 2^(k+1) exactly.
    Parseval {
        #[arg(long)]
        k: u32,
    },
    /// Exact normalized even moment E |P_k/sqrt(2^(k+1))|^(2n).
    Moments {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
    },
    /// Exact mixed moment E [conj P_k]^n [P_k]^m, normalized.
    Mixed {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
    },
}

#[derive(Subcommand)]
enum CircleCommand {
    /// Evaluate P_k at the N-th roots of unity (csv: index, re, im).
    Eval {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1 << 16)]
        n_points: usize,
    },
    /// Empirical law of the normalized squared modulus against uniform
    /// [0,1] (csv: bin_low, bin_high, mass).
    Saffari {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1 << 16)]
        n_points: usize,
        #[arg(long, default_value_t = 16)]
        bins: usize,
    },
    /// Cell frequencies of the normalized values over the unit disc
    /// (csv: cell_x, cell_y, mass, expected).
    Montgomery {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1 << 16)]
        n_points: usize,
        #[arg(long, default_value_t = 8)]
        grid_size: usize,
    },
    /// Minimum normalized modulus over the grid and where it occurs.
    Min {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1 << 16)]
        n_points: usize,
    },
    /// Residual of the matrix-product factorization of the pair at random
    /// circle points.
    Link {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum RepCommand {
    /// The constant unitary tau (row-major complex pairs).
    Tau {
        #[arg(long)]
        two_ell: i64,
    },
    /// Invertibility margin, diagonal contractions and constrained-pattern
    /// ranks of tau.
    Verify {
        #[arg(long)]
        two_ell: i64,
    },
}

#[derive(Subcommand)]
enum SpecCommand {
    /// Assemble a halving operator and report its shape.
    Build {
        #[arg(long)]
        two_ell: i64,
        #[arg(long)]
        lambda: Option<i64>,
    },
    /// Dense spectrum and spectral radius (csv: two_ell, lambda, dim,
    /// spectral_radius, margin).
    Radius {
        #[arg(long)]
        two_ell: i64,
        #[arg(long)]
        lambda: Option<i64>,
    },
    /// Exact expectation of the representation of the lacunary matrix
    /// product of length k+1.
    Expected {
        #[arg(long)]
        two_ell: i64,
        #[arg(long)]
        k: u32,
    },
    /// Joint moment of the phase power lambda with the representation of
    /// the product.
    Independence {
        #[arg(long)]
        two_ell: i64,
        #[arg(long)]
        lambda: i64,
        #[arg(long)]
        k: u32,
    },
    /// Brute-force symbolic validation of the halving shortcut.
    Crosscheck {
        #[arg(long)]
        two_ell: i64,
        #[arg(long)]
        lambda: i64,
        #[arg(long)]
        k: u32,
    },
}

#[derive(Args, Clone)]
struct WalkInstanceArgs {
    /// Built-in group: z2, or cyclic-N.
    #[arg(long, default_value = "z2")]
    group: String,
    /// Built-in step function preset: five-eighths (the Z/2 map whose
    /// lacunary products stabilize at P(0) = 5/8).
    #[arg(long)]
    preset: Option<String>,
    /// Step function resolution r (table has 2^r entries).
    #[arg(long)]
    resolution: Option<u32>,
    /// Step table, comma separated element indices.
    #[arg(long, value_delimiter = ',')]
    table: Option<Vec<usize>>,
    /// JSON document {order, cayley, identity, labels, resolution, table}
    /// overriding --group/--preset/--table.
    #[arg(long)]
    instance: Option<PathBuf>,
}

#[derive(Subcommand)]
enum WalkCommand {
    /// Exact distribution of f(2^k t) ... f(t) via the sliding-window
    /// chain.
    Exact {
        #[command(flatten)]
        instance: WalkInstanceArgs,
        #[arg(long)]
        k: u32,
    },
    /// Same distribution by enumerating all 2^(k+r) dyadic intervals.
    Brute {
        #[command(flatten)]
        instance: WalkInstanceArgs,
        #[arg(long)]
        k: u32,
    },
    /// Exact total variation distance of the product law from uniform.
    Tv {
        #[command(flatten)]
        instance: WalkInstanceArgs,
        #[arg(long)]
        k: u32,
    },
    /// Monte Carlo statistics of the 2x2 matrix walks (su2-g or u2-g).
    Mc {
        #[arg(long, default_value = "su2-g")]
        kind: String,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct AcceptArgs {
    /// fast trims depths and grid sizes; full runs the complete budgets.
    #[arg(long, default_value = "fast")]
    level: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own usage text; keep the machine-readable
            // reason on one line first
            let kind = e.kind();
            if matches!(
                kind,
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: invalid-argument: {}", first_line(&e.to_string()));
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or("").to_string()
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let output = match &cli.command {
        Command::Rs(cmd) => rs_command(cmd)?,
        Command::Circle(cmd) => circle_command(cmd, cli.format)?,
        Command::Rep(cmd) => rep_command(cmd)?,
        Command::Spec(cmd) => spec_command(cmd, cli.format)?,
        Command::Walk(cmd) => walk_command(cmd)?,
        Command::Accept(args) => return accept_command(args, cli),
    };
    emit(cli, output)?;
    Ok(ExitCode::SUCCESS)
}

enum Output {
    Json(Value),
    Csv(String),
}

fn emit(cli: &Cli, output: Output) -> Result<(), Error> {
    let bytes = match output {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v).expect("report serialization");
            s.push('\n');
            s.into_bytes()
        }
        Output::Csv(s) => s.into_bytes(),
    };
    match &cli.out {
        None => {
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| Error::numerical(format!("write failed: {e}")))?;
        }
        Some(path) => {
            std::fs::write(path, &bytes)
                .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    Ok(())
}

fn report(command: &str, config: Value, payload: Value) -> Value {
    let mut base = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
    });
    if let (Value::Object(base_map), Value::Object(payload_map)) = (&mut base, payload) {
        for (k, v) in payload_map {
            base_map.insert(k, v);
        }
    }
    base
}

fn complex_rows(m: &rswalk_core::nalgebra::DMatrix<Complex64>) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    json!(rows)
}

fn rs_command(cmd: &RsCommand) -> Result<Output, Error> {
    Ok(match cmd {
        RsCommand::Gen { k } => {
            let pair = RudinShapiroPair::generate(*k)?;
            Output::Json(report(
                "rs gen",
                json!({ "k": k }),
                json!({
                    "k": k,
                    "p": pair.p(),
                    "q": pair.q(),
                }),
            ))
        }
        RsCommand::Parseval { k } => {
            let check = rudin_shapiro::parseval_identity_check(*k)?;
            Output::Json(report(
                "rs parseval",
                json!({ "k": k }),
                json!({
                    "k": k,
                    "holds": check.holds,
                    "residual": check.residual.to_string(),
                }),
            ))
        }
        RsCommand::Moments { k, n } => {
            let m = rudin_shapiro::exact_even_moment(*k, *n)?;
            Output::Json(report(
                "rs moments",
                json!({ "k": k, "n": n }),
                json!({
                    "k": k,
                    "n": n,
                    "value": m.value_string(),
                    "value_float": m.to_f64(),
                }),
            ))
        }
        RsCommand::Mixed { k, n, m } => {
            let moment = rudin_shapiro::exact_mixed_moment(*k, *n, *m)?;
            Output::Json(report(
                "rs mixed",
                json!({ "k": k, "n": n, "m": m }),
                json!({
                    "k": k,
                    "n": n,
                    "m": m,
                    "value": moment.value_string(),
                    "value_float": moment.to_f64(),
                    "exact_rational": moment.is_rational(),
                }),
            ))
        }
    })
}

fn circle_command(cmd: &CircleCommand, format: Format) -> Result<Output, Error> {
    Ok(match cmd {
        CircleCommand::Eval { k, n_points } => {
            let grid = circle::eval_at_roots(&RudinShapiroPair::generate(*k)?, *n_points)?;
            if format == Format::Csv {
                let mut s = String::from("index,re,im\n");
                for (i, v) in grid.values.iter().enumerate() {
                    s.push_str(&format!("{i},{},{}\n", v.re, v.im));
                }
                Output::Csv(s)
            } else {
                let mean_square =
                    grid.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / grid.n_points as f64;
                let scale = 2f64.powf((*k as f64 + 1.0) / 2.0);
                let (min, max) = grid.values.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
                    (lo.min(v.norm()), hi.max(v.norm()))
                });
                Output::Json(report(
                    "circle eval",
                    json!({ "k": k, "n_points": n_points }),
                    json!({
                        "k": k,
                        "n_points": n_points,
                        "mean_square": mean_square,
                        "min_modulus": min / scale,
                        "max_modulus": max / scale,
                    }),
                ))
            }
        }
        CircleCommand::Saffari { k, n_points, bins } => {
            let r = circle::saffari_report(*k, *n_points, *bins)?;
            if format == Format::Csv {
                let mut s = String::from("bin_low,bin_high,mass\n");
                for b in &r.bins {
                    s.push_str(&format!("{},{},{}\n", b.low, b.high, b.mass));
                }
                Output::Csv(s)
            } else {
                Output::Json(report(
                    "circle saffari",
                    json!({ "k": k, "n_points": n_points, "bins": bins }),
                    serde_json::to_value(&r).expect("report"),
                ))
            }
        }
        CircleCommand::Montgomery { k, n_points, grid_size } => {
            let r = circle::montgomery_report(*k, *n_points, *grid_size)?;
            if format == Format::Csv {
                let grid = r.disc_grid.as_ref().expect("disc grid present");
                let g = grid.grid_size;
                let mut s = String::from("cell_x,cell_y,mass,expected\n");
                for iy in 0..g {
                    for ix in 0..g {
                        let x0 = -1.0 + 2.0 * ix as f64 / g as f64;
                        let x1 = -1.0 + 2.0 * (ix + 1) as f64 / g as f64;
                        let y0 = -1.0 + 2.0 * iy as f64 / g as f64;
                        let y1 = -1.0 + 2.0 * (iy + 1) as f64 / g as f64;
                        let expected =
                            circle::disc_cell_area(x0, x1, y0, y1) / std::f64::consts::PI;
                        s.push_str(&format!("{ix},{iy},{},{expected}\n", grid.masses[iy * g + ix]));
                    }
                }
                Output::Csv(s)
            } else {
                Output::Json(report(
                    "circle montgomery",
                    json!({ "k": k, "n_points": n_points, "grid_size": grid_size }),
                    serde_json::to_value(&r).expect("report"),
                ))
            }
        }
        CircleCommand::Min { k, n_points } => {
            let r = circle::min_modulus_report(*k, *n_points)?;
            Output::Json(report(
                "circle min",
                json!({ "k": k, "n_points": n_points }),
                serde_json::to_value(&r).expect("report"),
            ))
        }
        CircleCommand::Link { k, samples, seed } => {
            let r = circle::link_check(*k, *samples, *seed)?;
            Output::Json(report(
                "circle link",
                json!({ "k": k, "samples": samples, "seed": seed }),
                serde_json::to_value(&r).expect("report"),
            ))
        }
    })
}

fn rep_command(cmd: &RepCommand) -> Result<Output, Error> {
    Ok(match cmd {
        RepCommand::Tau { two_ell } => {
            let tau = su2::tau_matrix(*two_ell)?;
            Output::Json(report(
                "rep tau",
                json!({ "two_ell": two_ell }),
                json!({
                    "two_ell": two_ell,
                    "dim": tau.dim(),
                    "unitarity_residual": tau.unitarity_residual(),
                    "entries": complex_rows(tau.matrix()),
                }),
            ))
        }
        RepCommand::Verify { two_ell } => {
            let r = su2::verify_propositions(*two_ell)?;
            Output::Json(report(
                "rep verify",
                json!({ "two_ell": two_ell }),
                serde_json::to_value(&r).expect("report"),
            ))
        }
    })
}

fn spec_command(cmd: &SpecCommand, format: Format) -> Result<Output, Error> {
    let build = |two_ell: i64, lambda: Option<i64>| -> Result<halving::HalvingOperator, Error> {
        match lambda {
            None => halving::build_s(two_ell),
            Some(l) => halving::build_s_lambda(two_ell, l),
        }
    };
    Ok(match cmd {
        SpecCommand::Build { two_ell, lambda } => {
            let op = build(*two_ell, *lambda)?;
            let nonzero = op
                .matrix()
                .column_iter()
                .filter(|c| c.iter().any(|x| x.norm() > 0.0))
                .count();
            Output::Json(report(
                "spec build",
                json!({ "two_ell": two_ell, "lambda": lambda }),
                json!({
                    "two_ell": two_ell,
                    "lambda": lambda,
                    "dim": op.dim(),
                    "span_low": op.j_low(),
                    "nonzero_columns": nonzero,
                    "column_norm_deviation": op.max_column_norm_deviation(),
                }),
            ))
        }
        SpecCommand::Radius { two_ell, lambda } => {
            let r = halving::spectral_radius(&build(*two_ell, *lambda)?)?;
            if format == Format::Csv {
                let lambda_field = r.lambda.map(|l| l.to_string()).unwrap_or_default();
                Output::Csv(format!(
                    "two_ell,lambda,dim,spectral_radius,margin\n{},{},{},{},{}\n",
                    r.two_ell, lambda_field, r.dim, r.spectral_radius, r.margin
                ))
            } else {
                Output::Json(report(
                    "spec radius",
                    json!({ "two_ell": two_ell, "lambda": lambda }),
                    serde_json::to_value(&r).expect("report"),
                ))
            }
        }
        SpecCommand::Expected { two_ell, k } => {
            let m = halving::expected_rep(*two_ell, *k)?;
            Output::Json(report(
                "spec expected",
                json!({ "two_ell": two_ell, "k": k }),
                json!({
                    "two_ell": two_ell,
                    "k": k,
                    "max_abs": su2::max_abs(&m),
                    "matrix": complex_rows(&m),
                }),
            ))
        }
        SpecCommand::Independence { two_ell, lambda, k } => {
            let m = halving::independence_moment(*two_ell, *lambda, *k)?;
            Output::Json(report(
                "spec independence",
                json!({ "two_ell": two_ell, "lambda": lambda, "k": k }),
                json!({
                    "two_ell": two_ell,
                    "lambda": lambda,
                    "k": k,
                    "max_abs": su2::max_abs(&m),
                    "matrix": complex_rows(&m),
                }),
            ))
        }
        SpecCommand::Crosscheck { two_ell, lambda, k } => {
            let r = halving::cross_check_symbolic(*two_ell, *lambda, *k)?;
            Output::Json(report(
                "spec crosscheck",
                json!({ "two_ell": two_ell, "lambda": lambda, "k": k }),
                serde_json::to_value(&r).expect("report"),
            ))
        }
    })
}

fn load_instance(args: &WalkInstanceArgs) -> Result<(FiniteGroup, DyadicStepFunction), Error> {
    if let Some(path) = &args.instance {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        let doc: WalkInstance = serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("malformed instance document: {e}")))?;
        return doc.split();
    }
    if let Some(preset) = &args.preset {
        return match preset.as_str() {
            "five-eighths" => Ok(DyadicStepFunction::five_eighths()),
            other => Err(Error::invalid(format!(
                "unknown preset '{other}' (available: five-eighths)"
            ))),
        };
    }
    let group = parse_group(&args.group)?;
    let (Some(resolution), Some(table)) = (args.resolution, args.table.clone()) else {
        return Err(Error::invalid(
            "need --preset, --instance, or both --resolution and --table",
        ));
    };
    let f = DyadicStepFunction::new(resolution, table)?;
    f.validate_for(&group)?;
    Ok((group, f))
}

fn parse_group(name: &str) -> Result<FiniteGroup, Error> {
    if name == "z2" {
        return Ok(FiniteGroup::cyclic(2));
    }
    if let Some(n) = name.strip_prefix("cyclic-") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::invalid(format!("bad cyclic group order in '{name}'")))?;
        if n == 0 || n > 4096 {
            return Err(Error::invalid("cyclic group order must be in 1..=4096"));
        }
        return Ok(FiniteGroup::cyclic(n));
    }
    Err(Error::invalid(format!(
        "unknown group '{name}' (use z2, cyclic-N, or --instance)"
    )))
}

fn walk_config(args: &WalkInstanceArgs, k: u32) -> Value {
    json!({
        "group": args.group,
        "preset": args.preset,
        "resolution": args.resolution,
        "table": args.table,
        "instance": args.instance.as_ref().map(|p| p.display().to_string()),
        "k": k,
    })
}

fn walk_command(cmd: &WalkCommand) -> Result<Output, Error> {
    Ok(match cmd {
        WalkCommand::Exact { instance, k } | WalkCommand::Brute { instance, k } => {
            let (group, f) = load_instance(instance)?;
            let brute = matches!(cmd, WalkCommand::Brute { .. });
            let dist = if brute {
                walk::brute_force_distribution(&group, &f, *k)?
            } else {
                walk::exact_product_distribution(&group, &f, *k)?
            };
            Output::Json(report(
                if brute { "walk brute" } else { "walk exact" },
                walk_config(instance, *k),
                json!({
                    "k": k,
                    "distribution": dist.to_string_map(group.labels()),
                    "tv_distance_to_uniform":
                        rudin_shapiro::format_rational(&dist.tv_distance_to_uniform()),
                }),
            ))
        }
        WalkCommand::Tv { instance, k } => {
            let (group, f) = load_instance(instance)?;
            let dist = walk::exact_product_distribution(&group, &f, *k)?;
            Output::Json(report(
                "walk tv",
                walk_config(instance, *k),
                json!({
                    "k": k,
                    "tv_distance_to_uniform":
                        rudin_shapiro::format_rational(&dist.tv_distance_to_uniform()),
                }),
            ))
        }
        WalkCommand::Mc { kind, k, samples, seed } => {
            let kind: WalkKind = kind.parse()?;
            let stats = walk::monte_carlo_matrix_walk(kind, *k, *samples, *seed)?;
            Output::Json(report(
                "walk mc",
                json!({ "kind": kind, "k": k, "samples": samples, "seed": seed }),
                serde_json::to_value(&stats).expect("report"),
            ))
        }
    })
}

fn accept_command(args: &AcceptArgs, cli: &Cli) -> Result<ExitCode, Error> {
    let level: Level = args.level.parse()?;
    let results = acceptance::run_all(level);
    for r in &results {
        println!("{}", r.summary_line());
    }
    let all_passed = results.iter().all(|r| r.passed);
    let summary = report(
        "accept",
        json!({ "level": args.level }),
        json!({
            "passed": all_passed,
            "criteria": results,
        }),
    );
    if let Some(path) = &cli.out {
        let mut s = serde_json::to_string_pretty(&summary).expect("report");
        s.push('\n');
        std::fs::write(path, s)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
