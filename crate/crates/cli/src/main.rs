use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eddycorner_cli::commands;
use eddycorner_cli::config::{read_config, DiskGrid, FieldSource, Method, RadiusGrid, RunConfig};
use eddycorner_cli::disk_problem;
use eddycorner_cli::units::{parse_angle, parse_inverse_length, parse_length};
use eddycorner_core::extraction::MomentVariant;
use eddycorner_core::shadow_engine::ChainKind;
use eddycorner_core::singular_functions::PhysicalInputs;
use num_complex::Complex64;

/// Shadow-term singular functions of eddy-current corner problems and their extraction.
#[derive(Parser)]
#[command(name = "eddycorner", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Re-run the configuration stored in an earlier output file instead of a subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output files (default `out`, or the stored one with --config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized sample points.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Build shadow chains, dump them as JSON and as real forms.
    Shadows(ShadowsArgs),
    /// Evaluate a singular series on a polar grid.
    Eval(EvalArgs),
    /// Solve the disk problem with the finite-difference reference solver.
    Solve(SolveArgs),
    /// Sweep the extraction radius and fit error slopes.
    Extract(ExtractArgs),
    /// Compare composite-order partial sums with the solver field near the corner.
    Reconstruct(ReconstructArgs),
    /// Run every acceptance check.
    VerifyAll,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Primal,
    Dual,
}

impl From<Kind> for ChainKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Primal => ChainKind::Primal,
            Kind::Dual => ChainKind::Dual,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    N1OneTerm,
    N1TwoTerms,
    N3,
    N3Diagonal,
}

impl From<Variant> for MomentVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::N1OneTerm => MomentVariant::N1OneTerm,
            Variant::N1TwoTerms => MomentVariant::N1TwoTerms,
            Variant::N3 => MomentVariant::N3,
            Variant::N3Diagonal => MomentVariant::N3Diagonal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Manufactured,
    Solver,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    QuasiDual,
    Moments,
}

#[derive(Args)]
struct Physics {
    /// Conductor opening: radians, `45deg` or `pi/4`.
    #[arg(long, value_parser = parse_angle)]
    omega: Option<f64>,
    /// Skin parameter with unit, e.g. `0.2/m` or `0.1414/mm`.
    #[arg(long, value_parser = parse_inverse_length, conflicts_with_all = ["kappa", "mu0", "sigma"])]
    zeta: Option<f64>,
    /// Angular frequency (with --mu0 and --sigma, SI units).
    #[arg(long, requires_all = ["mu0", "sigma"])]
    kappa: Option<f64>,
    #[arg(long, requires_all = ["kappa", "sigma"])]
    mu0: Option<f64>,
    #[arg(long, requires_all = ["kappa", "mu0"])]
    sigma: Option<f64>,
}

#[derive(Args)]
struct Disk {
    /// Disk radius with unit.
    #[arg(long, value_parser = parse_length, default_value = "50mm")]
    r_domain: f64,
    #[arg(long, default_value_t = disk_problem::GRID)]
    n_r: usize,
    #[arg(long, default_value_t = disk_problem::GRID)]
    n_theta: usize,
    /// Innermost ring over the disk radius.
    #[arg(long, default_value_t = disk_problem::R_MIN_REL)]
    r_min_rel: f64,
}

#[derive(Args)]
struct Sweep {
    /// Largest extraction radius with unit (default 0.4 of the domain radius).
    #[arg(long, value_parser = parse_length)]
    r_max: Option<f64>,
    /// Smallest extraction radius with unit (default 1e-4 of the domain radius).
    #[arg(long, value_parser = parse_length)]
    r_min: Option<f64>,
    #[arg(long, default_value_t = 20)]
    count: usize,
}

#[derive(Args)]
struct ShadowsArgs {
    /// Comma-separated leading exponents.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    k: Vec<i32>,
    #[arg(long, value_enum, default_value = "primal")]
    kind: Kind,
    /// Chain depth.
    #[arg(long = "J", default_value_t = 1)]
    depth: usize,
    #[arg(long, value_parser = parse_angle, default_value = "pi/4")]
    omega: f64,
    /// Parities to render (default both).
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<u8>>,
    /// Check residuals, transmission, degree bounds and the first-shadow real forms.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_delimiter = ',', default_value = "0")]
    k: Vec<i32>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<u8>>,
    #[arg(long, value_enum, default_value = "primal")]
    kind: Kind,
    /// Truncation order.
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[command(flatten)]
    physics: Physics,
    #[arg(long, value_parser = parse_length, default_value = "1m")]
    r_max: f64,
    #[arg(long, value_parser = parse_length, default_value = "1mm")]
    r_min: f64,
    #[arg(long, default_value_t = 20)]
    n_r: usize,
    #[arg(long, default_value_t = 64)]
    n_theta: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    physics: Physics,
    #[command(flatten)]
    disk: Disk,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long, value_enum, default_value = "manufactured")]
    source: Source,
    #[arg(long, value_enum, default_value = "quasi-dual")]
    method: MethodArg,
    /// Quasi-dual orders.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    m: Vec<usize>,
    /// Largest k extracted.
    #[arg(long, default_value_t = 2)]
    k_max: i32,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    p: Vec<u8>,
    #[arg(long, value_enum, default_value = "n1-two-terms")]
    variant: Variant,
    /// Manufactured coefficient `k,p,re[,im]`; repeatable (default 0,0,1 1,0,2 2,0,-0.5).
    #[arg(long = "lambda", value_parser = parse_lambda)]
    lambdas: Vec<(i32, u8, Complex64)>,
    /// Order of the manufactured series.
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Radius of the reference functionals for solver fields.
    #[arg(long, value_parser = parse_length, default_value = "0.05mm")]
    r_small: f64,
    #[command(flatten)]
    physics: Physics,
    #[command(flatten)]
    disk: Disk,
    #[command(flatten)]
    sweep: Sweep,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Highest composite order.
    #[arg(long, default_value_t = 3)]
    order: usize,
    #[arg(long, value_parser = parse_length, default_value = "0.05mm")]
    r_small: f64,
    /// Largest radius written.
    #[arg(long, value_parser = parse_length, default_value = "5mm")]
    r_max: f64,
    /// Smallest radius written.
    #[arg(long, value_parser = parse_length, default_value = "0.005mm")]
    r_min: f64,
    /// Angles written per ring.
    #[arg(long, default_value_t = 128)]
    angles: usize,
    #[command(flatten)]
    physics: Physics,
    #[command(flatten)]
    disk: Disk,
}

fn parse_lambda(s: &str) -> Result<(i32, u8, Complex64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(format!("expected k,p,re[,im], got '{s}'"));
    }
    let k = parts[0].parse().map_err(|_| format!("bad k in '{s}'"))?;
    let p = parts[1].parse().map_err(|_| format!("bad p in '{s}'"))?;
    let re = parts[2]
        .parse()
        .map_err(|_| format!("bad real part in '{s}'"))?;
    let im = parts
        .get(3)
        .map_or(Ok(0.0), |v| v.parse())
        .map_err(|_| format!("bad imaginary part in '{s}'"))?;
    Ok((k, p, Complex64::new(re, im)))
}

/// Physics of a command, with defaults for when nothing is given.
fn apply_physics(cfg: &mut RunConfig, ph: &Physics, omega: f64, zeta: f64) {
    cfg.omega = ph.omega.unwrap_or(omega);
    cfg.zeta = ph.zeta.unwrap_or(zeta);
    if let (Some(kappa), Some(mu0), Some(sigma)) = (ph.kappa, ph.mu0, ph.sigma) {
        cfg.physical = Some(PhysicalInputs { kappa, mu0, sigma });
        cfg.zeta = (kappa * mu0 * sigma / 4.0).sqrt();
    }
}

fn disk(d: &Disk) -> DiskGrid {
    DiskGrid {
        r_domain: d.r_domain,
        n_r: d.n_r,
        n_theta: d.n_theta,
        r_min_rel: d.r_min_rel,
    }
}

type Run = fn(&RunConfig) -> commands::Outcome;

fn dispatch(command: &str) -> Option<Run> {
    Some(match command {
        "shadows" => commands::shadows,
        "eval" => commands::eval,
        "solve" => commands::solve,
        "extract" => commands::extract,
        "reconstruct" => commands::reconstruct,
        "verify-all" => commands::verify_all,
        _ => return None,
    })
}

fn build(cli: Cli) -> Result<(RunConfig, Run), String> {
    if let Some(path) = &cli.config {
        let mut cfg = read_config(path)?;
        if let Some(out) = cli.out {
            cfg.out_dir = out;
        }
        let run = dispatch(&cfg.command)
            .ok_or_else(|| format!("unknown command '{}' in {}", cfg.command, path.display()))?;
        return Ok((cfg, run));
    }
    let command = cli.command.ok_or("a subcommand or --config is required")?;
    let mut cfg = RunConfig::new(
        "",
        disk_problem::OMEGA,
        0.0,
        cli.out.unwrap_or_else(|| PathBuf::from("out")),
        cli.seed,
    );
    let run: Run = match command {
        Command::Shadows(a) => {
            cfg.command = "shadows".into();
            cfg.omega = a.omega;
            cfg.k = a.k;
            cfg.p = a.p.unwrap_or_default();
            cfg.kind = Some(a.kind.into());
            cfg.depth = Some(a.depth);
            cfg.verify = a.verify;
            commands::shadows
        }
        Command::Eval(a) => {
            cfg.command = "eval".into();
            apply_physics(&mut cfg, &a.physics, disk_problem::OMEGA, 0.0);
            cfg.k = a.k;
            cfg.p = a.p.unwrap_or_default();
            cfg.kind = Some(a.kind.into());
            cfg.m = vec![a.m];
            cfg.radii = Some(RadiusGrid {
                r_max: a.r_max,
                r_min: a.r_min,
                count: a.n_r,
            });
            cfg.n_theta = Some(a.n_theta);
            commands::eval
        }
        Command::Solve(a) => {
            cfg.command = "solve".into();
            apply_physics(
                &mut cfg,
                &a.physics,
                disk_problem::OMEGA,
                disk_problem::zeta(),
            );
            cfg.disk = Some(disk(&a.disk));
            commands::solve
        }
        Command::Extract(a) => {
            cfg.command = "extract".into();
            let solver = matches!(a.source, Source::Solver);
            let (zeta, r_domain) = if solver {
                (disk_problem::zeta(), a.disk.r_domain)
            } else {
                (0.2, 1.0)
            };
            apply_physics(&mut cfg, &a.physics, disk_problem::OMEGA, zeta);
            cfg.source = Some(if solver {
                FieldSource::Solver
            } else {
                FieldSource::Manufactured
            });
            cfg.method = Some(match a.method {
                MethodArg::QuasiDual => Method::QuasiDual,
                MethodArg::Moments => Method::Moments,
            });
            cfg.m = a.m;
            cfg.k = (0..=a.k_max).collect();
            cfg.p = a.p;
            cfg.radii = Some(RadiusGrid {
                r_max: a.sweep.r_max.unwrap_or(0.4 * r_domain),
                r_min: a.sweep.r_min.unwrap_or(1e-4 * r_domain),
                count: a.sweep.count,
            });
            if solver {
                cfg.disk = Some(disk(&a.disk));
                cfg.r_small = Some(a.r_small);
            } else {
                cfg.order = Some(a.order);
                cfg.lambdas = if a.lambdas.is_empty() {
                    vec![
                        (0, 0, Complex64::new(1.0, 0.0)),
                        (1, 0, Complex64::new(2.0, 0.0)),
                        (2, 0, Complex64::new(-0.5, 0.0)),
                    ]
                } else {
                    a.lambdas
                };
            }
            if matches!(a.method, MethodArg::Moments) {
                cfg.variant = Some(a.variant.into());
                cfg.m.clear();
            }
            commands::extract
        }
        Command::Reconstruct(a) => {
            cfg.command = "reconstruct".into();
            apply_physics(
                &mut cfg,
                &a.physics,
                disk_problem::OMEGA,
                disk_problem::zeta(),
            );
            cfg.disk = Some(disk(&a.disk));
            cfg.order = Some(a.order);
            cfg.r_small = Some(a.r_small);
            cfg.radii = Some(RadiusGrid {
                r_max: a.r_max,
                r_min: a.r_min,
                count: 2,
            });
            cfg.n_theta = Some(a.angles);
            commands::reconstruct
        }
        Command::VerifyAll => {
            cfg.command = "verify-all".into();
            commands::verify_all
        }
    };
    Ok((cfg, run))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (cfg, run) = match build(cli).and_then(|b| b.0.validate().map(|()| b)) {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    #[test]
    fn argument_definitions() {
        super::Cli::command().debug_assert();
    }
}
