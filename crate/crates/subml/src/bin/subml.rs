//! Command-line front end: threshold solving, BER and complexity sweeps
//! with CSV/SVG output, and analytic self-checks.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use subml::analytics::{self, MimoBoundParams, SisoErrorParams};
use subml::channel::ChannelMode;
use subml::constellation::{Constellation, Scheme, VectorConstellation, PAIR_SCAN_CAP};
use subml::error::Error;
use subml::harness::{self, LinkConfig, TargetRule};
use subml::plot;
use subml::report::{self, RunManifest};
use subml::solver::{self, BetaSolution, Branch, SisoCurve, SolverConfig};
use subml::special::{erfc, qfunc};

#[derive(Parser)]
#[command(name = "subml", version, about = "Reduced-complexity ML detection experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invert a target error probability into the distance threshold beta.
    SolveBeta(SolveBetaArgs),
    /// BER-vs-SNR Monte Carlo sweep (CSV, optional SVG).
    BerSweep(SweepArgs),
    /// Search-complexity-vs-SNR Monte Carlo sweep (CSV, optional SVG).
    ComplexitySweep(SweepArgs),
    /// Run analytic/oracle self-checks and print a pass/fail table.
    Validate {
        /// Skip the million-trial statistical checks.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args)]
struct SolveBetaArgs {
    /// Modulation: bpsk, pam4, or qam<M>.
    #[arg(long = "mod")]
    modulation: String,
    /// Es/N0 in dB.
    #[arg(long)]
    snr_db: f64,
    /// Target rule: pmin-factor:<c> or abs:<p>.
    #[arg(long)]
    target: String,
    /// Invert the MIMO union bound for an NtxNr system instead of the
    /// per-component curve.
    #[arg(long)]
    mimo: Option<String>,
    /// Root branch: lower or upper.
    #[arg(long, default_value = "lower")]
    branch: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Config file with key = value lines (flags override it).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "mod")]
    modulation: Option<String>,
    /// Antennas as NtxNr, e.g. 2x2.
    #[arg(long)]
    mimo: Option<String>,
    /// Channel mode: identity or rayleigh.
    #[arg(long)]
    channel: Option<String>,
    /// Target rule: pmin-factor:<c> or abs:<p>.
    #[arg(long)]
    target: Option<String>,
    /// SNR grid as start:stop:step in dB.
    #[arg(long)]
    snr_db_range: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    branch: Option<String>,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG output path.
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Infeasible { .. } | Error::TargetUnreachable { .. } => 2,
        Error::NoConvergence { .. } => 3,
        Error::ConfigParse { .. } => 4,
        Error::SweepAborted { .. } => 5,
        _ => 1,
    }
}

fn parse_branch(s: &str) -> Result<Branch, Error> {
    match s {
        "lower" => Ok(Branch::Lower),
        "upper" => Ok(Branch::Upper),
        _ => Err(Error::ConfigParse {
            line: 0,
            message: format!("unknown branch '{s}'"),
        }),
    }
}

fn print_solution(sol: &BetaSolution, d_min: f64) {
    println!("beta = {}", sol.beta);
    println!("d_min = {d_min}");
    println!("beta / d_min = {}", sol.beta / d_min);
    println!("target_p = {}", sol.target_p);
    println!("residual = {:e}", sol.residual);
    println!("iterations = {}", sol.iterations);
    println!("branch = {}", sol.branch.name());
    println!("converged = {}", sol.converged);
}

fn cmd_solve_beta(args: &SolveBetaArgs) -> Result<(), Error> {
    let (scheme, m) = report::parse_modulation(&args.modulation)?;
    let branch = parse_branch(&args.branch)?;
    let target = report::parse_target(&args.target)?;
    let n0 = LinkConfig::n0(args.snr_db);
    let solver_cfg = SolverConfig {
        branch,
        ..Default::default()
    };
    if let Some(mimo) = &args.mimo {
        let (nt, nr) = report::parse_mimo(mimo)?;
        let c = Constellation::build(scheme, m)?;
        let v = VectorConstellation::uniform(c, nt)?;
        let pair_distances: Vec<f64> = v
            .pairwise_distances(PAIR_SCAN_CAP)?
            .into_iter()
            .map(|(_, _, d)| d)
            .collect();
        let b = MimoBoundParams {
            nr,
            n0,
            pair_distances,
            ms: vec![m; nt],
        };
        let d_min = v.d_min();
        let target_p = match target {
            // reference level: the bound evaluated at the ML boundary
            TargetRule::FactorOfPmin(f) => f * (solver::g_mimo(d_min / 2.0, 0.0, &b)?),
            TargetRule::Absolute(p) => p,
        };
        let sol = solver::solve_beta_mimo(&b, target_p, &solver_cfg)?;
        print_solution(&sol, d_min);
    } else {
        let c = Constellation::build(scheme, m)?;
        let curve = SisoCurve::new(scheme, m, c.d_min(), n0);
        let target_p = match target {
            TargetRule::FactorOfPmin(f) => f * curve.ber(curve.d_min / 2.0),
            TargetRule::Absolute(p) => p,
        };
        let sol = solver::solve_beta_siso(&curve, target_p, &solver_cfg)?;
        print_solution(&sol, c.d_min());
    }
    Ok(())
}

fn build_link_config(args: &SweepArgs) -> Result<LinkConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::ConfigParse {
                line: 0,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            report::parse_config(&text)?
        }
        None => {
            let missing = |key: &str| Error::ConfigParse {
                line: 0,
                message: format!("missing --{key} (or use --config)"),
            };
            let modulation = args.modulation.as_ref().ok_or_else(|| missing("mod"))?;
            let (scheme, m) = report::parse_modulation(modulation)?;
            let target = report::parse_target(
                args.target.as_ref().ok_or_else(|| missing("target"))?,
            )?;
            let snr = report::parse_snr_range(
                args.snr_db_range
                    .as_ref()
                    .ok_or_else(|| missing("snr-db-range"))?,
            )?;
            LinkConfig {
                scheme,
                m,
                nt: 1,
                nr: 1,
                channel_mode: ChannelMode::Identity,
                snr_grid_db: snr,
                target,
                trials: 100_000,
                master_seed: 0,
                branch: Branch::Lower,
            }
        }
    };
    // flags override the config file
    if args.config.is_some() {
        if let Some(modulation) = &args.modulation {
            let (scheme, m) = report::parse_modulation(modulation)?;
            cfg.scheme = scheme;
            cfg.m = m;
        }
        if let Some(target) = &args.target {
            cfg.target = report::parse_target(target)?;
        }
        if let Some(snr) = &args.snr_db_range {
            cfg.snr_grid_db = report::parse_snr_range(snr)?;
        }
    }
    if let Some(mimo) = &args.mimo {
        let (nt, nr) = report::parse_mimo(mimo)?;
        cfg.nt = nt;
        cfg.nr = nr;
    }
    if let Some(channel) = &args.channel {
        cfg.channel_mode = match channel.as_str() {
            "identity" => ChannelMode::Identity,
            "rayleigh" => ChannelMode::Rayleigh,
            other => {
                return Err(Error::ConfigParse {
                    line: 0,
                    message: format!("unknown channel mode '{other}'"),
                })
            }
        };
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(branch) = &args.branch {
        cfg.branch = parse_branch(branch)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_sweep(args: &SweepArgs, complexity: bool) -> Result<(), Error> {
    let cfg = build_link_config(args)?;
    let points = if complexity {
        harness::run_complexity_sweep(&cfg)?
    } else {
        harness::run_ber_sweep(&cfg)?
    };
    let manifest = RunManifest::new(cfg);
    let csv = report::to_csv(&manifest, &points);
    match &args.out {
        Some(path) => std::fs::write(path, &csv).map_err(|e| Error::ConfigParse {
            line: 0,
            message: format!("cannot write {}: {e}", path.display()),
        })?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.plot {
        let svg = if complexity {
            plot::complexity_plot(&points)
        } else {
            plot::ber_plot(&points)
        };
        std::fs::write(path, svg).map_err(|e| Error::ConfigParse {
            line: 0,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
    }
    Ok(())
}

struct Validator {
    failures: usize,
}

impl Validator {
    fn check(&mut self, name: &str, ok: bool) {
        println!("{} {}", if ok { "PASS" } else { "FAIL" }, name);
        if !ok {
            self.failures += 1;
        }
    }
}

/// erfc via direct numerical integration of the Gaussian tail (Simpson on
/// a truncated interval); slow but independent of the library routine.
fn erfc_quadrature(x: f64) -> f64 {
    let upper = x + 40.0;
    let n = 40_000usize;
    let h = (upper - x) / n as f64;
    let f = |t: f64| (-t * t).exp();
    let mut s = f(x) + f(upper);
    for i in 1..n {
        let t = x + i as f64 * h;
        s += f(t) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0 * 2.0 / std::f64::consts::PI.sqrt()
}

fn cmd_validate(quick: bool) -> Result<(), Error> {
    let mut v = Validator { failures: 0 };

    v.check("erfc(0) = 1", (erfc(0.0) - 1.0).abs() < 1e-15);
    v.check("erfc(10) < 1e-44", erfc(10.0) < 1e-44);
    let mut ok = true;
    for i in 0..=40 {
        let x = i as f64 * 0.25;
        if (erfc(x) + erfc(-x) - 2.0).abs() > 1e-12 {
            ok = false;
        }
    }
    v.check("erfc reflection identity", ok);
    let mut ok = true;
    for x in [0.1, 0.5, 1.0, 2.0, 3.5] {
        let q = erfc_quadrature(x);
        if ((erfc(x) - q) / q).abs() > 1e-9 {
            ok = false;
        }
    }
    v.check("erfc vs quadrature oracle", ok);
    v.check("qfunc(0) = 1/2", (qfunc(0.0) - 0.5).abs() < 1e-15);
    v.check(
        "qfunc symmetry",
        (qfunc(1.3) + qfunc(-1.3) - 1.0).abs() < 1e-14,
    );

    let d = 2.0 / 10.0f64.sqrt();
    let mut ok = true;
    for i in 1..10 {
        let p = SisoErrorParams::new(d, 0.1, d * i as f64 / 20.0);
        if (analytics::ser_mqam(16, &p) - analytics::ser_qam16(&p)).abs() > 1e-15 {
            ok = false;
        }
        let mirrored = SisoErrorParams::new(d, 0.1, d - p.beta);
        if (analytics::ser_qam16(&p) - analytics::ser_qam16(&mirrored)).abs() > 1e-15 {
            ok = false;
        }
        let u = 0.5 * erfc(p.beta / 0.1f64.sqrt());
        let w = 0.5 * erfc((d - p.beta) / 0.1f64.sqrt());
        let expanded = 1.5 * (u + w) - 9.0 / 16.0 * (u + w) * (u + w);
        if (analytics::ser_qam16_exact(&p) - expanded).abs() > 1e-14 {
            ok = false;
        }
    }
    v.check("16-QAM error-curve identities", ok);

    let mut ok = true;
    for m in [4usize, 16, 64] {
        let c = Constellation::build(Scheme::Qam, m)?;
        let total: usize = (0..m).map(|i| c.neighbor_count(i, 1e-9)).sum();
        if (total as f64 / m as f64 - analytics::avg_nearest_neighbors(m)).abs() > 1e-12 {
            ok = false;
        }
    }
    v.check("nearest-neighbor counts", ok);

    let mut ok = true;
    for nr in [1usize, 2, 4] {
        let ratio = analytics::pairwise_error_prob(1e4, nr) * (4.0 * 1e4f64).powi(nr as i32)
            / analytics::binomial(2 * nr - 1, nr);
        if (ratio - 1.0).abs() > 0.01 {
            ok = false;
        }
    }
    v.check("pairwise error probability asymptote", ok);

    let curve = SisoCurve::new(Scheme::Qam, 16, d, LinkConfig::n0(10.0));
    let target = 2.0 * curve.ber(curve.d_min / 2.0);
    let sol = solver::solve_beta_siso(&curve, target, &SolverConfig::default())?;
    v.check(
        "solver residual and bracket",
        sol.converged && sol.residual <= 1e-12 && sol.beta > 0.0 && sol.beta < d / 2.0,
    );
    let upper = solver::solve_beta_siso(
        &curve,
        target,
        &SolverConfig {
            branch: Branch::Upper,
            ..Default::default()
        },
    )?;
    v.check(
        "solver branch symmetry",
        (upper.beta - (d - sol.beta)).abs() < 1e-10,
    );

    if !quick {
        use rand::Rng;
        use subml::channel::{Role, SeedPolicy};
        use subml::detectors::null_region_1d;
        // BPSK null-region detector vs the closed form, one million trials
        let n0 = LinkConfig::n0(6.0);
        let beta = 0.6;
        let analytic = 0.25 * erfc((2.0 - beta) / n0.sqrt()) + 0.25 * erfc(beta / n0.sqrt());
        let seed = SeedPolicy::new(123);
        let trials = 1_000_000u64;
        let sigma = (n0 / 2.0).sqrt();
        let levels = [-1.0, 1.0];
        let mut errors = 0u64;
        for trial in 0..trials {
            let mut rng = seed.stream(trial, Role::Noise);
            let sent = usize::from(rng.gen::<bool>());
            let y = levels[sent] + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);
            let mut tie = seed.stream(trial, Role::Tie);
            if null_region_1d(y, &levels, beta, &mut tie) != sent {
                errors += 1;
            }
        }
        let hat = errors as f64 / trials as f64;
        let se = (analytic * (1.0 - analytic) / trials as f64).sqrt();
        v.check(
            "BPSK null-region Monte Carlo vs closed form",
            (hat - analytic).abs() < 4.0 * se,
        );
    }

    if v.failures > 0 {
        eprintln!("{} check(s) failed", v.failures);
        std::process::exit(1);
    }
    Ok(())
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("SUBML_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::SolveBeta(args) => cmd_solve_beta(args),
        Cmd::BerSweep(args) => cmd_sweep(args, false),
        Cmd::ComplexitySweep(args) => cmd_sweep(args, true),
        Cmd::Validate { quick } => cmd_validate(*quick),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
