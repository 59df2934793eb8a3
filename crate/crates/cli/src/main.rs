use clap::{Args, Parser, Subcommand};
use kacgap::intervals::IntervalSet;
use kacgap::C64;
use kacgap_cli::config::RunConfig;
use kacgap_cli::simulate::{read_records, run_simulate};
use kacgap_cli::verify::{run_suite, Suite};
use std::path::PathBuf;
use std::process::ExitCode;

/// Root-gap statistics for random Kac polynomials.
#[derive(Parser)]
#[command(name = "kacgap", version)]
struct Cli {
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread count (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value config file providing run defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials and write one JSONL gap record per trial.
    Simulate(SimulateArgs),
    /// Analyze a results file: KS, moments, histogram, universality.
    Gaps(GapsArgs),
    /// Tabulate the intensity machinery as CSV.
    Intensity(IntensityArgs),
    /// Print c*(K), c* and certified error bounds as JSON.
    Cstar(CstarArgs),
    /// Evaluate the net events exhaustively for one polynomial.
    NetAudit(NetAuditArgs),
    /// Monte Carlo of the net event under exact Gaussian sampling.
    Oracle(OracleArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    law: Option<String>,
    /// Comma-separated degrees.
    #[arg(long)]
    degrees: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    k: Option<f64>,
    /// Interval sets: `id=a:b[,c:d];id2=...`.
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    residual_tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<u32>,
    /// on | off
    #[arg(long)]
    polish: Option<String>,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    gap_cutoff: Option<f64>,
    #[arg(long)]
    out: Option<String>,
    /// Reuse records from an interrupted run with the same config.
    #[arg(long)]
    resume: bool,
}

#[derive(Args)]
struct GapsArgs {
    #[arg(long, name = "IN")]
    r#in: PathBuf,
    /// Second results file for the two-sample universality block.
    #[arg(long)]
    in2: Option<PathBuf>,
    /// Histogram bin edges as intervals `a:b[,c:d...]`.
    #[arg(long, default_value = "0:1,1:2,2:3")]
    u: String,
    #[arg(long, default_value_t = 10.0)]
    k: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct IntensityArgs {
    #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    x_max: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// Comma-separated K values for c*(K).
    #[arg(long, default_value = "1,2,5,10,20")]
    k: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CstarArgs {
    #[arg(long, default_value_t = 10.0)]
    k: f64,
}

#[derive(Args)]
struct NetAuditArgs {
    #[arg(long)]
    degree: u32,
    #[arg(long, default_value_t = 10.0)]
    k: f64,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    /// Interval set `a:b[,c:d...]`.
    #[arg(long, default_value = "0:2")]
    u: String,
    #[arg(long, default_value = "gaussian")]
    law: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Evaluation point, e.g. `0.99+0.12i`.
    #[arg(long)]
    z: String,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value = "0:40")]
    u: String,
    #[arg(long, default_value_t = 200_000)]
    trials: u64,
    #[arg(long, default_value_t = 1.0)]
    widen: f64,
    #[arg(long, default_value_t = 10.0)]
    k: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    /// Write the machine-readable report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_complex(text: &str) -> Result<C64, String> {
    let t = text.trim().trim_end_matches('i');
    // split at the sign of the imaginary part (skip a leading sign).
    let body = &t[1..];
    if let Some(pos) = body.rfind(['+', '-']) {
        let split = pos + 1;
        let re: f64 = t[..split]
            .parse()
            .map_err(|_| format!("bad real part in {text}"))?;
        let im: f64 = t[split..]
            .parse()
            .map_err(|_| format!("bad imaginary part in {text}"))?;
        Ok(C64::new(re, im))
    } else {
        let re: f64 = t
            .parse()
            .map_err(|_| format!("bad complex number {text}"))?;
        Ok(C64::new(re, 0.0))
    }
}

fn build_config(cli: &Cli, args: &SimulateArgs) -> Result<RunConfig, Box<dyn std::error::Error>> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::parse(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(law) = &args.law {
        cfg.law = law.clone();
    }
    if let Some(degrees) = &args.degrees {
        cfg.degrees = degrees
            .split(',')
            .map(|d| d.trim().parse::<u32>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(u) = &args.u {
        cfg.u_sets = RunConfig::parse_u_sets(u)?;
    }
    if let Some(b) = args.beta {
        cfg.beta = b;
    }
    if let Some(v) = args.residual_tol {
        cfg.residual_tol = v;
    }
    if let Some(v) = args.max_iters {
        cfg.max_iters = v;
    }
    if let Some(p) = &args.polish {
        cfg.polish = match p.as_str() {
            "on" => true,
            "off" => false,
            other => return Err(format!("--polish expects on|off, got {other}").into()),
        };
    }
    if let Some(v) = args.r0 {
        cfg.r0 = v;
    }
    if let Some(v) = args.gap_cutoff {
        cfg.gap_cutoff = v;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let cfg = build_config(cli, args)?;
    let summary = run_simulate(&cfg, args.resume)?;
    eprintln!(
        "wrote {} records ({} reused, {} degraded) to {} [config {}]",
        summary.records, summary.reused, summary.degraded, cfg.out, summary.config_hash
    );
    Ok(0)
}

fn cmd_gaps(args: &GapsArgs) -> Result<u8, Box<dyn std::error::Error>> {
    use kacgap::intensity::min_gap_survival;
    use kacgap::stats::*;

    let (header, records) = read_records(&args.r#in)?;
    if records.is_empty() {
        return Err("no records".into());
    }
    let cfg = RunConfig::parse(&header.config)?;
    // Bin edges parse pairwise, without the interval-set merging: touching
    // bins like 0:1,1:2 stay distinct.
    let bins: Vec<(f64, f64)> = args
        .u
        .split(',')
        .map(|part| -> Result<(f64, f64), Box<dyn std::error::Error>> {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| format!("expected a:b in {part}"))?;
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect::<Result<_, _>>()?;

    let sample: Vec<f64> = records.iter().map(|r| r.m_n_scaled).collect();
    let ecdf = EmpiricalCdf::new(sample)?;
    let ks = ks_distance(&ecdf, |s| min_gap_survival(s).unwrap_or(1.0));

    let mut moments = serde_json::Map::new();
    for (id, u) in &cfg.u_sets {
        let counts: Vec<i64> = records
            .iter()
            .map(|r| r.x_counts.get(id).copied().unwrap_or(0))
            .collect();
        let lambda = kacgap::intensity::lambda_k_u(args.k, u)?;
        let rep = factorial_moments(&counts, 3, Some(lambda))?;
        moments.insert(id.clone(), serde_json::to_value(&rep)?);
    }

    let histogram = gap_intensity_histogram(&records, &bins, args.k)?;

    let universality = match &args.in2 {
        Some(path) => {
            let (_, records2) = read_records(path)?;
            let e2 = EmpiricalCdf::new(records2.iter().map(|r| r.m_n_scaled).collect())?;
            serde_json::json!({
                "two_sample_ks": ks_two_sample(&ecdf, &e2),
                "samples": [ecdf.len(), e2.len()],
            })
        }
        None => serde_json::Value::Null,
    };

    let report = serde_json::json!({
        "version": kacgap_cli::VERSION,
        "config_hash": header.config_hash,
        "ks": { "statistic": ks, "samples": ecdf.len() },
        "moments": moments,
        "histogram": histogram,
        "universality": universality,
        "n": records[0].n,
        "finite_n_note": "theory comparisons carry finite-n bias; no convergence rate is asserted",
    });
    let text = serde_json::to_string_pretty(&report)?;
    match &args.report {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(0)
}

fn cmd_intensity(args: &IntensityArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let ks: Vec<f64> = args
        .k
        .split(',')
        .map(|k| k.trim().parse::<f64>())
        .collect::<Result<_, _>>()?;
    let table = kacgap::intensity::build_table(args.x_min, args.x_max, args.step, &ks)?;
    std::fs::write(&args.out, table.to_csv())?;
    eprintln!(
        "wrote {} rows to {}; c* = {:.9e}",
        table.rows.len(),
        args.out.display(),
        table.c_star.value
    );
    Ok(0)
}

fn cmd_cstar(args: &CstarArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let c = kacgap::intensity::c_star();
    let ck = kacgap::intensity::c_star_k(args.k)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "version": kacgap_cli::VERSION,
            "k": args.k,
            "c_star_k": ck,
            "c_star": c.value,
            "tail_bound": c.tail_bound,
            "quad_error": c.quad_error,
            "k_max": c.k_max,
        }))?
    );
    Ok(0)
}

fn cmd_net_audit(cli: &Cli, args: &NetAuditArgs) -> Result<u8, Box<dyn std::error::Error>> {
    use kacgap::net::*;
    use kacgap::polyeval::eval_derivatives;
    use kacgap::rootfinder::{find_roots, SolverOptions};
    use kacgap::sampling::{parse_law, sample_polynomial};
    use rayon::prelude::*;

    let seed = cli.seed.unwrap_or(1);
    let law = parse_law(&args.law)?;
    let poly = sample_polynomial(law, args.degree, seed)?;
    let n = args.degree;
    let grid = NetGrid::new(
        args.k,
        n,
        args.beta,
        (n as f64).powf(DEFAULT_SMOOTH_EXP),
        DEFAULT_NET_CAP,
    )?;
    let u = IntervalSet::parse(&args.u)?;
    let rs = find_roots(&poly, SolverOptions::default())?;

    #[derive(serde::Serialize)]
    struct Fired {
        a: u32,
        b: u32,
        z: C64,
        base: bool,
        plus: bool,
        minus: bool,
        alpha_hat: Option<C64>,
        alpha_prime_hat: Option<C64>,
        nearest_root_to_alpha_hat: Option<f64>,
        nearest_root_to_alpha_prime_hat: Option<f64>,
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()?;
    let rows: Vec<(u64, Vec<Fired>)> = pool.install(|| {
        (0..=grid.m1)
            .into_par_iter()
            .map(|a| {
                let mut smooth = 0u64;
                let mut fired = Vec::new();
                for b in 1..=grid.m2 {
                    let p = grid.point(a, b);
                    if !p.is_smooth {
                        continue;
                    }
                    smooth += 1;
                    let bundle = eval_derivatives(&poly, p.z);
                    let base = event_a_z(&bundle, &p, &u, n, EventVariant::Base);
                    let plus = event_a_z(&bundle, &p, &u, n, EventVariant::Plus);
                    let minus = event_a_z(&bundle, &p, &u, n, EventVariant::Minus);
                    if base || plus || minus {
                        let pred = predict_roots(&bundle).ok();
                        let nearest = |w: C64| {
                            rs.roots
                                .iter()
                                .map(|r| (r - w).norm())
                                .fold(f64::INFINITY, f64::min)
                        };
                        fired.push(Fired {
                            a,
                            b,
                            z: p.z,
                            base,
                            plus,
                            minus,
                            alpha_hat: pred.map(|p| p.alpha_hat),
                            alpha_prime_hat: pred.map(|p| p.alpha_prime_hat),
                            nearest_root_to_alpha_hat: pred.map(|p| nearest(p.alpha_hat)),
                            nearest_root_to_alpha_prime_hat: pred
                                .map(|p| nearest(p.alpha_prime_hat)),
                        });
                    }
                }
                (smooth, fired)
            })
            .collect()
    });
    let smooth_count: u64 = rows.iter().map(|r| r.0).sum();
    let fired: Vec<Fired> = rows.into_iter().flat_map(|r| r.1).collect();

    let max_dist = (n as f64).ln() / kacgap::gap_scale(n);
    let count_pairs = |flag: fn(&Fired) -> bool| {
        let pts: Vec<C64> = fired.iter().filter(|f| flag(f)).map(|f| f.z).collect();
        let mut c = 0u64;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                if (pts[i] - pts[j]).norm() <= max_dist {
                    c += 1;
                }
            }
        }
        c
    };
    let x_plus = count_pairs(|f| f.plus);
    let x_minus = count_pairs(|f| f.minus);

    let report = serde_json::json!({
        "version": kacgap_cli::VERSION,
        "degree": n,
        "seed": seed,
        "law": law.tag(),
        "k": args.k,
        "beta": args.beta,
        "u": u.to_text(),
        "net_points": grid.point_count(),
        "smooth_points": smooth_count,
        "margins": { "inner": grid.margin_inner, "sharp": grid.margin_sharp },
        "fired": fired,
        "x_plus": x_plus,
        "x_minus": x_minus,
        "max_residual": rs.max_residual(),
    });
    std::fs::write(&args.out, serde_json::to_string_pretty(&report)?)?;
    eprintln!(
        "audited {} net points ({} smooth), {} fired; wrote {}",
        grid.point_count(),
        smooth_count,
        fired.len(),
        args.out.display()
    );
    Ok(0)
}

fn cmd_oracle(cli: &Cli, args: &OracleArgs) -> Result<u8, Box<dyn std::error::Error>> {
    use kacgap::gaussian::{prob_a_z_gaussian, OracleOptions};
    let z = parse_complex(&args.z)?;
    let u = IntervalSet::parse(&args.u)?;
    let opts = OracleOptions {
        trials: args.trials,
        seed: cli.seed.unwrap_or(1),
        widen: args.widen,
        ..OracleOptions::default()
    };
    let report = prob_a_z_gaussian(z, &u, args.k, args.n, &opts)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let suite = Suite::parse(&args.suite).ok_or_else(|| {
        format!(
            "unknown suite {} (formulas|roots|events|oracle|stats|all)",
            args.suite
        )
    })?;
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    let report = run_suite(suite);
    report.print_lines();
    if let Some(path) = &args.report {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(if report.passed { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => cmd_simulate(&cli, args),
        Command::Gaps(args) => cmd_gaps(args),
        Command::Intensity(args) => cmd_intensity(args),
        Command::Cstar(args) => cmd_cstar(args),
        Command::NetAudit(args) => cmd_net_audit(&cli, args),
        Command::Oracle(args) => cmd_oracle(&cli, args),
        Command::Verify(args) => cmd_verify(&cli, args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let is_io = e.downcast_ref::<std::io::Error>().is_some();
            ExitCode::from(if is_io { 3 } else { 2 })
        }
    }
}
