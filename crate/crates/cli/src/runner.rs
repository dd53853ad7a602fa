//! One function per subcommand. Each resolves its inputs, runs the
//! experiment, writes the artifacts, prints a one-line result, and returns
//! whether every check passed.

use std::collections::BTreeSet;
use std::sync::Arc;

use clap::Args;
use serde_json::{json, Value};

use urnlab_core::analysis::{
    a_series_closed_form_prefix, a_series_recursive, b_series_recursive, conditional_covariance_mc,
    growth_bound_check, local_time_variance_profile, mc_series_estimate, Regime,
};
use urnlab_core::measure::{ColorId, SparseMeasure};
use urnlab_core::rng::replica_stream;
use urnlab_core::rrt::{RecursiveTree, Vertex};
use urnlab_core::starwalk::{star_limits, StarWalk};
use urnlab_core::{bmc, urn, ErgodicityCertificate, ExactMeasure, Kernel, UrnState};

use crate::config::ExperimentConfig;
use crate::report::{kernel_hash, measure_json, median, num, write_csv, write_json};
use crate::{CliError, CommonArgs, KernelArgs};

fn config_err(field: &'static str, message: impl ToString) -> CliError {
    CliError::Config {
        field,
        message: message.to_string(),
    }
}

fn resolve_kernel(args: &KernelArgs) -> Result<Kernel, CliError> {
    match (&args.kernel, &args.generator) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_err("kernel", format!("{}: {e}", path.display())))?;
            Kernel::parse(&text).map_err(|e| config_err("kernel", e))
        }
        (None, Some(parts)) => {
            let name = &parts[0];
            let mut params = Vec::new();
            for part in &parts[1..] {
                let (k, v) = part.split_once('=').ok_or_else(|| {
                    config_err("generator", format!("expected key=val, got `{part}`"))
                })?;
                params.push((k.to_string(), v.to_string()));
            }
            Kernel::from_generator_params(name, &params).map_err(|e| config_err("generator", e))
        }
        (None, None) => Err(config_err(
            "kernel",
            "provide --kernel FILE or --generator NAME key=val ...",
        )),
        (Some(_), Some(_)) => Err(config_err("kernel", "--kernel conflicts with --generator")),
    }
}

fn parse_measure(field: &'static str, text: &str) -> Result<SparseMeasure, CliError> {
    SparseMeasure::parse(text).map_err(|e| config_err(field, e))
}

fn parse_exact(field: &'static str, text: &str) -> Result<ExactMeasure, CliError> {
    ExactMeasure::parse(text).map_err(|e| config_err(field, e))
}

fn parse_u64_list(field: &'static str, text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|p| p.trim().parse::<u64>().map_err(|e| config_err(field, e)))
        .collect()
}

fn parse_u32_list(field: &'static str, text: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|e| config_err(field, e)))
        .collect()
}

fn fit_certificate(
    kernel: &Kernel,
    probes: u32,
    n_max: usize,
) -> Result<ErgodicityCertificate, CliError> {
    let probe_states = kernel.default_probes(probes);
    Ok(kernel.fit_ergodicity_certificate(&probe_states, &probe_states, n_max)?)
}

// ---------------------------------------------------------------- urn-run

#[derive(Args, Debug)]
pub struct UrnRunArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Initial configuration, e.g. "0:1,1:0.5".
    #[arg(long, default_value = "0:1")]
    pub u0: String,
    #[arg(long, default_value_t = 100_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 1)]
    pub replicas: u64,
    /// Pass threshold on the median l1 distances to the stationary law.
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn urn_run(args: UrnRunArgs) -> Result<bool, CliError> {
    if args.replicas < 1 {
        return Err(config_err("replicas", "need at least one replica"));
    }
    if args.steps < 1 {
        return Err(config_err("steps", "need at least one step"));
    }
    if args.tol <= 0.0 || args.tol.is_nan() {
        return Err(config_err("tol", "tolerance must be positive"));
    }
    let kernel = resolve_kernel(&args.kernel)?;
    let u0 = parse_measure("u0", &args.u0)?;
    let cfg = ExperimentConfig::new("urn-run", args.common.seed)
        .with_kernel(kernel.to_text())
        .with_u0(&args.u0)
        .with_param("steps", args.steps)
        .with_param("replicas", args.replicas)
        .with_param("tol", args.tol);

    let pi = kernel.stationary_default()?;
    let k_hash = kernel_hash(&kernel);
    let kernel = Arc::new(kernel);
    let mut per_replica = Vec::new();
    let mut config_l1s = Vec::new();
    let mut local_l1s = Vec::new();
    let mut trace0_rows: Vec<String> = Vec::new();
    for rep in 0..args.replicas {
        let mut rng = replica_stream(args.common.seed, rep);
        let state = UrnState::init(u0.clone(), kernel.clone())?;
        let trace = state.run(args.steps, &mut rng)?;
        let config_l1 = trace.final_state.normalized_config()?.l1_distance(&pi);
        let shares = SparseMeasure::from_pairs(
            trace
                .local_times()
                .iter()
                .map(|(c, &n)| (c.0, n as f64 / args.steps as f64)),
        )?;
        let local_l1 = shares.l1_distance(&pi);
        per_replica.push(json!({
            "replica": rep,
            "config_l1": num(config_l1),
            "local_l1": num(local_l1),
            "local_share": measure_json(&shares),
        }));
        config_l1s.push(config_l1);
        local_l1s.push(local_l1);
        if rep == 0 {
            trace0_rows = trace
                .draws
                .iter()
                .enumerate()
                .map(|(i, z)| format!("{i},{}", z.0))
                .collect();
        }
    }
    let median_config = median(&config_l1s);
    let median_local = median(&local_l1s);
    let pass = median_config < args.tol && median_local < args.tol;

    let dir = &args.common.out;
    write_csv(dir, "urn_trace.csv", "step,drawn_color", trace0_rows)?;
    write_json(
        dir,
        "urn_summary.json",
        &json!({
            "subcommand": "urn-run",
            "config_hash": cfg.hash(),
            "seed": args.common.seed,
            "kernel_hash": k_hash,
            "steps": args.steps,
            "replicas": args.replicas,
            "tol": num(args.tol),
            "stationary": measure_json(&pi),
            "per_replica": per_replica,
            "median_config_l1": num(median_config),
            "median_local_l1": num(median_local),
            "pass": pass,
        }),
    )?;
    println!(
        "urn-run median_config_l1={median_config:.6} median_local_l1={median_local:.6} pass={pass}"
    );
    Ok(pass)
}

// --------------------------------------------------------- coupling-check

#[derive(Args, Debug)]
pub struct CouplingArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value = "0:1")]
    pub u0: String,
    /// Sequence horizon: the law of (Z_0, ..., Z_h) is enumerated.
    #[arg(long, default_value_t = 3)]
    pub horizon: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn coupling_check(args: CouplingArgs) -> Result<bool, CliError> {
    let kernel = resolve_kernel(&args.kernel)?;
    let u0 = parse_exact("u0", &args.u0)?;
    let cfg = ExperimentConfig::new("coupling-check", args.common.seed)
        .with_kernel(kernel.to_text())
        .with_u0(&args.u0)
        .with_param("horizon", args.horizon);

    let urn_law = urn::exact_law(&u0, &kernel, args.horizon)?;
    let bmc_law = bmc::exact_law(&u0, &kernel, args.horizon)?;
    let rational_inputs = kernel.is_rational_input() && u0.is_rational_input();
    let tv_zero = urn_law.same_law(&bmc_law)?;
    let tv = urn_law.tv(&bmc_law)?;
    let pass = if rational_inputs {
        tv_zero
    } else {
        tv <= 1e-10
    };

    write_json(
        &args.common.out,
        "coupling_report.json",
        &json!({
            "subcommand": "coupling-check",
            "config_hash": cfg.hash(),
            "seed": args.common.seed,
            "kernel_hash": kernel_hash(&kernel),
            "horizon": args.horizon,
            "rational_inputs": rational_inputs,
            "tv_distance": num(tv),
            "tv_exactly_zero": tv_zero,
            "atoms": [urn_law.len(), bmc_law.len()],
            "pass": pass,
        }),
    )?;
    println!("coupling-check tv_distance={tv:e} pass={pass}");
    Ok(pass)
}

// ------------------------------------------------------- covariance-check

#[derive(Args, Debug)]
pub struct CovarianceArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value = "0:1")]
    pub u0: String,
    /// Number of fixed trees to test.
    #[arg(long, default_value_t = 10)]
    pub trees: u64,
    /// Non-root vertices per tree.
    #[arg(long, default_value_t = 20)]
    pub tree_size: usize,
    #[arg(long, default_value_t = 1.0)]
    pub root_weight: f64,
    /// Monte Carlo colorings per vertex pair.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// The color whose indicator covariance is measured.
    #[arg(long, default_value_t = 0)]
    pub color: u32,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn covariance_check(args: CovarianceArgs) -> Result<bool, CliError> {
    if args.tree_size < 3 {
        return Err(config_err("tree-size", "need at least 3 vertices"));
    }
    if args.trees < 1 {
        return Err(config_err("trees", "need at least one tree"));
    }
    let kernel = resolve_kernel(&args.kernel)?;
    let u0 = parse_measure("u0", &args.u0)?;
    let cfg = ExperimentConfig::new("covariance-check", args.common.seed)
        .with_kernel(kernel.to_text())
        .with_u0(&args.u0)
        .with_param("trees", args.trees)
        .with_param("tree_size", args.tree_size)
        .with_param("root_weight", args.root_weight)
        .with_param("samples", args.samples)
        .with_param("color", args.color);

    let cert = fit_certificate(&kernel, 8, 40)?;
    let mut rows = Vec::new();
    let mut all_pass = true;
    let m = args.tree_size;
    // Fixed, representative pairs: adjacent, extremes, and deep siblings.
    let pair_picks: BTreeSet<(usize, usize)> = [(0, 1), (0, m - 1), (m / 2, m - 1), (m - 2, m - 1)]
        .into_iter()
        .collect();
    let mut trace_rows: Vec<String> = Vec::new();
    for i in 0..args.trees {
        // Tree streams live far from the per-sample streams used inside the
        // covariance estimator.
        let mut rng = replica_stream(args.common.seed, 1_000_000 + i);
        let tree = RecursiveTree::grow(args.root_weight, m - 1, &mut rng)?;
        for &(a, b) in &pair_picks {
            let rep = conditional_covariance_mc(
                &tree,
                &kernel,
                &u0,
                &cert,
                Vertex::Node(a),
                Vertex::Node(b),
                ColorId(args.color),
                args.samples,
                args.common.seed,
            )?;
            let pass = rep.within_bound();
            all_pass &= pass;
            rows.push(json!({
                "tree": i,
                "u": rep.u.to_string(),
                "w": rep.w.to_string(),
                "estimate": num(rep.mc_estimate),
                "std_error": num(rep.std_error),
                "bound": num(rep.bound),
                "d_u_lca": rep.d_u_lca,
                "d_w_lca": rep.d_w_lca,
                "pass": pass,
            }));
        }
        if i == 0 {
            // One sampled coloring of the first tree, as a plottable trace.
            let mut rng = replica_stream(args.common.seed, 2_000_000);
            let trace = bmc::run(&tree, &kernel, &u0, &mut rng)?;
            trace_rows = (0..tree.len())
                .map(|j| {
                    let v = Vertex::Node(j);
                    let parent = match tree.parent(v).unwrap() {
                        Some(Vertex::Node(p)) => p as i64,
                        _ => -1,
                    };
                    format!(
                        "{j},{parent},{},{}",
                        tree.depth(v).unwrap(),
                        trace.color(v).unwrap().0
                    )
                })
                .collect();
        }
    }

    let dir = &args.common.out;
    write_csv(
        dir,
        "bmc_trace.csv",
        "vertex_index,parent_index,depth,color",
        trace_rows,
    )?;
    write_json(
        dir,
        "covariance_report.json",
        &json!({
            "subcommand": "covariance-check",
            "config_hash": cfg.hash(),
            "seed": args.common.seed,
            "kernel_hash": kernel_hash(&kernel),
            "certificate": {"c": num(cert.c), "rho": num(cert.rho)},
            "samples": args.samples,
            "pairs": rows,
            "pass": all_pass,
        }),
    )?;
    println!(
        "covariance-check pairs={} rho={:.4} pass={all_pass}",
        args.trees as usize * pair_picks.len(),
        cert.rho
    );
    Ok(all_pass)
}

// ----------------------------------------------------------- growth-check

#[derive(Args, Debug)]
pub struct GrowthArgs {
    /// Offspring decay parameter, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    /// Root weight.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 10_000)]
    pub n_max: usize,
    #[arg(long, default_value_t = 100_000)]
    pub mc_replicas: u64,
    /// Sizes at which the Monte Carlo estimates are compared.
    #[arg(long, default_value = "1,5,20")]
    pub mc_ns: String,
    /// Relative tolerance for the closed-form identity.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn growth_check(args: GrowthArgs) -> Result<bool, CliError> {
    if args.n_max < 1000 {
        return Err(config_err("n-max", "boundedness check needs n_max >= 1000"));
    }
    let mc_ns = parse_u64_list("mc-ns", &args.mc_ns)?;
    if mc_ns.iter().any(|&n| n as usize > args.n_max) {
        return Err(config_err("mc-ns", "sizes must not exceed n_max"));
    }
    let cfg = ExperimentConfig::new("growth-check", args.common.seed)
        .with_param("r", args.r)
        .with_param("t", args.t)
        .with_param("n_max", args.n_max)
        .with_param("mc_replicas", args.mc_replicas)
        .with_param("mc_ns", &args.mc_ns)
        .with_param("tol", args.tol);

    let a_rec = a_series_recursive(args.r, args.t, args.n_max)?;
    let b_rec = b_series_recursive(args.r, args.t, args.n_max)?;
    let a_closed = a_series_closed_form_prefix(args.r, args.t, args.n_max)?;
    let mut max_rel_gap = 0.0f64;
    for (closed, rec) in a_closed.iter().zip(&a_rec.values) {
        let rel = (closed - rec).abs() / rec.max(f64::MIN_POSITIVE);
        max_rel_gap = max_rel_gap.max(rel);
    }
    let identity_pass = max_rel_gap <= args.tol;

    let b_regime = if (args.r - 0.5).abs() <= 1e-12 {
        Regime::BHalf
    } else if args.r > 0.5 {
        Regime::BHigh
    } else {
        Regime::BLow
    };
    let a_report = growth_bound_check(&a_rec, Regime::A)?;
    let b_report = growth_bound_check(&b_rec, b_regime)?;
    let bounded_pass = a_report.is_bounded(2.0) && b_report.is_bounded(2.0);

    let mut mc_rows = Vec::new();
    let mut mc_pass = true;
    for &n in &mc_ns {
        let est = mc_series_estimate(
            args.r,
            args.t,
            n as usize,
            args.mc_replicas,
            args.common.seed,
        )?;
        let a_exact = a_rec.values[n as usize];
        let b_exact = b_rec.values[n as usize];
        let a_z = (est.a_hat - a_exact).abs() / est.a_se.max(1e-12);
        let b_z = (est.b_hat - b_exact).abs() / est.b_se.max(1e-12);
        mc_pass &= a_z <= 3.0 && b_z <= 3.0;
        mc_rows.push(json!({
            "n": n,
            "a_hat": num(est.a_hat), "a_se": num(est.a_se),
            "a_exact": num(a_exact), "a_z": num(a_z),
            "b_hat": num(est.b_hat), "b_se": num(est.b_se),
            "b_exact": num(b_exact), "b_z": num(b_z),
        }));
    }
    let pass = identity_pass && bounded_pass && mc_pass;

    let normalizer = |n: f64| -> f64 {
        match b_regime {
            Regime::BHigh => n.powf(2.0 * args.r),
            Regime::BHalf => n * (n + 1.0).ln(),
            _ => n,
        }
    };
    let series_rows = (1..=args.n_max).map(|n| {
        format!(
            "{n},{},{},{}",
            a_rec.values[n],
            b_rec.values[n],
            b_rec.values[n] / normalizer(n as f64)
        )
    });

    let dir = &args.common.out;
    write_csv(dir, "growth_series.csv", "n,a_n,b_n,ratio", series_rows)?;
    let regime_name = match b_regime {
        Regime::BHigh => "n^{2r}",
        Regime::BHalf => "n log(n+1)",
        _ => "n",
    };
    write_json(
        dir,
        "growth_report.json",
        &json!({
            "subcommand": "growth-check",
            "config_hash": cfg.hash(),
            "seed": args.common.seed,
            "r": num(args.r),
            "t": num(args.t),
            "n_max": args.n_max,
            "identity": {
                "max_rel_gap": num(max_rel_gap),
                "tol": num(args.tol),
                "pass": identity_pass,
            },
            "a_ratios": {
                "normalizer": "n^r",
                "sup": num(a_report.sup_ratio),
                "median": num(a_report.median_ratio),
                "top_decade_max": num(a_report.top_decade_max),
                "bounded": a_report.is_bounded(2.0),
            },
            "b_ratios": {
                "normalizer": regime_name,
                "sup": num(b_report.sup_ratio),
                "median": num(b_report.median_ratio),
                "top_decade_max": num(b_report.top_decade_max),
                "bounded": b_report.is_bounded(2.0),
            },
            "mc": mc_rows,
            "pass": pass,
        }),
    )?;
    println!(
        "growth-check max_rel_gap={max_rel_gap:e} bounded={bounded_pass} mc={mc_pass} pass={pass}"
    );
    Ok(pass)
}

// --------------------------------------------------------- variance-check

#[derive(Args, Debug)]
pub struct VarianceArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value = "0:1")]
    pub u0: String,
    /// The color whose local-time variance is profiled.
    #[arg(long, default_value_t = 0)]
    pub color: u32,
    /// Checkpoints.
    #[arg(long, default_value = "100,1000,10000")]
    pub ns: String,
    #[arg(long, default_value_t = 1000)]
    pub replicas: u64,
    /// Decay rate for the envelope; fitted from the kernel when omitted.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Allowed headroom over the calibrated constant.
    #[arg(long, default_value_t = 2.0)]
    pub slack: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn variance_check(args: VarianceArgs) -> Result<bool, CliError> {
    let ns = parse_u64_list("ns", &args.ns)?;
    let kernel = resolve_kernel(&args.kernel)?;
    let u0 = parse_measure("u0", &args.u0)?;
    let rho = match args.rho {
        Some(r) if r > 0.0 && r < 1.0 => r,
        Some(_) => return Err(config_err("rho", "decay rate must be in (0, 1)")),
        None => fit_certificate(&kernel, 8, 40)?.rho,
    };
    let cfg = ExperimentConfig::new("variance-check", args.common.seed)
        .with_kernel(kernel.to_text())
        .with_u0(&args.u0)
        .with_param("color", args.color)
        .with_param("ns", &args.ns)
        .with_param("replicas", args.replicas)
        .with_param("rho", rho)
        .with_param("slack", args.slack);

    let profile = local_time_variance_profile(
        &kernel,
        &u0,
        ColorId(args.color),
        &ns,
        args.replicas,
        rho,
        args.common.seed,
    )?;
    let pass = profile.is_bounded(args.slack);

    let dir = &args.common.out;
    write_csv(
        dir,
        "variance_points.csv",
        "n,j_hat,b_value,ratio",
        profile
            .points
            .iter()
            .map(|p| format!("{},{},{},{}", p.n, p.j_hat, p.b_value, p.ratio)),
    )?;
    write_json(
        dir,
        "variance_report.json",
        &json!({
            "subcommand": "variance-check",
            "config_hash": cfg.hash(),
            "seed": args.common.seed,
            "kernel_hash": kernel_hash(&kernel),
            "color": args.color,
            "replicas": args.replicas,
            "rho": num(rho),
            "c_prime": num(profile.c_prime),
            "slack": num(args.slack),
            "points": profile.points.iter().map(|p| json!({
                "n": p.n,
                "j_hat": num(p.j_hat),
                "b_value": num(p.b_value),
                "ratio": num(p.ratio),
            })).collect::<Vec<_>>(),
            "pass": pass,
        }),
    )?;
    println!(
        "variance-check c_prime={:.4} max_ratio={:.4} pass={pass}",
        profile.c_prime,
        profile.points.iter().map(|p| p.ratio).fold(0.0, f64::max)
    );
    Ok(pass)
}

// ----------------------------------------------------------- starwalk-run

#[derive(Args, Debug)]
pub struct StarwalkArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Initial vertex weights (total mass delta).
    #[arg(long, default_value = "0:1")]
    pub delta0: String,
    #[arg(long, default_value_t = 100_000)]
    pub steps: u64,
    /// Colors whose weight ratios are tracked in the series.
    #[arg(long, default_value = "0,1,2")]
    pub track: String,
    /// Length of the shared-stream coupling verification, in urn steps.
    #[arg(long, default_value_t = 10_000)]
    pub coupling_steps: u64,
    /// Pass threshold on the final gaps to the limit constants.
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn starwalk_run(args: StarwalkArgs) -> Result<bool, CliError> {
    if args.steps < 1 {
        return Err(config_err("steps", "need at least one step"));
    }
    let track = parse_u32_list("track", &args.track)?;
    let kernel = resolve_kernel(&args.kernel)?;
    let delta0 = parse_measure("delta0", &args.delta0)?;
    let cfg = ExperimentConfig::new("starwalk-run", args.common.seed)
        .with_kernel(kernel.to_text())
        .with_u0(&args.delta0)
        .with_param("steps", args.steps)
        .with_param("track", &args.track)
        .with_param("coupling_steps", args.coupling_steps)
        .with_param("tol", args.tol);

    let pi = kernel.stationary_default()?;
    let (sigma_limit, weight_limits) = star_limits(&pi)?;
    let kernel = Arc::new(kernel);

    // Main run, recording the two normalized series at every step.
    let mut walk = StarWalk::init(delta0.clone(), kernel.clone())?;
    let delta = walk.delta();
    let mut rng = replica_stream(args.common.seed, 0);
    let mut rows = Vec::with_capacity(args.steps as usize);
    let mut final_sigma_ratio = 0.0;
    let mut final_weight_ratios = vec![0.0; track.len()];
    for n in 1..=args.steps {
        walk.step(&mut rng)?;
        let m = walk.updates() as usize;
        let sigma_ratio = if m > 0 {
            walk.sigma()[m - 1] as f64 / (m as f64 + 1.0)
        } else {
            0.0
        };
        let mut row = format!("{n},{sigma_ratio}");
        for (slot, &c) in track.iter().enumerate() {
            let ratio = walk.weights().get(ColorId(c)) / (n as f64 + delta);
            row.push_str(&format!(",{ratio}"));
            final_weight_ratios[slot] = ratio;
        }
        rows.push(row);
        final_sigma_ratio = sigma_ratio;
    }
    let sigma_gap = (final_sigma_ratio - sigma_limit).abs();
    let mut weight_gaps = serde_json::Map::new();
    let mut weight_ratio_final = serde_json::Map::new();
    let mut gaps_ok = sigma_gap < args.tol;
    for (slot, &c) in track.iter().enumerate() {
        let limit = weight_limits.get(ColorId(c));
        let gap = (final_weight_ratios[slot] - limit).abs();
        gaps_ok &= gap < args.tol;
        weight_gaps.insert(c.to_string(), num(gap));
        weight_ratio_final.insert(c.to_string(), num(final_weight_ratios[slot]));
    }

    // Shared-stream coupling: the walk's weights at its update times are the
    // urn, bit for bit, and the update increments decode the urn's draws.
    let coupling = {
        let k = args.coupling_steps;
        let mut walk_rng = replica_stream(args.common.seed, 1);
        let mut walk = StarWalk::init(delta0.clone(), kernel.clone())?;
        while walk.updates() < k {
            walk.step(&mut walk_rng)?;
        }
        let mut urn_rng = replica_stream(args.common.seed, 1);
        let urn_state = UrnState::init(delta0.clone(), kernel.clone())?;
        let trace = urn_state.run(k, &mut urn_rng)?;
        let bitexact = walk.weights().bits_eq(trace.final_state.config());
        let tilde = walk.y().iter().filter(|&&y| y == 1).count() as u64;
        let sigma_k = *walk.sigma().last().expect("k >= 1 updates");
        let sigma_identity = sigma_k == tilde + 2 * (k - tilde);
        let hub_identity = tilde == trace.local_time(ColorId(0));
        (bitexact, sigma_identity, hub_identity)
    };
    let pass = gaps_ok && coupling.0 && coupling.1 && coupling.2;

    let dir = &args.common.out;
    let mut header = String::from("n,sigma_ratio");
    for &c in &track {
        header.push_str(&format!(",ratio_{c}"));
    }
    write_csv(dir, "starwalk_series.csv", &header, rows)?;
    write_json(
        dir,
        "starwalk_report.json",
        &json!({
            "subcommand": "starwalk-run",
            "config_hash": cfg.hash(),
            "seed": args.common.seed,
            "kernel_hash": kernel_hash(kernel.as_ref()),
            "steps": args.steps,
            "delta": num(delta),
            "sigma_limit": num(sigma_limit),
            "sigma_ratio_final": num(final_sigma_ratio),
            "sigma_gap": num(sigma_gap),
            "weight_limits": measure_json(&weight_limits),
            "weight_ratio_final": Value::Object(weight_ratio_final),
            "weight_gaps": Value::Object(weight_gaps),
            "tol": num(args.tol),
            "coupling": {
                "updates": args.coupling_steps,
                "bitexact": coupling.0,
                "sigma_identity": coupling.1,
                "hub_local_time_identity": coupling.2,
            },
            "pass": pass,
        }),
    )?;
    println!(
        "starwalk-run sigma_gap={sigma_gap:.6} coupling_bitexact={} pass={pass}",
        coupling.0
    );
    Ok(pass)
}

// --------------------------------------------------------- ergodicity-fit

#[derive(Args, Debug)]
pub struct ErgodicityArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Largest power probed for the decay fit.
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    /// Number of probe states/colors.
    #[arg(long, default_value_t = 8)]
    pub probes: u32,
    /// Minorization time to check.
    #[arg(long, default_value_t = 1)]
    pub doeblin_n0: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn ergodicity_fit(args: ErgodicityArgs) -> Result<bool, CliError> {
    let kernel = resolve_kernel(&args.kernel)?;
    let cfg = ExperimentConfig::new("ergodicity-fit", args.common.seed)
        .with_kernel(kernel.to_text())
        .with_param("n_max", args.n_max)
        .with_param("probes", args.probes)
        .with_param("doeblin_n0", args.doeblin_n0);

    let pi = kernel.stationary_default()?;
    let cert = fit_certificate(&kernel, args.probes, args.n_max)?;
    let probe_states = kernel.default_probes(args.probes);
    let doeblin = kernel.check_doeblin(args.doeblin_n0, &probe_states)?;

    let dir = &args.common.out;
    write_csv(
        dir,
        "ergodicity_decay.csv",
        "n,sup_error,bound",
        cert.sup_errors.iter().enumerate().map(|(i, &e)| {
            let n = cert.n_range.0 + i;
            format!("{n},{e},{}", cert.c * cert.rho.powi(n as i32))
        }),
    )?;
    write_json(
        dir,
        "ergodicity_report.json",
        &json!({
            "subcommand": "ergodicity-fit",
            "config_hash": cfg.hash(),
            "seed": args.common.seed,
            "kernel_hash": kernel_hash(&kernel),
            "stationary": measure_json(&pi),
            "certificate": {
                "c": num(cert.c),
                "rho": num(cert.rho),
                "n_lo": cert.n_range.0,
                "n_hi": cert.n_range.1,
            },
            "doeblin": match &doeblin {
                Some(d) => json!({
                    "n0": d.n0,
                    "epsilon": num(d.epsilon),
                    "nu": measure_json(&d.nu),
                }),
                None => Value::Null,
            },
            "pass": true,
        }),
    )?;
    println!(
        "ergodicity-fit c={:.4} rho={:.4} doeblin={} pass=true",
        cert.c,
        cert.rho,
        doeblin.is_some()
    );
    Ok(true)
}
