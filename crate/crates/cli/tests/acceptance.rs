//! Release gate: eleven numbered end-to-end criteria.
//!
//! Each test prints exactly one `criterion-NN <name>: PASS/FAIL (...)` line
//! (visible with `cargo test --test acceptance -- --nocapture`) and then
//! asserts the criterion. Tolerances, step counts, and seeds are pinned
//! here; the master seed equals the binary's default so every number can be
//! reproduced from the command line.
//!
//! Criteria 2 and 3 are expected to fail: the two-state kernel they pin has
//! second eigenvalue 0.7, so the normalized configuration and the local-time
//! shares approach their limits like `n^(0.7-1) = n^(-0.3)`, and even the
//! noise-free mean recursion sits farther from the limit at `n = 1e5` than
//! the thresholds allow. The assertion messages carry the measured values;
//! README's "Known failing checks" section has the full analysis.

use std::sync::Arc;
use std::time::Instant;

use urnlab_core::analysis::{self, Regime};
use urnlab_core::rng::replica_stream;
use urnlab_core::rrt::{RecursiveTree, Vertex};
use urnlab_core::starwalk::StarWalk;
use urnlab_core::{bmc, urn, ColorId, ExactMeasure, Kernel, SparseMeasure, UrnState};

/// Master seed, equal to the binary's `--seed` default.
const SEED: u64 = 20_260_814;

const TWO_STATE_TEXT: &str = "kernel explicit 2\n0 0 0.9\n0 1 0.1\n1 0 0.2\n1 1 0.8\n";

fn two_state_kernel() -> Kernel {
    Kernel::from_rows(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap()
}

fn point_mass_u0() -> SparseMeasure {
    SparseMeasure::point_mass(ColorId(0), 1.0).unwrap()
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn verdict(name: &str, pass: bool, detail: &str) -> bool {
    println!("{name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    pass
}

/// Criterion 1: the urn draw-sequence law and the branching-chain law in
/// attachment order agree atom-by-atom on six configurations spanning 2-4
/// colors, t in {1, 2, 1/2}, and horizons 1-4 — exactly (TV = 0) for
/// rational inputs, within 1e-10 for the float-built kernel.
#[test]
fn criterion_01_exact_law_coupling() {
    let started = Instant::now();
    let flip = Kernel::parse("kernel explicit 2\n0 1 1\n1 0 1\n").unwrap();
    let three_color = Kernel::parse(
        "kernel explicit 3\n0 0 1/2\n0 1 1/4\n0 2 1/4\n1 0 1/3\n1 1 1/3\n1 2 1/3\n2 1 1/2\n2 2 1/2\n",
    )
    .unwrap();
    let cyclic = Kernel::parse("kernel explicit 4\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n").unwrap();
    let star = Kernel::from_generator_params(
        "star-walk",
        &[("p".to_string(), "1/2,3/10,1/5".to_string())],
    )
    .unwrap();
    let configs: Vec<(&str, Kernel, &str, usize)> = vec![
        ("flip t=1 h=4", flip, "0:1", 4),
        (
            "identity t=2 h=3",
            Kernel::identity(2).unwrap(),
            "0:1,1:1",
            3,
        ),
        ("three-color t=1/2 h=3", three_color, "0:1/4,1:1/4", 3),
        ("cyclic t=1 h=2", cyclic, "0:1", 2),
        ("two-state float t=1 h=4", two_state_kernel(), "0:1", 4),
        ("star t=1 h=3", star, "0:1", 3),
    ];
    let mut worst_tv = 0.0f64;
    let mut all_agree = true;
    for (label, kernel, u0_text, horizon) in &configs {
        let u0 = ExactMeasure::parse(u0_text).unwrap();
        let urn_law = urn::exact_law(&u0, kernel, *horizon).unwrap();
        let bmc_law = bmc::exact_law(&u0, kernel, *horizon).unwrap();
        let tv = urn_law.tv(&bmc_law).unwrap();
        worst_tv = worst_tv.max(tv);
        let exact_mode = kernel.is_rational_input() && u0.is_rational_input();
        let agree = if exact_mode {
            urn_law.same_law(&bmc_law).unwrap()
        } else {
            tv <= 1e-10
        };
        if !agree {
            eprintln!("  disagreement on `{label}`: tv = {tv:e}");
            all_agree = false;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = all_agree && elapsed < 10.0;
    verdict(
        "criterion-01 exact-law-coupling",
        pass,
        &format!(
            "{} configurations, worst tv {worst_tv:.1e}, {elapsed:.2}s < 10s",
            configs.len()
        ),
    );
    assert!(
        pass,
        "every configuration must give identical urn and branching-chain laws \
         (worst tv {worst_tv:e}, elapsed {elapsed:.2}s)"
    );
}

/// Criterion 2: two-state kernel [[0.9,0.1],[0.2,0.8]], u0 = {0:1}, t = 1;
/// after 1e5 steps the normalized configuration must be within 0.02 of
/// (2/3, 1/3) in l1 on a single run, and the median over 32 replicas must
/// be below 0.01. Runtime under 30 s.
#[test]
fn criterion_02_two_state_configuration_distance() {
    let started = Instant::now();
    let kernel = Arc::new(two_state_kernel());
    let pi = SparseMeasure::from_pairs([(0u32, 2.0 / 3.0), (1u32, 1.0 / 3.0)]).unwrap();
    let n_steps = 100_000u64;
    let mut distances = Vec::with_capacity(32);
    for rep in 0..32u64 {
        let mut rng = replica_stream(SEED, rep);
        let mut urn = UrnState::init(point_mass_u0(), kernel.clone()).unwrap();
        for _ in 0..n_steps {
            urn.step(&mut rng).unwrap();
        }
        let normalized = urn.config().scaled(1.0 / (n_steps as f64 + 1.0)).unwrap();
        distances.push(normalized.l1_distance(&pi));
    }
    let single = distances[0];
    let med = median(&distances);
    let elapsed = started.elapsed().as_secs_f64();
    let pass = single < 0.02 && med < 0.01 && elapsed < 30.0;
    verdict(
        "criterion-02 two-state-configuration",
        pass,
        &format!(
            "single l1 {single:.4} vs 0.02, median over 32 {med:.4} vs 0.01, {elapsed:.1}s < 30s"
        ),
    );
    assert!(
        pass,
        "measured single-run l1 = {single:.4} (threshold 0.02) and 32-replica median = {med:.4} \
         (threshold 0.01) at n = 1e5. This kernel's second eigenvalue is 0.7, so the normalized \
         configuration converges like n^(-0.3): the noise-free mean recursion alone sits at \
         l1 = 0.0232 at n = 1e5 and still 0.0116 at n = 1e6. At this decay rate the thresholds \
         would need n ~ 1e10 steps; they are consistent with n^(-1/2) averaging, which requires \
         a spectral gap above 1/2 that this kernel does not have. See README, 'Known failing \
         checks'."
    );
}

/// Criterion 3: same setup as criterion 2; the share of color-0 draws
/// |N_{n,0}/(n+1) - 2/3| must be below 0.02 on a single run and below 0.01
/// in median over 32 replicas at n = 1e5.
#[test]
fn criterion_03_two_state_local_time() {
    let kernel = Arc::new(two_state_kernel());
    let n = 100_000u64;
    let mut gaps = Vec::with_capacity(32);
    for rep in 0..32u64 {
        let mut rng = replica_stream(SEED, rep);
        let mut urn = UrnState::init(point_mass_u0(), kernel.clone()).unwrap();
        let mut count = 0u64;
        // N_{n,0} counts color-0 draws among Z_0..Z_n, i.e. n+1 draws.
        for _ in 0..=n {
            if urn.step(&mut rng).unwrap() == ColorId(0) {
                count += 1;
            }
        }
        gaps.push((count as f64 / (n as f64 + 1.0) - 2.0 / 3.0).abs());
    }
    let single = gaps[0];
    let med = median(&gaps);
    let pass = single < 0.02 && med < 0.01;
    verdict(
        "criterion-03 two-state-local-time",
        pass,
        &format!("single gap {single:.4} vs 0.02, median over 32 {med:.4} vs 0.01"),
    );
    assert!(
        pass,
        "measured single-run |N/(n+1) - 2/3| = {single:.4} (threshold 0.02) and 32-replica \
         median = {med:.4} (threshold 0.01) at n = 1e5. The local-time share is the running \
         average of the normalized configuration, which converges like n^(-0.3) for this \
         kernel (second eigenvalue 0.7), so the averaged share inherits the same rate; the \
         thresholds assume n^(-1/2) fluctuations. See README, 'Known failing checks'."
    );
}

/// Criterion 4: infinite-state reset chain (epsilon 0.3, Geometric(1/2)
/// restart), u0 = {0:1}; after 1e5 steps the normalized configuration is
/// within 0.05 of the numerically computed stationary law (residual <=
/// 1e-8).
#[test]
fn criterion_04_reset_chain_configuration_distance() {
    let kernel = Arc::new(Kernel::reset_chain(0.3, 0.5).unwrap());
    // Generator kernels iterate to a defect below 1e-8.
    let pi = kernel.stationary_default().unwrap();
    let mut rng = replica_stream(SEED, 0);
    let mut urn = UrnState::init(point_mass_u0(), kernel.clone()).unwrap();
    for _ in 0..100_000u64 {
        urn.step(&mut rng).unwrap();
    }
    let l1 = urn.normalized_config().unwrap().l1_distance(&pi);
    let pass = l1 < 0.05;
    verdict(
        "criterion-04 reset-chain-configuration",
        pass,
        &format!("single-run l1 {l1:.4} vs 0.05 at n = 1e5"),
    );
    assert!(
        pass,
        "reset-chain run ended {l1:.4} from stationarity (threshold 0.05)"
    );
}

/// Criterion 5: the closed form for the depth-weighted growth sum A_n
/// matches its recursion within 1e-9 relative error for n <= 1e4 across
/// r in {0.25, 0.5, 0.75, 0.9} and t in {0.5, 1, 3}, in under 5 s.
#[test]
fn criterion_05_growth_identity() {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for &r in &[0.25, 0.5, 0.75, 0.9] {
        for &t in &[0.5, 1.0, 3.0] {
            let recursive = analysis::a_series_recursive(r, t, 10_000).unwrap();
            let closed = analysis::a_series_closed_form_prefix(r, t, 10_000).unwrap();
            for (rec, cl) in recursive.values.iter().zip(&closed) {
                worst = worst.max((rec - cl).abs() / cl);
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = worst <= 1e-9 && elapsed < 5.0;
    verdict(
        "criterion-05 growth-identity",
        pass,
        &format!("12 (r, t) pairs, worst relative gap {worst:.2e} vs 1e-9, {elapsed:.2}s < 5s"),
    );
    assert!(
        pass,
        "closed form and recursion must agree to 1e-9 relative (worst {worst:e}, {elapsed:.2}s)"
    );
}

/// Criterion 6: Monte Carlo estimates of A_n and B_n over 1e5 trees at
/// n in {1, 5, 20} (r = 1/2, t = 1) fall within 3 standard errors of the
/// recursions, and the exact spot values A_1 = 0.875, B_1 = 2.75 hold.
#[test]
fn criterion_06_growth_monte_carlo() {
    let a = analysis::a_series_recursive(0.5, 1.0, 20).unwrap();
    let b = analysis::b_series_recursive(0.5, 1.0, 20).unwrap();
    let spot_ok = (a.values[1] - 0.875).abs() <= 1e-12 && (b.values[1] - 2.75).abs() <= 1e-12;
    let mut worst_z = 0.0f64;
    for &n in &[1usize, 5, 20] {
        let est = analysis::mc_series_estimate(0.5, 1.0, n, 100_000, SEED + n as u64).unwrap();
        worst_z = worst_z.max((est.a_hat - a.values[n]).abs() / est.a_se);
        worst_z = worst_z.max((est.b_hat - b.values[n]).abs() / est.b_se);
    }
    let pass = spot_ok && worst_z <= 3.0;
    verdict(
        "criterion-06 growth-monte-carlo",
        pass,
        &format!(
            "A_1 = {:.6}, B_1 = {:.6}, worst |z| {worst_z:.2} vs 3.0 over 1e5 trees",
            a.values[1], b.values[1]
        ),
    );
    assert!(
        pass,
        "Monte Carlo growth sums must sit within 3 SE of the recursions \
         (worst z {worst_z:.2}; A_1 = {}, B_1 = {})",
        a.values[1], b.values[1]
    );
}

/// Criterion 7: normalized growth ratios stay bounded in their regimes up
/// to n = 1e4 — A_n/n^r for r in {0.25, 0.5, 0.75, 0.9}, B_n/n^{2r} at
/// r = 0.75, B_n/(n log(n+1)) at r = 0.5, and B_n/n at r = 0.25: the
/// top-decade maximum stays within 2x the series median.
#[test]
fn criterion_07_growth_boundedness() {
    let mut worst_excess = 0.0f64;
    let mut all_bounded = true;
    for &r in &[0.25, 0.5, 0.75, 0.9] {
        let series = analysis::a_series_recursive(r, 1.0, 10_000).unwrap();
        let report = analysis::growth_bound_check(&series, Regime::A).unwrap();
        worst_excess = worst_excess.max(report.top_decade_max / report.median_ratio);
        all_bounded &= report.is_bounded(2.0);
    }
    for (r, regime) in [
        (0.75, Regime::BHigh),
        (0.5, Regime::BHalf),
        (0.25, Regime::BLow),
    ] {
        let series = analysis::b_series_recursive(r, 1.0, 10_000).unwrap();
        let report = analysis::growth_bound_check(&series, regime).unwrap();
        worst_excess = worst_excess.max(report.top_decade_max / report.median_ratio);
        all_bounded &= report.is_bounded(2.0);
    }
    verdict(
        "criterion-07 growth-boundedness",
        all_bounded,
        &format!("7 ratio suites to n = 1e4, worst top-decade/median {worst_excess:.3} vs 2.0"),
    );
    assert!(
        all_bounded,
        "every normalized ratio suite must keep its top decade within 2x its median \
         (worst {worst_excess:.3})"
    );
}

/// Criterion 8: on 10 fixed trees (n <= 20) colored through the two-state
/// kernel, every Monte Carlo covariance of same-color indicators (1e5
/// samples) respects the certificate bound 2*C*rho^max(d(u,L), d(w,L)) up
/// to 3 SE, the fitted rho is within 0.01 of 0.7, and the hand-computed
/// two-vertex chain covariance matches Monte Carlo within 3 sigma.
#[test]
fn criterion_08_covariance_bound() {
    let kernel = two_state_kernel();
    let probes = kernel.default_probes(8);
    let cert = kernel
        .fit_ergodicity_certificate(&probes, &probes, 40)
        .unwrap();
    let rho_ok = (cert.rho - 0.7).abs() < 0.01;
    let u0 = SparseMeasure::from_pairs([(0u32, 1.0), (1u32, 1.0)]).unwrap();
    let sizes = [5usize, 7, 9, 11, 13, 15, 17, 19, 20, 20];
    let mut checked = 0usize;
    let mut all_within = true;
    for (i, &n) in sizes.iter().enumerate() {
        let mut rng = replica_stream(SEED, 500 + i as u64);
        let tree = RecursiveTree::grow(1.0, n, &mut rng).unwrap();
        let last = tree.len() - 1;
        let pairs = [(0usize, 1), (0, last), (last / 2, last), (last - 1, last)];
        for (j, &(u, w)) in pairs.iter().enumerate() {
            let report = analysis::conditional_covariance_mc(
                &tree,
                &kernel,
                &u0,
                &cert,
                Vertex::Node(u),
                Vertex::Node(w),
                ColorId(0),
                100_000,
                SEED + 9_000 + (i * 4 + j) as u64,
            )
            .unwrap();
            if !report.within_bound() {
                eprintln!(
                    "  tree {i} pair ({u}, {w}): estimate {:.5} exceeds bound {:.5} + 3 x {:.5}",
                    report.mc_estimate, report.bound, report.std_error
                );
                all_within = false;
            }
            checked += 1;
        }
    }
    // Chain o -> w0 -> w1 with u0 = {0:1, 1:1}: the root child is color 0
    // with probability 1/2, its child follows that row, so
    // Cov = (1/2)(0.9) - (1/2) * ((0.9 + 0.2)/2) = 0.175.
    let mut chain = RecursiveTree::new(1.0).unwrap();
    let w0 = chain.attach(Vertex::Root).unwrap();
    let w1 = chain.attach(w0).unwrap();
    let hand = 0.5 * 0.9 - 0.5 * (0.5 * 0.9 + 0.5 * 0.2);
    let chain_report = analysis::conditional_covariance_mc(
        &chain,
        &kernel,
        &u0,
        &cert,
        w0,
        w1,
        ColorId(0),
        100_000,
        SEED + 9_999,
    )
    .unwrap();
    let chain_z = (chain_report.mc_estimate - hand).abs() / chain_report.std_error;
    let chain_ok = chain_z <= 3.0;
    let pass = rho_ok && all_within && chain_ok;
    verdict(
        "criterion-08 covariance-bound",
        pass,
        &format!(
            "{checked} pairs within bound: {all_within}, rho {:.4} vs 0.7, chain |z| {chain_z:.2} vs 3.0",
            cert.rho
        ),
    );
    assert!(
        pass,
        "covariance bound check failed (rho {:.4}, all pairs within bound: {all_within}, \
         chain estimate {:.5} vs hand value {hand:.5}, |z| = {chain_z:.2})",
        cert.rho, chain_report.mc_estimate
    );
}

/// Criterion 9: the local-time variance over 1e3 replicas, normalized by
/// the pair-sum envelope B_n(sqrt(rho)), stays bounded along n in
/// {1e2, 1e3, 1e4}: the maximum ratio is at most twice the ratio at
/// n = 1e2. Runtime under 5 min.
#[test]
fn criterion_09_variance_envelope() {
    let started = Instant::now();
    let kernel = two_state_kernel();
    let probes = kernel.default_probes(8);
    let cert = kernel
        .fit_ergodicity_certificate(&probes, &probes, 40)
        .unwrap();
    let profile = analysis::local_time_variance_profile(
        &kernel,
        &point_mass_u0(),
        ColorId(0),
        &[100, 1_000, 10_000],
        1_000,
        cert.rho,
        SEED,
    )
    .unwrap();
    let first = profile.points[0].ratio;
    let max = profile
        .points
        .iter()
        .map(|p| p.ratio)
        .fold(0.0f64, f64::max);
    let elapsed = started.elapsed().as_secs_f64();
    let pass = max <= 2.0 * first && elapsed < 300.0;
    let ratios: Vec<String> = profile
        .points
        .iter()
        .map(|p| format!("n={} ratio={:.4}", p.n, p.ratio))
        .collect();
    verdict(
        "criterion-09 variance-envelope",
        pass,
        &format!(
            "{}, max {max:.4} vs 2 x {first:.4}, {elapsed:.1}s < 300s",
            ratios.join(", ")
        ),
    );
    assert!(
        pass,
        "variance/envelope ratios must stay within 2x their value at n = 1e2 \
         (got {ratios:?}, elapsed {elapsed:.1}s)"
    );
}

/// Criterion 10: hub-and-spokes walk with p = (0.5, 0.3, 0.2) started at
/// the hub with unit weight: at n = 1e5 the update-time ratio sigma_n/(n+1)
/// is within 0.02 of 4/3 and each normalized edge weight is within 0.02 of
/// pi_j/(2 - pi_0) = (1/2, 3/20, 1/10); the walk's weights equal the urn
/// configuration bit-for-bit after 1e4 shared-stream updates.
#[test]
fn criterion_10_star_walk_limits() {
    let alpha = Arc::new(Kernel::star_walk(&[0.5, 0.3, 0.2]).unwrap());
    let delta0 = point_mass_u0();
    let weight_limits = [0.5, 0.15, 0.1];
    let n = 100_000u64;
    let mut rng = replica_stream(SEED, 0);
    let mut walk = StarWalk::init(delta0.clone(), alpha.clone()).unwrap();
    while walk.time() < n {
        walk.step(&mut rng).unwrap();
    }
    let denom = n as f64 + walk.delta();
    let mut worst_weight_gap = 0.0f64;
    for (j, &limit) in weight_limits.iter().enumerate() {
        let ratio = walk.weights().get(ColorId(j as u32)) / denom;
        worst_weight_gap = worst_weight_gap.max((ratio - limit).abs());
    }
    // sigma_n needs the n-th update, which arrives around walk time 4n/3.
    while walk.updates() < n {
        walk.step(&mut rng).unwrap();
    }
    let sigma_n = walk.sigma()[(n - 1) as usize];
    let sigma_gap = (sigma_n as f64 / (n as f64 + 1.0) - 4.0 / 3.0).abs();

    // Shared-stream coupling: the walk's weight table after its 1e4-th
    // update must equal the urn configuration after 1e4 draws, bit for bit.
    let updates = 10_000u64;
    let mut walk_rng = replica_stream(SEED, 1);
    let mut coupled = StarWalk::init(delta0.clone(), alpha.clone()).unwrap();
    while coupled.updates() < updates {
        coupled.step(&mut walk_rng).unwrap();
    }
    let mut urn_rng = replica_stream(SEED, 1);
    let mut urn = UrnState::init(delta0, alpha.clone()).unwrap();
    for _ in 0..updates {
        urn.step(&mut urn_rng).unwrap();
    }
    let bits = |m: &SparseMeasure| -> Vec<(ColorId, u64)> {
        m.iter().map(|(c, w)| (c, w.to_bits())).collect()
    };
    let bitexact = bits(coupled.weights()) == bits(urn.config());

    let pass = sigma_gap < 0.02 && worst_weight_gap < 0.02 && bitexact;
    verdict(
        "criterion-10 star-walk-limits",
        pass,
        &format!(
            "sigma gap {sigma_gap:.4} vs 0.02, worst weight gap {worst_weight_gap:.4} vs 0.02, \
             bit-exact after {updates} updates: {bitexact}"
        ),
    );
    assert!(
        pass,
        "star-walk limits: sigma gap {sigma_gap:.4}, worst weight gap {worst_weight_gap:.4}, \
         coupling bit-exact: {bitexact}"
    );
}

/// Criterion 11: the binary writes byte-identical artifacts when rerun with
/// the same seed, for both the urn configuration run behind criteria 2-3
/// and the star-walk run behind criterion 10.
#[test]
fn criterion_11_byte_identical_reruns() {
    fn run_cli(args: &[&str]) {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_urnlab"))
            .args(args)
            .output()
            .expect("binary runs");
        // Exit code 1 flags a tolerance miss, which is fine here; only a
        // usage error (2) would invalidate the comparison.
        assert!(
            matches!(out.status.code(), Some(0) | Some(1)),
            "unexpected cli failure: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let dir = tempfile::tempdir().unwrap();
    let kernel_path = dir.path().join("two_state.txt");
    std::fs::write(&kernel_path, TWO_STATE_TEXT).unwrap();
    let kernel = kernel_path.to_str().unwrap();
    let mut mismatches: Vec<String> = Vec::new();
    let mut compared = 0usize;

    let urn_out: Vec<std::path::PathBuf> =
        (0..2).map(|i| dir.path().join(format!("urn{i}"))).collect();
    for out in &urn_out {
        run_cli(&[
            "urn-run",
            "--kernel",
            kernel,
            "--u0",
            "0:1",
            "--steps",
            "100000",
            "--replicas",
            "32",
            "--seed",
            "20260814",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    for name in ["urn_trace.csv", "urn_summary.json"] {
        let a = std::fs::read(urn_out[0].join(name)).unwrap();
        let b = std::fs::read(urn_out[1].join(name)).unwrap();
        if a != b {
            mismatches.push(format!("urn-run/{name}"));
        }
        compared += 1;
    }

    let walk_out: Vec<std::path::PathBuf> = (0..2)
        .map(|i| dir.path().join(format!("walk{i}")))
        .collect();
    for out in &walk_out {
        run_cli(&[
            "starwalk-run",
            "--generator",
            "star-walk",
            "p=0.5,0.3,0.2",
            "--delta0",
            "0:1",
            "--steps",
            "100000",
            "--seed",
            "20260814",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    for name in ["starwalk_series.csv", "starwalk_report.json"] {
        let a = std::fs::read(walk_out[0].join(name)).unwrap();
        let b = std::fs::read(walk_out[1].join(name)).unwrap();
        if a != b {
            mismatches.push(format!("starwalk-run/{name}"));
        }
        compared += 1;
    }

    let pass = mismatches.is_empty();
    verdict(
        "criterion-11 determinism",
        pass,
        &format!("{compared} artifacts byte-compared across reruns, mismatches: {mismatches:?}"),
    );
    assert!(pass, "rerun artifacts differ: {mismatches:?}");
}
