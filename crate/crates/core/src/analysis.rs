//! Growth series, covariance bounds, and variance diagnostics.
//!
//! Two deterministic sequences drive the variance analysis of urn local
//! times, both expectations over the random tree with root weight `t`:
//!
//! * `A_n(r) = E sum_u r^depth(u)` over attached vertices, satisfying
//!   `A_n = (1 + r/(n+t)) A_{n-1} + tr/(n+t)` with `A_0 = r`, and a closed
//!   form as a gamma-ratio sum;
//! * `B_n(r) = E sum_{u,w} r^{d(u,w)}` over ordered pairs (diagonal
//!   included), satisfying `B_n = (1 + 2r/(n+t)) B_{n-1} + (2rt/(n+t))
//!   A_{n-1} + 1` with `B_0 = 1`.
//!
//! `A_n` grows like `n^r`; `B_n` like `n^{2r}`, `n log n`, or `n` according
//! to whether `r` is above, at, or below 1/2. Monte Carlo estimators of both
//! sums, a covariance check for colors at two tree vertices against the
//! certificate bound `2 C rho^{max(d(u,L), d(w,L))}`, and a boundedness
//! check of `Var(N_{n,v})` against `B_n(sqrt(rho))` round out the toolkit.

use rayon::prelude::*;

use crate::bmc;
use crate::error::{Error, Result};
use crate::kernel::{ErgodicityCertificate, Kernel};
use crate::law::SequenceLaw;
use crate::measure::{ColorId, SparseMeasure};
use crate::rng::replica_stream;
use crate::rrt::{RecursiveTree, Vertex};
use crate::special::ln_gamma;
use crate::urn::UrnState;

/// Which of the two growth sequences a series holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    A,
    B,
}

/// One of the growth sequences evaluated for `n = 0..=n_max`.
#[derive(Debug, Clone)]
pub struct GrowthSeries {
    pub kind: SeriesKind,
    pub r: f64,
    pub t: f64,
    /// `values[n]` is `A_n` or `B_n`.
    pub values: Vec<f64>,
}

fn check_rt(r: f64, t: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter("r must be in (0, 1)"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter("t must be positive"));
    }
    Ok(())
}

/// `A_n` by its recursion.
pub fn a_series_recursive(r: f64, t: f64, n_max: usize) -> Result<GrowthSeries> {
    check_rt(r, t)?;
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(r);
    for n in 1..=n_max {
        let d = n as f64 + t;
        let prev = values[n - 1];
        values.push((1.0 + r / d) * prev + t * r / d);
    }
    Ok(GrowthSeries {
        kind: SeriesKind::A,
        r,
        t,
        values,
    })
}

/// `B_n` by its recursion (running the `A` recursion alongside).
pub fn b_series_recursive(r: f64, t: f64, n_max: usize) -> Result<GrowthSeries> {
    check_rt(r, t)?;
    let a = a_series_recursive(r, t, n_max.max(1))?;
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(1.0);
    for n in 1..=n_max {
        let d = n as f64 + t;
        let prev = values[n - 1];
        values.push((1.0 + 2.0 * r / d) * prev + (2.0 * r * t / d) * a.values[n - 1] + 1.0);
    }
    Ok(GrowthSeries {
        kind: SeriesKind::B,
        r,
        t,
        values,
    })
}

/// The closed form for the whole prefix `A_0..A_n_max`:
/// `A_n = rt * [G(n+1+t+r)/G(n+1+t)] * sum_{k<=n} G(k+t)/G(k+1+t+r)`,
/// evaluated through log-gamma with the inner sum carried as a running
/// prefix, so the full series costs O(n_max).
pub fn a_series_closed_form_prefix(r: f64, t: f64, n_max: usize) -> Result<Vec<f64>> {
    check_rt(r, t)?;
    let mut values = Vec::with_capacity(n_max + 1);
    let mut inner = 0.0f64;
    for n in 0..=n_max {
        let k = n as f64;
        inner += (ln_gamma(k + t) - ln_gamma(k + 1.0 + t + r)).exp();
        let outer = (ln_gamma(k + 1.0 + t + r) - ln_gamma(k + 1.0 + t)).exp();
        values.push(r * t * outer * inner);
    }
    Ok(values)
}

/// The closed form at a single index.
pub fn a_series_closed_form(r: f64, t: f64, n: usize) -> Result<f64> {
    Ok(a_series_closed_form_prefix(r, t, n)?[n])
}

/// Monte Carlo estimate of the two growth sums at a fixed `n`.
#[derive(Debug, Clone)]
pub struct SeriesEstimate {
    pub n: usize,
    pub replicas: u64,
    pub a_hat: f64,
    pub a_se: f64,
    pub b_hat: f64,
    pub b_se: f64,
}

/// Per-tree evaluation of `sum_u r^depth(u)` and `sum_{u,w} r^{d(u,w)}`.
///
/// Pair sums are grouped by lowest common ancestor: with `h_x = sum over the
/// subtree of x of r^{d(u,x)}`, the ordered pairs meeting at `x` contribute
/// `h_x^2 - r^2 sum_children h_c^2`, which makes the whole computation one
/// bottom-up O(n) pass instead of O(n^2) pairwise distances.
fn tree_sums(tree: &RecursiveTree, r: f64) -> (f64, f64) {
    let len = tree.len();
    // Slot 0 accumulates root children; slot j+1 accumulates node j's.
    let mut child_sum = vec![0.0f64; len + 1];
    let mut child_sq = vec![0.0f64; len + 1];
    let mut b_total = 0.0f64;
    for j in (0..len).rev() {
        let h = 1.0 + r * child_sum[j + 1];
        b_total += h * h - r * r * child_sq[j + 1];
        let parent_slot = match tree.parent(Vertex::Node(j)).unwrap().unwrap() {
            Vertex::Root => 0,
            Vertex::Node(i) => i + 1,
        };
        child_sum[parent_slot] += h;
        child_sq[parent_slot] += h * h;
    }
    // Pairs whose paths diverge at the root itself.
    b_total += r * r * (child_sum[0] * child_sum[0] - child_sq[0]);
    (r * child_sum[0], b_total)
}

/// Estimates `A_n` and `B_n` over `replicas` freshly grown trees.
pub fn mc_series_estimate(
    r: f64,
    t: f64,
    n: usize,
    replicas: u64,
    master_seed: u64,
) -> Result<SeriesEstimate> {
    check_rt(r, t)?;
    if replicas < 100 {
        return Err(Error::InvalidParameter(
            "series estimate needs >= 100 replicas",
        ));
    }
    let samples: Vec<(f64, f64)> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replica_stream(master_seed, rep);
            let tree = RecursiveTree::grow(t, n, &mut rng).expect("t validated");
            tree_sums(&tree, r)
        })
        .collect();
    // Deterministic reduction: samples are ordered by replica index.
    let s = replicas as f64;
    let (mut a_sum, mut b_sum) = (0.0, 0.0);
    for &(a, b) in &samples {
        a_sum += a;
        b_sum += b;
    }
    let (a_hat, b_hat) = (a_sum / s, b_sum / s);
    let (mut a_var, mut b_var) = (0.0, 0.0);
    for &(a, b) in &samples {
        a_var += (a - a_hat) * (a - a_hat);
        b_var += (b - b_hat) * (b - b_hat);
    }
    a_var /= s - 1.0;
    b_var /= s - 1.0;
    Ok(SeriesEstimate {
        n,
        replicas,
        a_hat,
        a_se: (a_var / s).sqrt(),
        b_hat,
        b_se: (b_var / s).sqrt(),
    })
}

/// The growth regime a series is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `A_n` against `n^r` (any r in (0,1)).
    A,
    /// `B_n` against `n^{2r}`, requires r > 1/2.
    BHigh,
    /// `B_n` against `n log(n+1)`, requires r = 1/2.
    BHalf,
    /// `B_n` against `n`, requires r < 1/2.
    BLow,
}

/// Normalized-ratio evidence that a series obeys its growth bound: the
/// ratios `values[n] / normalizer(n)` should remain bounded, i.e. not
/// drift upward in the top decade of `n`.
#[derive(Debug, Clone)]
pub struct RatioReport {
    pub regime: Regime,
    pub r: f64,
    pub n_lo: usize,
    pub n_hi: usize,
    /// `ratios[i]` is the normalized ratio at `n = n_lo + i`.
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    pub median_ratio: f64,
    /// Largest ratio over the last decade `(n_hi/10, n_hi]`.
    pub top_decade_max: f64,
}

impl RatioReport {
    /// The boundedness criterion: the top decade stays within `slack` times
    /// the overall median, so the normalizer is not outgrown.
    pub fn is_bounded(&self, slack: f64) -> bool {
        self.top_decade_max <= slack * self.median_ratio
    }
}

/// Checks a series against the growth bound of the claimed regime over
/// `n in [10, n_max]`.
pub fn growth_bound_check(series: &GrowthSeries, regime: Regime) -> Result<RatioReport> {
    let r = series.r;
    let consistent = match regime {
        Regime::A => series.kind == SeriesKind::A,
        Regime::BHigh => series.kind == SeriesKind::B && r > 0.5,
        Regime::BHalf => series.kind == SeriesKind::B && (r - 0.5).abs() <= 1e-12,
        Regime::BLow => series.kind == SeriesKind::B && r < 0.5,
    };
    if !consistent {
        return Err(Error::RegimeMismatch { regime, r });
    }
    let n_hi = series.values.len().saturating_sub(1);
    if n_hi < 1000 {
        return Err(Error::InvalidParameter("growth check needs n_max >= 1000"));
    }
    let n_lo = 10usize;
    let normalizer = |n: f64| -> f64 {
        match regime {
            Regime::A => n.powf(r),
            Regime::BHigh => n.powf(2.0 * r),
            Regime::BHalf => n * (n + 1.0).ln(),
            Regime::BLow => n,
        }
    };
    let ratios: Vec<f64> = (n_lo..=n_hi)
        .map(|n| series.values[n] / normalizer(n as f64))
        .collect();
    let sup_ratio = ratios.iter().cloned().fold(0.0f64, f64::max);
    let mut sorted = ratios.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_ratio = sorted[sorted.len() / 2];
    let decade_start = (n_hi / 10).max(n_lo);
    let top_decade_max = (decade_start..=n_hi)
        .map(|n| series.values[n] / normalizer(n as f64))
        .fold(0.0f64, f64::max);
    Ok(RatioReport {
        regime,
        r,
        n_lo,
        n_hi,
        ratios,
        sup_ratio,
        median_ratio,
        top_decade_max,
    })
}

/// Monte Carlo check of the color covariance at two vertices of a fixed
/// tree against the certificate bound.
#[derive(Debug, Clone)]
pub struct CovarianceReport {
    pub u: Vertex,
    pub w: Vertex,
    pub color: ColorId,
    pub samples: u64,
    pub mc_estimate: f64,
    pub std_error: f64,
    /// `2 C rho^{max(d(u,L), d(w,L))}` from the certificate.
    pub bound: f64,
    pub d_u_lca: u32,
    pub d_w_lca: u32,
}

impl CovarianceReport {
    /// The lemma's conclusion, with Monte Carlo slack.
    pub fn within_bound(&self) -> bool {
        self.mc_estimate.abs() <= self.bound + 3.0 * self.std_error
    }
}

/// Estimates `Cov(1{W_u=v}, 1{W_w=v})` on a fixed tree over independent
/// colorings, and reports it next to the certificate bound
/// `2 C rho^{max(d(u,L), d(w,L))}` (`L` the lowest common ancestor).
#[allow(clippy::too_many_arguments)]
pub fn conditional_covariance_mc(
    tree: &RecursiveTree,
    kernel: &Kernel,
    u0: &SparseMeasure,
    cert: &ErgodicityCertificate,
    u: Vertex,
    w: Vertex,
    v: ColorId,
    samples: u64,
    master_seed: u64,
) -> Result<CovarianceReport> {
    if tree.depth(u)? == 0 || tree.depth(w)? == 0 {
        return Err(Error::InvalidParameter("the root carries no color"));
    }
    if samples < 10_000 {
        return Err(Error::InvalidParameter(
            "covariance estimate needs >= 10^4 samples",
        ));
    }
    let lca = tree.lca(u, w)?;
    let d_u_lca = tree.distance(u, lca)?;
    let d_w_lca = tree.distance(w, lca)?;
    // Integer joint counts; integer reduction is order-independent, so the
    // result does not depend on work scheduling.
    let (n_u, n_w, n_uw) = (0..samples)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replica_stream(master_seed, rep);
            let trace = bmc::run(tree, kernel, u0, &mut rng).expect("validated inputs");
            let x = (trace.color(u).unwrap() == v) as u64;
            let y = (trace.color(w).unwrap() == v) as u64;
            (x, y, x & y)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let s = samples as f64;
    let (x_bar, y_bar, xy_bar) = (n_u as f64 / s, n_w as f64 / s, n_uw as f64 / s);
    let mc_estimate = (xy_bar - x_bar * y_bar) * s / (s - 1.0);
    // Influence values (X - x_bar)(Y - y_bar) take four values with known
    // counts; their spread gives the standard error of the estimate.
    let counts = [
        (n_uw, (1.0 - x_bar) * (1.0 - y_bar)),
        (n_u - n_uw, (1.0 - x_bar) * (0.0 - y_bar)),
        (n_w - n_uw, (0.0 - x_bar) * (1.0 - y_bar)),
        (samples - n_u - (n_w - n_uw), x_bar * y_bar),
    ];
    let mean_p: f64 = counts.iter().map(|&(c, p)| c as f64 * p).sum::<f64>() / s;
    let var_p: f64 = counts
        .iter()
        .map(|&(c, p)| c as f64 * (p - mean_p) * (p - mean_p))
        .sum::<f64>()
        / (s - 1.0);
    let bound = 2.0 * cert.c * cert.rho.powi(d_u_lca.max(d_w_lca) as i32);
    Ok(CovarianceReport {
        u,
        w,
        color: v,
        samples,
        mc_estimate,
        std_error: (var_p / s).sqrt(),
        bound,
        d_u_lca,
        d_w_lca,
    })
}

/// One checkpoint of the local-time variance profile.
#[derive(Debug, Clone)]
pub struct VariancePoint {
    pub n: u64,
    /// Sample variance of `N_{n,v}` (the count of color v among the first
    /// n+1 draws) across replicas.
    pub j_hat: f64,
    /// `B_n(sqrt(rho))`.
    pub b_value: f64,
    pub ratio: f64,
}

/// Variance of urn local times against the `B_n(sqrt(rho))` envelope.
///
/// The proportionality constant is not universal, so the check is relative:
/// `c_prime` is calibrated as the largest ratio within the first decade of
/// checkpoints, and the profile is considered bounded when later ratios
/// stay within a slack factor of it.
#[derive(Debug, Clone)]
pub struct VarianceProfile {
    pub color: ColorId,
    pub rho: f64,
    pub replicas: u64,
    pub c_prime: f64,
    pub points: Vec<VariancePoint>,
}

impl VarianceProfile {
    pub fn is_bounded(&self, slack: f64) -> bool {
        self.points
            .iter()
            .all(|p| p.ratio <= slack * self.c_prime || p.ratio == 0.0)
    }
}

/// Estimates `Var(N_{n,v})` at each checkpoint in `ns` over urn replicas
/// and compares against `B_n(sqrt(rho))`.
pub fn local_time_variance_profile(
    kernel: &Kernel,
    u0: &SparseMeasure,
    v: ColorId,
    ns: &[u64],
    replicas: u64,
    rho: f64,
    master_seed: u64,
) -> Result<VarianceProfile> {
    if replicas < 1000 {
        return Err(Error::InvalidParameter(
            "variance profile needs >= 10^3 replicas",
        ));
    }
    if ns.is_empty() {
        return Err(Error::InvalidParameter(
            "variance profile needs checkpoints",
        ));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter("rho must be in (0, 1)"));
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let n_max = *ns.last().expect("nonempty");
    let t = u0.total_mass();
    let b = b_series_recursive(rho.sqrt(), t, n_max as usize)?;
    let kernel = std::sync::Arc::new(kernel.clone());
    // Each replica runs once to n_max, recording N_{n,v} at checkpoints.
    let per_replica: Vec<Vec<u64>> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replica_stream(master_seed, rep);
            let mut urn = UrnState::init(u0.clone(), kernel.clone()).expect("validated");
            let mut count = 0u64;
            let mut at = Vec::with_capacity(ns.len());
            let mut next = 0usize;
            // N_{n,v} counts Z_0..Z_n, i.e. the first n+1 draws.
            for k in 0..=n_max {
                let z = urn.step(&mut rng).expect("validated");
                if z == v {
                    count += 1;
                }
                if next < ns.len() && ns[next] == k {
                    at.push(count);
                    next += 1;
                }
            }
            at
        })
        .collect();
    let s = replicas as f64;
    let mut points = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        let (mut sum, mut sum_sq) = (0u128, 0u128);
        for counts in &per_replica {
            let c = counts[i] as u128;
            sum += c;
            sum_sq += c * c;
        }
        let mean = sum as f64 / s;
        let j_hat = (sum_sq as f64 - s * mean * mean) / (s - 1.0);
        let b_value = b.values[n as usize];
        points.push(VariancePoint {
            n,
            j_hat,
            b_value,
            ratio: j_hat / b_value,
        });
    }
    // Calibration window: the first decade of checkpoints.
    let window_hi = ns[0].saturating_mul(10).max(ns[0] + 1);
    let c_prime = points
        .iter()
        .filter(|p| p.n <= window_hi)
        .map(|p| p.ratio)
        .fold(0.0f64, f64::max);
    Ok(VarianceProfile {
        color: v,
        rho,
        replicas,
        c_prime,
        points,
    })
}

/// Total variation between two sequence laws (thin alias so callers of the
/// analysis toolkit need not import the law module).
pub fn coupling_tv(urn_law: &SequenceLaw, bmc_law: &SequenceLaw) -> Result<f64> {
    urn_law.tv(bmc_law)
}
