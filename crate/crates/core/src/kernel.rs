//! Replacement kernels: stochastic matrices over countably many colors.
//!
//! A kernel is either an explicit row table over finitely many colors or a
//! parametric rule that can produce any row on demand (possibly with infinite
//! support, truncated to a mass tolerance when materialized). On top of row
//! access this module provides measure propagation, stationary distributions
//! by power iteration with adaptive support truncation, a fitted uniform
//! ergodicity certificate `|R^n(u,v) - pi(v)| <= C rho^n`, and a Doeblin
//! minorization check.

use std::str::FromStr;

use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{parse_ratio, ratio_from_f64};
use crate::measure::{ColorId, SparseMeasure};

/// Absolute tolerance on row sums at kernel construction.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Smallest representable sup-error in an ergodicity certificate; probe
/// errors at or below this level count as "already mixed".
pub const CERTIFICATE_FLOOR: f64 = 1e-14;

/// Default cap on truncated support sizes, overridable via the
/// `URNLAB_MAX_SUPPORT` environment variable.
pub const DEFAULT_SUPPORT_CAP: usize = 1 << 18;

/// Row-truncation tolerance used when materializing generator rows during
/// simulation steps; mass discarded per step stays below this.
pub const STEP_ROW_TOL: f64 = 1e-12;

const STATIONARY_MAX_ITERS: usize = 100_000;
const GENERATOR_INIT_SUPPORT: u32 = 32;
const PRUNE_FLOOR: f64 = 1e-15;

/// Current truncation support cap (`URNLAB_MAX_SUPPORT` or the default).
pub fn support_cap() -> usize {
    match std::env::var("URNLAB_MAX_SUPPORT") {
        Ok(v) => v.trim().parse().unwrap_or(DEFAULT_SUPPORT_CAP),
        Err(_) => DEFAULT_SUPPORT_CAP,
    }
}

/// A stochastic replacement kernel.
#[derive(Debug, Clone)]
pub enum Kernel {
    /// Explicit rows over colors {0, ..., k-1}.
    Explicit(ExplicitKernel),
    /// Reset chain on {0, 1, 2, ...}: from `u`, move to `u+1` with
    /// probability `1 - epsilon`, otherwise restart from a geometric law
    /// on {0, 1, ...} with success parameter `nu_geometric_p`. Every row
    /// has infinite support; one step already minorizes by
    /// `epsilon * Geometric(nu_geometric_p)`.
    ResetChain { epsilon: f64, nu_geometric_p: f64 },
}

/// Row table of an explicit kernel. Rows are kept both as float measures
/// (for simulation) and as exact rationals (for enumeration).
#[derive(Debug, Clone)]
pub struct ExplicitKernel {
    num_colors: u32,
    rows: Vec<SparseMeasure>,
    exact_rows: Vec<Vec<(ColorId, BigRational)>>,
    rational_input: bool,
}

impl ExplicitKernel {
    pub fn num_colors(&self) -> u32 {
        self.num_colors
    }
}

impl Kernel {
    /// Builds an explicit kernel from exact entries `(row, color, weight)`.
    /// Weights for a repeated position accumulate. Every row must sum to 1
    /// within [`ROW_SUM_TOL`].
    pub fn from_exact_entries(
        num_colors: u32,
        entries: impl IntoIterator<Item = (u32, u32, BigRational)>,
        rational_input: bool,
    ) -> Result<Kernel> {
        if num_colors == 0 {
            return Err(Error::InvalidParameter("kernel needs at least one color"));
        }
        let mut exact_rows: Vec<Vec<(ColorId, BigRational)>> =
            vec![Vec::new(); num_colors as usize];
        for (u, v, w) in entries {
            for &c in &[u, v] {
                if c >= num_colors {
                    return Err(Error::ColorOutOfRange {
                        color: ColorId(c),
                        num_colors,
                    });
                }
            }
            if w < BigRational::zero() {
                return Err(Error::NegativeEntry {
                    state: ColorId(u),
                    color: ColorId(v),
                });
            }
            let row = &mut exact_rows[u as usize];
            match row.iter_mut().find(|(c, _)| *c == ColorId(v)) {
                Some((_, slot)) => *slot += w,
                None => row.push((ColorId(v), w)),
            }
        }
        let mut rows = Vec::with_capacity(num_colors as usize);
        for (u, row) in exact_rows.iter_mut().enumerate() {
            row.sort_by_key(|(c, _)| *c);
            row.retain(|(_, w)| !w.is_zero());
            let sum = row
                .iter()
                .fold(BigRational::zero(), |a, (_, w)| a + w)
                .to_f64()
                .unwrap_or(f64::NAN);
            let gap = (sum - 1.0).abs();
            if gap > ROW_SUM_TOL || gap.is_nan() {
                return Err(Error::NonStochasticRow {
                    state: ColorId(u as u32),
                    sum,
                });
            }
            rows.push(SparseMeasure::from_pairs(
                row.iter().map(|(c, w)| (*c, w.to_f64().unwrap_or(0.0))),
            )?);
        }
        Ok(Kernel::Explicit(ExplicitKernel {
            num_colors,
            rows,
            exact_rows,
            rational_input,
        }))
    }

    /// Builds an explicit kernel from dense float rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Kernel> {
        let k = rows.len() as u32;
        let mut entries = Vec::new();
        for (u, row) in rows.iter().enumerate() {
            for (v, &w) in row.iter().enumerate() {
                if w < 0.0 || w.is_nan() {
                    return Err(Error::NegativeEntry {
                        state: ColorId(u as u32),
                        color: ColorId(v as u32),
                    });
                }
                if w != 0.0 {
                    entries.push((u as u32, v as u32, ratio_from_f64(w)?));
                }
            }
        }
        Kernel::from_exact_entries(k, entries, false)
    }

    /// The identity kernel on `num_colors` colors (draws reinforce only
    /// their own color).
    pub fn identity(num_colors: u32) -> Result<Kernel> {
        Kernel::from_exact_entries(
            num_colors,
            (0..num_colors).map(|u| (u, u, BigRational::one())),
            true,
        )
    }

    /// Reset chain; see [`Kernel::ResetChain`].
    pub fn reset_chain(epsilon: f64, nu_geometric_p: f64) -> Result<Kernel> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(
                "reset-chain epsilon must be in (0, 1]",
            ));
        }
        if !(nu_geometric_p > 0.0 && nu_geometric_p < 1.0) {
            return Err(Error::InvalidParameter(
                "reset-chain nu_geometric_p must be in (0, 1)",
            ));
        }
        Ok(Kernel::ResetChain {
            epsilon,
            nu_geometric_p,
        })
    }

    /// Star-walk replacement rule for a hub-and-spokes walk: row 0 spreads
    /// mass `p[j]` on color `j`, and every other row is a point mass at 0.
    /// Materializes as an explicit kernel over `p.len()` colors.
    pub fn star_walk_exact(p: Vec<BigRational>, rational_input: bool) -> Result<Kernel> {
        let k = p.len() as u32;
        if k == 0 {
            return Err(Error::InvalidParameter(
                "star-walk needs a nonempty p vector",
            ));
        }
        let mut entries: Vec<(u32, u32, BigRational)> = p
            .into_iter()
            .enumerate()
            .map(|(j, w)| (0, j as u32, w))
            .collect();
        for u in 1..k {
            entries.push((u, 0, BigRational::one()));
        }
        Kernel::from_exact_entries(k, entries, rational_input)
    }

    /// Star-walk rule from float probabilities.
    pub fn star_walk(p: &[f64]) -> Result<Kernel> {
        let exact: Result<Vec<BigRational>> = p.iter().map(|&w| ratio_from_f64(w)).collect();
        Kernel::star_walk_exact(exact?, false)
    }

    /// Number of colors for explicit kernels; `None` when rows live on all
    /// of {0, 1, 2, ...}.
    pub fn num_colors(&self) -> Option<u32> {
        match self {
            Kernel::Explicit(k) => Some(k.num_colors),
            Kernel::ResetChain { .. } => None,
        }
    }

    /// Whether every row has finite support exactly representable in memory.
    pub fn has_finite_rows(&self) -> bool {
        matches!(self, Kernel::Explicit(_))
    }

    /// Whether the kernel entries are exactly the rationals written by the
    /// user (true for parsed text with decimal/ratio entries).
    pub fn is_rational_input(&self) -> bool {
        match self {
            Kernel::Explicit(k) => k.rational_input,
            Kernel::ResetChain { .. } => false,
        }
    }

    /// The row `R(u, .)` as a float measure. Generator rows with infinite
    /// support are truncated so that at most `row_tol` mass is discarded;
    /// explicit rows are returned in full and ignore `row_tol`.
    pub fn row(&self, u: ColorId, row_tol: f64) -> Result<SparseMeasure> {
        match self {
            Kernel::Explicit(k) => {
                if u.0 >= k.num_colors {
                    return Err(Error::ColorOutOfRange {
                        color: u,
                        num_colors: k.num_colors,
                    });
                }
                Ok(k.rows[u.0 as usize].clone())
            }
            Kernel::ResetChain {
                epsilon,
                nu_geometric_p,
            } => {
                if !(row_tol > 0.0 && row_tol <= 1e-2) {
                    return Err(Error::InvalidParameter("row_tol must be in (0, 1e-2]"));
                }
                let p = *nu_geometric_p;
                // Keep geometric atoms until the remaining tail mass
                // epsilon * (1-p)^K drops below row_tol.
                let k_tail = ((row_tol / epsilon).ln() / (1.0 - p).ln()).ceil().max(1.0);
                let mut m = SparseMeasure::new();
                let mut atom = epsilon * p;
                for k in 0..k_tail as u32 {
                    m.add_weight(ColorId(k), atom)?;
                    atom *= 1.0 - p;
                }
                m.add_weight(u.succ(), 1.0 - epsilon)?;
                Ok(m)
            }
        }
    }

    /// The row as exact rationals; errors for rows with unbounded support.
    pub fn exact_row(&self, u: ColorId) -> Result<&[(ColorId, BigRational)]> {
        match self {
            Kernel::Explicit(k) => {
                if u.0 >= k.num_colors {
                    return Err(Error::ColorOutOfRange {
                        color: u,
                        num_colors: k.num_colors,
                    });
                }
                Ok(&k.exact_rows[u.0 as usize])
            }
            Kernel::ResetChain { .. } => Err(Error::InfiniteSupportReachable { state: u }),
        }
    }

    /// One application `mu -> mu R` with per-row truncation `row_tol` and a
    /// support cap on the result.
    fn apply(&self, mu: &SparseMeasure, row_tol: f64, cap: usize) -> Result<SparseMeasure> {
        let mut out = SparseMeasure::new();
        for (u, w) in mu.iter() {
            let row = self.row(u, row_tol)?;
            out.add_scaled(&row, w)?;
        }
        if out.support_len() > cap {
            return Err(Error::TruncationOverflow {
                support: out.support_len(),
                cap,
            });
        }
        Ok(out)
    }

    /// `start R^n`, losing at most `mass_tol` of the starting mass to row
    /// truncation across all `n` steps.
    pub fn propagate(
        &self,
        start: &SparseMeasure,
        n: usize,
        mass_tol: f64,
    ) -> Result<SparseMeasure> {
        if !(mass_tol > 0.0 && mass_tol <= 1e-2) {
            return Err(Error::InvalidParameter("mass_tol must be in (0, 1e-2]"));
        }
        let cap = support_cap();
        let row_tol = mass_tol / n.max(1) as f64;
        let mut mu = start.clone();
        for _ in 0..n {
            mu = self.apply(&mu, row_tol, cap)?;
        }
        Ok(mu)
    }

    /// The `n`-step transition row `R^n(u, .)`; `n = 0` is the point mass.
    pub fn n_step_row(&self, u: ColorId, n: usize, mass_tol: f64) -> Result<SparseMeasure> {
        // Materialize the one-step row first so out-of-range colors fail
        // even at n = 0.
        let delta = SparseMeasure::point_mass(u, 1.0)?;
        if n == 0 {
            self.row(u, 1e-3)?;
            return Ok(delta);
        }
        self.propagate(&delta, n, mass_tol)
    }

    /// Stationary distribution by power iteration, truncating supports
    /// adaptively. Starts from the uniform distribution on the initial
    /// support (all colors for explicit kernels, a fixed window at the
    /// bottom for generator rules) and stops when the stationarity defect
    /// `||mu R - mu||_1` of the returned measure is below `tol`.
    pub fn stationary_distribution(
        &self,
        tol: f64,
        support_cap_hint: usize,
    ) -> Result<SparseMeasure> {
        if !(tol > 0.0 && tol <= 1e-2) {
            return Err(Error::InvalidParameter(
                "stationary tol must be in (0, 1e-2]",
            ));
        }
        let cap = support_cap_hint.min(support_cap()).max(1);
        let init_support = match self {
            Kernel::Explicit(k) => k.num_colors,
            Kernel::ResetChain { .. } => GENERATOR_INIT_SUPPORT,
        };
        if init_support as usize > cap {
            return Err(Error::TruncationOverflow {
                support: init_support as usize,
                cap,
            });
        }
        let uniform = 1.0 / init_support as f64;
        let mut mu = SparseMeasure::from_pairs((0..init_support).map(|c| (c, uniform)))?;
        // Row truncation well below tol so the reported defect stays honest.
        let row_tol = (tol * 1e-2).max(1e-15);
        let mut residual = f64::INFINITY;
        for _ in 0..STATIONARY_MAX_ITERS {
            let next = self.apply(&mu, row_tol, cap)?;
            residual = next.l1_distance(&mu);
            // The defect of `mu` against the untruncated kernel is at most
            // residual + row_tol, so stop safely inside tol.
            if residual + row_tol <= 0.9 * tol {
                return Ok(mu);
            }
            mu = next.normalized()?;
            mu.prune(PRUNE_FLOOR);
        }
        Err(Error::NoConvergence {
            iterations: STATIONARY_MAX_ITERS,
            residual,
            tol,
        })
    }

    /// [`Kernel::stationary_distribution`] with the default tolerance:
    /// 1e-10 for explicit kernels, 1e-8 for generator rules (whose rows are
    /// themselves truncated).
    pub fn stationary_default(&self) -> Result<SparseMeasure> {
        let tol = if self.has_finite_rows() { 1e-10 } else { 1e-8 };
        self.stationary_distribution(tol, support_cap())
    }

    /// Fits a uniform-ergodicity certificate `sup |R^n(u,v) - pi(v)| <= C
    /// rho^n` from probe rows. The sup-error `e_n` is maximized over
    /// `probe_states x probe_colors`; `rho` comes from a least-squares fit
    /// of `log e_n` against `n`, and `C` is then raised until the bound
    /// dominates every measured point exactly.
    ///
    /// Errors with [`Error::NoDecay`] when the probe errors have not at
    /// least halved by `n_max`, and passes through stationary-distribution
    /// failures.
    pub fn fit_ergodicity_certificate(
        &self,
        probe_states: &[ColorId],
        probe_colors: &[ColorId],
        n_max: usize,
    ) -> Result<ErgodicityCertificate> {
        if probe_states.is_empty() || probe_colors.is_empty() {
            return Err(Error::InvalidParameter("certificate needs nonempty probes"));
        }
        if n_max < 2 {
            return Err(Error::InvalidParameter("certificate needs n_max >= 2"));
        }
        let pi = self.stationary_default()?;
        let cap = support_cap();
        let mut sup_errors = vec![0.0f64; n_max];
        for &u in probe_states {
            let mut mu = SparseMeasure::point_mass(u, 1.0)?;
            for e in sup_errors.iter_mut() {
                mu = self.apply(&mu, 1e-14, cap)?;
                for &v in probe_colors {
                    *e = e.max((mu.get(v) - pi.get(v)).abs());
                }
            }
        }
        ErgodicityCertificate::fit(sup_errors)
    }

    /// Doeblin minorization at time `n0`: the largest `epsilon` and
    /// probability measure `nu` with `R^{n0}(u, .) >= epsilon nu` for every
    /// probe state, i.e. the colorwise infimum of the probed `n0`-step
    /// rows. Returns `None` when the infimum has zero mass (no minorization
    /// visible from these probes). Truncation only shrinks the infimum, so
    /// a returned certificate is sound.
    pub fn check_doeblin(
        &self,
        n0: usize,
        probe_states: &[ColorId],
    ) -> Result<Option<DoeblinCertificate>> {
        if n0 == 0 {
            return Err(Error::InvalidParameter("doeblin check needs n0 >= 1"));
        }
        if probe_states.is_empty() {
            return Err(Error::InvalidParameter("doeblin check needs probe states"));
        }
        let mut inf: Option<SparseMeasure> = None;
        for &u in probe_states {
            let row = self.n_step_row(u, n0, 1e-12)?;
            inf = Some(match inf {
                None => row,
                Some(prev) => {
                    let mut m = SparseMeasure::new();
                    for (c, w) in prev.iter() {
                        let other = row.get(c);
                        if other > 0.0 {
                            m.add_weight(c, w.min(other))?;
                        }
                    }
                    m
                }
            });
        }
        let inf = inf.expect("probe_states nonempty");
        let epsilon = inf.total_mass();
        if epsilon <= 0.0 {
            return Ok(None);
        }
        Ok(Some(DoeblinCertificate {
            n0,
            epsilon,
            nu: inf.scaled(1.0 / epsilon)?,
        }))
    }

    /// Builds a named generator kernel from `key=value` parameters, as used
    /// by the text format and the command line.
    ///
    /// Known names: `reset-chain` (keys `epsilon`, `nu_geometric_p`) and
    /// `star-walk` (key `p`, a comma-separated probability vector).
    pub fn from_generator_params(name: &str, params: &[(String, String)]) -> Result<Kernel> {
        let mut seen = Vec::new();
        for (k, _) in params {
            if seen.contains(&k.as_str()) {
                return Err(Error::Parse(format!("duplicate generator key `{k}`")));
            }
            seen.push(k);
        }
        let get = |key: &str| -> Result<&str> {
            params
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Parse(format!("generator `{name}` needs key `{key}`")))
        };
        let expect_keys = |keys: &[&str]| -> Result<()> {
            for (k, _) in params {
                if !keys.contains(&k.as_str()) {
                    return Err(Error::Parse(format!(
                        "unknown key `{k}` for generator `{name}`"
                    )));
                }
            }
            Ok(())
        };
        match name {
            "reset-chain" => {
                expect_keys(&["epsilon", "nu_geometric_p"])?;
                let epsilon = parse_ratio(get("epsilon")?)?
                    .to_f64()
                    .ok_or_else(|| Error::Parse("epsilon out of range".into()))?;
                let p = parse_ratio(get("nu_geometric_p")?)?
                    .to_f64()
                    .ok_or_else(|| Error::Parse("nu_geometric_p out of range".into()))?;
                Kernel::reset_chain(epsilon, p)
            }
            "star-walk" => {
                expect_keys(&["p"])?;
                let p: Result<Vec<BigRational>> = get("p")?.split(',').map(parse_ratio).collect();
                Kernel::star_walk_exact(p?, true)
            }
            other => Err(Error::Parse(format!("unknown generator `{other}`"))),
        }
    }

    /// Parses the kernel text format:
    ///
    /// ```text
    /// # comment
    /// kernel explicit 2
    /// 0 0 0.9
    /// 0 1 0.1
    /// 1 0 1/5
    /// 1 1 4/5
    /// ```
    ///
    /// or `kernel generator <name> key=value ...` on a single line.
    /// Entry weights are read exactly (decimals and ratios denote the
    /// rational they spell).
    pub fn parse(text: &str) -> Result<Kernel> {
        let mut lines = text
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty kernel text".into()))?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        match tokens.as_slice() {
            ["kernel", "explicit", k] => {
                let num_colors: u32 = k
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad color count `{k}`")))?;
                let mut entries = Vec::new();
                for line in lines {
                    let fields: Vec<&str> = line.split_whitespace().collect();
                    let [u, v, w] = fields.as_slice() else {
                        return Err(Error::Parse(format!(
                            "expected `state color prob`, got `{line}`"
                        )));
                    };
                    let u: u32 = u
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad state index `{u}`")))?;
                    let v: u32 = v
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad color index `{v}`")))?;
                    entries.push((u, v, parse_ratio(w)?));
                }
                Kernel::from_exact_entries(num_colors, entries, true)
            }
            ["kernel", "generator", name, rest @ ..] => {
                if lines.next().is_some() {
                    return Err(Error::Parse("generator kernels take no entry lines".into()));
                }
                let params: Result<Vec<(String, String)>> = rest
                    .iter()
                    .map(|kv| {
                        kv.split_once('=')
                            .map(|(k, v)| (k.to_string(), v.to_string()))
                            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{kv}`")))
                    })
                    .collect();
                Kernel::from_generator_params(name, &params?)
            }
            _ => Err(Error::Parse(format!("bad kernel header `{header}`"))),
        }
    }

    /// Renders the kernel in the [`Kernel::parse`] text format. Kernels
    /// built from exact text round-trip exactly; float-built kernels render
    /// shortest-round-trip decimals.
    pub fn to_text(&self) -> String {
        match self {
            Kernel::Explicit(k) => {
                let mut out = format!("kernel explicit {}\n", k.num_colors);
                for (u, row) in k.exact_rows.iter().enumerate() {
                    for (v, w) in row {
                        if k.rational_input {
                            out.push_str(&format!("{u} {v} {w}\n"));
                        } else {
                            let wf = w.to_f64().unwrap_or(f64::NAN);
                            out.push_str(&format!("{u} {v} {wf}\n"));
                        }
                    }
                }
                out
            }
            Kernel::ResetChain {
                epsilon,
                nu_geometric_p,
            } => format!(
                "kernel generator reset-chain epsilon={epsilon} nu_geometric_p={nu_geometric_p}\n"
            ),
        }
    }

    /// Reads a kernel file (the [`Kernel::parse`] format).
    pub fn from_file(path: &std::path::Path) -> Result<Kernel> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Kernel::parse(&text)
    }

    /// Probe states for diagnostics when the caller has no preference: all
    /// colors of a small explicit kernel, or a window at the bottom of the
    /// color set, capped at `max_probes`.
    pub fn default_probes(&self, max_probes: u32) -> Vec<ColorId> {
        let hi = match self.num_colors() {
            Some(k) => k.min(max_probes),
            None => max_probes,
        };
        (0..hi).map(ColorId).collect()
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kernel> {
        Kernel::parse(s)
    }
}

/// A fitted uniform-ergodicity certificate: `sup_u |R^n(u,v) - pi(v)| <= c
/// rho^n` for all measured `n`, with the measured sup-errors retained as
/// evidence.
#[derive(Debug, Clone)]
pub struct ErgodicityCertificate {
    pub c: f64,
    pub rho: f64,
    /// Inclusive range of n over which `sup_errors` were measured.
    pub n_range: (usize, usize),
    /// `sup_errors[i]` is the measured error at `n = n_range.0 + i`.
    pub sup_errors: Vec<f64>,
}

impl ErgodicityCertificate {
    fn fit(sup_errors: Vec<f64>) -> Result<ErgodicityCertificate> {
        let n_max = sup_errors.len();
        let e1 = sup_errors[0];
        let elast = sup_errors[n_max - 1];
        if sup_errors.iter().all(|&e| e <= CERTIFICATE_FLOOR) {
            // Mixing is exact at the first step (up to float noise): any
            // contraction rate certifies; report a canonical one.
            return Ok(ErgodicityCertificate {
                c: CERTIFICATE_FLOOR,
                rho: 0.5,
                n_range: (1, n_max),
                sup_errors,
            });
        }
        if elast > e1 / 2.0 {
            return Err(Error::NoDecay);
        }
        let pts: Vec<(f64, f64)> = sup_errors
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > CERTIFICATE_FLOOR)
            .map(|(i, &e)| ((i + 1) as f64, e.ln()))
            .collect();
        let rho = if pts.len() < 2 {
            // Decay so fast that only one point sits above the floor.
            0.5
        } else {
            let n = pts.len() as f64;
            let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
            let slope = sxy / sxx;
            let rho = slope.exp();
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::NoDecay);
            }
            rho
        };
        let mut c = CERTIFICATE_FLOOR;
        for (i, &e) in sup_errors.iter().enumerate() {
            c = c.max(e / rho.powi((i + 1) as i32));
        }
        // Rounding in c = max(e / rho^n) can leave c * rho^n a hair under
        // some e_n; nudge up until the bound dominates the evidence exactly.
        let dominates = |c: f64| {
            sup_errors
                .iter()
                .enumerate()
                .all(|(i, &e)| e <= c * rho.powi((i + 1) as i32))
        };
        while !dominates(c) {
            c = f64::from_bits(c.to_bits() + 1);
        }
        Ok(ErgodicityCertificate {
            c,
            rho,
            n_range: (1, n_max),
            sup_errors,
        })
    }

    /// The certified bound at horizon `n`.
    pub fn bound_at(&self, n: usize) -> f64 {
        self.c * self.rho.powi(n as i32)
    }

    /// Whether the bound dominates every measured sup-error (an invariant;
    /// exposed so reports can assert it).
    pub fn dominates_evidence(&self) -> bool {
        self.sup_errors
            .iter()
            .enumerate()
            .all(|(i, &e)| e <= self.bound_at(self.n_range.0 + i))
    }
}

/// A verified Doeblin minorization `R^{n0}(u, .) >= epsilon * nu` over the
/// probed states.
#[derive(Debug, Clone)]
pub struct DoeblinCertificate {
    pub n0: usize,
    pub epsilon: f64,
    pub nu: SparseMeasure,
}
