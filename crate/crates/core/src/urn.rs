//! The balanced urn process.
//!
//! State: a configuration `U_n` (a finite measure on colors) whose total
//! mass is `n + t` after `n` draws, where `t` is the initial mass. Each step
//! draws a color `Z_n` with probability `U_n(z) / (n + t)` and adds the
//! kernel row `R(Z_n, .)` to the configuration; rows sum to 1, so every step
//! adds exactly one unit of mass ("balanced").
//!
//! Simulation runs in floats with one uniform draw per step. The exact law
//! of the first few draws is computed separately by rational enumeration in
//! [`exact_law`], which is what coupling identities are checked against.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::rational::BigRational;
use num::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::ExactMeasure;
use crate::kernel::{Kernel, STEP_ROW_TOL};
use crate::law::{SequenceLaw, ENUM_CAP};
use crate::measure::{ColorId, SparseMeasure};

/// Relative tolerance on the mass identity `|U_n| = n + t`. Float error in
/// the running sum grows with n, so the defect is measured relative to the
/// current mass.
pub const MASS_REL_TOL: f64 = 1e-9;

/// A balanced urn mid-run.
#[derive(Debug, Clone)]
pub struct UrnState {
    config: SparseMeasure,
    t0: f64,
    steps: u64,
    kernel: Arc<Kernel>,
}

impl UrnState {
    /// Starts an urn from an initial configuration with positive mass. For
    /// explicit kernels the configuration must live on the kernel's colors.
    pub fn init(u0: SparseMeasure, kernel: Arc<Kernel>) -> Result<Self> {
        let t0 = u0.total_mass();
        if t0 <= 0.0 || t0.is_nan() {
            return Err(Error::ZeroMass);
        }
        if let (Some(k), Some(max)) = (kernel.num_colors(), u0.max_color()) {
            if max.0 >= k {
                return Err(Error::ColorOutOfRange {
                    color: max,
                    num_colors: k,
                });
            }
        }
        Ok(UrnState {
            config: u0,
            t0,
            steps: 0,
            kernel,
        })
    }

    pub fn config(&self) -> &SparseMeasure {
        &self.config
    }

    pub fn kernel(&self) -> &Arc<Kernel> {
        &self.kernel
    }

    /// Initial mass `t`.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Number of completed draws `n`.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// The exact running total `n + t` (used as the sampling divisor, so
    /// draw probabilities never drift with accumulated float error).
    pub fn total_mass(&self) -> f64 {
        self.t0 + self.steps as f64
    }

    /// Relative defect of the mass identity `|U_n| = n + t`.
    pub fn mass_defect(&self) -> f64 {
        (self.config.total_mass() - self.total_mass()).abs() / self.total_mass()
    }

    /// Samples the next color without touching the state. Consumes exactly
    /// one uniform draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ColorId {
        self.config.sample(self.total_mass(), rng.random::<f64>())
    }

    /// Applies a draw: adds the row `R(z, .)` and advances the clock. Split
    /// from [`UrnState::draw`] so couplings can interleave other bookkeeping
    /// between the sample and the update.
    pub fn apply_draw(&mut self, z: ColorId) -> Result<()> {
        let row = self.kernel.row(z, STEP_ROW_TOL)?;
        self.config.add_scaled(&row, 1.0)?;
        self.steps += 1;
        debug_assert!(self.mass_defect() <= MASS_REL_TOL);
        Ok(())
    }

    /// One step: draw a color, reinforce with its row, return the draw.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<ColorId> {
        let z = self.draw(rng);
        self.apply_draw(z)?;
        Ok(z)
    }

    /// The configuration normalized to a probability measure (the quantity
    /// that converges to the stationary distribution of the kernel).
    pub fn normalized_config(&self) -> Result<SparseMeasure> {
        self.config.scaled(1.0 / self.total_mass())
    }

    /// Runs `n_steps` draws, recording the full draw sequence.
    pub fn run<R: Rng + ?Sized>(mut self, n_steps: u64, rng: &mut R) -> Result<UrnTrace> {
        let initial = self.config.clone();
        let mut draws = Vec::with_capacity(n_steps as usize);
        for _ in 0..n_steps {
            draws.push(self.step(rng)?);
        }
        Ok(UrnTrace {
            initial,
            draws,
            final_state: self,
        })
    }
}

/// The record of a finished run.
#[derive(Debug, Clone)]
pub struct UrnTrace {
    pub initial: SparseMeasure,
    pub draws: Vec<ColorId>,
    pub final_state: UrnState,
}

impl UrnTrace {
    /// Local time of a color: how many draws hit it.
    pub fn local_time(&self, v: ColorId) -> u64 {
        self.draws.iter().filter(|&&z| z == v).count() as u64
    }

    /// Local times of every drawn color.
    pub fn local_times(&self) -> BTreeMap<ColorId, u64> {
        let mut out = BTreeMap::new();
        for &z in &self.draws {
            *out.entry(z).or_insert(0u64) += 1;
        }
        out
    }

    /// Rebuilds the final configuration from the counting identity
    /// `U_n = U_0 + sum_k R(Z_k, .)`, independently of the running state.
    pub fn replay_config(&self) -> Result<SparseMeasure> {
        let kernel = &self.final_state.kernel;
        let mut config = self.initial.clone();
        for &z in &self.draws {
            config.add_scaled(&kernel.row(z, STEP_ROW_TOL)?, 1.0)?;
        }
        Ok(config)
    }
}

/// Exact law of the first `horizon + 1` draws `(Z_0, ..., Z_horizon)` by
/// rational enumeration of all draw sequences.
///
/// Requires a kernel with finite rows (errors with
/// [`Error::InfiniteSupportReachable`] otherwise) and `horizon <=`
/// [`ENUM_CAP`]. When both the initial configuration and the kernel carry
/// exactly-written rational entries, atom probabilities are exactly the
/// numbers determined by those inputs and sum to exactly 1.
pub fn exact_law(u0: &ExactMeasure, kernel: &Kernel, horizon: usize) -> Result<SequenceLaw> {
    if horizon > ENUM_CAP {
        return Err(Error::HorizonTooLarge {
            horizon,
            cap: ENUM_CAP,
        });
    }
    let t = u0.total_mass();
    if t.is_zero() || u0.is_empty() {
        return Err(Error::ZeroMass);
    }
    let rational = u0.is_rational_input() && kernel.is_rational_input();
    let mut law = SequenceLaw::new(horizon, rational);
    let config: BTreeMap<ColorId, BigRational> = u0.iter().map(|(c, w)| (c, w.clone())).collect();
    let mut prefix = Vec::with_capacity(horizon + 1);
    descend(
        kernel,
        &mut law,
        config,
        t,
        0,
        horizon,
        &mut prefix,
        BigRational::from_integer(1.into()),
    )?;
    Ok(law)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    kernel: &Kernel,
    law: &mut SequenceLaw,
    config: BTreeMap<ColorId, BigRational>,
    mass: BigRational,
    k: usize,
    horizon: usize,
    prefix: &mut Vec<ColorId>,
    prob: BigRational,
) -> Result<()> {
    for (&z, weight) in &config {
        let branch = prob.clone() * weight / &mass;
        if branch.is_zero() {
            continue;
        }
        prefix.push(z);
        if k == horizon {
            law.add_atom(prefix.clone(), branch);
        } else {
            let mut next = config.clone();
            for (c, w) in kernel.exact_row(z)? {
                let slot = next.entry(*c).or_insert_with(BigRational::zero);
                *slot += w;
            }
            let next_mass = mass.clone() + BigRational::from_integer(1.into());
            descend(kernel, law, next, next_mass, k + 1, horizon, prefix, branch)?;
        }
        prefix.pop();
    }
    Ok(())
}
