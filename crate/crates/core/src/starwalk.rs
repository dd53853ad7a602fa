//! Reinforced random walk on a star graph with a loop at the hub.
//!
//! The walker sits on vertices `v_0, v_1, ...` of a star (hub `v_0`, loop
//! edge at the hub). From the hub it jumps to `v_j` with probability
//! proportional to the current vertex weights; from any spoke it returns to
//! the hub deterministically. Whenever an edge *into* the hub is taken —
//! the loop `(v_0, v_0)` included — the weight vector is reinforced by the
//! row `alpha_j` of the vertex `v_j` the walker came from (equivalently,
//! chose). Departures reinforce nothing.
//!
//! Between consecutive reinforcements the walker makes either one step (the
//! loop) or two (out and back), so the k-th update happens at a random time
//! `sigma_k` with increments in {1, 2}. Read off *at those update times*,
//! the weight sequence is exactly a balanced urn whose kernel rows are the
//! `alpha_j`: this module shares the urn's sampling and update code, making
//! the coupling bit-exact rather than merely in distribution. Consequences
//! checked here and in the integration tests: the k-th increment is 1 iff
//! the urn's k-th draw is color 0, `sigma_k/(k+1) -> 2 - pi_0`, and
//! `weights(j)/(n + delta) -> pi_j / (2 - pi_0)`.

use std::sync::Arc;

use rand::Rng;

use crate::error::Result;
use crate::kernel::Kernel;
use crate::measure::{ColorId, SparseMeasure};
use crate::urn::UrnState;

/// The walk state. Vertex indices coincide with urn colors: the hub is
/// color 0 and spoke `v_j` is color `j`.
#[derive(Debug, Clone)]
pub struct StarWalk {
    urn: UrnState,
    position: u32,
    time: u64,
    sigma: Vec<u64>,
    y: Vec<u8>,
}

impl StarWalk {
    /// Starts the walk at the hub with initial weights `delta0` (the urn's
    /// initial configuration) and reinforcement rows `alpha`.
    pub fn init(delta0: SparseMeasure, alpha: Arc<Kernel>) -> Result<Self> {
        Ok(StarWalk {
            urn: UrnState::init(delta0, alpha)?,
            position: 0,
            time: 0,
            sigma: Vec::new(),
            y: Vec::new(),
        })
    }

    /// Current vertex index.
    pub fn position(&self) -> u32 {
        self.position
    }

    /// Steps taken so far.
    pub fn time(&self) -> u64 {
        self.time
    }

    /// Completed weight updates (the coupled urn's draw count).
    pub fn updates(&self) -> u64 {
        self.urn.steps()
    }

    /// Current vertex weights (the coupled urn configuration).
    pub fn weights(&self) -> &SparseMeasure {
        self.urn.config()
    }

    /// Total initial weight `delta`.
    pub fn delta(&self) -> f64 {
        self.urn.t0()
    }

    /// Update times `sigma_1, sigma_2, ...` so far.
    pub fn sigma(&self) -> &[u64] {
        &self.sigma
    }

    /// Update increments `Y_k = sigma_k - sigma_{k-1}`, each 1 or 2.
    pub fn y(&self) -> &[u8] {
        &self.y
    }

    fn record_update(&mut self, z: ColorId, y: u8) -> Result<()> {
        self.urn.apply_draw(z)?;
        self.sigma.push(self.time + 1);
        self.y.push(y);
        Ok(())
    }

    /// One walk step. Consumes one uniform draw when leaving the hub
    /// (shared with the coupled urn's draw) and none on the forced return.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<u32> {
        if self.position == 0 {
            let z = self.urn.draw(rng);
            if z == ColorId(0) {
                // Loop edge: arrival at the hub in one step.
                self.record_update(z, 1)?;
            } else {
                self.position = z.0;
            }
        } else {
            let j = ColorId(self.position);
            self.position = 0;
            self.record_update(j, 2)?;
        }
        self.time += 1;
        Ok(self.position)
    }

    /// Runs `n_steps` steps, recording the position path.
    pub fn run<R: Rng + ?Sized>(mut self, n_steps: u64, rng: &mut R) -> Result<WalkTrace> {
        let mut positions = Vec::with_capacity(n_steps as usize + 1);
        positions.push(self.position);
        for _ in 0..n_steps {
            positions.push(self.step(rng)?);
        }
        Ok(WalkTrace {
            positions,
            final_state: self,
        })
    }
}

/// A finished walk: the position path plus the final state (which carries
/// the update times and the coupled urn).
#[derive(Debug, Clone)]
pub struct WalkTrace {
    /// `positions[n]` is the vertex at time n (so `positions[0] == 0`).
    pub positions: Vec<u32>,
    pub final_state: StarWalk,
}

impl WalkTrace {
    /// Number of updates by time `n`: `m(n) = #{k : sigma_k <= n}`.
    pub fn m(&self, n: u64) -> usize {
        self.final_state.sigma.partition_point(|&s| s <= n)
    }

    /// Count of one-step updates among the first `k`:
    /// `sigma~_k = #{j in [1,k] : Y_j = 1}`. By the coupling this equals
    /// the urn's local time of color 0 after k draws.
    pub fn sigma_tilde(&self, k: usize) -> u64 {
        self.final_state.y[..k].iter().filter(|&&y| y == 1).count() as u64
    }
}

/// The limit constants of the walk given the stationary distribution of the
/// reinforcement kernel: `sigma_k/(k+1) -> 2 - pi_0` and
/// `weights(j)/(n + delta) -> pi_j/(2 - pi_0)`.
pub fn star_limits(pi: &SparseMeasure) -> Result<(f64, SparseMeasure)> {
    let sigma_limit = 2.0 - pi.get(ColorId(0));
    Ok((sigma_limit, pi.scaled(1.0 / sigma_limit)?))
}
