//! Color processes indexed by a recursive tree.
//!
//! Given a tree with root `o`, a kernel `R`, and an initial measure `U_0`
//! with mass `t`, each vertex gets a color: children of the root sample from
//! `U_0 / t`, and every other vertex samples from the kernel row of its
//! parent's color. Conditionally on the tree, colors propagate along edges
//! as a Markov chain — one kernel application per edge below the first —
//! so the marginal at a vertex of depth `d` is `(U_0 / t) R^{d-1}`.
//!
//! The depth sequence of vertex colors in arrival order reproduces the urn's
//! draw sequence in law; [`exact_law`] computes that law by enumerating tree
//! shapes and color assignments in exact rational arithmetic.

use num::rational::BigRational;
use num::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::ExactMeasure;
use crate::kernel::{Kernel, STEP_ROW_TOL};
use crate::law::{SequenceLaw, ENUM_CAP};
use crate::measure::{ColorId, SparseMeasure};
use crate::rrt::{enumerate_trees, RecursiveTree, Vertex};

/// Colors assigned to the attached vertices of one tree, in arrival order.
#[derive(Debug, Clone, PartialEq)]
pub struct BmcTrace {
    colors: Vec<ColorId>,
}

impl BmcTrace {
    pub fn color(&self, v: Vertex) -> Result<ColorId> {
        match v {
            Vertex::Node(j) if j < self.colors.len() => Ok(self.colors[j]),
            _ => Err(Error::UnknownVertex(v)),
        }
    }

    pub fn colors(&self) -> &[ColorId] {
        &self.colors
    }
}

/// Samples colors for every attached vertex of `tree`. Parents precede
/// children in arrival order, so a single left-to-right pass suffices; one
/// uniform draw is consumed per vertex.
pub fn run<R: Rng + ?Sized>(
    tree: &RecursiveTree,
    kernel: &Kernel,
    u0: &SparseMeasure,
    rng: &mut R,
) -> Result<BmcTrace> {
    let t = u0.total_mass();
    if t <= 0.0 || t.is_nan() {
        return Err(Error::ZeroMass);
    }
    let mut colors: Vec<ColorId> = Vec::with_capacity(tree.len());
    for j in 0..tree.len() {
        let parent = tree
            .parent(Vertex::Node(j))?
            .expect("attached vertices have parents");
        let color = match parent {
            Vertex::Root => u0.sample(t, rng.random::<f64>()),
            Vertex::Node(i) => {
                let row = kernel.row(colors[i], STEP_ROW_TOL)?;
                row.sample(row.total_mass(), rng.random::<f64>())
            }
        };
        colors.push(color);
    }
    Ok(BmcTrace { colors })
}

/// Marginal law of the color at `v`: `(U_0 / t) R^{d(v) - 1}`, where `d(v)`
/// is the depth of `v`. The root carries no color, so `v` must be attached.
pub fn vertex_marginal(
    tree: &RecursiveTree,
    kernel: &Kernel,
    u0: &SparseMeasure,
    v: Vertex,
    mass_tol: f64,
) -> Result<SparseMeasure> {
    let depth = tree.depth(v)?;
    if depth == 0 {
        return Err(Error::InvalidParameter("the root has no color"));
    }
    let start = u0.normalized()?;
    kernel.propagate(&start, depth as usize - 1, mass_tol)
}

/// Exact law of the colors `(W_0, ..., W_horizon)` in arrival order,
/// averaging over all tree shapes: sum over trees of (shape probability) x
/// (color-assignment probability). Requires finite kernel rows and
/// `horizon <=` [`ENUM_CAP`].
pub fn exact_law(u0: &ExactMeasure, kernel: &Kernel, horizon: usize) -> Result<SequenceLaw> {
    if horizon > ENUM_CAP {
        return Err(Error::HorizonTooLarge {
            horizon,
            cap: ENUM_CAP,
        });
    }
    let t = u0.total_mass();
    if t.is_zero() {
        return Err(Error::ZeroMass);
    }
    // Root-child color law U_0 / t.
    let root_law: Vec<(ColorId, BigRational)> = u0.iter().map(|(c, w)| (c, w / &t)).collect();
    let rational = u0.is_rational_input() && kernel.is_rational_input();
    let mut law = SequenceLaw::new(horizon, rational);
    for (tree, shape_prob) in enumerate_trees(&t, horizon)? {
        let mut colors: Vec<ColorId> = Vec::with_capacity(horizon + 1);
        assign(kernel, &tree, &root_law, &mut law, &mut colors, shape_prob)?;
    }
    Ok(law)
}

/// Depth-first product over color assignments of one tree shape.
fn assign(
    kernel: &Kernel,
    tree: &RecursiveTree,
    root_law: &[(ColorId, BigRational)],
    law: &mut SequenceLaw,
    colors: &mut Vec<ColorId>,
    prob: BigRational,
) -> Result<()> {
    let j = colors.len();
    if j == tree.len() {
        law.add_atom(colors.clone(), prob);
        return Ok(());
    }
    let parent = tree
        .parent(Vertex::Node(j))?
        .expect("attached vertices have parents");
    let conditional: Vec<(ColorId, BigRational)> = match parent {
        Vertex::Root => root_law.to_vec(),
        Vertex::Node(i) => kernel.exact_row(colors[i])?.to_vec(),
    };
    for (c, w) in conditional {
        if w.is_zero() {
            continue;
        }
        colors.push(c);
        assign(kernel, tree, root_law, law, colors, prob.clone() * &w)?;
        colors.pop();
    }
    Ok(())
}
