//! Weighted random recursive trees.
//!
//! The tree starts from a root `o` carrying weight `t > 0`; vertices
//! `w_0, w_1, ...` arrive one at a time, each carrying weight 1, and `w_k`
//! picks its parent at random: the root with probability `t / (k + t)`, an
//! earlier vertex `w_i` with probability `1 / (k + t)` each. The structure
//! is append-only — a parent array indexed by arrival order — so growing a
//! tree never invalidates vertex handles and snapshots are cheap.

use num::rational::BigRational;
use num::{BigInt, One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::ratio_from_f64;

/// Horizon cap for exact enumeration of tree shapes ((n+1)! shapes).
pub const ENUM_CAP: usize = 7;

/// A vertex handle: the root or the `j`-th arrival `w_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Root,
    Node(usize),
}

impl std::fmt::Display for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Vertex::Root => write!(f, "o"),
            Vertex::Node(j) => write!(f, "w{j}"),
        }
    }
}

/// A rooted tree built by recursive attachment. `len()` is the number of
/// attached vertices, so after growing to horizon `n` the tree holds
/// `w_0..w_n` and `len() == n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursiveTree {
    root_weight: f64,
    parents: Vec<Vertex>,
    depths: Vec<u32>,
}

impl RecursiveTree {
    /// An empty tree: just the weighted root.
    pub fn new(root_weight: f64) -> Result<Self> {
        if !(root_weight > 0.0 && root_weight.is_finite()) {
            return Err(Error::InvalidParameter("root weight must be positive"));
        }
        Ok(RecursiveTree {
            root_weight,
            parents: Vec::new(),
            depths: Vec::new(),
        })
    }

    pub fn root_weight(&self) -> f64 {
        self.root_weight
    }

    /// Number of attached (non-root) vertices.
    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    fn check(&self, v: Vertex) -> Result<()> {
        match v {
            Vertex::Root => Ok(()),
            Vertex::Node(j) if j < self.len() => Ok(()),
            _ => Err(Error::UnknownVertex(v)),
        }
    }

    /// Attaches the next vertex to an explicit parent (the deterministic
    /// building block under both random growth and exact enumeration).
    pub fn attach(&mut self, parent: Vertex) -> Result<Vertex> {
        self.check(parent)?;
        let depth = match parent {
            Vertex::Root => 1,
            Vertex::Node(i) => self.depths[i] + 1,
        };
        self.parents.push(parent);
        self.depths.push(depth);
        Ok(Vertex::Node(self.len() - 1))
    }

    /// Attaches the next vertex to a random parent: root with probability
    /// `t / (k + t)`, each earlier vertex with probability `1 / (k + t)`.
    /// One uniform draw; the unit interval is split as `[0, t)` for the
    /// root followed by one unit slot per vertex in arrival order.
    pub fn attach_random<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vertex {
        let k = self.len();
        let t = self.root_weight;
        let x = rng.random::<f64>() * (k as f64 + t);
        let parent = if x < t || k == 0 {
            Vertex::Root
        } else {
            Vertex::Node(((x - t) as usize).min(k - 1))
        };
        self.attach(parent).expect("parent is in the tree")
    }

    /// Grows a fresh tree to horizon `n` (vertices `w_0..w_n`).
    pub fn grow<R: Rng + ?Sized>(root_weight: f64, n: usize, rng: &mut R) -> Result<Self> {
        let mut tree = RecursiveTree::new(root_weight)?;
        for _ in 0..=n {
            tree.attach_random(rng);
        }
        Ok(tree)
    }

    /// Parent of a vertex; `None` for the root.
    pub fn parent(&self, v: Vertex) -> Result<Option<Vertex>> {
        self.check(v)?;
        Ok(match v {
            Vertex::Root => None,
            Vertex::Node(j) => Some(self.parents[j]),
        })
    }

    /// Graph distance from the root.
    pub fn depth(&self, v: Vertex) -> Result<u32> {
        self.check(v)?;
        Ok(match v {
            Vertex::Root => 0,
            Vertex::Node(j) => self.depths[j],
        })
    }

    /// Lowest common ancestor, by lifting the deeper vertex first.
    pub fn lca(&self, u: Vertex, w: Vertex) -> Result<Vertex> {
        self.check(u)?;
        self.check(w)?;
        let mut a = u;
        let mut b = w;
        while self.depth(a)? > self.depth(b)? {
            a = self.parents[match a {
                Vertex::Node(j) => j,
                Vertex::Root => unreachable!("root has depth 0"),
            }];
        }
        while self.depth(b)? > self.depth(a)? {
            b = self.parents[match b {
                Vertex::Node(j) => j,
                Vertex::Root => unreachable!("root has depth 0"),
            }];
        }
        while a != b {
            match (a, b) {
                (Vertex::Node(i), Vertex::Node(j)) => {
                    a = self.parents[i];
                    b = self.parents[j];
                }
                _ => unreachable!("equal depths reach the root together"),
            }
        }
        Ok(a)
    }

    /// Graph distance `d(u, w) = depth(u) + depth(w) - 2 depth(lca)`.
    pub fn distance(&self, u: Vertex, w: Vertex) -> Result<u32> {
        let l = self.lca(u, w)?;
        Ok(self.depth(u)? + self.depth(w)? - 2 * self.depth(l)?)
    }

    /// All vertices including the root, in arrival order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        std::iter::once(Vertex::Root).chain((0..self.len()).map(Vertex::Node))
    }

    /// A vertex of maximal depth (the root if the tree is empty).
    pub fn deepest(&self) -> Vertex {
        self.depths
            .iter()
            .enumerate()
            .max_by_key(|(_, &d)| d)
            .map(|(j, _)| Vertex::Node(j))
            .unwrap_or(Vertex::Root)
    }

    /// Serializes as one line `j parent` per vertex, with `-1` for the root:
    ///
    /// ```text
    /// 0 -1
    /// 1 0
    /// 2 0
    /// ```
    pub fn to_parent_text(&self) -> String {
        let mut out = String::new();
        for (j, p) in self.parents.iter().enumerate() {
            let p = match p {
                Vertex::Root => -1i64,
                Vertex::Node(i) => *i as i64,
            };
            out.push_str(&format!("{j} {p}\n"));
        }
        out
    }

    /// Parses the [`RecursiveTree::to_parent_text`] format. Vertices must
    /// appear in order and parents must precede children.
    pub fn from_parent_text(root_weight: f64, text: &str) -> Result<Self> {
        let mut tree = RecursiveTree::new(root_weight)?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(j), Some(p), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse(format!(
                    "expected `vertex parent`, got `{line}`"
                )));
            };
            let j: usize = j
                .parse()
                .map_err(|_| Error::Parse(format!("bad vertex index `{j}`")))?;
            if j != tree.len() {
                return Err(Error::Parse(format!(
                    "vertex {j} out of order (expected {})",
                    tree.len()
                )));
            }
            let p: i64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad parent index `{p}`")))?;
            let parent = if p < 0 {
                Vertex::Root
            } else {
                Vertex::Node(p as usize)
            };
            tree.attach(parent)
                .map_err(|_| Error::Parse(format!("parent {p} of vertex {j} not yet present")))?;
        }
        Ok(tree)
    }

    /// Exact attachment probability of this tree shape under root weight
    /// `t`: the product of `t / (k + t)` or `1 / (k + t)` over arrivals.
    pub fn shape_probability(&self, t: &BigRational) -> BigRational {
        let mut prob = BigRational::one();
        for (k, parent) in self.parents.iter().enumerate() {
            let denom = BigRational::from_integer(BigInt::from(k)) + t;
            let num = match parent {
                Vertex::Root => t.clone(),
                Vertex::Node(_) => BigRational::one(),
            };
            prob *= num / denom;
        }
        prob
    }
}

/// Exactly enumerates all `(n+1)!` trees on `w_0..w_n` with their
/// attachment probabilities. Probabilities sum to exactly 1.
pub fn enumerate_trees(
    root_weight: &BigRational,
    n: usize,
) -> Result<Vec<(RecursiveTree, BigRational)>> {
    if root_weight <= &BigRational::zero() {
        return Err(Error::InvalidParameter("root weight must be positive"));
    }
    if n > ENUM_CAP {
        return Err(Error::HorizonTooLarge {
            horizon: n,
            cap: ENUM_CAP,
        });
    }
    let t_f64 = root_weight.to_f64().unwrap_or(1.0);
    let mut shapes = vec![RecursiveTree::new(t_f64)?];
    for k in 0..=n {
        let mut grown = Vec::with_capacity(shapes.len() * (k + 1));
        for shape in shapes {
            for parent in std::iter::once(Vertex::Root).chain((0..k).map(Vertex::Node)) {
                let mut next = shape.clone();
                next.attach(parent).expect("parent precedes child");
                grown.push(next);
            }
        }
        shapes = grown;
    }
    Ok(shapes
        .into_iter()
        .map(|shape| {
            let p = shape.shape_probability(root_weight);
            (shape, p)
        })
        .collect())
}

/// [`enumerate_trees`] with a float root weight (converted exactly).
pub fn enumerate_trees_f64(
    root_weight: f64,
    n: usize,
) -> Result<Vec<(RecursiveTree, BigRational)>> {
    enumerate_trees(&ratio_from_f64(root_weight)?, n)
}
