//! Exact laws of finite color sequences.
//!
//! A [`SequenceLaw`] is the distribution of `(Z_0, ..., Z_h)` for a fixed
//! horizon `h`, stored as exact rational atom probabilities. Laws obtained
//! from different constructions (urn draws vs. depth sequences of a
//! tree-indexed chain) can then be compared in total variation exactly —
//! equality means the rational number zero, not a small float.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::measure::{ColorId, SparseMeasure};

/// Horizon cap for exact law enumeration (the atom count grows like
/// `support^(h+1)` and tree enumeration adds an `(h+1)!` factor).
pub const ENUM_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceLaw {
    horizon: usize,
    atoms: BTreeMap<Vec<ColorId>, BigRational>,
    rational_input: bool,
}

impl SequenceLaw {
    pub(crate) fn new(horizon: usize, rational_input: bool) -> Self {
        SequenceLaw {
            horizon,
            atoms: BTreeMap::new(),
            rational_input,
        }
    }

    pub(crate) fn add_atom(&mut self, seq: Vec<ColorId>, prob: BigRational) {
        debug_assert_eq!(seq.len(), self.horizon + 1);
        if !prob.is_zero() {
            *self.atoms.entry(seq).or_insert_with(BigRational::zero) += prob;
        }
    }

    /// The horizon `h`; atoms are sequences `(z_0, ..., z_h)`.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Whether the law was computed from exactly-written rational inputs
    /// (as opposed to converted floats).
    pub fn is_rational_input(&self) -> bool {
        self.rational_input
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms in lexicographic sequence order.
    pub fn atoms(&self) -> impl Iterator<Item = (&[ColorId], &BigRational)> + '_ {
        self.atoms.iter().map(|(s, p)| (s.as_slice(), p))
    }

    pub fn prob(&self, seq: &[ColorId]) -> BigRational {
        self.atoms
            .get(seq)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Exact sum of all atom probabilities (1 for a complete law).
    pub fn atom_sum(&self) -> BigRational {
        self.atoms.values().fold(BigRational::zero(), |a, p| a + p)
    }

    /// Marginal distribution of `Z_k` as a float measure.
    pub fn marginal(&self, k: usize) -> Result<SparseMeasure> {
        if k > self.horizon {
            return Err(Error::InvalidParameter("marginal index beyond horizon"));
        }
        let mut exact: BTreeMap<ColorId, BigRational> = BTreeMap::new();
        for (seq, p) in &self.atoms {
            *exact.entry(seq[k]).or_insert_with(BigRational::zero) += p;
        }
        SparseMeasure::from_pairs(
            exact
                .into_iter()
                .map(|(c, p)| (c, p.to_f64().unwrap_or(0.0))),
        )
    }

    /// Exact total-variation distance `(1/2) sum |p - q|` between two laws
    /// on the same horizon.
    pub fn tv_exact(&self, other: &SequenceLaw) -> Result<BigRational> {
        if self.horizon != other.horizon {
            return Err(Error::HorizonMismatch {
                left: self.horizon,
                right: other.horizon,
            });
        }
        let mut sum = BigRational::zero();
        for (seq, p) in &self.atoms {
            let diff = p - other.prob(seq);
            sum += if diff.is_negative() { -diff } else { diff };
        }
        for (seq, q) in &other.atoms {
            if !self.atoms.contains_key(seq) {
                sum += q.clone();
            }
        }
        Ok(sum / BigRational::from_integer(2.into()))
    }

    /// [`SequenceLaw::tv_exact`] projected to a float.
    pub fn tv(&self, other: &SequenceLaw) -> Result<f64> {
        Ok(self.tv_exact(other)?.to_f64().unwrap_or(f64::NAN))
    }

    /// Whether two laws on the same horizon are identical atom by atom.
    pub fn same_law(&self, other: &SequenceLaw) -> Result<bool> {
        Ok(self.tv_exact(other)?.is_zero())
    }
}
