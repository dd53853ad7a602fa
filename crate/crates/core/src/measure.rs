//! Sparse nonnegative measures on the countable color set {0, 1, 2, ...}.
//!
//! Urn configurations, kernel rows, and stationary distributions are all
//! finite measures with sparse support, so they share one representation: a
//! sorted map from color to strictly positive weight. Zero entries are never
//! stored, which makes the support of a measure exactly its key set and keeps
//! iteration order deterministic.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a color. Colors are labeled by consecutive integers from 0; a
/// kernel over finitely many colors uses {0, ..., k-1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorId(pub u32);

impl ColorId {
    /// The color one step up, used by shift-style kernel rules.
    pub fn succ(self) -> ColorId {
        ColorId(self.0 + 1)
    }
}

impl fmt::Display for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for ColorId {
    fn from(v: u32) -> Self {
        ColorId(v)
    }
}

/// A finite measure with nonnegative weights and finite support.
///
/// Not normalized in general: urn configurations have total mass `n + t`,
/// kernel rows have mass 1 up to truncation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseMeasure {
    entries: BTreeMap<ColorId, f64>,
}

impl SparseMeasure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Point mass of the given weight.
    pub fn point_mass(color: ColorId, weight: f64) -> Result<Self> {
        let mut m = Self::new();
        m.add_weight(color, weight)?;
        Ok(m)
    }

    /// Builds a measure from (color, weight) pairs. Weights for a repeated
    /// color accumulate; negative weights are rejected.
    pub fn from_pairs<I, C>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (C, f64)>,
        C: Into<ColorId>,
    {
        let mut m = Self::new();
        for (c, w) in pairs {
            m.add_weight(c.into(), w)?;
        }
        Ok(m)
    }

    /// Adds `weight >= 0` to a color.
    pub fn add_weight(&mut self, color: ColorId, weight: f64) -> Result<()> {
        if weight < 0.0 || weight.is_nan() {
            return Err(Error::NegativeWeight { color, weight });
        }
        if weight > 0.0 {
            *self.entries.entry(color).or_insert(0.0) += weight;
        }
        Ok(())
    }

    /// Adds `scale * other` entrywise; `scale` must be nonnegative.
    pub fn add_scaled(&mut self, other: &SparseMeasure, scale: f64) -> Result<()> {
        for (&c, &w) in &other.entries {
            self.add_weight(c, scale * w)?;
        }
        Ok(())
    }

    pub fn get(&self, color: ColorId) -> f64 {
        self.entries.get(&color).copied().unwrap_or(0.0)
    }

    /// Entries in increasing color order; every stored weight is positive.
    pub fn iter(&self) -> impl Iterator<Item = (ColorId, f64)> + '_ {
        self.entries.iter().map(|(&c, &w)| (c, w))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_color(&self) -> Option<ColorId> {
        self.entries.keys().next_back().copied()
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn scaled(&self, scale: f64) -> Result<Self> {
        let mut out = Self::new();
        out.add_scaled(self, scale)?;
        Ok(out)
    }

    /// The probability measure proportional to `self`.
    pub fn normalized(&self) -> Result<Self> {
        let mass = self.total_mass();
        if mass <= 0.0 {
            return Err(Error::ZeroMass);
        }
        self.scaled(1.0 / mass)
    }

    /// l1 distance, summing |difference| over the union of supports.
    pub fn l1_distance(&self, other: &SparseMeasure) -> f64 {
        let mut d = 0.0;
        let mut left = self.entries.iter().peekable();
        let mut right = other.entries.iter().peekable();
        loop {
            match (left.peek(), right.peek()) {
                (Some((&cl, &wl)), Some((&cr, &wr))) => {
                    if cl < cr {
                        d += wl;
                        left.next();
                    } else if cr < cl {
                        d += wr;
                        right.next();
                    } else {
                        d += (wl - wr).abs();
                        left.next();
                        right.next();
                    }
                }
                (Some((_, &w)), None) => {
                    d += w;
                    left.next();
                }
                (None, Some((_, &w))) => {
                    d += w;
                    right.next();
                }
                (None, None) => return d,
            }
        }
    }

    /// Largest absolute entrywise difference over the union of supports.
    pub fn linf_distance(&self, other: &SparseMeasure) -> f64 {
        let mut d: f64 = 0.0;
        for (c, w) in self.iter() {
            d = d.max((w - other.get(c)).abs());
        }
        for (c, w) in other.iter() {
            d = d.max((w - self.get(c)).abs());
        }
        d
    }

    /// True when both measures have identical supports and bitwise identical
    /// weights. Used by coupling tests that promise bit-exact agreement.
    pub fn bits_eq(&self, other: &SparseMeasure) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .iter()
                .zip(other.iter())
                .all(|((ca, wa), (cb, wb))| ca == cb && wa.to_bits() == wb.to_bits())
    }

    /// Samples a color proportionally to the weights given one uniform draw
    /// `u` in [0, 1). The caller supplies the divisor `total` (an urn uses
    /// the exact running total `n + t` rather than re-summing weights).
    ///
    /// Scans the cumulative weights in color order; if rounding pushes the
    /// threshold past the accumulated mass the last color is returned, so the
    /// map is total on nonempty measures.
    ///
    /// # Panics
    /// Panics when the measure is empty.
    pub fn sample(&self, total: f64, u: f64) -> ColorId {
        assert!(!self.is_empty(), "cannot sample from an empty measure");
        let threshold = u * total;
        let mut acc = 0.0;
        let mut last = ColorId(0);
        for (c, w) in self.iter() {
            acc += w;
            last = c;
            if threshold < acc {
                return c;
            }
        }
        last
    }

    /// Removes entries with weight below `floor` (used to keep truncated
    /// supports from accumulating negligible dust).
    pub(crate) fn prune(&mut self, floor: f64) {
        self.entries.retain(|_, w| *w >= floor);
    }

    /// Parses `"color:weight,color:weight,..."` with exact decimal or ratio
    /// weights, e.g. `"0:1"` or `"0:0.5,3:1/4"`.
    pub fn parse(text: &str) -> Result<Self> {
        let exact = crate::exact::ExactMeasure::parse(text)?;
        Ok(exact.to_sparse())
    }
}

impl fmt::Display for SparseMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, w) in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{}:{}", c, w)?;
            first = false;
        }
        Ok(())
    }
}
