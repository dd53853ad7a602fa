//! Exact rational arithmetic for small-horizon enumeration.
//!
//! Draw-sequence laws over a handful of steps are computed in `BigRational`
//! so that identities between them can be checked *exactly* rather than up to
//! a float tolerance. Two entry points matter:
//!
//! * every `f64` is a dyadic rational, so float inputs convert losslessly via
//!   [`ratio_from_f64`];
//! * text inputs like `0.3` or `1/3` are parsed as the rational they denote
//!   ([`parse_ratio`]), which is *not* the same number as the nearest `f64`.

use std::collections::BTreeMap;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::measure::{ColorId, SparseMeasure};

/// Exact value of a finite `f64` (every finite float is `m * 2^e`).
pub fn ratio_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite value {x}")))
}

/// Parses an integer (`"2"`), a decimal (`"0.25"`), or a ratio (`"1/3"`)
/// into the exact rational it denotes.
pub fn parse_ratio(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("expected a number, got `{text}`"));
    if text.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = text.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{text}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let int = if int.is_empty() { "0" } else { int };
        let negative = int.starts_with('-');
        let i = BigInt::from_str(int).map_err(|_| bad())?;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let f = BigInt::from_str(frac).map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigRational::new(f, scale);
        let int_part = BigRational::from_integer(i);
        return Ok(if negative {
            int_part - frac_part
        } else {
            int_part + frac_part
        });
    }
    let i = BigInt::from_str(text).map_err(|_| bad())?;
    Ok(BigRational::from_integer(i))
}

/// A finite measure with exact rational weights, mirroring
/// [`SparseMeasure`] for enumeration code paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMeasure {
    entries: BTreeMap<ColorId, BigRational>,
    /// True when every weight came from decimal/ratio text (as opposed to a
    /// converted float), i.e. the measure is exactly the one written down.
    rational_input: bool,
}

impl ExactMeasure {
    pub fn new() -> Self {
        ExactMeasure {
            entries: BTreeMap::new(),
            rational_input: true,
        }
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, BigRational)>,
    {
        let mut m = Self::new();
        for (c, w) in pairs {
            m.add_weight(ColorId(c), w)?;
        }
        Ok(m)
    }

    /// Converts a float measure; exact, but flagged as float-derived.
    pub fn from_sparse(m: &SparseMeasure) -> Result<Self> {
        let mut out = Self::new();
        for (c, w) in m.iter() {
            out.add_weight(c, ratio_from_f64(w)?)?;
        }
        out.rational_input = false;
        Ok(out)
    }

    /// Parses `"color:weight,..."` with exact decimal/ratio weights.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Self::new();
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (color, weight) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `color:weight`, got `{part}`")))?;
            let color: u32 = color
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad color index `{color}`")))?;
            m.add_weight(ColorId(color), parse_ratio(weight)?)?;
        }
        Ok(m)
    }

    pub fn add_weight(&mut self, color: ColorId, weight: BigRational) -> Result<()> {
        if weight.is_negative() {
            return Err(Error::NegativeWeight {
                color,
                weight: weight.to_f64().unwrap_or(f64::NEG_INFINITY),
            });
        }
        if !weight.is_zero() {
            let slot = self.entries.entry(color).or_insert_with(BigRational::zero);
            *slot += weight;
        }
        Ok(())
    }

    pub fn get(&self, color: ColorId) -> BigRational {
        self.entries
            .get(&color)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ColorId, &BigRational)> + '_ {
        self.entries.iter().map(|(&c, w)| (c, w))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_mass(&self) -> BigRational {
        self.entries
            .values()
            .fold(BigRational::zero(), |a, w| a + w)
    }

    /// Whether the weights are exactly the decimals/ratios written by the
    /// user rather than conversions of floats.
    pub fn is_rational_input(&self) -> bool {
        self.rational_input
    }

    /// Nearest-float projection of each weight.
    pub fn to_sparse(&self) -> SparseMeasure {
        let mut m = SparseMeasure::new();
        for (c, w) in self.iter() {
            m.add_weight(c, w.to_f64().unwrap_or(0.0))
                .expect("nonnegative by construction");
        }
        m
    }
}

impl Default for ExactMeasure {
    fn default() -> Self {
        Self::new()
    }
}

/// Exact unit-interval check for validated probability vectors.
pub fn is_probability(weight: &BigRational) -> bool {
    !weight.is_negative() && *weight <= BigRational::one()
}
