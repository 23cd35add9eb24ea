//! Functions on an atomic space with their `L_p` or sup norm.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::measure::{MeasurableSet, MeasureSpace, Point};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// The exponent `p` of the ambient space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    /// Parses `p` with `inf` mapped to the sup norm.
    pub fn from_value(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else {
            Self::finite(p)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn require_finite(self) -> Result<f64> {
        match self {
            Exponent::Finite(p) => Ok(p),
            Exponent::Infinity => Err(Error::UnsupportedExponent),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

/// `Σ w_i |v_i|^p` without the final root.
pub(crate) fn weighted_power_sum(weights: &[f64], values: &[f64], p: f64) -> f64 {
    let mut acc = CompensatedSum::default();
    if p == 1.0 {
        for (w, v) in weights.iter().zip(values) {
            acc.add(w * v.abs());
        }
    } else if p == 2.0 {
        for (w, v) in weights.iter().zip(values) {
            acc.add(w * v * v);
        }
    } else {
        for (w, v) in weights.iter().zip(values) {
            if *v != 0.0 {
                acc.add(w * v.abs().powf(p));
            }
        }
    }
    acc.value()
}

pub(crate) fn weighted_norm(weights: &[f64], values: &[f64], p: Exponent) -> f64 {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    match p {
        Exponent::Infinity => scale,
        _ if scale == 0.0 => 0.0,
        Exponent::Finite(p) => {
            // rescale so |v|^p cannot overflow or underflow
            let scaled: Vec<f64> = values.iter().map(|v| v / scale).collect();
            let s = weighted_power_sum(weights, &scaled, p);
            if p == 1.0 {
                scale * s
            } else if p == 2.0 {
                scale * s.sqrt()
            } else {
                scale * s.powf(1.0 / p)
            }
        }
    }
}

/// An element of `L_p(μ)` (or of the sup-norm space when `p` is infinite).
#[derive(Clone, Debug)]
pub struct LpFunction {
    space: Arc<MeasureSpace>,
    values: Vec<f64>,
    p: Exponent,
}

impl PartialEq for LpFunction {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && MeasureSpace::same(&self.space, &other.space)
            && self.values == other.values
    }
}

impl LpFunction {
    pub fn new(space: &Arc<MeasureSpace>, values: Vec<f64>, p: Exponent) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), actual: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { space: Arc::clone(space), values, p })
    }

    pub(crate) fn from_parts(space: &Arc<MeasureSpace>, values: Vec<f64>, p: Exponent) -> Self {
        debug_assert_eq!(values.len(), space.len());
        Self { space: Arc::clone(space), values, p }
    }

    pub fn zeros(space: &Arc<MeasureSpace>, p: Exponent) -> Self {
        Self::from_parts(space, alloc::vec![0.0; space.len()], p)
    }

    pub fn constant(space: &Arc<MeasureSpace>, value: f64, p: Exponent) -> Self {
        Self::from_parts(space, alloc::vec![value; space.len()], p)
    }

    /// `χ_E`.
    pub fn indicator(set: &MeasurableSet, p: Exponent) -> Self {
        let mut values = alloc::vec![0.0; set.space().len()];
        for i in set.indices() {
            values[i] = 1.0;
        }
        Self::from_parts(set.space(), values, p)
    }

    /// Samples `f` at atom centers.
    pub fn from_centers<F: FnMut(Point) -> f64>(
        space: &Arc<MeasureSpace>,
        p: Exponent,
        mut f: F,
    ) -> Result<Self> {
        let centers = space
            .centers()
            .ok_or(Error::GeometryMismatch { expected: "interval or grid" })?;
        Self::new(space, centers.into_iter().map(&mut f).collect(), p)
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    /// Same values viewed in another `L_p`.
    pub fn with_exponent(&self, p: Exponent) -> Self {
        Self { p, ..self.clone() }
    }

    pub fn norm(&self) -> f64 {
        weighted_norm(self.space.weights(), &self.values, self.p)
    }

    /// `‖f‖^p` computed without the root, for p-additivity bookkeeping.
    pub fn norm_pow(&self) -> Result<f64> {
        let p = self.p.require_finite()?;
        Ok(weighted_power_sum(self.space.weights(), &self.values, p))
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫ f dμ`.
    pub fn integral(&self) -> f64 {
        let mut acc = CompensatedSum::default();
        for (w, v) in self.space.weights().iter().zip(&self.values) {
            acc.add(w * v);
        }
        acc.value()
    }

    fn check_space(&self, set_space: &Arc<MeasureSpace>) -> Result<()> {
        if MeasureSpace::same(&self.space, set_space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    fn check_binary(&self, other: &Self) -> Result<()> {
        self.check_space(&other.space)?;
        if self.p != other.p {
            return Err(Error::ExponentMismatch { left: self.p.value(), right: other.p.value() });
        }
        Ok(())
    }

    /// `f · χ_E`; zeroes outside `E` exactly.
    pub fn restrict(&self, set: &MeasurableSet) -> Result<Self> {
        self.check_space(set.space())?;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| if set.contains(i) { *v } else { 0.0 })
            .collect();
        Ok(Self::from_parts(&self.space, values, self.p))
    }

    /// Atoms with `|f_i| > tol`.
    pub fn support(&self, tol: f64) -> MeasurableSet {
        MeasurableSet::from_predicate(&self.space, |i| self.values[i].abs() > tol)
    }

    pub fn disjoint(&self, other: &Self, tol: f64) -> Result<bool> {
        self.check_space(&other.space)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| a.abs() <= tol || b.abs() <= tol))
    }

    pub fn scale(&self, factor: f64) -> Self {
        let values = self.values.iter().map(|v| v * factor).collect();
        Self::from_parts(&self.space, values, self.p)
    }

    pub fn abs(&self) -> Self {
        let values = self.values.iter().map(|v| v.abs()).collect();
        Self::from_parts(&self.space, values, self.p)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_binary(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self::from_parts(&self.space, values, self.p))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_binary(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self::from_parts(&self.space, values, self.p))
    }

    /// Pointwise minimum of `|f|` and `|g|`.
    pub fn min_abs(&self, other: &Self) -> Result<Self> {
        self.check_binary(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.abs().min(b.abs()))
            .collect();
        Ok(Self::from_parts(&self.space, values, self.p))
    }

    /// `φ f` for a multiplier `φ`; keeps the exponent of `self`.
    pub fn multiply_by(&self, phi: &LpFunction) -> Result<Self> {
        self.check_space(&phi.space)?;
        let values = self.values.iter().zip(&phi.values).map(|(a, b)| a * b).collect();
        Ok(Self::from_parts(&self.space, values, self.p))
    }

    /// `‖f − g‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }
}
