//! Linear operators on an atomic space, stored as matrices.
//!
//! `(Tf)_i = Σ_j a_ij f_j`. On atomic spaces positivity and domination are
//! entrywise properties of the matrix, which is what makes the lattice
//! notions checkable here.

use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::lpspace::{Exponent, LpFunction};
use crate::measure::{MeasurableSet, MeasureSpace, Point};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Entries {
    /// Only the diagonal is stored; every off-diagonal entry is exactly zero.
    Diagonal(Vec<f64>),
    /// Row-major `n × n`.
    Dense(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    space: Arc<MeasureSpace>,
    p: Exponent,
    entries: Entries,
}

/// How an [`OperatorNormEstimate`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum NormMethod {
    ExactP1,
    ExactPInf,
    ExactMultiplication,
    PowerIterationP2,
    BoydIteration,
}

/// Two-sided bracket for an induced operator norm.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OperatorNormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub method: NormMethod,
    pub iterations: usize,
    pub converged: bool,
}

impl OperatorNormEstimate {
    fn exact(value: f64, method: NormMethod) -> Self {
        Self { lower: value, upper: value, method, iterations: 0, converged: true }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Integral kernels evaluated at atom centers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel {
    Constant(f64),
    /// `exp(-|s - t|² / width)`.
    Gaussian { width: f64 },
}

impl Kernel {
    pub fn eval(&self, s: Point, t: Point) -> f64 {
        match *self {
            Kernel::Constant(c) => c,
            Kernel::Gaussian { width } => (-s.distance_squared(t) / width).exp(),
        }
    }
}

const POWER_ITERATION_CAP: usize = 1000;
const POWER_ITERATION_RTOL: f64 = 1e-14;

impl LinearOperator {
    pub fn dense(space: &Arc<MeasureSpace>, p: Exponent, entries: Vec<f64>) -> Result<Self> {
        let n = space.len();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: entries.len() });
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { space: Arc::clone(space), p, entries: Entries::Dense(entries) })
    }

    pub fn from_rows(space: &Arc<MeasureSpace>, p: Exponent, rows: &[Vec<f64>]) -> Result<Self> {
        let n = space.len();
        if rows.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: rows.len() });
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: row.len() });
            }
            entries.extend_from_slice(row);
        }
        Self::dense(space, p, entries)
    }

    pub fn diagonal(space: &Arc<MeasureSpace>, p: Exponent, diag: Vec<f64>) -> Result<Self> {
        if diag.len() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), actual: diag.len() });
        }
        if let Some(i) = diag.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { space: Arc::clone(space), p, entries: Entries::Diagonal(diag) })
    }

    pub fn identity(space: &Arc<MeasureSpace>, p: Exponent) -> Self {
        Self {
            space: Arc::clone(space),
            p,
            entries: Entries::Diagonal(alloc::vec![1.0; space.len()]),
        }
    }

    pub fn zero(space: &Arc<MeasureSpace>, p: Exponent) -> Self {
        Self {
            space: Arc::clone(space),
            p,
            entries: Entries::Diagonal(alloc::vec![0.0; space.len()]),
        }
    }

    /// `M_φ f = φ f` acting on `L_p`.
    pub fn multiplication(phi: &LpFunction, p: Exponent) -> Self {
        Self {
            space: Arc::clone(phi.space()),
            p,
            entries: Entries::Diagonal(phi.values().to_vec()),
        }
    }

    /// `χ_E` as a diagonal projection onto the band of `E`.
    pub fn band_projection(set: &MeasurableSet, p: Exponent) -> Self {
        let diag = (0..set.space().len())
            .map(|i| if set.contains(i) { 1.0 } else { 0.0 })
            .collect();
        Self { space: Arc::clone(set.space()), p, entries: Entries::Diagonal(diag) }
    }

    /// Row averaging on a product grid: `(Rf)(x, y) = ∫₀¹ f(t, y) dt`.
    pub fn averaging_counterexample(grid: &Arc<MeasureSpace>, p: Exponent) -> Result<Self> {
        let crate::Geometry::Grid { nx, ny } = *grid.geometry() else {
            return Err(Error::GeometryMismatch { expected: "product grid" });
        };
        let n = nx * ny;
        let mut entries = alloc::vec![0.0; n * n];
        let w = 1.0 / nx as f64;
        for row in 0..ny {
            for i in 0..nx {
                let target = row * nx + i;
                for t in 0..nx {
                    entries[target * n + row * nx + t] = w;
                }
            }
        }
        Self::dense(grid, p, entries)
    }

    /// Quadrature discretization `a_ij = k(c_i, c_j) w_j`.
    pub fn kernel_operator<K>(space: &Arc<MeasureSpace>, p: Exponent, kernel: K) -> Result<Self>
    where
        K: Fn(Point, Point) -> f64,
    {
        let centers = space
            .centers()
            .ok_or(Error::GeometryMismatch { expected: "interval or grid" })?;
        let w = space.weights();
        let n = space.len();
        let mut entries = Vec::with_capacity(n * n);
        for ci in &centers {
            for (cj, wj) in centers.iter().zip(w) {
                entries.push(kernel(*ci, *cj) * wj);
            }
        }
        Self::dense(space, p, entries)
    }

    /// The averaging projection onto `χ_A` for a flat `A` of `φ`:
    /// `Pf = (1/μ(A)) (∫_A f dμ) χ_A`. Positive, rank one, commutes with `M_φ`.
    pub fn rank_one_flat(
        phi: &LpFunction,
        flat: &MeasurableSet,
        tol: f64,
        p: Exponent,
    ) -> Result<Self> {
        if !MeasureSpace::same(phi.space(), flat.space()) {
            return Err(Error::SpaceMismatch);
        }
        let mass = flat.measure();
        if flat.is_empty() || mass <= 0.0 {
            return Err(Error::NotAFlat { variation: f64::INFINITY });
        }
        let (lo, hi) = flat.indices().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let v = phi.values()[i];
            (lo.min(v), hi.max(v))
        });
        if hi - lo > tol {
            return Err(Error::NotAFlat { variation: hi - lo });
        }
        let n = phi.space().len();
        let w = phi.space().weights();
        let mut entries = alloc::vec![0.0; n * n];
        for i in flat.indices() {
            for j in flat.indices() {
                entries[i * n + j] = w[j] / mass;
            }
        }
        Self::dense(phi.space(), p, entries)
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn with_exponent(&self, p: Exponent) -> Self {
        Self { p, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.space.len()
    }

    pub fn is_diagonal(&self) -> bool {
        match &self.entries {
            Entries::Diagonal(_) => true,
            Entries::Dense(a) => {
                let n = self.dim();
                (0..n).all(|i| (0..n).all(|j| i == j || a[i * n + j] == 0.0))
            }
        }
    }

    /// The diagonal, if the operator is stored as one.
    pub fn diagonal_entries(&self) -> Option<&[f64]> {
        match &self.entries {
            Entries::Diagonal(d) => Some(d),
            Entries::Dense(_) => None,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.entries {
            Entries::Diagonal(d) => {
                if i == j {
                    d[i]
                } else {
                    0.0
                }
            }
            Entries::Dense(a) => a[i * self.dim() + j],
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match &self.entries {
            Entries::Dense(a) => a.clone(),
            Entries::Diagonal(d) => {
                let n = d.len();
                let mut a = alloc::vec![0.0; n * n];
                for (i, v) in d.iter().enumerate() {
                    a[i * n + i] = *v;
                }
                a
            }
        }
    }

    fn map_entries<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        let entries = match &self.entries {
            Entries::Diagonal(d) => Entries::Diagonal(d.iter().map(|v| f(*v)).collect()),
            Entries::Dense(a) => Entries::Dense(a.iter().map(|v| f(*v)).collect()),
        };
        Self { space: Arc::clone(&self.space), p: self.p, entries }
    }

    /// Entrywise absolute value, the least positive operator dominating `self`.
    pub fn modulus(&self) -> Self {
        self.map_entries(f64::abs)
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map_entries(|v| v * factor)
    }

    pub fn is_positive(&self) -> bool {
        match &self.entries {
            Entries::Diagonal(d) => d.iter().all(|v| *v >= 0.0),
            Entries::Dense(a) => a.iter().all(|v| *v >= 0.0),
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        match &self.entries {
            Entries::Diagonal(d) => d.iter().fold(0.0, |m, v| m.max(v.abs())),
            Entries::Dense(a) => a.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn apply_values(&self, f: &[f64]) -> Vec<f64> {
        match &self.entries {
            Entries::Diagonal(d) => d.iter().zip(f).map(|(a, b)| a * b).collect(),
            Entries::Dense(a) => {
                let n = self.dim();
                let nonzero: Vec<usize> = (0..n).filter(|j| f[*j] != 0.0).collect();
                if 4 * nonzero.len() < n {
                    // indicator-like inputs: touch only the occupied columns
                    return (0..n)
                        .map(|i| nonzero.iter().map(|&j| a[i * n + j] * f[j]).sum())
                        .collect();
                }
                (0..n)
                    .map(|i| a[i * n..(i + 1) * n].iter().zip(f).map(|(x, y)| x * y).sum())
                    .collect()
            }
        }
    }

    fn apply_transpose_values(&self, f: &[f64]) -> Vec<f64> {
        match &self.entries {
            Entries::Diagonal(_) => self.apply_values(f),
            Entries::Dense(a) => {
                let n = self.dim();
                let mut out = alloc::vec![0.0; n];
                for (i, fi) in f.iter().enumerate() {
                    if *fi != 0.0 {
                        for (o, x) in out.iter_mut().zip(&a[i * n..(i + 1) * n]) {
                            *o += x * fi;
                        }
                    }
                }
                out
            }
        }
    }

    pub fn apply(&self, f: &LpFunction) -> Result<LpFunction> {
        if !MeasureSpace::same(&self.space, f.space()) {
            return Err(Error::SpaceMismatch);
        }
        if self.p != f.p() {
            return Err(Error::ExponentMismatch { left: self.p.value(), right: f.p().value() });
        }
        Ok(LpFunction::from_parts(&self.space, self.apply_values(f.values()), self.p))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if MeasureSpace::same(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.dim();
        let entries = match (&self.entries, &other.entries) {
            (Entries::Diagonal(d), Entries::Diagonal(e)) => {
                Entries::Diagonal(d.iter().zip(e).map(|(a, b)| a * b).collect())
            }
            (Entries::Diagonal(d), Entries::Dense(b)) => {
                let mut c = b.clone();
                for (i, di) in d.iter().enumerate() {
                    c[i * n..(i + 1) * n].iter_mut().for_each(|v| *v *= di);
                }
                Entries::Dense(c)
            }
            (Entries::Dense(a), Entries::Diagonal(e)) => {
                let mut c = a.clone();
                for row in c.chunks_mut(n) {
                    row.iter_mut().zip(e).for_each(|(v, ej)| *v *= ej);
                }
                Entries::Dense(c)
            }
            (Entries::Dense(a), Entries::Dense(b)) => {
                let mut c = alloc::vec![0.0; n * n];
                for i in 0..n {
                    let out = &mut c[i * n..(i + 1) * n];
                    for k in 0..n {
                        let aik = a[i * n + k];
                        if aik != 0.0 {
                            for (o, bkj) in out.iter_mut().zip(&b[k * n..(k + 1) * n]) {
                                *o += aik * bkj;
                            }
                        }
                    }
                }
                Entries::Dense(c)
            }
        };
        Ok(Self { space: Arc::clone(&self.space), p: self.p, entries })
    }

    fn combine(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same(other)?;
        let entries = match (&self.entries, &other.entries) {
            (Entries::Diagonal(d), Entries::Diagonal(e)) => {
                Entries::Diagonal(d.iter().zip(e).map(|(a, b)| f(*a, *b)).collect())
            }
            _ => {
                let a = self.to_dense();
                let b = other.to_dense();
                Entries::Dense(a.iter().zip(&b).map(|(x, y)| f(*x, *y)).collect())
            }
        };
        Ok(Self { space: Arc::clone(&self.space), p: self.p, entries })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    /// `P_out T P_in`: the block of `T` mapping `B_in` into `B_out`.
    pub fn compress(&self, out: &MeasurableSet, inp: &MeasurableSet) -> Result<Self> {
        if !MeasureSpace::same(&self.space, out.space()) || !MeasureSpace::same(&self.space, inp.space())
        {
            return Err(Error::SpaceMismatch);
        }
        let n = self.dim();
        let entries = match &self.entries {
            Entries::Diagonal(d) => Entries::Diagonal(
                d.iter()
                    .enumerate()
                    .map(|(i, v)| if out.contains(i) && inp.contains(i) { *v } else { 0.0 })
                    .collect(),
            ),
            Entries::Dense(a) => {
                let mut c = alloc::vec![0.0; n * n];
                for i in out.indices() {
                    for j in inp.indices() {
                        c[i * n + j] = a[i * n + j];
                    }
                }
                Entries::Dense(c)
            }
        };
        Ok(Self { space: Arc::clone(&self.space), p: self.p, entries })
    }

    /// Exact norm on `L_1(μ)`: `max_j Σ_i w_i |a_ij| / w_j`.
    pub fn norm_l1(&self) -> f64 {
        let w = self.space.weights();
        match &self.entries {
            Entries::Diagonal(d) => d.iter().fold(0.0, |m, v| m.max(v.abs())),
            Entries::Dense(a) => {
                let n = self.dim();
                let mut cols = alloc::vec![0.0; n];
                for i in 0..n {
                    for (c, x) in cols.iter_mut().zip(&a[i * n..(i + 1) * n]) {
                        *c += w[i] * x.abs();
                    }
                }
                cols.iter().zip(w).fold(0.0, |m, (c, wj)| m.max(c / wj))
            }
        }
    }

    /// Exact norm on the sup-norm space: `max_i Σ_j |a_ij|`.
    pub fn norm_linf(&self) -> f64 {
        match &self.entries {
            Entries::Diagonal(d) => d.iter().fold(0.0, |m, v| m.max(v.abs())),
            Entries::Dense(a) => a
                .chunks(self.dim())
                .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max),
        }
    }

    /// Hilbert–Schmidt norm of the operator on `L_2(μ)`:
    /// `(Σ_ij a_ij² w_i / w_j)^{1/2}`.
    pub fn weighted_frobenius(&self) -> f64 {
        let w = self.space.weights();
        match &self.entries {
            Entries::Diagonal(d) => d.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Entries::Dense(a) => {
                let n = self.dim();
                let mut s = 0.0;
                for i in 0..n {
                    for (j, x) in a[i * n..(i + 1) * n].iter().enumerate() {
                        if *x != 0.0 {
                            s += x * x * w[i] / w[j];
                        }
                    }
                }
                s.sqrt()
            }
        }
    }

    /// Riesz–Thorin bound `‖T‖_1^{1/p} ‖T‖_∞^{1 - 1/p}`.
    pub fn interpolation_bound(&self) -> f64 {
        match self.p {
            Exponent::Infinity => self.norm_linf(),
            Exponent::Finite(p) => {
                let (n1, ninf) = (self.norm_l1(), self.norm_linf());
                if n1 == 0.0 || ninf == 0.0 {
                    0.0
                } else {
                    n1.powf(1.0 / p) * ninf.powf(1.0 - 1.0 / p)
                }
            }
        }
    }

    /// A certified upper bound on `‖T‖` without iteration.
    pub fn norm_upper_bound(&self) -> f64 {
        if let Entries::Diagonal(d) = &self.entries {
            return d.iter().fold(0.0, |m, v| m.max(v.abs()));
        }
        match self.p {
            Exponent::Finite(p) if p == 1.0 => self.norm_l1(),
            Exponent::Infinity => self.norm_linf(),
            Exponent::Finite(p) if p == 2.0 => {
                self.interpolation_bound().min(self.weighted_frobenius())
            }
            Exponent::Finite(_) => self.interpolation_bound(),
        }
    }

    /// Bracket for the induced norm on the operator's own `L_p`.
    pub fn operator_norm(&self) -> OperatorNormEstimate {
        if let Entries::Diagonal(d) = &self.entries {
            let m = d.iter().fold(0.0, |m, v| m.max(v.abs()));
            return OperatorNormEstimate::exact(m, NormMethod::ExactMultiplication);
        }
        match self.p {
            Exponent::Infinity => OperatorNormEstimate::exact(self.norm_linf(), NormMethod::ExactPInf),
            Exponent::Finite(p) if p == 1.0 => {
                OperatorNormEstimate::exact(self.norm_l1(), NormMethod::ExactP1)
            }
            Exponent::Finite(p) if p == 2.0 => self.power_iteration_l2(),
            Exponent::Finite(p) => self.boyd_iteration(p),
        }
    }

    /// Entries of `W^{1/p} A W^{-1/p}`, the matrix of `T` on unweighted `ℓ_p`.
    fn similarity_scaled(&self, p: f64) -> Vec<f64> {
        let n = self.dim();
        let w = self.space.weights();
        let s: Vec<f64> = w.iter().map(|wi| wi.powf(1.0 / p)).collect();
        let mut b = self.to_dense();
        for i in 0..n {
            for j in 0..n {
                b[i * n + j] *= s[i] / s[j];
            }
        }
        b
    }

    fn start_vector(n: usize) -> Vec<f64> {
        (0..n).map(|j| 1.0 + 0.1 * ((j * 7919 % 97) as f64 / 97.0)).collect()
    }

    fn power_iteration_l2(&self) -> OperatorNormEstimate {
        let n = self.dim();
        let b = self.similarity_scaled(2.0);
        let scaled = Self { entries: Entries::Dense(b), ..self.clone() };
        let mut v = Self::start_vector(n);
        normalize_lp(&mut v, 2.0);
        let mut lower = 0.0f64;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < POWER_ITERATION_CAP {
            iterations += 1;
            let z = scaled.apply_values(&v);
            let sigma = lp_norm(&z, 2.0);
            if sigma == 0.0 {
                converged = lower == 0.0;
                break;
            }
            let done = (sigma - lower).abs() <= POWER_ITERATION_RTOL * sigma;
            lower = lower.max(sigma);
            if done {
                converged = true;
                break;
            }
            let mut next = scaled.apply_transpose_values(&z);
            if lp_norm(&next, 2.0) == 0.0 {
                break;
            }
            normalize_lp(&mut next, 2.0);
            v = next;
        }
        OperatorNormEstimate {
            lower,
            upper: self.norm_upper_bound().max(lower),
            method: NormMethod::PowerIterationP2,
            iterations,
            converged,
        }
    }

    fn boyd_iteration(&self, p: f64) -> OperatorNormEstimate {
        let n = self.dim();
        let q = p / (p - 1.0);
        let b = self.similarity_scaled(p);
        let scaled = Self { entries: Entries::Dense(b), ..self.clone() };
        let mut x = Self::start_vector(n);
        normalize_lp(&mut x, p);
        let mut lower = 0.0f64;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < POWER_ITERATION_CAP {
            iterations += 1;
            let y = scaled.apply_values(&x);
            let value = lp_norm(&y, p);
            if value == 0.0 {
                break;
            }
            let done = (value - lower).abs() <= POWER_ITERATION_RTOL * value;
            lower = lower.max(value);
            if done {
                converged = true;
                break;
            }
            let dual: Vec<f64> = y.iter().map(|v| v.signum() * v.abs().powf(p - 1.0)).collect();
            let z = scaled.apply_transpose_values(&dual);
            let mut next: Vec<f64> = z.iter().map(|v| v.signum() * v.abs().powf(q - 1.0)).collect();
            if lp_norm(&next, p) == 0.0 {
                break;
            }
            normalize_lp(&mut next, p);
            x = next;
        }
        OperatorNormEstimate {
            lower,
            upper: self.interpolation_bound().max(lower),
            method: NormMethod::BoydIteration,
            iterations,
            converged,
        }
    }
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = v.iter().map(|x| (x.abs() / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

fn normalize_lp(v: &mut [f64], p: f64) {
    let norm = lp_norm(v, p);
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// `S ≻ T` on an atomic space: `|t_ij| <= s_ij` for every entry.
pub fn dominates(s: &LinearOperator, t: &LinearOperator) -> Result<bool> {
    s.check_same(t)?;
    if let (Some(ds), Some(dt)) = (s.diagonal_entries(), t.diagonal_entries()) {
        return Ok(ds.iter().zip(dt).all(|(a, b)| b.abs() <= *a));
    }
    if let (Entries::Dense(a), Entries::Dense(b)) = (&s.entries, &t.entries) {
        return Ok(a.iter().zip(b).all(|(x, y)| y.abs() <= *x));
    }
    let n = s.dim();
    Ok((0..n).all(|i| (0..n).all(|j| t.entry(i, j).abs() <= s.entry(i, j))))
}

/// `AB − BA`.
pub fn commutator(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
    a.check_same(b)?;
    let n = a.dim();
    let entries = match (&a.entries, &b.entries) {
        (Entries::Diagonal(_), Entries::Diagonal(_)) => Entries::Diagonal(alloc::vec![0.0; n]),
        (Entries::Dense(m), Entries::Diagonal(d)) => {
            let mut c = m.clone();
            for i in 0..n {
                for j in 0..n {
                    c[i * n + j] *= d[j] - d[i];
                }
            }
            Entries::Dense(c)
        }
        (Entries::Diagonal(d), Entries::Dense(m)) => {
            let mut c = m.clone();
            for i in 0..n {
                for j in 0..n {
                    c[i * n + j] *= d[i] - d[j];
                }
            }
            Entries::Dense(c)
        }
        (Entries::Dense(_), Entries::Dense(_)) => return a.compose(b)?.sub(&b.compose(a)?),
    };
    Ok(LinearOperator { space: Arc::clone(&a.space), p: a.p, entries })
}

/// Hilbert–Schmidt norm of `AB − BA` on `L_2(μ)`, an upper bound for its
/// operator norm there. Zero exactly when the operators commute entrywise.
pub fn commutator_norm(a: &LinearOperator, b: &LinearOperator) -> Result<f64> {
    Ok(commutator(a, b)?.weighted_frobenius())
}
