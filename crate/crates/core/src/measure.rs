//! Finite atomic measure spaces and their set algebra.
//!
//! Atoms are the only measurable granularity, so "almost everywhere"
//! statements collapse to exact set equality.

use alloc::sync::Arc;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::sum::compensated_sum;
use crate::{Error, Result};

/// How the atoms are laid out, if at all.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Geometry {
    /// Plain atoms with no coordinates.
    Atoms,
    /// `n` equal cells of `[0, 1]`, atom `i` centered at `(i + 0.5) / n`.
    Interval,
    /// `nx × ny` equal cells of `[0, 1]²`; atom `j * nx + i` is the cell in
    /// column `i` (x direction) and row `j` (y direction).
    Grid { nx: usize, ny: usize },
}

/// Center of an atom. Interval atoms have `y == 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance_squared(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpace {
    weights: Vec<f64>,
    total: f64,
    geometry: Geometry,
}

impl MeasureSpace {
    /// Arbitrary positive weights, no geometry.
    pub fn from_weights(weights: Vec<f64>) -> Result<Arc<Self>> {
        if weights.is_empty() {
            return Err(Error::InvalidDiscretization("no atoms"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidDiscretization("weights must be positive and finite"));
        }
        Ok(Arc::new(Self::build(weights, Geometry::Atoms)))
    }

    pub fn uniform_interval(n: usize) -> Result<Arc<Self>> {
        if n < 2 {
            return Err(Error::InvalidDiscretization("interval needs at least 2 atoms"));
        }
        Ok(Arc::new(Self::build(alloc::vec![1.0 / n as f64; n], Geometry::Interval)))
    }

    pub fn product_grid(nx: usize, ny: usize) -> Result<Arc<Self>> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidDiscretization("grid needs at least 2 atoms per side"));
        }
        let n = nx.checked_mul(ny).ok_or(Error::InvalidDiscretization("grid too large"))?;
        Ok(Arc::new(Self::build(alloc::vec![1.0 / n as f64; n], Geometry::Grid { nx, ny })))
    }

    fn build(weights: Vec<f64>, geometry: Geometry) -> Self {
        let total = compensated_sum(weights.iter().copied());
        Self { weights, total, geometry }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.weights[atom]
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// μ(Ω).
    pub fn total_measure(&self) -> f64 {
        self.total
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    /// `(column, row)` of a grid atom.
    pub fn grid_index(&self, atom: usize) -> Option<(usize, usize)> {
        match self.geometry {
            Geometry::Grid { nx, .. } if atom < self.len() => Some((atom % nx, atom / nx)),
            _ => None,
        }
    }

    /// Atom index of grid cell `(column, row)`.
    pub fn grid_atom(&self, column: usize, row: usize) -> Option<usize> {
        match self.geometry {
            Geometry::Grid { nx, ny } if column < nx && row < ny => Some(row * nx + column),
            _ => None,
        }
    }

    pub fn center(&self, atom: usize) -> Option<Point> {
        if atom >= self.len() {
            return None;
        }
        match self.geometry {
            Geometry::Atoms => None,
            Geometry::Interval => Some(Point {
                x: (atom as f64 + 0.5) / self.len() as f64,
                y: 0.0,
            }),
            Geometry::Grid { nx, ny } => {
                let (i, j) = (atom % nx, atom / nx);
                Some(Point {
                    x: (i as f64 + 0.5) / nx as f64,
                    y: (j as f64 + 0.5) / ny as f64,
                })
            }
        }
    }

    /// Centers of all atoms, or `None` for coordinate-free spaces.
    pub fn centers(&self) -> Option<Vec<Point>> {
        (0..self.len()).map(|i| self.center(i)).collect()
    }

    pub(crate) fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

/// A subset of atoms.
#[derive(Clone, Debug)]
pub struct MeasurableSet {
    space: Arc<MeasureSpace>,
    members: FixedBitSet,
}

impl PartialEq for MeasurableSet {
    fn eq(&self, other: &Self) -> bool {
        MeasureSpace::same(&self.space, &other.space) && self.members == other.members
    }
}

impl MeasurableSet {
    pub fn empty(space: &Arc<MeasureSpace>) -> Self {
        Self {
            space: Arc::clone(space),
            members: FixedBitSet::with_capacity(space.len()),
        }
    }

    pub fn full(space: &Arc<MeasureSpace>) -> Self {
        let mut set = Self::empty(space);
        set.members.insert_range(..);
        set
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(
        space: &Arc<MeasureSpace>,
        indices: I,
    ) -> Result<Self> {
        let mut set = Self::empty(space);
        for index in indices {
            if index >= space.len() {
                return Err(Error::IndexOutOfRange { index, len: space.len() });
            }
            set.members.insert(index);
        }
        Ok(set)
    }

    pub fn from_predicate<F: FnMut(usize) -> bool>(space: &Arc<MeasureSpace>, mut keep: F) -> Self {
        let mut set = Self::empty(space);
        for i in 0..space.len() {
            if keep(i) {
                set.members.insert(i);
            }
        }
        set
    }

    /// Atoms whose center satisfies `keep`; empty for coordinate-free spaces.
    pub fn from_centers<F: FnMut(Point) -> bool>(space: &Arc<MeasureSpace>, mut keep: F) -> Self {
        Self::from_predicate(space, |i| space.center(i).is_some_and(&mut keep))
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members.contains(atom)
    }

    pub fn insert(&mut self, atom: usize) -> Result<()> {
        if atom >= self.space.len() {
            return Err(Error::IndexOutOfRange { index: atom, len: self.space.len() });
        }
        self.members.insert(atom);
        Ok(())
    }

    /// Member atoms in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn measure(&self) -> f64 {
        let w = self.space.weights();
        compensated_sum(self.members.ones().map(|i| w[i]))
    }

    pub fn complement(&self) -> Self {
        let mut members = self.members.clone();
        members.toggle_range(..);
        Self { space: Arc::clone(&self.space), members }
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if MeasureSpace::same(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut members = self.members.clone();
        members.union_with(&other.members);
        Ok(Self { space: Arc::clone(&self.space), members })
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        Ok(Self { space: Arc::clone(&self.space), members })
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut members = self.members.clone();
        members.difference_with(&other.members);
        Ok(Self { space: Arc::clone(&self.space), members })
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        self.check_space(other)?;
        Ok(self.members.is_subset(&other.members))
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        self.check_space(other)?;
        Ok(self.members.is_disjoint(&other.members))
    }
}
