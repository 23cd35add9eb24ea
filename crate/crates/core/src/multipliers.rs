//! A small named family of multipliers, sampled at atom centers.

use alloc::sync::Arc;

#[allow(unused_imports)]
use num_traits::Float;

use crate::lpspace::{Exponent, LpFunction};
use crate::measure::{Geometry, MeasureSpace};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MultiplierShape {
    /// `φ(t) = t` (the x coordinate on grids).
    Identity,
    Constant(f64),
    /// `t` below `a`, `a` on `[a, b]`, `t − (b − a)` above `b`: continuous,
    /// non-decreasing, with a single flat of measure `b − a`.
    Plateau { a: f64, b: f64 },
    /// `slope · t + offset`.
    Affine { slope: f64, offset: f64 },
    /// `⌊k t⌋ / k`: `k` flats of measure `1/k`.
    Staircase { steps: usize },
    /// x coordinate of a grid cell.
    CoordinateX,
    /// y coordinate of a grid cell.
    CoordinateY,
}

impl MultiplierShape {
    pub fn sample(&self, space: &Arc<MeasureSpace>) -> Result<LpFunction> {
        match (*self, space.geometry()) {
            (MultiplierShape::CoordinateX | MultiplierShape::CoordinateY, g)
                if !matches!(g, Geometry::Grid { .. }) =>
            {
                return Err(Error::GeometryMismatch { expected: "product grid" });
            }
            (MultiplierShape::Plateau { a, b }, _) if !(a < b) => {
                return Err(Error::InvalidParameter("plateau needs a < b"));
            }
            (MultiplierShape::Staircase { steps: 0 }, _) => {
                return Err(Error::InvalidParameter("staircase needs at least one step"));
            }
            _ => {}
        }
        let shape = *self;
        LpFunction::from_centers(space, Exponent::Infinity, move |c| shape.eval(c.x, c.y))
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            MultiplierShape::Identity | MultiplierShape::CoordinateX => x,
            MultiplierShape::CoordinateY => y,
            MultiplierShape::Constant(c) => c,
            MultiplierShape::Plateau { a, b } => {
                if x < a {
                    x
                } else if x <= b {
                    a
                } else {
                    x - (b - a)
                }
            }
            MultiplierShape::Affine { slope, offset } => slope * x + offset,
            MultiplierShape::Staircase { steps } => {
                let k = steps as f64;
                (k * x).floor().min(k - 1.0) / k
            }
        }
    }
}
