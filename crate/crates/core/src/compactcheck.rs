//! Finite-dimensional certificates for operators dominated by a
//! compact-role positive operator `K`.
//!
//! Two facts are checked. A bounded sequence `e_n` has a subsequence whose
//! images `K|e_n|` converge fast to some `y`, and then
//! `|A e_n| ≤ K|e_n| ≤ e + |y|` with `e = Σ |K|e_n| − y|`. When the `e_n`
//! are disjoint the norms `‖A e_n‖` decay. "Compact" on a finite matrix is
//! only meaningful as a rate, so the decay verdict compares the head and
//! tail of the norm sequence against a fixed factor.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::lpspace::{Exponent, LpFunction};
use crate::measure::{MeasurableSet, MeasureSpace};
use crate::operators::{dominates, LinearOperator};
use crate::{Error, Result};

/// Tail quarter must stay below this multiple of the head quarter.
pub const DEFAULT_DECAY_FACTOR: f64 = 0.25;
/// Absolute slack on pointwise and norm dominations.
pub const DOMINATION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct OrderBound {
    /// Estimated limit of the selected `K|e_n|`.
    pub y: LpFunction,
    /// `Σ_{selected} |K|e_n| − y|`.
    pub e: LpFunction,
    /// Selected indices into the input sequence, increasing.
    pub selected: Vec<usize>,
    /// `‖K|e_n| − y‖` for the selected terms; the `k`-th is below `2^{-(k+1)}`.
    pub distances: Vec<f64>,
    /// `min_atom (e + |y| − K|e_n|)` for the selected terms.
    pub slack: Vec<f64>,
}

impl OrderBound {
    /// `K|e_n| ≤ e + |y|` on every atom for every selected `n`.
    pub fn certified(&self) -> bool {
        self.slack.iter().all(|s| *s >= -DOMINATION_TOL)
    }
}

fn check_sequence(space: &alloc::sync::Arc<MeasureSpace>, seq: &[LpFunction]) -> Result<()> {
    if seq.iter().all(|f| MeasureSpace::same(space, f.space())) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// Greedy order-preserving chain: keep `n` when `‖g_n − y‖ < 2^{-(k+1)}`
/// where `k` terms are already kept.
fn chain(images: &[LpFunction], y: &LpFunction, m: usize) -> Result<(Vec<usize>, Vec<f64>)> {
    let mut selected = Vec::new();
    let mut distances = Vec::new();
    for (n, g) in images.iter().enumerate() {
        if selected.len() == m {
            break;
        }
        let d = g.distance(y)?;
        if d < 0.5f64.powi(selected.len() as i32 + 1) {
            selected.push(n);
            distances.push(d);
        }
    }
    Ok((selected, distances))
}

/// Searches for a fast-converging subsequence of `K|e_n|` of length `m`
/// and builds its order-bound certificate. Candidate limits are the images
/// themselves and zero; the candidate admitting the longest chain wins.
pub fn order_bound_witness(k: &LinearOperator, e_seq: &[LpFunction], m: usize) -> Result<OrderBound> {
    if !k.is_positive() {
        return Err(Error::PreconditionError("K must be positive"));
    }
    if m == 0 || e_seq.is_empty() {
        return Err(Error::InvalidParameter("need at least one term"));
    }
    check_sequence(k.space(), e_seq)?;
    let images: Vec<LpFunction> = e_seq.iter().map(|e| k.apply(&e.abs())).collect::<Result<_>>()?;
    let p = images[0].p();

    let mut candidates = images.clone();
    candidates.push(LpFunction::zeros(k.space(), p));
    let mut best: Option<(LpFunction, Vec<usize>, Vec<f64>)> = None;
    for y in candidates {
        let (selected, distances) = chain(&images, &y, m)?;
        if best.as_ref().is_none_or(|b| selected.len() > b.1.len()) {
            let done = selected.len() == m;
            best = Some((y, selected, distances));
            if done {
                break;
            }
        }
    }
    let (y, selected, distances) = best.expect("at least one candidate");
    if selected.len() < m {
        let nearest = images
            .iter()
            .enumerate()
            .map(|(i, g)| {
                images
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, h)| g.distance(h).unwrap_or(f64::INFINITY))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        return Err(Error::NoClusterPoint { nearest });
    }

    let mut e = LpFunction::zeros(k.space(), p);
    for &n in &selected {
        e = e.add(&images[n].sub(&y)?.abs())?;
    }
    let bound = e.add(&y.abs())?;
    let slack = selected
        .iter()
        .map(|&n| {
            bound
                .values()
                .iter()
                .zip(images[n].values())
                .map(|(b, g)| b - g)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(OrderBound { y, e, selected, distances, slack })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    /// `‖A e_n‖`.
    pub norms: Vec<f64>,
    /// `‖K |e_n|‖`.
    pub dominating_norms: Vec<f64>,
    pub head_max: f64,
    pub tail_max: f64,
    pub decay_factor: f64,
    /// Every `‖A e_n‖ ≤ ‖K|e_n|‖`.
    pub domination_holds: bool,
    /// Whether the images `A e_n` have exactly disjoint supports. Kernel
    /// operators with everywhere positive kernels never do.
    pub images_disjoint: bool,
}

impl DecayReport {
    pub fn ratio(&self) -> f64 {
        if self.head_max > 0.0 {
            self.tail_max / self.head_max
        } else {
            f64::INFINITY
        }
    }

    /// Tail-quarter maximum below `decay_factor` times the head-quarter maximum.
    pub fn decays(&self) -> bool {
        self.tail_max < self.decay_factor * self.head_max
    }

    pub fn all_positive(&self) -> bool {
        self.norms.iter().all(|n| *n > 0.0)
    }
}

fn pairwise_disjoint(seq: &[LpFunction]) -> Result<bool> {
    let Some(first) = seq.first() else { return Ok(true) };
    let mut seen = MeasurableSet::empty(first.space());
    for f in seq {
        let s = f.support(0.0);
        if !s.is_disjoint(&seen)? {
            return Ok(false);
        }
        seen = seen.union(&s)?;
    }
    Ok(true)
}

/// Norms `‖A e_n‖` for disjointly supported `e_n` and the head/tail decay
/// verdict. `K` must dominate `A` entrywise.
pub fn disjoint_decay(
    a: &LinearOperator,
    k: &LinearOperator,
    e_seq: &[LpFunction],
    decay_factor: f64,
) -> Result<DecayReport> {
    if e_seq.len() < 4 {
        return Err(Error::InvalidParameter("need at least four terms"));
    }
    if !(decay_factor > 0.0) {
        return Err(Error::InvalidParameter("decay factor must be positive"));
    }
    check_sequence(a.space(), e_seq)?;
    if !dominates(k, a)? {
        return Err(Error::NotDominated);
    }
    if !pairwise_disjoint(e_seq)? {
        return Err(Error::NotDisjointImages);
    }
    let images: Vec<LpFunction> = e_seq.iter().map(|e| a.apply(e)).collect::<Result<_>>()?;
    let norms: Vec<f64> = images.iter().map(LpFunction::norm).collect();
    let dominating_norms: Vec<f64> =
        e_seq.iter().map(|e| k.apply(&e.abs()).map(|g| g.norm())).collect::<Result<_>>()?;
    let domination_holds = norms
        .iter()
        .zip(&dominating_norms)
        .all(|(n, d)| *n <= d * (1.0 + DOMINATION_TOL) + DOMINATION_TOL);
    let quarter = norms.len() / 4;
    let max = |s: &[f64]| s.iter().copied().fold(0.0f64, f64::max);
    Ok(DecayReport {
        head_max: max(&norms[..quarter]),
        tail_max: max(&norms[norms.len() - quarter..]),
        norms,
        dominating_norms,
        decay_factor,
        domination_holds,
        images_disjoint: pairwise_disjoint(&images)?,
    })
}

/// Normalized indicators of consecutive atom blocks starting at `start`.
/// Block `k` has `2^{octaves − 1 − ⌊k / per_octave⌋}` atoms, where
/// `octaves = terms / per_octave`, so lengths halve every `per_octave`
/// terms and end at a single atom.
pub fn dyadic_blocks(
    space: &alloc::sync::Arc<MeasureSpace>,
    start: usize,
    terms: usize,
    per_octave: usize,
    p: Exponent,
) -> Result<Vec<LpFunction>> {
    if per_octave == 0 || terms == 0 || !terms.is_multiple_of(per_octave) {
        return Err(Error::InvalidParameter("terms must be a positive multiple of per_octave"));
    }
    let octaves = terms / per_octave;
    let mut at = start;
    let mut out = Vec::with_capacity(terms);
    for k in 0..terms {
        let len = 1usize << (octaves - 1 - k / per_octave);
        if at + len > space.len() {
            return Err(Error::IndexOutOfRange { index: at + len - 1, len: space.len() });
        }
        let set = MeasurableSet::from_indices(space, at..at + len)?;
        let f = LpFunction::indicator(&set, p);
        out.push(f.scale(1.0 / f.norm()));
        at += len;
    }
    Ok(out)
}
