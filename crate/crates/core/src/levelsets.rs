//! Level sets of a multiplier, flats, and band invariance.

use alloc::vec::Vec;

use crate::lpspace::{Exponent, LpFunction};
use crate::measure::MeasurableSet;
use crate::operators::LinearOperator;
use crate::{Error, Result};

/// Which inequality selects the atoms of a level set.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum LevelKind {
    /// `E_α = {φ ≥ α}`.
    AtLeast { alpha: f64 },
    /// `E^α = {φ ≤ α}`.
    AtMost { alpha: f64 },
    /// `E_α^β = {α ≤ φ ≤ β}`.
    Between { alpha: f64, beta: f64 },
    /// `{α ≤ φ < β}`.
    LeftClosed { alpha: f64, beta: f64 },
    /// `{α < φ ≤ β}`.
    RightClosed { alpha: f64, beta: f64 },
    /// `{α < φ < β}`.
    Open { alpha: f64, beta: f64 },
    /// `{φ > α}`.
    Above { alpha: f64 },
    /// `{φ < α}`.
    Below { alpha: f64 },
}

impl LevelKind {
    pub fn contains(&self, v: f64) -> bool {
        match *self {
            LevelKind::AtLeast { alpha } => v >= alpha,
            LevelKind::AtMost { alpha } => v <= alpha,
            LevelKind::Between { alpha, beta } => alpha <= v && v <= beta,
            LevelKind::LeftClosed { alpha, beta } => alpha <= v && v < beta,
            LevelKind::RightClosed { alpha, beta } => alpha < v && v <= beta,
            LevelKind::Open { alpha, beta } => alpha < v && v < beta,
            LevelKind::Above { alpha } => v > alpha,
            LevelKind::Below { alpha } => v < alpha,
        }
    }

    fn bounds(&self) -> (f64, Option<f64>) {
        match *self {
            LevelKind::AtLeast { alpha }
            | LevelKind::AtMost { alpha }
            | LevelKind::Above { alpha }
            | LevelKind::Below { alpha } => (alpha, None),
            LevelKind::Between { alpha, beta }
            | LevelKind::LeftClosed { alpha, beta }
            | LevelKind::RightClosed { alpha, beta }
            | LevelKind::Open { alpha, beta } => (alpha, Some(beta)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelBand {
    pub kind: LevelKind,
    pub set: MeasurableSet,
}

impl LevelBand {
    pub fn measure(&self) -> f64 {
        self.set.measure()
    }
}

pub fn level_set(phi: &LpFunction, kind: LevelKind) -> Result<LevelBand> {
    let (alpha, beta) = kind.bounds();
    if let Some(beta) = beta {
        if alpha > beta {
            return Err(Error::InvalidInterval { alpha, beta });
        }
    }
    let values = phi.values();
    let set = MeasurableSet::from_predicate(phi.space(), |i| kind.contains(values[i]));
    Ok(LevelBand { kind, set })
}

/// Distinct values of `φ` on `set`, increasing.
pub fn distinct_values(phi: &LpFunction, set: &MeasurableSet) -> Vec<f64> {
    let mut v: Vec<f64> = set.indices().map(|i| phi.values()[i]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// A set of positive measure on which `φ` is constant up to `τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Flat {
    pub value: f64,
    pub set: MeasurableSet,
    pub measure: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatReport {
    pub flats: Vec<Flat>,
    pub theta: f64,
    pub tau: f64,
}

impl FlatReport {
    pub fn has_flat(&self) -> bool {
        !self.flats.is_empty()
    }

    /// The widest flat, if any.
    pub fn largest(&self) -> Option<&Flat> {
        self.flats.iter().max_by(|a, b| a.measure.total_cmp(&b.measure))
    }
}

/// Greedy clusters of sorted `φ`-values over `domain` with diameter `≤ tau`.
fn value_clusters(phi: &LpFunction, domain: &MeasurableSet, tau: f64) -> Vec<(f64, f64, Vec<usize>)> {
    let values = phi.values();
    let mut order: Vec<usize> = domain.indices().collect();
    order.sort_by(|a, b| values[*a].total_cmp(&values[*b]));
    let mut clusters: Vec<(f64, f64, Vec<usize>)> = Vec::new();
    for i in order {
        let v = values[i];
        match clusters.last_mut() {
            Some((lo, hi, members)) if v - *lo <= tau => {
                *hi = v;
                members.push(i);
            }
            _ => clusters.push((v, v, alloc::vec![i])),
        }
    }
    clusters
}

/// Flats of `φ` restricted to `domain`: value clusters of diameter `≤ tau`
/// whose measure reaches `theta`.
pub fn detect_flats_on(
    phi: &LpFunction,
    domain: &MeasurableSet,
    theta: f64,
    tau: f64,
) -> Result<FlatReport> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter("flat threshold theta must be positive"));
    }
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter("flat tolerance tau must be non-negative"));
    }
    let mut flats = Vec::new();
    for (lo, hi, members) in value_clusters(phi, domain, tau) {
        let set = MeasurableSet::from_indices(phi.space(), members)?;
        let measure = set.measure();
        if measure >= theta {
            flats.push(Flat { value: 0.5 * (lo + hi), set, measure });
        }
    }
    Ok(FlatReport { flats, theta, tau })
}

pub fn detect_flats(phi: &LpFunction, theta: f64, tau: f64) -> Result<FlatReport> {
    detect_flats_on(phi, &MeasurableSet::full(phi.space()), theta, tau)
}

pub fn band_projection(set: &MeasurableSet, p: Exponent) -> LinearOperator {
    LinearOperator::band_projection(set, p)
}

/// Result of [`leaves_invariant`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Invariance {
    pub invariant: bool,
    /// Upper estimate of `‖P_{Eᶜ} T P_E‖` on `L_2`.
    pub violation: f64,
}

/// Whether `T` maps the band of `E` into itself, judged by the `L_2` size
/// of the leaking block `P_{Eᶜ} T P_E`.
pub fn leaves_invariant(t: &LinearOperator, set: &MeasurableSet, tol: f64) -> Result<Invariance> {
    let block = t.compress(&set.complement(), set)?;
    let violation = if block.max_abs_entry() == 0.0 {
        0.0
    } else {
        block.with_exponent(Exponent::Finite(2.0)).norm_upper_bound()
    };
    Ok(Invariance { invariant: violation <= tol, violation })
}

/// Splits the range of a non-constant `φ` into at most `m` closed bands
/// `E_{α_i}^{β_i}` of roughly equal measure. Cuts sit at midpoints between
/// consecutive distinct values, so the bands are pairwise disjoint.
pub fn enumerate_hyperinvariant_bands(phi: &LpFunction, m: usize) -> Result<Vec<LevelBand>> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one band"));
    }
    let clusters = value_clusters(phi, &MeasurableSet::full(phi.space()), 0.0);
    if clusters.len() < 2 {
        return Err(Error::SingleBandOnly);
    }
    let w = phi.space().weights();
    let total = phi.space().total_measure();
    // cumulative measure after each distinct value
    let mut cumulative = Vec::with_capacity(clusters.len());
    let mut acc = 0.0;
    for (_, _, members) in &clusters {
        acc += members.iter().map(|i| w[*i]).sum::<f64>();
        cumulative.push(acc);
    }
    // cut after the value group whose cumulative measure is nearest each quantile
    let mut cuts: Vec<usize> = Vec::new();
    for k in 1..m {
        let target = total * k as f64 / m as f64;
        let best = (0..clusters.len() - 1)
            .min_by(|a, b| {
                (cumulative[*a] - target).abs().total_cmp(&(cumulative[*b] - target).abs())
            })
            .expect("at least two clusters");
        if cuts.last() != Some(&best) {
            cuts.push(best);
        }
    }
    cuts.sort_unstable();
    cuts.dedup();

    let lowest = clusters[0].0;
    let highest = clusters[clusters.len() - 1].0;
    let mut edges = alloc::vec![lowest];
    for c in &cuts {
        edges.push(0.5 * (clusters[*c].0 + clusters[*c + 1].0));
    }
    edges.push(highest);

    let mut bands = Vec::with_capacity(edges.len() - 1);
    for pair in edges.windows(2) {
        let band = level_set(phi, LevelKind::Between { alpha: pair[0], beta: pair[1] })?;
        if !band.set.is_empty() {
            bands.push(band);
        }
    }
    Ok(bands)
}

/// `count` midpoints between consecutive distinct values of `φ`, spread
/// evenly over the sorted value list. Level sets at these points split the
/// range without touching any atom's value.
pub fn sample_cut_levels(phi: &LpFunction, count: usize) -> Vec<f64> {
    let values = distinct_values(phi, &MeasurableSet::full(phi.space()));
    if values.len() < 2 || count == 0 {
        return Vec::new();
    }
    let gaps = values.len() - 1;
    let mut out: Vec<f64> = (0..count)
        .map(|k| {
            let g = ((k as f64 + 0.5) * gaps as f64 / count as f64) as usize;
            let g = g.min(gaps - 1);
            0.5 * (values[g] + values[g + 1])
        })
        .collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureSpace;
    use crate::multipliers::MultiplierShape;
    use alloc::sync::Arc;

    fn identity(n: usize) -> (Arc<MeasureSpace>, LpFunction) {
        let s = MeasureSpace::uniform_interval(n).unwrap();
        let phi = MultiplierShape::Identity.sample(&s).unwrap();
        (s, phi)
    }

    #[test]
    fn upper_level_set_measure() {
        let (_, phi) = identity(1024);
        let band = level_set(&phi, LevelKind::AtLeast { alpha: 0.25 }).unwrap();
        assert!((band.measure() - 0.75).abs() <= 1.0 / 1024.0);
    }

    #[test]
    fn degenerate_interval_is_at_most_one_atom() {
        let (_, phi) = identity(100);
        for a in [0.005, 0.1, 0.2, 0.33] {
            let band = level_set(&phi, LevelKind::Between { alpha: a, beta: a }).unwrap();
            assert!(band.set.len() <= 1);
        }
        let band = level_set(&phi, LevelKind::Between { alpha: 0.005, beta: 0.005 }).unwrap();
        assert_eq!(band.set.len(), 1);
    }

    #[test]
    fn full_range_is_everything() {
        let (s, phi) = identity(50);
        let band = level_set(&phi, LevelKind::Between { alpha: 0.0, beta: phi.sup() }).unwrap();
        assert_eq!(band.set, MeasurableSet::full(&s));
    }

    #[test]
    fn reversed_interval_rejected() {
        let (_, phi) = identity(8);
        assert_eq!(
            level_set(&phi, LevelKind::Between { alpha: 0.6, beta: 0.4 }),
            Err(Error::InvalidInterval { alpha: 0.6, beta: 0.4 })
        );
    }

    #[test]
    fn between_is_intersection() {
        let (_, phi) = identity(64);
        let both = level_set(&phi, LevelKind::Between { alpha: 0.2, beta: 0.7 }).unwrap();
        let lo = level_set(&phi, LevelKind::AtLeast { alpha: 0.2 }).unwrap();
        let hi = level_set(&phi, LevelKind::AtMost { alpha: 0.7 }).unwrap();
        assert_eq!(both.set, lo.set.intersect(&hi.set).unwrap());
    }

    #[test]
    fn flats_of_constant_and_identity() {
        let s = MeasureSpace::uniform_interval(32).unwrap();
        let c = LpFunction::constant(&s, 0.4, Exponent::Infinity);
        let report = detect_flats(&c, 0.01, 0.0).unwrap();
        assert_eq!(report.flats.len(), 1);
        assert_eq!(report.flats[0].measure, 1.0);

        let (_, phi) = identity(256);
        assert!(!detect_flats(&phi, 3.0 / 256.0, 0.0).unwrap().has_flat());
        assert!(detect_flats(&phi, 0.0, 0.0).is_err());
    }

    #[test]
    fn plateau_flat_measure() {
        let s = MeasureSpace::uniform_interval(1024).unwrap();
        let phi = MultiplierShape::Plateau { a: 0.25, b: 0.5 }.sample(&s).unwrap();
        let report = detect_flats(&phi, 0.01, 0.0).unwrap();
        assert_eq!(report.flats.len(), 1);
        let flat = &report.flats[0];
        assert_eq!(flat.value, 0.25);
        // atoms with center in [0.25, 0.5]: i = 256..=511
        assert_eq!(flat.set.len(), 256);
        assert!((flat.measure - 0.25).abs() <= 1.0 / 1024.0);
    }

    #[test]
    fn tau_merges_close_values() {
        let (_, phi) = identity(100);
        // clusters of width <= 0.1 contain 10 or 11 atoms
        let report = detect_flats(&phi, 0.1, 0.1).unwrap();
        assert!(report.has_flat());
        for f in &report.flats {
            for i in f.set.indices() {
                assert!((phi.values()[i] - f.value).abs() <= 0.1);
            }
        }
    }

    #[test]
    fn band_projection_algebra() {
        let s = MeasureSpace::uniform_interval(12).unwrap();
        let p = Exponent::Finite(2.0);
        let e = MeasurableSet::from_indices(&s, [0, 3, 4, 11]).unwrap();
        let pe = band_projection(&e, p);
        let pc = band_projection(&e.complement(), p);
        assert_eq!(pe.compose(&pe).unwrap(), pe);
        assert_eq!(pe.compose(&pc).unwrap().max_abs_entry(), 0.0);
        assert_eq!(band_projection(&MeasurableSet::full(&s), p), LinearOperator::identity(&s, p));
        assert!(pe.is_positive());
    }

    #[test]
    fn diagonal_operators_leave_everything_invariant() {
        let (s, phi) = identity(16);
        let m = LinearOperator::multiplication(&phi, Exponent::Finite(2.0));
        for idx in [[0usize, 5, 6], [1, 2, 15]] {
            let e = MeasurableSet::from_indices(&s, idx).unwrap();
            assert!(leaves_invariant(&m, &e, 0.0).unwrap().invariant);
        }
    }

    #[test]
    fn quartile_bands() {
        let (_, phi) = identity(1000);
        let bands = enumerate_hyperinvariant_bands(&phi, 4).unwrap();
        assert_eq!(bands.len(), 4);
        for b in &bands {
            assert!((b.measure() - 0.25).abs() < 2e-3);
        }
        for (i, a) in bands.iter().enumerate() {
            for b in &bands[i + 1..] {
                assert!(a.set.is_disjoint(&b.set).unwrap());
            }
        }
    }

    #[test]
    fn constant_has_single_band() {
        let s = MeasureSpace::uniform_interval(10).unwrap();
        let c = LpFunction::constant(&s, 1.0, Exponent::Infinity);
        assert_eq!(enumerate_hyperinvariant_bands(&c, 3), Err(Error::SingleBandOnly));
    }

    #[test]
    fn few_values_give_fewer_bands() {
        let s = MeasureSpace::uniform_interval(12).unwrap();
        let phi = MultiplierShape::Staircase { steps: 3 }.sample(&s).unwrap();
        let bands = enumerate_hyperinvariant_bands(&phi, 8).unwrap();
        assert_eq!(bands.len(), 3);
    }

    #[test]
    fn cut_levels_avoid_values() {
        let (_, phi) = identity(40);
        let cuts = sample_cut_levels(&phi, 5);
        assert_eq!(cuts.len(), 5);
        for c in cuts {
            assert!(phi.values().iter().all(|v| *v != c));
        }
    }
}
