//! Members of the commutant of `M_φ` and the checks they must pass.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::levelsets::{leaves_invariant, level_set, LevelKind};
use crate::lpspace::{Exponent, LpFunction};
use crate::measure::{Geometry, MeasurableSet, MeasureSpace};
use crate::multipliers::MultiplierShape;
use crate::operators::{commutator_norm, LinearOperator};
use crate::{Error, Result};

/// `‖φ‖ⁿ` beyond this stops the power sequences.
pub const POWER_OVERFLOW_GUARD: f64 = 1e100;
pub const DEFAULT_MAX_POWER: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct StarIdentity {
    /// `‖R(φⁿx) − φⁿRx‖ / (‖R‖ ‖φ‖ⁿ ‖x‖)` for `n = 1, 2, …`.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

fn normalized(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Checks `R(φⁿx) = φⁿRx` for `n ≤ n_max`, with `φⁿ` built by repeated
/// pointwise multiplication.
pub fn star_identity_check(
    r: &LinearOperator,
    phi: &LpFunction,
    x: &LpFunction,
    n_max: usize,
) -> Result<StarIdentity> {
    let rx = r.apply(x)?;
    let r_norm = r.norm_upper_bound();
    let phi_sup = phi.sup();
    let x_norm = x.norm();
    let mut phi_n = LpFunction::constant(phi.space(), 1.0, Exponent::Infinity);
    let mut deviations = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let scale = phi_sup.powi(n as i32);
        if scale > POWER_OVERFLOW_GUARD {
            break;
        }
        phi_n = phi_n.multiply_by(phi)?;
        let lhs = r.apply(&x.multiply_by(&phi_n)?)?;
        let rhs = rx.multiply_by(&phi_n)?;
        deviations.push(normalized(lhs.distance(&rhs)?, r_norm * scale * x_norm));
    }
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(StarIdentity { deviations, max_deviation })
}

/// The two norm sequences that the invariance argument plays against each
/// other: `‖R(φⁿx)‖` stays below `‖R‖‖x‖` when `Supp x ⊆ {φ ≤ 1}`, while
/// `‖φⁿRx‖ ≥ γⁿ ‖(Rx)χ_{φ>γ}‖` grows whenever `Rx` leaks above `γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthProbe {
    pub gamma: f64,
    /// `‖(Rx) χ_{φ>γ}‖`.
    pub leak_mass: f64,
    /// `‖R‖ ‖x‖`.
    pub bound: f64,
    /// `‖R(φⁿx)‖`.
    pub commuted: Vec<f64>,
    /// `‖φⁿ Rx‖`.
    pub multiplied: Vec<f64>,
    /// `γⁿ ‖(Rx) χ_{φ>γ}‖`.
    pub growth_floor: Vec<f64>,
}

impl GrowthProbe {
    pub fn commuted_bounded(&self) -> bool {
        self.commuted.iter().all(|v| *v <= self.bound * (1.0 + 1e-12))
    }

    pub fn multiplied_exceeds_bound(&self) -> bool {
        self.multiplied.last().is_some_and(|v| *v > self.bound)
    }
}

pub fn growth_contradiction_probe(
    r: &LinearOperator,
    phi: &LpFunction,
    x: &LpFunction,
    gamma: f64,
    n_max: usize,
) -> Result<GrowthProbe> {
    if !(gamma > 1.0) {
        return Err(Error::PreconditionError("gamma must exceed 1"));
    }
    let below_one = level_set(phi, LevelKind::AtMost { alpha: 1.0 })?;
    if !x.support(0.0).is_subset(&below_one.set)? {
        return Err(Error::PreconditionError("x must be supported in {phi <= 1}"));
    }
    let rx = r.apply(x)?;
    let leak = level_set(phi, LevelKind::Above { alpha: gamma })?;
    let leak_mass = rx.restrict(&leak.set)?.norm();
    let bound = r.norm_upper_bound() * x.norm();
    let mut probe = GrowthProbe {
        gamma,
        leak_mass,
        bound,
        commuted: Vec::new(),
        multiplied: Vec::new(),
        growth_floor: Vec::new(),
    };
    let mut phi_n = LpFunction::constant(phi.space(), 1.0, Exponent::Infinity);
    for n in 1..=n_max {
        if phi.sup().powi(n as i32) > POWER_OVERFLOW_GUARD {
            break;
        }
        phi_n = phi_n.multiply_by(phi)?;
        probe.commuted.push(r.apply(&x.multiply_by(&phi_n)?)?.norm());
        probe.multiplied.push(rx.multiply_by(&phi_n)?.norm());
        probe.growth_floor.push(gamma.powi(n as i32) * leak_mass);
    }
    Ok(probe)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisjointWitness {
    pub label: String,
    pub f: LpFunction,
    pub g: LpFunction,
    /// `min(|Tf|, |Tg|)`, non-zero somewhere.
    pub overlap: LpFunction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisjointnessReport {
    pub preserves: bool,
    pub pairs_tested: usize,
    pub witness: Option<DisjointWitness>,
}

fn structured_pairs(space: &alloc::sync::Arc<MeasureSpace>) -> Vec<(String, MeasurableSet, MeasurableSet)> {
    let mut out = Vec::new();
    match space.geometry() {
        Geometry::Grid { .. } => {
            let left = MeasurableSet::from_centers(space, |c| c.x < 0.5);
            out.push((String::from("x < 1/2 | x >= 1/2"), left.clone(), left.complement()));
            let low = MeasurableSet::from_centers(space, |c| c.y < 0.5);
            out.push((String::from("y < 1/2 | y >= 1/2"), low.clone(), low.complement()));
        }
        Geometry::Interval => {
            let left = MeasurableSet::from_centers(space, |c| c.x < 0.5);
            out.push((String::from("t < 1/2 | t >= 1/2"), left.clone(), left.complement()));
        }
        Geometry::Atoms => {
            let half = space.len() / 2;
            let left = MeasurableSet::from_predicate(space, |i| i < half);
            out.push((String::from("first half | second half"), left.clone(), left.complement()));
        }
    }
    let even = MeasurableSet::from_predicate(space, |i| i % 2 == 0);
    out.push((String::from("even atoms | odd atoms"), even.clone(), even.complement()));
    out
}

/// Searches for disjoint `f, g` whose images overlap. Structured pairs come
/// first (complementary half-space and interleaved indicators), then
/// `trials` random disjoint pairs with positive values drawn from `seed`.
pub fn disjointness_preservation_test(
    t: &LinearOperator,
    trials: usize,
    seed: u64,
) -> Result<DisjointnessReport> {
    let space = t.space();
    let p = t.p();
    let mut tested = 0;
    let check = |label: String, f: LpFunction, g: LpFunction| -> Result<Option<DisjointWitness>> {
        let overlap = t.apply(&f)?.min_abs(&t.apply(&g)?)?;
        Ok((overlap.sup() > 0.0).then_some(DisjointWitness { label, f, g, overlap }))
    };
    for (label, e, f) in structured_pairs(space) {
        tested += 1;
        let found = check(label, LpFunction::indicator(&e, p), LpFunction::indicator(&f, p))?;
        if let Some(w) = found {
            return Ok(DisjointnessReport { preserves: false, pairs_tested: tested, witness: Some(w) });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.len();
    for trial in 0..trials {
        tested += 1;
        let mut fv = alloc::vec![0.0; n];
        let mut gv = alloc::vec![0.0; n];
        for i in 0..n {
            match rng.random_range(0..3u8) {
                0 => fv[i] = rng.random_range(0.5..1.5),
                1 => gv[i] = rng.random_range(0.5..1.5),
                _ => {}
            }
        }
        let label = alloc::format!("random pair #{trial}");
        let found = check(label, LpFunction::new(space, fv, p)?, LpFunction::new(space, gv, p)?)?;
        if let Some(w) = found {
            return Ok(DisjointnessReport { preserves: false, pairs_tested: tested, witness: Some(w) });
        }
    }
    Ok(DisjointnessReport { preserves: true, pairs_tested: tested, witness: None })
}

/// The four facts about row averaging `R` on the unit square with `φ = y`.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleVerdicts {
    pub commutator_norm: f64,
    pub commutes: bool,
    pub disjointness: DisjointnessReport,
    pub alphas: Vec<f64>,
    /// Largest `‖P_{(E)ᶜ} R P_E‖` over the sampled `E^α` and `E_α`.
    pub level_violation: f64,
    pub level_bands_invariant: bool,
    /// `‖P_{Eᶜ} R P_E‖` for the vertical band `E = {x < 1/2}`.
    pub vertical_violation: f64,
    pub vertical_band_violated: bool,
}

impl CounterexampleVerdicts {
    pub fn all_hold(&self) -> bool {
        self.commutes
            && !self.disjointness.preserves
            && self.level_bands_invariant
            && self.vertical_band_violated
    }
}

/// Tolerances used by [`counterexample_scenario`].
pub const COMMUTE_TOL: f64 = 1e-12;
pub const INVARIANCE_TOL: f64 = 1e-12;
pub const VERTICAL_VIOLATION_FLOOR: f64 = 0.1;

pub fn counterexample_scenario(
    nx: usize,
    ny: usize,
    alpha_samples: usize,
    seed: u64,
) -> Result<CounterexampleVerdicts> {
    let grid = MeasureSpace::product_grid(nx, ny)?;
    let p = Exponent::Finite(2.0);
    let r = LinearOperator::averaging_counterexample(&grid, p)?;
    let phi = MultiplierShape::CoordinateY.sample(&grid)?;
    let m_phi = LinearOperator::multiplication(&phi, p);
    let comm = commutator_norm(&r, &m_phi)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas: Vec<f64> = (0..alpha_samples).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut level_violation = 0.0f64;
    for &alpha in &alphas {
        for kind in [LevelKind::AtMost { alpha }, LevelKind::AtLeast { alpha }] {
            let band = level_set(&phi, kind)?;
            level_violation = level_violation.max(leaves_invariant(&r, &band.set, INVARIANCE_TOL)?.violation);
        }
    }
    let vertical = MeasurableSet::from_centers(&grid, |c| c.x < 0.5);
    let vertical_violation = leaves_invariant(&r, &vertical, INVARIANCE_TOL)?.violation;
    let disjointness = disjointness_preservation_test(&r, 16, seed)?;

    Ok(CounterexampleVerdicts {
        commutator_norm: comm,
        commutes: comm <= COMMUTE_TOL,
        disjointness,
        alphas,
        level_violation,
        level_bands_invariant: level_violation <= INVARIANCE_TOL,
        vertical_violation,
        vertical_band_violated: vertical_violation >= VERTICAL_VIOLATION_FLOOR,
    })
}
