//! Disjoint witness sequences for operators dominated by a member of the
//! commutant of `M_φ` on `L_p`, `1 ≤ p < ∞`.
//!
//! Starting from `y = Ax ≠ 0` on the band `E_{α₀}^{β₀} = Ω`, every step cuts
//! the current band at a level `γ` that splits `u_k` into two halves of
//! (nearly) equal norm, splits `a_k` along the same level sets, keeps the
//! smaller half as `a_{k+1}` and sets the other half aside as `b_{k+1}`.
//! Because `A` leaves every level band invariant, `A a_{k+1} = u_{k+1}` and
//! `A b_{k+1} = v_{k+1}`. The normalized leftovers `e_n = b_n / ‖b_n‖` have
//! pairwise disjoint images whose norms stay above
//! `δ = (c / c₁) ‖y‖ / ‖x‖` with `c = 2^{-1/p}` and
//! `c₁ = [1 − (c‖y‖ / (‖A‖‖x‖))^p]^{1/p}`.
//!
//! On an atomic space the split function `γ ↦ ‖y χ_{E_α^γ}‖` is a step
//! function, so the exact ratio `c` is out of reach. Each step records the
//! ratio `ĉ_k` it achieved and every bound is checked with the achieved
//! ratios in place of `c` where the exact value is not forced.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::levelsets::{detect_flats_on, leaves_invariant, level_set, sample_cut_levels, LevelKind};
use crate::lpspace::LpFunction;
use crate::measure::{MeasurableSet, MeasureSpace};
use crate::operators::{LinearOperator, OperatorNormEstimate};
use crate::{Error, Result};

/// Flats at least `theta` in measure (values within `tau`) stop the
/// construction, mirroring the no-flat hypothesis at finite resolution.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlatResolution {
    pub theta: f64,
    pub tau: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WitnessConfig {
    /// Number of steps `K`; `None` picks `⌊log₂ #values⌋ − 1`.
    pub steps: Option<usize>,
    /// Largest tolerated `|ĉ − 2^{-1/p}|` on either side of a split.
    pub split_cap: f64,
    /// Largest tolerated `‖A a_{k+1} − u_{k+1}‖ / ‖u_k‖`.
    pub invariance_cap: f64,
    pub flat_resolution: Option<FlatResolution>,
    /// Number of cut levels at which the initial invariance check samples
    /// `E^α` and `E_α`.
    pub invariance_samples: usize,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            steps: None,
            split_cap: 0.1,
            invariance_cap: 1e-9,
            flat_resolution: None,
            invariance_samples: 8,
        }
    }
}

impl WitnessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == Some(0) {
            return Err(Error::InvalidParameter("need at least one step"));
        }
        if !(self.split_cap > 0.0) || !(self.invariance_cap > 0.0) {
            return Err(Error::InvalidParameter("caps must be positive"));
        }
        Ok(())
    }
}

/// `2^{-1/p}`.
pub fn halving_constant(p: f64) -> f64 {
    0.5f64.powf(1.0 / p)
}

/// A level `γ` cutting `y` into a lower part `y χ_{E_α^γ}` and an upper
/// part `y χ_{E_γ^β}`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Split {
    pub gamma: f64,
    /// `‖y χ_{E_α^γ}‖ / ‖y‖`.
    pub lower_ratio: f64,
    /// `‖y χ_{E_γ^β}‖ / ‖y‖`.
    pub upper_ratio: f64,
    /// `max` over both parts of `|ratio − 2^{-1/p}|`.
    pub deviation: f64,
}

/// Chooses `γ` among midpoints of consecutive distinct `φ`-values on
/// `Supp(y)` so that the lower part has norm closest to `2^{-1/p} ‖y‖`.
/// Ties go to the lower midpoint.
pub fn split_level(phi: &LpFunction, y: &LpFunction, alpha: f64, beta: f64, step: usize) -> Result<Split> {
    let p = y.p().require_finite()?;
    if !MeasureSpace::same(phi.space(), y.space()) {
        return Err(Error::SpaceMismatch);
    }
    let band = level_set(phi, LevelKind::Between { alpha, beta })?;
    let support = y.support(0.0);
    if support.is_empty() {
        return Err(Error::PreconditionError("y must be non-zero"));
    }
    if !support.is_subset(&band.set)? {
        return Err(Error::PreconditionError("y must be supported in the band [alpha, beta]"));
    }

    let values = phi.values();
    let w = phi.space().weights();
    let mut atoms: Vec<usize> = support.indices().collect();
    atoms.sort_by(|a, b| values[*a].total_cmp(&values[*b]));
    // p-th power mass per distinct value
    let mut groups: Vec<(f64, f64)> = Vec::new();
    for i in atoms {
        let mass = w[i] * y.values()[i].abs().powf(p);
        match groups.last_mut() {
            Some((v, m)) if *v == values[i] => *m += mass,
            _ => groups.push((values[i], mass)),
        }
    }
    if groups.len() < 2 {
        return Err(Error::FlatAtScale { step, reason: "fewer than two multiplier values on the support" });
    }
    let total: f64 = groups.iter().map(|g| g.1).sum();
    let target = halving_constant(p);
    let mut below = 0.0;
    let mut best: Option<(usize, f64, f64)> = None;
    for (g, (_, mass)) in groups[..groups.len() - 1].iter().enumerate() {
        below += mass;
        let ratio = (below / total).powf(1.0 / p);
        let dev = (ratio - target).abs();
        if best.is_none_or(|(_, _, d)| dev < d) {
            best = Some((g, ratio, dev));
        }
    }
    let (g, _, _) = best.expect("at least one cut");
    let gamma = 0.5 * (groups[g].0 + groups[g + 1].0);

    let lower = level_set(phi, LevelKind::Between { alpha, beta: gamma })?;
    let upper = level_set(phi, LevelKind::Between { alpha: gamma, beta })?;
    let norm = y.norm();
    let lower_ratio = y.restrict(&lower.set)?.norm() / norm;
    let upper_ratio = y.restrict(&upper.set)?.norm() / norm;
    let deviation = (lower_ratio - target).abs().max((upper_ratio - target).abs());
    Ok(Split { gamma, lower_ratio, upper_ratio, deviation })
}

/// The pair `(a_k, u_k)` with `A a_k = u_k`, both supported in
/// `E_{α_k}^{β_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessState {
    pub k: usize,
    pub a: LpFunction,
    pub u: LpFunction,
    pub alpha: f64,
    pub beta: f64,
}

/// Checks the hypotheses and returns the initial state `(x, y = Ax)` on
/// `[α₀, β₀] = [min(0, inf φ), ‖φ‖_∞]`.
pub fn init_state(
    a: &LinearOperator,
    phi: &LpFunction,
    x: &LpFunction,
    config: &WitnessConfig,
) -> Result<WitnessState> {
    config.validate()?;
    x.p().require_finite()?;
    if !MeasureSpace::same(a.space(), phi.space()) {
        return Err(Error::SpaceMismatch);
    }
    let y = a.apply(x)?;
    if y.norm() == 0.0 {
        return Err(Error::NoNonzeroImage);
    }
    let tol = config.invariance_cap * a.norm_upper_bound().max(1.0);
    for alpha in sample_cut_levels(phi, config.invariance_samples) {
        for kind in [LevelKind::AtMost { alpha }, LevelKind::AtLeast { alpha }] {
            let band = level_set(phi, kind)?;
            let check = leaves_invariant(a, &band.set, tol)?;
            if !check.invariant {
                return Err(Error::NotLevelInvariant { alpha, violation: check.violation });
            }
        }
    }
    Ok(WitnessState {
        k: 0,
        a: x.clone(),
        u: y,
        alpha: phi.min_value().min(0.0),
        beta: phi.sup(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepNorms {
    pub a: f64,
    pub b: f64,
    pub u: f64,
    pub v: f64,
}

/// The bounds of one step, evaluated with achieved split ratios.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepBounds {
    /// `ρ_k ‖y‖ / ‖A‖` with `ρ_k = Π_{j≤k} ĉ_j`.
    pub a_lower: f64,
    /// `c^k ‖x‖`.
    pub a_upper: f64,
    /// Achieved analogue of `c₁`: `[1 − (ρ_k ‖y‖ / (c^{k−1} ‖A‖ ‖x‖))^p]^{1/p}`.
    pub c1_achieved: f64,
    /// `ĉ₁ c^{k−1} ‖x‖`.
    pub b_upper: f64,
    /// `(1 − ĉ_k^p)^{1/p} ρ_{k−1} ‖y‖ / b_upper`, a lower bound for `‖A e_k‖`.
    pub delta_hat: f64,
    /// Inequality (1): `a_lower ≤ ‖a_k‖ ≤ a_upper`.
    pub bound1: bool,
    /// Inequality (2): `‖a_k‖ ≤ ‖b_k‖ ≤ b_upper`.
    pub bound2: bool,
}

/// Relative slack allowed on every inequality.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessStep {
    /// `k` of the functions produced (`a_k, b_k, u_k, v_k`), from 1.
    pub index: usize,
    /// The band `[α_{k−1}, β_{k−1}]` that was cut at `γ_{k−1}`.
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    /// Whether `a_k` is the lower piece `a_{k−1} χ_{E_α^γ}`.
    pub lower_chosen: bool,
    pub split: Split,
    /// `ĉ = ‖u_k‖ / ‖u_{k−1}‖`.
    pub ratio: f64,
    pub a: LpFunction,
    pub b: LpFunction,
    pub u: LpFunction,
    pub v: LpFunction,
    pub norms: StepNorms,
    /// `max(‖A a_k − u_k‖, ‖A b_k − v_k‖) / ‖u_{k−1}‖`.
    pub image_residual: f64,
    pub bounds: StepBounds,
}

/// One round of the recursion.
pub fn witness_step(
    state: &WitnessState,
    phi: &LpFunction,
    a_op: &LinearOperator,
    config: &WitnessConfig,
) -> Result<(WitnessStep, WitnessState)> {
    let index = state.k + 1;
    let (alpha, beta) = (state.alpha, state.beta);
    if let Some(res) = config.flat_resolution {
        let band = level_set(phi, LevelKind::Between { alpha, beta })?;
        if detect_flats_on(phi, &band.set, res.theta, res.tau)?.has_flat() {
            return Err(Error::FlatAtScale { step: index, reason: "the band contains a flat of measure >= theta" });
        }
    }
    let split = split_level(phi, &state.u, alpha, beta, index)?;
    if split.deviation > config.split_cap {
        return Err(Error::FlatAtScale { step: index, reason: "no level splits the norm within the cap" });
    }
    let gamma = split.gamma;
    let lower = level_set(phi, LevelKind::Between { alpha, beta: gamma })?.set;
    let upper = level_set(phi, LevelKind::Between { alpha: gamma, beta })?.set;

    let a_lower = state.a.restrict(&lower)?;
    let a_upper = state.a.restrict(&upper)?;
    let lower_chosen = a_lower.norm() <= a_upper.norm();
    let (a, b, keep, drop, next) = if lower_chosen {
        (a_lower, a_upper, &lower, &upper, (alpha, gamma))
    } else {
        (a_upper, a_lower, &upper, &lower, (gamma, beta))
    };
    let u = state.u.restrict(keep)?;
    let v = state.u.restrict(drop)?;
    let norms = StepNorms { a: a.norm(), b: b.norm(), u: u.norm(), v: v.norm() };
    if norms.a == 0.0 {
        return Err(Error::StarvedSide { step: index });
    }
    let u_prev = state.u.norm();
    let image_residual = a_op.apply(&a)?.distance(&u)?.max(a_op.apply(&b)?.distance(&v)?) / u_prev;
    if !(image_residual <= config.invariance_cap) {
        return Err(Error::InvarianceViolation { step: index, residual: image_residual });
    }
    let ratio = norms.u / u_prev;
    let next_state = WitnessState { k: index, a: a.clone(), u: u.clone(), alpha: next.0, beta: next.1 };
    let step = WitnessStep {
        index,
        alpha,
        gamma,
        beta,
        lower_chosen,
        split,
        ratio,
        a,
        b,
        u,
        v,
        norms,
        image_residual,
        bounds: StepBounds::default(),
    };
    Ok((step, next_state))
}

/// Constants of the construction.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WitnessConstants {
    pub p: f64,
    /// `2^{-1/p}`.
    pub c: f64,
    /// `[1 − (c‖y‖ / (‖A‖‖x‖))^p]^{1/p}`.
    pub c1: f64,
    /// Upper estimate of `‖A‖` used in `c₁` and the bounds.
    pub a_norm: f64,
    pub x_norm: f64,
    pub y_norm: f64,
    /// `(c / c₁) ‖y‖ / ‖x‖`.
    pub delta: f64,
}

impl WitnessConstants {
    fn new(p: f64, a_norm: f64, x_norm: f64, y_norm: f64) -> Self {
        let c = halving_constant(p);
        let c1 = (1.0 - (c * y_norm / (a_norm * x_norm)).powf(p)).max(0.0).powf(1.0 / p);
        let delta = c / c1 * y_norm / x_norm;
        Self { p, c, c1, a_norm, x_norm, y_norm, delta }
    }

    /// Bounds for step `k` given `ρ_k`, `ρ_{k−1}` and the measured norms.
    pub fn step_bounds(&self, k: usize, rho: f64, rho_prev: f64, ratio: f64, norm_a: f64, norm_b: f64) -> StepBounds {
        let p = self.p;
        let c_prev = self.c.powi(k as i32 - 1);
        let a_lower = rho * self.y_norm / self.a_norm;
        let a_upper = c_prev * self.c * self.x_norm;
        let base = (rho * self.y_norm / (c_prev * self.a_norm * self.x_norm)).min(1.0);
        let c1_achieved = (1.0 - base.powf(p)).max(0.0).powf(1.0 / p);
        let b_upper = c1_achieved * c_prev * self.x_norm;
        let other_ratio = (1.0 - ratio.powf(p)).max(0.0).powf(1.0 / p);
        let delta_hat = if b_upper > 0.0 { other_ratio * rho_prev * self.y_norm / b_upper } else { 0.0 };
        let le = |x: f64, y: f64| x <= y * (1.0 + BOUND_SLACK);
        StepBounds {
            a_lower,
            a_upper,
            c1_achieved,
            b_upper,
            delta_hat,
            bound1: le(a_lower, norm_a) && le(norm_a, a_upper),
            bound2: le(norm_a, norm_b) && le(norm_b, b_upper),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessTrace {
    pub phi: LpFunction,
    pub x: LpFunction,
    pub y: LpFunction,
    pub a_norm: OperatorNormEstimate,
    pub constants: WitnessConstants,
    pub requested_steps: usize,
    pub steps: Vec<WitnessStep>,
    /// `e_n = b_n / ‖b_n‖`.
    pub e: Vec<LpFunction>,
    /// `A e_n`.
    pub images: Vec<LpFunction>,
    /// Smallest per-step `δ̂`.
    pub delta_hat: f64,
    /// Why the run ended before `requested_steps`, if it did.
    pub stop: Option<Error>,
}

impl WitnessTrace {
    pub fn completed_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn is_complete(&self) -> bool {
        self.stop.is_none() && self.steps.len() == self.requested_steps
    }
}

/// `⌊log₂ m⌋ − 1` for `m` distinct values of `φ` on `Supp(x)`, at least 1.
pub fn default_steps(phi: &LpFunction, x: &LpFunction) -> usize {
    let m = crate::levelsets::distinct_values(phi, &x.support(0.0)).len().max(1);
    (m.ilog2() as usize).saturating_sub(1).max(1)
}

/// Runs the recursion for up to `K` steps. Hypothesis failures are errors;
/// a step that cannot be taken ends the run and is recorded in
/// [`WitnessTrace::stop`].
pub fn run_witness(
    a_op: &LinearOperator,
    phi: &LpFunction,
    x: &LpFunction,
    config: &WitnessConfig,
) -> Result<WitnessTrace> {
    let mut state = init_state(a_op, phi, x, config)?;
    let p = x.p().require_finite()?;
    let requested_steps = config.steps.unwrap_or_else(|| default_steps(phi, x));
    let a_norm = a_op.operator_norm();
    let constants = WitnessConstants::new(p, a_norm.upper, x.norm(), state.u.norm());
    let y = state.u.clone();

    let mut steps: Vec<WitnessStep> = Vec::with_capacity(requested_steps);
    let mut stop = None;
    let mut rho = 1.0;
    for _ in 0..requested_steps {
        match witness_step(&state, phi, a_op, config) {
            Ok((mut step, next)) => {
                let rho_prev = rho;
                rho *= step.ratio;
                step.bounds = constants.step_bounds(step.index, rho, rho_prev, step.ratio, step.norms.a, step.norms.b);
                steps.push(step);
                state = next;
            }
            Err(err) => {
                stop = Some(err);
                break;
            }
        }
    }

    let mut e = Vec::with_capacity(steps.len());
    let mut images = Vec::with_capacity(steps.len());
    for step in &steps {
        let en = step.b.scale(1.0 / step.norms.b);
        images.push(a_op.apply(&en)?);
        e.push(en);
    }
    let delta_hat = steps.iter().map(|s| s.bounds.delta_hat).fold(f64::INFINITY, f64::min);
    Ok(WitnessTrace {
        phi: phi.clone(),
        x: x.clone(),
        y,
        a_norm,
        constants,
        requested_steps,
        steps,
        e,
        images,
        delta_hat: if delta_hat.is_finite() { delta_hat } else { 0.0 },
        stop,
    })
}

/// One verdict of [`verify_trace`]. `worst` is the largest violation
/// measure observed (relative where the check is relative).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceVerification {
    pub checks: Vec<Check>,
    /// Smallest `‖A e_n‖`.
    pub min_image_norm: f64,
    /// Whether `‖A e_n‖ ≥ δ` with the ideal constants also held.
    pub ideal_delta_holds: bool,
}

impl TraceVerification {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const UNIT_NORM_TOL: f64 = 1e-12;
pub const NORM_IDENTITY_TOL: f64 = 1e-10;

fn overlapping_pairs(functions: &[LpFunction]) -> usize {
    let Some(first) = functions.first() else { return 0 };
    let mut seen = MeasurableSet::empty(first.space());
    let mut clashes = 0;
    for f in functions {
        let s = f.support(0.0);
        if !s.is_disjoint(&seen).unwrap_or(false) {
            clashes += 1;
        }
        seen = seen.union(&s).unwrap_or(seen);
    }
    clashes
}

/// Re-derives every property of a trace from its stored functions:
/// unit norms, disjointness of `e_n` and `A e_n`, the lower bound with
/// achieved constants, inequalities (1) and (2), `‖u_k‖ = ρ_k ‖y‖`,
/// p-additivity of each split, support nesting and `‖A e_n‖ ‖b_n‖ = ‖v_n‖`.
pub fn verify_trace(trace: &WitnessTrace) -> Result<TraceVerification> {
    if trace.steps.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let k = trace.constants;
    let mut unit = 0.0f64;
    let mut lower_bound = f64::NEG_INFINITY;
    let mut bound1 = 0.0f64;
    let mut bound2 = 0.0f64;
    let mut product = 0.0f64;
    let mut additivity = 0.0f64;
    let mut nesting_failures = 0usize;
    let mut chain = 0.0f64;
    let mut min_image = f64::INFINITY;

    let mut rho = 1.0;
    let mut a_prev = trace.x.clone();
    let mut u_prev = trace.y.clone();
    let rel = |x: f64, y: f64| if y == 0.0 { x.abs() } else { x / y };
    for (n, step) in trace.steps.iter().enumerate() {
        let (na, nb, nu, nv) = (step.a.norm(), step.b.norm(), step.u.norm(), step.v.norm());
        let rho_prev = rho;
        rho *= step.ratio;
        let b = k.step_bounds(step.index, rho, rho_prev, step.ratio, na, nb);

        let e_norm = trace.e.get(n).map_or(0.0, |e| e.norm());
        unit = unit.max((e_norm - 1.0).abs());
        let image = trace.images.get(n).map_or(0.0, |f| f.norm());
        min_image = min_image.min(image);
        lower_bound = lower_bound.max(rel(b.delta_hat - image, b.delta_hat));

        bound1 = bound1.max(rel(b.a_lower - na, na)).max(rel(na - b.a_upper, b.a_upper));
        bound2 = bound2.max(rel(na - nb, nb)).max(rel(nb - b.b_upper, b.b_upper));
        product = product.max(rel((nu - rho * k.y_norm).abs(), nu));
        let prev_pow = a_prev.norm_pow()?;
        additivity = additivity.max(rel((step.a.norm_pow()? + step.b.norm_pow()? - prev_pow).abs(), prev_pow));
        chain = chain.max(rel((image * nb - nv).abs(), nv));

        let lower = level_set(&trace.phi, LevelKind::Between { alpha: step.alpha, beta: step.gamma })?.set;
        let upper = level_set(&trace.phi, LevelKind::Between { alpha: step.gamma, beta: step.beta })?.set;
        let (keep, drop) = if step.lower_chosen { (&lower, &upper) } else { (&upper, &lower) };
        let sa = step.a.support(0.0);
        let sb = step.b.support(0.0);
        let su = step.u.support(0.0);
        let sv = step.v.support(0.0);
        let prev_support = a_prev.support(0.0);
        let sums_back = step.u.add(&step.v)? == u_prev;
        let nested = sa.is_subset(&prev_support)?
            && sb.is_subset(&prev_support)?
            && sa.is_disjoint(&sb)?
            && su.is_subset(keep)?
            && sv.is_subset(drop)?
            && sums_back;
        if !nested {
            nesting_failures += 1;
        }
        a_prev = step.a.clone();
        u_prev = step.u.clone();
    }
    let overlaps = overlapping_pairs(&trace.e) + overlapping_pairs(&trace.images);
    let counts_match = trace.e.len() == trace.steps.len() && trace.images.len() == trace.steps.len();
    let checks = alloc::vec![
        Check { name: "unit_norm", passed: counts_match && unit <= UNIT_NORM_TOL, worst: unit },
        Check { name: "disjoint_images", passed: counts_match && overlaps == 0, worst: overlaps as f64 },
        Check { name: "lower_bound", passed: lower_bound <= BOUND_SLACK, worst: lower_bound },
        Check { name: "bound_1", passed: bound1 <= BOUND_SLACK, worst: bound1 },
        Check { name: "bound_2", passed: bound2 <= BOUND_SLACK, worst: bound2 },
        Check { name: "u_norm_product", passed: product <= NORM_IDENTITY_TOL, worst: product },
        Check { name: "p_additivity", passed: additivity <= NORM_IDENTITY_TOL, worst: additivity },
        Check { name: "support_nesting", passed: nesting_failures == 0, worst: nesting_failures as f64 },
        Check { name: "norm_chain", passed: chain <= NORM_IDENTITY_TOL, worst: chain },
    ];
    let ideal_delta_holds = min_image >= k.delta * (1.0 - UNIT_NORM_TOL);
    Ok(TraceVerification { checks, min_image_norm: min_image, ideal_delta_holds })
}
