//! The four command scenarios. Each returns a serializable report and, where
//! useful, CSV text; the binary only parses flags and writes files.

use mulop_core::commutant::counterexample_scenario;
use mulop_core::compactcheck::{disjoint_decay, dyadic_blocks, order_bound_witness, DecayReport};
use mulop_core::levelsets::{detect_flats, enumerate_hyperinvariant_bands};
use mulop_core::operators::{commutator_norm, dominates, Kernel};
use mulop_core::witness::{
    run_witness, verify_trace, Check, FlatResolution, Split, StepBounds, StepNorms, WitnessConfig, WitnessConstants,
};
use mulop_core::{Exponent, LevelKind, LinearOperator, LpFunction, OperatorNormEstimate};
use serde::Serialize;

use crate::formats::{space_hash, SpaceSpec};
use crate::names::{MultiplierSpec, OperatorSpec};
use crate::LabError;

pub const SCHEMA: u32 = 1;
/// Tolerance for commutator, positivity and idempotence verdicts.
pub const EXACT_TOL: f64 = 1e-12;

fn exponent(p: f64) -> Result<Exponent, LabError> {
    Ok(Exponent::from_value(p)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorSummary {
    pub kind: String,
    pub message: String,
}

impl From<&LabError> for ErrorSummary {
    fn from(e: &LabError) -> Self {
        Self { kind: e.kind(), message: e.to_string() }
    }
}

/// Report emitted when a command fails before producing its own report.
#[derive(Clone, Debug, Serialize)]
pub struct FailureReport {
    pub schema: u32,
    pub command: String,
    pub error: ErrorSummary,
}

// analyze

#[derive(Clone, Debug)]
pub struct AnalyzeArgs {
    pub space: SpaceSpec,
    pub multiplier: MultiplierSpec,
    pub theta: f64,
    pub tau: f64,
    pub bands: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatSummary {
    pub value: f64,
    pub measure: f64,
    pub atoms: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BandSummary {
    #[serde(flatten)]
    pub kind: LevelKind,
    pub measure: f64,
    pub atoms: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankOneSummary {
    pub flat_value: f64,
    pub flat_measure: f64,
    pub commutator_norm: f64,
    pub positive: bool,
    /// `max |(P² − P)_ij|`.
    pub idempotence_error: f64,
}

impl RankOneSummary {
    pub fn holds(&self) -> bool {
        self.commutator_norm <= EXACT_TOL && self.positive && self.idempotence_error <= EXACT_TOL
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub schema: u32,
    pub command: &'static str,
    pub space: SpaceSpec,
    pub space_hash: String,
    pub multiplier: String,
    pub theta: f64,
    pub tau: f64,
    pub has_flat: bool,
    pub flats: Vec<FlatSummary>,
    pub bands: Option<Vec<BandSummary>>,
    pub bands_error: Option<ErrorSummary>,
    pub rank_one: Option<RankOneSummary>,
    pub pass: bool,
}

/// Flats of `φ`, its level bands and, when a flat exists, the rank-one
/// averaging projection onto the widest flat.
pub fn analyze(args: &AnalyzeArgs) -> Result<AnalyzeReport, LabError> {
    let space = args.space.build()?;
    let phi = args.multiplier.sample(&space)?;
    let report = detect_flats(&phi, args.theta, args.tau)?;
    let flats = report
        .flats
        .iter()
        .map(|f| FlatSummary { value: f.value, measure: f.measure, atoms: f.set.len() })
        .collect();
    let (bands, bands_error) = match enumerate_hyperinvariant_bands(&phi, args.bands) {
        Ok(bands) => (
            Some(
                bands
                    .iter()
                    .map(|b| BandSummary { kind: b.kind, measure: b.measure(), atoms: b.set.len() })
                    .collect(),
            ),
            None,
        ),
        Err(e @ mulop_core::Error::SingleBandOnly) => (None, Some(ErrorSummary::from(&LabError::from(e)))),
        Err(e) => return Err(e.into()),
    };
    let rank_one = match report.largest() {
        Some(flat) => {
            let p2 = Exponent::Finite(2.0);
            let proj = LinearOperator::rank_one_flat(&phi, &flat.set, args.tau, p2)?;
            let m = LinearOperator::multiplication(&phi, p2);
            let square = proj.compose(&proj)?;
            let idempotence_error = square.sub(&proj)?.max_abs_entry();
            Some(RankOneSummary {
                flat_value: flat.value,
                flat_measure: flat.measure,
                commutator_norm: commutator_norm(&m, &proj)?,
                positive: proj.is_positive(),
                idempotence_error,
            })
        }
        None => None,
    };
    let pass = rank_one.as_ref().is_none_or(RankOneSummary::holds);
    Ok(AnalyzeReport {
        schema: SCHEMA,
        command: "analyze",
        space: args.space,
        space_hash: space_hash(&space),
        multiplier: args.multiplier.to_string(),
        theta: args.theta,
        tau: args.tau,
        has_flat: report.has_flat(),
        flats,
        bands,
        bands_error,
        rank_one,
        pass,
    })
}

// witness

#[derive(Clone, Debug)]
pub struct WitnessArgs {
    pub space: SpaceSpec,
    pub multiplier: MultiplierSpec,
    pub operator: OperatorSpec,
    pub p: f64,
    pub config: WitnessConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepSummary {
    pub index: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub lower_chosen: bool,
    pub ratio: f64,
    pub split: Split,
    pub norms: StepNorms,
    /// `‖A e_k‖`.
    pub image_norm: f64,
    pub image_residual: f64,
    pub bounds: StepBounds,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationSummary {
    pub checks: Vec<Check>,
    pub min_image_norm: f64,
    pub ideal_delta_holds: bool,
    pub all_passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub schema: u32,
    pub command: &'static str,
    pub space: SpaceSpec,
    pub space_hash: String,
    pub multiplier: String,
    pub operator: String,
    pub p: f64,
    pub config: WitnessConfig,
    pub a_norm: OperatorNormEstimate,
    /// Whether the known commutant member dominates `A`, when there is one.
    pub dominated_by_commutant: Option<bool>,
    pub constants: WitnessConstants,
    pub requested_steps: usize,
    pub completed_steps: usize,
    pub steps: Vec<StepSummary>,
    pub delta_hat: f64,
    pub stop: Option<ErrorSummary>,
    pub verification: Option<VerificationSummary>,
    pub pass: bool,
}

/// Runs the witness construction with `x ≡ 1` and verifies the trace.
/// Returns the report and the per-step CSV.
pub fn witness(args: &WitnessArgs) -> Result<(WitnessReport, String), LabError> {
    let space = args.space.build()?;
    let p = exponent(args.p)?;
    let phi = args.multiplier.sample(&space)?;
    let (a, r) = args.operator.build(&phi, p)?;
    let dominated_by_commutant = r.as_ref().map(|r| dominates(r, &a)).transpose()?;
    let x = LpFunction::constant(&space, 1.0, p);
    let trace = run_witness(&a, &phi, &x, &args.config)?;
    let verification = match verify_trace(&trace) {
        Ok(v) => Some(VerificationSummary {
            all_passed: v.all_passed(),
            checks: v.checks,
            min_image_norm: v.min_image_norm,
            ideal_delta_holds: v.ideal_delta_holds,
        }),
        Err(mulop_core::Error::EmptyTrace) => None,
        Err(e) => return Err(e.into()),
    };
    let steps: Vec<StepSummary> = trace
        .steps
        .iter()
        .zip(&trace.images)
        .map(|(s, img)| StepSummary {
            index: s.index,
            alpha: s.alpha,
            gamma: s.gamma,
            beta: s.beta,
            lower_chosen: s.lower_chosen,
            ratio: s.ratio,
            split: s.split,
            norms: s.norms,
            image_norm: img.norm(),
            image_residual: s.image_residual,
            bounds: s.bounds,
        })
        .collect();

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record([
        "k", "alpha", "gamma", "beta", "lower_chosen", "ratio", "norm_a", "norm_b", "norm_u", "norm_v", "image_norm",
        "delta_hat", "bound1", "bound2",
    ])?;
    for s in &steps {
        csv.write_record([
            s.index.to_string(),
            s.alpha.to_string(),
            s.gamma.to_string(),
            s.beta.to_string(),
            s.lower_chosen.to_string(),
            s.ratio.to_string(),
            s.norms.a.to_string(),
            s.norms.b.to_string(),
            s.norms.u.to_string(),
            s.norms.v.to_string(),
            s.image_norm.to_string(),
            s.bounds.delta_hat.to_string(),
            s.bounds.bound1.to_string(),
            s.bounds.bound2.to_string(),
        ])?;
    }
    let csv = String::from_utf8(csv.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8");

    let pass = trace.is_complete()
        && verification.as_ref().is_some_and(|v| v.all_passed)
        && dominated_by_commutant != Some(false);
    let stop = trace.stop.clone().map(|e| ErrorSummary::from(&LabError::from(e)));
    let report = WitnessReport {
        schema: SCHEMA,
        command: "witness",
        space: args.space,
        space_hash: space_hash(&space),
        multiplier: args.multiplier.to_string(),
        operator: args.operator.to_string(),
        p: args.p,
        config: args.config,
        a_norm: trace.a_norm,
        dominated_by_commutant,
        constants: trace.constants,
        requested_steps: trace.requested_steps,
        completed_steps: trace.completed_steps(),
        steps,
        delta_hat: trace.delta_hat,
        stop,
        verification,
        pass,
    };
    Ok((report, csv))
}

/// Builds a [`WitnessConfig`] from command-line style options.
pub fn witness_config(steps: Option<usize>, theta: Option<f64>, tau: f64) -> WitnessConfig {
    WitnessConfig {
        steps,
        flat_resolution: theta.map(|theta| FlatResolution { theta, tau }),
        ..WitnessConfig::default()
    }
}

// commutant-check

#[derive(Clone, Debug)]
pub struct CommutantArgs {
    pub nx: usize,
    pub ny: usize,
    pub alphas: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisjointnessSummary {
    pub preserves: bool,
    pub pairs_tested: usize,
    pub witness: Option<String>,
    /// Range of `min(|Rf|, |Rg|)` over atoms for the witness pair.
    pub overlap_min: Option<f64>,
    pub overlap_max: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutantReport {
    pub schema: u32,
    pub command: &'static str,
    pub grid: SpaceSpec,
    pub seed: u64,
    pub commutator_norm: f64,
    pub commutes: bool,
    pub alphas: Vec<f64>,
    pub level_violation: f64,
    pub level_bands_invariant: bool,
    pub vertical_violation: f64,
    pub vertical_band_violated: bool,
    pub disjointness: DisjointnessSummary,
    pub pass: bool,
}

/// Row averaging on the grid against `φ(x, y) = y`.
pub fn commutant_check(args: &CommutantArgs) -> Result<CommutantReport, LabError> {
    let v = counterexample_scenario(args.nx, args.ny, args.alphas, args.seed)?;
    let w = v.disjointness.witness.as_ref();
    let disjointness = DisjointnessSummary {
        preserves: v.disjointness.preserves,
        pairs_tested: v.disjointness.pairs_tested,
        witness: w.map(|w| w.label.clone()),
        overlap_min: w.map(|w| w.overlap.min_value()),
        overlap_max: w.map(|w| w.overlap.max_value()),
    };
    Ok(CommutantReport {
        schema: SCHEMA,
        command: "commutant-check",
        grid: SpaceSpec::Grid { nx: args.nx, ny: args.ny },
        seed: args.seed,
        pass: v.all_hold(),
        commutator_norm: v.commutator_norm,
        commutes: v.commutes,
        alphas: v.alphas,
        level_violation: v.level_violation,
        level_bands_invariant: v.level_bands_invariant,
        vertical_violation: v.vertical_violation,
        vertical_band_violated: v.vertical_band_violated,
        disjointness,
    })
}

// compact-decay

#[derive(Clone, Debug)]
pub struct DecayArgs {
    pub n: usize,
    pub width: f64,
    pub terms: usize,
    pub per_octave: usize,
    pub p: f64,
    pub decay_factor: f64,
    /// Terms of the certificate search; 0 skips it.
    pub order_terms: usize,
}

impl Default for DecayArgs {
    fn default() -> Self {
        Self { n: 4096, width: 0.02, terms: 64, per_octave: 8, p: 2.0, decay_factor: 0.25, order_terms: 6 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecaySummary {
    pub start_atom: usize,
    pub norms: Vec<f64>,
    pub dominating_norms: Vec<f64>,
    pub head_max: f64,
    pub tail_max: f64,
    pub ratio: f64,
    pub decays: bool,
    pub domination_holds: bool,
    pub images_disjoint: bool,
    pub all_positive: bool,
    pub min_norm: f64,
}

impl DecaySummary {
    fn new(start_atom: usize, r: DecayReport) -> Self {
        Self {
            start_atom,
            ratio: r.ratio(),
            decays: r.decays(),
            all_positive: r.all_positive(),
            min_norm: r.norms.iter().copied().fold(f64::INFINITY, f64::min),
            head_max: r.head_max,
            tail_max: r.tail_max,
            domination_holds: r.domination_holds,
            images_disjoint: r.images_disjoint,
            norms: r.norms,
            dominating_norms: r.dominating_norms,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderBoundSummary {
    pub selected: Vec<usize>,
    pub distances: Vec<f64>,
    pub min_slack: f64,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReportOut {
    pub schema: u32,
    pub command: &'static str,
    pub space: SpaceSpec,
    pub width: f64,
    pub p: f64,
    pub terms: usize,
    pub per_octave: usize,
    pub decay_factor: f64,
    pub gaussian: DecaySummary,
    /// `A = M_φ` with `φ(t) = t` on blocks inside `{φ ≥ 1/2}`.
    pub multiplication: DecaySummary,
    pub order_bound: Option<OrderBoundSummary>,
    pub order_bound_error: Option<ErrorSummary>,
    pub pass: bool,
}

/// Gaussian kernel against disjoint dyadic indicators, with a multiplication
/// operator on the same block pattern for contrast.
pub fn compact_decay(args: &DecayArgs) -> Result<(DecayReportOut, String), LabError> {
    let spec = SpaceSpec::Interval { n: args.n };
    let space = spec.build()?;
    let p = exponent(args.p)?;
    let kernel = Kernel::Gaussian { width: args.width };
    let k = LinearOperator::kernel_operator(&space, p, |s, t| kernel.eval(s, t))?;
    let e = dyadic_blocks(&space, 0, args.terms, args.per_octave, p)?;
    let gaussian = DecaySummary::new(0, disjoint_decay(&k, &k, &e, args.decay_factor)?);

    let start = args.n / 2;
    let phi = LpFunction::from_centers(&space, Exponent::Infinity, |c| c.x)?;
    let m = LinearOperator::multiplication(&phi, p);
    let e_mul = dyadic_blocks(&space, start, args.terms, args.per_octave, p)?;
    let multiplication = DecaySummary::new(start, disjoint_decay(&m, &m.modulus(), &e_mul, args.decay_factor)?);

    let (order_bound, order_bound_error) = if args.order_terms == 0 {
        (None, None)
    } else {
        match order_bound_witness(&k, &e, args.order_terms) {
            Ok(cert) => (
                Some(OrderBoundSummary {
                    certified: cert.certified(),
                    min_slack: cert.slack.iter().copied().fold(f64::INFINITY, f64::min),
                    selected: cert.selected,
                    distances: cert.distances,
                }),
                None,
            ),
            Err(err @ mulop_core::Error::NoClusterPoint { .. }) => (None, Some(ErrorSummary::from(&LabError::from(err)))),
            Err(err) => return Err(err.into()),
        }
    };

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["n", "gaussian", "gaussian_dominating", "multiplication"])?;
    for i in 0..gaussian.norms.len() {
        csv.write_record([
            (i + 1).to_string(),
            gaussian.norms[i].to_string(),
            gaussian.dominating_norms[i].to_string(),
            multiplication.norms[i].to_string(),
        ])?;
    }
    let csv = String::from_utf8(csv.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8");

    let pass = gaussian.decays
        && gaussian.all_positive
        && gaussian.domination_holds
        && !multiplication.decays
        && order_bound.as_ref().is_none_or(|o| o.certified);
    let report = DecayReportOut {
        schema: SCHEMA,
        command: "compact-decay",
        space: spec,
        width: args.width,
        p: args.p,
        terms: args.terms,
        per_octave: args.per_octave,
        decay_factor: args.decay_factor,
        gaussian,
        multiplication,
        order_bound,
        order_bound_error,
        pass,
    };
    Ok((report, csv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mulop_core::MultiplierShape;

    #[test]
    fn analyze_identity_has_no_flat() {
        let args = AnalyzeArgs {
            space: SpaceSpec::Interval { n: 256 },
            multiplier: MultiplierSpec::Shape(MultiplierShape::Identity),
            theta: 0.01,
            tau: 0.0,
            bands: 4,
        };
        let r = analyze(&args).unwrap();
        assert!(!r.has_flat && r.pass);
        assert_eq!(r.bands.unwrap().len(), 4);
    }

    #[test]
    fn analyze_constant_reports_single_band() {
        let args = AnalyzeArgs {
            space: SpaceSpec::Interval { n: 64 },
            multiplier: MultiplierSpec::Shape(MultiplierShape::Constant(1.0)),
            theta: 0.01,
            tau: 0.0,
            bands: 4,
        };
        let r = analyze(&args).unwrap();
        assert!(r.bands.is_none());
        assert_eq!(r.bands_error.unwrap().kind, "SingleBandOnly");
        assert!(r.has_flat && r.pass);
    }

    #[test]
    fn witness_csv_has_one_row_per_step() {
        let args = WitnessArgs {
            space: SpaceSpec::Interval { n: 256 },
            multiplier: MultiplierSpec::Shape(MultiplierShape::Identity),
            operator: OperatorSpec::ScaledMultiplier,
            p: 2.0,
            config: witness_config(Some(4), None, 0.0),
        };
        let (r, csv) = witness(&args).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.dominated_by_commutant, Some(true));
        assert_eq!(csv.lines().count(), 5);
    }
}
