//! Parameter sweeps and minimization over the controller transmissivity,
//! the analysis frequency and the pump strength, with crossover detection
//! against the feedback-free reference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feedback::{cfc_variance, modified_threshold, LoopParams};
use crate::nopa::{nopa_only_variances, AnalysisPoint, NopaParams};

/// Axis tolerance for crossover and optimum refinement.
pub const AXIS_REFINE_TOL: f64 = 1e-6;
/// Residual |cfc - bare| required at a reported crossover.
const CROSSOVER_RESIDUAL_TOL: f64 = 1e-9;
/// Values within this window of the incumbent minimum count as ties, so
/// a flat objective keeps the smallest axis value (determinism).
const TIE_TOL: f64 = 1e-12;
/// Residuals inside this band count as zero in the crossover scan:
/// analytic tangencies (e.g. the pump-off endpoint, where closed-loop
/// and bare curves coincide at the vacuum level) otherwise flicker in
/// sign at roundoff scale.
const CROSSOVER_SIGN_FLOOR: f64 = 1e-12;
const INV_PHI: f64 = 0.618_033_988_749_894_8; // (sqrt(5) - 1) / 2

/// Which operating parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    TransmissivityT,
    FrequencyHz,
    Beta,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::TransmissivityT => "transmissivity_t",
            SweepAxis::FrequencyHz => "frequency_hz",
            SweepAxis::Beta => "beta",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transmissivity_t" | "t" => Ok(SweepAxis::TransmissivityT),
            "frequency_hz" | "frequency" => Ok(SweepAxis::FrequencyHz),
            "beta" => Ok(SweepAxis::Beta),
            other => Err(Error::InvalidInput(format!(
                "unknown sweep axis '{other}' (expected transmissivity_t, frequency_hz or beta)"
            ))),
        }
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The operating point held fixed while one axis is swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams {
    pub nopa: NopaParams,
    pub loop_params: LoopParams,
    pub at: AnalysisPoint,
}

impl FixedParams {
    /// Operating point with the swept axis replaced by `x`.
    fn resolve(&self, axis: SweepAxis, x: f64) -> Result<(NopaParams, LoopParams, AnalysisPoint)> {
        match axis {
            SweepAxis::TransmissivityT => Ok((self.nopa, self.loop_params.with_t(x)?, self.at)),
            SweepAxis::FrequencyHz => {
                Ok((self.nopa, self.loop_params, AnalysisPoint::from_freq_hz(x)?))
            }
            SweepAxis::Beta => Ok((self.nopa.with_beta(x)?, self.loop_params, self.at)),
        }
    }

    /// Closed-loop criterion combination at `x`, or `None` when the point
    /// sits at or beyond the feedback-modified threshold (an explicit
    /// gap, never an extrapolated value).
    fn cfc_at(&self, axis: SweepAxis, x: f64) -> Result<Option<f64>> {
        let (nopa, loop_params, at) = self.resolve(axis, x)?;
        FixedParams {
            nopa,
            loop_params,
            at,
        }
        .value_here()
    }

    /// Closed-loop criterion combination at this operating point, with the
    /// same stability gap convention as `cfc_at`.
    fn value_here(&self) -> Result<Option<f64>> {
        if self.nopa.beta >= modified_threshold(&self.nopa, &self.loop_params) {
            return Ok(None);
        }
        Ok(Some(
            cfc_variance(&self.nopa, &self.loop_params, &self.at)?.combined_squeezed,
        ))
    }

    fn bare_at(&self, axis: SweepAxis, x: f64) -> Result<f64> {
        let (p, _, at) = self.resolve(axis, x)?;
        Ok(nopa_only_variances(&p, &at)?.combined_squeezed)
    }
}

/// A uniform-grid sweep request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub from_value: f64,
    pub to_value: f64,
    pub points: u32,
    pub fixed: FixedParams,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.fixed.nopa.validate()?;
        let fail = |msg: String| Err(Error::InvalidInput(msg));
        if !(self.from_value.is_finite() && self.to_value.is_finite())
            || self.from_value >= self.to_value
        {
            return fail(format!(
                "sweep bounds must be finite with from < to, got [{}, {}]",
                self.from_value, self.to_value
            ));
        }
        if self.points < 2 {
            return fail(format!(
                "a sweep needs at least 2 points, got {}",
                self.points
            ));
        }
        match self.axis {
            SweepAxis::TransmissivityT => {
                if self.from_value < 0.0 || self.to_value > 1.0 {
                    return fail("transmissivity sweep bounds must lie in [0, 1]".into());
                }
            }
            SweepAxis::FrequencyHz => {
                if self.from_value < 0.0 {
                    return fail("frequency sweep bounds must be non-negative".into());
                }
            }
            SweepAxis::Beta => {
                // Bounds are checked against the bare validity range; samples
                // beyond the feedback-modified threshold become gaps.
                if self.from_value < 0.0 || self.to_value >= 1.0 {
                    return fail("beta sweep bounds must lie in [0, 1)".into());
                }
            }
        }
        Ok(())
    }
}

/// Location and value of a detected minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub axis_value: f64,
    pub value: f64,
}

/// Sampled curves plus detected features of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub axis_values: Vec<f64>,
    /// Closed-loop criterion combination; `None` marks a dynamically
    /// unstable sample.
    pub cfc_values: Vec<Option<f64>>,
    /// Feedback-free criterion combination.
    pub bare_values: Vec<f64>,
    /// Refined axis values where `cfc - bare` changes sign.
    pub crossovers: Vec<f64>,
    /// Refined minimum of the closed-loop curve over the stable samples.
    pub optimum: Optimum,
}

/// Evaluates a sweep on its uniform grid, detects sign changes of
/// `cfc - bare` (bisection-refined) and the closed-loop minimum
/// (golden-section-refined).
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let n = spec.points as usize;
    let step = (spec.to_value - spec.from_value) / (n as f64 - 1.0);
    let axis_values: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                spec.to_value
            } else {
                spec.from_value + step * i as f64
            }
        })
        .collect();

    let mut bare_values = Vec::with_capacity(n);
    let mut cfc_values = Vec::with_capacity(n);
    for &x in &axis_values {
        bare_values.push(spec.fixed.bare_at(spec.axis, x)?);
        cfc_values.push(spec.fixed.cfc_at(spec.axis, x)?);
    }

    // Sign changes between consecutive stable samples. The stable set is
    // an interval on every axis, so a bracket's interior is stable.
    let mut diff = |x: f64| -> Result<f64> {
        let v = spec
            .fixed
            .cfc_at(spec.axis, x)?
            .expect("crossover bracket interior must be stable");
        Ok(v - spec.fixed.bare_at(spec.axis, x)?)
    };
    let mut crossovers = Vec::new();
    for i in 0..n - 1 {
        if let (Some(a), Some(b)) = (cfc_values[i], cfc_values[i + 1]) {
            let fa = a - bare_values[i];
            let fb = b - bare_values[i + 1];
            if fa.abs() > CROSSOVER_SIGN_FLOOR && fb.abs() > CROSSOVER_SIGN_FLOOR && fa * fb < 0.0 {
                crossovers.push(refine_crossover(
                    &mut diff,
                    axis_values[i],
                    fa,
                    axis_values[i + 1],
                )?);
            }
        }
    }

    let mut objective =
        |x: f64| -> Result<f64> { Ok(spec.fixed.cfc_at(spec.axis, x)?.unwrap_or(f64::INFINITY)) };
    let optimum = refine_minimum(&axis_values, &cfc_values, &mut objective)?;

    Ok(SweepResult {
        axis: spec.axis,
        axis_values,
        cfc_values,
        bare_values,
        crossovers,
        optimum,
    })
}

/// Bisection on a bracketing pair until the bracket is tighter than the
/// axis tolerance and the midpoint residual is below the reporting
/// tolerance.
fn refine_crossover(
    f: &mut impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut flo: f64,
    mut hi: f64,
) -> Result<f64> {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if (hi - lo).abs() < AXIS_REFINE_TOL && fm.abs() < CROSSOVER_RESIDUAL_TOL {
            break;
        }
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Ok(mid)
}

/// Grid argmin (ties keep the smallest axis value) plus golden-section
/// refinement between the stable neighbors; the result never exceeds any
/// grid sample.
fn refine_minimum(
    axis_values: &[f64],
    values: &[Option<f64>],
    objective: &mut impl FnMut(f64) -> Result<f64>,
) -> Result<Optimum> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = *v {
            if best.is_none_or(|(_, bv)| v < bv - TIE_TOL) {
                best = Some((i, v));
            }
        }
    }
    let Some((bi, bv)) = best else {
        return Err(Error::EmptyResult);
    };
    let lo = if bi > 0 && values[bi - 1].is_some() {
        axis_values[bi - 1]
    } else {
        axis_values[bi]
    };
    let hi = if bi + 1 < values.len() && values[bi + 1].is_some() {
        axis_values[bi + 1]
    } else {
        axis_values[bi]
    };
    if hi <= lo {
        return Ok(Optimum {
            axis_value: axis_values[bi],
            value: bv,
        });
    }
    let (gx, gv) = golden_min(objective, lo, hi, AXIS_REFINE_TOL)?;
    if gv < bv - TIE_TOL {
        Ok(Optimum {
            axis_value: gx,
            value: gv,
        })
    } else {
        Ok(Optimum {
            axis_value: axis_values[bi],
            value: bv,
        })
    }
}

/// Golden-section minimization on `[a, b]`; returns the best point seen.
fn golden_min(
    f: &mut impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        let (cx, cf) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        if cf < best.1 {
            best = (cx, cf);
        }
    }
    Ok(best)
}

/// Which operating parameters a joint optimization may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeParams {
    T,
    Beta,
    TAndBeta,
}

impl std::str::FromStr for FreeParams {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" => Ok(FreeParams::T),
            "beta" => Ok(FreeParams::Beta),
            "t,beta" | "beta,t" => Ok(FreeParams::TAndBeta),
            other => Err(Error::InvalidInput(format!(
                "unknown free-parameter set '{other}' (expected t, beta or t,beta)"
            ))),
        }
    }
}

/// Result of a joint minimization of the criterion combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointOptimum {
    pub t: f64,
    pub beta: f64,
    pub value: f64,
}

/// Upper limit of the pump search range; the infimum as `beta -> 1` with
/// an open loop is not attained, so the search is capped at the same
/// envelope the randomized validation uses.
pub const BETA_SEARCH_MAX: f64 = 0.95;

/// Minimizes the criterion combination over the chosen free parameters:
/// grid-seeded golden-section for one free axis, coordinate descent over
/// the same machinery for two. Deterministic for identical inputs.
pub fn optimize_joint(fixed: &FixedParams, free: FreeParams) -> Result<JointOptimum> {
    fixed.nopa.validate()?;
    match free {
        FreeParams::T => {
            let opt = minimize_axis(fixed, SweepAxis::TransmissivityT, 0.0, 1.0, 501)?;
            Ok(JointOptimum {
                t: opt.axis_value,
                beta: fixed.nopa.beta,
                value: opt.value,
            })
        }
        FreeParams::Beta => {
            let opt = minimize_axis(fixed, SweepAxis::Beta, 0.0, BETA_SEARCH_MAX, 501)?;
            Ok(JointOptimum {
                t: fixed.loop_params.t,
                beta: opt.axis_value,
                value: opt.value,
            })
        }
        FreeParams::TAndBeta => {
            // Exhaustive coarse seed so the descent starts inside the
            // right basin.
            let mut best: Option<(f64, f64, f64)> = None; // (value, t, beta)
            for i in 0..=100u32 {
                let t = f64::from(i) / 100.0;
                for j in 0..=100u32 {
                    let beta = BETA_SEARCH_MAX * f64::from(j) / 100.0;
                    if let Some(v) = point_value(fixed, t, beta)? {
                        if best.is_none_or(|(bv, _, _)| v < bv - TIE_TOL) {
                            best = Some((v, t, beta));
                        }
                    }
                }
            }
            let Some((mut value, mut t, mut beta)) = best else {
                return Err(Error::EmptyResult);
            };
            for _ in 0..40 {
                let mut moved = false;
                let with_beta = FixedParams {
                    nopa: fixed.nopa.with_beta(beta)?,
                    ..*fixed
                };
                let opt_t = minimize_axis(&with_beta, SweepAxis::TransmissivityT, 0.0, 1.0, 101)?;
                if opt_t.value < value - TIE_TOL {
                    value = opt_t.value;
                    t = opt_t.axis_value;
                    moved = true;
                }
                let with_t = FixedParams {
                    loop_params: fixed.loop_params.with_t(t)?,
                    ..*fixed
                };
                let opt_b = minimize_axis(&with_t, SweepAxis::Beta, 0.0, BETA_SEARCH_MAX, 101)?;
                if opt_b.value < value - TIE_TOL {
                    value = opt_b.value;
                    beta = opt_b.axis_value;
                    moved = true;
                }
                if !moved {
                    break;
                }
            }
            Ok(JointOptimum { t, beta, value })
        }
    }
}

fn point_value(fixed: &FixedParams, t: f64, beta: f64) -> Result<Option<f64>> {
    FixedParams {
        nopa: fixed.nopa.with_beta(beta)?,
        loop_params: fixed.loop_params.with_t(t)?,
        at: fixed.at,
    }
    .value_here()
}

/// Grid scan plus golden-section refinement along one axis.
fn minimize_axis(
    fixed: &FixedParams,
    axis: SweepAxis,
    lo: f64,
    hi: f64,
    points: u32,
) -> Result<Optimum> {
    let n = points as usize;
    let step = (hi - lo) / (n as f64 - 1.0);
    let axis_values: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect();
    let mut values = Vec::with_capacity(n);
    for &x in &axis_values {
        values.push(fixed.cfc_at(axis, x)?);
    }
    let mut objective =
        |x: f64| -> Result<f64> { Ok(fixed.cfc_at(axis, x)?.unwrap_or(f64::INFINITY)) };
    refine_minimum(&axis_values, &values, &mut objective)
}
