//! Coherent feedback loop around the amplifier: the control and loss
//! beam splitters, the closed-loop output variances, and the
//! feedback-modified oscillation threshold.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::nopa::{transfer_coefficients, AnalysisPoint, NopaParams};
use crate::report::VarianceReport;

/// Guard magnitude for the loop self-consistency denominator; at or
/// below this the closed loop is treated as unstable.
pub const LOOP_GUARD: f64 = 1e-9;

/// Beam-splitter settings of the feedback loop.
///
/// The control splitter transmits `t` and reflects `r = 1 - t`; the loss
/// splitter passes `s = 1 - l` around the loop and admits vacuum with
/// weight `l`. Both 2x2 splitter relations have orthonormal rows by
/// construction (`t + r = 1` exactly), so the passive network is unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopParams {
    pub t: f64,
    pub l: f64,
    pub r: f64,
    pub s: f64,
}

impl LoopParams {
    pub fn new(t: f64, l: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidInput(format!(
                "controller transmissivity t must lie in [0, 1], got {t}"
            )));
        }
        if !(0.0..1.0).contains(&l) {
            return Err(Error::InvalidInput(format!(
                "loop loss l must lie in [0, 1), got {l}"
            )));
        }
        Ok(LoopParams {
            t,
            l,
            r: 1.0 - t,
            s: 1.0 - l,
        })
    }

    /// Same loss, different controller transmissivity.
    pub fn with_t(&self, t: f64) -> Result<Self> {
        LoopParams::new(t, self.l)
    }
}

/// Which collective combination a set of loop amplitudes belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombinationTag {
    AmplitudeDifference,
    PhaseSum,
    AmplitudeSum,
    PhaseDifference,
}

/// Closed-loop transfer amplitudes of one combination: the final output
/// expressed over the three independent vacuum-level inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopAmplitudes {
    /// Multiplies the injected field entering through the control splitter.
    pub coeff_c: Complex64,
    /// Multiplies the intracavity-loss vacuum.
    pub coeff_b: Complex64,
    /// Multiplies the loop-loss vacuum.
    pub coeff_e: Complex64,
    pub combination_tag: CombinationTag,
}

impl LoopAmplitudes {
    /// Total noise power for unit-variance inputs.
    pub fn power(&self) -> f64 {
        self.coeff_c.norm_sqr() + self.coeff_b.norm_sqr() + self.coeff_e.norm_sqr()
    }
}

/// Solves the loop self-consistency for one combination with cavity
/// response `(m, n)`.
///
/// The loop equations
/// `a_out = m*a_in + n*b_in`,
/// `a_in  = sqrt(t)*c_in + sqrt(r)*(sqrt(s)*a_out + sqrt(l)*e_in)`,
/// `c_out = sqrt(t)*(sqrt(s)*a_out + sqrt(l)*e_in) - sqrt(r)*c_in`
/// eliminate to
///
/// ```text
/// coeff_c = m*t*sqrt(s) / (1 - m*sqrt(s*r)) - sqrt(r)
/// coeff_b = sqrt(t*s)*n / (1 - m*sqrt(s*r))
/// coeff_e = sqrt(t*l) + m*sqrt(t*s*r*l) / (1 - m*sqrt(s*r))
/// ```
pub fn closed_loop_amplitudes(
    m: Complex64,
    n: Complex64,
    lp: &LoopParams,
    tag: CombinationTag,
) -> Result<LoopAmplitudes> {
    let sr_root = (lp.s * lp.r).sqrt();
    let den = Complex64::new(1.0, 0.0) - m * sr_root;
    if den.norm() <= LOOP_GUARD {
        return Err(Error::LoopUnstable(den.norm()));
    }
    let coeff_c = m * lp.t * lp.s.sqrt() / den - lp.r.sqrt();
    let coeff_b = (lp.t * lp.s).sqrt() * n / den;
    let coeff_e = (lp.t * lp.l).sqrt() + m * (lp.t * lp.s * lp.r * lp.l).sqrt() / den;
    Ok(LoopAmplitudes {
        coeff_c,
        coeff_b,
        coeff_e,
        combination_tag: tag,
    })
}

/// Closed-loop correlation variances of all four combinations, with the
/// injected field carrying vacuum-level fluctuations.
pub fn cfc_variance(
    params: &NopaParams,
    lp: &LoopParams,
    at: &AnalysisPoint,
) -> Result<VarianceReport> {
    let ts = transfer_coefficients(params, at)?;
    let combos = [
        (ts.m1, ts.n1, CombinationTag::AmplitudeDifference),
        (ts.m2, ts.n2, CombinationTag::PhaseSum),
        (ts.m3, ts.n3, CombinationTag::AmplitudeSum),
        (ts.m4, ts.n4, CombinationTag::PhaseDifference),
    ];
    let mut powers = [0.0; 4];
    for (slot, (m, n, tag)) in powers.iter_mut().zip(combos) {
        *slot = closed_loop_amplitudes(m, n, lp, tag)?.power();
    }
    Ok(VarianceReport::from_combination_powers(
        params.n_modes,
        powers[0],
        powers[1],
        powers[2],
        powers[3],
    ))
}

/// Smallest pump strength at which the zero-frequency loop denominator
/// `1 - m_xsum(0)*sqrt(s*r)` vanishes, found by bisection to 1e-10.
///
/// Returns 1 when the feedback path is broken (`t = 1` or `l = 1`):
/// the loop then never destabilizes before the bare threshold. The
/// configured pump strength in `params` is ignored. Under the coupling
/// normalization `(N-1)k = beta*(gamma1+gamma2)` the result is
/// independent of the mode count.
pub fn modified_threshold(params: &NopaParams, lp: &LoopParams) -> f64 {
    let sr = lp.s * lp.r;
    if sr <= 0.0 {
        return 1.0;
    }
    let x = sr.sqrt();
    let g = params.gamma1 + params.gamma2;
    let d = params.gamma1 - params.gamma2;
    // m_xsum at zero frequency is (beta*g + d) / (g*(1 - beta)), strictly
    // increasing in beta, so f is strictly decreasing with a unique root.
    let f = |beta: f64| 1.0 - x * (beta * g + d) / (g * (1.0 - beta));
    if f(0.0) <= 0.0 {
        // Fully lossless cavity closed by a fully lossless loop: at
        // threshold already with the pump off.
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0 - 1e-12);
    if f(hi) > 0.0 {
        return 1.0;
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nopa::nopa_only_variances;

    fn reference_cavity(beta: f64) -> NopaParams {
        NopaParams::new(0.1, 0.003, 6.7e-10, 4, beta).unwrap()
    }

    fn megahertz() -> AnalysisPoint {
        AnalysisPoint::from_freq_hz(1e6).unwrap()
    }

    #[test]
    fn loop_params_validation_and_derived_fields() {
        let lp = LoopParams::new(0.8, 0.01).unwrap();
        assert_eq!(lp.r, 1.0 - 0.8);
        assert_eq!(lp.s, 0.99);
        assert!(LoopParams::new(-0.1, 0.0).is_err());
        assert!(LoopParams::new(1.1, 0.0).is_err());
        assert!(LoopParams::new(0.5, 1.0).is_err());
        // Orthonormal splitter rows: t + r = 1 exactly in floating point.
        assert_eq!(lp.t + lp.r, 1.0);
    }

    #[test]
    fn total_reflection_returns_the_injected_field() {
        let lp = LoopParams::new(0.0, 0.01).unwrap();
        let m = Complex64::new(0.7, 0.2);
        let n = Complex64::new(0.3, 0.0);
        let a = closed_loop_amplitudes(m, n, &lp, CombinationTag::AmplitudeDifference).unwrap();
        assert_eq!(a.coeff_c, Complex64::new(-1.0, 0.0));
        assert_eq!(a.coeff_b, Complex64::new(0.0, 0.0));
        assert_eq!(a.coeff_e, Complex64::new(0.0, 0.0));
        assert_eq!(a.power(), 1.0);
    }

    #[test]
    fn open_loop_reduces_to_the_bare_cavity() {
        let lp = LoopParams::new(1.0, 0.0).unwrap();
        let m = Complex64::new(0.7, 0.2);
        let n = Complex64::new(0.3, -0.1);
        let a = closed_loop_amplitudes(m, n, &lp, CombinationTag::PhaseSum).unwrap();
        assert_eq!(a.coeff_c, m);
        assert_eq!(a.coeff_b, n);
        assert_eq!(a.coeff_e, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn passive_all_pass_preserves_vacuum_over_the_loop_grid() {
        let m = Complex64::new(1.0, 0.0);
        let n = Complex64::new(0.0, 0.0);
        for ti in 0..=10 {
            for li in 0..10 {
                let lp = LoopParams::new(f64::from(ti) / 10.0, f64::from(li) / 10.0).unwrap();
                if lp.t == 0.0 && lp.l == 0.0 {
                    continue; // fully closed lossless loop: denominator 0
                }
                let a = closed_loop_amplitudes(m, n, &lp, CombinationTag::AmplitudeSum).unwrap();
                assert!((a.power() - 1.0).abs() < 1e-12, "t={} l={}", lp.t, lp.l);
            }
        }
    }

    #[test]
    fn unstable_denominator_is_rejected() {
        // m = 1 with t = 0, l = 0 puts 1 - m*sqrt(s*r) exactly at zero.
        let lp = LoopParams::new(0.0, 0.0).unwrap();
        let m = Complex64::new(1.0, 0.0);
        match closed_loop_amplitudes(m, Complex64::new(0.0, 0.0), &lp, CombinationTag::PhaseSum) {
            Err(Error::LoopUnstable(mag)) => assert!(mag <= LOOP_GUARD),
            other => panic!("expected LoopUnstable, got {other:?}"),
        }
    }

    #[test]
    fn closed_loop_variances_at_the_reference_points() {
        let p = reference_cavity(0.15);
        let at = megahertz();
        let full_reflection = cfc_variance(&p, &LoopParams::new(0.0, 0.01).unwrap(), &at).unwrap();
        assert!((full_reflection.combined_squeezed - 6.0).abs() < 1e-12);

        let working = cfc_variance(&p, &LoopParams::new(0.8, 0.01).unwrap(), &at).unwrap();
        assert!((working.combined_squeezed - 2.400_595_039_211_539).abs() < 1e-12);
        assert!((working.v_xdiff - 1.2849715171955658).abs() < 1e-12);
        assert!((working.v_ysum - 1.1156235220159734).abs() < 1e-12);
        assert!((working.v_xsum - 17.556267157905495).abs() < 1e-10);
        assert!((working.v_ydiff - 3.1727616753584336).abs() < 1e-12);

        let low_t = cfc_variance(&p, &LoopParams::new(0.3, 0.01).unwrap(), &at).unwrap();
        assert!((low_t.combined_squeezed - 2.0431236004674456).abs() < 1e-12);
    }

    #[test]
    fn open_loop_boundary_identities() {
        let p = reference_cavity(0.15);
        let at = megahertz();
        let bare = nopa_only_variances(&p, &at).unwrap();

        // t = 1, l = 0: exactly the bare amplifier.
        let exact = cfc_variance(&p, &LoopParams::new(1.0, 0.0).unwrap(), &at).unwrap();
        assert_eq!(exact.combined_squeezed, bare.combined_squeezed);
        assert_eq!(exact.v_xsum, bare.v_xsum);

        // t = 1, l = 0.01: the residual loop loss leaves a sub-2% gap.
        let lossy = cfc_variance(&p, &LoopParams::new(1.0, 0.01).unwrap(), &at).unwrap();
        assert!((lossy.combined_squeezed - 3.909736693964601).abs() < 1e-12);
        let gap = (lossy.combined_squeezed - bare.combined_squeezed) / bare.combined_squeezed;
        assert!(gap.abs() < 0.02, "gap {gap}");
    }

    #[test]
    fn passive_loop_preserves_vacuum_variances() {
        let p = reference_cavity(0.0);
        for (t, l, freq) in [(0.0, 0.01, 1e6), (0.37, 0.2, 0.0), (0.9, 0.0, 2e7)] {
            let r = cfc_variance(
                &p,
                &LoopParams::new(t, l).unwrap(),
                &AnalysisPoint::from_freq_hz(freq).unwrap(),
            )
            .unwrap();
            assert!(
                (r.combined_squeezed - 6.0).abs() < 1e-12,
                "t={t} l={l} f={freq}"
            );
            assert!((r.combined_antisqueezed - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn modified_threshold_reference_values() {
        let p = reference_cavity(0.15);
        // Closed form of the root: beta = (g - d*sqrt(sr)) / (g*(1 + sqrt(sr))).
        let closed = |t: f64, l: f64| {
            let x = ((1.0 - l) * (1.0 - t)).sqrt();
            (0.103 - 0.097 * x) / (0.103 * (1.0 + x))
        };
        for (t, l) in [
            (0.0, 0.01),
            (0.3, 0.01),
            (0.5, 0.01),
            (0.8, 0.01),
            (0.9, 0.2),
        ] {
            let lp = LoopParams::new(t, l).unwrap();
            let th = modified_threshold(&p, &lp);
            assert!((th - closed(t, l)).abs() < 1e-9, "t={t} l={l}: {th}");
        }
        let th = modified_threshold(&p, &LoopParams::new(0.8, 0.01).unwrap());
        assert!((th - 0.40204849714127366).abs() < 1e-9);
        assert!(
            th > 0.15 && th < 1.0,
            "reference operating point must be stable"
        );
        let th0 = modified_threshold(&p, &LoopParams::new(0.0, 0.01).unwrap());
        assert!((th0 - 0.031565610365057374).abs() < 1e-9);
    }

    #[test]
    fn broken_feedback_path_keeps_the_bare_threshold() {
        let p = reference_cavity(0.5);
        assert_eq!(
            modified_threshold(&p, &LoopParams::new(1.0, 0.3).unwrap()),
            1.0
        );
        // l = 1 is rejected by validation, but s = 0 is reachable in the
        // limit sense through the direct struct; exercise sr = 0 via t = 1.
        assert_eq!(
            modified_threshold(&p, &LoopParams::new(1.0, 0.0).unwrap()),
            1.0
        );
    }
}
