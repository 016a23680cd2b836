//! Amplifier cavity model: frequency-domain input-output transfer
//! coefficients of the N-mode parametric amplifier and its stand-alone
//! (feedback-free) output variances.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::report::VarianceReport;

/// Guard magnitude for the amplitude-sum pole denominator; below this the
/// pump is treated as at the oscillation threshold.
pub const THRESHOLD_GUARD: f64 = 1e-12;

/// Cavity and pump configuration of the amplifier.
///
/// `gamma1` (input-output coupling) and `gamma2` (intracavity loss) are
/// per-round-trip fractions, `tau` is the round-trip time in seconds,
/// `n_modes` the number of entangled longitudinal modes and `beta` the
/// pump parameter, normalized so `beta = 1` is the stand-alone
/// oscillation threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NopaParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub tau: f64,
    pub n_modes: u32,
    pub beta: f64,
}

impl NopaParams {
    pub fn new(gamma1: f64, gamma2: f64, tau: f64, n_modes: u32, beta: f64) -> Result<Self> {
        let p = NopaParams {
            gamma1,
            gamma2,
            tau,
            n_modes,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks every field against its physical range.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidInput(msg));
        if !(self.gamma1 > 0.0 && self.gamma1 <= 1.0) {
            return fail(format!("gamma1 must lie in (0, 1], got {}", self.gamma1));
        }
        if !(self.gamma2 >= 0.0 && self.gamma2 < 1.0) {
            return fail(format!("gamma2 must lie in [0, 1), got {}", self.gamma2));
        }
        if self.gamma1 + self.gamma2 >= 1.0 {
            return fail(format!(
                "gamma1 + gamma2 must stay below 1, got {}",
                self.gamma1 + self.gamma2
            ));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return fail(format!(
                "tau must be a positive time in seconds, got {}",
                self.tau
            ));
        }
        if self.n_modes < 2 {
            return fail(format!("n_modes must be at least 2, got {}", self.n_modes));
        }
        if !(self.beta >= 0.0 && self.beta < 1.0) {
            return fail(format!("beta must lie in [0, 1), got {}", self.beta));
        }
        Ok(())
    }

    /// Same cavity, different pump strength.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        NopaParams::new(self.gamma1, self.gamma2, self.tau, self.n_modes, beta)
    }
}

/// Sideband analysis frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisPoint {
    /// Analysis frequency Omega in hertz (non-negative).
    pub freq_hz: f64,
    /// Angular frequency `omega = 2*pi*freq_hz` in rad/s.
    pub omega: f64,
}

impl AnalysisPoint {
    pub fn from_freq_hz(freq_hz: f64) -> Result<Self> {
        if !(freq_hz >= 0.0 && freq_hz.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "analysis frequency must be finite and non-negative, got {freq_hz}"
            )));
        }
        Ok(AnalysisPoint {
            freq_hz,
            omega: 2.0 * std::f64::consts::PI * freq_hz,
        })
    }
}

/// The eight complex transfer coefficients at one analysis frequency.
///
/// Each collective combination responds as
/// `out = m * in + n * loss_vacuum`; `(m1, n1)` drives the amplitude
/// difference, `(m2, n2)` the phase sum (both squeezed for `beta > 0`),
/// `(m3, n3)` the amplitude sum and `(m4, n4)` the phase difference
/// (both anti-squeezed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSet {
    pub m1: Complex64,
    pub n1: Complex64,
    pub m2: Complex64,
    pub n2: Complex64,
    pub m3: Complex64,
    pub n3: Complex64,
    pub m4: Complex64,
    pub n4: Complex64,
}

impl TransferSet {
    /// Noise power `|m|^2 + |n|^2` of each combination, in the order
    /// (amplitude difference, phase sum, amplitude sum, phase difference).
    pub fn combination_powers(&self) -> [f64; 4] {
        [
            self.m1.norm_sqr() + self.n1.norm_sqr(),
            self.m2.norm_sqr() + self.n2.norm_sqr(),
            self.m3.norm_sqr() + self.n3.norm_sqr(),
            self.m4.norm_sqr() + self.n4.norm_sqr(),
        ]
    }
}

/// Nonlinear coupling per round trip: `k = beta*(gamma1+gamma2)/(N-1)`.
///
/// The normalization makes `beta = 1` coincide with the divergence of
/// the amplitude-sum response at zero frequency, i.e. the stand-alone
/// oscillation threshold.
pub fn coupling_from_beta(params: &NopaParams) -> f64 {
    params.beta * (params.gamma1 + params.gamma2) / (f64::from(params.n_modes) - 1.0)
}

/// Closed-form transfer coefficients at one analysis frequency.
///
/// With `g = gamma1 + gamma2`, `d = gamma1 - gamma2`, `K = (N-1)k` and
/// `iwt = i*omega*tau`:
///
/// ```text
/// m1 = (-k + d - iwt) / ( k + g + iwt)    n1 = 2*sqrt(gamma1*gamma2) / ( k + g + iwt)
/// m2 = (-K + d - iwt) / ( K + g + iwt)    n2 = 2*sqrt(gamma1*gamma2) / ( K + g + iwt)
/// m3 = ( K + d - iwt) / (-K + g + iwt)    n3 = 2*sqrt(gamma1*gamma2) / (-K + g + iwt)
/// m4 = ( k + d - iwt) / (-k + g + iwt)    n4 = 2*sqrt(gamma1*gamma2) / (-k + g + iwt)
/// ```
pub fn transfer_coefficients(params: &NopaParams, at: &AnalysisPoint) -> Result<TransferSet> {
    transfer_at_omega_tau(params, at.omega * params.tau)
}

/// Same as [`transfer_coefficients`] but taking the signed dimensionless
/// product `omega*tau` directly; negative values probe the lower sideband.
fn transfer_at_omega_tau(params: &NopaParams, omega_tau: f64) -> Result<TransferSet> {
    let g = params.gamma1 + params.gamma2;
    let d = params.gamma1 - params.gamma2;
    let k = coupling_from_beta(params);
    let kn = (f64::from(params.n_modes) - 1.0) * k;
    let iwt = Complex64::new(0.0, omega_tau);
    let n_amp = 2.0 * (params.gamma1 * params.gamma2).sqrt();

    // The only denominator that can vanish below beta = 1 is the
    // amplitude-sum pole -(N-1)k + g + iwt.
    let pole = (Complex64::new(-kn + g, 0.0) + iwt).norm();
    if pole < THRESHOLD_GUARD {
        return Err(Error::ThresholdReached(pole));
    }

    let m = |kk: f64| (Complex64::new(-kk + d, 0.0) - iwt) / (Complex64::new(kk + g, 0.0) + iwt);
    let n = |kk: f64| Complex64::new(n_amp, 0.0) / (Complex64::new(kk + g, 0.0) + iwt);

    Ok(TransferSet {
        m1: m(k),
        n1: n(k),
        m2: m(kn),
        n2: n(kn),
        m3: m(-kn),
        n3: n(-kn),
        m4: m(-k),
        n4: n(-k),
    })
}

/// Stand-alone output variances with every input at vacuum level:
/// `V(Xi - Xj) = 2(|m1|^2 + |n1|^2)`, `V(sum Y) = N(|m2|^2 + |n2|^2)`,
/// `V(sum X) = N(|m3|^2 + |n3|^2)`, `V(Yi - Yj) = 2(|m4|^2 + |n4|^2)`.
pub fn nopa_only_variances(params: &NopaParams, at: &AnalysisPoint) -> Result<VarianceReport> {
    let ts = transfer_coefficients(params, at)?;
    let [p1, p2, p3, p4] = ts.combination_powers();
    Ok(VarianceReport::from_combination_powers(
        params.n_modes,
        p1,
        p2,
        p3,
        p4,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_cavity(beta: f64) -> NopaParams {
        NopaParams::new(0.1, 0.003, 6.7e-10, 4, beta).unwrap()
    }

    fn megahertz() -> AnalysisPoint {
        AnalysisPoint::from_freq_hz(1e6).unwrap()
    }

    #[test]
    fn validation_rejects_out_of_range_fields() {
        assert!(NopaParams::new(0.0, 0.0, 1e-9, 4, 0.1).is_err()); // gamma1 = 0
        assert!(NopaParams::new(0.5, 0.5, 1e-9, 4, 0.1).is_err()); // sum = 1
        assert!(NopaParams::new(0.1, -0.1, 1e-9, 4, 0.1).is_err());
        assert!(NopaParams::new(0.1, 0.0, 0.0, 4, 0.1).is_err()); // tau = 0
        assert!(NopaParams::new(0.1, 0.0, 1e-9, 1, 0.1).is_err()); // N < 2
        assert!(NopaParams::new(0.1, 0.0, 1e-9, 4, 1.0).is_err()); // beta = 1
        assert!(NopaParams::new(0.1, 0.0, 1e-9, 4, f64::NAN).is_err());
        assert!(AnalysisPoint::from_freq_hz(-1.0).is_err());
        assert!(NopaParams::new(0.1, 0.003, 6.7e-10, 4, 0.15).is_ok());
    }

    #[test]
    fn coupling_normalization() {
        assert_eq!(coupling_from_beta(&reference_cavity(0.0)), 0.0);
        let k = coupling_from_beta(&reference_cavity(0.15));
        assert!((k - 0.005150).abs() < 1e-15, "k = {k}");
        // At beta = 1 the amplitude-sum pole sits exactly at zero frequency:
        // -(N-1)k + gamma1 + gamma2 = 0.
        let p = NopaParams {
            beta: 1.0,
            ..reference_cavity(0.0)
        };
        let kn = 3.0 * coupling_from_beta(&p);
        assert!((kn - 0.103).abs() < 1e-15);
    }

    #[test]
    fn empty_lossless_cavity_is_identity_at_dc() {
        let p = NopaParams::new(0.1, 0.0, 6.7e-10, 4, 0.0).unwrap();
        let ts = transfer_coefficients(&p, &AnalysisPoint::from_freq_hz(0.0).unwrap()).unwrap();
        for m in [ts.m1, ts.m2, ts.m3, ts.m4] {
            assert_eq!(m, Complex64::new(1.0, 0.0));
        }
        for n in [ts.n1, ts.n2, ts.n3, ts.n4] {
            assert_eq!(n, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn passive_cavity_coefficients_at_dc() {
        let p = reference_cavity(0.0);
        let ts = transfer_coefficients(&p, &AnalysisPoint::from_freq_hz(0.0).unwrap()).unwrap();
        assert!((ts.m1.re - 0.097 / 0.103).abs() < 1e-15);
        assert!((ts.n1.re - 2.0 * 0.0003_f64.sqrt() / 0.103).abs() < 1e-15);
        // |m|^2 + |n|^2 = 1: the passive cavity only redistributes vacuum.
        for pow in ts.combination_powers() {
            assert!((pow - 1.0).abs() < 1e-14, "power {pow}");
        }
    }

    #[test]
    fn threshold_guard_fires_next_to_the_pole() {
        let p = NopaParams::new(0.1, 0.003, 6.7e-10, 4, 1.0 - 1e-13).unwrap();
        match transfer_coefficients(&p, &AnalysisPoint::from_freq_hz(0.0).unwrap()) {
            Err(Error::ThresholdReached(mag)) => assert!(mag < THRESHOLD_GUARD),
            other => panic!("expected ThresholdReached, got {other:?}"),
        }
        // Away from zero frequency the pole has an imaginary offset and the
        // coefficients stay finite.
        assert!(transfer_coefficients(&p, &megahertz()).is_ok());
    }

    #[test]
    fn two_mode_cavity_collapses_the_sum_combinations() {
        let p = NopaParams::new(0.1, 0.003, 6.7e-10, 2, 0.2).unwrap();
        let ts = transfer_coefficients(&p, &megahertz()).unwrap();
        assert_eq!(ts.m1, ts.m2);
        assert_eq!(ts.n1, ts.n2);
        assert_eq!(ts.m3, ts.m4);
        assert_eq!(ts.n3, ts.n4);
    }

    #[test]
    fn vacuum_pump_gives_vacuum_variances() {
        let r = nopa_only_variances(&reference_cavity(0.0), &megahertz()).unwrap();
        assert!((r.v_xdiff - 2.0).abs() < 1e-12);
        assert!((r.v_ysum - 4.0).abs() < 1e-12);
        assert!((r.v_xsum - 4.0).abs() < 1e-12);
        assert!((r.v_ydiff - 2.0).abs() < 1e-12);
        assert!((r.combined_squeezed - 6.0).abs() < 1e-12);
        assert_eq!(r.vacuum_reference, 6.0);
        assert_eq!(r.criterion_bound, 4.0);
    }

    #[test]
    fn reference_point_variances() {
        let r = nopa_only_variances(&reference_cavity(0.15), &megahertz()).unwrap();
        assert!((r.v_xdiff - 1.648_288_438_933_388).abs() < 1e-12);
        assert!((r.v_ysum - 2.2403344842631787).abs() < 1e-12);
        assert!((r.v_xsum - 7.2176086029266875).abs() < 1e-11);
        assert!((r.v_ydiff - 2.4295091840599743).abs() < 1e-12);
        assert!((r.combined_squeezed - 3.888622923196567).abs() < 1e-12);
        assert!(r.combined_squeezed < r.vacuum_reference);
        // Conjugate-pair uncertainty products, normalized by the vacuum
        // values 2*2 and N*N.
        let pd = r.v_xdiff * r.v_ydiff / 4.0;
        let ps = r.v_ysum * r.v_xsum / 16.0;
        assert!((pd - 1.001_132_975_092_136).abs() < 1e-12);
        assert!((ps - 1.0106160904407027).abs() < 1e-12);
        assert!(pd >= 1.0 && ps >= 1.0);
    }

    #[test]
    fn variances_are_even_in_frequency() {
        let p = reference_cavity(0.3);
        for wt in [1e-4, 4.2e-3, 0.05] {
            let up = transfer_at_omega_tau(&p, wt).unwrap();
            let dn = transfer_at_omega_tau(&p, -wt).unwrap();
            for (a, b) in up.combination_powers().iter().zip(dn.combination_powers()) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn squeezing_deepens_monotonically_with_pump_at_dc() {
        let at = AnalysisPoint::from_freq_hz(0.0).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..40 {
            let beta = 0.95 * f64::from(i) / 39.0;
            let r = nopa_only_variances(&reference_cavity(beta), &at).unwrap();
            assert!(
                r.v_xdiff < last,
                "V(Xi-Xj) must strictly decrease with beta, got {} after {last}",
                r.v_xdiff
            );
            last = r.v_xdiff;
        }
    }
}
