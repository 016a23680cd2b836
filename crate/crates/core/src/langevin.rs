//! Independent re-derivation of the transfer coefficients from the
//! N-mode quadrature drift system, solved as a dense complex linear
//! system per combination. Serves as the oracle for the closed forms in
//! [`crate::nopa`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::nopa::{coupling_from_beta, AnalysisPoint, NopaParams, TransferSet};

/// Recovers the full [`TransferSet`] from the drift dynamics.
///
/// The intracavity quadratures obey `tau * dq/dt = A q + drives` with
/// all-to-all coupling: `A = +k(J - I) - g I` for the amplitude
/// quadratures and `A = -k(J - I) - g I` for the phase quadratures
/// (`J` the all-ones matrix, `g = gamma1 + gamma2`). Drives enter with
/// `sqrt(2*gamma1)` (input port) and `sqrt(2*gamma2)` (loss port), and
/// the emitted field is `out = sqrt(2*gamma1) * q - in`.
///
/// For each quadrature system the frequency-domain equations
/// `(i*omega*tau*I - A) x = pattern` are solved by LU decomposition for
/// the two collective input patterns (pairwise difference and full sum),
/// and the output is projected back onto the same pattern. No closed-form
/// coefficient expression is used anywhere.
pub fn langevin_oracle(params: &NopaParams, at: &AnalysisPoint) -> Result<TransferSet> {
    let n = params.n_modes as usize;
    let g = params.gamma1 + params.gamma2;
    let k = coupling_from_beta(params);
    let iwt = Complex64::new(0.0, at.omega * params.tau);
    let root2g1 = (2.0 * params.gamma1).sqrt();
    let root2g2 = (2.0 * params.gamma2).sqrt();

    // (i*omega*tau*I - A) for A = sign*k*(J - I) - g*I:
    // diagonal i*omega*tau + g, off-diagonal -sign*k.
    let system = |sign: f64| {
        DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            if i == j {
                iwt + Complex64::new(g, 0.0)
            } else {
                Complex64::new(-sign * k, 0.0)
            }
        })
    };

    // Normalized collective input patterns: both are eigenvectors of the
    // all-to-all coupling, so each drives a pure single-combination
    // response.
    let mut diff = DVector::<Complex64>::zeros(n);
    diff[0] = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    diff[1] = -diff[0];
    let sum = DVector::<Complex64>::from_element(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0));

    // Projected response <w, (iwt*I - A)^{-1} w>; with input pattern w the
    // emitted coefficients are m = 2*gamma1*resp - 1 (reflected input
    // included) and n = 2*sqrt(gamma1*gamma2)*resp (loss port).
    let respond = |sign: f64, w: &DVector<Complex64>| -> Result<(Complex64, Complex64)> {
        let lu = system(sign).lu();
        let x = lu.solve(w).ok_or(Error::SingularSystem)?;
        let resp: Complex64 = w.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        let m = root2g1 * root2g1 * resp - 1.0;
        let nn = root2g1 * root2g2 * resp;
        Ok((m, nn))
    };

    let (m1, n1) = respond(1.0, &diff)?;
    let (m3, n3) = respond(1.0, &sum)?;
    let (m2, n2) = respond(-1.0, &sum)?;
    let (m4, n4) = respond(-1.0, &diff)?;
    Ok(TransferSet {
        m1,
        n1,
        m2,
        n2,
        m3,
        n3,
        m4,
        n4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nopa::transfer_coefficients;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / (a.norm().max(b.norm()) + 1e-300)
    }

    fn assert_agrees(p: &NopaParams, at: &AnalysisPoint) {
        let closed = transfer_coefficients(p, at).unwrap();
        let oracle = langevin_oracle(p, at).unwrap();
        let pairs = [
            (closed.m1, oracle.m1),
            (closed.n1, oracle.n1),
            (closed.m2, oracle.m2),
            (closed.n2, oracle.n2),
            (closed.m3, oracle.m3),
            (closed.n3, oracle.n3),
            (closed.m4, oracle.m4),
            (closed.n4, oracle.n4),
        ];
        for (i, (c, o)) in pairs.iter().enumerate() {
            assert!(
                rel(*c, *o) < 1e-12,
                "coefficient {i}: closed {c}, oracle {o}"
            );
        }
    }

    #[test]
    fn matches_closed_forms_at_the_reference_point() {
        let p = NopaParams::new(0.1, 0.003, 6.7e-10, 4, 0.15).unwrap();
        assert_agrees(&p, &AnalysisPoint::from_freq_hz(1e6).unwrap());
    }

    #[test]
    fn matches_closed_forms_across_mode_counts_and_frequencies() {
        for n_modes in [2, 3, 4, 5, 6] {
            for freq in [0.0, 5e5, 1e6, 2e7] {
                let p = NopaParams::new(0.12, 0.01, 8.0e-10, n_modes, 0.4).unwrap();
                assert_agrees(&p, &AnalysisPoint::from_freq_hz(freq).unwrap());
            }
        }
    }

    #[test]
    fn passive_cavity_is_all_pass_here_too() {
        let p = NopaParams::new(0.1, 0.0, 6.7e-10, 4, 0.0).unwrap();
        let ts = langevin_oracle(&p, &AnalysisPoint::from_freq_hz(0.0).unwrap()).unwrap();
        assert!((ts.m1 - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(ts.n1.norm() < 1e-14);
    }
}
