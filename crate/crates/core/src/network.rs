//! Loop-equation oracle: assembles the full beam-splitter scattering
//! system per combination and solves it generically, bypassing the
//! hand-derived closed-loop amplitudes of [`crate::feedback`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::feedback::LoopParams;
use crate::langevin::langevin_oracle;
use crate::nopa::{AnalysisPoint, NopaParams};
use crate::report::VarianceReport;

/// Closed-loop variances from a direct solve of the scattering network.
///
/// Per combination the unknown fields are `[a_in, a_out, c_out, d_in,
/// d_out]` over the independent inputs `[c_in, b_in, e_in]`, related by
///
/// ```text
/// d_out = sqrt(t)*c_in + sqrt(r)*d_in      (control splitter, loop port)
/// c_out = sqrt(t)*d_in - sqrt(r)*c_in      (control splitter, output port)
/// a_in  = d_out                            (loop feeds the cavity)
/// d_in  = sqrt(s)*a_out + sqrt(l)*e_in     (loss splitter)
/// a_out = m*a_in + n*b_in                  (cavity, from the drift oracle)
/// ```
///
/// The 5x5 complex system is LU-solved for all three input columns at
/// once; the `c_out` row yields the output amplitudes whose weighted
/// moduli give the variances. The cavity response comes from
/// [`langevin_oracle`], so no closed-form expression from either module
/// under test enters this path.
pub fn network_oracle(
    params: &NopaParams,
    lp: &LoopParams,
    at: &AnalysisPoint,
) -> Result<VarianceReport> {
    let ts = langevin_oracle(params, at)?;
    let (st, sr, ss, sl) = (lp.t.sqrt(), lp.r.sqrt(), lp.s.sqrt(), lp.l.sqrt());
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    let combos = [
        (ts.m1, ts.n1),
        (ts.m2, ts.n2),
        (ts.m3, ts.n3),
        (ts.m4, ts.n4),
    ];
    let mut powers = [0.0; 4];
    for (slot, (m, n)) in powers.iter_mut().zip(combos) {
        // Unknowns x = [a_in, a_out, c_out, d_in, d_out]; K x = F u with
        // inputs u = [c_in, b_in, e_in].
        let mut kmat = DMatrix::<Complex64>::from_element(5, 5, zero);
        let mut fmat = DMatrix::<Complex64>::from_element(5, 3, zero);
        // d_out - sqrt(r)*d_in = sqrt(t)*c_in
        kmat[(0, 4)] = one;
        kmat[(0, 3)] = Complex64::new(-sr, 0.0);
        fmat[(0, 0)] = Complex64::new(st, 0.0);
        // c_out - sqrt(t)*d_in = -sqrt(r)*c_in
        kmat[(1, 2)] = one;
        kmat[(1, 3)] = Complex64::new(-st, 0.0);
        fmat[(1, 0)] = Complex64::new(-sr, 0.0);
        // a_in - d_out = 0
        kmat[(2, 0)] = one;
        kmat[(2, 4)] = -one;
        // d_in - sqrt(s)*a_out = sqrt(l)*e_in
        kmat[(3, 3)] = one;
        kmat[(3, 1)] = Complex64::new(-ss, 0.0);
        fmat[(3, 2)] = Complex64::new(sl, 0.0);
        // a_out - m*a_in = n*b_in
        kmat[(4, 1)] = one;
        kmat[(4, 0)] = -m;
        fmat[(4, 1)] = n;

        let solved = kmat.lu().solve(&fmat).ok_or(Error::SingularSystem)?;
        // Row 2 holds c_out's coefficients over [c_in, b_in, e_in].
        *slot = (0..3).map(|j| solved[(2, j)].norm_sqr()).sum();
    }
    Ok(VarianceReport::from_combination_powers(
        params.n_modes,
        powers[0],
        powers[1],
        powers[2],
        powers[3],
    ))
}
