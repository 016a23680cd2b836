//! Variance bookkeeping for the four collective quadrature combinations.

/// Inseparability bound on `combined_squeezed` in the vacuum
/// normalization used throughout (single-mode quadrature variance = 1).
pub const CRITERION_BOUND: f64 = 4.0;

/// Correlation variances of the four collective combinations at one
/// operating point.
///
/// The combinations are the pairwise amplitude difference `X_i - X_j`,
/// the full phase sum `sum_i Y_i`, the full amplitude sum `sum_i X_i`
/// and the pairwise phase difference `Y_i - Y_j`. Their vacuum values
/// are 2, N, N and 2 respectively, so `combined_squeezed` has vacuum
/// reference `N + 2` and certifies inseparability below 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceReport {
    pub v_xdiff: f64,
    pub v_ysum: f64,
    pub v_xsum: f64,
    pub v_ydiff: f64,
    /// `v_xdiff + v_ysum`, the combination tested by the criterion.
    pub combined_squeezed: f64,
    /// `v_xsum + v_ydiff`, the conjugate combination.
    pub combined_antisqueezed: f64,
    /// `N + 2`, the value of `combined_squeezed` for vacuum inputs.
    pub vacuum_reference: f64,
    /// Constant 4 in this normalization.
    pub criterion_bound: f64,
    /// Mode count the report was computed for.
    pub n_modes: u32,
}

impl VarianceReport {
    /// Assembles a report from the four per-combination noise powers
    /// (each a `|m|^2 + |n|^2`-style sum over unit-variance inputs),
    /// applying the combination weights 2 (differences) and N (sums).
    pub fn from_combination_powers(
        n_modes: u32,
        xdiff: f64,
        ysum: f64,
        xsum: f64,
        ydiff: f64,
    ) -> Self {
        let n = f64::from(n_modes);
        let (v_xdiff, v_ysum, v_xsum, v_ydiff) = (2.0 * xdiff, n * ysum, n * xsum, 2.0 * ydiff);
        VarianceReport {
            v_xdiff,
            v_ysum,
            v_xsum,
            v_ydiff,
            combined_squeezed: v_xdiff + v_ysum,
            combined_antisqueezed: v_xsum + v_ydiff,
            vacuum_reference: n + 2.0,
            criterion_bound: CRITERION_BOUND,
            n_modes,
        }
    }
}
