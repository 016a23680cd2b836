//! Multipartite inseparability verdicts over variance reports.

use crate::error::{Error, Result};
use crate::report::VarianceReport;

/// Which inequality form a verdict used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionForm {
    /// Pairwise amplitude difference plus full phase sum (the squeezed
    /// combination for this amplifier).
    XDiffYSum,
    /// Full amplitude sum plus pairwise phase difference.
    XSumYDiff,
}

impl CriterionForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            CriterionForm::XDiffYSum => "xdiff_ysum",
            CriterionForm::XSumYDiff => "xsum_ydiff",
        }
    }
}

/// Outcome of the inseparability test for one inequality form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionVerdict {
    /// The combined correlation variance tested.
    pub value: f64,
    /// Constant 4 in this normalization.
    pub bound: f64,
    pub form: CriterionForm,
    /// `value < bound`, strictly: a value exactly at the bound does not
    /// certify entanglement.
    pub entangled: bool,
    /// `value` beats the feedback-free value of the same combination.
    pub enhanced_vs_bare: bool,
}

/// van Loock-Furusawa inseparability check of a report against its
/// feedback-free counterpart; returns one verdict per inequality form
/// (squeezed combination first).
pub fn vlf_check(report: &VarianceReport, bare: &VarianceReport) -> Result<[CriterionVerdict; 2]> {
    if report.n_modes != bare.n_modes {
        return Err(Error::MismatchedContext(report.n_modes, bare.n_modes));
    }
    let verdict = |value: f64, reference: f64, form: CriterionForm| CriterionVerdict {
        value,
        bound: report.criterion_bound,
        form,
        entangled: value < report.criterion_bound,
        enhanced_vs_bare: value < reference,
    };
    Ok([
        verdict(
            report.combined_squeezed,
            bare.combined_squeezed,
            CriterionForm::XDiffYSum,
        ),
        verdict(
            report.combined_antisqueezed,
            bare.combined_antisqueezed,
            CriterionForm::XSumYDiff,
        ),
    ])
}
