//! Power-series evaluation of psi on [0, 1) for gamma in (-1, 0).
//!
//! psi(r) = sum_k c_k r^{2k} with
//!
//!   c_k = -pref * (d-1)!! / ((d+2k)!! (2k-2)!!) * a_k,
//!   a_1 = -gamma (2 - gamma),  a_{k+1} = a_k (2k + gamma)(d + 2k - 2 + gamma),
//!
//! where pref = 2 for d odd and pi for d even. Every c_k is strictly negative on
//! the admissible gamma band, so partial sums decrease monotonically in the
//! truncation order. The terms are advanced incrementally through the ratio
//!
//!   c_{k+1}/c_k = (2k + gamma)(d + 2k - 2 + gamma) / ((d + 2k + 2) 2k),
//!
//! which keeps everything bounded; raw (d+2k)!! factorials overflow f64 near
//! k = 150. This module is the independent oracle against the quadrature psi.

use crate::error::{Error, Result};
use crate::params::KernelParams;
use crate::special::double_factorial;

/// Largest radius accepted by [`psi_series`]; beyond it convergence slows and
/// quadrature is the better tool.
pub const SERIES_R_MAX: f64 = 0.95;

/// Truncation order cap.
pub const SERIES_K_MAX: usize = 500;

const TERM_REL_CUTOFF: f64 = 1e-15;

/// Recurrence values and assembled series terms up to a fixed order.
#[derive(Clone, Debug)]
pub struct SeriesCoeffs {
    pub params: KernelParams,
    /// a_1..a_K from the raw recurrence. Grows like 4^k (k!)^2 and saturates to
    /// infinity past k of about 150; use `terms` for anything quantitative.
    pub a: Vec<f64>,
    /// c_1..c_K, advanced incrementally.
    pub terms: Vec<f64>,
}

fn check_gamma_band(p: KernelParams) -> Result<()> {
    let g = p.gamma();
    if !(-1.0 < g && g < 0.0) {
        return Err(Error::Domain(format!(
            "series expansion requires gamma in (-1, 0), got {g}"
        )));
    }
    Ok(())
}

/// First series term c_1 = -pref (d-1)!!/((d+2)!! 0!!) a_1.
fn first_term(p: KernelParams) -> f64 {
    let d = p.d() as i32;
    let g = p.gamma();
    let pref = if d % 2 == 1 { 2.0 } else { std::f64::consts::PI };
    let a1 = -g * (2.0 - g);
    -pref * double_factorial(d - 1).unwrap() / double_factorial(d + 2).unwrap() * a1
}

/// Ratio c_{k+1}/c_k.
fn term_ratio(p: KernelParams, k: usize) -> f64 {
    let d = p.d_f();
    let g = p.gamma();
    let kf = k as f64;
    (2.0 * kf + g) * (d + 2.0 * kf - 2.0 + g) / ((d + 2.0 * kf + 2.0) * 2.0 * kf)
}

/// Compute a_1..a_K and c_1..c_K.
pub fn coefficients(p: KernelParams, k_max: usize) -> Result<SeriesCoeffs> {
    check_gamma_band(p)?;
    if k_max < 1 {
        return Err(Error::Domain("need at least one series term".into()));
    }
    let d = p.d_f();
    let g = p.gamma();
    let mut a = Vec::with_capacity(k_max);
    let mut terms = Vec::with_capacity(k_max);
    a.push(-g * (2.0 - g));
    terms.push(first_term(p));
    for k in 1..k_max {
        let kf = k as f64;
        a.push(a[k - 1] * (2.0 * kf + g) * (d + 2.0 * kf - 2.0 + g));
        terms.push(terms[k - 1] * term_ratio(p, k));
    }
    Ok(SeriesCoeffs { params: p, a, terms })
}

/// Partial sum of the psi series at radius r in [0, 0.95], truncated at the
/// first term below 1e-15 relative to the running sum.
pub fn psi_series(p: KernelParams, r: f64) -> Result<f64> {
    check_gamma_band(p)?;
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
    }
    if r > SERIES_R_MAX {
        return Err(Error::Range(format!(
            "psi_series is restricted to r <= {SERIES_R_MAX}; use the quadrature psi for r = {r}"
        )));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let r2 = r * r;
    let mut term = first_term(p) * r2;
    let mut sum = term;
    for k in 1..SERIES_K_MAX {
        term *= term_ratio(p, k) * r2;
        sum += term;
        if term.abs() < TERM_REL_CUTOFF * sum.abs().max(1.0) {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNonConvergence(format!(
        "no term below cutoff within {SERIES_K_MAX} terms at r = {r}"
    )))
}
