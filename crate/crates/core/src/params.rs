//! Kernel parameterization and regime classification.

use crate::error::{Error, Result};

/// Tie tolerance for the exact-boundary comparisons on d + alpha.
pub const REGIME_TIE_TOL: f64 = 1e-12;

/// The pair (d, alpha) with the derived exponent gamma = 4 - d - alpha.
///
/// Admissible range is 2 - d < alpha < 2. The lower boundary alpha = 2 - d is
/// admitted only for d >= 2, where the kernel has an exact three-branch closed
/// form (the "limiting" regime).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    d: u32,
    alpha: f64,
    gamma: f64,
}

/// Where d + alpha falls relative to the structure-changing boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegimeTag {
    /// d + alpha >= 5
    Supercritical,
    /// 4 < d + alpha < 5
    CriticalUpper,
    /// d + alpha = 4
    Balanced,
    /// 2 < d + alpha < 4
    Subcritical,
    /// d + alpha = 2
    Limiting,
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegimeTag::Supercritical => "SUPERCRITICAL",
            RegimeTag::CriticalUpper => "CRITICAL_UPPER",
            RegimeTag::Balanced => "BALANCED",
            RegimeTag::Subcritical => "SUBCRITICAL",
            RegimeTag::Limiting => "LIMITING",
        };
        f.write_str(s)
    }
}

impl KernelParams {
    pub fn new(d: u32, alpha: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension d must be >= 1".into()));
        }
        if !alpha.is_finite() {
            return Err(Error::Domain("alpha must be finite".into()));
        }
        let lower = 2.0 - f64::from(d);
        let sum = f64::from(d) + alpha;
        if alpha >= 2.0 {
            return Err(Error::Domain(format!(
                "alpha must lie in (2-d, 2) = ({lower}, 2) for d = {d}, got {alpha}"
            )));
        }
        if (sum - 2.0).abs() <= REGIME_TIE_TOL {
            if d == 1 {
                return Err(Error::Domain(
                    "the limiting boundary alpha = 2-d requires d >= 2".into(),
                ));
            }
        } else if sum < 2.0 {
            return Err(Error::Domain(format!(
                "alpha must lie in (2-d, 2) = ({lower}, 2) for d = {d}, got {alpha}"
            )));
        }
        Ok(Self {
            d,
            alpha,
            gamma: 4.0 - f64::from(d) - alpha,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn d_f(&self) -> f64 {
        f64::from(self.d)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// gamma = 4 - d - alpha, held exactly by construction.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn regime(&self) -> RegimeTag {
        let sum = f64::from(self.d) + self.alpha;
        if (sum - 2.0).abs() <= REGIME_TIE_TOL {
            RegimeTag::Limiting
        } else if (sum - 4.0).abs() <= REGIME_TIE_TOL {
            RegimeTag::Balanced
        } else if sum >= 5.0 - REGIME_TIE_TOL {
            RegimeTag::Supercritical
        } else if sum > 4.0 {
            RegimeTag::CriticalUpper
        } else {
            RegimeTag::Subcritical
        }
    }

    pub fn is_limiting(&self) -> bool {
        self.regime() == RegimeTag::Limiting
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_boundaries() {
        let p = |d, a| KernelParams::new(d, a).unwrap();
        assert_eq!(p(3, 1.5).regime(), RegimeTag::CriticalUpper);
        assert_eq!(p(3, 1.0).regime(), RegimeTag::Balanced);
        assert_eq!(p(3, 0.5).regime(), RegimeTag::Subcritical);
        assert_eq!(p(5, 0.0).regime(), RegimeTag::Supercritical);
        assert_eq!(p(4, 1.5).regime(), RegimeTag::Supercritical);
        assert_eq!(p(3, -1.0).regime(), RegimeTag::Limiting);
        assert_eq!(p(2, 0.0).regime(), RegimeTag::Limiting);
        // Floating-point alpha that should land exactly on the balanced branch.
        assert_eq!(p(4, 0.0).regime(), RegimeTag::Balanced);
        assert_eq!(p(5, -1.0).regime(), RegimeTag::Balanced);
    }

    #[test]
    fn gamma_identity() {
        for d in 1..=8u32 {
            let lo = 2.0 - f64::from(d);
            for i in 1..20 {
                let alpha = lo + (2.0 - lo) * f64::from(i) / 20.0;
                let p = KernelParams::new(d, alpha).unwrap();
                assert_eq!(p.gamma(), 4.0 - f64::from(d) - alpha);
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(KernelParams::new(0, 0.5).is_err());
        assert!(KernelParams::new(3, 2.0).is_err());
        assert!(KernelParams::new(3, 3.0).is_err());
        assert!(KernelParams::new(3, -1.5).is_err());
        // d = 1 has no limiting boundary.
        assert!(KernelParams::new(1, 1.0).is_err());
        assert!(KernelParams::new(1, 1.5).is_ok());
        assert!(KernelParams::new(2, 0.0).is_ok());
    }
}
