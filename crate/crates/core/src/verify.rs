//! Grid sweeps that confirm the sign and identity structure of the kernel
//! numerically, one claim at a time, with margins recorded so accuracy
//! regressions stay visible before they flip a sign.
//!
//! Sign thresholds: strict claims must clear 1e-10, identity claims must sit
//! inside 1e-8; both leave headroom over the default quadrature tolerance of
//! 1e-10. Points within 1e-3 of a regime boundary in gamma are excluded from
//! strict-sign checks (the margins there shrink to zero by continuity) and are
//! reported as skips, not failures.

use crate::dynamics;
use crate::error::{Error, Result};
use crate::kernel;
use crate::params::{KernelParams, RegimeTag};
use crate::quad::QuadConfig;
use crate::rings;

/// Strict-sign threshold.
pub const SIGN_TOL: f64 = 1e-10;
/// Identity (numerically-zero / dual-route agreement) threshold.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Exclusion band around regime boundaries, measured in gamma.
pub const BOUNDARY_EXCLUSION: f64 = 1e-3;

/// One grid point of one claim: the computed value, what was expected of it,
/// and the margin by which it passed (positive) or failed (negative).
#[derive(Clone, Debug)]
pub struct PointResult {
    pub d: u32,
    pub alpha: f64,
    pub r: Option<f64>,
    pub value: f64,
    pub expected: String,
    pub pass: bool,
    pub margin: f64,
}

/// Pass/fail record for one claim at one parameter point.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub claim_id: String,
    pub results: Vec<PointResult>,
    pub passed: usize,
    pub failed: usize,
    /// Smallest margin among the results.
    pub worst_margin: f64,
}

impl VerificationReport {
    fn from_results(claim_id: impl Into<String>, results: Vec<PointResult>) -> Self {
        let passed = results.iter().filter(|p| p.pass).count();
        let failed = results.len() - passed;
        let worst_margin = results
            .iter()
            .map(|p| p.margin)
            .fold(f64::INFINITY, f64::min);
        Self {
            claim_id: claim_id.into(),
            results,
            passed,
            failed,
            worst_margin,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Default radius grid: 40 log-spaced points spanning [1e-2, 1e2] plus the
/// structural points around the r = 1 seam.
pub fn default_r_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..40)
        .map(|i| 10f64.powf(-2.0 + 4.0 * f64::from(i) / 39.0))
        .collect();
    grid.extend_from_slice(&[0.5, 1.0 - 1e-6, 1.0, 1.0 + 1e-6, 2.0]);
    grid.sort_by(f64::total_cmp);
    grid
}

fn point(d: u32, alpha: f64, r: Option<f64>, value: f64, expected: &str, margin: f64) -> PointResult {
    PointResult {
        d,
        alpha,
        r,
        value,
        expected: expected.to_string(),
        pass: margin > 0.0,
        margin,
    }
}

fn exclude_boundary(p: KernelParams, which: &str) -> Result<()> {
    if p.gamma().abs() < BOUNDARY_EXCLUSION && p.regime() != RegimeTag::Balanced {
        return Err(Error::Regime(format!(
            "{which}: gamma = {:.3e} is within {BOUNDARY_EXCLUSION} of the balanced boundary; \
             sign margins vanish there",
            p.gamma()
        )));
    }
    Ok(())
}

/// psi < 0 on (0, inf) for the supercritical and upper-critical regimes; for the
/// balanced regime, psi = 0 on (0, 1] and psi < 0 beyond.
pub fn check_monotonicity(
    p: KernelParams,
    r_grid: &[f64],
    cfg: &QuadConfig,
) -> Result<VerificationReport> {
    let regime = p.regime();
    if !matches!(
        regime,
        RegimeTag::Supercritical | RegimeTag::CriticalUpper | RegimeTag::Balanced
    ) {
        return Err(Error::Regime(format!(
            "check_monotonicity applies to d+alpha >= 4, got {regime}"
        )));
    }
    if regime == RegimeTag::CriticalUpper {
        exclude_boundary(p, "check_monotonicity")?;
    }
    let mut results = Vec::new();
    for &r in r_grid {
        if r <= 0.0 {
            continue;
        }
        let value = kernel::psi(p, r, cfg)?.value;
        let (expected, margin) = if regime == RegimeTag::Balanced && r <= 1.0 {
            ("|psi| < 1e-8", IDENTITY_TOL - value.abs())
        } else {
            ("psi < -1e-10", -value - SIGN_TOL)
        };
        results.push(point(p.d(), p.alpha(), Some(r), value, expected, margin));
    }
    Ok(VerificationReport::from_results("monotonicity", results))
}

/// psi > 0 on (0, 1) in the subcritical regime (phi/r strictly increasing there).
pub fn check_subcritical_increase(
    p: KernelParams,
    r_grid: &[f64],
    cfg: &QuadConfig,
) -> Result<VerificationReport> {
    if p.regime() != RegimeTag::Subcritical {
        return Err(Error::Regime(format!(
            "check_subcritical_increase requires the subcritical regime, got {}",
            p.regime()
        )));
    }
    exclude_boundary(p, "check_subcritical_increase")?;
    let mut results = Vec::new();
    for &r in r_grid {
        if r <= 0.0 || r >= 1.0 {
            continue;
        }
        let value = kernel::psi(p, r, cfg)?.value;
        results.push(point(
            p.d(),
            p.alpha(),
            Some(r),
            value,
            "psi > 1e-10",
            value - SIGN_TOL,
        ));
    }
    Ok(VerificationReport::from_results("subcritical_increase", results))
}

/// Dual-route check of phi(1) > phi'(0) > 0: closed forms against quadrature,
/// then the strict inequalities. Requires d >= 2 (the polar quadrature route
/// does not exist in one dimension).
pub fn check_lemma2(p: KernelParams, cfg: &QuadConfig) -> Result<VerificationReport> {
    if p.regime() != RegimeTag::Subcritical {
        return Err(Error::Regime(format!(
            "check_lemma2 requires the subcritical regime, got {}",
            p.regime()
        )));
    }
    if p.d() < 2 {
        return Err(Error::Regime(
            "check_lemma2 needs d >= 2 for its quadrature route".into(),
        ));
    }
    let phi1_closed = kernel::phi_at_one(p)?;
    let phi1_quad = kernel::phi_quadrature(p, 1.0, cfg)?.value;
    let slope_closed = kernel::phi_prime_at_zero(p)?;
    let slope_quad = kernel::phi_prime_quadrature(p, 0.0, cfg)?.value;

    let results = vec![
        point(
            p.d(),
            p.alpha(),
            Some(1.0),
            phi1_quad,
            "quadrature phi(1) within 1e-8 of closed form",
            IDENTITY_TOL - (phi1_quad - phi1_closed).abs(),
        ),
        point(
            p.d(),
            p.alpha(),
            Some(0.0),
            slope_quad,
            "quadrature phi'(0) within 1e-8 of closed form",
            IDENTITY_TOL - (slope_quad - slope_closed).abs(),
        ),
        point(
            p.d(),
            p.alpha(),
            None,
            phi1_closed - slope_closed,
            "phi(1) - phi'(0) > 1e-10",
            phi1_closed - slope_closed - SIGN_TOL,
        ),
        point(
            p.d(),
            p.alpha(),
            None,
            slope_closed,
            "phi'(0) > 1e-10",
            slope_closed - SIGN_TOL,
        ),
    ];
    Ok(VerificationReport::from_results("lemma2_dual_route", results))
}

/// Log-convexity consequence for the Gamma function:
/// Gamma(2-gamma) Gamma((d+2)/2) > Gamma((d-gamma+2)/2) Gamma((4-gamma)/2)
/// for gamma in (0, 2). Compared in the log domain.
pub fn check_gamma_inequality(p: KernelParams) -> Result<VerificationReport> {
    let g = p.gamma();
    if !(0.0 < g && g < 2.0) {
        return Err(Error::Regime(format!(
            "check_gamma_inequality requires gamma in (0, 2), got {g}"
        )));
    }
    let d = p.d_f();
    let lhs = kernel::ln_gamma(2.0 - g)? + kernel::ln_gamma((d + 2.0) / 2.0)?;
    let rhs = kernel::ln_gamma((d - g + 2.0) / 2.0)? + kernel::ln_gamma((4.0 - g) / 2.0)?;
    let results = vec![point(
        p.d(),
        p.alpha(),
        None,
        lhs - rhs,
        "log-domain difference > 0",
        lhs - rhs,
    )];
    Ok(VerificationReport::from_results("gamma_inequality", results))
}

/// phi(r)/r decays toward zero: strictly decreasing along r in {10, 100, 1000},
/// with the final value under max(1e-2, 10 * 1000^{alpha-2}) * phi(1). The
/// second branch of the envelope is the known r^{alpha-2} tail with an order of
/// magnitude of headroom; it takes over for alpha above about 4/3, where a flat
/// 1e-2 cut is unattainable.
pub fn check_limit_sublinear(p: KernelParams, cfg: &QuadConfig) -> Result<VerificationReport> {
    let rs = [10.0, 100.0, 1000.0];
    let mut over_r = [0.0; 3];
    for (slot, &r) in over_r.iter_mut().zip(&rs) {
        *slot = kernel::phi(p, r, cfg)?.value / r;
    }
    let phi1 = kernel::phi(p, 1.0, cfg)?.value;
    let envelope = (1e-2f64).max(10.0 * 1000f64.powf(p.alpha() - 2.0)) * phi1;

    let mut results = vec![
        point(
            p.d(),
            p.alpha(),
            Some(100.0),
            over_r[1],
            "phi(r)/r decreasing from r=10 to 100",
            over_r[0] - over_r[1],
        ),
        point(
            p.d(),
            p.alpha(),
            Some(1000.0),
            over_r[2],
            "phi(r)/r decreasing from r=100 to 1000",
            over_r[1] - over_r[2],
        ),
    ];
    results.push(point(
        p.d(),
        p.alpha(),
        Some(1000.0),
        over_r[2],
        "phi(1000)/1000 under the decay envelope",
        envelope - over_r[2],
    ));
    Ok(VerificationReport::from_results("limit_sublinear", results))
}

/// Limiting-boundary checks (alpha = 2-d): the quadrature kernel against the
/// exact three-branch form, and near-linearity of the ball velocity field.
pub fn check_limiting_example(p: KernelParams, cfg: &QuadConfig) -> Result<VerificationReport> {
    if p.regime() != RegimeTag::Limiting {
        return Err(Error::Regime(format!(
            "check_limiting_example requires the limiting regime, got {}",
            p.regime()
        )));
    }
    let mut results = Vec::new();
    for &r in &[0.5, 1.0, 2.0, 5.0] {
        let quad = kernel::phi_quadrature(p, r, cfg)?.value;
        let closed = kernel::phi_closed_limiting(p.d(), r)?;
        results.push(point(
            p.d(),
            p.alpha(),
            Some(r),
            quad,
            "quadrature phi within 1e-8 of the closed branch",
            IDENTITY_TOL - (quad - closed).abs(),
        ));
    }
    // Ball velocity linearity at modest resolution; the tolerance is the
    // discretization error of 400 shells over (0.05, 0.95).
    let ball = dynamics::discretize_ball(p.d(), 400)?;
    let slope = ball.rate.expect("ball carries its contraction rate");
    let mut worst = 0.0f64;
    for &rho in ball
        .radii
        .iter()
        .filter(|&&r| (0.05..=0.95).contains(&r))
    {
        let w = rings::velocity_w(&ball, rho, cfg)?;
        worst = worst.max((w / rho - slope).abs() / slope);
    }
    results.push(point(
        p.d(),
        p.alpha(),
        None,
        worst,
        "ball w(r)/r constant to 1e-3 over (0.05, 0.95)",
        1e-3 - worst,
    ));
    Ok(VerificationReport::from_results("limiting_example", results))
}

/// A rectangular parameter grid: dimensions crossed with an alpha ladder strictly
/// inside (2-d, 2).
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub dims: Vec<u32>,
    pub alpha_step: f64,
    pub r_grid: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            dims: (1..=6).collect(),
            alpha_step: 0.25,
            r_grid: default_r_grid(),
        }
    }
}

impl GridSpec {
    /// Enumerate the admissible (d, alpha) points of this grid.
    pub fn points(&self) -> Vec<KernelParams> {
        let mut out = Vec::new();
        for &d in &self.dims {
            let lower = 2.0 - f64::from(d);
            let mut j = 1;
            loop {
                let alpha = lower + self.alpha_step * f64::from(j);
                if alpha >= 2.0 - 1e-9 {
                    break;
                }
                if let Ok(p) = KernelParams::new(d, alpha) {
                    out.push(p);
                }
                j += 1;
            }
        }
        out.sort_by(|a, b| {
            a.d()
                .cmp(&b.d())
                .then(a.alpha().total_cmp(&b.alpha()))
        });
        out
    }
}

/// Aggregate outcome of a grid sweep.
#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub reports: Vec<VerificationReport>,
    /// Regime contract exclusions, recorded but not fatal.
    pub skips: Vec<String>,
    pub points: usize,
    pub failures: usize,
}

impl RunSummary {
    pub fn all_passed(&self) -> bool {
        self.failures == 0
    }

    /// Worst margin per claim id, in claim order of first appearance.
    pub fn worst_margins(&self) -> Vec<(String, f64)> {
        let mut order: Vec<String> = Vec::new();
        let mut worst: std::collections::HashMap<String, f64> = std::collections::HashMap::new();
        for rep in &self.reports {
            if !worst.contains_key(&rep.claim_id) {
                order.push(rep.claim_id.clone());
            }
            let e = worst.entry(rep.claim_id.clone()).or_insert(f64::INFINITY);
            *e = e.min(rep.worst_margin);
        }
        order
            .into_iter()
            .map(|id| {
                let m = worst[&id];
                (id, m)
            })
            .collect()
    }
}

/// Run every applicable check at every grid point, dispatching on regime.
/// Contract errors (regime exclusions) are recorded as skips; computational
/// failures inside a check surface as failed points.
pub fn run_all(grid: &GridSpec, cfg: &QuadConfig) -> RunSummary {
    let mut summary = RunSummary::default();
    for p in grid.points() {
        summary.points += 1;
        let mut checks: Vec<Result<VerificationReport>> = Vec::new();
        match p.regime() {
            RegimeTag::Subcritical => {
                checks.push(check_subcritical_increase(p, &grid.r_grid, cfg));
                if p.d() >= 2 {
                    checks.push(check_lemma2(p, cfg));
                }
                checks.push(check_gamma_inequality(p));
                checks.push(check_limit_sublinear(p, cfg));
            }
            RegimeTag::Balanced | RegimeTag::CriticalUpper | RegimeTag::Supercritical => {
                checks.push(check_monotonicity(p, &grid.r_grid, cfg));
                checks.push(check_limit_sublinear(p, cfg));
            }
            RegimeTag::Limiting => {
                checks.push(check_limiting_example(p, cfg));
            }
        }
        for outcome in checks {
            match outcome {
                Ok(rep) => {
                    summary.failures += rep.failed;
                    summary.reports.push(rep);
                }
                Err(Error::Regime(msg)) => {
                    summary
                        .skips
                        .push(format!("d={} alpha={}: {msg}", p.d(), p.alpha()));
                }
                Err(other) => {
                    summary.failures += 1;
                    summary.reports.push(VerificationReport::from_results(
                        "check_error",
                        vec![point(
                            p.d(),
                            p.alpha(),
                            None,
                            f64::NAN,
                            &format!("computation succeeded ({other})"),
                            f64::NEG_INFINITY,
                        )],
                    ));
                }
            }
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qc() -> QuadConfig {
        QuadConfig::default()
    }

    fn p(d: u32, alpha: f64) -> KernelParams {
        KernelParams::new(d, alpha).unwrap()
    }

    #[test]
    fn monotonicity_supercritical_and_critical() {
        let rep = check_monotonicity(p(5, 1.0), &default_r_grid(), &qc()).unwrap();
        assert!(rep.all_passed(), "worst margin {}", rep.worst_margin);

        let rep = check_monotonicity(p(3, 1.5), &default_r_grid(), &qc()).unwrap();
        assert!(rep.all_passed(), "worst margin {}", rep.worst_margin);

        assert!(check_monotonicity(p(3, 0.5), &default_r_grid(), &qc()).is_err());
    }

    #[test]
    fn monotonicity_balanced_pattern() {
        let rep = check_monotonicity(p(3, 1.0), &default_r_grid(), &qc()).unwrap();
        assert!(rep.all_passed(), "worst margin {}", rep.worst_margin);
        // Both expectations must actually appear.
        assert!(rep.results.iter().any(|r| r.expected.contains("|psi|")));
        assert!(rep.results.iter().any(|r| r.expected.contains("psi < ")));
    }

    #[test]
    fn subcritical_increase_passes() {
        for &(d, alpha) in &[(3u32, 0.5), (2, 1.0), (1, 1.5)] {
            let rep = check_subcritical_increase(p(d, alpha), &default_r_grid(), &qc()).unwrap();
            assert!(rep.all_passed(), "d={d} alpha={alpha}: {}", rep.worst_margin);
            assert!(rep.results.iter().all(|pt| pt.r.unwrap() < 1.0));
        }
        assert!(check_subcritical_increase(p(3, 1.5), &default_r_grid(), &qc()).is_err());
    }

    #[test]
    fn lemma2_anchor_point() {
        let rep = check_lemma2(p(3, 0.0), &qc()).unwrap();
        assert!(rep.all_passed());
        // phi(1) = 1/2 and phi'(0) = 1/3 at the anchor.
        let phi1 = rep.results[0].value;
        let slope = rep.results[1].value;
        assert!((phi1 - 0.5).abs() < 1e-9);
        assert!((slope - 1.0 / 3.0).abs() < 1e-9);

        assert!(check_lemma2(p(1, 1.5), &qc()).is_err());
        assert!(check_lemma2(p(3, 1.0), &qc()).is_err());
    }

    #[test]
    fn lemma2_deep_subcritical() {
        for &(d, alpha) in &[(2u32, 1.0), (10, -7.5)] {
            let rep = check_lemma2(p(d, alpha), &qc()).unwrap();
            assert!(rep.all_passed(), "d={d} alpha={alpha}: {}", rep.worst_margin);
        }
    }

    #[test]
    fn gamma_inequality_margins() {
        // (d=3, gamma=1): Gamma(1)Gamma(5/2) vs Gamma(2)Gamma(3/2).
        let rep = check_gamma_inequality(p(3, 0.0)).unwrap();
        assert!(rep.all_passed());
        let expected = (3.0f64 / 4.0 * std::f64::consts::PI.sqrt()).ln()
            - (0.5 * std::f64::consts::PI.sqrt()).ln();
        assert!((rep.results[0].value - expected).abs() < 1e-12);

        // Margin shrinks toward the gamma -> 0 boundary but stays positive.
        let near = check_gamma_inequality(p(3, 0.99)).unwrap();
        assert!(near.all_passed());
        assert!(near.worst_margin < rep.worst_margin);

        // gamma = 1.9 deep case.
        let rep = check_gamma_inequality(p(6, -3.9)).unwrap();
        assert!(rep.all_passed());

        assert!(check_gamma_inequality(p(3, 1.5)).is_err()); // gamma < 0
    }

    #[test]
    fn sublinear_decay_across_alpha() {
        for &(d, alpha) in &[(3u32, 1.0), (3, 1.9), (2, 0.1), (1, 1.5), (4, -1.9)] {
            let rep = check_limit_sublinear(p(d, alpha), &qc()).unwrap();
            assert!(rep.all_passed(), "d={d} alpha={alpha}: {}", rep.worst_margin);
        }
    }

    #[test]
    fn limiting_example_check() {
        let rep = check_limiting_example(p(2, 0.0), &qc()).unwrap();
        assert!(rep.all_passed(), "worst margin {}", rep.worst_margin);
        assert!(check_limiting_example(p(3, 0.0), &qc()).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let grid = GridSpec::default();
        let pts = grid.points();
        // d = 3 contributes alpha in {-0.75, ..., 1.75}: 11 points.
        assert_eq!(pts.iter().filter(|p| p.d() == 3).count(), 11);
        // No limiting points: the ladder is strictly inside the open interval.
        assert!(pts.iter().all(|p| p.regime() != RegimeTag::Limiting));
        // Every point maps to at least one applicable check (dispatch totality):
        // subcritical and higher regimes are all covered by construction.
        for p in &pts {
            match p.regime() {
                RegimeTag::Subcritical
                | RegimeTag::Balanced
                | RegimeTag::CriticalUpper
                | RegimeTag::Supercritical
                | RegimeTag::Limiting => {}
            }
        }
    }

    #[test]
    fn run_all_single_point_dispatch() {
        let grid = GridSpec {
            dims: vec![3],
            alpha_step: 1.0, // alpha in {0, 1}: one subcritical... 2-3+1 = 0, then 1.
            r_grid: default_r_grid(),
        };
        let summary = run_all(&grid, &qc());
        assert!(summary.all_passed(), "failures: {}", summary.failures);
        assert_eq!(summary.points, 2);
        let claims: Vec<&str> = summary
            .reports
            .iter()
            .map(|r| r.claim_id.as_str())
            .collect();
        assert!(claims.contains(&"monotonicity"));
        assert!(claims.contains(&"subcritical_increase"));
    }

    #[test]
    fn empty_grid_is_empty_report() {
        let grid = GridSpec {
            dims: vec![],
            alpha_step: 0.25,
            r_grid: default_r_grid(),
        };
        let summary = run_all(&grid, &qc());
        assert_eq!(summary.points, 0);
        assert!(summary.reports.is_empty());
        assert!(summary.all_passed());
    }
}
