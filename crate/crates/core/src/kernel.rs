//! The radial kernel phi, its derivative, the sign functional psi, and their
//! closed forms.
//!
//! phi(r) is the surface-averaged radial speed induced at radius r by a unit mass
//! spread uniformly over the unit sphere, under the pair force x|x|^{alpha-2}.
//! In polar coordinates (d >= 2):
//!
//!   phi(r)  = (omega_{d-1}/omega_d) Int_0^pi (r - cos t) (sin t)^{d-2} A^{alpha-2} dt
//!   phi'(r) = (omega_{d-1}/omega_d) Int_0^pi (sin t)^{d-2}
//!               [ A^{alpha-2} - (2-alpha)(r - cos t)^2 A^{alpha-4} ] dt
//!   psi(r)  = Int_0^pi [ d (sin t)^d A^{alpha-4} - (d-1)(sin t)^{d-2} A^{alpha-2} ] dt
//!
//! with the chord A(r, t) = (1 + r^2 - 2 r cos t)^{1/2}. psi is the normalization
//! (d-1) omega_d / (r (2-alpha) omega_{d-1}) * (r phi' - phi); its sign decides
//! whether phi/r is monotone. For d = 1 the unit sphere degenerates to the two
//! points {-1, +1} and phi is the exact two-point average instead.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{KernelParams, RegimeTag};
use crate::quad::{self, QuadConfig, QuadratureResult};
use crate::special::lgam;

pub use crate::special::{beta_fn, double_factorial, gamma_fn, ln_gamma, sphere_area};

/// omega_{d-1}/omega_d = Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2)), valid for d >= 2.
fn surface_ratio(d: u32) -> f64 {
    let d = f64::from(d);
    (lgam(d / 2.0) - lgam((d - 1.0) / 2.0)).exp() / PI.sqrt()
}

/// Chord length A(r, theta), computed as sqrt((1-r)^2 + 4 r sin^2(theta/2)) to
/// avoid the cancellation in 1 + r^2 - 2 r cos theta near r = 1, theta = 0.
pub fn chord(r: f64, theta: f64) -> f64 {
    chord_sq(r, theta).sqrt()
}

fn chord_sq(r: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    (1.0 - r) * (1.0 - r) + 4.0 * r * s * s
}

fn exact(value: f64) -> QuadratureResult {
    QuadratureResult {
        value,
        abs_error_estimate: 4.0 * f64::EPSILON * value.abs(),
        panels_used: 1,
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!("radius must be finite and >= 0, got {r}")));
    }
    Ok(())
}

/// Initial panel boundaries for the polar integrals. Near r = 1 the integrand
/// concentrates at theta = 0 like theta^{d+alpha-2}, so the panels are graded
/// geometrically toward that endpoint.
fn theta_seed(grade_toward_zero: bool, upper: f64) -> Vec<f64> {
    if !grade_toward_zero {
        return vec![0.0, upper];
    }
    let mut pts = vec![0.0];
    for j in (0..=30).rev() {
        pts.push(upper * 0.5f64.powi(j));
    }
    pts
}

/// d = 1 kernel: the average of the force over the two-point sphere {-1, +1}.
fn phi_point_pair(alpha: f64, r: f64) -> f64 {
    let t = r - 1.0;
    0.5 * (t.signum() * t.abs().powf(alpha - 1.0) + (r + 1.0).powf(alpha - 1.0))
}

fn phi_prime_point_pair(alpha: f64, r: f64) -> f64 {
    0.5 * (alpha - 1.0) * ((r - 1.0).abs().powf(alpha - 2.0) + (r + 1.0).powf(alpha - 2.0))
}

/// The kernel phi. Dispatches to exact values where they exist (r = 0, the
/// limiting regime, d = 1) and to adaptive quadrature otherwise.
pub fn phi(p: KernelParams, r: f64, cfg: &QuadConfig) -> Result<QuadratureResult> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            panels_used: 1,
        });
    }
    if p.is_limiting() {
        return Ok(exact(phi_closed_limiting(p.d(), r)?));
    }
    if p.d() == 1 {
        return Ok(exact(phi_point_pair(p.alpha(), r)));
    }
    phi_quadrature(p, r, cfg)
}

/// The polar-integral route for phi, with no closed-form fast paths. Requires
/// d >= 2. This is the cross-check side of every dual-route comparison.
pub fn phi_quadrature(p: KernelParams, r: f64, cfg: &QuadConfig) -> Result<QuadratureResult> {
    check_radius(r)?;
    if p.d() < 2 {
        return Err(Error::Domain(
            "the polar quadrature for phi requires d >= 2".into(),
        ));
    }
    let alpha = p.alpha();
    let sp = p.d() as i32 - 2;
    let pref = surface_ratio(p.d());
    let e = 0.5 * (alpha - 2.0);

    let mut q = if r <= 0.5 {
        // Fold theta -> pi - theta onto [0, pi/2] and difference the two chord
        // powers through expm1/ln_1p. phi(r) = O(r) comes out with full relative
        // accuracy instead of as the near-cancellation of O(1) halves, which
        // matters when r is many orders of magnitude below 1.
        quad::integrate(
            |theta: f64| {
                let c = theta.cos();
                let s = theta.sin();
                let qm = (r * r - 2.0 * r * c).ln_1p();
                let qp = (r * r + 2.0 * r * c).ln_1p();
                let am = (e * qm).exp();
                let ap = (e * qp).exp();
                s.powi(sp) * (r * (am + ap) + c * am * (e * (qp - qm)).exp_m1())
            },
            0.0,
            0.5 * PI,
            cfg,
        )?
    } else {
        let seed = theta_seed((r - 1.0).abs() < 0.1, PI);
        quad::integrate_seeded(
            |theta: f64| {
                let s = theta.sin();
                let hs = (0.5 * theta).sin();
                // r - cos t = (r - 1) + 2 sin^2(t/2), cancellation-free near
                // r = 1, t = 0 where the graded panels sample densely.
                let rc = (r - 1.0) + 2.0 * hs * hs;
                let a2 = (1.0 - r) * (1.0 - r) + 4.0 * r * hs * hs;
                rc * s.powi(sp) * a2.powf(e)
            },
            &seed,
            cfg,
        )?
    };
    q.value *= pref;
    q.abs_error_estimate *= pref;
    Ok(q)
}

/// Closed form of phi on the limiting boundary alpha = 2 - d (d >= 2):
/// 0 on [0, 1), 1/2 at r = 1, r^{1-d} on (1, inf).
pub fn phi_closed_limiting(d: u32, r: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(
            "the limiting closed form requires d >= 2".into(),
        ));
    }
    check_radius(r)?;
    Ok(if r < 1.0 {
        0.0
    } else if r == 1.0 {
        0.5
    } else {
        r.powi(1 - d as i32)
    })
}

/// phi'(r) away from r = 1. At r = 1 the integrand scales like theta^{d+alpha-4}
/// near theta = 0, which is divergent when d + alpha <= 3, so the point is
/// excluded outright rather than given a regime-dependent answer; evaluate
/// one-sided instead.
pub fn phi_prime(p: KernelParams, r: f64, cfg: &QuadConfig) -> Result<QuadratureResult> {
    check_radius(r)?;
    if r == 1.0 {
        return Err(Error::ExcludedPoint(
            "phi' is not evaluated at r = 1; use one-sided points".into(),
        ));
    }
    if r == 0.0 {
        return Ok(exact(phi_prime_at_zero(p)?));
    }
    if p.is_limiting() {
        let d = p.d() as i32;
        return Ok(exact(if r < 1.0 {
            0.0
        } else {
            f64::from(1 - d) * r.powi(-d)
        }));
    }
    if p.d() == 1 {
        return Ok(exact(phi_prime_point_pair(p.alpha(), r)));
    }
    phi_prime_quadrature(p, r, cfg)
}

/// Quadrature route for phi' (d >= 2, r != 1).
pub fn phi_prime_quadrature(p: KernelParams, r: f64, cfg: &QuadConfig) -> Result<QuadratureResult> {
    check_radius(r)?;
    if p.d() < 2 {
        return Err(Error::Domain(
            "the polar quadrature for phi' requires d >= 2".into(),
        ));
    }
    let alpha = p.alpha();
    let sp = p.d() as i32 - 2;
    let pref = surface_ratio(p.d());
    let e2 = 0.5 * (alpha - 2.0);
    let seed = theta_seed((r - 1.0).abs() < 0.1, PI);
    let mut q = quad::integrate_seeded(
        |theta: f64| {
            let s = theta.sin();
            let hs = (0.5 * theta).sin();
            let rc = (r - 1.0) + 2.0 * hs * hs;
            let a2 = (1.0 - r) * (1.0 - r) + 4.0 * r * hs * hs;
            let a_m4 = a2.powf(e2 - 1.0);
            s.powi(sp) * (a_m4 * a2 - (2.0 - alpha) * rc * rc * a_m4)
        },
        &seed,
        cfg,
    )?;
    q.value *= pref;
    q.abs_error_estimate *= pref;
    Ok(q)
}

/// Closed form of phi'(0).
///
/// The polar-integral value (omega_{d-1}/omega_d) ((2-gamma)/d) B((d-1)/2, 1/2)
/// collapses to (2 - gamma)/d because omega_{d-1}/omega_d * B((d-1)/2, 1/2) = 1;
/// the collapsed form stays finite at d = 1 where the raw factors are 0 * inf.
pub fn phi_prime_at_zero(p: KernelParams) -> Result<f64> {
    Ok((2.0 - p.gamma()) / p.d_f())
}

/// Closed form of phi(1) = Gamma(d/2) Gamma(2-gamma) / (Gamma((d-gamma+2)/2) Gamma((2-gamma)/2)),
/// the Gamma-duplication rewriting of the Beta-integral value; defined for
/// gamma < 2. On the limiting boundary (gamma = 2) the value is exactly 1/2.
pub fn phi_at_one(p: KernelParams) -> Result<f64> {
    if p.is_limiting() {
        return Ok(0.5);
    }
    let g = p.gamma();
    if g >= 2.0 {
        return Err(Error::Domain(format!(
            "the closed form for phi(1) requires gamma < 2, got {g}; use quadrature"
        )));
    }
    let d = p.d_f();
    Ok((lgam(d / 2.0) + lgam(2.0 - g) - lgam((d - g + 2.0) / 2.0) - lgam((2.0 - g) / 2.0)).exp())
}

/// The sign functional psi. Returns 0 exactly at r = 0 (where the two integrand
/// pieces cancel identically by the sine-power reduction).
pub fn psi(p: KernelParams, r: f64, cfg: &QuadConfig) -> Result<QuadratureResult> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            panels_used: 1,
        });
    }
    let d = p.d();
    let di = p.d_f();
    let alpha = p.alpha();
    let e4 = 0.5 * (alpha - 4.0);
    let seed = theta_seed((r - 1.0).abs() < 0.1, PI);
    quad::integrate_seeded(
        move |theta: f64| {
            let s = theta.sin();
            let a2 = chord_sq(r, theta);
            let t1 = di * s.powi(d as i32) * a2.powf(e4);
            if d > 1 {
                // a^{alpha-2} = a^{alpha-4} * a^2 keeps both pieces on one powf.
                let t2 = (di - 1.0) * s.powi(d as i32 - 2) * a2.powf(e4 + 1.0);
                t1 - t2
            } else {
                t1
            }
        },
        &seed,
        cfg,
    )
}

/// Closed form of psi(1) = 2^{-gamma} gamma (d-1)/(d-gamma) B((d-1)/2, (1-gamma)/2),
/// written with (d-1) B((d-1)/2, .) / (d-gamma) collapsed into Gamma ratios so it
/// also covers d = 1. Requires gamma < 1; the sign is the sign of gamma.
pub fn psi_at_one(p: KernelParams) -> Result<f64> {
    let g = p.gamma();
    if g >= 1.0 {
        return Err(Error::Domain(format!(
            "the closed form for psi(1) requires gamma < 1, got {g}; use quadrature"
        )));
    }
    if g == 0.0 {
        return Ok(0.0);
    }
    let d = p.d_f();
    let magnitude =
        (-g * std::f64::consts::LN_2 + lgam((d + 1.0) / 2.0) + lgam((1.0 - g) / 2.0)
            - lgam((d - g + 2.0) / 2.0))
        .exp();
    Ok(g * magnitude)
}

/// The chord-power moments Psi_k(r) = Int_0^pi (sin t / A)^k dt, which have the
/// exact values omega_{k+2}/omega_{k+1} on [0, 1] and omega_{k+2}/omega_{k+1} r^{-k}
/// on (1, inf).
pub fn capital_psi(k: u32, r: f64) -> f64 {
    let kf = f64::from(k);
    let level = (0.5 * PI.ln() + lgam((kf + 1.0) / 2.0) - lgam((kf + 2.0) / 2.0)).exp();
    if r <= 1.0 {
        level
    } else {
        level * r.powi(-(k as i32))
    }
}

/// Regime classifier; see [`KernelParams::regime`].
pub fn regime(p: KernelParams) -> RegimeTag {
    p.regime()
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
    fn chord_special_values() {
        for &t in &[0.1, 0.9, 2.2, PI] {
            assert!((chord(0.0, t) - 1.0).abs() < 1e-15);
            assert!((chord(1.0, t) - 2.0 * (0.5 * t).sin()).abs() < 1e-14);
        }
        // A(r, t) = r A(1/r, t)
        for &r in &[0.2, 0.7, 1.6, 9.0] {
            for &t in &[0.3, 1.2, 2.9] {
                assert!((chord(r, t) - r * chord(1.0 / r, t)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn phi_limiting_closed_form() {
        assert_eq!(phi_closed_limiting(3, 0.5).unwrap(), 0.0);
        assert_eq!(phi_closed_limiting(2, 1.0).unwrap(), 0.5);
        assert_eq!(phi_closed_limiting(3, 2.0).unwrap(), 0.25);
        assert!(phi_closed_limiting(1, 1.0).is_err());

        // phi dispatches to it for alpha = 2 - d.
        let q = phi(p(3, -1.0), 2.0, &qc()).unwrap();
        assert!((q.value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn phi_zero_is_exact() {
        let q = phi(p(3, 0.5), 0.0, &qc()).unwrap();
        assert_eq!(q.value, 0.0);
        assert_eq!(q.abs_error_estimate, 0.0);
    }

    #[test]
    fn phi_at_one_reference_values() {
        // gamma = 1: Gamma(1.5) Gamma(1) / (Gamma(2) Gamma(0.5)) = 1/2.
        assert!((phi_at_one(p(3, 0.0)).unwrap() - 0.5).abs() < 1e-13);
        // Limiting boundary.
        assert!((phi_at_one(p(2, 0.0)).unwrap() - 0.5).abs() < 1e-15);
        // d = 1: collapses to 2^{alpha-2}.
        let alpha = 1.5;
        assert!((phi_at_one(p(1, alpha)).unwrap() - 2.0f64.powf(alpha - 2.0)).abs() < 1e-13);
    }

    #[test]
    fn phi_quadrature_hits_closed_forms() {
        // (d=3, alpha=0): phi(1) = 1/2.
        let q = phi_quadrature(p(3, 0.0), 1.0, &qc()).unwrap();
        assert!((q.value - 0.5).abs() < 1e-9, "got {}", q.value);
        // Limiting (d=2, alpha=0): quadrature vs the closed branch at r = 1.
        let q = phi_quadrature(p(2, 0.0), 1.0, &qc()).unwrap();
        assert!((q.value - 0.5).abs() < 1e-9, "got {}", q.value);
        // Riemann-sum oracle for (d=3, alpha=0, r=1), 1e6 midpoint nodes.
        let n = 1_000_000;
        let h = PI / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) * h;
            let a = chord(1.0, t);
            acc += (1.0 - t.cos()) * t.sin() * a.powf(-2.0);
        }
        let oracle = surface_ratio(3) * acc * h;
        assert!((q_value(p(3, 0.0), 1.0) - oracle).abs() < 1e-7);
    }

    fn q_value(pp: KernelParams, r: f64) -> f64 {
        phi_quadrature(pp, r, &qc()).unwrap().value
    }

    #[test]
    fn phi_small_r_has_relative_accuracy() {
        // phi(r)/r -> phi'(0) quadratically; at r = 1e-9 the ratio should match
        // the closed form to full precision if the folded path avoids cancellation.
        for &(d, alpha) in &[(3u32, 0.0), (4, 1.0), (5, -2.0), (2, 1.25)] {
            let pp = p(d, alpha);
            let r = 1e-9;
            let ratio = q_value(pp, r) / r;
            let slope = phi_prime_at_zero(pp).unwrap();
            assert!(
                (ratio - slope).abs() < 1e-12 * slope.abs().max(1.0),
                "d={d} alpha={alpha}: {ratio} vs {slope}"
            );
        }
    }

    #[test]
    fn phi_folded_and_direct_paths_agree() {
        // r = 0.5 is the boundary between the folded and direct integrands.
        for &(d, alpha) in &[(2u32, 0.5), (3, 0.0), (4, -1.0), (6, 1.5)] {
            let pp = p(d, alpha);
            let folded = q_value(pp, 0.5);
            let direct = quad::integrate(
                |theta: f64| {
                    let s: f64 = theta.sin();
                    (0.5 - theta.cos()) * s.powi(d as i32 - 2) * chord(0.5, theta).powf(alpha - 2.0)
                },
                0.0,
                PI,
                &qc(),
            )
            .unwrap()
            .value
                * surface_ratio(d);
            assert!((folded - direct).abs() < 1e-10, "d={d} alpha={alpha}");
        }
    }

    #[test]
    fn phi_prime_reference_values() {
        assert!((phi_prime_at_zero(p(3, 0.0)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // Limiting: prefactor (2 - gamma) vanishes.
        assert_eq!(phi_prime_at_zero(p(3, -1.0)).unwrap(), 0.0);
        // r = 0 dispatch.
        let q = phi_prime(p(3, 0.0), 0.0, &qc()).unwrap();
        assert!((q.value - 1.0 / 3.0).abs() < 1e-14);
        // Quadrature route at r = 0 agrees with the closed form.
        let q = phi_prime_quadrature(p(3, 0.0), 0.0, &qc()).unwrap();
        assert!((q.value - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn phi_prime_excludes_r_one() {
        match phi_prime(p(3, 0.5), 1.0, &qc()) {
            Err(Error::ExcludedPoint(_)) => {}
            other => panic!("expected exclusion, got {other:?}"),
        }
    }

    #[test]
    fn phi_prime_matches_central_difference() {
        // (d=4, alpha=1, r=1/2) with h = 1e-6, 1e-6 relative agreement.
        let pp = p(4, 1.0);
        let tight = QuadConfig {
            abs_tol: 1e-13,
            ..qc()
        };
        let h = 1e-6;
        let fd = (phi(pp, 0.5 + h, &tight).unwrap().value - phi(pp, 0.5 - h, &tight).unwrap().value)
            / (2.0 * h);
        let dv = phi_prime(pp, 0.5, &tight).unwrap().value;
        assert!((fd - dv).abs() < 1e-6 * dv.abs(), "{fd} vs {dv}");
    }

    #[test]
    fn phi_prime_balanced_identity() {
        // d + alpha = 4: r phi' = phi on (0, 1).
        let pp = p(3, 1.0);
        for &r in &[0.2, 0.5, 0.8] {
            let lhs = r * phi_prime(pp, r, &qc()).unwrap().value;
            let rhs = phi(pp, r, &qc()).unwrap().value;
            assert!((lhs - rhs).abs() < 1e-9, "r={r}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn phi_prime_at_zero_one_sided_difference() {
        // (d=4, alpha=0.5): phi(h)/h = phi'(0) + O(h^2).
        let pp = p(4, 0.5);
        let h = 1e-4;
        let fd = phi(pp, h, &qc()).unwrap().value / h;
        let closed = phi_prime_at_zero(pp).unwrap();
        assert!((fd - closed).abs() < 1e-8, "{fd} vs {closed}");
    }

    #[test]
    fn psi_reference_values() {
        // psi(0) = 0 exactly.
        let q = psi(p(3, 1.5), 0.0, &qc()).unwrap();
        assert_eq!(q.value, 0.0);

        // (d=3, gamma=-1/2): psi(1) = -8 sqrt(2) / 21.
        let expected = -8.0 * 2.0f64.sqrt() / 21.0;
        let closed = psi_at_one(p(3, 1.5)).unwrap();
        assert!((closed - expected).abs() < 1e-13, "{closed}");
        let q = psi(p(3, 1.5), 1.0, &qc()).unwrap();
        assert!((q.value - expected).abs() < 1e-9, "{}", q.value);

        // Balanced: zero on (0,1], strictly negative beyond; at d=3, r=2 the
        // moment identity gives psi(2) = 4 (2^-3 - 2^-1) = -3/2.
        let pp = p(3, 1.0);
        assert!(psi(pp, 0.6, &qc()).unwrap().value.abs() < 1e-9);
        let q = psi(pp, 2.0, &qc()).unwrap();
        assert!((q.value + 1.5).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn psi_at_one_domain_and_sign() {
        assert!(psi_at_one(p(3, -0.5)).is_err()); // gamma = 1.5 >= 1
        assert_eq!(psi_at_one(p(3, 1.0)).unwrap(), 0.0); // balanced
        let v = psi_at_one(p(4, 0.7)).unwrap(); // gamma = -0.7
        let q = psi(p(4, 0.7), 1.0, &qc()).unwrap();
        assert!(v < 0.0);
        assert!((v - q.value).abs() < 1e-8, "{v} vs {}", q.value);
    }

    #[test]
    fn psi_d1_positive_integrand() {
        // d = 1 drops the negative piece entirely; psi > 0 wherever it converges.
        let q = psi(p(1, 1.5), 0.5, &qc()).unwrap();
        assert!(q.value > 0.0);
        // Closed form: (1/(r(alpha-2))) [ (1+r)^{alpha-2} - (1-r)^{alpha-2} ].
        let (alpha, r) = (1.5, 0.5);
        let closed = ((1.0f64 + r).powf(alpha - 2.0) - (1.0f64 - r).powf(alpha - 2.0))
            / (r * (alpha - 2.0));
        assert!((q.value - closed).abs() < 1e-10, "{} vs {closed}", q.value);
    }

    #[test]
    fn capital_psi_reference_values() {
        assert!((capital_psi(0, 0.3) - PI).abs() < 1e-13);
        assert!((capital_psi(0, 7.0) - PI).abs() < 1e-13);
        assert!((capital_psi(1, 2.0) - 1.0).abs() < 1e-13);
        assert!((capital_psi(2, 0.5) - PI / 2.0).abs() < 1e-13);
        // Direct quadrature cross-check for k = 1..3 at r on both sides of 1.
        for k in 1u32..=3 {
            for &r in &[0.5, 1.0, 2.0] {
                let q = quad::integrate(
                    |theta: f64| (theta.sin() / chord(r, theta)).powi(k as i32),
                    0.0,
                    PI,
                    &qc(),
                )
                .unwrap();
                assert!(
                    (q.value - capital_psi(k, r)).abs() < 1e-9,
                    "k={k} r={r}: {} vs {}",
                    q.value,
                    capital_psi(k, r)
                );
            }
        }
    }

    #[test]
    fn phi_d1_two_point_form() {
        let pp = p(1, 1.5);
        let q = phi(pp, 2.0, &qc()).unwrap();
        let expected = 0.5 * (1.0f64.powf(0.5) + 3.0f64.powf(0.5));
        assert!((q.value - expected).abs() < 1e-14);
        // Continuous limit at r = 1 equals the closed form 2^{alpha-2}.
        let q = phi(pp, 1.0, &qc()).unwrap();
        assert!((q.value - 2.0f64.powf(-0.5)).abs() < 1e-14);
    }

    #[test]
    fn phi_rejects_negative_radius() {
        assert!(phi(p(3, 0.0), -0.5, &qc()).is_err());
        assert!(phi(p(3, 0.0), f64::NAN, &qc()).is_err());
    }
}
