//! Delta-ring configurations and the linear-solve construction of similarity
//! solutions.
//!
//! A radially symmetric atomic configuration carries rings of mass m_k at radii
//! rho_1 < ... < rho_n plus an optional atom at the origin. The inward radial
//! speed it induces at radius r is
//!
//!   w(r) = sum_j phi(r / rho_j) rho_j^{alpha-1} m_j + m_0 r^{alpha-1},
//!
//! and the configuration contracts self-similarly exactly when w(rho_k)/rho_k is
//! the same for every ring. On geometric radii rho_k = lambda^{k-1} that condition
//! becomes the linear system B x = 1 with B_{kj} = phi(lambda^{k-j}) lambda^{j-k}
//! and m_k = rho_k^{2-alpha} x_k; as lambda grows B tends to an upper-triangular
//! limit with phi'(0) above the diagonal and phi(1) on it, whose solution is
//! positive, so a positivity threshold in lambda always exists in the subcritical
//! regime.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::kernel;
use crate::params::{KernelParams, RegimeTag};
use crate::quad::QuadConfig;

/// Maximum number of rings accepted by the dense solver.
pub const MAX_RINGS: usize = 64;

/// A radially symmetric atomic measure: rings plus an origin atom.
#[derive(Clone, Debug)]
pub struct RingConfig {
    pub params: KernelParams,
    /// Strictly increasing, all positive.
    pub radii: Vec<f64>,
    /// One mass per ring. Solver output may carry non-positive entries; the
    /// accompanying report flags that, and `validate` rejects it.
    pub masses: Vec<f64>,
    /// Mass of the atom at the origin, >= 0.
    pub origin_mass: f64,
    /// Contraction rate of the similarity flow, when known.
    pub rate: Option<f64>,
}

impl RingConfig {
    pub fn n_rings(&self) -> usize {
        self.radii.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.origin_mass + self.masses.iter().sum::<f64>()
    }

    /// Structural validity: ordering, positivity, finiteness.
    pub fn validate(&self) -> Result<()> {
        if self.radii.len() != self.masses.len() {
            return Err(Error::Config(
                "radii and masses must have the same length".into(),
            ));
        }
        if !self.origin_mass.is_finite() || self.origin_mass < 0.0 {
            return Err(Error::Config(format!(
                "origin mass must be finite and >= 0, got {}",
                self.origin_mass
            )));
        }
        let mut prev = 0.0;
        for (&r, &m) in self.radii.iter().zip(&self.masses) {
            if !r.is_finite() || r <= prev {
                return Err(Error::Config(
                    "radii must be finite, positive, and strictly increasing".into(),
                ));
            }
            if !m.is_finite() || m <= 0.0 {
                return Err(Error::Config(format!("ring masses must be > 0, got {m}")));
            }
            prev = r;
        }
        if let Some(rate) = self.rate {
            if !rate.is_finite() || rate <= 0.0 {
                return Err(Error::Config(format!("rate must be > 0, got {rate}")));
            }
        }
        Ok(())
    }
}

/// Diagnostics from one linear solve.
#[derive(Clone, Copy, Debug)]
pub struct SolveReport {
    /// Infinity-norm condition estimate of the system matrix.
    pub matrix_condition_estimate: f64,
    /// ||B x - 1||_inf of the computed solution.
    pub residual_inf_norm: f64,
    /// Whether every solved component is strictly positive.
    pub positivity: bool,
    /// The geometric ratio used to build the system, when applicable.
    pub lambda_used: Option<f64>,
}

/// Inward radial speed induced by `config` at radius r > 0.
pub fn velocity_w(config: &RingConfig, r: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("velocity radius must be > 0, got {r}")));
    }
    let alpha = config.params.alpha();
    let mut w = config.origin_mass * r.powf(alpha - 1.0);
    for (&rho, &m) in config.radii.iter().zip(&config.masses) {
        w += kernel::phi(config.params, r / rho, cfg)?.value * rho.powf(alpha - 1.0) * m;
    }
    Ok(w)
}

/// w evaluated at every ring radius; see [`velocities_raw`].
pub fn velocities_at_rings(config: &RingConfig, cfg: &QuadConfig) -> Result<Vec<f64>> {
    velocities_raw(
        config.params,
        &config.radii,
        &config.masses,
        config.origin_mass,
        cfg,
    )
}

/// w at every ring radius, from raw slices (radii ascending). Kernel evaluations
/// are memoized by the exact bit pattern of the radius ratio, so geometric
/// configurations pay for 2n-1 quadratures instead of n^2. The limiting regime
/// short-circuits to the exact prefix-sum form, which is what makes many-ring
/// ball discretizations affordable inside the ODE right-hand side.
pub fn velocities_raw(
    params: KernelParams,
    radii: &[f64],
    masses: &[f64],
    origin_mass: f64,
    cfg: &QuadConfig,
) -> Result<Vec<f64>> {
    let alpha = params.alpha();
    let n = radii.len();
    if params.is_limiting() {
        let d = params.d() as i32;
        let mut out = Vec::with_capacity(n);
        let mut below = origin_mass;
        for (&rho, &m) in radii.iter().zip(masses) {
            out.push(rho.powi(1 - d) * (below + 0.5 * m));
            below += m;
        }
        return Ok(out);
    }
    let mut memo: HashMap<u64, f64> = HashMap::new();
    let mut out = Vec::with_capacity(n);
    for &r in radii {
        let mut w = origin_mass * r.powf(alpha - 1.0);
        for (&rho, &m) in radii.iter().zip(masses) {
            let ratio = r / rho;
            let phi_val = match memo.entry(ratio.to_bits()) {
                std::collections::hash_map::Entry::Occupied(e) => *e.get(),
                std::collections::hash_map::Entry::Vacant(e) => {
                    *e.insert(kernel::phi(params, ratio, cfg)?.value)
                }
            };
            w += phi_val * rho.powf(alpha - 1.0) * m;
        }
        out.push(w);
    }
    Ok(out)
}

/// The geometric-radii system matrix B with B_{kj} = phi(lambda^{k-j}) lambda^{j-k}.
pub fn build_b(p: KernelParams, n: usize, lambda: f64, cfg: &QuadConfig) -> Result<Vec<Vec<f64>>> {
    if n == 0 || n > MAX_RINGS {
        return Err(Error::Domain(format!("n must be in 1..={MAX_RINGS}, got {n}")));
    }
    if !(lambda > 1.0) {
        return Err(Error::Domain(format!("lambda must be > 1, got {lambda}")));
    }
    // phi(lambda^m) for m = -(n-1)..=(n-1); entries repeat along diagonals.
    let mut phi_by_offset = Vec::with_capacity(2 * n - 1);
    for m in -(n as i32 - 1)..=(n as i32 - 1) {
        let arg = lambda.powi(m);
        phi_by_offset.push(kernel::phi(p, arg, cfg)?.value * lambda.powi(-m));
    }
    let mut b = vec![vec![0.0; n]; n];
    for (k, row) in b.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = phi_by_offset[(k as i32 - j as i32 + n as i32 - 1) as usize];
        }
    }
    Ok(b)
}

/// Dense Gaussian elimination with partial pivoting, solving for several
/// right-hand sides at once. Returns the solutions in input order.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col].abs() <= f64::EPSILON * scale {
            return Err(Error::SingularMatrix(format!(
                "pivot {:.3e} at column {col} below threshold",
                a[piv][col]
            )));
        }
        if piv != col {
            a.swap(piv, col);
            for b in rhs.iter_mut() {
                b.swap(piv, col);
            }
        }
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col + 1..n {
                a[row][k] -= f * a[col][k];
            }
            a[row][col] = 0.0;
            for b in rhs.iter_mut() {
                b[row] -= f * b[col];
            }
        }
    }
    for b in rhs.iter_mut() {
        for row in (0..n).rev() {
            let mut acc = b[row];
            for k in row + 1..n {
                acc -= a[row][k] * b[k];
            }
            b[row] = acc / a[row][row];
        }
    }
    Ok(rhs)
}

fn inf_norm(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// ||A||_inf * ||A^{-1}||_inf, with the inverse obtained column by column.
fn condition_estimate(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    match gauss_solve(a.to_vec(), cols) {
        Ok(inv_cols) => {
            // Row sums of the inverse from its columns.
            let inv_norm = (0..n)
                .map(|i| inv_cols.iter().map(|c| c[i].abs()).sum::<f64>())
                .fold(0.0, f64::max);
            inf_norm(a) * inv_norm
        }
        Err(_) => f64::INFINITY,
    }
}

fn report_for(a: &[Vec<f64>], x: &[f64], lambda: Option<f64>) -> SolveReport {
    let n = a.len();
    let mut residual: f64 = 0.0;
    for row in a {
        let mut acc = -1.0;
        for j in 0..n {
            acc += row[j] * x[j];
        }
        residual = residual.max(acc.abs());
    }
    SolveReport {
        matrix_condition_estimate: condition_estimate(a),
        residual_inf_norm: residual,
        positivity: x.iter().all(|&v| v > 0.0),
        lambda_used: lambda,
    }
}

/// Build an n-ring configuration on radii lambda^{k-1} by solving B x = 1.
///
/// Masses are m_k = rho_k^{2-alpha} x_k. With `normalize` the masses are rescaled
/// to total mass one (only done when they are all positive), which divides the
/// contraction rate by the same total; otherwise the solve's native rate is 1.
/// Non-positive solutions are returned with `positivity = false` rather than as
/// an error, so callers can probe lambda.
pub fn solve_geometric(
    p: KernelParams,
    n: usize,
    lambda: f64,
    normalize: bool,
    cfg: &QuadConfig,
) -> Result<(RingConfig, SolveReport)> {
    if n >= 2 && p.regime() != RegimeTag::Subcritical {
        return Err(Error::Regime(format!(
            "multi-ring constructions require the subcritical regime (2 < d+alpha < 4); \
             got {} at d = {}, alpha = {}",
            p.regime(),
            p.d(),
            p.alpha()
        )));
    }
    let b = build_b(p, n, lambda, cfg)?;
    let x = gauss_solve(b.clone(), vec![vec![1.0; n]])?.remove(0);
    let report = report_for(&b, &x, Some(lambda));

    let radii: Vec<f64> = (0..n).map(|k| lambda.powi(k as i32)).collect();
    let mut masses: Vec<f64> = radii
        .iter()
        .zip(&x)
        .map(|(&rho, &xk)| rho.powf(2.0 - p.alpha()) * xk)
        .collect();
    let mut rate = 1.0;
    if normalize && report.positivity {
        let total: f64 = masses.iter().sum();
        for m in &mut masses {
            *m /= total;
        }
        rate = 1.0 / total;
    }
    let config = RingConfig {
        params: p,
        radii,
        masses,
        origin_mass: 0.0,
        rate: Some(rate),
    };
    Ok((config, report))
}

/// Solve the similarity condition on an arbitrary strictly increasing radius set:
/// sum_j C_{kj} m_j = 1 with C_{kj} = phi(rho_k/rho_j) rho_j^{alpha-1} / rho_k.
/// No positivity is guaranteed outside the large-ratio geometric regime; the
/// report carries the flag.
pub fn solve_general(
    p: KernelParams,
    radii: &[f64],
    cfg: &QuadConfig,
) -> Result<(RingConfig, SolveReport)> {
    let n = radii.len();
    if n == 0 || n > MAX_RINGS {
        return Err(Error::Domain(format!("need 1..={MAX_RINGS} radii, got {n}")));
    }
    let mut prev = 0.0;
    for &r in radii {
        if !r.is_finite() || r <= prev {
            return Err(Error::Domain(
                "radii must be finite, positive, strictly increasing".into(),
            ));
        }
        prev = r;
    }
    let alpha = p.alpha();
    let mut c = vec![vec![0.0; n]; n];
    for (k, row) in c.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell =
                kernel::phi(p, radii[k] / radii[j], cfg)?.value * radii[j].powf(alpha - 1.0) / radii[k];
        }
    }
    let masses = gauss_solve(c.clone(), vec![vec![1.0; n]])?.remove(0);
    let report = report_for(&c, &masses, None);
    let config = RingConfig {
        params: p,
        radii: radii.to_vec(),
        masses,
        origin_mass: 0.0,
        rate: if report.positivity { Some(1.0) } else { None },
    };
    Ok((config, report))
}

/// Worst relative spread of w(rho_k)/rho_k around its mean; zero means the
/// similarity condition holds exactly.
pub fn ratio_residual(config: &RingConfig, cfg: &QuadConfig) -> Result<f64> {
    if config.radii.is_empty() {
        return Err(Error::Domain("ratio_residual needs at least one ring".into()));
    }
    let w = velocities_at_rings(config, cfg)?;
    let ratios: Vec<f64> = w
        .iter()
        .zip(&config.radii)
        .map(|(&wk, &rho)| wk / rho)
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    if mean == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(ratios
        .iter()
        .map(|&q| (q - mean).abs())
        .fold(0.0, f64::max)
        / mean.abs())
}

/// Outcome of the positivity search over the geometric ratio.
#[derive(Clone, Copy, Debug)]
pub struct LambdaSearch {
    /// Bisected boundary (to three digits) below which positivity was lost.
    pub threshold: f64,
    /// The recommended ratio, 2x the threshold, re-verified positive.
    pub lambda: f64,
}

const LAMBDA_CAP: f64 = (1u64 << 60) as f64;

/// Find a geometric ratio at which the solved masses are all positive: double
/// from lambda = 2 until positivity holds, then bisect the bracket down to three
/// digits and return twice the boundary as the working ratio.
pub fn find_lambda(p: KernelParams, n: usize, cfg: &QuadConfig) -> Result<LambdaSearch> {
    if n < 2 {
        return Err(Error::Domain("the lambda search applies to n >= 2 rings".into()));
    }
    if p.regime() != RegimeTag::Subcritical {
        return Err(Error::Regime(format!(
            "the lambda search requires the subcritical regime, got {}",
            p.regime()
        )));
    }
    let positive = |lambda: f64| -> bool {
        solve_geometric(p, n, lambda, false, cfg)
            .map(|(_, rep)| rep.positivity)
            .unwrap_or(false)
    };
    let mut lo = 1.0;
    let mut hi = 2.0;
    while !positive(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > LAMBDA_CAP {
            return Err(Error::SearchFailed(format!(
                "no positive solution found for d = {}, alpha = {}, n = {n} up to lambda = {LAMBDA_CAP:e}",
                p.d(),
                p.alpha()
            )));
        }
    }
    while hi / lo > 1.001 {
        let mid = (lo * hi).sqrt();
        if positive(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let threshold = hi;
    let mut lambda = 2.0 * threshold;
    while !positive(lambda) {
        lambda *= 2.0;
        if lambda > LAMBDA_CAP {
            return Err(Error::SearchFailed(
                "positivity did not persist above the bisected threshold".into(),
            ));
        }
    }
    Ok(LambdaSearch { threshold, lambda })
}

/// Consistency check behind the origin-atom convention: a point mass at the
/// origin moves radius r at speed r^{alpha-1} per unit mass, which must agree
/// with the far-field behavior phi(s)/s^{alpha-1} -> 1 of the ring kernel.
/// Returns the measured deviation at s = 1e3.
pub fn verify_origin_atom_asymptotic(p: KernelParams, cfg: &QuadConfig) -> Result<f64> {
    let s = 1e3;
    let dev = (kernel::phi(p, s, cfg)?.value / s.powf(p.alpha() - 1.0) - 1.0).abs();
    if dev > 1e-3 {
        return Err(Error::Domain(format!(
            "far-field kernel deviates from the origin-atom form by {dev:.3e} at s = {s}"
        )));
    }
    Ok(dev)
}
