//! Time integration of the radial ring dynamics d rho_k/dt = -w(rho_k).
//!
//! The stepper is a Dormand-Prince 5(4) embedded pair with error-per-step
//! control. Two extra guards handle the collapse: the step is clamped to a
//! quarter of the linear time-to-origin estimate of the fastest ring (the speed
//! w ~ rho^{alpha-1} blows up as rho -> 0 when alpha < 1), and any stage that
//! drives a radius nonpositive or out of order rejects the step outright.
//!
//! Events are resolved after each accepted step: a ring whose radius falls below
//! the absorption threshold transfers its mass to the origin atom, and adjacent
//! rings closer than the merge threshold coalesce at their mass-weighted mean
//! radius. Masses are only ever moved, never rescaled, so the total is conserved
//! to the roundoff of the individual transfers.

use thiserror::Error;

use crate::error::{Error as CoreError, Result};
use crate::params::KernelParams;
use crate::quad::QuadConfig;
use crate::rings::{self, RingConfig};
use crate::special::sphere_area;

/// Integrator knobs.
#[derive(Clone, Copy, Debug)]
pub struct IntegrateOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Absorption threshold, relative to the initial outermost radius.
    pub eps_absorb: f64,
    /// Merge threshold on the relative gap of adjacent rings.
    pub eps_merge: f64,
    /// Cap on attempted steps.
    pub max_steps: usize,
    /// Cap on recorded snapshots (thinned by stride doubling once full). The
    /// effective cap also shrinks for many-ring systems to bound memory.
    pub max_recorded: usize,
    pub quad: QuadConfig,
}

impl Default for IntegrateOpts {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            eps_absorb: 1e-8,
            eps_merge: 1e-9,
            max_steps: 2_000_000,
            max_recorded: 4096,
            quad: QuadConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    /// Rings at positions i and i+1 merged.
    Merge { i: usize, j: usize },
    /// Ring at position i fell below the absorption threshold.
    Absorb { i: usize },
}

#[derive(Clone, Debug)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub detail: String,
}

/// Time-stamped sequence of configurations with the event log.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub params: KernelParams,
    pub times: Vec<f64>,
    pub states: Vec<RingConfig>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn initial(&self) -> &RingConfig {
        &self.states[0]
    }

    pub fn last(&self) -> &RingConfig {
        self.states.last().expect("trajectory never empty")
    }

    /// Time of the last absorption if every ring reached the origin.
    pub fn collapse_time(&self) -> Option<f64> {
        if self.last().radii.is_empty() {
            self.events
                .iter()
                .rev()
                .find(|e| matches!(e.kind, EventKind::Absorb { .. }))
                .map(|e| e.time)
        } else {
            None
        }
    }
}

#[derive(Debug, Error)]
#[error("integration failed at t = {t}: {reason}")]
pub struct IntegrationError {
    pub t: f64,
    pub reason: String,
    /// Whatever was integrated before the failure.
    pub partial: Trajectory,
}

/// Right-hand side (-w(rho_1), ..., -w(rho_n)) of the ring ODE.
pub fn rhs(config: &RingConfig, cfg: &QuadConfig) -> Result<Vec<f64>> {
    let w = rings::velocities_at_rings(config, cfg)?;
    Ok(w.into_iter().map(|v| -v).collect())
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const ERR: [f64; 7] = [
    71.0 / 57_600.0,
    0.0,
    -71.0 / 16_695.0,
    71.0 / 1_920.0,
    -17_253.0 / 339_200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Sim {
    params: KernelParams,
    radii: Vec<f64>,
    masses: Vec<f64>,
    origin: f64,
    quad: QuadConfig,
}

impl Sim {
    fn snapshot(&self, rate: Option<f64>) -> RingConfig {
        RingConfig {
            params: self.params,
            radii: self.radii.clone(),
            masses: self.masses.clone(),
            origin_mass: self.origin,
            rate,
        }
    }

    fn feasible(radii: &[f64]) -> bool {
        let mut prev = 0.0;
        for &r in radii {
            if !(r > prev) || !r.is_finite() {
                return false;
            }
            prev = r;
        }
        true
    }

    fn velocities(&self, radii: &[f64]) -> Result<Vec<f64>> {
        rings::velocities_raw(self.params, radii, &self.masses, self.origin, &self.quad)
    }

    /// One Dormand-Prince attempt. Returns the proposed state and error norm,
    /// or None when a stage leaves the feasible region.
    fn try_step(&self, h: f64, k1: &[f64], opts: &IntegrateOpts) -> Result<Option<(Vec<f64>, f64)>> {
        let n = self.radii.len();
        let mut k = vec![k1.to_vec()];
        let mut stage = vec![0.0; n];
        for s in 0..6 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    acc += A[s][j] * kj[i];
                }
                stage[i] = self.radii[i] + h * acc;
            }
            if !Self::feasible(&stage) {
                return Ok(None);
            }
            let w = self.velocities(&stage)?;
            k.push(w.into_iter().map(|v| -v).collect());
        }
        // Stage 6 used B5 coefficients, so `stage` already holds the 5th-order solution.
        let y5 = stage.clone();
        debug_assert_eq!(A[5][..], B5[..6]);
        let mut err_norm_sq = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += ERR[j] * kj[i];
            }
            e *= h;
            let scale = opts.abs_tol + opts.rel_tol * self.radii[i].abs().max(y5[i].abs());
            err_norm_sq += (e / scale) * (e / scale);
        }
        let err_norm = (err_norm_sq / n as f64).sqrt();
        Ok(Some((y5, err_norm)))
    }
}

/// Integrate the ring dynamics from `config` up to `t_end`, or until all mass
/// sits at the origin.
pub fn integrate(
    config: &RingConfig,
    t_end: f64,
    opts: &IntegrateOpts,
) -> std::result::Result<Trajectory, Box<IntegrationError>> {
    let fail = |t: f64, reason: String, traj: Trajectory| {
        Box::new(IntegrationError {
            t,
            reason,
            partial: traj,
        })
    };

    let mut traj = Trajectory {
        params: config.params,
        times: Vec::new(),
        states: Vec::new(),
        events: Vec::new(),
    };
    if let Err(e) = config.validate() {
        return Err(fail(0.0, e.to_string(), traj));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(fail(0.0, format!("t_end must be > 0, got {t_end}"), traj));
    }
    // The origin-atom representation must match the far field of the kernel
    // before any absorbed mass is allowed to act through it.
    if let Err(e) = rings::verify_origin_atom_asymptotic(config.params, &opts.quad) {
        return Err(fail(0.0, e.to_string(), traj));
    }

    let mut sim = Sim {
        params: config.params,
        radii: config.radii.clone(),
        masses: config.masses.clone(),
        origin: config.origin_mass,
        quad: opts.quad,
    };
    let absorb_below = opts.eps_absorb * config.radii.last().copied().unwrap_or(0.0);
    let record_cap = opts
        .max_recorded
        .min((2_000_000 / (sim.radii.len() + 1)).max(64));

    // Events that the initial data already triggers resolve at t = 0, before the
    // first snapshot, so recorded times stay strictly increasing.
    resolve_events(&mut sim, &mut traj.events, 0.0, absorb_below, opts.eps_merge);
    traj.times.push(0.0);
    traj.states.push(sim.snapshot(config.rate));

    let mut t = 0.0;
    let mut stride = 1usize;
    let mut steps_since_record = 0usize;
    let mut h_ctrl = f64::INFINITY;
    let mut attempts = 0usize;

    'steps: while !sim.radii.is_empty() && t < t_end {
        let w = match sim.velocities(&sim.radii) {
            Ok(w) => w,
            Err(e) => return Err(fail(t, e.to_string(), traj)),
        };
        let min_linear_time = sim
            .radii
            .iter()
            .zip(&w)
            .map(|(&r, &wk)| r / wk)
            .fold(f64::INFINITY, f64::min);
        if !(min_linear_time > 0.0) {
            return Err(fail(t, "nonpositive velocity scale".into(), traj));
        }
        if !h_ctrl.is_finite() {
            h_ctrl = 0.01 * min_linear_time;
        }
        let mut h = h_ctrl.min(0.25 * min_linear_time).min(t_end - t);
        let k1: Vec<f64> = w.iter().map(|&v| -v).collect();
        let h_floor = f64::EPSILON * t.abs().max(min_linear_time) * 16.0;
        if t_end - t <= h_floor {
            break;
        }

        let accepted = loop {
            attempts += 1;
            if attempts > opts.max_steps {
                return Err(fail(t, format!("step cap {} exceeded", opts.max_steps), traj));
            }
            if h < h_floor {
                // Near total collapse the speeds diverge and the remaining
                // travel time of the innermost ring can drop below what f64
                // time arithmetic resolves; no step size can thread between
                // consecutive absorptions there. Absorb that ring at the
                // current time (the timing error is below one ulp of t) and
                // keep going. Anything else is a genuine underflow.
                let (idx, t_min) = sim
                    .radii
                    .iter()
                    .zip(&w)
                    .map(|(&r, &wk)| r / wk)
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("rings nonempty");
                if t_min <= 4.0 * h_floor {
                    let m = sim.masses.remove(idx);
                    let r = sim.radii.remove(idx);
                    sim.origin += m;
                    traj.events.push(Event {
                        time: t,
                        kind: EventKind::Absorb { i: idx },
                        detail: format!(
                            "ring {idx} (radius {r:e}, mass {m:e}) absorbed; remaining travel \
                             time {t_min:e} is below the time resolution"
                        ),
                    });
                    continue 'steps;
                }
                return Err(fail(
                    t,
                    format!("step size underflow (h = {h:e}) before an event resolved"),
                    traj,
                ));
            }
            match sim.try_step(h, &k1, opts) {
                Err(e) => return Err(fail(t, e.to_string(), traj)),
                Ok(None) => {
                    h *= 0.5;
                }
                Ok(Some((y5, err_norm))) => {
                    if err_norm <= 1.0 {
                        let grow = if err_norm == 0.0 {
                            5.0
                        } else {
                            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
                        };
                        h_ctrl = h * grow;
                        break (y5, h);
                    }
                    h *= (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9);
                }
            }
        };

        sim.radii = accepted.0;
        t += accepted.1;

        let had_events = resolve_events(&mut sim, &mut traj.events, t, absorb_below, opts.eps_merge);

        steps_since_record += 1;
        if steps_since_record >= stride || had_events || sim.radii.is_empty() || t >= t_end {
            steps_since_record = 0;
            traj.times.push(t);
            traj.states.push(sim.snapshot(None));
            if traj.states.len() > record_cap {
                thin(&mut traj.times, &mut traj.states);
                stride *= 2;
            }
        }
    }

    // Final state. Forced absorptions can resolve without advancing t, in which
    // case the last snapshot is refreshed in place to keep times strictly
    // increasing.
    let last = traj.times.len() - 1;
    if traj.times[last] == t {
        let rate = if last == 0 { config.rate } else { None };
        traj.states[last] = sim.snapshot(rate);
    } else {
        traj.times.push(t);
        traj.states.push(sim.snapshot(None));
    }
    Ok(traj)
}

/// Keep every other interior snapshot (endpoints stay).
fn thin(times: &mut Vec<f64>, states: &mut Vec<RingConfig>) {
    let n = times.len();
    let keep = |i: usize| i == 0 || i == n - 1 || i % 2 == 0;
    let mut idx = 0;
    times.retain(|_| {
        let k = keep(idx);
        idx += 1;
        k
    });
    idx = 0;
    states.retain(|_| {
        let k = keep(idx);
        idx += 1;
        k
    });
}

/// Apply absorptions and merges at time t. Returns whether anything fired.
fn resolve_events(
    sim: &mut Sim,
    events: &mut Vec<Event>,
    t: f64,
    absorb_below: f64,
    eps_merge: f64,
) -> bool {
    let mut fired = false;
    // Absorptions, innermost first.
    while let Some(i) = sim.radii.iter().position(|&r| r < absorb_below) {
        let m = sim.masses.remove(i);
        let r = sim.radii.remove(i);
        sim.origin += m;
        events.push(Event {
            time: t,
            kind: EventKind::Absorb { i },
            detail: format!("ring {i} (radius {r:e}, mass {m:e}) absorbed into the origin atom"),
        });
        fired = true;
    }
    // Merges, re-scanning after each coalescence.
    loop {
        let mut merged = false;
        for i in 0..sim.radii.len().saturating_sub(1) {
            let (lo, hi) = (sim.radii[i], sim.radii[i + 1]);
            if hi - lo < eps_merge * hi {
                let (m1, m2) = (sim.masses[i], sim.masses[i + 1]);
                let m = m1 + m2;
                let r = (m1 * lo + m2 * hi) / m;
                sim.radii[i] = r;
                sim.masses[i] = m;
                sim.radii.remove(i + 1);
                sim.masses.remove(i + 1);
                events.push(Event {
                    time: t,
                    kind: EventKind::Merge { i, j: i + 1 },
                    detail: format!(
                        "rings {i} and {} merged at mass-weighted radius {r:e} (mass {m:e})",
                        i + 1
                    ),
                });
                merged = true;
                fired = true;
                break;
            }
        }
        if !merged {
            break;
        }
    }
    fired
}

/// Fit of a trajectory against the exact homothetic collapse law
/// R(t) = (1 - t/T0)^{1/(2-alpha)} with T0 = 1/((2-alpha) lambda).
#[derive(Clone, Copy, Debug)]
pub struct CollapseFit {
    /// Contraction rate read off the initial state: w(rho_1)/rho_1.
    pub lambda_fit: f64,
    /// Predicted blow-up time.
    pub t0: f64,
    /// sup over stored pre-event times and rings of |rho_k(t)/rho_k(0) - R(t)|.
    pub max_profile_error: f64,
    /// Time of the last absorption, when everything collapsed.
    pub blowup_time_observed: Option<f64>,
}

/// Requires the initial state to satisfy the similarity condition to 1e-6;
/// check `ratio_residual` first.
pub fn collapse_fit(traj: &Trajectory, cfg: &QuadConfig) -> Result<CollapseFit> {
    let initial = traj.initial();
    if initial.radii.is_empty() {
        return Err(CoreError::Domain("trajectory has no rings".into()));
    }
    let residual = rings::ratio_residual(initial, cfg)?;
    if !(residual < 1e-6) {
        return Err(CoreError::Regime(format!(
            "collapse_fit requires a similarity configuration (ratio_residual < 1e-6, got {residual:.3e}); \
             run ratio_residual first"
        )));
    }
    let rho1 = initial.radii[0];
    let lambda_fit = rings::velocity_w(initial, rho1, cfg)? / rho1;
    let two_minus_alpha = 2.0 - initial.params.alpha();
    let t0 = 1.0 / (two_minus_alpha * lambda_fit);

    let first_event = traj
        .events
        .first()
        .map(|e| e.time)
        .unwrap_or(f64::INFINITY);
    let mut max_err: f64 = 0.0;
    for (&t, state) in traj.times.iter().zip(&traj.states) {
        if t >= first_event {
            break;
        }
        let r_law = (1.0 - t / t0).max(0.0).powf(1.0 / two_minus_alpha);
        for (&rho, &rho0) in state.radii.iter().zip(&initial.radii) {
            max_err = max_err.max((rho / rho0 - r_law).abs());
        }
    }
    Ok(CollapseFit {
        lambda_fit,
        t0,
        max_profile_error: max_err,
        blowup_time_observed: traj.collapse_time(),
    })
}

/// Discretize the density-one unit ball into `m` shells of equal width: ring i
/// sits at the mass centroid of shell ((i-1)/m, i/m] and carries its exact mass
/// (omega_d/d) ((i/m)^d - ((i-1)/m)^d). Total mass is omega_d/d, the density-one
/// normalization under which the ball contracts at rate omega_d/d and collapses
/// at time 1/omega_d. Forces alpha = 2-d.
pub fn discretize_ball(d: u32, m: usize) -> Result<RingConfig> {
    if d < 2 {
        return Err(CoreError::Domain("the ball example requires d >= 2".into()));
    }
    if m == 0 {
        return Err(CoreError::Domain("need at least one shell".into()));
    }
    let params = KernelParams::new(d, 2.0 - f64::from(d))?;
    let omega = sphere_area(d)?;
    let df = f64::from(d);
    let scale = omega / df;
    let mf = m as f64;

    let mut radii = Vec::with_capacity(m);
    let mut masses = Vec::with_capacity(m);
    let mut prev_pow_d = 0.0;
    let mut prev_pow_d1 = 0.0;
    for i in 1..=m {
        let b = i as f64 / mf;
        let pow_d = b.powi(d as i32);
        let pow_d1 = b.powi(d as i32 + 1);
        // Centroid of the shell under the surface measure r^{d-1} dr.
        radii.push(df / (df + 1.0) * (pow_d1 - prev_pow_d1) / (pow_d - prev_pow_d));
        masses.push(scale * (pow_d - prev_pow_d));
        prev_pow_d = pow_d;
        prev_pow_d1 = pow_d1;
    }
    Ok(RingConfig {
        params,
        radii,
        masses,
        origin_mass: 0.0,
        rate: Some(scale),
    })
}
