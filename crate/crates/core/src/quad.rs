//! Globally adaptive Gauss-Legendre quadrature.
//!
//! Each panel is integrated with a fixed 20-point Gauss-Legendre rule; the error
//! estimate is the difference between the single-panel value and the sum over its
//! two halves. A worst-panel-first heap drives bisection until the summed error
//! estimates fall under the requested absolute tolerance (or under the roundoff
//! floor of the accumulated values, whichever is larger). Nodes are strictly
//! interior, so integrable endpoint singularities need no special transform; the
//! bisection simply grades itself into them.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_PANEL_CAP: usize = 1 << 14;

/// Tolerance and work-cap knobs shared by every quadrature call.
#[derive(Clone, Copy, Debug)]
pub struct QuadConfig {
    /// Target absolute error for the whole integral.
    pub abs_tol: f64,
    /// Maximum number of accepted panels before giving up.
    pub panel_cap: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: DEFAULT_ABS_TOL,
            panel_cap: DEFAULT_PANEL_CAP,
        }
    }
}

/// Value of a definite integral together with its error estimate and cost.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub panels_used: usize,
}

const GL_ORDER: usize = 20;

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gl_rule() -> &'static [(f64, f64); GL_ORDER] {
    static RULE: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut rule = [(0.0, 0.0); GL_ORDER];
        let n = GL_ORDER as f64;
        for (k, slot) in rule.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n + 0.5)).cos();
            for _ in 0..64 {
                let (p, dp) = legendre(GL_ORDER, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(GL_ORDER, x);
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

fn gl_sum<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in gl_rule() {
        acc += w * f(mid + half * x);
    }
    half * acc
}

struct Panel {
    a: f64,
    b: f64,
    /// Two-half refinement of this panel; used as its value.
    value: f64,
    /// |single-panel estimate - two-half estimate|.
    err: f64,
    left: f64,
    right: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, coarse: f64) -> Self {
        let m = 0.5 * (a + b);
        let left = gl_sum(f, a, m);
        let right = gl_sum(f, m, b);
        Panel {
            a,
            b,
            value: left + right,
            err: (coarse - left - right).abs(),
            left,
            right,
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadratureResult> {
    integrate_seeded(f, &[a, b], cfg)
}

/// Integrate `f` over `[pts[0], pts[last]]` starting from the given panel
/// boundaries. Seeding a geometric ladder of breakpoints toward a difficult
/// endpoint saves the heap a few dozen rounds of rediscovery.
pub fn integrate_seeded<F: Fn(f64) -> f64>(
    f: F,
    pts: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadratureResult> {
    assert!(pts.len() >= 2, "need at least one seed panel");
    let mut heap = BinaryHeap::new();
    for w in pts.windows(2) {
        let coarse = gl_sum(&f, w[0], w[1]);
        heap.push(Panel::new(&f, w[0], w[1], coarse));
    }

    let mut total_err: f64 = heap.iter().map(|p| p.err).sum();
    let mut l1: f64 = heap.iter().map(|p| p.value.abs()).sum();

    loop {
        let floor = 64.0 * f64::EPSILON * l1;
        if total_err <= cfg.abs_tol.max(floor) {
            break;
        }
        if heap.len() >= cfg.panel_cap {
            let (value, err) = tally(&heap);
            return Err(Error::QuadratureNonConvergence {
                value,
                error: err,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap never empty here");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Panel is at floating-point resolution; keep its estimate as is.
            total_err -= worst.err;
            let mut spent = worst;
            spent.err = 0.0;
            heap.push(spent);
            continue;
        }
        let c1 = Panel::new(&f, worst.a, m, worst.left);
        let c2 = Panel::new(&f, m, worst.b, worst.right);
        total_err += c1.err + c2.err - worst.err;
        l1 += c1.value.abs() + c2.value.abs() - worst.value.abs();
        heap.push(c1);
        heap.push(c2);
    }

    let (value, err) = tally(&heap);
    if !value.is_finite() {
        return Err(Error::Domain(
            "integrand produced a non-finite value".into(),
        ));
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate: err,
        panels_used: heap.len(),
    })
}

fn tally(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut value = 0.0;
    let mut err = 0.0;
    for p in heap {
        value += p.value;
        err += p.err;
    }
    (value, err)
}
