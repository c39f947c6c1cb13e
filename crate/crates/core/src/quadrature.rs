//! One-dimensional quadrature rules shared by the extinction and
//! transmittance integrals.
//!
//! Two integrators are provided:
//!
//! * [`GaussLegendre`]: an n-point rule with composite (panelled) use and a
//!   panel-doubling driver, [`composite_until`].
//! * [`adaptive`]: globally adaptive Gauss–Kronrod (G7/K15) bisection that
//!   starts from caller-supplied breakpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]` with a single application of the rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }

    /// Integrates `f` over `[a, b]` split into `panels` equal sub-intervals.
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| {
                let lo = a + h * i as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }

    /// Maps the rule onto `[a, b]`, yielding `(abscissa, weight)` pairs.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let (pn, pn1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
    let dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
    (pn, dp)
}

/// Shared rule instances, built on first use.
pub fn rule(n: usize) -> &'static GaussLegendre {
    static R16: OnceLock<GaussLegendre> = OnceLock::new();
    static R32: OnceLock<GaussLegendre> = OnceLock::new();
    static R64: OnceLock<GaussLegendre> = OnceLock::new();
    static R128: OnceLock<GaussLegendre> = OnceLock::new();
    match n {
        16 => R16.get_or_init(|| GaussLegendre::new(16)),
        32 => R32.get_or_init(|| GaussLegendre::new(32)),
        64 => R64.get_or_init(|| GaussLegendre::new(64)),
        128 => R128.get_or_init(|| GaussLegendre::new(128)),
        _ => panic!("no shared Gauss-Legendre rule of order {n}"),
    }
}

/// Result of a converged quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Composite Gauss–Legendre integration, doubling the panel count until two
/// successive estimates agree to `rel_tol` (or `abs_tol`).
pub fn composite_until<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
    mut f: F,
) -> Result<Estimate> {
    let mut panels = 1;
    let mut previous = rule.composite(a, b, panels, &mut f);
    let mut evaluations = rule.order();
    loop {
        panels *= 2;
        let current = rule.composite(a, b, panels, &mut f);
        evaluations += rule.order() * panels;
        let error = (current - previous).abs();
        if error <= abs_tol.max(rel_tol * current.abs()) {
            return Ok(Estimate {
                value: current,
                error,
                evaluations,
            });
        }
        if panels >= max_panels {
            return Err(Error::QuadratureFailure {
                estimate: current,
                error,
                tolerance: abs_tol.max(rel_tol * current.abs()),
            });
        }
        previous = current;
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive G7/K15 integration over consecutive `breakpoints`.
///
/// The worst segment is bisected until the summed error estimate falls
/// below `max(abs_tol, rel_tol * |value|)`. Breakpoints must be sorted; at
/// least two are required.
pub fn adaptive<F: FnMut(f64) -> f64>(
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_segments: usize,
    mut f: F,
) -> Result<Estimate> {
    debug_assert!(breakpoints.len() >= 2);
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(w[0], w[1], &mut f);
        evaluations += 15;
        value += v;
        error += e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    while error > abs_tol.max(rel_tol * value.abs()) {
        if heap.len() >= max_segments {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                tolerance: abs_tol.max(rel_tol * value.abs()),
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(worst.a, mid, &mut f);
        let (v2, e2) = gk15(mid, worst.b, &mut f);
        evaluations += 30;
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift from incremental updates.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 16, 64, 128] {
            let r = GaussLegendre::new(n);
            assert_relative_eq!(r.weights().iter().sum::<f64>(), 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        // An n-point rule integrates degree 2n-1 exactly.
        let r = GaussLegendre::new(5);
        let v = r.integrate(0.0, 2.0, |x| x.powi(9));
        assert_relative_eq!(v, 2f64.powi(10) / 10.0, max_relative = 1e-13);
    }

    #[test]
    fn known_three_point_nodes() {
        let r = GaussLegendre::new(3);
        assert_relative_eq!(r.nodes()[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(r.weights()[1], 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn composite_until_converges_on_exponential() {
        let est = composite_until(rule(16), 0.0, 3.0, 1e-12, 0.0, 1 << 10, |x| (-x).exp()).unwrap();
        assert_relative_eq!(est.value, 1.0 - (-3.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn adaptive_handles_narrow_peak() {
        let s = 1e-4;
        let est = adaptive(&[-1.0, 0.3 - 8.0 * s, 0.3 + 8.0 * s, 1.0], 1e-10, 0.0, 500, |x| {
            (-(x - 0.3) * (x - 0.3) / (2.0 * s * s)).exp()
        })
        .unwrap();
        let exact = s * (2.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(est.value, exact, max_relative = 1e-9);
    }

    #[test]
    fn adaptive_reports_failure() {
        let err = adaptive(&[0.0, 1.0], 1e-14, 0.0, 2, |x| x.sqrt().sin() / x.max(1e-300))
            .unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }
}
