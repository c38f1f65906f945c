//! One-dimensional quadrature kernels.
//!
//! Two independent routes are provided on purpose:
//!
//! * [`integrate`] — globally adaptive Gauss–Kronrod (7/15 pair) with
//!   interval bisection, used by the production code paths;
//! * [`composite_gauss`] / [`graded_panels`] — fixed composite
//!   Gauss–Legendre rules, used by oracle-style cross checks that must not
//!   share failure modes with the adaptive route.
//!
//! All kernels are deterministic: no randomization, no time-dependent
//! ordering, and a fixed subdivision strategy.

use crate::error::{Error, Result};

/// Nodes of the 7-point Gauss / 15-point Kronrod pair on [-1, 1]
/// (non-negative half; the rule is symmetric).
const XGK: [f64; 8] = [
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993944,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
    0.0,
];

/// Kronrod weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022935322010529225,
    0.06309209262997855,
    0.10479001032225018,
    0.14065325971552592,
    0.1690047266392679,
    0.19035057806478541,
    0.20443294007529889,
    0.20948214108472783,
];

/// Gauss weights for the embedded 7-point rule (nodes XGK[1], XGK[3], ...).
const WG: [f64; 4] = [
    0.12948496616886969,
    0.27970539148927667,
    0.38183005050511894,
    0.4179591836734694,
];

/// Result of one Gauss–Kronrod application on a single interval.
#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (fl, fr) = if x == 0.0 {
            let v = f(c);
            (v, 0.0)
        } else {
            (f(c - h * x), f(c + h * x))
        };
        let sum = fl + fr;
        kronrod += wk * sum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * sum;
        }
    }
    let value = kronrod * h;
    let error = ((kronrod - gauss) * h).abs();
    Panel { a, b, value, error }
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `abs_tol` or the panel budget is exhausted; in the
/// latter case a [`Error::Numerical`] carrying the best value and the
/// achieved estimate is returned.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    const MAX_PANELS: usize = 20_000;
    let mut panels = vec![gk15(&f, a, b)];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if total_err <= abs_tol {
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        if panels.len() >= MAX_PANELS {
            let value: f64 = panels.iter().map(|p| p.value).sum();
            return Err(Error::Numerical(format!(
                "adaptive quadrature stalled: estimate {value:.15e}, \
                 error estimate {total_err:.3e} > tolerance {abs_tol:.3e}"
            )));
        }
        // Deterministic: split the worst panel (ties broken by position).
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0usize, -1.0f64), |acc, (i, p)| {
                if p.error > acc.1 {
                    (i, p.error)
                } else {
                    acc
                }
            });
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval no longer splittable in f64; accept what we have.
            let value: f64 = panels.iter().map(|p| p.value).sum();
            return Ok(value);
        }
        panels[worst] = gk15(&f, a, mid);
        panels.push(gk15(&f, mid, b));
    }
}

/// Nodes/weights of the 8-point Gauss–Legendre rule on [-1, 1]
/// (non-negative half; symmetric).
const XGL8: [f64; 4] = [
    0.1834346424956498,
    0.525532409916329,
    0.7966664774136267,
    0.9602898564975362,
];
const WGL8: [f64; 4] = [
    0.362683783378362,
    0.31370664587788727,
    0.22238103445337448,
    0.10122853629037626,
];

/// 3-point Gauss–Legendre nodes on [-1, 1] (x = ±√(3/5) and 0).
pub const GL3_NODES: [f64; 3] = [-0.7745966692414834, 0.0, 0.7745966692414834];
/// Weights matching [`GL3_NODES`] (5/9, 8/9, 5/9).
pub const GL3_WEIGHTS: [f64; 3] = [
    0.5555555555555556,
    0.8888888888888889,
    0.5555555555555556,
];

/// Fixed 8-point Gauss–Legendre rule on a single interval.
pub fn gauss8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in XGL8.iter().zip(WGL8.iter()) {
        acc += w * (f(c - h * x) + f(c + h * x));
    }
    acc * h
}

/// Fixed 3-point Gauss–Legendre rule on a single interval.
pub fn gauss3<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in GL3_NODES.iter().zip(GL3_WEIGHTS.iter()) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Composite Gauss–Legendre over an explicit panel decomposition.
///
/// `breaks` must be a strictly increasing sequence of panel boundaries.
pub fn composite_gauss<F: Fn(f64) -> f64>(f: F, breaks: &[f64]) -> f64 {
    breaks
        .windows(2)
        .map(|w| gauss8(&f, w[0], w[1]))
        .sum()
}

/// Uniform panel boundaries: `panels + 1` points spanning `[a, b]`.
pub fn uniform_panels(a: f64, b: f64, panels: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(panels + 1);
    for i in 0..=panels {
        v.push(a + (b - a) * (i as f64) / (panels as f64));
    }
    v
}

/// Panel boundaries geometrically graded towards `b`: the panel adjacent to
/// `b` has width `(b - a) * shrink^(panels-1) / normalizer`.  Used by oracle
/// rules that must resolve an endpoint with a Hölder-type kink.
pub fn graded_panels(a: f64, b: f64, panels: usize, shrink: f64) -> Vec<f64> {
    assert!(panels >= 1 && shrink > 0.0 && shrink < 1.0);
    // Offsets from b: 0, d, d(1+s), d(1+s+s^2), ... scaled to reach a.
    let mut offsets = Vec::with_capacity(panels + 1);
    let mut acc = 0.0;
    let mut step = 1.0;
    offsets.push(0.0);
    for _ in 0..panels {
        acc += step;
        offsets.push(acc);
        step *= 1.0 / shrink;
    }
    let scale = (b - a) / acc;
    let mut v: Vec<f64> = offsets.iter().map(|o| b - o * scale).collect();
    v.reverse();
    v[0] = a;
    let last = v.len() - 1;
    v[last] = b;
    v
}
