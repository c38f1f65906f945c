//! The optimal one-dimensional transition profile between the wells.
//!
//! The profile z solves z′(t) = √(W(z(t))), z(0) = 0, rises strictly from -1
//! to 1 on (-τ_W, τ_W), and saturates exactly beyond (finite-time saturation
//! is the point of the sub-quadratic wells, β < 2).  The ODE is singular at
//! the wells (√W is not Lipschitz there), so instead of time-stepping the
//! module tabulates the *inverse* map
//!
//!   t(z) = ∫_0^z W(s)^{-1/2} ds
//!
//! on a graded grid — uniform in z across the bridge, uniform in the
//! regularizing variable u = (1-z)^{(2-β)/2} across the well window, where
//! the substitution makes t affine in u and removes the endpoint singularity
//! exactly.  The forward map z(t) is the bisection inverse of the monotone
//! cubic interpolant of that table, which keeps z strictly inside [-1, 1] by
//! construction; z′ is evaluated through the ODE identity √(W(z)).
//!
//! A fixed Gauss–Legendre sample set aligned with the table knots is
//! precomputed once, so every layer integral ∫ f(t, z(t)) dt downstream is a
//! deterministic weighted sum.  `verify_minimality` re-derives the profile's
//! optimality from scratch: a piecewise-linear finite-element minimization of
//! the same energy with only the pinning w(0) = 0, solved by a damped Newton
//! method that never touches the tabulated profile.

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::potential::DoubleWell;
use crate::quad;
use crate::tridiag::SymTridiagonal;

/// Table intervals across the bridge |z| ≤ 1-a (uniform in z).
pub const TABLE_BRIDGE_INTERVALS: usize = 1 << 10;
/// Table intervals across the well window (uniform in u = (1-z)^{(2-β)/2});
/// the window carries more knots because the interpolation error peaks where
/// the window meets the bridge.
pub const TABLE_WINDOW_INTERVALS: usize = 3 << 10;

/// Tabulated optimal transition profile; immutable after construction.
#[derive(Clone, Debug)]
pub struct TransitionProfile {
    well: DoubleWell,
    /// Monotone cubic interpolant of z ↦ t(z) on [0, 1].
    inverse: MonotoneCubic,
    tau: f64,
    /// Gauss–Legendre samples of the layer (-τ, τ): abscissae, profile
    /// values, and weights, aligned with the table knots.
    quad_t: Vec<f64>,
    quad_z: Vec<f64>,
    quad_w: Vec<f64>,
    /// Cached ∫_{-τ}^{τ} (W(z) + |z′|²) dt.
    energy: f64,
}

/// Outcome of the independent finite-element minimality check.
#[derive(Clone, Copy, Debug)]
pub struct MinimalityReport {
    /// Minimum of the discretized energy over piecewise-linear fields with
    /// w(0) = 0.
    pub discrete_minimum: f64,
    /// Sup-distance of the discrete minimizer to the tabulated profile.
    pub sup_distance: f64,
    /// Newton iterations used.
    pub iterations: usize,
}

/// Result of [`pinned_line_minimum`].
#[derive(Clone, Debug)]
pub struct LineMinimum {
    /// Node abscissae.
    pub nodes: Vec<f64>,
    /// Minimizing nodal values.
    pub values: Vec<f64>,
    /// Minimal discrete energy.
    pub energy: f64,
    /// Newton iterations used.
    pub iterations: usize,
}

impl TransitionProfile {
    /// Tabulates the profile for the given potential.
    pub fn new(well: &DoubleWell) -> Result<Self> {
        let a = well.a();
        let beta = well.beta();
        let tau = well.tau_w();
        let (c0, c2) = well.bridge_coefficients();
        let bridge = move |s: f64| c0 + c2 * s.powi(4);

        let nb = TABLE_BRIDGE_INTERVALS;
        let nw = TABLE_WINDOW_INTERVALS;
        let mut zs: Vec<f64> = Vec::with_capacity(nb + nw + 1);
        let mut ts: Vec<f64> = Vec::with_capacity(nb + nw + 1);
        zs.push(0.0);
        ts.push(0.0);
        // Bridge: cumulative adaptive quadrature of W^{-1/2}, one smooth
        // panel per knot interval.
        let mut t_acc = 0.0;
        for j in 1..=nb {
            let z0 = (1.0 - a) * (j - 1) as f64 / nb as f64;
            let z1 = (1.0 - a) * j as f64 / nb as f64;
            t_acc += quad::integrate(|s| 1.0 / bridge(s).sqrt(), z0, z1, 1e-14)?;
            zs.push(z1);
            ts.push(t_acc);
        }
        // Window: t(z) = τ - (2/(2-β)) u with u = (1-z)^{(2-β)/2}, exact.
        let u_a = a.powf(0.5 * (2.0 - beta));
        let scale = 2.0 / (2.0 - beta);
        for j in 1..nw {
            let u = u_a * (1.0 - j as f64 / nw as f64);
            let z = 1.0 - u.powf(scale);
            // Knots this close to the well can collide in double precision
            // when β is close to 2; drop the duplicates.
            if z <= *zs.last().unwrap() || z >= 1.0 {
                continue;
            }
            zs.push(z);
            ts.push(tau - scale * u);
        }
        zs.push(1.0);
        ts.push(tau);
        let inverse = MonotoneCubic::new(zs, ts).map_err(|e| {
            Error::Numerical(format!("profile table is not strictly monotone: {e}"))
        })?;

        let mut profile = Self {
            well: well.clone(),
            inverse,
            tau,
            quad_t: Vec::new(),
            quad_z: Vec::new(),
            quad_w: Vec::new(),
            energy: 0.0,
        };
        profile.build_quadrature();
        profile.energy = profile.layer_integral(|_, z| 2.0 * profile.well.value(z));
        Ok(profile)
    }

    /// Precomputes Gauss–Legendre samples on (-τ, τ) aligned with the table
    /// knots; the negative half mirrors the positive one by oddness.
    fn build_quadrature(&mut self) {
        let knots_t = {
            // Knot abscissae in t are the tabulated values of the inverse.
            self.inverse.values().to_vec()
        };
        let count = knots_t.len() - 1;
        let mut t_half = Vec::with_capacity(3 * count);
        let mut z_half = Vec::with_capacity(3 * count);
        let mut w_half = Vec::with_capacity(3 * count);
        for i in 0..count {
            let (t0, t1) = (knots_t[i], knots_t[i + 1]);
            let mid = 0.5 * (t0 + t1);
            let half = 0.5 * (t1 - t0);
            for (x, w) in quad::GL3_NODES.iter().zip(quad::GL3_WEIGHTS) {
                let t = mid + half * x;
                t_half.push(t);
                z_half.push(self.eval(t));
                w_half.push(half * w);
            }
        }
        let m = t_half.len();
        self.quad_t = Vec::with_capacity(2 * m);
        self.quad_z = Vec::with_capacity(2 * m);
        self.quad_w = Vec::with_capacity(2 * m);
        for i in (0..m).rev() {
            self.quad_t.push(-t_half[i]);
            self.quad_z.push(-z_half[i]);
            self.quad_w.push(w_half[i]);
        }
        self.quad_t.extend_from_slice(&t_half);
        self.quad_z.extend_from_slice(&z_half);
        self.quad_w.extend_from_slice(&w_half);
    }

    /// The potential this profile transitions across.
    pub fn well(&self) -> &DoubleWell {
        &self.well
    }

    /// Saturation time τ_W: z(±τ_W) = ±1.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// z(t); odd, strictly increasing on (-τ, τ), exactly ±1 beyond.
    pub fn eval(&self, t: f64) -> f64 {
        let sign = if t < 0.0 { -1.0 } else { 1.0 };
        let ta = t.abs();
        if ta >= self.tau {
            return sign;
        }
        if ta == 0.0 {
            return 0.0;
        }
        // Bisection on the monotone inverse table: find z with t(z) = ta.
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.inverse.eval(mid) < ta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        sign * 0.5 * (lo + hi)
    }

    /// z′(t) through the defining identity √(W(z(t))); zero beyond ±τ.
    pub fn slope(&self, t: f64) -> f64 {
        if t.abs() >= self.tau {
            return 0.0;
        }
        self.well.value(self.eval(t)).sqrt()
    }

    /// t(z) for z ∈ [-1, 1]: the tabulated inverse, odd-extended.
    pub fn time_of(&self, z: f64) -> Result<f64> {
        if !(z.is_finite() && (-1.0..=1.0).contains(&z)) {
            return Err(Error::Domain(format!(
                "profile values live in [-1, 1], got {z}"
            )));
        }
        let sign = if z < 0.0 { -1.0 } else { 1.0 };
        Ok(sign * self.inverse.eval(z.abs()))
    }

    /// ∫_{-τ}^{τ} (W(z) + |z′|²) dt; by equipartition the integrand is
    /// 2 W(z(t)).
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// ∫_{-b}^{b} (W(z) + |z′|²) dt for b ≥ τ.  The integrand vanishes
    /// identically beyond the saturation time (W(±1) = 0 exactly), so the
    /// value does not depend on b.
    pub fn energy_on(&self, b: f64) -> Result<f64> {
        if !(b.is_finite() && b >= self.tau) {
            return Err(Error::Domain(format!(
                "integration half-width must be >= tau = {}, got {b}",
                self.tau
            )));
        }
        Ok(self.energy)
    }

    /// ∫_{-τ}^{τ} W(z(t)) dt = c_W/2; equals the kinetic half ∫ |z′|² dt
    /// through the ODE identity.
    pub fn potential_half(&self) -> f64 {
        self.layer_integral(|_, z| self.well.value(z))
    }

    /// ∫_{-τ}^{τ} f(t, z(t)) dt on the precomputed knot-aligned samples.
    pub fn layer_integral<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.quad_t.len() {
            acc += self.quad_w[i] * f(self.quad_t[i], self.quad_z[i]);
        }
        acc
    }

    /// |central difference of z at t − √(W(z(t)))|: the ODE residual of the
    /// tabulated profile at step h.
    pub fn ode_residual(&self, t: f64, h: f64) -> f64 {
        let fd = (self.eval(t + h) - self.eval(t - h)) / (2.0 * h);
        (fd - self.slope(t)).abs()
    }

    /// Independent minimality check: minimizes the piecewise-linear discrete
    /// energy on (-b, b) with `intervals` elements and the single constraint
    /// w(0) = 0, starting from a tanh ramp, and compares with the profile.
    pub fn verify_minimality(&self, b: f64, intervals: usize) -> Result<MinimalityReport> {
        if !(b.is_finite() && b >= self.tau) {
            return Err(Error::Domain(format!(
                "minimality window must contain the support: b >= {}, got {b}",
                self.tau
            )));
        }
        let well = self.well.clone();
        let minimum = pinned_line_minimum(
            |s| well.value(s),
            |s| well.derivative(s),
            |s| well.second_derivative(s),
            b,
            intervals,
            |x| x.tanh(),
        )?;
        let sup_distance = minimum
            .nodes
            .iter()
            .zip(&minimum.values)
            .map(|(x, v)| (v - self.eval(*x)).abs())
            .fold(0.0, f64::max);
        Ok(MinimalityReport {
            discrete_minimum: minimum.energy,
            sup_distance,
            iterations: minimum.iterations,
        })
    }
}

/// Minimizes the discrete energy
///
///   Σ_i wt_i V(w_i) + Σ_cells (w_{i+1} - w_i)²/h
///
/// over piecewise-linear fields on (-half_width, half_width) with the single
/// pin w(0) = 0 and free endpoint values, by a damped (Levenberg-shifted)
/// Newton method with nodal clamping to [-1, 1].  `value`/`deriv`/`second`
/// are the potential and its derivatives; `intervals` must be even so a node
/// sits at 0.
pub fn pinned_line_minimum<V, D, S, I>(
    value: V,
    deriv: D,
    second: S,
    half_width: f64,
    intervals: usize,
    init: I,
) -> Result<LineMinimum>
where
    V: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
    S: Fn(f64) -> f64,
    I: Fn(f64) -> f64,
{
    if intervals < 64 || intervals % 2 != 0 {
        return Err(Error::Config(format!(
            "line minimization needs an even interval count >= 64, got {intervals}"
        )));
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::Domain(format!(
            "half-width must be positive, got {half_width}"
        )));
    }
    let n = intervals + 1;
    let h = 2.0 * half_width / intervals as f64;
    let nodes: Vec<f64> = (0..n).map(|i| -half_width + i as f64 * h).collect();
    let pin = intervals / 2;
    let wt = |i: usize| if i == 0 || i == n - 1 { 0.5 * h } else { h };

    let mut w: Vec<f64> = nodes.iter().map(|x| init(*x).clamp(-1.0, 1.0)).collect();
    w[pin] = 0.0;

    let energy = |w: &[f64]| -> f64 {
        let mut e = 0.0;
        for i in 0..n {
            e += wt(i) * value(w[i]);
        }
        for i in 0..n - 1 {
            let d = w[i + 1] - w[i];
            e += d * d / h;
        }
        e
    };
    let gradient = |w: &[f64], g: &mut [f64]| {
        for i in 0..n {
            g[i] = wt(i) * deriv(w[i]);
            if i > 0 {
                g[i] += 2.0 * (w[i] - w[i - 1]) / h;
            }
            if i + 1 < n {
                g[i] += 2.0 * (w[i] - w[i + 1]) / h;
            }
        }
        g[pin] = 0.0;
    };

    let mut g = vec![0.0; n];
    let mut e = energy(&w);
    let tol = 1e-10;
    // Nodes resting against the well bottoms see curvatures up to the
    // second-derivative cap, so gradient components below roughly
    // sqrt(eps * |E| * H_ii) cannot buy a representable energy decrease.
    // Such points are numerically stationary: accept them once the energy
    // has stopped moving for several consecutive iterations.
    let stall_tol = 1e-6;
    let mut stagnant = 0usize;
    for iter in 0..500 {
        gradient(&w, &mut g);
        // Projected gradient: directions blocked by the clamp do not count.
        let pg = g
            .iter()
            .zip(&w)
            .map(|(gi, wi)| {
                if (*wi >= 1.0 && *gi < 0.0) || (*wi <= -1.0 && *gi > 0.0) {
                    0.0
                } else {
                    gi.abs()
                }
            })
            .fold(0.0, f64::max);
        let stalled = stagnant >= 5 && pg <= stall_tol * (1.0 + e.abs());
        if pg <= tol * (1.0 + e.abs()) || stalled {
            return Ok(LineMinimum {
                nodes,
                values: w,
                energy: e,
                iterations: iter,
            });
        }
        // Newton direction with a growing diagonal shift until the Hessian
        // factorization is positive definite and the step decreases energy.
        let mut diag: Vec<f64> = (0..n)
            .map(|i| {
                let cells = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
                wt(i) * second(w[i]) + 2.0 * cells / h
            })
            .collect();
        let mut sub = vec![-2.0 / h; n - 1];
        // Pin: decouple the fixed node.
        diag[pin] = 1.0;
        sub[pin - 1] = 0.0;
        sub[pin] = 0.0;
        let scale = diag.iter().map(|d| d.abs()).fold(0.0, f64::max).max(1.0);
        let hess = SymTridiagonal { diag, sub };
        let mut sigma = 0.0;
        let mut improved = false;
        while sigma <= 1e12 * scale {
            let factor = hess.factorize_shifted(sigma);
            if factor.is_positive() {
                let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
                let d = factor.solve(&rhs);
                let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
                if slope < 0.0 && d.iter().all(|v| v.is_finite()) {
                    let mut alpha = 1.0;
                    while alpha >= 1e-12 {
                        let trial: Vec<f64> = w
                            .iter()
                            .zip(&d)
                            .enumerate()
                            .map(|(i, (wi, di))| {
                                if i == pin {
                                    0.0
                                } else {
                                    (wi + alpha * di).clamp(-1.0, 1.0)
                                }
                            })
                            .collect();
                        let et = energy(&trial);
                        if et <= e + 1e-4 * alpha * slope || et < e - 1e-15 * (1.0 + e.abs()) {
                            if e - et <= 1e-13 * (1.0 + e.abs()) {
                                stagnant += 1;
                            } else {
                                stagnant = 0;
                            }
                            w = trial;
                            e = et;
                            improved = true;
                            break;
                        }
                        alpha *= 0.5;
                    }
                }
            }
            if improved {
                break;
            }
            sigma = if sigma == 0.0 { 1e-8 * scale } else { sigma * 10.0 };
        }
        if !improved {
            if pg <= stall_tol * (1.0 + e.abs()) {
                return Ok(LineMinimum {
                    nodes,
                    values: w,
                    energy: e,
                    iterations: iter,
                });
            }
            return Err(Error::Numerical(format!(
                "line minimization stalled at energy {e} (projected gradient {pg})"
            )));
        }
    }
    Err(Error::Numerical(format!(
        "line minimization did not converge in 500 iterations (energy {e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference() -> TransitionProfile {
        TransitionProfile::new(&DoubleWell::default()).unwrap()
    }

    #[test]
    fn pinned_at_zero_and_saturates_exactly() {
        let p = reference();
        assert_eq!(p.eval(0.0), 0.0);
        assert_eq!(p.eval(p.tau()), 1.0);
        assert_eq!(p.eval(-p.tau()), -1.0);
        assert_eq!(p.eval(p.tau() + 1.0), 1.0);
        assert_eq!(p.eval(-p.tau() - 1.0), -1.0);
        assert_eq!(p.slope(p.tau() + 0.5), 0.0);
        assert!((p.tau() - p.well().tau_w()).abs() < 1e-12);
    }

    #[test]
    fn odd_strictly_increasing_and_inside_the_wells() {
        let p = reference();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let t: f64 = rng.gen_range(-1.5 * p.tau()..1.5 * p.tau());
            assert!(
                (p.eval(t) + p.eval(-t)).abs() <= 1e-15,
                "odd symmetry fails at {t}"
            );
            assert!(p.eval(t).abs() <= 1.0, "overshoot at {t}");
        }
        let mut prev = -1.0;
        for k in 1..2000 {
            let t = -p.tau() + 2.0 * p.tau() * k as f64 / 2000.0;
            let z = p.eval(t);
            assert!(z > prev, "not strictly increasing at t = {t}");
            assert!(z > -1.0 && z < 1.0);
            prev = z;
        }
    }

    #[test]
    fn inverse_round_trip() {
        let p = reference();
        let t_star = p.time_of(0.5).unwrap();
        assert!((p.eval(t_star) - 0.5).abs() < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let z: f64 = rng.gen_range(-0.999..0.999);
            let t = p.time_of(z).unwrap();
            assert!((p.eval(t) - z).abs() < 1e-9, "round trip fails at z = {z}");
        }
        assert!((p.time_of(1.0).unwrap() - p.tau()).abs() < 1e-12);
        assert!((p.time_of(-1.0).unwrap() + p.tau()).abs() < 1e-12);
        assert!(p.time_of(1.5).is_err());
        assert!(p.time_of(f64::NAN).is_err());
    }

    #[test]
    fn energy_identities() {
        let p = reference();
        let c_w = p.well().c_w();
        assert!(
            (p.energy() - c_w).abs() < 1e-8,
            "profile energy {} vs c_w {}",
            p.energy(),
            c_w
        );
        assert!((p.potential_half() - 0.5 * c_w).abs() < 1e-8);
        // The kinetic half through the ODE identity is the same quadrature.
        let kinetic = p.layer_integral(|t, _| p.slope(t).powi(2));
        assert!((kinetic - 0.5 * c_w).abs() < 1e-8);
        // Integration window does not matter beyond saturation.
        let base = p.energy_on(p.tau()).unwrap();
        assert_eq!(p.energy_on(1.5 * p.tau()).unwrap(), base);
        assert_eq!(p.energy_on(2.0 * p.tau()).unwrap(), base);
        assert!(p.energy_on(0.5 * p.tau()).is_err());
    }

    #[test]
    fn kinetic_energy_by_finite_differences_confirms_the_ode_route() {
        // Differentiating the tabulated profile numerically must reproduce
        // ∫|z′|² without using the identity z′ = √W.
        let p = reference();
        let h = 1e-5;
        let kinetic_fd = p.layer_integral(|t, _| {
            let d = (p.eval(t + h) - p.eval(t - h)) / (2.0 * h);
            d * d
        });
        assert!(
            (kinetic_fd - 0.5 * p.well().c_w()).abs() < 1e-5,
            "finite-difference kinetic half: {kinetic_fd}"
        );
    }

    #[test]
    fn ode_residual_is_small_on_interior_samples() {
        let p = reference();
        let h = 1e-4;
        let mut worst = 0.0f64;
        for k in 0..2000 {
            let t = -p.tau() + 2.0 * h + (2.0 * p.tau() - 4.0 * h) * k as f64 / 1999.0;
            worst = worst.max(p.ode_residual(t, h));
        }
        assert!(worst <= 1e-6, "max ODE residual {worst}");
    }

    #[test]
    fn layer_integral_examples() {
        let p = reference();
        // Constant integrand: the weights sum to the support length.
        assert!((p.layer_integral(|_, _| 1.0) - 2.0 * p.tau()).abs() < 1e-12);
        // Odd integrands cancel.
        assert!(p.layer_integral(|_, z| z).abs() < 1e-12);
        assert!(p.layer_integral(|t, _| t).abs() < 1e-12);
        // The energy-density first moment vanishes by symmetry.
        let moment = p.layer_integral(|t, z| (p.well().value(z) + p.slope(t).powi(2)) * t);
        assert!(moment.abs() < 1e-10, "odd energy moment {moment}");
    }

    #[test]
    fn minimality_against_the_independent_finite_element_solver() {
        let p = reference();
        let report = p.verify_minimality(2.0 * p.tau(), 1024).unwrap();
        let c_w = p.well().c_w();
        assert!(
            (report.discrete_minimum - c_w).abs() <= 1e-3 * c_w,
            "discrete minimum {} vs c_w {c_w}",
            report.discrete_minimum
        );
        assert!(
            report.sup_distance <= 1e-2,
            "minimizer strays from the profile by {}",
            report.sup_distance
        );
        assert!(p.verify_minimality(0.5 * p.tau(), 1024).is_err());
    }

    #[test]
    fn degenerate_potential_minimizes_to_zero() {
        let min = pinned_line_minimum(|_| 0.0, |_| 0.0, |_| 0.0, 3.0, 128, |x| x.tanh()).unwrap();
        assert!(min.energy.abs() < 1e-12);
        for v in &min.values {
            assert!(v.abs() < 1e-6);
        }
    }

    #[test]
    fn line_minimum_rejects_bad_grids() {
        assert!(pinned_line_minimum(|_| 0.0, |_| 0.0, |_| 0.0, 3.0, 63, |_| 0.0).is_err());
        assert!(pinned_line_minimum(|_| 0.0, |_| 0.0, |_| 0.0, 3.0, 130, |_| 0.0).is_ok());
        assert!(pinned_line_minimum(|_| 0.0, |_| 0.0, |_| 0.0, -1.0, 128, |_| 0.0).is_err());
    }

    #[test]
    fn table_is_fine_enough_for_other_wells() {
        // A potential close to the β → 2 edge, where the window knots
        // collide in double precision and must be deduplicated.
        let well = DoubleWell::new(1.95, 0.4).unwrap();
        let p = TransitionProfile::new(&well).unwrap();
        assert!((p.energy() - well.c_w()).abs() < 1e-7);
        assert_eq!(p.eval(p.tau() + 1.0), 1.0);
        // And one close to β → 1.
        let well = DoubleWell::new(1.05, 0.6).unwrap();
        let p = TransitionProfile::new(&well).unwrap();
        assert!((p.energy() - well.c_w()).abs() < 1e-7);
    }
}
