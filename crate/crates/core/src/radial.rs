//! Constrained minimization of the weighted one-dimensional functional
//!
//!   G_ε(w) = ∫_0^R ( W(w)/ε + ε |w′|² ) ρ^{n−1} dρ,
//!
//! over fields with w(R) = 1, subject to the mass inequality
//! nκ_Φ ∫_0^R w ρ^{n−1} dρ ≤ m.  In the rescaled variable t = (ρ − r)/ε the
//! same value reads
//!
//!   H_ε(w) = ∫ ( W(w) + |w_t|² ) (r + εt)^{n−1} dt,
//!
//! and the first-order conditions carry a multiplier λ_ε ≥ 0:
//!
//!   −2 w_tt − 2(n−1) ε w_t/(r + εt) + W′(w) = −ε λ_ε.
//!
//! The solver is an augmented-Lagrangian (multiplier-clamped at zero) outer
//! loop around a damped Newton inner loop on the nodal energy, followed by a
//! Newton polish of the active-constraint KKT system.  Quadrature pairs the
//! nodal trapezoid rule for W with exact cell moments ∫ ρ^{n−1} dρ, which
//! makes the G/H rescaling identity hold cell by cell in exact arithmetic
//! and makes the truncation w ↦ min(w, 1) energy-decreasing nodally.

use crate::anisotropy::AnisotropicNorm;
use crate::error::{Error, Result};
use crate::potential::DoubleWell;
use crate::profile::TransitionProfile;
use crate::tridiag::{rank_one_solve, SymTridiagonal};

/// Grid generation parameters for the layer-graded radial mesh.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    /// Rescaled spacing in the transition core |t − 0| ≤ τ + 2 at ε = 0.1;
    /// the spacing shrinks like ε^core_exponent below that.
    pub core_dt: f64,
    /// Grading exponent for the core spacing as ε decreases.
    pub core_exponent: f64,
    /// Rescaled spacing on the remainder of the resolved layer |t| ≤ 8τ.
    pub mid_dt: f64,
    /// Geometric growth ratio of the cell size outside the layer.
    pub growth: f64,
    /// Largest cell size as a fraction of the outer radius.
    pub max_step_frac: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            core_dt: 1.0 / 40.0,
            core_exponent: 0.7,
            mid_dt: 1.0 / 16.0,
            growth: 1.25,
            max_step_frac: 1.0 / 40.0,
        }
    }
}

/// Stopping and reporting tolerances for [`RadialProblem::minimize`].
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Hard projected-gradient target for the inner Newton loop.
    pub grad_tol: f64,
    /// Relative projected-gradient level accepted once the energy has
    /// stalled at the floating-point floor (the well bottoms are stiff
    /// enough that smaller gradients cannot buy a representable decrease).
    pub stall_tol: f64,
    /// Constraint-violation target, relative to the mass scale.
    pub mass_tol: f64,
    /// Outer (multiplier) iteration cap.
    pub max_outer: usize,
    /// Inner (Newton) iteration cap per outer step.
    pub max_inner: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grad_tol: 1e-9,
            stall_tol: 1e-4,
            mass_tol: 1e-9,
            max_outer: 40,
            max_inner: 300,
        }
    }
}

/// The discretized constrained problem on (0, R].
#[derive(Clone, Debug)]
pub struct RadialProblem {
    well: DoubleWell,
    profile: TransitionProfile,
    n: usize,
    big_r: f64,
    r: f64,
    m: f64,
    eps: f64,
    kappa: f64,
    /// Strictly increasing nodes; first node > 0, last node = R.
    grid: Vec<f64>,
    /// Rescaled abscissae t_i = (ρ_i − r)/ε.
    t: Vec<f64>,
    /// Exact cell moments ∫_{ρ_i}^{ρ_{i+1}} ρ^{n−1} dρ.
    moments: Vec<f64>,
    /// Moment of the origin cell [0, ρ_0], carried by the first node.
    origin_moment: f64,
    /// Assembled nodal weights for the trapezoid W/mass quadrature.
    weights: Vec<f64>,
    /// Construction warnings (layer clipped by the domain, etc.).
    notes: Vec<String>,
}

/// Converged (or flagged) output of the constrained solve.
#[derive(Clone, Debug)]
pub struct RadialSolveResult {
    /// Nodal minimizer on the problem grid.
    pub w: Vec<f64>,
    /// KKT multiplier λ_ε ≥ 0 in the Euler–Lagrange normalization above.
    pub lambda: f64,
    /// Rescaled zero crossing: w(δ_ε) = 0 in the t variable, nearest t = 0.
    pub delta: f64,
    /// Number of sign changes of the nodal minimizer.
    pub crossings: usize,
    /// G_ε of the minimizer.
    pub energy_g: f64,
    /// H_ε of the minimizer (identical value, assembled in t form).
    pub energy_h: f64,
    /// Sup norm of the discrete Euler–Lagrange defect at interior nodes.
    pub el_residual: f64,
    /// Per-node Euler–Lagrange defect (zero at the endpoints).
    pub el_defect: Vec<f64>,
    /// m − nκ_Φ ∫ w ρ^{n−1} dρ at the solution.
    pub constraint_slack: f64,
    /// Largest nodal decrease max(0, w_i − w_{i+1}) over cells.
    pub monotonicity_violation: f64,
    /// Smallest nodal value.
    pub min_w: f64,
    /// Total inner Newton iterations across the outer loop.
    pub iterations: usize,
    /// Whether all convergence targets were met.
    pub converged: bool,
}

/// Plateau approach rates near the two ends of the transition layer.
#[derive(Clone, Copy, Debug)]
pub struct EndpointLayerReport {
    /// Offsets K: deviations are sampled at t = δ_ε ∓ (τ_W + Kε).
    pub offsets: [f64; 3],
    /// |w(δ_ε − τ_W − Kε) + 1| for each K.
    pub inner_dev: [f64; 3],
    /// |1 − w(δ_ε + τ_W + Kε)| for each K.
    pub outer_dev: [f64; 3],
}

impl RadialProblem {
    /// Sets up the problem for mass bound `m`; the interface radius r comes
    /// from the exact volume bookkeeping κ_Φ r^n = (|Ω| − m)/2.
    pub fn new(
        norm: &AnisotropicNorm,
        well: &DoubleWell,
        profile: &TransitionProfile,
        big_r: f64,
        m: f64,
        eps: f64,
    ) -> Result<Self> {
        Self::with_grid(norm, well, profile, big_r, m, eps, &GridSpec::default())
    }

    /// As [`RadialProblem::new`] with the interface radius given directly.
    pub fn from_radius(
        norm: &AnisotropicNorm,
        well: &DoubleWell,
        profile: &TransitionProfile,
        big_r: f64,
        r: f64,
        eps: f64,
    ) -> Result<Self> {
        if !(r.is_finite() && r > 0.0 && r < big_r) {
            return Err(Error::Domain(format!(
                "interface radius must satisfy 0 < r < R = {big_r}, got {r}"
            )));
        }
        let n = norm.dim();
        let kappa = norm.kappa();
        let m = kappa * big_r.powi(n as i32) - 2.0 * kappa * r.powi(n as i32);
        Self::with_grid(norm, well, profile, big_r, m, eps, &GridSpec::default())
    }

    /// Full-control constructor.
    pub fn with_grid(
        norm: &AnisotropicNorm,
        well: &DoubleWell,
        profile: &TransitionProfile,
        big_r: f64,
        m: f64,
        eps: f64,
        spec: &GridSpec,
    ) -> Result<Self> {
        if !(big_r.is_finite() && big_r > 0.0) {
            return Err(Error::Domain(format!(
                "outer radius must be positive, got {big_r}"
            )));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::Domain(format!(
                "interface width must be positive, got {eps}"
            )));
        }
        let n = norm.dim();
        let kappa = norm.kappa();
        let vol = kappa * big_r.powi(n as i32);
        if !(m.is_finite() && m > -vol && m < vol) {
            return Err(Error::Constraint(format!(
                "mass bound must lie strictly between ±|Ω| = ±{vol}, got {m}"
            )));
        }
        let r = norm.radius_from_mass(vol, m)?;
        let tau = profile.tau();
        let mut notes = Vec::new();
        if 8.0 * eps * tau >= r.min(big_r - r) {
            notes.push(format!(
                "resolved layer 8ετ_W = {:.4} reaches the domain ends \
                 (r = {r}, R − r = {}); grid clipped",
                8.0 * eps * tau,
                big_r - r
            ));
        }
        let grid = build_grid(big_r, r, eps, tau, spec);
        let t: Vec<f64> = grid.iter().map(|rho| (rho - r) / eps).collect();
        let np = n as i32;
        let moments: Vec<f64> = grid
            .windows(2)
            .map(|c| (c[1].powi(np) - c[0].powi(np)) / n as f64)
            .collect();
        let origin_moment = grid[0].powi(np) / n as f64;
        let count = grid.len();
        let mut weights = vec![0.0; count];
        weights[0] = origin_moment + 0.5 * moments[0];
        for i in 1..count - 1 {
            weights[i] = 0.5 * (moments[i - 1] + moments[i]);
        }
        weights[count - 1] = 0.5 * moments[count - 2];
        Ok(RadialProblem {
            well: well.clone(),
            profile: profile.clone(),
            n,
            big_r,
            r,
            m,
            eps,
            kappa,
            grid,
            t,
            moments,
            origin_moment,
            weights,
            notes,
        })
    }

    /// Radial nodes ρ_i.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Rescaled nodes t_i = (ρ_i − r)/ε.
    pub fn t_grid(&self) -> &[f64] {
        &self.t
    }

    /// Interface radius r.
    pub fn radius(&self) -> f64 {
        self.r
    }

    /// Mass bound m.
    pub fn mass_bound(&self) -> f64 {
        self.m
    }

    /// Interface width ε.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Space dimension n.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Wulff constant κ_Φ of the driving gauge.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Construction warnings.
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    fn check_field(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.grid.len() {
            return Err(Error::Domain(format!(
                "field has {} nodes, grid has {}",
                w.len(),
                self.grid.len()
            )));
        }
        Ok(())
    }

    /// G_ε(w): nodal trapezoid for W against exact moments, piecewise-linear
    /// kinetic term.
    pub fn energy_g(&self, w: &[f64]) -> Result<f64> {
        self.check_field(w)?;
        let mut e = 0.0;
        for (i, v) in w.iter().enumerate() {
            e += self.weights[i] * self.well.value(*v) / self.eps;
        }
        for i in 0..w.len() - 1 {
            let drho = self.grid[i + 1] - self.grid[i];
            let slope = (w[i + 1] - w[i]) / drho;
            e += self.eps * self.moments[i] * slope * slope;
        }
        Ok(e)
    }

    /// H_ε(w) assembled in the rescaled variable; agrees with
    /// [`RadialProblem::energy_g`] to round-off because the cell moments are
    /// exact.
    pub fn energy_h(&self, w: &[f64]) -> Result<f64> {
        self.check_field(w)?;
        let mut e = self.origin_moment / self.eps * self.well.value(w[0]);
        for i in 0..w.len() - 1 {
            let dt = self.t[i + 1] - self.t[i];
            let slope = (w[i + 1] - w[i]) / dt;
            let wbar = 0.5 * (self.well.value(w[i]) + self.well.value(w[i + 1]));
            e += self.moments[i] / self.eps * (wbar + slope * slope);
        }
        Ok(e)
    }

    /// nκ_Φ ∫ w ρ^{n−1} dρ with the same nodal weights as the energy.
    pub fn mass(&self, w: &[f64]) -> Result<f64> {
        self.check_field(w)?;
        let nk = self.n as f64 * self.kappa;
        Ok(nk
            * w.iter()
                .zip(&self.weights)
                .map(|(v, q)| v * q)
                .sum::<f64>())
    }

    /// Shifted-profile competitor z((ρ − r)/ε) on the grid.
    pub fn profile_competitor(&self) -> Vec<f64> {
        self.t.iter().map(|&ti| self.profile.eval(ti)).collect()
    }

    /// (H_ε(w) − c_W r^{n−1})/ε: the quantity the liminf theorem controls.
    pub fn excess(&self, energy_h: f64) -> f64 {
        let lead = self.well.c_w() * self.r.powi(self.n as i32 - 1);
        (energy_h - lead) / self.eps
    }

    /// Zero crossing of the nodal field in the t variable, nearest t = 0;
    /// linear interpolation between the bracketing nodes.
    pub fn zero_crossing(&self, w: &[f64]) -> Result<(f64, usize)> {
        self.check_field(w)?;
        let mut best: Option<f64> = None;
        let mut count = 0usize;
        for i in 0..w.len() - 1 {
            let (a, b) = (w[i], w[i + 1]);
            let crossing = if a == 0.0 {
                Some(self.t[i])
            } else if a * b < 0.0 {
                Some(self.t[i] - a * (self.t[i + 1] - self.t[i]) / (b - a))
            } else {
                None
            };
            if let Some(c) = crossing {
                count += 1;
                if best.map_or(true, |prev: f64| c.abs() < prev.abs()) {
                    best = Some(c);
                }
            }
        }
        if w[w.len() - 1] == 0.0 {
            count += 1;
            let c = self.t[w.len() - 1];
            if best.map_or(true, |prev: f64| c.abs() < prev.abs()) {
                best = Some(c);
            }
        }
        match best {
            Some(c) => Ok((c, count)),
            None => Err(Error::Numerical(
                "field has no sign change; the solve degenerated to a single phase".into(),
            )),
        }
    }

    /// Linear interpolation of the nodal field at rescaled position `t`,
    /// clamped to the grid range.
    pub fn interp(&self, w: &[f64], t: f64) -> Result<f64> {
        self.check_field(w)?;
        let last = self.t.len() - 1;
        if t <= self.t[0] {
            return Ok(w[0]);
        }
        if t >= self.t[last] {
            return Ok(w[last]);
        }
        let j = match self
            .t
            .binary_search_by(|probe| probe.partial_cmp(&t).unwrap())
        {
            Ok(k) => return Ok(w[k]),
            Err(k) => k,
        };
        let s = (t - self.t[j - 1]) / (self.t[j] - self.t[j - 1]);
        Ok(w[j - 1] + s * (w[j] - w[j - 1]))
    }

    /// Per-node defect of the rescaled Euler–Lagrange equation
    /// −2 w_tt − 2(n−1) ε w_t/(r + εt) + W′(w) + ελ = 0 by nonuniform
    /// central differences; endpoints report zero.
    pub fn el_defect(&self, w: &[f64], lambda: f64) -> Result<Vec<f64>> {
        self.check_field(w)?;
        let count = w.len();
        let mut defect = vec![0.0; count];
        for i in 1..count - 1 {
            let hm = self.t[i] - self.t[i - 1];
            let hp = self.t[i + 1] - self.t[i];
            let denom = hm * hp * (hm + hp);
            let wt = (hm * hm * w[i + 1] - hp * hp * w[i - 1]
                + (hp * hp - hm * hm) * w[i])
                / denom;
            let wtt = 2.0 * (hm * w[i + 1] + hp * w[i - 1] - (hm + hp) * w[i]) / denom;
            let rho = self.r + self.eps * self.t[i];
            defect[i] = -2.0 * wtt - 2.0 * (self.n as f64 - 1.0) * self.eps * wt / rho
                + self.well.derivative(w[i])
                + self.eps * lambda;
        }
        Ok(defect)
    }

    /// Plateau deviations at t = δ_ε ∓ (τ_W + Kε), K ∈ {1, 2, 4}.
    pub fn diagnostics_endpoint_layers(
        &self,
        result: &RadialSolveResult,
    ) -> Result<EndpointLayerReport> {
        let offsets = [1.0, 2.0, 4.0];
        let mut inner_dev = [0.0; 3];
        let mut outer_dev = [0.0; 3];
        let tau = self.profile.tau();
        for (k, &off) in offsets.iter().enumerate() {
            let reach = tau + off * self.eps;
            inner_dev[k] = (self.interp(&result.w, result.delta - reach)? + 1.0).abs();
            outer_dev[k] = (1.0 - self.interp(&result.w, result.delta + reach)?).abs();
        }
        Ok(EndpointLayerReport {
            offsets,
            inner_dev,
            outer_dev,
        })
    }

    /// Augmented-Lagrangian solve of the constrained problem, initialized at
    /// the shifted profile, with nodal truncation w ≤ 1 at every iterate and
    /// a final Newton polish of the active-constraint KKT system.
    pub fn minimize(&self, opts: &SolverOptions) -> Result<RadialSolveResult> {
        let count = self.grid.len();
        let pin = count - 1;
        let nk = self.n as f64 * self.kappa;
        let eps = self.eps;

        // Constraint gradient ∇C = nκ q and stiffness coefficients.
        let cgrad: Vec<f64> = self.weights.iter().map(|q| nk * q).collect();
        let stiff: Vec<f64> = (0..count - 1)
            .map(|i| {
                let drho = self.grid[i + 1] - self.grid[i];
                2.0 * eps * self.moments[i] / (drho * drho)
            })
            .collect();

        let mut w = self.profile_competitor();
        w[pin] = 1.0;

        let energy = |w: &[f64]| -> f64 {
            let mut e = 0.0;
            for i in 0..count {
                e += self.weights[i] * self.well.value(w[i]) / eps;
            }
            for i in 0..count - 1 {
                let d = w[i + 1] - w[i];
                e += 0.5 * stiff[i] * d * d;
            }
            e
        };
        let mass = |w: &[f64]| -> f64 {
            nk * w
                .iter()
                .zip(&self.weights)
                .map(|(v, q)| v * q)
                .sum::<f64>()
        };

        let mass_scale = self.kappa * self.big_r.powi(self.n as i32);
        let mut mu = 0.0f64;
        let mut c_pen = 100.0f64;
        let mut total_iters = 0usize;
        let mut inner_ok = true;
        let mut last_violation = f64::INFINITY;

        for _outer in 0..opts.max_outer {
            let lagrangian = |w: &[f64]| -> f64 {
                let cv = mass(w) - self.m;
                let nu = (mu + c_pen * cv).max(0.0);
                energy(w) + (nu * nu - mu * mu) / (2.0 * c_pen)
            };
            let (iters, ok) =
                self.newton_inner(&mut w, pin, &cgrad, &stiff, mu, c_pen, &lagrangian, opts);
            total_iters += iters;
            inner_ok = ok;
            let cv = mass(&w) - self.m;
            let nu = (mu + c_pen * cv).max(0.0);
            let settled = cv.abs() <= 1e-10 * mass_scale
                && (nu - mu).abs() <= 1e-8 * (1.0 + nu.abs());
            if cv.abs() > 0.25 * last_violation {
                c_pen = (c_pen * 10.0).min(1e12);
            }
            last_violation = cv.abs();
            mu = nu;
            if settled && ok {
                break;
            }
        }

        // Polish: Newton on the equality KKT system (the mass bound is
        // active at the reference minimizers: the unconstrained flow always
        // pushes the mass up against it).
        if mu > 0.0 {
            self.kkt_polish(&mut w, &mut mu, pin, &cgrad, &stiff, &mass);
        }

        let lambda = nk * mu;
        let cv = mass(&w) - self.m;
        let energy_g = self.energy_g(&w)?;
        let energy_h = self.energy_h(&w)?;
        let (delta, crossings) = self.zero_crossing(&w)?;
        let el_defect = self.el_defect(&w, lambda)?;
        let el_residual = el_defect.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
        let monotonicity_violation = w
            .windows(2)
            .map(|c| (c[0] - c[1]).max(0.0))
            .fold(0.0, f64::max);
        let min_w = w.iter().cloned().fold(f64::INFINITY, f64::min);
        let converged = inner_ok && cv.abs() <= opts.mass_tol * mass_scale && lambda >= 0.0;
        Ok(RadialSolveResult {
            w,
            lambda,
            delta,
            crossings,
            energy_g,
            energy_h,
            el_residual,
            el_defect,
            constraint_slack: -cv,
            monotonicity_violation,
            min_w,
            iterations: total_iters,
            converged,
        })
    }

    /// Damped Newton descent on the augmented Lagrangian at fixed (μ, c);
    /// returns (iterations, reached a stationary point).
    #[allow(clippy::too_many_arguments)]
    fn newton_inner<L: Fn(&[f64]) -> f64>(
        &self,
        w: &mut Vec<f64>,
        pin: usize,
        cgrad: &[f64],
        stiff: &[f64],
        mu: f64,
        c_pen: f64,
        lagrangian: &L,
        opts: &SolverOptions,
    ) -> (usize, bool) {
        let count = w.len();
        let eps = self.eps;
        let constraint = |w: &[f64]| -> f64 {
            cgrad.iter().zip(w.iter()).map(|(q, v)| q * v).sum::<f64>() - self.m
        };
        let mut e = lagrangian(&w[..]);
        let mut stagnant = 0usize;
        for iter in 0..opts.max_inner {
            let cv = constraint(&w[..]);
            let nu = (mu + c_pen * cv).max(0.0);
            // Gradient of the augmented Lagrangian.
            let mut g = vec![0.0; count];
            for i in 0..count {
                g[i] = self.weights[i] * self.well.derivative(w[i]) / eps + nu * cgrad[i];
            }
            for i in 0..count - 1 {
                let d = w[i + 1] - w[i];
                g[i] -= stiff[i] * d;
                g[i + 1] += stiff[i] * d;
            }
            g[pin] = 0.0;
            let pg = g
                .iter()
                .zip(w.iter())
                .map(|(gi, wi)| {
                    if *wi >= 1.0 && *gi < 0.0 {
                        0.0
                    } else {
                        gi.abs()
                    }
                })
                .fold(0.0, f64::max);
            let scale = 1.0 + e.abs();
            if pg <= opts.grad_tol * scale
                || (stagnant >= 5 && pg <= opts.stall_tol * scale)
            {
                return (iter, true);
            }
            // Hessian: tridiagonal part plus the active rank-one penalty.
            let mut diag: Vec<f64> = (0..count)
                .map(|i| self.weights[i] * self.well.second_derivative(w[i]) / eps)
                .collect();
            let mut sub = vec![0.0; count - 1];
            for i in 0..count - 1 {
                diag[i] += stiff[i];
                diag[i + 1] += stiff[i];
                sub[i] = -stiff[i];
            }
            diag[pin] = 1.0;
            sub[pin - 1] = 0.0;
            let scale_h = diag.iter().fold(1.0f64, |a, d| a.max(d.abs()));
            let hess = SymTridiagonal { diag, sub };
            let mut q_masked = cgrad.to_vec();
            q_masked[pin] = 0.0;
            let rank_mu = if nu > 0.0 { c_pen } else { 0.0 };
            let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
            let mut sigma = 0.0f64;
            let mut improved = false;
            while sigma <= 1e12 * scale_h {
                let factor = hess.factorize_shifted(sigma);
                if factor.is_positive() {
                    let step = if rank_mu > 0.0 {
                        rank_one_solve(&factor, rank_mu, &q_masked, &rhs).ok()
                    } else {
                        Some(factor.solve(&rhs))
                    };
                    if let Some(d) = step {
                        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
                        if slope < 0.0 && d.iter().all(|v| v.is_finite()) {
                            let mut alpha = 1.0f64;
                            while alpha >= 1e-12 {
                                let trial: Vec<f64> = w
                                    .iter()
                                    .zip(&d)
                                    .enumerate()
                                    .map(|(i, (wi, di))| {
                                        if i == pin {
                                            1.0
                                        } else {
                                            (wi + alpha * di).min(1.0)
                                        }
                                    })
                                    .collect();
                                let et = lagrangian(&trial);
                                if et <= e + 1e-4 * alpha * slope
                                    || et < e - 1e-15 * (1.0 + e.abs())
                                {
                                    if e - et <= 1e-13 * (1.0 + e.abs()) {
                                        stagnant += 1;
                                    } else {
                                        stagnant = 0;
                                    }
                                    *w = trial;
                                    e = et;
                                    improved = true;
                                    break;
                                }
                                alpha *= 0.5;
                            }
                        }
                    }
                }
                if improved {
                    break;
                }
                sigma = if sigma == 0.0 {
                    1e-8 * scale_h
                } else {
                    sigma * 10.0
                };
            }
            if !improved {
                return (iter, pg <= opts.stall_tol * scale);
            }
        }
        (opts.max_inner, false)
    }

    /// Newton steps on the active-set KKT system
    /// [H ∇C; ∇Cᵀ 0] (dw, dμ) = −(∇G + μ∇C, C) via block elimination.
    fn kkt_polish<M: Fn(&[f64]) -> f64>(
        &self,
        w: &mut Vec<f64>,
        mu: &mut f64,
        pin: usize,
        cgrad: &[f64],
        stiff: &[f64],
        mass: &M,
    ) {
        let count = w.len();
        let eps = self.eps;
        for _ in 0..12 {
            let cv = mass(w) - self.m;
            let mut g = vec![0.0; count];
            for i in 0..count {
                g[i] = self.weights[i] * self.well.derivative(w[i]) / eps + *mu * cgrad[i];
            }
            for i in 0..count - 1 {
                let d = w[i + 1] - w[i];
                g[i] -= stiff[i] * d;
                g[i + 1] += stiff[i] * d;
            }
            g[pin] = 0.0;
            let pg = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if pg <= 1e-13 && cv.abs() <= 1e-15 * (1.0 + self.m.abs()) {
                break;
            }
            let mut diag: Vec<f64> = (0..count)
                .map(|i| self.weights[i] * self.well.second_derivative(w[i]) / eps)
                .collect();
            let mut sub = vec![0.0; count - 1];
            for i in 0..count - 1 {
                diag[i] += stiff[i];
                diag[i + 1] += stiff[i];
                sub[i] = -stiff[i];
            }
            diag[pin] = 1.0;
            sub[pin - 1] = 0.0;
            let scale_h = diag.iter().fold(1.0f64, |a, d| a.max(d.abs()));
            let hess = SymTridiagonal { diag, sub };
            let mut q_masked = cgrad.to_vec();
            q_masked[pin] = 0.0;
            let mut factor = hess.factorize();
            if !factor.is_positive() {
                factor = hess.factorize_shifted(1e-10 * scale_h);
                if !factor.is_positive() {
                    break;
                }
            }
            let s1 = factor.solve(&g.iter().map(|v| -v).collect::<Vec<f64>>());
            let s2 = factor.solve(&q_masked);
            let denom: f64 = q_masked.iter().zip(&s2).map(|(a, b)| a * b).sum();
            if denom.abs() < 1e-300 {
                break;
            }
            let qs1: f64 = q_masked.iter().zip(&s1).map(|(a, b)| a * b).sum();
            let dmu = (cv + qs1) / denom;
            let new_mu = (*mu + dmu).max(0.0);
            for i in 0..count {
                if i != pin {
                    w[i] = (w[i] + s1[i] - dmu * s2[i]).min(1.0);
                }
            }
            *mu = new_mu;
        }
    }
}

/// Layer-graded mesh on (0, R]: uniform ε·core_dt(ε) spacing on the
/// transition core |t| ≤ τ + 2 (node at ρ = r exactly), uniform ε·mid_dt out
/// to |t| = 8τ, geometric coarsening beyond, endpoint at R exact.
fn build_grid(big_r: f64, r: f64, eps: f64, tau: f64, spec: &GridSpec) -> Vec<f64> {
    let core_dt = spec.core_dt * (eps / 0.1).powf(spec.core_exponent).min(1.0);
    let core_dt = core_dt.min(spec.mid_dt);
    let core_reach = tau + 2.0;
    let mid_reach = 8.0 * tau;
    let max_step = big_r * spec.max_step_frac;

    let mut nodes: Vec<f64> = Vec::new();
    // Core: multiples of ε·core_dt around r.
    let h_core = eps * core_dt;
    let k_lo = (-(core_reach) / core_dt).ceil() as i64;
    let k_hi = ((core_reach) / core_dt).floor() as i64;
    for k in k_lo..=k_hi {
        let rho = r + k as f64 * h_core;
        if rho > 0.0 && rho < big_r {
            nodes.push(rho);
        }
    }
    // Mid band on both sides.
    let h_mid = eps * spec.mid_dt;
    let mut rho = r + (k_hi as f64) * h_core;
    while rho + h_mid < big_r && (rho + h_mid - r) / eps <= mid_reach {
        rho += h_mid;
        nodes.push(rho);
    }
    let right_edge = rho;
    let mut rho = r + (k_lo as f64) * h_core;
    while rho - h_mid > 0.0 && (rho - h_mid - r) / eps >= -mid_reach {
        rho -= h_mid;
        nodes.push(rho);
    }
    let left_edge = rho;
    // Geometric tails.
    let mut h = h_mid;
    let mut rho = right_edge;
    while rho < big_r {
        h = (h * spec.growth).min(max_step);
        rho += h;
        if rho >= big_r - 0.25 * h {
            break;
        }
        nodes.push(rho);
    }
    nodes.push(big_r);
    let mut h = h_mid;
    let mut rho = left_edge;
    loop {
        h = (h * spec.growth).min(max_step);
        let next = rho - h;
        if next <= 0.5 * h {
            break;
        }
        rho = next;
        nodes.push(rho);
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Merge near-duplicates (region joints can land on shared multiples).
    let mut out: Vec<f64> = Vec::with_capacity(nodes.len());
    let tol = 0.25 * h_core;
    for v in nodes {
        if out.last().map_or(true, |&last| v - last > tol) {
            out.push(v);
        }
    }
    if let Some(last) = out.last_mut() {
        *last = big_r;
    }
    out
}
