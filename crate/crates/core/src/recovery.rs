//! The explicit almost-minimizing family
//!
//!   û_ε(x) = z((Φ°(x − x₀ − εγ(y₀ − x₀)) − r)/ε),
//!
//! its mass error ω_ε = ∫_Ω û_ε − m, and the corrected field
//! u_ε = û_ε − ω_ε φ built with a smooth unit-mass bump φ supported in
//! B^{Φ°}_{r/2}(x₀) ⊂ {û_ε = −1}.  All energies reduce exactly to
//! one-dimensional quadratures: level sets of Φ° are Wulff balls, so
//! ∫ f(Φ°(x)) dx = nκ_Φ ∫ f(ρ) ρ^{n−1} dρ, and Φ(∇Φ°) = 1 almost
//! everywhere.  The correction energy is evaluated exactly and compared
//! against the certified majorant
//!
//!   |ω_ε|^β/ε ∫ |φ|^β dx + C_Φ ε ω_ε² ∫ |∇φ|² dx,
//!
//! whose first part is an identity as long as the bump amplitude stays
//! below the well shoulder a.

use crate::anisotropy::AnisotropicNorm;
use crate::error::{Error, Result};
use crate::potential::DoubleWell;
use crate::profile::TransitionProfile;
use crate::quad;

/// Smooth reference bump: exp(−1/(1 − s²)) on (−1, 1), zero outside.
pub fn psi(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Derivative of [`psi`].
pub fn psi_prime(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let d = 1.0 - s * s;
        psi(s) * (-2.0 * s / (d * d))
    } else {
        0.0
    }
}

/// Geometry and bump data for the recovery family.
#[derive(Clone, Debug)]
pub struct RecoveryConfig {
    norm: AnisotropicNorm,
    well: DoubleWell,
    profile: TransitionProfile,
    big_r: f64,
    r: f64,
    m: f64,
    x0: Vec<f64>,
    y0: Vec<f64>,
    delta: f64,
    gamma: f64,
    /// Normalizing constant making ∫ c ψ(2 Φ°(x − x₀)/r) dx = 1.
    bump_c: f64,
}

/// Output of [`corrected_energy`].
#[derive(Clone, Copy, Debug)]
pub struct RecoveryResult {
    /// Mass error ω_ε of the uncorrected family.
    pub omega: f64,
    /// E_ε(û_ε).
    pub energy_hat: f64,
    /// Exact correction energy E_ε(−1 − ω_ε φ).
    pub energy_corr: f64,
    /// E_ε(u_ε) = energy_hat + energy_corr (disjoint gradient supports).
    pub energy_total: f64,
    /// (energy_total − nκ_Φ c_W r^{n−1})/ε.
    pub limsup_quotient: f64,
    /// Certified upper bound for energy_corr.
    pub majorant: f64,
}

/// Sampled verification of the geometric inclusions and the corrected mass.
#[derive(Clone, Copy, Debug)]
pub struct FeasibilityReport {
    /// min over sampled boundary points of (r + δ) − Φ°(x − y₀).
    pub inclusion_margin_inner: f64,
    /// min over sampled boundary points of R − Φ°(x).
    pub inclusion_margin_outer: f64,
    /// max |1 − û_ε| sampled just inside ∂Ω.
    pub boundary_deviation: f64,
    /// |∫ u_ε − m| from independent quadratures.
    pub mass_deviation: f64,
}

impl RecoveryConfig {
    /// Centered construction: Ω = B^{Φ°}_R(0), x₀ = y₀ = 0,
    /// δ = (R − r)/2, γ = τ_W/δ.
    pub fn centered(
        norm: &AnisotropicNorm,
        well: &DoubleWell,
        profile: &TransitionProfile,
        big_r: f64,
        r: f64,
    ) -> Result<Self> {
        let dim = norm.dim();
        Self::off_center(norm, well, profile, big_r, r, vec![0.0; dim])
    }

    /// General construction with an enlarged-ball center y₀; requires
    /// Φ°(x₀ − y₀) ≤ δ = (R − r)/2 with x₀ = 0.
    pub fn off_center(
        norm: &AnisotropicNorm,
        well: &DoubleWell,
        profile: &TransitionProfile,
        big_r: f64,
        r: f64,
        y0: Vec<f64>,
    ) -> Result<Self> {
        if !(big_r.is_finite() && big_r > 0.0 && r.is_finite() && r > 0.0 && r < big_r) {
            return Err(Error::Domain(format!(
                "radii must satisfy 0 < r < R, got r = {r}, R = {big_r}"
            )));
        }
        let n = norm.dim();
        if y0.len() != n {
            return Err(Error::Domain(format!(
                "center has {} coordinates in dimension {n}",
                y0.len()
            )));
        }
        let x0 = vec![0.0; n];
        let delta = 0.5 * (big_r - r);
        let diff: Vec<f64> = x0.iter().zip(&y0).map(|(a, b)| a - b).collect();
        let off = norm.polar().eval(&diff)?;
        if off > delta {
            return Err(Error::Geometry(format!(
                "enlarged-ball center too far out: Φ°(x₀ − y₀) = {off} > δ = {delta}"
            )));
        }
        let gamma = profile.tau() / delta;
        let kappa = norm.kappa();
        let np = n as i32;
        let m = kappa * big_r.powi(np) - 2.0 * kappa * r.powi(np);
        // Normalize the bump: nκ_Φ c (r/2)^n ∫₀¹ ψ(s) s^{n−1} ds = 1.
        let moment = quad::integrate(|s| psi(s) * s.powi(np - 1), 0.0, 1.0, 1e-15)?;
        let bump_c = 1.0 / (n as f64 * kappa * (0.5 * r).powi(np) * moment);
        let cfg = RecoveryConfig {
            norm: norm.clone(),
            well: well.clone(),
            profile: profile.clone(),
            big_r,
            r,
            m,
            x0,
            y0,
            delta,
            gamma,
            bump_c,
        };
        let unit = cfg.bump_mass()?;
        if (unit - 1.0).abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "bump normalization residual {} exceeds 1e-10",
                unit - 1.0
            )));
        }
        Ok(cfg)
    }

    /// Interface radius r.
    pub fn radius(&self) -> f64 {
        self.r
    }

    /// Prescribed mass m = κ_Φ R^n − 2 κ_Φ r^n.
    pub fn mass_bound(&self) -> f64 {
        self.m
    }

    /// Leading-order energy nκ_Φ c_W r^{n−1}.
    pub fn leading_energy(&self) -> f64 {
        let n = self.norm.dim();
        n as f64 * self.norm.kappa() * self.well.c_w() * self.r.powi(n as i32 - 1)
    }

    /// Bump normalization constant c.
    pub fn bump_constant(&self) -> f64 {
        self.bump_c
    }

    /// Radial bump profile φ(ρ) = c ψ(2ρ/r).
    pub fn bump(&self, rho: f64) -> f64 {
        self.bump_c * psi(2.0 * rho / self.r)
    }

    /// Layer center x₀ + εγ(y₀ − x₀) for the given ε.
    pub fn shifted_center(&self, eps: f64) -> Vec<f64> {
        self.x0
            .iter()
            .zip(&self.y0)
            .map(|(x, y)| x + eps * self.gamma * (y - x))
            .collect()
    }

    /// Independent quadrature of ∫ φ dx.
    fn bump_mass(&self) -> Result<f64> {
        let n = self.norm.dim();
        let np = n as i32;
        let nk = n as f64 * self.norm.kappa();
        let r = self.r;
        let c = self.bump_c;
        quad::integrate(
            |rho| nk * c * psi(2.0 * rho / r) * rho.powi(np - 1),
            0.0,
            0.5 * r,
            1e-14,
        )
    }

    /// Checks that the shifted layer fits between the origin and ∂Ω.
    fn check_layer(&self, eps: f64) -> Result<()> {
        let tau = self.profile.tau();
        if self.r - eps * tau <= 0.0 {
            return Err(Error::Geometry(format!(
                "layer swallows the origin: r − ετ_W = {} ≤ 0",
                self.r - eps * tau
            )));
        }
        let center = self.shifted_center(eps);
        let off = self.norm.polar().eval(&center)?;
        if off + self.r + eps * tau > self.big_r {
            return Err(Error::Geometry(format!(
                "shifted layer exits Ω: Φ°(center) + r + ετ_W = {} > R = {}",
                off + self.r + eps * tau,
                self.big_r
            )));
        }
        // The inclusion chain covers shifts with parameter t = εγ ≤ 1; with
        // coincident centers the shift vanishes and no chain is needed.
        let diff: Vec<f64> = self.x0.iter().zip(&self.y0).map(|(a, b)| a - b).collect();
        if self.norm.polar().eval(&diff)? > 0.0 && eps * self.gamma > 1.0 {
            return Err(Error::Geometry(format!(
                "shift parameter εγ = {} exceeds 1",
                eps * self.gamma
            )));
        }
        Ok(())
    }
}

/// ω_ε = ∫_Ω û_ε − m by closed-form volume terms plus the 1-D layer moment
/// nε ∫ z(t)(r + εt)^{n−1} dt.
pub fn mass_error(cfg: &RecoveryConfig, eps: f64) -> Result<f64> {
    cfg.check_layer(eps)?;
    let n = cfg.norm.dim();
    let np = n as i32;
    let kappa = cfg.norm.kappa();
    let tau = cfg.profile.tau();
    let r = cfg.r;
    let layer_moment = cfg
        .profile
        .layer_integral(|t, z| z * (r + eps * t).powi(np - 1));
    let vol = kappa * cfg.big_r.powi(np);
    let bracket = (r + eps * tau).powi(np) + (r - eps * tau).powi(np)
        - n as f64 * eps * layer_moment;
    Ok(vol - cfg.m - kappa * bracket)
}

/// E_ε(û_ε) = nκ_Φ ∫ (W(z) + |z′|²)(r + εt)^{n−1} dt, using |z′|² = W(z).
pub fn recovery_energy(cfg: &RecoveryConfig, eps: f64) -> Result<f64> {
    cfg.check_layer(eps)?;
    let n = cfg.norm.dim();
    let np = n as i32;
    let r = cfg.r;
    let well = cfg.well.clone();
    let layer = cfg
        .profile
        .layer_integral(|t, z| 2.0 * well.value(z) * (r + eps * t).powi(np - 1));
    Ok(n as f64 * cfg.norm.kappa() * layer)
}

/// Exact correction energy E_ε(−1 − ω φ) and its certified majorant.
fn correction_parts(cfg: &RecoveryConfig, eps: f64, omega: f64) -> Result<(f64, f64)> {
    let n = cfg.norm.dim();
    let np = n as i32;
    let nk = n as f64 * cfg.norm.kappa();
    let r = cfg.r;
    let c = cfg.bump_c;
    let well = cfg.well.clone();
    // Exact W part: nκ ∫₀^{r/2} W(−1 − ω c ψ(2ρ/r)) ρ^{n−1} dρ / ε.
    let w_exact = nk / eps
        * quad::integrate(
            |rho| well.value(-1.0 - omega * c * psi(2.0 * rho / r)) * rho.powi(np - 1),
            0.0,
            0.5 * r,
            1e-15,
        )?;
    // Exact gradient part: Φ(∇φ) = (2c/r)|ψ′| by the polar identity.
    let grad_moment = (0.5 * r).powi(np)
        * quad::integrate(|s| psi_prime(s).powi(2) * s.powi(np - 1), 0.0, 1.0, 1e-15)?;
    let grad_factor = nk * (2.0 * c / r).powi(2) * grad_moment;
    let grad_exact = eps * omega * omega * grad_factor;
    // Majorant: |ω|^β/ε ∫|φ|^β + C_Φ ε ω² ∫|∇φ|², with ∫|∇φ|² bounded
    // through the Lipschitz constant |∇Φ°| ≤ 1/c_Φ.
    let beta = cfg.well.beta();
    let beta_moment = (0.5 * r).powi(np)
        * quad::integrate(|s| psi(s).powf(beta) * s.powi(np - 1), 0.0, 1.0, 1e-15)?;
    let phi_beta = nk * c.powf(beta) * beta_moment;
    let growth = cfg.norm.growth();
    let gauge_ratio = (growth.big_c_phi / growth.c_phi).powi(2);
    let majorant = omega.abs().powf(beta) / eps * phi_beta
        + gauge_ratio * eps * omega * omega * grad_factor;
    Ok((w_exact + grad_exact, majorant))
}

/// Full limsup-side evaluation at one ε: mass error, exact correction,
/// energy sum per the disjoint-support splitting, and the quotient.
pub fn corrected_energy(cfg: &RecoveryConfig, eps: f64) -> Result<RecoveryResult> {
    cfg.check_layer(eps)?;
    let tau = cfg.profile.tau();
    if 0.5 * cfg.r >= cfg.r - eps * tau {
        return Err(Error::Geometry(format!(
            "bump support reaches the layer: r/2 = {} ≥ r − ετ_W = {}",
            0.5 * cfg.r,
            cfg.r - eps * tau
        )));
    }
    let omega = mass_error(cfg, eps)?;
    let energy_hat = recovery_energy(cfg, eps)?;
    let (energy_corr, majorant) = correction_parts(cfg, eps, omega)?;
    let energy_total = energy_hat + energy_corr;
    let limsup_quotient = (energy_total - cfg.leading_energy()) / eps;
    Ok(RecoveryResult {
        omega,
        energy_hat,
        energy_corr,
        energy_total,
        limsup_quotient,
        majorant,
    })
}

/// One adaptive quadrature of the full corrected field over (0, R); used to
/// confirm the disjoint-support energy splitting independently.
pub fn corrected_energy_direct(cfg: &RecoveryConfig, eps: f64) -> Result<f64> {
    cfg.check_layer(eps)?;
    let tau = cfg.profile.tau();
    if 0.5 * cfg.r >= cfg.r - eps * tau {
        return Err(Error::Geometry(
            "bump support reaches the layer".into(),
        ));
    }
    let omega = mass_error(cfg, eps)?;
    let n = cfg.norm.dim();
    let np = n as i32;
    let nk = n as f64 * cfg.norm.kappa();
    let r = cfg.r;
    let c = cfg.bump_c;
    let well = cfg.well.clone();
    let profile = cfg.profile.clone();
    // Density of W(u)/ε + ε Φ²(∇u) along the Φ°-radius.
    let density = move |rho: f64| -> f64 {
        if rho <= 0.5 * r {
            let s = 2.0 * rho / r;
            let w = well.value(-1.0 - omega * c * psi(s));
            let grad = omega * (2.0 * c / r) * psi_prime(s);
            w / eps + eps * grad * grad
        } else {
            let t = (rho - r) / eps;
            let z = profile.eval(t);
            2.0 * well.value(z) / eps
        }
    };
    let lo = quad::integrate(
        |rho| density(rho) * rho.powi(np - 1),
        0.0,
        0.5 * r,
        1e-14,
    )?;
    let mid = quad::integrate(
        |rho| density(rho) * rho.powi(np - 1),
        0.5 * r,
        r - eps * tau,
        1e-14,
    )?;
    let layer = quad::integrate(
        |rho| density(rho) * rho.powi(np - 1),
        r - eps * tau,
        r + eps * tau,
        1e-13,
    )?;
    Ok(nk * (lo + mid + layer))
}

/// L¹ distance ∫ |û_ε − u₀| where u₀ = −1 on B_r, +1 outside.
pub fn l1_distance(cfg: &RecoveryConfig, eps: f64) -> Result<f64> {
    cfg.check_layer(eps)?;
    let n = cfg.norm.dim();
    let np = n as i32;
    let r = cfg.r;
    let layer = cfg.profile.layer_integral(|t, z| {
        let sharp = if t >= 0.0 { 1.0 } else { -1.0 };
        (z - sharp).abs() * (r + eps * t).powi(np - 1)
    });
    Ok(n as f64 * cfg.norm.kappa() * eps * layer)
}

/// ε¹ coefficient by Richardson extrapolation of first differences over a
/// decreasing sequence; needs at least three points.
pub fn richardson_linear_coefficient(eps: &[f64], values: &[f64]) -> Result<f64> {
    if eps.len() != values.len() || eps.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "Richardson extrapolation needs ≥ 3 matching points, got {} and {}",
            eps.len(),
            values.len()
        )));
    }
    let k = eps.len() - 3;
    let d0 = (values[k] - values[k + 1]) / (eps[k] - eps[k + 1]);
    let d1 = (values[k + 1] - values[k + 2]) / (eps[k + 1] - eps[k + 2]);
    // With v = A + Bε + Cε², D_j = B + C(ε_j + ε_{j+1}); eliminate C.
    let s0 = eps[k] + eps[k + 1];
    let s1 = eps[k + 1] + eps[k + 2];
    Ok((d1 * s0 - d0 * s1) / (s0 - s1))
}

/// Samples the inclusion chain of the shifted balls and the corrected mass.
pub fn feasibility_check(cfg: &RecoveryConfig, eps: f64) -> Result<FeasibilityReport> {
    let n = cfg.norm.dim();
    if n != 2 {
        return Err(Error::Domain(format!(
            "feasibility sampling is implemented for n = 2, got n = {n}"
        )));
    }
    let tau = cfg.profile.tau();
    let mut inner = f64::INFINITY;
    let mut outer = f64::INFINITY;
    // Boundary points of B^{Φ°}_{r+tδ}(x₀ + t(y₀ − x₀)) for a few t.
    for &t in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        let center: Vec<f64> = cfg
            .x0
            .iter()
            .zip(&cfg.y0)
            .map(|(x, y)| x + t * (y - x))
            .collect();
        let radius = cfg.r + t * cfg.delta;
        for k in 0..128 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 128.0;
            let dir = [theta.cos(), theta.sin()];
            let scale = cfg.norm.polar().eval(&dir)?;
            let x = [
                center[0] + radius * dir[0] / scale,
                center[1] + radius * dir[1] / scale,
            ];
            let to_y0 = [x[0] - cfg.y0[0], x[1] - cfg.y0[1]];
            inner = inner.min(cfg.r + cfg.delta - cfg.norm.polar().eval(&to_y0)?);
            outer = outer.min(cfg.big_r - cfg.norm.polar().eval(&x)?);
        }
    }
    // û_ε just inside ∂Ω: exact saturation once Φ°(x − center) ≥ r + ετ_W.
    let center = cfg.shifted_center(eps);
    let mut boundary_dev = 0.0f64;
    for k in 0..128 {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / 128.0;
        let dir = [theta.cos(), theta.sin()];
        let scale = cfg.norm.polar().eval(&dir)?;
        let rho = 0.999 * cfg.big_r;
        let x = [rho * dir[0] / scale, rho * dir[1] / scale];
        let to_c = [x[0] - center[0], x[1] - center[1]];
        let level = (cfg.norm.polar().eval(&to_c)? - cfg.r) / eps;
        boundary_dev = boundary_dev.max((1.0 - cfg.profile.eval(level)).abs());
    }
    // Corrected mass by independent quadratures: ∫u = ∫û − ω ∫φ.
    let omega = mass_error(cfg, eps)?;
    let np = n as i32;
    let nk = n as f64 * cfg.norm.kappa();
    let r = cfg.r;
    let profile = cfg.profile.clone();
    let hat_inner = -(r - eps * tau).powi(np) / n as f64;
    let hat_outer = (cfg.big_r.powi(np) - (r + eps * tau).powi(np)) / n as f64;
    let hat_layer = quad::integrate(
        |rho| profile.eval((rho - r) / eps) * rho.powi(np - 1),
        r - eps * tau,
        r + eps * tau,
        1e-14,
    )?;
    let mass_hat = nk * (hat_inner + hat_outer + hat_layer);
    let mass_u = mass_hat - omega * cfg.bump_mass()?;
    Ok(FeasibilityReport {
        inclusion_margin_inner: inner,
        inclusion_margin_outer: outer,
        boundary_deviation: boundary_dev,
        mass_deviation: (mass_u - cfg.m).abs(),
    })
}
