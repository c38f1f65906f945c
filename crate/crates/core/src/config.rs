//! Run configuration: the single self-describing record that fixes a sweep.
//!
//! A run is determined by the gauge Φ, the well W, the domain geometry
//! (dimension n, outer radius R, and the mass bound m — equivalently the
//! interface radius r with m = κ_Φ Rⁿ − 2 κ_Φ rⁿ), the ε grid, the solver
//! grid parameters, the check tolerances, and a seed for the randomized
//! property suites.  The same record is echoed verbatim into every report
//! header, so an emitted file suffices to reproduce the run.
//!
//! Configuration files use TOML with the field names below; every field has
//! a default, and the defaults constitute the reference configuration
//! (n = 2, euclidean Φ, β = 3/2, a = 1/2, R = 1, r = 1/2,
//! ε ∈ {0.1, 0.05, 0.025, 0.0125}).
//!
//! Validation happens before any numerics: the ε list must be strictly
//! decreasing, tolerances positive, and the mass bound must leave room for
//! both phases, −κ_Φ Rⁿ < m < κ_Φ Rⁿ.  A bound at or above the domain
//! volume is a constraint error: the problem would admit the pure phase
//! w ≡ 1 and no interface.

use crate::anisotropy::AnisotropicNorm;
use crate::error::{Error, Result};
use crate::potential::DoubleWell;
use crate::profile::TransitionProfile;
use crate::radial::{GridSpec, RadialProblem, SolverOptions};
use crate::recovery::RecoveryConfig;

use serde::{Deserialize, Serialize};
use std::path::Path;

/// The gauge Φ, by name plus optional parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormSpec {
    /// One of `"euclidean"`, `"l1"`, `"weighted-p"`.
    pub kind: String,
    /// Exponent for `"weighted-p"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Axis weights for `"weighted-p"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// The well W(s) = |1 − s²|^β scaled to W(0) = a.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WellSpec {
    /// Wall exponent β ∈ (1, 2).
    pub beta: f64,
    /// Barrier height a = W(0).
    pub a: f64,
}

/// Domain and constraint geometry.  Exactly one of `r` and `m` may be
/// given; the other is derived through m = κ_Φ Rⁿ − 2 κ_Φ rⁿ.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySpec {
    /// Space dimension n.
    pub n: usize,
    /// Outer radius of the domain Ω = B^{Φ°}_R(0).
    #[serde(rename = "R")]
    pub big_r: f64,
    /// Interface radius of the reference Wulff configuration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Mass bound of the constraint ∫ u ≤ m.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
}

/// Grid parameters for the radial solver and the rearrangement checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridParams {
    /// Core spacing of the layer grid in stretched units, at ε = 0.1.
    pub core_dt: f64,
    /// Exponent with which the core spacing shrinks with ε.
    pub core_exponent: f64,
    /// Spacing of the mid-range band around the layer.
    pub mid_dt: f64,
    /// Geometric growth factor of the far-field spacing.
    pub growth: f64,
    /// Far-field spacing cap as a fraction of R.
    pub max_step_frac: f64,
    /// Cells per side of the rearrangement grid.
    pub cells: usize,
}

/// Solver and check tolerances.  All must be positive.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Projected-gradient tolerance of the inner Newton solver.
    pub grad_tol: f64,
    /// Euler–Lagrange defect scale allowed in the excess checks.
    pub el_tol: f64,
    /// Complementarity bound |λ_ε · slack| of the mass constraint.
    pub kkt_tol: f64,
    /// Relative mass-feasibility tolerance.
    pub mass_tol: f64,
    /// One-sided slack allowed in the interface-shift sign check δ_ε ≥ −tol.
    pub tol_delta: f64,
}

/// The full run record.  [`RunConfig::default`] is the reference
/// configuration; partial TOML files override individual fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub norm: NormSpec,
    pub well: WellSpec,
    pub geometry: GeometrySpec,
    /// Sweep values of ε, strictly decreasing.
    pub eps: Vec<f64>,
    pub grid: GridParams,
    pub tolerances: Tolerances,
    /// Output directory for emitted files.
    pub out_dir: String,
    /// Seed for the randomized property suites.
    pub seed: u64,
}

/// Everything a sweep needs, constructed once per run: the validated
/// config together with the gauge, the well, the tabulated profile, and the
/// resolved geometry.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: RunConfig,
    pub norm: AnisotropicNorm,
    pub well: DoubleWell,
    pub profile: TransitionProfile,
    /// Interface radius r of the reference configuration.
    pub radius: f64,
    /// Mass bound m.
    pub mass: f64,
}

impl Default for NormSpec {
    fn default() -> Self {
        NormSpec {
            kind: "euclidean".to_string(),
            p: None,
            weights: None,
        }
    }
}

impl Default for WellSpec {
    fn default() -> Self {
        WellSpec { beta: 1.5, a: 0.5 }
    }
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec {
            n: 2,
            big_r: 1.0,
            r: Some(0.5),
            m: None,
        }
    }
}

impl Default for GridParams {
    fn default() -> Self {
        let spec = GridSpec::default();
        GridParams {
            core_dt: spec.core_dt,
            core_exponent: spec.core_exponent,
            mid_dt: spec.mid_dt,
            growth: spec.growth,
            max_step_frac: spec.max_step_frac,
            cells: 256,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            grad_tol: 1e-9,
            el_tol: 0.05,
            kkt_tol: 1e-8,
            mass_tol: 1e-9,
            tol_delta: 0.1,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            norm: NormSpec::default(),
            well: WellSpec::default(),
            geometry: GeometrySpec::default(),
            eps: vec![0.1, 0.05, 0.025, 0.0125],
            grid: GridParams::default(),
            tolerances: Tolerances::default(),
            out_dir: "out".to_string(),
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Parses a TOML document; missing fields keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text)
            .map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and parses a TOML config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("cannot read {}: {e}", path.display()),
            ))
        })?;
        Self::from_toml_str(&text)
    }

    /// Serializes the record back to TOML; used for the self-describing
    /// report headers.  Round-trips through [`RunConfig::from_toml_str`].
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    /// Structural validation before any numerics.
    pub fn validate(&self) -> Result<()> {
        for pair in self.eps.windows(2) {
            if !(pair[1] < pair[0]) {
                return Err(Error::Config(format!(
                    "eps list must be strictly decreasing, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        if let Some(&last) = self.eps.last() {
            if !(last > 0.0) {
                return Err(Error::Config(format!(
                    "eps values must be positive, got {last}"
                )));
            }
        }
        let tols = [
            ("grad_tol", self.tolerances.grad_tol),
            ("el_tol", self.tolerances.el_tol),
            ("kkt_tol", self.tolerances.kkt_tol),
            ("mass_tol", self.tolerances.mass_tol),
            ("tol_delta", self.tolerances.tol_delta),
        ];
        for (name, value) in tols {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!(
                    "tolerance {name} must be positive, got {value}"
                )));
            }
        }
        if self.geometry.r.is_some() && self.geometry.m.is_some() {
            return Err(Error::Config(
                "geometry fixes both r and m; give exactly one".to_string(),
            ));
        }
        if self.geometry.r.is_none() && self.geometry.m.is_none() {
            return Err(Error::Config(
                "geometry must fix the interface radius r or the mass bound m".to_string(),
            ));
        }
        // The mass window needs κ_Φ, hence a constructed norm.
        let norm = self.norm()?;
        let n = self.geometry.n as i32;
        let vol = norm.kappa() * self.geometry.big_r.powi(n);
        if let Some(m) = self.geometry.m {
            if m >= vol {
                return Err(Error::Constraint(format!(
                    "mass bound m = {m} admits the pure phase: need m < |Ω| = {vol}"
                )));
            }
            if m <= -vol {
                return Err(Error::Constraint(format!(
                    "mass bound m = {m} leaves no room below −|Ω| = {}",
                    -vol
                )));
            }
        }
        if let Some(r) = self.geometry.r {
            if !(r.is_finite() && r > 0.0 && r < self.geometry.big_r) {
                return Err(Error::Config(format!(
                    "interface radius must satisfy 0 < r < R = {}, got {r}",
                    self.geometry.big_r
                )));
            }
        }
        Ok(())
    }

    /// Builds the gauge named by the norm spec.
    pub fn norm(&self) -> Result<AnisotropicNorm> {
        let n = self.geometry.n;
        match self.norm.kind.as_str() {
            "euclidean" => AnisotropicNorm::euclidean(n),
            "l1" => AnisotropicNorm::weighted_p(n, 1.0, vec![1.0; n]),
            "weighted-p" => {
                let p = self.norm.p.ok_or_else(|| {
                    Error::Config("norm kind weighted-p needs the exponent p".to_string())
                })?;
                let weights = self.norm.weights.clone().ok_or_else(|| {
                    Error::Config("norm kind weighted-p needs axis weights".to_string())
                })?;
                AnisotropicNorm::weighted_p(n, p, weights)
            }
            other => Err(Error::Config(format!(
                "unknown norm kind {other:?}; known kinds: euclidean, l1, weighted-p"
            ))),
        }
    }

    /// Builds the well of the well spec.
    pub fn well(&self) -> Result<DoubleWell> {
        DoubleWell::new(self.well.beta, self.well.a)
    }

    /// Grid parameters in the radial solver's own type.
    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            core_dt: self.grid.core_dt,
            core_exponent: self.grid.core_exponent,
            mid_dt: self.grid.mid_dt,
            growth: self.grid.growth,
            max_step_frac: self.grid.max_step_frac,
        }
    }

    /// Solver options with the configured tolerances.
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            grad_tol: self.tolerances.grad_tol,
            mass_tol: self.tolerances.mass_tol,
            ..SolverOptions::default()
        }
    }

    /// Validates and resolves the run: constructs the gauge, the well, the
    /// profile, and the (r, m) pair.
    pub fn context(&self) -> Result<RunContext> {
        self.validate()?;
        let norm = self.norm()?;
        let well = self.well()?;
        let profile = TransitionProfile::new(&well)?;
        let n = self.geometry.n as i32;
        let kappa = norm.kappa();
        let vol = kappa * self.geometry.big_r.powi(n);
        let (radius, mass) = match (self.geometry.r, self.geometry.m) {
            (Some(r), None) => (r, vol - 2.0 * kappa * r.powi(n)),
            (None, Some(m)) => (norm.radius_from_mass(vol, m)?, m),
            _ => unreachable!("validate() enforces exactly one of r, m"),
        };
        Ok(RunContext {
            config: self.clone(),
            norm,
            well,
            profile,
            radius,
            mass,
        })
    }
}

impl RunContext {
    /// The radial problem at one ε, on the configured grid.
    pub fn problem(&self, eps: f64) -> Result<RadialProblem> {
        RadialProblem::with_grid(
            &self.norm,
            &self.well,
            &self.profile,
            self.config.geometry.big_r,
            self.mass,
            eps,
            &self.config.grid_spec(),
        )
    }

    /// The centred recovery family of the run's geometry.
    pub fn recovery(&self) -> Result<RecoveryConfig> {
        RecoveryConfig::centered(
            &self.norm,
            &self.well,
            &self.profile,
            self.config.geometry.big_r,
            self.radius,
        )
    }

    /// Limit value λ₀ = (n − 1) c_W / (2r) of the mass multiplier.
    pub fn lambda0(&self) -> f64 {
        (self.config.geometry.n as f64 - 1.0) * self.well.c_w() / (2.0 * self.radius)
    }

    /// Leading-order energy n κ_Φ c_W r^{n−1}, the scale against which the
    /// excess and quotient columns are judged.
    pub fn leading_energy(&self) -> f64 {
        let n = self.config.geometry.n;
        n as f64 * self.norm.kappa() * self.well.c_w() * self.radius.powi(n as i32 - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_configuration() {
        let config = RunConfig::default();
        config.validate().expect("reference config is valid");
        let ctx = config.context().expect("reference context");
        assert_eq!(config.geometry.n, 2);
        assert_eq!(ctx.radius, 0.5);
        let kappa = std::f64::consts::PI;
        assert!((ctx.mass - kappa / 2.0).abs() < 1e-12);
        assert!((ctx.lambda0() - ctx.well.c_w()).abs() < 1e-12);
        assert_eq!(config.eps, vec![0.1, 0.05, 0.025, 0.0125]);
    }

    #[test]
    fn toml_round_trip_preserves_the_record() {
        let config = RunConfig::default();
        let text = config.to_toml_string();
        let back = RunConfig::from_toml_str(&text).expect("echo parses");
        assert_eq!(back.to_toml_string(), text);
    }

    #[test]
    fn partial_files_override_single_fields() {
        let config = RunConfig::from_toml_str(
            "eps = [0.2, 0.1]\n\n[well]\nbeta = 1.25\n",
        )
        .expect("partial config");
        assert_eq!(config.eps, vec![0.2, 0.1]);
        assert_eq!(config.well.beta, 1.25);
        assert_eq!(config.well.a, 0.5, "unset fields keep their defaults");
        assert_eq!(config.geometry.big_r, 1.0);
    }

    #[test]
    fn non_decreasing_eps_lists_are_rejected() {
        let mut config = RunConfig::default();
        config.eps = vec![0.05, 0.1];
        assert!(config.validate().is_err());
        config.eps = vec![0.1, 0.1];
        assert!(config.validate().is_err());
        config.eps = vec![0.1, -0.05];
        assert!(config.validate().is_err());
        config.eps = vec![];
        config.validate().expect("an empty sweep list is allowed");
    }

    #[test]
    fn mass_bounds_outside_the_window_are_constraint_errors() {
        let mut config = RunConfig::default();
        config.geometry.r = None;
        config.geometry.m = Some(std::f64::consts::PI);
        match config.validate() {
            Err(Error::Constraint(_)) => {}
            other => panic!("m = |Ω| must be a constraint error, got {other:?}"),
        }
        config.geometry.m = Some(-4.0);
        assert!(matches!(config.validate(), Err(Error::Constraint(_))));
        config.geometry.m = Some(std::f64::consts::PI / 2.0);
        config.validate().expect("interior mass bound is fine");
        let ctx = config.context().expect("context from m");
        assert!((ctx.radius - 0.5).abs() < 1e-12);
    }

    #[test]
    fn geometry_must_fix_exactly_one_of_r_and_m() {
        let mut config = RunConfig::default();
        config.geometry.m = Some(1.0);
        assert!(config.validate().is_err());
        config.geometry.r = None;
        config.geometry.m = None;
        assert!(config.validate().is_err());
    }

    #[test]
    fn named_norms_construct_and_unknown_kinds_fail() {
        let mut config = RunConfig::default();
        config.norm.kind = "l1".to_string();
        let norm = config.norm().expect("ℓ¹ norm");
        assert!((norm.kappa() - 4.0).abs() < 1e-9, "Φ° = ℓ^∞ ball has area 4");
        config.norm.kind = "hexagonal".to_string();
        assert!(config.norm().is_err());
        config.norm.kind = "weighted-p".to_string();
        assert!(config.norm().is_err(), "weighted-p needs parameters");
        config.norm.p = Some(3.0);
        config.norm.weights = Some(vec![1.0, 2.0]);
        config.norm().expect("parameterized norm");
    }

    #[test]
    fn tolerances_must_be_positive() {
        let mut config = RunConfig::default();
        config.tolerances.kkt_tol = 0.0;
        assert!(config.validate().is_err());
        config.tolerances.kkt_tol = -1e-8;
        assert!(config.validate().is_err());
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        assert!(RunConfig::from_toml_str("epz = [0.1]\n").is_err());
    }
}
