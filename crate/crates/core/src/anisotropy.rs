//! Anisotropic gauges (norms), their polars, and Wulff-shape quantities.
//!
//! A gauge Φ here is an even, positively 1-homogeneous, convex function with
//! linear growth c_Φ|ξ| ≤ Φ(ξ) ≤ C_Φ|ξ|.  Its polar is
//! Φ°(η) = sup_{ξ≠0} ξ·η / Φ(ξ), the unit ball of Φ° is the model shape of
//! the associated perimeter, and κ_Φ denotes that ball's volume.  The
//! supported families are:
//!
//! * `euclidean` — Φ(ξ) = |ξ|;
//! * `scaled-euclidean(c)` — Φ(ξ) = c|ξ|;
//! * `weighted-p-norm(p, w)` — Φ(ξ) = (Σ (w_i|ξ_i|)^p)^{1/p}, p ≥ 1;
//! * `ellipse(Q)` — Φ(ξ) = √(ξᵀQξ) with Q symmetric positive definite;
//! * `sampled` — a direction table interpolated piecewise-linearly in angle
//!   (two dimensions only).
//!
//! Closed-form polars are used whenever they exist; the sampled family falls
//! back to a discrete sup over a fixed direction mesh (2¹² directions in 2-D,
//! 2¹⁴ Fibonacci-sphere directions in 3-D).  Every evaluator is pure and
//! immutable after construction; convexity of sampled tables is validated by
//! a seeded midpoint test at construction time.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Direction-mesh size used for numeric polars and mesh quadrature in 2-D.
pub const MESH_2D: usize = 1 << 12;
/// Direction-mesh size used for numeric quadrature on the 2-sphere.
pub const MESH_3D: usize = 1 << 14;

/// Volume of the unit Euclidean ball in `dim` dimensions.
pub fn unit_ball_volume(dim: usize) -> f64 {
    // omega_0 = 1, omega_1 = 2, omega_n = 2*pi*omega_{n-2}/n.
    match dim {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI * unit_ball_volume(dim - 2) / dim as f64,
    }
}

/// Estimated growth constants `c_phi <= Φ(ξ)/|ξ| <= big_c_phi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthBounds {
    pub c_phi: f64,
    pub big_c_phi: f64,
}

/// Families with closed-form evaluators.
#[derive(Clone, Debug)]
pub enum NormKind {
    Euclidean,
    ScaledEuclidean {
        factor: f64,
    },
    /// `p` may be `f64::INFINITY` internally (the polar of p = 1); public
    /// constructors only accept finite p ≥ 1.
    WeightedP {
        p: f64,
        weights: Vec<f64>,
    },
    /// Row-major symmetric positive definite matrix.
    Ellipse {
        q: Vec<f64>,
    },
    /// Piecewise-linear-in-angle table on [0, π), folded by evenness
    /// (2-D only).  `angles` strictly increasing, `values` > 0.
    Sampled {
        angles: Vec<f64>,
        values: Vec<f64>,
    },
}

/// Representation of a polar gauge.
#[derive(Clone, Debug)]
enum PolarRepr {
    /// The polar is again a closed-form family member.
    Closed(NormKind),
    /// Discrete sup over a direction mesh: Φ°(η) = max_k η·u_k / Φ(u_k).
    MeshSup { dirs: Vec<f64>, vals: Vec<f64> },
}

/// The polar gauge Φ° of an [`AnisotropicNorm`].
#[derive(Clone, Debug)]
pub struct PolarNorm {
    dim: usize,
    repr: PolarRepr,
}

/// An anisotropic gauge together with its precomputed polar, Wulff volume
/// κ_Φ, and growth constants.
#[derive(Clone, Debug)]
pub struct AnisotropicNorm {
    dim: usize,
    kind: NormKind,
    polar: PolarNorm,
    kappa: f64,
    growth: GrowthBounds,
    /// Lazily computed ∫_{S^{n-1}} |∇Φ°(ω)|² Φ°(ω)^{-n} dω (see
    /// [`AnisotropicNorm::dirichlet_shape_factor`]).
    shape_factor: OnceLock<f64>,
}

// ---------------------------------------------------------------------------
// Small dense symmetric linear algebra (row-major, dim <= a handful).
// ---------------------------------------------------------------------------

fn cholesky(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn chol_solve(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[k * n + i] * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    x
}

fn spd_inverse(n: usize, l: &[f64]) -> Vec<f64> {
    let mut inv = vec![0.0; n * n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = chol_solve(n, l, &e);
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    // Symmetrize to kill round-off skew.
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (inv[i * n + j] + inv[j * n + i]);
            inv[i * n + j] = v;
            inv[j * n + i] = v;
        }
    }
    inv
}

fn quad_form(n: usize, a: &[f64], x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += a[i * n + j] * x[j];
        }
        acc += x[i] * row;
    }
    acc
}

/// Largest/smallest eigenvalues of an SPD matrix by (inverse) power
/// iteration with a fixed deterministic start vector.
fn spd_eigen_bounds(n: usize, a: &[f64], l: &[f64]) -> (f64, f64) {
    let normalize = |v: &mut [f64]| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    };
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * i as f64).collect();
    normalize(&mut v);
    for _ in 0..200 {
        let mut w = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                w[i] += a[i * n + j] * v[j];
            }
        }
        normalize(&mut w);
        v = w;
    }
    let lam_max = quad_form(n, a, &v);
    let mut u: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * i as f64).collect();
    normalize(&mut u);
    for _ in 0..200 {
        let mut w = chol_solve(n, l, &u);
        normalize(&mut w);
        u = w;
    }
    let lam_min = quad_form(n, a, &u);
    (lam_max, lam_min)
}

// ---------------------------------------------------------------------------
// Direction meshes.
// ---------------------------------------------------------------------------

/// Uniform unit-circle mesh (flattened, 2 entries per direction).
pub fn circle_mesh(count: usize) -> Vec<f64> {
    let mut dirs = Vec::with_capacity(2 * count);
    for k in 0..count {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (count as f64);
        dirs.push(theta.cos());
        dirs.push(theta.sin());
    }
    dirs
}

/// Fibonacci-sphere mesh on S² (flattened, 3 entries per direction).
pub fn fibonacci_sphere(count: usize) -> Vec<f64> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    let mut dirs = Vec::with_capacity(3 * count);
    for k in 0..count {
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
        let rho = (1.0 - z * z).sqrt();
        let phi = golden_angle * k as f64;
        dirs.push(rho * phi.cos());
        dirs.push(rho * phi.sin());
        dirs.push(z);
    }
    dirs
}

/// Direction mesh and a per-direction quadrature weight for the unit sphere
/// surface measure, for `dim` ∈ {2, 3}.
fn sphere_quadrature(dim: usize) -> Result<(Vec<f64>, f64)> {
    match dim {
        2 => Ok((
            circle_mesh(MESH_2D),
            2.0 * std::f64::consts::PI / MESH_2D as f64,
        )),
        3 => Ok((
            fibonacci_sphere(MESH_3D),
            4.0 * std::f64::consts::PI / MESH_3D as f64,
        )),
        _ => Err(Error::Config(format!(
            "direction-mesh quadrature is implemented for dimensions 2 and 3, got {dim}"
        ))),
    }
}

fn euclid(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Kind evaluation.
// ---------------------------------------------------------------------------

fn eval_kind(kind: &NormKind, dim: usize, xi: &[f64]) -> f64 {
    match kind {
        NormKind::Euclidean => euclid(xi),
        NormKind::ScaledEuclidean { factor } => factor * euclid(xi),
        NormKind::WeightedP { p, weights } => {
            if p.is_infinite() {
                xi.iter()
                    .zip(weights)
                    .map(|(x, w)| (w * x).abs())
                    .fold(0.0, f64::max)
            } else if (*p - 1.0).abs() < 1e-15 {
                xi.iter().zip(weights).map(|(x, w)| (w * x).abs()).sum()
            } else {
                let s: f64 = xi
                    .iter()
                    .zip(weights)
                    .map(|(x, w)| (w * x).abs().powf(*p))
                    .sum();
                s.powf(1.0 / *p)
            }
        }
        NormKind::Ellipse { q } => quad_form(dim, q, xi).max(0.0).sqrt(),
        NormKind::Sampled { angles, values } => {
            let r = euclid(xi);
            if r == 0.0 {
                return 0.0;
            }
            let mut theta = xi[1].atan2(xi[0]);
            // Fold to [0, pi) using evenness.
            if theta < 0.0 {
                theta += std::f64::consts::PI;
            }
            if theta >= std::f64::consts::PI {
                theta -= std::f64::consts::PI;
            }
            let v = match angles.binary_search_by(|a| a.partial_cmp(&theta).unwrap()) {
                Ok(i) => values[i],
                Err(i) => {
                    // Wrap-around: the table is pi-periodic.
                    let (a0, v0, a1, v1) = if i == 0 {
                        (
                            angles[angles.len() - 1] - std::f64::consts::PI,
                            values[angles.len() - 1],
                            angles[0],
                            values[0],
                        )
                    } else if i == angles.len() {
                        (
                            angles[angles.len() - 1],
                            values[angles.len() - 1],
                            angles[0] + std::f64::consts::PI,
                            values[0],
                        )
                    } else {
                        (angles[i - 1], values[i - 1], angles[i], values[i])
                    };
                    let t = (theta - a0) / (a1 - a0);
                    v0 + t * (v1 - v0)
                }
            };
            r * v
        }
    }
}

/// Closed-form polar family of a closed-form family, when available.
fn polar_kind(kind: &NormKind, dim: usize) -> Option<NormKind> {
    match kind {
        NormKind::Euclidean => Some(NormKind::Euclidean),
        NormKind::ScaledEuclidean { factor } => Some(NormKind::ScaledEuclidean {
            factor: 1.0 / factor,
        }),
        NormKind::WeightedP { p, weights } => {
            let dual_p = if p.is_infinite() {
                1.0
            } else if (*p - 1.0).abs() < 1e-15 {
                f64::INFINITY
            } else {
                *p / (*p - 1.0)
            };
            Some(NormKind::WeightedP {
                p: dual_p,
                weights: weights.iter().map(|w| 1.0 / w).collect(),
            })
        }
        NormKind::Ellipse { q } => {
            let l = cholesky(dim, q)?;
            Some(NormKind::Ellipse {
                q: spd_inverse(dim, &l),
            })
        }
        NormKind::Sampled { .. } => None,
    }
}

impl PolarNorm {
    /// Dimension of the argument space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn eval_raw(&self, eta: &[f64]) -> f64 {
        match &self.repr {
            PolarRepr::Closed(kind) => eval_kind(kind, self.dim, eta),
            PolarRepr::MeshSup { dirs, vals } => {
                let mut best = 0.0f64;
                for (k, v) in vals.iter().enumerate() {
                    let d = dot(&dirs[k * self.dim..(k + 1) * self.dim], eta);
                    best = best.max(d / v);
                }
                best
            }
        }
    }

    /// Evaluates Φ°(η).
    pub fn eval(&self, eta: &[f64]) -> Result<f64> {
        check_vector(self.dim, eta)?;
        Ok(self.eval_raw(eta))
    }
}

fn check_vector(dim: usize, xi: &[f64]) -> Result<()> {
    if xi.len() != dim {
        return Err(Error::Domain(format!(
            "expected a vector of dimension {dim}, got length {}",
            xi.len()
        )));
    }
    if xi.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("vector has non-finite entries".into()));
    }
    Ok(())
}

impl AnisotropicNorm {
    // -- constructors -------------------------------------------------------

    /// Φ(ξ) = |ξ|.
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::from_kind(dim, NormKind::Euclidean)
    }

    /// Φ(ξ) = c|ξ| with c > 0.
    pub fn scaled_euclidean(dim: usize, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Config(format!(
                "scaled-euclidean factor must be positive and finite, got {factor}"
            )));
        }
        Self::from_kind(dim, NormKind::ScaledEuclidean { factor })
    }

    /// Φ(ξ) = (Σ (w_i|ξ_i|)^p)^{1/p} with finite p ≥ 1 and w_i > 0.
    pub fn weighted_p(dim: usize, p: f64, weights: Vec<f64>) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::Config(format!(
                "weighted-p exponent must satisfy 1 <= p < inf, got {p}"
            )));
        }
        if weights.len() != dim {
            return Err(Error::Config(format!(
                "expected {dim} weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Config("weights must be positive and finite".into()));
        }
        Self::from_kind(dim, NormKind::WeightedP { p, weights })
    }

    /// Φ(ξ) = √(ξᵀQξ) with Q symmetric positive definite (row-major rows).
    pub fn ellipse(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim < 2 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Config(
                "ellipse matrix must be square with dimension >= 2".into(),
            ));
        }
        let mut q = Vec::with_capacity(dim * dim);
        for r in &rows {
            for v in r {
                if !v.is_finite() {
                    return Err(Error::Config("ellipse matrix has non-finite entries".into()));
                }
                q.push(*v);
            }
        }
        for i in 0..dim {
            for j in 0..i {
                if (q[i * dim + j] - q[j * dim + i]).abs() > 1e-12 {
                    return Err(Error::Config("ellipse matrix must be symmetric".into()));
                }
            }
        }
        if cholesky(dim, &q).is_none() {
            return Err(Error::Config(
                "ellipse matrix must be positive definite".into(),
            ));
        }
        Self::from_kind(dim, NormKind::Ellipse { q })
    }

    /// Piecewise-linear-in-angle gauge from a table of directions and values
    /// (2-D only).  Directions need not be normalized; the table is folded
    /// to [0, π) by evenness and validated for convexity by sampling.
    pub fn sampled(samples: &[([f64; 2], f64)]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::Config(format!(
                "sampled gauge needs at least 3 directions, got {}",
                samples.len()
            )));
        }
        let mut folded: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
        for (dir, value) in samples {
            let r = euclid(dir);
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Config("sampled direction must be non-zero".into()));
            }
            if !(value.is_finite() && *value > 0.0) {
                return Err(Error::Config(format!(
                    "sampled gauge values must be positive, got {value}"
                )));
            }
            let mut theta = dir[1].atan2(dir[0]);
            if theta < 0.0 {
                theta += std::f64::consts::PI;
            }
            if theta >= std::f64::consts::PI {
                theta -= std::f64::consts::PI;
            }
            folded.push((theta, *value));
        }
        folded.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut angles = Vec::with_capacity(folded.len());
        let mut values = Vec::with_capacity(folded.len());
        for (theta, value) in folded {
            if let Some(last) = angles.last().copied() {
                if theta - last < 1e-12 {
                    let prev: f64 = *values.last().unwrap();
                    if (prev - value).abs() > 1e-9 * prev.abs() {
                        return Err(Error::Config(format!(
                            "conflicting sampled values at angle {theta}"
                        )));
                    }
                    continue;
                }
            }
            angles.push(theta);
            values.push(value);
        }
        if angles.len() < 3 {
            return Err(Error::Config(
                "sampled gauge needs at least 3 distinct folded directions".into(),
            ));
        }
        Self::from_kind(2, NormKind::Sampled { angles, values })
    }

    fn from_kind(dim: usize, kind: NormKind) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Config(format!(
                "gauges are defined for dimension >= 2, got {dim}"
            )));
        }
        if matches!(kind, NormKind::Sampled { .. }) && dim != 2 {
            return Err(Error::Config(
                "sampled gauges are implemented in dimension 2 only".into(),
            ));
        }
        if matches!(kind, NormKind::Sampled { .. }) {
            validate_convexity(&kind, dim)?;
        }
        let polar = build_polar(&kind, dim)?;
        let growth = growth_bounds(&kind, dim)?;
        let kappa = compute_kappa(&kind, dim, &polar)?;
        Ok(Self {
            dim,
            kind,
            polar,
            kappa,
            growth,
            shape_factor: OnceLock::new(),
        })
    }

    // -- evaluators ---------------------------------------------------------

    /// Dimension of the argument space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The underlying family.
    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub(crate) fn eval_raw(&self, xi: &[f64]) -> f64 {
        eval_kind(&self.kind, self.dim, xi)
    }

    /// Evaluates Φ(ξ).
    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        check_vector(self.dim, xi)?;
        Ok(self.eval_raw(xi))
    }

    /// The polar gauge Φ°.
    pub fn polar(&self) -> &PolarNorm {
        &self.polar
    }

    /// Numeric polar sup over a fresh direction mesh of `mesh` points,
    /// independent of the closed-form polar; used by dual-route checks.
    pub fn polar_numeric(&self, eta: &[f64], mesh: usize) -> Result<f64> {
        check_vector(self.dim, eta)?;
        if mesh == 0 {
            return Err(Error::Config("direction mesh must be non-empty".into()));
        }
        let dirs = match self.dim {
            2 => circle_mesh(mesh),
            3 => fibonacci_sphere(mesh),
            d => {
                return Err(Error::Config(format!(
                    "numeric polar is implemented for dimensions 2 and 3, got {d}"
                )))
            }
        };
        let mut best = 0.0f64;
        for k in 0..mesh {
            let u = &dirs[k * self.dim..(k + 1) * self.dim];
            best = best.max(dot(u, eta) / self.eval_raw(u));
        }
        Ok(best)
    }

    /// Numeric bipolar (Φ°)°(ξ) over a direction mesh; by convexity it must
    /// reproduce Φ(ξ) up to mesh resolution.
    pub fn bipolar_numeric(&self, xi: &[f64], mesh: usize) -> Result<f64> {
        check_vector(self.dim, xi)?;
        let dirs = match self.dim {
            2 => circle_mesh(mesh),
            3 => fibonacci_sphere(mesh),
            d => {
                return Err(Error::Config(format!(
                    "numeric bipolar is implemented for dimensions 2 and 3, got {d}"
                )))
            }
        };
        let mut best = 0.0f64;
        for k in 0..mesh {
            let u = &dirs[k * self.dim..(k + 1) * self.dim];
            best = best.max(dot(u, xi) / self.polar.eval_raw(u));
        }
        Ok(best)
    }

    // -- Wulff quantities ---------------------------------------------------

    /// κ_Φ: volume of the unit Φ°-ball.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Growth constants estimated (or closed-form) at construction.
    pub fn growth(&self) -> GrowthBounds {
        self.growth
    }

    /// Anisotropic perimeter of the Φ°-ball of radius `r`: n κ_Φ r^{n-1}.
    pub fn wulff_perimeter(&self, r: f64) -> Result<f64> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Domain(format!(
                "Wulff radius must be positive, got {r}"
            )));
        }
        Ok(self.dim as f64 * self.kappa * r.powi(self.dim as i32 - 1))
    }

    /// Radius r with |Ω| - 2 κ_Φ rⁿ = m, i.e. the Wulff ball whose phase
    /// split realizes total mass `m` inside a domain of volume `vol_omega`.
    pub fn radius_from_mass(&self, vol_omega: f64, m: f64) -> Result<f64> {
        if !(vol_omega.is_finite() && vol_omega > 0.0) {
            return Err(Error::Domain(format!(
                "domain volume must be positive, got {vol_omega}"
            )));
        }
        if !(m.is_finite() && m > -vol_omega && m < vol_omega) {
            return Err(Error::Constraint(format!(
                "mass must lie strictly between -|Omega| and |Omega| = {vol_omega}, got {m}"
            )));
        }
        Ok(((vol_omega - m) / (2.0 * self.kappa)).powf(1.0 / self.dim as f64))
    }

    /// ∫_{S^{n-1}} |∇Φ°(ω)|² Φ°(ω)^{-n} dω: reduces n-dimensional Dirichlet
    /// integrals of Φ°-radial functions to 1-D, via
    /// ∫ g(Φ°(x)) |∇Φ°(x)|² dx = S_Φ ∫ g(ρ) ρ^{n-1} dρ.
    pub fn dirichlet_shape_factor(&self) -> Result<f64> {
        if let Some(v) = self.shape_factor.get() {
            return Ok(*v);
        }
        let v = match &self.kind {
            NormKind::Euclidean => self.dim as f64 * unit_ball_volume(self.dim),
            NormKind::ScaledEuclidean { factor } => {
                factor.powi(self.dim as i32 - 2) * self.dim as f64 * unit_ball_volume(self.dim)
            }
            _ => {
                let (dirs, weight) = sphere_quadrature(self.dim)?;
                let h = 1e-6;
                let count = dirs.len() / self.dim;
                let mut acc = 0.0;
                let mut grad = vec![0.0; self.dim];
                for k in 0..count {
                    let u = &dirs[k * self.dim..(k + 1) * self.dim];
                    let mut plus = u.to_vec();
                    let mut minus = u.to_vec();
                    for i in 0..self.dim {
                        plus[i] += h;
                        minus[i] -= h;
                        grad[i] =
                            (self.polar.eval_raw(&plus) - self.polar.eval_raw(&minus)) / (2.0 * h);
                        plus[i] = u[i];
                        minus[i] = u[i];
                    }
                    let g2: f64 = grad.iter().map(|g| g * g).sum();
                    acc += g2 * self.polar.eval_raw(u).powi(-(self.dim as i32)) * weight;
                }
                acc
            }
        };
        Ok(*self.shape_factor.get_or_init(|| v))
    }
}

fn build_polar(kind: &NormKind, dim: usize) -> Result<PolarNorm> {
    if let Some(pk) = polar_kind(kind, dim) {
        return Ok(PolarNorm {
            dim,
            repr: PolarRepr::Closed(pk),
        });
    }
    // Sampled (2-D): discrete sup over the standard mesh.
    let dirs = circle_mesh(MESH_2D);
    let mut vals = Vec::with_capacity(MESH_2D);
    for k in 0..MESH_2D {
        let u = &dirs[k * dim..(k + 1) * dim];
        let v = eval_kind(kind, dim, u);
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Config(
                "sampled gauge must be positive on the direction mesh".into(),
            ));
        }
        vals.push(v);
    }
    Ok(PolarNorm {
        dim,
        repr: PolarRepr::MeshSup { dirs, vals },
    })
}

fn growth_bounds(kind: &NormKind, dim: usize) -> Result<GrowthBounds> {
    let bounds = match kind {
        NormKind::Euclidean => GrowthBounds {
            c_phi: 1.0,
            big_c_phi: 1.0,
        },
        NormKind::ScaledEuclidean { factor } => GrowthBounds {
            c_phi: *factor,
            big_c_phi: *factor,
        },
        NormKind::WeightedP { p, weights } if (*p - 1.0).abs() < 1e-15 => GrowthBounds {
            c_phi: weights.iter().cloned().fold(f64::INFINITY, f64::min),
            big_c_phi: weights.iter().map(|w| w * w).sum::<f64>().sqrt(),
        },
        NormKind::WeightedP { p, weights } if (*p - 2.0).abs() < 1e-15 => GrowthBounds {
            c_phi: weights.iter().cloned().fold(f64::INFINITY, f64::min),
            big_c_phi: weights.iter().cloned().fold(0.0, f64::max),
        },
        NormKind::Ellipse { q } => {
            let l = cholesky(dim, q).expect("validated at construction");
            let (lam_max, lam_min) = spd_eigen_bounds(dim, q, &l);
            GrowthBounds {
                c_phi: lam_min.max(0.0).sqrt(),
                big_c_phi: lam_max.max(0.0).sqrt(),
            }
        }
        _ => {
            // Mesh estimate (sampled kind, general-p weighted norms).
            let (dirs, _) = sphere_quadrature(dim)?;
            let count = dirs.len() / dim;
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for k in 0..count {
                let v = eval_kind(kind, dim, &dirs[k * dim..(k + 1) * dim]);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            GrowthBounds {
                c_phi: lo,
                big_c_phi: hi,
            }
        }
    };
    if !(bounds.c_phi.is_finite() && bounds.c_phi > 0.0 && bounds.big_c_phi.is_finite()) {
        return Err(Error::Config(format!(
            "gauge growth constants must be positive and finite, got [{}, {}]",
            bounds.c_phi, bounds.big_c_phi
        )));
    }
    Ok(bounds)
}

fn compute_kappa(kind: &NormKind, dim: usize, polar: &PolarNorm) -> Result<f64> {
    let closed = match kind {
        NormKind::Euclidean => Some(unit_ball_volume(dim)),
        NormKind::ScaledEuclidean { factor } => {
            Some(unit_ball_volume(dim) * factor.powi(dim as i32))
        }
        NormKind::WeightedP { p, weights } if (*p - 1.0).abs() < 1e-15 => {
            // Polar ball is the box Π(-w_i, w_i).
            Some(weights.iter().product::<f64>() * 2f64.powi(dim as i32))
        }
        NormKind::WeightedP { p, weights } if (*p - 2.0).abs() < 1e-15 => {
            Some(weights.iter().product::<f64>() * unit_ball_volume(dim))
        }
        NormKind::Ellipse { q } => {
            let l = cholesky(dim, q).expect("validated at construction");
            let det: f64 = (0..dim).map(|i| l[i * dim + i]).product::<f64>().powi(2);
            Some(unit_ball_volume(dim) * det.sqrt())
        }
        _ => None,
    };
    if let Some(v) = closed {
        return Ok(v);
    }
    // Radial formula: kappa = (1/n) ∫_{S^{n-1}} Φ°(ω)^{-n} dω.
    let (dirs, weight) = sphere_quadrature(dim)?;
    let count = dirs.len() / dim;
    let mut acc = 0.0;
    for k in 0..count {
        let u = &dirs[k * dim..(k + 1) * dim];
        acc += polar.eval_raw(u).powi(-(dim as i32)) * weight;
    }
    Ok(acc / dim as f64)
}

/// Midpoint convexity sampling: rejects the gauge if any sampled midpoint
/// violates Φ((ξ+η)/2) ≤ (Φ(ξ)+Φ(η))/2 beyond the discretization level.
/// Piecewise-linear-in-angle tables of a curved convex gauge carry O(Δθ²)
/// midpoint defects that are not genuine non-convexity, so the tolerance is
/// tied to the table resolution rather than round-off; star-shaped tables
/// produce O(1) violations and are still rejected.
fn validate_convexity(kind: &NormKind, dim: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_CAFE);
    let gaussian = |rng: &mut ChaCha8Rng| {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    for _ in 0..2048 {
        let mut a = vec![0.0; dim];
        let mut b = vec![0.0; dim];
        for i in 0..dim {
            a[i] = gaussian(&mut rng);
            b[i] = gaussian(&mut rng);
        }
        let (na, nb) = (euclid(&a), euclid(&b));
        if na == 0.0 || nb == 0.0 {
            continue;
        }
        a.iter_mut().for_each(|v| *v /= na);
        b.iter_mut().for_each(|v| *v /= nb);
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let fa = eval_kind(kind, dim, &a);
        let fb = eval_kind(kind, dim, &b);
        let fm = eval_kind(kind, dim, &mid);
        if fm > 0.5 * (fa + fb) + 5e-4 * (fa + fb) {
            return Err(Error::Config(format!(
                "sampled gauge fails midpoint convexity: phi(mid) = {fm} > {}",
                0.5 * (fa + fb)
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_kinds() -> Vec<AnisotropicNorm> {
        vec![
            AnisotropicNorm::euclidean(2).unwrap(),
            AnisotropicNorm::scaled_euclidean(2, 2.0).unwrap(),
            AnisotropicNorm::weighted_p(2, 1.0, vec![1.0, 1.0]).unwrap(),
            AnisotropicNorm::weighted_p(2, 3.0, vec![1.0, 0.5]).unwrap(),
            AnisotropicNorm::ellipse(vec![vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap(),
            l1_sampled(),
        ]
    }

    fn l1_sampled() -> AnisotropicNorm {
        // The l1 gauge sampled at 64 angles.  Interpolating the radial table
        // linearly in the angle leaves O(dtheta^2) convexity defects near the
        // polygon's corners, which the construction-time check tolerates.
        let mut samples = Vec::new();
        for k in 0..64 {
            let theta = std::f64::consts::PI * (k as f64) / 64.0;
            let dir = [theta.cos(), theta.sin()];
            samples.push((dir, dir[0].abs() + dir[1].abs()));
        }
        AnisotropicNorm::sampled(&samples).unwrap()
    }

    #[test]
    fn euclidean_example_values() {
        let n = AnisotropicNorm::euclidean(2).unwrap();
        assert_eq!(n.eval(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(n.eval(&[0.0, 0.0]).unwrap(), 0.0);
        let p = AnisotropicNorm::weighted_p(2, 1.0, vec![1.0, 1.0]).unwrap();
        assert_eq!(p.eval(&[3.0, -4.0]).unwrap(), 7.0);
    }

    #[test]
    fn polar_example_values() {
        let n = AnisotropicNorm::euclidean(2).unwrap();
        assert!((n.polar().eval(&[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-12);
        let l1 = AnisotropicNorm::weighted_p(2, 1.0, vec![1.0, 1.0]).unwrap();
        // Dual route: closed-form l-infinity against the fresh numeric sup.
        let closed = l1.polar().eval(&[3.0, 4.0]).unwrap();
        let numeric = l1.polar_numeric(&[3.0, 4.0], MESH_2D).unwrap();
        assert!((closed - 4.0).abs() < 1e-12);
        assert!((numeric - 4.0).abs() < 1e-3 * 4.0);
        let scaled = AnisotropicNorm::scaled_euclidean(2, 2.0).unwrap();
        assert!((scaled.polar().eval(&[0.0, 3.0]).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn kappa_example_values() {
        let n2 = AnisotropicNorm::euclidean(2).unwrap();
        assert!((n2.kappa() - std::f64::consts::PI).abs() < 1e-12);
        let n3 = AnisotropicNorm::euclidean(3).unwrap();
        assert!((n3.kappa() - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
        let l1 = AnisotropicNorm::weighted_p(2, 1.0, vec![1.0, 1.0]).unwrap();
        assert!((l1.kappa() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_closed_form_matches_radial_quadrature() {
        // Same quantity via the closed form and via the sphere quadrature of
        // the polar radial formula.
        for norm in reference_kinds() {
            let (dirs, weight) = sphere_quadrature(norm.dim()).unwrap();
            let count = dirs.len() / norm.dim();
            let mut acc = 0.0;
            for k in 0..count {
                let u = &dirs[k * norm.dim()..(k + 1) * norm.dim()];
                acc += norm.polar().eval_raw(u).powi(-(norm.dim() as i32)) * weight;
            }
            let quad = acc / norm.dim() as f64;
            assert!(
                (quad - norm.kappa()).abs() <= 1e-3 * norm.kappa(),
                "kappa mismatch: quadrature {quad}, stored {}",
                norm.kappa()
            );
        }
    }

    #[test]
    fn wulff_perimeter_examples() {
        let n = AnisotropicNorm::euclidean(2).unwrap();
        assert!((n.wulff_perimeter(1.0).unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let l1 = AnisotropicNorm::weighted_p(2, 1.0, vec![1.0, 1.0]).unwrap();
        assert!((l1.wulff_perimeter(1.0).unwrap() - 8.0).abs() < 1e-12);
        assert!(n.wulff_perimeter(0.0).is_err());
        assert!(n.wulff_perimeter(-1.0).is_err());
    }

    #[test]
    fn radius_from_mass_examples() {
        let l1 = AnisotropicNorm::weighted_p(2, 1.0, vec![1.0, 1.0]).unwrap();
        // |Omega| = 4 (unit l-infinity square domain), m = 2 -> r = 0.5.
        assert!((l1.radius_from_mass(4.0, 2.0).unwrap() - 0.5).abs() < 1e-12);
        // Round trip for several masses and kinds.
        for norm in reference_kinds() {
            let vol = 3.7;
            for r in [0.2f64, 0.5, 0.8] {
                let m = vol - 2.0 * norm.kappa() * r.powi(norm.dim() as i32);
                if m <= -vol || m >= vol {
                    continue;
                }
                let back = norm.radius_from_mass(vol, m).unwrap();
                assert!((back - r).abs() < 1e-12);
            }
            assert!(norm.radius_from_mass(1.0, 1.0).is_err());
            assert!(norm.radius_from_mass(1.0, -1.0).is_err());
            assert!(norm.radius_from_mass(1.0, 7.0).is_err());
        }
    }

    #[test]
    fn homogeneity_evenness_and_triangle_inequality_hold_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for norm in reference_kinds() {
            // Angle-sampled tables are only convex up to their O(dtheta^2)
            // interpolation defect, so subadditivity inherits that slack.
            let slack = if matches!(norm.kind, NormKind::Sampled { .. }) {
                5e-4
            } else {
                1e-9
            };
            for _ in 0..1000 {
                let xi = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let eta = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let t: f64 = rng.gen_range(0.0..3.0);
                let f = norm.eval(&xi).unwrap();
                let g = norm.eval(&eta).unwrap();
                let scaled = norm.eval(&[t * xi[0], t * xi[1]]).unwrap();
                let neg = norm.eval(&[-xi[0], -xi[1]]).unwrap();
                let sum = norm.eval(&[xi[0] + eta[0], xi[1] + eta[1]]).unwrap();
                assert!((scaled - t * f).abs() <= 1e-12 * (1.0 + t * f), "homogeneity");
                assert!((neg - f).abs() <= 1e-12 * (1.0 + f), "evenness");
                assert!(sum <= f + g + slack * (1.0 + f + g), "subadditivity");
            }
        }
    }

    #[test]
    fn growth_bounds_bracket_the_gauge_and_transfer_to_the_polar() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for norm in reference_kinds() {
            let g = norm.growth();
            assert!(g.c_phi > 0.0 && g.c_phi <= g.big_c_phi);
            for _ in 0..1000 {
                let xi = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let len = euclid(&xi);
                if len < 1e-9 {
                    continue;
                }
                let f = norm.eval(&xi).unwrap();
                assert!(f >= g.c_phi * len - 1e-9 && f <= g.big_c_phi * len + 1e-9);
                let p = norm.polar().eval(&xi).unwrap();
                assert!(
                    p >= len / g.big_c_phi - 1e-6 && p <= len / g.c_phi + 1e-6,
                    "polar growth: {p} vs [{}, {}]",
                    len / g.big_c_phi,
                    len / g.c_phi
                );
            }
        }
    }

    #[test]
    fn bipolar_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for norm in reference_kinds() {
            for _ in 0..50 {
                let xi = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                if euclid(&xi) < 0.1 {
                    continue;
                }
                let f = norm.eval(&xi).unwrap();
                let bp = norm.bipolar_numeric(&xi, MESH_2D).unwrap();
                assert!(
                    (bp - f).abs() <= 1e-3 * f,
                    "bipolar mismatch: {bp} vs {f}"
                );
            }
        }
    }

    #[test]
    fn polar_gradient_has_unit_gauge_value_where_smooth() {
        // Φ(∇Φ°(η)) = 1 a.e.; checked by central differences at generic
        // points for smooth families.
        let smooth = vec![
            AnisotropicNorm::euclidean(2).unwrap(),
            AnisotropicNorm::weighted_p(2, 3.0, vec![1.0, 0.5]).unwrap(),
            AnisotropicNorm::ellipse(vec![vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for norm in smooth {
            for _ in 0..200 {
                let eta = [rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0)];
                let h = 1e-6;
                let gx = (norm.polar().eval_raw(&[eta[0] + h, eta[1]])
                    - norm.polar().eval_raw(&[eta[0] - h, eta[1]]))
                    / (2.0 * h);
                let gy = (norm.polar().eval_raw(&[eta[0], eta[1] + h])
                    - norm.polar().eval_raw(&[eta[0], eta[1] - h]))
                    / (2.0 * h);
                let v = norm.eval(&[gx, gy]).unwrap();
                assert!((v - 1.0).abs() < 1e-5, "gauge of polar gradient: {v}");
            }
        }
    }

    #[test]
    fn sampled_gauge_matches_its_generator_between_nodes() {
        let l1 = l1_sampled();
        let exact = AnisotropicNorm::weighted_p(2, 1.0, vec![1.0, 1.0]).unwrap();
        for k in 0..500 {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / 500.0;
            let xi = [1.7 * theta.cos(), 1.7 * theta.sin()];
            let a = l1.eval(&xi).unwrap();
            let b = exact.eval(&xi).unwrap();
            assert!((a - b).abs() <= 2e-3 * b, "sampled vs exact l1: {a} vs {b}");
        }
        // And its polar against the closed-form l-infinity dual.
        let eta = [0.3, -1.1];
        let p = l1.polar().eval(&eta).unwrap();
        assert!((p - 1.1).abs() < 1e-3 * 1.1);
    }

    #[test]
    fn rejections() {
        assert!(AnisotropicNorm::weighted_p(2, 0.5, vec![1.0, 1.0]).is_err());
        assert!(AnisotropicNorm::weighted_p(2, f64::INFINITY, vec![1.0, 1.0]).is_err());
        assert!(AnisotropicNorm::weighted_p(2, 2.0, vec![1.0, -1.0]).is_err());
        assert!(AnisotropicNorm::weighted_p(3, 2.0, vec![1.0, 1.0]).is_err());
        assert!(AnisotropicNorm::scaled_euclidean(2, 0.0).is_err());
        assert!(AnisotropicNorm::ellipse(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(AnisotropicNorm::ellipse(vec![vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
        assert!(AnisotropicNorm::euclidean(1).is_err());
        // Star-shaped, heavily non-convex table must be rejected.
        let mut spiky = Vec::new();
        for k in 0..8 {
            let theta = std::f64::consts::PI * (k as f64) / 8.0;
            let v = if k % 2 == 0 { 1.0 } else { 0.05 };
            spiky.push(([theta.cos(), theta.sin()], v));
        }
        assert!(AnisotropicNorm::sampled(&spiky).is_err());
    }

    #[test]
    fn eval_rejects_bad_vectors() {
        let n = AnisotropicNorm::euclidean(2).unwrap();
        assert!(n.eval(&[1.0]).is_err());
        assert!(n.eval(&[f64::NAN, 0.0]).is_err());
        assert!(n.eval(&[f64::INFINITY, 0.0]).is_err());
        assert!(n.polar().eval(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn ellipse_polar_is_inverse_matrix_gauge() {
        let q = vec![vec![2.0, 0.3], vec![0.3, 1.0]];
        let n = AnisotropicNorm::ellipse(q).unwrap();
        // Q^{-1} for [[2,0.3],[0.3,1]] is (1/det)[[1,-0.3],[-0.3,2]],
        // det = 2 - 0.09 = 1.91.
        let eta = [0.7f64, -0.4];
        let det = 1.91f64;
        let expect = ((eta[0] * (1.0 * eta[0] - 0.3 * eta[1])
            + eta[1] * (-0.3 * eta[0] + 2.0 * eta[1]))
            / det)
            .sqrt();
        let got = n.polar().eval(&eta).unwrap();
        assert!((got - expect).abs() < 1e-12);
        // kappa = omega_2 * sqrt(det Q).
        assert!((n.kappa() - std::f64::consts::PI * det.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_shape_factor_reduces_euclidean_dirichlet_integrals() {
        // Euclidean: S = n * omega_n (surface area of the unit sphere).
        let n2 = AnisotropicNorm::euclidean(2).unwrap();
        assert!((n2.dirichlet_shape_factor().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let n3 = AnisotropicNorm::euclidean(3).unwrap();
        assert!((n3.dirichlet_shape_factor().unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        // Ellipse: cross-check the mesh quadrature against a 2-D grid sum of
        // |∇φ|² for φ(x) = g(Φ°(x)), g(ρ) = max(0, 1-ρ)².
        let e = AnisotropicNorm::ellipse(vec![vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap();
        let s = e.dirichlet_shape_factor().unwrap();
        let g_prime = |rho: f64| {
            if rho < 1.0 {
                -2.0 * (1.0 - rho)
            } else {
                0.0
            }
        };
        let m = 600;
        let l = 1.6;
        let h = 2.0 * l / m as f64;
        let mut grid = 0.0;
        for i in 0..m {
            for j in 0..m {
                let x = -l + (i as f64 + 0.5) * h;
                let y = -l + (j as f64 + 0.5) * h;
                let d = 1e-5;
                let px = (e.polar().eval_raw(&[x + d, y]) - e.polar().eval_raw(&[x - d, y]))
                    / (2.0 * d);
                let py = (e.polar().eval_raw(&[x, y + d]) - e.polar().eval_raw(&[x, y - d]))
                    / (2.0 * d);
                let rho = e.polar().eval_raw(&[x, y]);
                let gp = g_prime(rho);
                grid += gp * gp * (px * px + py * py) * h * h;
            }
        }
        // 1-D factor: ∫_0^1 g'(ρ)² ρ dρ = ∫_0^1 4(1-ρ)² ρ dρ = 1/3.
        let reduced = s / 3.0;
        assert!(
            (grid - reduced).abs() < 2e-2 * reduced,
            "grid {grid} vs reduced {reduced}"
        );
    }
}
