//! The acceptance suite: ten executable criteria, one per limit statement.
//!
//! Every criterion is a self-contained check of one verifiable consequence
//! of the second-order expansion at the reference configuration (n = 2,
//! euclidean Φ, β = 3/2, a = 1/2, R = 1, r = 1/2,
//! ε ∈ {0.1, 0.05, 0.025, 0.0125}):
//!
//!   1. profile identities — energy c_W, equipartition, ODE residual;
//!   2. discrete minimality — the pinned finite-element minimum reproduces
//!      the profile and its energy;
//!   3. excess vanishing — (H_ε(w̄_ε) − c_W r^{n−1})/ε shrinks through the
//!      sweep and lands inside the second-order band at the smallest ε;
//!   4. multiplier limits — λ_ε → λ₀ with ελ_ε → 0, complementarity holds;
//!   5. shift limits — εδ_ε → 0 and δ_ε is not significantly negative;
//!   6. lower barrier — min w̄_ε obeys the plateau identity within round-off;
//!   7. recovery side — ω_ε = O(ε²), the correction obeys its majorant, and
//!      the corrected-energy quotient is checked against its band;
//!   8. geometry — Wulff perimeter, κ_Φ, and bipolar identities against
//!      independent polygon/grid/mesh oracles;
//!   9. rearrangement — equimeasurability, Pólya–Szegő, and the W-integral
//!      gap on seeded fields;
//!  10. cross-check — the 1-D layer quadrature of the recovery energy
//!      against a full 2-D grid evaluation.
//!
//! Outcomes never panic: internal errors fold into a failed outcome whose
//! details carry the error text.  Tolerances and runtime budgets are pinned
//! here as constants; the sub-check values appear in the outcome details so
//! a failing line is diagnosable from the printed report alone.

use crate::config::{RunConfig, RunContext};
use crate::error::Result;
use crate::potential::DoubleWell;
use crate::profile::TransitionProfile;
use crate::rearrange::GridField;
use crate::recovery;
use crate::sweep::{fit_exponent, run_sweep, SweepReport};

use std::time::Instant;

// -- Pinned tolerances -------------------------------------------------------

/// Criterion 1: identity tolerance for the profile energy and equipartition.
const PROFILE_IDENTITY_TOL: f64 = 1e-8;
/// Criterion 1: bound on the first-order ODE residual of the profile.
const PROFILE_RESIDUAL_TOL: f64 = 1e-6;
/// Criterion 1: runtime budget in seconds.
const PROFILE_BUDGET: f64 = 1.0;
/// Criterion 2: relative tolerance of the discrete minimum against c_W.
const FEM_RELATIVE_TOL: f64 = 1e-3;
/// Criterion 2: sup-distance tolerance of the discrete minimizer.
const FEM_SUP_TOL: f64 = 1e-2;
/// Criterion 2: finite elements on (−2τ_W, 2τ_W) with this many intervals.
const FEM_INTERVALS: usize = 1024;
/// Criterion 2: runtime budget in seconds.
const FEM_BUDGET: f64 = 5.0;
/// Criterion 3: |excess| band at the smallest ε, as a fraction of c_W r^{n−1}.
const EXCESS_FRACTION: f64 = 0.05;
/// Criterion 3: multiple of el_tol allowed below zero.
const EXCESS_FLOOR_FACTOR: f64 = 10.0;
/// Criterion 3: slack factor on the monotone decay of |excess|.
const EXCESS_DECAY_SLACK: f64 = 1.2;
/// Criterion 3: runtime budget in seconds, sweep included.
const SWEEP_BUDGET: f64 = 60.0;
/// Criterion 4: relative band for |λ_ε − λ₀| at the smallest ε.
const LAMBDA_RELATIVE_TOL: f64 = 0.10;
/// Criterion 4: band for ελ_ε at the smallest ε, as a fraction of c_W.
const EPS_LAMBDA_FRACTION: f64 = 0.05;
/// Criterion 5: band for |εδ_ε| at the smallest ε, as a fraction of r.
const EPS_DELTA_FRACTION: f64 = 0.02;
/// Criterion 6: additive slack on the plateau identity.
const BARRIER_SLACK: f64 = 1e-6;
/// Criterion 7: bound on consecutive ratios of ω_ε/ε².
const OMEGA_RATIO_BOUND: f64 = 2.0;
/// Criterion 7: floor on the fitted decay exponent of |ω_ε|.
const OMEGA_RATE_FLOOR: f64 = 1.8;
/// Criterion 7: quotient band at the smallest ε, as a fraction of the
/// leading energy n κ_Φ c_W r^{n−1}.
const QUOTIENT_FRACTION: f64 = 0.05;
/// Criterion 7: runtime budget in seconds.
const RECOVERY_BUDGET: f64 = 10.0;
/// Criterion 8: polygon oracle tolerance for the euclidean gauge.
const PERIMETER_TOL_EUCLIDEAN: f64 = 1e-6;
/// Criterion 8: polygon oracle tolerance for the ℓ¹ gauge.
const PERIMETER_TOL_L1: f64 = 1e-3;
/// Criterion 8: grid-volume tolerance for κ_Φ.
const KAPPA_GRID_TOL: f64 = 1e-3;
/// Criterion 8: bipolar round-trip tolerance.
const BIPOLAR_TOL: f64 = 1e-3;
/// Criterion 8: polygon resolution of the boundary oracle.
const PERIMETER_SEGMENTS: usize = 20_000;
/// Criterion 8: rows of the volume-counting grid.
const KAPPA_GRID_ROWS: usize = 16_384;
/// Criterion 8: direction mesh of the bipolar oracle.
const BIPOLAR_MESH: usize = 16_384;
/// Criterion 9: seeded fields checked at the base resolution.
const REARRANGE_SEEDS: u64 = 10;
/// Criterion 9: base grid resolution.
const REARRANGE_CELLS: usize = 256;
/// Criterion 9: W-integral gap bound at the base resolution.
const WELL_GAP_BOUND: f64 = 0.02;
/// Criterion 9: required shrink factor of the gap under grid refinement.
const WELL_GAP_SHRINK: f64 = 0.6;
/// Criterion 9: runtime budget in seconds.
const REARRANGE_BUDGET: f64 = 30.0;
/// Criterion 10: relative tolerance between the 1-D and 2-D evaluations.
const CROSS_CHECK_TOL: f64 = 0.01;
/// Criterion 10: ε of the cross-check.
const CROSS_CHECK_EPS: f64 = 0.05;
/// Criterion 10: cells per side of the 2-D evaluation grid.
const CROSS_CHECK_CELLS: usize = 1024;

// -- Outcome plumbing --------------------------------------------------------

/// One criterion's verdict: every sub-check with its measured values, the
/// wall time, and the aggregate pass flag.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    /// The one-line report form of this outcome.
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} {:<20} {} ({:6.2} s)  {}",
            self.index,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.details
        )
    }
}

/// The whole suite.
#[derive(Debug, Clone)]
pub struct AcceptanceReport {
    pub outcomes: Vec<CriterionOutcome>,
    pub passed: bool,
}

/// Collects labelled comparisons; NaN values fail their comparison, so
/// missing data can never pass a criterion.
struct Checks {
    items: Vec<(bool, String)>,
}

impl Checks {
    fn new() -> Self {
        Checks { items: Vec::new() }
    }

    fn le(&mut self, label: &str, value: f64, bound: f64) {
        let ok = value <= bound;
        self.items
            .push((ok, format!("{label} {} ≤ {}", short(value), short(bound))));
    }

    fn ge(&mut self, label: &str, value: f64, bound: f64) {
        let ok = value >= bound;
        self.items
            .push((ok, format!("{label} {} ≥ {}", short(value), short(bound))));
    }

    fn assert(&mut self, label: &str, ok: bool) {
        self.items.push((ok, label.to_string()));
    }

    fn fail(&mut self, label: &str) {
        self.items.push((false, label.to_string()));
    }

    fn into_outcome(
        mut self,
        index: usize,
        name: &'static str,
        started: Instant,
        carried_seconds: f64,
        budget: Option<f64>,
    ) -> CriterionOutcome {
        let seconds = carried_seconds + started.elapsed().as_secs_f64();
        if let Some(budget) = budget {
            self.le("runtime [s]", seconds, budget);
        }
        let passed = self.items.iter().all(|(ok, _)| *ok);
        let details = self
            .items
            .iter()
            .map(|(ok, text)| {
                if *ok {
                    text.clone()
                } else {
                    format!("FAIL {text}")
                }
            })
            .collect::<Vec<_>>()
            .join("; ");
        CriterionOutcome {
            index,
            name,
            passed,
            details,
            seconds,
        }
    }
}

fn short(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.3e}")
    }
}

fn reference_context() -> Result<RunContext> {
    RunConfig::default().context()
}

/// Runs the reference sweep and reports its wall time; criteria 3–6 read it.
pub fn reference_sweep() -> Result<(SweepReport, f64)> {
    let started = Instant::now();
    let report = run_sweep(&RunConfig::default())?;
    Ok((report, started.elapsed().as_secs_f64()))
}

// -- Criteria ----------------------------------------------------------------

/// Criterion 1: the profile carries the transition cost c_W, splits it
/// evenly between potential and gradient parts, and solves the first-order
/// ODE z′ = √W(z) to quadrature accuracy.
pub fn criterion_profile_identities() -> CriterionOutcome {
    let started = Instant::now();
    let mut checks = Checks::new();
    let well = DoubleWell::default();
    match TransitionProfile::new(&well) {
        Ok(profile) => {
            let c_w = well.c_w();
            checks.le(
                "|energy − c_W|",
                (profile.energy() - c_w).abs(),
                PROFILE_IDENTITY_TOL,
            );
            let potential = profile.layer_integral(|_, z| well.value(z));
            let kinetic = profile.layer_integral(|t, _| profile.slope(t).powi(2));
            checks.le(
                "|∫W(z) − c_W/2|",
                (potential - 0.5 * c_w).abs(),
                PROFILE_IDENTITY_TOL,
            );
            checks.le(
                "|∫z′² − c_W/2|",
                (kinetic - 0.5 * c_w).abs(),
                PROFILE_IDENTITY_TOL,
            );
            let h = 1e-4;
            let tau = profile.tau();
            let mut worst = 0.0f64;
            for k in 0..2000 {
                let t = -tau + 2.0 * h + (2.0 * tau - 4.0 * h) * k as f64 / 1999.0;
                worst = worst.max(profile.ode_residual(t, h));
            }
            checks.le("max ODE residual", worst, PROFILE_RESIDUAL_TOL);
        }
        Err(e) => checks.fail(&format!("profile construction: {e}")),
    }
    checks.into_outcome(1, "profile-identities", started, 0.0, Some(PROFILE_BUDGET))
}

/// Criterion 2: an independently discretized finite-element minimization on
/// (−2τ_W, 2τ_W) reproduces the profile's energy and shape.
pub fn criterion_discrete_minimality() -> CriterionOutcome {
    let started = Instant::now();
    let mut checks = Checks::new();
    let well = DoubleWell::default();
    match TransitionProfile::new(&well).and_then(|profile| {
        let report = profile.verify_minimality(2.0 * profile.tau(), FEM_INTERVALS)?;
        Ok((profile, report))
    }) {
        Ok((_, report)) => {
            let c_w = well.c_w();
            checks.le(
                "relative energy gap",
                (report.discrete_minimum - c_w).abs() / c_w,
                FEM_RELATIVE_TOL,
            );
            checks.le("sup distance", report.sup_distance, FEM_SUP_TOL);
        }
        Err(e) => checks.fail(&format!("discrete minimization: {e}")),
    }
    checks.into_outcome(2, "discrete-minimality", started, 0.0, Some(FEM_BUDGET))
}

/// Criterion 3: the liminf-side excess lies inside the second-order band at
/// the smallest ε, never dips below the Euler–Lagrange floor, and |excess|
/// decays monotonically through the sweep (with slack).
pub fn criterion_excess_vanishing(report: &SweepReport, sweep_seconds: f64) -> CriterionOutcome {
    let started = Instant::now();
    let mut checks = Checks::new();
    checks.assert("sweep complete", report.complete);
    if let Some(last) = report.rows.last() {
        let n = report.config.geometry.n as i32;
        let band = EXCESS_FRACTION * report.c_w * report.radius.powi(n - 1);
        checks.le("|excess| at smallest ε", last.excess.abs(), band);
    } else {
        checks.fail("sweep has no rows");
    }
    let floor = -EXCESS_FLOOR_FACTOR * report.config.tolerances.el_tol;
    for row in &report.rows {
        checks.ge(&format!("excess(ε = {})", row.eps), row.excess, floor);
    }
    for pair in report.rows.windows(2) {
        checks.le(
            &format!("|excess| decay at ε = {}", pair[1].eps),
            pair[1].excess.abs(),
            EXCESS_DECAY_SLACK * pair[0].excess.abs(),
        );
    }
    checks.into_outcome(
        3,
        "excess-vanishing",
        started,
        sweep_seconds,
        Some(SWEEP_BUDGET),
    )
}

/// Criterion 4: the mass multiplier approaches λ₀ with ελ_ε → 0, stays
/// nonnegative, and satisfies complementarity at every ε.
pub fn criterion_multiplier_limits(report: &SweepReport) -> CriterionOutcome {
    let started = Instant::now();
    let mut checks = Checks::new();
    if let Some(last) = report.rows.last() {
        checks.le(
            "|λ − λ₀|/c_W at smallest ε",
            (last.lambda - report.lambda0).abs() / report.c_w,
            LAMBDA_RELATIVE_TOL,
        );
        checks.le(
            "ελ at smallest ε",
            last.eps_lambda,
            EPS_LAMBDA_FRACTION * report.c_w,
        );
    } else {
        checks.fail("sweep has no rows");
    }
    for row in &report.rows {
        checks.ge(&format!("λ(ε = {})", row.eps), row.lambda, 0.0);
        checks.le(
            &format!("complementarity(ε = {})", row.eps),
            row.complementarity,
            report.config.tolerances.kkt_tol,
        );
    }
    checks.into_outcome(4, "multiplier-limits", started, 0.0, None)
}

/// Criterion 5: the interface shift obeys εδ_ε → 0 and is not significantly
/// negative at the two smallest ε.
pub fn criterion_shift_limits(report: &SweepReport) -> CriterionOutcome {
    let started = Instant::now();
    let mut checks = Checks::new();
    if let Some(last) = report.rows.last() {
        checks.le(
            "|εδ| at smallest ε",
            last.eps_delta.abs(),
            EPS_DELTA_FRACTION * report.radius,
        );
    } else {
        checks.fail("sweep has no rows");
    }
    let tail = report.rows.len().saturating_sub(2);
    for row in &report.rows[tail..] {
        checks.ge(
            &format!("δ(ε = {})", row.eps),
            row.delta,
            -report.config.tolerances.tol_delta,
        );
    }
    checks.into_outcome(5, "shift-limits", started, 0.0, None)
}

/// Criterion 6: the minimizer's plateau obeys the lower-barrier identity
/// min w̄_ε ≥ −1 − (ελ_ε/β)^{1/(β−1)} at every ε, up to additive slack.
pub fn criterion_lower_barrier(report: &SweepReport) -> CriterionOutcome {
    let started = Instant::now();
    let mut checks = Checks::new();
    let beta = report.config.well.beta;
    if report.rows.is_empty() {
        checks.fail("sweep has no rows");
    }
    for row in &report.rows {
        let barrier = (row.eps_lambda / beta).powf(1.0 / (beta - 1.0));
        checks.ge(
            &format!("min w̄ + 1 (ε = {})", row.eps),
            row.min_w_plus_one,
            -barrier - BARRIER_SLACK,
        );
    }
    checks.into_outcome(6, "lower-barrier", started, 0.0, None)
}

/// Criterion 7: the recovery family's mass error is second order with a
/// stable ε² coefficient, the correction energy obeys its closed-form
/// majorant wherever the family is admissible, and the corrected-energy
/// quotient is compared against its band at the smallest ε.
pub fn criterion_recovery_side() -> CriterionOutcome {
    let started = Instant::now();
    let mut checks = Checks::new();
    match reference_context().and_then(|ctx| {
        let recovery_cfg = ctx.recovery()?;
        Ok((ctx, recovery_cfg))
    }) {
        Ok((ctx, recovery_cfg)) => {
            let eps_list = ctx.config.eps.clone();
            let mut omegas = Vec::new();
            let mut admissible = Vec::new();
            for &eps in &eps_list {
                match recovery::mass_error(&recovery_cfg, eps) {
                    Ok(omega) => omegas.push((eps, omega)),
                    Err(e) => checks.fail(&format!("mass error at ε = {eps}: {e}")),
                }
                if let Ok(corrected) = recovery::corrected_energy(&recovery_cfg, eps) {
                    checks.le(
                        &format!("correction ≤ majorant (ε = {eps})"),
                        corrected.energy_corr,
                        corrected.majorant * (1.0 + 1e-9) + 1e-12,
                    );
                    admissible.push((eps, corrected));
                }
            }
            for pair in omegas.windows(2) {
                let (e0, q0) = (pair[0].0, pair[0].1 / (pair[0].0 * pair[0].0));
                let (_e1, q1) = (pair[1].0, pair[1].1 / (pair[1].0 * pair[1].0));
                let ratio = (q1 / q0).abs().max((q0 / q1).abs());
                checks.le(
                    &format!("ω/ε² consecutive ratio after ε = {e0}"),
                    ratio,
                    OMEGA_RATIO_BOUND,
                );
            }
            let eps: Vec<f64> = omegas.iter().map(|p| p.0).collect();
            let values: Vec<f64> = omegas.iter().map(|p| p.1).collect();
            match fit_exponent(&eps, &values) {
                Ok(rate) => checks.ge("fitted |ω| exponent", rate, OMEGA_RATE_FLOOR),
                Err(e) => checks.fail(&format!("ω rate fit: {e}")),
            }
            // The bump geometry must be admissible at the three smallest ε.
            let smallest: Vec<f64> = eps_list.iter().rev().take(3).cloned().collect();
            for eps in smallest {
                checks.assert(
                    &format!("corrected family admissible at ε = {eps}"),
                    admissible.iter().any(|(e, _)| *e == eps),
                );
            }
            let smallest_eps = eps_list.last().copied();
            match admissible.last() {
                Some((eps, corrected)) if Some(*eps) == smallest_eps => {
                    let band = QUOTIENT_FRACTION * ctx.leading_energy();
                    checks.le(
                        &format!("limsup quotient at ε = {eps}"),
                        corrected.limsup_quotient,
                        band,
                    );
                }
                _ => checks.fail("corrected family unavailable at the smallest ε"),
            }
        }
        Err(e) => checks.fail(&format!("recovery setup: {e}")),
    }
    checks.into_outcome(7, "recovery-side", started, 0.0, Some(RECOVERY_BUDGET))
}

/// Boundary integral ∫ Φ(ν) dH¹ over the polygonized Wulff boundary
/// ∂B^{Φ°}_r(0): the polygon vertices sit on the exact boundary and the
/// integrand is evaluated on segment normals.
fn perimeter_polygon(norm: &crate::anisotropy::AnisotropicNorm, r: f64, segments: usize) -> Result<f64> {
    let polar = norm.polar();
    let mut vertices = Vec::with_capacity(segments);
    for k in 0..segments {
        let theta = std::f64::consts::TAU * (k as f64 + 0.5) / segments as f64;
        let d = [theta.cos(), theta.sin()];
        let scale = r / polar.eval(&d)?;
        vertices.push([d[0] * scale, d[1] * scale]);
    }
    let mut total = 0.0;
    for k in 0..segments {
        let a = vertices[k];
        let b = vertices[(k + 1) % segments];
        let e = [b[0] - a[0], b[1] - a[1]];
        let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
        if len == 0.0 {
            continue;
        }
        let nu = [e[1] / len, -e[0] / len];
        total += norm.eval(&nu)? * len;
    }
    Ok(total)
}

/// Cell-counting area of the unit Φ°-ball: per grid row, the inside cells
/// form an interval (the gauge is even and convex), located by bisection;
/// the count equals brute-force cell counting at a fraction of the cost.
fn kappa_grid(norm: &crate::anisotropy::AnisotropicNorm, rows: usize) -> Result<f64> {
    let polar = norm.polar();
    let mut extent = 0.0f64;
    for k in 0..4096 {
        let theta = std::f64::consts::TAU * (k as f64 + 0.5) / 4096.0;
        let d = [theta.cos(), theta.sin()];
        let scale = 1.0 / polar.eval(&d)?;
        extent = extent.max((d[0] * scale).abs()).max((d[1] * scale).abs());
    }
    let l = 1.05 * extent;
    let h = 2.0 * l / rows as f64;
    let mut cells = 0u64;
    for j in 0..rows {
        let y = -l + (j as f64 + 0.5) * h;
        if polar.eval(&[0.0, y])? >= 1.0 {
            continue;
        }
        // Bisect the row's boundary abscissa b with Φ°(b, y) = 1.
        let (mut lo, mut hi) = (0.0f64, l);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if polar.eval(&[mid, y])? < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b = 0.5 * (lo + hi);
        // Cell centres x_i = −l + (i + 1/2) h with |x_i| < b.
        let first = ((l - b) / h - 0.5).ceil().max(0.0) as u64;
        let last = ((l + b) / h - 0.5).floor().min(rows as f64 - 1.0) as u64;
        if last >= first {
            cells += last - first + 1;
        }
    }
    Ok(cells as f64 * h * h)
}

/// Criterion 8: geometric identities of the gauge machinery against
/// independent oracles — a polygonized boundary integral for the Wulff
/// perimeter, a counting grid for κ_Φ, and a direction-mesh bipolar.
pub fn criterion_geometry() -> CriterionOutcome {
    let started = Instant::now();
    let mut checks = Checks::new();
    let norms: Vec<(&str, f64, Result<crate::anisotropy::AnisotropicNorm>)> = vec![
        (
            "euclidean",
            PERIMETER_TOL_EUCLIDEAN,
            crate::anisotropy::AnisotropicNorm::euclidean(2),
        ),
        (
            "ℓ¹",
            PERIMETER_TOL_L1,
            crate::anisotropy::AnisotropicNorm::weighted_p(2, 1.0, vec![1.0, 1.0]),
        ),
    ];
    for (label, perimeter_tol, norm) in norms {
        let norm = match norm {
            Ok(norm) => norm,
            Err(e) => {
                checks.fail(&format!("{label} construction: {e}"));
                continue;
            }
        };
        match (perimeter_polygon(&norm, 1.0, PERIMETER_SEGMENTS), norm.wulff_perimeter(1.0)) {
            (Ok(oracle), Ok(closed)) => checks.le(
                &format!("{label} perimeter rel. error"),
                (oracle - closed).abs() / closed,
                perimeter_tol,
            ),
            (Err(e), _) | (_, Err(e)) => checks.fail(&format!("{label} perimeter: {e}")),
        }
        match kappa_grid(&norm, KAPPA_GRID_ROWS) {
            Ok(area) => checks.le(
                &format!("{label} κ_Φ grid rel. error"),
                (area - norm.kappa()).abs() / norm.kappa(),
                KAPPA_GRID_TOL,
            ),
            Err(e) => checks.fail(&format!("{label} κ grid: {e}")),
        }
        let mut worst = 0.0f64;
        let mut failed = None;
        for k in 0..32 {
            let theta = std::f64::consts::TAU * (k as f64 + 0.3) / 32.0;
            let xi = [1.7 * theta.cos(), 1.7 * theta.sin()];
            match (norm.bipolar_numeric(&xi, BIPOLAR_MESH), norm.eval(&xi)) {
                (Ok(bipolar), Ok(direct)) => {
                    worst = worst.max((bipolar - direct).abs() / direct)
                }
                (Err(e), _) | (_, Err(e)) => failed = Some(format!("{label} bipolar: {e}")),
            }
        }
        match failed {
            None => checks.le(&format!("{label} bipolar rel. error"), worst, BIPOLAR_TOL),
            Some(message) => checks.fail(&message),
        }
    }
    checks.into_outcome(8, "geometry", started, 0.0, None)
}

/// Criterion 9: on seeded smooth fields, the convex rearrangement is
/// equimeasurable within one cell layer per level, decreases the
/// anisotropic Dirichlet energy (Pólya–Szegő with grid slack), and
/// preserves the W-integral with a gap that shrinks under refinement.
pub fn criterion_rearrangement() -> CriterionOutcome {
    let started = Instant::now();
    let mut checks = Checks::new();
    match reference_context() {
        Ok(ctx) => {
            let mut gap_seed7 = f64::NAN;
            for seed in 0..REARRANGE_SEEDS {
                let verdict = GridField::seeded(&ctx.norm, ctx.config.geometry.big_r, REARRANGE_CELLS, seed)
                    .and_then(|field| {
                        let report = field.check_polya_szego(&ctx.well)?;
                        let profile = field.convex_rearrange();
                        let max = field.max_value();
                        let mut worst_ratio = 0.0f64;
                        for k in 1..50 {
                            let level = max * k as f64 / 50.0;
                            let area_in = field.distribution(&[level])?[0];
                            let area_out = profile.superlevel_area(level);
                            let tol = 2.0 * field.h() * field.level_perimeter_estimate(level);
                            if tol > 0.0 {
                                worst_ratio = worst_ratio.max((area_in - area_out).abs() / tol);
                            } else if area_in != area_out {
                                worst_ratio = f64::INFINITY;
                            }
                        }
                        Ok((report, worst_ratio))
                    });
                match verdict {
                    Ok((report, worst_ratio)) => {
                        checks.le(&format!("seed {seed} equimeasurability"), worst_ratio, 1.0);
                        checks.assert(
                            &format!(
                                "seed {seed} Pólya–Szegő ({} ≤ {})",
                                short(report.radial_dirichlet),
                                short(report.grid_dirichlet)
                            ),
                            report.polya_szego_ok,
                        );
                        checks.le(&format!("seed {seed} W gap"), report.well_gap, WELL_GAP_BOUND);
                        if seed == 7 {
                            gap_seed7 = report.well_gap;
                        }
                    }
                    Err(e) => checks.fail(&format!("seed {seed}: {e}")),
                }
            }
            // Refinement: the seed-7 gap must shrink markedly at 512².
            let refined = GridField::seeded(&ctx.norm, ctx.config.geometry.big_r, 2 * REARRANGE_CELLS, 7)
                .and_then(|field| field.check_polya_szego(&ctx.well));
            match refined {
                Ok(report) => checks.le(
                    "seed 7 W gap at 512²",
                    report.well_gap,
                    (WELL_GAP_SHRINK * gap_seed7).max(1e-10),
                ),
                Err(e) => checks.fail(&format!("refined seed 7: {e}")),
            }
        }
        Err(e) => checks.fail(&format!("rearrangement setup: {e}")),
    }
    checks.into_outcome(9, "rearrangement", started, 0.0, Some(REARRANGE_BUDGET))
}

/// Full 2-D grid evaluation of E_ε(û_ε) for the uncorrected recovery front:
/// field values from the profile, gradients by central differences, both
/// parts summed over a cell grid covering the domain.
fn grid_energy_of_front(ctx: &RunContext, eps: f64, cells: usize) -> Result<f64> {
    let polar = ctx.norm.polar();
    let mut extent = 0.0f64;
    for k in 0..4096 {
        let theta = std::f64::consts::TAU * (k as f64 + 0.5) / 4096.0;
        let d = [theta.cos(), theta.sin()];
        let scale = ctx.config.geometry.big_r / polar.eval(&d)?;
        extent = extent.max((d[0] * scale).abs()).max((d[1] * scale).abs());
    }
    let l = 1.05 * extent;
    let h = 2.0 * l / cells as f64;
    let mut values = vec![0.0f64; cells * cells];
    for j in 0..cells {
        let y = -l + (j as f64 + 0.5) * h;
        for i in 0..cells {
            let x = -l + (i as f64 + 0.5) * h;
            let gauge = polar.eval(&[x, y])?;
            values[j * cells + i] = ctx.profile.eval((gauge - ctx.radius) / eps);
        }
    }
    let at = |i: isize, j: isize| -> f64 {
        let i = i.clamp(0, cells as isize - 1);
        let j = j.clamp(0, cells as isize - 1);
        values[j as usize * cells as usize + i as usize]
    };
    let mut well_sum = 0.0;
    let mut kinetic_sum = 0.0;
    for j in 0..cells as isize {
        for i in 0..cells as isize {
            well_sum += ctx.well.value(at(i, j));
            let gx = (at(i + 1, j) - at(i - 1, j))
                / (h * (((i + 1).min(cells as isize - 1) - (i - 1).max(0)) as f64));
            let gy = (at(i, j + 1) - at(i, j - 1))
                / (h * (((j + 1).min(cells as isize - 1) - (j - 1).max(0)) as f64));
            if gx != 0.0 || gy != 0.0 {
                let phi = ctx.norm.eval(&[gx, gy])?;
                kinetic_sum += phi * phi;
            }
        }
    }
    Ok(h * h * (well_sum / eps + eps * kinetic_sum))
}

/// Criterion 10: the 1-D layer quadrature of the recovery front's energy
/// agrees with an independent 2-D grid evaluation.
pub fn criterion_cross_check() -> CriterionOutcome {
    let started = Instant::now();
    let mut checks = Checks::new();
    match reference_context().and_then(|ctx| {
        let recovery_cfg = ctx.recovery()?;
        let one_d = recovery::recovery_energy(&recovery_cfg, CROSS_CHECK_EPS)?;
        let two_d = grid_energy_of_front(&ctx, CROSS_CHECK_EPS, CROSS_CHECK_CELLS)?;
        Ok((one_d, two_d))
    }) {
        Ok((one_d, two_d)) => {
            checks.le(
                &format!("|2-D − 1-D| / 1-D ({} vs {})", short(two_d), short(one_d)),
                (two_d - one_d).abs() / one_d,
                CROSS_CHECK_TOL,
            );
        }
        Err(e) => checks.fail(&format!("cross-check evaluation: {e}")),
    }
    checks.into_outcome(10, "cross-check", started, 0.0, None)
}

/// Runs the whole suite in criterion order.
pub fn run_all() -> AcceptanceReport {
    let mut outcomes = Vec::with_capacity(10);
    outcomes.push(criterion_profile_identities());
    outcomes.push(criterion_discrete_minimality());
    match reference_sweep() {
        Ok((report, seconds)) => {
            outcomes.push(criterion_excess_vanishing(&report, seconds));
            outcomes.push(criterion_multiplier_limits(&report));
            outcomes.push(criterion_shift_limits(&report));
            outcomes.push(criterion_lower_barrier(&report));
        }
        Err(e) => {
            for (index, name) in [
                (3usize, "excess-vanishing"),
                (4, "multiplier-limits"),
                (5, "shift-limits"),
                (6, "lower-barrier"),
            ] {
                outcomes.push(CriterionOutcome {
                    index,
                    name,
                    passed: false,
                    details: format!("FAIL reference sweep: {e}"),
                    seconds: 0.0,
                });
            }
        }
    }
    outcomes.push(criterion_recovery_side());
    outcomes.push(criterion_geometry());
    outcomes.push(criterion_rearrangement());
    outcomes.push(criterion_cross_check());
    let passed = outcomes.iter().all(|outcome| outcome.passed);
    AcceptanceReport { outcomes, passed }
}
