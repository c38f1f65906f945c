//! The ε-sweep driver: one row of limit diagnostics per ε.
//!
//! The headline statement under test is the second-order expansion
//!
//!   min F_ε = c_W P_Φ(E₀) + o(ε)   (after division by ε),
//!
//! whose two halves are verified from opposite sides.  On the liminf side
//! the constrained radial minimizer w̄_ε yields the excess
//! (H_ε(w̄_ε) − c_W r^{n−1})/ε, the mass multiplier λ_ε, and the interface
//! shift δ_ε; on the limsup side the explicit recovery family yields the
//! mass error ω_ε and the corrected-energy quotient.  A sweep solves both
//! at every requested ε and merges the rows, newest constants in the
//! header, so a single report captures every limit column:
//!
//!   excess → 0,   λ_ε → λ₀,   ελ_ε → 0,   εδ_ε → 0,
//!   ω_ε = O(ε²),  (E_ε(u_ε) − n κ_Φ c_W r^{n−1})/ε → 0.
//!
//! Rows are computed independently (a worker pool over ε) and merged in the
//! configured order, so reports are deterministic given the config: no
//! cross-row state exists, and each row's arithmetic is identical whatever
//! the pool size.  A solver failure marks its row and the report as
//! incomplete rather than aborting the sweep; recovery columns that are
//! geometrically inadmissible at large ε (the correction bump would overlap
//! the layer) are reported as NaN, which downstream fits skip.
//!
//! Asymptotic rates are read off by log-log least squares over the rows —
//! three decades are not available at desk scale, but four ε per octave
//! suffice to separate O(ε) from O(ε²) columns.

use crate::config::{RunConfig, RunContext};
use crate::error::{Error, Result};
use crate::recovery::{self, RecoveryConfig};

use rayon::prelude::*;

/// One ε of the sweep: the liminf-side solve, the limsup-side family, and
/// solver diagnostics.  Value columns are NaN when the underlying quantity
/// is unavailable (failed solve, inadmissible recovery geometry).
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub eps: f64,
    /// (H_ε(w̄_ε) − c_W r^{n−1}) / ε.
    pub excess: f64,
    /// Mass multiplier λ_ε of the radial solve.
    pub lambda: f64,
    /// ελ_ε, which must vanish in the limit.
    pub eps_lambda: f64,
    /// Interface shift δ_ε: the stretched zero crossing of w̄_ε.
    pub delta: f64,
    /// εδ_ε, which must vanish in the limit.
    pub eps_delta: f64,
    /// min w̄_ε + 1: the distance the minimizer dips below the pure phase.
    pub min_w_plus_one: f64,
    /// Mass error ω_ε of the uncorrected recovery front.
    pub omega: f64,
    /// ω_ε/ε², bounded along the sweep.
    pub omega_over_eps2: f64,
    /// (E_ε(u_ε) − n κ_Φ c_W r^{n−1}) / ε for the corrected family; NaN
    /// when the bump geometry is inadmissible at this ε.
    pub limsup_quotient: f64,
    /// Correction energy of the admissible family (diagnostic).
    pub energy_corr: f64,
    /// Closed-form majorant of the correction energy (diagnostic).
    pub majorant: f64,
    /// |λ_ε · slack|: KKT complementarity of the mass constraint.
    pub complementarity: f64,
    /// Interior Euler–Lagrange defect of the solve.
    pub el_residual: f64,
    /// Inner Newton iterations used.
    pub iterations: usize,
    /// Whether the radial solve converged.
    pub converged: bool,
}

/// Fitted log-log exponents of the decaying columns.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    /// Exponent of |excess| vs ε.
    pub excess: f64,
    /// Exponent of |ω_ε| vs ε.
    pub omega: f64,
    /// Exponent of ελ_ε vs ε.
    pub eps_lambda: f64,
    /// Exponent of |εδ_ε| vs ε.
    pub eps_delta: f64,
}

/// A finished sweep: the config echo, the derived constants of the run,
/// and one row per ε.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub config: RunConfig,
    /// Transition cost c_W.
    pub c_w: f64,
    /// Saturation time τ_W of the profile.
    pub tau_w: f64,
    /// κ_Φ: volume of the unit Φ°-ball.
    pub kappa: f64,
    /// Interface radius r of the reference configuration.
    pub radius: f64,
    /// Multiplier limit λ₀ = (n − 1) c_W / (2r).
    pub lambda0: f64,
    pub rows: Vec<SweepRow>,
    /// False when any radial solve failed to converge.
    pub complete: bool,
}

impl SweepRow {
    /// A row whose solve produced nothing: all value columns NaN.
    fn failed(eps: f64) -> Self {
        SweepRow {
            eps,
            excess: f64::NAN,
            lambda: f64::NAN,
            eps_lambda: f64::NAN,
            delta: f64::NAN,
            eps_delta: f64::NAN,
            min_w_plus_one: f64::NAN,
            omega: f64::NAN,
            omega_over_eps2: f64::NAN,
            limsup_quotient: f64::NAN,
            energy_corr: f64::NAN,
            majorant: f64::NAN,
            complementarity: f64::NAN,
            el_residual: f64::NAN,
            iterations: 0,
            converged: false,
        }
    }
}

/// Computes one sweep row.  Solver failures are encoded in the row rather
/// than propagated: the sweep reports what it could compute.
fn solve_row(ctx: &RunContext, recovery_cfg: &RecoveryConfig, eps: f64) -> SweepRow {
    let mut row = SweepRow::failed(eps);

    // Liminf side: the constrained radial minimizer.
    let solved = ctx.problem(eps).and_then(|problem| {
        let result = problem.minimize(&ctx.config.solver_options())?;
        let (delta, _crossings) = problem.zero_crossing(&result.w)?;
        Ok((result, delta))
    });
    if let Ok((result, delta)) = solved {
        row.excess = (result.energy_h
            - ctx.well.c_w() * ctx.radius.powi(ctx.config.geometry.n as i32 - 1))
            / eps;
        row.lambda = result.lambda;
        row.eps_lambda = eps * result.lambda;
        row.delta = delta;
        row.eps_delta = eps * delta;
        row.min_w_plus_one = result.min_w + 1.0;
        row.complementarity = (result.lambda * result.constraint_slack).abs();
        row.el_residual = result.el_residual;
        row.iterations = result.iterations;
        row.converged = result.converged;
    }

    // Limsup side: the recovery family.  Geometric inadmissibility at large
    // ε (bump support reaching the layer, or the layer reaching the domain
    // boundary) leaves NaN columns; the fits skip them.
    if let Ok(omega) = recovery::mass_error(recovery_cfg, eps) {
        row.omega = omega;
        row.omega_over_eps2 = omega / (eps * eps);
    }
    if let Ok(corrected) = recovery::corrected_energy(recovery_cfg, eps) {
        row.limsup_quotient = corrected.limsup_quotient;
        row.energy_corr = corrected.energy_corr;
        row.majorant = corrected.majorant;
    }
    row
}

/// Runs the sweep of the config: validates, resolves the geometry, then
/// solves every ε on a worker pool and merges the rows in the configured
/// (strictly decreasing) order.
pub fn run_sweep(config: &RunConfig) -> Result<SweepReport> {
    let ctx = config.context()?;
    let recovery_cfg = ctx.recovery()?;
    let rows: Vec<SweepRow> = config
        .eps
        .par_iter()
        .map(|&eps| solve_row(&ctx, &recovery_cfg, eps))
        .collect();
    let complete = rows.iter().all(|row| row.converged);
    Ok(SweepReport {
        config: config.clone(),
        c_w: ctx.well.c_w(),
        tau_w: ctx.profile.tau(),
        kappa: ctx.norm.kappa(),
        radius: ctx.radius,
        lambda0: ctx.lambda0(),
        rows,
        complete,
    })
}

/// Log-log least-squares exponent of |values| against eps.  Pairs with
/// nonpositive ε or vanishing/non-finite values are skipped; fewer than
/// three usable pairs is an error, not a fit.
pub fn fit_exponent(eps: &[f64], values: &[f64]) -> Result<f64> {
    if eps.len() != values.len() {
        return Err(Error::Domain(format!(
            "rate fit needs matching lengths, got {} and {}",
            eps.len(),
            values.len()
        )));
    }
    let points: Vec<(f64, f64)> = eps
        .iter()
        .zip(values.iter())
        .filter(|(&e, &v)| e > 0.0 && v.is_finite() && v != 0.0)
        .map(|(&e, &v)| (e.ln(), v.abs().ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs at least 3 usable rows, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in &points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "rate fit needs at least two distinct ε".to_string(),
        ));
    }
    Ok(sxy / sxx)
}

/// Fits the exponents of the four decaying columns over the converged rows.
pub fn fit_rates(report: &SweepReport) -> Result<RateFit> {
    let rows: Vec<&SweepRow> = report.rows.iter().filter(|row| row.converged).collect();
    if rows.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate fits need at least 3 completed rows, got {}",
            rows.len()
        )));
    }
    let eps: Vec<f64> = rows.iter().map(|row| row.eps).collect();
    let column = |extract: fn(&SweepRow) -> f64| -> Vec<f64> {
        rows.iter().map(|row| extract(row)).collect()
    };
    Ok(RateFit {
        excess: fit_exponent(&eps, &column(|row| row.excess))?,
        omega: fit_exponent(&eps, &column(|row| row.omega))?,
        eps_lambda: fit_exponent(&eps, &column(|row| row.eps_lambda))?,
        eps_delta: fit_exponent(&eps, &column(|row| row.eps_delta))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn reference() -> &'static SweepReport {
        static REPORT: OnceLock<SweepReport> = OnceLock::new();
        REPORT.get_or_init(|| {
            run_sweep(&RunConfig::default()).expect("reference sweep runs")
        })
    }

    #[test]
    fn reference_sweep_reaches_the_limit_values() {
        let report = reference();
        assert!(report.complete, "all reference solves converge");
        assert_eq!(report.rows.len(), 4);
        let last = report.rows.last().expect("four rows");
        assert_eq!(last.eps, 0.0125);
        // λ_ε approaches λ₀ = (n−1) c_W / (2r) = c_W at the reference.
        assert!(
            (last.lambda - report.lambda0).abs() / report.lambda0 < 0.01,
            "λ = {} vs λ₀ = {}",
            last.lambda,
            report.lambda0
        );
        // The excess is negative (the minimizer slides inward of the frozen
        // front) and |excess| decays through the sweep.
        for pair in report.rows.windows(2) {
            assert!(pair[0].excess < 0.0);
            assert!(
                pair[1].excess.abs() < pair[0].excess.abs(),
                "|excess| must decrease: {} then {}",
                pair[0].excess,
                pair[1].excess
            );
        }
        // ω_ε/ε² is a stable negative constant.
        for row in &report.rows {
            assert!(row.omega_over_eps2 < 0.0);
            assert!(
                (row.omega_over_eps2 - report.rows[0].omega_over_eps2).abs() < 0.1,
                "ω/ε² drifts: {} vs {}",
                row.omega_over_eps2,
                report.rows[0].omega_over_eps2
            );
        }
        // The corrected family is inadmissible at ε = 0.1 (the bump support
        // reaches the layer) and admissible from ε = 0.05 on.
        assert!(report.rows[0].limsup_quotient.is_nan());
        for row in &report.rows[1..] {
            assert!(row.limsup_quotient.is_finite());
            assert!(row.energy_corr <= row.majorant * (1.0 + 1e-9));
        }
    }

    #[test]
    fn sweeps_are_deterministic() {
        let report = reference();
        let again = run_sweep(&RunConfig::default()).expect("second run");
        assert_eq!(report.rows.len(), again.rows.len());
        for (a, b) in report.rows.iter().zip(again.rows.iter()) {
            assert_eq!(a.excess.to_bits(), b.excess.to_bits());
            assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
            assert_eq!(a.delta.to_bits(), b.delta.to_bits());
            assert_eq!(a.omega.to_bits(), b.omega.to_bits());
            assert_eq!(
                a.limsup_quotient.to_bits(),
                b.limsup_quotient.to_bits()
            );
        }
    }

    #[test]
    fn an_empty_eps_list_yields_a_header_only_report() {
        let mut config = RunConfig::default();
        config.eps.clear();
        let report = run_sweep(&config).expect("header-only sweep");
        assert!(report.rows.is_empty());
        assert!(report.complete);
        assert!((report.c_w - report.lambda0).abs() < 1e-12);
    }

    #[test]
    fn saturated_mass_bounds_fail_before_any_solve() {
        let mut config = RunConfig::default();
        config.geometry.r = None;
        config.geometry.m = Some(config.norm().expect("norm").kappa());
        match run_sweep(&config) {
            Err(Error::Constraint(_)) => {}
            other => panic!("expected a constraint error, got {other:?}"),
        }
    }

    #[test]
    fn reference_rates_separate_first_from_second_order() {
        let rates = fit_rates(reference()).expect("four converged rows");
        assert!(
            (0.8..=1.2).contains(&rates.excess),
            "excess decays first order, fitted {}",
            rates.excess
        );
        assert!(
            (1.8..=2.2).contains(&rates.omega),
            "mass error decays second order, fitted {}",
            rates.omega
        );
        assert!(
            (0.9..=1.1).contains(&rates.eps_lambda),
            "ελ decays first order, fitted {}",
            rates.eps_lambda
        );
        assert!(
            (1.7..=2.2).contains(&rates.eps_delta),
            "εδ decays second order, fitted {}",
            rates.eps_delta
        );
    }

    #[test]
    fn synthetic_columns_fit_their_exact_exponents() {
        let eps = [0.1, 0.05, 0.025, 0.0125];
        let quadratic: Vec<f64> = eps.iter().map(|e| -3.7 * e * e).collect();
        let fitted = fit_exponent(&eps, &quadratic).expect("quadratic fit");
        assert!(
            (fitted - 2.0).abs() <= 1e-6,
            "exact quadratic data must fit exponent 2, got {fitted}"
        );
        let constant = [4.2, 4.2, 4.2, 4.2];
        let flat = fit_exponent(&eps, &constant).expect("constant fit");
        assert!(flat.abs() <= 1e-12, "constant column must fit 0, got {flat}");
    }

    #[test]
    fn rate_fits_demand_three_usable_rows() {
        let eps = [0.1, 0.05];
        assert!(matches!(
            fit_exponent(&eps, &[1.0, 2.0]),
            Err(Error::InsufficientData(_))
        ));
        // NaN rows do not count as usable.
        let eps = [0.1, 0.05, 0.025, 0.0125];
        let gappy = [1.0, f64::NAN, f64::NAN, 2.0];
        assert!(matches!(
            fit_exponent(&eps, &gappy),
            Err(Error::InsufficientData(_))
        ));
        assert!(fit_exponent(&eps, &[1.0, 2.0, 3.0]).is_err());
    }
}
