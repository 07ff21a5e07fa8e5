//! Inversion of a target error probability into the boundary shift `beta`
//! by Newton-Raphson with a bracketing bisection safeguard.
//!
//! The scalar objective is `g(beta) = ber(beta) - P` for the SISO error
//! curves, or the shifted union bound minus `P` for the MIMO case. Both
//! curves have a unique minimum at `d_min / 2`, so a feasible target has
//! two roots, one on each side; the solver picks the requested branch.

use crate::analytics::MimoBoundParams;
use crate::constellation::Scheme;
use crate::error::{Error, Result};
use crate::special::erfc;

/// Which of the two symmetric roots to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Lower,
    Upper,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Lower => "lower",
            Branch::Upper => "upper",
        }
    }
}

/// Solver knobs. Defaults: `|g| <= 1e-12`, 100 iterations, lower branch.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub branch: Branch,
    /// Starting point; `None` picks the bracket edge nearest zero on the
    /// lower branch (the textbook `beta_0 = 0` start, nudged off the
    /// singular point for the MIMO objective).
    pub beta0: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-12,
            max_iter: 100,
            branch: Branch::Lower,
            beta0: None,
        }
    }
}

/// A solved threshold.
#[derive(Debug, Clone)]
pub struct BetaSolution {
    pub beta: f64,
    pub target_p: f64,
    /// `|g(beta)|` at exit.
    pub residual: f64,
    pub iterations: usize,
    pub branch: Branch,
    pub converged: bool,
    /// Successive iterates, including the final one.
    pub trace: Vec<f64>,
}

/// Per-scheme coefficient `a` of `ser = a [erfc((d-b)/sqrt(N0)) + erfc(b/sqrt(N0))]`
/// together with `k = log2(M)`.
pub fn siso_coefficients(scheme: Scheme, m: usize) -> (f64, f64) {
    let k = (m as f64).log2();
    let a = match scheme {
        Scheme::Bpsk => 0.25,
        Scheme::Pam => {
            assert!(m == 4, "only 4-PAM analytics are exposed");
            0.375
        }
        Scheme::Qam => 1.0 - 1.0 / (m as f64).sqrt(),
    };
    (a, k)
}

/// One-dimensional error curve whose BER is inverted by the solver.
#[derive(Debug, Clone, Copy)]
pub struct SisoCurve {
    pub scheme: Scheme,
    pub m: usize,
    pub d_min: f64,
    pub n0: f64,
}

impl SisoCurve {
    pub fn new(scheme: Scheme, m: usize, d_min: f64, n0: f64) -> Self {
        assert!(d_min > 0.0 && n0 > 0.0);
        SisoCurve { scheme, m, d_min, n0 }
    }

    /// BER as a function of the boundary shift.
    pub fn ber(&self, beta: f64) -> f64 {
        let (a, k) = siso_coefficients(self.scheme, self.m);
        let s = self.n0.sqrt();
        a / k * (erfc((self.d_min - beta) / s) + erfc(beta / s))
    }

    /// Derivative of [`SisoCurve::ber`] in `beta`.
    pub fn ber_prime(&self, beta: f64) -> f64 {
        let (a, k) = siso_coefficients(self.scheme, self.m);
        let s = self.n0.sqrt();
        let c = 2.0 * a / (k * std::f64::consts::PI.sqrt() * s);
        let far = self.d_min - beta;
        c * ((-far * far / self.n0).exp() - (-beta * beta / self.n0).exp())
    }
}

/// SISO Newton objective for square M-QAM: `(1 - 1/sqrt(M))/k`-weighted
/// erfc terms minus the target BER.
pub fn g_siso(beta: f64, target_p: f64, m: usize, p: &crate::analytics::SisoErrorParams) -> f64 {
    SisoCurve::new(Scheme::Qam, m, p.d_min, p.n0).ber(beta) - target_p
}

/// Derivative of [`g_siso`] in `beta`.
pub fn g_siso_prime(beta: f64, m: usize, p: &crate::analytics::SisoErrorParams) -> f64 {
    SisoCurve::new(Scheme::Qam, m, p.d_min, p.n0).ber_prime(beta)
}

fn mimo_check_regular(beta: f64, b: &MimoBoundParams) -> Result<()> {
    if beta <= 0.0 || b.pair_distances.iter().any(|&d| (d - beta).abs() <= 1e-9) {
        return Err(Error::SingularPoint(beta));
    }
    Ok(())
}

/// MIMO Newton objective: shifted union bound minus the target.
/// Singular at `beta = 0` and at every pair distance.
pub fn g_mimo(beta: f64, target_p: f64, b: &MimoBoundParams) -> Result<f64> {
    mimo_check_regular(beta, b)?;
    if b.pair_distances.is_empty() {
        return Err(Error::EmptyPairs);
    }
    let c = b.leading_constant();
    let nr = b.nr as i32;
    let near = (1.0 / (4.0 * beta * beta)).powi(nr);
    let sum: f64 = b
        .pair_distances
        .iter()
        .map(|&d| {
            let shifted = d - beta;
            (1.0 / (4.0 * shifted * shifted)).powi(nr) + near
        })
        .sum();
    Ok(c * sum - target_p)
}

/// Derivative of [`g_mimo`] in `beta`.
pub fn g_mimo_prime(beta: f64, b: &MimoBoundParams) -> Result<f64> {
    mimo_check_regular(beta, b)?;
    if b.pair_distances.is_empty() {
        return Err(Error::EmptyPairs);
    }
    let c = b.leading_constant();
    let nr = b.nr as i32;
    let scale = 2.0 * b.nr as f64 / 4.0f64.powi(nr);
    let near = -scale / beta.powi(2 * nr + 1);
    let sum: f64 = b
        .pair_distances
        .iter()
        .map(|&d| scale / (d - beta).powi(2 * nr + 1) + near)
        .sum();
    Ok(c * sum)
}

const BRACKET_EPS: f64 = 1e-9;

/// Find the root of `g` on the requested branch of `(0, d_min)`.
///
/// `g` must have its minimum at `d_min / 2`; the lower-branch bracket is
/// `(eps * d_min, d_min / 2]` and the upper is the mirror image. Newton
/// steps that leave the current bracket are replaced by one bisection
/// step, so the hybrid always terminates for a sign-changing bracket.
pub fn solve_beta<G, Gp>(
    g: G,
    gprime: Gp,
    d_min: f64,
    target_p: f64,
    cfg: &SolverConfig,
) -> Result<BetaSolution>
where
    G: Fn(f64) -> Result<f64>,
    Gp: Fn(f64) -> Result<f64>,
{
    assert!(d_min > 0.0 && cfg.tol > 0.0 && cfg.max_iter >= 1);
    let mid = d_min / 2.0;
    let edge = match cfg.branch {
        Branch::Lower => BRACKET_EPS * d_min,
        Branch::Upper => d_min * (1.0 - BRACKET_EPS),
    };

    let g_mid = g(mid)?;
    if g_mid > cfg.tol {
        // target below the curve minimum
        return Err(Error::Infeasible {
            target: target_p,
            minimum: g_mid + target_p,
        });
    }
    if g_mid.abs() <= cfg.tol {
        // the target sits at the curve minimum; the midpoint is the root
        // on either branch (Newton would crawl in from the side, since
        // the derivative vanishes here)
        return Ok(BetaSolution {
            beta: mid,
            target_p,
            residual: g_mid.abs(),
            iterations: 1,
            branch: cfg.branch,
            converged: true,
            trace: vec![mid],
        });
    }
    let g_edge = g(edge)?;
    if g_edge < -cfg.tol {
        // target above the curve value at the bracket edge; no root on
        // this branch (the curve never climbs back up to P here)
        return Err(Error::TargetUnreachable {
            target: target_p,
            ceiling: g_edge + target_p,
        });
    }

    // bracket [lo, hi] ordered by position, with sign(g) known at both ends
    let (mut lo, mut hi) = match cfg.branch {
        Branch::Lower => (edge, mid),
        Branch::Upper => (mid, edge),
    };
    let mut beta = cfg
        .beta0
        .unwrap_or(match cfg.branch {
            Branch::Lower => lo,
            Branch::Upper => hi,
        })
        .clamp(lo, hi);

    let mut trace = Vec::with_capacity(16);
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_iter {
        trace.push(beta);
        let gv = g(beta)?;
        residual = gv.abs();
        if residual <= cfg.tol {
            return Ok(BetaSolution {
                beta,
                target_p,
                residual,
                iterations: iter,
                branch: cfg.branch,
                converged: true,
                trace,
            });
        }
        // shrink the bracket: on the lower branch g decreases left to
        // right (positive at lo, negative at hi); mirrored on the upper
        let positive_side_is_lo = matches!(cfg.branch, Branch::Lower);
        if (gv > 0.0) == positive_side_is_lo {
            // gv has the sign of the `lo` end
            lo = beta;
        } else {
            hi = beta;
        }
        let gp = gprime(beta)?;
        let newton = beta - gv / gp;
        beta = if gp != 0.0 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        residual,
    })
}

/// Solve the SISO curve for a target BER.
pub fn solve_beta_siso(curve: &SisoCurve, target_ber: f64, cfg: &SolverConfig) -> Result<BetaSolution> {
    solve_beta(
        |b| Ok(curve.ber(b) - target_ber),
        |b| Ok(curve.ber_prime(b)),
        curve.d_min,
        target_ber,
        cfg,
    )
}

/// Solve the MIMO shifted union bound for a target probability.
/// `d_min` is the minimum pair distance of the product lattice; the start
/// point defaults to `0.01 * d_min` because the objective is singular at 0.
pub fn solve_beta_mimo(b: &MimoBoundParams, target_p: f64, cfg: &SolverConfig) -> Result<BetaSolution> {
    if b.pair_distances.is_empty() {
        return Err(Error::EmptyPairs);
    }
    let d_min = b.pair_distances.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut cfg = *cfg;
    if cfg.beta0.is_none() && cfg.branch == Branch::Lower {
        cfg.beta0 = Some(0.01 * d_min);
    }
    solve_beta(
        |beta| g_mimo(beta, target_p, b),
        |beta| g_mimo_prime(beta, b),
        d_min,
        target_p,
        &cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::SisoErrorParams;

    fn qam16_curve(snr_db: f64) -> SisoCurve {
        let n0 = 10f64.powf(-snr_db / 10.0);
        SisoCurve::new(Scheme::Qam, 16, 2.0 / 10.0_f64.sqrt(), n0)
    }

    /// Independent root oracle: plain bisection to machine precision.
    fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        assert!(f(lo) * f(hi) <= 0.0, "oracle bracket must change sign");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn g_siso_fixed_points() {
        let c = qam16_curve(10.0);
        let p = SisoErrorParams::new(c.d_min, c.n0, 0.1);
        // at the minimum with target = minimum, g vanishes
        let pmin_ber = c.ber(c.d_min / 2.0);
        assert!(g_siso(c.d_min / 2.0, pmin_ber, 16, &p).abs() < 1e-16);
        // symmetry
        for i in 1..20 {
            let b = c.d_min * i as f64 / 40.0;
            assert!((g_siso(b, 0.01, 16, &p) - g_siso(c.d_min - b, 0.01, 16, &p)).abs() < 1e-15);
        }
        // beta = 0 closed form
        let s = c.n0.sqrt();
        let want = 0.75 / 4.0 * (erfc(c.d_min / s) + 1.0) - 0.01;
        assert!((g_siso(0.0, 0.01, 16, &p) - want).abs() < 1e-15);
    }

    #[test]
    fn g_siso_prime_matches_finite_differences() {
        for snr_db in [4.0, 8.0, 12.0] {
            let c = qam16_curve(snr_db);
            let p = SisoErrorParams::new(c.d_min, c.n0, 0.1);
            let h = 1e-6 * c.d_min;
            for i in 1..=19 {
                let b = c.d_min * i as f64 / 20.0;
                let analytic = g_siso_prime(b, 16, &p);
                let fd = (g_siso(b + h, 0.0, 16, &p) - g_siso(b - h, 0.0, 16, &p)) / (2.0 * h);
                if analytic.abs() > 1e-12 {
                    assert!(
                        ((analytic - fd) / analytic).abs() < 1e-6,
                        "snr {snr_db} beta {b}: {analytic} vs fd {fd}"
                    );
                }
            }
            assert!(g_siso_prime(c.d_min / 2.0, 16, &p).abs() < 1e-14);
            assert!(g_siso_prime(0.0, 16, &p) < 0.0);
        }
    }

    #[test]
    fn g_mimo_shape_and_derivative() {
        let b = MimoBoundParams {
            nr: 2,
            n0: 0.1,
            pair_distances: vec![0.8, 1.1, 1.6],
            ms: vec![4, 4],
        };
        // divergence toward the singular origin
        assert!(g_mimo(1e-6, 0.0, &b).unwrap() > 1e12);
        assert!(matches!(g_mimo(0.0, 0.0, &b), Err(Error::SingularPoint(_))));
        assert!(matches!(g_mimo(0.8, 0.0, &b), Err(Error::SingularPoint(_))));

        let d_min = 0.8;
        let h = 1e-7 * d_min;
        for i in 2..=18 {
            let beta = d_min * i as f64 / 20.0;
            let analytic = g_mimo_prime(beta, &b).unwrap();
            let fd = (g_mimo(beta + h, 0.0, &b).unwrap() - g_mimo(beta - h, 0.0, &b).unwrap())
                / (2.0 * h);
            assert!(
                ((analytic - fd) / analytic).abs() < 1e-6,
                "beta {beta}: {analytic} vs fd {fd}"
            );
        }
    }

    #[test]
    fn solve_single_pair_matches_bisection_oracle() {
        // Nr = 1, one symmetric pair: g(beta) = C [1/(4(d-beta)^2) + 1/(4 beta^2)] - P
        let d = 1.0;
        let b = MimoBoundParams {
            nr: 1,
            n0: 0.05,
            pair_distances: vec![d],
            ms: vec![2],
        };
        let c = b.leading_constant();
        let target = 4.0 * (c * (1.0 / (4.0 * (d - 0.5 * d) * (d - 0.5 * d)) + 1.0 / (4.0 * 0.25 * d * d)));
        let sol = solve_beta_mimo(&b, target, &SolverConfig::default()).unwrap();
        assert!(sol.converged && sol.residual <= 1e-12);
        let oracle = bisect_root(
            |beta| c * (1.0 / (4.0 * (d - beta) * (d - beta)) + 1.0 / (4.0 * beta * beta)) - target,
            1e-6,
            0.5 * d,
        );
        assert!((sol.beta - oracle).abs() < 1e-9, "{} vs {}", sol.beta, oracle);
    }

    #[test]
    fn solve_qam16_two_pmin_across_grid() {
        for snr_db in [10.0, 12.0, 14.0] {
            let c = qam16_curve(snr_db);
            let target = 2.0 * c.ber(c.d_min / 2.0);
            let lower = solve_beta_siso(&c, target, &SolverConfig::default()).unwrap();
            assert!(lower.converged && lower.residual <= 1e-12);
            assert!(lower.beta > 0.0 && lower.beta < c.d_min / 2.0);
            // independent bracket oracle
            let oracle = bisect_root(|b| c.ber(b) - target, 1e-9 * c.d_min, c.d_min / 2.0);
            assert!((lower.beta - oracle).abs() < 1e-9);
            // re-evaluating the curve reproduces the target
            assert!((c.ber(lower.beta) - target).abs() <= 10.0 * 1e-12);
            // upper branch mirrors the lower root
            let upper = solve_beta_siso(
                &c,
                target,
                &SolverConfig {
                    branch: Branch::Upper,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(upper.beta >= c.d_min / 2.0);
            assert!((upper.beta - (c.d_min - lower.beta)).abs() < 1e-10);
        }
    }

    #[test]
    fn solve_at_exact_minimum_returns_midpoint() {
        let c = qam16_curve(10.0);
        let target = c.ber(c.d_min / 2.0);
        for branch in [Branch::Lower, Branch::Upper] {
            let sol = solve_beta_siso(
                &c,
                target,
                &SolverConfig {
                    branch,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(
                (sol.beta - c.d_min / 2.0).abs() < 1e-6 * c.d_min,
                "branch {:?}: beta {}",
                branch,
                sol.beta
            );
        }
    }

    #[test]
    fn infeasible_target_reports_minimum() {
        let c = qam16_curve(10.0);
        let err = solve_beta_siso(&c, 1e-99, &SolverConfig::default()).unwrap_err();
        match err {
            Error::Infeasible { target, minimum } => {
                assert_eq!(target, 1e-99);
                assert!((minimum - c.ber(c.d_min / 2.0)).abs() < 1e-15);
            }
            other => panic!("expected Infeasible, got {other:?}"),
        }
    }

    #[test]
    fn unreachable_target_at_low_snr() {
        // at low SNR the factor-2 target overshoots the curve's value at
        // beta = 0, so no root exists on the lower branch
        let c = qam16_curve(4.0);
        let target = 2.0 * c.ber(c.d_min / 2.0);
        assert!(target > c.ber(0.0));
        let err = solve_beta_siso(&c, target, &SolverConfig::default()).unwrap_err();
        match err {
            Error::TargetUnreachable { target: t, ceiling } => {
                assert_eq!(t, target);
                assert!((ceiling - c.ber(BRACKET_EPS * c.d_min)).abs() < 1e-15);
            }
            other => panic!("expected TargetUnreachable, got {other:?}"),
        }
    }

    #[test]
    fn lower_beta_decreases_with_target() {
        let c = qam16_curve(12.0);
        let pmin = c.ber(c.d_min / 2.0);
        let mut prev = f64::INFINITY;
        for factor in [1.2, 1.5, 2.0, 3.0, 5.0] {
            let target = factor * pmin;
            if target > c.ber(0.0) {
                continue;
            }
            let sol = solve_beta_siso(&c, target, &SolverConfig::default()).unwrap();
            assert!(sol.beta < prev, "factor {factor}");
            prev = sol.beta;
        }
    }

    #[test]
    fn trace_records_iterates() {
        let c = qam16_curve(12.0);
        let sol = solve_beta_siso(&c, 2.0 * c.ber(c.d_min / 2.0), &SolverConfig::default()).unwrap();
        assert_eq!(sol.trace.len(), sol.iterations);
        assert_eq!(*sol.trace.last().unwrap(), sol.beta);
    }
}
