//! Monte Carlo experiment engine: solves the threshold per SNR point,
//! runs paired trials of the early-exit and exhaustive detectors on the
//! same noise, and aggregates error rates, search cost, and hit rate.
//!
//! All per-trial results are accumulated as integers, so the reduction is
//! exact and independent of worker count and execution order.

use rayon::prelude::*;

use crate::channel::{self, ChannelMode, ChannelRealization, Role, SeedPolicy};
use crate::constellation::{Constellation, Scheme, VectorConstellation};
use crate::detectors::{early_exit_slice, ml_exhaustive, DistanceOracle};
use crate::error::{Error, Result};
use crate::solver::{solve_beta_siso, BetaSolution, Branch, SisoCurve, SolverConfig};
use crate::special::qfunc;

/// How the per-SNR target error probability is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetRule {
    /// `c` times the minimum achievable BER at that SNR, `c >= 1`.
    FactorOfPmin(f64),
    /// A fixed absolute BER.
    Absolute(f64),
}

/// Full description of one sweep experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub scheme: Scheme,
    pub m: usize,
    pub nt: usize,
    pub nr: usize,
    pub channel_mode: ChannelMode,
    /// E_s/N0 grid in dB.
    pub snr_grid_db: Vec<f64>,
    pub target: TargetRule,
    pub trials: usize,
    pub master_seed: u64,
    pub branch: Branch,
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() || self.trials == 0 {
            return Err(Error::EmptyInput);
        }
        if let TargetRule::FactorOfPmin(c) = self.target {
            if c < 1.0 {
                return Err(Error::DimensionMismatch(format!(
                    "pmin factor {c} must be >= 1"
                )));
            }
        }
        if self.channel_mode == ChannelMode::Identity && self.nt != self.nr {
            return Err(Error::DimensionMismatch(format!(
                "identity channel needs Nt = Nr, got {}x{}",
                self.nt, self.nr
            )));
        }
        Ok(())
    }

    pub fn constellation(&self) -> Result<VectorConstellation> {
        let c = Constellation::build(self.scheme, self.m)?;
        VectorConstellation::uniform(c, self.nt)
    }

    /// `N0` for a grid point, with unit symbol energy.
    pub fn n0(snr_db: f64) -> f64 {
        10f64.powf(-snr_db / 10.0)
    }
}

/// Aggregated results at one SNR point. The `ml_*` fields are the paired
/// exhaustive-search baseline measured on the same noise realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub beta: f64,
    pub target_p: f64,
    pub ser: f64,
    pub ser_ci: (f64, f64),
    pub ber: f64,
    pub ber_ci: (f64, f64),
    /// Mean cost-function evaluations over cardinality, in (0, 1].
    pub norm_complexity: f64,
    pub hit_rate: f64,
    pub paper_hit_prob: f64,
    pub trials: usize,
    pub ml_ser: f64,
    pub ml_ber: f64,
    /// Constant 1.0: the full search always evaluates every candidate.
    pub ml_norm_complexity: f64,
}

/// Hit probability reported by the closed-form expression `1 - Q(N0 beta)`.
/// (Reported verbatim next to the empirical hit rate; the two are not
/// asserted equal.)
pub fn hit_probability_paper(n0: f64, beta: f64) -> f64 {
    1.0 - qfunc(n0 * beta)
}

/// Hit probability of the exhaustive search: `M^{-Nt}`.
pub fn ml_hit_probability(m: usize, nt: usize) -> f64 {
    (m as f64).powi(-(nt as i32))
}

#[allow(clippy::excessive_precision)]
fn probit(p: f64) -> f64 {
    // Acklam's rational approximation to the standard normal quantile
    assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -probit(1.0 - p)
    }
}

/// Wilson score interval for a binomial proportion.
pub fn binomial_ci(errors: u64, trials: u64, level: f64) -> (f64, f64) {
    assert!(errors <= trials && trials > 0 && level > 0.0 && level < 1.0);
    let z = probit(0.5 + level / 2.0);
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (((center - half).max(0.0)), ((center + half).min(1.0)))
}

#[derive(Debug, Default, Clone, Copy)]
struct Counts {
    sym_err: u64,
    bit_err: u64,
    ml_sym_err: u64,
    ml_bit_err: u64,
    cf_evals: u64,
    hits: u64,
}

impl Counts {
    fn merge(mut self, other: Counts) -> Counts {
        self.sym_err += other.sym_err;
        self.bit_err += other.bit_err;
        self.ml_sym_err += other.ml_sym_err;
        self.ml_bit_err += other.ml_bit_err;
        self.cf_evals += other.cf_evals;
        self.hits += other.hits;
        self
    }
}

fn hamming_bits(v: &VectorConstellation, a: usize, b: usize) -> u32 {
    let mut ia = Vec::new();
    let mut ib = Vec::new();
    v.symbol_indices(a, &mut ia);
    v.symbol_indices(b, &mut ib);
    ia.iter()
        .zip(&ib)
        .enumerate()
        .map(|(t, (&x, &y))| (v.antenna(t).label(x) ^ v.antenna(t).label(y)).count_ones())
        .sum()
}

fn simulate_point(
    cfg: &LinkConfig,
    v: &VectorConstellation,
    n0: f64,
    beta: f64,
) -> Result<Counts> {
    let seed = SeedPolicy::new(cfg.master_seed);
    let counts = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Counts> {
            let h = match cfg.channel_mode {
                ChannelMode::Identity => ChannelRealization::identity(cfg.nt),
                ChannelMode::Rayleigh => {
                    let mut rng = seed.stream(trial, Role::Channel);
                    ChannelRealization::rayleigh(cfg.nr, cfg.nt, &mut rng)
                }
            };
            let sent = channel::draw_symbol(v, &seed, trial);
            let mut x = Vec::new();
            v.point(sent, &mut x);
            let mut y = Vec::new();
            channel::transmit(&x, &h, n0, &seed, trial, &mut y)?;
            let mut oracle = DistanceOracle::new(&y, v, &h)?;
            let dists: Vec<f64> = (0..v.cardinality()).map(|n| oracle.eval(n)).collect();
            let ml = ml_exhaustive(&dists)?;
            let ee = early_exit_slice(&dists, beta)?;
            let mut c = Counts::default();
            if ee.decided_index != sent {
                c.sym_err = 1;
                c.bit_err = hamming_bits(v, sent, ee.decided_index) as u64;
            }
            if ml.decided_index != sent {
                c.ml_sym_err = 1;
                c.ml_bit_err = hamming_bits(v, sent, ml.decided_index) as u64;
            }
            c.cf_evals = ee.cf_evals as u64;
            c.hits = ee.hit as u64;
            Ok(c)
        })
        .try_reduce(Counts::default, |a, b| Ok(a.merge(b)));
    counts
}

/// Solve the threshold for one SNR point from the per-antenna analytic
/// BER curve and the configured target rule.
pub fn solve_point(cfg: &LinkConfig, snr_db: f64) -> Result<(BetaSolution, SisoCurve)> {
    let c = Constellation::build(cfg.scheme, cfg.m)?;
    let n0 = LinkConfig::n0(snr_db);
    let curve = SisoCurve::new(cfg.scheme, cfg.m, c.d_min(), n0);
    let target = match cfg.target {
        TargetRule::FactorOfPmin(f) => f * curve.ber(curve.d_min / 2.0),
        TargetRule::Absolute(p) => p,
    };
    let solver_cfg = SolverConfig {
        branch: cfg.branch,
        ..Default::default()
    };
    let sol = solve_beta_siso(&curve, target, &solver_cfg)?;
    Ok((sol, curve))
}

/// Run the full sweep: per SNR point, solve beta, simulate paired trials,
/// and aggregate. Solver or simulation failures abort the sweep with the
/// offending SNR attached.
pub fn run_sweep(cfg: &LinkConfig) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    let v = cfg.constellation()?;
    let bits_per_vector: u64 = (0..v.num_antennas())
        .map(|t| v.antenna(t).bits_per_symbol() as u64)
        .sum();
    let mut out = Vec::with_capacity(cfg.snr_grid_db.len());
    for &snr_db in &cfg.snr_grid_db {
        let point = (|| -> Result<SweepPoint> {
            let (sol, _curve) = solve_point(cfg, snr_db)?;
            let n0 = LinkConfig::n0(snr_db);
            let counts = simulate_point(cfg, &v, n0, sol.beta)?;
            let n = cfg.trials as u64;
            let bits = n * bits_per_vector;
            Ok(SweepPoint {
                snr_db,
                beta: sol.beta,
                target_p: sol.target_p,
                ser: counts.sym_err as f64 / n as f64,
                ser_ci: binomial_ci(counts.sym_err, n, 0.95),
                ber: counts.bit_err as f64 / bits as f64,
                ber_ci: binomial_ci(counts.bit_err, bits, 0.95),
                norm_complexity: counts.cf_evals as f64 / (n * v.cardinality() as u64) as f64,
                hit_rate: counts.hits as f64 / n as f64,
                paper_hit_prob: hit_probability_paper(n0, sol.beta),
                trials: cfg.trials,
                ml_ser: counts.ml_sym_err as f64 / n as f64,
                ml_ber: counts.ml_bit_err as f64 / bits as f64,
                ml_norm_complexity: 1.0,
            })
        })();
        match point {
            Ok(p) => out.push(p),
            Err(e) => {
                return Err(Error::SweepAborted {
                    snr_db,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(out)
}

/// BER-vs-SNR experiment (alias of the common engine; the same paired
/// trials yield both error rates and search cost).
pub fn run_ber_sweep(cfg: &LinkConfig) -> Result<Vec<SweepPoint>> {
    run_sweep(cfg)
}

/// Search-complexity-vs-SNR experiment.
pub fn run_complexity_sweep(cfg: &LinkConfig) -> Result<Vec<SweepPoint>> {
    run_sweep(cfg)
}
