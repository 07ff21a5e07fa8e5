//! Closed-form error probabilities for the shifted decision boundary, and
//! the SISO/MIMO union bounds built on them.
//!
//! All expressions use unit-energy constellations with the channel gain
//! dropped; the noise convention is complex noise of total variance `N0`
//! per receive dimension (`N0/2` per real axis), which makes the
//! `erfc(a / sqrt(N0))` boundary-crossing terms hold verbatim.

use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::special::{erfc, qfunc};

/// Parameters of the one-dimensional shifted-boundary error expressions.
#[derive(Debug, Clone, Copy)]
pub struct SisoErrorParams {
    /// Minimum constellation distance (after unit-energy normalization).
    pub d_min: f64,
    /// Noise spectral density as it appears inside the erfc arguments.
    pub n0: f64,
    /// Boundary shift, `0 <= beta <= d_min`.
    pub beta: f64,
}

impl SisoErrorParams {
    pub fn new(d_min: f64, n0: f64, beta: f64) -> Self {
        assert!(d_min > 0.0 && n0 > 0.0, "d_min and N0 must be positive");
        assert!((0.0..=d_min).contains(&beta), "beta must lie in [0, d_min]");
        SisoErrorParams { d_min, n0, beta }
    }

    fn tails(&self) -> (f64, f64) {
        let s = self.n0.sqrt();
        (erfc((self.d_min - self.beta) / s), erfc(self.beta / s))
    }
}

/// Gaussian likelihood of observing `y` given transmitted `s` (scalar model).
pub fn likelihood(y: num_complex::Complex64, s: num_complex::Complex64, sigma: f64) -> f64 {
    assert!(sigma > 0.0);
    let d = (y - s).norm();
    (-0.5 * (d / sigma).powi(2)).exp() / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt()
}

/// BPSK error probability of the symmetric shifted-boundary detector.
pub fn ser_bpsk(p: &SisoErrorParams) -> f64 {
    let (far, near) = p.tails();
    0.25 * far + 0.25 * near
}

/// 4-PAM average error probability, same boundary construction.
pub fn ser_pam4(p: &SisoErrorParams) -> f64 {
    let (far, near) = p.tails();
    0.375 * far + 0.375 * near
}

/// 16-QAM average error probability (first-order form).
pub fn ser_qam16(p: &SisoErrorParams) -> f64 {
    let (far, near) = p.tails();
    0.75 * (far + near)
}

/// Square M-QAM average error probability (first-order form),
/// coefficient `(1 - 1/sqrt(M))`.
pub fn ser_mqam(m: usize, p: &SisoErrorParams) -> f64 {
    let side = (m as f64).sqrt();
    assert!(m >= 4 && side.fract() == 0.0, "M must be a perfect square >= 4");
    let (far, near) = p.tails();
    (1.0 - 1.0 / side) * (far + near)
}

/// Exact 16-QAM error probability: average of the sixteen per-symbol error
/// probabilities given by products of one-dimensional detection
/// probabilities, with no second-order truncation.
pub fn ser_qam16_exact(p: &SisoErrorParams) -> f64 {
    let (far, near) = p.tails();
    let v = 0.5 * far; // crossing toward the far (d_min - beta) boundary
    let u = 0.5 * near; // crossing toward the near (beta) boundary
    let uv = u + v;
    // exterior corners
    let corner_uu = 1.0 - (1.0 - u) * (1.0 - u);
    let corner_vv = 1.0 - (1.0 - v) * (1.0 - v);
    let corner_uv = 1.0 - (1.0 - u) * (1.0 - v); // two of these
    // edge (neither interior nor exterior) points
    let edge_u = 1.0 - (1.0 - u) * (1.0 - uv); // four of these
    let edge_v = 1.0 - (1.0 - v) * (1.0 - uv); // four of these
    // interior points
    let interior = 1.0 - (1.0 - uv) * (1.0 - uv); // four of these
    (corner_uu + corner_vv + 2.0 * corner_uv + 4.0 * interior + 4.0 * edge_u + 4.0 * edge_v)
        / 16.0
}

/// Symbol-to-bit error conversion under Gray labeling, `ser / log2(M)`.
pub fn ser_to_ber(ser: f64, m: usize) -> f64 {
    ser / (m as f64).log2()
}

/// Average nearest-neighbor count of square M-QAM, `4(1 - 1/sqrt(M))`.
pub fn avg_nearest_neighbors(m: usize) -> f64 {
    4.0 * (1.0 - 1.0 / (m as f64).sqrt())
}

/// The two forms of the SISO M-QAM union bound.
#[derive(Debug, Clone, Copy)]
pub struct SisoUnionBound {
    /// Nearest-neighbor Q-function form (coincides with [`ser_mqam`]).
    pub q_form: f64,
    /// Exponential relaxation of the Q-form.
    pub exp_form: f64,
}

/// Nearest-neighbor union bound for square M-QAM with the shifted boundary.
pub fn union_bound_mqam_siso(m: usize, p: &SisoErrorParams) -> SisoUnionBound {
    let nn = avg_nearest_neighbors(m);
    let s = p.n0.sqrt();
    // boundary-crossing probability at distance a is Q(a / sqrt(N0/2))
    let scale = (2.0 / p.n0).sqrt();
    let q_form = nn * (0.5 * qfunc(p.beta * scale) + 0.5 * qfunc((p.d_min - p.beta) * scale));
    let exp_form = nn
        * (0.5 * (-p.beta * p.beta / (4.0 * p.n0)).exp()
            + 0.5 * (-(p.d_min - p.beta) * (p.d_min - p.beta) / (4.0 * p.n0)).exp());
    let _ = s;
    SisoUnionBound { q_form, exp_form }
}

/// Parameters of the MIMO union-bound expressions.
#[derive(Debug, Clone)]
pub struct MimoBoundParams {
    /// Receive antennas.
    pub nr: usize,
    /// Noise spectral density.
    pub n0: f64,
    /// Distances `|x - x_hat|` over all ordered candidate pairs.
    pub pair_distances: Vec<f64>,
    /// Per-antenna modulation orders.
    pub ms: Vec<usize>,
}

impl MimoBoundParams {
    /// Leading constant `(2 N0)^Nr C(2Nr-1, Nr) / prod M_i`.
    pub fn leading_constant(&self) -> f64 {
        let prod_m: f64 = self.ms.iter().map(|&m| m as f64).product();
        (2.0 * self.n0).powi(self.nr as i32) * binomial(2 * self.nr - 1, self.nr) / prod_m
    }
}

/// Binomial coefficient as f64.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Fading-averaged pairwise error probability as a function of the
/// per-pair SNR `gamma_c`, for `Nr` receive branches.
pub fn pairwise_error_prob(gamma_c: f64, nr: usize) -> f64 {
    assert!(gamma_c >= 0.0 && nr >= 1);
    let mu = (gamma_c / (1.0 + gamma_c)).sqrt();
    // 1 - mu computed as (1 - mu^2)/(1 + mu) to avoid cancellation at high SNR
    let one_minus_mu = 1.0 / ((1.0 + gamma_c) * (1.0 + mu));
    let p = 0.5 * one_minus_mu;
    let q = 0.5 * (1.0 + mu);
    let mut sum = 0.0;
    for k in 0..nr {
        sum += binomial(nr - 1 + k, k) * q.powi(k as i32);
    }
    p.powi(nr as i32) * sum
}

/// Simplified MIMO union bound over the supplied pair distances.
pub fn union_bound_mimo(b: &MimoBoundParams) -> Result<f64> {
    if b.pair_distances.is_empty() {
        return Err(Error::EmptyPairs);
    }
    let c = b.leading_constant();
    let nr = b.nr as i32;
    let sum: f64 = b
        .pair_distances
        .iter()
        .map(|&d| (1.0 / (4.0 * d * d)).powi(nr))
        .sum();
    Ok(c * sum)
}

/// Minimum achievable error probability (boundary at `d_min / 2`).
pub fn pmin_ser(scheme: crate::constellation::Scheme, m: usize, d_min: f64, n0: f64) -> f64 {
    let p = SisoErrorParams::new(d_min, n0, d_min / 2.0);
    ser_at(scheme, m, &p)
}

/// Dispatch the per-scheme shifted-boundary error expression.
pub fn ser_at(scheme: crate::constellation::Scheme, m: usize, p: &SisoErrorParams) -> f64 {
    use crate::constellation::Scheme;
    match scheme {
        Scheme::Bpsk => ser_bpsk(p),
        Scheme::Pam => {
            assert!(m == 4, "PAM analytics are exposed for M=4 only");
            ser_pam4(p)
        }
        Scheme::Qam => ser_mqam(m, p),
    }
}

/// Convenience: `pmin` for a constellation at a given `N0`.
pub fn pmin_for(c: &Constellation, n0: f64) -> f64 {
    pmin_ser(c.scheme(), c.order(), c.d_min(), n0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{Constellation, Scheme, VectorConstellation, PAIR_SCAN_CAP};
    use num_complex::Complex64;

    fn grid(d_min: f64) -> Vec<SisoErrorParams> {
        let mut out = Vec::new();
        for &n0 in &[0.05, 0.1, 0.25, 0.5, 1.0] {
            for i in 1..10 {
                out.push(SisoErrorParams::new(d_min, n0, d_min * i as f64 / 20.0));
            }
        }
        out
    }

    #[test]
    fn likelihood_basics() {
        let s = Complex64::new(0.3, -0.2);
        let sigma = 0.7;
        let peak = likelihood(s, s, sigma);
        assert!((peak - 1.0 / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt()).abs() < 1e-15);
        let v = likelihood(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 1.0);
        let want = (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((v - want).abs() < 1e-15);
        // likelihood ordering matches (reversed) distance ordering
        let y = Complex64::new(0.1, 0.4);
        let a = Complex64::new(0.0, 0.0);
        let b = Complex64::new(1.0, 1.0);
        assert!((y - a).norm() < (y - b).norm());
        assert!(likelihood(y, a, 0.9) > likelihood(y, b, 0.9));
    }

    #[test]
    fn ser_bpsk_minimum_and_symmetry() {
        let d = 2.0;
        for p in grid(d) {
            let mirrored = SisoErrorParams::new(d, p.n0, d - p.beta);
            assert!((ser_bpsk(&p) - ser_bpsk(&mirrored)).abs() < 1e-15);
            // minimized at the midpoint
            let pmin = ser_bpsk(&SisoErrorParams::new(d, p.n0, d / 2.0));
            assert!(ser_bpsk(&p) >= pmin - 1e-15);
            assert!((pmin - 0.5 * erfc(d / (2.0 * p.n0.sqrt()))).abs() < 1e-15);
        }
    }

    #[test]
    fn ser_bpsk_montecarlo_crosscheck() {
        // null-region style oracle, done directly on the analytic regions:
        // simulate the randomized detector and compare to the formula
        use rand::{Rng, SeedableRng};
        let d = 2.0;
        let n0 = 0.5;
        let beta = 0.6;
        let p = SisoErrorParams::new(d, n0, beta);
        let want = ser_bpsk(&p);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let trials = 2_000_000u64;
        let sigma = (n0 / 2.0).sqrt();
        let mut errors = 0u64;
        for _ in 0..trials {
            let sent = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let y = sent + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);
            // shrunken decision regions: each point claims everything up
            // to the boundary at distance beta on its inner side; the gap
            // in between is resolved by a fair coin
            #[allow(clippy::if_same_then_else)]
            let decided = if y <= -1.0 + beta {
                -1.0
            } else if y >= 1.0 - beta {
                1.0
            } else if rng.gen::<bool>() {
                1.0
            } else {
                -1.0
            };
            if decided != sent {
                errors += 1;
            }
        }
        let hat = errors as f64 / trials as f64;
        let se = (want * (1.0 - want) / trials as f64).sqrt();
        assert!(
            (hat - want).abs() <= 3.0 * se,
            "MC {hat} vs analytic {want} (3se={})",
            3.0 * se
        );
    }

    #[test]
    fn pam4_coefficient_and_appendix_form() {
        let d = 2.0 / 5.0_f64.sqrt();
        for p in grid(d) {
            assert!((ser_pam4(&p) - 1.5 * ser_bpsk(&p)).abs() < 1e-15);
            // Appendix single-boundary expression is term-identical
            let s = p.n0.sqrt();
            let appendix =
                0.375 * erfc(p.beta / s) + 0.375 * erfc((p.d_min - p.beta) / s);
            assert!((ser_pam4(&p) - appendix).abs() <= 1e-16);
        }
        let p = SisoErrorParams::new(d, 0.1, d / 2.0);
        assert!((ser_pam4(&p) - 0.75 * erfc(d / (2.0 * 0.1f64.sqrt()))).abs() < 1e-15);
    }

    #[test]
    fn qam_coefficients() {
        let d = 2.0 / 10.0_f64.sqrt();
        for p in grid(d) {
            assert!((ser_qam16(&p) - ser_mqam(16, &p)).abs() < 1e-15);
            let half = ser_mqam(4, &p);
            let (far, near) = (erfc((d - p.beta) / p.n0.sqrt()), erfc(p.beta / p.n0.sqrt()));
            assert!((half - 0.5 * (far + near)).abs() < 1e-15);
        }
        // coefficient approaches 1 for large M
        assert!((1.0 - 1.0 / (1u64 << 30) as f64) - 1.0 < 1e-9);
        let p = SisoErrorParams::new(d, 0.1, d / 2.0);
        assert!((ser_qam16(&p) - 1.5 * erfc(d / (2.0 * 0.1f64.sqrt()))).abs() < 1e-15);
    }

    #[test]
    fn qam16_exact_vs_simplified_remainder() {
        // independent expansion oracle: exact = 1.5 (u + v) - (9/16)(u + v)^2
        let d = 2.0 / 10.0_f64.sqrt();
        for p in grid(d) {
            let s = p.n0.sqrt();
            let u = 0.5 * erfc(p.beta / s);
            let v = 0.5 * erfc((d - p.beta) / s);
            let oracle = 1.5 * (u + v) - 9.0 / 16.0 * (u + v) * (u + v);
            let exact = ser_qam16_exact(&p);
            assert!((exact - oracle).abs() <= 1e-14, "exact {exact} oracle {oracle}");
            let remainder = 9.0 / 16.0 * (u + v) * (u + v);
            let diff = (ser_qam16(&p) - exact).abs();
            assert!(diff <= remainder * (1.0 + 1e-12) + 1e-18);
            // exact never exceeds the simplified form
            assert!(exact <= ser_qam16(&p) + 1e-18);
        }
        // beta = d/2, N0 -> 0: both vanish
        let p = SisoErrorParams::new(d, 1e-4, d / 2.0);
        assert!(ser_qam16_exact(&p) < 1e-200);
    }

    #[test]
    fn ser_to_ber_values() {
        assert!((ser_to_ber(0.03, 16) - 0.0075).abs() < 1e-18);
        assert_eq!(ser_to_ber(0.42, 2), 0.42);
        assert_eq!(ser_to_ber(0.0, 64), 0.0);
    }

    #[test]
    fn nearest_neighbor_average() {
        assert_eq!(avg_nearest_neighbors(16), 3.0);
        assert_eq!(avg_nearest_neighbors(4), 2.0);
        // matches exhaustive geometric counts
        for m in [4usize, 16, 64] {
            let c = Constellation::build(Scheme::Qam, m).unwrap();
            let total: usize = (0..m).map(|i| c.neighbor_count(i, 1e-9)).sum();
            assert!((total as f64 / m as f64 - avg_nearest_neighbors(m)).abs() < 1e-12);
        }
    }

    #[test]
    fn siso_union_bound_forms() {
        let d = 2.0 / 10.0_f64.sqrt();
        for p in grid(d) {
            let b = union_bound_mqam_siso(16, &p);
            assert!((b.q_form - ser_mqam(16, &p)).abs() <= 1e-14);
            assert!(b.exp_form >= b.q_form - 1e-15);
        }
        let p = SisoErrorParams::new(d, 0.1, d / 2.0);
        let b = union_bound_mqam_siso(16, &p);
        assert!((b.q_form - 1.5 * erfc(d / (2.0 * 0.1f64.sqrt()))).abs() < 1e-14);
    }

    #[test]
    fn pairwise_error_prob_limits() {
        assert!((pairwise_error_prob(0.0, 1) - 0.5).abs() < 1e-15);
        // Nr = 1 collapses to (1 - mu)/2
        let g: f64 = 3.7;
        let mu = (g / (1.0 + g)).sqrt();
        assert!((pairwise_error_prob(g, 1) - 0.5 * (1.0 - mu)).abs() < 1e-15);
        // asymptotic ratio (Eq. 13)
        for nr in [1usize, 2, 4] {
            let g = 1e4;
            let ratio = pairwise_error_prob(g, nr) * (4.0 * g).powi(nr as i32)
                / binomial(2 * nr - 1, nr);
            assert!((ratio - 1.0).abs() < 0.01, "nr={nr}: ratio={ratio}");
        }
        // decreasing in gamma
        let mut prev = pairwise_error_prob(0.0, 2);
        for i in 1..50 {
            let v = pairwise_error_prob(i as f64 * 0.5, 2);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn mimo_union_bound_scaling() {
        let b = MimoBoundParams {
            nr: 1,
            n0: 0.25,
            pair_distances: vec![2.0, 2.0],
            ms: vec![2],
        };
        let v = union_bound_mimo(&b).unwrap();
        // BPSK 1x1: C = 2 N0 * C(1,1) / 2, two symmetric pairs
        let want = 2.0 * 0.25 / 2.0 * 2.0 * (1.0 / (4.0 * 4.0));
        assert!((v - want).abs() < 1e-15);

        // doubling all distances with Nr = 1 divides the bound by 4
        let doubled = MimoBoundParams {
            pair_distances: b.pair_distances.iter().map(|d| d * 2.0).collect(),
            ..b.clone()
        };
        let v2 = union_bound_mimo(&doubled).unwrap();
        assert!((v2 - v / 4.0).abs() < 1e-15);

        let empty = MimoBoundParams {
            pair_distances: vec![],
            ..b
        };
        assert!(matches!(union_bound_mimo(&empty), Err(Error::EmptyPairs)));
    }

    #[test]
    fn mimo_union_bound_qam16_2x2_value_is_finite_and_positive() {
        let c = Constellation::build(Scheme::Qam, 16).unwrap();
        let v = VectorConstellation::uniform(c, 2).unwrap();
        let dists: Vec<f64> = v
            .pairwise_distances(PAIR_SCAN_CAP)
            .unwrap()
            .into_iter()
            .map(|(_, _, d)| d)
            .collect();
        let b = MimoBoundParams {
            nr: 2,
            n0: 10f64.powf(-1.4),
            pair_distances: dists,
            ms: vec![16, 16],
        };
        let bound = union_bound_mimo(&b).unwrap();
        assert!(bound.is_finite() && bound > 0.0);
    }

    #[test]
    fn ser_decreasing_in_noise() {
        let d = 2.0 / 10.0_f64.sqrt();
        for i in 1..10 {
            let beta = d * i as f64 / 20.0;
            let mut prev = f64::INFINITY;
            for &n0 in &[1.0, 0.5, 0.25, 0.1, 0.05] {
                let v = ser_mqam(16, &SisoErrorParams::new(d, n0, beta));
                assert!(v < prev);
                prev = v;
            }
        }
    }
}
