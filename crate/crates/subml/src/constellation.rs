//! Signal constellations and their vector (multi-antenna) product lattices.
//!
//! All constellations are normalized to unit average symbol energy, so the
//! minimum distance is a function of the modulation order alone and SNR
//! sweeps are well defined.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on the cardinality admitted to the O(K^2) pair scan.
pub const PAIR_SCAN_CAP: usize = 4096;

/// Modulation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Bpsk,
    Pam,
    Qam,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Bpsk => "BPSK",
            Scheme::Pam => "PAM",
            Scheme::Qam => "QAM",
        }
    }
}

/// An ordered constellation with Gray bit labels and unit average energy.
#[derive(Debug, Clone)]
pub struct Constellation {
    scheme: Scheme,
    order: usize,
    bits_per_symbol: usize,
    points: Vec<Complex64>,
    labels: Vec<u32>,
    d_min: f64,
}

fn gray(i: usize) -> u32 {
    (i ^ (i >> 1)) as u32
}

impl Constellation {
    /// Build a unit-average-energy constellation with Gray labels.
    ///
    /// Supported: BPSK (M=2), PAM (M in {2,4,8,16}), square QAM
    /// (M in {4,16,64,256}).
    pub fn build(scheme: Scheme, order: usize) -> Result<Self> {
        let (points, labels) = match scheme {
            Scheme::Bpsk => {
                if order != 2 {
                    return Err(Error::UnsupportedOrder { scheme: "BPSK", m: order });
                }
                (
                    vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)],
                    vec![0u32, 1u32],
                )
            }
            Scheme::Pam => {
                if !matches!(order, 2 | 4 | 8 | 16) {
                    return Err(Error::UnsupportedOrder { scheme: "PAM", m: order });
                }
                let m = order as f64;
                // levels -(M-1), ..., +(M-1); average energy (M^2 - 1)/3
                let scale = (3.0 / (m * m - 1.0)).sqrt();
                let mut points = Vec::with_capacity(order);
                let mut labels = Vec::with_capacity(order);
                for i in 0..order {
                    let level = (2 * i) as f64 - (m - 1.0);
                    points.push(Complex64::new(level * scale, 0.0));
                    labels.push(gray(i));
                }
                (points, labels)
            }
            Scheme::Qam => {
                if !matches!(order, 4 | 16 | 64 | 256) {
                    return Err(Error::UnsupportedOrder { scheme: "QAM", m: order });
                }
                let side = (order as f64).sqrt().round() as usize;
                let s = side as f64;
                // per-axis levels +/-1, +/-3, ...; average energy 2(side^2-1)/3
                let scale = (3.0 / (2.0 * (s * s - 1.0))).sqrt();
                let half_bits = side.trailing_zeros();
                let mut points = Vec::with_capacity(order);
                let mut labels = Vec::with_capacity(order);
                // row-major over (I, Q) with Gray-coded axes
                for i in 0..side {
                    let re = ((2 * i) as f64 - (s - 1.0)) * scale;
                    for q in 0..side {
                        let im = ((2 * q) as f64 - (s - 1.0)) * scale;
                        points.push(Complex64::new(re, im));
                        labels.push((gray(i) << half_bits) | gray(q));
                    }
                }
                (points, labels)
            }
        };

        let d_min = min_pairwise_distance(&points);
        Ok(Constellation {
            scheme,
            order,
            bits_per_symbol: order.trailing_zeros() as usize,
            points,
            labels,
            d_min,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Complex64 {
        self.points[i]
    }

    /// Gray bit label of point `i`, `bits_per_symbol` bits wide.
    pub fn label(&self, i: usize) -> u32 {
        self.labels[i]
    }

    /// Minimum pairwise Euclidean distance after normalization.
    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    /// Real amplitude levels in ascending order (BPSK/PAM only).
    pub fn levels(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.re).collect()
    }

    /// Number of points at distance `d_min` (within `tol`) from point `i`.
    pub fn neighbor_count(&self, i: usize, tol: f64) -> usize {
        self.points
            .iter()
            .enumerate()
            .filter(|&(j, p)| j != i && ((p - self.points[i]).norm() - self.d_min).abs() <= tol)
            .count()
    }
}

fn min_pairwise_distance(points: &[Complex64]) -> f64 {
    let mut d_min = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = (points[i] - points[j]).norm();
            if d < d_min {
                d_min = d;
            }
        }
    }
    d_min
}

/// Product lattice over `N_t` per-antenna constellations, enumerated in a
/// fixed lexicographic order (antenna 0 varies slowest).
#[derive(Debug, Clone)]
pub struct VectorConstellation {
    per_antenna: Vec<Constellation>,
    cardinality: usize,
}

impl VectorConstellation {
    pub fn new(per_antenna: Vec<Constellation>) -> Result<Self> {
        if per_antenna.is_empty() {
            return Err(Error::EmptyInput);
        }
        let cardinality = per_antenna.iter().map(|c| c.order()).product();
        Ok(VectorConstellation { per_antenna, cardinality })
    }

    /// All antennas use the same constellation.
    pub fn uniform(c: Constellation, nt: usize) -> Result<Self> {
        if nt == 0 {
            return Err(Error::EmptyInput);
        }
        Self::new(vec![c; nt])
    }

    pub fn num_antennas(&self) -> usize {
        self.per_antenna.len()
    }

    pub fn antenna(&self, t: usize) -> &Constellation {
        &self.per_antenna[t]
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    /// Minimum distance of the product lattice (vectors differing in one
    /// antenna by the smallest per-antenna step).
    pub fn d_min(&self) -> f64 {
        self.per_antenna
            .iter()
            .map(|c| c.d_min())
            .fold(f64::INFINITY, f64::min)
    }

    /// Per-antenna symbol indices of candidate `n` in enumeration order.
    pub fn symbol_indices(&self, n: usize, out: &mut Vec<usize>) {
        out.clear();
        out.resize(self.per_antenna.len(), 0);
        let mut rem = n;
        for t in (0..self.per_antenna.len()).rev() {
            let m = self.per_antenna[t].order();
            out[t] = rem % m;
            rem /= m;
        }
    }

    /// Candidate vector `n` written into `out`.
    pub fn point(&self, n: usize, out: &mut Vec<Complex64>) {
        out.clear();
        out.resize(self.per_antenna.len(), Complex64::new(0.0, 0.0));
        let mut rem = n;
        for t in (0..self.per_antenna.len()).rev() {
            let m = self.per_antenna[t].order();
            out[t] = self.per_antenna[t].point(rem % m);
            rem /= m;
        }
    }

    /// All ordered pairs `(i, j, |x_i - x_j|)`, `i != j`, in deterministic
    /// (i, j) order. Errors with `CapExceeded` when the cardinality is over
    /// `cap` to bound the O(K^2) scan.
    pub fn pairwise_distances(&self, cap: usize) -> Result<Vec<(usize, usize, f64)>> {
        let k = self.cardinality;
        if k > cap {
            return Err(Error::CapExceeded { cardinality: k, cap });
        }
        let nt = self.per_antenna.len();
        let mut pts = vec![Complex64::new(0.0, 0.0); k * nt];
        let mut buf = Vec::new();
        for n in 0..k {
            self.point(n, &mut buf);
            pts[n * nt..(n + 1) * nt].copy_from_slice(&buf);
        }
        let mut pairs = Vec::with_capacity(k * (k - 1));
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let mut d2 = 0.0;
                for t in 0..nt {
                    d2 += (pts[i * nt + t] - pts[j * nt + t]).norm_sqr();
                }
                pairs.push((i, j, d2.sqrt()));
            }
        }
        Ok(pairs)
    }
}
