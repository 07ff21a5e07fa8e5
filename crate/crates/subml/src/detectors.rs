//! The three detectors: exhaustive ML, the early-exit thresholded search,
//! and the one-dimensional null-region randomized detector, all with exact
//! cost-function-evaluation accounting.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::ChannelRealization;
use crate::constellation::VectorConstellation;
use crate::error::{Error, Result};

/// Result of one detection, including the search cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    pub decided_index: usize,
    /// Number of candidate distances computed.
    pub cf_evals: usize,
    /// True when a candidate was accepted via the threshold; false when
    /// the search fell back to the full argmin.
    pub hit: bool,
    pub decided_distance: f64,
}

/// All candidate distances `d_i = ||y - H x_i||` in enumeration order.
pub fn distances(
    y: &[Complex64],
    v: &VectorConstellation,
    h: &ChannelRealization,
) -> Result<Vec<f64>> {
    let mut oracle = DistanceOracle::new(y, v, h)?;
    Ok((0..v.cardinality()).map(|n| oracle.eval(n)).collect())
}

/// Computes candidate distances on demand, for the lazily scanning
/// early-exit search.
pub struct DistanceOracle<'a> {
    y: &'a [Complex64],
    v: &'a VectorConstellation,
    h: &'a ChannelRealization,
    cand: Vec<Complex64>,
    hx: Vec<Complex64>,
}

impl<'a> DistanceOracle<'a> {
    pub fn new(
        y: &'a [Complex64],
        v: &'a VectorConstellation,
        h: &'a ChannelRealization,
    ) -> Result<Self> {
        if y.len() != h.nr() {
            return Err(Error::DimensionMismatch(format!(
                "received vector length {} vs {} receive antennas",
                y.len(),
                h.nr()
            )));
        }
        if v.num_antennas() != h.nt() {
            return Err(Error::DimensionMismatch(format!(
                "constellation has {} antennas vs channel {}",
                v.num_antennas(),
                h.nt()
            )));
        }
        Ok(DistanceOracle {
            y,
            v,
            h,
            cand: Vec::new(),
            hx: Vec::new(),
        })
    }

    /// `||y - H x_n||` for candidate `n`.
    pub fn eval(&mut self, n: usize) -> f64 {
        self.v.point(n, &mut self.cand);
        self.h
            .apply(&self.cand, &mut self.hx)
            .expect("dimensions checked at construction");
        self.y
            .iter()
            .zip(&self.hx)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn cardinality(&self) -> usize {
        self.v.cardinality()
    }
}

/// Full search: first index attaining the minimum distance.
pub fn ml_exhaustive(dists: &[f64]) -> Result<SearchOutcome> {
    if dists.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut best = 0;
    for (i, &d) in dists.iter().enumerate() {
        if d < dists[best] {
            best = i;
        }
    }
    Ok(SearchOutcome {
        decided_index: best,
        cf_evals: dists.len(),
        hit: false,
        decided_distance: dists[best],
    })
}

/// Linear scan in enumeration order, accepting the first candidate with
/// `d_i <= beta` without evaluating the rest; falls back to the full
/// argmin when no candidate qualifies.
///
/// `dist(n)` is called at most once per index, in increasing order.
pub fn early_exit<F>(cardinality: usize, beta: f64, mut dist: F) -> Result<SearchOutcome>
where
    F: FnMut(usize) -> f64,
{
    if cardinality == 0 {
        return Err(Error::EmptyInput);
    }
    assert!(beta >= 0.0);
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for i in 0..cardinality {
        let d = dist(i);
        if d <= beta {
            return Ok(SearchOutcome {
                decided_index: i,
                cf_evals: i + 1,
                hit: true,
                decided_distance: d,
            });
        }
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    Ok(SearchOutcome {
        decided_index: best,
        cf_evals: cardinality,
        hit: false,
        decided_distance: best_d,
    })
}

/// [`early_exit`] over a precomputed distance list.
pub fn early_exit_slice(dists: &[f64], beta: f64) -> Result<SearchOutcome> {
    early_exit(dists.len(), beta, |i| dists[i])
}

/// One-dimensional randomized detector over shrunken decision regions:
/// each level claims the points within `beta` of it (plus the outer tail
/// at the extremes); in the ambiguity region between two adjacent claims
/// the decision is a fair coin flip between the two neighbors. The same
/// rule resolves overlapping claims when `beta` exceeds half the level
/// spacing.
pub fn null_region_1d(y: f64, levels: &[f64], beta: f64, rng: &mut impl Rng) -> usize {
    assert!(!levels.is_empty() && beta >= 0.0);
    let last = levels.len() - 1;
    if y <= levels[0] {
        return 0;
    }
    if y >= levels[last] {
        return last;
    }
    // adjacent pair straddling y
    let k = levels.partition_point(|&l| l < y) - 1;
    let near_left = y - levels[k] <= beta;
    let near_right = levels[k + 1] - y <= beta;
    match (near_left, near_right) {
        (true, false) => k,
        (false, true) => k + 1,
        // overlap or NULL: fair draw between the two adjacent levels
        _ => {
            if rng.gen::<bool>() {
                k + 1
            } else {
                k
            }
        }
    }
}

/// Deterministic two-symbol detector with a single decision boundary at
/// distance `beta` from `s1` on the `s0` side: decide `s1` on `s1`'s side
/// of that boundary, `s0` elsewhere. Returns 0 or 1.
pub fn threshold_pair(y: f64, s0: f64, s1: f64, beta: f64) -> usize {
    assert!(s0 != s1 && beta >= 0.0);
    let dir = (s1 - s0).signum();
    if dir * (y - s1) >= -beta {
        1
    } else {
        0
    }
}
