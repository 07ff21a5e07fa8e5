//! Seed-reproducible symbol sources, AWGN, and flat Rayleigh channels.
//!
//! Randomness is organized as counter-based substreams: every draw comes
//! from a generator keyed by `(master_seed, trial_index, role)`, so trial
//! workers never share RNG state and results are independent of worker
//! count or execution order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::constellation::VectorConstellation;
use crate::error::{Error, Result};

/// What a substream is used for; part of the stream key so that the same
/// trial can draw symbols, noise, and channel taps independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Symbols = 1,
    Noise = 2,
    Channel = 3,
    Tie = 4,
}

/// Derives per-trial substreams from a single master seed.
#[derive(Debug, Clone, Copy)]
pub struct SeedPolicy {
    pub master_seed: u64,
}

fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    *state = z ^ (z >> 31);
}

impl SeedPolicy {
    pub fn new(master_seed: u64) -> Self {
        SeedPolicy { master_seed }
    }

    /// Deterministic generator for `(master_seed, trial, role)`.
    pub fn stream(&self, trial: u64, role: Role) -> ChaCha8Rng {
        let mut state = self.master_seed;
        splitmix64(&mut state);
        state ^= trial;
        splitmix64(&mut state);
        state ^= role as u64;
        splitmix64(&mut state);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            splitmix64(&mut state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

/// Flat MIMO channel matrix, `N_r x N_t` row-major.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    h: Vec<Complex64>,
    nr: usize,
    nt: usize,
    mode: ChannelMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelMode {
    /// `H = I`; encodes the perfect-equalization assumption.
    Identity,
    /// I.i.d. unit-variance circular complex Gaussian entries.
    Rayleigh,
}

impl ChannelRealization {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        let mut h = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            h[i * n + i] = Complex64::new(1.0, 0.0);
        }
        ChannelRealization {
            h,
            nr: n,
            nt: n,
            mode: ChannelMode::Identity,
        }
    }

    pub fn rayleigh(nr: usize, nt: usize, rng: &mut impl Rng) -> Self {
        assert!(nr >= 1 && nt >= 1);
        let scale = 0.5f64.sqrt(); // unit variance split across the two axes
        let h = (0..nr * nt)
            .map(|_| {
                Complex64::new(
                    scale * rng.sample::<f64, _>(StandardNormal),
                    scale * rng.sample::<f64, _>(StandardNormal),
                )
            })
            .collect();
        ChannelRealization {
            h,
            nr,
            nt,
            mode: ChannelMode::Rayleigh,
        }
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn mode(&self) -> ChannelMode {
        self.mode
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.h[r * self.nt + c]
    }

    /// `H x`, writing into `out` (resized to `N_r`).
    pub fn apply(&self, x: &[Complex64], out: &mut Vec<Complex64>) -> Result<()> {
        if x.len() != self.nt {
            return Err(Error::DimensionMismatch(format!(
                "input length {} vs {} transmit antennas",
                x.len(),
                self.nt
            )));
        }
        out.clear();
        out.resize(self.nr, Complex64::new(0.0, 0.0));
        if self.mode == ChannelMode::Identity {
            out.copy_from_slice(x);
            return Ok(());
        }
        for (r, slot) in out.iter_mut().enumerate() {
            let row = &self.h[r * self.nt..(r + 1) * self.nt];
            *slot = row
                .iter()
                .zip(x)
                .map(|(hij, xj)| hij * xj)
                .sum();
        }
        Ok(())
    }
}

/// Draw `n` i.i.d. uniform candidate indices from the vector constellation,
/// one per trial substream.
pub fn draw_symbols(v: &VectorConstellation, n: usize, seed: &SeedPolicy) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    Ok((0..n as u64)
        .map(|trial| seed.stream(trial, Role::Symbols).gen_range(0..v.cardinality()))
        .collect())
}

/// Uniform candidate index for a single trial.
pub fn draw_symbol(v: &VectorConstellation, seed: &SeedPolicy, trial: u64) -> usize {
    seed.stream(trial, Role::Symbols).gen_range(0..v.cardinality())
}

/// `y = H x + w` with circular complex noise of per-component total
/// variance `n0` (`n0 / 2` per real axis).
pub fn transmit(
    x: &[Complex64],
    h: &ChannelRealization,
    n0: f64,
    seed: &SeedPolicy,
    trial: u64,
    out: &mut Vec<Complex64>,
) -> Result<()> {
    assert!(n0 >= 0.0);
    h.apply(x, out)?;
    let sigma = (n0 / 2.0).sqrt();
    let mut rng = seed.stream(trial, Role::Noise);
    for y in out.iter_mut() {
        *y += Complex64::new(
            sigma * rng.sample::<f64, _>(StandardNormal),
            sigma * rng.sample::<f64, _>(StandardNormal),
        );
    }
    Ok(())
}
