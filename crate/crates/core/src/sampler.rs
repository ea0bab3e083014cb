//! Conditional-inversion sampling: `u` uniform, then `v` from `K_C(u, ·)`.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`; draw `i`
//! consumes stream words `4i..4i+4`, so any split of the index range
//! reproduces the sequential batch.

use std::io::{self, Write};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::copula::{Copula, GridConfig, Label};
use crate::error::{Error, Result};

const INVERSION_TOL: f64 = 1e-10;
const INVERSION_CAP: usize = 200;
const CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub points: Vec<(f64, f64)>,
    pub seed: u64,
    pub n: usize,
    pub label: Label,
}

/// Uniform on (0, 1) from the top 53 bits.
fn unit(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Generalized inverse `inf{v : K(u, v) >= w}` by bisection.
pub fn invert_kernel(c: &dyn Copula, u: f64, w: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..INVERSION_CAP {
        if hi - lo <= INVERSION_TOL {
            return hi;
        }
        let mid = 0.5 * (lo + hi);
        if c.kernel(u, mid) >= w {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    log::warn!("kernel inversion hit the iteration cap at u={u}, w={w}");
    0.5 * (lo + hi)
}

pub fn sample(c: &dyn Copula, n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks: Vec<Vec<(f64, f64)>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| {
            let start = k * CHUNK;
            let end = (start + CHUNK).min(n);
            let mut rng = base.clone();
            rng.set_word_pos(4 * start as u128);
            (start..end)
                .map(|_| {
                    let u = unit(rng.next_u64());
                    let w = unit(rng.next_u64());
                    (u, invert_kernel(c, u, w))
                })
                .collect()
        })
        .collect();
    Ok(SampleBatch {
        points: chunks.concat(),
        seed,
        n,
        label: c.label(),
    })
}

/// `max |F_n − C|` over the grid nodes.
pub fn empirical_cdf_distance(batch: &SampleBatch, c: &dyn Copula, grid: &GridConfig) -> Result<f64> {
    if batch.points.is_empty() {
        return Err(Error::InvalidParameter("empty batch".into()));
    }
    grid.validate()?;
    let (us, vs) = (grid.u_axis(), grid.v_axis());
    let (nu, nv) = (us.len(), vs.len());
    // counts[i][j]: points whose first axis node >= u is i and likewise for v
    let mut counts = vec![0usize; (nu + 1) * (nv + 1)];
    for &(u, v) in &batch.points {
        let i = us.partition_point(|&a| a < u);
        let j = vs.partition_point(|&b| b < v);
        counts[i * (nv + 1) + j] += 1;
    }
    for i in 0..=nu {
        for j in 0..=nv {
            let mut s = counts[i * (nv + 1) + j];
            if i > 0 {
                s += counts[(i - 1) * (nv + 1) + j];
            }
            if j > 0 {
                s += counts[i * (nv + 1) + j - 1];
            }
            if i > 0 && j > 0 {
                s -= counts[(i - 1) * (nv + 1) + j - 1];
            }
            counts[i * (nv + 1) + j] = s;
        }
    }
    let n = batch.points.len() as f64;
    let mut worst = 0.0_f64;
    for (i, &u) in us.iter().enumerate() {
        for (j, &v) in vs.iter().enumerate() {
            let emp = counts[i * (nv + 1) + j] as f64 / n;
            worst = worst.max((emp - c.cdf(u, v)).abs());
        }
    }
    Ok(worst)
}

/// Decimal with 17 significant digits, no exponent.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// CSV with header `u,v` and LF line endings.
pub fn write_csv(batch: &SampleBatch, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "u,v")?;
    for &(u, v) in &batch.points {
        writeln!(out, "{},{}", format_g17(u), format_g17(v))?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_baseline, Baseline};

    #[test]
    fn comonotone_batch_on_diagonal() {
        let m = make_baseline(Baseline::M);
        let b = sample(&m, 1000, 7).unwrap();
        assert_eq!(b.points.len(), 1000);
        assert!(b.points.iter().all(|&(u, v)| (u - v).abs() <= 1e-9));
    }

    #[test]
    fn chunked_stream_matches_sequential() {
        let pi = make_baseline(Baseline::Pi);
        let b = sample(&pi, 3000, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(u, _) in &b.points {
            assert_eq!(u, unit(rng.next_u64()));
            rng.next_u64();
        }
        assert_eq!(b, sample(&pi, 3000, 11).unwrap());
    }

    #[test]
    fn g17_formatting() {
        assert_eq!(format_g17(0.5), "0.50000000000000000");
        assert_eq!(format_g17(1.0), "1.0000000000000000");
        for &x in &[0.123_456_789_012_345_68, 1e-7, 0.999_999_999_999_999_9, 3.0e-16] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn empty_and_zero() {
        let pi = make_baseline(Baseline::Pi);
        assert!(sample(&pi, 0, 1).is_err());
        let b = SampleBatch {
            points: vec![],
            seed: 0,
            n: 0,
            label: Label::new("pi"),
        };
        assert!(empirical_cdf_distance(&b, &pi, &GridConfig::default()).is_err());
    }
}
