//! Iterative radix-2 Cooley-Tukey FFT over `Complex64`.
//!
//! Only power-of-two lengths are accepted. Twiddles are evaluated directly
//! with `sin_cos` per stage index rather than by recurrence, which keeps the
//! round-off at the level needed for d up to 2^20.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HbfError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

pub fn is_supported_len(n: usize) -> bool {
    n >= 1 && n.is_power_of_two()
}

/// In-place transform. The inverse is scaled by `1/n`, so
/// `transform(Inverse)` undoes `transform(Forward)`.
pub fn transform(buf: &mut [Complex64], dir: Direction) -> Result<()> {
    let n = buf.len();
    if !is_supported_len(n) {
        return Err(HbfError::UnsupportedDimension(n));
    }
    if n == 1 {
        return Ok(());
    }
    bit_reverse_permute(buf);

    let sign = match dir {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let mut twiddles = Vec::with_capacity(n / 2);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        twiddles.clear();
        twiddles.extend((0..half).map(|k| {
            let (s, c) = (sign * 2.0 * PI * k as f64 / len as f64).sin_cos();
            Complex64::new(c, s)
        }));
        for chunk in buf.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let t = *b * *w;
                *b = *a - t;
                *a += t;
            }
        }
        len <<= 1;
    }

    if dir == Direction::Inverse {
        let scale = 1.0 / n as f64;
        for x in buf.iter_mut() {
            *x *= scale;
        }
    }
    Ok(())
}

fn bit_reverse_permute(buf: &mut [Complex64]) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            buf.swap(i, j);
        }
    }
}

/// Forward transform of a real signal.
pub fn forward_real(x: &[f64]) -> Result<Vec<Complex64>> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(&mut buf, Direction::Forward)?;
    Ok(buf)
}

/// Inverse transform, keeping only the real part.
pub fn inverse_real(mut spectrum: Vec<Complex64>) -> Result<Vec<f64>> {
    transform(&mut spectrum, Direction::Inverse)?;
    Ok(spectrum.into_iter().map(|c| c.re).collect())
}
