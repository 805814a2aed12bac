//! Multi-axis FFT plumbing shared by the spatial and space-time fields.
//!
//! Arrays are row-major over `shape`. Coefficients returned by
//! [`analyze`] are the plain normalized DFT `a_k = N^{-1} sum_j f_j e^{-2 pi i k j / N}`
//! in FFT index order; callers layer their own grid-origin phase on top.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Signed wavenumber of FFT index `idx` on an axis of length `n`.
#[inline]
pub(crate) fn wavenumber(idx: usize, n: usize) -> i64 {
    if idx < n.div_ceil(2) {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

/// FFT index of signed wavenumber `k` on an axis of length `n`.
#[inline]
pub(crate) fn index_of(k: i64, n: usize) -> usize {
    if k >= 0 {
        k as usize
    } else {
        (n as i64 + k) as usize
    }
}

/// Unnormalized in-place transform along every axis.
pub(crate) fn transform(data: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    debug_assert_eq!(data.len(), shape.iter().product::<usize>());
    for axis in 0..shape.len() {
        transform_axis(data, shape, axis, direction);
    }
}

fn transform_axis(data: &mut [Complex64], shape: &[usize], axis: usize, direction: FftDirection) {
    let len = shape[axis];
    if len == 1 {
        return;
    }
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction));
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    if stride == 1 {
        for line in data.chunks_exact_mut(len) {
            fft.process_with_scratch(line, &mut scratch);
        }
        return;
    }

    let mut line = vec![Complex64::default(); len];
    for o in 0..outer {
        let base = o * len * stride;
        for i in 0..stride {
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[base + j * stride + i];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (j, v) in line.iter().enumerate() {
                data[base + j * stride + i] = *v;
            }
        }
    }
}

/// Normalized forward DFT of `values`.
pub(crate) fn analyze(values: &[Complex64], shape: &[usize]) -> Vec<Complex64> {
    let mut out = values.to_vec();
    transform(&mut out, shape, FftDirection::Forward);
    let scale = 1.0 / out.len() as f64;
    for v in &mut out {
        *v *= scale;
    }
    out
}

/// Inverse of [`analyze`]: evaluates the trigonometric sum at the grid points.
pub(crate) fn synthesize(coeffs: &[Complex64], shape: &[usize]) -> Vec<Complex64> {
    let mut out = coeffs.to_vec();
    transform(&mut out, shape, FftDirection::Inverse);
    out
}

/// Copies coefficients between two shapes with the same number of axes,
/// keeping the modes common to both bands and zero-filling the rest.
/// Growing a shape is zero-padding; shrinking it is truncation.
pub(crate) fn resample(coeffs: &[Complex64], from: &[usize], to: &[usize]) -> Vec<Complex64> {
    assert_eq!(from.len(), to.len());
    let mut out = vec![Complex64::default(); to.iter().product()];
    let maps: Vec<Vec<(usize, usize)>> = from
        .iter()
        .zip(to)
        .map(|(&a, &b)| {
            let m = a.min(b) as i64;
            (-(m / 2)..(m - m / 2))
                .map(|k| (index_of(k, a), index_of(k, b)))
                .collect()
        })
        .collect();

    let axes = from.len();
    let mut counter = vec![0usize; axes];
    loop {
        let (mut src, mut dst) = (0usize, 0usize);
        for a in 0..axes {
            let (s, d) = maps[a][counter[a]];
            src = src * from[a] + s;
            dst = dst * to[a] + d;
        }
        out[dst] = coeffs[src];

        let mut a = axes;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            counter[a] += 1;
            if counter[a] < maps[a].len() {
                break;
            }
            counter[a] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumber_index_roundtrip() {
        for n in [8usize, 9, 64] {
            for idx in 0..n {
                assert_eq!(index_of(wavenumber(idx, n), n), idx);
            }
        }
        assert_eq!(wavenumber(4, 8), -4);
        assert_eq!(wavenumber(3, 8), 3);
    }

    #[test]
    fn analyze_single_mode() {
        let n = 16;
        let values: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 3.0 * j as f64 / n as f64))
            .collect();
        let a = analyze(&values, &[n]);
        for (i, c) in a.iter().enumerate() {
            let expected = if i == 3 { 1.0 } else { 0.0 };
            assert!((c.re - expected).abs() < 1e-14 && c.im.abs() < 1e-14);
        }
    }

    #[test]
    fn two_axis_roundtrip() {
        let shape = [4usize, 8];
        let values: Vec<Complex64> = (0..32).map(|i| Complex64::new(i as f64, (i * i) as f64 * 0.1)).collect();
        let back = synthesize(&analyze(&values, &shape), &shape);
        for (a, b) in values.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn resample_pad_then_truncate_is_identity() {
        let from = [4usize, 8];
        let to = [8usize, 24];
        let coeffs: Vec<Complex64> = (0..32).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        let padded = resample(&coeffs, &from, &to);
        assert_eq!(padded.len(), 8 * 24);
        let back = resample(&padded, &to, &from);
        assert_eq!(back, coeffs);
        let nonzero = padded.iter().filter(|c| c.norm() > 0.0).count();
        assert_eq!(nonzero, 31); // the (0,0) entry is zero in the input
    }
}
