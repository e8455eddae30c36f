//! 2D FFT and quadrant shifts over row-major complex buffers.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::par;

/// In-place 2D DFT. The inverse is scaled by `1 / (rows * cols)`.
pub fn fft2(data: &mut [Complex64], rows: usize, cols: usize, direction: FftDirection) {
    assert_eq!(data.len(), rows * cols);
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft(cols, direction);
    let col_fft = planner.plan_fft(rows, direction);

    par::for_each_chunk_mut(data, cols, |_, row| row_fft.process(row));
    let mut t = transpose(data, rows, cols);
    par::for_each_chunk_mut(&mut t, rows, |_, col| col_fft.process(col));
    let back = transpose(&t, cols, rows);
    data.copy_from_slice(&back);

    if direction == FftDirection::Inverse {
        let scale = 1.0 / (rows * cols) as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

/// Moves index 0 to the centre (`n / 2`) along both axes.
pub fn fftshift<T: Copy>(data: &[T], rows: usize, cols: usize) -> Vec<T> {
    let mut out = data.to_vec();
    for r in 0..rows {
        for c in 0..cols {
            out[((r + rows / 2) % rows) * cols + (c + cols / 2) % cols] = data[r * cols + c];
        }
    }
    out
}

/// Inverse of [`fftshift`]: moves the centre (`n / 2`) to index 0.
pub fn ifftshift<T: Copy>(data: &[T], rows: usize, cols: usize) -> Vec<T> {
    let mut out = data.to_vec();
    for r in 0..rows {
        for c in 0..cols {
            out[r * cols + c] = data[((r + rows / 2) % rows) * cols + (c + cols / 2) % cols];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(x: &[Complex64], rows: usize, cols: usize, sign: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
        for p in 0..rows {
            for q in 0..cols {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..rows {
                    for c in 0..cols {
                        let ph = sign
                            * 2.0
                            * PI
                            * ((p * r) as f64 / rows as f64 + (q * c) as f64 / cols as f64);
                        acc += x[r * cols + c] * Complex64::from_polar(1.0, ph);
                    }
                }
                out[p * cols + q] = acc;
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_on_rectangle() {
        let (rows, cols) = (6, 5);
        let x: Vec<Complex64> = (0..rows * cols)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let mut y = x.clone();
        fft2(&mut y, rows, cols, FftDirection::Forward);
        let want = naive_dft(&x, rows, cols, -1.0);
        for (a, b) in y.iter().zip(&want) {
            assert!((a - b).norm() < 1e-10);
        }
        fft2(&mut y, rows, cols, FftDirection::Inverse);
        for (a, b) in y.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn shifts_are_inverse_for_odd_and_even() {
        for (rows, cols) in [(4, 4), (5, 3), (6, 7)] {
            let x: Vec<usize> = (0..rows * cols).collect();
            assert_eq!(ifftshift(&fftshift(&x, rows, cols), rows, cols), x);
            let s = fftshift(&x, rows, cols);
            assert_eq!(s[(rows / 2) * cols + cols / 2], 0);
        }
    }
}
