//! Multidimensional complex FFT over row-major arrays (last axis contiguous).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<(FftPlanner<f64>, PlanCache)>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    let (planner, plans) = &mut *guard;
    plans
        .entry((len, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// In-place unnormalized transform along every axis.
pub(crate) fn fft_nd(data: &mut [Complex64], dims: &[usize], inverse: bool) {
    let total: usize = dims.iter().product();
    assert_eq!(data.len(), total);
    let mut stride = 1;
    for axis in (0..dims.len()).rev() {
        let len = dims[axis];
        let fft = plan(len, inverse);
        if stride == 1 {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(data, &mut scratch);
        } else {
            let block = len * stride;
            let mut line = vec![Complex64::default(); len];
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (k, v) in line.iter_mut().enumerate() {
                        *v = data[base + k * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (k, v) in line.iter().enumerate() {
                        data[base + k * stride] = *v;
                    }
                }
            }
        }
        stride *= len;
    }
}

pub(crate) fn forward_real(values: &[f64], dims: &[usize]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    fft_nd(&mut data, dims, false);
    data
}

/// Inverse transform with the `1/N` normalization, keeping the real part.
pub(crate) fn inverse_real(spectrum: &[Complex64], dims: &[usize]) -> Vec<f64> {
    let mut data = spectrum.to_vec();
    fft_nd(&mut data, dims, true);
    let scale = 1.0 / data.len() as f64;
    data.iter().map(|c| c.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_dft_2d() {
        let dims = [4usize, 6];
        let values: Vec<f64> = (0..24).map(|i| ((i * 7 % 11) as f64) - 3.5).collect();
        let fast = forward_real(&values, &dims);
        for k0 in 0..4 {
            for k1 in 0..6 {
                let mut acc = Complex64::default();
                for x0 in 0..4 {
                    for x1 in 0..6 {
                        let phase = -2.0
                            * std::f64::consts::PI
                            * ((k0 * x0) as f64 / 4.0 + (k1 * x1) as f64 / 6.0);
                        acc += values[x0 * 6 + x1] * Complex64::from_polar(1.0, phase);
                    }
                }
                assert!((acc - fast[k0 * 6 + k1]).norm() < 1e-12);
            }
        }
        let back = inverse_real(&fast, &dims);
        for (a, b) in back.iter().zip(&values) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
