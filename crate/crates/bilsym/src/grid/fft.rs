use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Unnormalized FFT along every axis of a `points^axes` row-major array.
///
/// Forward uses `e^{-i…}`, inverse `e^{+i…}`; callers apply the weights.
pub fn fft_axes(data: &mut [Complex64], points: usize, axes: usize, direction: Direction) {
    debug_assert_eq!(data.len(), points.pow(axes as u32));
    let mut planner = FftPlanner::<f64>::new();
    let fft = match direction {
        Direction::Forward => planner.plan_fft_forward(points),
        Direction::Inverse => planner.plan_fft_inverse(points),
    };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..axes {
        let stride = points.pow((axes - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let block = stride * points;
        let mut line = vec![Complex64::new(0.0, 0.0); points];
        for base in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + inner + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + inner + k * stride] = *v;
                }
            }
        }
    }
}
