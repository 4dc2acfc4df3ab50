//! Line fitting and dominant-frequency extraction for uniformly sampled series.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::numeric::CompensatedSum;

#[derive(Debug, Clone, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

/// Ordinary least squares y = slope * t + intercept.
pub fn linear_fit(t: &[f64], y: &[f64]) -> LineFit {
    let n = t.len() as f64;
    let t_mean = t.iter().copied().collect::<CompensatedSum>().value() / n;
    let y_mean = y.iter().copied().collect::<CompensatedSum>().value() / n;
    let mut sty = CompensatedSum::new();
    let mut stt = CompensatedSum::new();
    for (&ti, &yi) in t.iter().zip(y) {
        sty.add((ti - t_mean) * (yi - y_mean));
        stt.add((ti - t_mean) * (ti - t_mean));
    }
    let slope = sty.value() / stt.value();
    let intercept = y_mean - slope * t_mean;
    let residuals = t.iter().zip(y).map(|(&ti, &yi)| yi - (slope * ti + intercept)).collect();
    LineFit { slope, intercept, residuals }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillation {
    /// Angular frequency.
    pub frequency: f64,
    pub amplitude: f64,
}

/// Strongest sinusoid in a uniformly sampled, mean-free signal.
///
/// The signal is Hann-windowed and zero-padded 16x before the transform; the
/// peak bin is refined by a parabola through the log magnitudes of its
/// neighbours. The amplitude is a least-squares fit of cos and sin at the
/// refined frequency.
pub fn dominant_oscillation(dt: f64, signal: &[f64]) -> Oscillation {
    let n = signal.len();
    if n < 4 {
        return Oscillation { frequency: 0.0, amplitude: 0.0 };
    }
    let padded = (16 * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); padded];
    for (i, (&s, b)) in signal.iter().zip(buf.iter_mut()).enumerate() {
        let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
        *b = Complex64::new(s * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
    let mag: Vec<f64> = buf[..padded / 2].iter().map(|z| z.norm()).collect();

    // skip the DC lobe of the window (two original bins wide)
    let first = (2 * padded / n).min(mag.len() - 2).max(1);
    let (peak, _) = mag[first..mag.len() - 1]
        .iter()
        .enumerate()
        .fold((first, f64::MIN), |acc, (i, &m)| if m > acc.1 { (i + first, m) } else { acc });
    let (a, b, c) = (mag[peak - 1].max(1e-300).ln(), mag[peak].max(1e-300).ln(), mag[peak + 1].max(1e-300).ln());
    let denom = a - 2.0 * b + c;
    let shift = if denom.abs() > 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    let bin = peak as f64 + shift.clamp(-0.5, 0.5);
    let frequency = 2.0 * PI * bin / (padded as f64 * dt);

    // least-squares amplitude at the refined frequency
    let (mut cc, mut ss, mut cs, mut yc, mut ys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, &y) in signal.iter().enumerate() {
        let (s, c) = (frequency * i as f64 * dt).sin_cos();
        cc += c * c;
        ss += s * s;
        cs += c * s;
        yc += y * c;
        ys += y * s;
    }
    let det = cc * ss - cs * cs;
    let amplitude = if det.abs() > 0.0 {
        let ac = (yc * ss - ys * cs) / det;
        let as_ = (ys * cc - yc * cs) / det;
        ac.hypot(as_)
    } else {
        0.0
    };
    Oscillation { frequency, amplitude }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|x| 3.0 * x - 2.0).collect();
        let fit = linear_fit(&t, &y);
        assert!((fit.slope - 3.0).abs() < 1e-13);
        assert!((fit.intercept + 2.0).abs() < 1e-13);
    }

    #[test]
    fn recovers_sinusoid() {
        let dt = 0.49;
        let sig: Vec<f64> = (0..256).map(|i| 0.5 * (2.013 * i as f64 * dt + 0.3).sin()).collect();
        let o = dominant_oscillation(dt, &sig);
        assert!((o.frequency - 2.013).abs() < 2e-3, "{o:?}");
        assert!((o.amplitude - 0.5).abs() < 1e-2, "{o:?}");
    }
}
