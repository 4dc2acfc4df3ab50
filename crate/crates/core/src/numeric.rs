//! Small numerical helpers shared by the reductions.

use num_complex::Complex64;

/// Neumaier-compensated accumulator. Summation order is the caller's loop
/// order, so results are reproducible run to run.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated complex accumulator (real and imaginary parts summed separately).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Variance from second moments; round-off negatives are clamped to zero.
pub fn variance(second: f64, first: f64) -> f64 {
    let v = second - first * first;
    if v < 0.0 {
        if -v > 1e-12 * second.abs().max(1.0) {
            log::warn!("negative variance {v:e} clamped to zero");
        }
        0.0
    } else {
        v
    }
}

/// Fixed 17-significant-digit rendering used by every CSV and report writer.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
