//! Small numerical helpers: compensated summation, the Japanese bracket and
//! Simpson quadrature on uniform grids.

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated summation applied to real and imaginary parts independently.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of a sequence of reals.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<NeumaierSum>().value()
}

/// `⟨x⟩ = (1 + x²)^{1/2}`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    x.hypot(1.0)
}

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// Running integral `∫_{x_0}^{x_i} f` on a uniform grid with spacing `h`.
///
/// Even nodes use composite Simpson from the origin. Odd nodes add the
/// three-point rule `h/12·(-f_{i-2} + 8f_{i-1} + 5f_i)` on the last panel
/// (the first odd node uses the trapezoid-corrected form with `f_2`).
/// Requires at least three samples.
pub fn cumulative_simpson(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let len = values.len();
    assert!(len >= 3, "cumulative Simpson needs at least three samples");
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for i in (2..len).step_by(2) {
        out[i] = out[i - 2] + (values[i - 2] + values[i - 1] * 4.0 + values[i]) * (h / 3.0);
    }
    // first panel [x0, x1] from the parabola through x0, x1, x2
    out[1] = (values[0] * 5.0 + values[1] * 8.0 - values[2]) * (h / 12.0);
    for i in (3..len).step_by(2) {
        out[i] = out[i - 1] + (-values[i - 2] + values[i - 1] * 8.0 + values[i] * 5.0) * (h / 12.0);
    }
    out
}
