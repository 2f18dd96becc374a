//! One-dimensional functions used as initial profiles and test functions.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Continuous piecewise-linear function, zero outside its first and last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    /// Knots must have strictly increasing abscissae and finite values. The
    /// first and last value must be zero so that the function is continuous
    /// with compact support.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Ok(Self { knots });
        }
        if knots.len() < 2 {
            return Err(Error::InvalidArgument("piecewise-linear function needs at least two knots"));
        }
        for w in knots.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::InvalidArgument("knot positions must be strictly increasing"));
            }
        }
        if knots.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidArgument("knots must be finite"));
        }
        if knots[0].1 != 0.0 || knots[knots.len() - 1].1 != 0.0 {
            return Err(Error::InvalidArgument("first and last knot values must be zero"));
        }
        Ok(Self { knots })
    }

    pub fn zero() -> Self {
        Self { knots: Vec::new() }
    }

    /// Trapezoid: 0 at a, `level` on [a+ramp, b-ramp], 0 at b.
    pub fn plateau(a: f64, b: f64, ramp: f64, level: f64) -> Result<Self> {
        if !(ramp > 0.0) || !(a + 2.0 * ramp <= b) {
            return Err(Error::InvalidArgument("plateau needs 0 < ramp <= (b - a) / 2"));
        }
        if a + 2.0 * ramp == b {
            return Self::new(alloc::vec![(a, 0.0), (a + ramp, level), (b, 0.0)]);
        }
        Self::new(alloc::vec![(a, 0.0), (a + ramp, level), (b - ramp, level), (b, 0.0)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn is_zero(&self) -> bool {
        self.knots.iter().all(|k| k.1 == 0.0)
    }

    /// Closed support interval, `None` for the zero function.
    pub fn support(&self) -> Option<(f64, f64)> {
        if self.knots.is_empty() {
            None
        } else {
            Some((self.knots[0].0, self.knots[self.knots.len() - 1].0))
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        if k.is_empty() || x <= k[0].0 || x >= k[k.len() - 1].0 {
            return 0.0;
        }
        let i = k.partition_point(|p| p.0 <= x);
        let (x0, y0) = k[i - 1];
        let (x1, y1) = k[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Exact integral over [a, b].
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return -self.integral(b, a);
        }
        let mut total = 0.0;
        for w in self.knots.windows(2) {
            let lo = w[0].0.max(a);
            let hi = w[1].0.min(b);
            if hi > lo {
                total += 0.5 * (hi - lo) * (self.eval_segment(w, lo) + self.eval_segment(w, hi));
            }
        }
        total
    }

    fn eval_segment(&self, w: &[(f64, f64)], x: f64) -> f64 {
        w[0].1 + (w[1].1 - w[0].1) * (x - w[0].0) / (w[1].0 - w[0].0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.knots.iter().fold(0.0, |m, k| m.max(k.1.abs()))
    }

    pub fn total_variation(&self) -> f64 {
        self.knots.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Linear(PiecewiseLinear),
    /// `4 h (x - a)(b - x) / (b - a)^2` on [a, b].
    Parabola { a: f64, b: f64, height: f64 },
}

/// Nonnegative continuous initial profile with compact support.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileFunction {
    shape: Shape,
}

impl ProfileFunction {
    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.iter().any(|k| k.1 < 0.0) {
            return Err(Error::InvalidArgument("profile values must be nonnegative"));
        }
        Ok(Self { shape: Shape::Linear(PiecewiseLinear::new(knots)?) })
    }

    pub fn zero() -> Self {
        Self { shape: Shape::Linear(PiecewiseLinear::zero()) }
    }

    pub fn plateau(a: f64, b: f64, ramp: f64, level: f64) -> Result<Self> {
        if level < 0.0 {
            return Err(Error::InvalidArgument("profile values must be nonnegative"));
        }
        Ok(Self { shape: Shape::Linear(PiecewiseLinear::plateau(a, b, ramp, level)?) })
    }

    /// Hat function with apex `height` at `peak`.
    pub fn hat(a: f64, peak: f64, b: f64, height: f64) -> Result<Self> {
        Self::piecewise_linear(alloc::vec![(a, 0.0), (peak, height), (b, 0.0)])
    }

    /// Parabolic bump with maximum `height` at the midpoint of [a, b].
    /// `parabola(0, 1, 0.25)` is `x(1 - x)` on [0, 1].
    pub fn parabola(a: f64, b: f64, height: f64) -> Result<Self> {
        if !(a < b) || !(height >= 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument("parabola needs a < b and height >= 0"));
        }
        Ok(Self { shape: Shape::Parabola { a, b, height } })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Linear(p) => p.eval(x),
            &Shape::Parabola { a, b, height } => {
                if x <= a || x >= b {
                    0.0
                } else {
                    4.0 * height * (x - a) * (b - x) / ((b - a) * (b - a))
                }
            }
        }
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        match &self.shape {
            Shape::Linear(p) => p.support(),
            &Shape::Parabola { a, b, height } => (height > 0.0).then_some((a, b)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.shape {
            Shape::Linear(p) => p.is_zero(),
            Shape::Parabola { height, .. } => *height == 0.0,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match &self.shape {
            Shape::Linear(p) => p.sup_norm(),
            Shape::Parabola { height, .. } => *height,
        }
    }

    pub fn total_variation(&self) -> f64 {
        match &self.shape {
            Shape::Linear(p) => p.total_variation(),
            Shape::Parabola { height, .. } => 2.0 * height,
        }
    }
}

/// Separable test function `phi(t, x) = psi(t) chi(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub time: PiecewiseLinear,
    pub space: PiecewiseLinear,
}

impl TestFunction {
    pub fn new(time: PiecewiseLinear, space: PiecewiseLinear) -> Self {
        Self { time, space }
    }

    pub fn zero() -> Self {
        Self { time: PiecewiseLinear::zero(), space: PiecewiseLinear::zero() }
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.time.eval(t) * self.space.eval(x)
    }

    /// Latest time at which phi can be nonzero.
    pub fn horizon(&self) -> f64 {
        self.time.support().map_or(0.0, |s| s.1)
    }

    pub fn sup_norm(&self) -> f64 {
        self.time.sup_norm() * self.space.sup_norm()
    }
}
