use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating scalar for the analytic side of the crate: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; exact for `f64` itself.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to every Real")
    }

    fn of_u64(x: u64) -> Self {
        Self::from_u64(x).expect("u64 converts to every Real")
    }

    /// Rounds `self` outward by one relative ulp plus the smallest normal,
    /// toward `+inf`.
    fn widen_up(self) -> Self {
        self + self.abs() * Self::epsilon() + Self::min_positive_value()
    }

    /// Rounds `self` outward toward `-inf`.
    fn widen_down(self) -> Self {
        self - self.abs() * Self::epsilon() - Self::min_positive_value()
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widening_brackets_value() {
        for x in [0.0f64, 1.0, -1.0, 1e-300, 3.5e10, -0.125] {
            assert!(x.widen_down() < x && x < x.widen_up());
        }
        let y = 0.1f32;
        assert!(y.widen_down() < y && y < y.widen_up());
    }
}
