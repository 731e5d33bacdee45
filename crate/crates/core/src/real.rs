//! Scalar abstraction: all numerical code is generic over a real type.

use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable throughout the crate: `f32` or `f64`.
///
/// Combines nalgebra's `RealField` (field operations, sqrt/exp/ln, ordering)
/// with the num-traits conversions needed to inject literal constants.
pub trait Real:
    nalgebra::RealField + FromPrimitive + ToPrimitive + Copy + std::iter::Sum
{
    /// Convert an `f64` constant into this scalar type.
    fn cast(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    /// Lossy view as `f64`, for diagnostics and reports.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Cast a usize count (cell sizes, node counts) into the scalar type.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }
}

impl<T> Real for T where
    T: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy + std::iter::Sum
{
}
