//! Scalar abstraction.
//!
//! Every kernel in this crate is generic over [`Real`], a floating-point
//! scalar with the usual elementary functions.  `f32` and `f64` implement it
//! out of the box; the crate root exports `f64` aliases for the common types.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar used throughout the crate.
///
/// The trait is a convenience bundle: anything that is a [`Float`] with the
/// standard constants and conversions qualifies via the blanket impl.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into `Self`.
    ///
    /// Panics if the conversion is not representable, which cannot happen for
    /// the finite literals this crate feeds it.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("representable f64 constant")
    }

    /// Lossy conversion to `f64`, used for diagnostics and error payloads.
    fn approx_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `self` clamped into `[lo, hi]`.
    fn clamp_to(self, lo: Self, hi: Self) -> Self {
        if self < lo {
            lo
        } else if self > hi {
            hi
        } else {
            self
        }
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}
