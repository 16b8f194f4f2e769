//! Numeric scalar used by the statistics and geodesy code.
//!
//! Timestamps and durations are whole minutes (`i64`) everywhere; the only
//! real-valued quantities are corpus percentages/averages and great-circle
//! distances. Those are generic over [`Scalar`] so a caller can pick `f64`,
//! `f32`, or the exact [`Exact`] rational.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Exact rational scalar.
pub type Exact = Ratio<i64>;

pub trait Scalar: Num + FromPrimitive + ToPrimitive + Copy + PartialOrd + Debug + Send + Sync {
    /// `numer / denom`, or zero when `denom == 0`.
    fn ratio(numer: u64, denom: u64) -> Self {
        if denom == 0 {
            return Self::zero();
        }
        Self::from_u64(numer).expect("count fits") / Self::from_u64(denom).expect("count fits")
    }

    /// Decimal rendering rounded half away from zero.
    fn to_fixed(self, decimals: usize) -> String {
        format!("{:.*}", decimals, self.to_f64().unwrap_or(f64::NAN))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

impl Scalar for Exact {
    fn to_fixed(self, decimals: usize) -> String {
        let scale = 10i128.pow(decimals as u32);
        let numer = i128::from(*self.numer()) * scale;
        let denom = i128::from(*self.denom());
        // half away from zero
        let mut q = (numer.abs() * 2 + denom) / (denom * 2);
        if numer.is_negative() {
            q = -q;
        }
        let sign = if q < 0 { "-" } else { "" };
        let q = q.abs();
        if decimals == 0 {
            format!("{sign}{q}")
        } else {
            format!("{sign}{}.{:0width$}", q / scale, q % scale, width = decimals)
        }
    }
}

/// Exact scalar from a float that is a short decimal, e.g. a multiplier
/// given on the command line.
pub fn exact_from_f64(value: f64) -> Option<Exact> {
    let scaled = (value * 1_000_000.0).round();
    if !scaled.is_finite() || scaled.abs() > 9.0e15 {
        return None;
    }
    Some(Ratio::new(scaled as i64, 1_000_000))
}
