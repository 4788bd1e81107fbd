//! Fixed-precision float serialization for the on-disk JSON formats.

use serde::ser::Error as _;
use serde::Serializer;
use serde_json::value::RawValue;

/// Number of decimal places used by every float written to disk.
pub const DECIMALS: usize = 6;

/// Rounds to the on-disk precision, so in-memory values survive a write/read cycle unchanged.
pub fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    // avoid "-0.000000"
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Formats `x` with exactly six decimals.
pub fn format6(x: f64) -> String {
    format!("{:.*}", DECIMALS, round6(x))
}

/// `serialize_with` adapter that emits `x` as a JSON number with six decimals.
pub fn serialize<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return Err(S::Error::custom("non-finite float"));
    }
    let raw = RawValue::from_string(format6(*x)).map_err(S::Error::custom)?;
    serde::Serialize::serialize(&raw, serializer)
}
