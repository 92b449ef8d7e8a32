//! Benchmarks for torelli-core; see `benches/`.

use torelli_core::curve::{parse_curve_spec, HyperellipticCurve};

/// Curves shared by the benchmarks.
pub fn sample_curves() -> Vec<(&'static str, HyperellipticCurve)> {
    ["p=3; f=x^5+x^3+x^2-x-1", "p=7; f=x^5+3x^2+1", "p=101; f=x^5+2x+3"]
        .into_iter()
        .map(|s| (s, parse_curve_spec(s).expect("valid spec")))
        .collect()
}
