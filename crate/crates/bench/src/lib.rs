//! Shared inputs for the criterion benches.

use diophant_core::{FuncExpr, Real};

/// `(√2 - 1, √3 - 1)`, a badly approximable pair.
pub fn surd_pair() -> Vec<Real> {
    ["sqrt2-1", "sqrt3-1"].iter().map(|s| Real::parse(s).expect("surd parses")).collect()
}

/// Functions on both sides of the critical `1/(4x²)`, with their labels.
pub fn recint_inputs() -> Vec<(&'static str, FuncExpr)> {
    ["0.2/x^2", "0.3/x^2", "fNC(1,0.2)", "fNC(1,0.3)"]
        .into_iter()
        .map(|s| (s, diophant_core::funexpr::parse_expr(s).expect("expression parses")))
        .collect()
}
