//! Fixed float formatting for reproducible reports.

/// 17 significant digits in scientific notation; `NaN`, `inf`, `-inf` otherwise.
pub fn sig17(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}
