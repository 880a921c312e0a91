//! Fixed-width number formatting for reports and CSV output.

use num_complex::Complex64;

/// 17 significant digits in scientific notation, enough to round-trip any
/// `f64`.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn complex17(z: Complex64) -> String {
    format!("{} {} i", sig17(z.re), if z.im.is_sign_negative() { format!("- {}", sig17(-z.im)) } else { format!("+ {}", sig17(z.im)) })
}
