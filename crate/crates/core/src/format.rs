//! Fixed-precision float formatting for machine-readable output.

/// 17 significant digits, round-trip safe. Valid as a JSON number.
pub fn sig17(x: f64) -> String {
    sig(x, 17)
}

/// 12 significant digits for human-readable tables.
pub fn sig12(x: f64) -> String {
    sig(x, 12)
}

fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        // normalise -0.0
        return format!("{:.*e}", digits - 1, 0.0);
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{:.*e}", digits - 1, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, std::f64::consts::PI] {
            assert_eq!(sig17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(sig17(-0.0), sig17(0.0));
        assert_eq!(sig12(1.0), "1.00000000000e0");
    }
}
