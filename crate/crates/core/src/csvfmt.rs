//! Minimal CSV writing. Values are quoted only when they contain a comma,
//! quote, or newline; floats are printed with a fixed number of significant
//! digits so output is byte-stable across runs.

use std::fmt::Write as _;

pub fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn row(fields: &[String]) -> String {
    fields.iter().map(|f| escape(f)).collect::<Vec<_>>().join(",")
}

/// Deterministic float formatting: up to 9 significant digits, no trailing
/// zeros, `0` for exact zero.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let mut s = String::new();
    write!(s, "{:.9e}", x).unwrap();
    // Normalize "1.250000000e-2" to "0.0125"-style plain notation when short,
    // otherwise keep scientific. Plain formatting below 1e-4 gets unwieldy.
    if x.abs() >= 1e-4 && x.abs() < 1e9 {
        let mut plain = format!("{:.9}", x);
        while plain.ends_with('0') {
            plain.pop();
        }
        if plain.ends_with('.') {
            plain.pop();
        }
        plain
    } else {
        s
    }
}

pub fn fmt_bool(pass: bool) -> String {
    if pass { "pass" } else { "FAIL" }.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escaping() {
        assert_eq!(escape("plain"), "plain");
        assert_eq!(escape("a,b"), "\"a,b\"");
        assert_eq!(escape("q\"q"), "\"q\"\"q\"");
    }

    #[test]
    fn float_format_is_stable() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(0.0125), "0.0125");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(0.25), "0.25");
        assert!(fmt_f64(3.2e-7).contains('e'));
    }
}
