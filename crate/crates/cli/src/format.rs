//! Text output formats.

use std::fmt::Write;

use qws_core::WignerTable;

/// Values this close to zero are written as `0`.
const ZERO_SNAP: f64 = 1e-12;

/// C-style `%.12g`: 12 significant digits, trailing zeros dropped,
/// exponent form below `1e-4` or from `1e12` up.
pub fn format_g12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    trim_fraction(&format!("{v:.*}", (11 - exp) as usize)).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// First line `d,n`; then one row `x_p...,x_q...,value` per phase-space
/// point, `x_p` of qudit 0 varying slowest.
pub fn wigner_csv(table: &WignerTable) -> String {
    let dim = table.dim();
    let mut out = String::with_capacity(table.len() * (4 * dim.n() + 16));
    writeln!(out, "{},{}", dim.d(), dim.n()).unwrap();
    for (idx, &v) in table.values().iter().enumerate() {
        for coord in table.point(idx) {
            write!(out, "{coord},").unwrap();
        }
        let v = if v.abs() < ZERO_SNAP { 0.0 } else { v };
        writeln!(out, "{}", format_g12(v)).unwrap();
    }
    out
}
