//! Exact scalar types for time values.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Num, Signed};

/// An exact, totally ordered number usable as a time value.
pub trait Scalar: Num + Signed + Ord + Clone + Debug + Display {
    fn from_int(v: i64) -> Self;
}

impl Scalar for i64 {
    fn from_int(v: i64) -> Self {
        v
    }
}

impl Scalar for i128 {
    fn from_int(v: i64) -> Self {
        v as i128
    }
}

impl Scalar for Ratio<i64> {
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v)
    }
}

impl Scalar for Ratio<i128> {
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
}

/// Parses a non-negative rational written as an integer, a decimal `1.25` or a
/// fraction `5/4`.
pub fn parse_rational(s: &str) -> Option<Ratio<i64>> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Ratio::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return None;
        }
        let negative = int.starts_with('-');
        let int_part: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().ok()?
        };
        let den = 10i64.checked_pow(frac.len() as u32)?;
        let frac_part: i64 = frac.parse().ok()?;
        let num = int_part.abs().checked_mul(den)?.checked_add(frac_part)?;
        let num = if negative { -num } else { num };
        return Some(Ratio::new(num, den));
    }
    s.parse::<i64>().ok().map(Ratio::from_integer)
}

/// Formats a rational as a terminating decimal when possible, otherwise as `p/q`.
pub fn format_rational(r: &Ratio<i64>) -> String {
    let mut den = *r.denom();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if r.is_integer() {
        return r.numer().to_string();
    }
    if den != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scale = 10i64.pow(digits);
    let scaled = r.numer() * (scale / r.denom());
    let sign = if scaled < 0 { "-" } else { "" };
    let abs = scaled.abs();
    format!(
        "{sign}{}.{:0width$}",
        abs / scale,
        abs % scale,
        width = digits as usize
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("0.5"), Some(Ratio::new(1, 2)));
        assert_eq!(parse_rational("3"), Some(Ratio::from_integer(3)));
        assert_eq!(parse_rational("7/3"), Some(Ratio::new(7, 3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn format_forms() {
        assert_eq!(format_rational(&Ratio::new(1, 2)), "0.5");
        assert_eq!(format_rational(&Ratio::new(7, 3)), "7/3");
        assert_eq!(format_rational(&Ratio::from_integer(4)), "4");
        assert_eq!(format_rational(&Ratio::new(1, 40)), "0.025");
    }
}
