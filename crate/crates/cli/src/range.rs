//! Parameter lists: `v`, `a:b:n`, `a:b:log:n`, and comma-separated mixtures.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct Values(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeError(String);

impl fmt::Display for RangeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for RangeError {}

fn number(s: &str) -> Result<f64, RangeError> {
    let v: f64 = s.trim().parse().map_err(|_| RangeError(format!("not a number: '{s}'")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(RangeError(format!("not a finite number: '{s}'")))
    }
}

fn count(s: &str) -> Result<usize, RangeError> {
    match s.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(RangeError(format!("count must be a positive integer, got '{s}'"))),
    }
}

fn linear(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { b } else { a + step * i as f64 }).collect()
}

fn logarithmic(a: f64, b: f64, n: usize) -> Result<Vec<f64>, RangeError> {
    if a <= 0.0 || b <= 0.0 {
        return Err(RangeError(format!("log range needs positive endpoints, got {a}:{b}")));
    }
    let (la, lb) = (a.ln(), b.ln());
    Ok(linear(la, lb, n)
        .into_iter()
        .enumerate()
        .map(|(i, l)| if i == 0 { a } else if i == n - 1 { b } else { l.exp() })
        .collect())
}

fn item(s: &str) -> Result<Vec<f64>, RangeError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![number(v)?]),
        [a, b, n] => Ok(linear(number(a)?, number(b)?, count(n)?)),
        [a, b, kind, n] if kind.trim() == "log" => logarithmic(number(a)?, number(b)?, count(n)?),
        _ => Err(RangeError(format!(
            "expected 'v', 'start:end:count' or 'start:end:log:count', got '{s}'"
        ))),
    }
}

impl FromStr for Values {
    type Err = RangeError;

    fn from_str(s: &str) -> Result<Self, RangeError> {
        let mut out = Vec::new();
        for part in s.split(',') {
            if part.trim().is_empty() {
                return Err(RangeError(format!("empty entry in '{s}'")));
            }
            out.extend(item(part)?);
        }
        Ok(Self(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Vec<f64> {
        s.parse::<Values>().unwrap().0
    }

    #[test]
    fn scalars_and_lists() {
        assert_eq!(parse("5"), vec![5.0]);
        assert_eq!(parse("0.1,0.5, 1.0"), vec![0.1, 0.5, 1.0]);
    }

    #[test]
    fn linear_ranges_hit_both_ends() {
        let v = parse("0.01:1:100");
        assert_eq!(v.len(), 100);
        assert_eq!(v[0], 0.01);
        assert_eq!(v[99], 1.0);
        assert!((v[1] - 0.02).abs() < 1e-15);
        assert_eq!(parse("2:3:1"), vec![2.0]);
    }

    #[test]
    fn log_ranges() {
        let v = parse("1:3000:log:500");
        assert_eq!(v.len(), 500);
        assert_eq!((v[0], v[499]), (1.0, 3000.0));
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        let ratio = v[1] / v[0];
        assert!((v[250] / v[249] - ratio).abs() < 1e-12);
    }

    #[test]
    fn mixtures() {
        assert_eq!(parse("1,2:4:3"), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "a", "1:2", "1:2:0", "1:2:x:3", "0:1:log:3", "1,,2", "inf", "1:2:3:4:5"] {
            assert!(bad.parse::<Values>().is_err(), "{bad}");
        }
    }
}
