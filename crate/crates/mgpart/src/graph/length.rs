use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

/// Positive edge length, optionally carrying an exact rational value.
///
/// Integers and `p/q` fractions are exact; decimals are not, even when the
/// decimal happens to be terminating.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Length {
    value: f64,
    exact: Option<Rational64>,
}

impl Length {
    pub fn exact(num: i64, den: i64) -> Self {
        let r = Rational64::new(num, den);
        Length {
            value: r.to_f64().unwrap_or(f64::NAN),
            exact: Some(r),
        }
    }

    pub fn approx(value: f64) -> Self {
        Length { value, exact: None }
    }

    pub fn from_rational(r: Rational64) -> Self {
        Length {
            value: r.to_f64().unwrap_or(f64::NAN),
            exact: Some(r),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn as_rational(&self) -> Option<Rational64> {
        self.exact
    }

    pub fn is_valid(&self) -> bool {
        self.value.is_finite() && self.value > 0.0 && self.exact.is_none_or(|r| r > Rational64::zero())
    }

    /// Divides by a positive integer, staying exact when possible.
    pub fn div_count(&self, n: i64) -> Length {
        match self.exact {
            Some(r) => Length::from_rational(r / n),
            None => Length::approx(self.value / n as f64),
        }
    }

    pub fn add(&self, other: &Length) -> Length {
        match (self.exact, other.exact) {
            (Some(a), Some(b)) => Length::from_rational(a + b),
            _ => Length::approx(self.value + other.value),
        }
    }

    pub fn scale(&self, t: f64) -> Length {
        Length::approx(self.value * t)
    }
}

impl From<f64> for Length {
    fn from(v: f64) -> Self {
        Length::approx(v)
    }
}

impl From<i64> for Length {
    fn from(v: i64) -> Self {
        Length::exact(v, 1)
    }
}

impl From<Rational64> for Length {
    fn from(r: Rational64) -> Self {
        Length::from_rational(r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse length `{0}`")]
pub struct LengthParseError(pub String);

impl FromStr for Length {
    type Err = LengthParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || LengthParseError(s.to_string());
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| err())?;
            let q: i64 = q.trim().parse().map_err(|_| err())?;
            if q == 0 {
                return Err(err());
            }
            return Ok(Length::exact(p, q));
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Length::exact(n, 1));
        }
        s.parse::<f64>().map(Length::approx).map_err(|_| err())
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => write!(f, "{:?}", self.value),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_form_decides_exactness() {
        let a: Length = "3/2".parse().unwrap();
        assert_eq!(a.as_rational(), Some(Rational64::new(3, 2)));
        assert_eq!(a.value(), 1.5);
        let b: Length = "2".parse().unwrap();
        assert!(b.as_rational().is_some());
        let c: Length = "1.5".parse().unwrap();
        assert!(c.as_rational().is_none());
        assert!("1/0".parse::<Length>().is_err());
        assert!("x".parse::<Length>().is_err());
    }

    #[test]
    fn exact_arithmetic() {
        let a = Length::exact(3, 1).div_count(3);
        assert_eq!(a.as_rational(), Some(Rational64::new(1, 1)));
        assert_eq!(a.add(&Length::exact(1, 2)).to_string(), "3/2");
        assert!(a.add(&Length::approx(0.5)).as_rational().is_none());
    }
}
