use serde::{Deserialize, Serialize};

use crate::error::{QrfError, Result};

/// Half-integer angular momentum stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Spin(pub u32);

impl Spin {
    pub const HALF: Spin = Spin(1);

    pub fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    pub fn new(j: f64) -> Result<Self> {
        let t = 2.0 * j;
        if t.is_nan() || t < 0.0 || (t - t.round()).abs() > 1e-9 {
            return Err(QrfError::InvalidArgument(format!("{j} is not a non-negative half-integer")));
        }
        Ok(Spin(t.round() as u32))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `2m` values from `2j` down to `-2j`.
    pub fn twice_ms(self) -> impl Iterator<Item = i32> {
        let t = self.0 as i32;
        (0..=self.0 as i32).map(move |k| t - 2 * k)
    }

    /// Row index of `m` in the descending-`m` ordering.
    pub fn index_of(self, twice_m: i32) -> usize {
        ((self.0 as i32 - twice_m) / 2) as usize
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Parse `2m` from a float, rejecting non-half-integers.
pub fn twice_of(x: f64) -> Result<i32> {
    let t = 2.0 * x;
    if (t - t.round()).abs() > 1e-9 {
        return Err(QrfError::InvalidArgument(format!("{x} is not a half-integer")));
    }
    Ok(t.round() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing_and_labels() {
        assert_eq!(Spin::new(1.5).unwrap(), Spin(3));
        assert!(Spin::new(0.3).is_err());
        assert!(Spin::new(-1.0).is_err());
        assert_eq!(Spin(3).to_string(), "3/2");
        assert_eq!(Spin(4).to_string(), "2");
        assert_eq!(Spin(3).twice_ms().collect::<Vec<_>>(), vec![3, 1, -1, -3]);
        assert_eq!(Spin(3).index_of(-1), 2);
    }
}
