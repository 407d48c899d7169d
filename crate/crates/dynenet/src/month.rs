//! Calendar months as a flat integer index.
//!
//! Internally a month is the number of months elapsed since 1990-01, which
//! makes lead/lag arithmetic trivial. Externally months are always the ISO
//! "YYYY-MM" form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Base year of the internal index (index 0 == 1990-01).
const BASE_YEAR: i32 = 1990;

/// A calendar month, stored as months since 1990-01.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Month(pub i32);

impl Month {
    /// Builds a month from a calendar year and 1-based month number.
    pub fn new(year: i32, month: u32) -> Result<Self, Error> {
        if !(1..=12).contains(&month) {
            return Err(Error::Argument(format!(
                "month number {month} out of range 1..=12"
            )));
        }
        Ok(Month((year - BASE_YEAR) * 12 + month as i32 - 1))
    }

    pub fn year(self) -> i32 {
        BASE_YEAR + self.0.div_euclid(12)
    }

    /// 1-based month-of-year.
    pub fn month(self) -> u32 {
        (self.0.rem_euclid(12) + 1) as u32
    }

    pub fn index(self) -> i32 {
        self.0
    }

    /// Number of months from `earlier` to `self`.
    pub fn since(self, earlier: Month) -> i32 {
        self.0 - earlier.0
    }
}

impl std::ops::Add<i32> for Month {
    type Output = Month;
    fn add(self, rhs: i32) -> Month {
        Month(self.0 + rhs)
    }
}

impl std::ops::Sub<i32> for Month {
    type Output = Month;
    fn sub(self, rhs: i32) -> Month {
        Month(self.0 - rhs)
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year(), self.month())
    }
}

impl FromStr for Month {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let err = || Error::Parse {
            line: 0,
            message: format!("invalid month '{s}', expected YYYY-MM"),
        };
        let (y, m) = s.split_once('-').ok_or_else(err)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(err());
        }
        let year: i32 = y.parse().map_err(|_| err())?;
        let month: u32 = m.parse().map_err(|_| err())?;
        Month::new(year, month).map_err(|_| err())
    }
}

impl TryFrom<String> for Month {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<Month> for String {
    fn from(m: Month) -> String {
        m.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1990-01", "2015-03", "2020-12", "1989-11"] {
            let m: Month = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
    }

    #[test]
    fn index_arithmetic() {
        let jan90: Month = "1990-01".parse().unwrap();
        assert_eq!(jan90.index(), 0);
        let mar15: Month = "2015-03".parse().unwrap();
        assert_eq!(mar15.index(), 25 * 12 + 2);
        assert_eq!((mar15 + 10).to_string(), "2016-01");
        assert_eq!(mar15.since(jan90), 302);
    }

    #[test]
    fn rejects_malformed() {
        assert!("2015-13".parse::<Month>().is_err());
        assert!("2015".parse::<Month>().is_err());
        assert!("2015-3".parse::<Month>().is_err());
        assert!("abcd-ef".parse::<Month>().is_err());
    }
}
