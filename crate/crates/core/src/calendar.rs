//! Year-month calendar arithmetic for monthly series.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserialize, Deserializer};
use serde::ser::{Serialize, Serializer};
use thiserror::Error;

/// A calendar month, e.g. `2015-03`. Ordered chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CalendarMonth {
    year: i32,
    month: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid calendar month {input:?}: expected YYYY-MM with month 01..12")]
pub struct CalendarMonthError {
    pub input: String,
}

impl CalendarMonth {
    /// Builds a month; `month` is 1-based (1 = January).
    pub fn new(year: i32, month: u8) -> Result<Self, CalendarMonthError> {
        if (1..=12).contains(&month) {
            Ok(Self { year, month })
        } else {
            Err(CalendarMonthError {
                input: format!("{year:04}-{month:02}"),
            })
        }
    }

    pub fn year(self) -> i32 {
        self.year
    }

    /// 1-based month number (1 = January).
    pub fn month(self) -> u8 {
        self.month
    }

    /// 0-based month number (0 = January).
    pub fn month_index(self) -> usize {
        usize::from(self.month - 1)
    }

    /// The month `n` steps later (earlier for negative `n`).
    pub fn plus_months(self, n: i64) -> Self {
        let idx = i64::from(self.year) * 12 + i64::from(self.month) - 1 + n;
        Self {
            year: idx.div_euclid(12) as i32,
            month: (idx.rem_euclid(12) + 1) as u8,
        }
    }

    /// Signed number of months from `earlier` to `self`.
    pub fn months_since(self, earlier: CalendarMonth) -> i64 {
        (i64::from(self.year) - i64::from(earlier.year)) * 12
            + (i64::from(self.month) - i64::from(earlier.month))
    }
}

impl fmt::Display for CalendarMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for CalendarMonth {
    type Err = CalendarMonthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CalendarMonthError {
            input: s.to_string(),
        };
        let (y, m) = s.split_once('-').ok_or_else(err)?;
        if y.len() < 4 || m.len() != 2 {
            return Err(err());
        }
        let year: i32 = y.parse().map_err(|_| err())?;
        let month: u8 = m.parse().map_err(|_| err())?;
        Self::new(year, month).map_err(|_| err())
    }
}

impl Serialize for CalendarMonth {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CalendarMonth {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let m: CalendarMonth = "2009-01".parse().unwrap();
        assert_eq!(m.year(), 2009);
        assert_eq!(m.month(), 1);
        assert_eq!(m.to_string(), "2009-01");
    }

    #[test]
    fn plus_months_crosses_year_boundaries() {
        let m: CalendarMonth = "2017-12".parse().unwrap();
        assert_eq!(m.plus_months(1).to_string(), "2018-01");
        assert_eq!(m.plus_months(13).to_string(), "2019-01");
        assert_eq!(m.plus_months(-12).to_string(), "2016-12");
        assert_eq!(m.plus_months(-24).to_string(), "2015-12");
    }

    #[test]
    fn months_since_is_signed() {
        let a: CalendarMonth = "2009-01".parse().unwrap();
        let b: CalendarMonth = "2018-12".parse().unwrap();
        assert_eq!(b.months_since(a), 119);
        assert_eq!(a.months_since(b), -119);
        assert_eq!(a.months_since(a), 0);
    }

    #[test]
    fn rejects_out_of_range_months() {
        assert!("2009-13".parse::<CalendarMonth>().is_err());
        assert!("2009-00".parse::<CalendarMonth>().is_err());
        assert!("2009".parse::<CalendarMonth>().is_err());
        assert!("09-01".parse::<CalendarMonth>().is_err());
        assert!(CalendarMonth::new(2009, 0).is_err());
    }

    #[test]
    fn ordering_is_chronological() {
        let a: CalendarMonth = "2009-12".parse().unwrap();
        let b: CalendarMonth = "2010-01".parse().unwrap();
        assert!(a < b);
    }
}
