//! Exact rational coordinates.

use alloc::format;
use alloc::string::{String, ToString};
use core::str::FromStr;

use crate::error::Error;

pub type Rat = num_rational::Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// Parses `"n/d"` or an integer string.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = i64::from_str(n.trim()).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        let d = i64::from_str(d.trim()).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        if d == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Rat::new(n, d))
    } else {
        i64::from_str(t)
            .map(Rat::from_integer)
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
    }
}

/// Canonical text form: `"n"` for integers, otherwise reduced `"n/d"`.
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}
