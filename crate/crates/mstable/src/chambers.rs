//! The chamber decomposition of the slope line: which birational model the
//! divisor `D(s) = s lambda + psi - delta` selects for each rational `s`.
//!
//! `D(s)` is big exactly for `s > 12 - n`. On that ray the models are
//!
//! ```text
//! (11, oo)        the stable space
//! (10, 11]        the 1-stable space
//! (11-m, 12-m)    the normalized m-stable model, 2 <= m <= n-2
//! (12-n, 13-n]    the normalized (n-1)-stable model
//! ```
//!
//! with the integer slopes `s = 10, 9, ..., 14-n` left over as zero-width
//! transitional chambers (the small contractions sitting between
//! consecutive models). Endpoints also carry the log-canonical coordinate
//! `alpha = (s-1)/12`.

use std::fmt;

use serde::Serialize;

use crate::contraction::alpha_of_s;
use crate::error::Error;
use crate::rational::{rat, Rat};

/// The birational model attached to a chamber.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Model {
    /// The space of stable pointed genus-one curves.
    MBar,
    /// The 1-stable space (smooth, so no normalization is needed).
    MStable { m: u32 },
    /// The normalization of the m-stable coarse space.
    MStableNormalized { m: u32 },
    /// Zero-width transitional value: the small contraction between the
    /// neighbouring models.
    SmallContraction { s: Rat },
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::MBar => write!(f, "Mbar"),
            Model::MStable { m } => write!(f, "Mbar({})", m),
            Model::MStableNormalized { m } => write!(f, "Mbar({})*", m),
            Model::SmallContraction { s } => write!(f, "small-contraction(s={})", s),
        }
    }
}

/// One `s`-interval of the decomposition. `hi = None` means unbounded
/// above; transitional chambers are single points (`lo = hi`, both closed).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Chamber {
    pub lo: Rat,
    pub hi: Option<Rat>,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub model: Model,
}

impl Chamber {
    fn open_upper(lo: Rat, hi: Rat, model: Model) -> Self {
        Chamber {
            lo,
            hi: Some(hi),
            lo_closed: false,
            hi_closed: false,
            model,
        }
    }

    fn half_open(lo: Rat, hi: Rat, model: Model) -> Self {
        Chamber {
            lo,
            hi: Some(hi),
            lo_closed: false,
            hi_closed: true,
            model,
        }
    }

    fn point(s: Rat) -> Self {
        Chamber {
            lo: s.clone(),
            hi: Some(s.clone()),
            lo_closed: true,
            hi_closed: true,
            model: Model::SmallContraction { s },
        }
    }

    pub fn contains(&self, s: &Rat) -> bool {
        let above = if self.lo_closed {
            s >= &self.lo
        } else {
            s > &self.lo
        };
        let below = match &self.hi {
            None => true,
            Some(hi) => {
                if self.hi_closed {
                    s <= hi
                } else {
                    s < hi
                }
            }
        };
        above && below
    }

    /// Bracket form of the `s`-interval, e.g. `(10,11]`.
    pub fn interval(&self) -> String {
        self.bracketed(&self.lo, self.hi.as_ref())
    }

    /// Bracket form of the `alpha = (s-1)/12` interval.
    pub fn alpha_interval(&self) -> String {
        let alo = alpha_of_s(&self.lo);
        let ahi = self.hi.as_ref().map(alpha_of_s);
        self.bracketed(&alo, ahi.as_ref())
    }

    pub fn alpha_lo(&self) -> Rat {
        alpha_of_s(&self.lo)
    }

    pub fn alpha_hi(&self) -> Option<Rat> {
        self.hi.as_ref().map(alpha_of_s)
    }

    fn bracketed(&self, lo: &Rat, hi: Option<&Rat>) -> String {
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        match hi {
            None => format!("{}{},inf)", open, lo),
            Some(hi) => format!("{}{},{}{}", open, lo, hi, close),
        }
    }
}

impl fmt::Display for Chamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.interval(), self.model)
    }
}

/// `D(s)` is big exactly when `s > 12 - n`, strictly.
pub fn is_big(n: u32, s: &Rat) -> Result<bool, Error> {
    if n < 2 {
        return Err(Error::BadSpace { n, m: 0 });
    }
    Ok(*s > rat(12 - n as i64))
}

/// The full decomposition of `(12-n, oo)` in descending `s` order,
/// transitional points included.
pub fn chamber_table(n: u32) -> Result<Vec<Chamber>, Error> {
    if n < 3 {
        return Err(Error::PreconditionViolated(format!(
            "chamber table needs n >= 3, got {}",
            n
        )));
    }
    let mut chambers = Vec::new();
    chambers.push(Chamber {
        lo: rat(11),
        hi: None,
        lo_closed: false,
        hi_closed: false,
        model: Model::MBar,
    });
    chambers.push(Chamber::half_open(rat(10), rat(11), Model::MStable { m: 1 }));
    for m in 2..=(n as i64 - 2) {
        chambers.push(Chamber::point(rat(12 - m)));
        chambers.push(Chamber::open_upper(
            rat(11 - m),
            rat(12 - m),
            Model::MStableNormalized { m: m as u32 },
        ));
    }
    chambers.push(Chamber::half_open(
        rat(12 - n as i64),
        rat(13 - n as i64),
        Model::MStableNormalized { m: n - 1 },
    ));
    Ok(chambers)
}

/// The chamber containing a single big slope `s`.
pub fn model_at(n: u32, s: &Rat) -> Result<Chamber, Error> {
    if n < 2 {
        return Err(Error::BadSpace { n, m: 0 });
    }
    if !is_big(n, s)? {
        return Err(Error::NotBig {
            s: s.to_string(),
            threshold: rat(12 - n as i64).to_string(),
        });
    }
    if *s > rat(11) {
        return Ok(Chamber {
            lo: rat(11),
            hi: None,
            lo_closed: false,
            hi_closed: false,
            model: Model::MBar,
        });
    }
    if *s > rat(10) {
        return Ok(Chamber::half_open(rat(10), rat(11), Model::MStable { m: 1 }));
    }
    if *s <= rat(13 - n as i64) {
        return Ok(Chamber::half_open(
            rat(12 - n as i64),
            rat(13 - n as i64),
            Model::MStableNormalized { m: n - 1 },
        ));
    }
    if s.is_integer() {
        // Integer slope strictly between 13-n and 11: a transitional value.
        return Ok(Chamber::point(s.clone()));
    }
    // s in (11-m, 12-m) for the unique m = 11 - floor(s), 2 <= m <= n-2.
    let floor: i64 = i64::try_from(s.floor()).map_err(|_| {
        Error::Internal(format!("slope {} out of integer range", s))
    })?;
    let m = 11 - floor;
    debug_assert!(m >= 2 && m <= n as i64 - 2);
    Ok(Chamber::open_upper(
        rat(11 - m),
        rat(12 - m),
        Model::MStableNormalized { m: m as u32 },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratq;

    #[test]
    fn bigness_threshold() {
        assert!(is_big(12, &ratq(1, 2)).unwrap());
        assert!(!is_big(12, &Rat::zero()).unwrap());
        assert!(is_big(5, &rat(8)).unwrap());
        assert!(!is_big(5, &rat(7)).unwrap());
    }

    #[test]
    fn table_for_n7() {
        let table = chamber_table(7).unwrap();
        let intervals: Vec<String> = table.iter().map(|c| c.interval()).collect();
        assert_eq!(
            intervals,
            vec![
                "(11,inf)", "(10,11]", "[10,10]", "(9,10)", "[9,9]", "(8,9)", "[8,8]", "(7,8)",
                "[7,7]", "(6,7)", "(5,6]"
            ]
        );
        let models: Vec<String> = table.iter().map(|c| c.model.to_string()).collect();
        assert_eq!(
            models,
            vec![
                "Mbar",
                "Mbar(1)",
                "small-contraction(s=10)",
                "Mbar(2)*",
                "small-contraction(s=9)",
                "Mbar(3)*",
                "small-contraction(s=8)",
                "Mbar(4)*",
                "small-contraction(s=7)",
                "Mbar(5)*",
                "Mbar(6)*"
            ]
        );
    }

    #[test]
    fn table_for_n3_collapses_middle() {
        let table = chamber_table(3).unwrap();
        let rows: Vec<String> = table.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            rows,
            vec![
                "(11,inf) -> Mbar",
                "(10,11] -> Mbar(1)",
                "(9,10] -> Mbar(2)*"
            ]
        );
    }

    #[test]
    fn alpha_endpoints() {
        let table = chamber_table(7).unwrap();
        assert_eq!(table[0].alpha_interval(), "(5/6,inf)");
        assert_eq!(table[1].alpha_interval(), "(3/4,5/6]");
        // m = 2 chamber (9,10): alpha in ((10-m)/12, (11-m)/12) = (2/3, 3/4).
        assert_eq!(table[3].alpha_interval(), "(2/3,3/4)");
        // last chamber (5,6]: alpha in ((11-n)/12, (12-n)/12] = (1/3, 5/12].
        assert_eq!(table.last().unwrap().alpha_interval(), "(1/3,5/12]");
    }

    #[test]
    fn model_at_examples() {
        let c = model_at(7, &ratq(19, 2)).unwrap();
        assert_eq!(c.model, Model::MStableNormalized { m: 2 });
        let c = model_at(7, &rat(11)).unwrap();
        assert_eq!(c.model, Model::MStable { m: 1 });
        let c = model_at(7, &rat(6)).unwrap();
        assert_eq!(c.model, Model::MStableNormalized { m: 6 });
        assert_eq!(c.interval(), "(5,6]");
        let c = model_at(7, &rat(9)).unwrap();
        assert!(matches!(c.model, Model::SmallContraction { .. }));
        assert!(matches!(
            model_at(7, &rat(5)),
            Err(Error::NotBig { .. })
        ));
    }

    #[test]
    fn chambers_partition_the_big_ray() {
        // Pairwise disjoint, union = (12-n, oo): checked on a fine rational
        // grid spanning the ray plus every endpoint.
        for n in 3..=9u32 {
            let table = chamber_table(n).unwrap();
            let mut probes: Vec<Rat> = Vec::new();
            for num in (24 * (12 - n as i64 - 1))..=(24 * 13) {
                probes.push(ratq(num, 24));
            }
            for s in probes {
                let inside: Vec<&Chamber> =
                    table.iter().filter(|c| c.contains(&s)).collect();
                if s > rat(12 - n as i64) {
                    assert_eq!(inside.len(), 1, "n={}, s={}", n, s);
                    // model_at agrees with table membership.
                    let c = model_at(n, &s).unwrap();
                    assert_eq!(&c, inside[0], "n={}, s={}", n, s);
                } else {
                    assert!(inside.is_empty(), "n={}, s={}", n, s);
                    assert!(model_at(n, &s).is_err());
                }
            }
        }
    }
}
