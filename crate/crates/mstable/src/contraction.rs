//! The birational contraction between models at the level of divisor
//! classes: pushforward, pullback, discrepancy divisors, section-ring
//! equality, and the slope/log-canonical-coefficient dictionary.
//!
//! For the map from `(n, 0)` to `(n, m)` the exceptional divisors are the
//! `delta_{0,S}` with `n-m+1 <= |S| <= n`. Pushforward truncates to the
//! target basis; pullback sends `lambda` to
//! `lambda + sum_{exceptional S} delta_{0,S}` and fixes every boundary
//! generator. A map between two intermediate models `(n, m1) -> (n, m2)` is
//! defined by factoring through `(n, 0)` on the basis, which amounts to the
//! same formulas with the exceptional band `n-m2+1 <= |S| <= n-m1`.

use serde::Serialize;

use crate::error::Error;
use crate::picard::{expand, DivisorClass, MarkSet, Space, TautClass};
use crate::rational::{rat, ratq, Rat};

/// A divisor-level contraction `(n, m_from) -> (n, m_to)` with
/// `m_from <= m_to` (equality gives the identity map).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContractionMap {
    source: Space,
    target: Space,
}

impl ContractionMap {
    pub fn new(n: u32, m_from: u32, m_to: u32) -> Result<Self, Error> {
        let source = Space::new(n, m_from)?;
        let target = Space::new(n, m_to)?;
        if m_from > m_to {
            return Err(Error::PreconditionViolated(format!(
                "contraction needs m_from <= m_to, got {} > {}",
                m_from, m_to
            )));
        }
        Ok(ContractionMap { source, target })
    }

    pub fn source(&self) -> Space {
        self.source
    }

    pub fn target(&self) -> Space {
        self.target
    }

    /// Is `S` exceptional for this map: a basis set of the source that dies
    /// on the target, i.e. `n - m_to + 1 <= |S| <= n - m_from`?
    pub fn is_exceptional(&self, s: &MarkSet) -> bool {
        self.source.admits_boundary(s) && !self.target.admits_boundary(s)
    }

    /// Exceptional index sets, ordered by (cardinality, bitmask).
    pub fn exceptional_sets(&self) -> Result<Vec<MarkSet>, Error> {
        Ok(self
            .source
            .boundary_sets()?
            .into_iter()
            .filter(|s| self.is_exceptional(s))
            .collect())
    }

    /// `lambda -> lambda`, `delta_{0,S} -> delta_{0,S}` when `S` survives,
    /// deleted otherwise.
    pub fn pushforward(&self, d: &DivisorClass) -> Result<DivisorClass, Error> {
        if d.space() != self.source {
            return Err(Error::SpaceMismatch {
                left_n: d.space().n,
                left_m: d.space().m,
                right_n: self.source.n,
                right_m: self.source.m,
            });
        }
        let mut out = DivisorClass::zero(self.target);
        out.set_lambda(d.lambda_coeff().clone());
        for (s, c) in d.boundary_iter() {
            if self.target.admits_boundary(s) {
                out.set_boundary(*s, c.clone())?;
            }
        }
        Ok(out)
    }

    /// `lambda -> lambda + sum_{exceptional S} delta_{0,S}` (the
    /// `delta_irr` rule divided by 12), `delta_{0,S} -> delta_{0,S}`.
    pub fn pullback(&self, d: &DivisorClass) -> Result<DivisorClass, Error> {
        if d.space() != self.target {
            return Err(Error::SpaceMismatch {
                left_n: d.space().n,
                left_m: d.space().m,
                right_n: self.target.n,
                right_m: self.target.m,
            });
        }
        let mut out = DivisorClass::zero(self.source);
        out.set_lambda(d.lambda_coeff().clone());
        for (s, c) in d.boundary_iter() {
            out.set_boundary(*s, c.clone())?;
        }
        if !d.lambda_coeff().is_zero() {
            for s in self.exceptional_sets()? {
                let c = out.boundary_coeff(&s) + d.lambda_coeff().clone();
                out.set_boundary(s, c)?;
            }
        }
        Ok(out)
    }
}

/// Discrepancy data for `D(s)` under the contraction `(n, 0) -> (n, m)`.
#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub n: u32,
    pub m: u32,
    pub s: Rat,
    /// Coefficient of `D(s) - pullback(pushforward(D(s)))` on each
    /// exceptional `delta_{0,S}`, keyed by `|S|`; the value is
    /// `|S| + 11 - n - s` and depends only on the cardinality.
    pub coefficients: Vec<(u32, Rat)>,
    pub min_coefficient: Rat,
    /// Section rings of `D(s)` agree upstairs and downstairs exactly when
    /// every exceptional coefficient is nonnegative, i.e. `s <= 12 - m`.
    pub section_rings_equal: bool,
}

impl DiscrepancyReport {
    /// Coefficient on `delta_{0,S}` for an exceptional `S`.
    pub fn coefficient_for(&self, s: &MarkSet) -> Option<&Rat> {
        self.coefficients
            .iter()
            .find(|(size, _)| *size == s.len())
            .map(|(_, c)| c)
    }
}

/// Per-cardinality exceptional coefficients `|S| + 11 - n - s` of
/// `D(s) - pullback(pushforward(D(s)))` for the map `(n, 0) -> (n, m)`.
pub fn discrepancy_of_ds(n: u32, m: u32, s: &Rat) -> Result<DiscrepancyReport, Error> {
    if m < 1 {
        return Err(Error::PreconditionViolated(
            "discrepancy needs 1 <= m <= n-1".into(),
        ));
    }
    Space::new(n, m)?;
    let mut coefficients = Vec::new();
    for size in (n - m + 1).max(2)..=n {
        let c = rat(size as i64 + 11 - n as i64) - s.clone();
        coefficients.push((size, c));
    }
    let min_coefficient = coefficients
        .iter()
        .map(|(_, c)| c.clone())
        .min()
        .unwrap_or_else(Rat::zero);
    let section_rings_equal = !min_coefficient.is_negative();
    Ok(DiscrepancyReport {
        n,
        m,
        s: s.clone(),
        coefficients,
        min_coefficient,
        section_rings_equal,
    })
}

/// Verdict of the discrepancy-based singularity test. The underlying bound
/// is one-sided: a small discrepancy certifies a singular target, a large
/// one certifies nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SmoothnessVerdict {
    Singular,
    Inconclusive,
    NotApplicable,
}

impl std::fmt::Display for SmoothnessVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SmoothnessVerdict::Singular => write!(f, "SINGULAR"),
            SmoothnessVerdict::Inconclusive => write!(f, "INCONCLUSIVE"),
            SmoothnessVerdict::NotApplicable => write!(f, "NOT_APPLICABLE"),
        }
    }
}

/// Output of [`canonical_discrepancy`].
#[derive(Clone, Debug)]
pub struct CanonicalDiscrepancy {
    /// `K_source - pullback(K_target)` in the source basis.
    pub class: DivisorClass,
    /// Discrepancy of each exceptional divisor, keyed by `|S|`.
    pub discrepancies: Vec<(u32, Rat)>,
    /// Dimension of the target moduli space (= n).
    pub dim: u32,
    /// `SINGULAR` when some discrepancy drops below `dim - 1` under the
    /// hypotheses of the bound (regular map, point-image exceptional locus).
    pub verdict: SmoothnessVerdict,
}

/// `K_source - pullback(K_target)` for `(n, m_from) -> (n, m_to)`, with the
/// per-divisor discrepancies and the singularity verdict.
///
/// The exceptional-image hypotheses only hold for the step
/// `(n, n-2) -> (n, n-1)`, where the map is regular and each exceptional
/// divisor contracts to a point; any other pair is computed formally and
/// reported `NOT_APPLICABLE`.
pub fn canonical_discrepancy(
    n: u32,
    m_from: u32,
    m_to: u32,
) -> Result<CanonicalDiscrepancy, Error> {
    let map = ContractionMap::new(n, m_from, m_to)?;
    let k_source = expand(map.source(), &TautClass::K)?;
    let k_target = expand(map.target(), &TautClass::K)?;
    let class = k_source.sub(&map.pullback(&k_target)?)?;

    let mut discrepancies = Vec::new();
    for s in map.exceptional_sets()? {
        let c = class.boundary_coeff(&s);
        if !discrepancies.iter().any(|(size, _)| *size == s.len()) {
            discrepancies.push((s.len(), c));
        }
    }

    let dim = n;
    let applicable = n >= 3 && m_to == n - 1 && m_from + 1 == m_to;
    let verdict = if !applicable {
        SmoothnessVerdict::NotApplicable
    } else if discrepancies
        .iter()
        .any(|(_, c)| c < &rat(dim as i64 - 1))
    {
        SmoothnessVerdict::Singular
    } else {
        SmoothnessVerdict::Inconclusive
    };

    Ok(CanonicalDiscrepancy {
        class,
        discrepancies,
        dim,
        verdict,
    })
}

/// Convenience wrapper returning only the verdict.
pub fn smoothness_consistency(n: u32, m_from: u32, m_to: u32) -> Result<SmoothnessVerdict, Error> {
    Ok(canonical_discrepancy(n, m_from, m_to)?.verdict)
}

/// Log-canonical coefficient `alpha = (s - 1)/12` matching the slope `s`.
pub fn alpha_of_s(s: &Rat) -> Rat {
    (s - &Rat::one()) * ratq(1, 12)
}

/// Inverse dictionary, `s = 12 alpha + 1`.
pub fn s_of_alpha(alpha: &Rat) -> Rat {
    alpha * &rat(12) + Rat::one()
}

/// The models indexed by `m` are log canonical exactly for `m <= 10`.
pub fn log_canonical(m: u32) -> bool {
    m <= 10
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(marks: &[u32], n: u32) -> MarkSet {
        MarkSet::from_marks(marks.iter().copied(), n).unwrap()
    }

    #[test]
    fn pushforward_of_canonical_class() {
        // K on (7,0) pushes to -4 lambda on (7,5).
        let map = ContractionMap::new(7, 0, 5).unwrap();
        let k = expand(map.source(), &TautClass::K).unwrap();
        let pushed = map.pushforward(&k).unwrap();
        assert_eq!(*pushed.lambda_coeff(), rat(-4));
        assert!(pushed.boundary_iter().next().is_none());
        // lambda -> lambda.
        let lam = DivisorClass::lambda_class(map.source());
        assert_eq!(
            map.pushforward(&lam).unwrap(),
            DivisorClass::lambda_class(map.target())
        );
    }

    #[test]
    fn pushforward_of_ds_truncates() {
        // D(13/2) on (7,0) pushes to (3/2) lambda + sum_{|S|=2} d_S on (7,5).
        let map = ContractionMap::new(7, 0, 5).unwrap();
        let d = expand(map.source(), &TautClass::Ds(ratq(13, 2))).unwrap();
        let pushed = map.pushforward(&d).unwrap();
        assert_eq!(*pushed.lambda_coeff(), ratq(3, 2));
        for s in map.target().boundary_sets().unwrap() {
            assert_eq!(s.len(), 2);
            assert_eq!(pushed.boundary_coeff(&s), Rat::one());
        }
        assert_eq!(pushed.boundary_iter().count(), 21);
    }

    #[test]
    fn pullback_formulas() {
        // lambda on (7,5) pulls back to lambda + sum_{3<=|S|<=7} d_S on (7,0).
        let map = ContractionMap::new(7, 0, 5).unwrap();
        let lam = DivisorClass::lambda_class(map.target());
        let pulled = map.pullback(&lam).unwrap();
        assert_eq!(*pulled.lambda_coeff(), Rat::one());
        for s in map.source().boundary_sets().unwrap() {
            let expected = if s.len() >= 3 { Rat::one() } else { Rat::zero() };
            assert_eq!(pulled.boundary_coeff(&s), expected, "S = {}", s);
        }
        // delta_{0,{1,2}} pulls back to itself.
        let mut d = DivisorClass::zero(map.target());
        d.set_boundary(ms(&[1, 2], 7), Rat::one()).unwrap();
        let pulled = map.pullback(&d).unwrap();
        assert!(pulled.lambda_coeff().is_zero());
        assert_eq!(pulled.boundary_coeff(&ms(&[1, 2], 7)), Rat::one());
        assert_eq!(pulled.boundary_iter().count(), 1);
    }

    #[test]
    fn push_pull_is_identity_on_target() {
        let map = ContractionMap::new(7, 0, 5).unwrap();
        let mut d = expand(map.target(), &TautClass::Psi).unwrap();
        d.set_boundary(ms(&[3, 4], 7), ratq(-5, 7)).unwrap();
        let round = map.pushforward(&map.pullback(&d).unwrap()).unwrap();
        assert_eq!(round, d);
    }

    #[test]
    fn discrepancy_report_examples() {
        // (n=7, m=6, s=11/2): coefficient 1/2 at |S|=2, rings equal.
        let r = discrepancy_of_ds(7, 6, &ratq(11, 2)).unwrap();
        assert_eq!(r.coefficients[0], (2, ratq(1, 2)));
        assert!(r.section_rings_equal);
        // Boundary case s = 12-m: min coefficient 0, equality holds.
        let r = discrepancy_of_ds(9, 4, &rat(8)).unwrap();
        assert!(r.min_coefficient.is_zero());
        assert!(r.section_rings_equal);
        // (n=7, m=2, s=11): coefficient -1 at |S|=6, equality fails.
        let r = discrepancy_of_ds(7, 2, &rat(11)).unwrap();
        assert_eq!(r.coefficient_for(&ms(&[1, 2, 3, 4, 5, 6], 7)), Some(&rat(-1)));
        assert!(!r.section_rings_equal);
    }

    #[test]
    fn canonical_discrepancy_detects_singularity() {
        // (7,5) -> (7,6): 4 sum_{|S|=2} d_S, and 4 < dim - 1 = 6.
        let cd = canonical_discrepancy(7, 5, 6).unwrap();
        assert_eq!(cd.dim, 7);
        assert_eq!(cd.discrepancies, vec![(2, rat(4))]);
        assert!(cd.class.lambda_coeff().is_zero());
        for (s, c) in cd.class.boundary_iter() {
            assert_eq!(s.len(), 2);
            assert_eq!(*c, rat(4));
        }
        assert_eq!(cd.verdict, SmoothnessVerdict::Singular);

        // (6,4) -> (6,5): discrepancy 5 = dim - 1, no contradiction.
        let cd = canonical_discrepancy(6, 4, 5).unwrap();
        assert_eq!(cd.discrepancies, vec![(2, rat(5))]);
        assert_eq!(cd.verdict, SmoothnessVerdict::Inconclusive);

        // Identity map: zero class.
        let cd = canonical_discrepancy(7, 3, 3).unwrap();
        assert!(cd.class.is_zero());
        assert_eq!(cd.verdict, SmoothnessVerdict::NotApplicable);
    }

    #[test]
    fn slope_alpha_dictionary() {
        assert_eq!(alpha_of_s(&rat(11)), ratq(5, 6));
        assert_eq!(alpha_of_s(&rat(13)), Rat::one());
        assert_eq!(alpha_of_s(&rat(0)), ratq(-1, 12));
        for p in -30..30 {
            let s = ratq(p, 7);
            assert_eq!(s_of_alpha(&alpha_of_s(&s)), s);
        }
        assert!(log_canonical(10));
        assert!(!log_canonical(11));
    }
}
