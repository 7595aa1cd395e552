//! Built-in invariant suite: re-derives the structural identities at desk
//! scale and reports a pass/fail matrix. Used by the `selfcheck` CLI
//! command.

use crate::chambers::{chamber_table, model_at};
use crate::contraction::{alpha_of_s, discrepancy_of_ds, ContractionMap};
use crate::error::Error;
use crate::picard::{expand, DivisorClass, Space, TautClass};
use crate::positivity::{intersect, verify_chamber_ampleness, Verdict};
use crate::rational::{rat, ratq, Rat};
use crate::strata::{esigma_fiber_curve, set_partitions, stratum_dimension};

pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(results: &mut Vec<CheckResult>, name: &str, outcome: Result<bool, Error>) {
    match outcome {
        Ok(passed) => results.push(CheckResult {
            name: name.to_string(),
            passed,
            detail: String::new(),
        }),
        Err(e) => results.push(CheckResult {
            name: name.to_string(),
            passed: false,
            detail: e.to_string(),
        }),
    }
}

fn psi_relation(n_max: u32) -> Result<bool, Error> {
    for n in 2..=n_max {
        let space = Space::new(n, 0)?;
        let mut sum = DivisorClass::zero(space);
        for i in 1..=n {
            // psi_i - lambda - sum_{i in S} delta_{0,S} = 0.
            let psi_i = expand(space, &TautClass::PsiI(i))?;
            let mut rhs = DivisorClass::lambda_class(space);
            for s in space.boundary_sets()? {
                if s.contains(i) {
                    rhs.set_boundary(s, rhs.boundary_coeff(&s) + Rat::one())?;
                }
            }
            if psi_i != rhs {
                return Ok(false);
            }
            sum = sum.add(&psi_i)?;
        }
        if sum != expand(space, &TautClass::Psi)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn truncation_consistency(n_max: u32) -> Result<bool, Error> {
    for n in 2..=n_max {
        for m in 1..n {
            let map = ContractionMap::new(n, 0, m)?;
            for cls in [
                TautClass::Psi,
                TautClass::Delta0,
                TautClass::KStack,
                TautClass::Ds(ratq(19, 3)),
            ] {
                let truncated = map.pushforward(&expand(map.source(), &cls)?)?;
                if truncated != expand(map.target(), &cls)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn discrepancy_equivalences(n_max: u32) -> Result<bool, Error> {
    for n in 2..=n_max {
        for m in 1..n {
            for s in [rat(11 - m as i64), rat(12 - m as i64), rat(13)] {
                let report = discrepancy_of_ds(n, m, &s)?;
                let all_nonneg = report.coefficients.iter().all(|(_, c)| !c.is_negative());
                let expected = s <= rat(12 - m as i64);
                if report.section_rings_equal != all_nonneg
                    || report.section_rings_equal != expected
                {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn chamber_consistency(n_max: u32) -> Result<bool, Error> {
    for n in 3..=n_max {
        let table = chamber_table(n)?;
        for step in 0..=(14 * 4) {
            let s = rat(12 - n as i64) + ratq(step, 4) + ratq(1, 8);
            let inside: Vec<_> = table.iter().filter(|c| c.contains(&s)).collect();
            if inside.len() != 1 || model_at(n, &s)? != *inside[0] {
                return Ok(false);
            }
        }
        // alpha endpoints agree with the slope dictionary.
        for c in &table {
            if c.alpha_lo() != alpha_of_s(&c.lo) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn strata_dimensions(n_max: u32) -> Result<bool, Error> {
    for n in 2..=n_max {
        for l in 1..n {
            for p in set_partitions(n, l) {
                if p.big_part_count() == 0 {
                    continue;
                }
                if stratum_dimension(&p)? != n - l - 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn fiber_curve_pairings(n_max: u32) -> Result<bool, Error> {
    for n in 3..=n_max {
        for m in 1..n {
            let space = Space::new(n, m)?;
            let psi = expand(space, &TautClass::Psi)?;
            let delta0 = expand(space, &TautClass::Delta0)?;
            for l in 1..=m {
                for p in set_partitions(n, l) {
                    if p.big_part_count() == 0
                        || p.big_parts().any(|b| b.len() > space.max_boundary_size())
                    {
                        continue;
                    }
                    let curve = esigma_fiber_curve(n, m, &p)?;
                    for s in [rat(0), ratq(7, 2), rat(12)] {
                        let class = psi
                            .sub(&delta0)?
                            .sub(&DivisorClass::lambda_class(space).scale(&s))?;
                        if intersect(&class, &curve)? != s - rat(l as i64) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

fn chamber_positivity(n_max: u32) -> Result<bool, Error> {
    for n in 3..=n_max {
        for row in verify_chamber_ampleness(n)? {
            if !row.pushforward_identity
                || row.midpoint != Verdict::AllPositive
                || !row.endpoint_min_degree.is_zero()
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Runs the whole suite up to `n_max` (8 by default in the CLI).
pub fn run(n_max: u32) -> Vec<CheckResult> {
    let mut results = Vec::new();
    check(&mut results, "psi relations (Picard basis)", psi_relation(n_max));
    check(
        &mut results,
        "expansion commutes with truncation",
        truncation_consistency(n_max),
    );
    check(
        &mut results,
        "discrepancy sign <=> section-ring equality",
        discrepancy_equivalences(n_max),
    );
    check(
        &mut results,
        "chamber table partitions the big ray",
        chamber_consistency(n_max),
    );
    check(
        &mut results,
        "stratum dimensions are n-l-1",
        strata_dimensions(n_max),
    );
    check(
        &mut results,
        "fiber-curve pairings give s-l",
        fiber_curve_pairings(n_max),
    );
    check(
        &mut results,
        "chamber midpoints positive, endpoints zero",
        chamber_positivity(n_max),
    );
    results
}
