//! Stable reduction of special fibers: the blow-up/contraction sequence
//! that turns a genus-one fiber into an m-stable one, with full
//! intersection-number bookkeeping.
//!
//! Each step finds the minimal elliptic subcurve `Z`; while its level
//! `l_i = n_i + m_i` (marks on `Z` plus nodes joining it to the rest) is at
//! most `m`, the step sprouts each mark of `Z` onto a fresh one-marked
//! rational branch and replaces `Z` by an elliptic point of multiplicity
//! `l_i` whose branches are the sprouts and the old attachment components.
//! Afterwards semistable chains are blown down. The trace records, per
//! one-parameter family crossing this fiber,
//!
//! ```text
//! d_lambda = k (number of steps)      d_psi    = sum n_i
//! d_delta0 = -sum m_i                 d_psi_minus_delta0 = sum l_i
//! ```
//!
//! summed over all `k` steps. A node at which the total space has an
//! `A_{d-1}` singularity enters as an edge of multiplicity `d`; it is
//! expanded into a chain of `d` unit nodes, so the step repeats `d` times
//! and the deltas scale accordingly.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dualgraph::{is_m_stable, DualGraph, Subcurve};
use crate::error::Error;
use crate::picard::MarkSet;

/// One blow-up/contraction step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub n_i: u32,
    pub m_i: u32,
    pub l_i: u32,
}

/// The recorded sequence of steps and the intersection-number deltas they
/// induce.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub k: i64,
    pub d_lambda: i64,
    pub d_psi: i64,
    pub d_delta0: i64,
    pub d_psi_minus_delta0: i64,
}

impl ReductionTrace {
    pub fn from_steps(steps: Vec<ReductionStep>) -> Self {
        let k = steps.len() as i64;
        let d_psi: i64 = steps.iter().map(|s| s.n_i as i64).sum();
        let d_delta0: i64 = -steps.iter().map(|s| s.m_i as i64).sum::<i64>();
        let d_psi_minus_delta0: i64 = steps.iter().map(|s| s.l_i as i64).sum();
        ReductionTrace {
            steps,
            k,
            d_lambda: k,
            d_psi,
            d_delta0,
            d_psi_minus_delta0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Expands every edge of multiplicity `d >= 2` into a chain of `d` unit
/// edges through `d - 1` fresh unmarked rational vertices.
fn expand_multiplicities(g: &DualGraph) -> Result<DualGraph, Error> {
    if g.edges().iter().all(|e| e.mult == 1) {
        return Ok(g.clone());
    }
    let mut out = DualGraph::new(g.n())?;
    for v in g.vertices() {
        out.add_vertex(&v.id, v.genus, v.marks)?;
    }
    for (i, e) in g.edges().iter().enumerate() {
        if e.mult == 1 {
            out.add_edge(e.a, e.b)?;
        } else {
            let mut prev = e.a;
            for j in 1..e.mult {
                let mid = out.add_vertex(&format!("x{}.{}", i, j), 0, MarkSet::EMPTY)?;
                out.add_edge(prev, mid)?;
                prev = mid;
            }
            out.add_edge(prev, e.b)?;
        }
    }
    if let Some(hub) = g.hub() {
        out.set_hub(hub.branches.clone())?;
    }
    Ok(out)
}

/// Replaces the subcurve `z` by an elliptic point whose branches are one
/// fresh one-marked vertex per mark of `z` plus the attachment vertices of
/// the crossing edges.
fn contract_step(g: &DualGraph, z: &Subcurve, step_index: usize) -> Result<DualGraph, Error> {
    let mut out = DualGraph::new(g.n())?;
    let mut index_map = vec![usize::MAX; g.vertices().len()];
    for (i, v) in g.vertices().iter().enumerate() {
        if !z.vertex_ids.contains(&i) {
            index_map[i] = out.add_vertex(&v.id, v.genus, v.marks)?;
        }
    }
    let mut branches = Vec::new();
    for &i in &z.vertex_ids {
        for mark in g.vertices()[i].marks.iter() {
            let fresh = out.add_vertex(
                &format!("s{}.{}", step_index, mark),
                0,
                MarkSet::singleton(mark),
            )?;
            branches.push(fresh);
        }
    }
    for e in g.edges() {
        let a_in = z.vertex_ids.contains(&e.a);
        let b_in = z.vertex_ids.contains(&e.b);
        match (a_in, b_in) {
            (false, false) => out.add_edge_mult(index_map[e.a], index_map[e.b], e.mult)?,
            (true, false) => branches.push(index_map[e.b]),
            (false, true) => branches.push(index_map[e.a]),
            (true, true) => {}
        }
    }
    out.set_hub(branches)?;
    Ok(out)
}

/// Blows down semistable components: unmarked rational vertices with
/// exactly two special points. Two nodes merge into one whose multiplicity
/// is the sum; a node against the elliptic point moves the branch across.
fn blow_down_semistable_chains(g: &DualGraph) -> Result<DualGraph, Error> {
    let mut current = g.clone();
    loop {
        let target = (0..current.vertices().len()).find(|&v| {
            let vertex = &current.vertices()[v];
            vertex.genus == 0 && vertex.marks.is_empty() && current.special_points(v) == 2
        });
        let Some(v) = target else {
            return Ok(current);
        };
        let incident: Vec<usize> = current
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.a == v || e.b == v)
            .map(|(i, _)| i)
            .collect();
        let branch_count = current
            .hub()
            .map(|h| h.branches.iter().filter(|&&b| b == v).count())
            .unwrap_or(0);

        let mut out = DualGraph::new(current.n())?;
        let mut index_map = vec![usize::MAX; current.vertices().len()];
        for (i, vertex) in current.vertices().iter().enumerate() {
            if i != v {
                index_map[i] = out.add_vertex(&vertex.id, vertex.genus, vertex.marks)?;
            }
        }
        let other = |i: usize| {
            let e = &current.edges()[i];
            if e.a == v {
                e.b
            } else {
                e.a
            }
        };
        match (incident.len(), branch_count) {
            (2, 0) => {
                // Loops would make the vertex its own two special points;
                // a degree-2 vertex with a loop closes the genus cycle and
                // is its whole minimal subcurve, never semistable here.
                let (e1, e2) = (incident[0], incident[1]);
                let mult = current.edges()[e1].mult + current.edges()[e2].mult;
                let a = other(e1);
                let b = other(e2);
                for (i, e) in current.edges().iter().enumerate() {
                    if i != e1 && i != e2 {
                        out.add_edge_mult(index_map[e.a], index_map[e.b], e.mult)?;
                    }
                }
                out.add_edge_mult(index_map[a], index_map[b], mult)?;
                if let Some(hub) = current.hub() {
                    out.set_hub(hub.branches.iter().map(|&b| index_map[b]).collect())?;
                }
            }
            (1, 1) => {
                let e1 = incident[0];
                let a = other(e1);
                for (i, e) in current.edges().iter().enumerate() {
                    if i != e1 {
                        out.add_edge_mult(index_map[e.a], index_map[e.b], e.mult)?;
                    }
                }
                let hub = current.hub().expect("branch incidence without a hub");
                let mut moved = false;
                let branches = hub
                    .branches
                    .iter()
                    .map(|&b| {
                        if b == v && !moved {
                            moved = true;
                            index_map[a]
                        } else {
                            index_map[b]
                        }
                    })
                    .collect();
                out.set_hub(branches)?;
            }
            _ => {
                return Err(Error::Internal(format!(
                    "semistable vertex {:?} with {} edges and {} branch incidences",
                    current.vertices()[v].id,
                    incident.len(),
                    branch_count
                )));
            }
        }
        current = out;
    }
}

/// Runs the reduction until the fiber is m-stable; returns the reduced
/// graph and the step trace.
pub fn mstable_reduce(g: &DualGraph, m: u32) -> Result<(DualGraph, ReductionTrace), Error> {
    g.validate_genus_one()?;
    if let Some(hub) = g.hub() {
        if hub.multiplicity() > m {
            return Err(Error::PreconditionViolated(format!(
                "input has an elliptic point of multiplicity {} > m = {}",
                hub.multiplicity(),
                m
            )));
        }
    }
    let mut working = expand_multiplicities(g)?;
    let bound = working.n() as usize + working.edges().len() + 2;
    let mut steps = Vec::new();
    loop {
        if steps.len() > bound {
            return Err(Error::NonTermination { bound });
        }
        let z = working.minimal_elliptic_subcurve()?;
        let level = working.level(&z)?;
        if level > m {
            break;
        }
        let n_i: u32 = z
            .vertex_ids
            .iter()
            .map(|&v| working.vertices()[v].marks.len())
            .sum();
        let m_i = level - n_i;
        steps.push(ReductionStep {
            n_i,
            m_i,
            l_i: level,
        });
        let next = contract_step(&working, &z, steps.len() - 1)?;
        debug_assert_eq!(next.arithmetic_genus()?, 1);
        working = next;
    }
    let reduced = blow_down_semistable_chains(&working)?;
    reduced.validate_genus_one()?;
    let report = is_m_stable(&reduced, m)?;
    if !report.stable {
        return Err(Error::PreconditionViolated(format!(
            "input is not a stable fiber: reduction output violates stability ({})",
            report.violations.join("; ")
        )));
    }
    Ok((reduced, ReductionTrace::from_steps(steps)))
}

/// Edges whose removal disconnects the graph, with the marks on the side
/// away from the genus source (the type of the node).
fn disconnecting_edges(g: &DualGraph) -> Result<Vec<(usize, MarkSet)>, Error> {
    g.validate_genus_one()?;
    let source = g.minimal_elliptic_subcurve()?;
    let mut out = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if e.a == e.b {
            continue;
        }
        // Drop one copy of the edge and look for a split.
        let mut trimmed = DualGraph::new(g.n())?;
        for v in g.vertices() {
            trimmed.add_vertex(&v.id, v.genus, v.marks)?;
        }
        for (j, f) in g.edges().iter().enumerate() {
            if j != i {
                trimmed.add_edge_mult(f.a, f.b, f.mult)?;
            }
        }
        if let Some(hub) = g.hub() {
            trimmed.set_hub(hub.branches.clone())?;
        }
        if trimmed.is_subcurve_connected(&trimmed.full_subcurve()) {
            continue;
        }
        // Collect the component hanging off the far side of the edge.
        let start = if source.vertex_ids.contains(&e.a) {
            e.b
        } else {
            e.a
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = vec![start];
        while let Some(v) = queue.pop() {
            for (j, f) in g.edges().iter().enumerate() {
                if j == i {
                    continue;
                }
                for (x, y) in [(f.a, f.b), (f.b, f.a)] {
                    if x == v && !seen.contains(&y) {
                        seen.insert(y);
                        queue.push(y);
                    }
                }
            }
        }
        let mut marks = MarkSet::EMPTY;
        for &v in &seen {
            marks = marks.union(&g.vertices()[v].marks);
        }
        out.push((i, marks));
    }
    Ok(out)
}

/// The m-stable limit of a one-disconnecting-node fiber under the
/// contraction map: an elliptic point of multiplicity `n - |S| + 1` joining
/// the `S`-marked rational component and one fresh singleton branch per
/// remaining mark.
pub fn phi_limit(g: &DualGraph, n: u32, m: u32) -> Result<DualGraph, Error> {
    if g.n() != n {
        return Err(Error::PreconditionViolated(format!(
            "graph carries {} marks, expected {}",
            g.n(),
            n
        )));
    }
    if g.hub().is_some() {
        return Err(Error::PreconditionViolated(
            "the limit is defined for nodal fibers (no elliptic point)".into(),
        ));
    }
    let disc = disconnecting_edges(g)?;
    if disc.len() != 1 {
        return Err(Error::PreconditionViolated(format!(
            "need exactly one disconnecting node, found {}",
            disc.len()
        )));
    }
    let (edge_index, s) = &disc[0];
    let size = s.len();
    if size < 2 || n - size + 1 > m {
        return Err(Error::PreconditionViolated(format!(
            "tail marks {} need n-m+1 <= |S| <= n (n = {}, m = {})",
            s, n, m
        )));
    }
    let e = &g.edges()[*edge_index];
    let source = g.minimal_elliptic_subcurve()?;
    let rational = if source.vertex_ids.contains(&e.a) {
        e.b
    } else {
        e.a
    };
    if g.vertices()[rational].marks != *s {
        return Err(Error::PreconditionViolated(
            "the rational side is not a single marked component".into(),
        ));
    }
    let mut out = DualGraph::new(n)?;
    let r = out.add_vertex(&g.vertices()[rational].id, 0, *s)?;
    let mut branches = vec![r];
    for mark in s.complement_in(n).iter() {
        branches.push(out.add_vertex(&format!("p{}", mark), 0, MarkSet::singleton(mark))?);
    }
    out.set_hub(branches)?;
    Ok(out)
}

/// Is the contraction map regular at this nodal fiber? True when the fiber
/// meets no contracted boundary divisor (no disconnecting node of type `S`
/// with `|S| >= n-m+1`), or when it has at most one disconnecting node.
pub fn is_phi_regular_at(g: &DualGraph, n: u32, m: u32) -> Result<bool, Error> {
    if g.hub().is_some() {
        return Err(Error::PreconditionViolated(
            "regularity test applies to nodal fibers".into(),
        ));
    }
    if g.n() != n {
        return Err(Error::PreconditionViolated(format!(
            "graph carries {} marks, expected {}",
            g.n(),
            n
        )));
    }
    let disc = disconnecting_edges(g)?;
    let condition_1 = disc.iter().all(|(_, s)| s.len() + m < n + 1);
    let condition_2 = disc.len() <= 1;
    Ok(condition_1 || condition_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(marks: &[u32], n: u32) -> MarkSet {
        MarkSet::from_marks(marks.iter().copied(), n).unwrap()
    }

    fn elliptic_tail(n: u32, e_marks: &[u32]) -> DualGraph {
        let mut g = DualGraph::new(n).unwrap();
        let e_set = ms(e_marks, n);
        let e = g.add_vertex("E", 1, e_set).unwrap();
        let r = g.add_vertex("R", 0, e_set.complement_in(n)).unwrap();
        g.add_edge(e, r).unwrap();
        g
    }

    #[test]
    fn unmarked_tail_single_level_one_step() {
        // E (no marks) -- R{1,2,3}, m = 2: one step with (n,m,l) = (0,1,1),
        // producing the cuspidal model.
        let g = elliptic_tail(3, &[]);
        let (reduced, trace) = mstable_reduce(&g, 2).unwrap();
        assert_eq!(
            trace.steps,
            vec![ReductionStep {
                n_i: 0,
                m_i: 1,
                l_i: 1
            }]
        );
        assert_eq!(trace.d_lambda, 1);
        assert_eq!(trace.d_psi, 0);
        assert_eq!(trace.d_delta0, -1);
        assert_eq!(reduced.hub().unwrap().multiplicity(), 1);
        assert_eq!(reduced.vertices().len(), 1);
        assert!(is_m_stable(&reduced, 2).unwrap().stable);
    }

    #[test]
    fn marked_tail_level_two_step() {
        // E{1} -- R{2,3}, m = 2: one step with (n,m,l) = (1,1,2); the mark
        // sprouts onto a fresh branch of a two-branch elliptic point.
        let g = elliptic_tail(3, &[1]);
        let (reduced, trace) = mstable_reduce(&g, 2).unwrap();
        assert_eq!(
            trace.steps,
            vec![ReductionStep {
                n_i: 1,
                m_i: 1,
                l_i: 2
            }]
        );
        assert_eq!(trace.d_lambda, 1);
        assert_eq!(trace.d_psi, 1);
        assert_eq!(trace.d_delta0, -1);
        assert_eq!(trace.d_psi_minus_delta0, 2);
        assert_eq!(reduced.hub().unwrap().multiplicity(), 2);
        let t = reduced.combinatorial_type().unwrap();
        assert_eq!(t.to_string(), "{{1},{2,3}}");
        assert!(is_m_stable(&reduced, 2).unwrap().stable);
    }

    #[test]
    fn already_stable_is_identity() {
        let g = elliptic_tail(3, &[1, 2]);
        // {E} has level 3 > 2: nothing to contract.
        let (reduced, trace) = mstable_reduce(&g, 2).unwrap();
        assert!(trace.is_empty());
        assert_eq!(trace.d_lambda, 0);
        assert_eq!(reduced, g);
    }

    #[test]
    fn multiplicity_repeats_the_step() {
        // A thickened disconnecting node repeats the level-1 step once per
        // unit of multiplicity, scaling every delta.
        let mut g = DualGraph::new(3).unwrap();
        let e = g.add_vertex("E", 1, ms(&[], 3)).unwrap();
        let r = g.add_vertex("R", 0, ms(&[1, 2, 3], 3)).unwrap();
        g.add_edge_mult(e, r, 3).unwrap();
        let (reduced, trace) = mstable_reduce(&g, 2).unwrap();
        assert_eq!(trace.k, 3);
        assert_eq!(trace.d_lambda, 3);
        assert_eq!(trace.d_psi, 0);
        assert_eq!(trace.d_delta0, -3);
        assert!(trace.steps.iter().all(|s| *s
            == ReductionStep {
                n_i: 0,
                m_i: 1,
                l_i: 1
            }));
        assert_eq!(reduced.hub().unwrap().multiplicity(), 1);
        assert!(is_m_stable(&reduced, 2).unwrap().stable);
    }

    #[test]
    fn two_tails_contract_together() {
        // E -- A{1,2}, E -- B{3,4}, m = 3: one step contracts {E} (level 2)
        // into a tacnodal point joining A and B; the new core has level 4.
        let mut g = DualGraph::new(4).unwrap();
        let e = g.add_vertex("E", 1, ms(&[], 4)).unwrap();
        let a = g.add_vertex("A", 0, ms(&[1, 2], 4)).unwrap();
        let b = g.add_vertex("B", 0, ms(&[3, 4], 4)).unwrap();
        g.add_edge(e, a).unwrap();
        g.add_edge(e, b).unwrap();
        let (reduced, trace) = mstable_reduce(&g, 3).unwrap();
        assert_eq!(
            trace.steps,
            vec![
                ReductionStep {
                    n_i: 0,
                    m_i: 2,
                    l_i: 2
                },
            ]
        );
        assert_eq!(reduced.hub().unwrap().multiplicity(), 2);
        assert!(is_m_stable(&reduced, 3).unwrap().stable);
        // Reducing again is the identity.
        let (again, trace2) = mstable_reduce(&reduced, 3).unwrap();
        assert!(trace2.is_empty());
        assert_eq!(again, reduced);
    }

    #[test]
    fn phi_limit_examples() {
        // n=3, m=2, S={2,3}: two-branch point joining {2,3} and {1}.
        let mut g = DualGraph::new(3).unwrap();
        let e = g.add_vertex("E", 1, ms(&[1], 3)).unwrap();
        let r = g.add_vertex("R", 0, ms(&[2, 3], 3)).unwrap();
        g.add_edge(e, r).unwrap();
        let lim = phi_limit(&g, 3, 2).unwrap();
        assert_eq!(lim.hub().unwrap().multiplicity(), 2);
        assert_eq!(lim.combinatorial_type().unwrap().to_string(), "{{1},{2,3}}");

        // n=7, m=6, S=[7]: cusp on the fully marked component.
        let mut g = DualGraph::new(7).unwrap();
        let e = g.add_vertex("E", 1, ms(&[], 7)).unwrap();
        let r = g.add_vertex("R", 0, MarkSet::full(7)).unwrap();
        g.add_edge(e, r).unwrap();
        let lim = phi_limit(&g, 7, 6).unwrap();
        assert_eq!(lim.hub().unwrap().multiplicity(), 1);
        assert_eq!(lim.vertices().len(), 1);

        // |S| out of range: n=3, m=1 needs |S| >= 3.
        let mut g = DualGraph::new(3).unwrap();
        let e = g.add_vertex("E", 1, ms(&[1], 3)).unwrap();
        let r = g.add_vertex("R", 0, ms(&[2, 3], 3)).unwrap();
        g.add_edge(e, r).unwrap();
        assert!(phi_limit(&g, 3, 1).is_err());
    }

    #[test]
    fn phi_limit_agrees_with_reduction() {
        for (n, m, s_marks) in [(3u32, 2u32, vec![2u32, 3]), (7, 6, (1..=7).collect())] {
            let s = ms(&s_marks, n);
            let mut g = DualGraph::new(n).unwrap();
            let e = g.add_vertex("E", 1, s.complement_in(n)).unwrap();
            let r = g.add_vertex("R", 0, s).unwrap();
            g.add_edge(e, r).unwrap();
            let lim = phi_limit(&g, n, m).unwrap();
            let (red, _) = mstable_reduce(&g, m).unwrap();
            assert_eq!(
                lim.hub().unwrap().multiplicity(),
                red.hub().unwrap().multiplicity()
            );
            assert_eq!(
                lim.combinatorial_type().unwrap(),
                red.combinatorial_type().unwrap()
            );
        }
    }

    #[test]
    fn regularity_conditions() {
        // Smooth fiber: regular.
        let mut g = DualGraph::new(5).unwrap();
        g.add_vertex("E", 1, MarkSet::full(5)).unwrap();
        assert!(is_phi_regular_at(&g, 5, 3).unwrap());

        // One disconnecting node of full type: condition (2).
        let g = elliptic_tail(5, &[]);
        assert!(is_phi_regular_at(&g, 5, 3).unwrap());

        // Two tails both of contracted type on (5,3): neither condition.
        let mut g = DualGraph::new(5).unwrap();
        let e = g.add_vertex("E", 1, ms(&[5], 5)).unwrap();
        let a = g.add_vertex("A", 0, ms(&[1, 2], 5)).unwrap();
        let b = g.add_vertex("B", 0, ms(&[3, 4], 5)).unwrap();
        g.add_edge(e, a).unwrap();
        g.add_edge(e, b).unwrap();
        // Tail types are {1,2} and {3,4}, both with |S| = 2 < n-m+1 = 3:
        // condition (1) holds even with two nodes.
        assert!(is_phi_regular_at(&g, 5, 3).unwrap());
        // For m = 4 both tails are of contracted type and there are two
        // disconnecting nodes: not regular.
        assert!(!is_phi_regular_at(&g, 5, 4).unwrap());
    }
}
