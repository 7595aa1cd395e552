//! Combinatorial models of pointed genus-one curves.
//!
//! A [`DualGraph`] records components (vertices with geometric genus 0
//! or 1 and marked points), nodes (edges, loops allowed), and at most one
//! multi-branch elliptic point (the *hub*), whose `l` branches lie on the
//! listed vertices. Arithmetic genus treats the hub as a genus-one vertex
//! joined by `l` edges:
//!
//! ```text
//! genus = sum of geometric genera + hub genus + b1(augmented multigraph)
//! ```
//!
//! so a valid curve has exactly one genus source: a genus-one vertex, a
//! cycle of nodes, or the hub. A hub restricted to fewer than all of its
//! branches behaves like an ordinary point joining them (genus zero), which
//! is how induced subcurve genera are computed.
//!
//! Edges carry an optional total-space multiplicity (a thickened node of a
//! one-parameter smoothing); it scales reduction bookkeeping but not the
//! curve-level combinatorics.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::picard::{MarkSet, MAX_N};
use crate::strata::Partition;

/// One irreducible component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub genus: u8,
    pub marks: MarkSet,
}

/// The elliptic multi-branch point; `branches[i]` is the vertex carrying
/// the i-th branch (a vertex may appear more than once).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hub {
    pub branches: Vec<usize>,
}

impl Hub {
    pub fn multiplicity(&self) -> u32 {
        self.branches.len() as u32
    }
}

/// An internal edge: one node of the curve, with the multiplicity of the
/// total space at that node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub mult: u32,
}

/// A connected subcurve, named by vertex indices; `include_hub` pulls in
/// the hub point with every branch incidence on the listed vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subcurve {
    pub vertex_ids: BTreeSet<usize>,
    pub include_hub: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    n: u32,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    hub: Option<Hub>,
}

impl DualGraph {
    pub fn new(n: u32) -> Result<Self, Error> {
        if n > MAX_N {
            return Err(Error::BadGraph(format!("n = {} exceeds {}", n, MAX_N)));
        }
        Ok(DualGraph {
            n,
            vertices: Vec::new(),
            edges: Vec::new(),
            hub: None,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn hub(&self) -> Option<&Hub> {
        self.hub.as_ref()
    }

    pub fn add_vertex(&mut self, id: &str, genus: u8, marks: MarkSet) -> Result<usize, Error> {
        if genus > 1 {
            return Err(Error::BadGraph(format!(
                "vertex {} has geometric genus {}",
                id, genus
            )));
        }
        if self.vertices.iter().any(|v| v.id == id) {
            return Err(Error::BadGraph(format!("duplicate vertex id {:?}", id)));
        }
        if !marks.is_subset_of(&MarkSet::full(self.n)) {
            return Err(Error::BadMark {
                mark: marks.iter().find(|&i| i > self.n).unwrap_or(0),
                n: self.n,
            });
        }
        self.vertices.push(Vertex {
            id: id.to_string(),
            genus,
            marks,
        });
        Ok(self.vertices.len() - 1)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), Error> {
        self.add_edge_mult(a, b, 1)
    }

    pub fn add_edge_mult(&mut self, a: usize, b: usize, mult: u32) -> Result<(), Error> {
        if a >= self.vertices.len() || b >= self.vertices.len() {
            return Err(Error::BadGraph("edge endpoint out of range".into()));
        }
        if mult < 1 {
            return Err(Error::BadGraph("edge multiplicity must be >= 1".into()));
        }
        self.edges.push(Edge {
            a: a.min(b),
            b: a.max(b),
            mult,
        });
        Ok(())
    }

    pub fn set_hub(&mut self, branches: Vec<usize>) -> Result<(), Error> {
        if self.hub.is_some() {
            return Err(Error::BadGraph("at most one hub".into()));
        }
        if branches.is_empty() {
            return Err(Error::BadGraph("hub multiplicity must be >= 1".into()));
        }
        if branches.iter().any(|&v| v >= self.vertices.len()) {
            return Err(Error::BadGraph("hub branch vertex out of range".into()));
        }
        self.hub = Some(Hub { branches });
        Ok(())
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// The subcurve consisting of everything.
    pub fn full_subcurve(&self) -> Subcurve {
        Subcurve {
            vertex_ids: (0..self.vertices.len()).collect(),
            include_hub: self.hub.is_some(),
        }
    }

    fn check_marks_partition(&self) -> Result<(), Error> {
        let mut seen = MarkSet::EMPTY;
        for v in &self.vertices {
            if !v.marks.intersection(&seen).is_empty() {
                return Err(Error::BadGraph(format!(
                    "mark repeated on vertex {:?}",
                    v.id
                )));
            }
            seen = seen.union(&v.marks);
        }
        if seen != MarkSet::full(self.n) {
            return Err(Error::BadGraph(format!(
                "marks do not partition 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    /// Augmented adjacency used by genus and connectivity: graph vertices
    /// `0..V`, plus node `V` for the hub point when any branch is present.
    fn augmented_adjacency(&self, sub: &Subcurve) -> (Vec<Vec<usize>>, usize, u32, u32) {
        let v_count = self.vertices.len();
        let mut adj = vec![Vec::new(); v_count + 1];
        let mut edge_count = 0u32;
        for e in &self.edges {
            if sub.vertex_ids.contains(&e.a) && sub.vertex_ids.contains(&e.b) {
                adj[e.a].push(e.b);
                adj[e.b].push(e.a);
                edge_count += 1;
            }
        }
        let mut hub_incidences = 0u32;
        if sub.include_hub {
            if let Some(hub) = &self.hub {
                for &v in &hub.branches {
                    if sub.vertex_ids.contains(&v) {
                        adj[v].push(v_count);
                        adj[v_count].push(v);
                        hub_incidences += 1;
                        edge_count += 1;
                    }
                }
            }
        }
        (adj, v_count, edge_count, hub_incidences)
    }

    /// Is the induced subcurve connected (through nodes and the hub point)?
    pub fn is_subcurve_connected(&self, sub: &Subcurve) -> bool {
        if sub.vertex_ids.is_empty() {
            return false;
        }
        let (adj, hub_node, _, hub_incidences) = self.augmented_adjacency(sub);
        let start = *sub.vertex_ids.iter().next().unwrap();
        let mut seen = vec![false; adj.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        sub.vertex_ids.iter().all(|&v| seen[v])
            && (hub_incidences == 0 || seen[hub_node])
    }

    /// Arithmetic genus of the induced subcurve (may be disconnected, in
    /// which case each component contributes and b1 uses the component
    /// count).
    pub fn subcurve_genus(&self, sub: &Subcurve) -> i64 {
        let (adj, hub_node, edge_count, hub_incidences) = self.augmented_adjacency(sub);
        let hub_full = sub.include_hub
            && self
                .hub
                .as_ref()
                .map(|h| h.branches.iter().all(|v| sub.vertex_ids.contains(v)))
                .unwrap_or(false);
        let mut node_count = sub.vertex_ids.len() as i64;
        if hub_incidences > 0 {
            node_count += 1;
        }
        // Count connected components of the augmented graph restricted to
        // the subcurve's nodes.
        let mut seen = vec![false; adj.len()];
        let mut components = 0i64;
        let mut nodes: Vec<usize> = sub.vertex_ids.iter().copied().collect();
        if hub_incidences > 0 {
            nodes.push(hub_node);
        }
        for &start in &nodes {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let b1 = edge_count as i64 - node_count + components;
        let genus_sum: i64 = sub
            .vertex_ids
            .iter()
            .map(|&v| self.vertices[v].genus as i64)
            .sum();
        genus_sum + if hub_full { 1 } else { 0 } + b1
    }

    /// Arithmetic genus of the whole curve. Errors when disconnected.
    pub fn arithmetic_genus(&self) -> Result<i64, Error> {
        self.check_marks_partition()?;
        let full = self.full_subcurve();
        if !self.is_subcurve_connected(&full) {
            return Err(Error::Disconnected);
        }
        Ok(self.subcurve_genus(&full))
    }

    /// Checks the structural invariants of a pointed genus-one curve.
    pub fn validate_genus_one(&self) -> Result<(), Error> {
        let genus = self.arithmetic_genus()?;
        if genus != 1 {
            return Err(Error::GenusNotOne { got: genus });
        }
        Ok(())
    }

    /// Marks plus edge endpoints (loops twice) plus hub branch incidences.
    pub fn special_points(&self, v: usize) -> u32 {
        let mut count = self.vertices[v].marks.len();
        for e in &self.edges {
            if e.a == v {
                count += 1;
            }
            if e.b == v {
                count += 1;
            }
        }
        if let Some(hub) = &self.hub {
            count += hub.branches.iter().filter(|&&b| b == v).count() as u32;
        }
        count
    }

    /// The unique connected genus-one subcurve without disconnecting
    /// internal nodes: the genus-one vertex alone, the vertex set of the
    /// unique cycle, or the hub with its branch vertices.
    pub fn minimal_elliptic_subcurve(&self) -> Result<Subcurve, Error> {
        self.validate_genus_one()?;
        if let Some(v) = self.vertices.iter().position(|v| v.genus == 1) {
            return Ok(Subcurve {
                vertex_ids: BTreeSet::from([v]),
                include_hub: false,
            });
        }
        if let Some(hub) = &self.hub {
            return Ok(Subcurve {
                vertex_ids: hub.branches.iter().copied().collect(),
                include_hub: true,
            });
        }
        // Genus comes from a cycle: strip leaves until only the cycle
        // remains (loops count twice toward degree).
        let v_count = self.vertices.len();
        let mut degree = vec![0u32; v_count];
        let mut alive_edge = vec![true; self.edges.len()];
        for e in &self.edges {
            degree[e.a] += 1;
            degree[e.b] += 1;
        }
        let mut alive: Vec<bool> = vec![true; v_count];
        loop {
            let leaf = (0..v_count).find(|&v| alive[v] && degree[v] == 1);
            let Some(leaf) = leaf else { break };
            alive[leaf] = false;
            for (i, e) in self.edges.iter().enumerate() {
                if alive_edge[i] && (e.a == leaf || e.b == leaf) {
                    alive_edge[i] = false;
                    degree[e.a] -= 1;
                    degree[e.b] -= 1;
                }
            }
        }
        let cycle: BTreeSet<usize> = (0..v_count).filter(|&v| alive[v] && degree[v] > 0).collect();
        if cycle.is_empty() {
            return Err(Error::Internal(
                "genus-one graph with no genus source".into(),
            ));
        }
        Ok(Subcurve {
            vertex_ids: cycle,
            include_hub: false,
        })
    }

    /// Level of a subcurve: marks carried plus nodes joining it to the
    /// rest. Hub-internal incidences do not count; an incidence with
    /// exactly one side in the subcurve counts once.
    pub fn level(&self, sub: &Subcurve) -> Result<u32, Error> {
        if sub.vertex_ids.iter().any(|&v| v >= self.vertices.len()) {
            return Err(Error::BadGraph("subcurve vertex out of range".into()));
        }
        let mut level: u32 = sub
            .vertex_ids
            .iter()
            .map(|&v| self.vertices[v].marks.len())
            .sum();
        for e in &self.edges {
            let a_in = sub.vertex_ids.contains(&e.a);
            let b_in = sub.vertex_ids.contains(&e.b);
            if a_in != b_in {
                level += 1;
            }
        }
        if let Some(hub) = &self.hub {
            for &v in &hub.branches {
                let v_in = sub.vertex_ids.contains(&v);
                if v_in != sub.include_hub {
                    level += 1;
                }
            }
        }
        Ok(level)
    }

    /// All connected genus-one subcurves (the hub joins a subcurve exactly
    /// when every branch vertex does).
    pub fn genus_one_subcurves(&self) -> Result<Vec<Subcurve>, Error> {
        let v_count = self.vertices.len();
        if v_count > 22 {
            return Err(Error::EnumCap {
                n: v_count as u32,
                cap: 22,
            });
        }
        let mut out = Vec::new();
        for mask in 1u64..(1 << v_count) {
            let vertex_ids: BTreeSet<usize> =
                (0..v_count).filter(|&v| mask & (1 << v) != 0).collect();
            let include_hub = self
                .hub
                .as_ref()
                .map(|h| h.branches.iter().all(|v| vertex_ids.contains(v)))
                .unwrap_or(false);
            let sub = Subcurve {
                vertex_ids,
                include_hub,
            };
            if self.is_subcurve_connected(&sub) && self.subcurve_genus(&sub) == 1 {
                out.push(sub);
            }
        }
        Ok(out)
    }

    /// The marks grouped by connected component after deleting the hub
    /// point; defined exactly for graphs with a hub.
    pub fn combinatorial_type(&self) -> Result<Partition, Error> {
        let hub = self.hub.as_ref().ok_or(Error::NoHub)?;
        self.validate_genus_one()?;
        let v_count = self.vertices.len();
        let mut adj = vec![Vec::new(); v_count];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        let mut component = vec![usize::MAX; v_count];
        let mut count = 0;
        for start in 0..v_count {
            if component[start] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            component[start] = count;
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if component[w] == usize::MAX {
                        component[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        if count != hub.multiplicity() as usize {
            return Err(Error::BadGraph(format!(
                "hub of multiplicity {} but {} components off the hub",
                hub.multiplicity(),
                count
            )));
        }
        let mut parts = vec![MarkSet::EMPTY; count];
        for (v, vertex) in self.vertices.iter().enumerate() {
            parts[component[v]] = parts[component[v]].union(&vertex.marks);
        }
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::BadGraph(
                "a hub branch component carries no marked point".into(),
            ));
        }
        Partition::new(self.n, parts)
    }
}

/// Outcome of the m-stability check.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub violations: Vec<String>,
}

/// Checks m-stability: (1) hub multiplicity at most `m`; (2) every
/// connected genus-one subcurve has level strictly greater than `m`;
/// (3) rational components are stable — three or more special points,
/// relaxed to two on hub branch vertices provided some branch vertex
/// has three.
pub fn is_m_stable(g: &DualGraph, m: u32) -> Result<StabilityReport, Error> {
    g.validate_genus_one()?;
    let mut violations = Vec::new();

    if let Some(hub) = g.hub() {
        if hub.multiplicity() > m {
            violations.push(format!(
                "hub multiplicity {} exceeds m = {}",
                hub.multiplicity(),
                m
            ));
        }
    }

    for sub in g.genus_one_subcurves()? {
        let level = g.level(&sub)?;
        if level <= m {
            let ids: Vec<&str> = sub
                .vertex_ids
                .iter()
                .map(|&v| g.vertices()[v].id.as_str())
                .collect();
            violations.push(format!(
                "genus-one subcurve {{{}}} has level {} <= m = {}",
                ids.join(","),
                level,
                m
            ));
        }
    }

    let branch_vertices: BTreeSet<usize> = g
        .hub()
        .map(|h| h.branches.iter().copied().collect())
        .unwrap_or_default();
    let mut some_branch_has_three = branch_vertices.is_empty();
    for &v in &branch_vertices {
        if g.special_points(v) >= 3 {
            some_branch_has_three = true;
        }
    }
    for (v, vertex) in g.vertices().iter().enumerate() {
        let special = g.special_points(v);
        if vertex.genus == 1 {
            if special == 0 && g.n() > 0 {
                violations.push(format!(
                    "genus-one component {:?} has no special point",
                    vertex.id
                ));
            }
            continue;
        }
        let required = if branch_vertices.contains(&v) { 2 } else { 3 };
        if special < required {
            violations.push(format!(
                "rational component {:?} has {} special points (needs {})",
                vertex.id, special, required
            ));
        }
    }
    if !some_branch_has_three {
        violations.push("no hub branch vertex has three special points".into());
    }

    Ok(StabilityReport {
        stable: violations.is_empty(),
        violations,
    })
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: String,
    genus: u8,
    marks: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct HubJson {
    branches: Vec<String>,
    l: u32,
}

#[derive(Serialize, Deserialize)]
struct DualGraphJson {
    n: u32,
    vertices: Vec<VertexJson>,
    edges: Vec<[String; 2]>,
    hub: Option<HubJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    edge_mult: Vec<u32>,
}

impl Serialize for DualGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let json = DualGraphJson {
            n: self.n,
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexJson {
                    id: v.id.clone(),
                    genus: v.genus,
                    marks: v.marks.to_vec(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| [self.vertices[e.a].id.clone(), self.vertices[e.b].id.clone()])
                .collect(),
            hub: self.hub.as_ref().map(|h| HubJson {
                branches: h
                    .branches
                    .iter()
                    .map(|&v| self.vertices[v].id.clone())
                    .collect(),
                l: h.multiplicity(),
            }),
            edge_mult: if self.edges.iter().all(|e| e.mult == 1) {
                Vec::new()
            } else {
                self.edges.iter().map(|e| e.mult).collect()
            },
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DualGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let json = DualGraphJson::deserialize(deserializer)?;
        let mut g = DualGraph::new(json.n).map_err(DeError::custom)?;
        let mut index = BTreeMap::new();
        for v in &json.vertices {
            let marks = MarkSet::from_marks(v.marks.iter().copied(), json.n)
                .map_err(DeError::custom)?;
            let i = g.add_vertex(&v.id, v.genus, marks).map_err(DeError::custom)?;
            index.insert(v.id.clone(), i);
        }
        if !json.edge_mult.is_empty() && json.edge_mult.len() != json.edges.len() {
            return Err(DeError::custom("edge_mult length differs from edges"));
        }
        for (i, [a, b]) in json.edges.iter().enumerate() {
            let a = *index
                .get(a)
                .ok_or_else(|| DeError::custom(format!("unknown vertex {:?}", a)))?;
            let b = *index
                .get(b)
                .ok_or_else(|| DeError::custom(format!("unknown vertex {:?}", b)))?;
            let mult = json.edge_mult.get(i).copied().unwrap_or(1);
            g.add_edge_mult(a, b, mult).map_err(DeError::custom)?;
        }
        if let Some(hub) = &json.hub {
            if hub.l as usize != hub.branches.len() {
                return Err(DeError::custom(format!(
                    "hub lists {} branches but l = {}",
                    hub.branches.len(),
                    hub.l
                )));
            }
            let branches: Result<Vec<usize>, _> = hub
                .branches
                .iter()
                .map(|id| {
                    index
                        .get(id)
                        .copied()
                        .ok_or_else(|| DeError::custom(format!("unknown vertex {:?}", id)))
                })
                .collect();
            g.set_hub(branches?).map_err(DeError::custom)?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(marks: &[u32], n: u32) -> MarkSet {
        MarkSet::from_marks(marks.iter().copied(), n).unwrap()
    }

    /// genus-1 vertex E (marks `e_marks`) joined to rational R (the rest).
    fn elliptic_tail(n: u32, e_marks: &[u32]) -> DualGraph {
        let mut g = DualGraph::new(n).unwrap();
        let e_set = ms(e_marks, n);
        let e = g.add_vertex("E", 1, e_set).unwrap();
        let r = g.add_vertex("R", 0, e_set.complement_in(n)).unwrap();
        g.add_edge(e, r).unwrap();
        g
    }

    #[test]
    fn genus_accounting() {
        // Single genus-one vertex with marks.
        let mut g = DualGraph::new(3).unwrap();
        g.add_vertex("E", 1, ms(&[1, 2, 3], 3)).unwrap();
        assert_eq!(g.arithmetic_genus().unwrap(), 1);

        // Banana: two rational vertices joined by two edges.
        let mut g = DualGraph::new(2).unwrap();
        let a = g.add_vertex("A", 0, ms(&[1], 2)).unwrap();
        let b = g.add_vertex("B", 0, ms(&[2], 2)).unwrap();
        g.add_edge(a, b).unwrap();
        g.add_edge(a, b).unwrap();
        assert_eq!(g.arithmetic_genus().unwrap(), 1);

        // Cuspidal: one rational vertex with a single-branch hub.
        let mut g = DualGraph::new(3).unwrap();
        let r = g.add_vertex("R", 0, ms(&[1, 2, 3], 3)).unwrap();
        g.set_hub(vec![r]).unwrap();
        assert_eq!(g.arithmetic_genus().unwrap(), 1);

        // Both branches of a two-branch hub on one vertex closes a cycle
        // through the elliptic point: genus 2, not a genus-one curve.
        let mut g = DualGraph::new(2).unwrap();
        let r = g.add_vertex("R", 0, ms(&[1, 2], 2)).unwrap();
        g.set_hub(vec![r, r]).unwrap();
        assert_eq!(g.arithmetic_genus().unwrap(), 2);
        assert!(matches!(
            g.validate_genus_one(),
            Err(Error::GenusNotOne { got: 2 })
        ));

        // Loop: self-node contributes one to b1.
        let mut g = DualGraph::new(2).unwrap();
        let a = g.add_vertex("A", 0, ms(&[1, 2], 2)).unwrap();
        g.add_edge(a, a).unwrap();
        assert_eq!(g.arithmetic_genus().unwrap(), 1);

        // Disconnected input is rejected.
        let mut g = DualGraph::new(2).unwrap();
        g.add_vertex("A", 1, ms(&[1], 2)).unwrap();
        g.add_vertex("B", 0, ms(&[2], 2)).unwrap();
        assert!(matches!(g.arithmetic_genus(), Err(Error::Disconnected)));
    }

    #[test]
    fn minimal_elliptic_subcurve_by_source() {
        // Genus-one vertex source.
        let g = elliptic_tail(3, &[]);
        let z = g.minimal_elliptic_subcurve().unwrap();
        assert_eq!(z.vertex_ids, BTreeSet::from([0]));
        assert!(!z.include_hub);

        // Cycle source with a tail: the three cycle vertices.
        let mut g = DualGraph::new(2).unwrap();
        let a = g.add_vertex("A", 0, ms(&[], 2)).unwrap();
        let b = g.add_vertex("B", 0, ms(&[1], 2)).unwrap();
        let c = g.add_vertex("C", 0, ms(&[], 2)).unwrap();
        let t = g.add_vertex("T", 0, ms(&[2], 2)).unwrap();
        g.add_edge(a, b).unwrap();
        g.add_edge(b, c).unwrap();
        g.add_edge(c, a).unwrap();
        g.add_edge(a, t).unwrap();
        let z = g.minimal_elliptic_subcurve().unwrap();
        assert_eq!(z.vertex_ids, BTreeSet::from([a, b, c]));

        // Hub source: branch vertices with the hub, tail excluded.
        let mut g = DualGraph::new(3).unwrap();
        let a = g.add_vertex("A", 0, ms(&[1], 3)).unwrap();
        let b = g.add_vertex("B", 0, ms(&[2], 3)).unwrap();
        let t = g.add_vertex("T", 0, ms(&[3], 3)).unwrap();
        g.add_edge(a, t).unwrap();
        g.set_hub(vec![a, b]).unwrap();
        let z = g.minimal_elliptic_subcurve().unwrap();
        assert_eq!(z.vertex_ids, BTreeSet::from([a, b]));
        assert!(z.include_hub);
    }

    #[test]
    fn levels() {
        // Unmarked genus-one tail: level 1; marked: level 2.
        let g = elliptic_tail(3, &[]);
        let z = g.minimal_elliptic_subcurve().unwrap();
        assert_eq!(g.level(&z).unwrap(), 1);
        let g = elliptic_tail(3, &[1]);
        let z = g.minimal_elliptic_subcurve().unwrap();
        assert_eq!(g.level(&z).unwrap(), 2);
        // Whole curve: level n.
        assert_eq!(g.level(&g.full_subcurve()).unwrap(), 3);
    }

    #[test]
    fn m_stability() {
        // Cuspidal model with three marks is 2-stable: core level 3 > 2.
        let mut g = DualGraph::new(3).unwrap();
        let r = g.add_vertex("R", 0, ms(&[1, 2, 3], 3)).unwrap();
        g.set_hub(vec![r]).unwrap();
        let report = is_m_stable(&g, 2).unwrap();
        assert!(report.stable, "{:?}", report.violations);

        // Genus-one tail with all marks on the rational side: {E} has
        // level 1 <= 2.
        let g = elliptic_tail(3, &[]);
        let report = is_m_stable(&g, 2).unwrap();
        assert!(!report.stable);
        assert!(report.violations[0].contains("level 1"));

        // Smooth genus-one vertex with n marks is m-stable for every m < n.
        let mut g = DualGraph::new(4).unwrap();
        g.add_vertex("E", 1, ms(&[1, 2, 3, 4], 4)).unwrap();
        for m in 0..4 {
            assert!(is_m_stable(&g, m).unwrap().stable);
        }

        // All-singleton hub: no branch vertex reaches three special points.
        let mut g = DualGraph::new(3).unwrap();
        let a = g.add_vertex("A", 0, ms(&[1], 3)).unwrap();
        let b = g.add_vertex("B", 0, ms(&[2], 3)).unwrap();
        let c = g.add_vertex("C", 0, ms(&[3], 3)).unwrap();
        g.set_hub(vec![a, b, c]).unwrap();
        let report = is_m_stable(&g, 3).unwrap();
        assert!(!report.stable);
    }

    #[test]
    fn stability_is_monotone_in_level_condition() {
        // Level condition for m implies it for every m' <= m.
        let graphs = [elliptic_tail(4, &[1]), elliptic_tail(4, &[1, 2])];
        for g in &graphs {
            let levels: Vec<u32> = g
                .genus_one_subcurves()
                .unwrap()
                .iter()
                .map(|sub| g.level(sub).unwrap())
                .collect();
            for m in 0..4u32 {
                let ok_m = levels.iter().all(|&l| l > m);
                for mp in 0..=m {
                    let ok_mp = levels.iter().all(|&l| l > mp);
                    assert!(!ok_m || ok_mp);
                }
            }
        }
    }

    #[test]
    fn combinatorial_types() {
        // Hub joining a {1,2}-tail and a {3}-tail.
        let mut g = DualGraph::new(3).unwrap();
        let a = g.add_vertex("A", 0, ms(&[1, 2], 3)).unwrap();
        let b = g.add_vertex("B", 0, ms(&[3], 3)).unwrap();
        g.set_hub(vec![a, b]).unwrap();
        let t = g.combinatorial_type().unwrap();
        assert_eq!(t.to_string(), "{{1,2},{3}}");

        // Hub of multiplicity n on n singleton vertices.
        let mut g = DualGraph::new(3).unwrap();
        let vs: Vec<usize> = (1..=3)
            .map(|i| g.add_vertex(&format!("V{}", i), 0, ms(&[i], 3)).unwrap())
            .collect();
        g.set_hub(vs).unwrap();
        let t = g.combinatorial_type().unwrap();
        assert_eq!(t.to_string(), "{{1},{2},{3}}");

        // No hub: the type is undefined.
        let g = elliptic_tail(3, &[]);
        assert!(matches!(g.combinatorial_type(), Err(Error::NoHub)));
    }

    #[test]
    fn minimal_subcurve_matches_brute_force() {
        // Oracle: enumerate all connected genus-one subcurves without a
        // disconnecting internal edge and check there is exactly one.
        let mut graphs = vec![elliptic_tail(3, &[]), elliptic_tail(4, &[1, 2])];
        let mut g = DualGraph::new(3).unwrap();
        let a = g.add_vertex("A", 0, ms(&[1], 3)).unwrap();
        let b = g.add_vertex("B", 0, ms(&[2, 3], 3)).unwrap();
        let t = g.add_vertex("T", 0, ms(&[], 3)).unwrap();
        g.add_edge(a, b).unwrap();
        g.add_edge(b, t).unwrap();
        g.add_edge(t, a).unwrap();
        graphs.push(g);
        let mut g = DualGraph::new(4).unwrap();
        let a = g.add_vertex("A", 0, ms(&[1, 2], 4)).unwrap();
        let b = g.add_vertex("B", 0, ms(&[3], 4)).unwrap();
        let t = g.add_vertex("T", 0, ms(&[4], 4)).unwrap();
        g.add_edge(a, t).unwrap();
        g.set_hub(vec![a, b]).unwrap();
        graphs.push(g);

        for g in &graphs {
            let computed = g.minimal_elliptic_subcurve().unwrap();
            let candidates: Vec<Subcurve> = g
                .genus_one_subcurves()
                .unwrap()
                .into_iter()
                .filter(|sub| {
                    // No internal edge whose removal disconnects the subcurve.
                    for (i, e) in g.edges().iter().enumerate() {
                        let _ = i;
                        if sub.vertex_ids.contains(&e.a) && sub.vertex_ids.contains(&e.b) {
                            let mut trimmed = g.clone();
                            trimmed.edges.remove(
                                trimmed
                                    .edges
                                    .iter()
                                    .position(|f| f == e)
                                    .expect("edge present"),
                            );
                            if !trimmed.is_subcurve_connected(sub) {
                                return false;
                            }
                        }
                    }
                    true
                })
                .collect();
            assert_eq!(candidates.len(), 1, "graph {:?}", g);
            assert_eq!(candidates[0], computed);
        }
    }

    #[test]
    fn json_round_trip() {
        let mut g = DualGraph::new(3).unwrap();
        let a = g.add_vertex("a", 0, ms(&[1, 2], 3)).unwrap();
        let b = g.add_vertex("b", 0, ms(&[3], 3)).unwrap();
        g.add_edge_mult(a, b, 2).unwrap();
        g.set_hub(vec![a, b]).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        let back: DualGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(g, back);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
