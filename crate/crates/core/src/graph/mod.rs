//! Feynman graphs with ordered ports.
//!
//! A vertex owns a fixed number of ports (four for φ⁴). Every port carries
//! exactly one half-edge: either one end of an internal edge or an external
//! leg. The stored port order doubles as the rotation system of the ribbon
//! graph, so a single data model serves the commutative and the
//! noncommutative theories.

mod canon;
mod subgraph;
mod surgery;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

pub use canon::{canonical_key, commutative_key, key_of, CanonicalKey, KeyKind};
pub use subgraph::{
    divergent_subgraphs, is_superficially_divergent, proper_subgraphs, subgraphs, SubgraphClass,
    SubgraphSel, Theory,
};
pub(crate) use subgraph::for_each_selection;
pub use surgery::{
    contract, contract_to_vertices, enumerate_all_gluings, enumerate_gluings, extract, insert,
    insert_with_image, is_order_respecting, shrink, GluingData, ShrinkRule, Site,
};

/// Valence of every vertex in φ⁴ theory.
pub const PHI4_VALENCE: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is not one-particle irreducible")]
    NotOnePi,
    #[error("subgraph component with {0} external legs cannot be shrunk")]
    NotDivergent(usize),
    #[error("selection is not a proper non-empty subgraph")]
    ImproperSelection,
    #[error("edge index {0} out of range")]
    BadEdge(usize),
    #[error("vertex index {0} out of range")]
    BadVertex(usize),
    #[error("guest has {guest} external legs but the site takes {site}")]
    ArityMismatch { guest: usize, site: usize },
    #[error("gluing is not a bijection onto the site")]
    InvalidGluing,
    #[error("guest is not a regular ribbon graph")]
    NotRegular,
    #[error("shrinking would leave a closed loop without vertices")]
    VertexlessLoop,
    #[error("too many internal edges for exhaustive enumeration ({0})")]
    TooLarge(usize),
    #[error("rotation system is corrupt: {0}")]
    CorruptRotation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortRef {
    pub vertex: usize,
    pub port: usize,
}

impl PortRef {
    pub fn new(vertex: usize, port: usize) -> Self {
        PortRef { vertex, port }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}.{}", self.vertex, self.port)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub valence: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalEdge {
    pub label: String,
    pub ends: [PortRef; 2],
}

impl InternalEdge {
    pub fn is_self_loop(&self) -> bool {
        self.ends[0].vertex == self.ends[1].vertex
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalLeg {
    pub label: String,
    pub at: PortRef,
}

/// What sits on a port of a structurally valid graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// End `end` (0 or 1) of internal edge `edge`.
    Internal { edge: usize, end: usize },
    External { leg: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeynmanGraph {
    pub name: Option<String>,
    pub vertices: Vec<Vertex>,
    pub internal: Vec<InternalEdge>,
    pub external: Vec<ExternalLeg>,
}

impl FeynmanGraph {
    pub fn new(name: Option<&str>) -> Self {
        FeynmanGraph {
            name: name.map(str::to_owned),
            ..Default::default()
        }
    }

    /// The empty graph, i.e. the unit of the algebra.
    pub fn unit() -> Self {
        FeynmanGraph::default()
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_owned());
        self
    }

    pub fn add_vertex(&mut self) -> usize {
        self.add_vertex_with_valence(PHI4_VALENCE)
    }

    pub fn add_vertex_with_valence(&mut self, valence: usize) -> usize {
        let index = self.vertices.len();
        self.vertices.push(Vertex {
            name: format!("v{index}"),
            valence,
        });
        index
    }

    pub fn add_edge(&mut self, a: (usize, usize), b: (usize, usize)) -> usize {
        let index = self.internal.len();
        self.internal.push(InternalEdge {
            label: format!("e{}", index + 1),
            ends: [PortRef::new(a.0, a.1), PortRef::new(b.0, b.1)],
        });
        index
    }

    pub fn add_external(&mut self, label: &str, at: (usize, usize)) -> usize {
        let index = self.external.len();
        self.external.push(ExternalLeg {
            label: label.to_owned(),
            at: PortRef::new(at.0, at.1),
        });
        index
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn internal_count(&self) -> usize {
        self.internal.len()
    }

    pub fn external_count(&self) -> usize {
        self.external.len()
    }

    pub fn is_unit(&self) -> bool {
        self.vertices.is_empty() && self.internal.is_empty() && self.external.is_empty()
    }

    /// Total number of ports, i.e. half-edges.
    pub fn port_count(&self) -> usize {
        self.vertices.iter().map(|v| v.valence).sum()
    }

    /// Offset of each vertex in the flat half-edge numbering.
    pub(crate) fn dart_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.vertices.len() + 1);
        let mut acc = 0;
        for v in &self.vertices {
            offsets.push(acc);
            acc += v.valence;
        }
        offsets.push(acc);
        offsets
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    /// Port occupancy table. Fails unless the graph is structurally valid
    /// (every port carries exactly one half-edge); the φ⁴ valence rule is
    /// not required here.
    pub fn incidence(&self) -> Result<Incidence, GraphError> {
        let report = self.validate();
        if !report.is_structurally_valid() {
            return Err(GraphError::Invalid(report.summary()));
        }
        let mut slots: Vec<Vec<Option<Slot>>> =
            self.vertices.iter().map(|v| vec![None; v.valence]).collect();
        for (i, e) in self.internal.iter().enumerate() {
            for (end, p) in e.ends.iter().enumerate() {
                slots[p.vertex][p.port] = Some(Slot::Internal { edge: i, end });
            }
        }
        for (i, leg) in self.external.iter().enumerate() {
            slots[leg.at.vertex][leg.at.port] = Some(Slot::External { leg: i });
        }
        let slots = slots
            .into_iter()
            .map(|ports| ports.into_iter().map(|s| s.expect("validated")).collect())
            .collect();
        Ok(Incidence { slots })
    }

    /// Loop number `I - V + C`.
    pub fn loop_number(&self) -> usize {
        let c = self.components().len();
        (self.internal.len() + c) - self.vertices.len()
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components_with(self.vertices.len(), self.internal.iter().map(|e| e.ends))
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Connected and free of bridges among the internal edges.
    pub fn is_one_particle_irreducible(&self) -> bool {
        if !self.is_connected() {
            return false;
        }
        (0..self.internal.len()).all(|skip| {
            if self.internal[skip].is_self_loop() {
                return true;
            }
            let rest = self
                .internal
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, e)| e.ends);
            components_with(self.vertices.len(), rest).len() == 1
        })
    }

    /// Splits the graph into its connected components, each a standalone
    /// graph. External labels are kept.
    pub fn split_components(&self) -> Vec<FeynmanGraph> {
        let comps = self.components();
        if comps.len() == 1 {
            return vec![self.clone()];
        }
        let mut owner = vec![(0usize, 0usize); self.vertices.len()];
        let mut parts: Vec<FeynmanGraph> = Vec::with_capacity(comps.len());
        for (ci, comp) in comps.iter().enumerate() {
            let mut g = FeynmanGraph::new(self.name.as_deref());
            for (local, &v) in comp.iter().enumerate() {
                owner[v] = (ci, local);
                g.vertices.push(Vertex {
                    name: self.vertices[v].name.clone(),
                    valence: self.vertices[v].valence,
                });
            }
            parts.push(g);
        }
        let remap = |p: PortRef| PortRef::new(owner[p.vertex].1, p.port);
        for e in &self.internal {
            let ci = owner[e.ends[0].vertex].0;
            parts[ci].internal.push(InternalEdge {
                label: e.label.clone(),
                ends: [remap(e.ends[0]), remap(e.ends[1])],
            });
        }
        for leg in &self.external {
            let ci = owner[leg.at.vertex].0;
            parts[ci].external.push(ExternalLeg {
                label: leg.label.clone(),
                at: remap(leg.at),
            });
        }
        parts
    }

    /// Disjoint union. External labels of `other` are suffixed where they
    /// clash with labels of `self`.
    pub fn disjoint_union(&self, other: &FeynmanGraph) -> FeynmanGraph {
        let mut g = self.clone();
        let shift = g.vertices.len();
        let taken: HashSet<&str> = self.external.iter().map(|l| l.label.as_str()).collect();
        for v in &other.vertices {
            let idx = g.vertices.len();
            g.vertices.push(Vertex {
                name: format!("v{idx}"),
                valence: v.valence,
            });
        }
        let shifted = |p: PortRef| PortRef::new(p.vertex + shift, p.port);
        for e in &other.internal {
            let idx = g.internal.len();
            g.internal.push(InternalEdge {
                label: format!("e{}", idx + 1),
                ends: [shifted(e.ends[0]), shifted(e.ends[1])],
            });
        }
        for leg in &other.external {
            let mut label = leg.label.clone();
            while taken.contains(label.as_str())
                || g.external.iter().any(|l| l.label == label)
            {
                label.push('_');
            }
            g.external.push(ExternalLeg {
                label,
                at: shifted(leg.at),
            });
        }
        g
    }
}

/// Port occupancy of a structurally valid graph.
#[derive(Debug, Clone)]
pub struct Incidence {
    slots: Vec<Vec<Slot>>,
}

impl Incidence {
    pub fn slot(&self, p: PortRef) -> Slot {
        self.slots[p.vertex][p.port]
    }

    pub fn ports(&self, vertex: usize) -> &[Slot] {
        &self.slots[vertex]
    }

    /// The port at the other end of an internal edge, if any.
    pub fn opposite(&self, graph: &FeynmanGraph, p: PortRef) -> Option<PortRef> {
        match self.slot(p) {
            Slot::Internal { edge, end } => Some(graph.internal[edge].ends[1 - end]),
            Slot::External { .. } => None,
        }
    }
}

pub(crate) fn components_with(
    vertex_count: usize,
    edges: impl Iterator<Item = [PortRef; 2]>,
) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..vertex_count).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for [a, b] in edges {
        let ra = find(&mut parent, a.vertex);
        let rb = find(&mut parent, b.vertex);
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index_of_root = vec![usize::MAX; vertex_count];
    for v in 0..vertex_count {
        let r = find(&mut parent, v);
        if index_of_root[r] == usize::MAX {
            index_of_root[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index_of_root[r]].push(v);
    }
    groups
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnoccupiedPort(PortRef),
    PortReused { port: PortRef, count: usize },
    UnknownVertex { edge: String, vertex: usize },
    PortOutOfRange { edge: String, port: PortRef },
    DuplicateExternalLabel(String),
    NonQuarticVertex { vertex: usize, valence: usize },
    CountMismatch { ports: usize, internal: usize, external: usize },
}

impl Violation {
    /// Violations that break the half-edge structure itself, as opposed to
    /// the φ⁴ valence rule.
    pub fn is_structural(&self) -> bool {
        !matches!(self, Violation::NonQuarticVertex { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnoccupiedPort(p) => write!(f, "port {} of v{} unoccupied", p.port, p.vertex),
            Violation::PortReused { port, count } => write!(
                f,
                "port {} of v{} reused ({count} half-edges)",
                port.port, port.vertex
            ),
            Violation::UnknownVertex { edge, vertex } => {
                write!(f, "{edge} refers to missing vertex v{vertex}")
            }
            Violation::PortOutOfRange { edge, port } => {
                write!(f, "{edge} refers to port {} beyond the valence of v{}", port.port, port.vertex)
            }
            Violation::DuplicateExternalLabel(l) => write!(f, "duplicate external label {l}"),
            Violation::NonQuarticVertex { vertex, valence } => {
                write!(f, "v{vertex} has valence {valence}, expected 4")
            }
            Violation::CountMismatch {
                ports,
                internal,
                external,
            } => write!(
                f,
                "counting identity fails: {ports} ports but 2I + E = {}",
                2 * internal + external
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub vertices: usize,
    pub internal: usize,
    pub external: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_structurally_valid(&self) -> bool {
        self.violations.iter().all(|v| !v.is_structural())
    }

    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub fn validate(graph: &FeynmanGraph) -> ValidationReport {
    let mut violations = Vec::new();
    let mut counts: Vec<Vec<usize>> = graph.vertices.iter().map(|v| vec![0; v.valence]).collect();

    let mut occupy = |owner: &str, p: PortRef, violations: &mut Vec<Violation>| {
        if p.vertex >= graph.vertices.len() {
            violations.push(Violation::UnknownVertex {
                edge: owner.to_owned(),
                vertex: p.vertex,
            });
        } else if p.port >= graph.vertices[p.vertex].valence {
            violations.push(Violation::PortOutOfRange {
                edge: owner.to_owned(),
                port: p,
            });
        } else {
            counts[p.vertex][p.port] += 1;
        }
    };
    for e in &graph.internal {
        for p in e.ends {
            occupy(&e.label, p, &mut violations);
        }
    }
    for leg in &graph.external {
        occupy(&leg.label, leg.at, &mut violations);
    }
    for (v, ports) in counts.iter().enumerate() {
        for (p, &count) in ports.iter().enumerate() {
            let port = PortRef::new(v, p);
            match count {
                0 => violations.push(Violation::UnoccupiedPort(port)),
                1 => {}
                _ => violations.push(Violation::PortReused { port, count }),
            }
        }
    }
    let mut seen = HashSet::new();
    for leg in &graph.external {
        if !seen.insert(leg.label.as_str()) {
            violations.push(Violation::DuplicateExternalLabel(leg.label.clone()));
        }
    }
    for (v, vert) in graph.vertices.iter().enumerate() {
        if vert.valence != PHI4_VALENCE {
            violations.push(Violation::NonQuarticVertex {
                vertex: v,
                valence: vert.valence,
            });
        }
    }
    let ports = graph.port_count();
    if ports != 2 * graph.internal.len() + graph.external.len() {
        violations.push(Violation::CountMismatch {
            ports,
            internal: graph.internal.len(),
            external: graph.external.len(),
        });
    }
    ValidationReport {
        vertices: graph.vertices.len(),
        internal: graph.internal.len(),
        external: graph.external.len(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixture_counts() {
        let b = fixtures::bubble().validate();
        assert!(b.is_valid());
        assert_eq!((b.vertices, b.internal, b.external), (2, 2, 4));
        let c = fixtures::chain().validate();
        assert!(c.is_valid());
        assert_eq!((c.vertices, c.internal, c.external), (3, 4, 4));
        assert_eq!(4 * c.vertices, 2 * c.internal + c.external);
    }

    #[test]
    fn unoccupied_port_is_reported() {
        let mut g = FeynmanGraph::new(None);
        g.add_vertex();
        g.add_edge((0, 0), (0, 1));
        g.add_external("f1", (0, 2));
        let report = g.validate();
        assert!(!report.is_valid());
        let messages: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        assert!(messages.contains(&"port 3 of v0 unoccupied".to_owned()), "{messages:?}");
    }

    #[test]
    fn reused_port_and_duplicate_label() {
        let mut g = FeynmanGraph::new(None);
        g.add_vertex();
        g.add_edge((0, 0), (0, 0));
        g.add_external("f", (0, 1));
        g.add_external("f", (0, 2));
        g.add_external("g", (0, 3));
        let report = g.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::PortReused { count: 2, .. })));
        assert!(report
            .violations
            .contains(&Violation::DuplicateExternalLabel("f".into())));
    }

    #[test]
    fn loop_numbers() {
        assert_eq!(fixtures::tadpole_p().loop_number(), 1);
        assert_eq!(fixtures::chain().loop_number(), 2);
        let b = fixtures::bubble();
        assert_eq!(b.disjoint_union(&b).loop_number(), 2);
    }

    #[test]
    fn one_particle_irreducibility() {
        assert!(fixtures::bubble().is_one_particle_irreducible());
        assert!(fixtures::tadpole_p().is_one_particle_irreducible());
        let mut g = FeynmanGraph::new(None);
        g.add_vertex();
        g.add_vertex();
        g.add_edge((0, 0), (1, 0));
        for (i, (v, p)) in [(0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3)].into_iter().enumerate() {
            g.add_external(&format!("f{i}"), (v, p));
        }
        assert!(g.validate().is_valid());
        assert!(!g.is_one_particle_irreducible());
    }

    #[test]
    fn split_and_union_round_trip() {
        let u = fixtures::bubble().disjoint_union(&fixtures::tadpole_p());
        assert!(u.validate().is_valid());
        let parts = u.split_components();
        assert_eq!(parts.len(), 2);
        assert_eq!(canonical_key(&parts[0]), canonical_key(&fixtures::bubble()));
        assert_eq!(canonical_key(&parts[1]), canonical_key(&fixtures::tadpole_p()));
    }
}
