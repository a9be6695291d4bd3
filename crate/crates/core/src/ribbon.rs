//! Faces, genus and broken faces of ribbon graphs.
//!
//! Faces are the cycles of σ∘α on half-edges, where σ moves to the next
//! port of the same vertex and α swaps the two ends of an internal edge
//! while fixing external half-edges.

use serde::Serialize;

use crate::graph::{insert, FeynmanGraph, GluingData, GraphError, PortRef, Slot};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceTrace {
    /// Each face as the cyclic sequence of half-edges it visits, starting
    /// from its smallest half-edge.
    pub faces: Vec<Vec<PortRef>>,
    /// Indices into `faces` of the faces carrying at least one external leg.
    pub broken: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TopologyReport {
    #[serde(rename = "V")]
    pub vertices: usize,
    #[serde(rename = "I")]
    pub internal: usize,
    #[serde(rename = "E")]
    pub external: usize,
    #[serde(rename = "F")]
    pub faces: usize,
    #[serde(rename = "B")]
    pub broken: usize,
    pub g: usize,
}

pub fn trace_faces(graph: &FeynmanGraph) -> Result<FaceTrace, GraphError> {
    let inc = graph.incidence()?;
    let offsets = graph.dart_offsets();
    let mut seen = vec![false; graph.port_count()];
    let mut faces = Vec::new();
    let mut broken = Vec::new();
    for v in 0..graph.vertices.len() {
        for p in 0..graph.vertices[v].valence {
            if seen[offsets[v] + p] {
                continue;
            }
            let start = PortRef::new(v, p);
            let mut face = Vec::new();
            let mut has_leg = false;
            let mut h = start;
            loop {
                seen[offsets[h.vertex] + h.port] = true;
                face.push(h);
                let next = match inc.slot(h) {
                    Slot::Internal { edge, end } => graph.internal[edge].ends[1 - end],
                    Slot::External { .. } => {
                        has_leg = true;
                        h
                    }
                };
                h = PortRef::new(next.vertex, (next.port + 1) % graph.vertices[next.vertex].valence);
                if h == start {
                    break;
                }
            }
            if has_leg {
                broken.push(faces.len());
            }
            faces.push(face);
        }
    }
    Ok(FaceTrace { faces, broken })
}

/// Topology of a connected graph.
pub fn topology(graph: &FeynmanGraph) -> Result<TopologyReport, GraphError> {
    if !graph.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let trace = trace_faces(graph)?;
    let (v, i, f) = (graph.vertex_count(), graph.internal_count(), trace.faces.len());
    let twice = 2 + i as isize - v as isize - f as isize;
    if twice < 0 || twice % 2 != 0 {
        return Err(GraphError::CorruptRotation(format!(
            "Euler characteristic gives genus {twice}/2"
        )));
    }
    Ok(TopologyReport {
        vertices: v,
        internal: i,
        external: graph.external_count(),
        faces: f,
        broken: trace.broken.len(),
        g: (twice / 2) as usize,
    })
}

/// Topology of each connected component, in component order.
pub fn topology_per_component(graph: &FeynmanGraph) -> Result<Vec<TopologyReport>, GraphError> {
    graph.split_components().iter().map(topology).collect()
}

pub fn genus(graph: &FeynmanGraph) -> Result<usize, GraphError> {
    topology(graph).map(|t| t.g)
}

/// Genus zero with exactly one broken face.
pub fn is_planar_regular(graph: &FeynmanGraph) -> Result<bool, GraphError> {
    let t = topology(graph)?;
    Ok(t.g == 0 && t.broken == 1)
}

/// Divergent in the Grosse–Wulkenhaar model: planar regular with two or
/// four external legs.
pub fn is_gw_divergent(graph: &FeynmanGraph) -> Result<bool, GraphError> {
    if !graph.is_one_particle_irreducible() {
        return Err(GraphError::NotOnePi);
    }
    let e = graph.external_count();
    Ok((e == 2 || e == 4) && is_planar_regular(graph)?)
}

/// External leg indices in the order their half-edges are met along the
/// single broken face, or `None` when the graph has several broken faces.
pub fn boundary_legs(graph: &FeynmanGraph) -> Result<Option<Vec<usize>>, GraphError> {
    let inc = graph.incidence()?;
    let trace = trace_faces(graph)?;
    if trace.broken.len() != 1 {
        return Ok(None);
    }
    let legs = trace.faces[trace.broken[0]]
        .iter()
        .filter_map(|&h| match inc.slot(h) {
            Slot::External { leg } => Some(leg),
            Slot::Internal { .. } => None,
        })
        .collect();
    Ok(Some(legs))
}

/// Genus gained by an insertion beyond the genera of host and guest:
/// `g(γ₀) - g(γ₁) - g(γ₂)`. Zero for gluings that respect the cyclic order.
pub fn insertion_defect(host: &FeynmanGraph, guest: &FeynmanGraph, gluing: &GluingData) -> Result<usize, GraphError> {
    let n = genus_change(host, guest, gluing)?;
    usize::try_from(n).map_err(|_| {
        GraphError::CorruptRotation(format!("insertion lowered the genus by {}", -n))
    })
}

/// Signed form of [`insertion_defect`]. The guest must be regular.
pub fn genus_change(host: &FeynmanGraph, guest: &FeynmanGraph, gluing: &GluingData) -> Result<i64, GraphError> {
    if topology(guest)?.broken != 1 {
        return Err(GraphError::NotRegular);
    }
    let result = insert(host, guest, gluing)?;
    Ok(genus(&result)? as i64 - genus(host)? as i64 - genus(guest)? as i64)
}
