//! Contraction, extraction and insertion.
//!
//! All surgery runs on a flat half-edge ("dart") representation: each vertex
//! is a rotation-ordered list of darts and each dart has a partner, either
//! another dart or an external label. Shrinking and gluing only rewire
//! partners and regroup darts, and the result is rebuilt into a
//! [`FeynmanGraph`] in a deterministic order.

use std::collections::HashSet;

use super::{canonical_key, FeynmanGraph, GraphError, Incidence, PortRef, Slot, SubgraphSel, Vertex};
use crate::ribbon;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Partner {
    Dart(usize),
    Ext(String),
}

#[derive(Debug, Clone)]
struct Darts {
    rotations: Vec<Option<Vec<usize>>>,
    partner: Vec<Option<Partner>>,
}

impl Darts {
    fn from_graph(graph: &FeynmanGraph, inc: &Incidence) -> (Darts, Vec<usize>) {
        let offsets = graph.dart_offsets();
        let total = *offsets.last().unwrap();
        let mut partner = vec![None; total];
        let mut rotations = Vec::with_capacity(graph.vertices.len());
        for (v, vert) in graph.vertices.iter().enumerate() {
            rotations.push(Some((offsets[v]..offsets[v] + vert.valence).collect()));
            for (p, slot) in inc.ports(v).iter().enumerate() {
                partner[offsets[v] + p] = Some(match *slot {
                    Slot::Internal { edge, end } => {
                        let o = graph.internal[edge].ends[1 - end];
                        Partner::Dart(offsets[o.vertex] + o.port)
                    }
                    Slot::External { leg } => Partner::Ext(graph.external[leg].label.clone()),
                });
            }
        }
        (Darts { rotations, partner }, offsets)
    }

    /// Appends `graph` as a disjoint block; returns its dart offsets.
    fn append(&mut self, graph: &FeynmanGraph, inc: &Incidence) -> Vec<usize> {
        let base = self.partner.len();
        let (block, offsets) = Darts::from_graph(graph, inc);
        let shift = |p: Partner| match p {
            Partner::Dart(d) => Partner::Dart(d + base),
            ext => ext,
        };
        self.partner
            .extend(block.partner.into_iter().map(|p| p.map(shift)));
        self.rotations.extend(
            block
                .rotations
                .into_iter()
                .map(|r| r.map(|ds| ds.into_iter().map(|d| d + base).collect())),
        );
        offsets.into_iter().map(|o| o + base).collect()
    }

    fn link(&mut self, a: usize, b: usize) {
        self.partner[a] = Some(Partner::Dart(b));
        self.partner[b] = Some(Partner::Dart(a));
    }

    fn partner(&self, d: usize) -> &Partner {
        self.partner[d].as_ref().expect("live dart")
    }

    /// Rebuilds a graph. Vertices keep their relative order; internal edges
    /// are numbered by first occurrence while scanning vertices and ports.
    /// Returns the new position of every live dart.
    fn into_graph(self, name: Option<&str>) -> (FeynmanGraph, Vec<Option<PortRef>>) {
        let mut pos: Vec<Option<PortRef>> = vec![None; self.partner.len()];
        let mut g = FeynmanGraph::new(name);
        for ds in self.rotations.iter().flatten() {
            let v = g.vertices.len();
            g.vertices.push(Vertex {
                name: format!("v{v}"),
                valence: ds.len(),
            });
            for (p, &d) in ds.iter().enumerate() {
                pos[d] = Some(PortRef::new(v, p));
            }
        }
        let mut done = vec![false; self.partner.len()];
        for ds in self.rotations.iter().flatten() {
            for &d in ds {
                match self.partner(d) {
                    Partner::Dart(o) => {
                        if !done[d] {
                            done[d] = true;
                            done[*o] = true;
                            g.add_edge(
                                pos[d].map(|p| (p.vertex, p.port)).unwrap(),
                                pos[*o].map(|p| (p.vertex, p.port)).expect("partner is live"),
                            );
                        }
                    }
                    Partner::Ext(label) => {
                        let p = pos[d].unwrap();
                        g.add_external(label, (p.vertex, p.port));
                    }
                }
            }
        }
        (g, pos)
    }
}

/// How components of a selection are shrunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShrinkRule {
    /// Two-leg components become an edge, four-leg components a vertex.
    Renormalization,
    /// Every component becomes a single vertex of matching valence.
    Vertex,
}

/// Cograph Γ/γ for a proper selection whose components are 1PI with two or
/// four external legs.
pub fn contract(graph: &FeynmanGraph, sel: &SubgraphSel) -> Result<FeynmanGraph, GraphError> {
    if !sel.is_proper(graph) {
        return Err(GraphError::ImproperSelection);
    }
    for comp in sel.components(graph) {
        let e = comp.external_count(graph);
        if (e != 2 && e != 4) || !extract(graph, &comp).is_one_particle_irreducible() {
            return Err(GraphError::NotDivergent(e));
        }
    }
    shrink(graph, sel, ShrinkRule::Renormalization)
}

/// Cograph in which every component of a proper selection collapses to one
/// vertex.
pub fn contract_to_vertices(graph: &FeynmanGraph, sel: &SubgraphSel) -> Result<FeynmanGraph, GraphError> {
    if !sel.is_proper(graph) {
        return Err(GraphError::ImproperSelection);
    }
    shrink(graph, sel, ShrinkRule::Vertex)
}

/// Shrinks every component of `sel` without checking divergence or
/// properness. A component that is an entire connected component of
/// `graph` disappears (it contributes the unit).
///
/// The ports of a new vertex follow the external half-edges of the
/// component along its boundary when the component has a single broken
/// face, which makes shrinking inverse to order-respecting insertion.
pub fn shrink(graph: &FeynmanGraph, sel: &SubgraphSel, rule: ShrinkRule) -> Result<FeynmanGraph, GraphError> {
    let inc = graph.incidence()?;
    let (mut darts, offsets) = Darts::from_graph(graph, &inc);
    let dart = |p: PortRef| offsets[p.vertex] + p.port;
    for comp in sel.components(graph) {
        let mut inside = HashSet::new();
        for &e in comp.edges() {
            for p in graph.internal[e].ends {
                inside.insert(dart(p));
            }
        }
        let outer: Vec<usize> = comp
            .vertices()
            .iter()
            .flat_map(|&v| (0..graph.vertices[v].valence).map(move |p| (v, p)))
            .map(|(v, p)| offsets[v] + p)
            .filter(|d| !inside.contains(d))
            .collect();
        for &v in comp.vertices() {
            darts.rotations[v] = None;
        }
        for &d in &inside {
            darts.partner[d] = None;
        }
        let whole = outer
            .iter()
            .all(|&d| matches!(darts.partner(d), Partner::Ext(_)));
        if whole {
            for &d in &outer {
                darts.partner[d] = None;
            }
            continue;
        }
        match (rule, outer.len()) {
            (ShrinkRule::Renormalization, 2) => {
                let (h1, h2) = (outer[0], outer[1]);
                let p1 = darts.partner(h1).clone();
                let p2 = darts.partner(h2).clone();
                darts.partner[h1] = None;
                darts.partner[h2] = None;
                match (p1, p2) {
                    (Partner::Dart(a), _) if a == h2 => return Err(GraphError::VertexlessLoop),
                    (Partner::Dart(a), Partner::Dart(b)) => darts.link(a, b),
                    (Partner::Ext(l), Partner::Dart(b)) | (Partner::Dart(b), Partner::Ext(l)) => {
                        darts.partner[b] = Some(Partner::Ext(l));
                    }
                    (Partner::Ext(_), Partner::Ext(_)) => unreachable!("handled as whole component"),
                }
            }
            (ShrinkRule::Renormalization, 4) | (ShrinkRule::Vertex, _) => {
                let order = boundary_order(graph, &inc, &comp, &outer, &offsets);
                darts.rotations.push(Some(order));
            }
            (ShrinkRule::Renormalization, n) => return Err(GraphError::NotDivergent(n)),
        }
    }
    let (g, _) = darts.into_graph(None);
    Ok(g)
}

/// Outer darts of a component in the order met along its boundary, when
/// they all lie on one face; otherwise in index order.
fn boundary_order(
    graph: &FeynmanGraph,
    inc: &Incidence,
    comp: &SubgraphSel,
    outer: &[usize],
    offsets: &[usize],
) -> Vec<usize> {
    let flat = |p: PortRef| offsets[p.vertex] + p.port;
    let step = |p: PortRef| -> PortRef {
        // α restricted to the component, then σ
        let q = match inc.slot(p) {
            Slot::Internal { edge, end } if comp.contains_edge(edge) => graph.internal[edge].ends[1 - end],
            _ => p,
        };
        PortRef::new(q.vertex, (q.port + 1) % graph.vertices[q.vertex].valence)
    };
    let start = outer[0];
    let start_port = comp
        .vertices()
        .iter()
        .find_map(|&v| {
            let o = offsets[v];
            (o..o + graph.vertices[v].valence)
                .contains(&start)
                .then(|| PortRef::new(v, start - o))
        })
        .unwrap();
    let outer_set: HashSet<usize> = outer.iter().copied().collect();
    let mut seq = vec![start];
    let mut p = step(start_port);
    while flat(p) != start {
        if outer_set.contains(&flat(p)) {
            seq.push(flat(p));
        }
        p = step(p);
    }
    if seq.len() == outer.len() {
        seq
    } else {
        outer.to_vec()
    }
}

/// The truncated subgraph as a standalone graph. Hooked vertices keep their
/// relative order and ports; free ports become legs `f1, f2, …` in port
/// order.
pub fn extract(graph: &FeynmanGraph, sel: &SubgraphSel) -> FeynmanGraph {
    let mut local = vec![usize::MAX; graph.vertices.len()];
    let mut g = FeynmanGraph::new(None);
    for (i, &v) in sel.vertices().iter().enumerate() {
        local[v] = i;
        g.vertices.push(Vertex {
            name: format!("v{i}"),
            valence: graph.vertices[v].valence,
        });
    }
    let mut used = HashSet::new();
    for &e in sel.edges() {
        let [a, b] = graph.internal[e].ends;
        used.insert(a);
        used.insert(b);
        g.internal.push(super::InternalEdge {
            label: graph.internal[e].label.clone(),
            ends: [
                PortRef::new(local[a.vertex], a.port),
                PortRef::new(local[b.vertex], b.port),
            ],
        });
    }
    let mut k = 0;
    for &v in sel.vertices() {
        for p in 0..graph.vertices[v].valence {
            if !used.contains(&PortRef::new(v, p)) {
                k += 1;
                g.add_external(&format!("f{k}"), (local[v], p));
            }
        }
    }
    g
}

/// Where a guest graph is inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    /// Replace a vertex by a guest with as many legs as the vertex has ports.
    Vertex(usize),
    /// Splice a two-leg guest into an internal edge.
    Edge(usize),
}

/// Gluing data: `assignment[k]` is the host port (vertex site) or edge end
/// (edge site, 0 or 1) receiving the guest's external leg `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GluingData {
    pub site: Site,
    pub assignment: Vec<usize>,
}

impl GluingData {
    pub fn new(site: Site, assignment: Vec<usize>) -> Self {
        GluingData { site, assignment }
    }
}

fn site_arity(host: &FeynmanGraph, site: Site) -> Result<usize, GraphError> {
    match site {
        Site::Vertex(v) => host
            .vertices
            .get(v)
            .map(|vert| vert.valence)
            .ok_or(GraphError::BadVertex(v)),
        Site::Edge(e) => {
            if e < host.internal.len() {
                Ok(2)
            } else {
                Err(GraphError::BadEdge(e))
            }
        }
    }
}

/// γ₁ ∘_G γ₂.
pub fn insert(host: &FeynmanGraph, guest: &FeynmanGraph, gluing: &GluingData) -> Result<FeynmanGraph, GraphError> {
    insert_with_image(host, guest, gluing).map(|(g, _)| g)
}

/// Insertion that also reports the guest's internal edges inside the result.
pub fn insert_with_image(
    host: &FeynmanGraph,
    guest: &FeynmanGraph,
    gluing: &GluingData,
) -> Result<(FeynmanGraph, SubgraphSel), GraphError> {
    let host_inc = host.incidence()?;
    let guest_inc = guest.incidence()?;
    if !guest.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let arity = site_arity(host, gluing.site)?;
    let legs = guest.external.len();
    if legs != arity {
        return Err(GraphError::ArityMismatch { guest: legs, site: arity });
    }
    let mut seen = vec![false; arity];
    if gluing.assignment.len() != legs
        || gluing
            .assignment
            .iter()
            .any(|&a| a >= arity || std::mem::replace(&mut seen[a], true))
    {
        return Err(GraphError::InvalidGluing);
    }

    let (mut darts, host_offsets) = Darts::from_graph(host, &host_inc);
    let guest_offsets = darts.append(guest, &guest_inc);
    let leg_dart: Vec<usize> = guest
        .external
        .iter()
        .map(|l| guest_offsets[l.at.vertex] + l.at.port)
        .collect();

    match gluing.site {
        Site::Vertex(v) => {
            let base = host_offsets[v];
            let before: Vec<Partner> = (0..arity).map(|p| darts.partner(base + p).clone()).collect();
            let mut leg_at_port = vec![0; arity];
            for (k, &p) in gluing.assignment.iter().enumerate() {
                leg_at_port[p] = k;
            }
            for (k, &p) in gluing.assignment.iter().enumerate() {
                let g = leg_dart[k];
                match &before[p] {
                    Partner::Dart(x) if (base..base + arity).contains(x) => {
                        darts.link(g, leg_dart[leg_at_port[x - base]]);
                    }
                    Partner::Dart(x) => darts.link(g, *x),
                    Partner::Ext(label) => darts.partner[g] = Some(Partner::Ext(label.clone())),
                }
            }
            for d in base..base + arity {
                darts.partner[d] = None;
            }
            darts.rotations[v] = None;
        }
        Site::Edge(e) => {
            let ends = host.internal[e].ends.map(|p| host_offsets[p.vertex] + p.port);
            for (k, &end) in gluing.assignment.iter().enumerate() {
                darts.link(leg_dart[k], ends[end]);
            }
        }
    }

    let (g, pos) = darts.into_graph(None);
    let inc = g.incidence()?;
    let image_edges = guest.internal.iter().map(|edge| {
        let p = edge.ends[0];
        let at = pos[guest_offsets[p.vertex] + p.port].expect("guest darts survive");
        match inc.slot(at) {
            Slot::Internal { edge, .. } => edge,
            Slot::External { .. } => unreachable!("guest internal edges stay internal"),
        }
    });
    let image = SubgraphSel::new(&g, image_edges.collect::<Vec<_>>())?;
    Ok((g, image))
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Gluings up to the cyclic symmetry of the site. For a vertex site the
/// guest's first leg is pinned to port 0 and the others are permuted, giving
/// `n!/n` gluings. For an edge site both orientations are tried and
/// orientations producing ribbon-isomorphic results are merged, keeping the
/// first.
pub fn enumerate_gluings(host: &FeynmanGraph, site: Site, guest: &FeynmanGraph) -> Result<Vec<GluingData>, GraphError> {
    let arity = check_arity(host, site, guest)?;
    match site {
        Site::Vertex(_) => {
            let rest: Vec<usize> = (1..arity).collect();
            Ok(permutations(&rest)
                .into_iter()
                .map(|mut tail| {
                    tail.insert(0, 0);
                    GluingData::new(site, tail)
                })
                .collect())
        }
        Site::Edge(_) => {
            let mut keys = HashSet::new();
            let mut out = Vec::new();
            for assignment in [vec![0, 1], vec![1, 0]] {
                let gluing = GluingData::new(site, assignment);
                let key = canonical_key(&insert(host, guest, &gluing)?);
                if keys.insert(key) {
                    out.push(gluing);
                }
            }
            Ok(out)
        }
    }
}

/// Every bijection between guest legs and site slots.
pub fn enumerate_all_gluings(host: &FeynmanGraph, site: Site, guest: &FeynmanGraph) -> Result<Vec<GluingData>, GraphError> {
    let arity = check_arity(host, site, guest)?;
    let all: Vec<usize> = (0..arity).collect();
    Ok(permutations(&all)
        .into_iter()
        .map(|a| GluingData::new(site, a))
        .collect())
}

fn check_arity(host: &FeynmanGraph, site: Site, guest: &FeynmanGraph) -> Result<usize, GraphError> {
    let arity = site_arity(host, site)?;
    if guest.external.len() != arity {
        return Err(GraphError::ArityMismatch {
            guest: guest.external.len(),
            site: arity,
        });
    }
    Ok(arity)
}

/// True when the guest's legs, read along its single broken face, land on
/// consecutive host ports in rotation order. Edge sites have no cyclic
/// structure and always respect it. A guest with more than one broken face
/// has no boundary order, so no gluing of it respects one.
pub fn is_order_respecting(host: &FeynmanGraph, guest: &FeynmanGraph, gluing: &GluingData) -> Result<bool, GraphError> {
    let arity = check_arity(host, gluing.site, guest)?;
    if matches!(gluing.site, Site::Edge(_)) {
        return Ok(true);
    }
    let Some(order) = ribbon::boundary_legs(guest)? else {
        return Ok(false);
    };
    Ok((0..order.len()).all(|i| {
        let here = gluing.assignment[order[i]];
        let next = gluing.assignment[order[(i + 1) % order.len()]];
        next == (here + 1) % arity
    }))
}
