//! Truncated subgraphs and the divergent classes summed over by the coproducts.

use std::collections::HashMap;

use super::{components_with, extract, FeynmanGraph, GraphError};
use crate::ribbon;

/// Largest internal edge count accepted by the exhaustive subset enumeration.
pub const MAX_ENUMERATION_EDGES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theory {
    /// Commutative φ⁴: divergent iff 2 or 4 external legs.
    Phi4,
    /// Grosse–Wulkenhaar: additionally planar regular.
    Gw,
}

/// Which proper subgraphs a coproduct sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubgraphClass {
    /// Every component 1PI and superficially divergent in the theory.
    Divergent(Theory),
    /// Every non-empty edge subset.
    All,
}

/// A subset of internal edges together with the vertices they hook.
/// External structure is implied: every other port of a hooked vertex is
/// an external leg of the subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgraphSel {
    edges: Vec<usize>,
    vertices: Vec<usize>,
}

impl SubgraphSel {
    pub fn new(graph: &FeynmanGraph, edges: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        let mut edges: Vec<usize> = edges.into_iter().collect();
        edges.sort_unstable();
        edges.dedup();
        if let Some(&bad) = edges.iter().find(|&&e| e >= graph.internal.len()) {
            return Err(GraphError::BadEdge(bad));
        }
        Ok(Self::from_sorted(graph, edges))
    }

    fn from_sorted(graph: &FeynmanGraph, edges: Vec<usize>) -> Self {
        let mut vertices: Vec<usize> = edges
            .iter()
            .flat_map(|&e| graph.internal[e].ends.iter().map(|p| p.vertex))
            .collect();
        vertices.sort_unstable();
        vertices.dedup();
        SubgraphSel { edges, vertices }
    }

    pub(crate) fn from_mask(graph: &FeynmanGraph, mask: u64) -> Self {
        let edges = (0..graph.internal.len())
            .filter(|&e| mask >> e & 1 == 1)
            .collect();
        Self::from_sorted(graph, edges)
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Non-empty and not the whole graph.
    pub fn is_proper(&self, graph: &FeynmanGraph) -> bool {
        !self.edges.is_empty()
            && (self.edges.len() != graph.internal.len()
                || self.vertices.len() != graph.vertices.len())
    }

    /// External legs of the truncated subgraph: free ports of hooked vertices.
    pub fn external_count(&self, graph: &FeynmanGraph) -> usize {
        let ports: usize = self.vertices.iter().map(|&v| graph.vertices[v].valence).sum();
        ports - 2 * self.edges.len()
    }

    pub fn loop_number(&self, graph: &FeynmanGraph) -> usize {
        self.edges.len() + self.components(graph).len() - self.vertices.len()
    }

    /// Connected components, ordered by smallest edge index.
    pub fn components(&self, graph: &FeynmanGraph) -> Vec<SubgraphSel> {
        let groups = components_with(
            graph.vertices.len(),
            self.edges.iter().map(|&e| graph.internal[e].ends),
        );
        let mut comps: Vec<SubgraphSel> = groups
            .into_iter()
            .filter_map(|vs| {
                let edges: Vec<usize> = self
                    .edges
                    .iter()
                    .copied()
                    .filter(|&e| vs.contains(&graph.internal[e].ends[0].vertex))
                    .collect();
                (!edges.is_empty()).then(|| SubgraphSel::from_sorted(graph, edges))
            })
            .collect();
        comps.sort();
        comps
    }

    pub fn union(&self, graph: &FeynmanGraph, other: &SubgraphSel) -> SubgraphSel {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        edges.sort_unstable();
        edges.dedup();
        SubgraphSel::from_sorted(graph, edges)
    }

    pub(crate) fn mask(&self) -> u64 {
        self.edges.iter().fold(0u64, |m, &e| m | 1 << e)
    }
}

/// Superficial divergence of a connected 1PI graph.
pub fn is_superficially_divergent(graph: &FeynmanGraph, theory: Theory) -> Result<bool, GraphError> {
    if !graph.is_connected() {
        return Err(GraphError::Disconnected);
    }
    if !graph.is_one_particle_irreducible() {
        return Err(GraphError::NotOnePi);
    }
    let e = graph.external_count();
    let power_counting = e == 2 || e == 4;
    Ok(match theory {
        Theory::Phi4 => power_counting,
        Theory::Gw => power_counting && ribbon::is_planar_regular(graph)?,
    })
}

fn component_qualifies(graph: &FeynmanGraph, comp: &SubgraphSel, theory: Theory) -> bool {
    let e = comp.external_count(graph);
    if e != 2 && e != 4 {
        return false;
    }
    let standalone = extract(graph, comp);
    standalone.is_one_particle_irreducible()
        && match theory {
            Theory::Phi4 => true,
            Theory::Gw => ribbon::is_planar_regular(&standalone).unwrap_or(false),
        }
}

/// Proper non-empty subgraphs whose components are all 1PI and divergent,
/// sorted by edge list.
pub fn divergent_subgraphs(graph: &FeynmanGraph, theory: Theory) -> Result<Vec<SubgraphSel>, GraphError> {
    subgraphs(graph, SubgraphClass::Divergent(theory))
}

/// Every proper non-empty subgraph, sorted by edge list.
pub fn proper_subgraphs(graph: &FeynmanGraph) -> Result<Vec<SubgraphSel>, GraphError> {
    subgraphs(graph, SubgraphClass::All)
}

pub fn subgraphs(graph: &FeynmanGraph, class: SubgraphClass) -> Result<Vec<SubgraphSel>, GraphError> {
    let mut out = Vec::new();
    for_each_selection(graph, class, false, |sel| out.push(sel))?;
    out.sort();
    Ok(out)
}

/// Visits every selection of the class. With `whole_components` set, the
/// empty selection and any selection containing entire connected components
/// of `graph` are admitted too, which is what the coproduct of a product
/// needs.
pub(crate) fn for_each_selection(
    graph: &FeynmanGraph,
    class: SubgraphClass,
    whole_components: bool,
    mut visit: impl FnMut(SubgraphSel),
) -> Result<(), GraphError> {
    let n = graph.internal.len();
    if n > MAX_ENUMERATION_EDGES {
        return Err(GraphError::TooLarge(n));
    }
    graph.incidence()?;
    let whole: Vec<u64> = graph
        .components()
        .iter()
        .map(|vs| {
            graph
                .internal
                .iter()
                .enumerate()
                .filter(|(_, e)| vs.contains(&e.ends[0].vertex))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .filter(|&m| m != 0)
        .collect();
    let mut verdicts: HashMap<u64, bool> = HashMap::new();
    for mask in 0u64..(1u64 << n) {
        let sel = SubgraphSel::from_mask(graph, mask);
        if whole_components {
            if sel.is_empty() {
                visit(sel);
                continue;
            }
        } else if !sel.is_proper(graph) {
            continue;
        }
        let ok = sel.components(graph).iter().all(|comp| {
            let m = comp.mask();
            if whole_components && whole.contains(&m) {
                return true;
            }
            match class {
                SubgraphClass::All => true,
                SubgraphClass::Divergent(theory) => *verdicts
                    .entry(m)
                    .or_insert_with(|| component_qualifies(graph, comp, theory)),
            }
        });
        if ok {
            visit(sel);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn bubble_has_no_divergent_subgraphs() {
        assert!(divergent_subgraphs(&fixtures::bubble(), Theory::Phi4).unwrap().is_empty());
        assert!(divergent_subgraphs(&fixtures::tadpole_p(), Theory::Phi4).unwrap().is_empty());
        assert!(divergent_subgraphs(&fixtures::tadpole_p(), Theory::Gw).unwrap().is_empty());
    }

    #[test]
    fn chain_has_left_and_right_bubble() {
        let chain = fixtures::chain();
        let subs = divergent_subgraphs(&chain, Theory::Phi4).unwrap();
        let edges: Vec<&[usize]> = subs.iter().map(|s| s.edges()).collect();
        assert_eq!(edges, vec![&[0, 1][..], &[2, 3][..]]);
        assert_eq!(divergent_subgraphs(&chain, Theory::Gw).unwrap(), subs);
        assert_eq!(proper_subgraphs(&chain).unwrap().len(), 14);
    }

    #[test]
    fn divergence_classification() {
        assert!(is_superficially_divergent(&fixtures::bubble(), Theory::Phi4).unwrap());
        assert!(is_superficially_divergent(&fixtures::bubble(), Theory::Gw).unwrap());
        assert!(!is_superficially_divergent(&fixtures::tadpole_x(), Theory::Gw).unwrap());
        assert!(is_superficially_divergent(&fixtures::tadpole_x(), Theory::Phi4).unwrap());
        let b = fixtures::bubble();
        assert_eq!(
            is_superficially_divergent(&b.disjoint_union(&b), Theory::Phi4),
            Err(GraphError::Disconnected)
        );
    }

    #[test]
    fn six_leg_graph_is_convergent() {
        // triangle with two legs per vertex
        let mut h = crate::graph::FeynmanGraph::new(None);
        for _ in 0..3 {
            h.add_vertex();
        }
        h.add_edge((0, 0), (1, 0));
        h.add_edge((1, 1), (2, 0));
        h.add_edge((2, 1), (0, 1));
        for (i, at) in [(0, 2), (0, 3), (1, 2), (1, 3), (2, 2), (2, 3)].into_iter().enumerate() {
            h.add_external(&format!("f{i}"), at);
        }
        assert!(h.validate().is_valid());
        assert_eq!(h.external_count(), 6);
        assert!(!is_superficially_divergent(&h, Theory::Phi4).unwrap());
    }

    #[test]
    fn selection_basics() {
        let chain = fixtures::chain();
        let left = SubgraphSel::new(&chain, [1, 0]).unwrap();
        assert_eq!(left.edges(), &[0, 1]);
        assert_eq!(left.vertices(), &[0, 1]);
        assert_eq!(left.external_count(&chain), 4);
        assert_eq!(left.loop_number(&chain), 1);
        assert!(left.is_proper(&chain));
        let all = SubgraphSel::new(&chain, 0..4).unwrap();
        assert!(!all.is_proper(&chain));
        assert_eq!(SubgraphSel::new(&chain, [7]), Err(GraphError::BadEdge(7)));
    }
}
