//! Graphs generated by iterated insertion of the basic divergent graphs.

use std::collections::HashSet;

use crate::fixtures;
use crate::graph::{canonical_key, enumerate_all_gluings, insert, FeynmanGraph, GraphError, Site};

/// The insertion seeds: BUBBLE, TADPOLE_P and SUNSET_P.
pub fn seeds() -> Vec<FeynmanGraph> {
    vec![fixtures::bubble(), fixtures::tadpole_p(), fixtures::sunset_p()]
}

/// Every graph reachable from the seeds by inserting a seed into a vertex
/// (four-leg seeds) or an internal edge (two-leg seeds), under every
/// gluing, with at most `max_internal` internal edges. One graph per ribbon
/// class, in discovery order; generated graphs are named `G1`, `G2`, ...
pub fn generate(max_internal: usize) -> Result<Vec<FeynmanGraph>, GraphError> {
    let seeds = seeds();
    let mut seen = HashSet::new();
    let mut out: Vec<FeynmanGraph> = Vec::new();
    for s in &seeds {
        if s.internal_count() <= max_internal && seen.insert(canonical_key(s)) {
            out.push(s.clone());
        }
    }
    let mut next = 0;
    let mut counter = 0;
    while next < out.len() {
        let host = out[next].clone();
        next += 1;
        for guest in &seeds {
            if host.internal_count() + guest.internal_count() + 1 > max_internal + usize::from(guest.external_count() == 4) {
                continue;
            }
            let sites: Vec<Site> = if guest.external_count() == 4 {
                (0..host.vertex_count()).map(Site::Vertex).collect()
            } else {
                (0..host.internal_count()).map(Site::Edge).collect()
            };
            for site in sites {
                for gluing in enumerate_all_gluings(&host, site, guest)? {
                    let g = insert(&host, guest, &gluing)?;
                    if g.internal_count() <= max_internal && seen.insert(canonical_key(&g)) {
                        counter += 1;
                        out.push(g.with_name(&format!("G{counter}")));
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_corpus_contents() {
        let c = generate(4).unwrap();
        let keys: HashSet<_> = c.iter().map(canonical_key).collect();
        assert_eq!(keys.len(), c.len());
        assert!(keys.contains(&canonical_key(&fixtures::chain())));
        assert!(c.iter().all(|g| g.validate().is_valid() && g.is_one_particle_irreducible()));
        assert!(c.iter().all(|g| g.internal_count() <= 4));
    }
}
