//! Helpers shared by the integration tests: graph scrambling, a direct
//! forest-formula oracle for renormalized values and a direct Bogoliubov
//! recursion for counterterms of products.

#![allow(dead_code)]

use hopfgraph::graph::{extract, FeynmanGraph, PortRef, SubgraphSel, Theory};
use hopfgraph::hopf::{rational, HopfAlgebra};
use hopfgraph::renorm::{LaurentSeries, MinimalSubtraction, Projection, RenormError, Renormalizer, Window};
use hopfgraph::ribbon;
use rand::seq::SliceRandom;
use rand::Rng;

/// A ribbon-isomorphic copy: vertices permuted, each rotation turned by a
/// random amount, edges and legs reordered, edge ends swapped.
pub fn scramble<R: Rng>(g: &FeynmanGraph, rng: &mut R) -> FeynmanGraph {
    let n = g.vertices.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let shift: Vec<usize> = g.vertices.iter().map(|v| rng.gen_range(0..v.valence.max(1))).collect();
    let map = |p: PortRef| PortRef::new(perm[p.vertex], (p.port + shift[p.vertex]) % g.vertices[p.vertex].valence);
    let mut out = FeynmanGraph::new(g.name.as_deref());
    out.vertices = vec![g.vertices[0].clone(); n];
    for (v, vert) in g.vertices.iter().enumerate() {
        out.vertices[perm[v]] = vert.clone();
        out.vertices[perm[v]].name = format!("v{}", perm[v]);
    }
    let mut edges = g.internal.clone();
    edges.shuffle(rng);
    for mut e in edges {
        e.ends = e.ends.map(map);
        if rng.gen_bool(0.5) {
            e.ends.swap(0, 1);
        }
        out.internal.push(e);
    }
    let mut legs = g.external.clone();
    legs.shuffle(rng);
    for mut l in legs {
        l.at = map(l.at);
        out.external.push(l);
    }
    out
}

/// The same graph with every vertex's ports arbitrarily permuted. Only the
/// commutative class survives.
pub fn shuffle_ports<R: Rng>(g: &FeynmanGraph, rng: &mut R) -> FeynmanGraph {
    let perms: Vec<Vec<usize>> = g
        .vertices
        .iter()
        .map(|v| {
            let mut p: Vec<usize> = (0..v.valence).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    let mut out = g.clone();
    let map = |p: PortRef| PortRef::new(p.vertex, perms[p.vertex][p.port]);
    for e in &mut out.internal {
        e.ends = e.ends.map(map);
    }
    for l in &mut out.external {
        l.at = map(l.at);
    }
    out
}

fn toy(loops: usize, window: Window) -> LaurentSeries {
    let base = LaurentSeries::from_terms(window, [(-1, rational(1)), (0, rational(1))]).unwrap();
    base.pow(loops as u32).unwrap()
}

struct Div {
    mask: u64,
    vertices: Vec<usize>,
    loops: usize,
}

fn connected_divergent(g: &FeynmanGraph, theory: Theory) -> Vec<Div> {
    let n = g.internal.len();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let edges: Vec<usize> = (0..n).filter(|&e| mask >> e & 1 == 1).collect();
        let sel = SubgraphSel::new(g, edges.clone()).unwrap();
        if !sel.is_proper(g) {
            continue;
        }
        let sub = extract(g, &sel);
        if !sub.is_connected() || !sub.is_one_particle_irreducible() {
            continue;
        }
        let e = sub.external_count();
        if e != 2 && e != 4 {
            continue;
        }
        if theory == Theory::Gw && !ribbon::is_planar_regular(&sub).unwrap() {
            continue;
        }
        out.push(Div {
            mask,
            vertices: sel.vertices().to_vec(),
            loops: sub.internal_count() + 1 - sub.vertex_count(),
        });
    }
    out
}

fn compatible(a: &Div, b: &Div) -> bool {
    a.mask & b.mask == a.mask
        || a.mask & b.mask == b.mask
        || a.vertices.iter().all(|v| !b.vertices.contains(v))
}

fn forests(divs: &[Div], start: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(chosen.clone());
    for i in start..divs.len() {
        if chosen.iter().all(|&j| compatible(&divs[i], &divs[j])) {
            chosen.push(i);
            forests(divs, i + 1, chosen, out);
            chosen.pop();
        }
    }
}

/// Forest members strictly inside `outer` (all of the forest for `None`)
/// that are maximal there.
fn maximal_inside(divs: &[Div], forest: &[usize], outer: Option<usize>) -> Vec<usize> {
    let inside = |i: usize| match outer {
        None => true,
        Some(o) => i != o && divs[i].mask & divs[o].mask == divs[i].mask,
    };
    let members: Vec<usize> = forest.iter().copied().filter(|&i| inside(i)).collect();
    members
        .iter()
        .copied()
        .filter(|&i| {
            !members
                .iter()
                .any(|&j| j != i && divs[i].mask & divs[j].mask == divs[i].mask)
        })
        .collect()
}

fn subtracted(divs: &[Div], forest: &[usize], node: usize, window: Window) -> LaurentSeries {
    let kids = maximal_inside(divs, forest, Some(node));
    let reduced = divs[node].loops - kids.iter().map(|&k| divs[k].loops).sum::<usize>();
    let mut v = toy(reduced, window);
    for k in kids {
        v = v.mul(&subtracted(divs, forest, k, window)).unwrap();
    }
    MinimalSubtraction.project(&v).neg()
}

/// φ₊ under the toy rule from the forest formula: the sum over forests of
/// mutually nested or vertex-disjoint connected divergent subgraphs, each
/// member contributing −T of its reduced value, innermost first, followed
/// by the overall subtraction.
pub fn forest_renormalized(g: &FeynmanGraph, theory: Theory, window: Window) -> LaurentSeries {
    let divs = connected_divergent(g, theory);
    let mut all = Vec::new();
    forests(&divs, 0, &mut Vec::new(), &mut all);
    let mut bar = LaurentSeries::zero(window);
    for forest in &all {
        let tops = maximal_inside(&divs, forest, None);
        let reduced = g.loop_number() - tops.iter().map(|&k| divs[k].loops).sum::<usize>();
        let mut v = toy(reduced, window);
        for k in tops {
            v = v.mul(&subtracted(&divs, forest, k, window)).unwrap();
        }
        bar = bar.add(&v).unwrap();
    }
    bar.sub(&MinimalSubtraction.project(&bar)).unwrap()
}

/// φ₋ of an arbitrary graph through the Bogoliubov recursion on the
/// coproduct computed directly from its subgraphs.
pub fn counterterm_direct(r: &Renormalizer<'_>, alg: &HopfAlgebra, g: &FeynmanGraph) -> Result<LaurentSeries, RenormError> {
    let whole = alg.monomial_of(g)?;
    let mut bar = r.phi_monomial(&whole)?;
    for ((left, right), c) in alg.coproduct_of_graph(g)?.iter() {
        if left.is_unit() || right.is_unit() {
            continue;
        }
        let term = r.counterterm_monomial(left)?.mul(&r.phi_monomial(right)?)?;
        bar = bar.add(&term.scale(c))?;
    }
    Ok(MinimalSubtraction.project(&bar).neg())
}
