//! Canonical forms of graphs up to isomorphism.
//!
//! Two notions are provided. The ribbon key identifies graphs up to vertex
//! relabeling combined with a cyclic rotation of every port list, which is
//! orientation-preserving ribbon isomorphism. The commutative key forgets the
//! port order entirely and identifies multigraphs with external legs.
//! External leg and edge labels never enter a key.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::{FeynmanGraph, Slot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KeyKind {
    Ribbon,
    Commutative,
}

/// Byte encoding of an isomorphism class. The leading byte records the
/// [`KeyKind`], so keys of different kinds never compare equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Arc<[u8]>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn kind(&self) -> KeyKind {
        if self.0.first() == Some(&b'R') {
            KeyKind::Ribbon
        } else {
            KeyKind::Commutative
        }
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Option<CanonicalKey> {
        if s.len() % 2 != 0 || s.is_empty() {
            return None;
        }
        let bytes = (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(s.get(i..i + 2)?, 16).ok())
            .collect::<Option<Vec<u8>>>()?;
        match bytes[0] {
            b'R' | b'C' => Some(CanonicalKey(bytes.into())),
            _ => None,
        }
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Key({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Ribbon-aware key. The graph must be structurally valid.
pub fn canonical_key(graph: &FeynmanGraph) -> CanonicalKey {
    key_of(graph, KeyKind::Ribbon)
}

/// Key that ignores the rotation system.
pub fn commutative_key(graph: &FeynmanGraph) -> CanonicalKey {
    key_of(graph, KeyKind::Commutative)
}

pub fn key_of(graph: &FeynmanGraph, kind: KeyKind) -> CanonicalKey {
    let parts = graph.split_components();
    let mut codes: Vec<Vec<u16>> = if graph.vertices.is_empty() {
        Vec::new()
    } else {
        parts
            .iter()
            .map(|part| match kind {
                KeyKind::Ribbon => ribbon_code(part),
                KeyKind::Commutative => commutative_code(part),
            })
            .collect()
    };
    codes.sort();
    let mut bytes = vec![match kind {
        KeyKind::Ribbon => b'R',
        KeyKind::Commutative => b'C',
    }];
    push(&mut bytes, codes.len());
    for code in &codes {
        push(&mut bytes, code.len());
        for &t in code {
            bytes.extend_from_slice(&t.to_be_bytes());
        }
    }
    CanonicalKey(bytes.into())
}

fn push(bytes: &mut Vec<u8>, n: usize) {
    bytes.extend_from_slice(&(n as u16).to_be_bytes());
}

/// Minimal traversal code of a connected ribbon graph over all starting
/// half-edges. A start fixes the first vertex and the port its rotation
/// begins at; the breadth-first walk then fixes every other vertex number
/// and rotation offset, so each start is one relabeling.
fn ribbon_code(graph: &FeynmanGraph) -> Vec<u16> {
    let inc = graph.incidence().expect("canonical key of an invalid graph");
    let n = graph.vertices.len();
    let mut best: Option<Vec<u16>> = None;
    let mut any_start = false;
    for v0 in 0..n {
        for p0 in 0..graph.vertices[v0].valence {
            any_start = true;
            let code = ribbon_walk(graph, &inc, v0, p0, best.as_deref());
            if let Some(code) = code {
                if best.as_ref().is_none_or(|b| code < *b) {
                    best = Some(code);
                }
            }
        }
    }
    if !any_start {
        // isolated vertex without ports
        return vec![0];
    }
    best.expect("at least one start")
}

/// Returns `None` as soon as the partial code exceeds `bound`.
fn ribbon_walk(
    graph: &FeynmanGraph,
    inc: &super::Incidence,
    v0: usize,
    p0: usize,
    bound: Option<&[u16]>,
) -> Option<Vec<u16>> {
    let n = graph.vertices.len();
    let mut number = vec![usize::MAX; n];
    let mut offset = vec![0usize; n];
    let mut order = vec![v0];
    number[v0] = 0;
    offset[v0] = p0;
    let mut code: Vec<u16> = Vec::with_capacity(graph.port_count() * 2 + n);
    let mut tight = bound.is_some();
    let emit = |code: &mut Vec<u16>, t: u16, tight: &mut bool| -> bool {
        let i = code.len();
        code.push(t);
        if *tight {
            let b = bound.unwrap();
            match b.get(i).map(|&x| t.cmp(&x)) {
                Some(Ordering::Less) | None => *tight = false,
                Some(Ordering::Greater) => return false,
                Some(Ordering::Equal) => {}
            }
        }
        true
    };
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        let val = graph.vertices[v].valence;
        if !emit(&mut code, val as u16, &mut tight) {
            return None;
        }
        for k in 0..val {
            let p = (offset[v] + k) % val;
            let (a, b) = match inc.ports(v)[p] {
                Slot::External { .. } => (0u16, 0u16),
                Slot::Internal { edge, end } => {
                    let other = graph.internal[edge].ends[1 - end];
                    let w = other.vertex;
                    if number[w] == usize::MAX {
                        number[w] = order.len();
                        offset[w] = other.port;
                        order.push(w);
                    }
                    let wval = graph.vertices[w].valence;
                    let rel = (other.port + wval - offset[w]) % wval;
                    (1 + number[w] as u16, rel as u16)
                }
            };
            if !emit(&mut code, a, &mut tight) || !emit(&mut code, b, &mut tight) {
                return None;
            }
        }
    }
    Some(code)
}

/// Canonical code of a connected multigraph with external legs, by
/// individualization and refinement over vertex colorings.
fn commutative_code(graph: &FeynmanGraph) -> Vec<u16> {
    let n = graph.vertices.len();
    let mut mult = vec![vec![0u16; n]; n];
    let mut ext = vec![0u16; n];
    for e in &graph.internal {
        let (a, b) = (e.ends[0].vertex, e.ends[1].vertex);
        mult[a][b] += 1;
        if a != b {
            mult[b][a] += 1;
        }
    }
    for leg in &graph.external {
        ext[leg.at.vertex] += 1;
    }
    let invariant: Vec<(u16, u16, u16)> = (0..n)
        .map(|v| (graph.vertices[v].valence as u16, ext[v], mult[v][v]))
        .collect();
    let data = MultigraphData { mult, invariant };

    let mut initial: Vec<(u16, u16, u16)> = data.invariant.clone();
    initial.sort();
    initial.dedup();
    let colors: Vec<usize> = data
        .invariant
        .iter()
        .map(|inv| initial.binary_search(inv).unwrap())
        .collect();
    let colors = data.refine(colors);
    let mut best = None;
    data.search(colors, &mut best);
    best.expect("search visits at least one leaf")
}

struct MultigraphData {
    mult: Vec<Vec<u16>>,
    invariant: Vec<(u16, u16, u16)>,
}

impl MultigraphData {
    /// Equitable refinement. Colors stay ordered by a label-free signature,
    /// so the result is canonical for a canonical input coloring.
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let n = colors.len();
        loop {
            let count = colors.iter().max().map_or(0, |m| m + 1);
            let sigs: Vec<(usize, Vec<(usize, u16)>)> = (0..n)
                .map(|v| {
                    let mut nb: Vec<(usize, u16)> = (0..n)
                        .filter(|&u| u != v && self.mult[v][u] > 0)
                        .map(|u| (colors[u], self.mult[v][u]))
                        .collect();
                    nb.sort();
                    (colors[v], nb)
                })
                .collect();
            let mut distinct = sigs.clone();
            distinct.sort();
            distinct.dedup();
            colors = sigs
                .iter()
                .map(|s| distinct.binary_search(s).unwrap())
                .collect();
            if distinct.len() == count {
                return colors;
            }
        }
    }

    fn search(&self, colors: Vec<usize>, best: &mut Option<Vec<u16>>) {
        let n = colors.len();
        let count = colors.iter().max().map_or(0, |m| m + 1);
        if count == n {
            let mut order = vec![0usize; n];
            for (v, &c) in colors.iter().enumerate() {
                order[c] = v;
            }
            let code = self.encode(&order);
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        }
        // first smallest non-singleton cell
        let mut sizes = vec![0usize; count];
        for &c in &colors {
            sizes[c] += 1;
        }
        let target = (0..count)
            .filter(|&c| sizes[c] > 1)
            .min_by_key(|&c| (sizes[c], c))
            .unwrap();
        for v in (0..n).filter(|&v| colors[v] == target) {
            // individualize v ahead of the rest of its cell
            let split: Vec<(usize, u8)> = (0..n)
                .map(|u| (colors[u], if u == v { 0 } else { 1 }))
                .collect();
            let mut distinct = split.clone();
            distinct.sort();
            distinct.dedup();
            let next: Vec<usize> = split
                .iter()
                .map(|s| distinct.binary_search(s).unwrap())
                .collect();
            self.search(self.refine(next), best);
        }
    }

    fn encode(&self, order: &[usize]) -> Vec<u16> {
        let n = order.len();
        let mut code = Vec::with_capacity(1 + 3 * n + n * n / 2);
        code.push(n as u16);
        for &v in order {
            let (val, ext, loops) = self.invariant[v];
            code.extend([val, ext, loops]);
        }
        for i in 0..n {
            for j in i + 1..n {
                code.push(self.mult[order[i]][order[j]]);
            }
        }
        code
    }
}
