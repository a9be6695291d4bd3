//! The free commutative algebra on connected graphs, with its coproduct,
//! counit, loop grading and antipode.
//!
//! Generators are identified by canonical key, so isomorphic cographs
//! merge into one term. Each selection of subgraphs is counted once, which
//! makes every coefficient of Δ a non-negative integer.

mod linear;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_traits::One;
use thiserror::Error;

use crate::graph::{
    extract, key_of, shrink, CanonicalKey, FeynmanGraph, GraphError, KeyKind, ShrinkRule,
    SubgraphClass, SubgraphSel, Theory,
};

pub use linear::{counit, product, rational, Element, LinComb, Monomial, Rational, Tensor, Triple};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HopfError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no graph registered under key {0}")]
    UnknownKey(CanonicalKey),
}

/// Which subgraphs the coproduct sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoproductMode {
    /// Superficially divergent subgraphs of commutative φ⁴.
    Phi4Renorm,
    /// Planar regular divergent subgraphs; generators are ribbon graphs.
    GwRenorm,
    /// All subgraphs, each component shrunk to a vertex.
    Core,
}

impl CoproductMode {
    pub const ALL: [CoproductMode; 3] = [CoproductMode::Phi4Renorm, CoproductMode::GwRenorm, CoproductMode::Core];

    pub fn key_kind(self) -> KeyKind {
        match self {
            CoproductMode::GwRenorm => KeyKind::Ribbon,
            CoproductMode::Phi4Renorm | CoproductMode::Core => KeyKind::Commutative,
        }
    }

    pub fn class(self) -> SubgraphClass {
        match self {
            CoproductMode::Phi4Renorm => SubgraphClass::Divergent(Theory::Phi4),
            CoproductMode::GwRenorm => SubgraphClass::Divergent(Theory::Gw),
            CoproductMode::Core => SubgraphClass::All,
        }
    }

    pub fn shrink_rule(self) -> ShrinkRule {
        match self {
            CoproductMode::Core => ShrinkRule::Vertex,
            _ => ShrinkRule::Renormalization,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CoproductMode::Phi4Renorm => "phi4",
            CoproductMode::GwRenorm => "gw",
            CoproductMode::Core => "core",
        }
    }
}

impl fmt::Display for CoproductMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoproductMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phi4" => Ok(CoproductMode::Phi4Renorm),
            "gw" => Ok(CoproductMode::GwRenorm),
            "core" => Ok(CoproductMode::Core),
            other => Err(format!("unknown theory {other:?} (expected phi4, gw or core)")),
        }
    }
}

/// Predicate deciding whether a proper selection takes part in Δ. Only used
/// to break the coproduct on purpose in tests.
pub type SelectionHook = Box<dyn Fn(&FeynmanGraph, &SubgraphSel) -> bool + Send + Sync>;

/// Outcome of a coassociativity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoassociativityReport {
    pub holds: bool,
    /// Number of terms of (Δ⊗id)Δ.
    pub terms: usize,
    /// A triple tensor where the two sides differ, with both coefficients.
    pub witness: Option<((Monomial, Monomial, Monomial), Rational, Rational)>,
}

/// Hopf algebra of graphs for one coproduct mode.
///
/// Holds a registry of one representative graph per canonical key and
/// memo tables for Δ and S. The tables only grow; concurrent callers may
/// recompute an entry, and the first insert wins.
pub struct HopfAlgebra {
    mode: CoproductMode,
    representatives: RwLock<HashMap<CanonicalKey, Arc<FeynmanGraph>>>,
    coproducts: RwLock<HashMap<CanonicalKey, Arc<Tensor>>>,
    antipodes: RwLock<HashMap<CanonicalKey, Arc<Element>>>,
    antipodes_right: RwLock<HashMap<CanonicalKey, Arc<Element>>>,
    hook: Option<SelectionHook>,
}

impl fmt::Debug for HopfAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HopfAlgebra")
            .field("mode", &self.mode)
            .field("generators", &self.representatives.read().unwrap().len())
            .finish()
    }
}

fn memo_get<V: Clone>(table: &RwLock<HashMap<CanonicalKey, V>>, key: &CanonicalKey) -> Option<V> {
    table.read().unwrap().get(key).cloned()
}

fn memo_put<V: Clone>(table: &RwLock<HashMap<CanonicalKey, V>>, key: CanonicalKey, value: V) -> V {
    table.write().unwrap().entry(key).or_insert(value).clone()
}

impl HopfAlgebra {
    pub fn new(mode: CoproductMode) -> Self {
        HopfAlgebra {
            mode,
            representatives: RwLock::default(),
            coproducts: RwLock::default(),
            antipodes: RwLock::default(),
            antipodes_right: RwLock::default(),
            hook: None,
        }
    }

    /// An algebra whose coproduct drops every proper selection rejected by
    /// `hook`.
    pub fn with_selection_hook(mode: CoproductMode, hook: SelectionHook) -> Self {
        HopfAlgebra {
            hook: Some(hook),
            ..HopfAlgebra::new(mode)
        }
    }

    pub fn mode(&self) -> CoproductMode {
        self.mode
    }

    pub fn key(&self, graph: &FeynmanGraph) -> CanonicalKey {
        key_of(graph, self.mode.key_kind())
    }

    /// Registers a connected graph and returns its key. The first graph seen
    /// for a key stays its representative.
    pub fn intern(&self, graph: &FeynmanGraph) -> CanonicalKey {
        let key = self.key(graph);
        if !self.representatives.read().unwrap().contains_key(&key) {
            self.representatives
                .write()
                .unwrap()
                .entry(key.clone())
                .or_insert_with(|| Arc::new(graph.clone()));
        }
        key
    }

    pub fn representative(&self, key: &CanonicalKey) -> Result<Arc<FeynmanGraph>, HopfError> {
        memo_get(&self.representatives, key).ok_or_else(|| HopfError::UnknownKey(key.clone()))
    }

    /// The monomial of connected components of a graph.
    pub fn monomial_of(&self, graph: &FeynmanGraph) -> Result<Monomial, HopfError> {
        graph.incidence()?;
        if graph.is_unit() {
            return Ok(Monomial::unit());
        }
        Ok(Monomial::from_keys(
            graph.split_components().iter().map(|c| self.intern(c)).collect(),
        ))
    }

    pub fn element_of(&self, graph: &FeynmanGraph) -> Result<Element, HopfError> {
        self.monomial_of(graph).map(Element::monomial)
    }

    /// Generators are connected, and 1PI outside core mode.
    pub fn check_generator(&self, graph: &FeynmanGraph) -> Result<(), HopfError> {
        graph.incidence()?;
        if !graph.is_connected() {
            return Err(GraphError::Disconnected.into());
        }
        if self.mode != CoproductMode::Core && !graph.is_one_particle_irreducible() {
            return Err(GraphError::NotOnePi.into());
        }
        Ok(())
    }

    pub fn loop_number(&self, m: &Monomial) -> Result<usize, HopfError> {
        m.factors()
            .iter()
            .map(|k| self.representative(k).map(|g| g.loop_number()))
            .sum()
    }

    /// ΔΓ for a generator: connected and 1PI, or merely connected in core
    /// mode.
    pub fn coproduct(&self, graph: &FeynmanGraph) -> Result<Tensor, HopfError> {
        self.check_generator(graph)?;
        let key = self.intern(graph);
        Ok((*self.coproduct_key(&key)?).clone())
    }

    /// Δ′Γ = ΔΓ − Γ⊗1 − 1⊗Γ.
    pub fn reduced_coproduct(&self, graph: &FeynmanGraph) -> Result<Tensor, HopfError> {
        self.check_generator(graph)?;
        let key = self.intern(graph);
        self.reduced_coproduct_key(&key)
    }

    pub fn reduced_coproduct_key(&self, key: &CanonicalKey) -> Result<Tensor, HopfError> {
        let full = self.coproduct_key(key)?;
        Ok(full.sub(&primitive_part(key)))
    }

    pub fn coproduct_key(&self, key: &CanonicalKey) -> Result<Arc<Tensor>, HopfError> {
        if let Some(t) = memo_get(&self.coproducts, key) {
            return Ok(t);
        }
        let graph = self.representative(key)?;
        let t = Arc::new(self.coproduct_of_graph(&graph)?);
        Ok(memo_put(&self.coproducts, key.clone(), t))
    }

    /// Δ of an arbitrary graph computed straight from its subgraphs, whole
    /// connected components included. For a disconnected graph this is the
    /// coproduct of the product of its components.
    pub fn coproduct_of_graph(&self, graph: &FeynmanGraph) -> Result<Tensor, HopfError> {
        let rule = self.mode.shrink_rule();
        let mut out = Tensor::zero();
        let mut failure = None;
        crate::graph::for_each_selection(graph, self.mode.class(), true, |sel| {
            if failure.is_some() {
                return;
            }
            if let Some(hook) = &self.hook {
                if sel.is_proper(graph) && !hook(graph, &sel) {
                    return;
                }
            }
            let term = (|| -> Result<(Monomial, Monomial), HopfError> {
                let left = Monomial::from_keys(
                    sel.components(graph)
                        .iter()
                        .map(|c| self.intern(&extract(graph, c)))
                        .collect(),
                );
                let right = self.monomial_of(&shrink(graph, &sel, rule)?)?;
                Ok((left, right))
            })();
            match term {
                Ok(pair) => out.add_term(pair, Rational::one()),
                Err(e) => failure = Some(e),
            }
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    pub fn coproduct_monomial(&self, m: &Monomial) -> Result<Tensor, HopfError> {
        let mut out = Tensor::unit();
        for k in m.factors() {
            out = out.times(&*self.coproduct_key(k)?);
        }
        Ok(out)
    }

    pub fn coproduct_element(&self, a: &Element) -> Result<Tensor, HopfError> {
        let mut out = Tensor::zero();
        for (m, c) in a.iter() {
            out.add_scaled(&self.coproduct_monomial(m)?, c);
        }
        Ok(out)
    }

    /// S(Γ) by the recursion S(Γ) = −Γ − Σ S(γ) Γ/γ.
    pub fn antipode(&self, graph: &FeynmanGraph) -> Result<Element, HopfError> {
        self.check_generator(graph)?;
        let key = self.intern(graph);
        Ok((*self.antipode_key(&key)?).clone())
    }

    pub fn antipode_key(&self, key: &CanonicalKey) -> Result<Arc<Element>, HopfError> {
        if let Some(s) = memo_get(&self.antipodes, key) {
            return Ok(s);
        }
        let mut s = Element::generator(key.clone()).neg();
        for ((left, right), c) in self.reduced_coproduct_key(key)?.iter() {
            let term = product(&self.antipode_monomial(left)?, &Element::monomial(right.clone()));
            s.add_scaled(&term, &-c);
        }
        Ok(memo_put(&self.antipodes, key.clone(), Arc::new(s)))
    }

    /// S(Γ) by the mirrored recursion S(Γ) = −Γ − Σ γ S(Γ/γ).
    pub fn antipode_right_key(&self, key: &CanonicalKey) -> Result<Arc<Element>, HopfError> {
        if let Some(s) = memo_get(&self.antipodes_right, key) {
            return Ok(s);
        }
        let mut s = Element::generator(key.clone()).neg();
        for ((left, right), c) in self.reduced_coproduct_key(key)?.iter() {
            let mut sr = Element::unit();
            for k in right.factors() {
                sr = product(&sr, &*self.antipode_right_key(k)?);
            }
            let term = product(&Element::monomial(left.clone()), &sr);
            s.add_scaled(&term, &-c);
        }
        Ok(memo_put(&self.antipodes_right, key.clone(), Arc::new(s)))
    }

    pub fn antipode_monomial(&self, m: &Monomial) -> Result<Element, HopfError> {
        let mut out = Element::unit();
        for k in m.factors() {
            out = product(&out, &*self.antipode_key(k)?);
        }
        Ok(out)
    }

    pub fn antipode_element(&self, a: &Element) -> Result<Element, HopfError> {
        let mut out = Element::zero();
        for (m, c) in a.iter() {
            out.add_scaled(&self.antipode_monomial(m)?, c);
        }
        Ok(out)
    }

    /// Splits an element by loop number.
    pub fn grade(&self, a: &Element) -> Result<BTreeMap<usize, Element>, HopfError> {
        let mut out: BTreeMap<usize, Element> = BTreeMap::new();
        for (m, c) in a.iter() {
            let d = self.loop_number(m)?;
            out.entry(d).or_default().add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    /// Compares (Δ⊗id)Δ and (id⊗Δ)Δ on a generator.
    pub fn check_coassociativity(&self, graph: &FeynmanGraph) -> Result<CoassociativityReport, HopfError> {
        self.check_generator(graph)?;
        let key = self.intern(graph);
        let delta = self.coproduct_key(&key)?;
        let mut lhs = Triple::zero();
        let mut rhs = Triple::zero();
        for ((l, r), c) in delta.iter() {
            for ((a, b), d) in self.coproduct_monomial(l)?.iter() {
                lhs.add_term((a.clone(), b.clone(), r.clone()), c * d);
            }
            for ((a, b), d) in self.coproduct_monomial(r)?.iter() {
                rhs.add_term((l.clone(), a.clone(), b.clone()), c * d);
            }
        }
        let witness = lhs.first_difference(&rhs);
        Ok(CoassociativityReport {
            holds: witness.is_none(),
            terms: lhs.len(),
            witness,
        })
    }

    /// m∘(S⊗id)∘Δ = u∘ε = m∘(id⊗S)∘Δ on a generator.
    pub fn check_antipode_axiom(&self, graph: &FeynmanGraph) -> Result<bool, HopfError> {
        let expected = if graph.is_unit() {
            Element::unit()
        } else {
            self.check_generator(graph)?;
            Element::zero()
        };
        let delta = if graph.is_unit() {
            Tensor::unit()
        } else {
            let key = self.intern(graph);
            (*self.coproduct_key(&key)?).clone()
        };
        let mut left = Element::zero();
        let mut right = Element::zero();
        for ((l, r), c) in delta.iter() {
            let sl = product(&self.antipode_monomial(l)?, &Element::monomial(r.clone()));
            let sr = product(&Element::monomial(l.clone()), &self.antipode_monomial(r)?);
            left.add_scaled(&sl, c);
            right.add_scaled(&sr, c);
        }
        Ok(left == expected && right == expected)
    }

    /// (ε⊗id)Δ = id = (id⊗ε)Δ on a generator.
    pub fn check_counit_laws(&self, graph: &FeynmanGraph) -> Result<bool, HopfError> {
        self.check_generator(graph)?;
        let key = self.intern(graph);
        let delta = self.coproduct_key(&key)?;
        let mut left = Element::zero();
        let mut right = Element::zero();
        for ((l, r), c) in delta.iter() {
            if l.is_unit() {
                left.add_term(r.clone(), c.clone());
            }
            if r.is_unit() {
                right.add_term(l.clone(), c.clone());
            }
        }
        let id = Element::generator(key);
        Ok(left == id && right == id)
    }

    /// Every term of ΔΓ splits the loop number of Γ. In the renormalization
    /// modes every non-unit monomial also has positive degree, so degree
    /// zero is spanned by the unit.
    pub fn check_grading(&self, graph: &FeynmanGraph) -> Result<bool, HopfError> {
        self.check_generator(graph)?;
        let key = self.intern(graph);
        let total = graph.loop_number();
        let connected = self.mode != CoproductMode::Core;
        for ((l, r), _) in self.coproduct_key(&key)?.iter() {
            let (dl, dr) = (self.loop_number(l)?, self.loop_number(r)?);
            if dl + dr != total {
                return Ok(false);
            }
            if connected && ((dl == 0 && !l.is_unit()) || (dr == 0 && !r.is_unit())) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Both antipode recursions agree.
    pub fn check_antipode_recursions(&self, graph: &FeynmanGraph) -> Result<bool, HopfError> {
        self.check_generator(graph)?;
        let key = self.intern(graph);
        Ok(self.antipode_key(&key)? == self.antipode_right_key(&key)?)
    }

    /// Δ(ab) = Δ(a)Δ(b), with the left side computed directly on the
    /// disjoint union.
    pub fn check_multiplicativity(&self, a: &FeynmanGraph, b: &FeynmanGraph) -> Result<bool, HopfError> {
        let direct = self.coproduct_of_graph(&a.disjoint_union(b))?;
        let ka = self.monomial_of(a)?;
        let kb = self.monomial_of(b)?;
        let split = self.coproduct_monomial(&ka)?.times(&self.coproduct_monomial(&kb)?);
        Ok(direct == split)
    }
}

fn primitive_part(key: &CanonicalKey) -> Tensor {
    let g = Monomial::single(key.clone());
    let mut t = Tensor::term((g.clone(), Monomial::unit()), Rational::one());
    t.add_term((Monomial::unit(), g), Rational::one());
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn gen(alg: &HopfAlgebra, g: &FeynmanGraph) -> Monomial {
        Monomial::single(alg.intern(g))
    }

    #[test]
    fn bubble_is_primitive() {
        let alg = HopfAlgebra::new(CoproductMode::Phi4Renorm);
        let b = fixtures::bubble();
        assert!(alg.reduced_coproduct(&b).unwrap().is_zero());
        let d = alg.coproduct(&b).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(alg.antipode(&b).unwrap(), Element::monomial(gen(&alg, &b)).neg());
    }

    #[test]
    fn chain_coproduct_and_antipode() {
        for mode in [CoproductMode::Phi4Renorm, CoproductMode::GwRenorm] {
            let alg = HopfAlgebra::new(mode);
            let chain = fixtures::chain();
            let b = gen(&alg, &fixtures::bubble());
            let reduced = alg.reduced_coproduct(&chain).unwrap();
            assert_eq!(reduced, Tensor::term((b.clone(), b.clone()), rational(2)));
            let s = alg.antipode(&chain).unwrap();
            let mut expected = Element::monomial(gen(&alg, &chain)).neg();
            expected.add_term(b.times(&b), rational(2));
            assert_eq!(s, expected);
        }
    }

    #[test]
    fn core_chain_has_fourteen_proper_terms() {
        let alg = HopfAlgebra::new(CoproductMode::Core);
        let chain = fixtures::chain();
        let reduced = alg.reduced_coproduct(&chain).unwrap();
        let total: Rational = reduced.iter().map(|(_, c)| c.clone()).sum();
        assert_eq!(total, rational(14));
        assert!(alg.check_coassociativity(&chain).unwrap().holds);
        assert!(alg.check_antipode_axiom(&chain).unwrap());
    }

    #[test]
    fn tadpole_is_primitive_in_gw() {
        let alg = HopfAlgebra::new(CoproductMode::GwRenorm);
        assert!(alg.reduced_coproduct(&fixtures::tadpole_p()).unwrap().is_zero());
    }

    #[test]
    fn grading_of_fixtures() {
        let alg = HopfAlgebra::new(CoproductMode::Phi4Renorm);
        let b = alg.element_of(&fixtures::bubble()).unwrap();
        assert_eq!(alg.grade(&b).unwrap().keys().copied().collect::<Vec<_>>(), [1]);
        let c = alg.element_of(&fixtures::chain()).unwrap();
        assert_eq!(alg.grade(&c).unwrap().keys().copied().collect::<Vec<_>>(), [2]);
        let bb = product(&b, &b);
        assert_eq!(alg.grade(&bb).unwrap().keys().copied().collect::<Vec<_>>(), [2]);
    }

    #[test]
    fn axioms_on_fixtures() {
        for mode in CoproductMode::ALL {
            let alg = HopfAlgebra::new(mode);
            for g in [fixtures::bubble(), fixtures::chain(), fixtures::triple_chain(), fixtures::sunset_p()] {
                assert!(alg.check_coassociativity(&g).unwrap().holds, "{mode} {:?}", g.name);
                assert!(alg.check_antipode_axiom(&g).unwrap(), "{mode} {:?}", g.name);
                assert!(alg.check_counit_laws(&g).unwrap());
                assert!(alg.check_grading(&g).unwrap());
                assert!(alg.check_antipode_recursions(&g).unwrap());
            }
            assert!(alg.check_antipode_axiom(&FeynmanGraph::unit()).unwrap());
        }
    }

    #[test]
    fn corrupted_coproduct_is_caught() {
        let target = fixtures::triple_chain();
        let target_key = crate::graph::commutative_key(&target);
        let hook: SelectionHook = Box::new(move |g, sel| {
            !(crate::graph::commutative_key(g) == target_key && sel.edges() == [4, 5])
        });
        let alg = HopfAlgebra::with_selection_hook(CoproductMode::Phi4Renorm, hook);
        let report = alg.check_coassociativity(&target).unwrap();
        assert!(!report.holds);
        let (_, lhs, rhs) = report.witness.unwrap();
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn non_generators_are_rejected() {
        let alg = HopfAlgebra::new(CoproductMode::Phi4Renorm);
        let b = fixtures::bubble();
        assert_eq!(
            alg.coproduct(&b.disjoint_union(&b)),
            Err(HopfError::Graph(GraphError::Disconnected))
        );
    }

    #[test]
    fn multiplicativity_on_unions() {
        for mode in CoproductMode::ALL {
            let alg = HopfAlgebra::new(mode);
            assert!(alg.check_multiplicativity(&fixtures::chain(), &fixtures::bubble()).unwrap());
            assert!(alg.check_multiplicativity(&fixtures::sunset_p(), &fixtures::tadpole_p()).unwrap());
        }
    }
}
