//! Feynman-rule characters with values in truncated Laurent series, minimal
//! subtraction, and renormalization through the twisted antipode.

mod laurent;

use std::collections::HashMap;
use std::sync::RwLock;

use thiserror::Error;

use crate::graph::{canonical_key, commutative_key, CanonicalKey, FeynmanGraph, GraphError};
use crate::hopf::{rational, HopfAlgebra, HopfError, Monomial};

pub use laurent::{LaurentError, LaurentSeries, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenormError {
    #[error("arithmetic left the window while evaluating {0}")]
    Truncated(String),
    #[error("no Feynman rule for graph {0}")]
    MissingRule(String),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Hopf(#[from] HopfError),
}

impl From<GraphError> for RenormError {
    fn from(e: GraphError) -> Self {
        RenormError::Hopf(e.into())
    }
}

/// A linear map on the target algebra used to extract divergences.
pub trait Projection {
    fn project(&self, a: &LaurentSeries) -> LaurentSeries;
}

/// Keeps the strictly negative powers of ε.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MinimalSubtraction;

impl Projection for MinimalSubtraction {
    fn project(&self, a: &LaurentSeries) -> LaurentSeries {
        a.retain(|e| e < 0)
    }
}

/// `T(a)T(b) + T(ab) = T(aT(b)) + T(T(a)b)`.
pub fn rota_baxter_holds<P: Projection>(t: &P, a: &LaurentSeries, b: &LaurentSeries) -> Result<bool, LaurentError> {
    let ta = t.project(a);
    let tb = t.project(b);
    let lhs = ta.mul(&tb)?.add(&t.project(&a.mul(b)?))?;
    let rhs = t.project(&a.mul(&tb)?).add(&t.project(&ta.mul(b)?))?;
    Ok(lhs == rhs)
}

pub fn is_idempotent_on<P: Projection>(t: &P, a: &LaurentSeries) -> bool {
    let once = t.project(a);
    t.project(&once) == once
}

/// Value assigned to connected graphs without an explicit rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefaultRule {
    /// `((1+ε)/ε)^L`.
    Toy,
    /// `ε^-L`.
    PurePole,
}

/// A character on graphs: explicit values for some connected graphs and an
/// optional default depending on the loop number.
#[derive(Debug, Clone)]
pub struct FeynmanRules {
    window: Window,
    explicit: HashMap<CanonicalKey, LaurentSeries>,
    default: Option<DefaultRule>,
}

impl FeynmanRules {
    pub fn new(window: Window, default: Option<DefaultRule>) -> Self {
        FeynmanRules {
            window,
            explicit: HashMap::new(),
            default,
        }
    }

    pub fn toy(window: Window) -> Self {
        Self::new(window, Some(DefaultRule::Toy))
    }

    pub fn pure_pole(window: Window) -> Self {
        Self::new(window, Some(DefaultRule::PurePole))
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn default_rule(&self) -> Option<DefaultRule> {
        self.default
    }

    /// Sets the value of a connected graph, for both ribbon and commutative
    /// lookups.
    pub fn set(&mut self, graph: &FeynmanGraph, value: LaurentSeries) -> Result<(), RenormError> {
        if value.window() != self.window {
            return Err(LaurentError::WindowMismatch(value.window(), self.window).into());
        }
        self.explicit.insert(canonical_key(graph), value.clone());
        self.explicit.insert(commutative_key(graph), value);
        Ok(())
    }

    /// Sets a value under a raw key; only lookups of that key kind see it.
    pub fn set_key(&mut self, key: CanonicalKey, value: LaurentSeries) -> Result<(), RenormError> {
        if value.window() != self.window {
            return Err(LaurentError::WindowMismatch(value.window(), self.window).into());
        }
        self.explicit.insert(key, value);
        Ok(())
    }

    /// φ of a connected graph. An explicit ribbon rule wins over an explicit
    /// commutative one, which wins over the default.
    pub fn value(&self, graph: &FeynmanGraph) -> Result<LaurentSeries, RenormError> {
        if !self.explicit.is_empty() {
            for key in [canonical_key(graph), commutative_key(graph)] {
                if let Some(v) = self.explicit.get(&key) {
                    return Ok(v.clone());
                }
            }
        }
        let loops = graph.loop_number() as u32;
        match self.default {
            Some(DefaultRule::Toy) => {
                let base = LaurentSeries::from_terms(self.window, [(-1, rational(1)), (0, rational(1))])?;
                Ok(base.pow(loops)?)
            }
            Some(DefaultRule::PurePole) => {
                let base = LaurentSeries::monomial(self.window, -1, rational(1))?;
                Ok(base.pow(loops)?)
            }
            None => Err(RenormError::MissingRule(
                graph.name.clone().unwrap_or_else(|| canonical_key(graph).to_hex()),
            )),
        }
    }
}

/// φ of a monomial: the product of the factor values, 1 on the unit.
pub fn eval_rules(rules: &FeynmanRules, algebra: &HopfAlgebra, m: &Monomial) -> Result<LaurentSeries, RenormError> {
    let mut out = LaurentSeries::one(rules.window());
    for k in m.factors() {
        out = out.mul(&rules.value(&*algebra.representative(k)?)?)?;
    }
    Ok(out)
}

/// u∘ε: 1 on the unit, 0 elsewhere.
pub fn counit_character(window: Window, m: &Monomial) -> LaurentSeries {
    if m.is_unit() {
        LaurentSeries::one(window)
    } else {
        LaurentSeries::zero(window)
    }
}

fn clean(value: LaurentSeries, what: impl FnOnce() -> String) -> Result<LaurentSeries, RenormError> {
    if value.is_dirty() {
        Err(RenormError::Truncated(what()))
    } else {
        Ok(value)
    }
}

/// Computes counterterms and renormalized values for one algebra, one set
/// of Feynman rules and one projection. Counterterms are memoized by key.
pub struct Renormalizer<'a, P: Projection = MinimalSubtraction> {
    algebra: &'a HopfAlgebra,
    rules: &'a FeynmanRules,
    projection: P,
    counterterms: RwLock<HashMap<CanonicalKey, LaurentSeries>>,
}

impl<'a> Renormalizer<'a, MinimalSubtraction> {
    pub fn minimal(algebra: &'a HopfAlgebra, rules: &'a FeynmanRules) -> Self {
        Renormalizer::new(algebra, rules, MinimalSubtraction)
    }
}

impl<'a, P: Projection> Renormalizer<'a, P> {
    pub fn new(algebra: &'a HopfAlgebra, rules: &'a FeynmanRules, projection: P) -> Self {
        Renormalizer {
            algebra,
            rules,
            projection,
            counterterms: RwLock::default(),
        }
    }

    pub fn algebra(&self) -> &HopfAlgebra {
        self.algebra
    }

    pub fn window(&self) -> Window {
        self.rules.window()
    }

    pub fn phi_monomial(&self, m: &Monomial) -> Result<LaurentSeries, RenormError> {
        eval_rules(self.rules, self.algebra, m)
    }

    /// The Bogoliubov preparation `φ(Γ) + Σ φ₋(γ)φ(Γ/γ)` of a generator.
    pub fn prepared_key(&self, key: &CanonicalKey) -> Result<LaurentSeries, RenormError> {
        let graph = self.algebra.representative(key)?;
        let mut bar = self.rules.value(&graph)?;
        for ((left, right), c) in self.algebra.reduced_coproduct_key(key)?.iter() {
            let term = self.counterterm_monomial(left)?.mul(&self.phi_monomial(right)?)?;
            bar = bar.add(&term.scale(c))?;
        }
        clean(bar, || describe(&graph))
    }

    /// φ₋ of a generator.
    pub fn counterterm_key(&self, key: &CanonicalKey) -> Result<LaurentSeries, RenormError> {
        if let Some(v) = self.counterterms.read().unwrap().get(key) {
            return Ok(v.clone());
        }
        let value = self.projection.project(&self.prepared_key(key)?).neg();
        let mut table = self.counterterms.write().unwrap();
        Ok(table.entry(key.clone()).or_insert(value).clone())
    }

    /// φ₋ extended multiplicatively; φ₋(1) = 1.
    pub fn counterterm_monomial(&self, m: &Monomial) -> Result<LaurentSeries, RenormError> {
        let mut out = LaurentSeries::one(self.window());
        for k in m.factors() {
            out = out.mul(&self.counterterm_key(k)?)?;
        }
        clean(out, || "a product of counterterms".to_string())
    }

    /// φ₋ of a graph. Disconnected graphs are treated as products.
    pub fn twisted_antipode(&self, graph: &FeynmanGraph) -> Result<LaurentSeries, RenormError> {
        if graph.is_unit() {
            return Ok(LaurentSeries::one(self.window()));
        }
        if graph.is_connected() {
            self.algebra.check_generator(graph)?;
        } else {
            for c in graph.split_components() {
                self.algebra.check_generator(&c)?;
            }
        }
        let m = self.algebra.monomial_of(graph)?;
        self.counterterm_monomial(&m)
    }

    /// φ₊(Γ) = (id − T)(φ(Γ) + Σ φ₋(γ)φ(Γ/γ)).
    pub fn renormalize(&self, graph: &FeynmanGraph) -> Result<LaurentSeries, RenormError> {
        self.algebra.check_generator(graph)?;
        let key = self.algebra.intern(graph);
        let bar = self.prepared_key(&key)?;
        let out = bar.sub(&self.projection.project(&bar))?;
        clean(out, || describe(graph))
    }

    /// Σ over ΔΓ of f(left)·g(right).
    pub fn convolve<F, G>(&self, f: F, g: G, graph: &FeynmanGraph) -> Result<LaurentSeries, RenormError>
    where
        F: Fn(&Monomial) -> Result<LaurentSeries, RenormError>,
        G: Fn(&Monomial) -> Result<LaurentSeries, RenormError>,
    {
        let delta = self.algebra.coproduct(graph)?;
        let mut out = LaurentSeries::zero(self.window());
        for ((left, right), c) in delta.iter() {
            out = out.add(&f(left)?.mul(&g(right)?)?.scale(c))?;
        }
        clean(out, || describe(graph))
    }

    /// φ₊ as the convolution φ₋ ∗ φ.
    pub fn renormalize_by_convolution(&self, graph: &FeynmanGraph) -> Result<LaurentSeries, RenormError> {
        self.convolve(|m| self.counterterm_monomial(m), |m| self.phi_monomial(m), graph)
    }
}

fn describe(graph: &FeynmanGraph) -> String {
    graph.name.clone().unwrap_or_else(|| canonical_key(graph).to_hex())
}
