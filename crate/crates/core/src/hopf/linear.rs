use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::graph::CanonicalKey;

pub type Rational = BigRational;

pub fn rational(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// A multiset of connected graphs; the empty multiset is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<CanonicalKey>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn single(key: CanonicalKey) -> Self {
        Monomial(vec![key])
    }

    pub fn from_keys(mut keys: Vec<CanonicalKey>) -> Self {
        keys.sort();
        Monomial(keys)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[CanonicalKey] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Disjoint union.
    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut keys = Vec::with_capacity(self.0.len() + other.0.len());
        keys.extend_from_slice(&self.0);
        keys.extend_from_slice(&other.0);
        Monomial::from_keys(keys)
    }
}

/// Finite linear combination with exact rational coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct LinComb<K: Ord>(BTreeMap<K, Rational>);

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        LinComb(BTreeMap::new())
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(key: K, coeff: Rational) -> Self {
        let mut out = Self::zero();
        out.add_term(key, coeff);
        out
    }

    pub fn add_term(&mut self, key: K, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.0.entry(key);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &LinComb<K>, factor: &Rational) {
        for (k, c) in &other.0 {
            self.add_term(k.clone(), c * factor);
        }
    }

    pub fn add(&self, other: &LinComb<K>) -> LinComb<K> {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one());
        out
    }

    pub fn sub(&self, other: &LinComb<K>) -> LinComb<K> {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    pub fn scale(&self, factor: &Rational) -> LinComb<K> {
        let mut out = Self::zero();
        out.add_scaled(self, factor);
        out
    }

    pub fn neg(&self) -> LinComb<K> {
        self.scale(&-Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, key: &K) -> Rational {
        self.0.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First key where the two combinations differ, with both coefficients.
    pub fn first_difference(&self, other: &LinComb<K>) -> Option<(K, Rational, Rational)> {
        let diff = self.sub(other);
        diff.0
            .keys()
            .next()
            .map(|k| (k.clone(), self.coeff(k), other.coeff(k)))
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.0.iter().map(|(k, c)| (k, c.to_string())))
            .finish()
    }
}

/// Element of the graph algebra.
pub type Element = LinComb<Monomial>;
/// Element of its tensor square.
pub type Tensor = LinComb<(Monomial, Monomial)>;
/// Element of the triple tensor power.
pub type Triple = LinComb<(Monomial, Monomial, Monomial)>;

impl Element {
    pub fn unit() -> Element {
        Element::term(Monomial::unit(), Rational::one())
    }

    pub fn generator(key: CanonicalKey) -> Element {
        Element::term(Monomial::single(key), Rational::one())
    }

    pub fn monomial(m: Monomial) -> Element {
        Element::term(m, Rational::one())
    }
}

impl Tensor {
    pub fn unit() -> Tensor {
        Tensor::term((Monomial::unit(), Monomial::unit()), Rational::one())
    }

    /// Componentwise product in the tensor square.
    pub fn times(&self, other: &Tensor) -> Tensor {
        let mut out = Tensor::zero();
        for ((a1, a2), c) in self.iter() {
            for ((b1, b2), d) in other.iter() {
                out.add_term((a1.times(b1), a2.times(b2)), c * d);
            }
        }
        out
    }
}

/// Bilinear extension of disjoint union.
pub fn product(a: &Element, b: &Element) -> Element {
    let mut out = Element::zero();
    for (m, c) in a.iter() {
        for (n, d) in b.iter() {
            out.add_term(m.times(n), c * d);
        }
    }
    out
}

/// Coefficient of the unit monomial.
pub fn counit(a: &Element) -> Rational {
    a.coeff(&Monomial::unit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::commutative_key;

    #[test]
    fn product_laws() {
        let b = Element::generator(commutative_key(&fixtures::bubble()));
        let c = Element::generator(commutative_key(&fixtures::chain()));
        assert_eq!(product(&Element::unit(), &b), b);
        let bb = product(&b, &b);
        assert_eq!(bb.len(), 1);
        let (m, coeff) = bb.iter().next().unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(*coeff, rational(1));
        let lhs = product(&b.scale(&rational(2)), &c.scale(&rational(3)));
        assert_eq!(lhs, product(&b, &c).scale(&rational(6)));
        assert_eq!(product(&b, &c), product(&c, &b));
    }

    #[test]
    fn counit_values() {
        assert_eq!(counit(&Element::unit()), rational(1));
        let b = Element::generator(commutative_key(&fixtures::bubble()));
        assert_eq!(counit(&b), rational(0));
        let c = Element::generator(commutative_key(&fixtures::chain()));
        let mixed = Element::unit().scale(&rational(3)).add(&c.scale(&rational(5)));
        assert_eq!(counit(&mixed), rational(3));
    }

    #[test]
    fn cancellation_prunes_terms() {
        let b = Element::generator(commutative_key(&fixtures::bubble()));
        assert!(b.sub(&b).is_zero());
    }
}
