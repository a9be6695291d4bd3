use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::hopf::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("window mismatch: [{0}] against [{1}]")]
    WindowMismatch(Window, Window),
    #[error("exponent {exponent} outside window [{window}]")]
    OutOfWindow { exponent: i32, window: Window },
    #[error("bad window {0:?} (expected MIN:MAX with MIN <= 0 <= MAX)")]
    BadWindow(String),
}

/// Exponent range kept by a series, inclusive at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub min: i32,
    pub max: i32,
}

impl Window {
    pub const ENV: &'static str = "HOPFGRAPH_WINDOW";

    pub fn new(min: i32, max: i32) -> Result<Self, LaurentError> {
        if min > 0 || max < 0 {
            return Err(LaurentError::BadWindow(format!("{min}:{max}")));
        }
        Ok(Window { min, max })
    }

    /// The default window, or the one named by `HOPFGRAPH_WINDOW`.
    pub fn from_env() -> Result<Self, LaurentError> {
        match std::env::var(Self::ENV) {
            Ok(s) => s.parse(),
            Err(_) => Ok(Window::default()),
        }
    }

    pub fn contains(&self, e: i32) -> bool {
        self.min <= e && e <= self.max
    }
}

impl Default for Window {
    fn default() -> Self {
        Window { min: -8, max: 8 }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.min, self.max)
    }
}

impl FromStr for Window {
    type Err = LaurentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LaurentError::BadWindow(s.to_string());
        let (lo, hi) = s.trim().split_once(':').ok_or_else(bad)?;
        let min = lo.trim().parse().map_err(|_| bad())?;
        let max = hi.trim().parse().map_err(|_| bad())?;
        Window::new(min, max).map_err(|_| bad())
    }
}

/// Laurent series in ε with exact coefficients on a bounded window.
///
/// Products that would reach outside the window drop those terms and set
/// the dirty flag, which sticks through later arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    window: Window,
    coeffs: BTreeMap<i32, Rational>,
    dirty: bool,
}

impl LaurentSeries {
    pub fn zero(window: Window) -> Self {
        LaurentSeries {
            window,
            coeffs: BTreeMap::new(),
            dirty: false,
        }
    }

    pub fn one(window: Window) -> Self {
        Self::constant(window, Rational::one())
    }

    pub fn constant(window: Window, c: Rational) -> Self {
        let mut s = Self::zero(window);
        s.put(0, c);
        s
    }

    /// `c·ε^exponent`.
    pub fn monomial(window: Window, exponent: i32, c: Rational) -> Result<Self, LaurentError> {
        let mut s = Self::zero(window);
        s.add_coeff(exponent, c)?;
        Ok(s)
    }

    pub fn from_terms(
        window: Window,
        terms: impl IntoIterator<Item = (i32, Rational)>,
    ) -> Result<Self, LaurentError> {
        let mut s = Self::zero(window);
        for (e, c) in terms {
            s.add_coeff(e, c)?;
        }
        Ok(s)
    }

    pub fn add_coeff(&mut self, exponent: i32, c: Rational) -> Result<(), LaurentError> {
        if !self.window.contains(exponent) {
            return Err(LaurentError::OutOfWindow {
                exponent,
                window: self.window,
            });
        }
        self.put(exponent, c);
        Ok(())
    }

    fn put(&mut self, e: i32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i32) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Non-zero terms by increasing exponent.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    /// The terms whose exponent passes `keep`; the dirty flag is kept.
    pub fn retain(&self, keep: impl Fn(i32) -> bool) -> Self {
        let mut out = self.clone();
        out.coeffs.retain(|&e, _| keep(e));
        out
    }

    pub fn has_poles(&self) -> bool {
        self.coeffs.keys().any(|&e| e < 0)
    }

    fn check(&self, other: &Self) -> Result<(), LaurentError> {
        if self.window != other.window {
            return Err(LaurentError::WindowMismatch(self.window, other.window));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check(other)?;
        let mut out = self.clone();
        for (&e, c) in &other.coeffs {
            out.put(e, c.clone());
        }
        out.dirty |= other.dirty;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.window);
        for (&e, d) in &self.coeffs {
            out.put(e, d * c);
        }
        out.dirty = self.dirty;
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check(other)?;
        let mut out = Self::zero(self.window);
        out.dirty = self.dirty || other.dirty;
        for (&a, c) in &self.coeffs {
            for (&b, d) in &other.coeffs {
                let e = a + b;
                if self.window.contains(e) {
                    out.put(e, c * d);
                } else {
                    out.dirty = true;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self, LaurentError> {
        let mut out = Self::one(self.window);
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (&e, c)) in self.coeffs.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let unit = mag.is_one();
            match e {
                0 => write!(f, "{mag}")?,
                e if e < 0 => {
                    let den = if e == -1 { "ε".to_string() } else { format!("ε^{}", -e) };
                    if mag.denom().is_one() {
                        write!(f, "{}/{den}", mag.numer())?;
                    } else {
                        write!(f, "({mag})/{den}")?;
                    }
                }
                e => {
                    let pow = if e == 1 { "ε".to_string() } else { format!("ε^{e}") };
                    if unit {
                        f.write_str(&pow)?;
                    } else {
                        write!(f, "{mag}·{pow}")?;
                    }
                }
            }
        }
        if self.dirty {
            f.write_str(" (truncated)")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentSeries[{}]({self})", self.window)
    }
}
