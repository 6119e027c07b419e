//! Exact sparse arithmetic in the commutative ring R = Z<u, v, X, Y | uv = X>.
//!
//! Every monomial reduces to the canonical form u^r1 v^r2 X^n Y^m with
//! min(r1, r2) = 0: each factor uv collapses to one X. Elements are sparse
//! maps from canonical monomials to arbitrary-precision integers, so all ring
//! identities here are exact, not floating-point approximations.
//!
//! Elements symmetric under u <-> v decompose uniquely over the basis
//! beta_r X^n Y^m, where beta_r = u^r + v^r for r >= 1 and beta_0 = 1
//! (the r = 0 basis element is 1, not u^0 + v^0 = 2, which is what keeps all
//! decomposition coefficients integral). [`SymElement`] stores that form.
//!
//! Specializing (u, v, X, Y) to complex numbers with u0 * v0 = X0 turns ring
//! identities into identities of Euler factors; [`RingElement::evaluate`]
//! enforces the relation within a relative tolerance before substituting.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Relative tolerance for the uv = X relation check in `evaluate`.
pub const EVAL_RELATION_TOL: f64 = 1e-9;

/// Canonical monomial u^r1 v^r2 X^n Y^m with min(r1, r2) = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub r1: u32,
    pub r2: u32,
    pub n: u32,
    pub m: u32,
}

impl Monomial {
    /// Canonicalize arbitrary exponents via uv -> X.
    pub fn new(r1: u32, r2: u32, n: u32, m: u32) -> Self {
        let k = r1.min(r2);
        Monomial {
            r1: r1 - k,
            r2: r2 - k,
            n: n + k,
            m,
        }
    }

    pub const ONE: Monomial = Monomial {
        r1: 0,
        r2: 0,
        n: 0,
        m: 0,
    };

    pub fn is_canonical(&self) -> bool {
        self.r1 == 0 || self.r2 == 0
    }

    fn mul(self, o: Monomial) -> Monomial {
        Monomial::new(self.r1 + o.r1, self.r2 + o.r2, self.n + o.n, self.m + o.m)
    }

    /// Image under the swap u <-> v (still canonical).
    fn swapped(self) -> Monomial {
        Monomial {
            r1: self.r2,
            r2: self.r1,
            n: self.n,
            m: self.m,
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for (name, e) in [("u", self.r1), ("v", self.r2), ("X", self.n), ("Y", self.m)] {
            if e == 1 {
                write!(f, "{name}")?;
                any = true;
            } else if e > 1 {
                write!(f, "{name}^{e}")?;
                any = true;
            }
        }
        if !any {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Exact sparse element of R. Invariant: no zero coefficients stored, all
/// keys canonical.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RingElement {
    terms: BTreeMap<Monomial, BigInt>,
}

impl RingElement {
    pub fn zero() -> Self {
        RingElement::default()
    }

    pub fn one() -> Self {
        RingElement::monomial(Monomial::ONE, 1)
    }

    /// Single term c * u^r1 v^r2 X^n Y^m (canonicalized).
    pub fn monomial(m: Monomial, c: impl Into<BigInt>) -> Self {
        let mut e = RingElement::default();
        e.add_term(m, c.into());
        e
    }

    /// 1 - uY - vY, the element every expansion here factors.
    pub fn one_minus_uy_minus_vy() -> Self {
        let mut e = RingElement::one();
        e.add_term(Monomial::new(1, 0, 0, 1), BigInt::from(-1));
        e.add_term(Monomial::new(0, 1, 0, 1), BigInt::from(-1));
        e
    }

    /// u^r + v^r for r >= 1; 1 for r = 0 (the beta_r basis element).
    pub fn beta(r: u32) -> Self {
        if r == 0 {
            return RingElement::one();
        }
        let mut e = RingElement::monomial(Monomial::new(r, 0, 0, 0), 1);
        e.add_term(Monomial::new(0, r, 0, 0), BigInt::from(1));
        e
    }

    /// Add c to the coefficient of monomial m, dropping zeros.
    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        debug_assert!(m.is_canonical());
        let entry = self.terms.entry(m).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Image under u <-> v.
    pub fn swap_uv(&self) -> Self {
        let mut out = RingElement::default();
        for (m, c) in &self.terms {
            out.add_term(m.swapped(), c.clone());
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.terms
            .iter()
            .all(|(m, c)| self.coeff(&m.swapped()) == *c)
    }

    /// Exact power by repeated multiplication.
    pub fn pow(&self, k: u64) -> Self {
        let mut acc = RingElement::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Decompose a symmetric element over the basis beta_r X^n Y^m.
    ///
    /// The canonical monomials come in mirror pairs (r, 0, n, m) and
    /// (0, r, n, m); symmetry forces equal coefficients, and the pair
    /// contributes its common coefficient at the basis key (r, n, m).
    /// Asymmetric input is rejected with a witness monomial.
    pub fn symmetric_decompose(&self) -> Result<SymElement> {
        let mut out = SymElement::default();
        for (m, c) in &self.terms {
            let mirror = m.swapped();
            if self.coeff(&mirror) != *c {
                return Err(Error::NotSymmetric {
                    witness: m.to_string(),
                });
            }
            if m.r2 > 0 {
                continue; // counted via its mirror with r1 > 0
            }
            out.add_term((m.r1, m.n, m.m), c.clone());
        }
        Ok(out)
    }

    /// Numeric specialization at (u0, v0, X0, Y0); requires u0 * v0 = X0
    /// within [`EVAL_RELATION_TOL`] relative tolerance.
    pub fn evaluate(
        &self,
        u0: Complex64,
        v0: Complex64,
        x0: Complex64,
        y0: Complex64,
    ) -> Result<Complex64> {
        check_relation(u0, v0, x0)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let t = u0.powu(m.r1) * v0.powu(m.r2) * x0.powu(m.n) * y0.powu(m.m);
            acc += big_to_f64(c) * t;
        }
        Ok(acc)
    }
}

/// uv = X within relative tolerance: |u0 v0 - X0| <= tol * max(|u0 v0|, |X0|).
pub fn check_relation(u0: Complex64, v0: Complex64, x0: Complex64) -> Result<()> {
    let prod = u0 * v0;
    let dev = (prod - x0).norm();
    let scale = prod.norm().max(x0.norm());
    if dev > EVAL_RELATION_TOL * scale {
        return Err(Error::RelationViolated {
            deviation: dev,
            tol: EVAL_RELATION_TOL,
        });
    }
    Ok(())
}

fn big_to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(if c.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        let mut out = RingElement::default();
        for (m, c) in &self.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        let mut out = RingElement::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(*mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Display order: by Y-level, then X, then u before v.
        let mut sorted: Vec<_> = self.terms.iter().collect();
        sorted.sort_by_key(|(m, _)| (m.m, m.n, std::cmp::Reverse(m.r1), m.r2));
        for (idx, (m, c)) in sorted.into_iter().enumerate() {
            let mono = m.to_string();
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if a == BigInt::from(1) && mono != "1" {
                write!(f, "{mono}")?;
            } else if mono == "1" {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

/// Symmetric element in the beta_r X^n Y^m basis: map (r, n, m) -> integer.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymElement {
    terms: BTreeMap<(u32, u32, u32), BigInt>,
}

impl SymElement {
    pub fn add_term(&mut self, key: (u32, u32, u32), c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coeff(&self, key: &(u32, u32, u32)) -> BigInt {
        self.terms.get(key).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Keys (r, n, m) with coefficients, in lexicographic key order.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Expand back into R; exact inverse of `symmetric_decompose`.
    pub fn to_ring(&self) -> RingElement {
        let mut out = RingElement::default();
        for (&(r, n, m), c) in &self.terms {
            if r == 0 {
                out.add_term(Monomial::new(0, 0, n, m), c.clone());
            } else {
                out.add_term(Monomial::new(r, 0, n, m), c.clone());
                out.add_term(Monomial::new(0, r, n, m), c.clone());
            }
        }
        out
    }

    /// Numeric specialization; beta_r maps to u0^r + v0^r (1 for r = 0).
    pub fn evaluate(
        &self,
        u0: Complex64,
        v0: Complex64,
        x0: Complex64,
        y0: Complex64,
    ) -> Result<Complex64> {
        check_relation(u0, v0, x0)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(r, n, m), c) in &self.terms {
            let beta = if r == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                u0.powu(r) + v0.powu(r)
            };
            acc += big_to_f64(c) * beta * x0.powu(n) * y0.powu(m);
        }
        Ok(acc)
    }
}

impl fmt::Display for SymElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ring())
    }
}
