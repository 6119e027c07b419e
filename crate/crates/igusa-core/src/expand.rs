//! The cyclotomic expansion 1 - uY - vY = Q_M + W_M.
//!
//! Q_M is a finite product of trinomials P^[eps]_(r,n,m) indexed by lattice
//! points (r, n, m) with r + 2n = m < M, and the remainder W_M is supported
//! entirely on lattice levels m >= M. Specializing u, v, X, Y to pi_p,
//! conj(pi_p), p, p^{-s} turns each P-factor into a shifted Euler factor
//! Z^[eps]_r(ms - n), which is what makes this expansion the engine of
//! meromorphic continuation for the global Igusa product.
//!
//! The factor exponents are produced by a greedy level-by-level algorithm:
//! at each level m the current remainder is symmetric and supported on levels
//! >= m, and multiplying by (P^[eps]_(r,n,m))^c with c the absolute value of
//! an offending coefficient (and eps the sign that cancels it) clears that
//! basis term without disturbing anything at or below level m. Lower levels
//! stay clear because every correction a P-factor introduces lives strictly
//! above its own level.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::ring::{Monomial, RingElement, SymElement};

/// Default cap on stored monomials during expansion.
pub const DEFAULT_EXPANSION_BUDGET: usize = 1_000_000;

/// A point of the lattice: (r, n, m) with r + 2n = m, m >= 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LatticePoint {
    pub r: u32,
    pub n: u32,
    pub m: u32,
}

impl LatticePoint {
    pub fn new(r: u32, n: u32, m: u32) -> Result<Self> {
        if m >= 1 && r + 2 * n == m {
            Ok(LatticePoint { r, n, m })
        } else {
            Err(Error::NotInLattice { r, n, m })
        }
    }

    /// Weight Theta = (r + 2n + 2) / (2m); on the lattice this is exactly
    /// 1/2 + 1/m, the abscissa controlling the corresponding Euler factor.
    pub fn weight(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.r + 2 * self.n + 2),
            BigInt::from(2 * self.m),
        )
    }

    /// Membership in the truncated lattice: m < M.
    pub fn in_level_range(&self, big_m: u32) -> bool {
        self.m < big_m
    }
}

/// The trinomial P^[eps]_(r,n,m) at a lattice point:
/// 1 - eps (u^r + v^r) X^n Y^m + X^{r+2n} Y^{2m} for r >= 1, and the binomial
/// 1 - eps X^n Y^m for r = 0.
pub fn p_poly(r: u32, n: u32, m: u32, eps: i8) -> Result<RingElement> {
    LatticePoint::new(r, n, m)?;
    Ok(p_poly_unchecked(r, n, m, eps))
}

/// Same trinomial shape without the lattice membership check.
///
/// The symmetric-power recursions multiply P-shapes at off-lattice triples
/// such as (2, 0, 1); the formula is meaningful there even though the
/// expansion algorithm itself only ever uses lattice points.
pub fn p_poly_unchecked(r: u32, n: u32, m: u32, eps: i8) -> RingElement {
    debug_assert!(eps == 1 || eps == -1);
    let mut e = RingElement::one();
    if r == 0 {
        e.add_term(Monomial::new(0, 0, n, m), BigInt::from(-(eps as i64)));
    } else {
        e.add_term(Monomial::new(r, 0, n, m), BigInt::from(-(eps as i64)));
        e.add_term(Monomial::new(0, r, n, m), BigInt::from(-(eps as i64)));
        e.add_term(Monomial::new(0, 0, r + 2 * n, 2 * m), BigInt::from(1));
    }
    e
}

/// S^[n](Y) = prod_{i=0}^{n} (1 - u^i v^{n-i} Y), expanded and canonical.
/// Its specialization at (alpha_p, beta_p, 1, p^{-s}) is the reciprocal of
/// the n-th symmetric-power local L-factor.
pub fn s_poly(n: u32) -> RingElement {
    let mut acc = RingElement::one();
    for i in 0..=n {
        let mut f = RingElement::one();
        f.add_term(Monomial::new(i, n - i, 0, 1), BigInt::from(-1));
        acc = &acc * &f;
    }
    acc
}

/// One factor (P^[eps]_w)^c of Q_M.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub point: LatticePoint,
    pub eps: i8,
    pub c: u64,
}

/// Result of the expansion to level M: the factor list, the product Q_M,
/// and the remainder W_M in the symmetric basis.
#[derive(Clone, Debug)]
pub struct ExpansionResult {
    pub m: u32,
    pub factors: Vec<Factor>,
    pub q_m: RingElement,
    pub w_m: SymElement,
}

impl ExpansionResult {
    /// Exact identity check: (1 - uY - vY) - Q_M - W_M = 0 in R.
    pub fn identity_holds(&self) -> bool {
        let lhs = &RingElement::one_minus_uy_minus_vy() - &self.q_m;
        lhs == self.w_m.to_ring()
    }
}

/// Greedy level-by-level expansion up to level M >= 1.
///
/// Level 1 starts from W = -(u + v)Y, so the first factor is always
/// P^[+1]_(1,0,1); each subsequent level m < M clears every surviving basis
/// term a * beta_r X^n Y^m by multiplying Q with (P^[eps]_(r,n,m))^|a| where
/// eps = -sign(a). Terms within one level are processed in lexicographic
/// (r, n) order; the results are order-independent (same-level factors
/// commute and each cancels a distinct basis term) but the fixed order keeps
/// output byte-stable.
pub fn cyclotomic_expand(big_m: u32, budget: usize) -> Result<ExpansionResult> {
    if big_m < 1 {
        return Err(Error::Domain("expansion level M must be >= 1".into()));
    }
    let lhs = RingElement::one_minus_uy_minus_vy();
    let mut q = RingElement::one();
    let mut factors: Vec<Factor> = Vec::new();

    for level in 1..big_m {
        let w = (&lhs - &q).symmetric_decompose()?;
        // Snapshot this level's terms; keys sort lexicographically in
        // (r, n, m), which for fixed m is the required (r, n) order.
        let mut todo: Vec<(u32, u32, BigInt)> = Vec::new();
        for (&(r, n, m), a) in w.terms() {
            if m < level {
                // The algorithm guarantees lower levels are already clear;
                // anything else is a bug, not a data error.
                panic!("expansion invariant broken: level-{m} term below current level {level}");
            }
            if m == level {
                if r + 2 * n != m {
                    panic!("expansion invariant broken: ({r}, {n}, {m}) off the lattice");
                }
                todo.push((r, n, a.clone()));
            }
        }
        for (r, n, a) in todo {
            let c = a
                .abs()
                .to_u64()
                .ok_or(Error::ExpansionBudget {
                    monomials: usize::MAX,
                    budget,
                })?;
            let eps: i8 = if a.is_negative() { 1 } else { -1 };
            let point = LatticePoint::new(r, n, level).expect("on lattice");
            let pf = p_poly(r, n, level, eps)?;
            for _ in 0..c {
                q = &q * &pf;
                if q.len() > budget {
                    return Err(Error::ExpansionBudget {
                        monomials: q.len(),
                        budget,
                    });
                }
            }
            factors.push(Factor { point, eps, c });
        }
    }

    let w_m = (&lhs - &q).symmetric_decompose()?;
    for (&(r, n, m), _) in w_m.terms() {
        if r + 2 * n != m || m < big_m {
            panic!("expansion postcondition broken: W_{big_m} key ({r}, {n}, {m})");
        }
    }
    Ok(ExpansionResult {
        m: big_m,
        factors,
        q_m: q,
        w_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn expand(m: u32) -> ExpansionResult {
        cyclotomic_expand(m, DEFAULT_EXPANSION_BUDGET).unwrap()
    }

    fn factor_tuples(e: &ExpansionResult) -> Vec<(u32, u32, u32, i8, u64)> {
        e.factors
            .iter()
            .map(|f| (f.point.r, f.point.n, f.point.m, f.eps, f.c))
            .collect()
    }

    fn w_tuples(e: &ExpansionResult) -> Vec<(u32, u32, u32, i64)> {
        e.w_m
            .terms()
            .map(|(&(r, n, m), c)| (r, n, m, c.to_i64().unwrap()))
            .collect()
    }

    #[test]
    fn p_poly_examples() {
        assert_eq!(p_poly(1, 0, 1, 1).unwrap().to_string(), "1 - uY - vY + XY^2");
        assert_eq!(p_poly(0, 1, 2, 1).unwrap().to_string(), "1 - XY^2");
        assert_eq!(
            p_poly(1, 1, 3, 1).unwrap().to_string(),
            "1 - uXY^3 - vXY^3 + X^3Y^6"
        );
        assert!(matches!(
            p_poly(0, 1, 1, 1),
            Err(Error::NotInLattice { r: 0, n: 1, m: 1 })
        ));
    }

    #[test]
    fn weight_is_half_plus_inverse_level() {
        for m in 1u32..=30 {
            for r in (0..=m).filter(|r| (m - r) % 2 == 0) {
                let n = (m - r) / 2;
                let w = LatticePoint::new(r, n, m).unwrap().weight();
                let expect = BigRational::new(BigInt::from(1), BigInt::from(2))
                    + BigRational::new(BigInt::from(1), BigInt::from(m));
                assert_eq!(w, expect);
            }
        }
    }

    #[test]
    fn expansion_m2_m3_m4_exact() {
        let e2 = expand(2);
        assert_eq!(factor_tuples(&e2), vec![(1, 0, 1, 1, 1)]);
        assert_eq!(w_tuples(&e2), vec![(0, 1, 2, -1)]); // W_2 = -XY^2

        let e3 = expand(3);
        assert_eq!(factor_tuples(&e3), vec![(1, 0, 1, 1, 1), (0, 1, 2, 1, 1)]);
        // W_3 = -(u+v)XY^3 + X^2 Y^4
        assert_eq!(w_tuples(&e3), vec![(0, 2, 4, 1), (1, 1, 3, -1)]);

        let e4 = expand(4);
        assert_eq!(
            factor_tuples(&e4),
            vec![(1, 0, 1, 1, 1), (0, 1, 2, 1, 1), (1, 1, 3, 1, 1)]
        );
        // W_4 = -X^2Y^4 - (u^2+v^2)XY^4 + X^3Y^6 + (u^2+v^2)X^2Y^6
        //       - (u+v)X^4Y^9 + X^5Y^10
        assert_eq!(
            w_tuples(&e4),
            vec![
                (0, 2, 4, -1),
                (0, 3, 6, 1),
                (0, 5, 10, 1),
                (1, 4, 9, -1),
                (2, 1, 4, -1),
                (2, 2, 6, 1),
            ]
        );
    }

    #[test]
    fn expansion_identity_and_support() {
        for m in 1u32..=8 {
            let e = expand(m);
            assert!(e.identity_holds(), "M = {m}");
            for (&(r, n, mm), c) in e.w_m.terms() {
                assert!(!c.is_zero());
                assert_eq!(r + 2 * n, mm, "W_{m} key ({r},{n},{mm}) off lattice");
                assert!(mm >= m, "W_{m} key at level {mm} below {m}");
            }
            for f in &e.factors {
                assert!(f.point.in_level_range(m));
                assert!(f.c > 0);
            }
        }
    }

    #[test]
    fn expansion_m8_structure() {
        // Frozen structural profile of the M = 8 expansion.
        let e = expand(8);
        assert_eq!(e.factors.len(), 13);
        assert_eq!(e.factors.iter().map(|f| f.c).max(), Some(5));
        assert_eq!(e.q_m.len(), 5726);
        assert_eq!(e.w_m.len(), 2916);
    }

    #[test]
    fn budget_guard() {
        match cyclotomic_expand(8, 100) {
            Err(Error::ExpansionBudget { budget: 100, .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn s_poly_small() {
        // S^[1] = (1 - uY)(1 - vY) = 1 - (u+v)Y + XY^2 = P^[+1]_(1,0,1)
        assert_eq!(s_poly(1), p_poly(1, 0, 1, 1).unwrap());
        // S^[2] = (1 - u^2 Y)(1 - uvY)(1 - v^2 Y) with uv = X:
        assert_eq!(
            s_poly(2).to_string(),
            "1 - u^2Y - v^2Y - XY + u^2XY^2 + v^2XY^2 + X^2Y^2 - X^3Y^3"
        );
    }

    #[test]
    fn s_recursions_exact() {
        // S^[2n] = P_(0,n,1) * prod_{i=1}^n P_(2i, n-i, 1)
        // S^[2n+1] = prod_{i=0}^n P_(2i+1, n-i, 1)
        // as exact ring identities (the P's sit at off-lattice triples).
        for n in 1u32..=6 {
            let mut even = p_poly_unchecked(0, n, 1, 1);
            for i in 1..=n {
                even = &even * &p_poly_unchecked(2 * i, n - i, 1, 1);
            }
            assert_eq!(s_poly(2 * n), even, "even recursion, n = {n}");

            let mut odd = RingElement::one();
            for i in 0..=n {
                odd = &odd * &p_poly_unchecked(2 * i + 1, n - i, 1, 1);
            }
            assert_eq!(s_poly(2 * n + 1), odd, "odd recursion, n = {n}");
        }
    }
}
