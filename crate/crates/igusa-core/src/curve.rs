//! Elliptic curve reductions: bad primes, exact point counts mod p and p^n,
//! and Frobenius data (C_p, a_p, lambda_p, pi_p, b_p).
//!
//! Counts are affine throughout: C_p is the number of solutions of
//! f(x, y) = 0 in (Z/pZ)^2. The projective count N_p = C_p + 1 is derived.
//! All downstream analytic objects consume [`FrobeniusData`] assembled here.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes;
use crate::sweep;

/// Default search bound for bad primes of a general (non-Weierstrass) curve.
pub const DEFAULT_BAD_PRIME_SEARCH_BOUND: u64 = 1_000;

/// Default budget for exhaustive p-adic enumeration, in (x, y) pairs.
pub const DEFAULT_ORACLE_BUDGET: u64 = 200_000_000;

/// Defining polynomial of the curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveModel {
    /// y^2 = x^3 + A x + B, i.e. f(x, y) = y^2 - x^3 - A x - B.
    Weierstrass { a: i64, b: i64 },
    /// General integer polynomial: sum of c * x^i * y^j over the term list.
    Poly { terms: Vec<(u32, u32, i64)> },
}

/// An elliptic curve given by an integer polynomial f(x, y), plus a
/// user-declared complex-multiplication flag (CM detection is out of scope).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CurveJson", into = "CurveJson")]
pub struct CurveSpec {
    pub model: CurveModel,
    pub cm: bool,
}

/// JSON shape: {"weierstrass": [A, B], "cm": true} or {"poly": [[i, j, c], ...]}.
#[derive(Serialize, Deserialize)]
struct CurveJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    weierstrass: Option<[i64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    poly: Option<Vec<(u32, u32, i64)>>,
    #[serde(default)]
    cm: bool,
}

impl TryFrom<CurveJson> for CurveSpec {
    type Error = Error;
    fn try_from(j: CurveJson) -> Result<Self> {
        match (j.weierstrass, j.poly) {
            (Some([a, b]), None) => CurveSpec::weierstrass(a, b, j.cm),
            (None, Some(terms)) => CurveSpec::from_poly(terms, j.cm),
            _ => Err(Error::InvalidCurve(
                "exactly one of \"weierstrass\" or \"poly\" must be given".into(),
            )),
        }
    }
}

impl From<CurveSpec> for CurveJson {
    fn from(c: CurveSpec) -> Self {
        match c.model {
            CurveModel::Weierstrass { a, b } => CurveJson {
                weierstrass: Some([a, b]),
                poly: None,
                cm: c.cm,
            },
            CurveModel::Poly { terms } => CurveJson {
                weierstrass: None,
                poly: Some(terms),
                cm: c.cm,
            },
        }
    }
}

/// Per-prime Frobenius record. `lambda_p` is `None` exactly when p^2 = C_p
/// (possible only at p = 2, where a_2 = -2 meets the Hasse bound); operations
/// that need lambda_p reject such primes explicitly instead of dividing by zero.
#[derive(Clone, Debug)]
pub struct FrobeniusData {
    pub p: u64,
    /// Affine point count mod p.
    pub c_p: u64,
    /// Trace of Frobenius, a_p = p - C_p.
    pub a_p: i64,
    /// (p - 1) C_p / (p^2 - C_p), exact; None when p^2 = C_p.
    pub lambda_p: Option<BigRational>,
    /// Frobenius root with nonnegative imaginary part; pi_p * conj(pi_p) = p.
    pub pi_p: Complex64,
    /// Normalized trace a_p / sqrt(p), in [-2, 2].
    pub b_p: f64,
}

impl FrobeniusData {
    /// Projective point count N_p = C_p + 1.
    pub fn n_p(&self) -> u64 {
        self.c_p + 1
    }

    pub fn pi_bar(&self) -> Complex64 {
        self.pi_p.conj()
    }

    /// lambda_p, or the explicit degenerate-normalization error.
    pub fn lambda(&self) -> Result<&BigRational> {
        self.lambda_p
            .as_ref()
            .ok_or(Error::DegenerateLambda { p: self.p })
    }
}

impl CurveSpec {
    /// Short Weierstrass curve y^2 = x^3 + A x + B; rejects discriminant 0.
    pub fn weierstrass(a: i64, b: i64, cm: bool) -> Result<Self> {
        let spec = CurveSpec {
            model: CurveModel::Weierstrass { a, b },
            cm,
        };
        if spec.discriminant().expect("weierstrass") == BigInt::from(0) {
            return Err(Error::SingularCurve);
        }
        Ok(spec)
    }

    /// General integer polynomial curve from (i, j, c) monomials.
    /// Duplicate monomials are combined; zero terms dropped.
    pub fn from_poly(terms: Vec<(u32, u32, i64)>, cm: bool) -> Result<Self> {
        let mut map: std::collections::BTreeMap<(u32, u32), i64> = Default::default();
        for (i, j, c) in terms {
            let e = map.entry((i, j)).or_insert(0);
            *e = e.checked_add(c).ok_or_else(|| {
                Error::InvalidCurve(format!("coefficient overflow at x^{i} y^{j}"))
            })?;
        }
        let terms: Vec<(u32, u32, i64)> = map
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|((i, j), c)| (i, j, c))
            .collect();
        if terms.is_empty() {
            return Err(Error::InvalidCurve("zero polynomial".into()));
        }
        if !terms.iter().any(|&(_, j, _)| j > 0) {
            return Err(Error::InvalidCurve("polynomial does not involve y".into()));
        }
        Ok(CurveSpec {
            model: CurveModel::Poly { terms },
            cm,
        })
    }

    /// The running example y^2 = x^3 - x (CM curve, bad prime 2).
    pub fn example_cm() -> Self {
        CurveSpec::weierstrass(-1, 0, true).expect("nonsingular")
    }

    /// Discriminant -16(4A^3 + 27B^2) for Weierstrass input; None for general f.
    pub fn discriminant(&self) -> Option<BigInt> {
        match self.model {
            CurveModel::Weierstrass { a, b } => {
                let a = BigInt::from(a);
                let b = BigInt::from(b);
                Some(BigInt::from(-16) * (BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b))
            }
            CurveModel::Poly { .. } => None,
        }
    }

    /// Canonical term list of f(x, y): Weierstrass curves expand to
    /// y^2 - x^3 - A x - B.
    pub fn poly_terms(&self) -> Vec<(u32, u32, i64)> {
        match &self.model {
            CurveModel::Weierstrass { a, b } => {
                let mut t = vec![(0u32, 2u32, 1i64), (3, 0, -1)];
                if *a != 0 {
                    t.push((1, 0, -*a));
                }
                if *b != 0 {
                    t.push((0, 0, -*b));
                }
                t
            }
            CurveModel::Poly { terms } => terms.clone(),
        }
    }

    /// Bad primes. Weierstrass: exactly the prime divisors of the
    /// discriminant. General f: primes p <= search_bound at which the
    /// reduction has a singular point (larger bad primes, if any, are not
    /// detected; see crate docs for the caveat).
    pub fn bad_primes(&self, search_bound: u64) -> Result<Vec<u64>> {
        match self.model {
            CurveModel::Weierstrass { .. } => {
                let disc = self.discriminant().expect("weierstrass");
                if disc == BigInt::from(0) {
                    return Err(Error::SingularCurve);
                }
                factor_prime_divisors(&disc)
            }
            CurveModel::Poly { .. } => {
                let mut bad = Vec::new();
                for p in primes::primes_up_to(search_bound) {
                    if self.singular_mod_p(p) {
                        bad.push(p);
                    }
                }
                Ok(bad)
            }
        }
    }

    /// Whether p is a bad prime. For general f this scans (F_p)^2 and is
    /// intended for p up to the search bound; callers sweeping many primes
    /// should compute `bad_primes` once instead.
    pub fn is_bad_prime(&self, p: u64) -> bool {
        match self.model {
            CurveModel::Weierstrass { .. } => {
                let disc = self.discriminant().expect("weierstrass");
                (disc % BigInt::from(p)) == BigInt::from(0)
            }
            CurveModel::Poly { .. } => {
                p <= DEFAULT_BAD_PRIME_SEARCH_BOUND && self.singular_mod_p(p)
            }
        }
    }

    /// True when the reduction mod p has a point with f = f_x = f_y = 0
    /// (or is the zero polynomial mod p).
    pub fn singular_mod_p(&self, p: u64) -> bool {
        let terms = self.poly_terms();
        let f = reduce_terms(&terms, p);
        if f.is_empty() {
            return true; // identically zero mod p: degenerate, treat as bad
        }
        if p > 2 {
            if let Some((c2, c1, c0)) = self.y_quadratic_split() {
                if c2.rem_euclid(p as i64) != 0 {
                    return singular_quadratic_sweep(c2, &c1, &c0, p);
                }
            }
        }
        let fx = reduce_terms(&derivative_x(&terms), p);
        let fy = reduce_terms(&derivative_y(&terms), p);
        for x in 0..p {
            for y in 0..p {
                if eval_terms_mod(&f, x, y, p) == 0
                    && eval_terms_mod(&fx, x, y, p) == 0
                    && eval_terms_mod(&fy, x, y, p) == 0
                {
                    return true;
                }
            }
        }
        false
    }

    /// Exact affine count C_p = #{(x, y) in (Z/pZ)^2 : f = 0}.
    ///
    /// Weierstrass curves use an O(p) x-sweep over a quadratic-residue table.
    /// General polynomials quadratic in y with a constant y^2 coefficient use
    /// an O(p) complete-the-square sweep (odd p not dividing that coefficient);
    /// everything else falls back to the O(p^2) double loop.
    pub fn count_affine_points(&self, p: u64) -> u64 {
        assert!(p >= 2 && p < (1 << 31), "prime out of supported range");
        if let CurveModel::Weierstrass { a, b } = self.model {
            if p > 2 {
                return count_weierstrass_sweep(a, b, p);
            }
        }
        if p > 2 {
            if let Some((c2, c1, c0)) = self.y_quadratic_split() {
                if c2.rem_euclid(p as i64) != 0 {
                    return count_quadratic_sweep(c2, &c1, &c0, p);
                }
            }
        }
        self.count_affine_points_reference(p)
    }

    /// Independent O(p^2) double-loop counter, used as a cross-check oracle
    /// for the sweep counters and for primes the sweeps cannot handle.
    pub fn count_affine_points_reference(&self, p: u64) -> u64 {
        count_pairs_mod(&self.poly_terms(), p)
    }

    /// Split f = c2 y^2 + c1(x) y + c0(x) when f is quadratic in y with a
    /// constant y^2 coefficient. Returns (c2, c1 terms, c0 terms) in x.
    fn y_quadratic_split(&self) -> Option<(i64, Vec<(u32, i64)>, Vec<(u32, i64)>)> {
        let terms = self.poly_terms();
        let mut c2 = None;
        let mut c1 = Vec::new();
        let mut c0 = Vec::new();
        for (i, j, c) in terms {
            match j {
                0 => c0.push((i, c)),
                1 => c1.push((i, c)),
                2 if i == 0 => c2 = Some(c),
                _ => return None, // x^i y^2 with i > 0, or y-degree > 2
            }
        }
        c2.map(|c2| (c2, c1, c0))
    }

    /// Exact solution count of f = 0 in (Z/p^n Z)^2 by exhaustive enumeration
    /// of all p^{2n} pairs. This is the independent p-adic oracle: it never
    /// uses the smooth-lifting count it is meant to certify.
    pub fn count_points_mod_pn(&self, p: u64, n: u32, budget: u64) -> Result<u64> {
        let mut m: u64 = 1;
        for _ in 0..n {
            m = m
                .checked_mul(p)
                .ok_or(Error::OracleBudget {
                    needed: u128::MAX,
                    budget: budget as u128,
                })?;
        }
        let needed = (m as u128) * (m as u128);
        if needed > budget as u128 {
            return Err(Error::OracleBudget {
                needed,
                budget: budget as u128,
            });
        }
        assert!(m < (1 << 31), "modulus out of u64-safe range");
        Ok(count_pairs_mod(&self.poly_terms(), m))
    }

    /// Assemble the full Frobenius record at a good prime.
    pub fn frobenius_data(&self, p: u64) -> Result<FrobeniusData> {
        if self.is_bad_prime(p) {
            return Err(Error::BadPrime {
                p,
                reason: "singular reduction".into(),
            });
        }
        self.frobenius_data_unchecked(p)
    }

    /// Frobenius data without the bad-prime scan; for use inside sweeps that
    /// have already excluded the bad set.
    fn frobenius_data_unchecked(&self, p: u64) -> Result<FrobeniusData> {
        let c_p = self.count_affine_points(p);
        let a_p = p as i64 - c_p as i64;
        // Hasse bound, checked exactly in integers. A violation means the
        // reduction is not an elliptic curve (e.g. an undetected bad prime).
        if (a_p as i128) * (a_p as i128) > 4 * p as i128 {
            return Err(Error::BadPrime {
                p,
                reason: format!("Hasse bound violated: a_p = {a_p}"),
            });
        }
        let p2 = (p as i128) * (p as i128);
        let denom = p2 - c_p as i128;
        let lambda_p = if denom == 0 {
            None
        } else {
            Some(BigRational::new(
                BigInt::from((p as i128 - 1) * c_p as i128),
                BigInt::from(denom),
            ))
        };
        let disc = (4.0 * p as f64 - (a_p * a_p) as f64).max(0.0);
        let pi_p = Complex64::new(a_p as f64 / 2.0, disc.sqrt() / 2.0);
        Ok(FrobeniusData {
            p,
            c_p,
            a_p,
            lambda_p,
            pi_p,
            b_p: a_p as f64 / (p as f64).sqrt(),
        })
    }

    /// Frobenius data for every good prime <= cutoff, ascending, parallel
    /// per the `parallel` feature.
    pub fn frobenius_sweep(&self, cutoff: u64) -> Result<Vec<FrobeniusData>> {
        let ps = self.good_primes(cutoff)?;
        let results = sweep::map_primes(&ps, |p| self.frobenius_data_unchecked(p));
        results.into_iter().collect()
    }

    /// Sequential variant of [`frobenius_sweep`](Self::frobenius_sweep), for
    /// single-threaded baselines.
    pub fn frobenius_sweep_seq(&self, cutoff: u64) -> Result<Vec<FrobeniusData>> {
        let ps = self.good_primes(cutoff)?;
        let results = sweep::map_primes_seq(&ps, |p| self.frobenius_data_unchecked(p));
        results.into_iter().collect()
    }

    /// Good primes <= cutoff, ascending.
    pub fn good_primes(&self, cutoff: u64) -> Result<Vec<u64>> {
        let bad: BTreeSet<u64> = match self.model {
            CurveModel::Weierstrass { .. } => {
                // Membership by divisibility, complete for every p <= cutoff.
                let disc = self.discriminant().expect("weierstrass");
                primes::primes_up_to(cutoff)
                    .into_iter()
                    .filter(|&p| (&disc % BigInt::from(p)) == BigInt::from(0))
                    .collect()
            }
            CurveModel::Poly { .. } => self
                .bad_primes(DEFAULT_BAD_PRIME_SEARCH_BOUND)?
                .into_iter()
                .collect(),
        };
        Ok(primes::primes_up_to(cutoff)
            .into_iter()
            .filter(|p| !bad.contains(p))
            .collect())
    }
}

/// Prime divisors of a nonzero integer, via trial division up to 10^6 and a
/// primality test on the cofactor. Discriminants of test curves are tiny;
/// a large composite cofactor is reported rather than silently dropped.
fn factor_prime_divisors(n: &BigInt) -> Result<Vec<u64>> {
    use num_traits::{Signed, ToPrimitive, Zero};
    let mut n = n.abs();
    if n.is_zero() {
        return Err(Error::SingularCurve);
    }
    let mut out = Vec::new();
    let mut d: u64 = 2;
    while d <= 1_000_000 {
        let db = BigInt::from(d);
        if (&n % &db) == BigInt::from(0) {
            out.push(d);
            while (&n % &db) == BigInt::from(0) {
                n /= &db;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > BigInt::from(1) {
        // Trial division exhausted divisors below 10^6: any cofactor below
        // 10^12 is prime outright.
        if let Some(v) = n.to_u64() {
            if v < 1_000_000_000_000 || primes::is_prime(v) {
                out.push(v);
                return Ok(out);
            }
        }
        return Err(Error::Domain(format!(
            "discriminant has an unfactored cofactor {n}; bad-prime set undetermined"
        )));
    }
    Ok(out)
}

fn mod_i64(c: i64, m: u64) -> u64 {
    c.rem_euclid(m as i64) as u64
}

/// Reduce an (i, j, c) term list mod m, dropping vanishing terms.
fn reduce_terms(terms: &[(u32, u32, i64)], m: u64) -> Vec<(u32, u32, u64)> {
    terms
        .iter()
        .map(|&(i, j, c)| (i, j, mod_i64(c, m)))
        .filter(|&(_, _, c)| c != 0)
        .collect()
}

fn derivative_x(terms: &[(u32, u32, i64)]) -> Vec<(u32, u32, i64)> {
    terms
        .iter()
        .filter(|&&(i, _, _)| i > 0)
        .map(|&(i, j, c)| (i - 1, j, c.wrapping_mul(i as i64)))
        .collect()
}

fn derivative_y(terms: &[(u32, u32, i64)]) -> Vec<(u32, u32, i64)> {
    terms
        .iter()
        .filter(|&&(_, j, _)| j > 0)
        .map(|&(i, j, c)| (i, j - 1, c.wrapping_mul(j as i64)))
        .collect()
}

/// Evaluate a reduced term list at (x, y) mod m. m < 2^31 so u64 products
/// cannot overflow.
fn eval_terms_mod(terms: &[(u32, u32, u64)], x: u64, y: u64, m: u64) -> u64 {
    let mut acc = 0u64;
    for &(i, j, c) in terms {
        let mut t = c;
        for _ in 0..i {
            t = t * x % m;
        }
        for _ in 0..j {
            t = t * y % m;
        }
        acc = (acc + t) % m;
    }
    acc
}

/// Number of zeros of the term list over (Z/mZ)^2, by double loop with a
/// per-x Horner pass in y.
fn count_pairs_mod(terms: &[(u32, u32, i64)], m: u64) -> u64 {
    assert!(m < (1 << 31));
    let reduced = reduce_terms(terms, m);
    if reduced.is_empty() {
        return m * m; // zero polynomial
    }
    let deg_y = reduced.iter().map(|&(_, j, _)| j).max().unwrap() as usize;
    // Coefficient arrays in x, grouped by power of y.
    let mut by_j: Vec<Vec<u64>> = vec![Vec::new(); deg_y + 1];
    for &(i, j, c) in &reduced {
        let row = &mut by_j[j as usize];
        if row.len() <= i as usize {
            row.resize(i as usize + 1, 0);
        }
        row[i as usize] = (row[i as usize] + c) % m;
    }
    let mut count = 0u64;
    let mut g = vec![0u64; deg_y + 1];
    for x in 0..m {
        for (j, row) in by_j.iter().enumerate() {
            let mut acc = 0u64;
            for &c in row.iter().rev() {
                acc = (acc * x + c) % m;
            }
            g[j] = acc;
        }
        for y in 0..m {
            let mut acc = 0u64;
            for &c in g.iter().rev() {
                acc = (acc * y + c) % m;
            }
            if acc == 0 {
                count += 1;
            }
        }
    }
    count
}

/// O(p) Weierstrass count for odd p: per x, y^2 = x^3 + A x + B has
/// 1 + chi(g(x)) solutions in y, read off a square table.
fn count_weierstrass_sweep(a: i64, b: i64, p: u64) -> u64 {
    debug_assert!(p % 2 == 1);
    let sq = square_table(p);
    let am = mod_i64(a, p);
    let bm = mod_i64(b, p);
    let mut count = 0u64;
    for x in 0..p {
        let x2 = x * x % p;
        let g = (x2 * x % p + am * x % p + bm) % p;
        count += solutions_of_square(g, &sq);
    }
    count
}

/// O(p) count for f = c2 y^2 + c1(x) y + c0(x), odd p, p not dividing c2:
/// completing the square gives 1 + chi(c1^2 - 4 c2 c0) solutions per x.
fn count_quadratic_sweep(c2: i64, c1: &[(u32, i64)], c0: &[(u32, i64)], p: u64) -> u64 {
    debug_assert!(p % 2 == 1 && c2.rem_euclid(p as i64) != 0);
    let sq = square_table(p);
    let c1m = dense_coeffs(c1, p);
    let c0m = dense_coeffs(c0, p);
    let four_c2 = 4 * mod_i64(c2, p) % p;
    let mut count = 0u64;
    for x in 0..p {
        let v1 = horner(&c1m, x, p);
        let v0 = horner(&c0m, x, p);
        let d = (v1 * v1 % p + p - four_c2 * v0 % p) % p;
        count += solutions_of_square(d, &sq);
    }
    count
}

/// O(p) singularity test for f = c2 y^2 + c1(x) y + c0(x), odd p with p not
/// dividing c2. The unique critical y is -c1/(2 c2), where f = -D/(4 c2) and
/// f_x = -D'/(4 c2) with D = c1^2 - 4 c2 c0; singular iff D and D' share a
/// root mod p.
fn singular_quadratic_sweep(c2: i64, c1: &[(u32, i64)], c0: &[(u32, i64)], p: u64) -> bool {
    debug_assert!(p % 2 == 1 && c2.rem_euclid(p as i64) != 0);
    let c1m = dense_coeffs(c1, p);
    let c0m = dense_coeffs(c0, p);
    let d1m = dense_derivative(&c1m, p);
    let d0m = dense_derivative(&c0m, p);
    let four_c2 = 4 * mod_i64(c2, p) % p;
    for x in 0..p {
        let v1 = horner(&c1m, x, p);
        let v0 = horner(&c0m, x, p);
        if (v1 * v1 % p + p - four_c2 * v0 % p) % p != 0 {
            continue;
        }
        let w1 = horner(&d1m, x, p);
        let w0 = horner(&d0m, x, p);
        if (2 * v1 % p * w1 % p + p - four_c2 * w0 % p) % p == 0 {
            return true;
        }
    }
    false
}

fn dense_derivative(coeffs: &[u64], p: u64) -> Vec<u64> {
    if coeffs.len() <= 1 {
        return vec![0];
    }
    (1..coeffs.len())
        .map(|i| (i as u64 % p) * coeffs[i] % p)
        .collect()
}

fn square_table(p: u64) -> Vec<bool> {
    let mut sq = vec![false; p as usize];
    for y in 0..p {
        sq[(y * y % p) as usize] = true;
    }
    sq
}

fn solutions_of_square(g: u64, sq: &[bool]) -> u64 {
    if g == 0 {
        1
    } else if sq[g as usize] {
        2
    } else {
        0
    }
}

fn dense_coeffs(terms: &[(u32, i64)], p: u64) -> Vec<u64> {
    let deg = terms.iter().map(|&(i, _)| i).max().unwrap_or(0) as usize;
    let mut out = vec![0u64; deg + 1];
    for &(i, c) in terms {
        out[i as usize] = (out[i as usize] + mod_i64(c, p)) % p;
    }
    out
}

fn horner(coeffs: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = (acc * x + c) % p;
    }
    acc
}
