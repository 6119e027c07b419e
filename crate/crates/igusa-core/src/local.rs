//! The local Igusa zeta factor and its finite-level integration oracle.
//!
//! For a good prime p the closed form is
//!
//! ```text
//! I_E(s, p) = (1 - p^{-2} C_p) * (1 + lambda_p * t / (1 - t)),   t = p^{-(s+1)},
//! ```
//!
//! a rational function of p^{-s} with total mass exactly 1 at s = 0. The
//! oracle recomputes the defining p-adic integral level by level from honest
//! point counts mod p^k (no Hensel lifting shortcut), so agreement between
//! the two is evidence for the lifting law C_{p^k} = p^{k-1} C_p rather than
//! a restatement of it.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::curve::{CurveSpec, FrobeniusData};
use crate::error::{Error, Result};

/// How close p^{-(s+1)} may get to 1 before evaluation reports a pole.
pub const LOCAL_POLE_TOL: f64 = 1e-12;

/// Level-by-level truncation of the local integral at complex s.
///
/// `measures[k]` is mu(E_k) = C_{p^k} p^{-2k} for k = 0, ..., n_levels + 1;
/// the partial sum is sum_{k=0}^{n_levels} p^{-ks} (mu_k - mu_{k+1}) and the
/// tail bound dominates everything beyond it (finite only for Re(s) > -1).
#[derive(Clone, Debug)]
pub struct LevelTruncation {
    pub p: u64,
    pub n_levels: u32,
    pub measures: Vec<BigRational>,
    pub partial_sum: Complex64,
    pub tail_bound: f64,
}

/// Exact-rational counterpart of [`LevelTruncation`] at integer s >= 0.
#[derive(Clone, Debug)]
pub struct LevelTruncationExact {
    pub p: u64,
    pub n_levels: u32,
    pub measures: Vec<BigRational>,
    pub partial_sum: BigRational,
    pub tail_bound: BigRational,
}

/// p^e for complex e.
pub(crate) fn p_pow(p: u64, e: Complex64) -> Complex64 {
    (e * (p as f64).ln()).exp()
}

/// p^k as an exact rational, any integer k.
fn rat_pow(p: u64, k: i64) -> BigRational {
    let mag = BigInt::from(p).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

fn mass_factor_exact(fd: &FrobeniusData) -> BigRational {
    BigRational::one() - rat_pow(fd.p, -2) * BigRational::from_integer(BigInt::from(fd.c_p))
}

/// The normalized factor 1 + lambda_p t/(1-t), t = p^{-(s+1)}: the local term
/// of the global Euler product, with constant coefficient 1 in p^{-s}.
pub fn normalized_local_factor(fd: &FrobeniusData, s: Complex64) -> Result<Complex64> {
    let lambda = big_rat_f64(fd.lambda()?);
    let t = p_pow(fd.p, -(s + 1.0));
    let denom = Complex64::new(1.0, 0.0) - t;
    if denom.norm() < LOCAL_POLE_TOL {
        return Err(Error::Pole {
            s: format!("{s}"),
            context: format!("p^(-(s+1)) = 1 at p = {}", fd.p),
        });
    }
    Ok(Complex64::new(1.0, 0.0) + lambda * t / denom)
}

/// The closed form I_E(s, p) at complex s.
pub fn local_closed_form(fd: &FrobeniusData, s: Complex64) -> Result<Complex64> {
    let mass = 1.0 - fd.c_p as f64 / (fd.p as f64 * fd.p as f64);
    Ok(mass * normalized_local_factor(fd, s)?)
}

/// The closed form at integer s, in exact rational arithmetic.
pub fn local_closed_form_exact(fd: &FrobeniusData, s: i64) -> Result<BigRational> {
    if s == -1 {
        return Err(Error::Pole {
            s: "-1".into(),
            context: format!("p^(-(s+1)) = 1 at p = {}", fd.p),
        });
    }
    let lambda = fd.lambda()?;
    let t = rat_pow(fd.p, -(s + 1));
    let geom = &t / (BigRational::one() - &t);
    Ok(mass_factor_exact(fd) * (BigRational::one() + lambda * geom))
}

fn big_rat_f64(q: &BigRational) -> f64 {
    q.to_f64().expect("rational within f64 range")
}

/// Measures mu_0, ..., mu_{k_max} from the brute-force counter.
fn measures(curve: &CurveSpec, p: u64, k_max: u32, budget: u64) -> Result<Vec<BigRational>> {
    let mut mu = vec![BigRational::one()];
    for k in 1..=k_max {
        let count = curve.count_points_mod_pn(p, k, budget)?;
        mu.push(BigRational::from_integer(BigInt::from(count)) * rat_pow(p, -2 * k as i64));
    }
    Ok(mu)
}

/// Level-truncated local integral at complex s.
///
/// Counts points mod p^k for k <= n_levels + 1 (the last level is needed for
/// the final shell measure and the tail), so the enumeration budget must
/// cover p^{2(n_levels+1)}.
pub fn local_oracle(
    curve: &CurveSpec,
    p: u64,
    n_levels: u32,
    s: Complex64,
    budget: u64,
) -> Result<LevelTruncation> {
    let mu = measures(curve, p, n_levels + 1, budget)?;
    let ts = p_pow(p, -s);
    let mut partial = Complex64::new(0.0, 0.0);
    for k in 0..=n_levels as usize {
        let shell = big_rat_f64(&(&mu[k] - &mu[k + 1]));
        partial += ts.powu(k as u32) * shell;
    }
    let t_abs = p_pow(p, -(s + 1.0)).norm();
    let tail_bound = if t_abs < 1.0 {
        big_rat_f64(&mu[n_levels as usize + 1]) * ts.norm().powi(n_levels as i32 + 1)
            / (1.0 - t_abs)
    } else {
        f64::INFINITY
    };
    Ok(LevelTruncation {
        p,
        n_levels,
        measures: mu,
        partial_sum: partial,
        tail_bound,
    })
}

/// Level-truncated local integral at integer s >= 0, all in exact rationals.
/// The closed form lies within `tail_bound` of `partial_sum` as a statement
/// about rational numbers, no rounding anywhere.
pub fn local_oracle_exact(
    curve: &CurveSpec,
    p: u64,
    n_levels: u32,
    s: i64,
    budget: u64,
) -> Result<LevelTruncationExact> {
    if s < 0 {
        return Err(Error::Domain(format!(
            "exact oracle requires integer s >= 0, got {s}"
        )));
    }
    let mu = measures(curve, p, n_levels + 1, budget)?;
    let ts = rat_pow(p, -s);
    let mut partial = BigRational::zero();
    let mut ts_k = BigRational::one();
    for k in 0..=n_levels as usize {
        partial += &ts_k * (&mu[k] - &mu[k + 1]);
        ts_k *= &ts;
    }
    // ts_k is now ts^{n_levels+1}
    let tail = &mu[n_levels as usize + 1] * ts_k / (BigRational::one() - rat_pow(p, -(s + 1)));
    Ok(LevelTruncationExact {
        p,
        n_levels,
        measures: mu,
        partial_sum: partial,
        tail_bound: tail,
    })
}
