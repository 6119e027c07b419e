//! Truncated global Euler products and the continuation identities that
//! extend them.
//!
//! Everything here is a finite product over good primes with an explicit,
//! heuristic tail majorant. The interesting content is identity checking:
//! the first continuation rewrites each normalized local factor through
//! zeta(s+1), and the cyclotomic expansion turns 1 - a_p p^{-s} into
//! Q_M + W_M whose factors specialize to shifted Z-functions. Verifying
//! those identities per prime (and watching the W_M terms decay) is the
//! desk-scale counterpart of the meromorphic continuation proof.

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};

use crate::curve::{CurveSpec, FrobeniusData};
use crate::error::{Error, Result};
use crate::expand::{cyclotomic_expand, p_poly_unchecked, ExpansionResult, DEFAULT_EXPANSION_BUDGET};
use crate::local::{normalized_local_factor, p_pow};
use crate::primes::primes_in;
use crate::zeta::riemann_zeta;

/// Below this magnitude a factor counts as sitting on a pole/zero.
pub const FACTOR_POLE_TOL: f64 = 1e-12;

/// A truncated Euler product with bookkeeping.
#[derive(Clone, Debug)]
pub struct PartialProduct {
    pub value: Complex64,
    /// Sum of principal logs of the factors; exp(log_sum) ~ value.
    pub log_sum: Complex64,
    pub prime_cutoff: u64,
    pub n_factors: usize,
    /// Bad primes <= cutoff, excluded from the product.
    pub omitted_primes: Vec<u64>,
    /// Heuristic majorant for |log of the omitted good-prime tail|:
    /// explicit prime sum over (cutoff, 10 cutoff] plus an integral bound
    /// beyond. Diagnostic, not a proof.
    pub tail_estimate: f64,
    /// Whether s lies in the region where the defining product converges
    /// absolutely (tail estimate meaningful).
    pub certified: bool,
}

/// Unit-normalized Frobenius roots alpha_p = pi_p / sqrt(p), beta_p = conj.
#[derive(Clone, Copy, Debug)]
pub struct SatakeParams {
    pub p: u64,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl SatakeParams {
    pub fn new(fd: &FrobeniusData) -> Result<Self> {
        let alpha = fd.pi_p / (fd.p as f64).sqrt();
        let beta = alpha.conj();
        if (alpha.norm() - 1.0).abs() > 1e-12 || (alpha * beta - 1.0).norm() > 1e-12 {
            return Err(Error::Domain(format!(
                "Satake parameters off the unit circle at p = {}",
                fd.p
            )));
        }
        Ok(SatakeParams {
            p: fd.p,
            alpha,
            beta,
        })
    }
}

/// Heuristic log-tail majorant for a product whose per-prime log is bounded
/// by `term(p)` ~ A p^{-a}: explicit sum over primes in (cutoff, 10 cutoff]
/// plus the integral bound term(X) X / ((a-1) ln X) for the rest.
fn heuristic_tail(cutoff: u64, decay_exponent: f64, term: impl Fn(f64) -> f64) -> f64 {
    if decay_exponent <= 1.0 {
        return f64::INFINITY;
    }
    let hi = cutoff.saturating_mul(10).max(cutoff + 1);
    let mut sum: f64 = primes_in(cutoff, hi).iter().map(|&p| term(p as f64)).sum();
    let x = hi as f64;
    sum += term(x) * x / ((decay_exponent - 1.0) * x.ln());
    sum
}

fn product_over(
    curve: &CurveSpec,
    cutoff: u64,
    mut factor: impl FnMut(&FrobeniusData) -> Result<Complex64>,
) -> Result<(Complex64, Complex64, usize, Vec<u64>)> {
    let fds = curve.frobenius_sweep(cutoff)?;
    let mut value = Complex64::new(1.0, 0.0);
    let mut log_sum = Complex64::new(0.0, 0.0);
    let mut omitted: Vec<u64> = curve
        .bad_primes(cutoff.min(crate::curve::DEFAULT_BAD_PRIME_SEARCH_BOUND))?
        .into_iter()
        .filter(|&p| p <= cutoff)
        .collect();
    let mut n_factors = 0usize;
    for fd in &fds {
        match factor(fd) {
            Ok(f) => {
                value *= f;
                log_sum += f.ln();
                n_factors += 1;
            }
            // a good prime whose factor is undefined (p^2 = C_p) is omitted
            // like a bad one, not an error for the whole product
            Err(Error::DegenerateLambda { p }) => omitted.push(p),
            Err(e) => return Err(e),
        }
    }
    omitted.sort_unstable();
    Ok((value, log_sum, n_factors, omitted))
}

/// Truncated global Igusa product: normalized local factors over good
/// p <= cutoff. Converges absolutely for Re(s) > 0; elsewhere the value is
/// still the finite product but flagged uncertified.
///
/// The tail uses lambda_p <= 4 (valid for every good prime, since
/// C_p < 2p forces (p-1) C_p <= 4 (p^2 - C_p) already at p = 3).
pub fn igusa_global(curve: &CurveSpec, s: Complex64, cutoff: u64) -> Result<PartialProduct> {
    let (value, log_sum, n_factors, omitted) =
        product_over(curve, cutoff, |fd| normalized_local_factor(fd, s))?;
    let sigma = s.re;
    let tail_estimate = heuristic_tail(cutoff, sigma + 1.0, |x| {
        let t = x.powf(-(sigma + 1.0));
        4.0 * t / (1.0 - t)
    });
    Ok(PartialProduct {
        value,
        log_sum,
        prime_cutoff: cutoff,
        n_factors,
        omitted_primes: omitted,
        tail_estimate,
        certified: sigma > 0.0,
    })
}

/// The local factor of the first continuation, 1 - a_p p^{-s} / (p^2 - C_p);
/// exactly 1 when a_p = 0.
pub fn first_continuation_factor(fd: &FrobeniusData, s: Complex64) -> Result<Complex64> {
    let denom = (fd.p as i128) * (fd.p as i128) - fd.c_p as i128;
    if denom == 0 {
        return Err(Error::DegenerateLambda { p: fd.p });
    }
    Ok(Complex64::new(1.0, 0.0) - fd.a_p as f64 * p_pow(fd.p, -s) / denom as f64)
}

/// First continuation of the global product past Re(s) = 0.
#[derive(Clone, Debug)]
pub struct FirstContinuation {
    /// zeta(s+1) times the truncated product.
    pub value: Complex64,
    pub zeta_factor: Complex64,
    pub product: PartialProduct,
    /// max over p <= cutoff of the per-prime rewriting identity
    /// |(-t + lambda_p t) - (-a_p p^{-s} / (p^2 - C_p))|, t = p^{-(s+1)}.
    pub max_identity_residual: f64,
}

/// I_E(s) = zeta(s+1) * prod_p (1 - a_p p^{-s} / (p^2 - C_p)), the product
/// converging absolutely for Re(s) > -1/2. Reports the pole at s = 0
/// inherited from zeta(s+1).
pub fn first_continuation(
    curve: &CurveSpec,
    s: Complex64,
    cutoff: u64,
) -> Result<FirstContinuation> {
    if s.norm() < 1e-13 {
        return Err(Error::Pole {
            s: format!("{s}"),
            context: "zeta(s+1) has its pole at s = 0".into(),
        });
    }
    let zeta_factor = riemann_zeta(s + 1.0)?;
    let mut max_residual = 0.0f64;
    let (value, log_sum, n_factors, omitted) = product_over(curve, cutoff, |fd| {
        let factor = first_continuation_factor(fd, s)?;
        let t = p_pow(fd.p, -(s + 1.0));
        let lambda = fd
            .lambda()?
            .to_f64()
            .ok_or_else(|| Error::Domain("lambda_p outside f64 range".into()))?;
        let residual = ((lambda - 1.0) * t - (factor - 1.0)).norm();
        max_residual = max_residual.max(residual);
        Ok(factor)
    })?;
    let sigma = s.re;
    let tail_estimate = heuristic_tail(cutoff, sigma + 1.5, |x| {
        2.0 * x.sqrt() * x.powf(-sigma) / (x * x - x - 2.0 * x.sqrt())
    });
    Ok(FirstContinuation {
        value: zeta_factor * value,
        zeta_factor,
        product: PartialProduct {
            value,
            log_sum,
            prime_cutoff: cutoff,
            n_factors,
            omitted_primes: omitted,
            tail_estimate,
            certified: sigma > -0.5,
        },
        max_identity_residual: max_residual,
    })
}

/// The local Hasse-Weil data at s: numerator 1 - a_p p^{-s} + p^{1-2s},
/// its reciprocal (the Euler factor), and the full rational form
/// numerator / ((1 - p^{-s})(1 - p^{1-s})).
///
/// The numerator is entire, so it is always present; the other two forms
/// have genuine poles (the full form at s = 0 and s = 1 in particular) and
/// are None exactly there, which is how the pole is reported - at the
/// common sample point s = 1 only the numerator is finite.
#[derive(Clone, Copy, Debug)]
pub struct HasseWeilLocal {
    pub numerator: Complex64,
    /// None when the numerator vanishes (zeros lie on Re(s) = 1/2).
    pub euler_factor: Option<Complex64>,
    /// None when (1 - p^{-s})(1 - p^{1-s}) vanishes.
    pub full: Option<Complex64>,
}

pub fn hasse_weil_local(fd: &FrobeniusData, s: Complex64) -> HasseWeilLocal {
    let ps = p_pow(fd.p, -s);
    let numerator = Complex64::new(1.0, 0.0) - fd.a_p as f64 * ps + fd.p as f64 * ps * ps;
    let euler_factor = (numerator.norm() >= FACTOR_POLE_TOL).then(|| 1.0 / numerator);
    let d1 = Complex64::new(1.0, 0.0) - ps;
    let d2 = Complex64::new(1.0, 0.0) - fd.p as f64 * ps;
    let full = (d1.norm() >= FACTOR_POLE_TOL && d2.norm() >= FACTOR_POLE_TOL)
        .then(|| numerator / (d1 * d2));
    HasseWeilLocal {
        numerator,
        euler_factor,
        full,
    }
}

/// Reciprocal of the m-th symmetric-power local factor:
/// prod_{i=0}^m (1 - alpha^i beta^{m-i} p^{-s}), a polynomial in p^{-s}.
pub fn sym_power_reciprocal(sp: &SatakeParams, m: u32, s: Complex64) -> Complex64 {
    let ps = p_pow(sp.p, -s);
    let mut prod = Complex64::new(1.0, 0.0);
    for i in 0..=m {
        prod *= Complex64::new(1.0, 0.0) - sp.alpha.powu(i) * sp.beta.powu(m - i) * ps;
    }
    prod
}

/// L(s, omega_p, m) = prod_{i=0}^m (1 - alpha^i beta^{m-i} p^{-s})^{-1}.
pub fn sym_power_local(sp: &SatakeParams, m: u32, s: Complex64) -> Result<Complex64> {
    if m < 1 {
        return Err(Error::Domain("symmetric power m must be >= 1".into()));
    }
    let recip = sym_power_reciprocal(sp, m, s);
    if recip.norm() < FACTOR_POLE_TOL {
        return Err(Error::Pole {
            s: format!("{s}"),
            context: format!("symmetric-power factor m = {m} vanishes at p = {}", sp.p),
        });
    }
    Ok(1.0 / recip)
}

/// pi_p^r + conj(pi_p)^r as an exact integer, via the trace recurrence
/// t_0 = 2, t_1 = a_p, t_r = a_p t_{r-1} - p t_{r-2}.
pub fn trace_power(fd: &FrobeniusData, r: u32) -> Result<i128> {
    let a = fd.a_p as i128;
    let p = fd.p as i128;
    let mut pair = (2i128, a);
    if r == 0 {
        return Ok(2);
    }
    for _ in 1..r {
        let next = a
            .checked_mul(pair.1)
            .and_then(|x| p.checked_mul(pair.0).and_then(|y| x.checked_sub(y)))
            .ok_or_else(|| {
                Error::Domain(format!("trace power overflow at p = {}, r = {r}", fd.p))
            })?;
        pair = (pair.1, next);
    }
    Ok(pair.1)
}

/// Z^[eps]_{r,p}(s) = 1 - eps (pi^r + conj(pi)^r) p^{-s} + p^{r-2s}.
pub fn z_r_local(fd: &FrobeniusData, r: u32, s: Complex64, eps: i8) -> Result<Complex64> {
    if r < 1 {
        return Err(Error::Domain("z_r_local requires r >= 1".into()));
    }
    let tr = trace_power(fd, r)? as f64;
    let rr = Complex64::new(r as f64, 0.0);
    Ok(Complex64::new(1.0, 0.0) - eps as f64 * tr * p_pow(fd.p, -s) + p_pow(fd.p, rr - 2.0 * s))
}

/// Truncated Z_r(s) = prod_{p good} Z^[eps]_{r,p}(s); converges absolutely
/// for Re(s) > r/2 + 1.
pub fn z_r_partial(
    curve: &CurveSpec,
    r: u32,
    s: Complex64,
    cutoff: u64,
    eps: i8,
) -> Result<PartialProduct> {
    let (value, log_sum, n_factors, omitted) =
        product_over(curve, cutoff, |fd| z_r_local(fd, r, s, eps))?;
    let sigma = s.re;
    let rf = r as f64;
    let tail_estimate = heuristic_tail(cutoff, sigma - rf / 2.0, |x| {
        2.0 * x.powf(rf / 2.0 - sigma) + x.powf(rf - 2.0 * sigma)
    });
    Ok(PartialProduct {
        value,
        log_sum,
        prime_cutoff: cutoff,
        n_factors,
        omitted_primes: omitted,
        tail_estimate,
        certified: sigma > rf / 2.0 + 1.0,
    })
}

/// Residuals of the specialization identity at one prime.
#[derive(Clone, Copy, Debug)]
pub struct ContinuationCheck {
    pub p: u64,
    pub m: u32,
    /// |(1 - a_p p^{-s}) - (Q_M + W_M)(pi, conj pi, p, p^{-s})|.
    pub residual: f64,
    /// max over factors of |P^[eps]_(r,n,m) specialized - Z^[eps]_r(ms - n)|.
    pub max_factor_residual: f64,
}

/// Check the expansion identity at p with a precomputed expansion.
pub fn continuation_identity_check_with(
    expansion: &ExpansionResult,
    fd: &FrobeniusData,
    s: Complex64,
) -> Result<ContinuationCheck> {
    let u0 = fd.pi_p;
    let v0 = fd.pi_bar();
    let x0 = Complex64::new(fd.p as f64, 0.0);
    let y0 = p_pow(fd.p, -s);
    let q = expansion.q_m.evaluate(u0, v0, x0, y0)?;
    let w = expansion.w_m.evaluate(u0, v0, x0, y0)?;
    let lhs = Complex64::new(1.0, 0.0) - fd.a_p as f64 * y0;
    let residual = (lhs - (q + w)).norm();

    let mut max_factor_residual = 0.0f64;
    for f in &expansion.factors {
        let (r, n, m) = (f.point.r, f.point.n, f.point.m);
        let specialized = p_poly_unchecked(r, n, m, f.eps).evaluate(u0, v0, x0, y0)?;
        let s_shift = m as f64 * s - n as f64;
        let expected = if r == 0 {
            Complex64::new(1.0, 0.0) - f.eps as f64 * p_pow(fd.p, -s_shift)
        } else {
            z_r_local(fd, r, s_shift, f.eps)?
        };
        max_factor_residual = max_factor_residual.max((specialized - expected).norm());
    }
    Ok(ContinuationCheck {
        p: fd.p,
        m: expansion.m,
        residual,
        max_factor_residual,
    })
}

/// Check the expansion identity (1 - a_p p^{-s}) = Q_M + W_M specialized at
/// (pi_p, conj pi_p, p, p^{-s}), plus the factor-by-factor Z-identity.
pub fn continuation_identity_check(
    curve: &CurveSpec,
    p: u64,
    m: u32,
    s: Complex64,
) -> Result<ContinuationCheck> {
    let expansion = cyclotomic_expand(m, DEFAULT_EXPANSION_BUDGET)?;
    let fd = curve.frobenius_data(p)?;
    continuation_identity_check_with(&expansion, &fd, s)
}

/// Empirical convergence probe for the W_M products.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub m: u32,
    pub s: Complex64,
    pub prime_cutoff: u64,
    pub n_primes: usize,
    /// prod (1 + W_M(pi, conj pi, p, p^{-s})) over good p <= cutoff.
    pub w_product: Complex64,
    /// prod (1 + W_M/Q_M), the product actually continued past the factors.
    pub wq_product: Complex64,
    /// Least-squares slope of log|W_M term| against log p.
    pub slope_w: f64,
    /// Same for the W_M/Q_M terms.
    pub slope_wq: f64,
    /// Primes where |Q_M| < 1e-12 (poles introduced by the continuation),
    /// excluded from the W/Q product.
    pub excluded_primes: Vec<u64>,
    /// Heuristic log-tail majorant sum |coeffs(W_M)| p^{M(1/2 - Re s)}.
    pub tail_estimate: f64,
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    cov / var
}

/// Evaluate the tail products Z^1_M = prod(1 + W_M) and Z^2_M = prod(1 + W_M/Q_M)
/// and fit the decay of their per-prime terms. Requires Re(s) > 1/2 + 1/M,
/// the abscissa where every surviving W_M term (weight 1/2 + 1/m, m >= M)
/// becomes summable.
pub fn w_over_q_convergence_probe(
    curve: &CurveSpec,
    m: u32,
    s: Complex64,
    cutoff: u64,
) -> Result<ProbeReport> {
    let sigma = s.re;
    let abscissa = 0.5 + 1.0 / m as f64;
    if sigma <= abscissa {
        return Err(Error::Domain(format!(
            "probe requires Re(s) > 1/2 + 1/M = {abscissa}, got {sigma}"
        )));
    }
    let expansion = cyclotomic_expand(m, DEFAULT_EXPANSION_BUDGET)?;
    let fds = curve.frobenius_sweep(cutoff)?;
    let mut w_product = Complex64::new(1.0, 0.0);
    let mut wq_product = Complex64::new(1.0, 0.0);
    let mut w_points = Vec::with_capacity(fds.len());
    let mut wq_points = Vec::with_capacity(fds.len());
    let mut excluded = Vec::new();
    for fd in &fds {
        let u0 = fd.pi_p;
        let v0 = fd.pi_bar();
        let x0 = Complex64::new(fd.p as f64, 0.0);
        let y0 = p_pow(fd.p, -s);
        let w = expansion.w_m.evaluate(u0, v0, x0, y0)?;
        let q = expansion.q_m.evaluate(u0, v0, x0, y0)?;
        w_product *= Complex64::new(1.0, 0.0) + w;
        let lp = (fd.p as f64).ln();
        if w.norm() > 0.0 {
            w_points.push((lp, w.norm().ln()));
        }
        if q.norm() < FACTOR_POLE_TOL {
            excluded.push(fd.p);
        } else {
            let t = w / q;
            wq_product *= Complex64::new(1.0, 0.0) + t;
            if t.norm() > 0.0 {
                wq_points.push((lp, t.norm().ln()));
            }
        }
    }
    let coeff_mass: f64 = expansion
        .w_m
        .terms()
        .map(|(_, c)| c.abs().to_f64().unwrap_or(f64::INFINITY))
        .sum();
    let tail_estimate = heuristic_tail(cutoff, m as f64 * (sigma - 0.5), |x| {
        coeff_mass * x.powf(m as f64 * (0.5 - sigma))
    });
    Ok(ProbeReport {
        m,
        s,
        prime_cutoff: cutoff,
        n_primes: fds.len(),
        w_product,
        wq_product,
        slope_w: fit_slope(&w_points),
        slope_wq: fit_slope(&wq_points),
        excluded_primes: excluded,
        tail_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expand::s_poly;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn curve() -> CurveSpec {
        CurveSpec::example_cm()
    }

    fn fd(p: u64) -> FrobeniusData {
        curve().frobenius_data(p).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic test points: xorshift-driven s values in a strip.
    fn seeded_s(count: usize, re_lo: f64, re_hi: f64, im_max: f64) -> Vec<Complex64> {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut out = Vec::with_capacity(count);
        let mut unit = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..count {
            let re = re_lo + (re_hi - re_lo) * unit();
            let im = im_max * (2.0 * unit() - 1.0);
            out.push(Complex64::new(re, im));
        }
        out
    }

    #[test]
    fn satake_on_unit_circle() {
        for p in [5u64, 7, 13, 97] {
            let sp = SatakeParams::new(&fd(p)).unwrap();
            assert!((sp.alpha.norm() - 1.0).abs() < 1e-12);
            assert!((sp.alpha * sp.beta - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn trace_powers_exact() {
        let f = fd(5); // a_5 = -2, pi = -1 + 2i
        assert_eq!(trace_power(&f, 0).unwrap(), 2);
        assert_eq!(trace_power(&f, 1).unwrap(), -2);
        assert_eq!(trace_power(&f, 2).unwrap(), -6); // (-1+2i)^2 + (-1-2i)^2
        assert_eq!(trace_power(&f, 3).unwrap(), 22);
        for r in 0..=8u32 {
            let exact = trace_power(&f, r).unwrap() as f64;
            let numeric = (f.pi_p.powu(r) + f.pi_bar().powu(r)).re;
            assert!((exact - numeric).abs() < 1e-9 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn z2_frozen_form() {
        // Z^[1]_{2,5}(s) = 1 + 6 * 5^{-s} + 5^{2-2s}
        let f = fd(5);
        for s in [c(1.0, 0.0), c(2.0, -1.0), c(0.3, 4.0)] {
            let direct = c(1.0, 0.0) + 6.0 * p_pow(5, -s) + p_pow(5, c(2.0, 0.0) - 2.0 * s);
            let got = z_r_local(&f, 2, s, 1).unwrap();
            assert!((got - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn ratio_identity() {
        // Z^[-1]_r(s) Z^[1]_r(s) = Z^[1]_{2r}(2s)
        for p in [5u64, 13, 97] {
            let f = fd(p);
            for r in 1..=5u32 {
                for s in seeded_s(20, -1.0, 3.0, 5.0) {
                    let lhs = z_r_local(&f, r, s, -1).unwrap() * z_r_local(&f, r, s, 1).unwrap();
                    let rhs = z_r_local(&f, 2 * r, 2.0 * s, 1).unwrap();
                    let rel = (lhs - rhs).norm() / rhs.norm().max(1.0);
                    assert!(rel < 1e-9, "p={p} r={r} s={s}: rel={rel:.2e}");
                }
            }
        }
    }

    #[test]
    fn hasse_weil_frozen_and_vieta() {
        let f5 = fd(5);
        let hw = hasse_weil_local(&f5, c(1.0, 0.0));
        // 1 + 2/5 + 1/5 = 8/5 = N_5 / 5
        assert!((hw.numerator - c(1.6, 0.0)).norm() < 1e-14);
        assert!((hw.numerator.re - f5.n_p() as f64 / 5.0).abs() < 1e-14);
        for p in [5u64, 7, 13] {
            let f = fd(p);
            for s in seeded_s(10, 0.2, 3.0, 6.0) {
                let hw = hasse_weil_local(&f, s);
                let ps = p_pow(p, -s);
                let vieta = (c(1.0, 0.0) - f.pi_p * ps) * (c(1.0, 0.0) - f.pi_bar() * ps);
                assert!((hw.numerator - vieta).norm() < 1e-10);
                assert!((hw.euler_factor.unwrap() * hw.numerator - 1.0).norm() < 1e-12);
                let full = hw.full.unwrap();
                let expect = hw.numerator / ((c(1.0, 0.0) - ps) * (c(1.0, 0.0) - p as f64 * ps));
                assert!((full - expect).norm() < 1e-12 * expect.norm().max(1.0));
            }
        }
        // a_7 = 0: numerator = 1 + p^{1-2s}
        let f7 = fd(7);
        let s = c(0.8, 1.3);
        let hw7 = hasse_weil_local(&f7, s);
        assert!((hw7.numerator - (c(1.0, 0.0) + p_pow(7, c(1.0, 0.0) - 2.0 * s))).norm() < 1e-13);
    }

    #[test]
    fn hasse_weil_poles_reported() {
        // The full form has genuine poles at s = 0 and s = 1 (denominator
        // zeros); the numerator and Euler factor survive there.
        for s in [c(0.0, 0.0), c(1.0, 0.0)] {
            let hw = hasse_weil_local(&fd(5), s);
            assert!(hw.full.is_none());
            assert!(hw.euler_factor.is_some());
        }
        // Euler-factor pole: numerator zero at p^{-s} = 1/pi_p, on Re(s) = 1/2.
        let f = fd(13);
        let s_zero = -(1.0 / f.pi_p).ln() / (13.0f64).ln();
        let hw = hasse_weil_local(&f, s_zero);
        assert!((s_zero.re - 0.5).abs() < 1e-12);
        assert!(hw.euler_factor.is_none());
        assert!(hw.full.is_some());
    }

    #[test]
    fn sym_power_matches_s_poly_specialization() {
        for p in [5u64, 13] {
            let f = fd(p);
            let sp = SatakeParams::new(&f).unwrap();
            for m in 1..=4u32 {
                let poly = s_poly(m);
                for s in seeded_s(6, 1.1, 3.0, 4.0) {
                    let y0 = p_pow(p, -s);
                    let via_ring = poly.evaluate(sp.alpha, sp.beta, c(1.0, 0.0), y0).unwrap();
                    let direct = sym_power_reciprocal(&sp, m, s);
                    assert!((via_ring - direct).norm() < 1e-10, "p={p} m={m} s={s}");
                    let local = sym_power_local(&sp, m, s).unwrap();
                    assert!((local * direct - 1.0).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn sym_power_m1_is_normalized_hasse_weil() {
        let f = fd(13);
        let sp = SatakeParams::new(&f).unwrap();
        for s in seeded_s(6, 0.5, 2.5, 3.0) {
            let ps = p_pow(13, -s);
            let expect = c(1.0, 0.0) - f.b_p * ps + ps * ps;
            assert!((sym_power_reciprocal(&sp, 1, s) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn s_recursions_specialized() {
        // S^[2n] and S^[2n+1] recursions evaluated at (alpha, beta, 1, p^{-s}).
        for p in [5u64, 13] {
            let f = fd(p);
            let sp = SatakeParams::new(&f).unwrap();
            let one = c(1.0, 0.0);
            for n in 1..=4u32 {
                for s in seeded_s(5, 1.0, 2.5, 3.0) {
                    let y0 = p_pow(p, -s);
                    let even = s_poly(2 * n).evaluate(sp.alpha, sp.beta, one, y0).unwrap();
                    let mut even_prod = p_poly_unchecked(0, n, 1, 1)
                        .evaluate(sp.alpha, sp.beta, one, y0)
                        .unwrap();
                    for i in 1..=n {
                        even_prod *= p_poly_unchecked(2 * i, n - i, 1, 1)
                            .evaluate(sp.alpha, sp.beta, one, y0)
                            .unwrap();
                    }
                    assert!((even - even_prod).norm() < 1e-9 * even.norm().max(1.0));

                    let odd = s_poly(2 * n + 1)
                        .evaluate(sp.alpha, sp.beta, one, y0)
                        .unwrap();
                    let mut odd_prod = one;
                    for i in 0..=n {
                        odd_prod *= p_poly_unchecked(2 * i + 1, n - i, 1, 1)
                            .evaluate(sp.alpha, sp.beta, one, y0)
                            .unwrap();
                    }
                    assert!((odd - odd_prod).norm() < 1e-9 * odd.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn first_continuation_identity_exact_at_p5() {
        // -t + lambda_5 t = -a_5 5^{-1} / (25 - C_5) = 1/45 exactly.
        let f = fd(5);
        let lambda = f.lambda().unwrap();
        let t = BigRational::new(BigInt::from(1), BigInt::from(25));
        let lhs = (lambda - BigRational::from_integer(BigInt::from(1))) * &t;
        let rhs = BigRational::new(BigInt::from(-f.a_p), BigInt::from(5 * (25 - 7)));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, BigRational::new(BigInt::from(1), BigInt::from(45)));
    }

    #[test]
    fn first_continuation_runs_and_identity_holds() {
        let fc = first_continuation(&curve(), c(1.0, 0.0), 200).unwrap();
        assert!(fc.max_identity_residual < 1e-12);
        assert!(fc.product.certified);
        assert!((fc.value - fc.zeta_factor * fc.product.value).norm() < 1e-14);
        // a_p = 0 primes contribute factor exactly 1.
        let f7 = fd(7);
        let factor = first_continuation_factor(&f7, c(1.3, 0.7)).unwrap();
        assert_eq!(factor, c(1.0, 0.0));
    }

    #[test]
    fn first_continuation_pole_at_zero() {
        assert!(matches!(
            first_continuation(&curve(), c(0.0, 0.0), 50),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn igusa_global_consistency() {
        let cur = curve();
        // log-sum consistency
        let pp = igusa_global(&cur, c(3.0, 0.0), 300).unwrap();
        assert!((pp.value - pp.log_sum.exp()).norm() < 1e-12 * pp.value.norm());
        // Cauchy in the cutoff within the tail estimate
        let a = igusa_global(&cur, c(1.0, 0.0), 500).unwrap();
        let b = igusa_global(&cur, c(1.0, 0.0), 2000).unwrap();
        assert!((a.value - b.value).norm() <= a.tail_estimate);
        // empty product
        let e = igusa_global(&cur, c(1.0, 0.0), 1).unwrap();
        assert_eq!(e.n_factors, 0);
        assert_eq!(e.value, c(1.0, 0.0));
        assert!(e.tail_estimate > 0.0);
        // uncertified region is flagged
        let u = igusa_global(&cur, c(-0.2, 0.0), 50).unwrap();
        assert!(!u.certified);
        assert!(u.tail_estimate.is_infinite());
    }

    #[test]
    fn z_r_partial_reciprocal_of_hasse_weil() {
        let cur = curve();
        let s = c(3.0, 0.0);
        let z = z_r_partial(&cur, 1, s, 200, 1).unwrap();
        assert!(z.certified);
        let fds = cur.frobenius_sweep(200).unwrap();
        let mut hw_prod = c(1.0, 0.0);
        for f in &fds {
            hw_prod *= hasse_weil_local(f, s).euler_factor.unwrap();
        }
        assert!((z.value * hw_prod - 1.0).norm() < 1e-12);
        // Cauchy within tail
        let z2 = z_r_partial(&cur, 1, s, 2000, 1).unwrap();
        assert!((z.value - z2.value).norm() <= z.tail_estimate);
    }

    #[test]
    fn continuation_identity_residuals() {
        let cur = curve();
        // M = 1: Q = 1, W = -uY - vY; identity is exact up to rounding.
        let t = continuation_identity_check(&cur, 5, 1, c(1.0, 0.0)).unwrap();
        assert!(t.residual < 1e-15);
        assert_eq!(t.max_factor_residual, 0.0); // no factors at M = 1
        let t = continuation_identity_check(&cur, 5, 2, c(1.0, 0.0)).unwrap();
        assert!(t.residual < 1e-10 && t.max_factor_residual < 1e-10);
        let t = continuation_identity_check(&cur, 13, 4, c(2.0, 0.3)).unwrap();
        assert!(t.residual < 1e-9 && t.max_factor_residual < 1e-9);
    }

    #[test]
    fn probe_decay_and_preconditions() {
        let cur = curve();
        let report = w_over_q_convergence_probe(&cur, 2, c(1.2, 0.0), 500).unwrap();
        assert!(report.slope_w <= -1.1, "slope_w = {}", report.slope_w);
        assert!(report.slope_wq <= -1.1, "slope_wq = {}", report.slope_wq);
        assert!(report.excluded_primes.is_empty());
        assert!(report.tail_estimate.is_finite());
        assert!(matches!(
            w_over_q_convergence_probe(&cur, 2, c(0.9, 0.0), 100),
            Err(Error::Domain(_))
        ));
    }
}
