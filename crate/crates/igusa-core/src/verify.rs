//! Named invariant suite behind the `verify` subcommand.
//!
//! Every check is a standalone pass/fail with a one-line detail string, so a
//! run prints an auditable table. The suite reuses the library operations it
//! audits rather than re-deriving them; independent cross-checks (reference
//! point counter, exact rational oracles, classical zeta values) keep it from
//! being circular.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::boundary::{boundary_primes, sato_tate_report, zero_records};
use crate::curve::{CurveSpec, DEFAULT_ORACLE_BUDGET};
use crate::error::{Error, Result};
use crate::euler::{
    continuation_identity_check_with, igusa_global, sym_power_reciprocal, z_r_local,
    SatakeParams,
};
use crate::expand::{
    cyclotomic_expand, p_poly, p_poly_unchecked, s_poly, DEFAULT_EXPANSION_BUDGET,
};
use crate::local::{local_closed_form_exact, local_oracle_exact, normalized_local_factor};
use crate::ring::RingElement;
use crate::zeta::riemann_zeta;

/// Outcome of one named invariant.
#[derive(Clone, Debug)]
pub struct InvariantResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl InvariantResult {
    fn ok(name: &'static str, detail: String) -> Self {
        InvariantResult {
            name,
            pass: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        InvariantResult {
            name,
            pass: false,
            detail,
        }
    }

    fn from(name: &'static str, outcome: Result<String>) -> Self {
        match outcome {
            Ok(detail) => Self::ok(name, detail),
            Err(e) => Self::fail(name, e.to_string()),
        }
    }
}

/// True iff every invariant passed.
pub fn all_pass(results: &[InvariantResult]) -> bool {
    results.iter().all(|r| r.pass)
}

fn check(cond: bool, detail: String) -> Result<String> {
    if cond {
        Ok(detail)
    } else {
        Err(Error::Domain(detail))
    }
}

/// Run the full suite on one curve. `pmax` bounds the prime sweeps and
/// `big_m` the expansion level; the defaults used by the CLI are 100 and 4.
pub fn run_suite(curve: &CurveSpec, pmax: u64, big_m: u32) -> Result<Vec<InvariantResult>> {
    let pmax = pmax.max(3);
    let big_m = big_m.max(1);
    let sweep = curve.frobenius_sweep(pmax)?;
    let expansion = cyclotomic_expand(big_m, DEFAULT_EXPANSION_BUDGET)?;
    let mut out = Vec::new();

    out.push(InvariantResult::from("hasse-bound", {
        let worst = sweep
            .iter()
            .map(|f| (f.a_p * f.a_p) as f64 / (4.0 * f.p as f64))
            .fold(0.0f64, f64::max);
        check(
            sweep
                .iter()
                .all(|f| (f.a_p as i128 * f.a_p as i128) <= 4 * f.p as i128),
            format!("{} primes, max a_p^2/4p = {worst:.4}", sweep.len()),
        )
    }));

    out.push(InvariantResult::from("frobenius-identities", (|| {
        for f in &sweep {
            let sum = f.pi_p + f.pi_bar();
            let prod = f.pi_p * f.pi_bar();
            if (sum.re - f.a_p as f64).abs() > 1e-9 * (1.0 + f.a_p.abs() as f64)
                || sum.im.abs() > 1e-9
                || (prod.re - f.p as f64).abs() > 1e-9 * f.p as f64
                || (f.pi_p.norm_sqr() - f.p as f64).abs() > 1e-9 * f.p as f64
                || f.n_p() != f.c_p + 1
            {
                return Err(Error::Domain(format!("frobenius identity broke at p = {}", f.p)));
            }
        }
        Ok(format!(
            "pi + conj = a_p, pi*conj = p, |pi| = sqrt p at {} primes",
            sweep.len()
        ))
    })()));

    out.push(InvariantResult::from("counter-agreement", (|| {
        let bound = pmax.min(200);
        let mut n = 0usize;
        for &p in &curve.good_primes(bound)? {
            if curve.count_affine_points(p) != curve.count_affine_points_reference(p) {
                return Err(Error::Domain(format!("point counters disagree at p = {p}")));
            }
            n += 1;
        }
        Ok(format!("fast and reference counters agree, good p <= {bound} ({n} primes)"))
    })()));

    out.push(InvariantResult::from("lifting-law", (|| {
        let mut rows = 0usize;
        for &p in &curve.good_primes(pmax.min(13))? {
            let n_max = if p <= 7 { 3 } else { 2 };
            let c_p = curve.count_affine_points(p);
            for n in 1..=n_max {
                let lifted = curve.count_points_mod_pn(p, n, DEFAULT_ORACLE_BUDGET)?;
                let expected = p.pow(n - 1) * c_p;
                if lifted != expected {
                    return Err(Error::Domain(format!(
                        "C_{{p^n}} = p^{{n-1}} C_p fails at p = {p}, n = {n}: {lifted} vs {expected}"
                    )));
                }
                rows += 1;
            }
        }
        Ok(format!("C_{{p^n}} = p^{{n-1}} C_p at {rows} (p, n) pairs"))
    })()));

    out.push(InvariantResult::from("ring-laws", (|| {
        let a = RingElement::one_minus_uy_minus_vy();
        let b = p_poly(1, 0, 1, 1)?;
        let c = s_poly(2);
        let assoc = &(&a * &b) * &c == &a * &(&b * &c);
        let comm = &a * &b == &b * &a;
        let distrib = &(&a + &b) * &c == &(&a * &c) + &(&b * &c);
        let canonical = (&(&a * &b) * &c)
            .terms()
            .all(|(m, _)| m.r1.min(m.r2) == 0);
        check(
            assoc && comm && distrib && canonical,
            format!("assoc {assoc}, comm {comm}, distrib {distrib}, uv -> X canonical {canonical}"),
        )
    })()));

    out.push(InvariantResult::from("expansion-identity", {
        check(
            expansion.identity_holds(),
            format!(
                "(1 - uY - vY) - Q_{big_m} = W_{big_m} exactly; {} factors, |Q| = {}, |W| = {}",
                expansion.factors.len(),
                expansion.q_m.len(),
                expansion.w_m.len()
            ),
        )
    }));

    out.push(InvariantResult::from("expansion-support", (|| {
        for (key, _) in expansion.w_m.terms() {
            let (r, n, m) = *key;
            if r + 2 * n != m || m < big_m {
                return Err(Error::Domain(format!(
                    "W_{big_m} key ({r},{n},{m}) off the lattice or below level"
                )));
            }
        }
        for f in &expansion.factors {
            if !f.point.in_level_range(big_m) {
                return Err(Error::Domain(format!(
                    "factor point ({},{},{}) not in L_{big_m}",
                    f.point.r, f.point.n, f.point.m
                )));
            }
        }
        Ok(format!(
            "all {} W keys satisfy r + 2n = m >= {big_m}; all factor points in L_{big_m}",
            expansion.w_m.len()
        ))
    })()));

    out.push(InvariantResult::from("weight-law", (|| {
        for f in &expansion.factors {
            let m = f.point.m;
            let expected = BigRational::new(BigInt::from(m + 2), BigInt::from(2 * m));
            if f.point.weight() != expected {
                return Err(Error::Domain(format!(
                    "weight at level {m} is not 1/2 + 1/m"
                )));
            }
        }
        Ok(format!(
            "Theta = 1/2 + 1/m exactly at {} factor points",
            expansion.factors.len()
        ))
    })()));

    out.push(InvariantResult::from("s-recursions-ring", (|| {
        for n in 0..=3u32 {
            let mut even = p_poly_unchecked(0, n, 1, 1);
            for i in 1..=n {
                even = &even * &p_poly_unchecked(2 * i, n - i, 1, 1);
            }
            if s_poly(2 * n) != even {
                return Err(Error::Domain(format!("even S-recursion fails at n = {n}")));
            }
            let mut odd = RingElement::one();
            for i in 0..=n {
                odd = &odd * &p_poly_unchecked(2 * i + 1, n - i, 1, 1);
            }
            if s_poly(2 * n + 1) != odd {
                return Err(Error::Domain(format!("odd S-recursion fails at n = {n}")));
            }
        }
        Ok("S^[2n] and S^[2n+1] factorizations exact for n <= 3".into())
    })()));

    out.push(InvariantResult::from("zeta-classical-values", (|| {
        let pi = std::f64::consts::PI;
        let z2 = riemann_zeta(Complex64::new(2.0, 0.0))?;
        let z4 = riemann_zeta(Complex64::new(4.0, 0.0))?;
        let z3 = riemann_zeta(Complex64::new(3.0, 0.0))?;
        let s = Complex64::new(1.5, 2.0);
        let conj_gap = (riemann_zeta(s)?.conj() - riemann_zeta(s.conj())?).norm();
        check(
            (z2.re - pi * pi / 6.0).abs() < 1e-12
                && (z4.re - pi.powi(4) / 90.0).abs() < 1e-12
                && (z3.re - 1.2020569031595942854).abs() < 1e-12
                && z2.im.abs() < 1e-15
                && conj_gap < 1e-12,
            "zeta(2), zeta(3), zeta(4), conjugate symmetry".into(),
        )
    })()));

    out.push(InvariantResult::from("local-oracle-agreement", (|| {
        let mut rows = 0usize;
        for &p in &curve.good_primes(pmax.min(7))? {
            for s in [1i64, 2] {
                let closed = match local_closed_form_exact(&curve.frobenius_data(p)?, s) {
                    Ok(v) => v,
                    // no closed form at a degenerate prime; nothing to compare
                    Err(Error::DegenerateLambda { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let oracle = local_oracle_exact(curve, p, 2, s, DEFAULT_ORACLE_BUDGET)?;
                if (&closed - &oracle.partial_sum).abs() > oracle.tail_bound {
                    return Err(Error::Domain(format!(
                        "closed form vs level oracle out of tail bound at p = {p}, s = {s}"
                    )));
                }
                rows += 1;
            }
        }
        Ok(format!(
            "exact-rational closed form within oracle tail bound at {rows} (p, s) pairs"
        ))
    })()));

    out.push(InvariantResult::from("normalized-factor-bound", (|| {
        let s = Complex64::new(1.0, 0.0);
        let mut n = 0usize;
        for f in sweep.iter().filter(|f| f.p <= 50) {
            let lambda = match f.lambda() {
                Ok(l) => l.to_f64().unwrap(),
                Err(Error::DegenerateLambda { .. }) => continue,
                Err(e) => return Err(e),
            };
            let t = (f.p as f64).powf(-(s.re + 1.0));
            let factor = normalized_local_factor(f, s)?;
            if (factor - Complex64::new(1.0, 0.0)).norm() > 2.0 * lambda.abs() * t + 1e-15 {
                return Err(Error::Domain(format!(
                    "|factor - 1| > 2 lambda_p |t| at p = {}",
                    f.p
                )));
            }
            n += 1;
        }
        Ok(format!("|factor - 1| <= 2 lambda_p |t| at s = 1 for {n} primes"))
    })()));

    out.push(InvariantResult::from("sym-power-specialization", (|| {
        let s = Complex64::new(0.7, 0.3);
        let mut n = 0usize;
        for f in sweep.iter().filter(|f| f.p <= 100) {
            let sp = SatakeParams::new(f)?;
            let y0 = (-s * (f.p as f64).ln()).exp();
            for m in 1..=4u32 {
                let via_ring =
                    s_poly(m).evaluate(sp.alpha, sp.beta, Complex64::new(1.0, 0.0), y0)?;
                let direct = sym_power_reciprocal(&sp, m, s);
                if (via_ring - direct).norm() > 1e-9 * (1.0 + direct.norm()) {
                    return Err(Error::Domain(format!(
                        "sym-power local factor disagrees with S^[{m}] at p = {}",
                        f.p
                    )));
                }
            }
            n += 1;
        }
        Ok(format!("degree-m factor = S^[m]|(alpha, beta, 1, p^-s) for m <= 4, {n} primes"))
    })()));

    out.push(InvariantResult::from("ratio-identity", (|| {
        let ps: Vec<u64> = sweep.iter().map(|f| f.p).take(3).collect();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rand = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut n = 0usize;
        for _ in 0..10 {
            let s = Complex64::new(3.0 + 2.0 * rand(), 4.0 * rand() - 2.0);
            for &p in &ps {
                let f = curve.frobenius_data(p)?;
                for r in 1..=5u32 {
                    let lhs = z_r_local(&f, r, s, -1)? * z_r_local(&f, r, s, 1)?;
                    let rhs = z_r_local(&f, 2 * r, 2.0 * s, 1)?;
                    if (lhs - rhs).norm() > 1e-9 * (1.0 + rhs.norm()) {
                        return Err(Error::Domain(format!(
                            "Z ratio identity fails at p = {p}, r = {r}, s = {s}"
                        )));
                    }
                    n += 1;
                }
            }
        }
        Ok(format!("Z^[-1]_r(s) Z^[1]_r(s) = Z^[1]_2r(2s) at {n} (p, r, s) triples"))
    })()));

    out.push(InvariantResult::from("continuation-residual", (|| {
        let mut worst = 0.0f64;
        let mut n = 0usize;
        for f in sweep.iter().filter(|f| f.p <= 100) {
            for s in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.5)] {
                let chk = continuation_identity_check_with(&expansion, f, s)?;
                worst = worst.max(chk.residual).max(chk.max_factor_residual);
                n += 1;
            }
        }
        check(
            worst < 1e-9,
            format!("max residual {worst:.2e} over {n} checks at M = {big_m}"),
        )
    })()));

    out.push(InvariantResult::from("global-cauchy", (|| {
        let s = Complex64::new(1.0, 0.0);
        let small = igusa_global(curve, s, 4 * pmax)?;
        let large = igusa_global(curve, s, 8 * pmax)?;
        let diff = (small.value - large.value).norm();
        check(
            diff <= small.tail_estimate,
            format!(
                "|product({}) - product({})| = {diff:.2e} <= tail {:.2e}",
                4 * pmax,
                8 * pmax,
                small.tail_estimate
            ),
        )
    })()));

    out.push(InvariantResult::from("zer3-chain", (|| {
        let members = boundary_primes(curve, pmax)?;
        for r in &members {
            if !r.zer3_chain_holds() || r.gap <= 0.0 {
                return Err(Error::Domain(format!("zer3 chain fails at p = {}", r.p)));
            }
        }
        Ok(format!(
            "b_p > 1 => r_p > 1 => s_p > -3/2 for all {} members of P_E",
            members.len()
        ))
    })()));

    out.push(InvariantResult::from("zero-residual", (|| {
        let recs = zero_records(curve, pmax)?;
        let worst = recs.iter().map(|r| r.residual).fold(0.0f64, f64::max);
        check(
            worst < 1e-10,
            format!("max closed-form zero residual {worst:.2e} over {} primes", recs.len()),
        )
    })()));

    out.push(InvariantResult::from("lattice-zeros", (|| {
        let recs = zero_records(curve, pmax)?;
        let mut n = 0usize;
        for rec in recs.iter().take(20) {
            let f = curve.frobenius_data(rec.p)?;
            for k in -5..=5i64 {
                let res = rec.equation_residual(f.a_p, f.c_p, rec.lattice_zero(k));
                if res >= 1e-9 {
                    return Err(Error::Domain(format!(
                        "lattice zero residual {res:.2e} at p = {}, n = {k}",
                        rec.p
                    )));
                }
                n += 1;
            }
        }
        Ok(format!("equation residual < 1e-9 at {n} lattice points (|n| <= 5)"))
    })()));

    out.push(InvariantResult::from("satotate-range", (|| {
        let in_range = sweep.iter().all(|f| f.b_p.abs() < 2.0);
        let detail = if sweep.len() >= 50 {
            let report = sato_tate_report(curve, pmax, 200)?;
            if !(0.0..=1.0).contains(&report.sup_discrepancy) {
                return Err(Error::Domain(format!(
                    "discrepancy {} outside [0, 1]",
                    report.sup_discrepancy
                )));
            }
            format!(
                "{} samples in (-1, 1), discrepancy {:.4} in [0, 1]{}",
                report.samples.len(),
                report.sup_discrepancy,
                if report.cm { " (CM labeled)" } else { "" }
            )
        } else {
            format!("{} samples in (-1, 1) (too few for a discrepancy)", sweep.len())
        };
        check(in_range, detail)
    })()));

    Ok(out)
}
