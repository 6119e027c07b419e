//! Local zeros of the continued factors and their accumulation on the
//! natural boundary Re(s) = -3/2.
//!
//! Each good prime with a_p != 0 contributes the factor
//! 1 - a_p p^{-s} / (p^2 - C_p) to the first continuation, whose zeros form
//! a vertical lattice at real part s_p = -3/2 + ln|r_p| / ln p with
//! r_p = b_p / (1 - p^{-1} + b_p p^{-3/2}). Over the primes with b_p > 1
//! (the set P_E) one has r_p > 1, so s_p approaches -3/2 strictly from the
//! right, and since the lattice spacing 2 pi / ln p also shrinks, every
//! point of the boundary line is a limit of these zeros. The operations
//! here tabulate exactly that approach, plus the Sato-Tate diagnostic that
//! controls how often b_p > 1 happens.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::curve::{CurveSpec, FrobeniusData};
use crate::error::{Error, Result};
use crate::local::p_pow;
use num_complex::Complex64;

use std::f64::consts::PI;

/// Per-prime boundary data.
#[derive(Clone, Copy, Debug)]
pub struct ZeroRecord {
    pub p: u64,
    /// Normalized trace a_p / sqrt(p).
    pub b_p: f64,
    /// r_p = b_p / (1 - p^{-1} + b_p p^{-3/2}); sign matches a_p.
    pub r_p: f64,
    /// Real part of the zeros: s_p = -3/2 + ln|r_p| / ln p.
    pub s_p: f64,
    /// Argument offset: 0 when r_p > 0, pi when r_p < 0.
    pub theta_p: f64,
    /// Distance to the boundary, gap = s_p + 3/2.
    pub gap: f64,
    /// Membership in P_E, decided exactly: a_p > 0 and a_p^2 > p.
    pub in_p_e: bool,
    /// |1 - a_p p^{-z} / (p^2 - C_p)| at the closed-form zero
    /// z = s_p + i theta_p / ln p.
    pub residual: f64,
}

impl ZeroRecord {
    /// The implication chain behind the boundary theorem:
    /// b_p > 1 => b_p > (1 - p^{-1})/(1 - p^{-3/2}) => r_p > 1 => s_p > -3/2.
    pub fn zer3_chain_holds(&self) -> bool {
        if !self.in_p_e {
            return true;
        }
        let pf = self.p as f64;
        let threshold = (1.0 - 1.0 / pf) / (1.0 - pf.powf(-1.5));
        self.b_p > threshold && self.r_p > 1.0 && self.s_p > -1.5 && self.gap > 0.0
    }

    /// The zero with lattice index n: s_p + (theta_p + 2 pi n) i / ln p.
    pub fn lattice_zero(&self, n: i64) -> Complex64 {
        Complex64::new(
            self.s_p,
            (self.theta_p + 2.0 * PI * n as f64) / (self.p as f64).ln(),
        )
    }

    /// |1 - a_p p^{-z} / (p^2 - C_p)| at an arbitrary z, the defining
    /// equation of the zero set.
    pub fn equation_residual(&self, a_p: i64, c_p: u64, z: Complex64) -> f64 {
        let denom = (self.p as i128 * self.p as i128 - c_p as i128) as f64;
        (Complex64::new(1.0, 0.0) - a_p as f64 * p_pow(self.p, -z) / denom).norm()
    }
}

/// Closed-form zero data for one prime. a_p = 0 primes have a constant
/// factor with no zero; p^2 = C_p primes have no well-formed factor at all.
pub fn local_zero(fd: &FrobeniusData) -> Result<ZeroRecord> {
    if fd.a_p == 0 {
        return Err(Error::NoZero { p: fd.p });
    }
    let denom_int = fd.p as i128 * fd.p as i128 - fd.c_p as i128;
    if denom_int == 0 {
        return Err(Error::DegenerateLambda { p: fd.p });
    }
    let pf = fd.p as f64;
    let r_p = fd.b_p / (1.0 - 1.0 / pf + fd.b_p * pf.powf(-1.5));
    let s_p = -1.5 + r_p.abs().ln() / pf.ln();
    let theta_p = if r_p > 0.0 { 0.0 } else { PI };
    let in_p_e = fd.a_p > 0 && (fd.a_p as i128 * fd.a_p as i128) > fd.p as i128;
    let mut rec = ZeroRecord {
        p: fd.p,
        b_p: fd.b_p,
        r_p,
        s_p,
        theta_p,
        gap: s_p + 1.5,
        in_p_e,
        residual: 0.0,
    };
    rec.residual = rec.equation_residual(fd.a_p, fd.c_p, rec.lattice_zero(0));
    Ok(rec)
}

/// Zero records for every good p <= cutoff that has a zero (a_p != 0 and
/// nondegenerate normalization; the excluded primes carry no record).
pub fn zero_records(curve: &CurveSpec, cutoff: u64) -> Result<Vec<ZeroRecord>> {
    let fds = curve.frobenius_sweep(cutoff)?;
    let mut out = Vec::with_capacity(fds.len());
    for fd in &fds {
        match local_zero(fd) {
            Ok(rec) => out.push(rec),
            Err(Error::NoZero { .. }) | Err(Error::DegenerateLambda { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// The records restricted to P_E = {p : b_p > 1}, each certified against
/// the implication chain that pushes its zeros right of the boundary.
pub fn boundary_primes(curve: &CurveSpec, cutoff: u64) -> Result<Vec<ZeroRecord>> {
    let recs = zero_records(curve, cutoff)?;
    let members: Vec<ZeroRecord> = recs.into_iter().filter(|r| r.in_p_e).collect();
    for r in &members {
        if !r.zer3_chain_holds() {
            return Err(Error::Domain(format!(
                "implication chain b_p > 1 => s_p > -3/2 broke at p = {} (this is a bug)",
                r.p
            )));
        }
    }
    Ok(members)
}

/// One row of the accumulation table toward -3/2 + i * target.
#[derive(Clone, Copy, Debug)]
pub struct AccumulationRow {
    pub p: u64,
    /// Lattice index minimizing the distance to the target ordinate.
    pub n_p: i64,
    /// The chosen zero z_p = s_p + (theta_p + 2 pi n_p) i / ln p.
    pub zero: Complex64,
    /// |z_p - (-3/2 + i target)|.
    pub distance: f64,
    /// Whether this row sets a new running minimum distance.
    pub record_low: bool,
}

/// For each p in P_E below the cutoff, pick the lattice zero closest to
/// -3/2 + i * target_imag. The running-minimum column exhibits the
/// accumulation: it keeps dropping as p grows.
pub fn accumulation_report(
    curve: &CurveSpec,
    cutoff: u64,
    target_imag: f64,
) -> Result<Vec<AccumulationRow>> {
    let members = boundary_primes(curve, cutoff)?;
    if members.is_empty() {
        return Err(Error::InsufficientSamples { got: 0, need: 1 });
    }
    let mut best = f64::INFINITY;
    let mut rows = Vec::with_capacity(members.len());
    for r in &members {
        let lp = (r.p as f64).ln();
        let n_p = ((target_imag * lp - r.theta_p) / (2.0 * PI)).round() as i64;
        let zero = r.lattice_zero(n_p);
        let distance = Complex64::new(zero.re + 1.5, zero.im - target_imag).norm();
        let record_low = distance < best;
        if record_low {
            best = distance;
        }
        rows.push(AccumulationRow {
            p: r.p,
            n_p,
            zero,
            distance,
            record_low,
        });
    }
    Ok(rows)
}

/// Exact bookkeeping from the non-interference argument.
#[derive(Clone, Debug)]
pub struct InterferenceRow {
    pub p: u64,
    /// p^{-z_p} = (p^2 - C_p) / a_p, exact; for p in P_E this is positive
    /// and equals p^{-s_p}.
    pub exact_p_to_minus_z: BigRational,
    pub s_p: f64,
    /// Candidate indices m with |s_p - (1/(2m) - 3/2)| < 1e-6.
    pub flagged_m: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct InterferenceReport {
    /// (m, 1/(2m) - 3/2) for m = 1, ..., m_max: the only real parts where a
    /// GRH-located symmetric-power zero could meet a local zero.
    pub candidates: Vec<(u32, f64)>,
    pub rows: Vec<InterferenceRow>,
    /// All (p, m) coincidences found; expected empty.
    pub flags: Vec<(u64, u32)>,
}

/// Tabulates the rationality of p^{-z_p} over P_E and scans for collisions
/// between the observed s_p and the candidate real parts 1/(2m) - 3/2.
pub fn interference_check(curve: &CurveSpec, cutoff: u64, m_max: u32) -> Result<InterferenceReport> {
    let members = boundary_primes(curve, cutoff)?;
    let candidates: Vec<(u32, f64)> = (1..=m_max.max(1))
        .map(|m| (m, 1.0 / (2.0 * m as f64) - 1.5))
        .collect();
    let mut rows = Vec::with_capacity(members.len());
    let mut flags = Vec::new();
    for r in &members {
        let fdm = curve.frobenius_data(r.p)?;
        let exact = BigRational::new(
            BigInt::from(r.p as i128 * r.p as i128 - fdm.c_p as i128),
            BigInt::from(fdm.a_p),
        );
        // Consistency: p^{-s_p} must reproduce the exact rational (theta = 0
        // on P_E, so the zero is real up to the lattice).
        let approx = (r.p as f64).powf(-r.s_p);
        let exact_f = exact.to_f64().unwrap_or(f64::NAN);
        if !((approx - exact_f).abs() <= 1e-9 * exact_f.abs()) {
            return Err(Error::Domain(format!(
                "exact zero location mismatch at p = {}: {approx} vs {exact_f}",
                r.p
            )));
        }
        let flagged_m: Vec<u32> = candidates
            .iter()
            .filter(|(_, cand)| (r.s_p - cand).abs() < 1e-6)
            .map(|&(m, _)| m)
            .collect();
        for &m in &flagged_m {
            flags.push((r.p, m));
        }
        rows.push(InterferenceRow {
            p: r.p,
            exact_p_to_minus_z: exact,
            s_p: r.s_p,
            flagged_m,
        });
    }
    Ok(InterferenceReport {
        candidates,
        rows,
        flags,
    })
}

/// Semicircle CDF F(t) = 1/2 + (t sqrt(1-t^2) + arcsin t) / pi on [-1, 1].
pub fn semicircle_cdf(t: f64) -> f64 {
    let t = t.clamp(-1.0, 1.0);
    0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / PI
}

/// Empirical Sato-Tate data at a cutoff.
#[derive(Clone, Debug)]
pub struct SatoTateReport {
    pub prime_cutoff: u64,
    /// t_p = b_p / 2 over good p <= cutoff, sorted ascending.
    pub samples: Vec<f64>,
    /// sup over a uniform grid of |empirical CDF - semicircle CDF|.
    pub sup_discrepancy: f64,
    /// Fraction of samples with a_p exactly 0; large for CM curves.
    pub zero_fraction: f64,
    /// The user-declared CM flag; when set, the semicircle comparison is
    /// not expected to pass and output is labeled accordingly.
    pub cm: bool,
}

/// Minimum sample count for a meaningful discrepancy.
pub const SATO_TATE_MIN_SAMPLES: usize = 50;

pub fn sato_tate_report(
    curve: &CurveSpec,
    cutoff: u64,
    grid_size: usize,
) -> Result<SatoTateReport> {
    let fds = curve.frobenius_sweep(cutoff)?;
    if fds.len() < SATO_TATE_MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: fds.len(),
            need: SATO_TATE_MIN_SAMPLES,
        });
    }
    let zero_count = fds.iter().filter(|f| f.a_p == 0).count();
    let mut samples: Vec<f64> = fds.iter().map(|f| f.b_p / 2.0).collect();
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len();
    let grid = grid_size.max(2);
    let mut sup = 0.0f64;
    for j in 0..=grid {
        let t = -1.0 + 2.0 * j as f64 / grid as f64;
        let emp = samples.partition_point(|&x| x <= t) as f64 / n as f64;
        sup = sup.max((emp - semicircle_cdf(t)).abs());
    }
    Ok(SatoTateReport {
        prime_cutoff: cutoff,
        samples,
        sup_discrepancy: sup,
        zero_fraction: zero_count as f64 / n as f64,
        cm: curve.cm,
    })
}

/// Histogram of samples against the semicircle mass, as
/// (bin_center, empirical_mass, semicircle_mass) rows over [-1, 1].
pub fn sato_tate_histogram(samples: &[f64], bins: usize) -> Vec<(f64, f64, f64)> {
    let bins = bins.max(1);
    let n = samples.len().max(1) as f64;
    let mut counts = vec![0usize; bins];
    for &t in samples {
        // index binning: every sample lands in exactly one bin
        let idx = (((t + 1.0) / 2.0 * bins as f64).floor() as isize).clamp(0, bins as isize - 1);
        counts[idx as usize] += 1;
    }
    let edge = |i: usize| -1.0 + 2.0 * i as f64 / bins as f64;
    (0..bins)
        .map(|i| {
            (
                (edge(i) + edge(i + 1)) / 2.0,
                counts[i] as f64 / n,
                semicircle_cdf(edge(i + 1)) - semicircle_cdf(edge(i)),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> CurveSpec {
        CurveSpec::example_cm()
    }

    fn curve_11a3() -> CurveSpec {
        CurveSpec::from_poly(vec![(0, 2, 1), (0, 1, 1), (3, 0, -1), (2, 0, 1)], false).unwrap()
    }

    fn rec(p: u64) -> ZeroRecord {
        local_zero(&curve().frobenius_data(p).unwrap()).unwrap()
    }

    #[test]
    fn frozen_p13_zero() {
        let r = rec(13);
        assert!((r.r_p - 1.7360061696678468).abs() < 1e-12);
        assert!((r.s_p - -1.284952023094184).abs() < 1e-12);
        assert_eq!(r.theta_p, 0.0);
        assert!(r.in_p_e);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn negative_trace_means_theta_pi() {
        let r = rec(5); // a_5 = -2
        assert!(r.r_p < 0.0);
        assert_eq!(r.theta_p, PI);
        assert!(!r.in_p_e);
        assert!(r.residual < 1e-12, "residual {}", r.residual);
    }

    #[test]
    fn no_zero_and_degenerate_markers() {
        let f7 = curve().frobenius_data(7).unwrap(); // a_7 = 0
        assert!(matches!(local_zero(&f7), Err(Error::NoZero { p: 7 })));
        let f2 = curve_11a3().frobenius_data(2).unwrap(); // C_2 = 4 = p^2
        assert!(matches!(
            local_zero(&f2),
            Err(Error::DegenerateLambda { p: 2 })
        ));
        // Sweeps skip both kinds of prime rather than failing.
        let recs = zero_records(&curve_11a3(), 20).unwrap();
        let ps: Vec<u64> = recs.iter().map(|r| r.p).collect();
        assert_eq!(ps, vec![3, 5, 7, 13, 17]); // 2 degenerate, 11 bad, a_19 = 0
    }

    #[test]
    fn boundary_set_matches_oracle_below_100() {
        // Brute-force a_p table gives exactly these members of P_E. Note
        // 73 is NOT a member: a_73 = -6, so b_73 < 0 (and even |a_73|^2 =
        // 36 < 73 regardless of sign).
        let members = boundary_primes(&curve(), 100).unwrap();
        let ps: Vec<u64> = members.iter().map(|r| r.p).collect();
        assert_eq!(ps, vec![13, 41, 53, 89, 97]);
        for r in &members {
            assert!(r.zer3_chain_holds());
            assert!(r.gap > 0.0 && r.gap <= 3.0f64.ln() / (r.p as f64).ln());
        }
        let f73 = curve().frobenius_data(73).unwrap();
        assert_eq!(f73.a_p, -6);
    }

    #[test]
    fn lattice_zeros_satisfy_equation() {
        for p in [5u64, 13, 41] {
            let f = curve().frobenius_data(p).unwrap();
            let r = local_zero(&f).unwrap();
            for n in -5..=5i64 {
                let res = r.equation_residual(f.a_p, f.c_p, r.lattice_zero(n));
                assert!(res < 1e-9, "p = {p}, n = {n}: residual {res}");
            }
        }
    }

    #[test]
    fn accumulation_table_tends_down() {
        let rows = accumulation_report(&curve(), 20_000, 0.0).unwrap();
        // p = 13 heads the table with the trivial lattice choice.
        assert_eq!(rows[0].p, 13);
        assert_eq!(rows[0].n_p, 0);
        assert!((rows[0].zero.re - rec(13).s_p).abs() < 1e-15);
        let first = rows[0].distance;
        let best = rows
            .iter()
            .filter(|r| r.record_low)
            .map(|r| r.distance)
            .last()
            .unwrap();
        assert!(best < 0.25 * first, "running min {best} vs first {first}");
        // target 1: imaginary mismatch bounded by half the lattice spacing
        for row in accumulation_report(&curve(), 2_000, 1.0).unwrap() {
            let lp = (row.p as f64).ln();
            assert!((row.zero.im - 1.0).abs() <= PI / lp + 1e-12);
        }
    }

    #[test]
    fn interference_exact_rationals_and_no_flags() {
        let report = interference_check(&curve(), 2_000, 8).unwrap();
        assert!(report.flags.is_empty());
        let p13 = report.rows.iter().find(|r| r.p == 13).unwrap();
        assert_eq!(
            p13.exact_p_to_minus_z,
            BigRational::from_integer(BigInt::from(27))
        ); // (169 - 7) / 6
        assert_eq!(report.candidates[0], (1, -1.0));
        // every s_p stays clear of the m = 1 candidate -1 by the gap bound
        for row in &report.rows {
            assert!(row.s_p < -1.0);
        }
    }

    #[test]
    fn semicircle_cdf_shape() {
        assert_eq!(semicircle_cdf(-1.0), 0.0);
        assert!((semicircle_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((semicircle_cdf(1.0) - 1.0).abs() < 1e-15);
        let mut last = 0.0;
        for j in 0..=100 {
            let v = semicircle_cdf(-1.0 + 0.02 * j as f64);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn sato_tate_cm_vs_non_cm() {
        // Frozen from an independent vectorized run at cutoff 3000:
        // 11a3 discrepancy 0.0257, CM discrepancy 0.2586, zero frac 0.5082.
        let cm = sato_tate_report(&curve(), 3_000, 400).unwrap();
        assert!(cm.cm);
        assert!(cm.zero_fraction > 0.4, "zero fraction {}", cm.zero_fraction);
        assert!(cm.sup_discrepancy > 0.2);
        assert!((cm.sup_discrepancy - 0.2586).abs() < 0.01);
        let gen = sato_tate_report(&curve_11a3(), 3_000, 400).unwrap();
        assert!(!gen.cm);
        assert!(gen.sup_discrepancy < 0.06, "disc {}", gen.sup_discrepancy);
        assert!(gen.samples.iter().all(|t| (-1.0..=1.0).contains(t)));
        // insufficient data is an explicit error
        assert!(matches!(
            sato_tate_report(&curve(), 100, 100),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn histogram_masses() {
        let report = sato_tate_report(&curve_11a3(), 2_000, 200).unwrap();
        let hist = sato_tate_histogram(&report.samples, 20);
        assert_eq!(hist.len(), 20);
        let emp: f64 = hist.iter().map(|r| r.1).sum();
        let semi: f64 = hist.iter().map(|r| r.2).sum();
        assert!((emp - 1.0).abs() < 1e-12);
        assert!((semi - 1.0).abs() < 1e-12);
    }
}
