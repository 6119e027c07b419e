//! igusa: reproducible experiment runs over the igusa-core library.
//!
//! Every subcommand reads one curve (inline JSON or a file), sweeps primes
//! deterministically, and emits CSV or JSON with explicitly formatted floats,
//! so identical configs produce byte-identical output files.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::exit;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_traits::ToPrimitive;

use igusa_core::boundary::{
    accumulation_report, sato_tate_histogram, sato_tate_report, zero_records,
};
use igusa_core::curve::DEFAULT_ORACLE_BUDGET;
use igusa_core::euler::{
    continuation_identity_check_with, igusa_global, w_over_q_convergence_probe, z_r_partial,
    PartialProduct,
};
use igusa_core::expand::DEFAULT_EXPANSION_BUDGET;
use igusa_core::local::{
    local_closed_form, local_closed_form_exact, local_oracle, local_oracle_exact,
};
use igusa_core::verify::{all_pass, run_suite};
use igusa_core::{cyclotomic_expand, CurveSpec, Error};

#[derive(Parser)]
#[command(
    name = "igusa",
    version,
    about = "Local and global Igusa zeta functions of elliptic curves, \
             cyclotomic expansions, and boundary-zero tables"
)]
struct Cli {
    /// Curve as inline JSON ({"weierstrass":[A,B],"cm":true} or
    /// {"poly":[[i,j,c],...]}) or a path to a JSON file.
    /// Default: y^2 = x^3 - x with CM.
    #[arg(long, global = true)]
    curve: Option<String>,

    /// Output format (default: csv; `verify` defaults to plain text lines)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Output file ("-" for stdout). Without it, output goes to stdout, or to
    /// $IGUSA_OUT_DIR/<subcommand>.<ext> when that variable is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Significant decimal digits for floating-point output
    #[arg(long, global = true, default_value_t = 15,
          value_parser = clap::value_parser!(u32).range(15..=50))]
    precision: u32,

    /// Worker threads for prime sweeps (default: machine parallelism;
    /// accepted but inert in builds without the `parallel` feature)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

#[derive(Subcommand)]
enum Cmd {
    /// Frobenius data (C_p, a_p, lambda_p, pi_p, b_p) over good primes
    Ap {
        /// Prime sweep bound (inclusive)
        #[arg(long, default_value_t = 100)]
        pmax: u64,
    },
    /// Cyclotomic expansion 1 - uY - vY = Q_M + W_M, exact in the ring R
    ///
    /// CSV rows are kind,r,n,m,eps,c with kind "factor" (eps, multiplicity c)
    /// or "W" (eps empty, c the integer coefficient).
    Expand {
        /// Expansion level: factors live below it, W_M at or above it
        #[arg(long = "M", default_value_t = 4)]
        m: u32,
        /// Cap on intermediate monomial counts
        #[arg(long, default_value_t = DEFAULT_EXPANSION_BUDGET)]
        budget: usize,
    },
    /// One local factor vs the level-truncated p-adic oracle
    Local {
        /// Good prime to inspect
        #[arg(long)]
        p: u64,
        /// Complex s, written like "1", "0.5+2i", "-1.5-0.3i"
        #[arg(long, value_parser = parse_complex, default_value = "1",
              allow_hyphen_values = true)]
        s: Complex64,
        /// Truncation depth: levels 0..=N enter the partial sum
        #[arg(long, default_value_t = 2)]
        levels: u32,
        /// Enumeration budget for the p-adic oracle (pairs mod p^k)
        #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: u64,
    },
    /// Truncated global Igusa product over good primes
    Global {
        #[arg(long, value_parser = parse_complex, default_value = "1",
              allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long, default_value_t = 1000)]
        pmax: u64,
    },
    /// Truncated Z_r Euler product (local factors 1 -+ t_r p^-s + p^(r-2s))
    Zr {
        /// Symmetric-trace order r >= 1
        #[arg(long)]
        r: u32,
        /// Sign choice: +1 or -1
        #[arg(long, default_value = "1", value_parser = parse_eps,
              allow_hyphen_values = true)]
        eps: i8,
        #[arg(long, value_parser = parse_complex, default_value = "4",
              allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long, default_value_t = 1000)]
        pmax: u64,
    },
    /// Residuals of the specialized identity 1 - a_p p^-s = Q_M + W_M
    CheckContinuation {
        #[arg(long = "M", default_value_t = 4)]
        m: u32,
        #[arg(long, default_value_t = 100)]
        pmax: u64,
        /// Real s grid as start:stop:step (inclusive)
        #[arg(long = "s-grid", value_parser = parse_grid, default_value = "0.8:3.0:0.55")]
        s_grid: Grid,
    },
    /// Decay probe for the tail products prod(1 + W_M) and prod(1 + W_M/Q_M)
    ProbeWq {
        #[arg(long = "M", default_value_t = 2)]
        m: u32,
        #[arg(long, value_parser = parse_complex, default_value = "1.2",
              allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long, default_value_t = 10000)]
        pmax: u64,
    },
    /// Local-zero table (CSV: p,b_p,r_p,s_p,theta_p,gap); with --target-imag,
    /// the nearest-lattice-zero accumulation table toward -3/2 + i*target
    Zeros {
        #[arg(long, default_value_t = 1000)]
        pmax: u64,
        /// Accumulation target ordinate on the boundary line
        #[arg(long = "target-imag", allow_hyphen_values = true)]
        target_imag: Option<f64>,
    },
    /// Sato-Tate histogram (bin_center, empirical_mass, semicircle_mass)
    /// plus sup-discrepancy against the semicircle CDF
    Satotate {
        #[arg(long, default_value_t = 10000)]
        pmax: u64,
        /// Histogram bin count over [-1, 1]
        #[arg(long, default_value_t = 40)]
        bins: usize,
        /// Grid points for the sup-discrepancy scan
        #[arg(long, default_value_t = 400)]
        grid: usize,
    },
    /// Run the named invariant suite; exits 1 if any invariant fails
    Verify {
        #[arg(long, default_value_t = 100)]
        pmax: u64,
        #[arg(long = "M", default_value_t = 4)]
        m: u32,
    },
}

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let parse_re = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| format!("bad real part {s:?} in {text:?}"))
    };
    let parse_im = |s: &str| match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s
            .parse::<f64>()
            .map_err(|_| format!("bad imaginary part {s:?} in {text:?}")),
    };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(parse_re(&t)?, 0.0));
    };
    // last top-level sign splits real from imaginary; signs inside an
    // exponent ("1e-3") don't count
    let bytes = body.as_bytes();
    let mut split = None;
    for (i, c) in body.char_indices().skip(1) {
        if (c == '+' || c == '-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
        }
    }
    match split {
        Some(i) => Ok(Complex64::new(parse_re(&body[..i])?, parse_im(&body[i..])?)),
        None => Ok(Complex64::new(0.0, parse_im(body)?)),
    }
}

fn parse_eps(text: &str) -> Result<i8, String> {
    match text {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("eps must be +1 or -1, got {text:?}")),
    }
}

fn parse_grid(text: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(format!("grid must be start:stop:step, got {text:?}"));
    };
    let bad = |what, s| format!("bad grid {what} {s:?} in {text:?}");
    let a: f64 = start.parse().map_err(|_| bad("start", start))?;
    let b: f64 = stop.parse().map_err(|_| bad("stop", stop))?;
    let h: f64 = step.parse().map_err(|_| bad("step", step))?;
    if !(h > 0.0) || b < a {
        return Err(format!("grid needs stop >= start and step > 0: {text:?}"));
    }
    let n = ((b - a) / h + 1e-9).floor() as usize;
    Ok(Grid((0..=n).map(|k| a + k as f64 * h).collect()))
}

/// Fixed-precision scientific form; the only float printer in the binary.
/// Collapses -0 to 0 so reruns and platforms can't disagree on the sign.
fn fmt_f(x: f64, prec: u32) -> String {
    if x == 0.0 {
        return "0e0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    format!("{:.*e}", prec as usize - 1, x)
}

/// JSON value for a float: a number when finite, a quoted token otherwise.
fn json_f(x: f64, prec: u32) -> String {
    if x.is_finite() {
        fmt_f(x, prec)
    } else {
        format!("\"{}\"", fmt_f(x, prec))
    }
}

fn fmt_c(z: Complex64, prec: u32) -> String {
    let im = fmt_f(z.im, prec);
    let sign = if im.starts_with('-') { "" } else { "+" };
    format!("{}{sign}{im}i", fmt_f(z.re, prec))
}

fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn load_curve(arg: &Option<String>) -> anyhow::Result<CurveSpec> {
    let Some(text) = arg else {
        return Ok(CurveSpec::example_cm());
    };
    let raw = if text.trim_start().starts_with('{') {
        text.clone()
    } else {
        std::fs::read_to_string(text).with_context(|| format!("reading curve file {text}"))?
    };
    let curve: CurveSpec = serde_json::from_str(&raw).with_context(|| {
        "curve JSON must be {\"weierstrass\":[A,B],\"cm\":bool} or {\"poly\":[[i,j,c],...],\"cm\":bool}"
    })?;
    Ok(curve)
}

fn subcommand_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Ap { .. } => "ap",
        Cmd::Expand { .. } => "expand",
        Cmd::Local { .. } => "local",
        Cmd::Global { .. } => "global",
        Cmd::Zr { .. } => "zr",
        Cmd::CheckContinuation { .. } => "check-continuation",
        Cmd::ProbeWq { .. } => "probe-wq",
        Cmd::Zeros { .. } => "zeros",
        Cmd::Satotate { .. } => "satotate",
        Cmd::Verify { .. } => "verify",
    }
}

fn emit(cli: &Cli, ext: &str, content: &str) -> anyhow::Result<()> {
    let target = match (&cli.out, std::env::var_os("IGUSA_OUT_DIR")) {
        (Some(p), _) if p.as_os_str() != "-" => Some(p.clone()),
        (Some(_), _) => None,
        (None, Some(dir)) => {
            std::fs::create_dir_all(&dir)
                .with_context(|| format!("creating {}", PathBuf::from(&dir).display()))?;
            Some(PathBuf::from(dir).join(format!("{}.{ext}", subcommand_name(&cli.cmd))))
        }
        (None, None) => None,
    };
    match target {
        Some(path) => std::fs::write(&path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::OracleBudget { .. }) | Some(Error::ExpansionBudget { .. }) => 3,
                _ => 2,
            };
            exit(code);
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<i32> {
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("building the worker pool")?;
    }
    let curve = load_curve(&cli.curve)?;
    let format = cli.format.unwrap_or(Format::Csv);
    let prec = cli.precision;

    match &cli.cmd {
        Cmd::Ap { pmax } => {
            let rows = curve.frobenius_sweep(*pmax)?;
            for f in rows.iter().filter(|f| f.lambda_p.is_none()) {
                eprintln!(
                    "note: lambda_p undefined at p = {} (p^2 = C_p); fields left empty",
                    f.p
                );
            }
            let content = match format {
                Format::Csv => {
                    let mut out = String::from("p,C_p,a_p,lambda_p_num,lambda_p_den,re_pi,im_pi,b_p\n");
                    for f in &rows {
                        let (num, den) = match &f.lambda_p {
                            Some(l) => (l.numer().to_string(), l.denom().to_string()),
                            None => (String::new(), String::new()),
                        };
                        let _ = writeln!(
                            out,
                            "{},{},{},{num},{den},{},{},{}",
                            f.p,
                            f.c_p,
                            f.a_p,
                            fmt_f(f.pi_p.re, prec),
                            fmt_f(f.pi_p.im, prec),
                            fmt_f(f.b_p, prec)
                        );
                    }
                    out
                }
                Format::Json => {
                    let mut out = format!(
                        "{{\"schema_version\":\"1\",\"subcommand\":\"ap\",\"prime_cutoff\":{pmax},\"rows\":["
                    );
                    for (i, f) in rows.iter().enumerate() {
                        let lambda = match &f.lambda_p {
                            Some(l) => format!("[\"{}\",\"{}\"]", l.numer(), l.denom()),
                            None => "null".into(),
                        };
                        let _ = write!(
                            out,
                            "{}{{\"p\":{},\"C_p\":{},\"a_p\":{},\"lambda_p\":{lambda},\
                             \"re_pi\":{},\"im_pi\":{},\"b_p\":{}}}",
                            if i > 0 { "," } else { "" },
                            f.p,
                            f.c_p,
                            f.a_p,
                            json_f(f.pi_p.re, prec),
                            json_f(f.pi_p.im, prec),
                            json_f(f.b_p, prec)
                        );
                    }
                    out.push_str("]}\n");
                    out
                }
            };
            emit(cli, ext(format), &content)?;
            Ok(0)
        }

        Cmd::Expand { m, budget } => {
            let exp = cyclotomic_expand(*m, *budget)?;
            let content = match format {
                Format::Csv => {
                    let mut out = String::from("kind,r,n,m,eps,c\n");
                    for f in &exp.factors {
                        let _ = writeln!(
                            out,
                            "factor,{},{},{},{},{}",
                            f.point.r, f.point.n, f.point.m, f.eps, f.c
                        );
                    }
                    for (key, coeff) in exp.w_m.terms() {
                        let _ = writeln!(out, "W,{},{},{},,{coeff}", key.0, key.1, key.2);
                    }
                    out
                }
                Format::Json => {
                    let mut out = format!("{{\"schema_version\":\"1\",\"M\":{m},\"factors\":[");
                    for (i, f) in exp.factors.iter().enumerate() {
                        let _ = write!(
                            out,
                            "{}[{},{},{},{},{}]",
                            if i > 0 { "," } else { "" },
                            f.point.r,
                            f.point.n,
                            f.point.m,
                            f.eps,
                            f.c
                        );
                    }
                    out.push_str("],\"W\":[");
                    for (i, (key, coeff)) in exp.w_m.terms().enumerate() {
                        let _ = write!(
                            out,
                            "{}[{},{},{},\"{coeff}\"]",
                            if i > 0 { "," } else { "" },
                            key.0,
                            key.1,
                            key.2
                        );
                    }
                    out.push_str("]}\n");
                    out
                }
            };
            emit(cli, ext(format), &content)?;
            Ok(0)
        }

        Cmd::Local {
            p,
            s,
            levels,
            budget,
        } => {
            let fd = curve.frobenius_data(*p)?;
            let closed = local_closed_form(&fd, *s)?;
            let oracle = local_oracle(&curve, *p, *levels, *s, *budget)?;
            let gap = (closed - oracle.partial_sum).norm();
            let agree = gap <= oracle.tail_bound + 1e-12 * (1.0 + closed.norm());
            // integer s >= 0 admits a fully exact comparison on the side
            let exact = if s.im == 0.0 && s.re >= 0.0 && s.re.fract() == 0.0 && s.re < 1e9 {
                let si = s.re as i64;
                let c = local_closed_form_exact(&fd, si)?;
                let o = local_oracle_exact(&curve, *p, *levels, si, *budget)?;
                Some((c, o))
            } else {
                None
            };
            let content = match format {
                Format::Csv => {
                    let mut out = String::from("field,value\n");
                    let mut kv = |k: &str, v: String| {
                        let _ = writeln!(out, "{k},{}", csv_field(&v));
                    };
                    kv("p", p.to_string());
                    kv("s", fmt_c(*s, prec));
                    kv("levels", levels.to_string());
                    kv("closed_re", fmt_f(closed.re, prec));
                    kv("closed_im", fmt_f(closed.im, prec));
                    kv("partial_re", fmt_f(oracle.partial_sum.re, prec));
                    kv("partial_im", fmt_f(oracle.partial_sum.im, prec));
                    kv("tail_bound", fmt_f(oracle.tail_bound, prec));
                    kv("agree", if agree { "PASS" } else { "FAIL" }.to_string());
                    if let Some((c, o)) = &exact {
                        kv("closed_exact", c.to_string());
                        kv("partial_exact", o.partial_sum.to_string());
                        kv("tail_exact", o.tail_bound.to_string());
                        let diff = (c - &o.partial_sum).to_f64().map(f64::abs);
                        kv(
                            "agree_exact",
                            if diff.is_some_and(|d| {
                                d <= o.tail_bound.to_f64().unwrap_or(f64::INFINITY)
                            }) {
                                "PASS".into()
                            } else {
                                "FAIL".into()
                            },
                        );
                    }
                    out
                }
                Format::Json => {
                    let mut out = format!(
                        "{{\"schema_version\":\"1\",\"p\":{p},\"s\":[{},{}],\"levels\":{levels},\
                         \"closed\":[{},{}],\"partial\":[{},{}],\"tail_bound\":{},\"agree\":{agree}",
                        json_f(s.re, prec),
                        json_f(s.im, prec),
                        json_f(closed.re, prec),
                        json_f(closed.im, prec),
                        json_f(oracle.partial_sum.re, prec),
                        json_f(oracle.partial_sum.im, prec),
                        json_f(oracle.tail_bound, prec)
                    );
                    if let Some((c, o)) = &exact {
                        let _ = write!(
                            out,
                            ",\"closed_exact\":{},\"partial_exact\":{},\"tail_exact\":{}",
                            json_str(&c.to_string()),
                            json_str(&o.partial_sum.to_string()),
                            json_str(&o.tail_bound.to_string())
                        );
                    }
                    out.push_str("}\n");
                    out
                }
            };
            emit(cli, ext(format), &content)?;
            Ok(0)
        }

        Cmd::Global { s, pmax } => {
            let product = igusa_global(&curve, *s, *pmax)?;
            let content = render_product("global", None, *s, &product, format, prec);
            emit(cli, ext(format), &content)?;
            Ok(0)
        }

        Cmd::Zr { r, eps, s, pmax } => {
            let product = z_r_partial(&curve, *r, *s, *pmax, *eps)?;
            let content = render_product("zr", Some((*r, *eps)), *s, &product, format, prec);
            emit(cli, ext(format), &content)?;
            Ok(0)
        }

        Cmd::CheckContinuation { m, pmax, s_grid } => {
            let expansion = cyclotomic_expand(*m, DEFAULT_EXPANSION_BUDGET)?;
            let sweep = curve.frobenius_sweep(*pmax)?;
            let mut rows = Vec::new();
            for &s_re in &s_grid.0 {
                let s = Complex64::new(s_re, 0.0);
                for fd in &sweep {
                    rows.push((s_re, continuation_identity_check_with(&expansion, fd, s)?));
                }
            }
            let worst = rows
                .iter()
                .map(|(_, c)| c.residual.max(c.max_factor_residual))
                .fold(0.0f64, f64::max);
            let content = match format {
                Format::Csv => {
                    let mut out = String::from("p,M,s,residual,max_factor_residual\n");
                    for (s_re, c) in &rows {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{}",
                            c.p,
                            c.m,
                            fmt_f(*s_re, prec),
                            fmt_f(c.residual, prec),
                            fmt_f(c.max_factor_residual, prec)
                        );
                    }
                    out
                }
                Format::Json => {
                    let mut out = format!(
                        "{{\"schema_version\":\"1\",\"M\":{m},\"prime_cutoff\":{pmax},\
                         \"max_residual\":{},\"rows\":[",
                        json_f(worst, prec)
                    );
                    for (i, (s_re, c)) in rows.iter().enumerate() {
                        let _ = write!(
                            out,
                            "{}{{\"p\":{},\"s\":{},\"residual\":{},\"max_factor_residual\":{}}}",
                            if i > 0 { "," } else { "" },
                            c.p,
                            json_f(*s_re, prec),
                            json_f(c.residual, prec),
                            json_f(c.max_factor_residual, prec)
                        );
                    }
                    out.push_str("]}\n");
                    out
                }
            };
            emit(cli, ext(format), &content)?;
            Ok(0)
        }

        Cmd::ProbeWq { m, s, pmax } => {
            let report = w_over_q_convergence_probe(&curve, *m, *s, *pmax)?;
            let content = match format {
                Format::Csv => {
                    let mut out = String::from(
                        "M,s,prime_cutoff,n_primes,w_re,w_im,wq_re,wq_im,slope_w,slope_wq,\
                         n_excluded,tail_estimate\n",
                    );
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{},{},{}",
                        report.m,
                        fmt_c(report.s, prec),
                        report.prime_cutoff,
                        report.n_primes,
                        fmt_f(report.w_product.re, prec),
                        fmt_f(report.w_product.im, prec),
                        fmt_f(report.wq_product.re, prec),
                        fmt_f(report.wq_product.im, prec),
                        fmt_f(report.slope_w, prec),
                        fmt_f(report.slope_wq, prec),
                        report.excluded_primes.len(),
                        fmt_f(report.tail_estimate, prec)
                    );
                    out
                }
                Format::Json => {
                    let excl: Vec<String> =
                        report.excluded_primes.iter().map(u64::to_string).collect();
                    format!(
                        "{{\"schema_version\":\"1\",\"M\":{},\"s\":[{},{}],\"prime_cutoff\":{},\
                         \"n_primes\":{},\"w_product\":[{},{}],\"wq_product\":[{},{}],\
                         \"slope_w\":{},\"slope_wq\":{},\"excluded_primes\":[{}],\
                         \"tail_estimate\":{}}}\n",
                        report.m,
                        json_f(report.s.re, prec),
                        json_f(report.s.im, prec),
                        report.prime_cutoff,
                        report.n_primes,
                        json_f(report.w_product.re, prec),
                        json_f(report.w_product.im, prec),
                        json_f(report.wq_product.re, prec),
                        json_f(report.wq_product.im, prec),
                        json_f(report.slope_w, prec),
                        json_f(report.slope_wq, prec),
                        excl.join(","),
                        json_f(report.tail_estimate, prec)
                    )
                }
            };
            emit(cli, ext(format), &content)?;
            Ok(0)
        }

        Cmd::Zeros { pmax, target_imag } => {
            let content = match target_imag {
                None => {
                    let recs = zero_records(&curve, *pmax)?;
                    match format {
                        Format::Csv => {
                            let mut out = String::from("p,b_p,r_p,s_p,theta_p,gap\n");
                            for r in &recs {
                                let _ = writeln!(
                                    out,
                                    "{},{},{},{},{},{}",
                                    r.p,
                                    fmt_f(r.b_p, prec),
                                    fmt_f(r.r_p, prec),
                                    fmt_f(r.s_p, prec),
                                    fmt_f(r.theta_p, prec),
                                    fmt_f(r.gap, prec)
                                );
                            }
                            out
                        }
                        Format::Json => {
                            let mut out = format!(
                                "{{\"schema_version\":\"1\",\"prime_cutoff\":{pmax},\"rows\":["
                            );
                            for (i, r) in recs.iter().enumerate() {
                                let _ = write!(
                                    out,
                                    "{}{{\"p\":{},\"b_p\":{},\"r_p\":{},\"s_p\":{},\
                                     \"theta_p\":{},\"gap\":{},\"in_P_E\":{},\"residual\":{}}}",
                                    if i > 0 { "," } else { "" },
                                    r.p,
                                    json_f(r.b_p, prec),
                                    json_f(r.r_p, prec),
                                    json_f(r.s_p, prec),
                                    json_f(r.theta_p, prec),
                                    json_f(r.gap, prec),
                                    r.in_p_e,
                                    json_f(r.residual, prec)
                                );
                            }
                            out.push_str("]}\n");
                            out
                        }
                    }
                }
                Some(target) => {
                    let rows = accumulation_report(&curve, *pmax, *target)?;
                    match format {
                        Format::Csv => {
                            let mut out =
                                String::from("p,n_p,zero_re,zero_im,distance,record_low\n");
                            for r in &rows {
                                let _ = writeln!(
                                    out,
                                    "{},{},{},{},{},{}",
                                    r.p,
                                    r.n_p,
                                    fmt_f(r.zero.re, prec),
                                    fmt_f(r.zero.im, prec),
                                    fmt_f(r.distance, prec),
                                    r.record_low
                                );
                            }
                            out
                        }
                        Format::Json => {
                            let mut out = format!(
                                "{{\"schema_version\":\"1\",\"prime_cutoff\":{pmax},\
                                 \"target_imag\":{},\"rows\":[",
                                json_f(*target, prec)
                            );
                            for (i, r) in rows.iter().enumerate() {
                                let _ = write!(
                                    out,
                                    "{}{{\"p\":{},\"n_p\":{},\"zero\":[{},{}],\
                                     \"distance\":{},\"record_low\":{}}}",
                                    if i > 0 { "," } else { "" },
                                    r.p,
                                    r.n_p,
                                    json_f(r.zero.re, prec),
                                    json_f(r.zero.im, prec),
                                    json_f(r.distance, prec),
                                    r.record_low
                                );
                            }
                            out.push_str("]}\n");
                            out
                        }
                    }
                }
            };
            emit(cli, ext(format), &content)?;
            Ok(0)
        }

        Cmd::Satotate { pmax, bins, grid } => {
            let report = sato_tate_report(&curve, *pmax, *grid)?;
            let hist = sato_tate_histogram(&report.samples, *bins);
            let label = "CM curve: semicircle comparison not expected to pass";
            let content = match format {
                Format::Csv => {
                    let mut out = String::new();
                    if report.cm {
                        let _ = writeln!(out, "# {label}");
                    }
                    let _ = writeln!(
                        out,
                        "# prime_cutoff={} n_samples={} sup_discrepancy={} zero_fraction={}",
                        report.prime_cutoff,
                        report.samples.len(),
                        fmt_f(report.sup_discrepancy, prec),
                        fmt_f(report.zero_fraction, prec)
                    );
                    out.push_str("bin_center,empirical_mass,semicircle_mass\n");
                    for (c, e, m) in &hist {
                        let _ = writeln!(
                            out,
                            "{},{},{}",
                            fmt_f(*c, prec),
                            fmt_f(*e, prec),
                            fmt_f(*m, prec)
                        );
                    }
                    out
                }
                Format::Json => {
                    let mut out = format!(
                        "{{\"schema_version\":\"1\",\"prime_cutoff\":{},\"n_samples\":{},\
                         \"sup_discrepancy\":{},\"zero_fraction\":{},\"cm\":{}",
                        report.prime_cutoff,
                        report.samples.len(),
                        json_f(report.sup_discrepancy, prec),
                        json_f(report.zero_fraction, prec),
                        report.cm
                    );
                    if report.cm {
                        let _ = write!(out, ",\"label\":{}", json_str(label));
                    }
                    out.push_str(",\"histogram\":[");
                    for (i, (c, e, m)) in hist.iter().enumerate() {
                        let _ = write!(
                            out,
                            "{}[{},{},{}]",
                            if i > 0 { "," } else { "" },
                            json_f(*c, prec),
                            json_f(*e, prec),
                            json_f(*m, prec)
                        );
                    }
                    out.push_str("]}\n");
                    out
                }
            };
            emit(cli, ext(format), &content)?;
            Ok(0)
        }

        Cmd::Verify { pmax, m } => {
            let results = run_suite(&curve, *pmax, *m)?;
            let ok = all_pass(&results);
            let (extension, content) = match cli.format {
                None => {
                    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
                    let mut out = String::new();
                    for r in &results {
                        let _ = writeln!(
                            out,
                            "{}  {:width$}  {}",
                            if r.pass { "PASS" } else { "FAIL" },
                            r.name,
                            r.detail
                        );
                    }
                    let _ = writeln!(
                        out,
                        "{}: {} of {} invariants passed",
                        if ok { "ok" } else { "FAILED" },
                        results.iter().filter(|r| r.pass).count(),
                        results.len()
                    );
                    ("txt", out)
                }
                Some(Format::Csv) => {
                    let mut out = String::from("name,pass,detail\n");
                    for r in &results {
                        let _ = writeln!(out, "{},{},{}", r.name, r.pass, csv_field(&r.detail));
                    }
                    ("csv", out)
                }
                Some(Format::Json) => {
                    let mut out = String::from("{\"schema_version\":\"1\",\"results\":[");
                    for (i, r) in results.iter().enumerate() {
                        let _ = write!(
                            out,
                            "{}{{\"name\":\"{}\",\"pass\":{},\"detail\":{}}}",
                            if i > 0 { "," } else { "" },
                            r.name,
                            r.pass,
                            json_str(&r.detail)
                        );
                    }
                    let _ = write!(out, "],\"all_pass\":{ok}}}\n");
                    ("json", out)
                }
            };
            emit(cli, extension, &content)?;
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn ext(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn render_product(
    kind: &str,
    r_eps: Option<(u32, i8)>,
    s: Complex64,
    product: &PartialProduct,
    format: Format,
    prec: u32,
) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            let mut header = String::new();
            let mut row = String::new();
            if let Some((r, eps)) = r_eps {
                header.push_str("r,eps,");
                let _ = write!(row, "{r},{eps},");
            }
            header.push_str(
                "s,prime_cutoff,n_factors,value_re,value_im,log_re,log_im,tail_estimate,\
                 certified,omitted_primes\n",
            );
            let omitted: Vec<String> = product.omitted_primes.iter().map(u64::to_string).collect();
            let _ = writeln!(
                row,
                "{},{},{},{},{},{},{},{},{},{}",
                fmt_c(s, prec),
                product.prime_cutoff,
                product.n_factors,
                fmt_f(product.value.re, prec),
                fmt_f(product.value.im, prec),
                fmt_f(product.log_sum.re, prec),
                fmt_f(product.log_sum.im, prec),
                fmt_f(product.tail_estimate, prec),
                product.certified,
                omitted.join(";")
            );
            out.push_str(&header);
            out.push_str(&row);
            out
        }
        Format::Json => {
            let mut out = format!("{{\"schema_version\":\"1\",\"subcommand\":\"{kind}\"");
            if let Some((r, eps)) = r_eps {
                let _ = write!(out, ",\"r\":{r},\"eps\":{eps}");
            }
            let omitted: Vec<String> = product.omitted_primes.iter().map(u64::to_string).collect();
            let _ = write!(
                out,
                ",\"s\":[{},{}],\"prime_cutoff\":{},\"n_factors\":{},\"value\":[{},{}],\
                 \"log_sum\":[{},{}],\"tail_estimate\":{},\"certified\":{},\
                 \"omitted_primes\":[{}]}}\n",
                json_f(s.re, prec),
                json_f(s.im, prec),
                product.prime_cutoff,
                product.n_factors,
                json_f(product.value.re, prec),
                json_f(product.value.im, prec),
                json_f(product.log_sum.re, prec),
                json_f(product.log_sum.im, prec),
                json_f(product.tail_estimate, prec),
                product.certified,
                omitted.join(",")
            );
            out
        }
    }
}
