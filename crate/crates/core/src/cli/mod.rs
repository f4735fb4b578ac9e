//! Command-line front end. [`run`] parses arguments, runs one subcommand and
//! returns the exit code with a JSON [`Report`]; the `ainf` binary prints it.
//!
//! Exit codes: `0` every verdict passes, `1` some verdict fails, `2` some
//! verdict is indeterminate, `3` usage, input or resource error.

mod report;
mod selftest;

pub use report::{Outcome, Report, Verdict, SCHEMA};
pub use selftest::selftest;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::glue::{glue_to_free, reflexivity_check, GlueDatum};
use crate::newton::newton_polygon;
use crate::tower::{covering_table_check, Monomial, Tower, TowerTag};
use crate::value_group::{GammaElt, GroupKind};
use crate::witness::{
    build_archimedean_witness, build_nonarchimedean_witness, build_scholze_element, candidate_family,
    factorization_obstruction_check, ideal_chain_report, liouville_certificate, regroup, ObstructionOutcome,
};
use crate::witt::{poly::table_cap, ring_membership, Membership, RingTag, WittJson, WittVec};

#[derive(Parser, Debug)]
#[command(name = "ainf", version, about = "Exact truncated computations in W(o_K)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Witt vector arithmetic on JSON operands {"x": ..., "y": ...}.
    Witt {
        op: WittOp,
        #[arg(long)]
        input: PathBuf,
        /// Ring for `member` (A, A1p, WK, WK1p, WmK); all when omitted.
        #[arg(long)]
        ring: Option<String>,
        /// Exponent cap for series inverses in `div`.
        #[arg(long, default_value = "16")]
        gamma: String,
    },
    /// Newton polygon of a JSON Witt vector.
    Newton {
        op: NewtonOp,
        #[arg(long)]
        input: PathBuf,
    },
    /// Non-coherence witness and its ideal chain.
    Witness {
        kind: WitnessKind,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
    },
    /// Element of W(m_K) that is not a product of two elements of W(m_K).
    Scholze {
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 1000)]
        height: u64,
    },
    /// Free basis of a bundle given by two charts and a transition matrix.
    Glue {
        #[arg(long)]
        input: PathBuf,
        /// Override the datum's p-adic precision.
        #[arg(long = "N")]
        n: Option<i64>,
        /// Override the datum's exponent cap.
        #[arg(long)]
        gamma: Option<String>,
    },
    /// Monomial regions of the rings around the punctured spectrum.
    Tower {
        op: TowerOp,
        /// p-exponent of the monomial for `member`.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        a: i64,
        /// t-exponent of the monomial for `member`.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        gamma: String,
        /// Ring for `member`; all when omitted.
        #[arg(long)]
        tag: Option<String>,
        /// Half-width of the window for `table`.
        #[arg(long, default_value_t = 8)]
        window: i64,
    },
    /// Run a reduced invariant suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum WittOp {
    Add,
    Mul,
    Div,
    Member,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum NewtonOp {
    Show,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum WitnessKind {
    Arch,
    Nonarch,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TowerOp {
    Member,
    Table,
}

#[derive(Deserialize)]
struct Operands {
    x: WittJson,
    #[serde(default)]
    y: Option<WittJson>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn parse_rat(s: &str) -> Result<BigRational> {
    s.trim().parse::<BigRational>().map_err(|_| Error::Invalid(format!("{s:?} is not a rational number")))
}

fn parse_gamma(kind: GroupKind, s: &str, p: u32) -> Result<GammaElt> {
    let q = parse_rat(s)?;
    match kind {
        GroupKind::Zp1 => GammaElt::zp1(q, p),
        GroupKind::Rat => Ok(GammaElt::Rat(q)),
        GroupKind::Lex => GammaElt::lex(q, BigRational::from_integer(0.into()), p),
    }
}

/// Parse arguments (without the program name) and run.
pub fn run<S: AsRef<str>>(argv: &[S]) -> (i32, Report) {
    let args = std::iter::once("ainf").chain(argv.iter().map(AsRef::as_ref));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let mut r = Report::new("usage");
            let code = if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                r.cert("text", e.to_string());
                0
            } else {
                r.error = Some(e.to_string());
                3
            };
            return (code, r.seal());
        }
    };
    let mut r = Report::new(command_name(&cli.cmd));
    r.param("table_cap", table_cap());
    if let Err(e) = dispatch(cli.cmd, &mut r) {
        r.error = Some(e.to_string());
    }
    let r = r.seal();
    (r.exit_code(), r)
}

fn command_name(c: &Cmd) -> String {
    match c {
        Cmd::Witt { op, .. } => format!("witt {}", format!("{op:?}").to_lowercase()),
        Cmd::Newton { .. } => "newton show".into(),
        Cmd::Witness { kind, .. } => format!("witness {}", format!("{kind:?}").to_lowercase()),
        Cmd::Scholze { .. } => "scholze".into(),
        Cmd::Glue { .. } => "glue".into(),
        Cmd::Tower { op, .. } => format!("tower {}", format!("{op:?}").to_lowercase()),
        Cmd::Selftest { .. } => "selftest".into(),
    }
}

fn dispatch(cmd: Cmd, r: &mut Report) -> Result<()> {
    match cmd {
        Cmd::Witt { op, input, ring, gamma } => witt(op, &input, ring.as_deref(), &gamma, r),
        Cmd::Newton { input, .. } => newton(&input, r),
        Cmd::Witness { kind, p, depth, kmax } => witness(kind, p, depth, kmax, r),
        Cmd::Scholze { p, depth, height } => scholze(p, depth, height, r),
        Cmd::Glue { input, n, gamma } => glue(&input, n, gamma.as_deref(), r),
        Cmd::Tower { op, a, gamma, tag, window } => tower(op, a, &gamma, tag.as_deref(), window, r),
        Cmd::Selftest { seed } => {
            r.param("seed", seed);
            selftest(seed, r);
            Ok(())
        }
    }
}

fn witt(op: WittOp, input: &Path, ring: Option<&str>, gamma: &str, r: &mut Report) -> Result<()> {
    r.param("input", input.display().to_string());
    let ops: Operands = read_json(input)?;
    let x = ops.x.to_witt()?;
    let y = || -> Result<WittVec> {
        ops.y.as_ref().ok_or_else(|| Error::Invalid("operand y is missing".into()))?.to_witt()
    };
    match op {
        WittOp::Add => {
            let y = y()?;
            let z = r.timed("add", |_| x.add(&y))?;
            let back = z.sub(&y)?;
            r.check("(x + y) - y = x", back.congruent(&x), format!("known to level {}", back.precision()));
            r.cert("result", &z);
        }
        WittOp::Mul => {
            let y = y()?;
            let z = r.timed("mul", |_| x.mul(&y))?;
            r.cert("result", &z);
            r.param("gamma", gamma);
            match z.div(&y, &parse_gamma(x.kind(), gamma, x.p())?) {
                Ok(back) => r.check("(x y) / y = x", back.congruent(&x), format!("known to level {}", back.precision())),
                Err(e) => r.verdict("(x y) / y = x", Outcome::Indeterminate, e.to_string()),
            }
        }
        WittOp::Div => {
            let y = y()?;
            r.param("gamma", gamma);
            let gp = parse_gamma(x.kind(), gamma, x.p())?;
            let q = r.timed("div", |_| x.div(&y, &gp))?;
            let back = q.mul(&y)?;
            r.check("(x / y) y = x", back.congruent(&x), format!("known to level {}", back.precision()));
            r.cert("result", &q);
        }
        WittOp::Member => {
            let tags = match ring {
                Some(s) => vec![s.parse::<RingTag>()?],
                None => RingTag::ALL.to_vec(),
            };
            let m: Vec<_> = tags.iter().map(|t| (t.to_string(), ring_membership(&x, *t))).collect();
            for (t, v) in &m {
                let outcome = match v {
                    Membership::Yes | Membership::No => Outcome::Pass,
                    Membership::Indeterminate => Outcome::Indeterminate,
                };
                r.verdict(&format!("member {t}"), outcome, format!("{v:?}").to_lowercase());
            }
            r.cert("membership", json!(m.into_iter().collect::<std::collections::BTreeMap<_, _>>()));
        }
    }
    Ok(())
}

fn newton(input: &Path, r: &mut Report) -> Result<()> {
    r.param("input", input.display().to_string());
    let h = read_json::<WittJson>(input)?.to_witt()?;
    let np = newton_polygon(&h)?;
    r.cert("polygon", &np);
    r.cert("slopes", np.slopes());
    r.cert("plot", np.ascii_plot());
    r.check("polygon computed", true, format!("certified width {}", np.certified_prefix));
    Ok(())
}

fn witness(kind: WitnessKind, p: u32, depth: usize, kmax: usize, r: &mut Report) -> Result<()> {
    r.param("p", p);
    r.param("depth", depth);
    r.param("kmax", kmax);
    let chain = match kind {
        WitnessKind::Arch => {
            let w = build_archimedean_witness(p, depth)?;
            r.cert("witness", &w);
            r.timed("chain", |_| ideal_chain_report(&w, kmax))?
        }
        WitnessKind::Nonarch => {
            let w = build_nonarchimedean_witness(p, depth)?;
            r.cert("witness", &w);
            r.timed("chain", |_| ideal_chain_report(&w, kmax))?
        }
    };
    for e in &chain.entries {
        let outcome = match e.membership.verdict {
            crate::witness::IntersectionVerdict::In => Outcome::Pass,
            crate::witness::IntersectionVerdict::Out => Outcome::Fail,
            crate::witness::IntersectionVerdict::Indeterminate => Outcome::Indeterminate,
        };
        r.verdict(&format!("h_{} in (f) ∩ (g)", e.k), outcome, format!("leading valuation {}", e.leading_valuation));
    }
    r.check("leading valuations strictly decreasing", chain.strictly_decreasing, "");
    r.check("leading valuations above the bounds", chain.above_bounds, "");
    r.check("infimum not attained", chain.infimum_not_attained, "");
    r.cert("chain", &chain);
    Ok(())
}

fn scholze(p: u32, depth: usize, height: u64, r: &mut Report) -> Result<()> {
    r.param("p", p);
    r.param("depth", depth);
    r.param("height", height);
    let x = build_scholze_element(p, depth)?;
    r.cert("element", &x);
    let odd: Vec<bool> = (1..=x.r.len()).map(|k| k % 2 == 1).collect();
    let u = regroup(&x.r, &odd);
    match liouville_certificate(&u, height) {
        Ok(c) => {
            r.check("gap condition and Liouville bound", true, format!("stage {}", c.stage));
            r.cert("liouville", c);
        }
        Err(f) => {
            r.check("gap condition and Liouville bound", false, format!("{f:?}"));
            r.cert("liouville", f);
        }
    }
    let family = candidate_family(&x)?;
    let mut outcomes = Vec::new();
    let (mut violated, mut indeterminate) = (0, 0);
    r.timed("obstruction", |_| -> Result<()> {
        for c in &family {
            let o = factorization_obstruction_check(&x, &c.y, &c.z)?;
            match &o {
                ObstructionOutcome::Violated { .. } => violated += 1,
                ObstructionOutcome::Indeterminate { .. } => indeterminate += 1,
            }
            outcomes.push(json!({"label": c.label, "outcome": o}));
        }
        Ok(())
    })?;
    r.cert("candidates", outcomes);
    let reason = format!("{violated} of {} violated, {indeterminate} indeterminate", family.len());
    let outcome = if violated == family.len() {
        Outcome::Pass
    } else if indeterminate > 0 {
        Outcome::Indeterminate
    } else {
        Outcome::Fail
    };
    r.verdict("every candidate factorization violated", outcome, reason);
    Ok(())
}

fn glue(input: &Path, n: Option<i64>, gamma: Option<&str>, r: &mut Report) -> Result<()> {
    r.param("input", input.display().to_string());
    let mut datum: GlueDatum = read_json(input)?;
    if let Some(n) = n {
        datum = GlueDatum::new(datum.p, datum.kind, datum.d, datum.factors, n, datum.gamma_max)?;
    }
    if let Some(g) = gamma {
        let gm = parse_gamma(datum.kind, g, datum.p)?;
        datum = GlueDatum::new(datum.p, datum.kind, datum.d, datum.factors, datum.n, gm)?;
    }
    r.param("N", datum.n);
    r.param("gamma", &datum.gamma_max);
    let cert = match r.timed("glue", |_| glue_to_free(&datum)) {
        Ok(c) => c,
        Err(e @ (Error::LatticeDefect { .. } | Error::TransferStall { .. })) => {
            r.verdict("glue to free", Outcome::Indeterminate, e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    r.cert("basis", &cert.basis);
    r.cert("U", &cert.u);
    r.cert("Q", &cert.q);
    r.cert("residual", &cert.residual);
    r.check("T Q = U at precision", cert.residual.passed(), format!("precision {}", cert.residual.precision));
    r.check("U over A[1/p], Q over W(K)", cert.u_in_a_inv_p == Membership::Yes && cert.q_in_wk == Membership::Yes, "");
    r.check("sections complete", cert.sections_complete, "");
    r.check(
        "generators transfer with coefficients in A",
        cert.transfer.coefficients_in_a == Membership::Yes && cert.transfer.recombined,
        "",
    );
    let refl = reflexivity_check(&cert.q, &datum)?;
    r.check("reflexive", refl.holds, "");
    r.cert("reflexivity", &refl);
    r.cert("certificate", &cert);
    Ok(())
}

fn tower(op: TowerOp, a: i64, gamma: &str, tag: Option<&str>, window: i64, r: &mut Report) -> Result<()> {
    let t = Tower::default();
    match op {
        TowerOp::Member => {
            let m = Monomial::new(a, parse_gamma(GroupKind::Rat, gamma, 2)?);
            r.param("a", a);
            r.param("gamma", gamma);
            let tags = match tag {
                Some(s) => vec![TowerTag::parse(s)?],
                None => TowerTag::ALL.to_vec(),
            };
            let mut out = std::collections::BTreeMap::new();
            for tg in tags {
                out.insert(tg.to_string(), t.member(&m, tg)?);
            }
            r.cert("monomial", &m);
            r.cert("membership", out);
            r.check("membership computed", true, "");
        }
        TowerOp::Table => {
            r.param("window", window);
            if window < 0 {
                return Err(Error::Invalid("window must be nonnegative".into()));
            }
            let rep = r.timed("table", |_| covering_table_check(&t, window))?;
            for c in &rep.cells {
                r.check(&c.cell, c.passed, format!("{} monomials", c.checked));
            }
            r.cert("regions", &t);
            r.cert("table", &rep);
        }
    }
    Ok(())
}
