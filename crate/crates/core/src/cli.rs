//! Command-line frontend. Every command builds a JSON value; `--format table`
//! renders that value instead of printing it.

use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::acceptance::{self, AcceptanceConfig};
use crate::artin_schreier::{
    curve_points, s_m_f, standard_basis, t_m_f, t_m_via_sums, CurveOracle, PSum, PlaneCurve, PlaneFunction,
    DEFAULT_POINT_SCAN_CAP,
};
use crate::conditions::{
    check_condn_symmetry, check_equalpowers, check_witnesses, classify_report, odd_prime_powers, CondParams,
};
use crate::cover::{
    distinguished_char_search, l_poly_mod_p, normalize_four_points, p_rank_of_char, psi_matching_experiment,
    recover_from_second_char, recover_lambda, same_configuration, FourPoints, Lambda, ProjPoint,
};
use crate::curve_recovery::{
    legendre_query, legendre_recover, legendre_recover_from_sums, recover_curve, OracleMode, RecoveryConfig,
    RecoveryContext, RecoveryInstance,
};
use crate::error::{bail, Error, Result};
use crate::field::{build_field, Elem, FieldTower, Level};
use crate::oracle;
use crate::place_sums::{s_n, SumJson};
use crate::poly::{BivariateJson, BivariatePoly};
use crate::power_sums::{power_sums_of, reconstruct, MultisetSpec};

/// Environment variable overriding the default point-scan cap (`q^{2m}`).
pub const SCAN_CAP_ENV: &str = "LRECOVER_SCAN_CAP";

#[derive(Parser, Debug)]
#[command(name = "lrecover", version, about = "L-function and exponential-sum recovery over finite fields")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Direct,
    Protocol,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Moduli and generators of the tower F_p ⊂ F_q ⊂ F_{q^m}.
    FieldInfo {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
    /// Mod-p L-polynomial of χ_{b,c} for the cover branched at 0, 1, λ, ∞.
    Lpoly {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, allow_hyphen_values = true)]
        c: i64,
    },
    /// Exact character sum over degree-n points, as a group-ring element.
    Svals {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, allow_hyphen_values = true)]
        c: i64,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Distinguished characters and the n-condition classification.
    Distinguished {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// All λ whose χ_{1,1} coefficient is v up to Frobenius; with --v2, the
    /// unique λ also matching the χ_{1,2} coefficient.
    RecoverLambda {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        v: String,
        #[arg(long)]
        v2: Option<String>,
    },
    /// Compares two configurations (P1, P2, {P3, P4}); each --pts is a JSON
    /// array of four elements or "inf".
    SameConfig {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, num_args = 1)]
        pts: Vec<String>,
    },
    /// Automorphisms ψ under which all L-functions of λ and λ′ agree.
    PsiExperiment {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        lambda: String,
        #[arg(long = "lambda2")]
        lambda2: String,
    },
    /// The C(n) lemmas and the classification for one q or all odd q ≤ qmax.
    VerifyConditions {
        #[arg(long, conflicts_with = "qmax")]
        q: Option<u64>,
        #[arg(long)]
        qmax: Option<u64>,
    },
    /// S_m(f) and T_m(f) on a curve, directly and through the basis sums.
    Expsum {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        curve: String,
        #[arg(long)]
        f: String,
    },
    /// Power sums of a multiset, or the multiset of given power sums (JSON
    /// in: {"roots", "mults", "count"} or {"n", "values"}).
    Powersums {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value = "-")]
        input: String,
    },
    /// Recovers a monic-in-y curve from its trace sums.
    RecoverCurve {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        curve: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Direct)]
        mode: ModeArg,
        #[arg(long, default_value_t = 8)]
        m_cap: u32,
        #[arg(long, default_value_t = 5)]
        sample: u32,
        #[arg(long, default_value_t = 2)]
        g_degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Legendre self-test: enumerate y² = x(x−1)(x−λ) and recover λ.
    Legendre {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        lambda: String,
    },
    /// λ from the sums S_1(γ x(1 − y^{q−1})) over the basis γ = 1, t, …
    /// (JSON in: {"sums": [[counts], ...]}).
    LegendreRecover {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value = "-")]
        sums: String,
    },
    /// Runs an acceptance suite.
    Acceptance {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        qmax: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        /// Include wall-clock times (output is then not byte-reproducible).
        #[arg(long)]
        timings: bool,
    },
}

fn scan_cap() -> Result<u64> {
    match std::env::var(SCAN_CAP_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| Error::Parameter(format!("{SCAN_CAP_ENV}={s} is not an integer"))),
        Err(_) => Ok(DEFAULT_POINT_SCAN_CAP),
    }
}

fn tower(f: &FieldArgs, m: u32) -> Result<FieldTower> {
    build_field(f.p, f.r, m)
}

fn read_input(path: &str) -> Result<Value> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parameter(format!("reading stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Parameter(format!("reading {path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Parameter(format!("{path}: invalid JSON: {e}")))
}

/// An element given as its integer encoding or as nested coordinate arrays.
pub fn decode_value(t: &FieldTower, level: Level, v: &Value) -> Result<Elem> {
    match v {
        Value::Number(n) => {
            let x = n.as_u64().ok_or_else(|| Error::Parameter(format!("{n} is not an element encoding")))?;
            let f = t.field(level);
            if x >= f.order() as u64 {
                bail!(Parameter, "{x} is not an element of F_{}", f.order());
            }
            Ok(Elem(x as u32))
        }
        Value::Array(_) => {
            let enc: Vec<Vec<u32>> =
                serde_json::from_value(v.clone()).map_err(|e| Error::Parameter(format!("bad element {v}: {e}")))?;
            t.decode(level, &enc)
        }
        _ => Err(Error::Parameter(format!("bad element {v}"))),
    }
}

fn parse_elem(t: &FieldTower, s: &str) -> Result<Elem> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parameter(format!("bad element '{s}': {e}")))?;
    decode_value(t, Level::Mid, &v)
}

fn parse_lambda(t: &FieldTower, s: &str) -> Result<Lambda> {
    Lambda::new(t, parse_elem(t, s)?)
}

fn put_elem(map: &mut Map<String, Value>, t: &FieldTower, level: Level, name: &str, x: Elem) {
    map.insert(name.to_string(), json!(x.0));
    map.insert(format!("{name}_coords"), json!(t.encode(level, x)));
}

fn put_elems(map: &mut Map<String, Value>, t: &FieldTower, level: Level, name: &str, xs: &[Elem]) {
    map.insert(name.to_string(), json!(xs.iter().map(|x| x.0).collect::<Vec<_>>()));
    map.insert(format!("{name}_coords"), json!(xs.iter().map(|&x| t.encode(level, x)).collect::<Vec<_>>()));
}

fn header(t: Option<&FieldTower>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(1));
    if let Some(t) = t {
        m.insert("q".into(), json!(t.q()));
    }
    m
}

fn poly_json(t: &FieldTower, f: &BivariatePoly) -> Value {
    serde_json::to_value(f.to_json(|c| json!(t.encode(Level::Mid, c)))).expect("serializable")
}

fn read_curve(t: &FieldTower, path: &str) -> Result<BivariatePoly> {
    let v = read_input(path)?;
    let j: BivariateJson = serde_json::from_value(v).map_err(|e| Error::Parameter(format!("{path}: {e}")))?;
    BivariatePoly::from_json(&j, t.base(), |v| decode_value(t, Level::Mid, v))
}

fn point_json(p: ProjPoint) -> Value {
    match p {
        ProjPoint::Fin(x) => json!(x.0),
        ProjPoint::Inf => json!("inf"),
    }
}

fn parse_points(t: &FieldTower, s: &str) -> Result<FourPoints> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parameter(format!("bad point list '{s}': {e}")))?;
    let arr = v.as_array().filter(|a| a.len() == 4).ok_or_else(|| Error::Parameter("--pts needs four points".into()))?;
    let mut out = [ProjPoint::Inf; 4];
    for (slot, item) in out.iter_mut().zip(arr) {
        *slot = match item {
            Value::String(s) if s == "inf" => ProjPoint::Inf,
            other => ProjPoint::Fin(decode_value(t, Level::Mid, other)?),
        };
    }
    Ok(out)
}

fn display_poly(f: &BivariatePoly) -> String {
    f.display(|e| e.0.to_string())
}

/// Runs one command and returns its JSON report.
pub fn execute(cmd: &Command) -> Result<Value> {
    match cmd {
        Command::FieldInfo { field, m } => {
            let t = tower(field, *m)?;
            let mut out = header(Some(&t));
            out.insert("field".into(), serde_json::to_value(t.params()).expect("serializable"));
            put_elem(&mut out, &t, Level::Mid, "generator_q", t.base().generator());
            put_elem(&mut out, &t, Level::Top, "generator_top", t.top().generator());
            Ok(Value::Object(out))
        }
        Command::Lpoly { field, lambda, b, c } => {
            let t = tower(field, 1)?;
            let l = parse_lambda(&t, lambda)?;
            let lp = l_poly_mod_p(&t, l, *b, *c)?;
            let mut out = header(Some(&t));
            put_elem(&mut out, &t, Level::Mid, "lambda", l.0);
            out.insert("b".into(), json!(b));
            out.insert("c".into(), json!(c));
            out.insert("p_rank".into(), json!(p_rank_of_char(&t, *b, *c)?));
            put_elems(&mut out, &t, Level::Mid, "poly", &lp.coeffs);
            Ok(Value::Object(out))
        }
        Command::Svals { field, lambda, b, c, n } => {
            let t = tower(field, 1)?;
            let l = parse_lambda(&t, lambda)?;
            let s = s_n(&t, l, *b, *c, *n)?;
            let mut out = header(Some(&t));
            put_elem(&mut out, &t, Level::Mid, "lambda", l.0);
            out.insert("b".into(), json!(b));
            out.insert("c".into(), json!(c));
            out.insert("n".into(), json!(n));
            out.insert("sum".into(), serde_json::to_value(SumJson::from(&s)).expect("serializable"));
            put_elem(&mut out, &t, Level::Mid, "reduced", s.reduce_mod_p(&t)?);
            Ok(Value::Object(out))
        }
        Command::Distinguished { field } => {
            let t = tower(field, 1)?;
            let l = Lambda::new(&t, Elem(2)).or_else(|_| Lambda::new(&t, Elem(t.p())))?;
            let found = distinguished_char_search(&t, l)?;
            let params = CondParams::new(field.p as u64, field.r)?;
            let mut out = header(Some(&t));
            out.insert("distinguished".into(), json!(found.iter().map(|&(b, c)| [b, c]).collect::<Vec<_>>()));
            out.insert("classification".into(), serde_json::to_value(classify_report(&params)).expect("serializable"));
            Ok(Value::Object(out))
        }
        Command::RecoverLambda { field, v, v2 } => {
            let t = tower(field, 1)?;
            let v1 = parse_elem(&t, v)?;
            let mut out = header(Some(&t));
            put_elem(&mut out, &t, Level::Mid, "v", v1);
            let cands: Vec<Elem> = recover_lambda(&t, v1)?.into_iter().map(|l| l.0).collect();
            put_elems(&mut out, &t, Level::Mid, "candidates", &cands);
            if let Some(v2) = v2 {
                let v2 = parse_elem(&t, v2)?;
                put_elem(&mut out, &t, Level::Mid, "v2", v2);
                put_elem(&mut out, &t, Level::Mid, "lambda", recover_from_second_char(&t, v1, v2)?.0);
            }
            Ok(Value::Object(out))
        }
        Command::SameConfig { field, pts } => {
            if pts.len() != 2 {
                bail!(Parameter, "same-config needs --pts twice");
            }
            let t = tower(field, 1)?;
            let a = parse_points(&t, &pts[0])?;
            let b = parse_points(&t, &pts[1])?;
            let mut out = header(Some(&t));
            out.insert("same".into(), json!(same_configuration(&t, &a, &b)?));
            for (name, cfg) in [("a", &a), ("b", &b)] {
                out.insert(format!("points_{name}"), json!(cfg.iter().map(|&p| point_json(p)).collect::<Vec<_>>()));
                put_elem(&mut out, &t, Level::Mid, &format!("lambda_{name}"), normalize_four_points(&t, cfg)?.1 .0);
            }
            Ok(Value::Object(out))
        }
        Command::PsiExperiment { field, lambda, lambda2 } => {
            let t = tower(field, 1)?;
            let l1 = parse_lambda(&t, lambda)?;
            let l2 = parse_lambda(&t, lambda2)?;
            let rep = psi_matching_experiment(&t, l1, l2)?;
            let g = oracle::SemilinearGroup::new(&t);
            let mut out = header(Some(&t));
            put_elem(&mut out, &t, Level::Mid, "lambda", l1.0);
            put_elem(&mut out, &t, Level::Mid, "lambda2", l2.0);
            out.insert("isomorphisms_checked".into(), json!(rep.isomorphisms_checked));
            out.insert("matching".into(), json!(rep.matching));
            out.insert("any_match".into(), json!(rep.any_match()));
            out.insert("configurations_equivalent".into(), json!(oracle::triple_equivalent(&g, l1, l2)));
            Ok(Value::Object(out))
        }
        Command::VerifyConditions { q, qmax } => {
            let qs = match (q, qmax) {
                (Some(q), _) => vec![*q],
                (None, Some(m)) => odd_prime_powers(*m),
                (None, None) => bail!(Parameter, "give --q or --qmax"),
            };
            let mut reports = Vec::new();
            let mut all = true;
            for q in qs {
                let params = CondParams::from_q(q)?;
                let sym = check_condn_symmetry(&params);
                let wit = check_witnesses(&params);
                let eqp = check_equalpowers(&params);
                let cls = classify_report(&params);
                all &= sym.passed() && wit.passed() && (eqp.exceptional || eqp.counterexamples.is_empty());
                all &= cls.counterexamples.is_empty();
                reports.push(json!({
                    "q": q,
                    "symmetry": sym,
                    "witnesses": wit,
                    "equalpowers": eqp,
                    "classification": cls,
                }));
            }
            let mut out = header(None);
            out.insert("all_passed".into(), json!(all));
            out.insert("reports".into(), Value::Array(reports));
            Ok(Value::Object(out))
        }
        Command::Expsum { field, m, curve, f } => {
            let t = tower(field, *m)?;
            let c = PlaneCurve::new(read_curve(&t, curve)?)?;
            let func = PlaneFunction::Poly(read_curve(&t, f)?);
            let cap = scan_cap()?;
            let pts = curve_points(&t, &c, cap)?;
            let oracle = CurveOracle::new(&t, c, cap);
            let basis = standard_basis(&t);
            let sums: Vec<PSum> = basis.iter().map(|&g| s_m_f(&t, &pts, &func.clone().scaled(g))).collect();
            let mut out = header(Some(&t));
            out.insert("m".into(), json!(m));
            out.insert("points".into(), json!(pts.len()));
            out.insert("s_m".into(), json!(sums.iter().map(|s| &s.counts).collect::<Vec<_>>()));
            put_elem(&mut out, &t, Level::Mid, "t_m", t_m_f(&t, &pts, &func));
            put_elem(&mut out, &t, Level::Mid, "t_m_from_sums", t_m_via_sums(&oracle, &func, *m)?);
            Ok(Value::Object(out))
        }
        Command::Powersums { field, input } => {
            let t = tower(field, 1)?;
            let f = t.base();
            let v = read_input(input)?;
            let elems = |key: &str| -> Result<Vec<Elem>> {
                v.get(key)
                    .and_then(|x| x.as_array())
                    .ok_or_else(|| Error::Parameter(format!("missing array '{key}'")))?
                    .iter()
                    .map(|x| decode_value(&t, Level::Mid, x))
                    .collect()
            };
            let mut out = header(Some(&t));
            if v.get("values").is_some() {
                let n = v.get("n").and_then(|x| x.as_u64()).ok_or_else(|| Error::Parameter("missing 'n'".into()))?;
                let spec = reconstruct(&elems("values")?, n as u32, f)?;
                put_elems(&mut out, &t, Level::Mid, "roots", &spec.roots);
                out.insert("mults".into(), json!(spec.mults));
                put_elems(&mut out, &t, Level::Mid, "elementary", &spec.elementary(f));
            } else {
                let roots = elems("roots")?;
                let mults: Vec<u32> = v
                    .get("mults")
                    .and_then(|x| serde_json::from_value(x.clone()).ok())
                    .ok_or_else(|| Error::Parameter("missing 'mults'".into()))?;
                let spec = MultisetSpec::new(roots, mults, f.p())?;
                let count = v.get("count").and_then(|x| x.as_u64()).unwrap_or(f.order() as u64 - 1);
                out.insert("n".into(), json!(spec.size()));
                put_elems(&mut out, &t, Level::Mid, "values", &power_sums_of(&spec, count as usize, f));
            }
            Ok(Value::Object(out))
        }
        Command::RecoverCurve { field, curve, mode, m_cap, sample, g_degree, seed } => {
            let t = tower(field, 1)?;
            let c = PlaneCurve::new(read_curve(&t, curve)?)?;
            let inst = RecoveryInstance::new(&t, c)?;
            let cfg = RecoveryConfig {
                mode: match mode {
                    ModeArg::Direct => OracleMode::Direct,
                    ModeArg::Protocol => OracleMode::Protocol,
                },
                m_cap: *m_cap,
                sample: *sample,
                g_degree: *g_degree,
                seed: *seed,
                point_cap: scan_cap()?,
            };
            let ctx = RecoveryContext::new(&t);
            let rep = recover_curve(&ctx, &inst, &cfg)?;
            let mut out = header(Some(&t));
            out.insert("mode".into(), json!(cfg.mode));
            out.insert("curve".into(), poly_json(&t, &rep.curve.f));
            out.insert("display".into(), json!(display_poly(&rep.curve.f)));
            out.insert("matches_input".into(), json!(rep.curve == inst.curve));
            let mut cert = Map::new();
            cert.insert("m".into(), json!(rep.cert.m));
            cert.insert("h".into(), json!(rep.cert.h.to_u32()));
            cert.insert("solutions".into(), json!(rep.cert.solutions));
            cert.insert("rejected_places".into(), json!(rep.cert.rejected));
            cert.insert("roots".into(), json!(rep.cert.roots.iter().map(|r| r.0).collect::<Vec<_>>()));
            out.insert("certificate".into(), Value::Object(cert));
            out.insert("moments_computed".into(), json!(rep.moments_computed));
            out.insert("frobenius_equivariant".into(), json!(rep.frobenius_equivariant));
            Ok(Value::Object(out))
        }
        Command::Legendre { field, lambda } => {
            let t = tower(field, 1)?;
            let l = parse_lambda(&t, lambda)?;
            let oracle = CurveOracle::new(&t, PlaneCurve::legendre(&t, l.0), scan_cap()?);
            let pts = oracle.points(1)?.1;
            let query = legendre_query(&t);
            let sums: Vec<Vec<u64>> =
                standard_basis(&t).iter().map(|&g| s_m_f(&t, &pts, &query.clone().scaled(g)).counts).collect();
            let recovered = legendre_recover(&oracle)?;
            let mut out = header(Some(&t));
            put_elem(&mut out, &t, Level::Mid, "lambda", l.0);
            put_elem(&mut out, &t, Level::Mid, "t1", t_m_f(&t, &pts, &query));
            out.insert("sums".into(), json!(sums));
            put_elem(&mut out, &t, Level::Mid, "recovered", recovered);
            out.insert("ok".into(), json!(recovered == l.0));
            Ok(Value::Object(out))
        }
        Command::LegendreRecover { field, sums } => {
            let t = tower(field, 1)?;
            let v = read_input(sums)?;
            let counts: Vec<Vec<u64>> = v
                .get("sums")
                .and_then(|x| serde_json::from_value(x.clone()).ok())
                .ok_or_else(|| Error::Parameter("expected {\"sums\": [[counts], ...]}".into()))?;
            if counts.len() != t.r() as usize || counts.iter().any(|c| c.len() != t.p() as usize) {
                bail!(Parameter, "need {} count vectors of length {}", t.r(), t.p());
            }
            let ps: Vec<PSum> = counts.into_iter().map(|counts| PSum { counts }).collect();
            let mut out = header(Some(&t));
            put_elem(&mut out, &t, Level::Mid, "lambda", legendre_recover_from_sums(&t, &ps)?);
            Ok(Value::Object(out))
        }
        Command::Acceptance { suite, qmax, seed, threads, timings } => {
            let mut cfg = AcceptanceConfig { qmax: *qmax, seed: *seed, ..AcceptanceConfig::default() };
            if let Some(n) = threads {
                cfg.threads = *n;
            }
            let reports = acceptance::run_suite(suite, &cfg)?;
            let mut out = header(None);
            out.insert("suite".into(), json!(suite));
            out.insert("all_passed".into(), json!(reports.iter().all(|r| r.passed)));
            out.insert("failures_as_expected".into(), json!(acceptance::failures_as_expected(&reports)));
            let mut rs = serde_json::to_value(&reports).expect("serializable");
            if !timings {
                for r in rs.as_array_mut().unwrap() {
                    r.as_object_mut().unwrap().remove("wall_ms");
                }
            }
            out.insert("criteria".into(), rs);
            Ok(Value::Object(out))
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object()) => Some(Value::Array(a.clone()).to_string()),
        _ => None,
    }
}

/// Plain-text rendering of a JSON report: `key  value` lines, nested
/// objects with dotted keys, arrays of objects as indented blocks.
pub fn render_table(v: &Value) -> String {
    let mut out = String::new();
    fn walk(prefix: &str, v: &Value, indent: usize, out: &mut String) {
        let pad = " ".repeat(indent);
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    match scalar(x) {
                        Some(s) => out.push_str(&format!("{pad}{key:<28} {s}\n")),
                        None => walk(&key, x, indent, out),
                    }
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    out.push_str(&format!("{pad}{prefix}[{i}]\n"));
                    walk("", x, indent + 2, out);
                }
            }
            other => out.push_str(&format!("{pad}{prefix:<28} {}\n", scalar(other).unwrap_or_default())),
        }
    }
    walk("", v, 0, &mut out);
    out
}

/// Parses `args`, runs the command and prints the report. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.cmd) {
        Ok(v) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&v).expect("serializable")),
                Format::Table => print!("{}", render_table(&v)),
            }
            0
        }
        Err(e) => {
            let report = json!({ "schema": 1, "error": e.to_string(), "exit_code": e.exit_code() });
            eprintln!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            e.exit_code()
        }
    }
}
