//! The acceptance suite: ten criteria, each a list of sub-checks with
//! counts and the first counterexample.

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::artin_schreier::{t_m_f, t_m_via_sums, CurveOracle, PlaneCurve, PlaneFunction, DEFAULT_POINT_SCAN_CAP};
use crate::conditions::{
    check_condn_symmetry, check_equalpowers, check_witnesses, classify_chars, odd_prime_powers, prime_power, CondParams,
};
use crate::cover::{
    all_lambdas, distinguished_char_search, l_poly_mod_p, lprime_at_zero_mod_p, psi_matching_experiment,
    recover_from_second_char, recover_lambda, same_configuration, Lambda,
};
use crate::curve_recovery::{
    legendre_query, legendre_recover, recover_curve, OracleMode, RecoveryConfig, RecoveryContext, RecoveryInstance,
};
use crate::error::{Error, Result};
use crate::field::{build_field, Elem, FieldTower};
use crate::oracle;
use crate::place_sums::LContext;
use crate::poly::BivariatePoly;
use crate::power_sums::{power_sums_of, reconstruct, MultisetSpec};

pub const SUITES: [&str; 8] = ["ruck", "classify", "recover-lambda", "psi", "prop41", "legendre", "powersums", "pipeline"];

/// Sub-checks that fail by design, as `(criterion, sub-check name)`. The
/// paper lists `χ_{1,3}`, `χ_{3,1}` as possible distinguished characters at
/// `q = 9`, but they fail the genus and ramification conditions.
pub const EXPECTED_FAILURES: [(u32, &str); 1] = [(3, "distinguished q=9")];

#[derive(Clone, Debug)]
pub struct AcceptanceConfig {
    /// Drop field sizes above this bound from every list.
    pub qmax: Option<u64>,
    pub seed: u64,
    pub threads: usize,
    /// Random curves over `F_5` for the pipeline.
    pub f5_samples: usize,
    pub protocol_instances: usize,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            qmax: None,
            seed: 1,
            threads: std::thread::available_parallelism().map_or(4, |n| n.get()),
            f5_samples: 100,
            protocol_instances: 10,
        }
    }
}

impl AcceptanceConfig {
    fn qs(&self, list: &[u64]) -> Vec<u64> {
        list.iter().copied().filter(|&q| self.qmax.is_none_or(|m| q <= m)).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubCheck {
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub failed: u64,
    pub first_counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<SubCheck>,
    pub wall_ms: u64,
}

impl CriterionReport {
    pub fn checked(&self) -> u64 {
        self.checks.iter().map(|c| c.checked).sum()
    }

    pub fn failed(&self) -> u64 {
        self.checks.iter().map(|c| c.failed).sum()
    }

    pub fn first_counterexample(&self) -> Option<String> {
        self.checks
            .iter()
            .find_map(|c| c.first_counterexample.as_ref().map(|x| format!("{}: {x}", c.name)))
    }
}

struct Tally {
    name: String,
    checked: u64,
    failed: u64,
    first: Option<String>,
    note: Option<String>,
}

impl Tally {
    fn new(name: impl Into<String>) -> Tally {
        Tally { name: name.into(), checked: 0, failed: 0, first: None, note: None }
    }

    fn check(&mut self, ok: bool, ctx: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first.is_none() {
                self.first = Some(ctx());
            }
        }
    }

    /// Counts an `Ok(true)` as a pass; errors are failures.
    fn check_res(&mut self, r: Result<bool>, ctx: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.check(ok, ctx),
            Err(e) => self.check(false, || format!("{}: error {e}", ctx())),
        }
    }

    /// Adds a report of `checked` cases with the given failures.
    fn absorb(&mut self, q: u64, checked: u64, counterexamples: &[String]) {
        self.checked += checked;
        self.failed += counterexamples.len() as u64;
        if self.first.is_none() {
            self.first = counterexamples.first().map(|c| format!("q={q}: {c}"));
        }
    }

    fn merge(&mut self, o: Tally) {
        self.checked += o.checked;
        self.failed += o.failed;
        if self.first.is_none() {
            self.first = o.first;
        }
    }

    fn done(self) -> SubCheck {
        SubCheck {
            passed: self.failed == 0,
            name: self.name,
            checked: self.checked,
            failed: self.failed,
            first_counterexample: self.first,
            note: self.note,
        }
    }
}

/// Order-preserving parallel map over a slice.
pub fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let out = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|s| {
        for _ in 0..threads.max(1).min(items.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                out.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every slot filled")).collect()
}

fn tower_for(q: u64) -> Result<FieldTower> {
    let (p, r) = prime_power(q).ok_or_else(|| Error::Parameter(format!("{q} is not a prime power")))?;
    build_field(p as u32, r, 1)
}

fn trim(mut v: Vec<Elem>) -> Vec<Elem> {
    while v.len() > 1 && v.last() == Some(&Elem::ZERO) {
        v.pop();
    }
    v
}

fn timed(id: u32, title: &str, f: impl FnOnce() -> Vec<SubCheck>) -> CriterionReport {
    let t0 = Instant::now();
    let checks = f();
    CriterionReport {
        id,
        title: title.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        wall_ms: t0.elapsed().as_millis() as u64,
    }
}

fn error_check(name: &str, e: Error) -> SubCheck {
    SubCheck {
        name: name.to_string(),
        passed: false,
        checked: 1,
        failed: 1,
        first_counterexample: Some(format!("error: {e}")),
        note: None,
    }
}

pub fn criterion_ids(suite: &str) -> Result<Vec<u32>> {
    Ok(match suite {
        "ruck" => vec![1, 2],
        "classify" => vec![3, 4],
        "recover-lambda" => vec![5],
        "psi" => vec![6],
        "prop41" => vec![7],
        "legendre" => vec![8],
        "powersums" => vec![9],
        "pipeline" => vec![10],
        "all" => (1..=10).collect(),
        _ => return Err(Error::Parameter(format!("unknown suite '{suite}'; expected one of {SUITES:?} or all"))),
    })
}

pub fn run_suite(suite: &str, cfg: &AcceptanceConfig) -> Result<Vec<CriterionReport>> {
    Ok(criterion_ids(suite)?.into_iter().map(|id| run_criterion(id, cfg)).collect())
}

pub fn run_criterion(id: u32, cfg: &AcceptanceConfig) -> CriterionReport {
    match id {
        1 => timed(1, "Ruck congruence", || ruck(cfg)),
        2 => timed(2, "chi_{1,1} closed form", || closed_form(cfg)),
        3 => timed(3, "character classification", || classification(cfg)),
        4 => timed(4, "C(n) lemmas", || cond_lemmas(cfg)),
        5 => timed(5, "lambda recovery and configurations", || lambda_recovery(cfg)),
        6 => timed(6, "psi matching", || psi(cfg)),
        7 => timed(7, "trace sums from exponential sums", || prop41(cfg)),
        8 => timed(8, "Legendre shortcut", || legendre(cfg)),
        9 => timed(9, "power-sum reconstruction", || powersums(cfg)),
        10 => timed(10, "curve recovery pipeline", || pipeline(cfg)),
        _ => timed(id, "unknown criterion", || vec![error_check("id", Error::Parameter(format!("no criterion {id}")))]),
    }
}

/// Whether the failing sub-checks are exactly [`EXPECTED_FAILURES`], among
/// the criteria that were run.
pub fn failures_as_expected(reports: &[CriterionReport]) -> bool {
    let run: BTreeSet<u32> = reports.iter().map(|r| r.id).collect();
    let got: BTreeSet<(u32, String)> = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| !c.passed).map(move |c| (r.id, c.name.clone())))
        .collect();
    let want: BTreeSet<(u32, String)> = EXPECTED_FAILURES
        .iter()
        .filter(|(id, _)| run.contains(id))
        .map(|&(id, n)| (id, n.to_string()))
        .collect();
    got == want
}

fn per_q(qs: &[u64], threads: usize, name: &str, f: impl Fn(&FieldTower, &Lambda, &mut Tally) -> Result<()> + Sync) -> Vec<SubCheck> {
    qs.iter()
        .map(|&q| {
            let mut tally = Tally::new(format!("{name} q={q}"));
            let tower = match tower_for(q) {
                Ok(t) => t,
                Err(e) => return error_check(&tally.name, e),
            };
            let lams = all_lambdas(&tower);
            let parts = par_map(&lams, threads, |l| {
                let mut t = Tally::new("");
                if let Err(e) = f(&tower, l, &mut t) {
                    t.check(false, || format!("lambda = {}: error {e}", l.0));
                }
                t
            });
            for t in parts {
                tally.merge(t);
            }
            tally.done()
        })
        .collect()
}

fn ruck(cfg: &AcceptanceConfig) -> Vec<SubCheck> {
    per_q(&cfg.qs(&[3, 5, 7, 9, 11, 13]), cfg.threads, "ruck", |tower, &l, t| {
        let ctx = LContext::new(tower, l)?;
        let q1 = tower.q() as i64 - 1;
        for b in 0..q1 {
            for c in 0..q1 {
                if b == 0 && c == 0 {
                    continue;
                }
                let exact = trim(ctx.numerator(b, c)?.reduce(tower)?);
                let modp = trim(l_poly_mod_p(tower, l, b, c)?.coeffs);
                t.check(exact == modp, || format!("lambda = {}, (b,c) = ({b},{c}): {exact:?} vs {modp:?}", l.0));
            }
        }
        Ok(())
    })
}

fn closed_form(cfg: &AcceptanceConfig) -> Vec<SubCheck> {
    per_q(&cfg.qs(&[3, 5, 7, 9, 11, 13]), cfg.threads, "closed form", |tower, &l, t| {
        let f = tower.base();
        let got = trim(LContext::new(tower, l)?.numerator(1, 1)?.reduce(tower)?);
        let want = if tower.q() == 3 {
            vec![Elem::ONE]
        } else {
            let lm1 = f.sub_elem(l.0, Elem::ONE);
            let v = f.mul(f.mul(f.from_int(2), l.0), f.inv(f.mul(lm1, lm1)).unwrap());
            vec![Elem::ONE, v]
        };
        t.check(got == want, || format!("lambda = {}: {got:?} vs {want:?}", l.0));
        Ok(())
    })
}

fn classification(cfg: &AcceptanceConfig) -> Vec<SubCheck> {
    let mut out = Vec::new();
    for q in cfg.qs(&[5, 7, 9, 11, 13, 25, 27, 49, 81]) {
        let (p, r) = prime_power(q).unwrap();
        let mut want: BTreeSet<(u64, u64)> = (0..r).map(|i| (p.pow(i), p.pow(i))).collect();
        if q == 9 {
            want.insert((1, 3));
            want.insert((3, 1));
        }
        let mut t = Tally::new(format!("classify q={q}"));
        let params = CondParams::new(p, r).unwrap();
        let got = classify_chars(&params);
        t.check(got == want, || format!("{got:?} vs {want:?}"));
        out.push(t.done());
        let mut t = Tally::new(format!("distinguished q={q}"));
        match tower_for(q).and_then(|tw| distinguished_char_search(&tw, all_lambdas(&tw)[0])) {
            Ok(got) => t.check(got == want, || format!("{got:?} vs {want:?}")),
            Err(e) => t.check(false, || e.to_string()),
        }
        if q == 9 {
            t.note = Some(
                "(1,3) and (3,1) have ramification (4,1,1) and quotient genus 2, so the genus and ramification \
                 conditions exclude them; only the n-condition alone admits them"
                    .into(),
            );
        }
        out.push(t.done());
    }
    out
}

fn cond_lemmas(cfg: &AcceptanceConfig) -> Vec<SubCheck> {
    let qs = cfg.qs(&odd_prime_powers(81));
    let mut sym = Tally::new("C(n) symmetry and C(n)=C(n,n)");
    let mut wit = Tally::new("witnesses");
    let mut eqp = Tally::new("(p+1)/2 construction");
    for &q in &qs {
        let params = CondParams::from_q(q).unwrap();
        let r = check_condn_symmetry(&params);
        sym.absorb(q, r.checked, &r.counterexamples);
        let r = check_witnesses(&params);
        wit.absorb(q, r.checked, &r.counterexamples);
        let r = check_equalpowers(&params);
        if r.exceptional {
            eqp.note = Some(format!(
                "q=9 is outside the lemma's hypothesis; {} of {} pairs fail there",
                r.counterexamples.len(),
                r.pairs.len()
            ));
            continue;
        }
        eqp.absorb(q, r.pairs.len() as u64, &r.counterexamples);
    }
    vec![sym.done(), wit.done(), eqp.done()]
}

fn lambda_recovery(cfg: &AcceptanceConfig) -> Vec<SubCheck> {
    let mut out = per_q(&cfg.qs(&[5, 7, 13, 25]), cfg.threads, "recover", |tower, &l, t| {
        let f = tower.base();
        let v = lprime_at_zero_mod_p(tower, l, 1, 1)?;
        let got: BTreeSet<Elem> = recover_lambda(tower, v)?.into_iter().map(|x| x.0).collect();
        let want: BTreeSet<Elem> = (0..tower.r())
            .flat_map(|i| {
                let li = f.frobenius(l.0, i);
                [li, f.inv(li).unwrap()]
            })
            .collect();
        t.check(got == want, || format!("lambda = {}: {got:?} vs {want:?}", l.0));
        if tower.p() >= 5 {
            let v2 = l_poly_mod_p(tower, l, 1, 2)?.linear();
            let back = recover_from_second_char(tower, v, v2)?;
            t.check(back == l, || format!("lambda = {}: two-character recovery gave {}", l.0, back.0));
        }
        Ok(())
    });
    for q in cfg.qs(&[5, 7]) {
        let mut t = Tally::new(format!("same_configuration q={q}"));
        let tower = tower_for(q).unwrap();
        let classes = oracle::configuration_classes(&tower);
        let cfgs = oracle::all_configurations(&tower);
        let parts = par_map(&cfgs, cfg.threads, |a| {
            let mut t = Tally::new("");
            for b in &cfgs {
                t.check_res(same_configuration(&tower, a, b).map(|s| s == (classes[a] == classes[b])), || {
                    format!("{a:?} vs {b:?}")
                });
            }
            t
        });
        for p in parts {
            t.merge(p);
        }
        out.push(t.done());
    }
    out
}

fn psi(cfg: &AcceptanceConfig) -> Vec<SubCheck> {
    cfg.qs(&[5, 7])
        .into_iter()
        .map(|q| {
            let mut t = Tally::new(format!("psi q={q}"));
            let tower = tower_for(q).unwrap();
            let g = oracle::SemilinearGroup::new(&tower);
            let lams = all_lambdas(&tower);
            let pairs: Vec<(Lambda, Lambda)> = lams.iter().flat_map(|&a| lams.iter().map(move |&b| (a, b))).collect();
            let parts = par_map(&pairs, cfg.threads, |&(a, b)| {
                let mut t = Tally::new("");
                let expect = oracle::triple_equivalent(&g, a, b);
                t.check_res(psi_matching_experiment(&tower, a, b).map(|r| r.any_match() == expect), || {
                    format!("(lambda, lambda') = ({}, {}), oracle equivalent = {expect}", a.0, b.0)
                });
                t
            });
            for p in parts {
                t.merge(p);
            }
            t.done()
        })
        .collect()
}

fn random_bivariate(rng: &mut ChaCha8Rng, order: u32, deg: u32) -> BivariatePoly {
    let mut p = BivariatePoly::new();
    for i in 0..=deg {
        for j in 0..=deg - i {
            let c = Elem(rng.gen_range(0..order));
            if !c.is_zero() {
                p.add_term_raw(i, j, c);
            }
        }
    }
    p
}

fn prop41(cfg: &AcceptanceConfig) -> Vec<SubCheck> {
    cfg.qs(&[3, 5, 9])
        .into_iter()
        .map(|q| {
            let mut t = Tally::new(format!("prop41 q={q}"));
            let tower = tower_for(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ q);
            let mut curves = vec![PlaneCurve::legendre(&tower, all_lambdas(&tower)[0].0)];
            while curves.len() < 21 {
                let f = random_bivariate(&mut rng, q as u32, 3);
                if f.deg_y().unwrap_or(0) > 0 {
                    curves.push(PlaneCurve::new(f).unwrap());
                }
            }
            let jobs: Vec<(usize, u64)> = (0..curves.len()).map(|i| (i, rng.gen())).collect();
            let parts = par_map(&jobs, cfg.threads, |&(i, seed)| {
                let mut t = Tally::new("");
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let oracle = CurveOracle::new(&tower, curves[i].clone(), DEFAULT_POINT_SCAN_CAP);
                for m in 1..=3 {
                    let (tm, pts) = match oracle.points(m) {
                        Ok(x) => x,
                        Err(e) => {
                            t.check(false, || format!("curve {i}, m = {m}: {e}"));
                            continue;
                        }
                    };
                    for _ in 0..50 {
                        let f = PlaneFunction::Poly(random_bivariate(&mut rng, q as u32, 3));
                        let direct = t_m_f(&tm, &pts, &f);
                        t.check_res(t_m_via_sums(&oracle, &f, m).map(|v| v == direct), || {
                            format!("curve {i}, m = {m}, f = {f:?}")
                        });
                    }
                }
                t
            });
            for p in parts {
                t.merge(p);
            }
            t.done()
        })
        .collect()
}

fn legendre(cfg: &AcceptanceConfig) -> Vec<SubCheck> {
    per_q(&cfg.qs(&[3, 5, 7, 9, 25]), cfg.threads, "legendre", |tower, &l, t| {
        let oracle = CurveOracle::new(tower, PlaneCurve::legendre(tower, l.0), DEFAULT_POINT_SCAN_CAP);
        let pts = oracle.points(1)?.1;
        let t1 = t_m_f(tower, &pts, &legendre_query(tower));
        let want = tower.base().add(Elem::ONE, l.0);
        t.check(t1 == want, || format!("lambda = {}: T_1 = {}", l.0, t1.0));
        let back = legendre_recover(&oracle)?;
        t.check(back == l.0, || format!("lambda = {}: recovered {}", l.0, back.0));
        Ok(())
    })
}

fn powersums(cfg: &AcceptanceConfig) -> Vec<SubCheck> {
    let mut out = Vec::new();
    for q in cfg.qs(&[3, 5, 7, 9]) {
        let tower = tower_for(q).unwrap();
        let f = tower.base();
        let p = f.p();
        let specs = oracle::all_multisets(f, 4);
        let mut t = Tally::new(format!("round trip q={q}"));
        let mut seen: HashMap<(u32, Vec<Elem>), &MultisetSpec> = HashMap::new();
        for spec in &specs {
            let n = spec.size();
            let len = (2 * n as usize).max(q as usize - 1);
            let ps = oracle::power_sums_naive(spec, len, f);
            t.check(power_sums_of(spec, len, f) == ps, || format!("power sums of {spec:?}"));
            t.check_res(reconstruct(&ps, n, f).map(|s| &s == spec), || format!("{spec:?}"));
            if let Some(prev) = seen.insert((n, ps), spec) {
                t.check(false, || format!("{prev:?} and {spec:?} share power sums"));
            }
        }
        out.push(t.done());
        let mut t = Tally::new(format!("collision control q={q}"));
        let elems: Vec<Elem> = f.elements().collect();
        for &a in &elems {
            for &b in &elems {
                if a >= b {
                    continue;
                }
                for k in 1..p {
                    let x = MultisetSpec { roots: vec![a, b], mults: vec![k + p, 1] };
                    let y = MultisetSpec { roots: vec![a, b], mults: vec![k, 1 + p] };
                    let len = 2 * (k + p + 1) as usize;
                    let (px, py) = (power_sums_of(&x, len, f), power_sums_of(&y, len, f));
                    t.check(px == py, || format!("{x:?} vs {y:?} differ"));
                    t.check(reconstruct(&px, k + p + 1, f).is_err(), || {
                        format!("{x:?}: out-of-range data reconstructed")
                    });
                }
            }
        }
        out.push(t.done());
    }
    out
}

fn pipeline_check(ctx: &RecoveryContext, f: &BivariatePoly, cfg: &RecoveryConfig, t: &mut Tally) {
    let curve = PlaneCurve::new(f.clone()).unwrap();
    match RecoveryInstance::new(ctx.base(), curve.clone()) {
        Err(e) => t.check(false, || format!("{f:?} rejected: {e}")),
        Ok(inst) => match recover_curve(ctx, &inst, cfg) {
            Ok(rep) => t.check(rep.curve == curve && rep.frobenius_equivariant, || {
                format!("{f:?} recovered as {:?}", rep.curve.f)
            }),
            Err(e) => t.check(false, || format!("{f:?}: {e}")),
        },
    }
}

fn pipeline(cfg: &AcceptanceConfig) -> Vec<SubCheck> {
    let mut out = Vec::new();
    let direct = RecoveryConfig::default();
    let protocol = RecoveryConfig { mode: OracleMode::Protocol, sample: 3, seed: cfg.seed, ..RecoveryConfig::default() };
    let mut protocol_jobs: Vec<(u64, BivariatePoly)> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for q in cfg.qs(&[3, 5]) {
        let tower = tower_for(q).unwrap();
        let f = tower.base();
        let red = match oracle::absolutely_reducible_cubics(&tower) {
            Ok(r) => r,
            Err(e) => {
                out.push(error_check(&format!("pipeline q={q}"), e));
                continue;
            }
        };
        let ok_input = |g: &BivariatePoly| !red.contains(g) && !g.derivative_y(f).is_zero();
        let list: Vec<BivariatePoly> = if q == 3 {
            oracle::monic_curves(&tower, 3)
        } else {
            let mut v = Vec::new();
            while v.len() < cfg.f5_samples {
                let n_y = rng.gen_range(1..=3u32);
                let mut g = random_bivariate(&mut rng, q as u32, 3);
                let keep: Vec<_> = g.terms().filter(|&((i, j), _)| j < n_y && i + j <= 3).collect();
                g = BivariatePoly::new();
                g.add_term_raw(0, n_y, Elem::ONE);
                for ((i, j), c) in keep {
                    g.add_term_raw(i, j, c);
                }
                if ok_input(&g) {
                    v.push(g);
                }
            }
            v
        };
        // the library's validation must agree with the product-construction oracle
        let mut agree = Tally::new(format!("irreducibility oracle q={q}"));
        let verdicts = par_map(&list, cfg.threads, |g| {
            let curve = PlaneCurve::new(g.clone()).unwrap();
            (ok_input(g), RecoveryInstance::new(&tower, curve).is_ok())
        });
        for (g, (want, got)) in list.iter().zip(&verdicts) {
            agree.check(want == got, || format!("{g:?}: oracle {want}, library {got}"));
        }
        out.push(agree.done());
        let inputs: Vec<BivariatePoly> = list.into_iter().filter(|g| ok_input(g)).collect();
        let ctx = RecoveryContext::new(&tower);
        let mut t = Tally::new(format!("direct q={q}"));
        t.note = Some(format!("{} curves", inputs.len()));
        let parts = par_map(&inputs, cfg.threads, |g| {
            let mut t = Tally::new("");
            pipeline_check(&ctx, g, &direct, &mut t);
            t
        });
        for p in parts {
            t.merge(p);
        }
        out.push(t.done());
        let want = if q == 3 { cfg.protocol_instances - cfg.protocol_instances / 2 } else { cfg.protocol_instances / 2 };
        let small: Vec<&BivariatePoly> =
            inputs.iter().filter(|g| q == 3 || g.total_degree().unwrap_or(0) <= 2).collect();
        for _ in 0..want.min(small.len()) {
            let g = small[rng.gen_range(0..small.len())];
            protocol_jobs.push((q, g.clone()));
        }
    }
    let mut t = Tally::new("protocol agrees with direct");
    let parts = par_map(&protocol_jobs, cfg.threads, |(q, g)| {
        let mut t = Tally::new("");
        let tower = tower_for(*q).unwrap();
        let ctx = RecoveryContext::new(&tower);
        pipeline_check(&ctx, g, &protocol, &mut t);
        t
    });
    for p in parts {
        t.merge(p);
    }
    t.note = Some(format!("{} instances", protocol_jobs.len()));
    out.push(t.done());
    out
}

/// One line per criterion, with failing sub-checks indented below.
pub fn render_table(reports: &[CriterionReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&format!(
            "criterion {:>2} {:<38} {}  checked {:>8}  failed {:>4}  {:>7} ms\n",
            r.id,
            r.title,
            if r.passed { "PASS" } else { "FAIL" },
            r.checked(),
            r.failed(),
            r.wall_ms
        ));
        for c in &r.checks {
            if !c.passed {
                s.push_str(&format!("    {} FAIL: {}\n", c.name, c.first_counterexample.as_deref().unwrap_or("")));
            }
            if let Some(n) = &c.note {
                if !c.passed {
                    s.push_str(&format!("      note: {n}\n"));
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_keeps_order() {
        let v: Vec<u64> = (0..100).collect();
        assert_eq!(par_map(&v, 4, |x| x * x), v.iter().map(|x| x * x).collect::<Vec<_>>());
        assert!(par_map(&Vec::<u64>::new(), 4, |x| *x).is_empty());
    }

    #[test]
    fn small_suites_pass() {
        let cfg = AcceptanceConfig { qmax: Some(5), f5_samples: 5, protocol_instances: 2, ..Default::default() };
        for id in [1, 2, 8, 9] {
            let r = run_criterion(id, &cfg);
            assert!(r.passed, "{}", render_table(&[r]));
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(criterion_ids("nope").is_err());
        assert_eq!(criterion_ids("ruck").unwrap(), vec![1, 2]);
    }
}
