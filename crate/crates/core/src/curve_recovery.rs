//! Recovering a monic-in-`y` plane curve `F(x, y) = 0` over `F_q` from trace
//! sums: find a degree-`m` place `h` over which `F` splits into distinct
//! roots, collect the moments `m Σ a^i b^j`, undo the Vandermonde system in
//! the conjugate roots of `h`, rebuild each `F(a, y)` from its power sums and
//! lift the coefficients back to `F_q[x]`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::artin_schreier::{
    standard_basis, t_m_via_sums, varpi_coefficient, recover_tm_from_l_data, CurveOracle, ExpSumSource,
    PSum, PlaneCurve, PlaneFunction, DEFAULT_POINT_SCAN_CAP,
};
use crate::error::{bail, Error, Result};
use crate::field::{Elem, FieldTower, Gf};
use crate::poly::{solve_linear, BivariatePoly, Poly};
use crate::power_sums::reconstruct;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    Direct,
    Protocol,
}

#[derive(Clone, Debug)]
pub struct RecoveryConfig {
    pub mode: OracleMode,
    pub m_cap: u32,
    /// Number of random `g` per moment in protocol mode.
    pub sample: u32,
    /// Total degree bound `D` for the random `g`.
    pub g_degree: u32,
    pub seed: u64,
    pub point_cap: u64,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            mode: OracleMode::Direct,
            m_cap: 8,
            sample: 5,
            g_degree: 2,
            seed: 0,
            point_cap: DEFAULT_POINT_SCAN_CAP,
        }
    }
}

/// A curve to recover, with the field it is defined over.
#[derive(Clone, Debug)]
pub struct RecoveryInstance {
    pub tower: FieldTower,
    pub curve: PlaneCurve,
}

impl RecoveryInstance {
    /// Checks the preconditions: monic in `y`, `∂F/∂y ≠ 0`, and for
    /// `deg_y F ≤ 3` absolute irreducibility.
    pub fn new(tower: &FieldTower, curve: PlaneCurve) -> Result<RecoveryInstance> {
        let f = tower.base();
        if curve.f.terms().any(|(_, c)| !f.contains(c)) {
            bail!(Parameter, "coefficients must lie in F_{}", f.order());
        }
        if !curve.f.is_monic_in_y() {
            bail!(Unsupported, "only curves monic in y are supported");
        }
        if curve.f.deg_y().unwrap_or(0) == 0 {
            bail!(Parameter, "F must involve y");
        }
        if curve.f.derivative_y(f).is_zero() {
            bail!(Domain, "dF/dy vanishes identically; F(a, y) never has distinct roots");
        }
        if let Some((k, u)) = linear_y_factor(tower, &curve.f)? {
            bail!(Domain, "F has the factor y - u(x), u = {:?}, over F_{}^{k}", u.to_u32(), f.order());
        }
        Ok(RecoveryInstance { tower: tower.clone(), curve })
    }

    pub fn d(&self) -> u32 {
        self.curve.d
    }

    pub fn n_y(&self) -> u32 {
        self.curve.f.deg_y().unwrap_or(0)
    }
}

/// A factor `y − u(x)` of `F` over some `F_{q^k}`, `k ≤ n_y`, returned as
/// `(k, u)`. For monic-in-`y` `F` with `deg_y F ≤ 3` every absolutely
/// reducible `F` has one, so `None` then means absolutely irreducible; for
/// larger `deg_y` only such factors are probed.
pub fn linear_y_factor(tower: &FieldTower, f: &BivariatePoly) -> Result<Option<(u32, Poly)>> {
    let (Some(n_y), Some(d)) = (f.deg_y(), f.total_degree()) else {
        return Ok(None);
    };
    if n_y < 2 {
        return Ok(None);
    }
    // total degree is additive, so deg u ≤ d − (n_y − 1)
    let du = (d + 1 - n_y) as usize;
    let q = tower.q() as u64;
    for k in 1..=n_y.min(3) {
        let mut e = k;
        while q.pow(e) < du as u64 + 1 {
            e += k;
        }
        let ext = Gf::extension(tower.base(), e)?;
        let ts: Vec<Elem> = ext.elements().take(du + 1).collect();
        let roots: Vec<Vec<Elem>> = ts.iter().map(|&t| f.y_poly_at(t, &ext).roots_in(&ext)).collect();
        if roots.iter().any(|r| r.is_empty()) {
            continue;
        }
        let vand: Vec<Vec<Elem>> = ts.iter().map(|&t| (0..=du).map(|i| ext.pow(t, i as u64)).collect()).collect();
        let mut choice = vec![0usize; du + 1];
        loop {
            let vals: Vec<Elem> = choice.iter().zip(&roots).map(|(&c, r)| r[c]).collect();
            if let Some(u) = solve_linear(&vand, &vals, &ext) {
                let u = Poly::new(u);
                if substitute(f, &u, &ext).is_zero() {
                    return Ok(Some((e, u)));
                }
            }
            // next combination
            let mut i = 0;
            while i <= du {
                choice[i] += 1;
                if choice[i] < roots[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i > du {
                break;
            }
        }
    }
    Ok(None)
}

/// `F(x, u(x))` as a polynomial in `x`.
fn substitute(f: &BivariatePoly, u: &Poly, ext: &Gf) -> Poly {
    let mut acc = Poly::zero();
    let mut upow: Vec<Poly> = vec![Poly::one()];
    for ((i, j), c) in f.terms() {
        while upow.len() <= j as usize {
            let next = upow.last().unwrap().mul(u, ext);
            upow.push(next);
        }
        let term = upow[j as usize].mul(&Poly::monomial(c, i as usize), ext);
        acc = acc.add(&term, ext);
    }
    acc
}

/// A place of degree `m`: a monic irreducible `h ∈ F_q[x]` with its roots
/// `a, a^q, …, a^{q^{m−1}}` in `F_{q^m}`.
#[derive(Clone, Debug)]
pub struct Place {
    pub h: Poly,
    pub roots: Vec<Elem>,
}

/// Field data for one `m`, shared between runs.
pub struct Level {
    pub tower: FieldTower,
    pub places: Vec<Place>,
}

impl Level {
    pub fn new(base: &FieldTower, m: u32) -> Result<Level> {
        let tower = base.with_top_degree(m)?;
        let top = tower.top().clone();
        let fq = tower.base().clone();
        let q = fq.order() as u64;
        let mut by_key: BTreeMap<Vec<u32>, Place> = BTreeMap::new();
        for a in top.elements() {
            let mut conj = vec![a];
            loop {
                let next = top.pow(*conj.last().unwrap(), q);
                if next == a {
                    break;
                }
                conj.push(next);
            }
            if conj.len() != m as usize || conj.iter().any(|&c| c < a) {
                continue;
            }
            let mut h = Poly::one();
            for &c in &conj {
                h = h.mul(&Poly::new(vec![top.neg(c), Elem::ONE]), &top);
            }
            let key: Vec<u32> = h.coeffs()[..m as usize].iter().map(|&c| fq.canonical_key(c)).collect();
            by_key.insert(key, Place { h, roots: conj });
        }
        Ok(Level { tower, places: by_key.into_values().collect() })
    }
}

/// Caches [`Level`]s per `m` for one base field.
pub struct RecoveryContext {
    base: FieldTower,
    levels: Mutex<HashMap<u32, Arc<Level>>>,
}

impl RecoveryContext {
    pub fn new(base: &FieldTower) -> RecoveryContext {
        RecoveryContext { base: base.with_top_degree(1).unwrap_or_else(|_| base.clone()), levels: Mutex::new(HashMap::new()) }
    }

    pub fn base(&self) -> &FieldTower {
        &self.base
    }

    pub fn level(&self, m: u32) -> Result<Arc<Level>> {
        if let Some(l) = self.levels.lock().unwrap().get(&m) {
            return Ok(Arc::clone(l));
        }
        let l = Arc::new(Level::new(&self.base, m)?);
        self.levels.lock().unwrap().insert(m, Arc::clone(&l));
        Ok(l)
    }
}

#[derive(Clone, Debug)]
pub struct HCertificate {
    pub m: u32,
    pub h: Poly,
    pub roots: Vec<Elem>,
    /// Solutions of `F = h = 0` over `F_{q^m}` (direct mode), or `m` times
    /// the number of accepted `s` (protocol mode).
    pub solutions: u64,
    /// Places of degree `m` rejected before this one, over all `m` tried.
    pub rejected: u64,
}

/// Where moments come from.
pub enum MomentSource<'a> {
    Direct { curve: &'a PlaneCurve },
    Protocol { oracle: &'a dyn ExpSumSource },
}

fn m_candidates(d: u32, p: u32, cap: u32) -> impl Iterator<Item = u32> {
    (d + 1..=cap).filter(move |m| m % p != 0)
}

/// The first `(m, h)` over which all `m·n_y` solutions of `F = h = 0` are
/// `F_{q^m}`-rational.
pub fn find_h(
    ctx: &RecoveryContext,
    src: &MomentSource,
    d: u32,
    n_y: u32,
    cfg: &RecoveryConfig,
) -> Result<(HCertificate, Arc<Level>)> {
    let p = ctx.base().p();
    let mut rejected = 0u64;
    for m in m_candidates(d, p, cfg.m_cap) {
        let level = ctx.level(m)?;
        let top = level.tower.top();
        for place in &level.places {
            let solutions = match src {
                MomentSource::Direct { curve } => {
                    let mut total = 0u64;
                    for &a in &place.roots {
                        let n = curve.f.y_poly_at(a, top).roots_in(top).len() as u64;
                        if n != n_y as u64 {
                            total = 0;
                            break;
                        }
                        total += n;
                    }
                    total
                }
                MomentSource::Protocol { oracle } => {
                    let accepted = protocol_split_count(&level, place, *oracle)?;
                    accepted * m as u64
                }
            };
            if solutions == m as u64 * n_y as u64 {
                let cert = HCertificate { m, h: place.h.clone(), roots: place.roots.clone(), solutions, rejected };
                return Ok((cert, level));
            }
            rejected += 1;
        }
    }
    Err(Error::NotFound(format!("no place h of degree m <= {} splits F completely", cfg.m_cap)))
}

fn h_power_indicator(h: &Poly, qm: u64) -> PlaneFunction {
    let mut hb = BivariatePoly::new();
    for (i, &c) in h.coeffs().iter().enumerate() {
        hb.add_term_raw(i as u32, 0, c);
    }
    PlaneFunction::one().minus(PlaneFunction::Poly(hb).pow(qm - 1))
}

/// Number of `s ∈ F_q[x]`, `deg s < m`, with `T_m(f_s) = m²` where
/// `f_s = (1 − h^{q^m−1})(1 − (y − s)^{q^m−1})`.
fn protocol_split_count(level: &Level, place: &Place, oracle: &dyn ExpSumSource) -> Result<u64> {
    let tower = &level.tower;
    let fq = tower.base();
    let m = tower.m();
    let qm = tower.top().order() as u64;
    let ind_h = h_power_indicator(&place.h, qm);
    let m2 = fq.from_int((m * m) as i64);
    let mut accepted = 0;
    let q = fq.order() as u64;
    for idx in 0..q.pow(m) {
        let mut s = BivariatePoly::new();
        s.add_term_raw(0, 1, Elem::ONE);
        let mut rest = idx;
        for i in 0..m {
            let c = Elem((rest % q) as u32);
            rest /= q;
            if !c.is_zero() {
                s.add_term_raw(i, 0, fq.neg(c));
            }
        }
        let f = ind_h.clone().times(PlaneFunction::one().minus(PlaneFunction::Poly(s).pow(qm - 1)));
        let v = t_m_via_sums(oracle, &f, m)?;
        if v == m2 {
            accepted += 1;
        } else if !v.is_zero() {
            bail!(Inconsistent, "indicator sum {} is neither 0 nor m^2", v.0);
        }
    }
    Ok(accepted)
}

/// `m Σ_{h(a)=0} Σ_{F(a,b)=0} a^i b^j` for `j = 1..=q^m − 1`, indexed
/// `[i][j−1]`.
pub fn moments(
    level: &Level,
    cert: &HCertificate,
    src: &MomentSource,
    cfg: &RecoveryConfig,
) -> Result<Vec<Vec<Elem>>> {
    let tower = &level.tower;
    let top = tower.top();
    let m = cert.m;
    let jmax = top.order() as u64 - 1;
    match src {
        MomentSource::Direct { curve } => {
            let sols: Vec<(Elem, Vec<Elem>)> =
                cert.roots.iter().map(|&a| (a, curve.f.y_poly_at(a, top).roots_in(top))).collect();
            let mf = top.from_int(m as i64);
            Ok((0..m)
                .map(|i| {
                    (1..=jmax)
                        .map(|j| {
                            let mut acc = Elem::ZERO;
                            for (a, bs) in &sols {
                                let ai = top.pow(*a, i as u64);
                                for &b in bs {
                                    acc = top.add(acc, top.mul(ai, top.pow(b, j)));
                                }
                            }
                            top.mul(mf, acc)
                        })
                        .collect()
                })
                .collect())
        }
        MomentSource::Protocol { oracle } => {
            let mut out = Vec::with_capacity(m as usize);
            for i in 0..m {
                let mut row = Vec::with_capacity(jmax as usize);
                for j in 1..=jmax {
                    row.push(protocol_moment(level, cert, *oracle, i, j as u32, cfg)?);
                }
                out.push(row);
            }
            Ok(out)
        }
    }
}

fn random_g(rng: &mut ChaCha8Rng, fq: &Gf, degree: u32) -> BivariatePoly {
    let mut g = BivariatePoly::new();
    for a in 0..=degree {
        for b in 0..=degree - a {
            let c = Elem(rng.gen_range(0..fq.order()));
            if !c.is_zero() {
                g.add_term_raw(a, b, c);
            }
        }
    }
    g
}

/// Majority value of `T_m(x^i y^j (1 − h^{q^m−1})(1 + (x^{q^m} − x) g))`
/// over random `g`. One escalation to twice the sample on a tie.
pub fn protocol_moment(
    level: &Level,
    cert: &HCertificate,
    oracle: &dyn ExpSumSource,
    i: u32,
    j: u32,
    cfg: &RecoveryConfig,
) -> Result<Elem> {
    let tower = &level.tower;
    let fq = tower.base();
    let qm = tower.top().order();
    let base = PlaneFunction::monomial(i, j).times(h_power_indicator(&cert.h, qm as u64));
    let mut frob = BivariatePoly::new();
    frob.add_term_raw(qm, 0, Elem::ONE);
    frob.add_term_raw(1, 0, fq.neg(Elem::ONE));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(((i as u64) << 32) | j as u64);
    let mut votes: BTreeMap<Elem, u32> = BTreeMap::new();
    let sample = cfg.sample.max(1);
    // a tied vote gets one more batch of samples
    for _round in 0..2 {
        for _ in 0..sample {
            let g = random_g(&mut rng, fq, cfg.g_degree);
            let twist = PlaneFunction::one().plus(PlaneFunction::Poly(frob.clone()).times(PlaneFunction::Poly(g)));
            let v = t_m_via_sums(oracle, &base.clone().times(twist), cert.m)?;
            *votes.entry(v).or_insert(0) += 1;
        }
        let mut ranked: Vec<(u32, Elem)> = votes.iter().map(|(&v, &c)| (c, v)).collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0));
        if ranked.len() == 1 || ranked[0].0 > ranked[1].0 {
            return Ok(ranked[0].1);
        }
    }
    Err(Error::Inconsistent(format!("majority vote for moment ({i}, {j}) is tied")))
}

/// Per-root power sums `s_j(a_k) = Σ_{F(a_k,b)=0} b^j`, indexed `[k][j−1]`,
/// from the moments divided by `m`.
pub fn vandermonde_solve(level: &Level, cert: &HCertificate, moments: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>> {
    let top = level.tower.top();
    let m = cert.m as usize;
    let minv = top
        .inv(top.from_int(m as i64))
        .ok_or_else(|| Error::Parameter("p divides m".into()))?;
    let v: Vec<Vec<Elem>> =
        (0..m).map(|i| cert.roots.iter().map(|&a| top.pow(a, i as u64)).collect()).collect();
    let jn = moments.first().map_or(0, |r| r.len());
    let mut out = vec![Vec::with_capacity(jn); m];
    for j in 0..jn {
        let rhs: Vec<Elem> = (0..m).map(|i| top.mul(minv, moments[i][j])).collect();
        let x = solve_linear(&v, &rhs, top).ok_or_else(|| Error::Internal("singular Vandermonde system".into()))?;
        for (k, xk) in x.into_iter().enumerate() {
            out[k].push(xk);
        }
    }
    Ok(out)
}

/// Whether `s_j(a^q) = s_j(a)^q` along the conjugate roots.
pub fn frobenius_equivariant(tower: &FieldTower, per_root: &[Vec<Elem>]) -> bool {
    let m = per_root.len();
    (0..m).all(|k| {
        let next = &per_root[(k + 1) % m];
        per_root[k].iter().zip(next).all(|(&a, &b)| tower.frobenius_q(a) == b)
    })
}

/// `Π (y − b)` over the `n_y` distinct roots with power sums `ps`.
pub fn per_root_poly(ps: &[Elem], n_y: u32, top: &Gf) -> Result<Poly> {
    let spec = reconstruct(ps, n_y, top)?;
    if spec.mults.iter().any(|&k| k != 1) || spec.roots.len() != n_y as usize {
        bail!(Inconsistent, "F(a, y) has a repeated root, contradicting the certificate");
    }
    let mut out = Poly::one();
    for &b in &spec.roots {
        out = out.mul(&Poly::new(vec![top.neg(b), Elem::ONE]), top);
    }
    Ok(out)
}

/// Lifts each coefficient of `F(a, y)` along `F_q[x]/(h) ≅ F_{q^m}`.
pub fn reassemble_f(level: &Level, cert: &HCertificate, poly_at_a: &Poly, d: u32) -> Result<PlaneCurve> {
    let tower = &level.tower;
    let top = tower.top();
    let fq = tower.base();
    let m = cert.m as usize;
    let a0 = cert.roots[0];
    let powers: Vec<Vec<Elem>> = (0..m).map(|t| top.coords(top.pow(a0, t as u64))).collect();
    let mat: Vec<Vec<Elem>> = (0..m).map(|row| (0..m).map(|t| powers[t][row]).collect()).collect();
    let n_y = poly_at_a.degree().unwrap_or(0);
    let mut f = BivariatePoly::new();
    f.add_term_raw(0, n_y as u32, Elem::ONE);
    for k in 0..n_y {
        let c = poly_at_a.coeff(k);
        let u = solve_linear(&mat, &top.coords(c), fq).ok_or_else(|| Error::Internal("a does not generate F_{q^m}".into()))?;
        let u = Poly::new(u);
        if u.degree().is_some_and(|e| e + k > d as usize) {
            bail!(Inconsistent, "lifted coefficient of y^{k} has degree {} beyond d = {d}", u.degree().unwrap());
        }
        for (i, &ci) in u.coeffs().iter().enumerate() {
            f.add_term_raw(i as u32, k as u32, ci);
        }
    }
    PlaneCurve::new(f)
}

#[derive(Clone, Debug)]
pub struct RecoveryReport {
    pub curve: PlaneCurve,
    pub cert: HCertificate,
    pub moments_computed: u64,
    pub frobenius_equivariant: bool,
}

/// The full pipeline. `d` and `n_y` are public; the curve itself is only
/// touched through `src`.
pub fn recover_with_source(
    ctx: &RecoveryContext,
    src: &MomentSource,
    d: u32,
    n_y: u32,
    cfg: &RecoveryConfig,
) -> Result<RecoveryReport> {
    let (cert, level) = find_h(ctx, src, d, n_y, cfg)?;
    let mom = moments(&level, &cert, src, cfg)?;
    let per_root = vandermonde_solve(&level, &cert, &mom)?;
    let equivariant = frobenius_equivariant(&level.tower, &per_root);
    if !equivariant {
        bail!(Inconsistent, "per-root power sums are not Frobenius equivariant");
    }
    let poly = per_root_poly(&per_root[0], n_y, level.tower.top())?;
    let curve = reassemble_f(&level, &cert, &poly, d)?;
    let computed = mom.iter().map(|r| r.len() as u64).sum();
    Ok(RecoveryReport { curve, cert, moments_computed: computed, frobenius_equivariant: equivariant })
}

/// Runs the pipeline on `inst`. In protocol mode the curve is hidden behind
/// an enumerating oracle and the pipeline sees only `S_m` values.
pub fn recover_curve(ctx: &RecoveryContext, inst: &RecoveryInstance, cfg: &RecoveryConfig) -> Result<RecoveryReport> {
    match cfg.mode {
        OracleMode::Direct => {
            recover_with_source(ctx, &MomentSource::Direct { curve: &inst.curve }, inst.d(), inst.n_y(), cfg)
        }
        OracleMode::Protocol => {
            let oracle = CurveOracle::new(ctx.base(), inst.curve.clone(), cfg.point_cap);
            recover_with_source(ctx, &MomentSource::Protocol { oracle: &oracle }, inst.d(), inst.n_y(), cfg)
        }
    }
}

/// `x (1 − y^{q−1})`.
pub fn legendre_query(tower: &FieldTower) -> PlaneFunction {
    PlaneFunction::x().times(PlaneFunction::one().minus(PlaneFunction::y().pow(tower.q() as u64 - 1)))
}

/// `λ = T_1(x(1 − y^{q−1})) − 1` for a hidden Legendre curve.
pub fn legendre_recover(oracle: &dyn ExpSumSource) -> Result<Elem> {
    let tower = oracle.tower(1)?;
    let t = t_m_via_sums(oracle, &legendre_query(&tower), 1)?;
    lambda_from_t1(&tower, t)
}

/// Same, from the sums `S_1(γ_i x(1 − y^{q−1}))` over the standard basis.
pub fn legendre_recover_from_sums(tower: &FieldTower, sums: &[PSum]) -> Result<Elem> {
    let basis = standard_basis(tower);
    let values: Vec<u32> = sums.iter().map(varpi_coefficient).collect();
    let t = recover_tm_from_l_data(tower, &basis, &values)?;
    lambda_from_t1(tower, t)
}

fn lambda_from_t1(tower: &FieldTower, t: Elem) -> Result<Elem> {
    let f = tower.base();
    let lambda = f.sub_elem(t, Elem::ONE);
    if lambda == Elem::ZERO || lambda == Elem::ONE {
        bail!(Inconsistent, "recovered lambda = {} is not a valid Legendre parameter", lambda.0);
    }
    Ok(lambda)
}
