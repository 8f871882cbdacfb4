//! Exponential sums `S_m(f)` and trace sums `T_m(f)` on affine plane curves,
//! and recovery of `T_m(f)` from the sums `S_m(γ f)` over a basis `γ` of
//! `F_q/F_p`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::field::{Elem, FieldTower, Gf};
use crate::poly::{solve_linear, BivariatePoly};

/// Largest `q^{2m}` for which the plane is scanned for curve points.
pub const DEFAULT_POINT_SCAN_CAP: u64 = 1 << 26;

/// An affine plane curve `F(x, y) = 0` over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneCurve {
    pub f: BivariatePoly,
    pub d: u32,
}

impl PlaneCurve {
    pub fn new(f: BivariatePoly) -> Result<PlaneCurve> {
        let d = f.total_degree().ok_or_else(|| Error::Parameter("the zero polynomial is not a curve".into()))?;
        Ok(PlaneCurve { f, d })
    }

    /// `y² = x(x−1)(x−λ)`, written `y² − x³ + (1+λ)x² − λx`.
    pub fn legendre(tower: &FieldTower, lambda: Elem) -> PlaneCurve {
        let f = tower.base();
        let mut c = BivariatePoly::new();
        c.add_term(0, 2, Elem::ONE, f);
        c.add_term(3, 0, f.neg(Elem::ONE), f);
        c.add_term(2, 0, f.add(Elem::ONE, lambda), f);
        c.add_term(1, 0, f.neg(lambda), f);
        PlaneCurve::new(c).expect("nonzero")
    }
}

/// Affine points of `F = 0` over the top field of `tower`.
pub fn curve_points(tower: &FieldTower, curve: &PlaneCurve, cap: u64) -> Result<Vec<(Elem, Elem)>> {
    let f = tower.top();
    let qm = f.order() as u64;
    if qm.saturating_mul(qm) > cap {
        bail!(Resource, "scanning F_{qm}^2 exceeds the cap {cap}");
    }
    let mut pts = Vec::new();
    for a in f.elements() {
        let yp = curve.f.y_poly_at(a, f);
        if yp.is_zero() {
            pts.extend(f.elements().map(|b| (a, b)));
            continue;
        }
        for b in f.elements() {
            if yp.eval(b, f).is_zero() {
                pts.push((a, b));
            }
        }
    }
    Ok(pts)
}

/// A function on the plane, evaluated pointwise over `F_{q^m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaneFunction {
    Const(Elem),
    Poly(BivariatePoly),
    Add(Vec<PlaneFunction>),
    Mul(Vec<PlaneFunction>),
    Neg(Box<PlaneFunction>),
    Pow(Box<PlaneFunction>, u64),
}

impl PlaneFunction {
    pub fn x() -> PlaneFunction {
        PlaneFunction::monomial(1, 0)
    }

    pub fn y() -> PlaneFunction {
        PlaneFunction::monomial(0, 1)
    }

    pub fn monomial(i: u32, j: u32) -> PlaneFunction {
        let mut p = BivariatePoly::new();
        // coefficient 1 is the same encoding in every field
        p.add_term_raw(i, j, Elem::ONE);
        PlaneFunction::Poly(p)
    }

    pub fn one() -> PlaneFunction {
        PlaneFunction::Const(Elem::ONE)
    }

    pub fn times(self, o: PlaneFunction) -> PlaneFunction {
        PlaneFunction::Mul(vec![self, o])
    }

    pub fn plus(self, o: PlaneFunction) -> PlaneFunction {
        PlaneFunction::Add(vec![self, o])
    }

    pub fn minus(self, o: PlaneFunction) -> PlaneFunction {
        PlaneFunction::Add(vec![self, PlaneFunction::Neg(Box::new(o))])
    }

    pub fn pow(self, e: u64) -> PlaneFunction {
        PlaneFunction::Pow(Box::new(self), e)
    }

    pub fn scaled(self, c: Elem) -> PlaneFunction {
        PlaneFunction::Const(c).times(self)
    }

    pub fn eval(&self, a: Elem, b: Elem, f: &Gf) -> Elem {
        match self {
            PlaneFunction::Const(c) => *c,
            PlaneFunction::Poly(p) => p.eval(a, b, f),
            PlaneFunction::Add(v) => v.iter().fold(Elem::ZERO, |acc, g| f.add(acc, g.eval(a, b, f))),
            PlaneFunction::Mul(v) => {
                let mut acc = Elem::ONE;
                for g in v {
                    if acc.is_zero() {
                        break;
                    }
                    acc = f.mul(acc, g.eval(a, b, f));
                }
                acc
            }
            PlaneFunction::Neg(g) => f.neg(g.eval(a, b, f)),
            PlaneFunction::Pow(g, e) => f.pow(g.eval(a, b, f), *e),
        }
    }
}

/// `S_m(f)` as counts of points by the absolute trace of `f(P)`: the group
/// ring element `Σ counts[c] ζ_p^c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PSum {
    pub counts: Vec<u64>,
}

impl PSum {
    pub fn zero(p: u32) -> PSum {
        PSum { counts: vec![0; p as usize] }
    }

    pub fn p(&self) -> u32 {
        self.counts.len() as u32
    }

    pub fn mass(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Coordinates in the basis `1, ζ, …, ζ^{p−2}` after `Σ ζ^i = 0`.
    pub fn canonical(&self) -> Vec<i64> {
        let last = *self.counts.last().unwrap_or(&0) as i64;
        self.counts[..self.counts.len().saturating_sub(1)]
            .iter()
            .map(|&c| c as i64 - last)
            .collect()
    }

    pub fn merge(&mut self, o: &PSum) {
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            *a += b;
        }
    }
}

/// `#{P : Tr(f(P)) = c}` for each `c ∈ F_p`.
pub fn s_m_f(tower: &FieldTower, points: &[(Elem, Elem)], f: &PlaneFunction) -> PSum {
    let top = tower.top();
    let mut s = PSum::zero(tower.p());
    for &(a, b) in points {
        let t = tower.abs_trace(f.eval(a, b, top));
        s.counts[t.0 as usize] += 1;
    }
    s
}

/// `Σ_P Tr_m(f(P)) ∈ F_q`.
pub fn t_m_f(tower: &FieldTower, points: &[(Elem, Elem)], f: &PlaneFunction) -> Elem {
    let top = tower.top();
    let mut acc = Elem::ZERO;
    for &(a, b) in points {
        acc = top.add(acc, f.eval(a, b, top));
    }
    tower.rel_trace(acc)
}

/// Coefficient `Σ c·counts[c] mod p` of `−ϖ` in `Σ counts[c] (1 − ϖ)^c`.
pub fn varpi_coefficient(s: &PSum) -> u32 {
    let p = s.p() as u64;
    (s.counts.iter().enumerate().map(|(c, &n)| (c as u64 * (n % p)) % p).sum::<u64>() % p) as u32
}

/// The `F_p`-basis `1, t, …, t^{r−1}` of `F_q` (encodings `p^k`).
pub fn standard_basis(tower: &FieldTower) -> Vec<Elem> {
    (0..tower.r()).map(|k| Elem(tower.p().pow(k))).collect()
}

/// The unique `T ∈ F_q` with `Tr_{q/p}(γ_i T) = values[i]`.
pub fn recover_tm_from_l_data(tower: &FieldTower, basis: &[Elem], values: &[u32]) -> Result<Elem> {
    let r = tower.r() as usize;
    if basis.len() != r || values.len() != r {
        bail!(Parameter, "need {r} basis elements and values");
    }
    let fq = tower.base();
    let fp = tower.prime();
    let unit: Vec<Elem> = standard_basis(tower);
    let a: Vec<Vec<Elem>> = basis
        .iter()
        .map(|&g| unit.iter().map(|&e| tower.base_trace(fq.mul(g, e))).collect())
        .collect();
    if crate::poly::rank(&a, fp) != r {
        bail!(Internal, "the trace pairing matrix is singular; not a basis");
    }
    let rhs: Vec<Elem> = values.iter().map(|&v| fp.from_int(v as i64)).collect();
    let x = solve_linear(&a, &rhs, fp).ok_or_else(|| Error::Internal("trace system inconsistent".into()))?;
    fq.from_digits(&x.iter().map(|e| e.0).collect::<Vec<_>>())
}

/// Something that answers exponential-sum queries for a hidden curve.
pub trait ExpSumSource: Send + Sync {
    /// Tower `F_p ⊂ F_q ⊂ F_{q^m}` for the requested `m`.
    fn tower(&self, m: u32) -> Result<FieldTower>;
    /// `S_m(f)` over the hidden curve.
    fn s_m(&self, f: &PlaneFunction, m: u32) -> Result<PSum>;
}

/// `T_m(f)` through the `S_m(γ_i f)` data only.
pub fn t_m_via_sums(source: &dyn ExpSumSource, f: &PlaneFunction, m: u32) -> Result<Elem> {
    let tower = source.tower(m)?;
    let basis = standard_basis(&tower);
    let mut values = Vec::with_capacity(basis.len());
    for &g in &basis {
        let s = source.s_m(&f.clone().scaled(g), m)?;
        values.push(varpi_coefficient(&s));
    }
    recover_tm_from_l_data(&tower, &basis, &values)
}

/// Answers queries by enumerating the points of a known curve. Point sets are
/// cached per `m`.
pub struct CurveOracle {
    base: FieldTower,
    curve: PlaneCurve,
    cap: u64,
    cache: Mutex<HashMap<u32, (FieldTower, Arc<Vec<(Elem, Elem)>>)>>,
}

impl CurveOracle {
    pub fn new(base: &FieldTower, curve: PlaneCurve, cap: u64) -> CurveOracle {
        CurveOracle { base: base.clone(), curve, cap, cache: Mutex::new(HashMap::new()) }
    }

    pub fn points(&self, m: u32) -> Result<(FieldTower, Arc<Vec<(Elem, Elem)>>)> {
        if let Some(e) = self.cache.lock().unwrap().get(&m) {
            return Ok(e.clone());
        }
        let t = self.base.with_top_degree(m)?;
        let pts = Arc::new(curve_points(&t, &self.curve, self.cap)?);
        self.cache.lock().unwrap().insert(m, (t.clone(), Arc::clone(&pts)));
        Ok((t, pts))
    }
}

impl ExpSumSource for CurveOracle {
    fn tower(&self, m: u32) -> Result<FieldTower> {
        Ok(self.points(m)?.0)
    }

    fn s_m(&self, f: &PlaneFunction, m: u32) -> Result<PSum> {
        let (t, pts) = self.points(m)?;
        Ok(s_m_f(&t, &pts, f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_poly(rng: &mut ChaCha8Rng, f: &Gf, deg: u32) -> BivariatePoly {
        let mut p = BivariatePoly::new();
        for i in 0..=deg {
            for j in 0..=deg - i {
                p.add_term(i, j, Elem(rng.gen_range(0..f.order())), f);
            }
        }
        p
    }

    #[test]
    fn points_of_y_and_legendre() {
        let t = build_field(5, 1, 1).unwrap();
        let mut y = BivariatePoly::new();
        y.add_term(0, 1, Elem::ONE, t.base());
        let pts = curve_points(&t, &PlaneCurve::new(y).unwrap(), u64::MAX).unwrap();
        assert_eq!(pts.len(), 5);
        let leg = PlaneCurve::legendre(&t, Elem(2));
        let pts = curve_points(&t, &leg, u64::MAX).unwrap();
        for x in [0, 1, 2] {
            assert!(pts.contains(&(Elem(x), Elem(0))));
        }
        assert!(curve_points(&t.with_top_degree(4).unwrap(), &leg, 1000).is_err());
    }

    #[test]
    fn legendre_trace_sum() {
        for (p, r) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let t = build_field(p, r, 1).unwrap();
            let fq = t.base();
            let q = t.q() as u64;
            let g = PlaneFunction::x().times(PlaneFunction::one().minus(PlaneFunction::y().pow(q - 1)));
            for l in 2..t.q() {
                let curve = PlaneCurve::legendre(&t, Elem(l));
                let pts = curve_points(&t, &curve, u64::MAX).unwrap();
                assert_eq!(t_m_f(&t, &pts, &g), fq.add(Elem::ONE, Elem(l)));
            }
        }
    }

    #[test]
    fn constant_functions() {
        let t = build_field(3, 2, 2).unwrap();
        let curve = PlaneCurve::legendre(&t, Elem(5));
        let pts = curve_points(&t, &curve, u64::MAX).unwrap();
        let s0 = s_m_f(&t, &pts, &PlaneFunction::Const(Elem::ZERO));
        assert_eq!(s0.counts[0], pts.len() as u64);
        assert_eq!(varpi_coefficient(&s0), 0);
        let s1 = s_m_f(&t, &pts, &PlaneFunction::one());
        // rm = 4 ≡ 1 mod 3
        assert_eq!(s1.counts[1], pts.len() as u64);
        assert_eq!(s1.mass(), pts.len() as u64);
    }

    #[test]
    fn varpi_matches_direct_trace_sum_and_shift() {
        let t = build_field(5, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let curve = PlaneCurve::legendre(&t, Elem(3));
        let pts = curve_points(&t, &curve, u64::MAX).unwrap();
        for _ in 0..10 {
            let f = PlaneFunction::Poly(random_poly(&mut rng, t.base(), 3));
            let s = s_m_f(&t, &pts, &f);
            let direct = pts
                .iter()
                .fold(Elem::ZERO, |acc, &(a, b)| t.prime().add(acc, t.abs_trace(f.eval(a, b, t.top()))));
            assert_eq!(varpi_coefficient(&s), direct.0);
            let kappa = 2u32;
            let shifted = s_m_f(&t, &pts, &f.clone().plus(PlaneFunction::Const(Elem(kappa))));
            // adding κ to f adds Tr(κ) = rm·κ per point
            let shift = (2 * kappa as u64 * pts.len() as u64 % 5) as u32;
            assert_eq!(varpi_coefficient(&shifted), (varpi_coefficient(&s) + shift) % 5);
        }
    }

    #[test]
    fn pathway_roundtrip_and_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, r, m) in [(3, 2, 1), (3, 2, 2), (5, 1, 2), (3, 1, 3)] {
            let base = build_field(p, r, 1).unwrap();
            let curve = PlaneCurve::legendre(&base, Elem(2));
            let oracle = CurveOracle::new(&base, curve.clone(), u64::MAX);
            let (t, pts) = oracle.points(m).unwrap();
            for _ in 0..5 {
                let f = PlaneFunction::Poly(random_poly(&mut rng, t.base(), 3));
                let g = PlaneFunction::Poly(random_poly(&mut rng, t.base(), 2));
                let direct = t_m_f(&t, &pts, &f);
                assert_eq!(t_m_via_sums(&oracle, &f, m).unwrap(), direct);
                let sum = t_m_f(&t, &pts, &f.clone().plus(g.clone()));
                assert_eq!(sum, t.base().add(direct, t_m_f(&t, &pts, &g)));
                // adding a multiple of F does not change the sums
                let fp = f.clone().plus(PlaneFunction::Poly(curve.f.clone()).times(g.clone()));
                assert_eq!(s_m_f(&t, &pts, &fp), s_m_f(&t, &pts, &f));
            }
        }
    }

    #[test]
    fn recover_zero_and_prime_field() {
        let t = build_field(3, 2, 1).unwrap();
        let b = standard_basis(&t);
        assert_eq!(recover_tm_from_l_data(&t, &b, &[0, 0]).unwrap(), Elem::ZERO);
        let t = build_field(7, 1, 1).unwrap();
        assert_eq!(recover_tm_from_l_data(&t, &[Elem::ONE], &[4]).unwrap(), Elem(4));
        assert!(recover_tm_from_l_data(&build_field(3, 2, 1).unwrap(), &[Elem(1), Elem(2)], &[0, 0]).is_err());
    }

    #[test]
    fn canonical_psum() {
        let s = PSum { counts: vec![3, 1, 1] };
        assert_eq!(s.canonical(), vec![2, 0]);
        let u = PSum { counts: vec![2, 2, 2] };
        assert_eq!(u.canonical(), vec![0, 0]);
    }
}
