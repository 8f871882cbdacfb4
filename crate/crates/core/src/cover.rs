//! The cover `C_λ` of `P¹ ∖ {0, 1, λ, ∞}`: characters, Cartier eigenvalues,
//! mod-p L-polynomials, the distinguished-character search and λ-recovery.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, modn};
use crate::conditions::{alpha, CondParams};
use crate::error::{bail, Error, Result};
use crate::field::{Elem, FieldTower};

/// A parameter `λ ∈ F_q ∖ {0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lambda(pub Elem);

impl Lambda {
    pub fn new(tower: &FieldTower, value: Elem) -> Result<Lambda> {
        if value.0 >= tower.q() {
            bail!(Parameter, "lambda = {value} is not an element of F_{}", tower.q());
        }
        if value == Elem::ZERO || value == Elem::ONE {
            bail!(Domain, "lambda must not be 0 or 1");
        }
        Ok(Lambda(value))
    }

    pub fn value(self) -> Elem {
        self.0
    }
}

/// All admissible λ in encoding order.
pub fn all_lambdas(tower: &FieldTower) -> Vec<Lambda> {
    tower.base().elements().filter(|e| e.0 > 1).map(Lambda).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverDescriptor {
    pub lambda: Lambda,
    pub q: u32,
    pub genus: u64,
    /// `(λ/(1-λ), 1/(λ-1))`, the coefficients of the affine patch
    /// `a·x^{q-1} + b·y^{q-1} + 1 = 0`.
    pub affine_coeffs: (Elem, Elem),
}

pub fn cover_descriptor(tower: &FieldTower, lambda: Lambda) -> CoverDescriptor {
    let (a, b) = affine_coeffs(tower, lambda);
    CoverDescriptor { lambda, q: tower.q(), genus: genus_c_lambda(tower.q() as u64), affine_coeffs: (a, b) }
}

fn affine_coeffs(tower: &FieldTower, lambda: Lambda) -> (Elem, Elem) {
    let f = tower.base();
    let l = lambda.0;
    let one_minus = f.sub_elem(Elem::ONE, l);
    let a = f.div(l, one_minus).expect("lambda != 1");
    let b = f.inv(f.neg(one_minus)).expect("lambda != 1");
    (a, b)
}

/// Genus `(q-2)(q-3)/2` of the smooth plane curve of degree `q-1`.
pub fn genus_c_lambda(q: u64) -> u64 {
    (q - 2) * (q.saturating_sub(3)) / 2
}

fn cond_params(tower: &FieldTower) -> CondParams {
    CondParams::new(tower.p() as u64, tower.r()).expect("tower parameters are valid")
}

/// Eigenvalue `α_{i+1,j+1} a^{i+1} b^{j+1}` of the r-th Cartier power on the
/// differential `ω_{i,j}`.
pub fn cartier_eigenvalue(tower: &FieldTower, a: Elem, b: Elem, i: u64, j: u64) -> Result<Elem> {
    let q = tower.q() as u64;
    let f = tower.base();
    if a.is_zero() || b.is_zero() {
        bail!(Domain, "cartier_eigenvalue needs ab != 0");
    }
    if q < 4 || i + j > q - 4 {
        bail!(Domain, "need i + j <= q - 4 (i = {i}, j = {j}, q = {q})");
    }
    let al = alpha(i + 1, j + 1, &cond_params(tower))?;
    let v = f.mul(f.pow(a, i + 1), f.pow(b, j + 1));
    Ok(f.mul(f.from_int(al as i64), v))
}

fn check_nontrivial(q1: u64, b: i64, c: i64) -> Result<(u64, u64)> {
    let (b, c) = (modn(b, q1), modn(c, q1));
    if b == 0 && c == 0 {
        bail!(Domain, "the trivial character has no L-polynomial of this form");
    }
    Ok((b, c))
}

/// Shifted indices `(i, j) = (b-1 mod q-1, c-1 mod q-1)`.
fn shifted(q1: u64, b: u64, c: u64) -> (u64, u64) {
    ((b + q1 - 1) % q1, (c + q1 - 1) % q1)
}

/// The p-rank `f_{C_λ,χ_{b,c}}`, which does not depend on λ.
pub fn p_rank_of_char(tower: &FieldTower, b: i64, c: i64) -> Result<u32> {
    let q = tower.q() as u64;
    let (b, c) = check_nontrivial(q - 1, b, c)?;
    let (i, j) = shifted(q - 1, b, c);
    if q < 4 || i + j > q - 4 {
        return Ok(0);
    }
    Ok(u32::from(alpha(i + 1, j + 1, &cond_params(tower))? != 0))
}

/// Polynomial over `F_q`, constant term first; here of degree at most one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPolyModP {
    pub coeffs: Vec<Elem>,
}

impl LPolyModP {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn linear(&self) -> Elem {
        self.coeffs.get(1).copied().unwrap_or(Elem::ZERO)
    }
}

/// `1 − α_{i+1,j+1} (λ/(1−λ))^{i+1} (1/(λ−1))^{j+1} T` when the p-rank is one,
/// and `1` otherwise.
pub fn l_poly_mod_p(tower: &FieldTower, lambda: Lambda, b: i64, c: i64) -> Result<LPolyModP> {
    if p_rank_of_char(tower, b, c)? == 0 {
        return Ok(LPolyModP { coeffs: vec![Elem::ONE] });
    }
    let q1 = tower.q() as u64 - 1;
    let (i, j) = shifted(q1, modn(b, q1), modn(c, q1));
    let (a, bb) = affine_coeffs(tower, lambda);
    let e = cartier_eigenvalue(tower, a, bb, i, j)?;
    Ok(LPolyModP { coeffs: vec![Elem::ONE, tower.base().neg(e)] })
}

/// `(gcd(b+c, q-1), gcd(b, q-1), gcd(c, q-1))`: the ramification indices of
/// `C_λ → C_λ/ker χ_{b,c}` above `0`, `1` and `λ`.
pub fn ramification_profile(b: i64, c: i64, q: u64) -> (u64, u64, u64) {
    let q1 = q - 1;
    let (b, c) = (modn(b, q1), modn(c, q1));
    (gcd((b + c) % q1, q1), gcd(b, q1), gcd(c, q1))
}

/// Order of `χ_{b,c}` in the character group.
pub fn char_order(b: i64, c: i64, q: u64) -> u64 {
    let q1 = q - 1;
    q1 / gcd(gcd(modn(b, q1), modn(c, q1)), q1)
}

/// Genus of `C_λ/ker χ_{b,c}` for a surjective character, from Riemann–Hurwitz
/// for the cyclic degree-`(q-1)` cover of `P¹`:
/// `2g − 2 = −2(q−1) + Σ_P (q − 1 − g_P)`.
pub fn quotient_genus(b: i64, c: i64, q: u64) -> Result<u64> {
    if char_order(b, c, q) != q - 1 {
        bail!(Domain, "chi_({b},{c}) is not surjective for q = {q}");
    }
    let (g0, g1, gl) = ramification_profile(b, c, q);
    let q1 = q as i64 - 1;
    let two_g_minus_2 = -2 * q1 + [g0, g1, gl].iter().map(|&g| q1 - g as i64).sum::<i64>();
    if two_g_minus_2 < -2 || (two_g_minus_2 + 2) % 2 != 0 {
        bail!(Internal, "Riemann-Hurwitz gave 2g-2 = {two_g_minus_2}");
    }
    Ok(((two_g_minus_2 + 2) / 2) as u64)
}

/// Characters satisfying: surjective; quotient genus `(q-3)/2`; ramified only
/// above 0 with index 2; and `f(χ^n) = 1 ⟺ f(χ_{n,n}) = 1` for `0 < 2n < q-1`.
pub fn distinguished_char_search(tower: &FieldTower, _lambda: Lambda) -> Result<BTreeSet<(u64, u64)>> {
    let q = tower.q() as u64;
    let q1 = q - 1;
    let mut out = BTreeSet::new();
    for b in 0..q1 {
        for c in 0..q1 {
            if char_order(b as i64, c as i64, q) != q1 {
                continue;
            }
            if quotient_genus(b as i64, c as i64, q)? != (q - 3) / 2 {
                continue;
            }
            if ramification_profile(b as i64, c as i64, q) != (2, 1, 1) {
                continue;
            }
            let mut ok = true;
            for n in (1..q1).take_while(|&n| 2 * n < q1) {
                let lhs = rank_or_zero(tower, (n * b) as i64, (n * c) as i64)?;
                let rhs = rank_or_zero(tower, n as i64, n as i64)?;
                if lhs != rhs {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.insert((b, c));
            }
        }
    }
    Ok(out)
}

fn rank_or_zero(tower: &FieldTower, b: i64, c: i64) -> Result<u32> {
    let q1 = tower.q() as u64 - 1;
    if modn(b, q1) == 0 && modn(c, q1) == 0 {
        return Ok(0);
    }
    p_rank_of_char(tower, b, c)
}

/// `L′(0, χ) mod p` for a distinguished character: the linear coefficient of
/// the mod-p L-polynomial.
pub fn lprime_at_zero_mod_p(tower: &FieldTower, lambda: Lambda, b: i64, c: i64) -> Result<Elem> {
    let q1 = tower.q() as u64 - 1;
    let key = (modn(b, q1), modn(c, q1));
    if !distinguished_char_search(tower, lambda)?.contains(&key) {
        bail!(Domain, "chi_({b},{c}) is not distinguished for q = {}", tower.q());
    }
    Ok(l_poly_mod_p(tower, lambda, b, c)?.linear())
}

/// `v(λ) = 2λ(λ−1)^{−2}`.
pub fn v_of_lambda(tower: &FieldTower, lambda: Lambda) -> Elem {
    let f = tower.base();
    let lm1 = f.sub_elem(lambda.0, Elem::ONE);
    let num = f.mul(f.from_int(2), lambda.0);
    f.div(num, f.mul(lm1, lm1)).expect("lambda != 1")
}

/// Frobenius orbit `{v^{p^i}}` of an element of `F_q`.
pub fn frobenius_orbit(tower: &FieldTower, v: Elem) -> BTreeSet<Elem> {
    (0..tower.r()).map(|i| tower.base().frobenius(v, i)).collect()
}

/// Every λ whose `v(λ)` lies in the Frobenius orbit of `v`.
pub fn recover_lambda(tower: &FieldTower, v: Elem) -> Result<BTreeSet<Lambda>> {
    if v.is_zero() {
        bail!(Domain, "recover_lambda needs v != 0");
    }
    let orbit = frobenius_orbit(tower, v);
    Ok(all_lambdas(tower)
        .into_iter()
        .filter(|&l| orbit.contains(&v_of_lambda(tower, l)))
        .collect())
}

/// The unique λ with `χ_{1,1}` coefficient `v1` and `χ_{1,2}` coefficient `v2`.
pub fn recover_from_second_char(tower: &FieldTower, v1: Elem, v2: Elem) -> Result<Lambda> {
    if tower.p() < 5 {
        bail!(Unsupported, "two-character recovery needs p >= 5");
    }
    let mut hits = Vec::new();
    for l in all_lambdas(tower) {
        if l_poly_mod_p(tower, l, 1, 1)?.linear() == v1 && l_poly_mod_p(tower, l, 1, 2)?.linear() == v2 {
            hits.push(l);
        }
    }
    match hits.as_slice() {
        [] => Err(Error::Inconsistent(format!("no lambda has coefficients ({v1}, {v2})"))),
        [l] => Ok(*l),
        _ => Err(Error::Internal(format!("{} lambdas share coefficients ({v1}, {v2})", hits.len()))),
    }
}

/// A point of `P¹(F_q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProjPoint {
    Fin(Elem),
    Inf,
}

impl ProjPoint {
    /// Homogeneous coordinates `(x : y)`.
    fn homog(self) -> (Elem, Elem) {
        match self {
            ProjPoint::Fin(x) => (x, Elem::ONE),
            ProjPoint::Inf => (Elem::ONE, Elem::ZERO),
        }
    }
}

/// `x ↦ (a x + b)/(c x + d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
}

impl Mobius {
    pub fn identity() -> Mobius {
        Mobius { a: Elem::ONE, b: Elem::ZERO, c: Elem::ZERO, d: Elem::ONE }
    }

    pub fn apply(&self, tower: &FieldTower, pt: ProjPoint) -> ProjPoint {
        let f = tower.base();
        let (x, y) = pt.homog();
        let num = f.add(f.mul(self.a, x), f.mul(self.b, y));
        let den = f.add(f.mul(self.c, x), f.mul(self.d, y));
        match f.div(num, den) {
            Some(v) => ProjPoint::Fin(v),
            None => ProjPoint::Inf,
        }
    }

    /// Scales so the first nonzero of `(a, b, c, d)` is 1.
    pub fn normalized(&self, tower: &FieldTower) -> Mobius {
        let f = tower.base();
        let lead = [self.a, self.b, self.c, self.d].into_iter().find(|e| !e.is_zero()).unwrap_or(Elem::ONE);
        let s = f.inv(lead).unwrap();
        Mobius { a: f.mul(s, self.a), b: f.mul(s, self.b), c: f.mul(s, self.c), d: f.mul(s, self.d) }
    }
}

pub type FourPoints = [ProjPoint; 4];

/// The Möbius map `σ` with `σ(P1) = ∞`, `σ(P2) = 0`, `σ(P3) = 1`, and `σ(P4)`.
pub fn normalize_four_points(tower: &FieldTower, pts: &FourPoints) -> Result<(Mobius, Lambda)> {
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                bail!(Domain, "points {} and {} coincide", i + 1, j + 1);
            }
        }
    }
    let f = tower.base();
    // L_P(Q) = y_P x_Q − x_P y_Q vanishes exactly at Q = P.
    let lin = |p: ProjPoint, q: ProjPoint| {
        let (xp, yp) = p.homog();
        let (xq, yq) = q.homog();
        f.sub_elem(f.mul(yp, xq), f.mul(xp, yq))
    };
    let (x1, y1) = pts[0].homog();
    let (x2, y2) = pts[1].homog();
    let k = f.div(lin(pts[0], pts[2]), lin(pts[1], pts[2])).expect("distinct points");
    let sigma = Mobius {
        a: f.mul(k, y2),
        b: f.neg(f.mul(k, x2)),
        c: y1,
        d: f.neg(x1),
    }
    .normalized(tower);
    match sigma.apply(tower, pts[3]) {
        ProjPoint::Fin(l) => Ok((sigma, Lambda::new(tower, l)?)),
        ProjPoint::Inf => Err(Error::Internal("fourth point mapped to infinity".into())),
    }
}

/// Whether every nontrivial character has `L′(0) mod p` in `F_3` (the `q = 9`
/// invariant).
pub fn all_lprime_in_prime_field(tower: &FieldTower, lambda: Lambda) -> Result<bool> {
    let q1 = tower.q() as i64 - 1;
    let p = tower.p();
    for b in 0..q1 {
        for c in 0..q1 {
            if b == 0 && c == 0 {
                continue;
            }
            let v = l_poly_mod_p(tower, lambda, b, c)?.linear();
            if !tower.base().in_subfield(v, p) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Decides whether there is `α ∈ PGL₂(F_q) ⋊ Frobenius` carrying the marked
/// points `P1, P2` of `a` to those of `b` and the unordered pair `{P3, P4}` to
/// `{P3′, P4′}`, by comparing `v(λ)` up to Frobenius.
///
/// For `q = 9` the comparison uses whether all `L′(0)` values lie in `F_3`,
/// which separates the two isomorphism classes of unordered four-point sets.
pub fn same_configuration(tower: &FieldTower, a: &FourPoints, b: &FourPoints) -> Result<bool> {
    let (_, la) = normalize_four_points(tower, a)?;
    let (_, lb) = normalize_four_points(tower, b)?;
    if tower.q() == 9 {
        return Ok(all_lprime_in_prime_field(tower, la)? == all_lprime_in_prime_field(tower, lb)?);
    }
    let va = v_of_lambda(tower, la);
    let vb = v_of_lambda(tower, lb);
    Ok(frobenius_orbit(tower, va).contains(&vb))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiReport {
    pub q: u32,
    pub lambda: Elem,
    pub lambda_prime: Elem,
    pub isomorphisms_checked: u64,
    /// Matrices `[[m00, m01], [m10, m11]]` under which all L-numerators agree.
    pub matching: Vec<[[u64; 2]; 2]>,
}

impl PsiReport {
    pub fn any_match(&self) -> bool {
        !self.matching.is_empty()
    }
}

/// All `M ∈ GL₂(Z/N)` as row-major `[[a, b], [c, d]]`.
pub fn gl2_mod(n: u64) -> Vec<[[u64; 2]; 2]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let det = modn((a * d) as i64 - (b * c) as i64, n);
                    if gcd(det, n) == 1 {
                        out.push([[a, b], [c, d]]);
                    }
                }
            }
        }
    }
    out
}

/// Searches the automorphisms `ψ` of `μ_{q−1}²` for which
/// `L(T, X′, χ′) = L(T, X, χ′∘ψ)` for every nontrivial character `χ′`, using
/// the exact numerators. `χ_{b′,c′}∘ψ_M = χ_{Mᵀ(b′,c′)}`.
pub fn psi_matching_experiment(tower: &FieldTower, lambda: Lambda, lambda_prime: Lambda) -> Result<PsiReport> {
    let q = tower.q() as u64;
    if q > 9 {
        bail!(Resource, "psi experiment is limited to q <= 9 (got {q})");
    }
    let n = q - 1;
    let exact = |l: Lambda| -> Result<Vec<crate::place_sums::CanonicalSum>> {
        let mut v = Vec::with_capacity((n * n) as usize);
        for b in 0..n {
            for c in 0..n {
                if b == 0 && c == 0 {
                    v.push(crate::place_sums::CanonicalSum::default());
                    continue;
                }
                let num = crate::place_sums::l_numerator_exact(tower, l, b as i64, c as i64)?;
                v.push(num.s1.canonical());
            }
        }
        Ok(v)
    };
    let lx = exact(lambda)?;
    let lxp = exact(lambda_prime)?;
    let mats = gl2_mod(n);
    let mut matching = Vec::new();
    for m in &mats {
        let ok = (0..n).all(|bp| {
            (0..n).all(|cp| {
                if bp == 0 && cp == 0 {
                    return true;
                }
                let b = (m[0][0] * bp + m[1][0] * cp) % n;
                let c = (m[0][1] * bp + m[1][1] * cp) % n;
                lxp[(bp * n + cp) as usize] == lx[(b * n + c) as usize]
            })
        });
        if ok {
            matching.push(*m);
        }
    }
    Ok(PsiReport {
        q: q as u32,
        lambda: lambda.0,
        lambda_prime: lambda_prime.0,
        isomorphisms_checked: mats.len() as u64,
        matching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    fn tw(p: u32, r: u32) -> FieldTower {
        build_field(p, r, 1).unwrap()
    }

    #[test]
    fn genus_values() {
        assert_eq!(genus_c_lambda(3), 0);
        assert_eq!(genus_c_lambda(5), 3);
        assert_eq!(genus_c_lambda(9), 21);
    }

    #[test]
    fn cartier_examples() {
        let t = tw(7, 1);
        let f = t.base();
        for a in f.nonzero_elements() {
            for b in f.nonzero_elements() {
                let e = cartier_eigenvalue(&t, a, b, 0, 0).unwrap();
                assert_eq!(e, f.mul(f.from_int(2), f.mul(a, b)));
                for i in 0..=3u64 {
                    for j in 0..=3 - i {
                        assert!(!cartier_eigenvalue(&t, a, b, i, j).unwrap().is_zero());
                    }
                }
            }
        }
        let t9 = tw(3, 2);
        assert_eq!(cartier_eigenvalue(&t9, Elem(1), Elem(1), 1, 1).unwrap(), Elem::ZERO);
        assert!(cartier_eigenvalue(&t9, Elem(1), Elem(1), 3, 3).is_err());
    }

    #[test]
    fn p_rank_examples() {
        assert_eq!(p_rank_of_char(&tw(7, 1), 1, 1).unwrap(), 1);
        assert_eq!(p_rank_of_char(&tw(7, 1), 5, 5).unwrap(), 0);
        assert_eq!(p_rank_of_char(&tw(3, 2), 2, 2).unwrap(), 0);
        assert!(p_rank_of_char(&tw(7, 1), 0, 6).is_err());
    }

    #[test]
    fn lpoly_examples() {
        let t = tw(5, 1);
        let lp = l_poly_mod_p(&t, Lambda(Elem(2)), 1, 1).unwrap();
        assert_eq!(lp.coeffs, vec![Elem(1), Elem(4)]);
        let lp = l_poly_mod_p(&t, Lambda(Elem(3)), 1, 1).unwrap();
        assert_eq!(lp.coeffs, vec![Elem(1), Elem(4)]);
        let t3 = tw(3, 1);
        assert_eq!(l_poly_mod_p(&t3, Lambda(Elem(2)), 1, 1).unwrap().coeffs, vec![Elem(1)]);
    }

    #[test]
    fn closed_form_11_and_inversion_symmetry() {
        for (p, r) in [(5, 1), (7, 1), (3, 2), (11, 1), (13, 1)] {
            let t = tw(p, r);
            let f = t.base();
            for l in all_lambdas(&t) {
                let lin = l_poly_mod_p(&t, l, 1, 1).unwrap().linear();
                assert_eq!(lin, v_of_lambda(&t, l));
                let inv = Lambda(f.inv(l.0).unwrap());
                assert_eq!(lin, l_poly_mod_p(&t, inv, 1, 1).unwrap().linear());
            }
        }
    }

    #[test]
    fn profile_and_genus() {
        assert_eq!(ramification_profile(1, 1, 7), (2, 1, 1));
        assert_eq!(ramification_profile(0, 4, 7), (2, 6, 2));
        assert_eq!(ramification_profile(1, 2, 7), (3, 1, 2));
        assert_eq!(quotient_genus(1, 1, 5).unwrap(), 1);
        assert_eq!(quotient_genus(1, 1, 13).unwrap(), 5);
        assert_eq!(quotient_genus(1, 2, 7).unwrap(), 1);
        assert!(quotient_genus(2, 2, 7).is_err());
        for q in crate::conditions::odd_prime_powers(81) {
            assert_eq!(quotient_genus(1, 1, q).unwrap(), (q - 3) / 2);
        }
    }

    #[test]
    fn distinguished_small() {
        let set = |v: &[(u64, u64)]| v.iter().copied().collect::<BTreeSet<_>>();
        let t = tw(7, 1);
        assert_eq!(distinguished_char_search(&t, Lambda(Elem(3))).unwrap(), set(&[(1, 1)]));
        let t = tw(3, 2);
        // (1,3) and (3,1) have profile (4,1,1) and quotient genus 2, so the
        // genus and ramification conditions already exclude them.
        let a = distinguished_char_search(&t, Lambda(Elem(2))).unwrap();
        assert_eq!(a, set(&[(1, 1), (3, 3)]));
        assert_eq!(quotient_genus(1, 3, 9).unwrap(), 2);
        assert_eq!(a, distinguished_char_search(&t, Lambda(Elem(5))).unwrap());
    }

    #[test]
    fn lprime_and_recovery() {
        let t = tw(5, 1);
        assert_eq!(lprime_at_zero_mod_p(&t, Lambda(Elem(2)), 1, 1).unwrap(), Elem(4));
        assert!(lprime_at_zero_mod_p(&t, Lambda(Elem(2)), 1, 2).is_err());
        let got = recover_lambda(&t, Elem(4)).unwrap();
        assert_eq!(got, [Lambda(Elem(2)), Lambda(Elem(3))].into_iter().collect());
        let t7 = tw(7, 1);
        assert_eq!(lprime_at_zero_mod_p(&t7, Lambda(Elem(3)), 1, 1).unwrap(), Elem(5));
        let got = recover_lambda(&t7, Elem(5)).unwrap();
        assert_eq!(got, [Lambda(Elem(3)), Lambda(Elem(5))].into_iter().collect());
        assert!(recover_lambda(&t7, Elem(0)).is_err());
    }

    #[test]
    fn second_char_roundtrip() {
        for (p, r) in [(5, 1), (7, 1), (5, 2)] {
            let t = tw(p, r);
            for l in all_lambdas(&t) {
                let v1 = l_poly_mod_p(&t, l, 1, 1).unwrap().linear();
                let v2 = l_poly_mod_p(&t, l, 1, 2).unwrap().linear();
                assert_eq!(recover_from_second_char(&t, v1, v2).unwrap(), l);
            }
        }
        assert!(matches!(recover_from_second_char(&tw(3, 1), Elem(1), Elem(1)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn normalize_examples() {
        let t = tw(7, 1);
        let fin = |v| ProjPoint::Fin(Elem(v));
        let (s, l) = normalize_four_points(&t, &[ProjPoint::Inf, fin(0), fin(1), fin(3)]).unwrap();
        assert_eq!(s, Mobius::identity());
        assert_eq!(l, Lambda(Elem(3)));
        let pts = [fin(0), ProjPoint::Inf, fin(1), fin(3)];
        let (s, l) = normalize_four_points(&t, &pts).unwrap();
        assert_eq!(s.apply(&t, pts[0]), ProjPoint::Inf);
        assert_eq!(s.apply(&t, pts[1]), fin(0));
        assert_eq!(s.apply(&t, pts[2]), fin(1));
        assert_eq!(l, Lambda(Elem(5)));
        assert!(normalize_four_points(&t, &[fin(0), fin(0), fin(1), fin(3)]).is_err());
    }

    #[test]
    fn same_config_examples() {
        let t = tw(5, 1);
        let fin = |v| ProjPoint::Fin(Elem(v));
        let a = [ProjPoint::Inf, fin(0), fin(1), fin(2)];
        let b = [ProjPoint::Inf, fin(0), fin(1), fin(3)];
        assert!(same_configuration(&t, &a, &b).unwrap());
    }

    #[test]
    fn gl2_sizes() {
        assert_eq!(gl2_mod(4).len(), 96);
        assert_eq!(gl2_mod(6).len(), 288);
    }
}
