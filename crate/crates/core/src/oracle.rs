//! Brute-force reference computations. Slow and direct; used to check the
//! structured algorithms in the acceptance suite and in tests.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::cover::{FourPoints, Lambda, Mobius, ProjPoint};
use crate::error::Result;
use crate::field::{Elem, FieldTower, Gf};
use crate::poly::{BivariatePoly, Poly};
use crate::power_sums::MultisetSpec;

/// All of `PGL₂(F_q)`, each matrix scaled so its first nonzero entry is 1.
pub fn pgl2(tower: &FieldTower) -> Vec<Mobius> {
    let f = tower.base();
    let mut out = Vec::new();
    for a in f.elements() {
        for b in f.elements() {
            for c in f.elements() {
                for d in f.elements() {
                    let m = Mobius { a, b, c, d };
                    let det = f.sub_elem(f.mul(a, d), f.mul(b, c));
                    if !det.is_zero() && m.normalized(tower) == m {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

fn frob_point(tower: &FieldTower, pt: ProjPoint, k: u32) -> ProjPoint {
    match pt {
        ProjPoint::Fin(x) => ProjPoint::Fin(tower.base().frobenius(x, k)),
        ProjPoint::Inf => ProjPoint::Inf,
    }
}

/// `x ↦ M(x^{p^k})` for every `M ∈ PGL₂(F_q)` and `0 ≤ k < r`.
pub struct SemilinearGroup<'a> {
    tower: &'a FieldTower,
    mats: Vec<Mobius>,
}

impl<'a> SemilinearGroup<'a> {
    pub fn new(tower: &'a FieldTower) -> SemilinearGroup<'a> {
        SemilinearGroup { tower, mats: pgl2(tower) }
    }

    pub fn size(&self) -> usize {
        self.mats.len() * self.tower.r() as usize
    }

    pub fn images<'b>(&'b self, pts: &'b [ProjPoint]) -> impl Iterator<Item = Vec<ProjPoint>> + 'b {
        (0..self.tower.r()).flat_map(move |k| {
            self.mats.iter().map(move |m| pts.iter().map(|&p| m.apply(self.tower, frob_point(self.tower, p, k))).collect())
        })
    }
}

pub fn projective_line(tower: &FieldTower) -> Vec<ProjPoint> {
    let mut v: Vec<ProjPoint> = tower.base().elements().map(ProjPoint::Fin).collect();
    v.push(ProjPoint::Inf);
    v
}

/// Ordered 4-tuples of distinct points of `P¹(F_q)`.
pub fn all_configurations(tower: &FieldTower) -> Vec<FourPoints> {
    let line = projective_line(tower);
    let mut out = Vec::new();
    for &a in &line {
        for &b in &line {
            for &c in &line {
                for &d in &line {
                    let s: BTreeSet<_> = [a, b, c, d].into_iter().collect();
                    if s.len() == 4 {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// `(P1, P2, {P3, P4})` with the last pair sorted.
fn marked(pts: &[ProjPoint]) -> FourPoints {
    let (c, d) = if pts[2] <= pts[3] { (pts[2], pts[3]) } else { (pts[3], pts[2]) };
    [pts[0], pts[1], c, d]
}

/// Orbit labels of configurations `(P1, P2, {P3, P4})` under the semilinear
/// group: two configurations get the same label iff some `x ↦ M(x^{p^k})`
/// maps `P1 ↦ P1′`, `P2 ↦ P2′` and `{P3, P4}` onto `{P3′, P4′}`.
pub fn configuration_classes(tower: &FieldTower) -> HashMap<FourPoints, usize> {
    let g = SemilinearGroup::new(tower);
    let mut label: HashMap<FourPoints, usize> = HashMap::new();
    let mut next = 0;
    for cfg in all_configurations(tower) {
        if label.contains_key(&marked(&cfg)) {
            continue;
        }
        for img in g.images(&cfg) {
            label.insert(marked(&img), next);
        }
        next += 1;
    }
    all_configurations(tower).into_iter().map(|c| (c, label[&marked(&c)])).collect()
}

/// Whether some semilinear map fixes `∞` and carries `{0, 1, λ}` onto
/// `{0, 1, λ′}`.
pub fn triple_equivalent(g: &SemilinearGroup, lambda: Lambda, lambda_prime: Lambda) -> bool {
    let src = [ProjPoint::Inf, ProjPoint::Fin(Elem::ZERO), ProjPoint::Fin(Elem::ONE), ProjPoint::Fin(lambda.0)];
    let dst: BTreeSet<ProjPoint> =
        [ProjPoint::Fin(Elem::ZERO), ProjPoint::Fin(Elem::ONE), ProjPoint::Fin(lambda_prime.0)].into_iter().collect();
    let found = g.images(&src).any(|img| img[0] == ProjPoint::Inf && img[1..].iter().copied().collect::<BTreeSet<_>>() == dst);
    found
}

/// Every multiset over `f` of size `1..=nmax` with multiplicities below `p`.
pub fn all_multisets(f: &Gf, nmax: u32) -> Vec<MultisetSpec> {
    let p = f.p();
    let elems: Vec<Elem> = f.elements().collect();
    let mut out = Vec::new();
    let mut mults = vec![0u32; elems.len()];
    fn rec(i: usize, left: u32, p: u32, elems: &[Elem], mults: &mut Vec<u32>, out: &mut Vec<MultisetSpec>) {
        if i == elems.len() {
            let (mut roots, mut ms) = (Vec::new(), Vec::new());
            for (k, &m) in mults.iter().enumerate() {
                if m > 0 {
                    roots.push(elems[k]);
                    ms.push(m);
                }
            }
            if !roots.is_empty() {
                out.push(MultisetSpec { roots, mults: ms });
            }
            return;
        }
        for m in 0..p.min(left + 1) {
            mults[i] = m;
            rec(i + 1, left - m, p, elems, mults, out);
        }
        mults[i] = 0;
    }
    rec(0, nmax, p, &elems, &mut mults, &mut out);
    out
}

/// `Σ α^j` over the multiset expanded into a list, by repeated
/// multiplication.
pub fn power_sums_naive(spec: &MultisetSpec, up_to: usize, f: &Gf) -> Vec<Elem> {
    let list: Vec<Elem> = spec
        .roots
        .iter()
        .zip(&spec.mults)
        .flat_map(|(&a, &m)| std::iter::repeat(a).take(m as usize))
        .collect();
    let mut cur = list.clone();
    let mut out = Vec::with_capacity(up_to);
    for _ in 0..up_to {
        out.push(cur.iter().fold(Elem::ZERO, |acc, &v| f.add(acc, v)));
        for (c, &a) in cur.iter_mut().zip(&list) {
            *c = f.mul(*c, a);
        }
    }
    out
}

/// Polynomials in `x` of degree `≤ deg` over `f`.
fn polys_upto(f: &Gf, deg: usize) -> Vec<Poly> {
    let q = f.order() as u64;
    (0..q.pow(deg as u32 + 1))
        .map(|mut idx| {
            let mut c = Vec::with_capacity(deg + 1);
            for _ in 0..=deg {
                c.push(Elem((idx % q) as u32));
                idx /= q;
            }
            Poly::new(c)
        })
        .collect()
}

/// Every `F ∈ F_q[x, y]` of total degree `≤ dmax` whose `y^{n_y}`
/// coefficient is 1, `n_y ≥ 1`.
pub fn monic_curves(tower: &FieldTower, dmax: u32) -> Vec<BivariatePoly> {
    let f = tower.base();
    let q = f.order() as u64;
    let mut out = Vec::new();
    for n_y in 1..=dmax {
        let slots: Vec<(u32, u32)> =
            (0..n_y).flat_map(|j| (0..=dmax - j).map(move |i| (i, j))).collect();
        for mut idx in 0..q.pow(slots.len() as u32) {
            let mut g = BivariatePoly::new();
            g.add_term_raw(0, n_y, Elem::ONE);
            for &(i, j) in &slots {
                let c = Elem((idx % q) as u32);
                idx /= q;
                if !c.is_zero() {
                    g.add_term_raw(i, j, c);
                }
            }
            out.push(g);
        }
    }
    out
}

/// `Π (y − u_i)` for linear-in-`y` factors over `ext`, as coefficients of
/// powers of `y`.
fn product(factors: &[Poly], ext: &Gf) -> Vec<Poly> {
    let mut acc = vec![Poly::one()];
    for u in factors {
        let mut next = vec![Poly::zero(); acc.len() + 1];
        for (j, c) in acc.iter().enumerate() {
            next[j + 1] = next[j + 1].add(c, ext);
            next[j] = next[j].sub(&c.mul(u, ext), ext);
        }
        acc = next;
    }
    acc
}

fn to_bivariate(ycoeffs: &[Poly], extra: Option<&[Poly]>, f: &Gf) -> Option<BivariatePoly> {
    // optional second factor given by its y-coefficients over F_q
    let coeffs: Vec<Poly> = match extra {
        None => ycoeffs.to_vec(),
        Some(g) => {
            let mut out = vec![Poly::zero(); ycoeffs.len() + g.len() - 1];
            for (a, ca) in ycoeffs.iter().enumerate() {
                for (b, cb) in g.iter().enumerate() {
                    out[a + b] = out[a + b].add(&ca.mul(cb, f), f);
                }
            }
            out
        }
    };
    let mut out = BivariatePoly::new();
    for (j, c) in coeffs.iter().enumerate() {
        for (i, &v) in c.coeffs().iter().enumerate() {
            if !f.contains(v) {
                return None;
            }
            out.add_term_raw(i as u32, j as u32, v);
        }
    }
    Some(out)
}

fn conj(u: &Poly, tower_ext: &Gf, q: u64) -> Poly {
    Poly::new(u.coeffs().iter().map(|&c| tower_ext.pow(c, q)).collect())
}

/// Every absolutely reducible monic-in-`y` `F` of total degree `≤ 3` over
/// `F_q`, built as products of factors. Such an `F` has a factor `y − u`
/// defined over `F_{q^k}`, `k ≤ 3`, and total degree adds over factors.
pub fn absolutely_reducible_cubics(tower: &FieldTower) -> Result<HashSet<BivariatePoly>> {
    let f = tower.base();
    let q = f.order() as u64;
    let mut out = HashSet::new();
    let deg = |u: &Poly| u.degree().unwrap_or(0).max(1);
    let lin = polys_upto(f, 1);
    let quad = polys_upto(f, 2);
    // (y − u)(y − v) over F_q
    for u in &lin {
        for v in &quad {
            if deg(u) + deg(v) <= 3 {
                out.insert(to_bivariate(&product(&[u.clone(), v.clone()], f), None, f).unwrap());
            }
        }
    }
    // (y − u)·G, G monic quadratic in y of total degree ≤ 2
    for u in &lin {
        let fu = product(std::slice::from_ref(u), f);
        for a in &lin {
            for b in &quad {
                let g = vec![b.clone(), a.clone(), Poly::one()];
                out.insert(to_bivariate(&fu, Some(&g), f).unwrap());
            }
        }
    }
    // conjugate pairs and triples
    for k in 2..=3u32 {
        let ext = Gf::extension(f, k)?;
        for u in polys_upto(&ext, 1) {
            if u.coeffs().iter().all(|&c| f.contains(c)) {
                continue;
            }
            let mut fs = vec![u.clone()];
            for _ in 1..k {
                let next = conj(fs.last().unwrap(), &ext, q);
                fs.push(next);
            }
            let prod = product(&fs, &ext);
            let g = to_bivariate(&prod, None, f).expect("Galois-stable product has F_q coefficients");
            out.insert(g.clone());
            if k == 2 {
                for w in &lin {
                    let fw = product(std::slice::from_ref(w), f);
                    out.insert(to_bivariate(&fw, Some(&prod), f).unwrap());
                }
            }
        }
    }
    Ok(out)
}

/// Monic-in-`y` `F` of total degree `≤ 3`, absolutely irreducible and with
/// `∂F/∂y ≠ 0`: the inputs on which curve recovery is expected to succeed.
pub fn recoverable_cubics(tower: &FieldTower) -> Result<Vec<BivariatePoly>> {
    let red = absolutely_reducible_cubics(tower)?;
    let f = tower.base();
    Ok(monic_curves(tower, 3)
        .into_iter()
        .filter(|g| !red.contains(g) && !g.derivative_y(f).is_zero())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{all_lambdas, same_configuration};
    use crate::field::build_field;

    #[test]
    fn group_sizes() {
        let t = build_field(5, 1, 1).unwrap();
        assert_eq!(pgl2(&t).len(), 120);
        let t9 = build_field(3, 2, 1).unwrap();
        assert_eq!(SemilinearGroup::new(&t9).size(), 720 * 2);
        assert_eq!(all_configurations(&t).len(), 6 * 5 * 4 * 3);
    }

    #[test]
    fn configurations_q5_agree() {
        let t = build_field(5, 1, 1).unwrap();
        let cls = configuration_classes(&t);
        let cfgs = all_configurations(&t);
        for a in &cfgs {
            for b in &cfgs {
                assert_eq!(same_configuration(&t, a, b).unwrap(), cls[a] == cls[b], "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn triple_classes_q7() {
        let t = build_field(7, 1, 1).unwrap();
        let g = SemilinearGroup::new(&t);
        let l = |v| Lambda(Elem(v));
        assert!(triple_equivalent(&g, l(2), l(4)));
        assert!(triple_equivalent(&g, l(3), l(5)));
        assert!(!triple_equivalent(&g, l(2), l(3)));
        let n = all_lambdas(&t).len();
        assert_eq!(n, 5);
    }

    #[test]
    fn multisets_and_naive_sums() {
        let f = build_field(3, 1, 1).unwrap().base().clone();
        let all = all_multisets(&f, 2);
        // sizes 1 and 2 over {0,1,2} with multiplicity ≤ 2: 3 + 6
        assert_eq!(all.len(), 9);
        let spec = MultisetSpec { roots: vec![Elem(1), Elem(2)], mults: vec![2, 1] };
        assert_eq!(power_sums_naive(&spec, 3, &f), crate::power_sums::power_sums_of(&spec, 3, &f));
    }

    #[test]
    fn reducible_list_small_cases() {
        let t = build_field(3, 1, 1).unwrap();
        let f = t.base();
        let red = absolutely_reducible_cubics(&t).unwrap();
        let mk = |terms: &[(u32, u32, i64)]| {
            let mut b = BivariatePoly::new();
            for &(i, j, c) in terms {
                b.add_term(i, j, f.from_int(c), f);
            }
            b
        };
        assert!(red.contains(&mk(&[(0, 2, 1), (0, 0, 1)]))); // y² + 1
        assert!(red.contains(&mk(&[(0, 2, 1), (2, 0, -1)]))); // y² − x²
        assert!(!red.contains(&mk(&[(0, 2, 1), (3, 0, -1), (1, 0, 1)])));
        assert!(!red.contains(&mk(&[(0, 2, 1), (1, 0, 1)])));
        // y³ − x is irreducible but inseparable
        let insep = mk(&[(0, 3, 1), (1, 0, -1)]);
        assert!(!red.contains(&insep));
        assert!(!recoverable_cubics(&t).unwrap().contains(&insep));
    }
}
