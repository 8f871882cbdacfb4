//! Univariate and bivariate polynomials over a [`Gf`], plus dense linear algebra.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::prime_factors;
use crate::error::{bail, Error, Result};
use crate::field::{Elem, Gf};

/// Dense univariate polynomial, constant term first, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    c: Vec<Elem>,
}

impl Poly {
    pub fn new(mut c: Vec<Elem>) -> Poly {
        while c.last() == Some(&Elem::ZERO) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { c: vec![Elem::ONE] }
    }

    pub fn constant(a: Elem) -> Poly {
        Poly::new(vec![a])
    }

    /// `x`.
    pub fn x() -> Poly {
        Poly { c: vec![Elem::ZERO, Elem::ONE] }
    }

    /// `a·x^k`.
    pub fn monomial(a: Elem, k: usize) -> Poly {
        let mut c = vec![Elem::ZERO; k + 1];
        c[k] = a;
        Poly::new(c)
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<Elem> {
        self.c
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.c.get(i).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Elem {
        self.c.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Elem::ONE
    }

    pub fn add(&self, o: &Poly, f: &Gf) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Poly, f: &Gf) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| f.sub_elem(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn neg(&self, f: &Gf) -> Poly {
        Poly::new(self.c.iter().map(|&a| f.neg(a)).collect())
    }

    pub fn scale(&self, a: Elem, f: &Gf) -> Poly {
        Poly::new(self.c.iter().map(|&b| f.mul(a, b)).collect())
    }

    pub fn mul(&self, o: &Poly, f: &Gf) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Poly, f: &Gf) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = f.inv(d.lead()).expect("nonzero leading coefficient");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Elem::ZERO; r.len() - dd];
        for k in (0..q.len()).rev() {
            let top = r[k + dd];
            if top.is_zero() {
                continue;
            }
            let t = f.mul(top, inv);
            q[k] = t;
            for (j, &b) in d.c.iter().enumerate() {
                r[k + j] = f.sub_elem(r[k + j], f.mul(t, b));
            }
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly, f: &Gf) -> Poly {
        self.divrem(d, f).1
    }

    pub fn make_monic(&self, f: &Gf) -> Poly {
        match f.inv(self.lead()) {
            Some(i) => self.scale(i, f),
            None => Poly::zero(),
        }
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, o: &Poly, f: &Gf) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.make_monic(f)
    }

    /// `self^e mod m`.
    pub fn powmod(&self, mut e: u64, m: &Poly, f: &Gf) -> Poly {
        let mut base = self.rem(m, f);
        let mut acc = Poly::one().rem(m, f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f).rem(m, f);
            }
            base = base.mul(&base, f).rem(m, f);
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self, f: &Gf) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| f.mul(f.from_int(i as i64), a))
                .collect(),
        )
    }

    /// Evaluation at `x`, where `x` lives in `f` (a field containing the
    /// coefficients, via the identity embedding on encodings).
    pub fn eval(&self, x: Elem, f: &Gf) -> Elem {
        self.c.iter().rev().fold(Elem::ZERO, |acc, &a| f.add(f.mul(acc, x), a))
    }

    /// Rabin's test over the coefficient field `f`.
    pub fn is_irreducible(&self, f: &Gf) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(n) => n,
        };
        let m = self.make_monic(f);
        let q = f.order() as u64;
        // x^{q^k} mod m by repeated q-th powers
        let frob = |g: &Poly| g.powmod(q, &m, f);
        let mut powers = vec![Poly::x().rem(&m, f)];
        for _ in 0..n {
            let next = frob(powers.last().unwrap());
            powers.push(next);
        }
        if powers[n] != Poly::x().rem(&m, f) {
            return false;
        }
        for l in prime_factors(n as u64) {
            let k = n / l as usize;
            let g = powers[k].sub(&Poly::x(), f).gcd(&m, f);
            if g != Poly::one() {
                return false;
            }
        }
        true
    }

    /// Roots of `self` lying in `ext` (exhaustive evaluation).
    pub fn roots_in(&self, ext: &Gf) -> Vec<Elem> {
        ext.elements().filter(|&x| self.eval(x, ext).is_zero()).collect()
    }

    pub fn to_u32(&self) -> Vec<u32> {
        self.c.iter().map(|e| e.0).collect()
    }
}

/// Monic polynomials of the given degree over `f` in canonical order:
/// lexicographic on `(c_0, ..., c_{d-1})` with each coefficient compared by
/// its canonical key.
pub fn monic_in_canonical_order(f: &Gf, degree: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = f.order() as u64;
    let total = q.checked_pow(degree as u32).unwrap_or(u64::MAX);
    (0..total).map(move |idx| {
        let mut c = vec![Elem::ZERO; degree + 1];
        let mut rest = idx;
        for i in (0..degree).rev() {
            c[i] = f.from_canonical_key((rest % q) as u32);
            rest /= q;
        }
        c[degree] = Elem::ONE;
        Poly::new(c)
    })
}

/// Smallest monic irreducible of the given degree in canonical order.
pub fn first_irreducible(f: &Arc<Gf>, degree: usize) -> Result<Poly> {
    if degree == 1 {
        return Ok(Poly::x());
    }
    monic_in_canonical_order(f, degree)
        .find(|p| p.is_irreducible(f))
        .ok_or_else(|| Error::Internal(format!("no irreducible of degree {degree} over F_{}", f.order())))
}

/// Solves `A·x = b` over `f` by Gaussian elimination. Returns one solution
/// (free variables set to zero) or `None` if inconsistent.
pub fn solve_linear(a: &[Vec<Elem>], b: &[Elem], f: &Gf) -> Option<Vec<Elem>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Elem>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row = r.clone();
            row.push(bi);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = f.inv(m[row][col]).unwrap();
        for v in m[row].iter_mut() {
            *v = f.mul(*v, inv);
        }
        for i in 0..rows {
            if i != row && !m[i][col].is_zero() {
                let t = m[i][col];
                for j in col..=cols {
                    let s = f.mul(t, m[row][j]);
                    m[i][j] = f.sub_elem(m[i][j], s);
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    if m[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Elem::ZERO; cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols];
    }
    Some(x)
}

/// Rank of a matrix over `f`.
pub fn rank(a: &[Vec<Elem>], f: &Gf) -> usize {
    let mut m = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = f.inv(m[row][col]).unwrap();
        for i in row + 1..rows {
            if !m[i][col].is_zero() {
                let t = f.mul(m[i][col], inv);
                for j in col..cols {
                    let s = f.mul(t, m[row][j]);
                    m[i][j] = f.sub_elem(m[i][j], s);
                }
            }
        }
        row += 1;
        if row == rows {
            break;
        }
    }
    row
}

/// Sparse bivariate polynomial `Σ c_{ij} x^i y^j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivariatePoly {
    terms: BTreeMap<(u32, u32), Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub i: u32,
    pub j: u32,
    pub coeff: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BivariateJson {
    pub terms: Vec<TermJson>,
}

impl BivariatePoly {
    pub fn new() -> BivariatePoly {
        BivariatePoly::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Elem)>>(it: I, f: &Gf) -> BivariatePoly {
        let mut p = BivariatePoly::new();
        for (k, c) in it {
            p.add_term(k.0, k.1, c, f);
        }
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Elem, f: &Gf) {
        let e = self.terms.entry((i, j)).or_insert(Elem::ZERO);
        *e = f.add(*e, c);
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    /// Sets a nonzero coefficient without field arithmetic.
    pub fn add_term_raw(&mut self, i: u32, j: u32, c: Elem) {
        if !c.is_zero() {
            self.terms.insert((i, j), c);
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> Elem {
        self.terms.get(&(i, j)).copied().unwrap_or(Elem::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Elem)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn deg_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    /// The coefficient of `y^{deg_y}` is the constant 1.
    pub fn is_monic_in_y(&self) -> bool {
        let Some(n) = self.deg_y() else {
            return false;
        };
        self.coeff(0, n) == Elem::ONE && self.terms.keys().all(|&(i, j)| j < n || i == 0)
    }

    /// Evaluation at `(x, y)` in `f`.
    pub fn eval(&self, x: Elem, y: Elem, f: &Gf) -> Elem {
        let mut acc = Elem::ZERO;
        for (&(i, j), &c) in &self.terms {
            let t = f.mul(c, f.mul(f.pow(x, i as u64), f.pow(y, j as u64)));
            acc = f.add(acc, t);
        }
        acc
    }

    /// `F(a, y)` as a polynomial in `y` over `f`.
    pub fn y_poly_at(&self, a: Elem, f: &Gf) -> Poly {
        let n = self.deg_y().unwrap_or(0) as usize;
        let mut c = vec![Elem::ZERO; n + 1];
        for (&(i, j), &v) in &self.terms {
            c[j as usize] = f.add(c[j as usize], f.mul(v, f.pow(a, i as u64)));
        }
        Poly::new(c)
    }

    /// `F(x, y)` as a polynomial in `y` with coefficients in `F_q[x]`.
    pub fn y_coeffs(&self) -> Vec<Poly> {
        let n = self.deg_y().unwrap_or(0) as usize;
        let mut out = vec![BTreeMap::<u32, Elem>::new(); n + 1];
        for (&(i, j), &v) in &self.terms {
            out[j as usize].insert(i, v);
        }
        out.into_iter()
            .map(|m| {
                let d = m.keys().max().copied().unwrap_or(0) as usize;
                let mut c = vec![Elem::ZERO; d + 1];
                for (i, v) in m {
                    c[i as usize] = v;
                }
                Poly::new(c)
            })
            .collect()
    }

    pub fn derivative_y(&self, f: &Gf) -> BivariatePoly {
        let mut out = BivariatePoly::new();
        for (&(i, j), &c) in &self.terms {
            if j > 0 {
                out.add_term(i, j - 1, f.mul(f.from_int(j as i64), c), f);
            }
        }
        out
    }

    /// Number of affine zeros over `f`.
    pub fn count_zeros(&self, f: &Gf) -> u64 {
        let mut n = 0;
        for x in f.elements() {
            let yp = self.y_poly_at(x, f);
            n += f.elements().filter(|&y| yp.eval(y, f).is_zero()).count() as u64;
        }
        n
    }

    /// JSON form; `enc` renders a coefficient.
    pub fn to_json(&self, enc: impl Fn(Elem) -> serde_json::Value) -> BivariateJson {
        BivariateJson {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), &c)| TermJson { i, j, coeff: enc(c) })
                .collect(),
        }
    }

    pub fn from_json(
        j: &BivariateJson,
        f: &Gf,
        dec: impl Fn(&serde_json::Value) -> Result<Elem>,
    ) -> Result<BivariatePoly> {
        let mut p = BivariatePoly::new();
        for t in &j.terms {
            let c = dec(&t.coeff)?;
            if !f.contains(c) {
                bail!(Parameter, "coefficient out of field");
            }
            p.add_term(t.i, t.j, c, f);
        }
        Ok(p)
    }

    /// Human-readable rendering, terms in descending `(j, i)` order.
    pub fn display(&self, fmt_coeff: impl Fn(Elem) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.1, b.0).cmp(&(a.1, a.0)));
        let parts: Vec<String> = keys
            .into_iter()
            .map(|(i, j)| {
                let c = self.terms[&(i, j)];
                let mono = match (i, j) {
                    (0, 0) => String::new(),
                    _ => {
                        let mut s = Vec::new();
                        if i > 0 {
                            s.push(if i == 1 { "x".to_string() } else { format!("x^{i}") });
                        }
                        if j > 0 {
                            s.push(if j == 1 { "y".to_string() } else { format!("y^{j}") });
                        }
                        s.join("*")
                    }
                };
                if mono.is_empty() {
                    fmt_coeff(c)
                } else if c == Elem::ONE {
                    mono
                } else {
                    format!("{}*{}", fmt_coeff(c), mono)
                }
            })
            .collect();
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, Gf};
    use proptest::prelude::*;

    fn trial_division_irreducible(p: &Poly, f: &Gf) -> bool {
        let n = match p.degree() {
            Some(n) if n >= 1 => n,
            _ => return false,
        };
        for d in 1..=n / 2 {
            for g in monic_in_canonical_order(f, d) {
                if p.rem(&g, f).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn rabin_matches_trial_division() {
        for (pr, r) in [(3, 1), (5, 1), (3, 2)] {
            let t = build_field(pr, r, 1).unwrap();
            let f = t.base();
            for d in 1..=4usize {
                if (f.order() as u64).pow(d as u32) > 20000 {
                    continue;
                }
                for g in monic_in_canonical_order(f, d) {
                    assert_eq!(g.is_irreducible(f), trial_division_irreducible(&g, f), "{g:?}");
                }
            }
        }
    }

    #[test]
    fn first_irreducibles() {
        let f3 = Gf::prime(3).unwrap();
        assert_eq!(first_irreducible(&f3, 2).unwrap().to_u32(), vec![1, 0, 1]);
        let f5 = Gf::prime(5).unwrap();
        assert_eq!(first_irreducible(&f5, 2).unwrap().to_u32(), vec![1, 1, 1]);
        let f5 = Gf::prime(5).unwrap();
        assert_eq!(first_irreducible(&f5, 1).unwrap().to_u32(), vec![0, 1]);
    }

    #[test]
    fn solve_and_rank() {
        let f = Gf::prime(7).unwrap();
        let e = |v: u32| Elem(v);
        let a = vec![vec![e(1), e(2)], vec![e(3), e(4)]];
        let x = solve_linear(&a, &[e(5), e(6)], &f).unwrap();
        for (row, rhs) in a.iter().zip([e(5), e(6)]) {
            let s = f.add(f.mul(row[0], x[0]), f.mul(row[1], x[1]));
            assert_eq!(s, rhs);
        }
        assert_eq!(rank(&a, &f), 2);
        let sing = vec![vec![e(1), e(2)], vec![e(2), e(4)]];
        assert_eq!(rank(&sing, &f), 1);
        assert!(solve_linear(&sing, &[e(1), e(1)], &f).is_none());
    }

    #[test]
    fn bivariate_basics() {
        let t = build_field(3, 1, 1).unwrap();
        let f = t.base();
        // y^2 - x^3 - x
        let mut c = BivariatePoly::new();
        c.add_term(0, 2, Elem(1), f);
        c.add_term(3, 0, Elem(2), f);
        c.add_term(1, 0, Elem(2), f);
        assert_eq!(c.total_degree(), Some(3));
        assert!(c.is_monic_in_y());
        c.add_term(1, 2, Elem(1), f);
        assert!(!c.is_monic_in_y());
        let mut d = BivariatePoly::new();
        d.add_term(0, 2, Elem(1), f);
        d.add_term(1, 0, Elem(1), f);
        assert!(d.is_monic_in_y());
        assert_eq!(d.count_zeros(f), 3);
        assert_eq!(d.display(|e| e.to_string()), "y^2 + x");
    }

    proptest! {
        #[test]
        fn divrem_identity(a in prop::collection::vec(0u32..9, 0..8), b in prop::collection::vec(0u32..9, 1..5)) {
            let t = build_field(3, 2, 1).unwrap();
            let f = t.base();
            let pa = Poly::new(a.into_iter().map(Elem).collect());
            let pb = Poly::new(b.into_iter().map(Elem).collect());
            prop_assume!(!pb.is_zero());
            let (q, r) = pa.divrem(&pb, f);
            prop_assert_eq!(q.mul(&pb, f).add(&r, f), pa);
            prop_assert!(r.degree().map_or(true, |d| d < pb.degree().unwrap()));
        }

        #[test]
        fn eval_is_ring_hom(a in prop::collection::vec(0u32..25, 0..6), b in prop::collection::vec(0u32..25, 0..6), x in 0u32..25) {
            let t = build_field(5, 2, 1).unwrap();
            let f = t.base();
            let pa = Poly::new(a.into_iter().map(Elem).collect());
            let pb = Poly::new(b.into_iter().map(Elem).collect());
            let x = Elem(x);
            prop_assert_eq!(pa.mul(&pb, f).eval(x, f), f.mul(pa.eval(x, f), pb.eval(x, f)));
            prop_assert_eq!(pa.add(&pb, f).eval(x, f), f.add(pa.eval(x, f), pb.eval(x, f)));
        }
    }
}
