//! Recovering a multiset of field elements from its power sums in positive
//! characteristic, through the rational function `−G′/G` where
//! `G = Π (1 − α_i T)^{n_i}`.

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::field::{Elem, Gf};
use crate::poly::{solve_linear, Poly};

/// Distinct roots with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultisetSpec {
    pub roots: Vec<Elem>,
    pub mults: Vec<u32>,
}

impl MultisetSpec {
    /// Sorted by root encoding; rejects repeated roots and multiplicities
    /// outside `1..p`.
    pub fn new(roots: Vec<Elem>, mults: Vec<u32>, p: u32) -> Result<MultisetSpec> {
        if roots.len() != mults.len() {
            bail!(Parameter, "roots and multiplicities differ in length");
        }
        if let Some(&m) = mults.iter().find(|&&m| m == 0 || m >= p) {
            bail!(Parameter, "multiplicity {m} is outside 1..{p}");
        }
        let mut pairs: Vec<_> = roots.into_iter().zip(mults).collect();
        pairs.sort();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            bail!(Parameter, "roots must be distinct");
        }
        let (roots, mults) = pairs.into_iter().unzip();
        Ok(MultisetSpec { roots, mults })
    }

    pub fn size(&self) -> u32 {
        self.mults.iter().sum()
    }

    /// `e_1, …, e_n` with `Π (1 − α_i T)^{n_i} = Σ (−1)^k e_k T^k`.
    pub fn elementary(&self, f: &Gf) -> Vec<Elem> {
        let mut g = Poly::one();
        for (&a, &m) in self.roots.iter().zip(&self.mults) {
            let lin = Poly::new(vec![Elem::ONE, f.neg(a)]);
            for _ in 0..m {
                g = g.mul(&lin, f);
            }
        }
        (1..=self.size() as usize)
            .map(|k| {
                let c = g.coeff(k);
                if k % 2 == 1 {
                    f.neg(c)
                } else {
                    c
                }
            })
            .collect()
    }
}

/// `p_j = Σ n_i α_i^j` for `j = 1..=up_to`.
pub fn power_sums_of(spec: &MultisetSpec, up_to: usize, f: &Gf) -> Vec<Elem> {
    (1..=up_to as u64)
        .map(|j| {
            spec.roots.iter().zip(&spec.mults).fold(Elem::ZERO, |acc, (&a, &m)| {
                f.add(acc, f.mul(f.from_int(m as i64), f.pow(a, j)))
            })
        })
        .collect()
}

/// Newton's identities `k e_k = Σ_{i=1}^{k} (−1)^{i−1} e_{k−i} p_i` for every
/// `k` covered by `ps`, with `e_0 = 1` and `e_k = 0` for `k > n`.
pub fn newton_check(e: &[Elem], ps: &[Elem], f: &Gf) -> bool {
    let ek = |k: usize| -> Elem {
        match k {
            0 => Elem::ONE,
            k if k <= e.len() => e[k - 1],
            _ => Elem::ZERO,
        }
    };
    (1..=ps.len()).all(|k| {
        let mut rhs = Elem::ZERO;
        for i in 1..=k {
            let t = f.mul(ek(k - i), ps[i - 1]);
            rhs = if i % 2 == 1 { f.add(rhs, t) } else { f.sub_elem(rhs, t) };
        }
        f.mul(f.from_int(k as i64), ek(k)) == rhs
    })
}

/// Finds `A`, `B` with `deg A ≤ d_a`, `deg B ≤ d_b`, `B(0) = 1` and
/// `A ≡ B · Σ s_j T^j (mod T^{L+1})`, taking the smallest possible `deg B`.
pub fn rational_from_series(s: &[Elem], d_a: usize, d_b: usize, f: &Gf) -> Result<Option<(Poly, Poly)>> {
    if s.len() < d_a + d_b + 1 {
        bail!(Parameter, "need at least {} series terms, got {}", d_a + d_b + 1, s.len());
    }
    let sj = |k: isize| -> Elem {
        if k < 0 {
            Elem::ZERO
        } else {
            s[k as usize]
        }
    };
    for t in 0..=d_b {
        // unknowns b_1..b_t; equations for coefficients k > d_a of B·S vanish
        let rows: Vec<usize> = (d_a + 1..s.len()).collect();
        let b = if t == 0 {
            if rows.iter().all(|&k| s[k].is_zero()) {
                Some(Vec::new())
            } else {
                None
            }
        } else {
            let a: Vec<Vec<Elem>> = rows
                .iter()
                .map(|&k| (1..=t).map(|j| sj(k as isize - j as isize)).collect())
                .collect();
            let rhs: Vec<Elem> = rows.iter().map(|&k| f.neg(s[k])).collect();
            solve_linear(&a, &rhs, f)
        };
        let Some(b) = b else {
            continue;
        };
        let mut bc = vec![Elem::ONE];
        bc.extend(b);
        let bp = Poly::new(bc);
        let ac: Vec<Elem> = (0..=d_a)
            .map(|k| {
                (0..=t.min(k)).fold(Elem::ZERO, |acc, j| f.add(acc, f.mul(bp.coeff(j), s[k - j])))
            })
            .collect();
        return Ok(Some((Poly::new(ac), bp)));
    }
    Ok(None)
}

/// The multiset of size `n` (multiplicities below `p`) whose power sums are
/// `ps = (p_1, p_2, …)`. Roots are searched in `f`.
///
/// When two multisets differ only by moving `p` copies between roots their
/// power sums coincide; the in-range one is returned, and data with no
/// in-range preimage is reported as inconsistent.
pub fn reconstruct(ps: &[Elem], n: u32, f: &Gf) -> Result<MultisetSpec> {
    let p = f.p();
    if ps.is_empty() {
        bail!(Parameter, "no power sums supplied");
    }
    let zero_only = |n0: u32| -> Result<MultisetSpec> {
        if n0 == 0 {
            return Ok(MultisetSpec { roots: vec![], mults: vec![] });
        }
        if n0 >= p {
            bail!(Inconsistent, "{n0} copies of 0 exceed the multiplicity bound {p}");
        }
        MultisetSpec::new(vec![Elem::ZERO], vec![n0], p)
    };
    if ps.iter().all(|x| x.is_zero()) {
        return zero_only(n);
    }
    let l = ps.len();
    for s in 1..=n as usize {
        if 2 * s > l {
            break;
        }
        let Some((a, b)) = rational_from_series(ps, s - 1, s, f)? else {
            continue;
        };
        let db = b.degree().unwrap_or(0);
        let inv_roots: Vec<Elem> = b.roots_in(f);
        if inv_roots.len() != db {
            bail!(Inconsistent, "denominator of degree {db} has {} roots in F_{}", inv_roots.len(), f.order());
        }
        let bd = b.derivative(f);
        let mut roots = Vec::new();
        let mut mults = Vec::new();
        for beta in inv_roots {
            let res = f
                .div(a.eval(beta, f), bd.eval(beta, f))
                .ok_or_else(|| Error::Inconsistent("repeated denominator root".into()))?;
            let ni = f.neg(res);
            if ni.0 >= p || ni.is_zero() {
                bail!(Inconsistent, "residue does not give a multiplicity in 1..{p}");
            }
            roots.push(f.inv(beta).unwrap());
            mults.push(ni.0);
        }
        let total: u32 = mults.iter().sum();
        if total > n {
            bail!(Inconsistent, "multiplicities add to {total} > n = {n}");
        }
        if total < n {
            let n0 = n - total;
            if n0 >= p {
                bail!(Inconsistent, "{n0} copies of 0 exceed the multiplicity bound {p}");
            }
            roots.push(Elem::ZERO);
            mults.push(n0);
        }
        let spec = MultisetSpec::new(roots, mults, p)?;
        if power_sums_of(&spec, l, f) != ps {
            bail!(Inconsistent, "reconstructed multiset does not reproduce the power sums");
        }
        return Ok(spec);
    }
    Err(Error::Inconsistent(format!("no rational function of type (s-1, s) with s <= {n} fits")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use proptest::prelude::*;

    fn f5() -> std::sync::Arc<Gf> {
        build_field(5, 1, 1).unwrap().base().clone()
    }

    #[test]
    fn power_sum_examples() {
        let f = f5();
        let spec = MultisetSpec::new(vec![Elem(2), Elem(3)], vec![2, 1], 5).unwrap();
        assert_eq!(power_sums_of(&spec, 4, &f), vec![Elem(2), Elem(2), Elem(3), Elem(3)]);
        let single = MultisetSpec::new(vec![Elem(3)], vec![1], 5).unwrap();
        assert_eq!(power_sums_of(&single, 3, &f), vec![Elem(3), Elem(4), Elem(2)]);
    }

    #[test]
    fn reconstruct_example() {
        let f = f5();
        let ps = vec![Elem(2), Elem(2), Elem(3), Elem(3)];
        let spec = reconstruct(&ps, 3, &f).unwrap();
        assert_eq!(spec.roots, vec![Elem(2), Elem(3)]);
        assert_eq!(spec.mults, vec![2, 1]);
        assert_eq!(spec.elementary(&f), vec![Elem(2), Elem(1), Elem(2)]);
        assert!(newton_check(&spec.elementary(&f), &ps, &f));
    }

    #[test]
    fn reconstruct_with_zero_root() {
        let f = f5();
        let spec = MultisetSpec::new(vec![Elem(0), Elem(4)], vec![3, 1], 5).unwrap();
        let ps = power_sums_of(&spec, 4, &f);
        assert_eq!(reconstruct(&ps, 4, &f).unwrap(), spec);
        let zeros = MultisetSpec::new(vec![Elem(0)], vec![2], 5).unwrap();
        assert_eq!(reconstruct(&power_sums_of(&zeros, 4, &f), 2, &f).unwrap(), zeros);
    }

    #[test]
    fn newton_char2_example() {
        let f = Gf::prime(2).unwrap();
        // p_3 = e_1 p_2 − e_2 p_1 for two variables
        for x1 in 0..2 {
            for x2 in 0..2 {
                let (a, b) = (Elem(x1), Elem(x2));
                let e = vec![f.add(a, b), f.mul(a, b)];
                let ps: Vec<Elem> = (1..=3).map(|k| f.add(f.pow(a, k), f.pow(b, k))).collect();
                assert!(newton_check(&e, &ps, &f));
                assert_eq!(ps[2], f.sub_elem(f.mul(e[0], ps[1]), f.mul(e[1], ps[0])));
            }
        }
    }

    #[test]
    fn rational_series_examples() {
        let f = f5();
        let spec = MultisetSpec::new(vec![Elem(2), Elem(3)], vec![2, 1], 5).unwrap();
        let ps = power_sums_of(&spec, 6, &f);
        let (_, b) = rational_from_series(&ps, 1, 2, &f).unwrap().unwrap();
        let mut inv_roots = b.roots_in(&f);
        inv_roots.sort();
        assert_eq!(inv_roots, vec![Elem(2), Elem(3)]);
        let zero = vec![Elem::ZERO; 5];
        let (a, b) = rational_from_series(&zero, 1, 2, &f).unwrap().unwrap();
        assert!(a.is_zero());
        assert_eq!(b, Poly::one());
        let poly = vec![Elem(1), Elem(2), Elem(0), Elem(0), Elem(0)];
        let (a, b) = rational_from_series(&poly, 1, 2, &f).unwrap().unwrap();
        assert_eq!(b, Poly::one());
        assert_eq!(a.to_u32(), vec![1, 2]);
    }

    #[test]
    fn out_of_range_multiplicities_collide() {
        let f = f5();
        let a = MultisetSpec { roots: vec![Elem(1), Elem(2)], mults: vec![6, 1] };
        let b = MultisetSpec { roots: vec![Elem(1), Elem(2)], mults: vec![1, 6] };
        assert_eq!(power_sums_of(&a, 8, &f), power_sums_of(&b, 8, &f));
        assert!(reconstruct(&power_sums_of(&a, 8, &f), 7, &f).is_err());
        assert!(MultisetSpec::new(vec![Elem(1)], vec![5], 5).is_err());
    }

    proptest! {
        #[test]
        fn periodicity(roots in prop::collection::btree_set(0u32..9, 1..4), m in 1u32..3) {
            let t = build_field(3, 2, 1).unwrap();
            let f = t.base();
            let rs: Vec<Elem> = roots.into_iter().map(Elem).collect();
            let spec = MultisetSpec::new(rs.clone(), vec![m; rs.len()], 3).unwrap();
            let ps = power_sums_of(&spec, 24, f);
            for i in 0..16 {
                prop_assert_eq!(ps[i], ps[i + 8]);
            }
            prop_assert!(newton_check(&spec.elementary(f), &ps, f));
        }
    }
}
