//! Multinomial coefficients mod p and the digit conditions `C(n)`, `C(b,c)`
//! that govern which characters of the cover have p-rank one.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, modn};
use crate::error::{bail, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondParams {
    pub p: u64,
    pub r: u32,
    pub q: u64,
    /// `(q-1)/2`.
    pub k: u64,
}

impl CondParams {
    pub fn new(p: u64, r: u32) -> Result<CondParams> {
        if p % 2 == 0 || !is_prime(p) {
            bail!(Parameter, "p must be an odd prime (got {p})");
        }
        if r == 0 {
            bail!(Parameter, "r must be positive");
        }
        let q = p
            .checked_pow(r)
            .ok_or_else(|| crate::Error::Resource(format!("{p}^{r} overflows")))?;
        Ok(CondParams { p, r, q, k: (q - 1) / 2 })
    }

    /// Parameters for an odd prime power `q`.
    pub fn from_q(q: u64) -> Result<CondParams> {
        let (p, r) = prime_power(q)
            .ok_or_else(|| crate::Error::Parameter(format!("{q} is not a prime power")))?;
        CondParams::new(p, r)
    }

    fn reduce(&self, b: i64) -> u64 {
        modn(b, self.q - 1)
    }
}

/// `(p, r)` with `q = p^r`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = crate::arith::prime_factors(q);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let mut r = 0;
    let mut x = q;
    while x > 1 {
        x /= p;
        r += 1;
    }
    Some((p, r))
}

/// Odd prime powers up to `qmax`.
pub fn odd_prime_powers(qmax: u64) -> Vec<u64> {
    (3..=qmax).filter(|&q| q % 2 == 1 && prime_power(q).is_some()).collect()
}

/// `(q-1)! / (m! n! (q-1-m-n)!) mod p`, digit by digit.
///
/// The base-p digits of `q-1` are all `p-1`, so the multinomial is nonzero mod
/// p exactly when the digits of `m` and `n` add without carry, and then it is
/// the product of the digit multinomials.
pub fn alpha(m: u64, n: u64, params: &CondParams) -> Result<u64> {
    let q1 = params.q - 1;
    if m + n > q1 {
        bail!(Domain, "alpha({m},{n}) needs m+n <= q-1 = {q1}");
    }
    let p = params.p;
    let mut fact = vec![1u64; p as usize];
    for i in 1..p as usize {
        fact[i] = fact[i - 1] * i as u64 % p;
    }
    let inv = |a: u64| crate::arith::pow_mod(a, p - 2, p);
    let (mut a, mut b) = (m, n);
    let mut acc = 1u64;
    for _ in 0..params.r {
        let (da, db) = (a % p, b % p);
        if da + db > p - 1 {
            return Ok(0);
        }
        let dc = p - 1 - da - db;
        let denom = fact[da as usize] * fact[db as usize] % p * fact[dc as usize] % p;
        acc = acc * fact[p as usize - 1] % p * inv(denom) % p;
        a /= p;
        b /= p;
    }
    Ok(acc)
}

/// `C(n)`: `0 < 2n < q-1` and `(n mod p^i) < p^i/2` for `1 <= i <= r-1`.
pub fn cond_n(n: i64, params: &CondParams) -> bool {
    if n <= 0 || 2 * n as u64 >= params.q - 1 {
        return false;
    }
    let n = n as u64;
    let mut pi = 1u64;
    for _ in 1..params.r {
        pi *= params.p;
        if 2 * (n % pi) >= pi {
            return false;
        }
    }
    true
}

/// `C(b,c)`: `b' + c' < q-1` and `alpha(b',c') != 0 mod p`.
pub fn cond_bc(b: i64, c: i64, params: &CondParams) -> bool {
    let (b, c) = (params.reduce(b), params.reduce(c));
    b + c < params.q - 1 && alpha(b, c, params).map(|a| a != 0).unwrap_or(false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub q: u64,
    pub checked: u64,
    pub counterexamples: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// `C(n) <=> C(k-n)` for every n in a window covering all residues that can
/// satisfy either side, and `C(n) <=> C(n,n)` for `0 < n < q-1`.
pub fn check_condn_symmetry(params: &CondParams) -> CheckReport {
    let k = params.k as i64;
    let q1 = (params.q - 1) as i64;
    let mut report = CheckReport { q: params.q, checked: 0, counterexamples: Vec::new() };
    for n in -q1..=2 * q1 {
        report.checked += 1;
        if cond_n(n, params) != cond_n(k - n, params) {
            report.counterexamples.push(format!("C({n}) != C({})", k - n));
        }
    }
    for n in 1..q1 {
        report.checked += 1;
        if cond_n(n, params) != cond_bc(n, n, params) {
            report.counterexamples.push(format!("C({n}) != C({n},{n})"));
        }
    }
    report
}

/// Whether `b` is congruent to 0 or a power of p modulo `q-1`.
pub fn is_power_residue(b: i64, params: &CondParams) -> bool {
    let b = params.reduce(b);
    if b == 0 {
        return true;
    }
    let mut pi = 1u64;
    for _ in 0..params.r {
        if b == pi % (params.q - 1) {
            return true;
        }
        pi *= params.p;
    }
    false
}

/// Smallest `n` with `0 < 2n < q-1`, `C(n)` and `(nb mod q-1) >= (q-1)/2`.
pub fn find_witness(b: i64, params: &CondParams) -> Result<Option<u64>> {
    if is_power_residue(b, params) {
        bail!(Domain, "b = {b} is congruent to 0 or a power of p modulo q-1");
    }
    let q1 = params.q - 1;
    let b = params.reduce(b);
    Ok((1..=params.k)
        .filter(|&n| 2 * n < q1)
        .find(|&n| cond_n(n as i64, params) && 2 * (n * b % q1) >= q1))
}

pub fn check_witnesses(params: &CondParams) -> CheckReport {
    let mut report = CheckReport { q: params.q, checked: 0, counterexamples: Vec::new() };
    for b in 0..(params.q - 1) as i64 {
        if is_power_residue(b, params) {
            continue;
        }
        report.checked += 1;
        match find_witness(b, params) {
            Ok(Some(_)) => {}
            Ok(None) => report.counterexamples.push(format!("no witness for b = {b}")),
            Err(e) => report.counterexamples.push(format!("b = {b}: {e}")),
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualPowersReport {
    pub q: u64,
    /// Set when `q = 9`, where the construction is known to fail.
    pub exceptional: bool,
    pub pairs: Vec<(u64, u64)>,
    pub n: u64,
    pub counterexamples: Vec<String>,
}

/// For `b = p^{m1}`, `c = p^{m2}`, `m1 < m2 < r`, and `n = (p+1)/2`: `C(n)`
/// fails while `C(nb,nc)` holds.
pub fn check_equalpowers(params: &CondParams) -> EqualPowersReport {
    let n = (params.p + 1) / 2;
    let mut pairs = Vec::new();
    for m1 in 0..params.r {
        for m2 in m1 + 1..params.r {
            pairs.push((params.p.pow(m1), params.p.pow(m2)));
        }
    }
    let exceptional = params.q == 9;
    let mut counterexamples = Vec::new();
    for &(b, c) in &pairs {
        let cn = cond_n(n as i64, params);
        let cbc = cond_bc((n * b) as i64, (n * c) as i64, params);
        if cn || !cbc {
            counterexamples.push(format!(
                "(b,c) = ({b},{c}), n = {n}: C(n) = {cn}, C(nb,nc) = {cbc}"
            ));
        }
    }
    EqualPowersReport { q: params.q, exceptional, pairs, n, counterexamples }
}

/// All `(b,c)` coprime to `q-1` with `0 < b,c < q-1` such that
/// `C(n) <=> C(nb,nc)` for every `0 < 2n < q-1`.
///
/// The quantifier is restricted to `0 < 2n < q-1`. Over the wider window
/// `0 < n < 2q` the equivalence fails for every pair at `n = q-1`, where
/// `C(n)` is false but `C(0,0)` is true.
pub fn classify_chars(params: &CondParams) -> BTreeSet<(u64, u64)> {
    classify_chars_over(params, 1..=params.k)
}

/// Same as [`classify_chars`] with an explicit range of `n`.
pub fn classify_chars_over(
    params: &CondParams,
    ns: impl Iterator<Item = u64> + Clone,
) -> BTreeSet<(u64, u64)> {
    let q1 = params.q - 1;
    let mut out = BTreeSet::new();
    for b in 1..q1 {
        if gcd(b, q1) != 1 {
            continue;
        }
        for c in 1..q1 {
            if gcd(c, q1) != 1 {
                continue;
            }
            let ok = ns.clone().all(|n| {
                cond_n(n as i64, params) == cond_bc((n * b) as i64, (n * c) as i64, params)
            });
            if ok {
                out.insert((b, c));
            }
        }
    }
    out
}

/// Pairs predicted by the classification: `(p^i, p^i)`, plus `(1,3)` and
/// `(3,1)` when `q = 9`.
pub fn expected_classification(params: &CondParams) -> BTreeSet<(u64, u64)> {
    let mut out: BTreeSet<(u64, u64)> =
        (0..params.r).map(|i| (params.p.pow(i), params.p.pow(i))).collect();
    if params.q == 9 {
        out.insert((1, 3));
        out.insert((3, 1));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub q: u64,
    pub passing_pairs: Vec<(u64, u64)>,
    pub counterexamples: Vec<String>,
}

pub fn classify_report(params: &CondParams) -> ClassifyReport {
    let got = classify_chars(params);
    let want = expected_classification(params);
    let mut counterexamples = Vec::new();
    for x in got.symmetric_difference(&want) {
        counterexamples.push(format!("({},{}) in exactly one of found/expected", x.0, x.1));
    }
    ClassifyReport { q: params.q, passing_pairs: got.into_iter().collect(), counterexamples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::{ToPrimitive, Zero};
    use proptest::prelude::*;

    fn factorial(n: u64) -> BigUint {
        (1..=n).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(i))
    }

    fn alpha_exact(m: u64, n: u64, q: u64, p: u64) -> u64 {
        let num = factorial(q - 1);
        let den = factorial(m) * factorial(n) * factorial(q - 1 - m - n);
        assert!((&num % &den).is_zero());
        ((num / den) % BigUint::from(p)).to_u64().unwrap()
    }

    fn binom_exact(n: u64, k: u64) -> BigUint {
        factorial(n) / (factorial(k) * factorial(n - k))
    }

    #[test]
    fn alpha_matches_factorial_oracle() {
        for q in [3u64, 5, 7, 9, 11, 25, 27] {
            let pr = CondParams::from_q(q).unwrap();
            for m in 0..q {
                for n in 0..q - m {
                    assert_eq!(alpha(m, n, &pr).unwrap(), alpha_exact(m, n, q, pr.p), "q={q} {m},{n}");
                }
            }
        }
    }

    #[test]
    fn alpha_is_plus_minus_binomial() {
        for q in [5u64, 9, 25, 27] {
            let pr = CondParams::from_q(q).unwrap();
            for m in 0..q {
                for n in 0..q - m {
                    let a = alpha(m, n, &pr).unwrap();
                    let b = (binom_exact(m + n, m) % BigUint::from(pr.p)).to_u64().unwrap();
                    assert!(a == b || a == (pr.p - b) % pr.p, "q={q} {m},{n}");
                }
            }
        }
    }

    #[test]
    fn alpha_examples() {
        for q in [5u64, 7, 9, 11, 25] {
            let pr = CondParams::from_q(q).unwrap();
            assert_eq!(alpha(1, 1, &pr).unwrap(), 2 % pr.p);
            assert_eq!(alpha(0, 0, &pr).unwrap(), 1);
            assert_eq!(alpha(1, 2, &pr).unwrap(), modn(-3, pr.p));
        }
        let pr = CondParams::from_q(9).unwrap();
        assert!(alpha(5, 5, &pr).is_err());
    }

    #[test]
    fn cond_examples() {
        let pr = CondParams::from_q(9).unwrap();
        assert!(cond_n(1, &pr));
        assert!(!cond_n(2, &pr));
        assert!(!cond_n(0, &pr));
        assert!(cond_bc(1, 1, &pr));
        assert!(!cond_bc(2, 2, &pr));
        assert!(!cond_bc(3, 5, &pr));
    }

    #[test]
    fn symmetry_small() {
        for q in [5u64, 9, 27] {
            let rep = check_condn_symmetry(&CondParams::from_q(q).unwrap());
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn witnesses() {
        let pr = CondParams::from_q(7).unwrap();
        assert_eq!(find_witness(3, &pr).unwrap(), Some(1));
        assert!(find_witness(1, &pr).is_err());
        let pr = CondParams::from_q(9).unwrap();
        let n = find_witness(5, &pr).unwrap().unwrap();
        assert!([1, 3].contains(&n));
        assert!(check_witnesses(&CondParams::from_q(25).unwrap()).passed());
    }

    #[test]
    fn equalpowers_examples() {
        let pr = CondParams::from_q(25).unwrap();
        assert!(!cond_n(3, &pr));
        assert!(cond_bc(3, 15, &pr));
        assert!(check_equalpowers(&pr).counterexamples.is_empty());
        let pr = CondParams::from_q(27).unwrap();
        assert!(!cond_n(2, &pr) && cond_bc(2, 6, &pr));
        assert!(check_equalpowers(&CondParams::from_q(7).unwrap()).pairs.is_empty());
        let r9 = check_equalpowers(&CondParams::from_q(9).unwrap());
        assert!(r9.exceptional && !r9.counterexamples.is_empty());
    }

    #[test]
    fn classification_small() {
        let set = |v: &[(u64, u64)]| v.iter().copied().collect::<BTreeSet<_>>();
        assert_eq!(classify_chars(&CondParams::from_q(7).unwrap()), set(&[(1, 1)]));
        assert_eq!(
            classify_chars(&CondParams::from_q(9).unwrap()),
            set(&[(1, 1), (1, 3), (3, 1), (3, 3)])
        );
        assert_eq!(classify_chars(&CondParams::from_q(25).unwrap()), set(&[(1, 1), (5, 5)]));
    }

    #[test]
    fn literal_window_is_empty() {
        for q in [5u64, 7, 9, 25] {
            let pr = CondParams::from_q(q).unwrap();
            assert!(classify_chars_over(&pr, 1..2 * q).is_empty());
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(12), None);
        assert_eq!(odd_prime_powers(13), vec![3, 5, 7, 9, 11, 13]);
    }

    proptest! {
        #[test]
        fn cond_n_periodic_reduction(n in -200i64..200) {
            let pr = CondParams::from_q(27).unwrap();
            if cond_n(n, &pr) {
                prop_assert!(n > 0 && (2 * n as u64) < pr.q - 1);
            }
        }
    }
}
