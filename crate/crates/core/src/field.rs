//! Finite fields and the tower `F_p ⊂ F_q ⊂ F_{q^m}`.
//!
//! Every level is a [`Gf`]: a field stored with exp/log tables and a
//! little-endian integer encoding. An element of an extension of degree `k`
//! over a coefficient field `S` with coordinates `c_0, ..., c_{k-1}` is encoded
//! as `Σ enc(c_i) · |S|^i`. Flattening this recursively gives the base-`p`
//! digits of the element over the prime field, so
//!
//! * addition is digit-wise addition modulo `p` at every level, and
//! * the subfield embeddings `F_p → F_q → F_{q^m}` are the identity on
//!   encodings (an element of `F_q` has encoding `< q` inside `F_{q^m}`).
//!
//! Moduli and generators are chosen deterministically: the modulus is the
//! smallest monic irreducible in canonical order and the generator is the
//! smallest element of full multiplicative order. The canonical order compares
//! coordinate vectors lexicographically starting from the constant coordinate.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, pow_mod, prime_factors};
use crate::error::{bail, Error, Result};
use crate::poly::Poly;

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 24;

/// Encoded element of some [`Gf`]. Only meaningful together with its field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite field with table-driven multiplication.
pub struct Gf {
    p: u32,
    order: u32,
    abs_degree: u32,
    degree: u32,
    sub: Option<Arc<Gf>>,
    modulus: Poly,
    generator: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gf")
            .field("p", &self.p)
            .field("order", &self.order)
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.order == other.order
            && self.modulus == other.modulus
            && self.sub == other.sub
    }
}

impl Gf {
    /// The prime field `F_p`. Accepts any prime, including 2.
    pub fn prime(p: u32) -> Result<Arc<Gf>> {
        if !is_prime(p as u64) {
            bail!(Parameter, "p = {p} is not prime");
        }
        let n = p as u64 - 1;
        let factors = prime_factors(n);
        let generator = (1..p as u64)
            .find(|&g| p == 2 || factors.iter().all(|&l| pow_mod(g, n / l, p as u64) != 1))
            .ok_or_else(|| Error::Internal(format!("no primitive root mod {p}")))?;
        let mut exp = Vec::with_capacity(n as usize);
        let mut x = 1u64;
        for _ in 0..n {
            exp.push(x as u32);
            x = x * generator % p as u64;
        }
        Ok(Arc::new(Gf::from_tables(
            p,
            p,
            1,
            1,
            None,
            Poly::zero(),
            Elem(generator as u32),
            exp,
        )))
    }

    /// Extension of `sub` of the given degree, modulo the smallest monic
    /// irreducible polynomial in canonical order.
    pub fn extension(sub: &Arc<Gf>, degree: u32) -> Result<Arc<Gf>> {
        if degree == 0 {
            bail!(Parameter, "extension degree must be positive");
        }
        let order = (sub.order as u64)
            .checked_pow(degree)
            .filter(|&o| o <= MAX_FIELD_ORDER)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "field of order {}^{} exceeds the table cap {}",
                    sub.order, degree, MAX_FIELD_ORDER
                ))
            })?;
        let modulus = crate::poly::first_irreducible(sub, degree as usize)?;
        let proto = Proto { sub, modulus: &modulus, degree: degree as usize };

        let n = order - 1;
        let factors = prime_factors(n);
        let mut generator = None;
        for key in 1..order {
            let cand = proto.from_canonical_key(key as u32);
            if cand == Elem::ZERO {
                continue;
            }
            if factors.iter().all(|&l| proto.pow(cand, n / l) != Elem::ONE) {
                generator = Some(cand);
                break;
            }
        }
        let generator = generator
            .ok_or_else(|| Error::Internal(format!("no generator for field of order {order}")))?;
        let mut exp = Vec::with_capacity(n as usize);
        let mut x = Elem::ONE;
        for _ in 0..n {
            exp.push(x.0);
            x = proto.mul(x, generator);
        }
        if x != Elem::ONE {
            bail!(Internal, "generator order check failed for field of order {order}");
        }
        Ok(Arc::new(Gf::from_tables(
            sub.p,
            order as u32,
            sub.abs_degree * degree,
            degree,
            Some(Arc::clone(sub)),
            modulus,
            generator,
            exp,
        )))
    }

    #[allow(clippy::too_many_arguments)]
    fn from_tables(
        p: u32,
        order: u32,
        abs_degree: u32,
        degree: u32,
        sub: Option<Arc<Gf>>,
        modulus: Poly,
        generator: Elem,
        exp: Vec<u32>,
    ) -> Gf {
        let mut log = vec![u32::MAX; order as usize];
        for (k, &e) in exp.iter().enumerate() {
            log[e as usize] = k as u32;
        }
        Gf { p, order, abs_degree, degree, sub, modulus, generator, exp, log }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Degree over the prime field.
    pub fn abs_degree(&self) -> u32 {
        self.abs_degree
    }

    /// Degree over the coefficient field (1 for a prime field).
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn sub(&self) -> Option<&Arc<Gf>> {
        self.sub.as_ref()
    }

    /// Defining polynomial over the coefficient field (zero for a prime field).
    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn is_prime_field(&self) -> bool {
        self.sub.is_none()
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(Elem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Elem> {
        (1..self.order).map(Elem)
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.order
    }

    /// Image of an integer under `Z → F_p ⊂ self`.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p;
        if self.abs_degree == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 || y > 0 {
            let mut d = x % p + y % p;
            if d >= p {
                d -= p;
            }
            out += d * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        Elem(out)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.p;
        if self.abs_degree == 1 {
            return Elem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 {
            let d = x % p;
            if d != 0 {
                out += (p - d) * place;
            }
            x /= p;
            place = place.wrapping_mul(p);
        }
        Elem(out)
    }

    pub fn sub_elem(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let n = self.order - 1;
        let s = self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64;
        Elem(self.exp[(s % n as u64) as usize])
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return None;
        }
        let n = self.order - 1;
        let l = self.log[a.0 as usize];
        Some(Elem(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        let n = (self.order - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Elem(self.exp[((l as u128 * (e % n) as u128) % n as u128) as usize])
    }

    /// `a^k` for a signed exponent; `None` for a negative power of zero.
    pub fn pow_signed(&self, a: Elem, k: i64) -> Option<Elem> {
        if k >= 0 {
            Some(self.pow(a, k as u64))
        } else {
            self.inv(a).map(|ai| self.pow(ai, k.unsigned_abs()))
        }
    }

    /// `a ↦ a^{p^k}`.
    pub fn frobenius(&self, a: Elem, k: u32) -> Elem {
        if a.0 == 0 {
            return a;
        }
        let n = (self.order - 1) as u64;
        let pk = pow_mod(self.p as u64, k as u64, n);
        let l = self.log[a.0 as usize] as u64;
        Elem(self.exp[(l * pk % n) as usize])
    }

    /// Discrete logarithm to the base of this field's generator.
    pub fn log(&self, a: Elem) -> Option<u32> {
        if a.0 == 0 || a.0 >= self.order {
            None
        } else {
            Some(self.log[a.0 as usize])
        }
    }

    /// `generator^k`.
    pub fn exp(&self, k: i64) -> Elem {
        let n = (self.order - 1) as i64;
        Elem(self.exp[k.rem_euclid(n) as usize])
    }

    pub fn multiplicative_order(&self, a: Elem) -> Option<u64> {
        let l = self.log(a)? as u64;
        let n = (self.order - 1) as u64;
        Some(n / crate::arith::gcd(l, n))
    }

    /// Base-`p` digits of the encoding, least significant first.
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        crate::arith::digits(a.0 as u64, self.p as u64, self.abs_degree as usize)
            .into_iter()
            .map(|d| d as u32)
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<Elem> {
        if digits.len() > self.abs_degree as usize || digits.iter().any(|&d| d >= self.p) {
            bail!(Parameter, "digits {digits:?} do not encode an element of F_{}", self.order);
        }
        Ok(Elem(digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)))
    }

    /// Coordinates over the coefficient field.
    pub fn coords(&self, a: Elem) -> Vec<Elem> {
        match &self.sub {
            None => vec![a],
            Some(s) => crate::arith::digits(a.0 as u64, s.order as u64, self.degree as usize)
                .into_iter()
                .map(|d| Elem(d as u32))
                .collect(),
        }
    }

    pub fn from_coords(&self, coords: &[Elem]) -> Result<Elem> {
        let base = self.sub.as_ref().map_or(self.order, |s| s.order);
        if coords.len() > self.degree as usize || coords.iter().any(|c| c.0 >= base) {
            bail!(Parameter, "coordinates do not encode an element of F_{}", self.order);
        }
        Ok(Elem(coords.iter().rev().fold(0, |acc, c| acc * base + c.0)))
    }

    /// Position of `a` in the canonical order.
    pub fn canonical_key(&self, a: Elem) -> u32 {
        match &self.sub {
            None => a.0,
            Some(s) => self.coords(a).iter().fold(0, |acc, &c| acc * s.order + s.canonical_key(c)),
        }
    }

    pub fn from_canonical_key(&self, key: u32) -> Elem {
        match &self.sub {
            None => Elem(key),
            Some(s) => {
                let k = self.degree as usize;
                let mut coords = vec![Elem::ZERO; k];
                let mut rest = key;
                for i in (0..k).rev() {
                    coords[i] = s.from_canonical_key(rest % s.order);
                    rest /= s.order;
                }
                Elem(coords.iter().rev().fold(0, |acc, c| acc * s.order + c.0))
            }
        }
    }

    /// Whether `a` lies in the subfield with `sub_order` elements.
    pub fn in_subfield(&self, a: Elem, sub_order: u32) -> bool {
        self.pow(a, sub_order as u64) == a
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, it: I) -> Elem {
        it.into_iter().fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }

    pub fn product<I: IntoIterator<Item = Elem>>(&self, it: I) -> Elem {
        it.into_iter().fold(Elem::ONE, |acc, x| self.mul(acc, x))
    }
}

/// Arithmetic in `S[u]/(modulus)` before tables exist.
struct Proto<'a> {
    sub: &'a Gf,
    modulus: &'a Poly,
    degree: usize,
}

impl Proto<'_> {
    fn coords(&self, a: Elem) -> Vec<Elem> {
        crate::arith::digits(a.0 as u64, self.sub.order as u64, self.degree)
            .into_iter()
            .map(|d| Elem(d as u32))
            .collect()
    }

    fn encode(&self, coords: &[Elem]) -> Elem {
        Elem(coords.iter().rev().fold(0, |acc, c| acc * self.sub.order + c.0))
    }

    fn mul(&self, a: Elem, b: Elem) -> Elem {
        let s = self.sub;
        let prod = Poly::new(self.coords(a)).mul(&Poly::new(self.coords(b)), s);
        let r = prod.rem(self.modulus, s);
        let mut c = r.into_coeffs();
        c.resize(self.degree, Elem::ZERO);
        self.encode(&c)
    }

    fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn from_canonical_key(&self, key: u32) -> Elem {
        let s = self.sub;
        let mut coords = vec![Elem::ZERO; self.degree];
        let mut rest = key;
        for i in (0..self.degree).rev() {
            coords[i] = s.from_canonical_key(rest % s.order);
            rest /= s.order;
        }
        self.encode(&coords)
    }
}

/// Tower level of an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Base,
    Mid,
    Top,
}

/// Element of `μ_{q-1}(F_q)` recorded by its exponent on the fixed generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MuElement(pub u32);

/// The deterministic tower `F_p ⊂ F_q ⊂ F_{q^m}`.
#[derive(Clone, Debug)]
pub struct FieldTower {
    prime: Arc<Gf>,
    base: Arc<Gf>,
    top: Arc<Gf>,
    r: u32,
    m: u32,
}

/// Builds the tower for odd `p`, `q = p^r` and `F_{q^m}` as a degree-`m`
/// extension of `F_q`.
pub fn build_field(p: u32, r: u32, m: u32) -> Result<FieldTower> {
    if p % 2 == 0 {
        bail!(Parameter, "p must be odd (got {p})");
    }
    if !is_prime(p as u64) {
        bail!(Parameter, "p = {p} is not prime");
    }
    if r == 0 || m == 0 {
        bail!(Parameter, "r and m must be positive (got r = {r}, m = {m})");
    }
    let prime = Gf::prime(p)?;
    let base = Gf::extension(&prime, r)?;
    let top = Gf::extension(&base, m)?;
    Ok(FieldTower { prime, base, top, r, m })
}

impl FieldTower {
    /// Same tower with a different top degree, reusing `F_p` and `F_q`.
    pub fn with_top_degree(&self, m: u32) -> Result<FieldTower> {
        if m == 0 {
            bail!(Parameter, "m must be positive");
        }
        if m == self.m {
            return Ok(self.clone());
        }
        let top = Gf::extension(&self.base, m)?;
        Ok(FieldTower { prime: Arc::clone(&self.prime), base: Arc::clone(&self.base), top, r: self.r, m })
    }

    pub fn p(&self) -> u32 {
        self.prime.p()
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.base.order()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn prime(&self) -> &Arc<Gf> {
        &self.prime
    }

    /// `F_q`.
    pub fn base(&self) -> &Arc<Gf> {
        &self.base
    }

    /// `F_{q^m}`.
    pub fn top(&self) -> &Arc<Gf> {
        &self.top
    }

    pub fn field(&self, level: Level) -> &Arc<Gf> {
        match level {
            Level::Base => &self.prime,
            Level::Mid => &self.base,
            Level::Top => &self.top,
        }
    }

    /// `x ↦ x^p` on `F_{q^m}`.
    pub fn frobenius_p(&self, x: Elem) -> Elem {
        self.top.frobenius(x, 1)
    }

    /// `x ↦ x^q` on `F_{q^m}`.
    pub fn frobenius_q(&self, x: Elem) -> Elem {
        self.top.frobenius(x, self.r)
    }

    /// `Σ_{i < rm} x^{p^i}`, an element of `F_p`.
    pub fn abs_trace(&self, x: Elem) -> Elem {
        let f = &self.top;
        let mut acc = Elem::ZERO;
        let mut y = x;
        for _ in 0..f.abs_degree() {
            acc = f.add(acc, y);
            y = f.frobenius(y, 1);
        }
        acc
    }

    /// `Σ_{i < m} x^{q^i}`, an element of `F_q`.
    pub fn rel_trace(&self, x: Elem) -> Elem {
        let f = &self.top;
        let mut acc = Elem::ZERO;
        let mut y = x;
        for _ in 0..self.m {
            acc = f.add(acc, y);
            y = self.frobenius_q(y);
        }
        acc
    }

    /// `Π_{i < m} x^{q^i}`, an element of `F_q`.
    pub fn norm_to_q(&self, x: Elem) -> Elem {
        let f = &self.top;
        let mut acc = Elem::ONE;
        let mut y = x;
        for _ in 0..self.m {
            acc = f.mul(acc, y);
            y = self.frobenius_q(y);
        }
        acc
    }

    /// Trace `F_q → F_p`.
    pub fn base_trace(&self, x: Elem) -> Elem {
        let f = &self.base;
        let mut acc = Elem::ZERO;
        let mut y = x;
        for _ in 0..self.r {
            acc = f.add(acc, y);
            y = f.frobenius(y, 1);
        }
        acc
    }

    /// Exponent of a nonzero `x ∈ F_q` on `generator_q`.
    pub fn discrete_log(&self, x: Elem) -> Result<MuElement> {
        if x.is_zero() {
            bail!(Domain, "discrete_log(0) is undefined");
        }
        self.base
            .log(x)
            .map(MuElement)
            .ok_or_else(|| Error::Domain(format!("{x} is not an element of F_{}", self.q())))
    }

    pub fn enumerate(&self, level: Level) -> impl Iterator<Item = Elem> {
        self.field(level).elements()
    }

    pub fn params(&self) -> FieldParams {
        let coeff_digits = |g: &Gf, e: Elem| g.digits(e);
        FieldParams {
            p: self.p(),
            r: self.r,
            m: self.m,
            q: self.q(),
            modulus_q: self.base.modulus().coeffs().iter().map(|c| c.0).collect(),
            modulus_top: self
                .top
                .modulus()
                .coeffs()
                .iter()
                .map(|&c| coeff_digits(&self.base, c))
                .collect(),
            generator_q: self.base.digits(self.base.generator()),
            generator_top: self
                .top
                .coords(self.top.generator())
                .into_iter()
                .map(|c| self.base.digits(c))
                .collect(),
        }
    }

    /// Canonical JSON encoding: outer array over `F_q`-coordinates, inner
    /// arrays of `F_p` digits.
    pub fn encode(&self, level: Level, x: Elem) -> Vec<Vec<u32>> {
        match level {
            Level::Top => self.top.coords(x).into_iter().map(|c| self.base.digits(c)).collect(),
            Level::Mid | Level::Base => vec![self.base.digits(x)],
        }
    }

    pub fn decode(&self, level: Level, enc: &[Vec<u32>]) -> Result<Elem> {
        let coords = enc
            .iter()
            .map(|d| self.base.from_digits(d))
            .collect::<Result<Vec<_>>>()?;
        let x = match level {
            Level::Top => self.top.from_coords(&coords)?,
            Level::Mid | Level::Base => {
                if coords.len() != 1 {
                    bail!(Parameter, "an F_q element has exactly one coordinate block");
                }
                coords[0]
            }
        };
        if level == Level::Base && x.0 >= self.p() {
            bail!(Parameter, "{x} is not in F_p");
        }
        Ok(x)
    }
}

/// Serializable description of a tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldParams {
    pub p: u32,
    pub r: u32,
    pub m: u32,
    pub q: u32,
    /// Monic modulus of `F_q` over `F_p`, constant term first.
    pub modulus_q: Vec<u32>,
    /// Monic modulus of `F_{q^m}` over `F_q`, each coefficient as `F_p` digits.
    pub modulus_top: Vec<Vec<u32>>,
    pub generator_q: Vec<u32>,
    pub generator_top: Vec<Vec<u32>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> FieldTower {
        build_field(3, 2, 1).unwrap()
    }

    #[test]
    fn f9_modulus_is_t2_plus_1() {
        let t = f9();
        assert_eq!(t.params().modulus_q, vec![1, 0, 1]);
    }

    #[test]
    fn f5_generator_is_two() {
        let t = build_field(5, 1, 1).unwrap();
        assert_eq!(t.base().generator(), Elem(2));
        assert_eq!(t.params().generator_q, vec![2]);
    }

    #[test]
    fn even_and_composite_p_rejected() {
        let e = build_field(2, 1, 1).unwrap_err();
        assert!(matches!(e, Error::Parameter(ref s) if s.contains("p must be odd")));
        assert!(matches!(build_field(9, 1, 1), Err(Error::Parameter(_))));
        assert!(matches!(build_field(3, 0, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn frobenius_of_t_in_f9_is_minus_t() {
        let t = f9();
        let f = t.base();
        let tt = f.from_digits(&[0, 1]).unwrap();
        assert_eq!(f.frobenius(tt, 1), f.neg(tt));
        assert_eq!(f.pow(tt, 3), f.neg(tt));
    }

    #[test]
    fn traces_in_f9() {
        let t = f9();
        assert_eq!(t.abs_trace(Elem::ONE), Elem(2));
        let tt = t.top().from_digits(&[0, 1]).unwrap();
        assert_eq!(t.abs_trace(tt), Elem::ZERO);
    }

    #[test]
    fn frobenius_q_fixes_base_and_has_order_m() {
        let t = build_field(3, 2, 3).unwrap();
        for c in t.base().elements() {
            assert_eq!(t.frobenius_q(c), c);
        }
        for x in t.top().elements() {
            let mut y = x;
            for _ in 0..3 {
                y = t.frobenius_q(y);
            }
            assert_eq!(y, x);
        }
    }

    #[test]
    fn rel_trace_linear_and_surjective() {
        for (p, r, m) in [(3, 1, 2), (3, 1, 3), (3, 2, 2), (5, 1, 2), (3, 2, 3)] {
            let t = build_field(p, r, m).unwrap();
            let (b, top) = (t.base(), t.top());
            let mut hit = vec![false; t.q() as usize];
            for x in top.elements() {
                let tr = t.rel_trace(x);
                assert!(tr.0 < t.q());
                hit[tr.0 as usize] = true;
                for c in b.elements() {
                    assert_eq!(t.rel_trace(top.mul(c, x)), b.mul(c, tr));
                }
            }
            assert!(hit.iter().all(|&h| h));
            for x in top.elements().step_by(7) {
                for y in top.elements().step_by(11) {
                    assert_eq!(t.rel_trace(top.add(x, y)), b.add(t.rel_trace(x), t.rel_trace(y)));
                }
            }
        }
    }

    #[test]
    fn trace_transitivity_and_norm() {
        let t = build_field(3, 2, 2).unwrap();
        let n = (t.top().order() - 1) / (t.q() - 1);
        for x in t.top().elements() {
            assert_eq!(t.abs_trace(x), t.base_trace(t.rel_trace(x)));
            let nx = t.norm_to_q(x);
            assert!(nx.0 < t.q());
            assert_eq!(nx, t.top().pow(x, n as u64));
        }
    }

    #[test]
    fn abs_trace_of_prime_field_constants() {
        let t = build_field(5, 2, 2).unwrap();
        for c in 0..5u32 {
            let expect = t.prime().from_int((4 * c) as i64);
            assert_eq!(t.abs_trace(Elem(c)), expect);
        }
    }

    #[test]
    fn discrete_log_homomorphism() {
        for (p, r) in [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2)] {
            let t = build_field(p, r, 1).unwrap();
            let f = t.base();
            let n = t.q() - 1;
            assert_eq!(t.discrete_log(Elem::ONE).unwrap(), MuElement(0));
            assert_eq!(t.discrete_log(f.generator()).unwrap(), MuElement(1));
            for e in 0..n {
                assert_eq!(t.discrete_log(f.exp(e as i64)).unwrap(), MuElement(e));
            }
            for x in f.nonzero_elements() {
                for y in f.nonzero_elements() {
                    let lhs = t.discrete_log(f.mul(x, y)).unwrap().0;
                    let rhs = (t.discrete_log(x).unwrap().0 + t.discrete_log(y).unwrap().0) % n;
                    assert_eq!(lhs, rhs);
                }
            }
        }
        assert!(matches!(f9().discrete_log(Elem::ZERO), Err(Error::Domain(_))));
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, r, m) in [(3, 2, 1), (3, 1, 2), (5, 1, 1), (3, 3, 1)] {
            let t = build_field(p, r, m).unwrap();
            let f = t.top();
            let els: Vec<Elem> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in els.iter().step_by(3) {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn embeddings_are_homomorphisms() {
        let t = build_field(3, 2, 2).unwrap();
        let (b, top) = (t.base(), t.top());
        for x in b.elements() {
            for y in b.elements() {
                assert_eq!(b.add(x, y), top.add(x, y));
                assert_eq!(b.mul(x, y), top.mul(x, y));
            }
        }
        let pr = t.prime();
        for x in pr.elements() {
            for y in pr.elements() {
                assert_eq!(pr.mul(x, y), b.mul(x, y));
            }
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_field(5, 2, 2).unwrap();
        let b = build_field(5, 2, 2).unwrap();
        assert_eq!(a.params(), b.params());
        for x in a.top().elements() {
            assert_eq!(a.encode(Level::Top, x), b.encode(Level::Top, x));
            assert_eq!(a.top().mul(x, x), b.top().mul(x, x));
        }
    }

    #[test]
    fn canonical_key_roundtrip() {
        let t = build_field(3, 2, 2).unwrap();
        let f = t.top();
        let mut seen = vec![false; f.order() as usize];
        for x in f.elements() {
            let k = f.canonical_key(x);
            assert_eq!(f.from_canonical_key(k), x);
            seen[k as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn json_encoding_roundtrip() {
        let t = build_field(3, 2, 3).unwrap();
        for x in t.top().elements() {
            let enc = t.encode(Level::Top, x);
            assert_eq!(enc.len(), 3);
            assert_eq!(t.decode(Level::Top, &enc).unwrap(), x);
        }
    }

    #[test]
    fn generator_has_full_order() {
        for (p, r, m) in [(3, 2, 2), (5, 2, 1), (7, 1, 3)] {
            let t = build_field(p, r, m).unwrap();
            for f in [t.base(), t.top()] {
                assert_eq!(f.multiplicative_order(f.generator()), Some(f.order() as u64 - 1));
            }
        }
    }
}
