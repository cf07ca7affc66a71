//! Exact elements of cyclotomic fields `Q(ζ_n)`.
//!
//! A value is stored as its coordinate vector in the power basis
//! `1, ζ_n, …, ζ_n^{φ(n)−1}` of `Q(ζ_n)`, reduced modulo the `n`-th
//! cyclotomic polynomial `Φ_n`. Every constructor and arithmetic result is
//! normalized to the minimal conductor representing the value, so equality
//! of values is structural equality of representations.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::rational::{rat_from_string, rat_to_string, Rational};
use crate::Result;

/// Euler totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn prime_factors(n: u64) -> Vec<u64> {
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// Exact integer polynomial quotient; `num / den` must be exact and `den` monic.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        assert!(rem.iter().all(|c| c.is_zero()));
        return vec![BigInt::zero()];
    }
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![BigInt::zero(); qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        quot[i] = c.clone();
        for (j, dc) in den.iter().enumerate() {
            rem[i + j] -= &c * dc;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

fn poly_mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Coefficients of `Φ_n`, ascending degree, monic, length `φ(n)+1`.
/// Computed by dividing `x^n − 1` by the product of all proper `Φ_d`.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let poly = if n == 1 {
        vec![-BigInt::one(), BigInt::one()]
    } else {
        let mut den = vec![BigInt::one()];
        for d in divisors(n) {
            if d < n {
                den = poly_mul_int(&den, &cyclotomic_polynomial(d));
            }
        }
        let mut num = vec![BigInt::zero(); n as usize + 1];
        num[0] = -BigInt::one();
        num[n as usize] = BigInt::one();
        poly_div_exact(&num, &den)
    };
    let arc = Arc::new(poly);
    cache.lock().unwrap().insert(n, arc.clone());
    arc
}

/// Remainder of a rational polynomial modulo the monic integer `Φ_n`.
fn reduce_mod_phi(mut poly: Vec<Rational>, n: u64) -> Vec<Rational> {
    let phi_n = cyclotomic_polynomial(n);
    let deg = phi_n.len() - 1;
    while poly.len() > deg {
        let lead = poly.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let top = poly.len() - deg;
        for (j, c) in phi_n.iter().take(deg).enumerate() {
            let delta = &lead * Rational::from_integer(c.clone());
            poly[top + j] -= delta;
        }
    }
    poly.resize(deg, Rational::zero());
    poly
}

/// An exact element of a cyclotomic field, at its minimal conductor.
#[derive(Clone, PartialEq, Eq)]
pub struct Cyclotomic {
    conductor: u64,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    fn from_reduced(conductor: u64, coeffs: Vec<Rational>) -> Self {
        Cyclotomic { conductor, coeffs }.normalized()
    }

    /// Builds from an arbitrary-degree polynomial in `ζ_n`.
    pub fn from_poly(conductor: u64, poly: Vec<Rational>) -> Self {
        Self::from_reduced(conductor, reduce_mod_phi(poly, conductor))
    }

    pub fn zero() -> Self {
        Cyclotomic { conductor: 1, coeffs: vec![Rational::zero()] }
    }

    pub fn one() -> Self {
        Cyclotomic { conductor: 1, coeffs: vec![Rational::one()] }
    }

    pub fn from_rational(r: Rational) -> Self {
        Cyclotomic { conductor: 1, coeffs: vec![r] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `ζ_n^k`, with `k` taken modulo `n`.
    pub fn root_of_unity(n: u64, k: i64) -> Self {
        assert!(n >= 1, "conductor must be positive");
        let k = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![Rational::zero(); k + 1];
        poly[k] = Rational::one();
        Self::from_poly(n, poly)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Coefficients in the power basis of the stored (minimal) conductor.
    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.conductor == 1 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_one()
    }

    /// Coefficient vector re-expressed at conductor `n` (`self.conductor | n`).
    fn promoted(&self, n: u64) -> Vec<Rational> {
        assert!(n % self.conductor == 0);
        if n == self.conductor {
            return self.coeffs.clone();
        }
        let step = (n / self.conductor) as usize;
        let mut poly = vec![Rational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        reduce_mod_phi(poly, n)
    }

    /// Attempts to re-express the value at conductor `m`, `m | n`, by solving
    /// for coordinates in the embedded power basis of `Q(ζ_m)`.
    fn try_descend(&self, m: u64) -> Option<Cyclotomic> {
        let n = self.conductor;
        let dim_n = self.coeffs.len();
        let dim_m = euler_phi(m) as usize;
        // Columns: ζ_m^i expressed at conductor n.
        let mut cols = Vec::with_capacity(dim_m);
        for i in 0..dim_m {
            let mut poly = vec![Rational::zero(); i * (n / m) as usize + 1];
            *poly.last_mut().unwrap() = Rational::one();
            cols.push(reduce_mod_phi(poly, n));
        }
        let a: Vec<Vec<Rational>> = (0..dim_n)
            .map(|row| (0..dim_m).map(|col| cols[col][row].clone()).collect())
            .collect();
        let b: Vec<Rational> = self.coeffs.clone();
        let x = crate::linalg::solve(&a, &b, &crate::linalg::RATIONAL_FIELD)?;
        Some(Cyclotomic { conductor: m, coeffs: x })
    }

    /// Canonical minimal-conductor form. Idempotent.
    fn normalized(mut self) -> Self {
        loop {
            if self.conductor == 1 {
                return self;
            }
            let mut descended = false;
            for p in prime_factors(self.conductor) {
                let m = self.conductor / p;
                if let Some(down) = self.try_descend(m) {
                    self = down;
                    descended = true;
                    break;
                }
            }
            if !descended {
                return self;
            }
        }
    }

    fn binop(&self, other: &Cyclotomic, f: impl Fn(&Rational, &Rational) -> Rational) -> Cyclotomic {
        let n = self.conductor.lcm(&other.conductor);
        let a = self.promoted(n);
        let b = other.promoted(n);
        let coeffs = a.iter().zip(b.iter()).map(|(x, y)| f(x, y)).collect();
        Cyclotomic::from_reduced(n, coeffs)
    }

    pub fn add(&self, other: &Cyclotomic) -> Cyclotomic {
        self.binop(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Cyclotomic) -> Cyclotomic {
        self.binop(other, |x, y| x - y)
    }

    pub fn neg(&self) -> Cyclotomic {
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Cyclotomic) -> Cyclotomic {
        let n = self.conductor.lcm(&other.conductor);
        let a = self.promoted(n);
        let b = other.promoted(n);
        let mut poly = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                poly[i + j] += ai * bj;
            }
        }
        Cyclotomic::from_reduced(n, reduce_mod_phi(poly, n))
    }

    pub fn scale(&self, r: &Rational) -> Cyclotomic {
        if r.is_zero() {
            return Cyclotomic::zero();
        }
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in `Q[x]`
    /// against the (irreducible) `Φ_n`.
    pub fn inv(&self) -> Result<Cyclotomic> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.conductor;
        let phi_n: Vec<Rational> = cyclotomic_polynomial(n)
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        // Extended Euclid: maintain r0 = u0*a (mod Φ), r1 = u1*a (mod Φ).
        let mut r0 = phi_n;
        let mut r1 = self.coeffs.clone();
        trim(&mut r1);
        let mut u0: Vec<Rational> = vec![Rational::zero()];
        let mut u1: Vec<Rational> = vec![Rational::one()];
        while r1.len() > 1 || !r1[0].is_zero() {
            let (q, r) = poly_divmod(&r0, &r1);
            let u = poly_sub(&u0, &poly_mul(&q, &u1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = u;
        }
        // r0 is a nonzero constant: gcd(a, Φ_n) up to scale.
        let g = r0[0].clone();
        assert!(r0.len() == 1 && !g.is_zero(), "cyclotomic polynomial not coprime to nonzero element");
        let inv_g = Rational::one() / g;
        let coeffs: Vec<Rational> = u0.iter().map(|c| c * &inv_g).collect();
        Ok(Cyclotomic::from_poly(n, coeffs))
    }

    pub fn div(&self, other: &Cyclotomic) -> Result<Cyclotomic> {
        Ok(self.mul(&other.inv()?))
    }

    /// Applies the Galois automorphism `ζ ↦ ζ^j`; `j` must be coprime to the
    /// conductor. `galois(·, −1)` is complex conjugation.
    pub fn galois(&self, j: i64) -> Result<Cyclotomic> {
        let n = self.conductor;
        let jm = j.rem_euclid(n as i64) as u64;
        if n > 1 && jm.gcd(&n) != 1 {
            return Err(Error::NotCoprime(j, n));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let mut poly = vec![Rational::zero(); n as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (i as u64 * jm % n) as usize;
            poly[e] += c;
        }
        Ok(Cyclotomic::from_poly(n, poly))
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Cyclotomic {
        self.galois(-1).expect("-1 is coprime to every conductor")
    }

    /// `self^k` for integer `k`; errors on `0^negative`.
    pub fn pow(&self, k: i64) -> Result<Cyclotomic> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Cyclotomic::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Structural key for deterministic sorting of values.
    pub fn sort_cmp(&self, other: &Cyclotomic) -> Ordering {
        self.conductor
            .cmp(&other.conductor)
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

fn trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    trim(&mut out);
    out
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    trim(&mut out);
    out
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = a.to_vec();
    trim(&mut rem);
    let db = b.len() - 1;
    let lead = b.last().unwrap();
    if rem.len() <= db {
        return (vec![Rational::zero()], rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    while rem.len() > db && !(rem.len() == 1 && rem[0].is_zero()) {
        let c = rem.last().unwrap() / lead;
        let shift = rem.len() - 1 - db;
        quot[shift] = c.clone();
        for (j, bc) in b.iter().enumerate() {
            let delta = &c * bc;
            rem[shift + j] -= delta;
        }
        trim(&mut rem);
        if rem.iter().all(|x| x.is_zero()) {
            rem = vec![Rational::zero()];
            break;
        }
    }
    (quot, rem)
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let n = self.conductor;
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = rat_to_string(&c.abs());
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            if i == 0 {
                write!(f, "{s}")?;
            } else {
                if s != "1" {
                    write!(f, "{s}*")?;
                }
                if i == 1 {
                    write!(f, "z{n}")?;
                } else {
                    write!(f, "z{n}^{i}")?;
                }
            }
        }
        Ok(())
    }
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("conductor", &self.conductor)?;
        let coeffs: Vec<(String, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i.to_string(), rat_to_string(c)))
            .collect();
        struct CoeffMap<'a>(&'a [(String, String)]);
        impl Serialize for CoeffMap<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    m.serialize_entry(k, v)?;
                }
                m.end()
            }
        }
        map.serialize_entry("coeffs", &CoeffMap(&coeffs))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct CycVisitor;
        impl<'de> Visitor<'de> for CycVisitor {
            type Value = Cyclotomic;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a cyclotomic value {conductor, coeffs}")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Cyclotomic, A::Error> {
                let mut conductor: Option<u64> = None;
                let mut coeffs: Option<HashMap<String, String>> = None;
                while let Some(key) = access.next_key::<String>()? {
                    match key.as_str() {
                        "conductor" => conductor = Some(access.next_value()?),
                        "coeffs" => coeffs = Some(access.next_value()?),
                        other => return Err(de::Error::unknown_field(other, &["conductor", "coeffs"])),
                    }
                }
                let n = conductor.ok_or_else(|| de::Error::missing_field("conductor"))?;
                if n == 0 {
                    return Err(de::Error::custom("conductor must be positive"));
                }
                let coeffs = coeffs.ok_or_else(|| de::Error::missing_field("coeffs"))?;
                let mut poly = vec![Rational::zero(); n as usize];
                for (k, v) in coeffs {
                    let e: usize = k.parse().map_err(|_| de::Error::custom("bad exponent key"))?;
                    if e >= n as usize {
                        return Err(de::Error::custom("exponent out of range for conductor"));
                    }
                    poly[e] = rat_from_string(&v).map_err(|e| de::Error::custom(e.to_string()))?;
                }
                Ok(Cyclotomic::from_poly(n, poly))
            }
        }
        deserializer.deserialize_map(CycVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn zeta(n: u64) -> Cyclotomic {
        Cyclotomic::root_of_unity(n, 1)
    }

    #[test]
    fn roots_of_unity_basics() {
        assert_eq!(Cyclotomic::root_of_unity(1, 0), Cyclotomic::one());
        assert_eq!(Cyclotomic::root_of_unity(2, 1), Cyclotomic::from_int(-1));
        let i = Cyclotomic::root_of_unity(4, 1);
        assert_eq!(i.mul(&i), Cyclotomic::from_int(-1));
    }

    #[test]
    fn arithmetic_examples() {
        // (1 + ζ_4)(1 − ζ_4) = 2
        let i = zeta(4);
        let one = Cyclotomic::one();
        let prod = one.add(&i).mul(&one.sub(&i));
        assert_eq!(prod, Cyclotomic::from_int(2));
        // ζ_3 · ζ_3² = 1
        let z3 = zeta(3);
        assert_eq!(z3.mul(&z3.mul(&z3)), Cyclotomic::one());
        // ζ_2 + ζ_3 = ζ_3 − 1: promotion to lcm happens internally, and the
        // result normalizes to its minimal conductor Q(ζ_3) ⊂ Q(ζ_6).
        let s = Cyclotomic::root_of_unity(2, 1).add(&zeta(3));
        assert_eq!(s.conductor(), 3);
        assert_eq!(s, zeta(3).sub(&Cyclotomic::one()));
        // A sum genuinely needing the composite field keeps conductor 12.
        let t = zeta(4).add(&zeta(3));
        assert_eq!(t.conductor(), 12);
    }

    #[test]
    fn conductor_minimality() {
        // ζ_6^3 = −1 lives at conductor 1.
        assert_eq!(Cyclotomic::root_of_unity(6, 3).conductor(), 1);
        // ζ_8^2 = ζ_4.
        assert_eq!(Cyclotomic::root_of_unity(8, 2), zeta(4));
        // 1 + ζ_3 + ζ_3² = 0.
        let z = zeta(3);
        let s = Cyclotomic::one().add(&z).add(&z.mul(&z));
        assert!(s.is_zero());
        assert_eq!(s.conductor(), 1);
    }

    #[test]
    fn normalization_idempotent() {
        let v = zeta(12).add(&Cyclotomic::from_rational(rat(3, 7)));
        let again = v.clone().normalized();
        assert_eq!(v, again);
    }

    #[test]
    fn galois_action() {
        let z5 = zeta(5);
        assert_eq!(z5.galois(2).unwrap(), z5.mul(&z5));
        assert_eq!(z5.galois(-1).unwrap(), z5.pow(4).unwrap());
        assert!(zeta(4).galois(2).is_err());
        // Composition law on a sample element.
        let v = zeta(8).add(&Cyclotomic::from_int(3)).mul(&zeta(8).sub(&Cyclotomic::from_int(1)));
        for j in [1i64, 3, 5, 7] {
            for jp in [1i64, 3, 5, 7] {
                let lhs = v.galois(j).unwrap().galois(jp).unwrap();
                let rhs = v.galois(j * jp).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn field_axioms_on_samples() {
        let samples = [
            Cyclotomic::from_rational(rat(2, 3)),
            zeta(3),
            zeta(4).add(&Cyclotomic::one()),
            zeta(5).sub(&zeta(5).mul(&zeta(5))),
            zeta(6).add(&Cyclotomic::from_rational(rat(-1, 2))),
        ];
        for a in &samples {
            for b in &samples {
                for c in &samples {
                    let assoc = a.mul(b).mul(c);
                    let assoc2 = a.mul(&b.mul(c));
                    assert_eq!(assoc, assoc2);
                    let dist = a.mul(&b.add(c));
                    let dist2 = a.mul(b).add(&a.mul(c));
                    assert_eq!(dist, dist2);
                }
                if !b.is_zero() {
                    let q = a.div(b).unwrap();
                    assert_eq!(q.mul(b), *a);
                }
            }
            if !a.is_zero() {
                assert_eq!(a.mul(&a.inv().unwrap()), Cyclotomic::one());
            }
        }
    }

    #[test]
    fn rational_round_trip() {
        let r = rat(-7, 12);
        let c = Cyclotomic::from_rational(r.clone());
        assert!(c.is_rational());
        assert_eq!(c.to_rational().unwrap(), r);
        assert!(zeta(5).to_rational().is_none());
    }

    #[test]
    fn conjugation_norm_real_and_orbit_sums_rational() {
        for v in [zeta(5).add(&zeta(5).conj()), zeta(7), zeta(12).add(&Cyclotomic::one())] {
            // |v|² is fixed by conjugation.
            let norm = v.mul(&v.conj());
            assert_eq!(norm, norm.conj());
        }
        // A full Galois orbit sum is rational and has nonnegative norm.
        for n in [5u64, 8, 12] {
            let mut s = Cyclotomic::zero();
            for j in 1..n {
                if num_integer::gcd(j, n) == 1 {
                    s = s.add(&Cyclotomic::root_of_unity(n, j as i64));
                }
            }
            assert!(s.is_rational(), "orbit sum at conductor {n}");
            let norm = s.mul(&s.galois(-1).unwrap()).to_rational().unwrap();
            assert!(norm >= Rational::zero());
        }
    }

    #[test]
    fn division_by_zero_rejected() {
        assert!(Cyclotomic::one().div(&Cyclotomic::zero()).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let v = zeta(12).scale(&rat(5, 4)).add(&Cyclotomic::from_rational(rat(-1, 3)));
        let s = serde_json::to_string(&v).unwrap();
        let back: Cyclotomic = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        // A non-normalized input normalizes on read.
        let raw = r#"{"conductor": 6, "coeffs": {"3": "1"}}"#;
        let parsed: Cyclotomic = serde_json::from_str(raw).unwrap();
        assert_eq!(parsed.conductor(), 1);
        assert_eq!(parsed.to_rational().unwrap(), rat_int(-1));
    }

    #[test]
    fn cyclotomic_polynomials_small() {
        let cases: Vec<(u64, Vec<i64>)> = vec![
            (1, vec![-1, 1]),
            (2, vec![1, 1]),
            (3, vec![1, 1, 1]),
            (4, vec![1, 0, 1]),
            (6, vec![1, -1, 1]),
            (12, vec![1, 0, -1, 0, 1]),
        ];
        for (n, want) in cases {
            let got: Vec<i64> = cyclotomic_polynomial(n).iter().map(|c| i64::try_from(c).unwrap()).collect();
            assert_eq!(got, want, "Phi_{n}");
        }
    }
}
