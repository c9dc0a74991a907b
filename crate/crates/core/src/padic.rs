//! Internal p-adic arithmetic: square-class tests of exact rationals and
//! square roots of units to a requested number of digits.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{legendre_bit, valuation};
use crate::{Error, Result};

/// Valuation of a nonzero rational at p.
pub(crate) fn rational_valuation(x: &BigRational, p: &BigUint) -> i64 {
    let (vn, _) = valuation(x.numer(), p);
    let (vd, _) = valuation(x.denom(), p);
    vn as i64 - vd as i64
}

/// Unit part (numerator unit × denominator unit, same square class as x/p^v).
pub(crate) fn rational_unit_class(x: &BigRational, p: &BigUint) -> BigInt {
    let (_, un) = valuation(x.numer(), p);
    let (_, ud) = valuation(x.denom(), p);
    un * ud
}

/// Exact test: is the nonzero rational x a square in ℚ_p (p = 2 allowed)?
pub(crate) fn is_square_in_qp(x: &BigRational, p: &BigUint) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    if x.is_negative() && false {
        // sign is irrelevant p-adically; kept explicit for readers
    }
    let v = rational_valuation(x, p);
    if v.rem_euclid(2) != 0 {
        return Ok(false);
    }
    let u = rational_unit_class(x, p);
    if p == &BigUint::from(2u32) {
        Ok(u.mod_floor(&BigInt::from(8)) == BigInt::one())
    } else {
        Ok(!legendre_bit(&u, p)?)
    }
}

/// Modular inverse by extended Euclid.
pub(crate) fn inv_mod(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a.clone());
    let m = BigInt::from(m.clone());
    let e = a.extended_gcd(&m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(&m).to_biguint().unwrap())
}

/// Tonelli–Shanks square root modulo an odd prime. `a` must be a unit.
pub(crate) fn sqrt_mod_p(a: &BigUint, p: &BigUint) -> Option<BigUint> {
    let a = a % p;
    if a.is_zero() {
        return Some(BigUint::zero());
    }
    if legendre_bit(&BigInt::from(a.clone()), p).ok()? {
        return None;
    }
    let one = BigUint::one();
    if (p % 4u32).to_u32()? == 3 {
        let e = (p + &one) >> 2;
        return Some(a.modpow(&e, p));
    }
    // p ≡ 1 mod 4
    let mut s = p - &one;
    let mut r = 0u32;
    while s.is_even() {
        s >>= 1;
        r += 1;
    }
    let mut z = BigUint::from(2u32);
    while !legendre_bit(&BigInt::from(z.clone()), p).ok()? {
        z += 1u32;
    }
    let mut c = z.modpow(&s, p);
    let mut x = a.modpow(&((&s + &one) >> 1), p);
    let mut t = a.modpow(&s, p);
    let mut m = r;
    while !t.is_one() {
        let mut i = 0u32;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = &tt * &tt % p;
            i += 1;
            if i == m {
                return None;
            }
        }
        let b = c.modpow(&BigUint::from(2u32).pow(m - i - 1), p);
        x = &x * &b % p;
        c = &b * &b % p;
        t = &t * &c % p;
        m = i;
    }
    Some(x)
}

/// Square root of a unit modulo p^prec (odd p), by digit lifting.
pub(crate) fn sqrt_unit_mod_ppow(a: &BigUint, p: &BigUint, prec: u32) -> Option<BigUint> {
    let modulus = p.pow(prec);
    let a = a % &modulus;
    let mut x = sqrt_mod_p(&(&a % p), p)?;
    let mut pj = p.clone();
    for _ in 1..prec {
        // x -> x + t·p^j with 2xt ≡ (a − x²)/p^j mod p
        let diff = BigInt::from(a.clone()) - BigInt::from(&x * &x);
        let (q, r) = diff.div_rem(&BigInt::from(pj.clone()));
        debug_assert!(r.is_zero());
        let qp = q.mod_floor(&BigInt::from(p.clone())).to_biguint().unwrap();
        let inv2x = inv_mod(&((BigUint::from(2u32) * &x) % p), p)?;
        let t = qp * inv2x % p;
        x += &t * &pj;
        pj *= p;
    }
    Some(x % &modulus)
}

/// Square root of a unit ≡ 1 mod 8 modulo 2^prec.
pub(crate) fn sqrt_unit_mod_2pow(a: &BigUint, prec: u32) -> Option<BigUint> {
    let modulus = BigUint::one() << prec;
    let a = a % &modulus;
    if prec <= 3 {
        return if (&a % 8u32).to_u32() == Some(1) || prec < 3 {
            Some(BigUint::one())
        } else {
            None
        };
    }
    if (&a % 8u32).to_u32() != Some(1) {
        return None;
    }
    let mut x = BigUint::one();
    for k in 3..prec {
        let mk = BigUint::one() << (k + 1);
        if (&x * &x) % &mk != &a % &mk {
            x += BigUint::one() << (k - 1);
        }
    }
    debug_assert_eq!((&x * &x) % &modulus, a);
    Some(x)
}

/// Square root of a square unit modulo p^prec, either prime kind.
pub(crate) fn sqrt_unit(a: &BigUint, p: &BigUint, prec: u32) -> Option<BigUint> {
    if p == &BigUint::from(2u32) {
        sqrt_unit_mod_2pow(a, prec)
    } else {
        sqrt_unit_mod_ppow(a, p, prec)
    }
}

/// Reduces an exact rational with nonnegative valuation into ℤ/p^prec.
pub(crate) fn rational_mod_ppow(x: &BigRational, p: &BigUint, prec: u32) -> Option<BigUint> {
    let modulus = p.pow(prec);
    let den = x.denom().to_biguint()?;
    let num = x.numer().mod_floor(&BigInt::from(modulus.clone())).to_biguint()?;
    let inv = inv_mod(&(&den % &modulus), &modulus)?;
    Some(num * inv % &modulus)
}

/// p-adic square root of an exact rational square (even valuation, square
/// unit) as an integer approximation modulo p^prec. Requires valuation ≥ 0.
pub(crate) fn sqrt_rational_mod(x: &BigRational, p: &BigUint, prec: u32) -> Option<BigUint> {
    if x.is_zero() {
        return Some(BigUint::zero());
    }
    let v = rational_valuation(x, p);
    if v < 0 || v % 2 != 0 {
        return None;
    }
    let half = (v / 2) as u32;
    let pv = BigInt::from(p.pow(v as u32));
    let unit_rat = x / BigRational::from(pv);
    let unit_digits = prec.checked_sub(half)?;
    if unit_digits == 0 {
        return Some(BigUint::zero());
    }
    let u = rational_mod_ppow(&unit_rat, p, unit_digits)?;
    let root = sqrt_unit(&u, p, unit_digits)?;
    Some(root * p.pow(half) % p.pow(prec))
}
