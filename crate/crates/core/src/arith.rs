//! Exact integer arithmetic, factorization and quadratic symbols.
//!
//! All symbol computations are closed-form: the Legendre/Jacobi symbol by
//! quadratic reciprocity, the Hilbert symbol `(α,β)_v` by the standard
//! formulas at ℝ, ℚ₂ and odd ℚ_p.  The additive convention writes a symbol
//! value (−1)^b as the bit b ∈ F₂, which is what all descent code consumes.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// A place of ℚ: the real place, the 2-adic place, or an odd prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Place {
    RealInfinite,
    TwoAdic,
    OddPrime(BigUint),
}

impl Place {
    /// Builds the odd-prime place, checking primality.
    pub fn odd_prime(p: BigUint) -> Result<Place> {
        if p.is_even() || p < BigUint::from(3u32) || !is_probable_prime(&p) {
            return Err(Error::BadModulus);
        }
        Ok(Place::OddPrime(p))
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Place::RealInfinite)
    }
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::RealInfinite => write!(f, "oo"),
            Place::TwoAdic => write!(f, "2"),
            Place::OddPrime(p) => write!(f, "{}", p),
        }
    }
}

/// Exact factorization of a nonzero integer: sign and sorted prime powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub prime_powers: Vec<(BigUint, u32)>,
}

impl Factorization {
    /// Reassembles the factored value.
    pub fn value(&self) -> BigInt {
        let mut v = BigInt::from(self.sign);
        for (p, e) in &self.prime_powers {
            v *= BigInt::from(p.clone()).pow(*e);
        }
        v
    }

    /// The product of primes with odd exponent, with the sign attached.
    pub fn squarefree_part(&self) -> BigInt {
        let mut v = BigInt::from(self.sign);
        for (p, e) in &self.prime_powers {
            if e % 2 == 1 {
                v *= BigInt::from(p.clone());
            }
        }
        v
    }

    pub fn is_squarefree(&self) -> bool {
        self.prime_powers.iter().all(|(_, e)| *e == 1)
    }

    pub fn valuation(&self, p: &BigUint) -> u32 {
        self.prime_powers
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_u64(acc, b, m);
        }
        b = mulmod_u64(b, b, m);
        e >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic Miller–Rabin. The base set is proven complete below 2^64;
/// beyond that the same bases make a strong probable-prime test, which is
/// all desk-scale factorization needs.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n < &BigUint::from(2u32) {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigUint) -> BigUint {
    // Brent's variant; n is odd, composite, and has no factor below 10^6.
    let one = BigUint::one();
    let mut c = BigUint::from(1u32);
    loop {
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = one.clone();
        let mut count = 0u64;
        while d.is_one() {
            x = (&x * &x + &c) % n;
            y = (&y * &y + &c) % n;
            y = (&y * &y + &c) % n;
            let diff = if x >= y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
            count += 1;
            if count > 1u64 << 24 {
                break;
            }
        }
        if !d.is_one() && !d.is_zero() && &d != n {
            return d;
        }
        c += 1u32;
    }
}

fn factor_into(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(&n);
    let q = &n / &d;
    factor_into(d, out);
    factor_into(q, out);
}

/// Factors a nonzero integer with |m| < 2^96 by trial division to 10^6
/// followed by Pollard rho on the cofactor.
pub fn factorize(m: &BigInt) -> Result<Factorization> {
    if m.is_zero() {
        return Err(Error::ZeroInput);
    }
    if m.magnitude().bits() >= 97 {
        return Err(Error::TooLarge);
    }
    let sign = if m.is_negative() { -1i8 } else { 1 };
    let mut n = m.magnitude().clone();
    let mut primes: Vec<BigUint> = Vec::new();

    let two = BigUint::from(2u32);
    while n.is_even() {
        primes.push(two.clone());
        n >>= 1;
    }
    // u64 fast path for the trial-division stage.
    if let Some(mut small) = n.to_u64() {
        let mut p = 3u64;
        while p <= 1_000_000 && (p as u128) * (p as u128) <= small as u128 {
            while small % p == 0 {
                primes.push(BigUint::from(p));
                small /= p;
            }
            p += 2;
        }
        n = BigUint::from(small);
    } else {
        let mut p = 3u64;
        while p <= 1_000_000 {
            let bp = BigUint::from(p);
            while (&n % &bp).is_zero() {
                primes.push(bp.clone());
                n /= &bp;
            }
            if BigUint::from(p) * p > n {
                break;
            }
            p += 2;
        }
    }
    if !n.is_one() {
        factor_into(n, &mut primes);
    }
    primes.sort();
    let mut prime_powers: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match prime_powers.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => prime_powers.push((p, 1)),
        }
    }
    Ok(Factorization { sign, prime_powers })
}

/// The square-free integer representing `m` modulo nonzero rational squares.
pub fn squarefree_part(m: &BigInt) -> Result<BigInt> {
    Ok(factorize(m)?.squarefree_part())
}

/// True iff `m` is a perfect square of an integer (0 and 1 included).
pub fn is_perfect_square(m: &BigInt) -> bool {
    if m.is_negative() {
        return false;
    }
    let r = m.sqrt();
    &(&r * &r) == m
}

/// Jacobi symbol (a/b) for odd b > 0; returns 0 exactly when gcd(a,b) > 1.
pub fn jacobi(a: &BigInt, b: &BigInt) -> Result<i32> {
    if !b.is_positive() || b.is_even() {
        return Err(Error::BadModulus);
    }
    let mut a = a.mod_floor(b).to_biguint().unwrap();
    let mut b = b.to_biguint().unwrap();
    let mut result = 1i32;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&b % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut b);
        if (&a % 4u32).to_u32().unwrap() == 3 && (&b % 4u32).to_u32().unwrap() == 3 {
            result = -result;
        }
        a %= &b;
    }
    if b.is_one() {
        Ok(result)
    } else {
        Ok(0)
    }
}

/// Legendre symbol of a p-unit as a bit: 0 for residue, 1 for non-residue.
/// Errors when p divides u (the symbol would vanish).
pub fn legendre_bit(u: &BigInt, p: &BigUint) -> Result<bool> {
    let s = jacobi(u, &BigInt::from(p.clone()))?;
    match s {
        1 => Ok(false),
        -1 => Ok(true),
        _ => Err(Error::NotCoprime),
    }
}

/// p-adic valuation and unit part of a nonzero integer.
pub fn valuation(x: &BigInt, p: &BigUint) -> (u32, BigInt) {
    assert!(!x.is_zero(), "valuation of zero");
    let p = BigInt::from(p.clone());
    let mut v = 0u32;
    let mut u = x.clone();
    loop {
        let (q, r) = u.div_rem(&p);
        if r.is_zero() {
            v += 1;
            u = q;
        } else {
            return (v, u);
        }
    }
}

fn residue_mod_u32(x: &BigInt, m: u32) -> u32 {
    x.mod_floor(&BigInt::from(m)).to_u32().unwrap()
}

/// (u−1)/2 mod 2 for odd u, i.e. 1 iff u ≡ 3 mod 4.
fn eps2(u: &BigInt) -> bool {
    residue_mod_u32(u, 4) == 3
}

/// (u²−1)/8 mod 2 for odd u, i.e. 1 iff u ≡ ±3 mod 8.
fn omega2(u: &BigInt) -> bool {
    let r = residue_mod_u32(u, 8);
    r == 3 || r == 5
}

/// Additive Hilbert symbol [α,β]_v ∈ F₂ for nonzero integers.
pub fn hilbert_additive_int(alpha: &BigInt, beta: &BigInt, v: &Place) -> Result<bool> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::ZeroInput);
    }
    match v {
        Place::RealInfinite => Ok(alpha.is_negative() && beta.is_negative()),
        Place::TwoAdic => {
            let two = BigUint::from(2u32);
            let (a, u) = valuation(alpha, &two);
            let (b, w) = valuation(beta, &two);
            let mut bit = eps2(&u) && eps2(&w);
            if a % 2 == 1 && omega2(&w) {
                bit = !bit;
            }
            if b % 2 == 1 && omega2(&u) {
                bit = !bit;
            }
            Ok(bit)
        }
        Place::OddPrime(p) => {
            let (a, u) = valuation(alpha, p);
            let (b, w) = valuation(beta, p);
            let eps_p = (p % 4u32) == BigUint::from(3u32);
            let mut bit = (a % 2 == 1) && (b % 2 == 1) && eps_p;
            if b % 2 == 1 && legendre_bit(&u, p)? {
                bit = !bit;
            }
            if a % 2 == 1 && legendre_bit(&w, p)? {
                bit = !bit;
            }
            Ok(bit)
        }
    }
}

/// Additive Hilbert symbol for nonzero rationals: each argument is replaced
/// by the integer numerator·denominator in its square class.
pub fn hilbert_additive(alpha: &BigRational, beta: &BigRational, v: &Place) -> Result<bool> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::ZeroInput);
    }
    let ai = alpha.numer() * alpha.denom();
    let bi = beta.numer() * beta.denom();
    hilbert_additive_int(&ai, &bi, v)
}

/// Additive Jacobi symbol [α/β] = Σ_{p|β} [α,β]_p for β > 0 coprime to α.
pub fn additive_jacobi(alpha: &BigInt, beta: &BigInt) -> Result<bool> {
    if !beta.is_positive() {
        return Err(Error::BadModulus);
    }
    if alpha.is_zero() {
        return Err(Error::ZeroInput);
    }
    if !alpha.gcd(beta).is_one() {
        return Err(Error::NotCoprime);
    }
    if beta.is_one() {
        return Ok(false);
    }
    let mut bit = false;
    for (p, _) in factorize(beta)?.prime_powers {
        let place = if p == BigUint::from(2u32) {
            Place::TwoAdic
        } else {
            Place::OddPrime(p)
        };
        if hilbert_additive_int(alpha, beta, &place)? {
            bit = !bit;
        }
    }
    Ok(bit)
}

/// m* = (−1,m)₂·m, the twist of an odd integer into the class ≡ 1 mod 4.
pub fn m_star(m: &BigInt) -> Result<BigInt> {
    if m.is_zero() {
        return Err(Error::ZeroInput);
    }
    if m.is_even() {
        return Err(Error::EvenInput);
    }
    if residue_mod_u32(m, 4) == 1 {
        Ok(m.clone())
    } else {
        Ok(-m)
    }
}

/// Sum of [α,β]_v over all places (test oracle for the product formula):
/// the support is {∞, 2} ∪ odd primes dividing a numerator or denominator.
pub fn hilbert_product_sum(alpha: &BigRational, beta: &BigRational) -> Result<bool> {
    let ai = alpha.numer() * alpha.denom();
    let bi = beta.numer() * beta.denom();
    let mut places = vec![Place::RealInfinite, Place::TwoAdic];
    let mut seen = std::collections::BTreeSet::new();
    for x in [alpha.numer(), alpha.denom(), beta.numer(), beta.denom()] {
        for (p, _) in factorize(x)?.prime_powers {
            if p.is_odd() && seen.insert(p.clone()) {
                places.push(Place::OddPrime(p));
            }
        }
    }
    let mut bit = false;
    for v in &places {
        if hilbert_additive_int(&ai, &bi, v)? {
            bit = !bit;
        }
    }
    Ok(bit)
}

/// Integer square root of a nonnegative BigInt.
pub fn isqrt(m: &BigInt) -> BigInt {
    assert!(!m.is_negative());
    m.sqrt()
}

/// Parses a decimal string into a BigInt.
pub fn bigint(s: &str) -> BigInt {
    s.parse().expect("invalid integer literal")
}

/// Convenience: BigInt from machine integer.
pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Sign of a nonzero BigInt as ±1.
pub fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::Plus => 1,
        Sign::NoSign => panic!("sign of zero"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Independent oracle: plain trial division, no Pollard rho.
    fn trial_division_oracle(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2u64;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn factorize_basics() {
        let f = factorize(&int(1)).unwrap();
        assert_eq!(f.sign, 1);
        assert!(f.prime_powers.is_empty());

        let f = factorize(&int(-12)).unwrap();
        assert_eq!(f.sign, -1);
        assert_eq!(
            f.prime_powers,
            vec![(BigUint::from(2u32), 2), (BigUint::from(3u32), 1)]
        );

        // 2·3·5·7·11·13 + 1 = 30031
        let expected: Vec<(BigUint, u32)> = trial_division_oracle(30031)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
        let f = factorize(&int(30031)).unwrap();
        assert_eq!(f.prime_powers, expected);
        assert_eq!(f.prime_powers, vec![(BigUint::from(59u32), 1), (BigUint::from(509u32), 1)]);

        assert_eq!(factorize(&int(0)), Err(Error::ZeroInput));
    }

    #[test]
    fn factorize_large_semiprime() {
        // two 10-digit primes, out of trial-division range
        let p = bigint("2147483659");
        let q = bigint("2147483693");
        let n = &p * &q;
        let f = factorize(&n).unwrap();
        assert_eq!(f.value(), n);
        assert_eq!(f.prime_powers.len(), 2);
        assert!(f.is_squarefree());
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_part(&int(18)).unwrap(), int(2));
        assert_eq!(squarefree_part(&int(-50)).unwrap(), int(-2));
        assert_eq!(squarefree_part(&int(1)).unwrap(), int(1));
    }

    /// Euler-criterion oracle for prime moduli.
    fn euler_oracle(a: i64, p: u64) -> i32 {
        let ap = BigInt::from(a).mod_floor(&BigInt::from(p));
        if ap.is_zero() {
            return 0;
        }
        let e = (p - 1) / 2;
        let r = ap
            .to_biguint()
            .unwrap()
            .modpow(&BigUint::from(e), &BigUint::from(p));
        if r.is_one() {
            1
        } else {
            -1
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(&int(1), &int(15)).unwrap(), 1);
        assert_eq!(jacobi(&int(2), &int(7)).unwrap(), euler_oracle(2, 7));
        assert_eq!(jacobi(&int(2), &int(7)).unwrap(), 1);
        assert_eq!(jacobi(&int(3), &int(5)).unwrap(), euler_oracle(3, 5));
        assert_eq!(jacobi(&int(3), &int(5)).unwrap(), -1);
        assert_eq!(jacobi(&int(6), &int(15)).unwrap(), 0);
        assert!(jacobi(&int(3), &int(4)).is_err());
    }

    proptest! {
        #[test]
        fn jacobi_matches_euler_for_primes(a in -200i64..200, pi in 0usize..10) {
            let primes = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31];
            let p = primes[pi];
            let j = jacobi(&int(a), &int(p as i64)).unwrap();
            prop_assert_eq!(j, euler_oracle(a, p));
        }

        #[test]
        fn jacobi_multiplicative(a in 1i64..500, b in 1i64..500, mi in 0usize..6) {
            let ms = [3i64, 9, 15, 21, 35, 45];
            let m = ms[mi];
            let ja = jacobi(&int(a), &int(m)).unwrap();
            let jb = jacobi(&int(b), &int(m)).unwrap();
            let jab = jacobi(&int(a * b), &int(m)).unwrap();
            if ja != 0 && jb != 0 {
                prop_assert_eq!(jab, ja * jb);
            }
        }

        #[test]
        fn hilbert_product_formula(an in -300i64..300, ad in 1i64..100,
                                   bn in -300i64..300, bd in 1i64..100) {
            prop_assume!(an != 0 && bn != 0);
            let a = r(an, ad);
            let b = r(bn, bd);
            prop_assert!(!hilbert_product_sum(&a, &b).unwrap());
        }

        #[test]
        fn hilbert_symmetric_and_bilinear(a in -50i64..50, b in -50i64..50, c in -50i64..50) {
            prop_assume!(a != 0 && b != 0 && c != 0);
            for v in [Place::RealInfinite, Place::TwoAdic,
                      Place::OddPrime(BigUint::from(3u32)),
                      Place::OddPrime(BigUint::from(5u32))] {
                let ab = hilbert_additive_int(&int(a), &int(b), &v).unwrap();
                let ba = hilbert_additive_int(&int(b), &int(a), &v).unwrap();
                prop_assert_eq!(ab, ba);
                let ac = hilbert_additive_int(&int(a), &int(c), &v).unwrap();
                let a_bc = hilbert_additive_int(&int(a), &int(b * c), &v).unwrap();
                prop_assert_eq!(a_bc, ab ^ ac);
            }
        }
    }

    #[test]
    fn hilbert_examples() {
        assert!(hilbert_additive_int(&int(-1), &int(-1), &Place::RealInfinite).unwrap());
        assert!(hilbert_additive_int(&int(-1), &int(-1), &Place::TwoAdic).unwrap());
        let p7 = Place::OddPrime(BigUint::from(7u32));
        assert!(!hilbert_additive_int(&int(2), &int(7), &p7).unwrap());
        // (p, −p)_p = +1 for every odd prime p
        for p in [3u64, 5, 7, 11, 13, 97] {
            let v = Place::OddPrime(BigUint::from(p));
            assert!(!hilbert_additive_int(&int(p as i64), &int(-(p as i64)), &v).unwrap());
        }
    }

    #[test]
    fn additive_jacobi_examples() {
        assert!(!additive_jacobi(&int(5), &int(1)).unwrap());
        assert!(!additive_jacobi(&int(2), &int(7)).unwrap());
        // [3,35]₅ + [3,35]₇ = 1 + 1 = 0
        assert!(!additive_jacobi(&int(3), &int(35)).unwrap());
        // single non-residue
        assert!(additive_jacobi(&int(3), &int(7)).unwrap());
        assert_eq!(additive_jacobi(&int(3), &int(15)), Err(Error::NotCoprime));
    }

    #[test]
    fn m_star_examples() {
        assert_eq!(m_star(&int(5)).unwrap(), int(5));
        assert_eq!(m_star(&int(7)).unwrap(), int(-7));
        assert_eq!(m_star(&int(-3)).unwrap(), int(-3));
        assert!(m_star(&int(4)).is_err());
        for m in [-15i64, -7, -3, -1, 1, 3, 5, 7, 9, 11, 13] {
            let s = m_star(&int(m)).unwrap();
            assert_eq!(s.mod_floor(&int(4)), int(1));
            assert!(s == int(m) || s == int(-m));
        }
    }

    #[test]
    fn probable_prime_spot_checks() {
        assert!(is_probable_prime(&BigUint::from(2u32)));
        assert!(is_probable_prime(&BigUint::from(509u32)));
        assert!(!is_probable_prime(&BigUint::from(30031u32)));
        assert!(is_probable_prime(&BigUint::from(2147483659u64)));
    }
}
