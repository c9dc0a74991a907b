//! Genus theory of ℚ(√−n): the class group of binary quadratic forms of
//! discriminant −4n, its 2-, 4- and 8-ranks, the Rédei-matrix formula, the
//! distinguished divisor d, the (2+√2 / |m|) symbol, and the resulting
//! congruent-curve criteria.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read as _, Write as _};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, hilbert_additive_int, jacobi, Place};
use crate::curves::{CompanionTriple, CurveTriple, TwistParam};
use crate::f2linalg::F2Matrix;
use crate::padic;
use crate::selmer;
use crate::{Error, Result};

/// A reduced positive definite binary quadratic form ax² + bxy + cy².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl Form {
    fn disc(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }
}

/// The form class group of discriminant −4n.
#[derive(Debug, Clone)]
pub struct FormClassGroup {
    pub discriminant: i128,
    pub forms: Vec<Form>,
}

/// 2^s-ranks h₂ ≥ h₄ ≥ h₈ of the class group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoSylowRanks {
    pub h2: usize,
    pub h4: usize,
    pub h8: usize,
}

fn reduce_form(mut a: i128, mut b: i128, mut c: i128) -> Form {
    loop {
        if c < a {
            std::mem::swap(&mut a, &mut c);
            b = -b;
        }
        if b > a || b <= -a {
            // normalize b into (−a, a]
            let two_a = 2 * a;
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            let disc = b * b - 4 * a * c;
            b = r;
            c = (b * b - disc) / (4 * a);
            continue;
        }
        if c < a {
            continue;
        }
        break;
    }
    if b < 0 && (-b == a || a == c) {
        b = -b;
    }
    Form { a, b, c }
}

fn compose(f1: &Form, f2: &Form) -> Form {
    let d = f1.disc();
    debug_assert_eq!(d, f2.disc());
    // transform f2 to an equivalent form with leading coefficient coprime
    // to a1, by finding a primitive representation
    let (q, bq) = {
        let mut found = None;
        'outer: for x in 0i128..=24 {
            for y in -24i128..=24 {
                if x.gcd(&y) != 1 {
                    continue;
                }
                let val = f2.a * x * x + f2.b * x * y + f2.c * y * y;
                if val != 0 && val.gcd(&f1.a) == 1 {
                    // extend (x,y) to a unimodular matrix (x u; y v)
                    let e = extended_gcd(x, y);
                    let (v, u) = (e.1, -e.2); // x·v − y·u = 1
                    debug_assert_eq!(x * v - y * u, 1);
                    let b_new = 2 * (f2.a * x * u + f2.c * y * v) + f2.b * (x * v + y * u);
                    found = Some((val, b_new));
                    break 'outer;
                }
            }
        }
        found.expect("primitive value coprime to a1 exists")
    };
    // CRT: B ≡ b1 mod 2a1, B ≡ bq mod 2q (works since both are even)
    let m1 = 2 * f1.a;
    let m2 = 2 * q;
    let g = m1.gcd(&m2);
    debug_assert_eq!((f1.b - bq).rem_euclid(g), 0);
    let l = m1 / g * m2;
    let e = extended_gcd(m1 / g, m2 / g);
    // B = b1 + m1·t where t ≡ (bq−b1)/g · inv(m1/g) mod m2/g
    let t = ((bq - f1.b) / g).rem_euclid(m2 / g) * e.1.rem_euclid(m2 / g) % (m2 / g);
    let b_comp = (f1.b + m1 * t).rem_euclid(l);
    let a_comp = f1.a * q;
    let c_comp = (b_comp * b_comp - d) / (4 * a_comp);
    debug_assert_eq!((b_comp * b_comp - d) % (4 * a_comp), 0);
    reduce_form(a_comp, b_comp, c_comp)
}

/// (g, x, y) with a·x + b·y = g.
fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = extended_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

impl FormClassGroup {
    pub fn order(&self) -> usize {
        self.forms.len()
    }

    pub fn identity(&self) -> Form {
        let n = -self.discriminant / 4;
        Form { a: 1, b: 0, c: n }
    }

    pub fn compose(&self, f: &Form, g: &Form) -> Form {
        compose(f, g)
    }

    pub fn power(&self, f: &Form, mut e: u64) -> Form {
        let mut base = *f;
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = compose(&acc, &base);
            }
            base = compose(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Enumerates all reduced forms of discriminant −4n (n ≡ 1 mod 4 square-free).
pub fn class_group(n: &TwistParam) -> Result<FormClassGroup> {
    if n.value().mod_floor(&BigInt::from(4)) != BigInt::one() {
        return Err(Error::Hypothesis("class_group needs n ≡ 1 mod 4".into()));
    }
    let nv = n
        .value()
        .to_i128()
        .ok_or_else(|| Error::Unsupported("n too large for form enumeration".into()))?;
    let disc = -4 * nv;
    let mut forms = Vec::new();
    let bound = {
        // |b| ≤ √(|D|/3)
        let mut x = 1i128;
        while x * x <= (4 * nv) / 3 {
            x += 1;
        }
        x - 1
    };
    let mut b = -bound;
    while b <= bound {
        if b.rem_euclid(2) == 0 {
            let m = (b * b - disc) / 4; // = a·c
            let mut a = if b == 0 { 1 } else { b.abs() };
            if a == 0 {
                a = 1;
            }
            while a * a <= m {
                if a >= 1 && m % a == 0 {
                    let c = m / a;
                    if b.abs() <= a && a <= c && !(b < 0 && (-b == a || a == c)) {
                        forms.push(Form { a, b, c });
                    }
                }
                a += 1;
            }
        }
        b += 1;
    }
    forms.sort();
    forms.dedup();
    Ok(FormClassGroup {
        discriminant: disc,
        forms,
    })
}

/// Ranks of 2^{s−1}Cl/2^sCl for s = 1, 2, 3, from the explicit 2-Sylow
/// subgroup (orders of iterated squares).
pub fn two_ranks(g: &FormClassGroup) -> TwoSylowRanks {
    let h = g.order() as u64;
    let odd = {
        let mut m = h;
        while m % 2 == 0 {
            m /= 2;
        }
        m
    };
    let sylow: BTreeSet<Form> = g.forms.iter().map(|f| g.power(f, odd)).collect();
    let square_set = |s: &BTreeSet<Form>| -> BTreeSet<Form> {
        s.iter().map(|f| compose(f, f)).collect()
    };
    let s1 = sylow;
    let s2 = square_set(&s1);
    let s4 = square_set(&s2);
    let s8 = square_set(&s4);
    let log2 = |num: usize, den: usize| -> usize {
        let r = num / den;
        assert!(
            num % den == 0 && r.is_power_of_two(),
            "subgroup index {}/{} is not a power of two",
            num,
            den
        );
        r.trailing_zeros() as usize
    };
    TwoSylowRanks {
        h2: log2(s1.len(), s2.len()),
        h4: log2(s2.len(), s4.len()),
        h8: log2(s4.len(), s8.len()),
    }
}

/// Rédei formula: h₂ = k and h₄ = k − rank(A | D₂·1) for n ≡ 1 mod 4.
pub fn redei_h2_h4(n: &TwistParam) -> Result<(usize, usize)> {
    if n.value().mod_floor(&BigInt::from(4)) != BigInt::one() {
        return Err(Error::Hypothesis("Rédei formula needs n ≡ 1 mod 4".into()));
    }
    let k = n.k();
    let a = selmer::matrix_a(n);
    let d2 = selmer::matrix_d(&BigInt::from(2), n)?;
    let mut col = F2Matrix::zeros(k, 1);
    for i in 0..k {
        col.set(i, 0, d2.get(i, i));
    }
    let aug = a.hstack(&col)?;
    Ok((k, k - aug.rank()))
}

/// Which theorem's distinguished divisor is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DVariant {
    /// d | n, d ∉ {1, n}, with (d,−n)_v = 1 ∀v or (2d,−n)_v = 1 ∀v.
    OddThm,
    /// d | n up to sign, d ≠ 1, d ≡ 1 mod 4, (d,n)_v = 1 ∀v.
    EvenThm,
}

/// A candidate distinguished divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DCandidate {
    pub d: BigInt,
    /// OddThm only: satisfied via the (2d, −n) clause rather than (d, −n).
    pub via_2d: bool,
}

fn hilbert_trivial_at_all(a: &BigInt, b: &BigInt, n: &TwistParam) -> bool {
    let mut places = vec![Place::RealInfinite, Place::TwoAdic];
    places.extend(n.primes().iter().cloned().map(Place::OddPrime));
    places
        .iter()
        .all(|v| !hilbert_additive_int(a, b, v).unwrap())
}

/// Scans divisors of n for the distinguished d of the congruent criteria.
/// Returns every candidate; the criteria expect exactly one (h₄ = 1 regime)
/// and surface ambiguity otherwise.
pub fn find_d(n: &TwistParam, variant: DVariant) -> Result<Vec<DCandidate>> {
    let mut out = Vec::new();
    let k = n.k();
    for mask in 0usize..(1 << k) {
        let mut d0 = BigInt::one();
        for (i, p) in n.primes().iter().enumerate() {
            if mask >> i & 1 == 1 {
                d0 *= BigInt::from(p.clone());
            }
        }
        match variant {
            DVariant::EvenThm => {
                for sign in [1i64, -1] {
                    let d = &d0 * BigInt::from(sign);
                    if d.is_one() {
                        continue;
                    }
                    if d.mod_floor(&BigInt::from(4)) != BigInt::one() {
                        continue;
                    }
                    if hilbert_trivial_at_all(&d, n.value(), n) {
                        out.push(DCandidate { d, via_2d: false });
                    }
                }
            }
            DVariant::OddThm => {
                let d = d0.clone();
                if d.is_one() || &d == n.value() {
                    continue;
                }
                let neg_n = -n.value();
                if hilbert_trivial_at_all(&d, &neg_n, n) {
                    out.push(DCandidate { d: d.clone(), via_2d: false });
                } else if hilbert_trivial_at_all(&(&d * 2), &neg_n, n) {
                    out.push(DCandidate { d, via_2d: true });
                }
            }
        }
    }
    out.sort_by(|a, b| a.d.cmp(&b.d));
    Ok(out)
}

/// Per-prime route for (2+√2 / |m|): Π_p legendre(2 + √2 mod p, p) over
/// p | |m|, with √2 any square root of 2 modulo p.
pub fn symbol_2_plus_sqrt2(m: &BigInt) -> Result<i32> {
    validate_sqrt2_symbol_input(m)?;
    let mut sym = 1i32;
    for (p, _) in arith::factorize(m)?.prime_powers {
        let s = padic::sqrt_mod_p(&BigUint::from(2u32), &p)
            .expect("2 is a QR mod p ≡ ±1 mod 8");
        let pb = BigInt::from(p.clone());
        let val = jacobi(&(BigInt::from(s) + 2), &pb)?;
        debug_assert_ne!(val, 0);
        sym *= val;
    }
    Ok(sym)
}

/// Cross-check route via a representation m = u² − 2w²: the symbol equals
/// (2 / |u + 2w|). Returns None when no representation is found below the
/// search bound.
pub fn symbol_2_plus_sqrt2_lambda_route(m: &BigInt) -> Result<Option<i32>> {
    validate_sqrt2_symbol_input(m)?;
    if m.is_one() {
        return Ok(Some(1));
    }
    let bound = m.magnitude().clone();
    let mut w = BigUint::zero();
    while w <= bound {
        let u2 = m + BigInt::from(2u32) * BigInt::from(&w * &w);
        if u2.is_positive() && arith::is_perfect_square(&u2) {
            let u = u2.sqrt();
            let lambda = &u + BigInt::from(2u32) * BigInt::from(w.clone());
            let al = lambda.magnitude();
            if al.is_one() {
                return Ok(Some(1));
            }
            if al.is_odd() {
                return Ok(Some(jacobi(
                    &BigInt::from(2),
                    &BigInt::from(al.clone()),
                )?));
            }
        }
        w += BigUint::one();
    }
    Ok(None)
}

fn validate_sqrt2_symbol_input(m: &BigInt) -> Result<()> {
    if m.is_zero() {
        return Err(Error::ZeroInput);
    }
    if m.mod_floor(&BigInt::from(8)) != BigInt::one() {
        return Err(Error::Hypothesis("m must be ≡ 1 mod 8".into()));
    }
    let f = arith::factorize(m)?;
    if !f.is_squarefree() {
        return Err(Error::Hypothesis("m must be square-free".into()));
    }
    for (p, _) in &f.prime_powers {
        let r = (p % 8u32).to_u32().unwrap();
        if r != 1 && r != 7 {
            return Err(Error::Hypothesis(
                "all prime factors of m must be ≡ ±1 mod 8".into(),
            ));
        }
    }
    Ok(())
}

/// Outcome of a congruent-curve criterion evaluation.
#[derive(Debug, Clone)]
pub struct CongruentReport {
    pub n: BigInt,
    pub hypotheses: selmer::HypothesisReport,
    pub h2: usize,
    pub h4: usize,
    pub h8: usize,
    pub d_candidates: Vec<DCandidate>,
    /// The d used by the criterion, when unambiguous.
    pub d: Option<BigInt>,
    pub d_mod_16: Option<u32>,
    pub criterion: Option<bool>,
    /// What a positive criterion certifies.
    pub statement: String,
    pub ambiguity: Option<String>,
}

fn hypotheses_common(
    n: &TwistParam,
    companion: &CompanionTriple,
    base: &CurveTriple,
) -> Vec<(String, bool)> {
    let abc = companion.product();
    let mut items = vec![
        (
            "n ≡ 1 mod 8".to_string(),
            n.value().mod_floor(&BigInt::from(8)) == BigInt::one(),
        ),
        ("gcd(n, abc) = 1".to_string(), n.value().gcd(&abc).is_one()),
    ];
    let odd_q: Vec<BigUint> = arith::factorize(&abc)
        .unwrap()
        .prime_powers
        .into_iter()
        .filter(|(p, _)| p.is_odd())
        .map(|(p, _)| p)
        .collect();
    let qr = n.primes().iter().all(|p| {
        odd_q
            .iter()
            .all(|q| jacobi(&BigInt::from(p.clone()), &BigInt::from(q.clone())).unwrap() == 1)
    });
    items.push((
        "every p | n is a QR mod every odd prime of abc".to_string(),
        qr,
    ));
    let _ = base;
    items
}

/// Criterion for the odd congruent family: h₄(n) = 1 and
/// h₈(n) ≡ (d−1)/4 mod 2, certifying rank 0 with 2-part of Sha ≅ (ℤ/2ℤ)²
/// for the companion twist.
pub fn congruent_criterion_odd(
    n: &TwistParam,
    companion: &CompanionTriple,
) -> Result<CongruentReport> {
    congruent_criterion_odd_cached(n, companion, None)
}

/// As `congruent_criterion_odd`, with an optional class-group cache.
pub fn congruent_criterion_odd_cached(
    n: &TwistParam,
    companion: &CompanionTriple,
    cache: Option<&mut ClassGroupCache>,
) -> Result<CongruentReport> {
    let base = CurveTriple::normalize(
        &BigInt::one(),
        &BigInt::one(),
        &BigInt::from(-2),
    )
    .unwrap();
    let companion_curve = base.companion_curve(companion);
    let mut items = hypotheses_common(n, companion, &base);
    items.push((
        "every p | n ≡ 1 mod 4".to_string(),
        n.primes().iter().all(|p| (p % 4u32).to_u32() == Some(1)),
    ));
    items.push((
        "Sel2 of the companion curve is minimal".to_string(),
        selmer::check_minimality(&companion_curve)?,
    ));
    let hypotheses = selmer::HypothesisReport { items };
    if !hypotheses.all_ok() {
        return Err(Error::Hypothesis(
            hypotheses.first_failure().unwrap_or("unknown").to_string(),
        ));
    }

    let group = class_group_cached(n, cache)?;
    let ranks = two_ranks(&group);
    let (h2r, h4r) = redei_h2_h4(n)?;
    debug_assert_eq!((ranks.h2, ranks.h4), (h2r, h4r));
    let candidates = find_d(n, DVariant::OddThm)?;
    let statement = format!(
        "rank of the twist by {} of the companion curve is 0 and its Sha[2^oo] = (Z/2Z)^2",
        n.value()
    );
    // h4 != 1 settles the criterion without selecting a divisor
    let (d, criterion, ambiguity) = if ranks.h4 != 1 {
        (None, Some(false), None)
    } else if candidates.is_empty() {
        (
            None,
            None,
            Some(
                "no admissible d (divisor set {1, n} is excluded; \
                 for prime n the criterion does not select a divisor)"
                    .to_string(),
            ),
        )
    } else {
        let parities: BTreeSet<u8> = candidates
            .iter()
            .map(|c| {
                let q = (&c.d - BigInt::one()) / BigInt::from(4);
                (q.mod_floor(&BigInt::from(2))).to_u8().unwrap()
            })
            .collect();
        if parities.len() > 1 {
            (
                None,
                None,
                Some("candidates disagree on (d−1)/4 mod 2".to_string()),
            )
        } else {
            let parity = *parities.iter().next().unwrap() as usize;
            (
                Some(candidates[0].d.clone()),
                Some(ranks.h8 % 2 == parity % 2),
                None,
            )
        }
    };
    Ok(CongruentReport {
        n: n.value().clone(),
        hypotheses,
        h2: ranks.h2,
        h4: ranks.h4,
        h8: ranks.h8,
        d_candidates: candidates,
        d,
        d_mod_16: None,
        criterion,
        statement,
        ambiguity,
    })
}

/// Criterion for the even congruent family: h₄(n) = 1 and d ≡ 9 mod 16,
/// certifying rank 0 with Sha[2^∞] ≅ (ℤ/2ℤ)² for the twist by 2n.
pub fn congruent_criterion_even(
    n: &TwistParam,
    companion: &CompanionTriple,
) -> Result<CongruentReport> {
    congruent_criterion_even_cached(n, companion, None)
}

/// As `congruent_criterion_even`, with an optional class-group cache.
pub fn congruent_criterion_even_cached(
    n: &TwistParam,
    companion: &CompanionTriple,
    cache: Option<&mut ClassGroupCache>,
) -> Result<CongruentReport> {
    let base = CurveTriple::normalize(
        &BigInt::one(),
        &BigInt::one(),
        &BigInt::from(-2),
    )
    .unwrap();
    let mut items = hypotheses_common(n, companion, &base);
    items.push((
        "every p | n ≡ ±1 mod 8".to_string(),
        n.primes().iter().all(|p| {
            let r = (p % 8u32).to_u32().unwrap();
            r == 1 || r == 7
        }),
    ));
    let three_mod4_free = |x: &BigInt| -> bool {
        arith::factorize(x)
            .unwrap()
            .prime_powers
            .iter()
            .all(|(p, _)| (p % 4u32).to_u32() != Some(3))
    };
    items.push((
        "n, a or b has no prime factor ≡ 3 mod 4".to_string(),
        three_mod4_free(n.value())
            || three_mod4_free(companion.a())
            || three_mod4_free(companion.b()),
    ));
    // companion curve twisted by 2: coefficients (2a², 2b², −4c²)
    let twisted2 = CurveTriple::normalize(
        &(BigInt::from(2) * companion.a() * companion.a()),
        &(BigInt::from(2) * companion.b() * companion.b()),
        &(BigInt::from(-4) * companion.c() * companion.c()),
    )?;
    items.push((
        "Sel2 of the companion curve twisted by 2 is minimal".to_string(),
        selmer::check_minimality(&twisted2)?,
    ));
    let hypotheses = selmer::HypothesisReport { items };
    if !hypotheses.all_ok() {
        return Err(Error::Hypothesis(
            hypotheses.first_failure().unwrap_or("unknown").to_string(),
        ));
    }

    let group = class_group_cached(n, cache)?;
    let ranks = two_ranks(&group);
    let (h2r, h4r) = redei_h2_h4(n)?;
    debug_assert_eq!((ranks.h2, ranks.h4), (h2r, h4r));
    let candidates = find_d(n, DVariant::EvenThm)?;
    let statement = format!(
        "rank of the twist by {} of the companion curve is 0 and its Sha[2^oo] = (Z/2Z)^2",
        BigInt::from(2) * n.value()
    );
    let (d, d_mod_16, criterion, ambiguity) = if ranks.h4 == 1 {
        match candidates.len() {
            1 => {
                let d = candidates[0].d.clone();
                let r = d.mod_floor(&BigInt::from(16)).to_u32().unwrap();
                (Some(d), Some(r), Some(r == 9), None)
            }
            0 => (None, None, None, Some("no admissible d found".into())),
            _ => (
                None,
                None,
                None,
                Some(format!("{} admissible d found", candidates.len())),
            ),
        }
    } else {
        (None, None, Some(false), None)
    };
    Ok(CongruentReport {
        n: n.value().clone(),
        hypotheses,
        h2: ranks.h2,
        h4: ranks.h4,
        h8: ranks.h8,
        d_candidates: candidates,
        d,
        d_mod_16,
        criterion,
        statement,
        ambiguity,
    })
}

/// Simple length-prefixed binary cache of class groups keyed by n.
pub struct ClassGroupCache {
    path: std::path::PathBuf,
    entries: HashMap<i64, Vec<Form>>,
}

impl ClassGroupCache {
    pub fn open(path: &std::path::Path) -> Result<ClassGroupCache> {
        let mut entries = HashMap::new();
        if path.exists() {
            let mut data = Vec::new();
            std::fs::File::open(path)
                .and_then(|mut f| f.read_to_end(&mut data))
                .map_err(|e| Error::Unsupported(format!("cache read: {}", e)))?;
            let mut pos = 0usize;
            let take_i64 = |data: &[u8], pos: &mut usize| -> Option<i64> {
                let b = data.get(*pos..*pos + 8)?;
                *pos += 8;
                Some(i64::from_le_bytes(b.try_into().unwrap()))
            };
            while pos < data.len() {
                let Some(nv) = take_i64(&data, &mut pos) else { break };
                let Some(count) = take_i64(&data, &mut pos) else { break };
                let mut forms = Vec::with_capacity(count as usize);
                let mut ok = true;
                for _ in 0..count {
                    let (Some(a), Some(b), Some(c)) = (
                        take_i64(&data, &mut pos),
                        take_i64(&data, &mut pos),
                        take_i64(&data, &mut pos),
                    ) else {
                        ok = false;
                        break;
                    };
                    forms.push(Form {
                        a: a as i128,
                        b: b as i128,
                        c: c as i128,
                    });
                }
                if !ok {
                    break;
                }
                entries.insert(nv, forms);
            }
        }
        Ok(ClassGroupCache {
            path: path.to_path_buf(),
            entries,
        })
    }

    fn get(&self, n: i64) -> Option<&Vec<Form>> {
        self.entries.get(&n)
    }

    fn put(&mut self, n: i64, forms: &[Form]) -> Result<()> {
        let mut buf = Vec::with_capacity(16 + 24 * forms.len());
        buf.extend_from_slice(&n.to_le_bytes());
        buf.extend_from_slice(&(forms.len() as i64).to_le_bytes());
        for f in forms {
            buf.extend_from_slice(&(f.a as i64).to_le_bytes());
            buf.extend_from_slice(&(f.b as i64).to_le_bytes());
            buf.extend_from_slice(&(f.c as i64).to_le_bytes());
        }
        std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .and_then(|mut f| f.write_all(&buf))
            .map_err(|e| Error::Unsupported(format!("cache write: {}", e)))?;
        self.entries.insert(n, forms.to_vec());
        Ok(())
    }
}

/// Class group computation with an optional persistent cache.
pub fn class_group_cached(
    n: &TwistParam,
    cache: Option<&mut ClassGroupCache>,
) -> Result<FormClassGroup> {
    let key = n.value().to_i64();
    if let (Some(cache), Some(key)) = (cache.as_deref(), key) {
        if let Some(forms) = cache.get(key) {
            return Ok(FormClassGroup {
                discriminant: -4 * key as i128,
                forms: forms.clone(),
            });
        }
    }
    let g = class_group(n)?;
    if let (Some(cache), Some(key)) = (cache, key) {
        cache.put(key, &g.forms)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn tw(n: i64) -> TwistParam {
        TwistParam::new(int(n)).unwrap()
    }

    #[test]
    fn class_group_examples() {
        let g = class_group(&tw(1)).unwrap();
        assert_eq!(g.order(), 1);

        // n = 17: cyclic of order 4
        let g = class_group(&tw(17)).unwrap();
        assert_eq!(g.order(), 4);
        let forms: Vec<(i128, i128, i128)> = g.forms.iter().map(|f| (f.a, f.b, f.c)).collect();
        assert!(forms.contains(&(1, 0, 17)));
        assert!(forms.contains(&(2, 2, 9)));
        assert!(forms.contains(&(3, 2, 6)));
        assert!(forms.contains(&(3, -2, 6)));
        assert_eq!(two_ranks(&g), TwoSylowRanks { h2: 1, h4: 1, h8: 0 });

        // n = 21: Klein four group
        let g = class_group(&tw(21)).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(two_ranks(&g), TwoSylowRanks { h2: 2, h4: 0, h8: 0 });
    }

    #[test]
    fn group_laws() {
        for n in [17i64, 21, 65, 105, 145] {
            let g = class_group(&tw(n)).unwrap();
            let id = g.identity();
            for f in &g.forms {
                assert_eq!(compose(&id, f), *f);
                // closure and inverse existence via exponent of the group
                let h = g.order() as u64;
                assert_eq!(g.power(f, h), id);
            }
        }
    }

    #[test]
    fn redei_examples() {
        // p ≡ 1 mod 8 prime → h4 = 1
        assert_eq!(redei_h2_h4(&tw(17)).unwrap(), (1, 1));
        assert_eq!(redei_h2_h4(&tw(41)).unwrap(), (1, 1));
        // p ≡ 5 mod 8 prime → h4 = 0
        assert_eq!(redei_h2_h4(&tw(5)).unwrap(), (1, 0));
        assert_eq!(redei_h2_h4(&tw(13)).unwrap(), (1, 0));
        // n = 21 → h4 = 0 (Klein four group)
        assert_eq!(redei_h2_h4(&tw(21)).unwrap(), (2, 0));
        // agreement with the class group on a range
        for n in [33i64, 57, 65, 105, 129, 145, 161, 185] {
            let t = tw(n);
            let g = class_group(&t).unwrap();
            let r = two_ranks(&g);
            assert_eq!(redei_h2_h4(&t).unwrap(), (r.h2, r.h4), "n = {}", n);
        }
    }

    #[test]
    fn sqrt2_symbol_examples() {
        assert_eq!(symbol_2_plus_sqrt2(&int(1)).unwrap(), 1);
        // 17 ≡ 1 mod 16 → +1
        assert_eq!(symbol_2_plus_sqrt2(&int(17)).unwrap(), 1);
        // 41 ≡ 9 mod 16 → −1
        assert_eq!(symbol_2_plus_sqrt2(&int(41)).unwrap(), -1);
        // both routes agree
        for m in [1i64, 7 * 23, 17, 41, 73, 89, 97, 113, -7, -23, 119] {
            let m = int(m);
            if validate_sqrt2_symbol_input(&m).is_err() {
                continue;
            }
            let a = symbol_2_plus_sqrt2(&m).unwrap();
            if let Some(b) = symbol_2_plus_sqrt2_lambda_route(&m).unwrap() {
                assert_eq!(a, b, "routes disagree for m = {}", m);
            }
            // equivalence with the residue class mod 16
            let is_one_mod_16 = m.mod_floor(&int(16)) == int(1);
            assert_eq!(a == 1, is_one_mod_16, "m = {}", m);
        }
    }

    #[test]
    fn sqrt2_symbol_root_choice_independent() {
        for m in [17i64, 41, 73, 89, 97] {
            let p = BigUint::from(m as u64);
            let s = padic::sqrt_mod_p(&BigUint::from(2u32), &p).unwrap();
            let s2 = &p - &s;
            let v1 = jacobi(&(BigInt::from(s) + 2), &int(m)).unwrap();
            let v2 = jacobi(&(BigInt::from(s2) + 2), &int(m)).unwrap();
            assert_eq!(v1, v2);
        }
    }

    #[test]
    fn find_d_examples() {
        // even variant, n = 17: d = 17 (17 ≡ 1 mod 16)
        let c = find_d(&tw(17), DVariant::EvenThm).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].d, int(17));
        // even variant, n = 41: d = 41 ≡ 9 mod 16
        let c = find_d(&tw(41), DVariant::EvenThm).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].d, int(41));
        assert_eq!(c[0].d.mod_floor(&int(16)), int(9));
        // odd variant, prime n: no candidates
        let c = find_d(&tw(17), DVariant::OddThm).unwrap();
        assert!(c.is_empty());
        // odd variant, n = 65: candidates 5 and 13 via the 2d clause
        let c = find_d(&tw(65), DVariant::OddThm).unwrap();
        let ds: Vec<BigInt> = c.iter().map(|x| x.d.clone()).collect();
        assert!(ds.contains(&int(5)));
        assert!(ds.contains(&int(13)));
    }

    #[test]
    fn congruent_reports() {
        let companion = CompanionTriple::trivial();
        // n = 17: h4 = 1, d ≡ 1 mod 16 → even criterion false
        let r = congruent_criterion_even(&tw(17), &companion).unwrap();
        assert_eq!(r.h4, 1);
        assert_eq!(r.criterion, Some(false));
        // n = 41: d ≡ 9 mod 16 → even criterion true
        let r = congruent_criterion_even(&tw(41), &companion).unwrap();
        assert_eq!(r.criterion, Some(true));
        // odd criterion on prime n surfaces the ambiguity
        let r = congruent_criterion_odd(&tw(17), &companion).unwrap();
        assert!(r.criterion.is_none());
        assert!(r.ambiguity.is_some());
        // odd criterion on n = 65: h4 = 1, h8 = 0, d = 5, (d−1)/4 = 1 → false
        let r = congruent_criterion_odd(&tw(65), &companion).unwrap();
        assert_eq!((r.h4, r.h8), (1, 0));
        assert_eq!(r.criterion, Some(false));
    }

    #[test]
    fn cache_roundtrip() {
        let dir = std::env::temp_dir().join(format!("cgcache-test-{}", std::process::id()));
        let _ = std::fs::remove_file(&dir);
        let mut cache = ClassGroupCache::open(&dir).unwrap();
        let g1 = class_group_cached(&tw(17), Some(&mut cache)).unwrap();
        drop(cache);
        let mut cache = ClassGroupCache::open(&dir).unwrap();
        let g2 = class_group_cached(&tw(17), Some(&mut cache)).unwrap();
        assert_eq!(g1.forms, g2.forms);
        let _ = std::fs::remove_file(&dir);
    }
}
