//! Curve triples (e₁,e₂,e₃) with e₁+e₂+e₃ = 0, their parity classification,
//! quadratic twist parameters, torsion images under the descent map, order-4
//! detection, and search for companion triples (a,b,c) with
//! e₁a² + e₂b² + e₃c² = 0.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, is_perfect_square};
use crate::descent::Lambda;
use crate::{Error, Result};

/// The curve y² = x(x−e₁)(x+e₂), stored in the normalized orientation where
/// v₂(e₃) is maximal (so v₂(e₁) = v₂(e₂) ≤ v₂(e₃)).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveTriple {
    e1: BigInt,
    e2: BigInt,
    e3: BigInt,
}

/// 2-adic shape of the triple, which selects the applicable descent theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityCase {
    /// e₁, e₂ odd and 2‖e₃.
    Odd,
    /// 2‖e₁, 2‖e₂ and 4 | e₃.
    Even,
    /// Everything else (e.g. e₁, e₂ odd with 4 | e₃).
    General,
}

impl std::fmt::Display for ParityCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParityCase::Odd => write!(f, "odd"),
            ParityCase::Even => write!(f, "even"),
            ParityCase::General => write!(f, "general"),
        }
    }
}

fn v2(x: &BigInt) -> u64 {
    x.magnitude().trailing_zeros().expect("v2 of zero")
}

impl CurveTriple {
    /// Normalizes (e₁,e₂,e₃) by the cyclic rotation that makes v₂(e₃)
    /// maximal; ties keep the first valid rotation in input order.
    pub fn normalize(e1: &BigInt, e2: &BigInt, e3: &BigInt) -> Result<CurveTriple> {
        if e1.is_zero() || e2.is_zero() || e3.is_zero() {
            return Err(Error::BadCurve("zero coefficient".into()));
        }
        if !(e1 + e2 + e3).is_zero() {
            return Err(Error::BadCurve("coefficients must sum to zero".into()));
        }
        let g = e1.gcd(e2).gcd(e3);
        if g != BigInt::one() && g != BigInt::from(2) {
            return Err(Error::BadCurve(format!("gcd must be 1 or 2, got {}", g)));
        }
        let rotations = [
            [e1.clone(), e2.clone(), e3.clone()],
            [e2.clone(), e3.clone(), e1.clone()],
            [e3.clone(), e1.clone(), e2.clone()],
        ];
        let max_v2 = rotations
            .iter()
            .map(|r| v2(&r[2]))
            .max()
            .unwrap();
        let chosen = rotations
            .into_iter()
            .find(|r| v2(&r[2]) == max_v2)
            .unwrap();
        Ok(CurveTriple {
            e1: chosen[0].clone(),
            e2: chosen[1].clone(),
            e3: chosen[2].clone(),
        })
    }

    pub fn e1(&self) -> &BigInt {
        &self.e1
    }

    pub fn e2(&self) -> &BigInt {
        &self.e2
    }

    pub fn e3(&self) -> &BigInt {
        &self.e3
    }

    pub fn product(&self) -> BigInt {
        &self.e1 * &self.e2 * &self.e3
    }

    pub fn parity_case(&self) -> ParityCase {
        let (v1, v3) = (v2(&self.e1), v2(&self.e3));
        if v1 == 0 && v3 == 1 {
            ParityCase::Odd
        } else if v1 == 1 && v3 >= 2 {
            ParityCase::Even
        } else {
            ParityCase::General
        }
    }

    /// The companion curve built from (a,b,c): coefficients (e₁a², e₂b², e₃c²).
    pub fn companion_curve(&self, t: &CompanionTriple) -> CurveTriple {
        CurveTriple {
            e1: &self.e1 * &t.a * &t.a,
            e2: &self.e2 * &t.b * &t.b,
            e3: &self.e3 * &t.c * &t.c,
        }
    }

    /// True iff the twist E^(n) has a rational point of order 4: one of the
    /// pairs (−e₁n, e₂n), (−e₂n, e₃n), (−e₃n, e₁n) consists of squares.
    pub fn has_order4_point_twisted(&self, n: &BigInt) -> bool {
        let pairs = [
            (-(&self.e1) * n, &self.e2 * n),
            (-(&self.e2) * n, &self.e3 * n),
            (-(&self.e3) * n, &self.e1 * n),
        ];
        pairs
            .iter()
            .any(|(x, y)| is_perfect_square(x) && is_perfect_square(y))
    }

    /// Order-4 detection for the untwisted curve.
    pub fn has_order4_point(&self) -> bool {
        self.has_order4_point_twisted(&BigInt::one())
    }

    /// Images of the four 2-torsion points in (ℚ*/ℚ*²)³ for the twist by n:
    /// square-free parts of (1,1,1), (−e₃n, −e₁e₃, e₁n), (−e₂e₃, e₃n, −e₂n),
    /// (e₂n, −e₁n, −e₁e₂).
    pub fn torsion_images(&self, n: &TwistParam) -> [Lambda; 4] {
        let n = n.value();
        let raw = [
            [BigInt::one(), BigInt::one(), BigInt::one()],
            [-(&self.e3) * n, -(&self.e1) * &self.e3, &self.e1 * n],
            [-(&self.e2) * &self.e3, &self.e3 * n, -(&self.e2) * n],
            [&self.e2 * n, -(&self.e1) * n, -(&self.e1) * &self.e2],
        ];
        raw.map(|t| {
            Lambda::new(
                arith::squarefree_part(&t[0]).unwrap(),
                arith::squarefree_part(&t[1]).unwrap(),
                arith::squarefree_part(&t[2]).unwrap(),
            )
            .expect("torsion image is a valid class")
        })
    }

    /// All primitive odd companion triples with |a|,|b|,|c| ≤ bound,
    /// sign-normalized to a ≡ b ≡ c ≡ 1 mod 4, sorted by (|a|,|b|,|c|).
    pub fn find_companions(&self, bound: u64) -> Vec<CompanionTriple> {
        let mut found = std::collections::BTreeSet::new();
        let bound_sq = BigInt::from(bound) * BigInt::from(bound);
        let mut a = BigInt::one();
        while &a * &a <= bound_sq {
            let mut b = BigInt::one();
            while &b * &b <= bound_sq {
                // e₃c² = −e₁a² − e₂b²
                let rhs = -(&self.e1) * &a * &a - &self.e2 * &b * &b;
                let (q, r) = rhs.div_rem(&self.e3);
                if r.is_zero() && is_perfect_square(&q) {
                    let c = q.sqrt();
                    if c.is_odd() && c <= BigInt::from(bound) {
                        if a.gcd(&b).gcd(&c).is_one() {
                            let t = CompanionTriple::new(self, &a, &b, &c).unwrap();
                            found.insert((t.a.clone(), t.b.clone(), t.c.clone()));
                        }
                    }
                }
                b += 2;
            }
            a += 2;
        }
        found
            .into_iter()
            .map(|(a, b, c)| CompanionTriple { a, b, c })
            .collect()
    }
}

impl std::fmt::Display for CurveTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.e1, self.e2, self.e3)
    }
}

/// Positive odd square-free twist parameter with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwistParam {
    n: BigInt,
    primes: Vec<BigUint>,
}

impl TwistParam {
    pub fn new(n: BigInt) -> Result<TwistParam> {
        if !n.is_positive() || n.is_even() {
            return Err(Error::BadTwist(format!("{} is not positive odd", n)));
        }
        let f = arith::factorize(&n)?;
        if !f.is_squarefree() {
            return Err(Error::BadTwist(format!("{} is not square-free", n)));
        }
        Ok(TwistParam {
            n,
            primes: f.prime_powers.into_iter().map(|(p, _)| p).collect(),
        })
    }

    pub fn one() -> TwistParam {
        TwistParam {
            n: BigInt::one(),
            primes: Vec::new(),
        }
    }

    pub fn value(&self) -> &BigInt {
        &self.n
    }

    /// Sorted prime factors p₁ < … < p_k.
    pub fn primes(&self) -> &[BigUint] {
        &self.primes
    }

    pub fn k(&self) -> usize {
        self.primes.len()
    }
}

impl std::fmt::Display for TwistParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.n)
    }
}

/// Primitive triple of odd integers with e₁a² + e₂b² + e₃c² = 0, stored in
/// the sign normal form a ≡ b ≡ c ≡ 1 mod 4.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompanionTriple {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl CompanionTriple {
    pub fn new(curve: &CurveTriple, a: &BigInt, b: &BigInt, c: &BigInt) -> Result<CompanionTriple> {
        if a.is_even() || b.is_even() || c.is_even() {
            return Err(Error::BadCurve("companion entries must be odd".into()));
        }
        if !a.gcd(b).gcd(c).is_one() {
            return Err(Error::BadCurve("companion triple must be primitive".into()));
        }
        let rel = curve.e1() * a * a + curve.e2() * b * b + curve.e3() * c * c;
        if !rel.is_zero() {
            return Err(Error::BadCurve(format!(
                "({},{},{}) does not satisfy e1 a² + e2 b² + e3 c² = 0",
                a, b, c
            )));
        }
        let four = BigInt::from(4);
        let norm = |x: &BigInt| {
            if x.mod_floor(&four).is_one() {
                x.clone()
            } else {
                -x
            }
        };
        Ok(CompanionTriple {
            a: norm(a),
            b: norm(b),
            c: norm(c),
        })
    }

    /// The degenerate companion (1,1,1); valid only when e₁+e₂+e₃ = 0.
    pub fn trivial() -> CompanionTriple {
        CompanionTriple {
            a: BigInt::one(),
            b: BigInt::one(),
            c: BigInt::one(),
        }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn product(&self) -> BigInt {
        &self.a * &self.b * &self.c
    }
}

impl std::fmt::Display for CompanionTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}
