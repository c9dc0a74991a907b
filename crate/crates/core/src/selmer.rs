//! 2-Selmer and pure 2-Selmer groups of quadratic twists, by two independent
//! routes: kernels of F₂ block matrices built from Hilbert symbols, and
//! direct enumeration of everywhere-locally-solvable classes.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, additive_jacobi, hilbert_additive_int, jacobi, m_star, Place};
use crate::curves::{CurveTriple, ParityCase, TwistParam};
use crate::descent::{self, HomogeneousSpace, Lambda};
use crate::f2linalg::{F2Matrix, F2Vector};
use crate::{Error, Result};

/// How a pure Selmer group is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Matrix,
    Direct,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Matrix => write!(f, "matrix"),
            Method::Direct => write!(f, "direct"),
        }
    }
}

/// Options controlling hypothesis checking and oracle depth.
#[derive(Debug, Clone, Copy, Default)]
pub struct SelmerOptions {
    /// Escape hatch: skip the theorem hypothesis checklist (matrix method).
    pub skip_hypothesis_checks: bool,
    /// Extra digits added to every solvability-oracle depth default.
    pub oracle_depth_boost: u32,
}

/// Per-item hypothesis checklist for the matrix method.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub items: Vec<(String, bool)>,
}

impl HypothesisReport {
    pub fn all_ok(&self) -> bool {
        self.items.iter().all(|(_, ok)| *ok)
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.items
            .iter()
            .find(|(_, ok)| !*ok)
            .map(|(name, _)| name.as_str())
    }
}

/// Which kernel description applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// diag(A, A) on coordinates (x, y); all prime factors of n ≡ 1 mod 8.
    General,
    /// [[A+D₋ₑ₃, D₋ₑ₂ₑ₃], [D₋ₑ₁ₑ₃, A+Dₑ₃]] on (x, y).
    Odd,
    /// [[A+Dₑ₂, D₋ₑ₂ₑ₃], [D₋ₑ₁ₑ₂, Aᵀ+Dₑ₂]] on (x, z), starred primes in d₃.
    EvenXZ,
    /// [[A+D₋ₑ₁, D₋ₑ₁ₑ₃], [D₋ₑ₁ₑ₂, Aᵀ+D₋ₑ₁]] on (y, z), starred primes in d₃.
    EvenYZ,
}

/// The kernel presentation of a pure 2-Selmer group.
#[derive(Debug, Clone)]
pub struct SelmerMatrix {
    pub kind: MatrixKind,
    pub matrix: F2Matrix,
    n: TwistParam,
}

/// A computed pure 2-Selmer basis.
#[derive(Debug, Clone)]
pub struct SelmerBasis {
    pub curve: CurveTriple,
    pub n: TwistParam,
    pub case: ParityCase,
    pub method: Method,
    pub basis: Vec<Lambda>,
    /// Kernel coordinates aligned with `basis` (matrix method only).
    pub kernel_vectors: Vec<F2Vector>,
}

impl SelmerBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Every element of the pure group (all 2^dim subset products), each in
    /// the case normal form, sorted. This is the canonical set used to
    /// compare the two computation routes.
    pub fn span_normal_forms(&self) -> Vec<Lambda> {
        assert!(self.basis.len() <= 20, "span too large to enumerate");
        let mut out = Vec::with_capacity(1 << self.basis.len());
        for mask in 0usize..(1 << self.basis.len()) {
            let mut l = Lambda::trivial();
            for (i, b) in self.basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    l = l.mul(b);
                }
            }
            out.push(canonical_normal_form(&self.curve, &self.n, &l));
        }
        out.sort();
        out.dedup();
        out
    }
}

/// The symbol matrix A = ([p_j, −n]_{p_i})_{i,j}.
pub fn matrix_a(n: &TwistParam) -> F2Matrix {
    let k = n.k();
    let mut m = F2Matrix::zeros(k, k);
    let neg_n = -n.value();
    for i in 0..k {
        let place = Place::OddPrime(n.primes()[i].clone());
        for j in 0..k {
            let pj = BigInt::from(n.primes()[j].clone());
            let bit = hilbert_additive_int(&pj, &neg_n, &place).expect("valid symbol");
            m.set(i, j, bit);
        }
    }
    m
}

/// The diagonal matrix D_u = diag([u/p₁], …, [u/p_k]).
pub fn matrix_d(u: &BigInt, n: &TwistParam) -> Result<F2Matrix> {
    if !u.gcd(n.value()).is_one() {
        return Err(Error::NotCoprime);
    }
    let k = n.k();
    let mut m = F2Matrix::zeros(k, k);
    for i in 0..k {
        let p = BigInt::from(n.primes()[i].clone());
        m.set(i, i, additive_jacobi(u, &p)?);
    }
    Ok(m)
}

fn all_primes_cong(n: &TwistParam, modulus: u32, residue: u32) -> bool {
    n.primes()
        .iter()
        .all(|p| (p % modulus).to_u32() == Some(residue))
}

fn odd_prime_factors(x: &BigInt) -> Vec<BigUint> {
    arith::factorize(x)
        .unwrap()
        .prime_powers
        .into_iter()
        .filter(|(p, _)| p.is_odd())
        .map(|(p, _)| p)
        .collect()
}

fn qr_condition(n: &TwistParam, moduli: &[BigUint]) -> bool {
    n.primes().iter().all(|p| {
        moduli.iter().all(|q| {
            jacobi(&BigInt::from(p.clone()), &BigInt::from(q.clone())).unwrap() == 1
        })
    })
}

fn qr_condition_starred(n: &TwistParam, moduli: &[BigUint]) -> bool {
    n.primes().iter().all(|p| {
        let star = m_star(&BigInt::from(p.clone())).unwrap();
        moduli
            .iter()
            .all(|q| jacobi(&star, &BigInt::from(q.clone())).unwrap() == 1)
    })
}

fn even_kind(curve: &CurveTriple, n: &TwistParam) -> Result<MatrixKind> {
    let (e1, e2, e3) = (curve.e1(), curve.e2(), curve.e3());
    if e2.is_positive() && e3.is_negative() {
        Ok(MatrixKind::EvenXZ)
    } else if e3.is_positive() && e1.is_negative() {
        Ok(MatrixKind::EvenYZ)
    } else if all_primes_cong(n, 4, 1) {
        Ok(MatrixKind::EvenXZ)
    } else {
        Err(Error::Hypothesis(
            "even case needs e2>0,e3<0 or e3>0,e1<0 or all p | n ≡ 1 mod 4".into(),
        ))
    }
}

/// Theorem hypothesis checklist for the matrix route on (curve, n).
pub fn check_hypotheses(curve: &CurveTriple, n: &TwistParam) -> Result<HypothesisReport> {
    let mut items: Vec<(String, bool)> = Vec::new();
    let eprod = curve.product();
    items.push((
        "gcd(n, e1·e2·e3) = 1".into(),
        n.value().gcd(&eprod).is_one(),
    ));
    let odd_q = odd_prime_factors(&eprod);
    items.push((
        "every p | n is a QR modulo every odd q | e1·e2·e3".into(),
        qr_condition(n, &odd_q),
    ));
    items.push((
        "Sel2(E) is minimal ((Z/2Z)^2)".into(),
        check_minimality(curve)?,
    ));
    match curve.parity_case() {
        ParityCase::Odd => {}
        ParityCase::General => {
            items.push((
                "E has no rational point of order 4".into(),
                !curve.has_order4_point(),
            ));
            items.push((
                "E^(n) has no rational point of order 4".into(),
                !curve.has_order4_point_twisted(n.value()),
            ));
            items.push((
                "every p | n ≡ 1 mod 8".into(),
                all_primes_cong(n, 8, 1),
            ));
        }
        ParityCase::Even => {
            items.push((
                "E has no rational point of order 4".into(),
                !curve.has_order4_point(),
            ));
            items.push((
                "E^(n) has no rational point of order 4".into(),
                !curve.has_order4_point_twisted(n.value()),
            ));
            match even_kind(curve, n) {
                Ok(MatrixKind::EvenXZ) => {
                    let q = odd_prime_factors(&(curve.e2() * curve.e3()));
                    items.push((
                        "(p*/q) = 1 for odd q | e2·e3".into(),
                        qr_condition_starred(n, &q),
                    ));
                }
                Ok(MatrixKind::EvenYZ) => {
                    let q = odd_prime_factors(&(curve.e1() * curve.e3()));
                    items.push((
                        "(p*/q) = 1 for odd q | e1·e3".into(),
                        qr_condition_starred(n, &q),
                    ));
                }
                Ok(_) => unreachable!(),
                Err(_) => {
                    items.push((
                        "even case sign/congruence branch applies".into(),
                        false,
                    ));
                }
            }
        }
    }
    Ok(HypothesisReport { items })
}

/// Builds the kernel presentation of Sel₂′(E^(n)) for the applicable case.
pub fn selmer_matrix(
    curve: &CurveTriple,
    n: &TwistParam,
    opts: &SelmerOptions,
) -> Result<SelmerMatrix> {
    if !opts.skip_hypothesis_checks {
        let report = check_hypotheses(curve, n)?;
        if !report.all_ok() {
            return Err(Error::Hypothesis(
                report.first_failure().unwrap_or("unknown").to_string(),
            ));
        }
    }
    let a = matrix_a(n);
    let (e1, e2, e3) = (curve.e1(), curve.e2(), curve.e3());
    let kind = match curve.parity_case() {
        ParityCase::General => MatrixKind::General,
        ParityCase::Odd => MatrixKind::Odd,
        ParityCase::Even => even_kind(curve, n)?,
    };
    let matrix = match kind {
        MatrixKind::General => {
            let z = F2Matrix::zeros(n.k(), n.k());
            F2Matrix::concat_blocks(&a, &z, &z, &a)?
        }
        MatrixKind::Odd => {
            let tl = a.add(&matrix_d(&-e3.clone(), n)?)?;
            let tr = matrix_d(&-(e2 * e3), n)?;
            let bl = matrix_d(&-(e1 * e3), n)?;
            let br = a.add(&matrix_d(e3, n)?)?;
            F2Matrix::concat_blocks(&tl, &tr, &bl, &br)?
        }
        MatrixKind::EvenXZ => {
            let at = a.transpose();
            let de2 = matrix_d(e2, n)?;
            let tl = a.add(&de2)?;
            let tr = matrix_d(&-(e2 * e3), n)?;
            let bl = matrix_d(&-(e1 * e2), n)?;
            let br = at.add(&de2)?;
            F2Matrix::concat_blocks(&tl, &tr, &bl, &br)?
        }
        MatrixKind::EvenYZ => {
            let at = a.transpose();
            let dne1 = matrix_d(&-e1.clone(), n)?;
            let tl = a.add(&dne1)?;
            let tr = matrix_d(&-(e1 * e3), n)?;
            let bl = matrix_d(&-(e1 * e2), n)?;
            let br = at.add(&dne1)?;
            F2Matrix::concat_blocks(&tl, &tr, &bl, &br)?
        }
    };
    Ok(SelmerMatrix {
        kind,
        matrix,
        n: n.clone(),
    })
}

impl SelmerMatrix {
    /// Decodes a kernel vector into the class it represents.
    pub fn decode(&self, v: &F2Vector) -> Lambda {
        let k = self.n.k();
        assert_eq!(v.len(), 2 * k);
        let primes = self.n.primes();
        let p_int = |i: usize| BigInt::from(primes[i].clone());
        let mut d1 = BigInt::one();
        let mut d2 = BigInt::one();
        let mut d3 = BigInt::one();
        match self.kind {
            MatrixKind::General | MatrixKind::Odd => {
                for i in 0..k {
                    let (x, y) = (v.get(i), v.get(k + i));
                    if x {
                        d1 *= p_int(i);
                    }
                    if y {
                        d2 *= p_int(i);
                    }
                    if x ^ y {
                        d3 *= p_int(i);
                    }
                }
            }
            MatrixKind::EvenXZ => {
                for i in 0..k {
                    let (x, z) = (v.get(i), v.get(k + i));
                    if x {
                        d1 *= p_int(i);
                    }
                    if x ^ z {
                        d2 *= p_int(i);
                    }
                    if z {
                        d2 *= m_star(&p_int(i)).unwrap() / p_int(i); // (−1/p) sign
                        d3 *= m_star(&p_int(i)).unwrap();
                    }
                }
            }
            MatrixKind::EvenYZ => {
                for i in 0..k {
                    let (y, z) = (v.get(i), v.get(k + i));
                    if y {
                        d2 *= p_int(i);
                    }
                    if y ^ z {
                        d1 *= p_int(i);
                    }
                    if z {
                        d1 *= m_star(&p_int(i)).unwrap() / p_int(i);
                        d3 *= m_star(&p_int(i)).unwrap();
                    }
                }
            }
        }
        Lambda::new(d1, d2, d3).expect("decoded class is valid")
    }

    pub fn kernel_basis(&self) -> Vec<F2Vector> {
        self.matrix.kernel_basis()
    }
}

/// The case normal form of a class modulo torsion: positive divisors of n
/// in the odd/general cases; odd divisors with d₁ > 0, d₃ ≡ 1 mod 4 in the
/// even case. Falls back to the deterministic testing representative when
/// no torsion multiple meets the normal form.
pub fn canonical_normal_form(curve: &CurveTriple, n: &TwistParam, lambda: &Lambda) -> Lambda {
    let candidates: Vec<Lambda> = curve
        .torsion_images(n)
        .iter()
        .map(|t| lambda.mul(t))
        .collect();
    let nv = n.value();
    let fits = |l: &Lambda| -> bool {
        match curve.parity_case() {
            ParityCase::Odd | ParityCase::General => l
                .parts_vec()
                .iter()
                .all(|d| d.is_positive() && nv.mod_floor(d).is_zero()),
            ParityCase::Even => {
                l.parts_vec().iter().all(|d| {
                    d.is_odd() && nv.mod_floor(&BigInt::from(d.magnitude().clone())).is_zero()
                }) && l.d1().is_positive()
                    && l.d3().mod_floor(&BigInt::from(4)).is_one()
            }
        }
    };
    candidates
        .into_iter()
        .filter(fits)
        .min_by_key(|l| (l.d1().magnitude().clone(), l.d2().magnitude().clone()))
        .unwrap_or_else(|| descent::reduce_for_testing(curve, n, lambda))
}

/// All candidate classes for direct enumeration: (d₁,d₂) over signed
/// square-free divisors of 2e₁e₂e₃n, with d₃ the square-class completion.
pub fn enumerate_direct_candidates(curve: &CurveTriple, n: &TwistParam) -> Result<Vec<Lambda>> {
    let support: Vec<BigInt> = arith::factorize(&(curve.product() * n.value() * 2))?
        .prime_powers
        .into_iter()
        .map(|(p, _)| BigInt::from(p))
        .collect();
    if support.len() > 16 {
        return Err(Error::Unsupported(
            "more than 16 distinct primes in 2·e1·e2·e3·n".into(),
        ));
    }
    let mut divisors = vec![BigInt::one()];
    for p in &support {
        let mut next = Vec::with_capacity(divisors.len() * 2);
        for d in &divisors {
            next.push(d.clone());
            next.push(d * p);
        }
        divisors = next;
    }
    let mut out = Vec::with_capacity(4 * divisors.len() * divisors.len());
    for d1 in &divisors {
        for s1 in [1i64, -1] {
            for d2 in &divisors {
                for s2 in [1i64, -1] {
                    let a = d1 * s1;
                    let b = d2 * s2;
                    let c = arith::squarefree_part(&(&a * &b))?;
                    out.push(Lambda::new_unchecked(a, b, c));
                }
            }
        }
    }
    Ok(out)
}

fn encode_class(lambda: &Lambda, support: &[BigUint]) -> F2Vector {
    // (sign, exponents) of d1 and d2; d3 is determined
    let mut v = F2Vector::zeros(2 * (support.len() + 1));
    let offsets = [0, support.len() + 1];
    for (c, d) in [lambda.d1(), lambda.d2()].into_iter().enumerate() {
        let base = offsets[c];
        if d.is_negative() {
            v.set(base, true);
        }
        for (i, p) in support.iter().enumerate() {
            let pb = BigInt::from(p.clone());
            if d.mod_floor(&pb).is_zero() {
                v.set(base + 1 + i, true);
            }
        }
    }
    v
}

struct F2Span {
    rows: Vec<F2Vector>,
}

impl F2Span {
    fn new() -> F2Span {
        F2Span { rows: Vec::new() }
    }

    /// Returns true when v was independent (and absorbs it).
    fn insert(&mut self, v: &F2Vector) -> bool {
        let mut v = v.clone();
        for row in &self.rows {
            let pivot = row.iter_ones().next().unwrap();
            if v.get(pivot) {
                v.xor_assign(row);
            }
        }
        if v.is_zero() {
            return false;
        }
        self.rows.push(v);
        self.rows.sort_by_key(|r| r.iter_ones().next().unwrap());
        true
    }
}

/// Computes the pure 2-Selmer group of E^(n).
pub fn pure_selmer(
    curve: &CurveTriple,
    n: &TwistParam,
    method: Method,
    opts: &SelmerOptions,
) -> Result<SelmerBasis> {
    match method {
        Method::Matrix => {
            let sm = selmer_matrix(curve, n, opts)?;
            let kernel = sm.kernel_basis();
            let basis = kernel.iter().map(|v| sm.decode(v)).collect();
            Ok(SelmerBasis {
                curve: curve.clone(),
                n: n.clone(),
                case: curve.parity_case(),
                method,
                basis,
                kernel_vectors: kernel,
            })
        }
        Method::Direct => {
            if !n.value().gcd(&curve.product()).is_one() {
                return Err(Error::Hypothesis("direct method needs gcd(n, e1·e2·e3) = 1".into()));
            }
            let support: Vec<BigUint> = arith::factorize(&(curve.product() * n.value() * 2))?
                .prime_powers
                .into_iter()
                .map(|(p, _)| p)
                .collect();
            let mut solvable: Vec<Lambda> = Vec::new();
            for cand in enumerate_direct_candidates(curve, n)? {
                let d = HomogeneousSpace::new(curve.clone(), n.clone(), cand.clone());
                if descent::global_solvable_everywhere_with(&d, opts.oracle_depth_boost)? {
                    solvable.push(cand);
                }
            }
            solvable.sort();
            // quotient by the torsion images
            let mut span = F2Span::new();
            for t in curve.torsion_images(n) {
                span.insert(&encode_class(&t, &support));
            }
            let mut basis = Vec::new();
            for l in &solvable {
                if span.insert(&encode_class(l, &support)) {
                    basis.push(canonical_normal_form(curve, n, l));
                }
            }
            basis.sort();
            Ok(SelmerBasis {
                curve: curve.clone(),
                n: n.clone(),
                case: curve.parity_case(),
                method,
                basis,
                kernel_vectors: Vec::new(),
            })
        }
    }
}

/// True iff Sel₂(E/ℚ) is exactly the four torsion classes, i.e. the pure
/// 2-Selmer group at n = 1 is trivial.
pub fn check_minimality(curve: &CurveTriple) -> Result<bool> {
    let basis = pure_selmer(
        curve,
        &TwistParam::one(),
        Method::Direct,
        &SelmerOptions::default(),
    )?;
    Ok(basis.dimension() == 0)
}

impl Lambda {
    fn parts_vec(&self) -> [&BigInt; 3] {
        [self.d1(), self.d2(), self.d3()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn curve(e1: i64, e2: i64, e3: i64) -> CurveTriple {
        CurveTriple::normalize(&int(e1), &int(e2), &int(e3)).unwrap()
    }

    fn tw(n: i64) -> TwistParam {
        TwistParam::new(int(n)).unwrap()
    }

    fn bits(m: &F2Matrix) -> Vec<Vec<u8>> {
        (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| m.get(r, c) as u8).collect())
            .collect()
    }

    #[test]
    fn matrix_a_examples() {
        // prime n: A = [0]
        for p in [3i64, 5, 7, 41] {
            let a = matrix_a(&tw(p));
            assert_eq!(bits(&a), vec![vec![0]]);
        }
        // n = 15: both symbols nontrivial
        let a = matrix_a(&tw(15));
        assert_eq!(bits(&a), vec![vec![1, 1], vec![1, 1]]);
        // A·1 = 0 for every n
        for n in [15i64, 21, 33, 35, 105, 165, 195, 231] {
            let t = tw(n);
            let a = matrix_a(&t);
            let ones = F2Vector::from_bits(&vec![1; t.k()]);
            assert!(a.mul_vec(&ones).unwrap().is_zero(), "A·1 != 0 for n={}", n);
        }
    }

    #[test]
    fn matrix_d_examples() {
        let t5 = tw(5);
        assert_eq!(bits(&matrix_d(&int(1), &t5).unwrap()), vec![vec![0]]);
        assert_eq!(bits(&matrix_d(&int(2), &t5).unwrap()), vec![vec![1]]);
        assert_eq!(bits(&matrix_d(&int(2), &tw(17)).unwrap()), vec![vec![0]]);
        assert!(matrix_d(&int(5), &t5).is_err());
    }

    #[test]
    fn selmer_matrix_odd_case_examples() {
        let c = curve(1, 1, -2);
        let opts = SelmerOptions::default();
        let m = selmer_matrix(&c, &tw(3), &opts).unwrap();
        assert_eq!(m.kind, MatrixKind::Odd);
        assert_eq!(bits(&m.matrix), vec![vec![1, 1], vec![1, 0]]);
        let m = selmer_matrix(&c, &tw(5), &opts).unwrap();
        assert_eq!(bits(&m.matrix), vec![vec![1, 1], vec![1, 1]]);
        let m = selmer_matrix(&c, &tw(41), &opts).unwrap();
        assert_eq!(bits(&m.matrix), vec![vec![0, 0], vec![0, 0]]);
    }

    #[test]
    fn pure_selmer_dimensions_and_agreement() {
        let c = curve(1, 1, -2);
        let opts = SelmerOptions::default();
        for (n, dim) in [(3i64, 0usize), (5, 1), (41, 2)] {
            let mb = pure_selmer(&c, &tw(n), Method::Matrix, &opts).unwrap();
            let db = pure_selmer(&c, &tw(n), Method::Direct, &opts).unwrap();
            assert_eq!(mb.dimension(), dim, "matrix dim for n={}", n);
            assert_eq!(db.dimension(), dim, "direct dim for n={}", n);
            assert_eq!(
                mb.span_normal_forms(),
                db.span_normal_forms(),
                "span mismatch for n={}",
                n
            );
        }
        let mb = pure_selmer(&c, &tw(41), Method::Matrix, &opts).unwrap();
        let span = mb.span_normal_forms();
        assert!(span.contains(&Lambda::new(int(41), int(1), int(41)).unwrap()));
        assert!(span.contains(&Lambda::new(int(1), int(41), int(41)).unwrap()));
    }

    #[test]
    fn minimality_examples() {
        assert!(check_minimality(&curve(1, 1, -2)).unwrap());
        assert!(check_minimality(&curve(49, 1, -50)).unwrap());
        assert!(check_minimality(&curve(2, 2, -4)).unwrap());
    }

    #[test]
    fn order4_hypothesis_detected() {
        let c = CurveTriple::normalize(&int(-1), &int(4), &int(-3)).unwrap();
        let r = check_hypotheses(&c, &tw(5)).unwrap();
        assert!(!r.all_ok());
        assert!(selmer_matrix(&c, &tw(5), &SelmerOptions::default()).is_err());
    }

    #[test]
    fn congruent_block_kernel_lower_bound() {
        // Ker [[A,O],[D₋₁,Aᵀ]] contains (0,d) and (1,d+1) for d ∈ Ker Aᵀ,
        // so the kernel always has at least four vectors.
        for n in [17i64, 41, 65, 105, 161, 329] {
            let t = tw(n);
            let k = t.k();
            let a = matrix_a(&t);
            let m = F2Matrix::concat_blocks(
                &a,
                &F2Matrix::zeros(k, k),
                &matrix_d(&int(-1), &t).unwrap(),
                &a.transpose(),
            )
            .unwrap();
            let at_kernel = a.transpose().kernel_basis();
            assert!(!at_kernel.is_empty(), "A·1 = 0 forces rank A ≤ k−1");
            let ones = F2Vector::from_bits(&vec![1; k]);
            for d in &at_kernel {
                let zero_d = F2Vector::zeros(k).concat(d);
                assert!(m.mul_vec(&zero_d).unwrap().is_zero());
                let mut d1 = d.clone();
                d1.xor_assign(&ones);
                let one_d1 = ones.concat(&d1);
                assert!(m.mul_vec(&one_d1).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn starred_symbol_identity() {
        // ([p_i*, −n]_{p_j})_{i,j} = Aᵀ + D₋₁, entrywise, for odd square-free n
        for n in [15i64, 21, 33, 35, 105, 161, 195] {
            let t = tw(n);
            let k = t.k();
            let a = matrix_a(&t);
            let dm1 = matrix_d(&int(-1), &t).unwrap();
            let expect = a.transpose().add(&dm1).unwrap();
            let mut got = F2Matrix::zeros(k, k);
            for i in 0..k {
                let pi_star = m_star(&BigInt::from(t.primes()[i].clone())).unwrap();
                for j in 0..k {
                    let place = Place::OddPrime(t.primes()[j].clone());
                    let bit = hilbert_additive_int(&pi_star, &-t.value(), &place).unwrap();
                    got.set(j, i, bit);
                }
            }
            assert_eq!(bits(&got), bits(&expect), "identity fails for n={}", n);
        }
    }
}
