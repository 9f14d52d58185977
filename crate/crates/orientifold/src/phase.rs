//! Exact circle phases and dense complex unitaries.
//!
//! A [`Phase`] is a rational angle `p/q` taken modulo 1; the value it stands
//! for is `exp(2*pi*i*p/q)`.  All phase algebra (products, powers, inverses)
//! is exact big-integer arithmetic on the angle, so equality of phases is
//! decidable and independent of evaluation order.  Floating point enters only
//! through [`Phase::to_complex`], at the very end of a computation.
//!
//! A [`Unitary`] is a dense row-major `n x n` complex matrix with `f64`
//! entries.  Products of unitaries are evaluated numerically; callers that
//! need a drift bound check [`Unitary::unitarity_defect`] against their own
//! tolerance (the library convention is `1e-9`).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Errors from phase parsing and construction.
#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum PhaseError {
    #[error("phase denominator must be nonzero")]
    ZeroDenominator,
    #[error("malformed phase literal {0:?}: expected \"p/q\"")]
    Malformed(String),
}

/// An exact angle `p/q` modulo 1, stored canonically: `0 <= p < q`,
/// `gcd(p, q) = 1`, `q >= 1`.  The angle 0 is `0/1`.
///
/// The group operation is addition of angles, written multiplicatively
/// throughout this crate because the phase *values* `exp(2*pi*i*angle)`
/// multiply.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Phase {
    num: BigInt,
    den: BigInt,
}

impl Phase {
    /// The trivial phase (angle 0, value 1).
    pub fn one() -> Self {
        Phase {
            num: BigInt::zero(),
            den: BigInt::from(1),
        }
    }

    /// Exact phase with angle `num/den`; reduces modulo 1 and to lowest terms.
    pub fn new(num: i64, den: i64) -> Result<Self, PhaseError> {
        Self::from_bigint(BigInt::from(num), BigInt::from(den))
    }

    /// As [`Phase::new`] but from big integers.
    pub fn from_bigint(num: BigInt, den: BigInt) -> Result<Self, PhaseError> {
        if den.is_zero() {
            return Err(PhaseError::ZeroDenominator);
        }
        let (mut num, mut den) = (num, den);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        num = num.mod_floor(&den);
        let g = num.gcd(&den);
        Ok(Phase {
            num: &num / &g,
            den: &den / &g,
        })
    }

    /// Angle numerator of the canonical representative.
    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    /// Angle denominator of the canonical representative.
    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_one(&self) -> bool {
        self.num.is_zero()
    }

    /// Product of phase values = sum of angles mod 1.
    pub fn mul(&self, other: &Phase) -> Phase {
        // a/b + c/d = (ad + cb)/bd; reduction keeps the integers small.
        let num = &self.num * &other.den + &other.num * &self.den;
        let den = &self.den * &other.den;
        Phase::from_bigint(num, den).expect("nonzero denominator")
    }

    /// Inverse phase value = negated angle.
    pub fn inv(&self) -> Phase {
        Phase::from_bigint(-&self.num, self.den.clone()).expect("nonzero denominator")
    }

    /// Integer power of the phase value = integer multiple of the angle.
    pub fn pow(&self, k: i64) -> Phase {
        Phase::from_bigint(&self.num * BigInt::from(k), self.den.clone())
            .expect("nonzero denominator")
    }

    /// `self` if `sign >= 0`, the inverse if `sign < 0`.  Convenience for the
    /// `+/-1` exponents that appear all over the gluing relations.
    pub fn pow_sign(&self, sign: i64) -> Phase {
        if sign < 0 {
            self.inv()
        } else {
            self.clone()
        }
    }

    /// A phase `x` with `x*x = self` (angle halved).  The other square root is
    /// `x` shifted by `1/2`.
    pub fn halve(&self) -> Phase {
        Phase::from_bigint(self.num.clone(), &self.den * BigInt::from(2))
            .expect("nonzero denominator")
    }

    /// A phase `x` with `m*x = self` as angles (one of the `m` solutions).
    pub fn div_int(&self, m: u64) -> Phase {
        assert!(m > 0, "division by zero");
        Phase::from_bigint(self.num.clone(), &self.den * BigInt::from(m))
            .expect("nonzero denominator")
    }

    /// Integer power with a wide exponent (used by exact linear algebra).
    pub fn pow_i128(&self, k: i128) -> Phase {
        Phase::from_bigint(&self.num * BigInt::from(k), self.den.clone())
            .expect("nonzero denominator")
    }

    /// Numerical value `exp(2*pi*i*angle)`.
    pub fn to_complex(&self) -> Complex64 {
        // The canonical angle is already in [0, 1); convert the reduced
        // fraction, not some accumulated float, so identical phases always
        // produce bit-identical complex values.
        let angle = self.num.to_f64().unwrap_or(0.0) / self.den.to_f64().unwrap_or(1.0);
        let theta = 2.0 * std::f64::consts::PI * angle;
        Complex64::new(theta.cos(), theta.sin())
    }

    /// The `1 x 1` unitary with this phase value as its single entry.
    pub fn to_unitary(&self) -> Unitary {
        Unitary {
            n: 1,
            a: vec![self.to_complex()],
        }
    }
}

/// Product of a path of phases, left to right.  Exact and, because phase
/// multiplication is commutative and associative on canonical forms,
/// independent of the order in which the factors are combined.
pub fn phase_mul(factors: &[Phase]) -> Phase {
    let mut acc = Phase::one();
    for f in factors {
        acc = acc.mul(f);
    }
    acc
}

/// Integer power `p^k` of a phase value.
pub fn phase_pow(p: &Phase, k: i64) -> Phase {
    p.pow(k)
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phase({}/{})", self.num, self.den)
    }
}

impl FromStr for Phase {
    type Err = PhaseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| PhaseError::Malformed(s.to_string()))?;
        let num = BigInt::from_str(p.trim()).map_err(|_| PhaseError::Malformed(s.to_string()))?;
        let den = BigInt::from_str(q.trim()).map_err(|_| PhaseError::Malformed(s.to_string()))?;
        if den.is_zero() {
            return Err(PhaseError::ZeroDenominator);
        }
        Phase::from_bigint(num, den)
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: PhaseError| D::Error::custom(e.to_string()))
    }
}

/// Dense `n x n` complex matrix, row-major.  Constructors in this crate only
/// ever build (numerically) unitary matrices; the type itself does not force
/// unitarity, so validators can measure how far a parsed matrix drifts.
#[derive(Clone, PartialEq)]
pub struct Unitary {
    n: usize,
    a: Vec<Complex64>,
}

impl Unitary {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            a[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Unitary { n, a }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be `n*n`.
    pub fn from_entries(n: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), n * n, "entry count must be n*n");
        Unitary { n, a: entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Unitary) -> Unitary {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let s = self.a[i * n + k];
                if s.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += s * other.a[k * n + j];
                }
            }
        }
        Unitary { n, a: out }
    }

    /// Conjugate transpose; for unitary input this is the inverse.
    pub fn dagger(&self) -> Unitary {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.a[i * n + j].conj();
            }
        }
        Unitary { n, a: out }
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Unitary {
        Unitary {
            n: self.n,
            a: self.a.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.a[i * self.n + i]).sum()
    }

    /// Scales every entry by the value of `p`.
    pub fn scale_by_phase(&self, p: &Phase) -> Unitary {
        let z = p.to_complex();
        Unitary {
            n: self.n,
            a: self.a.iter().map(|w| w * z).collect(),
        }
    }

    /// Max-norm of `self * self^dagger - 1`; zero for an exact unitary.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.mul(&self.dagger());
        let id = Unitary::identity(self.n);
        prod.distance(&id)
    }

    /// Entrywise max-norm distance.
    pub fn distance(&self, other: &Unitary) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Unitary, tol: f64) -> bool {
        self.n == other.n && self.distance(other) <= tol
    }

    /// Row-major entries as `[re, im]` pairs (the JSON wire format).
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| [self.get(i, j).re, self.get(i, j).im]).collect())
            .collect()
    }

    /// Inverse of [`Unitary::to_rows`]; rejects ragged input.
    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<Unitary, PhaseError> {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(PhaseError::Malformed(format!(
                    "matrix row has {} entries, expected {n}",
                    row.len()
                )));
            }
            for e in row {
                a.push(Complex64::new(e[0], e[1]));
            }
        }
        Ok(Unitary { n, a })
    }
}

impl fmt::Debug for Unitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Unitary{}x{}[", self.n, self.n)?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i", z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

impl Serialize for Unitary {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Unitary {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        Unitary::from_rows(&rows).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Ordered matrix product of a path of unitaries: the factors are multiplied
/// left to right exactly as given, so `unitary_path_product(&[a, b, c])`
/// is `a * b * c`.
pub fn unitary_path_product(factors: &[Unitary]) -> Unitary {
    let mut it = factors.iter();
    let first = it.next().expect("path product of an empty path");
    let mut acc = first.clone();
    for f in it {
        acc = acc.mul(f);
    }
    acc
}

/// Haar-ish random unitary: Gram-Schmidt orthonormalization of a complex
/// Gaussian matrix.  Statistical perfection is irrelevant here; what matters
/// is determinism per seed and genuine non-commutativity.
pub fn random_unitary<R: rand::Rng>(rng: &mut R, n: usize) -> Unitary {
    // Box-Muller, two normals per draw.
    let normal = |rng: &mut R| -> (f64, f64) {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        (r * t.cos(), r * t.sin())
    };
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let (re, im) = normal(rng);
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    // Modified Gram-Schmidt on columns.
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..n {
                let d = proj * cols[k][i];
                cols[j][i] -= d;
            }
        }
        let norm: f64 = (0..n).map(|i| cols[j][i].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            cols[j][i] /= norm;
        }
    }
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = cols[j][i];
        }
    }
    Unitary { n, a }
}

/// Uniformly random phase with denominator drawn from a small pool.  Used by
/// the data generators; the pool keeps products of many factors from growing
/// huge denominators while still exercising non-2-adic arithmetic.
pub fn random_phase<R: rand::Rng>(rng: &mut R) -> Phase {
    const DENOMS: [i64; 8] = [2, 3, 4, 6, 8, 12, 24, 5];
    let den = DENOMS[rng.gen_range(0..DENOMS.len())];
    let num = rng.gen_range(0..den);
    Phase::new(num, den).expect("pool denominators are nonzero")
}

/// Random phase that is guaranteed nontrivial (angle != 0).
pub fn random_nontrivial_phase<R: rand::Rng>(rng: &mut R) -> Phase {
    loop {
        let p = random_phase(rng);
        if !p.is_one() {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn phase_strategy() -> impl Strategy<Value = Phase> {
        (-500i64..500, 1i64..60).prop_map(|(p, q)| Phase::new(p, q).unwrap())
    }

    #[test]
    fn canonical_form_examples() {
        assert_eq!(Phase::new(3, 6).unwrap().to_string(), "1/2");
        assert_eq!(Phase::new(-1, 4).unwrap().to_string(), "3/4");
        assert_eq!(Phase::new(7, 7).unwrap().to_string(), "0/1");
        assert_eq!(Phase::new(5, -3).unwrap().to_string(), "1/3");
        assert_eq!(Phase::new(0, 9).unwrap().to_string(), "0/1");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(Phase::new(1, 0), Err(PhaseError::ZeroDenominator));
        assert!("1/0".parse::<Phase>().is_err());
        assert!("1".parse::<Phase>().is_err());
        assert!("a/b".parse::<Phase>().is_err());
    }

    #[test]
    fn display_parse_roundtrip() {
        for s in ["0/1", "1/2", "2/3", "23/24", "1/997"] {
            let p: Phase = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
    }

    #[test]
    fn phase_unitary_embedding_matches() {
        // The 1x1 embedding must reproduce the phase value to <= 1e-12.
        for (p, q) in [(0, 1), (1, 2), (1, 3), (5, 8), (7, 24), (3, 5)] {
            let ph = Phase::new(p, q).unwrap();
            let u = ph.to_unitary();
            let z = ph.to_complex();
            assert!((u.get(0, 0) - z).norm() <= 1e-12);
            assert!(u.unitarity_defect() <= 1e-12);
        }
    }

    #[test]
    fn halve_squares_back() {
        for (p, q) in [(1, 2), (1, 3), (3, 4), (0, 1), (5, 6)] {
            let ph = Phase::new(p, q).unwrap();
            let h = ph.halve();
            assert_eq!(h.mul(&h), ph);
        }
    }

    proptest! {
        #[test]
        fn group_laws(a in phase_strategy(), b in phase_strategy(), c in phase_strategy()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&Phase::one()), a.clone());
            prop_assert!(a.mul(&a.inv()).is_one());
        }

        #[test]
        fn pow_is_iterated_mul(a in phase_strategy(), k in -20i64..20) {
            let by_pow = a.pow(k);
            let mut acc = Phase::one();
            let step = if k >= 0 { a.clone() } else { a.inv() };
            for _ in 0..k.abs() {
                acc = acc.mul(&step);
            }
            prop_assert_eq!(by_pow, acc);
        }

        #[test]
        fn canonical_invariants(a in phase_strategy(), b in phase_strategy()) {
            let p = a.mul(&b);
            prop_assert!(!p.denom().is_negative());
            prop_assert!(!p.numer().is_negative());
            prop_assert!(p.numer() < p.denom() || (p.numer().is_zero()));
            prop_assert!(p.numer().gcd(p.denom()) == BigInt::from(1));
        }

        #[test]
        fn to_complex_is_on_circle(a in phase_strategy()) {
            let z = a.to_complex();
            prop_assert!((z.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn unitary_product_and_dagger() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=4 {
            let u = random_unitary(&mut rng, n);
            let v = random_unitary(&mut rng, n);
            assert!(u.unitarity_defect() <= 1e-12);
            let prod = u.mul(&v);
            assert!(prod.unitarity_defect() <= 1e-11);
            // dagger is the inverse
            assert!(u.mul(&u.dagger()).approx_eq(&Unitary::identity(n), 1e-12));
            // trace cyclicity
            let tuv = u.mul(&v).trace();
            let tvu = v.mul(&u).trace();
            assert!((tuv - tvu).norm() <= 1e-11);
        }
    }

    #[test]
    fn path_product_order() {
        // Path products multiply left to right; check against a hand product
        // of clearly non-commuting matrices.
        let x = Unitary::from_entries(
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let z = Unitary::from_entries(
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
        );
        let xz = unitary_path_product(&[x.clone(), z.clone()]);
        let zx = unitary_path_product(&[z, x]);
        assert!(xz.distance(&zx) > 1.0);
        assert!((xz.get(0, 1) - Complex64::new(-1.0, 0.0)).norm() <= 1e-15);
        assert!((zx.get(0, 1) - Complex64::new(1.0, 0.0)).norm() <= 1e-15);
    }

    #[test]
    fn serde_roundtrip() {
        let p = Phase::new(5, 8).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "\"5/8\"");
        let back: Phase = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);

        let u = Unitary::identity(2);
        let s = serde_json::to_string(&u).unwrap();
        let back: Unitary = serde_json::from_str(&s).unwrap();
        assert!(back.approx_eq(&u, 0.0));
    }
}
