//! Formal sums of exponential-rational terms
//! `q·e^{⟨c,x⟩} · Π_a (1 − e^{−⟨a,x⟩})^{−h_a}`.
//!
//! This is the transform-side representation of lattice functions: the shift
//! `c` is a translation, and each denominator factor is the generating
//! function of a ray of lattice points.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{pointedness_certificate, IntVector, Rational};

/// Pairings closer to zero than this are treated as poles.
pub const SINGULAR_TOL: f64 = 1e-12;

/// `coeff · e^{⟨shift, x⟩}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpMonomial {
    pub coeff: Rational,
    pub shift: IntVector,
}

/// The factor `(1 − e^{−⟨vector, x⟩})^{power}` in a denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DenomFactor {
    pub vector: IntVector,
    pub power: u32,
}

impl DenomFactor {
    pub fn new(vector: IntVector, power: u32) -> Self {
        debug_assert!(power >= 1 && !vector.is_zero());
        DenomFactor { vector, power }
    }
}

type TermKey = (IntVector, Vec<DenomFactor>);

/// A single term `num / Π denom`. Denominator vectors are pairwise distinct
/// and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpRatTerm {
    pub num: ExpMonomial,
    denom: Vec<DenomFactor>,
}

pub(crate) fn merge_factors(factors: impl IntoIterator<Item = DenomFactor>) -> Vec<DenomFactor> {
    let mut merged: BTreeMap<IntVector, u32> = BTreeMap::new();
    for f in factors {
        if f.power > 0 {
            *merged.entry(f.vector).or_insert(0) += f.power;
        }
    }
    merged
        .into_iter()
        .map(|(vector, power)| DenomFactor { vector, power })
        .collect()
}

impl ExpRatTerm {
    pub fn new(
        coeff: Rational,
        shift: IntVector,
        factors: impl IntoIterator<Item = DenomFactor>,
    ) -> Self {
        ExpRatTerm {
            num: ExpMonomial { coeff, shift },
            denom: merge_factors(factors),
        }
    }

    /// The constant term `1` in dimension `dim`.
    pub fn one(dim: usize) -> Self {
        Self::new(Rational::one(), IntVector::zero(dim), [])
    }

    pub fn dim(&self) -> usize {
        self.num.shift.dim()
    }

    pub fn coeff(&self) -> &Rational {
        &self.num.coeff
    }

    pub fn shift(&self) -> &IntVector {
        &self.num.shift
    }

    pub fn denom(&self) -> &[DenomFactor] {
        &self.denom
    }

    pub fn denom_vectors(&self) -> Vec<IntVector> {
        self.denom.iter().map(|f| f.vector.clone()).collect()
    }

    /// Sum of the denominator powers.
    pub fn total_power(&self) -> u32 {
        self.denom.iter().map(|f| f.power).sum()
    }

    fn key(&self) -> TermKey {
        (self.num.shift.clone(), self.denom.clone())
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        ExpRatTerm {
            num: ExpMonomial {
                coeff: &self.num.coeff * k,
                shift: self.num.shift.clone(),
            },
            denom: self.denom.clone(),
        }
    }

    pub fn mul_term(&self, other: &ExpRatTerm) -> Self {
        ExpRatTerm::new(
            &self.num.coeff * &other.num.coeff,
            &self.num.shift + &other.num.shift,
            self.denom.iter().chain(&other.denom).cloned(),
        )
    }

    /// Floating-point value at `x`.
    pub fn eval_numeric(&self, x: &[f64]) -> Result<f64> {
        let mut value =
            self.num.coeff.to_f64().unwrap_or(f64::NAN) * dot_f64(&self.num.shift, x).exp();
        for f in &self.denom {
            let p = dot_f64(&f.vector, x);
            if p.abs() < SINGULAR_TOL {
                return Err(Error::SingularPoint {
                    vector: f.vector.to_string(),
                });
            }
            // 1 − e^{−p}
            let d = -(-p).exp_m1();
            value /= d.powi(f.power as i32);
        }
        Ok(value)
    }
}

fn dot_f64(v: &IntVector, x: &[f64]) -> f64 {
    v.components()
        .iter()
        .zip(x)
        .map(|(c, xi)| c.to_f64().unwrap_or(f64::NAN) * xi)
        .sum()
}

/// A finite sum of [`ExpRatTerm`]s with distinct `(shift, denominator)` keys
/// and nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpRatSum {
    dim: usize,
    terms: BTreeMap<TermKey, Rational>,
}

impl ExpRatSum {
    pub fn zero(dim: usize) -> Self {
        ExpRatSum {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::from_term(ExpRatTerm::one(dim))
    }

    /// `coeff · e^{⟨shift, x⟩}`.
    pub fn monomial(coeff: Rational, shift: IntVector) -> Self {
        Self::from_term(ExpRatTerm::new(coeff, shift, []))
    }

    pub fn from_term(term: ExpRatTerm) -> Self {
        let mut s = Self::zero(term.dim());
        s.push(term);
        s
    }

    /// Collects arbitrary terms into canonical form.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = ExpRatTerm>) -> Self {
        let mut s = Self::zero(dim);
        for t in terms {
            s.push(t);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `term` into the sum, merging with an existing key and dropping
    /// the entry if it cancels.
    pub fn push(&mut self, term: ExpRatTerm) {
        debug_assert_eq!(term.dim(), self.dim);
        let key = term.key();
        self.add_keyed(key, term.num.coeff);
    }

    /// Adds `coeff·e^{⟨shift,x⟩} / Π denom` where `denom` is already merged and
    /// sorted, as returned by [`ExpRatTerm::denom`].
    pub(crate) fn push_parts(&mut self, coeff: Rational, shift: IntVector, denom: &[DenomFactor]) {
        debug_assert_eq!(shift.dim(), self.dim);
        self.add_keyed((shift, denom.to_vec()), coeff);
    }

    fn add_keyed(&mut self, key: TermKey, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ExpRatTerm> + '_ {
        self.terms.iter().map(|((shift, denom), coeff)| ExpRatTerm {
            num: ExpMonomial {
                coeff: coeff.clone(),
                shift: shift.clone(),
            },
            denom: denom.clone(),
        })
    }

    pub fn into_terms(self) -> Vec<ExpRatTerm> {
        self.terms
            .into_iter()
            .map(|((shift, denom), coeff)| ExpRatTerm {
                num: ExpMonomial { coeff, shift },
                denom,
            })
            .collect()
    }

    /// Re-canonicalizes the sum. Sums are kept canonical by every operation,
    /// so this is the identity on well-formed values.
    pub fn normalize(&self) -> Self {
        Self::from_terms(self.dim, self.terms())
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        Self::from_terms(self.dim, self.terms().map(|t| t.scaled(k)))
    }

    pub fn mul_term(&self, term: &ExpRatTerm) -> Self {
        Self::from_terms(self.dim, self.terms().map(|t| t.mul_term(term)))
    }

    /// `self^k` for `k ≥ 0`.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval_numeric(&self, x: &[f64]) -> Result<f64> {
        self.terms().map(|t| t.eval_numeric(x)).sum()
    }

    /// `Σ |term(x)|`, the scale against which cancellation error in
    /// [`ExpRatSum::eval_numeric`] should be measured.
    pub fn eval_magnitude(&self, x: &[f64]) -> Result<f64> {
        self.terms().map(|t| t.eval_numeric(x).map(f64::abs)).sum()
    }
}

impl Add for &ExpRatSum {
    type Output = ExpRatSum;

    fn add(self, rhs: &ExpRatSum) -> ExpRatSum {
        debug_assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for t in rhs.terms() {
            out.push(t);
        }
        out
    }
}

impl Mul for &ExpRatSum {
    type Output = ExpRatSum;

    fn mul(self, rhs: &ExpRatSum) -> ExpRatSum {
        debug_assert_eq!(self.dim, rhs.dim);
        let rhs_terms: Vec<ExpRatTerm> = rhs.terms().collect();
        let mut out = ExpRatSum::zero(self.dim);
        for a in self.terms() {
            for b in &rhs_terms {
                out.push(a.mul_term(b));
            }
        }
        out
    }
}

impl Neg for &ExpRatSum {
    type Output = ExpRatSum;

    fn neg(self) -> ExpRatSum {
        self.scaled(&-Rational::one())
    }
}

impl fmt::Display for ExpRatTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·e^<{}, x>", self.num.coeff, self.num.shift)?;
        for d in &self.denom {
            write!(f, " / (1 - e^-<{}, x>)^{}", d.vector, d.power)?;
        }
        Ok(())
    }
}

impl fmt::Display for ExpRatSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// `Π_{a∈X} (1 − e^{−⟨a,x⟩})^{−1}` with repeated vectors merged into powers.
pub fn laplace_generating(x: &[IntVector]) -> Result<ExpRatTerm> {
    let dim = crate::ambient_dimension(x)?;
    Ok(ExpRatTerm::new(
        Rational::one(),
        IntVector::zero(dim),
        x.iter().map(|a| DenomFactor::new(a.clone(), 1)),
    ))
}

/// `Σ_{j=0}^{m−1} e^{−⟨j·a, x⟩}`, the quotient
/// `(1 − e^{−⟨m·a,x⟩}) / (1 − e^{−⟨a,x⟩})`.
pub fn geometric_factor(a: &IntVector, m: u64) -> ExpRatSum {
    assert!(m >= 1, "geometric factor needs m >= 1");
    ExpRatSum::from_terms(
        a.dim(),
        (0..m).map(|j| ExpRatTerm::new(Rational::one(), a.scaled(&-BigInt::from(j)), [])),
    )
}

/// A seeded point `x` with `⟨a, x⟩ ≥ 0.1` for every listed vector: a scaled
/// pointedness certificate plus a small random perturbation. Pairings land in
/// `[0.1, 5]` whenever the certificate's pairing ratios allow it.
pub fn random_generic_point(vectors: &[IntVector], seed: u64) -> Result<Vec<f64>> {
    let cert = pointedness_certificate(vectors).ok_or(Error::NotPointed)?;
    let xi: Vec<f64> = cert
        .xi
        .iter()
        .map(|q| q.to_f64().unwrap_or(f64::NAN))
        .collect();
    let pairings: Vec<f64> = vectors.iter().map(|a| dot_f64(a, &xi)).collect();
    let p_min = pairings.iter().cloned().fold(f64::INFINITY, f64::min);
    let p_max = pairings.iter().cloned().fold(0.0, f64::max);
    let t = (2.5 / p_max).max(0.2 / p_min);
    let norm1 = vectors
        .iter()
        .map(|a| a.to_f64s().iter().map(|c| c.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let eps = 0.3 * t * p_min / norm1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = xi
        .iter()
        .map(|c| t * c + rng.random_range(-eps..=eps))
        .collect();
    debug_assert!(vectors.iter().all(|a| dot_f64(a, &x) >= 0.1));
    Ok(x)
}

/// `count` generic points drawn from consecutive seeds.
pub fn generic_points(vectors: &[IntVector], seed: u64, count: usize) -> Result<Vec<Vec<f64>>> {
    (0..count as u64)
        .map(|k| random_generic_point(vectors, seed.wrapping_add(k)))
        .collect()
}
