//! Exact rational and integer linear algebra for small dense systems.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// An integer vector in `ℤˢ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(components: Vec<BigInt>) -> Self {
        IntVector(components)
    }

    pub fn from_i64s(components: &[i64]) -> Self {
        IntVector(components.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        IntVector(vec![BigInt::zero(); dim])
    }

    /// The `i`-th standard basis vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = BigInt::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_components(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn dot_rational(&self, other: &[Rational]) -> Rational {
        debug_assert_eq!(self.dim(), other.len());
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| b * Rational::from_integer(a.clone()))
            .sum()
    }

    pub fn scaled(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|c| c * k).collect())
    }

    /// gcd of the absolute values of the components (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

impl Index<usize> for IntVector {
    type Output = BigInt;

    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl Add for &IntVector {
    type Output = IntVector;

    fn add(self, rhs: &IntVector) -> IntVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntVector {
    type Output = IntVector;

    fn sub(self, rhs: &IntVector) -> IntVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntVector {
    type Output = IntVector;

    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A primitive relation `multiplier·target = Σ coefficients[i]·basis[i]`.
///
/// The multiplier is always positive; the indices with positive coefficient
/// form the "plus" side of the relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerRelation {
    pub multiplier: BigInt,
    pub coefficients: Vec<BigInt>,
}

impl IntegerRelation {
    /// Indices whose coefficient is strictly positive.
    pub fn positive_indices(&self) -> Vec<usize> {
        (0..self.coefficients.len())
            .filter(|&i| self.coefficients[i].is_positive())
            .collect()
    }

    /// Indices whose coefficient is nonzero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.coefficients.len())
            .filter(|&i| !self.coefficients[i].is_zero())
            .collect()
    }

    /// `Σ coefficients[i]·basis[i]`, which equals `multiplier·target`.
    pub fn combination(&self, basis: &[IntVector]) -> IntVector {
        let dim = basis.first().map_or(0, IntVector::dim);
        basis
            .iter()
            .zip(&self.coefficients)
            .fold(IntVector::zero(dim), |acc, (b, c)| &acc + &b.scaled(c))
    }

    /// Drops zero coefficients, returning the reduced relation together with
    /// the retained basis indices.
    pub fn restrict_to_support(&self) -> (IntegerRelation, Vec<usize>) {
        let support = self.support();
        let coefficients = support
            .iter()
            .map(|&i| self.coefficients[i].clone())
            .collect();
        (
            IntegerRelation {
                multiplier: self.multiplier.clone(),
                coefficients,
            },
            support,
        )
    }
}

/// A rational vector `xi` with `⟨xi, a⟩ ≥ 1` for every vector of the system it
/// certifies, proving the generated cone contains no line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedCertificate {
    pub xi: Vec<Rational>,
}

impl PointedCertificate {
    pub fn pairing(&self, a: &IntVector) -> Rational {
        a.dot_rational(&self.xi)
    }

    /// Checks the certificate inequalities against `x`.
    pub fn certifies(&self, x: &[IntVector]) -> bool {
        x.iter()
            .all(|a| a.dim() == self.xi.len() && self.pairing(a) >= Rational::one())
    }

    /// Positive integer multiple of `xi`; the inequalities `⟨ξ, a⟩ ≥ 1` still
    /// hold for it.
    pub fn integer_scaled(&self) -> IntVector {
        let l = self.xi.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        IntVector(
            self.xi
                .iter()
                .map(|q| (q * Rational::from_integer(l.clone())).to_integer())
                .collect(),
        )
    }
}

/// Dense matrix over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: Vec<Vec<Rational>>,
    ncols: usize,
}

impl RatMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch {
                expected: ncols,
                found: bad.len(),
            });
        }
        Ok(RatMatrix { rows, ncols })
    }

    /// The `dim × k` matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, columns: &[IntVector]) -> Self {
        let rows = (0..dim)
            .map(|r| {
                columns
                    .iter()
                    .map(|c| Rational::from_integer(c[r].clone()))
                    .collect()
            })
            .collect();
        RatMatrix {
            rows,
            ncols: columns.len(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.rows[i]
    }

    /// Brings the matrix to reduced row echelon form in place and returns the
    /// pivot column of each nonzero row.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == self.rows.len() {
                break;
            }
            let Some(p) = (r..self.rows.len()).find(|&i| !self.rows[i][c].is_zero()) else {
                continue;
            };
            self.rows.swap(r, p);
            let inv = self.rows[r][c].recip();
            for v in self.rows[r].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = self.rows[r].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * p;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        let n = self.nrows();
        if n != self.ncols {
            return None;
        }
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                }));
                r
            })
            .collect();
        let mut aug = RatMatrix { rows, ncols: 2 * n };
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let rows = aug.rows.into_iter().map(|r| r[n..].to_vec()).collect();
        Some(RatMatrix { rows, ncols: n })
    }
}

enum ColumnSolve {
    Unique(Vec<Rational>),
    Inconsistent,
    Dependent,
}

fn check_dims(basis: &[IntVector], rhs: &IntVector) -> Result<()> {
    for b in basis {
        if b.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: rhs.dim(),
                found: b.dim(),
            });
        }
    }
    Ok(())
}

/// Solves `Σ λᵢ·basisᵢ = rhs`.
fn solve_columns(basis: &[IntVector], rhs: &IntVector) -> ColumnSolve {
    let k = basis.len();
    let mut cols = basis.to_vec();
    cols.push(rhs.clone());
    let mut m = RatMatrix::from_columns(rhs.dim(), &cols);
    let pivots = m.rref();
    let basis_pivots = pivots.iter().filter(|&&c| c < k).count();
    if basis_pivots < k {
        return ColumnSolve::Dependent;
    }
    if pivots.contains(&k) {
        return ColumnSolve::Inconsistent;
    }
    let mut lambda = vec![Rational::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        lambda[c] = m.rows[r][k].clone();
    }
    ColumnSolve::Unique(lambda)
}

/// Solves the square system `Σ λᵢ·basisᵢ = rhs`; `None` when the basis is
/// singular.
pub fn solve_square(basis: &[IntVector], rhs: &IntVector) -> Result<Option<Vec<Rational>>> {
    let s = rhs.dim();
    if basis.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: basis.len(),
        });
    }
    check_dims(basis, rhs)?;
    match solve_columns(basis, rhs) {
        ColumnSolve::Unique(l) => Ok(Some(l)),
        ColumnSolve::Inconsistent | ColumnSolve::Dependent => Ok(None),
    }
}

/// Coordinates of `rhs` in a linearly independent (possibly non-spanning)
/// basis; `None` when `rhs` lies outside the span.
pub fn solve_in_span(basis: &[IntVector], rhs: &IntVector) -> Result<Option<Vec<Rational>>> {
    check_dims(basis, rhs)?;
    match solve_columns(basis, rhs) {
        ColumnSolve::Unique(l) => Ok(Some(l)),
        ColumnSolve::Inconsistent => Ok(None),
        ColumnSolve::Dependent => Err(Error::DependentBasis),
    }
}

/// The primitive relation `m·target = Σ mᵢ·basisᵢ` with `m ≥ 1` minimal, or
/// `None` when `target` is outside the span of `basis`.
pub fn integer_relation(
    basis: &[IntVector],
    target: &IntVector,
) -> Result<Option<IntegerRelation>> {
    let Some(lambda) = solve_in_span(basis, target)? else {
        return Ok(None);
    };
    let multiplier = lambda.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let m = Rational::from_integer(multiplier.clone());
    let coefficients = lambda.iter().map(|q| (q * &m).to_integer()).collect();
    Ok(Some(IntegerRelation {
        multiplier,
        coefficients,
    }))
}

/// Primitive integer vector orthogonal to every basis vector except
/// `basis[i]`, oriented so that its pairing with `basis[i]` is positive.
pub fn orth_complement(basis: &[IntVector], i: usize) -> Result<IntVector> {
    let s = basis.first().map_or(0, IntVector::dim);
    if basis.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: basis.len(),
        });
    }
    if i >= s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: i,
        });
    }
    let inv = RatMatrix::from_columns(s, basis)
        .inverse()
        .ok_or(Error::DependentBasis)?;
    // Row i of B⁻¹ pairs to δᵢⱼ with the columns of B.
    let row = inv.row(i);
    let l = row.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let lr = Rational::from_integer(l);
    let w = IntVector(row.iter().map(|q| (q * &lr).to_integer()).collect());
    let g = w.content();
    Ok(IntVector(w.0.into_iter().map(|c| c / &g).collect()))
}

/// Rank over the rationals of the span of `x`.
pub fn rank(x: &[IntVector]) -> usize {
    let Some(first) = x.first() else {
        return 0;
    };
    RatMatrix::from_columns(first.dim(), x).rank()
}

pub fn is_independent(x: &[IntVector]) -> bool {
    rank(x) == x.len()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Inequality {
    // coeffs·ξ ≥ rhs
    coeffs: Vec<Rational>,
    rhs: Rational,
}

impl Inequality {
    fn normalized(mut self) -> Self {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .filter(|m| !m.is_zero());
        if let Some(m) = scale {
            for c in self.coeffs.iter_mut() {
                *c /= &m;
            }
            self.rhs /= m;
        }
        self
    }
}

/// Eliminates variable `k` from a system in variables `0..=k`.
fn eliminate(system: &[Inequality], k: usize) -> Vec<Inequality> {
    let (mut pos, mut neg, mut out) = (Vec::new(), Vec::new(), Vec::new());
    for ineq in system {
        let c = &ineq.coeffs[k];
        if c.is_positive() {
            pos.push(ineq);
        } else if c.is_negative() {
            neg.push(ineq);
        } else {
            out.push(Inequality {
                coeffs: ineq.coeffs[..k].to_vec(),
                rhs: ineq.rhs.clone(),
            });
        }
    }
    for p in &pos {
        for n in &neg {
            let wp = -n.coeffs[k].clone();
            let wn = p.coeffs[k].clone();
            let coeffs = (0..k)
                .map(|j| &p.coeffs[j] * &wp + &n.coeffs[j] * &wn)
                .collect();
            out.push(Inequality {
                coeffs,
                rhs: &p.rhs * &wp + &n.rhs * &wn,
            });
        }
    }
    let mut out: Vec<_> = out.into_iter().map(Inequality::normalized).collect();
    out.sort();
    out.dedup();
    out
}

/// Finds `ξ` with `⟨ξ, a⟩ ≥ 1` for all `a ∈ x` by Fourier–Motzkin elimination.
/// `None` exactly when the cone generated by `x` is not pointed (or `x` is
/// empty or contains the zero vector).
pub fn pointedness_certificate(x: &[IntVector]) -> Option<PointedCertificate> {
    let s = x.first()?.dim();
    if x.iter().any(|a| a.dim() != s) {
        return None;
    }
    let top: Vec<Inequality> = x
        .iter()
        .map(|a| Inequality {
            coeffs: a
                .0
                .iter()
                .map(|c| Rational::from_integer(c.clone()))
                .collect(),
            rhs: Rational::one(),
        })
        .collect();
    // levels[k] is the system in variables 0..k.
    let mut levels = vec![Vec::new(); s + 1];
    levels[s] = top;
    for k in (0..s).rev() {
        levels[k] = eliminate(&levels[k + 1], k);
    }
    if levels[0].iter().any(|ineq| ineq.rhs.is_positive()) {
        return None;
    }
    let mut xi: Vec<Rational> = Vec::with_capacity(s);
    for k in 0..s {
        let mut lower: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        for ineq in &levels[k + 1] {
            let c = &ineq.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let partial: Rational = (0..k).map(|j| &ineq.coeffs[j] * &xi[j]).sum();
            let bound = (&ineq.rhs - partial) / c;
            if c.is_positive() {
                lower = Some(lower.map_or(bound.clone(), |l| l.max(bound)));
            } else {
                upper = Some(upper.map_or(bound.clone(), |u| u.min(bound)));
            }
        }
        let value = match (lower, upper) {
            (Some(l), Some(u)) => {
                let c = l.ceil();
                if c <= u {
                    c
                } else {
                    l
                }
            }
            (Some(l), None) => l.ceil(),
            (None, Some(u)) => u.floor(),
            (None, None) => Rational::zero(),
        };
        xi.push(value);
    }
    let cert = PointedCertificate { xi };
    debug_assert!(cert.certifies(x));
    Some(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> IntVector {
        IntVector::from_i64s(c)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ints(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn solve_square_examples() {
        let e = [v(&[1, 0]), v(&[0, 1])];
        assert_eq!(
            solve_square(&e, &v(&[3, 5])).unwrap(),
            Some(vec![q(3, 1), q(5, 1)])
        );
        let b = [v(&[1, 0]), v(&[-1, 2])];
        assert_eq!(
            solve_square(&b, &v(&[0, 2])).unwrap(),
            Some(vec![q(1, 1), q(1, 1)])
        );
        let sing = [v(&[1, 0]), v(&[2, 0])];
        assert_eq!(solve_square(&sing, &v(&[1, 0])).unwrap(), None);
    }

    #[test]
    fn solve_square_rejects_bad_dimensions() {
        assert!(solve_square(&[v(&[1, 0])], &v(&[1, 0])).is_err());
        assert!(solve_square(&[v(&[1, 0]), v(&[0, 1, 0])], &v(&[1, 0])).is_err());
    }

    #[test]
    fn integer_relation_examples() {
        let r = integer_relation(&[v(&[1, 0]), v(&[0, 1])], &v(&[-1, 2]))
            .unwrap()
            .unwrap();
        assert_eq!(r.multiplier, BigInt::from(1));
        assert_eq!(r.coefficients, ints(&[-1, 2]));

        let r = integer_relation(&[v(&[2])], &v(&[1])).unwrap().unwrap();
        assert_eq!(r.multiplier, BigInt::from(2));
        assert_eq!(r.coefficients, ints(&[1]));

        let r = integer_relation(&[v(&[2, 1]), v(&[1, 2])], &v(&[1, 1]))
            .unwrap()
            .unwrap();
        assert_eq!(r.multiplier, BigInt::from(3));
        assert_eq!(r.coefficients, ints(&[1, 1]));
        assert_eq!(r.positive_indices(), vec![0, 1]);
    }

    #[test]
    fn integer_relation_outside_span() {
        assert_eq!(
            integer_relation(&[v(&[1, 0, 0])], &v(&[0, 1, 0])).unwrap(),
            None
        );
        assert_eq!(
            integer_relation(&[v(&[1, 0]), v(&[2, 0])], &v(&[1, 0])),
            Err(Error::DependentBasis)
        );
    }

    #[test]
    fn orth_complement_examples() {
        let e = [v(&[1, 0]), v(&[0, 1])];
        assert_eq!(orth_complement(&e, 0).unwrap(), v(&[1, 0]));

        let b = [v(&[1, 0]), v(&[-1, 2])];
        let w0 = orth_complement(&b, 0).unwrap();
        assert_eq!(w0, v(&[2, 1]));
        assert_eq!(w0.dot(&b[0]), BigInt::from(2));
        let w1 = orth_complement(&b, 1).unwrap();
        assert_eq!(w1, v(&[0, 1]));
        assert_eq!(w1.dot(&b[1]), BigInt::from(2));
    }

    #[test]
    fn orth_complement_singular() {
        assert_eq!(
            orth_complement(&[v(&[1, 1]), v(&[2, 2])], 0),
            Err(Error::DependentBasis)
        );
    }

    #[test]
    fn pointedness_examples() {
        let c = pointedness_certificate(&[v(&[1]), v(&[1]), v(&[2])]).unwrap();
        assert_eq!(c.xi, vec![q(1, 1)]);
        assert!(pointedness_certificate(&[v(&[1]), v(&[-1])]).is_none());
        let x = [v(&[1, 0]), v(&[0, 1]), v(&[-1, 2])];
        let c = pointedness_certificate(&x).unwrap();
        assert_eq!(c.xi, vec![q(1, 1), q(1, 1)]);
        assert_eq!(c.pairing(&x[2]), q(1, 1));
    }

    #[test]
    fn pointedness_negative_orthant_and_lines() {
        let c = pointedness_certificate(&[v(&[-1, 0]), v(&[0, -3]), v(&[-2, -1])]).unwrap();
        assert!(c.certifies(&[v(&[-1, 0]), v(&[0, -3]), v(&[-2, -1])]));
        assert!(pointedness_certificate(&[v(&[1, 2]), v(&[-2, -4])]).is_none());
        assert!(pointedness_certificate(&[v(&[1, 0]), v(&[-1, 1]), v(&[0, -1])]).is_none());
        assert!(pointedness_certificate(&[v(&[0, 0])]).is_none());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[v(&[1, 0]), v(&[0, 1])]), 2);
        assert_eq!(rank(&[v(&[1]), v(&[1]), v(&[2])]), 1);
        assert_eq!(rank(&[v(&[2, 4]), v(&[1, 2])]), 1);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn integer_scaled_certificate() {
        let c = PointedCertificate {
            xi: vec![q(1, 2), q(2, 3)],
        };
        assert_eq!(c.integer_scaled(), v(&[3, 4]));
    }
}
