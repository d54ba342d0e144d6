//! Inverse transform of a reduced generating function into a closed form:
//! a sum of polynomials, each supported on a shifted lattice cone.
//!
//! A reduced term `q·e^{⟨c,x⟩} / Π_i (1 − e^{−⟨bᵢ,x⟩})^{hᵢ}` over a basis
//! `B = {b₁, …, b_s}` is the transform of
//!
//! ```text
//! α ↦ q · Π_i Π_{j=1}^{hᵢ−1} ⟨Bᵢ⊥, α + c + j·bᵢ⟩ / ((hᵢ−1)! ⟨Bᵢ⊥, bᵢ⟩^{hᵢ−1})
//! ```
//!
//! restricted to `{v₀ + Σ λᵢbᵢ : λ ∈ ℕˢ}` with `v₀ = −c − Σ (hᵢ−1)·bᵢ`, where
//! `Bᵢ⊥` is orthogonal to every basis vector but `bᵢ`. The polynomial vanishes
//! on the extra layers `λᵢ ∈ {0, …, hᵢ−2}` that the shifted support adds, so
//! the piece is exact on all of `ℤˢ`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::exp_algebra::{DenomFactor, ExpRatTerm};
use crate::linalg::{is_independent, orth_complement, solve_square, IntVector, Rational};
use crate::toric::{toric_reduce, ReducedForm};

/// Multivariate polynomial with rational coefficients in `nvars` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_monomial(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// `⟨w, x⟩ + c`.
    pub fn linear(w: &IntVector, c: Rational) -> Self {
        let n = w.dim();
        let mut p = Self::constant(n, c);
        for (k, wk) in w.components().iter().enumerate() {
            let mut e = vec![0; n];
            e[k] = 1;
            p.add_monomial(e, Rational::from_integer(wk.clone()));
        }
        p
    }

    pub fn from_monomials(
        nvars: usize,
        monomials: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in monomials {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_monomial(e, c);
        }
        Ok(p)
    }

    pub fn add_monomial(&mut self, exponents: Vec<u32>, c: Rational) {
        debug_assert_eq!(exponents.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(exponents.clone())
            .or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exponents);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Monomials in increasing lexicographic order of exponent vectors.
    pub fn monomials(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_monomial(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_monomial(e, c1 * c2);
            }
        }
        out
    }

    pub fn scaled(&self, k: &Rational) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_monomial(e.clone(), c * k);
        }
        out
    }

    pub fn eval(&self, point: &[BigInt]) -> Rational {
        debug_assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: BigInt = e.iter().zip(point).map(|(&k, x)| Pow::pow(x, k)).product();
                c * Rational::from_integer(m)
            })
            .sum()
    }
}

/// Variable names used when printing polynomials.
pub fn variable_name(k: usize, nvars: usize) -> String {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    if nvars <= NAMES.len() {
        NAMES[k].to_string()
    } else {
        format!("x{}", k + 1)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest degree first.
        let mut monos: Vec<_> = self.terms.iter().collect();
        monos.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (i, (e, c)) in monos.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| {
                    let name = variable_name(j, self.nvars);
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{abs}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A polynomial restricted to the shifted lattice cone
/// `{offset + Σ λᵢ·basisᵢ : λ ∈ ℕˢ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConePiece {
    pub basis: Vec<IntVector>,
    pub offset: IntVector,
    pub poly: MultiPoly,
}

impl ConePiece {
    pub fn contains(&self, alpha: &IntVector) -> Result<bool> {
        support_membership(&self.basis, &self.offset, alpha)
    }

    pub fn eval(&self, alpha: &IntVector) -> Result<Rational> {
        Ok(if self.contains(alpha)? {
            self.poly.eval(alpha.components())
        } else {
            Rational::zero()
        })
    }
}

/// A closed form of `t_X`: the sum of its cone pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub source: Vec<IntVector>,
    pub pieces: Vec<ConePiece>,
}

impl ClosedForm {
    pub fn dim(&self) -> usize {
        self.source.first().map_or(0, IntVector::dim)
    }

    /// Merges pieces with equal (sorted basis, offset) and drops zero pieces.
    pub fn from_pieces(source: Vec<IntVector>, pieces: Vec<ConePiece>) -> Self {
        let mut merged: BTreeMap<(Vec<IntVector>, IntVector), MultiPoly> = BTreeMap::new();
        for p in pieces {
            let mut basis = p.basis;
            basis.sort();
            let nvars = p.poly.nvars();
            let slot = merged
                .entry((basis, p.offset))
                .or_insert_with(|| MultiPoly::zero(nvars));
            *slot = slot.add(&p.poly);
        }
        let pieces = merged
            .into_iter()
            .filter(|(_, poly)| !poly.is_zero())
            .map(|((basis, offset), poly)| ConePiece {
                basis,
                offset,
                poly,
            })
            .collect();
        ClosedForm { source, pieces }
    }

    pub fn from_reduced(reduced: &ReducedForm) -> Result<Self> {
        let pieces = unmerged_pieces(reduced)?;
        Ok(Self::from_pieces(reduced.source.clone(), pieces))
    }

    /// Precomputes membership data for repeated evaluation.
    pub fn evaluator(&self) -> Result<ClosedFormEvaluator> {
        let mut groups: BTreeMap<Vec<IntVector>, EvalGroup> = BTreeMap::new();
        for piece in &self.pieces {
            let mut basis = piece.basis.clone();
            basis.sort();
            let group = match groups.entry(basis) {
                std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::btree_map::Entry::Vacant(e) => {
                    let g = EvalGroup::new(e.key())?;
                    e.insert(g)
                }
            };
            group.insert(piece);
        }
        Ok(ClosedFormEvaluator {
            groups: groups.into_values().collect(),
        })
    }

    /// Largest total degree over the pieces.
    pub fn max_degree(&self) -> Option<u32> {
        self.pieces.iter().filter_map(|p| p.poly.degree()).max()
    }
}

/// Pieces sharing a basis, bucketed by the residues of `⟨Bᵢ⊥, offset⟩`
/// modulo `⟨Bᵢ⊥, bᵢ⟩`; a point can only lie in pieces of its own bucket.
struct EvalGroup {
    // (Bᵢ⊥, ⟨Bᵢ⊥, bᵢ⟩) per basis vector
    duals: Vec<(IntVector, BigInt)>,
    buckets: HashMap<Vec<BigInt>, Vec<CompiledPiece>>,
}

struct CompiledPiece {
    // ⟨Bᵢ⊥, offset⟩
    levels: Vec<BigInt>,
    // poly = numer / denom with integer coefficients
    monomials: Vec<(Vec<u32>, BigInt)>,
    denom: BigInt,
}

impl EvalGroup {
    fn new(basis: &[IntVector]) -> Result<Self> {
        let duals = (0..basis.len())
            .map(|i| {
                let w = orth_complement(basis, i)?;
                let p = w.dot(&basis[i]);
                Ok((w, p))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalGroup {
            duals,
            buckets: HashMap::new(),
        })
    }

    fn levels(&self, v: &IntVector) -> Vec<BigInt> {
        self.duals.iter().map(|(w, _)| w.dot(v)).collect()
    }

    fn residues(&self, levels: &[BigInt]) -> Vec<BigInt> {
        levels
            .iter()
            .zip(&self.duals)
            .map(|(l, (_, p))| l.mod_floor(p))
            .collect()
    }

    fn insert(&mut self, piece: &ConePiece) {
        let denom = piece
            .poly
            .monomials()
            .fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
        let dr = Rational::from_integer(denom.clone());
        let monomials = piece
            .poly
            .monomials()
            .map(|(e, c)| (e.clone(), (c * &dr).to_integer()))
            .collect();
        let levels = self.levels(&piece.offset);
        let key = self.residues(&levels);
        self.buckets.entry(key).or_default().push(CompiledPiece {
            levels,
            monomials,
            denom,
        });
    }
}

impl CompiledPiece {
    fn eval_numer(&self, alpha: &IntVector) -> BigInt {
        self.monomials
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(alpha.components())
                    .fold(c.clone(), |acc, (&k, x)| acc * Pow::pow(x, k))
            })
            .sum()
    }
}

/// Fast repeated evaluation of a [`ClosedForm`].
pub struct ClosedFormEvaluator {
    groups: Vec<EvalGroup>,
}

impl ClosedFormEvaluator {
    /// `Σ poly(α)·[α ∈ support]` over all pieces.
    pub fn eval(&self, alpha: &IntVector) -> Rational {
        let mut by_denom: HashMap<&BigInt, BigInt> = HashMap::new();
        for g in &self.groups {
            let levels = g.levels(alpha);
            let Some(bucket) = g.buckets.get(&g.residues(&levels)) else {
                continue;
            };
            for p in bucket {
                if levels.iter().zip(&p.levels).all(|(a, o)| a >= o) {
                    *by_denom.entry(&p.denom).or_default() += p.eval_numer(alpha);
                }
            }
        }
        by_denom
            .into_iter()
            .map(|(d, n)| Rational::new(n, d.clone()))
            .sum()
    }

    /// Evaluates and asserts the result is a nonnegative integer.
    pub fn count(&self, alpha: &IntVector) -> BigInt {
        let v = self.eval(alpha);
        assert!(
            v.is_integer() && !v.is_negative(),
            "closed form produced {v} at {alpha}"
        );
        v.to_integer()
    }
}

/// Inverts one reduced term into a cone piece.
pub fn inverse_laplace_term(term: &ExpRatTerm) -> Result<ConePiece> {
    let duals = term_duals(term)?;
    Ok(invert_with_duals(term, &duals))
}

/// `(Bᵢ⊥, ⟨Bᵢ⊥, bᵢ⟩)` for each denominator of `term` with power above one.
fn term_duals(term: &ExpRatTerm) -> Result<Vec<Option<(IntVector, BigInt)>>> {
    let s = term.dim();
    let basis = term.denom_vectors();
    if basis.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: basis.len(),
        });
    }
    if !is_independent(&basis) {
        return Err(Error::DependentBasis);
    }
    term.denom()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if f.power == 1 {
                return Ok(None);
            }
            let w = orth_complement(&basis, i)?;
            let pairing = w.dot(&f.vector);
            Ok(Some((w, pairing)))
        })
        .collect()
}

fn invert_with_duals(term: &ExpRatTerm, duals: &[Option<(IntVector, BigInt)>]) -> ConePiece {
    let s = term.dim();
    let c = term.shift();
    let mut numer: BTreeMap<Vec<u32>, BigInt> = BTreeMap::from([(vec![0; s], BigInt::one())]);
    let mut divisor = BigInt::one();
    let mut offset = -c;
    for (f, dual) in term.denom().iter().zip(duals) {
        let Some((w, pairing)) = dual else {
            continue;
        };
        let h = f.power;
        let wc = w.dot(c);
        for j in 1..h {
            let constant = &wc + pairing * BigInt::from(j);
            numer = mul_linear(&numer, w, &constant);
            divisor *= j * pairing;
        }
        offset = &offset - &f.vector.scaled(&BigInt::from(h - 1));
    }
    let scale = term.coeff() / Rational::from_integer(divisor);
    let mut poly = MultiPoly::zero(s);
    for (e, k) in numer {
        poly.add_monomial(e, &scale * Rational::from_integer(k));
    }
    ConePiece {
        basis: term.denom_vectors(),
        offset,
        poly,
    }
}

/// `p · (⟨w, α⟩ + c)` on integer polynomials.
fn mul_linear(
    p: &BTreeMap<Vec<u32>, BigInt>,
    w: &IntVector,
    c: &BigInt,
) -> BTreeMap<Vec<u32>, BigInt> {
    let mut out: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    for (e, k) in p {
        if !c.is_zero() {
            *out.entry(e.clone()).or_default() += k * c;
        }
        for (v, wv) in w.components().iter().enumerate() {
            if wv.is_zero() {
                continue;
            }
            let mut e2 = e.clone();
            e2[v] += 1;
            *out.entry(e2).or_default() += k * wv;
        }
    }
    out.retain(|_, k| !k.is_zero());
    out
}

/// One piece per reduced term, before merging.
pub fn unmerged_pieces(reduced: &ReducedForm) -> Result<Vec<ConePiece>> {
    let mut cache: HashMap<Vec<DenomFactor>, Vec<Option<(IntVector, BigInt)>>> = HashMap::new();
    reduced
        .terms()
        .map(|t| {
            let duals = match cache.get(t.denom()) {
                Some(d) => d,
                None => cache.entry(t.denom().to_vec()).or_insert(term_duals(&t)?),
            };
            Ok(invert_with_duals(&t, duals))
        })
        .collect()
}

/// The closed form of `t_X`.
pub fn closed_form(x: &[IntVector]) -> Result<ClosedForm> {
    ClosedForm::from_reduced(&toric_reduce(x)?)
}

/// Whether `α ∈ {offset + Σ λᵢ·basisᵢ : λ ∈ ℕˢ}`.
pub fn support_membership(
    basis: &[IntVector],
    offset: &IntVector,
    alpha: &IntVector,
) -> Result<bool> {
    let Some(lambda) = solve_square(basis, &(alpha - offset))? else {
        return Err(Error::DependentBasis);
    };
    Ok(lambda.iter().all(|l| l.is_integer() && !l.is_negative()))
}

/// `t_X(α)` from a closed form. Panics if the value is not a nonnegative
/// integer, which would indicate a broken closed form.
pub fn eval_closed(cf: &ClosedForm, alpha: &IntVector) -> Result<Rational> {
    let v = cf.evaluator()?.eval(alpha);
    assert!(
        v.is_integer() && !v.is_negative(),
        "closed form produced {v} at {alpha}"
    );
    Ok(v)
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

    fn term(c: i64, shift: &[i64], den: &[(&[i64], u32)]) -> ExpRatTerm {
        ExpRatTerm::new(
            q(c, 1),
            v(shift),
            den.iter().map(|(a, h)| DenomFactor::new(v(a), *h)),
        )
    }

    fn poly1(coeffs: &[(u32, Rational)]) -> MultiPoly {
        MultiPoly::from_monomials(1, coeffs.iter().map(|(e, c)| (vec![*e], c.clone()))).unwrap()
    }

    #[test]
    fn inverse_example_one_leading_term() {
        let p = inverse_laplace_term(&term(1, &[0], &[(&[2], 3)])).unwrap();
        // (x+2)(x+4)/8 = x²/8 + 3x/4 + 1
        assert_eq!(p.poly, poly1(&[(2, q(1, 8)), (1, q(3, 4)), (0, q(1, 1))]));
        assert_eq!(p.offset, v(&[-4]));
        assert_eq!(p.basis, vec![v(&[2])]);
    }

    #[test]
    fn inverse_simple_poles_is_indicator() {
        let p = inverse_laplace_term(&term(1, &[0, 0], &[(&[1, 0], 1), (&[-1, 2], 1)])).unwrap();
        assert_eq!(p.poly, MultiPoly::one(2));
        assert_eq!(p.offset, v(&[0, 0]));
    }

    #[test]
    fn inverse_example_two_piece() {
        let p = inverse_laplace_term(&term(1, &[0, 0], &[(&[1, 0], 2), (&[-1, 2], 1)])).unwrap();
        // (2x + y + 2)/2
        let expected = MultiPoly::linear(&v(&[2, 1]), q(2, 1)).scaled(&q(1, 2));
        assert_eq!(p.poly, expected);
        assert_eq!(p.offset, v(&[-1, 0]));
    }

    #[test]
    fn inverse_rejects_dependent_denominators() {
        assert_eq!(
            inverse_laplace_term(&term(1, &[0, 0], &[(&[1, 1], 1), (&[2, 2], 1)])),
            Err(Error::DependentBasis)
        );
        assert!(inverse_laplace_term(&term(1, &[0, 0], &[(&[1, 1], 2)])).is_err());
    }

    #[test]
    fn closed_form_example_one_pieces() {
        let cf = closed_form(&[v(&[1]), v(&[1]), v(&[2])]).unwrap();
        let mut got: Vec<(IntVector, MultiPoly)> = cf
            .pieces
            .iter()
            .map(|p| (p.offset.clone(), p.poly.clone()))
            .collect();
        got.sort_by(|a, b| a.0.cmp(&b.0));
        // offsets −4, −3, −2 with (x+2)(x+4)/8, 2(x+1)(x+3)/8, x(x+2)/8
        let expected = vec![
            (v(&[-4]), poly1(&[(2, q(1, 8)), (1, q(3, 4)), (0, q(1, 1))])),
            (v(&[-3]), poly1(&[(2, q(1, 4)), (1, q(1, 1)), (0, q(3, 4))])),
            (v(&[-2]), poly1(&[(2, q(1, 8)), (1, q(1, 4))])),
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn closed_form_identity_basis() {
        let cf = closed_form(&[v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(cf.pieces.len(), 1);
        assert_eq!(cf.pieces[0].poly, MultiPoly::one(2));
        assert_eq!(cf.pieces[0].offset, v(&[0, 0]));
    }

    #[test]
    fn membership_examples() {
        assert!(support_membership(&[v(&[2])], &v(&[-4]), &v(&[0])).unwrap());
        let b = [v(&[1, 0]), v(&[-1, 2])];
        assert!(!support_membership(&b, &v(&[0, 0]), &v(&[0, 1])).unwrap());
        assert!(support_membership(&b, &v(&[0, 0]), &v(&[0, 2])).unwrap());
        assert!(!support_membership(&b, &v(&[0, 0]), &v(&[-1, 0])).unwrap());
    }

    #[test]
    fn eval_closed_examples() {
        let cf = closed_form(&[v(&[1]), v(&[1]), v(&[2])]).unwrap();
        for (a, t) in [(2, 4), (1, 2), (0, 1), (-1, 0)] {
            assert_eq!(eval_closed(&cf, &v(&[a])).unwrap(), q(t, 1));
        }
        let x = [v(&[1, 0]), v(&[0, 1]), v(&[-1, 2])];
        let cf = closed_form(&x).unwrap();
        for (a, t) in [([1, 1], 1), ([0, 2], 2), ([0, 4], 3), ([-1, -2], 0)] {
            assert_eq!(eval_closed(&cf, &v(&a)).unwrap(), q(t, 1));
        }
    }

    #[test]
    fn evaluator_agrees_with_piece_membership() {
        let cf = closed_form(&[v(&[1, 0]), v(&[0, 1]), v(&[-1, 2]), v(&[1, 1])]).unwrap();
        let ev = cf.evaluator().unwrap();
        for a in -3..=6 {
            for b in -3..=6 {
                let alpha = v(&[a, b]);
                let direct: Rational = cf.pieces.iter().map(|p| p.eval(&alpha).unwrap()).sum();
                assert_eq!(ev.eval(&alpha), direct);
            }
        }
    }

    #[test]
    fn poly_display() {
        let p = MultiPoly::linear(&v(&[2, 1]), q(2, 1)).scaled(&q(1, 2));
        assert_eq!(p.to_string(), "x + 1/2*y + 1");
        assert_eq!(MultiPoly::zero(1).to_string(), "0");
    }
}
