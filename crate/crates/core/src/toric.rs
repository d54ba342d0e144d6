//! Toric reduction of `Π_{a∈X} (1 − e^{−⟨a,x⟩})^{−1}` into a sum of terms
//! whose denominator vectors are linearly independent positive multiples of
//! vectors of `X`.
//!
//! Vectors are absorbed one at a time. When a new vector `a` depends on the
//! current denominators `b₁, …, b_r` through a primitive relation
//! `m·a = Σ mᵢ·bᵢ`, the factor `1/(1 − e^{−⟨a,x⟩})` is rewritten as
//! `β/y₀` with `y₀ = 1 − e^{−⟨m·a,x⟩}`, `y₀` is expressed as
//! `Σ γᵢ·(1 − e^{−⟨bᵢ,x⟩})` with exponential-polynomial coefficients, and the
//! partial-fraction recursion `1/(y₀ Π yᵢ^{hᵢ}) = Σ γⱼ / (y₀² yⱼ^{hⱼ−1} …)`
//! is run until one `yₖ` disappears.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exp_algebra::{
    generic_points, geometric_factor, laplace_generating, merge_factors, DenomFactor, ExpRatSum,
    ExpRatTerm,
};
use crate::linalg::{
    integer_relation, is_independent, pointedness_certificate, rank, IntVector, IntegerRelation,
    Rational,
};

/// Relative residual allowed by the debug-build self-checks. Measured against
/// the summed magnitude of the terms, which bounds floating cancellation.
const SELF_CHECK_TOL: f64 = 1e-8;

/// The reduced generating function of a vector system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedForm {
    pub source: Vec<IntVector>,
    pub sum: ExpRatSum,
}

impl ReducedForm {
    pub fn dim(&self) -> usize {
        self.sum.dim()
    }

    pub fn terms(&self) -> impl Iterator<Item = ExpRatTerm> + '_ {
        self.sum.terms()
    }

    /// Checks the structural invariants of every term: total denominator
    /// power `#X`, exactly `s` linearly independent denominator vectors, each
    /// a positive multiple of a source vector.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.source.len() as u32;
        let s = self.dim();
        for t in self.sum.terms() {
            if t.total_power() != n {
                return Err(format!("term {t}: total power {} != {n}", t.total_power()));
            }
            let vs = t.denom_vectors();
            if vs.len() != s || !is_independent(&vs) {
                return Err(format!(
                    "term {t}: denominators are not {s} independent vectors"
                ));
            }
            if let Some(bad) = vs.iter().find(|v| {
                !self
                    .source
                    .iter()
                    .any(|a| positive_multiple_of(v, a).is_some())
            }) {
                return Err(format!(
                    "term {t}: {bad} is not a multiple of a source vector"
                ));
            }
        }
        Ok(())
    }

    /// Largest relative deviation `|reduced(x) − original(x)| / |original(x)|`
    /// over `count` seeded generic points.
    pub fn identity_residual(&self, seed: u64, count: usize) -> Result<f64> {
        let original = laplace_generating(&self.source)?;
        let mut worst: f64 = 0.0;
        for x in generic_points(&self.source, seed, count)? {
            let o = original.eval_numeric(&x)?;
            let r = self.sum.eval_numeric(&x)?;
            worst = worst.max((r - o).abs() / o.abs());
        }
        Ok(worst)
    }
}

/// `Some(n)` when `v = n·a` with `n ≥ 1`.
pub fn positive_multiple_of(v: &IntVector, a: &IntVector) -> Option<BigInt> {
    let i = a.components().iter().position(|c| !c.is_zero())?;
    let (n, r) = v[i].div_rem(&a[i]);
    if !r.is_zero() || !n.is_positive() {
        return None;
    }
    (a.scaled(&n) == *v).then_some(n)
}

fn to_u64(n: &BigInt) -> u64 {
    n.to_u64().expect("relation coefficient exceeds u64")
}

/// Coefficients `γᵢ` with `1 − e^{−⟨Σ mᵢbᵢ, x⟩} = Σ γᵢ·(1 − e^{−⟨bᵢ,x⟩})`.
///
/// Writing `uᵢ = e^{−mᵢ⟨bᵢ,x⟩}`, the telescoping identity
/// `1 − Π uᵢ = Σₜ (Π_{i<t} uᵢ)(1 − uₜ)` reduces the problem to single
/// factors: `1 − e^{−m⟨b,x⟩} = (Σ_{j<m} e^{−j⟨b,x⟩})(1 − e^{−⟨b,x⟩})` for
/// `m > 0`, and `1 − e^{n⟨b,x⟩} = −e^{n⟨b,x⟩}(Σ_{j<n} e^{−j⟨b,x⟩})(1 − e^{−⟨b,x⟩})`
/// for `m = −n < 0`. Positive coefficients are telescoped first.
///
/// Every coefficient must be nonzero; the returned indices refer to `basis`.
pub fn expand_dependent(
    relation: &IntegerRelation,
    basis: &[IntVector],
) -> Result<Vec<(ExpRatSum, usize)>> {
    if relation.coefficients.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: relation.coefficients.len(),
        });
    }
    if let Some(i) = relation.coefficients.iter().position(Zero::is_zero) {
        return Err(Error::ZeroCoefficient { index: i });
    }
    let dim = basis.first().map_or(0, IntVector::dim);
    let mut order = relation.positive_indices();
    order.extend((0..basis.len()).filter(|i| relation.coefficients[*i].is_negative()));

    let mut prefix = IntVector::zero(dim);
    let mut gammas = Vec::with_capacity(basis.len());
    for i in order {
        let m = &relation.coefficients[i];
        let b = &basis[i];
        let local = if m.is_positive() {
            geometric_factor(b, to_u64(m))
        } else {
            let n = -m;
            &ExpRatSum::monomial(-Rational::one(), b.scaled(&n)) * &geometric_factor(b, to_u64(&n))
        };
        gammas.push((
            local.mul_term(&ExpRatTerm::new(Rational::one(), prefix.clone(), [])),
            i,
        ));
        prefix = &prefix - &b.scaled(m);
    }

    if cfg!(debug_assertions) {
        let y0 = relation.combination(basis);
        self_check_expansion(&y0, &gammas, basis);
    }
    Ok(gammas)
}

fn one_minus_exp(v: &IntVector) -> ExpRatSum {
    let dim = v.dim();
    ExpRatSum::from_terms(
        dim,
        [
            ExpRatTerm::one(dim),
            ExpRatTerm::new(-Rational::one(), -v, []),
        ],
    )
}

fn self_check_expansion(y0: &IntVector, gammas: &[(ExpRatSum, usize)], basis: &[IntVector]) {
    // Generic points only exist when the vectors involved lie in an open half
    // space; the check is skipped otherwise.
    let mut vs = basis.to_vec();
    vs.push(y0.clone());
    let Ok(points) = generic_points(&vs, 0x5eed, 2) else {
        return;
    };
    let lhs = one_minus_exp(y0);
    let rhs = gammas
        .iter()
        .fold(ExpRatSum::zero(y0.dim()), |acc, (g, i)| {
            &acc + &(g * &one_minus_exp(&basis[*i]))
        });
    for x in points {
        let l = lhs.eval_numeric(&x).unwrap();
        let r = rhs.eval_numeric(&x).unwrap();
        let scale = 1.0 + rhs.eval_magnitude(&x).unwrap();
        assert!(
            (l - r).abs() <= SELF_CHECK_TOL * scale,
            "telescoping expansion failed: {l} vs {r}"
        );
    }
}

/// Runs the partial-fraction recursion on `term / y₀` where
/// `y₀ = Σ γᵢ·yᵢ` and each index in `gammas` names a factor of `term`'s
/// denominator.
///
/// The recursion multiplies by `y₀/y₀ = Σ γᵢyᵢ/y₀` until some indexed factor
/// `yₖ` is exhausted. A finished term with exhaustion counts `dᵢ`
/// (`dₖ = hₖ`, `dᵢ < hᵢ` otherwise, `D = Σ dᵢ`) is reached along
/// `(D−1)! / ((dₖ−1)! Π_{i≠k} dᵢ!)` paths and equals
/// `Π γᵢ^{dᵢ} / (y₀^{t₀+D} Π yᵢ^{hᵢ−dᵢ})`; these are summed directly.
pub fn partial_fraction(
    y0_factor: &DenomFactor,
    gammas: &[(ExpRatSum, usize)],
    term: &ExpRatTerm,
) -> Result<Vec<ExpRatTerm>> {
    let dim = term.dim();
    let gammas = gammas
        .iter()
        .map(|(g, i)| Ok((Laurent::from_sum(g)?, *i)))
        .collect::<Result<Vec<_>>>()?;
    let numerator = Laurent::monomial(term.shift())?;
    let mut groups = Groups::new();
    expand_group(
        y0_factor,
        &gammas,
        term.denom(),
        &numerator,
        &Laurent::one(dim),
        None,
        &mut groups,
    )?;
    Ok(groups_to_sum(dim, &groups, term.coeff()).into_terms())
}

/// Integer exponential polynomial `Σ c·e^{⟨v,x⟩}` with machine-size shifts.
/// All numerators produced by the reduction have integer coefficients.
#[derive(Clone, Debug, Default)]
struct Laurent {
    terms: HashMap<Vec<i64>, BigInt>,
}

/// Numerators keyed by their merged, sorted denominator list.
type Groups = BTreeMap<Vec<DenomFactor>, Laurent>;

impl Laurent {
    fn one(dim: usize) -> Self {
        Laurent {
            terms: HashMap::from([(vec![0; dim], BigInt::one())]),
        }
    }

    fn monomial(shift: &IntVector) -> Result<Self> {
        let v = shift.to_i64s().ok_or(Error::Overflow)?;
        Ok(Laurent {
            terms: HashMap::from([(v, BigInt::one())]),
        })
    }

    fn from_sum(sum: &ExpRatSum) -> Result<Self> {
        let mut terms = HashMap::new();
        for t in sum.terms() {
            assert!(t.denom().is_empty() && t.coeff().is_integer());
            let shift = t.shift().to_i64s().ok_or(Error::Overflow)?;
            terms.insert(shift, t.coeff().to_integer());
        }
        Ok(Laurent { terms })
    }

    fn len(&self) -> usize {
        self.terms.len()
    }

    /// `self += scale · a · b`.
    fn add_product(&mut self, a: &Laurent, b: &Laurent, scale: &BigInt) -> Result<()> {
        self.terms.reserve(a.len() * b.len());
        for (u, c) in &a.terms {
            let cs = c * scale;
            for (v, d) in &b.terms {
                let w = u
                    .iter()
                    .zip(v)
                    .map(|(x, y)| x.checked_add(*y))
                    .collect::<Option<Vec<i64>>>()
                    .ok_or(Error::Overflow)?;
                *self.terms.entry(w).or_default() += &cs * d;
            }
        }
        Ok(())
    }

    fn mul(&self, other: &Laurent) -> Result<Laurent> {
        let mut out = Laurent::default();
        out.add_product(self, other, &BigInt::one())?;
        out.prune();
        Ok(out)
    }

    fn pow(&self, k: u32, dim: usize) -> Result<Laurent> {
        (0..k).try_fold(Laurent::one(dim), |acc, _| acc.mul(self))
    }

    fn add_assign(&mut self, other: &Laurent) {
        for (v, c) in &other.terms {
            *self.terms.entry(v.clone()).or_default() += c;
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
    }
}

fn groups_len(groups: &Groups) -> usize {
    groups.values().map(Laurent::len).sum()
}

fn prune_groups(groups: &mut Groups) {
    for l in groups.values_mut() {
        l.prune();
    }
    groups.retain(|_, l| l.len() > 0);
}

fn groups_to_sum(dim: usize, groups: &Groups, scale: &Rational) -> ExpRatSum {
    let mut out = ExpRatSum::zero(dim);
    for (denom, l) in groups {
        for (v, c) in &l.terms {
            out.push_parts(
                scale * Rational::from_integer(c.clone()),
                IntVector::from_i64s(v),
                denom,
            );
        }
    }
    out
}

/// Adds `numerator · extra / (y₀ · Π denom)`, expanded by the recursion, to
/// `out`.
fn expand_group(
    y0_factor: &DenomFactor,
    gammas: &[(Laurent, usize)],
    denom: &[DenomFactor],
    numerator: &Laurent,
    extra: &Laurent,
    limit: Option<usize>,
    out: &mut Groups,
) -> Result<()> {
    let dim = y0_factor.vector.dim();
    // Single products are bounded by a multiple of the term limit; they may
    // still cancel, so the bound is loose.
    let guard = |a: &Laurent, b: &Laurent| match limit {
        Some(l) if a.len().saturating_mul(b.len()) > 16 * l => Err(Error::TermLimit { limit: l }),
        _ => Ok(()),
    };
    let heights: Vec<u32> = gammas.iter().map(|(_, i)| denom[*i].power).collect();
    let others: Vec<DenomFactor> = denom
        .iter()
        .enumerate()
        .filter(|(j, _)| !gammas.iter().any(|(_, i)| i == j))
        .map(|(_, f)| f.clone())
        .collect();

    let mut gamma_powers: HashMap<(usize, u32), Laurent> = HashMap::new();
    for k in 0..gammas.len() {
        let mut counts = vec![0u32; gammas.len()];
        counts[k] = heights[k];
        loop {
            let total: u32 = counts.iter().sum();
            let mut factors = others.clone();
            factors.push(DenomFactor::new(
                y0_factor.vector.clone(),
                y0_factor.power + total,
            ));
            for (j, (_, i)) in gammas.iter().enumerate() {
                if j != k {
                    factors.push(DenomFactor::new(
                        denom[*i].vector.clone(),
                        heights[j] - counts[j],
                    ));
                }
            }

            let mut small = extra.clone();
            for (j, (g, _)) in gammas.iter().enumerate() {
                if counts[j] > 0 {
                    let gp = match gamma_powers.entry((j, counts[j])) {
                        Entry::Occupied(e) => e.into_mut(),
                        Entry::Vacant(e) => e.insert(g.pow(counts[j], dim)?),
                    };
                    guard(&small, gp)?;
                    small = small.mul(gp)?;
                }
            }
            guard(numerator, &small)?;
            out.entry(merge_factors(factors)).or_default().add_product(
                numerator,
                &small,
                &path_count(&counts, k),
            )?;

            if !next_counts(&mut counts, &heights, k) {
                break;
            }
        }
    }
    Ok(())
}

/// Advances the odometer over `counts[j] ∈ [0, heights[j])` for `j ≠ k`.
fn next_counts(counts: &mut [u32], heights: &[u32], k: usize) -> bool {
    for j in 0..counts.len() {
        if j == k {
            continue;
        }
        if counts[j] + 1 < heights[j] {
            counts[j] += 1;
            return true;
        }
        counts[j] = 0;
    }
    false
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn path_count(counts: &[u32], k: usize) -> BigInt {
    let total: u32 = counts.iter().sum();
    let mut denom = factorial(counts[k] - 1);
    for (j, &c) in counts.iter().enumerate() {
        if j != k {
            denom *= factorial(c);
        }
    }
    factorial(total - 1) / denom
}

/// Multiplies `term` by `1/(1 − e^{−⟨a,x⟩})`, keeping denominators linearly
/// independent.
pub fn absorb_vector(term: &ExpRatTerm, a: &IntVector) -> Result<Vec<ExpRatTerm>> {
    let numerator = Laurent::monomial(term.shift())?;
    let mut groups = Groups::new();
    absorb_group(term.denom(), &numerator, a, None, &mut groups)?;
    prune_groups(&mut groups);
    if cfg!(debug_assertions) {
        let input = Groups::from([(term.denom().to_vec(), numerator)]);
        self_check_absorb(&input, a, &groups);
    }
    Ok(groups_to_sum(term.dim(), &groups, term.coeff()).into_terms())
}

/// Absorbs `a` into `numerator / Π denom`, adding the result to `out`.
fn absorb_group(
    denom: &[DenomFactor],
    numerator: &Laurent,
    a: &IntVector,
    limit: Option<usize>,
    out: &mut Groups,
) -> Result<()> {
    if a.is_zero() {
        return Err(Error::ZeroVector);
    }
    let dim = a.dim();
    if let Some(f) = denom.iter().find(|f| f.vector.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: f.vector.dim(),
            found: dim,
        });
    }
    let appended = || {
        merge_factors(
            denom
                .iter()
                .cloned()
                .chain([DenomFactor::new(a.clone(), 1)]),
        )
    };
    if denom.iter().any(|f| &f.vector == a) {
        out.entry(appended()).or_default().add_assign(numerator);
        return Ok(());
    }
    let vectors: Vec<IntVector> = denom.iter().map(|f| f.vector.clone()).collect();
    let Some(relation) = integer_relation(&vectors, a)? else {
        out.entry(appended()).or_default().add_assign(numerator);
        return Ok(());
    };

    let (restricted, support) = relation.restrict_to_support();
    let pivot = restricted
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| c.magnitude() < relation.multiplier.magnitude())
        .min_by_key(|(_, c)| c.magnitude().clone())
        .map(|(p, _)| p);
    let Some(p) = pivot else {
        let basis: Vec<IntVector> = support.iter().map(|&i| vectors[i].clone()).collect();
        let gammas = expand_dependent(&restricted, &basis)?
            .into_iter()
            .map(|(g, i)| Ok((Laurent::from_sum(&g)?, support[i])))
            .collect::<Result<Vec<_>>>()?;
        let y0 = DenomFactor::new(a.scaled(&relation.multiplier), 1);
        let beta = Laurent::from_sum(&geometric_factor(a, to_u64(&relation.multiplier)))?;
        return expand_group(&y0, &gammas, denom, numerator, &beta, limit, out);
    };

    // Solve the same circuit for the denominator `b` with the smallest
    // coefficient `c`: `|c|·b` is an integer combination of `a` and the rest
    // of the support, so only `b` is replaced by a multiple.
    let c = &restricted.coefficients[p];
    let n = c.abs();
    let sign = c.signum();
    let b = &vectors[support[p]];
    let height = denom[support[p]].power;

    let mut basis = vec![a.clone()];
    let mut coefficients = vec![&sign * &relation.multiplier];
    for (q, &i) in support.iter().enumerate() {
        if q != p {
            basis.push(vectors[i].clone());
            coefficients.push(-&sign * &restricted.coefficients[q]);
        }
    }
    let pivot_relation = IntegerRelation {
        multiplier: n.clone(),
        coefficients,
    };

    let working = merge_factors(
        denom
            .iter()
            .filter(|f| &f.vector != b)
            .cloned()
            .chain([DenomFactor::new(a.clone(), 1)]),
    );
    let index_of = |v: &IntVector| {
        working
            .iter()
            .position(|f| &f.vector == v)
            .expect("circuit vector is a denominator")
    };
    let gammas = expand_dependent(&pivot_relation, &basis)?
        .into_iter()
        .map(|(g, i)| Ok((Laurent::from_sum(&g)?, index_of(&basis[i]))))
        .collect::<Result<Vec<_>>>()?;
    let y0 = DenomFactor::new(b.scaled(&n), height);
    let beta = Laurent::from_sum(&geometric_factor(b, to_u64(&n)))?.pow(height, dim)?;
    expand_group(&y0, &gammas, &working, numerator, &beta, limit, out)
}

/// `(Σ value, Σ |value|)` of `groups · 1/Π extra` at `x`.
fn eval_groups(groups: &Groups, extra: &[DenomFactor], x: &[f64]) -> (f64, f64) {
    let dot = |v: &[i64]| v.iter().zip(x).map(|(c, xi)| *c as f64 * xi).sum::<f64>();
    let factor = |f: &DenomFactor| {
        let v = f.vector.to_i64s().expect("denominator fits in i64");
        (-(-dot(&v)).exp_m1()).powi(f.power as i32)
    };
    let extra: f64 = extra.iter().map(factor).product();
    let (mut value, mut magnitude) = (0.0, 0.0);
    for (denom, l) in groups {
        let d: f64 = denom.iter().map(factor).product::<f64>() * extra;
        for (v, c) in &l.terms {
            let t = c.to_f64().unwrap_or(f64::NAN) * dot(v).exp() / d;
            value += t;
            magnitude += t.abs();
        }
    }
    (value, magnitude)
}

fn self_check_absorb(input: &Groups, a: &IntVector, out: &Groups) {
    let mut vs: Vec<IntVector> = input
        .keys()
        .chain(out.keys())
        .flatten()
        .map(|f| f.vector.clone())
        .collect();
    vs.push(a.clone());
    vs.sort();
    vs.dedup();
    let Ok(points) = generic_points(&vs, 0xab50, 2) else {
        return;
    };
    let extra = [DenomFactor::new(a.clone(), 1)];
    for x in points {
        let (l, lm) = eval_groups(input, &extra, &x);
        let (r, rm) = eval_groups(out, &[], &x);
        assert!(
            (l - r).abs() <= SELF_CHECK_TOL * (lm + rm),
            "absorbing {a} failed: {l} vs {r}"
        );
    }
}

/// Limits applied while reducing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Abort with [`Error::TermLimit`] once an intermediate sum holds more
    /// terms than this.
    pub max_terms: Option<usize>,
}

/// Reduces `Π_{a∈X} (1 − e^{−⟨a,x⟩})^{−1}`, absorbing vectors in input
/// order. `X` must have full rank and generate a pointed cone.
pub fn toric_reduce(x: &[IntVector]) -> Result<ReducedForm> {
    toric_reduce_with(x, &ReduceOptions::default())
}

pub fn toric_reduce_with(x: &[IntVector], options: &ReduceOptions) -> Result<ReducedForm> {
    let dim = crate::ambient_dimension(x)?;
    let r = rank(x);
    if r != dim {
        return Err(Error::RankDeficient { rank: r, dim });
    }
    if pointedness_certificate(x).is_none() {
        return Err(Error::NotPointed);
    }
    let mut groups = Groups::from([(Vec::new(), Laurent::one(dim))]);
    for a in x {
        let mut next = Groups::new();
        for (g, (denom, numerator)) in groups.iter().enumerate() {
            // Cancelled entries are only pruned at the end of a step, so the
            // running size is checked against a looser bound.
            if let Some(limit) = options.max_terms {
                if g % 16 == 0 && groups_len(&next) > 4 * limit {
                    return Err(Error::TermLimit { limit });
                }
            }
            if cfg!(debug_assertions) {
                let mut local = Groups::new();
                absorb_group(denom, numerator, a, options.max_terms, &mut local)?;
                let single = Groups::from([(denom.clone(), numerator.clone())]);
                self_check_absorb(&single, a, &local);
                for (d, l) in local {
                    next.entry(d).or_default().add_assign(&l);
                }
            } else {
                absorb_group(denom, numerator, a, options.max_terms, &mut next)?;
            }
        }
        prune_groups(&mut next);
        if let Some(limit) = options.max_terms {
            if groups_len(&next) > limit {
                return Err(Error::TermLimit { limit });
            }
        }
        groups = next;
    }
    Ok(ReducedForm {
        source: x.to_vec(),
        sum: groups_to_sum(dim, &groups, &Rational::one()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> IntVector {
        IntVector::from_i64s(c)
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn mono(c: i64, shift: &[i64]) -> ExpRatTerm {
        ExpRatTerm::new(q(c), v(shift), [])
    }

    fn term(c: i64, shift: &[i64], den: &[(&[i64], u32)]) -> ExpRatTerm {
        ExpRatTerm::new(
            q(c),
            v(shift),
            den.iter().map(|(a, h)| DenomFactor::new(v(a), *h)),
        )
    }

    fn sum_of(dim: usize, ts: Vec<ExpRatTerm>) -> ExpRatSum {
        ExpRatSum::from_terms(dim, ts)
    }

    #[test]
    fn expand_single_vector_multiple() {
        // 2·1 = 1·2 over basis {1}: 1 − e^{−2x} = (1 + e^{−x})(1 − e^{−x})
        let rel = IntegerRelation {
            multiplier: 2.into(),
            coefficients: vec![2.into()],
        };
        let g = expand_dependent(&rel, &[v(&[1])]).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].1, 0);
        assert_eq!(g[0].0, sum_of(1, vec![mono(1, &[0]), mono(1, &[-1])]));
    }

    #[test]
    fn expand_mixed_signs() {
        // (−1,2) = −1·(1,0) + 2·(0,1)
        let rel = IntegerRelation {
            multiplier: 1.into(),
            coefficients: vec![(-1).into(), 2.into()],
        };
        let basis = [v(&[1, 0]), v(&[0, 1])];
        let g = expand_dependent(&rel, &basis).unwrap();
        let by_index: HashMap<usize, ExpRatSum> = g.into_iter().map(|(s, i)| (i, s)).collect();
        assert_eq!(
            by_index[&1],
            sum_of(2, vec![mono(1, &[0, 0]), mono(1, &[0, -1])])
        );
        assert_eq!(by_index[&0], sum_of(2, vec![mono(-1, &[1, -2])]));

        let y0 = one_minus_exp(&v(&[-1, 2]));
        let rhs = &(&by_index[&0] * &one_minus_exp(&basis[0]))
            + &(&by_index[&1] * &one_minus_exp(&basis[1]));
        assert_eq!(rhs, y0);
    }

    #[test]
    fn expand_identity_relation() {
        let rel = IntegerRelation {
            multiplier: 1.into(),
            coefficients: vec![1.into()],
        };
        let g = expand_dependent(&rel, &[v(&[3, 1])]).unwrap();
        assert_eq!(g, vec![(ExpRatSum::one(2), 0)]);
    }

    #[test]
    fn expand_rejects_zero_coefficient() {
        let rel = IntegerRelation {
            multiplier: 1.into(),
            coefficients: vec![1.into(), 0.into()],
        };
        assert_eq!(
            expand_dependent(&rel, &[v(&[1, 0]), v(&[0, 1])]),
            Err(Error::ZeroCoefficient { index: 1 })
        );
    }

    /// Basis rows, relation coefficients, multiplier.
    type RelationCase<'a> = (&'a [&'a [i64]], &'a [i64], i64);

    #[test]
    fn expand_is_exact_for_assorted_relations() {
        let cases: &[RelationCase] = &[
            (&[&[2, 1], &[1, 2]], &[1, 1], 3),
            (&[&[1, 0], &[0, 1]], &[-3, 2], 1),
            (&[&[3, 1, 0], &[0, 2, 1], &[1, 0, -2]], &[1, 1, 1], 1),
        ];
        for (basis, target, _) in cases {
            let basis: Vec<IntVector> = basis.iter().map(|b| v(b)).collect();
            let rel = integer_relation(&basis, &v(target)).unwrap().unwrap();
            let (rel, support) = rel.restrict_to_support();
            let sub: Vec<IntVector> = support.iter().map(|&i| basis[i].clone()).collect();
            let g = expand_dependent(&rel, &sub).unwrap();
            let rhs = g
                .iter()
                .fold(ExpRatSum::zero(sub[0].dim()), |acc, (gi, i)| {
                    &acc + &(gi * &one_minus_exp(&sub[*i]))
                });
            assert_eq!(rhs, one_minus_exp(&rel.combination(&sub)));
        }
    }

    #[test]
    fn partial_fraction_constant_gamma() {
        // y0 = 2·y1 → 1/(y0 y1) = 2/y0²
        let t = term(1, &[0], &[(&[1], 1)]);
        let gammas = vec![(ExpRatSum::monomial(q(2), v(&[0])), 0)];
        let out = partial_fraction(&DenomFactor::new(v(&[5]), 1), &gammas, &t).unwrap();
        assert_eq!(out, vec![term(2, &[0], &[(&[5], 2)])]);
    }

    #[test]
    fn partial_fraction_two_unit_gammas() {
        let t = term(1, &[0, 0], &[(&[1, 0], 1), (&[0, 1], 1)]);
        let one = ExpRatSum::one(2);
        let gammas = vec![(one.clone(), 0), (one, 1)];
        let y0 = DenomFactor::new(v(&[1, 1]), 1);
        let out = sum_of(2, partial_fraction(&y0, &gammas, &t).unwrap());
        let expected = sum_of(
            2,
            vec![
                term(1, &[0, 0], &[(&[1, 1], 2), (&[0, 1], 1)]),
                term(1, &[0, 0], &[(&[1, 1], 2), (&[1, 0], 1)]),
            ],
        );
        assert_eq!(out, expected);
    }

    #[test]
    fn partial_fraction_geometric_gamma() {
        // 1/(y0 y1²) with y0 = (1 + e^{−x}) y1 → (1 + e^{−x})² / y0³
        let t = term(1, &[0], &[(&[1], 2)]);
        let gamma = sum_of(1, vec![mono(1, &[0]), mono(1, &[-1])]);
        let out = sum_of(
            1,
            partial_fraction(&DenomFactor::new(v(&[2]), 1), &[(gamma, 0)], &t).unwrap(),
        );
        let expected = sum_of(
            1,
            vec![
                term(1, &[0], &[(&[2], 3)]),
                term(2, &[-1], &[(&[2], 3)]),
                term(1, &[-2], &[(&[2], 3)]),
            ],
        );
        assert_eq!(out, expected);
    }

    #[test]
    fn partial_fraction_conserves_power() {
        let t = term(3, &[1, -1], &[(&[1, 0], 3), (&[0, 1], 2)]);
        let gammas = vec![
            (sum_of(2, vec![mono(1, &[0, 0]), mono(1, &[0, -1])]), 1),
            (sum_of(2, vec![mono(-1, &[1, -2])]), 0),
        ];
        let out = partial_fraction(&DenomFactor::new(v(&[-1, 2]), 1), &gammas, &t).unwrap();
        assert!(!out.is_empty());
        for u in &out {
            assert_eq!(u.total_power(), t.total_power() + 1);
            assert_eq!(u.denom().len(), 2);
        }
    }

    #[test]
    fn absorb_cases() {
        // (ii) repeated vector
        let out = absorb_vector(&term(1, &[0], &[(&[1], 1)]), &v(&[1])).unwrap();
        assert_eq!(out, vec![term(1, &[0], &[(&[1], 2)])]);

        // (iii) dependent with multiplier 1, coefficient 2
        let out = sum_of(
            1,
            absorb_vector(&term(1, &[0], &[(&[1], 2)]), &v(&[2])).unwrap(),
        );
        let expected = sum_of(
            1,
            vec![
                term(1, &[0], &[(&[2], 3)]),
                term(2, &[-1], &[(&[2], 3)]),
                term(1, &[-2], &[(&[2], 3)]),
            ],
        );
        assert_eq!(out, expected);

        // (i) independent
        let out = absorb_vector(&term(1, &[0, 0], &[(&[1, 0], 1)]), &v(&[0, 1])).unwrap();
        assert_eq!(out, vec![term(1, &[0, 0], &[(&[1, 0], 1), (&[0, 1], 1)])]);

        assert_eq!(
            absorb_vector(&term(1, &[0], &[(&[1], 1)]), &v(&[0])),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn absorb_smaller_vector_into_multiple() {
        // 1/(1 − e^{−2x}) absorbing 1: relation 2·1 = 1·2, β = 1 + e^{−x}
        let out = sum_of(
            1,
            absorb_vector(&term(1, &[0], &[(&[2], 1)]), &v(&[1])).unwrap(),
        );
        let expected = sum_of(
            1,
            vec![term(1, &[0], &[(&[2], 2)]), term(1, &[-1], &[(&[2], 2)])],
        );
        assert_eq!(out, expected);
    }

    #[test]
    fn reduce_example_one() {
        let x = [v(&[1]), v(&[1]), v(&[2])];
        let r = toric_reduce(&x).unwrap();
        let expected = sum_of(
            1,
            vec![
                term(1, &[0], &[(&[2], 3)]),
                term(2, &[-1], &[(&[2], 3)]),
                term(1, &[-2], &[(&[2], 3)]),
            ],
        );
        assert_eq!(r.sum, expected);
        r.check_invariants().unwrap();
    }

    #[test]
    fn reduce_independent_system_is_unchanged() {
        let x = [v(&[1, 0]), v(&[0, 1])];
        let r = toric_reduce(&x).unwrap();
        assert_eq!(r.sum, ExpRatSum::from_term(laplace_generating(&x).unwrap()));
    }

    #[test]
    fn reduce_example_two_matches_reference_form() {
        let x = [v(&[1, 0]), v(&[0, 1]), v(&[-1, 2])];
        let r = toric_reduce(&x).unwrap();
        r.check_invariants().unwrap();
        let reference = sum_of(
            2,
            vec![
                term(1, &[0, 0], &[(&[1, 0], 2), (&[-1, 2], 1)]),
                term(1, &[0, -1], &[(&[1, 0], 2), (&[-1, 2], 1)]),
                term(-1, &[-1, 0], &[(&[1, 0], 2), (&[0, 1], 1)]),
            ],
        );
        for x in generic_points(&x, 3, 5).unwrap() {
            let a = r.sum.eval_numeric(&x).unwrap();
            let b = reference.eval_numeric(&x).unwrap();
            assert!((a - b).abs() <= 1e-10 * b.abs());
        }
        assert!(r.identity_residual(1, 5).unwrap() < 1e-9);
    }

    #[test]
    fn reduce_rejects_bad_systems() {
        assert_eq!(
            toric_reduce(&[v(&[1, 0]), v(&[2, 0])]),
            Err(Error::RankDeficient { rank: 1, dim: 2 })
        );
        assert_eq!(toric_reduce(&[v(&[1]), v(&[-1])]), Err(Error::NotPointed));
        assert_eq!(toric_reduce(&[]), Err(Error::EmptySystem));
    }

    #[test]
    fn positive_multiples() {
        assert_eq!(
            positive_multiple_of(&v(&[2, -4]), &v(&[1, -2])),
            Some(2.into())
        );
        assert_eq!(positive_multiple_of(&v(&[-2, 4]), &v(&[1, -2])), None);
        assert_eq!(positive_multiple_of(&v(&[0, 3]), &v(&[0, 2])), None);
        assert_eq!(positive_multiple_of(&v(&[2, 3]), &v(&[1, 2])), None);
    }
}
