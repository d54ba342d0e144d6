//! Counting engines: exhaustive enumeration, the memoized removal recursion,
//! and a cross-check harness that compares both against the closed form.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    is_independent, pointedness_certificate, rank, solve_in_span, IntVector, PointedCertificate,
    RatMatrix, Rational,
};
use crate::quasipoly::ClosedForm;
use crate::toric::{toric_reduce_with, ReduceOptions};

fn to_i64_vec(v: &IntVector) -> Result<Vec<i64>> {
    v.to_i64s().ok_or(Error::Overflow)
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Decides membership of `ρ` in the lattice cone `{Σ λⱼ·vⱼ : λ ∈ ℕʳ}` of
/// linearly independent vectors, via the integer adjugate of an invertible
/// `r × r` row selection.
#[derive(Clone, Debug)]
struct IndependentSolver {
    vectors: Vec<Vec<i64>>,
    rows: Vec<usize>,
    // adj[j][k]: λⱼ·det = Σ_k adj[j][k]·ρ[rows[k]]
    adj: Vec<Vec<i128>>,
    det: i128,
}

impl IndependentSolver {
    fn new(vectors: &[IntVector]) -> Result<Self> {
        debug_assert!(is_independent(vectors));
        let r = vectors.len();
        let dim = vectors.first().map_or(0, IntVector::dim);
        // Greedily pick rows that keep the selected row block full rank.
        let mut rows = Vec::with_capacity(r);
        for row in 0..dim {
            if rows.len() == r {
                break;
            }
            let mut trial = rows.clone();
            trial.push(row);
            let m = row_block(vectors, &trial);
            if m.rank() == trial.len() {
                rows = trial;
            }
        }
        let (adj, det) = if r == 0 {
            (Vec::new(), 1)
        } else {
            let m = row_block(vectors, &rows);
            let det = determinant(&m);
            let inv = m.inverse().ok_or(Error::DependentBasis)?;
            let detq = Rational::from_integer(det.clone());
            let adj = (0..r)
                .map(|j| {
                    (0..r)
                        .map(|k| {
                            (&inv.row(j)[k] * &detq)
                                .to_integer()
                                .to_i128()
                                .ok_or(Error::Overflow)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            (adj, det.to_i128().ok_or(Error::Overflow)?)
        };
        Ok(IndependentSolver {
            vectors: vectors.iter().map(to_i64_vec).collect::<Result<_>>()?,
            rows,
            adj,
            det,
        })
    }

    fn in_cone(&self, rho: &[i64]) -> bool {
        let r = self.vectors.len();
        let mut lambda = Vec::with_capacity(r);
        for j in 0..r {
            let num: i128 = self
                .rows
                .iter()
                .enumerate()
                .map(|(k, &row)| self.adj[j][k] * rho[row] as i128)
                .sum();
            if num % self.det != 0 {
                return false;
            }
            let l = num / self.det;
            if l < 0 {
                return false;
            }
            lambda.push(l);
        }
        // Rows outside the selection must match too when r < s.
        rho.iter().enumerate().all(|(i, &target)| {
            let sum: i128 = self
                .vectors
                .iter()
                .zip(&lambda)
                .map(|(v, l)| v[i] as i128 * l)
                .sum();
            sum == target as i128
        })
    }
}

fn row_block(vectors: &[IntVector], rows: &[usize]) -> RatMatrix {
    let data = rows
        .iter()
        .map(|&i| {
            vectors
                .iter()
                .map(|v| Rational::from_integer(v[i].clone()))
                .collect()
        })
        .collect();
    RatMatrix::new(data).expect("rectangular block")
}

fn determinant(m: &RatMatrix) -> BigInt {
    // Fraction-free elimination would avoid rationals; sizes here are tiny.
    let n = m.nrows();
    let mut rows: Vec<Vec<Rational>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut det = Rational::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !rows[i][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            rows.swap(p, c);
            det = -det;
        }
        det *= &rows[c][c];
        let pivot = rows[c].clone();
        for row in rows.iter_mut().skip(c + 1) {
            let f = &row[c] / &pivot[c];
            for (v, pv) in row.iter_mut().zip(&pivot) {
                *v -= &f * pv;
            }
        }
    }
    det.to_integer()
}

/// Scaled integer certificate and the weights `⟨ξ, aᵢ⟩ ≥ 1`.
fn integer_weights(x: &[IntVector], cert: &PointedCertificate) -> Result<(Vec<i64>, Vec<i64>)> {
    let xi = to_i64_vec(&cert.integer_scaled())?;
    let weights = x
        .iter()
        .map(|a| Ok(dot(&to_i64_vec(a)?, &xi)))
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(weights.iter().all(|&w| w >= 1));
    Ok((xi, weights))
}

/// Exhaustive enumeration of `{β ∈ ℕⁿ : Σ βᵢaᵢ = α}`.
///
/// Coordinates outside a maximal independent subset `T` are enumerated
/// depth first, each bounded by the remaining budget `⟨ξ, α − partial⟩`;
/// the coordinates on `T` are then uniquely determined and checked for
/// nonnegative integrality.
pub struct BruteForce {
    dim: usize,
    xi: Vec<i64>,
    free: Vec<(Vec<i64>, i64)>,
    tail: IndependentSolver,
}

impl BruteForce {
    pub fn new(x: &[IntVector], cert: &PointedCertificate) -> Result<Self> {
        let dim = crate::ambient_dimension(x)?;
        if !cert.certifies(x) {
            return Err(Error::NotPointed);
        }
        let (xi, weights) = integer_weights(x, cert)?;
        let mut tail_idx: Vec<usize> = Vec::new();
        for i in (0..x.len()).rev() {
            let mut trial: Vec<IntVector> = tail_idx.iter().map(|&j| x[j].clone()).collect();
            trial.push(x[i].clone());
            if is_independent(&trial) {
                tail_idx.push(i);
            }
        }
        let tail_vectors: Vec<IntVector> = tail_idx.iter().map(|&j| x[j].clone()).collect();
        let free = (0..x.len())
            .filter(|i| !tail_idx.contains(i))
            .map(|i| Ok((to_i64_vec(&x[i])?, weights[i])))
            .collect::<Result<_>>()?;
        Ok(BruteForce {
            dim,
            xi,
            free,
            tail: IndependentSolver::new(&tail_vectors)?,
        })
    }

    pub fn count(&self, alpha: &IntVector) -> Result<u64> {
        if alpha.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: alpha.dim(),
            });
        }
        let mut rho = to_i64_vec(alpha)?;
        let budget = dot(&rho, &self.xi);
        if budget < 0 {
            return Ok(0);
        }
        let mut count = 0;
        self.descend(0, &mut rho, budget, &mut count);
        Ok(count)
    }

    fn descend(&self, depth: usize, rho: &mut [i64], budget: i64, count: &mut u64) {
        if depth == self.free.len() {
            if self.tail.in_cone(rho) {
                *count += 1;
            }
            return;
        }
        let (a, w) = &self.free[depth];
        let max_j = budget / w;
        for j in 0..=max_j {
            if j > 0 {
                for (r, ak) in rho.iter_mut().zip(a) {
                    *r -= ak;
                }
            }
            self.descend(depth + 1, rho, budget - j * w, count);
        }
        for (r, ak) in rho.iter_mut().zip(a) {
            *r += ak * max_j;
        }
    }
}

/// Number of `β ∈ ℕⁿ` with `Σ βᵢ·xᵢ = α`, by exhaustive enumeration.
pub fn brute_force_count(
    x: &[IntVector],
    alpha: &IntVector,
    cert: &PointedCertificate,
) -> Result<u64> {
    BruteForce::new(x, cert)?.count(alpha)
}

/// 1 when `α` is a nonnegative integer combination of the linearly
/// independent vectors `a`, else 0.
pub fn independent_count(a: &[IntVector], alpha: &IntVector) -> Result<u64> {
    Ok(match solve_in_span(a, alpha)? {
        Some(l) if l.iter().all(|q| q.is_integer() && !q.is_negative()) => 1,
        _ => 0,
    })
}

/// Memoized evaluation of `t_X(α) = Σ_{j≥0} t_{X∖{aₙ}}(α − j·aₙ)`, always
/// removing the last vector, down to the longest linearly independent
/// prefix of `X`. The memo table lives as long as the counter.
pub struct DmCounter {
    dim: usize,
    vectors: Vec<Vec<i64>>,
    weights: Vec<i64>,
    xi: Vec<i64>,
    base_len: usize,
    base: IndependentSolver,
    memo: HashMap<(usize, Vec<i64>), u64>,
}

impl DmCounter {
    pub fn new(x: &[IntVector]) -> Result<Self> {
        let dim = crate::ambient_dimension(x)?;
        let cert = pointedness_certificate(x).ok_or(Error::NotPointed)?;
        let (xi, weights) = integer_weights(x, &cert)?;
        let base_len = (1..=x.len())
            .take_while(|&k| is_independent(&x[..k]))
            .last()
            .unwrap_or(0);
        Ok(DmCounter {
            dim,
            vectors: x.iter().map(to_i64_vec).collect::<Result<_>>()?,
            weights,
            xi,
            base_len,
            base: IndependentSolver::new(&x[..base_len])?,
            memo: HashMap::new(),
        })
    }

    pub fn count(&mut self, alpha: &IntVector) -> Result<u64> {
        if alpha.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: alpha.dim(),
            });
        }
        let alpha = to_i64_vec(alpha)?;
        Ok(self.count_prefix(self.vectors.len(), alpha))
    }

    fn count_prefix(&mut self, k: usize, alpha: Vec<i64>) -> u64 {
        let budget = dot(&alpha, &self.xi);
        if budget < 0 {
            return 0;
        }
        if k == self.base_len {
            return u64::from(self.base.in_cone(&alpha));
        }
        if let Some(&c) = self.memo.get(&(k, alpha.clone())) {
            return c;
        }
        let a = self.vectors[k - 1].clone();
        let max_j = budget / self.weights[k - 1];
        let mut total = 0;
        let mut rest = alpha.clone();
        for j in 0..=max_j {
            if j > 0 {
                for (r, ak) in rest.iter_mut().zip(&a) {
                    *r -= ak;
                }
            }
            total += self.count_prefix(k - 1, rest.clone());
        }
        self.memo.insert((k, alpha), total);
        total
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

/// `t_X(α)` via the removal recursion with a fresh memo table.
pub fn dm_count(x: &[IntVector], alpha: &IntVector) -> Result<u64> {
    DmCounter::new(x)?.count(alpha)
}

/// Axis-aligned box of lattice points, corners inclusive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxRange {
    pub lo: IntVector,
    pub hi: IntVector,
}

impl BoxRange {
    pub fn new(lo: IntVector, hi: IntVector) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                found: hi.dim(),
            });
        }
        Ok(BoxRange { lo, hi })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: i64, hi: i64) -> Self {
        BoxRange {
            lo: IntVector::from_i64s(&vec![lo; dim]),
            hi: IntVector::from_i64s(&vec![hi; dim]),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    /// All lattice points, last coordinate varying fastest.
    pub fn points(&self) -> Vec<IntVector> {
        let lo = self.lo.to_i64s().expect("box corner fits in i64");
        let hi = self.hi.to_i64s().expect("box corner fits in i64");
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            out.push(IntVector::from_i64s(&cur));
            let mut k = cur.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = lo[k];
            }
        }
    }
}

/// A point where the engines disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub alpha: IntVector,
    pub brute: u64,
    pub recursion: u64,
    pub closed: Rational,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EngineStats<T> {
    pub brute: T,
    pub recursion: T,
    pub closed: T,
}

/// Outcome of [`cross_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub bounds: BoxRange,
    pub mismatches: Vec<Mismatch>,
    /// Points evaluated per engine.
    pub totals: EngineStats<usize>,
    /// Wall time per engine in seconds; the closed-form time includes the
    /// reduction.
    pub timings: EngineStats<f64>,
    /// Worst relative deviation between the reduced and original generating
    /// functions at the seeded generic points; `None` when the closed form was
    /// supplied rather than derived.
    pub identity_residual: Option<f64>,
}

impl CountReport {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Number of generic points used by the identity check in [`cross_check`].
pub const IDENTITY_POINTS: usize = 5;

/// Evaluates brute force, the recursion and the closed form at every point
/// of `bounds` and records disagreements. `seed` only drives the
/// generating-function identity check.
pub fn cross_check(x: &[IntVector], bounds: &BoxRange, seed: u64) -> Result<CountReport> {
    cross_check_with(x, bounds, seed, &ReduceOptions::default())
}

/// [`cross_check`] with explicit limits on the reduction.
pub fn cross_check_with(
    x: &[IntVector],
    bounds: &BoxRange,
    seed: u64,
    options: &ReduceOptions,
) -> Result<CountReport> {
    let dim = crate::ambient_dimension(x)?;
    let r = rank(x);
    if r != dim {
        return Err(Error::RankDeficient { rank: r, dim });
    }
    let start = Instant::now();
    let reduced = toric_reduce_with(x, options)?;
    let cf = ClosedForm::from_reduced(&reduced)?;
    let build = start.elapsed().as_secs_f64();
    let mut report = cross_check_against(x, bounds, &cf)?;
    report.timings.closed += build;
    report.identity_residual = Some(reduced.identity_residual(seed, IDENTITY_POINTS)?);
    Ok(report)
}

/// Compares brute force and the recursion against a given closed form, for
/// example one read back from disk.
pub fn cross_check_against(
    x: &[IntVector],
    bounds: &BoxRange,
    cf: &ClosedForm,
) -> Result<CountReport> {
    let dim = crate::ambient_dimension(x)?;
    if bounds.dim() != dim || cf.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if bounds.dim() != dim {
                bounds.dim()
            } else {
                cf.dim()
            },
        });
    }
    let r = rank(x);
    if r != dim {
        return Err(Error::RankDeficient { rank: r, dim });
    }
    let cert = pointedness_certificate(x).ok_or(Error::NotPointed)?;
    let points = bounds.points();

    let start = Instant::now();
    let eval = cf.evaluator()?;
    let closed: Vec<Rational> = points.iter().map(|a| eval.eval(a)).collect();
    let t_closed = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let bf = BruteForce::new(x, &cert)?;
    let brute = points
        .iter()
        .map(|a| bf.count(a))
        .collect::<Result<Vec<_>>>()?;
    let t_brute = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let mut dm = DmCounter::new(x)?;
    let recursion = points
        .iter()
        .map(|a| dm.count(a))
        .collect::<Result<Vec<_>>>()?;
    let t_rec = start.elapsed().as_secs_f64();

    let mismatches = points
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            brute[i] != recursion[i] || closed[i] != Rational::from_integer(brute[i].into())
        })
        .map(|(i, a)| Mismatch {
            alpha: a.clone(),
            brute: brute[i],
            recursion: recursion[i],
            closed: closed[i].clone(),
        })
        .collect();

    Ok(CountReport {
        bounds: bounds.clone(),
        mismatches,
        totals: EngineStats {
            brute: brute.len(),
            recursion: recursion.len(),
            closed: closed.len(),
        },
        timings: EngineStats {
            brute: t_brute,
            recursion: t_rec,
            closed: t_closed,
        },
        identity_residual: None,
    })
}
