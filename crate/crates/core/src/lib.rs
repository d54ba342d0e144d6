//! Exact counting of nonnegative integer solutions of `Σ βᵢ·aᵢ = α`.
//!
//! The discrete truncated power `t_X(α)` of a pointed integer vector system
//! `X = {a₁, …, aₙ} ⊂ ℤˢ` is computed three ways:
//!
//! * [`engines::brute_force_count`] enumerates the solution polytope,
//! * [`engines::DmCounter`] runs the memoized removal recursion
//!   `t_X(α) = Σⱼ t_{X∖{a}}(α − j·a)`,
//! * [`quasipoly::closed_form`] rewrites the generating function
//!   `Π_a 1/(1 − e^{−⟨a,x⟩})` into terms with linearly independent
//!   denominators ([`toric`]) and inverts each term into a polynomial
//!   supported on a shifted lattice cone.
//!
//! Every algebraic path is exact; floating point is only used to spot-check
//! generating-function identities.

pub mod engines;
pub mod error;
pub mod exp_algebra;
pub mod linalg;
pub mod quasipoly;
pub mod sample;
pub mod toric;

pub use engines::{
    brute_force_count, cross_check, cross_check_against, cross_check_with, dm_count,
    independent_count, BoxRange, CountReport, DmCounter, Mismatch,
};
pub use error::{Error, Result};
pub use exp_algebra::{
    geometric_factor, laplace_generating, random_generic_point, DenomFactor, ExpMonomial,
    ExpRatSum, ExpRatTerm,
};
pub use linalg::{
    integer_relation, orth_complement, pointedness_certificate, rank, solve_square, IntVector,
    IntegerRelation, PointedCertificate, RatMatrix, Rational,
};
pub use quasipoly::{
    closed_form, eval_closed, inverse_laplace_term, support_membership, ClosedForm, ConePiece,
    MultiPoly,
};
pub use toric::{
    absorb_vector, expand_dependent, partial_fraction, toric_reduce, toric_reduce_with,
    ReduceOptions, ReducedForm,
};

/// Checks that `x` is a nonempty, dimension-consistent, zero-free system and
/// returns its ambient dimension.
pub fn ambient_dimension(x: &[IntVector]) -> Result<usize> {
    let first = x.first().ok_or(Error::EmptySystem)?;
    let dim = first.dim();
    for v in x {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
    }
    Ok(dim)
}
