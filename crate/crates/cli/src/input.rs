//! Plain-text vector systems: one vector per line, integers separated by
//! whitespace, `#` starts a comment line.

use thiserror::Error;
use toricount::{pointedness_certificate, rank, IntVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InputError {
    #[error("no vectors in input")]
    Empty,

    #[error("line {line}: cannot parse {token:?} as an integer")]
    BadInteger { line: usize, token: String },

    #[error("line {line}: ragged row, expected {expected} entries, found {found}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: zero vector")]
    ZeroVector { line: usize },

    #[error("rank-deficient system: rank {rank} in dimension {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("not pointed: some nonzero nonnegative combination of the vectors vanishes")]
    NotPointed,
}

/// A validated vector system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub dimension: usize,
    pub vectors: Vec<IntVector>,
    /// Text of a `# label: …` comment, if present.
    pub label: Option<String>,
}

pub fn parse_vectors(text: &str) -> Result<ProblemSpec, InputError> {
    let mut vectors: Vec<IntVector> = Vec::new();
    let mut label = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(l) = comment.trim().strip_prefix("label:") {
                label.get_or_insert_with(|| l.trim().to_string());
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let entries = trimmed
            .split_whitespace()
            .map(|t| {
                t.parse::<num_bigint::BigInt>()
                    .map_err(|_| InputError::BadInteger {
                        line,
                        token: t.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = vectors.first() {
            if first.dim() != entries.len() {
                return Err(InputError::Ragged {
                    line,
                    expected: first.dim(),
                    found: entries.len(),
                });
            }
        }
        let v = IntVector::new(entries);
        if v.is_zero() {
            return Err(InputError::ZeroVector { line });
        }
        vectors.push(v);
    }

    let dimension = vectors.first().ok_or(InputError::Empty)?.dim();
    let r = rank(&vectors);
    if r != dimension {
        return Err(InputError::RankDeficient {
            rank: r,
            dim: dimension,
        });
    }
    if pointedness_certificate(&vectors).is_none() {
        return Err(InputError::NotPointed);
    }
    Ok(ProblemSpec {
        dimension,
        vectors,
        label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional() {
        let spec = parse_vectors("1\n1\n2\n").unwrap();
        assert_eq!(spec.dimension, 1);
        assert_eq!(spec.vectors.len(), 3);
        assert_eq!(spec.vectors[0], spec.vectors[1]);
    }

    #[test]
    fn comments_and_label() {
        let spec = parse_vectors("# label: plane\n1 0\n# note\n0 1\n\n-1 2\n").unwrap();
        assert_eq!(spec.dimension, 2);
        assert_eq!(spec.vectors[2], IntVector::from_i64s(&[-1, 2]));
        assert_eq!(spec.label.as_deref(), Some("plane"));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_vectors("1\n-1\n"), Err(InputError::NotPointed));
        assert_eq!(
            parse_vectors("1 0\n1\n"),
            Err(InputError::Ragged {
                line: 2,
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            parse_vectors("1 0\n0 0\n"),
            Err(InputError::ZeroVector { line: 2 })
        );
        assert_eq!(
            parse_vectors("1 1\n2 2\n"),
            Err(InputError::RankDeficient { rank: 1, dim: 2 })
        );
        assert_eq!(parse_vectors("# nothing\n"), Err(InputError::Empty));
        assert!(matches!(
            parse_vectors("1 x\n"),
            Err(InputError::BadInteger { line: 1, .. })
        ));
    }
}
