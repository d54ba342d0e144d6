//! Human-readable renderings of closed forms and reduced sums.

use std::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use toricount::quasipoly::variable_name;
use toricount::{ClosedForm, ConePiece, ExpRatTerm, IntVector, MultiPoly, ReducedForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Text,
    Latex,
}

/// Largest constant coefficient whose divisors are enumerated when looking
/// for rational roots.
const ROOT_SEARCH_LIMIT: u64 = 1_000_000;

fn power(name: &str, k: u32, style: Style) -> String {
    match (k, style) {
        (1, _) => name.to_string(),
        (_, Style::Text) => format!("{name}^{k}"),
        (_, Style::Latex) => format!("{name}^{{{k}}}"),
    }
}

/// `Σ c·x^e` with integer coefficients, highest degree first, no spaces.
fn integer_poly(terms: &[(Vec<u32>, BigInt)], nvars: usize, style: Style) -> String {
    let mut sorted: Vec<&(Vec<u32>, BigInt)> = terms.iter().collect();
    sorted.sort_by(|a, b| {
        let da: u32 = a.0.iter().sum();
        let db: u32 = b.0.iter().sum();
        db.cmp(&da).then_with(|| b.0.cmp(&a.0))
    });
    let mut out = String::new();
    for (i, (e, c)) in sorted.into_iter().enumerate() {
        if c.is_negative() {
            out.push('-');
        } else if i > 0 {
            out.push('+');
        }
        let vars: String = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(j, &k)| power(&variable_name(j, nvars), k, style))
            .collect();
        let abs = c.abs();
        if vars.is_empty() || !abs.is_one() {
            write!(out, "{abs}").unwrap();
        }
        out.push_str(&vars);
    }
    out
}

/// Integer roots `p/q` of a primitive univariate integer polynomial
/// (`coeffs[i]` multiplies `x^i`), with the cofactor left over.
fn rational_roots(mut coeffs: Vec<BigInt>) -> (Vec<(BigInt, BigInt)>, Vec<BigInt>) {
    let mut roots = Vec::new();
    while coeffs.len() > 1 && coeffs[0].is_zero() {
        coeffs.remove(0);
        roots.push((BigInt::zero(), BigInt::one()));
    }
    'search: while coeffs.len() > 1 {
        let (Some(a0), Some(an)) = (
            coeffs[0].abs().to_u64(),
            coeffs.last().unwrap().abs().to_u64(),
        ) else {
            break;
        };
        if a0 > ROOT_SEARCH_LIMIT || an > ROOT_SEARCH_LIMIT {
            break;
        }
        let divisors = |n: u64| (1..=n).filter(move |d| n.is_multiple_of(*d));
        for q in divisors(an) {
            for p in divisors(a0) {
                if p.gcd(&q) != 1 {
                    continue;
                }
                for p in [BigInt::from(p), -BigInt::from(p)] {
                    let q = BigInt::from(q);
                    if let Some(rest) = divide_linear(&coeffs, &p, &q) {
                        roots.push((p, q));
                        coeffs = rest;
                        continue 'search;
                    }
                }
            }
        }
        break;
    }
    (roots, coeffs)
}

/// Exact quotient of `coeffs` by `q·x − p`, if it divides.
fn divide_linear(coeffs: &[BigInt], p: &BigInt, q: &BigInt) -> Option<Vec<BigInt>> {
    let n = coeffs.len() - 1;
    let mut quotient = vec![BigInt::zero(); n];
    let mut carry = BigInt::zero();
    for i in (1..=n).rev() {
        let (b, r) = (&coeffs[i] + &carry).div_rem(q);
        if !r.is_zero() {
            return None;
        }
        carry = &b * p;
        quotient[i - 1] = b;
    }
    (&coeffs[0] + &carry).is_zero().then_some(quotient)
}

/// `(negative, body)` for a polynomial: a rational scalar, linear factors
/// when univariate, and the remaining primitive integer polynomial.
pub fn format_poly(poly: &MultiPoly, style: Style) -> (bool, String) {
    if poly.is_zero() {
        return (false, "0".to_string());
    }
    let nvars = poly.nvars();
    let denom = poly
        .monomials()
        .fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
    let scaled: Vec<(Vec<u32>, BigInt)> = poly
        .monomials()
        .map(|(e, c)| (e.clone(), (c.numer() * (&denom / c.denom()))))
        .collect();
    let leading = scaled
        .iter()
        .max_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            da.cmp(&db).then_with(|| a.0.cmp(&b.0))
        })
        .map(|(_, c)| c.is_negative())
        .unwrap_or(false);
    let content = scaled.iter().fold(BigInt::zero(), |g, (_, c)| g.gcd(c));
    let primitive: Vec<(Vec<u32>, BigInt)> = scaled
        .into_iter()
        .map(|(e, c)| {
            let c = c / &content;
            (e, if leading { -c } else { c })
        })
        .collect();

    let mut factors: Vec<String> = Vec::new();
    let mut rest = primitive.clone();
    if nvars == 1 {
        let deg = primitive.iter().map(|(e, _)| e[0]).max().unwrap_or(0) as usize;
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        for (e, c) in &primitive {
            coeffs[e[0] as usize] = c.clone();
        }
        let (mut roots, cofactor) = rational_roots(coeffs);
        roots.sort_by(|a, b| (&b.0 * &a.1).cmp(&(&a.0 * &b.1)));
        let mut counted: Vec<(String, u32)> = Vec::new();
        for (p, q) in roots {
            let mut linear = vec![(vec![1], q)];
            if !p.is_zero() {
                linear.push((vec![0], -p));
            }
            let f = integer_poly(&linear, 1, style);
            match counted.last_mut() {
                Some((g, k)) if *g == f => *k += 1,
                _ => counted.push((f, 1)),
            }
        }
        for (f, k) in counted {
            let wrapped = if f.len() > 1 { format!("({f})") } else { f };
            factors.push(if k > 1 {
                match style {
                    Style::Text => format!("{wrapped}^{k}"),
                    Style::Latex => format!("{wrapped}^{{{k}}}"),
                }
            } else {
                wrapped
            });
        }
        rest = cofactor
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (vec![i as u32], c))
            .collect();
    }

    let rest_is_one = rest.len() == 1 && rest[0].0.iter().all(|&k| k == 0) && rest[0].1.is_one();
    if !rest_is_one {
        let body = integer_poly(&rest, nvars, style);
        let bare = rest.len() == 1 || (factors.is_empty() && content.is_one() && denom.is_one());
        factors.push(if bare { body } else { format!("({body})") });
    }
    let mut out = String::new();
    if factors.is_empty() || !content.is_one() {
        write!(out, "{content}").unwrap();
    }
    for f in &factors {
        out.push_str(f);
    }
    if !denom.is_one() {
        write!(out, "/{denom}").unwrap();
    }
    (leading, out)
}

fn signed(poly: &MultiPoly, style: Style) -> String {
    let (neg, body) = format_poly(poly, style);
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `Σ wᵢ·varᵢ + c` as compact text.
fn affine(w: &[BigInt], c: &BigInt, style: Style) -> String {
    let nvars = w.len();
    let mut terms: Vec<(Vec<u32>, BigInt)> = w
        .iter()
        .enumerate()
        .filter(|(_, k)| !k.is_zero())
        .map(|(i, k)| {
            let mut e = vec![0; nvars];
            e[i] = 1;
            (e, k.clone())
        })
        .collect();
    if !c.is_zero() {
        terms.push((vec![0; nvars], c.clone()));
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        integer_poly(&terms, nvars, style)
    }
}

/// Coordinates of `α − offset`, one affine form per coordinate.
fn shifted_argument(offset: &IntVector, style: Style) -> String {
    let s = offset.dim();
    let coords: Vec<String> = (0..s)
        .map(|i| {
            let mut w = vec![BigInt::zero(); s];
            w[i] = BigInt::one();
            affine(&w, &-&offset[i], style)
        })
        .collect();
    coords.join(", ")
}

fn basis_set(basis: &[IntVector], style: Style) -> String {
    let items: Vec<String> = basis.iter().map(ToString::to_string).collect();
    match style {
        Style::Text => format!("{{{}}}", items.join(", ")),
        Style::Latex => format!("\\{{{}\\}}", items.join(", ")),
    }
}

/// Distinct bases in order of first appearance.
fn basis_labels(pieces: &[ConePiece]) -> Vec<Vec<IntVector>> {
    let mut seen: Vec<Vec<IntVector>> = Vec::new();
    for p in pieces {
        if !seen.contains(&p.basis) {
            seen.push(p.basis.clone());
        }
    }
    seen
}

fn coordinates(s: usize) -> String {
    (0..s)
        .map(|i| variable_name(i, s))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn closed_form_text(cf: &ClosedForm) -> String {
    let s = cf.dim();
    let bases = basis_labels(&cf.pieces);
    let mut out = String::new();
    writeln!(
        out,
        "t_X({}) for {} vectors in dimension {s}: {} pieces",
        coordinates(s),
        cf.source.len(),
        cf.pieces.len()
    )
    .unwrap();
    for p in &cf.pieces {
        let k = bases.iter().position(|b| *b == p.basis).unwrap() + 1;
        writeln!(
            out,
            "  {} * t_A{k}({})",
            signed(&p.poly, Style::Text),
            shifted_argument(&p.offset, Style::Text)
        )
        .unwrap();
    }
    for (k, b) in bases.iter().enumerate() {
        writeln!(out, "  A{} = {}", k + 1, basis_set(b, Style::Text)).unwrap();
    }
    out
}

pub fn closed_form_latex(cf: &ClosedForm) -> String {
    let s = cf.dim();
    let bases = basis_labels(&cf.pieces);
    let mut out = String::new();
    writeln!(out, "\\begin{{aligned}}").unwrap();
    write!(out, "t_X({}) &= ", coordinates(s)).unwrap();
    if cf.pieces.is_empty() {
        write!(out, "0").unwrap();
    }
    for (i, p) in cf.pieces.iter().enumerate() {
        let k = bases.iter().position(|b| *b == p.basis).unwrap() + 1;
        let (neg, body) = format_poly(&p.poly, Style::Latex);
        let sign = match (i, neg) {
            (0, false) => "",
            (0, true) => "-",
            (_, false) => "\\\\\n  &\\quad + ",
            (_, true) => "\\\\\n  &\\quad - ",
        };
        write!(
            out,
            "{sign}{body} \\, t_{{A_{{{k}}}}}({})",
            shifted_argument(&p.offset, Style::Latex)
        )
        .unwrap();
    }
    writeln!(out, "\n\\end{{aligned}}").unwrap();
    let defs: Vec<String> = bases
        .iter()
        .enumerate()
        .map(|(k, b)| format!("A_{{{}}} = {}", k + 1, basis_set(b, Style::Latex)))
        .collect();
    writeln!(out, "\\quad {}", defs.join(",\\ ")).unwrap();
    out
}

fn exponent(v: &IntVector, style: Style) -> String {
    affine(v.components(), &BigInt::zero(), style)
}

pub fn reduced_text(r: &ReducedForm) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} terms over {} vectors in dimension {}",
        r.sum.len(),
        r.source.len(),
        r.dim()
    )
    .unwrap();
    for t in r.terms() {
        writeln!(out, "  {t}").unwrap();
    }
    out
}

fn term_latex(t: &ExpRatTerm) -> (bool, String) {
    let coeff = t.coeff();
    let neg = coeff.is_negative();
    let abs = coeff.abs();
    let mut num = String::new();
    let shift_zero = t.shift().is_zero();
    if !abs.is_one() || shift_zero {
        if abs.is_integer() {
            write!(num, "{abs}").unwrap();
        } else {
            write!(num, "\\tfrac{{{}}}{{{}}}", abs.numer(), abs.denom()).unwrap();
        }
    }
    if !shift_zero {
        write!(num, "e^{{{}}}", exponent(t.shift(), Style::Latex)).unwrap();
    }
    let den: String = t
        .denom()
        .iter()
        .map(|f| {
            let base = format!("(1-e^{{{}}})", exponent(&-&f.vector, Style::Latex));
            if f.power == 1 {
                base
            } else {
                format!("{base}^{{{}}}", f.power)
            }
        })
        .collect();
    (neg, format!("\\frac{{{num}}}{{{den}}}"))
}

pub fn reduced_latex(r: &ReducedForm) -> String {
    let mut out = String::new();
    writeln!(out, "\\begin{{aligned}}").unwrap();
    write!(out, "F(x) &= ").unwrap();
    for (i, t) in r.terms().enumerate() {
        let (neg, body) = term_latex(&t);
        let sign = match (i, neg) {
            (0, false) => "",
            (0, true) => "-",
            (_, false) => "\\\\\n  &\\quad + ",
            (_, true) => "\\\\\n  &\\quad - ",
        };
        write!(out, "{sign}{body}").unwrap();
    }
    writeln!(out, "\n\\end{{aligned}}").unwrap();
    out
}

/// Per-engine timing table.
pub fn timing_table(rows: &[(&str, usize, f64)]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<10} {:>8} {:>12} {:>14}",
        "engine", "points", "seconds", "us/point"
    )
    .unwrap();
    for (name, points, secs) in rows {
        let per = if *points == 0 {
            0.0
        } else {
            secs * 1e6 / *points as f64
        };
        writeln!(out, "{name:<10} {points:>8} {secs:>12.6} {per:>14.3}").unwrap();
    }
    out
}
