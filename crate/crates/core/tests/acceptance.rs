//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test -p toricount --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use toricount::engines::IDENTITY_POINTS;
use toricount::sample::{random_pointed_system, SystemShape};
use toricount::{
    brute_force_count, cross_check_against, pointedness_certificate, rank, support_membership,
    toric_reduce_with, BoxRange, ClosedForm, DmCounter, IntVector, Rational, ReduceOptions,
    ReducedForm,
};

/// Seeds of the random systems.
const SEEDS: std::ops::RangeInclusive<u64> = 1..=50;
/// Term budget per reduction; a system whose reduction exceeds it counts as a
/// failure of every criterion that needs its reduced form.
const MAX_TERMS: usize = 300_000;
const IDENTITY_TOL: f64 = 1e-9;
const IDENTITY_SEED: u64 = 2024;
const AGREEMENT_LO: i64 = -6;
const AGREEMENT_HI: i64 = 12;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn v(c: &[i64]) -> IntVector {
    IntVector::from_i64s(c)
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A system reduced once and shared between criteria.
struct Prepared {
    name: String,
    x: Vec<IntVector>,
    reduced: Result<ReducedForm, String>,
    closed: Option<ClosedForm>,
    build_secs: f64,
}

impl Prepared {
    fn new(name: String, x: Vec<IntVector>) -> Self {
        let start = Instant::now();
        let options = ReduceOptions {
            max_terms: Some(MAX_TERMS),
        };
        let reduced = toric_reduce_with(&x, &options).map_err(|e| e.to_string());
        let closed = reduced
            .as_ref()
            .ok()
            .and_then(|r| ClosedForm::from_reduced(r).ok());
        Prepared {
            name,
            x,
            reduced,
            closed,
            build_secs: start.elapsed().as_secs_f64(),
        }
    }

    fn dim(&self) -> usize {
        self.x[0].dim()
    }
}

fn example_one() -> Vec<IntVector> {
    vec![v(&[1]), v(&[1]), v(&[2])]
}

fn example_two() -> Vec<IntVector> {
    vec![v(&[1, 0]), v(&[0, 1]), v(&[-1, 2])]
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let x = example_two();
    let cert = pointedness_certificate(&x).expect("pointed");
    let cf = match toric_reduce_with(&x, &ReduceOptions::default())
        .and_then(|r| ClosedForm::from_reduced(&r))
    {
        Ok(cf) => cf,
        Err(e) => return verdict(false, format!("no closed form: {e}")),
    };
    let eval = match cf.evaluator() {
        Ok(e) => e,
        Err(e) => return verdict(false, e.to_string()),
    };
    let a1 = [v(&[1, 0]), v(&[-1, 2])];
    let a2 = [v(&[1, 0]), v(&[0, 1])];
    let zero = v(&[0, 0]);
    let indicator = |basis: &[IntVector], alpha: &IntVector| -> Rational {
        int(support_membership(basis, &zero, alpha).unwrap() as u64)
    };
    let mut bad = Vec::new();
    for px in 0..=15i64 {
        for py in 0..=15i64 {
            let alpha = v(&[px, py]);
            let reference = ratio(2 * px + py + 2, 2) * indicator(&a1, &alpha)
                + ratio(2 * px + py + 1, 2) * indicator(&a1, &v(&[px, py - 1]))
                - int(px as u64) * indicator(&a2, &alpha);
            let closed = eval.eval(&alpha);
            let brute = brute_force_count(&x, &alpha, &cert).map(int);
            if closed != reference || brute.as_ref() != Ok(&reference) {
                bad.push(format!("({px},{py})"));
            }
        }
    }
    let spots = [((0, 2), 2), ((1, 1), 1), ((2, 2), 2), ((0, 4), 3)];
    for ((px, py), want) in spots {
        if eval.eval(&v(&[px, py])) != int(want) {
            bad.push(format!("spot ({px},{py})"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        bad.is_empty() && secs < 5.0,
        format!(
            "256 points and 4 spot values, {} disagreements, {secs:.2}s (limit 5s)",
            bad.len()
        ),
    )
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let x = example_one();
    let cert = pointedness_certificate(&x).expect("pointed");
    let cf = match toric_reduce_with(&x, &ReduceOptions::default())
        .and_then(|r| ClosedForm::from_reduced(&r))
    {
        Ok(cf) => cf,
        Err(e) => return verdict(false, format!("no closed form: {e}")),
    };
    let eval = match cf.evaluator() {
        Ok(e) => e,
        Err(e) => return verdict(false, e.to_string()),
    };
    let mut bad = Vec::new();
    for px in -6..=30i64 {
        let alpha = v(&[px]);
        let closed = eval.eval(&alpha);
        if brute_force_count(&x, &alpha, &cert).map(int).as_ref() != Ok(&closed) {
            bad.push(format!("brute at {px}"));
        }
        if px >= 0 {
            let branch = if px % 2 == 0 {
                ratio((px + 2) * (px + 2), 4)
            } else {
                ratio((px + 1) * (px + 3), 4)
            };
            if closed != branch {
                bad.push(format!("branch at {px}"));
            }
        }
    }
    // The odd branch printed as (x+2)(x+4)/4 is wrong: 15/4 at x = 1.
    let printed = ratio(3 * 5, 4);
    let at_one = eval.eval(&v(&[1]));
    let erratum_detected = printed != at_one && at_one == int(2);
    if !erratum_detected {
        bad.push("erratum".into());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        bad.is_empty() && secs < 1.0,
        format!(
            "x in [-6,30]: even (x+2)^2/4, odd (x+1)(x+3)/4; \
             (x+2)(x+4)/4 gives {printed} at x=1, true count {at_one}; \
             {} disagreements, {secs:.2}s (limit 1s)",
            bad.len()
        ),
    )
}

fn criterion_3(systems: &[Prepared]) -> Verdict {
    let mut failures = Vec::new();
    for p in systems {
        match &p.reduced {
            Ok(r) => {
                if let Err(e) = r.check_invariants() {
                    failures.push(format!("{}: {e}", p.name));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", p.name)),
        }
    }
    verdict(
        failures.is_empty(),
        summary(systems.len(), &failures) + &listing(&failures),
    )
}

fn criterion_4(systems: &[Prepared]) -> Verdict {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for p in systems {
        let residual = p.reduced.as_ref().map_err(Clone::clone).and_then(|r| {
            r.identity_residual(IDENTITY_SEED, IDENTITY_POINTS)
                .map_err(|e| e.to_string())
        });
        match residual {
            Ok(res) if res <= IDENTITY_TOL => worst = worst.max(res),
            Ok(res) => failures.push(format!("{}: residual {res:e}", p.name)),
            Err(e) => failures.push(format!("{}: {e}", p.name)),
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{}; worst residual {worst:e} (tolerance {IDENTITY_TOL:e}){}",
            summary(systems.len(), &failures),
            listing(&failures)
        ),
    )
}

fn criterion_5(systems: &[Prepared]) -> Verdict {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in systems {
        let Some(cf) = &p.closed else { continue };
        checked += 1;
        let bound = (p.x.len() - p.dim()) as u32;
        let over = cf
            .pieces
            .iter()
            .filter(|piece| piece.poly.degree().unwrap_or(0) > bound)
            .count();
        if over > 0 {
            failures.push(format!("{}: {over} pieces above degree {bound}", p.name));
        }
        if p.x.len() > p.dim() && cf.max_degree() != Some(bound) {
            failures.push(format!(
                "{}: maximal degree {:?}, expected {bound}",
                p.name,
                cf.max_degree()
            ));
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} ({} systems without a closed form skipped){}",
            summary(checked, &failures),
            systems.len() - checked,
            listing(&failures)
        ),
    )
}

fn criterion_6(systems: &[Prepared]) -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut points = 0;
    let mut build = 0.0;
    for p in systems {
        build += p.build_secs;
        let Some(cf) = &p.closed else {
            let why = p.reduced.as_ref().err().cloned().unwrap_or_default();
            failures.push(format!("{}: no closed form ({why})", p.name));
            continue;
        };
        let bounds = BoxRange::cube(p.dim(), AGREEMENT_LO, AGREEMENT_HI);
        match cross_check_against(&p.x, &bounds, cf) {
            Ok(report) => {
                points += report.totals.brute;
                if !report.is_ok() {
                    failures.push(format!(
                        "{}: {} mismatches",
                        p.name,
                        report.mismatches.len()
                    ));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", p.name)),
        }
    }
    let secs = start.elapsed().as_secs_f64() + build;
    verdict(
        failures.is_empty() && secs < 120.0,
        format!(
            "{}; {points} points on [{AGREEMENT_LO},{AGREEMENT_HI}]^s, \
             {secs:.1}s including reductions (limit 120s){}",
            summary(systems.len(), &failures),
            listing(&failures)
        ),
    )
}

/// Checks `t_X(α) = Σ_j t_{X∖{aᵢ}}(α − j·aᵢ)` for every index whose removal
/// keeps full rank.
fn recursion_identity(x: &[IntVector], points: &[IntVector]) -> Result<usize, String> {
    let cert = pointedness_certificate(x).ok_or("not pointed")?;
    let mut full = DmCounter::new(x).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for i in 0..x.len() {
        let rest: Vec<IntVector> = x
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, a)| a.clone())
            .collect();
        if rest.is_empty() || rank(&rest) != x[0].dim() {
            continue;
        }
        let mut sub = DmCounter::new(&rest).map_err(|e| e.to_string())?;
        for alpha in points {
            let mut total = 0u64;
            let mut shifted = alpha.clone();
            while cert.pairing(&shifted) >= Rational::from_integer(0.into()) {
                total += sub.count(&shifted).map_err(|e| e.to_string())?;
                shifted = &shifted - &x[i];
            }
            let lhs = full.count(alpha).map_err(|e| e.to_string())?;
            if lhs != total {
                return Err(format!("index {i} at {alpha}: {lhs} != {total}"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn criterion_7() -> Verdict {
    let one: Vec<IntVector> = (-6..=30).map(|k| v(&[k])).collect();
    let two = BoxRange::cube(2, 0, 15).points();
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, x, pts) in [
        ("example 1", example_one(), one),
        ("example 2", example_two(), two),
    ] {
        match recursion_identity(&x, &pts) {
            Ok(n) => checked += n,
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{checked} (index, point) pairs, {} failures",
            failures.len()
        ) + &listing(&failures),
    )
}

fn summary(total: usize, failures: &[String]) -> String {
    format!("{}/{} systems pass", total - failures.len(), total)
}

fn listing(failures: &[String]) -> String {
    failures.iter().map(|f| format!("\n      {f}")).collect()
}

fn main() -> ExitCode {
    let shape = SystemShape::default();
    let mut systems = vec![
        Prepared::new("example 1".into(), example_one()),
        Prepared::new("example 2".into(), example_two()),
    ];
    for seed in SEEDS {
        systems.push(Prepared::new(
            format!("seed {seed}"),
            random_pointed_system(seed, &shape),
        ));
    }
    let random = &systems[2..];

    let results = [
        ("1 example 2 closed form", criterion_1()),
        ("2 example 1 closed form", criterion_2()),
        ("3 reduction invariants", criterion_3(&systems)),
        ("4 generating-function identity", criterion_4(&systems)),
        ("5 degree law", criterion_5(&systems)),
        ("6 triple-engine agreement", criterion_6(random)),
        ("7 recursion identity", criterion_7()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        println!(
            "{} criterion {name}: {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
        failed += usize::from(!r.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
