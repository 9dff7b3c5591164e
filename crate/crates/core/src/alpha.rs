//! Optimal phase exponents for the polynomial-knowledge schedules.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fmt_float;

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSchedule {
    pub k: usize,
    pub c: f64,
    /// `alpha[i-1]` is the exponent of phase `i`, for `i` in `1..k`.
    pub alpha: Vec<f64>,
    /// `prefix[i-1] = alpha[0] + ... + alpha[i-1]`.
    pub prefix: Vec<f64>,
    pub i0: usize,
    /// `c * alpha_1`, the exponent of the overall round bound.
    pub exponent: f64,
}

impl AlphaSchedule {
    pub fn alpha_at(&self, i: usize) -> f64 {
        self.alpha[i - 1]
    }

    pub fn prefix_at(&self, i: usize) -> f64 {
        self.prefix[i - 1]
    }
}

/// `floor(1 / (c a1))`, nudged up when within 1e-12 of the next integer.
pub fn i0_of(a1: f64, c: f64) -> usize {
    let x = 1.0 / (c * a1);
    (x + 1e-12 * x.max(1.0)).floor() as usize
}

pub fn objective(a1: f64, k: usize, c: f64) -> Result<f64> {
    if !(a1 > 0.0 && a1 < 1.0 / c) {
        return Err(Error::Domain(format!("alpha1 = {a1} outside (0, 1/{c})")));
    }
    let i0 = i0_of(a1, c);
    let base = 1.0 / (1.0 - c * a1);
    let e = k as f64 - i0 as f64;
    Ok(base.powf(e) * i0 as f64 * a1 - 1.0)
}

pub fn solve_alpha1(k: usize, c: f64, tol: f64) -> Result<f64> {
    if k < 2 || !(c >= 1.0) || !(tol > 0.0) {
        return Err(Error::Domain(format!("k = {k}, c = {c}, tol = {tol}")));
    }
    let eps = 1e-15 / c;
    let mut lo = eps;
    let mut hi = 1.0 / c - eps;
    if objective(lo, k, c)? >= 0.0 || objective(hi, k, c)? <= 0.0 {
        return Err(Error::NoBracket);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if objective(mid, k, c)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    if objective(root, k, c)?.abs() > tol {
        return Err(Error::NoBracket);
    }
    Ok(root)
}

pub fn derive_schedule(a1: f64, k: usize, c: f64) -> AlphaSchedule {
    let i0 = i0_of(a1, c);
    let x = c * a1;
    let mut alpha = Vec::with_capacity(k.saturating_sub(1));
    let mut prefix = Vec::with_capacity(k.saturating_sub(1));
    let mut sum = 0.0;
    for i in 1..k {
        let a = if i <= i0 { a1 } else { x / (1.0 - x) * sum };
        sum += a;
        alpha.push(a);
        prefix.push(sum);
    }
    AlphaSchedule {
        k,
        c,
        alpha,
        prefix,
        i0,
        exponent: x,
    }
}

/// Solves for `alpha_1` and derives the schedule.
pub fn schedule(k: usize, c: f64) -> Result<AlphaSchedule> {
    Ok(derive_schedule(solve_alpha1(k, c, 1e-12)?, k, c))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleViolation {
    pub identity: &'static str,
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Checks the structural identities of a schedule; returns every violation.
///
/// The ratio recurrence `alpha_i = alpha_{i-1} / (1 - c alpha_1)` is only checked
/// for `i >= i0 + 2`: at `i = i0 + 1` it would need `alpha_{i0} / A_{i0} = c alpha_1`,
/// which fails whenever `i0 >= 1`.
pub fn verify_schedule(s: &AlphaSchedule, tol: f64) -> Vec<ScheduleViolation> {
    let mut out = Vec::new();
    let x = s.exponent;
    let a1 = s.alpha[0];
    let mut check = |identity, index, lhs: f64, rhs: f64, ok: bool| {
        if !ok {
            out.push(ScheduleViolation {
                identity,
                index,
                lhs,
                rhs,
            });
        }
    };
    for i in 1..s.k {
        if i <= s.i0 {
            let a = s.alpha_at(i);
            check("alpha_i = alpha_1 for i <= i0", i, a, a1, (a - a1).abs() <= tol);
            continue;
        }
        let (a, p) = (s.alpha_at(i), s.prefix_at(i));
        check("alpha_i / A_i = c alpha_1", i, a / p, x, (a / p - x).abs() <= tol);
        if i >= s.i0 + 2 {
            let prev = s.alpha_at(i - 1) / (1.0 - x);
            check("alpha_i = alpha_{i-1} / (1 - c alpha_1)", i, a, prev, (a - prev).abs() <= tol);
        }
        if i >= 2 && s.i0 >= 1 {
            let prev = s.alpha_at(i - 1);
            check("alpha increasing after i0", i, a, prev, a > prev - tol);
        }
        check("A_i >= 1/c", i, p, 1.0 / s.c, p >= 1.0 / s.c - tol);
    }
    if s.k >= 2 {
        let last = s.prefix_at(s.k - 1);
        check("A_{k-1} = 1 - c alpha_1", s.k - 1, last, 1.0 - x, (last - (1.0 - x)).abs() <= tol);
    }
    out
}

/// CSV `k,c,alpha1,exponent,i0` over a grid.
pub fn table(ks: &[usize], cs: &[f64]) -> Result<String> {
    let mut s = String::from("k,c,alpha1,exponent,i0\n");
    for &k in ks {
        for &c in cs {
            let sch = schedule(k, c)?;
            let _ = writeln!(
                s,
                "{k},{},{},{},{}",
                fmt_float(c),
                fmt_float(sch.alpha[0]),
                fmt_float(sch.exponent),
                sch.i0
            );
        }
    }
    Ok(s)
}
