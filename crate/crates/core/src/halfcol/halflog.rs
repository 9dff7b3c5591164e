use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fmt_float;

/// A half-exponential `h` with `h(h(x)) = a^x` and its inverse `f`, a half-log
/// with `f(f(x)) = log_a x`.
///
/// `h` maps `[t0, t1)` linearly onto `[t1, a^t0)`. Beyond that
/// `h(x) = a^{f(x)}` and `f(y) = h(log_a y)`, each step moving one interval down,
/// so both are evaluated exactly by a short recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLog {
    pub a: f64,
    pub t0: f64,
    pub t1: f64,
    pub x_max: f64,
    pub tol: f64,
    /// Interval endpoints `t0, t1, a^t0, a^t1, a^{a^t0}, ...` up to past `x_max`.
    pub seams: Vec<f64>,
    slope: f64,
}

pub fn build_halflog(a: f64, x_max: f64, tol: f64) -> Result<HalfLog> {
    build_halflog_with(a, 0.25, 0.5, x_max, tol)
}

pub fn build_halflog_with(a: f64, t0: f64, t1: f64, x_max: f64, tol: f64) -> Result<HalfLog> {
    if !(a > 1.0) {
        return Err(Error::Domain(format!("base a = {a} must exceed 1")));
    }
    if !(t0 < t1 && t1 < a.powf(t0)) {
        return Err(Error::Domain(format!(
            "need t0 < t1 < a^t0, got t0 = {t0}, t1 = {t1}, a^t0 = {}",
            a.powf(t0)
        )));
    }
    let mut seams = vec![t0, t1];
    while *seams.last().expect("seeded") < x_max {
        let next = a.powf(seams[seams.len() - 2]);
        if !next.is_finite() || next <= *seams.last().expect("seeded") || seams.len() > 64 {
            return Err(Error::DomainTooSmall(format!(
                "seams stop at {} before reaching {x_max}",
                seams.last().expect("seeded")
            )));
        }
        seams.push(next);
    }
    Ok(HalfLog {
        a,
        t0,
        t1,
        x_max,
        tol,
        seams,
        slope: (a.powf(t0) - t1) / (t1 - t0),
    })
}

impl HalfLog {
    pub fn log_a(&self, x: f64) -> f64 {
        x.ln() / self.a.ln()
    }

    /// The half-exponential, defined for `x >= t0`.
    pub fn h(&self, x: f64) -> f64 {
        if x < self.t1 {
            self.t1 + (x - self.t0) * self.slope
        } else {
            self.a.powf(self.f(x))
        }
    }

    /// The half-log, defined for `y >= t1`; extended linearly below `t1`.
    pub fn f(&self, y: f64) -> f64 {
        if y < self.a.powf(self.t0) {
            self.t0 + (y - self.t1) / self.slope
        } else {
            self.h(self.log_a(y))
        }
    }

    /// Sampled table `x,f(x),h(x)` over `[t1, x_max]`, geometrically spaced.
    pub fn to_csv(&self, samples: usize) -> String {
        let mut s = String::from("x,f(x),h(x)\n");
        let samples = samples.max(2);
        let ratio = (self.x_max / self.t1).ln();
        for i in 0..samples {
            let x = self.t1 * (ratio * i as f64 / (samples - 1) as f64).exp();
            let _ = writeln!(s, "{},{},{}", fmt_float(x), fmt_float(self.f(x)), fmt_float(self.h(x)));
        }
        s
    }
}
