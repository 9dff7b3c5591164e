//! Simulation, construction and verification toolkit for distributed algorithms
//! on bounded-degree trees in the LOCAL model.
//!
//! The crate covers rake-and-compress decompositions under several knowledge
//! models, the 2½-coloring problem family with its deterministic and randomized
//! algorithms, the exponent optimization behind the polynomial schedules, and a
//! small benchmark harness.

pub mod alpha;
pub mod bench;
pub mod error;
pub mod generators;
pub mod halfcol;
pub mod par;
pub mod rc;
pub mod sim;
pub mod tape;
pub mod tree;

pub use error::{Error, Result};

/// Smallest `r` with `r^e >= m`.
pub fn ceil_root(m: u128, e: u32) -> u128 {
    if m <= 1 {
        return m;
    }
    let mut r = (m as f64).powf(1.0 / e as f64).floor() as u128;
    r = r.saturating_sub(2).max(1);
    while r.checked_pow(e).is_some_and(|p| p < m) {
        r += 1;
    }
    r
}

/// Formats a float with 12 significant digits, trimming trailing zeros.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mant, e) = s.split_once('e').expect("exponent form");
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{e}")
    }
}
