//! Enumeration guards.
//!
//! Every exhaustive computation in the crate is bounded by a named limit. The
//! environment variable `SECMUX_GUARD_OVERRIDE` holds an integer multiplier
//! applied to every limit; it exists for offline exploration and must not be
//! set in CI.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const GUARD_ENV: &str = "SECMUX_GUARD_OVERRIDE";

/// Candidate matrices scanned by `enumerate_gl`.
pub const GL_CANDIDATES: u128 = 1 << 24;
/// Largest message space whose full permutation group is enumerated.
pub const PERMUTATION_SPACE: u128 = 8;
/// Joint entries of an n-fold product channel.
pub const PRODUCT_CHANNEL: u128 = 1 << 20;
/// Joint entries touched by exact leakage evaluation.
pub const LEAKAGE_JOINT: u128 = 1 << 26;
/// Grid points visited by a region scan.
pub const SCAN_POINTS: u128 = 10_000_000;
/// Members times ordered pairs scanned by the two-universality check.
pub const PAIR_SCAN: u128 = 1 << 32;
/// Elements of a family or orbit materialized in memory.
pub const FAMILY_MEMBERS: u128 = 1 << 22;

fn multiplier() -> u128 {
    static MULT: OnceLock<u128> = OnceLock::new();
    *MULT.get_or_init(|| {
        std::env::var(GUARD_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u128>().ok())
            .filter(|&m| m >= 1)
            .unwrap_or(1)
    })
}

/// Checks `value` against `limit` scaled by the override multiplier.
pub fn check(name: &'static str, value: u128, limit: u128) -> Result<()> {
    let limit = limit.saturating_mul(multiplier());
    if value > limit {
        Err(Error::Guard { name, value, limit })
    } else {
        Ok(())
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub fn pow_sat(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}
