//! Shannon functionals in nats and the Renyi-type functionals `psi` and `phi`.
//!
//! `psi(rho, W, P) = log sum_z sum_l P(l) W(z|l)^{1+rho} P_Z(z)^{-rho}` and
//! `phi(rho, W, P) = log sum_z (sum_l P(l) W(z|l)^{1/(1-rho)})^{1-rho}`.
//! Both are evaluated in the log domain; terms with `P(l) = 0` or
//! `W(z|l) = 0` are dropped before any negative power is taken.

use crate::channel::Channel;
use crate::dist::{Distribution, JointDist};
use crate::error::{Error, Result};

/// Natural-log units.
pub type Nats = f64;

/// `ln 2`, for converting to bits.
pub const LN_2: f64 = std::f64::consts::LN_2;

/// `log sum exp` over an iterator, with max shift. Empty input gives `-inf`.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// `H(P) = -sum p ln p`.
pub fn entropy(p: &Distribution) -> Nats {
    -p.probs().iter().map(|&x| plogp(x)).sum::<f64>()
}

/// Natural-log binary entropy `h(p)`.
pub fn binary_entropy(p: f64) -> Nats {
    -plogp(p) - plogp(1.0 - p)
}

/// Entropy of the full joint table.
pub fn joint_entropy(j: &JointDist) -> Nats {
    -j.probs().iter().map(|&x| plogp(x)).sum::<f64>()
}

/// Groups axes into three blocks `(A, B, C)` and returns the block sizes with
/// the row-major table over `(A, B, C)`.
fn group3(j: &JointDist, a: &[usize], b: &[usize], c: &[usize]) -> Result<(usize, usize, usize, Vec<f64>)> {
    let all: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    let m = j.marginal(&all)?;
    let size = |axes: &[usize]| axes.iter().map(|&x| j.dims()[x]).product::<usize>();
    Ok((size(a), size(b), size(c), m.probs().to_vec()))
}

/// `I(A; B | C)` between axis groups of a joint; `c` may be empty.
pub fn conditional_mutual_information_axes(
    j: &JointDist,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<Nats> {
    let (na, nb, nc, p) = group3(j, a, b, c)?;
    let mut p_ac = vec![0.0; na * nc];
    let mut p_bc = vec![0.0; nb * nc];
    let mut p_c = vec![0.0; nc];
    for ia in 0..na {
        for ib in 0..nb {
            for ic in 0..nc {
                let x = p[(ia * nb + ib) * nc + ic];
                p_ac[ia * nc + ic] += x;
                p_bc[ib * nc + ic] += x;
                p_c[ic] += x;
            }
        }
    }
    let mut acc = 0.0;
    for ia in 0..na {
        for ib in 0..nb {
            for ic in 0..nc {
                let x = p[(ia * nb + ib) * nc + ic];
                if x > 0.0 {
                    acc += x * (x * p_c[ic] / (p_ac[ia * nc + ic] * p_bc[ib * nc + ic])).ln();
                }
            }
        }
    }
    Ok(acc)
}

/// `I(A; B)` between axis groups of a joint.
pub fn mutual_information_axes(j: &JointDist, a: &[usize], b: &[usize]) -> Result<Nats> {
    conditional_mutual_information_axes(j, a, b, &[])
}

/// `I(A; B)` for a two-axis joint.
pub fn mutual_information(j: &JointDist) -> Result<Nats> {
    if j.axes() != 2 {
        return Err(Error::dim(format!("expected a 2-axis joint, got {}", j.axes())));
    }
    mutual_information_axes(j, &[0], &[1])
}

/// `I(A; B | C)` for a three-axis joint.
pub fn conditional_mutual_information(j: &JointDist) -> Result<Nats> {
    if j.axes() != 3 {
        return Err(Error::dim(format!("expected a 3-axis joint, got {}", j.axes())));
    }
    conditional_mutual_information_axes(j, &[0], &[1], &[2])
}

/// `H(A | B)` between axis groups.
pub fn conditional_entropy_axes(j: &JointDist, a: &[usize], b: &[usize]) -> Result<Nats> {
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    Ok(joint_entropy(&j.marginal(&ab)?) - joint_entropy(&j.marginal(b)?))
}

fn check_channel_prior(ch: &Channel, prior: &Distribution) -> Result<()> {
    if ch.inputs() != prior.len() {
        return Err(Error::dim(format!(
            "prior over {} symbols for a channel with {} inputs",
            prior.len(),
            ch.inputs()
        )));
    }
    Ok(())
}

fn check_rho(rho: f64, include_one: bool) -> Result<()> {
    let ok = rho > 0.0 && (rho < 1.0 || (include_one && rho == 1.0));
    if ok {
        Ok(())
    } else if include_one {
        Err(Error::RhoOutOfRange { rho, range: "(0, 1]" })
    } else {
        Err(Error::RhoOutOfRange { rho, range: "(0, 1)" })
    }
}

/// `psi(rho, W, P_L)` for `rho` in `(0, 1]`.
pub fn psi(rho: f64, ch: &Channel, prior: &Distribution) -> Result<Nats> {
    check_rho(rho, true)?;
    check_channel_prior(ch, prior)?;
    let p_z = ch.output(prior)?;
    let log_pz: Vec<f64> = p_z.probs().iter().map(|p| p.ln()).collect();
    let mut terms = Vec::with_capacity(ch.inputs() * ch.outputs());
    for (l, &pl) in prior.probs().iter().enumerate() {
        if pl == 0.0 {
            continue;
        }
        let lpl = pl.ln();
        for (z, &w) in ch.row(l).iter().enumerate() {
            if w > 0.0 {
                terms.push(lpl + (1.0 + rho) * w.ln() - rho * log_pz[z]);
            }
        }
    }
    Ok(log_sum_exp(terms))
}

/// `phi(rho, W, P_L)` for `rho` in `(0, 1)`.
pub fn phi(rho: f64, ch: &Channel, prior: &Distribution) -> Result<Nats> {
    check_rho(rho, false)?;
    check_channel_prior(ch, prior)?;
    let s = 1.0 / (1.0 - rho);
    let outer = (0..ch.outputs()).filter_map(|z| {
        let inner = log_sum_exp(
            prior
                .probs()
                .iter()
                .enumerate()
                .filter(|&(l, &pl)| pl > 0.0 && ch.prob(l, z) > 0.0)
                .map(|(l, &pl)| pl.ln() + s * ch.prob(l, z).ln()),
        );
        (inner > f64::NEG_INFINITY).then_some((1.0 - rho) * inner)
    });
    Ok(log_sum_exp(outer))
}

/// `phi` continued to `rho = 1` by its limit
/// `log sum_z max_{l : P(l) > 0} W(z|l)`.
pub fn phi_extended(rho: f64, ch: &Channel, prior: &Distribution) -> Result<Nats> {
    if rho != 1.0 {
        return phi(rho, ch, prior);
    }
    check_channel_prior(ch, prior)?;
    let total: f64 = (0..ch.outputs())
        .map(|z| {
            prior
                .probs()
                .iter()
                .enumerate()
                .filter(|&(_, &pl)| pl > 0.0)
                .map(|(l, _)| ch.prob(l, z))
                .fold(0.0, f64::max)
        })
        .sum();
    Ok(total.ln())
}
