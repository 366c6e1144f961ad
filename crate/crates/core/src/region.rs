//! Rate regions of the broadcast channel with confidential messages, its
//! degraded-message-set special case and secure multiplex coding, together
//! with grid scans over auxiliary distributions and the leakage exponent.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{axis, joint_from_spec, Channel, MarkovSpec, MarkovSpecJson};
use crate::dist::{Distribution, JointDist};
use crate::error::{Error, Result};
use crate::guard;
use crate::info::{conditional_mutual_information_axes, log_sum_exp, mutual_information, mutual_information_axes, Nats};
use crate::layout::SubsetIndex;
use crate::report::{fmt_list, fmt_num, CsvTable};

/// A certificate passes when every slack is at least `-SLACK_TOL`.
pub const SLACK_TOL: f64 = 1e-9;

/// The four single-letter quantities the regions are built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionQuantities {
    pub i_uy: Nats,
    pub i_uz: Nats,
    pub i_vy_given_u: Nats,
    pub i_vz_given_u: Nats,
}

impl RegionQuantities {
    /// `min[I(U;Y), I(U;Z)]`.
    pub fn common(&self) -> Nats {
        self.i_uy.min(self.i_uz)
    }

    /// `I(V;Y|U) + min[I(U;Y), I(U;Z)]`.
    pub fn total(&self) -> Nats {
        self.i_vy_given_u + self.common()
    }

    /// `I(V;Y|U) - I(V;Z|U)`.
    pub fn secrecy(&self) -> Nats {
        self.i_vy_given_u - self.i_vz_given_u
    }
}

/// Quantities from the full five-variable joint.
pub fn region_quantities(spec: &MarkovSpec, bob: &Channel, eve: &Channel) -> Result<RegionQuantities> {
    let j = joint_from_spec(spec, bob, eve)?;
    Ok(RegionQuantities {
        i_uy: mutual_information_axes(&j, &[axis::U], &[axis::Y])?,
        i_uz: mutual_information_axes(&j, &[axis::U], &[axis::Z])?,
        i_vy_given_u: conditional_mutual_information_axes(&j, &[axis::V], &[axis::Y], &[axis::U])?,
        i_vz_given_u: conditional_mutual_information_axes(&j, &[axis::V], &[axis::Z], &[axis::U])?,
    })
}

fn channel_information(prior: &Distribution, ch: &Channel) -> Nats {
    mutual_information(&ch.joint(prior).expect("sizes agree")).expect("two axes")
}

/// Same quantities through the chain rule `I(V;Y|U) = I(V;Y) - I(U;Y)`,
/// which holds because `U -> V -> Y` is Markov. Used by the scan.
pub fn region_quantities_chain(spec: &MarkovSpec, bob: &Channel, eve: &Channel) -> Result<RegionQuantities> {
    if bob.inputs() != spec.x_card() || eve.inputs() != spec.x_card() {
        return Err(Error::dim("channel inputs differ from |X|"));
    }
    let y_given_v = spec.x_given_v.compose(bob)?;
    let z_given_v = spec.x_given_v.compose(eve)?;
    let y_given_u = spec.v_given_u.compose(&y_given_v)?;
    let z_given_u = spec.v_given_u.compose(&z_given_v)?;
    let p_v = spec.p_v();
    let i_uy = channel_information(&spec.p_u, &y_given_u);
    let i_uz = channel_information(&spec.p_u, &z_given_u);
    Ok(RegionQuantities {
        i_uy,
        i_uz,
        i_vy_given_u: channel_information(&p_v, &y_given_v) - i_uy,
        i_vz_given_u: channel_information(&p_v, &z_given_v) - i_uz,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Slack {
    pub name: String,
    pub slack: f64,
}

/// Per-inequality slacks for one rate point and one Markov chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionCertificate {
    pub spec: MarkovSpecJson,
    pub quantities: RegionQuantities,
    pub slacks: Vec<Slack>,
    pub pass: bool,
}

impl RegionCertificate {
    fn new(spec: &MarkovSpec, quantities: RegionQuantities, slacks: Vec<(String, f64)>) -> Self {
        let slacks: Vec<Slack> = slacks
            .into_iter()
            .map(|(name, slack)| Slack { name, slack })
            .collect();
        let pass = slacks.iter().all(|s| s.slack >= -SLACK_TOL);
        RegionCertificate {
            spec: MarkovSpecJson::from_spec(spec),
            quantities,
            slacks,
            pass,
        }
    }

    pub fn slack(&self, name: &str) -> Option<f64> {
        self.slacks.iter().find(|s| s.name == name).map(|s| s.slack)
    }

    pub fn min_slack(&self) -> f64 {
        self.slacks.iter().map(|s| s.slack).fold(f64::INFINITY, f64::min)
    }
}

fn check_rates(rates: &[f64]) -> Result<()> {
    if let Some(r) = rates.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::arg(format!("rate {r} is not a nonnegative number")));
    }
    Ok(())
}

/// Rates `(R_1, R_e, R_0)` of the broadcast channel with confidential
/// messages.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BccRates {
    pub r1: f64,
    pub re: f64,
    pub r0: f64,
}

/// Checks `R_1 + R_0 <= I(V;Y|U) + min[I(U;Y), I(U;Z)]`,
/// `R_0 <= min[I(U;Y), I(U;Z)]`, `R_e <= I(V;Y|U) - I(V;Z|U)` and
/// `R_e <= R_1`.
pub fn bcc_membership(rates: BccRates, spec: &MarkovSpec, bob: &Channel, eve: &Channel) -> Result<RegionCertificate> {
    check_rates(&[rates.r1, rates.re, rates.r0])?;
    let q = region_quantities(spec, bob, eve)?;
    Ok(RegionCertificate::new(
        spec,
        q,
        vec![
            ("common".into(), q.common() - rates.r0),
            ("total".into(), q.total() - (rates.r0 + rates.r1)),
            ("secrecy".into(), q.secrecy() - rates.re),
            ("equivocation<=rate".into(), rates.r1 - rates.re),
        ],
    ))
}

/// Checks the degraded-message-set region; requires `V = X`.
pub fn bcd_membership(r0: f64, r1: f64, spec: &MarkovSpec, bob: &Channel, eve: &Channel) -> Result<RegionCertificate> {
    check_rates(&[r0, r1])?;
    if !spec.x_given_v.is_identity() {
        return Err(Error::arg("the degraded-message-set region needs V = X"));
    }
    let q = region_quantities(spec, bob, eve)?;
    Ok(RegionCertificate::new(
        spec,
        q,
        vec![
            ("common".into(), q.common() - r0),
            ("total".into(), q.total() - (r0 + r1)),
        ],
    ))
}

/// Rates of secure multiplex coding with `T` secret messages: the common
/// rate `R_0`, secret rates `R_1..R_T` and an equivocation rate `R_{e,I}` for
/// every nonempty `I ⊆ {1..T}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateTuple {
    pub r0: f64,
    pub secret: Vec<f64>,
    /// Keyed by one-based subset labels such as `"1,2"`.
    pub equivocation: BTreeMap<String, f64>,
}

impl RateTuple {
    /// Full secrecy: `R_{e,I} = sum_{i in I} R_i` for every `I`.
    pub fn full_secrecy(r0: f64, secret: Vec<f64>) -> Self {
        let equivocation = SubsetIndex::all_nonempty(secret.len())
            .into_iter()
            .map(|s| (s.label(), s.factors().map(|i| secret[i]).sum()))
            .collect();
        RateTuple {
            r0,
            secret,
            equivocation,
        }
    }

    pub fn secrets(&self) -> usize {
        self.secret.len()
    }

    /// Parses the equivocation map and checks that it covers exactly the
    /// `2^T - 1` nonempty subsets.
    pub fn equivocation_by_subset(&self) -> Result<BTreeMap<SubsetIndex, f64>> {
        let t = self.secrets();
        if t == 0 || t > 16 {
            return Err(Error::arg(format!("unsupported number of secret messages {t}")));
        }
        let mut map = BTreeMap::new();
        for (label, &r) in &self.equivocation {
            let s = SubsetIndex::parse_label(label)?;
            if s.factors().any(|i| i >= t) {
                return Err(Error::arg(format!("subset {s} outside 1..={t}")));
            }
            if map.insert(s, r).is_some() {
                return Err(Error::arg(format!("subset {s} listed twice")));
            }
        }
        let want: BTreeSet<SubsetIndex> = SubsetIndex::all_nonempty(t).into_iter().collect();
        let missing: Vec<String> = want
            .iter()
            .filter(|s| !map.contains_key(s))
            .map(|s| s.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::arg(format!(
                "equivocation map is missing subsets {}",
                missing.join(" ")
            )));
        }
        Ok(map)
    }
}

/// Checks the secure multiplex region: `R_0 <= min[I(U;Y), I(U;Z)]`,
/// `sum_{i=0}^T R_i <= I(V;Y|U) + min[..]`, and for every nonempty `I`:
/// `R_{e,I} <= I(V;Y|U) - I(V;Z|U)` and `R_{e,I} <= sum_{i in I} R_i`.
pub fn smc_membership(rates: &RateTuple, spec: &MarkovSpec, bob: &Channel, eve: &Channel) -> Result<RegionCertificate> {
    let eq = rates.equivocation_by_subset()?;
    check_rates(&[rates.r0])?;
    check_rates(&rates.secret)?;
    check_rates(&eq.values().copied().collect::<Vec<_>>())?;
    let q = region_quantities(spec, bob, eve)?;
    let mut slacks = vec![
        ("common".to_string(), q.common() - rates.r0),
        (
            "total".to_string(),
            q.total() - (rates.r0 + rates.secret.iter().sum::<f64>()),
        ),
    ];
    for (s, &re) in &eq {
        slacks.push((format!("secrecy{s}"), q.secrecy() - re));
        let sum: f64 = s.factors().map(|i| rates.secret[i]).sum();
        slacks.push((format!("equivocation<=rate{s}"), sum - re));
    }
    Ok(RegionCertificate::new(spec, q, slacks))
}

/// Renders a certificate as CSV, one row per inequality.
pub fn certificate_csv(cert: &RegionCertificate, scale: f64) -> String {
    let mut t = CsvTable::new(["inequality", "slack", "pass"]);
    for s in &cert.slacks {
        t.push(vec![
            s.name.clone(),
            fmt_num(s.slack / scale),
            (s.slack >= -SLACK_TOL).to_string(),
        ]);
    }
    t.render()
}

// ---------------------------------------------------------------------------
// Grid scan
// ---------------------------------------------------------------------------

/// Lattice points of the probability simplex with denominator `steps`:
/// all `(k_1/steps, .., k_d/steps)` with `sum k_i = steps`, in lexicographic
/// order of `(k_1, .., k_d)`.
pub fn simplex_lattice(dim: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if dim == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(dim - 1, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    if dim == 0 {
        return Vec::new();
    }
    rec(dim, steps, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|ks| ks.into_iter().map(|k| k as f64 / steps as f64).collect())
        .collect()
}

/// `C(steps + dim - 1, dim - 1)`, the number of lattice points.
pub fn simplex_lattice_size(dim: usize, steps: usize) -> u128 {
    let (n, k) = ((steps + dim - 1) as u128, (dim - 1) as u128);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    /// `|U|`.
    pub u_card: usize,
    /// `|V|`.
    pub v_card: usize,
    /// Points per simplex edge; the lattice denominator is `resolution - 1`.
    pub resolution: usize,
    /// Fix `P_{X|V}` to the identity (requires `|V| = |X|`).
    #[serde(default)]
    pub v_equals_x: bool,
}

/// One evaluated grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub grid_index: u64,
    pub p_u: Vec<f64>,
    /// Row-major `P_{V|U}`.
    pub v_given_u: Vec<f64>,
    /// Row-major `P_{X|V}`.
    pub x_given_v: Vec<f64>,
    pub quantities: RegionQuantities,
    /// Largest common rate `min[I(U;Y), I(U;Z)]`.
    pub r0: Nats,
    /// Largest total rate `R_0 + R_1`.
    pub r_total: Nats,
    /// Largest equivocation rate, `max(I(V;Y|U) - I(V;Z|U), 0)`.
    pub re: Nats,
}

/// Result of a scan: extremal points and the Pareto frontier of
/// `(R_0, R_0 + R_1, R_e)` over the grid. This is an inner bound; the grid
/// covers only the configured auxiliary cardinalities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub config: ScanConfig,
    pub points: u64,
    pub best_secrecy: ScanPoint,
    pub best_total: ScanPoint,
    pub best_common: ScanPoint,
    pub frontier: Vec<ScanPoint>,
}

struct Grid {
    u_card: usize,
    v_card: usize,
    x_card: usize,
    v_equals_x: bool,
    p_u: Vec<Vec<f64>>,
    v_rows: Vec<Vec<f64>>,
    x_rows: Vec<Vec<f64>>,
    total: u128,
}

impl Grid {
    fn new(config: &ScanConfig, x_card: usize) -> Result<Self> {
        if config.u_card == 0 || config.u_card > 4 || config.v_card == 0 || config.v_card > 4 {
            return Err(Error::arg("auxiliary cardinalities must lie in 1..=4"));
        }
        if config.resolution < 2 {
            return Err(Error::arg("resolution must be >= 2 points per edge"));
        }
        if config.v_equals_x && config.v_card != x_card {
            return Err(Error::arg(format!(
                "V = X needs |V| = |X| = {x_card}, got {}",
                config.v_card
            )));
        }
        let steps = config.resolution - 1;
        let su = simplex_lattice_size(config.u_card, steps);
        let sv = simplex_lattice_size(config.v_card, steps);
        let sx = if config.v_equals_x { 1 } else { simplex_lattice_size(x_card, steps) };
        let total = su
            .saturating_mul(guard::pow_sat(sv, config.u_card as u32))
            .saturating_mul(guard::pow_sat(sx, config.v_card as u32));
        guard::check("scan-points", total, guard::SCAN_POINTS)?;
        Ok(Grid {
            u_card: config.u_card,
            v_card: config.v_card,
            x_card,
            v_equals_x: config.v_equals_x,
            p_u: simplex_lattice(config.u_card, steps),
            v_rows: simplex_lattice(config.v_card, steps),
            x_rows: if config.v_equals_x { Vec::new() } else { simplex_lattice(x_card, steps) },
            total,
        })
    }

    /// Decodes a mixed-radix index, `P_U` most significant, then the rows of
    /// `P_{V|U}`, then the rows of `P_{X|V}`.
    fn spec(&self, mut index: u64) -> MarkovSpec {
        let mut x_idx = vec![0usize; if self.v_equals_x { 0 } else { self.v_card }];
        for slot in x_idx.iter_mut().rev() {
            *slot = (index % self.x_rows.len() as u64) as usize;
            index /= self.x_rows.len() as u64;
        }
        let mut v_idx = vec![0usize; self.u_card];
        for slot in v_idx.iter_mut().rev() {
            *slot = (index % self.v_rows.len() as u64) as usize;
            index /= self.v_rows.len() as u64;
        }
        let p_u = Distribution::from_trusted(self.p_u[index as usize].clone());
        let v_given_u = Channel::from_trusted(
            self.u_card,
            self.v_card,
            v_idx.iter().flat_map(|&i| self.v_rows[i].iter().copied()).collect(),
        );
        let x_given_v = if self.v_equals_x {
            Channel::identity(self.x_card)
        } else {
            Channel::from_trusted(
                self.v_card,
                self.x_card,
                x_idx.iter().flat_map(|&i| self.x_rows[i].iter().copied()).collect(),
            )
        };
        MarkovSpec {
            p_u,
            v_given_u,
            x_given_v,
        }
    }
}

#[derive(Clone, Copy)]
struct Corner {
    index: u64,
    r0: f64,
    total: f64,
    re: f64,
}

fn corner(index: u64, q: &RegionQuantities) -> Corner {
    Corner {
        index,
        r0: q.common().max(0.0),
        total: q.total().max(0.0),
        re: q.secrecy().max(0.0),
    }
}

fn key(x: f64) -> u64 {
    x.max(0.0).to_bits()
}

/// Pareto frontier under componentwise `>=`; ties keep the lowest index.
fn pareto(mut pts: Vec<Corner>) -> Vec<Corner> {
    pts.sort_by(|a, b| {
        b.re.total_cmp(&a.re)
            .then(b.total.total_cmp(&a.total))
            .then(b.r0.total_cmp(&a.r0))
            .then(a.index.cmp(&b.index))
    });
    // Staircase of the processed (total, r0) pairs: keyed by total, r0
    // increasing as total decreases.
    let mut stairs: BTreeMap<u64, f64> = BTreeMap::new();
    let mut front = Vec::new();
    for p in pts {
        let dominated = stairs
            .range(key(p.total)..)
            .next()
            .is_some_and(|(_, &r0)| r0 >= p.r0);
        if dominated {
            continue;
        }
        front.push(p);
        let stale: Vec<u64> = stairs
            .range(..=key(p.total))
            .filter(|(_, &r0)| r0 <= p.r0)
            .map(|(&k, _)| k)
            .collect();
        for k in stale {
            stairs.remove(&k);
        }
        stairs.insert(key(p.total), p.r0);
    }
    front
}

/// Scans the lattice of `(P_U, P_{V|U}, P_{X|V})` and returns the best
/// corner points found.
pub fn region_scan(bob: &Channel, eve: &Channel, config: ScanConfig) -> Result<ScanResult> {
    if bob.inputs() != eve.inputs() {
        return Err(Error::dim("Bob and Eve channels have different input alphabets"));
    }
    let grid = Grid::new(&config, bob.inputs())?;
    let corners: Vec<Corner> = (0..grid.total as u64)
        .into_par_iter()
        .map(|i| {
            let q = region_quantities_chain(&grid.spec(i), bob, eve).expect("grid specs are consistent");
            corner(i, &q)
        })
        .collect();
    let argmax = |f: fn(&Corner) -> f64| -> u64 {
        corners
            .iter()
            .fold(None::<&Corner>, |best, c| match best {
                Some(b) if f(b) >= f(c) => Some(b),
                _ => Some(c),
            })
            .expect("grid is nonempty")
            .index
    };
    let materialize = |index: u64| -> ScanPoint {
        let spec = grid.spec(index);
        let q = region_quantities_chain(&spec, bob, eve).expect("grid specs are consistent");
        let c = corner(index, &q);
        ScanPoint {
            grid_index: index,
            p_u: spec.p_u.probs().to_vec(),
            v_given_u: spec.v_given_u.data().to_vec(),
            x_given_v: spec.x_given_v.data().to_vec(),
            quantities: q,
            r0: c.r0,
            r_total: c.total,
            re: c.re,
        }
    };
    let best_secrecy = materialize(argmax(|c| c.re));
    let best_total = materialize(argmax(|c| c.total));
    let best_common = materialize(argmax(|c| c.r0));
    let frontier = pareto(corners).into_iter().map(|c| materialize(c.index)).collect();
    Ok(ScanResult {
        config,
        points: grid.total as u64,
        best_secrecy,
        best_total,
        best_common,
        frontier,
    })
}

impl ScanResult {
    /// Frontier rows as CSV; information columns are divided by `scale`.
    pub fn to_csv(&self, scale: f64) -> String {
        let mut t = CsvTable::new([
            "grid_index",
            "p_u",
            "v_given_u",
            "x_given_v",
            "r0",
            "r_total",
            "re",
            "i_uy",
            "i_uz",
            "i_vy_given_u",
            "i_vz_given_u",
        ]);
        for p in &self.frontier {
            let q = &p.quantities;
            t.push(vec![
                p.grid_index.to_string(),
                fmt_list(&p.p_u),
                fmt_list(&p.v_given_u),
                fmt_list(&p.x_given_v),
                fmt_num(p.r0 / scale),
                fmt_num(p.r_total / scale),
                fmt_num(p.re / scale),
                fmt_num(q.i_uy / scale),
                fmt_num(q.i_uz / scale),
                fmt_num(q.i_vy_given_u / scale),
                fmt_num(q.i_vz_given_u / scale),
            ]);
        }
        t.render()
    }
}

// ---------------------------------------------------------------------------
// Leakage exponent
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentReport {
    pub rho: f64,
    pub r_i: Nats,
    pub r_p: Nats,
    /// `log sum_{u,v,z} P(u,v,z) P(z|v)^rho P(z|u)^{-rho}`.
    pub log_sum: Nats,
    /// `rho (R_I - R_p) + log_sum`; negative values certify exponential
    /// decay of the leakage.
    pub value: Nats,
}

fn check_uvz(joint: &JointDist) -> Result<()> {
    if joint.axes() != 3 {
        return Err(Error::dim(format!(
            "expected a joint over (U, V, Z), got {} axes",
            joint.axes()
        )));
    }
    Ok(())
}

/// Evaluates `rho (R_I - R_p) + log sum P_{UVZ} P_{Z|V}^rho P_{Z|U}^{-rho}`.
pub fn leakage_exponent(rho: f64, r_i: Nats, r_p: Nats, joint: &JointDist) -> Result<ExponentReport> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::RhoOutOfRange { rho, range: "(0, 1]" });
    }
    check_uvz(joint)?;
    let log_sum = exponent_log_sum(rho, joint);
    Ok(ExponentReport {
        rho,
        r_i,
        r_p,
        log_sum,
        value: rho * (r_i - r_p) + log_sum,
    })
}

fn exponent_log_sum(rho: f64, joint: &JointDist) -> f64 {
    let (nu, nv, nz) = (joint.dims()[0], joint.dims()[1], joint.dims()[2]);
    let p = joint.probs();
    let mut p_uz = vec![0.0; nu * nz];
    let mut p_vz = vec![0.0; nv * nz];
    let mut p_u = vec![0.0; nu];
    let mut p_v = vec![0.0; nv];
    for u in 0..nu {
        for v in 0..nv {
            for z in 0..nz {
                let x = p[(u * nv + v) * nz + z];
                p_uz[u * nz + z] += x;
                p_vz[v * nz + z] += x;
                p_u[u] += x;
                p_v[v] += x;
            }
        }
    }
    let mut terms = Vec::new();
    for u in 0..nu {
        for v in 0..nv {
            for z in 0..nz {
                let x = p[(u * nv + v) * nz + z];
                if x > 0.0 {
                    let z_given_v = p_vz[v * nz + z] / p_v[v];
                    let z_given_u = p_uz[u * nz + z] / p_u[u];
                    terms.push(x.ln() + rho * (z_given_v.ln() - z_given_u.ln()));
                }
            }
        }
    }
    log_sum_exp(terms)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentOptimum {
    pub rho: f64,
    pub value: Nats,
    /// The coarse grid `(rho, value)` the refinement started from.
    pub grid: Vec<(f64, f64)>,
}

/// Number of coarse grid points on `(0, 1]`.
pub const EXPONENT_GRID: usize = 64;

/// Minimizes the exponent over `rho` in `(0, 1]`: a 64-point grid
/// `rho = k/64` followed by golden-section refinement around the best grid
/// point. The result is never worse than the best grid value.
pub fn optimize_exponent(r_i: Nats, r_p: Nats, joint: &JointDist) -> Result<ExponentOptimum> {
    check_uvz(joint)?;
    let f = |rho: f64| rho * (r_i - r_p) + exponent_log_sum(rho, joint);
    let grid: Vec<(f64, f64)> = (1..=EXPONENT_GRID)
        .map(|k| {
            let rho = k as f64 / EXPONENT_GRID as f64;
            (rho, f(rho))
        })
        .collect();
    let (best_k, &(mut best_rho, mut best)) = grid
        .iter()
        .enumerate()
        .fold(None::<(usize, &(f64, f64))>, |acc, (k, g)| match acc {
            Some((_, b)) if b.1 <= g.1 => acc,
            _ => Some((k, g)),
        })
        .expect("grid is nonempty");
    let lo = if best_k == 0 { 0.0 } else { grid[best_k - 1].0 };
    let hi = grid.get(best_k + 1).map_or(1.0, |g| g.0);
    let (rho, value) = golden_section(f, lo, hi, 1e-12);
    if value < best {
        best = value;
        best_rho = rho;
    }
    Ok(ExponentOptimum {
        rho: best_rho,
        value: best,
        grid,
    })
}

/// Golden-section search for a minimum on `(lo, hi)`; evaluates only
/// interior points.
fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
