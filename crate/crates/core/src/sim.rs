//! Exact desk-scale secure multiplex coding: random codebooks, bijection-based
//! encoding, exact leakage and equivocation, maximum-likelihood error for Bob,
//! the existence search over (map, codebook) pairs and the finite-n bound
//! comparison.

use std::collections::BTreeMap;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, ChannelSpec, MarkovSpec, MarkovSpecJson};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::guard;
use crate::hash::{Bijection, FamilyDescriptor, HashFamily};
use crate::info::{conditional_mutual_information_axes, log_sum_exp, phi_extended, Nats};
use crate::layout::{MessageLayout, SubsetIndex};
use crate::report::{fmt_num, CsvTable};

/// Absolute slack used when comparing finite-n values to thresholds.
pub const COMPARE_TOL: f64 = 1e-12;

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    WeightedIndex::new(probs)
        .expect("validated distribution")
        .sample(rng)
}

/// Codewords of a superposition code: one `U`-sequence per common message
/// `e`, and one `V`-sequence per pair `(e, b)` stored at `e * n_b + b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Codebook {
    pub n: usize,
    pub u_card: usize,
    pub v_card: usize,
    pub n_e: usize,
    pub n_b: usize,
    pub u_words: Vec<Vec<usize>>,
    pub v_words: Vec<Vec<usize>>,
}

impl Codebook {
    pub fn new(u_card: usize, v_card: usize, n_b: usize, u_words: Vec<Vec<usize>>, v_words: Vec<Vec<usize>>) -> Result<Self> {
        let n_e = u_words.len();
        let n = u_words.first().map_or(0, Vec::len);
        let cb = Codebook { n, u_card, v_card, n_e, n_b, u_words, v_words };
        cb.validate()?;
        Ok(cb)
    }

    /// Checks lengths and symbol ranges.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n_e == 0 || self.n_b == 0 || self.u_card == 0 || self.v_card == 0 {
            return Err(Error::arg("codebook needs n, message counts and alphabets >= 1"));
        }
        if self.u_words.len() != self.n_e || self.v_words.len() != self.n_e * self.n_b {
            return Err(Error::dim(format!(
                "expected {} u-words and {} v-words, got {} and {}",
                self.n_e,
                self.n_e * self.n_b,
                self.u_words.len(),
                self.v_words.len()
            )));
        }
        for (words, card) in [(&self.u_words, self.u_card), (&self.v_words, self.v_card)] {
            for w in words.iter() {
                if w.len() != self.n {
                    return Err(Error::dim(format!("codeword of length {} in a length-{} code", w.len(), self.n)));
                }
                if let Some(&s) = w.iter().find(|&&s| s >= card) {
                    return Err(Error::arg(format!("symbol {s} outside an alphabet of size {card}")));
                }
            }
        }
        Ok(())
    }

    pub fn codewords(&self) -> usize {
        self.v_words.len()
    }

    pub fn v_word(&self, e: usize, b: usize) -> &[usize] {
        &self.v_words[e * self.n_b + b]
    }

    /// Realized common rate `log(n_e) / n`.
    pub fn common_rate(&self) -> Nats {
        (self.n_e as f64).ln() / self.n as f64
    }

    /// Realized private rate `log(n_b) / n`.
    pub fn private_rate(&self) -> Nats {
        (self.n_b as f64).ln() / self.n as f64
    }
}

/// Draws `n_e` codewords from `P_U^n` and, for each, `n_b` codewords from
/// `P_{V|U}^n(.|u^n)`.
pub fn build_codebook<R: Rng + ?Sized>(
    n: usize,
    p_u: &Distribution,
    v_given_u: &Channel,
    n_e: usize,
    n_b: usize,
    rng: &mut R,
) -> Result<Codebook> {
    if n == 0 || n_e == 0 || n_b == 0 {
        return Err(Error::arg("block length and message counts must be >= 1"));
    }
    if v_given_u.inputs() != p_u.len() {
        return Err(Error::dim("P_{V|U} inputs differ from |U|"));
    }
    guard::check(
        "codebook-sequences",
        guard::pow_sat(v_given_u.outputs() as u128, n as u32),
        guard::LEAKAGE_JOINT,
    )?;
    guard::check("codebook-size", (n_e as u128) * (n_b as u128), guard::LEAKAGE_JOINT)?;
    let mut u_words = Vec::with_capacity(n_e);
    let mut v_words = Vec::with_capacity(n_e * n_b);
    for _ in 0..n_e {
        let u: Vec<usize> = (0..n).map(|_| sample_index(p_u.probs(), rng)).collect();
        for _ in 0..n_b {
            v_words.push(u.iter().map(|&s| sample_index(v_given_u.row(s), rng)).collect());
        }
        u_words.push(u);
    }
    Codebook::new(p_u.len(), v_given_u.outputs(), n_b, u_words, v_words)
}

/// The multiplex encoder: `b = f^{-1}(s_1, .., s_T, s_{T+1})` selects the
/// private codeword, then `P_{X|V}` adds artificial noise.
#[derive(Clone, Debug)]
pub struct EncoderConfig {
    layout: MessageLayout,
    map: Bijection,
    /// `f(b)` for every `b`.
    forward: Vec<u32>,
    /// `f^{-1}(s)` for every `s`.
    backward: Vec<u32>,
    codebook: Codebook,
    x_given_v: Channel,
}

impl EncoderConfig {
    pub fn new(layout: MessageLayout, map: Bijection, codebook: Codebook, x_given_v: Channel) -> Result<Self> {
        codebook.validate()?;
        if codebook.n_b != layout.space_size() {
            return Err(Error::dim(format!(
                "codebook has {} private messages but |B| = {}",
                codebook.n_b,
                layout.space_size()
            )));
        }
        if x_given_v.inputs() != codebook.v_card {
            return Err(Error::dim("P_{X|V} inputs differ from |V|"));
        }
        if !map.is_bijective(&layout) {
            return Err(Error::Singular);
        }
        let forward = map.table(&layout)?;
        let mut backward = vec![0u32; forward.len()];
        for (b, &s) in forward.iter().enumerate() {
            backward[s as usize] = b as u32;
        }
        Ok(EncoderConfig {
            layout,
            map,
            forward,
            backward,
            codebook,
            x_given_v,
        })
    }

    pub fn layout(&self) -> &MessageLayout {
        &self.layout
    }

    pub fn map(&self) -> &Bijection {
        &self.map
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn x_given_v(&self) -> &Channel {
        &self.x_given_v
    }

    /// `b = f^{-1}(s)` for a full message index `s`.
    pub fn private_message(&self, s: usize) -> usize {
        self.backward[s] as usize
    }

    /// `s = f(b)`.
    pub fn messages_of(&self, b: usize) -> Vec<usize> {
        self.layout.split_index(self.forward[b] as usize)
    }

    /// Encodes secret messages `s_1..s_T` and common message `e`; the
    /// randomness `s_{T+1}` is drawn uniformly. Returns `(b, x^n)`.
    pub fn encode<R: Rng + ?Sized>(&self, secrets: &[usize], e: usize, rng: &mut R) -> Result<(usize, Vec<usize>)> {
        let t = self.layout.secrets();
        if secrets.len() != t {
            return Err(Error::dim(format!("expected {t} secret messages, got {}", secrets.len())));
        }
        if e >= self.codebook.n_e {
            return Err(Error::arg(format!("common message {e} out of range 0..{}", self.codebook.n_e)));
        }
        let mut parts = secrets.to_vec();
        parts.push(rng.gen_range(0..self.layout.factor_size(t)));
        let s = self.layout.join_index(&parts)?;
        let b = self.private_message(s);
        let x = self
            .codebook
            .v_word(e, b)
            .iter()
            .map(|&v| sample_index(self.x_given_v.row(v), rng))
            .collect();
        Ok((b, x))
    }
}

// ---------------------------------------------------------------------------
// Exact evaluation
// ---------------------------------------------------------------------------

/// `W^n(.|v^n)` for one codeword, lexicographic in the output sequence.
fn sequence_row(ch: &Channel, word: &[usize]) -> Vec<f64> {
    let mut row = vec![1.0];
    for &v in word {
        let w = ch.row(v);
        row = row
            .iter()
            .flat_map(|&p| w.iter().map(move |&q| p * q))
            .collect();
    }
    row
}

fn output_rows(codebook: &Codebook, v_to_out: &Channel, name: &'static str) -> Result<Vec<Vec<f64>>> {
    let seqs = guard::pow_sat(v_to_out.outputs() as u128, codebook.n as u32);
    guard::check(name, seqs.saturating_mul(codebook.codewords() as u128), guard::LEAKAGE_JOINT)?;
    Ok(codebook.v_words.iter().map(|w| sequence_row(v_to_out, w)).collect())
}

/// Mutual information and conditional entropy of a joint `P(s, z)` stored
/// row-major with `z` fastest.
fn information_of(joint: &[f64], z_count: usize) -> (Nats, Nats) {
    let s_count = joint.len() / z_count;
    let mut p_s = vec![0.0; s_count];
    let mut p_z = vec![0.0; z_count];
    for s in 0..s_count {
        for z in 0..z_count {
            let p = joint[s * z_count + z];
            p_s[s] += p;
            p_z[z] += p;
        }
    }
    let (mut info, mut cond) = (0.0, 0.0);
    for s in 0..s_count {
        for z in 0..z_count {
            let p = joint[s * z_count + z];
            if p > 0.0 {
                info += p * (p / (p_s[s] * p_z[z])).ln();
                cond -= p * (p / p_z[z]).ln();
            }
        }
    }
    (info.max(0.0), cond)
}

/// Exact leakage figures for one subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeakageEntry {
    pub subset: SubsetIndex,
    /// `I(S_I; Z^n)` with the common message marginalized.
    pub leakage: Nats,
    /// `H(S_I | Z^n)`.
    pub conditional_entropy: Nats,
    /// `H(S_I | Z^n) / n`.
    pub equivocation_rate: Nats,
    /// `log prod_{i in I} |S_i|`.
    pub log_size: Nats,
    /// `I(S_I; Z^n | E)`.
    pub leakage_given_common: Nats,
    /// `H(S_I | Z^n, E)`.
    pub conditional_entropy_given_common: Nats,
    /// Ensemble bound on the average leakage, when computed.
    pub bound: Option<Nats>,
}

impl LeakageEntry {
    /// `I + H - log|S_I|`, zero up to rounding for uniform messages.
    pub fn conservation_error(&self) -> f64 {
        (self.leakage + self.conditional_entropy - self.log_size)
            .abs()
            .max((self.leakage_given_common + self.conditional_entropy_given_common - self.log_size).abs())
    }

    /// The leakage selected by `given_common`.
    pub fn value(&self, given_common: bool) -> Nats {
        if given_common {
            self.leakage_given_common
        } else {
            self.leakage
        }
    }
}

/// Per-subset leakage for one encoder, plus Bob's error probability.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeakageReport {
    pub n: usize,
    /// `R_p = log|B| / n`.
    pub r_p: Nats,
    pub entries: Vec<LeakageEntry>,
    pub bob_error: Option<f64>,
}

fn check_common(p_e: &Distribution, codebook: &Codebook) -> Result<()> {
    if p_e.len() != codebook.n_e {
        return Err(Error::dim(format!(
            "common-message distribution has {} entries for {} common messages",
            p_e.len(),
            codebook.n_e
        )));
    }
    Ok(())
}

fn check_subset(layout: &MessageLayout, subset: SubsetIndex) -> Result<()> {
    layout.check_subset(subset, false)
}

fn leakage_from_rows(
    layout: &MessageLayout,
    forward: &[u32],
    codebook: &Codebook,
    rows: &[Vec<f64>],
    p_e: &Distribution,
    subset: SubsetIndex,
) -> LeakageEntry {
    let n_b = codebook.n_b;
    let z_count = rows[0].len();
    let s_count = layout.subset_size(subset);
    let proj: Vec<usize> = forward
        .iter()
        .map(|&s| layout.project_index(subset, s as usize))
        .collect();
    let mut marginal = vec![0.0; s_count * z_count];
    let (mut info_e, mut cond_e) = (0.0, 0.0);
    let mut per_e = vec![0.0; s_count * z_count];
    for (e, &pe) in p_e.probs().iter().enumerate() {
        if pe == 0.0 {
            continue;
        }
        per_e.iter_mut().for_each(|x| *x = 0.0);
        for b in 0..n_b {
            let base = proj[b] * z_count;
            for (z, &w) in rows[e * n_b + b].iter().enumerate() {
                let p = w / n_b as f64;
                per_e[base + z] += p;
                marginal[base + z] += pe * p;
            }
        }
        let (i, h) = information_of(&per_e, z_count);
        info_e += pe * i;
        cond_e += pe * h;
    }
    let (leakage, conditional_entropy) = information_of(&marginal, z_count);
    LeakageEntry {
        subset,
        leakage,
        conditional_entropy,
        equivocation_rate: conditional_entropy / codebook.n as f64,
        log_size: (s_count as f64).ln(),
        leakage_given_common: info_e,
        conditional_entropy_given_common: cond_e,
        bound: None,
    }
}

/// Exact `I(S_I; Z^n)` and `H(S_I | Z^n)` from the joint `P(s_I, z^n)` with
/// uniform messages, uniform `s_{T+1}` and common message distribution
/// `p_e`.
pub fn exact_leakage(config: &EncoderConfig, subset: SubsetIndex, eve: &Channel, p_e: &Distribution) -> Result<LeakageEntry> {
    check_subset(&config.layout, subset)?;
    check_common(p_e, &config.codebook)?;
    let z_given_v = config.x_given_v.compose(eve)?;
    let rows = output_rows(&config.codebook, &z_given_v, "leakage-joint")?;
    Ok(leakage_from_rows(&config.layout, &config.forward, &config.codebook, &rows, p_e, subset))
}

/// Leakage for every subset in `subsets` and, with `bob`, the multiplex
/// decoding error.
pub fn leakage_report(
    config: &EncoderConfig,
    subsets: &[SubsetIndex],
    eve: &Channel,
    bob: Option<&Channel>,
    p_e: &Distribution,
) -> Result<LeakageReport> {
    for &s in subsets {
        check_subset(&config.layout, s)?;
    }
    check_common(p_e, &config.codebook)?;
    let z_given_v = config.x_given_v.compose(eve)?;
    let rows = output_rows(&config.codebook, &z_given_v, "leakage-joint")?;
    let entries = subsets
        .iter()
        .map(|&s| leakage_from_rows(&config.layout, &config.forward, &config.codebook, &rows, p_e, s))
        .collect();
    let bob_error = bob.map(|b| bob_error_probability(config, b, p_e)).transpose()?;
    Ok(LeakageReport {
        n: config.codebook.n,
        r_p: config.codebook.private_rate(),
        entries,
        bob_error,
    })
}

/// ML decisions for every output sequence; ties go to the lowest codeword
/// index `e * n_b + b`.
fn ml_decisions(rows: &[Vec<f64>]) -> Vec<usize> {
    (0..rows[0].len())
        .map(|y| {
            let mut best = 0;
            for c in 1..rows.len() {
                if rows[c][y] > rows[best][y] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

fn word_error(rows: &[Vec<f64>], decide: &[usize], c: usize, wrong: impl Fn(usize) -> bool) -> f64 {
    rows[c]
        .iter()
        .zip(decide)
        .filter(|&(_, &d)| wrong(d))
        .map(|(&w, _)| w)
        .sum()
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

fn bob_rows(codebook: &Codebook, x_given_v: &Channel, bob: &Channel) -> Result<Vec<Vec<f64>>> {
    let y_given_v = x_given_v.compose(bob)?;
    output_rows(codebook, &y_given_v, "decoding-table")
}

/// Average ML error of the underlying superposition code, with `(e, b)`
/// drawn from `p_e` times the uniform distribution.
pub fn bcd_error_probability(codebook: &Codebook, x_given_v: &Channel, bob: &Channel, p_e: &Distribution) -> Result<f64> {
    codebook.validate()?;
    check_common(p_e, codebook)?;
    let rows = bob_rows(codebook, x_given_v, bob)?;
    let decide = ml_decisions(&rows);
    let n_b = codebook.n_b;
    let mut terms = Vec::with_capacity(rows.len());
    for (e, &pe) in p_e.probs().iter().enumerate() {
        for b in 0..n_b {
            let c = e * n_b + b;
            terms.push(pe / n_b as f64 * word_error(&rows, &decide, c, |d| d != c));
        }
    }
    Ok(sorted_sum(terms))
}

/// Average ML error of the multiplex scheme: messages `s` are uniform, Bob
/// decodes `(e, b)` and outputs `f(b)`; an error is any mismatch in `e` or
/// in `s`.
pub fn bob_error_probability(config: &EncoderConfig, bob: &Channel, p_e: &Distribution) -> Result<f64> {
    check_common(p_e, &config.codebook)?;
    let rows = bob_rows(&config.codebook, &config.x_given_v, bob)?;
    let decide = ml_decisions(&rows);
    let n_b = config.codebook.n_b;
    let mut terms = Vec::with_capacity(rows.len());
    for (e, &pe) in p_e.probs().iter().enumerate() {
        for s in 0..n_b {
            let c = e * n_b + config.private_message(s);
            let wrong = |d: usize| d / n_b != e || config.forward[d % n_b] as usize != s;
            terms.push(pe / n_b as f64 * word_error(&rows, &decide, c, wrong));
        }
    }
    Ok(sorted_sum(terms))
}

// ---------------------------------------------------------------------------
// Ensemble evaluation
// ---------------------------------------------------------------------------

/// Leakage and error of one `(map, codebook)` candidate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub map_index: usize,
    pub codebook_index: usize,
    pub leakage: Vec<LeakageEntry>,
    pub bob_error: f64,
}

/// Inputs shared by the ensemble computations.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub layout: MessageLayout,
    pub maps: Vec<Bijection>,
    pub codebooks: Vec<Codebook>,
    pub x_given_v: Channel,
    pub p_e: Distribution,
}

impl Ensemble {
    pub fn new(
        layout: MessageLayout,
        maps: Vec<Bijection>,
        codebooks: Vec<Codebook>,
        x_given_v: Channel,
        p_e: Distribution,
    ) -> Result<Self> {
        if maps.is_empty() || codebooks.is_empty() {
            return Err(Error::arg("the ensemble needs at least one map and one codebook"));
        }
        for cb in &codebooks {
            EncoderConfig::new(layout.clone(), maps[0].clone(), cb.clone(), x_given_v.clone())?;
            check_common(&p_e, cb)?;
        }
        for m in &maps {
            if !m.is_bijective(&layout) {
                return Err(Error::Singular);
            }
        }
        Ok(Ensemble {
            layout,
            maps,
            codebooks,
            x_given_v,
            p_e,
        })
    }

    pub fn pairs(&self) -> usize {
        self.maps.len() * self.codebooks.len()
    }

    /// Evaluates every pair; the result is ordered map-major.
    pub fn evaluate(&self, subsets: &[SubsetIndex], eve: &Channel, bob: &Channel) -> Result<Vec<PairReport>> {
        for &s in subsets {
            check_subset(&self.layout, s)?;
        }
        let z_given_v = self.x_given_v.compose(eve)?;
        let tables: Vec<Vec<u32>> = self
            .maps
            .iter()
            .map(|m| m.table(&self.layout))
            .collect::<Result<_>>()?;
        let per_codebook: Vec<(Vec<Vec<f64>>, f64)> = self
            .codebooks
            .par_iter()
            .map(|cb| {
                let rows = output_rows(cb, &z_given_v, "leakage-joint")?;
                let err = bcd_error_probability(cb, &self.x_given_v, bob, &self.p_e)?;
                Ok((rows, err))
            })
            .collect::<Result<_>>()?;
        let nc = self.codebooks.len();
        Ok((0..self.pairs())
            .into_par_iter()
            .map(|k| {
                let (mi, ci) = (k / nc, k % nc);
                let (rows, err) = &per_codebook[ci];
                let leakage = subsets
                    .iter()
                    .map(|&s| leakage_from_rows(&self.layout, &tables[mi], &self.codebooks[ci], rows, &self.p_e, s))
                    .collect();
                // Relabeling b by a bijection leaves the ML error unchanged.
                PairReport {
                    map_index: mi,
                    codebook_index: ci,
                    leakage,
                    bob_error: *err,
                }
            })
            .collect())
    }
}

/// Outcome of the existence search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub subsets: Vec<SubsetIndex>,
    pub given_common: bool,
    pub pairs: Vec<PairReport>,
    pub average_leakage: Vec<Nats>,
    pub average_error: f64,
    /// `2 * 2^T`.
    pub inflation: f64,
    pub leakage_thresholds: Vec<Nats>,
    pub error_threshold: f64,
    /// Index into `pairs` of the chosen candidate.
    pub selected: Option<usize>,
}

impl SearchResult {
    pub fn selected_pair(&self) -> Option<&PairReport> {
        self.selected.map(|i| &self.pairs[i])
    }

    pub fn qualifies(&self, pair: &PairReport) -> bool {
        pair.leakage
            .iter()
            .zip(&self.leakage_thresholds)
            .all(|(l, &t)| l.value(self.given_common) <= t + COMPARE_TOL)
            && pair.bob_error <= self.error_threshold + COMPARE_TOL
    }
}

/// Looks for a pair whose leakage for every subset is at most
/// `2 * 2^T` times the candidate average, and whose error is at most
/// `2 * 2^T` times the average error. Among qualifying pairs the one with
/// the smallest total leakage is chosen, ties going to the lowest index.
pub fn existence_search(
    ensemble: &Ensemble,
    subsets: &[SubsetIndex],
    eve: &Channel,
    bob: &Channel,
    given_common: bool,
) -> Result<SearchResult> {
    if subsets.is_empty() {
        return Err(Error::arg("no subsets requested"));
    }
    let pairs = ensemble.evaluate(subsets, eve, bob)?;
    let count = pairs.len() as f64;
    let average_leakage: Vec<f64> = (0..subsets.len())
        .map(|i| pairs.iter().map(|p| p.leakage[i].value(given_common)).sum::<f64>() / count)
        .collect();
    let average_error = pairs.iter().map(|p| p.bob_error).sum::<f64>() / count;
    let inflation = 2.0 * 2f64.powi(ensemble.layout.secrets() as i32);
    let mut result = SearchResult {
        subsets: subsets.to_vec(),
        given_common,
        leakage_thresholds: average_leakage.iter().map(|a| inflation * a).collect(),
        error_threshold: inflation * average_error,
        average_leakage,
        average_error,
        inflation,
        pairs,
        selected: None,
    };
    let total = |p: &PairReport| p.leakage.iter().map(|l| l.value(given_common)).sum::<f64>();
    result.selected = result
        .pairs
        .iter()
        .enumerate()
        .filter(|(_, p)| result.qualifies(p))
        .fold(None::<(usize, f64)>, |best, (i, p)| match best {
            Some((_, t)) if t <= total(p) => best,
            _ => Some((i, total(p))),
        })
        .map(|(i, _)| i);
    Ok(result)
}

/// One row of the finite-n bound comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub rho: f64,
    /// Ensemble average of `exp(rho I(S_I; Z^n))`.
    pub lhs: f64,
    /// `1 + [exp(rho (R_I - R_p)) sum_u P_U(u) exp(phi(rho, P_{Z|V}, P_{V|U=u}))]^n`.
    pub rhs: f64,
    pub pass: bool,
    /// `(1 + log(2 * 2^T)) / (n rho)`.
    pub log_term: Nats,
    /// `(1/rho) log sum_u P_U(u) exp(phi(..)) - I(V;Z|U)`.
    pub epsilon: Nats,
    /// `log_term + max(R_I - R_p + I(V;Z|U) + epsilon, 0)`: per-symbol
    /// leakage bound for a pair chosen by the existence search.
    pub leakage_rate_bound: Nats,
    /// `R_I - leakage_rate_bound`.
    pub equivocation_floor: Nats,
    /// `(1/rho) log rhs`, a bound on the ensemble-average leakage.
    pub ensemble_bound: Nats,
}

/// Bound comparison for one subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub subset: SubsetIndex,
    pub n: usize,
    pub r_i: Nats,
    pub r_p: Nats,
    pub i_vz_given_u: Nats,
    /// `R_I - R_p + I(V;Z|U) < 0`: the leakage exponent can be positive.
    pub decays: bool,
    pub mean_leakage: Nats,
    pub mean_equivocation_rate: Nats,
    pub rows: Vec<BoundRow>,
}

impl BoundCheck {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn best_bound(&self) -> Option<Nats> {
        self.rows.iter().map(|r| r.ensemble_bound).reduce(f64::min)
    }
}

/// Compares the ensemble average of `exp(rho I(S_I; Z^n))` over the given
/// pairs with the single-letter bound. `spec` supplies `P_U`, `P_{V|U}` and
/// `P_{X|V}`; the pairs' leakage must already be evaluated for `subset`.
pub fn bound_check(
    ensemble: &Ensemble,
    spec: &MarkovSpec,
    eve: &Channel,
    pairs: &[PairReport],
    slot: usize,
    rhos: &[f64],
    given_common: bool,
) -> Result<BoundCheck> {
    let first = pairs.first().ok_or_else(|| Error::arg("no evaluated pairs"))?;
    let entry = first.leakage.get(slot).ok_or_else(|| Error::arg("subset slot out of range"))?;
    let subset = entry.subset;
    let cb = &ensemble.codebooks[0];
    if spec.v_card() != cb.v_card || spec.u_card() != cb.u_card {
        return Err(Error::dim("Markov chain alphabets differ from the codebook"));
    }
    let n = cb.n as f64;
    let r_i = entry.log_size / n;
    let r_p = cb.private_rate();
    let z_given_v = spec.x_given_v.compose(eve)?;
    let uvz = spec.uvz_joint(eve)?;
    let i_vz_given_u = conditional_mutual_information_axes(&uvz, &[1], &[2], &[0])?;
    let c = 1.0 + (2.0 * 2f64.powi(ensemble.layout.secrets() as i32)).ln();
    let values: Vec<f64> = pairs.iter().map(|p| p.leakage[slot].value(given_common)).collect();
    let count = values.len() as f64;
    let mut rows = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::RhoOutOfRange { rho, range: "(0, 1]" });
        }
        let lhs = values.iter().map(|&i| (rho * i).exp()).sum::<f64>() / count;
        let log_mix = log_sum_exp(
            spec.p_u
                .probs()
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(u, &p)| Ok(p.ln() + phi_extended(rho, &z_given_v, &spec.v_given_u.row_dist(u))?))
                .collect::<Result<Vec<f64>>>()?,
        );
        let a = rho * (r_i - r_p) + log_mix;
        let rhs = 1.0 + (n * a).exp();
        let log_term = c / (n * rho);
        let epsilon = log_mix / rho - i_vz_given_u;
        let leakage_rate_bound = log_term + (r_i - r_p + i_vz_given_u + epsilon).max(0.0);
        rows.push(BoundRow {
            rho,
            lhs,
            rhs,
            pass: lhs <= rhs * (1.0 + COMPARE_TOL),
            log_term,
            epsilon,
            leakage_rate_bound,
            equivocation_floor: r_i - leakage_rate_bound,
            ensemble_bound: rhs.ln() / rho,
        });
    }
    let conditional = |p: &PairReport| {
        let l = &p.leakage[slot];
        if given_common {
            l.conditional_entropy_given_common
        } else {
            l.conditional_entropy
        }
    };
    Ok(BoundCheck {
        subset,
        n: cb.n,
        r_i,
        r_p,
        i_vz_given_u,
        decays: r_i - r_p + i_vz_given_u < 0.0,
        mean_leakage: values.iter().sum::<f64>() / count,
        mean_equivocation_rate: pairs.iter().map(conditional).sum::<f64>() / count / n,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Configured runs
// ---------------------------------------------------------------------------

/// Where the candidate bijections come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSource {
    /// Only the identity map.
    Identity,
    /// Every member of a family.
    Family(FamilyDescriptor),
    /// This many uniform draws from `GL(K, q)`.
    SampleLinear(usize),
}

/// Where the codebooks come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CodebookSource {
    /// This many random codebooks.
    Random(usize),
    /// Explicit codebooks given as `u_words` / `v_words`.
    Explicit(Vec<CodebookWords>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookWords {
    pub u_words: Vec<Vec<usize>>,
    pub v_words: Vec<Vec<usize>>,
}

fn default_rhos() -> Vec<f64> {
    vec![0.25, 0.5, 1.0]
}

fn one() -> usize {
    1
}

/// JSON run configuration for [`simulate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub q: u32,
    /// `(k_1, .., k_T, k_{T+1})`.
    pub dims: Vec<usize>,
    pub n: usize,
    #[serde(default = "one")]
    pub common_messages: usize,
    /// Defaults to uniform.
    #[serde(default)]
    pub common_distribution: Option<Vec<f64>>,
    pub markov: MarkovSpecJson,
    pub bob: ChannelSpec,
    pub eve: ChannelSpec,
    #[serde(default)]
    pub channels: BTreeMap<String, ChannelSpec>,
    pub maps: MapSource,
    pub codebooks: CodebookSource,
    #[serde(default = "default_rhos")]
    pub rho: Vec<f64>,
    /// One-based subsets; defaults to every nonempty subset of secrets.
    #[serde(default)]
    pub subsets: Option<Vec<SubsetIndex>>,
    /// Evaluate `I(S_I; Z^n | E)` instead of `I(S_I; Z^n)`.
    #[serde(default)]
    pub given_common: bool,
}

/// Everything a simulation run produces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub seed: u64,
    pub n: usize,
    pub r_0: Nats,
    pub r_p: Nats,
    pub maps: usize,
    pub codebooks: Vec<Codebook>,
    pub search: SearchResult,
    pub bounds: Vec<BoundCheck>,
    /// Report for the selected pair, or for the first pair when no pair
    /// qualifies.
    pub selected: LeakageReport,
    pub selected_pair: usize,
    pub bcd_error: f64,
}

impl SimReport {
    /// Every bound comparison passed and a pair was found.
    pub fn pass(&self) -> bool {
        self.search.selected.is_some() && self.bounds.iter().all(BoundCheck::pass)
    }

    /// One row per subset for the reported pair.
    pub fn to_csv(&self, scale: f64) -> String {
        let mut t = CsvTable::new([
            "subset",
            "leakage",
            "equivocation_rate",
            "log_size",
            "leakage_given_common",
            "bound",
            "average_leakage",
            "threshold",
            "bob_error",
            "selected",
        ]);
        let pair = &self.search.pairs[self.selected_pair];
        for (i, e) in self.selected.entries.iter().enumerate() {
            t.push(vec![
                e.subset.label(),
                fmt_num(e.leakage / scale),
                fmt_num(e.equivocation_rate / scale),
                fmt_num(e.log_size / scale),
                fmt_num(e.leakage_given_common / scale),
                e.bound.map_or(String::new(), |b| fmt_num(b / scale)),
                fmt_num(self.search.average_leakage[i] / scale),
                fmt_num(self.search.leakage_thresholds[i] / scale),
                fmt_num(pair.bob_error),
                self.search.selected.is_some().to_string(),
            ]);
        }
        t.render()
    }
}

/// Runs the configured ensemble: builds maps and codebooks from `seed`,
/// runs the existence search and the bound comparison for every subset.
pub fn simulate(config: &SimConfig, seed: u64) -> Result<SimReport> {
    let layout = MessageLayout::new(config.q, config.dims.clone())?;
    let spec = config.markov.build(&config.channels)?;
    let bob = config.bob.build(&config.channels)?;
    let eve = config.eve.build(&config.channels)?;
    if bob.inputs() != spec.x_card() || eve.inputs() != spec.x_card() {
        return Err(Error::dim("channel inputs differ from |X|"));
    }
    let p_e = match &config.common_distribution {
        Some(p) => Distribution::new(p.clone())?,
        None if config.common_messages >= 1 => Distribution::uniform(config.common_messages),
        None => return Err(Error::arg("common_messages must be >= 1")),
    };
    if p_e.len() != config.common_messages {
        return Err(Error::dim("common_distribution length differs from common_messages"));
    }
    let subsets = match &config.subsets {
        Some(s) if s.is_empty() => return Err(Error::arg("empty subset list")),
        Some(s) => s.clone(),
        None => layout.secret_subsets(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let maps = match &config.maps {
        MapSource::Identity => vec![Bijection::identity(&layout)],
        MapSource::Family(d) => {
            let fam: HashFamily = d.build()?;
            if fam.layout() != &layout {
                return Err(Error::arg("family layout differs from the run layout"));
            }
            fam.members()?
        }
        MapSource::SampleLinear(k) => {
            if *k == 0 {
                return Err(Error::arg("sample_linear needs at least one map"));
            }
            let fam = HashFamily::linear(&layout);
            (0..*k).map(|_| fam.sample(&mut rng)).collect::<Result<_>>()?
        }
    };
    let n_b = layout.space_size();
    let codebooks = match &config.codebooks {
        CodebookSource::Random(0) => return Err(Error::arg("at least one codebook is required")),
        CodebookSource::Random(k) => (0..*k)
            .map(|_| build_codebook(config.n, &spec.p_u, &spec.v_given_u, config.common_messages, n_b, &mut rng))
            .collect::<Result<Vec<_>>>()?,
        CodebookSource::Explicit(list) => list
            .iter()
            .map(|w| {
                let cb = Codebook::new(spec.u_card(), spec.v_card(), n_b, w.u_words.clone(), w.v_words.clone())?;
                if cb.n != config.n {
                    return Err(Error::dim(format!("explicit codebook has length {} but n = {}", cb.n, config.n)));
                }
                Ok(cb)
            })
            .collect::<Result<Vec<_>>>()?,
    };
    if codebooks.is_empty() {
        return Err(Error::arg("at least one codebook is required"));
    }
    let ensemble = Ensemble::new(layout.clone(), maps, codebooks, spec.x_given_v.clone(), p_e.clone())?;
    let search = existence_search(&ensemble, &subsets, &eve, &bob, config.given_common)?;
    let bounds = (0..subsets.len())
        .map(|slot| bound_check(&ensemble, &spec, &eve, &search.pairs, slot, &config.rho, config.given_common))
        .collect::<Result<Vec<_>>>()?;
    let selected_pair = search.selected.unwrap_or(0);
    let pair = &search.pairs[selected_pair];
    let encoder = EncoderConfig::new(
        layout,
        ensemble.maps[pair.map_index].clone(),
        ensemble.codebooks[pair.codebook_index].clone(),
        spec.x_given_v.clone(),
    )?;
    let mut selected = leakage_report(&encoder, &subsets, &eve, Some(&bob), &p_e)?;
    for (entry, check) in selected.entries.iter_mut().zip(&bounds) {
        entry.bound = check.best_bound();
    }
    let bcd_error = bcd_error_probability(encoder.codebook(), &spec.x_given_v, &bob, &p_e)?;
    Ok(SimReport {
        seed,
        n: config.n,
        r_0: ensemble.codebooks[0].common_rate(),
        r_p: ensemble.codebooks[0].private_rate(),
        maps: ensemble.maps.len(),
        codebooks: ensemble.codebooks,
        search,
        bounds,
        selected,
        selected_pair,
        bcd_error,
    })
}
