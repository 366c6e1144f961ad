//! Discrete memoryless channels and the Markov chain `U -> V -> X -> (Y, Z)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dist::{check_simplex, Distribution, JointDist, SIMPLEX_TOL};
use crate::error::{Error, Result};
use crate::guard;

/// A row-stochastic matrix `W(y|x)`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    data: Vec<f64>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let outputs = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || outputs == 0 {
            return Err(Error::dim("channel needs at least one input and one output"));
        }
        if rows.iter().any(|r| r.len() != outputs) {
            return Err(Error::dim("ragged channel rows"));
        }
        for r in &rows {
            check_simplex(r, SIMPLEX_TOL)?;
        }
        Ok(Channel {
            inputs: rows.len(),
            outputs,
            data: rows.concat(),
        })
    }

    pub(crate) fn from_trusted(inputs: usize, outputs: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(inputs * outputs, data.len());
        Channel {
            inputs,
            outputs,
            data,
        }
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Binary erasure channel; output 2 is the erasure symbol.
    pub fn bec(eps: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - eps, 0.0, eps], vec![0.0, 1.0 - eps, eps]])
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Channel::from_trusted(n, n, data)
    }

    /// A channel whose output ignores the input.
    pub fn constant(inputs: usize, output: &Distribution) -> Self {
        Channel::from_trusted(
            inputs,
            output.len(),
            output.probs().repeat(inputs),
        )
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn row_dist(&self, x: usize) -> Distribution {
        Distribution::from_trusted(self.row(x).to_vec())
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.outputs + y]
    }

    pub fn is_identity(&self) -> bool {
        self.inputs == self.outputs
            && (0..self.inputs).all(|x| {
                (0..self.outputs).all(|y| self.prob(x, y) == if x == y { 1.0 } else { 0.0 })
            })
    }

    /// Output distribution for input distribution `prior`.
    pub fn output(&self, prior: &Distribution) -> Result<Distribution> {
        if prior.len() != self.inputs {
            return Err(Error::dim(format!(
                "prior over {} symbols into a channel with {} inputs",
                prior.len(),
                self.inputs
            )));
        }
        let mut out = vec![0.0; self.outputs];
        for (x, &p) in prior.probs().iter().enumerate() {
            for (o, w) in out.iter_mut().zip(self.row(x)) {
                *o += p * w;
            }
        }
        Ok(Distribution::from_trusted(out))
    }

    /// Joint of the input and output, axes `(input, output)`.
    pub fn joint(&self, prior: &Distribution) -> Result<JointDist> {
        if prior.len() != self.inputs {
            return Err(Error::dim("prior size differs from channel inputs"));
        }
        JointDist::from_prior_and_rows(prior, &self.data, self.outputs)
    }

    /// Cascade `self` then `next`: `(A B)(z|x) = sum_y A(y|x) B(z|y)`.
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if self.outputs != next.inputs {
            return Err(Error::dim(format!(
                "compose: {} outputs into {} inputs",
                self.outputs, next.inputs
            )));
        }
        let mut data = vec![0.0; self.inputs * next.outputs];
        for x in 0..self.inputs {
            for (y, &a) in self.row(x).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (z, &b) in next.row(y).iter().enumerate() {
                    data[x * next.outputs + z] += a * b;
                }
            }
        }
        Ok(Channel::from_trusted(self.inputs, next.outputs, data))
    }

    /// The memoryless `n`-fold extension `W^n(y^n|x^n) = prod_t W(y_t|x_t)`,
    /// with sequences indexed lexicographically (first symbol most
    /// significant).
    pub fn product_extend(&self, n: usize) -> Result<Channel> {
        if n == 0 {
            return Err(Error::arg("block length must be >= 1"));
        }
        let ins = guard::pow_sat(self.inputs as u128, n as u32);
        let outs = guard::pow_sat(self.outputs as u128, n as u32);
        guard::check("product-channel", ins.saturating_mul(outs), guard::PRODUCT_CHANNEL)?;
        let mut cur = self.clone();
        for _ in 1..n {
            cur = cur.kron(self);
        }
        Ok(cur)
    }

    fn kron(&self, other: &Channel) -> Channel {
        let inputs = self.inputs * other.inputs;
        let outputs = self.outputs * other.outputs;
        let mut data = vec![0.0; inputs * outputs];
        for a in 0..self.inputs {
            for b in 0..other.inputs {
                let row = (a * other.inputs + b) * outputs;
                for (ya, &pa) in self.row(a).iter().enumerate() {
                    for (yb, &pb) in other.row(b).iter().enumerate() {
                        data[row + ya * other.outputs + yb] = pa * pb;
                    }
                }
            }
        }
        Channel::from_trusted(inputs, outputs, data)
    }

    /// `W^n(y^n | x^n)` for symbol sequences, without materializing `W^n`.
    pub fn sequence_prob(&self, x: &[usize], y: &[usize]) -> f64 {
        x.iter().zip(y).map(|(&a, &b)| self.prob(a, b)).product()
    }
}

/// Splits a lexicographic sequence index into symbols.
pub fn sequence_symbols(mut index: usize, alphabet: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % alphabet;
        index /= alphabet;
    }
    out
}

/// Lexicographic index of a symbol sequence.
pub fn sequence_index(symbols: &[usize], alphabet: usize) -> usize {
    symbols.iter().fold(0, |acc, &s| acc * alphabet + s)
}

/// Axis numbers of the joint produced by [`joint_from_spec`].
pub mod axis {
    pub const U: usize = 0;
    pub const V: usize = 1;
    pub const X: usize = 2;
    pub const Y: usize = 3;
    pub const Z: usize = 4;
}

/// The auxiliary part of `U -> V -> X`: a prior on `U` and two channels.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovSpec {
    pub p_u: Distribution,
    pub v_given_u: Channel,
    pub x_given_v: Channel,
}

impl MarkovSpec {
    pub fn new(p_u: Distribution, v_given_u: Channel, x_given_v: Channel) -> Result<Self> {
        if p_u.len() != v_given_u.inputs() {
            return Err(Error::dim(format!(
                "|U| = {} but P(V|U) has {} inputs",
                p_u.len(),
                v_given_u.inputs()
            )));
        }
        if v_given_u.outputs() != x_given_v.inputs() {
            return Err(Error::dim(format!(
                "P(V|U) has {} outputs but P(X|V) has {} inputs",
                v_given_u.outputs(),
                x_given_v.inputs()
            )));
        }
        Ok(MarkovSpec {
            p_u,
            v_given_u,
            x_given_v,
        })
    }

    /// Trivial `U`, `V = X` with the given input distribution.
    pub fn direct(p_x: Distribution) -> Self {
        let n = p_x.len();
        MarkovSpec {
            p_u: Distribution::point(1, 0),
            v_given_u: Channel::constant(1, &p_x),
            x_given_v: Channel::identity(n),
        }
    }

    pub fn u_card(&self) -> usize {
        self.p_u.len()
    }

    pub fn v_card(&self) -> usize {
        self.v_given_u.outputs()
    }

    pub fn x_card(&self) -> usize {
        self.x_given_v.outputs()
    }

    pub fn p_v(&self) -> Distribution {
        self.v_given_u.output(&self.p_u).expect("chained at construction")
    }

    /// `P_{X|U} = P_{V|U} P_{X|V}`.
    pub fn x_given_u(&self) -> Channel {
        self.v_given_u.compose(&self.x_given_v).expect("chained at construction")
    }

    fn check_outputs(&self, ch: &Channel, who: &str) -> Result<()> {
        if ch.inputs() != self.x_card() {
            return Err(Error::dim(format!(
                "{who} channel has {} inputs but |X| = {}",
                ch.inputs(),
                self.x_card()
            )));
        }
        Ok(())
    }

    /// Joint of `(U, V, Z)` for the eavesdropper channel `eve`.
    pub fn uvz_joint(&self, eve: &Channel) -> Result<JointDist> {
        self.check_outputs(eve, "eavesdropper")?;
        let z_given_v = self.x_given_v.compose(eve)?;
        let (nu, nv, nz) = (self.u_card(), self.v_card(), eve.outputs());
        let mut probs = Vec::with_capacity(nu * nv * nz);
        for u in 0..nu {
            for v in 0..nv {
                let puv = self.p_u.probs()[u] * self.v_given_u.prob(u, v);
                probs.extend(z_given_v.row(v).iter().map(|w| puv * w));
            }
        }
        Ok(JointDist::from_trusted(vec![nu, nv, nz], probs))
    }
}

/// `P(u, v, x, y, z) = P_U(u) P(v|u) P(x|v) P(y|x) P(z|x)`, axes ordered as in
/// [`axis`].
pub fn joint_from_spec(spec: &MarkovSpec, bob: &Channel, eve: &Channel) -> Result<JointDist> {
    spec.check_outputs(bob, "legitimate")?;
    spec.check_outputs(eve, "eavesdropper")?;
    let dims = vec![
        spec.u_card(),
        spec.v_card(),
        spec.x_card(),
        bob.outputs(),
        eve.outputs(),
    ];
    let size: usize = dims.iter().product();
    guard::check("product-channel", size as u128, guard::PRODUCT_CHANNEL)?;
    let mut probs = Vec::with_capacity(size);
    for u in 0..dims[0] {
        let pu = spec.p_u.probs()[u];
        for v in 0..dims[1] {
            let puv = pu * spec.v_given_u.prob(u, v);
            for x in 0..dims[2] {
                let puvx = puv * spec.x_given_v.prob(v, x);
                for y in 0..dims[3] {
                    let p = puvx * bob.prob(x, y);
                    probs.extend(eve.row(x).iter().map(|w| p * w));
                }
            }
        }
    }
    Ok(JointDist::from_trusted(dims, probs))
}

/// JSON channel description.
///
/// Accepted forms: `{"inputs": n, "outputs": m, "rows": [[..], ..]}`,
/// `{"bsc": p}`, `{"bec": eps}`, `{"identity": n}`,
/// `{"constant": [..], "inputs": n}`, or a string naming a channel defined
/// elsewhere in the same document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Named(String),
    Matrix(MatrixSpec),
    Bsc(BscSpec),
    Bec(BecSpec),
    Identity(IdentitySpec),
    Constant(ConstantSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub inputs: usize,
    pub outputs: usize,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BscSpec {
    pub bsc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BecSpec {
    pub bec: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySpec {
    pub identity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantSpec {
    pub constant: Vec<f64>,
    pub inputs: usize,
}

impl ChannelSpec {
    /// Builds the channel, resolving names against `named`.
    pub fn build(&self, named: &BTreeMap<String, ChannelSpec>) -> Result<Channel> {
        self.build_depth(named, 0)
    }

    fn build_depth(&self, named: &BTreeMap<String, ChannelSpec>, depth: usize) -> Result<Channel> {
        match self {
            ChannelSpec::Named(name) => {
                if depth > named.len() {
                    return Err(Error::arg(format!("cyclic channel reference `{name}`")));
                }
                named
                    .get(name)
                    .ok_or_else(|| Error::arg(format!("unknown channel `{name}`")))?
                    .build_depth(named, depth + 1)
            }
            ChannelSpec::Matrix(m) => {
                if m.rows.len() != m.inputs || m.rows.iter().any(|r| r.len() != m.outputs) {
                    return Err(Error::dim(format!(
                        "declared {}x{} channel does not match its rows",
                        m.inputs, m.outputs
                    )));
                }
                Channel::new(m.rows.clone())
            }
            ChannelSpec::Bsc(b) => Channel::bsc(b.bsc),
            ChannelSpec::Bec(b) => Channel::bec(b.bec),
            ChannelSpec::Identity(i) => {
                if i.identity == 0 {
                    return Err(Error::arg("identity channel on an empty alphabet"));
                }
                Ok(Channel::identity(i.identity))
            }
            ChannelSpec::Constant(c) => {
                if c.inputs == 0 {
                    return Err(Error::arg("constant channel with no inputs"));
                }
                Ok(Channel::constant(c.inputs, &Distribution::new(c.constant.clone())?))
            }
        }
    }

    pub fn from_channel(ch: &Channel) -> Self {
        ChannelSpec::Matrix(MatrixSpec {
            inputs: ch.inputs(),
            outputs: ch.outputs(),
            rows: (0..ch.inputs()).map(|x| ch.row(x).to_vec()).collect(),
        })
    }
}

/// JSON form of a [`MarkovSpec`]; channels may be inline or named.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovSpecJson {
    pub p_u: Vec<f64>,
    pub v_given_u: ChannelSpec,
    pub x_given_v: ChannelSpec,
}

impl MarkovSpecJson {
    pub fn build(&self, named: &BTreeMap<String, ChannelSpec>) -> Result<MarkovSpec> {
        MarkovSpec::new(
            Distribution::new(self.p_u.clone())?,
            self.v_given_u.build(named)?,
            self.x_given_v.build(named)?,
        )
    }

    pub fn from_spec(spec: &MarkovSpec) -> Self {
        MarkovSpecJson {
            p_u: spec.p_u.probs().to_vec(),
            v_given_u: ChannelSpec::from_channel(&spec.v_given_u),
            x_given_v: ChannelSpec::from_channel(&spec.x_given_v),
        }
    }
}
