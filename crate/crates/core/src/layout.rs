//! Message-space layouts `B = S_1 x ... x S_T x S_{T+1}` with `S_i = F_q^{k_i}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GfVector, PrimeField};

/// Factorization of the message space into `T` secret factors followed by the
/// encoder-randomness factor `S_{T+1}`.
///
/// Secret factors have dimension at least one. The randomness factor may have
/// dimension zero, which models a deterministic encoder.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MessageLayout {
    field: PrimeField,
    dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl MessageLayout {
    pub fn new(q: u32, dims: Vec<usize>) -> Result<Self> {
        Self::with_field(PrimeField::new(q)?, dims)
    }

    pub fn with_field(field: PrimeField, dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::arg(
                "a layout needs at least one secret factor and the randomness factor",
            ));
        }
        if dims[..dims.len() - 1].contains(&0) {
            return Err(Error::arg("secret factors must have dimension >= 1"));
        }
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &k in &dims {
            offsets.push(acc);
            acc += k;
        }
        field.space_size(acc)?;
        Ok(MessageLayout {
            field,
            dims,
            offsets,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of secret messages `T`.
    pub fn secrets(&self) -> usize {
        self.dims.len() - 1
    }

    /// Number of factors `T + 1`.
    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    /// Total dimension `K`.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `|B| = q^K`.
    pub fn space_size(&self) -> usize {
        self.field.space_size(self.total_dim()).expect("checked at construction")
    }

    /// `|S_i|` for the zero-based factor `i`.
    pub fn factor_size(&self, i: usize) -> usize {
        self.field.space_size(self.dims[i]).expect("checked at construction")
    }

    /// `prod_{i in I} |S_i|`.
    pub fn subset_size(&self, subset: SubsetIndex) -> usize {
        subset.factors().map(|i| self.factor_size(i)).product()
    }

    /// `prod_{i not in I} |S_i|`.
    pub fn complement_size(&self, subset: SubsetIndex) -> usize {
        self.space_size() / self.subset_size(subset)
    }

    pub fn subset_dim(&self, subset: SubsetIndex) -> usize {
        subset.factors().map(|i| self.dims[i]).sum()
    }

    /// Checks that every factor of `subset` exists; with
    /// `allow_randomness == false` the randomness factor is excluded too.
    pub fn check_subset(&self, subset: SubsetIndex, allow_randomness: bool) -> Result<()> {
        let limit = if allow_randomness {
            self.factors()
        } else {
            self.secrets()
        };
        if subset.is_empty() {
            return Err(Error::arg("empty subset"));
        }
        if let Some(bad) = subset.factors().find(|&i| i >= limit) {
            return Err(Error::arg(format!(
                "factor {} outside 1..={} in subset {}",
                bad + 1,
                limit,
                subset
            )));
        }
        Ok(())
    }

    /// Nonempty subsets of the secret factors `{1..T}`, in bitmask order.
    pub fn secret_subsets(&self) -> Vec<SubsetIndex> {
        SubsetIndex::all_nonempty(self.secrets())
    }

    /// Nonempty subsets of all factors `{1..T+1}`, in bitmask order.
    pub fn all_subsets(&self) -> Vec<SubsetIndex> {
        SubsetIndex::all_nonempty(self.factors())
    }

    /// The full index set `{1..T+1}`.
    pub fn full_subset(&self) -> SubsetIndex {
        SubsetIndex((1u64 << self.factors()) - 1)
    }

    /// The projection `alpha_I`: coordinates of the factors in `subset`,
    /// concatenated in ascending factor order.
    pub fn project(&self, subset: SubsetIndex, b: &GfVector) -> Result<GfVector> {
        if b.len() != self.total_dim() {
            return Err(Error::dim(format!(
                "vector of length {} in a layout of dimension {}",
                b.len(),
                self.total_dim()
            )));
        }
        if b.field() != self.field {
            return Err(Error::ModulusMismatch(b.field().order(), self.q()));
        }
        self.check_subset(subset, true)?;
        let mut out = Vec::with_capacity(self.subset_dim(subset));
        for i in subset.factors() {
            out.extend_from_slice(&b.entries()[self.offsets[i]..self.offsets[i] + self.dims[i]]);
        }
        GfVector::new(self.field, out)
    }

    /// `alpha_I` on message indices; the result indexes `prod_{i in I} S_i`.
    pub fn project_index(&self, subset: SubsetIndex, b: usize) -> usize {
        let v = GfVector::from_index(self.field, self.total_dim(), b);
        let q = self.q() as usize;
        let mut acc = 0usize;
        for i in subset.factors() {
            for &e in &v.entries()[self.offsets[i]..self.offsets[i] + self.dims[i]] {
                acc = acc * q + e as usize;
            }
        }
        acc
    }

    /// `alpha_I` tabulated over all of `B`.
    pub fn projection_table(&self, subset: SubsetIndex) -> Vec<u32> {
        (0..self.space_size())
            .map(|b| self.project_index(subset, b) as u32)
            .collect()
    }

    /// Splits a message index into per-factor indices.
    pub fn split_index(&self, b: usize) -> Vec<usize> {
        (0..self.factors())
            .map(|i| self.project_index(SubsetIndex::single(i), b))
            .collect()
    }

    /// Inverse of [`split_index`](Self::split_index).
    pub fn join_index(&self, parts: &[usize]) -> Result<usize> {
        if parts.len() != self.factors() {
            return Err(Error::dim(format!(
                "{} factor indices for {} factors",
                parts.len(),
                self.factors()
            )));
        }
        let mut acc = 0usize;
        for (i, &p) in parts.iter().enumerate() {
            let size = self.factor_size(i);
            if p >= size {
                return Err(Error::arg(format!(
                    "message {} out of range for factor {} of size {}",
                    p,
                    i + 1,
                    size
                )));
            }
            acc = acc * size + p;
        }
        Ok(acc)
    }
}

/// A nonempty set of factors, stored as a bitmask over zero-based factor
/// positions. Displayed and serialized with one-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetIndex(u64);

impl SubsetIndex {
    /// Builds a subset from one-based factor numbers.
    pub fn new(one_based: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &i in one_based {
            if i == 0 || i > 63 {
                return Err(Error::arg(format!("factor number {i} out of range")));
            }
            mask |= 1 << (i - 1);
        }
        if mask == 0 {
            return Err(Error::arg("empty subset"));
        }
        Ok(SubsetIndex(mask))
    }

    /// The singleton holding the zero-based factor `i`.
    pub fn single(i: usize) -> Self {
        SubsetIndex(1 << i)
    }

    pub fn from_mask(mask: u64) -> Result<Self> {
        if mask == 0 {
            Err(Error::arg("empty subset"))
        } else {
            Ok(SubsetIndex(mask))
        }
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn all_nonempty(factors: usize) -> Vec<SubsetIndex> {
        (1u64..(1 << factors)).map(SubsetIndex).collect()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Zero-based factor positions in ascending order.
    pub fn factors(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |i| self.0 >> i & 1 == 1)
    }

    pub fn one_based(self) -> Vec<usize> {
        self.factors().map(|i| i + 1).collect()
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn union(self, other: Self) -> Self {
        SubsetIndex(self.0 | other.0)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Compact label such as `1,3`, used as a map key in reports.
    pub fn label(self) -> String {
        self.one_based()
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_label(label: &str) -> Result<Self> {
        let parts: std::result::Result<Vec<usize>, _> = label
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect();
        Self::new(&parts.map_err(|_| Error::arg(format!("bad subset label `{label}`")))?)
    }
}

impl fmt::Display for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.label())
    }
}

impl Serialize for SubsetIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubsetIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        SubsetIndex::new(&v).map_err(serde::de::Error::custom)
    }
}
