//! Probability vectors and multi-axis joint distributions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability vector.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A probability vector over `{0, .., len-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    probs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Distribution::new(v)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Vec<f64> {
        d.probs
    }
}

pub(crate) fn check_simplex(probs: &[f64], tol: f64) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty alphabet".into()));
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("entry {p} is not a probability")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > tol {
        return Err(Error::InvalidDistribution(format!("mass {total} != 1")));
    }
    Ok(())
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_simplex(&probs, SIMPLEX_TOL)?;
        Ok(Distribution { probs })
    }

    /// Wraps a vector produced by exact marginalization of a valid joint.
    pub(crate) fn from_trusted(probs: Vec<f64>) -> Self {
        Distribution { probs }
    }

    pub fn uniform(n: usize) -> Self {
        Distribution {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point(n: usize, at: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Distribution { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn is_uniform(&self, tol: f64) -> bool {
        let u = 1.0 / self.len() as f64;
        self.probs.iter().all(|p| (p - u).abs() <= tol)
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Distribution, lambda: f64) -> Result<Distribution> {
        if self.len() != other.len() {
            return Err(Error::dim("mixing distributions of different sizes"));
        }
        Ok(Distribution::from_trusted(
            self.probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        ))
    }
}

/// A joint distribution over several finite axes, stored row-major (axis 0
/// most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct JointDist {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDist {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size: usize = dims.iter().product();
        if dims.is_empty() || size != probs.len() {
            return Err(Error::dim(format!(
                "{} entries for axes {:?}",
                probs.len(),
                dims
            )));
        }
        check_simplex(&probs, 1e-10)?;
        Ok(JointDist { dims, probs })
    }

    pub(crate) fn from_trusted(dims: Vec<usize>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), probs.len());
        JointDist { dims, probs }
    }

    /// Product of a prior and a channel: axes `(input, output)`.
    pub fn from_prior_and_rows(prior: &Distribution, rows: &[f64], outputs: usize) -> Result<Self> {
        if rows.len() != prior.len() * outputs {
            return Err(Error::dim("prior and channel sizes disagree"));
        }
        let probs = rows
            .chunks(outputs)
            .zip(prior.probs())
            .flat_map(|(row, &p)| row.iter().map(move |w| p * w))
            .collect();
        Ok(JointDist::from_trusted(vec![prior.len(), outputs], probs))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn axes(&self) -> usize {
        self.dims.len()
    }

    /// Multi-index of a flat position.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for (slot, &d) in idx.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        idx
    }

    /// Marginal over `axes`, in the order given.
    pub fn marginal(&self, axes: &[usize]) -> Result<JointDist> {
        if let Some(&a) = axes.iter().find(|&&a| a >= self.dims.len()) {
            return Err(Error::dim(format!("axis {a} of a {}-axis joint", self.dims.len())));
        }
        let mut seen = vec![false; self.dims.len()];
        for &a in axes {
            if std::mem::replace(&mut seen[a], true) {
                return Err(Error::dim(format!("axis {a} repeated")));
            }
        }
        let dims: Vec<usize> = if axes.is_empty() {
            vec![1]
        } else {
            axes.iter().map(|&a| self.dims[a]).collect()
        };
        let mut strides = vec![0usize; self.dims.len()];
        let mut s = 1;
        for &a in axes.iter().rev() {
            strides[a] = s;
            s *= self.dims[a];
        }
        let mut out = vec![0.0; dims.iter().product()];
        let mut idx = vec![0usize; self.dims.len()];
        for &p in &self.probs {
            let target: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
            out[target] += p;
            for ax in (0..idx.len()).rev() {
                idx[ax] += 1;
                if idx[ax] < self.dims[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        Ok(JointDist::from_trusted(dims, out))
    }

    /// The joint viewed as a distribution over the flattened alphabet.
    pub fn flatten(&self) -> Distribution {
        Distribution::from_trusted(self.probs.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Distribution::new(vec![0.5, 0.5]).is_ok());
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert!(Distribution::new(vec![]).is_err());
        assert!(Distribution::new(vec![f64::NAN, 1.0]).is_err());
        assert!(JointDist::new(vec![2, 2], vec![0.25; 3]).is_err());
    }

    #[test]
    fn marginals() {
        let j = JointDist::new(vec![2, 3], vec![0.1, 0.2, 0.1, 0.3, 0.2, 0.1]).unwrap();
        let a = j.marginal(&[0]).unwrap();
        assert!((a.probs()[0] - 0.4).abs() < 1e-15);
        let b = j.marginal(&[1]).unwrap();
        assert!((b.probs()[1] - 0.4).abs() < 1e-15);
        let swapped = j.marginal(&[1, 0]).unwrap();
        assert_eq!(swapped.dims(), &[3, 2]);
        assert!((swapped.probs()[1] - 0.3).abs() < 1e-15);
        assert!((j.marginal(&[]).unwrap().probs()[0] - 1.0).abs() < 1e-12);
        assert!(j.marginal(&[0, 0]).is_err());
        assert_eq!(j.unravel(4), vec![1, 1]);
    }
}
