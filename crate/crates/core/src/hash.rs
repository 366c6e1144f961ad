//! Families of bijections on `B` whose projections `alpha_I o F` are
//! two-universal, together with exhaustive checks of that property.
//!
//! Two constructions are provided: the full symmetric group on `B` and the
//! group of invertible linear maps `GL(K, q)`. Arbitrary member lists and
//! generated subgroups of `GL(K, q)` are accepted as well, so the orbit
//! criterion can be exercised on proper subgroups.

use std::collections::{HashSet, VecDeque};

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{enumerate_gl, gl_order, sample_gl, GfMatrix, GfVector};
use crate::guard;
use crate::layout::{MessageLayout, SubsetIndex};

/// Exact probability or ratio.
pub type Fraction = Ratio<u64>;

/// A bijection on `B`, either a linear map or an explicit permutation of
/// message indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bijection {
    Linear(GfMatrix),
    Permutation(Vec<u32>),
}

impl Bijection {
    pub fn identity(layout: &MessageLayout) -> Self {
        Bijection::Linear(GfMatrix::identity(layout.field(), layout.total_dim()))
    }

    pub fn as_matrix(&self) -> Option<&GfMatrix> {
        match self {
            Bijection::Linear(m) => Some(m),
            Bijection::Permutation(_) => None,
        }
    }

    fn check_shape(&self, layout: &MessageLayout) -> Result<()> {
        match self {
            Bijection::Linear(m) => {
                if m.field() != layout.field() {
                    return Err(Error::ModulusMismatch(m.field().order(), layout.q()));
                }
                if m.rows() != layout.total_dim() || m.cols() != layout.total_dim() {
                    return Err(Error::dim(format!(
                        "{}x{} map on a space of dimension {}",
                        m.rows(),
                        m.cols(),
                        layout.total_dim()
                    )));
                }
            }
            Bijection::Permutation(p) => {
                if p.len() != layout.space_size() {
                    return Err(Error::dim(format!(
                        "permutation of {} points on |B| = {}",
                        p.len(),
                        layout.space_size()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Image of the message index `b`.
    pub fn apply(&self, b: usize) -> usize {
        match self {
            Bijection::Linear(m) => m.apply_index(b),
            Bijection::Permutation(p) => p[b] as usize,
        }
    }

    /// Images of every message index.
    pub fn table(&self, layout: &MessageLayout) -> Result<Vec<u32>> {
        self.check_shape(layout)?;
        Ok(match self {
            Bijection::Linear(m) => (0..layout.space_size())
                .map(|b| m.apply_index(b) as u32)
                .collect(),
            Bijection::Permutation(p) => p.clone(),
        })
    }

    /// Checks that the map is a bijection on `B` by image enumeration (for
    /// permutations) or rank (for matrices).
    pub fn is_bijective(&self, layout: &MessageLayout) -> bool {
        if self.check_shape(layout).is_err() {
            return false;
        }
        match self {
            Bijection::Linear(m) => m.is_invertible(),
            Bijection::Permutation(p) => {
                let mut seen = vec![false; p.len()];
                p.iter().all(|&x| {
                    let x = x as usize;
                    x < seen.len() && !std::mem::replace(&mut seen[x], true)
                })
            }
        }
    }

    pub fn inverse(&self) -> Result<Bijection> {
        match self {
            Bijection::Linear(m) => Ok(Bijection::Linear(m.inverse()?)),
            Bijection::Permutation(p) => {
                let mut inv = vec![u32::MAX; p.len()];
                for (i, &x) in p.iter().enumerate() {
                    let slot = inv.get_mut(x as usize).ok_or(Error::Singular)?;
                    if *slot != u32::MAX {
                        return Err(Error::Singular);
                    }
                    *slot = i as u32;
                }
                Ok(Bijection::Permutation(inv))
            }
        }
    }
}

/// Which construction a family realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Every permutation of `B`.
    AllPermutations,
    /// Every invertible linear map on `B`.
    BijectiveLinear,
    /// An explicit list of members, drawn uniformly.
    Explicit,
    /// The subgroup of `GL(K, q)` generated by the listed matrices.
    Generated,
}

/// A finite set of bijections on `B`, with `F` uniform over it.
#[derive(Clone, Debug)]
pub struct HashFamily {
    kind: FamilyKind,
    layout: MessageLayout,
    members: Vec<Bijection>,
}

impl HashFamily {
    /// The full symmetric group on `B` (enumerated; `|B| <= 8`).
    pub fn all_permutations(layout: &MessageLayout) -> Result<Self> {
        let n = layout.space_size();
        guard::check("permutation-space", n as u128, guard::PERMUTATION_SPACE)?;
        let mut perm: Vec<u32> = (0..n as u32).collect();
        let mut members = vec![Bijection::Permutation(perm.clone())];
        while next_permutation(&mut perm) {
            members.push(Bijection::Permutation(perm.clone()));
        }
        Ok(HashFamily {
            kind: FamilyKind::AllPermutations,
            layout: layout.clone(),
            members,
        })
    }

    /// The group `GL(K, q)` of all bijective linear maps on `B`. Members are
    /// materialized lazily; sampling never enumerates.
    pub fn linear(layout: &MessageLayout) -> Self {
        HashFamily {
            kind: FamilyKind::BijectiveLinear,
            layout: layout.clone(),
            members: Vec::new(),
        }
    }

    /// An explicit list of bijections; duplicates are kept so the list defines
    /// a (possibly non-uniform) distribution over distinct maps.
    pub fn explicit(layout: &MessageLayout, members: Vec<Bijection>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::arg("empty family"));
        }
        for m in &members {
            if !m.is_bijective(layout) {
                return Err(Error::arg("family member is not a bijection on B"));
            }
        }
        Ok(HashFamily {
            kind: FamilyKind::Explicit,
            layout: layout.clone(),
            members,
        })
    }

    /// The subgroup of `GL(K, q)` generated by `generators`, closed by
    /// breadth-first multiplication.
    pub fn generated(layout: &MessageLayout, generators: Vec<GfMatrix>) -> Result<Self> {
        let k = layout.total_dim();
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            let b = Bijection::Linear(g);
            if !b.is_bijective(layout) {
                return Err(Error::arg("generator is not an invertible K x K matrix"));
            }
            if let Bijection::Linear(g) = b {
                gens.push(g);
            }
        }
        let id = GfMatrix::identity(layout.field(), k);
        let mut seen: HashSet<GfMatrix> = HashSet::from([id.clone()]);
        let mut order = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(m) = queue.pop_front() {
            for g in &gens {
                let next = g.mul(&m)?;
                if seen.insert(next.clone()) {
                    guard::check("family-members", seen.len() as u128, guard::FAMILY_MEMBERS)?;
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        Ok(HashFamily {
            kind: FamilyKind::Generated,
            layout: layout.clone(),
            members: order.into_iter().map(Bijection::Linear).collect(),
        })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn layout(&self) -> &MessageLayout {
        &self.layout
    }

    /// Whether every member is linear.
    pub fn is_linear(&self) -> bool {
        match self.kind {
            FamilyKind::BijectiveLinear | FamilyKind::Generated => true,
            FamilyKind::AllPermutations => false,
            FamilyKind::Explicit => self.members.iter().all(|m| m.as_matrix().is_some()),
        }
    }

    /// Number of members, counted with multiplicity.
    pub fn size(&self) -> u128 {
        match self.kind {
            FamilyKind::BijectiveLinear => gl_order(self.layout.total_dim(), self.layout.q()),
            _ => self.members.len() as u128,
        }
    }

    /// All members, enumerating `GL(K, q)` when needed.
    pub fn members(&self) -> Result<Vec<Bijection>> {
        match self.kind {
            FamilyKind::BijectiveLinear => {
                guard::check("family-members", self.size(), guard::FAMILY_MEMBERS)?;
                Ok(enumerate_gl(self.layout.total_dim(), self.layout.field())?
                    .into_iter()
                    .map(Bijection::Linear)
                    .collect())
            }
            _ => Ok(self.members.clone()),
        }
    }

    /// A uniformly drawn member.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Bijection> {
        match self.kind {
            FamilyKind::BijectiveLinear => Ok(Bijection::Linear(sample_gl(
                self.layout.total_dim(),
                self.layout.field(),
                rng,
            )?)),
            _ => Ok(self.members[rng.gen_range(0..self.members.len())].clone()),
        }
    }

    /// Image tables of every member.
    pub fn tables(&self) -> Result<Vec<Vec<u32>>> {
        self.members()?
            .iter()
            .map(|m| m.table(&self.layout))
            .collect()
    }

    /// A generating set for the group acting on `B`: elementary transvections
    /// and scalings for `GL(K, q)`, the members themselves otherwise.
    fn generators(&self) -> Result<Vec<Bijection>> {
        match self.kind {
            FamilyKind::BijectiveLinear => {
                let field = self.layout.field();
                let k = self.layout.total_dim();
                let mut gens = Vec::new();
                for a in 2..field.order() {
                    let mut m = GfMatrix::identity(field, k);
                    m.set(0, 0, a)?;
                    gens.push(Bijection::Linear(m));
                }
                for i in 0..k {
                    for j in 0..k {
                        if i != j {
                            let mut m = GfMatrix::identity(field, k);
                            m.set(i, j, 1)?;
                            gens.push(Bijection::Linear(m));
                        }
                    }
                }
                Ok(gens)
            }
            _ => Ok(self.members.clone()),
        }
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        let members = match self.kind {
            FamilyKind::Explicit | FamilyKind::Generated => Some(
                self.members
                    .iter()
                    .filter_map(|m| m.as_matrix().map(|m| m.row_major().to_vec()))
                    .collect(),
            ),
            _ => None,
        };
        FamilyDescriptor {
            kind: self.kind,
            q: self.layout.q(),
            dims: self.layout.dims().to_vec(),
            members,
        }
    }
}

/// Lexicographic successor; returns `false` after the last permutation.
fn next_permutation(p: &mut [u32]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&x| x > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// JSON form of a family: `{kind, q, dims, members?}` where each member is a
/// row-major list of residues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDescriptor {
    pub kind: FamilyKind,
    pub q: u32,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Vec<u32>>>,
}

impl FamilyDescriptor {
    pub fn build(&self) -> Result<HashFamily> {
        let layout = MessageLayout::new(self.q, self.dims.clone())?;
        let k = layout.total_dim();
        let matrices = || -> Result<Vec<GfMatrix>> {
            let rows = self
                .members
                .as_ref()
                .ok_or_else(|| Error::arg("family kind requires `members`"))?;
            rows.iter()
                .map(|r| GfMatrix::from_row_major(layout.field(), k, k, r.clone()))
                .collect()
        };
        let no_members = || -> Result<()> {
            if self.members.is_some() {
                Err(Error::arg("`members` is only valid for explicit or generated families"))
            } else {
                Ok(())
            }
        };
        match self.kind {
            FamilyKind::AllPermutations => {
                no_members()?;
                HashFamily::all_permutations(&layout)
            }
            FamilyKind::BijectiveLinear => {
                no_members()?;
                Ok(HashFamily::linear(&layout))
            }
            FamilyKind::Explicit => HashFamily::explicit(
                &layout,
                matrices()?.into_iter().map(Bijection::Linear).collect(),
            ),
            FamilyKind::Generated => HashFamily::generated(&layout, matrices()?),
        }
    }
}

fn check_vector(layout: &MessageLayout, x: &GfVector) -> Result<usize> {
    if x.len() != layout.total_dim() {
        return Err(Error::dim(format!(
            "vector of length {} in a layout of dimension {}",
            x.len(),
            layout.total_dim()
        )));
    }
    if x.field() != layout.field() {
        return Err(Error::ModulusMismatch(x.field().order(), layout.q()));
    }
    Ok(x.to_index())
}

/// `Pr_F[alpha_I(F(x1)) = alpha_I(F(x2))]` computed exactly over the family.
pub fn collision_probability(
    family: &HashFamily,
    subset: SubsetIndex,
    x1: &GfVector,
    x2: &GfVector,
) -> Result<Fraction> {
    let layout = family.layout();
    layout.check_subset(subset, true)?;
    let a = check_vector(layout, x1)?;
    let b = check_vector(layout, x2)?;
    if a == b {
        return Err(Error::arg("collision probability needs x1 != x2"));
    }
    let proj = layout.projection_table(subset);
    let members = family.members()?;
    let hits = members
        .par_iter()
        .filter(|f| proj[f.apply(a)] == proj[f.apply(b)])
        .count();
    Ok(Fraction::new(hits as u64, members.len() as u64))
}

/// `(-1 + prod_{i not in I} |S_i|) / (|B| - 1)`, the pair-independent collision
/// probability of the full permutation family.
pub fn permutation_collision_closed_form(layout: &MessageLayout, subset: SubsetIndex) -> Fraction {
    let rest = layout.complement_size(subset) as u64;
    Fraction::new(rest - 1, layout.space_size() as u64 - 1)
}

/// Outcome of an exhaustive two-universality check for one subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoUniversalReport {
    pub subset: SubsetIndex,
    #[serde(serialize_with = "ser_fraction")]
    pub max_ratio: Fraction,
    #[serde(serialize_with = "ser_fraction")]
    pub bound: Fraction,
    /// A pair `(x1, x2)` of message indices attaining `max_ratio`.
    pub worst_pair: (usize, usize),
    pub pass: bool,
}

/// Maximizes the collision probability over all pairs `x1 != x2` and compares
/// it with `1 / prod_{i in I} |S_i|` exactly.
pub fn verify_two_universal(family: &HashFamily, subset: SubsetIndex) -> Result<TwoUniversalReport> {
    let layout = family.layout();
    layout.check_subset(subset, true)?;
    let n = layout.space_size();
    let pairs = (n as u128) * (n as u128 - 1) / 2;
    guard::check("pair-scan", pairs.saturating_mul(family.size()), guard::PAIR_SCAN)?;
    let proj = layout.projection_table(subset);
    let tables = family.tables()?;
    let pair_index = |i: usize, j: usize| i * n - i * (i + 1) / 2 + (j - i - 1);
    let counts = tables
        .par_iter()
        .fold(
            || vec![0u64; pairs as usize],
            |mut acc, t| {
                let img: Vec<u32> = t.iter().map(|&y| proj[y as usize]).collect();
                for i in 0..n {
                    for j in i + 1..n {
                        if img[i] == img[j] {
                            acc[pair_index(i, j)] += 1;
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; pairs as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut worst = (0usize, 1usize.min(n.saturating_sub(1)));
    let mut worst_count = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            let c = counts[pair_index(i, j)];
            if c > worst_count {
                worst_count = c;
                worst = (i, j);
            }
        }
    }
    let max_ratio = Fraction::new(worst_count, tables.len() as u64);
    let bound = Fraction::new(1, layout.subset_size(subset) as u64);
    Ok(TwoUniversalReport {
        subset,
        max_ratio,
        bound,
        worst_pair: worst,
        pass: max_ratio <= bound,
    })
}

/// Outcome of the orbit criterion for one vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitReport {
    pub subset: SubsetIndex,
    pub vector: usize,
    pub orbit_size: usize,
    /// `|O(v) ∩ ({0} x prod_{i not in I} S_i)|`.
    pub intersection: usize,
    #[serde(serialize_with = "ser_fraction")]
    pub lhs_ratio: Fraction,
    #[serde(serialize_with = "ser_fraction")]
    pub bound: Fraction,
    pub pass: bool,
}

/// The orbit `O(v)` of `v` (as message indices, ascending) under the group
/// generated by the family.
pub fn orbit(family: &HashFamily, v: &GfVector) -> Result<Vec<usize>> {
    if !family.is_linear() {
        return Err(Error::arg("orbits are defined for linear families"));
    }
    let start = check_vector(family.layout(), v)?;
    let gens: Vec<Vec<u32>> = family
        .generators()?
        .iter()
        .map(|g| g.table(family.layout()))
        .collect::<Result<_>>()?;
    let n = family.layout().space_size();
    guard::check("family-members", n as u128, guard::FAMILY_MEMBERS)?;
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = g[x] as usize;
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    Ok((0..n).filter(|&i| seen[i]).collect())
}

/// Checks `|O(v) ∩ ({0} x prod_{i not in I} S_i)| / |O(v)| <= 1 / prod_{i in I} |S_i|`.
pub fn orbit_criterion(family: &HashFamily, subset: SubsetIndex, v: &GfVector) -> Result<OrbitReport> {
    let layout = family.layout();
    layout.check_subset(subset, true)?;
    if v.is_zero() {
        return Err(Error::arg("orbit criterion needs a nonzero vector"));
    }
    let orb = orbit(family, v)?;
    let proj = layout.projection_table(subset);
    let intersection = orb.iter().filter(|&&x| proj[x] == 0).count();
    let lhs_ratio = Fraction::new(intersection as u64, orb.len() as u64);
    let bound = Fraction::new(1, layout.subset_size(subset) as u64);
    Ok(OrbitReport {
        subset,
        vector: v.to_index(),
        orbit_size: orb.len(),
        intersection,
        lhs_ratio,
        bound,
        pass: lhs_ratio <= bound,
    })
}

/// Runs the orbit criterion for every nonzero `v`; passes iff all do.
pub fn orbit_criterion_all(family: &HashFamily, subset: SubsetIndex) -> Result<(bool, Vec<OrbitReport>)> {
    let layout = family.layout();
    let reports: Vec<OrbitReport> = (1..layout.space_size())
        .map(|i| {
            orbit_criterion(
                family,
                subset,
                &GfVector::from_index(layout.field(), layout.total_dim(), i),
            )
        })
        .collect::<Result<_>>()?;
    Ok((reports.iter().all(|r| r.pass), reports))
}

fn ser_fraction<S: serde::Serializer>(r: &Fraction, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    fn layout(q: u32, dims: &[usize]) -> MessageLayout {
        MessageLayout::new(q, dims.to_vec()).unwrap()
    }

    fn vec_of(l: &MessageLayout, idx: usize) -> GfVector {
        GfVector::from_index(l.field(), l.total_dim(), idx)
    }

    fn frac(n: u64, d: u64) -> Fraction {
        Fraction::new(n, d)
    }

    #[test]
    fn permutation_family_sizes() {
        assert_eq!(HashFamily::all_permutations(&layout(2, &[1, 0])).unwrap().size(), 2);
        assert_eq!(HashFamily::all_permutations(&layout(2, &[1, 1])).unwrap().size(), 24);
        let big = HashFamily::all_permutations(&layout(2, &[1, 1, 1])).unwrap();
        assert_eq!(big.size(), 40320);
        assert!(big.members().unwrap().iter().all(|m| m.is_bijective(big.layout())));
        assert!(HashFamily::all_permutations(&layout(3, &[1, 1]))
            .unwrap_err()
            .is_guard());
    }

    #[test]
    fn linear_family_sizes() {
        assert_eq!(HashFamily::linear(&layout(2, &[1, 1])).members().unwrap().len(), 6);
        assert_eq!(HashFamily::linear(&layout(2, &[1, 1, 1])).members().unwrap().len(), 168);
        assert_eq!(HashFamily::linear(&layout(3, &[1, 1])).members().unwrap().len(), 48);
        let f = HashFamily::linear(&layout(2, &[1, 1, 1]));
        assert!(f.members().unwrap().iter().all(|m| m.is_bijective(f.layout())));
    }

    #[test]
    fn collision_examples() {
        let l = layout(2, &[1, 1]);
        let i1 = SubsetIndex::new(&[1]).unwrap();
        let perms = HashFamily::all_permutations(&l).unwrap();
        let lin = HashFamily::linear(&l);
        for a in 0..4 {
            for b in 0..4 {
                if a == b {
                    continue;
                }
                let (x1, x2) = (vec_of(&l, a), vec_of(&l, b));
                assert_eq!(collision_probability(&perms, i1, &x1, &x2).unwrap(), frac(1, 3));
                assert_eq!(collision_probability(&lin, i1, &x1, &x2).unwrap(), frac(1, 3));
                assert_eq!(
                    collision_probability(&lin, l.full_subset(), &x1, &x2).unwrap(),
                    frac(0, 1)
                );
            }
        }
        let x = vec_of(&l, 1);
        assert!(collision_probability(&lin, i1, &x, &x).is_err());
    }

    #[test]
    fn permutation_closed_form_is_pair_independent() {
        let l = layout(2, &[1, 1, 1]);
        let perms = HashFamily::all_permutations(&l).unwrap();
        for s in l.all_subsets() {
            let expected = permutation_collision_closed_form(&l, s);
            for a in 0..8 {
                for b in a + 1..8 {
                    let p = collision_probability(&perms, s, &vec_of(&l, a), &vec_of(&l, b)).unwrap();
                    assert_eq!(p, expected, "I={s} pair ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn identity_family_fails() {
        let l = layout(2, &[1, 1]);
        let id = HashFamily::explicit(&l, vec![Bijection::identity(&l)]).unwrap();
        let i1 = SubsetIndex::new(&[1]).unwrap();
        let r = verify_two_universal(&id, i1).unwrap();
        assert_eq!(r.max_ratio, frac(1, 1));
        assert_eq!(r.bound, frac(1, 2));
        assert!(!r.pass);
        // v = (0,1)
        let o = orbit_criterion(&id, i1, &vec_of(&l, 1)).unwrap();
        assert_eq!(o.orbit_size, 1);
        assert_eq!(o.lhs_ratio, frac(1, 1));
        assert!(!o.pass);
    }

    #[test]
    fn orbit_examples() {
        let l = layout(2, &[1, 1]);
        let lin = HashFamily::linear(&l);
        let i1 = SubsetIndex::new(&[1]).unwrap();
        for v in 1..4 {
            let r = orbit_criterion(&lin, i1, &vec_of(&l, v)).unwrap();
            assert_eq!(r.orbit_size, 3);
            assert_eq!(r.intersection, 1);
            assert_eq!(r.lhs_ratio, frac(1, 3));
            assert!(r.pass);
        }
        assert!(orbit_criterion(&lin, i1, &vec_of(&l, 0)).is_err());
        let perms = HashFamily::all_permutations(&l).unwrap();
        assert!(orbit_criterion(&perms, i1, &vec_of(&l, 1)).is_err());
    }

    #[test]
    fn full_gl_orbit_closed_form() {
        for (q, dims) in [(2, vec![1, 1, 1]), (3, vec![1, 1]), (2, vec![2, 1, 1]), (5, vec![1, 1]), (2, vec![3, 2, 1])] {
            let l = layout(q, &dims);
            let lin = HashFamily::linear(&l);
            let n = l.space_size();
            for s in l.all_subsets() {
                for v in [1, n - 1, n / 2] {
                    let r = orbit_criterion(&lin, s, &vec_of(&l, v)).unwrap();
                    assert_eq!(r.orbit_size, n - 1);
                    assert_eq!(r.intersection, n / l.subset_size(s) - 1);
                    assert!(r.pass);
                }
            }
        }
    }

    #[test]
    fn generated_subgroup_closure() {
        let l = layout(2, &[1, 1, 1]);
        let f2 = PrimeField::binary();
        // Cyclic shift of coordinates generates a group of order 3.
        let shift = GfMatrix::from_rows(f2, &[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        let g = HashFamily::generated(&l, vec![shift]).unwrap();
        assert_eq!(g.size(), 3);
        let all: Vec<GfMatrix> = enumerate_gl(3, f2).unwrap();
        let whole = HashFamily::generated(&l, all).unwrap();
        assert_eq!(whole.size(), 168);
    }

    #[test]
    fn descriptor_round_trip() {
        let json = r#"{"kind":"bijective-linear","q":2,"dims":[1,1,1]}"#;
        let d: FamilyDescriptor = serde_json::from_str(json).unwrap();
        let fam = d.build().unwrap();
        assert_eq!(fam.size(), 168);
        assert_eq!(serde_json::to_string(&fam.descriptor()).unwrap(), json);

        let explicit = r#"{"kind":"explicit","q":2,"dims":[1,1],"members":[[1,0,0,1]]}"#;
        let d: FamilyDescriptor = serde_json::from_str(explicit).unwrap();
        assert_eq!(d.build().unwrap().size(), 1);
        let singular = r#"{"kind":"explicit","q":2,"dims":[1,1],"members":[[1,1,1,1]]}"#;
        let d: FamilyDescriptor = serde_json::from_str(singular).unwrap();
        assert!(d.build().is_err());
        assert!(serde_json::from_str::<FamilyDescriptor>(r#"{"kind":"explicit","q":2,"dims":[1,1],"extra":1}"#).is_err());
    }

    #[test]
    fn bijection_inverse() {
        let l = layout(3, &[1, 1]);
        let lin = HashFamily::linear(&l);
        for m in lin.members().unwrap() {
            let inv = m.inverse().unwrap();
            for b in 0..9 {
                assert_eq!(inv.apply(m.apply(b)), b);
            }
        }
        let p = Bijection::Permutation(vec![2, 0, 1, 3]);
        let inv = p.inverse().unwrap();
        assert_eq!((0..4).map(|b| inv.apply(p.apply(b))).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert!(Bijection::Permutation(vec![0, 0, 1, 2]).inverse().is_err());
    }
}
