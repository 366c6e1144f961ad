//! Prime-field arithmetic and small dense linear algebra over `F_q`.
//!
//! Vectors of `F_q^k` are identified with integers in `[0, q^k)` by reading
//! the coordinates as base-`q` digits, coordinate 0 most significant. The same
//! convention indexes matrices (row-major) when enumerating `GL(k, q)`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guard;

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let q = q as u64;
    let mut d = 2u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A prime field `F_q`. Construction checks primality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    q: u32,
}

impl TryFrom<u32> for PrimeField {
    type Error = Error;
    fn try_from(q: u32) -> Result<Self> {
        PrimeField::new(q)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.q
    }
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self> {
        if is_prime(q) {
            Ok(PrimeField { q })
        } else {
            Err(Error::NotPrime(q))
        }
    }

    /// `F_2`.
    pub fn binary() -> Self {
        PrimeField { q: 2 }
    }

    pub fn order(self) -> u32 {
        self.q
    }

    pub fn element(self, value: u32) -> Result<FieldElement> {
        FieldElement::new(value, self.q)
    }

    fn check(self, a: u32) -> Result<u32> {
        if a < self.q {
            Ok(a)
        } else {
            Err(Error::ResidueOutOfRange {
                value: a,
                modulus: self.q,
            })
        }
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.q as u64 - b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.q) {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn pow(self, a: u32, mut e: u32) -> u32 {
        let q = self.q as u64;
        let mut base = a as u64 % q;
        let mut acc = 1u64 % q;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            e >>= 1;
        }
        acc as u32
    }

    /// `q^k` as an alphabet size, or an error if it does not fit a `usize`.
    pub fn space_size(self, k: usize) -> Result<usize> {
        let size = guard::pow_sat(self.q as u128, k as u32);
        usize::try_from(size)
            .ok()
            .filter(|_| size < u128::MAX)
            .ok_or_else(|| Error::arg(format!("{}^{} does not fit in memory", self.q, k)))
    }
}

/// An element of `F_q` carrying its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn new(value: u32, modulus: u32) -> Result<Self> {
        let field = PrimeField::new(modulus)?;
        field.check(value)?;
        Ok(FieldElement { value, modulus })
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    fn field(self) -> PrimeField {
        PrimeField { q: self.modulus }
    }

    fn same(self, other: Self) -> Result<PrimeField> {
        if self.modulus == other.modulus {
            Ok(self.field())
        } else {
            Err(Error::ModulusMismatch(self.modulus, other.modulus))
        }
    }

    pub fn add(self, other: Self) -> Result<Self> {
        let f = self.same(other)?;
        Ok(FieldElement {
            value: f.add(self.value, other.value),
            ..self
        })
    }

    pub fn sub(self, other: Self) -> Result<Self> {
        let f = self.same(other)?;
        Ok(FieldElement {
            value: f.sub(self.value, other.value),
            ..self
        })
    }

    pub fn mul(self, other: Self) -> Result<Self> {
        let f = self.same(other)?;
        Ok(FieldElement {
            value: f.mul(self.value, other.value),
            ..self
        })
    }

    pub fn neg(self) -> Self {
        FieldElement {
            value: self.field().neg(self.value),
            ..self
        }
    }

    pub fn inv(self) -> Result<Self> {
        Ok(FieldElement {
            value: self.field().inv(self.value)?,
            ..self
        })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// A vector in `F_q^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GfVector {
    field: PrimeField,
    entries: Vec<u32>,
}

impl GfVector {
    pub fn new(field: PrimeField, entries: Vec<u32>) -> Result<Self> {
        for &e in &entries {
            field.check(e)?;
        }
        Ok(GfVector { field, entries })
    }

    pub fn zeros(field: PrimeField, k: usize) -> Self {
        GfVector {
            field,
            entries: vec![0; k],
        }
    }

    /// Decodes the base-`q` digits of `index` (most significant first).
    pub fn from_index(field: PrimeField, k: usize, mut index: usize) -> Self {
        let q = field.q as usize;
        let mut entries = vec![0u32; k];
        for slot in entries.iter_mut().rev() {
            *slot = (index % q) as u32;
            index /= q;
        }
        GfVector { field, entries }
    }

    pub fn to_index(&self) -> usize {
        let q = self.field.q as usize;
        self.entries.iter().fold(0usize, |acc, &e| acc * q + e as usize)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> FieldElement {
        FieldElement {
            value: self.entries[i],
            modulus: self.field.q,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.q, other.field.q));
        }
        if self.len() != other.len() {
            return Err(Error::dim(format!(
                "vector lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let f = self.field;
        Ok(GfVector {
            field: f,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let f = self.field;
        Ok(GfVector {
            field: f,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        })
    }
}

/// A dense matrix over `F_q`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GfMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl GfMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        GfMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, k: usize) -> Self {
        let mut m = Self::zeros(field, k, k);
        for i in 0..k {
            m.data[i * k + i] = 1;
        }
        m
    }

    pub fn from_row_major(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        for &e in &data {
            field.check(e)?;
        }
        Ok(GfMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dim("ragged matrix rows"));
        }
        Self::from_row_major(field, rows.len(), cols, rows.concat())
    }

    /// The `index`-th `k x k` matrix in row-major base-`q` order.
    pub fn from_index(field: PrimeField, k: usize, index: usize) -> Self {
        let v = GfVector::from_index(field, k * k, index);
        GfMatrix {
            field,
            rows: k,
            cols: k,
            data: v.entries,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row_major(&self) -> &[u32] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: u32) -> Result<()> {
        self.field.check(value)?;
        self.data[r * self.cols + c] = value;
        Ok(())
    }

    pub fn mul(&self, other: &GfMatrix) -> Result<GfMatrix> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.q, other.field.q));
        }
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = GfMatrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `M v`.
    pub fn apply(&self, v: &GfVector) -> Result<GfVector> {
        if self.field != v.field {
            return Err(Error::ModulusMismatch(self.field.q, v.field.q));
        }
        if self.cols != v.len() {
            return Err(Error::dim(format!(
                "{}x{} matrix applied to length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let f = self.field;
        let entries = (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(0u32, |acc, j| f.add(acc, f.mul(self.get(i, j), v.entries[j])))
            })
            .collect();
        Ok(GfVector { field: f, entries })
    }

    /// Applies the matrix to the vector encoded by `index`.
    pub fn apply_index(&self, index: usize) -> usize {
        let v = GfVector::from_index(self.field, self.cols, index);
        self.apply(&v).expect("dimensions agree by construction").to_index()
    }

    /// Row-reduces a copy; returns (determinant, rank) for square input and
    /// rank alone otherwise.
    fn eliminate(&self, mut augment: Option<&mut GfMatrix>) -> (u32, usize) {
        let f = self.field;
        let mut a = self.clone();
        let mut det = 1u32;
        let mut rank = 0usize;
        for col in 0..a.cols {
            let Some(pivot) = (rank..a.rows).find(|&r| a.get(r, col) != 0) else {
                det = 0;
                continue;
            };
            if pivot != rank {
                a.swap_rows(pivot, rank);
                if let Some(aug) = augment.as_deref_mut() {
                    aug.swap_rows(pivot, rank);
                }
                det = f.neg(det);
            }
            let p = a.get(rank, col);
            det = f.mul(det, p);
            let p_inv = f.inv(p).expect("pivot is nonzero");
            a.scale_row(rank, p_inv);
            if let Some(aug) = augment.as_deref_mut() {
                aug.scale_row(rank, p_inv);
            }
            for r in 0..a.rows {
                if r == rank {
                    continue;
                }
                let factor = a.get(r, col);
                if factor != 0 {
                    a.axpy_row(r, rank, factor);
                    if let Some(aug) = augment.as_deref_mut() {
                        aug.axpy_row(r, rank, factor);
                    }
                }
            }
            rank += 1;
        }
        if rank < a.rows {
            det = 0;
        }
        (det, rank)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: u32) {
        for c in 0..self.cols {
            let idx = r * self.cols + c;
            self.data[idx] = self.field.mul(self.data[idx], s);
        }
    }

    // row[target] -= factor * row[source]
    fn axpy_row(&mut self, target: usize, source: usize, factor: u32) {
        let f = self.field;
        for c in 0..self.cols {
            let s = self.data[source * self.cols + c];
            let idx = target * self.cols + c;
            self.data[idx] = f.sub(self.data[idx], f.mul(factor, s));
        }
    }

    pub fn determinant(&self) -> Result<u32> {
        if !self.is_square() {
            return Err(Error::dim("determinant of a non-square matrix"));
        }
        Ok(self.eliminate(None).0)
    }

    pub fn rank(&self) -> usize {
        self.eliminate(None).1
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.eliminate(None).1 == self.rows
    }

    /// Inverse by Gauss-Jordan elimination on `[M | I]`.
    pub fn inverse(&self) -> Result<GfMatrix> {
        if !self.is_square() {
            return Err(Error::dim("inverse of a non-square matrix"));
        }
        let mut inv = GfMatrix::identity(self.field, self.rows);
        let (_, rank) = self.eliminate(Some(&mut inv));
        if rank < self.rows {
            return Err(Error::Singular);
        }
        Ok(inv)
    }
}

/// `|GL(k, q)| = prod_{i<k} (q^k - q^i)`, saturating.
pub fn gl_order(k: usize, q: u32) -> u128 {
    let qk = guard::pow_sat(q as u128, k as u32);
    (0..k as u32).fold(1u128, |acc, i| {
        acc.saturating_mul(qk - guard::pow_sat(q as u128, i))
    })
}

/// Draws a uniform element of `GL(k, q)` by rejection.
pub fn sample_gl<R: Rng + ?Sized>(k: usize, field: PrimeField, rng: &mut R) -> Result<GfMatrix> {
    if k == 0 {
        return Err(Error::arg("GL(0, q) is not sampled"));
    }
    loop {
        let data = (0..k * k).map(|_| rng.gen_range(0..field.q)).collect();
        let m = GfMatrix {
            field,
            rows: k,
            cols: k,
            data,
        };
        if m.is_invertible() {
            return Ok(m);
        }
    }
}

/// Lists `GL(k, q)` in row-major index order.
pub fn enumerate_gl(k: usize, field: PrimeField) -> Result<Vec<GfMatrix>> {
    if k == 0 {
        return Err(Error::arg("GL(0, q) is not enumerated"));
    }
    let candidates = guard::pow_sat(field.q as u128, (k * k) as u32);
    guard::check("gl-candidates", candidates, guard::GL_CANDIDATES)?;
    Ok((0..candidates as usize)
        .map(|i| GfMatrix::from_index(field, k, i))
        .filter(GfMatrix::is_invertible)
        .collect())
}
