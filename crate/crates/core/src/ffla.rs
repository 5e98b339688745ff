//! Dense linear algebra over a prime field `F_p`, plus seeded sampling of
//! points and fiber quotients.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRIME: u64 = 2_147_483_647;

/// A prime modulus `2^16 <= p < 2^32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u64,
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self { p: DEFAULT_PRIME }
    }
}

impl FieldSpec {
    pub fn new(p: u64) -> Result<Self> {
        if !((1 << 16)..(1 << 32)).contains(&p) {
            return Err(Error::Domain(format!(
                "modulus {p} outside the supported range [2^16, 2^32)"
            )));
        }
        if !is_prime(p) {
            return Err(Error::Domain(format!("modulus {p} is not prime")));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p), "inverse of zero");
        self.pow(a, self.p - 2)
    }

    /// Reduce a signed integer into `[0, p)`.
    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Row-major dense matrix over `F_p`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "FpMatrix {}x{} mod {}",
            self.rows, self.cols, self.field.p
        )?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FpMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Entries are reduced mod `p`.
    pub fn from_rows(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        entries: Vec<u64>,
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let p = field.p;
        let entries = entries.into_iter().map(|e| e % p).collect();
        Ok(Self {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_i64_rows(field: FieldSpec, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            entries.extend(row.iter().map(|&v| field.from_i64(v)));
        }
        Ok(Self {
            field,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        debug_assert!(v < self.field.p);
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn mul(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != rhs.rows || self.field != rhs.field {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * out.cols + j;
                    out.entries[idx] = f.add(out.entries[idx], f.mul(a, rhs.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Self {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Place `other`'s columns to the right of `self`.
    pub fn hstack(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            entries.extend_from_slice(self.row(r));
            entries.extend_from_slice(other.row(r));
        }
        Ok(Self {
            field: self.field,
            rows: self.rows,
            cols,
            entries,
        })
    }

    /// Sub-matrix made of the given rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> FpMatrix {
        let mut entries = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            entries.extend_from_slice(self.row(r));
        }
        Self {
            field: self.field,
            rows: rows.len(),
            cols: self.cols,
            entries,
        }
    }

    /// Reduced row echelon form; returns the pivot column of each nonzero row.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..cols {
            if lead == self.rows {
                break;
            }
            let Some(pr) = (lead..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            if pr != lead {
                for j in 0..cols {
                    self.entries.swap(pr * cols + j, lead * cols + j);
                }
            }
            let inv = f.inv(self.get(lead, c));
            for j in c..cols {
                let idx = lead * cols + j;
                self.entries[idx] = f.mul(self.entries[idx], inv);
            }
            let (before, rest) = self.entries.split_at_mut(lead * cols);
            let (pivot_row, after) = rest.split_at_mut(cols);
            let eliminate = |row: &mut [u64]| {
                let factor = row[c];
                if factor == 0 {
                    return;
                }
                for j in c..cols {
                    if pivot_row[j] != 0 {
                        row[j] = f.sub(row[j], f.mul(factor, pivot_row[j]));
                    }
                }
            };
            before.chunks_mut(cols).for_each(eliminate);
            after.chunks_mut(cols).for_each(eliminate);
            pivots.push(c);
            lead += 1;
        }
        pivots
    }
}

/// Rank over `F_p`.
pub fn rank(m: &FpMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    // eliminate along the shorter side
    let mut work = if m.rows > m.cols {
        m.transpose()
    } else {
        m.clone()
    };
    work.rref().len()
}

/// Rows of the result form a basis of `{ v : m·v = 0 }`.
pub fn kernel_basis(m: &FpMatrix) -> FpMatrix {
    let f = m.field;
    let mut work = m.clone();
    let pivots = work.rref();
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..m.cols).filter(|&c| !is_pivot[c]).collect();
    let mut out = FpMatrix::zeros(f, free.len(), m.cols);
    for (k, &fc) in free.iter().enumerate() {
        out.set(k, fc, 1);
        for (r, &pc) in pivots.iter().enumerate() {
            out.set(k, pc, f.neg(work.get(r, fc)));
        }
    }
    out
}

/// A point of `P^n` with its first nonzero coordinate equal to 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProjectivePoint {
    n: u32,
    coords: Vec<u64>,
}

impl ProjectivePoint {
    /// Normalizes any nonzero representative.
    pub fn new(field: FieldSpec, coords: Vec<u64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Domain(
                "a projective point needs n+1 >= 2 coordinates".into(),
            ));
        }
        let p = field.modulus();
        let mut coords: Vec<u64> = coords.into_iter().map(|c| c % p).collect();
        let Some(lead) = coords.iter().position(|&c| c != 0) else {
            return Err(Error::Domain("all homogeneous coordinates are zero".into()));
        };
        let inv = field.inv(coords[lead]);
        for c in coords.iter_mut() {
            *c = field.mul(*c, inv);
        }
        Ok(Self {
            n: coords.len() as u32 - 1,
            coords,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// Index of the coordinate normalized to 1.
    pub fn pivot(&self) -> usize {
        self.coords
            .iter()
            .position(|&c| c != 0)
            .expect("nonzero point")
    }
}

pub fn random_point<R: Rng + ?Sized>(field: FieldSpec, n: u32, rng: &mut R) -> ProjectivePoint {
    assert!(n >= 1, "random_point requires n >= 1");
    let p = field.modulus();
    loop {
        let coords: Vec<u64> = (0..=n).map(|_| rng.gen_range(0..p)).collect();
        if let Ok(pt) = ProjectivePoint::new(field, coords) {
            return pt;
        }
    }
}

pub fn random_points<R: Rng + ?Sized>(
    field: FieldSpec,
    n: u32,
    count: usize,
    rng: &mut R,
) -> Vec<ProjectivePoint> {
    (0..count).map(|_| random_point(field, n, rng)).collect()
}

/// A uniformly random full-rank `to_dim × from_dim` matrix.
pub fn random_surjection<R: Rng + ?Sized>(
    field: FieldSpec,
    from_dim: usize,
    to_dim: usize,
    rng: &mut R,
) -> Result<FpMatrix> {
    if to_dim > from_dim {
        return Err(Error::Domain(format!(
            "no surjection from dimension {from_dim} onto {to_dim}"
        )));
    }
    let p = field.modulus();
    loop {
        let entries = (0..to_dim * from_dim)
            .map(|_| rng.gen_range(0..p))
            .collect();
        let m = FpMatrix::from_rows(field, to_dim, from_dim, entries)?;
        if rank(&m) == to_dim {
            return Ok(m);
        }
    }
}
