//! Exact arithmetic and linear algebra over `Z_d` for odd `d`.
//!
//! Every stored value is reduced into `[0, d)`. Negative or fractional
//! constants are realized through modular inverses, so `-1/2` becomes
//! `(d - 1) * inv(2)`.

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Qudit dimension `d` and qudit count `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Dim {
    d: u64,
    n: usize,
}

impl Dim {
    pub fn new(d: u64, n: usize) -> Result<Self> {
        if d < 3 || d.is_multiple_of(2) || d > u32::MAX as u64 {
            return Err(Error::BadDimension(d));
        }
        if n == 0 {
            return Err(Error::BadQuditCount);
        }
        Ok(Self { d, n })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Hilbert space dimension `d^n`.
    pub fn hilbert_size(&self) -> usize {
        (self.d as usize).pow(self.n as u32)
    }

    /// Number of phase-space points `d^(2n)`, saturating.
    pub fn phase_space_points(&self) -> u128 {
        (self.d as u128).saturating_pow(2 * self.n as u32)
    }

    /// Fails with `SizeLimitExceeded` when `d^(2n)` is above `cap`.
    pub fn check_phase_space(&self, cap: u128) -> Result<usize> {
        let required = self.phase_space_points();
        if required > cap {
            return Err(Error::SizeLimitExceeded { required, cap });
        }
        Ok(required as usize)
    }

    /// `inv(2)`, i.e. `(d + 1) / 2`.
    pub fn half(&self) -> u64 {
        self.d.div_ceil(2)
    }

    pub fn with_qudits(&self, n: usize) -> Result<Self> {
        Self::new(self.d, n)
    }
}

/// Reduces any integer into `[0, d)`.
pub fn reduce(a: i64, d: u64) -> u64 {
    (a as i128).rem_euclid(d as i128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, d: u64) -> u64 {
    ((a as u128 * b as u128) % d as u128) as u64
}

pub(crate) fn add_mod(a: u64, b: u64, d: u64) -> u64 {
    ((a as u128 + b as u128) % d as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, d: u64) -> u64 {
    add_mod(a, d - b % d, d)
}

/// Symmetric representative of `a` in `(-d/2, d/2]`.
pub fn lift_symmetric(a: u64, d: u64) -> i64 {
    let a = a % d;
    if 2 * a > d {
        a as i64 - d as i64
    } else {
        a as i64
    }
}

/// Extended Euclid over the integers: returns `(g, s, t)` with `s*a + t*b = g >= 0`.
pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    ext_gcd(a as i128, b as i128).0 as u64
}

/// Multiplicative inverse of `a` modulo `d`.
pub fn inv(a: i64, d: u64) -> Result<u64> {
    let a = reduce(a, d);
    let (g, s, _) = ext_gcd(a as i128, d as i128);
    if g != 1 {
        return Err(Error::NotInvertible { value: a, modulus: d });
    }
    Ok(s.rem_euclid(d as i128) as u64)
}

/// Vector over `Z_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZdVector {
    d: u64,
    entries: Vec<u64>,
}

impl ZdVector {
    pub fn zeros(len: usize, d: u64) -> Self {
        Self { d, entries: vec![0; len] }
    }

    pub fn from_i64(values: &[i64], d: u64) -> Self {
        Self { d, entries: values.iter().map(|&v| reduce(v, d)).collect() }
    }

    pub fn from_u64(values: Vec<u64>, d: u64) -> Self {
        Self { d, entries: values.into_iter().map(|v| v % d).collect() }
    }

    pub fn modulus(&self) -> u64 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> u64 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, v: i64) {
        self.entries[i] = reduce(v, self.d);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let d = self.d;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| add_mod(a, b, d)).collect();
        Ok(Self { d, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let d = self.d;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| sub_mod(a, b, d)).collect();
        Ok(Self { d, entries })
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = reduce(k, self.d);
        Self { d: self.d, entries: self.entries.iter().map(|&a| mul_mod(a, k, self.d)).collect() }
    }

    pub fn dot(&self, other: &Self) -> Result<u64> {
        self.check_len(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0, |acc, (&a, &b)| add_mod(acc, mul_mod(a, b, self.d), self.d)))
    }

    /// Position of this vector in the lexicographic enumeration of `(Z_d)^len`
    /// with entry 0 most significant.
    pub fn index(&self) -> usize {
        point_index(&self.entries, self.d)
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.entries.len() != other.entries.len() || self.d != other.d {
            return Err(Error::ShapeMismatch(format!(
                "vectors of length {} and {}",
                self.entries.len(),
                other.entries.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ZdVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for ZdVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

/// Digits of `index` in base `d`, most significant first.
pub fn point_from_index(mut index: usize, d: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (index % d as usize) as u64;
        index /= d as usize;
    }
    out
}

pub fn point_index(entries: &[u64], d: u64) -> usize {
    entries.iter().fold(0usize, |acc, &v| acc * d as usize + v as usize)
}

/// Dense matrix over `Z_d`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZdMatrix {
    d: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ZdMatrix {
    pub fn zeros(rows: usize, cols: usize, d: u64) -> Self {
        Self { d, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(size: usize, d: u64) -> Self {
        let mut m = Self::zeros(size, size, d);
        for i in 0..size {
            m.data[i * size + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry.
    pub fn from_rows(rows: &[Vec<i64>], d: u64) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| reduce(v, d)).collect();
        Ok(Self { d, rows: rows.len(), cols, data })
    }

    pub fn modulus(&self) -> u64 {
        self.d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = reduce(v, self.d);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.d);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let d = self.d;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| add_mod(a, b, d)).collect();
        Ok(Self { data, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let d = self.d;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| sub_mod(a, b, d)).collect();
        Ok(Self { data, ..*self })
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = reduce(k, self.d);
        let data = self.data.iter().map(|&a| mul_mod(a, k, self.d)).collect();
        Self { data, ..*self }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows || self.d != other.d {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let d = self.d as u128;
        let mut out = Self::zeros(self.rows, other.cols, self.d);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0u128;
                for k in 0..self.cols {
                    acc = (acc + self.get(r, k) as u128 * other.get(k, c) as u128) % d;
                }
                out.data[r * other.cols + c] = acc as u64;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &ZdVector) -> Result<ZdVector> {
        if self.cols != v.len() || self.d != v.modulus() {
            return Err(Error::ShapeMismatch(format!(
                "cannot apply {}x{} matrix to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let d = self.d as u128;
        let entries = (0..self.rows)
            .map(|r| {
                self.row(r).iter().zip(v.entries()).fold(0u128, |acc, (&a, &b)| (acc + a as u128 * b as u128) % d)
                    as u64
            })
            .collect();
        Ok(ZdVector { d: self.d, entries })
    }

    /// Determinant modulo `d`.
    pub fn det(&self) -> Result<u64> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        let mut work = self.clone();
        let mut shadow = Self::zeros(self.rows, 0, self.d);
        work.triangularize(&mut shadow);
        Ok((0..self.rows).fold(1, |acc, i| mul_mod(acc, work.get(i, i), self.d)))
    }

    /// Inverse over `Z_d`; fails with `NotInvertible` when `det` is not a unit.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let size = self.rows;
        let d = self.d;
        let mut work = self.clone();
        let mut inv_acc = Self::identity(size, d);
        work.triangularize(&mut inv_acc);
        for c in 0..size {
            let pivot = work.get(c, c);
            let pinv = inv(pivot as i64, d).map_err(|_| Error::NotInvertible { value: self.det_of_triangular(&work), modulus: d })?;
            work.scale_row(c, pinv);
            inv_acc.scale_row(c, pinv);
            for r in 0..size {
                if r != c {
                    let f = work.get(r, c);
                    if f != 0 {
                        work.axpy_row(r, c, d - f);
                        inv_acc.axpy_row(r, c, d - f);
                    }
                }
            }
        }
        Ok(inv_acc)
    }

    fn det_of_triangular(&self, work: &Self) -> u64 {
        (0..self.rows).fold(1, |acc, i| mul_mod(acc, work.get(i, i), self.d))
    }

    /// Row echelon form by unimodular row operations, mirrored onto `shadow`.
    /// Returns the pivot columns, one per nonzero row in order.
    fn echelon(&mut self, shadow: &mut Self, square_only: bool) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..self.cols {
            if row >= self.rows {
                break;
            }
            for r in row + 1..self.rows {
                if self.get(r, c) != 0 {
                    self.combine_rows(row, r, c, shadow);
                }
            }
            if self.get(row, c) != 0 {
                pivots.push(c);
                row += 1;
            } else if square_only {
                // keep the diagonal aligned with columns; a zero here means singular
                row += 1;
            }
        }
        pivots
    }

    fn triangularize(&mut self, shadow: &mut Self) {
        self.echelon(shadow, true);
    }

    /// Replaces rows `a`, `b` by a unimodular combination that zeroes `b` at column `c`.
    fn combine_rows(&mut self, a: usize, b: usize, c: usize, shadow: &mut Self) {
        let d = self.d as i128;
        let x = self.get(a, c) as i128;
        let y = self.get(b, c) as i128;
        let (g, s, t) = ext_gcd(x, y);
        let (u, v) = (x / g, y / g);
        let apply = |m: &mut Self| {
            for k in 0..m.cols {
                let ra = m.get(a, k) as i128;
                let rb = m.get(b, k) as i128;
                m.data[a * m.cols + k] = (s * ra + t * rb).rem_euclid(d) as u64;
                m.data[b * m.cols + k] = (-v * ra + u * rb).rem_euclid(d) as u64;
            }
        };
        apply(self);
        apply(shadow);
    }

    fn scale_row(&mut self, r: usize, k: u64) {
        for c in 0..self.cols {
            self.data[r * self.cols + c] = mul_mod(self.data[r * self.cols + c], k, self.d);
        }
    }

    /// row[dst] += k * row[src]
    fn axpy_row(&mut self, dst: usize, src: usize, k: u64) {
        for c in 0..self.cols {
            let v = mul_mod(self.get(src, c), k, self.d);
            self.data[dst * self.cols + c] = add_mod(self.data[dst * self.cols + c], v, self.d);
        }
    }

    /// Copies `block` into this matrix at the given row and column indices.
    pub fn embed(&mut self, block: &Self, rows: &[usize], cols: &[usize]) {
        for (bi, &r) in rows.iter().enumerate() {
            for (bj, &c) in cols.iter().enumerate() {
                self.data[r * self.cols + c] = block.get(bi, bj);
            }
        }
    }

    /// Extracts the sub-matrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len(), self.d);
        for (bi, &r) in rows.iter().enumerate() {
            for (bj, &c) in cols.iter().enumerate() {
                out.data[bi * cols.len() + bj] = self.get(r, c);
            }
        }
        out
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() || self.d != other.d {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ZdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Serialized as a list of rows.
impl Serialize for ZdMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for r in 0..self.rows {
            seq.serialize_element(self.row(r))?;
        }
        seq.end()
    }
}

/// Matrix inverse over `Z_d`.
pub fn mat_inv(m: &ZdMatrix) -> Result<ZdMatrix> {
    m.inverse()
}

/// The symplectic form `J = [[0, -I_n], [I_n, 0]]`.
pub fn symplectic_form(n: usize, d: u64) -> ZdMatrix {
    let mut j = ZdMatrix::zeros(2 * n, 2 * n, d);
    for i in 0..n {
        j.set(i, n + i, -1);
        j.set(n + i, i, 1);
    }
    j
}

/// True iff `MᵀJM = J` over `Z_d`.
pub fn is_symplectic(m: &ZdMatrix) -> Result<bool> {
    if !m.is_square() || !m.rows().is_multiple_of(2) {
        return Err(Error::ShapeMismatch(format!("{}x{} is not a phase-space matrix", m.rows(), m.cols())));
    }
    let j = symplectic_form(m.rows() / 2, m.modulus());
    Ok(m.transpose().mul(&j)?.mul(m)? == j)
}

/// `M⁻¹ = -J Mᵀ J` for symplectic `M`.
pub fn symplectic_inverse(m: &ZdMatrix) -> Result<ZdMatrix> {
    let j = symplectic_form(m.rows() / 2, m.modulus());
    Ok(j.mul(&m.transpose())?.mul(&j)?.neg())
}

/// Symplectic product `aᵀ J b`.
pub fn symplectic_product(a: &ZdVector, b: &ZdVector) -> Result<u64> {
    if !a.len().is_multiple_of(2) || a.len() != b.len() {
        return Err(Error::ShapeMismatch("symplectic product needs equal even lengths".into()));
    }
    let n = a.len() / 2;
    let d = a.modulus();
    let mut acc = 0;
    for i in 0..n {
        // aᵀJb = -a_p·b_q + a_q·b_p
        acc = sub_mod(acc, mul_mod(a.get(i), b.get(n + i), d), d);
        acc = add_mod(acc, mul_mod(a.get(n + i), b.get(i), d), d);
    }
    Ok(acc)
}

/// All `x` with `Φx = r`, by brute-force enumeration of `(Z_d)^cols`.
pub fn solve_affine(phi: &ZdMatrix, r: &ZdVector, cap: u128) -> Result<Vec<ZdVector>> {
    check_system(phi, r)?;
    let d = phi.modulus();
    let len = phi.cols();
    let required = (d as u128).saturating_pow(len as u32);
    if required > cap {
        return Err(Error::SizeLimitExceeded { required, cap });
    }
    let mut out = Vec::new();
    for idx in 0..required as usize {
        let x = ZdVector { d, entries: point_from_index(idx, d, len) };
        if phi.mul_vec(&x)? == *r {
            out.push(x);
        }
    }
    Ok(out)
}

/// Same solution set as [`solve_affine`], found by echelon reduction and
/// back-substitution. Work scales with the number of solutions rather than
/// with `d^cols`. Solutions come out in lexicographic order.
pub fn solve_affine_echelon(phi: &ZdMatrix, r: &ZdVector) -> Result<Vec<ZdVector>> {
    check_system(phi, r)?;
    let d = phi.modulus();
    let mut a = phi.clone();
    let mut rhs = ZdMatrix::zeros(phi.rows(), 1, d);
    for i in 0..r.len() {
        rhs.data[i] = r.get(i);
    }
    let pivots = a.echelon(&mut rhs, false);
    if (pivots.len()..a.rows()).any(|row| rhs.get(row, 0) != 0) {
        return Ok(Vec::new());
    }
    let mut pivot_row = vec![None; a.cols()];
    for (row, &c) in pivots.iter().enumerate() {
        pivot_row[c] = Some(row);
    }
    let mut out = Vec::new();
    let mut x = vec![0u64; a.cols()];
    back_substitute(&a, &rhs, &pivot_row, a.cols(), &mut x, &mut out);
    out.sort_by_key(ZdVector::index);
    Ok(out)
}

fn back_substitute(
    a: &ZdMatrix,
    rhs: &ZdMatrix,
    pivot_row: &[Option<usize>],
    remaining: usize,
    x: &mut Vec<u64>,
    out: &mut Vec<ZdVector>,
) {
    let d = a.modulus();
    if remaining == 0 {
        out.push(ZdVector { d, entries: x.clone() });
        return;
    }
    let c = remaining - 1;
    match pivot_row[c] {
        None => {
            for v in 0..d {
                x[c] = v;
                back_substitute(a, rhs, pivot_row, c, x, out);
            }
        }
        Some(row) => {
            let target = (c + 1..a.cols()).fold(rhs.get(row, 0), |t, j| sub_mod(t, mul_mod(a.get(row, j), x[j], d), d));
            let g = a.get(row, c);
            let h = gcd(g, d);
            if !target.is_multiple_of(h) {
                return;
            }
            let reduced = d / h;
            let base = if reduced == 1 {
                0
            } else {
                mul_mod((target / h) % reduced, inv((g / h) as i64, reduced).expect("coprime after gcd"), reduced)
            };
            for k in 0..h {
                x[c] = base + k * reduced;
                back_substitute(a, rhs, pivot_row, c, x, out);
            }
        }
    }
}

fn check_system(phi: &ZdMatrix, r: &ZdVector) -> Result<()> {
    if phi.rows() != r.len() || phi.modulus() != r.modulus() {
        return Err(Error::ShapeMismatch(format!("{}x{} system with rhs of length {}", phi.rows(), phi.cols(), r.len())));
    }
    Ok(())
}
