//! Phase-space description of gates as affine symplectic maps with quadratic
//! center generating functions.
//!
//! A harmonic gate acts on centers as `x' = M(x + α/2) + α/2`, stored here as
//! `x' = Mx + b` with `b = (M + I)α/2`. Its center generating function is
//! `S(x) = xᵀBx + xᵀJα` with `JB = (I + M)⁻¹(I - M)`, and its center
//! representation is proportional to `ω^{S(x)}`.
//!
//! Two copies of the catalog data exist. The `Z_d` copy (with `1/2 -> inv(2)`)
//! supports composition and the stabilizer backend. The exact rational copy
//! keeps the fractions as fractions and evaluates `S` on integer lifts of the
//! grid. That copy is what separates the T gate from the Clifford gates: its
//! action is not periodic on the grid.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Serialize, Serializer};

use crate::dense::{GateKind, GateSpec, RootTable};
use crate::weyl::CenterTable;
use crate::zmod::{inv, lift_symmetric, point_from_index, reduce, symplectic_form, Dim, ZdMatrix, ZdVector};
use crate::{Error, Result};

/// Truncation order of the semiclassical propagator a gate needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HbarOrder {
    /// One classical branch per center: Clifford.
    Zero,
    /// A finite sum of reflections: non-Clifford.
    One,
}

impl HbarOrder {
    pub fn as_u8(self) -> u8 {
        match self {
            HbarOrder::Zero => 0,
            HbarOrder::One => 1,
        }
    }
}

impl Serialize for HbarOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

/// `x' = Mx + b` over `Z_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineSymplecticMap {
    linear: ZdMatrix,
    offset: ZdVector,
}

impl AffineSymplecticMap {
    pub fn new(linear: ZdMatrix, offset: ZdVector) -> Result<Self> {
        let size = linear.rows();
        if !linear.is_square() || size != offset.len() || !size.is_multiple_of(2) || linear.modulus() != offset.modulus() {
            return Err(Error::ShapeMismatch(format!("{size}x{} map with offset of length {}", linear.cols(), offset.len())));
        }
        Ok(Self { linear, offset })
    }

    /// Builds the map from `M` and `α` via `b = (M + I)α/2`.
    pub fn from_alpha(linear: ZdMatrix, alpha: &ZdVector) -> Result<Self> {
        let d = linear.modulus();
        let id = ZdMatrix::identity(linear.rows(), d);
        let offset = linear.add(&id)?.mul_vec(alpha)?.scale(inv(2, d)? as i64);
        Self::new(linear, offset)
    }

    pub fn identity(dim: Dim) -> Self {
        let size = 2 * dim.n();
        Self { linear: ZdMatrix::identity(size, dim.d()), offset: ZdVector::zeros(size, dim.d()) }
    }

    /// Pure translation by `chord`.
    pub fn translation(chord: ZdVector) -> Self {
        Self { linear: ZdMatrix::identity(chord.len(), chord.modulus()), offset: chord }
    }

    pub fn matrix(&self) -> &ZdMatrix {
        &self.linear
    }

    pub fn offset(&self) -> &ZdVector {
        &self.offset
    }

    pub fn modulus(&self) -> u64 {
        self.linear.modulus()
    }

    /// `α = 2(M + I)⁻¹ b`.
    pub fn alpha(&self) -> Result<ZdVector> {
        let d = self.modulus();
        let shifted = self.linear.add(&ZdMatrix::identity(self.linear.rows(), d))?;
        let inverse = shifted.inverse().map_err(|_| Error::CayleySingular(d))?;
        Ok(inverse.mul_vec(&self.offset)?.scale(2))
    }

    pub fn apply(&self, x: &ZdVector) -> Result<ZdVector> {
        self.linear.mul_vec(x)?.add(&self.offset)
    }

    /// `x = M⁻¹(x' - b)`.
    pub fn inverse(&self) -> Result<Self> {
        let linear = crate::zmod::symplectic_inverse(&self.linear)?;
        let offset = linear.mul_vec(&self.offset)?.scale(-1);
        Ok(Self { linear, offset })
    }

    pub fn is_symplectic(&self) -> bool {
        crate::zmod::is_symplectic(&self.linear).unwrap_or(false)
    }
}

impl fmt::Display for AffineSymplecticMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M =\n{}b = {}", self.linear, self.offset)
    }
}

/// `(f ∘ g)(x) = f(g(x))`.
pub fn compose_maps(f: &AffineSymplecticMap, g: &AffineSymplecticMap) -> Result<AffineSymplecticMap> {
    let m = f.linear.mul(&g.linear)?;
    let b = f.linear.mul_vec(&g.offset)?.add(&f.offset)?;
    AffineSymplecticMap::new(m, b)
}

/// `S(x) = xᵀBx + xᵀJα` over `Z_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticAction {
    matrix: ZdMatrix,
    alpha: ZdVector,
}

impl QuadraticAction {
    pub fn new(b: ZdMatrix, alpha: ZdVector) -> Result<Self> {
        if !b.is_symmetric() {
            return Err(Error::ShapeMismatch("action matrix B must be symmetric".into()));
        }
        if b.rows() != alpha.len() || !b.rows().is_multiple_of(2) {
            return Err(Error::ShapeMismatch(format!("{}x{} action with α of length {}", b.rows(), b.cols(), alpha.len())));
        }
        Ok(Self { matrix: b, alpha })
    }

    pub fn zero(dim: Dim) -> Self {
        let size = 2 * dim.n();
        Self { matrix: ZdMatrix::zeros(size, size, dim.d()), alpha: ZdVector::zeros(size, dim.d()) }
    }

    /// The action of a harmonic map, with `B` from the Cayley parameterization.
    pub fn from_map(map: &AffineSymplecticMap) -> Result<Self> {
        Self::new(cayley_b_from_m(map.matrix())?, map.alpha()?)
    }

    pub fn matrix(&self) -> &ZdMatrix {
        &self.matrix
    }

    pub fn alpha(&self) -> &ZdVector {
        &self.alpha
    }

    /// Linear coefficients `Jα`.
    pub fn linear(&self) -> ZdVector {
        let n = self.alpha.len() / 2;
        symplectic_form(n, self.alpha.modulus()).mul_vec(&self.alpha).expect("shapes checked at construction")
    }
}

/// `S(x) mod d`.
pub fn action_eval(a: &QuadraticAction, x: &ZdVector) -> Result<u64> {
    let bx = a.matrix.mul_vec(x)?;
    let quad = x.dot(&bx)?;
    let lin = a.linear().dot(x)?;
    Ok((quad + lin) % x.modulus())
}

/// Table of `ω^{S(x)}` over all centers.
pub fn center_function_from_action(a: &QuadraticAction, dim: Dim) -> Result<CenterTable> {
    dim.check_phase_space(crate::DEFAULT_ENUMERATION_CAP)?;
    if a.matrix.rows() != 2 * dim.n() || a.matrix.modulus() != dim.d() {
        return Err(Error::ShapeMismatch("action does not match the dimension".into()));
    }
    let omega = RootTable::new(dim.d());
    let values = (0..dim.phase_space_points() as usize)
        .map(|idx| {
            let x = ZdVector::from_u64(point_from_index(idx, dim.d(), 2 * dim.n()), dim.d());
            action_eval(a, &x).map(|s| omega.pow_u(s))
        })
        .collect::<Result<Vec<_>>>()?;
    CenterTable::new(dim, values)
}

/// `B = -J(I + M)⁻¹(I - M)`, the Cayley parameterization `JB = (I + M)⁻¹(I - M)`.
pub fn cayley_b_from_m(m: &ZdMatrix) -> Result<ZdMatrix> {
    let d = m.modulus();
    let size = m.rows();
    let id = ZdMatrix::identity(size, d);
    let plus_inv = id.add(m)?.inverse().map_err(|_| Error::CayleySingular(d))?;
    let j = symplectic_form(size / 2, d);
    j.mul(&plus_inv)?.mul(&id.sub(m)?)?.neg().pipe(Ok)
}

/// `M = (I - JB)(I + JB)⁻¹`, inverting [`cayley_b_from_m`].
pub fn cayley_m_from_b(b: &ZdMatrix) -> Result<ZdMatrix> {
    let d = b.modulus();
    let size = b.rows();
    let id = ZdMatrix::identity(size, d);
    let jb = symplectic_form(size / 2, d).mul(b)?;
    let plus_inv = id.add(&jb)?.inverse().map_err(|_| Error::CayleySingular(d))?;
    id.sub(&jb)?.mul(&plus_inv)
}

trait Pipe: Sized {
    fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
        f(self)
    }
}
impl<T> Pipe for T {}

/// `H(z) = zᵀ Q z + l·z` with `z = (p, q)`; `Q` is `quadratic`, `l` is `linear`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticHamiltonian {
    pub quadratic: ZdMatrix,
    pub linear: ZdVector,
}

impl QuadraticHamiltonian {
    pub fn new(quadratic: ZdMatrix, linear: ZdVector) -> Result<Self> {
        if !quadratic.is_symmetric() || quadratic.rows() != linear.len() || !quadratic.rows().is_multiple_of(2) {
            return Err(Error::ShapeMismatch("quadratic part must be symmetric 2n x 2n and match the linear part".into()));
        }
        Ok(Self { quadratic, linear })
    }

    /// Builds `H` from monomials `(coefficient, i, j)` meaning `c·z_i·z_j`, plus a linear part.
    pub fn from_terms(dim: Dim, quadratic: &[(i64, usize, usize)], linear: &[(i64, usize)]) -> Result<Self> {
        let d = dim.d();
        let size = 2 * dim.n();
        let h = dim.half() as i64;
        let mut h2 = ZdMatrix::zeros(size, size, d);
        for &(c, i, j) in quadratic {
            if i == j {
                h2.set(i, i, h2.get(i, i) as i64 + c);
            } else {
                // split c·z_i z_j symmetrically
                let half = reduce(c, d) as i64 * h;
                h2.set(i, j, h2.get(i, j) as i64 + half);
                h2.set(j, i, h2.get(j, i) as i64 + half);
            }
        }
        let mut h1 = ZdVector::zeros(size, d);
        for &(c, i) in linear {
            h1.set(i, h1.get(i) as i64 + c);
        }
        Self::new(h2, h1)
    }
}

/// One unit Euler step `z' = z + J∇H(z)`.
pub fn discrete_eom(h: &QuadraticHamiltonian, dim: Dim) -> Result<AffineSymplecticMap> {
    let d = dim.d();
    let size = 2 * dim.n();
    if h.quadratic.rows() != size || h.quadratic.modulus() != d {
        return Err(Error::ShapeMismatch("Hamiltonian does not match the dimension".into()));
    }
    let j = symplectic_form(dim.n(), d);
    let m = ZdMatrix::identity(size, d).add(&j.mul(&h.quadratic)?.scale(2))?;
    let b = j.mul_vec(&h.linear)?;
    let map = AffineSymplecticMap::new(m, b)?;
    if !map.is_symplectic() {
        return Err(Error::NonSymplecticResult);
    }
    Ok(map)
}

/// Small dense matrix over the rationals, for the exact catalog data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational64>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational64::from_integer(0); rows * cols] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.data[i * size + i] = Rational64::from_integer(1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rational64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self { rows: rows.len(), cols, data: rows.iter().flatten().copied().collect() }
    }

    pub fn get(&self, r: usize, c: usize) -> Rational64 {
        self.data[r * self.cols + c]
    }

    fn set(&mut self, r: usize, c: usize, v: Rational64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.is_integer())
    }

    fn zip(&self, other: &Self, f: impl Fn(Rational64, Rational64) -> Rational64) -> Self {
        Self { data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(), ..*self }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let v = (0..self.cols).map(|k| self.get(r, k) * other.get(k, c)).sum();
                out.set(r, c, v);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational64]) -> Vec<Rational64> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c) * v[c]).sum()).collect()
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let size = self.rows;
        let mut a = self.clone();
        let mut out = Self::identity(size);
        for c in 0..size {
            let pivot = (c..size).find(|&r| a.get(r, c) != Rational64::from_integer(0))?;
            for k in 0..size {
                a.data.swap(c * size + k, pivot * size + k);
                out.data.swap(c * size + k, pivot * size + k);
            }
            let p = a.get(c, c);
            for k in 0..size {
                a.set(c, k, a.get(c, k) / p);
                out.set(c, k, out.get(c, k) / p);
            }
            for r in 0..size {
                let f = a.get(r, c);
                if r != c && f != Rational64::from_integer(0) {
                    for k in 0..size {
                        a.set(r, k, a.get(r, k) - f * a.get(c, k));
                        out.set(r, k, out.get(r, k) - f * out.get(c, k));
                    }
                }
            }
        }
        Some(out)
    }

    /// Reduction into `Z_d`; fractions go through modular inverses.
    pub fn to_zd(&self, d: u64) -> ZdMatrix {
        let mut m = ZdMatrix::zeros(self.rows, self.cols, d);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, rational_mod(self.get(r, c), d) as i64);
            }
        }
        m
    }

    fn embed(&self, size: usize, indices: &[usize]) -> Self {
        let mut out = Self::identity(size);
        for (bi, &r) in indices.iter().enumerate() {
            for (bj, &c) in indices.iter().enumerate() {
                out.set(r, c, self.get(bi, bj));
            }
        }
        out
    }

    fn embed_zeroed(&self, size: usize, indices: &[usize]) -> Self {
        let mut out = Self::zeros(size, size);
        for (bi, &r) in indices.iter().enumerate() {
            for (bj, &c) in indices.iter().enumerate() {
                out.set(r, c, self.get(bi, bj));
            }
        }
        out
    }
}

fn rational_symplectic_form(n: usize) -> RatMatrix {
    let mut j = RatMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j.set(i, n + i, Rational64::from_integer(-1));
        j.set(n + i, i, Rational64::from_integer(1));
    }
    j
}

/// `a/b mod d` for `b` coprime to `d`.
pub fn rational_mod(v: Rational64, d: u64) -> u64 {
    let num = reduce(*v.numer(), d);
    let den = inv(*v.denom(), d).expect("denominators are powers of two");
    crate::zmod::mul_mod(num, den, d)
}

/// The gate's map and action with fractions kept exact, evaluated on integer
/// lifts `x ∈ [0, d)^{2n}` of the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactHarmonicData {
    pub map: RatMatrix,
    pub alpha: Vec<Rational64>,
    pub action: RatMatrix,
}

impl ExactHarmonicData {
    fn new(m: RatMatrix, alpha: Vec<Rational64>) -> Self {
        let size = m.rows();
        let id = RatMatrix::identity(size);
        let plus_inv = id.add(&m).inverse().expect("catalog maps have invertible I + M");
        let j = rational_symplectic_form(size / 2);
        let zero = RatMatrix::zeros(size, size);
        let b = zero.sub(&j.mul(&plus_inv).mul(&id.sub(&m)));
        Self { map: m, alpha, action: b }
    }

    /// `S(x) = xᵀBx + xᵀJα` over the rationals.
    pub fn action_at(&self, x: &[i64]) -> Rational64 {
        let x: Vec<Rational64> = x.iter().map(|&v| Rational64::from_integer(v)).collect();
        let n = x.len() / 2;
        let bx = self.action.mul_vec(&x);
        let quad: Rational64 = x.iter().zip(&bx).map(|(a, b)| a * b).sum();
        let j_alpha = rational_symplectic_form(n).mul_vec(&self.alpha);
        let lin: Rational64 = x.iter().zip(&j_alpha).map(|(a, b)| a * b).sum();
        quad + lin
    }

    /// `e^{2πi S(x)/d}` over the grid, `x` lifted to `[0, d)`.
    pub fn center_function(&self, dim: Dim) -> Result<CenterTable> {
        dim.check_phase_space(crate::DEFAULT_ENUMERATION_CAP)?;
        let d = dim.d();
        let values = (0..dim.phase_space_points() as usize)
            .map(|idx| {
                let x: Vec<i64> = point_from_index(idx, d, 2 * dim.n()).into_iter().map(|v| v as i64).collect();
                let s = self.action_at(&x);
                let turns = (*s.numer() as f64 / *s.denom() as f64) / d as f64;
                Complex64::from_polar(1.0, std::f64::consts::TAU * turns.rem_euclid(1.0))
            })
            .collect();
        CenterTable::new(dim, values)
    }

    /// True iff `M` is integral and `S` is integral and `d`-periodic on the
    /// lattice, i.e. equivalent centers carry equivalent actions.
    pub fn preserves_grid(&self, d: u64) -> bool {
        if !self.map.is_integral() {
            return false;
        }
        let size = self.map.rows();
        let dd = Rational64::from_integer(d as i64);
        let cells = (d as usize).pow(size as u32);
        (0..cells).all(|idx| {
            let x: Vec<i64> = point_from_index(idx, d, size).into_iter().map(|v| v as i64).collect();
            let s = self.action_at(&x);
            s.is_integer()
                && (0..size).all(|i| {
                    let mut shifted = x.clone();
                    shifted[i] += d as i64;
                    ((self.action_at(&shifted) - s) / dd).is_integer()
                })
        })
    }
}

/// Everything the phase-space picture says about one gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateCatalogEntry {
    pub gate: GateSpec,
    pub map: AffineSymplecticMap,
    pub action: QuadraticAction,
    pub hbar_order: HbarOrder,
    pub exact: ExactHarmonicData,
}

fn r(num: i64, den: i64) -> Rational64 {
    Rational64::new(num, den)
}

fn ri(v: i64) -> Rational64 {
    Rational64::from_integer(v)
}

/// Local `(M, α)` of a gate on its own targets, ordering `(p_targets, q_targets)`.
fn local_exact(gate: &GateSpec) -> (RatMatrix, Vec<Rational64>) {
    let a = gate.power as i64;
    match gate.kind {
        GateKind::F => (RatMatrix::from_rows(&[vec![ri(0), ri(1)], vec![ri(-1), ri(0)]]), vec![ri(0), ri(0)]),
        GateKind::P => (RatMatrix::from_rows(&[vec![ri(1), ri(1)], vec![ri(0), ri(1)]]), vec![r(-1, 2), ri(0)]),
        GateKind::T => (RatMatrix::from_rows(&[vec![ri(1), r(1, 2)], vec![ri(0), ri(1)]]), vec![r(-1, 4), ri(0)]),
        GateKind::Zpow => (RatMatrix::identity(2), vec![ri(a), ri(0)]),
        GateKind::Xpow => (RatMatrix::identity(2), vec![ri(0), ri(a)]),
        GateKind::C => (
            RatMatrix::from_rows(&[
                vec![ri(1), ri(-1), ri(0), ri(0)],
                vec![ri(0), ri(1), ri(0), ri(0)],
                vec![ri(0), ri(0), ri(1), ri(0)],
                vec![ri(0), ri(0), ri(1), ri(1)],
            ]),
            vec![ri(0); 4],
        ),
    }
}

/// Phase-space indices of the targets: momenta first, then positions.
pub fn phase_space_indices(targets: &[usize], n: usize) -> Vec<usize> {
    targets.iter().copied().chain(targets.iter().map(|t| n + t)).collect()
}

/// The gate's map on its own `2k` phase-space coordinates, over `Z_d`.
pub fn local_map(gate: &GateSpec, d: u64) -> Result<AffineSymplecticMap> {
    let (m, alpha) = local_exact(gate);
    let alpha = ZdVector::from_u64(alpha.iter().map(|&v| rational_mod(v, d)).collect(), d);
    AffineSymplecticMap::from_alpha(m.to_zd(d), &alpha)
}

/// Catalog data for a gate, embedded at its targets in an `n`-qudit phase space.
pub fn catalog(gate: &GateSpec, dim: Dim) -> Result<GateCatalogEntry> {
    gate.validate(dim)?;
    let d = dim.d();
    let size = 2 * dim.n();
    let indices = phase_space_indices(&gate.targets, dim.n());
    let (local_m, local_alpha) = local_exact(gate);
    let m = local_m.embed(size, &indices);
    let mut alpha = vec![ri(0); size];
    for (bi, &i) in indices.iter().enumerate() {
        alpha[i] = local_alpha[bi];
    }
    let exact = ExactHarmonicData::new(m, alpha);

    let m_zd = exact.map.to_zd(d);
    let alpha_zd = ZdVector::from_u64(exact.alpha.iter().map(|&v| rational_mod(v, d)).collect(), d);
    let map = AffineSymplecticMap::from_alpha(m_zd, &alpha_zd)?;
    let action = QuadraticAction::from_map(&map)?;
    let hbar_order = if gate.kind.is_clifford() { HbarOrder::Zero } else { HbarOrder::One };
    Ok(GateCatalogEntry { gate: gate.clone(), map, action, hbar_order, exact })
}

impl GateCatalogEntry {
    /// Exact action restricted to the gate's own qudits (`d^{2k}` centers).
    pub fn local_exact(&self) -> ExactHarmonicData {
        let (m, alpha) = local_exact(&self.gate);
        ExactHarmonicData::new(m, alpha)
    }

    /// Exact `B` embedded with zeros outside the targets, for diagnostics.
    pub fn exact_action_matrix(&self, dim: Dim) -> RatMatrix {
        let local = self.local_exact();
        local.action.embed_zeroed(2 * dim.n(), &phase_space_indices(&self.gate.targets, dim.n()))
    }
}

/// `|2^d det(I + M)|^{±1/2}` with `M` lifted to symmetric integer representatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prefactor {
    /// `det(I + M)` over the integers.
    pub det: i128,
    /// `|2^d det(I + M)|^{1/2}`.
    pub value: f64,
    /// `|2^d det(I + M)|^{-1/2}`, the other printed form.
    pub reciprocal: f64,
}

pub fn propagator_prefactor(m: &ZdMatrix, dim: Dim) -> Result<Prefactor> {
    let d = dim.d();
    let size = m.rows();
    if ZdMatrix::identity(size, d).add(m)?.inverse().is_err() {
        return Err(Error::CayleySingular(d));
    }
    let mut lifted: Vec<Vec<i128>> =
        (0..size).map(|r| (0..size).map(|c| lift_symmetric(m.get(r, c), d) as i128).collect()).collect();
    for (i, row) in lifted.iter_mut().enumerate() {
        row[i] += 1;
    }
    let det = bareiss_det(lifted);
    let magnitude = (2f64.powi(d as i32) * det as f64).abs();
    Ok(Prefactor { det, value: magnitude.sqrt(), reciprocal: magnitude.sqrt().recip() })
}

/// Fraction-free integer determinant.
fn bareiss_det(mut a: Vec<Vec<i128>>) -> i128 {
    let size = a.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..size {
        if a[k][k] == 0 {
            match (k + 1..size).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[size - 1][size - 1]
}

/// Position-representation action `G(q', q)` as a quadratic polynomial in
/// `y = (q', q)`, valid on the affine set where the propagator is supported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionAction {
    /// `G(y) = yᵀ quad y + linear·y + constant`.
    pub quad: ZdMatrix,
    pub linear: ZdVector,
    pub constant: u64,
    /// `K y = k`; `None` when every `(q', q)` is allowed.
    pub constraint: Option<(ZdMatrix, ZdVector)>,
}

impl PositionAction {
    /// `G(q', q)`, or `None` off the support.
    pub fn eval(&self, q_out: &[u64], q_in: &[u64]) -> Option<u64> {
        let d = self.linear.modulus();
        let y = ZdVector::from_u64(q_out.iter().chain(q_in).copied().collect(), d);
        if let Some((k, rhs)) = &self.constraint {
            if k.mul_vec(&y).ok()? != *rhs {
                return None;
            }
        }
        let quad = y.dot(&self.quad.mul_vec(&y).ok()?).ok()?;
        let lin = self.linear.dot(&y).ok()?;
        Some((quad + lin + self.constant) % d)
    }
}

/// Symmetrized Legendre transform of a center action:
/// `G(q', q) = S(p, (q'+q)/2) + p·(q' - q)` at the stationary `p`.
///
/// Momenta with an invertible block of `B_pp` are eliminated. Momenta that do
/// not appear quadratically turn their stationarity condition into a support
/// constraint on `(q', q)`. A partially degenerate block is `LegendreSingular`.
pub fn position_action(a: &QuadraticAction, dim: Dim) -> Result<PositionAction> {
    let n = dim.n();
    let d = dim.d();
    let h = dim.half() as i64;
    let b = a.matrix();
    let lin = a.linear();
    let p_idx: Vec<usize> = (0..n).collect();
    let q_idx: Vec<usize> = (n..2 * n).collect();
    let bpp = b.select(&p_idx, &p_idx);
    let bpq = b.select(&p_idx, &q_idx);

    let zero_rows: Vec<usize> = (0..n).filter(|&i| bpp.row(i).iter().all(|&v| v == 0)).collect();
    let active: Vec<usize> = (0..n).filter(|i| !zero_rows.contains(i)).collect();

    // Stationarity gradient g(y) = 2 Bpq Q + lp + Δ as rows over y = (q', q).
    let mut grad = ZdMatrix::zeros(n, 2 * n, d);
    for i in 0..n {
        for j in 0..n {
            let coupling = bpq.get(i, j) as i64; // 2·Bpq·h = Bpq
            let delta = if i == j { 1 } else { 0 };
            grad.set(i, j, coupling + delta);
            grad.set(i, n + j, coupling - delta);
        }
    }
    let grad_const = ZdVector::from_u64((0..n).map(|i| lin.get(i)).collect(), d);

    // p = Lp y + cp
    let mut lp = ZdMatrix::zeros(n, 2 * n, d);
    let mut cp = ZdVector::zeros(n, d);
    if !active.is_empty() {
        let block_inv = bpp.select(&active, &active).scale(2).inverse().map_err(|_| Error::LegendreSingular)?;
        let g_active = grad.select(&active, &(0..2 * n).collect::<Vec<_>>());
        let solve = block_inv.neg().mul(&g_active)?;
        let c_active = ZdVector::from_u64(active.iter().map(|&i| grad_const.get(i)).collect(), d);
        let c_solve = block_inv.neg().mul_vec(&c_active)?;
        for (ai, &i) in active.iter().enumerate() {
            for c in 0..2 * n {
                lp.set(i, c, solve.get(ai, c) as i64);
            }
            cp.set(i, c_solve.get(ai) as i64);
        }
    }

    // x = (p, Q) = L y + c with Q = h(q' + q)
    let mut l = ZdMatrix::zeros(2 * n, 2 * n, d);
    l.embed(&lp, &p_idx, &(0..2 * n).collect::<Vec<_>>());
    for j in 0..n {
        l.set(n + j, j, h);
        l.set(n + j, n + j, h);
    }
    let mut c = ZdVector::zeros(2 * n, d);
    for i in 0..n {
        c.set(i, cp.get(i) as i64);
    }

    // G = S(Ly + c) + (Lp y + cp)ᵀ D y, D = [I, -I]
    let mut dmat = ZdMatrix::zeros(n, 2 * n, d);
    for i in 0..n {
        dmat.set(i, i, 1);
        dmat.set(i, n + i, -1);
    }
    let lt = l.transpose();
    let quad_s = lt.mul(b)?.mul(&l)?;
    let cross = lp.transpose().mul(&dmat)?;
    let quad = quad_s.add(&cross.add(&cross.transpose())?.scale(h))?;
    let bc = b.mul_vec(&c)?;
    let linear = lt.mul_vec(&bc)?.scale(2).add(&lt.mul_vec(&lin)?)?.add(&dmat.transpose().mul_vec(&cp)?)?;
    let constant = (c.dot(&bc)? + lin.dot(&c)?) % d;

    let constraint = if zero_rows.is_empty() {
        None
    } else {
        let k = grad.select(&zero_rows, &(0..2 * n).collect::<Vec<_>>());
        let rhs = ZdVector::from_u64(zero_rows.iter().map(|&i| grad_const.get(i)).collect(), d).scale(-1);
        Some((k, rhs))
    };
    Ok(PositionAction { quad, linear, constant, constraint })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{build_gate, DenseOperator};
    use crate::weyl::center_repr;

    fn dim(d: u64, n: usize) -> Dim {
        Dim::new(d, n).unwrap()
    }

    fn zm(rows: &[&[i64]], d: u64) -> ZdMatrix {
        ZdMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), d).unwrap()
    }

    #[test]
    fn catalog_fourier() {
        let e = catalog(&GateSpec::f(0), dim(5, 1)).unwrap();
        assert_eq!(*e.map.matrix(), zm(&[&[0, 1], &[-1, 0]], 5));
        assert!(e.map.alpha().unwrap().is_zero());
        assert_eq!(*e.action.matrix(), ZdMatrix::identity(2, 5));
        assert_eq!(e.hbar_order, HbarOrder::Zero);
    }

    #[test]
    fn catalog_phase_shift() {
        let d = 7;
        let e = catalog(&GateSpec::p(0), dim(d, 1)).unwrap();
        let h = inv(2, d).unwrap() as i64;
        assert_eq!(*e.map.matrix(), zm(&[&[1, 1], &[0, 1]], d));
        assert_eq!(e.map.alpha().unwrap(), ZdVector::from_i64(&[-h, 0], d));
        assert_eq!(*e.action.matrix(), zm(&[&[0, 0], &[0, h]], d));
    }

    #[test]
    fn catalog_controlled_shift_action() {
        let d = 5;
        let e = catalog(&GateSpec::c(0, 1), dim(d, 2)).unwrap();
        let h = inv(2, d).unwrap() as i64;
        let mut expected = ZdMatrix::zeros(4, 4, d);
        expected.set(1, 2, -h);
        expected.set(2, 1, -h);
        assert_eq!(*e.action.matrix(), expected);
        // S = -x_{p2} x_{q1}
        for idx in 0..625 {
            let x = ZdVector::from_u64(point_from_index(idx, d, 4), d);
            let expected = reduce(-((x.get(1) * x.get(2)) as i64), d);
            assert_eq!(action_eval(&e.action, &x).unwrap(), expected);
        }
    }

    #[test]
    fn catalog_translations() {
        let d = 5;
        let e = catalog(&GateSpec::zpow(0, 3), dim(d, 1)).unwrap();
        assert_eq!(*e.map.matrix(), ZdMatrix::identity(2, d));
        assert_eq!(*e.map.offset(), ZdVector::from_i64(&[3, 0], d));
        let e = catalog(&GateSpec::xpow(0, 2), dim(d, 1)).unwrap();
        assert_eq!(*e.map.offset(), ZdVector::from_i64(&[0, 2], d));
    }

    #[test]
    fn catalog_t_is_order_one() {
        let d = 5;
        let e = catalog(&GateSpec::t(0), dim(d, 1)).unwrap();
        assert_eq!(e.hbar_order, HbarOrder::One);
        assert!(!e.exact.map.is_integral());
        // exact Cayley gives B_T = diag(0, 1/4)
        assert_eq!(e.exact.action, RatMatrix::from_rows(&[vec![ri(0), ri(0)], vec![ri(0), r(1, 4)]]));
    }

    #[test]
    fn cayley_examples() {
        let d = 7;
        assert_eq!(cayley_b_from_m(&zm(&[&[0, 1], &[-1, 0]], d)).unwrap(), ZdMatrix::identity(2, d));
        let h = inv(2, d).unwrap() as i64;
        assert_eq!(cayley_b_from_m(&zm(&[&[1, 1], &[0, 1]], d)).unwrap(), zm(&[&[0, 0], &[0, h]], d));
        assert!(cayley_b_from_m(&ZdMatrix::identity(2, d)).unwrap().is_zero());
        // -I has no Cayley parameterization
        assert_eq!(cayley_b_from_m(&ZdMatrix::identity(2, d).neg()), Err(Error::CayleySingular(d)));
    }

    #[test]
    fn cayley_inverse_relation() {
        for d in [3, 5, 7] {
            for g in [GateSpec::f(0), GateSpec::p(0), GateSpec::t(0), GateSpec::c(0, 1)] {
                let e = catalog(&g, dim(d, 2)).unwrap();
                let m = e.map.matrix();
                assert_eq!(cayley_m_from_b(e.action.matrix()).unwrap(), *m);
            }
        }
    }

    #[test]
    fn action_eval_examples() {
        let e = catalog(&GateSpec::f(0), dim(3, 1)).unwrap();
        assert_eq!(action_eval(&e.action, &ZdVector::from_i64(&[1, 1], 3)).unwrap(), 2);
        let z = QuadraticAction::zero(dim(3, 1));
        assert_eq!(action_eval(&z, &ZdVector::from_i64(&[2, 1], 3)).unwrap(), 0);
        let e = catalog(&GateSpec::p(0), dim(5, 1)).unwrap();
        assert_eq!(action_eval(&e.action, &ZdVector::from_i64(&[0, 1], 5)).unwrap(), 0);
    }

    #[test]
    fn identity_center_function_is_all_ones() {
        let t = center_function_from_action(&QuadraticAction::zero(dim(3, 1)), dim(3, 1)).unwrap();
        assert!(t.values().iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn fourier_center_function_formula() {
        let d = 3;
        let e = catalog(&GateSpec::f(0), dim(d, 1)).unwrap();
        let t = center_function_from_action(&e.action, dim(d, 1)).unwrap();
        let omega = RootTable::new(d);
        for idx in 0..9 {
            let x = t.point(idx);
            assert!((t.values()[idx] - omega.pow_u(x[0] * x[0] + x[1] * x[1])).norm() < 1e-14);
        }
    }

    #[test]
    fn modular_t_action_formula() {
        let d = 5;
        let e = catalog(&GateSpec::t(0), dim(d, 1)).unwrap();
        let t = center_function_from_action(&e.action, dim(d, 1)).unwrap();
        let q4 = inv(4, d).unwrap() as i64;
        let omega = RootTable::new(d);
        for idx in 0..25 {
            let xq = t.point(idx)[1] as i64;
            assert!((t.values()[idx] - omega.pow(-q4 * (xq - xq * xq))).norm() < 1e-14);
        }
    }

    #[test]
    fn exact_t_center_function_matches_dense_gate() {
        for d in [3, 5, 7] {
            let dm = dim(d, 1);
            let e = catalog(&GateSpec::t(0), dm).unwrap();
            let dense = center_repr(&build_gate(&GateSpec::t(0), dm).unwrap()).unwrap();
            let predicted = e.exact.center_function(dm).unwrap();
            // d^{-1} Tr(R(x)† T) = d^{-1} e^{2πi S(x)/d}, with no stray phase
            for (p, u) in predicted.values().iter().zip(dense.values()) {
                assert!((p - u * d as f64).norm() < 1e-12);
            }
            // the modular shadow is a different (Clifford) operator
            let shadow = center_function_from_action(&e.action, dm).unwrap();
            assert!(shadow.distance_up_to_phase(&dense).unwrap() > 1e-3);
        }
    }

    #[test]
    fn grid_preservation_separates_t() {
        for d in [3, 5, 7] {
            let dm = dim(d, 2);
            for g in [GateSpec::f(1), GateSpec::p(0), GateSpec::c(0, 1), GateSpec::zpow(1, 2), GateSpec::xpow(0, 1)] {
                let e = catalog(&g, dm).unwrap();
                assert!(e.local_exact().preserves_grid(d), "{g} should preserve the grid");
            }
            assert!(!catalog(&GateSpec::t(0), dm).unwrap().local_exact().preserves_grid(d));
        }
    }

    #[test]
    fn eom_phase_shift() {
        let d = 7;
        let dm = dim(d, 1);
        let k = d.div_ceil(2) as i64;
        // H = -(d+1)/2 q² + (d+1)/2 q, z = (p, q)
        let h = QuadraticHamiltonian::from_terms(dm, &[(-k, 1, 1)], &[(k, 1)]).unwrap();
        let map = discrete_eom(&h, dm).unwrap();
        assert_eq!(map, catalog(&GateSpec::p(0), dm).unwrap().map);
    }

    #[test]
    fn eom_bilinear_coupling() {
        let d = 5;
        let dm = dim(d, 2);
        // z = (p1, p2, q1, q2); H = p2 q1 drives q2 += q1
        let h = QuadraticHamiltonian::from_terms(dm, &[(1, 1, 2)], &[]).unwrap();
        assert_eq!(discrete_eom(&h, dm).unwrap(), catalog(&GateSpec::c(0, 1), dm).unwrap().map);
        // H = p1 q2 drives q1 += q2: the same gate with the qudits swapped
        let h = QuadraticHamiltonian::from_terms(dm, &[(1, 0, 3)], &[]).unwrap();
        assert_eq!(discrete_eom(&h, dm).unwrap(), catalog(&GateSpec::c(1, 0), dm).unwrap().map);
    }

    #[test]
    fn eom_zero_and_oscillator() {
        let dm = dim(5, 1);
        let zero = QuadraticHamiltonian::from_terms(dm, &[], &[]).unwrap();
        assert_eq!(discrete_eom(&zero, dm).unwrap(), AffineSymplecticMap::identity(dm));
        let osc = QuadraticHamiltonian::from_terms(dm, &[(1, 0, 0), (1, 1, 1)], &[]).unwrap();
        assert_eq!(discrete_eom(&osc, dm), Err(Error::NonSymplecticResult));
    }

    #[test]
    fn compose_examples() {
        let dm = dim(5, 1);
        let f = catalog(&GateSpec::f(0), dm).unwrap().map;
        let id = AffineSymplecticMap::identity(dm);
        assert_eq!(compose_maps(&id, &f).unwrap(), f);
        let f2 = compose_maps(&f, &f).unwrap();
        assert_eq!(compose_maps(&f2, &f2).unwrap(), id);
        let a = AffineSymplecticMap::translation(ZdVector::from_i64(&[1, 2], 5));
        let b = AffineSymplecticMap::translation(ZdVector::from_i64(&[3, 4], 5));
        assert_eq!(compose_maps(&a, &b).unwrap(), AffineSymplecticMap::translation(ZdVector::from_i64(&[4, 1], 5)));
    }

    #[test]
    fn prefactor_examples() {
        let d = 3;
        let dm = dim(d, 1);
        let id = propagator_prefactor(&ZdMatrix::identity(2, d), dm).unwrap();
        assert_eq!(id.det, 4);
        assert!((id.value - (8.0f64 * 4.0).sqrt()).abs() < 1e-12);
        let f = propagator_prefactor(&zm(&[&[0, 1], &[-1, 0]], d), dm).unwrap();
        assert_eq!(f.det, 2);
        assert!((f.value - 4.0).abs() < 1e-12);
        assert!((f.reciprocal - 0.25).abs() < 1e-12);
        let p = propagator_prefactor(&zm(&[&[1, 1], &[0, 1]], d), dm).unwrap();
        assert_eq!(p.det, 4);
        assert_eq!(propagator_prefactor(&ZdMatrix::identity(2, d).neg(), dm), Err(Error::CayleySingular(d)));
    }

    #[test]
    fn legendre_fourier() {
        let d = 5;
        let e = catalog(&GateSpec::f(0), dim(d, 1)).unwrap();
        let g = position_action(&e.action, dim(d, 1)).unwrap();
        assert!(g.constraint.is_none());
        for qo in 0..d {
            for qi in 0..d {
                assert_eq!(g.eval(&[qo], &[qi]), Some(qo * qi % d));
            }
        }
    }

    #[test]
    fn legendre_phase_shift() {
        let d = 5;
        let e = catalog(&GateSpec::p(0), dim(d, 1)).unwrap();
        let g = position_action(&e.action, dim(d, 1)).unwrap();
        let k = d.div_ceil(2);
        for q in 0..d {
            assert_eq!(g.eval(&[q], &[q]), Some(k * (q * q + d - q) % d));
            assert_eq!(g.eval(&[(q + 1) % d], &[q]), None);
        }
    }

    #[test]
    fn legendre_controlled_shift_vanishes_on_support() {
        let d = 3;
        let dm = dim(d, 2);
        let e = catalog(&GateSpec::c(0, 1), dm).unwrap();
        let g = position_action(&e.action, dm).unwrap();
        let c = build_gate(&GateSpec::c(0, 1), dm).unwrap();
        for out in 0..9usize {
            for input in 0..9usize {
                let qo = point_from_index(out, d, 2);
                let qi = point_from_index(input, d, 2);
                let on_support = c.get(out, input).norm() > 0.5;
                assert_eq!(g.eval(&qo, &qi), on_support.then_some(0));
            }
        }
    }

    #[test]
    fn legendre_partially_degenerate_is_singular() {
        let d = 5;
        let dm = dim(d, 2);
        // B_pp = diag(1, 1) except a coupling that makes the active block singular
        let mut b = ZdMatrix::zeros(4, 4, d);
        b.set(0, 0, 1);
        b.set(0, 1, 1);
        b.set(1, 0, 1);
        b.set(1, 1, 1);
        let a = QuadraticAction::new(b, ZdVector::zeros(4, d)).unwrap();
        assert_eq!(position_action(&a, dm), Err(Error::LegendreSingular));
    }

    #[test]
    fn map_inverse_roundtrip() {
        let dm = dim(7, 2);
        let e = catalog(&GateSpec::p(1), dm).unwrap();
        let inv_map = e.map.inverse().unwrap();
        assert_eq!(compose_maps(&e.map, &inv_map).unwrap(), AffineSymplecticMap::identity(dm));
        let _ = DenseOperator::identity(dm);
    }
}
