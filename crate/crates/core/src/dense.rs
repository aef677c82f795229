//! Dense state vectors and gate matrices. Everything else is verified against this module.
//!
//! Computational indices put qudit 0 in the most significant digit, so on two
//! qudits `|j, k⟩` has index `j * d + k`.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::zmod::{inv, point_from_index, reduce, Dim};
use crate::{Error, Result};

/// Powers of a root of unity `e^{2πi k / order}`, tabulated so that equal
/// exponents always give bit-identical complex numbers.
#[derive(Debug, Clone)]
pub struct RootTable {
    order: u64,
    table: Vec<Complex64>,
}

impl RootTable {
    pub fn new(order: u64) -> Self {
        let table = (0..order).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / order as f64)).collect();
        Self { order, table }
    }

    pub fn pow(&self, k: i64) -> Complex64 {
        self.table[reduce(k, self.order) as usize]
    }

    pub fn pow_u(&self, k: u64) -> Complex64 {
        self.table[(k % self.order) as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// Discrete Fourier transform (qudit Hadamard).
    F,
    /// Phase shift `ω^{(j-1)j/2}`.
    P,
    /// Controlled shift `|j, k⟩ -> |j, k + j⟩`.
    C,
    /// `e^{2πi (j-1)j / (4d)}`, the non-Clifford gate.
    T,
    Zpow,
    Xpow,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::C => 2,
            _ => 1,
        }
    }

    pub fn is_clifford(self) -> bool {
        !matches!(self, GateKind::T)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            GateKind::F => "F",
            GateKind::P => "P",
            GateKind::C => "C",
            GateKind::T => "T",
            GateKind::Zpow => "Z",
            GateKind::Xpow => "X",
        }
    }
}

/// Serialized as its circuit-file symbol.
impl Serialize for GateKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One gate of a circuit. `power` only matters for `Zpow`/`Xpow`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GateSpec {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub power: u64,
}

impl GateSpec {
    pub fn new(kind: GateKind, targets: Vec<usize>, power: u64) -> Self {
        Self { kind, targets, power }
    }

    pub fn f(t: usize) -> Self {
        Self::new(GateKind::F, vec![t], 0)
    }

    pub fn p(t: usize) -> Self {
        Self::new(GateKind::P, vec![t], 0)
    }

    pub fn t(t: usize) -> Self {
        Self::new(GateKind::T, vec![t], 0)
    }

    pub fn c(control: usize, target: usize) -> Self {
        Self::new(GateKind::C, vec![control, target], 0)
    }

    pub fn zpow(t: usize, power: u64) -> Self {
        Self::new(GateKind::Zpow, vec![t], power)
    }

    pub fn xpow(t: usize, power: u64) -> Self {
        Self::new(GateKind::Xpow, vec![t], power)
    }

    pub fn validate(&self, dim: Dim) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::BadTargets(format!(
                "{} takes {} target(s), got {}",
                self.kind,
                self.kind.arity(),
                self.targets.len()
            )));
        }
        if let Some(&t) = self.targets.iter().find(|&&t| t >= dim.n()) {
            return Err(Error::BadTargets(format!("qudit {t} out of range for {} qudit(s)", dim.n())));
        }
        if self.targets.len() == 2 && self.targets[0] == self.targets[1] {
            return Err(Error::BadTargets(format!("{} needs distinct qudits", self.kind)));
        }
        Ok(())
    }

    /// The gate as a `d^k × d^k` matrix on its own targets.
    pub fn local_matrix(&self, d: u64) -> Vec<Complex64> {
        let du = d as usize;
        let omega = RootTable::new(d);
        match self.kind {
            GateKind::F => {
                let norm = 1.0 / (d as f64).sqrt();
                let mut m = vec![Complex64::default(); du * du];
                for r in 0..du {
                    for c in 0..du {
                        m[r * du + c] = omega.pow_u((r * c) as u64) * norm;
                    }
                }
                m
            }
            GateKind::P => diagonal(du, |j| omega.pow_u(phase_shift_exponent(j as u64, d))),
            GateKind::T => {
                let fine = RootTable::new(4 * d);
                // exponent (j-1)j/4 taken over the integers, j in [0, d)
                diagonal(du, |j| fine.pow(j as i64 * (j as i64 - 1)))
            }
            GateKind::Zpow => diagonal(du, |j| omega.pow_u(j as u64 * self.power)),
            GateKind::Xpow => {
                let mut m = vec![Complex64::default(); du * du];
                for j in 0..du {
                    m[((j as u64 + self.power) % d) as usize * du + j] = Complex64::new(1.0, 0.0);
                }
                m
            }
            GateKind::C => {
                let size = du * du;
                let mut m = vec![Complex64::default(); size * size];
                for j in 0..du {
                    for k in 0..du {
                        let col = j * du + k;
                        let row = j * du + (j + k) % du;
                        m[row * size + col] = Complex64::new(1.0, 0.0);
                    }
                }
                m
            }
        }
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        if matches!(self.kind, GateKind::Zpow | GateKind::Xpow) {
            write!(f, " {}", self.power)?;
        }
        Ok(())
    }
}

/// `(j-1)j/2 mod d`; the product of consecutive integers is even.
pub fn phase_shift_exponent(j: u64, d: u64) -> u64 {
    let j = j as i64;
    reduce((j - 1) * j / 2, d)
}

/// The modular reading `(j-1)j·inv(4) mod d` of the T exponent. Over `Z_d`
/// this is just `P^{inv(2)}`, a Clifford gate, which is why [`GateKind::T`]
/// uses the integer exponent instead.
pub fn modular_t_exponent(j: u64, d: u64) -> u64 {
    let j = j as i64;
    let q = inv(4, d).expect("4 is a unit for odd d");
    reduce((j - 1) * j % d as i64 * q as i64 % d as i64, d)
}

fn diagonal(size: usize, entry: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
    let mut m = vec![Complex64::default(); size * size];
    for j in 0..size {
        m[j * size + j] = entry(j);
    }
    m
}

/// A pure state as `d^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    dim: Dim,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// `|0…0⟩`.
    pub fn zero(dim: Dim) -> Self {
        Self::basis(dim, 0)
    }

    pub fn basis(dim: Dim, index: usize) -> Self {
        let mut amps = vec![Complex64::default(); dim.hilbert_size()];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { dim, amps }
    }

    /// Wraps raw amplitudes without normalizing them.
    pub fn from_amplitudes(dim: Dim, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != dim.hilbert_size() {
            return Err(Error::ShapeMismatch(format!("{} amplitudes for dimension {}", amps.len(), dim.hilbert_size())));
        }
        Ok(Self { dim, amps })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
        self
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Applies one gate in place through its local matrix.
    pub fn apply_gate(&mut self, gate: &GateSpec) -> Result<()> {
        gate.validate(self.dim)?;
        let local = gate.local_matrix(self.dim.d());
        self.apply_local(&local, &gate.targets);
        Ok(())
    }

    /// Applies a `d^k × d^k` matrix to the qudits in `targets` (first target most significant).
    pub fn apply_local(&mut self, local: &[Complex64], targets: &[usize]) {
        let offsets = local_offsets(self.dim, targets);
        let k = offsets.len();
        let mut buf = vec![Complex64::default(); k];
        for base in untouched_bases(self.dim, targets) {
            for (slot, off) in buf.iter_mut().zip(&offsets) {
                *slot = self.amps[base + off];
            }
            for (r, off) in offsets.iter().enumerate() {
                self.amps[base + off] = (0..k).map(|c| local[r * k + c] * buf[c]).sum();
            }
        }
    }

    /// Runs a circuit from `|0…0⟩`.
    pub fn simulate(circuit: &[GateSpec], dim: Dim) -> Result<Self> {
        let mut psi = Self::zero(dim);
        for g in circuit {
            psi.apply_gate(g)?;
        }
        Ok(psi)
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DenseOperator {
        let size = self.amps.len();
        let mut data = vec![Complex64::default(); size * size];
        for r in 0..size {
            for c in 0..size {
                data[r * size + c] = self.amps[r] * self.amps[c].conj();
            }
        }
        DenseOperator { dim: self.dim, size, data }
    }

    /// Distance to `other` after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let overlap = other.inner(self);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - phase * b).norm()).fold(0.0, f64::max)
    }
}

/// Offsets of the `d^k` local basis states inside a full index, first target most significant.
pub(crate) fn local_offsets(dim: Dim, targets: &[usize]) -> Vec<usize> {
    let d = dim.d() as usize;
    let strides: Vec<usize> = targets.iter().map(|&t| d.pow((dim.n() - 1 - t) as u32)).collect();
    let count = d.pow(targets.len() as u32);
    (0..count)
        .map(|local| {
            point_from_index(local, d as u64, targets.len()).iter().zip(&strides).map(|(&v, s)| v as usize * s).sum()
        })
        .collect()
}

/// Full indices whose digits on `targets` are all zero.
pub(crate) fn untouched_bases(dim: Dim, targets: &[usize]) -> impl Iterator<Item = usize> {
    let d = dim.d();
    let n = dim.n();
    let targets = targets.to_vec();
    (0..dim.hilbert_size()).filter(move |&idx| {
        let digits = point_from_index(idx, d, n);
        targets.iter().all(|&t| digits[t] == 0)
    })
}

/// A `d^n × d^n` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: Dim,
    size: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(dim: Dim) -> Self {
        let size = dim.hilbert_size();
        Self { dim, size, data: vec![Complex64::default(); size * size] }
    }

    pub fn identity(dim: Dim) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..m.size {
            m.data[i * m.size + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: Dim, f: impl Fn(usize, usize) -> Complex64 + Sync) -> Self {
        let size = dim.hilbert_size();
        let data = (0..size * size).into_par_iter().map(|i| f(i / size, i % size)).collect();
        Self { dim, size, data }
    }

    pub fn from_entries(dim: Dim, data: Vec<Complex64>) -> Result<Self> {
        let size = dim.hilbert_size();
        if data.len() != size * size {
            return Err(Error::ShapeMismatch(format!("{} entries for a {size}x{size} operator", data.len())));
        }
        Ok(Self { dim, size, data })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.size + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.size + c] = v;
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let size = self.size;
        let data = (0..size * size)
            .into_par_iter()
            .map(|i| {
                let (r, c) = (i / size, i % size);
                (0..size).map(|k| self.data[r * size + k] * other.data[k * size + c]).sum()
            })
            .collect();
        Ok(Self { dim: self.dim, size, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { data, ..*self })
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { data: self.data.iter().map(|a| a * k).collect(), ..*self }
    }

    pub fn adjoint(&self) -> Self {
        let size = self.size;
        let mut data = vec![Complex64::default(); size * size];
        for r in 0..size {
            for c in 0..size {
                data[c * size + r] = self.data[r * size + c].conj();
            }
        }
        Self { data, ..*self }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.size).map(|i| self.data[i * self.size + i]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint().mul(self).map(|p| p.max_abs_diff(&Self::identity(self.dim)) <= tol).unwrap_or(false)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.size != other.size || self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!("{}x{} vs {}x{}", self.size, self.size, other.size, other.size)));
        }
        Ok(())
    }
}

/// The full `d^n × d^n` unitary of `gate`, identity on the other qudits.
pub fn build_gate(gate: &GateSpec, dim: Dim) -> Result<DenseOperator> {
    gate.validate(dim)?;
    let local = gate.local_matrix(dim.d());
    let offsets = local_offsets(dim, &gate.targets);
    let k = offsets.len();
    let mut op = DenseOperator::zeros(dim);
    for base in untouched_bases(dim, &gate.targets) {
        for (r, ro) in offsets.iter().enumerate() {
            for (c, co) in offsets.iter().enumerate() {
                op.set(base + ro, base + co, local[r * k + c]);
            }
        }
    }
    Ok(op)
}

/// `U ψ`.
pub fn apply(u: &DenseOperator, psi: &DenseState) -> Result<DenseState> {
    if u.dim != psi.dim {
        return Err(Error::ShapeMismatch(format!("operator of size {} on state of size {}", u.size, psi.amps.len())));
    }
    let size = u.size;
    let amps = (0..size).map(|r| (0..size).map(|c| u.data[r * size + c] * psi.amps[c]).sum()).collect();
    Ok(DenseState { dim: psi.dim, amps })
}

/// Product of the gate matrices, first gate applied first.
pub fn compose(circuit: &[GateSpec], dim: Dim) -> Result<DenseOperator> {
    circuit.iter().try_fold(DenseOperator::identity(dim), |acc, g| build_gate(g, dim)?.mul(&acc))
}

/// True iff `‖A - φB‖_max <= tol` for the unit phase `φ` read off `B`'s largest entry.
pub fn equal_up_to_global_phase(a: &DenseOperator, b: &DenseOperator, tol: f64) -> Result<bool> {
    a.check_same(b)?;
    Ok(phase_aligned_distance(a.entries(), b.entries())? <= tol)
}

/// `min_φ ‖a - φ b‖_max` with `φ` anchored on the largest-magnitude entry of `b`.
pub fn phase_aligned_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    let (anchor, bmax) = b
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.norm()))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    if bmax == 0.0 {
        return Err(Error::DegenerateB);
    }
    let ratio = a[anchor] / b[anchor];
    let phase = if ratio.norm() > 0.0 { ratio / ratio.norm() } else { Complex64::new(1.0, 0.0) };
    Ok(a.iter().zip(b).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: u64, n: usize) -> Dim {
        Dim::new(d, n).unwrap()
    }

    #[test]
    fn fourier_entries() {
        let dm = dim(3, 1);
        let f = build_gate(&GateSpec::f(0), dm).unwrap();
        let omega = Complex64::from_polar(1.0, TAU / 3.0);
        for m in 0..3 {
            for n in 0..3 {
                let expected = omega.powu((m * n) as u32) / 3f64.sqrt();
                assert!((f.get(m, n) - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_power_is_identity() {
        let dm = dim(5, 2);
        let z = build_gate(&GateSpec::zpow(1, 0), dm).unwrap();
        assert!(z.max_abs_diff(&DenseOperator::identity(dm)) < 1e-15);
    }

    #[test]
    fn modular_t_exponent_example() {
        assert_eq!(modular_t_exponent(2, 5), 3);
        assert_eq!(phase_shift_exponent(0, 5), 0);
        assert_eq!(phase_shift_exponent(3, 5), 3);
    }

    #[test]
    fn t_gate_uses_integer_quarter_exponent() {
        let d = 5;
        let t = GateSpec::t(0).local_matrix(d);
        for j in 0..d as usize {
            let expected = Complex64::from_polar(1.0, TAU * ((j as f64 - 1.0) * j as f64 / 4.0) / d as f64);
            assert!((t[j * d as usize + j] - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn apply_examples() {
        let dm = dim(3, 1);
        let psi = DenseState::basis(dm, 1);
        assert_eq!(apply(&DenseOperator::identity(dm), &psi).unwrap(), psi);

        let x = build_gate(&GateSpec::xpow(0, 1), dm).unwrap();
        let out = apply(&x, &DenseState::zero(dm)).unwrap();
        assert!((out.amplitudes()[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let f = build_gate(&GateSpec::f(0), dm).unwrap();
        let out = apply(&f, &DenseState::zero(dm)).unwrap();
        for a in out.amplitudes() {
            assert!((a - Complex64::new(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-15);
        }

        let wrong = DenseState::zero(dim(3, 2));
        assert!(matches!(apply(&f, &wrong), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn compose_examples() {
        let dm = dim(5, 1);
        assert_eq!(compose(&[], dm).unwrap(), DenseOperator::identity(dm));
        let f4 = compose(&[GateSpec::f(0), GateSpec::f(0), GateSpec::f(0), GateSpec::f(0)], dm).unwrap();
        assert!(equal_up_to_global_phase(&f4, &DenseOperator::identity(dm), 1e-12).unwrap());

        let zx = compose(&[GateSpec::xpow(0, 1), GateSpec::zpow(0, 1)], dm).unwrap();
        let xz = compose(&[GateSpec::zpow(0, 1), GateSpec::xpow(0, 1)], dm).unwrap();
        let omega = Complex64::from_polar(1.0, TAU / 5.0);
        assert!(zx.max_abs_diff(&xz.scale(omega)) < 1e-12);
        assert!(zx.max_abs_diff(&xz) > 0.1);
    }

    #[test]
    fn global_phase_comparison() {
        let dm = dim(3, 1);
        let f = build_gate(&GateSpec::f(0), dm).unwrap();
        let p = build_gate(&GateSpec::p(0), dm).unwrap();
        let omega = Complex64::from_polar(1.0, TAU / 3.0);
        assert!(equal_up_to_global_phase(&f, &f, 1e-12).unwrap());
        assert!(equal_up_to_global_phase(&f.scale(omega), &f, 1e-12).unwrap());
        assert!(!equal_up_to_global_phase(&f, &p, 1e-6).unwrap());
        assert_eq!(equal_up_to_global_phase(&f, &DenseOperator::zeros(dm), 1e-6), Err(Error::DegenerateB));
    }

    #[test]
    fn bad_targets_rejected() {
        let dm = dim(3, 2);
        assert!(matches!(build_gate(&GateSpec::c(0, 0), dm), Err(Error::BadTargets(_))));
        assert!(matches!(build_gate(&GateSpec::f(2), dm), Err(Error::BadTargets(_))));
        assert!(matches!(build_gate(&GateSpec::new(GateKind::F, vec![0, 1], 0), dm), Err(Error::BadTargets(_))));
    }

    #[test]
    fn weyl_relation_and_fourier_conjugation() {
        for d in [3, 5, 7, 15] {
            let dm = dim(d, 1);
            let z = build_gate(&GateSpec::zpow(0, 1), dm).unwrap();
            let x = build_gate(&GateSpec::xpow(0, 1), dm).unwrap();
            let omega = Complex64::from_polar(1.0, TAU / d as f64);
            let lhs = z.mul(&x).unwrap();
            let rhs = x.mul(&z).unwrap().scale(omega);
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);

            let f = build_gate(&GateSpec::f(0), dm).unwrap();
            let conj = f.adjoint().mul(&z).unwrap().mul(&f).unwrap();
            assert!(conj.max_abs_diff(&x) < 1e-12, "X = F†ZF fails for d={d}");
        }
    }

    #[test]
    fn all_gates_unitary() {
        for d in [3, 5, 7] {
            let dm = dim(d, 2);
            for g in [GateSpec::f(1), GateSpec::p(0), GateSpec::t(1), GateSpec::c(1, 0), GateSpec::zpow(0, 2), GateSpec::xpow(1, 3)] {
                assert!(build_gate(&g, dm).unwrap().is_unitary(1e-10), "{g} not unitary for d={d}");
            }
        }
    }

    #[test]
    fn local_application_matches_full_matrix() {
        let dm = dim(3, 3);
        let circuit = [GateSpec::f(0), GateSpec::c(0, 2), GateSpec::t(2), GateSpec::p(1), GateSpec::c(2, 1), GateSpec::xpow(1, 2)];
        let via_local = DenseState::simulate(&circuit, dm).unwrap();
        let via_matrix = apply(&compose(&circuit, dm).unwrap(), &DenseState::zero(dm)).unwrap();
        for (a, b) in via_local.amplitudes().iter().zip(via_matrix.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn controlled_shift_targets_second_qudit() {
        let d = 5;
        let dm = dim(d, 2);
        let c = build_gate(&GateSpec::c(0, 1), dm).unwrap();
        // |2, 4⟩ -> |2, 1⟩
        assert_eq!(c.get(2 * 5 + 1, 2 * 5 + 4), Complex64::new(1.0, 0.0));
        let c_rev = build_gate(&GateSpec::c(1, 0), dm).unwrap();
        // |4, 2⟩ -> |1, 2⟩
        assert_eq!(c_rev.get(5 + 2, 4 * 5 + 2), Complex64::new(1.0, 0.0));
    }
}
