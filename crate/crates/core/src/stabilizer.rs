//! Stabilizer states as Wigner delta sets.
//!
//! A pure stabilizer state on `n` qudits has `W(x) = d^{-n}` on the affine
//! set `{x : Φx = r}` (with `d^n` points) and zero elsewhere. A Clifford gate
//! with phase-space map `x -> Mx + b` moves the set forward, so only `(Φ, r)`
//! needs updating and the cost is polynomial in `n`.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::Serialize;

use crate::dense::{DenseState, GateSpec, RootTable};
use crate::harmonic::{local_map, phase_space_indices, GateCatalogEntry};
use crate::weyl::WignerTable;
use crate::zmod::{inv, point_from_index, point_index, solve_affine_echelon, symplectic_inverse, Dim, ZdMatrix, ZdVector};
use crate::{Error, Result};

/// `{x : Φx = r}` with `Φ` of shape `n x 2n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StabilizerState {
    dim: Dim,
    constraints: ZdMatrix,
    values: ZdVector,
}

impl StabilizerState {
    /// `|0…0⟩`, supported on `x_q = 0`.
    pub fn zero_state(dim: Dim) -> Self {
        let n = dim.n();
        let mut phi = ZdMatrix::zeros(n, 2 * n, dim.d());
        for i in 0..n {
            phi.set(i, n + i, 1);
        }
        Self { dim, constraints: phi, values: ZdVector::zeros(n, dim.d()) }
    }

    pub fn new(dim: Dim, phi: ZdMatrix, r: ZdVector) -> Result<Self> {
        if phi.cols() != 2 * dim.n() || phi.rows() != r.len() || phi.modulus() != dim.d() || r.modulus() != dim.d() {
            return Err(Error::ShapeMismatch(format!("{}x{} constraint for {} qudit(s)", phi.rows(), phi.cols(), dim.n())));
        }
        Ok(Self { dim, constraints: phi, values: r })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// `Φ`, one row per constraint.
    pub fn constraints(&self) -> &ZdMatrix {
        &self.constraints
    }

    /// `r`, the right-hand side of `Φx = r`.
    pub fn values(&self) -> &ZdVector {
        &self.values
    }

    /// Forward update `Φ' = ΦM⁻¹`, `r' = r + ΦM⁻¹b` for a full-size map.
    pub fn apply_clifford(&self, entry: &GateCatalogEntry) -> Result<Self> {
        if !entry.gate.kind.is_clifford() {
            return Err(Error::NotClifford(entry.gate.to_string()));
        }
        let m_inv = symplectic_inverse(entry.map.matrix())?;
        let phi = self.constraints.mul(&m_inv)?;
        let r = self.values.add(&phi.mul_vec(entry.map.offset())?)?;
        Self::new(self.dim, phi, r)
    }

    /// Same update as [`apply_clifford`](Self::apply_clifford), touching only
    /// the `2k` columns of the gate's qudits.
    pub fn apply_gate(&self, gate: &GateSpec) -> Result<Self> {
        gate.validate(self.dim)?;
        if !gate.kind.is_clifford() {
            return Err(Error::NotClifford(gate.to_string()));
        }
        let d = self.dim.d();
        let map = local_map(gate, d)?;
        let m_inv = symplectic_inverse(map.matrix())?;
        let cols = phase_space_indices(&gate.targets, self.dim.n());
        let rows: Vec<usize> = (0..self.constraints.rows()).collect();
        let block = self.constraints.select(&rows, &cols).mul(&m_inv)?;
        let mut phi = self.constraints.clone();
        phi.embed(&block, &rows, &cols);
        let r = self.values.add(&block.mul_vec(map.offset())?)?;
        Ok(Self { dim: self.dim, constraints: phi, values: r })
    }

    pub fn simulate(circuit: &[GateSpec], dim: Dim) -> Result<Self> {
        circuit.iter().try_fold(Self::zero_state(dim), |state, g| state.apply_gate(g))
    }

    /// Every point of the delta set, in index order.
    pub fn delta_set(&self) -> Result<Vec<ZdVector>> {
        let points = solve_affine_echelon(&self.constraints, &self.values)?;
        let expected = self.dim.hilbert_size() as u128;
        if points.len() as u128 != expected {
            return Err(Error::InvariantViolated { found: points.len() as u128, expected });
        }
        Ok(points)
    }

    /// Sorted phase-space indices of the delta set; equal states have equal keys.
    pub fn key(&self) -> Result<Vec<usize>> {
        Ok(self.delta_set()?.iter().map(ZdVector::index).collect())
    }

    pub fn wigner_table(&self) -> Result<WignerTable> {
        let size = self.dim.check_phase_space(crate::DEFAULT_ENUMERATION_CAP)?;
        let weight = (self.dim.hilbert_size() as f64).recip();
        let mut values = vec![0.0; size];
        for x in self.delta_set()? {
            values[x.index()] = weight;
        }
        WignerTable::new(self.dim, values)
    }

    /// Support read off the delta set projections.
    pub fn support(&self) -> Result<SupportReport> {
        let n = self.dim.n();
        let d = self.dim.d();
        let points = self.delta_set()?;
        let project = |offset: usize, qudits: &[usize]| -> usize {
            points
                .iter()
                .map(|x| qudits.iter().map(|&i| x.get(offset + i)).collect::<Vec<_>>())
                .collect::<BTreeSet<_>>()
                .len()
        };
        let all: Vec<usize> = (0..n).collect();
        let full = self.dim.hilbert_size();
        let per_qudit = (0..n)
            .map(|i| QuditSupport { position: project(n, &[i]), momentum: project(0, &[i]), d })
            .collect();
        Ok(SupportReport::new(project(n, &all) == full, project(0, &all) == full, per_qudit))
    }
}

/// Which computational-like bases carry maximal (full-size) support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportClass {
    PositionOnly,
    MomentumOnly,
    Both,
    Neither,
}

impl SupportClass {
    fn from_flags(position: bool, momentum: bool) -> Self {
        match (position, momentum) {
            (true, true) => SupportClass::Both,
            (true, false) => SupportClass::PositionOnly,
            (false, true) => SupportClass::MomentumOnly,
            (false, false) => SupportClass::Neither,
        }
    }
}

/// Number of marginal values with nonzero weight, for one qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuditSupport {
    pub position: usize,
    pub momentum: usize,
    #[serde(skip)]
    d: u64,
}

impl QuditSupport {
    pub fn class(&self) -> SupportClass {
        SupportClass::from_flags(self.position as u64 == self.d, self.momentum as u64 == self.d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportReport {
    /// Joint support over all qudits.
    pub class: SupportClass,
    pub per_qudit: Vec<QuditSupport>,
    pub per_qudit_class: Vec<SupportClass>,
}

impl SupportReport {
    fn new(position: bool, momentum: bool, per_qudit: Vec<QuditSupport>) -> Self {
        let per_qudit_class = per_qudit.iter().map(QuditSupport::class).collect();
        Self { class: SupportClass::from_flags(position, momentum), per_qudit, per_qudit_class }
    }

    /// True when some qudit has maximal support in neither quadrature.
    pub fn has_neither_qudit(&self) -> bool {
        self.per_qudit_class.contains(&SupportClass::Neither)
    }
}

const SUPPORT_TOL: f64 = 1e-12;

/// Support of a dense state: a value counts when its marginal exceeds `1e-12`.
pub fn support_classification(psi: &DenseState) -> SupportReport {
    let dim = psi.dim();
    let n = dim.n();
    let d = dim.d();
    let momentum = to_mixed_basis(psi, &vec![Quadrature::Momentum; n]);
    let count_joint = |amps: &[Complex64]| amps.iter().filter(|a| a.norm_sqr() > SUPPORT_TOL).count();
    let count_marginal = |amps: &[Complex64], qudit: usize| {
        let mut marginal = vec![0.0; d as usize];
        for (idx, a) in amps.iter().enumerate() {
            marginal[point_from_index(idx, d, n)[qudit] as usize] += a.norm_sqr();
        }
        marginal.iter().filter(|&&m| m > SUPPORT_TOL).count()
    };
    let full = dim.hilbert_size();
    let per_qudit = (0..n)
        .map(|i| QuditSupport {
            position: count_marginal(psi.amplitudes(), i),
            momentum: count_marginal(&momentum, i),
            d,
        })
        .collect();
    SupportReport::new(count_joint(psi.amplitudes()) == full, count_joint(&momentum) == full, per_qudit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    Position,
    Momentum,
}

/// `Ψ(z) = d^{-n/2} ω^{zᵀθz + η·z}` with `z_i` a position or a momentum
/// label according to `basis[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaussianForm {
    pub basis: Vec<Quadrature>,
    pub theta: ZdMatrix,
    pub eta: ZdVector,
}

impl GaussianForm {
    /// `zᵀθz + η·z mod d`.
    pub fn exponent(&self, z: &ZdVector) -> Result<u64> {
        let quad = z.dot(&self.theta.mul_vec(z)?)?;
        Ok((quad + self.eta.dot(z)?) % z.modulus())
    }
}

/// Amplitudes with each `Momentum` qudit replaced by `Ψ(p) = (F†ψ)(p)`.
pub fn to_mixed_basis(psi: &DenseState, basis: &[Quadrature]) -> Vec<Complex64> {
    change_basis(psi, basis, -1)
}

fn change_basis(psi: &DenseState, basis: &[Quadrature], sign: i64) -> Vec<Complex64> {
    let d = psi.dim().d();
    let omega = RootTable::new(d);
    let scale = (d as f64).sqrt().recip();
    let fourier: Vec<Complex64> =
        (0..d * d).map(|idx| omega.pow(sign * ((idx / d) * (idx % d)) as i64) * scale).collect();
    let mut out = psi.clone();
    for (t, q) in basis.iter().enumerate() {
        if *q == Quadrature::Momentum {
            out.apply_local(&fourier, &[t]);
        }
    }
    out.amplitudes().to_vec()
}

/// Position amplitudes of a mixed-basis Gaussian state.
pub fn gaussian_state(form: &GaussianForm, dim: Dim) -> Result<DenseState> {
    let n = dim.n();
    let d = dim.d();
    if form.basis.len() != n || form.theta.rows() != n || !form.theta.is_symmetric() || form.eta.len() != n {
        return Err(Error::ShapeMismatch("Gaussian form does not match the qudit count".into()));
    }
    let omega = RootTable::new(d);
    let scale = (dim.hilbert_size() as f64).sqrt().recip();
    let amps = (0..dim.hilbert_size())
        .map(|idx| {
            let z = ZdVector::from_u64(point_from_index(idx, d, n), d);
            form.exponent(&z).map(|e| omega.pow_u(e) * scale)
        })
        .collect::<Result<Vec<_>>>()?;
    let mixed = DenseState::from_amplitudes(dim, amps)?;
    DenseState::from_amplitudes(dim, change_basis(&mixed, &form.basis, 1))
}

const FIT_TOL: f64 = 1e-9;

/// Finds a basis choice in which `psi` is a uniform-modulus quadratic phase
/// and fits `θ, η` there. Basis choices are tried with all-position first.
pub fn mixed_representation_search(psi: &DenseState) -> Result<GaussianForm> {
    let dim = psi.dim();
    let n = dim.n();
    if n >= usize::BITS as usize {
        return Err(Error::SizeLimitExceeded { required: u128::MAX, cap: crate::DEFAULT_ENUMERATION_CAP });
    }
    let norm = psi.norm();
    if norm < FIT_TOL {
        return Err(Error::NoGaussianForm);
    }
    for mask in 0..1usize << n {
        let basis: Vec<Quadrature> = (0..n)
            .map(|i| if mask >> (n - 1 - i) & 1 == 1 { Quadrature::Momentum } else { Quadrature::Position })
            .collect();
        let amps: Vec<Complex64> = to_mixed_basis(psi, &basis).into_iter().map(|a| a / norm).collect();
        if let Some(form) = fit_quadratic_phase(&amps, &basis, dim) {
            return Ok(form);
        }
    }
    Err(Error::NoGaussianForm)
}

/// `true` iff the state has a mixed-basis Gaussian form.
pub fn is_stabilizer(psi: &DenseState) -> bool {
    mixed_representation_search(psi).is_ok()
}

fn fit_quadratic_phase(amps: &[Complex64], basis: &[Quadrature], dim: Dim) -> Option<GaussianForm> {
    let n = dim.n();
    let d = dim.d();
    let modulus = (dim.hilbert_size() as f64).sqrt().recip();
    if amps.iter().any(|a| (a.norm() - modulus).abs() > FIT_TOL) {
        return None;
    }
    let anchor = amps[0];
    let exponent_at = |z: &[u64]| -> Option<i64> {
        let turns = (amps[point_index(z, d)] / anchor).arg() / std::f64::consts::TAU * d as f64;
        let rounded = turns.round();
        ((turns - rounded).abs() < 1e-6).then_some(rounded as i64)
    };
    let unit = |i: usize, k: u64| {
        let mut z = vec![0u64; n];
        z[i] = k % d;
        z
    };
    let h = inv(2, d).ok()? as i64;
    let mut theta = ZdMatrix::zeros(n, n, d);
    let mut eta = ZdVector::zeros(n, d);
    let linear = (0..n).map(|i| exponent_at(&unit(i, 1))).collect::<Option<Vec<i64>>>()?;
    for (i, &f1) in linear.iter().enumerate() {
        let diag = h * (exponent_at(&unit(i, 2))? - 2 * f1);
        theta.set(i, i, diag);
        eta.set(i, f1 - diag);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut z = unit(i, 1);
            z[j] = 1;
            let off = h * (exponent_at(&z)? - linear[i] - linear[j]);
            theta.set(i, j, off);
            theta.set(j, i, off);
        }
    }
    let form = GaussianForm { basis: basis.to_vec(), theta, eta };
    let omega = RootTable::new(d);
    let ok = amps.iter().enumerate().all(|(idx, a)| {
        let z = ZdVector::from_u64(point_from_index(idx, d, n), d);
        form.exponent(&z).is_ok_and(|e| (anchor * omega.pow_u(e) - a).norm() < FIT_TOL)
    });
    ok.then_some(form)
}

/// Kind-level check used by callers that must refuse non-Clifford circuits.
pub fn first_non_clifford(circuit: &[GateSpec]) -> Option<&GateSpec> {
    circuit.iter().find(|g| !g.kind.is_clifford())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::catalog;
    use crate::weyl::wigner_pure;
    use proptest::prelude::*;

    fn dim(d: u64, n: usize) -> Dim {
        Dim::new(d, n).unwrap()
    }

    fn assert_matches_dense(circuit: &[GateSpec], dm: Dim) {
        let stab = StabilizerState::simulate(circuit, dm).unwrap().wigner_table().unwrap();
        let dense = wigner_pure(&DenseState::simulate(circuit, dm).unwrap()).unwrap();
        assert!(stab.max_abs_diff(&dense) < 1e-10, "circuit {circuit:?}");
    }

    #[test]
    fn zero_state_matches_dense() {
        for d in [3, 5] {
            assert_matches_dense(&[], dim(d, 2));
        }
    }

    #[test]
    fn map_direction_calibration() {
        // F|0⟩ is the momentum eigenstate p = 0: W ∝ δ(x_p).
        let s = StabilizerState::simulate(&[GateSpec::f(0)], dim(5, 1)).unwrap();
        for x in s.delta_set().unwrap() {
            assert_eq!(x.get(0), 0);
        }
        // X^2|0⟩ = |2⟩
        let s = StabilizerState::simulate(&[GateSpec::xpow(0, 2)], dim(5, 1)).unwrap();
        assert!(s.delta_set().unwrap().iter().all(|x| x.get(1) == 2));
        // Z^3 F|0⟩ has momentum 3
        let s = StabilizerState::simulate(&[GateSpec::f(0), GateSpec::zpow(0, 3)], dim(5, 1)).unwrap();
        assert!(s.delta_set().unwrap().iter().all(|x| x.get(0) == 3));
        // P after F is where the sign of the update first matters
        assert_matches_dense(&[GateSpec::f(0), GateSpec::p(0)], dim(5, 1));
        assert_matches_dense(&[GateSpec::p(0), GateSpec::f(0), GateSpec::p(0), GateSpec::p(0)], dim(7, 1));
    }

    #[test]
    fn controlled_shift_matches_dense() {
        assert_matches_dense(&[GateSpec::f(0), GateSpec::c(0, 1)], dim(3, 2));
        assert_matches_dense(&[GateSpec::f(1), GateSpec::p(1), GateSpec::c(1, 0), GateSpec::f(0)], dim(5, 2));
    }

    #[test]
    fn full_and_local_update_agree() {
        let dm = dim(5, 3);
        let circuit = [GateSpec::f(0), GateSpec::c(0, 2), GateSpec::p(2), GateSpec::xpow(1, 4), GateSpec::c(2, 1)];
        let mut full = StabilizerState::zero_state(dm);
        for g in &circuit {
            full = full.apply_clifford(&catalog(g, dm).unwrap()).unwrap();
        }
        let local = StabilizerState::simulate(&circuit, dm).unwrap();
        assert_eq!(full, local);
    }

    #[test]
    fn t_is_refused() {
        let s = StabilizerState::zero_state(dim(3, 1));
        assert!(matches!(s.apply_gate(&GateSpec::t(0)), Err(Error::NotClifford(_))));
        assert!(matches!(s.apply_clifford(&catalog(&GateSpec::t(0), dim(3, 1)).unwrap()), Err(Error::NotClifford(_))));
    }

    #[test]
    fn degenerate_constraint_is_reported() {
        let dm = dim(3, 1);
        let s = StabilizerState::new(dm, ZdMatrix::zeros(1, 2, 3), ZdVector::zeros(1, 3)).unwrap();
        assert_eq!(s.delta_set(), Err(Error::InvariantViolated { found: 9, expected: 3 }));
    }

    #[test]
    fn support_of_basis_states() {
        let dm = dim(5, 1);
        let zero = support_classification(&DenseState::zero(dm));
        assert_eq!(zero.class, SupportClass::MomentumOnly);
        let plus = support_classification(&DenseState::simulate(&[GateSpec::f(0)], dm).unwrap());
        assert_eq!(plus.class, SupportClass::PositionOnly);
        let s = StabilizerState::zero_state(dm).support().unwrap();
        assert_eq!(s, zero);
    }

    #[test]
    fn support_from_delta_set_matches_dense() {
        let dm = dim(3, 2);
        let ghz = [GateSpec::f(0), GateSpec::c(0, 1)];
        let a = StabilizerState::simulate(&ghz, dm).unwrap().support().unwrap();
        assert_eq!(a, support_classification(&DenseState::simulate(&ghz, dm).unwrap()));
        assert_eq!(a.class, SupportClass::Neither);
        assert!(!a.has_neither_qudit());
        // a quadratic phase spreads the momentum support
        let circuit = [GateSpec::f(0), GateSpec::c(0, 1), GateSpec::p(1)];
        let a = StabilizerState::simulate(&circuit, dm).unwrap().support().unwrap();
        assert_eq!(a, support_classification(&DenseState::simulate(&circuit, dm).unwrap()));
        assert_eq!(a.class, SupportClass::MomentumOnly);
    }

    #[test]
    fn gaussian_plane_wave_convention() {
        // ω^{q} in the position basis has Wigner support on x_p = 1
        let dm = dim(5, 1);
        let form = GaussianForm {
            basis: vec![Quadrature::Position],
            theta: ZdMatrix::zeros(1, 1, 5),
            eta: ZdVector::from_i64(&[1], 5),
        };
        let w = wigner_pure(&gaussian_state(&form, dm).unwrap()).unwrap();
        for idx in w.support(1e-12) {
            assert_eq!(w.point(idx)[0], 1);
        }
        // a momentum-basis delta-free Gaussian is the same state as its position transform
        let form = GaussianForm { basis: vec![Quadrature::Momentum], ..form };
        let psi = gaussian_state(&form, dm).unwrap();
        assert!((psi.amplitudes()[4].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn search_recovers_forms() {
        let dm = dim(5, 2);
        let form = GaussianForm {
            basis: vec![Quadrature::Momentum, Quadrature::Position],
            theta: ZdMatrix::from_rows(&[vec![2, 1], vec![1, 3]], 5).unwrap(),
            eta: ZdVector::from_i64(&[4, 1], 5),
        };
        let psi = gaussian_state(&form, dm).unwrap();
        let found = mixed_representation_search(&psi).unwrap();
        let rebuilt = gaussian_state(&found, dm).unwrap();
        assert!(rebuilt.distance_up_to_phase(&psi) < 1e-9);
        let zero = mixed_representation_search(&DenseState::zero(dm)).unwrap();
        assert_eq!(zero.basis, vec![Quadrature::Momentum; 2]);
    }

    #[test]
    fn non_stabilizer_has_no_form() {
        let dm = dim(3, 1);
        let psi = DenseState::simulate(&[GateSpec::f(0), GateSpec::t(0)], dm).unwrap();
        assert_eq!(mixed_representation_search(&psi), Err(Error::NoGaussianForm));
        assert!(!is_stabilizer(&psi));
    }

    fn clifford_gate(n: usize) -> impl Strategy<Value = GateSpec> {
        (0..5u8, 0..n, 0..n, 1..5u64).prop_filter_map("distinct targets", move |(k, a, b, pow)| match k {
            0 => Some(GateSpec::f(a)),
            1 => Some(GateSpec::p(a)),
            2 => Some(GateSpec::zpow(a, pow)),
            3 => Some(GateSpec::xpow(a, pow)),
            _ => (a != b).then(|| GateSpec::c(a, b)),
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn stabilizer_matches_dense(circuit in proptest::collection::vec(clifford_gate(2), 0..10), d in prop::sample::select(vec![3u64, 5, 7])) {
            let dm = dim(d, 2);
            let s = StabilizerState::simulate(&circuit, dm).unwrap();
            let w = s.wigner_table().unwrap();
            let dense = DenseState::simulate(&circuit, dm).unwrap();
            prop_assert!(w.max_abs_diff(&wigner_pure(&dense).unwrap()) < 1e-10);
            prop_assert!(w.values().iter().all(|&v| v >= 0.0));
            prop_assert!((w.total() - 1.0).abs() < 1e-12);
            prop_assert!(is_stabilizer(&dense));
        }
    }
}
