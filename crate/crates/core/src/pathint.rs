//! Gates as sums of phase-space reflections.
//!
//! Any gate on `k` qudits expands as `U = Σ_x U_x R(x)` over the `d^{2k}`
//! local centers, with `U_x` its center representation. Clifford gates keep a
//! single classical branch (the ℏ⁰ term). Each non-Clifford gate branches
//! into its `d^{2k}` reflections, so a circuit's path count is the product of
//! the per-gate counts.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dense::{build_gate, DenseState, GateKind, GateSpec};
use crate::harmonic::HbarOrder;
use crate::weyl::{center_repr, reflect_state_local};
use crate::zmod::Dim;
use crate::{Error, Result};

/// One gate written as `Σ_x weight(x) R(x)` over its own qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionExpansion {
    pub gate: GateSpec,
    /// `(local center, weight)`, centers ordered `(p_targets, q_targets)`.
    pub terms: Vec<(Vec<u64>, Complex64)>,
}

impl ReflectionExpansion {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Center representation of the gate on `gate.arity()` qudits, one term per center.
pub fn reflection_expansion(gate: &GateSpec, d: u64) -> Result<ReflectionExpansion> {
    let k = gate.kind.arity();
    let local_dim = Dim::new(d, k)?;
    let local_gate = GateSpec::new(gate.kind, (0..k).collect(), gate.power);
    let table = center_repr(&build_gate(&local_gate, local_dim)?)?;
    let terms = table.values().iter().enumerate().map(|(idx, &w)| (table.point(idx), w)).collect();
    Ok(ReflectionExpansion { gate: gate.clone(), terms })
}

/// `Σ_x weight(x) R(x) ψ`, visiting every term once. Returns the state and the
/// number of terms visited.
pub fn apply_reflection_sum(expansion: &ReflectionExpansion, psi: &DenseState) -> Result<(DenseState, u64)> {
    expansion.gate.validate(psi.dim())?;
    let targets = &expansion.gate.targets;
    let parts: Vec<Vec<Complex64>> = expansion
        .terms
        .par_iter()
        .map(|(x, w)| reflect_state_local(x, targets, psi).into_iter().map(|a| a * w).collect())
        .collect();
    let amps = pairwise_sum(parts).unwrap_or_else(|| vec![Complex64::default(); psi.dim().hilbert_size()]);
    Ok((DenseState::from_amplitudes(psi.dim(), amps)?, expansion.terms.len() as u64))
}

/// Fixed-shape pairwise reduction so parallel sums are bit-for-bit repeatable.
fn pairwise_sum(mut parts: Vec<Vec<Complex64>>) -> Option<Vec<Complex64>> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut iter = parts.into_iter();
        while let Some(mut a) = iter.next() {
            if let Some(b) = iter.next() {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop()
}

/// Gate-by-gate simulation: Clifford gates act directly, other gates act as
/// their reflection sum. Returns the final state and the total terms visited.
pub fn simulate(circuit: &[GateSpec], dim: Dim) -> Result<(DenseState, u64)> {
    let mut psi = DenseState::zero(dim);
    let mut visited = 0u64;
    for g in circuit {
        if g.kind.is_clifford() {
            psi.apply_gate(g)?;
            visited += 1;
        } else {
            let (next, count) = apply_reflection_sum(&reflection_expansion(g, dim.d())?, &psi)?;
            psi = next;
            visited += count;
        }
    }
    Ok((psi, visited))
}

/// Explicit sum over every path: one reflection chosen per non-Clifford gate.
/// Returns the final state and the number of complete paths evaluated.
pub fn path_sum(circuit: &[GateSpec], dim: Dim, cap: u128) -> Result<(DenseState, u128)> {
    let report = hbar_report(circuit, dim)?;
    if report.total_terms > cap {
        return Err(Error::SizeLimitExceeded { required: report.total_terms, cap });
    }
    for g in circuit {
        g.validate(dim)?;
    }
    let expansions: Vec<Option<ReflectionExpansion>> = circuit
        .iter()
        .map(|g| if g.kind.is_clifford() { Ok(None) } else { reflection_expansion(g, dim.d()).map(Some) })
        .collect::<Result<_>>()?;

    // Run the Clifford prefix once, then fan out over the first branching gate.
    let mut psi = DenseState::zero(dim);
    let mut start = 0;
    while start < circuit.len() && expansions[start].is_none() {
        psi.apply_gate(&circuit[start])?;
        start += 1;
    }
    let Some(first) = expansions.get(start).and_then(Option::as_ref) else {
        return Ok((psi, 1));
    };
    let leaves: Vec<(Vec<Complex64>, u128)> = first
        .terms
        .par_iter()
        .map(|term| {
            let branch = weighted_reflection(term, &first.gate.targets, &psi)?;
            walk(circuit, &expansions, start + 1, branch)
        })
        .collect::<Result<_>>()?;
    let paths = leaves.iter().map(|(_, c)| c).sum();
    let amps = pairwise_sum(leaves.into_iter().map(|(a, _)| a).collect()).expect("at least one term");
    Ok((DenseState::from_amplitudes(dim, amps)?, paths))
}

fn weighted_reflection(term: &(Vec<u64>, Complex64), targets: &[usize], psi: &DenseState) -> Result<DenseState> {
    let amps = reflect_state_local(&term.0, targets, psi).into_iter().map(|a| a * term.1).collect();
    DenseState::from_amplitudes(psi.dim(), amps)
}

fn walk(
    circuit: &[GateSpec],
    expansions: &[Option<ReflectionExpansion>],
    mut pos: usize,
    mut psi: DenseState,
) -> Result<(Vec<Complex64>, u128)> {
    while pos < circuit.len() {
        match &expansions[pos] {
            None => psi.apply_gate(&circuit[pos])?,
            Some(exp) => {
                let mut parts = Vec::with_capacity(exp.terms.len());
                let mut paths = 0;
                for term in &exp.terms {
                    let (amps, count) = walk(circuit, expansions, pos + 1, weighted_reflection(term, &exp.gate.targets, &psi)?)?;
                    parts.push(amps);
                    paths += count;
                }
                return Ok((pairwise_sum(parts).expect("at least one term"), paths));
            }
        }
        pos += 1;
    }
    Ok((psi.amplitudes().to_vec(), 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateCount {
    pub kind: GateKind,
    pub order: HbarOrder,
    pub terms: u128,
}

/// Per-gate truncation order and path count, with the circuit total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathCountReport {
    pub gates: Vec<GateCount>,
    pub total_terms: u128,
}

pub fn hbar_report(circuit: &[GateSpec], dim: Dim) -> Result<PathCountReport> {
    let mut total: u128 = 1;
    let mut gates = Vec::with_capacity(circuit.len());
    for g in circuit {
        g.validate(dim)?;
        let (order, terms) = if g.kind.is_clifford() {
            (HbarOrder::Zero, 1)
        } else {
            let terms = (dim.d() as u128)
                .checked_pow(2 * g.kind.arity() as u32)
                .ok_or(Error::SizeLimitExceeded { required: u128::MAX, cap: u128::MAX })?;
            (HbarOrder::One, terms)
        };
        total = total.checked_mul(terms).ok_or(Error::SizeLimitExceeded { required: u128::MAX, cap: u128::MAX })?;
        gates.push(GateCount { kind: g.kind, order, terms });
    }
    Ok(PathCountReport { gates, total_terms: total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseOperator;
    use crate::weyl::reflection_op;
    use crate::zmod::ZdVector;

    fn dim(d: u64, n: usize) -> Dim {
        Dim::new(d, n).unwrap()
    }

    #[test]
    fn expansion_reconstructs_gate() {
        for d in [3, 5] {
            let dm = dim(d, 1);
            for g in [GateSpec::t(0), GateSpec::f(0), GateSpec::p(0)] {
                let e = reflection_expansion(&g, d).unwrap();
                assert_eq!(e.len(), (d * d) as usize);
                let mut sum = DenseOperator::zeros(dm);
                for (x, w) in &e.terms {
                    sum = sum.add(&reflection_op(&ZdVector::from_u64(x.clone(), d), dm).unwrap().scale(*w)).unwrap();
                }
                assert!(sum.max_abs_diff(&build_gate(&g, dm).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn reflection_sum_matches_dense_t() {
        let dm = dim(5, 2);
        let psi = DenseState::simulate(&[GateSpec::f(0), GateSpec::f(1), GateSpec::c(0, 1)], dm).unwrap();
        let e = reflection_expansion(&GateSpec::t(1), 5).unwrap();
        let (out, visits) = apply_reflection_sum(&e, &psi).unwrap();
        assert_eq!(visits, 25);
        let mut expected = psi.clone();
        expected.apply_gate(&GateSpec::t(1)).unwrap();
        assert!(out.distance_up_to_phase(&expected) < 1e-12);
    }

    #[test]
    fn path_sum_counts_products() {
        let dm = dim(3, 1);
        let circuit = [GateSpec::f(0), GateSpec::t(0), GateSpec::p(0), GateSpec::t(0)];
        let (psi, paths) = path_sum(&circuit, dm, 1_000).unwrap();
        assert_eq!(paths, 81);
        assert!(psi.distance_up_to_phase(&DenseState::simulate(&circuit, dm).unwrap()) < 1e-12);
        let (_, clifford_only) = path_sum(&[GateSpec::f(0)], dm, 1).unwrap();
        assert_eq!(clifford_only, 1);
        assert!(matches!(path_sum(&circuit, dm, 80), Err(Error::SizeLimitExceeded { required: 81, cap: 80 })));
    }

    #[test]
    fn report_product_rule() {
        let dm = dim(5, 2);
        let circuit = [GateSpec::t(0), GateSpec::c(0, 1), GateSpec::t(1), GateSpec::t(0)];
        let r = hbar_report(&circuit, dm).unwrap();
        assert_eq!(r.total_terms, 25u128.pow(3));
        assert_eq!(r.gates[1].order, HbarOrder::Zero);
        assert_eq!(r.gates[1].terms, 1);
        assert_eq!(hbar_report(&[], dm).unwrap().total_terms, 1);
    }

    #[test]
    fn report_overflow_is_an_error() {
        let dm = dim(15, 1);
        let circuit = vec![GateSpec::t(0); 20];
        assert!(matches!(hbar_report(&circuit, dm), Err(Error::SizeLimitExceeded { .. })));
    }

    #[test]
    fn sequential_simulation_matches_dense() {
        let dm = dim(3, 2);
        let circuit = [GateSpec::f(0), GateSpec::t(0), GateSpec::c(0, 1), GateSpec::t(1), GateSpec::f(1)];
        let (psi, visited) = simulate(&circuit, dm).unwrap();
        assert_eq!(visited, 3 + 9 + 9);
        assert!(psi.distance_up_to_phase(&DenseState::simulate(&circuit, dm).unwrap()) < 1e-12);
    }

    #[test]
    fn parallel_sum_is_repeatable() {
        let dm = dim(5, 1);
        let circuit = [GateSpec::f(0), GateSpec::t(0), GateSpec::f(0), GateSpec::t(0)];
        let a = path_sum(&circuit, dm, 1_000).unwrap().0;
        let b = path_sum(&circuit, dm, 1_000).unwrap().0;
        assert_eq!(a.amplitudes(), b.amplitudes());
    }
}
