//! Seeded circuit generators shared by the benchmarks.

use qws_core::GateSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random F/P/C/Z/X circuit on `n` qudits.
pub fn random_clifford(n: usize, d: u64, len: usize, seed: u64) -> Vec<GateSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| clifford_gate(&mut rng, n, d)).collect()
}

fn clifford_gate(rng: &mut ChaCha8Rng, n: usize, d: u64) -> GateSpec {
    let a = rng.random_range(0..n);
    match rng.random_range(0..if n > 1 { 5 } else { 4 }) {
        0 => GateSpec::f(a),
        1 => GateSpec::p(a),
        2 => GateSpec::zpow(a, rng.random_range(1..d)),
        3 => GateSpec::xpow(a, rng.random_range(1..d)),
        _ => GateSpec::c(a, (a + rng.random_range(1..n)) % n),
    }
}

/// Random Clifford circuit with `t_count` T gates spread through it.
pub fn random_with_t(n: usize, d: u64, len: usize, t_count: usize, seed: u64) -> Vec<GateSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circuit: Vec<GateSpec> = (0..len).map(|_| clifford_gate(&mut rng, n, d)).collect();
    for _ in 0..t_count {
        let pos = rng.random_range(0..=circuit.len());
        circuit.insert(pos, GateSpec::t(rng.random_range(0..n)));
    }
    circuit
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_and_valid() {
        let a = random_clifford(3, 5, 50, 7);
        assert_eq!(a, random_clifford(3, 5, 50, 7));
        assert!(a.iter().all(|g| g.kind.is_clifford() && g.targets.iter().all(|&t| t < 3)));
        let b = random_with_t(2, 3, 10, 2, 1);
        assert_eq!(b.iter().filter(|g| !g.kind.is_clifford()).count(), 2);
    }
}
