//! Translation and reflection operators, the chord and center representations
//! of operators, and Wigner functions of pure states.
//!
//! Conventions, with `h = inv(2) = (d+1)/2`:
//!
//! * `T(ξ) = ω^{-h ξ_p·ξ_q} Z^{ξ_p} X^{ξ_q}`, which acts as
//!   `T(ξ)|k⟩ = ω^{ξ_p·(k + h ξ_q)} |k + ξ_q⟩`.
//! * `R(x) = d^{-n} Σ_ξ ω^{ξᵀJx} T(ξ)`, which collapses to
//!   `R(x)|k⟩ = ω^{2 x_p·(x_q - k)} |2x_q - k⟩`.
//! * `A_ξ = d^{-n} Tr(T(ξ)† A)` and `A_x = d^{-n} Tr(R(x)† A)`, inverted by
//!   `A = Σ_ξ A_ξ T(ξ)` and `A = Σ_x A_x R(x)`.
//!
//! Tables are indexed by phase-space points `(x_p, x_q)` in row-major order,
//! `x_p` of qudit 0 varying slowest.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dense::{DenseOperator, DenseState, RootTable};
use crate::zmod::{point_from_index, Dim, ZdVector};
use crate::{Error, Result};

macro_rules! phase_space_table {
    ($(#[$meta:meta])* $name:ident, $value:ty) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            dim: Dim,
            values: Vec<$value>,
        }

        impl $name {
            pub fn new(dim: Dim, values: Vec<$value>) -> Result<Self> {
                if values.len() as u128 != dim.phase_space_points() {
                    return Err(Error::ShapeMismatch(format!(
                        "{} values for {} phase-space points",
                        values.len(),
                        dim.phase_space_points()
                    )));
                }
                Ok(Self { dim, values })
            }

            pub fn dim(&self) -> Dim {
                self.dim
            }

            pub fn values(&self) -> &[$value] {
                &self.values
            }

            pub fn len(&self) -> usize {
                self.values.len()
            }

            pub fn is_empty(&self) -> bool {
                self.values.is_empty()
            }

            /// Value at a phase-space point `(x_p, x_q)`.
            pub fn at(&self, point: &[u64]) -> $value {
                self.values[crate::zmod::point_index(point, self.dim.d())]
            }

            /// The phase-space point stored at `index`.
            pub fn point(&self, index: usize) -> Vec<u64> {
                point_from_index(index, self.dim.d(), 2 * self.dim.n())
            }
        }
    };
}

phase_space_table!(
    /// Chord representation `A_ξ` over all chords.
    ChordTable,
    Complex64
);
phase_space_table!(
    /// Center (Weyl) representation `A_x` over all centers.
    CenterTable,
    Complex64
);
phase_space_table!(
    /// Real Wigner function of a pure state.
    WignerTable,
    f64
);

impl CenterTable {
    /// Largest entrywise distance to `other` after removing a global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> Result<f64> {
        crate::dense::phase_aligned_distance(&self.values, &other.values)
    }
}

impl WignerTable {
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Indices of points whose value exceeds `tol` in magnitude.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.values.iter().enumerate().filter(|(_, v)| v.abs() > tol).map(|(i, _)| i).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn check_point(v: &ZdVector, dim: Dim) -> Result<()> {
    if v.len() != 2 * dim.n() || v.modulus() != dim.d() {
        return Err(Error::ShapeMismatch(format!("phase-space vector of length {} for {} qudit(s)", v.len(), dim.n())));
    }
    Ok(())
}

/// Split phase-space digits into per-qudit `(p, q)` pairs.
fn split(point: &[u64], n: usize) -> (&[u64], &[u64]) {
    point.split_at(n)
}

/// Computational index digits, qudit 0 first.
fn digits(index: usize, dim: Dim) -> Vec<u64> {
    point_from_index(index, dim.d(), dim.n())
}

fn join(digits: &[u64], d: u64) -> usize {
    crate::zmod::point_index(digits, d)
}

/// Phase exponent and image index of `T(ξ)|k⟩`.
fn translate(xi_p: &[u64], xi_q: &[u64], k: &[u64], dim: Dim) -> (i64, usize) {
    let d = dim.d();
    let h = dim.half();
    let mut exponent = 0i64;
    let mut image = Vec::with_capacity(k.len());
    for i in 0..k.len() {
        let shifted = (k[i] + xi_q[i]) % d;
        image.push(shifted);
        // ξ_p (k + h ξ_q)
        let arg = (k[i] as u128 + h as u128 * xi_q[i] as u128) % d as u128;
        exponent += ((xi_p[i] as u128 * arg) % d as u128) as i64;
    }
    (exponent, join(&image, d))
}

/// Phase exponent and image index of `R(x)|k⟩`.
fn reflect(x_p: &[u64], x_q: &[u64], k: &[u64], dim: Dim) -> (i64, usize) {
    let d = dim.d() as i64;
    let mut exponent = 0i64;
    let mut image = Vec::with_capacity(k.len());
    for i in 0..k.len() {
        let (p, q, ki) = (x_p[i] as i64, x_q[i] as i64, k[i] as i64);
        image.push((2 * q - ki).rem_euclid(d) as u64);
        exponent += (2 * p * (q - ki)).rem_euclid(d);
    }
    (exponent, join(&image, dim.d()))
}

/// Weyl translation `T(ξ)` for `ξ = (ξ_p, ξ_q)`.
pub fn translation_op(xi: &ZdVector, dim: Dim) -> Result<DenseOperator> {
    check_point(xi, dim)?;
    let omega = RootTable::new(dim.d());
    let (xi_p, xi_q) = split(xi.entries(), dim.n());
    let mut op = DenseOperator::zeros(dim);
    for k in 0..dim.hilbert_size() {
        let (e, image) = translate(xi_p, xi_q, &digits(k, dim), dim);
        op.set(image, k, omega.pow(e));
    }
    Ok(op)
}

/// Reflection `R(x)` through the center `x = (x_p, x_q)`.
pub fn reflection_op(x: &ZdVector, dim: Dim) -> Result<DenseOperator> {
    check_point(x, dim)?;
    let omega = RootTable::new(dim.d());
    let (x_p, x_q) = split(x.entries(), dim.n());
    let mut op = DenseOperator::zeros(dim);
    for k in 0..dim.hilbert_size() {
        let (e, image) = reflect(x_p, x_q, &digits(k, dim), dim);
        op.set(image, k, omega.pow(e));
    }
    Ok(op)
}

/// `R(x)ψ` with the reflection acting only on the qudits in `targets`.
pub(crate) fn reflect_state_local(x: &[u64], targets: &[usize], psi: &DenseState) -> Vec<Complex64> {
    let dim = psi.dim();
    let d = dim.d() as i64;
    let k = targets.len();
    let omega = RootTable::new(dim.d());
    let (x_p, x_q) = x.split_at(k);
    let mut out = vec![Complex64::default(); dim.hilbert_size()];
    for (idx, amp) in psi.amplitudes().iter().enumerate() {
        let mut dig = digits(idx, dim);
        let mut e = 0i64;
        for (i, &t) in targets.iter().enumerate() {
            let (p, q, kt) = (x_p[i] as i64, x_q[i] as i64, dig[t] as i64);
            e += (2 * p * (q - kt)).rem_euclid(d);
            dig[t] = (2 * q - kt).rem_euclid(d) as u64;
        }
        out[join(&dig, dim.d())] += omega.pow(e) * amp;
    }
    out
}

fn check_operator(a: &DenseOperator) -> Result<Dim> {
    let dim = a.dim();
    dim.check_phase_space(crate::DEFAULT_ENUMERATION_CAP)?;
    Ok(dim)
}

/// `A_ξ = d^{-n} Tr(T(ξ)† A)` for every chord.
pub fn chord_repr(a: &DenseOperator) -> Result<ChordTable> {
    let dim = check_operator(a)?;
    let n = dim.n();
    let omega = RootTable::new(dim.d());
    let norm = (dim.hilbert_size() as f64).recip();
    let values = (0..dim.phase_space_points() as usize)
        .into_par_iter()
        .map(|idx| {
            let xi = point_from_index(idx, dim.d(), 2 * n);
            let (xi_p, xi_q) = split(&xi, n);
            let sum: Complex64 = (0..dim.hilbert_size())
                .map(|k| {
                    let (e, image) = translate(xi_p, xi_q, &digits(k, dim), dim);
                    omega.pow(-e) * a.get(image, k)
                })
                .sum();
            sum * norm
        })
        .collect();
    ChordTable::new(dim, values)
}

/// `A_x = d^{-n} Tr(R(x)† A)` for every center.
pub fn center_repr(a: &DenseOperator) -> Result<CenterTable> {
    let dim = check_operator(a)?;
    let n = dim.n();
    let omega = RootTable::new(dim.d());
    let norm = (dim.hilbert_size() as f64).recip();
    let values = (0..dim.phase_space_points() as usize)
        .into_par_iter()
        .map(|idx| {
            let x = point_from_index(idx, dim.d(), 2 * n);
            let (x_p, x_q) = split(&x, n);
            let sum: Complex64 = (0..dim.hilbert_size())
                .map(|k| {
                    let (e, image) = reflect(x_p, x_q, &digits(k, dim), dim);
                    omega.pow(-e) * a.get(image, k)
                })
                .sum();
            sum * norm
        })
        .collect();
    CenterTable::new(dim, values)
}

/// `Σ_x A_x R(x)`, the inverse of [`center_repr`].
pub fn reconstruct_from_center(tbl: &CenterTable) -> Result<DenseOperator> {
    let dim = tbl.dim();
    let n = dim.n();
    let omega = RootTable::new(dim.d());
    let mut op = DenseOperator::zeros(dim);
    for (idx, w) in tbl.values().iter().enumerate() {
        if *w == Complex64::default() {
            continue;
        }
        let x = point_from_index(idx, dim.d(), 2 * n);
        let (x_p, x_q) = split(&x, n);
        for k in 0..dim.hilbert_size() {
            let (e, image) = reflect(x_p, x_q, &digits(k, dim), dim);
            op.set(image, k, op.get(image, k) + w * omega.pow(e));
        }
    }
    Ok(op)
}

/// `Σ_ξ A_ξ T(ξ)`, the inverse of [`chord_repr`].
pub fn reconstruct_from_chord(tbl: &ChordTable) -> Result<DenseOperator> {
    let dim = tbl.dim();
    let n = dim.n();
    let omega = RootTable::new(dim.d());
    let mut op = DenseOperator::zeros(dim);
    for (idx, w) in tbl.values().iter().enumerate() {
        if *w == Complex64::default() {
            continue;
        }
        let xi = point_from_index(idx, dim.d(), 2 * n);
        let (xi_p, xi_q) = split(&xi, n);
        for k in 0..dim.hilbert_size() {
            let (e, image) = translate(xi_p, xi_q, &digits(k, dim), dim);
            op.set(image, k, op.get(image, k) + w * omega.pow(e));
        }
    }
    Ok(op)
}

/// `ξᵀJx = ξ_q·x_p - ξ_p·x_q` as an exponent of ω.
fn symplectic_exponent(xi: &[u64], x: &[u64], n: usize) -> i64 {
    (0..n).map(|i| xi[n + i] as i64 * x[i] as i64 - xi[i] as i64 * x[n + i] as i64).sum()
}

fn fourier(dim: Dim, input: &[Complex64], sign: i64) -> Vec<Complex64> {
    let n = dim.n();
    let d = dim.d();
    let omega = RootTable::new(d);
    let norm = (dim.hilbert_size() as f64).recip();
    let points = dim.phase_space_points() as usize;
    (0..points)
        .into_par_iter()
        .map(|out_idx| {
            let x = point_from_index(out_idx, d, 2 * n);
            let sum: Complex64 = input
                .iter()
                .enumerate()
                .map(|(in_idx, v)| {
                    let xi = point_from_index(in_idx, d, 2 * n);
                    omega.pow(sign * (symplectic_exponent(&xi, &x, n) % d as i64)) * v
                })
                .sum();
            sum * norm
        })
        .collect()
}

/// Center table from a chord table: `A_x = d^{-n} Σ_ξ ω^{-ξᵀJx} A_ξ`.
///
/// The kernel sign is the one that makes this agree with [`center_repr`]
/// under the trace definitions above.
pub fn symplectic_fourier(tbl: &ChordTable) -> Result<CenterTable> {
    let dim = tbl.dim();
    dim.check_phase_space(crate::DEFAULT_ENUMERATION_CAP)?;
    CenterTable::new(dim, fourier(dim, tbl.values(), -1))
}

/// Inverse of [`symplectic_fourier`], with the sign-reversed kernel.
pub fn inverse_symplectic_fourier(tbl: &CenterTable) -> Result<ChordTable> {
    let dim = tbl.dim();
    dim.check_phase_space(crate::DEFAULT_ENUMERATION_CAP)?;
    ChordTable::new(dim, fourier(dim, tbl.values(), 1))
}

/// Wigner function of a pure state,
/// `W(x) = d^{-n} Σ_{ξ_q} ω^{-ξ_q·x_p} ψ(x_q + h ξ_q) ψ*(x_q - h ξ_q)` with `h = (d+1)/2`.
pub fn wigner_pure(psi: &DenseState) -> Result<WignerTable> {
    let dim = psi.dim();
    dim.check_phase_space(crate::DEFAULT_ENUMERATION_CAP)?;
    let n = dim.n();
    let d = dim.d();
    let h = dim.half();
    let size = dim.hilbert_size();
    let omega = RootTable::new(d);
    let norm = (size as f64).recip();
    let amps = psi.amplitudes();
    let half_shifts: Vec<Vec<u64>> =
        (0..size).map(|i| point_from_index(i, d, n).into_iter().map(|v| (h * v) % d).collect()).collect();
    // For each x_q, correlate ψ(x_q + hξ)ψ*(x_q - hξ) over ξ and transform ξ -> x_p.
    let columns: Vec<Vec<Complex64>> = (0..size)
        .into_par_iter()
        .map(|xq_idx| {
            let x_q = point_from_index(xq_idx, d, n);
            let mut plus = vec![0u64; n];
            let mut minus = vec![0u64; n];
            let mut column: Vec<Complex64> = half_shifts
                .iter()
                .map(|shift| {
                    for i in 0..n {
                        plus[i] = (x_q[i] + shift[i]) % d;
                        minus[i] = (x_q[i] + d - shift[i]) % d;
                    }
                    amps[join(&plus, d)] * amps[join(&minus, d)].conj()
                })
                .collect();
            dft_along_each_qudit(&mut column, d, n, &omega, -1);
            column
        })
        .collect();
    let mut values = vec![0.0; size * size];
    for (xq_idx, column) in columns.iter().enumerate() {
        for (xp_idx, v) in column.iter().enumerate() {
            debug_assert!(v.im.abs() * norm < 1e-9, "Wigner value with imaginary part {}", v.im);
            values[xp_idx * size + xq_idx] = v.re * norm;
        }
    }
    WignerTable::new(dim, values)
}

/// In-place unnormalized DFT `g(k) = Σ_j ω^{sign·j·k} f(j)` on every qudit axis.
fn dft_along_each_qudit(data: &mut [Complex64], d: u64, n: usize, omega: &RootTable, sign: i64) {
    let du = d as usize;
    let mut scratch = vec![Complex64::default(); du];
    for axis in 0..n {
        let stride = du.pow((n - 1 - axis) as u32);
        for base in 0..data.len() {
            if !(base / stride).is_multiple_of(du) {
                continue;
            }
            for (k, out) in scratch.iter_mut().enumerate() {
                *out = (0..du).map(|j| omega.pow(sign * (j * k) as i64) * data[base + j * stride]).sum();
            }
            for (k, v) in scratch.iter().enumerate() {
                data[base + k * stride] = *v;
            }
        }
    }
}
