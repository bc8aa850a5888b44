//! Sixteen-setting two-qubit Pauli tomography with linear inversion and
//! Bell-state fidelities.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::linalg::{kron2, pauli, CMat2, CMat4};
use crate::scalar::{re, Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix<T: Real>(self) -> CMat2<T> {
        match self {
            Pauli::I => pauli::i(),
            Pauli::X => pauli::x(),
            Pauli::Y => pauli::y(),
            Pauli::Z => pauli::z(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(c)
    }
}

/// `σ_a ⊗ σ_b`.
pub fn pauli_pair<T: Real>(a: Pauli, b: Pauli) -> CMat4<T> {
    kron2(&a.matrix(), &b.matrix())
}

/// The sixteen settings in measurement order.
pub fn settings() -> impl Iterator<Item = (Pauli, Pauli)> {
    Pauli::ALL.into_iter().flat_map(|a| Pauli::ALL.into_iter().map(move |b| (a, b)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TomographyRecord<T> {
    pub expectations: BTreeMap<(Pauli, Pauli), T>,
    /// Shots per setting; 0 means exact expectation values.
    pub shots: u64,
}

/// Expectation values of all sixteen Pauli pairs. With `shots = 0` they are
/// exact; otherwise each setting is estimated from `shots` binomial ±1
/// outcomes drawn from a generator seeded with `seed`.
pub fn measure_expectations<T: Real>(rho: &CMat4<T>, shots: u64, seed: u64) -> TomographyRecord<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut expectations = BTreeMap::new();
    for (a, b) in settings() {
        if (a, b) == (Pauli::I, Pauli::I) {
            // normalization, not a measurement
            expectations.insert((a, b), T::one());
            continue;
        }
        let exact = rho.expectation(&pauli_pair(a, b));
        let v = if shots == 0 {
            exact
        } else {
            let p = ((1.0 + exact.to_f64_lossy()) * 0.5).clamp(0.0, 1.0);
            let k = Binomial::new(shots, p)
                .expect("probability clamped to [0,1]")
                .sample(&mut rng);
            T::lit(2.0 * k as f64 / shots as f64 - 1.0)
        };
        expectations.insert((a, b), v);
    }
    TomographyRecord { expectations, shots }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BellState {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiPlus,
        BellState::PsiMinus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BellState::PsiPlus => "psi_plus",
            BellState::PsiMinus => "psi_minus",
            BellState::PhiPlus => "phi_plus",
            BellState::PhiMinus => "phi_minus",
        }
    }

    /// `Ψ± = (|01⟩ ± |10⟩)/√2`, `Φ± = (|00⟩ ± |11⟩)/√2`.
    pub fn ket<T: Real>(self) -> [Cx<T>; 4] {
        let h = T::FRAC_1_SQRT_2();
        let z = T::zero();
        match self {
            BellState::PsiPlus => [re(z), re(h), re(h), re(z)],
            BellState::PsiMinus => [re(z), re(h), re(-h), re(z)],
            BellState::PhiPlus => [re(h), re(z), re(z), re(h)],
            BellState::PhiMinus => [re(h), re(z), re(z), re(-h)],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionResult<T> {
    pub rho_est: CMat4<T>,
    pub fidelities: BTreeMap<BellState, T>,
    /// Whether `rho_est` is positive semidefinite within `1e-10`.
    pub physical: bool,
}

/// `ρ = ¼ Σ ⟨σ_a⊗σ_b⟩ σ_a⊗σ_b`.
pub fn linear_reconstruct<T: Real>(record: &TomographyRecord<T>) -> Result<ReconstructionResult<T>> {
    let mut rho = CMat4::zeros();
    for (a, b) in settings() {
        let v = record
            .expectations
            .get(&(a, b))
            .ok_or_else(|| Error::IncompleteRecord(format!("{a}{b}")))?;
        rho = rho + pauli_pair::<T>(a, b).scale_re(*v);
    }
    let rho_est = rho.scale_re(T::lit(0.25));
    let fidelities = BellState::ALL
        .into_iter()
        .map(|b| (b, bell_fidelity(&rho_est, b)))
        .collect();
    let physical = rho_est.min_eigenvalue() >= -T::tol_floor(1e-10, 16.0);
    Ok(ReconstructionResult {
        rho_est,
        fidelities,
        physical,
    })
}

/// `⟨Ψ|ρ|Ψ⟩` clipped to `[0, 1]`.
pub fn bell_fidelity<T: Real>(rho: &CMat4<T>, target: BellState) -> T {
    rho.sandwich(&target.ket()).re.max(T::zero()).min(T::one())
}

/// Real and imaginary parts of `ρ`, basis order `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport<T> {
    pub re: [[T; 4]; 4],
    pub im: [[T; 4]; 4],
}

pub fn density_matrix_report<T: Real>(result: &ReconstructionResult<T>) -> DensityReport<T> {
    let m = &result.rho_est;
    DensityReport {
        re: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)].re)),
        im: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)].im)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{half_iswap_target, TwoQubitState};

    #[test]
    fn maximally_mixed_expectations() {
        let rec = measure_expectations(&TwoQubitState::<f64>::maximally_mixed().rho, 0, 0);
        for ((a, b), v) in &rec.expectations {
            let expect = if (*a, *b) == (Pauli::I, Pauli::I) { 1.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-15);
        }
        let r = linear_reconstruct(&rec).unwrap();
        assert!(r.rho_est.max_abs_diff(&TwoQubitState::maximally_mixed().rho) < 1e-15);
        for f in r.fidelities.values() {
            assert!((f - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn singlet_correlations() {
        let rho = TwoQubitState::pure(&BellState::PsiMinus.ket::<f64>()).rho;
        let rec = measure_expectations(&rho, 0, 0);
        for ((a, b), v) in &rec.expectations {
            let expect = match (a, b) {
                (Pauli::I, Pauli::I) => 1.0,
                (x, y) if x == y => -1.0,
                _ => 0.0,
            };
            assert!((v - expect).abs() < 1e-15, "{a}{b}");
        }
        let r = linear_reconstruct(&rec).unwrap();
        assert!((r.fidelities[&BellState::PsiMinus] - 1.0).abs() < 1e-15);
        assert!(r.physical);
    }

    #[test]
    fn missing_setting_is_reported() {
        let mut rec = measure_expectations(&TwoQubitState::<f64>::basis(0).rho, 0, 0);
        rec.expectations.remove(&(Pauli::X, Pauli::Y));
        assert_eq!(linear_reconstruct(&rec), Err(Error::IncompleteRecord("XY".into())));
    }

    #[test]
    fn sampling_is_seeded() {
        let rho = TwoQubitState::pure(&BellState::PsiMinus.ket::<f64>()).rho;
        let a = measure_expectations(&rho, 1000, 7);
        let b = measure_expectations(&rho, 1000, 7);
        let c = measure_expectations(&rho, 1000, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.expectations[&(Pauli::I, Pauli::I)], 1.0);
    }

    #[test]
    fn report_layout() {
        let rho = TwoQubitState::pure(&BellState::PsiMinus.ket::<f64>()).rho;
        let r = linear_reconstruct(&measure_expectations(&rho, 0, 0)).unwrap();
        let rep = density_matrix_report(&r);
        assert!((rep.re[1][1] - 0.5).abs() < 1e-15 && (rep.re[2][2] - 0.5).abs() < 1e-15);
        assert!((rep.re[1][2] + 0.5).abs() < 1e-15 && (rep.re[2][1] + 0.5).abs() < 1e-15);
        assert!(rep.im.iter().flatten().all(|v| v.abs() < 1e-15));

        let rho = TwoQubitState::pure(&half_iswap_target(std::f64::consts::FRAC_PI_4)).rho;
        let rep = density_matrix_report(&linear_reconstruct(&measure_expectations(&rho, 0, 0)).unwrap());
        let (x, y) = (rep.re[1][2], rep.im[1][2]);
        assert!((x.hypot(y) - 0.5).abs() < 1e-15);
        assert!(x.abs() > 0.1 && y.abs() > 0.1);
        for k in 0..4 {
            assert_eq!(rep.im[k][k], 0.0);
        }
    }
}
