//! Resonator modes between the qubit ports, the flux-odd frequency shift
//! produced by `c_3`, and the complex qubit-qubit coupling mediated by the
//! resonator Green's function.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::CMat2;
use crate::scalar::{cx, re, signum0, Cx, Real};

/// One standing-wave mode split into its `+k` and `−k` branches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode<T> {
    pub k: T,
    /// Bare frequency of the `+k` branch.
    pub omega_k: T,
    /// Bare frequency of the `−k` branch (equal to `omega_k` unless set).
    pub omega_minus_k: T,
    pub u_plus: Cx<T>,
    pub u_minus: Cx<T>,
}

impl<T: Real> Mode<T> {
    /// Symmetric mode, `u_± = 1/√2`.
    pub fn new(k: T, omega_k: T) -> Self {
        let h = T::FRAC_1_SQRT_2();
        Mode {
            k,
            omega_k,
            omega_minus_k: omega_k,
            u_plus: re(h),
            u_minus: re(h),
        }
    }

    pub fn with_zeta(self, zeta: T) -> Self {
        let (p, m) = branch_amplitudes(zeta);
        Mode {
            u_plus: re(p),
            u_minus: re(m),
            ..self
        }
    }

    /// `|u_+|² − |u_−|²`.
    pub fn imbalance(&self) -> T {
        self.u_plus.norm_sqr() - self.u_minus.norm_sqr()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet<T> {
    pub modes: Vec<Mode<T>>,
    pub kappa: T,
    pub phi_zpf: T,
}

impl<T: Real> ModeSet<T> {
    /// One mode with `k = π / (2 d)`, so `k·d = π/2` for ports a distance
    /// `d` apart.
    pub fn quarter_wave(d: T, omega_k: T, kappa: T, phi_zpf: T) -> Self {
        ModeSet {
            modes: vec![Mode::new(T::FRAC_PI_2() / d, omega_k)],
            kappa,
            phi_zpf,
        }
    }

    /// Applies the flux-dependent branch asymmetry to every mode.
    pub fn with_asymmetry(mut self, model: &AsymmetryModel<T>, phi_b: T) -> Self {
        let zeta = mode_asymmetry(model, phi_b);
        for m in &mut self.modes {
            *m = m.with_zeta(zeta);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::EmptyModeSet);
        }
        if !(self.kappa > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be positive (got {})",
                self.kappa
            )));
        }
        for (i, m) in self.modes.iter().enumerate() {
            if !(m.omega_k > T::zero() && m.omega_minus_k > T::zero()) {
                return Err(Error::InvalidParameter(format!(
                    "mode {i}: omega_k must be positive"
                )));
            }
            let norm = m.u_plus.norm_sqr() + m.u_minus.norm_sqr();
            if (norm - T::one()).abs() > T::tol_floor(1e-12, 8.0) {
                return Err(Error::InvalidParameter(format!(
                    "mode {i}: |u_plus|^2 + |u_minus|^2 must be 1 (got {norm})"
                )));
            }
        }
        Ok(())
    }

    fn first(&self) -> Result<&Mode<T>> {
        self.modes.first().ok_or(Error::EmptyModeSet)
    }
}

/// Parametrizes the branch asymmetry `ζ(φ_b) = ζ₀ sign(φ_b) tanh(|φ_b|/φ_s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymmetryModel<T> {
    pub zeta0: T,
    pub phi_s: T,
}

impl<T: Real> AsymmetryModel<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.zeta0.abs() < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "zeta0 must lie in (-1,1) (got {})",
                self.zeta0
            )));
        }
        if !(self.phi_s > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "phi_s must be positive (got {})",
                self.phi_s
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexCoupling<T> {
    pub j_r: T,
    pub j_nr: T,
    pub magnitude: T,
    pub phase: T,
}

impl<T: Real> ComplexCoupling<T> {
    pub fn from_parts(j_r: T, j_nr: T) -> Self {
        // -0.0 would put the phase at -π
        let j_nr = j_nr + T::zero();
        ComplexCoupling {
            j_r,
            j_nr,
            magnitude: j_r.hypot(j_nr),
            phase: j_nr.atan2(j_r),
        }
    }

    pub fn from_polar(magnitude: T, phase: T) -> Self {
        ComplexCoupling {
            j_r: magnitude * phase.cos(),
            j_nr: magnitude * phase.sin(),
            magnitude,
            phase,
        }
    }

    /// `|J| e^{iφ}`.
    pub fn value(&self) -> Cx<T> {
        Cx::from_polar(self.magnitude, self.phase)
    }
}

pub fn mode_asymmetry<T: Real>(model: &AsymmetryModel<T>, phi_b: T) -> T {
    model.zeta0 * signum0(phi_b) * (phi_b.abs() / model.phi_s).tanh()
}

/// `(u_+, u_−) = (√((1+ζ)/2), √((1−ζ)/2))`.
pub fn branch_amplitudes<T: Real>(zeta: T) -> (T, T) {
    let h = T::lit(0.5);
    (((T::one() + zeta) * h).sqrt(), ((T::one() - zeta) * h).sqrt())
}

/// `δω = (φ_b c_3 / 2) Φ_zpf³ (|u_+|² − |u_−|²)` for the fundamental mode.
pub fn direction_shift<T: Real>(c3: T, phi_b: T, modes: &ModeSet<T>) -> Result<T> {
    let m = modes.first()?;
    Ok(phi_b * c3 * T::lit(0.5) * modes.phi_zpf.powi(3) * m.imbalance())
}

/// Two-branch matrix `[[ω_k + Λ_kk, Λ_k,−k], [Λ_−k,k, ω_−k + Λ_−k,−k]]` of the
/// fundamental mode with `Λ_ab = (φ_b c_3/2) Φ_zpf³ ψ_a* ψ_b`.
pub fn mode_mixing_matrix<T: Real>(c3: T, phi_b: T, modes: &ModeSet<T>) -> Result<CMat2<T>> {
    let m = modes.first()?;
    let pref = phi_b * c3 * T::lit(0.5) * modes.phi_zpf.powi(3);
    let psi = [m.u_plus, m.u_minus];
    let mut out = CMat2::from_fn(|a, b| psi[a].conj() * psi[b] * pref);
    out[(0, 0)] += re(m.omega_k);
    out[(1, 1)] += re(m.omega_minus_k);
    Ok(out)
}

/// Complex coupling between qubits at `x1` and `x2`, probed at `omega`.
///
/// The reciprocal part sums both branches of every mode with unit-modulus
/// mode functions; the nonreciprocal part is first order in `delta_omega`.
pub fn qubit_coupling<T: Real>(
    g: T,
    omega: T,
    x1: T,
    x2: T,
    modes: &ModeSet<T>,
    delta_omega: T,
) -> Result<ComplexCoupling<T>> {
    if modes.modes.is_empty() {
        return Err(Error::EmptyModeSet);
    }
    if !(g > T::zero()) {
        return Err(Error::InvalidParameter(format!("g must be positive (got {g})")));
    }
    if x1 == x2 {
        return Err(Error::InvalidParameter("port positions must differ".into()));
    }
    let d = x2 - x1;
    let g2 = g * g;
    let mut j_r = T::zero();
    let mut j_nr = T::zero();
    for m in &modes.modes {
        let chi = susceptibility(omega, m.omega_k, modes.kappa);
        let (s, c) = (m.k * d).sin_cos();
        j_r += (chi.re + chi.re) * c;
        j_nr += chi.norm_sqr() * s;
    }
    Ok(ComplexCoupling::from_parts(g2 * j_r, g2 * j_nr * delta_omega))
}

/// Retarded mode response `χ_k(ω) = 1/((ω − ω_k) + iκ)`.
pub fn susceptibility<T: Real>(omega: T, omega_k: T, kappa: T) -> Cx<T> {
    let den = cx(omega - omega_k, kappa);
    if den.is_zero() {
        return cx(T::infinity(), T::zero());
    }
    den.inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn single(zeta: f64) -> ModeSet<f64> {
        let mut m = ModeSet::quarter_wave(1.0, 5.0, 0.1, 0.8);
        m.modes[0] = m.modes[0].with_zeta(zeta);
        m
    }

    #[test]
    fn asymmetry_examples() {
        let model = AsymmetryModel::<f64> { zeta0: 0.5, phi_s: 1.0 };
        assert_eq!(mode_asymmetry(&model, 0.0), 0.0);
        assert!((mode_asymmetry(&model, 50.0) - 0.5).abs() < 1e-15);
        assert!((mode_asymmetry(&model, 1.0) - 0.5 * 1f64.tanh()).abs() < 1e-15);
        assert!((mode_asymmetry(&model, 1.0) - 0.3808).abs() < 1e-4);
        assert_eq!(mode_asymmetry(&model, -0.7), -mode_asymmetry(&model, 0.7));
        let (p, m) = branch_amplitudes(0.3f64);
        assert!((p * p + m * m - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shift_is_odd_and_vanishes_at_zero_bias() {
        let model = AsymmetryModel::<f64> { zeta0: 0.4, phi_s: 0.8 };
        let base = ModeSet::quarter_wave(1.0, 5.0, 0.1, 0.8);
        let at = |b: f64| direction_shift(0.05, b, &base.clone().with_asymmetry(&model, b)).unwrap();
        assert_eq!(at(0.0), 0.0);
        for b in [0.2, 1.0, 2.5] {
            // c_3 is itself odd in φ_b; hold it fixed here and flip its sign
            let p = direction_shift(0.05, b, &base.clone().with_asymmetry(&model, b)).unwrap();
            let m = direction_shift(-0.05, -b, &base.clone().with_asymmetry(&model, -b)).unwrap();
            assert!(p != 0.0);
            assert!((p + m).abs() < 1e-15);
        }
        assert!(at(1.0) > 0.0);
    }

    #[test]
    fn empty_modes_error() {
        let empty = ModeSet::<f64> { modes: vec![], kappa: 1.0, phi_zpf: 1.0 };
        assert_eq!(direction_shift(0.1, 1.0, &empty), Err(Error::EmptyModeSet));
        assert!(matches!(
            qubit_coupling(1.0, 1.0, 0.0, 1.0, &empty, 0.1),
            Err(Error::EmptyModeSet)
        ));
        assert_eq!(empty.validate(), Err(Error::EmptyModeSet));
    }

    #[test]
    fn mixing_matrix_is_hermitian_and_reduces_at_zero_bias() {
        let mut ms = single(0.3);
        ms.modes[0].u_plus = Cx::from_polar(ms.modes[0].u_plus.norm(), 0.7);
        let m = mode_mixing_matrix(0.2, 1.1, &ms).unwrap();
        assert!(m.hermiticity_error() < 1e-14);
        let z = mode_mixing_matrix(0.2, 0.0, &ms).unwrap();
        assert_eq!(z, CMat2::from_real_diag([5.0, 5.0]));
    }

    #[test]
    fn mixing_diagonal_gap_tracks_shift() {
        let ms = single(0.3);
        let m = mode_mixing_matrix(0.2, 1.1, &ms).unwrap();
        let gap = (m[(0, 0)] - m[(1, 1)]).re;
        assert!((gap - direction_shift(0.2, 1.1, &ms).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn quarter_wave_coupling_is_purely_nonreciprocal_on_resonance() {
        let ms = ModeSet::<f64>::quarter_wave(1.0, 5.0, 0.2, 1.0);
        let j = qubit_coupling(0.5, 5.0, 0.0, 1.0, &ms, 0.01).unwrap();
        assert!(j.j_r.abs() < 1e-15);
        assert!((j.j_nr - 0.25 * 0.01 / 0.04).abs() < 1e-15);
        assert!((j.phase - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn no_shift_means_real_coupling() {
        let ms = ModeSet::<f64>::quarter_wave(1.0, 5.0, 0.2, 1.0);
        let j = qubit_coupling(0.5, 4.7, 0.0, 0.6, &ms, 0.0).unwrap();
        assert_eq!(j.j_nr, 0.0);
        assert!(j.phase == 0.0 || (j.phase.abs() - PI).abs() < 1e-15);
    }

    #[test]
    fn polar_and_parts_agree() {
        let c = ComplexCoupling::<f64>::from_polar(2.0, -0.4);
        let d = ComplexCoupling::from_parts(c.j_r, c.j_nr);
        assert!((d.magnitude - 2.0).abs() < 1e-15 && (d.phase + 0.4).abs() < 1e-15);
        assert!((c.value() - Cx::from_polar(2.0, -0.4)).norm() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_modes() {
        let mut ms = single(0.2);
        assert!(ms.validate().is_ok());
        ms.modes[0].u_plus = re(0.9);
        assert!(ms.validate().is_err());
        assert!(AsymmetryModel { zeta0: 1.0, phi_s: 1.0 }.validate().is_err());
        assert!(AsymmetryModel { zeta0: 0.2, phi_s: 0.0 }.validate().is_err());
    }
}
