//! Asymmetric SQUID: current-phase relation, Josephson potential and the
//! diode observables derived from them.
//!
//! Energies are in units of the gap of junction 1, currents in units of
//! `eΔ/2ħ`, phases in radians.

use crate::error::{Error, Result, Warning};
use crate::scalar::{wrap_angle, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JunctionParams<T> {
    /// Transmission, `0 ≤ τ ≤ 1`.
    pub tau: T,
    /// Superconducting gap.
    pub delta: T,
}

impl<T: Real> JunctionParams<T> {
    pub fn new(tau: T) -> Self {
        JunctionParams { tau, delta: T::one() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau >= T::zero() && self.tau <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "tau must lie in [0,1] (got {})",
                self.tau
            )));
        }
        if !(self.delta > T::zero() && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive (got {})",
                self.delta
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquidConfig<T> {
    pub j1: JunctionParams<T>,
    pub j2: JunctionParams<T>,
    /// Flux bias in radians.
    pub phi_b: T,
    /// `k_B T / Δ`; only the current-phase relation depends on it.
    pub temperature: T,
}

impl<T: Real> SquidConfig<T> {
    pub fn new(tau1: T, tau2: T, phi_b: T) -> Self {
        SquidConfig {
            j1: JunctionParams::new(tau1),
            j2: JunctionParams::new(tau2),
            phi_b,
            temperature: T::zero(),
        }
    }

    pub fn with_phi_b(self, phi_b: T) -> Self {
        SquidConfig { phi_b, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        self.j1.validate()?;
        self.j2.validate()?;
        if !self.phi_b.is_finite() {
            return Err(Error::InvalidParameter("phi_b must be finite".into()));
        }
        if !(self.temperature >= T::zero() && self.temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be >= 0 (got {})",
                self.temperature
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiodeCharacterization<T> {
    pub ic_plus: T,
    pub ic_minus: T,
    pub eta: T,
    pub phi_min: T,
    /// Derivatives `c_1..c_4` of the potential at `phi_min`.
    pub c: [T; 4],
    pub warnings: Vec<Warning>,
}

/// `ε̃(φ) = √(1 − τ sin²(φ/2))`, written through `1 − τ/2 + (τ/2) cos φ`
/// so that it is exactly 2π-periodic.
#[inline]
fn andreev_arg<T: Real>(tau: T, phi: T) -> T {
    let h = tau * T::lit(0.5);
    (T::one() - h + h * phi.cos()).max(T::zero())
}

/// Supercurrent of a single junction.
pub fn junction_cpr<T: Real>(j: &JunctionParams<T>, phi: T, temperature: T) -> T {
    let eps = andreev_arg(j.tau, phi).sqrt();
    if eps == T::zero() {
        return T::zero();
    }
    let i0 = j.delta * j.tau * phi.sin() / eps;
    if temperature > T::zero() {
        i0 * (j.delta * eps / (temperature + temperature)).tanh()
    } else {
        i0
    }
}

/// Zero-temperature Andreev energy `−Δ√(1 − τ sin²(φ/2))`.
pub fn junction_potential<T: Real>(j: &JunctionParams<T>, phi: T) -> T {
    -j.delta * andreev_arg(j.tau, phi).sqrt()
}

/// `[U, U', U'', U''', U'''']` of a single junction at `phi`.
pub fn junction_derivatives<T: Real>(j: &JunctionParams<T>, phi: T) -> [T; 5] {
    let l = T::lit;
    let h = j.tau * l(0.5);
    let (s, c) = phi.sin_cos();
    let a = andreev_arg(j.tau, phi);
    let a1 = -h * s;
    let a2 = -h * c;
    let a3 = h * s;
    let a4 = h * c;
    let r = a.sqrt();
    let m1 = T::one() / r; // A^{-1/2}
    let m3 = m1 / a; // A^{-3/2}
    let m5 = m3 / a;
    let m7 = m5 / a;
    let f0 = r;
    let f1 = l(0.5) * m1 * a1;
    let f2 = l(0.5) * m1 * a2 - l(0.25) * m3 * a1 * a1;
    let f3 = l(0.5) * m1 * a3 - l(0.75) * m3 * a1 * a2 + l(0.375) * m5 * a1 * a1 * a1;
    let f4 = l(0.5) * m1 * a4 - m3 * a1 * a3 - l(0.75) * m3 * a2 * a2
        + l(2.25) * m5 * a1 * a1 * a2
        - l(0.9375) * m7 * a1 * a1 * a1 * a1;
    let d = -j.delta;
    [d * f0, d * f1, d * f2, d * f3, d * f4]
}

/// `U(φ) = U_1(φ) + U_2(φ − φ_b)`.
pub fn squid_potential<T: Real>(s: &SquidConfig<T>, phi: T) -> T {
    junction_potential(&s.j1, phi) + junction_potential(&s.j2, phi - s.phi_b)
}

/// `[U, U', U'', U''', U'''']` of the SQUID potential.
pub fn squid_derivatives<T: Real>(s: &SquidConfig<T>, phi: T) -> [T; 5] {
    let a = junction_derivatives(&s.j1, phi);
    let b = junction_derivatives(&s.j2, phi - s.phi_b);
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4]]
}

/// Total current `I_1(φ) + I_2(φ − φ_b)`.
pub fn squid_cpr<T: Real>(s: &SquidConfig<T>, phi: T) -> T {
    junction_cpr(&s.j1, phi, s.temperature) + junction_cpr(&s.j2, phi - s.phi_b, s.temperature)
}

/// Global minimizer of the SQUID potential on `[−π, π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiMin<T> {
    pub phi: T,
    /// Set when a second minimum is degenerate with the chosen one.
    pub warning: Option<Warning>,
}

pub const PHI_MIN_GRID: usize = 2048;

pub fn find_phi_min<T: Real>(s: &SquidConfig<T>) -> PhiMin<T> {
    let n = PHI_MIN_GRID;
    let step = T::TAU() / T::from_usize_lossy(n);
    let grid: Vec<T> = (0..n)
        .map(|i| -T::PI() + step * T::from_usize_lossy(i))
        .collect();
    let u: Vec<T> = grid.iter().map(|&p| squid_potential(s, p)).collect();

    let mut minima: Vec<(T, T)> = Vec::new();
    for i in 0..n {
        let prev = u[(i + n - 1) % n];
        let next = u[(i + 1) % n];
        if u[i] < prev && u[i] <= next {
            let phi = refine_minimum(s, grid[i], step);
            minima.push((phi, squid_potential(s, phi)));
        }
    }
    if minima.is_empty() {
        // flat potential (both transmissions zero)
        let i = (0..n)
            .min_by(|&a, &b| cmp_min(u[a], grid[a], u[b], grid[b]))
            .unwrap_or(n / 2);
        return PhiMin { phi: grid[i], warning: None };
    }

    let degenerate_tol = T::lit(1e-12);
    minima.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    let best_e = minima[0].1;
    let mut ties: Vec<T> = minima
        .iter()
        .filter(|m| m.1 - best_e <= degenerate_tol)
        .map(|m| m.0)
        .collect();
    // merge refinements that converged to the same point
    ties.dedup_by(|a, b| (*a - *b).abs() < T::lit(1e-9));
    if ties.len() == 1 {
        return PhiMin { phi: ties[0], warning: None };
    }
    let bias_sign = if s.phi_b < T::zero() { -T::one() } else { T::one() };
    ties.sort_by(|&a, &b| {
        let (ma, mb) = (a.abs(), b.abs());
        if (ma - mb).abs() > T::lit(1e-12) {
            ma.partial_cmp(&mb).unwrap_or(std::cmp::Ordering::Equal)
        } else {
            // mirror pair: follow the sign of the bias
            (b * bias_sign).partial_cmp(&(a * bias_sign)).unwrap_or(std::cmp::Ordering::Equal)
        }
    });
    PhiMin {
        phi: ties[0],
        warning: Some(Warning::DegenerateMinimum {
            phi_b: s.phi_b.to_f64_lossy(),
            chosen: ties[0].to_f64_lossy(),
            other: ties[1].to_f64_lossy(),
        }),
    }
}

fn cmp_min<T: Real>(ua: T, pa: T, ub: T, pb: T) -> std::cmp::Ordering {
    ua.partial_cmp(&ub)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(pa.abs().partial_cmp(&pb.abs()).unwrap_or(std::cmp::Ordering::Equal))
}

/// Safeguarded Newton on `U'` inside `[φ₀ − h, φ₀ + h]`.
fn refine_minimum<T: Real>(s: &SquidConfig<T>, phi0: T, h: T) -> T {
    let mut a = phi0 - h;
    let mut b = phi0 + h;
    let da = squid_derivatives(s, a)[1];
    let db = squid_derivatives(s, b)[1];
    if !(da <= T::zero() && db >= T::zero()) {
        return wrap_angle(phi0);
    }
    let mut x = phi0;
    let tol = T::epsilon() * T::lit(8.0);
    for _ in 0..200 {
        let d = squid_derivatives(s, x);
        let (g, gg) = (d[1], d[2]);
        if g == T::zero() {
            break;
        }
        if g < T::zero() {
            a = x;
        } else {
            b = x;
        }
        let newton = x - g / gg;
        let next = if gg > T::zero() && newton > a && newton < b {
            newton
        } else {
            (a + b) * T::lit(0.5)
        };
        let done = (next - x).abs() <= tol * (T::one() + x.abs()) || b - a <= tol;
        x = next;
        if done {
            break;
        }
    }
    wrap_angle(x)
}

/// `c_1..c_4`: derivatives of the SQUID potential at `phi_min`.
pub fn taylor_coefficients<T: Real>(s: &SquidConfig<T>, phi_min: T) -> [T; 4] {
    let d = squid_derivatives(s, phi_min);
    [d[1], d[2], d[3], d[4]]
}

pub const CRITICAL_CURRENT_GRID: usize = 4096;

/// `(I_c⁺, I_c⁻)`: maximum of the total current over a period and the
/// magnitude of its minimum.
pub fn critical_currents<T: Real>(s: &SquidConfig<T>) -> (T, T) {
    let n = CRITICAL_CURRENT_GRID;
    let step = T::TAU() / T::from_usize_lossy(n);
    let mut imax = (T::neg_infinity(), T::zero());
    let mut imin = (T::infinity(), T::zero());
    for i in 0..n {
        let phi = step * T::from_usize_lossy(i);
        let v = squid_cpr(s, phi);
        if v > imax.0 {
            imax = (v, phi);
        }
        if v < imin.0 {
            imin = (v, phi);
        }
    }
    let top = golden_max(|p| squid_cpr(s, p), imax.1 - step, imax.1 + step).max(imax.0);
    let bottom = -golden_max(|p| -squid_cpr(s, p), imin.1 - step, imin.1 + step).max(-imin.0);
    (top, -bottom)
}

fn golden_max<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T) -> T {
    let r = T::lit(0.618_033_988_749_894_8);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if b - a <= T::epsilon() * T::lit(4.0) * (T::one() + a.abs()) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// `η = |(I_c⁺ − I_c⁻)/(I_c⁺ + I_c⁻)|`.
pub fn diode_efficiency<T: Real>(ic_plus: T, ic_minus: T) -> Result<T> {
    if !(ic_plus > T::zero() && ic_minus > T::zero()) {
        return Err(Error::InvalidCurrent {
            ic_plus: ic_plus.to_f64_lossy(),
            ic_minus: ic_minus.to_f64_lossy(),
        });
    }
    Ok(((ic_plus - ic_minus) / (ic_plus + ic_minus)).abs())
}

/// All diode observables for one configuration.
pub fn characterize<T: Real>(s: &SquidConfig<T>) -> Result<DiodeCharacterization<T>> {
    s.validate()?;
    let (ic_plus, ic_minus) = critical_currents(s);
    let eta = diode_efficiency(ic_plus, ic_minus)?;
    let m = find_phi_min(s);
    let c = taylor_coefficients(s, m.phi);
    Ok(DiodeCharacterization {
        ic_plus,
        ic_minus,
        eta,
        phi_min: m.phi,
        c,
        warnings: m.warning.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn fd4(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn cpr_closed_form_values() {
        let j = JunctionParams::<f64>::new(0.5);
        assert_eq!(junction_cpr(&j, 0.0, 0.0), 0.0);
        assert!(junction_cpr(&j, PI, 0.0).abs() < 1e-15);
        let j9 = JunctionParams::<f64>::new(0.9);
        let v = junction_cpr(&j9, FRAC_PI_2, 0.0);
        assert!((v - 0.9 / 0.55f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cpr_is_four_times_potential_slope() {
        let j = JunctionParams::<f64>::new(0.9);
        let slope = fd4(|p| junction_potential(&j, p), FRAC_PI_2, 1e-3);
        assert!((junction_cpr(&j, FRAC_PI_2, 0.0) - 4.0 * slope).abs() < 1e-8);
    }

    #[test]
    fn finite_temperature_suppresses_current() {
        let j = JunctionParams::<f64>::new(0.9);
        let cold = junction_cpr(&j, 1.0, 0.0);
        let warm = junction_cpr(&j, 1.0, 0.2);
        assert!(warm < cold && warm > 0.0);
        let eps = (1.0 - 0.9 * (0.5f64).sin().powi(2)).sqrt();
        assert!((warm - cold * (eps / 0.4).tanh()).abs() < 1e-14);
    }

    #[test]
    fn potential_values() {
        for tau in [0.0, 0.3, 1.0] {
            assert_eq!(junction_potential(&JunctionParams::<f64>::new(tau), 0.0), -1.0);
        }
        assert!(junction_potential(&JunctionParams::<f64>::new(1.0), PI).abs() < 1e-15);
        let v = junction_potential(&JunctionParams::<f64>::new(0.8), PI / 3.0);
        assert!((v + 0.8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn squid_potential_reduces_for_identical_junctions() {
        let s = SquidConfig::<f64>::new(0.7, 0.7, 0.0);
        let j = JunctionParams::<f64>::new(0.7);
        for phi in [-2.0, 0.1, 1.3] {
            assert!((squid_potential(&s, phi) - 2.0 * junction_potential(&j, phi)).abs() < 1e-15);
        }
        let s = SquidConfig::<f64>::new(0.6, 0.6, 1.1);
        for phi in [-2.0, 0.1, 1.3] {
            assert!((squid_potential(&s, 1.1 - phi) - squid_potential(&s, phi)).abs() < 1e-14);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let j = JunctionParams::<f64>::new(0.93);
        for phi in [-2.5, -0.4, 0.0, 0.9, 2.2] {
            let d = junction_derivatives(&j, phi);
            for k in 1..5 {
                let num = fd4(|p| junction_derivatives(&j, p)[k - 1], phi, 1e-4);
                let scale = d[k].abs().max(1e-3);
                assert!((num - d[k]).abs() / scale < 1e-6, "k={k} phi={phi}");
            }
        }
    }

    #[test]
    fn phi_min_symmetric_cases() {
        let m = find_phi_min(&SquidConfig::<f64>::new(0.8, 0.8, 0.0));
        assert_eq!(m.phi, 0.0);
        for b in [-2.0, -0.7, 0.4, 1.9] {
            let m = find_phi_min(&SquidConfig::<f64>::new(0.8, 0.8, b));
            assert!((m.phi - b / 2.0).abs() < 1e-12, "b={b}: {}", m.phi);
        }
    }

    #[test]
    fn phi_min_reference_configuration() {
        let s = SquidConfig::<f64>::new(0.9, 0.5, FRAC_PI_2);
        let m = find_phi_min(&s);
        assert!(m.warning.is_none());
        assert!((m.phi - 0.522_500_189_140_508_3).abs() < 1e-12);
        let c = taylor_coefficients(&s, m.phi);
        assert!(c[0].abs() <= 1e-10);
        assert!(c[1] > 0.0);
        assert!((c[1] - 0.295_984_157_156_806_7).abs() < 1e-12);
        assert!((c[2] - 0.046_925_969_259_772_56).abs() < 1e-12);
        assert!((c[3] + 0.164_767_094_764_334_6).abs() < 1e-12);
    }

    #[test]
    fn degenerate_minima_report_both() {
        // equal junctions at half-flux-quantum-like bias give a mirror pair
        let s = SquidConfig::<f64>::new(0.99, 0.99, PI);
        let m = find_phi_min(&s);
        match &m.warning {
            Some(Warning::DegenerateMinimum { chosen, other, .. }) => {
                assert!((chosen.abs() - other.abs()).abs() < 1e-9 || chosen.abs() < other.abs());
            }
            w => panic!("expected degeneracy, got {w:?}"),
        }
        assert!(squid_derivatives(&s, m.phi)[1].abs() < 1e-10);
    }

    #[test]
    fn critical_currents_reference_configuration() {
        let s = SquidConfig::<f64>::new(0.9, 0.5, FRAC_PI_2);
        let (p, m) = critical_currents(&s);
        assert!((p - 1.689_095_825_156_931_4).abs() < 1e-12);
        assert!((m - 1.247_063_080_766_391_1).abs() < 1e-12);
    }

    #[test]
    fn reciprocal_squids_have_equal_currents() {
        for (t1, t2) in [(0.7, 0.7), (0.9, 0.8)] {
            let (p, m) = critical_currents(&SquidConfig::<f64>::new(t1, t2, 0.0));
            assert!((p - m).abs() < 1e-12);
        }
    }

    #[test]
    fn efficiency_arithmetic() {
        assert_eq!(diode_efficiency(3.0, 2.0).unwrap(), 0.2);
        assert_eq!(diode_efficiency(2.0, 2.0).unwrap(), 0.0);
        assert!((diode_efficiency(5.0f64, 1.0).unwrap() - 4.0 / 6.0).abs() < 1e-15);
        assert!(matches!(diode_efficiency(0.0f64, 1.0), Err(Error::InvalidCurrent { .. })));
        assert!(matches!(diode_efficiency(1.0f64, -1.0), Err(Error::InvalidCurrent { .. })));
    }

    #[test]
    fn c3_vanishes_without_bias_and_is_odd() {
        let s = SquidConfig::<f64>::new(0.9, 0.8, 0.0);
        let c = taylor_coefficients(&s, find_phi_min(&s).phi);
        assert!(c[2].abs() < 1e-10);
        for b in [0.3, 0.9, 1.5] {
            let sp = s.with_phi_b(b);
            let sm = s.with_phi_b(-b);
            let cp = taylor_coefficients(&sp, find_phi_min(&sp).phi)[2];
            let cm = taylor_coefficients(&sm, find_phi_min(&sm).phi)[2];
            assert!((cp + cm).abs() < 1e-10);
            assert!(cp.abs() > 1e-4);
        }
    }

    #[test]
    fn validation_messages() {
        let e = SquidConfig::<f64>::new(1.3, 0.5, 0.0).validate().unwrap_err();
        assert!(e.to_string().contains("tau must lie in [0,1]"));
        assert!(SquidConfig::<f64>::new(0.5, 0.5, f64::NAN).validate().is_err());
    }

    #[test]
    fn characterize_single_precision() {
        let c = characterize(&SquidConfig::new(0.9f32, 0.5, std::f32::consts::FRAC_PI_2)).unwrap();
        assert!((c.phi_min - 0.5225).abs() < 1e-4);
        assert!((c.ic_plus - 1.68910).abs() < 1e-4);
    }
}
