//! Forward and backward transmission of the diode resonator: the classical
//! two-port result and the linearized pump-probe response, plus the
//! nonreciprocity ratio built from the two.

use num_traits::Zero;

use crate::error::{Error, Result, Warning};
use crate::scalar::{cx, re, Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `S_21`, sees `I_c⁺` and the upper resonance.
    Forward,
    /// `S_12`, sees `I_c⁻` and the lower resonance.
    Backward,
}

impl Direction {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Direction::Forward => T::one(),
            Direction::Backward => -T::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitConfig<T> {
    pub l0: T,
    pub c_shunt: T,
    pub r_loss: T,
    pub z0: T,
    pub omega_r: T,
    pub kappa1: T,
    pub kappa2: T,
    pub lambda_kerr: T,
    pub i_applied: T,
    pub ic_plus: T,
    pub ic_minus: T,
    /// Forward/backward splitting used by the pump-probe model. When `None`
    /// it is derived from the critical currents by [`resonance_split`].
    pub delta_omega: Option<T>,
}

impl<T: Real> CircuitConfig<T> {
    /// Resonator with `L_0 = C = 1`, hence `ω_r = 1`; all other rates are
    /// then ratios to `ω_r`.
    pub fn natural(kappa1: T, kappa2: T, lambda_kerr: T) -> Self {
        CircuitConfig {
            l0: T::one(),
            c_shunt: T::one(),
            r_loss: T::zero(),
            z0: T::lit(0.01),
            omega_r: T::one(),
            kappa1,
            kappa2,
            lambda_kerr,
            i_applied: T::zero(),
            ic_plus: T::one(),
            ic_minus: T::one(),
            delta_omega: None,
        }
    }

    pub fn kappa(&self) -> T {
        self.kappa1 + self.kappa2
    }

    /// The splitting the pump-probe model uses.
    pub fn split(&self) -> T {
        self.delta_omega.unwrap_or_else(|| resonance_split(self))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("l0", self.l0),
            ("c_shunt", self.c_shunt),
            ("z0", self.z0),
            ("omega_r", self.omega_r),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("ic_plus", self.ic_plus),
            ("ic_minus", self.ic_minus),
        ];
        for (name, v) in positive {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive (got {v})")));
            }
        }
        if !(self.r_loss >= T::zero() && self.r_loss.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "r_loss must be >= 0 (got {})",
                self.r_loss
            )));
        }
        if !self.lambda_kerr.is_finite() {
            return Err(Error::InvalidParameter("lambda_kerr must be finite".into()));
        }
        if !(self.i_applied >= T::zero() && self.i_applied < self.ic_plus.min(self.ic_minus)) {
            return Err(Error::InvalidParameter(format!(
                "i_applied must lie in [0, min(ic_plus, ic_minus)) (got {})",
                self.i_applied
            )));
        }
        let expected = T::one() / (self.l0 * self.c_shunt).sqrt();
        if ((self.omega_r - expected) / expected).abs() > T::tol_floor(1e-12, 8.0) {
            return Err(Error::InvalidParameter(format!(
                "omega_r must equal 1/sqrt(l0*c_shunt) = {expected} (got {})",
                self.omega_r
            )));
        }
        if let Some(d) = self.delta_omega {
            if !d.is_finite() {
                return Err(Error::InvalidParameter("delta_omega must be finite".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriveConfig<T> {
    pub eps_pump: T,
    pub omega_pump: T,
    pub eps_probe: T,
    pub probe_grid: Vec<T>,
    /// Add the idler term `χ_12` (phase-coherent two-tone probing).
    pub include_idler: bool,
}

impl<T: Real> DriveConfig<T> {
    pub fn validate(&self) -> Result<Vec<Warning>> {
        if !(self.eps_pump >= T::zero() && self.eps_pump.is_finite()) {
            return Err(Error::InvalidParameter("eps_pump must be >= 0".into()));
        }
        if !(self.eps_probe >= T::zero() && self.eps_probe.is_finite()) {
            return Err(Error::InvalidParameter("eps_probe must be >= 0".into()));
        }
        if !self.omega_pump.is_finite() {
            return Err(Error::InvalidParameter("omega_pump must be finite".into()));
        }
        if self.probe_grid.is_empty() {
            return Err(Error::InvalidParameter("probe_grid must be nonempty".into()));
        }
        if self.probe_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "probe_grid must be strictly increasing".into(),
            ));
        }
        let mut warnings = Vec::new();
        if self.eps_pump > T::zero() {
            let ratio = self.eps_probe / self.eps_pump;
            if ratio > T::lit(0.1) {
                warnings.push(Warning::StrongProbe { ratio: ratio.to_f64_lossy() });
            }
        }
        Ok(warnings)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTrace<T> {
    pub omega: Vec<T>,
    pub s_forward: Vec<Cx<T>>,
    pub s_backward: Vec<Cx<T>>,
    pub r_ratio: Vec<T>,
}

/// `L_± = L_0 [1 + (I_a / I_c^±)²]`.
pub fn kinetic_inductance<T: Real>(cfg: &CircuitConfig<T>, dir: Direction) -> T {
    let ic = match dir {
        Direction::Forward => cfg.ic_plus,
        Direction::Backward => cfg.ic_minus,
    };
    let r = cfg.i_applied / ic;
    cfg.l0 * (T::one() + r * r)
}

/// `δω = ½ ω_r [(I_a/I_c⁻)² − (I_a/I_c⁺)²]`.
pub fn resonance_split<T: Real>(cfg: &CircuitConfig<T>) -> T {
    let m = cfg.i_applied / cfg.ic_minus;
    let p = cfg.i_applied / cfg.ic_plus;
    T::lit(0.5) * cfg.omega_r * (m * m - p * p)
}

/// Lumped two-port transmission `Z_0 / (Z_0 + R + i(ωL − 1/(ωC)))`.
pub fn classical_transmission<T: Real>(
    cfg: &CircuitConfig<T>,
    dir: Direction,
    omega_grid: &[T],
) -> Result<Vec<Cx<T>>> {
    let l = kinetic_inductance(cfg, dir);
    omega_grid
        .iter()
        .enumerate()
        .map(|(index, &w)| {
            if w == T::zero() {
                return Err(Error::ZeroFrequency { index });
            }
            let x = w * l - T::one() / (w * cfg.c_shunt);
            Ok(re(cfg.z0) / cx(cfg.z0 + cfg.r_loss, x))
        })
        .collect()
}

/// `1/√(L_dir C)`.
pub fn classical_resonance<T: Real>(cfg: &CircuitConfig<T>, dir: Direction) -> T {
    T::one() / (kinetic_inductance(cfg, dir) * cfg.c_shunt).sqrt()
}

pub fn classical_spectrum<T: Real>(cfg: &CircuitConfig<T>, omega_grid: &[T]) -> Result<SpectrumTrace<T>> {
    let s_forward = classical_transmission(cfg, Direction::Forward, omega_grid)?;
    let s_backward = classical_transmission(cfg, Direction::Backward, omega_grid)?;
    let (r_ratio, _) = nonreciprocity_ratio(&s_forward, &s_backward);
    Ok(SpectrumTrace {
        omega: omega_grid.to_vec(),
        s_forward,
        s_backward,
        r_ratio,
    })
}

/// Mean-field pump amplitude in the frame rotating at the pump.
#[derive(Clone, Debug, PartialEq)]
pub struct PumpState<T> {
    pub alpha: Cx<T>,
    /// `|α|²` of the returned branch.
    pub n: T,
    /// All nonnegative photon-number roots, ascending.
    pub roots: Vec<T>,
    pub bistable: bool,
}

impl<T: Real> PumpState<T> {
    pub fn warning(&self) -> Option<Warning> {
        self.bistable.then(|| Warning::BistableRegion {
            roots: self.roots.iter().map(|r| r.to_f64_lossy()).collect(),
        })
    }
}

/// `Δ_eff = (ω_r − ω_p) ± δω/2`.
pub fn effective_detuning<T: Real>(cfg: &CircuitConfig<T>, omega_pump: T, dir: Direction) -> T {
    (cfg.omega_r - omega_pump) + dir.sign::<T>() * cfg.split() * T::lit(0.5)
}

pub fn pump_steady_state<T: Real>(
    cfg: &CircuitConfig<T>,
    drive: &DriveConfig<T>,
    dir: Direction,
) -> PumpState<T> {
    let delta = effective_detuning(cfg, drive.omega_pump, dir);
    kerr_steady_state(delta, cfg.lambda_kerr, cfg.kappa(), re(drive.eps_pump))
}

/// Steady state of `α̇ = −i(Δ + (Λ/2)|α|² − iκ/2)α + ε`.
///
/// The photon number solves `n[(Δ + Λn/2)² + κ²/4] = |ε|²`; the smallest
/// root is kept, which is the branch connected to `n = 0` as `ε → 0`.
pub fn kerr_steady_state<T: Real>(delta: T, lambda: T, kappa: T, eps: Cx<T>) -> PumpState<T> {
    let target = eps.norm_sqr();
    let half = T::lit(0.5);
    let alpha_for = |n: T| eps / cx(kappa * half, delta + lambda * n * half);
    if target == T::zero() {
        return PumpState {
            alpha: Cx::zero(),
            n: T::zero(),
            roots: vec![T::zero()],
            bistable: false,
        };
    }
    let g = |n: T| {
        let d = delta + lambda * n * half;
        n * (d * d + kappa * kappa * T::lit(0.25)) - target
    };
    let dg = |n: T| {
        let d = delta + lambda * n * half;
        d * d + kappa * kappa * T::lit(0.25) + n * d * lambda
    };

    // g' vanishes at n = 2(−2Δ ± √(Δ² − 3κ²/4)) / (3Λ); these split [0, ∞)
    // into intervals on which g is monotone.
    let mut breaks = vec![T::zero()];
    if lambda != T::zero() {
        let disc = delta * delta - T::lit(0.75) * kappa * kappa;
        if disc > T::zero() {
            let s = disc.sqrt();
            let mut c = [
                (T::lit(2.0) * (-delta - delta - s)) / (T::lit(3.0) * lambda),
                (T::lit(2.0) * (-delta - delta + s)) / (T::lit(3.0) * lambda),
            ];
            c.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            breaks.extend(c.into_iter().filter(|&x| x > T::zero()));
        }
    }
    // upper end: grow until g > 0
    let mut hi = (*breaks.last().unwrap_or(&T::zero())).max(T::one());
    let lin = target / (delta * delta + kappa * kappa * T::lit(0.25));
    hi = hi.max(lin);
    while g(hi) <= T::zero() {
        hi = hi + hi;
    }
    breaks.push(hi);

    let mut roots = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ga, gb) = (g(a), g(b));
        if ga == T::zero() {
            push_root(&mut roots, a);
            continue;
        }
        if (ga < T::zero()) != (gb < T::zero()) || gb == T::zero() {
            push_root(&mut roots, bracketed_root(&g, &dg, a, b));
        }
    }
    let bistable = roots.len() >= 3;
    let n = roots[0];
    PumpState {
        alpha: alpha_for(n),
        n,
        roots,
        bistable,
    }
}

fn push_root<T: Real>(roots: &mut Vec<T>, r: T) {
    if roots
        .last()
        .is_none_or(|&last| (r - last).abs() > T::epsilon() * T::lit(64.0) * r.abs().max(T::one()))
    {
        roots.push(r);
    }
}

/// Newton with a bisection safeguard on a bracket where `g` changes sign.
fn bracketed_root<T: Real>(g: &impl Fn(T) -> T, dg: &impl Fn(T) -> T, mut a: T, mut b: T) -> T {
    let up = g(b) > T::zero();
    let mut x = (a + b) * T::lit(0.5);
    for _ in 0..400 {
        let gx = g(x);
        if gx == T::zero() {
            return x;
        }
        if (gx > T::zero()) == up {
            b = x;
        } else {
            a = x;
        }
        let d = dg(x);
        let newton = x - gx / d;
        let next = if d != T::zero() && newton > a && newton < b {
            newton
        } else {
            (a + b) * T::lit(0.5)
        };
        if (next - x).abs() <= T::epsilon() * T::lit(4.0) * x.abs().max(T::min_positive_value())
            || b - a <= T::epsilon() * T::lit(4.0) * b.abs()
        {
            return next;
        }
        x = next;
    }
    x
}

/// Linearized single-probe response `S = −√(κ₁κ₂) [χ₁₁(Ω) + χ₁₂(Ω)]` around a
/// pump with parametric coupling `λ`, for every `Ω` in `omegas` (probe minus
/// pump frequency). The idler term `χ₁₂` is included only on request.
pub fn linearized_response<T: Real>(
    delta_eff: T,
    lambda: T,
    kappa1: T,
    kappa2: T,
    omegas: &[T],
    include_idler: bool,
) -> Result<Vec<Cx<T>>> {
    let half_k = (kappa1 + kappa2) * T::lit(0.5);
    let amp = -(kappa1 * kappa2).sqrt();
    let lam = re(lambda);
    let i = cx(T::zero(), T::one());
    omegas
        .iter()
        .enumerate()
        .map(|(index, &w)| {
            let base = cx(half_k, -w);
            let d = base * base + re(delta_eff * delta_eff) - lam * lam.conj();
            let mag = d.norm();
            if !(mag.to_f64_lossy() >= 1e-30) {
                return Err(Error::SingularSusceptibility {
                    index,
                    magnitude: mag.to_f64_lossy(),
                });
            }
            let chi11 = cx(half_k, -(delta_eff + w)) / d;
            let mut s = chi11;
            if include_idler {
                s += -i * lam / d;
            }
            Ok(s * amp)
        })
        .collect()
}

/// Pump-probe transmission for one direction over `drive.probe_grid`
/// (absolute probe frequencies).
pub fn linearized_spectrum<T: Real>(
    cfg: &CircuitConfig<T>,
    drive: &DriveConfig<T>,
    dir: Direction,
) -> Result<(Vec<Cx<T>>, PumpState<T>)> {
    let pump = pump_steady_state(cfg, drive, dir);
    let delta = effective_detuning(cfg, drive.omega_pump, dir);
    let lambda = cfg.lambda_kerr * pump.n;
    let omegas: Vec<T> = drive.probe_grid.iter().map(|&w| w - drive.omega_pump).collect();
    let s = linearized_response(delta, lambda, cfg.kappa1, cfg.kappa2, &omegas, drive.include_idler)?;
    Ok((s, pump))
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumSpectrum<T> {
    pub trace: SpectrumTrace<T>,
    pub pump_forward: PumpState<T>,
    pub pump_backward: PumpState<T>,
    pub warnings: Vec<Warning>,
}

pub fn quantum_spectrum<T: Real>(cfg: &CircuitConfig<T>, drive: &DriveConfig<T>) -> Result<QuantumSpectrum<T>> {
    cfg.validate()?;
    let mut warnings = drive.validate()?;
    let (s_forward, pump_forward) = linearized_spectrum(cfg, drive, Direction::Forward)?;
    let (s_backward, pump_backward) = linearized_spectrum(cfg, drive, Direction::Backward)?;
    let (r_ratio, zero) = nonreciprocity_ratio(&s_forward, &s_backward);
    warnings.extend(pump_forward.warning());
    warnings.extend(pump_backward.warning());
    warnings.extend(zero);
    Ok(QuantumSpectrum {
        trace: SpectrumTrace {
            omega: drive.probe_grid.clone(),
            s_forward,
            s_backward,
            r_ratio,
        },
        pump_forward,
        pump_backward,
        warnings,
    })
}

/// `R = (|S₊| − |S₋|)/(|S₊| + |S₋|)`; points where both vanish get `R = 0`
/// and are counted in the returned warning.
pub fn nonreciprocity_ratio<T: Real>(s_plus: &[Cx<T>], s_minus: &[Cx<T>]) -> (Vec<T>, Option<Warning>) {
    debug_assert_eq!(s_plus.len(), s_minus.len());
    let mut zero = 0usize;
    let r = s_plus
        .iter()
        .zip(s_minus)
        .map(|(p, m)| {
            let (a, b) = (p.norm(), m.norm());
            let sum = a + b;
            if !(sum.to_f64_lossy() >= 1e-30) {
                zero += 1;
                T::zero()
            } else {
                ((a - b) / sum).max(-T::one()).min(T::one())
            }
        })
        .collect();
    (r, (zero > 0).then_some(Warning::BothZero { count: zero }))
}

/// Index of the largest `|S|` on a trace.
pub fn peak_index<T: Real>(s: &[Cx<T>]) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, z) in s.iter().enumerate() {
        let a = z.norm_sqr();
        if best.is_none_or(|(_, b)| a > b) {
            best = Some((i, a));
        }
    }
    best.map(|(i, _)| i)
}
