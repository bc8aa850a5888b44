//! Two qubits coupled through the complex exchange `J e^{iφ}` with individual
//! and collective decay: Lindblad evolution, concurrence and the
//! entanglement-transfer contrast.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with qubit 1 the left label.
//! `σ_z = |1⟩⟨1| − |0⟩⟨0|`, so `n_i = (⟨σ_z^(i)⟩ + 1)/2` is the excited
//! population of qubit `i`.

use rayon::prelude::*;

use crate::error::{Error, Result, Warning};
use crate::linalg::{kron2, pauli, CMat4};
use crate::modes_coupling::ComplexCoupling;
use crate::ode::{dopri5, OdeOptions};
use crate::scalar::{cx, re, Cx, Real};

/// How the collective rate `Γ` enters the dissipator rate matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DecayModel {
    /// `[[γ₁ + Γ, Γ], [Γ, γ₂ + Γ]]`: the qubits share a common bath
    /// channel `√Γ (σ₋⁽¹⁾ + σ₋⁽²⁾)` on top of their own relaxation. Always
    /// positive semidefinite.
    #[default]
    Correlated,
    /// `[[γ₁, Γ], [Γ, γ₂]]`: only the cross terms carry `Γ`. Not completely
    /// positive once `Γ > √(γ₁γ₂)`.
    CrossOnly,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitParams<T> {
    pub omega1: T,
    pub omega2: T,
    /// `J_12 = |J| e^{iφ}`; `J_21` is its conjugate.
    pub coupling: ComplexCoupling<T>,
    pub gamma1: [T; 2],
    pub gamma_collective: T,
    pub decay_model: DecayModel,
}

impl<T: Real> TwoQubitParams<T> {
    /// Resonant qubits with coupling `|J| e^{iφ}` and the given `Γ`.
    pub fn resonant(j: T, phi: T, gamma_collective: T) -> Self {
        TwoQubitParams {
            omega1: T::zero(),
            omega2: T::zero(),
            coupling: ComplexCoupling::from_polar(j, phi),
            gamma1: [T::zero(); 2],
            gamma_collective,
            decay_model: DecayModel::Correlated,
        }
    }

    pub fn with_phase(self, phi: T) -> Self {
        TwoQubitParams {
            coupling: ComplexCoupling::from_polar(self.coupling.magnitude, phi),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [self.gamma1[0], self.gamma1[1], self.gamma_collective];
        if rates.iter().any(|r| !(*r >= T::zero() && r.is_finite())) {
            return Err(Error::InvalidParameter("decay rates must be >= 0".into()));
        }
        if !(self.omega1.is_finite() && self.omega2.is_finite()) {
            return Err(Error::InvalidParameter("qubit frequencies must be finite".into()));
        }
        if !(self.coupling.magnitude >= T::zero() && self.coupling.phase.is_finite()) {
            return Err(Error::InvalidParameter("coupling must be finite with |J| >= 0".into()));
        }
        Ok(())
    }

    /// Dissipator rate matrix `Γ_ij`.
    pub fn rate_matrix(&self) -> [[T; 2]; 2] {
        let g = self.gamma_collective;
        let d = match self.decay_model {
            DecayModel::Correlated => g,
            DecayModel::CrossOnly => T::zero(),
        };
        [[self.gamma1[0] + d, g], [g, self.gamma1[1] + d]]
    }

    /// Smallest eigenvalue of the rate matrix.
    pub fn rate_matrix_min_eigenvalue(&self) -> T {
        let m = self.rate_matrix();
        let half = T::lit(0.5);
        let mean = (m[0][0] + m[1][1]) * half;
        let diff = (m[0][0] - m[1][1]) * half;
        mean - (diff * diff + m[0][1] * m[0][1]).sqrt()
    }

    pub fn rate_warning(&self) -> Option<Warning> {
        let e = self.rate_matrix_min_eigenvalue();
        (e < T::zero()).then(|| Warning::NonPositiveRateMatrix {
            min_eigenvalue: e.to_f64_lossy(),
        })
    }
}

/// Two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState<T> {
    pub rho: CMat4<T>,
}

impl<T: Real> TwoQubitState<T> {
    /// `|k⟩⟨k|` for basis index `k` (`0 = |00⟩ … 3 = |11⟩`).
    pub fn basis(k: usize) -> Self {
        let mut d = [T::zero(); 4];
        d[k] = T::one();
        TwoQubitState { rho: CMat4::from_real_diag(d) }
    }

    pub fn pure(psi: &[Cx<T>; 4]) -> Self {
        TwoQubitState { rho: CMat4::outer(psi) }
    }

    pub fn maximally_mixed() -> Self {
        TwoQubitState { rho: CMat4::identity().scale_re(T::lit(0.25)) }
    }

    pub fn trace(&self) -> T {
        self.rho.trace().re
    }

    /// `(n_1, n_2)`.
    pub fn populations(&self) -> (T, T) {
        let p = |k: usize| self.rho[(k, k)].re;
        (p(2) + p(3), p(1) + p(3))
    }

    pub fn fidelity_to(&self, psi: &[Cx<T>; 4]) -> T {
        self.rho.sandwich(psi).re
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.rho.hermiticity_error();
        if herm > T::tol_floor(1e-12, 8.0) {
            return Err(Error::InvalidParameter(format!("rho is not Hermitian (error {herm})")));
        }
        let tr = self.trace();
        if (tr - T::one()).abs() > T::tol_floor(1e-10, 8.0) {
            return Err(Error::InvalidParameter(format!("rho must have unit trace (got {tr})")));
        }
        let e = self.rho.min_eigenvalue();
        if e < -T::tol_floor(1e-10, 8.0) {
            return Err(Error::NonPhysicalState { min_eigenvalue: e.to_f64_lossy() });
        }
        Ok(())
    }

    /// Weight outside the single-excitation block `{|01⟩, |10⟩}`.
    pub fn leakage(&self) -> T {
        self.rho[(0, 0)].re.abs() + self.rho[(3, 3)].re.abs()
    }
}

/// `(|10⟩ + i e^{iφ} |01⟩)/√2`, the state reached from `|01⟩` after a
/// half-iSWAP with coupling phase `φ`.
pub fn half_iswap_target<T: Real>(phi: T) -> [Cx<T>; 4] {
    let h = T::FRAC_1_SQRT_2();
    let i = cx(T::zero(), T::one());
    [Cx::new(T::zero(), T::zero()), i * Cx::from_polar(h, phi), re(h), re(T::zero())]
}

pub(crate) fn sigma_minus<T: Real>(qubit: usize) -> CMat4<T> {
    match qubit {
        0 => kron2(&pauli::lower(), &pauli::i()),
        _ => kron2(&pauli::i(), &pauli::lower()),
    }
}

/// Dynamics `σ_z` of one qubit (`+1` on excited).
pub fn sigma_z<T: Real>(qubit: usize) -> CMat4<T> {
    let z = -pauli::z::<T>();
    match qubit {
        0 => kron2(&z, &pauli::i()),
        _ => kron2(&pauli::i(), &z),
    }
}

/// `H = Σ (ω_i/2) σ_z^(i) + J σ₋⁽¹⁾σ₊⁽²⁾ + J* σ₊⁽¹⁾σ₋⁽²⁾`.
pub fn build_hamiltonian<T: Real>(p: &TwoQubitParams<T>) -> CMat4<T> {
    let half = T::lit(0.5);
    let s1 = sigma_minus::<T>(0);
    let s2 = sigma_minus::<T>(1);
    let j = p.coupling.value();
    let hop = s1 * s2.dagger();
    sigma_z::<T>(0).scale_re(p.omega1 * half)
        + sigma_z::<T>(1).scale_re(p.omega2 * half)
        + hop.scale(j)
        + hop.dagger().scale(j.conj())
}

/// Precomputed Lindblad generator.
#[derive(Clone, Debug)]
pub struct Lindbladian<T> {
    h: CMat4<T>,
    /// `(rate, σ₋⁽ʲ⁾, σ₊⁽ⁱ⁾, σ₊⁽ⁱ⁾σ₋⁽ʲ⁾)`
    terms: Vec<(T, CMat4<T>, CMat4<T>, CMat4<T>)>,
}

impl<T: Real> Lindbladian<T> {
    pub fn new(p: &TwoQubitParams<T>) -> Self {
        let rates = p.rate_matrix();
        let sm = [sigma_minus::<T>(0), sigma_minus::<T>(1)];
        let mut terms = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let g = rates[i][j];
                if g != T::zero() {
                    let sp = sm[i].dagger();
                    terms.push((g, sm[j], sp, sp * sm[j]));
                }
            }
        }
        Lindbladian { h: build_hamiltonian(p), terms }
    }

    pub fn hamiltonian(&self) -> &CMat4<T> {
        &self.h
    }

    /// `dρ/dt = −i[H, ρ] + Σ Γ_ij (σ₋⁽ʲ⁾ ρ σ₊⁽ⁱ⁾ − ½{σ₊⁽ⁱ⁾σ₋⁽ʲ⁾, ρ})`.
    pub fn apply(&self, rho: &CMat4<T>) -> CMat4<T> {
        let mi = cx(T::zero(), -T::one());
        let mut d = self.h.commutator(rho).scale(mi);
        let half = T::lit(0.5);
        for (g, a, bd, k) in &self.terms {
            let jump = *a * *rho * *bd;
            let anti = k.anticommutator(rho).scale_re(half);
            d = d + (jump - anti).scale_re(*g);
        }
        d
    }
}

pub fn lindblad_rhs<T: Real>(p: &TwoQubitParams<T>, rho: &CMat4<T>) -> CMat4<T> {
    Lindbladian::new(p).apply(rho)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsResult<T> {
    pub times: Vec<T>,
    pub n1: Vec<T>,
    pub n2: Vec<T>,
    pub concurrence: Vec<T>,
    pub states: Vec<TwoQubitState<T>>,
    /// Most negative eigenvalue of `ρ` seen at any accepted step.
    pub min_eigenvalue: T,
    pub warnings: Vec<Warning>,
}

/// Positivity threshold below which a step is reported.
pub const POSITIVITY_THRESHOLD: f64 = -1e-6;

/// Integrates the master equation from `rho0` at `t = 0` and samples the
/// result at `times`.
pub fn evolve<T: Real>(
    p: &TwoQubitParams<T>,
    rho0: &TwoQubitState<T>,
    times: &[T],
    opts: &OdeOptions<T>,
) -> Result<DynamicsResult<T>> {
    p.validate()?;
    rho0.validate()?;
    let l = Lindbladian::new(p);
    let mut y0 = vec![T::zero(); 32];
    rho0.rho.write_real(&mut y0);

    let mut min_eig = rho0.rho.min_eigenvalue();
    let mut first_violation: Option<(T, T)> = None;
    let threshold = T::lit(POSITIVITY_THRESHOLD);
    let ys = dopri5(
        |_, y, dy| {
            let d = l.apply(&CMat4::read_real(y));
            d.write_real(dy);
        },
        T::zero(),
        &y0,
        times,
        opts,
        |t, y| {
            let e = CMat4::read_real(y).min_eigenvalue();
            if e < min_eig {
                min_eig = e;
            }
            if e < threshold && first_violation.is_none() {
                first_violation = Some((t, e));
            }
        },
    )?;

    let mut out = DynamicsResult {
        times: times.to_vec(),
        n1: Vec::with_capacity(times.len()),
        n2: Vec::with_capacity(times.len()),
        concurrence: Vec::with_capacity(times.len()),
        states: Vec::with_capacity(times.len()),
        min_eigenvalue: min_eig,
        warnings: p.rate_warning().into_iter().collect(),
    };
    for y in &ys {
        let s = TwoQubitState { rho: CMat4::read_real(y) };
        let (a, b) = s.populations();
        out.n1.push(a);
        out.n2.push(b);
        out.concurrence.push(concurrence_clipped(&s.rho));
        out.states.push(s);
    }
    if let Some((t, e)) = first_violation {
        out.warnings.push(Warning::PositivityViolated {
            t: t.to_f64_lossy(),
            min_eigenvalue: e.to_f64_lossy(),
        });
    }
    Ok(out)
}

/// `t = π / (4|J|)`.
pub fn half_iswap_time<T: Real>(p: &TwoQubitParams<T>) -> T {
    T::FRAC_PI_4() / p.coupling.magnitude
}

/// Evolves a single-excitation state for one half-iSWAP period.
pub fn half_iswap_state<T: Real>(p: &TwoQubitParams<T>, rho0: &TwoQubitState<T>) -> Result<TwoQubitState<T>> {
    if !(p.coupling.magnitude > T::zero()) {
        return Err(Error::InvalidParameter("|J| must be positive".into()));
    }
    let outside = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .filter(|&(i, j)| i == 0 || i == 3 || j == 0 || j == 3)
        .map(|(i, j)| rho0.rho[(i, j)].norm())
        .fold(T::zero(), |a, b| a.max(b));
    if outside > T::tol_floor(1e-12, 8.0) {
        return Err(Error::InvalidParameter(
            "initial state must lie in the single-excitation subspace".into(),
        ));
    }
    let r = evolve(p, rho0, &[half_iswap_time(p)], &OdeOptions::default())?;
    Ok(r.states[0])
}

fn spin_flip<T: Real>(rho: &CMat4<T>) -> CMat4<T> {
    let yy = kron2(&pauli::y::<T>(), &pauli::y());
    yy * rho.conj() * yy
}

/// Eigenvalues of `√ρ ρ̃ √ρ`, ascending; their square roots are the Wootters
/// `λ_i`.
///
/// Eigenvalues at roundoff level are set to zero before any square root is
/// taken: the concurrence has square-root sensitivity at rank-deficient
/// states, so a `1e-17` eigenvalue would otherwise shift it by `~3e-9`.
fn wootters_spectrum<T: Real>(rho: &CMat4<T>) -> [T; 4] {
    let e = rho.hermitian_eigen();
    let floor = roundoff_floor(&e.values);
    let roots = e.values.map(|x| if x.abs() <= floor { T::zero() } else { x.max(T::zero()).sqrt() });
    let s = e.reconstruct_with(&roots);
    let mu = (s * spin_flip(rho) * s).hermitian_eigen().values;
    let floor = roundoff_floor(&mu);
    mu.map(|x| if x.abs() <= floor { T::zero() } else { x })
}

fn roundoff_floor<T: Real>(values: &[T; 4]) -> T {
    let scale = values.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
    scale * T::epsilon() * T::lit(64.0)
}

/// Wootters concurrence.
pub fn concurrence<T: Real>(rho: &CMat4<T>) -> Result<T> {
    let tol = T::tol_floor(1e-8, 64.0);
    let e = rho.min_eigenvalue();
    if e < -tol {
        return Err(Error::NonPhysicalState { min_eigenvalue: e.to_f64_lossy() });
    }
    let mu = wootters_spectrum(rho);
    if mu[0] < -tol {
        return Err(Error::NonPhysicalState { min_eigenvalue: mu[0].to_f64_lossy() });
    }
    Ok(concurrence_of_spectrum(mu))
}

/// Concurrence with negative eigenvalues clamped; for trajectories that are
/// allowed to leave the physical set.
pub fn concurrence_clipped<T: Real>(rho: &CMat4<T>) -> T {
    concurrence_of_spectrum(wootters_spectrum(rho))
}

fn concurrence_of_spectrum<T: Real>(mu: [T; 4]) -> T {
    let l = mu.map(|x| x.max(T::zero()).sqrt());
    (l[3] - l[2] - l[1] - l[0]).max(T::zero()).min(T::one())
}

/// `ΔC = C₀₁(t) − C₁₀(t)` on a `(Γ, φ)` grid. Rows follow `gamma_grid`,
/// columns `phi_grid`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContrastMap<T> {
    pub phi: Vec<T>,
    pub gamma: Vec<T>,
    pub delta_c: Vec<Vec<T>>,
    pub warnings: Vec<Warning>,
}

/// `C₀₁(t) − C₁₀(t)` sampled at `times`.
pub fn contrast_trace<T: Real>(p: &TwoQubitParams<T>, times: &[T]) -> Result<(Vec<T>, Vec<Warning>)> {
    let opts = OdeOptions::default();
    let a = evolve(p, &TwoQubitState::basis(1), times, &opts)?;
    let b = evolve(p, &TwoQubitState::basis(2), times, &opts)?;
    let dc = a.concurrence.iter().zip(&b.concurrence).map(|(x, y)| *x - *y).collect();
    let mut w = a.warnings;
    w.extend(b.warnings);
    Ok((dc, w))
}

pub fn contrast_map<T: Real>(
    p_base: &TwoQubitParams<T>,
    phi_grid: &[T],
    gamma_grid: &[T],
    t_eval: T,
) -> Result<ContrastMap<T>> {
    if phi_grid.is_empty() || gamma_grid.is_empty() {
        return Err(Error::InvalidParameter("contrast grids must be nonempty".into()));
    }
    let cells: Vec<(usize, usize)> = (0..gamma_grid.len())
        .flat_map(|i| (0..phi_grid.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<(T, Vec<Warning>)> = cells
        .par_iter()
        .map(|&(i, j)| {
            let p = TwoQubitParams {
                gamma_collective: gamma_grid[i],
                ..p_base.with_phase(phi_grid[j])
            };
            contrast_trace(&p, &[t_eval]).map(|(dc, w)| (dc[0], w))
        })
        .collect::<Result<_>>()?;
    let mut delta_c = vec![Vec::with_capacity(phi_grid.len()); gamma_grid.len()];
    let mut warnings = Vec::new();
    for ((i, _), (v, w)) in cells.iter().zip(results) {
        delta_c[*i].push(v);
        warnings.extend(w);
    }
    Ok(ContrastMap {
        phi: phi_grid.to_vec(),
        gamma: gamma_grid.to_vec(),
        delta_c,
        warnings: merge_warnings(warnings),
    })
}

/// `ΔC(t)` for each phase in `phi_grid`; rows follow `phi_grid`, columns
/// `times`.
pub fn contrast_time_map<T: Real>(
    p_base: &TwoQubitParams<T>,
    phi_grid: &[T],
    times: &[T],
) -> Result<(Vec<Vec<T>>, Vec<Warning>)> {
    let rows: Vec<(Vec<T>, Vec<Warning>)> = phi_grid
        .par_iter()
        .map(|&phi| contrast_trace(&p_base.with_phase(phi), times))
        .collect::<Result<_>>()?;
    let mut warnings = Vec::new();
    let mut out = Vec::with_capacity(rows.len());
    for (r, w) in rows {
        out.push(r);
        warnings.extend(w);
    }
    Ok((out, merge_warnings(warnings)))
}

/// Collapses repeated rate-matrix and positivity warnings to the worst case
/// of each kind; everything else is kept once.
pub fn merge_warnings(ws: Vec<Warning>) -> Vec<Warning> {
    let mut rate: Option<f64> = None;
    let mut pos: Option<(f64, f64)> = None;
    let mut rest: Vec<Warning> = Vec::new();
    for w in ws {
        match w {
            Warning::NonPositiveRateMatrix { min_eigenvalue } => {
                rate = Some(rate.map_or(min_eigenvalue, |r| r.min(min_eigenvalue)));
            }
            Warning::PositivityViolated { t, min_eigenvalue } => {
                if pos.is_none_or(|(_, e)| min_eigenvalue < e) {
                    pos = Some((t, min_eigenvalue));
                }
            }
            other => {
                if !rest.contains(&other) {
                    rest.push(other);
                }
            }
        }
    }
    let mut out = Vec::new();
    if let Some(min_eigenvalue) = rate {
        out.push(Warning::NonPositiveRateMatrix { min_eigenvalue });
    }
    if let Some((t, min_eigenvalue)) = pos {
        out.push(Warning::PositivityViolated { t, min_eigenvalue });
    }
    out.extend(rest);
    out
}
