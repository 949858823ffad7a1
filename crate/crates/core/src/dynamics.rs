//! Fixed-step integration of the truncated c-number field equations.
//!
//! The operator equations for `â`, `â†`, `n̂` are closed by carrying out the
//! photon-number commutators exactly, `[â, g(n̂)] = â(g(n̂) - g(n̂-1))`, and
//! replacing operators by c-numbers afterwards. The three variables `α`,
//! `α*`, `n̄` are evolved independently; `α*` is **not** constrained to be the
//! conjugate of `α` and `n̄` is not constrained to equal `|α|²`, although both
//! relations hold for the real-pump, real-`√n₀` initial conditions used here.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fermisea::{h1_h2_expectations, FermiSeaSummary};
use crate::model::{coefficients_or_delocalized, SystemParams};
use crate::num::{lit, Real};

/// Instantaneous state of the truncated field equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldState<T> {
    pub alpha: Complex<T>,
    /// Evolved as an independent variable, not forced to `conj(alpha)`.
    pub alpha_conj: Complex<T>,
    pub n_bar: T,
    /// Dimensionless time in units of the inverse recoil frequency.
    pub t: T,
}

impl<T: Real> FieldState<T> {
    /// The standard initial condition: `α = α* = √n₀`, `n̄ = n₀`, real `n₀`.
    pub fn from_photon_number(n0: T) -> Self {
        let root = Complex::new(n0.sqrt(), T::zero());
        FieldState {
            alpha: root,
            alpha_conj: root,
            n_bar: n0,
            t: T::zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.re.is_finite()
            && self.alpha.im.is_finite()
            && self.alpha_conj.re.is_finite()
            && self.alpha_conj.im.is_finite()
            && self.n_bar.is_finite()
    }

    /// Truncation diagnostic `|n̄ - |α|²| / max(|n̄|, 1)`.
    pub fn truncation_deviation(&self) -> T {
        (self.n_bar - self.alpha.norm_sqr()).abs() / self.n_bar.abs().max(T::one())
    }

    fn axpy(&self, c: T, d: &Deriv<T>) -> FieldState<T> {
        FieldState {
            alpha: self.alpha + d.d_alpha * c,
            alpha_conj: self.alpha_conj + d.d_alpha_conj * c,
            n_bar: self.n_bar + d.d_n * c,
            t: self.t,
        }
    }
}

/// Time derivatives of the field variables.
#[derive(Clone, Copy, Debug)]
pub struct Deriv<T> {
    pub d_alpha: Complex<T>,
    pub d_alpha_conj: Complex<T>,
    pub d_n: T,
}

/// Fermi-sea expectation of the bare-band Hamiltonian at photon argument `n`:
/// `h₁(n) = N[E(n) + E₁(n) B̃]`.
fn h1_at<T: Real>(n: T, summary: &FermiSeaSummary<T>, params: &SystemParams<T>) -> T {
    let coeffs = coefficients_or_delocalized(n, params);
    h1_h2_expectations(summary, &coeffs, params).0
}

/// Fermi-sea expectation of the cavity-coupled Hamiltonian at photon argument
/// `n`, with the normal-ordering shift applied literally: the couplings are
/// taken at `n - 1`, `h₂(n) = U₀ N [J(n-1) + J₁(n-1) B̃]`.
fn h2_shifted_at<T: Real>(n: T, summary: &FermiSeaSummary<T>, params: &SystemParams<T>) -> T {
    let coeffs = coefficients_or_delocalized(n - T::one(), params);
    h1_h2_expectations(summary, &coeffs, params).1
}

/// The photon-number shift entering the exact-difference drift,
/// `D(n̄) = [h₁(n̄) - h₁(n̄-1)] + n̄ [h₂(n̄) - h₂(n̄-1)] + h₂(n̄)`.
///
/// The steady state of the truncated equations satisfies
/// `n̄ = η²/(κ² + (Δc - D(n̄))²)` exactly.
pub fn field_shift_exact<T: Real>(
    n: T,
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
) -> T {
    let one = T::one();
    let h1n = h1_at(n, summary, params);
    let h1m = h1_at(n - one, summary, params);
    let h2n = h2_shifted_at(n, summary, params);
    let h2m = h2_shifted_at(n - one, summary, params);
    (h1n - h1m) + n * (h2n - h2m) + h2n
}

/// The same shift with every photon-number difference replaced by an analytic
/// derivative; this is the combination whose fixed points coincide with the
/// closed-form steady-state equation.
pub fn field_shift_derivative<T: Real>(
    n: T,
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
) -> T {
    let coeffs = coefficients_or_delocalized(n, params);
    let nn = lit::<T>(summary.n_atoms as f64);
    let b = summary.b_tilde;
    let h2 = params.u0 * nn * (coeffs.j_onsite + coeffs.j_hop * b);
    let dh1 = nn * (coeffs.d_e + coeffs.d_e_hop * b);
    let dh2 = params.u0 * nn * (coeffs.d_j + coeffs.d_j_hop * b);
    h2 + dh1 + n * dh2
}

fn drift_with_shift<T: Real>(state: &FieldState<T>, shift: T, params: &SystemParams<T>) -> Deriv<T> {
    // α̇ = [-κ + i(Δc - shift)] α + η, conjugate equation for α*,
    // ṅ = η (α + α*) - 2κ n̄.
    let lin = Complex::new(-params.kappa, params.delta_c - shift);
    let eta = Complex::new(params.eta, T::zero());
    let d_alpha = lin * state.alpha + eta;
    let d_alpha_conj = lin.conj() * state.alpha_conj + eta;
    let d_n = params.eta * (state.alpha + state.alpha_conj).re
        - lit::<T>(2.0) * params.kappa * state.n_bar;
    Deriv {
        d_alpha,
        d_alpha_conj,
        d_n,
    }
}

/// Exact-difference drift of the truncated field equations.
///
/// Couplings are evaluated at `n̄ - 1` and `n̄ - 2` through the
/// normal-ordering shift inside `h₂` combined with the commutator
/// differences; non-positive arguments take the delocalized limit.
pub fn drift<T: Real>(
    state: &FieldState<T>,
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
) -> Deriv<T> {
    drift_with_shift(state, field_shift_exact(state.n_bar, summary, params), params)
}

/// Derivative-approximation drift; comparison path for [`drift`].
pub fn drift_approx<T: Real>(
    state: &FieldState<T>,
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
) -> Deriv<T> {
    drift_with_shift(
        state,
        field_shift_derivative(state.n_bar, summary, params),
        params,
    )
}

/// Fixed-step integration controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationSettings<T> {
    /// Step in units of `1/ω_r`.
    pub dt: T,
    pub t_max: T,
    /// Record every `stride`-th step.
    pub stride: usize,
    /// Halt when `n̄` drops below this floor: couplings at `n̄ - 1` lose
    /// their lattice meaning below one photon.
    pub n_floor: T,
    /// Number of recorded samples in the trailing convergence window.
    pub window: usize,
    /// Relative spread of the trailing window that counts as converged.
    pub band: T,
}

impl<T: Real> Default for IntegrationSettings<T> {
    fn default() -> Self {
        IntegrationSettings {
            dt: lit(1e-3),
            t_max: lit(200.0),
            stride: 100,
            n_floor: lit(1.05),
            window: 100,
            band: lit(1e-3),
        }
    }
}

impl<T: Real> IntegrationSettings<T> {
    fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !(self.t_max > self.dt) {
            return Err(Error::InvalidArgument(
                "need dt > 0 and t_max > dt".into(),
            ));
        }
        if self.stride == 0 || self.window < 2 {
            return Err(Error::InvalidArgument(
                "need stride >= 1 and window >= 2".into(),
            ));
        }
        Ok(())
    }
}

/// How a trajectory ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrajectoryStatus<T> {
    /// Trailing window settled inside the convergence band.
    Converged,
    /// Ran to `t_max` without meeting the convergence test.
    ReachedTMax,
    /// `n̄` fell below the coupling domain floor; partial data retained.
    LeftDomain { t: T },
    /// A step produced a non-finite state; retry with the suggested step.
    Diverged { t: T, retry_dt: T },
}

/// Recorded samples of one integration.
#[derive(Clone, Debug)]
pub struct FieldTrajectory<T> {
    pub states: Vec<FieldState<T>>,
    /// Mean of the trailing window when converged.
    pub attractor: Option<T>,
    pub converged: bool,
    pub status: TrajectoryStatus<T>,
    /// Largest `|n̄ - |α|²|` deviation seen along the way, relative.
    pub truncation_deviation: T,
}

impl<T: Real> FieldTrajectory<T> {
    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        self.states.iter().map(|s| s.t)
    }

    pub fn final_state(&self) -> &FieldState<T> {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    /// Mean of the last `window` recorded `n̄` samples.
    pub fn trailing_mean(&self, window: usize) -> T {
        let n = self.states.len().min(window.max(1));
        let sum: T = self.states[self.states.len() - n..]
            .iter()
            .map(|s| s.n_bar)
            .sum();
        sum / lit::<T>(n as f64)
    }
}

/// Deterministic stepper; time is reconstructed from the integer step index,
/// so resuming from a saved state reproduces a longer run bit for bit.
pub struct Stepper<T> {
    state: FieldState<T>,
    step_index: u64,
    dt: T,
    summary: FermiSeaSummary<T>,
    params: SystemParams<T>,
}

impl<T: Real> Stepper<T> {
    pub fn new(
        state: FieldState<T>,
        step_index: u64,
        dt: T,
        summary: FermiSeaSummary<T>,
        params: SystemParams<T>,
    ) -> Self {
        Stepper {
            state,
            step_index,
            dt,
            summary,
            params,
        }
    }

    pub fn state(&self) -> &FieldState<T> {
        &self.state
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    /// One classical fourth-order Runge-Kutta step.
    pub fn step(&mut self) {
        let dt = self.dt;
        let half = lit::<T>(0.5);
        let sixth = lit::<T>(6.0).recip();
        let y = &self.state;
        let k1 = drift(y, &self.summary, &self.params);
        let k2 = drift(&y.axpy(half * dt, &k1), &self.summary, &self.params);
        let k3 = drift(&y.axpy(half * dt, &k2), &self.summary, &self.params);
        let k4 = drift(&y.axpy(dt, &k3), &self.summary, &self.params);
        let two = lit::<T>(2.0);
        let mut next = FieldState {
            alpha: y.alpha
                + (k1.d_alpha + (k2.d_alpha + k3.d_alpha) * two + k4.d_alpha) * (dt * sixth),
            alpha_conj: y.alpha_conj
                + (k1.d_alpha_conj + (k2.d_alpha_conj + k3.d_alpha_conj) * two + k4.d_alpha_conj)
                    * (dt * sixth),
            n_bar: y.n_bar + (k1.d_n + two * (k2.d_n + k3.d_n) + k4.d_n) * dt * sixth,
            t: y.t,
        };
        self.step_index += 1;
        next.t = T::from_u64(self.step_index).unwrap() * dt;
        self.state = next;
    }

    pub fn advance(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }
}

/// Integrates from the standard initial condition `α = α* = √n₀`, `n̄ = n₀`.
///
/// Samples every `stride`-th step; stops early once the trailing window of
/// recorded `n̄` values has relative spread below the band, filling
/// `attractor` with the window mean.
pub fn integrate<T: Real>(
    n0: T,
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
    settings: &IntegrationSettings<T>,
) -> Result<FieldTrajectory<T>> {
    if !(n0 > T::zero()) || !n0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "initial photon number must be > 0, got {n0}"
        )));
    }
    settings.validate()?;
    params.validate()?;

    let initial = FieldState::from_photon_number(n0);
    let mut states = vec![initial];
    let mut truncation = initial.truncation_deviation();

    if n0 < settings.n_floor {
        return Ok(FieldTrajectory {
            states,
            attractor: None,
            converged: false,
            status: TrajectoryStatus::LeftDomain { t: T::zero() },
            truncation_deviation: truncation,
        });
    }

    let max_steps = (settings.t_max / settings.dt).ceil().to_f64().unwrap() as u64;
    let mut stepper = Stepper::new(initial, 0, settings.dt, *summary, *params);
    let mut window: Vec<T> = Vec::with_capacity(settings.window);

    let mut status = TrajectoryStatus::ReachedTMax;
    let mut attractor = None;
    let mut converged = false;

    while stepper.step_index() < max_steps {
        let previous = *stepper.state();
        stepper.step();
        let state = *stepper.state();

        if !state.is_finite() {
            // Keep the last finite state and suggest a smaller step.
            if states.last() != Some(&previous) {
                states.push(previous);
            }
            status = TrajectoryStatus::Diverged {
                t: previous.t,
                retry_dt: settings.dt * lit(0.5),
            };
            break;
        }

        truncation = truncation.max(state.truncation_deviation());

        if state.n_bar < settings.n_floor {
            states.push(state);
            status = TrajectoryStatus::LeftDomain { t: state.t };
            break;
        }

        if stepper.step_index() % settings.stride as u64 == 0 {
            states.push(state);
            if window.len() == settings.window {
                window.remove(0);
            }
            window.push(state.n_bar);
            if window.len() == settings.window {
                let mut lo = window[0];
                let mut hi = window[0];
                let mut sum = T::zero();
                for &v in &window {
                    lo = lo.min(v);
                    hi = hi.max(v);
                    sum += v;
                }
                let mean = sum / lit::<T>(window.len() as f64);
                if mean > T::zero() && (hi - lo) < settings.band * mean.abs() {
                    attractor = Some(mean);
                    converged = true;
                    status = TrajectoryStatus::Converged;
                    break;
                }
            }
        }
    }

    if status == TrajectoryStatus::ReachedTMax && states.last() != Some(stepper.state()) {
        states.push(*stepper.state());
    }

    Ok(FieldTrajectory {
        states,
        attractor,
        converged,
        status,
        truncation_deviation: truncation,
    })
}

/// One row of a basin-of-attraction scan.
#[derive(Clone, Copy, Debug)]
pub struct BasinRow<T> {
    pub n0: T,
    pub attractor: Option<T>,
    pub converged: bool,
    pub status: TrajectoryStatus<T>,
    /// Index into the attractor cluster list, when converged.
    pub cluster: Option<usize>,
}

/// Outcome of a basin scan: per-initial-value rows plus the merged attractor
/// set (1 % relative merge tolerance, clusters in order of first appearance).
#[derive(Clone, Debug)]
pub struct BasinScan<T> {
    pub rows: Vec<BasinRow<T>>,
    pub clusters: Vec<T>,
}

impl<T: Real> BasinScan<T> {
    /// Converged attractor clusters plus one pseudo-class for trajectories
    /// that left the coupling domain toward the weak-field state.
    pub fn outcome_classes(&self) -> usize {
        let weak = self
            .rows
            .iter()
            .any(|r| matches!(r.status, TrajectoryStatus::LeftDomain { .. }));
        self.clusters.len() + usize::from(weak)
    }
}

/// Integrates every initial photon number in `n0_list` and clusters the
/// resulting attractors. Rows keep the input order regardless of the parallel
/// schedule; failures are carried per row, never aborting the scan.
pub fn basin_scan<T: Real>(
    n0_list: &[T],
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
    settings: &IntegrationSettings<T>,
) -> Result<BasinScan<T>> {
    if n0_list.is_empty() {
        return Err(Error::InvalidArgument("n0 list must be nonempty".into()));
    }
    for &n0 in n0_list {
        if !(n0 > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "initial photon numbers must be > 0, got {n0}"
            )));
        }
    }

    let trajectories: Vec<FieldTrajectory<T>> = n0_list
        .par_iter()
        .map(|&n0| integrate(n0, summary, params, settings))
        .collect::<Result<_>>()?;

    let merge = lit::<T>(0.01);
    let mut clusters: Vec<T> = Vec::new();
    let rows = n0_list
        .iter()
        .zip(&trajectories)
        .map(|(&n0, traj)| {
            let cluster = traj.attractor.map(|a| {
                match clusters
                    .iter()
                    .position(|&rep| (a - rep).abs() <= merge * rep.abs())
                {
                    Some(i) => i,
                    None => {
                        clusters.push(a);
                        clusters.len() - 1
                    }
                }
            });
            BasinRow {
                n0,
                attractor: traj.attractor,
                converged: traj.converged,
                status: traj.status,
                cluster,
            }
        })
        .collect();

    Ok(BasinScan { rows, clusters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermisea::{build_fermi_sea, hopping_expectation, MomentumGrid};
    use crate::model::Sign;

    fn empty_cavity(eta: f64, delta_c: f64, kappa: f64) -> SystemParams<f64> {
        SystemParams::new(10.0, delta_c, eta, kappa, 0, 50, Sign::Positive).unwrap()
    }

    fn fig1a_summary(n_atoms: usize) -> (FermiSeaSummary<f64>, SystemParams<f64>) {
        let params = SystemParams::new(10.0, 10.0, 10.0, 1.0, n_atoms, 50, Sign::Positive).unwrap();
        let grid = MomentumGrid::new(50).unwrap();
        let sea = build_fermi_sea(n_atoms, &grid).unwrap();
        (hopping_expectation(&sea, &grid), params)
    }

    fn loose_floor(settings: IntegrationSettings<f64>) -> IntegrationSettings<f64> {
        IntegrationSettings {
            n_floor: 1e-6,
            ..settings
        }
    }

    #[test]
    fn undriven_empty_cavity_decays_exponentially() {
        let params = empty_cavity(0.0, 3.0, 1.0);
        let summary = FermiSeaSummary::empty();
        let settings = loose_floor(IntegrationSettings {
            t_max: 5.0,
            band: 1e-12,
            ..IntegrationSettings::default()
        });
        let traj = integrate(4.0, &summary, &params, &settings).unwrap();
        for s in &traj.states {
            let expect_n = 4.0 * (-2.0 * s.t).exp();
            assert!((s.n_bar - expect_n).abs() <= 1e-9 * expect_n.max(1e-9));
            let expect_alpha =
                Complex::new(0.0, 3.0 * s.t).exp() * Complex::new(2.0 * (-s.t).exp(), 0.0);
            assert!((s.alpha - expect_alpha).norm() < 1e-9);
        }
    }

    #[test]
    fn driven_empty_cavity_matches_closed_form_trajectory() {
        // α(t) = α∞ + (√n₀ - α∞) e^{(iΔc-κ)t} with α∞ = η/(κ - iΔc), and the
        // photon equation shares the same solution through n̄ = |α|².
        let (eta, delta_c, kappa) = (4.0, 3.0, 1.0);
        let params = empty_cavity(eta, delta_c, kappa);
        let summary = FermiSeaSummary::empty();
        let settings = loose_floor(IntegrationSettings {
            t_max: 20.0,
            band: 1e-12,
            ..IntegrationSettings::default()
        });
        let n0 = 9.0;
        let traj = integrate(n0, &summary, &params, &settings).unwrap();
        let alpha_inf = Complex::new(eta, 0.0) / Complex::new(kappa, -delta_c);
        for s in &traj.states {
            let decay = (Complex::new(-kappa, delta_c) * Complex::new(s.t, 0.0)).exp();
            let alpha = alpha_inf + (Complex::new(n0.sqrt(), 0.0) - alpha_inf) * decay;
            let n = alpha.norm_sqr();
            assert!(
                (s.n_bar - n).abs() <= 1e-6 * n.max(1e-12),
                "t = {}: {} vs {}",
                s.t,
                s.n_bar,
                n
            );
        }
    }

    #[test]
    fn driven_empty_cavity_attractor_is_lorentzian() {
        let params = empty_cavity(4.0, 3.0, 1.0);
        let summary = FermiSeaSummary::empty();
        let settings = loose_floor(IntegrationSettings {
            t_max: 40.0,
            band: 1e-9,
            ..IntegrationSettings::default()
        });
        let traj = integrate(2.0, &summary, &params, &settings).unwrap();
        let expect = 16.0 / (1.0 + 9.0);
        let a = traj.attractor.expect("converges");
        assert!(traj.converged);
        assert!((a - expect).abs() / expect < 1e-6);
    }

    #[test]
    fn conjugate_symmetry_is_preserved() {
        let (summary, params) = fig1a_summary(12);
        let settings = IntegrationSettings {
            t_max: 30.0,
            ..IntegrationSettings::default()
        };
        let traj = integrate(8.0, &summary, &params, &settings).unwrap();
        for s in &traj.states {
            let dev = (s.alpha_conj - s.alpha.conj()).norm();
            assert!(dev <= 1e-10 * (1.0 + s.t), "t = {}: {dev}", s.t);
        }
        // n̄ tracks |α|² for these initial conditions.
        assert!(traj.truncation_deviation < 1e-8);
    }

    #[test]
    fn exact_and_derivative_drifts_agree_at_large_photon_number() {
        let (summary, params) = fig1a_summary(12);
        let state = FieldState::from_photon_number(100.0);
        let exact = drift(&state, &summary, &params);
        let approx = drift_approx(&state, &summary, &params);
        let scale = exact.d_alpha.norm() + exact.d_n.abs();
        let diff = (exact.d_alpha - approx.d_alpha).norm()
            + (exact.d_n - approx.d_n).abs();
        assert!(diff / scale <= 1e-2, "relative drift difference {}", diff / scale);
    }

    #[test]
    fn left_domain_reported_with_partial_trajectory() {
        // Undriven with atoms: n̄ decays to zero and must halt at the floor.
        let (summary, params) = fig1a_summary(12);
        let params = SystemParams { eta: 0.0, ..params };
        let settings = IntegrationSettings {
            t_max: 50.0,
            ..IntegrationSettings::default()
        };
        let traj = integrate(3.0, &summary, &params, &settings).unwrap();
        match traj.status {
            TrajectoryStatus::LeftDomain { t } => assert!(t > 0.0),
            other => panic!("expected LeftDomain, got {other:?}"),
        }
        assert!(!traj.converged);
        assert!(traj.final_state().n_bar < settings.n_floor);
        assert!(traj.states.len() > 1);
    }

    #[test]
    fn stepping_is_time_translation_invariant() {
        let (summary, params) = fig1a_summary(12);
        let initial = FieldState::from_photon_number(7.0);

        let mut direct = Stepper::new(initial, 0, 1e-3, summary, params);
        direct.advance(1500);

        let mut first = Stepper::new(initial, 0, 1e-3, summary, params);
        first.advance(900);
        let mut resumed = Stepper::new(*first.state(), first.step_index(), 1e-3, summary, params);
        resumed.advance(600);

        let a = direct.state();
        let b = resumed.state();
        assert_eq!(a.alpha.re.to_bits(), b.alpha.re.to_bits());
        assert_eq!(a.alpha.im.to_bits(), b.alpha.im.to_bits());
        assert_eq!(a.n_bar.to_bits(), b.n_bar.to_bits());
        assert_eq!(a.t.to_bits(), b.t.to_bits());
    }

    #[test]
    fn basin_scan_single_attractor_for_empty_cavity() {
        let params = empty_cavity(4.0, 3.0, 1.0);
        let summary = FermiSeaSummary::empty();
        let settings = loose_floor(IntegrationSettings {
            t_max: 60.0,
            band: 1e-9,
            ..IntegrationSettings::default()
        });
        let n0s = [0.5, 1.0, 2.0, 5.0, 20.0];
        let scan = basin_scan(&n0s, &summary, &params, &settings).unwrap();
        assert_eq!(scan.clusters.len(), 1);
        assert_eq!(scan.outcome_classes(), 1);
        let expect = 16.0 / 10.0;
        assert!((scan.clusters[0] - expect).abs() / expect < 1e-6);
        for row in &scan.rows {
            assert_eq!(row.cluster, Some(0));
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let params = empty_cavity(1.0, 0.0, 1.0);
        let summary = FermiSeaSummary::empty();
        let settings = IntegrationSettings::default();
        assert!(integrate(0.0, &summary, &params, &settings).is_err());
        assert!(integrate(-1.0, &summary, &params, &settings).is_err());
        let bad = IntegrationSettings {
            dt: 0.0,
            ..settings
        };
        assert!(integrate(1.0, &summary, &params, &bad).is_err());
        assert!(basin_scan(&[], &summary, &params, &settings).is_err());
    }
}
