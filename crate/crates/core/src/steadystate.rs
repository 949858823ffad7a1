//! Self-consistent steady states of the intracavity photon number.
//!
//! The stationary mean photon number obeys the Lorentzian fixed-point
//! equation `n̄ = η²/(κ² + (Δc - ξ(n̄))²)`, where the shift `ξ` collects the
//! atomic dispersive response and its photon-number derivatives. Substituting
//! `n̄ = 1/(|U₀| y²)` turns this into a root problem for the squared lattice
//! width `y`, which is scanned, bracketed, and bisected here; branches are
//! labelled stable or unstable by perturbing the field dynamics.

use rayon::prelude::*;

use crate::dynamics::{
    field_shift_exact, integrate, FieldTrajectory, IntegrationSettings, TrajectoryStatus,
};
use crate::error::{Error, Result};
use crate::fermisea::{build_fermi_sea, hopping_expectation, FermiSeaSummary, MomentumGrid};
use crate::model::{gaussian_coefficients, photons_from_y, Sign, SystemParams};
use crate::num::{count, lit, Real};

/// Dynamical stability label of a branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Undetermined,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Undetermined => "undetermined",
        }
    }
}

/// One self-consistent solution of the photon-number equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyStateBranch<T> {
    pub n_bar: T,
    pub y: T,
    /// Dispersive shift `ξ` at the solution.
    pub xi: T,
    pub stability: Stability,
    /// Whether the solution lies inside the tight-binding validity region
    /// `y <= y_max`.
    pub valid_tb: bool,
}

/// The two width-dependent shift functions entering the `y`-form of the
/// steady-state equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftFunctions<T> {
    pub f1: T,
    pub f2: T,
}

impl<T: Real> ShiftFunctions<T> {
    /// `f₁(y) = 1 + sy - s e^{-y}(1 + y/2)` and
    /// `f₂(y) = s e^{-y}(1 + y/2 - π²/8y) + s(π⁴/8y - 6π²/8 - y)`.
    ///
    /// Both groups of `f₂` carry the detuning sign: the on-site derivative
    /// term scales with `|U₀|`, which leaves a factor `s` once `U₀` is pulled
    /// out front, exactly as in `f₁`'s linear term.
    pub fn evaluate(y: T, s: Sign) -> Self {
        let sf: T = s.factor();
        let half = lit::<T>(0.5);
        let pi2 = T::PI() * T::PI();
        let pi4 = pi2 * pi2;
        let eight_y = lit::<T>(8.0) * y;
        let exp_y = (-y).exp();
        let f1 = T::one() + sf * y - sf * exp_y * (T::one() + half * y);
        let f2 = sf
            * (exp_y * (T::one() + half * y - pi2 / eight_y) + pi4 / eight_y
                - lit::<T>(0.75) * pi2
                - y);
        ShiftFunctions { f1, f2 }
    }
}

/// Dispersive shift as a function of the squared width,
/// `ξ(y) = (U₀N/2)(f₁(y) + B̃ e^{-π²/4y} f₂(y))`.
pub fn xi_from_width<T: Real>(y: T, summary: &FermiSeaSummary<T>, params: &SystemParams<T>) -> T {
    if summary.n_atoms == 0 {
        return T::zero();
    }
    let f = ShiftFunctions::evaluate(y, params.s);
    let pi2 = T::PI() * T::PI();
    let gauss = (-pi2 / (lit::<T>(4.0) * y)).exp();
    let n = count::<T>(summary.n_atoms);
    lit::<T>(0.5) * params.u0 * n * (f.f1 + summary.b_tilde * gauss * f.f2)
}

/// Dispersive shift at photon number `n̄`, assembled from the Fermi-sea
/// expectations and the analytic coupling derivatives:
/// `ξ(n̄) = H₂ + ∂H₁ + n̄ ∂H₂` with the normal-ordering shift of `H₂`
/// cancelled against its own derivative term.
///
/// Identical (to rounding) to [`xi_from_width`] at `y(n̄)`.
pub fn xi_shift<T: Real>(
    n_bar: T,
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
) -> Result<T> {
    if !(n_bar > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "photon number must be > 0, got {n_bar}"
        )));
    }
    if summary.n_atoms == 0 {
        return Ok(T::zero());
    }
    let c = gaussian_coefficients(n_bar, params)?;
    let n = count::<T>(summary.n_atoms);
    let b = summary.b_tilde;
    let h2 = params.u0 * n * (c.j_onsite + c.j_hop * b);
    let dh1 = n * (c.d_e + c.d_e_hop * b);
    let dh2 = params.u0 * n * (c.d_j + c.d_j_hop * b);
    Ok(h2 + dh1 + n_bar * dh2)
}

/// Dispersive shift with the photon-number differences carried out exactly,
/// as in the field dynamics. Stationary points of the integrated equations
/// satisfy the fixed-point equation with this shift rather than [`xi_shift`].
pub fn xi_shift_difference<T: Real>(
    n_bar: T,
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
) -> T {
    field_shift_exact(n_bar, summary, params)
}

/// Residual of the steady-state equation in the width variable:
/// `R(y) = |U₀|η²y² - κ² - (Δc - ξ(y))²`; roots are self-consistent
/// solutions with `n̄ = 1/(|U₀|y²)`.
pub fn residual_y<T: Real>(y: T, summary: &FermiSeaSummary<T>, params: &SystemParams<T>) -> T {
    let xi = xi_from_width(y, summary, params);
    let detuned = params.delta_c - xi;
    params.u0.abs() * params.eta * params.eta * y * y - params.kappa * params.kappa
        - detuned * detuned
}

/// Relative fixed-point residual in the photon number,
/// `|n̄ - η²/(κ² + (Δc - ξ(n̄))²)| / n̄`.
pub fn fixed_point_residual<T: Real>(
    n_bar: T,
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
) -> Result<T> {
    let xi = xi_shift(n_bar, summary, params)?;
    let detuned = params.delta_c - xi;
    let lorentzian =
        params.eta * params.eta / (params.kappa * params.kappa + detuned * detuned);
    Ok((n_bar - lorentzian).abs() / n_bar)
}

/// Relative fixed-point residual with the exact-difference shift,
/// `|n̄ - η²/(κ² + (Δc - D(n̄))²)| / n̄`; converged trajectories of the field
/// dynamics satisfy this one.
pub fn fixed_point_residual_difference<T: Real>(
    n_bar: T,
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
) -> T {
    let d = xi_shift_difference(n_bar, summary, params);
    let detuned = params.delta_c - d;
    let lorentzian =
        params.eta * params.eta / (params.kappa * params.kappa + detuned * detuned);
    (n_bar - lorentzian).abs() / n_bar
}

/// Geometric bisection of a bracketed sign change down to floating-point
/// exhaustion; assumes `f(lo)` and `f(hi)` have opposite signs.
fn bisect_log<T: Real, F: Fn(T) -> T>(f: &F, mut lo: T, mut hi: T, mut f_lo: T) -> T {
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return mid;
        }
        if (f_lo < T::zero()) != (f_mid < T::zero()) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    (lo * hi).sqrt()
}

/// All roots of `f` on a log-spaced grid over `[lo, hi]`, bracketing every
/// sign change and refining by bisection. Duplicates closer than `merge`
/// relative are collapsed.
fn scan_roots<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T, n_scan: usize, merge: T) -> Vec<T> {
    let ratio = (hi / lo).ln();
    let steps = n_scan.max(2) - 1;
    let grid: Vec<T> = (0..=steps)
        .map(|i| lo * (ratio * lit::<T>(i as f64) / lit::<T>(steps as f64)).exp())
        .collect();
    let values: Vec<T> = grid.iter().map(|&y| f(y)).collect();

    let mut roots = Vec::new();
    for i in 0..steps {
        let (a, b) = (values[i], values[i + 1]);
        if a == T::zero() {
            roots.push(grid[i]);
        } else if (a < T::zero()) != (b < T::zero()) && b != T::zero() {
            roots.push(bisect_log(f, grid[i], grid[i + 1], a));
        }
    }
    if values[steps] == T::zero() {
        roots.push(grid[steps]);
    }

    roots.dedup_by(|b, a| (*b - *a).abs() <= merge * b.abs().max(a.abs()));
    roots
}

/// Enumerates every self-consistent branch with width in `[y_lo, y_hi]`.
///
/// The residual is scanned on `n_scan` log-spaced points, every sign change is
/// bisected to machine precision, and roots closer than `1e-8` relative are
/// merged. Solutions outside the tight-binding region are kept and flagged
/// `valid_tb = false`; stability starts out [`Stability::Undetermined`].
pub fn find_branches<T: Real>(
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
    y_lo: T,
    y_hi: T,
    n_scan: usize,
) -> Result<Vec<SteadyStateBranch<T>>> {
    if params.u0 == T::zero() {
        return Err(Error::NoLattice(
            "u0 = 0: the width variable is undefined".into(),
        ));
    }
    if !(y_lo > T::zero()) || !(y_lo < y_hi) {
        return Err(Error::InvalidArgument(
            "need 0 < y_lo < y_hi".into(),
        ));
    }
    if n_scan < 100 {
        return Err(Error::InvalidArgument(format!(
            "n_scan must be >= 100, got {n_scan}"
        )));
    }

    let f = |y: T| residual_y(y, summary, params);
    let roots = scan_roots(&f, y_lo, y_hi, n_scan, lit(1e-8));
    Ok(roots
        .into_iter()
        .map(|y| SteadyStateBranch {
            n_bar: photons_from_y(y, params.u0),
            y,
            xi: xi_from_width(y, summary, params),
            stability: Stability::Undetermined,
            valid_tb: y <= params.y_max,
        })
        .collect())
}

/// Controls for the perturb-and-integrate stability test.
#[derive(Clone, Copy, Debug)]
pub struct StabilitySettings<T> {
    /// Relative size of the initial perturbation.
    pub epsilon: T,
    /// Relative band around the branch that counts as "returned".
    pub band: T,
    pub integration: IntegrationSettings<T>,
}

impl<T: Real> StabilitySettings<T> {
    /// Defaults: `ε = 10⁻²`, band `±1 %`, integration to `t_max = 50/κ`.
    pub fn default_for(params: &SystemParams<T>) -> Self {
        StabilitySettings {
            epsilon: lit(1e-2),
            band: lit(1e-2),
            integration: IntegrationSettings {
                t_max: lit::<T>(50.0) / params.kappa,
                stride: 50,
                ..IntegrationSettings::default()
            },
        }
    }
}

enum PerturbationOutcome {
    Returned,
    Departed,
    Ambiguous,
}

fn perturbation_outcome<T: Real>(
    traj: &FieldTrajectory<T>,
    target: T,
    settings: &StabilitySettings<T>,
) -> PerturbationOutcome {
    let within = |v: T| (v - target).abs() <= settings.band * target.abs();
    match traj.status {
        // Departure toward the weak-field state below the coupling floor.
        TrajectoryStatus::LeftDomain { .. } => PerturbationOutcome::Departed,
        TrajectoryStatus::Diverged { .. } => PerturbationOutcome::Ambiguous,
        TrajectoryStatus::Converged => {
            if traj.attractor.map(within).unwrap_or(false) {
                PerturbationOutcome::Returned
            } else {
                PerturbationOutcome::Departed
            }
        }
        TrajectoryStatus::ReachedTMax => {
            if within(traj.trailing_mean(settings.integration.window)) {
                PerturbationOutcome::Returned
            } else {
                PerturbationOutcome::Ambiguous
            }
        }
    }
}

/// Labels a branch by integrating the field equations from photon numbers
/// `n̄(1 ± ε)`.
///
/// The return band is measured against the stationary point of the
/// exact-difference dynamics nearest the branch (the two shift constructions
/// differ at small photon number), falling back to the branch value itself
/// when no such twin exists; a trajectory that leaves the coupling domain
/// counts as departure toward the weak-field state.
pub fn classify_stability<T: Real>(
    branch: &SteadyStateBranch<T>,
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
    settings: &StabilitySettings<T>,
) -> SteadyStateBranch<T> {
    let mut out = *branch;
    let n_star = branch.n_bar;
    let eps = settings.epsilon;
    if n_star * (T::one() - eps) <= settings.integration.n_floor {
        // Too close to the domain floor to perturb downward.
        out.stability = Stability::Undetermined;
        return out;
    }

    let target = difference_twin(n_star, summary, params).unwrap_or(n_star);

    let mut returned = 0;
    let mut departed = 0;
    for dir in [T::one() + eps, T::one() - eps] {
        let traj = match integrate(n_star * dir, summary, params, &settings.integration) {
            Ok(t) => t,
            Err(_) => {
                out.stability = Stability::Undetermined;
                return out;
            }
        };
        match perturbation_outcome(&traj, target, settings) {
            PerturbationOutcome::Returned => returned += 1,
            PerturbationOutcome::Departed => departed += 1,
            PerturbationOutcome::Ambiguous => {}
        }
    }
    out.stability = if departed > 0 {
        Stability::Unstable
    } else if returned == 2 {
        Stability::Stable
    } else {
        Stability::Undetermined
    };
    out
}

/// Stationary photon number of the exact-difference dynamics nearest to
/// `n_star` (in log distance), searched within a factor of four.
pub fn difference_twin<T: Real>(
    n_star: T,
    summary: &FermiSeaSummary<T>,
    params: &SystemParams<T>,
) -> Option<T> {
    let residual = |n: T| {
        let d = field_shift_exact(n, summary, params);
        let detuned = params.delta_c - d;
        params.eta * params.eta / n - params.kappa * params.kappa - detuned * detuned
    };
    let four = lit::<T>(4.0);
    let roots = scan_roots(&residual, n_star / four, n_star * four, 256, lit(1e-10));
    roots
        .into_iter()
        .min_by(|a, b| {
            let da = (*a / n_star).ln().abs();
            let db = (*b / n_star).ln().abs();
            da.partial_cmp(&db).unwrap()
        })
}

/// Branch-search controls shared by the sweep drivers.
#[derive(Clone, Copy, Debug)]
pub struct SweepSettings<T> {
    pub y_lo: T,
    pub y_hi: T,
    pub n_scan: usize,
    /// When present, every branch is classified by perturb-and-integrate.
    pub stability: Option<StabilitySettings<T>>,
}

impl<T: Real> SweepSettings<T> {
    /// Search window `(1e-3, 1.0]` with 800 scan points and no
    /// classification; the upper cut deliberately exposes part of the
    /// invalid region, which downstream consumers see flagged.
    pub fn default_window() -> Self {
        SweepSettings {
            y_lo: lit(1e-3),
            y_hi: lit(1.0),
            n_scan: 800,
            stability: None,
        }
    }
}

/// One sweep row: the swept parameter values plus the branch list, or the
/// per-point failure message.
#[derive(Clone, Debug)]
pub struct SweepPoint<T> {
    pub n_atoms: usize,
    pub eta: T,
    pub branches: std::result::Result<Vec<SteadyStateBranch<T>>, String>,
}

fn solve_point<T: Real>(
    params: &SystemParams<T>,
    summary: &FermiSeaSummary<T>,
    settings: &SweepSettings<T>,
) -> std::result::Result<Vec<SteadyStateBranch<T>>, String> {
    let branches = find_branches(summary, params, settings.y_lo, settings.y_hi, settings.n_scan)
        .map_err(|e| e.to_string())?;
    Ok(match &settings.stability {
        None => branches,
        Some(st) => branches
            .iter()
            .map(|b| classify_stability(b, summary, params, st))
            .collect(),
    })
}

/// Solves the steady-state problem for every atom number in `n_list`.
///
/// The Fermi sea is rebuilt per point; rows keep the input order under any
/// parallel schedule, and per-point failures are carried in the row.
pub fn sweep_atoms<T: Real>(
    params: &SystemParams<T>,
    n_list: &[usize],
    settings: &SweepSettings<T>,
) -> Result<Vec<SweepPoint<T>>> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("atom list must be nonempty".into()));
    }
    let grid = MomentumGrid::<T>::new(params.n_sites)?;
    Ok(n_list
        .par_iter()
        .map(|&n_atoms| {
            let branches = (|| {
                let point = SystemParams {
                    n_atoms,
                    ..*params
                };
                point.validate().map_err(|e| e.to_string())?;
                let sea = build_fermi_sea(n_atoms, &grid).map_err(|e| e.to_string())?;
                let summary = hopping_expectation(&sea, &grid);
                solve_point(&point, &summary, settings)
            })();
            SweepPoint {
                n_atoms,
                eta: params.eta,
                branches,
            }
        })
        .collect())
}

/// Solves the steady-state problem for every pump amplitude in `eta_list`
/// at fixed atom number. `B̃` depends only on `(N, K)` and is computed once.
pub fn sweep_pump<T: Real>(
    params: &SystemParams<T>,
    eta_list: &[T],
    settings: &SweepSettings<T>,
) -> Result<Vec<SweepPoint<T>>> {
    if eta_list.is_empty() {
        return Err(Error::InvalidArgument("pump list must be nonempty".into()));
    }
    let grid = MomentumGrid::<T>::new(params.n_sites)?;
    let sea = build_fermi_sea(params.n_atoms, &grid)?;
    let summary = hopping_expectation(&sea, &grid);
    Ok(eta_list
        .par_iter()
        .map(|&eta| {
            let branches = (|| {
                let point = SystemParams { eta, ..*params };
                point.validate().map_err(|e| e.to_string())?;
                solve_point(&point, &summary, settings)
            })();
            SweepPoint {
                n_atoms: params.n_atoms,
                eta,
                branches,
            }
        })
        .collect())
}

/// A discontinuity of the followed attractor during a hysteresis sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpEvent<T> {
    pub eta: T,
    /// Followed photon number before the jump, if any branch was followed.
    pub from: Option<T>,
    /// Followed photon number after the jump; `None` means collapse to the
    /// weak-field state (no branch left).
    pub to: Option<T>,
}

/// The followed attractor along one sweep direction.
#[derive(Clone, Debug)]
pub struct FollowedPath<T> {
    /// `(η, followed n̄)` in sweep order; `None` when no branch exists.
    pub rows: Vec<(T, Option<T>)>,
    pub jumps: Vec<JumpEvent<T>>,
}

/// Follows branches by continuity through a pump sweep, in the order the
/// points are given; reverse the slice for the return direction.
///
/// At each point the branch nearest the previously followed value (log
/// distance) continues the path; a relative change beyond `jump_factor`, or
/// the disappearance of all branches, is recorded as a jump. When no branch
/// was previously followed the path seeds on the smallest (`start_low`) or
/// largest branch.
pub fn follow_hysteresis<T: Real>(
    points: &[SweepPoint<T>],
    start_low: bool,
    jump_factor: T,
) -> FollowedPath<T> {
    let mut rows = Vec::with_capacity(points.len());
    let mut jumps = Vec::new();
    let mut followed: Option<T> = None;

    for point in points {
        let values: Vec<T> = match &point.branches {
            Ok(list) => list.iter().map(|b| b.n_bar).collect(),
            Err(_) => Vec::new(),
        };
        let next = if values.is_empty() {
            None
        } else {
            match followed {
                None => Some(if start_low {
                    values.iter().copied().fold(T::infinity(), T::min)
                } else {
                    values.iter().copied().fold(T::neg_infinity(), T::max)
                }),
                Some(prev) => {
                    let nearest = values
                        .iter()
                        .copied()
                        .min_by(|a, b| {
                            let da = (*a / prev).ln().abs();
                            let db = (*b / prev).ln().abs();
                            da.partial_cmp(&db).unwrap()
                        })
                        .unwrap();
                    Some(nearest)
                }
            }
        };

        let jumped = match (followed, next) {
            (Some(prev), Some(now)) => (now / prev).ln().abs() > jump_factor.ln(),
            (Some(_), None) => true,
            (None, Some(_)) => followed.is_none() && !rows.is_empty(),
            (None, None) => false,
        };
        if jumped {
            jumps.push(JumpEvent {
                eta: point.eta,
                from: followed,
                to: next,
            });
        }
        rows.push((point.eta, next));
        followed = next;
    }

    FollowedPath { rows, jumps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::y_from_photons;

    fn summary_for(params: &SystemParams<f64>) -> FermiSeaSummary<f64> {
        let grid = MomentumGrid::new(params.n_sites).unwrap();
        let sea = build_fermi_sea(params.n_atoms, &grid).unwrap();
        hopping_expectation(&sea, &grid)
    }

    fn fig1a(n_atoms: usize) -> SystemParams<f64> {
        SystemParams::new(10.0, 10.0, 10.0, 1.0, n_atoms, 50, Sign::Positive).unwrap()
    }

    fn fig3(n_atoms: usize, eta: f64) -> SystemParams<f64> {
        SystemParams::new(0.62, 5.0, eta, 1.0, n_atoms, 50, Sign::Positive).unwrap()
    }

    #[test]
    fn shift_functions_limits() {
        let f = ShiftFunctions::<f64>::evaluate(1e-9, Sign::Positive);
        assert!(f.f1.abs() < 1e-8);
        for &y in &[0.05, 0.2, 0.5, 1.0] {
            for s in [Sign::Positive, Sign::Negative] {
                let f = ShiftFunctions::<f64>::evaluate(y, s);
                assert!(f.f1.is_finite() && f.f2.is_finite());
            }
        }
    }

    #[test]
    fn width_and_photon_shift_routes_agree() {
        // The closed form in y and the expectation-plus-derivatives form in
        // n̄ are the same function.
        for (params, ns) in [
            (fig1a(12), [0.5, 3.0, 20.0]),
            (fig3(10, 4.0), [2.0, 8.0, 60.0]),
            (
                SystemParams::new(-1.0, -20.0, 30.0, 1.0, 20, 50, Sign::Negative).unwrap(),
                [5.0, 40.0, 600.0],
            ),
        ] {
            let summary = summary_for(&params);
            for n in ns {
                let xi_n = xi_shift(n, &summary, &params).unwrap();
                let xi_y = xi_from_width(y_from_photons(n, params.u0), &summary, &params);
                assert!(
                    (xi_n - xi_y).abs() <= 1e-12 * xi_n.abs().max(1.0),
                    "n̄ = {n}: {xi_n} vs {xi_y}"
                );
            }
        }
    }

    #[test]
    fn xi_matches_finite_difference_expectation_construction() {
        // ξ = H₂ + ∂H₁ + n̄ ∂H₂ with the derivatives taken numerically on
        // the unshifted expectations.
        let params = fig1a(12);
        let summary = summary_for(&params);
        let n_of = |n: f64| {
            let c = gaussian_coefficients(n, &params).unwrap();
            let nn = summary.n_atoms as f64;
            let h1 = c.e_onsite * nn + c.e_hop * nn * summary.b_tilde;
            let h2 = params.u0 * (c.j_onsite * nn + c.j_hop * nn * summary.b_tilde);
            (h1, h2)
        };
        for n in [2.0, 7.0, 31.0] {
            let h = 1e-5 * n;
            let (h1p, h2p) = n_of(n + h);
            let (h1m, h2m) = n_of(n - h);
            let (_, h2) = n_of(n);
            let fd = h2 + (h1p - h1m) / (2.0 * h) + n * (h2p - h2m) / (2.0 * h);
            let xi = xi_shift(n, &summary, &params).unwrap();
            assert!((xi - fd).abs() <= 1e-6 * xi.abs(), "n̄ = {n}: {xi} vs {fd}");
        }
    }

    #[test]
    fn xi_vanishes_for_empty_gas_and_deep_lattice_leading_term() {
        let params = fig1a(0);
        assert_eq!(xi_shift(5.0, &FermiSeaSummary::empty(), &params), Ok(0.0));
        assert!(xi_shift(-1.0, &FermiSeaSummary::empty(), &params).is_err());

        // With the derivative terms forced to zero the shift reduces to the
        // leading dispersive term U₀N(J + J₁B̃).
        let params = fig1a(12);
        let summary = summary_for(&params);
        for n in [5.0, 1e3, 1e6] {
            let c = gaussian_coefficients(n, &params).unwrap();
            let nn = summary.n_atoms as f64;
            let b = summary.b_tilde;
            let leading = params.u0 * nn * (c.j_onsite + c.j_hop * b);
            let derivative_terms =
                nn * (c.d_e + c.d_e_hop * b) + n * params.u0 * nn * (c.d_j + c.d_j_hop * b);
            let xi = xi_shift(n, &summary, &params).unwrap();
            assert!((xi - derivative_terms - leading).abs() <= 1e-12 * xi.abs().max(1.0));
        }
    }

    #[test]
    fn empty_cavity_has_single_lorentzian_branch() {
        let cases: [(f64, f64, f64, f64); 3] =
            [(4.0, 3.0, 1.0, 10.0), (10.0, 10.0, 1.0, 10.0), (2.0, -7.0, 0.5, 3.0)];
        for (eta, delta_c, kappa, u0) in cases {
            let params =
                SystemParams::new(u0, delta_c, eta, kappa, 0, 50, Sign::Positive).unwrap();
            let summary = FermiSeaSummary::empty();
            let branches =
                find_branches(&summary, &params, 1e-4, 1e3, 4000).unwrap();
            assert_eq!(branches.len(), 1);
            let expect = eta * eta / (kappa * kappa + delta_c * delta_c);
            let got = branches[0].n_bar;
            assert!(
                (got - expect).abs() / expect < 1e-12,
                "{got} vs {expect}"
            );
        }
    }

    #[test]
    fn no_roots_below_threshold_is_legal() {
        // Zero pump: R(y) < 0 everywhere.
        let params = SystemParams::new(10.0, 10.0, 0.0, 1.0, 0, 50, Sign::Positive).unwrap();
        let branches =
            find_branches(&FermiSeaSummary::empty(), &params, 1e-3, 1.0, 400).unwrap();
        assert!(branches.is_empty());
    }

    #[test]
    fn branches_satisfy_fixed_point_and_ceiling() {
        let params = fig1a(12);
        let summary = summary_for(&params);
        let branches = find_branches(&summary, &params, 1e-3, 1.0, 2000).unwrap();
        assert!(!branches.is_empty());
        let ceiling = params.eta * params.eta / (params.kappa * params.kappa);
        for b in &branches {
            let res = fixed_point_residual(b.n_bar, &summary, &params).unwrap();
            assert!(res <= 1e-8, "residual {res} at n̄ = {}", b.n_bar);
            assert!(b.n_bar <= ceiling * (1.0 + 1e-12));
            assert_eq!(b.valid_tb, b.y <= params.y_max);
        }
    }

    #[test]
    fn fig1a_regime_is_multivalued_within_validity() {
        let params = fig1a(12);
        let summary = summary_for(&params);
        let branches = find_branches(&summary, &params, 1e-3, 0.5, 2000).unwrap();
        assert!(
            branches.len() >= 2,
            "expected a multivalued region, found {}",
            branches.len()
        );
        assert!(branches.iter().all(|b| b.valid_tb));
    }

    #[test]
    fn stability_errors_and_rejects() {
        let params = fig1a(12);
        let summary = summary_for(&params);
        assert!(matches!(
            find_branches(&summary, &params, 0.0, 1.0, 400),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            find_branches(&summary, &params, 1e-3, 1.0, 5),
            Err(Error::InvalidArgument(_))
        ));
        let no_lattice = SystemParams::new(0.0, 1.0, 1.0, 1.0, 0, 10, Sign::Positive).unwrap();
        assert!(matches!(
            find_branches(&FermiSeaSummary::empty(), &no_lattice, 1e-3, 1.0, 400),
            Err(Error::NoLattice(_))
        ));
    }

    #[test]
    fn empty_cavity_branch_is_stable() {
        let params = SystemParams::new(10.0, 3.0, 4.0, 1.0, 0, 50, Sign::Positive).unwrap();
        let summary = FermiSeaSummary::empty();
        let branches = find_branches(&summary, &params, 1e-4, 10.0, 2000).unwrap();
        assert_eq!(branches.len(), 1);
        let settings = StabilitySettings {
            integration: IntegrationSettings {
                n_floor: 1e-6,
                t_max: 60.0,
                ..IntegrationSettings::default()
            },
            ..StabilitySettings::default_for(&params)
        };
        let labelled = classify_stability(&branches[0], &summary, &params, &settings);
        assert_eq!(labelled.stability, Stability::Stable);
    }

    #[test]
    fn sweeps_keep_order_and_flag_failures() {
        let params = fig1a(1);
        let settings = SweepSettings::default_window();
        // 60 atoms exceeds the 50-site capacity: flagged, not fatal.
        let rows = sweep_atoms(&params, &[1, 60, 12], &settings).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].n_atoms, 1);
        assert!(rows[1].branches.is_err());
        assert!(rows[2].branches.is_ok());

        let params = fig3(10, 4.0);
        let rows = sweep_pump(&params, &[2.0, 4.0, -1.0], &settings).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[2].branches.is_err());
    }

    #[test]
    fn hysteresis_follow_detects_jumps_on_synthetic_table() {
        let branch = |n_bar: f64| SteadyStateBranch {
            n_bar,
            y: 1.0,
            xi: 0.0,
            stability: Stability::Undetermined,
            valid_tb: true,
        };
        let point = |eta: f64, ns: &[f64]| SweepPoint {
            n_atoms: 10,
            eta,
            branches: Ok(ns.iter().copied().map(branch).collect()),
        };
        // Low branch disappears at η = 3.0.
        let table = vec![
            point(1.0, &[1.0, 50.0]),
            point(2.0, &[1.2, 52.0]),
            point(3.0, &[55.0]),
            point(4.0, &[58.0]),
        ];
        let up = follow_hysteresis(&table, true, 2.0);
        assert_eq!(up.jumps.len(), 1);
        assert_eq!(up.jumps[0].eta, 3.0);
        assert_eq!(up.jumps[0].from, Some(1.2));
        assert_eq!(up.jumps[0].to, Some(55.0));

        let mut reversed = table.clone();
        reversed.reverse();
        let down = follow_hysteresis(&reversed, false, 2.0);
        // The high branch survives the whole way down: no jump.
        assert!(down.jumps.is_empty());
        assert_eq!(down.rows.last().unwrap().1, Some(50.0));
    }
}
