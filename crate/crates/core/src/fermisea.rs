//! Many-body fermionic states on the periodic quasi-momentum grid.
//!
//! The `K`-site lattice with periodic boundary conditions carries quasi
//! momenta `k_j = -1 + 2j/K` in the half-open zone `[-1, 1)`. A state of `N`
//! polarized fermions is a set of occupied grid indices; the only quantity the
//! cavity equations need from it is the per-atom hopping expectation
//! `B̃ = (2/N) Σ cos(k_i π)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{LatticeCoefficients, SystemParams};
use crate::num::{count, lit, Real};

/// Periodic quasi-momentum grid with `K` points `k_j = (2j - K)/K`.
///
/// The integer numerators `2j - K` are kept so that ordering and tie-breaking
/// are exact; `cos(k_j π)` is precomputed once.
#[derive(Clone, Debug)]
pub struct MomentumGrid<T> {
    n_sites: usize,
    numerators: Vec<i64>,
    k: Vec<T>,
    cos_k_pi: Vec<T>,
}

impl<T: Real> MomentumGrid<T> {
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidParams("n_sites must be >= 1".into()));
        }
        let k_of = |m: i64| T::from_i64(m).unwrap() / count::<T>(n_sites);
        let numerators: Vec<i64> = (0..n_sites as i64).map(|j| 2 * j - n_sites as i64).collect();
        let k: Vec<T> = numerators.iter().map(|&m| k_of(m)).collect();
        let cos_k_pi: Vec<T> = k.iter().map(|&kj| (kj * T::PI()).cos()).collect();
        Ok(MomentumGrid {
            n_sites,
            numerators,
            k,
            cos_k_pi,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Quasi-momentum values in `[-1, 1)`, grid order.
    pub fn k_values(&self) -> &[T] {
        &self.k
    }

    /// `cos(k_j π)` in grid order.
    pub fn cos_k_pi(&self) -> &[T] {
        &self.cos_k_pi
    }

    /// Full-grid cosine sum; vanishes exactly for `K >= 2`.
    pub fn cos_sum(&self) -> T {
        self.cos_k_pi.iter().copied().sum()
    }

    /// Grid indices ordered by `|k|` ascending, degenerate `±k` pairs broken
    /// negative-first. This is the filling order of the Fermi sea.
    pub fn indices_by_momentum(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n_sites).collect();
        order.sort_by_key(|&j| {
            let m = self.numerators[j];
            (m.abs(), m)
        });
        order
    }
}

/// Set of occupied grid indices; at most one fermion per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccupationState {
    occupied: Vec<usize>,
    n_sites: usize,
}

impl OccupationState {
    pub fn new(mut occupied: Vec<usize>, n_sites: usize) -> Result<Self> {
        occupied.sort_unstable();
        if occupied.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidOccupation("duplicate grid index".into()));
        }
        if occupied.last().is_some_and(|&j| j >= n_sites) {
            return Err(Error::InvalidOccupation("index beyond grid".into()));
        }
        if occupied.len() > n_sites {
            return Err(Error::Capacity {
                n_atoms: occupied.len(),
                n_sites,
            });
        }
        Ok(OccupationState { occupied, n_sites })
    }

    pub fn occupied(&self) -> &[usize] {
        &self.occupied
    }

    pub fn n_atoms(&self) -> usize {
        self.occupied.len()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Grid indices not occupied, ascending.
    pub fn unoccupied(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n_sites - self.occupied.len());
        let mut it = self.occupied.iter().copied().peekable();
        for j in 0..self.n_sites {
            if it.peek() == Some(&j) {
                it.next();
            } else {
                out.push(j);
            }
        }
        out
    }
}

/// The per-atom hopping expectation `B̃` and the atom count, which is all the
/// cavity equations see of the atomic state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FermiSeaSummary<T> {
    pub b_tilde: T,
    pub n_atoms: usize,
}

impl<T: Real> FermiSeaSummary<T> {
    /// The empty gas.
    pub fn empty() -> Self {
        FermiSeaSummary {
            b_tilde: T::zero(),
            n_atoms: 0,
        }
    }
}

/// Ground-state filling: occupy the `N` states of smallest `|k|`.
pub fn build_fermi_sea<T: Real>(n_atoms: usize, grid: &MomentumGrid<T>) -> Result<OccupationState> {
    if n_atoms > grid.n_sites() {
        return Err(Error::Capacity {
            n_atoms,
            n_sites: grid.n_sites(),
        });
    }
    let occupied = grid.indices_by_momentum()[..n_atoms].to_vec();
    OccupationState::new(occupied, grid.n_sites())
}

/// `B̃ = (2/N) Σ_{i∈occupied} cos(k_i π)`; zero for the empty gas.
pub fn hopping_expectation<T: Real>(
    state: &OccupationState,
    grid: &MomentumGrid<T>,
) -> FermiSeaSummary<T> {
    let n = state.n_atoms();
    if n == 0 {
        return FermiSeaSummary::empty();
    }
    let sum: T = state
        .occupied()
        .iter()
        .map(|&j| grid.cos_k_pi()[j])
        .sum();
    FermiSeaSummary {
        b_tilde: lit::<T>(2.0) * sum / count(n),
        n_atoms: n,
    }
}

/// Expectations of the two single-particle Hamiltonians over the state:
/// `h1 = E·N + E1·N·B̃` and `h2 = U₀(J·N + J1·N·B̃)`.
///
/// The caller chooses the photon argument of the coefficients; the dynamics
/// passes couplings at `n̄` or `n̄ - 1` depending on where the normal-ordering
/// shift applies.
pub fn h1_h2_expectations<T: Real>(
    summary: &FermiSeaSummary<T>,
    coeffs: &LatticeCoefficients<T>,
    params: &SystemParams<T>,
) -> (T, T) {
    let n = count::<T>(summary.n_atoms);
    let nb = n * summary.b_tilde;
    let h1 = coeffs.e_onsite * n + coeffs.e_hop * nb;
    let h2 = params.u0 * (coeffs.j_onsite * n + coeffs.j_hop * nb);
    (h1, h2)
}

/// Scalar energy of the cavity-mediated single-band Hamiltonian,
/// `E N + (η²/κ) arctan(ζ/κ) + [E1 + U₀η²J1/(κ² + ζ²)] N B̃`
/// with `ζ = Δc - U₀ J N` taken at the operating-point couplings.
pub fn effective_energy<T: Real>(
    summary: &FermiSeaSummary<T>,
    coeffs: &LatticeCoefficients<T>,
    params: &SystemParams<T>,
) -> T {
    let n = count::<T>(summary.n_atoms);
    let zeta = params.delta_c - params.u0 * coeffs.j_onsite * n;
    let eta2 = params.eta * params.eta;
    let f = eta2 / params.kappa * (zeta / params.kappa).atan();
    let hop = coeffs.e_hop + params.u0 * eta2 * coeffs.j_hop / (params.kappa * params.kappa + zeta * zeta);
    coeffs.e_onsite * n + f + hop * n * summary.b_tilde
}

/// Same energy evaluated directly from an occupation.
pub fn effective_energy_of<T: Real>(
    state: &OccupationState,
    grid: &MomentumGrid<T>,
    coeffs: &LatticeCoefficients<T>,
    params: &SystemParams<T>,
) -> T {
    effective_energy(&hopping_expectation(state, grid), coeffs, params)
}

/// Outcome of the variational ground-state check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityReport<T> {
    /// Trials actually executed (zero when no state is free).
    pub trials_run: usize,
    /// How many perturbed states had lower energy than the candidate.
    pub n_lower: usize,
    /// The most negative energy difference `E_perturbed - E_candidate`
    /// encountered; `None` when no trial ran.
    pub min_delta: Option<T>,
}

/// Tests the candidate ground state by repeatedly moving one fermion from a
/// random occupied state to a random unoccupied one and comparing energies.
///
/// Trial `t` draws from a generator seeded by `(seed, t)`, so the sequence is
/// reproducible and order-independent.
pub fn variational_stability_check<T: Real>(
    state: &OccupationState,
    grid: &MomentumGrid<T>,
    coeffs: &LatticeCoefficients<T>,
    params: &SystemParams<T>,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport<T>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let holes = state.unoccupied();
    if state.n_atoms() == 0 || holes.is_empty() {
        // Nothing can move: the check degenerates to zero trials.
        return Ok(StabilityReport {
            trials_run: 0,
            n_lower: 0,
            min_delta: None,
        });
    }

    let base = effective_energy_of(state, grid, coeffs, params);
    let mut n_lower = 0;
    let mut min_delta: Option<T> = None;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let from = state.occupied()[rng.gen_range(0..state.n_atoms())];
        let to = holes[rng.gen_range(0..holes.len())];

        let mut moved: Vec<usize> = state
            .occupied()
            .iter()
            .copied()
            .map(|j| if j == from { to } else { j })
            .collect();
        moved.sort_unstable();
        let perturbed = OccupationState::new(moved, state.n_sites())?;
        let delta = effective_energy_of(&perturbed, grid, coeffs, params) - base;
        if delta < T::zero() {
            n_lower += 1;
        }
        min_delta = Some(match min_delta {
            Some(d) if d <= delta => d,
            _ => delta,
        });
    }
    Ok(StabilityReport {
        trials_run: trials,
        n_lower,
        min_delta,
    })
}
