//! Dimensionless system parameters and the Gaussian-Wannier closed forms for
//! the photon-number-dependent lattice couplings.
//!
//! Everything downstream works in recoil units: energies and rates are divided
//! by the recoil frequency `ω_r = ħq²/2m`, lengths by the inverse cavity wave
//! number, and time runs in units of `1/ω_r`. The canonical internal variable
//! is the squared Gaussian width `y = |U₀ n̄|^{-1/2}`; the conversions
//! [`y_from_photons`] / [`photons_from_y`] defined here are the single source
//! of that convention.

use crate::error::{Error, Result};
use crate::num::{count, lit, Real};

/// Reduced Planck constant in J·s, used only by [`PhysicalParams::rescale`].
const HBAR: f64 = 1.054_571_817e-34;

/// Sign of the atomic detuning, `s = sign(Δa)`.
///
/// Positive detuning traps the atoms at the nodes of the cavity potential,
/// negative detuning at the antinodes; `J` and `J1` carry the sign because the
/// Wannier centers differ between the two cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// The sign as a scalar factor, `+1` or `-1`.
    #[inline]
    pub fn factor<T: Real>(self) -> T {
        match self {
            Sign::Positive => T::one(),
            Sign::Negative => -T::one(),
        }
    }

    /// Sign of a nonzero scalar.
    pub fn of<T: Real>(x: T) -> Option<Sign> {
        if x > T::zero() {
            Some(Sign::Positive)
        } else if x < T::zero() {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn from_i8(v: i8) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Positive),
            -1 => Ok(Sign::Negative),
            other => Err(Error::InvalidParams(format!(
                "s must be +1 or -1, got {other}"
            ))),
        }
    }
}

/// Dimensionless control parameters of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams<T> {
    /// Light shift per photon, `U₀ = Ũ₀/ω_r`; may be negative.
    pub u0: T,
    /// Cavity-pump detuning `Δc`.
    pub delta_c: T,
    /// Pump amplitude `η ≥ 0`.
    pub eta: T,
    /// Cavity decay rate `κ > 0`.
    pub kappa: T,
    /// Number of polarized fermions `N`.
    pub n_atoms: usize,
    /// Number of lattice sites `K` under periodic boundary conditions.
    pub n_sites: usize,
    /// Sign of the atomic detuning.
    pub s: Sign,
    /// Tight-binding validity threshold on the squared width `y`.
    pub y_max: T,
}

impl<T: Real> SystemParams<T> {
    /// Default validity threshold for the tight-binding regime.
    pub fn default_y_max() -> T {
        lit(0.5)
    }

    pub fn new(
        u0: T,
        delta_c: T,
        eta: T,
        kappa: T,
        n_atoms: usize,
        n_sites: usize,
        s: Sign,
    ) -> Result<Self> {
        let params = SystemParams {
            u0,
            delta_c,
            eta,
            kappa,
            n_atoms,
            n_sites,
            s,
            y_max: Self::default_y_max(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_y_max(mut self, y_max: T) -> Result<Self> {
        self.y_max = y_max;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = self.u0.is_finite()
            && self.delta_c.is_finite()
            && self.eta.is_finite()
            && self.kappa.is_finite()
            && self.y_max.is_finite();
        if !all_finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.kappa <= T::zero() {
            return Err(Error::InvalidParams(format!(
                "kappa must be > 0, got {}",
                self.kappa
            )));
        }
        if self.eta < T::zero() {
            return Err(Error::InvalidParams(format!(
                "eta must be >= 0, got {}",
                self.eta
            )));
        }
        if self.n_sites == 0 {
            return Err(Error::InvalidParams("n_sites must be >= 1".into()));
        }
        if self.n_atoms > self.n_sites {
            return Err(Error::Capacity {
                n_atoms: self.n_atoms,
                n_sites: self.n_sites,
            });
        }
        if self.y_max <= T::zero() {
            return Err(Error::InvalidParams(format!(
                "y_max must be > 0, got {}",
                self.y_max
            )));
        }
        if self.u0 != T::zero() && Sign::of(self.u0) != Some(self.s) {
            return Err(Error::InvalidParams(format!(
                "sign(u0) must equal s when u0 != 0: u0 = {}, s = {}",
                self.u0,
                self.s.as_i8()
            )));
        }
        Ok(())
    }
}

/// Dimensionful parameters, all rates in rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams<T> {
    /// Atomic mass in kg.
    pub mass: T,
    /// Cavity-mode wavelength in m.
    pub wavelength: T,
    /// Atom-cavity coupling `g₀`.
    pub g0: T,
    /// Pump-atom detuning `Δ̃a`.
    pub delta_a: T,
    /// Pump-cavity detuning `Δ̃c`.
    pub delta_c: T,
    /// Pump amplitude `η̃`.
    pub eta: T,
    /// Cavity decay rate `κ̃`.
    pub kappa: T,
}

impl<T: Real> PhysicalParams<T> {
    /// Recoil frequency `ω_r = ħq²/2m` with `q = 2π/λ`, in rad/s.
    pub fn recoil_frequency(&self) -> Result<T> {
        if self.mass <= T::zero() || self.wavelength <= T::zero() {
            return Err(Error::InvalidParams(
                "mass and wavelength must be > 0".into(),
            ));
        }
        let q = lit::<T>(2.0) * T::PI() / self.wavelength;
        Ok(lit::<T>(HBAR) * q * q / (lit::<T>(2.0) * self.mass))
    }

    /// Divides all rates by the recoil frequency and fixes `s = sign(Δ̃a)`.
    pub fn rescale(&self, n_atoms: usize, n_sites: usize) -> Result<SystemParams<T>> {
        let finite = self.g0.is_finite()
            && self.delta_a.is_finite()
            && self.delta_c.is_finite()
            && self.eta.is_finite()
            && self.kappa.is_finite();
        if !finite {
            return Err(Error::InvalidParams("non-finite physical rate".into()));
        }
        let omega_r = self.recoil_frequency()?;
        let s = if self.g0 == T::zero() {
            // No coupling: U₀ = 0 and the detuning sign is immaterial; keep
            // whatever Δ̃a says, defaulting to positive at exact resonance.
            Sign::of(self.delta_a).unwrap_or(Sign::Positive)
        } else {
            Sign::of(self.delta_a).ok_or(Error::ZeroAtomicDetuning)?
        };
        let u0 = if self.g0 == T::zero() {
            T::zero()
        } else {
            self.g0 * self.g0 / self.delta_a / omega_r
        };
        SystemParams::new(
            u0,
            self.delta_c / omega_r,
            self.eta / omega_r,
            self.kappa / omega_r,
            n_atoms,
            n_sites,
            s,
        )
    }
}

/// Photon-number-dependent couplings of the single-band lattice model and
/// their derivatives with respect to the photon number.
///
/// `e_onsite`/`j_onsite` are the on-site kinetic and overlap integrals,
/// `e_hop`/`j_hop` the nearest-neighbour ones; `d_*` hold `d/dn̄` at fixed
/// parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeCoefficients<T> {
    /// Squared Gaussian width `y = σ² = |U₀ n̄|^{-1/2}`.
    pub y: T,
    pub e_onsite: T,
    pub j_onsite: T,
    pub e_hop: T,
    pub j_hop: T,
    pub d_e: T,
    pub d_j: T,
    pub d_e_hop: T,
    pub d_j_hop: T,
}

/// Squared width from the photon number: `y = (|U₀| n̄)^{-1/2}`.
#[inline]
pub fn y_from_photons<T: Real>(n_photons: T, u0: T) -> T {
    (u0.abs() * n_photons).sqrt().recip()
}

/// Photon number from the squared width: `n̄ = 1/(|U₀| y²)`.
#[inline]
pub fn photons_from_y<T: Real>(y: T, u0: T) -> T {
    (u0.abs() * y * y).recip()
}

/// Closed-form couplings of the orthogonality-corrected Gaussian ansatz at
/// width `y`, together with their photon-number derivatives at `n̄`.
fn coefficients_at_width<T: Real>(y: T, n_photons: T, s: Sign) -> LatticeCoefficients<T> {
    let sf: T = s.factor();
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let pi2 = T::PI() * T::PI();

    let exp_y = (-y).exp();
    let gauss = (-pi2 / (lit::<T>(4.0) * y)).exp();

    let e_onsite = y.recip();
    let j_onsite = half * (T::one() - sf * exp_y);
    // -(1/2y²) e^{-π²/4y} (2y + π²), arranged to stay finite as y → ∞.
    let e_hop = -gauss * (y.recip() + pi2 / (two * y * y));
    let j_hop = sf * half * gauss * exp_y;

    // Chain rule through dy/dn̄ = -y/(2n̄).
    let dy_dn = -y / (two * n_photons);
    let de_dy = -(y * y).recip();
    let dj_dy = half * sf * exp_y;
    let de1_dy = -half
        * gauss
        * (pi2 * pi2 / (lit::<T>(4.0) * y.powi(4))
            - lit::<T>(1.5) * pi2 / y.powi(3)
            - two / (y * y));
    let dj1_dy = j_hop * (pi2 / (lit::<T>(4.0) * y * y) - T::one());

    LatticeCoefficients {
        y,
        e_onsite,
        j_onsite,
        e_hop,
        j_hop,
        d_e: de_dy * dy_dn,
        d_j: dj_dy * dy_dn,
        d_e_hop: de1_dy * dy_dn,
        d_j_hop: dj1_dy * dy_dn,
    }
}

/// Evaluates the Gaussian closed forms at photon number `n_photons`.
///
/// Requires `u0 != 0` and `n_photons > 0` so that the lattice width is
/// defined.
pub fn gaussian_coefficients<T: Real>(
    n_photons: T,
    params: &SystemParams<T>,
) -> Result<LatticeCoefficients<T>> {
    if params.u0 == T::zero() {
        return Err(Error::NoLattice("u0 = 0".into()));
    }
    if !(n_photons > T::zero()) || !n_photons.is_finite() {
        return Err(Error::NoLattice(format!(
            "photon number must be > 0, got {n_photons}"
        )));
    }
    let y = y_from_photons(n_photons, params.u0);
    Ok(coefficients_at_width(y, n_photons, params.s))
}

/// Couplings extended continuously to non-positive photon arguments.
///
/// For `n_photons <= 0` the lattice depth vanishes and the atoms delocalize;
/// the closed forms limit to `E = E1 = J1 = 0` and `J = 1/2` (the average of
/// `cos²` over a uniform density). The field dynamics evaluates couplings at
/// `n̄ - 1` and `n̄ - 2` and needs this extension near the domain floor.
pub fn coefficients_or_delocalized<T: Real>(
    n_photons: T,
    params: &SystemParams<T>,
) -> LatticeCoefficients<T> {
    if params.u0 != T::zero() && n_photons > T::zero() {
        let y = y_from_photons(n_photons, params.u0);
        coefficients_at_width(y, n_photons, params.s)
    } else {
        LatticeCoefficients {
            y: T::infinity(),
            e_onsite: T::zero(),
            j_onsite: lit(0.5),
            e_hop: T::zero(),
            j_hop: T::zero(),
            d_e: T::zero(),
            d_j: T::zero(),
            d_e_hop: T::zero(),
            d_j_hop: T::zero(),
        }
    }
}

/// Maximum symmetric relative deviation between the analytic photon-number
/// derivatives and central finite differences of the closed forms.
///
/// Self-test oracle for the chain-rule derivatives; `h` is the finite
/// difference step and must satisfy `0 < h < n_photons`.
pub fn coefficient_derivatives_check<T: Real>(
    n_photons: T,
    params: &SystemParams<T>,
    h: T,
) -> Result<T> {
    if !(h > T::zero()) || h >= n_photons {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must satisfy 0 < h < n̄, got h = {h}"
        )));
    }
    let c = gaussian_coefficients(n_photons, params)?;
    let plus = gaussian_coefficients(n_photons + h, params)?;
    let minus = gaussian_coefficients(n_photons - h, params)?;
    let two_h = lit::<T>(2.0) * h;

    let pairs = [
        (c.d_e, (plus.e_onsite - minus.e_onsite) / two_h),
        (c.d_j, (plus.j_onsite - minus.j_onsite) / two_h),
        (c.d_e_hop, (plus.e_hop - minus.e_hop) / two_h),
        (c.d_j_hop, (plus.j_hop - minus.j_hop) / two_h),
    ];
    let floor = T::min_positive_value();
    let mut worst = T::zero();
    for (analytic, fd) in pairs {
        let rel = (analytic - fd).abs() / (analytic.abs() + fd.abs() + floor);
        if rel > worst {
            worst = rel;
        }
    }
    Ok(worst)
}

/// Suppression of the `ℓ`-th-neighbour coupling relative to the nearest
/// neighbour: `|J_ℓ/J_1| = exp[-(ℓ²-1)π²/(4y)]`.
///
/// Diagnostic justifying the nearest-neighbour truncation.
pub fn neighbour_suppression<T: Real>(ell: u32, y: T) -> T {
    let l = count::<T>(ell as usize);
    let pi2 = T::PI() * T::PI();
    (-(l * l - T::one()) * pi2 / (lit::<T>(4.0) * y)).exp()
}
