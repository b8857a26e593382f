//! The hyperbolic step potential, its exact hypergeometric wavefunction, the
//! left-asymptotic amplitude map, and the anti-bound wavefunctions.
//!
//! Units are fixed to hbar^2/(2m) = 1 library-wide, so the stationary
//! equation reads psi'' + [k^2 - V(x)] psi = 0 with lambda^2 = V0 alpha^2.
//! Wavefunction amplitudes C, D are the exact right-asymptotic coefficients
//! of C e^{ik'x} + D e^{-ik'x}; internal prefactors are normalized to make
//! that asymptotic exact.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scattering;
use crate::specfun::hyp2f1;

/// Barrier height and width of the hyperbolic step, with the derived
/// dimensionless strength lambda = alpha sqrt(V0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    v0: f64,
    alpha: f64,
}

impl PotentialParams {
    pub fn new(v0: f64, alpha: f64) -> Result<Self> {
        if !(v0 > 0.0) || !(alpha > 0.0) || !v0.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidParameters { v0, alpha });
        }
        Ok(Self { v0, alpha })
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.alpha * self.v0.sqrt()
    }

    /// Threshold momentum sqrt(V0) separating evanescent from propagating
    /// transmission.
    pub fn threshold(&self) -> f64 {
        self.v0.sqrt()
    }
}

/// V(x) = (V0/2)(1 + tanh(x/2a)), evaluated in the logistic form
/// V0/(1 + e^{-x/a}) with a sign-symmetric branch so that
/// V(x) + V(-x) = V0 to within one ulp.
pub fn potential(x: f64, p: &PotentialParams) -> f64 {
    if x < 0.0 {
        logistic_tail(-x, p)
    } else {
        p.v0 - logistic_tail(x, p)
    }
}

/// V0 - V(x), computed without cancellation (needed by the classical
/// turning-point machinery where V saturates).
pub fn potential_gap(x: f64, p: &PotentialParams) -> f64 {
    potential(-x, p)
}

fn logistic_tail(x: f64, p: &PotentialParams) -> f64 {
    // V0 / (1 + e^{x/a}) for x >= 0; decays to 0 without saturating until
    // e^{x/a} overflows
    p.v0 / (1.0 + (x / p.alpha).exp())
}

/// Mode parameters mu = i a k and nu = -i a k' entering the hypergeometric
/// solution basis.
#[derive(Debug, Clone, Copy)]
pub struct ModeParameters {
    pub mu: Complex64,
    pub nu: Complex64,
}

impl ModeParameters {
    pub fn new(k: Complex64, p: &PotentialParams) -> Result<Self> {
        let pair = scattering::momentum_pair(k, p)?;
        Ok(Self {
            mu: Complex64::i() * p.alpha * pair.k,
            nu: -Complex64::i() * p.alpha * pair.kprime,
        })
    }
}

/// Right- and left-asymptotic amplitudes of one solution.
#[derive(Debug, Clone, Copy)]
pub struct SolutionCoefficients {
    pub c: Complex64,
    pub d: Complex64,
    pub a: Complex64,
    pub b: Complex64,
}

/// y(x) = (1 + e^{x/a})^{-1} and log(y), log(1-y), all overflow-safe.
fn log_y_vars(x: f64, alpha: f64) -> (f64, f64, f64) {
    let t = x / alpha;
    if t >= 0.0 {
        let e = (-t).exp();
        let y = e / (1.0 + e);
        (y, -t - e.ln_1p(), -(e.ln_1p()))
    } else {
        let e = t.exp();
        let y = 1.0 / (1.0 + e);
        (y, -(e.ln_1p()), t - e.ln_1p())
    }
}

/// One Kummer basis solution
/// psi = y^nu (1-y)^mu 2F1(mu+nu, mu+nu+1; 1+2nu; y),
/// normalized so that psi -> e^{ik'x} exactly as x -> +infinity.
/// The companion solution is the same expression with nu -> -nu.
fn kummer_solution(x: f64, mu: Complex64, nu: Complex64, p: &PotentialParams) -> Result<Complex64> {
    let (y, ln_y, ln_1my) = log_y_vars(x, p.alpha);
    let prefactor = (nu * ln_y + mu * ln_1my).exp();
    let a = mu + nu;
    let f = hyp2f1(a, a + 1.0, 1.0 + 2.0 * nu, y)?;
    Ok(prefactor * f)
}

fn kummer_solution_with_derivative(
    x: f64,
    mu: Complex64,
    nu: Complex64,
    p: &PotentialParams,
) -> Result<(Complex64, Complex64)> {
    let (y, ln_y, ln_1my) = log_y_vars(x, p.alpha);
    let prefactor = (nu * ln_y + mu * ln_1my).exp();
    let a = mu + nu;
    let c = 1.0 + 2.0 * nu;
    let f = hyp2f1(a, a + 1.0, c, y)?;
    let fp = a * (a + 1.0) / c * hyp2f1(a + 1.0, a + 2.0, c + 1.0, y)?;
    let value = prefactor * f;
    // d/dx with dy/dx = -y(1-y)/a; the 1/y and 1/(1-y) factors cancel
    let deriv = (mu * y - nu * (1.0 - y)) / p.alpha * value
        - prefactor * fp * y * (1.0 - y) / p.alpha;
    Ok((value, deriv))
}

/// Exact solution psi(x) = C psi_+(x) + D psi_-(x) with right asymptotics
/// C e^{ik'x} + D e^{-ik'x}.
pub fn wavefunction(
    x: f64,
    k: Complex64,
    c: Complex64,
    d: Complex64,
    p: &PotentialParams,
) -> Result<Complex64> {
    let modes = ModeParameters::new(k, p)?;
    let up = kummer_solution(x, modes.mu, modes.nu, p)?;
    let dn = kummer_solution(x, modes.mu, -modes.nu, p)?;
    Ok(c * up + d * dn)
}

/// Wavefunction together with its x-derivative (closed-form, via the
/// contiguous derivative of 2F1).
pub fn wavefunction_and_derivative(
    x: f64,
    k: Complex64,
    c: Complex64,
    d: Complex64,
    p: &PotentialParams,
) -> Result<(Complex64, Complex64)> {
    let modes = ModeParameters::new(k, p)?;
    let (up, dup) = kummer_solution_with_derivative(x, modes.mu, modes.nu, p)?;
    let (dn, ddn) = kummer_solution_with_derivative(x, modes.mu, -modes.nu, p)?;
    Ok((c * up + d * dn, c * dup + d * ddn))
}

/// Left-asymptotic amplitudes (A, B) of the solution with right-asymptotic
/// amplitudes (C, D): psi -> A e^{ikx} + B e^{-ikx} as x -> -infinity.
pub fn asymptotic_left_coefficients(
    c: Complex64,
    d: Complex64,
    k: Complex64,
    p: &PotentialParams,
) -> Result<(Complex64, Complex64)> {
    let m = ModeParameters::new(k, p)?;
    let (mu, nu) = (m.mu, m.nu);
    let one = Complex64::new(1.0, 0.0);
    let a_c = crate::specfun::gamma_ratio(
        &[one + 2.0 * nu, -2.0 * mu],
        &[one + nu - mu, nu - mu],
    )?;
    let a_d = crate::specfun::gamma_ratio(
        &[one - 2.0 * nu, -2.0 * mu],
        &[one - nu - mu, -nu - mu],
    )?;
    let b_c = crate::specfun::gamma_ratio(
        &[one + 2.0 * nu, 2.0 * mu],
        &[mu + nu, mu + nu + one],
    )?;
    let b_d = crate::specfun::gamma_ratio(
        &[one - 2.0 * nu, 2.0 * mu],
        &[mu - nu, mu - nu + one],
    )?;
    Ok((c * a_c + d * a_d, c * b_c + d * b_d))
}

/// Anti-bound wavefunction for pole index n, evaluated through the
/// hypergeometric solution at the pole momenta and normalized so that the
/// value at x = 0 is exactly 1 (real and positive).
pub fn antibound_wavefunction(n: u32, x: f64, p: &PotentialParams) -> Result<Complex64> {
    let lambda = p.lambda();
    if (n as f64) <= lambda {
        return Err(Error::InadmissibleIndex { n, lambda });
    }
    let (mu, nu) = antibound_mode_parameters(n, p);
    let raw = kummer_solution(x, mu, nu, p)?;
    let at_zero = kummer_solution(0.0, mu, nu, p)?;
    Ok(raw / at_zero)
}

/// Real mode parameters at the n-th pole: mu = (n - lambda^2/n)/2,
/// nu = -(n + lambda^2/n)/2.
pub(crate) fn antibound_mode_parameters(n: u32, p: &PotentialParams) -> (Complex64, Complex64) {
    let lam2 = p.lambda() * p.lambda();
    let nf = n as f64;
    (
        Complex64::new(0.5 * (nf - lam2 / nf), 0.0),
        Complex64::new(-0.5 * (nf + lam2 / nf), 0.0),
    )
}
