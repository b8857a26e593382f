//! Phase extraction and unwrapping, Wigner time delays tau = (1/k) d delta/dk
//! for the base potential and its SUSY partners, the analytic SUSY delay
//! shifts, and classical reflection/transmission delays.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{potential, potential_gap, PotentialParams};
use crate::scattering::{amplitudes, momentum_pair};
use crate::specfun::digamma;
use crate::susy::{superpotential_asymptotes, susy_amplitude_factors};

/// Half-width of the momentum window around threshold inside which Wigner
/// delays are flagged as singular rather than reported.
pub const THRESHOLD_WINDOW: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeKind {
    Reflection,
    Transmission,
}

/// Continuously unwrapped phase of r or t over an ascending momentum grid.
#[derive(Debug, Clone)]
pub struct PhaseCurve {
    pub kind: AmplitudeKind,
    pub chain_order: u32,
    pub k: Vec<f64>,
    pub delta: Vec<f64>,
}

/// Wigner delay curve over the same grid.
#[derive(Debug, Clone)]
pub struct DelayCurve {
    pub kind: AmplitudeKind,
    pub chain_order: u32,
    pub k: Vec<f64>,
    pub tau: Vec<f64>,
}

fn principal_phase(kind: AmplitudeKind, chain_order: u32, k: f64, p: &PotentialParams) -> Result<f64> {
    let base = amplitudes(k, p)?;
    let mut amp = match kind {
        AmplitudeKind::Reflection => base.r,
        AmplitudeKind::Transmission => base.t,
    };
    for n in 1..=chain_order {
        let (fr, ft) = susy_amplitude_factors(k, n, p)?;
        amp *= match kind {
            AmplitudeKind::Reflection => fr,
            AmplitudeKind::Transmission => ft,
        };
    }
    Ok(amp.arg())
}

/// Sum of the principal factor arguments at one momentum (the analytic phase
/// shift of the order-n chain relative to the base potential).
pub fn chain_phase_shift(kind: AmplitudeKind, chain_order: u32, k: f64, p: &PotentialParams) -> Result<f64> {
    let mut shift = 0.0;
    for n in 1..=chain_order {
        let (fr, ft) = susy_amplitude_factors(k, n, p)?;
        shift += match kind {
            AmplitudeKind::Reflection => fr.arg(),
            AmplitudeKind::Transmission => ft.arg(),
        };
    }
    Ok(shift)
}

/// Unwrapped phase curve, anchored at the largest grid momentum: the base
/// curve to its principal value there, partner curves to the base anchor plus
/// the analytic factor arguments (so partner minus base equals the factor
/// phases pointwise, with no 2 pi offset).
pub fn phase_curve(
    kind: AmplitudeKind,
    chain_order: u32,
    k_grid: &[f64],
    p: &PotentialParams,
) -> Result<PhaseCurve> {
    if k_grid.len() < 2 {
        return Err(Error::InvalidGrid("phase grid needs at least two points"));
    }
    let threshold = p.threshold();
    let mut prev = 0.0;
    for (i, &k) in k_grid.iter().enumerate() {
        if !(k > 0.0) {
            return Err(Error::NonPositiveMomentum(k));
        }
        if (k - threshold).abs() < 1e-6 {
            return Err(Error::AtThreshold { k, threshold });
        }
        if i > 0 && k <= prev {
            return Err(Error::InvalidGrid("phase grid must be strictly ascending"));
        }
        if kind == AmplitudeKind::Transmission && k < threshold {
            return Err(Error::EnergyDomain {
                energy: k * k,
                expected: "transmission phases require k > sqrt(V0)",
            });
        }
        prev = k;
    }

    use rayon::prelude::*;
    let raw: Result<Vec<f64>> = k_grid
        .par_iter()
        .map(|&k| principal_phase(kind, chain_order, k, p))
        .collect();
    let raw = raw?;

    // sequential unwrap pass
    let mut delta = Vec::with_capacity(raw.len());
    delta.push(raw[0]);
    for i in 1..raw.len() {
        let mut step = raw[i] - raw[i - 1];
        step -= (step / (2.0 * std::f64::consts::PI)).round() * 2.0 * std::f64::consts::PI;
        if step.abs() >= 0.9 * std::f64::consts::PI {
            return Err(Error::UnwrapAmbiguity { k: k_grid[i], jump: step.abs() });
        }
        delta.push(delta[i - 1] + step);
    }

    // anchor at k_max
    let kmax = *k_grid.last().unwrap();
    let base_anchor = principal_phase(kind, 0, kmax, p)?;
    let anchor = base_anchor + chain_phase_shift(kind, chain_order, kmax, p)?;
    let last = *delta.last().unwrap();
    let m = ((last - anchor) / (2.0 * std::f64::consts::PI)).round();
    for d in &mut delta {
        *d -= m * 2.0 * std::f64::consts::PI;
    }

    Ok(PhaseCurve {
        kind,
        chain_order,
        k: k_grid.to_vec(),
        delta,
    })
}

/// Total phase variation delta(k -> infinity) - delta(k_min), estimating the
/// high-energy limit by a least-squares fit of delta(k) to
/// d_inf + a/k + b ln(k)/k over the top of the grid (the phase approaches its
/// limit like ln(k)/k, so the raw grid endpoint alone under-resolves the
/// total by ~(V0 alpha/k_max) ln k_max).
pub fn levinson_total(curve: &PhaseCurve) -> f64 {
    let kmax = *curve.k.last().unwrap();
    let cut = 0.25 * kmax;
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (&k, &d) in curve.k.iter().zip(curve.delta.iter()) {
        if k < cut {
            continue;
        }
        let row = [1.0, 1.0 / k, k.ln() / k];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * d;
        }
    }
    let dinf = solve3(&mut ata, &mut atb);
    dinf - curve.delta[0]
}

/// Raw grid-endpoint variation delta(k_max) - delta(k_min).
pub fn grid_total_variation(curve: &PhaseCurve) -> f64 {
    curve.delta.last().unwrap() - curve.delta[0]
}

fn solve3(a: &mut [[f64; 3]; 3], b: &mut [f64; 3]) -> f64 {
    // Gaussian elimination with partial pivoting; returns x[0]
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for c in col..3 {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let x2 = b[2] / a[2][2];
    let x1 = (b[1] - a[1][2] * x2) / a[1][1];
    (b[0] - a[0][1] * x1 - a[0][2] * x2) / a[0][0]
}

/// Analytic Wigner delay via the digamma derivatives of the Gamma phases and
/// dk'/dk = k/k', plus the closed-form SUSY shifts for chain_order >= 1.
pub fn wigner_delay_analytic(
    kind: AmplitudeKind,
    chain_order: u32,
    k: f64,
    p: &PotentialParams,
) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveMomentum(k));
    }
    let threshold = p.threshold();
    if (k - threshold).abs() < 1e-9 {
        return Err(Error::AtThreshold { k, threshold });
    }
    if kind == AmplitudeKind::Transmission && k < threshold {
        return Err(Error::EnergyDomain {
            energy: k * k,
            expected: "transmission delay requires k > sqrt(V0)",
        });
    }
    let kc = Complex64::new(k, 0.0);
    let pair = momentum_pair(kc, p)?;
    let alpha = p.alpha();
    let i = Complex64::i();
    let mu = i * alpha * kc;
    let nu = -i * alpha * pair.kprime;
    let dmu = i * alpha;
    let dnu = -i * alpha * kc / pair.kprime;
    let one = Complex64::new(1.0, 0.0);

    let dlog = match kind {
        AmplitudeKind::Reflection => {
            2.0 * dmu * digamma(2.0 * mu)?
                + (dnu - dmu) * (digamma(nu - mu)? + digamma(one + nu - mu)?)
                + 2.0 * dmu * digamma(-2.0 * mu)?
                - (dmu + dnu) * (digamma(mu + nu)? + digamma(one + mu + nu)?)
        }
        AmplitudeKind::Transmission => {
            (dnu - dmu) * (digamma(nu - mu)? + digamma(one + nu - mu)?)
                + 2.0 * dmu * digamma(-2.0 * mu)?
                - 2.0 * dnu * digamma(one + 2.0 * nu)?
        }
    };
    let mut tau = dlog.im / k;
    for n in 1..=chain_order {
        tau += match kind {
            AmplitudeKind::Reflection => reflection_delay_shift(n, k, p)?,
            AmplitudeKind::Transmission => transmission_delay_shift(n, k, p)?,
        };
    }
    Ok(tau)
}

/// Wigner delay curve on the grid of an unwrapped phase curve (analytic
/// route).
pub fn wigner_delay(curve: &PhaseCurve, p: &PotentialParams) -> Result<DelayCurve> {
    let tau: Result<Vec<f64>> = curve
        .k
        .iter()
        .map(|&k| wigner_delay_analytic(curve.kind, curve.chain_order, k, p))
        .collect();
    Ok(DelayCurve {
        kind: curve.kind,
        chain_order: curve.chain_order,
        k: curve.k.clone(),
        tau: tau?,
    })
}

/// Wigner delay by centered finite differences on the unwrapped curve (the
/// second route; ends use one-sided differences).
pub fn wigner_delay_finite_difference(curve: &PhaseCurve) -> DelayCurve {
    let n = curve.k.len();
    let mut tau = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, hi) = if i == 0 {
            (0, 1)
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        let d = (curve.delta[hi] - curve.delta[lo]) / (curve.k[hi] - curve.k[lo]);
        tau.push(d / curve.k[i]);
    }
    DelayCurve {
        kind: curve.kind,
        chain_order: curve.chain_order,
        k: curve.k.clone(),
        tau,
    }
}

/// True inside the singular threshold window where the delay is flagged
/// rather than reported.
pub fn in_threshold_window(k: f64, p: &PotentialParams) -> bool {
    (k - p.threshold()).abs() < THRESHOLD_WINDOW
}

/// (Delta tau)_r of seed n: -2 W- / (k^3 + k W-^2).
pub fn reflection_delay_shift(n: u32, k: f64, p: &PotentialParams) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveMomentum(k));
    }
    let lambda = p.lambda();
    if (n as f64) <= lambda {
        return Err(Error::InadmissibleIndex { n, lambda });
    }
    let (w_minus, _) = superpotential_asymptotes(n, p);
    Ok(-2.0 * w_minus / (k * k * k + k * w_minus * w_minus))
}

/// (Delta tau)_t of seed n:
/// -W-/(k^3 + k W-^2) + W+/(sqrt(k^2-V0) (k^2 + W+^2 - V0)); domain k > sqrt(V0).
pub fn transmission_delay_shift(n: u32, k: f64, p: &PotentialParams) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveMomentum(k));
    }
    if k <= p.threshold() {
        return Err(Error::EnergyDomain {
            energy: k * k,
            expected: "transmission delay shift requires k > sqrt(V0)",
        });
    }
    let lambda = p.lambda();
    if (n as f64) <= lambda {
        return Err(Error::InadmissibleIndex { n, lambda });
    }
    let (w_minus, w_plus) = superpotential_asymptotes(n, p);
    let kp = (k * k - p.v0()).sqrt();
    Ok(-w_minus / (k * k * k + k * w_minus * w_minus)
        + w_plus / (kp * (k * k + w_plus * w_plus - p.v0())))
}

/// Classical turning point x with V(x) = E, for 0 < E < V0.
pub fn classical_turning_point(e: f64, p: &PotentialParams) -> Result<f64> {
    if !(e > 0.0 && e < p.v0()) {
        return Err(Error::EnergyDomain { energy: e, expected: "0 < E < V0" });
    }
    Ok(2.0 * p.alpha() * (2.0 * e / p.v0() - 1.0).atanh())
}

// ---- classical traversal times ----
//
// speed v(x) = 2 sqrt(E - V(x)) in the hbar^2/(2m) = 1 units, so
// T(a -> b) = int dx / (2 sqrt(E - V)).

/// Adaptive Simpson quadrature.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simp(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        if depth > 50 {
            return Err(Error::QuadratureFailure("recursion depth exceeded"));
        }
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simp(fa, flm, fm, a, m);
        let right = simp(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    if !fa.is_finite() || !fb.is_finite() || !fm.is_finite() {
        return Err(Error::QuadratureFailure("integrand not finite"));
    }
    rec(f, a, b, fa, fm, fb, simp(fa, fm, fb, a, b), tol, 0)
}

/// Classical traversal time by adaptive quadrature. When b reaches the
/// turning point the inverse-square-root endpoint singularity is removed by
/// the substitution x = x_turn - s^2, with E - V(x_turn - s^2) evaluated in
/// the cancellation-free form V0 a expm1(w) / ((1+a)(1+a e^w)).
pub fn classical_traversal_time(a: f64, b: f64, e: f64, p: &PotentialParams) -> Result<f64> {
    if b < a {
        return Err(Error::InvalidGrid("traversal interval must have a <= b"));
    }
    if e <= 0.0 {
        return Err(Error::EnergyDomain { energy: e, expected: "E > 0" });
    }
    let v0 = p.v0();
    if e < v0 {
        let xt = classical_turning_point(e, p)?;
        if b > xt + 1e-9 {
            return Err(Error::ClassicallyForbidden { a, b, energy: e });
        }
        if b >= xt - 1e-9 {
            // substituted integral over the full interval
            let alpha = p.alpha();
            let aa = (-xt / alpha).exp();
            let emv = move |s: f64| -> f64 {
                let w = s * s / alpha;
                if w > 30.0 {
                    v0 * aa * (1.0 - (-w).exp()) / ((1.0 + aa) * ((-w).exp() + aa))
                } else {
                    v0 * aa * w.exp_m1() / ((1.0 + aa) * (1.0 + aa * w.exp()))
                }
            };
            let g0 = (alpha * (1.0 + aa) * (1.0 + aa) / (v0 * aa)).sqrt();
            let g = move |s: f64| if s == 0.0 { g0 } else { s / emv(s).sqrt() };
            let smax = (xt - a).sqrt();
            return adaptive_simpson(&g, 0.0, smax, 1e-12);
        }
    }
    let f = |x: f64| 0.5 / (e - potential(x, p)).sqrt();
    adaptive_simpson(&f, a, b, 1e-12)
}

/// Closed-form primitive route for the traversal time, from
/// F(x) = -alpha [ artanh(u/sqrt(E))/sqrt(E) + J(u) ], u = sqrt(E - V(x)),
/// with J = arctan(u/c)/c for E < V0 (c = sqrt(V0-E)),
/// J = -artanh(c/u)/c for E > V0 (c = sqrt(E-V0)), and J = -1/u at E = V0.
/// Both inverse-tanh terms are evaluated through the stable logistic tails
/// of the potential.
pub fn classical_traversal_time_primitive(
    a: f64,
    b: f64,
    e: f64,
    p: &PotentialParams,
) -> Result<f64> {
    if b < a {
        return Err(Error::InvalidGrid("traversal interval must have a <= b"));
    }
    if e <= 0.0 {
        return Err(Error::EnergyDomain { energy: e, expected: "E > 0" });
    }
    if e < p.v0() {
        let xt = classical_turning_point(e, p)?;
        if b > xt + 1e-9 {
            return Err(Error::ClassicallyForbidden { a, b, energy: e });
        }
    }
    Ok(primitive(b.min(classical_bound(e, p)), e, p) - primitive(a, e, p))
}

fn classical_bound(e: f64, p: &PotentialParams) -> f64 {
    if e < p.v0() {
        classical_turning_point(e, p).unwrap()
    } else {
        f64::INFINITY
    }
}

fn primitive(x: f64, e: f64, p: &PotentialParams) -> f64 {
    let v0 = p.v0();
    let v = potential(x, p);
    let u = (e - v).max(0.0).sqrt();
    let se = e.sqrt();
    // artanh(u/se)/se = ln((se+u)^2 / V(x)) / (2 se), since E - u^2 = V
    let f1 = 0.5 * ((se + u) * (se + u) / v).ln() / se;
    let c2 = v0 - e;
    let f2 = if c2 > 0.0 {
        let c = c2.sqrt();
        (u / c).atan() / c
    } else if c2 < 0.0 {
        // -artanh(c/u)/c with u - c = (V0 - V)/(u + c)
        let c = (-c2).sqrt();
        -0.5 * ((u + c) * (u + c) / potential_gap(x, p)).ln() / c
    } else {
        -1.0 / u
    };
    -p.alpha() * (f1 + f2)
}

/// Classical time delay at one energy relative to free motion from distance d.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalDelayResult {
    pub energy: f64,
    pub distance: f64,
    pub kind: AmplitudeKind,
    pub tau: f64,
    /// d-doubling stability reached (|tau(2d) - tau(d)| < 1e-6)
    pub converged: bool,
}

/// Reflection delay (E < V0): 2 T(-d -> x_turn) - d/k;
/// transmission delay (E > V0): T(-d -> d) - d/(2 sqrt(k^2-V0)) - d/(2k).
pub fn classical_delays(e: f64, d: f64, p: &PotentialParams) -> Result<ClassicalDelayResult> {
    if !(d > 0.0) || potential(-d, p) > 1e-12 * p.v0() {
        return Err(Error::InvalidGrid(
            "distance d must satisfy V(-d) < 1e-12 V0",
        ));
    }
    let v0 = p.v0();
    if e <= 0.0 || e == v0 {
        return Err(Error::EnergyDomain {
            energy: e,
            expected: "0 < E < V0 (reflection) or E > V0 (transmission)",
        });
    }
    let tau_at = |dd: f64| -> Result<f64> {
        let k = e.sqrt();
        if e < v0 {
            let xt = classical_turning_point(e, p)?;
            Ok(2.0 * classical_traversal_time(-dd, xt, e, p)? - dd / k)
        } else {
            let kp = (e - v0).sqrt();
            Ok(classical_traversal_time(-dd, dd, e, p)? - 0.5 * dd / kp - 0.5 * dd / k)
        }
    };
    let tau = tau_at(d)?;
    let tau2 = tau_at(2.0 * d)?;
    Ok(ClassicalDelayResult {
        energy: e,
        distance: d,
        kind: if e < v0 {
            AmplitudeKind::Reflection
        } else {
            AmplitudeKind::Transmission
        },
        tau,
        converged: (tau2 - tau).abs() < 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> PotentialParams {
        PotentialParams::new(0.5, 1.0).unwrap()
    }

    fn dense_grid(kmin: f64, kmax: f64, p: &PotentialParams) -> Vec<f64> {
        // fine spacing through the low-k and threshold region, coarser tail
        let mut g = Vec::new();
        let mut k = kmin;
        while k <= 2.0_f64.min(kmax) {
            if (k - p.threshold()).abs() > 1e-6 {
                g.push(k);
            }
            k += 5e-4;
        }
        while k <= kmax {
            g.push(k);
            k += 0.01;
        }
        g
    }

    #[test]
    fn phase_curve_unwraps_continuously() {
        let p = params();
        let grid = dense_grid(1e-3, 8.0, &p);
        for order in 0..=2u32 {
            let curve = phase_curve(AmplitudeKind::Reflection, order, &grid, &p).unwrap();
            for w in curve.delta.windows(2) {
                assert!((w[1] - w[0]).abs() < std::f64::consts::PI);
            }
            // anchored to the principal value (plus factor arguments) at k_max
            let anchor = principal_phase(AmplitudeKind::Reflection, order, *grid.last().unwrap(), &p)
                .unwrap();
            let diff = curve.delta.last().unwrap() - anchor;
            let wraps = diff / (2.0 * std::f64::consts::PI);
            assert!((wraps - wraps.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn partner_minus_base_matches_factor_phases() {
        let p = params();
        let grid = dense_grid(0.01, 6.0, &p);
        let base = phase_curve(AmplitudeKind::Reflection, 0, &grid, &p).unwrap();
        let partner = phase_curve(AmplitudeKind::Reflection, 1, &grid, &p).unwrap();
        let (w_minus, _) = superpotential_asymptotes(1, &p);
        for i in 0..grid.len() {
            let shift = partner.delta[i] - base.delta[i];
            let expected = -2.0 * (grid[i] / w_minus).atan();
            assert!(
                (shift - expected).abs() < 1e-8,
                "k={}: shift {shift} vs {expected}",
                grid[i]
            );
        }
    }

    #[test]
    fn unwrap_total_stable_under_grid_refinement() {
        let p = params();
        let coarse: Vec<f64> = (0..4000)
            .map(|i| 0.01 + 6.0 * i as f64 / 4000.0)
            .filter(|k| (k - p.threshold()).abs() > 1e-6)
            .collect();
        let fine: Vec<f64> = (0..8000)
            .map(|i| 0.01 + 6.0 * i as f64 / 8000.0)
            .filter(|k| (k - p.threshold()).abs() > 1e-6)
            .collect();
        let c1 = phase_curve(AmplitudeKind::Reflection, 0, &coarse, &p).unwrap();
        let c2 = phase_curve(AmplitudeKind::Reflection, 0, &fine, &p).unwrap();
        let t1 = grid_total_variation(&c1);
        let t2 = c2.delta[c2.delta.len() - 2] - c2.delta[0];
        assert!((t1 - t2).abs() < 1e-3, "{t1} vs {t2}");
    }

    #[test]
    fn phase_curve_grid_validation() {
        let p = params();
        assert!(matches!(
            phase_curve(AmplitudeKind::Reflection, 0, &[0.5], &p),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            phase_curve(AmplitudeKind::Reflection, 0, &[0.5, 0.4], &p),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            phase_curve(AmplitudeKind::Transmission, 0, &[0.3, 0.5], &p),
            Err(Error::EnergyDomain { .. })
        ));
        let th = p.threshold();
        assert!(matches!(
            phase_curve(AmplitudeKind::Reflection, 0, &[0.5, th + 1e-9], &p),
            Err(Error::AtThreshold { .. })
        ));
    }

    #[test]
    fn analytic_and_finite_difference_delays_agree() {
        let p = params();
        let th = p.threshold();
        for &k0 in &[0.3, 0.55, 0.9, 1.4, 2.8] {
            if (k0 - th).abs() < THRESHOLD_WINDOW {
                continue;
            }
            let h = 2e-4;
            let grid: Vec<f64> = (-2..=2).map(|i| k0 + h * i as f64).collect();
            let curve = phase_curve(AmplitudeKind::Reflection, 2, &grid, &p).unwrap();
            let fd = wigner_delay_finite_difference(&curve);
            let an = wigner_delay_analytic(AmplitudeKind::Reflection, 2, k0, &p).unwrap();
            assert!(
                (fd.tau[2] - an).abs() <= 1e-5 * an.abs().max(1e-2),
                "k={k0}: fd {} vs analytic {an}",
                fd.tau[2]
            );
        }
        for &k0 in &[0.85, 1.2, 2.5] {
            let h = 2e-4;
            let grid: Vec<f64> = (-2..=2).map(|i| k0 + h * i as f64).collect();
            let curve = phase_curve(AmplitudeKind::Transmission, 1, &grid, &p).unwrap();
            let fd = wigner_delay_finite_difference(&curve);
            let an = wigner_delay_analytic(AmplitudeKind::Transmission, 1, k0, &p).unwrap();
            assert!((fd.tau[2] - an).abs() <= 1e-5 * an.abs().max(1e-2), "k={k0}");
        }
    }

    #[test]
    fn transmission_delay_is_negative_and_ordered() {
        let p = params();
        for &k in &[0.78, 0.9, 1.2, 2.0, 4.0, 10.0] {
            let t0 = wigner_delay_analytic(AmplitudeKind::Transmission, 0, k, &p).unwrap();
            let t1 = wigner_delay_analytic(AmplitudeKind::Transmission, 1, k, &p).unwrap();
            let t2 = wigner_delay_analytic(AmplitudeKind::Transmission, 2, k, &p).unwrap();
            assert!(t0 < 0.0 && t1 < 0.0 && t2 < 0.0, "k={k}");
            assert!(t0 > t1 && t1 > t2, "k={k}: {t0} {t1} {t2}");
            let r0 = wigner_delay_analytic(AmplitudeKind::Reflection, 0, k, &p).unwrap();
            let r1 = wigner_delay_analytic(AmplitudeKind::Reflection, 1, k, &p).unwrap();
            let r2 = wigner_delay_analytic(AmplitudeKind::Reflection, 2, k, &p).unwrap();
            assert!(r0 > r1 && r1 > r2, "k={k}");
        }
    }

    #[test]
    fn delays_vanish_at_high_energy() {
        let p = params();
        for order in 0..=2u32 {
            for kind in [AmplitudeKind::Reflection, AmplitudeKind::Transmission] {
                let tau = wigner_delay_analytic(kind, order, 50.0, &p).unwrap();
                assert!(tau.abs() < 1e-3, "{kind:?} order {order}: {tau}");
            }
        }
    }

    #[test]
    fn reflection_delay_blows_up_at_threshold() {
        let p = params();
        let th = p.threshold();
        let t1 = wigner_delay_analytic(AmplitudeKind::Reflection, 0, th - 0.24, &p).unwrap();
        let t2 = wigner_delay_analytic(AmplitudeKind::Reflection, 0, th - 0.12, &p).unwrap();
        let t3 = wigner_delay_analytic(AmplitudeKind::Reflection, 0, th - 0.06, &p).unwrap();
        assert!(t3 > t2 && t2 > t1, "{t1} {t2} {t3}");
        assert!(t3 > 2.0 * t1);
        assert!(in_threshold_window(th - 0.03, &p));
        assert!(!in_threshold_window(th - 0.06, &p));
    }

    #[test]
    fn delay_shifts_match_finite_differences_of_factor_phases() {
        let p = params();
        let h = 1e-5;
        for n in [1u32, 2] {
            for i in 0..50 {
                let k = 0.2 + 0.08 * i as f64;
                let shift = reflection_delay_shift(n, k, &p).unwrap();
                let (fp, _) = susy_amplitude_factors(k + h, n, &p).unwrap();
                let (fm, _) = susy_amplitude_factors(k - h, n, &p).unwrap();
                let fd = (fp.arg() - fm.arg()) / (2.0 * h) / k;
                assert!((shift - fd).abs() < 1e-7, "n={n} k={k}: {shift} vs {fd}");
            }
            for i in 0..50 {
                let k = p.threshold() + 0.06 + 0.08 * i as f64;
                let shift = transmission_delay_shift(n, k, &p).unwrap();
                let (_, fp) = susy_amplitude_factors(k + h, n, &p).unwrap();
                let (_, fm) = susy_amplitude_factors(k - h, n, &p).unwrap();
                let fd = (fp.arg() - fm.arg()) / (2.0 * h) / k;
                assert!((shift - fd).abs() < 1e-7, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn delay_shift_closed_form_and_decay() {
        let p = params();
        // n=1, V0=1/2: (Delta tau)_r = -0.5/(k^3 + 0.0625 k)
        for k in [0.3, 1.0, 2.2] {
            let s = reflection_delay_shift(1, k, &p).unwrap();
            assert_relative_eq!(s, -0.5 / (k * k * k + 0.0625 * k), max_relative = 1e-13);
        }
        assert!(reflection_delay_shift(1, 100.0, &p).unwrap().abs() < 1e-4);
        assert!(transmission_delay_shift(1, 100.0, &p).unwrap().abs() < 1e-4);
        assert!(matches!(
            transmission_delay_shift(1, 0.3, &p),
            Err(Error::EnergyDomain { .. })
        ));
    }

    #[test]
    fn turning_point_roundtrip() {
        let p = PotentialParams::new(1.0, 1.0).unwrap();
        assert!(classical_turning_point(0.5, &p).unwrap().abs() < 1e-14);
        assert_relative_eq!(
            classical_turning_point(0.75, &p).unwrap(),
            2.0 * 0.5f64.atanh(),
            max_relative = 1e-14
        );
        for e in [0.1, 0.33, 0.62, 0.9, 0.99] {
            let xt = classical_turning_point(e, &p).unwrap();
            assert!((potential(xt, &p) - e).abs() < 1e-12);
        }
        assert!(classical_turning_point(1.5, &p).is_err());
        assert!(classical_turning_point(0.0, &p).is_err());
    }

    #[test]
    fn traversal_time_free_flight_limits() {
        let p = params();
        // far to the left the potential is negligible: T = (b-a)/(2 sqrt(E))
        let e = 0.8;
        let (a, b) = (-60.0, -40.0);
        let t = classical_traversal_time(a, b, e, &p).unwrap();
        assert_relative_eq!(t, (b - a) / (2.0 * e.sqrt()), max_relative = 1e-8);
        let tp = classical_traversal_time_primitive(a, b, e, &p).unwrap();
        assert_relative_eq!(tp, (b - a) / (2.0 * e.sqrt()), max_relative = 1e-8);
    }

    #[test]
    fn quadrature_and_primitive_routes_agree() {
        let p = params();
        let cases = [
            (-30.0, classical_turning_point(0.3, &p).unwrap(), 0.3),
            (-30.0, 30.0, 1.2),
            (-10.0, 2.0, 0.45),
            (-20.0, 20.0, 0.75),
        ];
        for (a, b, e) in cases {
            let q = classical_traversal_time(a, b, e, &p).unwrap();
            let f = classical_traversal_time_primitive(a, b, e, &p).unwrap();
            assert!((q - f).abs() < 1e-10 * f.abs().max(1.0), "({a},{b},{e}): {q} vs {f}");
        }
    }

    #[test]
    fn primitive_differentiates_back_to_integrand() {
        let p = params();
        let h = 1e-5;
        for (e, xs) in [
            (0.3, vec![-8.0, -2.0, -0.5]),
            (1.1, vec![-6.0, 0.0, 2.0, 7.0]),
        ] {
            for &x in &xs {
                let fp = primitive(x + h, e, &p);
                let fm = primitive(x - h, e, &p);
                let fd = (fp - fm) / (2.0 * h);
                let expected = 0.5 / (e - potential(x, &p)).sqrt();
                assert!(
                    (fd - expected).abs() <= 1e-9 * expected.max(1.0),
                    "E={e} x={x}: {fd} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn traversal_rejects_forbidden_regions() {
        let p = params();
        assert!(matches!(
            classical_traversal_time(-5.0, 10.0, 0.3, &p),
            Err(Error::ClassicallyForbidden { .. })
        ));
    }

    #[test]
    fn classical_delay_phenomenology() {
        let p = params();
        let d = 30.0;
        // reflection delay diverges toward E = V0
        let lo = classical_delays(0.9 * p.v0(), d, &p).unwrap();
        let hi = classical_delays(0.999 * p.v0(), d, &p).unwrap();
        assert_eq!(lo.kind, AmplitudeKind::Reflection);
        assert!(lo.converged && hi.converged);
        assert!(hi.tau > 10.0 * lo.tau, "{} vs {}", hi.tau, lo.tau);
        // transmission delay negative above threshold, vanishing at high E
        for e in [1.2 * p.v0(), 2.0 * p.v0(), 10.0 * p.v0()] {
            let res = classical_delays(e, d, &p).unwrap();
            assert_eq!(res.kind, AmplitudeKind::Transmission);
            assert!(res.tau < 0.0, "E={e}: {}", res.tau);
            assert!(res.converged);
        }
        let far = classical_delays(100.0 * p.v0(), d, &p).unwrap();
        assert!(far.tau.abs() < 1e-2);
        let lo_e = classical_delays(100.0 * p.v0() * 0.0001, d, &p).unwrap();
        assert!(lo_e.tau.abs().is_finite());
        // d too small
        assert!(classical_delays(0.3, 1.0, &p).is_err());
    }
}
