//! Momentum branch, transfer and scattering matrices, reflection and
//! transmission amplitudes, and the anti-bound pole ladder with its
//! admissibility filter.
//!
//! The transmitted momentum k'(k) = sqrt(k^2 - V0) is fixed on the physical
//! sheet by the factorization sqrt(k + lambda/a) sqrt(k - lambda/a) with
//! principal square roots, which places the branch cut on the real segment
//! between the branch points +-lambda/a. All matrix entries are ratios of
//! Gamma functions evaluated in log space.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::PotentialParams;
use crate::specfun::gamma_ratio;

/// Incident momentum k and transmitted momentum k' on the physical branch.
#[derive(Debug, Clone, Copy)]
pub struct MomentumPair {
    pub k: Complex64,
    pub kprime: Complex64,
}

/// k'(k) via the principal-branch factorization. Continuous everywhere off
/// the cut joining k = -lambda/a and k = +lambda/a; for real k above
/// threshold k' is real positive, below threshold k' = +i sqrt(V0 - k^2).
pub fn momentum_pair(k: Complex64, p: &PotentialParams) -> Result<MomentumPair> {
    let b = p.lambda() / p.alpha();
    let fp = k + b;
    let fm = k - b;
    if fp.norm() < 1e-250 || fm.norm() < 1e-250 {
        return Err(Error::BranchPoint(k));
    }
    Ok(MomentumPair {
        k,
        kprime: fp.sqrt() * fm.sqrt(),
    })
}

/// 2x2 transfer matrix mapping left-asymptotic amplitudes (A, B) to
/// right-asymptotic ones (C, D).
#[derive(Debug, Clone, Copy)]
pub struct TransferMatrix {
    pub t11: Complex64,
    pub t12: Complex64,
    pub t21: Complex64,
    pub t22: Complex64,
}

impl TransferMatrix {
    pub fn det(&self) -> Complex64 {
        self.t11 * self.t22 - self.t12 * self.t21
    }
}

/// 2x2 scattering matrix mapping incoming amplitudes (A, D) to outgoing
/// ones (B, C).
#[derive(Debug, Clone, Copy)]
pub struct ScatterMatrix {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
}

/// Reflection/transmission amplitudes and coefficients at one real momentum.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeRecord {
    pub k: f64,
    pub r: Complex64,
    pub t: Complex64,
    /// R = |r|^2
    pub reflection: f64,
    /// T = |t|^2
    pub transmission: f64,
    /// principal-value phase of r
    pub delta_r: f64,
    /// principal-value phase of t
    pub delta_t: f64,
    /// true below threshold, where t is the evanescent amplitude and carries
    /// no current
    pub evanescent: bool,
}

/// One anti-bound pole of the scattering matrix.
#[derive(Debug, Clone, Copy)]
pub struct AntiboundPole {
    pub n: u32,
    pub k: Complex64,
    pub kprime: Complex64,
    /// E = k^2 < 0
    pub energy: f64,
}

/// Admissibility verdict for a candidate pole index, with the numerically
/// evaluated certificate -i a (k(n) + k'(n)): equal to -n for true poles and
/// strictly positive real for rejected indices.
#[derive(Debug, Clone, Copy)]
pub struct AdmissibilityCertificate {
    pub n: u32,
    pub admissible: bool,
    pub certificate: Complex64,
}

fn mode(k: Complex64, p: &PotentialParams) -> Result<(Complex64, Complex64)> {
    let pair = momentum_pair(k, p)?;
    Ok((
        Complex64::i() * p.alpha() * pair.k,
        -Complex64::i() * p.alpha() * pair.kprime,
    ))
}

/// Transfer matrix in terms of Gamma-function ratios; det T = k/k'.
pub fn transfer_matrix(k: Complex64, p: &PotentialParams) -> Result<TransferMatrix> {
    let pair = momentum_pair(k, p)?;
    let (mu, nu) = mode(k, p)?;
    let one = Complex64::new(1.0, 0.0);
    let scale = pair.k / pair.kprime;

    let entry = |nums: &[Complex64], dens: &[Complex64], name: &'static str| {
        gamma_ratio(nums, dens).map_err(|e| match e {
            Error::GammaPole(z) => Error::TransferEntryPole { entry: name, argument: z },
            other => other,
        })
    };

    let t11 = entry(&[2.0 * mu, one - 2.0 * nu], &[mu - nu, one + mu - nu], "T11")?;
    let t12 = entry(&[-2.0 * mu, one - 2.0 * nu], &[-mu - nu, one - mu - nu], "T12")?;
    let t21 = entry(&[2.0 * mu, one + 2.0 * nu], &[mu + nu, one + mu + nu], "T21")?;
    let t22 = entry(&[-2.0 * mu, one + 2.0 * nu], &[nu - mu, one + nu - mu], "T22")?;

    Ok(TransferMatrix {
        t11: scale * t11,
        t12: -scale * t12,
        t21: -scale * t21,
        t22: scale * t22,
    })
}

/// Scattering matrix assembled from the transfer matrix,
/// S = (1/T22) [[-T21, 1], [det T, T12]].
pub fn scatter_matrix(k: Complex64, p: &PotentialParams) -> Result<ScatterMatrix> {
    let t = transfer_matrix(k, p)?;
    if t.t22.norm() < 1e-12 {
        return Err(Error::ScatteringPole(t.t22.norm()));
    }
    Ok(ScatterMatrix {
        s11: -t.t21 / t.t22,
        s12: 1.0 / t.t22,
        s21: t.det() / t.t22,
        s22: t.t12 / t.t22,
    })
}

/// Closed-form reflection and transmission amplitudes at real k > 0.
///
/// Below threshold the transmitted wave is evanescent: |r| = 1 and t is
/// reported with the `evanescent` flag set. A neighbourhood of 1e-9 around
/// the threshold k = sqrt(V0) is excluded.
pub fn amplitudes(k: f64, p: &PotentialParams) -> Result<AmplitudeRecord> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveMomentum(k));
    }
    let threshold = p.threshold();
    if (k - threshold).abs() < 1e-9 {
        return Err(Error::AtThreshold { k, threshold });
    }
    let kc = Complex64::new(k, 0.0);
    let (mu, nu) = mode(kc, p)?;
    let one = Complex64::new(1.0, 0.0);
    let r = gamma_ratio(
        &[2.0 * mu, nu - mu, one + nu - mu],
        &[-2.0 * mu, mu + nu, one + mu + nu],
    )?;
    let t = gamma_ratio(&[nu - mu, one + nu - mu], &[-2.0 * mu, one + 2.0 * nu])?;
    Ok(AmplitudeRecord {
        k,
        r,
        t,
        reflection: r.norm_sqr(),
        transmission: t.norm_sqr(),
        delta_r: r.arg(),
        delta_t: t.arg(),
        evanescent: k < threshold,
    })
}

/// Analytic pole momenta k(n) = -(i/2a)(n - lambda^2/n) and
/// k'(n) = -(i/2a)(n + lambda^2/n), valid as a pole only when n > lambda.
pub fn pole_momenta(n: u32, p: &PotentialParams) -> (Complex64, Complex64) {
    let lam2 = p.lambda() * p.lambda();
    let nf = n as f64;
    let half = 0.5 / p.alpha();
    (
        Complex64::new(0.0, -half * (nf - lam2 / nf)),
        Complex64::new(0.0, -half * (nf + lam2 / nf)),
    )
}

/// All admissible anti-bound poles with index n in 1..=n_max (strictly
/// n > lambda; rejected indices are regular points, not poles).
pub fn antibound_poles(p: &PotentialParams, n_max: u32) -> Vec<AntiboundPole> {
    let lambda = p.lambda();
    (1..=n_max)
        .filter(|&n| (n as f64) > lambda)
        .map(|n| {
            let (k, kprime) = pole_momenta(n, p);
            AntiboundPole {
                n,
                k,
                kprime,
                energy: -(k.im * k.im),
            }
        })
        .collect()
}

/// Evaluates the pole condition -i a (k(n) + k'(n)) numerically through the
/// physical branch of k'. For admissible n it equals -n; for rejected n it is
/// strictly positive real, which is incompatible with the pole condition.
pub fn pole_admissibility_check(n: u32, p: &PotentialParams) -> AdmissibilityCertificate {
    let lambda = p.lambda();
    let lam2 = lambda * lambda;
    let nf = n as f64;
    // Formal candidate from the pole formula: on the upper axis when
    // n < lambda, at the origin when n = lambda.
    let k = Complex64::new(0.0, -0.5 / p.alpha() * (nf - lam2 / nf));
    let certificate = match momentum_pair(k, p) {
        Ok(pair) => -Complex64::i() * p.alpha() * (pair.k + pair.kprime),
        // n = lambda puts k at the origin between the branch points; the
        // condition value there is +lambda
        Err(_) => Complex64::new(lambda, 0.0),
    };
    AdmissibilityCertificate {
        n,
        admissible: nf > lambda,
        certificate,
    }
}

/// 1/t(k) on the physical sheet: zero exactly at the anti-bound poles, used
/// by the winding-number probes.
pub fn inverse_transmission(k: Complex64, p: &PotentialParams) -> Result<Complex64> {
    let (mu, nu) = mode(k, p)?;
    let one = Complex64::new(1.0, 0.0);
    gamma_ratio(&[-2.0 * mu, one + 2.0 * nu], &[nu - mu, one + nu - mu])
}

/// Winding number of a closed contour of nonzero complex values, from the
/// accumulated principal argument increments. Errors if adjacent samples jump
/// by 2.5 rad or more (contour too coarse) or if the total is not close to an
/// integer multiple of 2 pi.
pub fn winding_number(values: &[Complex64]) -> Result<i32> {
    let mut total = 0.0;
    for w in values.windows(2) {
        let d = (w[1] / w[0]).arg();
        if !d.is_finite() || d.abs() >= 2.5 {
            return Err(Error::WindingUnresolved);
        }
        total += d;
    }
    let closing = (values[0] / values[values.len() - 1]).arg();
    if closing.abs() >= 2.5 {
        return Err(Error::WindingUnresolved);
    }
    total += closing;
    let w = total / (2.0 * std::f64::consts::PI);
    let rounded = w.round();
    if (w - rounded).abs() > 1e-6 {
        return Err(Error::WindingUnresolved);
    }
    Ok(rounded as i32)
}

/// Winding number of 1/t around a circle, refining the sampling until the
/// argument increments resolve.
pub fn pole_winding_probe(
    center: Complex64,
    radius: f64,
    p: &PotentialParams,
) -> Result<i32> {
    let mut n = 256;
    loop {
        let vals: Result<Vec<Complex64>> = (0..n)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                inverse_transmission(center + radius * Complex64::new(th.cos(), th.sin()), p)
            })
            .collect();
        match winding_number(&vals?) {
            Ok(w) => return Ok(w),
            Err(Error::WindingUnresolved) if n < 65536 => n *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// Winding number of 1/t around an axis-aligned rectangle
/// [re0, re1] x [im0, im1], sampled counterclockwise.
pub fn rectangle_winding_probe(
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
    points_per_unit: usize,
    p: &PotentialParams,
) -> Result<i32> {
    let mut scale = 1usize;
    loop {
        let mut pts = Vec::new();
        let mut edge = |a: Complex64, b: Complex64| {
            let n = (((b - a).norm() * (points_per_unit * scale) as f64).ceil() as usize).max(8);
            for i in 0..n {
                pts.push(a + (b - a) * (i as f64 / n as f64));
            }
        };
        let c1 = Complex64::new(re0, im0);
        let c2 = Complex64::new(re1, im0);
        let c3 = Complex64::new(re1, im1);
        let c4 = Complex64::new(re0, im1);
        edge(c1, c2);
        edge(c2, c3);
        edge(c3, c4);
        edge(c4, c1);
        let vals: Result<Vec<Complex64>> =
            pts.into_iter().map(|z| inverse_transmission(z, p)).collect();
        match winding_number(&vals?) {
            Ok(w) => return Ok(w),
            Err(Error::WindingUnresolved) if scale < 64 => scale *= 2,
            Err(e) => return Err(e),
        }
    }
}
