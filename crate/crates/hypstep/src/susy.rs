//! Darboux (SUSY) partner hierarchy built from anti-bound seeds:
//! superpotentials, Wronskian partner potentials (the Rosen-Morse II
//! family), partner bound states, and partner scattering amplitudes.
//!
//! At the pole momenta the anti-bound wavefunctions reduce to
//! phi_n(x) = e^{-mu_n x/a} Q_n(e^{x/a}) with mu_n = (n - lambda^2/n)/2 and
//! Q_n a degree-n polynomial. All derivatives and Wronskians are therefore
//! evaluated exactly on a small exponential-polynomial algebra; no numeric
//! differentiation enters the construction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{potential, PotentialParams};
use crate::scattering::{self, momentum_pair};

const MAX_ORDER: u32 = 6;

/// f(x) = e^{s t} sum_j c_j e^{j t} with t = x/alpha. Closed under d/dt,
/// products, and same-exponent sums, which is all the Wronskian machinery
/// needs.
#[derive(Debug, Clone)]
pub(crate) struct ExpPoly {
    s: f64,
    coeffs: Vec<f64>,
}

impl ExpPoly {
    fn one() -> Self {
        Self { s: 0.0, coeffs: vec![1.0] }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// d/dt maps coefficient c_j to (s + j) c_j.
    fn derivative(&self) -> Self {
        Self {
            s: self.s,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| (self.s + j as f64) * c)
                .collect(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self { s: self.s + other.s, coeffs }
    }

    fn sub(&self, other: &Self) -> Self {
        debug_assert!((self.s - other.s).abs() < 1e-9 * (1.0 + self.s.abs()));
        let mut coeffs = vec![0.0; self.coeffs.len().max(other.coeffs.len())];
        for (i, a) in self.coeffs.iter().enumerate() {
            coeffs[i] += a;
        }
        for (i, b) in other.coeffs.iter().enumerate() {
            coeffs[i] -= b;
        }
        Self { s: self.s, coeffs }
    }

    fn scale(&self, f: f64) -> Self {
        Self {
            s: self.s,
            coeffs: self.coeffs.iter().map(|c| c * f).collect(),
        }
    }

    /// Sign of the polynomial part at t = x/alpha (the e^{st} prefactor never
    /// changes sign). Evaluated in e^{-|t|} so it is overflow-free.
    fn poly_sign(&self, t: f64) -> f64 {
        self.poly_part(t).signum()
    }

    fn poly_part(&self, t: f64) -> f64 {
        if t <= 0.0 {
            let u = t.exp();
            self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
        } else {
            let v = (-t).exp();
            self.coeffs.iter().fold(0.0, |acc, c| acc * v + c)
        }
    }
}

/// (f/g)(x) for two exponential polynomials, stable for large |t|: both
/// polynomial parts are evaluated in e^{-|t|} and the exponent difference is
/// applied once.
pub(crate) fn ratio_eval(num: &ExpPoly, den: &ExpPoly, t: f64) -> f64 {
    let pn = num.poly_part(t);
    let pd = den.poly_part(t);
    let mut exponent = (num.s - den.s) * t;
    if t > 0.0 {
        exponent += (num.degree() as f64 - den.degree() as f64) * t;
    }
    pn / pd * exponent.exp()
}

/// Anti-bound seed phi_n as an exponential polynomial, normalized to
/// phi_n(0) = 1.
pub(crate) fn seed_exp_poly(n: u32, p: &PotentialParams) -> Result<ExpPoly> {
    let lambda = p.lambda();
    if (n as f64) <= lambda {
        return Err(Error::InadmissibleIndex { n, lambda });
    }
    let lam2 = lambda * lambda;
    let nf = n as f64;
    let c = 1.0 - nf - lam2 / nf;
    if (c - c.round()).abs() < 1e-8 {
        return Err(Error::HypergeometricParameter {
            name: "c",
            value: Complex64::new(c, 0.0),
        });
    }
    // phi_n = u^{-mu_n} sum_{m=0}^{n-1} p_m (1+u)^{n-m},
    // p_m = (1-n)_m (-n)_m / ((c)_m m!)
    let mut coeffs = vec![0.0; n as usize + 1];
    let mut pm = 1.0;
    for m in 0..n {
        let mf = m as f64;
        if m > 0 {
            pm *= (1.0 - nf + mf - 1.0) * (-nf + mf - 1.0) / ((c + mf - 1.0) * mf);
        }
        // expand (1+u)^{n-m}
        let deg = (n - m) as usize;
        let mut binom = 1.0;
        for (j, slot) in coeffs.iter_mut().enumerate().take(deg + 1) {
            *slot += pm * binom;
            binom *= (deg - j) as f64 / (j + 1) as f64;
        }
    }
    let at_zero: f64 = coeffs.iter().sum();
    if at_zero.abs() < 1e-12 {
        return Err(Error::SeedNode { n, x: 0.0 });
    }
    Ok(ExpPoly {
        s: -0.5 * (nf - lam2 / nf),
        coeffs: coeffs.iter().map(|c| c / at_zero).collect(),
    })
}

fn scan_for_node(f: &ExpPoly, p: &PotentialParams) -> Option<f64> {
    let steps = 4000;
    let span = 50.0;
    let mut prev = f.poly_sign(-span);
    for i in 1..=steps {
        let t = -span + 2.0 * span * i as f64 / steps as f64;
        let s = f.poly_sign(t);
        if s == 0.0 || s != prev {
            return Some(t * p.alpha());
        }
        prev = s;
    }
    None
}

/// Asymptotic superpotential constants of seed n:
/// W- = (n - lambda^2/n)/(2 alpha), W+ = -(n + lambda^2/n)/(2 alpha).
pub fn superpotential_asymptotes(n: u32, p: &PotentialParams) -> (f64, f64) {
    let lam2 = p.lambda() * p.lambda();
    let nf = n as f64;
    (
        0.5 * (nf - lam2 / nf) / p.alpha(),
        -0.5 * (nf + lam2 / nf) / p.alpha(),
    )
}

/// Superpotential W = -phi_n'/phi_n of a nodeless anti-bound seed.
#[derive(Debug, Clone)]
pub struct SuperPotential {
    pub n: u32,
    pub w_minus: f64,
    pub w_plus: f64,
    alpha: f64,
    seed: ExpPoly,
    dseed: ExpPoly,
}

impl SuperPotential {
    pub fn eval(&self, x: f64) -> f64 {
        -ratio_eval(&self.dseed, &self.seed, x / self.alpha) / self.alpha
    }
}

/// Builds the superpotential of seed n; errors when the seed has a node
/// (which happens exactly for even n, whose polynomial part has a positive
/// real root).
pub fn superpotential(n: u32, p: &PotentialParams) -> Result<SuperPotential> {
    let seed = seed_exp_poly(n, p)?;
    if let Some(x) = scan_for_node(&seed, p) {
        return Err(Error::SeedNode { n, x });
    }
    let (w_minus, w_plus) = superpotential_asymptotes(n, p);
    let dseed = seed.derivative();
    Ok(SuperPotential {
        n,
        w_minus,
        w_plus,
        alpha: p.alpha(),
        seed,
        dseed,
    })
}

/// One bound state of a partner Hamiltonian.
#[derive(Debug, Clone)]
pub struct BoundState {
    pub index: u32,
    pub energy: f64,
    numerator: ExpPoly,
    norm: f64,
}

/// Order-n Darboux-Crum chain seeded by the anti-bound states 1..=n.
///
/// The partner potential is V - 2 (ln W)'' with W the Wronskian of the
/// seeds; the s-th bound state (energy k(s)^2) is the Wronskian with seed s
/// omitted, divided by W.
#[derive(Debug, Clone)]
pub struct SusyChain {
    order: u32,
    params: PotentialParams,
    wronskian: ExpPoly,
    dw1: ExpPoly,
    dw2: ExpPoly,
    bound: Vec<BoundState>,
    noded_seed: bool,
}

fn wronskian_of(seeds: &[ExpPoly]) -> ExpPoly {
    let n = seeds.len();
    if n == 0 {
        return ExpPoly::one();
    }
    // rows: derivative order, columns: seeds
    let mut rows: Vec<Vec<ExpPoly>> = Vec::with_capacity(n);
    rows.push(seeds.to_vec());
    for i in 1..n {
        let prev = &rows[i - 1];
        rows.push(prev.iter().map(|f| f.derivative()).collect());
    }
    determinant(&rows, &(0..n).collect::<Vec<_>>())
}

fn determinant(rows: &[Vec<ExpPoly>], cols: &[usize]) -> ExpPoly {
    let n = cols.len();
    let row = rows.len() - n;
    if n == 1 {
        return rows[row][cols[0]].clone();
    }
    let mut acc: Option<ExpPoly> = None;
    for (i, &col) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&c| c != col).collect();
        let minor = determinant(rows, &rest);
        let term = rows[row][col].mul(&minor);
        let term = if i % 2 == 0 { term } else { term.scale(-1.0) };
        acc = Some(match acc {
            None => term,
            Some(a) => a.sub(&term.scale(-1.0)),
        });
    }
    acc.unwrap()
}

impl SusyChain {
    pub fn new(order: u32, p: &PotentialParams) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::ChainOrderTooLarge(order, MAX_ORDER));
        }
        let seeds: Vec<ExpPoly> = (1..=order)
            .map(|n| seed_exp_poly(n, p))
            .collect::<Result<_>>()?;
        let noded_seed = seeds
            .iter()
            .any(|s| scan_for_node(s, p).is_some());
        let wronskian = wronskian_of(&seeds);
        if let Some(x) = scan_for_node(&wronskian, p) {
            return Err(Error::WronskianZero { x });
        }
        let dw1 = wronskian.derivative();
        let dw2 = dw1.derivative();
        let mut bound = Vec::with_capacity(order as usize);
        for s in 1..=order {
            let omitted: Vec<ExpPoly> = seeds
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != (s - 1) as usize)
                .map(|(_, f)| f.clone())
                .collect();
            let numerator = wronskian_of(&omitted);
            let (k, _) = scattering::pole_momenta(s, p);
            let mut state = BoundState {
                index: s,
                energy: (k * k).re,
                numerator,
                norm: 1.0,
            };
            state.norm = bound_norm(&state, &wronskian, p);
            bound.push(state);
        }
        Ok(Self {
            order,
            params: *p,
            wronskian,
            dw1,
            dw2,
            bound,
            noded_seed,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn params(&self) -> &PotentialParams {
        &self.params
    }

    /// True when the chain contains an individually noded (even-index) seed;
    /// the chain itself stays regular through the nonvanishing Wronskian.
    pub fn has_noded_seed(&self) -> bool {
        self.noded_seed
    }

    /// Partner potential via the Darboux/Wronskian route,
    /// V(x) - (2/alpha^2) d^2/dt^2 ln W.
    pub fn partner_potential(&self, x: f64) -> f64 {
        let t = x / self.params.alpha();
        let g1 = ratio_eval(&self.dw1, &self.wronskian, t);
        let g2 = ratio_eval(&self.dw2, &self.wronskian, t);
        let a2 = self.params.alpha() * self.params.alpha();
        potential(x, &self.params) - 2.0 * (g2 - g1 * g1) / a2
    }

    pub fn bound_states(&self) -> &[BoundState] {
        &self.bound
    }

    /// Normalized s-th bound state (unit L2 norm, s = 1..=order).
    pub fn bound_state_value(&self, s: u32, x: f64) -> f64 {
        let state = &self.bound[(s - 1) as usize];
        ratio_eval(&state.numerator, &self.wronskian, x / self.params.alpha()) / state.norm
    }
}

fn bound_norm(state: &BoundState, wronskian: &ExpPoly, p: &PotentialParams) -> f64 {
    // composite Simpson on [-50a, 50a]; the states decay exponentially at
    // both ends
    let span = 50.0 * p.alpha();
    let n = 4000;
    let h = 2.0 * span / n as f64;
    let f = |x: f64| {
        let v = ratio_eval(&state.numerator, wronskian, x / p.alpha());
        v * v
    };
    let mut acc = f(-span) + f(span);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(-span + h * i as f64);
    }
    (acc * h / 3.0).sqrt()
}

/// Closed-form hierarchy potential
/// (V0/2)(1 + tanh(x/2a)) - n(n+1)/(4 a^2) sech^2(x/2a), cross-validated
/// against the Wronskian route (which stays authoritative).
pub fn partner_potential_closed_form(order: u32, x: f64, p: &PotentialParams) -> f64 {
    let z = 0.5 * x / p.alpha();
    let e = (-z.abs()).exp();
    let sech = 2.0 * e / (1.0 + e * e);
    let nf = order as f64;
    potential(x, p) - nf * (nf + 1.0) / (4.0 * p.alpha() * p.alpha()) * sech * sech
}

/// First-order amplitude factors of seed n:
/// r -> r (-ik + W-)/(ik + W-), t -> t (ik' + W+)/(ik + W-).
pub fn susy_amplitude_factors(
    k: f64,
    n: u32,
    p: &PotentialParams,
) -> Result<(Complex64, Complex64)> {
    let lambda = p.lambda();
    if (n as f64) <= lambda {
        return Err(Error::InadmissibleIndex { n, lambda });
    }
    if !(k > 0.0) {
        return Err(Error::NonPositiveMomentum(k));
    }
    let (w_minus, w_plus) = superpotential_asymptotes(n, p);
    let kprime = momentum_pair(Complex64::new(k, 0.0), p)?.kprime;
    let ik = Complex64::i() * k;
    let denom = ik + w_minus;
    Ok((
        (-ik + w_minus) / denom,
        (Complex64::i() * kprime + w_plus) / denom,
    ))
}

/// Partner amplitudes of the order-n chain (seeds 1..=n composed as a
/// product of first-order factors).
pub fn partner_amplitudes(
    k: f64,
    order: u32,
    p: &PotentialParams,
) -> Result<(Complex64, Complex64)> {
    let base = scattering::amplitudes(k, p)?;
    let mut r = base.r;
    let mut t = base.t;
    for n in 1..=order {
        let (fr, ft) = susy_amplitude_factors(k, n, p)?;
        r *= fr;
        t *= ft;
    }
    Ok((r, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> PotentialParams {
        PotentialParams::new(0.5, 1.0).unwrap()
    }

    fn sech2(z: f64) -> f64 {
        let e = (-z.abs()).exp();
        let s = 2.0 * e / (1.0 + e * e);
        s * s
    }

    #[test]
    fn superpotential_first_seed_closed_form() {
        // W(x) = 1/4 - e^x/(1+e^x) for V0 = 1/2, alpha = 1
        let w = superpotential(1, &params()).unwrap();
        assert_eq!(w.n, 1);
        assert_relative_eq!(w.w_minus, 0.25, max_relative = 1e-15);
        assert_relative_eq!(w.w_plus, -0.75, max_relative = 1e-15);
        for x in [-4.0f64, -1.0, 0.0, 0.5, 3.0] {
            let expected = 0.25 - x.exp() / (1.0 + x.exp());
            assert_relative_eq!(w.eval(x), expected, max_relative = 1e-12);
        }
        // asymptotic saturation
        assert!((w.eval(-30.0) - w.w_minus).abs() < 1e-10);
        assert!((w.eval(30.0) - w.w_plus).abs() < 1e-10);
    }

    #[test]
    fn even_seeds_are_noded_odd_seeds_are_not() {
        let p = params();
        assert!(matches!(superpotential(2, &p), Err(Error::SeedNode { n: 2, .. })));
        assert!(matches!(superpotential(4, &p), Err(Error::SeedNode { n: 4, .. })));
        assert!(superpotential(1, &p).is_ok());
        assert!(superpotential(3, &p).is_ok());
        assert!(superpotential(5, &p).is_ok());
    }

    #[test]
    fn chain_flags_noded_seeds() {
        let p = params();
        assert!(!SusyChain::new(1, &p).unwrap().has_noded_seed());
        assert!(SusyChain::new(2, &p).unwrap().has_noded_seed());
    }

    #[test]
    fn partner_potentials_match_printed_forms() {
        let p = params();
        let chain1 = SusyChain::new(1, &p).unwrap();
        let chain2 = SusyChain::new(2, &p).unwrap();
        for i in 0..=80 {
            let x = -10.0 + 0.25 * i as f64;
            let base = 0.25 * (1.0 + (0.5 * x).tanh());
            let v1 = base - 0.5 * sech2(0.5 * x);
            let v2 = base - 1.5 * sech2(0.5 * x);
            assert!((chain1.partner_potential(x) - v1).abs() < 1e-9, "x={x}");
            assert!((chain2.partner_potential(x) - v2).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn darboux_route_matches_closed_form_hierarchy() {
        let p = params();
        for order in 1..=4u32 {
            let chain = SusyChain::new(order, &p).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..=200 {
                let x = -10.0 + 0.1 * i as f64;
                worst = worst
                    .max((chain.partner_potential(x) - partner_potential_closed_form(order, x, &p)).abs());
            }
            assert!(worst < 1e-9, "order {order}: max deviation {worst}");
        }
    }

    #[test]
    fn darboux_route_matches_closed_form_general_parameters() {
        for (v0, alpha) in [(2.0, 0.7), (0.9, 1.3)] {
            let p = PotentialParams::new(v0, alpha).unwrap();
            let max_order = 3.min(p.lambda().floor() as u32 + 3);
            for order in 1..=max_order {
                if (order as f64) <= p.lambda() {
                    continue;
                }
                if (1..=order).any(|s| (s as f64) <= p.lambda()) {
                    continue;
                }
                let chain = SusyChain::new(order, &p).unwrap();
                for i in 0..=100 {
                    let x = -8.0 + 0.16 * i as f64;
                    let d = (chain.partner_potential(x)
                        - partner_potential_closed_form(order, x, &p))
                    .abs();
                    assert!(d < 1e-9, "v0={v0} alpha={alpha} order={order} x={x}: {d}");
                }
            }
        }
    }

    #[test]
    fn shape_invariance_of_consecutive_partners() {
        let p = params();
        let chains: Vec<SusyChain> = (1..=4).map(|n| SusyChain::new(n, &p).unwrap()).collect();
        for n in 2..=4usize {
            for i in 0..=100 {
                let x = -10.0 + 0.2 * i as f64;
                let diff = chains[n - 1].partner_potential(x) - chains[n - 2].partner_potential(x);
                let expected = -(n as f64) / 2.0 * sech2(0.5 * x);
                assert!((diff - expected).abs() < 1e-10, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn order_one_bound_state_is_inverse_seed() {
        let p = params();
        let chain = SusyChain::new(1, &p).unwrap();
        let states = chain.bound_states();
        assert_eq!(states.len(), 1);
        assert_relative_eq!(states[0].energy, -0.0625, max_relative = 1e-14);
        // wavefunction proportional to e^{x/4}/(1+e^x)
        let reference = |x: f64| (0.25 * x).exp() / (1.0 + x.exp());
        let ratio0 = chain.bound_state_value(1, 0.0) / reference(0.0);
        for x in [-6.0, -2.0, 1.0, 4.5, 8.0] {
            let ratio = chain.bound_state_value(1, x) / reference(x);
            assert_relative_eq!(ratio, ratio0, max_relative = 1e-10);
        }
    }

    #[test]
    fn order_two_bound_states() {
        let p = params();
        let chain = SusyChain::new(2, &p).unwrap();
        let states = chain.bound_states();
        assert_eq!(states.len(), 2);
        assert_relative_eq!(states[0].energy, -0.0625, max_relative = 1e-14);
        assert_relative_eq!(states[1].energy, -0.765625, max_relative = 1e-14);

        // orthogonality after normalization
        let mut overlap = 0.0;
        let (span, n) = (40.0, 8000);
        let h = 2.0 * span / n as f64;
        for i in 0..=n {
            let x = -span + h * i as f64;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            overlap += w * chain.bound_state_value(1, x) * chain.bound_state_value(2, x);
        }
        overlap *= h / 3.0;
        assert!(overlap.abs() < 1e-8, "overlap = {overlap}");
    }

    #[test]
    fn bound_states_satisfy_partner_schrodinger_equation() {
        let p = params();
        for order in 1..=3u32 {
            let chain = SusyChain::new(order, &p).unwrap();
            for s in 1..=order {
                let energy = chain.bound_states()[(s - 1) as usize].energy;
                let h = 2.5e-4;
                let mut worst: f64 = 0.0;
                let mut scale: f64 = 0.0;
                for i in 0..=80 {
                    let x = -10.0 + 0.25 * i as f64;
                    let pm = chain.bound_state_value(s, x - h);
                    let p0 = chain.bound_state_value(s, x);
                    let pp = chain.bound_state_value(s, x + h);
                    let second = (pp - 2.0 * p0 + pm) / (h * h);
                    let res = second + (energy - chain.partner_potential(x)) * p0;
                    worst = worst.max(res.abs());
                    scale = scale.max(p0.abs());
                }
                assert!(worst / scale < 1e-6, "order {order} s {s}: {}", worst / scale);
            }
        }
    }

    #[test]
    fn bound_state_tails_decay_at_the_analytic_rates() {
        let p = params();
        let chain = SusyChain::new(2, &p).unwrap();
        for s in 1..=2u32 {
            let (k, kprime) = scattering::pole_momenta(s, &p);
            let left_rate = (-k.im) * 1.0; // |Im k(s)|
            let right_rate = -kprime.im; // |Im k'(s)|
            let xr = 18.0;
            let ratio_right = chain.bound_state_value(s, xr) / chain.bound_state_value(s, xr - 1.0);
            assert_relative_eq!(ratio_right, (-right_rate).exp(), max_relative = 1e-3);
            let xl = -18.0;
            let ratio_left = chain.bound_state_value(s, xl) / chain.bound_state_value(s, xl + 1.0);
            assert_relative_eq!(ratio_left, (-left_rate).exp(), max_relative = 1e-3);
        }
    }

    #[test]
    fn bound_state_norm_is_stable_under_wider_truncation() {
        let p = params();
        let chain = SusyChain::new(2, &p).unwrap();
        for s in 1..=2u32 {
            let norm = |span: f64| {
                let n = 8000;
                let h = 2.0 * span / n as f64;
                let mut acc = 0.0;
                for i in 0..=n {
                    let x = -span + h * i as f64;
                    let w = if i == 0 || i == n {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    let v = chain.bound_state_value(s, x);
                    acc += w * v * v;
                }
                acc * h / 3.0
            };
            let n25 = norm(25.0);
            let n35 = norm(35.0);
            assert!((n35 - n25).abs() < 1e-6 * n25, "s={s}");
        }
    }

    #[test]
    fn amplitude_factors_preserve_moduli() {
        let p = params();
        for i in 0..100 {
            let k = 0.05 + 0.05 * i as f64;
            if (k - p.threshold()).abs() < 1e-3 {
                continue;
            }
            let base = scattering::amplitudes(k, &p).unwrap();
            let (r1, t1) = partner_amplitudes(k, 1, &p).unwrap();
            assert!((r1.norm() - base.r.norm()).abs() <= 1e-12 * base.r.norm().max(1.0));
            assert!((t1.norm() - base.t.norm()).abs() <= 1e-12 * base.t.norm().max(1.0));
        }
    }

    #[test]
    fn reflection_phase_shift_closed_form() {
        // Delta_r = -2 arctan(k / W-); at k = W-(1) = 1/4 this is -pi/2
        let p = params();
        let (fr, _) = susy_amplitude_factors(0.25, 1, &p).unwrap();
        assert_relative_eq!(fr.arg(), -std::f64::consts::FRAC_PI_2, max_relative = 1e-12);
        for k in [0.1, 0.6, 1.7] {
            let (fr, _) = susy_amplitude_factors(k, 1, &p).unwrap();
            let (w_minus, _) = superpotential_asymptotes(1, &p);
            assert_relative_eq!(fr.arg(), -2.0 * (k / w_minus).atan(), max_relative = 1e-12);
        }
    }

    #[test]
    fn transmission_phase_shift_vanishes_at_high_energy() {
        let p = params();
        let (_, ft) = susy_amplitude_factors(100.0, 1, &p).unwrap();
        assert!(ft.arg().abs() < 0.02, "Delta_t(100) = {}", ft.arg());
        // closed form pi/2 + arctan(-W+/k') - arctan(k/W-)
        for k in [0.9, 1.4, 3.0] {
            let (_, ft) = susy_amplitude_factors(k, 1, &p).unwrap();
            let (w_minus, w_plus) = superpotential_asymptotes(1, &p);
            let kp = (k * k - p.v0()).sqrt();
            let expected =
                std::f64::consts::FRAC_PI_2 + (-w_plus / kp).atan() - (k / w_minus).atan();
            assert_relative_eq!(ft.arg(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn intertwining_maps_scattering_states_to_partner_states() {
        // A- psi_H solves the partner equation at the same energy
        let p = params();
        let chain = SusyChain::new(1, &p).unwrap();
        let sp = superpotential(1, &p).unwrap();
        for k in [0.9, 1.3, 2.0] {
            let base = scattering::amplitudes(k, &p).unwrap();
            let kc = Complex64::new(k, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let mapped = |x: f64| -> Complex64 {
                let (v, d) =
                    crate::model::wavefunction_and_derivative(x, kc, base.t, zero, &p).unwrap();
                d + sp.eval(x) * v
            };
            let h = 5e-4;
            let mut worst: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for i in 0..=40 {
                let x = -6.0 + 0.3 * i as f64;
                let pm = mapped(x - h);
                let p0 = mapped(x);
                let pp = mapped(x + h);
                let second = (pp - 2.0 * p0 + pm) / (h * h);
                let res = second + (k * k - chain.partner_potential(x)) * p0;
                worst = worst.max(res.norm());
                scale = scale.max(p0.norm());
            }
            assert!(worst / scale < 1e-5, "k={k}: residual {}", worst / scale);
        }
    }

    #[test]
    fn chain_requires_admissible_seeds() {
        let p = PotentialParams::new(9.0, 1.0).unwrap(); // lambda = 3
        assert!(matches!(
            SusyChain::new(1, &p),
            Err(Error::InadmissibleIndex { .. })
        ));
        assert!(matches!(
            SusyChain::new(0, &params()),
            Err(Error::ChainOrderTooLarge(0, _))
        ));
    }
}
