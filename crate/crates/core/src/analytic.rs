//! Numerical Mellin-Barnes integrals, Gamma series at infinity, GKZ
//! residuals and numeric wall monodromy.
//!
//! Everything is evaluated in covering coordinates: the full variable is
//! `vhat in C^d` with `v_j = exp(2 pi i vhat_j)`, and the restricted variable
//! is `x in C^n` with `vhat = iota(x)`. The mandatory scope is `n = 1`; the
//! tensor-product quadrature for `n >= 2` is gated behind
//! [`MbParams::experimental`].

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arrangement::{is_generic, zonotope, FaceComplex};
use crate::exactlat::{subsets, WeightConfig};
use crate::ksdata::{Label, LabeledMatrix};
use crate::lp::{maximize, Constraint, LpOutcome, Rel};
use crate::rational::{approx_f64, rat, to_f64, to_i64, Rat};
use crate::resonance::is_totally_nonresonant;
use crate::schober_k0::{chamber_labels, gamma_of_alpha, Side};

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalyticError {
    #[error("no contour shift makes every Gamma argument have positive real part")]
    Infeasible,
    #[error("Gamma factor {index} has a pole on the contour (real part {real_part})")]
    PoleOnContour { index: usize, real_part: f64 },
    #[error("point is outside the convergence domain (facet excess {excess})")]
    OutsideConvergenceDomain { excess: f64 },
    #[error("direction {0:?} is not generic")]
    NotGeneric(Vec<f64>),
    #[error("parameter is not totally non-resonant")]
    NotTotallyNonResonant,
    #[error("series diverges at truncation {truncation}")]
    Diverging { truncation: usize },
    #[error("least-squares system is ill-conditioned (condition {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("rank {0} is outside the supported scope")]
    Unsupported(usize),
    #[error("chambers {0:?} and {1:?} do not share a wall")]
    NotAdjacent(Label, Label),
}

// ---------------------------------------------------------------------------
// Special functions

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `true` when `z` is a pole of Gamma.
pub fn is_gamma_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// `log sin(pi z)` on some branch, stable for large `|Im z|`.
fn ln_sin_pi(z: C64) -> C64 {
    let w = z * PI;
    if w.im > 0.0 {
        // sin w = e^{-iw} (1 - e^{2iw}) / (-2i)
        -I * w + ((C64::one() - (I * w * 2.0).exp()) / (I * -2.0)).ln()
    } else {
        I * w + ((C64::one() - (-I * w * 2.0).exp()) / (I * 2.0)).ln()
    }
}

/// Principal-ish `log Gamma(z)` via Lanczos with reflection. Only `exp` of
/// the result is meaningful; the imaginary part may differ from the
/// principal branch by multiples of `2 pi`.
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        return C64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(C64::one() - z);
    }
    let z = z - 1.0;
    let mut a = C64::new(LANCZOS[0], 0.0);
    let t = z + LANCZOS_G + 0.5;
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += *c / (z + k as f64);
    }
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(z: C64) -> C64 {
    if is_gamma_pole(z) {
        return C64::new(f64::INFINITY, 0.0);
    }
    ln_gamma(z).exp()
}

/// `1 / Gamma(z)`, exactly zero at the poles of Gamma.
pub fn rgamma(z: C64) -> C64 {
    if is_gamma_pole(z) {
        return C64::zero();
    }
    (-ln_gamma(z)).exp()
}

/// Falling factorial `z (z-1) ... (z-k+1)`.
fn falling(z: C64, k: i64) -> C64 {
    (0..k).fold(C64::one(), |acc, i| acc * (z - i as f64))
}

// ---------------------------------------------------------------------------
// Parameters

#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    /// Contour truncated to `sigma + i[-R, R]^n`.
    pub half_width: f64,
    /// Total nodes per dimension.
    pub nodes: usize,
    /// Nodes per Gauss-Legendre panel.
    pub panel_degree: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { half_width: 40.0, nodes: 2000, panel_degree: 20 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MbParams {
    /// Any `gamma` with `A gamma = alpha`.
    pub gamma: Vec<C64>,
    /// Real contour shift.
    pub sigma: Vec<f64>,
    pub quadrature: Quadrature,
    /// Permit tensor-product quadrature when `n >= 2`.
    pub experimental: bool,
}

impl MbParams {
    /// `gamma = K alpha` and a centred admissible `sigma`.
    pub fn for_alpha(cfg: &WeightConfig, alpha: &[C64], quadrature: Quadrature) -> Result<Self, AnalyticError> {
        let gamma = gamma_of_alpha(cfg, alpha);
        let sigma = choose_sigma(cfg, &gamma)?;
        Ok(MbParams { gamma, sigma, quadrature, experimental: false })
    }

    /// `alpha = A gamma`.
    pub fn alpha(&self, cfg: &WeightConfig) -> Vec<C64> {
        (0..cfg.m())
            .map(|k| (0..cfg.d()).map(|i| self.gamma[i] * cfg.a_col(i)[k] as f64).sum())
            .collect()
    }

    /// Smallest value of `-Re(gamma_j + <b_j, sigma>)`; positive iff the
    /// contour satisfies the annihilation condition.
    pub fn margin(&self, cfg: &WeightConfig) -> f64 {
        (0..cfg.d())
            .map(|j| -(self.gamma[j].re + dot_f(cfg.b_col(j), &self.sigma)))
            .fold(f64::INFINITY, f64::min)
    }
}

fn dot_f(b: &[i64], x: &[f64]) -> f64 {
    b.iter().zip(x).map(|(a, c)| *a as f64 * c).sum()
}

fn dot_c(b: &[i64], x: &[C64]) -> C64 {
    b.iter().zip(x).map(|(a, c)| c * *a as f64).sum()
}

/// Maximize `t` subject to `Re gamma_j + <b_j, sigma> + t <= 0`, `t <= 1`.
pub fn choose_sigma(cfg: &WeightConfig, gamma: &[C64]) -> Result<Vec<f64>, AnalyticError> {
    let n = cfg.n();
    let mut cons = Vec::new();
    for (j, g) in gamma.iter().enumerate() {
        let mut row: Vec<Rat> = cfg.b_col(j).iter().map(|&b| rat(b, 1)).collect();
        row.push(Rat::one());
        cons.push(Constraint::new(row, Rel::Le, -approx_f64(g.re, 1_000_000_000)));
    }
    let mut obj = vec![Rat::zero(); n + 1];
    obj[n] = Rat::one();
    cons.push(Constraint::new(obj.clone(), Rel::Le, Rat::one()));
    match maximize(n + 1, &cons, &obj) {
        LpOutcome::Optimal { x, value } if value.is_positive() => Ok(x[..n].iter().map(to_f64).collect()),
        _ => Err(AnalyticError::Infeasible),
    }
}

// ---------------------------------------------------------------------------
// Mellin-Barnes quadrature

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: C64,
    pub error: f64,
}

/// `vhat = s_iota x` in `C^d`.
pub fn iota_c(cfg: &WeightConfig, x: &[C64]) -> Vec<C64> {
    let s = cfg.s_iota();
    (0..cfg.d())
        .map(|i| (0..cfg.n()).map(|k| x[k] * to_i64(s.get(i, k)) as f64).sum())
        .collect()
}

/// `B vhat`.
pub fn b_c(cfg: &WeightConfig, vhat: &[C64]) -> Vec<C64> {
    (0..cfg.n()).map(|k| (0..cfg.d()).map(|j| vhat[j] * cfg.b_col(j)[k] as f64).sum()).collect()
}

/// Largest facet excess of `Re y` over the open zonotope; negative inside.
pub fn domain_excess(cfg: &WeightConfig, y: &[C64]) -> f64 {
    let re: Vec<f64> = y.iter().map(|c| c.re).collect();
    zonotope(cfg).facets.iter().map(|(l, c)| dot_f(l, &re) - to_f64(c)).fold(f64::NEG_INFINITY, f64::max)
}

/// A weight multiplying the integrand, as a function of `s`.
pub type Weight<'a> = dyn Fn(&[C64]) -> C64 + 'a;

struct Integrand<'a> {
    cfg: &'a WeightConfig,
    gamma: &'a [C64],
    phase0: C64,
    y: Vec<C64>,
}

impl Integrand<'_> {
    fn log_at(&self, s: &[C64]) -> C64 {
        let mut l = self.phase0 + 2.0 * PI * I * self.y.iter().zip(s).map(|(a, b)| a * b).sum::<C64>();
        for j in 0..self.cfg.d() {
            l += ln_gamma(-self.gamma[j] - dot_c(self.cfg.b_col(j), s));
        }
        l
    }
}

fn check_contour(cfg: &WeightConfig, p: &MbParams) -> Result<(), AnalyticError> {
    for j in 0..cfg.d() {
        let r = -p.gamma[j].re - dot_f(cfg.b_col(j), &p.sigma);
        if r <= 1e-12 && (r - r.round()).abs() < 1e-10 {
            return Err(AnalyticError::PoleOnContour { index: j, real_part: r });
        }
    }
    Ok(())
}

/// Panel breakpoints on `[-R, R]`: a uniform mesh of `panels` pieces,
/// refined geometrically towards each `(t, dist)` where a singularity sits at
/// height `t` and distance `dist` from the contour.
fn breakpoints(q: &Quadrature, panels: usize, near: &[(f64, f64)]) -> Vec<f64> {
    let r = q.half_width;
    let h = 2.0 * r / panels as f64;
    let mut pts: Vec<f64> = (0..=panels).map(|k| -r + k as f64 * h).collect();
    for &(t, dist) in near {
        let mut w = dist.max(1e-6);
        while w < h {
            for x in [t - w, t + w] {
                if x.abs() < r {
                    pts.push(x);
                }
            }
            w *= 2.0;
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    pts
}

fn panel_rule(q: &Quadrature, cuts: &[f64]) -> Vec<(f64, f64)> {
    let deg = q.panel_degree.max(2);
    let gl = GaussLegendre::new(NonZeroUsize::new(deg).unwrap());
    let mut out = Vec::with_capacity(cuts.len() * deg);
    for win in cuts.windows(2) {
        let (a, h) = (win[0], win[1] - win[0]);
        for &(x, w) in gl.as_node_weight_pairs() {
            out.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

/// Integrals of `weight_k(s) * integrand(s)` over the contour for every
/// weight, evaluated at the full variable `vhat`.
pub fn mb_integrals(
    cfg: &WeightConfig,
    p: &MbParams,
    vhat: &[C64],
    weights: &[&Weight<'_>],
) -> Result<Vec<Estimate>, AnalyticError> {
    let n = cfg.n();
    if n != 1 && !p.experimental {
        return Err(AnalyticError::Unsupported(n));
    }
    check_contour(cfg, p)?;
    let y = b_c(cfg, vhat);
    let excess = domain_excess(cfg, &y);
    if excess >= -1e-12 {
        return Err(AnalyticError::OutsideConvergenceDomain { excess });
    }
    let f = Integrand { cfg, gamma: &p.gamma, phase0: 2.0 * PI * I * vhat.iter().zip(&p.gamma).map(|(a, b)| a * b).sum::<C64>(), y };
    let panels = (p.quadrature.nodes / p.quadrature.panel_degree.max(2)).max(2);
    // Nearest poles of each Gamma factor (n = 1 only).
    let near: Vec<(f64, f64)> = if n == 1 {
        (0..cfg.d())
            .map(|j| {
                let b = cfg.b_col(j)[0] as f64;
                let re = -p.gamma[j].re - b * p.sigma[0];
                let dist = if re >= 0.0 { re } else { (re - re.round()).abs() };
                (-p.gamma[j].im / b, dist / b.abs())
            })
            .collect()
    } else {
        Vec::new()
    };
    let cuts = breakpoints(&p.quadrature, panels, &near);
    let fine = panel_rule(&p.quadrature, &cuts);
    let coarse_cuts: Vec<f64> = cuts.iter().step_by(2).copied().chain(cuts.last().copied()).collect();
    let mut coarse_cuts = coarse_cuts;
    coarse_cuts.dedup();
    let coarse = panel_rule(&p.quadrature, &coarse_cuts);
    let jac = I.powi(n as i32);
    let eval = |rule: &[(f64, f64)]| -> Vec<C64> {
        let mut acc = vec![C64::zero(); weights.len()];
        let mut idx = vec![0usize; n];
        loop {
            let s: Vec<C64> = idx.iter().enumerate().map(|(k, &i)| C64::new(p.sigma[k], rule[i].0)).collect();
            let w: f64 = idx.iter().map(|&i| rule[i].1).product();
            let base = f.log_at(&s).exp() * w * jac;
            for (a, wt) in acc.iter_mut().zip(weights) {
                *a += base * wt(&s);
            }
            let mut k = 0;
            loop {
                if k == n {
                    return acc;
                }
                idx[k] += 1;
                if idx[k] < rule.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    };
    let vf = eval(&fine);
    let vc = eval(&coarse);
    // Tail: the integrand decays like exp(-kappa |t|) beyond the ends.
    let total_b: f64 = cfg.b_cols().iter().map(|b| b.iter().map(|x| x.abs() as f64).sum::<f64>()).sum();
    let r = p.quadrature.half_width;
    let mut tail = 0.0;
    if n == 1 {
        for sgn in [-1.0, 1.0] {
            let s = [C64::new(p.sigma[0], sgn * r)];
            let kappa = (0.5 * PI * total_b + sgn * 2.0 * PI * f.y[0].re).max(1e-3);
            tail += f.log_at(&s).exp().norm() / kappa;
        }
    }
    Ok(vf
        .iter()
        .zip(&vc)
        .zip(weights)
        .map(|((a, b), wt)| {
            let wmax = if n == 1 {
                [-r, r].iter().map(|t| wt(&[C64::new(p.sigma[0], *t)]).norm()).fold(1.0, f64::max)
            } else {
                1.0
            };
            Estimate { value: *a, error: (a - b).norm() + tail * wmax }
        })
        .collect())
}

/// `Mhat(vhat)` at a full variable.
pub fn evaluate_mb_full(cfg: &WeightConfig, p: &MbParams, vhat: &[C64]) -> Result<Estimate, AnalyticError> {
    let one = |_: &[C64]| C64::one();
    Ok(mb_integrals(cfg, p, vhat, &[&one])?[0])
}

/// `Mhat(iota x)` at a restricted variable `x in C^n`.
pub fn evaluate_mb(cfg: &WeightConfig, p: &MbParams, x: &[C64]) -> Result<Estimate, AnalyticError> {
    evaluate_mb_full(cfg, p, &iota_c(cfg, x))
}

/// `Mhat(vhat + A^T w) - exp(2 pi i <w, alpha>) Mhat(vhat)`, relative.
pub fn transformation_law_residual(cfg: &WeightConfig, p: &MbParams, vhat: &[C64], w: &[i64]) -> Result<f64, AnalyticError> {
    let alpha = p.alpha(cfg);
    let shifted: Vec<C64> = (0..cfg.d()).map(|i| vhat[i] + crate::rational::dot_i64(cfg.a_col(i), w) as f64).collect();
    let m0 = evaluate_mb_full(cfg, p, vhat)?.value;
    let m1 = evaluate_mb_full(cfg, p, &shifted)?.value;
    let phase = (2.0 * PI * I * w.iter().zip(&alpha).map(|(a, b)| b * *a as f64).sum::<C64>()).exp();
    Ok((m1 - phase * m0).norm() / m0.norm().max(f64::MIN_POSITIVE))
}

// ---------------------------------------------------------------------------
// GKZ residuals

#[derive(Clone, Debug, PartialEq)]
pub struct GkzResidual {
    /// One entry per row of `B`: the box operator of that lattice vector.
    pub boxes: Vec<f64>,
    /// One entry per coordinate of `alpha`.
    pub euler: Vec<f64>,
}

impl GkzResidual {
    pub fn max_box(&self) -> f64 {
        self.boxes.iter().copied().fold(0.0, f64::max)
    }
    pub fn max_euler(&self) -> f64 {
        self.euler.iter().copied().fold(0.0, f64::max)
    }
}

/// Box and Euler residuals at `vhat`, each relative to the size of the
/// terms it compares.
pub fn gkz_residual(cfg: &WeightConfig, p: &MbParams, vhat: &[C64]) -> Result<GkzResidual, AnalyticError> {
    let d = cfg.d();
    let expo = |i: usize, s: &[C64]| p.gamma[i] + dot_c(cfg.b_col(i), s);
    let vinv: Vec<C64> = vhat.iter().map(|v| (-2.0 * PI * I * v).exp()).collect();
    let alpha = p.alpha(cfg);

    let mut boxes = Vec::new();
    for k in 0..cfg.n() {
        let l: Vec<i64> = (0..d).map(|j| cfg.b_col(j)[k]).collect();
        let monomial = |sign: i64| {
            let l = l.clone();
            let vinv = vinv.clone();
            move |s: &[C64]| {
                (0..d).fold(C64::one(), |acc, i| {
                    let e = l[i] * sign;
                    if e > 0 {
                        acc * falling(expo(i, s), e) * vinv[i].powi(e as i32)
                    } else {
                        acc
                    }
                })
            }
        };
        let pos = monomial(1);
        let neg = monomial(-1);
        let v = mb_integrals(cfg, p, vhat, &[&pos, &neg])?;
        let scale = v[0].value.norm().max(v[1].value.norm()).max(f64::MIN_POSITIVE);
        boxes.push((v[0].value - v[1].value).norm() / scale);
    }

    let one = |_: &[C64]| C64::one();
    let eulers: Vec<Box<Weight<'_>>> = (0..d).map(|i| Box::new(move |s: &[C64]| expo(i, s)) as Box<Weight<'_>>).collect();
    let mut refs: Vec<&Weight<'_>> = vec![&one];
    refs.extend(eulers.iter().map(|b| b.as_ref()));
    let v = mb_integrals(cfg, p, vhat, &refs)?;
    let m = v[0].value;
    let euler = (0..cfg.m())
        .map(|k| {
            let mut sum = -alpha[k] * m;
            let mut scale = (alpha[k] * m).norm();
            for i in 0..d {
                let t = v[i + 1].value * cfg.a_col(i)[k] as f64;
                sum += t;
                scale += t.norm();
            }
            sum.norm() / scale.max(f64::MIN_POSITIVE)
        })
        .collect();
    Ok(GkzResidual { boxes, euler })
}

/// Deterministic admissible full variables: `B Re vhat` in `shrink * Delta`.
pub fn admissible_points(cfg: &WeightConfig, count: usize, shrink: f64, seed: u64) -> Vec<Vec<C64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let z = zonotope(cfg);
    let hw: Vec<f64> = z.half_widths().iter().map(to_f64).collect();
    let (n, d) = (cfg.n(), cfg.d());
    let mut out = Vec::new();
    while out.len() < count {
        let y: Vec<f64> = hw.iter().map(|h| rng.random_range(-h..*h) * shrink).collect();
        let inside = z.facets.iter().all(|(l, c)| dot_f(l, &y) < shrink * to_f64(c));
        if !inside {
            continue;
        }
        let u: Vec<f64> = (0..d).map(|_| rng.random_range(-0.5..0.5)).collect();
        let bu: Vec<f64> = (0..n).map(|k| (0..d).map(|j| cfg.b_col(j)[k] as f64 * u[j]).sum()).collect();
        let corr: Vec<C64> = y.iter().zip(&bu).map(|(a, b)| C64::new(a - b, 0.0)).collect();
        let base = iota_c(cfg, &corr);
        out.push((0..d).map(|j| C64::new(base[j].re + u[j], rng.random_range(-0.5..0.5))).collect());
    }
    out
}

// ---------------------------------------------------------------------------
// Gamma series at infinity

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesParams {
    /// Indices `I` with `(b_i)_{i in I}` a basis.
    pub subset: Vec<usize>,
    /// `A gamma = alpha` with `gamma_i` integral for `i in I`.
    pub gamma: Vec<C64>,
    /// `iota^T gamma` in `C^n`.
    pub iota_gamma: Vec<C64>,
    /// Lattice truncation `|l|_inf <= truncation`.
    pub truncation: usize,
}

fn solve_rat(m: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.iter().zip(rhs).map(|(r, b)| r.iter().cloned().chain([b.clone()]).collect()).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let pv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= pv.clone();
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..=n {
                    let t = f.clone() * a[c][k].clone();
                    a[r][k] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

/// Subsets `I` with `rho` a strictly positive combination of `(b_i)_{i in I}`.
pub fn convergence_subsets(cfg: &WeightConfig, rho: &[Rat]) -> Vec<Vec<usize>> {
    let n = cfg.n();
    subsets(cfg.d(), n)
        .into_iter()
        .filter(|s| {
            let m: Vec<Vec<Rat>> = (0..n).map(|k| s.iter().map(|&i| rat(cfg.b_col(i)[k], 1)).collect()).collect();
            solve_rat(&m, rho).is_some_and(|beta| beta.iter().all(|b| b.is_positive()))
        })
        .collect()
}

fn det_i64(m: &[Vec<i64>]) -> i64 {
    let r: Vec<Vec<i64>> = m.to_vec();
    to_i64(&crate::exactlat::IntMatrix::from_rows(&r, r.len()).det())
}

/// The multiset of series parameters for direction `rho`.
pub fn series_basis(cfg: &WeightConfig, rho: &[Rat], alpha: &[C64], truncation: usize) -> Result<Vec<SeriesParams>, AnalyticError> {
    if !is_generic(cfg, rho) {
        return Err(AnalyticError::NotGeneric(rho.iter().map(to_f64).collect()));
    }
    if !is_totally_nonresonant(cfg, alpha) {
        return Err(AnalyticError::NotTotallyNonResonant);
    }
    let n = cfg.n();
    let g0 = gamma_of_alpha(cfg, alpha);
    let mut out = Vec::new();
    for s in convergence_subsets(cfg, rho) {
        // Solve B_I^T t = k - gamma0_I for t; residues k mod B_I^T Z^n.
        let bt: Vec<Vec<i64>> = s.iter().map(|&i| cfg.b_col(i).to_vec()).collect();
        let det = det_i64(&bt).abs();
        let inv: Vec<Vec<f64>> = {
            let m: Vec<Vec<Rat>> = bt.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
            (0..n)
                .map(|c| {
                    let e: Vec<Rat> = (0..n).map(|r| rat(i64::from(r == c), 1)).collect();
                    solve_rat(&m, &e).unwrap()
                })
                .map(|col| col.iter().map(to_f64).collect::<Vec<f64>>())
                .collect()
        };
        // inv[c] is column c of (B_I^T)^{-1}.
        let mut reps: Vec<Vec<i64>> = Vec::new();
        let total = (det as usize).pow(n as u32);
        for mut code in 0..total {
            let k: Vec<i64> = (0..n)
                .map(|_| {
                    let v = (code % det as usize) as i64;
                    code /= det as usize;
                    v
                })
                .collect();
            let same = reps.iter().any(|r| {
                (0..n).all(|row| {
                    let v: f64 = (0..n).map(|c| inv[c][row] * (k[c] - r[c]) as f64).sum();
                    (v - v.round()).abs() < 1e-9
                })
            });
            if !same {
                reps.push(k);
            }
        }
        for k in reps {
            let t: Vec<C64> = (0..n)
                .map(|row| (0..n).map(|c| (C64::new(k[c] as f64, 0.0) - g0[s[c]]) * inv[c][row]).sum())
                .collect();
            let mut gamma: Vec<C64> = (0..cfg.d()).map(|j| g0[j] + dot_c(cfg.b_col(j), &t)).collect();
            for &i in &s {
                gamma[i] = C64::new(gamma[i].re.round(), 0.0);
            }
            let si = cfg.s_iota();
            let iota_gamma = (0..n)
                .map(|c| (0..cfg.d()).map(|j| gamma[j] * to_i64(si.get(j, c)) as f64).sum())
                .collect();
            out.push(SeriesParams { subset: s.clone(), gamma, iota_gamma, truncation });
        }
    }
    Ok(out)
}

/// Partial sum of `Phihat_gamma(x)` over `|l|_inf <= truncation`.
pub fn evaluate_series(cfg: &WeightConfig, sp: &SeriesParams, x: &[C64]) -> Result<Estimate, AnalyticError> {
    let n = cfg.n();
    let big_l = sp.truncation as i64;
    let mut shells = vec![0.0f64; sp.truncation + 1];
    let mut sum = C64::zero();
    let mut l = vec![-big_l; n];
    loop {
        let mut logt = 2.0 * PI * I * (0..n).map(|k| x[k] * (C64::new(l[k] as f64, 0.0) + sp.iota_gamma[k])).sum::<C64>();
        let mut zero = false;
        for j in 0..cfg.d() {
            let z = sp.gamma[j] + crate::rational::dot_i64(cfg.b_col(j), &l) as f64 + 1.0;
            // Integral gamma entries are stored rounded, so this test is exact.
            if is_gamma_pole(z) {
                zero = true;
                break;
            }
            logt -= ln_gamma(z);
        }
        if !zero {
            let t = logt.exp();
            sum += t;
            let shell = l.iter().map(|v| v.unsigned_abs() as usize).max().unwrap_or(0);
            shells[shell] = shells[shell].max(t.norm());
        }
        let mut k = 0;
        loop {
            if k == n {
                let last = shells[sp.truncation];
                let prev = if sp.truncation > 0 { shells[sp.truncation - 1] } else { 0.0 };
                if last > 1e-6 * sum.norm() && last >= prev {
                    return Err(AnalyticError::Diverging { truncation: sp.truncation });
                }
                return Ok(Estimate { value: sum, error: last * 2.0 });
            }
            l[k] += 1;
            if l[k] <= big_l {
                break;
            }
            l[k] = -big_l;
            k += 1;
        }
    }
}

/// `|Im x|` beyond which the `n = 1` series in direction `sign` converge.
pub fn series_threshold(cfg: &WeightConfig, sign: i64) -> f64 {
    let s: f64 = cfg.b_cols().iter().map(|b| b[0] as f64 * (b[0].abs() as f64).ln()).sum();
    (-(sign as f64) * s / (2.0 * PI)).max(0.0)
}

// ---------------------------------------------------------------------------
// Connection and numeric monodromy

#[derive(Clone, Debug)]
pub struct ConnectionOptions {
    pub quadrature: Quadrature,
    pub truncation: usize,
    /// Sample points per basis element (at least 2).
    pub oversample: usize,
}

impl Default for ConnectionOptions {
    fn default() -> Self {
        ConnectionOptions { quadrature: Quadrature::default(), truncation: 60, oversample: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct Connection {
    /// Rows: `L_C` (sorted).
    pub labels: Vec<Label>,
    pub series: Vec<SeriesParams>,
    /// `coeffs[(chi, I)]` with `Mhat_chi = sum_I c_{chi,I} Phihat_I`.
    pub coeffs: DMatrix<C64>,
    /// Relative least-squares residual.
    pub residual: f64,
    /// `max |c_{chi,I} exp(2 pi i <chi, iota gamma_I>) / a_I - 1|`.
    pub factorization_residual: f64,
    pub condition: f64,
}

/// Open interval of an `n = 1` chamber.
pub fn chamber_interval(fc: &FaceComplex, c: &[i64]) -> (f64, f64) {
    let k = (c[0] - 1).div_euclid(2);
    let lo = to_f64(&fc.offsets[0]) + k as f64;
    (lo, lo + 1.0)
}

fn lstsq(a: &DMatrix<C64>, b: &DVector<C64>) -> DVector<C64> {
    a.clone().svd(true, true).solve(b, 1e-14).expect("svd with vectors")
}

/// Expansion of `M_C` in the series basis at direction `sign in {+1,-1}`.
pub fn connection_matrix(
    cfg: &WeightConfig,
    fc: &FaceComplex,
    c: &[i64],
    sign: i64,
    alpha: &[C64],
    opts: &ConnectionOptions,
) -> Result<Connection, AnalyticError> {
    if cfg.n() != 1 {
        return Err(AnalyticError::Unsupported(cfg.n()));
    }
    let p = MbParams::for_alpha(cfg, alpha, opts.quadrature.clone())?;
    let series = series_basis(cfg, &[rat(sign, 1)], alpha, opts.truncation)?;
    let labels = chamber_labels(fc, c, Side::Analytic);
    let (lo, hi) = chamber_interval(fc, c);
    let base = series_threshold(cfg, sign) + 0.5;
    let count = (opts.oversample.max(2) * series.len()).max(2);
    let pts: Vec<C64> = (0..count)
        .map(|k| {
            let f = (k as f64 + 0.5) / count as f64;
            let re = lo + (hi - lo) * (0.2 + 0.6 * f);
            let im = base + 0.5 * ((k * 7) % count) as f64 / count as f64;
            C64::new(re, sign as f64 * im)
        })
        .collect();
    let mut a = DMatrix::<C64>::zeros(count, series.len());
    for (r, x) in pts.iter().enumerate() {
        for (ci, sp) in series.iter().enumerate() {
            a[(r, ci)] = evaluate_series(cfg, sp, &[*x])?.value;
        }
    }
    // Scale columns to unit norm before solving.
    let norms: Vec<f64> = (0..series.len()).map(|ci| a.column(ci).norm().max(f64::MIN_POSITIVE)).collect();
    let mut an = a.clone();
    for (ci, nm) in norms.iter().enumerate() {
        an.column_mut(ci).scale_mut(1.0 / nm);
    }
    let sv = an.clone().svd(false, false).singular_values;
    let condition = sv.max() / sv.min().max(f64::MIN_POSITIVE);
    if !condition.is_finite() || condition > 1e10 {
        return Err(AnalyticError::IllConditioned { condition });
    }
    let mut coeffs = DMatrix::<C64>::zeros(labels.len(), series.len());
    let mut residual: f64 = 0.0;
    for (ri, chi) in labels.iter().enumerate() {
        let b = DVector::from_iterator(
            count,
            pts.iter().map(|x| evaluate_mb(cfg, &p, &[*x - chi[0] as f64]).map(|e| e.value)).collect::<Result<Vec<_>, _>>()?,
        );
        let sol = lstsq(&an, &b);
        residual = residual.max((&an * &sol - &b).norm() / b.norm().max(f64::MIN_POSITIVE));
        for ci in 0..series.len() {
            coeffs[(ri, ci)] = sol[ci] / norms[ci];
        }
    }
    let factorization_residual = factorization_residual(&labels, &series, &coeffs);
    Ok(Connection { labels, series, coeffs, residual, factorization_residual, condition })
}

/// Deviation of `c_{chi,I}` from `exp(-2 pi i <chi, iota gamma_I>) a_I`.
pub fn factorization_residual(labels: &[Label], series: &[SeriesParams], coeffs: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for (ci, sp) in series.iter().enumerate() {
        let untwist = |ri: usize| {
            let chi = &labels[ri];
            let ph: C64 = chi.iter().zip(&sp.iota_gamma).map(|(a, g)| g * *a as f64).sum();
            coeffs[(ri, ci)] * (2.0 * PI * I * ph).exp()
        };
        let a0 = untwist(0);
        for ri in 1..labels.len() {
            worst = worst.max((untwist(ri) - a0).norm() / a0.norm().max(f64::MIN_POSITIVE));
        }
    }
    worst
}

/// Transfer matrix of the continuation `C1 -> C2` through the half plane on
/// the positive side of the wall. Columns `L_{C1}`, rows `L_{C2}`.
pub fn numeric_wall_matrix(
    cfg: &WeightConfig,
    fc: &FaceComplex,
    c1: &[i64],
    c2: &[i64],
    alpha: &[C64],
    opts: &ConnectionOptions,
) -> Result<LabeledMatrix<C64>, AnalyticError> {
    if cfg.n() != 1 {
        return Err(AnalyticError::Unsupported(cfg.n()));
    }
    let w = fc.common_wall(c1, c2).ok_or_else(|| AnalyticError::NotAdjacent(c1.to_vec(), c2.to_vec()))?;
    let (i, s) = fc.wall_orientation(&w, c2).map_err(|_| AnalyticError::NotAdjacent(c1.to_vec(), c2.to_vec()))?;
    let sign = s * fc.directions[i][0].signum();
    let k1 = connection_matrix(cfg, fc, c1, sign, alpha, opts)?;
    let k2 = connection_matrix(cfg, fc, c2, sign, alpha, opts)?;
    let inv = k2.coeffs.clone().try_inverse().ok_or(AnalyticError::IllConditioned { condition: f64::INFINITY })?;
    let t = (&k1.coeffs * inv).transpose();
    let mut m = LabeledMatrix::zeros(k2.labels.clone(), k1.labels.clone());
    for (r, row) in k2.labels.iter().enumerate() {
        for (c, col) in k1.labels.iter().enumerate() {
            m.add_to(row, col, &t[(r, c)]).expect("labels");
        }
    }
    Ok(m)
}

/// Maximum entrywise deviation relative to the largest entry of `reference`.
pub fn relative_gap(a: &LabeledMatrix<C64>, reference: &LabeledMatrix<C64>) -> f64 {
    let scale = reference.entries.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for r in &reference.row_labels {
        for c in &reference.col_labels {
            let x = a.get(r, c).copied().unwrap_or(C64::new(f64::NAN, 0.0));
            worst = worst.max((x - reference.get(r, c).unwrap()).norm() / scale);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::face_complex;
    use crate::instances::{gauss, two_one_one};
    use crate::schober_k0::wall_crossing_matrix_at;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn alpha0() -> Vec<C64> {
        vec![c(-0.3, 0.0), c(-0.4, 0.0), c(-0.2, 0.0)]
    }

    #[test]
    fn gamma_matches_factorials_and_reflection() {
        let mut f = 1.0;
        for k in 1..15 {
            assert!((gamma(c(k as f64, 0.0)).re - f).abs() / f < 1e-13);
            f *= k as f64;
        }
        assert!((gamma(c(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-14);
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        for z in [c(0.3, 2.0), c(-2.7, -5.0), c(0.1, 60.0)] {
            let lhs = (ln_gamma(z) + ln_gamma(C64::one() - z)).exp();
            let rhs = PI / (z * PI).sin();
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-12, "{z}");
        }
        // Recurrence at a complex point.
        let z = c(-3.4, 1.7);
        assert!((gamma(z + 1.0) - z * gamma(z)).norm() / gamma(z + 1.0).norm() < 1e-13);
        assert_eq!(rgamma(c(-3.0, 0.0)), C64::zero());
        assert_eq!(rgamma(c(0.0, 0.0)), C64::zero());
    }

    #[test]
    fn gauss_sigma_is_centred() {
        let cfg = gauss();
        let g = gamma_of_alpha(&cfg, &alpha0());
        let want = [0.0, -0.2, -0.3, -0.2];
        for (a, b) in g.iter().zip(want) {
            assert!((a.re - b).abs() < 1e-12);
        }
        let s = choose_sigma(&cfg, &g).unwrap();
        assert!((s[0] + 0.1).abs() < 1e-9);
        let neg = vec![c(-0.5, 0.0); 4];
        assert!(choose_sigma(&cfg, &neg).is_ok());
        // Re gamma_1 + Re gamma_3 >= 0 cannot be fixed since b_1 = -b_3.
        let bad = vec![c(0.2, 0.0), c(-0.5, 0.0), c(-0.1, 0.0), c(-0.5, 0.0)];
        assert_eq!(choose_sigma(&cfg, &bad), Err(AnalyticError::Infeasible));
    }

    #[test]
    fn domain_and_pole_errors() {
        let cfg = gauss();
        let p = MbParams::for_alpha(&cfg, &alpha0(), Quadrature::default()).unwrap();
        assert!(matches!(evaluate_mb(&cfg, &p, &[c(1.2, 0.0)]), Err(AnalyticError::OutsideConvergenceDomain { .. })));
        let mut q = p.clone();
        q.sigma = vec![0.0];
        assert!(matches!(evaluate_mb(&cfg, &q, &[c(0.1, 0.0)]), Err(AnalyticError::PoleOnContour { index: 0, .. })));
    }

    #[test]
    fn quadrature_is_stable_and_sigma_independent() {
        let cfg = gauss();
        let p = MbParams::for_alpha(&cfg, &alpha0(), Quadrature::default()).unwrap();
        let x = [c(0.3, 0.5)];
        let a = evaluate_mb(&cfg, &p, &x).unwrap();
        let mut big = p.clone();
        big.quadrature = Quadrature { half_width: 80.0, nodes: 4000, panel_degree: 20 };
        let b = evaluate_mb(&cfg, &big, &x).unwrap();
        assert!((a.value - b.value).norm() <= a.error + b.error + 1e-14 * a.value.norm());
        let mut other = p.clone();
        other.sigma = vec![-0.05];
        let o = evaluate_mb(&cfg, &other, &x).unwrap();
        assert!((a.value - o.value).norm() <= a.error + o.error + 1e-12 * a.value.norm());
    }

    #[test]
    fn gauss_residuals_and_negative_control() {
        let cfg = gauss();
        let p = MbParams::for_alpha(&cfg, &alpha0(), Quadrature::default()).unwrap();
        for v in admissible_points(&cfg, 3, 0.7, 11) {
            let r = gkz_residual(&cfg, &p, &v).unwrap();
            assert!(r.max_box() < 1e-8, "{r:?}");
            assert!(r.max_euler() < 1e-10, "{r:?}");
        }
        let mut bad = p.clone();
        bad.sigma = vec![0.1];
        assert!(bad.margin(&cfg) < 0.0);
        let v = iota_c(&cfg, &[c(0.2, 0.3)]);
        assert!(gkz_residual(&cfg, &bad, &v).unwrap().max_box() > 1e-3);
    }

    #[test]
    fn transformation_law() {
        let cfg = gauss();
        let alpha = vec![c(-0.3, 0.1), c(-0.4, 0.0), c(-0.2, -0.05)];
        let p = MbParams::for_alpha(&cfg, &alpha, Quadrature::default()).unwrap();
        let v = admissible_points(&cfg, 1, 0.5, 3).remove(0);
        for w in [[1, 0, 0], [0, -1, 2], [1, 1, 1]] {
            assert!(transformation_law_residual(&cfg, &p, &v, &w).unwrap() < 1e-8);
        }
    }

    #[test]
    fn gauss_series_basis_and_periodicity() {
        let cfg = gauss();
        let up = series_basis(&cfg, &[rat(1, 1)], &alpha0(), 40).unwrap();
        assert_eq!(up.iter().map(|s| s.subset.clone()).collect::<Vec<_>>(), vec![vec![0], vec![1]]);
        let down = series_basis(&cfg, &[rat(-1, 1)], &alpha0(), 40).unwrap();
        assert_eq!(down.iter().map(|s| s.subset.clone()).collect::<Vec<_>>(), vec![vec![2], vec![3]]);
        assert!(matches!(series_basis(&cfg, &[rat(0, 1)], &alpha0(), 40), Err(AnalyticError::NotGeneric(_))));
        assert!(matches!(
            series_basis(&cfg, &[rat(1, 1)], &[c(-1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)], 40),
            Err(AnalyticError::NotTotallyNonResonant)
        ));
        let x = c(0.37, 0.8);
        for sp in &up {
            let a = evaluate_series(&cfg, sp, &[x]).unwrap().value;
            let b = evaluate_series(&cfg, sp, &[x + 2.0]).unwrap().value;
            let ph = (2.0 * PI * I * sp.iota_gamma[0] * 2.0).exp();
            assert!((b - ph * a).norm() / a.norm() < 1e-10);
            let mut short = sp.clone();
            short.truncation = 25;
            let s = evaluate_series(&cfg, &short, &[x]).unwrap().value;
            assert!((s - a).norm() / a.norm() < 1e-12);
        }
        let two = two_one_one();
        assert_eq!(series_basis(&two, &[rat(1, 1)], &alpha0()[..2], 40).unwrap().len(), 2);
        assert_eq!(series_basis(&two, &[rat(-1, 1)], &alpha0()[..2], 40).unwrap().len(), 2);
    }

    #[test]
    fn gauss_connection_and_wall() {
        let cfg = gauss();
        let fc = face_complex(&cfg, &rat(1, 1)).unwrap();
        let opts = ConnectionOptions::default();
        let c1 = vec![1];
        let c2 = vec![3];
        let k = connection_matrix(&cfg, &fc, &c1, 1, &alpha0(), &opts).unwrap();
        assert!(k.residual < 1e-10, "{}", k.residual);
        assert!(k.factorization_residual < 1e-6, "{}", k.factorization_residual);
        // The value at 0.5i against the fitted series expansion.
        let m = evaluate_mb(&cfg, &MbParams::for_alpha(&cfg, &alpha0(), Quadrature::default()).unwrap(), &[c(0.0, 0.5)])
            .unwrap()
            .value;
        let kk = connection_matrix(&cfg, &fc, &[-1], 1, &alpha0(), &opts).unwrap();
        let row = kk.labels.iter().position(|l| l == &vec![0]).unwrap();
        let bridged: C64 =
            kk.series.iter().enumerate().map(|(i, sp)| kk.coeffs[(row, i)] * evaluate_series(&cfg, sp, &[c(0.0, 0.5)]).unwrap().value).sum();
        assert!((m - bridged).norm() / m.norm() < 1e-8);

        let num = numeric_wall_matrix(&cfg, &fc, &c1, &c2, &alpha0(), &opts).unwrap();
        let exact = wall_crossing_matrix_at(&cfg, &fc, &c1, &c2, Side::Analytic, &alpha0()).unwrap();
        assert!(relative_gap(&num, &exact) < 1e-6, "{num:?} vs {exact:?}");
        let back = numeric_wall_matrix(&cfg, &fc, &c2, &c1, &alpha0(), &opts).unwrap();
        let exact_back = wall_crossing_matrix_at(&cfg, &fc, &c2, &c1, Side::Analytic, &alpha0()).unwrap();
        assert!(relative_gap(&back, &exact_back) < 1e-6);
    }
}
