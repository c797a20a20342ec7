//! Cross-module verification suite. Each check is independent, timed and
//! reported as passed, failed (with a witness) or skipped (with a reason).
//!
//! The suite checks the ingredients of the identification between the
//! analytic local system and the combinatorial datum: identical monodromy
//! on both sides, the union property for quotients and invertibility of the
//! specialized Poincare matrix for subobjects. It does not construct either
//! sheaf.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    admissible_points, connection_matrix, gkz_residual, numeric_wall_matrix, relative_gap, transformation_law_residual,
    ConnectionOptions, MbParams, Quadrature,
};
use crate::arrangement::{face_complex, union_check, FaceComplex};
use crate::exactlat::{IntMatrix, WeightConfig};
use crate::ksdata::LabeledMatrix;
use crate::ktheory::{
    dual_basis_check, phi_matrix, psi_invertible_over_localization, psi_matrix, specialization_invertibility, HilbertTable, KtError,
};
use crate::laurent::GroupRingElement;
use crate::rational::{rat, Rat};
use crate::resonance::{
    h_of_alpha, is_nonresonant, is_nonresonant_direct, is_totally_nonresonant, normalized_volume, re_in_negative_cone,
};
use crate::schober_k0::{
    build_ks_datum, equivariant, relation_suite_with, sides_agree, specialization_gap, wall_crossing_matrix, wall_crossing_matrix_at,
    LabelShift, SchoberError, Side, WallFn,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Status {
    Passed,
    Failed,
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// The statement this check realizes.
    pub reference: String,
    pub status: Status,
    /// Counterexample data; always present on failure.
    pub witness: Option<String>,
    pub detail: String,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub scope: String,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Failed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Failed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The report with all timings zeroed.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.millis = 0.0;
        }
        r
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub truncation: usize,
    pub fatten: Rat,
    pub seed: u64,
    /// Sample points for the residual checks.
    pub samples: usize,
    pub quadrature: Quadrature,
    /// Entrywise tolerance for numeric against exact wall matrices.
    pub monodromy_tol: f64,
    /// Relative tolerance for GKZ residuals and the transformation law.
    pub residual_tol: f64,
    /// Tolerance for the connection factorization.
    pub connection_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            truncation: 8,
            fatten: rat(1, 1),
            seed: 0,
            samples: 5,
            quadrature: Quadrature::default(),
            monodromy_tol: 1e-6,
            residual_tol: 1e-8,
            connection_tol: 1e-6,
        }
    }
}

pub enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn run(name: &str, reference: &str, f: impl FnOnce() -> Outcome) -> CheckResult {
    let t = Instant::now();
    let out = f();
    let millis = t.elapsed().as_secs_f64() * 1e3;
    let (status, witness, detail) = match out {
        Outcome::Pass(d) => (Status::Passed, None, d),
        Outcome::Fail(w) => (Status::Failed, Some(w), String::new()),
        Outcome::Skip(r) => (Status::Skipped { reason: r }, None, String::new()),
    };
    CheckResult { name: name.into(), reference: reference.into(), status, witness, detail, millis }
}

fn fail_on<E: std::fmt::Display>(r: Result<Outcome, E>) -> Outcome {
    r.unwrap_or_else(|e| Outcome::Fail(e.to_string()))
}

fn canonical_chambers(fc: &FaceComplex) -> Vec<Vec<i64>> {
    fc.chambers.iter().map(|&c| fc.faces[c].sign_vector.clone()).collect()
}

fn canonical_walls(fc: &FaceComplex) -> Vec<(Vec<i64>, Vec<i64>)> {
    canonical_chambers(fc).into_iter().flat_map(|c| fc.walls_of(&c).into_iter().map(move |(_, o)| (c.clone(), o))).collect()
}

/// `A B^T = 0`, `A K = I`, `S^T K = 0`, `B S = I` and `S B + A^T P = I`.
pub fn lattice_identities(cfg: &WeightConfig) -> Result<(), String> {
    let (n, d, m) = (cfg.n(), cfg.d(), cfg.m());
    if !cfg.a.mul(&cfg.b.transpose()).is_zero() {
        return Err("A B^T != 0".into());
    }
    if cfg.a.mul(cfg.k()) != IntMatrix::identity(m) {
        return Err("A K != I".into());
    }
    if !cfg.s_iota().transpose().mul(cfg.k()).is_zero() {
        return Err("S^T K != 0".into());
    }
    let sb = cfg.s_iota().mul(&cfg.b);
    let ap = cfg.a.transpose().mul(cfg.p());
    for i in 0..d {
        for j in 0..d {
            let v = sb.get(i, j) + ap.get(i, j);
            if v != crate::rational::int(i64::from(i == j)) {
                return Err(format!("(S B + A^T P)[{i}][{j}] = {v}"));
            }
        }
    }
    if cfg.b.mul(cfg.s_iota()) != IntMatrix::identity(n) {
        return Err("B S != I".into());
    }
    let flags = &cfg.flags;
    if !(flags.quasi_symmetric && flags.lattice_surjective && flags.zero_sum) {
        return Err(format!("{flags:?}"));
    }
    Ok(())
}

/// Groupoid relations with caller-supplied wall matrices.
pub fn relation_check(fc: &FaceComplex, side: Side, wall: &WallFn<'_>) -> CheckResult {
    run(&format!("groupoid relations ({side:?})"), "collinear triple and semidirect product relations", || {
        fail_on(relation_suite_with(fc, side, wall).map(|r| {
            if r.passed() {
                Outcome::Pass(format!("{} collinear, {} semidirect", r.collinear_checked, r.semidirect_checked))
            } else {
                Outcome::Fail(r.failures.join("; "))
            }
        }))
    })
}

fn sample_alpha(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|_| {
            if rng.random_bool(0.5) {
                Complex64::new(rng.random_range(-6..=6) as f64 / 2.0, 0.0)
            } else {
                Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-0.5..0.5))
            }
        })
        .collect()
}

/// Run every check. Failures are entries of the report, never errors.
pub fn run_suite(cfg: &WeightConfig, alpha: Option<&[Complex64]>, opts: &VerifyOptions) -> VerificationReport {
    let mut checks = Vec::new();
    checks.push(run("lattice identities", "Gale duality and splitting identities", || match lattice_identities(cfg) {
        Ok(()) => Outcome::Pass(format!("n = {}, d = {}", cfg.n(), cfg.d())),
        Err(e) => Outcome::Fail(e),
    }));

    let fc = match face_complex(cfg, &opts.fatten) {
        Ok(fc) => fc,
        Err(e) => {
            checks.push(run("face complex", "periodic hyperplane arrangement", || Outcome::Fail(e.to_string())));
            return VerificationReport { checks, scope: scope_note() };
        }
    };
    let chambers = canonical_chambers(&fc);
    let walls = canonical_walls(&fc);

    checks.push(run("union property", "lattice points of a face are the union over the chambers above it", || {
        for f in &fc.faces {
            if f.dim == fc.n {
                continue;
            }
            match union_check(&fc, &f.sign_vector) {
                Ok(true) => {}
                Ok(false) => return Outcome::Fail(format!("face {:?}", f.sign_vector)),
                Err(e) => return Outcome::Fail(e.to_string()),
            }
        }
        Outcome::Pass(format!("{} face classes", fc.faces.len() - chambers.len()))
    }));

    checks.push(run("wall images in target basis", "wall crossing maps the source basis into the target span", || {
        for (a, b) in &walls {
            for side in [Side::Analytic, Side::KTheory] {
                if let Err(e) = wall_crossing_matrix(cfg, &fc, a, b, side) {
                    return Outcome::Fail(format!("{a:?} -> {b:?} ({side:?}): {e}"));
                }
            }
        }
        Outcome::Pass(format!("{} walls", walls.len()))
    }));

    checks.push(run("rank equals volume", "chamber lattice-point count equals the normalized volume", || {
        let vol = normalized_volume(cfg);
        for c in &chambers {
            let k = fc.lattice_points(c).len() as i64;
            if k != vol {
                return Outcome::Fail(format!("chamber {c:?} has {k} points, volume {vol}"));
            }
        }
        Outcome::Pass(format!("rank {vol}"))
    }));

    checks.push(run("non-resonance oracles agree", "ray-based and facet-based non-resonance tests", || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..100 {
            let a = sample_alpha(&mut rng, cfg.m());
            if is_nonresonant(cfg, &a) != is_nonresonant_direct(cfg, &a) {
                return Outcome::Fail(format!("alpha = {a:?}"));
            }
        }
        Outcome::Pass("100 samples".into())
    }));

    for side in [Side::Analytic, Side::KTheory] {
        let wall = |a: &[i64], b: &[i64]| wall_crossing_matrix(cfg, &fc, a, b, side);
        checks.push(relation_check(&fc, side, &wall));
    }

    checks.push(run("sides agree", "analytic and K-theoretic wall crossings agree under chi -> -chi", || {
        for (a, b) in &walls {
            match sides_agree(cfg, &fc, a, b) {
                Ok(true) => {}
                Ok(false) => return Outcome::Fail(format!("{a:?} -> {b:?}")),
                Err(e) => return Outcome::Fail(e.to_string()),
            }
        }
        Outcome::Pass(format!("{} walls", walls.len()))
    }));

    let alpha_gate = alpha_gate(cfg, alpha);
    checks.push(run("specialization compatibility", "specializing the symbolic representation at h = exp(-2 pi i alpha)", || {
        let Some(a) = alpha else { return Outcome::Skip("no parameter given".into()) };
        fail_on((|| -> Result<Outcome, SchoberError> {
            let gap = specialization_gap(cfg, &fc, Side::Analytic, a)?.max(specialization_gap(cfg, &fc, Side::KTheory, a)?);
            Ok(if gap < 1e-9 { Outcome::Pass(format!("gap {gap:.2e}")) } else { Outcome::Fail(format!("gap {gap:e}")) })
        })())
    }));

    let table = HilbertTable::new(cfg, opts.truncation);
    checks.push(run("psi phi identity", "Poincare matrix times its inverse to the truncation order", || {
        for f in &fc.faces {
            let mut labels = fc.neg_lattice_points(&f.sign_vector);
            labels.sort();
            let psi = psi_matrix(&table, &labels);
            let phi = phi_matrix(&table, &labels);
            match psi.mul(&phi) {
                Ok(p) if p.is_identity() => {}
                Ok(_) => return Outcome::Fail(format!("face {:?}", f.sign_vector)),
                Err(e) => return Outcome::Fail(e.to_string()),
            }
        }
        Outcome::Pass(format!("{} faces, order {}", fc.faces.len(), opts.truncation))
    }));

    checks.push(run("dual basis", "Euler pairing makes the simple classes dual to the projectives", || {
        for c in &chambers {
            let mut labels = fc.neg_lattice_points(c);
            labels.sort();
            if !dual_basis_check(cfg, &labels, opts.truncation) {
                return Outcome::Fail(format!("chamber {c:?}"));
            }
        }
        Outcome::Pass(format!("{} chambers", chambers.len()))
    }));

    checks.push(run("invertible after localizing", "det of the exact Poincare matrix is a unit after inverting F", || {
        for c in &chambers {
            let mut labels = fc.neg_lattice_points(c);
            labels.sort();
            match psi_invertible_over_localization(cfg, &labels) {
                Ok(true) => {}
                Ok(false) => return Outcome::Fail(format!("chamber {c:?}")),
                Err(KtError::TriangulationTooLarge(_)) => return Outcome::Skip("exact mode too large".into()),
                Err(e) => return Outcome::Fail(e.to_string()),
            }
        }
        Outcome::Pass(format!("{} chambers", chambers.len()))
    }));

    checks.push(run("specialized invertibility", "Poincare matrix at a non-resonant parameter is finite and invertible", || {
        let Some(a) = alpha else { return Outcome::Skip("no parameter given".into()) };
        if !is_nonresonant(cfg, a) {
            return Outcome::Skip("parameter is resonant".into());
        }
        let h = h_of_alpha(a);
        for c in &chambers {
            let mut labels = fc.neg_lattice_points(c);
            labels.sort();
            match specialization_invertibility(cfg, &labels, &h) {
                Ok(r) if r.invertible => {}
                Ok(r) => return Outcome::Fail(format!("chamber {c:?}: det {} condition {:e}", r.det, r.condition)),
                Err(KtError::TriangulationTooLarge(_)) => return Outcome::Skip("exact mode too large".into()),
                Err(e) => return Outcome::Fail(format!("chamber {c:?}: {e}")),
            }
        }
        Outcome::Pass(format!("{} chambers", chambers.len()))
    }));

    checks.push(run("datum axioms", "monodromy, inverse and transitivity axioms with lattice equivariance", || {
        fail_on(build_ks_datum(cfg, &fc, opts.truncation).map(|(ks, rep)| {
            if !rep.koszul_mismatches.is_empty() {
                return Outcome::Fail(format!("Koszul and adjoint maps differ on {:?}", rep.koszul_mismatches));
            }
            let ax = ks.check_axioms(1e-9);
            if let Some(v) = ax.violations.first() {
                return Outcome::Fail(format!("{}: {:?} {}", v.axiom, v.faces, v.detail));
            }
            let shift = LabelShift { fc: &fc };
            let eq = equivariant(ks, &shift).check_equivariance(1e-9);
            if let Some(v) = eq.first() {
                return Outcome::Fail(format!("{}: {:?} {}", v.axiom, v.faces, v.detail));
            }
            Outcome::Pass(format!(
                "m {}, i {}, t {}, functoriality {}",
                ax.checked_m, ax.checked_i, ax.checked_t, ax.checked_functoriality
            ))
        }))
    }));

    let numeric = |name: &str, reference: &str, f: &dyn Fn(&[Complex64]) -> Outcome| {
        run(name, reference, || match (&alpha_gate, alpha) {
            (Err(r), _) => Outcome::Skip(r.clone()),
            (Ok(()), Some(a)) => f(a),
            (Ok(()), None) => Outcome::Skip("no parameter given".into()),
        })
    };

    checks.push(numeric("gkz residuals", "the contour integral is annihilated by box and Euler operators", &|a| {
        fail_on((|| {
            let p = MbParams::for_alpha(cfg, a, opts.quadrature.clone())?;
            let mut worst = (0.0f64, 0.0f64);
            for v in admissible_points(cfg, opts.samples, 0.8, opts.seed) {
                let r = gkz_residual(cfg, &p, &v)?;
                worst = (worst.0.max(r.max_box()), worst.1.max(r.max_euler()));
                if r.max_box() >= opts.residual_tol || r.max_euler() >= opts.residual_tol {
                    return Ok(Outcome::Fail(format!("vhat = {v:?}: {r:?}")));
                }
            }
            Ok::<_, crate::analytic::AnalyticError>(Outcome::Pass(format!("box {:.1e}, euler {:.1e}", worst.0, worst.1)))
        })())
    }));

    checks.push(numeric("transformation law", "shifting by A^T w multiplies by exp(2 pi i <w, alpha>)", &|a| {
        fail_on((|| {
            let p = MbParams::for_alpha(cfg, a, opts.quadrature.clone())?;
            let v = admissible_points(cfg, 1, 0.6, opts.seed ^ 0x5eed).remove(0);
            let mut worst: f64 = 0.0;
            for k in 0..cfg.m().min(3) {
                let w: Vec<i64> = (0..cfg.m()).map(|j| if j == k { 1 } else { (j as i64) % 2 }).collect();
                let r = transformation_law_residual(cfg, &p, &v, &w)?;
                worst = worst.max(r);
                if r >= opts.residual_tol {
                    return Ok(Outcome::Fail(format!("w = {w:?}: {r:e}")));
                }
            }
            Ok::<_, crate::analytic::AnalyticError>(Outcome::Pass(format!("{worst:.1e}")))
        })())
    }));

    let copts = ConnectionOptions { quadrature: opts.quadrature.clone(), ..ConnectionOptions::default() };
    checks.push(numeric("connection structure", "coefficients factor as exp(-2 pi i <chi, iota gamma_I>) a_I", &|a| {
        let mut worst: f64 = 0.0;
        for c in &chambers {
            for sign in [1, -1] {
                match connection_matrix(cfg, &fc, c, sign, a, &copts) {
                    Ok(k) if k.factorization_residual < opts.connection_tol => worst = worst.max(k.factorization_residual),
                    Ok(k) => return Outcome::Fail(format!("chamber {c:?}, direction {sign}: {:e}", k.factorization_residual)),
                    Err(e) => return Outcome::Fail(format!("chamber {c:?}, direction {sign}: {e}")),
                }
            }
        }
        Outcome::Pass(format!("{worst:.1e}"))
    }));

    checks.push(numeric("numeric monodromy", "continued contour integrals reproduce the exact wall crossings", &|a| {
        let mut worst: f64 = 0.0;
        for (c1, c2) in &walls {
            let exact = match wall_crossing_matrix_at(cfg, &fc, c1, c2, Side::Analytic, a) {
                Ok(m) => m,
                Err(e) => return Outcome::Fail(e.to_string()),
            };
            match numeric_wall_matrix(cfg, &fc, c1, c2, a, &copts) {
                Ok(m) => {
                    let g = relative_gap(&m, &exact);
                    worst = worst.max(g);
                    if g >= opts.monodromy_tol {
                        return Outcome::Fail(format!("{c1:?} -> {c2:?}: gap {g:e}\nnumeric {}\nexact {}", fmt_c(&m), fmt_c(&exact)));
                    }
                }
                Err(e) => return Outcome::Fail(format!("{c1:?} -> {c2:?}: {e}")),
            }
        }
        Outcome::Pass(format!("{} walls, gap {worst:.1e}", walls.len()))
    }));

    VerificationReport { checks, scope: scope_note() }
}

fn fmt_c(m: &LabeledMatrix<Complex64>) -> String {
    format!("{:?}", m.entries.iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

/// Reason the numeric checks cannot run, if any.
pub fn alpha_gate(cfg: &WeightConfig, alpha: Option<&[Complex64]>) -> Result<(), String> {
    let Some(a) = alpha else { return Err("no parameter given".into()) };
    if cfg.n() != 1 {
        return Err(format!("numeric continuation is implemented for rank one only (n = {})", cfg.n()));
    }
    if a.iter().all(|z| z.im == 0.0 && z.re.fract() == 0.0) {
        return Err("parameter is integral".into());
    }
    if !is_totally_nonresonant(cfg, a) {
        return Err("parameter is not totally non-resonant".into());
    }
    if !re_in_negative_cone(cfg, a) {
        return Err("Re alpha is outside the open negative cone".into());
    }
    Ok(())
}

fn scope_note() -> String {
    "checks the ingredients of the identification (equal monodromy, union property, specialized invertibility); \
     the sheaves themselves are not constructed"
        .into()
}

/// Convenience for tests: a copy of a wall provider with one entry altered.
pub fn corrupt_wall<'a>(
    cfg: &'a WeightConfig,
    fc: &'a FaceComplex,
    side: Side,
    target: (Vec<i64>, Vec<i64>),
) -> impl Fn(&[i64], &[i64]) -> Result<LabeledMatrix<GroupRingElement>, SchoberError> + 'a {
    move |a: &[i64], b: &[i64]| {
        let mut m = wall_crossing_matrix(cfg, fc, a, b, side)?;
        if a == target.0.as_slice() && b == target.1.as_slice() {
            m.entries[0][0] = &m.entries[0][0] + &GroupRingElement::one();
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gauss, pair};

    fn alpha0() -> Vec<Complex64> {
        vec![Complex64::new(-0.3, 0.0), Complex64::new(-0.4, 0.0), Complex64::new(-0.2, 0.0)]
    }

    #[test]
    fn gauss_passes_everything() {
        let cfg = gauss();
        let rep = run_suite(&cfg, Some(&alpha0()), &VerifyOptions::default());
        for c in &rep.checks {
            assert_eq!(c.status, Status::Passed, "{c:?}");
        }
    }

    #[test]
    fn integral_alpha_skips_dependent_checks() {
        let cfg = gauss();
        let a = vec![Complex64::new(-1.0, 0.0); 3];
        let rep = run_suite(&cfg, Some(&a), &VerifyOptions::default());
        assert!(rep.passed());
        for name in ["gkz residuals", "numeric monodromy", "specialized invertibility"] {
            assert!(matches!(rep.get(name).unwrap().status, Status::Skipped { .. }), "{name}");
        }
        assert_eq!(rep.get("rank equals volume").unwrap().status, Status::Passed);
    }

    #[test]
    fn corrupted_wall_is_reported_with_witness() {
        let cfg = gauss();
        let fc = face_complex(&cfg, &rat(1, 1)).unwrap();
        let c = canonical_chambers(&fc)[0].clone();
        let (_, other) = fc.walls_of(&c)[0].clone();
        let bad = corrupt_wall(&cfg, &fc, Side::Analytic, (c, other));
        let r = relation_check(&fc, Side::Analytic, &bad);
        assert_eq!(r.status, Status::Failed);
        assert!(r.witness.unwrap().contains("semidirect"));
    }

    #[test]
    fn reports_are_deterministic_and_serializable() {
        let cfg = pair();
        let a = vec![Complex64::new(-0.37, 0.0)];
        let r1 = run_suite(&cfg, Some(&a), &VerifyOptions::default()).without_timing();
        let r2 = run_suite(&cfg, Some(&a), &VerifyOptions::default()).without_timing();
        assert_eq!(r1, r2);
        let js = serde_json::to_string(&r1).unwrap();
        let back: VerificationReport = serde_json::from_str(&js).unwrap();
        assert_eq!(back, r1);
    }
}
