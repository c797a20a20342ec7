use std::fmt;

use gkz_core::analytic::{
    admissible_points, connection_matrix, evaluate_mb_full, gkz_residual, numeric_wall_matrix, relative_gap, transformation_law_residual,
    ConnectionOptions, MbParams,
};
use gkz_core::arrangement::{compute_zeta, f_vector, face_complex, union_check, FaceComplex};
use gkz_core::exactlat::normal_forms;
use gkz_core::ksdata::{Generator, Label, SignVector};
use gkz_core::ktheory::{
    dual_basis_check, pairing_gram, phi_matrix, psi_invertible_over_localization, psi_matrix, specialization_invertibility,
    HilbertTable,
};
use gkz_core::rational::to_i64;
use gkz_core::resonance::{
    f_element, f_factors, h_of_alpha, is_nonresonant, is_totally_nonresonant, normalized_volume, re_in_negative_cone,
};
use gkz_core::schober_k0::{build_monodromy_rep, build_monodromy_rep_at, sides_agree, specialization_gap, Side};
use gkz_core::verify::run_suite;
use gkz_core::WeightConfig;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::instance::{InstanceError, InstanceFile};
use crate::schema::{self, Complex, Matrix, Poly, Series};

pub const EXIT_INVALID: i32 = 1;
pub const EXIT_COMPUTATION: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Validate,
    Arrangement,
    Monodromy,
    Ktheory,
    Numeric,
    Verify,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// `"<module> error: <Variant>: <message>"`.
pub fn module_error<E: fmt::Debug + fmt::Display>(module: &str, e: &E, code: i32) -> CliError {
    let dbg = format!("{e:?}");
    let variant: String = dbg.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
    CliError { code, message: format!("{module} error: {variant}: {e}") }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        match e {
            InstanceError::Config(e) => module_error("exactlat", &e, EXIT_INVALID),
            InstanceError::Shape(m) => CliError { code: EXIT_INVALID, message: format!("instance error: BadShape: {m}") },
            InstanceError::Alpha(m) => CliError { code: EXIT_INVALID, message: format!("instance error: BadAlpha: {m}") },
        }
    }
}

/// Result of a command and whether it represents a passing verification.
pub struct Run {
    pub result: Value,
    pub passed: bool,
}

fn ok<T: Serialize>(v: &T) -> Result<Run, CliError> {
    let result = serde_json::to_value(v).map_err(|e| CliError { code: EXIT_COMPUTATION, message: format!("serialization: {e}") })?;
    Ok(Run { result, passed: true })
}

pub fn execute(cmd: Command, inst: &InstanceFile, seed: u64) -> Result<Run, CliError> {
    let cfg = inst.config()?;
    let alpha = inst.alpha(&cfg)?;
    match cmd {
        Command::Validate => ok(&validate(&cfg)),
        Command::Arrangement => ok(&arrangement(&cfg, &complex_of(&cfg, inst)?)?),
        Command::Monodromy => ok(&monodromy(&cfg, &complex_of(&cfg, inst)?, alpha.as_deref())?),
        Command::Ktheory => ok(&ktheory(&cfg, &complex_of(&cfg, inst)?, inst.truncation, alpha.as_deref())?),
        Command::Numeric => {
            let alpha = alpha.ok_or(CliError { code: EXIT_INVALID, message: "instance error: MissingAlpha: numeric needs alpha".into() })?;
            ok(&numeric(&cfg, &complex_of(&cfg, inst)?, inst, &alpha, seed)?)
        }
        Command::Verify => {
            let report = run_suite(&cfg, alpha.as_deref(), &inst.verify_options(seed));
            let mut run = ok(&report)?;
            run.passed = report.passed();
            Ok(run)
        }
    }
}

fn complex_of(cfg: &WeightConfig, inst: &InstanceFile) -> Result<FaceComplex, CliError> {
    face_complex(cfg, &inst.fatten_rat()).map_err(|e| module_error("arrangement", &e, EXIT_COMPUTATION))
}

fn canonical_chambers(fc: &FaceComplex) -> Vec<SignVector> {
    fc.chambers.iter().map(|&c| fc.faces[c].sign_vector.clone()).collect()
}

fn sorted(mut v: Vec<Label>) -> Vec<Label> {
    v.sort();
    v
}

// validate ---------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    pub h_cov: Vec<i64>,
    pub theta: Vec<i64>,
    pub smith_diagonal: Vec<i64>,
    pub quasi_symmetric: bool,
    pub lattice_surjective: bool,
    pub zero_sum: bool,
    pub normalized_volume: i64,
}

pub fn validate(cfg: &WeightConfig) -> ValidateReport {
    ValidateReport {
        n: cfg.n(),
        d: cfg.d(),
        m: cfg.m(),
        b: cfg.b.to_rows_i64(),
        h_cov: cfg.h_cov.clone(),
        theta: cfg.theta(),
        smith_diagonal: normal_forms(&cfg.b).smith.diagonal().iter().map(to_i64).collect(),
        quasi_symmetric: cfg.flags.quasi_symmetric,
        lattice_surjective: cfg.flags.lattice_surjective,
        zero_sum: cfg.flags.zero_sum,
        normalized_volume: normalized_volume(cfg),
    }
}

// arrangement ------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceJson {
    pub dim: usize,
    pub sign_vector: SignVector,
    pub representative: Vec<String>,
    pub lattice_points: Vec<Label>,
    pub neg_lattice_points: Vec<Label>,
    /// Union property; only reported for non-chamber faces.
    pub union_property: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallJson {
    pub from: SignVector,
    pub to: SignVector,
    pub wall: SignVector,
    pub j_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaJson {
    pub weights: Vec<(i64, Vec<i64>)>,
    pub exp_2pi_i_zeta: Vec<f64>,
    pub is_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrangementReport {
    pub directions: Vec<Vec<i64>>,
    pub offsets: Vec<String>,
    pub zonotope_half_widths: Vec<String>,
    pub f_vector: Vec<(usize, usize)>,
    pub faces: Vec<FaceJson>,
    pub walls: Vec<WallJson>,
    pub zeta: ZetaJson,
}

pub fn arrangement(cfg: &WeightConfig, fc: &FaceComplex) -> Result<ArrangementReport, CliError> {
    let err = |e| module_error("arrangement", &e, EXIT_COMPUTATION);
    let mut faces = Vec::new();
    for f in &fc.faces {
        let t = &f.sign_vector;
        faces.push(FaceJson {
            dim: f.dim,
            sign_vector: t.clone(),
            representative: schema::rationals(&f.representative),
            lattice_points: sorted(fc.lattice_points(t)),
            neg_lattice_points: sorted(fc.neg_lattice_points(t)),
            union_property: if f.dim < fc.n { Some(union_check(fc, t).map_err(err)?) } else { None },
        });
    }
    let mut walls = Vec::new();
    for c in canonical_chambers(fc) {
        for (w, other) in fc.walls_of(&c) {
            let j_set = fc.wall_set(cfg, &w, &other).map_err(err)?;
            walls.push(WallJson { from: c.clone(), to: other, wall: w, j_set });
        }
    }
    let z = compute_zeta(cfg);
    Ok(ArrangementReport {
        directions: fc.directions.clone(),
        offsets: schema::rationals(&fc.offsets),
        zonotope_half_widths: schema::rationals(&fc.zonotope.half_widths()),
        f_vector: f_vector(fc).into_iter().collect(),
        faces,
        walls,
        zeta: ZetaJson { is_zero: z.is_zero(), weights: z.weights, exp_2pi_i_zeta: z.exp_2pi_i_zeta },
    })
}

// monodromy --------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorJson {
    Wall { from: SignVector, to: SignVector },
    Translation { mu: Vec<i64>, chamber: SignVector },
}

impl From<&Generator> for GeneratorJson {
    fn from(g: &Generator) -> Self {
        match g {
            Generator::Wall { from, to } => GeneratorJson::Wall { from: from.clone(), to: to.clone() },
            Generator::Translation { mu, chamber } => GeneratorJson::Translation { mu: mu.clone(), chamber: chamber.clone() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMatrix<T> {
    pub generator: GeneratorJson,
    pub matrix: Matrix<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChamberJson {
    pub sign_vector: SignVector,
    pub labels: Vec<Label>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Specialized {
    pub alpha: Vec<Complex>,
    pub nonresonant: bool,
    pub generators: Vec<GeneratorMatrix<Complex>>,
    /// Largest gap between the specialized symbolic matrices and those built at alpha.
    pub specialization_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideRep {
    pub side: String,
    pub chambers: Vec<ChamberJson>,
    pub symbolic: Vec<GeneratorMatrix<Poly>>,
    pub specialized: Option<Specialized>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub sides: Vec<SideRep>,
    pub sides_agree: bool,
}

pub fn monodromy(cfg: &WeightConfig, fc: &FaceComplex, alpha: Option<&[Complex64]>) -> Result<MonodromyReport, CliError> {
    let err = |e| module_error("schober_k0", &e, EXIT_COMPUTATION);
    let m = cfg.m();
    let mut sides = Vec::new();
    for side in [Side::Analytic, Side::KTheory] {
        let rep = build_monodromy_rep(cfg, fc, side).map_err(err)?;
        let specialized = match alpha {
            None => None,
            Some(a) => {
                let at = build_monodromy_rep_at(cfg, fc, side, a).map_err(err)?;
                Some(Specialized {
                    alpha: schema::complexes(a),
                    nonresonant: is_nonresonant(cfg, a),
                    generators: at
                        .generators
                        .iter()
                        .map(|(g, x)| GeneratorMatrix { generator: g.into(), matrix: schema::numeric(x) })
                        .collect(),
                    specialization_gap: specialization_gap(cfg, fc, side, a).map_err(err)?,
                })
            }
        };
        sides.push(SideRep {
            side: format!("{side:?}"),
            chambers: rep.chambers.iter().map(|(s, l)| ChamberJson { sign_vector: s.clone(), labels: l.clone() }).collect(),
            symbolic: rep
                .generators
                .iter()
                .map(|(g, x)| GeneratorMatrix { generator: g.into(), matrix: schema::symbolic(x, m) })
                .collect(),
            specialized,
        });
    }
    let mut agree = true;
    for c in canonical_chambers(fc) {
        for (_, other) in fc.walls_of(&c) {
            agree &= sides_agree(cfg, fc, &c, &other).map_err(err)?;
        }
    }
    Ok(MonodromyReport { sides, sides_agree: agree })
}

// ktheory ----------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityJson {
    pub f_value: Complex,
    pub det: Complex,
    pub condition: f64,
    pub invertible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChamberDuality {
    pub sign_vector: SignVector,
    pub labels: Vec<Label>,
    pub psi: Matrix<Series>,
    pub phi: Matrix<Series>,
    pub gram: Matrix<Series>,
    pub psi_phi_identity: bool,
    pub dual_basis: bool,
    pub invertible_after_localizing: Option<bool>,
    /// Error text when the exact evaluation at alpha hit a pole.
    pub specialization: Option<Result<InvertibilityJson, String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KtheoryReport {
    pub truncation: usize,
    #[serde(rename = "F")]
    pub f: Poly,
    pub f_factors: Vec<Vec<i64>>,
    pub chambers: Vec<ChamberDuality>,
}

pub fn ktheory(cfg: &WeightConfig, fc: &FaceComplex, order: usize, alpha: Option<&[Complex64]>) -> Result<KtheoryReport, CliError> {
    let err = |e| module_error("ktheory", &e, EXIT_COMPUTATION);
    let m = cfg.m();
    let table = HilbertTable::new(cfg, order);
    let mut chambers = Vec::new();
    for c in canonical_chambers(fc) {
        let labels = sorted(fc.neg_lattice_points(&c));
        let psi = psi_matrix(&table, &labels);
        let phi = phi_matrix(&table, &labels);
        let prod = psi.mul(&phi).map_err(err)?;
        let invertible_after_localizing = match psi_invertible_over_localization(cfg, &labels) {
            Ok(b) => Some(b),
            Err(gkz_core::ktheory::KtError::TriangulationTooLarge(_)) => None,
            Err(e) => return Err(err(e)),
        };
        let specialization = alpha.map(|a| {
            specialization_invertibility(cfg, &labels, &h_of_alpha(a))
                .map(|r| InvertibilityJson {
                    f_value: schema::complex(r.f_value),
                    det: schema::complex(r.det),
                    condition: r.condition,
                    invertible: r.invertible,
                })
                .map_err(|e| module_error("ktheory", &e, EXIT_COMPUTATION).message)
        });
        chambers.push(ChamberDuality {
            psi: schema::series_matrix(&psi, m),
            phi: schema::series_matrix(&phi, m),
            gram: schema::series_matrix(&pairing_gram(&table, &labels), m),
            psi_phi_identity: prod.is_identity(),
            dual_basis: dual_basis_check(cfg, &labels, order),
            invertible_after_localizing,
            specialization,
            sign_vector: c,
            labels,
        });
    }
    Ok(KtheoryReport { truncation: order, f: schema::poly(&f_element(cfg), m), f_factors: f_factors(cfg), chambers })
}

// numeric ----------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleJson {
    pub vhat: Vec<Complex>,
    pub value: Complex,
    pub error: f64,
    pub box_residuals: Vec<f64>,
    pub euler_residuals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftJson {
    pub w: Vec<i64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionJson {
    pub chamber: SignVector,
    pub direction: i64,
    pub subsets: Vec<Vec<usize>>,
    pub coefficients: Vec<Vec<Complex>>,
    pub residual: f64,
    pub factorization_residual: f64,
    pub condition: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericWall {
    pub from: SignVector,
    pub to: SignVector,
    pub numeric: Matrix<Complex>,
    pub exact: Matrix<Complex>,
    pub relative_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericReport {
    pub alpha: Vec<Complex>,
    pub gamma: Vec<Complex>,
    pub sigma: Vec<f64>,
    pub totally_nonresonant: bool,
    pub in_negative_cone: bool,
    pub samples: Vec<SampleJson>,
    pub transformation_law: Vec<ShiftJson>,
    pub connections: Vec<ConnectionJson>,
    pub walls: Vec<NumericWall>,
}

pub fn numeric(cfg: &WeightConfig, fc: &FaceComplex, inst: &InstanceFile, alpha: &[Complex64], seed: u64) -> Result<NumericReport, CliError> {
    let err = |e| module_error("analytic", &e, EXIT_COMPUTATION);
    let p = MbParams::for_alpha(cfg, alpha, inst.quadrature()).map_err(err)?;
    let points = admissible_points(cfg, 5, 0.8, seed);
    let mut samples = Vec::new();
    for v in &points {
        let e = evaluate_mb_full(cfg, &p, v).map_err(err)?;
        let r = gkz_residual(cfg, &p, v).map_err(err)?;
        samples.push(SampleJson {
            vhat: schema::complexes(v),
            value: schema::complex(e.value),
            error: e.error,
            box_residuals: r.boxes,
            euler_residuals: r.euler,
        });
    }
    let mut transformation_law = Vec::new();
    for k in 0..cfg.m() {
        let mut w = vec![0; cfg.m()];
        w[k] = 1;
        transformation_law.push(ShiftJson { residual: transformation_law_residual(cfg, &p, &points[0], &w).map_err(err)?, w });
    }
    let opts = ConnectionOptions { quadrature: inst.quadrature(), ..ConnectionOptions::default() };
    let mut connections = Vec::new();
    let mut walls = Vec::new();
    for c in canonical_chambers(fc) {
        for sign in [1, -1] {
            let k = connection_matrix(cfg, fc, &c, sign, alpha, &opts).map_err(err)?;
            connections.push(ConnectionJson {
                chamber: c.clone(),
                direction: sign,
                subsets: k.series.iter().map(|s| s.subset.clone()).collect(),
                coefficients: k.coeffs.row_iter().map(|r| r.iter().copied().map(schema::complex).collect()).collect(),
                residual: k.residual,
                factorization_residual: k.factorization_residual,
                condition: k.condition,
            });
        }
        for (_, other) in fc.walls_of(&c) {
            let num = numeric_wall_matrix(cfg, fc, &c, &other, alpha, &opts).map_err(err)?;
            let exact = gkz_core::schober_k0::wall_crossing_matrix_at(cfg, fc, &c, &other, Side::Analytic, alpha)
                .map_err(|e| module_error("schober_k0", &e, EXIT_COMPUTATION))?;
            walls.push(NumericWall {
                relative_gap: relative_gap(&num, &exact),
                numeric: schema::numeric(&num),
                exact: schema::numeric(&exact),
                from: c.clone(),
                to: other,
            });
        }
    }
    Ok(NumericReport {
        alpha: schema::complexes(alpha),
        gamma: schema::complexes(&p.gamma),
        sigma: p.sigma.clone(),
        totally_nonresonant: is_totally_nonresonant(cfg, alpha),
        in_negative_cone: re_in_negative_cone(cfg, alpha),
        samples,
        transformation_law,
        connections,
        walls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gkz_core::instances::{gauss, two_one_one};
    use serde::de::DeserializeOwned;
    use std::fmt::Debug;

    fn round_trip<T: Serialize + DeserializeOwned + PartialEq + Debug>(v: &T) {
        let s = serde_json::to_string(v).unwrap();
        let back: T = serde_json::from_str(&s).unwrap();
        assert_eq!(&back, v);
    }

    fn inst(name: &str, cfg: &WeightConfig, alpha: Option<Vec<f64>>) -> InstanceFile {
        let mut i = InstanceFile::from_config(name, cfg);
        i.alpha = alpha.map(|re| crate::instance::AlphaInput { re, im: vec![] });
        i
    }

    #[test]
    fn reports_round_trip() {
        let cfg = gauss();
        let fc = face_complex(&cfg, &gkz_core::rational::rat(1, 1)).unwrap();
        let alpha = [Complex64::new(-0.3, 0.0), Complex64::new(-0.4, 0.0), Complex64::new(-0.2, 0.0)];
        round_trip(&validate(&cfg));
        round_trip(&arrangement(&cfg, &fc).unwrap());
        round_trip(&monodromy(&cfg, &fc, Some(&alpha)).unwrap());
        round_trip(&ktheory(&cfg, &fc, 4, Some(&alpha)).unwrap());
        let i = inst("gauss", &cfg, Some(vec![-0.3, -0.4, -0.2]));
        round_trip(&numeric(&cfg, &fc, &i, &alpha, 0).unwrap());
    }

    #[test]
    fn monodromy_without_alpha_is_symbolic() {
        let cfg = two_one_one();
        let fc = face_complex(&cfg, &gkz_core::rational::rat(1, 1)).unwrap();
        let r = monodromy(&cfg, &fc, None).unwrap();
        assert!(r.sides.iter().all(|s| s.specialized.is_none() && !s.symbolic.is_empty()));
        assert!(r.sides_agree);
    }

    #[test]
    fn gauss_arrangement_contents() {
        let cfg = gauss();
        let fc = face_complex(&cfg, &gkz_core::rational::rat(1, 1)).unwrap();
        let r = arrangement(&cfg, &fc).unwrap();
        assert_eq!(r.f_vector, vec![(0, 1), (1, 1)]);
        let chamber = r.faces.iter().find(|f| f.dim == 1).unwrap();
        assert_eq!(chamber.lattice_points.len(), 2);
        assert!(chamber.union_property.is_none());
        assert_eq!(r.faces.iter().find(|f| f.dim == 0).unwrap().union_property, Some(true));
        assert_eq!(r.walls.len(), 2);
    }

    #[test]
    fn numeric_requires_alpha() {
        let cfg = gauss();
        let e = execute(Command::Numeric, &inst("gauss", &cfg, None), 0).err().unwrap();
        assert_eq!(e.code, EXIT_INVALID);
        assert!(e.message.contains("MissingAlpha"));
    }

    #[test]
    fn error_names_variant() {
        let cfg = gauss();
        let e = execute(Command::Validate, &inst("bad", &cfg, Some(vec![0.1])), 0).err().unwrap();
        assert_eq!(e.code, EXIT_INVALID);
        assert!(e.message.contains("BadAlpha"), "{}", e.message);
    }
}
