use monodyn::dynamics::{
    self, classify as classify_map, decompose as decompose_map, dynamical_degree_with_tol, family_sample_points,
    fibration_scan_set, find_invariant_fibration, invariant_family, matrix_order_mod, periodic_torsion_points_with,
    wildness_certificate, ClassifyConfig, FamilyConfig,
};
use monodyn::exactnum::identity_point;
use monodyn::oracle::{exact_period, finite_model_run, hypersurface_containment, Containment};
use monodyn::par::Exec;
use monodyn::torus::AffineMonomialMap;
use monodyn::KummerNumber;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::report;
use crate::spec::{parse_tolerance, MapSpec, SpecError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<monodyn::Error> for CliError {
    fn from(e: monodyn::Error) -> Self {
        use monodyn::Error::*;
        match e {
            Precondition(m) => CliError::Precondition(m),
            DimensionMismatch { .. } | NotMonic | Parse(_) | Singular => CliError::Parse(e.to_string()),
            EmbeddingFailure | NonConvergence => CliError::Other(e.to_string()),
        }
    }
}

/// Values given on the command line; unset fields fall back to the spec's
/// options and then to the library defaults.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub iterate_cap: Option<u64>,
    pub degree_bound: Option<u32>,
    pub torsion_cap: Option<u64>,
    pub seed: Option<u64>,
    pub retries: Option<u32>,
    pub exec: Option<Exec>,
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub config: ClassifyConfig,
    pub tolerance: Option<BigRational>,
}

impl Settings {
    pub fn resolve(spec: &MapSpec, o: &Overrides) -> Result<Self, CliError> {
        let d = ClassifyConfig::default();
        let opts = &spec.options;
        let config = ClassifyConfig {
            iterate_cap: o.iterate_cap.or(opts.iterate_cap).unwrap_or(d.iterate_cap),
            degree_bound: o.degree_bound.or(opts.degree_bound).unwrap_or(d.degree_bound),
            torsion_cap: o.torsion_cap.or(opts.torsion_cap).unwrap_or(d.torsion_cap),
            seed: o.seed.or(opts.seed).unwrap_or(d.seed),
            retries: o.retries.unwrap_or(d.retries),
            exec: o.exec.unwrap_or(d.exec),
            ..d
        };
        if config.iterate_cap == 0 || config.degree_bound == 0 || config.torsion_cap == 0 || config.retries == 0 {
            return Err(CliError::Parse("caps, degree bound and retries must be positive".into()));
        }
        let tolerance = opts.tolerance.as_deref().map(parse_tolerance).transpose()?;
        Ok(Settings { config, tolerance })
    }
}

pub struct Output {
    pub value: Value,
    pub undecided: bool,
}

fn header(command: &str, spec: &MapSpec, s: &Settings) -> Result<serde_json::Map<String, Value>, CliError> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("map".into(), serde_json::to_value(spec.canonical()?).expect("serializable"));
    m.insert("seed".into(), json!(s.config.seed));
    Ok(m)
}

fn done(m: serde_json::Map<String, Value>, undecided: bool) -> Output {
    Output { value: Value::Object(m), undecided }
}

pub fn parse_point(text: &str, n: usize) -> Result<Vec<KummerNumber>, CliError> {
    let x: Vec<KummerNumber> = text
        .split(',')
        .map(|t| t.trim().parse::<KummerNumber>().map_err(|e| CliError::Parse(format!("point coordinate {t:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    if x.len() != n {
        return Err(CliError::Parse(format!("point must have {n} coordinates, found {}", x.len())));
    }
    Ok(x)
}

pub fn classify(spec: &MapSpec, s: &Settings) -> Result<Output, CliError> {
    let phi = spec.to_map()?;
    let mut r = classify_map(&phi, &s.config)?;
    if let Some(t) = &s.tolerance {
        r.dynamical_degree = dynamical_degree_with_tol(&phi, t);
    }
    let verified = r.fibration.as_ref().is_some_and(|w| w.verify(&phi));
    let undecided = matches!(r.density, Some(Containment::Undecided { .. }));
    let mut m = header("classify", spec, s)?;
    if let Value::Object(body) = report::classification(&r, verified, s.config.degree_bound) {
        m.extend(body);
    }
    Ok(done(m, undecided))
}

pub fn fibration(spec: &MapSpec, s: &Settings) -> Result<Output, CliError> {
    let phi = spec.to_map()?;
    let mut m = header("fibration", spec, s)?;
    m.insert("scanned_iterates".into(), json!(fibration_scan_set(&phi, s.config.iterate_cap)));
    let w = find_invariant_fibration(&phi, s.config.iterate_cap);
    m.insert("witness".into(), w.as_ref().map_or(Value::Null, |w| report::witness(w, w.verify(&phi))));
    Ok(done(m, false))
}

pub fn wild(spec: &MapSpec, s: &Settings) -> Result<Output, CliError> {
    let phi = spec.to_map()?;
    let cert = wildness_certificate(&phi)?;
    let mut m = header("wild", spec, s)?;
    m.insert("certificate".into(), report::wildness(&cert));
    Ok(done(m, false))
}

pub fn decompose(spec: &MapSpec, s: &Settings) -> Result<Output, CliError> {
    let phi = spec.to_map()?;
    let d = decompose_map(&phi)?;
    let mut m = header("decompose", spec, s)?;
    m.insert("decomposition".into(), report::decomposition(&d));
    Ok(done(m, false))
}

pub fn periodic(spec: &MapSpec, s: &Settings, d: u64, budget: usize) -> Result<Output, CliError> {
    let phi = spec.to_map()?;
    let dec = decompose_map(&phi)?;
    if dec.x2.dim() == 0 {
        return Err(CliError::Precondition("the expanding factor X2 is trivial".into()));
    }
    let points = periodic_torsion_points_with(&dec.a2, d, budget, s.config.exec)?;
    let model = AffineMonomialMap::endomorphism(dec.a2.clone())
        .and_then(|f| finite_model_run(&f, d))
        .ok()
        .map(|run| points.iter().all(|p| run.period(&p.exponents) == p.period));
    let mut m = header("periodic", spec, s)?;
    m.insert("a2".into(), report::matrix(&dec.a2));
    m.insert("modulus".into(), json!(d));
    m.insert("matrix_order".into(), json!(matrix_order_mod(&dec.a2, d)));
    m.insert("finite_model_agrees".into(), json!(model));
    m.insert("points".into(), Value::Array(points.iter().map(report::periodic_point).collect()));
    Ok(done(m, false))
}

pub fn orbit(spec: &MapSpec, s: &Settings, start: Option<&str>, n: usize) -> Result<Output, CliError> {
    let phi = spec.to_map()?;
    let x = match start {
        Some(t) => parse_point(t, phi.dim())?,
        None => identity_point(phi.dim()),
    };
    let pts = dynamics::orbit(&phi, &x, n)?;
    let mut m = header("orbit", spec, s)?;
    m.insert("start".into(), report::point(&x));
    m.insert("period".into(), json!(exact_period(&phi, &x, s.config.iterate_cap)));
    m.insert("points".into(), Value::Array(pts.iter().map(|p| report::point(p)).collect()));
    Ok(done(m, false))
}

pub fn check_density(spec: &MapSpec, s: &Settings, start: Option<&str>, budget: usize) -> Result<Output, CliError> {
    let phi = spec.to_map()?;
    let c = &s.config;
    let mut m = header("check-density", spec, s)?;
    let points = if dynamics::dynamical_degree(&phi).is_one() {
        let x = match start {
            Some(t) => parse_point(t, phi.dim())?,
            None => identity_point(phi.dim()),
        };
        m.insert("source".into(), json!("orbit"));
        m.insert("start".into(), report::point(&x));
        dynamics::orbit(&phi, &x, budget)?
    } else {
        let fam = invariant_family(&phi, &FamilyConfig { budget: c.family_budget, torsion_cap: c.torsion_cap })?;
        m.insert("source".into(), json!("invariant_family"));
        m.insert("cycle_count".into(), json!(fam.cycles.len()));
        family_sample_points(&fam, c.samples_per_coset, budget, 1 << 20, c.seed)
    };
    if points.is_empty() {
        return Err(CliError::Precondition("no sample points available".into()));
    }
    let verdict = hypersurface_containment(&points, c.degree_bound, &c.containment())?;
    m.insert("density".into(), report::containment(&verdict, c.degree_bound));
    let undecided = !verdict.is_not_contained();
    Ok(done(m, undecided))
}
