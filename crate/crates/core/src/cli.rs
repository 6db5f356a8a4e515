//! Batch front-end behind the `equinorm` binary.
//!
//! `analyze` runs classification, normalization, optional renormalization,
//! diagnostics and an optional flow check on a JSON system specification and
//! writes a versioned JSON report. Exit codes: 0 success, 1 internal error,
//! 2 validation failure, 3 inapplicable case (a partial report is written).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::equivariant::{structure_constant_mismatches, CoeffJson, QuasilinearField, QuasilinearFieldJson};
use crate::error::Error;
use crate::flow::{default_radii, flow_check, FlowCheckOptions, FlowCheckReport};
use crate::homological::Generator;
use crate::liealg::{
    builtin_rep, check_equivariance, compute_centralizer, verify_quaternion_relations, CentralizerBasis, MatrixRep,
    MatrixRepJson, SchurType,
};
use crate::normalform::{
    classify_case, normalize, resonance_check, CaseTag, ConvergenceVerdict, NormalFormResult, SpectrumInfo,
};
use crate::polyvf::{PolyVectorField, PolyVectorFieldJson};
use crate::rational::{format_rational, num_den_strings};
use crate::renorm::{renormalize_lemma2, renormalize_zero_linear, RenormalizedForm};

pub const SCHEMA_VERSION: &str = "1";
pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INAPPLICABLE: i32 = 3;

/// Resonance witnesses listed in the report; the full count is always given.
const RESONANCE_SAMPLE: usize = 16;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Name(String),
    Rep(MatrixRepJson),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasilinearSpec {
    #[serde(default)]
    pub group: Option<String>,
    pub coeffs: Vec<CoeffJson>,
}

/// Input document of `analyze`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub group: GroupSpec,
    #[serde(default)]
    pub quasilinear: Option<QuasilinearSpec>,
    #[serde(default)]
    pub raw: Option<PolyVectorFieldJson>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub renormalize: bool,
    #[serde(default)]
    pub flow_check: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct AnalyzeArgs {
    pub spec: PathBuf,
    pub order: Option<usize>,
    pub renormalize: bool,
    pub flow_check: bool,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InputSummary {
    pub group: String,
    pub dim: usize,
    pub source: String,
    pub truncation_order: usize,
    pub renormalize: bool,
    pub flow_check: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ViolationJson {
    /// 1-based generator index.
    pub generator: usize,
    pub residual: PolyVectorFieldJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EquivarianceJson {
    pub equivariant: bool,
    pub violations: Vec<ViolationJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectrumJson {
    pub beta0: String,
    pub omega_sq: String,
    pub eigenvalues: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ResonanceJson {
    pub max_order: usize,
    pub count: usize,
    pub sample: Vec<crate::normalform::ResonanceWitness>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GeneratorJson {
    pub k: usize,
    pub field: QuasilinearFieldJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NormalFormJson {
    pub truncation_order: usize,
    pub nf: QuasilinearFieldJson,
    pub generators: Vec<GeneratorJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SurvivorJson {
    pub slot: String,
    pub p: usize,
    pub k: usize,
    pub num: String,
    pub den: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RenormJson {
    pub case: crate::renorm::RenormCase,
    pub mu: usize,
    pub nu: Vec<Option<usize>>,
    pub c1: String,
    pub truncation_order: usize,
    pub form: QuasilinearFieldJson,
    pub generators: Vec<GeneratorJson>,
    pub survivors: Vec<SurvivorJson>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ErrorJson {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<PolyVectorFieldJson>,
}

/// JSON report written by `analyze`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema: String,
    pub timestamp: u64,
    pub status: String,
    pub exit_code: i32,
    pub input: Option<InputSummary>,
    pub equivariance: Option<EquivarianceJson>,
    pub schur_type: Option<SchurType>,
    pub centralizer: Option<Vec<Vec<String>>>,
    pub case: Option<CaseTag>,
    pub spectrum: Option<SpectrumJson>,
    pub resonances: Option<ResonanceJson>,
    pub field: Option<QuasilinearFieldJson>,
    pub normal_form: Option<NormalFormJson>,
    pub diagnostics: Option<ConvergenceVerdict>,
    pub renormalized: Option<RenormJson>,
    pub flow_check: Option<FlowCheckReport>,
    pub error: Option<ErrorJson>,
    pub notes: Vec<String>,
}

impl Report {
    fn new() -> Self {
        Self {
            schema: SCHEMA_VERSION.into(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            status: "ok".into(),
            exit_code: EXIT_OK,
            input: None,
            equivariance: None,
            schur_type: None,
            centralizer: None,
            case: None,
            spectrum: None,
            resonances: None,
            field: None,
            normal_form: None,
            diagnostics: None,
            renormalized: None,
            flow_check: None,
            error: None,
            notes: Vec::new(),
        }
    }

    fn fail(&mut self, code: i32, err: &Error) {
        self.exit_code = code;
        self.status = match code {
            EXIT_VALIDATION => "validation_failed",
            EXIT_INAPPLICABLE => "inapplicable",
            _ => "internal_error",
        }
        .into();
        let residual = match err {
            Error::NotQuasilinear { residual } | Error::NotEquivariant { residual, .. } => Some(residual.to_json()),
            _ => None,
        };
        self.error = Some(ErrorJson {
            kind: error_kind(err).into(),
            message: err.to_string(),
            residual,
        });
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Dimension { .. } => "Dimension",
        Error::UnknownRep(_) => "UnknownRep",
        Error::InvalidRep(_) => "InvalidRep",
        Error::NotIrreducible { .. } => "NotIrreducible",
        Error::NotNormalizable(_) => "NotNormalizable",
        Error::TypeMismatch { .. } => "TypeMismatch",
        Error::NotQuasilinear { .. } => "NotQuasilinear",
        Error::NotEquivariant { .. } => "NotEquivariant",
        Error::WrongCase { .. } => "WrongCase",
        Error::ZeroField => "ZeroField",
        Error::Ineffective(_) => "Ineffective",
        Error::Parse(_) => "Parse",
        Error::Internal(_) => "Internal",
        Error::Json(_) => "Json",
        Error::Io(_) => "Io",
    }
}

/// Exit code for an error raised while analysing an input.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::WrongCase { .. } | Error::ZeroField | Error::Ineffective(_) => EXIT_INAPPLICABLE,
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_VALIDATION,
    }
}

fn generators_json(gens: &[Generator]) -> Vec<GeneratorJson> {
    gens.iter()
        .map(|g| GeneratorJson {
            k: g.k,
            field: g.field.to_json(),
        })
        .collect()
}

fn spectrum_json(s: &SpectrumInfo) -> SpectrumJson {
    SpectrumJson {
        beta0: format_rational(&s.beta0),
        omega_sq: format_rational(&s.omega_sq),
        eigenvalues: s.eigenvalues().into_iter().map(|(a, b)| [a, b]).collect(),
    }
}

fn renorm_json(r: &RenormalizedForm) -> RenormJson {
    RenormJson {
        case: r.case,
        mu: r.mu,
        nu: r.nu.clone(),
        c1: format_rational(&r.c1),
        truncation_order: r.truncation_order,
        form: r.form.to_json(),
        generators: generators_json(&r.generators),
        survivors: r
            .surviving_slots()
            .into_iter()
            .map(|(s, c)| {
                let (num, den) = num_den_strings(&c);
                SurvivorJson {
                    slot: s.to_string(),
                    p: s.p,
                    k: s.k,
                    num,
                    den,
                }
            })
            .collect(),
        notes: r.notes.clone(),
    }
}

pub fn resolve_group(group: &GroupSpec) -> crate::Result<MatrixRep> {
    match group {
        GroupSpec::Name(name) => builtin_rep(name),
        GroupSpec::Rep(doc) => MatrixRep::from_json(doc),
    }
}

fn default_out_path(spec: &Path) -> PathBuf {
    spec.with_extension("report.json")
}

/// Runs `analyze`, printing a summary to `stdout`. Returns the exit code.
pub fn analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> i32 {
    let mut report = Report::new();
    let mut summary = String::new();
    let text = match std::fs::read_to_string(&args.spec) {
        Ok(t) => t,
        Err(e) => {
            let err = Error::Parse(format!("cannot read spec `{}`: {e}", args.spec.display()));
            return finish(args, args.out.clone(), report_with(&mut report, EXIT_VALIDATION, &err), &summary, stdout);
        }
    };
    let spec: SystemSpec = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => {
            let err = Error::Parse(format!("invalid spec: {e}"));
            return finish(args, args.out.clone(), report_with(&mut report, EXIT_VALIDATION, &err), &summary, stdout);
        }
    };
    let out_path = args.out.clone().or_else(|| spec.out.clone());
    let code = run_pipeline(args, &spec, &mut report, &mut summary);
    report.exit_code = code;
    finish(args, out_path, &report, &summary, stdout)
}

fn report_with<'a>(report: &'a mut Report, code: i32, err: &Error) -> &'a Report {
    report.fail(code, err);
    report
}

fn finish(args: &AnalyzeArgs, out: Option<PathBuf>, report: &Report, summary: &str, stdout: &mut dyn Write) -> i32 {
    let path = out.unwrap_or_else(|| default_out_path(&args.spec));
    let mut code = report.exit_code;
    let _ = stdout.write_all(summary.as_bytes());
    if let Some(err) = &report.error {
        let _ = writeln!(stdout, "error [{}]: {}", err.kind, err.message);
        if let Some(res) = &err.residual {
            let _ = writeln!(stdout, "residual: {}", serde_json::to_string(res).unwrap_or_default());
        }
    }
    match serde_json::to_string_pretty(report) {
        Ok(json) => {
            if let Err(e) = std::fs::write(&path, json + "\n") {
                let _ = writeln!(stdout, "error: cannot write report `{}`: {e}", path.display());
                code = EXIT_INTERNAL;
            } else {
                let _ = writeln!(stdout, "report: {}", path.display());
            }
        }
        Err(e) => {
            let _ = writeln!(stdout, "error: cannot serialize report: {e}");
            code = EXIT_INTERNAL;
        }
    }
    code
}

fn run_pipeline(args: &AnalyzeArgs, spec: &SystemSpec, report: &mut Report, summary: &mut String) -> i32 {
    macro_rules! bail {
        ($err:expr) => {{
            let err = $err;
            let code = exit_code_for(&err);
            report.fail(code, &err);
            return code;
        }};
    }
    let order = match args.order.or(spec.order) {
        Some(n) if n >= 1 => n,
        Some(_) => bail!(Error::Parse("spec field `order` must be at least 1".into())),
        None => bail!(Error::Parse(
            "missing truncation order: set spec field `order` or pass --order".into()
        )),
    };
    let renormalize = args.renormalize || spec.renormalize;
    let want_flow = args.flow_check || spec.flow_check;

    let rep = match resolve_group(&spec.group) {
        Ok(r) => r,
        Err(e) => bail!(Error::InvalidRep(format!("spec field `group`: {e}"))),
    };
    let group_label = rep.name().map(str::to_string).unwrap_or_else(|| "custom".into());
    let source = match (&spec.quasilinear, &spec.raw) {
        (Some(_), None) => "quasilinear",
        (None, Some(_)) => "raw",
        _ => bail!(Error::Parse(
            "exactly one of spec fields `quasilinear` and `raw` must be present".into()
        )),
    };
    report.input = Some(InputSummary {
        group: group_label.clone(),
        dim: rep.dim(),
        source: source.into(),
        truncation_order: order,
        renormalize,
        flow_check: want_flow,
    });
    let basis = match compute_centralizer(&rep) {
        Ok(b) => Arc::new(b),
        Err(e) => bail!(e),
    };
    report.schur_type = Some(basis.schur_type());
    report.centralizer = Some(basis.matrices().iter().map(|m| m.to_strings()).collect());
    let _ = writeln!(summary, "group {group_label} (dim {}), centralizer {}", rep.dim(), basis.schur_type());

    let q = match build_field(spec, &rep, &basis, report) {
        Ok(q) => q,
        Err(e) => bail!(e),
    };
    let eq = report.equivariance.as_ref().map(|e| e.equivariant).unwrap_or(false);
    let _ = writeln!(summary, "equivariance: {}", if eq { "ok" } else { "FAILED" });
    report.field = Some(q.to_json());

    let (case, spectrum) = classify_case(&q);
    report.case = Some(case);
    report.spectrum = Some(spectrum_json(&spectrum));
    let res = resonance_check(&spectrum, order);
    report.resonances = Some(ResonanceJson {
        max_order: order,
        count: res.len(),
        sample: res.into_iter().take(RESONANCE_SAMPLE).collect(),
    });
    let _ = writeln!(
        summary,
        "case {case}: beta0 = {}, omega^2 = {}",
        format_rational(&spectrum.beta0),
        format_rational(&spectrum.omega_sq)
    );

    let mut nf_result: Option<NormalFormResult> = None;
    let mut renormalized: Option<RenormalizedForm> = None;
    if case == CaseTag::ZeroLinear {
        if !renormalize {
            bail!(Error::WrongCase {
                case: case.label().into(),
                reason: "zero linear part has no Poincare-Dulac normal form; rerun with --renormalize".into(),
            });
        }
        match renormalize_zero_linear(&q, order) {
            Ok(r) => renormalized = Some(r),
            Err(e) => bail!(e),
        }
    } else {
        let nf = match normalize(&q, order) {
            Ok(r) => r,
            Err(e) => bail!(e),
        };
        report.normal_form = Some(NormalFormJson {
            truncation_order: order,
            nf: nf.nf.to_json(),
            generators: generators_json(&nf.generators),
        });
        report.diagnostics = Some(nf.diagnostics.clone());
        let _ = writeln!(
            summary,
            "normal form: {} slots, {} generators; verdict {}",
            nf.nf.nonzero_slots().len(),
            nf.generators.len(),
            nf.diagnostics.verdict.label()
        );
        if renormalize {
            if matches!(case, CaseTag::B3 | CaseTag::C3) {
                match renormalize_lemma2(&nf, order) {
                    Ok(r) => renormalized = Some(r),
                    Err(e) => bail!(e),
                }
            } else {
                report
                    .notes
                    .push(format!("case {case}: the normal form is already linear; no renormalization needed"));
            }
        }
        nf_result = Some(nf);
    }
    if let Some(r) = &renormalized {
        report.renormalized = Some(renorm_json(r));
        let _ = writeln!(
            summary,
            "renormalized form {}: mu = {}, c1 = {}, {} surviving slots",
            r.case.label(),
            r.mu,
            format_rational(&r.c1),
            r.form.nonzero_slots().len()
        );
    }

    if want_flow {
        let mut gens: Vec<PolyVectorField> = Vec::new();
        let mut target = q.truncate(order / 2);
        if let Some(nf) = &nf_result {
            gens.extend(nf.generators.iter().map(|g| g.field.expand()));
            target = nf.nf.clone();
        }
        if let Some(r) = &renormalized {
            gens.extend(r.generators.iter().map(|g| g.field.expand()));
            target = r.form.clone();
        }
        match flow_check(
            &q.expand(),
            &target.expand(),
            &gens,
            order,
            &default_radii(5),
            &FlowCheckOptions::default(),
        ) {
            Ok(fc) => {
                let _ = writeln!(
                    summary,
                    "flow check: fitted order {}",
                    fc.fitted_order
                        .map(|o| format!("{o:.3}"))
                        .unwrap_or_else(|| if fc.exact { "exact".into() } else { "n/a".into() })
                );
                report.flow_check = Some(fc);
            }
            Err(e) => bail!(e),
        }
    }
    EXIT_OK
}

fn build_field(
    spec: &SystemSpec,
    rep: &MatrixRep,
    basis: &Arc<CentralizerBasis>,
    report: &mut Report,
) -> crate::Result<QuasilinearField> {
    let (q, poly) = if let Some(ql) = &spec.quasilinear {
        if let Some(g) = &ql.group {
            if rep.name().is_some_and(|n| n != g) {
                return Err(Error::Parse(format!(
                    "spec field `quasilinear.group` is `{g}` but `group` is `{}`",
                    rep.name().unwrap_or("custom")
                )));
            }
        }
        let doc = QuasilinearFieldJson {
            group: basis.group_label(),
            coeffs: ql.coeffs.clone(),
        };
        let q = QuasilinearField::from_json(&doc, basis.clone())
            .map_err(|e| Error::Parse(format!("spec field `quasilinear`: {e}")))?;
        let poly = q.expand();
        (Some(q), poly)
    } else {
        let raw = spec.raw.as_ref().expect("checked by caller");
        let poly = PolyVectorField::from_json(raw).map_err(|e| Error::Parse(format!("spec field `raw`: {e}")))?;
        (None, poly)
    };
    if poly.dim() != rep.dim() {
        return Err(Error::Dimension {
            expected: rep.dim(),
            found: poly.dim(),
        });
    }
    let eq = check_equivariance(&poly, rep)?;
    report.equivariance = Some(EquivarianceJson {
        equivariant: eq.equivariant,
        violations: eq
            .violations
            .iter()
            .map(|(i, r)| ViolationJson {
                generator: i + 1,
                residual: r.to_json(),
            })
            .collect(),
    });
    if !eq.equivariant {
        let (_, first) = &eq.violations[0];
        return Err(Error::NotEquivariant {
            generator: eq.violations[0].0 + 1,
            residual: Box::new(first.clone()),
        });
    }
    match q {
        Some(q) => Ok(q),
        None => QuasilinearField::decompose(&poly, basis.clone()),
    }
}

/// Runs the structure-constant and quaternion-relation oracles.
pub fn oracle_check(group: Option<&str>, max_k: usize, stdout: &mut dyn Write) -> i32 {
    let groups: Vec<&str> = match group {
        Some(g) => vec![g],
        None => vec!["so2", "so3", "su2"],
    };
    let mut code = EXIT_OK;
    for name in groups {
        let basis = match builtin_rep(name).and_then(|r| compute_centralizer(&r)) {
            Ok(b) => Arc::new(b),
            Err(e) => {
                let _ = writeln!(stdout, "{name}: error: {e}");
                code = code.max(EXIT_VALIDATION);
                continue;
            }
        };
        let pairs = (basis.len() * (max_k + 1)).pow(2);
        match structure_constant_mismatches(&basis, max_k) {
            Ok(bad) if bad.is_empty() => {
                let _ = writeln!(
                    stdout,
                    "{name}: PASS structure constants ({pairs} pairs, k, m <= {max_k}, {})",
                    basis.schur_type()
                );
            }
            Ok(bad) => {
                let _ = writeln!(stdout, "{name}: FAIL structure constants: {} mismatches, first {} x {}", bad.len(), bad[0].0, bad[0].1);
                code = EXIT_INTERNAL;
            }
            Err(e) => {
                let _ = writeln!(stdout, "{name}: FAIL structure constants: {e}");
                code = EXIT_INTERNAL;
            }
        }
        if basis.schur_type() == SchurType::Quaternionic {
            match verify_quaternion_relations(&basis) {
                Ok(true) => {
                    let _ = writeln!(stdout, "{name}: PASS quaternion relations K_a K_b = eps_abc K_c - delta_ab I");
                }
                _ => {
                    let _ = writeln!(stdout, "{name}: FAIL quaternion relations");
                    code = EXIT_INTERNAL;
                }
            }
        }
    }
    code
}
