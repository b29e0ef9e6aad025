//! Full analysis pipeline assembled into a serializable report.
//!
//! Every verdict is paired with the residual or margin it rests on, and every
//! certificate is recomputed here from the final objects. Serialization is
//! deterministic: the same matrix and tolerances give byte-identical output.

use std::fmt::{self, Write as _};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::antisym::{
    build_involutory_symmetry, kramers_check, kramers_falsifier, realify, symplectic_form, verify_symmetry,
    OffendingBlock,
};
use crate::error::Result;
use crate::io::format_matrix;
use crate::jordan::{jordan_decompose, JordanCertificates, JordanDecomposition};
use crate::numfield::{hermitian_eigenvalues, ComplexMatrix, TolerancePolicy, C64};
use crate::pseudoherm::{build_eta, classify_spectrum, intertwiner_oracles, Inertia, OracleVerdict, SpectralClassification};

/// Samples drawn by the Kramers falsifier when the pairing test fails.
pub const FALSIFIER_SAMPLES: usize = 500;
const FALSIFIER_SEED: u64 = 0x0004_b1d5;

/// Matrix serialized as rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixRows(pub Vec<Vec<[f64; 2]>>);

impl From<&ComplexMatrix> for MatrixRows {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixRows(m.to_rows().into_iter().map(|r| r.into_iter().map(|z| [z.re, z.im]).collect()).collect())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputSummary {
    /// SHA-256 of the canonical matrix file text.
    pub digest: String,
    pub dimension: usize,
    pub operator_norm: f64,
}

impl InputSummary {
    pub fn of(h: &ComplexMatrix) -> Self {
        let hash = Sha256::digest(format_matrix(h).as_bytes());
        let digest = hash.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        InputSummary {
            digest,
            dimension: h.rows(),
            operator_norm: h.norm(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueEntry {
    pub index: usize,
    pub value: C64,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
    pub block_sizes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockEntry {
    pub eigenvalue_index: usize,
    pub degeneracy_label: usize,
    pub size: usize,
    /// `k(n, a)`: blocks at the same eigenvalue with the same size.
    pub identical_blocks: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct JordanSection {
    pub eigenvalues: Vec<EigenvalueEntry>,
    pub blocks: Vec<BlockEntry>,
    pub diagonalizable: bool,
    pub certificates: JordanCertificates,
}

impl JordanSection {
    pub fn of(jd: &JordanDecomposition) -> Self {
        let eigenvalues = jd
            .eigenvalues()
            .iter()
            .enumerate()
            .map(|(n, &value)| EigenvalueEntry {
                index: n,
                value,
                algebraic_multiplicity: jd.algebraic_multiplicity(n),
                geometric_multiplicity: jd.geometric_multiplicity(n),
                block_sizes: jd.block_sizes(n),
            })
            .collect();
        let blocks = jd
            .blocks()
            .iter()
            .enumerate()
            .map(|(b, spec)| BlockEntry {
                eigenvalue_index: spec.eigenvalue_index,
                degeneracy_label: spec.degeneracy_label,
                size: spec.size,
                identical_blocks: jd.identical_block_count(b),
            })
            .collect();
        JordanSection {
            eigenvalues,
            blocks,
            diagonalizable: jd.is_diagonalizable(),
            certificates: jd.certificates(),
        }
    }
}

/// Condition i) read off the spectrum: real, or conjugate-paired with matching blocks.
#[derive(Debug, Clone, Serialize)]
pub struct StructuralVerdict {
    pub pseudo_hermitian: bool,
    /// Largest `|E₋ - conj(E₊)| / ‖H‖` over the conjugate pairs.
    pub pairing_residual: f64,
    /// Smallest `min_m |conj(E) - E_m| / ‖H‖` over unpaired eigenvalues `E`.
    pub unpaired_margin: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PseudoHermitianVerdict {
    pub structural: StructuralVerdict,
    /// Hermitian intertwiners.
    pub oracle: OracleVerdict,
    /// All intertwiners, Hermitian or not.
    pub weak_oracle: OracleVerdict,
    pub agree: bool,
    pub flag: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EtaSection {
    pub matrix: MatrixRows,
    pub inertia: Inertia,
    /// `‖ηHη⁻¹ - H†‖ / ‖H‖`
    pub residual: f64,
    pub hermiticity_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DefinitenessVerdict {
    pub definite: bool,
    /// Diagonalizable with real spectrum.
    pub expected_definite: bool,
    pub consistent: bool,
    /// Smallest `|eigenvalue| / largest |eigenvalue|` of `η`.
    pub eigenvalue_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RealifySection {
    pub scalar: C64,
    /// `max |Im (M⁻¹HM)_{ij}| / ‖H‖`
    pub max_imag_relative: f64,
    /// `‖L - M conj(M)⁻¹‖`
    pub factor_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaSection {
    pub square_residual: f64,
    pub commutation_residual: f64,
    pub realify: Option<RealifySection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FalsifierSection {
    pub samples: usize,
    pub witness_found: bool,
    pub best_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KramersSection {
    pub pairing_ok: bool,
    pub offending_blocks: Vec<OffendingBlock>,
    pub t_built: bool,
    pub t_square_residual: Option<f64>,
    pub t_commutation_residual: Option<f64>,
    pub falsifier: Option<FalsifierSection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymplecticSection {
    pub matrix: MatrixRows,
    pub quaternionic_residual: f64,
}

/// A stage that could not be completed; the rest of the report stands.
#[derive(Debug, Clone, Serialize)]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

/// Classification, metric and definiteness verdict.
#[derive(Debug, Clone, Serialize)]
pub struct MetricSection {
    pub classification: SpectralClassification,
    pub structural: StructuralVerdict,
    pub eta: Option<EtaSection>,
    pub definiteness: Option<DefinitenessVerdict>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub input: InputSummary,
    pub tolerances: TolerancePolicy,
    pub jordan: JordanSection,
    pub classification: SpectralClassification,
    pub verdict: PseudoHermitianVerdict,
    pub eta: Option<EtaSection>,
    pub definiteness: Option<DefinitenessVerdict>,
    pub omega_hat: Option<OmegaSection>,
    pub kramers: KramersSection,
    pub symplectic: Option<SymplecticSection>,
    pub stage_errors: Vec<StageError>,
}

impl AnalysisReport {
    /// The oracle's answer, which decides the exit status.
    pub fn is_pseudo_hermitian(&self) -> bool {
        self.verdict.oracle.invertible
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn structural_verdict(jd: &JordanDecomposition, cls: &SpectralClassification) -> StructuralVerdict {
    let scale = jd.operator_norm().max(f64::MIN_POSITIVE);
    let pairing_residual = cls
        .paired_eigs
        .iter()
        .map(|p| p.conjugation_residual / scale)
        .fold(0.0, f64::max);
    let unpaired_margin = cls
        .unpaired_complex
        .iter()
        .map(|&(_, e)| {
            jd.eigenvalues()
                .iter()
                .map(|&m| (m - e.conj()).norm() / scale)
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(f64::min);
    StructuralVerdict {
        pseudo_hermitian: cls.condition_i_holds,
        pairing_residual,
        unpaired_margin,
    }
}

/// Classification, `η` and its inertia. Stage failures are appended to
/// `errors`.
pub fn metric_section(
    jd: &JordanDecomposition,
    tol: &TolerancePolicy,
    errors: &mut Vec<StageError>,
) -> Result<MetricSection> {
    let classification = classify_spectrum(jd, tol)?;
    let structural = structural_verdict(jd, &classification);
    let (mut eta, mut definiteness) = (None, None);
    if classification.condition_i_holds {
        match build_eta(jd, &classification, tol) {
            Ok((_, metric)) => {
                let ev = hermitian_eigenvalues(&metric.eta)?;
                let top = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let low = ev.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
                let definite = metric.inertia.is_definite();
                let expected_definite = jd.is_diagonalizable() && classification.is_real_spectrum();
                definiteness = Some(DefinitenessVerdict {
                    definite,
                    expected_definite,
                    consistent: definite == expected_definite,
                    eigenvalue_margin: low / top,
                });
                eta = Some(EtaSection {
                    matrix: (&metric.eta).into(),
                    inertia: metric.inertia,
                    residual: metric.residual,
                    hermiticity_residual: metric.hermiticity_residual,
                });
            }
            Err(e) => errors.push(StageError {
                stage: "eta",
                message: e.to_string(),
            }),
        }
    }
    Ok(MetricSection {
        classification,
        structural,
        eta,
        definiteness,
    })
}

/// Kramers verdict, and the symplectic form when `𝔗` exists. When no `𝔗`
/// was assembled the falsifier searches for one directly.
pub fn kramers_section(
    jd: &JordanDecomposition,
    cls: &SpectralClassification,
    tol: &TolerancePolicy,
    errors: &mut Vec<StageError>,
) -> (KramersSection, Option<SymplecticSection>) {
    let verdict = kramers_check(jd, cls);
    let falsifier = verdict.t.is_none().then(|| {
        let out = kramers_falsifier(jd.operator(), FALSIFIER_SAMPLES, FALSIFIER_SEED, tol);
        FalsifierSection {
            samples: out.samples,
            witness_found: out.witness.is_some(),
            best_residual: out.best_residual.is_finite().then_some(out.best_residual),
        }
    });
    let symplectic = verdict
        .t
        .as_ref()
        .and_then(|t| match symplectic_form(jd.operator(), t, jd, tol) {
            Ok(form) => Some(SymplecticSection {
                matrix: (&form.matrix).into(),
                quaternionic_residual: form.quaternionic_residual,
            }),
            Err(e) => {
                errors.push(StageError {
                    stage: "symplectic",
                    message: e.to_string(),
                });
                None
            }
        });
    if verdict.pairing_ok && cls.condition_i_holds && verdict.t.is_none() {
        errors.push(StageError {
            stage: "kramers",
            message: "pairing holds but T could not be assembled".into(),
        });
    }
    let section = KramersSection {
        pairing_ok: verdict.pairing_ok,
        offending_blocks: verdict.offending_blocks,
        t_built: verdict.t.is_some(),
        t_square_residual: verdict.t_square_residual,
        t_commutation_residual: verdict.t_commutation_residual,
        falsifier,
    };
    (section, symplectic)
}

fn omega_section(
    jd: &JordanDecomposition,
    cls: &SpectralClassification,
    tol: &TolerancePolicy,
    errors: &mut Vec<StageError>,
) -> Option<OmegaSection> {
    if !cls.condition_i_holds {
        return None;
    }
    let h = jd.operator();
    let step = build_involutory_symmetry(jd, cls).and_then(|omega| {
        let check = verify_symmetry(h, &omega, tol)?;
        Ok((omega, check))
    });
    let (omega, check) = match step {
        Ok(x) => x,
        Err(e) => {
            errors.push(StageError {
                stage: "omega_hat",
                message: e.to_string(),
            });
            return None;
        }
    };
    let realify = match realify(&omega, h, tol) {
        Ok(r) => Some(RealifySection {
            scalar: r.scalar,
            max_imag_relative: r.max_imag / jd.operator_norm().max(f64::MIN_POSITIVE),
            factor_residual: r.factor_residual,
        }),
        Err(e) => {
            errors.push(StageError {
                stage: "realify",
                message: e.to_string(),
            });
            None
        }
    };
    Some(OmegaSection {
        square_residual: check.square_residual,
        commutation_residual: check.commutation_residual,
        realify,
    })
}

/// Runs every stage on `h`. Only failures of the Jordan decomposition or the
/// spectral classification abort; later stages record their errors.
pub fn analyze(h: &ComplexMatrix, tol: &TolerancePolicy) -> Result<AnalysisReport> {
    let jd = jordan_decompose(h, tol)?;
    let mut errors = Vec::new();
    let metric = metric_section(&jd, tol, &mut errors)?;
    let (oracle, weak_oracle) = intertwiner_oracles(h, tol)?;
    let structural = metric.structural.clone();
    let mut disagreements = Vec::new();
    if structural.pseudo_hermitian != oracle.invertible {
        disagreements.push("structural verdict and Hermitian-intertwiner oracle disagree");
    }
    if oracle.invertible != weak_oracle.invertible {
        disagreements.push("Hermitian and unrestricted intertwiner oracles disagree");
    }
    let verdict = PseudoHermitianVerdict {
        agree: disagreements.is_empty(),
        flag: (!disagreements.is_empty()).then(|| disagreements.join("; ")),
        structural,
        oracle,
        weak_oracle,
    };
    let omega_hat = omega_section(&jd, &metric.classification, tol, &mut errors);
    let (kramers, symplectic) = kramers_section(&jd, &metric.classification, tol, &mut errors);
    Ok(AnalysisReport {
        input: InputSummary::of(h),
        tolerances: *tol,
        jordan: JordanSection::of(&jd),
        classification: metric.classification,
        verdict,
        eta: metric.eta,
        definiteness: metric.definiteness,
        omega_hat,
        kramers,
        symplectic,
        stage_errors: errors,
    })
}

fn fmt_c(z: C64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Human-readable Jordan ledger.
pub fn render_jordan(out: &mut String, j: &JordanSection) {
    let _ = writeln!(out, "Jordan ledger (diagonalizable: {})", yes(j.diagonalizable));
    for e in &j.eigenvalues {
        let _ = writeln!(
            out,
            "  E{} = {}  algebraic {}  geometric {}  blocks {:?}",
            e.index,
            fmt_c(e.value),
            e.algebraic_multiplicity,
            e.geometric_multiplicity,
            e.block_sizes
        );
    }
    let c = &j.certificates;
    let _ = writeln!(
        out,
        "  certificates: reconstruction {:.2e}  biorthonormality {:.2e}  completeness {:.2e}  chain {:.2e}  cond(P) {:.2e}",
        c.reconstruction, c.biorthonormality, c.completeness, c.chain, c.similarity_condition
    );
}

pub fn render_metric(out: &mut String, m: &MetricSection) {
    let s = &m.structural;
    let _ = writeln!(
        out,
        "Condition i): {}  (pairing residual {:.2e}{})",
        yes(s.pseudo_hermitian),
        s.pairing_residual,
        s.unpaired_margin
            .map(|x| format!(", unpaired margin {x:.2e}"))
            .unwrap_or_default()
    );
    match (&m.eta, &m.definiteness) {
        (Some(eta), Some(t2)) => {
            let _ = writeln!(
                out,
                "Metric eta: inertia ({}, {})  residual {:.2e}  hermiticity {:.2e}",
                eta.inertia.positive, eta.inertia.negative, eta.residual, eta.hermiticity_residual
            );
            let _ = writeln!(
                out,
                "Definiteness: definite {}  expected {}  consistent {}  (eigenvalue margin {:.2e})",
                yes(t2.definite),
                yes(t2.expected_definite),
                yes(t2.consistent),
                t2.eigenvalue_margin
            );
        }
        _ => {
            let _ = writeln!(out, "Metric eta: not built");
        }
    }
}

pub fn render_kramers(out: &mut String, k: &KramersSection, s: Option<&SymplecticSection>) {
    let _ = writeln!(out, "Kramers pairing: {}  T built: {}", yes(k.pairing_ok), yes(k.t_built));
    for b in &k.offending_blocks {
        let _ = writeln!(
            out,
            "  odd count {} of size-{} blocks at {}",
            b.count,
            b.size,
            fmt_c(b.eigenvalue)
        );
    }
    if let (Some(sq), Some(cm)) = (k.t_square_residual, k.t_commutation_residual) {
        let _ = writeln!(out, "  T residuals: |T^2 + 1| {sq:.2e}  |[H, T]| {cm:.2e}");
    }
    if let Some(f) = &k.falsifier {
        if f.samples == 0 {
            let _ = writeln!(out, "  falsifier: odd dimension admits no T with T^2 = -1");
        } else {
            let _ = writeln!(
                out,
                "  falsifier: {} samples, witness {}, best residual {}",
                f.samples,
                yes(f.witness_found),
                f.best_residual.map_or("n/a".into(), |r| format!("{r:.2e}"))
            );
        }
    }
    if let Some(s) = s {
        let _ = writeln!(out, "Symplectic form: quaternionic residual {:.2e}", s.quaternionic_residual);
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Input: {}x{}  |H| = {:.6e}  sha256 {}",
            self.input.dimension, self.input.dimension, self.input.operator_norm, self.input.digest
        );
        render_jordan(&mut out, &self.jordan);
        let v = &self.verdict;
        let _ = writeln!(
            out,
            "Pseudo-Hermitian: {}  (oracle sigma ratio {:.2e}, solution dimension {}; weak oracle {})",
            yes(v.oracle.invertible),
            v.oracle.sigma_ratio,
            v.oracle.dimension,
            yes(v.weak_oracle.invertible)
        );
        if let Some(flag) = &v.flag {
            let _ = writeln!(out, "  WARNING: {flag}");
        }
        let metric = MetricSection {
            classification: self.classification.clone(),
            structural: v.structural.clone(),
            eta: self.eta.clone(),
            definiteness: self.definiteness.clone(),
        };
        render_metric(&mut out, &metric);
        if let Some(o) = &self.omega_hat {
            let _ = writeln!(
                out,
                "Omega-hat: |Omega^2 - 1| {:.2e}  |[H, Omega]| {:.2e}",
                o.square_residual, o.commutation_residual
            );
            if let Some(r) = &o.realify {
                let _ = writeln!(
                    out,
                    "  realified with c = {}: max |Im| / |H| {:.2e}",
                    fmt_c(r.scalar),
                    r.max_imag_relative
                );
            }
        }
        render_kramers(&mut out, &self.kramers, self.symplectic.as_ref());
        for e in &self.stage_errors {
            let _ = writeln!(out, "Stage {} failed: {}", e.stage, e.message);
        }
        f.write_str(&out)
    }
}
