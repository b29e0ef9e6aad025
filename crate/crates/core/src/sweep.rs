//! One-parameter sweeps that locate changes of Jordan structure.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{read_family, AffineFamily};
use crate::jordan::jordan_decompose;
use crate::numfield::{schur, ComplexMatrix, TolerancePolicy, C64};
use crate::pseudoherm::{build_eta, classify_spectrum, Inertia};

/// A family `H(t)` with entries affine in `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `[[E, i r], [i t, E]]`, eigenvalues `E ± i√(r t)`.
    Heff { energy: f64, r: f64 },
    Affine(AffineFamily),
}

impl Family {
    /// `"heff"` selects the built-in family with the given `E` and `r`;
    /// anything else is read as a template file.
    pub fn resolve(name: &str, energy: f64, r: f64) -> Result<Family> {
        if name == "heff" {
            if !(energy.is_finite() && r.is_finite()) {
                return Err(Error::FamilyParse("heff parameters must be finite".into()));
            }
            return Ok(Family::Heff { energy, r });
        }
        Ok(Family::Affine(read_family(name)?))
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        match self {
            Family::Heff { energy, r } => {
                let e = C64::new(*energy, 0.0);
                ComplexMatrix::from_rows(&[vec![e, C64::new(0.0, *r)], vec![C64::new(0.0, t), e]])
                    .expect("2x2 rows")
            }
            Family::Affine(f) => f.at(t),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Family::Heff { energy, r } => format!("heff(E={energy}, r={r})"),
            Family::Affine(f) => format!("affine template {}x{}", f.base.rows(), f.base.cols()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub param: f64,
    /// Computed eigenvalues with algebraic multiplicity, before clustering.
    pub eigenvalues: Vec<C64>,
    /// Smallest distance between two computed eigenvalues.
    pub min_gap: Option<f64>,
    /// `(eigenvalue, block size)` for every Jordan block.
    pub blocks: Vec<(C64, usize)>,
    /// Block sizes in descending order; changes mark exceptional points.
    pub segre: Vec<usize>,
    pub condition_i: Option<bool>,
    pub inertia: Option<Inertia>,
    /// Within one grid step of a transition, where Jordan structure is
    /// numerically fragile.
    pub ill_conditioned_region: bool,
    pub error: Option<String>,
}

impl SweepRecord {
    /// Block structure used for transition detection; a failed step has none.
    fn structure(&self) -> Option<&[usize]> {
        self.error.is_none().then_some(self.segre.as_slice())
    }
}

/// A change of block structure. An isolated exceptional point (a single grid
/// point whose structure differs from both neighbours) is one transition at
/// that point; otherwise the transition lies between two adjacent steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transition {
    /// First and last record index involved.
    pub records: (usize, usize),
    pub param_from: f64,
    pub param_to: f64,
    /// Grid point of an isolated exceptional point.
    pub at: Option<f64>,
    pub before: Vec<usize>,
    pub after: Vec<usize>,
    pub at_structure: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub family: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub tolerances: TolerancePolicy,
    pub records: Vec<SweepRecord>,
    pub transitions: Vec<Transition>,
}

/// Evenly spaced parameters with both endpoints exact.
pub fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| {
            if k + 1 == steps {
                to
            } else {
                from + (to - from) * k as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

pub fn sweep_record(h: &ComplexMatrix, param: f64, tol: &TolerancePolicy) -> SweepRecord {
    let mut rec = SweepRecord {
        param,
        eigenvalues: Vec::new(),
        min_gap: None,
        blocks: Vec::new(),
        segre: Vec::new(),
        condition_i: None,
        inertia: None,
        ill_conditioned_region: false,
        error: None,
    };
    match schur(h) {
        Ok((_, t)) => {
            let mut ev: Vec<C64> = (0..t.rows()).map(|i| t.get(i, i)).collect();
            ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            rec.min_gap = ev
                .iter()
                .enumerate()
                .flat_map(|(i, a)| ev[i + 1..].iter().map(move |b| (a - b).norm()))
                .reduce(f64::min);
            rec.eigenvalues = ev;
        }
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    }
    let jd = match jordan_decompose(h, tol) {
        Ok(jd) => jd,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.blocks = jd.block_multiset();
    rec.segre = jd.segre_sizes();
    match classify_spectrum(&jd, tol) {
        Ok(cls) => {
            rec.condition_i = Some(cls.condition_i_holds);
            if cls.condition_i_holds {
                match build_eta(&jd, &cls, tol) {
                    Ok((_, metric)) => rec.inertia = Some(metric.inertia),
                    Err(e) => rec.error = Some(e.to_string()),
                }
            }
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Groups adjacent structure changes into transitions.
pub fn find_transitions(records: &[SweepRecord]) -> Vec<Transition> {
    let changed: Vec<bool> = records.windows(2).map(|w| w[0].structure() != w[1].structure()).collect();
    let segre = |i: usize| records[i].segre.clone();
    let mut out = Vec::new();
    let mut k = 0;
    while k < changed.len() {
        if !changed[k] {
            k += 1;
            continue;
        }
        // an isolated point k+1 differs from both neighbours, which agree
        let isolated = k + 2 < records.len()
            && changed.get(k + 1) == Some(&true)
            && records[k].structure() == records[k + 2].structure();
        if isolated {
            out.push(Transition {
                records: (k, k + 2),
                param_from: records[k].param,
                param_to: records[k + 2].param,
                at: Some(records[k + 1].param),
                before: segre(k),
                after: segre(k + 2),
                at_structure: Some(segre(k + 1)),
            });
            k += 2;
        } else {
            out.push(Transition {
                records: (k, k + 1),
                param_from: records[k].param,
                param_to: records[k + 1].param,
                at: None,
                before: segre(k),
                after: segre(k + 1),
                at_structure: None,
            });
            k += 1;
        }
    }
    out
}

/// Evaluates the family on the grid and flags transitions. Records stay in
/// parameter order; every record involved in a transition or adjacent to one
/// is marked as lying in an ill-conditioned region.
pub fn sweep(family: &Family, from: f64, to: f64, steps: usize, tol: &TolerancePolicy) -> Result<SweepReport> {
    tol.validate()?;
    if steps < 2 {
        return Err(Error::FamilyParse(format!("a sweep needs at least 2 steps, got {steps}")));
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err(Error::FamilyParse("sweep bounds must be finite".into()));
    }
    let mut records: Vec<SweepRecord> = grid(from, to, steps)
        .into_iter()
        .map(|t| sweep_record(&family.at(t), t, tol))
        .collect();
    let transitions = find_transitions(&records);
    for tr in &transitions {
        let lo = tr.records.0;
        let hi = tr.records.1;
        for rec in &mut records[lo..=hi] {
            rec.ill_conditioned_region = true;
        }
    }
    Ok(SweepReport {
        family: family.name(),
        from,
        to,
        steps,
        tolerances: *tol,
        records,
        transitions,
    })
}

impl SweepReport {
    /// One line per record, tab separated, for external plotting.
    pub fn to_table(&self) -> String {
        let mut out = String::from("param\tmin_gap\tsegre\tcondition_i\tinertia\till_conditioned\teigenvalues\n");
        for r in &self.records {
            let gap = r.min_gap.map_or("-".into(), |g| format!("{g:.6e}"));
            let segre = r.segre.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
            let cond = r.condition_i.map_or("-", |c| if c { "yes" } else { "no" });
            let inertia = r.inertia.map_or("-".into(), |i| format!("({},{})", i.positive, i.negative));
            let ev = r
                .eigenvalues
                .iter()
                .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&format!(
                "{:.6}\t{gap}\t[{segre}]\t{cond}\t{inertia}\t{}\t{ev}\n",
                r.param,
                if r.ill_conditioned_region { "yes" } else { "no" }
            ));
            if let Some(e) = &r.error {
                out.push_str(&format!("#\terror at {}: {e}\n", r.param));
            }
        }
        if self.transitions.is_empty() {
            out.push_str("# no transitions\n");
        }
        for t in &self.transitions {
            match t.at {
                Some(at) => out.push_str(&format!(
                    "# transition at {at:.6}: {:?} -> {:?} -> {:?}\n",
                    t.before,
                    t.at_structure.as_deref().unwrap_or(&[]),
                    t.after
                )),
                None => out.push_str(&format!(
                    "# transition between {:.6} and {:.6}: {:?} -> {:?}\n",
                    t.param_from, t.param_to, t.before, t.after
                )),
            }
        }
        out
    }
}
