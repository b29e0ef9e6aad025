//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use pseudoherm::antisym::{
    build_involutory_symmetry, kramers_check, kramers_falsifier, kramers_pairing, realify, symplectic_form,
    verify_symmetry,
};
use pseudoherm::ensemble::{generate_ensemble, generate_t_symmetric, EnsembleConfig, EnsembleMember};
use pseudoherm::jordan::jordan_decompose;
use pseudoherm::numfield::{c, inverse_condition, re};
use pseudoherm::pseudoherm::{build_eta, classify_spectrum, inertia, intertwiner_oracle, intertwiner_space};
use pseudoherm::sweep::{sweep, Family};
use pseudoherm::{ComplexMatrix, TolerancePolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const ENSEMBLE_SIZE: usize = 240;
const ENSEMBLE_SEED: u64 = 20_251_019;
const T_SYMMETRIC_COUNT: usize = 50;
const FALSIFIER_SAMPLES: usize = 500;
const INDEFINITE_SAMPLES: usize = 50;
const INDEFINITE_MAX_DRAWS: usize = 20_000;
const LIMIT: f64 = 1e-9;

type Outcome = Result<String, String>;

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn ensemble() -> Vec<EnsembleMember> {
    generate_ensemble(ENSEMBLE_SIZE, ENSEMBLE_SEED, &EnsembleConfig::default())
}

fn j2_pair() -> ComplexMatrix {
    let mut h = ComplexMatrix::identity(4);
    h.set(0, 1, re(1.0));
    h.set(2, 3, re(1.0));
    h
}

/// Random real combinations of a Hermitian basis that are invertible at the
/// rank tolerance.
fn invertible_samples(basis: &[ComplexMatrix], count: usize, rng: &mut impl Rng) -> Vec<ComplexMatrix> {
    let mut out = Vec::new();
    for _ in 0..INDEFINITE_MAX_DRAWS {
        if out.len() == count {
            break;
        }
        let mut eta = ComplexMatrix::zeros(basis[0].rows(), basis[0].cols());
        for b in basis {
            let x: f64 = rng.sample(StandardNormal);
            eta = &eta + &b.scale(re(x));
        }
        let eta = eta.hermitian_part();
        if inverse_condition(&eta) > tol().rank_tol {
            out.push(eta);
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
    let t = tol();
    let basis = intertwiner_space(&a, true, &t).map_err(|e| e.to_string())?;
    ensure(basis.len() == 2, || format!("dimension {} instead of 2", basis.len()))?;
    // every element must lie in span{[[0,1],[1,0]], [[0,0],[0,1]]}
    let mut worst = 0.0f64;
    for b in &basis {
        let k = b.get(0, 1).re;
        let kp = b.get(1, 1).re;
        let model = ComplexMatrix::from_real_rows(&[&[0.0, k], &[k, kp]]).unwrap();
        worst = worst.max((b - &model).norm() / b.norm());
        let res = (&(b * &a) - &(&a.adjoint() * b)).norm() / (a.norm() * b.norm());
        worst = worst.max(res);
    }
    ensure(worst <= LIMIT, || format!("basis deviates from [[0,k],[k,k']] by {worst:e}"))?;
    let gram = (basis[0].get(0, 1) * basis[1].get(1, 1) - basis[1].get(0, 1) * basis[0].get(1, 1)).norm();
    ensure(gram > 1e-3, || format!("basis does not span both k and k' ({gram:e})"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let samples = invertible_samples(&basis, INDEFINITE_SAMPLES, &mut rng);
    ensure(samples.len() == INDEFINITE_SAMPLES, || "too few invertible samples".into())?;
    for eta in &samples {
        let i = inertia(eta, &t).map_err(|e| e.to_string())?;
        ensure((i.positive, i.negative) == (1, 1), || format!("sample with inertia {i:?}"))?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "dimension 2, max deviation {worst:.1e}, {} invertible samples all (1,1), {:.2?}",
        samples.len(),
        start.elapsed()
    ))
}

fn criterion_2(ens: &[EnsembleMember]) -> Outcome {
    let start = Instant::now();
    let t = tol();
    let mut agree = 0;
    let (mut holds, mut defective) = (0, 0);
    for (i, m) in ens.iter().enumerate() {
        let jd = jordan_decompose(&m.matrix, &t).map_err(|e| format!("member {i}: {e}"))?;
        let cls = classify_spectrum(&jd, &t).map_err(|e| format!("member {i}: {e}"))?;
        let oracle = intertwiner_oracle(&m.matrix, true, &t).map_err(|e| format!("member {i}: {e}"))?;
        ensure(cls.condition_i_holds == oracle.invertible, || {
            format!(
                "member {i} ({:?}): condition i) {} but oracle {} (sigma ratio {:e})",
                m.kind, cls.condition_i_holds, oracle.invertible, oracle.sigma_ratio
            )
        })?;
        agree += 1;
        holds += usize::from(cls.condition_i_holds);
        defective += usize::from(!jd.is_diagonalizable());
        ensure(m.dim() <= 8, || format!("member {i} has dimension {}", m.dim()))?;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "{agree}/{} agree, {holds} satisfying condition i), {defective} defective, {:.2?}",
        ens.len(),
        start.elapsed()
    ))
}

fn criterion_3(ens: &[EnsembleMember]) -> Outcome {
    let t = tol();
    let (mut count, mut worst_res, mut worst_herm) = (0, 0.0f64, 0.0f64);
    for (i, m) in ens.iter().enumerate().filter(|(_, m)| m.expected_condition_i()) {
        let jd = jordan_decompose(&m.matrix, &t).map_err(|e| format!("member {i}: {e}"))?;
        let cls = classify_spectrum(&jd, &t).map_err(|e| format!("member {i}: {e}"))?;
        let (_, metric) = build_eta(&jd, &cls, &t).map_err(|e| format!("member {i}: {e}"))?;
        let eta = &metric.eta;
        let herm = (eta - &eta.adjoint()).norm() / eta.norm();
        ensure(metric.residual <= LIMIT && herm <= LIMIT && metric.hermiticity_residual <= LIMIT, || {
            format!(
                "member {i}: residual {:e}, hermiticity {:e} (before symmetrization {:e})",
                metric.residual, herm, metric.hermiticity_residual
            )
        })?;
        worst_res = worst_res.max(metric.residual);
        worst_herm = worst_herm.max(metric.hermiticity_residual);
        count += 1;
    }
    Ok(format!(
        "{count} metrics, worst residual {worst_res:.1e}, worst hermiticity {worst_herm:.1e}"
    ))
}

fn criterion_4(ens: &[EnsembleMember]) -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut checked, mut sampled) = (0, 0);
    for (i, m) in ens.iter().enumerate().filter(|(_, m)| m.expected_condition_i()) {
        let jd = jordan_decompose(&m.matrix, &t).map_err(|e| format!("member {i}: {e}"))?;
        let cls = classify_spectrum(&jd, &t).map_err(|e| format!("member {i}: {e}"))?;
        let (_, metric) = build_eta(&jd, &cls, &t).map_err(|e| format!("member {i}: {e}"))?;
        let expected = jd.is_diagonalizable() && cls.is_real_spectrum();
        ensure(metric.inertia.is_definite() == expected, || {
            format!("member {i}: inertia {:?}, diagonalizable and real {expected}", metric.inertia)
        })?;
        checked += 1;
        if !expected {
            let basis = intertwiner_space(&m.matrix, true, &t).map_err(|e| e.to_string())?;
            let samples = invertible_samples(&basis, INDEFINITE_SAMPLES, &mut rng);
            ensure(samples.len() == INDEFINITE_SAMPLES, || {
                format!("member {i}: only {} invertible samples", samples.len())
            })?;
            for eta in &samples {
                let inn = inertia(eta, &t).map_err(|e| format!("member {i}: {e}"))?;
                ensure(!inn.is_definite(), || format!("member {i}: definite sample {inn:?}"))?;
            }
            sampled += 1;
        }
    }
    Ok(format!(
        "{checked} metrics match; {sampled} instances x {INDEFINITE_SAMPLES} samples all indefinite"
    ))
}

fn criterion_5(ens: &[EnsembleMember]) -> Outcome {
    let t = tol();
    let (mut count, mut worst_sq, mut worst_cm, mut worst_im) = (0, 0.0f64, 0.0f64, 0.0f64);
    for (i, m) in ens.iter().enumerate().filter(|(_, m)| m.expected_condition_i()) {
        let jd = jordan_decompose(&m.matrix, &t).map_err(|e| format!("member {i}: {e}"))?;
        let cls = classify_spectrum(&jd, &t).map_err(|e| format!("member {i}: {e}"))?;
        let omega = build_involutory_symmetry(&jd, &cls).map_err(|e| format!("member {i}: {e}"))?;
        let check = verify_symmetry(&m.matrix, &omega, &t).map_err(|e| format!("member {i}: {e}"))?;
        let real = realify(&omega, &m.matrix, &t).map_err(|e| format!("member {i}: {e}"))?;
        let im = real.max_imag / m.matrix.norm();
        ensure(check.square_residual <= LIMIT && check.commutation_residual <= LIMIT && im <= LIMIT, || {
            format!(
                "member {i}: square {:e}, commutation {:e}, imaginary {im:e}",
                check.square_residual, check.commutation_residual
            )
        })?;
        worst_sq = worst_sq.max(check.square_residual);
        worst_cm = worst_cm.max(check.commutation_residual);
        worst_im = worst_im.max(im);
        count += 1;
    }
    Ok(format!(
        "{count} instances, worst |Omega^2-1| {worst_sq:.1e}, commutation {worst_cm:.1e}, realified Im/|H| {worst_im:.1e}"
    ))
}

fn criterion_6() -> Outcome {
    let t = tol();
    let h = j2_pair();
    let jd = jordan_decompose(&h, &t).map_err(|e| e.to_string())?;
    let cls = classify_spectrum(&jd, &t).map_err(|e| e.to_string())?;
    let v = kramers_check(&jd, &cls);
    let (sq, cm) = (v.t_square_residual.ok_or("(a) no T built")?, v.t_commutation_residual.unwrap());
    ensure(v.pairing_ok && sq <= LIMIT && cm <= LIMIT, || format!("(a) |T^2+1| {sq:e}, commutation {cm:e}"))?;

    let heff = ComplexMatrix::from_rows(&[vec![re(1.0), c(0.0, 1.0)], vec![re(0.0), re(1.0)]]).unwrap();
    let jd = jordan_decompose(&heff, &t).map_err(|e| e.to_string())?;
    let cls = classify_spectrum(&jd, &t).map_err(|e| e.to_string())?;
    let vb = kramers_check(&jd, &cls);
    ensure(!vb.pairing_ok, || "(b) pairing verdict true for H_eff".into())?;
    let fals = kramers_falsifier(&heff, FALSIFIER_SAMPLES, 6, &t);
    ensure(fals.samples == FALSIFIER_SAMPLES && fals.witness.is_none(), || {
        format!("(b) falsifier found a witness (residual {:e})", fals.best_residual)
    })?;

    let d = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]);
    let jd = jordan_decompose(&d, &t).map_err(|e| e.to_string())?;
    let cls = classify_spectrum(&jd, &t).map_err(|e| e.to_string())?;
    let pairing = kramers_pairing(&jd, &cls).map_err(|e| e.to_string())?;
    ensure(pairing.real_pairs.is_empty() && pairing.conjugate_columns.len() == 1, || {
        format!("(c) unexpected pairing {pairing:?}")
    })?;
    let vc = kramers_check(&jd, &cls);
    let (sqc, cmc) = (vc.t_square_residual.ok_or("(c) no T built")?, vc.t_commutation_residual.unwrap());
    ensure(sqc <= LIMIT && cmc <= LIMIT, || format!("(c) |T^2+1| {sqc:e}, commutation {cmc:e}"))?;
    Ok(format!(
        "(a) |T^2+1| {sq:.1e} comm {cm:.1e}; (b) no pairing, {} samples best residual {:.2e}; (c) conjugate branch |T^2+1| {sqc:.1e}",
        fals.samples, fals.best_residual
    ))
}

fn criterion_7() -> Outcome {
    let t = tol();
    let cfg = EnsembleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut real_eigs, mut worst_comm) = (0, 0.0f64);
    for i in 0..T_SYMMETRIC_COUNT {
        let half = 1 + i % 4;
        let inst = generate_t_symmetric(half, &cfg, &mut rng);
        let comm = inst.t.commutation_residual(&inst.matrix);
        worst_comm = worst_comm.max(comm);
        let jd = jordan_decompose(&inst.matrix, &t).map_err(|e| format!("instance {i}: {e}"))?;
        let cls = classify_spectrum(&jd, &t).map_err(|e| format!("instance {i}: {e}"))?;
        for r in &cls.real_eigs {
            let (g, d) = (jd.algebraic_multiplicity(r.index), jd.geometric_multiplicity(r.index));
            ensure(g % 2 == 0 && d % 2 == 0, || {
                format!("instance {i}: real eigenvalue {} with multiplicities ({g}, {d})", r.value)
            })?;
            real_eigs += 1;
        }
    }
    Ok(format!(
        "{T_SYMMETRIC_COUNT} instances, {real_eigs} real eigenvalues all even/even, worst [H,T] {worst_comm:.1e}"
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let fam = Family::resolve("heff", 1.0, 1.0).map_err(|e| e.to_string())?;
    let rep = sweep(&fam, -1.0, 1.0, 21, &tol()).map_err(|e| e.to_string())?;
    ensure(rep.transitions.len() == 1, || format!("{} transitions", rep.transitions.len()))?;
    let tr = &rep.transitions[0];
    ensure(tr.at == Some(0.0), || format!("transition at {:?}", tr))?;
    let rec = rep.records.iter().find(|r| r.param == 0.0).ok_or("no s = 0 record")?;
    ensure(rec.segre == vec![2], || format!("s = 0 blocks {:?}", rec.segre))?;
    ensure(rec.condition_i == Some(true), || "condition i) fails at s = 0".into())?;
    ensure(rec.blocks.len() == 1 && rec.blocks[0].0.im.abs() < 1e-12, || {
        format!("s = 0 eigenvalue {:?}", rec.blocks)
    })?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "one transition at s = 0 ({:?} -> {:?} -> {:?}), condition i) holds there, {:.2?}",
        tr.before,
        tr.at_structure.as_deref().unwrap_or(&[]),
        tr.after,
        start.elapsed()
    ))
}

fn criterion_9() -> Outcome {
    let t = tol();
    let h = j2_pair();
    let jd = jordan_decompose(&h, &t).map_err(|e| e.to_string())?;
    let cls = classify_spectrum(&jd, &t).map_err(|e| e.to_string())?;
    let tt = kramers_check(&jd, &cls).t.ok_or("no T")?;
    let form = symplectic_form(&h, &tt, &jd, &t).map_err(|e| e.to_string())?;
    ensure(form.quaternionic_residual <= LIMIT, || {
        format!("quaternionic residual {:e}", form.quaternionic_residual)
    })?;
    Ok(format!("quaternionic residual {:.1e}", form.quaternionic_residual))
}

fn run(number: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    match &outcome {
        Ok(detail) => println!("criterion {number} [{title}]: PASS ({detail})"),
        Err(detail) => println!("criterion {number} [{title}]: FAIL ({detail})"),
    }
    outcome.is_ok()
}

fn main() {
    let ens = ensemble();
    let results = [
        run(1, "2x2 Jordan block metric family", criterion_1),
        run(2, "structural and oracle verdicts agree", || criterion_2(&ens)),
        run(3, "metric certificate", || criterion_3(&ens)),
        run(4, "definiteness iff diagonalizable with real spectrum", || criterion_4(&ens)),
        run(5, "involutory symmetry and realification", || criterion_5(&ens)),
        run(6, "antilinear T with T^2 = -1 fixtures", criterion_6),
        run(7, "Kramers degeneracy", criterion_7),
        run(8, "H_eff sweep", criterion_8),
        run(9, "symplectic form", criterion_9),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
