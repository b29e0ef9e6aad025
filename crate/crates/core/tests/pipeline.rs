//! End-to-end fixtures through the public API.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pseudoherm::antisym::{
    build_involutory_symmetry, kramers_check, quaternionic_residual, realify, symmetry_to_eta, symplectic_form,
    verify_symmetry, AntilinearOp, SquareKind,
};
use pseudoherm::ensemble::{jordan_matrix, random_similarity};
use pseudoherm::jordan::{assemble_jordan_matrix, jordan_decompose, JordanBlockSpec};
use pseudoherm::numfield::{c, distance, eigenvalues, inverse, re};
use pseudoherm::pseudoherm::{
    build_eta, classify_spectrum, eta_inner, inertia, intertwiner_space, pseudo_hermiticity_residual, pseudonorm,
};
use pseudoherm::report::analyze;
use pseudoherm::{ComplexMatrix, TolerancePolicy, C64};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows).unwrap()
}

fn similar(blocks: &[(C64, usize)], seed: u64) -> ComplexMatrix {
    let j = jordan_matrix(blocks);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_similarity(j.rows(), 20.0, &mut rng);
    let p_inv = inverse(&p, &tol()).unwrap();
    &(&p * &j) * &p_inv
}

#[test]
fn eigenvalues_of_heff_at_r1_s2() {
    let h = ComplexMatrix::from_rows(&[vec![re(0.0), c(0.0, 1.0)], vec![c(0.0, 2.0), re(0.0)]]).unwrap();
    let mut ev = eigenvalues(&h).unwrap();
    ev.sort_by(|a, b| a.im.total_cmp(&b.im));
    let s = 2f64.sqrt();
    assert!((ev[0] - c(0.0, -s)).norm() < 1e-12);
    assert!((ev[1] - c(0.0, s)).norm() < 1e-12);
}

#[test]
fn nilpotent_block_ledger() {
    let jd = jordan_decompose(&real(&[&[0., 1.], &[0., 0.]]), &tol()).unwrap();
    assert_eq!(jd.eigenvalues().len(), 1);
    assert!(jd.eigenvalues()[0].norm() < 1e-14);
    assert_eq!(jd.blocks().len(), 1);
    assert_eq!(jd.blocks()[0].size, 2);
    assert_eq!(jd.geometric_multiplicity(0), 1);
    assert_eq!(jd.algebraic_multiplicity(0), 2);
}

#[test]
fn identity_ledger() {
    let jd = jordan_decompose(&ComplexMatrix::identity(3), &tol()).unwrap();
    assert_eq!(jd.blocks().len(), 3);
    assert_eq!(jd.geometric_multiplicity(0), 3);
    assert_eq!(jd.identical_block_count(0), 3);
}

#[test]
fn doubled_jordan_block_under_similarity() {
    let h = similar(&[(re(1.0), 2), (re(1.0), 2)], 3);
    let jd = jordan_decompose(&h, &tol()).unwrap();
    assert_eq!(jd.block_sizes(0), vec![2, 2]);
    assert_eq!(jd.identical_block_count(0), 2);
    assert!((jd.eigenvalues()[0] - re(1.0)).norm() < 1e-9);
    let labels: Vec<usize> = jd.blocks().iter().map(|b| b.degeneracy_label).collect();
    assert_eq!(labels, vec![1, 2]);
}

#[test]
fn assembled_pair_round_trips() {
    let blocks = [
        JordanBlockSpec {
            eigenvalue_index: 0,
            degeneracy_label: 1,
            size: 2,
        },
        JordanBlockSpec {
            eigenvalue_index: 1,
            degeneracy_label: 1,
            size: 2,
        },
    ];
    let m = assemble_jordan_matrix(&blocks, &[c(0.0, 1.0), c(0.0, -1.0)]);
    let jd = jordan_decompose(&m, &tol()).unwrap();
    assert_eq!(jd.segre_sizes(), vec![2, 2]);
    let cls = classify_spectrum(&jd, &tol()).unwrap();
    assert_eq!(cls.paired_eigs.len(), 1);
    assert!(cls.condition_i_holds);
}

#[test]
fn classification_fixtures() {
    let cases: [(ComplexMatrix, bool); 3] = [
        (real(&[&[1., 0.], &[0., 2.]]), true),
        (
            ComplexMatrix::from_rows(&[vec![re(0.0), c(0.0, 1.0)], vec![c(0.0, 2.0), re(0.0)]]).unwrap(),
            true,
        ),
        (ComplexMatrix::diagonal(&[c(0.0, 1.0)]), false),
    ];
    for (h, expected) in cases {
        let jd = jordan_decompose(&h, &tol()).unwrap();
        assert_eq!(classify_spectrum(&jd, &tol()).unwrap().condition_i_holds, expected);
    }
}

#[test]
fn mixed_six_dimensional_metric() {
    let h = similar(&[(re(1.0), 2), (c(0.0, 1.0), 1), (c(0.0, -1.0), 1), (re(3.0), 2)], 17);
    let jd = jordan_decompose(&h, &tol()).unwrap();
    let cls = classify_spectrum(&jd, &tol()).unwrap();
    let (_, metric) = build_eta(&jd, &cls, &tol()).unwrap();
    assert!(metric.residual <= 1e-9);
    assert!(pseudo_hermiticity_residual(&metric.eta, &h, &tol()).unwrap() <= 1e-9);
    assert!(!metric.inertia.is_definite());

    let omega = build_involutory_symmetry(&jd, &cls).unwrap();
    let check = verify_symmetry(&h, &omega, &tol()).unwrap();
    assert!(check.commutes);
    assert_eq!(check.square_kind, SquareKind::PlusOne);
    assert!(check.square_residual <= 1e-9);
    let r = realify(&omega, &h, &tol()).unwrap();
    assert!(r.max_imag <= 1e-9 * h.op_norm());
}

#[test]
fn counterexample_metric_has_negative_pseudonorm() {
    let eta = real(&[&[0., 1.], &[1., 0.]]);
    let i = inertia(&eta, &tol()).unwrap();
    assert_eq!((i.positive, i.negative), (1, 1));
    let s = 0.5f64.sqrt();
    let plus = pseudonorm(&eta, &[re(s), re(s)]).unwrap();
    let minus = pseudonorm(&eta, &[re(s), re(-s)]).unwrap();
    assert!((plus - re(1.0)).norm() < 1e-15);
    assert!((minus - re(-1.0)).norm() < 1e-15);
    let cross = eta_inner(&eta, &[re(1.0), re(0.0)], &[re(0.0), re(1.0)]).unwrap();
    assert!((cross - re(1.0)).norm() < 1e-15);
}

#[test]
fn counterexample_intertwiner_space() {
    for e in [-2.0, 0.0, 1.0, 3.5] {
        let a = real(&[&[e, 1.], &[0., e]]);
        let basis = intertwiner_space(&a, true, &tol()).unwrap();
        assert_eq!(basis.len(), 2);
        for s in &basis {
            assert!(s.get(0, 0).norm() < 1e-12, "top-left of {s:?}");
            assert!((s.get(0, 1) - s.get(1, 0)).norm() < 1e-12);
            assert!(s.get(0, 1).im.abs() < 1e-12 && s.get(1, 1).im.abs() < 1e-12);
        }
    }
    let basis = intertwiner_space(&ComplexMatrix::diagonal(&[c(0.0, 1.0)]), true, &tol()).unwrap();
    assert!(basis.is_empty());
}

#[test]
fn symmetry_to_eta_for_jordan_block() {
    let a = real(&[&[1., 1.], &[0., 1.]]);
    let jd = jordan_decompose(&a, &tol()).unwrap();
    let eta = symmetry_to_eta(&a, &AntilinearOp::new(ComplexMatrix::identity(2)), &jd, &tol()).unwrap();
    assert!(pseudo_hermiticity_residual(&eta, &a, &tol()).unwrap() <= 1e-9);
    let i = inertia(&eta.hermitian_part(), &tol()).unwrap();
    assert_eq!((i.positive, i.negative), (1, 1));
}

#[test]
fn kramers_fixtures() {
    let jj = real(&[&[1., 1., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 1., 1.], &[0., 0., 0., 1.]]);
    let jd = jordan_decompose(&jj, &tol()).unwrap();
    let cls = classify_spectrum(&jd, &tol()).unwrap();
    let v = kramers_check(&jd, &cls);
    assert!(v.pairing_ok);
    let t = v.t.expect("T for J2(1) + J2(1)");
    assert!(distance(&t.square(), &ComplexMatrix::identity(4).scale(re(-1.0))) <= 1e-9);
    assert!(t.commutation_residual(&jj) <= 1e-9);
    let form = symplectic_form(&jj, &t, &jd, &tol()).unwrap();
    assert!(form.quaternionic_residual <= 1e-9);
    assert!(quaternionic_residual(&form.matrix) <= 1e-9);

    let heff = ComplexMatrix::from_rows(&[vec![re(1.0), c(0.0, 1.0)], vec![re(0.0), re(1.0)]]).unwrap();
    let jd = jordan_decompose(&heff, &tol()).unwrap();
    let cls = classify_spectrum(&jd, &tol()).unwrap();
    let v = kramers_check(&jd, &cls);
    assert!(!v.pairing_ok);
    assert!(v.t.is_none());

    let pair = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]);
    let jd = jordan_decompose(&pair, &tol()).unwrap();
    let cls = classify_spectrum(&jd, &tol()).unwrap();
    let v = kramers_check(&jd, &cls);
    assert!(v.pairing_ok);
    let t = v.t.expect("T for diag(i, -i)");
    assert!(t.commutation_residual(&pair) <= 1e-9);
    let form = symplectic_form(&pair, &t, &jd, &tol()).unwrap();
    assert!(quaternionic_residual(&form.matrix) <= 1e-9);
}

#[test]
fn report_for_counterexample() {
    let a = real(&[&[1., 1.], &[0., 1.]]);
    let report = analyze(&a, &tol()).unwrap();
    assert!(report.is_pseudo_hermitian());
    assert!(report.verdict.agree);
    assert!(!report.jordan.diagonalizable);
    let eta = report.eta.as_ref().unwrap();
    assert_eq!((eta.inertia.positive, eta.inertia.negative), (1, 1));
    assert!(!report.kramers.pairing_ok);
    let falsifier = report.kramers.falsifier.as_ref().unwrap();
    assert!(!falsifier.witness_found);
    assert!(report.stage_errors.is_empty());
}
