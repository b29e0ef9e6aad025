//! Antilinear operators and the symmetries built from a Jordan decomposition:
//! the involutory symmetry `Ω̂`, realification, the Kramers operator `𝔗`
//! with `𝔗² = -1`, and the symmetry-adapted quaternionic form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jordan::JordanDecomposition;
use crate::numfield::{inverse_condition, orthonormal_basis, solve, ComplexMatrix, TolerancePolicy, C64};
use crate::pseudoherm::{conjugate_column_pairs, flip_operator, swap_operator, SpectralClassification};

/// Antilinear map `v ↦ L·conj(v)`, stored by its linear part `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearOp {
    linear: ComplexMatrix,
}

impl AntilinearOp {
    pub fn new(linear: ComplexMatrix) -> Self {
        AntilinearOp { linear }
    }

    pub fn linear_part(&self) -> &ComplexMatrix {
        &self.linear
    }

    pub fn dim(&self) -> usize {
        self.linear.rows()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let conj: Vec<C64> = v.iter().map(|z| z.conj()).collect();
        self.linear.mul_vec(&conj)
    }

    /// `self ∘ other`, a linear map `L₁·conj(L₂)`.
    pub fn compose(&self, other: &AntilinearOp) -> ComplexMatrix {
        &self.linear * &other.linear.conj()
    }

    /// `self²` as a linear map.
    pub fn square(&self) -> ComplexMatrix {
        self.compose(self)
    }

    /// `A ∘ self`.
    pub fn after_linear(&self, a: &ComplexMatrix) -> AntilinearOp {
        AntilinearOp::new(a * &self.linear)
    }

    /// `self ∘ A`.
    pub fn before_linear(&self, a: &ComplexMatrix) -> AntilinearOp {
        AntilinearOp::new(&self.linear * &a.conj())
    }

    /// `‖H L - L conj(H)‖ / (‖H‖‖L‖)`; zero exactly when `[H, LK] = 0`.
    pub fn commutation_residual(&self, h: &ComplexMatrix) -> f64 {
        let diff = (&(h * &self.linear) - &(&self.linear * &h.conj())).norm();
        let scale = h.norm() * self.linear.norm();
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareKind {
    PlusOne,
    MinusOne,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryCheck {
    pub commutes: bool,
    pub commutation_residual: f64,
    pub square_kind: SquareKind,
    /// `‖L conj(L) ∓ I‖` for the nearer sign.
    pub square_residual: f64,
}

/// Tests `[H, Ω] = 0` and classifies `Ω²` against `±1`.
pub fn verify_symmetry(h: &ComplexMatrix, omega: &AntilinearOp, tol: &TolerancePolicy) -> Result<SymmetryCheck> {
    if h.rows() != omega.dim() || !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator with a {}-dimensional antilinear map",
            h.rows(),
            h.cols(),
            omega.dim()
        )));
    }
    let commutation_residual = omega.commutation_residual(h);
    let sq = omega.square();
    let id = ComplexMatrix::identity(h.rows());
    let plus = (&sq - &id).norm();
    let minus = (&sq + &id).norm();
    let bound = tol.residual_tol * omega.linear_part().norm().powi(2).max(1.0);
    let (square_kind, square_residual) = if plus <= bound {
        (SquareKind::PlusOne, plus)
    } else if minus <= bound {
        (SquareKind::MinusOne, minus)
    } else {
        (SquareKind::Other, plus.min(minus))
    };
    Ok(SymmetryCheck {
        commutes: commutation_residual <= tol.residual_tol,
        commutation_residual,
        square_kind,
        square_residual,
    })
}

/// `Ω̂ = S†⁻¹ U S† Θ_E`, with linear part `P U Qᵀ`.
pub fn build_involutory_symmetry(jd: &JordanDecomposition, cls: &SpectralClassification) -> Result<AntilinearOp> {
    if !cls.condition_i_holds {
        return Err(Error::ConditionViolated);
    }
    let u = swap_operator(jd, cls)?;
    Ok(AntilinearOp::new(&(jd.psi() * &u) * &jd.phi().transpose()))
}

/// Recovers a (possibly non-Hermitian) metric from an antilinear symmetry:
/// `η = S V Θ_F S† Ω`, whose linear part is `Q V conj(Q† L)`.
pub fn symmetry_to_eta(
    h: &ComplexMatrix,
    omega: &AntilinearOp,
    jd: &JordanDecomposition,
    tol: &TolerancePolicy,
) -> Result<ComplexMatrix> {
    let check = verify_symmetry(h, omega, tol)?;
    if !check.commutes {
        return Err(Error::NotASymmetry(check.commutation_residual));
    }
    let ratio = inverse_condition(omega.linear_part());
    if ratio <= tol.rank_tol {
        return Err(Error::SingularMatrix { ratio });
    }
    let q = jd.phi();
    let v = flip_operator(jd);
    let inner = (&q.adjoint() * omega.linear_part()).conj();
    Ok(&(q * &v) * &inner)
}

#[derive(Debug, Clone)]
pub struct RealificationResult {
    pub m: ComplexMatrix,
    /// `M⁻¹ H M`
    pub realified: ComplexMatrix,
    /// Largest `|Im|` entry of `realified`.
    pub max_imag: f64,
    /// The scalar with `M = cL + conj(c)I`.
    pub scalar: C64,
    /// `‖L - M conj(M)⁻¹‖ / ‖L‖`
    pub factor_residual: f64,
}

/// Fixed scalars tried before random draws.
const REALIFY_SCALARS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (0.0, 1.0),
    (1.0, 1.0),
    (1.0, -1.0),
    (2.0, 1.0),
    (1.0, 2.0),
    (2.0, -1.0),
    (1.0, -2.0),
];

const REALIFY_RANDOM_DRAWS: usize = 64;

/// Finds `M` with `L = M conj(M)⁻¹` for an involutory `Ω = LK` commuting
/// with `H`; then `M⁻¹HM` is real.
pub fn realify(omega: &AntilinearOp, h: &ComplexMatrix, tol: &TolerancePolicy) -> Result<RealificationResult> {
    let check = verify_symmetry(h, omega, tol)?;
    if check.square_kind != SquareKind::PlusOne {
        return Err(Error::NotInvolutory(check.square_residual));
    }
    if !check.commutes {
        return Err(Error::NotASymmetry(check.commutation_residual));
    }
    let l = omega.linear_part();
    let n = l.rows();
    let id = ComplexMatrix::identity(n);
    let candidate = |c: C64| &l.scale(c) + &id.scale(c.conj());

    // L conj(M) = conj(c) L conj(L) + c L = M, so any invertible M works.
    // Among the fixed scalars keep the best conditioned one.
    let mut chosen: Option<(C64, ComplexMatrix, f64)> = None;
    for (a, b) in REALIFY_SCALARS {
        let c = C64::new(a, b);
        let m = candidate(c);
        let ratio = inverse_condition(&m);
        if ratio > tol.rank_tol && chosen.as_ref().is_none_or(|(_, _, r)| ratio > *r) {
            chosen = Some((c, m, ratio));
        }
    }
    if chosen.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x00c0_ffee);
        for _ in 0..REALIFY_RANDOM_DRAWS {
            let c = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let m = candidate(c);
            let ratio = inverse_condition(&m);
            if ratio > tol.rank_tol {
                chosen = Some((c, m, ratio));
                break;
            }
        }
    }
    let (scalar, m, _) = chosen.ok_or(Error::NoInvertibleM)?;
    let realified = solve(&m, &(h * &m), tol)?;
    // M conj(M)⁻¹ = L  ⇔  conj(M)ᵀ Lᵀ = Mᵀ
    let lt = solve(&m.conj().transpose(), &m.transpose(), tol)?;
    let factor_residual = (&lt.transpose() - l).norm() / l.norm();
    Ok(RealificationResult {
        max_imag: realified.max_abs_imag(),
        realified,
        m,
        scalar,
        factor_residual,
    })
}

/// A block at a real eigenvalue whose identical-block count is odd.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OffendingBlock {
    pub eigenvalue: C64,
    pub size: usize,
    pub count: usize,
}

/// Block pairing used by `𝔗`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KramersPairing {
    /// Pairs of identical blocks `(a, a')` at real eigenvalues.
    pub real_pairs: Vec<(usize, usize)>,
    /// Column pairs `(n₊,a,i) ↔ (n₋,a,i)`.
    pub conjugate_columns: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct KramersVerdict {
    pub pairing_ok: bool,
    pub offending_blocks: Vec<OffendingBlock>,
    pub t: Option<AntilinearOp>,
    pub t_square_residual: Option<f64>,
    pub t_commutation_residual: Option<f64>,
}

fn odd_real_blocks(jd: &JordanDecomposition, cls: &SpectralClassification) -> Vec<OffendingBlock> {
    let mut out = Vec::new();
    for r in &cls.real_eigs {
        let mut sizes = r.block_sizes.clone();
        sizes.dedup();
        for size in sizes {
            let count = jd
                .blocks()
                .iter()
                .filter(|b| b.eigenvalue_index == r.index && b.size == size)
                .count();
            if count % 2 == 1 {
                out.push(OffendingBlock {
                    eigenvalue: r.value,
                    size,
                    count,
                });
            }
        }
    }
    out
}

/// Pairs identical blocks at each real eigenvalue: within a size class of
/// `k` blocks (ledger order) block `j` is paired with block `j + k/2`.
pub fn kramers_pairing(jd: &JordanDecomposition, cls: &SpectralClassification) -> Result<KramersPairing> {
    if !cls.condition_i_holds {
        return Err(Error::PairingUnavailable("spectrum violates the pairing condition".into()));
    }
    let odd = odd_real_blocks(jd, cls);
    if let Some(b) = odd.first() {
        return Err(Error::PairingUnavailable(format!(
            "{} block(s) of size {} at real eigenvalue {:.6}",
            b.count, b.size, b.eigenvalue.re
        )));
    }
    let mut real_pairs = Vec::new();
    for r in &cls.real_eigs {
        let mut sizes = r.block_sizes.clone();
        sizes.dedup();
        for size in sizes {
            let class: Vec<usize> = jd
                .blocks_of(r.index)
                .into_iter()
                .filter(|&b| jd.blocks()[b].size == size)
                .collect();
            let half = class.len() / 2;
            real_pairs.extend((0..half).map(|j| (class[j], class[j + half])));
        }
    }
    Ok(KramersPairing {
        real_pairs,
        conjugate_columns: conjugate_column_pairs(jd, cls)?,
    })
}

/// `𝔗 = Σ (|ψ_a⟩K⟨φ_a'| - |ψ_a'⟩K⟨φ_a|) + Σ (|ψ₋⟩K⟨φ₊| - |ψ₊⟩K⟨φ₋|)`,
/// with linear part `P Π Qᵀ`.
pub fn build_t(jd: &JordanDecomposition, pairing: &KramersPairing) -> Result<AntilinearOp> {
    let n = jd.dim();
    let mut pi = ComplexMatrix::zeros(n, n);
    let one = C64::new(1.0, 0.0);
    let mut covered = vec![false; n];
    for &(a, b) in &pairing.real_pairs {
        for (ca, cb) in jd.block_columns(a).zip(jd.block_columns(b)) {
            pi.set(ca, cb, one);
            pi.set(cb, ca, -one);
            covered[ca] = true;
            covered[cb] = true;
        }
    }
    for &(plus, minus) in &pairing.conjugate_columns {
        pi.set(minus, plus, one);
        pi.set(plus, minus, -one);
        covered[plus] = true;
        covered[minus] = true;
    }
    if let Some(col) = covered.iter().position(|c| !c) {
        return Err(Error::PairingUnavailable(format!("column {col} is not paired")));
    }
    Ok(AntilinearOp::new(&(jd.psi() * &pi) * &jd.phi().transpose()))
}

/// Runs the block-pairing test and, when it passes, builds `𝔗` and records
/// its residuals.
pub fn kramers_check(jd: &JordanDecomposition, cls: &SpectralClassification) -> KramersVerdict {
    let offending_blocks = odd_real_blocks(jd, cls);
    let pairing_ok = offending_blocks.is_empty();
    let t = if pairing_ok && cls.condition_i_holds {
        kramers_pairing(jd, cls).and_then(|p| build_t(jd, &p)).ok()
    } else {
        None
    };
    let id = ComplexMatrix::identity(jd.dim());
    KramersVerdict {
        pairing_ok,
        offending_blocks,
        t_square_residual: t.as_ref().map(|t| (&t.square() + &id).norm()),
        t_commutation_residual: t.as_ref().map(|t| t.commutation_residual(jd.operator())),
        t,
    }
}

#[derive(Debug, Clone)]
pub struct SymplecticForm {
    /// `H` in the basis `{ψ_1..ψ_m, 𝔗ψ_1..𝔗ψ_m}`.
    pub matrix: ComplexMatrix,
    pub basis: ComplexMatrix,
    /// Largest entrywise violation of `[[Z₁, Z₂], [-conj(Z₂), conj(Z₁)]]`.
    pub quaternionic_residual: f64,
}

/// Expresses `H` in a symmetry-adapted basis `{ψ, 𝔗ψ}`. Basis vectors are
/// taken greedily from the Jordan chains, preferring eigenvalues with
/// non-negative imaginary part, skipping any vector already in the span.
pub fn symplectic_form(
    h: &ComplexMatrix,
    t: &AntilinearOp,
    jd: &JordanDecomposition,
    tol: &TolerancePolicy,
) -> Result<SymplecticForm> {
    let check = verify_symmetry(h, t, tol)?;
    if !check.commutes {
        return Err(Error::NotTSymmetric(check.commutation_residual));
    }
    if check.square_kind != SquareKind::MinusOne {
        return Err(Error::NotTSymmetric(check.square_residual));
    }
    let n = h.rows();
    let real_thr = tol.realness_tol * jd.operator_norm();
    let mut candidates: Vec<usize> = Vec::with_capacity(n);
    let mut lower: Vec<usize> = Vec::new();
    for (b, spec) in jd.blocks().iter().enumerate() {
        let cols = jd.block_columns(b);
        if jd.eigenvalues()[spec.eigenvalue_index].im < -real_thr {
            lower.extend(cols);
        } else {
            candidates.extend(cols);
        }
    }
    candidates.extend(lower);

    let psi = jd.psi();
    let mut chosen: Vec<usize> = Vec::new();
    let mut span = ComplexMatrix::zeros(n, 0);
    for col in candidates {
        if 2 * chosen.len() == n {
            break;
        }
        let v = psi.select_columns(&[col]);
        let tv = ComplexMatrix::from_columns(n, &[t.apply(&v.column(0))])?;
        let trial = span.hstack(&v)?.hstack(&tv)?;
        if orthonormal_basis(&trial, tol.rank_tol).cols() == trial.cols() {
            span = trial;
            chosen.push(col);
        }
    }
    if 2 * chosen.len() != n {
        return Err(Error::PairingUnavailable("could not complete a {ψ, 𝔗ψ} basis".into()));
    }
    let x = psi.select_columns(&chosen);
    let tx = ComplexMatrix::from_fn(n, chosen.len(), |i, j| {
        t.linear_part().mul_vec(&x.column(j).iter().map(|z| z.conj()).collect::<Vec<_>>())[i]
    });
    let basis = x.hstack(&tx)?;
    let matrix = solve(&basis, &(h * &basis), tol)?;
    let quaternionic_residual = quaternionic_residual(&matrix);
    Ok(SymplecticForm {
        matrix,
        basis,
        quaternionic_residual,
    })
}

/// Largest entrywise deviation of a `2m × 2m` matrix from the block form
/// `[[Z₁, Z₂], [-conj(Z₂), conj(Z₁)]]`.
pub fn quaternionic_residual(m: &ComplexMatrix) -> f64 {
    let half = m.rows() / 2;
    let mut worst = 0.0f64;
    for i in 0..half {
        for j in 0..half {
            let z1 = m.get(i, j);
            let z2 = m.get(i, j + half);
            worst = worst.max((m.get(i + half, j) + z2.conj()).norm());
            worst = worst.max((m.get(i + half, j + half) - z1.conj()).norm());
        }
    }
    worst
}

/// Standard symplectic unit `[[0, I], [-I, 0]]` of even dimension.
pub fn symplectic_unit(n: usize) -> ComplexMatrix {
    assert!(n.is_multiple_of(2), "symplectic unit needs even dimension");
    let h = n / 2;
    ComplexMatrix::from_fn(n, n, |i, j| {
        if j == i + h {
            C64::new(1.0, 0.0)
        } else if i == j + h {
            C64::new(-1.0, 0.0)
        } else {
            C64::default()
        }
    })
}

#[derive(Debug, Clone)]
pub struct FalsifierOutcome {
    pub samples: usize,
    /// A sampled `𝔗` with `𝔗² = -1` that commutes with `H`, if any.
    pub witness: Option<AntilinearOp>,
    /// Smallest commutation residual seen.
    pub best_residual: f64,
}

/// Samples antilinear maps `L = M J conj(M)⁻¹` (so `L conj(L) = -I`) with
/// random `M` and looks for one commuting with `H`. Odd dimensions admit no
/// such map and return immediately.
pub fn kramers_falsifier(h: &ComplexMatrix, samples: usize, seed: u64, tol: &TolerancePolicy) -> FalsifierOutcome {
    let n = h.rows();
    if n % 2 == 1 {
        return FalsifierOutcome {
            samples: 0,
            witness: None,
            best_residual: f64::INFINITY,
        };
    }
    let j = symplectic_unit(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let m = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        // L = M J conj(M)⁻¹  ⇔  conj(M)ᵀ Lᵀ = (M J)ᵀ
        let Ok(lt) = solve(&m.conj().transpose(), &(&m * &j).transpose(), tol) else {
            continue;
        };
        let op = AntilinearOp::new(lt.transpose());
        let res = op.commutation_residual(h);
        best = best.min(res);
        if res <= tol.residual_tol {
            return FalsifierOutcome {
                samples,
                witness: Some(op),
                best_residual: best,
            };
        }
    }
    FalsifierOutcome {
        samples,
        witness: None,
        best_residual: best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::{conjugation_of_frame, jordan_decompose};
    use crate::numfield::{c, re};
    use crate::pseudoherm::{classify_spectrum, pseudo_hermiticity_residual};

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn setup(h: &ComplexMatrix) -> (JordanDecomposition, SpectralClassification) {
        let jd = jordan_decompose(h, &tol()).unwrap();
        let cls = classify_spectrum(&jd, &tol()).unwrap();
        (jd, cls)
    }

    fn j2_pair() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[
            &[1.0, 1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 1.0],
            &[0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn composition_rules() {
        let l1 = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), re(0.5)], vec![c(0.0, -1.0), re(3.0)]]).unwrap();
        let l2 = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0), re(1.0)], vec![re(2.0), c(1.0, 1.0)]]).unwrap();
        let a = AntilinearOp::new(l1.clone());
        let b = AntilinearOp::new(l2.clone());
        assert_eq!(a.compose(&b), &l1 * &l2.conj());
        let v = [c(0.3, -0.7), c(1.0, 0.25)];
        let direct = a.apply(&b.apply(&v));
        let via = a.compose(&b).mul_vec(&v);
        for (x, y) in direct.iter().zip(&via) {
            assert!((x - y).norm() < 1e-14);
        }
        assert_eq!(conjugation_of_frame(3).square(), ComplexMatrix::identity(3));
    }

    #[test]
    fn verify_examples() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let k = verify_symmetry(&h, &conjugation_of_frame(2), &tol()).unwrap();
        assert!(k.commutes);
        assert_eq!(k.square_kind, SquareKind::PlusOne);

        let j = AntilinearOp::new(symplectic_unit(2));
        let chk = verify_symmetry(&h, &j, &tol()).unwrap();
        assert_eq!(chk.square_kind, SquareKind::MinusOne);
        // H J = J conj(H) fails for this H
        assert!(!chk.commutes);
        let e = ComplexMatrix::diagonal(&[re(2.0), re(2.0)]);
        assert!(verify_symmetry(&e, &j, &tol()).unwrap().commutes);
    }

    #[test]
    fn heff_has_no_minus_one_symmetry() {
        let heff = ComplexMatrix::from_rows(&[vec![re(1.0), c(0.0, 1.0)], vec![re(0.0), re(1.0)]]).unwrap();
        let out = kramers_falsifier(&heff, 500, 7, &tol());
        assert!(out.witness.is_none());
        for l in [symplectic_unit(2), symplectic_unit(2).scale(c(0.0, 1.0))] {
            let op = AntilinearOp::new(l);
            let chk = verify_symmetry(&heff, &op, &tol()).unwrap();
            assert_eq!(chk.square_kind, SquareKind::MinusOne);
            assert!(!chk.commutes);
        }
    }

    #[test]
    fn involutory_symmetry_real_diagonal() {
        let h = ComplexMatrix::diagonal(&[re(1.0), re(-2.0), re(3.5)]);
        let (jd, cls) = setup(&h);
        let omega = build_involutory_symmetry(&jd, &cls).unwrap();
        let chk = verify_symmetry(&h, &omega, &tol()).unwrap();
        assert!(chk.commutes);
        assert_eq!(chk.square_kind, SquareKind::PlusOne);
        // for a real eigenbasis the symmetry is plain conjugation up to eigenvector phases,
        // so it maps real vectors in each eigenline back to the same line
        for j in 0..3 {
            let mut e = vec![re(0.0); 3];
            e[j] = re(1.0);
            let out = omega.apply(&e);
            assert!((out[j].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn involutory_symmetry_swaps_pair() {
        let i = c(0.0, 1.0);
        let h = ComplexMatrix::diagonal(&[i, -i]);
        // L = swap commutes: H L = L conj(H)
        let swap = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!((&(&h * &swap) - &(&swap * &h.conj())).norm() == 0.0);
        let (jd, cls) = setup(&h);
        let omega = build_involutory_symmetry(&jd, &cls).unwrap();
        let chk = verify_symmetry(&h, &omega, &tol()).unwrap();
        assert!(chk.commutes && chk.square_kind == SquareKind::PlusOne);
        let l = omega.linear_part();
        assert!(l.get(0, 0).norm() < 1e-14 && l.get(1, 1).norm() < 1e-14);
        assert!((l.get(0, 1).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn involutory_symmetry_requires_condition() {
        let (jd, cls) = setup(&ComplexMatrix::diagonal(&[c(0.0, 1.0)]));
        assert!(matches!(build_involutory_symmetry(&jd, &cls), Err(Error::ConditionViolated)));
    }

    #[test]
    fn eta_from_symmetry() {
        let h = ComplexMatrix::diagonal(&[re(1.0), re(2.0)]);
        let (jd, _) = setup(&h);
        let eta = symmetry_to_eta(&h, &conjugation_of_frame(2), &jd, &tol()).unwrap();
        assert!(pseudo_hermiticity_residual(&eta, &h, &tol()).unwrap() < 1e-14);

        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let (jd, _) = setup(&a);
        let eta = symmetry_to_eta(&a, &conjugation_of_frame(2), &jd, &tol()).unwrap();
        let flip = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!((&eta - &flip).norm() < 1e-14);
        assert!(pseudo_hermiticity_residual(&eta, &a, &tol()).unwrap() < 1e-14);

        let not_sym = AntilinearOp::new(symplectic_unit(2));
        assert!(matches!(
            symmetry_to_eta(&a, &not_sym, &jd, &tol()),
            Err(Error::NotASymmetry(_))
        ));
    }

    #[test]
    fn realify_scalar_determinant() {
        // det(conj(c) I + c L) = conj(c)² - c² for the swap L
        let swap = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let id = ComplexMatrix::identity(2);
        for (c0, expected) in [(c(1.0, 0.0), c(0.0, 0.0)), (c(0.0, 1.0), c(0.0, 0.0)), (c(1.0, 1.0), c(0.0, -4.0))] {
            let m = &swap.scale(c0) + &id.scale(c0.conj());
            let d = crate::numfield::det(&m).unwrap();
            assert!((d - expected).norm() < 1e-14);
            assert!((d - (c0.conj() * c0.conj() - c0 * c0)).norm() < 1e-14);
        }
        let h = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]);
        let res = realify(&AntilinearOp::new(swap.clone()), &h, &tol()).unwrap();
        assert!(res.max_imag <= 1e-10);
        assert!(res.factor_residual < 1e-14);
        // real 2x2 with eigenvalues ±i: trace 0, det 1
        assert!(res.realified.trace().norm() < 1e-12);
        assert!((crate::numfield::det(&res.realified).unwrap() - re(1.0)).norm() < 1e-12);
    }

    #[test]
    fn realify_identity() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.5, -1.0]]).unwrap();
        let res = realify(&conjugation_of_frame(2), &h, &tol()).unwrap();
        assert_eq!(res.max_imag, 0.0);
        assert!((&res.realified - &h).norm() < 1e-14);
    }

    #[test]
    fn realify_rejects_non_involution() {
        let h = ComplexMatrix::diagonal(&[re(2.0), re(2.0)]);
        let op = AntilinearOp::new(symplectic_unit(2));
        assert!(matches!(realify(&op, &h, &tol()), Err(Error::NotInvolutory(_))));
    }

    #[test]
    fn kramers_on_paired_blocks() {
        let h = j2_pair();
        let (jd, cls) = setup(&h);
        let verdict = kramers_check(&jd, &cls);
        assert!(verdict.pairing_ok);
        assert!(verdict.t_square_residual.unwrap() < 1e-12);
        assert!(verdict.t_commutation_residual.unwrap() < 1e-12);
    }

    #[test]
    fn kramers_on_heff() {
        let heff = ComplexMatrix::from_rows(&[vec![re(1.0), c(0.0, 1.0)], vec![re(0.0), re(1.0)]]).unwrap();
        let (jd, cls) = setup(&heff);
        let verdict = kramers_check(&jd, &cls);
        assert!(!verdict.pairing_ok);
        assert!(verdict.t.is_none());
        assert_eq!(verdict.offending_blocks.len(), 1);
        assert_eq!(verdict.offending_blocks[0].size, 2);
        assert_eq!(verdict.offending_blocks[0].count, 1);
        assert!(matches!(kramers_pairing(&jd, &cls), Err(Error::PairingUnavailable(_))));
    }

    #[test]
    fn kramers_on_conjugate_pair() {
        let i = c(0.0, 1.0);
        let h = ComplexMatrix::diagonal(&[i, -i]);
        let (jd, cls) = setup(&h);
        let verdict = kramers_check(&jd, &cls);
        assert!(verdict.pairing_ok);
        let t = verdict.t.unwrap();
        // H L = L conj(H) with L = [[0,-1],[1,0]]
        let l = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        let lhs = &h * &l;
        let expected = ComplexMatrix::from_rows(&[vec![re(0.0), -i], vec![-i, re(0.0)]]).unwrap();
        assert_eq!(lhs, expected);
        assert_eq!(&l * &h.conj(), expected);
        assert!((&t.square() + &ComplexMatrix::identity(2)).norm() < 1e-14);
        assert!(t.commutation_residual(&h) < 1e-14);
    }

    #[test]
    fn t_for_doubled_real_eigenvalue() {
        let h = ComplexMatrix::diagonal(&[re(3.0), re(3.0)]);
        let (jd, cls) = setup(&h);
        let pairing = kramers_pairing(&jd, &cls).unwrap();
        assert_eq!(pairing.real_pairs, vec![(0, 1)]);
        let t = build_t(&jd, &pairing).unwrap();
        assert!((&t.square() + &ComplexMatrix::identity(2)).norm() < 1e-14);
        let form = symplectic_form(&h, &t, &jd, &tol()).unwrap();
        assert!((&form.matrix - &h).norm() < 1e-13);
    }

    #[test]
    fn symplectic_examples() {
        let h = j2_pair();
        let (jd, cls) = setup(&h);
        let t = kramers_check(&jd, &cls).t.unwrap();
        let form = symplectic_form(&h, &t, &jd, &tol()).unwrap();
        let z1 = form.matrix.sub_matrix(0, 0, 2, 2);
        let z2 = form.matrix.sub_matrix(0, 2, 2, 2);
        let j2 = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!((&z1 - &j2).norm() < 1e-12);
        assert!(z2.norm() < 1e-12);
        assert!(form.quaternionic_residual < 1e-12);

        let i = c(0.0, 1.0);
        let h = ComplexMatrix::diagonal(&[i, -i]);
        let (jd, cls) = setup(&h);
        let t = kramers_check(&jd, &cls).t.unwrap();
        let form = symplectic_form(&h, &t, &jd, &tol()).unwrap();
        assert!((&form.matrix - &ComplexMatrix::diagonal(&[i, -i])).norm() < 1e-12);
    }

    #[test]
    fn symplectic_rejects_non_symmetry() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let (jd, _) = setup(&h);
        let t = AntilinearOp::new(symplectic_unit(2));
        assert!(matches!(symplectic_form(&h, &t, &jd, &tol()), Err(Error::NotTSymmetric(_))));
    }
}
