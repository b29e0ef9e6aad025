//! Spectral classification, the metric `η = S U V S†`, inertia, and the
//! intertwiner-space oracle that solves `ηH = H†η` directly.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jordan::JordanDecomposition;
use crate::numfield::{
    check_square, hermitian_eigenvalues, inverse_condition, singular_values, solve, svd, ComplexMatrix, TolerancePolicy, C64,
};

/// Random combinations tried when looking for an invertible intertwiner.
pub const INVERTIBILITY_SAMPLES: usize = 50;

const ORACLE_SEED: u64 = 0x0005_eed0_fe7a;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealEigenvalue {
    pub index: usize,
    pub value: C64,
    pub block_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugatePair {
    /// Eigenvalue index with positive imaginary part.
    pub plus_index: usize,
    /// Eigenvalue index with negative imaginary part.
    pub minus_index: usize,
    pub plus_value: C64,
    pub minus_value: C64,
    pub plus_blocks: Vec<usize>,
    pub minus_blocks: Vec<usize>,
    /// `|E₋ - conj(E₊)|`
    pub conjugation_residual: f64,
    pub jordan_match: bool,
}

/// Partition of the spectrum into real eigenvalues, conjugate pairs, and
/// unpaired complex eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralClassification {
    pub real_eigs: Vec<RealEigenvalue>,
    pub paired_eigs: Vec<ConjugatePair>,
    pub unpaired_complex: Vec<(usize, C64)>,
    pub condition_i_holds: bool,
}

impl SpectralClassification {
    pub fn is_real_spectrum(&self) -> bool {
        self.paired_eigs.is_empty() && self.unpaired_complex.is_empty()
    }

    pub fn is_real(&self, eigenvalue_index: usize) -> bool {
        self.real_eigs.iter().any(|r| r.index == eigenvalue_index)
    }
}

/// Classifies the spectrum from the Jordan ledger.
pub fn classify_spectrum(jd: &JordanDecomposition, tol: &TolerancePolicy) -> Result<SpectralClassification> {
    let scale = jd.operator_norm();
    let real_thr = tol.realness_tol * scale;
    let link = tol.eig_cluster_tol * scale;

    let mut real_eigs = Vec::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (n, &e) in jd.eigenvalues().iter().enumerate() {
        let im = e.im.abs();
        if im <= 0.5 * real_thr {
            real_eigs.push(RealEigenvalue {
                index: n,
                value: e,
                block_sizes: jd.block_sizes(n),
            });
        } else if im <= 2.0 * real_thr {
            return Err(Error::AmbiguousRealness { re: e.re, im: e.im });
        } else if e.im > 0.0 {
            plus.push(n);
        } else {
            minus.push(n);
        }
    }

    let ev = jd.eigenvalues();
    let mut paired_eigs = Vec::new();
    let mut unpaired_complex = Vec::new();
    let mut minus_used = vec![false; minus.len()];
    for &p in &plus {
        let target = ev[p].conj();
        let best = (0..minus.len())
            .filter(|&k| !minus_used[k])
            .map(|k| (k, (ev[minus[k]] - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((k, d)) if d <= link => {
                minus_used[k] = true;
                let m = minus[k];
                let plus_blocks = jd.block_sizes(p);
                let minus_blocks = jd.block_sizes(m);
                paired_eigs.push(ConjugatePair {
                    plus_index: p,
                    minus_index: m,
                    plus_value: ev[p],
                    minus_value: ev[m],
                    jordan_match: plus_blocks == minus_blocks,
                    plus_blocks,
                    minus_blocks,
                    conjugation_residual: d,
                });
            }
            _ => unpaired_complex.push((p, ev[p])),
        }
    }
    for (k, &m) in minus.iter().enumerate() {
        if !minus_used[k] {
            unpaired_complex.push((m, ev[m]));
        }
    }
    unpaired_complex.sort_by_key(|&(n, _)| n);

    let condition_i_holds = unpaired_complex.is_empty() && paired_eigs.iter().all(|p| p.jordan_match);
    Ok(SpectralClassification {
        real_eigs,
        paired_eigs,
        unpaired_complex,
        condition_i_holds,
    })
}

/// Column pairs `(n₊,a,i) ↔ (n₋,a,i)` matching conjugate blocks by ledger
/// order (descending size).
pub fn conjugate_column_pairs(jd: &JordanDecomposition, cls: &SpectralClassification) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for pair in &cls.paired_eigs {
        let pb = jd.blocks_of(pair.plus_index);
        let mb = jd.blocks_of(pair.minus_index);
        if pb.len() != mb.len() {
            return Err(Error::PairingMismatch(format!(
                "{} blocks at {:.6} but {} at its conjugate",
                pb.len(),
                pair.plus_value,
                mb.len()
            )));
        }
        for (&bp, &bm) in pb.iter().zip(&mb) {
            if jd.blocks()[bp].size != jd.blocks()[bm].size {
                return Err(Error::PairingMismatch(format!(
                    "block sizes {} and {} at {:.6}",
                    jd.blocks()[bp].size,
                    jd.blocks()[bm].size,
                    pair.plus_value
                )));
            }
            out.extend(jd.block_columns(bp).zip(jd.block_columns(bm)));
        }
    }
    Ok(out)
}

/// Swap of conjugate-pair frame vectors, identity on real-eigenvalue vectors.
pub fn swap_operator(jd: &JordanDecomposition, cls: &SpectralClassification) -> Result<ComplexMatrix> {
    let n = jd.dim();
    let mut perm: Vec<usize> = (0..n).collect();
    for (p, m) in conjugate_column_pairs(jd, cls)? {
        perm[p] = m;
        perm[m] = p;
    }
    Ok(permutation_matrix(&perm))
}

/// Reversal of chain order within every block: `|u_{n,a,i}⟩ ↦ |u_{n,a,p+1-i}⟩`.
pub fn flip_operator(jd: &JordanDecomposition) -> ComplexMatrix {
    let n = jd.dim();
    let mut perm: Vec<usize> = (0..n).collect();
    for b in 0..jd.blocks().len() {
        let cols: Vec<usize> = jd.block_columns(b).collect();
        for (k, &col) in cols.iter().enumerate() {
            perm[col] = cols[cols.len() - 1 - k];
        }
    }
    permutation_matrix(&perm)
}

/// Matrix sending `e_j` to `e_{perm[j]}`.
fn permutation_matrix(perm: &[usize]) -> ComplexMatrix {
    let n = perm.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (j, &i) in perm.iter().enumerate() {
        m.set(i, j, C64::new(1.0, 0.0));
    }
    m
}

/// Label of a frame vector `|u_{n,a,i}⟩` (the standard basis vector at `column`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrameLabel {
    pub column: usize,
    pub eigenvalue_index: usize,
    pub degeneracy_label: usize,
    pub position: usize,
}

#[derive(Debug, Clone)]
pub struct EtaConstruction {
    pub s: ComplexMatrix,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub eta_tilde: ComplexMatrix,
    pub frame_pairing: Vec<FrameLabel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
}

impl Inertia {
    pub fn is_definite(&self) -> bool {
        self.positive == 0 || self.negative == 0
    }
}

#[derive(Debug, Clone)]
pub struct Metric {
    pub eta: ComplexMatrix,
    pub inertia: Inertia,
    /// `‖ηHη⁻¹ - H†‖ / ‖H‖`
    pub residual: f64,
    /// `‖η - η†‖ / ‖η‖` before symmetrization.
    pub hermiticity_residual: f64,
}

/// Builds `η = S U V S†` with `S = Q`.
pub fn build_eta(
    jd: &JordanDecomposition,
    cls: &SpectralClassification,
    tol: &TolerancePolicy,
) -> Result<(EtaConstruction, Metric)> {
    if !cls.condition_i_holds {
        return Err(Error::ConditionViolated);
    }
    let u = swap_operator(jd, cls)?;
    let v = flip_operator(jd);
    let eta_tilde = &u * &v;
    let s = jd.phi().clone();
    let raw = &(&s * &eta_tilde) * &s.adjoint();
    let hermiticity_residual = (&raw - &raw.adjoint()).norm() / raw.norm();
    let eta = raw.hermitian_part();
    let inertia = inertia(&eta, tol)?;
    let residual = pseudo_hermiticity_residual(&eta, jd.operator(), tol)?;

    let offsets = jd.block_offsets();
    let frame_pairing = jd
        .blocks()
        .iter()
        .zip(&offsets)
        .flat_map(|(b, &start)| {
            (0..b.size).map(move |i| FrameLabel {
                column: start + i,
                eigenvalue_index: b.eigenvalue_index,
                degeneracy_label: b.degeneracy_label,
                position: i + 1,
            })
        })
        .collect();

    Ok((
        EtaConstruction {
            s,
            u,
            v,
            eta_tilde,
            frame_pairing,
        },
        Metric {
            eta,
            inertia,
            residual,
            hermiticity_residual,
        },
    ))
}

/// `‖ηHη⁻¹ - H†‖ / ‖H‖`, with `η⁻¹` applied through a linear solve.
pub fn pseudo_hermiticity_residual(eta: &ComplexMatrix, h: &ComplexMatrix, tol: &TolerancePolicy) -> Result<f64> {
    let eh = eta * h;
    // X = ηHη⁻¹  ⇔  η† X† = (ηH)†
    let xt = solve(&eta.adjoint(), &eh.adjoint(), tol)?;
    let scale = h.norm();
    let diff = (&xt.adjoint() - &h.adjoint()).norm();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// Counts of positive and negative eigenvalues of a Hermitian invertible matrix.
pub fn inertia(eta: &ComplexMatrix, tol: &TolerancePolicy) -> Result<Inertia> {
    check_square(eta)?;
    let norm = eta.norm();
    let herm = (eta - &eta.adjoint()).norm();
    if herm > tol.residual_tol * norm {
        return Err(Error::NotHermitian(herm / norm));
    }
    let ev = hermitian_eigenvalues(eta)?;
    let top = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(small) = ev.iter().find(|x| x.abs() <= tol.rank_tol * top) {
        return Err(Error::NearSingular(*small));
    }
    if top == 0.0 {
        return Err(Error::NearSingular(0.0));
    }
    Ok(Inertia {
        positive: ev.iter().filter(|&&x| x > 0.0).count(),
        negative: ev.iter().filter(|&&x| x < 0.0).count(),
    })
}

/// `⟨x|η|y⟩`.
pub fn eta_inner(eta: &ComplexMatrix, x: &[C64], y: &[C64]) -> Result<C64> {
    if eta.rows() != x.len() || eta.cols() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} metric with vectors of length {} and {}",
            eta.rows(),
            eta.cols(),
            x.len(),
            y.len()
        )));
    }
    let ey = eta.mul_vec(y);
    Ok(x.iter().zip(&ey).map(|(a, b)| a.conj() * b).sum())
}

/// The η-pseudonorm `⟨x|η|x⟩`.
pub fn pseudonorm(eta: &ComplexMatrix, x: &[C64]) -> Result<C64> {
    eta_inner(eta, x, x)
}

/// Hermitian basis matrices indexed by `k < n²`: diagonal units, then
/// symmetric and antisymmetric off-diagonal pairs.
fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        let mut m = ComplexMatrix::zeros(n, n);
        m.set(j, j, C64::new(1.0, 0.0));
        out.push(m);
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let mut s = ComplexMatrix::zeros(n, n);
            s.set(j, k, C64::new(h, 0.0));
            s.set(k, j, C64::new(h, 0.0));
            out.push(s);
            let mut a = ComplexMatrix::zeros(n, n);
            a.set(j, k, C64::new(0.0, h));
            a.set(k, j, C64::new(0.0, -h));
            out.push(a);
        }
    }
    out
}

/// Basis of the solutions of `ηH = H†η`, each element of unit Frobenius
/// norm. With `hermitian_only` this is a real basis of the Hermitian
/// solutions; otherwise it is a real basis of all solutions regarded as a
/// real vector space (twice the complex dimension).
///
/// Singular values of the linear system below `residual_tol · max(σ_max, ‖H‖)`
/// count as zero, so a scalar `H` (whose system is pure rounding noise)
/// still gets its full solution space.
pub fn intertwiner_space(h: &ComplexMatrix, hermitian_only: bool, tol: &TolerancePolicy) -> Result<Vec<ComplexMatrix>> {
    Ok(intertwiner_space_with_noise(h, hermitian_only, tol)?.0)
}

/// Above this dimension the unrestricted solution space is assembled as the
/// complexification of the Hermitian one instead of from its own `2N² × 2N²`
/// system. Both give the same space because `X ↦ X†` preserves the solutions.
pub const KRONECKER_MAX_DIM: usize = 16;

/// Real basis `{S_k, iS_k}` of the complex span of a Hermitian basis.
pub fn complexify(hermitian_basis: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let i = C64::new(0.0, 1.0);
    hermitian_basis.iter().flat_map(|b| [b.clone(), b.scale(i)]).collect()
}

/// Maps real solution coordinates back to a matrix.
type Decoder = Box<dyn Fn(&[f64]) -> ComplexMatrix>;

/// [`intertwiner_space`] together with a first-order bound on how far each
/// computed basis element may sit from the exact solution space: rounding in
/// the SVD of the vectorized system, `ε·cols·σ_max`, divided by the gap to the
/// smallest retained singular value.
pub fn intertwiner_space_with_noise(
    h: &ComplexMatrix,
    hermitian_only: bool,
    tol: &TolerancePolicy,
) -> Result<(Vec<ComplexMatrix>, f64)> {
    let n = check_square(h)?;
    if !hermitian_only && n > KRONECKER_MAX_DIM {
        let (basis, noise) = intertwiner_space_with_noise(h, true, tol)?;
        return Ok((complexify(&basis), noise));
    }
    let hd = h.adjoint();

    let (system, decode): (DMatrix<f64>, Decoder) = if hermitian_only {
        let basis = hermitian_basis(n);
        let dim = basis.len();
        let mut a = DMatrix::<f64>::zeros(2 * dim, dim);
        for (col, b) in basis.iter().enumerate() {
            let img = &(b * h) - &(&hd * b);
            for i in 0..n {
                for j in 0..n {
                    let z = img.get(i, j);
                    a[(i * n + j, col)] = z.re;
                    a[(dim + i * n + j, col)] = z.im;
                }
            }
        }
        let decode = move |coef: &[f64]| {
            let mut eta = ComplexMatrix::zeros(n, n);
            for (b, &x) in basis.iter().zip(coef) {
                eta = &eta + &b.scale(C64::new(x, 0.0));
            }
            eta
        };
        (a, Box::new(decode))
    } else {
        // vec(ηH - H†η) = (Hᵀ ⊗ I - I ⊗ H†) vec(η), column-major vec,
        // split into real and imaginary parts
        let dim = n * n;
        let mut k = ComplexMatrix::zeros(dim, dim);
        for a in 0..n {
            for b in 0..n {
                for i in 0..n {
                    let (r1, c1) = (a * n + i, b * n + i);
                    k.set(r1, c1, k.get(r1, c1) + h.get(b, a));
                    let (r2, c2) = (i * n + a, i * n + b);
                    k.set(r2, c2, k.get(r2, c2) - hd.get(a, b));
                }
            }
        }
        let a = DMatrix::<f64>::from_fn(2 * dim, 2 * dim, |r, c| {
            let z = k.get(r % dim, c % dim);
            match (r < dim, c < dim) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        let decode = move |coef: &[f64]| ComplexMatrix::from_fn(n, n, |i, j| C64::new(coef[j * n + i], coef[dim + j * n + i]));
        (a, Box::new(decode))
    };

    let cols = system.ncols();
    // the triangular factor has the same singular values and null space
    let system = if system.nrows() > cols { system.qr().r() } else { system };
    let svd = system.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let top = svd.singular_values.iter().fold(0.0f64, |m, &x| m.max(x));
    let threshold = tol.residual_tol * top.max(h.norm());
    let gap = svd
        .singular_values
        .iter()
        .copied()
        .filter(|&s| s > threshold)
        .fold(f64::INFINITY, f64::min);
    let noise = if gap.is_finite() {
        f64::EPSILON * cols as f64 * top / gap
    } else {
        0.0
    };
    let mut out = Vec::new();
    for k in 0..cols {
        let s = svd.singular_values.get(k).copied().unwrap_or(0.0);
        if s <= threshold {
            let coef: Vec<f64> = (0..cols).map(|p| v_t[(k, p)]).collect();
            let eta = decode(&coef);
            let norm = eta.norm();
            out.push(eta.scale(C64::new(1.0 / norm, 0.0)));
        }
    }
    Ok((out, noise))
}

/// Result of searching the intertwiner space for an invertible element.
#[derive(Debug, Clone, Serialize)]
pub struct OracleVerdict {
    pub hermitian_only: bool,
    /// Real dimension of the Hermitian solutions, or complex dimension of all solutions.
    pub dimension: usize,
    pub invertible: bool,
    /// Best `σ_min/σ_max` among the sampled combinations.
    pub sigma_ratio: f64,
    /// First-order bound on the distance of each basis element from the exact
    /// solution space.
    pub basis_noise: f64,
    #[serde(skip)]
    pub witness: Option<ComplexMatrix>,
}

/// Random combination of basis elements (real coefficients for a Hermitian
/// basis, complex otherwise).
pub fn random_combination(basis: &[ComplexMatrix], hermitian: bool, rng: &mut impl Rng) -> Option<ComplexMatrix> {
    let first = basis.first()?;
    let mut eta = ComplexMatrix::zeros(first.rows(), first.cols());
    for b in basis {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if hermitian { 0.0 } else { rng.sample(StandardNormal) };
        eta = &eta + &b.scale(C64::new(re, im));
    }
    Some(if hermitian { eta.hermitian_part() } else { eta })
}

/// Steps of the conditioning ascent applied to the best random sample.
const REFINE_STEPS: usize = 60;

/// How far above the basis noise floor `σ_min` of a witness must sit.
pub const NOISE_MARGIN: f64 = 1.0;

fn combine(basis: &[ComplexMatrix], coef: &[f64]) -> ComplexMatrix {
    let mut eta = ComplexMatrix::zeros(basis[0].rows(), basis[0].cols());
    for (b, &x) in basis.iter().zip(coef) {
        eta = &eta + &b.scale(C64::new(x, 0.0));
    }
    eta
}

/// `ln(σ_min/σ_max)` of a combination and its gradient in the coefficients.
fn log_conditioning(basis: &[ComplexMatrix], coef: &[f64]) -> (f64, Vec<f64>) {
    let eta = combine(basis, coef);
    let (u, sigma, v) = svd(&eta);
    let last = sigma.len() - 1;
    let (smax, smin) = (sigma[0], sigma[last]);
    if smin <= 0.0 {
        return (f64::NEG_INFINITY, vec![0.0; coef.len()]);
    }
    let (u0, v0) = (u.column(0), v.column(0));
    let (u1, v1) = (u.column(last), v.column(last));
    let bilinear = |b: &ComplexMatrix, x: &[C64], y: &[C64]| {
        let by = b.mul_vec(y);
        x.iter().zip(&by).map(|(a, c)| a.conj() * c).sum::<C64>().re
    };
    let grad = basis
        .iter()
        .map(|b| bilinear(b, &u1, &v1) / smin - bilinear(b, &u0, &v0) / smax)
        .collect();
    ((smin / smax).ln(), grad)
}

/// Gradient ascent on `ln(σ_min/σ_max)` over unit coefficient vectors.
fn refine_coefficients(basis: &[ComplexMatrix], mut coef: Vec<f64>) -> Vec<f64> {
    let unit = |mut c: Vec<f64>| {
        let nrm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        c.iter_mut().for_each(|x| *x /= nrm);
        c
    };
    coef = unit(coef);
    let (mut f, mut grad) = log_conditioning(basis, &coef);
    let mut step = 0.5;
    for _ in 0..REFINE_STEPS {
        let gn = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !f.is_finite() || gn == 0.0 {
            break;
        }
        let mut improved = false;
        for _ in 0..30 {
            let trial = unit(coef.iter().zip(&grad).map(|(c, g)| c + step * g / gn).collect());
            let (ft, gt) = log_conditioning(basis, &trial);
            if ft > f {
                (coef, f, grad) = (trial, ft, gt);
                step = (step * 2.0).min(1.0);
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    coef
}

/// Looks for an invertible combination of an orthonormal `basis`: the best of
/// `samples` random real combinations is refined by ascent on its
/// conditioning. The result counts as invertible when `σ_min/σ_max` exceeds
/// `rank_tol` and `σ_min` clears the perturbation `noise·‖η‖_F` that an
/// inexact basis could produce on its own. Returns the witness (if any) and
/// the best ratio reached.
pub fn find_invertible(
    basis: &[ComplexMatrix],
    hermitian: bool,
    samples: usize,
    noise: f64,
    rng: &mut impl Rng,
    tol: &TolerancePolicy,
) -> (Option<ComplexMatrix>, f64) {
    if basis.is_empty() {
        return (None, 0.0);
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..samples {
        let coef: Vec<f64> = (0..basis.len()).map(|_| rng.sample(StandardNormal)).collect();
        let ratio = inverse_condition(&combine(basis, &coef));
        if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
            best = Some((ratio, coef));
        }
    }
    let (_, coef) = best.expect("at least one sample");
    let coef = refine_coefficients(basis, coef);
    let mut eta = combine(basis, &coef);
    if hermitian {
        eta = eta.hermitian_part();
    }
    let sigma = singular_values(&eta);
    let (smax, smin) = (sigma[0], sigma[sigma.len() - 1]);
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    let ok = ratio > tol.rank_tol && smin > NOISE_MARGIN * noise * eta.norm();
    (ok.then_some(eta), ratio)
}

/// Decides pseudo-Hermiticity (or weak pseudo-Hermiticity when
/// `hermitian_only` is false) directly from the intertwiner space.
pub fn intertwiner_oracle(h: &ComplexMatrix, hermitian_only: bool, tol: &TolerancePolicy) -> Result<OracleVerdict> {
    let (basis, noise) = intertwiner_space_with_noise(h, hermitian_only, tol)?;
    Ok(oracle_from_space(&basis, noise, hermitian_only, tol))
}

/// Both oracles, computing the Hermitian space once when the unrestricted
/// space is its complexification.
pub fn intertwiner_oracles(h: &ComplexMatrix, tol: &TolerancePolicy) -> Result<(OracleVerdict, OracleVerdict)> {
    let n = check_square(h)?;
    let (basis, noise) = intertwiner_space_with_noise(h, true, tol)?;
    let strong = oracle_from_space(&basis, noise, true, tol);
    let weak = if n > KRONECKER_MAX_DIM {
        oracle_from_space(&complexify(&basis), noise, false, tol)
    } else {
        intertwiner_oracle(h, false, tol)?
    };
    Ok((strong, weak))
}

/// Oracle decision on a precomputed orthonormal real basis.
pub fn oracle_from_space(basis: &[ComplexMatrix], noise: f64, hermitian_only: bool, tol: &TolerancePolicy) -> OracleVerdict {
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let (witness, sigma_ratio) = find_invertible(basis, hermitian_only, INVERTIBILITY_SAMPLES, noise, &mut rng, tol);
    OracleVerdict {
        hermitian_only,
        dimension: if hermitian_only { basis.len() } else { basis.len() / 2 },
        invertible: witness.is_some(),
        sigma_ratio,
        basis_noise: noise,
        witness,
    }
}
