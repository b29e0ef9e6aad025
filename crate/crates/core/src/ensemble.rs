//! Random test operators with known Jordan structure.
//!
//! Each member is `P J P⁻¹` for a prescribed Jordan matrix `J` and a random
//! similarity `P = U Σ V†` with controlled condition number, so the expected
//! classification is known without running any decomposition.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::antisym::{symplectic_unit, AntilinearOp};
use crate::numfield::{svd, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    RealDiagonalizable,
    RealDefective,
    PairedDiagonalizable,
    PairedDefective,
    /// A complex eigenvalue whose conjugate is absent.
    Unpaired,
    /// A conjugate pair whose Jordan structures differ.
    MismatchedPair,
}

impl SpectrumKind {
    pub const ALL: [SpectrumKind; 6] = [
        SpectrumKind::RealDiagonalizable,
        SpectrumKind::RealDefective,
        SpectrumKind::PairedDiagonalizable,
        SpectrumKind::PairedDefective,
        SpectrumKind::Unpaired,
        SpectrumKind::MismatchedPair,
    ];

    pub fn condition_i(self) -> bool {
        !matches!(self, SpectrumKind::Unpaired | SpectrumKind::MismatchedPair)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub max_dim: usize,
    pub max_block: usize,
    /// Upper bound on `cond(P)`.
    pub max_cond: f64,
    /// Minimum distance between distinct eigenvalues (conjugates included).
    pub min_gap: f64,
    /// Eigenvalues are drawn with `|Re|, |Im| ≤ spread`.
    pub spread: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            max_dim: 8,
            max_block: 3,
            max_cond: 1e3,
            min_gap: 0.5,
            spread: 3.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleMember {
    pub kind: SpectrumKind,
    pub matrix: ComplexMatrix,
    pub similarity: ComplexMatrix,
    /// Prescribed blocks as (eigenvalue, size).
    pub blocks: Vec<(C64, usize)>,
}

impl EnsembleMember {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn expected_condition_i(&self) -> bool {
        self.kind.condition_i()
    }

    pub fn expected_diagonalizable(&self) -> bool {
        self.blocks.iter().all(|&(_, s)| s == 1)
    }

    pub fn expected_real_spectrum(&self) -> bool {
        self.blocks.iter().all(|(e, _)| e.im == 0.0)
    }

    /// Sorted block sizes.
    pub fn segre_sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(|&(_, s)| s).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

/// Jordan matrix with the given blocks laid out along the diagonal.
pub fn jordan_matrix(blocks: &[(C64, usize)]) -> ComplexMatrix {
    let n = blocks.iter().map(|b| b.1).sum();
    let mut j = ComplexMatrix::zeros(n, n);
    let mut at = 0;
    for &(e, size) in blocks {
        for i in 0..size {
            j.set(at + i, at + i, e);
            if i + 1 < size {
                j.set(at + i, at + i + 1, C64::new(1.0, 0.0));
            }
        }
        at += size;
    }
    j
}

fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-like unitary from the SVD of a Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    svd(&gaussian(n, n, rng)).0
}

/// `U Σ V†` with singular values log-uniform in `[c^{-1/2}, c^{1/2}]`,
/// where `c` is drawn log-uniformly from `[1, max_cond]`.
pub fn random_similarity(n: usize, max_cond: f64, rng: &mut impl Rng) -> ComplexMatrix {
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let cond = max_cond.powf(rng.random::<f64>());
    let half = cond.ln() / 2.0;
    let sigma: Vec<C64> = (0..n)
        .map(|k| {
            let t = match (k, n) {
                (_, 1) => 0.5,
                (0, _) => 1.0,
                (k, n) if k == n - 1 => 0.0,
                _ => rng.random::<f64>(),
            };
            C64::new((half * (2.0 * t - 1.0)).exp(), 0.0)
        })
        .collect();
    &(&u * &ComplexMatrix::diagonal(&sigma)) * &v.adjoint()
}

struct Picker<'a, R: Rng> {
    rng: &'a mut R,
    cfg: &'a EnsembleConfig,
    taken: Vec<C64>,
}

impl<R: Rng> Picker<'_, R> {
    fn free(&self, z: C64) -> bool {
        self.taken
            .iter()
            .all(|t| (t - z).norm() >= self.cfg.min_gap && (t.conj() - z).norm() >= self.cfg.min_gap)
    }

    fn real(&mut self) -> C64 {
        loop {
            let z = C64::new(self.rng.random_range(-self.cfg.spread..=self.cfg.spread), 0.0);
            if self.free(z) {
                self.taken.push(z);
                return z;
            }
        }
    }

    /// Complex value in the upper half plane with `Im ≥ min_gap`.
    fn complex(&mut self) -> C64 {
        loop {
            let z = C64::new(
                self.rng.random_range(-self.cfg.spread..=self.cfg.spread),
                self.rng.random_range(self.cfg.min_gap..=self.cfg.spread),
            );
            if self.free(z) {
                self.taken.push(z);
                return z;
            }
        }
    }
}

/// Random partition of `total` into parts of size `1..=max_part`.
fn partition(total: usize, max_part: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut left = total;
    while left > 0 {
        let p = rng.random_range(1..=left.min(max_part));
        parts.push(p);
        left -= p;
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

fn push_real<R: Rng>(
    pick: &mut Picker<'_, R>,
    blocks: &mut Vec<(C64, usize)>,
    used: &mut usize,
    budget: usize,
    defective: bool,
) {
    let max_block = pick.cfg.max_block.max(1);
    let room = budget - *used;
    let alg = pick.rng.random_range(1..=room.min(max_block + 1));
    let parts = if defective { partition(alg, max_block, pick.rng) } else { vec![1; alg] };
    let e = pick.real();
    blocks.extend(parts.into_iter().map(|s| (e, s)));
    *used += alg;
}

/// Blocks for one member of the given kind, with total size `≤ max_dim`.
fn blocks_for(kind: SpectrumKind, cfg: &EnsembleConfig, rng: &mut impl Rng) -> Vec<(C64, usize)> {
    let max_block = cfg.max_block.max(1);
    let mut pick = Picker {
        rng,
        cfg,
        taken: Vec::new(),
    };
    let mut blocks = Vec::new();
    let budget = cfg.max_dim;
    let mut used = 0;
    match kind {
        SpectrumKind::RealDiagonalizable | SpectrumKind::RealDefective => {
            let defective = kind == SpectrumKind::RealDefective;
            let target = pick.rng.random_range(1..=budget);
            while used < target {
                push_real(&mut pick, &mut blocks, &mut used, budget, defective);
            }
            if defective && blocks.iter().all(|b| b.1 == 1) {
                // force at least one nontrivial block
                let e = blocks[0].0;
                blocks.retain(|b| b.0 != e);
                blocks.push((e, 2));
                used = blocks.iter().map(|b| b.1).sum();
                if used > budget {
                    blocks.truncate(1);
                }
            }
        }
        SpectrumKind::PairedDiagonalizable | SpectrumKind::PairedDefective => {
            let defective = kind == SpectrumKind::PairedDefective;
            let pairs = pick.rng.random_range(1..=budget / 2);
            for p in 0..pairs {
                let room = (budget - used) / 2;
                if room == 0 {
                    break;
                }
                let alg = pick.rng.random_range(1..=room.min(max_block));
                let mut parts = if defective { partition(alg, max_block, pick.rng) } else { vec![1; alg] };
                if defective && p == 0 && alg == 1 && room >= 2 {
                    parts = vec![2];
                }
                let z = pick.complex();
                let a: usize = parts.iter().sum();
                blocks.extend(parts.iter().map(|&s| (z, s)));
                blocks.extend(parts.iter().map(|&s| (z.conj(), s)));
                used += 2 * a;
            }
            if defective && blocks.iter().all(|b| b.1 == 1) {
                let z = blocks[0].0;
                blocks.retain(|b| b.0 != z && b.0 != z.conj());
                blocks.push((z, 2));
                blocks.push((z.conj(), 2));
                if blocks.iter().map(|b| b.1).sum::<usize>() > budget {
                    blocks = vec![(z, 2), (z.conj(), 2)];
                }
            }
            used = blocks.iter().map(|b| b.1).sum();
            if used < budget && pick.rng.random_bool(0.5) {
                push_real(&mut pick, &mut blocks, &mut used, budget, defective);
            }
        }
        SpectrumKind::Unpaired => {
            let z = pick.complex();
            let z = if pick.rng.random_bool(0.5) { z } else { z.conj() };
            let size = pick.rng.random_range(1..=max_block.min(budget));
            blocks.push((z, size));
            used = size;
            let target = pick.rng.random_range(used..=budget);
            while used < target {
                if pick.rng.random_bool(0.5) && budget - used >= 2 {
                    let w = pick.complex();
                    blocks.push((w, 1));
                    blocks.push((w.conj(), 1));
                    used += 2;
                } else {
                    push_real(&mut pick, &mut blocks, &mut used, budget, true);
                }
            }
        }
        SpectrumKind::MismatchedPair => {
            // z carries one block of size s, conj(z) carries s blocks of size 1
            let s = pick.rng.random_range(2..=max_block.max(2).min(budget / 2));
            let z = pick.complex();
            blocks.push((z, s));
            blocks.extend((0..s).map(|_| (z.conj(), 1)));
            used = 2 * s;
            if used < budget && pick.rng.random_bool(0.5) {
                push_real(&mut pick, &mut blocks, &mut used, budget, false);
            }
        }
    }
    blocks
}

/// One random member of `kind`.
pub fn generate_member(kind: SpectrumKind, cfg: &EnsembleConfig, rng: &mut impl Rng) -> EnsembleMember {
    let mut blocks = blocks_for(kind, cfg, rng);
    blocks.shuffle(rng);
    let j = jordan_matrix(&blocks);
    let n = j.rows();
    let p = random_similarity(n, cfg.max_cond, rng);
    let p_inv = ComplexMatrix::from_nalgebra(
        p.as_nalgebra()
            .clone()
            .try_inverse()
            .expect("random similarity is invertible by construction"),
    );
    EnsembleMember {
        kind,
        matrix: &(&p * &j) * &p_inv,
        similarity: p,
        blocks,
    }
}

/// `count` members cycling through every kind, reproducible from `seed`.
pub fn generate_ensemble(count: usize, seed: u64, cfg: &EnsembleConfig) -> Vec<EnsembleMember> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| generate_member(SpectrumKind::ALL[i % SpectrumKind::ALL.len()], cfg, &mut rng))
        .collect()
}

/// An operator with a known antilinear symmetry `T`, `T² = -1`.
#[derive(Debug, Clone)]
pub struct TSymmetricInstance {
    pub matrix: ComplexMatrix,
    pub t: AntilinearOp,
    /// Blocks of the quaternionic seed `J ⊕ conj(J)`.
    pub blocks: Vec<(C64, usize)>,
}

/// Random quaternionic matrix `[[A, B], [-conj(B), conj(A)]]`.
pub fn random_quaternionic(half: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let a = gaussian(half, half, rng);
    let b = gaussian(half, half, rng);
    let n = 2 * half;
    ComplexMatrix::from_fn(n, n, |i, j| match (i < half, j < half) {
        (true, true) => a.get(i, j),
        (true, false) => b.get(i, j - half),
        (false, true) => -b.get(i - half, j).conj(),
        (false, false) => a.get(i - half, j - half).conj(),
    })
}

/// Builds `H = M Mq (J ⊕ conj J) Mq⁻¹ M⁻¹` with `Mq` quaternionic and `M`
/// generic; `T = M 𝕁 conj(M)⁻¹ K` commutes with `H` and squares to `-1`.
pub fn generate_t_symmetric(half: usize, cfg: &EnsembleConfig, rng: &mut impl Rng) -> TSymmetricInstance {
    let mut pick = Picker {
        rng,
        cfg,
        taken: Vec::new(),
    };
    let mut seed_blocks = Vec::new();
    let mut used = 0;
    while used < half {
        let size = pick.rng.random_range(1..=(half - used).min(cfg.max_block));
        let e = if pick.rng.random_bool(0.6) { pick.real() } else { pick.complex() };
        seed_blocks.push((e, size));
        used += size;
    }
    let rng = pick.rng;
    let j = jordan_matrix(&seed_blocks);
    let n = 2 * half;
    let hq0 = ComplexMatrix::from_fn(n, n, |r, c| match (r < half, c < half) {
        (true, true) => j.get(r, c),
        (false, false) => j.get(r - half, c - half).conj(),
        _ => C64::default(),
    });
    let invert = |m: &ComplexMatrix| {
        ComplexMatrix::from_nalgebra(m.as_nalgebra().clone().try_inverse().expect("random matrix is invertible"))
    };
    let mq = loop {
        let q = random_quaternionic(half, rng);
        if crate::numfield::inverse_condition(&q) > 1e-3 {
            break q;
        }
    };
    let m = random_similarity(n, cfg.max_cond.sqrt(), rng);
    let outer = &m * &mq;
    let matrix = &(&outer * &hq0) * &invert(&outer);
    // L = M 𝕁 conj(M)⁻¹ (Mq commutes with 𝕁K, so it drops out)
    let l = &(&m * &symplectic_unit(n)) * &invert(&m.conj());
    let mut blocks = seed_blocks.clone();
    blocks.extend(seed_blocks.iter().map(|&(e, s)| (e.conj(), s)));
    TSymmetricInstance {
        matrix,
        t: AntilinearOp::new(l),
        blocks,
    }
}
