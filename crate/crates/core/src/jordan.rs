//! Numerical Jordan decomposition with a complete biorthonormal system.
//!
//! Eigenvalues from the Schur form are clustered, each cluster's generalized
//! eigenspace is isolated, and the nilpotent staircase of `H - E` on that
//! subspace is read off with rank-revealing SVDs. Chains are grown downward
//! from top vectors `ψ_p` via `ψ_{i-1} = (H - E) ψ_i`, so that
//! `H ψ_i = E ψ_i + ψ_{i-1}` and `H P = P J` with `J` upper bidiagonal.

use serde::Serialize;

use crate::antisym::AntilinearOp;
use crate::error::{Error, Result};
use crate::numfield::{
    check_operator, inverse, schur, schur_invariant_subspace, inverse_condition, null_space, orthonormal_basis, svd, ComplexMatrix,
    TolerancePolicy, C64,
};

/// One simple Jordan block `J_a(E_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JordanBlockSpec {
    /// Index into the list of distinct eigenvalues.
    pub eigenvalue_index: usize,
    /// Degeneracy label `a`, 1-based within the eigenvalue.
    pub degeneracy_label: usize,
    /// Block dimension `p_{n,a}`.
    pub size: usize,
}

/// Residuals of the defining identities of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JordanCertificates {
    /// `‖P†Q - I‖`
    pub biorthonormality: f64,
    /// `‖PQ† - I‖`
    pub completeness: f64,
    /// `‖PJP⁻¹ - H‖ / ‖H‖`
    pub reconstruction: f64,
    /// Largest relative violation of the chain relations on ψ and φ.
    pub chain: f64,
    /// Condition number of `P`.
    pub similarity_condition: f64,
}

#[derive(Debug, Clone)]
pub struct JordanDecomposition {
    operator: ComplexMatrix,
    operator_norm: f64,
    eigenvalues: Vec<C64>,
    blocks: Vec<JordanBlockSpec>,
    psi: ComplexMatrix,
    phi: ComplexMatrix,
}

impl JordanDecomposition {
    /// The decomposed operator `H`.
    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    /// Frobenius norm of `H`, the scale for all relative tolerances.
    pub fn operator_norm(&self) -> f64 {
        self.operator_norm
    }

    pub fn dim(&self) -> usize {
        self.operator.rows()
    }

    /// Distinct eigenvalues `E_n`, in ledger order.
    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    /// Blocks in column order.
    pub fn blocks(&self) -> &[JordanBlockSpec] {
        &self.blocks
    }

    /// Columns `|ψ_{n,a,i}⟩` in lexicographic `(n, a, i)` order.
    pub fn psi(&self) -> &ComplexMatrix {
        &self.psi
    }

    /// Columns `|φ_{n,a,i}⟩`; equal to `(P⁻¹)†`.
    pub fn phi(&self) -> &ComplexMatrix {
        &self.phi
    }

    /// First column of each block.
    pub fn block_offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let start = *acc;
                *acc += b.size;
                Some(start)
            })
            .collect()
    }

    /// Column indices of block `b`, chain position ascending.
    pub fn block_columns(&self, b: usize) -> std::ops::Range<usize> {
        let start = self.block_offsets()[b];
        start..start + self.blocks[b].size
    }

    /// Block indices belonging to eigenvalue `n`, in ledger order.
    pub fn blocks_of(&self, n: usize) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&b| self.blocks[b].eigenvalue_index == n).collect()
    }

    /// `d_n`: number of blocks at eigenvalue `n`.
    pub fn geometric_multiplicity(&self, n: usize) -> usize {
        self.blocks.iter().filter(|b| b.eigenvalue_index == n).count()
    }

    /// `g_n`: total dimension of the blocks at eigenvalue `n`.
    pub fn algebraic_multiplicity(&self, n: usize) -> usize {
        self.blocks.iter().filter(|b| b.eigenvalue_index == n).map(|b| b.size).sum()
    }

    /// `k(n,a)`: number of blocks at the same eigenvalue with the same size as block `b`.
    pub fn identical_block_count(&self, b: usize) -> usize {
        let spec = self.blocks[b];
        self.blocks
            .iter()
            .filter(|o| o.eigenvalue_index == spec.eigenvalue_index && o.size == spec.size)
            .count()
    }

    /// Block sizes at eigenvalue `n`, descending.
    pub fn block_sizes(&self, n: usize) -> Vec<usize> {
        let mut sizes: Vec<usize> = self
            .blocks
            .iter()
            .filter(|b| b.eigenvalue_index == n)
            .map(|b| b.size)
            .collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.blocks.iter().all(|b| b.size == 1)
    }

    /// Multiset of `(eigenvalue, block size)` pairs.
    pub fn block_multiset(&self) -> Vec<(C64, usize)> {
        self.blocks
            .iter()
            .map(|b| (self.eigenvalues[b.eigenvalue_index], b.size))
            .collect()
    }

    /// Block sizes alone, sorted descending.
    pub fn segre_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.blocks.iter().map(|b| b.size).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// The block-diagonal Jordan matrix `J` with `H = P J P⁻¹`.
    pub fn jordan_matrix(&self) -> ComplexMatrix {
        assemble_jordan_matrix(&self.blocks, &self.eigenvalues)
    }

    pub fn certificates(&self) -> JordanCertificates {
        let n = self.dim();
        let id = ComplexMatrix::identity(n);
        let h = &self.operator;
        let scale = self.operator_norm.max(f64::MIN_POSITIVE);
        let p = &self.psi;
        let q = &self.phi;
        let biorthonormality = (&(&p.adjoint() * q) - &id).norm();
        let completeness = (&(p * &q.adjoint()) - &id).norm();
        let j = self.jordan_matrix();
        let reconstruction = (&(&(p * &j) * &q.adjoint()) - h).norm() / scale;

        // H ψ_i - E ψ_i - ψ_{i-1} and H† φ_i - E* φ_i - φ_{i+1}
        let hp = &(h * p) - &(p * &j);
        let hq = &(&h.adjoint() * q) - &(q * &j.adjoint());
        let chain = (hp.norm() / (scale * p.norm())).max(hq.norm() / (scale * q.norm()));
        JordanCertificates {
            biorthonormality,
            completeness,
            reconstruction,
            chain,
            similarity_condition: 1.0 / inverse_condition(p),
        }
    }
}

/// Block-diagonal matrix with `E_n` on the diagonal and ones on the
/// superdiagonal inside each block.
pub fn assemble_jordan_matrix(blocks: &[JordanBlockSpec], eigenvalues: &[C64]) -> ComplexMatrix {
    let n: usize = blocks.iter().map(|b| b.size).sum();
    let mut j = ComplexMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        let e = eigenvalues[b.eigenvalue_index];
        for i in 0..b.size {
            j.set(offset + i, offset + i, e);
            if i + 1 < b.size {
                j.set(offset + i, offset + i + 1, C64::new(1.0, 0.0));
            }
        }
        offset += b.size;
    }
    j
}

/// Conjugation associated with the standard orthonormal frame: entrywise `K`.
pub fn conjugation_of_frame(n: usize) -> AntilinearOp {
    AntilinearOp::new(ComplexMatrix::identity(n))
}

/// Conjugation associated with the biorthonormal system,
/// `Θ = Σ |ψ⟩ K ⟨φ|`, whose linear part is `P Qᵀ`.
pub fn conjugation_of_biorthonormal(jd: &JordanDecomposition) -> AntilinearOp {
    AntilinearOp::new(jd.psi() * &jd.phi().transpose())
}

/// Computes the Jordan decomposition of `h`.
pub fn jordan_decompose(h: &ComplexMatrix, tol: &TolerancePolicy) -> Result<JordanDecomposition> {
    let n = check_operator(h)?;
    tol.validate()?;
    let scale = h.norm();
    if scale == 0.0 {
        return Ok(JordanDecomposition {
            operator: h.clone(),
            operator_norm: 0.0,
            eigenvalues: vec![C64::default()],
            blocks: (1..=n)
                .map(|a| JordanBlockSpec {
                    eigenvalue_index: 0,
                    degeneracy_label: a,
                    size: 1,
                })
                .collect(),
            psi: ComplexMatrix::identity(n),
            phi: ComplexMatrix::identity(n),
        });
    }

    let (z, t) = schur(h)?;
    let raw: Vec<C64> = (0..n).map(|i| t.get(i, i)).collect();
    let schur_form = SchurForm { z, t };
    let clusters = cluster_eigenvalues(h, scale, &schur_form, &raw, tol)?;

    let mut clusters = order_clusters(clusters, tol.eig_cluster_tol * scale);
    let mut eigenvalues_out = Vec::with_capacity(clusters.len());
    let mut blocks = Vec::new();
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
    for (idx, cl) in clusters.iter_mut().enumerate() {
        eigenvalues_out.push(cl.value);
        cl.chains.sort_by_key(|c| std::cmp::Reverse(c.len()));
        for (a, chain) in cl.chains.iter().enumerate() {
            blocks.push(JordanBlockSpec {
                eigenvalue_index: idx,
                degeneracy_label: a + 1,
                size: chain.len(),
            });
            columns.extend(chain.iter().cloned());
        }
    }
    if columns.len() != n {
        return Err(Error::ClusterAmbiguity(format!(
            "chains span {} of {n} dimensions",
            columns.len()
        )));
    }

    let psi = ComplexMatrix::from_columns(n, &columns)?;
    let ratio = inverse_condition(&psi);
    if ratio < tol.rank_tol {
        return Err(Error::IllConditioned { cond: 1.0 / ratio });
    }
    let phi = inverse(&psi, tol)?.adjoint();

    let jd = JordanDecomposition {
        operator: h.clone(),
        operator_norm: scale,
        eigenvalues: eigenvalues_out,
        blocks,
        psi,
        phi,
    };
    let cert = jd.certificates();
    if cert.reconstruction > tol.residual_tol {
        return Err(Error::CertificateFailed {
            what: "Jordan reconstruction",
            residual: cert.reconstruction,
            limit: tol.residual_tol,
        });
    }
    Ok(jd)
}

/// A validated eigenvalue cluster with its Jordan chains (each chain listed
/// `ψ_1 .. ψ_p`).
#[derive(Debug, Clone)]
struct Cluster {
    value: C64,
    members: Vec<usize>,
    chains: Vec<Vec<Vec<C64>>>,
}

fn centroid(raw: &[C64], members: &[usize]) -> C64 {
    members.iter().map(|&i| raw[i]).sum::<C64>() / members.len() as f64
}

struct SchurForm {
    z: ComplexMatrix,
    t: ComplexMatrix,
}

fn cluster_eigenvalues(
    h: &ComplexMatrix,
    scale: f64,
    sf: &SchurForm,
    raw: &[C64],
    tol: &TolerancePolicy,
) -> Result<Vec<Cluster>> {
    let link = tol.eig_cluster_tol * scale;

    // single linkage at the base threshold
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..raw.len() {
        let touching: Vec<usize> = (0..groups.len())
            .filter(|&g| groups[g].iter().any(|&j| (raw[i] - raw[j]).norm() <= link))
            .collect();
        let mut merged = vec![i];
        for &g in touching.iter().rev() {
            merged.extend(groups.remove(g));
        }
        merged.sort_unstable();
        groups.push(merged);
    }

    // A defective eigenvalue of multiplicity m splits by roughly δ^{1/m} under a
    // perturbation δ. Starting from each group, neighbours are absorbed in
    // order of distance while they stay inside that radius, and the union is
    // kept as soon as it passes the staircase test.
    let mut settled = vec![false; groups.len()];
    while let Some(a) = settled.iter().position(|s| !s) {
        let mut chosen = vec![a];
        let mut members = groups[a].clone();
        let mut merged = None;
        loop {
            let c0 = centroid(raw, &members);
            let next = (0..groups.len())
                .filter(|g| !chosen.contains(g))
                .map(|g| (g, (centroid(raw, &groups[g]) - c0).norm()))
                .filter(|&(g, d)| {
                    let m = members.len() + groups[g].len();
                    d <= scale * tol.eig_cluster_tol.powf(1.0 / m as f64)
                })
                .min_by(|x, y| x.1.total_cmp(&y.1));
            let Some((g, _)) = next else { break };
            chosen.push(g);
            members.extend(&groups[g]);
            members.sort_unstable();
            if analyze_cluster(h, scale, sf, &members, tol).is_some() {
                merged = Some(members.clone());
                break;
            }
        }
        match merged {
            Some(members) => {
                chosen.sort_unstable();
                for &g in chosen.iter().rev() {
                    groups.remove(g);
                    settled.remove(g);
                }
                groups.push(members);
                settled.push(false);
            }
            None => settled[a] = true,
        }
    }

    let mut clusters = Vec::with_capacity(groups.len());
    for g in &groups {
        match analyze_cluster(h, scale, sf, g, tol) {
            Some(cl) => clusters.push(cl),
            None => {
                return Err(Error::ClusterAmbiguity(format!(
                    "{} eigenvalues near {:.6e} are neither one eigenvalue nor separable",
                    g.len(),
                    centroid(raw, g)
                )))
            }
        }
    }

    for a in 0..groups.len() {
        for b in (a + 1)..groups.len() {
            let gap = groups[a]
                .iter()
                .flat_map(|&i| groups[b].iter().map(move |&j| (i, j)))
                .map(|(i, j)| (raw[i] - raw[j]).norm())
                .fold(f64::INFINITY, f64::min);
            if gap <= 2.0 * link {
                return Err(Error::ClusterAmbiguity(format!(
                    "distinct eigenvalues {gap:.3e} apart, threshold {link:.3e}"
                )));
            }
        }
    }
    Ok(clusters)
}

/// Isolates the generalized eigenspace of a candidate cluster and builds its
/// Jordan chains. Returns `None` when the restricted operator is not
/// nilpotent at the rank tolerance, i.e. the members are not one eigenvalue.
fn analyze_cluster(
    h: &ComplexMatrix,
    scale: f64,
    sf: &SchurForm,
    members: &[usize],
    tol: &TolerancePolicy,
) -> Option<Cluster> {
    let m = members.len();
    let w = schur_invariant_subspace(&sf.z, &sf.t, members);
    let hw = h * &w;
    let r = &w.adjoint() * &hw;
    if (&hw - &(&w * &r)).norm() > tol.rank_tol * scale {
        return None;
    }
    let value = r.trace() / m as f64;
    let nil = &r - &ComplexMatrix::identity(m).scale(value);

    // nullities of nil^k, k = 0..
    let mut kernels: Vec<ComplexMatrix> = vec![ComplexMatrix::zeros(m, 0)];
    let mut power = ComplexMatrix::identity(m);
    for k in 1..=m {
        power = &power * &nil;
        let threshold = tol.rank_tol * scale.powi(k as i32);
        let ker = null_space(&power, threshold);
        kernels.push(ker);
        if kernels[k].cols() == m {
            break;
        }
    }
    let top = kernels.len() - 1;
    if kernels[top].cols() != m || kernels[1].cols() == 0 {
        return None;
    }
    // Weyr counts must be nonincreasing and positive up to the index
    let weyr: Vec<usize> = (1..=top)
        .map(|k| kernels[k].cols().checked_sub(kernels[k - 1].cols()))
        .collect::<Option<Vec<_>>>()?;
    if weyr.contains(&0) || weyr.windows(2).any(|w| w[1] > w[0]) {
        return None;
    }

    // chains of size s: tops span K_s modulo (K_{s-1} + images of longer chains)
    let mut chains_local: Vec<Vec<ComplexMatrix>> = Vec::new();
    for s in (1..=top).rev() {
        let wanted = weyr[s - 1] - weyr.get(s).copied().unwrap_or(0);
        if wanted == 0 {
            continue;
        }
        let mut spanning = kernels[s - 1].clone();
        for chain in &chains_local {
            let len = chain.len();
            // chain[i] holds ψ_{i+1}; the element at level s is ψ_s
            spanning = spanning.hstack(&chain[s - 1]).ok()?;
            debug_assert!(len > s);
        }
        let basis = orthonormal_basis(&spanning, tol.rank_tol);
        let ks = &kernels[s];
        let projected = ks - &(&basis * &(&basis.adjoint() * ks));
        let (u, sigma, _) = svd(&projected);
        if sigma.len() < wanted || sigma[wanted - 1] <= tol.rank_tol.sqrt() {
            return None;
        }
        for t in 0..wanted {
            let x = balance_top(&nil, &kernels[s - 1], &u.select_columns(&[t]), s);
            let mut chain = vec![x];
            for _ in 1..s {
                let next = &nil * chain.last().unwrap();
                chain.push(next);
            }
            chain.reverse();
            let rms = (chain.iter().map(|v| v.norm().powi(2)).sum::<f64>() / s as f64).sqrt();
            let chain = chain.iter().map(|v| v.scale(C64::new(1.0 / rms, 0.0))).collect();
            chains_local.push(chain);
        }
    }

    let chains = chains_local
        .iter()
        .map(|chain| chain.iter().map(|x| (&w * x).column(0)).collect())
        .collect();
    Some(Cluster {
        value,
        members: members.to_vec(),
        chains,
    })
}

/// Shifts a chain top by an element of `K_{s-1}` so the whole chain has the
/// least total norm. The shift leaves the chain's class unchanged and keeps
/// its columns from growing like powers of `nil`.
fn balance_top(nil: &ComplexMatrix, lower: &ComplexMatrix, x: &ComplexMatrix, s: usize) -> ComplexMatrix {
    let d = lower.cols();
    if d == 0 {
        return x.clone();
    }
    let m = nil.rows();
    let mut a = ComplexMatrix::zeros(s * m, d);
    let mut rhs = ComplexMatrix::zeros(s * m, 1);
    let (mut nb, mut nx) = (lower.clone(), x.clone());
    for level in 0..s {
        for i in 0..m {
            for j in 0..d {
                a.set(level * m + i, j, nb.get(i, j));
            }
            rhs.set(level * m + i, 0, -nx.get(i, 0));
        }
        nb = nil * &nb;
        nx = nil * &nx;
    }
    let (u, sigma, v) = svd(&a);
    let cutoff = sigma.first().copied().unwrap_or(0.0) * f64::EPSILON * (s * m) as f64;
    let proj = &u.adjoint() * &rhs;
    let mut coeff = ComplexMatrix::zeros(d, 1);
    for (k, &sv) in sigma.iter().enumerate().take(d) {
        if sv > cutoff {
            for j in 0..d {
                coeff.set(j, 0, coeff.get(j, 0) + v.get(j, k) * proj.get(k, 0) / sv);
            }
        }
    }
    x + &(lower * &coeff)
}

/// Ledger order: ascending real part, then ascending imaginary part among
/// eigenvalues whose real parts agree within `tie`.
fn order_clusters(mut clusters: Vec<Cluster>, tie: f64) -> Vec<Cluster> {
    clusters.sort_by(|a, b| a.value.re.total_cmp(&b.value.re));
    let mut out = Vec::with_capacity(clusters.len());
    let mut group: Vec<Cluster> = Vec::new();
    for cl in clusters {
        if let Some(last) = group.last() {
            if (cl.value.re - last.value.re).abs() > tie {
                group.sort_by(|a, b| a.value.im.total_cmp(&b.value.im));
                out.append(&mut group);
            }
        }
        group.push(cl);
    }
    group.sort_by(|a, b| a.value.im.total_cmp(&b.value.im));
    out.append(&mut group);
    debug_assert!(out.iter().all(|c| !c.members.is_empty()));
    out
}
