//! Channel information functionals and capacities.
//!
//! `I_q` composes the standard coupling of the input state with the
//! channel — no optimization is involved. `I_c` subtracts the minimal mean
//! conditional output entropy over pure decompositions of the input state,
//! found by derivative-free simplex search over the decomposition isometry.
//! The capacities `C_q` and `C_c` maximize these over input densities
//! parameterized as `LL†/Tr LL†` with per-block complex lower-triangular
//! factors, with seeded multi-start. Restarts run in parallel and the
//! winner is picked deterministically (ties broken by lowest restart
//! index).

use crate::algebra::{AlgebraState, BlockShape};
use crate::channel::{apply_channel, push_coupling, tensor_channel, Channel};
use crate::coupling::standard_coupling;
use crate::infomeasure::{total_information, vn_entropy};
use crate::matcore::{herm_eig, CMatrix, C64};
use crate::{Error, Result, EPS_SUPPORT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Settings for the multi-start simplex optimizer.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// Override for the pure-decomposition size per block; defaults to
    /// `rank²` when absent. Values below the rank are raised to it.
    pub ensemble_size: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 2000,
            tol: 1e-7,
            seed: 0,
            ensemble_size: None,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn inner(&self) -> Self {
        Self {
            restarts: (self.restarts / 4).max(2),
            seed: self.seed ^ 0x5ee0_5eed_0000_0001,
            ..self.clone()
        }
    }
}

/// Result of a capacity optimization.
#[derive(Debug, Clone)]
pub struct CapacityReport {
    pub value: f64,
    pub argmax_state: AlgebraState,
    pub iterations_used: usize,
    pub converged: bool,
    /// For c-quantities: the optimal pure decomposition at the argmax.
    pub argmax_decomposition: Option<PureDecomposition>,
}

/// A pure decomposition `σ₁ = Σ μ(n) ψ_n ψ_n†` with unit vectors embedded
/// in the full input space.
#[derive(Debug, Clone)]
pub struct PureDecomposition {
    pub weights: Vec<f64>,
    pub vectors: Vec<CMatrix>,
}

impl PureDecomposition {
    /// `Σ μ(n) ψ_n ψ_n†`.
    pub fn average_density(&self, dim: usize) -> CMatrix {
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            let p = v.matmul(&v.dagger());
            acc = &acc + &p.scale_re(*w);
        }
        acc
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Outcome of the inner mean-conditional-entropy minimization.
#[derive(Debug, Clone)]
pub struct MinOutputEntropy {
    pub value: f64,
    pub decomposition: PureDecomposition,
    pub iterations: usize,
    pub converged: bool,
}

/// `I_q(ς₁,Λ) = S(ς₁Λ) + E(π₁^q Λ)`: total information of the standard
/// coupling of the input pushed through the channel. No optimization.
pub fn info_q(s1: &AlgebraState, ch: &Channel) -> Result<f64> {
    let pushed = push_coupling(&standard_coupling(s1), ch)?;
    Ok(total_information(&pushed)?.value)
}

/// Coherent information `I_s(ς₁,Λ) = I_q(ς₁,Λ) − S(ς₁Λ)`.
pub fn coherent_info(s1: &AlgebraState, ch: &Channel) -> Result<f64> {
    let out = apply_channel(ch, s1)?;
    Ok(info_q(s1, ch)? - vn_entropy(&out))
}

/// `I_c(ς₁,Λ) = S(ς₁Λ) − min mean conditional output entropy`.
pub fn info_c(s1: &AlgebraState, ch: &Channel, cfg: &OptimizerConfig) -> Result<f64> {
    let out = apply_channel(ch, s1)?;
    let min = min_output_mean_entropy(s1, ch, cfg)?;
    Ok(vn_entropy(&out) - min.value)
}

// ---------------------------------------------------------------------------
// Nelder–Mead simplex search
// ---------------------------------------------------------------------------

struct NmOutcome {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Classic Nelder–Mead on a boxed objective. Deterministic for a given
/// start; convergence when the value spread of the simplex drops below
/// `tol`.
fn nelder_mead(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    x0: &[f64],
    step: f64,
    max_iters: usize,
    tol: f64,
) -> NmOutcome {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    let (alpha, gamma, beta, delta) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iters {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = revalues;

        if values[n] - values[0] <= tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = (0..n)
            .map(|j| centroid[j] + alpha * (centroid[j] - worst[j]))
            .collect();
        let f_reflect = f(&reflect);

        if f_reflect < values[0] {
            let expand: Vec<f64> = (0..n)
                .map(|j| centroid[j] + gamma * (centroid[j] - worst[j]))
                .collect();
            let f_expand = f(&expand);
            if f_expand < f_reflect {
                simplex[n] = expand;
                values[n] = f_expand;
            } else {
                simplex[n] = reflect;
                values[n] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[n - 1] {
            simplex[n] = reflect;
            values[n] = f_reflect;
            continue;
        }
        let contract: Vec<f64> = if f_reflect < values[n] {
            (0..n)
                .map(|j| centroid[j] + beta * (reflect[j] - centroid[j]))
                .collect()
        } else {
            (0..n)
                .map(|j| centroid[j] + beta * (worst[j] - centroid[j]))
                .collect()
        };
        let f_contract = f(&contract);
        if f_contract < values[n].min(f_reflect) {
            simplex[n] = contract;
            values[n] = f_contract;
            continue;
        }
        // Shrink toward the best vertex.
        for i in 1..=n {
            let (best, rest) = simplex.split_first_mut().expect("nonempty simplex");
            for (x, b) in rest[i - 1].iter_mut().zip(best.iter()) {
                *x = b + delta * (*x - b);
            }
            values[i] = f(&simplex[i]);
        }
    }
    NmOutcome {
        x: simplex[0].clone(),
        value: values[0],
        iterations,
        converged,
    }
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Runs seeded multi-start Nelder–Mead and picks the lowest objective,
/// ties broken by lowest restart index. `start0` is used for restart 0.
fn multistart_minimize(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    dim: usize,
    start0: Vec<f64>,
    cfg: &OptimizerConfig,
) -> NmOutcome {
    let outcomes: Vec<NmOutcome> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|k| {
            let x0 = if k == 0 {
                start0.clone()
            } else {
                let mut rng = restart_rng(cfg.seed, k);
                (0..dim).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect()
            };
            nelder_mead(f, &x0, 0.25, cfg.max_iters, cfg.tol)
        })
        .collect();
    let mut best: Option<NmOutcome> = None;
    let mut total_iters = 0;
    for o in outcomes {
        total_iters += o.iterations;
        let better = match &best {
            None => true,
            Some(b) => o.value < b.value,
        };
        if better {
            best = Some(o);
        }
    }
    let mut best = best.expect("at least one restart");
    best.iterations = total_iters;
    best
}

// ---------------------------------------------------------------------------
// Density parameterization
// ---------------------------------------------------------------------------

/// Number of real parameters of the per-block lower-triangular factors.
fn density_param_count(shape: &BlockShape) -> usize {
    shape.dims().iter().map(|d| d * (d + 1)).sum()
}

/// Builds `⊕ L_i L_i† / Tr` from the parameter vector. Returns `None` when
/// the total trace degenerates.
fn density_from_params(shape: &BlockShape, params: &[f64]) -> Option<AlgebraState> {
    let mut blocks = Vec::with_capacity(shape.num_blocks());
    let mut cursor = 0;
    for &d in shape.dims() {
        let mut l = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..=i {
                let re = params[cursor];
                let im = params[cursor + 1];
                cursor += 2;
                l[(i, j)] = C64::new(re, im);
            }
        }
        blocks.push(l.matmul(&l.dagger()));
    }
    let total: f64 = blocks.iter().map(|b| b.trace().re).sum();
    if total < 1e-12 {
        return None;
    }
    AlgebraState::from_blocks(blocks.into_iter().map(|b| b.scale_re(1.0 / total)).collect()).ok()
}

/// Parameters reproducing the tracial state.
fn tracial_params(shape: &BlockShape) -> Vec<f64> {
    let d_total = shape.total_dim() as f64;
    let diag = (1.0 / d_total).sqrt();
    let mut params = vec![0.0; density_param_count(shape)];
    let mut cursor = 0;
    for &d in shape.dims() {
        for i in 0..d {
            for j in 0..=i {
                if i == j {
                    params[cursor] = diag;
                }
                cursor += 2;
            }
        }
    }
    params
}

// ---------------------------------------------------------------------------
// Pure decompositions and the inner minimization
// ---------------------------------------------------------------------------

/// Per-block support factor `A_i` (columns `√λ_k v_k`, embedded locally)
/// with `A_i A_i† = σ(i)`.
struct BlockFactor {
    block: usize,
    rank: usize,
    m: usize,
    factor: CMatrix,
}

fn block_factors(s1: &AlgebraState, cfg: &OptimizerConfig) -> Vec<BlockFactor> {
    let mut out = Vec::new();
    for (i, block) in s1.blocks().iter().enumerate() {
        let p = block.trace().re;
        if p <= EPS_SUPPORT {
            continue;
        }
        let spec = herm_eig(block).expect("state blocks are Hermitian");
        let cut = EPS_SUPPORT * spec.spectral_radius();
        let keep: Vec<usize> = (0..spec.eigenvalues.len())
            .filter(|&k| spec.eigenvalues[k] > cut)
            .collect();
        let rank = keep.len();
        if rank == 0 {
            continue;
        }
        let d = block.rows();
        let factor = CMatrix::from_fn(d, rank, |r, c| {
            spec.eigenvectors[(r, keep[c])] * spec.eigenvalues[keep[c]].sqrt()
        });
        let m = cfg.ensemble_size.unwrap_or(rank * rank).max(rank);
        out.push(BlockFactor {
            block: i,
            rank,
            m,
            factor,
        });
    }
    out
}

/// Orthonormalizes the columns of a complex `m×r` matrix (`m ≥ r`) by
/// modified Gram–Schmidt with a deterministic fallback for degenerate
/// columns, and returns `W = Q†` with `WW† = I_r`.
fn partial_isometry_from_params(m: usize, r: usize, params: &[f64]) -> CMatrix {
    let mut q = CMatrix::from_fn(m, r, |i, j| {
        let base = 2 * (j * m + i);
        C64::new(params[base], params[base + 1])
    });
    for j in 0..r {
        for k in 0..j {
            let mut inner = C64::new(0.0, 0.0);
            for i in 0..m {
                inner += q[(i, k)].conj() * q[(i, j)];
            }
            for i in 0..m {
                let correction = q[(i, k)] * inner;
                q[(i, j)] -= correction;
            }
        }
        let mut norm = 0.0;
        for i in 0..m {
            norm += q[(i, j)].norm_sqr();
        }
        let mut norm = norm.sqrt();
        if norm < 1e-10 {
            // Degenerate column: substitute an orthogonalized basis vector.
            for i in 0..m {
                q[(i, j)] = if i == j % m {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
            }
            for k in 0..j {
                let mut inner = C64::new(0.0, 0.0);
                for i in 0..m {
                    inner += q[(i, k)].conj() * q[(i, j)];
                }
                for i in 0..m {
                    let correction = q[(i, k)] * inner;
                    q[(i, j)] -= correction;
                }
            }
            norm = (0..m).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-10 {
                norm = 1.0;
            }
        }
        for i in 0..m {
            q[(i, j)] /= norm;
        }
    }
    q.dagger()
}

fn decomposition_from_params(
    s1: &AlgebraState,
    factors: &[BlockFactor],
    params: &[f64],
) -> PureDecomposition {
    let shape = s1.shape();
    let mut weights = Vec::new();
    let mut vectors = Vec::new();
    let mut cursor = 0;
    for bf in factors {
        let count = 2 * bf.m * bf.rank;
        let w = partial_isometry_from_params(bf.m, bf.rank, &params[cursor..cursor + count]);
        cursor += count;
        let d_total = shape.total_dim();
        let off = shape.offset(bf.block);
        let di = shape.dims()[bf.block];
        for n in 0..bf.m {
            // ψ̃_n = A_i w_n, weight μ_n = ‖ψ̃_n‖².
            let mut psi = vec![C64::new(0.0, 0.0); di];
            for (row, slot) in psi.iter_mut().enumerate() {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..bf.rank {
                    s += bf.factor[(row, k)] * w[(k, n)];
                }
                *slot = s;
            }
            let mu: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            if mu < 1e-14 {
                continue;
            }
            let scale = 1.0 / mu.sqrt();
            let mut embedded = CMatrix::zeros(d_total, 1);
            for (row, z) in psi.iter().enumerate() {
                embedded[(off + row, 0)] = z * scale;
            }
            weights.push(mu);
            vectors.push(embedded);
        }
    }
    PureDecomposition { weights, vectors }
}

fn decomposition_param_count(factors: &[BlockFactor]) -> usize {
    factors.iter().map(|bf| 2 * bf.m * bf.rank).sum()
}

/// Minimizes `Σ μ(n) S(Λ*(ψ_n ψ_n†))` over pure decompositions of `s1`
/// realized as `σ^{1/2}W` column ensembles per block, by multi-start
/// simplex search over the isometry parameters.
pub fn min_output_mean_entropy(
    s1: &AlgebraState,
    ch: &Channel,
    cfg: &OptimizerConfig,
) -> Result<MinOutputEntropy> {
    if s1.shape() != ch.shape_in() {
        return Err(Error::ShapeMismatch {
            context: "min_output_mean_entropy input state",
        });
    }
    let factors = block_factors(s1, cfg);
    let dim = decomposition_param_count(&factors);
    let shape = s1.shape().clone();
    let objective = move |params: &[f64]| -> f64 {
        let decomp = decomposition_from_params(s1, &factors, params);
        let mut total = 0.0;
        for (mu, psi) in decomp.weights.iter().zip(&decomp.vectors) {
            let pure = AlgebraState::from_density(shape.clone(), &psi.matmul(&psi.dagger()))
                .expect("embedded block vector is a state");
            let out = apply_channel(ch, &pure).expect("shape checked");
            total += mu * vn_entropy(&out);
        }
        total
    };

    if dim == 0 {
        // Zero-rank corner: empty decomposition, zero entropy.
        return Ok(MinOutputEntropy {
            value: 0.0,
            decomposition: PureDecomposition {
                weights: vec![],
                vectors: vec![],
            },
            iterations: 0,
            converged: true,
        });
    }

    // Start 0: the Schatten-style identity isometry (W = [I_r | 0]).
    let factors0 = block_factors(s1, cfg);
    let mut start0 = vec![0.0; dim];
    let mut cursor = 0;
    for bf in &factors0 {
        for j in 0..bf.rank {
            start0[cursor + 2 * (j * bf.m + j)] = 1.0;
        }
        cursor += 2 * bf.m * bf.rank;
    }

    let outcome = multistart_minimize(&objective, dim, start0, cfg);
    let factors = block_factors(s1, cfg);
    let decomposition = decomposition_from_params(s1, &factors, &outcome.x);
    Ok(MinOutputEntropy {
        value: outcome.value,
        decomposition,
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}

// ---------------------------------------------------------------------------
// Capacities
// ---------------------------------------------------------------------------

/// `C_q(Λ) = sup I_q(ς₁,Λ)` over input densities.
pub fn capacity_q(ch: &Channel, cfg: &OptimizerConfig) -> Result<CapacityReport> {
    let shape = ch.shape_in().clone();
    let dim = density_param_count(&shape);
    let objective = {
        let shape = shape.clone();
        let ch = ch.clone();
        move |params: &[f64]| -> f64 {
            match density_from_params(&shape, params) {
                Some(s) => match info_q(&s, &ch) {
                    Ok(v) => -v,
                    Err(_) => f64::INFINITY,
                },
                None => f64::INFINITY,
            }
        }
    };
    let outcome = multistart_minimize(&objective, dim, tracial_params(&shape), cfg);
    let argmax_state =
        density_from_params(&shape, &outcome.x).unwrap_or_else(|| AlgebraState::tracial(&shape));
    Ok(CapacityReport {
        value: -outcome.value,
        argmax_state,
        iterations_used: outcome.iterations,
        converged: outcome.converged,
        argmax_decomposition: None,
    })
}

/// `C_c(Λ) = sup I_c(ς₁,Λ)`: nested optimization, desk scale only
/// (embedded input dimension at most 4).
pub fn capacity_c(ch: &Channel, cfg: &OptimizerConfig) -> Result<CapacityReport> {
    let shape = ch.shape_in().clone();
    let din = shape.total_dim();
    if din > 4 {
        return Err(Error::DimensionGuard { dim: din, limit: 4 });
    }
    let dim = density_param_count(&shape);
    let inner_cfg = cfg.inner();
    let objective = {
        let shape = shape.clone();
        let ch = ch.clone();
        let inner_cfg = inner_cfg.clone();
        move |params: &[f64]| -> f64 {
            match density_from_params(&shape, params) {
                Some(s) => match info_c(&s, &ch, &inner_cfg) {
                    Ok(v) => -v,
                    Err(_) => f64::INFINITY,
                },
                None => f64::INFINITY,
            }
        }
    };
    let outcome = multistart_minimize(&objective, dim, tracial_params(&shape), cfg);
    let argmax_state =
        density_from_params(&shape, &outcome.x).unwrap_or_else(|| AlgebraState::tracial(&shape));
    let inner = min_output_mean_entropy(&argmax_state, ch, &inner_cfg)?;
    Ok(CapacityReport {
        value: -outcome.value,
        argmax_state,
        iterations_used: outcome.iterations,
        converged: outcome.converged && inner.converged,
        argmax_decomposition: Some(inner.decomposition),
    })
}

/// Result of the tensor-square additivity check of `I_q`.
#[derive(Debug, Clone, Copy)]
pub struct AdditivityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Compares `I_q(ς₁⊗ς₁, Λ⊗Λ)` with `2·I_q(ς₁,Λ)`.
pub fn additivity_check(s1: &AlgebraState, ch: &Channel) -> Result<AdditivityReport> {
    if !ch.shape_in().is_simple() || !ch.shape_out().is_simple() {
        return Err(Error::NotSimpleAlgebra);
    }
    let din = ch.shape_in().total_dim();
    let dout = ch.shape_out().total_dim();
    let dim = din * din * dout * dout;
    if dim > crate::DEFAULT_MAX_DIM {
        return Err(Error::DimensionGuard {
            dim,
            limit: crate::DEFAULT_MAX_DIM,
        });
    }
    let ch2 = tensor_channel(ch, 2)?;
    let ss = s1.tensor(s1)?;
    let lhs = info_q(&ss, &ch2)?;
    let rhs = 2.0 * info_q(s1, ch)?;
    Ok(AdditivityReport {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}
