//! Seeded random generators for states, channels, amplitudes, and
//! couplings. Used by the property suites, the acceptance harness, and
//! the benchmarks; everything is reproducible from an explicit `Rng`.

use crate::algebra::{AlgebraState, BlockShape};
use crate::channel::Channel;
use crate::coupling::{compound_from_amplitude, AmplitudeOperator, Coupling, Ensemble};
use crate::matcore::{herm_eig, spectral_fn, sqrtm, CMatrix, C64};
use crate::Result;
use rand::Rng;
use rand_distr::StandardNormal;

fn normal_c(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Ginibre matrix with i.i.d. standard complex normal entries.
pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| normal_c(rng))
}

/// Random density `GG†/Tr` on a single block of dimension `d`.
pub fn random_density(rng: &mut impl Rng, d: usize) -> CMatrix {
    let g = ginibre(rng, d, d);
    let p = g.matmul(&g.dagger());
    let t = p.trace().re;
    p.scale_re(1.0 / t)
}

/// Random density with spectrum bounded away from zero:
/// `(1−λ)·GG†/Tr + λ·I/d`.
pub fn random_density_floored(rng: &mut impl Rng, d: usize, floor: f64) -> CMatrix {
    let raw = random_density(rng, d);
    &raw.scale_re(1.0 - floor) + &CMatrix::identity(d).scale_re(floor / d as f64)
}

/// Random state on a block shape: Ginibre blocks with Dirichlet-like
/// weights.
pub fn random_state(rng: &mut impl Rng, shape: &BlockShape) -> AlgebraState {
    let raw: Vec<CMatrix> = shape
        .dims()
        .iter()
        .map(|&d| {
            let g = ginibre(rng, d, d);
            let w: f64 = rng.gen::<f64>() + 0.1;
            let p = g.matmul(&g.dagger());
            let t = p.trace().re;
            p.scale_re(w / t)
        })
        .collect();
    let total: f64 = raw.iter().map(|b| b.trace().re).sum();
    AlgebraState::from_blocks(raw.into_iter().map(|b| b.scale_re(1.0 / total)).collect())
        .expect("Ginibre blocks are PSD with unit total trace")
}

/// Random unit vector inside block `i` of the shape.
pub fn random_pure_state(rng: &mut impl Rng, shape: &BlockShape, block: usize) -> AlgebraState {
    let d = shape.dims()[block];
    let v: Vec<C64> = (0..d).map(|_| normal_c(rng)).collect();
    AlgebraState::pure_in_block(shape, block, &v).expect("nonzero Gaussian vector")
}

/// Random Haar-like unitary from the QR of a Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    let g = ginibre(rng, d, d);
    gram_schmidt_columns(&g)
}

fn gram_schmidt_columns(m: &CMatrix) -> CMatrix {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q = m.clone();
    for j in 0..cols {
        for k in 0..j {
            let mut inner = C64::new(0.0, 0.0);
            for i in 0..rows {
                inner += q[(i, k)].conj() * q[(i, j)];
            }
            for i in 0..rows {
                let corr = q[(i, k)] * inner;
                q[(i, j)] -= corr;
            }
        }
        let norm = (0..rows).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..rows {
            q[(i, j)] /= norm;
        }
    }
    q
}

/// Random trace-preserving Kraus set of `n` operators `din → dout`,
/// normalized through the inverse square root of `Σ K†K`.
pub fn random_channel(rng: &mut impl Rng, din: usize, dout: usize, n: usize) -> Channel {
    let raw: Vec<CMatrix> = (0..n).map(|_| ginibre(rng, dout, din)).collect();
    let mut gram = CMatrix::zeros(din, din);
    for k in &raw {
        gram = &gram + &k.dagger().matmul(k);
    }
    let inv_root =
        spectral_fn(&gram, |x| 1.0 / x.sqrt()).expect("Ginibre Gram matrices are PD");
    let kraus = raw.into_iter().map(|k| k.matmul(&inv_root)).collect();
    Channel::from_kraus(kraus, BlockShape::simple(din), BlockShape::simple(dout))
        .expect("normalized Kraus set is trace preserving")
}

/// Random normalized amplitude operator `υ: F → G⊗H`.
pub fn random_amplitude(rng: &mut impl Rng, d_f: usize, d_g: usize, d_h: usize) -> AmplitudeOperator {
    let raw: Vec<C64> = (0..d_f * d_g * d_h).map(|_| normal_c(rng)).collect();
    let norm: f64 = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    AmplitudeOperator::new(d_f, d_g, d_h, raw.into_iter().map(|z| z / norm).collect())
        .expect("normalized Gaussian tensor")
}

/// Random pure compound state with prescribed Schmidt rank `r` on `d⊗d`,
/// with Schmidt weights bounded away from zero.
pub fn random_pure_compound(rng: &mut impl Rng, d: usize, r: usize) -> Coupling {
    assert!(r >= 1 && r <= d);
    let u = random_unitary(rng, d);
    let v = random_unitary(rng, d);
    let mut lambdas: Vec<f64> = (0..r).map(|_| rng.gen::<f64>() + 0.2).collect();
    let total: f64 = lambdas.iter().sum();
    lambdas.iter_mut().for_each(|l| *l /= total);
    let mut psi = vec![C64::new(0.0, 0.0); d * d];
    for (k, &lam) in lambdas.iter().enumerate() {
        let w = lam.sqrt();
        for g in 0..d {
            for h in 0..d {
                psi[g * d + h] += u[(g, k)] * v[(h, k)] * w;
            }
        }
    }
    compound_from_amplitude(&AmplitudeOperator::from_pure(&psi, d, d).expect("unit Schmidt vector"))
}

/// Random ensemble of `n` mixed states on a shape.
pub fn random_ensemble(rng: &mut impl Rng, shape: &BlockShape, n: usize) -> Ensemble {
    let mut weights: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let states = (0..n).map(|_| random_state(rng, shape)).collect();
    Ensemble::new(weights, states).expect("normalized weights and common shape")
}

/// The Schatten (eigenbasis) ensemble of a state: blockwise eigenvector
/// decomposition with eigenvalue weights.
pub fn schatten_ensemble(s: &AlgebraState) -> Ensemble {
    let shape = s.shape();
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for (i, block) in s.blocks().iter().enumerate() {
        let spec = herm_eig(block).expect("state blocks are Hermitian");
        for (k, &lam) in spec.eigenvalues.iter().enumerate() {
            if lam <= 1e-12 {
                continue;
            }
            let v: Vec<C64> = (0..block.rows()).map(|r| spec.eigenvectors[(r, k)]).collect();
            weights.push(lam);
            states.push(AlgebraState::pure_in_block(shape, i, &v).expect("unit eigenvector"));
        }
    }
    Ensemble::new(weights, states).expect("spectral weights sum to one")
}

/// Random coupling on `shape_a ⊗ shape_b` whose `B`-marginal is exactly
/// recolored to the given state. Built from a blockwise-supported random
/// amplitude (one `(i,j)` product block per `F` slice) so the compound
/// density is a member of the product algebra.
pub fn random_coupling_with_b_marginal(
    rng: &mut impl Rng,
    shape_a: &BlockShape,
    target: &AlgebraState,
) -> Result<Coupling> {
    let shape_b = target.shape();
    let (da, db) = (shape_a.total_dim(), shape_b.total_dim());
    let mut omega = CMatrix::zeros(da * db, da * db);
    // Cover every (A-block, B-block) pair twice for generic support.
    for i in 0..shape_a.num_blocks() {
        for j in 0..shape_b.num_blocks() {
            for _ in 0..2 {
                let (off_a, d_a) = (shape_a.offset(i), shape_a.dims()[i]);
                let (off_b, d_b) = (shape_b.offset(j), shape_b.dims()[j]);
                let slice = ginibre(rng, d_a * d_b, 1);
                for r in 0..d_a * d_b {
                    let (ga, hb) = (r / d_b, r % d_b);
                    let row = (off_a + ga) * db + (off_b + hb);
                    for c in 0..d_a * d_b {
                        let (ga2, hb2) = (c / d_b, c % d_b);
                        let col = (off_a + ga2) * db + (off_b + hb2);
                        omega[(row, col)] += slice[(r, 0)] * slice[(c, 0)].conj();
                    }
                }
            }
        }
    }
    let tr = omega.trace().re;
    let omega = omega.scale_re(1.0 / tr);
    // Recolor the B factor blockwise: T = σ^{1/2} M^{-1/2}.
    let marginal = crate::matcore::partial_trace(&omega, (da, db), crate::matcore::Keep::Second)?;
    let mut t = CMatrix::zeros(db, db);
    for j in 0..shape_b.num_blocks() {
        let (off, d) = (shape_b.offset(j), shape_b.dims()[j]);
        let m_block = marginal.block(off, d);
        let target_block = &target.blocks()[j];
        let m_inv_root = spectral_fn(&m_block.hermitize(), |x| 1.0 / x.sqrt())?;
        let t_block = sqrtm(target_block)?.matmul(&m_inv_root);
        t.set_block(off, &t_block);
    }
    let lifted = crate::matcore::kron(&CMatrix::identity(da), &t);
    let recolored = lifted.matmul(&omega).matmul(&lifted.dagger());
    let tr = recolored.trace().re;
    Coupling::new(shape_a.clone(), shape_b.clone(), recolored.scale_re(1.0 / tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        let u = random_unitary(&mut rng, 4);
        let gram = u.dagger().matmul(&u);
        assert!((&gram - &CMatrix::identity(4)).max_abs() <= 1e-10);
    }

    #[test]
    fn schatten_ensemble_averages_to_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        let shape = BlockShape::new(vec![1, 2]).unwrap();
        let s = random_state(&mut rng, &shape);
        let e = schatten_ensemble(&s);
        assert!((&e.average_density() - &s.density()).max_abs() <= 1e-10);
    }

    #[test]
    fn pure_compound_has_prescribed_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        for r in 1..=3 {
            let cpl = random_pure_compound(&mut rng, 3, r);
            let rank = herm_eig(&cpl.rho()).unwrap().numerical_rank();
            assert_eq!(rank, r);
        }
    }

    #[test]
    fn coupling_with_prescribed_b_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let shape_a = BlockShape::simple(2);
        let shape_b = BlockShape::new(vec![1, 2]).unwrap();
        let target = random_state(&mut rng, &shape_b);
        let cpl = random_coupling_with_b_marginal(&mut rng, &shape_a, &target).unwrap();
        assert!((&cpl.sigma() - &target.density()).max_abs() <= 1e-9);
    }

    #[test]
    fn floored_density_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(84);
        let m = random_density_floored(&mut rng, 4, 0.2);
        let spec = herm_eig(&m).unwrap();
        assert!(spec.eigenvalues.iter().all(|&l| l >= 0.2 / 4.0 - 1e-12));
    }
}
