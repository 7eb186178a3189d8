//! Block-decomposable algebras `B = ⊕ L(H_i)` and their normal states.
//!
//! A [`BlockShape`] records the orthogonal decomposition `H = ⊕ H_i` as a
//! list of block dimensions. A state is kept as its list of (unnormalized)
//! PSD blocks `σ(i)` with `Σ Tr σ(i) = 1`; the block weights are
//! `p(i) = Tr σ(i)` and the normalized components are `σ_i = σ(i)/p(i)`.

use crate::matcore::{herm_eig, CMatrix, C64};
use crate::{Error, Result, EPS_SUPPORT, TOL_PSD};

/// An orthogonal decomposition `H = ⊕ H_i` given by block dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockShape {
    dims: Vec<usize>,
}

impl BlockShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::ShapeMismatch {
                context: "block dimensions must be positive and nonempty",
            });
        }
        Ok(Self { dims })
    }

    /// Simple algebra `L(H)` with `dim H = d`.
    pub fn simple(d: usize) -> Self {
        Self::new(vec![d]).expect("positive dimension")
    }

    /// Abelian algebra of `n` one-dimensional blocks.
    pub fn abelian(n: usize) -> Self {
        Self::new(vec![1; n]).expect("positive count")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    /// Total embedded dimension `D = Σ d_i`.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_simple(&self) -> bool {
        self.dims.len() == 1
    }

    pub fn is_abelian(&self) -> bool {
        self.dims.iter().all(|&d| d == 1)
    }

    /// Offset of block `i` in the embedded `D×D` matrix.
    pub fn offset(&self, i: usize) -> usize {
        self.dims[..i].iter().sum()
    }

    /// Block index containing embedded coordinate `g`.
    pub fn block_of(&self, g: usize) -> usize {
        let mut acc = 0;
        for (i, &d) in self.dims.iter().enumerate() {
            acc += d;
            if g < acc {
                return i;
            }
        }
        panic!("coordinate {g} out of range for shape {:?}", self.dims)
    }
}

/// `rank B = Σ d_i`, the dimensionality of a maximal Abelian subalgebra.
pub fn algebra_rank(shape: &BlockShape) -> usize {
    shape.dims().iter().sum()
}

/// `dim B = Σ d_i²`, the linear dimension of the algebra.
pub fn algebra_dim(shape: &BlockShape) -> usize {
    shape.dims().iter().map(|d| d * d).sum()
}

/// Conditional expectation onto the block algebra: zeroes every
/// off-diagonal block. Idempotent, positive, and trace preserving.
pub fn pinch(m: &CMatrix, shape: &BlockShape) -> Result<CMatrix> {
    let d = shape.total_dim();
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: m.rows(),
            context: "pinch input",
        });
    }
    let mut out = CMatrix::zeros(d, d);
    for i in 0..shape.num_blocks() {
        let off = shape.offset(i);
        let di = shape.dims()[i];
        for a in 0..di {
            for b in 0..di {
                out[(off + a, off + b)] = m[(off + a, off + b)];
            }
        }
    }
    Ok(out)
}

/// Membership test `m ∈ B`: the off-block part must vanish relative to `‖m‖`.
pub fn is_member(m: &CMatrix, shape: &BlockShape) -> bool {
    match pinch(m, shape) {
        Ok(p) => (m - &p).norm_fro() <= 1e-10 * m.norm_fro().max(f64::MIN_POSITIVE),
        Err(_) => false,
    }
}

/// A normal state `ς` on the block algebra, stored as unnormalized PSD
/// blocks `σ(i)` with total trace 1.
#[derive(Debug, Clone)]
pub struct AlgebraState {
    shape: BlockShape,
    blocks: Vec<CMatrix>,
}

impl AlgebraState {
    /// Builds a state from PSD blocks. The blocks must be square, PSD within
    /// tolerance, and sum to trace 1 within `1e-9`; the trace is then
    /// renormalized exactly.
    pub fn from_blocks(blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::ShapeMismatch {
                context: "state needs at least one block",
            });
        }
        let shape = BlockShape::new(blocks.iter().map(|b| b.rows()).collect())?;
        let mut total = 0.0;
        for b in &blocks {
            if !b.is_square() {
                return Err(Error::ShapeMismatch {
                    context: "state blocks must be square",
                });
            }
            let spec = herm_eig(b)?;
            let floor = -TOL_PSD * spec.spectral_radius().max(f64::MIN_POSITIVE);
            if spec.eigenvalues.iter().any(|&l| l < floor) {
                return Err(Error::NotPsd {
                    eigenvalue: *spec
                        .eigenvalues
                        .last()
                        .expect("nonempty spectrum"),
                });
            }
            total += b.trace().re;
        }
        if (total - 1.0).abs() > 1e-9 || total <= 0.0 {
            return Err(Error::NotNormalized(total));
        }
        let blocks = blocks
            .into_iter()
            .map(|b| b.hermitize().scale_re(1.0 / total))
            .collect();
        Ok(Self { shape, blocks })
    }

    /// Builds a state from a full `D×D` density that must already be a
    /// member of the block algebra.
    pub fn from_density(shape: BlockShape, density: &CMatrix) -> Result<Self> {
        let d = shape.total_dim();
        if density.rows() != d || density.cols() != d {
            return Err(Error::DimMismatch {
                expected: d,
                got: density.rows(),
                context: "state density",
            });
        }
        let p = pinch(density, &shape)?;
        let dev = (density - &p).norm_fro();
        if dev > 1e-9 * density.norm_fro().max(f64::MIN_POSITIVE) {
            return Err(Error::NotAlgebraMember(dev));
        }
        let blocks = (0..shape.num_blocks())
            .map(|i| density.block(shape.offset(i), shape.dims()[i]))
            .collect();
        Self::from_blocks(blocks)
    }

    /// The tracial state `σ° = I_D / D`.
    pub fn tracial(shape: &BlockShape) -> Self {
        let d = shape.total_dim() as f64;
        let blocks = shape
            .dims()
            .iter()
            .map(|&di| CMatrix::identity(di).scale_re(1.0 / d))
            .collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    /// Pure state `ψψ†` inside block `i` of the shape.
    pub fn pure_in_block(shape: &BlockShape, i: usize, psi: &[C64]) -> Result<Self> {
        if psi.len() != shape.dims()[i] {
            return Err(Error::DimMismatch {
                expected: shape.dims()[i],
                got: psi.len(),
                context: "pure state vector",
            });
        }
        let v = CMatrix::col_vector(psi);
        let nrm = v.norm_fro();
        if nrm <= 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        let v = v.scale_re(1.0 / nrm);
        let blocks = (0..shape.num_blocks())
            .map(|k| {
                if k == i {
                    v.matmul(&v.dagger())
                } else {
                    CMatrix::zeros(shape.dims()[k], shape.dims()[k])
                }
            })
            .collect();
        Ok(Self {
            shape: shape.clone(),
            blocks,
        })
    }

    pub fn shape(&self) -> &BlockShape {
        &self.shape
    }

    /// The unnormalized blocks `σ(i)`.
    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    /// Block weights `p(i) = Tr σ(i)`.
    pub fn weights(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.trace().re).collect()
    }

    /// Normalized block `σ_i = σ(i)/p(i)`, or `None` when `p(i)` is below
    /// the support cutoff.
    pub fn normalized_block(&self, i: usize) -> Option<CMatrix> {
        let p = self.blocks[i].trace().re;
        if p > EPS_SUPPORT {
            Some(self.blocks[i].scale_re(1.0 / p))
        } else {
            None
        }
    }

    /// Embeds the state as a full block-diagonal `D×D` density.
    pub fn density(&self) -> CMatrix {
        let d = self.shape.total_dim();
        let mut out = CMatrix::zeros(d, d);
        for (i, b) in self.blocks.iter().enumerate() {
            out.set_block(self.shape.offset(i), b);
        }
        out
    }

    /// Tensor product of two states on simple algebras.
    pub fn tensor(&self, other: &AlgebraState) -> Result<AlgebraState> {
        if !self.shape.is_simple() || !other.shape.is_simple() {
            return Err(Error::NotSimpleAlgebra);
        }
        let block = crate::matcore::kron(&self.blocks[0], &other.blocks[0]);
        Ok(AlgebraState {
            shape: BlockShape::simple(block.rows()),
            blocks: vec![block],
        })
    }
}


#[cfg(test)]
mod zero_block_tests {
    use super::*;
    use crate::coupling::standard_coupling;
    use crate::infomeasure::{q_entropy_closed, q_entropy_direct, total_information};

    #[test]
    fn zero_weight_blocks_are_kept_structurally_and_skipped_in_sums() {
        let blocks = vec![CMatrix::zeros(1, 1), CMatrix::identity(2).scale_re(0.5)];
        let s = AlgebraState::from_blocks(blocks).unwrap();
        assert_eq!(s.shape().dims(), &[1, 2]);
        assert!(s.normalized_block(0).is_none());
        assert!(s.normalized_block(1).is_some());
        // H(ς) = S + p·ln rank over the nonzero block only.
        let expect = std::f64::consts::LN_2 + std::f64::consts::LN_2;
        assert!((q_entropy_closed(&s) - expect).abs() <= 1e-12);
        assert!((q_entropy_direct(&s).unwrap() - expect).abs() <= 1e-8);
        let i = total_information(&standard_coupling(&s)).unwrap().value;
        assert!((i - expect).abs() <= 1e-8);
    }
}
