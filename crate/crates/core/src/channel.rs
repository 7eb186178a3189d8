//! Quantum channels as trace-preserving CP maps in Kraus form.
//!
//! A channel between block algebras is represented on the full embedding
//! spaces; the predual application pinches its output onto the output
//! block shape (input pinching is the caller's responsibility). The
//! Stinespring dilation is never materialized — the Kraus form is
//! canonical and the dilation dimension is the number of Kraus operators.

use crate::algebra::{pinch, AlgebraState, BlockShape};
use crate::coupling::Coupling;
use crate::matcore::{kron, CMatrix, C64};
use crate::{Error, Result, DEFAULT_MAX_DIM};

/// A normal unital CP map `Λ: B → B¹` given by its predual Kraus form
/// `Λ*(σ) = Σ_j K_j σ K_j†` with `Σ_j K_j†K_j = I`.
#[derive(Debug, Clone)]
pub struct Channel {
    shape_in: BlockShape,
    shape_out: BlockShape,
    kraus: Vec<CMatrix>,
}

impl Channel {
    /// Builds a channel from Kraus operators `K_j: H₁ → H`, rejecting sets
    /// whose trace-preservation deviation `‖Σ K†K − I‖` exceeds `1e-8`.
    pub fn from_kraus(
        kraus: Vec<CMatrix>,
        shape_in: BlockShape,
        shape_out: BlockShape,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let (din, dout) = (shape_in.total_dim(), shape_out.total_dim());
        for k in &kraus {
            if k.rows() != dout || k.cols() != din {
                return Err(Error::DimMismatch {
                    expected: dout,
                    got: k.rows(),
                    context: "Kraus operator shape",
                });
            }
        }
        let mut sum = CMatrix::zeros(din, din);
        for k in &kraus {
            sum = &sum + &k.dagger().matmul(k);
        }
        let dev = (&sum - &CMatrix::identity(din)).norm_fro();
        if dev > 1e-8 {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self {
            shape_in,
            shape_out,
            kraus,
        })
    }

    /// Noiseless channel from a linear isometry `Y: H₁ → H`, `Y†Y = I`.
    pub fn from_isometry(y: CMatrix, shape_in: BlockShape, shape_out: BlockShape) -> Result<Self> {
        let din = shape_in.total_dim();
        let dev = (&y.dagger().matmul(&y) - &CMatrix::identity(din)).norm_fro();
        if dev > 1e-10 {
            return Err(Error::NotIsometry(dev));
        }
        Self::from_kraus(vec![y], shape_in, shape_out)
    }

    /// Identity channel on a shape.
    pub fn identity(shape: &BlockShape) -> Self {
        Self::from_kraus(
            vec![CMatrix::identity(shape.total_dim())],
            shape.clone(),
            shape.clone(),
        )
        .expect("identity is trace preserving")
    }

    pub fn shape_in(&self) -> &BlockShape {
        &self.shape_in
    }

    pub fn shape_out(&self) -> &BlockShape {
        &self.shape_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Dilation dimension `dim F₊` of the (implicit) Stinespring form.
    pub fn dilation_dim(&self) -> usize {
        self.kraus.len()
    }

    /// Predual action on a bare density: `Σ K σ K†` (no output pinch).
    pub fn apply_density(&self, sigma: &CMatrix) -> CMatrix {
        let dout = self.shape_out.total_dim();
        let mut out = CMatrix::zeros(dout, dout);
        for k in &self.kraus {
            out = &out + &k.matmul(sigma).matmul(&k.dagger());
        }
        out
    }

    /// Choi matrix `Σ_{ij} E_ij ⊗ Λ*(E_ij)` of the predual, PSD for every
    /// Kraus-form channel.
    pub fn choi(&self) -> CMatrix {
        let din = self.shape_in.total_dim();
        let dout = self.shape_out.total_dim();
        let mut choi = CMatrix::zeros(din * dout, din * dout);
        for i in 0..din {
            for j in 0..din {
                let mut unit = CMatrix::zeros(din, din);
                unit[(i, j)] = C64::new(1.0, 0.0);
                let image = self.apply_density(&unit);
                for a in 0..dout {
                    for b in 0..dout {
                        choi[(i * dout + a, j * dout + b)] = image[(a, b)];
                    }
                }
            }
        }
        choi
    }
}

/// Sends a state through the channel: `ς ↦ pinch(Σ K σ K†)` on the output
/// block shape. Trace is preserved.
pub fn apply_channel(ch: &Channel, s: &AlgebraState) -> Result<AlgebraState> {
    if s.shape() != ch.shape_in() {
        return Err(Error::ShapeMismatch {
            context: "apply_channel input state",
        });
    }
    let raw = ch.apply_density(&s.density());
    let pinched = pinch(&raw, ch.shape_out())?;
    AlgebraState::from_density(ch.shape_out().clone(), &pinched)
}

/// The dual (Heisenberg) action `Λ(b) = Σ K† b K`; unital, and trace-dual
/// to the predual on algebra members.
pub fn dual_channel(ch: &Channel, b: &CMatrix) -> Result<CMatrix> {
    let dout = ch.shape_out().total_dim();
    if b.rows() != dout || b.cols() != dout {
        return Err(Error::DimMismatch {
            expected: dout,
            got: b.rows(),
            context: "dual_channel operand",
        });
    }
    let din = ch.shape_in().total_dim();
    let mut out = CMatrix::zeros(din, din);
    for k in ch.kraus() {
        out = &out + &k.dagger().matmul(b).matmul(k);
    }
    Ok(out)
}

/// Pushes a coupling through the channel on its `B` factor:
/// `ω ↦ Σ_j (I⊗K_j) ω (I⊗K_j)†`, then the output is pinched onto
/// `shape_a ⊗ shape_out`. The `A`-marginal is unchanged.
pub fn push_coupling(c: &Coupling, ch: &Channel) -> Result<Coupling> {
    if c.shape_b() != ch.shape_in() {
        return Err(Error::ShapeMismatch {
            context: "push_coupling factor B vs channel input",
        });
    }
    let da = c.shape_a().total_dim();
    let ia = CMatrix::identity(da);
    let dout = ch.shape_out().total_dim();
    let mut omega = CMatrix::zeros(da * dout, da * dout);
    for k in ch.kraus() {
        let lifted = kron(&ia, k);
        omega = &omega + &lifted.matmul(c.omega()).matmul(&lifted.dagger());
    }
    Coupling::new(c.shape_a().clone(), ch.shape_out().clone(), omega)
}

/// `n`-fold tensor power of a channel on simple algebras: the Kraus set is
/// all `n`-fold Kronecker products. Guarded by the total-dimension limit.
pub fn tensor_channel(ch: &Channel, n: usize) -> Result<Channel> {
    tensor_channel_with_limit(ch, n, DEFAULT_MAX_DIM)
}

pub fn tensor_channel_with_limit(ch: &Channel, n: usize, limit: usize) -> Result<Channel> {
    if n == 0 {
        return Err(Error::DimensionGuard { dim: 0, limit });
    }
    if n == 1 {
        return Ok(ch.clone());
    }
    if !ch.shape_in().is_simple() || !ch.shape_out().is_simple() {
        return Err(Error::NotSimpleAlgebra);
    }
    let din = ch.shape_in().total_dim().pow(n as u32);
    let dout = ch.shape_out().total_dim().pow(n as u32);
    let dim = din.max(dout);
    if dim > limit {
        return Err(Error::DimensionGuard { dim, limit });
    }
    let mut kraus: Vec<CMatrix> = ch.kraus().to_vec();
    for _ in 1..n {
        let mut next = Vec::with_capacity(kraus.len() * ch.kraus().len());
        for a in &kraus {
            for b in ch.kraus() {
                next.push(kron(a, b));
            }
        }
        kraus = next;
    }
    Channel::from_kraus(kraus, BlockShape::simple(din), BlockShape::simple(dout))
}
