//! Amplitude operators, compound densities, and couplings.
//!
//! A coupling of `(B, ς)` to `(A, ϱ)` is stored by its compound density
//! `ω` on `G⊗H` — the single source of truth — with the maps
//!
//! ```text
//! π(B)  = Tr_H[(I⊗B)ω]   (a trace-class operator on G)
//! π*(A) = Tr_G[(A⊗I)ω]   (a trace-class operator on H)
//! ```
//!
//! derived as views. Every such coupling is tilde-completely positive
//! (TCP); it is *truly quantum* when it is not completely positive, which
//! is decided by the positivity of the assembled Choi-type operator
//! matrices over the matrix units of the `B` factor.

use crate::algebra::{AlgebraState, BlockShape};
use crate::matcore::{herm_eig, kron, partial_trace, sqrtm, tilde, vectorize, CMatrix, C64, Keep};
use crate::{Error, Result, TOL_PSD};

/// Selects a tensor factor of a coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    A,
    B,
}

/// An amplitude operator `υ: F → G⊗H`, stored as a three-index tensor
/// `[f][g][h]`, normalized so that `Tr_F υ†υ = Σ |υ|² = 1`.
#[derive(Debug, Clone)]
pub struct AmplitudeOperator {
    d_f: usize,
    d_g: usize,
    d_h: usize,
    tensor: Vec<C64>,
}

impl AmplitudeOperator {
    pub fn new(d_f: usize, d_g: usize, d_h: usize, tensor: Vec<C64>) -> Result<Self> {
        if tensor.len() != d_f * d_g * d_h {
            return Err(Error::BadEntryCount {
                rows: d_f,
                cols: d_g * d_h,
                got: tensor.len(),
            });
        }
        let norm: f64 = tensor.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::AmplitudeNotNormalized(norm));
        }
        let scale = 1.0 / norm.sqrt();
        let tensor = tensor.into_iter().map(|z| z * scale).collect();
        Ok(Self {
            d_f,
            d_g,
            d_h,
            tensor,
        })
    }

    /// Probability amplitude: the `dim F = 1` case of a unit vector in `G⊗H`.
    pub fn from_pure(psi: &[C64], d_g: usize, d_h: usize) -> Result<Self> {
        Self::new(1, d_g, d_h, psi.to_vec())
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.d_f, self.d_g, self.d_h)
    }

    pub fn at(&self, f: usize, g: usize, h: usize) -> C64 {
        self.tensor[(f * self.d_g + g) * self.d_h + h]
    }

    /// `υ` as a `(dG·dH) × dF` matrix (columns indexed by `F`).
    pub fn as_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.d_g * self.d_h, self.d_f, |gh, f| {
            self.tensor[f * self.d_g * self.d_h + gh]
        })
    }
}

/// The transposition of Theorem-type amplitude identities: returns
/// `χ: G → F⊗H` with `χ[(f,h),g] = υ[(g,h),f]` — a pure index swap under
/// the standard-basis conjugation.
///
/// The marginal identities `conj(χ†χ) = Tr_H υυ†` and
/// `Tr_F χχ† = Tr_G υυ†` hold exactly.
pub fn amplitude_transpose(v: &AmplitudeOperator) -> AmplitudeOperator {
    let (d_f, d_g, d_h) = v.dims();
    let mut tensor = vec![C64::new(0.0, 0.0); d_f * d_g * d_h];
    for f in 0..d_g {
        for g in 0..d_f {
            for h in 0..d_h {
                tensor[(f * d_f + g) * d_h + h] = v.at(g, f, h);
            }
        }
    }
    AmplitudeOperator {
        d_f: d_g,
        d_g: d_f,
        d_h,
        tensor,
    }
}

/// Classification of a coupling: TCP / CP flags and the derived
/// truly-quantum verdict (TCP but not CP).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CouplingClass {
    pub tcp: bool,
    pub cp: bool,
    pub truly_quantum: bool,
}

/// A compound density `ω` on `G⊗H` together with the block shapes of the
/// two factor algebras. PSD, trace one, and a member of `A⊗B`.
#[derive(Debug, Clone)]
pub struct Coupling {
    shape_a: BlockShape,
    shape_b: BlockShape,
    omega: CMatrix,
}

/// Product-algebra pinch: zeroes entries `((g,h),(g',h'))` unless `g,g'`
/// share an `A`-block and `h,h'` share a `B`-block.
fn product_pinch(m: &CMatrix, shape_a: &BlockShape, shape_b: &BlockShape) -> CMatrix {
    let (da, db) = (shape_a.total_dim(), shape_b.total_dim());
    CMatrix::from_fn(da * db, da * db, |r, c| {
        let (g, h) = (r / db, r % db);
        let (g2, h2) = (c / db, c % db);
        if shape_a.block_of(g) == shape_a.block_of(g2) && shape_b.block_of(h) == shape_b.block_of(h2)
        {
            m[(r, c)]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

impl Coupling {
    /// Validates and stores a compound density: Hermitian PSD within
    /// tolerance, trace renormalized from within `1e-9` of one, and a
    /// member of the product block algebra (then pinched exactly).
    pub fn new(shape_a: BlockShape, shape_b: BlockShape, omega: CMatrix) -> Result<Self> {
        let d = shape_a.total_dim() * shape_b.total_dim();
        if omega.rows() != d || omega.cols() != d {
            return Err(Error::DimMismatch {
                expected: d,
                got: omega.rows(),
                context: "compound density",
            });
        }
        let spec = herm_eig(&omega)?;
        let floor = -TOL_PSD * spec.spectral_radius().max(f64::MIN_POSITIVE);
        if spec.eigenvalues.iter().any(|&l| l < floor) {
            return Err(Error::NotPsd {
                eigenvalue: *spec.eigenvalues.last().expect("nonempty"),
            });
        }
        let tr = omega.trace().re;
        if (tr - 1.0).abs() > 1e-9 || tr <= 0.0 {
            return Err(Error::NotNormalized(tr));
        }
        let pinched = product_pinch(&omega, &shape_a, &shape_b);
        let dev = (&omega - &pinched).norm_fro();
        if dev > 1e-9 * omega.norm_fro().max(f64::MIN_POSITIVE) {
            return Err(Error::NotAlgebraMember(dev));
        }
        Ok(Self {
            shape_a,
            shape_b,
            omega: pinched.hermitize().scale_re(1.0 / tr),
        })
    }

    pub fn shape_a(&self) -> &BlockShape {
        &self.shape_a
    }

    pub fn shape_b(&self) -> &BlockShape {
        &self.shape_b
    }

    pub fn omega(&self) -> &CMatrix {
        &self.omega
    }

    fn factor_dims(&self) -> (usize, usize) {
        (self.shape_a.total_dim(), self.shape_b.total_dim())
    }

    /// Marginal `ρ = π(I) = Tr_H ω` on the `A` factor.
    pub fn rho(&self) -> CMatrix {
        partial_trace(&self.omega, self.factor_dims(), Keep::First).expect("validated dims")
    }

    /// Marginal `σ = π*(I) = Tr_G ω` on the `B` factor.
    pub fn sigma(&self) -> CMatrix {
        partial_trace(&self.omega, self.factor_dims(), Keep::Second).expect("validated dims")
    }

    /// The `B`-marginal as an [`AlgebraState`] on `shape_b`.
    pub fn sigma_state(&self) -> AlgebraState {
        AlgebraState::from_density(self.shape_b.clone(), &self.sigma())
            .expect("marginal of a validated coupling is a state")
    }

    /// The `A`-marginal as an [`AlgebraState`] on `shape_a`.
    pub fn rho_state(&self) -> AlgebraState {
        AlgebraState::from_density(self.shape_a.clone(), &self.rho())
            .expect("marginal of a validated coupling is a state")
    }

    /// Swaps the two factors: `ω'[(h,g),(h',g')] = ω[(g,h),(g',h')]`.
    pub fn swapped(&self) -> Coupling {
        let (da, db) = self.factor_dims();
        let omega = CMatrix::from_fn(da * db, da * db, |r, c| {
            let (h, g) = (r / da, r % da);
            let (h2, g2) = (c / da, c % da);
            self.omega[(g * db + h, g2 * db + h2)]
        });
        Coupling {
            shape_a: self.shape_b.clone(),
            shape_b: self.shape_a.clone(),
            omega,
        }
    }
}

/// The compound density `ω = υυ†` of an amplitude operator, as a coupling
/// between the simple algebras on `G` and `H`.
pub fn compound_from_amplitude(v: &AmplitudeOperator) -> Coupling {
    let (d_f, d_g, d_h) = v.dims();
    let d = d_g * d_h;
    let mut omega = CMatrix::zeros(d, d);
    for f in 0..d_f {
        for r in 0..d {
            let vr = v.tensor[f * d + r];
            if vr == C64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..d {
                omega[(r, c)] += vr * v.tensor[f * d + c].conj();
            }
        }
    }
    Coupling::new(BlockShape::simple(d_g), BlockShape::simple(d_h), omega)
        .expect("υυ† of a normalized amplitude is a valid compound density")
}

/// The standard coupling of a state to itself: the compound density
///
/// ```text
/// ω_q = ⊕_i |σ(i)^{1/2}⟩⟨σ(i)^{1/2}|
/// ```
///
/// with row-stacking vectorization, which realizes the map identity
/// `π(B) = σ^{1/2} B̃ σ^{1/2}`.
pub fn standard_coupling(s: &AlgebraState) -> Coupling {
    let shape = s.shape().clone();
    let d = shape.total_dim();
    let mut omega = CMatrix::zeros(d * d, d * d);
    for (i, block) in s.blocks().iter().enumerate() {
        let root = sqrtm(block).expect("state blocks are PSD");
        let off = shape.offset(i);
        let di = shape.dims()[i];
        // ψ(i) ∈ H_i⊗H_i embedded at the (i,i) product block.
        let v = vectorize(&root);
        let embed = |k: usize| {
            let (a, b) = (k / di, k % di);
            (off + a) * d + (off + b)
        };
        for r in 0..di * di {
            let vr = v[(r, 0)];
            if vr == C64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..di * di {
                omega[(embed(r), embed(c))] += vr * v[(c, 0)].conj();
            }
        }
    }
    Coupling::new(shape.clone(), shape, omega).expect("standard compound density is valid")
}

/// An ensemble `{μ(n), ς_n}` of states on a common block algebra, with an
/// optional declared average that is verified at construction.
#[derive(Debug, Clone)]
pub struct Ensemble {
    weights: Vec<f64>,
    states: Vec<AlgebraState>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, states: Vec<AlgebraState>) -> Result<Self> {
        Self::with_average(weights, states, None)
    }

    pub fn with_average(
        weights: Vec<f64>,
        states: Vec<AlgebraState>,
        average: Option<&AlgebraState>,
    ) -> Result<Self> {
        if states.is_empty() || weights.len() != states.len() {
            return Err(Error::EmptyEnsemble);
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::BadWeights(sum));
        }
        let weights: Vec<f64> = weights.iter().map(|w| w / sum).collect();
        let shape = states[0].shape().clone();
        if states.iter().any(|s| s.shape() != &shape) {
            return Err(Error::ShapeMismatch {
                context: "ensemble states must share one shape",
            });
        }
        if let Some(avg) = average {
            let mut acc = CMatrix::zeros(shape.total_dim(), shape.total_dim());
            for (w, s) in weights.iter().zip(&states) {
                acc = &acc + &s.density().scale_re(*w);
            }
            let dev = (&acc - &avg.density()).norm_fro();
            if dev > 1e-9 {
                return Err(Error::AverageMismatch(dev));
            }
        }
        Ok(Self { weights, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[AlgebraState] {
        &self.states
    }

    pub fn shape(&self) -> &BlockShape {
        self.states[0].shape()
    }

    /// The averaged density `Σ μ(n) σ_n`.
    pub fn average_density(&self) -> CMatrix {
        let d = self.shape().total_dim();
        let mut acc = CMatrix::zeros(d, d);
        for (w, s) in self.weights.iter().zip(&self.states) {
            acc = &acc + &s.density().scale_re(*w);
        }
        acc
    }
}

/// The diagonal (d-) coupling of an ensemble: an Abelian probe indexing
/// the components, `ω = Σ_n |n⟩⟨n| ⊗ μ(n) σ_n`, with `ρ = diag(μ)`.
pub fn diagonal_coupling(e: &Ensemble) -> Result<Coupling> {
    if e.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let m = e.len();
    let db = e.shape().total_dim();
    let mut omega = CMatrix::zeros(m * db, m * db);
    for (n, (w, s)) in e.weights().iter().zip(e.states()).enumerate() {
        let block = s.density().scale_re(*w);
        for r in 0..db {
            for c in 0..db {
                omega[(n * db + r, n * db + c)] = block[(r, c)];
            }
        }
    }
    Coupling::new(BlockShape::abelian(m), e.shape().clone(), omega)
}

/// The separable (c-) coupling `ω = Σ_n μ(n) ρ̃_n ⊗ σ_n`.
///
/// The tilde sits on the `A` factor so that `π*(A) = Σ_n Tr(Ã ρ_n) σ_n μ(n)`
/// under the partial-trace conventions; for real-diagonal ensembles the
/// choice is immaterial.
pub fn separable_coupling(weights: &[f64], pairs: &[(AlgebraState, AlgebraState)]) -> Result<Coupling> {
    if pairs.is_empty() || weights.len() != pairs.len() {
        return Err(Error::EmptyEnsemble);
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::BadWeights(sum));
    }
    let shape_a = pairs[0].0.shape().clone();
    let shape_b = pairs[0].1.shape().clone();
    if pairs
        .iter()
        .any(|(a, b)| a.shape() != &shape_a || b.shape() != &shape_b)
    {
        return Err(Error::ShapeMismatch {
            context: "separable ensemble pairs must share shapes",
        });
    }
    let d = shape_a.total_dim() * shape_b.total_dim();
    let mut omega = CMatrix::zeros(d, d);
    for (w, (a, b)) in weights.iter().zip(pairs) {
        let term = kron(&tilde(&a.density()), &b.density()).scale_re(*w / sum);
        omega = &omega + &term;
    }
    Coupling::new(shape_a, shape_b, omega)
}

/// Applies the coupling maps of the compound density:
/// `Factor::B` returns `π(b) = Tr_H[(I⊗b)ω]` on the `A` side and
/// `Factor::A` returns `π*(a) = Tr_G[(a⊗I)ω]` on the `B` side.
pub fn coupling_apply(c: &Coupling, op: &CMatrix, side: Factor) -> Result<CMatrix> {
    let (da, db) = c.factor_dims();
    match side {
        Factor::B => {
            if op.rows() != db || op.cols() != db {
                return Err(Error::DimMismatch {
                    expected: db,
                    got: op.rows(),
                    context: "coupling_apply operator on factor B",
                });
            }
            let mut out = CMatrix::zeros(da, da);
            for g in 0..da {
                for g2 in 0..da {
                    let mut s = C64::new(0.0, 0.0);
                    for h in 0..db {
                        for h2 in 0..db {
                            s += op[(h, h2)] * c.omega[(g * db + h2, g2 * db + h)];
                        }
                    }
                    out[(g, g2)] = s;
                }
            }
            Ok(out)
        }
        Factor::A => {
            if op.rows() != da || op.cols() != da {
                return Err(Error::DimMismatch {
                    expected: da,
                    got: op.rows(),
                    context: "coupling_apply operator on factor A",
                });
            }
            let mut out = CMatrix::zeros(db, db);
            for h in 0..db {
                for h2 in 0..db {
                    let mut s = C64::new(0.0, 0.0);
                    for g in 0..da {
                        for g2 in 0..da {
                            s += op[(g, g2)] * c.omega[(g2 * db + h, g * db + h2)];
                        }
                    }
                    out[(h, h2)] = s;
                }
            }
            Ok(out)
        }
    }
}

/// Assembles the Choi-type operator matrix of the coupling map over the
/// matrix units `E_hk` of the `B` factor restricted to its block algebra.
///
/// With `transposed = false` the block at `(h,k)` is `π(E_hk)`; positivity
/// of the assembled matrix decides complete positivity. With
/// `transposed = true` the block is `tilde(π(E_hk))` — the lift
/// `[Jπ(B_hk)†J]` — whose positivity decides tilde-complete positivity and
/// holds for every compound-density coupling.
pub fn choi_of_coupling(c: &Coupling, transposed: bool) -> CMatrix {
    let (da, db) = c.factor_dims();
    let mut choi = CMatrix::zeros(db * da, db * da);
    for h in 0..db {
        for k in 0..db {
            if c.shape_b.block_of(h) != c.shape_b.block_of(k) {
                continue;
            }
            let mut unit = CMatrix::zeros(db, db);
            unit[(h, k)] = C64::new(1.0, 0.0);
            let block = coupling_apply(c, &unit, Factor::B).expect("validated dims");
            let block = if transposed { tilde(&block) } else { block };
            for g in 0..da {
                for g2 in 0..da {
                    choi[(h * da + g, k * da + g2)] = block[(g, g2)];
                }
            }
        }
    }
    choi
}

/// Decides TCP / CP / truly-quantum for a coupling via the spectra of the
/// two assembled Choi matrices, with relative threshold `−1e-9·‖Choi‖`.
pub fn classify(c: &Coupling) -> CouplingClass {
    let positive = |m: &CMatrix| {
        let spec = herm_eig(m).expect("Choi matrices are Hermitian by construction");
        let scale = spec.spectral_radius().max(f64::MIN_POSITIVE);
        spec.eigenvalues.iter().all(|&l| l >= -1e-9 * scale)
    };
    let cp = positive(&choi_of_coupling(c, false));
    let tcp = positive(&choi_of_coupling(c, true));
    CouplingClass {
        tcp,
        cp,
        truly_quantum: tcp && !cp,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::pseudo_inverse;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_amplitude(rng: &mut StdRng, d_f: usize, d_g: usize, d_h: usize) -> AmplitudeOperator {
        let raw: Vec<C64> = (0..d_f * d_g * d_h)
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm: f64 = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        AmplitudeOperator::new(d_f, d_g, d_h, raw.iter().map(|z| z / norm).collect()).unwrap()
    }

    fn random_state(rng: &mut StdRng, dims: &[usize]) -> AlgebraState {
        let raw: Vec<CMatrix> = dims
            .iter()
            .map(|&d| {
                let g =
                    CMatrix::from_fn(d, d, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
                g.matmul(&g.dagger())
            })
            .collect();
        let total: f64 = raw.iter().map(|b| b.trace().re).sum();
        AlgebraState::from_blocks(raw.into_iter().map(|b| b.scale_re(1.0 / total)).collect())
            .unwrap()
    }

    fn bell_amplitude() -> AmplitudeOperator {
        let inv = 1.0 / 2f64.sqrt();
        AmplitudeOperator::from_pure(
            &[c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(inv, 0.0)],
            2,
            2,
        )
        .unwrap()
    }

    #[test]
    fn compound_from_bell_amplitude() {
        let cpl = compound_from_amplitude(&bell_amplitude());
        let half = CMatrix::identity(2).scale_re(0.5);
        assert!((&cpl.rho() - &half).max_abs() <= 1e-12);
        assert!((&cpl.sigma() - &half).max_abs() <= 1e-12);
        assert!((cpl.omega().trace().re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn compound_from_product_amplitude() {
        let z = [c(1.0, 0.0), c(0.0, 0.0)];
        let e = [c(0.0, 0.0), c(1.0, 0.0)];
        let mut psi = vec![c(0.0, 0.0); 4];
        for g in 0..2 {
            for h in 0..2 {
                psi[g * 2 + h] = z[g] * e[h];
            }
        }
        let cpl = compound_from_amplitude(&AmplitudeOperator::from_pure(&psi, 2, 2).unwrap());
        let expect = kron(
            &CMatrix::diag_real(&[1.0, 0.0]),
            &CMatrix::diag_real(&[0.0, 1.0]),
        );
        assert!((cpl.omega() - &expect).max_abs() <= 1e-12);
    }

    #[test]
    fn compound_rank_bounded_by_df() {
        let mut rng = StdRng::seed_from_u64(31);
        let v = random_amplitude(&mut rng, 2, 3, 2);
        let cpl = compound_from_amplitude(&v);
        let spec = herm_eig(cpl.omega()).unwrap();
        assert!(spec.numerical_rank() <= 2);
        assert!((cpl.omega().trace().re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn amplitude_transpose_is_involution() {
        let mut rng = StdRng::seed_from_u64(32);
        let v = random_amplitude(&mut rng, 2, 3, 2);
        let back = amplitude_transpose(&amplitude_transpose(&v));
        assert_eq!(back.dims(), v.dims());
        for (a, b) in back.tensor.iter().zip(v.tensor.iter()) {
            assert!((a - b).norm() <= 1e-15);
        }
    }

    #[test]
    fn amplitude_transpose_of_bell_is_isometry_like() {
        let chi = amplitude_transpose(&bell_amplitude());
        assert_eq!(chi.dims(), (2, 1, 2));
        // χ viewed G → F⊗H is I/√2.
        let inv = 1.0 / 2f64.sqrt();
        for f in 0..2 {
            for h in 0..2 {
                let expect = if f == h { c(inv, 0.0) } else { c(0.0, 0.0) };
                assert!((chi.at(f, 0, h) - expect).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn amplitude_transpose_marginal_identities() {
        let mut rng = StdRng::seed_from_u64(33);
        let v = random_amplitude(&mut rng, 2, 3, 2);
        let chi = amplitude_transpose(&v);
        let omega = compound_from_amplitude(&v);
        let rho = omega.rho();
        let sigma = omega.sigma();
        // conj(χ†χ) = Tr_H υυ† = ρ
        let chi_m = chi.as_matrix();
        let gram = chi_m.dagger().matmul(&chi_m).conj();
        assert!((&gram - &rho).max_abs() <= 1e-12);
        // Tr_F χχ† = Tr_G υυ† = σ: marginals of the transposed compound.
        let omega_t = compound_from_amplitude(&chi);
        assert!((&omega_t.sigma() - &sigma).max_abs() <= 1e-12);
        // First marginal of the transposed compound is conj(υ†υ).
        let v_m = v.as_matrix();
        let f_gram = v_m.dagger().matmul(&v_m).conj();
        assert!((&omega_t.rho() - &f_gram).max_abs() <= 1e-12);
    }

    #[test]
    fn standard_coupling_of_tracial_qubit_is_bell() {
        let s = AlgebraState::tracial(&BlockShape::simple(2));
        let cpl = standard_coupling(&s);
        let inv = 1.0 / 2f64.sqrt();
        let bell = CMatrix::col_vector(&[c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(inv, 0.0)]);
        let expect = bell.matmul(&bell.dagger());
        assert!((cpl.omega() - &expect).max_abs() <= 1e-12);
    }

    #[test]
    fn standard_coupling_of_pure_state_is_rank_one_product() {
        let shape = BlockShape::simple(2);
        let s = AlgebraState::pure_in_block(&shape, 0, &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let cpl = standard_coupling(&s);
        let spec = herm_eig(cpl.omega()).unwrap();
        assert_eq!(spec.numerical_rank(), 1);
        let expect = kron(&s.density(), &tilde(&s.density()));
        assert!((cpl.omega() - &expect).max_abs() <= 1e-12);
    }

    #[test]
    fn standard_coupling_block_traces() {
        let blocks = vec![
            CMatrix::diag_real(&[1.0 / 3.0]),
            CMatrix::identity(2).scale_re(1.0 / 3.0),
        ];
        let s = AlgebraState::from_blocks(blocks).unwrap();
        let cpl = standard_coupling(&s);
        // ω_q is block diagonal over the product blocks, with traces p(i).
        let omega = cpl.omega();
        let d = 3;
        let block_trace = |i: usize| -> f64 {
            let off = s.shape().offset(i);
            let di = s.shape().dims()[i];
            let mut t = 0.0;
            for a in 0..di {
                for b in 0..di {
                    let idx = (off + a) * d + (off + b);
                    t += omega[(idx, idx)].re;
                }
            }
            t
        };
        assert!((block_trace(0) - 1.0 / 3.0).abs() <= 1e-12);
        assert!((block_trace(1) - 2.0 / 3.0).abs() <= 1e-12);
        // Off-diagonal (i≠j) product blocks vanish.
        assert!((omega[(0, 4)]).norm() <= 1e-15);
    }

    #[test]
    fn standard_coupling_map_identity() {
        // π(b) = σ^{1/2} b̃ σ^{1/2} for random b and a random mixed state.
        let mut rng = StdRng::seed_from_u64(34);
        let s = random_state(&mut rng, &[3]);
        let cpl = standard_coupling(&s);
        let b = CMatrix::from_fn(3, 3, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let got = coupling_apply(&cpl, &b, Factor::B).unwrap();
        let root = sqrtm(&s.density()).unwrap();
        let expect = root.matmul(&tilde(&b)).matmul(&root);
        assert!((&got - &expect).max_abs() <= 1e-11);
    }

    #[test]
    fn standard_coupling_qubit_apply_example() {
        let s = AlgebraState::tracial(&BlockShape::simple(2));
        let cpl = standard_coupling(&s);
        let b = CMatrix::diag_real(&[1.0, 0.0]);
        let got = coupling_apply(&cpl, &b, Factor::B).unwrap();
        assert!((&got - &CMatrix::diag_real(&[0.5, 0.0])).max_abs() <= 1e-12);
    }

    #[test]
    fn standard_coupling_swap_transpose_symmetry() {
        let mut rng = StdRng::seed_from_u64(35);
        let s = random_state(&mut rng, &[1, 2]);
        let cpl = standard_coupling(&s);
        let swapped = cpl.swapped();
        let back = tilde(swapped.omega());
        assert!((&back - cpl.omega()).max_abs() <= 1e-12);
    }

    #[test]
    fn diagonal_coupling_structure() {
        let shape = BlockShape::simple(2);
        let s0 = AlgebraState::pure_in_block(&shape, 0, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let s1 = AlgebraState::pure_in_block(&shape, 0, &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let e = Ensemble::new(vec![0.5, 0.5], vec![s0, s1]).unwrap();
        let cpl = diagonal_coupling(&e).unwrap();
        assert!((&cpl.rho() - &CMatrix::diag_real(&[0.5, 0.5])).max_abs() <= 1e-12);
        // Perfectly correlated classical state.
        let expect = CMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]);
        assert!((cpl.omega() - &expect).max_abs() <= 1e-12);
        // Marginal σ = Σ μ(n) σ_n.
        assert!((&cpl.sigma() - &e.average_density()).max_abs() <= 1e-12);
    }

    #[test]
    fn diagonal_coupling_single_element_is_product() {
        let mut rng = StdRng::seed_from_u64(36);
        let s = random_state(&mut rng, &[2]);
        let e = Ensemble::new(vec![1.0], vec![s.clone()]).unwrap();
        let cpl = diagonal_coupling(&e).unwrap();
        let expect = kron(&CMatrix::identity(1), &s.density());
        assert!((cpl.omega() - &expect).max_abs() <= 1e-12);
    }

    #[test]
    fn separable_coupling_cases() {
        let mut rng = StdRng::seed_from_u64(37);
        // One product term.
        let a = random_state(&mut rng, &[2]);
        let b = random_state(&mut rng, &[2]);
        let cpl = separable_coupling(&[1.0], &[(a.clone(), b.clone())]).unwrap();
        let expect = kron(&tilde(&a.density()), &b.density());
        assert!((cpl.omega() - &expect).max_abs() <= 1e-12);
        // Two real-diagonal terms: tilde is a no-op.
        let d1 = AlgebraState::from_blocks(vec![CMatrix::diag_real(&[0.7, 0.3])]).unwrap();
        let d2 = AlgebraState::from_blocks(vec![CMatrix::diag_real(&[0.2, 0.8])]).unwrap();
        let cpl2 = separable_coupling(&[0.4, 0.6], &[(d1.clone(), d2.clone()), (d2.clone(), d1.clone())])
            .unwrap();
        let expect2 = &kron(&d1.density(), &d2.density()).scale_re(0.4)
            + &kron(&d2.density(), &d1.density()).scale_re(0.6);
        assert!((cpl2.omega() - &expect2).max_abs() <= 1e-12);
        // Separable states are CP and TCP.
        let cls = classify(&cpl);
        assert!(cls.cp && cls.tcp && !cls.truly_quantum);
    }

    #[test]
    fn coupling_apply_normalization_and_linearity() {
        let mut rng = StdRng::seed_from_u64(38);
        let v = random_amplitude(&mut rng, 2, 2, 3);
        let cpl = compound_from_amplitude(&v);
        let ia = CMatrix::identity(2);
        let ib = CMatrix::identity(3);
        assert!((&coupling_apply(&cpl, &ib, Factor::B).unwrap() - &cpl.rho()).max_abs() <= 1e-12);
        assert!((&coupling_apply(&cpl, &ia, Factor::A).unwrap() - &cpl.sigma()).max_abs() <= 1e-12);
        let b1 = CMatrix::from_fn(3, 3, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let b2 = CMatrix::from_fn(3, 3, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let lin = &coupling_apply(&cpl, &b1, Factor::B).unwrap()
            + &coupling_apply(&cpl, &b2, Factor::B).unwrap();
        let joint = coupling_apply(&cpl, &(&b1 + &b2), Factor::B).unwrap();
        assert!((&lin - &joint).max_abs() <= 1e-12);
    }

    #[test]
    fn choi_variants_and_classification() {
        // Standard coupling of the tracial qubit: TCP but not CP.
        let s = AlgebraState::tracial(&BlockShape::simple(2));
        let cpl = standard_coupling(&s);
        let cls = classify(&cpl);
        assert!(cls.tcp && !cls.cp && cls.truly_quantum);
        let cp_choi = choi_of_coupling(&cpl, false);
        let min_eig = herm_eig(&cp_choi)
            .unwrap()
            .eigenvalues
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert!(min_eig < -1e-3);

        // Diagonal couplings (Abelian probe) are CP and TCP.
        let mut rng = StdRng::seed_from_u64(39);
        let e = Ensemble::new(
            vec![0.3, 0.7],
            vec![random_state(&mut rng, &[2]), random_state(&mut rng, &[2])],
        )
        .unwrap();
        let cls_d = classify(&diagonal_coupling(&e).unwrap());
        assert!(cls_d.cp && cls_d.tcp && !cls_d.truly_quantum);
    }

    #[test]
    fn pure_compound_with_rank_two_marginal_is_truly_quantum() {
        let mut rng = StdRng::seed_from_u64(40);
        let v = random_amplitude(&mut rng, 1, 2, 2);
        let cpl = compound_from_amplitude(&v);
        let rank = herm_eig(&cpl.rho()).unwrap().numerical_rank();
        if rank == 2 {
            assert!(classify(&cpl).truly_quantum);
        }
    }

    #[test]
    fn choi_assembly_matches_index_permutation_oracle() {
        // Independent oracle: the assembled operator matrices are pure
        // index permutations of ω. For the CP variant the block at (h,k)
        // is π(E_hk)[g,g'] = ω[(g,k),(g',h)]; for the TCP variant it is
        // tilde(π(E_hk))[g,g'] = ω[(g',k),(g,h)].
        let mut rng = StdRng::seed_from_u64(44);
        let v = random_amplitude(&mut rng, 2, 2, 3);
        let cpl = compound_from_amplitude(&v);
        let omega = cpl.omega();
        let (da, db) = (2, 3);
        let cp = choi_of_coupling(&cpl, false);
        let tcp = choi_of_coupling(&cpl, true);
        for h in 0..db {
            for k in 0..db {
                for g in 0..da {
                    for g2 in 0..da {
                        let cp_expect = omega[(g * db + k, g2 * db + h)];
                        assert!((cp[(h * da + g, k * da + g2)] - cp_expect).norm() <= 1e-12);
                        let tcp_expect = omega[(g2 * db + k, g * db + h)];
                        assert!((tcp[(h * da + g, k * da + g2)] - tcp_expect).norm() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn coupling_apply_rejects_dimension_mismatch() {
        let mut rng = StdRng::seed_from_u64(47);
        let v = random_amplitude(&mut rng, 1, 2, 3);
        let cpl = compound_from_amplitude(&v);
        let wrong = CMatrix::identity(4);
        assert!(coupling_apply(&cpl, &wrong, Factor::B).is_err());
        assert!(coupling_apply(&cpl, &wrong, Factor::A).is_err());
    }

    #[test]
    fn unnormalized_amplitude_is_rejected() {
        let raw = vec![c(1.0, 0.0); 4];
        assert!(matches!(
            AmplitudeOperator::new(1, 2, 2, raw),
            Err(Error::AmplitudeNotNormalized(_))
        ));
    }

    #[test]
    fn negative_ensemble_weights_are_rejected() {
        let mut rng = StdRng::seed_from_u64(45);
        let states = vec![random_state(&mut rng, &[2]), random_state(&mut rng, &[2])];
        assert!(matches!(
            Ensemble::new(vec![1.5, -0.5], states),
            Err(Error::BadWeights(_))
        ));
    }

    #[test]
    fn tcp_holds_for_random_couplings() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..10 {
            let v = random_amplitude(&mut rng, 3, 2, 2);
            let cls = classify(&compound_from_amplitude(&v));
            assert!(cls.tcp);
        }
    }

    #[test]
    fn marginal_consistency_all_constructors() {
        let mut rng = StdRng::seed_from_u64(42);
        // Standard.
        let s = random_state(&mut rng, &[1, 2]);
        let cq = standard_coupling(&s);
        assert!((&cq.rho() - &s.density()).max_abs() <= 1e-10);
        assert!((&cq.sigma() - &tilde(&s.density())).max_abs() <= 1e-10);
        // Diagonal.
        let e = Ensemble::new(
            vec![0.5, 0.5],
            vec![random_state(&mut rng, &[2]), random_state(&mut rng, &[2])],
        )
        .unwrap();
        let cd = diagonal_coupling(&e).unwrap();
        assert!((&cd.sigma() - &e.average_density()).max_abs() <= 1e-10);
        // Separable.
        let pairs = vec![
            (random_state(&mut rng, &[2]), random_state(&mut rng, &[2])),
            (random_state(&mut rng, &[2]), random_state(&mut rng, &[2])),
        ];
        let cs = separable_coupling(&[0.25, 0.75], &pairs).unwrap();
        let expect_rho = &tilde(&pairs[0].0.density()).scale_re(0.25)
            + &tilde(&pairs[1].0.density()).scale_re(0.75);
        assert!((&cs.rho() - &expect_rho).max_abs() <= 1e-10);
    }

    #[test]
    fn pure_compound_entangled_information_prereq() {
        // ψ†(ρ⊗I)⁻¹ψ = rank ρ for pure compound states.
        let mut rng = StdRng::seed_from_u64(43);
        let v = random_amplitude(&mut rng, 1, 3, 3);
        let cpl = compound_from_amplitude(&v);
        let rho = cpl.rho();
        let pinv = pseudo_inverse(&rho).unwrap();
        let weighted = kron(&pinv, &CMatrix::identity(3));
        let val = weighted.matmul(cpl.omega()).trace().re;
        let rank = herm_eig(&rho).unwrap().numerical_rank() as f64;
        assert!((val - rank).abs() <= 1e-9);
    }
}

#[cfg(test)]
mod ensemble_average_tests {
    use super::*;

    #[test]
    fn declared_average_is_validated() {
        let s0 = AlgebraState::from_blocks(vec![CMatrix::diag_real(&[1.0, 0.0])]).unwrap();
        let s1 = AlgebraState::from_blocks(vec![CMatrix::diag_real(&[0.0, 1.0])]).unwrap();
        let avg = AlgebraState::from_blocks(vec![CMatrix::diag_real(&[0.5, 0.5])]).unwrap();
        let ok = Ensemble::with_average(vec![0.5, 0.5], vec![s0.clone(), s1.clone()], Some(&avg));
        assert!(ok.is_ok());
        let bad_avg = AlgebraState::from_blocks(vec![CMatrix::diag_real(&[0.9, 0.1])]).unwrap();
        let bad = Ensemble::with_average(vec![0.5, 0.5], vec![s0, s1], Some(&bad_avg));
        assert!(matches!(bad, Err(Error::AverageMismatch(_))));
    }
}
