//! Entropy and information functionals.
//!
//! The central object is the relative entropy
//!
//! ```text
//! R(ϖ:φ) = Tr ω ln ω^{1/2} φ⁻¹ ω^{1/2} = Tr φ η(φ^{-1/2} ω φ^{-1/2})
//! ```
//!
//! with `η(x) = x ln x`, evaluated in the symmetric form on the support of
//! the weight `φ`; it is infinite when `ω` is not absolutely continuous
//! with respect to `φ`. It dominates the log-difference relative entropy
//! `Tr ω (ln ω − ln φ)` and is monotone under preduals of unital CP maps.
//!
//! On top of it sit the entangled information `E(π) = R(ω : ρ⊗I)`, the
//! total information `I(π) = E(π) + S(ς)`, the q-entropy (both the
//! supremum route through the standard coupling and the closed form
//! `S(ς) + Σ p(i) ln rank σ_i`), and the q-conditional entropy.
//! Everything is in nats.

use crate::algebra::AlgebraState;
use crate::coupling::{standard_coupling, Coupling};
use crate::matcore::{eta, herm_eig, kron, spectral_fn, support_projector, CMatrix};
use crate::{Error, Result, EPS_SUPPORT};

/// Outcome of a relative-entropy style computation. `finite` is false (and
/// the value `+∞`) exactly when absolute continuity fails, which
/// `support_ok` reports.
#[derive(Debug, Clone, Copy)]
pub struct InfoReport {
    pub value: f64,
    pub finite: bool,
    pub support_ok: bool,
}

impl InfoReport {
    fn finite(value: f64) -> Self {
        Self {
            value,
            finite: true,
            support_ok: true,
        }
    }

    fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            finite: false,
            support_ok: false,
        }
    }
}

/// Von Neumann entropy `S(ς) = −Tr σ ln σ`, computed blockwise.
pub fn vn_entropy(s: &AlgebraState) -> f64 {
    s.blocks().iter().map(vn_entropy_density).sum()
}

/// Von Neumann entropy of a bare PSD matrix (trace need not be one).
pub fn vn_entropy_density(m: &CMatrix) -> f64 {
    let spec = herm_eig(m).expect("entropy input must be Hermitian");
    let cut = EPS_SUPPORT * spec.spectral_radius();
    let s = -spec
        .eigenvalues
        .iter()
        .filter(|&&l| l > cut)
        .map(|&l| eta(l))
        .sum::<f64>();
    // S ≥ 0 exactly; rounding can leave a −1e-16 residue for pure states.
    if m.trace().re <= 1.0 + 1e-9 {
        s.max(0.0)
    } else {
        s
    }
}

/// Checks `support(omega) ⊆ support(phi)` by the mass of `omega` outside
/// the support projector of `phi`.
fn supports_nest(omega: &CMatrix, phi_support: &CMatrix) -> bool {
    let d = omega.rows();
    let complement = &CMatrix::identity(d) - phi_support;
    let outside = complement.matmul(omega).trace().re;
    outside <= 1e-8 * omega.trace().re.max(f64::MIN_POSITIVE)
}

/// Relative entropy `R(ϖ:φ) = Tr φ η(φ^{-1/2} ω φ^{-1/2})` of a PSD
/// trace-class `omega` with respect to a PSD weight `phi` (the weight need
/// not have trace one). Returns the infinite report when `omega` is not
/// absolutely continuous with respect to `phi`.
pub fn bs_relative_entropy(omega: &CMatrix, phi: &CMatrix) -> Result<InfoReport> {
    if omega.rows() != phi.rows() || !omega.is_square() || !phi.is_square() {
        return Err(Error::DimMismatch {
            expected: phi.rows(),
            got: omega.rows(),
            context: "bs_relative_entropy operands",
        });
    }
    let phi_supp = support_projector(phi)?;
    let inv_root = spectral_fn(phi, |x| 1.0 / x.sqrt())?;
    if !supports_nest(omega, &phi_supp) {
        // Validate omega is PSD even on the infinite branch.
        let _ = spectral_fn(omega, |x| x)?;
        return Ok(InfoReport::infinite());
    }
    let x = inv_root.matmul(omega).matmul(&inv_root);
    let eta_x = spectral_fn(&x.hermitize(), eta)?;
    let value = phi.matmul(&eta_x).trace().re;
    Ok(InfoReport::finite(value))
}

/// Log-difference relative entropy `Tr ω (ln ω − ln φ)` on the common
/// support; infinite when absolute continuity fails.
pub fn umegaki_relative_entropy(omega: &CMatrix, phi: &CMatrix) -> Result<InfoReport> {
    if omega.rows() != phi.rows() || !omega.is_square() || !phi.is_square() {
        return Err(Error::DimMismatch {
            expected: phi.rows(),
            got: omega.rows(),
            context: "umegaki_relative_entropy operands",
        });
    }
    let phi_supp = support_projector(phi)?;
    let ln_omega = spectral_fn(omega, f64::ln)?;
    if !supports_nest(omega, &phi_supp) {
        return Ok(InfoReport::infinite());
    }
    let ln_phi = spectral_fn(phi, f64::ln)?;
    let value = omega.matmul(&(&ln_omega - &ln_phi)).trace().re;
    Ok(InfoReport::finite(value))
}

/// Entangled information `E(π) = R(ω : ρ⊗I)` of a coupling, where `ρ` is
/// its `A`-marginal and the inverse is the quasi-inverse on the support.
/// May be negative; `−S(π)` for diagonal couplings, `ln rank ρ` for pure
/// compound states.
pub fn entangled_information(c: &Coupling) -> Result<InfoReport> {
    let rho = c.rho();
    let weight = kron(&rho, &CMatrix::identity(c.shape_b().total_dim()));
    bs_relative_entropy(c.omega(), &weight)
}

/// Mean conditional von Neumann entropy `Σ μ(n) S(ς_n)` of an ensemble.
pub fn mean_conditional_entropy(e: &crate::coupling::Ensemble) -> f64 {
    e.weights()
        .iter()
        .zip(e.states())
        .map(|(w, s)| w * vn_entropy(s))
        .sum()
}

/// Total information `I(π) = E(π) + S(ς)` where `ς` is the `B`-marginal.
/// Nonnegative for every coupling.
pub fn total_information(c: &Coupling) -> Result<InfoReport> {
    let e = entangled_information(c)?;
    if !e.finite {
        return Ok(e);
    }
    let s = vn_entropy_density(&c.sigma());
    Ok(InfoReport::finite(e.value + s))
}

/// The q-entropy in closed form,
/// `H(ς) = S(ς) + Σ_i p(i) ln rank σ_i`,
/// with numerical ranks and terms with `p(i)` below the support cutoff
/// omitted. Satisfies `0 ≤ H(ς) ≤ ln dim B_σ`.
pub fn q_entropy_closed(s: &AlgebraState) -> f64 {
    let mut h = vn_entropy(s);
    for (i, block) in s.blocks().iter().enumerate() {
        let p = s.weights()[i];
        if p <= EPS_SUPPORT {
            continue;
        }
        let rank = herm_eig(block)
            .expect("state blocks are Hermitian")
            .numerical_rank();
        h += p * (rank as f64).ln();
    }
    h
}

/// The q-entropy as the achieved supremum `I(π_q)` of the total
/// information at the standard coupling. Agrees with
/// [`q_entropy_closed`] to numerical precision.
pub fn q_entropy_direct(s: &AlgebraState) -> Result<f64> {
    Ok(total_information(&standard_coupling(s))?.value)
}

/// q-conditional entropy `H(π) = H(ς) − I(π) ≥ 0` of a coupling whose
/// `B`-marginal must match the given state.
pub fn q_conditional_entropy(s: &AlgebraState, c: &Coupling) -> Result<f64> {
    let dev = (&c.sigma() - &s.density()).norm_fro();
    if dev > 1e-9 {
        return Err(Error::MarginalMismatch(dev));
    }
    Ok(q_entropy_closed(s) - total_information(c)?.value)
}
