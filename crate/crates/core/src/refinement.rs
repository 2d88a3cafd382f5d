//! Improving approximate oblique duals.
//!
//! With `D = π_{V W^⊥} - T_G T_F^*` and `‖D‖ = ε < 1`, the partial sums
//! `L_N = Σ_{n ≤ N} D^n` turn `G` into a dual whose defect is `‖D^{N+1}‖`,
//! and `L = (I - D)^{-1}` turns it into an exact oblique dual.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{self, FiniteFrame, LinearMap, Subspace};
use crate::linalg::{self, CMatrix};

/// Output of a Neumann refinement step.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementResult {
    pub refined_frame: FiniteFrame,
    pub order: usize,
    /// Defect `ε` of the input pair.
    pub input_defect: f64,
    /// `ε^{N+1}`.
    pub predicted_bound: f64,
    pub measured_defect: f64,
}

/// Summary of a refinement without the frame, for reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementSummary {
    pub order: usize,
    pub input_defect: f64,
    pub predicted_bound: f64,
    pub measured_defect: f64,
}

impl RefinementResult {
    pub fn summary(&self) -> RefinementSummary {
        RefinementSummary {
            order: self.order,
            input_defect: self.input_defect,
            predicted_bound: self.predicted_bound,
            measured_defect: self.measured_defect,
        }
    }
}

/// Which frame of the pair is modified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `T_{G̃_N} = L_N T_G`.
    G,
    /// `T_{F̃_N} = L_N^* T_F`.
    F,
}

/// A member of the oblique dual family together with its remainder norm.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    pub frame: FiniteFrame,
    /// `‖T_R T_F^*‖`; the duality defect of the member is at most this.
    pub remainder_norm: f64,
}

/// The defect operator `D = π_{V W^⊥} - T_G T_F^*`.
pub fn defect_operator(f: &FiniteFrame, g: &FiniteFrame, w: &Subspace, v: &Subspace) -> Result<LinearMap> {
    let pi_vw = frame::oblique_projection(v, w)?;
    Ok(LinearMap::new(
        pi_vw.into_matrix() - g.synthesis_matrix() * f.synthesis_matrix().adjoint(),
    ))
}

fn guarded_defect(
    f: &FiniteFrame,
    g: &FiniteFrame,
    w: &Subspace,
    v: &Subspace,
    allow_divergent: bool,
) -> Result<f64> {
    let eps = frame::duality_defect(f, g, w, v)?;
    if eps >= 1.0 && !allow_divergent {
        return Err(Error::RefinementNotGuaranteed { defect: eps });
    }
    Ok(eps)
}

/// `Σ_{n=0}^{N} A^n X` by Horner's scheme.
fn neumann_partial_sum(a: &CMatrix, x: &CMatrix, order: usize) -> CMatrix {
    let mut acc = x.clone();
    for _ in 0..order {
        acc = x + a * acc;
    }
    acc
}

/// Refines `G` to `G̃_N` with `g̃_k = Σ_{n ≤ N} D^n g_k`.
///
/// Refuses when the input defect is not below 1.
pub fn refine_dual(
    f: &FiniteFrame,
    g: &FiniteFrame,
    w: &Subspace,
    v: &Subspace,
    order: usize,
) -> Result<RefinementResult> {
    refine(f, g, w, v, order, Side::G, false)
}

/// Refines `F` to `F̃_N` with `T_{F̃_N} = L_N^* T_F`.
pub fn refine_dual_other_side(
    f: &FiniteFrame,
    g: &FiniteFrame,
    w: &Subspace,
    v: &Subspace,
    order: usize,
) -> Result<RefinementResult> {
    refine(f, g, w, v, order, Side::F, false)
}

/// General form of [`refine_dual`]. With `allow_divergent` the series is
/// summed even for `ε ≥ 1` and the measured defect is reported as is.
pub fn refine(
    f: &FiniteFrame,
    g: &FiniteFrame,
    w: &Subspace,
    v: &Subspace,
    order: usize,
    side: Side,
    allow_divergent: bool,
) -> Result<RefinementResult> {
    let eps = guarded_defect(f, g, w, v, allow_divergent)?;
    let d = defect_operator(f, g, w, v)?.into_matrix();
    let (refined_frame, measured_defect) = match side {
        Side::G => {
            let t = neumann_partial_sum(&d, g.synthesis_matrix(), order);
            let refined = FiniteFrame::from_synthesis(t)?;
            let measured = frame::duality_defect(f, &refined, w, v)?;
            (refined, measured)
        }
        Side::F => {
            let t = neumann_partial_sum(&d.adjoint(), f.synthesis_matrix(), order);
            let refined = FiniteFrame::from_synthesis(t)?;
            let measured = frame::duality_defect(&refined, g, w, v)?;
            (refined, measured)
        }
    };
    Ok(RefinementResult {
        refined_frame,
        order,
        input_defect: eps,
        predicted_bound: eps.powi(order as i32 + 1),
        measured_defect,
    })
}

fn neumann_inverse_apply(d: &CMatrix, rhs: &CMatrix) -> Result<CMatrix> {
    let n = d.nrows();
    let system = linalg::identity(n) - d;
    if linalg::min_singular_value(&system) <= linalg::RANK_RTOL * linalg::op_norm(&system) {
        return Err(Error::Singular);
    }
    let x = system.lu().solve(rhs).ok_or(Error::Singular)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(x)
}

/// The exact oblique dual `g̃_k = L T_G δ_k` with `L = (I - D)^{-1}`.
pub fn limit_dual(f: &FiniteFrame, g: &FiniteFrame, w: &Subspace, v: &Subspace) -> Result<FiniteFrame> {
    guarded_defect(f, g, w, v, false)?;
    let d = defect_operator(f, g, w, v)?.into_matrix();
    FiniteFrame::from_synthesis(neumann_inverse_apply(&d, g.synthesis_matrix())?)
}

/// The exact oblique dual `f̃_k = L^* T_F δ_k` of `G` in `W`.
pub fn limit_dual_other_side(
    f: &FiniteFrame,
    g: &FiniteFrame,
    w: &Subspace,
    v: &Subspace,
) -> Result<FiniteFrame> {
    guarded_defect(f, g, w, v, false)?;
    let d = defect_operator(f, g, w, v)?.into_matrix();
    FiniteFrame::from_synthesis(neumann_inverse_apply(&d.adjoint(), f.synthesis_matrix())?)
}

/// `‖π_{V W^⊥} - T_{G̃} T_{F̃}^*‖` for the two limit duals.
///
/// This pair is not dual; the value equals `‖Σ_{n ≥ 1} D^n‖`.
pub fn joint_limit_defect(f: &FiniteFrame, g: &FiniteFrame, w: &Subspace, v: &Subspace) -> Result<f64> {
    let g_lim = limit_dual(f, g, w, v)?;
    let f_lim = limit_dual_other_side(f, g, w, v)?;
    let pi_vw = frame::oblique_projection(v, w)?;
    Ok(linalg::op_norm(
        &(pi_vw.matrix() - g_lim.synthesis_matrix() * f_lim.synthesis_matrix().adjoint()),
    ))
}

/// `F' = {((T_F T_G^*)|_W)^{-1} f_k}`, an exact oblique dual of `G` in `W`.
pub fn exact_dual_via_inverse(
    f: &FiniteFrame,
    g: &FiniteFrame,
    w: &Subspace,
    v: &Subspace,
) -> Result<FiniteFrame> {
    frame::duality_defect(f, g, w, v)?;
    let bw = w.basis();
    let restricted = bw.adjoint() * f.synthesis_matrix() * g.synthesis_matrix().adjoint() * bw;
    let scale = linalg::op_norm(&restricted);
    if scale == 0.0 || linalg::min_singular_value(&restricted) <= linalg::RANK_RTOL * scale {
        return Err(Error::Singular);
    }
    let coords = restricted
        .lu()
        .solve(&(bw.adjoint() * f.synthesis_matrix()))
        .ok_or(Error::Singular)?;
    FiniteFrame::from_synthesis(bw * coords)
}

/// `g_k = π_{V W^⊥} S_F^† f_k + h_k - Σ_j ⟨S_F^† f_k, f_j⟩ h_j + r_k`.
///
/// With `r = 0` every choice of `h ⊂ V` yields an exact oblique dual of `F`.
pub fn dual_family_member(
    f: &FiniteFrame,
    w: &Subspace,
    v: &Subspace,
    h: &FiniteFrame,
    r: &FiniteFrame,
) -> Result<FamilyMember> {
    for seq in [h, r] {
        if seq.len() != f.len() {
            return Err(Error::DimensionMismatch { expected: f.len(), found: seq.len() });
        }
        frame::check_frame_in(seq, v)?;
    }
    frame::check_frame_in(f, w)?;
    let pi_vw = frame::oblique_projection(v, w)?;
    let tf = f.synthesis_matrix();
    let (s_pinv, rank) = linalg::pseudo_inverse(frame::frame_operator(f).matrix());
    if rank < w.dim() {
        return Err(Error::RankDeficient { rank, dim: w.dim() });
    }
    let canonical = &s_pinv * tf;
    let m = f.len();
    let coupling = linalg::identity(m) - tf.adjoint() * &canonical;
    let t = pi_vw.matrix() * &canonical + h.synthesis_matrix() * coupling + r.synthesis_matrix();
    let remainder_norm = linalg::op_norm(&(r.synthesis_matrix() * tf.adjoint()));
    Ok(FamilyMember { frame: FiniteFrame::from_synthesis(t)?, remainder_norm })
}

/// `√(β r)`: defect bound for an `r`-perturbation of an exact dual when the
/// other frame has upper bound `β`.
pub fn perturbation_eps_bound(beta: f64, r: f64) -> Result<f64> {
    if !(beta > 0.0) || !(r >= 0.0) || !beta.is_finite() || !r.is_finite() {
        return Err(Error::InvalidInput(format!(
            "perturbation bound needs beta > 0 and r >= 0 (got beta = {beta}, r = {r})"
        )));
    }
    Ok((beta * r).sqrt())
}

/// Largest admissible perturbation size `α ε² / (‖π_{V W^⊥}‖ + ε)²` for
/// [`perturbed_canonical_oblique_dual`] to stay within `ε`.
pub fn admissible_perturbation(alpha: f64, eps: f64, projection_norm: f64) -> f64 {
    alpha * eps * eps / (projection_norm + eps).powi(2)
}

/// `g_k = π_{V W^⊥} (T_{G̃} T_{G̃}^*)^† g̃_k` for a frame `G̃` of `W`.
pub fn perturbed_canonical_oblique_dual(gtil: &FiniteFrame, w: &Subspace, v: &Subspace) -> Result<FiniteFrame> {
    frame::check_frame_in(gtil, w)?;
    let (s_pinv, rank) = linalg::pseudo_inverse(frame::frame_operator(gtil).matrix());
    if rank < w.dim() {
        return Err(Error::RankDeficient { rank, dim: w.dim() });
    }
    let pi_vw = frame::oblique_projection(v, w)?;
    FiniteFrame::from_synthesis(pi_vw.matrix() * s_pinv * gtil.synthesis_matrix())
}
