//! Finite frames, subspaces, oblique projections and duality defects.
//!
//! Everything lives in a `d`-dimensional complex coordinate space. A frame
//! is stored through its synthesis matrix `T` (column `k` is `f_k`), a
//! subspace through an orthonormal basis. The oblique projection with range
//! `W` and kernel `V^⊥` is `B_W (B_V^* B_W)^{-1} B_V^*`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// Threshold on the smallest singular value of the cross-Gram matrix below
/// which `H = W ⊕ V^⊥` is considered to fail.
pub const DIRECT_SUM_TOL: f64 = 1e-10;

/// Relative residual allowed when checking that vectors lie in a subspace.
pub const MEMBERSHIP_RTOL: f64 = 1e-8;

const ORTHONORMAL_TOL: f64 = 1e-12;
const ADJOINT_AGREEMENT_TOL: f64 = 1e-10;

/// A finite sequence `{f_k}` of vectors in `C^d`, held as its synthesis matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteFrame {
    synthesis: CMatrix,
}

impl FiniteFrame {
    /// Builds a frame from its `d × m` synthesis matrix.
    pub fn from_synthesis(synthesis: CMatrix) -> Result<Self> {
        let (d, m) = synthesis.shape();
        if d == 0 || m == 0 {
            return Err(Error::InvalidInput(
                "a frame needs at least one vector of positive dimension".into(),
            ));
        }
        linalg::check_dim(d)?;
        if synthesis.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("frame vectors must be finite".into()));
        }
        Ok(Self { synthesis })
    }

    pub fn from_vectors(vectors: &[CVector]) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::InvalidInput("empty frame".into()))?;
        let d = first.len();
        let mut t = CMatrix::zeros(d, vectors.len());
        for (k, v) in vectors.iter().enumerate() {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: v.len() });
            }
            t.set_column(k, v);
        }
        Self::from_synthesis(t)
    }

    /// Real vectors, promoted to complex.
    pub fn from_real(vectors: &[Vec<f64>]) -> Result<Self> {
        let vs: Vec<CVector> = vectors.iter().map(|v| linalg::real_vector(v)).collect();
        Self::from_vectors(&vs)
    }

    pub fn dim(&self) -> usize {
        self.synthesis.nrows()
    }

    pub fn len(&self) -> usize {
        self.synthesis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn synthesis_matrix(&self) -> &CMatrix {
        &self.synthesis
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.synthesis.column(k).into_owned()
    }

    pub fn vectors(&self) -> Vec<CVector> {
        (0..self.len()).map(|k| self.vector(k)).collect()
    }

    /// The frame `{U f_k}`.
    pub fn mapped(&self, u: &CMatrix) -> Result<Self> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.ncols() });
        }
        Self::from_synthesis(u * &self.synthesis)
    }

    /// Orthonormalised span of the frame vectors.
    pub fn span(&self) -> Result<Subspace> {
        Subspace::from_spanning(&self.synthesis)
    }
}

/// A subspace of `C^d` given by an orthonormal basis (as columns).
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    /// Orthonormalises the column space of `spanning`.
    pub fn from_spanning(spanning: &CMatrix) -> Result<Self> {
        linalg::check_dim(spanning.nrows())?;
        let basis = linalg::column_space(spanning);
        if basis.ncols() == 0 {
            return Err(Error::InvalidInput("spanning set is numerically zero".into()));
        }
        Ok(Self { basis })
    }

    pub fn from_spanning_vectors(vectors: &[CVector]) -> Result<Self> {
        Self::from_spanning(FiniteFrame::from_vectors(vectors)?.synthesis_matrix())
    }

    pub fn from_real_spanning(vectors: &[Vec<f64>]) -> Result<Self> {
        Self::from_spanning(FiniteFrame::from_real(vectors)?.synthesis_matrix())
    }

    /// Accepts a basis that is already orthonormal within `1e-12`.
    pub fn from_orthonormal(basis: CMatrix) -> Result<Self> {
        linalg::check_dim(basis.nrows())?;
        if basis.ncols() == 0 {
            return Err(Error::InvalidInput("a subspace basis needs at least one column".into()));
        }
        let gram = basis.adjoint() * &basis;
        let err = linalg::max_abs_diff(&gram, &linalg::identity(basis.ncols()));
        if err > ORTHONORMAL_TOL {
            return Err(Error::InvalidInput(format!("basis is not orthonormal (error {err:.3e})")));
        }
        Ok(Self { basis })
    }

    /// The whole space `C^d`.
    pub fn full(d: usize) -> Result<Self> {
        Self::from_orthonormal(linalg::identity(d))
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Orthogonal projector `P = B B^*`.
    pub fn projector(&self) -> LinearMap {
        LinearMap::new(&self.basis * self.basis.adjoint())
    }

    /// Orthogonal complement, or `None` when the subspace is the whole space.
    pub fn complement(&self) -> Option<Subspace> {
        let d = self.ambient_dim();
        if self.dim() >= d {
            return None;
        }
        let p_perp = linalg::identity(d) - self.projector().into_matrix();
        Subspace::from_spanning(&p_perp).ok()
    }

    /// `‖(I - P) X‖ / max(1, ‖X‖)` for the columns of `x`.
    pub fn residual(&self, x: &CMatrix) -> f64 {
        let inside = &self.basis * (self.basis.adjoint() * x);
        linalg::op_norm(&(x - inside)) / linalg::op_norm(x).max(1.0)
    }

    pub fn contains(&self, v: &CVector) -> bool {
        let x = CMatrix::from_column_slice(v.len(), 1, v.as_slice());
        v.len() == self.ambient_dim() && self.residual(&x) <= MEMBERSHIP_RTOL
    }

    /// The subspace `U W` for a unitary `U`.
    pub fn mapped(&self, u: &CMatrix) -> Result<Self> {
        Self::from_spanning(&(u * &self.basis))
    }
}

/// A dense matrix viewed as a linear operator.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    matrix: CMatrix,
}

impl LinearMap {
    pub fn new(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Operator norm, i.e. the largest singular value.
    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }

    pub fn adjoint(&self) -> LinearMap {
        LinearMap::new(self.matrix.adjoint())
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: self.matrix.ncols(), found: v.len() });
        }
        Ok(&self.matrix * v)
    }
}

/// Optimal frame bounds of a frame relative to a subspace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    /// Numerical rank of the synthesis operator.
    pub rank: usize,
    /// Whether the frame spans the whole subspace. When false, `lower`
    /// refers to the span of the frame only.
    pub spans_subspace: bool,
}

/// Outcome of the `H = W ⊕ V^⊥` test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectSumReport {
    pub direct_sum_ok: bool,
    /// `cos θ(W, V)`.
    pub cos_wv: f64,
    /// `cos θ(V, W)`.
    pub cos_vw: f64,
    pub cross_gram_sigma_min: f64,
    /// The angle criterion and the cross-Gram criterion gave the same verdict.
    pub criteria_agree: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub defect: f64,
    pub direct_sum_ok: bool,
    pub cos_wv: f64,
    pub cos_vw: f64,
}

fn check_coefficients(frame: &FiniteFrame, len: usize) -> Result<()> {
    if len != frame.len() {
        return Err(Error::DimensionMismatch { expected: frame.len(), found: len });
    }
    Ok(())
}

fn check_vector(frame: &FiniteFrame, len: usize) -> Result<()> {
    if len != frame.dim() {
        return Err(Error::DimensionMismatch { expected: frame.dim(), found: len });
    }
    Ok(())
}

fn check_same_ambient(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: a.ambient_dim(), found: b.ambient_dim() });
    }
    Ok(())
}

pub(crate) fn check_frame_in(frame: &FiniteFrame, subspace: &Subspace) -> Result<()> {
    check_vector(frame, subspace.ambient_dim())?;
    let residual = subspace.residual(frame.synthesis_matrix());
    if residual > MEMBERSHIP_RTOL {
        return Err(Error::NotInSubspace { residual });
    }
    Ok(())
}

/// `Σ_k c_k f_k`.
pub fn synthesis(frame: &FiniteFrame, c: &CVector) -> Result<CVector> {
    check_coefficients(frame, c.len())?;
    Ok(frame.synthesis_matrix() * c)
}

/// `(⟨f, f_k⟩)_k`, the adjoint of [`synthesis`].
pub fn analysis(frame: &FiniteFrame, f: &CVector) -> Result<CVector> {
    check_vector(frame, f.len())?;
    Ok(frame.synthesis_matrix().adjoint() * f)
}

/// `S = T T^*`.
pub fn frame_operator(frame: &FiniteFrame) -> LinearMap {
    let t = frame.synthesis_matrix();
    LinearMap::new(t * t.adjoint())
}

/// `β = ‖T‖²` and `α` the smallest non-zero squared singular value of `T`.
pub fn optimal_frame_bounds(frame: &FiniteFrame, w: &Subspace) -> Result<FrameBounds> {
    check_frame_in(frame, w)?;
    let s = linalg::singular_values(frame.synthesis_matrix());
    let smax = s.first().copied().unwrap_or(0.0);
    let nonzero: Vec<f64> = s.into_iter().filter(|&x| smax > 0.0 && x > linalg::RANK_RTOL * smax).collect();
    let rank = nonzero.len();
    let lower = nonzero.last().map_or(0.0, |x| x * x);
    Ok(FrameBounds { lower, upper: smax * smax, rank, spans_subspace: rank == w.dim() })
}

/// The canonical dual `{S^† f_k}` of a frame for `W`.
pub fn canonical_dual(frame: &FiniteFrame, w: &Subspace) -> Result<FiniteFrame> {
    check_frame_in(frame, w)?;
    let s = frame_operator(frame);
    let (s_pinv, rank) = linalg::pseudo_inverse(s.matrix());
    if rank < w.dim() {
        return Err(Error::RankDeficient { rank, dim: w.dim() });
    }
    FiniteFrame::from_synthesis(s_pinv * frame.synthesis_matrix())
}

/// Oblique projection with range `W` and kernel `V^⊥`, i.e. `π_{W V^⊥}`.
///
/// The other variant `π_{V W^⊥}` is `oblique_projection(v, w)`.
pub fn oblique_projection(w: &Subspace, v: &Subspace) -> Result<LinearMap> {
    oblique_projection_with_tol(w, v, DIRECT_SUM_TOL)
}

pub fn oblique_projection_with_tol(w: &Subspace, v: &Subspace, tol: f64) -> Result<LinearMap> {
    check_same_ambient(w, v)?;
    if w.dim() != v.dim() {
        return Err(Error::DirectSumFailure { sigma_min: 0.0 });
    }
    let cross = v.basis().adjoint() * w.basis();
    let sigma_min = linalg::min_singular_value(&cross);
    if sigma_min <= tol {
        return Err(Error::DirectSumFailure { sigma_min });
    }
    let inv = cross.try_inverse().ok_or(Error::DirectSumFailure { sigma_min })?;
    Ok(LinearMap::new(w.basis() * inv * v.basis().adjoint()))
}

/// `cos θ(V, W) = inf_{v ∈ V, ‖v‖ = 1} ‖P_W v‖`.
pub fn subspace_angle(v: &Subspace, w: &Subspace) -> Result<f64> {
    check_same_ambient(v, w)?;
    let m = w.basis().adjoint() * v.basis();
    Ok(linalg::min_singular_value(&m).clamp(0.0, 1.0))
}

/// Tests `H = W ⊕ V^⊥` by both cosines and by cross-Gram invertibility.
pub fn direct_sum_check(w: &Subspace, v: &Subspace, tol: f64) -> Result<DirectSumReport> {
    let cos_vw = subspace_angle(v, w)?;
    let cos_wv = subspace_angle(w, v)?;
    let cross = v.basis().adjoint() * w.basis();
    let cross_gram_sigma_min = if w.dim() == v.dim() { linalg::min_singular_value(&cross) } else { 0.0 };
    let by_angles = cos_vw > tol && cos_wv > tol;
    let by_gram = cross_gram_sigma_min > tol;
    Ok(DirectSumReport {
        direct_sum_ok: by_angles && by_gram,
        cos_wv,
        cos_vw,
        cross_gram_sigma_min,
        criteria_agree: by_angles == by_gram,
    })
}

/// `‖π_{W V^⊥} - T_F T_G^*‖`, cross-checked against the adjoint ordering.
pub fn duality_defect(f: &FiniteFrame, g: &FiniteFrame, w: &Subspace, v: &Subspace) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), found: g.len() });
    }
    check_frame_in(f, w)?;
    check_frame_in(g, v)?;
    let pi_wv = oblique_projection(w, v)?;
    let pi_vw = oblique_projection(v, w)?;
    let tf = f.synthesis_matrix();
    let tg = g.synthesis_matrix();
    let forward = linalg::op_norm(&(pi_wv.matrix() - tf * tg.adjoint()));
    let backward = linalg::op_norm(&(pi_vw.matrix() - tg * tf.adjoint()));
    if (forward - backward).abs() > ADJOINT_AGREEMENT_TOL * forward.max(1.0) {
        return Err(Error::Consistency(format!(
            "defect orderings disagree: {forward:.17e} vs {backward:.17e}"
        )));
    }
    Ok(forward)
}

/// Full report: defect plus the direct-sum diagnostics.
pub fn duality_report(
    f: &FiniteFrame,
    g: &FiniteFrame,
    w: &Subspace,
    v: &Subspace,
    tol: f64,
) -> Result<DualityReport> {
    let ds = direct_sum_check(w, v, tol)?;
    if !ds.direct_sum_ok {
        return Err(Error::DirectSumFailure { sigma_min: ds.cross_gram_sigma_min });
    }
    let defect = duality_defect(f, g, w, v)?;
    Ok(DualityReport { defect, direct_sum_ok: ds.direct_sum_ok, cos_wv: ds.cos_wv, cos_vw: ds.cos_vw })
}

/// `T_G T_F^* f = Σ_k ⟨f, f_k⟩ g_k`.
pub fn reconstruct(f: &FiniteFrame, g: &FiniteFrame, x: &CVector) -> Result<CVector> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), found: g.len() });
    }
    check_vector(g, f.dim())?;
    let coeffs = analysis(f, x)?;
    synthesis(g, &coeffs)
}

/// `‖T_F^*(f_r - f)‖ / ‖f‖`.
pub fn consistency_defect(frame: &FiniteFrame, f: &CVector, f_r: &CVector) -> Result<f64> {
    check_vector(frame, f.len())?;
    check_vector(frame, f_r.len())?;
    let norm = f.norm();
    if norm == 0.0 {
        return Err(Error::InvalidInput("consistency defect needs a non-zero signal".into()));
    }
    Ok(analysis(frame, &(f_r - f))?.norm() / norm)
}
