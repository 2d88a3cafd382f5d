#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use oblique_frames::frame::{self, FiniteFrame, Subspace};
use oblique_frames::linalg::{self, CMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / 2f64.sqrt()
    })
}

pub fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let qr = gaussian(rng, d, d).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let p = r[(j, j)];
        let phase = if p.norm() > 0.0 { p / p.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_subspace(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Subspace {
    Subspace::from_spanning(&gaussian(rng, d, k)).unwrap()
}

/// Random `W`, `V` of equal dimension `k` with `cos θ(W, V) ≥ min_cos`.
pub fn random_direct_sum(rng: &mut ChaCha8Rng, d: usize, k: usize, min_cos: f64) -> (Subspace, Subspace) {
    loop {
        let w = random_subspace(rng, d, k);
        let v = random_subspace(rng, d, k);
        if frame::subspace_angle(&w, &v).unwrap() >= min_cos && frame::subspace_angle(&v, &w).unwrap() >= min_cos {
            return (w, v);
        }
    }
}

/// `n ≥ dim` random vectors spanning `sub`.
pub fn random_frame_in(rng: &mut ChaCha8Rng, sub: &Subspace, n: usize) -> FiniteFrame {
    FiniteFrame::from_synthesis(sub.basis() * gaussian(rng, sub.dim(), n)).unwrap()
}

/// The canonical oblique dual `π_{V W^⊥} S_F^† f_k`.
pub fn canonical_oblique_dual(f: &FiniteFrame, w: &Subspace, v: &Subspace) -> FiniteFrame {
    let (s_pinv, _) = linalg::pseudo_inverse(frame::frame_operator(f).matrix());
    let pi_vw = frame::oblique_projection(v, w).unwrap();
    FiniteFrame::from_synthesis(pi_vw.matrix() * s_pinv * f.synthesis_matrix()).unwrap()
}

/// Random sequence of `n` vectors in `sub` with synthesis norm `norm`.
pub fn random_in_with_norm(rng: &mut ChaCha8Rng, sub: &Subspace, n: usize, norm: f64) -> CMatrix {
    let m = sub.basis() * gaussian(rng, sub.dim(), n);
    let s = linalg::op_norm(&m);
    m * Complex64::new(norm / s, 0.0)
}

pub struct Instance {
    pub f: FiniteFrame,
    pub g: FiniteFrame,
    pub w: Subspace,
    pub v: Subspace,
    pub eps: f64,
}

/// A pair `F ⊂ W`, `G ⊂ V` with duality defect exactly `eps`: the canonical
/// oblique dual plus a perturbation `R ⊂ V` scaled so that `‖T_F T_R^*‖ = eps`.
pub fn instance_with_defect(rng: &mut ChaCha8Rng, d: usize, k: usize, n: usize, eps: f64) -> Instance {
    let (w, v) = random_direct_sum(rng, d, k, 0.2);
    let f = random_frame_in(rng, &w, n);
    let g0 = canonical_oblique_dual(&f, &w, &v);
    let r = v.basis() * gaussian(rng, k, n);
    let s = linalg::op_norm(&(f.synthesis_matrix() * r.adjoint()));
    let t = g0.synthesis_matrix() + r * Complex64::new(eps / s, 0.0);
    let g = FiniteFrame::from_synthesis(t).unwrap();
    Instance { f, g, w, v, eps }
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
