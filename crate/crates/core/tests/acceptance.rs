mod common;

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::time::Instant;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use oblique_frames::bspline;
use oblique_frames::cli::{self, EXIT_OK};
use oblique_frames::frame::{self, FiniteFrame};
use oblique_frames::linalg::{self, CMatrix, CVector};
use oblique_frames::refinement;
use oblique_frames::shift_invariant::{self as si, DecayBound, Generator, SiOptions, TruncatedSymbol};
use rand::Rng;

const TABLE: [f64; 5] = [0.732050720745298, 0.196152304804580, 0.052558805558347, 0.014083071590247, 0.003773541369707];

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn criterion_1() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let out = dir.path().join("table.csv");
    let start = Instant::now();
    let code = cli::run(["oblique-frames", "bspline-table", "--kmax", "4", "--out", out.to_str().unwrap()]);
    let elapsed = start.elapsed().as_secs_f64();
    check(code == EXIT_OK, format!("exit code {code}"))?;
    let text = fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    check(rows.len() == 5, format!("{} rows", rows.len()))?;
    let mut worst = 0.0f64;
    for (k, row) in rows.iter().enumerate() {
        let half = (3 + 2 * k) as f64 / 2.0;
        check(row[0] == k as f64 && row[1] == -half && row[2] == half, format!("row {k} support {row:?}"))?;
        worst = worst.max((row[3] - TABLE[k]).abs());
    }
    check(worst < 5e-7, format!("max deviation {worst:.3e}"))?;
    check(elapsed < 10.0, format!("runtime {elapsed:.2} s"))?;
    Ok(format!("max deviation {worst:.2e}, runtime {elapsed:.2} s"))
}

fn criterion_2() -> Outcome {
    let o = SiOptions::default();
    let t = bspline::truncated_dual_generator(0, &o).map_err(|e| e.to_string())?;
    let e0 = (t.eps - (3f64.sqrt() - 1.0)).abs();
    check(e0 < 1e-12, format!("eps(0) off by {e0:.3e}"))?;
    let h = si::dual_symbol(&Generator::bspline(1).unwrap(), &Generator::bspline(3).unwrap(), &o).map_err(|e| e.to_string())?;
    let coeffs = si::fourier_coefficients(&h, 8).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (k, c) in coeffs.iter() {
        let exact = 3f64.sqrt() * (3f64.sqrt() - 2.0).powi(k.unsigned_abs() as i32);
        worst = worst.max((c - Complex64::new(exact, 0.0)).norm());
    }
    check(worst < 1e-10, format!("coefficients off by {worst:.3e}"))?;
    Ok(format!("eps(0) error {e0:.2e}, coefficient error {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut r = rng(1003);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let d = r.random_range(2..=50);
        let k = r.random_range(1..d);
        let (w, v) = random_direct_sum(&mut r, d, k, 0.05);
        let pi = frame::oblique_projection(&w, &v).map_err(|e| e.to_string())?;
        let p = pi.matrix();
        let other = frame::oblique_projection(&v, &w).map_err(|e| e.to_string())?;
        let cos = frame::subspace_angle(&w, &v).map_err(|e| e.to_string())?;
        let mut errs = vec![
            linalg::max_abs_diff(&(p * p), p),
            linalg::op_norm(&(p * w.basis() - w.basis())),
            linalg::max_abs_diff(&pi.adjoint().into_matrix(), other.matrix()),
            (pi.norm() * cos - 1.0).abs(),
        ];
        if let Some(vp) = v.complement() {
            errs.push(linalg::op_norm(&(p * vp.basis())));
        }
        let e = errs.into_iter().fold(0.0, f64::max);
        check(e < 1e-8, format!("instance {i} (d = {d}): error {e:.3e}"))?;
        worst = worst.max(e);
    }
    Ok(format!("200 instances, max error {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let mut r = rng(1004);
    let mut worst_limit = 0.0f64;
    for i in 0..100 {
        let d = r.random_range(2..=20);
        let k = r.random_range(1..d);
        let n = r.random_range(k..=2 * k + 2);
        let eps = r.random_range(0.01..0.9);
        let inst = instance_with_defect(&mut r, d, k, n, eps);
        for order in 0..=6 {
            let res = refinement::refine_dual(&inst.f, &inst.g, &inst.w, &inst.v, order).map_err(|e| e.to_string())?;
            check(
                res.measured_defect <= eps.powi(order as i32 + 1) + 1e-10,
                format!("instance {i}, N = {order}: {} > {}", res.measured_defect, eps.powi(order as i32 + 1)),
            )?;
        }
        let lim = refinement::limit_dual(&inst.f, &inst.g, &inst.w, &inst.v).map_err(|e| e.to_string())?;
        let defect = frame::duality_defect(&inst.f, &lim, &inst.w, &inst.v).map_err(|e| e.to_string())?;
        check(defect < 1e-10, format!("instance {i}: limit defect {defect:.3e}"))?;
        worst_limit = worst_limit.max(defect);
    }
    Ok(format!("100 instances, max limit defect {worst_limit:.2e}"))
}

fn criterion_5() -> Outcome {
    let mut r = rng(1005);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let d = r.random_range(2..=20);
        let k = r.random_range(1..d);
        let n = r.random_range(k..=2 * k + 2);
        let eps = r.random_range(0.0..0.99);
        let inst = instance_with_defect(&mut r, d, k, n, eps);
        let fp = refinement::exact_dual_via_inverse(&inst.f, &inst.g, &inst.w, &inst.v).map_err(|e| e.to_string())?;
        let a = frame::duality_defect(&fp, &inst.g, &inst.w, &inst.v).map_err(|e| e.to_string())?;
        let h = FiniteFrame::from_synthesis(inst.v.basis() * gaussian(&mut r, k, n)).unwrap();
        let zero = FiniteFrame::from_synthesis(CMatrix::zeros(d, n)).unwrap();
        let member = refinement::dual_family_member(&inst.f, &inst.w, &inst.v, &h, &zero).map_err(|e| e.to_string())?;
        let b = frame::duality_defect(&inst.f, &member.frame, &inst.w, &inst.v).map_err(|e| e.to_string())?;
        check(a < 1e-10 && b < 1e-10, format!("instance {i}: defects {a:.3e}, {b:.3e}"))?;
        worst = worst.max(a).max(b);
    }
    Ok(format!("100 instances, max defect {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut r = rng(1006);
    let mut margin = f64::INFINITY;
    for i in 0..50 {
        let d = r.random_range(2..=20);
        let k = r.random_range(1..d);
        let n = r.random_range(k..=2 * k + 2);
        let r_size: f64 = r.random_range(0.0..0.5);
        let (w, v) = random_direct_sum(&mut r, d, k, 0.2);
        let f = random_frame_in(&mut r, &w, n);
        let gt = canonical_oblique_dual(&f, &w, &v);
        let delta = random_in_with_norm(&mut r, &v, n, r_size.sqrt());
        let g = FiniteFrame::from_synthesis(gt.synthesis_matrix() + delta).unwrap();
        let beta = frame::optimal_frame_bounds(&f, &w).map_err(|e| e.to_string())?.upper;
        let bound = refinement::perturbation_eps_bound(beta, r_size).map_err(|e| e.to_string())?;
        let defect = frame::duality_defect(&f, &g, &w, &v).map_err(|e| e.to_string())?;
        check(defect <= bound + 1e-10, format!("instance {i}: {defect} > {bound}"))?;
        margin = margin.min(bound - defect);
    }
    Ok(format!("50 instances, smallest slack {margin:.2e}"))
}

fn inner(x: &CVector, y: &CVector) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

fn unit(d: usize, j: usize) -> CVector {
    CVector::from_fn(d, |i, _| if i == j { c(1.0) } else { c(0.0) })
}

/// Matrix of `f ↦ π f - Σ_k ⟨f, g_k⟩ f_k`.
fn reconstruction_error_matrix(f: &FiniteFrame, g: &FiniteFrame, pi: &CMatrix) -> CMatrix {
    let d = f.dim();
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        let e = unit(d, j);
        let mut col = pi * &e;
        for k in 0..f.len() {
            col -= f.vector(k) * inner(&e, &g.vector(k));
        }
        m.set_column(j, &col);
    }
    m
}

/// Matrix of `(f, g) ↦ ⟨π f, g⟩ - Σ_k ⟨f, g_k⟩ ⟨f_k, g⟩`.
fn bilinear_matrix(f: &FiniteFrame, g: &FiniteFrame, pi: &CMatrix) -> CMatrix {
    let d = f.dim();
    DMatrix::from_fn(d, d, |i, j| {
        let (ej, ei) = (unit(d, j), unit(d, i));
        let mut v = inner(&(pi * &ej), &ei);
        for k in 0..f.len() {
            v -= inner(&ej, &g.vector(k)) * inner(&f.vector(k), &ei);
        }
        v
    })
}

fn criterion_7() -> Outcome {
    let mut r = rng(1007);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let d = r.random_range(2..=14);
        let k = r.random_range(1..d);
        let n = r.random_range(k..=2 * k + 2);
        let eps = r.random_range(0.0..1.0);
        let inst = instance_with_defect(&mut r, d, k, n, eps);
        let defect = frame::duality_defect(&inst.f, &inst.g, &inst.w, &inst.v).map_err(|e| e.to_string())?;
        let pi_wv = frame::oblique_projection(&inst.w, &inst.v).unwrap().into_matrix();
        let pi_vw = frame::oblique_projection(&inst.v, &inst.w).unwrap().into_matrix();
        let other_side = linalg::op_norm(&(&pi_vw - inst.g.synthesis_matrix() * inst.f.synthesis_matrix().adjoint()));
        let forms = [
            other_side,
            linalg::op_norm(&reconstruction_error_matrix(&inst.f, &inst.g, &pi_wv)),
            linalg::op_norm(&reconstruction_error_matrix(&inst.g, &inst.f, &pi_vw)),
            linalg::op_norm(&bilinear_matrix(&inst.f, &inst.g, &pi_wv)),
            linalg::op_norm(&bilinear_matrix(&inst.g, &inst.f, &pi_vw)),
        ];
        for value in forms {
            let e = (value - defect).abs();
            check(e < 1e-10, format!("instance {i}: form differs by {e:.3e}"))?;
            worst = worst.max(e);
        }
    }
    Ok(format!("50 instances, max disagreement {worst:.2e}"))
}

fn window(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    move |x| if (0.0..2.0).contains(&x) { f(x) } else { 0.0 }
}

fn compact(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Generator {
    Generator::custom(name, move |x| Complex64::new(f(x), 0.0), DecayBound::compact(2.0))
}

fn rel_diff(a: &si::SampledSpectrum, b: &si::SampledSpectrum) -> f64 {
    let scale = b.values.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

fn criterion_8() -> Outcome {
    let o = SiOptions::with_grid(10);
    let err = |e: oblique_frames::Error| e.to_string();
    let t = |x: f64| 1.0 + 0.5 * (PI * x).sin();
    let s = |x: f64| 1.0 + 0.3 * (PI * x / 2.0).cos();
    let phi1 = compact("t", window(t));
    let phi = compact("s", window(s));
    let pairs = [(Generator::bspline(1).unwrap(), Generator::bspline(3).unwrap()), (phi.clone(), phi1.clone())];
    let sym = TruncatedSymbol::new(vec![Complex64::new(0.2, -0.1), Complex64::new(1.0, 0.3), Complex64::new(-0.4, 0.0)]).map_err(err)?;

    let mut fix = 0.0f64;
    let mut idem = 0.0f64;
    for (phi, phi1) in &pairs {
        let f = Generator::modulated(sym.clone(), phi.clone());
        let out = si::project_fourier(phi, phi1, &f, 3, &o).map_err(err)?;
        fix = fix.max(rel_diff(&out, &si::sample_spectrum(&f, 3, &o)));
        let p = si::projection_generator(phi, phi1, &Generator::bspline(2).unwrap(), &o).map_err(err)?;
        let twice = si::project_fourier(phi, phi1, &p, 2, &o).map_err(err)?;
        idem = idem.max(rel_diff(&twice, &si::sample_spectrum(&p, 2, &o)));
    }

    let vperp = compact("vperp", move |x| {
        if (0.0..1.0).contains(&x) {
            t(x + 1.0)
        } else if (1.0..2.0).contains(&x) {
            -t(x - 1.0)
        } else {
            0.0
        }
    });
    let out = si::project_fourier(&phi, &phi1, &vperp, 2, &o).map_err(err)?;
    let scale = si::sample_spectrum(&vperp, 2, &o).values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let annihilate = out.values.iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;

    check(fix < 1e-10, format!("W members moved by {fix:.3e}"))?;
    check(annihilate < 1e-10, format!("V-perp member left {annihilate:.3e}"))?;
    check(idem < 1e-10, format!("idempotence error {idem:.3e}"))?;
    Ok(format!("fix {fix:.2e}, annihilate {annihilate:.2e}, idempotence {idem:.2e}"))
}

fn criterion_9() -> Outcome {
    let o = SiOptions::default();
    let mut prev: Option<(f64, f64)> = None;
    let mut ratio = 0.0f64;
    for k in 0..=8 {
        let t = bspline::truncated_dual_generator(k, &o).map_err(|e| e.to_string())?;
        let nec = t.necessary_eps(&o).map_err(|e| e.to_string())?;
        check(nec <= t.eps * (1.0 + 1e-12), format!("K = {k}: necessary {nec} > sufficient {}", t.eps))?;
        if let Some((pn, ps)) = prev {
            check(nec < pn && t.eps < ps, format!("K = {k}: not decreasing"))?;
        }
        ratio = ratio.max(nec / t.eps);
        prev = Some((nec, t.eps));
    }
    Ok(format!("K = 0..8, max necessary/sufficient {ratio:.12}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("table reproduction", criterion_1),
        ("closed-form oracle", criterion_2),
        ("projection identities", criterion_3),
        ("refinement decay", criterion_4),
        ("exact-dual recovery", criterion_5),
        ("perturbation bound", criterion_6),
        ("defect forms", criterion_7),
        ("Fourier-domain projection", criterion_8),
        ("sandwich", criterion_9),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let line = match run() {
            Ok(detail) => format!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed.push(i + 1);
                format!("FAIL {} {name}: {why}", i + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
