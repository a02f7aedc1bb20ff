//! Runs the requested verification suites over every seed of a scene.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::connection::{
    affine_extension, extend_tangent_field, nabla_tensor_with, normal_form_check, skew_residual, shape_operator,
    covariant_residual, FdConfig, StructureTensor,
};
use crate::error::{Error, Result};
use crate::hypersurface::{Hypersurface, SurfacePoint};
use crate::induced::InducedStructure;
use crate::normality::{contact_metric_residual, jacobi_residual, lie_bracket, normality_tensor, NormalityTensor};
use crate::quatlin::{AmbientMatrix, AmbientVector};
use crate::report::{Conventions, ConvergenceEntry, Entry, PointReport, ResidualReport, Summary};
use crate::residual::random_tangent;
use crate::scene::{Scene, Suite};

/// Gauge parameters exercised by the `gauge` suite.
pub const GAUGE_SAMPLES: [(f64, f64); 3] = [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8)];

/// Residuals whose Richardson ratio is asserted.
const CONVERGENT: [(&str, &str); 2] = [("covariant", "nabla_G_formula"), ("covariant", "nabla_H_formula")];
/// Residuals whose ratio is reported only.
const CONVERGENT_DIAGNOSTIC: [(&str, &str); 4] = [
    ("normal_form", "s_plus_sigma"),
    ("normal_form", "s_minus_nablaV_U"),
    ("skew", "nabla_G_skew"),
    ("skew", "nabla_H_skew"),
];

fn stream_seed(rng_seed: u64, point: usize, suite: Suite) -> u64 {
    rng_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((point as u64) << 8)
        .wrapping_add(suite as u64)
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::SingularPoint { .. } => "SingularPoint",
        Error::NonConvergence { .. } => "NonConvergence",
        Error::FrameDegeneracy { .. } => "FrameDegeneracy",
        _ => "Error",
    }
}

/// Project every seed, run every requested suite at every step size and
/// assemble the report. Per-seed failures are recorded, not propagated.
pub fn run(scene: &Scene) -> Result<ResidualReport> {
    let surf = scene.hypersurface()?;
    let points: Vec<PointReport> = scene
        .seeds
        .par_iter()
        .enumerate()
        .map(|(index, seed)| run_point(scene, &surf, index, seed))
        .collect();
    let convergence = points.iter().flat_map(|p| convergence_for(scene, p)).collect();
    let mut report = ResidualReport {
        tool: concat!("cacms-lab ", env!("CARGO_PKG_VERSION")).to_owned(),
        scene_hash: scene.hash.clone(),
        rng_seed: scene.rng_seed,
        m: scene.m,
        h_values: scene.h_values.clone(),
        conventions: Conventions::default(),
        points,
        convergence,
        summary: Summary {
            asserted: 0,
            failed: 0,
            errors: 0,
            exit_code: 0,
        },
    };
    report.summarize();
    Ok(report)
}

fn run_point(scene: &Scene, surf: &Hypersurface, index: usize, seed: &AmbientVector) -> PointReport {
    let mut report = PointReport {
        index,
        seed: seed.iter().copied().collect(),
        status: "ok".into(),
        error_kind: None,
        error: None,
        f_residual: None,
        entries: Vec::new(),
    };
    let outcome = surf
        .project(seed, scene.newton_tol, scene.max_iter)
        .and_then(|sp| {
            report.f_residual = Some(sp.f_residual);
            for &suite in &scene.suites {
                run_suite(scene, surf, &sp, index, suite, &mut report.entries)?;
            }
            Ok(())
        });
    if let Err(e) = outcome {
        report.status = "error".into();
        report.error_kind = Some(error_kind(&e).into());
        report.error = Some(e.to_string());
    }
    report
}

fn tangents(rng: &mut ChaCha8Rng, sp: &SurfacePoint, count: usize) -> Vec<AmbientVector> {
    (0..count).map(|_| random_tangent(rng, &sp.projector)).collect()
}

fn run_suite(
    scene: &Scene,
    surf: &Hypersurface,
    sp: &SurfacePoint,
    index: usize,
    suite: Suite,
    out: &mut Vec<Entry>,
) -> Result<()> {
    let tol = &scene.tolerances;
    let name = suite.name();
    let seed = stream_seed(scene.rng_seed, index, suite);
    let s = InducedStructure::new(surf.structure(), sp);
    let trials = scene.trials.max(1);
    match suite {
        Suite::Axioms => {
            for r in s.residuals(trials, seed).iter() {
                out.push(Entry::asserted(name, None, &r.name, r.value, tol.algebraic));
            }
        }
        Suite::Gauge => {
            for (a, b) in GAUGE_SAMPLES {
                let rotated = s.gauge_rotate(a, b)?;
                let label = format!("rotated_a{a}_b{b}");
                out.push(Entry::asserted(name, None, &label, rotated.residuals(trials, seed).max(), tol.algebraic));
            }
            let quarter = s.gauge_rotate(0.0, 1.0)?;
            let swap = (&quarter.g + &s.h).amax().max((&quarter.h - &s.g).amax());
            out.push(Entry::asserted(name, None, "quarter_turn_swaps_G_H", swap, tol.algebraic));
            let (a1, b1, a2, b2) = (0.6, 0.8, 0.28, -0.96);
            let twice = s.gauge_rotate(a1, b1)?.gauge_rotate(a2, b2)?;
            let once = s.gauge_rotate(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1)?;
            out.push(Entry::asserted(name, None, "composition", twice.max_difference(&once), tol.composition));
        }
        Suite::Frame => {
            let frame = s.adapted_frame(seed)?;
            out.push(Entry::asserted(name, None, "gram", frame.gram_residual(), tol.algebraic));
            out.push(Entry::asserted(name, None, "tangency", frame.tangency_residual(&s.projector), tol.algebraic));
            out.push(Entry::asserted(name, None, "quadruple", frame.quadruple_residual(&s), tol.algebraic));
            out.push(Entry::asserted(name, None, "gram_schmidt_correction", frame.correction, tol.algebraic));
            for &h in &scene.h_values {
                let cfg = scene.fd_config(h);
                let a = assemble_shape_operator(surf, sp, &frame.vectors, &cfg)?;
                let asym = (&a - a.transpose()).amax();
                out.push(Entry::asserted(name, Some(h), "A_symmetry", asym, tol.first_derivative));
                out.push(Entry::diagnostic(name, Some(h), "A_frobenius", a.norm()));
            }
        }
        Suite::Covariant => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pairs: Vec<_> = (0..trials).map(|_| (random_tangent(&mut rng, &sp.projector), random_tangent(&mut rng, &sp.projector))).collect();
            let b = extension_perturbation(sp.p.len());
            for &h in &scene.h_values {
                let cfg = scene.fd_config(h);
                let (mut rg, mut rh, mut leak, mut ext) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
                for (x, y) in &pairs {
                    let r = covariant_residual(surf, sp, x, y, &cfg)?;
                    rg = rg.max(r.res_g);
                    rh = rh.max(r.res_h);
                    leak = leak.max(r.normal_leak);
                    let plain = nabla_tensor_with(surf, sp, x, &extend_tangent_field(y.clone()), StructureTensor::G, &cfg)?;
                    let affine = affine_extension(y.clone(), b.clone(), sp.p.clone());
                    let alt = nabla_tensor_with(surf, sp, x, &affine, StructureTensor::G, &cfg)?;
                    ext = ext.max((&plain - alt).norm());
                    let rescaled = rescaled_extension(y.clone(), x.clone(), sp.p.clone());
                    let alt = nabla_tensor_with(surf, sp, x, &rescaled, StructureTensor::G, &cfg)?;
                    ext = ext.max((&plain - alt).norm());
                }
                out.push(Entry::asserted(name, Some(h), "nabla_G_formula", rg, tol.first_derivative));
                out.push(Entry::asserted(name, Some(h), "nabla_H_formula", rh, tol.first_derivative));
                out.push(Entry::asserted(name, Some(h), "normal_leak", leak, tol.first_derivative));
                out.push(Entry::asserted(name, Some(h), "extension_independence", ext, tol.extension));
            }
        }
        Suite::NormalForm => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs = tangents(&mut rng, sp, trials);
            for &h in &scene.h_values {
                let cfg = scene.fd_config(h);
                let (mut a, mut b) = (0.0f64, 0.0f64);
                for x in &xs {
                    let c = normal_form_check(surf, sp, x, &cfg)?;
                    a = a.max((c.s + c.sigma).abs());
                    b = b.max((c.s - c.nabla_v_u).abs());
                }
                out.push(Entry::asserted(name, Some(h), "s_plus_sigma", a, tol.first_derivative));
                out.push(Entry::asserted(name, Some(h), "s_minus_nablaV_U", b, tol.first_derivative));
            }
        }
        Suite::Skew => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let triples: Vec<_> = (0..trials).map(|_| tangents(&mut rng, sp, 3)).collect();
            for &h in &scene.h_values {
                let cfg = scene.fd_config(h);
                let (mut rg, mut rh) = (0.0f64, 0.0f64);
                for t in &triples {
                    let (g, hh) = skew_residual(surf, sp, &t[0], &[(t[1].clone(), t[2].clone())], &cfg)?;
                    rg = rg.max(g);
                    rh = rh.max(hh);
                }
                out.push(Entry::asserted(name, Some(h), "nabla_G_skew", rg, tol.first_derivative));
                out.push(Entry::asserted(name, Some(h), "nabla_H_skew", rh, tol.first_derivative));
            }
        }
        Suite::Normality => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let triples: Vec<_> = (0..trials).map(|_| tangents(&mut rng, sp, 3)).collect();
            for &h in &scene.h_values {
                let cfg = scene.fd_config(h);
                let mut acc = [0.0f64; 9];
                for t in &triples {
                    for (k, which) in [NormalityTensor::S, NormalityTensor::T].into_iter().enumerate() {
                        let xy = normality_tensor(surf, sp, which, &t[0], &t[1], &cfg)?;
                        let yx = normality_tensor(surf, sp, which, &t[1], &t[0], &cfg)?;
                        let anti = (&xy.value + &yx.value - (&xy.remainder + &yx.remainder)).norm();
                        acc[k] = acc[k].max(xy.value.norm());
                        acc[2 + k] = acc[2 + k].max(xy.torsion.norm());
                        acc[4 + k] = acc[4 + k].max(xy.normal_leak(sp));
                        acc[6 + k] = acc[6 + k].max(anti);
                    }
                    let w: Vec<_> = t.iter().map(|v| extend_tangent_field(v.clone())).collect();
                    let jacobi = jacobi_residual(surf, sp, [&w[0], &w[1], &w[2]], &cfg)?;
                    acc[8] = acc[8].max(jacobi.norm());
                    let bracket = lie_bracket(surf, sp, &w[0], &w[1], &cfg)?;
                    let torsion_free = sp.normal_norm(&bracket);
                    out_max(out, name, h, "torsion_free", torsion_free, tol.first_derivative);
                }
                out.push(Entry::diagnostic(name, Some(h), "S_norm", acc[0]));
                out.push(Entry::diagnostic(name, Some(h), "T_norm", acc[1]));
                out.push(Entry::diagnostic(name, Some(h), "GG_torsion_norm", acc[2]));
                out.push(Entry::diagnostic(name, Some(h), "HH_torsion_norm", acc[3]));
                out.push(Entry::asserted(name, Some(h), "S_normal_leak", acc[4], tol.second_derivative));
                out.push(Entry::asserted(name, Some(h), "T_normal_leak", acc[5], tol.second_derivative));
                out.push(Entry::asserted(name, Some(h), "S_antisymmetry", acc[6], tol.second_derivative));
                out.push(Entry::asserted(name, Some(h), "T_antisymmetry", acc[7], tol.second_derivative));
                out.push(Entry::asserted(name, Some(h), "jacobi", acc[8], tol.second_derivative));
            }
        }
        Suite::Contact => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pairs: Vec<_> = (0..trials).map(|_| tangents(&mut rng, sp, 2)).collect();
            for &h in &scene.h_values {
                let cfg = scene.fd_config(h);
                let mut acc = [0.0f64; 4];
                for p in &pairs {
                    let r = contact_metric_residual(surf, sp, &p[0], &p[1], &cfg)?;
                    for (slot, v) in acc.iter_mut().zip([r.res_u_full, r.res_u_half, r.res_v_full, r.res_v_half]) {
                        *slot = slot.max(v);
                    }
                }
                for (label, v) in ["res_u_full", "res_u_half", "res_v_full", "res_v_half"].into_iter().zip(acc) {
                    out.push(Entry::diagnostic(name, Some(h), label, v));
                }
            }
        }
    }
    Ok(())
}

/// Keep one entry per `(suite, h, name)`, holding the maximum value.
fn out_max(out: &mut Vec<Entry>, suite: &str, h: f64, name: &str, value: f64, tolerance: f64) {
    let fresh = Entry::asserted(suite, Some(h), name, value, tolerance);
    match out
        .iter_mut()
        .find(|e| e.suite == suite && e.h == Some(h) && e.name == name)
    {
        Some(e) => {
            let worse = match (e.value, fresh.value) {
                (Some(old), Some(new)) => new > old,
                (Some(_), None) => true,
                _ => false,
            };
            if worse {
                *e = fresh;
            }
        }
        None => out.push(fresh),
    }
}

/// Fixed dense matrix with unit Frobenius norm.
pub fn extension_perturbation(dim: usize) -> AmbientMatrix {
    AmbientMatrix::from_fn(dim, dim, |i, j| ((1 + i * 7 + j * 3) as f64).sin()).normalize()
}

/// `q -> (1 + g(q - p0, Z)) P_q Y0`.
fn rescaled_extension(
    y0: AmbientVector,
    z: AmbientVector,
    p0: AmbientVector,
) -> impl Fn(&SurfacePoint) -> Result<AmbientVector> {
    move |q: &SurfacePoint| Ok(q.tangential(&y0) * (1.0 + z.dot(&(&q.p - &p0))))
}

/// `g(e_i, A e_j)` in the given tangent frame.
pub fn assemble_shape_operator(
    surf: &Hypersurface,
    sp: &SurfacePoint,
    frame: &[AmbientVector],
    cfg: &FdConfig,
) -> Result<AmbientMatrix> {
    let columns = frame
        .iter()
        .map(|e| Ok(shape_operator(surf, sp, e, cfg)?.a_x))
        .collect::<Result<Vec<_>>>()?;
    Ok(AmbientMatrix::from_fn(frame.len(), frame.len(), |i, j| frame[i].dot(&columns[j])))
}

fn convergence_for(scene: &Scene, point: &PointReport) -> Vec<ConvergenceEntry> {
    let tol = &scene.tolerances;
    let lookup = |suite: &str, name: &str, h: f64| {
        point
            .entries
            .iter()
            .find(|e| e.suite == suite && e.name == name && e.h == Some(h))
            .and_then(|e| e.value)
    };
    let mut out = Vec::new();
    let tracked = CONVERGENT
        .iter()
        .map(|k| (k, true))
        .chain(CONVERGENT_DIAGNOSTIC.iter().map(|k| (k, false)));
    for (&(suite, name), assertable) in tracked {
        for w in scene.h_values.windows(2) {
            let (hc, hf) = (w[0], w[1]);
            let (Some(coarse), Some(fine)) = (lookup(suite, name, hc), lookup(suite, name, hf)) else {
                continue;
            };
            let expected = (hc / hf).powi(2);
            let ratio = (fine > 0.0).then(|| coarse / fine);
            let asserted = assertable && coarse > tol.ratio_floor;
            let band = (tol.ratio_low * expected / 4.0)..=(tol.ratio_high * expected / 4.0);
            out.push(ConvergenceEntry {
                point: point.index,
                suite: suite.into(),
                name: name.into(),
                h_coarse: hc,
                h_fine: hf,
                coarse: Some(coarse),
                fine: Some(fine),
                ratio,
                expected,
                asserted,
                pass: asserted.then(|| ratio.is_some_and(|r| band.contains(&r))),
            });
        }
    }
    out
}
