//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p cacms-lab --test acceptance`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use cacms_lab::connection::{
    affine_extension, nabla_g, nabla_tensor_with, normal_form_check, skew_residual,
    covariant_residual, FdConfig, StructureTensor,
};
use cacms_lab::normality::{normality_tensor, s_tensor, t_tensor, NormalityTensor};
use cacms_lab::residual::random_tangent;
use cacms_lab::suites::extension_perturbation;
use cacms_lab::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HYPERPLANE_SCENE: &str = include_str!("../../../scenes/hyperplane.scene");
const QUADRIC_SCENE: &str = include_str!("../../../scenes/quadric.scene");

// Pinned thresholds.
const HYPERPLANE_ALGEBRAIC: f64 = 1e-10;
const QUADRIC_ALGEBRAIC: f64 = 1e-9;
const GAUGE_ALGEBRAIC: f64 = 1e-10;
const COMPOSITION: f64 = 1e-12;
const FRAME_GRAM: f64 = 1e-10;
const FIRST_DERIVATIVE: f64 = 1e-5;
const FLAT_DERIVATIVE: f64 = 1e-10;
const RATIO_BAND: (f64, f64) = (3.5, 4.5);
const RATIO_FLOOR: f64 = 1e-8;
const NORMALITY_TANGENCY: f64 = 1e-4;
const EXTENSION: f64 = 1e-6;
const WIRTINGER_FD: f64 = 1e-8;
const MIN_POINTS: usize = 5;
const VECTOR_TRIALS: usize = 20;

// S(X, Y), T(X, Y) on the quadric at the first seed, X and Y drawn from
// ChaCha8(2024), h = 1e-3. Frozen from the first verified run.
const PINNED_S_NORM: f64 = 1.573208416535;
const PINNED_T_NORM: f64 = 1.261607824866;
const PIN_REL_TOL: f64 = 1e-6;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

struct Fixture {
    surf: Hypersurface,
    points: Vec<SurfacePoint>,
}

fn fixture(text: &str) -> Fixture {
    let scene = parse_scene(text).expect("scene parses");
    let surf = scene.hypersurface().expect("valid hypersurface");
    let points = scene
        .seeds
        .iter()
        .map(|s| surf.project(s, scene.newton_tol, scene.max_iter).expect("seed projects"))
        .collect();
    Fixture { surf, points }
}

fn tangents(rng: &mut ChaCha8Rng, sp: &SurfacePoint, n: usize) -> Vec<AmbientVector> {
    (0..n).map(|_| random_tangent(rng, &sp.projector)).collect()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Outcome {
    for m in 1..=3 {
        let q = QuaternionicStructure::new(m).map_err(|e| e.to_string())?;
        let id = DMatrix::<i32>::identity(4 * m, 4 * m);
        let [j1, j2, j3] = [1, 2, 3].map(|a| q.integer_matrix(a).unwrap().clone());
        let relations = [
            (&j1 * &j1, -&id),
            (&j2 * &j2, -&id),
            (&j3 * &j3, -&id),
            (&j1 * &j2 * &j3, -&id),
            (&j1 * &j2, j3.clone()),
            (&j2 * &j3, j1.clone()),
            (&j3 * &j1, j2.clone()),
        ];
        if relations.iter().any(|(l, r)| l != r) {
            return Err(format!("quaternion relation fails for m = {m}"));
        }
        for j in [&j1, &j2, &j3] {
            if j.transpose() != -j || j.transpose() * j != id {
                return Err(format!("J not skew-orthogonal for m = {m}"));
            }
        }
    }
    Ok("exact integer relations for m = 1, 2, 3".into())
}

fn criterion_2() -> Outcome {
    let mut detail = Vec::new();
    for (label, text, tol) in [
        ("hyperplane", HYPERPLANE_SCENE, HYPERPLANE_ALGEBRAIC),
        ("quadric", QUADRIC_SCENE, QUADRIC_ALGEBRAIC),
    ] {
        let fx = fixture(text);
        if fx.points.len() < MIN_POINTS {
            return Err(format!("{label}: only {} points", fx.points.len()));
        }
        let mut worst = 0.0f64;
        for (i, sp) in fx.points.iter().enumerate() {
            let s = InducedStructure::new(fx.surf.structure(), sp);
            let r = s.residuals(VECTOR_TRIALS, 100 + i as u64);
            worst = worst.max(r.max());
        }
        if !(worst <= tol) {
            return Err(format!("{label}: max residual {worst:e} > {tol:e}"));
        }
        detail.push(format!("{label} {worst:.1e}"));
    }
    Ok(detail.join(", "))
}

fn criterion_3() -> Outcome {
    let coarse = FdConfig::with_step(1e-3).unwrap();
    let fine = FdConfig::with_step(5e-4).unwrap();
    let fx = fixture(QUADRIC_SCENE);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst, mut ratios) = (0.0f64, Vec::new());
    for sp in &fx.points {
        for _ in 0..4 {
            let v = tangents(&mut rng, sp, 2);
            let c = covariant_residual(&fx.surf, sp, &v[0], &v[1], &coarse).map_err(|e| e.to_string())?;
            let f = covariant_residual(&fx.surf, sp, &v[0], &v[1], &fine).map_err(|e| e.to_string())?;
            for (rc, rf) in [(c.res_g, f.res_g), (c.res_h, f.res_h)] {
                worst = worst.max(rc);
                if rc > RATIO_FLOOR {
                    ratios.push(rc / rf);
                }
            }
        }
    }
    if !(worst <= FIRST_DERIVATIVE) {
        return Err(format!("quadric residual {worst:e} > {FIRST_DERIVATIVE:e}"));
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    if ratios.iter().any(|r| !(RATIO_BAND.0..=RATIO_BAND.1).contains(r)) {
        return Err(format!("Richardson ratio outside band: [{lo}, {hi}]"));
    }
    let flat = fixture(HYPERPLANE_SCENE);
    let mut flat_worst = 0.0f64;
    for sp in &flat.points {
        let v = tangents(&mut rng, sp, 2);
        let r = covariant_residual(&flat.surf, sp, &v[0], &v[1], &coarse).map_err(|e| e.to_string())?;
        flat_worst = flat_worst.max(r.res_g).max(r.res_h);
    }
    check(
        flat_worst <= FLAT_DERIVATIVE,
        format!(
            "quadric max {worst:.2e}, {} ratios in [{lo:.4}, {hi:.4}]; hyperplane {flat_worst:.1e}",
            ratios.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let cfg = FdConfig::with_step(1e-3).unwrap();
    let fx = fixture(QUADRIC_SCENE);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for sp in &fx.points {
        for x in tangents(&mut rng, sp, 4) {
            let c = normal_form_check(&fx.surf, sp, &x, &cfg).map_err(|e| e.to_string())?;
            a = a.max((c.s + c.sigma).abs());
            b = b.max((c.s - c.nabla_v_u).abs());
        }
    }
    check(
        a <= FIRST_DERIVATIVE && b <= FIRST_DERIVATIVE,
        format!("|s + sigma| {a:.1e}, |s - g(nabla V, U)| {b:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let cfg = FdConfig::with_step(1e-3).unwrap();
    let fx = fixture(QUADRIC_SCENE);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut rg, mut rh) = (0.0f64, 0.0f64);
    for sp in &fx.points {
        for _ in 0..VECTOR_TRIALS {
            let t = tangents(&mut rng, sp, 3);
            let (g, h) = skew_residual(&fx.surf, sp, &t[0], &[(t[1].clone(), t[2].clone())], &cfg)
                .map_err(|e| e.to_string())?;
            rg = rg.max(g);
            rh = rh.max(h);
        }
    }
    check(
        rg <= FIRST_DERIVATIVE && rh <= FIRST_DERIVATIVE,
        format!("G {rg:.1e}, H {rh:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let (mut worst, mut comp) = (0.0f64, 0.0f64);
    for text in [HYPERPLANE_SCENE, QUADRIC_SCENE] {
        let fx = fixture(text);
        for (i, sp) in fx.points.iter().enumerate() {
            let s = InducedStructure::new(fx.surf.structure(), sp);
            for (a, b) in [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8)] {
                let r = s.gauge_rotate(a, b).map_err(|e| e.to_string())?;
                worst = worst.max(r.residuals(VECTOR_TRIALS, i as u64).max());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(60 + i as u64);
            for _ in 0..5 {
                let (t1, t2): (f64, f64) = (rng.random_range(0.0..6.3), rng.random_range(0.0..6.3));
                let (a1, b1, a2, b2) = (t1.cos(), t1.sin(), t2.cos(), t2.sin());
                let twice = s.gauge_rotate(a1, b1).unwrap().gauge_rotate(a2, b2).unwrap();
                let once = s.gauge_rotate(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1).unwrap();
                comp = comp.max(twice.max_difference(&once));
            }
        }
    }
    check(
        worst <= GAUGE_ALGEBRAIC && comp <= COMPOSITION,
        format!("axioms after rotation {worst:.1e}, composition {comp:.1e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for text in [HYPERPLANE_SCENE, QUADRIC_SCENE] {
        let fx = fixture(text);
        for (i, sp) in fx.points.iter().enumerate() {
            let s = InducedStructure::new(fx.surf.structure(), sp);
            let frame = s.adapted_frame(70 + i as u64).map_err(|e| e.to_string())?;
            if frame.vectors.len() != 6 {
                return Err(format!("frame has {} vectors", frame.vectors.len()));
            }
            worst = worst.max(frame.gram_residual());
        }
    }
    check(worst <= FRAME_GRAM, format!("Gram - I {worst:.1e} on 6-vector frames"))
}

fn criterion_8() -> Outcome {
    let cfg = FdConfig::with_step(1e-3).unwrap();
    let fx = fixture(QUADRIC_SCENE);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut leak, mut anti) = (0.0f64, 0.0f64);
    for sp in &fx.points {
        let v = tangents(&mut rng, sp, 2);
        for which in [NormalityTensor::S, NormalityTensor::T] {
            let xy = normality_tensor(&fx.surf, sp, which, &v[0], &v[1], &cfg).map_err(|e| e.to_string())?;
            let yx = normality_tensor(&fx.surf, sp, which, &v[1], &v[0], &cfg).map_err(|e| e.to_string())?;
            if !xy.value.iter().all(|x| x.is_finite()) {
                return Err("non-finite tensor value".into());
            }
            leak = leak.max(xy.normal_leak(sp));
            anti = anti.max((&xy.value + &yx.value - (&xy.remainder + &yx.remainder)).norm());
            anti = anti.max((&xy.torsion + &yx.torsion).norm());
        }
    }
    if !(leak <= NORMALITY_TANGENCY && anti <= NORMALITY_TANGENCY) {
        return Err(format!("tangency {leak:e}, antisymmetry {anti:e}"));
    }
    let sp = &fx.points[0];
    let mut pin_rng = ChaCha8Rng::seed_from_u64(2024);
    let v = tangents(&mut pin_rng, sp, 2);
    let s_norm = s_tensor(&fx.surf, sp, &v[0], &v[1], &cfg).unwrap().value.norm();
    let t_norm = t_tensor(&fx.surf, sp, &v[0], &v[1], &cfg).unwrap().value.norm();
    let pinned = |value: f64, pin: f64| ((value - pin) / pin).abs() <= PIN_REL_TOL;

    // Flat case: X horizontal, Y = GX gives S = -2U and T = 2U exactly.
    let flat = fixture(HYPERPLANE_SCENE);
    let mut flat_err = 0.0f64;
    for sp in &flat.points {
        let s = InducedStructure::new(flat.surf.structure(), sp);
        let x = tangents(&mut rng, sp, 1).remove(0);
        let x = (&x - &s.u * s.u_of(&x) - &s.v * s.v_of(&x)).normalize();
        let gx = &s.g * &x;
        let st = s_tensor(&flat.surf, sp, &x, &gx, &cfg).map_err(|e| e.to_string())?;
        let tt = t_tensor(&flat.surf, sp, &x, &gx, &cfg).map_err(|e| e.to_string())?;
        flat_err = flat_err.max((st.value + &s.u * 2.0).norm()).max((tt.value - &s.u * 2.0).norm());
    }
    check(
        pinned(s_norm, PINNED_S_NORM) && pinned(t_norm, PINNED_T_NORM) && flat_err <= HYPERPLANE_ALGEBRAIC,
        format!(
            "tangency {leak:.1e}, antisymmetry {anti:.1e}, |S| = {s_norm:.12}, |T| = {t_norm:.12}, flat pins {flat_err:.1e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let cfg = FdConfig::with_step(1e-3).unwrap();
    let fx = fixture(QUADRIC_SCENE);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let b = extension_perturbation(8);
    let mut ext = 0.0f64;
    for sp in &fx.points {
        let v = tangents(&mut rng, sp, 2);
        let plain = nabla_g(&fx.surf, sp, &v[0], &v[1], &cfg).map_err(|e| e.to_string())?;
        let other = affine_extension(v[1].clone(), b.clone(), sp.p.clone());
        let alt = nabla_tensor_with(&fx.surf, sp, &v[0], &other, StructureTensor::G, &cfg).map_err(|e| e.to_string())?;
        ext = ext.max((plain - alt).norm());
    }

    // Wirtinger gradient against central differences of `eval`. For a
    // holomorphic f, df/dz = df/dx = -i df/dy.
    let step = 1e-5;
    let mut grad_err = 0.0f64;
    for trial in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + trial);
        let n = 4;
        let mut terms = Vec::new();
        for _ in 0..12 {
            let e: Vec<u32> = (0..n).map(|_| rng.random_range(0..=3)).collect();
            if e.iter().sum::<u32>() <= 3 {
                terms.push((e, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
            }
        }
        terms.push((vec![3, 0, 0, 0], Complex64::new(1.0, 0.5)));
        let f = HoloPolynomial::new(n, terms).unwrap();
        let mut z: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1.0 {
            z.iter_mut().for_each(|c| *c /= norm);
        }
        let grad = f.wirtinger_gradient(&z).unwrap();
        for j in 0..n {
            let shifted = |d: Complex64| {
                let mut w = z.clone();
                w[j] += d;
                f.eval(&w).unwrap()
            };
            let dx = (shifted(Complex64::new(step, 0.0)) - shifted(Complex64::new(-step, 0.0))) / (2.0 * step);
            let dy = (shifted(Complex64::new(0.0, step)) - shifted(Complex64::new(0.0, -step))) / (2.0 * step);
            grad_err = grad_err.max((grad[j] - dx).norm()).max((grad[j] + Complex64::i() * dy).norm());
        }
    }
    check(
        ext <= EXTENSION && grad_err <= WIRTINGER_FD,
        format!("extensions {ext:.1e}, Wirtinger vs FD {grad_err:.1e}"),
    )
}

fn criterion_10() -> Outcome {
    let scene = parse_scene(QUADRIC_SCENE).unwrap();
    let a = emit(&run(&scene).unwrap(), Format::Json);
    let b = emit(&run(&scene).unwrap(), Format::Json);
    check(a == b, format!("{} bytes, identical = {}", a.len(), a == b))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1 quaternion kernel", criterion_1),
        ("AC2 structure axioms", criterion_2),
        ("AC3 covariant derivatives of G, H", criterion_3),
        ("AC4 normal connection form", criterion_4),
        ("AC5 skew-symmetry of nabla G, nabla H", criterion_5),
        ("AC6 gauge coherence", criterion_6),
        ("AC7 adapted frame", criterion_7),
        ("AC8 normality diagnostics", criterion_8),
        ("AC9 oracle / extension independence", criterion_9),
        ("AC10 determinism", criterion_10),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
