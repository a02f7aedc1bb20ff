use cacms_lab::connection::FdConfig;
use cacms_lab::normality::s_tensor;
use cacms_lab::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn vector(dim: usize) -> impl Strategy<Value = AmbientVector> {
    prop::collection::vec(-10.0f64..10.0, dim).prop_map(AmbientVector::from_vec)
}

fn quadric() -> Hypersurface {
    let q = QuaternionicStructure::new(2).unwrap();
    Hypersurface::new(q, HoloPolynomial::sphere(4, Complex64::new(1.0, 0.0)).unwrap()).unwrap()
}

// Seeds well away from the origin, where the quadric's gradient vanishes.
fn quadric_point() -> impl Strategy<Value = SurfacePoint> {
    prop::collection::vec(-1.0f64..1.0, 8)
        .prop_filter("away from the singular cone", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.25)
        .prop_map(|v| quadric().project(&AmbientVector::from_vec(v), 1e-12, 50).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn j_is_an_isometry(m in 1usize..4, seed in vector(12), other in vector(12), a in 1usize..4) {
        let q = QuaternionicStructure::new(m).unwrap();
        let n = q.real_dim();
        let x = AmbientVector::from_iterator(n, seed.iter().cloned().take(n));
        let y = AmbientVector::from_iterator(n, other.iter().cloned().take(n));
        let (jx, jy) = (q.apply(a, &x).unwrap(), q.apply(a, &y).unwrap());
        let bound = 4.0 * f64::EPSILON * x.norm() * y.norm();
        prop_assert!((jx.dot(&jy) - x.dot(&y)).abs() <= bound);
        prop_assert!(jx.dot(&x).abs() <= bound.max(4.0 * f64::EPSILON * x.norm_squared()));
    }

    #[test]
    fn complex_round_trip_and_j1_is_i(x in vector(8)) {
        let q = QuaternionicStructure::new(2).unwrap();
        let z = q.complex_coords(&x).unwrap();
        prop_assert_eq!(q.real_coords(&z).unwrap(), x.clone());
        let iz: Vec<_> = z.iter().map(|c| c * Complex64::i()).collect();
        prop_assert_eq!(q.real_coords(&iz).unwrap(), q.j1() * &x);
    }

    #[test]
    fn wirtinger_matches_differences(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 10),
        z in prop::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 2),
    ) {
        let exps = [[1, 0], [0, 1], [2, 0], [1, 1], [0, 2], [3, 0], [2, 1], [1, 2], [0, 3], [1, 0]];
        let terms = exps.iter().zip(&coeffs).map(|(e, &(re, im))| (e.to_vec(), Complex64::new(re, im)));
        let f = match HoloPolynomial::new(2, terms) {
            Ok(f) => f,
            Err(_) => return Ok(()),
        };
        let z: Vec<_> = z.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let grad = f.wirtinger_gradient(&z).unwrap();
        let h = 1e-5;
        for j in 0..2 {
            let at = |d: Complex64| {
                let mut w = z.clone();
                w[j] += d;
                f.eval(&w).unwrap()
            };
            let dx = (at(Complex64::new(h, 0.0)) - at(Complex64::new(-h, 0.0))) / (2.0 * h);
            let dy = (at(Complex64::new(0.0, h)) - at(Complex64::new(0.0, -h))) / (2.0 * h);
            prop_assert!((grad[j] - dx).norm() <= 1e-8);
            prop_assert!((grad[j] + Complex64::i() * dy).norm() <= 1e-8);
        }
    }

    #[test]
    fn projection_is_idempotent(sp in quadric_point()) {
        let surf = quadric();
        prop_assert!(sp.f_residual <= 1e-12);
        let again = surf.project(&sp.p, 1e-12, 50).unwrap();
        prop_assert!((&again.p - &sp.p).norm() <= 1e-12);
        prop_assert!((&sp.projector * &sp.projector - &sp.projector).amax() <= 1e-14);
    }

    #[test]
    fn induced_invariants_hold(sp in quadric_point(), seed in any::<u64>()) {
        let surf = quadric();
        let s = InducedStructure::new(surf.structure(), &sp);
        let r = s.residuals(20, seed);
        prop_assert!(r.max() <= 1e-10, "{:?}", r.iter().find(|x| x.value > 1e-10));
    }

    #[test]
    fn gauge_rotations_compose(sp in quadric_point(), t1 in 0.0f64..6.3, t2 in 0.0f64..6.3) {
        let surf = quadric();
        let s = InducedStructure::new(surf.structure(), &sp);
        let twice = s.gauge_rotate(t1.cos(), t1.sin()).unwrap().gauge_rotate(t2.cos(), t2.sin()).unwrap();
        let once = s.gauge_rotate((t1 + t2).cos(), (t1 + t2).sin()).unwrap();
        prop_assert!(twice.max_difference(&once) <= 1e-12);
        prop_assert!(twice.residuals(5, 0).max() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn s_is_bilinear(sp in quadric_point(), x in vector(8), y in vector(8), c in -2.0f64..2.0) {
        let surf = quadric();
        let cfg = FdConfig::default();
        let (x, y) = (sp.tangential(&x), sp.tangential(&y));
        prop_assume!(x.norm() > 0.1 && y.norm() > 0.1);
        let (x, y) = (x.normalize(), y.normalize());
        let base = s_tensor(&surf, &sp, &x, &y, &cfg).unwrap().value;
        let scaled = s_tensor(&surf, &sp, &(&x * c), &y, &cfg).unwrap().value;
        // scaling X rescales the curve step, so agreement is at the FD truncation level
        prop_assert!((scaled - &base * c).norm() <= 1e-4 * (1.0 + c.abs()));
    }
}
