use num_complex::Complex64;
use proptest::prelude::*;

use weylscope::examples;
use weylscope::linalg::{c64, eigvals};
use weylscope::pencil::{support_function, Localisation};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinant_polynomial_is_homogeneous(
        seed in 0u64..1000,
        z in prop::collection::vec(-2.0f64..2.0, 3),
        t in 0.2f64..3.0,
    ) {
        let a = examples::random_hermitian_tuple(2, 3, seed);
        let zc: Vec<Complex64> = z.iter().map(|v| c64(*v, 0.0)).collect();
        let zt: Vec<Complex64> = z.iter().map(|v| c64(t * v, 0.0)).collect();
        let p = a.det_poly(&zc).unwrap();
        let pt = a.det_poly(&zt).unwrap();
        prop_assert!((pt - p * t.powi(3)).norm() <= 1e-10 * pt.norm().max(1e-3));
    }

    #[test]
    fn localisation_is_homogeneous(z in prop::collection::vec(-2.0f64..2.0, 3), t in 0.2f64..3.0) {
        let loc = Localisation::new(&examples::example63(), &[1.0, 1.0, 0.0]).unwrap();
        let mu = loc.multiplicity() as i32;
        let zt: Vec<f64> = z.iter().map(|v| t * v).collect();
        let p = loc.eval(&z).unwrap();
        let pt = loc.eval(&zt).unwrap();
        prop_assert!((pt - p * t.powi(mu)).norm() <= 1e-8 * (1.0 + pt.norm()));
    }

    #[test]
    fn hermitian_pencils_have_real_spectrum(seed in 0u64..1000, s in prop::collection::vec(-1.0f64..1.0, 3)) {
        let a = examples::random_hermitian_tuple(3, 4, seed);
        let m = a.pencil(&s).unwrap();
        prop_assert!(eigvals(&m).iter().all(|z| z.im.abs() < 1e-12 * (1.0 + z.norm())));
    }

    #[test]
    fn support_function_is_subadditive(
        seed in 0u64..1000,
        s1 in prop::collection::vec(-1.0f64..1.0, 2),
        s2 in prop::collection::vec(-1.0f64..1.0, 2),
    ) {
        let a = examples::random_hermitian_tuple(2, 3, seed);
        let sum: Vec<f64> = s1.iter().zip(&s2).map(|(x, y)| x + y).collect();
        let h = |s: &[f64]| support_function(&a, s).unwrap();
        prop_assert!(h(&sum) <= h(&s1) + h(&s2) + 1e-12);
    }
}
