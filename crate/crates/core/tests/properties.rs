use orbitsym::iwasawa::iwasawa;
use orbitsym::lie_model::{
    adjoint, bracket, chamber_element, ChamberElement, MatrixLieModel, Sampler, SpecialLinear,
};
use orbitsym::numerics::{mat_exp, qr_positive, Matrix};
use orbitsym::orbit::{from_cotangent, orbit_point, to_cotangent, TangentVector};
use orbitsym::symplectic::kks;
use proptest::prelude::*;

fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Weakly decreasing integer entries with zero sum, built from a list of gaps.
fn chamber_from_gaps(gaps: &[u8]) -> ChamberElement {
    let n = gaps.len() + 1;
    let mut steps = vec![0i64; n];
    for i in 1..n {
        steps[i] = steps[i - 1] - i64::from(gaps[i - 1]);
    }
    let total: i64 = steps.iter().sum();
    let entries: Vec<f64> = steps
        .iter()
        .map(|&v| (n as i64 * v - total) as f64)
        .collect();
    chamber_element(&entries).unwrap()
}

/// ad X on gl(n) in the basis of matrix units.
fn ad_matrix(x: &Matrix) -> Matrix {
    let n = x.nrows();
    let mut out = Matrix::zeros(n * n, n * n);
    for c in 0..n * n {
        let mut e = Matrix::zeros(n, n);
        e[(c % n, c / n)] = 1.0;
        out.column_mut(c).copy_from_slice(bracket(x, &e).as_slice());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn qr_has_positive_diagonal_and_reconstructs(n in 2usize..=6, seed: u64) {
        let g = Sampler::new(n, seed).group(0.7);
        let (q, r) = qr_positive(&g).unwrap();
        prop_assert!(max_abs(&(q.transpose() * &q - Matrix::identity(n, n))) < 1e-13);
        prop_assert!(max_abs(&(&q * &r - &g)) < 1e-12 * g.norm());
        for i in 0..n {
            prop_assert!(r[(i, i)] > 0.0);
            for j in 0..i {
                prop_assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn exponential_inverts_and_is_unimodular(n in 2usize..=6, seed: u64, scale in 0.0f64..2.0) {
        let x = Sampler::new(n, seed).algebra(scale);
        let product = mat_exp(&x) * mat_exp(&-&x);
        prop_assert!(max_abs(&(product - Matrix::identity(n, n))) < 1e-11);
        prop_assert!((mat_exp(&x).determinant() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kan_split_is_a_projection(n in 2usize..=6, seed: u64) {
        let model = SpecialLinear::new(n).unwrap();
        let x = Sampler::new(n, seed).algebra(1.5);
        let split = model.decompose_kan(&x);
        prop_assert!(max_abs(&(split.sum() - &x)) < 1e-14);
        prop_assert!(max_abs(&(&split.k + split.k.transpose())) == 0.0);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    prop_assert_eq!(split.a[(i, j)], 0.0);
                }
                if i >= j {
                    prop_assert_eq!(split.n[(i, j)], 0.0);
                }
            }
        }
        let again = model.decompose_kan(&split.k);
        prop_assert!(max_abs(&(again.k - &split.k)) < 1e-15);
        prop_assert!(max_abs(&again.n) < 1e-15);
    }

    #[test]
    fn killing_form_matches_the_trace_of_ad(n in 2usize..=4, seed: u64) {
        let model = SpecialLinear::new(n).unwrap();
        let mut s = Sampler::new(n, seed);
        let (x, y) = (s.algebra(1.0), s.algebra(1.0));
        let oracle = (ad_matrix(&x) * ad_matrix(&y)).trace();
        prop_assert!((model.killing(&x, &y) - oracle).abs() < 1e-11 * (1.0 + oracle.abs()));
    }

    #[test]
    fn cartan_involution_gives_a_positive_form(n in 2usize..=6, seed: u64) {
        let model = SpecialLinear::new(n).unwrap();
        let x = Sampler::new(n, seed).algebra(1.0);
        let theta = model.cartan_involution(&x);
        prop_assert!(max_abs(&(model.cartan_involution(&theta) - &x)) == 0.0);
        prop_assert!(-model.killing(&x, &theta) > 0.0);
        // θ is an automorphism
        let y = Sampler::new(n, seed ^ 0x5555).algebra(1.0);
        let lhs = model.cartan_involution(&bracket(&x, &y));
        let rhs = bracket(&theta, &model.cartan_involution(&y));
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-13);
    }

    #[test]
    fn iwasawa_is_left_k_equivariant(n in 2usize..=5, seed: u64) {
        let mut s = Sampler::new(n, seed);
        let g = s.group(0.5);
        let k = s.rotation();
        let f = iwasawa(&g).unwrap();
        let fk = iwasawa(&(&k * &g)).unwrap();
        prop_assert!(max_abs(&(&fk.k_factor - &k * &f.k_factor)) < 1e-11);
        prop_assert!(max_abs(&(&fk.a_factor - &f.a_factor)) < 1e-11 * max_abs(&f.a_factor));
        prop_assert!(max_abs(&(&fk.n_factor - &f.n_factor)) < 1e-11 * max_abs(&f.n_factor));
    }

    #[test]
    fn compact_centralizer_fixes_h(gaps in proptest::collection::vec(0u8..3, 1..5), seed: u64) {
        let chamber = chamber_from_gaps(&gaps);
        let n = chamber.n();
        let z = mat_exp(&Sampler::new(n, seed).in_span(chamber.z_k_of_h(), std::f64::consts::PI));
        let moved = adjoint(&z, chamber.h()).unwrap();
        prop_assert!(max_abs(&(moved - chamber.h())) < 1e-12 * (1.0 + max_abs(chamber.h())));
    }

    #[test]
    fn orbit_points_are_isospectral(gaps in proptest::collection::vec(0u8..3, 1..5), seed: u64) {
        let chamber = chamber_from_gaps(&gaps);
        let g = Sampler::new(chamber.n(), seed).group(0.5);
        let x = orbit_point(&g, &chamber).unwrap();
        let scale = x.point().norm().max(1.0).powi(chamber.n() as i32);
        prop_assert!(x.spectral_defect() < 1e-10 * scale);
    }

    #[test]
    fn identification_round_trip(gaps in proptest::collection::vec(0u8..3, 1..5), seed: u64) {
        let chamber = chamber_from_gaps(&gaps);
        let g = Sampler::new(chamber.n(), seed).group(0.5);
        let x = orbit_point(&g, &chamber).unwrap();
        let back = from_cotangent(&to_cotangent(&x).unwrap()).unwrap();
        prop_assert!(max_abs(&(back.point() - x.point())) < 1e-9 * x.point().norm().max(1.0));
    }

    #[test]
    fn kks_ignores_centralizer_shifts(gaps in proptest::collection::vec(0u8..3, 1..4), seed: u64) {
        let chamber = chamber_from_gaps(&gaps);
        let n = chamber.n();
        let mut s = Sampler::new(n, seed);
        let g = s.group(0.4);
        let x = orbit_point(&g, &chamber).unwrap();
        let (zv, zw) = (s.algebra(1.0), s.algebra(1.0));
        let shift = adjoint(&g, &s.in_span(chamber.z_of_h(), 1.0)).unwrap();
        let base = kks(&x, &x.tangent(&zv), &x.tangent(&zw)).unwrap();
        let shifted = kks(&x, &x.tangent(&(&zv + &shift)), &x.tangent(&zw)).unwrap();
        let scale = x.point().norm() * zv.norm() * zw.norm() * (1.0 + shift.norm());
        prop_assert!((base - shifted).abs() < 1e-10 * scale.max(1.0));
        // a bare tangent vector recovers the same value through its solved generator
        let bare = kks(&x, &TangentVector::bare(x.tangent(&zv).value), &x.tangent(&zw)).unwrap();
        prop_assert!((base - bare).abs() < 1e-9 * scale.max(1.0));
    }

    #[test]
    fn kks_is_ad_invariant(gaps in proptest::collection::vec(0u8..3, 1..4), seed: u64) {
        let chamber = chamber_from_gaps(&gaps);
        let n = chamber.n();
        let mut s = Sampler::new(n, seed);
        let g = s.group(0.4);
        let h = s.group(0.4);
        let x = orbit_point(&g, &chamber).unwrap();
        let y = orbit_point(&(&h * &g), &chamber).unwrap();
        let (zv, zw) = (s.algebra(1.0), s.algebra(1.0));
        let at_x = kks(&x, &x.tangent(&zv), &x.tangent(&zw)).unwrap();
        let pushed_v = adjoint(&h, &zv).unwrap();
        let pushed_w = adjoint(&h, &zw).unwrap();
        let at_y = kks(&y, &y.tangent(&pushed_v), &y.tangent(&pushed_w)).unwrap();
        let scale = x.point().norm() * zv.norm() * zw.norm();
        prop_assert!((at_x - at_y).abs() < 1e-10 * scale.max(1.0) * h.norm().powi(2));
    }
}
