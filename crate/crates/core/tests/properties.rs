use std::f64::consts::PI;
use std::sync::Arc;

use nsh_core::functionals::{energy_e, fibration_classify, Classification, Moments};
use nsh_core::io::{format_field, parse_field, Repr};
use nsh_core::lattice::{lattice_same, ExactMatrix, ExactReal};
use nsh_core::spectral::norm_equivalence_constants;
use nsh_core::tiling::{reflect_extend, torus_shift};
use nsh_core::{Basis, DomainSpec, Params, SpectralField};
use proptest::prelude::*;

fn box_basis(l1: f64, l2: f64, n: usize) -> Arc<Basis> {
    Basis::new(DomainSpec::neumann_box(&[l1, l2], 1.0).unwrap(), n).unwrap()
}

fn hex_basis(n: usize) -> Arc<Basis> {
    let g = vec![vec![2.0 * PI, 0.0], vec![PI, PI * 3f64.sqrt()]];
    Basis::new(DomainSpec::skew_torus(&g, 1.0).unwrap(), n).unwrap()
}

fn field(basis: &Arc<Basis>, raw: &[f64]) -> SpectralField {
    let c = (0..basis.len()).map(|i| raw[i % raw.len()] / (1.0 + i as f64).sqrt()).collect();
    SpectralField::new(basis.clone(), c).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..40).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval_on_box_and_torus(raw in coeffs(), l1 in 1.0f64..10.0, l2 in 1.0f64..10.0) {
        for b in [box_basis(l1, l2, 6), hex_basis(4)] {
            let u = field(&b, &raw);
            prop_assert!(close(u.integral_power(2).unwrap(), u.l2_norm_sq(), 1e-12));
        }
    }

    #[test]
    fn quadratic_form_positive_and_equivalent(raw in coeffs(), alpha in -20.0f64..-0.01) {
        let p = Params::new(alpha, 3.0).unwrap();
        for b in [box_basis(2.0 * PI, 5.0, 6), hex_basis(4)] {
            let u = field(&b, &raw);
            let (c, cap) = norm_equivalence_constants(&b, &p);
            let (q, w) = (u.quadratic_form(&p), u.w22_norm_sq());
            prop_assert!(q > 0.0);
            prop_assert!(q >= c * w * (1.0 - 1e-12) && q <= cap * w * (1.0 + 1e-12));
        }
    }

    #[test]
    fn grid_round_trip(raw in coeffs()) {
        for b in [box_basis(3.0, 4.0, 7), hex_basis(5)] {
            let u = field(&b, &raw);
            let back = SpectralField::from_grid(b.clone(), &u.to_grid()).unwrap();
            for (x, y) in u.coeffs().iter().zip(back.coeffs()) {
                prop_assert!((x - y).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn integrals_scale_with_volume(raw in coeffs(), r in 1.0f64..5.0, m in 2u32..5) {
        let base = DomainSpec::neumann_box(&[2.0, 3.0], 1.0).unwrap();
        let small = Basis::new(base.clone(), 6).unwrap();
        let large = Basis::new(base.with_stretch(r).unwrap(), 6).unwrap();
        let u = field(&small, &raw);
        let v = SpectralField::from_fn(large, |x| {
            let y: Vec<f64> = x.iter().map(|t| t / r).collect();
            u.evaluate(&y)
        }).unwrap();
        let (a, b) = (u.integral_power(m).unwrap(), v.integral_power(m).unwrap());
        prop_assert!((b - r * r * a).abs() <= 1e-9 * (1.0 + b.abs()));
    }

    #[test]
    fn fibration_is_scale_invariant(raw in coeffs(), beta in 0.5f64..30.0, lambda in 0.1f64..10.0) {
        let p = Params::new(-0.5, beta).unwrap();
        let b = box_basis(2.0 * PI, 2.0 * PI, 5);
        let u = field(&b, &raw);
        let f = fibration_classify(&u, &p).unwrap();
        let g = fibration_classify(&u.scaled(lambda), &p).unwrap();
        let h = fibration_classify(&u.scaled(-1.0), &p).unwrap();
        prop_assert!(close(f.s, g.s, 1e-10));
        if (f.s - 1.0).abs() > 1e-6 {
            prop_assert_eq!(f.classification, g.classification);
            prop_assert_eq!(f.classification, h.classification);
        }
        if let (Classification::NonMonotonous, Some(t1), Some(s1)) = (f.classification, f.t1, g.t1) {
            prop_assert!(close(t1, lambda * s1, 1e-9));
        }
    }

    #[test]
    fn energy_along_rays_is_a_quartic(raw in coeffs(), t in -3.0f64..3.0, beta in 0.5f64..10.0) {
        let p = Params::new(-1.0, beta).unwrap();
        let b = box_basis(4.0, 5.0, 5);
        let u = field(&b, &raw);
        let m = Moments::of(&u, &p);
        let expected = 0.5 * t * t * m.q - beta * t.powi(3) * m.cubic / 3.0 + 0.25 * t.powi(4) * m.quartic;
        prop_assert!((energy_e(&u.scaled(t), &p) - expected).abs() <= 1e-11 * (1.0 + expected.abs()));
    }

    #[test]
    fn field_text_round_trip(raw in coeffs(), values in any::<bool>()) {
        let repr = if values { Repr::Values } else { Repr::Coeffs };
        for b in [box_basis(1.5, 2.5, 4), hex_basis(3)] {
            let u = field(&b, &raw);
            let back = parse_field(&format_field(&u, repr)).unwrap();
            prop_assert!(back.basis().same_as(u.basis()));
            let tol = if values { 1e-13 } else { 0.0 };
            for (x, y) in u.coeffs().iter().zip(back.coeffs()) {
                prop_assert!((x - y).abs() <= tol);
            }
        }
    }

    #[test]
    fn reflection_energy_is_additive(raw in coeffs(), c1 in 1usize..4, c2 in 1usize..4) {
        let p = Params::new(-0.5, 3.0).unwrap();
        let u = field(&box_basis(3.0, 2.0, 5), &raw);
        let t = reflect_extend(&u, &[c1, c2]).unwrap();
        let n = t.copies() as f64;
        prop_assert!(close(energy_e(&t.assembled, &p), n * energy_e(&u, &p), 1e-10));
    }

    #[test]
    fn torus_translation_preserves_energy(raw in coeffs(), sx in -10.0f64..10.0, sy in -10.0f64..10.0) {
        let p = Params::new(-0.5, 3.0).unwrap();
        let b = hex_basis(4);
        let u = field(&b, &raw);
        let v = torus_shift(&u, &[sx, sy]).unwrap();
        prop_assert!(close(energy_e(&u, &p), energy_e(&v, &p), 1e-10));
        prop_assert!(close(u.quadratic_form(&p), v.quadratic_form(&p), 1e-12));
    }

    #[test]
    fn exact_matrix_display_round_trip(
        nums in prop::collection::vec(-50i64..50, 4),
        dens in prop::collection::vec(1i64..20, 4),
        roots in prop::collection::vec(prop::sample::select(vec![1u64, 2, 3, 5, 12]), 4),
    ) {
        let entry = |i: usize| ExactReal::fraction(nums[i], dens[i]).unwrap().mul(&ExactReal::sqrt(roots[i]).unwrap()).unwrap();
        let m = ExactMatrix::from_rows(vec![vec![entry(0), entry(1)], vec![entry(2), entry(3)]]).unwrap();
        let back = ExactMatrix::parse(&m.to_string()).unwrap();
        prop_assert_eq!(&back, &m);
        if m.is_rational() {
            if let Ok(same) = lattice_same(&m) {
                let det = m.det().unwrap();
                prop_assert_eq!(same, m.is_integer() && (det == ExactReal::one() || det == ExactReal::integer(-1)));
            }
        }
    }
}
