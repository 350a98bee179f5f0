use std::f64::consts::PI;

use super::*;
use crate::spaces::{closed_form_profile, make_space, SpaceSpec};

fn space(alias: &str) -> ChartMetric {
    make_space(&SpaceSpec::from_alias(alias).unwrap()).unwrap()
}

fn quick() -> TubeQuadrature {
    TubeQuadrature {
        t_order: 4,
        angular_level: 4,
        ..Default::default()
    }
}

/// `J₁(x)` by its power series.
fn bessel_j1(x: f64) -> f64 {
    let mut term = x / 2.0;
    let mut sum = term;
    for k in 1..30 {
        term *= -(x * x / 4.0) / (k as f64 * (k + 1) as f64);
        sum += term;
    }
    sum
}

#[test]
fn euclidean_jacobian_and_shape() {
    let m = space("r3");
    let fc = FramedCurve::geodesic(&m, &[0.0; 3], &[0.0, 0.0, 1.0], 1.0).unwrap();
    let j = tube_jacobian(&m, &fc, 0.5, &[0.6, 0.8], 0.3).unwrap();
    assert!((j.factor - 0.3).abs() < 1e-12);
    let mut eig: Vec<f64> = j.shape.complex_eigenvalues().iter().map(|c| c.re).collect();
    eig.sort_by(f64::total_cmp);
    assert!(
        (eig[0] + 1.0 / 0.3).abs() < 1e-9 && eig[1].abs() < 1e-9,
        "{eig:?}"
    );
    assert!((m.norm(&j.position, &j.normal).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn hyperbolic_axis_jacobian() {
    let m = space("h3");
    let fc = FramedCurve::geodesic(&m, &[0.0, 0.0, 1.0], &[0.0, 0.0, 1.0], 1.0).unwrap();
    for rho in [0.2, 0.7] {
        let j = tube_jacobian(&m, &fc, 0.3, &[1.0, 1.0], rho).unwrap();
        assert!((j.factor - rho.sinh() * rho.cosh()).abs() < 1e-9);
    }
}

#[test]
fn euclidean_cylinder_invariants() {
    let m = space("r3");
    let fc = FramedCurve::geodesic(&m, &[0.1, 0.0, 0.0], &[1.0, 1.0, 0.0], 2.0).unwrap();
    let r = 0.3;
    let inv = tube_invariants(&m, &fc, r, &quick()).unwrap();
    assert!((inv.volume - PI * r * r * 2.0).abs() < 1e-9);
    assert!((inv.volume - 0.565487).abs() < 1e-6);
    assert!((inv.area - 2.0 * PI * r * 2.0).abs() < 1e-9);
    assert!((inv.total_mean_curvature + 2.0 * PI).abs() < 1e-9);
    assert!(inv.total_scalar_curvature.abs() < 1e-9);
    assert!(inv.errors.volume < 1e-8);
}

#[test]
fn flat_five_space_scalar_curvature() {
    // 𝕊³_r × ℝ has τ^P = 6/r² and area 2π²r³l.
    let m = space("r5");
    let fc = FramedCurve::geodesic(&m, &[0.0; 5], &[1.0, 0.0, 0.0, 0.0, 0.0], 1.5).unwrap();
    let r = 0.4;
    let q = TubeQuadrature {
        t_order: 2,
        angular_level: 2,
        ..Default::default()
    };
    let inv = tube_invariants(&m, &fc, r, &q).unwrap();
    assert!(
        (inv.total_scalar_curvature - 12.0 * PI * PI * r * 1.5).abs()
            < 1e-8 * inv.total_scalar_curvature
    );
    let lead = scalar_curvature_expansion(5, r, 1.5, 0.0, 0.0);
    assert!((lead - inv.total_scalar_curvature).abs() < 1e-8 * lead);
}

#[test]
fn hyperbolic_tube_matches_rotational_volume() {
    let m = space("h3");
    let fc = FramedCurve::geodesic(&m, &[0.3, 0.0, 1.2], &[1.0, -0.4, 0.6], 1.0).unwrap();
    let inv = tube_invariants(&m, &fc, 0.5, &quick()).unwrap();
    let v = PI * 0.5f64.sinh().powi(2);
    assert!((inv.volume - v).abs() < 1e-8, "{} {v}", inv.volume);
    assert!((inv.area - PI * 1f64.sinh()).abs() < 1e-8);
    assert!((inv.total_mean_curvature + PI * 1f64.cosh()).abs() < 1e-8);
    assert!(inv.total_scalar_curvature.abs() < 1e-7);
}

#[test]
fn closed_forms_match_direct_integrals() {
    let flat = closed_form_profile(&SpaceSpec::from_alias("r3").unwrap()).unwrap();
    let cf = harmonic_closed_forms(&flat, 0.5, 2.0).unwrap();
    assert!((cf.invariants.volume - PI * 0.25 * 2.0).abs() < 1e-14);
    assert!((cf.invariants.area - 2.0 * PI * 0.5 * 2.0).abs() < 1e-14);
    assert!((cf.invariants.total_mean_curvature + PI * 2.0).abs() < 1e-14);
    assert!(cf.invariants.total_scalar_curvature.abs() < 1e-14);

    let s3 = closed_form_profile(&SpaceSpec::from_alias("s3").unwrap()).unwrap();
    let cf = harmonic_closed_forms(&s3, 0.3, 1.0).unwrap();
    assert!((cf.ricci - 2.0).abs() < 1e-12 && (cf.scalar - 6.0).abs() < 1e-12);

    let h3 = closed_form_profile(&SpaceSpec::from_alias("h3").unwrap()).unwrap();
    let cf = harmonic_closed_forms(&h3, 0.5, 1.0).unwrap();
    assert!((cf.invariants.total_mean_curvature + PI * 1f64.cosh()).abs() < 1e-12);
    assert!(cf.invariants.total_scalar_curvature.abs() < 1e-12);
    assert!(cf.precision_warning.is_none());
}

#[test]
fn product_space_tubes_depend_on_direction() {
    let m = space("s2xr");
    let p = m.center().to_vec();
    let r = 0.5;
    let axial = FramedCurve::geodesic(&m, &p, &[0.0, 0.0, 1.0], 1.0).unwrap();
    let g = m.metric(&p).unwrap();
    let sph = FramedCurve::geodesic(&m, &p, &[0.0, 1.0 / g[(1, 1)].sqrt(), 0.0], 1.0).unwrap();
    let q = TubeQuadrature {
        t_order: 4,
        angular_level: 8,
        ..Default::default()
    };
    let va = tube_volume_direct(&m, &axial, r, &q).unwrap();
    let vs = tube_volume_direct(&m, &sph, r, &q).unwrap();
    assert!(
        (va.value - 2.0 * PI * (1.0 - r.cos())).abs() < 1e-9,
        "{va:?}"
    );
    assert!(
        (vs.value - 2.0 * PI * r * bessel_j1(r)).abs() < 1e-9,
        "{vs:?}"
    );
    assert!((va.value - vs.value).abs() > 10.0 * (va.error + vs.error));
}

#[test]
fn torus_about_a_circle() {
    let m = space("r3");
    let big = 2.0;
    let fc = FramedCurve::from_coordinates(
        move |t| vec![big * t.cos(), big * t.sin(), 0.0],
        move |t| vec![-big * t.sin(), big * t.cos(), 0.0],
        move |t| vec![-big * t.cos(), -big * t.sin(), 0.0],
        0.0,
        2.0 * PI,
    )
    .unwrap();
    assert!((fc.length(&m).unwrap() - 4.0 * PI).abs() < 1e-12);
    let q = TubeQuadrature {
        t_order: 8,
        angular_level: 6,
        ..Default::default()
    };
    let v = tube_volume_direct(&m, &fc, 0.2, &q).unwrap();
    let torus = 2.0 * PI * PI * big * 0.04;
    assert!((v.value - torus).abs() < 1e-5, "{v:?} vs {torus}");
    assert!((torus - 1.57914).abs() < 1e-5);
}

#[test]
fn fermi_frame_is_orthonormal_and_normal() {
    let m = space("s2polar");
    let fc = FramedCurve::from_coordinates(
        |t| vec![1.0, t],
        |_| vec![0.0, 1.0],
        |_| vec![0.0, 0.0],
        0.0,
        1.0,
    )
    .unwrap();
    let samples = fc
        .samples(&m, &[0.0, 0.5, 1.0], &OdeOptions::default())
        .unwrap();
    for s in &samples {
        assert!(inner(&s.g, &s.normals[0], &s.velocity).abs() < 1e-9);
        assert!((inner(&s.g, &s.normals[0], &s.normals[0]) - 1.0).abs() < 1e-9);
        // A latitude circle has nonzero geodesic curvature.
        assert!(s.curvature.iter().any(|c| c.abs() > 1e-3));
    }
    let geo = FramedCurve::geodesic(&m, m.center(), &[0.0, 1.0], 1.0).unwrap();
    for s in geo
        .samples(&m, &[0.0, 1.0], &OdeOptions::default())
        .unwrap()
    {
        assert!(s.curvature.iter().all(|c| *c == 0.0));
    }
}

#[test]
fn steiner_consistency_in_flat_and_hyperbolic_space() {
    let m = space("r3");
    let fc = FramedCurve::geodesic(&m, &[0.0; 3], &[0.0, 1.0, 0.0], 1.0).unwrap();
    let rep = steiner_check(&m, &fc, 0.4, &[0.02, 0.01], &quick()).unwrap();
    assert!((rep.coefficients[1] - 2.0 * PI).abs() < 1e-9);
    assert!(rep.residuals.iter().all(|(_, r)| *r <= 1e-6), "{rep:?}");

    let m = space("h3");
    let fc = FramedCurve::geodesic(&m, &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], 1.0).unwrap();
    let rep = steiner_check(&m, &fc, 0.4, &[0.02, 0.01], &quick()).unwrap();
    // v = π sinh² r: v′ = π sinh 2r, v″ = 2π cosh 2r, v‴ = 4π sinh 2r.
    let exact = [
        PI * 0.8f64.sinh(),
        2.0 * PI * 0.8f64.cosh(),
        4.0 * PI * 0.8f64.sinh(),
    ];
    for k in 0..3 {
        assert!(
            (rep.coefficients[k] - exact[k]).abs() < 1e-4 * exact[k],
            "{k}: {rep:?}"
        );
        assert!(
            (rep.fd_derivatives[k] - exact[k]).abs() < 1e-3 * exact[k],
            "{k}: {rep:?}"
        );
    }
    assert!(rep.ratios[0] > 12.0 && rep.ratios[0] < 20.0, "{rep:?}");
}

#[test]
fn scalar_curvature_expansion_on_hyperbolic_five_space() {
    let spec = SpaceSpec::Hyperbolic {
        n: 5,
        curvature: -1.0,
    };
    let m = make_space(&spec).unwrap();
    let mut p = vec![0.0; 5];
    p[4] = 1.0;
    let fc = FramedCurve::geodesic(&m, &p, &[1.0, 0.0, 0.0, 0.0, 0.0], 1.0).unwrap();
    let q = TubeQuadrature {
        t_order: 2,
        angular_level: 2,
        estimate_error: false,
        ..Default::default()
    };
    let r = 0.1;
    let c = tube_invariants(&m, &fc, r, &q)
        .unwrap()
        .total_scalar_curvature;
    let series = scalar_curvature_expansion(5, r, 1.0, -20.0, -4.0);
    assert!((c - series).abs() < 1e-3 * series.abs(), "{c} {series}");
    let cf = harmonic_closed_forms(&closed_form_profile(&spec).unwrap(), r, 1.0).unwrap();
    assert!((c - cf.invariants.total_scalar_curvature).abs() < 1e-7 * c.abs());
}
