use proptest::prelude::*;

use flatfront::deform::{calapso_transport, conservation_drift, conserved_quantity, deform_front, BaseSurface};
use flatfront::front::{front_from_frame, integrate_frame, parallel_front, FrameOptions};
use flatfront::{reconstruct_front, AmbientSplit, GridDomain, HarmonicPotential, SigVec, Term};

fn dom(n: usize) -> GridDomain {
    GridDomain::square(-0.6, 0.6, n).unwrap()
}

/// Harmonic potentials built from low-degree harmonic polynomials, offset so
/// that the front is regular near the base point.
fn potential() -> impl Strategy<Value = HarmonicPotential> {
    (0.4..1.2f64, -0.5..0.5f64, -0.3..0.3f64, -0.3..0.3f64, -0.1..0.1f64).prop_map(|(c, a, b, d, e)| {
        HarmonicPotential::new(vec![
            Term::Constant { c },
            Term::LinearU { a },
            Term::RePoly { n: 2, a: b },
            Term::ImPoly { n: 2, a: d },
            Term::RePoly { n: 3, a: e },
        ])
        .unwrap()
    })
}

fn lambda() -> impl Strategy<Value = f64> {
    prop_oneof![-1.0..0.4f64, 0.6..1.5f64]
}

fn minkowski(x: &SigVec) -> f64 {
    let c = x.project_r31();
    let c = c.coords();
    -c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn parallel_fronts_form_a_group(phi in potential(), t1 in -1.0..1.0f64, t2 in -1.0..1.0f64) {
        let f = front_from_frame(&integrate_frame(&phi, &dom(17), 0.0).unwrap());
        let a = parallel_front(&parallel_front(&f, t1), t2);
        let b = parallel_front(&f, t1 + t2);
        for (x, y) in a.f.iter().zip(b.f.iter()).chain(a.t.iter().zip(b.t.iter())) {
            prop_assert!((*x - *y).euclid_norm() <= 1e-12 * (1.0 + x.euclid_norm()));
        }
    }

    #[test]
    fn fronts_stay_on_the_hyperboloid(phi in potential(), l in lambda()) {
        let f = front_from_frame(&integrate_frame(&phi, &dom(33), l).unwrap());
        for (x, t) in f.f.iter().zip(f.t.iter()) {
            prop_assert!((minkowski(x) + 1.0).abs() < 1e-6);
            prop_assert!((minkowski(t) - 1.0).abs() < 1e-6);
        }
        prop_assert!(f.flatness_defect(0.1) < 1e-3);
    }

    #[test]
    fn curvature_spheres_reconstruct_the_front(phi in potential()) {
        let b = BaseSurface::new(&phi, &dom(17), &FrameOptions::default()).unwrap();
        let split = AmbientSplit::standard();
        let rec = reconstruct_front(&b.spheres, &split.qplus, &split.qminus).unwrap();
        for (x, y) in rec.f.iter().zip(b.front.f.iter()) {
            prop_assert!((*x - *y).euclid_norm() < 1e-10);
        }
    }

    #[test]
    fn transport_conserves_and_pipelines_agree(phi in potential(), l in lambda()) {
        let b = BaseSurface::new(&phi, &dom(33), &FrameOptions::default()).unwrap();
        let st = calapso_transport(&b.tau, l, &b.dom).unwrap();
        prop_assert!(st.orthogonality_drift < 1e-7, "{}", st.orthogonality_drift);
        prop_assert!(conservation_drift(&st, &conserved_quantity(&b.front, l)).unwrap() < 1e-5);
        prop_assert!(deform_front(&b, l).unwrap().agreement < 1e-5);
    }
}

/// At λ = 0 the metric is cosh²φ du² + sinh²φ dv², to second order in h.
#[test]
fn base_metric_matches_closed_form() {
    let phi = HarmonicPotential::reference();
    let mut errs = Vec::new();
    for n in [17, 33, 65] {
        let d = GridDomain::square(-1.0, 1.0, n).unwrap();
        let f = flatfront::front::metric_and_curvatures(
            front_from_frame(&integrate_frame(&phi, &d, 0.0).unwrap()),
            flatfront::Stencil::Second,
        );
        let mut worst = 0.0_f64;
        let step = (n - 1) / 16;
        for i in (step..n - step).step_by(step) {
            for j in (step..n - step).step_by(step) {
                let (u, v) = (d.u(i), d.v(j));
                let p = u + 0.3 * (u * u - v * v);
                worst = worst.max((f.metric_e.get(i, j) - p.cosh().powi(2)).abs());
                worst = worst.max((f.metric_g.get(i, j) - p.sinh().powi(2)).abs());
            }
        }
        errs.push(worst);
    }
    let o1 = (errs[0] / errs[1]).log2();
    let o2 = (errs[1] / errs[2]).log2();
    assert!(o1 > 1.7 && o2 > 1.7, "{errs:?}");
}

/// A constant potential gives E = cosh²1, G = sinh²1 and κ₁ = tanh 1.
#[test]
fn constant_potential() {
    let phi = HarmonicPotential::constant(1.0);
    let d = GridDomain::square(-0.5, 0.5, 65).unwrap();
    let f = front_from_frame(&integrate_frame(&phi, &d, 0.0).unwrap());
    let (i, j) = (32, 32);
    assert!((f.metric_e.get(i, j) - 2.381_097_845_541_816).abs() < 1e-6);
    assert!((f.metric_g.get(i, j) - 1.381_097_845_541_816).abs() < 1e-6);
    // The shape operator is a ratio of derivatives, so the stencil error cancels.
    assert!((f.kappa1.get(i, j) - 0.761_594_155_955_764_9).abs() < 1e-12);
}
