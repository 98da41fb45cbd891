//! Calapso transport and the Lie-geometric deformation of a flat front.
//!
//! `T(λ)` solves `dT = T·λτ` with `T = I` at the base node. The two linear
//! conserved quantities `p±(λ)` are transported to constants, and applying
//! `T` to `h±(λ)` yields the deformed front (pipeline B). Pipeline A integrates
//! the reduced frame system at the same `λ`; the two must agree.

use nalgebra::{Matrix6, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::{
    front_from_frame, front_from_samples, integrate_frame_with, lambda_factor, Frame, FrameGrid, FrameOptions,
    FrontGrid,
};
use crate::geom::{apply, eta, max_principal_angle_sin, orthogonality_defect, wedge_matrix, AmbientSplit, SigVec};
use crate::grid::{Grid, GridDomain, Stencil};
use crate::lift::{curvature_spheres, tau_from_frame, tau_pm_from_frame, ConnectionFormGrid, SphereCongruenceGrid};
use crate::ode::{rk4_step, Stage};
use crate::potential::HarmonicPotential;

/// Orthogonality drift above which the transport is declared diverged.
pub const DRIFT_CEILING: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `λ < 1/2`
    Subcritical,
    /// `λ > 1/2`
    Supercritical,
}

impl Branch {
    pub fn of(lambda: f64) -> Branch {
        if lambda < 0.5 {
            Branch::Subcritical
        } else {
            Branch::Supercritical
        }
    }
}

/// `p±(λ) = (1−λ)(𝔭 ± 𝔮) − λ(𝔱 ± 𝔣)` over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedQuantity {
    pub lambda: f64,
    pub dom: GridDomain,
    pub pplus: Grid<SigVec>,
    pub pminus: Grid<SigVec>,
}

impl ConservedQuantity {
    /// `max |⟨p⁺, p⁻⟩ + 2(1 − 2λ)|`.
    pub fn pairing_defect(&self) -> f64 {
        let target = -2.0 * (1.0 - 2.0 * self.lambda);
        self.pplus
            .iter()
            .zip(self.pminus.iter())
            .map(|(a, b)| (a.dot(b) - target).abs())
            .fold(0.0, f64::max)
    }
}

fn p_pm(lambda: f64, f: &SigVec, t: &SigVec) -> (SigVec, SigVec) {
    let s = AmbientSplit::standard();
    let (f, t) = (f.embed(), t.embed());
    (
        s.qplus * (1.0 - lambda) - (t + f) * lambda,
        s.qminus * (1.0 - lambda) - (t - f) * lambda,
    )
}

fn h_pm(lambda: f64, f: &SigVec, t: &SigVec) -> (SigVec, SigVec) {
    let s = AmbientSplit::standard();
    let (f, t) = (f.embed(), t.embed());
    (
        s.qplus * (-lambda) + (t + f) * (1.0 - lambda),
        s.qminus * (-lambda) + (t - f) * (1.0 - lambda),
    )
}

pub fn conserved_quantity(front: &FrontGrid, lambda: f64) -> ConservedQuantity {
    let pairs = front.f.map_indexed(|i, j, f| p_pm(lambda, f, front.t.get(i, j)));
    ConservedQuantity {
        lambda,
        dom: front.dom,
        pplus: pairs.map(|p| p.0),
        pminus: pairs.map(|p| p.1),
    }
}

/// The constant element of O(4,2) that sends the base-point data
/// `(e₁, e₂, ĥ⁺, ĥ⁻, p⁺, p⁻)` to `(y₁, y₂, y₃+y₀, y₃−y₀, σq⁺, εσq⁻)`,
/// where `σ = √|1−2λ|`, `ε = sgn(1−2λ)` and `ĥ⁺ = h⁺/σ`, `ĥ⁻ = εh⁻/σ`.
///
/// It puts `Tp± ∥ q±` and matches the deformed base frame with
/// [`crate::front::initial_frame`]; it is the identity at `λ = 0`.
pub fn base_rotation(lambda: f64, base: &Frame) -> Result<Matrix6<f64>> {
    let c = lambda_factor(lambda)?;
    if lambda == 0.0 {
        return Ok(Matrix6::identity());
    }
    let (sigma, eps) = (c.abs().sqrt(), c.signum());
    let (f, t) = (base.front(), base.normal());
    let (hp, hm) = h_pm(lambda, &f, &t);
    let (pp, pm) = p_pm(lambda, &f, &t);
    let split = AmbientSplit::standard();
    let cols = |v: [SigVec; 6]| Matrix6::from_columns(&v.map(|x| x.embed().to_vector6()));
    let source = cols([
        base.e1,
        base.e2,
        hp * (1.0 / sigma),
        hm * (eps / sigma),
        pp,
        pm,
    ]);
    let (y0, y3) = (SigVec::y(0).embed(), SigVec::y(3).embed());
    let target = cols([
        SigVec::y(1),
        SigVec::y(2),
        y3 + y0,
        y3 - y0,
        split.qplus * sigma,
        split.qminus * (eps * sigma),
    ]);
    let inv = source
        .try_inverse()
        .ok_or(Error::DegenerateConfiguration("base-point data do not span R^{4,2}"))?;
    Ok(target * inv)
}

/// Transport `T(λ)` over a grid together with its alignment data.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationState {
    pub lambda: f64,
    pub branch: Branch,
    /// `1 − 2λ`
    pub mu2: f64,
    pub dom: GridDomain,
    /// `T(λ)` with `T = I` at the base node (before `base_rotation`).
    pub t: Grid<Matrix6<f64>>,
    /// `None` at `λ = 1/2`, where no alignment exists.
    pub base_rotation: Option<Matrix6<f64>>,
    /// `max ‖TᵀηT − η‖` over the grid.
    pub orthogonality_drift: f64,
}

/// Step of `dX = X·λτ` between two coarse nodes `2h` apart on the fine
/// grid. `at(k)` returns the fine sample `k = 0, 1, 2` half-steps from the start.
fn transport_step(
    x: &Matrix6<f64>,
    h: f64,
    lambda: f64,
    at: impl Fn(usize) -> Matrix6<f64>,
) -> Matrix6<f64> {
    let (a0, a1, a2) = (at(0) * lambda, at(1) * lambda, at(2) * lambda);
    rk4_step(x, h, |stage, y| {
        y * match stage {
            Stage::Start => &a0,
            Stage::Mid => &a1,
            Stage::End => &a2,
        }
    })
}

fn check_refined(tau: &ConnectionFormGrid, dom: &GridDomain) -> Result<()> {
    let fine = dom.refined();
    if !tau.dom.same_nodes(&fine) {
        return Err(Error::GridMismatch(format!(
            "connection form must be sampled on the half-step grid ({}×{}), got {}×{}",
            fine.nu, fine.nv, tau.dom.nu, tau.dom.nv
        )));
    }
    Ok(())
}

/// Transports along one coarse line from `k0`; `fine(k)` maps a fine index
/// along the line to the sample of the relevant component.
fn transport_line(
    n: usize,
    k0: usize,
    h: f64,
    lambda: f64,
    seed: Matrix6<f64>,
    fine: impl Fn(usize) -> Matrix6<f64>,
) -> Vec<Matrix6<f64>> {
    let mut out = vec![seed; n];
    for k in k0 + 1..n {
        out[k] = transport_step(&out[k - 1], h, lambda, |s| fine(2 * (k - 1) + s));
    }
    for k in (0..k0).rev() {
        out[k] = transport_step(&out[k + 1], -h, lambda, |s| fine(2 * (k + 1) - s));
    }
    out
}

/// Integrates `dT = T·λτ` from `T = I` at `dom.base_index`, first along the
/// base row in `u`, then along every column in `v`.
///
/// `tau` must be sampled on `dom.refined()` so that the RK4 midpoint stages
/// read exact samples.
pub fn calapso_transport(tau: &ConnectionFormGrid, lambda: f64, dom: &GridDomain) -> Result<DeformationState> {
    check_refined(tau, dom)?;
    let (i0, j0) = dom.base_index;
    let (hu, hv) = (dom.h_u(), dom.h_v());
    let row = transport_line(dom.nu, i0, hu, lambda, Matrix6::identity(), |k| *tau.tau_u.get(k, 2 * j0));
    let cols: Vec<Vec<Matrix6<f64>>> = row
        .par_iter()
        .enumerate()
        .map(|(i, t)| transport_line(dom.nv, j0, hv, lambda, *t, |k| *tau.tau_v.get(2 * i, k)))
        .collect();
    let t = Grid::from_fn(dom.nu, dom.nv, |i, j| cols[i][j]);
    let drift = t.iter().map(orthogonality_defect).fold(0.0, f64::max);
    if !(drift <= DRIFT_CEILING) {
        return Err(Error::TransportDiverged { lambda, drift });
    }
    let base_rotation = if (1.0 - 2.0 * lambda).abs() < 1e-12 {
        None
    } else {
        Some(base_rotation(lambda, &crate::front::initial_frame(0.0)?)?)
    };
    Ok(DeformationState {
        lambda,
        branch: Branch::of(lambda),
        mu2: 1.0 - 2.0 * lambda,
        dom: *dom,
        t,
        base_rotation,
        orthogonality_drift: drift,
    })
}

/// Per-plaquette holonomy of `d + λτ`, `‖H − I‖ / (h_u h_v)`, where `H`
/// composes the four edge transports around the cell. This is a discrete
/// curvature: it tends to zero for a flat connection.
pub fn holonomy_residual(tau: &ConnectionFormGrid, lambda: f64) -> Result<Grid<f64>> {
    let dom = tau
        .dom
        .coarsened()
        .ok_or_else(|| Error::GridMismatch("connection form is not on a half-step grid".into()))?;
    let (hu, hv) = (dom.h_u(), dom.h_v());
    let (nu, nv) = (dom.nu - 1, dom.nv - 1);
    let cells: Vec<f64> = (0..nu * nv)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (2 * (k / nv), 2 * (k % nv));
            let id = Matrix6::identity();
            let a = transport_step(&id, hu, lambda, |s| *tau.tau_u.get(i + s, j));
            let b = transport_step(&a, hv, lambda, |s| *tau.tau_v.get(i + 2, j + s));
            let c = transport_step(&b, -hu, lambda, |s| *tau.tau_u.get(i + 2 - s, j + 2));
            let d = transport_step(&c, -hv, lambda, |s| *tau.tau_v.get(i, j + 2 - s));
            (d - id).amax() / (hu * hv)
        })
        .collect();
    Ok(Grid::from_vec(nu, nv, cells))
}

/// A smooth, seeded, non-flat skew-adjoint 1-form on `dom`, for negative
/// controls: each component is a sum of a few plane waves with random
/// skew-adjoint amplitudes.
pub fn random_skew_form(dom: &GridDomain, seed: u64, amplitude: f64) -> ConnectionFormGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = eta();
    let mut modes = || -> Vec<(Matrix6<f64>, f64, f64, f64)> {
        (0..3)
            .map(|_| {
                let mut s = Matrix6::<f64>::zeros();
                for r in 0..6 {
                    for c in r + 1..6 {
                        let x = rng.gen_range(-1.0..1.0);
                        s[(r, c)] = x;
                        s[(c, r)] = -x;
                    }
                }
                (e * s * amplitude, rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.3))
            })
            .collect()
    };
    let (mu, mv) = (modes(), modes());
    let eval = |m: &[(Matrix6<f64>, f64, f64, f64)], u: f64, v: f64| {
        m.iter().fold(Matrix6::zeros(), |acc, (a, ku, kv, ph)| acc + a * (ku * u + kv * v + ph).sin())
    };
    ConnectionFormGrid {
        dom: *dom,
        tau_u: Grid::from_fn(dom.nu, dom.nv, |i, j| eval(&mu, dom.u(i), dom.v(j))),
        tau_v: Grid::from_fn(dom.nu, dom.nv, |i, j| eval(&mv, dom.u(i), dom.v(j))),
    }
}

/// Entrywise sum of two forms on the same grid.
pub fn add_forms(a: &ConnectionFormGrid, b: &ConnectionFormGrid) -> Result<ConnectionFormGrid> {
    if !a.dom.same_nodes(&b.dom) {
        return Err(Error::GridMismatch("forms live on different grids".into()));
    }
    Ok(ConnectionFormGrid {
        dom: a.dom,
        tau_u: a.tau_u.map_indexed(|i, j, x| x + b.tau_u.get(i, j)),
        tau_v: a.tau_v.map_indexed(|i, j, x| x + b.tau_v.get(i, j)),
    })
}

/// Max over the grid of `|T p±(λ) − (T p±)(base)|`, relative to the
/// Euclidean norm of the base value.
pub fn conservation_drift(state: &DeformationState, cq: &ConservedQuantity) -> Result<f64> {
    if !state.dom.same_nodes(&cq.dom) {
        return Err(Error::GridMismatch("state and conserved quantity on different grids".into()));
    }
    let (i0, j0) = state.dom.base_index;
    let mut worst = 0.0_f64;
    for p in [&cq.pplus, &cq.pminus] {
        let base = apply(state.t.get(i0, j0), p.get(i0, j0));
        let scale = base.euclid_norm().max(f64::MIN_POSITIVE);
        for ((i, j), x) in p.indexed() {
            let d = (apply(state.t.get(i, j), x) - base).euclid_norm() / scale;
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

/// Residuals of `T±(1 + (λ/2)s±∧s∓) = C± T` and of the plane identity
/// `T⁺𝔣 = T⁻𝔣 = T𝔣`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeResidual {
    /// `max ‖T⁺G⁺ − C⁺T‖ / max ‖T‖`, with `C⁺ = G⁺(base)`.
    pub plus: f64,
    pub minus: f64,
    /// Max sine of the principal angles between `C±⁻¹T±𝔣` and `T𝔣`.
    pub plane_angle: f64,
}

/// Compares `T` with `T±` integrated from `τ±` (all three start at `I`).
///
/// The constant left factor `C± = G±(base)` accounts for the common initial
/// condition and is removed before measuring.
pub fn gauge_relation_residual(
    state: &DeformationState,
    plus: &DeformationState,
    minus: &DeformationState,
    sc: &SphereCongruenceGrid,
    lambda: f64,
) -> Result<GaugeResidual> {
    for s in [plus, minus] {
        if !s.dom.same_nodes(&state.dom) {
            return Err(Error::GridMismatch("T and T± on different grids".into()));
        }
    }
    if !sc.dom.same_nodes(&state.dom) {
        return Err(Error::GridMismatch("sphere congruences and T on different grids".into()));
    }
    let (i0, j0) = state.dom.base_index;
    let gauge = |a: &Grid<SigVec>, b: &Grid<SigVec>| {
        a.map_indexed(|i, j, x| Matrix6::identity() + wedge_matrix(x, b.get(i, j)) * (lambda / 2.0))
    };
    let gp = gauge(&sc.s_plus, &sc.s_minus);
    let gm = gauge(&sc.s_minus, &sc.s_plus);
    let t_scale = state.t.iter().map(|m| m.amax()).fold(0.0, f64::max);
    let rel = |tpm: &Grid<Matrix6<f64>>, g: &Grid<Matrix6<f64>>| {
        let c = g.get(i0, j0);
        tpm.indexed()
            .map(|((i, j), x)| (x * g.get(i, j) - c * state.t.get(i, j)).amax())
            .fold(0.0, f64::max)
            / t_scale
    };
    let cpi = gp
        .get(i0, j0)
        .try_inverse()
        .ok_or(Error::DegenerateConfiguration("gauge factor is singular at the base point"))?;
    let cmi = gm
        .get(i0, j0)
        .try_inverse()
        .ok_or(Error::DegenerateConfiguration("gauge factor is singular at the base point"))?;
    let mut angle = 0.0_f64;
    for ((i, j), s1) in sc.s1.indexed() {
        let el = [*s1, *sc.s2.get(i, j)];
        let t_el = el.map(|x| apply(state.t.get(i, j), &x));
        for (cinv, tpm) in [(&cpi, &plus.t), (&cmi, &minus.t)] {
            let m = cinv * tpm.get(i, j);
            let p_el = el.map(|x| apply(&m, &x));
            angle = angle.max(max_principal_angle_sin([&p_el[0], &p_el[1]], [&t_el[0], &t_el[1]])?);
        }
    }
    Ok(GaugeResidual {
        plus: rel(&plus.t, &gp),
        minus: rel(&minus.t, &gm),
        plane_angle: angle,
    })
}

/// The undeformed surface and everything the deformation reuses.
///
/// The frame is integrated on the half-step grid `dom.refined()`; the base
/// front is its restriction to `dom`, and `τ`, `τ±` are read from the
/// structure equations at every half-step node.
#[derive(Clone, Debug)]
pub struct BaseSurface {
    pub phi: HarmonicPotential,
    pub dom: GridDomain,
    pub options: FrameOptions,
    pub fine: FrameGrid,
    pub frame: FrameGrid,
    pub front: FrontGrid,
    pub spheres: SphereCongruenceGrid,
    pub tau: ConnectionFormGrid,
    pub tau_plus: ConnectionFormGrid,
    pub tau_minus: ConnectionFormGrid,
}

impl BaseSurface {
    pub fn new(phi: &HarmonicPotential, dom: &GridDomain, options: &FrameOptions) -> Result<Self> {
        dom.validate()?;
        let fine = integrate_frame_with(phi, &dom.refined(), 0.0, options)?;
        let frame = fine.subsample(2)?;
        let front = front_from_frame(&frame);
        let spheres = curvature_spheres(&front, phi);
        let tau = tau_from_frame(&fine, phi)?;
        let (tau_plus, tau_minus) = tau_pm_from_frame(&fine, phi)?;
        Ok(BaseSurface {
            phi: phi.clone(),
            dom: *dom,
            options: *options,
            fine,
            frame,
            front,
            spheres,
            tau,
            tau_plus,
            tau_minus,
        })
    }
}

/// Output of [`deform_front`].
#[derive(Clone, Debug)]
pub struct DeformedFront {
    pub lambda: f64,
    /// Pipeline A: the reduced frame system integrated at `λ`.
    pub reduced: FrontGrid,
    pub reduced_frame: FrameGrid,
    /// Pipeline B: `R T(λ)` applied to `h±(λ)` of the base front.
    pub ambient: FrontGrid,
    /// Max Euclidean distance between the two pipelines' `𝔣` and `𝔱`.
    pub agreement: f64,
    pub state: DeformationState,
}

/// Deformed flat front at `λ` by both pipelines.
///
/// Pipeline B sets `𝔣(λ) = R T (h⁺ − εh⁻)/(2σ)`, `𝔱(λ) = R T (h⁺ + εh⁻)/(2σ)`
/// with `h± = −λ(𝔭±𝔮) + (1−λ)(𝔱±𝔣)`, `σ = √|1−2λ|`, `ε = sgn(1−2λ)`, and
/// reads the result in R^{3,1} = {q⁺, q⁻}^⊥.
pub fn deform_front(base: &BaseSurface, lambda: f64) -> Result<DeformedFront> {
    let c = lambda_factor(lambda)?;
    let (sigma, eps) = (c.abs().sqrt(), c.signum());
    let dom = base.dom;

    let reduced_frame = integrate_frame_with(&base.phi, &dom.refined(), lambda, &base.options)?.subsample(2)?;
    let reduced = front_from_frame(&reduced_frame);

    let state = calapso_transport(&base.tau, lambda, &dom)?;
    let rot = state.base_rotation.ok_or(Error::DegenerateParameter { lambda })?;
    let ft = base.front.f.map_indexed(|i, j, f| {
        let (hp, hm) = h_pm(lambda, f, base.front.t.get(i, j));
        let m = rot * state.t.get(i, j);
        let a = apply(&m, &hp);
        let b = apply(&m, &hm) * eps;
        (
            ((a - b) * (0.5 / sigma)).project_r31(),
            ((a + b) * (0.5 / sigma)).project_r31(),
        )
    });
    let ambient = front_from_samples(lambda, dom, ft.map(|x| x.0), ft.map(|x| x.1), Stencil::Fourth);

    let agreement = reduced
        .f
        .iter()
        .zip(ambient.f.iter())
        .chain(reduced.t.iter().zip(ambient.t.iter()))
        .map(|(a, b)| (*a - *b).euclid_norm())
        .fold(0.0, f64::max);
    Ok(DeformedFront {
        lambda,
        reduced,
        reduced_frame,
        ambient,
        agreement,
        state,
    })
}

/// `⟨Tx, Ty⟩ − ⟨x, y⟩` for one matrix and two vectors.
pub fn inner_product_defect(t: &Matrix6<f64>, x: &Vector6<f64>, y: &Vector6<f64>) -> f64 {
    let e = eta();
    ((t * x).dot(&(e * (t * y))) - x.dot(&(e * y))).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::initial_frame;

    fn base(n: usize) -> BaseSurface {
        let dom = GridDomain::square(-1.0, 1.0, n).unwrap();
        BaseSurface::new(&HarmonicPotential::reference(), &dom, &FrameOptions::default()).unwrap()
    }

    #[test]
    fn conserved_pairing() {
        let dom = GridDomain::square(-1.0, 1.0, 9).unwrap();
        let opts = FrameOptions { substeps: 1, project: true };
        let b = BaseSurface::new(&HarmonicPotential::reference(), &dom, &opts).unwrap();
        let cq0 = conserved_quantity(&b.front, 0.0);
        let s = AmbientSplit::standard();
        assert!(cq0.pplus.iter().all(|p| *p == s.qplus));
        for &l in &[-1.0, 0.0, 0.25, 1.0] {
            let cq = conserved_quantity(&b.front, l);
            assert!(cq.pairing_defect() < 1e-12, "λ={l}");
        }
    }

    #[test]
    fn identity_at_zero() {
        let b = base(9);
        let st = calapso_transport(&b.tau, 0.0, &b.dom).unwrap();
        assert!(st.t.iter().all(|m| *m == Matrix6::identity()));
        assert_eq!(st.base_rotation, Some(Matrix6::identity()));
        let h = holonomy_residual(&b.tau, 0.0).unwrap();
        assert!(h.iter().all(|x| *x == 0.0));
        let d = deform_front(&b, 0.0).unwrap();
        for k in 0..b.dom.len() {
            assert!((d.ambient.f.as_slice()[k] - b.front.f.as_slice()[k]).euclid_norm() < 1e-12);
            assert_eq!(d.reduced.f.as_slice()[k], b.front.f.as_slice()[k]);
        }
    }

    #[test]
    fn base_rotation_is_pseudo_orthogonal() {
        let fr = initial_frame(0.0).unwrap();
        for &l in &[-1.0, 0.25, 0.75, 1.0] {
            let r = base_rotation(l, &fr).unwrap();
            assert!(orthogonality_defect(&r) < 1e-12, "λ={l}");
        }
        assert!(matches!(base_rotation(0.5, &fr), Err(Error::DegenerateParameter { .. })));
    }

    #[test]
    fn transport_conserves_and_stays_orthogonal() {
        let b = base(33);
        for &l in &[-1.0, 0.25, 0.75] {
            let st = calapso_transport(&b.tau, l, &b.dom).unwrap();
            assert!(st.orthogonality_drift < 1e-5, "λ={l}: {}", st.orthogonality_drift);
            let cq = conserved_quantity(&b.front, l);
            let d = conservation_drift(&st, &cq).unwrap();
            assert!(d < 1e-4, "λ={l}: {d}");
        }
    }

    #[test]
    fn wrong_composition_order_breaks_conservation() {
        let b = base(17);
        let st = calapso_transport(&b.tau, 0.25, &b.dom).unwrap();
        let cq = conserved_quantity(&b.front, 0.25);
        let mut flipped = st.clone();
        flipped.t = st.t.map(|m| m.try_inverse().unwrap());
        assert!(conservation_drift(&flipped, &cq).unwrap() > 1e3 * conservation_drift(&st, &cq).unwrap());
    }

    #[test]
    fn gauge_relation_holds() {
        let b = base(33);
        let l = 0.25;
        let st = calapso_transport(&b.tau, l, &b.dom).unwrap();
        let sp = calapso_transport(&b.tau_plus, l, &b.dom).unwrap();
        let sm = calapso_transport(&b.tau_minus, l, &b.dom).unwrap();
        let g = gauge_relation_residual(&st, &sp, &sm, &b.spheres, l).unwrap();
        assert!(g.plus < 1e-4 && g.minus < 1e-4 && g.plane_angle < 1e-5, "{g:?}");
    }

    #[test]
    fn holonomy_plateaus_for_random_field() {
        let b = base(17);
        let noise = random_skew_form(&b.tau.dom, 7, 0.2);
        let bad = add_forms(&b.tau, &noise).unwrap();
        let flat = holonomy_residual(&b.tau, 0.25).unwrap().iter().cloned().fold(0.0, f64::max);
        let curved = holonomy_residual(&bad, 0.25).unwrap().iter().cloned().fold(0.0, f64::max);
        assert!(curved > 100.0 * flat, "{flat:e} {curved:e}");
        assert!(noise.skewness_defect() < 1e-12);
    }

    #[test]
    fn pipelines_agree_on_both_branches() {
        let b = base(33);
        for &l in &[0.25, 1.0] {
            let d = deform_front(&b, l).unwrap();
            assert!(d.agreement < 1e-5, "λ={l}: {}", d.agreement);
            assert!(d.ambient.invariant_violation() < 1e-5);
        }
        assert!(matches!(deform_front(&b, 0.5), Err(Error::DegenerateParameter { .. })));
    }

    #[test]
    fn inner_products_preserved() {
        let b = base(17);
        let st = calapso_transport(&b.tau, 0.25, &b.dom).unwrap();
        let x = Vector6::new(0.3, -1.0, 0.2, 0.5, 0.0, 1.1);
        let y = Vector6::new(1.0, 0.4, -0.7, 0.1, 2.0, -0.3);
        assert!(st.t.iter().all(|m| inner_product_defect(m, &x, &y) < 1e-6));
    }
}
