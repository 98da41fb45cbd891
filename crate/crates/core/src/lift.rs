//! Lie sphere lift of a flat front.
//!
//! Points of H³ and their unit normals are turned into contact elements of
//! R^{4,2}. The curvature spheres `s₁, s₂` and the isothermic congruences
//! `s± = s₁ ± s₂` carry the Ω-surface structure, and the connection form
//! `τ = −(𝔭+𝔱)∧d𝔱 + (𝔮+𝔣)∧d𝔣` drives the Calapso transport.

use nalgebra::Matrix6;

use crate::error::{Error, Result};
use crate::front::{front_from_samples, FrameGrid, FrontGrid};
use crate::geom::{cross_ratio, wedge_matrix, AmbientSplit, ContactElement, SigVec};
use crate::grid::{diff, diff_uv, Axis, Grid, GridDomain, Stencil};
use crate::potential::HarmonicPotential;

/// `|κ₁ − κ₂|` below which a node counts as umbilic.
pub const UMBILIC_TOL: f64 = 1e-9;

/// Relative size of `⟨s±, q∓⟩` below which `s±` is taken to be a point sphere.
pub const POINT_SPHERE_TOL: f64 = 1e-12;

/// Contact elements `span{𝔮 + 𝔣, 𝔭 + 𝔱}`.
pub fn legendre_lift(front: &FrontGrid, split: &AmbientSplit) -> Grid<ContactElement> {
    front.f.map_indexed(|i, j, f| ContactElement {
        s1: split.q + f.embed(),
        s2: split.p + front.t.get(i, j).embed(),
    })
}

/// Curvature spheres and isothermic sphere congruences over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereCongruenceGrid {
    pub lambda: f64,
    pub dom: GridDomain,
    pub s1: Grid<SigVec>,
    pub s2: Grid<SigVec>,
    pub s_plus: Grid<SigVec>,
    pub s_minus: Grid<SigVec>,
    /// Max over nodes of the part of `s₁_u` normal to `s₂` and of `s₂_v`
    /// normal to `s₁`, relative to `|s₂|`, `|s₁|`.
    pub parallelism_residual: f64,
}

impl SphereCongruenceGrid {
    /// Max of `|s₁|²`, `|s₂|²`, `|s±|²`, `⟨s₁, s₂⟩`, `⟨s±, q±⟩` in absolute value.
    pub fn invariant_residual(&self, split: &AmbientSplit) -> f64 {
        let mut m = 0.0_f64;
        for k in 0..self.dom.len() {
            let (s1, s2) = (self.s1.as_slice()[k], self.s2.as_slice()[k]);
            let (sp, sm) = (self.s_plus.as_slice()[k], self.s_minus.as_slice()[k]);
            for x in [
                s1.norm2(),
                s2.norm2(),
                s1.dot(&s2),
                sp.norm2(),
                sm.norm2(),
                sp.dot(&split.qplus),
                sm.dot(&split.qminus),
            ] {
                m = m.max(x.abs());
            }
        }
        m
    }

    /// `max |cr(s⁺, s⁻; s₁, s₂) + 1|`.
    pub fn harmonic_separation_defect(&self) -> Result<f64> {
        let mut m = 0.0_f64;
        for k in 0..self.dom.len() {
            let cr = cross_ratio(
                &self.s_plus.as_slice()[k],
                &self.s_minus.as_slice()[k],
                &self.s1.as_slice()[k],
                &self.s2.as_slice()[k],
            )?;
            m = m.max((cr + 1.0).abs());
        }
        Ok(m)
    }

    /// Rescales `s⁺` and `s⁻` pointwise; `s₁`, `s₂` are left alone.
    pub fn rescaled(&self, mut scale: impl FnMut(usize, usize) -> (f64, f64)) -> Self {
        let mut out = self.clone();
        for i in 0..self.dom.nu {
            for j in 0..self.dom.nv {
                let (a, b) = scale(i, j);
                *out.s_plus.get_mut(i, j) = *self.s_plus.get(i, j) * a;
                *out.s_minus.get_mut(i, j) = *self.s_minus.get(i, j) * b;
            }
        }
        out
    }
}

fn normal_part(x: &SigVec, dir: &SigVec) -> f64 {
    let n2 = dir.euclid_dot(dir);
    if n2 == 0.0 {
        return x.euclid_norm();
    }
    (*x - *dir * (x.euclid_dot(dir) / n2)).euclid_norm() / n2.sqrt()
}

fn spheres(phi: f64, f: &SigVec, t: &SigVec, split: &AmbientSplit) -> (SigVec, SigVec) {
    let (ch, sh) = (phi.cosh(), phi.sinh());
    let pt = split.p + t.embed();
    let qf = split.q + f.embed();
    (pt * ch + qf * sh, pt * sh + qf * ch)
}

/// `s₁ = cosh φ (𝔭+𝔱) + sinh φ (𝔮+𝔣)`, `s₂ = sinh φ (𝔭+𝔱) + cosh φ (𝔮+𝔣)`,
/// `s± = s₁ ± s₂`, for a base front with curvature-line potential `phi`.
pub fn curvature_spheres(front: &FrontGrid, phi: &HarmonicPotential) -> SphereCongruenceGrid {
    let dom = front.dom;
    let split = AmbientSplit::standard();
    let pairs = front.f.map_indexed(|i, j, f| {
        spheres(phi.value(dom.u(i), dom.v(j)), f, front.t.get(i, j), &split)
    });
    let s1 = pairs.map(|p| p.0);
    let s2 = pairs.map(|p| p.1);
    let s_plus = pairs.map(|p| p.0 + p.1);
    let s_minus = pairs.map(|p| p.0 - p.1);
    let s1u = diff(&s1, &dom, Axis::U, Stencil::Second);
    let s2v = diff(&s2, &dom, Axis::V, Stencil::Second);
    let mut par = 0.0_f64;
    if dom.nu > 1 {
        for (a, b) in s1u.iter().zip(s2.iter()) {
            par = par.max(normal_part(a, b));
        }
    }
    if dom.nv > 1 {
        for (a, b) in s2v.iter().zip(s1.iter()) {
            par = par.max(normal_part(a, b));
        }
    }
    SphereCongruenceGrid {
        lambda: front.lambda,
        dom,
        s1,
        s2,
        s_plus,
        s_minus,
        parallelism_residual: par,
    }
}

/// Pointwise value of the Ω operator, `NaN` where it is not evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaResidual {
    pub residual: Grid<f64>,
    /// Nodes skipped because `|κ₁ − κ₂| < UMBILIC_TOL`.
    pub umbilic_count: usize,
}

/// `(√E/√G · κ₁ᵤ/(κ₁−κ₂))_v + (√G/√E · κ₂ᵥ/(κ₁−κ₂))_u` by central differences.
///
/// Singular input (`NaN` curvatures) and umbilic nodes propagate as `NaN`.
pub fn omega_residual(
    dom: &GridDomain,
    e: &Grid<f64>,
    g: &Grid<f64>,
    kappa1: &Grid<f64>,
    kappa2: &Grid<f64>,
) -> Result<OmegaResidual> {
    for (name, x) in [("E", e), ("G", g), ("kappa1", kappa1), ("kappa2", kappa2)] {
        if x.dims() != (dom.nu, dom.nv) {
            return Err(Error::GridMismatch(format!("{name} is {:?}, domain is {}×{}", x.dims(), dom.nu, dom.nv)));
        }
    }
    let s = Stencil::Second;
    let k1u = diff(kappa1, dom, Axis::U, s);
    let k2v = diff(kappa2, dom, Axis::V, s);
    let mut umbilic_count = 0;
    let umbilic = kappa1.map_indexed(|i, j, k1| {
        let u = (k1 - kappa2.get(i, j)).abs() < UMBILIC_TOL;
        umbilic_count += u as usize;
        u
    });
    let a = Grid::from_fn(dom.nu, dom.nv, |i, j| {
        if *umbilic.get(i, j) {
            return f64::NAN;
        }
        (e.get(i, j) / g.get(i, j)).sqrt() * k1u.get(i, j) / (kappa1.get(i, j) - kappa2.get(i, j))
    });
    let b = Grid::from_fn(dom.nu, dom.nv, |i, j| {
        if *umbilic.get(i, j) {
            return f64::NAN;
        }
        (g.get(i, j) / e.get(i, j)).sqrt() * k2v.get(i, j) / (kappa1.get(i, j) - kappa2.get(i, j))
    });
    let av = diff(&a, dom, Axis::V, s);
    let bu = diff(&b, dom, Axis::U, s);
    let residual = Grid::from_fn(dom.nu, dom.nv, |i, j| {
        if *umbilic.get(i, j) {
            f64::NAN
        } else {
            av.get(i, j) + bu.get(i, j)
        }
    });
    Ok(OmegaResidual {
        residual,
        umbilic_count,
    })
}

/// Part of `s_uv` normal to `s`, relative to `|s|`, for one congruence.
pub fn moutard_defect(dom: &GridDomain, s: &Grid<SigVec>) -> Grid<f64> {
    let suv = diff_uv(s, dom);
    s.map_indexed(|i, j, x| normal_part(suv.get(i, j), x))
}

/// Max over `s⁺`, `s⁻` of [`moutard_defect`].
pub fn moutard_residual(sc: &SphereCongruenceGrid) -> Grid<f64> {
    let p = moutard_defect(&sc.dom, &sc.s_plus);
    let m = moutard_defect(&sc.dom, &sc.s_minus);
    p.map_indexed(|i, j, x| x.max(*m.get(i, j)))
}

/// A matrix-valued 1-form `τ_u du + τ_v dv` sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionFormGrid {
    pub dom: GridDomain,
    pub tau_u: Grid<Matrix6<f64>>,
    pub tau_v: Grid<Matrix6<f64>>,
}

impl ConnectionFormGrid {
    pub fn zero(dom: GridDomain) -> Self {
        let z = Grid::filled(dom.nu, dom.nv, Matrix6::zeros());
        ConnectionFormGrid {
            dom,
            tau_u: z.clone(),
            tau_v: z,
        }
    }

    /// `max |Mᵀη + ηM|` over both components.
    pub fn skewness_defect(&self) -> f64 {
        self.tau_u
            .iter()
            .chain(self.tau_v.iter())
            .map(crate::geom::skewness_defect)
            .fold(0.0, f64::max)
    }

    /// Max entrywise distance to another form on the same grid.
    pub fn distance(&self, other: &ConnectionFormGrid) -> Grid<f64> {
        Grid::from_fn(self.dom.nu, self.dom.nv, |i, j| {
            (self.tau_u.get(i, j) - other.tau_u.get(i, j))
                .amax()
                .max((self.tau_v.get(i, j) - other.tau_v.get(i, j)).amax())
        })
    }

    /// Every `step`-th node.
    pub fn subsample(&self, step: usize) -> Result<ConnectionFormGrid> {
        let mut dom = self.dom;
        let ok = |n: usize| n == 1 || (n - 1).is_multiple_of(step);
        if step == 0 || !ok(dom.nu) || !ok(dom.nv) {
            return Err(Error::GridMismatch(format!("cannot subsample {}×{} grid by {step}", dom.nu, dom.nv)));
        }
        dom.nu = (dom.nu - 1) / step + 1;
        dom.nv = (dom.nv - 1) / step + 1;
        dom.base_index = (dom.base_index.0 / step, dom.base_index.1 / step);
        Ok(ConnectionFormGrid {
            dom,
            tau_u: self.tau_u.subsample(step),
            tau_v: self.tau_v.subsample(step),
        })
    }
}

/// `τ = −(𝔭+𝔱)∧d𝔱 + (𝔮+𝔣)∧d𝔣` with `d𝔣`, `d𝔱` by central differences.
pub fn tau_form(front: &FrontGrid) -> ConnectionFormGrid {
    let dom = front.dom;
    let split = AmbientSplit::standard();
    let s = Stencil::Second;
    let (fu, fv) = (diff(&front.f, &dom, Axis::U, s), diff(&front.f, &dom, Axis::V, s));
    let (tu, tv) = (diff(&front.t, &dom, Axis::U, s), diff(&front.t, &dom, Axis::V, s));
    let pt = front.t.map(|t| split.p + t.embed());
    let qf = front.f.map(|f| split.q + f.embed());
    let form = |dt: &Grid<SigVec>, df: &Grid<SigVec>| {
        Grid::from_fn(dom.nu, dom.nv, |i, j| {
            wedge_matrix(qf.get(i, j), df.get(i, j)) - wedge_matrix(pt.get(i, j), dt.get(i, j))
        })
    };
    ConnectionFormGrid {
        dom,
        tau_u: form(&tu, &fu),
        tau_v: form(&tv, &fv),
    }
}

/// `τ± = s± ∧ ⋆ds±` with `⋆du = du`, `⋆dv = −dv`.
pub fn tau_pm_form(sc: &SphereCongruenceGrid) -> (ConnectionFormGrid, ConnectionFormGrid) {
    let dom = sc.dom;
    let one = |s: &Grid<SigVec>| {
        let su = diff(s, &dom, Axis::U, Stencil::Second);
        let sv = diff(s, &dom, Axis::V, Stencil::Second);
        ConnectionFormGrid {
            dom,
            tau_u: s.map_indexed(|i, j, x| wedge_matrix(x, su.get(i, j))),
            tau_v: s.map_indexed(|i, j, x| -wedge_matrix(x, sv.get(i, j))),
        }
    };
    (one(&sc.s_plus), one(&sc.s_minus))
}

/// `‖τ⁺ + ½ d(s⁺∧s⁻) − τ‖` pointwise (max entry over both components).
pub fn alignment_residual(
    tau: &ConnectionFormGrid,
    tau_plus: &ConnectionFormGrid,
    sc: &SphereCongruenceGrid,
) -> Grid<f64> {
    let dom = sc.dom;
    let w = sc.s_plus.map_indexed(|i, j, sp| wedge_matrix(sp, sc.s_minus.get(i, j)));
    let wu = diff(&w, &dom, Axis::U, Stencil::Second);
    let wv = diff(&w, &dom, Axis::V, Stencil::Second);
    Grid::from_fn(dom.nu, dom.nv, |i, j| {
        let ru = tau_plus.tau_u.get(i, j) + wu.get(i, j) * 0.5 - tau.tau_u.get(i, j);
        let rv = tau_plus.tau_v.get(i, j) + wv.get(i, j) * 0.5 - tau.tau_v.get(i, j);
        ru.amax().max(rv.amax())
    })
}

fn require_base(fg: &FrameGrid) -> Result<()> {
    if fg.lambda != 0.0 {
        return Err(Error::DegenerateConfiguration(
            "connection forms are built from the undeformed frame (lambda = 0)",
        ));
    }
    Ok(())
}

/// `(s₁, s₂, e₁, e₂)` at every node of a base frame.
fn frame_spheres(fg: &FrameGrid, phi: &HarmonicPotential) -> Grid<[SigVec; 4]> {
    let split = AmbientSplit::standard();
    let dom = fg.dom;
    Grid::from_fn(dom.nu, dom.nv, |i, j| {
        let fr = fg.frame(i, j);
        let (s1, s2) = spheres(phi.value(dom.u(i), dom.v(j)), &fr.front(), &fr.normal(), &split);
        [s1, s2, fr.e1.embed(), fr.e2.embed()]
    })
}

/// `τ` from the structure equations of the base frame:
/// `τ_u = s₂ ∧ e₁`, `τ_v = −s₁ ∧ e₂`.
///
/// Uses no differentiation, so its accuracy is that of the frame integration.
pub fn tau_from_frame(fg: &FrameGrid, phi: &HarmonicPotential) -> Result<ConnectionFormGrid> {
    require_base(fg)?;
    let sp = frame_spheres(fg, phi);
    Ok(ConnectionFormGrid {
        dom: fg.dom,
        tau_u: sp.map(|[_, s2, e1, _]| wedge_matrix(s2, e1)),
        tau_v: sp.map(|[s1, _, _, e2]| -wedge_matrix(s1, e2)),
    })
}

/// `τ⁺ = s⁺∧e₁ du − s⁺∧e₂ dv`, `τ⁻ = −s⁻∧e₁ du − s⁻∧e₂ dv` from the base frame.
pub fn tau_pm_from_frame(
    fg: &FrameGrid,
    phi: &HarmonicPotential,
) -> Result<(ConnectionFormGrid, ConnectionFormGrid)> {
    require_base(fg)?;
    let sp = frame_spheres(fg, phi);
    let plus = ConnectionFormGrid {
        dom: fg.dom,
        tau_u: sp.map(|[s1, s2, e1, _]| wedge_matrix(&(*s1 + *s2), e1)),
        tau_v: sp.map(|[s1, s2, _, e2]| -wedge_matrix(&(*s1 + *s2), e2)),
    };
    let minus = ConnectionFormGrid {
        dom: fg.dom,
        tau_u: sp.map(|[s1, s2, e1, _]| -wedge_matrix(&(*s1 - *s2), e1)),
        tau_v: sp.map(|[s1, s2, _, e2]| -wedge_matrix(&(*s1 - *s2), e2)),
    };
    Ok((plus, minus))
}

/// Recovers `(𝔣, 𝔱)` from the isothermic congruences and two fixed null
/// vectors `q±`:
/// `𝔣 = −(q⁺/2 + s⁺/⟨s⁺,q⁻⟩) + (q⁻/2 + s⁻/⟨s⁻,q⁺⟩)`,
/// `𝔱 = −(q⁺/2 + s⁺/⟨s⁺,q⁻⟩) − (q⁻/2 + s⁻/⟨s⁻,q⁺⟩)`.
///
/// `q±` are first rescaled by a common factor so that `⟨q⁺, q⁻⟩ = −2`
/// (with a sign flip of `q⁻` if the product is positive). The result is
/// invariant under pointwise rescaling of `s±`. The output is read in the
/// R^{3,1} block, so `q±` are expected to span `{𝔭, 𝔮}`.
pub fn reconstruct_front(
    sc: &SphereCongruenceGrid,
    qplus: &SigVec,
    qminus: &SigVec,
) -> Result<FrontGrid> {
    let (qp, qm) = (qplus.embed(), qminus.embed());
    let product = qp.dot(&qm);
    let scale = qp.euclid_norm() * qm.euclid_norm();
    if !(product.abs() > 1e-12 * scale) {
        return Err(Error::ContactSpanDegenerate { product });
    }
    let alpha = (2.0 / product.abs()).sqrt();
    let qp = qp * alpha;
    let qm = qm * (alpha * if product > 0.0 { -1.0 } else { 1.0 });

    let dom = sc.dom;
    let mut first = None;
    let mut count = 0;
    let mut brackets = Vec::with_capacity(dom.len());
    for i in 0..dom.nu {
        for j in 0..dom.nv {
            let (sp, sm) = (sc.s_plus.get(i, j), sc.s_minus.get(i, j));
            let (dp, dm) = (sp.dot(&qm), sm.dot(&qp));
            let bad = |d: f64, s: &SigVec| !(d.abs() > POINT_SPHERE_TOL * s.euclid_norm() * 2.0);
            if bad(dp, sp) || bad(dm, sm) {
                count += 1;
                first.get_or_insert((i, j));
                brackets.push((SigVec::zero(qp.signature()), SigVec::zero(qp.signature())));
                continue;
            }
            let a = qp * 0.5 + *sp * (1.0 / dp);
            let b = qm * 0.5 + *sm * (1.0 / dm);
            brackets.push((a, b));
        }
    }
    if let Some((i, j)) = first {
        return Err(Error::PointSphereEncountered { i, j, count });
    }
    let f = Grid::from_vec(dom.nu, dom.nv, brackets.iter().map(|(a, b)| (*b - *a).project_r31()).collect());
    let t = Grid::from_vec(dom.nu, dom.nv, brackets.iter().map(|(a, b)| (-*a - *b).project_r31()).collect());
    Ok(front_from_samples(sc.lambda, dom, f, t, Stencil::Fourth))
}
