//! Flat fronts in H³ from a harmonic potential.
//!
//! The moving frame `(e₁, e₂, ĥ⁺, ĥ⁻)` in R^{3,1} is integrated from the
//! base node with RK4, first along the base row in `u`, then along every
//! column in `v`. The front and its unit normal are recovered as
//! `𝔣 = (ĥ⁺ − ĥ⁻)/2`, `𝔱 = (ĥ⁺ + ĥ⁻)/2`.

use std::ops::{Add, Mul};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::SigVec;
use crate::grid::{diff, Axis, Grid, GridDomain, Stencil};
use crate::ode::rk4_step;
use crate::potential::HarmonicPotential;

/// Threshold on `min(√E, √G)` below which a node is flagged singular.
pub const SINGULAR_EPS: f64 = 1e-3;

/// `1 − 2λ`; the deformation degenerates where it vanishes.
pub fn lambda_factor(lambda: f64) -> Result<f64> {
    let c = 1.0 - 2.0 * lambda;
    if !lambda.is_finite() || c.abs() < 1e-12 {
        return Err(Error::DegenerateParameter { lambda });
    }
    Ok(c)
}

/// Normalised frame at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub e1: SigVec,
    pub e2: SigVec,
    pub hhat_plus: SigVec,
    pub hhat_minus: SigVec,
}

impl Frame {
    pub fn front(&self) -> SigVec {
        (self.hhat_plus - self.hhat_minus) * 0.5
    }

    pub fn normal(&self) -> SigVec {
        (self.hhat_plus + self.hhat_minus) * 0.5
    }

    /// Largest deviation from the orthonormality relations of the frame.
    pub fn invariant_violation(&self) -> f64 {
        let (e1, e2, hp, hm) = (&self.e1, &self.e2, &self.hhat_plus, &self.hhat_minus);
        [
            e1.dot(e1) - 1.0,
            e2.dot(e2) - 1.0,
            e1.dot(e2),
            hp.dot(hp),
            hm.dot(hm),
            hp.dot(hm) - 2.0,
            e1.dot(hp),
            e1.dot(hm),
            e2.dot(hp),
            e2.dot(hm),
        ]
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Componentwise distance between two frames.
    pub fn distance(&self, other: &Frame) -> f64 {
        [
            self.e1 - other.e1,
            self.e2 - other.e2,
            self.hhat_plus - other.hhat_plus,
            self.hhat_minus - other.hhat_minus,
        ]
        .iter()
        .flat_map(|d| d.coords().iter().copied())
        .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Re-orthonormalises the tetrad `(𝔣, 𝔱, e₁, e₂)` in that order.
    pub fn projected(&self) -> Frame {
        let mut f = self.front();
        f = f * (1.0 / (-f.dot(&f)).sqrt());
        let mut t = self.normal();
        t = t + f * t.dot(&f);
        t = t * (1.0 / t.dot(&t).sqrt());
        let mut e1 = self.e1 + f * self.e1.dot(&f) - t * self.e1.dot(&t);
        e1 = e1 * (1.0 / e1.dot(&e1).sqrt());
        let mut e2 = self.e2 + f * self.e2.dot(&f) - t * self.e2.dot(&t) - e1 * self.e2.dot(&e1);
        e2 = e2 * (1.0 / e2.dot(&e2).sqrt());
        Frame {
            e1,
            e2,
            hhat_plus: t + f,
            hhat_minus: t - f,
        }
    }
}

/// Canonical frame at the base node: `𝔣₀ = y₀`, `𝔱₀ = y₃`, `e₁ = y₁`,
/// `e₂ = y₂`, `ĥ± = 𝔱₀ ± 𝔣₀`.
pub fn initial_frame(lambda: f64) -> Result<Frame> {
    lambda_factor(lambda)?;
    let (f0, t0) = (SigVec::y(0), SigVec::y(3));
    Ok(Frame {
        e1: SigVec::y(1),
        e2: SigVec::y(2),
        hhat_plus: t0 + f0,
        hhat_minus: t0 - f0,
    })
}

/// Integration state `(e₁, e₂, k⁺, k⁻)` with `k± = h±/(1 − 2λ)`.
///
/// In these variables the system has the single real coefficient `c = 1 − 2λ`
/// on both sides of `λ = 1/2`.
#[derive(Clone, Copy, Debug)]
struct State([SigVec; 4]);

impl Add for State {
    type Output = State;
    fn add(self, o: State) -> State {
        State([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }
}

impl Mul<f64> for State {
    type Output = State;
    fn mul(self, s: f64) -> State {
        State([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }
}

#[derive(Clone, Copy, Debug)]
struct Scaling {
    c: f64,
    sigma: f64,
    sign: f64,
}

impl Scaling {
    fn new(lambda: f64) -> Result<Self> {
        let c = lambda_factor(lambda)?;
        Ok(Scaling {
            c,
            sigma: c.abs().sqrt(),
            sign: c.signum(),
        })
    }

    fn to_state(self, fr: &Frame) -> State {
        State([
            fr.e1,
            fr.e2,
            fr.hhat_plus * (self.sign / self.sigma),
            fr.hhat_minus * (1.0 / self.sigma),
        ])
    }

    fn to_frame(self, s: &State) -> Frame {
        Frame {
            e1: s.0[0],
            e2: s.0[1],
            hhat_plus: s.0[2] * (self.sign * self.sigma),
            hhat_minus: s.0[3] * self.sigma,
        }
    }
}

fn rhs(phi: &HarmonicPotential, c: f64, u: f64, v: f64, axis: Axis, s: &State) -> State {
    let j = phi.jet(u, v);
    let (ep, em) = (j.phi.exp(), (-j.phi).exp());
    let [e1, e2, kp, km] = s.0;
    match axis {
        Axis::U => State([
            e2 * j.phi_v + (kp * ep - km * em) * (0.5 * c),
            e1 * (-j.phi_v),
            e1 * em,
            e1 * (-ep),
        ]),
        Axis::V => State([
            e2 * (-j.phi_u),
            e1 * j.phi_u - (kp * ep + km * em) * (0.5 * c),
            e2 * em,
            e2 * ep,
        ]),
    }
}

/// Knobs for [`integrate_frame_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameOptions {
    /// RK4 steps per grid step.
    pub substeps: usize,
    /// Re-orthonormalise after every grid step.
    pub project: bool,
}

impl Default for FrameOptions {
    fn default() -> Self {
        FrameOptions {
            substeps: 1,
            project: false,
        }
    }
}

struct Stepper<'a> {
    phi: &'a HarmonicPotential,
    scale: Scaling,
    opts: FrameOptions,
}

impl Stepper<'_> {
    /// Advances a frame from `(u, v)` by `h` along `axis`.
    fn step(&self, fr: &Frame, u: f64, v: f64, axis: Axis, h: f64) -> Frame {
        let n = self.opts.substeps.max(1);
        let dh = h / n as f64;
        let c = self.scale.c;
        let mut s = self.scale.to_state(fr);
        for k in 0..n {
            let x0 = k as f64 * dh;
            s = rk4_step(&s, dh, |stage, y| {
                let x = x0 + stage.offset() * dh;
                match axis {
                    Axis::U => rhs(self.phi, c, u + x, v, axis, y),
                    Axis::V => rhs(self.phi, c, u, v + x, axis, y),
                }
            });
        }
        let out = self.scale.to_frame(&s);
        if self.opts.project {
            out.projected()
        } else {
            out
        }
    }

    /// Frames along one line of the grid, seeded at index `k0`.
    fn line(&self, seed: Frame, dom: &GridDomain, fixed: usize, k0: usize, axis: Axis) -> Vec<Frame> {
        let (n, h) = match axis {
            Axis::U => (dom.nu, dom.h_u()),
            Axis::V => (dom.nv, dom.h_v()),
        };
        let at = |k: usize| match axis {
            Axis::U => (dom.u(k), dom.v(fixed)),
            Axis::V => (dom.u(fixed), dom.v(k)),
        };
        let mut out = vec![seed; n];
        for k in k0 + 1..n {
            let (u, v) = at(k - 1);
            out[k] = self.step(&out[k - 1], u, v, axis, h);
        }
        for k in (0..k0).rev() {
            let (u, v) = at(k + 1);
            out[k] = self.step(&out[k + 1], u, v, axis, -h);
        }
        out
    }

    /// Frame at `(i, j)` reached by going along `v` first, then `u`.
    fn v_then_u(&self, seed: Frame, dom: &GridDomain, i: usize, j: usize) -> Frame {
        let (i0, j0) = dom.base_index;
        let col = self.line(seed, dom, i0, j0, Axis::V);
        self.line(col[j], dom, j, i0, Axis::U)[i]
    }
}

/// Frame fields over a grid for one value of λ.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameGrid {
    pub lambda: f64,
    pub dom: GridDomain,
    pub e1: Grid<SigVec>,
    pub e2: Grid<SigVec>,
    pub hhat_plus: Grid<SigVec>,
    pub hhat_minus: Grid<SigVec>,
    /// Largest distance, over the four corners, between the stored frame
    /// (`u` then `v`) and the frame reached along `v` then `u`.
    pub path_residual: f64,
}

impl FrameGrid {
    pub fn frame(&self, i: usize, j: usize) -> Frame {
        Frame {
            e1: *self.e1.get(i, j),
            e2: *self.e2.get(i, j),
            hhat_plus: *self.hhat_plus.get(i, j),
            hhat_minus: *self.hhat_minus.get(i, j),
        }
    }

    /// Maximum of [`Frame::invariant_violation`] over the grid.
    pub fn invariant_violation(&self) -> f64 {
        (0..self.dom.nu)
            .flat_map(|i| (0..self.dom.nv).map(move |j| (i, j)))
            .map(|(i, j)| self.frame(i, j).invariant_violation())
            .fold(0.0, f64::max)
    }

    /// Every `step`-th node, e.g. to recover the coarse grid from a frame
    /// integrated on [`GridDomain::refined`].
    pub fn subsample(&self, step: usize) -> Result<FrameGrid> {
        let mut dom = self.dom;
        let ok = |n: usize| n == 1 || (n - 1).is_multiple_of(step);
        if step == 0 || !ok(dom.nu) || !ok(dom.nv) || !dom.base_index.0.is_multiple_of(step) || !dom.base_index.1.is_multiple_of(step) {
            return Err(Error::GridMismatch(format!("cannot subsample {}×{} grid by {step}", dom.nu, dom.nv)));
        }
        dom.nu = (dom.nu - 1) / step + 1;
        dom.nv = (dom.nv - 1) / step + 1;
        dom.base_index = (dom.base_index.0 / step, dom.base_index.1 / step);
        Ok(FrameGrid {
            lambda: self.lambda,
            dom,
            e1: self.e1.subsample(step),
            e2: self.e2.subsample(step),
            hhat_plus: self.hhat_plus.subsample(step),
            hhat_minus: self.hhat_minus.subsample(step),
            path_residual: self.path_residual,
        })
    }
}

/// Integrates the frame system with default options.
pub fn integrate_frame(phi: &HarmonicPotential, dom: &GridDomain, lambda: f64) -> Result<FrameGrid> {
    integrate_frame_with(phi, dom, lambda, &FrameOptions::default())
}

/// Integrates the frame system after checking that `phi` is harmonic and
/// does not overflow on `dom`.
pub fn integrate_frame_with(
    phi: &HarmonicPotential,
    dom: &GridDomain,
    lambda: f64,
    opts: &FrameOptions,
) -> Result<FrameGrid> {
    lambda_factor(lambda)?;
    dom.validate()?;
    phi.check_admissible(dom)?;
    integrate_frame_unchecked(phi, dom, lambda, opts)
}

/// As [`integrate_frame_with`] but without the harmonicity check, so that
/// the path residual of a non-harmonic probe can be measured.
pub fn integrate_frame_unchecked(
    phi: &HarmonicPotential,
    dom: &GridDomain,
    lambda: f64,
    opts: &FrameOptions,
) -> Result<FrameGrid> {
    let scale = Scaling::new(lambda)?;
    dom.validate()?;
    phi.check_overflow(dom)?;
    let st = Stepper { phi, scale, opts: *opts };
    let seed = initial_frame(lambda)?;
    let (i0, j0) = dom.base_index;

    let row = st.line(seed, dom, j0, i0, Axis::U);
    let columns: Vec<Vec<Frame>> = row
        .par_iter()
        .enumerate()
        .map(|(i, fr)| st.line(*fr, dom, i, j0, Axis::V))
        .collect();

    let pick = |sel: fn(&Frame) -> SigVec| Grid::from_fn(dom.nu, dom.nv, |i, j| sel(&columns[i][j]));
    let mut fg = FrameGrid {
        lambda,
        dom: *dom,
        e1: pick(|f| f.e1),
        e2: pick(|f| f.e2),
        hhat_plus: pick(|f| f.hhat_plus),
        hhat_minus: pick(|f| f.hhat_minus),
        path_residual: 0.0,
    };

    if let Some(((i, j), _)) = fg.hhat_plus.indexed().find(|(ij, _)| {
        let f = fg.frame(ij.0, ij.1);
        !(f.e1.is_finite() && f.e2.is_finite() && f.hhat_plus.is_finite() && f.hhat_minus.is_finite())
    }) {
        let (u, v) = (dom.u(i), dom.v(j));
        return Err(Error::PotentialOverflow { u, v, value: phi.value(u, v) });
    }

    let corners = [(0, 0), (0, dom.nv - 1), (dom.nu - 1, 0), (dom.nu - 1, dom.nv - 1)];
    fg.path_residual = corners
        .iter()
        .map(|&(i, j)| st.v_then_u(seed, dom, i, j).distance(&fg.frame(i, j)))
        .fold(0.0, f64::max);
    Ok(fg)
}

/// Sampled front with metric and curvature data.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontGrid {
    pub lambda: f64,
    pub dom: GridDomain,
    pub f: Grid<SigVec>,
    pub t: Grid<SigVec>,
    /// `E = ⟨𝔣_u, 𝔣_u⟩`.
    pub metric_e: Grid<f64>,
    /// `G = ⟨𝔣_v, 𝔣_v⟩`.
    pub metric_g: Grid<f64>,
    /// `NaN` at singular nodes.
    pub kappa1: Grid<f64>,
    pub kappa2: Grid<f64>,
    pub singular: Grid<bool>,
    pub stencil: Stencil,
}

impl FrontGrid {
    /// Max of `||𝔣|² + 1|`, `||𝔱|² − 1|`, `|⟨𝔣, 𝔱⟩|`.
    pub fn invariant_violation(&self) -> f64 {
        self.f
            .iter()
            .zip(self.t.iter())
            .map(|(f, t)| (f.dot(f) + 1.0).abs().max((t.dot(t) - 1.0).abs()).max(f.dot(t).abs()))
            .fold(0.0, f64::max)
    }

    /// `max |κ₁κ₂ − 1|` over nodes where `min(√E, √G) > threshold`.
    pub fn flatness_defect(&self, threshold: f64) -> f64 {
        self.masked(threshold)
            .map(|k| (self.kappa1.as_slice()[k] * self.kappa2.as_slice()[k] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Flat indices of nodes with `min(√E, √G) > threshold`.
    pub fn masked(&self, threshold: f64) -> impl Iterator<Item = usize> + '_ {
        let e = self.metric_e.as_slice();
        let g = self.metric_g.as_slice();
        (0..e.len()).filter(move |&k| e[k].max(0.0).sqrt().min(g[k].max(0.0).sqrt()) > threshold)
    }

    pub fn singular_count(&self) -> usize {
        self.singular.iter().filter(|s| **s).count()
    }
}

/// `𝔣 = (ĥ⁺ − ĥ⁻)/2`, `𝔱 = (ĥ⁺ + ĥ⁻)/2`, with metric and curvatures from
/// fourth-order differences.
pub fn front_from_frame(fg: &FrameGrid) -> FrontGrid {
    front_from_frame_with(fg, Stencil::Fourth)
}

pub fn front_from_frame_with(fg: &FrameGrid, stencil: Stencil) -> FrontGrid {
    let (nu, nv) = (fg.dom.nu, fg.dom.nv);
    let f = Grid::from_fn(nu, nv, |i, j| fg.frame(i, j).front());
    let t = Grid::from_fn(nu, nv, |i, j| fg.frame(i, j).normal());
    front_from_samples(fg.lambda, fg.dom, f, t, stencil)
}

/// Builds a front from sampled `𝔣`, `𝔱` and fills metric and curvatures.
pub fn front_from_samples(lambda: f64, dom: GridDomain, f: Grid<SigVec>, t: Grid<SigVec>, stencil: Stencil) -> FrontGrid {
    let (nu, nv) = (dom.nu, dom.nv);
    let nan = Grid::filled(nu, nv, f64::NAN);
    let front = FrontGrid {
        lambda,
        dom,
        f,
        t,
        metric_e: nan.clone(),
        metric_g: nan.clone(),
        kappa1: nan.clone(),
        kappa2: nan,
        singular: Grid::filled(nu, nv, false),
        stencil,
    };
    metric_and_curvatures(front, stencil)
}

/// Fills `E`, `G`, `κ₁ = −⟨𝔱_u, 𝔣_u⟩/E`, `κ₂ = −⟨𝔱_v, 𝔣_v⟩/G` and the
/// singular flags from finite differences of `𝔣` and `𝔱`.
pub fn metric_and_curvatures(mut front: FrontGrid, stencil: Stencil) -> FrontGrid {
    let dom = front.dom;
    let fu = diff(&front.f, &dom, Axis::U, stencil);
    let fv = diff(&front.f, &dom, Axis::V, stencil);
    let tu = diff(&front.t, &dom, Axis::U, stencil);
    let tv = diff(&front.t, &dom, Axis::V, stencil);
    let (nu, nv) = (dom.nu, dom.nv);
    front.metric_e = Grid::from_fn(nu, nv, |i, j| fu.get(i, j).dot(fu.get(i, j)));
    front.metric_g = Grid::from_fn(nu, nv, |i, j| fv.get(i, j).dot(fv.get(i, j)));
    front.singular = Grid::from_fn(nu, nv, |i, j| {
        let e = front.metric_e.get(i, j).max(0.0).sqrt();
        let g = front.metric_g.get(i, j).max(0.0).sqrt();
        !(e.min(g) >= SINGULAR_EPS)
    });
    front.kappa1 = Grid::from_fn(nu, nv, |i, j| {
        if *front.singular.get(i, j) {
            f64::NAN
        } else {
            -tu.get(i, j).dot(fu.get(i, j)) / front.metric_e.get(i, j)
        }
    });
    front.kappa2 = Grid::from_fn(nu, nv, |i, j| {
        if *front.singular.get(i, j) {
            f64::NAN
        } else {
            -tv.get(i, j).dot(fv.get(i, j)) / front.metric_g.get(i, j)
        }
    });
    front.stencil = stencil;
    front
}

/// Parallel front at signed distance `t_param`:
/// `𝔣_t = cosh t 𝔣 + sinh t 𝔱`, `𝔱_t = sinh t 𝔣 + cosh t 𝔱`.
pub fn parallel_front(front: &FrontGrid, t_param: f64) -> FrontGrid {
    let (ch, sh) = (t_param.cosh(), t_param.sinh());
    let f = Grid::from_fn(front.dom.nu, front.dom.nv, |i, j| {
        *front.f.get(i, j) * ch + *front.t.get(i, j) * sh
    });
    let t = Grid::from_fn(front.dom.nu, front.dom.nv, |i, j| {
        *front.f.get(i, j) * sh + *front.t.get(i, j) * ch
    });
    front_from_samples(front.lambda, front.dom, f, t, front.stencil)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Term;

    fn dom(n: usize) -> GridDomain {
        GridDomain::square(-1.0, 1.0, n).unwrap()
    }

    #[test]
    fn initial_frame_is_canonical() {
        let fr = initial_frame(0.0).unwrap();
        assert_eq!(fr.hhat_plus.dot(&fr.hhat_minus), 2.0);
        assert_eq!(fr.hhat_plus.dot(&fr.hhat_plus), 0.0);
        assert_eq!(fr.invariant_violation(), 0.0);
        assert_eq!(fr.front(), SigVec::y(0));
        assert_eq!(fr.normal(), SigVec::y(3));
        assert!(matches!(initial_frame(0.5), Err(Error::DegenerateParameter { .. })));
    }

    #[test]
    fn linear_potential_keeps_invariants() {
        let phi = HarmonicPotential::new(vec![Term::LinearU { a: 1.0 }]).unwrap();
        let fg = integrate_frame(&phi, &dom(65), 0.0).unwrap();
        let pairing = fg
            .hhat_plus
            .iter()
            .zip(fg.hhat_minus.iter())
            .map(|(a, b)| (a.dot(b) - 2.0).abs())
            .fold(0.0, f64::max);
        assert!(pairing < 1e-8, "{pairing}");
        assert!(fg.invariant_violation() < 1e-7, "{}", fg.invariant_violation());
        assert!(fg.path_residual < 1e-8);
    }

    #[test]
    fn both_branches_are_normalised() {
        let phi = HarmonicPotential::reference();
        for &lambda in &[-1.0, 0.25, 0.75, 1.0] {
            let fg = integrate_frame(&phi, &dom(65), lambda).unwrap();
            assert!(fg.invariant_violation() < 1e-6, "λ={lambda}: {}", fg.invariant_violation());
            let front = front_from_frame(&fg);
            assert!(front.f.iter().all(|f| f.coords()[0] > 0.0));
        }
    }

    #[test]
    fn line_domain_integrates_along_v_only() {
        let phi = HarmonicPotential::reference();
        let viol = |n: usize| {
            let d = GridDomain::new((0.3, 0.3), (-1.0, 1.0), (1, n), (0, n / 2)).unwrap();
            integrate_frame(&phi, &d, 0.0).unwrap().invariant_violation()
        };
        let (a, b) = (viol(33), viol(65));
        assert!(b < 1e-8 && (a / b).log2() > 3.5, "{a:e} {b:e}");
    }

    #[test]
    fn non_harmonic_is_rejected() {
        let phi = HarmonicPotential::new(vec![Term::Monomial { a: 1.0, pu: 2, pv: 0 }]).unwrap();
        assert!(matches!(
            integrate_frame(&phi, &dom(9), 0.0),
            Err(Error::NotHarmonic { .. })
        ));
        // the unchecked path still runs but is not path independent
        let fg = integrate_frame_unchecked(&phi, &dom(17), 0.0, &FrameOptions::default()).unwrap();
        assert!(fg.path_residual > 1e-3);
    }

    #[test]
    fn overflow_is_reported() {
        let phi = HarmonicPotential::new(vec![Term::LinearU { a: 800.0 }]).unwrap();
        assert!(matches!(
            integrate_frame(&phi, &dom(9), 0.0),
            Err(Error::PotentialOverflow { .. })
        ));
    }

    #[test]
    fn constant_potential_metric() {
        let phi = HarmonicPotential::constant(1.0);
        let front = front_from_frame(&integrate_frame(&phi, &dom(65), 0.0).unwrap());
        let (i, j) = (32, 32);
        assert!((front.metric_e.get(i, j) - 1f64.cosh().powi(2)).abs() < 1e-6);
        assert!((front.metric_g.get(i, j) - 1f64.sinh().powi(2)).abs() < 1e-6);
        assert!((front.kappa1.get(i, j) - 1f64.tanh()).abs() < 1e-6);
        assert!((front.kappa1.get(i, j) * front.kappa2.get(i, j) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn linear_potential_is_singular_along_u_zero() {
        let phi = HarmonicPotential::new(vec![Term::LinearU { a: 1.0 }]).unwrap();
        let front = front_from_frame(&integrate_frame(&phi, &dom(65), 0.0).unwrap());
        for ((i, _), s) in front.singular.indexed() {
            assert_eq!(*s, i == 32, "row {i}");
        }
    }

    #[test]
    fn parallel_front_group_law() {
        let phi = HarmonicPotential::reference();
        let front = front_from_frame(&integrate_frame(&phi, &dom(17), 0.0).unwrap());
        let a = parallel_front(&parallel_front(&front, 0.2), -0.5);
        let b = parallel_front(&front, -0.3);
        for (x, y) in a.f.iter().zip(b.f.iter()) {
            assert!((*x - *y).euclid_norm() < 1e-12);
        }
        assert!(a.invariant_violation() < 1e-4, "{}", a.invariant_violation());
        let id = parallel_front(&front, 0.0);
        assert_eq!(id.f, front.f);
    }

    #[test]
    fn projection_restores_invariants() {
        let fr = initial_frame(0.0).unwrap();
        let noisy = Frame {
            e1: fr.e1 + SigVec::y(0) * 1e-3,
            e2: fr.e2 * 1.001,
            hhat_plus: fr.hhat_plus + SigVec::y(2) * 1e-3,
            hhat_minus: fr.hhat_minus,
        };
        assert!(noisy.invariant_violation() > 1e-4);
        assert!(noisy.projected().invariant_violation() < 1e-14);
    }
}
