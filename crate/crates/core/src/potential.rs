//! Curvature-line potentials φ(u, v) with closed-form derivatives.
//!
//! Flat fronts in curvature-line coordinates with metric
//! `cosh²φ du² + sinh²φ dv²` are governed by a single function φ whose
//! integrability condition is `φ_uu + φ_vv = 0`. A potential is a sum of
//! terms; admissibility is decided by evaluating the Laplacian, so
//! individually non-harmonic terms that cancel (e.g. `u² − v²` written as two
//! monomials) are accepted.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridDomain;

/// Relative Laplacian residual above which a potential is rejected.
pub const HARMONIC_TOL: f64 = 1e-12;

/// `|φ|` beyond which `e^{|φ|}` is considered to overflow the frame system.
pub const OVERFLOW_LIMIT: f64 = 700.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Term {
    /// `c`
    Constant { c: f64 },
    /// `a·u`
    LinearU { a: f64 },
    /// `a·v`
    LinearV { a: f64 },
    /// `a·Re((u + iv)^n)`
    RePoly { n: u32, a: f64 },
    /// `a·Im((u + iv)^n)`
    ImPoly { n: u32, a: f64 },
    /// `a·e^{ku·u}·cos(kv·v)`; harmonic iff `|ku| = |kv|`.
    ExpCos { a: f64, ku: f64, kv: f64 },
    /// `a·e^{ku·u}·sin(kv·v)`; harmonic iff `|ku| = |kv|`.
    ExpSin { a: f64, ku: f64, kv: f64 },
    /// `a·u^pu·v^pv`; harmonic only in combination with other terms.
    Monomial { a: f64, pu: u32, pv: u32 },
}

/// φ and its partial derivatives up to second order at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PotentialJet {
    pub phi: f64,
    pub phi_u: f64,
    pub phi_v: f64,
    pub phi_uu: f64,
    pub phi_uv: f64,
    pub phi_vv: f64,
}

impl PotentialJet {
    pub fn laplacian(&self) -> f64 {
        self.phi_uu + self.phi_vv
    }

    /// Laplacian relative to the size of the second derivatives entering it.
    pub fn harmonic_residual(&self) -> f64 {
        self.laplacian().abs() / (1.0 + self.phi_uu.abs() + self.phi_vv.abs())
    }
}

impl std::ops::AddAssign for PotentialJet {
    fn add_assign(&mut self, o: Self) {
        self.phi += o.phi;
        self.phi_u += o.phi_u;
        self.phi_v += o.phi_v;
        self.phi_uu += o.phi_uu;
        self.phi_uv += o.phi_uv;
        self.phi_vv += o.phi_vv;
    }
}

/// `d`-th derivative of `x^k`.
fn dpow(x: f64, k: u32, d: u32) -> f64 {
    if d > k {
        return 0.0;
    }
    let coeff: f64 = (0..d).map(|m| (k - m) as f64).product();
    coeff * x.powi((k - d) as i32)
}

fn zpow(z: Complex64, k: u32, d: u32) -> Complex64 {
    if d > k {
        return Complex64::new(0.0, 0.0);
    }
    let coeff: f64 = (0..d).map(|m| (k - m) as f64).product();
    z.powu(k - d) * coeff
}

impl Term {
    pub fn jet(&self, u: f64, v: f64) -> PotentialJet {
        match *self {
            Term::Constant { c } => PotentialJet {
                phi: c,
                ..Default::default()
            },
            Term::LinearU { a } => PotentialJet {
                phi: a * u,
                phi_u: a,
                ..Default::default()
            },
            Term::LinearV { a } => PotentialJet {
                phi: a * v,
                phi_v: a,
                ..Default::default()
            },
            Term::RePoly { n, a } => {
                let z = Complex64::new(u, v);
                let (f, f1, f2) = (zpow(z, n, 0), zpow(z, n, 1), zpow(z, n, 2));
                PotentialJet {
                    phi: a * f.re,
                    phi_u: a * f1.re,
                    phi_v: -a * f1.im,
                    phi_uu: a * f2.re,
                    phi_uv: -a * f2.im,
                    phi_vv: -a * f2.re,
                }
            }
            Term::ImPoly { n, a } => {
                let z = Complex64::new(u, v);
                let (f, f1, f2) = (zpow(z, n, 0), zpow(z, n, 1), zpow(z, n, 2));
                PotentialJet {
                    phi: a * f.im,
                    phi_u: a * f1.im,
                    phi_v: a * f1.re,
                    phi_uu: a * f2.im,
                    phi_uv: a * f2.re,
                    phi_vv: -a * f2.im,
                }
            }
            Term::ExpCos { a, ku, kv } => {
                let e = a * (ku * u).exp();
                let (c, s) = ((kv * v).cos(), (kv * v).sin());
                PotentialJet {
                    phi: e * c,
                    phi_u: ku * e * c,
                    phi_v: -kv * e * s,
                    phi_uu: ku * ku * e * c,
                    phi_uv: -ku * kv * e * s,
                    phi_vv: -kv * kv * e * c,
                }
            }
            Term::ExpSin { a, ku, kv } => {
                let e = a * (ku * u).exp();
                let (c, s) = ((kv * v).cos(), (kv * v).sin());
                PotentialJet {
                    phi: e * s,
                    phi_u: ku * e * s,
                    phi_v: kv * e * c,
                    phi_uu: ku * ku * e * s,
                    phi_uv: ku * kv * e * c,
                    phi_vv: -kv * kv * e * s,
                }
            }
            Term::Monomial { a, pu, pv } => PotentialJet {
                phi: a * dpow(u, pu, 0) * dpow(v, pv, 0),
                phi_u: a * dpow(u, pu, 1) * dpow(v, pv, 0),
                phi_v: a * dpow(u, pu, 0) * dpow(v, pv, 1),
                phi_uu: a * dpow(u, pu, 2) * dpow(v, pv, 0),
                phi_uv: a * dpow(u, pu, 1) * dpow(v, pv, 1),
                phi_vv: a * dpow(u, pu, 0) * dpow(v, pv, 2),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        let ok = match *self {
            Term::Constant { c } => finite(&[c]),
            Term::LinearU { a } | Term::LinearV { a } => finite(&[a]),
            Term::RePoly { a, .. } | Term::ImPoly { a, .. } => finite(&[a]),
            Term::ExpCos { a, ku, kv } | Term::ExpSin { a, ku, kv } => finite(&[a, ku, kv]),
            Term::Monomial { a, .. } => finite(&[a]),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidTerm(format!("non-finite coefficient in {self:?}")))
        }
    }
}

/// φ as a finite sum of terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct HarmonicPotential {
    pub terms: Vec<Term>,
}

impl HarmonicPotential {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            t.validate()?;
        }
        Ok(HarmonicPotential { terms })
    }

    /// `φ = u + 0.3 (u² − v²)`, the reference potential of the validation suite.
    pub fn reference() -> Self {
        HarmonicPotential {
            terms: vec![Term::LinearU { a: 1.0 }, Term::RePoly { n: 2, a: 0.3 }],
        }
    }

    pub fn constant(c: f64) -> Self {
        HarmonicPotential {
            terms: vec![Term::Constant { c }],
        }
    }

    /// `φ + c`.
    pub fn offset(&self, c: f64) -> Self {
        let mut terms = self.terms.clone();
        terms.push(Term::Constant { c });
        HarmonicPotential { terms }
    }

    /// Unchecked evaluation of the 2-jet.
    pub fn jet(&self, u: f64, v: f64) -> PotentialJet {
        let mut j = PotentialJet::default();
        for t in &self.terms {
            j += t.jet(u, v);
        }
        j
    }

    #[inline]
    pub fn value(&self, u: f64, v: f64) -> f64 {
        self.terms.iter().map(|t| t.jet(u, v).phi).sum()
    }

    /// Evaluates the jet and rejects the point if the Laplacian does not
    /// vanish there.
    pub fn eval(&self, u: f64, v: f64) -> Result<(PotentialJet, f64)> {
        let j = self.jet(u, v);
        let r = j.harmonic_residual();
        if !(r <= HARMONIC_TOL) {
            return Err(Error::NotHarmonic {
                u,
                v,
                residual: j.laplacian(),
            });
        }
        Ok((j, r))
    }

    /// Checks harmonicity at every node and half-step node of `dom`.
    pub fn check_admissible(&self, dom: &GridDomain) -> Result<()> {
        let fine = dom.refined();
        for i in 0..fine.nu {
            for j in 0..fine.nv {
                self.eval(fine.u(i), fine.v(j))?;
            }
        }
        Ok(())
    }

    /// Rejects potentials whose exponential overflows on `dom` (including the
    /// half-step nodes visited by the integrator).
    pub fn check_overflow(&self, dom: &GridDomain) -> Result<()> {
        let fine = dom.refined();
        for i in 0..fine.nu {
            for j in 0..fine.nv {
                let (u, v) = (fine.u(i), fine.v(j));
                let value = self.value(u, v);
                if !(value.abs() <= OVERFLOW_LIMIT) {
                    return Err(Error::PotentialOverflow { u, v, value });
                }
            }
        }
        Ok(())
    }
}

/// Evaluates `(φ, φ_u, φ_v, φ_uu, φ_uv, φ_vv)` and the harmonic residual.
pub fn eval_potential(phi: &HarmonicPotential, u: f64, v: f64) -> Result<(PotentialJet, f64)> {
    phi.eval(u, v)
}
