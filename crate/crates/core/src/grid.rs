//! Rectangular curvature-line coordinate grids and finite differences.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::SigVec;

/// A rectangle `[u_min, u_max] × [v_min, v_max]` sampled at `nu × nv` nodes.
///
/// An axis with a single node must have `min == max` (a degenerate line
/// domain). `base_index` is where initial conditions are imposed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct GridDomain {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub nu: usize,
    pub nv: usize,
    pub base_index: (usize, usize),
}

impl GridDomain {
    pub fn new(
        (u_min, u_max): (f64, f64),
        (v_min, v_max): (f64, f64),
        (nu, nv): (usize, usize),
        base_index: (usize, usize),
    ) -> Result<Self> {
        let d = GridDomain {
            u_min,
            u_max,
            v_min,
            v_max,
            nu,
            nv,
            base_index,
        };
        d.validate()?;
        Ok(d)
    }

    /// `[lo, hi]²` with `n × n` nodes and the base point at the centre node.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new((lo, hi), (lo, hi), (n, n), ((n - 1) / 2, (n - 1) / 2))
    }

    pub fn validate(&self) -> Result<()> {
        let axis = |name: &str, lo: f64, hi: f64, n: usize| -> Result<()> {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidDomain(format!("{name} bounds must be finite")));
            }
            match n {
                0 => Err(Error::InvalidDomain(format!("{name}: need at least one node"))),
                1 if lo != hi => Err(Error::InvalidDomain(format!(
                    "{name}: a single node requires {name}_min == {name}_max"
                ))),
                1 => Ok(()),
                _ if hi <= lo => Err(Error::InvalidDomain(format!(
                    "{name}: step must be positive ({name}_max > {name}_min)"
                ))),
                _ => Ok(()),
            }
        };
        axis("u", self.u_min, self.u_max, self.nu)?;
        axis("v", self.v_min, self.v_max, self.nv)?;
        let (i0, j0) = self.base_index;
        if i0 >= self.nu || j0 >= self.nv {
            return Err(Error::InvalidDomain(format!(
                "base index ({i0}, {j0}) outside {}×{} grid",
                self.nu, self.nv
            )));
        }
        Ok(())
    }

    pub fn h_u(&self) -> f64 {
        if self.nu > 1 {
            (self.u_max - self.u_min) / (self.nu - 1) as f64
        } else {
            0.0
        }
    }

    pub fn h_v(&self) -> f64 {
        if self.nv > 1 {
            (self.v_max - self.v_min) / (self.nv - 1) as f64
        } else {
            0.0
        }
    }

    #[inline]
    pub fn u(&self, i: usize) -> f64 {
        if self.nu > 1 {
            self.u_min + (self.u_max - self.u_min) * (i as f64 / (self.nu - 1) as f64)
        } else {
            self.u_min
        }
    }

    #[inline]
    pub fn v(&self, j: usize) -> f64 {
        if self.nv > 1 {
            self.v_min + (self.v_max - self.v_min) * (j as f64 / (self.nv - 1) as f64)
        } else {
            self.v_min
        }
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same rectangle with every cell halved: `(2n − 1)` nodes per axis.
    /// Node `(i, j)` of `self` is node `(2i, 2j)` of the result.
    pub fn refined(&self) -> GridDomain {
        GridDomain {
            nu: 2 * self.nu - 1,
            nv: 2 * self.nv - 1,
            base_index: (2 * self.base_index.0, 2 * self.base_index.1),
            ..*self
        }
    }

    /// Inverse of [`GridDomain::refined`]; `None` unless the node counts and
    /// base index nest exactly.
    pub fn coarsened(&self) -> Option<GridDomain> {
        let ok = |n: usize| n >= 3 && (n - 1).is_multiple_of(2);
        if !ok(self.nu) || !ok(self.nv) || !self.base_index.0.is_multiple_of(2) || !self.base_index.1.is_multiple_of(2) {
            return None;
        }
        Some(GridDomain {
            nu: (self.nu - 1) / 2 + 1,
            nv: (self.nv - 1) / 2 + 1,
            base_index: (self.base_index.0 / 2, self.base_index.1 / 2),
            ..*self
        })
    }

    /// Swaps the roles of `u` and `v`.
    pub fn transposed(&self) -> GridDomain {
        GridDomain {
            u_min: self.v_min,
            u_max: self.v_max,
            v_min: self.u_min,
            v_max: self.u_max,
            nu: self.nv,
            nv: self.nu,
            base_index: (self.base_index.1, self.base_index.0),
        }
    }

    /// Nodes at least `margin` steps away from every edge.
    pub fn is_interior(&self, i: usize, j: usize, margin: usize) -> bool {
        i >= margin && j >= margin && i + margin < self.nu && j + margin < self.nv
    }

    pub fn same_nodes(&self, other: &GridDomain) -> bool {
        self.nu == other.nu
            && self.nv == other.nv
            && self.u_min == other.u_min
            && self.u_max == other.u_max
            && self.v_min == other.v_min
            && self.v_max == other.v_max
    }
}

/// Row-major `nu × nv` array of samples; `(i, j)` is the node at `(u_i, v_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    nu: usize,
    nv: usize,
    data: Vec<T>,
}

impl<T> Grid<T> {
    pub fn from_vec(nu: usize, nv: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), nu * nv, "grid data length");
        Grid { nu, nv, data }
    }

    pub fn from_fn(nu: usize, nv: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                data.push(f(i, j));
            }
        }
        Grid { nu, nv, data }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nu, self.nv)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.nv + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.nv + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    /// `((i, j), value)` in row-major order.
    pub fn indexed(&self) -> impl Iterator<Item = ((usize, usize), &T)> {
        let nv = self.nv;
        self.data.iter().enumerate().map(move |(k, x)| ((k / nv, k % nv), x))
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            nu: self.nu,
            nv: self.nv,
            data: self.data.iter().map(&mut f).collect(),
        }
    }

    pub fn map_indexed<U>(&self, mut f: impl FnMut(usize, usize, &T) -> U) -> Grid<U> {
        Grid::from_fn(self.nu, self.nv, |i, j| f(i, j, self.get(i, j)))
    }
}

impl<T: Clone> Grid<T> {
    pub fn filled(nu: usize, nv: usize, value: T) -> Self {
        Grid {
            nu,
            nv,
            data: vec![value; nu * nv],
        }
    }

    pub fn transposed(&self) -> Grid<T> {
        Grid::from_fn(self.nv, self.nu, |i, j| self.get(j, i).clone())
    }

    /// Every `step`-th node along both axes.
    pub fn subsample(&self, step: usize) -> Grid<T> {
        assert!(step >= 1);
        let nu = (self.nu - 1) / step + 1;
        let nv = (self.nv - 1) / step + 1;
        Grid::from_fn(nu, nv, |i, j| self.get(i * step, j * step).clone())
    }
}

/// Values that finite differences can act on.
pub trait Field: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl Field for f64 {}
impl Field for SigVec {}
impl Field for nalgebra::Matrix6<f64> {}

/// Finite-difference accuracy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stencil {
    /// Central 3-point interior, one-sided second-order at the edges.
    Second,
    /// Central 5-point interior, one-sided fourth-order near the edges.
    Fourth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    U,
    V,
}

fn diff_line<T: Field>(x: &[T], h: f64, stencil: Stencil) -> Vec<T> {
    let n = x.len();
    if n == 1 || h == 0.0 {
        return vec![x[0] * 0.0; n];
    }
    if n == 2 {
        let d = (x[1] - x[0]) * (1.0 / h);
        return vec![d, d];
    }
    let mut d = Vec::with_capacity(n);
    match stencil {
        Stencil::Fourth if n >= 5 => {
            let k = 1.0 / (12.0 * h);
            d.push((x[1] * 48.0 - x[0] * 25.0 - x[2] * 36.0 + x[3] * 16.0 - x[4] * 3.0) * k);
            d.push((x[2] * 18.0 - x[0] * 3.0 - x[1] * 10.0 - x[3] * 6.0 + x[4]) * k);
            for i in 2..n - 2 {
                d.push(((x[i + 1] - x[i - 1]) * 8.0 - x[i + 2] + x[i - 2]) * k);
            }
            let m = n - 1;
            d.push((x[m] * 3.0 + x[m - 1] * 10.0 - x[m - 2] * 18.0 + x[m - 3] * 6.0 - x[m - 4]) * k);
            d.push((x[m] * 25.0 - x[m - 1] * 48.0 + x[m - 2] * 36.0 - x[m - 3] * 16.0 + x[m - 4] * 3.0) * k);
        }
        _ => {
            let k = 0.5 / h;
            d.push((x[1] * 4.0 - x[0] * 3.0 - x[2]) * k);
            for i in 1..n - 1 {
                d.push((x[i + 1] - x[i - 1]) * k);
            }
            let m = n - 1;
            d.push((x[m] * 3.0 - x[m - 1] * 4.0 + x[m - 2]) * k);
        }
    }
    d
}

/// Partial derivative of a sampled field along one axis.
pub fn diff<T: Field>(g: &Grid<T>, dom: &GridDomain, axis: Axis, stencil: Stencil) -> Grid<T> {
    let (nu, nv) = g.dims();
    debug_assert_eq!((nu, nv), (dom.nu, dom.nv));
    match axis {
        Axis::U => {
            let mut out = g.clone();
            let h = dom.h_u();
            let mut line = Vec::with_capacity(nu);
            for j in 0..nv {
                line.clear();
                line.extend((0..nu).map(|i| *g.get(i, j)));
                for (i, d) in diff_line(&line, h, stencil).into_iter().enumerate() {
                    *out.get_mut(i, j) = d;
                }
            }
            out
        }
        Axis::V => {
            let h = dom.h_v();
            let mut data = Vec::with_capacity(nu * nv);
            for i in 0..nu {
                data.extend(diff_line(&g.data[i * nv..(i + 1) * nv], h, stencil));
            }
            Grid::from_vec(nu, nv, data)
        }
    }
}

/// Mixed derivative `∂²/∂u∂v`; in the interior this is the symmetric
/// four-point stencil.
pub fn diff_uv<T: Field>(g: &Grid<T>, dom: &GridDomain) -> Grid<T> {
    diff(&diff(g, dom, Axis::U, Stencil::Second), dom, Axis::V, Stencil::Second)
}
