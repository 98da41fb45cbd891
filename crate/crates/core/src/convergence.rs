//! Refinement studies: observed orders of convergence.
//!
//! Errors from different grids are compared on a fixed set of probe points
//! (the nodes of the coarsest grid that pass a mask), so that every level
//! measures the same physical region.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridDomain};

/// `log₂(e_k / e_{k+1})` for successive halvings of the step.
pub fn pairwise_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Least-squares slope of `log e` against `log h`.
pub fn ls_order(steps: &[f64], errors: &[f64]) -> f64 {
    assert_eq!(steps.len(), errors.len());
    let n = steps.len() as f64;
    let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Errors over a sequence of refinements and the orders they imply.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub nodes: Vec<usize>,
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    pub pairwise: Vec<f64>,
    pub order: f64,
}

impl RefinementStudy {
    pub fn new(nodes: Vec<usize>, steps: Vec<f64>, errors: Vec<f64>) -> Self {
        let pairwise = pairwise_orders(&errors);
        let order = ls_order(&steps, &errors);
        RefinementStudy {
            nodes,
            steps,
            errors,
            pairwise,
            order,
        }
    }

    /// Runs `measure` on `[lo, hi]²` with each node count.
    pub fn run(lo: f64, hi: f64, nodes: &[usize], mut measure: impl FnMut(&GridDomain) -> Result<f64>) -> Result<Self> {
        let mut steps = Vec::new();
        let mut errors = Vec::new();
        for &n in nodes {
            let dom = GridDomain::square(lo, hi, n)?;
            steps.push(dom.h_u());
            errors.push(measure(&dom)?);
        }
        Ok(Self::new(nodes.to_vec(), steps, errors))
    }
}

/// Nodes of a coarse grid at which errors on nested refinements are compared.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSet {
    pub coarse: GridDomain,
    pub nodes: Vec<(usize, usize)>,
}

impl ProbeSet {
    pub fn new(coarse: &GridDomain, mut keep: impl FnMut(usize, usize) -> bool) -> Self {
        let nodes = (0..coarse.nu)
            .flat_map(|i| (0..coarse.nv).map(move |j| (i, j)))
            .filter(|&(i, j)| keep(i, j))
            .collect();
        ProbeSet { coarse: *coarse, nodes }
    }

    /// Coarse nodes inside `[−r, r]²` (coordinates, not indices).
    pub fn in_box(coarse: &GridDomain, r: f64, mut keep: impl FnMut(usize, usize) -> bool) -> Self {
        let tol = 1e-12;
        Self::new(coarse, |i, j| {
            coarse.u(i).abs() <= r + tol && coarse.v(j).abs() <= r + tol && keep(i, j)
        })
    }

    fn stride(&self, fine: &GridDomain) -> Result<(usize, usize)> {
        let s = |nc: usize, nf: usize| {
            if nc == 1 {
                return (nf == 1).then_some(1);
            }
            (nf - 1).is_multiple_of(nc - 1).then(|| (nf - 1) / (nc - 1))
        };
        let c = &self.coarse;
        let same_box = c.u_min == fine.u_min && c.u_max == fine.u_max && c.v_min == fine.v_min && c.v_max == fine.v_max;
        match (same_box, s(c.nu, fine.nu), s(c.nv, fine.nv)) {
            (true, Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::GridMismatch(format!(
                "{}×{} grid does not nest in {}×{}",
                c.nu, c.nv, fine.nu, fine.nv
            ))),
        }
    }

    /// Max of `|g|` over the probes; `NaN` samples count as failures.
    pub fn max_abs(&self, fine: &GridDomain, g: &Grid<f64>) -> Result<f64> {
        let (a, b) = self.stride(fine)?;
        Ok(self
            .nodes
            .iter()
            .map(|&(i, j)| {
                let x = g.get(i * a, j * b).abs();
                if x.is_nan() {
                    f64::INFINITY
                } else {
                    x
                }
            })
            .fold(0.0, f64::max))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
