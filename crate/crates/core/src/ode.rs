//! Classical fourth-order Runge–Kutta step.
//!
//! The right-hand side is queried by stage position rather than by abscissa,
//! so callers that only hold samples at the start, midpoint and end of a step
//! (for instance a connection sampled on a half-step grid) can use the same
//! stepper as callers with closed-form coefficients.

use std::ops::{Add, Mul};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Start,
    Mid,
    End,
}

impl Stage {
    /// Fraction of the step at which the stage is evaluated.
    pub fn offset(self) -> f64 {
        match self {
            Stage::Start => 0.0,
            Stage::Mid => 0.5,
            Stage::End => 1.0,
        }
    }
}

/// One RK4 step of size `h` for `y' = f(stage, y)`.
pub fn rk4_step<S, F>(y: &S, h: f64, f: F) -> S
where
    S: Clone + Add<Output = S> + Mul<f64, Output = S>,
    F: Fn(Stage, &S) -> S,
{
    let k1 = f(Stage::Start, y);
    let k2 = f(Stage::Mid, &(y.clone() + k1.clone() * (0.5 * h)));
    let k3 = f(Stage::Mid, &(y.clone() + k2.clone() * (0.5 * h)));
    let k4 = f(Stage::End, &(y.clone() + k3.clone() * h));
    y.clone() + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_fourth_order() {
        let solve = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = 1.0_f64;
            for k in 0..n {
                let t0 = k as f64 * h;
                y = rk4_step(&y, h, |s, y| -y * (1.0 + (t0 + s.offset() * h)));
            }
            (y - (-1.5_f64).exp()).abs()
        };
        let order = (solve(20) / solve(40)).log2();
        assert!((order - 4.0).abs() < 0.2, "order {order}");
    }
}
