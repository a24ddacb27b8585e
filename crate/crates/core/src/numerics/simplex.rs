use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Stopping rules for [`fit_least_squares_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Largest vertex spread, relative to the parameter scale, accepted as converged.
    pub x_tolerance: f64,
    /// Objective spread accepted as converged, relative to the best value.
    pub f_tolerance: f64,
    /// Total objective evaluations across all restarts.
    pub max_evaluations: usize,
    /// Fresh simplices built around the incumbent after the first run.
    pub max_restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            x_tolerance: 1e-10,
            f_tolerance: 1e-15,
            max_evaluations: 40_000,
            max_restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub params: Vec<f64>,
    pub sum_of_squares: f64,
    pub evaluations: usize,
    /// False when the evaluation budget ran out first.
    pub converged: bool,
}

/// Minimizes `Σ r_i(x)²` inside a box with the default [`SimplexOptions`].
pub fn fit_least_squares<F>(residual_fn: F, init: &[f64], bounds: &[(f64, f64)]) -> Result<FitOutcome>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    fit_least_squares_with(residual_fn, init, bounds, SimplexOptions::default())
}

/// Bounded Nelder-Mead on the sum of squared residuals.
///
/// Trial points are projected onto the box before evaluation, so returned
/// parameters always satisfy the bounds. A non-finite objective away from
/// `init` is treated as `+∞`.
pub fn fit_least_squares_with<F>(
    mut residual_fn: F,
    init: &[f64],
    bounds: &[(f64, f64)],
    options: SimplexOptions,
) -> Result<FitOutcome>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let dim = init.len();
    if dim == 0 {
        return Err(Error::domain("least-squares fit needs at least one parameter"));
    }
    if bounds.len() != dim {
        return Err(Error::domain(format!(
            "got {} bounds for {dim} parameters",
            bounds.len()
        )));
    }
    for (i, ((lo, hi), x)) in bounds.iter().zip(init).enumerate() {
        if !(lo <= hi) {
            return Err(Error::domain(format!("bound {i} is empty: [{lo}, {hi}]")));
        }
        if !(lo <= x && x <= hi) {
            return Err(Error::domain(format!(
                "initial parameter {i} = {x} lies outside [{lo}, {hi}]"
            )));
        }
    }

    let mut counted = Counted {
        f: |x: &[f64]| -> f64 {
            let ss: f64 = residual_fn(x).iter().map(|r| r * r).sum();
            if ss.is_nan() {
                f64::INFINITY
            } else {
                ss
            }
        },
        evaluations: 0,
    };

    let f0 = counted.eval(init);
    if !f0.is_finite() {
        return Err(Error::domain("residuals are not finite at the initial parameters"));
    }

    let mut best = (init.to_vec(), f0);
    let mut converged = false;
    for _ in 0..=options.max_restarts {
        let (x, f, ok) = nelder_mead(&mut counted, &best.0, best.1, bounds, &options);
        let improved = f < best.1;
        if f <= best.1 {
            best = (x, f);
        }
        converged = ok;
        if !ok || !improved {
            break;
        }
    }
    Ok(FitOutcome {
        params: best.0,
        sum_of_squares: best.1,
        evaluations: counted.evaluations,
        converged,
    })
}

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        (self.f)(x)
    }
}

fn project(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (xi, (lo, hi)) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(*lo, *hi);
    }
}

fn initial_step(x: f64, (lo, hi): (f64, f64)) -> f64 {
    let mut step = if x != 0.0 { 0.1 * x.abs() } else { 0.05 * (hi - lo) };
    if !step.is_finite() || step == 0.0 {
        step = 0.1;
    }
    // Step inward when the outward vertex would be clipped onto x itself.
    if x + step > hi && x - step >= lo {
        -step
    } else {
        step
    }
}

/// One Nelder-Mead run from a fresh simplex around `start`.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    objective: &mut Counted<F>,
    start: &[f64],
    f_start: f64,
    bounds: &[(f64, f64)],
    options: &SimplexOptions,
) -> (Vec<f64>, f64, bool) {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let dim = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), f_start));
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += initial_step(start[i], bounds[i]);
        project(&mut x, bounds);
        let f = objective.eval(&x);
        simplex.push((x, f));
    }
    let scale: Vec<f64> = start
        .iter()
        .zip(bounds)
        .map(|(x, (lo, hi))| x.abs().max(1e-3 * (hi - lo)).max(1e-12))
        .collect();

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_best = simplex[0].1;
        let f_worst = simplex[dim].1;
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .zip(&scale)
                    .map(|((a, b), s)| (a - b).abs() / s)
            })
            .fold(0.0, f64::max);
        let f_spread = f_worst - f_best;
        if x_spread <= options.x_tolerance
            || (f_spread <= options.f_tolerance * f_best.abs() && x_spread <= libm::sqrt(options.x_tolerance))
            || f_worst == 0.0
        {
            let (x, f) = simplex.swap_remove(0);
            return (x, f, true);
        }
        if objective.evaluations >= options.max_evaluations {
            let (x, f) = simplex.swap_remove(0);
            return (x, f, false);
        }

        let mut centroid = alloc::vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (c - w))
                .collect();
            project(&mut p, bounds);
            p
        };

        let reflected = along(REFLECT);
        let f_reflected = objective.eval(&reflected);
        if f_reflected < f_best {
            let expanded = along(EXPAND);
            let f_expanded = objective.eval(&expanded);
            simplex[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_reflected);
            continue;
        }
        let (contracted, f_contracted) = if f_reflected < f_worst {
            let p = along(CONTRACT * REFLECT);
            let f = objective.eval(&p);
            (p, f)
        } else {
            let p = along(-CONTRACT);
            let f = objective.eval(&p);
            (p, f)
        };
        if f_contracted < f_worst.min(f_reflected) {
            simplex[dim] = (contracted, f_contracted);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (xi, bi) in vertex.0.iter_mut().zip(&best) {
                *xi = bi + SHRINK * (*xi - bi);
            }
            vertex.1 = objective.eval(&vertex.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn quadratic_bowl() {
        let out = fit_least_squares(|x| vec![x[0] - 2.0], &[0.0], &[(-10.0, 10.0)]).unwrap();
        assert!((out.params[0] - 2.0).abs() < 1e-6, "{out:?}");
        assert!(out.converged);
    }

    #[test]
    fn separable_two_parameters() {
        let out = fit_least_squares(
            |x| vec![x[0] - 1.0, x[1] + 3.0],
            &[0.0, 0.0],
            &[(-10.0, 10.0), (-10.0, 10.0)],
        )
        .unwrap();
        assert!((out.params[0] - 1.0).abs() < 1e-6);
        assert!((out.params[1] + 3.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock_valley() {
        let out = fit_least_squares(
            |x| vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]],
            &[-1.2, 1.0],
            &[(-5.0, 5.0), (-5.0, 5.0)],
        )
        .unwrap();
        assert!((out.params[0] - 1.0).abs() < 1e-6, "{out:?}");
        assert!((out.params[1] - 1.0).abs() < 1e-6, "{out:?}");
    }

    #[test]
    fn minimum_outside_box_lands_on_bound() {
        let out = fit_least_squares(|x| vec![x[0] - 5.0], &[0.0], &[(-1.0, 1.0)]).unwrap();
        assert_eq!(out.params[0], 1.0);
    }

    #[test]
    fn rejects_bad_start() {
        assert!(fit_least_squares(|_| vec![f64::NAN], &[0.0], &[(-1.0, 1.0)]).is_err());
        assert!(fit_least_squares(|x| vec![x[0]], &[2.0], &[(-1.0, 1.0)]).is_err());
        assert!(fit_least_squares(|x| vec![x[0]], &[0.0], &[]).is_err());
    }
}
