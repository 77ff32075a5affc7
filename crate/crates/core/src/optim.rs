//! Derivative-free local minimization (Nelder–Mead) used by the
//! environment searches.

/// Nelder–Mead with the standard coefficients (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2) and an axis-aligned initial simplex.
#[derive(Clone, Debug)]
pub struct NelderMead {
    pub max_evals: usize,
    pub initial_step: f64,
    /// Stop once every vertex is within this max-norm distance of the best.
    pub diameter_tol: f64,
    /// Record the best value after every iteration.
    pub record_history: bool,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_evals: 20_000, initial_step: 0.5, diameter_tol: 1e-12, record_history: false }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// Simplex collapsed below the diameter tolerance before the budget ran out.
    pub converged: bool,
    /// Best value per iteration, if requested. Nonincreasing.
    pub history: Vec<f64>,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl NelderMead {
    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let dim = x0.len();
        let evals = std::cell::Cell::new(0usize);
        let mut eval = |x: &[f64]| {
            evals.set(evals.get() + 1);
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        if dim == 0 {
            let value = eval(x0);
            return Minimum { x: Vec::new(), value, evals: 1, converged: true, history: vec![value] };
        }

        let mut points: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
        points.push(x0.to_vec());
        for i in 0..dim {
            let mut p = x0.to_vec();
            p[i] += self.initial_step;
            points.push(p);
        }
        let mut values: Vec<f64> = points.iter().map(|p| eval(p)).collect();
        let mut history = Vec::new();
        let mut converged = false;
        let mut centroid = vec![0.0; dim];
        let mut trial = vec![0.0; dim];
        let mut trial2 = vec![0.0; dim];

        loop {
            let (best, worst, second_worst) = extremes(&values);
            if self.record_history {
                history.push(values[best]);
            }

            let tol = self.diameter_tol;
            let collapsed = points.iter().all(|p| p.iter().zip(&points[best]).all(|(a, b)| (a - b).abs() < tol));
            if collapsed {
                converged = true;
                break;
            }
            if evals.get() >= self.max_evals {
                break;
            }

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for (i, p) in points.iter().enumerate() {
                if i == worst {
                    continue;
                }
                for (c, x) in centroid.iter_mut().zip(p) {
                    *c += x;
                }
            }
            centroid.iter_mut().for_each(|c| *c /= dim as f64);

            let along = |out: &mut Vec<f64>, from: &[f64], coef: f64| {
                for ((o, c), x) in out.iter_mut().zip(&centroid).zip(from) {
                    *o = c + coef * (x - c);
                }
            };

            along(&mut trial, &points[worst], -REFLECT);
            let f_reflect = eval(&trial);

            if f_reflect < values[best] {
                along(&mut trial2, &trial, EXPAND);
                let f_expand = eval(&trial2);
                if f_expand < f_reflect {
                    points[worst].copy_from_slice(&trial2);
                    values[worst] = f_expand;
                } else {
                    points[worst].copy_from_slice(&trial);
                    values[worst] = f_reflect;
                }
                continue;
            }
            if f_reflect < values[second_worst] {
                points[worst].copy_from_slice(&trial);
                values[worst] = f_reflect;
                continue;
            }

            let accepted = if f_reflect < values[worst] {
                along(&mut trial2, &trial, CONTRACT);
                let f_contract = eval(&trial2);
                (f_contract <= f_reflect).then_some(f_contract)
            } else {
                along(&mut trial2, &points[worst], CONTRACT);
                let f_contract = eval(&trial2);
                (f_contract < values[worst]).then_some(f_contract)
            };
            if let Some(v) = accepted {
                points[worst].copy_from_slice(&trial2);
                values[worst] = v;
                continue;
            }

            let anchor = points[best].clone();
            for i in (0..=dim).filter(|&i| i != best) {
                for (x, a) in points[i].iter_mut().zip(&anchor) {
                    *x = a + SHRINK * (*x - a);
                }
                values[i] = eval(&points[i]);
            }
        }

        let best = (0..=dim).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
        Minimum { x: points[best].clone(), value: values[best], evals: evals.get(), converged, history }
    }
}

/// Indices of the lowest, highest and second-highest values, with ties
/// resolved as a stable ascending sort would resolve them.
fn extremes(values: &[f64]) -> (usize, usize, usize) {
    let mut best = 0;
    let mut worst = 0;
    for (i, v) in values.iter().enumerate() {
        if v.total_cmp(&values[best]).is_lt() {
            best = i;
        }
        if v.total_cmp(&values[worst]).is_ge() {
            worst = i;
        }
    }
    let mut second = usize::MAX;
    for (i, v) in values.iter().enumerate() {
        if i != worst && (second == usize::MAX || v.total_cmp(&values[second]).is_ge()) {
            second = i;
        }
    }
    (best, worst, second)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        x.windows(2).map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2)).sum()
    }

    #[test]
    fn finds_rosenbrock_minimum() {
        let nm = NelderMead { max_evals: 10_000, ..Default::default() };
        let m = nm.minimize(rosenbrock, &[-1.2, 1.0]);
        assert!(m.value < 1e-20, "{}", m.value);
        assert!((m.x[0] - 1.0).abs() < 1e-9 && (m.x[1] - 1.0).abs() < 1e-9);
        assert!(m.converged);
    }

    #[test]
    fn quadratic_in_many_dimensions() {
        let nm = NelderMead { max_evals: 200_000, ..Default::default() };
        let target: Vec<f64> = (0..8).map(|i| i as f64 * 0.3 - 1.0).collect();
        let m = nm.minimize(|x| x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum(), &[0.0; 8]);
        assert!(m.value < 1e-16, "{}", m.value);
    }

    #[test]
    fn history_is_monotone_and_budget_respected() {
        let nm = NelderMead { max_evals: 500, record_history: true, ..Default::default() };
        let m = nm.minimize(rosenbrock, &[0.3, -0.7, 2.0, 1.1]);
        assert!(m.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*m.history.last().unwrap(), m.value);
        // overshoot is bounded by one shrink step
        assert!(m.evals <= 500 + 5);
        assert!(!m.converged);
    }

    #[test]
    fn extremes_match_stable_sort() {
        let cases: [Vec<f64>; 4] = [vec![3.0, 1.0, 2.0], vec![1.0, 1.0, 1.0], vec![2.0, 5.0, 5.0, 0.0], vec![0.0, 4.0, 4.0, 4.0]];
        for values in cases {
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let n = order.len();
            assert_eq!(extremes(&values), (order[0], order[n - 1], order[n - 2]), "{values:?}");
        }
    }

    #[test]
    fn nan_is_treated_as_worst() {
        let nm = NelderMead::default();
        let m = nm.minimize(|x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 1.0).powi(2) + x[1] * x[1] }, &[0.5, 0.5]);
        assert!(m.value < 1e-20);
    }
}
