//! Derivative-free maximization on a box.

/// Outcome of [`NelderMead::maximize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Convergence once every vertex lies within `tol` of the best one in
    /// each coordinate.
    pub tol: f64,
    /// Initial simplex edge per coordinate.
    pub step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_iter: 2000,
            tol: 1e-7,
            step: 0.05,
        }
    }
}

impl NelderMead {
    /// Maximizes `f` over the box `bounds`, projecting every trial point
    /// onto it. Non-finite values rank below every finite one.
    pub fn maximize<F>(&self, f: F, start: &[f64], bounds: &[(f64, f64)]) -> Optimum
    where
        F: Fn(&[f64]) -> f64,
    {
        let d = start.len();
        let project = |x: &mut Vec<f64>| {
            for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
                *xi = xi.clamp(lo, hi);
            }
        };
        let eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        };
        let mut first = start.to_vec();
        project(&mut first);
        let mut simplex = vec![first.clone()];
        for i in 0..d {
            let mut v = first.clone();
            let (lo, hi) = bounds[i];
            v[i] = if v[i] + self.step <= hi {
                v[i] + self.step
            } else {
                (v[i] - self.step).max(lo)
            };
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();

        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            // best first
            let mut order: Vec<usize> = (0..=d).collect();
            order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let spread = simplex[1..]
                .iter()
                .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= self.tol {
                converged = true;
                break;
            }
            iterations += 1;

            let centroid: Vec<f64> = (0..d)
                .map(|j| simplex[..d].iter().map(|v| v[j]).sum::<f64>() / d as f64)
                .collect();
            let along = |t: f64| {
                let mut x: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[d])
                    .map(|(c, w)| c + t * (c - w))
                    .collect();
                project(&mut x);
                x
            };

            let xr = along(alpha);
            let fr = eval(&xr);
            if fr > values[0] {
                let xe = along(gamma);
                let fe = eval(&xe);
                if fe > fr {
                    simplex[d] = xe;
                    values[d] = fe;
                } else {
                    simplex[d] = xr;
                    values[d] = fr;
                }
                continue;
            }
            if fr > values[d - 1] {
                simplex[d] = xr;
                values[d] = fr;
                continue;
            }
            let (xc, fc) = if fr > values[d] {
                let x = along(rho);
                let v = eval(&x);
                (x, v)
            } else {
                let x = along(-rho);
                let v = eval(&x);
                (x, v)
            };
            if fc > values[d].max(fr) {
                simplex[d] = xc;
                values[d] = fc;
                continue;
            }
            // shrink toward the best vertex
            for i in 1..=d {
                let shrunk: Vec<f64> = simplex[0]
                    .iter()
                    .zip(&simplex[i])
                    .map(|(b, v)| b + sigma * (v - b))
                    .collect();
                values[i] = eval(&shrunk);
                simplex[i] = shrunk;
            }
        }
        let best = (0..=d)
            .max_by(|&a, &b| values[a].total_cmp(&values[b]))
            .expect("nonempty simplex");
        Optimum {
            x: simplex[best].clone(),
            value: values[best],
            iterations,
            converged,
        }
    }
}
