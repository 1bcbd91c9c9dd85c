//! Derivative-free local minimization: Nelder–Mead with dimension-adaptive
//! coefficients, plus a coordinate-wise golden-section polish.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop once the spread of simplex values falls below this.
    pub f_tolerance: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub x_tolerance: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_iterations: 5000, f_tolerance: 1e-12, x_tolerance: 1e-10, initial_step: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Minimizes `f` starting from `x0`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    if dim == 0 {
        return Minimum { x: Vec::new(), value: f(x0), iterations: 0, evaluations: 1 };
    }
    let n = dim as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / n, 0.75 - 0.5 / n, 1.0 - 1.0 / n);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evaluations = dim + 1;

    let mut order: Vec<usize> = (0..=dim).collect();
    let mut centroid = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut trial2 = vec![0.0; dim];
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let best = order[0];
        let worst = order[dim];
        let second = order[dim - 1];

        let spread = values[worst] - values[best];
        let size = simplex
            .iter()
            .map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= opts.f_tolerance || size <= opts.x_tolerance {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &idx in &order[..dim] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n);

        let blend = |out: &mut [f64], t: f64, from: &[f64]| {
            for ((o, c), x) in out.iter_mut().zip(&centroid).zip(from) {
                *o = c + t * (x - c);
            }
        };

        blend(&mut trial, -alpha, &simplex[worst]);
        let f_reflect = f(&trial);
        evaluations += 1;

        if f_reflect < values[best] {
            blend(&mut trial2, -alpha * gamma, &simplex[worst]);
            let f_expand = f(&trial2);
            evaluations += 1;
            if f_expand < f_reflect {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = f_expand;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[second] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = f_reflect;
            continue;
        }

        // Contraction, outside or inside.
        let outside = f_reflect < values[worst];
        let t = if outside { -alpha * rho } else { rho };
        blend(&mut trial2, t, &simplex[worst]);
        let f_contract = f(&trial2);
        evaluations += 1;
        let threshold = if outside { f_reflect } else { values[worst] };
        if f_contract < threshold {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = f_contract;
            continue;
        }

        // Shrink toward the best vertex.
        let anchor = simplex[best].clone();
        for &idx in &order[1..] {
            for (x, a) in simplex[idx].iter_mut().zip(&anchor) {
                *x = a + sigma * (*x - a);
            }
            values[idx] = f(&simplex[idx]);
            evaluations += 1;
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        .expect("non-empty simplex");
    Minimum { x: simplex.swap_remove(best), value: values[best], iterations, evaluations }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `g` on `[lo, hi]`.
pub fn golden_section<G>(mut g: G, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    G: FnMut(f64) -> f64,
{
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = g(a);
    let mut fb = g(b);
    while hi - lo > tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = g(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = g(b);
        }
    }
    if fa <= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Coordinate-wise golden-section refinement of `x` in brackets of shrinking
/// half-width. Moves are only accepted when they lower `f`.
pub fn golden_polish<F>(mut f: F, x: &mut [f64], sweeps: usize, half_width: f64) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    let mut best = f(x);
    let mut width = half_width;
    for _ in 0..sweeps {
        for i in 0..x.len() {
            let centre = x[i];
            let (arg, value) = golden_section(
                |t| {
                    x[i] = t;
                    f(x)
                },
                centre - width,
                centre + width,
                1e-10,
            );
            if value < best {
                x[i] = arg;
                best = value;
            } else {
                x[i] = centre;
            }
        }
        width *= 0.25;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn minimizes_rosenbrock() {
        let opts = NelderMeadOptions { f_tolerance: 1e-16, x_tolerance: 1e-12, ..Default::default() };
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &opts);
        assert!(m.value < 1e-12, "{}", m.value);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn minimizes_shifted_quadratic_in_ten_dimensions() {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (v - i as f64 * 0.1).powi(2)).sum();
        let m = nelder_mead(f, &[0.0; 10], &NelderMeadOptions::default());
        assert!(m.value < 1e-9, "{}", m.value);
    }

    #[test]
    fn is_deterministic() {
        let a = nelder_mead(rosenbrock, &[0.3, -0.4], &NelderMeadOptions::default());
        let b = nelder_mead(rosenbrock, &[0.3, -0.4], &NelderMeadOptions::default());
        assert_eq!(a, b);
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let (x, v) = golden_section(|t| (t - 0.7).powi(2) + 2.0, 0.0, 2.0, 1e-12);
        assert!((x - 0.7).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polish_never_increases_objective() {
        let mut x = vec![0.9, 0.8];
        let before = rosenbrock(&x);
        let after = golden_polish(rosenbrock, &mut x, 4, 0.1);
        assert!(after <= before);
        assert_eq!(after, rosenbrock(&x));
    }
}
