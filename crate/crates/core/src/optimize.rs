//! BFGS with a backtracking line search.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BfgsOptions {
    /// Stop once the gradient's infinity norm drops below this.
    pub grad_tol: f64,
    /// Budget of objective/gradient evaluations.
    pub max_evaluations: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions {
            grad_tol: 1e-8,
            max_evaluations: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_inf_norm: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimizes `f`, which returns the value and gradient at a point.
///
/// Steps satisfy the Armijo condition, or, once the value has flattened to
/// roundoff, reduce the directional derivative. The value never increases
/// beyond roundoff, so a warm start cannot end worse than it began.
pub fn bfgs<F>(x0: &[f64], mut f: F, opts: BfgsOptions) -> BfgsResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let k = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    let mut evaluations = 1;
    // inverse Hessian approximation, row-major
    let mut hinv = identity(k);
    loop {
        let gnorm = inf_norm(&g);
        if gnorm < opts.grad_tol || k == 0 {
            return BfgsResult {
                x,
                value: fx,
                grad_inf_norm: gnorm,
                evaluations,
                converged: true,
            };
        }
        if evaluations >= opts.max_evaluations {
            return BfgsResult {
                x,
                value: fx,
                grad_inf_norm: gnorm,
                evaluations,
                converged: false,
            };
        }
        let mut p: Vec<f64> = (0..k).map(|i| -dot(&hinv[i * k..(i + 1) * k], &g)).collect();
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            hinv = identity(k);
            p = g.iter().map(|v| -v).collect();
            slope = dot(&g, &p);
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        while evaluations < opts.max_evaluations {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + alpha * pi).collect();
            let (ft, gt) = f(&trial);
            evaluations += 1;
            let armijo = ft <= fx + 1e-4 * alpha * slope;
            let flat = ft <= fx + 1e-14 * fx.abs().max(1.0) && dot(&gt, &p).abs() < slope.abs();
            if ft.is_finite() && (armijo || flat) {
                accepted = Some((trial, ft, gt));
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                break;
            }
        }
        let Some((xn, fnew, gn)) = accepted else {
            let gnorm = inf_norm(&g);
            return BfgsResult {
                x,
                value: fx,
                grad_inf_norm: gnorm,
                evaluations,
                converged: gnorm < opts.grad_tol,
            };
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 {
            let hy: Vec<f64> = (0..k).map(|i| dot(&hinv[i * k..(i + 1) * k], &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            for i in 0..k {
                for j in 0..k {
                    hinv[i * k + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
                }
            }
        } else {
            hinv = identity(k);
        }
        x = xn;
        fx = fnew;
        g = gn;
    }
}

fn identity(k: usize) -> Vec<f64> {
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        m[i * k + i] = 1.0;
    }
    m
}
