//! Derivative-free maximizers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub const DEFAULT_ARG_TOL: f64 = 1e-9;
pub const DEFAULT_OBJ_TOL: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn checked(v: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation(format!("objective returned {v} at {x}")))
    }
}

/// Brent's method on `[lo, hi]` (golden-section steps with parabolic
/// interpolation). Returns `(argmax, max)`.
pub fn maximize_scalar<F: FnMut(f64) -> f64>(
    mut objective: F,
    bracket: (f64, f64),
    tol: f64,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = bracket;
    if !(a < b) {
        return Err(Error::Domain(format!("empty bracket [{a}, {b}]")));
    }
    let cgold = 1.0 - INV_PHI;
    let mut f = |x: f64| -> Result<f64> { checked(-objective(x), x) };

    let mut x = a + cgold * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..500 {
        let xm = 0.5 * (a + b);
        let tol1 = tol * 0.5 + 1e-14 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Ok((x, -fx));
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = cgold * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(Error::Convergence {
        what: "scalar maximization".into(),
        best_point: vec![x],
        best_value: -fx,
    })
}

/// Options for [`maximize_vector`].
#[derive(Debug, Clone)]
pub struct VectorOptions {
    pub arg_tol: f64,
    pub obj_tol: f64,
    pub restarts: usize,
    pub jitter: f64,
    pub max_evals: usize,
    pub seed: u64,
}

impl Default for VectorOptions {
    fn default() -> Self {
        Self {
            arg_tol: DEFAULT_ARG_TOL,
            obj_tol: DEFAULT_OBJ_TOL,
            restarts: 16,
            jitter: 0.5,
            max_evals: 20_000,
            seed: 0x5eed,
        }
    }
}

struct Simplex<'a, F> {
    f: &'a mut F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Simplex<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation(format!("objective returned {v} at {x:?}")))
        }
    }

    /// Nelder-Mead maximization from `start` with initial edge `step`.
    /// Returns (point, value, converged).
    fn run(&mut self, start: &[f64], step: f64, opts: &VectorOptions) -> Result<(Vec<f64>, f64, bool)> {
        let n = start.len();
        let mut pts: Vec<Vec<f64>> = vec![start.to_vec()];
        for i in 0..n {
            let mut p = start.to_vec();
            p[i] += step;
            pts.push(p);
        }
        let mut vals = Vec::with_capacity(n + 1);
        for p in &pts {
            vals.push(self.eval(p)?);
        }
        let budget = self.evals + opts.max_evals;
        loop {
            // sort descending by value
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).expect("finite"));
            pts = order.iter().map(|&i| pts[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();

            let spread = vals[0] - vals[n];
            let size = pts[1..]
                .iter()
                .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if size <= opts.arg_tol && spread <= opts.obj_tol.max(1e-15 * vals[0].abs()) {
                return Ok((pts[0].clone(), vals[0], true));
            }
            if self.evals >= budget {
                return Ok((pts[0].clone(), vals[0], false));
            }

            let centroid: Vec<f64> = (0..n)
                .map(|k| pts[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&pts[n])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(1.0);
            let fr = self.eval(&xr)?;
            if fr > vals[0] {
                let xe = along(2.0);
                let fe = self.eval(&xe)?;
                if fe > fr {
                    pts[n] = xe;
                    vals[n] = fe;
                } else {
                    pts[n] = xr;
                    vals[n] = fr;
                }
                continue;
            }
            if fr > vals[n - 1] {
                pts[n] = xr;
                vals[n] = fr;
                continue;
            }
            let (xc, fc) = if fr > vals[n] {
                let xc = along(0.5);
                let fc = self.eval(&xc)?;
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = self.eval(&xc)?;
                (xc, fc)
            };
            if fc > vals[n].max(fr) {
                pts[n] = xc;
                vals[n] = fc;
                continue;
            }
            // shrink toward the best vertex
            for i in 1..=n {
                let p: Vec<f64> = pts[i]
                    .iter()
                    .zip(&pts[0])
                    .map(|(x, b)| b + 0.5 * (x - b))
                    .collect();
                vals[i] = self.eval(&p)?;
                pts[i] = p;
            }
        }
    }
}

/// Coordinate-wise Brent polish around `x`.
fn polish<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    mut x: Vec<f64>,
    mut fx: f64,
    opts: &VectorOptions,
) -> Result<(Vec<f64>, f64)> {
    for _round in 0..20 {
        let before = fx;
        for k in 0..x.len() {
            let h = 1e-3_f64.max(1e-3 * x[k].abs());
            let mut probe = x.clone();
            let (arg, val) = maximize_scalar(
                |v| {
                    probe[k] = v;
                    f(&probe)
                },
                (x[k] - h, x[k] + h),
                opts.arg_tol,
            )?;
            if val > fx {
                x[k] = arg;
                fx = val;
            }
        }
        if fx - before <= opts.obj_tol {
            break;
        }
    }
    Ok((x, fx))
}

/// Multi-start Nelder-Mead maximization followed by a coordinate polish.
///
/// The first run starts at `start`; the remaining `restarts − 1` start from
/// seeded jitter around the best point found so far.
pub fn maximize_vector<F: FnMut(&[f64]) -> f64>(
    mut objective: F,
    start: &[f64],
    opts: &VectorOptions,
) -> Result<(Vec<f64>, f64)> {
    if start.is_empty() {
        let v = objective(start);
        return checked(v, f64::NAN).map(|v| (Vec::new(), v));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut any_converged = false;
    {
        let mut nm = Simplex {
            f: &mut objective,
            evals: 0,
        };
        nm.eval(start)?;
        for r in 0..opts.restarts.max(1) {
            let origin = match (&best, r) {
                (_, 0) | (None, _) => start.to_vec(),
                (Some((b, _)), _) => b
                    .iter()
                    .map(|v| v + opts.jitter * rng.gen_range(-1.0..1.0))
                    .collect(),
            };
            let step = if r == 0 { 0.25 } else { 0.1 + 0.4 * rng.gen::<f64>() };
            let (x, v, ok) = match nm.run(&origin, step, opts) {
                Ok(t) => t,
                Err(Error::Evaluation(_)) if r > 0 => continue,
                Err(e) => return Err(e),
            };
            any_converged |= ok;
            if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
                best = Some((x, v));
            }
        }
    }
    let (x, v) = best.expect("at least one run");
    if !any_converged {
        return Err(Error::Convergence {
            what: "simplex maximization".into(),
            best_point: x,
            best_value: v,
        });
    }
    polish(&mut objective, x, v, opts)
}
