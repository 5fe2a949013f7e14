//! Derivative-free bound-constrained local minimizer: Powell's conjugate
//! direction method with a Brent line search restricted to the feasible
//! segment of the box. Terminates when a full iteration moves every
//! coordinate by less than the step tolerance.

use crate::scalar::Real;

pub(crate) struct LocalOutcome<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: u64,
    pub converged: bool,
}

/// Bounded scalar minimization on `[a, b]` (golden section with parabolic
/// interpolation). Returns `(argmin, min, evaluations)`.
fn brent_bounded<T: Real, F: FnMut(T) -> T>(
    mut g: F,
    a: T,
    b: T,
    xatol: T,
    max_evals: u64,
) -> (T, T, u64) {
    let golden = T::of(0.5) * (T::of(3.0) - T::of(5.0).sqrt());
    let sqrt_eps = T::epsilon().sqrt();
    let (mut a, mut b) = (a, b);

    let mut xf = a + golden * (b - a);
    let mut nfc = xf;
    let mut fulc = xf;
    let mut rat = T::zero();
    let mut e = T::zero();
    let mut fx = g(xf);
    let mut evals: u64 = 1;
    let mut fnfc = fx;
    let mut ffulc = fx;

    let mut xm = T::of(0.5) * (a + b);
    let mut tol1 = sqrt_eps * xf.abs() + xatol / T::of(3.0);
    let mut tol2 = tol1 + tol1;

    while (xf - xm).abs() > tol2 - T::of(0.5) * (b - a) {
        if evals >= max_evals {
            break;
        }
        let mut use_golden = true;
        if e.abs() > tol1 {
            // Try a parabolic step through (fulc, nfc, xf).
            use_golden = false;
            let mut r = (xf - nfc) * (fx - ffulc);
            let mut q = (xf - fulc) * (fx - fnfc);
            let mut p = (xf - fulc) * q - (xf - nfc) * r;
            q = (q - r) + (q - r);
            if q > T::zero() {
                p = -p;
            }
            q = q.abs();
            r = e;
            e = rat;
            if p.abs() < (T::of(0.5) * q * r).abs()
                && p > q * (a - xf)
                && p < q * (b - xf)
            {
                rat = p / q;
                let x = xf + rat;
                if (x - a) < tol2 || (b - x) < tol2 {
                    let si = if xm >= xf { T::one() } else { -T::one() };
                    rat = tol1 * si;
                }
            } else {
                use_golden = true;
            }
        }
        if use_golden {
            e = if xf >= xm { a - xf } else { b - xf };
            rat = golden * e;
        }

        let si = if rat >= T::zero() { T::one() } else { -T::one() };
        let x = xf + si * rat.abs().max(tol1);
        let fu = g(x);
        evals += 1;

        if fu <= fx {
            if x >= xf {
                a = xf;
            } else {
                b = xf;
            }
            fulc = nfc;
            ffulc = fnfc;
            nfc = xf;
            fnfc = fx;
            xf = x;
            fx = fu;
        } else {
            if x < xf {
                a = x;
            } else {
                b = x;
            }
            if fu <= fnfc || nfc == xf {
                fulc = nfc;
                ffulc = fnfc;
                nfc = x;
                fnfc = fu;
            } else if fu <= ffulc || fulc == xf || fulc == nfc {
                fulc = x;
                ffulc = fu;
            }
        }
        xm = T::of(0.5) * (a + b);
        tol1 = sqrt_eps * xf.abs() + xatol / T::of(3.0);
        tol2 = tol1 + tol1;
    }
    (xf, fx, evals)
}

fn clamp<T: Real>(x: &mut [T], lower: T, upper: T) {
    for v in x {
        *v = (*v).max(lower).min(upper);
    }
}

/// Minimize `f` over the box `[lower, upper]^n` starting from `x0`.
pub(crate) fn powell_minimize<T: Real, F: FnMut(&[T]) -> T>(
    mut f: F,
    x0: &[T],
    lower: T,
    upper: T,
    step_tolerance: T,
    max_evaluations: u64,
) -> LocalOutcome<T> {
    let n = x0.len();
    let mut x = x0.to_vec();
    clamp(&mut x, lower, upper);
    let mut fx = f(&x);
    let mut evals: u64 = 1;
    let mut converged = false;

    let mut dirs: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut d = vec![T::zero(); n];
            d[i] = T::one();
            d
        })
        .collect();

    // One line search along `dir`, restricted to the feasible segment.
    let line_search = |x: &mut Vec<T>,
                           fx: &mut T,
                           dir: &[T],
                           f: &mut F,
                           evals: &mut u64| {
        let mut tlo = T::neg_infinity();
        let mut thi = T::infinity();
        for (xi, di) in x.iter().zip(dir) {
            if *di == T::zero() {
                continue;
            }
            let a = (lower - *xi) / *di;
            let b = (upper - *xi) / *di;
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            tlo = tlo.max(lo);
            thi = thi.min(hi);
        }
        if !tlo.is_finite() || !thi.is_finite() || thi - tlo <= step_tolerance {
            return;
        }
        let budget = max_evaluations.saturating_sub(*evals).min(80);
        if budget < 3 {
            return;
        }
        let probe = |t: T, f: &mut F| {
            let mut xt: Vec<T> = x.iter().zip(dir).map(|(xi, di)| *xi + t * *di).collect();
            clamp(&mut xt, lower, upper);
            f(&xt)
        };
        let (t, ft, used) = brent_bounded(|t| probe(t, f), tlo, thi, step_tolerance, budget);
        *evals += used;
        if ft < *fx {
            for (xi, di) in x.iter_mut().zip(dir) {
                *xi += t * *di;
            }
            clamp(x, lower, upper);
            *fx = ft;
        }
    };

    for _iter in 0..1000 {
        let f_start = fx;
        let x_start = x.clone();
        let mut biggest_drop = T::zero();
        let mut biggest_idx = 0usize;

        for i in 0..n {
            let before = fx;
            let dir = dirs[i].clone();
            line_search(&mut x, &mut fx, &dir, &mut f, &mut evals);
            if before - fx > biggest_drop {
                biggest_drop = before - fx;
                biggest_idx = i;
            }
        }

        let step = x
            .iter()
            .zip(&x_start)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max);
        if step <= step_tolerance {
            converged = true;
            break;
        }
        if evals >= max_evaluations {
            break;
        }

        // Powell's test for replacing the direction of largest decrease with
        // the net displacement of this iteration.
        let d: Vec<T> = x.iter().zip(&x_start).map(|(a, b)| *a - *b).collect();
        let mut xe: Vec<T> = x.iter().zip(&d).map(|(a, b)| *a + *b).collect();
        clamp(&mut xe, lower, upper);
        let fe = f(&xe);
        evals += 1;
        if fe < f_start {
            let da = f_start - fx - biggest_drop;
            let db = f_start - fe;
            let t = T::of(2.0) * (f_start - fx - fx + fe) * da * da - biggest_drop * db * db;
            if t < T::zero() {
                let norm = d.iter().map(|v| *v * *v).sum::<T>().sqrt();
                if norm > T::zero() {
                    let dn: Vec<T> = d.iter().map(|v| *v / norm).collect();
                    line_search(&mut x, &mut fx, &dn, &mut f, &mut evals);
                    dirs[biggest_idx] = dirs[n - 1].clone();
                    dirs[n - 1] = dn;
                }
            }
        }
    }

    quadratic_refine(&mut f, &mut x, &mut fx, lower, upper, max_evaluations, &mut evals);

    LocalOutcome { x, value: fx, evaluations: evals, converged }
}

/// Coordinate-wise parabolic refinement on a fixed stencil. Line searches on
/// function values cannot localize a quadratic minimum below
/// ~sqrt(eps * f / f''); a three-point fit with stencil width h has vertex
/// error ~ eps * f / (h f'') + O(h^2) instead, so a shrinking-h schedule
/// pins near-quadratic minima to ~1e-10. Moves are only accepted when they
/// strictly decrease f, which also skips flat (degenerate) coordinates.
fn quadratic_refine<T: Real, F: FnMut(&[T]) -> T>(
    f: &mut F,
    x: &mut [T],
    fx: &mut T,
    lower: T,
    upper: T,
    max_evaluations: u64,
    evals: &mut u64,
) {
    fn eval_coord<T: Real, F: FnMut(&[T]) -> T>(f: &mut F, x: &mut [T], i: usize, v: T) -> T {
        let old = x[i];
        x[i] = v;
        let fv = f(x);
        x[i] = old;
        fv
    }

    let schedule = [1e-3, 1e-4, 1e-5, 1e-5];
    let n = x.len();
    for h_abs in schedule {
        let h = T::of(h_abs);
        for i in 0..n {
            if *evals + 4 > max_evaluations {
                return;
            }
            let center = x[i].max(lower + h).min(upper - h);
            let f_minus = eval_coord(f, x, i, center - h);
            let f_plus = eval_coord(f, x, i, center + h);
            let (f_center, used) = if center == x[i] {
                (*fx, 2)
            } else {
                (eval_coord(f, x, i, center), 3)
            };
            *evals += used;
            let denom = f_plus - f_center - f_center + f_minus;
            if !(denom > T::zero()) {
                continue;
            }
            let vertex = center - T::of(0.5) * h * (f_plus - f_minus) / denom;
            let vertex = vertex.max(lower).min(upper);
            if vertex == x[i] {
                continue;
            }
            let f_vertex = eval_coord(f, x, i, vertex);
            *evals += 1;
            if f_vertex < *fx {
                x[i] = vertex;
                *fx = f_vertex;
            }
        }
    }
}
