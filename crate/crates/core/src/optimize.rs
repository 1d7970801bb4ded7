//! Small derivative-free optimizers: Fibonacci sphere grids, a 2-D
//! Nelder–Mead and golden-section search.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::Axis;

/// `n` nearly uniform points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Axis> {
    let golden = core::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden * k as f64).sin_cos();
            Axis::normalized([r * c, r * s, z]).expect("grid point is nonzero")
        })
        .collect()
}

/// Two unit vectors completing `n` to an orthonormal frame.
pub fn tangent_frame(n: &Axis) -> ([f64; 3], [f64; 3]) {
    let v = n.to_array();
    let pick = if v[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = n.dot(&pick);
    let e1 = Axis::normalized([pick[0] - d * v[0], pick[1] - d * v[1], pick[2] - d * v[2]])
        .expect("pick is not parallel to n")
        .to_array();
    let e2 = [
        v[1] * e1[2] - v[2] * e1[1],
        v[2] * e1[0] - v[0] * e1[2],
        v[0] * e1[1] - v[1] * e1[0],
    ];
    (e1, e2)
}

/// Nelder–Mead minimization of `f` over the plane, starting from `x0`
/// with initial simplex size `step`.
pub fn nelder_mead_2d<F: Fn([f64; 2]) -> f64>(f: F, x0: [f64; 2], step: f64, tol: f64, max_iter: usize) -> ([f64; 2], f64) {
    let mut pts = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut vals = pts.map(&f);
    for _ in 0..max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(core::cmp::Ordering::Equal));
        pts = order.map(|i| pts[i]);
        vals = order.map(|i| vals[i]);
        if (vals[2] - vals[0]).abs() <= tol * (1.0 + vals[0].abs()) {
            let spread = (pts[2][0] - pts[0][0]).abs().max((pts[2][1] - pts[0][1]).abs());
            if spread < 1e-9 {
                break;
            }
        }
        let c = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let at = |t: f64| [c[0] + t * (pts[2][0] - c[0]), c[1] + t * (pts[2][1] - c[1])];
        let xr = at(-1.0);
        let fr = f(xr);
        if fr < vals[0] {
            let xe = at(-2.0);
            let fe = f(xe);
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
        } else {
            let xc = if fr < vals[2] { at(-0.5) } else { at(0.5) };
            let fc = f(xc);
            if fc < vals[2].min(fr) {
                pts[2] = xc;
                vals[2] = fc;
            } else {
                for k in 1..3 {
                    pts[k] = [(pts[0][0] + pts[k][0]) / 2.0, (pts[0][1] + pts[k][1]) / 2.0];
                    vals[k] = f(pts[k]);
                }
            }
        }
    }
    let best = if vals[0] <= vals[1] && vals[0] <= vals[2] {
        0
    } else if vals[1] <= vals[2] {
        1
    } else {
        2
    };
    (pts[best], vals[best])
}

/// Maximizes `f` over unit vectors: grid of `n_grid` Fibonacci points, then
/// Nelder–Mead in the tangent plane of the best grid point.
pub fn maximize_on_sphere<F: Fn(&Axis) -> f64>(f: F, n_grid: usize) -> (f64, Axis) {
    let mut best = (f64::NEG_INFINITY, Axis::Z);
    for n in fibonacci_sphere(n_grid) {
        let v = f(&n);
        if v > best.0 {
            best = (v, n);
        }
    }
    let n0 = best.1;
    let (e1, e2) = tangent_frame(&n0);
    let v0 = n0.to_array();
    let lift = |p: [f64; 2]| {
        Axis::normalized([0, 1, 2].map(|i| v0[i] + p[0] * e1[i] + p[1] * e2[i])).unwrap_or(n0)
    };
    let spacing = (4.0 * core::f64::consts::PI / n_grid as f64).sqrt();
    let (p, v) = nelder_mead_2d(|p| -f(&lift(p)), [0.0, 0.0], spacing, 1e-15, 500);
    if -v >= best.0 {
        (-v, lift(p))
    } else {
        best
    }
}

/// Golden-section maximization of a unimodal `f` on [a, b].
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}
