//! Special functions and quadrature rules.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::factorial::ln_factorial;

use crate::linalg::CMatrix;
use crate::C64;

const RESCALE: f64 = 1e100;

fn lnf(n: usize) -> f64 {
    ln_factorial(n as u64)
}

/// Generalized Laguerre polynomials `L_j^{(k)}(u)` for `j = 0..=jmax`,
/// returned as `(mantissa, log_scale)` pairs so that the value is
/// `mantissa * exp(log_scale)`.
pub fn laguerre_scaled(jmax: usize, k: usize, u: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(jmax + 1);
    out.push((1.0, 0.0));
    if jmax == 0 {
        return out;
    }
    let kf = k as f64;
    let mut prev = 1.0;
    let mut cur = 1.0 + kf - u;
    let mut scale = 0.0;
    out.push((cur, scale));
    for j in 1..jmax {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - u) * cur - (jf + kf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            scale += RESCALE.ln();
        }
        out.push((cur, scale));
    }
    out
}

/// Real radial factors `g_{mn}(r)` of the displacement matrix elements,
/// `<m|D(r e^{i theta})|n> = g_{mn}(r) e^{i (m-n) theta}`, for `m, n < c`.
/// Entries are computed from the closed Laguerre form, so they are exact
/// (not affected by truncating the generator).
pub fn displacement_radial(r: f64, c: usize) -> DMatrix<f64> {
    let mut g = DMatrix::<f64>::zeros(c, c);
    if r == 0.0 {
        g.fill_with_identity();
        return g;
    }
    let u = r * r;
    let lr = r.ln();
    for d in 0..c {
        let lag = laguerre_scaled(c - 1 - d, d, u);
        let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
        for n in 0..c - d {
            let m = n + d;
            let (mant, sc) = lag[n];
            let v = mant * (sc + 0.5 * (lnf(n) - lnf(m)) + d as f64 * lr - 0.5 * u).exp();
            g[(m, n)] = v;
            if d > 0 {
                g[(n, m)] = sign * v;
            }
        }
    }
    g
}

/// Truncated matrix of the exact displacement operator `D(beta)`.
pub fn displacement_matrix(beta: C64, c: usize) -> CMatrix {
    let g = displacement_radial(beta.norm(), c);
    let th = beta.arg();
    CMatrix::from_fn(c, c, |m, n| C64::from_polar(g[(m, n)], (m as f64 - n as f64) * th))
}

/// Gauss-Laguerre rule for `int_0^inf e^{-u} f(u) du`; returns nodes and
/// natural-log weights (weights for large nodes underflow as plain floats).
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jac = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if i == j {
            (2 * i + 1) as f64
        } else if i + 1 == j || j + 1 == i {
            (i.max(j)) as f64
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let mut log_w = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..4 {
            let lag = laguerre_scaled(n, 0, *x);
            let (ln_, _) = lag[n];
            let (lnm1, _) = lag[n - 1];
            // L_n' = n (L_n - L_{n-1}) / x, sharing a scale factor
            let deriv = n as f64 * (ln_ - lnm1) / *x;
            if deriv != 0.0 {
                let step = ln_ / deriv;
                *x -= step;
                if step.abs() < 1e-15 * *x {
                    break;
                }
            }
        }
        let lag = laguerre_scaled(n + 1, 0, *x);
        let (m, s) = lag[n + 1];
        log_w.push(x.ln() - 2.0 * ((n + 1) as f64).ln() - 2.0 * (m.abs().ln() + s));
    }
    (nodes, log_w)
}

/// Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let jac = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        pairs.iter().map(|p| mid + half * p.0).collect(),
        pairs.iter().map(|p| half * p.1).collect(),
    )
}

/// Normalized oscillator eigenfunctions `<x|n>` for `n < c` under `x = a + a^dagger`.
pub fn hermite_functions(x: f64, c: usize) -> Vec<f64> {
    let mut out = vec![0.0; c];
    if c == 0 {
        return out;
    }
    out[0] = (2.0 * std::f64::consts::PI).powf(-0.25) * (-0.25 * x * x).exp();
    if c > 1 {
        out[1] = x * out[0];
    }
    for n in 1..c.saturating_sub(1) {
        out[n + 1] = (x * out[n] - (n as f64).sqrt() * out[n - 1]) / ((n + 1) as f64).sqrt();
    }
    out
}

/// Trapezoid rule on a sorted, possibly non-uniform grid.
pub fn trapezoid(grid: &[f64], f: &[f64]) -> f64 {
    grid.windows(2)
        .zip(f.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Trapezoid integral restricted to `[lo, hi]`, linearly interpolating the
/// integrand at interior cut points.
pub fn trapezoid_window(grid: &[f64], f: &[f64], lo: f64, hi: f64) -> f64 {
    let mut acc = 0.0;
    for k in 0..grid.len().saturating_sub(1) {
        let (x0, x1) = (grid[k], grid[k + 1]);
        let a = x0.max(lo);
        let b = x1.min(hi);
        if b <= a {
            continue;
        }
        let lerp = |x: f64| f[k] + (f[k + 1] - f[k]) * (x - x0) / (x1 - x0);
        acc += 0.5 * (b - a) * (lerp(a) + lerp(b));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{displace, coherent_amplitudes};

    #[test]
    fn laguerre_small_values() {
        // L_2^{(1)}(u) = (u^2 - 6u + 6)/2
        let l = laguerre_scaled(3, 1, 0.7);
        assert!((l[2].0 - (0.49 - 4.2 + 6.0) / 2.0).abs() < 1e-14);
        // L_3^{(0)}(u) = (-u^3 + 9u^2 - 18u + 6)/6
        let l0 = laguerre_scaled(3, 0, 2.0);
        assert!((l0[3].0 - (-8.0 + 36.0 - 36.0 + 6.0) / 6.0).abs() < 1e-14);
    }

    #[test]
    fn analytic_displacement_matches_expm() {
        let beta = C64::new(0.8, -0.5);
        let c = 40;
        let exact = displacement_matrix(beta, c);
        let trunc = displace(&[c], 0, beta).unwrap();
        let block = 18;
        let diff = (exact.view((0, 0), (block, block)) - trunc.matrix().view((0, 0), (block, block))).camax();
        assert!(diff < 1e-10, "{diff}");
        let col = exact.column(0).into_owned();
        assert!((col - coherent_amplitudes(beta, c)).camax() < 1e-13);
    }

    #[test]
    fn laguerre_rule_integrates_polynomials() {
        let (x, lw) = gauss_laguerre(20);
        let w: Vec<f64> = lw.iter().map(|l| l.exp()).collect();
        let m0: f64 = w.iter().sum();
        let m5: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(5)).sum();
        assert!((m0 - 1.0).abs() < 1e-13);
        assert!((m5 / 120.0 - 1.0).abs() < 1e-12);
        let (x2, lw2) = gauss_laguerre(200);
        let s: f64 = lw2.iter().map(|l| l.exp()).sum();
        assert!((s - 1.0).abs() < 1e-10, "{s}");
        let m3: f64 = x2.iter().zip(&lw2).map(|(x, l)| l.exp() * x.powi(3)).sum();
        assert!((m3 / 6.0 - 1.0).abs() < 1e-11);
    }

    #[test]
    fn legendre_rule() {
        let (x, w) = gauss_legendre(10, -1.0, 2.0);
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((i - (32.0 + 1.0) / 5.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let grid: Vec<f64> = (0..4001).map(|i| -20.0 + 0.01 * i as f64).collect();
        let vals: Vec<Vec<f64>> = grid.iter().map(|&x| hermite_functions(x, 12)).collect();
        for n in 0..12 {
            for m in 0..12 {
                let f: Vec<f64> = vals.iter().map(|v| v[n] * v[m]).collect();
                let i = trapezoid(&grid, &f);
                let e = if n == m { 1.0 } else { 0.0 };
                assert!((i - e).abs() < 1e-10);
            }
        }
    }
}
