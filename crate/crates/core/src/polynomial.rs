//! Legendre polynomials, quadrature node computation and Lagrange interpolation
//! helpers shared by the temporal and spatial finite element modules.
//!
//! All rules are reported on the unit interval `[0, 1]` with weights summing
//! to one. Nodes are found by scanning for sign changes on a fine grid and
//! polishing each bracket with Newton's method to 1e-14.

/// Value and first derivative of the Legendre polynomial `P_n` at `x` in `[-1, 1]`.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let k = k as f64;
        let p_next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
        p_prev = p;
        p = p_next;
    }
    // (1 - x^2) P_n' = n (P_{n-1} - x P_n)
    let dp = if (1.0 - x * x).abs() > 1e-30 {
        n as f64 * (p_prev - x * p) / (1.0 - x * x)
    } else {
        // endpoint limit: P_n'(±1) = ±^{n+1} n(n+1)/2
        let sign = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        sign * (n * (n + 1)) as f64 / 2.0
    };
    (p, dp)
}

/// Roots of `f` in the open interval `(a, b)`, found by bracketing on a
/// uniform grid and Newton polishing. `df` is the derivative of `f`.
fn find_roots(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, a: f64, b: f64, count: usize) -> Vec<f64> {
    let n_grid = 200 * count.max(1);
    let mut roots = Vec::with_capacity(count);
    let mut prev_x = a;
    let mut prev_f = f(a);
    for i in 1..=n_grid {
        let x = a + (b - a) * i as f64 / n_grid as f64;
        let fx = f(x);
        if prev_f == 0.0 {
            roots.push(prev_x);
        } else if prev_f * fx < 0.0 {
            // bisect a few steps to stabilize, then Newton to 1e-14
            let (mut lo, mut hi) = (prev_x, x);
            for _ in 0..8 {
                let mid = 0.5 * (lo + hi);
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let mut r = 0.5 * (lo + hi);
            for _ in 0..60 {
                let step = f(r) / df(r);
                r -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            roots.push(r);
        }
        prev_x = x;
        prev_f = fx;
    }
    assert_eq!(roots.len(), count, "root bracketing failed");
    roots
}

/// `n`-point Gauss-Legendre rule on `[0, 1]`; weights sum to one.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let roots = find_roots(
        |x| legendre(n, x).0,
        |x| legendre(n, x).1,
        -1.0 + 1e-12,
        1.0 - 1e-12,
        n,
    );
    let mut points = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x in &roots {
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points.push(0.5 * (x + 1.0));
        weights.push(0.5 * w);
    }
    (points, weights)
}

/// `n`-point Gauss-Lobatto nodes on `[0, 1]` (n >= 2), endpoints included.
pub fn gauss_lobatto_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    // interior nodes are the roots of P'_{n-1}
    let interior = if n > 2 {
        find_roots(
            |x| legendre(n - 1, x).1,
            |x| {
                // (1 - x^2) P'' = 2 x P' - m(m+1) P
                let m = n - 1;
                let (p, dp) = legendre(m, x);
                (2.0 * x * dp - (m * (m + 1)) as f64 * p) / (1.0 - x * x)
            },
            -1.0 + 1e-9,
            1.0 - 1e-9,
            n - 2,
        )
    } else {
        Vec::new()
    };
    let mut nodes = vec![0.0];
    nodes.extend(interior.iter().map(|x| 0.5 * (x + 1.0)));
    nodes.push(1.0);
    nodes
}

/// `n`-point left Gauss-Radau nodes on `[0, 1]`, left endpoint included.
pub fn gauss_radau_left_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![0.0];
    }
    // interior nodes are the roots of (P_{n-1} + P_n) / (1 + x)
    let interior = find_roots(
        |x| legendre(n - 1, x).0 + legendre(n, x).0,
        |x| legendre(n - 1, x).1 + legendre(n, x).1,
        -1.0 + 1e-6,
        1.0 - 1e-12,
        n - 1,
    );
    let mut nodes = vec![0.0];
    nodes.extend(interior.iter().map(|x| 0.5 * (x + 1.0)));
    nodes
}

/// `n`-point right Gauss-Radau nodes on `[0, 1]`, right endpoint included.
pub fn gauss_radau_right_nodes(n: usize) -> Vec<f64> {
    let mut nodes: Vec<f64> = gauss_radau_left_nodes(n).iter().map(|t| 1.0 - t).collect();
    nodes.reverse();
    nodes
}

/// Value of the `i`-th Lagrange basis polynomial through `nodes` at `t`,
/// evaluated in barycentric form.
pub fn lagrange_value(nodes: &[f64], bary_weights: &[f64], i: usize, t: f64) -> f64 {
    // node hit: exact Kronecker delta
    for (j, &tj) in nodes.iter().enumerate() {
        if (t - tj).abs() < 1e-14 {
            return if i == j { 1.0 } else { 0.0 };
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, (&tj, &wj)) in nodes.iter().zip(bary_weights).enumerate() {
        let term = wj / (t - tj);
        den += term;
        if j == i {
            num = term;
        }
    }
    num / den
}

/// Derivative of the `i`-th Lagrange basis polynomial through `nodes` at `t`,
/// via the product-rule expansion (exact for any `t` including nodes).
pub fn lagrange_derivative(nodes: &[f64], i: usize, t: f64) -> f64 {
    let mut denom = 1.0;
    for (k, &tk) in nodes.iter().enumerate() {
        if k != i {
            denom *= nodes[i] - tk;
        }
    }
    let mut sum = 0.0;
    for j in 0..nodes.len() {
        if j == i {
            continue;
        }
        let mut prod = 1.0;
        for (k, &tk) in nodes.iter().enumerate() {
            if k != i && k != j {
                prod *= t - tk;
            }
        }
        sum += prod;
    }
    sum / denom
}

/// Barycentric weights `w_i = 1 / prod_{k != i} (t_i - t_k)` for `nodes`.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(i, &ti)| {
            let mut w = 1.0;
            for (k, &tk) in nodes.iter().enumerate() {
                if k != i {
                    w /= ti - tk;
                }
            }
            w
        })
        .collect()
}
