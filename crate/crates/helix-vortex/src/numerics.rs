//! Shared numerical plumbing: compensated summation, Gauss-Legendre rules
//! and panel generation for near-singular integrands.

use std::sync::OnceLock;

/// Kahan-Babuska-Neumaier compensated accumulator.
///
/// Reductions over particles and quadrature nodes use this so that results
/// are independent of how work is partitioned across threads: every sum is
/// carried out in a fixed index order with a running compensation term.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sums an iterator with compensation.
pub fn sum_compensated<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in iter {
        acc.add(v);
    }
    acc.value()
}

pub const MAX_GAUSS_ORDER: usize = 32;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed once per order by Newton iteration on the Legendre polynomial
/// and cached for the lifetime of the process.
pub fn gauss_legendre(order: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static TABLES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        (0..=MAX_GAUSS_ORDER)
            .map(|n| if n == 0 { (Vec::new(), Vec::new()) } else { compute_gauss_legendre(n) })
            .collect()
    });
    assert!(
        order >= 1 && order <= MAX_GAUSS_ORDER,
        "Gauss-Legendre order {order} outside 1..={MAX_GAUSS_ORDER}"
    );
    &tables[order]
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence: p2 = P_n(x), dp = P_n'(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Integrates `f` over [a, b] with a single Gauss-Legendre rule.
pub fn gauss_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = CompensatedSum::new();
    for (x, w) in nodes.iter().zip(weights) {
        acc.add(w * f(mid + half * x));
    }
    half * acc.value()
}

/// Adaptive Gauss-Legendre integration by interval bisection.
///
/// Each interval is accepted when a 15-point estimate agrees with the sum of
/// the two 15-point half-interval estimates to `tol` (scaled by length), so
/// the result carries an absolute error well below `tol`.
pub fn adaptive_gauss<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: FnMut(f64) -> f64>(
        f: &mut F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let mid = 0.5 * (a + b);
        let left = gauss_panel(f, a, mid, 15);
        let right = gauss_panel(f, mid, b, 15);
        if depth >= 40 || (left + right - whole).abs() <= tol {
            return left + right;
        }
        recurse(f, a, mid, left, 0.5 * tol, depth + 1)
            + recurse(f, mid, b, right, 0.5 * tol, depth + 1)
    }
    let whole = gauss_panel(f, a, b, 15);
    recurse(f, a, b, whole, tol, 0)
}

/// Panel boundaries on [lo, hi] refined geometrically toward `center`.
///
/// The innermost panels have half-width `w0` around `center`; widths double
/// moving outward. Extra breakpoints force panel edges at integrand kinks.
/// At least `min_panels` panels are produced by splitting the widest panels.
pub fn geometric_panels(
    lo: f64,
    hi: f64,
    center: f64,
    w0: f64,
    min_panels: usize,
    extra_breaks: &[f64],
) -> Vec<f64> {
    assert!(lo < hi && w0 > 0.0);
    let c = center.clamp(lo, hi);
    let mut edges = vec![lo, hi];
    if c > lo && c < hi {
        edges.push(c);
    }
    let mut w = w0;
    loop {
        let mut grew = false;
        let left = c - w;
        if left > lo + 1e-12 * (hi - lo) {
            edges.push(left);
            grew = true;
        }
        let right = c + w;
        if right < hi - 1e-12 * (hi - lo) {
            edges.push(right);
            grew = true;
        }
        if !grew {
            break;
        }
        w *= 2.0;
    }
    for &b in extra_breaks {
        if b > lo && b < hi {
            edges.push(b);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (hi - lo));
    while edges.len() - 1 < min_panels {
        // Split the widest panel in half.
        let (k, _) = edges
            .windows(2)
            .map(|p| p[1] - p[0])
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        edges.insert(k + 1, 0.5 * (edges[k] + edges[k + 1]));
    }
    edges
}

/// Integrates `f` over the panels defined by `edges` with a fixed-order rule.
pub fn integrate_panels<F: FnMut(f64) -> f64>(f: &mut F, edges: &[f64], order: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for pair in edges.windows(2) {
        acc.add(gauss_panel(f, pair[0], pair[1], order));
    }
    acc.value()
}
