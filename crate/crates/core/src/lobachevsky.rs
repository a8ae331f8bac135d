//! The Lobachevsky function `Л(x) = -∫₀ˣ log|2 sin t| dt`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

const TERMS: usize = 40;

/// `|B_{2k}| / (2k (2k+1)!)` for `k = 1..=TERMS`.
fn coefficients() -> &'static [f64] {
    static C: OnceLock<Vec<f64>> = OnceLock::new();
    C.get_or_init(|| {
        let n = 2 * TERMS + 1;
        // Bernoulli numbers from Σ_{j=0}^{m} C(m+1, j) B_j = 0.
        let mut b: Vec<BigRational> = vec![BigRational::one()];
        let mut binom: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
        for m in 1..=n + 1 {
            let prev = &binom[m - 1];
            let mut row = vec![BigInt::one(); m + 1];
            for j in 1..m {
                row[j] = &prev[j - 1] + &prev[j];
            }
            binom.push(row);
        }
        for m in 1..=n {
            let s = (0..m).fold(BigRational::zero(), |acc, j| acc + BigRational::from(binom[m + 1][j].clone()) * &b[j]);
            b.push(-s / BigRational::from(binom[m + 1][m].clone()));
        }
        let mut fact = BigInt::one();
        let mut out = Vec::with_capacity(TERMS);
        for i in 1..=(2 * TERMS + 1) {
            fact *= BigInt::from(i);
            if i % 2 == 1 && i >= 3 {
                let k = (i - 1) / 2;
                let bk = b[2 * k].clone();
                let bk = if bk < BigRational::zero() { -bk } else { bk };
                let c = bk / BigRational::from(fact.clone() * BigInt::from(2 * k));
                out.push(c.to_f64().unwrap());
            }
        }
        out
    })
}

/// Clausen function `Cl₂(θ)` for `θ ∈ [0, π]`.
fn clausen(theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let t2 = theta * theta;
    let mut p = theta * t2;
    let mut s = theta - theta * theta.ln();
    for &c in coefficients() {
        let term = c * p;
        s += term;
        if term.abs() < 1e-18 * s.abs().max(1e-300) {
            break;
        }
        p *= t2;
    }
    s
}

/// `Л(x)`, odd and π-periodic.
pub fn lobachevsky(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let y = x.rem_euclid(PI);
    if y == 0.0 || y == FRAC_PI_2 {
        return 0.0;
    }
    if y > FRAC_PI_2 {
        -0.5 * clausen(2.0 * (PI - y))
    } else {
        0.5 * clausen(2.0 * y)
    }
}

/// `Л'(x) = -log|2 sin x|`.
pub fn lobachevsky_derivative(x: f64) -> f64 {
    -(2.0 * x.sin()).abs().ln()
}

/// Reference value of `Л(x)` for `x ∈ [0, π]` by adaptive Simpson
/// quadrature. The logarithmic singularities at `0` and `π` are integrated
/// in closed form, leaving the smooth integrand `log(sin t / (t (π - t)))`.
pub fn lobachevsky_quadrature(x: f64, tol: f64) -> f64 {
    assert!((0.0..=PI).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    let g = |t: f64| {
        if t == 0.0 || t == PI {
            -PI.ln()
        } else {
            (t.sin() / (t * (PI - t))).ln()
        }
    };
    let xlogx = |u: f64| if u == 0.0 { 0.0 } else { u * u.ln() };
    // ∫₀ˣ log t dt and ∫₀ˣ log(π - t) dt.
    let i_log = xlogx(x) - x;
    let i_log_rev = xlogx(PI) - PI - xlogx(PI - x) + (PI - x);
    let i_smooth = adaptive_simpson(&g, 0.0, x, tol);
    -(x * 2f64.ln() + i_log + i_log_rev + i_smooth)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}
