//! Quadrature rules: Gauss-Legendre nodes and double-exponential integration
//! over finite and half-infinite pieces.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

pub(crate) fn gl16() -> &'static [(f64, f64)] {
    static R: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(16))
}

pub(crate) fn gl32() -> &'static [(f64, f64)] {
    static R: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(32))
}

/// Values an integrator can accumulate.
pub trait Scalar:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign
{
    fn magnitude(self) -> f64;
}

impl Scalar for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Quad<T> {
    pub value: T,
    pub abs_err: f64,
    pub evals: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Abscissae with `|x| > cap` contribute nothing.
    pub cap: f64,
    pub max_level: u32,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts { rel_tol: 1e-10, abs_tol: 1e-300, cap: 700.0, max_level: 9 }
    }
}

impl QuadOpts {
    pub fn rel(rel_tol: f64) -> QuadOpts {
        QuadOpts { rel_tol, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Finite(f64, f64),
    Above(f64),
    Below(f64),
}

impl Piece {
    fn u_range(self) -> (f64, f64) {
        match self {
            Piece::Finite(..) => (-3.5, 3.5),
            Piece::Above(_) | Piece::Below(_) => (-4.5, 3.5),
        }
    }

    /// Abscissa and Jacobian at `u`.
    #[inline]
    fn map(self, u: f64) -> (f64, f64) {
        let s = FRAC_PI_2 * u.sinh();
        let c = FRAC_PI_2 * u.cosh();
        match self {
            Piece::Finite(a, b) => {
                let half = 0.5 * (b - a);
                // 1 +- tanh(s) without cancellation.
                let e = (-2.0 * s.abs()).exp();
                let near = 2.0 * e / (1.0 + e);
                let x = if s < 0.0 { a + half * near } else { b - half * near };
                let ch = s.cosh();
                (x, half * c / (ch * ch))
            }
            Piece::Above(a) => {
                let e = s.exp();
                (a + e, c * e)
            }
            Piece::Below(b) => {
                let e = s.exp();
                (b - e, c * e)
            }
        }
    }
}

fn de_piece<T: Scalar, F: FnMut(f64) -> Result<T>>(
    piece: Piece,
    f: &mut F,
    o: &QuadOpts,
) -> Result<Quad<T>> {
    let (u0, u1) = piece.u_range();
    let mut evals = 0usize;
    // None once the abscissa leaves the capped range.
    let mut term = |u: f64, evals: &mut usize| -> Result<Option<T>> {
        let (x, w) = piece.map(u);
        if x.abs() > o.cap || !w.is_finite() {
            return Ok(None);
        }
        if w == 0.0 {
            return Ok(Some(T::default()));
        }
        *evals += 1;
        Ok(Some(f(x)? * w))
    };

    // Coarse pass walking outward from u = 0; it also fixes how far out later levels go.
    let mut h = 0.5;
    let mut raw = term(0.0, &mut evals)?.unwrap_or_default();
    let mut peak = raw.magnitude();
    let mut lim = [0.0f64; 2];
    let thr = (1e-5 * o.rel_tol).min(1e-15);
    for (side, dir) in [-1.0f64, 1.0].into_iter().enumerate() {
        let mut small = 0;
        let mut k = 1;
        loop {
            let u = dir * k as f64 * h;
            if u < u0 || u > u1 {
                break;
            }
            let Some(t) = term(u, &mut evals)? else {
                // Past the cap; later levels still fill in up to it.
                lim[side] = u;
                break;
            };
            raw += t;
            lim[side] = u;
            let mag = t.magnitude();
            peak = peak.max(mag);
            if peak > 0.0 && mag <= thr * peak {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
            k += 1;
        }
    }
    let (lo, hi) = (lim[0], lim[1]);
    let mut prev = raw * h;
    for level in 1..=o.max_level {
        h *= 0.5;
        let k0 = (lo / h).ceil() as i64;
        let k1 = (hi / h).floor() as i64;
        let mut k = if k0.rem_euclid(2) == 0 { k0 + 1 } else { k0 };
        while k <= k1 {
            if let Some(t) = term(k as f64 * h, &mut evals)? {
                raw += t;
            }
            k += 2;
        }
        let cur = raw * h;
        let err = (cur - prev).magnitude();
        if level >= 2 && err <= o.abs_tol.max(o.rel_tol * cur.magnitude()) {
            return Ok(Quad { value: cur, abs_err: err, evals });
        }
        prev = cur;
    }
    Err(Error::NoConvergence(format!(
        "double-exponential quadrature did not settle on {piece:?} after {evals} evaluations"
    )))
}

/// `int_a^b f(x) dx` with `a`, `b` possibly infinite, split at the interior `breaks`.
pub fn integrate<T: Scalar, F: FnMut(f64) -> Result<T>>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    o: &QuadOpts,
) -> Result<Quad<T>> {
    if !(a < b) {
        return Ok(Quad { value: T::default(), abs_err: 0.0, evals: 0 });
    }
    let mut pts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| *x > a && *x < b && x.is_finite())
        .collect();
    pts.sort_by(|x, y| x.total_cmp(y));
    pts.dedup();
    let mut pieces = Vec::new();
    let mut left = a;
    for &x in &pts {
        pieces.push((left, x));
        left = x;
    }
    pieces.push((left, b));
    let mut total = Quad { value: T::default(), abs_err: 0.0, evals: 0 };
    for (lo, hi) in pieces {
        let piece = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => Piece::Finite(lo, hi),
            (true, false) => Piece::Above(lo),
            (false, true) => Piece::Below(hi),
            (false, false) => {
                let r0 = de_piece(Piece::Below(0.0), &mut f, o)?;
                let r1 = de_piece(Piece::Above(0.0), &mut f, o)?;
                total.value += r0.value + r1.value;
                total.abs_err += r0.abs_err + r1.abs_err;
                total.evals += r0.evals + r1.evals;
                continue;
            }
        };
        let r = de_piece(piece, &mut f, o)?;
        total.value += r.value;
        total.abs_err += r.abs_err;
        total.evals += r.evals;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rules_integrate_polynomials() {
        for n in [5, 16, 32] {
            let r = gauss_legendre(n);
            let s: f64 = r.iter().map(|(_, w)| w).sum();
            assert!((s - 2.0).abs() < 1e-14);
            for d in 0..(2 * n) {
                let i: f64 = r.iter().map(|(x, w)| w * x.powi(d as i32)).sum();
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!((i - exact).abs() < 1e-13, "n={n} d={d}");
            }
            assert!(r.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn finite_and_infinite_pieces() {
        let o = QuadOpts::rel(1e-12);
        let r = integrate(|x: f64| Ok(x.sqrt()), 0.0, 1.0, &[], &o).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-13);
        let r = integrate(|x: f64| Ok((-x).exp()), 0.0, f64::INFINITY, &[], &o).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
        let r = integrate(|x: f64| Ok((-x * x).exp()), f64::NEG_INFINITY, f64::INFINITY, &[], &o)
            .unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        // Kink at 0.3.
        let r = integrate(|x: f64| Ok((x - 0.3).abs()), 0.0, 1.0, &[0.3], &o).unwrap();
        assert!((r.value - 0.29).abs() < 1e-14);
        // Slow exponential decay.
        let r = integrate(|x: f64| Ok((-0.05 * x).exp()), 0.0, f64::INFINITY, &[], &o).unwrap();
        assert!((r.value - 20.0).abs() < 1e-9);
    }

    #[test]
    fn complex_integrand() {
        let o = QuadOpts::rel(1e-12);
        let r = integrate(
            |x: f64| Ok(Complex64::new(0.0, 2.0 * x).exp() * (-x).exp()),
            0.0,
            f64::INFINITY,
            &[],
            &o,
        )
        .unwrap();
        let exact = Complex64::new(1.0, 0.0) / Complex64::new(1.0, -2.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn errors_propagate() {
        let r = integrate::<f64, _>(|_| Err(Error::Domain("x".into())), 0.0, 1.0, &[], &QuadOpts::default());
        assert!(r.is_err());
    }
}
