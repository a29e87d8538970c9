//! Direct quadrature ground truth: Mellin convolutions of kernels, numeric Mellin
//! transforms, and Wright series.

use num_complex::Complex64;

use crate::construct::ConvolutionSpec;
use crate::error::{Error, Result};
use crate::num::MellinStrip;
use crate::quad::{integrate, Quad, QuadOpts};

/// Where a nonnegative function may be nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// `(0, inf)`
    Full,
    /// `(0, 1)`
    Unit,
    /// `(1, inf)`
    Above,
}

impl Support {
    /// Range of `u = ln t`.
    pub fn log_range(self) -> (f64, f64) {
        match self {
            Support::Full => (f64::NEG_INFINITY, f64::INFINITY),
            Support::Unit => (f64::NEG_INFINITY, 0.0),
            Support::Above => (0.0, f64::INFINITY),
        }
    }
}

/// A real function on `(0, inf)` addressed through `u = ln t`.
pub trait PointFn: Sync {
    /// `g(e^u) e^{w u}`; the weight lets callers stay in range at extreme `u`.
    fn eval_weighted(&self, u: f64, w: f64) -> Result<f64>;

    fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("t = {t} must be positive")));
        }
        self.eval_weighted(t.ln(), 0.0)
    }

    fn support(&self) -> Support {
        Support::Full
    }

    /// Declared Mellin strip, when known.
    fn strip(&self) -> Option<MellinStrip> {
        None
    }
}

impl<T: PointFn + ?Sized> PointFn for Box<T> {
    fn eval_weighted(&self, u: f64, w: f64) -> Result<f64> {
        (**self).eval_weighted(u, w)
    }
    fn support(&self) -> Support {
        (**self).support()
    }
    fn strip(&self) -> Option<MellinStrip> {
        (**self).strip()
    }
}

impl<T: PointFn + ?Sized> PointFn for &T {
    fn eval_weighted(&self, u: f64, w: f64) -> Result<f64> {
        (**self).eval_weighted(u, w)
    }
    fn support(&self) -> Support {
        (**self).support()
    }
    fn strip(&self) -> Option<MellinStrip> {
        (**self).strip()
    }
}

fn opts(tol: f64) -> QuadOpts {
    QuadOpts::rel(tol)
}

/// Farthest distance from the origin visited before a tail is done in closed form.
const TAIL_CUT: f64 = 640.0;

/// Where an infinite side of an integral over `x` is cut, and the tail past the cut
/// of `f(x) e^{i y x}`.
///
/// Walks from `origin` in direction `dir` until `f` is negligible. Near a strip
/// edge `f` decays like `e^{-d |x|}` with small `d`, which no cap can absorb, so past
/// `TAIL_CUT` it is taken as `e^{-d |x|} P(|x|)` with `P` a cubic (poles up to order
/// four at the edge). `d` is `rate` when known, else read off the last samples.
fn tail_cut<F: Fn(f64) -> Result<f64>>(
    f: F,
    origin: f64,
    dir: f64,
    rate: Option<f64>,
    y: f64,
    tol: f64,
) -> Result<(f64, Complex64)> {
    let zero = Complex64::new(0.0, 0.0);
    let mut peak = f(origin)?.abs();
    let mut u = 1.0;
    loop {
        let v = f(origin + dir * u)?;
        peak = peak.max(v.abs());
        if v.abs() <= 1e-3 * tol * peak {
            return Ok((origin + dir * u, zero));
        }
        if u >= TAIL_CUT {
            break;
        }
        u = (2.0 * u).min(TAIL_CUT);
    }
    let edge = origin + dir * u;
    const STEP: f64 = 4.0;
    let mut fy = [0.0; 4];
    for (k, v) in fy.iter_mut().enumerate() {
        *v = f(edge - dir * STEP * k as f64)?;
    }
    if fy[0] == 0.0 {
        return Ok((edge, zero));
    }
    let d = rate.filter(|r| r.is_finite()).unwrap_or_else(|| (fy[1].abs() / fy[0].abs()).ln() / STEP);
    if !(d > 0.0) {
        return Err(Error::NoConvergence(format!("integrand does not decay past x = {edge}")));
    }
    // P at z = 0, -1, -2, -3 (z = outward distance / STEP) as Newton differences.
    let p: Vec<f64> = (0..4).map(|k| fy[k] * (-d * STEP * k as f64).exp()).collect();
    let d1 = [p[0] - p[1], p[1] - p[2], p[2] - p[3]];
    let d2 = [d1[0] - d1[1], d1[1] - d1[2]];
    let d3 = d2[0] - d2[1];
    // P = p0 + d1 z + d2 z(z+1)/2 + d3 z(z+1)(z+2)/6, in powers of the distance.
    let c = [
        p[0],
        (d1[0] + d2[0] / 2.0 + d3 / 3.0) / STEP,
        (d2[0] / 2.0 + d3 / 2.0) / (STEP * STEP),
        (d3 / 6.0) / (STEP * STEP * STEP),
    ];
    let rho = Complex64::new(d, -dir * y);
    // int_0^inf x^j e^{-rho x} dx = j! / rho^{j+1}
    let mut sum = zero;
    let (mut fact, mut rp) = (1.0, rho);
    for (j, cj) in c.iter().enumerate() {
        if j > 0 {
            fact *= j as f64;
            rp *= rho;
        }
        sum += cj * fact / rp;
    }
    Ok((edge, sum * Complex64::new(0.0, edge * y).exp()))
}

/// Finite pieces only, so no cap on the abscissa.
fn line_opts(tol: f64) -> QuadOpts {
    QuadOpts { cap: f64::INFINITY, ..opts(tol) }
}

/// `e^{w u} (g1 v g2)(e^u)` by quadrature in `v = ln tau`.
fn convolve_log<A: PointFn + ?Sized, B: PointFn + ?Sized>(
    g1: &A,
    g2: &B,
    u: f64,
    w: f64,
    tol: f64,
) -> Result<Quad<f64>> {
    // g2(e^v) needs v in its own range; g1(e^{u - v}) needs u - v in g1's.
    let (a2, b2) = g2.support().log_range();
    let (a1, b1) = g1.support().log_range();
    let (mut lo, mut hi) = (a2.max(u - b1), b2.min(u - a1));
    let h = |v: f64| Ok(g1.eval_weighted(u - v, w)? * g2.eval_weighted(v, w)?);
    // Decay rates in v follow from the two strips and do not depend on w.
    let (s1, s2) = (g1.strip(), g2.strip());
    let rate = |f: fn(&MellinStrip, &MellinStrip) -> f64| s1.as_ref().zip(s2.as_ref()).map(|(x, y)| f(x, y));
    let mut tail = 0.0;
    if lo.is_infinite() {
        let (e, t) = tail_cut(h, u.min(0.0), -1.0, rate(|x, y| x.hi.f() - y.lo.f()), 0.0, tol)?;
        lo = e;
        tail += t.re;
    }
    if hi.is_infinite() {
        let (e, t) = tail_cut(h, u.max(0.0), 1.0, rate(|x, y| y.hi.f() - x.lo.f()), 0.0, tol)?;
        hi = e;
        tail += t.re;
    }
    let mut r = integrate(h, lo, hi, &[0.0, u], &line_opts(tol))?;
    r.value += tail;
    Ok(r)
}

/// Mellin convolution `int_0^inf g1(t/tau) g2(tau) dtau / tau`.
pub fn convolve_pair(g1: &dyn PointFn, g2: &dyn PointFn, t: f64, tol: f64) -> Result<Quad<f64>> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    convolve_log(g1, g2, t.ln(), 0.0, tol)
}

/// The convolution of two functions as a function in its own right.
pub struct Convolution<A, B> {
    pub g1: A,
    pub g2: B,
    pub tol: f64,
}

impl<A: PointFn, B: PointFn> Convolution<A, B> {
    pub fn eval_log_with_err(&self, u: f64, w: f64) -> Result<Quad<f64>> {
        convolve_log(&self.g1, &self.g2, u, w, self.tol)
    }
}

impl<A: PointFn, B: PointFn> PointFn for Convolution<A, B> {
    fn eval_weighted(&self, u: f64, w: f64) -> Result<f64> {
        Ok(self.eval_log_with_err(u, w)?.value)
    }

    fn support(&self) -> Support {
        match (self.g1.support(), self.g2.support()) {
            (Support::Unit, Support::Unit) => Support::Unit,
            (Support::Above, Support::Above) => Support::Above,
            _ => Support::Full,
        }
    }

    fn strip(&self) -> Option<MellinStrip> {
        Some(self.g1.strip()?.intersect(&self.g2.strip()?))
    }
}

/// Nested quadrature is only affordable up to this many kernels.
pub const MAX_ORACLE_KERNELS: usize = 3;

/// The function `f` of a convolution spec: its kernels folded left in list order.
pub fn spec_function(spec: &ConvolutionSpec, tol: f64) -> Result<Box<dyn PointFn + Send>> {
    let v = spec.violations();
    if !v.is_empty() {
        return Err(Error::SpecInvalid(v));
    }
    let ks = spec.kernels();
    if ks.len() > MAX_ORACLE_KERNELS {
        return Err(Error::TooManyKernels(ks.len()));
    }
    let mut it = ks.iter();
    let first = it
        .next()
        .ok_or_else(|| Error::SpecInvalid(vec![crate::hfun::Violation::new("nonempty", "spec has no kernels")]))?;
    let mut acc: Box<dyn PointFn + Send> = Box::new(first.prepare()?);
    for k in it {
        acc = Box::new(Convolution { g1: acc, g2: k.prepare()?, tol });
    }
    Ok(acc)
}

/// `f(t)` with an error estimate from the outermost quadrature.
pub fn eval_f_with_err(spec: &ConvolutionSpec, t: f64, tol: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let ks = spec.kernels();
    let f = spec_function(spec, tol)?;
    if ks.len() == 1 {
        return Ok((f.eval(t)?, 0.0));
    }
    // Rebuild the last fold step so its error estimate is visible.
    let last = ks.last().expect("nonempty").prepare()?;
    let head = ConvolutionSpec::from_kernels(&ks[..ks.len() - 1]);
    let g1 = spec_function(&head, tol)?;
    let r = Convolution { g1, g2: last, tol }.eval_log_with_err(t.ln(), 0.0)?;
    Ok((r.value, r.abs_err))
}

pub fn eval_f(spec: &ConvolutionSpec, t: f64, tol: f64) -> Result<f64> {
    Ok(eval_f_with_err(spec, t, tol)?.0)
}

/// `int_0^inf g(t) t^{s-1} dt` through `t = e^u`.
pub fn mellin_numeric(g: &dyn PointFn, s: Complex64, tol: f64) -> Result<Quad<Complex64>> {
    let strip = g.strip();
    if let Some(st) = &strip {
        if !st.contains(s.re) {
            return Err(Error::OutOfStrip { re: s.re, lo: st.lo.f(), hi: st.hi.f() });
        }
    }
    let (mut lo, mut hi) = g.support().log_range();
    let f = |u: f64| g.eval_weighted(u, s.re);
    let mut tail = Complex64::new(0.0, 0.0);
    if lo.is_infinite() {
        let (e, t) = tail_cut(f, 0.0, -1.0, strip.as_ref().map(|st| s.re - st.lo.f()), s.im, tol)?;
        lo = e;
        tail += t;
    }
    if hi.is_infinite() {
        let (e, t) = tail_cut(f, 0.0, 1.0, strip.as_ref().map(|st| st.hi.f() - s.re), s.im, tol)?;
        hi = e;
        tail += t;
    }
    let o = line_opts(tol);
    let mut r = if s.im == 0.0 {
        let r = integrate(f, lo, hi, &[0.0], &o)?;
        Quad { value: Complex64::new(r.value, 0.0), abs_err: r.abs_err, evals: r.evals }
    } else {
        integrate(|u: f64| Ok(f(u)? * Complex64::new(0.0, u * s.im).exp()), lo, hi, &[0.0], &o)?
    };
    r.value += tail;
    Ok(r)
}

/// Sum of `z^k / k! * prod Gamma(a + A k) / prod Gamma(b + B k)` for `|z| <= 10`.
pub fn wright_series(upper: &[(f64, f64)], lower: &[(f64, f64)], z: f64) -> Result<f64> {
    if z.abs() > 10.0 {
        return Err(Error::Domain(format!("series oracle limited to |z| <= 10, got {z}")));
    }
    let lg = |x: f64| -> Option<(f64, f64)> {
        if x <= 0.0 && x == x.round() {
            return None;
        }
        let (l, s) = libm::lgamma_r(x);
        Some((l, s as f64))
    };
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..2000usize {
        let kf = k as f64;
        let mut ln = if z == 0.0 {
            if k == 0 { 0.0 } else { break }
        } else {
            kf * z.abs().ln()
        };
        let mut sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        ln -= libm::lgamma(kf + 1.0);
        let mut zero = false;
        for &(a, ak) in upper {
            match lg(a + ak * kf) {
                Some((l, s)) => {
                    ln += l;
                    sign *= s;
                }
                None => return Err(Error::Pole { re: a + ak * kf, im: 0.0 }),
            }
        }
        for &(b, bk) in lower {
            match lg(b + bk * kf) {
                Some((l, s)) => {
                    ln -= l;
                    sign *= s;
                }
                None => zero = true,
            }
        }
        if zero {
            continue;
        }
        let term = sign * ln.exp();
        sum += term;
        let mag = term.abs();
        if k > 2 && mag < prev && mag <= 1e-16 * sum.abs() {
            return Ok(sum);
        }
        prev = mag;
    }
    if z == 0.0 {
        return Ok(sum);
    }
    Err(Error::NoConvergence("Wright series did not converge".into()))
}
