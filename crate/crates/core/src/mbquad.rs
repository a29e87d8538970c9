//! Mellin-Barnes evaluation of `H(t)` for real `t > 0` along a vertical contour.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::log_gamma_unchecked;
use crate::hfun::{char_params, pole_separation, strip_bounds, FoxHParams};
use crate::num::MellinStrip;
use crate::oracle::{PointFn, Support};
use crate::quad::{gauss_legendre, gl16, gl32};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalOptions {
    /// Target absolute error.
    pub tol: f64,
    /// Fixed `Re(s)` of the contour; chosen per point when absent.
    pub contour_re: Option<f64>,
    /// Largest `Im(s)` the quadrature may reach.
    pub max_height: f64,
    /// Gauss-Legendre nodes per panel (even).
    pub panel_order: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { tol: 1e-10, contour_re: None, max_height: 1e4, panel_order: 32 }
    }
}

impl EvalOptions {
    pub fn with_tol(tol: f64) -> EvalOptions {
        EvalOptions { tol, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub abs_err_est: f64,
    pub height_used: f64,
    pub panels: usize,
    /// Imaginary part left over by the two-sided sum; zero in exact arithmetic.
    pub imag_residual: f64,
    pub contour_re: f64,
}

/// `Gamma(c0 + k s)^sign`.
#[derive(Clone, Copy, Debug)]
struct Factor {
    sign: f64,
    c0: f64,
    k: f64,
}

fn factors(h: &FoxHParams) -> Vec<Factor> {
    let mut f = Vec::with_capacity(h.p + h.q);
    for (j, p) in h.lower.iter().enumerate() {
        let (b, bk) = p.f();
        f.push(if j < h.m {
            Factor { sign: 1.0, c0: b, k: bk }
        } else {
            Factor { sign: -1.0, c0: 1.0 - b, k: -bk }
        });
    }
    for (j, p) in h.upper.iter().enumerate() {
        let (a, ak) = p.f();
        f.push(if j < h.n {
            Factor { sign: 1.0, c0: 1.0 - a, k: -ak }
        } else {
            Factor { sign: -1.0, c0: a, k: ak }
        });
    }
    f
}

#[inline]
fn ln_xi_factors(fs: &[Factor], s: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for f in fs {
        acc += log_gamma_unchecked(s * f.k + f.c0) * f.sign;
    }
    acc
}

fn near_pole(z: Complex64, eps: f64) -> bool {
    z.re < 0.5 && z.im.abs() <= eps && (z.re - z.re.round()).abs() <= eps
}

/// `ln Xi(s)`, summed over principal log-Gamma branches.
pub fn ln_xi(h: &FoxHParams, s: Complex64) -> Result<Complex64> {
    h.check()?;
    let fs = factors(h);
    for f in &fs {
        let z = s * f.k + f.c0;
        if near_pole(z, 1e-12) {
            return Err(Error::Pole { re: z.re, im: z.im });
        }
    }
    Ok(ln_xi_factors(&fs, s))
}

/// The Gamma-product kernel `Xi(s)`.
pub fn xi_value(h: &FoxHParams, s: Complex64) -> Result<Complex64> {
    Ok(ln_xi(h, s)?.exp())
}

/// A parameter set prepared for repeated evaluation.
#[derive(Clone, Debug)]
pub struct HEvaluator {
    params: FoxHParams,
    factors: Vec<Factor>,
    strip: MellinStrip,
    lo: f64,
    hi: f64,
    /// `pi chi / 2`, the exponential decay rate of `|Xi(c + iy)|`.
    lambda: f64,
    kmax: f64,
    opts: EvalOptions,
    rule: Vec<(f64, f64)>,
    check_rule: Vec<(f64, f64)>,
}

struct Panel {
    main: Complex64,
    mirror: Complex64,
    est: f64,
    mag: f64,
    end_mag: f64,
    phase: f64,
}

const PROBE_Y: [f64; 4] = [0.0, 0.5, 1.5, 3.0];
const MAX_PANELS: usize = 200_000;

impl HEvaluator {
    pub fn new(h: &FoxHParams, opts: EvalOptions) -> Result<HEvaluator> {
        h.check()?;
        if !(opts.tol > 0.0) {
            return Err(Error::Domain(format!("tol = {} must be positive", opts.tol)));
        }
        if opts.panel_order < 4 || opts.panel_order % 2 != 0 {
            return Err(Error::Domain(format!(
                "panel order {} must be even and at least 4",
                opts.panel_order
            )));
        }
        let chi = char_params(h).chi;
        if !chi.is_positive() {
            return Err(Error::ChiNonpositive(chi.f()));
        }
        let strip = strip_bounds(h);
        if strip.is_empty() {
            return Err(Error::StripEmpty { lo: strip.lo.f(), hi: strip.hi.f() });
        }
        let pc = pole_separation(h);
        if let Some(c) = pc.clash {
            return Err(Error::PreconditionFailed(format!(
                "pole separation fails: upper pair {} and lower pair {} share a pole",
                c.upper, c.lower
            )));
        }
        if let Some(c) = opts.contour_re {
            if !strip.contains(c) {
                return Err(Error::OutOfStrip { re: c, lo: strip.lo.f(), hi: strip.hi.f() });
            }
        }
        let fs = factors(h);
        let kmax = fs.iter().map(|f| f.k.abs()).fold(0.0, f64::max);
        let (rule, check_rule) = match opts.panel_order {
            32 => (gl32().to_vec(), gl16().to_vec()),
            n => (gauss_legendre(n), gauss_legendre(n / 2)),
        };
        Ok(HEvaluator {
            params: h.clone(),
            factors: fs,
            lo: strip.lo.f(),
            hi: strip.hi.f(),
            strip,
            lambda: 0.5 * PI * chi.f(),
            kmax,
            opts,
            rule,
            check_rule,
        })
    }

    pub fn params(&self) -> &FoxHParams {
        &self.params
    }

    pub fn options(&self) -> &EvalOptions {
        &self.opts
    }

    pub fn mellin_strip(&self) -> &MellinStrip {
        &self.strip
    }

    #[inline]
    fn ln_xi(&self, s: Complex64) -> Complex64 {
        ln_xi_factors(&self.factors, s)
    }

    fn objective(&self, c: f64, ln_t: f64) -> f64 {
        let m = PROBE_Y
            .iter()
            .map(|&y| self.ln_xi(Complex64::new(c, y)).re)
            .filter(|v| !v.is_nan())
            .fold(f64::NEG_INFINITY, f64::max);
        m - c * ln_t
    }

    /// Contour abscissa minimising the peak integrand magnitude for this `t`.
    pub fn choose_contour(&self, ln_t: f64) -> f64 {
        if let Some(c) = self.opts.contour_re {
            return c;
        }
        let reach = 60.0 / self.kmax.max(1e-300);
        let (a, b) = match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let d = 1e-3 * (self.hi - self.lo).min(1.0);
                (self.lo + d, self.hi - d)
            }
            (true, false) => (self.lo + 1e-3, self.lo + reach),
            (false, true) => (self.hi - reach, self.hi - 1e-3),
            (false, false) => (-reach, reach),
        };
        const N: usize = 16;
        let step = (b - a) / (N - 1) as f64;
        let mut best = (f64::INFINITY, a);
        for i in 0..N {
            let c = a + step * i as f64;
            let v = self.objective(c, ln_t);
            if v < best.0 {
                best = (v, c);
            }
        }
        // Golden-section refinement inside the neighbouring grid cells.
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut x0, mut x1) = ((best.1 - step).max(a), (best.1 + step).min(b));
        let mut p = x1 - g * (x1 - x0);
        let mut q = x0 + g * (x1 - x0);
        let (mut fp, mut fq) = (self.objective(p, ln_t), self.objective(q, ln_t));
        for _ in 0..18 {
            if fp < fq {
                x1 = q;
                q = p;
                fq = fp;
                p = x1 - g * (x1 - x0);
                fp = self.objective(p, ln_t);
            } else {
                x0 = p;
                p = q;
                fp = fq;
                q = x0 + g * (x1 - x0);
                fq = self.objective(q, ln_t);
            }
        }
        let mut c = if fp.min(fq) <= best.0 { if fp < fq { p } else { q } } else { best.1 };
        // Keep clear of zeros of Xi on the real axis.
        let mid = if self.lo.is_finite() && self.hi.is_finite() {
            0.5 * (self.lo + self.hi)
        } else if self.lo.is_finite() {
            self.lo + 1.0
        } else if self.hi.is_finite() {
            self.hi - 1.0
        } else {
            0.0
        };
        for _ in 0..8 {
            let hit = self
                .factors
                .iter()
                .any(|f| near_pole(Complex64::new(f.c0 + f.k * c, 0.0), 1e-6));
            if !hit {
                break;
            }
            c += if mid > c { 1e-3 } else { -1e-3 };
        }
        c
    }

    fn panel(&self, c: f64, ln_t: f64, shift: f64, y0: f64, y1: f64) -> Panel {
        let half = 0.5 * (y1 - y0);
        let mid = 0.5 * (y1 + y0);
        let f = |y: f64| -> Complex64 {
            let s = Complex64::new(c, y);
            (self.ln_xi(s) - Complex64::new(shift, y * ln_t)).exp()
        };
        let mut main = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        let mut phase = 0.0;
        let mut last: Option<Complex64> = None;
        let mut end_mag = 0.0;
        for &(x, w) in &self.rule {
            let v = f(mid + half * x);
            main += v * w;
            mag += v.norm() * w;
            if let Some(l) = last {
                if l.norm() > 0.0 && v.norm() > 0.0 {
                    phase += (v / l).arg().abs();
                }
            }
            last = Some(v);
            end_mag = v.norm();
        }
        // Same panel seen from the conjugate side: -y1..-y0.
        let mut mirror = Complex64::new(0.0, 0.0);
        for &(x, w) in &self.check_rule {
            mirror += f(-mid + half * x) * w;
        }
        main *= half;
        mirror *= half;
        let est = (main - mirror.conj()).norm();
        Panel { main, mirror, est, mag: mag * half, end_mag, phase }
    }

    /// `H(e^{ln_t}) e^{w ln_t}` with diagnostics.
    pub fn eval_log_weighted(&self, ln_t: f64, w: f64) -> Result<EvalResult> {
        if !ln_t.is_finite() {
            return Err(Error::Domain(format!("ln t = {ln_t} is not finite")));
        }
        let c = self.choose_contour(ln_t);
        let shift = (c - w) * ln_t;
        let args: Vec<(f64, f64)> =
            self.factors.iter().map(|f| (f.sign, f.c0 + f.k * c)).collect();
        let d_pole = self
            .factors
            .iter()
            .zip(&args)
            .filter(|(f, _)| f.sign > 0.0)
            .map(|(f, (_, z))| z / f.k.abs())
            .fold(f64::INFINITY, f64::min)
            .max(1e-8);
        let sigma: f64 = args.iter().map(|(sg, z)| sg * (z - 0.5)).sum();
        let sig_plus = sigma.max(0.0);
        let y_asym = self
            .factors
            .iter()
            .zip(&args)
            .map(|(f, (_, z))| (2.0 * z.abs() + 4.0) / f.k.abs())
            .fold(0.0, f64::max);
        let lam = self.lambda;
        let y_min = y_asym.max(2.0 * sig_plus / lam);
        let y_guess = y_min.max(30.0 / lam).max(1.0);
        let tol_int = PI * self.opts.tol;

        let mut y = 0.0;
        let mut h = 0.5f64.min(d_pole).min(2.0 * PI / ln_t.abs().max(1e-3));
        let mut total = Complex64::new(0.0, 0.0);
        let mut both = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut panels = 0usize;
        loop {
            let mut tries = 0;
            let mut wider: Option<(Panel, f64)> = None;
            let (p, h_used) = loop {
                let p = self.panel(c, ln_t, shift, y, y + h);
                let target = (0.5 * tol_int * h / y_guess).max(1e-15 * p.mag);
                tries += 1;
                if p.est <= target || tries > 30 || h < 1e-9 {
                    break (p, h);
                }
                // Near rounding level a narrower panel stops helping; keep the wider one.
                if let Some((q, hq)) = wider.take() {
                    if q.est <= 1e-11 * q.mag && p.est > 0.25 * q.est {
                        break (q, hq);
                    }
                }
                wider = Some((p, h));
                h *= 0.5;
            };
            h = h_used;
            total += p.main;
            both += p.main + p.mirror;
            err += p.est;
            panels += 1;
            y += h;
            if y >= y_min {
                let denom = lam - sig_plus / y;
                if denom > 0.0 {
                    let tail = 4.0 * p.end_mag / denom;
                    if tail <= 0.25 * tol_int {
                        err += tail;
                        break;
                    }
                }
            }
            if y > self.opts.max_height || panels > MAX_PANELS {
                return Err(Error::NoConvergence(format!(
                    "tail bound not reached below Im(s) = {y:.4e} ({panels} panels)"
                )));
            }
            let omega = (p.phase / h).max(1e-12);
            h = (2.0 * h).min(2.0).min(4.0 * PI / omega).min(d_pole.max(y));
        }
        Ok(EvalResult {
            value: total.re / PI,
            abs_err_est: err / PI,
            height_used: y,
            panels,
            imag_residual: both.im.abs() / (2.0 * PI),
            contour_re: c,
        })
    }

    pub fn eval(&self, t: f64) -> Result<EvalResult> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("t = {t} must be positive and finite")));
        }
        self.eval_log_weighted(t.ln(), 0.0)
    }
}

impl PointFn for HEvaluator {
    fn eval_weighted(&self, u: f64, w: f64) -> Result<f64> {
        Ok(self.eval_log_weighted(u, w)?.value)
    }

    fn support(&self) -> Support {
        Support::Full
    }

    fn strip(&self) -> Option<MellinStrip> {
        Some(self.strip.clone())
    }
}

pub fn eval_h(h: &FoxHParams, t: f64, opts: &EvalOptions) -> Result<EvalResult> {
    HEvaluator::new(h, opts.clone())?.eval(t)
}

/// Pointwise [`eval_h`] in parallel; results follow the input order.
pub fn eval_h_grid(h: &FoxHParams, grid: &[f64], opts: &EvalOptions) -> Vec<Result<EvalResult>> {
    match HEvaluator::new(h, opts.clone()) {
        Ok(ev) => grid.par_iter().map(|&t| ev.eval(t)).collect(),
        Err(e) => grid.iter().map(|_| Err(e.clone())).collect(),
    }
}
