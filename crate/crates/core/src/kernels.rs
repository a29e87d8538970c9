//! The four elementary kernels and their Mellin transforms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{ln_gamma, log_gamma};
use crate::hfun::Violation;
use crate::num::{Ext, MellinStrip, Num};
use crate::oracle::{PointFn, Support};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// Stretched exponential `t^{b/a} e^{-t^{1/a}} / a`.
    Varphi,
    /// Power law on `(0, 1)`.
    Phi,
    /// Two-sided power law `t^{b/a} (1 + t^{1/a})^{-b-c}`.
    Psi,
    /// Power law on `(1, inf)`.
    Eta,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Varphi => "varphi",
            KernelKind::Phi => "phi",
            KernelKind::Psi => "psi",
            KernelKind::Eta => "eta",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub kind: KernelKind,
    pub a: Num,
    pub b: Num,
    /// Unused by `Varphi`.
    pub c: Num,
}

impl Kernel {
    pub fn varphi(a: impl Into<Num>, b: impl Into<Num>) -> Kernel {
        Kernel { kind: KernelKind::Varphi, a: a.into(), b: b.into(), c: Num::zero() }
    }

    pub fn phi(a: impl Into<Num>, b: impl Into<Num>, c: impl Into<Num>) -> Kernel {
        Kernel { kind: KernelKind::Phi, a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn psi(a: impl Into<Num>, b: impl Into<Num>, c: impl Into<Num>) -> Kernel {
        Kernel { kind: KernelKind::Psi, a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn eta(a: impl Into<Num>, b: impl Into<Num>, c: impl Into<Num>) -> Kernel {
        Kernel { kind: KernelKind::Eta, a: a.into(), b: b.into(), c: c.into() }
    }

    /// Constraint violations, empty when the kernel is admissible.
    pub fn violations(&self) -> Vec<Violation> {
        let name = self.kind.name();
        let mut v = Vec::new();
        let (a, b, c) = (&self.a, &self.b, &self.c);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            v.push(Violation::new("finite", format!("{name}: non-finite parameter")));
            return v;
        }
        if !a.is_positive() {
            v.push(Violation::new("a>0", format!("{name}: a = {a} must be positive")));
        }
        match self.kind {
            KernelKind::Varphi | KernelKind::Phi | KernelKind::Psi => {
                if b.is_negative() {
                    v.push(Violation::new("b>=0", format!("{name}: b = {b} must be nonnegative")));
                }
            }
            KernelKind::Eta => {
                if !b.is_positive() {
                    v.push(Violation::new("b>0", format!("{name}: b = {b} must be positive")));
                }
            }
        }
        match self.kind {
            KernelKind::Phi | KernelKind::Eta => {
                if *c < b + &Num::one() {
                    v.push(Violation::new("c>=b+1", format!("{name}: c = {c} is below b + 1 = {}", b + Num::one())));
                }
            }
            KernelKind::Psi => {
                if !c.is_positive() {
                    v.push(Violation::new("c>0", format!("{name}: c = {c} must be positive")));
                }
            }
            KernelKind::Varphi => {}
        }
        v
    }

    pub fn check(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidKernel(
                v.into_iter().map(|x| x.message).collect::<Vec<_>>().join("; "),
            ))
        }
    }

    /// Prepared evaluator with the normalising constants folded in.
    pub fn prepare(&self) -> Result<KernelFn> {
        self.check()?;
        let (a, b, c) = (self.a.f(), self.b.f(), self.c.f());
        let ln_norm = match self.kind {
            KernelKind::Varphi => -a.ln(),
            KernelKind::Phi | KernelKind::Eta => -a.ln() - ln_gamma(c - b)?,
            KernelKind::Psi => ln_gamma(b + c)? - a.ln(),
        };
        Ok(KernelFn { kernel: self.clone(), a, b, c, ln_norm })
    }
}

/// A kernel ready for repeated pointwise evaluation.
#[derive(Clone, Debug)]
pub struct KernelFn {
    kernel: Kernel,
    a: f64,
    b: f64,
    c: f64,
    ln_norm: f64,
}

/// `ln(1 + e^x)`.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln(e^x - 1)` for `x > 0`.
#[inline]
fn ln_expm1(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

impl KernelFn {
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// `ln g(e^u)`, `-inf` off the support.
    #[inline]
    pub fn ln_value(&self, u: f64) -> f64 {
        let (a, b, c) = (self.a, self.b, self.c);
        let x = u / a;
        match self.kernel.kind {
            KernelKind::Varphi => self.ln_norm + b * x - x.exp(),
            KernelKind::Phi => {
                if u >= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let e = c - b - 1.0;
                let tail = if e == 0.0 { 0.0 } else { e * (-x.exp_m1()).ln() };
                self.ln_norm + b * x + tail
            }
            KernelKind::Psi => self.ln_norm + b * x - (b + c) * softplus(x),
            KernelKind::Eta => {
                if u <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let e = c - b - 1.0;
                let tail = if e == 0.0 { 0.0 } else { e * ln_expm1(x) };
                self.ln_norm + (1.0 - c) * x + tail
            }
        }
    }
}

impl PointFn for KernelFn {
    fn eval_weighted(&self, u: f64, w: f64) -> Result<f64> {
        let l = self.ln_value(u);
        if l == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        Ok((l + w * u).exp())
    }

    fn support(&self) -> Support {
        match self.kernel.kind {
            KernelKind::Phi => Support::Unit,
            KernelKind::Eta => Support::Above,
            _ => Support::Full,
        }
    }

    fn strip(&self) -> Option<MellinStrip> {
        Some(kernel_strip(&self.kernel))
    }
}

pub fn kernel_eval(k: &Kernel, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("kernel argument t = {t} must be positive")));
    }
    k.prepare()?.eval(t)
}

pub fn kernel_strip(k: &Kernel) -> MellinStrip {
    let lo = Ext::Fin(-(&k.b / &k.a));
    match k.kind {
        KernelKind::Varphi | KernelKind::Phi => MellinStrip::new(lo, Ext::PosInf),
        KernelKind::Psi => MellinStrip::new(lo, Ext::Fin(&k.c / &k.a)),
        KernelKind::Eta => MellinStrip::new(Ext::NegInf, Ext::Fin(&k.b / &k.a)),
    }
}

/// `ln` of the Mellin transform, principal Gamma branches summed.
pub fn kernel_ln_mellin(k: &Kernel, s: Complex64) -> Result<Complex64> {
    k.check()?;
    let strip = kernel_strip(k);
    if !strip.contains(s.re) {
        return Err(Error::OutOfStrip { re: s.re, lo: strip.lo.f(), hi: strip.hi.f() });
    }
    let (a, b, c) = (k.a.f(), k.b.f(), k.c.f());
    let as_ = s * a;
    Ok(match k.kind {
        KernelKind::Varphi => log_gamma(as_ + b)?,
        KernelKind::Phi => log_gamma(as_ + b)? - log_gamma(as_ + c)?,
        KernelKind::Psi => log_gamma(as_ + b)? + log_gamma(c - as_)?,
        KernelKind::Eta => log_gamma(b - as_)? - log_gamma(c - as_)?,
    })
}

pub fn kernel_mellin(k: &Kernel, s: Complex64) -> Result<Complex64> {
    Ok(kernel_ln_mellin(k, s)?.exp())
}
