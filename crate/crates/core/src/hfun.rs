//! Fox H parameter sets and their structural properties.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{Ext, MellinStrip, Num};

/// A Gamma argument `x + k s`: `(alpha, A)` in the upper list, `(beta, B)` in the lower.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pair(pub Num, pub Num);

impl Pair {
    pub fn new(x: impl Into<Num>, k: impl Into<Num>) -> Pair {
        Pair(x.into(), k.into())
    }

    /// Convenience for literals, e.g. `Pair::lit("1/2", "1")`. Panics on bad input.
    pub fn lit(x: &str, k: &str) -> Pair {
        Pair(x.parse().expect("real literal"), k.parse().expect("real literal"))
    }

    pub fn f(&self) -> (f64, f64) {
        (self.0.f(), self.1.f())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoxHParams {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub upper: Vec<Pair>,
    pub lower: Vec<Pair>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub message: String,
}

impl Violation {
    pub fn new(rule: &str, message: impl Into<String>) -> Violation {
        Violation { rule: rule.to_string(), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl FoxHParams {
    /// Builds and validates.
    pub fn new(m: usize, n: usize, upper: Vec<Pair>, lower: Vec<Pair>) -> Result<FoxHParams> {
        let h = FoxHParams { m, n, p: upper.len(), q: lower.len(), upper, lower };
        h.check()?;
        Ok(h)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_params(self)
    }

    pub fn check(&self) -> Result<()> {
        let r = validate_params(self);
        if r.ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(r.violations))
        }
    }
}

pub fn validate_params(h: &FoxHParams) -> ValidationReport {
    let mut v = Vec::new();
    if h.upper.len() != h.p {
        v.push(Violation::new("len-upper", format!("upper has {} pairs, p = {}", h.upper.len(), h.p)));
    }
    if h.lower.len() != h.q {
        v.push(Violation::new("len-lower", format!("lower has {} pairs, q = {}", h.lower.len(), h.q)));
    }
    if h.n > h.p {
        v.push(Violation::new("n<=p", format!("n = {} exceeds p = {}", h.n, h.p)));
    }
    if h.m > h.q {
        v.push(Violation::new("m<=q", format!("m = {} exceeds q = {}", h.m, h.q)));
    }
    for (j, Pair(a, k)) in h.upper.iter().enumerate() {
        if !k.is_positive() {
            v.push(Violation::new("A>0", format!("A_{} = {k} is not positive", j + 1)));
        }
        if !a.is_finite() || !k.is_finite() {
            v.push(Violation::new("finite", format!("upper pair {} is not finite", j + 1)));
        }
    }
    for (j, Pair(b, k)) in h.lower.iter().enumerate() {
        if !k.is_positive() {
            v.push(Violation::new("B>0", format!("B_{} = {k} is not positive", j + 1)));
        }
        if !b.is_finite() || !k.is_finite() {
            v.push(Violation::new("finite", format!("lower pair {} is not finite", j + 1)));
        }
    }
    ValidationReport { ok: v.is_empty(), violations: v }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharParams {
    pub chi: Num,
    pub mu: Num,
    pub delta: Num,
    pub kappa: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaMode {
    /// Both products over `j = 1..n`; the `B` product stops at `q` when `n > q`.
    #[default]
    AsPrinted,
    /// `prod_{1..p} A^-A * prod_{1..q} B^B`.
    Conventional,
}

fn sum<'a>(it: impl Iterator<Item = &'a Num>) -> Num {
    it.fold(Num::zero(), |acc, x| acc + x)
}

pub fn char_params(h: &FoxHParams) -> CharParams {
    char_params_with(h, KappaMode::AsPrinted)
}

pub fn char_params_with(h: &FoxHParams, mode: KappaMode) -> CharParams {
    let a = |r: std::ops::Range<usize>| sum(h.upper[r].iter().map(|p| &p.1));
    let b = |r: std::ops::Range<usize>| sum(h.lower[r].iter().map(|p| &p.1));
    let chi = a(0..h.n) - a(h.n..h.p) + b(0..h.m) - b(h.m..h.q);
    let mu = b(0..h.q) - a(0..h.p);
    let half = Num::ratio(h.p as i64 - h.q as i64, 2);
    let delta = sum(h.lower.iter().map(|p| &p.0)) - sum(h.upper.iter().map(|p| &p.0)) + half;
    let (na, nb) = match mode {
        KappaMode::AsPrinted => (h.n, h.n.min(h.q)),
        KappaMode::Conventional => (h.p, h.q),
    };
    let ln_kappa: f64 = h.upper[..na].iter().map(|p| -p.1.f() * p.1.f().ln()).sum::<f64>()
        + h.lower[..nb].iter().map(|p| p.1.f() * p.1.f().ln()).sum::<f64>();
    CharParams { chi, mu, delta, kappa: ln_kappa.exp() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoleCheckMode {
    Exact,
    Bounded,
}

/// First coincidence found between a left and a right pole family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleClash {
    /// Upper index `j <= n` (1-based).
    pub upper: usize,
    /// Lower index `j' <= m` (1-based).
    pub lower: usize,
    pub l: u64,
    pub l_prime: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleCheck {
    pub separated: bool,
    pub mode: PoleCheckMode,
    pub clash: Option<PoleClash>,
}

pub fn pole_separation_ok(h: &FoxHParams) -> bool {
    pole_separation(h).separated
}

const SCAN_MAX: u64 = 1000;
const SCAN_TOL: f64 = 1e-12;

/// Checks that no pole `-(beta + l)/B` (`j' <= m`) equals a pole `(1 - alpha + l')/A` (`j <= n`).
pub fn pole_separation(h: &FoxHParams) -> PoleCheck {
    let mut mode = PoleCheckMode::Exact;
    for (j, Pair(alpha, a)) in h.upper[..h.n].iter().enumerate() {
        for (jp, Pair(beta, b)) in h.lower[..h.m].iter().enumerate() {
            let hit = match (alpha.exact(), a.exact(), beta.exact(), b.exact()) {
                (Some(al), Some(aa), Some(be), Some(bb)) => exact_clash(al, aa, be, bb),
                _ => {
                    mode = PoleCheckMode::Bounded;
                    scan_clash(alpha.f(), a.f(), beta.f(), b.f())
                }
            };
            if let Some((l, l_prime)) = hit {
                return PoleCheck {
                    separated: false,
                    mode,
                    clash: Some(PoleClash { upper: j + 1, lower: jp + 1, l, l_prime }),
                };
            }
        }
    }
    PoleCheck { separated: true, mode, clash: None }
}

/// Smallest nonnegative `(l, l')` with `A l + B l' = B alpha - B - A beta`, if any.
fn exact_clash(
    alpha: &BigRational,
    a: &BigRational,
    beta: &BigRational,
    b: &BigRational,
) -> Option<(u64, u64)> {
    let k = b * alpha - b - a * beta;
    let den = a.denom().lcm(b.denom()).lcm(k.denom());
    let d = BigRational::from_integer(den);
    let (ai, bi, ki) = ((a * &d).to_integer(), (b * &d).to_integer(), (k * &d).to_integer());
    if ki.is_negative() {
        return None;
    }
    let g = ai.gcd(&bi);
    if !(&ki % &g).is_zero() {
        return None;
    }
    let (a1, b1, k1) = (&ai / &g, &bi / &g, &ki / &g);
    let l0 = if b1.is_one() {
        BigInt::zero()
    } else {
        let inv = mod_inverse(&(&a1 % &b1), &b1)?;
        (&k1 % &b1) * inv % &b1
    };
    if &a1 * &l0 > k1 {
        return None;
    }
    let lp = (&k1 - &a1 * &l0) / &b1;
    Some((l0.to_u64().unwrap_or(u64::MAX), lp.to_u64().unwrap_or(u64::MAX)))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

fn scan_clash(alpha: f64, a: f64, beta: f64, b: f64) -> Option<(u64, u64)> {
    for l in 0..=SCAN_MAX {
        let lp = alpha - 1.0 - a * (l as f64 + beta) / b;
        let r = lp.round();
        if r >= 0.0 && r <= SCAN_MAX as f64 && (lp - r).abs() <= SCAN_TOL * (1.0 + lp.abs()) {
            return Some((l, r as u64));
        }
    }
    None
}

/// Strip bounds, possibly empty.
pub fn strip_bounds(h: &FoxHParams) -> MellinStrip {
    let lo = h.lower[..h.m]
        .iter()
        .map(|Pair(b, k)| Ext::Fin(b / k))
        .fold(Ext::PosInf, Ext::min)
        .neg();
    let hi = h.upper[..h.n]
        .iter()
        .map(|Pair(a, k)| Ext::Fin((Num::one() - a) / k))
        .fold(Ext::PosInf, Ext::min);
    MellinStrip::new(lo, hi)
}

/// The Mellin strip of `H`; an error when it is empty.
pub fn mellin_strip(h: &FoxHParams) -> Result<MellinStrip> {
    let s = strip_bounds(h);
    if s.is_empty() {
        Err(Error::StripEmpty { lo: s.lo.f(), hi: s.hi.f() })
    } else {
        Ok(s)
    }
}
