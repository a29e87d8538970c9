//! Rewrites of parameter sets that keep an H-function positive: the elementary
//! identities and the Laplace, Euler and product-Mellin extensions.

use serde::{Deserialize, Serialize};

use crate::construct::{build_foxh, ep_report, ConvolutionSpec};
use crate::error::{Error, Result};
use crate::hfun::{char_params, strip_bounds, FoxHParams, Pair};
use crate::num::{Ext, MellinStrip, Num};

/// `original(t) = scalar * H_params(t^arg_power) * t^t_power`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedH {
    pub params: FoxHParams,
    pub scalar: Num,
    pub arg_power: Num,
    pub t_power: Num,
}

/// `H(1/z)` with the upper and lower lists swapped.
pub fn reciprocal(h: &FoxHParams) -> FoxHParams {
    let one = Num::one();
    let flip = |v: &[Pair]| -> Vec<Pair> { v.iter().map(|Pair(x, k)| Pair(&one - x, k.clone())).collect() };
    FoxHParams { m: h.n, n: h.m, p: h.q, q: h.p, upper: flip(&h.lower), lower: flip(&h.upper) }
}

/// `H_h(t) = omega * H_new(t^omega)`.
pub fn power_arg(h: &FoxHParams, omega: &Num) -> Result<WeightedH> {
    if !omega.is_positive() {
        return Err(Error::NonpositiveOmega(omega.f()));
    }
    let scale = |v: &[Pair]| -> Vec<Pair> { v.iter().map(|Pair(x, k)| Pair(x.clone(), k * omega)).collect() };
    let params = FoxHParams { upper: scale(&h.upper), lower: scale(&h.lower), ..h.clone() };
    Ok(WeightedH { params, scalar: omega.clone(), arg_power: omega.clone(), t_power: Num::zero() })
}

/// `t^w H_h(t) = H_new(t)`.
pub fn power_weight(h: &FoxHParams, w: &Num) -> FoxHParams {
    let shift = |v: &[Pair]| -> Vec<Pair> { v.iter().map(|Pair(x, k)| Pair(x + w * k, k.clone())).collect() };
    FoxHParams { upper: shift(&h.upper), lower: shift(&h.lower), ..h.clone() }
}

fn fail(msg: String) -> Error {
    Error::PreconditionFailed(msg)
}

/// `min_{l<=m} beta_l / B_l`, `+inf` when `m = 0`.
fn min_beta_ratio(h: &FoxHParams) -> Ext {
    strip_bounds(h).lo.neg()
}

fn require_common(h: &FoxHParams, lambda: Option<&Num>) -> Result<()> {
    h.check()?;
    let chi = char_params(h).chi;
    if !chi.is_positive() {
        return Err(fail(format!("chi = {chi} must be positive")));
    }
    let s = strip_bounds(h);
    if s.is_empty() {
        return Err(fail(format!("strip {s} is empty")));
    }
    if let Some(l) = lambda {
        if !l.is_positive() {
            return Err(fail(format!("lambda = {l} must be positive")));
        }
    }
    Ok(())
}

/// `omega + k * min beta/B > 0`, vacuous when `m = 0`.
fn gate(omega: &Num, k: &Num, mb: &Ext, text: &str) -> Result<()> {
    if let Ext::Fin(x) = mb {
        let v = omega + k * x;
        if !v.is_positive() {
            return Err(fail(format!("{text} > 0 fails: value {v}")));
        }
    }
    Ok(())
}

/// Laplace transform of `tau^(omega-1) H(tau^lambda)`; equals `s^-omega H_new(s^-lambda)`.
pub fn laplace_extend(h: &FoxHParams, omega: &Num, lambda: &Num) -> Result<FoxHParams> {
    if h.m == 0 || h.n == 0 {
        return Err(fail(format!("m*n > 0 fails: m = {}, n = {}", h.m, h.n)));
    }
    require_common(h, Some(lambda))?;
    gate(omega, lambda, &min_beta_ratio(h), "omega + lambda*min(beta/B)")?;
    let mut upper = Vec::with_capacity(h.p + 1);
    upper.push(Pair(Num::one() - omega, lambda.clone()));
    upper.extend(h.upper.iter().cloned());
    Ok(FoxHParams { m: h.m, n: h.n + 1, p: h.p + 1, q: h.q, upper, lower: h.lower.clone() })
}

/// Euler transform
/// `int_0^t tau^(w1-1) (t-tau)^(l1-1) H(z tau^w2 (t-tau)^l2) dtau = t^(w1+l1-1) H_new(z t^(w2+l2))`.
pub fn euler_extend(
    h: &FoxHParams,
    omega1: &Num,
    lambda1: &Num,
    omega2: &Num,
    lambda2: &Num,
) -> Result<FoxHParams> {
    if h.m == 0 || h.n == 0 {
        return Err(fail(format!("m*n > 0 fails: m = {}, n = {}", h.m, h.n)));
    }
    require_common(h, None)?;
    for (name, v) in [("omega2", omega2), ("lambda2", lambda2)] {
        if !v.is_positive() {
            return Err(fail(format!("{name} = {v} must be positive (A = 0 entries are not allowed)")));
        }
    }
    let mb = min_beta_ratio(h);
    gate(omega1, omega2, &mb, "omega1 + omega2*min(beta/B)")?;
    gate(omega1, lambda2, &mb, "omega1 + lambda2*min(beta/B)")?;
    gate(lambda1, lambda2, &mb, "lambda1 + lambda2*min(beta/B)")?;
    let one = Num::one();
    let mut upper = Vec::with_capacity(h.p + 2);
    upper.push(Pair(&one - omega1, omega2.clone()));
    upper.push(Pair(&one - lambda1, lambda2.clone()));
    upper.extend(h.upper.iter().cloned());
    let mut lower = h.lower.clone();
    lower.push(Pair(&one - omega1 - lambda1, omega2 + lambda2));
    Ok(FoxHParams { m: h.m, n: h.n + 2, p: h.p + 2, q: h.q + 1, upper, lower })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductVariant {
    /// `int tau^(omega-1) H1(xi tau^lambda) H2(zeta tau) dtau = zeta^-omega H_new(xi zeta^-lambda)`.
    Direct,
    /// `int tau^(omega-1) H1(xi tau^-lambda) H2(zeta tau) dtau = zeta^-omega H_new(xi zeta^lambda)`.
    Reciprocal,
}

impl std::str::FromStr for ProductVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<ProductVariant> {
        match s {
            "direct" => Ok(ProductVariant::Direct),
            "reciprocal" => Ok(ProductVariant::Reciprocal),
            _ => Err(Error::Parse(format!("unknown product variant {s:?}"))),
        }
    }
}

/// Admissible `omega` for the direct product transform.
pub fn omega_range(h1: &FoxHParams, h2: &FoxHParams, lambda: &Num) -> MellinStrip {
    product_omega_range(h1, h2, lambda, ProductVariant::Direct)
}

pub fn product_omega_range(
    h1: &FoxHParams,
    h2: &FoxHParams,
    lambda: &Num,
    variant: ProductVariant,
) -> MellinStrip {
    let (s1, s2) = (strip_bounds(h1), strip_bounds(h2));
    match variant {
        ProductVariant::Direct => MellinStrip::new(s1.lo.scale(lambda).add(&s2.lo), s1.hi.scale(lambda).add(&s2.hi)),
        ProductVariant::Reciprocal => {
            MellinStrip::new(s2.lo.add(&s1.hi.scale(lambda).neg()), s2.hi.add(&s1.lo.scale(lambda).neg()))
        }
    }
}

pub fn product_extend(
    h1: &FoxHParams,
    h2: &FoxHParams,
    omega: &Num,
    lambda: &Num,
    variant: ProductVariant,
) -> Result<FoxHParams> {
    require_common(h1, Some(lambda))?;
    require_common(h2, None)?;
    let r = product_omega_range(h1, h2, lambda, variant);
    let o = Ext::Fin(omega.clone());
    if !(r.lo < o && o < r.hi) {
        return Err(Error::OmegaOutOfRange { omega: omega.f(), lo: r.lo.f(), hi: r.hi.f() });
    }
    let one = Num::one();
    let (upper_block, lower_block, m, n): (Vec<Pair>, Vec<Pair>, usize, usize) = match variant {
        ProductVariant::Direct => (
            h2.lower.iter().map(|Pair(b, k)| Pair(&one - b - omega * k, lambda * k)).collect(),
            h2.upper.iter().map(|Pair(a, k)| Pair(&one - a - omega * k, lambda * k)).collect(),
            h1.m + h2.n,
            h1.n + h2.m,
        ),
        ProductVariant::Reciprocal => (
            h2.upper.iter().map(|Pair(a, k)| Pair(a + omega * k, lambda * k)).collect(),
            h2.lower.iter().map(|Pair(b, k)| Pair(b + omega * k, lambda * k)).collect(),
            h1.m + h2.m,
            h1.n + h2.n,
        ),
    };
    let mut upper = h1.upper[..h1.n].to_vec();
    upper.extend(upper_block);
    upper.extend_from_slice(&h1.upper[h1.n..]);
    let mut lower = h1.lower[..h1.m].to_vec();
    lower.extend(lower_block);
    lower.extend_from_slice(&h1.lower[h1.m..]);
    Ok(FoxHParams { m, n, p: upper.len(), q: lower.len(), upper, lower })
}

/// One link of a derivation chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Step {
    /// Origin: the H-function of a convolution spec that passed the e.p. check.
    Spec { spec: ConvolutionSpec },
    /// Origin: parameters given directly, with no certificate.
    Params,
    Reciprocal,
    PowerArg { omega: Num },
    PowerWeight { w: Num },
    Laplace { omega: Num, lambda: Num },
    Euler { omega1: Num, lambda1: Num, omega2: Num, lambda2: Num },
    Product { omega: Num, lambda: Num, variant: ProductVariant, with: Vec<Step> },
}

fn chain_certified(chain: &[Step]) -> bool {
    matches!(chain.first(), Some(Step::Spec { .. }))
        && chain[1..].iter().all(|s| match s {
            Step::Spec { .. } | Step::Params => false,
            Step::Product { with, .. } => chain_certified(with),
            _ => true,
        })
}

/// Parameters with the chain of steps that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub params: FoxHParams,
    pub chain: Vec<Step>,
}

impl Derived {
    /// Certified origin; fails unless the spec passes the e.p. check.
    pub fn from_spec(spec: &ConvolutionSpec) -> Result<Derived> {
        let r = ep_report(spec);
        if !r.ok {
            return Err(Error::EpFailed(r.violations));
        }
        Ok(Derived { params: build_foxh(spec)?, chain: vec![Step::Spec { spec: spec.clone() }] })
    }

    pub fn from_params(params: FoxHParams) -> Result<Derived> {
        params.check()?;
        Ok(Derived { params, chain: vec![Step::Params] })
    }

    /// Positive by construction: a spec origin followed by rewrites only.
    pub fn certified(&self) -> bool {
        chain_certified(&self.chain)
    }

    fn then(&self, params: FoxHParams, step: Step) -> Derived {
        let mut chain = self.chain.clone();
        chain.push(step);
        Derived { params, chain }
    }

    pub fn reciprocal(&self) -> Derived {
        self.then(reciprocal(&self.params), Step::Reciprocal)
    }

    pub fn power_arg(&self, omega: &Num) -> Result<Derived> {
        Ok(self.then(power_arg(&self.params, omega)?.params, Step::PowerArg { omega: omega.clone() }))
    }

    pub fn power_weight(&self, w: &Num) -> Derived {
        self.then(power_weight(&self.params, w), Step::PowerWeight { w: w.clone() })
    }

    pub fn laplace(&self, omega: &Num, lambda: &Num) -> Result<Derived> {
        let p = laplace_extend(&self.params, omega, lambda)?;
        Ok(self.then(p, Step::Laplace { omega: omega.clone(), lambda: lambda.clone() }))
    }

    pub fn euler(&self, omega1: &Num, lambda1: &Num, omega2: &Num, lambda2: &Num) -> Result<Derived> {
        let p = euler_extend(&self.params, omega1, lambda1, omega2, lambda2)?;
        Ok(self.then(
            p,
            Step::Euler {
                omega1: omega1.clone(),
                lambda1: lambda1.clone(),
                omega2: omega2.clone(),
                lambda2: lambda2.clone(),
            },
        ))
    }

    pub fn product(&self, other: &Derived, omega: &Num, lambda: &Num, variant: ProductVariant) -> Result<Derived> {
        let p = product_extend(&self.params, &other.params, omega, lambda, variant)?;
        Ok(self.then(
            p,
            Step::Product { omega: omega.clone(), lambda: lambda.clone(), variant, with: other.chain.clone() },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mbquad::{eval_h, EvalOptions};
    use crate::quad::{integrate, QuadOpts};

    fn spec(s: &str) -> ConvolutionSpec {
        serde_json::from_str(s).unwrap()
    }

    fn h_of(s: &str) -> FoxHParams {
        build_foxh(&spec(s)).unwrap()
    }

    fn pairs(v: &[(&str, &str)]) -> Vec<Pair> {
        v.iter().map(|(a, b)| Pair::lit(a, b)).collect()
    }

    fn n(s: &str) -> Num {
        s.parse().unwrap()
    }

    fn hval(h: &FoxHParams, t: f64) -> f64 {
        eval_h(h, t, &EvalOptions::with_tol(1e-12)).unwrap().value
    }

    const EXP: &str = r#"{"varphi":[[1,0]]}"#;
    const PSI: &str = r#"{"psi":[[1,0,1]]}"#;

    #[test]
    fn reciprocal_examples() {
        let r = reciprocal(&h_of(EXP));
        assert_eq!((r.m, r.n, r.p, r.q), (0, 1, 1, 0));
        assert_eq!(r.upper, pairs(&[("1", "1")]));
        let h = h_of(PSI);
        let r = reciprocal(&h);
        assert_eq!((r.upper.clone(), r.lower.clone()), (pairs(&[("1", "1")]), pairs(&[("1", "1")])));
        assert_eq!(reciprocal(&r), h);
        // e^{-1/t}
        for t in [0.3, 1.0, 4.0] {
            assert!((hval(&r, t) - hval(&h, 1.0 / t)).abs() < 1e-11);
        }
    }

    #[test]
    fn power_examples() {
        let h = h_of(EXP);
        let w = power_arg(&h, &Num::one()).unwrap();
        assert_eq!((w.params.clone(), w.scalar.clone()), (h.clone(), Num::one()));
        let w = power_arg(&h, &Num::int(2)).unwrap();
        assert_eq!(w.params.lower, pairs(&[("0", "2")]));
        for t in [0.1f64, 1.0, 3.0] {
            let v = w.scalar.f() * hval(&w.params, t.powf(2.0));
            assert!((v - (-t).exp()).abs() < 1e-11, "t={t}");
        }
        assert!(matches!(power_arg(&h, &Num::zero()), Err(Error::NonpositiveOmega(_))));
        let g = h_of(r#"{"varphi":[[1,0]],"psi":[[2,1,3]]}"#);
        let w = power_arg(&g, &n("3/2")).unwrap();
        assert_eq!(strip_bounds(&w.params), strip_bounds(&g).divide(&n("3/2")));

        assert_eq!(power_weight(&h, &Num::zero()), h);
        let hw = power_weight(&h, &Num::one());
        assert_eq!(hw.lower, pairs(&[("1", "1")]));
        for t in [0.1f64, 1.0, 3.0] {
            assert!((hval(&hw, t) - t * (-t).exp()).abs() < 1e-11);
        }
        let g2 = power_weight(&power_weight(&g, &n("0.3")), &n("-1.1"));
        assert_eq!(g2, power_weight(&g, &n("-0.8")));
    }

    #[test]
    fn laplace_examples() {
        let h = h_of(PSI);
        let l = laplace_extend(&h, &Num::one(), &Num::one()).unwrap();
        assert_eq!((l.m, l.n, l.p, l.q), (1, 2, 2, 1));
        assert_eq!(l.upper, pairs(&[("0", "1"), ("0", "1")]));
        assert_eq!(char_params(&l).chi, char_params(&h).chi + Num::one());
        // e E1(1)
        let lhs = integrate(|x: f64| Ok((-x).exp() / (1.0 + x)), 0.0, f64::INFINITY, &[], &QuadOpts::rel(1e-13))
            .unwrap()
            .value;
        assert!((lhs - 0.596_347_362_323_194).abs() < 1e-14);
        assert!((hval(&l, 1.0) - lhs).abs() < 1e-10);
        assert!(matches!(laplace_extend(&h, &Num::int(-1), &Num::one()), Err(Error::PreconditionFailed(_))));
        // n = 0
        assert!(matches!(
            laplace_extend(&h_of(EXP), &Num::one(), &Num::one()),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn euler_examples() {
        let h = h_of(PSI);
        let half = n("1/2");
        let e = euler_extend(&h, &Num::one(), &Num::one(), &half, &half).unwrap();
        assert_eq!((e.m, e.n, e.p, e.q), (1, 3, 3, 2));
        assert_eq!(e.lower.last(), Some(&Pair::lit("-1", "1")));
        assert_eq!(char_params(&e).chi, char_params(&h).chi);
        let lhs = integrate(|x: f64| Ok(1.0 / (1.0 + (x * (1.0 - x)).sqrt())), 0.0, 1.0, &[], &QuadOpts::rel(1e-13))
            .unwrap()
            .value;
        assert!((hval(&e, 1.0) - lhs).abs() < 1e-10, "{} {}", hval(&e, 1.0), lhs);
        let z = Num::zero();
        assert!(matches!(euler_extend(&h, &Num::one(), &Num::one(), &z, &z), Err(Error::PreconditionFailed(_))));
        // Integrability in (t - tau) fails for lambda1 <= 0 when min beta/B = 0.
        assert!(matches!(
            euler_extend(&h, &Num::one(), &Num::zero(), &half, &half),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn product_examples() {
        let h = h_of(PSI);
        let r = omega_range(&h, &h, &Num::one());
        assert_eq!(r, MellinStrip::new(Ext::Fin(Num::zero()), Ext::Fin(Num::int(2))));
        let e = h_of(EXP);
        assert_eq!(omega_range(&reciprocal(&e), &h, &Num::one()).lo, Ext::NegInf);
        let one = Num::one();
        let p = product_extend(&h, &h, &one, &one, ProductVariant::Direct).unwrap();
        assert_eq!((p.m, p.n, p.p, p.q), (2, 2, 2, 2));
        assert_eq!(p.upper, pairs(&[("0", "1"), ("0", "1")]));
        assert_eq!(p.lower, pairs(&[("0", "1"), ("0", "1")]));
        assert!((hval(&p, 1.0) - 1.0).abs() < 1e-10);
        assert!(matches!(
            product_extend(&h, &h, &Num::int(5), &one, ProductVariant::Direct),
            Err(Error::OmegaOutOfRange { .. })
        ));
    }

    #[test]
    fn product_contracts() {
        // H1 = 1/(1+t), H2 = e^{-t}.
        let h1 = h_of(PSI);
        let h2 = h_of(EXP);
        let o = QuadOpts::rel(1e-13);
        let (xi, zeta, lam, om) = (0.7f64, 1.3f64, 1.5f64, 0.6f64);
        let (omn, lamn) = (n("0.6"), n("1.5"));
        let p = product_extend(&h1, &h2, &omn, &lamn, ProductVariant::Direct).unwrap();
        assert_eq!(char_params(&p).chi, char_params(&h1).chi + &lamn * char_params(&h2).chi);
        let lhs = integrate(
            |x: f64| Ok(x.powf(om - 1.0) / (1.0 + xi * x.powf(lam)) * (-zeta * x).exp()),
            0.0,
            f64::INFINITY,
            &[1.0],
            &o,
        )
        .unwrap()
        .value;
        let rhs = zeta.powf(-om) * hval(&p, xi * zeta.powf(-lam));
        assert!(((lhs - rhs) / lhs).abs() < 1e-9, "{lhs} {rhs}");

        let r = product_omega_range(&h1, &h2, &lamn, ProductVariant::Reciprocal);
        assert_eq!(r, MellinStrip::new(Ext::Fin(n("-1.5")), Ext::PosInf));
        let p = product_extend(&h1, &h2, &omn, &lamn, ProductVariant::Reciprocal).unwrap();
        let lhs = integrate(
            |x: f64| Ok(x.powf(om - 1.0) / (1.0 + xi * x.powf(-lam)) * (-zeta * x).exp()),
            0.0,
            f64::INFINITY,
            &[1.0],
            &o,
        )
        .unwrap()
        .value;
        let rhs = zeta.powf(-om) * hval(&p, xi * zeta.powf(lam));
        assert!(((lhs - rhs) / lhs).abs() < 1e-9, "{lhs} {rhs}");
    }

    #[test]
    fn derivation_chain() {
        let d = Derived::from_spec(&spec(PSI)).unwrap();
        assert!(d.certified());
        let d2 = d.laplace(&Num::one(), &Num::one()).unwrap().reciprocal();
        assert!(d2.certified());
        assert_eq!(d2.chain.len(), 3);
        let raw = Derived::from_params(h_of(PSI)).unwrap();
        assert!(!raw.certified());
        let prod = d.product(&raw, &Num::one(), &Num::one(), ProductVariant::Direct).unwrap();
        assert!(!prod.certified());
        let js = serde_json::to_value(&d2.chain).unwrap();
        assert_eq!(js[1]["op"], "laplace");
        assert_eq!(js[2]["op"], "reciprocal");
        let back: Vec<Step> = serde_json::from_value(js).unwrap();
        assert_eq!(back, d2.chain);
        assert!(matches!(Derived::from_spec(&spec(r#"{"phi":[[1,0,2]]}"#)), Err(Error::EpFailed(_))));
    }
}
