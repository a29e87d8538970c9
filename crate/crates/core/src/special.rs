//! Wright, MacRobert E and Meijer G views of H parameter sets.

use serde::{Deserialize, Serialize};

use crate::construct::{build_foxh, ep_report, ConvolutionSpec};
use crate::error::{Error, Result};
use crate::hfun::{FoxHParams, Pair};
use crate::num::Num;
use crate::rewrite::power_weight;

/// `pW(q-1)[-z | (a, A); (b, B)] = H^{1,p}_{p,q}[z | (1-a, A); (0,1), (1-b, B)]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WrightParams {
    pub upper: Vec<(Num, Num)>,
    pub lower: Vec<(Num, Num)>,
    /// `sum B - sum A` over the Wright lists; the series exists for `mu > -1`.
    pub mu: Num,
}

impl WrightParams {
    pub fn new(upper: Vec<(Num, Num)>, lower: Vec<(Num, Num)>) -> WrightParams {
        let mut mu = Num::zero();
        for (_, b) in &lower {
            mu = mu + b;
        }
        for (_, a) in &upper {
            mu = mu - a;
        }
        WrightParams { upper, lower, mu }
    }

    pub fn exists(&self) -> bool {
        self.mu > Num::int(-1)
    }

    pub fn to_h(&self) -> FoxHParams {
        let one = Num::one();
        let upper: Vec<Pair> = self.upper.iter().map(|(a, k)| Pair(&one - a, k.clone())).collect();
        let mut lower = vec![Pair(Num::zero(), Num::one())];
        lower.extend(self.lower.iter().map(|(b, k)| Pair(&one - b, k.clone())));
        FoxHParams { m: 1, n: upper.len(), p: upper.len(), q: lower.len(), upper, lower }
    }

    /// Float lists for series summation.
    pub fn lists_f64(&self) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let f = |v: &[(Num, Num)]| v.iter().map(|(x, k)| (x.f(), k.f())).collect();
        (f(&self.upper), f(&self.lower))
    }
}

pub fn as_wright(h: &FoxHParams) -> Option<WrightParams> {
    if h.m != 1 || h.n != h.p || h.lower.first() != Some(&Pair(Num::zero(), Num::one())) {
        return None;
    }
    let one = Num::one();
    let upper = h.upper.iter().map(|Pair(a, k)| (&one - a, k.clone())).collect();
    let lower = h.lower[1..].iter().map(|Pair(b, k)| (&one - b, k.clone())).collect();
    Some(WrightParams::new(upper, lower))
}

/// The Wright function from `varphi(1, 0)` convolved with the given eta kernels;
/// positive at `-t` for all `t > 0`.
pub fn positive_wright(eta: &[(Num, Num, Num)]) -> Result<WrightParams> {
    let spec = ConvolutionSpec {
        varphi: vec![(Num::one(), Num::zero())],
        eta: eta.to_vec(),
        ..Default::default()
    };
    let r = ep_report(&spec);
    if !r.ok {
        return Err(Error::EpFailed(r.violations));
    }
    Ok(as_wright(&build_foxh(&spec)?).expect("varphi(1,0) with eta kernels has the Wright pattern"))
}

/// `E[betas; alphas; z] = H^{q,1}_{p,q}[z | (1,1), (alpha,1); (beta,1)]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacRobertParams {
    pub betas: Vec<Num>,
    pub alphas: Vec<Num>,
}

impl MacRobertParams {
    pub fn to_h(&self) -> FoxHParams {
        let one = Num::one();
        let mut upper = vec![Pair(one.clone(), one.clone())];
        upper.extend(self.alphas.iter().map(|a| Pair(a.clone(), one.clone())));
        let lower: Vec<Pair> = self.betas.iter().map(|b| Pair(b.clone(), one.clone())).collect();
        FoxHParams { m: lower.len(), n: 1, p: upper.len(), q: lower.len(), upper, lower }
    }
}

pub fn as_macrobert(h: &FoxHParams) -> Option<MacRobertParams> {
    let one = Num::one();
    let unit = |v: &[Pair]| v.iter().all(|Pair(_, k)| *k == one);
    if h.m != h.q || h.n != 1 || !unit(&h.upper) || !unit(&h.lower) || h.upper[0].0 != one {
        return None;
    }
    Some(MacRobertParams {
        betas: h.lower.iter().map(|p| p.0.clone()).collect(),
        alphas: h.upper[1..].iter().map(|p| p.0.clone()).collect(),
    })
}

/// `G^{m,n}_{p,q}[z^(1/lambda) | alphas; betas] = lambda H^{m,n}_{p,q}[z | (alpha, lambda); (beta, lambda)]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeijerParams {
    pub m: usize,
    pub n: usize,
    pub alphas: Vec<Num>,
    pub betas: Vec<Num>,
    pub lambda: Num,
}

impl MeijerParams {
    pub fn to_h(&self) -> FoxHParams {
        let pair = |x: &Num| Pair(x.clone(), self.lambda.clone());
        FoxHParams {
            m: self.m,
            n: self.n,
            p: self.alphas.len(),
            q: self.betas.len(),
            upper: self.alphas.iter().map(pair).collect(),
            lower: self.betas.iter().map(pair).collect(),
        }
    }
}

pub fn as_meijer(h: &FoxHParams) -> Option<MeijerParams> {
    let lambda = h.upper.iter().chain(&h.lower).next()?.1.clone();
    if !lambda.is_positive() || !h.upper.iter().chain(&h.lower).all(|Pair(_, k)| *k == lambda) {
        return None;
    }
    Some(MeijerParams {
        m: h.m,
        n: h.n,
        alphas: h.upper.iter().map(|p| p.0.clone()).collect(),
        betas: h.lower.iter().map(|p| p.0.clone()).collect(),
        lambda,
    })
}

/// Shifts every Meijer parameter by `omega` through the weight identity on the H side.
pub fn meijer_shift(h: &FoxHParams, omega: &Num) -> Result<MeijerParams> {
    let g = as_meijer(h).ok_or(Error::NotMeijerPattern)?;
    let shifted = power_weight(h, &(omega / &g.lambda));
    Ok(as_meijer(&shifted).expect("weight shifts keep the slopes"))
}

/// Every special-case view that applies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reductions {
    pub wright: Option<WrightParams>,
    pub macrobert: Option<MacRobertParams>,
    pub meijer: Option<MeijerParams>,
}

pub fn reduce(h: &FoxHParams) -> Reductions {
    Reductions { wright: as_wright(h), macrobert: as_macrobert(h), meijer: as_meijer(h) }
}
