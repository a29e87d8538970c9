//! Fox H parameter sets from Mellin convolutions of elementary kernels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hfun::{pole_separation, FoxHParams, Pair, PoleCheckMode, Violation};
use crate::kernels::{Kernel, KernelKind};
use crate::num::{Ext, MellinStrip, Num};

/// `f = varphi_1 v ... v phi_1 v ... v psi_1 v ... v eta_1 v ...`.
///
/// Tuples are `(a, b)`, `(a', c, d)`, `(a'', o, r)` and `(a''', v, w)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolutionSpec {
    #[serde(default)]
    pub varphi: Vec<(Num, Num)>,
    #[serde(default)]
    pub phi: Vec<(Num, Num, Num)>,
    #[serde(default)]
    pub psi: Vec<(Num, Num, Num)>,
    #[serde(default)]
    pub eta: Vec<(Num, Num, Num)>,
}

impl ConvolutionSpec {
    pub fn counts(&self) -> [usize; 4] {
        [self.varphi.len(), self.phi.len(), self.psi.len(), self.eta.len()]
    }

    pub fn len(&self) -> usize {
        self.counts().iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Kernels in fold order.
    pub fn kernels(&self) -> Vec<Kernel> {
        let mut v = Vec::with_capacity(self.len());
        v.extend(self.varphi.iter().map(|(a, b)| Kernel::varphi(a.clone(), b.clone())));
        v.extend(self.phi.iter().map(|(a, c, d)| Kernel::phi(a.clone(), c.clone(), d.clone())));
        v.extend(self.psi.iter().map(|(a, o, r)| Kernel::psi(a.clone(), o.clone(), r.clone())));
        v.extend(self.eta.iter().map(|(a, v, w)| Kernel::eta(a.clone(), v.clone(), w.clone())));
        v
    }

    pub fn from_kernels(ks: &[Kernel]) -> ConvolutionSpec {
        let mut s = ConvolutionSpec::default();
        for k in ks {
            let (a, b, c) = (k.a.clone(), k.b.clone(), k.c.clone());
            match k.kind {
                KernelKind::Varphi => s.varphi.push((a, b)),
                KernelKind::Phi => s.phi.push((a, b, c)),
                KernelKind::Psi => s.psi.push((a, b, c)),
                KernelKind::Eta => s.eta.push((a, b, c)),
            }
        }
        s
    }

    /// Kernel constraint violations, labelled by list position.
    pub fn violations(&self) -> Vec<Violation> {
        let mut idx = [0usize; 4];
        let mut out = Vec::new();
        for k in self.kernels() {
            let slot = k.kind as usize;
            idx[slot] += 1;
            for v in k.violations() {
                out.push(Violation {
                    rule: v.rule,
                    message: format!("{}[{}]{}", k.kind.name(), idx[slot], &v.message[k.kind.name().len()..]),
                });
            }
        }
        out
    }

    pub fn index_rule_ok(&self) -> bool {
        !self.varphi.is_empty() || !self.psi.is_empty()
    }

    /// `chi' = sum a + 2 sum a''`.
    pub fn chi_prime(&self) -> Num {
        let mut x = Num::zero();
        for (a, _) in &self.varphi {
            x = x + a;
        }
        for (a, _, _) in &self.psi {
            x = x + a + a;
        }
        x
    }

    /// `(-xi, xi')` from the kernel strips.
    pub fn strip(&self) -> MellinStrip {
        let ratio = |x: &Num, a: &Num| if a.is_positive() { Ext::Fin(x / a) } else { Ext::PosInf };
        let xi = self
            .varphi
            .iter()
            .map(|(a, b)| ratio(b, a))
            .chain(self.phi.iter().map(|(a, c, _)| ratio(c, a)))
            .chain(self.psi.iter().map(|(a, o, _)| ratio(o, a)))
            .fold(Ext::PosInf, Ext::min);
        let xi_p = self
            .psi
            .iter()
            .map(|(a, _, r)| ratio(r, a))
            .chain(self.eta.iter().map(|(a, v, _)| ratio(v, a)))
            .fold(Ext::PosInf, Ext::min);
        MellinStrip::new(xi.neg(), xi_p)
    }
}

/// Indices and parameter blocks of the H-function equal to `f`, without any checks.
pub fn build_unchecked(spec: &ConvolutionSpec) -> FoxHParams {
    let [n1, n2, n3, n4] = spec.counts();
    let one = Num::one();
    let mut upper = Vec::with_capacity(n2 + n3 + n4);
    upper.extend(spec.psi.iter().map(|(a, _, r)| Pair(&one - r, a.clone())));
    upper.extend(spec.eta.iter().map(|(a, v, _)| Pair(&one - v, a.clone())));
    upper.extend(spec.phi.iter().map(|(a, _, d)| Pair(d.clone(), a.clone())));
    let mut lower = Vec::with_capacity(n1 + n2 + n3 + n4);
    lower.extend(spec.varphi.iter().map(|(a, b)| Pair(b.clone(), a.clone())));
    lower.extend(spec.phi.iter().map(|(a, c, _)| Pair(c.clone(), a.clone())));
    lower.extend(spec.psi.iter().map(|(a, o, _)| Pair(o.clone(), a.clone())));
    lower.extend(spec.eta.iter().map(|(a, _, w)| Pair(&one - w, a.clone())));
    FoxHParams { m: n1 + n2 + n3, n: n3 + n4, p: n2 + n3 + n4, q: n1 + n2 + n3 + n4, upper, lower }
}

pub fn build_foxh(spec: &ConvolutionSpec) -> Result<FoxHParams> {
    let v = spec.violations();
    if !v.is_empty() {
        return Err(Error::SpecInvalid(v));
    }
    if !spec.index_rule_ok() {
        return Err(Error::IndexRule);
    }
    Ok(build_unchecked(spec))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpReport {
    pub ok: bool,
    pub chi_prime: Num,
    pub strip: MellinStrip,
    pub violations: Vec<Violation>,
    /// `None` when earlier failures kept the pole check from running.
    pub pole_check_mode: Option<PoleCheckMode>,
}

pub fn ep_report(spec: &ConvolutionSpec) -> EpReport {
    let mut violations = spec.violations();
    let kernels_ok = violations.is_empty();
    if !spec.index_rule_ok() {
        violations.push(Violation::new("index-rule", "index rule n1>=1 or n3>=1 fails"));
    }
    let chi_prime = spec.chi_prime();
    if kernels_ok && !chi_prime.is_positive() {
        violations.push(Violation::new("chi'>0", format!("chi' = {chi_prime} is not positive")));
    }
    let strip = spec.strip();
    if kernels_ok && strip.is_empty() {
        violations.push(Violation::new("strip", format!("strip {strip} is empty")));
    }
    let mut pole_check_mode = None;
    if violations.is_empty() {
        let c = pole_separation(&build_unchecked(spec));
        pole_check_mode = Some(c.mode);
        if let Some(x) = c.clash {
            violations.push(Violation::new(
                "pole-separation",
                format!(
                    "pole of upper pair {} (l' = {}) meets pole of lower pair {} (l = {})",
                    x.upper, x.l_prime, x.lower, x.l
                ),
            ));
        }
    }
    EpReport { ok: violations.is_empty(), chi_prime, strip, violations, pole_check_mode }
}
