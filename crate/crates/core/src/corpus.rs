//! Seeded random convolution specs that pass the e.p. check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct::{ep_report, ConvolutionSpec};
use crate::num::Num;

#[derive(Clone, Copy, Debug)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    /// Upper bound on `n1 + n2 + n3 + n4`, at most 4.
    pub max_kernels: usize,
}

impl CorpusConfig {
    pub fn new(seed: u64, count: usize) -> CorpusConfig {
        CorpusConfig { seed, count, max_kernels: 4 }
    }

    pub fn max_kernels(mut self, k: usize) -> CorpusConfig {
        self.max_kernels = k.clamp(1, 4);
        self
    }
}

/// Rounded to three decimals and kept exact.
fn milli(x: f64) -> Num {
    Num::ratio((x * 1000.0).round() as i64, 1000)
}

fn slope(rng: &mut ChaCha8Rng) -> Num {
    let (lo, hi) = (0.25f64.ln(), 4f64.ln());
    let v = milli(rng.random_range(lo..hi).exp());
    if v.is_positive() {
        v
    } else {
        Num::ratio(1, 4)
    }
}

fn shift(rng: &mut ChaCha8Rng) -> Num {
    milli(rng.random_range(0.0..3.0))
}

/// Strictly positive shift, used where the kernel needs `r > 0` or where `v = 0`
/// would pin the strip to an endpoint.
fn pos_shift(rng: &mut ChaCha8Rng) -> Num {
    milli(rng.random_range(0.25..3.0))
}

/// One draw; may fail the e.p. check.
pub fn random_spec(rng: &mut ChaCha8Rng, max_kernels: usize) -> ConvolutionSpec {
    loop {
        let total = rng.random_range(1..=max_kernels.clamp(1, 4));
        let mut counts = [0usize; 4];
        for _ in 0..total {
            counts[rng.random_range(0..4)] += 1;
        }
        if counts[0] == 0 && counts[2] == 0 {
            continue;
        }
        let mut s = ConvolutionSpec::default();
        for _ in 0..counts[0] {
            s.varphi.push((slope(rng), shift(rng)));
        }
        for _ in 0..counts[1] {
            let (a, c) = (slope(rng), shift(rng));
            let d = &c + Num::one() + milli(rng.random_range(0.0..2.0));
            s.phi.push((a, c, d));
        }
        for _ in 0..counts[2] {
            s.psi.push((slope(rng), shift(rng), pos_shift(rng)));
        }
        for _ in 0..counts[3] {
            let (a, v) = (slope(rng), pos_shift(rng));
            let w = &v + Num::one() + milli(rng.random_range(0.0..2.0));
            s.eta.push((a, v, w));
        }
        return s;
    }
}

/// `count` e.p.-valid specs; the same config always yields the same list.
pub fn generate(cfg: CorpusConfig) -> Vec<ConvolutionSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.count);
    while out.len() < cfg.count {
        let s = random_spec(&mut rng, cfg.max_kernels);
        if ep_report(&s).ok {
            out.push(s);
        }
    }
    out
}
