//! Positive Fox H-functions: construction from Mellin convolutions of elementary
//! kernels, Mellin-Barnes evaluation, quadrature oracles, rewrites and special cases.

pub mod construct;
pub mod corpus;
pub mod error;
pub mod gamma;
pub mod hfun;
pub mod kernels;
pub mod mbquad;
pub mod num;
pub mod oracle;
pub mod quad;
pub mod rewrite;
pub mod schema;
pub mod special;

pub use corpus::{generate as generate_corpus, CorpusConfig};
pub use construct::{build_foxh, ep_report, ConvolutionSpec, EpReport};
pub use error::{Error, Result};
pub use hfun::{
    char_params, mellin_strip, pole_separation, pole_separation_ok, validate_params, CharParams,
    FoxHParams, Pair, ValidationReport, Violation,
};
pub use kernels::{kernel_eval, kernel_mellin, kernel_strip, Kernel, KernelKind};
pub use mbquad::{eval_h, eval_h_grid, xi_value, EvalOptions, EvalResult, HEvaluator};
pub use num::{Ext, MellinStrip, Num};
pub use num_complex::Complex64;
pub use oracle::{convolve_pair, eval_f, mellin_numeric, PointFn, Support};
pub use rewrite::{
    euler_extend, laplace_extend, omega_range, power_arg, power_weight, product_extend, reciprocal, Derived,
    ProductVariant, Step, WeightedH,
};
pub use schema::{parse_params, parse_spec, spec_json, ParamsDoc, PARAMS_SCHEMA, SPEC_SCHEMA};
pub use special::{
    as_macrobert, as_meijer, as_wright, meijer_shift, positive_wright, reduce, MacRobertParams, MeijerParams,
    Reductions, WrightParams,
};
