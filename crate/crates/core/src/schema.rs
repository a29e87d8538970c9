//! JSON documents `foxh.spec.v1` and `foxh.params.v1`.
//!
//! Numbers are written as decimal strings (or `p/q` when no terminating decimal
//! exists) so exact inputs survive a round trip. Readers also take JSON numbers.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::construct::{ConvolutionSpec, EpReport};
use crate::error::{Error, Result};
use crate::hfun::FoxHParams;
use crate::rewrite::{Derived, Step};

pub const SPEC_SCHEMA: &str = "foxh.spec.v1";
pub const PARAMS_SCHEMA: &str = "foxh.params.v1";

/// Removes and checks the optional `"schema"` tag.
fn take_schema(v: &mut Value, want: &str) -> Result<()> {
    let Value::Object(map) = v else {
        return Err(Error::Parse(format!("{want}: expected a JSON object")));
    };
    match map.remove("schema") {
        None => Ok(()),
        Some(Value::String(s)) if s == want => Ok(()),
        Some(other) => Err(Error::Parse(format!("expected schema {want:?}, found {other}"))),
    }
}

pub fn parse_spec(text: &str) -> Result<ConvolutionSpec> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    take_schema(&mut v, SPEC_SCHEMA)?;
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("{SPEC_SCHEMA}: {e}")))
}

pub fn spec_json(spec: &ConvolutionSpec) -> Value {
    let mut v = serde_json::to_value(spec).expect("spec serializes");
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), Value::String(SPEC_SCHEMA.into()));
    }
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub schema: String,
    #[serde(flatten)]
    pub params: FoxHParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ep_report: Option<EpReport>,
    /// Derivation chain; empty means the parameters came with no history.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<Step>,
    #[serde(default)]
    pub certified: bool,
}

impl ParamsDoc {
    pub fn bare(params: FoxHParams) -> ParamsDoc {
        ParamsDoc { schema: PARAMS_SCHEMA.into(), params, ep_report: None, chain: Vec::new(), certified: false }
    }

    pub fn from_derived(d: &Derived, ep_report: Option<EpReport>) -> ParamsDoc {
        ParamsDoc {
            schema: PARAMS_SCHEMA.into(),
            params: d.params.clone(),
            ep_report,
            chain: d.chain.clone(),
            certified: d.certified(),
        }
    }

    pub fn derived(&self) -> Derived {
        let chain = if self.chain.is_empty() { vec![Step::Params] } else { self.chain.clone() };
        Derived { params: self.params.clone(), chain }
    }
}

pub fn parse_params(text: &str) -> Result<ParamsDoc> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    take_schema(&mut v, PARAMS_SCHEMA)?;
    let Value::Object(map) = &mut v else { unreachable!() };
    map.insert("schema".into(), Value::String(PARAMS_SCHEMA.into()));
    let doc: ParamsDoc = serde_json::from_value(v).map_err(|e| Error::Parse(format!("{PARAMS_SCHEMA}: {e}")))?;
    doc.params.check()?;
    Ok(doc)
}
