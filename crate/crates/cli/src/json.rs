//! JSON forms for factorizations and catalog entries.
//!
//! Bases and exponents are carried as decimal strings so arbitrary-precision
//! values survive any JSON parser:
//!
//! ```json
//! {"factors":[{"base":"1","exp":"2"},{"base":"-3","exp":"1"}]}
//! ```
//!
//! Infinite exponents are the string `"inf"`.

use std::str::FromStr;

use anyhow::{bail, Context, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use spoof_core::families::CatalogEntry;
use spoof_core::{Exponent, Factor, Factorization};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationJson {
    pub factors: Vec<FactorJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorJson {
    pub base: String,
    pub exp: String,
}

impl From<&Factorization> for FactorizationJson {
    fn from(f: &Factorization) -> Self {
        FactorizationJson {
            factors: f
                .factors()
                .iter()
                .map(|factor| FactorJson {
                    base: factor.base.to_string(),
                    exp: factor.exponent.to_string(),
                })
                .collect(),
        }
    }
}

impl FactorizationJson {
    pub fn to_factorization(&self) -> Result<Factorization> {
        let mut factors = Vec::with_capacity(self.factors.len());
        for fj in &self.factors {
            let base = BigInt::from_str(&fj.base)
                .with_context(|| format!("invalid base {:?}", fj.base))?;
            let exponent = if fj.exp == "inf" {
                Exponent::Infinite
            } else {
                let a: u64 =
                    fj.exp.parse().with_context(|| format!("invalid exponent {:?}", fj.exp))?;
                if a == 0 {
                    bail!("exponents must be >= 1");
                }
                Exponent::Finite(a)
            };
            factors.push(Factor::new(base, exponent));
        }
        Factorization::new(factors).map_err(|e| anyhow::anyhow!("{}", e))
    }
}

/// Parses either the text grammar or the JSON form, depending on `json`.
pub fn parse_input(input: &str, json: bool) -> Result<Factorization> {
    if json {
        let parsed: FactorizationJson =
            serde_json::from_str(input).context("invalid factorization JSON")?;
        parsed.to_factorization()
    } else {
        spoof_core::factorization::parse(input).map_err(|e| anyhow::anyhow!("{}", e))
    }
}

/// One catalog export line: `{"label":…,"provenance":…,"factorization":…}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntryJson {
    pub label: String,
    pub provenance: String,
    pub factorization: FactorizationJson,
}

impl From<&CatalogEntry> for CatalogEntryJson {
    fn from(e: &CatalogEntry) -> Self {
        CatalogEntryJson {
            label: e.label.clone(),
            provenance: e.provenance.as_str().to_string(),
            factorization: (&e.factorization).into(),
        }
    }
}
