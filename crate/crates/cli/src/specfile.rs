//! The TOML building description.
//!
//! ```toml
//! [[generator]]
//! name = "a"
//! q = 3
//!
//! [[generator]]
//! name = "b"
//! q = 3
//!
//! [[m]]
//! i = "a"
//! j = "b"
//! m = "inf"
//!
//! [defaults]
//! radius = 4
//! seed = 1
//! ```
//!
//! The order of the `[[generator]]` tables is the canonical generator order:
//! normal forms list commuting syllables by it, so it changes every printed
//! chamber. Every unordered pair of distinct generators needs exactly one
//! `[[m]]` entry, with `m = 2` or `m = "inf"`.

use std::path::Path;

use anyhow::{bail, Context};
use rabuild::coxeter::{validate_diagram, EdgeOrder, RawDiagram, RawEntry, RawOrder};
use rabuild::verify::Fault;
use rabuild::{BuildingSpec, Error};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(rename = "generator")]
    pub generators: Vec<GeneratorEntry>,
    #[serde(rename = "m", default)]
    pub orders: Vec<OrderEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defaults: Option<Defaults>,
    /// Harness self-test: injects a deliberate defect into the checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_test: Option<SelfTest>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub name: String,
    pub q: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderEntry {
    pub i: String,
    pub j: String,
    pub m: Order,
}

/// `2`, or the literal string `"inf"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Order {
    Finite(u64),
    Word(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfTest {
    pub fault: Fault,
}

impl SpecFile {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("cannot parse {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec files always serialize")
    }

    /// Validates the description into a building.
    pub fn building(&self) -> anyhow::Result<BuildingSpec> {
        let mut entries = Vec::with_capacity(self.orders.len());
        for o in &self.orders {
            let m = match &o.m {
                Order::Finite(k) => RawOrder::Finite(*k),
                Order::Word(w) if w == "inf" => RawOrder::Infinite,
                Order::Word(w) => {
                    return Err(Error::BadOrder { i: o.i.clone(), j: o.j.clone(), order: format!("{w:?}") }.into())
                }
            };
            entries.push(RawEntry { i: o.i.clone(), j: o.j.clone(), m });
        }
        let raw = RawDiagram { generators: self.generators.iter().map(|g| g.name.clone()).collect(), entries };
        let diagram = validate_diagram(&raw)?;
        let spec = BuildingSpec::new(diagram, self.generators.iter().map(|g| g.q).collect())?;
        if let Some(r) = self.defaults.as_ref().and_then(|d| d.radius) {
            if r == 0 {
                bail!("default radius must be at least 1");
            }
        }
        Ok(spec)
    }

    /// The description of `spec`, one `[[m]]` entry per pair in generator
    /// order.
    pub fn from_building(spec: &BuildingSpec) -> Self {
        let d = spec.diagram();
        let generators = (0..d.rank())
            .map(|i| GeneratorEntry { name: d.name(i).to_string(), q: u32::from(spec.thickness(i)) })
            .collect();
        let mut orders = Vec::new();
        for i in 0..d.rank() {
            for j in (i + 1)..d.rank() {
                let m = match d.order(i, j) {
                    EdgeOrder::Two => Order::Finite(2),
                    EdgeOrder::Infinite => Order::Word("inf".into()),
                };
                orders.push(OrderEntry { i: d.name(i).to_string(), j: d.name(j).to_string(), m });
            }
        }
        SpecFile { generators, orders, defaults: None, self_test: None }
    }

    pub fn radius(&self) -> Option<usize> {
        self.defaults.as_ref().and_then(|d| d.radius)
    }

    pub fn seed(&self) -> Option<u64> {
        self.defaults.as_ref().and_then(|d| d.seed)
    }

    pub fn fault(&self) -> Option<Fault> {
        self.self_test.as_ref().map(|s| s.fault)
    }
}
