//! The JSON documents of the tool and their conversions to core types.
//!
//! Component indices refer to positions in the `components` name list.
//! Rational scales travel as exact `p/q` strings.

use std::collections::BTreeMap;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use strata_core::blowup::{BlowupCenter, BlowupTrace};
use strata_core::nodal::{NodalData, SignPartition};
use strata_core::residue::{Residue, ResidueModel, SymbolKind, SymbolTable};
use strata_core::separatrix::TraceComponent;
use strata_core::structure::validate_structure;
use strata_core::{IndexId, StrataStructure, Stratum};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureDoc {
    pub dimension: usize,
    pub components: Vec<String>,
    pub strata: Vec<Vec<u32>>,
}

impl StructureDoc {
    pub fn from_core(s: &StrataStructure, names: &[String]) -> Self {
        StructureDoc {
            dimension: s.dimension(),
            components: names.to_vec(),
            strata: s
                .strata()
                .map(|j| j.members().iter().map(|i| i.0).collect())
                .collect(),
        }
    }

    pub fn default_names(s: &StrataStructure) -> Vec<String> {
        s.indices().iter().map(|i| format!("E{}", i.0)).collect()
    }

    pub fn to_core(&self) -> Result<StrataStructure> {
        let n = self.components.len() as u32;
        let mut strata = Vec::with_capacity(self.strata.len());
        for raw in &self.strata {
            for &i in raw {
                if i >= n {
                    bail!("stratum {:?} references component {} but only {} are named", raw, i, n);
                }
            }
            let stratum = Stratum::new(raw.iter().map(|&i| IndexId(i)))
                .map_err(|e| anyhow!("stratum {:?}: {}", raw, e))?;
            strata.push(stratum);
        }
        let s = StrataStructure::new(self.dimension, (0..n).map(IndexId), strata);
        let report = validate_structure(&s);
        if !report.is_valid() {
            let mut lines: Vec<String> =
                report.violations.iter().map(|v| v.to_string()).collect();
            lines.truncate(5);
            bail!("invalid structure: {}", lines.join("; "));
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceStepDoc {
    pub center: String,
    pub fresh: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceDoc {
    pub dimension: usize,
    pub steps: Vec<TraceStepDoc>,
    #[serde(rename = "final")]
    pub final_structure: StructureDoc,
}

impl TraceDoc {
    pub fn from_core(trace: &BlowupTrace) -> Result<Self> {
        let steps = trace
            .steps()
            .iter()
            .map(|(center, outcome)| {
                if matches!(center, BlowupCenter::Explicit { .. }) {
                    bail!("explicit centers have no spec string");
                }
                Ok(TraceStepDoc { center: center.to_string(), fresh: outcome.fresh_index.0 })
            })
            .collect::<Result<Vec<_>>>()?;
        let final_structure = trace.final_structure();
        let names = StructureDoc::default_names(&final_structure);
        Ok(TraceDoc {
            dimension: trace.dimension(),
            steps,
            final_structure: StructureDoc::from_core(&final_structure, &names),
        })
    }
}

/// Parses one center spec: `P[]`, `P[0,1]`, or `S[0,1]`.
pub fn parse_center(spec: &str) -> Result<BlowupCenter> {
    let spec = spec.trim();
    let (kind, rest) = spec.split_at(spec.len().min(1));
    let ids = rest
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| anyhow!("malformed center spec {:?} (expected P[..] or S[..])", spec))?;
    let ids: Vec<u32> = if ids.trim().is_empty() {
        Vec::new()
    } else {
        ids.split(',')
            .map(|v| v.trim().parse::<u32>().context("center spec index"))
            .collect::<Result<_>>()?
    };
    let stratum = Stratum::new(ids.into_iter().map(IndexId))
        .map_err(|e| anyhow!("center spec {:?}: {}", spec, e))?;
    match kind {
        "P" => Ok(BlowupCenter::FreePoint { host: stratum }),
        "S" => Ok(BlowupCenter::StratumCenter { core: stratum }),
        _ => bail!("unknown center kind {:?} (expected P or S)", spec),
    }
}

/// Parses a semicolon-separated list of center specs.
pub fn parse_centers(specs: &str) -> Result<Vec<BlowupCenter>> {
    specs
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(parse_center)
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolDoc {
    pub name: String,
    pub kind: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidueEntryDoc {
    pub symbol: String,
    pub scale: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResiduesDoc {
    pub symbols: Vec<SymbolDoc>,
    pub residues: BTreeMap<String, ResidueEntryDoc>,
}

impl ResiduesDoc {
    pub fn to_core(&self) -> Result<ResidueModel> {
        let mut table = SymbolTable::new();
        for symbol in &self.symbols {
            let kind = match symbol.kind.as_str() {
                "real" => SymbolKind::RealPositive,
                "nonreal" => SymbolKind::NonReal,
                other => bail!("unknown symbol kind {:?} (expected real or nonreal)", other),
            };
            if let Some(existing) = table.lookup(&symbol.name) {
                if table.kind(existing) != kind {
                    bail!("symbol {:?} re-declared with a different kind", symbol.name);
                }
                continue;
            }
            table.add(&symbol.name, kind).map_err(|e| anyhow!("{}", e))?;
        }
        let mut model = ResidueModel::new(table);
        for (index, entry) in &self.residues {
            let index: u32 = index
                .parse()
                .with_context(|| format!("residue key {:?}", index))?;
            let symbol = model
                .table()
                .lookup(&entry.symbol)
                .ok_or_else(|| anyhow!("residue references undeclared symbol {:?}", entry.symbol))?;
            let scale = BigRational::from_str(entry.scale.trim())
                .map_err(|e| anyhow!("scale {:?}: {}", entry.scale, e))?;
            let residue =
                Residue::new(symbol, scale).map_err(|e| anyhow!("scale {:?}: {}", entry.scale, e))?;
            model.assign(IndexId(index), residue);
        }
        Ok(model)
    }

}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodalEntryDoc {
    pub stratum: Vec<u32>,
    pub plus: Vec<u32>,
    pub minus: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodalDoc {
    pub nodal: Vec<NodalEntryDoc>,
}

impl NodalDoc {
    pub fn to_core(&self) -> Result<NodalData> {
        let mut data = NodalData::empty();
        for entry in &self.nodal {
            let plus = Stratum::new(entry.plus.iter().map(|&i| IndexId(i)))
                .map_err(|e| anyhow!("plus side {:?}: {}", entry.plus, e))?;
            let minus = Stratum::new(entry.minus.iter().map(|&i| IndexId(i)))
                .map_err(|e| anyhow!("minus side {:?}: {}", entry.minus, e))?;
            let partition = SignPartition::new(plus, minus).map_err(|e| anyhow!("{}", e))?;
            let declared = Stratum::new(entry.stratum.iter().map(|&i| IndexId(i)))
                .map_err(|e| anyhow!("stratum {:?}: {}", entry.stratum, e))?;
            if partition.stratum() != declared {
                bail!("nodal entry {:?}: sides do not partition the stratum", entry.stratum);
            }
            data.insert(partition);
        }
        Ok(data)
    }

}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceComponentDoc {
    pub id: String,
    pub host: u32,
    #[serde(default)]
    pub adjacent: Vec<String>,
}

/// A full model document: a structure plus any of residues, explicit nodal
/// data and trace annotations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelDoc {
    pub dimension: usize,
    pub components: Vec<String>,
    pub strata: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residues: Option<ResiduesDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodal: Option<Vec<NodalEntryDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<TraceComponentDoc>>,
}

impl ModelDoc {
    pub fn structure_doc(&self) -> StructureDoc {
        StructureDoc {
            dimension: self.dimension,
            components: self.components.clone(),
            strata: self.strata.clone(),
        }
    }

    pub fn trace_components(&self) -> Vec<TraceComponent> {
        self.traces
            .clone()
            .unwrap_or_default()
            .into_iter()
            .map(|t| TraceComponent {
                id: t.id,
                host: IndexId(t.host),
                adjacent: t.adjacent.into_iter().collect(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub n: usize,
    pub e: usize,
    pub rows: Vec<Vec<String>>,
}

impl MatrixDoc {
    pub fn to_rows(&self) -> Result<Vec<Vec<BigRational>>> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        BigRational::from_str(v.trim()).map_err(|e| anyhow!("entry {:?}: {}", v, e))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Pretty JSON with a trailing newline; all maps are ordered, so output is
/// byte-stable.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable documents");
    out.push('\n');
    out
}
