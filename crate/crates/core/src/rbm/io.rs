use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CompiledRbm, RbmModel};
use crate::error::{Error, Result};
use crate::formula::VarTable;
use crate::normalize::{Clause, WeightedClause};

/// Hidden unit `hidden` encodes `weight : pos & ~neg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseUnit {
    pub hidden: usize,
    pub weight: f64,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
}

/// On-disk JSON model. Floats are written in shortest round-trip form, so
/// save/load is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub n_visible: usize,
    pub n_hidden: usize,
    pub epsilon: f64,
    pub temperature: f64,
    pub weights: Vec<f64>,
    pub visible_bias: Vec<f64>,
    pub hidden_bias: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clause_map: Option<Vec<ClauseUnit>>,
    pub var_table: Vec<String>,
}

impl ModelFile {
    pub fn new(model: &RbmModel, clause_map: Option<&[WeightedClause]>, vars: &VarTable) -> Self {
        ModelFile {
            n_visible: model.n_visible,
            n_hidden: model.n_hidden,
            epsilon: model.epsilon,
            temperature: model.temperature,
            weights: model.weights.clone(),
            visible_bias: model.visible_bias.clone(),
            hidden_bias: model.hidden_bias.clone(),
            clause_map: clause_map.map(|m| {
                m.iter()
                    .enumerate()
                    .map(|(j, e)| ClauseUnit {
                        hidden: j,
                        weight: e.weight,
                        pos: e.clause.pos().to_vec(),
                        neg: e.clause.neg().to_vec(),
                    })
                    .collect()
            }),
            var_table: vars.names().to_vec(),
        }
    }

    pub fn from_compiled(compiled: &CompiledRbm, vars: &VarTable) -> Self {
        ModelFile::new(&compiled.model, Some(&compiled.clause_map), vars)
    }

    pub fn model(&self) -> Result<RbmModel> {
        let m = RbmModel {
            n_visible: self.n_visible,
            n_hidden: self.n_hidden,
            weights: self.weights.clone(),
            visible_bias: self.visible_bias.clone(),
            hidden_bias: self.hidden_bias.clone(),
            epsilon: self.epsilon,
            temperature: self.temperature,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn vars(&self) -> Result<VarTable> {
        let vt = VarTable::from_names(self.var_table.iter().cloned())?;
        if vt.len() != self.n_visible {
            return Err(Error::DimensionMismatch {
                expected: self.n_visible,
                got: vt.len(),
            });
        }
        Ok(vt)
    }

    /// Decoded clause map, if present.
    pub fn clauses(&self) -> Result<Option<Vec<WeightedClause>>> {
        let Some(units) = &self.clause_map else { return Ok(None) };
        units
            .iter()
            .map(|u| {
                let clause = Clause::new(u.pos.clone(), u.neg.clone()).ok_or_else(|| {
                    Error::InvalidArgument(format!("hidden unit {} has a contradictory clause", u.hidden))
                })?;
                Ok(WeightedClause {
                    weight: u.weight,
                    clause,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let mf: ModelFile = serde_json::from_str(src)?;
        mf.model()?;
        mf.vars()?;
        Ok(mf)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        ModelFile::from_json(&fs::read_to_string(path)?)
    }
}
