use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{parse_with, Formula, VarTable};

/// Which visible variables are observed inputs and which are predicted.
/// Together they cover every variable exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub inputs: Vec<usize>,
    pub targets: Vec<usize>,
}

impl Layout {
    pub fn new(n: usize, targets: Vec<usize>) -> Result<Self> {
        let mut is_target = vec![false; n];
        for &t in &targets {
            if t >= n {
                return Err(Error::VariableOutOfRange { index: t, len: n });
            }
            if std::mem::replace(&mut is_target[t], true) {
                return Err(Error::InvalidArgument(format!("target {t} listed twice")));
            }
        }
        let inputs = (0..n).filter(|&i| !is_target[i]).collect();
        Ok(Layout { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.len() + self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Full visible vector from input and target bits.
    pub fn assemble(&self, inputs: &[u8], targets: &[u8]) -> Vec<u8> {
        let mut v = vec![0u8; self.len()];
        for (&i, &b) in self.inputs.iter().zip(inputs) {
            v[i] = b;
        }
        for (&t, &b) in self.targets.iter().zip(targets) {
            v[t] = b;
        }
        v
    }

    pub fn split(&self, v: &[u8]) -> LabeledExample {
        LabeledExample {
            inputs: self.inputs.iter().map(|&i| v[i]).collect(),
            targets: self.targets.iter().map(|&t| v[t]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledExample {
    pub inputs: Vec<u8>,
    pub targets: Vec<u8>,
}

/// Sidecar JSON naming the target columns of a dataset CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub targets: Vec<String>,
}

impl DatasetSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_reader(File::open(path)?)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub vars: VarTable,
    pub layout: Layout,
    pub examples: Vec<LabeledExample>,
}

impl Dataset {
    /// Builds a dataset from full visible rows.
    pub fn from_rows(vars: VarTable, targets: &[&str], rows: &[Vec<u8>]) -> Result<Self> {
        let targets = targets.iter().map(|t| vars.lookup(t)).collect::<Result<Vec<_>>>()?;
        let layout = Layout::new(vars.len(), targets)?;
        let examples = rows
            .iter()
            .map(|r| {
                if r.len() != vars.len() {
                    return Err(Error::DimensionMismatch {
                        expected: vars.len(),
                        got: r.len(),
                    });
                }
                Ok(layout.split(r))
            })
            .collect::<Result<_>>()?;
        Ok(Dataset { vars, layout, examples })
    }

    /// Reads a CSV whose header names the variables and whose cells are 0/1.
    pub fn from_csv<R: Read>(reader: R, spec: &DatasetSpec) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let vars = VarTable::from_names(rdr.headers()?.iter())?;
        let mut rows = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|cell| match cell {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    other => Err(Error::InvalidArgument(format!("cell `{other}` is not 0 or 1")).at_line(k + 2)),
                })
                .collect::<Result<Vec<u8>>>()?;
            rows.push(row);
        }
        let targets: Vec<&str> = spec.targets.iter().map(String::as_str).collect();
        Dataset::from_rows(vars, &targets, &rows)
    }

    pub fn load(csv_path: impl AsRef<Path>, spec: &DatasetSpec) -> Result<Self> {
        Dataset::from_csv(File::open(csv_path)?, spec)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.vars.names())?;
        for ex in &self.examples {
            let v = self.layout.assemble(&ex.inputs, &ex.targets);
            w.write_record(v.iter().map(|b| b.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn spec(&self) -> DatasetSpec {
        DatasetSpec {
            targets: self
                .layout
                .targets
                .iter()
                .map(|&t| self.vars.name(t).unwrap_or_default().to_string())
                .collect(),
        }
    }
}

/// A noiseless classification task: `y` holds exactly when one of three
/// conjunctive rules over eight inputs fires.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleTask {
    pub vars: VarTable,
    /// `y <-> (body1 | body2 | body3)`.
    pub knowledge: Formula,
    pub train: Dataset,
    pub test: Dataset,
}

const RULE_TASK_BODIES: &str = "x1 & ~x2 | x3 & x4 | ~x5 & x6";

/// Samples inputs uniformly and labels them with the three rules.
pub fn synthetic_rule_task(seed: u64, n_train: usize, n_test: usize) -> Result<RuleTask> {
    let mut vars = VarTable::from_names((1..=8).map(|i| format!("x{i}")).chain(["y".to_string()]))?;
    let bodies = parse_with(RULE_TASK_BODIES, &mut vars)?;
    let y = vars.lookup("y")?;
    let knowledge = Formula::iff(Formula::var(y), bodies.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |n: usize| -> Vec<Vec<u8>> {
        (0..n)
            .map(|_| {
                let mut v: Vec<u8> = (0..vars.len()).map(|_| rng.gen::<bool>() as u8).collect();
                v[y] = u8::from(bodies.eval_bits(&v));
                v
            })
            .collect()
    };
    let (train_rows, test_rows) = (draw(n_train), draw(n_test));
    Ok(RuleTask {
        train: Dataset::from_rows(vars.clone(), &["y"], &train_rows)?,
        test: Dataset::from_rows(vars.clone(), &["y"], &test_rows)?,
        vars,
        knowledge,
    })
}
