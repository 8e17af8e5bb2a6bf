use super::{parse_with, Formula, VarTable};
use crate::error::{Error, Result};

/// One knowledge-base line: `[weight :] formula`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub weight: Option<f64>,
    pub formula: Formula,
    /// 1-based source line.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    pub rules: Vec<Rule>,
    pub vars: VarTable,
}

/// Parses a knowledge-base file body. Blank lines and lines starting with
/// `#` are skipped; all rules share one variable table.
pub fn parse_kb(src: &str) -> Result<KnowledgeBase> {
    parse_kb_with(src, VarTable::new())
}

/// Like [`parse_kb`], starting from an existing variable table so that its
/// indices are kept; new names are appended.
pub fn parse_kb_with(src: &str, mut vars: VarTable) -> Result<KnowledgeBase> {
    let mut rules = Vec::new();
    for (k, raw) in src.lines().enumerate() {
        let line = k + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let (weight, body) = match text.split_once(':') {
            Some((w, rest)) => {
                let w: f64 = w
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad weight `{}`", w.trim())).at_line(line))?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(
                        Error::InvalidArgument(format!("weight must be positive and finite, got {w}")).at_line(line),
                    );
                }
                (Some(w), rest)
            }
            None => (None, text),
        };
        let formula = parse_with(body, &mut vars).map_err(|e| e.at_line(line))?;
        rules.push(Rule { weight, formula, line });
    }
    if rules.is_empty() {
        return Err(Error::NoRules);
    }
    Ok(KnowledgeBase { rules, vars })
}
