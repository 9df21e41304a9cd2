//! Minimal fixed-format MPS reader written against the format description,
//! independent of the exporter. Restores original names from the comment map.

use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRow {
    pub kind: char,
    pub coeffs: HashMap<String, f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedMps {
    pub maximize: bool,
    pub objective_row: String,
    pub objective: HashMap<String, f64>,
    /// Constant term of the objective (negated RHS of the objective row).
    pub offset: f64,
    pub rows: HashMap<String, ParsedRow>,
    pub row_order: Vec<String>,
    pub columns: Vec<String>,
    pub integer: HashMap<String, bool>,
    pub lower: HashMap<String, f64>,
    pub upper: HashMap<String, f64>,
}

pub fn parse(text: &str) -> Result<ParsedMps, String> {
    let mut rename: HashMap<String, String> = HashMap::new();
    let mut section = String::new();
    let mut out = ParsedMps {
        maximize: false,
        objective_row: String::new(),
        objective: HashMap::new(),
        offset: 0.0,
        rows: HashMap::new(),
        row_order: Vec::new(),
        columns: Vec::new(),
        integer: HashMap::new(),
        lower: HashMap::new(),
        upper: HashMap::new(),
    };
    let mut in_int = false;
    let name = |rename: &HashMap<String, String>, s: &str| rename.get(s).cloned().unwrap_or_else(|| s.to_string());
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"));

    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('*') {
            let parts: Vec<&str> = comment.split_whitespace().collect();
            if parts.len() == 3 && (parts[0] == "column" || parts[0] == "row") {
                rename.insert(parts[1].to_string(), parts[2].to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !line.starts_with(' ') {
            section = line.split_whitespace().next().unwrap_or("").to_string();
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        match section.as_str() {
            "OBJSENSE" => out.maximize = f[0] == "MAX" || f[0] == "MAXIMIZE",
            "ROWS" => {
                let kind = f[0].chars().next().ok_or("empty row kind")?;
                if kind == 'N' {
                    out.objective_row = f[1].to_string();
                } else {
                    let n = name(&rename, f[1]);
                    out.row_order.push(n.clone());
                    out.rows.insert(
                        n,
                        ParsedRow {
                            kind,
                            coeffs: HashMap::new(),
                            rhs: 0.0,
                        },
                    );
                }
            }
            "COLUMNS" => {
                if f.len() >= 3 && f[1] == "'MARKER'" {
                    in_int = f[2] == "'INTORG'";
                    continue;
                }
                let col = name(&rename, f[0]);
                if out.columns.last() != Some(&col) {
                    out.columns.push(col.clone());
                    out.integer.insert(col.clone(), in_int);
                }
                for pair in f[1..].chunks(2) {
                    let value = num(pair[1])?;
                    if pair[0] == out.objective_row {
                        if value != 0.0 {
                            out.objective.insert(col.clone(), value);
                        }
                    } else {
                        let row = name(&rename, pair[0]);
                        out.rows
                            .get_mut(&row)
                            .ok_or(format!("unknown row {row}"))?
                            .coeffs
                            .insert(col.clone(), value);
                    }
                }
            }
            "RHS" => {
                for pair in f[1..].chunks(2) {
                    let value = num(pair[1])?;
                    if pair[0] == out.objective_row {
                        out.offset = -value;
                    } else {
                        let row = name(&rename, pair[0]);
                        out.rows.get_mut(&row).ok_or(format!("unknown row {row}"))?.rhs = value;
                    }
                }
            }
            "BOUNDS" => {
                let col = name(&rename, f[2]);
                match f[0] {
                    "UP" => {
                        out.upper.insert(col, num(f[3])?);
                    }
                    "LO" => {
                        out.lower.insert(col, num(f[3])?);
                    }
                    "FX" => {
                        let v = num(f[3])?;
                        out.lower.insert(col.clone(), v);
                        out.upper.insert(col, v);
                    }
                    "FR" => {
                        out.lower.insert(col.clone(), f64::NEG_INFINITY);
                        out.upper.insert(col, f64::INFINITY);
                    }
                    "MI" => {
                        out.lower.insert(col, f64::NEG_INFINITY);
                    }
                    "PL" => {
                        out.upper.insert(col, f64::INFINITY);
                    }
                    "BV" => {
                        out.lower.insert(col.clone(), 0.0);
                        out.upper.insert(col.clone(), 1.0);
                        out.integer.insert(col, true);
                    }
                    other => return Err(format!("unsupported bound type {other}")),
                }
            }
            other => return Err(format!("data line in section `{other}`")),
        }
    }
    Ok(out)
}

impl ParsedMps {
    /// Bounds with MPS defaults: [0, inf) for continuous columns.
    pub fn bounds(&self, col: &str) -> (f64, f64) {
        (
            self.lower.get(col).copied().unwrap_or(0.0),
            self.upper.get(col).copied().unwrap_or(f64::INFINITY),
        )
    }
}
