//! Fixed-format MPS export.
//!
//! Names longer than eight characters (or containing whitespace) are replaced
//! by generated `Cnnnnnnn` / `Rnnnnnnn` codes; a comment block at the top of
//! the file maps every generated code back to the original name. Numbers are
//! written in their shortest exact decimal form, so a value that needs more
//! than twelve characters widens its field rather than losing precision.
//! The objective constant is written as the negated RHS of the objective row.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::problem::{MilpProblem, Relation, Sense};

const NAME_WIDTH: usize = 8;

pub fn export_mps(p: &MilpProblem) -> Vec<u8> {
    let mut used: HashSet<String> = HashSet::new();
    let short =
        |n: &str| n.len() <= NAME_WIDTH && !n.is_empty() && !n.contains(char::is_whitespace) && !n.starts_with('*');
    // Short original names are reserved first so generated codes never collide.
    for n in p
        .variables()
        .iter()
        .map(|v| v.name.as_str())
        .chain(p.constraints().iter().map(|c| c.name.as_str()))
    {
        if short(n) {
            used.insert(n.to_string());
        }
    }
    let mut counter = 0usize;
    let mut mangle = |name: &str, prefix: char, used: &mut HashSet<String>, taken: &mut HashSet<String>| -> String {
        if short(name) && taken.insert(name.to_string()) {
            return name.to_string();
        }
        loop {
            counter += 1;
            let code = format!("{prefix}{counter:07}");
            if !used.contains(&code) && taken.insert(code.clone()) {
                used.insert(code.clone());
                return code;
            }
        }
    };
    let mut taken_cols = HashSet::new();
    let cols: Vec<String> = p
        .variables()
        .iter()
        .map(|v| mangle(&v.name, 'C', &mut used, &mut taken_cols))
        .collect();
    let mut taken_rows = HashSet::new();
    let rows: Vec<String> = p
        .constraints()
        .iter()
        .map(|c| mangle(&c.name, 'R', &mut used, &mut taken_rows))
        .collect();
    let mut obj = "OBJ".to_string();
    while taken_rows.contains(&obj) {
        obj.push('_');
    }

    let mut out = String::new();
    out.push_str("* generated by gridshutoff\n");
    for (code, v) in cols.iter().zip(p.variables()) {
        if *code != v.name {
            let _ = writeln!(out, "* column {code} {}", v.name);
        }
    }
    for (code, c) in rows.iter().zip(p.constraints()) {
        if *code != c.name {
            let _ = writeln!(out, "* row {code} {}", c.name);
        }
    }
    out.push_str("NAME          GRIDSHUT\n");
    if p.sense() == Sense::Maximize {
        out.push_str("OBJSENSE\n    MAX\n");
    }
    out.push_str("ROWS\n");
    push_fields(&mut out, &["N", &obj]);
    for (code, c) in rows.iter().zip(p.constraints()) {
        let kind = match c.relation {
            Relation::Le => "L",
            Relation::Ge => "G",
            Relation::Eq => "E",
        };
        push_fields(&mut out, &[kind, code]);
    }

    // Column-major view of the row coefficients.
    let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p.num_vars()];
    for (i, c) in p.constraints().iter().enumerate() {
        for (v, a) in &c.terms {
            entries[v.0].push((i, *a));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut markers = 0usize;
    for (j, var) in p.variables().iter().enumerate() {
        if var.integer != in_int {
            markers += 1;
            let tag = if var.integer { "'INTORG'" } else { "'INTEND'" };
            push_fields(&mut out, &["", &format!("M{markers:07}"), "'MARKER'", "", tag]);
            in_int = var.integer;
        }
        let col = &cols[j];
        let c = p.objective()[j];
        let mut wrote = false;
        if c != 0.0 {
            push_fields(&mut out, &["", col, &obj, &num(c)]);
            wrote = true;
        }
        for (i, a) in &entries[j] {
            push_fields(&mut out, &["", col, &rows[*i], &num(*a)]);
            wrote = true;
        }
        if !wrote {
            push_fields(&mut out, &["", col, &obj, "0"]);
        }
    }
    if in_int {
        markers += 1;
        push_fields(&mut out, &["", &format!("M{markers:07}"), "'MARKER'", "", "'INTEND'"]);
    }

    out.push_str("RHS\n");
    if p.offset() != 0.0 {
        push_fields(&mut out, &["", "RHS", &obj, &num(-p.offset())]);
    }
    for (code, c) in rows.iter().zip(p.constraints()) {
        if c.rhs != 0.0 {
            push_fields(&mut out, &["", "RHS", code, &num(c.rhs)]);
        }
    }

    out.push_str("BOUNDS\n");
    for (col, v) in cols.iter().zip(p.variables()) {
        let (lo, hi) = (v.lower, v.upper);
        let mut bound = |kind: &str, value: Option<f64>| {
            let value = value.map(num).unwrap_or_default();
            push_fields(&mut out, &[kind, "BND", col, &value]);
        };
        if v.integer && lo == 0.0 && hi == 1.0 {
            bound("BV", None);
        } else if lo == hi {
            bound("FX", Some(lo));
        } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            bound("FR", None);
        } else {
            if lo == f64::NEG_INFINITY {
                bound("MI", None);
            } else if lo != 0.0 || v.integer {
                bound("LO", Some(lo));
            }
            if hi.is_finite() {
                bound("UP", Some(hi));
            } else if v.integer {
                bound("PL", None);
            }
        }
    }
    out.push_str("ENDATA\n");
    out.into_bytes()
}

/// Shortest exact decimal text for `v`.
fn num(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 12 {
        return plain;
    }
    let exp = format!("{v:e}");
    if exp.len() < plain.len() {
        exp
    } else {
        plain
    }
}

/// Writes a data record with fields at columns 2, 5, 15, 25, 40 and 50.
fn push_fields(out: &mut String, fields: &[&str]) {
    const STARTS: [usize; 6] = [1, 4, 14, 24, 39, 49];
    let mut line = String::new();
    for (f, start) in fields.iter().zip(STARTS) {
        if f.is_empty() {
            continue;
        }
        if line.len() < start {
            line.extend(std::iter::repeat_n(' ', start - line.len()));
        } else {
            line.push(' ');
        }
        line.push_str(f);
    }
    out.push_str(&line);
    out.push('\n');
}
