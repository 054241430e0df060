//! Free-format MPS reading and writing.
//!
//! The dialect is whitespace-delimited: a line starting in column one
//! opens a section (`NAME`, `OBJSENSE`, `ROWS`, `COLUMNS`, `RHS`,
//! `BOUNDS`, `ENDATA`), indented lines carry data, and `*` starts a
//! comment. Row types `N`/`L`/`G`/`E` map to the objective and the three
//! relations; duplicate coefficient entries are summed. `RANGES` sections,
//! objective-row right-hand sides, and integrality markers are rejected
//! with the offending line number. Bound types `LO`, `UP`, `FX`, `FR`,
//! `MI`, and `PL` are supported; the RHS and BOUNDS sets must be named.
//! An `UP` bound below zero on a variable still at its default lower
//! bound drops that lower bound to minus infinity, following common
//! solver practice.

use std::collections::HashMap;

use lp_core::model::{GeneralLp, Relation, Sense};
use lp_core::Mat;

use crate::Error;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num(tok: &str, line: usize) -> Result<f64, Error> {
    tok.parse::<f64>().map_err(|_| perr(line, format!("'{}' is not a number", tok)))
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    None,
    Objsense,
    Rows,
    Columns,
    Rhs,
    Bounds,
}

/// Parse free-format MPS text into a general-form program.
pub fn parse_mps(text: &str) -> Result<GeneralLp, Error> {
    let mut name = "LP".to_string();
    let mut sense = Sense::Minimize;
    let mut obj_row: Option<String> = None;
    let mut row_names: Vec<String> = Vec::new();
    let mut row_rel: Vec<Relation> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut col_names: Vec<String> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    // Sparse triplets until the shape is known.
    let mut entries: Vec<(usize, usize, f64)> = Vec::new(); // (row, col, coeff)
    let mut obj_entries: Vec<(usize, f64)> = Vec::new(); // (col, coeff)
    let mut rhs: HashMap<usize, f64> = HashMap::new();
    let mut bounds: Vec<(usize, usize, String, Option<f64>)> = Vec::new(); // (line, col, type, value)

    let mut section = Section::None;
    let mut saw_rows = false;
    let mut saw_columns = false;
    let mut ended = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        if ended {
            return Err(perr(line, "content after ENDATA"));
        }
        let indented = raw.starts_with(' ') || raw.starts_with('\t');
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !indented {
            match toks[0] {
                "NAME" => {
                    if let Some(t) = toks.get(1) {
                        name = t.to_string();
                    }
                    section = Section::None;
                }
                "OBJSENSE" => {
                    if let Some(t) = toks.get(1) {
                        sense = parse_sense(t, line)?;
                        section = Section::None;
                    } else {
                        section = Section::Objsense;
                    }
                }
                "ROWS" => {
                    saw_rows = true;
                    section = Section::Rows;
                }
                "COLUMNS" => {
                    if !saw_rows {
                        return Err(perr(line, "COLUMNS before ROWS"));
                    }
                    saw_columns = true;
                    section = Section::Columns;
                }
                "RHS" => {
                    section = Section::Rhs;
                }
                "RANGES" => {
                    return Err(perr(line, "RANGES sections are not supported"));
                }
                "BOUNDS" => {
                    section = Section::Bounds;
                }
                "ENDATA" => {
                    ended = true;
                }
                other => return Err(perr(line, format!("unknown section '{}'", other))),
            }
            continue;
        }

        match section {
            Section::None => return Err(perr(line, "data line outside any section")),
            Section::Objsense => {
                sense = parse_sense(toks[0], line)?;
                section = Section::None;
            }
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(perr(line, "expected 'type name'"));
                }
                let (ty, rname) = (toks[0], toks[1]);
                if obj_row.as_deref() == Some(rname) || row_index.contains_key(rname) {
                    return Err(perr(line, format!("duplicate row name '{}'", rname)));
                }
                match ty {
                    "N" => {
                        if obj_row.is_some() {
                            return Err(perr(line, "a second N row; one objective is supported"));
                        }
                        obj_row = Some(rname.to_string());
                    }
                    "L" | "G" | "E" => {
                        row_index.insert(rname.to_string(), row_names.len());
                        row_names.push(rname.to_string());
                        row_rel.push(match ty {
                            "L" => Relation::Le,
                            "G" => Relation::Ge,
                            _ => Relation::Eq,
                        });
                    }
                    other => return Err(perr(line, format!("unknown row type '{}'", other))),
                }
            }
            Section::Columns => {
                if toks.len() >= 3 && toks[1] == "'MARKER'" {
                    return Err(perr(line, "integrality markers are not supported"));
                }
                if toks.len() < 3 || toks.len() % 2 == 0 {
                    return Err(perr(line, "expected 'column row value [row value]'"));
                }
                let col = *col_index.entry(toks[0].to_string()).or_insert_with(|| {
                    col_names.push(toks[0].to_string());
                    col_names.len() - 1
                });
                for pair in toks[1..].chunks(2) {
                    let val = parse_num(pair[1], line)?;
                    if obj_row.as_deref() == Some(pair[0]) {
                        obj_entries.push((col, val));
                    } else {
                        let row = *row_index
                            .get(pair[0])
                            .ok_or_else(|| perr(line, format!("unknown row '{}'", pair[0])))?;
                        entries.push((row, col, val));
                    }
                }
            }
            Section::Rhs => {
                if toks.len() < 3 || toks.len() % 2 == 0 {
                    return Err(perr(line, "expected 'set row value [row value]'"));
                }
                for pair in toks[1..].chunks(2) {
                    let val = parse_num(pair[1], line)?;
                    if obj_row.as_deref() == Some(pair[0]) {
                        return Err(perr(
                            line,
                            "right-hand sides on the objective row (objective constants) are not supported",
                        ));
                    }
                    let row = *row_index
                        .get(pair[0])
                        .ok_or_else(|| perr(line, format!("unknown row '{}'", pair[0])))?;
                    *rhs.entry(row).or_insert(0.0) += val;
                }
            }
            Section::Bounds => {
                let ty = toks[0];
                let (needs_value, arity) = match ty {
                    "LO" | "UP" | "FX" => (true, 4),
                    "FR" | "MI" | "PL" => (false, 3),
                    other => return Err(perr(line, format!("unknown bound type '{}'", other))),
                };
                if toks.len() != arity {
                    return Err(perr(
                        line,
                        format!("expected '{} set column{}'", ty, if needs_value { " value" } else { "" }),
                    ));
                }
                let col = *col_index
                    .get(toks[2])
                    .ok_or_else(|| perr(line, format!("unknown column '{}'", toks[2])))?;
                let val = if needs_value { Some(parse_num(toks[3], line)?) } else { None };
                bounds.push((line, col, ty.to_string(), val));
            }
        }
    }

    if !saw_rows {
        return Err(perr(text.lines().count().max(1), "missing ROWS section"));
    }
    if obj_row.is_none() {
        return Err(perr(text.lines().count().max(1), "missing objective (N) row"));
    }
    if !saw_columns {
        return Err(perr(text.lines().count().max(1), "missing COLUMNS section"));
    }

    let m = row_names.len();
    let n = col_names.len();
    let mut a = Mat::zeros(m, n);
    for (i, j, v) in entries {
        a.set(i, j, a.get(i, j) + v);
    }
    let mut c = vec![0.0; n];
    for (j, v) in obj_entries {
        c[j] += v;
    }
    let b: Vec<f64> = (0..m).map(|i| rhs.get(&i).copied().unwrap_or(0.0)).collect();

    let mut lower = vec![0.0; n];
    let mut upper = vec![f64::INFINITY; n];
    let mut lower_touched = vec![false; n];
    for (line, j, ty, val) in bounds {
        match ty.as_str() {
            "LO" => {
                lower[j] = val.expect("LO carries a value");
                lower_touched[j] = true;
            }
            "UP" => {
                let u = val.expect("UP carries a value");
                upper[j] = u;
                if u < 0.0 && !lower_touched[j] {
                    lower[j] = f64::NEG_INFINITY;
                }
            }
            "FX" => {
                let v = val.expect("FX carries a value");
                lower[j] = v;
                upper[j] = v;
                lower_touched[j] = true;
            }
            "FR" => {
                lower[j] = f64::NEG_INFINITY;
                upper[j] = f64::INFINITY;
                lower_touched[j] = true;
            }
            "MI" => {
                lower[j] = f64::NEG_INFINITY;
                lower_touched[j] = true;
            }
            "PL" => {
                upper[j] = f64::INFINITY;
            }
            _ => unreachable!("bound types validated at parse"),
        }
        if lower[j] > upper[j] {
            return Err(perr(line, format!("bounds cross for column '{}'", col_names[j])));
        }
    }

    let mut p = GeneralLp::new(sense, c, a, row_rel, b, lower, upper)?;
    p.name = name;
    p.row_names = row_names;
    p.col_names = col_names;
    Ok(p)
}

fn parse_sense(tok: &str, line: usize) -> Result<Sense, Error> {
    match tok {
        "MIN" | "MINIMIZE" => Ok(Sense::Minimize),
        "MAX" | "MAXIMIZE" => Ok(Sense::Maximize),
        other => Err(perr(line, format!("unknown objective sense '{}'", other))),
    }
}

/// Render a general-form program as free-format MPS.
///
/// Every column appears with an explicit objective coefficient (zero
/// included) so that columns outside every constraint survive a round
/// trip; numbers use the shortest representation that parses back to the
/// same value.
pub fn write_mps(p: &GeneralLp) -> String {
    let mut out = String::new();
    out.push_str(&format!("NAME {}\n", p.name));
    if p.sense == Sense::Maximize {
        out.push_str("OBJSENSE\n    MAX\n");
    }
    out.push_str("ROWS\n");
    out.push_str(" N OBJ\n");
    for (i, rname) in p.row_names.iter().enumerate() {
        let ty = match p.rel[i] {
            Relation::Le => "L",
            Relation::Ge => "G",
            Relation::Eq => "E",
        };
        out.push_str(&format!(" {} {}\n", ty, rname));
    }
    out.push_str("COLUMNS\n");
    for (j, cname) in p.col_names.iter().enumerate() {
        out.push_str(&format!("    {} OBJ {}\n", cname, p.c[j]));
        for i in 0..p.m() {
            let v = p.a.get(i, j);
            if v != 0.0 {
                out.push_str(&format!("    {} {} {}\n", cname, p.row_names[i], v));
            }
        }
    }
    out.push_str("RHS\n");
    for i in 0..p.m() {
        if p.b[i] != 0.0 {
            out.push_str(&format!("    RHS1 {} {}\n", p.row_names[i], p.b[i]));
        }
    }
    let mut bound_lines = String::new();
    for (j, cname) in p.col_names.iter().enumerate() {
        let (l, u) = (p.lower[j], p.upper[j]);
        if l == 0.0 && u == f64::INFINITY {
            continue;
        }
        if l == f64::NEG_INFINITY && u == f64::INFINITY {
            bound_lines.push_str(&format!(" FR BND1 {}\n", cname));
            continue;
        }
        if l == u {
            bound_lines.push_str(&format!(" FX BND1 {} {}\n", cname, l));
            continue;
        }
        if l == f64::NEG_INFINITY {
            bound_lines.push_str(&format!(" MI BND1 {}\n", cname));
        } else if l != 0.0 {
            bound_lines.push_str(&format!(" LO BND1 {} {}\n", cname, l));
        }
        if u != f64::INFINITY {
            bound_lines.push_str(&format!(" UP BND1 {} {}\n", cname, u));
        }
    }
    if !bound_lines.is_empty() {
        out.push_str("BOUNDS\n");
        out.push_str(&bound_lines);
    }
    out.push_str("ENDATA\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn golden_fixture_parses_exactly() {
        let text = "\
* a two-row, two-column program
NAME TINY
ROWS
 N COST
 L LIM1
 G LIM2
COLUMNS
    X1 COST 1.5 LIM1 1
    X1 LIM2 2
    X2 COST -1 LIM1 1
RHS
    RHS1 LIM1 4 LIM2 1
BOUNDS
 UP BND1 X1 3
ENDATA
";
        let p = parse_mps(text).unwrap();
        assert_eq!(p.name, "TINY");
        assert_eq!(p.sense, Sense::Minimize);
        assert_eq!(p.row_names, vec!["LIM1", "LIM2"]);
        assert_eq!(p.col_names, vec!["X1", "X2"]);
        assert_eq!(p.c, vec![1.5, -1.0]);
        assert_eq!(p.rel, vec![Relation::Le, Relation::Ge]);
        assert_eq!(p.b, vec![4.0, 1.0]);
        assert_eq!(p.a.get(0, 0), 1.0);
        assert_eq!(p.a.get(1, 0), 2.0);
        assert_eq!(p.a.get(0, 1), 1.0);
        assert_eq!(p.a.get(1, 1), 0.0);
        assert_eq!(p.lower, vec![0.0, 0.0]);
        assert_eq!(p.upper[0], 3.0);
        assert_eq!(p.upper[1], f64::INFINITY);
    }

    #[test]
    fn default_bounds_apply_without_a_bounds_section() {
        let text = "\
NAME D
ROWS
 N OBJ
 E R1
COLUMNS
    X1 OBJ 1 R1 1
ENDATA
";
        let p = parse_mps(text).unwrap();
        assert_eq!(p.lower, vec![0.0]);
        assert_eq!(p.upper, vec![f64::INFINITY]);
        assert_eq!(p.b, vec![0.0]);
    }

    #[test]
    fn ranges_are_rejected_with_the_line() {
        let text = "NAME R\nROWS\n N OBJ\n L R1\nCOLUMNS\n    X1 OBJ 1 R1 1\nRANGES\n    RNG R1 2\nENDATA\n";
        match parse_mps(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 7);
                assert!(msg.contains("RANGES"));
            }
            other => panic!("expected a parse error, got {:?}", other),
        }
    }

    #[test]
    fn structural_mistakes_are_line_numbered() {
        let dup = "NAME X\nROWS\n N OBJ\n L R1\n L R1\n";
        match parse_mps(dup) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 5);
                assert!(msg.contains("duplicate row"));
            }
            other => panic!("expected a parse error, got {:?}", other),
        }

        let no_obj = "NAME X\nROWS\n L R1\nCOLUMNS\n    X1 R1 1\nENDATA\n";
        assert!(matches!(parse_mps(no_obj), Err(Error::Parse { .. })));

        let bad_row = "NAME X\nROWS\n N OBJ\n L R1\nCOLUMNS\n    X1 NOPE 1\nENDATA\n";
        match parse_mps(bad_row) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected a parse error, got {:?}", other),
        }

        let obj_rhs = "NAME X\nROWS\n N OBJ\n L R1\nCOLUMNS\n    X1 OBJ 1 R1 1\nRHS\n    RHS1 OBJ 5\nENDATA\n";
        match parse_mps(obj_rhs) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 8);
                assert!(msg.contains("objective"));
            }
            other => panic!("expected a parse error, got {:?}", other),
        }
    }

    #[test]
    fn duplicate_coefficients_are_summed() {
        let text = "\
NAME S
ROWS
 N OBJ
 E R1
COLUMNS
    X1 OBJ 1 R1 1
    X1 R1 2.5
RHS
    RHS1 R1 7
ENDATA
";
        let p = parse_mps(text).unwrap();
        assert_eq!(p.a.get(0, 0), 3.5);
    }

    #[test]
    fn negative_upper_bound_frees_the_lower_side() {
        let text = "\
NAME N
ROWS
 N OBJ
 E R1
COLUMNS
    X1 OBJ 1 R1 1
BOUNDS
 UP BND1 X1 -2
ENDATA
";
        let p = parse_mps(text).unwrap();
        assert_eq!(p.lower[0], f64::NEG_INFINITY);
        assert_eq!(p.upper[0], -2.0);
    }

    fn random_general(rng: &mut ChaCha8Rng) -> GeneralLp {
        let m = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=6);
        let mut a = Mat::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                if rng.gen_bool(0.6) {
                    a.set(i, j, rng.gen_range(-20..=20) as f64 / 8.0);
                }
            }
        }
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-20..=20) as f64 / 8.0).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-20..=20) as f64 / 8.0).collect();
        let rel: Vec<Relation> = (0..m)
            .map(|_| match rng.gen_range(0..3) {
                0 => Relation::Le,
                1 => Relation::Ge,
                _ => Relation::Eq,
            })
            .collect();
        let mut lower = vec![0.0; n];
        let mut upper = vec![f64::INFINITY; n];
        for j in 0..n {
            match rng.gen_range(0..5) {
                0 => lower[j] = f64::NEG_INFINITY,
                1 => {
                    lower[j] = rng.gen_range(-8..=8) as f64 / 4.0;
                    upper[j] = lower[j] + rng.gen_range(0..=8) as f64 / 4.0;
                }
                2 => upper[j] = rng.gen_range(0..=8) as f64 / 4.0,
                3 => {
                    lower[j] = f64::NEG_INFINITY;
                    upper[j] = rng.gen_range(-8..=8) as f64 / 4.0;
                }
                _ => {}
            }
        }
        let sense = if rng.gen_bool(0.5) { Sense::Minimize } else { Sense::Maximize };
        GeneralLp::new(sense, c, a, rel, b, lower, upper).unwrap()
    }

    #[test]
    fn round_trip_reproduces_the_numbers() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..40 {
            let p = random_general(&mut rng);
            let text = write_mps(&p);
            let q = parse_mps(&text).unwrap();
            assert_eq!(q.sense, p.sense);
            assert_eq!(q.c, p.c);
            assert_eq!(q.a, p.a);
            assert_eq!(q.rel, p.rel);
            assert_eq!(q.b, p.b);
            assert_eq!(q.lower, p.lower);
            assert_eq!(q.upper, p.upper);
            assert_eq!(q.row_names, p.row_names);
            assert_eq!(q.col_names, p.col_names);
        }
    }
}
