//! Line-based text formats.
//!
//! Instance files:
//!
//! ```text
//! rap 1
//! graph <n_r> <n_t>
//! edge <r_index> <t_index> <cost> <v|i>
//! ...
//! ```
//!
//! one `edge` line per edge in id order, `v` marking a vulnerable edge.
//! Solution files are `solution <count>` followed by one edge id per line,
//! ascending. Set cover files are `setcover <k> <l>` followed by `l` lines
//! `set <elem> ...` with 1-based elements. In every format `#` starts a
//! comment that runs to the end of the line.

use std::fmt::Write as _;

use crate::error::{RapError, Result};
use crate::graph::{BipartiteMultigraph, EdgeId};
use crate::instance::{RapInstance, Solution};
use crate::reductions::SetCoverInstance;

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn perr(line: usize, msg: impl Into<String>) -> RapError {
    RapError::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse().map_err(|_| perr(line, format!("bad {what} '{tok}'")))
}

fn expect_keyword(line: usize, tokens: &[&str], kw: &str, arity: usize) -> Result<()> {
    if tokens[0] != kw {
        return Err(perr(line, format!("expected '{kw}', found '{}'", tokens[0])));
    }
    if tokens.len() != arity + 1 {
        return Err(perr(line, format!("'{kw}' takes {arity} fields, found {}", tokens.len() - 1)));
    }
    Ok(())
}

/// Decimal text for a cost; integral values print without a fraction.
pub fn format_cost(c: f64) -> String {
    if c.fract() == 0.0 && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

pub fn parse_instance(text: &str) -> Result<RapInstance> {
    let mut lines = content_lines(text);
    let (l1, header) = lines.next().ok_or_else(|| perr(1, "empty instance file"))?;
    expect_keyword(l1, &header, "rap", 1)?;
    if header[1] != "1" {
        return Err(perr(l1, format!("unsupported format version '{}'", header[1])));
    }
    let (l2, graph) = lines.next().ok_or_else(|| perr(l1 + 1, "missing 'graph' line"))?;
    expect_keyword(l2, &graph, "graph", 2)?;
    let n_r: usize = parse_num(l2, graph[1], "node count")?;
    let n_t: usize = parse_num(l2, graph[2], "node count")?;
    let mut edges = Vec::new();
    let mut costs = Vec::new();
    let mut vulnerable = Vec::new();
    for (ln, tokens) in lines {
        expect_keyword(ln, &tokens, "edge", 4)?;
        let r: usize = parse_num(ln, tokens[1], "r index")?;
        let t: usize = parse_num(ln, tokens[2], "t index")?;
        if r >= n_r || t >= n_t {
            return Err(perr(ln, format!("edge ({r}, {t}) out of range")));
        }
        let c: f64 = parse_num(ln, tokens[3], "cost")?;
        if !(c.is_finite() && c >= 0.0) {
            return Err(perr(ln, format!("cost must be a non-negative decimal, got '{}'", tokens[3])));
        }
        match tokens[4] {
            "v" => vulnerable.push(edges.len()),
            "i" => {}
            other => return Err(perr(ln, format!("expected 'v' or 'i', found '{other}'"))),
        }
        edges.push((r, t));
        costs.push(c);
    }
    let g = BipartiteMultigraph::from_edges(n_r, n_t, edges)?;
    RapInstance::new(g, vulnerable, costs)
}

/// Serialises an instance. `header` lines become leading comments and
/// `edge_notes[e]`, when non-empty, a trailing comment on edge `e`'s line.
pub fn write_instance_annotated(inst: &RapInstance, header: &[String], edge_notes: &[String]) -> String {
    let g = inst.graph();
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    let _ = writeln!(out, "rap 1");
    let _ = writeln!(out, "graph {} {}", g.n_r(), g.n_t());
    for (e, &(r, t)) in g.edges().iter().enumerate() {
        let flag = if inst.is_vulnerable(e) { 'v' } else { 'i' };
        let _ = write!(out, "edge {r} {t} {} {flag}", format_cost(inst.cost(e)));
        match edge_notes.get(e) {
            Some(note) if !note.is_empty() => {
                let _ = writeln!(out, " # e{e} {note}");
            }
            _ => out.push('\n'),
        }
    }
    out
}

pub fn write_instance(inst: &RapInstance) -> String {
    write_instance_annotated(inst, &[], &[])
}

/// Edge ids of a solution file, ascending.
pub fn parse_solution_ids(text: &str) -> Result<Vec<EdgeId>> {
    let mut lines = content_lines(text);
    let (l1, header) = lines.next().ok_or_else(|| perr(1, "empty solution file"))?;
    expect_keyword(l1, &header, "solution", 1)?;
    let count: usize = parse_num(l1, header[1], "count")?;
    let mut ids = Vec::with_capacity(count);
    for (ln, tokens) in lines {
        if tokens.len() != 1 {
            return Err(perr(ln, "expected a single edge id"));
        }
        ids.push(parse_num::<EdgeId>(ln, tokens[0], "edge id")?);
    }
    if ids.len() != count {
        return Err(perr(l1, format!("header announces {count} ids, found {}", ids.len())));
    }
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(perr(l1, "duplicate edge id"));
    }
    Ok(ids)
}

pub fn parse_solution(inst: &RapInstance, text: &str) -> Result<Solution> {
    Solution::new(inst, parse_solution_ids(text)?)
}

pub fn write_solution(x: &Solution) -> String {
    let mut out = format!("solution {}\n", x.len());
    for e in x.edges() {
        let _ = writeln!(out, "{e}");
    }
    out
}

pub fn parse_set_cover(text: &str) -> Result<SetCoverInstance> {
    let mut lines = content_lines(text);
    let (l1, header) = lines.next().ok_or_else(|| perr(1, "empty set cover file"))?;
    expect_keyword(l1, &header, "setcover", 2)?;
    let k: usize = parse_num(l1, header[1], "ground set size")?;
    let l: usize = parse_num(l1, header[2], "set count")?;
    let mut sets = Vec::with_capacity(l);
    for (ln, tokens) in lines {
        if tokens[0] != "set" {
            return Err(perr(ln, format!("expected 'set', found '{}'", tokens[0])));
        }
        let elems = tokens[1..]
            .iter()
            .map(|t| parse_num::<usize>(ln, t, "element"))
            .collect::<Result<Vec<_>>>()?;
        sets.push(elems);
    }
    if sets.len() != l {
        return Err(perr(l1, format!("header announces {l} sets, found {}", sets.len())));
    }
    SetCoverInstance::new(k, sets)
}

pub fn write_set_cover(sc: &SetCoverInstance) -> String {
    let mut out = format!("setcover {} {}\n", sc.k(), sc.sets().len());
    for s in sc.sets() {
        out.push_str("set");
        for x in s {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    out
}
