//! The `parse`, `eval` and `quotient` verbs. `check`, `scan` and `verify`
//! go through [`crate::Runner`].

use std::fmt::Write as _;
use std::path::Path;

use arbor::dsl::{parse, parse_element, parse_subgroup, ElementExpr, SubgroupExpr};
use arbor::filtration::Tower;
use arbor::permgroup::index;
use arbor::wreath::Portrait;
use arbor::Element;
use serde_json::json;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Longest word tried when naming the sections of a portrait.
const NAME_WORD_LENGTH: usize = 4;

fn csv_line(columns: &[&str], values: &[String]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).expect("in-memory write");
    w.write_record(values).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn parse_command(path: &Path, format: Format) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read group file {}: {e}", path.display())))?;
    let d = parse(&text).map_err(|e| CliError::Input(format!("{}:{e}", path.display())))?;
    let hash = d.content_hash();
    Ok(match format {
        Format::Text => format!("{}# hash {hash}\n", d.pretty_print()),
        Format::Json => {
            let gens: Vec<_> = d
                .generators
                .iter()
                .map(|(n, e)| json!({"name": n, "definition": e.to_string()}))
                .collect();
            let subs: Vec<_> = d
                .subgroups
                .iter()
                .map(|(n, e)| json!({"name": n, "definition": e.to_string()}))
                .collect();
            let value = json!({
                "path": path.display().to_string(),
                "hash": hash,
                "degree": d.degree,
                "generators": gens,
                "subgroups": subs,
                "canonical": d.pretty_print(),
            });
            format!("{}\n", serde_json::to_string_pretty(&value).expect("json"))
        }
        Format::Csv => csv_line(
            &["path", "hash", "degree", "generators", "subgroups"],
            &[
                path.display().to_string(),
                hash,
                d.degree.to_string(),
                d.generators.len().to_string(),
                d.subgroups.len().to_string(),
            ],
        ),
    })
}

/// Short words in the generators and their inverses, shortest first, for
/// naming sections.
fn short_words(tower: &Tower) -> Vec<(String, Element)> {
    let r = tower.resolved();
    let mut letters = Vec::new();
    for (name, g) in &r.elements {
        letters.push((ElementExpr::id(name), 1i64, name.clone(), g.clone()));
        letters.push((ElementExpr::id(name), -1i64, name.clone(), g.inverse()));
    }
    let mut out = vec![("1".to_string(), Element::identity(r.degree()))];
    // Each word is a run-length list of (letter, exponent).
    let mut frontier: Vec<(Vec<(usize, i64)>, Element)> = vec![(Vec::new(), Element::identity(r.degree()))];
    for _ in 0..NAME_WORD_LENGTH {
        let mut next = Vec::new();
        for (word, value) in &frontier {
            for (li, (_, sign, name, g)) in letters.iter().enumerate() {
                let mut w = word.clone();
                match w.last_mut() {
                    Some((last, e)) if letters[*last].2 == *name => {
                        if (*e > 0) != (*sign > 0) {
                            continue;
                        }
                        *e += sign;
                    }
                    _ => w.push((li, *sign)),
                }
                let Ok(v) = value.compose(g) else { continue };
                next.push((w, v));
            }
        }
        for (w, v) in &next {
            let factors: Vec<ElementExpr> = w
                .iter()
                .map(|&(li, e)| {
                    let base = letters[li].0.clone();
                    if e == 1 {
                        base
                    } else {
                        base.pow(e)
                    }
                })
                .collect();
            let expr = if factors.len() == 1 {
                factors.into_iter().next().expect("one factor")
            } else {
                ElementExpr::Product(factors)
            };
            out.push((expr.to_string(), v.clone()));
        }
        frontier = next;
    }
    out
}

pub fn eval_command(
    tower: &Tower,
    expr: &str,
    level: Option<usize>,
    portrait: Option<usize>,
    format: Format,
) -> Result<String, CliError> {
    let e = parse_element(expr, &tower.resolved().definition)?;
    if let Some(n) = level {
        let p = tower.element_perm(&e, n)?;
        return Ok(match format {
            Format::Text => format!("{p}\n"),
            Format::Json => format!(
                "{}\n",
                serde_json::to_string_pretty(&json!({
                    "expression": e.to_string(),
                    "level": n,
                    "permutation": p.to_string(),
                }))
                .expect("json")
            ),
            Format::Csv => csv_line(
                &["expression", "level", "permutation"],
                &[e.to_string(), n.to_string(), p.to_string()],
            ),
        });
    }
    let depth = portrait.unwrap_or(1);
    let g = tower.resolved().eval(&e)?;
    let pic = Portrait::of(&g, depth)?;
    let words = short_words(tower);
    let namer = |s: &Element| {
        words
            .iter()
            .find(|(_, w)| w.equal(s).unwrap_or(false))
            .map(|(name, _)| name.clone())
    };
    let text = pic.render(namer);
    Ok(match format {
        Format::Text => format!("{e}: {} states\n{text}", g.state_count()),
        Format::Json => {
            let nodes: Vec<_> = text.lines().collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&json!({
                    "expression": e.to_string(),
                    "states": g.state_count(),
                    "depth": depth,
                    "portrait": nodes,
                }))
                .expect("json")
            )
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["vertex", "perm", "section"]).expect("in-memory write");
            for line in text.lines() {
                let (vertex, rest) = line.split_once(" perm=").unwrap_or((line, ""));
                let (perm, section) = rest.split_once(" section=").unwrap_or((rest, ""));
                w.write_record([vertex, perm, section]).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
        }
    })
}

pub fn quotient_command(
    tower: &Tower,
    n: usize,
    sub: Option<&str>,
    bsgs: bool,
    format: Format,
) -> Result<String, CliError> {
    let ctx = tower.level_quotient(n)?;
    let g = &ctx.quotient;
    let sub_expr: Option<SubgroupExpr> = sub
        .map(|s| parse_subgroup(s, &tower.resolved().definition))
        .transpose()?;
    let image = sub_expr.as_ref().map(|s| tower.eval_subgroup(s, n)).transpose()?;
    let shown = image.as_ref().map(|s| &s.group).unwrap_or(g);
    let idx = image.as_ref().map(|s| index(g, &s.group)).transpose()?;
    let name = sub_expr.as_ref().map(ToString::to_string).unwrap_or_else(|| "G".into());
    let orbits: Vec<String> = shown.orbit_lengths().iter().map(usize::to_string).collect();
    Ok(match format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "level {n}: {} points, |G_{n}| = {}", ctx.layout.points(), g.order());
            if let Some(i) = &idx {
                let _ = writeln!(out, "|{name}_{n}| = {}, index {i}", shown.order());
            }
            let _ = writeln!(out, "generators {}, strong generators {}", shown.generators().len(), shown.strong_generators().len());
            let _ = writeln!(out, "basic orbit lengths {}", orbits.join(" "));
            if bsgs {
                out.push_str(&shown.to_bsgs_text());
            }
            out
        }
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({
                "level": n,
                "points": ctx.layout.points(),
                "order": g.order().to_string(),
                "subgroup": name,
                "subgroup_order": shown.order().to_string(),
                "index": idx.map(|i| i.to_string()),
                "generators": shown.generators().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "orbit_lengths": shown.orbit_lengths(),
                "bsgs": bsgs.then(|| shown.to_bsgs_text()),
            }))
            .expect("json")
        ),
        Format::Csv => csv_line(
            &["level", "points", "order", "subgroup", "subgroup_order", "index"],
            &[
                n.to_string(),
                ctx.layout.points().to_string(),
                g.order().to_string(),
                name,
                shown.order().to_string(),
                idx.map(|i| i.to_string()).unwrap_or_default(),
            ],
        ),
    })
}
