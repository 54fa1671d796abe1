use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::compare::{GapRow, GapTable, OutperformRow, OutperformTable};
use super::normalize::GroupMean;
use super::report::ReportBundle;
use super::Indicator;
use crate::config::ReportFormat;
use crate::error::{Error, Result};
use crate::numfmt::{round_sig10, sig10};
use crate::scalar::Real;

/// Stems of the seven report files.
pub const REPORT_FILES: [&str; 7] = [
    "summary_overall",
    "summary_discipline",
    "outperform_counts",
    "gap_O",
    "gap_FO",
    "gap_AC",
    "gap_AIF",
];

const TEXT_FILE: &str = "report.txt";

fn num<T: Real>(v: Option<T>) -> String {
    v.map(|x| sig10(x.as_f64())).unwrap_or_default()
}

fn jnum<T: Real>(v: Option<T>) -> Value {
    v.and_then(|x| serde_json::Number::from_f64(round_sig10(x.as_f64())))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn indicator_header() -> String {
    Indicator::ALL.map(|i| i.label()).join(",")
}

fn group_csv_rows<T: Real>(out: &mut String, label: &str, rows: &[GroupMean<T>]) {
    for r in rows {
        let _ = write!(out, "{},{},{}", csv_field(label), r.country, r.n_professors);
        for m in r.means {
            let _ = write!(out, ",{}", num(m));
        }
        out.push('\n');
    }
}

fn summary_overall_csv<T: Real>(b: &ReportBundle<T>) -> String {
    let mut out = format!("population,country,n_professors,{}\n", indicator_header());
    group_csv_rows(&mut out, "all", &b.overall);
    group_csv_rows(&mut out, "top_decile", &b.top_decile);
    out
}

fn summary_discipline_csv<T: Real>(b: &ReportBundle<T>) -> String {
    let mut out = format!("discipline,country,n_professors,{}\n", indicator_header());
    for r in &b.discipline_table {
        group_csv_rows(&mut out, &r.group, std::slice::from_ref(r));
    }
    out
}

/// One row per discipline plus `Overall`, with the count for each indicator.
fn outperform_rows(tables: &[OutperformTable]) -> Vec<(String, usize, Vec<&OutperformRow>)> {
    let Some(first) = tables.first() else { return Vec::new() };
    let mut rows: Vec<(String, usize, Vec<&OutperformRow>)> = first
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.discipline.clone(), r.n_scs, tables.iter().map(|t| &t.rows[i]).collect()))
        .collect();
    rows.push((
        first.overall.discipline.clone(),
        first.overall.n_scs,
        tables.iter().map(|t| &t.overall).collect(),
    ));
    rows
}

fn outperform_csv<T>(b: &ReportBundle<T>) -> String {
    let mut out = String::from("discipline,n_scs");
    for t in &b.outperform {
        let _ = write!(out, ",{0},{0}_share", t.indicator);
    }
    out.push('\n');
    for (discipline, n_scs, cells) in outperform_rows(&b.outperform) {
        let _ = write!(out, "{},{}", csv_field(&discipline), n_scs);
        for c in cells {
            let _ = write!(out, ",{},{}", c.count, sig10(c.share()));
        }
        out.push('\n');
    }
    out
}

fn gap_sides<'a, T>(b: &'a ReportBundle<T>, g: &'a GapTable<T>) -> [(&'a str, &'a [GapRow<T>]); 2] {
    [(b.pair.b.as_str(), &g.favor_b), (b.pair.a.as_str(), &g.favor_a)]
}

fn gap_csv<T: Real>(b: &ReportBundle<T>, g: &GapTable<T>) -> String {
    let mut out =
        String::from("favor,rank,sc,discipline,country_a,n_a,mean_a,country_b,n_b,mean_b,delta\n");
    for (favor, rows) in gap_sides(b, g) {
        for (rank, r) in rows.iter().enumerate() {
            let _ = writeln!(
                out,
                "{favor},{},{},{},{},{},{},{},{},{},{}",
                rank + 1,
                csv_field(r.sc.as_str()),
                csv_field(r.discipline.as_str()),
                b.pair.a,
                r.n_a,
                num(Some(r.mean_a)),
                b.pair.b,
                r.n_b,
                num(Some(r.mean_b)),
                num(Some(r.delta)),
            );
        }
    }
    out
}

/// The seven CSV reports as `(file name, contents)`, in [`REPORT_FILES`] order.
pub fn render_csv<T: Real>(b: &ReportBundle<T>) -> Vec<(String, String)> {
    let mut files = vec![
        ("summary_overall.csv".to_string(), summary_overall_csv(b)),
        ("summary_discipline.csv".to_string(), summary_discipline_csv(b)),
        ("outperform_counts.csv".to_string(), outperform_csv(b)),
    ];
    for g in &b.gaps {
        files.push((format!("gap_{}.csv", g.indicator), gap_csv(b, g)));
    }
    files
}

fn group_json<T: Real>(rows: &[GroupMean<T>], key: &str) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                obj.insert(key.into(), json!(r.group));
                obj.insert("country".into(), json!(r.country.as_str()));
                obj.insert("n_professors".into(), json!(r.n_professors));
                for ind in Indicator::ALL {
                    obj.insert(ind.label().into(), jnum(r.means[ind.index()]));
                }
                Value::Object(obj)
            })
            .collect(),
    )
}

fn gap_json<T: Real>(b: &ReportBundle<T>, g: &GapTable<T>) -> Value {
    let side = |rows: &[GapRow<T>]| -> Value {
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                json!({
                    "rank": i + 1,
                    "sc": r.sc.as_str(),
                    "discipline": r.discipline.as_str(),
                    "n_a": r.n_a,
                    "mean_a": jnum(Some(r.mean_a)),
                    "n_b": r.n_b,
                    "mean_b": jnum(Some(r.mean_b)),
                    "delta": jnum(Some(r.delta)),
                })
            })
            .collect()
    };
    json!({
        "indicator": g.indicator.label(),
        "country_a": b.pair.a.as_str(),
        "country_b": b.pair.b.as_str(),
        "favor_b": side(&g.favor_b),
        "favor_a": side(&g.favor_a),
    })
}

/// JSON equivalents of [`render_csv`], with numbers rounded to the same
/// ten significant digits and `null` for undefined values.
pub fn render_json<T: Real>(b: &ReportBundle<T>) -> Result<Vec<(String, String)>> {
    let overall = json!({
        "all": group_json(&b.overall, "population"),
        "top_decile": group_json(&b.top_decile, "population"),
    });
    let outperform: Vec<Value> = outperform_rows(&b.outperform)
        .into_iter()
        .map(|(discipline, n_scs, cells)| {
            let mut obj = serde_json::Map::new();
            obj.insert("discipline".into(), json!(discipline));
            obj.insert("n_scs".into(), json!(n_scs));
            for (t, c) in b.outperform.iter().zip(cells) {
                obj.insert(t.indicator.label().into(), json!(c.count));
                obj.insert(
                    format!("{}_share", t.indicator),
                    jnum(Some(c.share())),
                );
            }
            Value::Object(obj)
        })
        .collect();
    let mut docs = vec![
        ("summary_overall.json".to_string(), overall),
        ("summary_discipline.json".to_string(), group_json(&b.discipline_table, "discipline")),
        ("outperform_counts.json".to_string(), Value::Array(outperform)),
    ];
    for g in &b.gaps {
        docs.push((format!("gap_{}.json", g.indicator), gap_json(b, g)));
    }
    docs.into_iter()
        .map(|(name, v)| Ok((name, serde_json::to_string_pretty(&v)? + "\n")))
        .collect()
}

fn fixed<T: Real>(v: Option<T>) -> String {
    v.map(|x| format!("{:.2}", x.as_f64())).unwrap_or_else(|| "n/a".into())
}

fn table(out: &mut String, title: &str, header: &[String], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(s, "{cell:<w$}");
            } else {
                let _ = write!(s, "  {cell:>w$}");
            }
        }
        s.trim_end().to_string()
    };
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{}", line(header));
    let total: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
    let _ = writeln!(out, "{}", "-".repeat(total));
    for row in rows {
        let _ = writeln!(out, "{}", line(row));
    }
    out.push('\n');
}

/// Human-readable tables: country summaries, the per-discipline table,
/// outperform counts and the gap tables.
pub fn render_text<T: Real>(b: &ReportBundle<T>) -> String {
    let mut out = String::new();
    let countries = [&b.pair.a, &b.pair.b];

    let mut header: Vec<String> = vec!["Population".into()];
    for c in countries {
        header.push(format!("n {c}"));
    }
    for ind in Indicator::ALL {
        for c in countries {
            header.push(format!("{ind} {c}"));
        }
    }
    let wide = |label: &str, rows: &[GroupMean<T>]| -> Vec<String> {
        let find = |c: &&crate::ingest::Country| rows.iter().find(|r| &r.country == *c);
        let mut cells = vec![label.to_string()];
        for c in countries {
            cells.push(find(&c).map(|r| r.n_professors.to_string()).unwrap_or_else(|| "0".into()));
        }
        for ind in Indicator::ALL {
            for c in countries {
                cells.push(fixed(find(&c).and_then(|r| r.means[ind.index()])));
            }
        }
        cells
    };
    let summary: Vec<Vec<String>> = [("All", &b.overall), ("Top decile", &b.top_decile)]
        .into_iter()
        .filter(|(_, rows)| !rows.is_empty())
        .map(|(label, rows)| wide(label, rows))
        .collect();
    table(&mut out, "Country averages of normalized scores", &header, &summary);

    header[0] = "Discipline".into();
    let mut groups: Vec<&str> = Vec::new();
    for r in &b.discipline_table {
        if !groups.contains(&r.group.as_str()) {
            groups.push(&r.group);
        }
    }
    let discipline_rows: Vec<Vec<String>> = groups
        .iter()
        .map(|g| {
            let rows: Vec<GroupMean<T>> = b.discipline_table.iter().filter(|r| r.group == *g).cloned().collect();
            wide(g, &rows)
        })
        .collect();
    table(&mut out, "Normalized averages by discipline", &header, &discipline_rows);

    let mut header: Vec<String> = vec!["Discipline".into(), "SCs".into()];
    header.extend(b.outperform.iter().map(|t| t.indicator.label().to_string()));
    let rows: Vec<Vec<String>> = outperform_rows(&b.outperform)
        .into_iter()
        .map(|(d, n, cells)| {
            let mut row = vec![d, n.to_string()];
            row.extend(cells.iter().map(|c| format!("{} ({:.0}%)", c.count, 100.0 * c.share())));
            row
        })
        .collect();
    table(
        &mut out,
        &format!("SCs per discipline where {} scores higher than {}", b.pair.b, b.pair.a),
        &header,
        &rows,
    );

    for g in &b.gaps {
        for (favor, rows) in gap_sides(b, g) {
            let header: Vec<String> = vec![
                "SC".into(),
                "Discipline".into(),
                format!("n {}", b.pair.a),
                format!("{} {}", g.indicator, b.pair.a),
                format!("n {}", b.pair.b),
                format!("{} {}", g.indicator, b.pair.b),
                "Gap".into(),
            ];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.sc.to_string(),
                        r.discipline.to_string(),
                        r.n_a.to_string(),
                        fixed(Some(r.mean_a)),
                        r.n_b.to_string(),
                        fixed(Some(r.mean_b)),
                        fixed(Some(r.delta)),
                    ]
                })
                .collect();
            table(
                &mut out,
                &format!("Top {} SCs by {} gap in favor of {favor}", b.top_k, g.indicator),
                &header,
                &body,
            );
        }
    }
    out
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes the reports into `dir` and returns the paths written. `text` adds
/// `report.txt` next to the CSV or JSON files.
pub fn write_reports<T: Real>(
    b: &ReportBundle<T>,
    dir: &Path,
    format: ReportFormat,
    text: bool,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = match format {
        ReportFormat::Csv => render_csv(b),
        ReportFormat::Json => render_json(b)?,
        ReportFormat::Text => Vec::new(),
    };
    let mut written = Vec::new();
    for (name, contents) in &files {
        written.push(write_file(dir, name, contents)?);
    }
    if text || format == ReportFormat::Text {
        written.push(write_file(dir, TEXT_FILE, &render_text(b))?);
    }
    Ok(written)
}
