use std::fmt::Write;

use serde_json::Value;
use surething::rational;
use surething::report::ViolationReport;
use surething::Rational;

use crate::Format;

/// A finished report: exit code plus both renderings.
#[derive(Debug, Clone)]
pub struct Output {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("values serialise") + "\n",
        }
    }
}

/// 0 when nothing is wrong, 1 otherwise.
pub fn code(violated: bool) -> i32 {
    i32::from(violated)
}

/// `$695,000`, `$33.33`, `-$5`.
pub fn dollars(x: &Rational) -> String {
    let sign = if x < &rational::zero() { "-" } else { "" };
    let x = if sign.is_empty() { x.clone() } else { -x };
    let text = if x.is_integer() {
        rational::format(&x)
    } else {
        rational::to_decimal(&x, 2)
    };
    let (whole, frac) = text.split_once('.').map_or((text.as_str(), None), |(w, f)| (w, Some(f)));
    let mut grouped = String::new();
    for (i, ch) in whole.chars().enumerate() {
        if i > 0 && (whole.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    match frac {
        Some(f) => format!("{sign}${grouped}.{f}"),
        None => format!("{sign}${grouped}"),
    }
}

/// Fraction plus a four-place decimal when they differ.
pub fn both(x: &Rational) -> String {
    let f = rational::format(x);
    if x.is_integer() {
        f
    } else {
        format!("{f} ({})", rational::to_decimal(x, 4))
    }
}

pub fn report_text(out: &mut String, r: &ViolationReport) {
    let _ = writeln!(
        out,
        "{:<24} {}{}",
        r.axiom.as_str(),
        r.verdict.as_str(),
        if r.witnesses.is_empty() {
            String::new()
        } else {
            format!(" ({} witness{})", r.witnesses.len(), if r.witnesses.len() == 1 { "" } else { "es" })
        }
    );
    for w in &r.witnesses {
        let _ = writeln!(out, "    - {}", w.describe());
    }
    for [a, b] in &r.missing {
        let _ = writeln!(out, "    ? needs a judgment between {} and {}", a.name, b.name);
    }
    for n in &r.notes {
        let _ = writeln!(out, "    note: {n}");
    }
}

/// Left-aligned columns.
pub fn table(out: &mut String, rows: &[Vec<String>]) {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            line.push_str(cell);
            if c + 1 < row.len() {
                line.push_str(&" ".repeat(pad + 2));
            }
        }
        let _ = writeln!(out, "  {}", line.trim_end());
    }
}
