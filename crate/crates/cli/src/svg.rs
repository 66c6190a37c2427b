//! 2×2 attribution heatmaps as standalone SVG.

use std::fmt::Write;

const CELL: f64 = 60.0;
const GAP: f64 = 24.0;
const TITLE: f64 = 18.0;
const MARGIN: f64 = 12.0;

pub struct Panel<'a> {
    pub title: String,
    pub values: &'a [f64],
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// White at zero, red for positive and blue for negative, saturating at
/// `scale`.
fn color(v: f64, scale: f64) -> String {
    let t = if scale > 0.0 { (v / scale).clamp(-1.0, 1.0) } else { 0.0 };
    let (target, t) = if t >= 0.0 { ((215, 48, 39), t) } else { ((69, 117, 180), -t) };
    let mix = |c: i32| (255.0 + (c as f64 - 255.0) * t).round() as i32;
    format!("#{:02x}{:02x}{:02x}", mix(target.0), mix(target.1), mix(target.2))
}

fn format_value(v: f64) -> String {
    let s = format!("{v:.3}");
    // avoid "-0.000"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Panels laid out in rows of `columns`, sharing one colour scale.
pub fn grid(panels: &[Panel<'_>], columns: usize, caption: &str, meta: &str) -> String {
    let columns = columns.max(1);
    let rows = panels.len().div_ceil(columns).max(1);
    let panel_w = 2.0 * CELL;
    let panel_h = TITLE + 2.0 * CELL;
    let caption_w = 2.0 * MARGIN + 7.0 * caption.chars().count() as f64;
    let width = (2.0 * MARGIN + columns as f64 * panel_w + (columns - 1) as f64 * GAP).max(caption_w);
    let height = 2.0 * MARGIN + rows as f64 * panel_h + (rows - 1) as f64 * GAP + 2.0 * TITLE;
    let scale = panels
        .iter()
        .flat_map(|p| p.values.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    )
    .unwrap();
    writeln!(s, "<desc>{}</desc>", escape(meta)).unwrap();
    writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    for (k, panel) in panels.iter().enumerate() {
        let ox = MARGIN + (k % columns) as f64 * (panel_w + GAP);
        let oy = MARGIN + (k / columns) as f64 * (panel_h + GAP);
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            ox + CELL,
            oy + 13.0,
            escape(&panel.title)
        )
        .unwrap();
        for (i, &v) in panel.values.iter().enumerate().take(4) {
            let x = ox + (i % 2) as f64 * CELL;
            let y = oy + TITLE + (i / 2) as f64 * CELL;
            writeln!(
                s,
                r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="#444" stroke-width="1"/>"##,
                color(v, scale)
            )
            .unwrap();
            writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#,
                x + CELL / 2.0,
                y + CELL / 2.0 + 4.0,
                format_value(v)
            )
            .unwrap();
        }
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12">{}</text>"#,
        MARGIN,
        height - MARGIN,
        escape(caption)
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

pub fn single(values: &[f64], caption: &str, meta: &str) -> String {
    grid(&[Panel { title: String::new(), values }], 1, caption, meta)
}
