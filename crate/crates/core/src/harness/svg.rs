use std::fmt::Write as _;
use std::path::Path;

use crate::space::{FeatureKind, Point, SpaceSchema};
use crate::strategies::ParetoPair;

use super::HarnessError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;

/// FNV-1a; stable across runs and platforms.
fn label_hue(label: &str) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for b in label.bytes() {
        h ^= u32::from(b);
        h = h.wrapping_mul(0x0100_0193);
    }
    h % 360
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG scatter of the seed pool (gray) and every pair's two points, coloured
/// by label, with axes at the domain bounds.
pub fn render_front_svg(schema: &SpaceSchema, seeds: &[Point], pairs: &[ParetoPair]) -> Result<String, HarnessError> {
    let bounds: Vec<(f64, f64)> = schema
        .features()
        .iter()
        .filter_map(|f| match f.kind {
            FeatureKind::Real { lo, hi, .. } => Some((lo, hi)),
            _ => None,
        })
        .collect();
    if schema.len() != 2 || bounds.len() != 2 {
        return Err(HarnessError::NotTwoDimensional(format!(
            "schema has {} features, {} real",
            schema.len(),
            bounds.len()
        )));
    }
    let (x_lo, x_hi) = bounds[0];
    let (y_lo, y_hi) = bounds[1];
    let px = |v: f64| MARGIN + (v - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);
    let coords = |p: &Point| {
        let v = p.to_f64s().expect("real point");
        (px(v[0]), py(v[1]))
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<g id="axes" stroke="black" stroke-width="1"><line x1="{left:.2}" y1="{bottom:.2}" x2="{right:.2}" y2="{bottom:.2}"/><line x1="{left:.2}" y1="{bottom:.2}" x2="{left:.2}" y2="{top:.2}"/></g>"#
    );
    let names: Vec<_> = schema.features().iter().map(|f| escape(&f.name)).collect();
    let _ = writeln!(
        s,
        r#"<g font-family="sans-serif" font-size="11"><text x="{left:.2}" y="{:.2}">{x_lo}</text><text x="{right:.2}" y="{:.2}" text-anchor="end">{x_hi}</text><text x="{:.2}" y="{bottom:.2}" text-anchor="end">{y_lo}</text><text x="{:.2}" y="{top:.2}" text-anchor="end">{y_hi}</text><text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text><text x="12" y="{:.2}">{}</text></g>"#,
        bottom + 14.0,
        bottom + 14.0,
        left - 4.0,
        left - 4.0,
        WIDTH / 2.0,
        bottom + 28.0,
        names[0],
        HEIGHT / 2.0,
        names[1],
    );
    let _ = writeln!(s, r##"<g id="seeds" fill="#c8c8c8">"##);
    for p in seeds {
        let (x, y) = coords(p);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2"/>"#);
    }
    s.push_str("</g>\n<g id=\"pairs\">\n");
    for pair in pairs {
        for end in [&pair.a, &pair.b] {
            let (x, y) = coords(&end.point);
            let hue = label_hue(end.label.as_str());
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="hsl({hue},70%,45%)"><title>{}</title></circle>"#,
                escape(end.label.as_str())
            );
        }
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

pub fn write_front_svg(schema: &SpaceSchema, seeds: &[Point], pairs: &[ParetoPair], path: &Path) -> Result<(), HarnessError> {
    let svg = render_front_svg(schema, seeds, pairs)?;
    std::fs::write(path, svg)?;
    Ok(())
}
