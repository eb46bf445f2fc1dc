//! SVG heatmap of a consistency matrix.
//!
//! Output depends only on the matrix contents, so identical matrices give
//! byte-identical files.

use std::fmt::Write as _;

use crate::metrics::ConsistencyMatrix;

const CELL: usize = 36;
const MARGIN: usize = 40;
const HIGH: (f64, f64, f64) = (8.0, 48.0, 107.0);

/// Fill color for a value in `[0, 1]`: white at 0, dark blue at 1.
pub fn cell_color(value: f64) -> String {
    let v = value.clamp(0.0, 1.0);
    let ch = |target: f64| (255.0 * (1.0 - v) + target * v).round() as u8;
    format!("#{:02X}{:02X}{:02X}", ch(HIGH.0), ch(HIGH.1), ch(HIGH.2))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn render_svg(matrix: &ConsistencyMatrix) -> String {
    let n = matrix.size();
    let side = MARGIN + n * CELL;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{}" font-family="sans-serif" font-size="10">"#,
        side + 20
    );
    let mut title: Vec<String> = [&matrix.model_id, &matrix.metric_name]
        .into_iter()
        .filter(|p| !p.is_empty())
        .map(|p| escape(p))
        .collect();
    if let Some(scheme) = matrix.scheme {
        title.push(format!("({scheme})"));
    }
    if !title.is_empty() {
        let _ = writeln!(s, r#"<title>{}</title>"#, title.join(" "));
    }

    for (i, lang) in matrix.languages.iter().enumerate() {
        let mid = MARGIN + i * CELL + CELL / 2;
        let _ = writeln!(
            s,
            r#"<text x="{mid}" y="{}" text-anchor="middle">{lang}</text>"#,
            MARGIN - 6
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{lang}</text>"#,
            MARGIN - 6,
            mid + 4
        );
    }
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (MARGIN + j * CELL, MARGIN + i * CELL);
            let (cx, cy) = (x + CELL / 2, y + CELL / 2 + 4);
            match matrix.get(i, j) {
                Some(v) => {
                    let ink = if v > 0.5 { "#FFFFFF" } else { "#000000" };
                    let _ = writeln!(
                        s,
                        r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}"/>"#,
                        cell_color(v)
                    );
                    let _ = writeln!(
                        s,
                        r#"<text x="{cx}" y="{cy}" text-anchor="middle" fill="{ink}">{v:.2}</text>"#
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="#D9D9D9"/>"##
                    );
                    let _ = writeln!(
                        s,
                        r##"<text x="{cx}" y="{cy}" text-anchor="middle" fill="#595959">n/a</text>"##
                    );
                }
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn color_endpoints_and_midpoint() {
        assert_eq!(cell_color(0.0), "#FFFFFF");
        assert_eq!(cell_color(1.0), "#08306B");
        assert_eq!(cell_color(0.5), "#8498B5");
    }
}
