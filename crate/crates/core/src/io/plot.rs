//! SVG spectrum plots.
//!
//! The magnitude curve is drawn over `[0, 0.5]` normalized to its peak. The
//! dominant frequency is marked by a red circle on the curve and the spectral
//! centroid by a green triangle on the frequency axis. Both markers carry a
//! `data-frequency` attribute with the exact value.

use std::fmt::Write;

use crate::spectral::{SpectralSummary, Spectrum, NYQUIST};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 40.0;

fn x_of(frequency: f64) -> f64 {
    LEFT + frequency / NYQUIST * (WIDTH - LEFT - RIGHT)
}

fn y_of(normalized: f64) -> f64 {
    HEIGHT - BOTTOM - normalized * (HEIGHT - TOP - BOTTOM)
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
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

/// Renders `spectrum` with markers taken from `summary`.
pub fn emit_plot(spectrum: &Spectrum, summary: &SpectralSummary, title: &str) -> String {
    let mags = spectrum.magnitudes();
    let peak = mags.iter().copied().fold(0.0, f64::max);
    let norm = |m: f64| if peak > 0.0 { m / peak } else { 0.0 };

    let mut svg = String::new();
    // Writing to a String cannot fail.
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let (x0, x1, y0, y1) = (x_of(0.0), x_of(NYQUIST), y_of(0.0), y_of(1.0));
    let _ = writeln!(
        svg,
        r#"<path class="axes" d="M{x0:.2} {y1:.2} L{x0:.2} {y0:.2} L{x1:.2} {y0:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let f = i as f64 * 0.1;
        let x = x_of(f);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{f:.1}</text>"#,
            y0 + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">frequency (cycles/sample)</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 6.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle" transform="rotate(-90 14 {:.2})">|X(f)| / max</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    let mut points = String::new();
    for (i, (f, m)) in spectrum.bins().enumerate() {
        if i > 0 {
            points.push(' ');
        }
        let _ = write!(points, "{:.2},{:.2}", x_of(f), y_of(norm(m)));
    }
    let _ = writeln!(
        svg,
        r#"<polyline class="magnitude" points="{points}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#
    );

    let dom = summary.dominant_frequency;
    let dom_bin = (dom * spectrum.source_length() as f64).round() as usize;
    let dom_mag = mags.get(dom_bin).copied().map_or(0.0, norm);
    let _ = writeln!(
        svg,
        r#"<circle class="dominant" data-frequency="{dom}" cx="{:.2}" cy="{:.2}" r="5" fill="red"/>"#,
        x_of(dom),
        y_of(dom_mag)
    );

    let sc = summary.centroid;
    let (cx, base) = (x_of(sc), y_of(0.0));
    let _ = writeln!(
        svg,
        r#"<polygon class="centroid" data-frequency="{sc}" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="green"/>"#,
        cx,
        base - 10.0,
        cx - 6.0,
        base,
        cx + 6.0,
        base
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{summarize, BandSplit};

    fn marker_frequency(svg: &str, class: &str) -> f64 {
        let key = format!("class=\"{class}\" data-frequency=\"");
        let start = svg.find(&key).unwrap() + key.len();
        let end = start + svg[start..].find('"').unwrap();
        svg[start..end].parse().unwrap()
    }

    #[test]
    fn dc_only_markers_at_zero() {
        let mut mags = vec![0.0; 5];
        mags[0] = 3.0;
        let s = Spectrum::from_magnitudes(mags, 8).unwrap();
        let svg = emit_plot(&s, &summarize(&s, &BandSplit::default()).unwrap(), "dc");
        assert_eq!(marker_frequency(&svg, "dominant"), 0.0);
        assert_eq!(marker_frequency(&svg, "centroid"), 0.0);
        assert!(svg.contains("fill=\"red\"") && svg.contains("fill=\"green\""));
    }

    #[test]
    fn single_bin_markers_coincide() {
        let mut mags = vec![0.0; 5];
        mags[2] = 1.0;
        let s = Spectrum::from_magnitudes(mags, 8).unwrap();
        let svg = emit_plot(&s, &summarize(&s, &BandSplit::default()).unwrap(), "bin");
        assert_eq!(marker_frequency(&svg, "dominant"), 0.25);
        assert_eq!(marker_frequency(&svg, "centroid"), 0.25);
    }

    #[test]
    fn title_is_escaped() {
        let s = Spectrum::from_magnitudes(vec![1.0, 1.0], 2).unwrap();
        let svg = emit_plot(&s, &summarize(&s, &BandSplit::default()).unwrap(), "a<b & c");
        assert!(svg.contains("a&lt;b &amp; c"));
    }
}
