//! Triangle plot of a simplex scan with one hatch pattern per strategy.

use std::fmt::Write;

use super::{SimplexMap, Strategy};

/// Generator comment; the only line that may differ between renderer versions.
pub const SVG_VERSION_LINE: &str = concat!("<!-- barne simplex renderer ", env!("CARGO_PKG_VERSION"), " -->");

const SIZE: f64 = 440.0;
const MARGIN: f64 = 70.0;

struct Layer {
    strategy: Strategy,
    id: &'static str,
    angle: u32,
    colour: &'static str,
    label: &'static str,
}

const LAYERS: [Layer; 3] = [
    Layer { strategy: Strategy::Honest, id: "hatch-h", angle: 45, colour: "#1f5fbf", label: "σ_h BARNE" },
    Layer { strategy: Strategy::BlindEndorse, id: "hatch-e", angle: 90, colour: "#c0392b", label: "σ_e BARNE" },
    Layer { strategy: Strategy::Abstain, id: "hatch-0", angle: 135, colour: "#2e8b57", label: "σ_0 BARNE" },
];

fn px(x: f64) -> f64 {
    MARGIN + x * SIZE
}

fn py(y: f64) -> f64 {
    MARGIN + (1.0 - y) * SIZE
}

/// Renders the map on the unit square with `f/n` horizontal and `g/n`
/// vertical. Each BARNE point fills its lattice cell, clipped to the square.
pub fn render_svg(map: &SimplexMap) -> String {
    let n = map.params.n;
    let q = map.params.quorum;
    let nf = n as f64;
    let total = SIZE + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "{SVG_VERSION_LINE}");
    let _ = writeln!(s, "<defs>");
    for layer in &LAYERS {
        let _ = writeln!(
            s,
            r#"<pattern id="{}" patternUnits="userSpaceOnUse" width="6" height="6" patternTransform="rotate({})"><line x1="0" y1="0" x2="0" y2="6" stroke="{}" stroke-width="1.6"/></pattern>"#,
            layer.id, layer.angle, layer.colour
        );
    }
    let _ = writeln!(s, "</defs>");
    let _ = writeln!(s, r#"<rect width="{total}" height="{total}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="30" text-anchor="middle" font-size="14">n={n}, Q={q}, {}</text>"#,
        total / 2.0,
        map.params.amendments
    );

    for layer in &LAYERS {
        let _ = writeln!(s, r#"<g id="region-{}">"#, layer.strategy.code());
        for g in 1..=n {
            let mut f = 0;
            while f + g <= n {
                if !map.verdict(f, g).is_some_and(|v| v.is_barne(layer.strategy)) {
                    f += 1;
                    continue;
                }
                let start = f;
                while f + 1 + g <= n && map.verdict(f + 1, g).is_some_and(|v| v.is_barne(layer.strategy)) {
                    f += 1;
                }
                let x0 = ((start as f64 - 0.5) / nf).max(0.0);
                let x1 = ((f as f64 + 0.5) / nf).min(1.0);
                let y0 = ((g as f64 - 0.5) / nf).max(0.0);
                let y1 = ((g as f64 + 0.5) / nf).min(1.0);
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="url(#{})"/>"#,
                    px(x0),
                    py(y1),
                    (x1 - x0) * SIZE,
                    (y1 - y0) * SIZE,
                    layer.id
                );
                f += 1;
            }
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(
        s,
        r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        px(0.0),
        py(0.0),
        px(1.0),
        py(0.0),
        px(0.0),
        py(1.0)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        px(0.0),
        py(0.0),
        px(0.0),
        py(1.0)
    );

    let mut ticks = vec![0, n.saturating_sub(q), q, n];
    ticks.sort_unstable();
    ticks.dedup();
    for t in ticks {
        let v = t as f64 / nf;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{y2:.2}" stroke="black"/><text x="{x:.2}" y="{ty:.2}" text-anchor="middle">{t}</text>"#,
            x = px(v),
            y = py(0.0),
            y2 = py(0.0) + 6.0,
            ty = py(0.0) + 20.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{x2:.2}" y2="{y:.2}" stroke="black"/><text x="{tx:.2}" y="{ty:.2}" text-anchor="end">{t}</text>"#,
            x = px(0.0),
            x2 = px(0.0) - 6.0,
            y = py(v),
            tx = px(0.0) - 10.0,
            ty = py(v) + 4.0
        );
    }
    let _ =
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">f (Byzantine)</text>"#, px(0.5), py(0.0) + 45.0);
    let _ = writeln!(
        s,
        r#"<text x="{x:.2}" y="{y:.2}" text-anchor="middle" transform="rotate(-90 {x:.2} {y:.2})">g (rational)</text>"#,
        x = px(0.0) - 45.0,
        y = py(0.5)
    );

    for (i, layer) in LAYERS.iter().enumerate() {
        let y = py(1.0) + 24.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="18" height="14" fill="url(#{})" stroke="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            px(0.62),
            y,
            layer.id,
            layer.colour,
            px(0.62) + 26.0,
            y + 11.0,
            layer.label
        );
    }
    s.push_str("</svg>\n");
    s
}
