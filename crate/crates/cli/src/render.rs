//! SVG drawing of a signal representation: one row per state, one colored
//! rectangle per interval, dashed lines at cell boundaries.

use std::fmt::Write;

use covert_core::{Scalar, SignalRepresentation};

const PALETTE: [&str; 8] = ["#f2c14e", "#9ecae1", "#f4a6a6", "#a1d99b", "#c6b3e6", "#fdd0a2", "#bdbdbd", "#80cdc1"];

const LEFT: f64 = 56.0;
const WIDTH: f64 = 540.0;
const TOP: f64 = 34.0;
const ROW: f64 = 26.0;
const GAP: f64 = 16.0;

pub fn color(message: usize) -> &'static str {
    PALETTE[message % PALETTE.len()]
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(psi: &SignalRepresentation, states: &[String]) -> String {
    let n = psi.num_states();
    let height = TOP + n as f64 * (ROW + GAP) + 8.0;
    let x_at = |t: f64| LEFT + t * WIDTH;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{height:.0}" viewBox="0 0 {:.0} {height:.0}" font-family="sans-serif" font-size="12">"#,
        LEFT + WIDTH + 20.0,
        LEFT + WIDTH + 20.0
    );
    let cells = psi.cells().cells;
    for (j, c) in cells.iter().enumerate() {
        let (a, b) = &c.pieces[0];
        let mid = (a.to_f64() + b.to_f64()) / 2.0;
        let _ = writeln!(s, r#"  <text class="cell" x="{:.2}" y="{:.2}" text-anchor="middle">y{}</text>"#, x_at(mid), TOP - 12.0, j + 1);
    }
    for (k, row) in psi.rows().iter().enumerate() {
        let y = TOP + k as f64 * (ROW + GAP);
        let label = states.get(k).cloned().unwrap_or_else(|| format!("w{}", k + 1));
        let _ = writeln!(s, r#"  <text class="state" x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, y + ROW * 0.65, esc(&label));
        for iv in row {
            let (a, b) = (iv.start.to_f64(), iv.end.to_f64());
            let name = esc(&psi.messages()[iv.message]);
            let _ = writeln!(
                s,
                r##"  <rect class="interval" x="{:.2}" y="{y:.2}" width="{:.2}" height="{ROW:.2}" fill="{}" stroke="#333" stroke-width="0.5"><title>{name}</title></rect>"##,
                x_at(a),
                (b - a) * WIDTH,
                color(iv.message)
            );
            let _ = writeln!(s, r#"  <text class="message" x="{:.2}" y="{:.2}" text-anchor="middle">{name}</text>"#, x_at((a + b) / 2.0), y + ROW * 0.65);
        }
    }
    let bottom = TOP + n as f64 * (ROW + GAP) - GAP;
    for t in psi.breakpoints() {
        let t = t.to_f64();
        if t <= 0.0 || t >= 1.0 {
            continue;
        }
        let _ = writeln!(
            s,
            r##"  <line class="boundary" x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="#555" stroke-dasharray="4 3"/>"##,
            x_at(t),
            TOP - 6.0,
            bottom + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
