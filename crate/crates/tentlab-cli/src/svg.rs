use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 48.0;

/// A data window mapped onto the drawing area, y up.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Frame {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Frame {
        let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

/// Minimal SVG writer with fixed three-decimal coordinates.
pub struct Svg {
    body: String,
    frame: Frame,
}

impl Svg {
    pub fn new(title: &str, frame: Frame) -> Svg {
        let mut s = Svg { body: String::new(), frame };
        let _ = writeln!(s.body, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s.body,
            r#"<text x="{:.3}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            W / 2.0,
            escape(title)
        );
        s.axes();
        s
    }

    fn axes(&mut self) {
        let f = self.frame;
        let (l, r, b, t) = (MARGIN, W - MARGIN, H - MARGIN, MARGIN);
        let _ = writeln!(
            self.body,
            r#"<rect x="{l:.3}" y="{t:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="black" stroke-width="1"/>"#,
            r - l,
            b - t
        );
        for (v, x) in [(f.x0, l), (f.x1, r)] {
            let _ = writeln!(
                self.body,
                r#"<text x="{x:.3}" y="{:.3}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                b + 16.0,
                tick(v)
            );
        }
        for (v, y) in [(f.y0, b), (f.y1, t)] {
            let _ = writeln!(
                self.body,
                r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
                l - 4.0,
                y + 4.0,
                tick(v)
            );
        }
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.3},{:.3}", if i == 0 { "" } else { " " }, self.frame.px(*x), self.frame.py(*y));
        }
        let _ = writeln!(self.body, r#"<polyline points="{d}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#);
    }

    pub fn line(&mut self, p: (f64, f64), q: (f64, f64), stroke: &str, width: f64) {
        self.polyline(&[p, q], stroke, width);
    }

    pub fn dot(&mut self, p: (f64, f64), r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{r}" fill="{fill}"/>"#,
            self.frame.px(p.0),
            self.frame.py(p.1)
        );
    }

    pub fn label(&mut self, p: (f64, f64), text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11">{}</text>"#,
            self.frame.px(p.0) + 4.0,
            self.frame.py(p.1) - 4.0,
            escape(text)
        );
    }

    /// A shaded band over [x_lo, x_hi] spanning the frame.
    pub fn band(&mut self, x_lo: f64, x_hi: f64, fill: &str) {
        let (l, r) = (self.frame.px(x_lo), self.frame.px(x_hi));
        let _ = writeln!(
            self.body,
            r#"<rect x="{l:.3}" y="{MARGIN:.3}" width="{:.3}" height="{:.3}" fill="{fill}" fill-opacity="0.3"/>"#,
            r - l,
            H - 2.0 * MARGIN
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n{}</svg>\n",
            self.body
        )
    }
}

fn tick(v: f64) -> String {
    format!("{v:.4}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
