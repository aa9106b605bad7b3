use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{ModelReport, ReportBundle, TransitionReport};
use crate::embed::SweepReport;
use crate::semantics::GroupSummary;
use crate::{Error, Result};

const WIDTH: f64 = 560.0;
const HEIGHT: f64 = 220.0;
const MARGIN: f64 = 30.0;
const CHANGED: &str = "#d95f02";
const UNCHANGED: &str = "#1b9e77";

const STYLE: &str = "body{font-family:sans-serif;margin:2em;color:#222}\
table{border-collapse:collapse;margin:0.5em 0 1.5em}\
td,th{border:1px solid #ccc;padding:4px 8px;text-align:right}\
figure{margin:1em 0 2em}figcaption{font-size:0.9em;color:#555}\
.sig{font-weight:bold}";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn x_of(cos: f64) -> f64 {
    MARGIN + cos.clamp(0.0, 1.0) * (WIDTH - 2.0 * MARGIN)
}

fn group_layer(svg: &mut String, g: &GroupSummary, color: &str, max_density: f64, bin_width: f64) {
    let base = HEIGHT - MARGIN;
    let scale = (HEIGHT - 2.0 * MARGIN) / max_density;
    // 95% interval of the mean, drawn under the bars.
    let (lo, hi) = (x_of(g.ci95[0]), x_of(g.ci95[1]));
    let _ = write!(
        svg,
        r#"<rect class="ci" x="{lo:.2}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.15"/>"#,
        (hi - lo).max(1.0),
        HEIGHT - 2.0 * MARGIN
    );
    for (i, &d) in g.density.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        let x0 = x_of(i as f64 * bin_width);
        let x1 = x_of((i + 1) as f64 * bin_width);
        let h = d * scale;
        let _ = write!(
            svg,
            r#"<rect x="{x0:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="{color}" fill-opacity="0.45" stroke="{color}"/>"#,
            base - h,
            x1 - x0
        );
    }
    let xm = x_of(g.mean);
    let _ = write!(
        svg,
        r#"<line class="mean" x1="{xm:.2}" y1="{MARGIN}" x2="{xm:.2}" y2="{base}" stroke="{color}" stroke-width="2" stroke-dasharray="6 4"/>"#
    );
}

fn histogram_svg(t: &TransitionReport) -> String {
    let d = &t.distribution;
    let max_density = d
        .changed
        .density
        .iter()
        .chain(&d.unchanged.density)
        .fold(0.0f64, |a, &b| a.max(b))
        .max(1e-9);
    let mut svg = format!(
        r#"<svg width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" role="img">"#
    );
    let base = HEIGHT - MARGIN;
    let _ = write!(
        svg,
        r##"<line x1="{MARGIN}" y1="{base}" x2="{}" y2="{base}" stroke="#444"/>"##,
        WIDTH - MARGIN
    );
    for tick in 0..=5 {
        let v = tick as f64 / 5.0;
        let _ = write!(
            svg,
            r#"<text x="{:.2}" y="{}" font-size="10" text-anchor="middle">{v:.1}</text>"#,
            x_of(v),
            base + 14.0
        );
    }
    group_layer(&mut svg, &d.unchanged, UNCHANGED, max_density, d.bin_width);
    group_layer(&mut svg, &d.changed, CHANGED, max_density, d.bin_width);
    let _ = write!(
        svg,
        r#"<text x="{}" y="16" font-size="11" text-anchor="end"><tspan fill="{CHANGED}">changed (n={})</tspan> <tspan fill="{UNCHANGED}">unchanged (n={})</tspan></text>"#,
        WIDTH - MARGIN,
        d.changed.n,
        d.unchanged.n
    );
    svg.push_str("</svg>");
    svg
}

fn fmt_stat(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.3}")
    } else {
        format!("{v}")
    }
}

fn fmt_p(p: f64) -> String {
    if p < 1e-3 {
        format!("{p:.1e}")
    } else {
        format!("{p:.3}")
    }
}

fn model_section(html: &mut String, m: &ModelReport) {
    let _ = write!(html, "<section><h2>{}</h2>", escape(&m.name));
    html.push_str(
        "<table><tr><th>transition</th><th>&delta;&mu;</th><th>t</th><th>p (t)</th>\
         <th>&rho;</th><th>p (&rho;)</th><th>n changed</th><th>n unchanged</th></tr>",
    );
    for t in &m.transitions {
        let r = &t.metrics;
        let dm_class = if r.delta_mu_significant() { " class=\"sig\"" } else { "" };
        let rho_class = if r.rho_significant() { " class=\"sig\"" } else { "" };
        let _ = write!(
            html,
            "<tr><td>{}</td><td{dm_class}>{:.3}</td><td>{}</td><td>{}</td><td{rho_class}>{:.3}</td><td>{}</td><td>{}</td><td>{}</td></tr>",
            escape(&r.transition),
            r.delta_mu,
            fmt_stat(r.t_statistic),
            fmt_p(r.t_p_value),
            r.rho,
            fmt_p(r.rho_p_value),
            r.n_changed,
            r.n_unchanged
        );
    }
    html.push_str("</table>");
    for t in &m.transitions {
        let d = &t.distribution;
        let _ = write!(
            html,
            "<figure>{}<figcaption>{} &mdash; {}: cosine similarity of changed and unchanged words. \
             Dashed lines mark group means ({:.3} / {:.3}); shaded bands are 95% intervals of the mean.</figcaption></figure>",
            histogram_svg(t),
            escape(&m.name),
            escape(&d.transition),
            d.changed.mean,
            d.unchanged.mean
        );
    }
    if let Some(c) = &m.comparison {
        let _ = write!(
            html,
            "<h3>{} vs {}</h3><table><tr><th>expectation</th><th>{}</th><th>{}</th><th>holds</th></tr>",
            escape(&c.first),
            escape(&c.second),
            escape(&c.first),
            escape(&c.second)
        );
        for e in &c.expectations {
            let _ = write!(
                html,
                "<tr><td>{}</td><td>{:.4}</td><td>{:.4}</td><td>{}</td></tr>",
                escape(&e.description),
                e.first,
                e.second,
                if e.holds { "yes" } else { "no" }
            );
        }
        html.push_str("</table>");
    }
    let missing: usize = m.coverage.iter().map(|c| c.missing.len()).sum();
    if missing > 0 {
        let _ = write!(html, "<p>{missing} target occurrences could not be compared:</p><ul>");
        for c in &m.coverage {
            for w in &c.missing {
                let _ = write!(html, "<li>{} ({}, missing {:?})</li>", escape(&w.word), escape(&c.transition), w.missing);
            }
        }
        html.push_str("</ul>");
    }
    html.push_str("</section>");
}

/// Maps `v` within `[lo, hi]` onto a white-to-blue ramp.
fn heat_color(v: f64, lo: f64, hi: f64) -> String {
    let t = if hi > lo { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
    let c = |from: f64, to: f64| (from + (to - from) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(247.0, 8.0), c(251.0, 81.0), c(255.0, 156.0))
}

fn heatmap(html: &mut String, s: &SweepReport, title: &str, value: impl Fn(&crate::embed::SweepCell) -> f64) {
    let values: Vec<f64> = s.cells.iter().map(&value).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let _ = write!(html, "<h3>{title}</h3><table><tr><th>dim \\ epochs</th>");
    for e in &s.epochs {
        let _ = write!(html, "<th>{e}</th>");
    }
    html.push_str("</tr>");
    for &d in &s.dims {
        let _ = write!(html, "<tr><th>{d}</th>");
        for &e in &s.epochs {
            match s.cell(d, e) {
                Some(c) => {
                    let v = value(c);
                    let _ = write!(
                        html,
                        r#"<td class="cell" style="background:{}">{v:.3}</td>"#,
                        heat_color(v, lo, hi)
                    );
                }
                None => html.push_str(r#"<td class="cell">&ndash;</td>"#),
            }
        }
        html.push_str("</tr>");
    }
    html.push_str("</table>");
}

/// Renders a bundle as one HTML document with inline SVG and no external
/// assets.
pub fn render_html(bundle: &ReportBundle) -> Result<String> {
    bundle.validate()?;
    let mut html = format!(
        "<!DOCTYPE html><html lang=\"en\"><head><meta charset=\"utf-8\"><title>Semantic change report</title><style>{STYLE}</style></head><body><h1>Semantic change report</h1>"
    );
    for m in &bundle.models {
        model_section(&mut html, m);
    }
    for s in &bundle.sweeps {
        let _ = write!(html, "<section><h2>Parameter sweep: {}</h2>", s.strategy);
        heatmap(&mut html, s, "&delta;&mu;", |c| c.delta_mu);
        heatmap(&mut html, s, "&rho;", |c| c.rho);
        html.push_str("</section>");
    }
    html.push_str("</body></html>\n");
    Ok(html)
}

pub fn write_html(bundle: &ReportBundle, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let html = render_html(bundle)?;
    fs::write(path, html).map_err(|e| Error::io(path, e))
}
