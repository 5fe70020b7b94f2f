//! Static SVG charts written as plain strings.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::DataError;
use crate::edi::PropertyReport;
use crate::evaluation::{ConfusionMatrix, EvaluationReport};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

pub enum SvgReport<'a> {
    /// MI bars with the top-`top_n` selections of each signal overlaid.
    CombinedAnalysis { report: &'a PropertyReport, top_n: usize },
    EvaluationCurve(&'a EvaluationReport),
    ConfusionHeatmap(&'a ConfusionMatrix),
}

pub fn render_svg(report: SvgReport<'_>, path: &Path) -> Result<(), DataError> {
    let svg = match report {
        SvgReport::CombinedAnalysis { report, top_n } => render_combined_analysis(report, top_n),
        SvgReport::EvaluationCurve(r) => render_evaluation_curve(r),
        SvgReport::ConfusionHeatmap(m) => render_confusion_heatmap(m),
    };
    std::fs::write(path, svg).map_err(|e| DataError::io(path, e))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0) = (MARGIN_LEFT, HEIGHT - MARGIN_BOTTOM);
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#,
        WIDTH - MARGIN_RIGHT
    );
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{MARGIN_TOP}" x2="{x0}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

fn top_by<F: Fn(&crate::edi::DimensionAnalysis) -> f64>(report: &PropertyReport, n: usize, key: F) -> BTreeSet<usize> {
    let mut dims: Vec<_> = report.dims.iter().collect();
    dims.sort_by(|a, b| key(b).total_cmp(&key(a)).then(a.dimension.cmp(&b.dimension)));
    dims.into_iter().take(n).map(|d| d.dimension).collect()
}

pub fn render_combined_analysis(report: &PropertyReport, top_n: usize) -> String {
    let d = report.dims.len().max(1);
    let top_wilcoxon = top_by(report, top_n, |a| -a.p_value.max(report.config.p_floor).ln());
    let top_mi = top_by(report, top_n, |a| a.mi);
    let rfe: BTreeSet<usize> = report.dims.iter().filter(|a| a.rfe_selected).map(|a| a.dimension).collect();

    let max_mi = report.dims.iter().map(|a| a.mi).fold(0.0, f64::max).max(1e-12);
    let mi_cut = report.dims.iter().filter(|a| top_mi.contains(&a.dimension)).map(|a| a.mi).fold(f64::INFINITY, f64::min);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM - 20.0;
    let base = HEIGHT - MARGIN_BOTTOM;
    let bar_w = plot_w / d as f64;
    let y_of = |mi: f64| base - mi / max_mi * plot_h;

    let mut by_dim: Vec<_> = report.dims.iter().collect();
    by_dim.sort_by_key(|a| a.dimension);

    let mut out = String::new();
    open(&mut out, &format!("{} ({}): combined dimension analysis", report.property, report.model_tag));
    axes(&mut out, "dimension", "mutual information (nats)");
    out.push_str("<g class=\"mi-bars\">\n");
    for a in &by_dim {
        let x = MARGIN_LEFT + a.dimension as f64 * bar_w;
        let y = y_of(a.mi);
        let fill = if top_wilcoxon.contains(&a.dimension) { "#d62728" } else { "#9ecae1" };
        let class = if top_wilcoxon.contains(&a.dimension) { "bar wilcoxon-top" } else { "bar" };
        let _ = writeln!(
            out,
            r#"<rect class="{class}" x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="{fill}"><title>dim {} mi={:.4} p={:.3e}</title></rect>"#,
            bar_w.max(0.5),
            base - y,
            a.dimension,
            a.mi,
            a.p_value
        );
    }
    out.push_str("</g>\n");

    if mi_cut.is_finite() {
        let y = y_of(mi_cut);
        let _ = writeln!(
            out,
            r#"<line class="mi-threshold" x1="{MARGIN_LEFT}" y1="{y:.3}" x2="{}" y2="{y:.3}" stroke="black" stroke-dasharray="4 3"/>"#,
            WIDTH - MARGIN_RIGHT
        );
    }

    out.push_str("<g class=\"rfe\">\n");
    for a in by_dim.iter().filter(|a| rfe.contains(&a.dimension)) {
        let cx = MARGIN_LEFT + (a.dimension as f64 + 0.5) * bar_w;
        let y = y_of(a.mi) - 6.0;
        let _ = writeln!(
            out,
            r##"<path class="rfe-marker" d="M {:.3} {:.3} L {:.3} {:.3} L {:.3} {:.3} Z" fill="#2ca02c"/>"##,
            cx - 3.0,
            y - 5.0,
            cx + 3.0,
            y - 5.0,
            cx,
            y
        );
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"agreement\">\n");
    for a in by_dim
        .iter()
        .filter(|a| rfe.contains(&a.dimension) && top_mi.contains(&a.dimension) && top_wilcoxon.contains(&a.dimension))
    {
        let cx = MARGIN_LEFT + (a.dimension as f64 + 0.5) * bar_w;
        let _ = writeln!(
            out,
            r#"<circle class="agreement-marker" cx="{cx:.3}" cy="{:.3}" r="9" fill="none" stroke="black" stroke-width="1.5"/>"#,
            y_of(a.mi) - 8.0
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">red: top {top_n} signed-rank; triangle: RFE-selected; circle: all three agree</text>"#,
        WIDTH - MARGIN_RIGHT,
        MARGIN_TOP - 4.0
    );
    out.push_str("</svg>\n");
    out
}

pub fn render_evaluation_curve(report: &EvaluationReport) -> String {
    let k_last = report.high_edi_curve.last().map_or(1, |p| p.k).max(1);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT - 20.0;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let base = HEIGHT - MARGIN_BOTTOM;
    let x_of = |k: usize| {
        if k_last == 1 {
            MARGIN_LEFT + 10.0 + plot_w / 2.0
        } else {
            MARGIN_LEFT + 10.0 + (k - 1) as f64 / (k_last - 1) as f64 * plot_w
        }
    };
    let y_of = |acc: f64| base - acc.clamp(0.0, 1.0) * plot_h;

    let mut out = String::new();
    open(&mut out, &format!("{} ({}): accuracy vs. top-k EDI dimensions", report.property, report.model_tag));
    axes(&mut out, "number of top-EDI dimensions (k)", "test accuracy");

    let step = (k_last / 10).max(1);
    out.push_str("<g class=\"x-ticks\">\n");
    let mut ticks: Vec<usize> = (1..=k_last).step_by(step).collect();
    if ticks.last() != Some(&k_last) {
        ticks.push(k_last);
    }
    for k in ticks {
        let _ = writeln!(
            out,
            r#"<text class="x-tick" x="{:.3}" y="{}" text-anchor="middle">{k}</text>"#,
            x_of(k),
            base + 14.0
        );
    }
    out.push_str("</g>\n");
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.3}" text-anchor="end">{tick:.2}</text>"#,
            MARGIN_LEFT - 4.0,
            y_of(tick) + 4.0
        );
    }

    let rule = |out: &mut String, class: &str, y: f64, color: &str, label: String| {
        let _ = writeln!(
            out,
            r#"<line class="{class}" x1="{MARGIN_LEFT}" y1="{y:.3}" x2="{}" y2="{y:.3}" stroke="{color}" stroke-dasharray="6 3"/>"#,
            WIDTH - MARGIN_RIGHT
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.3}" text-anchor="end" fill="{color}">{}</text>"#,
            WIDTH - MARGIN_RIGHT - 2.0,
            y - 3.0,
            escape(&label)
        );
    };
    rule(&mut out, "baseline", y_of(report.baseline_accuracy), "#444444", format!("baseline {:.4}", report.baseline_accuracy));
    rule(
        &mut out,
        "low-edi",
        y_of(report.low_edi_accuracy),
        "#d62728",
        format!("bottom {} dims {:.4}", report.bottom_k, report.low_edi_accuracy),
    );

    let points: Vec<String> = report
        .high_edi_curve
        .iter()
        .map(|p| format!("{:.3},{:.3}", x_of(p.k), y_of(p.accuracy)))
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline class="accuracy-curve" points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##,
        points.join(" ")
    );
    for p in &report.high_edi_curve {
        let _ = writeln!(
            out,
            r##"<circle class="curve-point" cx="{:.3}" cy="{:.3}" r="2.5" fill="#1f77b4"/>"##,
            x_of(p.k),
            y_of(p.accuracy)
        );
    }

    if let Some((name, acc)) = report.best_cross_property() {
        let y = y_of(acc);
        let x = MARGIN_LEFT + 10.0;
        let _ = writeln!(
            out,
            r##"<path class="best-cross" d="M {:.3} {:.3} L {:.3} {:.3} L {:.3} {:.3} L {:.3} {:.3} Z" fill="#ff7f0e"/>"##,
            x,
            y - 5.0,
            x + 5.0,
            y,
            x,
            y + 5.0,
            x - 5.0,
            y
        );
        let _ = writeln!(
            out,
            r##"<text x="{:.3}" y="{:.3}" fill="#ff7f0e">best cross-property: {} {:.4}</text>"##,
            x + 8.0,
            y + 4.0,
            escape(name),
            acc
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_confusion_heatmap(matrix: &ConfusionMatrix) -> String {
    let n = matrix.labels.len().max(1);
    let cell = ((HEIGHT - MARGIN_TOP - MARGIN_BOTTOM - 40.0) / n as f64).min(60.0);
    let x0 = 160.0;
    let y0 = MARGIN_TOP + 30.0;

    let mut out = String::new();
    open(&mut out, &format!("property classifier confusion matrix (accuracy {:.4})", matrix.accuracy()));
    for (i, row) in matrix.counts.iter().enumerate() {
        let total: u64 = row.iter().sum();
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            y0 + (i as f64 + 0.6) * cell,
            escape(&matrix.labels[i])
        );
        for (j, &c) in row.iter().enumerate() {
            let frac = if total == 0 { 0.0 } else { c as f64 / total as f64 };
            let shade = (255.0 - frac * 200.0).round() as u8;
            let _ = writeln!(
                out,
                r#"<rect class="cell" x="{:.3}" y="{:.3}" width="{cell:.3}" height="{cell:.3}" fill="rgb({shade},{shade},255)" stroke="white"/>"#,
                x0 + j as f64 * cell,
                y0 + i as f64 * cell
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{c}</text>"#,
                x0 + (j as f64 + 0.5) * cell,
                y0 + (i as f64 + 0.6) * cell
            );
        }
    }
    for (j, label) in matrix.labels.iter().enumerate() {
        let x = x0 + (j as f64 + 0.5) * cell;
        let y = y0 - 6.0;
        let _ = writeln!(
            out,
            r#"<text x="{x:.3}" y="{y:.3}" text-anchor="start" transform="rotate(-35 {x:.3} {y:.3})">{}</text>"#,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}
