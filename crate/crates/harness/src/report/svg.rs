//! Minimal deterministic SVG charts: metric curves over cutoffs with
//! error bars, and labeled bar charts. Output is plain text built in a
//! fixed order, so identical inputs yield byte-identical files.

/// One plotted curve: (cutoff, mean, standard error) triples.
pub struct LineSeries {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(u32, f64, f64)>,
}

pub struct Bar {
    pub label: String,
    pub color: &'static str,
    pub value: f64,
    pub error: f64,
}

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 320.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 456.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 272.0;

fn fx(v: f64) -> String {
    format!("{v:.2}")
}

/// Y position for a metric value; all charts share the fixed [0, 1]
/// range the metrics are bounded to.
fn y_pos(value: f64) -> f64 {
    BOTTOM - value.clamp(0.0, 1.0) * (BOTTOM - TOP)
}

fn header(title: &str, out: &mut String) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"11\">\n"
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));
}

fn y_axis(label: &str, out: &mut String) {
    for i in 0..=4 {
        let value = i as f64 * 0.25;
        let y = y_pos(value);
        out.push_str(&format!(
            "<line x1=\"{LEFT}\" y1=\"{}\" x2=\"{RIGHT}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            fx(y),
            fx(y)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            fx(LEFT - 6.0),
            fx(y + 4.0),
            value
        ));
    }
    out.push_str(&format!(
        "<text x=\"14\" y=\"{}\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{}</text>\n",
        fx((TOP + BOTTOM) / 2.0),
        fx((TOP + BOTTOM) / 2.0),
        escape(label)
    ));
}

fn legend(entries: &[(String, &'static str)], out: &mut String) {
    let mut x = LEFT;
    let y = HEIGHT - 8.0;
    for (label, color) in entries {
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"9\" height=\"9\" fill=\"{color}\"/>\n",
            fx(x),
            fx(y - 9.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            fx(x + 13.0),
            fx(y),
            escape(label)
        ));
        x += 13.0 + 7.0 * label.len() as f64 + 14.0;
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A curve chart over integer cutoffs (the x axis spans the cutoffs
/// present in the series, normally 1..10), with ±1 standard-error bars.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[LineSeries]) -> String {
    let cutoffs: Vec<u32> = {
        let mut all: Vec<u32> = series
            .iter()
            .flat_map(|s| s.points.iter().map(|(c, _, _)| *c))
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    };
    let (lo, hi) = match (cutoffs.first(), cutoffs.last()) {
        (Some(lo), Some(hi)) => (*lo as f64, (*hi).max(*lo + 1) as f64),
        _ => (1.0, 10.0),
    };
    let x_pos = |c: u32| LEFT + (c as f64 - lo) / (hi - lo) * (RIGHT - LEFT);

    let mut out = String::new();
    header(title, &mut out);
    y_axis(y_label, &mut out);
    for c in &cutoffs {
        let x = x_pos(*c);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{BOTTOM}\" x2=\"{}\" y2=\"{}\" stroke=\"#aaaaaa\"/>\n",
            fx(x),
            fx(x),
            fx(BOTTOM + 4.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{c}</text>\n",
            fx(x),
            fx(BOTTOM + 16.0)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        fx((LEFT + RIGHT) / 2.0),
        fx(BOTTOM + 32.0),
        escape(x_label)
    ));
    out.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));

    for s in series {
        let path: Vec<String> = s
            .points
            .iter()
            .map(|(c, mean, _)| format!("{},{}", fx(x_pos(*c)), fx(y_pos(*mean))))
            .collect();
        if path.len() > 1 {
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                path.join(" "),
                s.color
            ));
        }
        for (c, mean, se) in &s.points {
            let x = x_pos(*c);
            if *se > 0.0 {
                out.push_str(&format!(
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"/>\n",
                    fx(x),
                    fx(y_pos(mean - se)),
                    fx(x),
                    fx(y_pos(mean + se)),
                    s.color
                ));
            }
            out.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>\n",
                fx(x),
                fx(y_pos(*mean)),
                s.color
            ));
        }
    }
    legend(
        &series.iter().map(|s| (s.label.clone(), s.color)).collect::<Vec<_>>(),
        &mut out,
    );
    out.push_str("</svg>\n");
    out
}

/// A bar chart of values in [0, 1] with ±1 standard-error whiskers.
pub fn bar_chart(title: &str, y_label: &str, bars: &[Bar]) -> String {
    let mut out = String::new();
    header(title, &mut out);
    y_axis(y_label, &mut out);
    out.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));
    let n = bars.len().max(1) as f64;
    let slot = (RIGHT - LEFT) / n;
    let bar_width = slot * 0.6;
    for (i, bar) in bars.iter().enumerate() {
        let center = LEFT + (i as f64 + 0.5) * slot;
        let top = y_pos(bar.value);
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
            fx(center - bar_width / 2.0),
            fx(top),
            fx(bar_width),
            fx(BOTTOM - top),
            bar.color
        ));
        if bar.error > 0.0 {
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
                fx(center),
                fx(y_pos(bar.value - bar.error)),
                fx(center),
                fx(y_pos(bar.value + bar.error)),
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            fx(center),
            fx(BOTTOM + 16.0),
            escape(&bar.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}
