//! Renderers for [`ClassificationReport`] — an aligned text table for
//! terminals and pretty JSON for downstream tooling.

use hopcall_core::ClassificationReport;

/// Renders a report as a fixed-width table followed by the overall
/// accuracy, e.g.
///
/// ```text
/// class     precision  recall  f1      tp   fp   fn   support
/// alarm     0.92       0.88    0.90    44   4    6    50
/// grumble   0.85       0.91    0.88    61   11   6    67
///
/// overall accuracy: 0.87
/// ```
pub fn format_report_text(report: &ClassificationReport) -> String {
    let mut rows: Vec<[String; 8]> = Vec::with_capacity(report.per_class.len() + 1);
    rows.push([
        "class".into(),
        "precision".into(),
        "recall".into(),
        "f1".into(),
        "tp".into(),
        "fp".into(),
        "fn".into(),
        "support".into(),
    ]);
    for (class, m) in &report.per_class {
        rows.push([
            class.clone(),
            format!("{:.2}", m.precision),
            format!("{:.2}", m.recall),
            format!("{:.2}", m.f1),
            m.true_positives.to_string(),
            m.false_positives.to_string(),
            m.false_negatives.to_string(),
            m.support.to_string(),
        ]);
    }

    let mut widths = [0usize; 8];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }

    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (w, cell) in widths.iter().zip(row) {
            if !line.is_empty() {
                line.push_str("  ");
            }
            line.push_str(cell);
            line.push_str(&" ".repeat(w - cell.len()));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push('\n');
    out.push_str(&format!("overall accuracy: {:.2}\n", report.overall_accuracy));
    out
}

/// Renders a report as pretty-printed JSON with a trailing newline.
pub fn report_to_json(report: &ClassificationReport) -> Result<String, serde_json::Error> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hopcall_core::{Bout, match_bouts, report};

    fn bout(class: &str, start_s: f64, end_s: f64) -> Bout {
        Bout {
            source_id: "rec.wav".to_string(),
            class: class.to_string(),
            start_s,
            end_s,
        }
    }

    fn sample_report() -> ClassificationReport {
        let truth = vec![bout("grumble", 0.0, 3.0), bout("alarm", 10.0, 14.0)];
        let predicted = vec![
            bout("grumble", 0.0, 3.0),
            bout("grumble", 20.0, 23.0),
            bout("alarm", 10.0, 14.0),
        ];
        report(&match_bouts(&predicted, &truth).unwrap())
    }

    #[test]
    fn text_table_lines_up_and_totals() {
        let text = format_report_text(&sample_report());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "class    precision  recall  f1    tp  fp  fn  support");
        assert_eq!(lines[1], "alarm    1.00       1.00    1.00  1   0   0   1");
        assert_eq!(lines[2], "grumble  0.50       1.00    0.67  1   1   0   1");
        assert_eq!(lines[3], "");
        // 2 TP out of 3 predictions.
        assert_eq!(lines[4], "overall accuracy: 0.67");
    }

    #[test]
    fn json_is_parseable_and_newline_terminated() {
        let json = report_to_json(&sample_report()).unwrap();
        assert!(json.ends_with('\n'));
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["per_class"]["grumble"]["true_positives"], 1);
        assert_eq!(value["per_class"]["grumble"]["false_positives"], 1);
        let acc = value["overall_accuracy"].as_f64().unwrap();
        assert!((acc - 2.0 / 3.0).abs() < 1e-12);
    }
}
