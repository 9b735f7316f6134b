use crate::runner::{BenchRecord, Status};

/// Aligned text table with one row per record, in record order.
pub fn render_table(records: &[BenchRecord]) -> String {
    let mut out = String::new();
    if let Some(first) = records.first() {
        let repeats = records.iter().map(|r| r.timings.len()).max().unwrap_or(0).max(1);
        out.push_str(&format!("Time in seconds on {}\n", first.dataset));
        out.push_str(&format!(
            "Fit time only, median of {repeats} run{} after one discarded warm-up run.\n",
            if repeats == 1 { "" } else { "s" }
        ));
        if records.iter().any(|r| r.concurrent) {
            out.push_str("Tasks ran concurrently; timings may include contention.\n");
        }
        out.push('\n');
    }

    let rows: Vec<[String; 3]> = records
        .iter()
        .map(|r| {
            let time = match r.status {
                Status::Ok => format!("{:.4}", r.wall_seconds.unwrap_or(f64::NAN)),
                Status::Failed => "failed".into(),
                Status::Timeout => format!("> {} *", r.timeout_secs),
            };
            let detail = match (&r.quality, &r.error) {
                (Some(q), _) => format!("{} = {:.4}", q.metric, q.value),
                (None, Some(e)) => e.clone(),
                (None, None) => String::new(),
            };
            [r.row.clone(), time, detail]
        })
        .collect();
    let header = ["Algorithm".to_string(), "Time (s)".to_string(), "Quality".to_string()];
    let w0 = rows.iter().chain([&header]).map(|r| r[0].chars().count()).max().unwrap_or(0);
    let w1 = rows.iter().chain([&header]).map(|r| r[1].chars().count()).max().unwrap_or(0);
    let line = |r: &[String; 3]| format!("{:<w0$}  {:>w1$}  {}\n", r[0], r[1], r[2]).trim_end().to_string() + "\n";
    out.push_str(&line(&header));
    out.push_str(&format!("{}  {}  {}\n", "-".repeat(w0), "-".repeat(w1), "-".repeat(7)));
    for r in &rows {
        out.push_str(&line(r));
    }
    if records.iter().any(|r| r.status == Status::Timeout) {
        out.push_str("\n*: did not finish within the per-task timeout\n");
    }
    out
}
