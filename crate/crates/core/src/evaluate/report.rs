use std::fs;
use std::path::{Path, PathBuf};

use super::{AblationReport, EvaluateError, EvaluationReport, Method, Result};

/// Fixed four-decimal rendering used in every report file.
pub fn format_f(v: f64) -> String {
    format!("{v:.4}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EvaluateError + '_ {
    move |source| EvaluateError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> EvaluateError + '_ {
    move |e| EvaluateError::Io {
        path: path.display().to_string(),
        source: e.into(),
    }
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.write_record(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

const STATISTICS: [&str; 5] = ["minimum", "mean", "maximum", "macro_f1", "micro_f1"];

fn statistics(r: &EvaluationReport) -> [f64; 5] {
    [r.min_f1, r.mean_f1, r.max_f1, r.macro_f1, r.micro_f1]
}

/// `statistic,<label>...` with one column per report.
fn write_summary_table(path: &Path, reports: &[&EvaluationReport]) -> Result<()> {
    let mut header = vec!["statistic".to_string()];
    header.extend(reports.iter().map(|r| r.label()));
    let rows: Vec<Vec<String>> = STATISTICS
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut row = vec![name.to_string()];
            row.extend(reports.iter().map(|r| format_f(statistics(r)[i])));
            row
        })
        .collect();
    write_csv(path, &header, &rows)
}

/// Writes the report files into `out_dir` (created if needed) and returns
/// their paths. Rows are sorted by concept, then category, fold and trial.
pub fn emit_report(report: &EvaluationReport, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let k = report.settings.protocol.k;
    let cat = |c: &Option<String>| c.clone().unwrap_or_default();
    let mut written = Vec::new();

    let summary = dir.join("summary.csv");
    write_summary_table(&summary, &[report])?;
    written.push(summary);

    let per_concept = dir.join("per_concept.csv");
    let mut header = strings(&["concept", "category", "support"]);
    header.extend((0..k).map(|f| format!("fold{f}")));
    header.push("mean_f1".into());
    let rows: Vec<Vec<String>> = report
        .concept_results
        .iter()
        .map(|r| {
            let mut row = vec![r.concept.clone(), cat(&r.category), r.support.to_string()];
            row.extend(r.per_fold_f1.iter().map(|v| v.map(format_f).unwrap_or_default()));
            row.push(format_f(r.mean_f1));
            row
        })
        .collect();
    write_csv(&per_concept, &header, &rows)?;
    written.push(per_concept);

    let per_category = dir.join("per_category.csv");
    let mut by_cat: std::collections::BTreeMap<&str, Vec<f64>> = std::collections::BTreeMap::new();
    for r in &report.concept_results {
        if let Some(c) = &r.category {
            by_cat.entry(c).or_default().push(r.mean_f1);
        }
    }
    let rows: Vec<Vec<String>> = by_cat
        .iter()
        .map(|(c, v)| {
            vec![
                c.to_string(),
                v.len().to_string(),
                format_f(v.iter().sum::<f64>() / v.len() as f64),
            ]
        })
        .collect();
    write_csv(&per_category, &strings(&["category", "concepts", "mean_f1"]), &rows)?;
    written.push(per_category);

    let matrix = dir.join("probability_matrix.csv");
    let mut header = strings(&["concept", "category"]);
    header.extend(report.objects.iter().cloned());
    let rows: Vec<Vec<String>> = report
        .probabilities
        .iter()
        .map(|p| {
            let mut row = vec![p.concept.clone(), cat(&p.category)];
            row.extend(
                report
                    .objects
                    .iter()
                    .map(|o| p.by_object.get(o).map(|v| format_f(*v)).unwrap_or_default()),
            );
            row
        })
        .collect();
    write_csv(&matrix, &header, &rows)?;
    written.push(matrix);

    let trials = dir.join("trials.csv");
    let rows: Vec<Vec<String>> = report
        .trials
        .iter()
        .map(|t| {
            vec![
                t.concept.clone(),
                cat(&t.category),
                t.fold.to_string(),
                t.trial.to_string(),
                t.confusion.tp.to_string(),
                t.confusion.fp.to_string(),
                t.confusion.fn_.to_string(),
                t.confusion.tn.to_string(),
                format_f(t.f1),
            ]
        })
        .collect();
    write_csv(
        &trials,
        &strings(&["concept", "category", "fold", "trial", "tp", "fp", "fn", "tn", "f1"]),
        &rows,
    )?;
    written.push(trials);

    let skipped = dir.join("skipped.csv");
    let rows: Vec<Vec<String>> = report
        .skipped
        .iter()
        .map(|s| {
            vec![
                s.concept.clone(),
                cat(&s.category),
                s.fold.to_string(),
                s.reason.to_string(),
            ]
        })
        .collect();
    write_csv(&skipped, &strings(&["concept", "category", "fold", "reason"]), &rows)?;
    written.push(skipped);

    let audit = dir.join("audit.csv");
    let violations = report.audit.violations();
    let rows: Vec<Vec<String>> = report
        .audit
        .summary()
        .into_iter()
        .map(|((fold, role), (items, objects))| {
            let bad = violations.iter().filter(|v| v.fold == fold && v.role == role).count();
            vec![
                fold.to_string(),
                role.as_str().to_string(),
                items.to_string(),
                objects.to_string(),
                bad.to_string(),
            ]
        })
        .collect();
    write_csv(
        &audit,
        &strings(&["fold", "role", "items", "objects", "violations"]),
        &rows,
    )?;
    written.push(audit);

    let audit_violations = dir.join("audit_violations.csv");
    let rows: Vec<Vec<String>> = violations
        .iter()
        .map(|v| {
            vec![
                v.fold.to_string(),
                v.role.as_str().to_string(),
                v.object_id.clone(),
                v.item.clone(),
            ]
        })
        .collect();
    write_csv(
        &audit_violations,
        &strings(&["fold", "role", "object_id", "item"]),
        &rows,
    )?;
    written.push(audit_violations);

    let config = dir.join("config.json");
    let json = serde_json::to_string_pretty(&report.settings).expect("settings serialize");
    fs::write(&config, json + "\n").map_err(io_err(&config))?;
    written.push(config);
    Ok(written)
}

/// One subdirectory per report (`dim12`, `dim50`, ... for autoencoder runs,
/// the method name otherwise) plus a combined `sweep_summary.csv`.
pub fn emit_sweep(reports: &[EvaluationReport], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for r in reports {
        let sub = match r.method() {
            Method::Udm => format!("dim{}", r.settings.vae.latent_dim),
            m => m.as_str().to_string(),
        };
        written.extend(emit_report(r, dir.join(sub))?);
    }
    let table = dir.join("sweep_summary.csv");
    write_summary_table(&table, &reports.iter().collect::<Vec<_>>())?;
    written.push(table);
    Ok(written)
}

fn percent(f: f64) -> String {
    let p = f * 100.0;
    if (p - p.round()).abs() < 1e-9 {
        format!("{}%", p.round() as i64)
    } else {
        format!("{}%", (p * 100.0).round() / 100.0)
    }
}

/// `ablation.csv`: one row per run label, one mean-F1 column per fraction.
pub fn emit_ablation(ablations: &[AblationReport], out_dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let fractions = ablations.first().map(|a| a.fractions.clone()).unwrap_or_default();
    if ablations.iter().any(|a| a.fractions != fractions) {
        return Err(EvaluateError::Inconsistent(
            "ablation rows use different fractions".into(),
        ));
    }
    let mut header = vec!["method".to_string()];
    header.extend(fractions.iter().map(|&f| percent(f)));
    let rows: Vec<Vec<String>> = ablations
        .iter()
        .map(|a| {
            let mut row = vec![a.label.clone()];
            row.extend(a.mean_f1.iter().map(|v| format_f(*v)));
            row
        })
        .collect();
    let path = dir.join("ablation.csv");
    write_csv(&path, &header, &rows)?;
    Ok(path)
}
