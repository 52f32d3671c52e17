//! Evaluation, tuning and effective-rank tables.

use std::fmt::Write as _;

use polarembed_core::{EffectiveRankCurve, EvalReport, LambdaSelection, Precision};

fn precision_cell(p: Precision) -> String {
    match p {
        Precision::Defined(v) => format!("{v}"),
        Precision::Undefined => "undefined".into(),
    }
}

fn mean_std_cell(s: Option<(f64, f64)>) -> String {
    match s {
        Some((m, sd)) => format!("{m:.4} ± {sd:.4}"),
        None => "undefined".into(),
    }
}

/// Per-split metrics as TSV, with means and standard deviations as trailing
/// comment lines.
pub fn eval_tsv(header: &str, report: &EvalReport) -> String {
    let mut s = String::from(header);
    s.push_str("split\tn_train\tn_test\tk\tlambda_theta\tprecision\tauc\touter_iterations\tfinal_objective\n");
    for m in &report.splits {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            m.split,
            m.n_train,
            m.n_test,
            m.k,
            m.lambda_theta,
            precision_cell(m.precision),
            m.auc,
            m.outer_iterations,
            m.final_objective
        );
    }
    let p = report.precision_summary();
    let a = report.auc_summary();
    let _ = writeln!(
        s,
        "# mean_precision\t{}",
        p.map_or("undefined".into(), |v| v.0.to_string())
    );
    let _ = writeln!(
        s,
        "# std_precision\t{}",
        p.map_or("undefined".into(), |v| v.1.to_string())
    );
    let _ = writeln!(
        s,
        "# mean_auc\t{}",
        a.map_or("undefined".into(), |v| v.0.to_string())
    );
    let _ = writeln!(
        s,
        "# std_auc\t{}",
        a.map_or("undefined".into(), |v| v.1.to_string())
    );
    s
}

pub fn eval_summary(report: &EvalReport) -> String {
    let mut s = format!(
        "splits: {}\nprecision: {}\nauc: {}\n",
        report.splits.len(),
        mean_std_cell(report.precision_summary()),
        mean_std_cell(report.auc_summary())
    );
    let undefined = report.undefined_precision_count();
    if undefined > 0 {
        let _ = writeln!(
            s,
            "precision undefined on {undefined} split(s): no positive predictions"
        );
    }
    s
}

/// `k`, `err_k` and the `k`-th singular value, one row per `k`.
pub fn rank_tsv(header: &str, curve: &EffectiveRankCurve) -> String {
    let mut s = String::from(header);
    let _ = writeln!(
        s,
        "# epsilon\t{}\n# chosen_k\t{}",
        curve.epsilon, curve.chosen_k
    );
    s.push_str("k\terr_k\tsingular_value\n");
    for (i, (e, sv)) in curve.errors.iter().zip(&curve.singular_values).enumerate() {
        let _ = writeln!(s, "{}\t{}\t{}", i + 1, e, sv);
    }
    s
}

/// Plot-ready data: the rank curve of the first split's training partition,
/// when given, followed by per-split metric columns.
pub fn plot_data(header: &str, curve: Option<&EffectiveRankCurve>, report: &EvalReport) -> String {
    let mut s = String::from(header);
    if let Some(c) = curve {
        s.push_str("# section\trank_curve\nk\terr_k\n");
        for (i, e) in c.errors.iter().enumerate() {
            let _ = writeln!(s, "{}\t{}", i + 1, e);
        }
    }
    s.push_str("# section\tsplit_metrics\nsplit\tprecision\tauc\n");
    for m in &report.splits {
        let _ = writeln!(s, "{}\t{}\t{}", m.split, precision_cell(m.precision), m.auc);
    }
    s
}

pub fn tuning_tsv(header: &str, sel: &LambdaSelection) -> String {
    let mut s = String::from(header);
    let _ = writeln!(s, "# folds\t{}\n# best_lambda\t{}", sel.folds, sel.best);
    s.push_str("lambda_theta\tmean_auc\tmean_log_loss\tfold_aucs\tselected\n");
    for row in &sel.table {
        let folds: Vec<String> = row.fold_aucs.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            row.lambda_theta,
            row.mean_auc,
            row.mean_log_loss,
            folds.join(","),
            u8::from(row.lambda_theta == sel.best)
        );
    }
    s
}
