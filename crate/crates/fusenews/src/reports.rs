//! CSV reports. Every file starts with a `#` comment line carrying the
//! report kind, the config hash and the seed.

use std::io::Write;

use fusenews_core::dataset::Example;
use fusenews_core::text::{Label, FEATURE_NAMES};
use fusenews_core::train::{AblationRow, EpochRecord, MetricsReport};

/// Provenance written into every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn comment(&self, kind: &str) -> String {
        format!("fusenews {kind} config_hash={} seed={}", self.config_hash, self.seed)
    }
}

fn begin<W: Write>(mut out: W, kind: &str, prov: &Provenance) -> std::io::Result<csv::Writer<W>> {
    writeln!(out, "# {}", prov.comment(kind))?;
    Ok(csv::Writer::from_writer(out))
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Reader for files produced here: `#` lines are skipped.
pub fn report_reader<R: std::io::Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r)
}

/// One row per example: id, the eight raw statistics, label in the
/// dataset's convention.
pub fn write_features<W: Write>(out: W, examples: &[Example], label_fake: u8, prov: &Provenance) -> csv::Result<()> {
    let mut w = begin(out, "features", prov)?;
    let mut header = vec!["id"];
    header.extend_from_slice(&FEATURE_NAMES);
    header.push("label");
    w.write_record(&header)?;
    for e in examples {
        let mut row = vec![e.id.clone()];
        row.extend(e.stats.0.iter().map(|&v| num(v)));
        let fake = e.label == Label::Fake;
        let value = if fake { label_fake } else { 1 - label_fake };
        row.push(value.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub const METRICS_HEADER: [&str; 16] = [
    "fold",
    "accuracy",
    "precision",
    "recall",
    "f1",
    "tp",
    "fp",
    "fn",
    "tn",
    "undefined",
    "epochs_trained",
    "best_epoch",
    "accuracy_std",
    "precision_std",
    "recall_std",
    "f1_std",
];

/// Fold rows then a `mean` row with sample standard deviations. Timings
/// are kept out of this file so it is reproducible byte for byte; see
/// [`write_timing`].
pub fn write_metrics<W: Write>(out: W, report: &MetricsReport, prov: &Provenance) -> csv::Result<()> {
    let mut w = begin(out, "metrics", prov)?;
    w.write_record(METRICS_HEADER)?;
    for f in &report.folds {
        let c = &f.confusion;
        w.write_record([
            f.fold.to_string(),
            num(f.scores.accuracy),
            num(f.scores.precision),
            num(f.scores.recall),
            num(f.scores.f1),
            c.tp.to_string(),
            c.fp.to_string(),
            c.fn_.to_string(),
            c.tn.to_string(),
            f.scores.undefined.to_string(),
            f.epochs_trained.to_string(),
            f.best_epoch.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    let sum = |get: fn(&fusenews_core::train::ConfusionMatrix) -> usize| {
        report.folds.iter().map(|f| get(&f.confusion)).sum::<usize>().to_string()
    };
    let (m, s) = (&report.mean, &report.std);
    w.write_record([
        "mean".to_string(),
        num(m.accuracy),
        num(m.precision),
        num(m.recall),
        num(m.f1),
        sum(|c| c.tp),
        sum(|c| c.fp),
        sum(|c| c.fn_),
        sum(|c| c.tn),
        m.undefined.to_string(),
        String::new(),
        String::new(),
        num(s.accuracy),
        num(s.precision),
        num(s.recall),
        num(s.f1),
    ])?;
    w.flush()?;
    Ok(())
}

/// Inference time per fold, measured with a monotonic clock.
pub fn write_timing<W: Write>(out: W, report: &MetricsReport, prov: &Provenance) -> csv::Result<()> {
    let mut w = begin(out, "timing", prov)?;
    w.write_record(["fold", "test_samples", "inference_ms_total", "ms_per_sample"])?;
    for f in &report.folds {
        w.write_record([
            f.fold.to_string(),
            f.confusion.total().to_string(),
            num(f.inference_ms_total),
            num(f.ms_per_sample),
        ])?;
    }
    let total: usize = report.folds.iter().map(|f| f.confusion.total()).sum();
    let ms: f64 = report.folds.iter().map(|f| f.inference_ms_total).sum();
    w.write_record(["mean".to_string(), total.to_string(), num(ms), num(report.mean_ms_per_sample)])?;
    w.flush()?;
    Ok(())
}

/// One row per configuration with mean F1, precision and recall.
pub fn write_ablation<W: Write>(out: W, rows: &[AblationRow], prov: &Provenance) -> csv::Result<()> {
    let mut w = begin(out, "ablation", prov)?;
    w.write_record(["config", "f1", "precision", "recall"])?;
    for r in rows {
        let m = &r.report.mean;
        w.write_record([r.ablation.name().to_string(), num(m.f1), num(m.precision), num(m.recall)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_history<W: Write>(out: W, history: &[EpochRecord], prov: &Provenance) -> csv::Result<()> {
    let mut w = begin(out, "history", prov)?;
    w.write_record(["epoch", "train_loss", "val_loss", "val_f1"])?;
    for h in history {
        w.write_record([h.epoch.to_string(), num(h.train_loss), num(h.val_loss), num(h.val_f1)])?;
    }
    w.flush()?;
    Ok(())
}

/// A prediction for one article.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: String,
    pub p_fake: f64,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        if self.p_fake > 0.5 {
            "fake"
        } else {
            "real"
        }
    }
}

pub fn write_predictions<W: Write>(out: W, verdicts: &[Verdict], prov: &Provenance) -> csv::Result<()> {
    let mut w = begin(out, "predictions", prov)?;
    w.write_record(["id", "p_fake", "verdict"])?;
    for v in verdicts {
        w.write_record([v.id.as_str(), &num(v.p_fake), v.label()])?;
    }
    w.flush()?;
    Ok(())
}
