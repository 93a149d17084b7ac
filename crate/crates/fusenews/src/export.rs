//! Heatmap and Shapley report files.

use std::fmt::Write as _;
use std::io::Write;

use fusenews_core::explain::{HeatmapExport, ShapleyReport};
use fusenews_core::Matrix;

use crate::reports::{report_reader, Provenance};

/// Rows `head,token,<one column per token>`; the head-averaged map comes
/// first as head `mean`, then heads `0..`.
pub fn write_heatmap_csv<W: Write>(mut out: W, map: &HeatmapExport, article: &str, prov: &Provenance) -> csv::Result<()> {
    writeln!(out, "# {} article={article}", prov.comment("heatmap"))?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["head".to_string(), "token".to_string()];
    header.extend(map.labels.iter().cloned());
    w.write_record(&header)?;
    let named = std::iter::once(("mean".to_string(), &map.mean))
        .chain(map.heads.iter().enumerate().map(|(h, m)| (h.to_string(), m)));
    for (head, m) in named {
        for (i, label) in map.labels.iter().enumerate() {
            let mut row = vec![head.clone(), label.clone()];
            row.extend(m.row(i).iter().map(|v| format!("{v}")));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Token labels plus `(head, matrix)` pairs.
pub type HeatmapTable = (Vec<String>, Vec<(String, Matrix)>);

/// Parses a heatmap CSV back into labels and `(head, matrix)` pairs.
pub fn read_heatmap_csv<R: std::io::Read>(r: R) -> Result<HeatmapTable, String> {
    let mut reader = report_reader(r);
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    let labels: Vec<String> = header.iter().skip(2).map(String::from).collect();
    let n = labels.len();
    let mut maps: Vec<(String, Vec<f64>)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let head = rec[0].to_string();
        if maps.last().is_none_or(|(h, _)| *h != head) {
            maps.push((head, Vec::with_capacity(n * n)));
        }
        let values = rec
            .iter()
            .skip(2)
            .map(|v| v.parse::<f64>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        maps.last_mut().expect("pushed above").1.extend(values);
    }
    let maps = maps
        .into_iter()
        .map(|(h, v)| Matrix::from_vec(n, n, v).map(|m| (h, m)).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((labels, maps))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Standalone SVG grid of the head-averaged map, darker for larger weight.
pub fn heatmap_svg(map: &HeatmapExport, article: &str, prov: &Provenance) -> String {
    let n = map.labels.len();
    let cell = 36.0;
    let margin = 150.0;
    let size = margin + cell * n as f64 + 20.0;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, "<!-- {} article={} -->", prov.comment("heatmap"), escape(article));
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, label) in map.labels.iter().enumerate() {
        let y = margin + cell * i as f64 + cell / 2.0 + 3.0;
        let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#, margin - 6.0, escape(label));
        let x = margin + cell * i as f64 + cell / 2.0;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" transform="rotate(-60 {x} {})">{}</text>"#,
            margin - 6.0,
            margin - 6.0,
            escape(label)
        );
    }
    for i in 0..n {
        for j in 0..n {
            let a = map.mean[(i, j)].clamp(0.0, 1.0);
            let shade = (255.0 * (1.0 - a)).round() as u8;
            let _ = writeln!(
                s,
                r##"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="rgb({shade},{shade},255)" stroke="#ccc"><title>{} → {}: {a:.4}</title></rect>"##,
                margin + cell * j as f64,
                margin + cell * i as f64,
                escape(&map.labels[i]),
                escape(&map.labels[j])
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Rows `feature,phi,rank[,std_error]`, rank 1 for the largest |φ|.
pub fn write_shapley_csv<W: Write>(mut out: W, report: &ShapleyReport, article: &str, prov: &Provenance) -> csv::Result<()> {
    writeln!(out, "# {} article={article}", prov.comment("shapley"))?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["feature", "phi", "rank"];
    if report.std_error.is_some() {
        header.push("std_error");
    }
    w.write_record(&header)?;
    let mut rank = vec![0; report.phi.len()];
    for (r, &k) in report.ranking().iter().enumerate() {
        rank[k] = r + 1;
    }
    for (k, name) in report.players.iter().enumerate() {
        let mut row = vec![name.clone(), format!("{}", report.phi[k]), rank[k].to_string()];
        if let Some(se) = &report.std_error {
            row.push(format!("{}", se[k]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn shapley_summary(report: &ShapleyReport, article: &str, prov: &Provenance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}", prov.comment("shapley"));
    let _ = writeln!(s, "article: {article}");
    let method = match report.permutations {
        Some(p) => format!("sampled ({p} permutations)"),
        None => "exact (all coalitions)".to_string(),
    };
    let _ = writeln!(s, "method: {method}");
    let _ = writeln!(s, "value evaluations: {}", report.evaluations);
    let _ = writeln!(s, "p_fake: {:.6}", report.prediction);
    let _ = writeln!(s, "baseline p_fake: {:.6}", report.base_value);
    let _ = writeln!(s, "efficiency residual: {:.3e}", report.residual);
    let _ = writeln!(s, "attributions by |phi|:");
    for k in report.ranking() {
        let se = match &report.std_error {
            Some(se) => format!(" ± {:.6}", se[k]),
            None => String::new(),
        };
        let _ = writeln!(s, "  {:<20} {:+.6}{se}", report.players[k], report.phi[k]);
    }
    s
}
