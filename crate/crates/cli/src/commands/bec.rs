use currentalg::bec::{critical_temperature, cv_curve, sharpness, CurveRow, Ensemble};
use serde_json::json;

use super::CommandOutput;
use crate::config::ParamReader;
use crate::error::{CliError, CliResult};
use crate::output::{CsvTable, OutputFile};
use crate::svg::emit_svg_lines;

pub fn bec_curve(mut p: ParamReader) -> CliResult<CommandOutput> {
    let sigmas = p.f64_list("sigmas", &[0.0, 0.1, 0.4, 0.8])?;
    let tmin = p.f64("tmin", 0.3)?;
    let tmax = p.f64("tmax", 1.5)?;
    let steps: usize = p.value("steps", 240)?;
    let parameters = p.finish()?;
    if steps == 0 || tmin >= tmax {
        return Err(CliError::Validation("need tmax > tmin and steps ≥ 1".into()));
    }

    let grid: Vec<f64> = (0..=steps)
        .map(|i| tmin + (tmax - tmin) * i as f64 / steps as f64)
        .collect();
    let rows = cv_curve(&sigmas, &grid)?;
    let mut table = CsvTable::new(CurveRow::CSV_HEADER);
    for r in &rows {
        table.push(r.csv_line().split(',').map(str::to_string).collect());
    }
    let svg = emit_svg_lines(&table, "T_star", "cv", "sigma")?;

    let t_c = critical_temperature(&Ensemble::dirac());
    let per_sigma: Vec<(f64, f64)> = sigmas
        .iter()
        .map(|&s| {
            let curve: Vec<CurveRow> = rows.iter().filter(|r| r.sigma == s).copied().collect();
            (s, sharpness(&curve, t_c))
        })
        .collect();
    let mut positive: Vec<(f64, f64)> = per_sigma.iter().copied().filter(|(s, _)| *s > 0.0).collect();
    positive.sort_by(|a, b| a.0.total_cmp(&b.0));
    let increasing = positive.windows(2).all(|w| w[1].1 > w[0].1);
    let summary = json!({
        "t_critical": t_c,
        "window": [t_c, 1.2 * t_c],
        "sharpness": per_sigma.iter().map(|(s, v)| json!({ "sigma": s, "max_slope": v })).collect::<Vec<_>>(),
        "strictly_increasing_in_sigma": increasing,
    });
    Ok(CommandOutput {
        files: vec![
            OutputFile::text("cv_curve.csv", table.render()),
            OutputFile::text("cv_curve.svg", svg),
            OutputFile::json("sharpness.json", &summary)?,
        ],
        seed_used: false,
        parameters,
    })
}
