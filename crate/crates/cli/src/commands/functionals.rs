use std::f64::consts::PI;

use currentalg::functionals::{
    char_compound, char_compound_quadrature, char_finite_nv, char_fractional, char_poisson, count_fit,
    girard_functional, ground_state_potential, mc_char, residual_check, sample_counts, weights_fractional, BoxDomain,
    FractionalSampler, GirardParams, GroundStateField, IntensityMeasure, MixingMeasure, OccupationOrdering,
    PairPotential, PoissonSampler, TensorGrid, TestFunction,
};
use currentalg::specfun::{mittag_leffler, FractionalOrder};
use num_complex::Complex64;
use serde_json::json;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::gamma;

use super::{complex_cells, num, sci, CommandOutput};
use crate::config::ParamReader;
use crate::error::{CliError, CliResult};
use crate::output::{CsvTable, OutputFile};

/// `amplitude · 1_[lo, hi]`; the defaults give `∫_0^1 (e^{if} − 1) = −1`.
fn indicator(p: &mut ParamReader) -> CliResult<TestFunction> {
    let lo = p.f64("lo", 0.0)?;
    let hi = p.f64("hi", 0.5)?;
    let amplitude = p.f64("amplitude", PI)?;
    Ok(TestFunction::indicator_1d(lo, hi, amplitude)?)
}

fn order(p: &mut ParamReader, default: f64) -> CliResult<FractionalOrder> {
    Ok(FractionalOrder::new(p.f64("alpha", default)?)?)
}

pub fn ml_weights(mut p: ParamReader) -> CliResult<CommandOutput> {
    let alpha = order(&mut p, 0.5)?;
    let m = p.f64("m", 3.0)?;
    let n_max: usize = p.value("n_max", 40)?;
    let parameters = p.finish()?;

    let weights = weights_fractional(alpha, m, n_max)?;
    let mut csv = CsvTable::new("n,p_n");
    for (n, w) in weights.iter().enumerate() {
        csv.push(vec![n.to_string(), num(*w)]);
    }
    let sum: f64 = weights.iter().sum();
    let mean: f64 = weights.iter().enumerate().map(|(n, w)| n as f64 * w).sum();
    let ml = mittag_leffler(alpha, -m)?;
    let summary = json!({
        "alpha": alpha.get(),
        "m": m,
        "n_max": n_max,
        "sum": sum,
        "missing_mass": 1.0 - sum,
        "truncated_mean": mean,
        "mean_m_over_gamma": m / gamma(1.0 + alpha.get()),
        "p0": weights[0],
        "mittag_leffler_at_minus_m": ml,
        "p0_abs_diff": (weights[0] - ml).abs(),
    });
    Ok(CommandOutput {
        files: vec![
            OutputFile::text("ml_weights.csv", csv.render()),
            OutputFile::json("ml_weights.json", &summary)?,
        ],
        seed_used: false,
        parameters,
    })
}

struct Comparison {
    case: &'static str,
    label: String,
    value: Complex64,
    reference: Complex64,
    stderr: Option<f64>,
}

impl Comparison {
    fn diff(&self) -> f64 {
        (self.value - self.reference).norm()
    }
}

pub fn functional_check(mut p: ParamReader, seed: u64) -> CliResult<CommandOutput> {
    const CASES: [&str; 4] = ["poisson", "finite-nv", "exp-mixture", "fractional"];
    let case = p.choice(
        "case",
        "all",
        &["all", "poisson", "finite-nv", "exp-mixture", "fractional"],
    )?;
    let active: Vec<&str> = CASES.into_iter().filter(|c| case == "all" || case == *c).collect();
    let f = indicator(&mut p)?;
    let length = p.f64("length", 1.0)?;
    let needs_rho = active.iter().any(|c| *c != "exp-mixture");
    let rho = if needs_rho { p.f64("rho", 2.0)? } else { 0.0 };
    let samples: usize = if active.contains(&"poisson") {
        p.value("samples", 100_000)?
    } else {
        0
    };
    let n_values: Vec<f64> = if active.contains(&"finite-nv") {
        p.f64_list("n_values", &[1024.0, 2048.0, 4096.0, 8192.0])?
    } else {
        Vec::new()
    };
    let rho_bar = if active.contains(&"exp-mixture") {
        p.f64("rho_bar", 1.0)?
    } else {
        0.0
    };
    let alpha = if active.contains(&"fractional") {
        Some(order(&mut p, 0.5)?)
    } else {
        None
    };
    let parameters = p.finish()?;

    let domain = BoxDomain::interval(length)?;
    let mut rows = Vec::new();
    let mut extra = serde_json::Map::new();
    for c in &active {
        match *c {
            "poisson" => {
                let mu = IntensityMeasure::new(domain.clone(), rho)?;
                let exact = char_poisson(&f, &mu)?;
                let mc = mc_char(&f, &PoissonSampler::new(mu), samples, seed)?;
                extra.insert(
                    "poisson_within_3_stderr".into(),
                    json!((mc.value - exact).norm() <= 3.0 * mc.stderr),
                );
                rows.push(Comparison {
                    case: c,
                    label: "monte_carlo".into(),
                    value: mc.value,
                    reference: exact,
                    stderr: Some(mc.stderr),
                });
            }
            "finite-nv" => {
                let mut errors = Vec::new();
                for &n in &n_values {
                    if !(n >= 1.0 && n.fract() == 0.0) {
                        return Err(CliError::Validation(format!(
                            "n_values entry {n} is not a positive integer"
                        )));
                    }
                    let box_n = BoxDomain::interval(n / rho)?;
                    let finite = char_finite_nv(&f, n as u64, &box_n)?;
                    let limit = char_poisson(&f, &IntensityMeasure::new(box_n, rho)?)?;
                    errors.push((finite - limit).norm());
                    rows.push(Comparison {
                        case: c,
                        label: format!("N={n}"),
                        value: finite,
                        reference: limit,
                        stderr: None,
                    });
                }
                let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
                extra.insert("finite_nv_error_ratios".into(), json!(ratios));
            }
            "exp-mixture" => {
                let mu = IntensityMeasure::new(domain.clone(), 1.0)?;
                let xi = MixingMeasure::Exponential { rho_bar };
                rows.push(Comparison {
                    case: c,
                    label: "mixture_quadrature".into(),
                    value: char_compound_quadrature(&f, &mu, &xi)?,
                    reference: char_compound(&f, &mu, &xi)?,
                    stderr: None,
                });
            }
            _ => {
                let alpha = alpha.expect("read when the fractional case is active");
                let mu = IntensityMeasure::new(domain.clone(), rho)?;
                let nu = MixingMeasure::FractionalNu { alpha };
                rows.push(Comparison {
                    case: c,
                    label: "mittag_leffler".into(),
                    value: char_fractional(&f, &mu, alpha)?,
                    reference: char_compound_quadrature(&f, &mu, &nu)?,
                    stderr: None,
                });
            }
        }
    }

    let mut csv = CsvTable::new("case,label,value_re,value_im,reference_re,reference_im,abs_diff,stderr");
    for r in &rows {
        let [vr, vi] = complex_cells(r.value);
        let [rr, ri] = complex_cells(r.reference);
        let se = r.stderr.map(sci).unwrap_or_default();
        csv.push(vec![r.case.into(), r.label.clone(), vr, vi, rr, ri, sci(r.diff()), se]);
    }
    let json_rows: Vec<_> = rows
        .iter()
        .map(|r| {
            json!({
                "case": r.case,
                "label": r.label,
                "value": [r.value.re, r.value.im],
                "reference": [r.reference.re, r.reference.im],
                "abs_diff": r.diff(),
                "stderr": r.stderr,
            })
        })
        .collect();
    extra.insert("rows".into(), json!(json_rows));
    Ok(CommandOutput {
        files: vec![
            OutputFile::text("functional_check.csv", csv.render()),
            OutputFile::json("functional_check.json", &extra)?,
        ],
        seed_used: active.contains(&"poisson"),
        parameters,
    })
}

pub fn sample_measure(mut p: ParamReader, seed: u64) -> CliResult<CommandOutput> {
    let kind = p.choice("kind", "fractional", &["fractional", "poisson"])?;
    let alpha = if kind == "fractional" {
        order(&mut p, 0.5)?
    } else {
        FractionalOrder::POISSON
    };
    let m = p.f64("m", 3.0)?;
    let draws: usize = p.value("draws", 100_000)?;
    let n_max: usize = p.value("n_max", 200)?;
    let parameters = p.finish()?;

    let mu = IntensityMeasure::new(BoxDomain::interval(1.0)?, m)?;
    let weights = weights_fractional(alpha, m, n_max)?;
    let counts = if alpha.is_poisson() {
        sample_counts(&PoissonSampler::new(mu), draws, seed)
    } else {
        sample_counts(&FractionalSampler::new(mu, alpha), draws, seed)
    };
    let fit = count_fit(&counts, &weights)?;
    let expected_mean = m / gamma(1.0 + alpha.get());
    let critical = ChiSquared::new(fit.degrees_of_freedom as f64)
        .map_err(|e| CliError::Validation(e.to_string()))?
        .inverse_cdf(0.99);
    let top = counts.iter().copied().max().unwrap_or(0).min(n_max);
    let mut observed = vec![0usize; top + 1];
    for &c in &counts {
        if c <= top {
            observed[c] += 1;
        }
    }
    let mut csv = CsvTable::new("n,observed,expected");
    for (n, o) in observed.iter().enumerate() {
        csv.push(vec![n.to_string(), o.to_string(), num(weights[n] * draws as f64)]);
    }
    let mean_z = (fit.mean - expected_mean) / fit.mean_stderr;
    let summary = json!({
        "kind": kind,
        "fit": fit,
        "expected_mean": expected_mean,
        "mean_z_score": mean_z,
        "chi_square_critical_1pct": critical,
        "mean_within_3_stderr": mean_z.abs() < 3.0,
        "chi_square_passes_1pct": fit.chi_square < critical,
    });
    Ok(CommandOutput {
        files: vec![
            OutputFile::text("sample_counts.csv", csv.render()),
            OutputFile::json("sample_measure.json", &summary)?,
        ],
        seed_used: true,
        parameters,
    })
}

pub fn girard_limit(mut p: ParamReader) -> CliResult<CommandOutput> {
    let f = indicator(&mut p)?;
    let params = GirardParams {
        circle_length: p.f64("length", 1.0)?,
        n_max: p.value("n_max", 32)?,
        beta: p.f64("beta", 200.0)?,
        rho_bar: p.f64("rho_bar", 1.0)?,
    };
    let ordering = match p.choice("ordering", "right", &["right", "left"])? {
        "left" => OccupationOrdering::Left,
        _ => OccupationOrdering::Right,
    };
    let parameters = p.finish()?;
    params.validate()?;

    let doubled = GirardParams {
        n_max: 2 * params.n_max,
        ..params
    };
    let unit = IntensityMeasure::new(BoxDomain::interval(params.circle_length)?, 1.0)?;
    let limit = char_compound(
        &f,
        &unit,
        &MixingMeasure::Exponential {
            rho_bar: params.rho_bar,
        },
    )?;
    let mut csv = CsvTable::new("n_max,beta,value_re,value_im,limit_re,limit_im,abs_diff");
    let mut values = Vec::new();
    for q in [params, doubled] {
        let v = girard_functional(&f, &q, ordering)?;
        let [vr, vi] = complex_cells(v);
        let [lr, li] = complex_cells(limit);
        csv.push(vec![
            q.n_max.to_string(),
            num(q.beta),
            vr,
            vi,
            lr,
            li,
            sci((v - limit).norm()),
        ]);
        values.push(v);
    }
    let summary = json!({
        "value": [values[0].re, values[0].im],
        "value_doubled_modes": [values[1].re, values[1].im],
        "doubling_change": (values[1] - values[0]).norm(),
        "zero_temperature_limit": [limit.re, limit.im],
        "limit_abs_diff": (values[0] - limit).norm(),
        "chemical_potential": params.chemical_potential(),
    });
    Ok(CommandOutput {
        files: vec![
            OutputFile::text("girard_limit.csv", csv.render()),
            OutputFile::json("girard_limit.json", &summary)?,
        ],
        seed_used: false,
        parameters,
    })
}

/// Largest grid written out point by point.
const MAX_GRID_POINTS: usize = 2_000_000;

pub fn ground_potential(mut p: ParamReader) -> CliResult<CommandOutput> {
    let field = p.choice("field", "harmonic", &["harmonic", "calogero"])?;
    let particles: usize = p.value("particles", 2)?;
    let omega = p.f64("omega", 1.0)?;
    let pair = if field == "calogero" {
        PairPotential::Calogero {
            omega,
            lambda: p.f64("lambda", -1.0)?,
        }
    } else {
        PairPotential::Harmonic { omega }
    };
    let lo = p.f64("lo", -2.0)?;
    let hi = p.f64("hi", 2.0)?;
    let points: usize = p.value("points", 101)?;
    let margin = p.f64("margin", 3.0)?;
    let parameters = p.finish()?;
    let size = u32::try_from(particles)
        .ok()
        .and_then(|d| points.checked_pow(d))
        .filter(|&s| s <= MAX_GRID_POINTS);
    if size.is_none() {
        return Err(CliError::Validation(format!(
            "{points}^{particles} grid points exceed the cap of {MAX_GRID_POINTS}"
        )));
    }

    let grid = TensorGrid::cube(particles, lo, hi, points)?;
    let field = GroundStateField::Analytic {
        n_particles: particles,
        pair,
    };
    let potential = ground_state_potential(&field, &grid)?;
    let residual = residual_check(&field, &grid, margin)?;
    let header: Vec<String> = (1..=particles)
        .map(|i| format!("x{i}"))
        .chain(["V".to_string()])
        .collect();
    let mut csv = CsvTable::new(&header.join(","));
    for (i, v) in potential.iter().enumerate() {
        csv.push(grid.point(i).into_iter().map(num).chain([num(*v)]).collect());
    }
    Ok(CommandOutput {
        files: vec![
            OutputFile::text("ground_potential.csv", csv.render()),
            OutputFile::json(
                "ground_potential.json",
                &json!({ "field": field, "residual": residual }),
            )?,
        ],
        seed_used: false,
        parameters,
    })
}
