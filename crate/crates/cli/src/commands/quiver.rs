use std::collections::BTreeSet;

use currentalg::quiver::{
    anneal_seeds, check_car, check_commutators, check_composition, energy_estimates, ground_search_exact,
    pairing_diagnostics, vertex_matrices, AnnealSchedule, BondConvention, Boundary, FermionOps, Lattice, NnnRule,
    Occupation, PairingReport, QuiverParams, MAX_EXACT_STATES,
};
use serde_json::json;

use super::{num, sci, CommandOutput};
use crate::config::ParamReader;
use crate::error::{CliError, CliResult};
use crate::output::{CsvTable, OutputFile};

/// Threshold the exhaustive residuals are judged against.
const ALGEBRA_TOL: f64 = 1e-12;

fn parse_lattice(text: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Validation(format!("lattice `{text}` is not of the form LxxLy, e.g. 2x2"));
    let (a, b) = text.split_once('x').ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

pub fn quiver_algebra(mut p: ParamReader) -> CliResult<CommandOutput> {
    let shapes = p
        .string_list("lattices", "1x2,1x3,2x2")
        .iter()
        .map(|s| parse_lattice(s))
        .collect::<CliResult<Vec<_>>>()?;
    let parameters = p.finish()?;
    let lattices = shapes
        .iter()
        .map(|&(lx, ly)| Ok(FermionOps::new(&Lattice::open(lx, ly)?)?))
        .collect::<CliResult<Vec<_>>>()?;

    let mut csv = CsvTable::new("lattice,check,max_residual,identities_checked");
    let mut reports = Vec::new();
    let mut worst_required: f64 = 0.0;
    for (&(lx, ly), ops) in shapes.iter().zip(&lattices) {
        let name = format!("{lx}x{ly}");
        let car = check_car(ops);
        let commutators = check_commutators(ops);
        let composition = check_composition(ops);
        for (check, r) in [
            ("car", &car),
            ("commutators", &commutators),
            ("composition", &composition.composition),
            ("hop_back", &composition.hop_back),
            ("hop_back_same_site", &composition.hop_back_same_site),
        ] {
            csv.push(vec![
                name.clone(),
                check.into(),
                sci(r.max_residual),
                r.identities_checked.to_string(),
            ]);
        }
        worst_required = worst_required
            .max(car.max_residual)
            .max(commutators.max_residual)
            .max(composition.composition.max_residual)
            .max(composition.hop_back.max_residual);
        reports.push(json!({
            "lattice": name,
            "dimension": ops.dim(),
            "car": car,
            "commutators": commutators,
            "composition": composition,
        }));
    }
    let summary = json!({
        "lattices": reports,
        "vertex_matrices": vertex_matrices(),
        "max_required_residual": worst_required,
        "tolerance": ALGEBRA_TOL,
        "all_within_tolerance": worst_required < ALGEBRA_TOL,
    });
    Ok(CommandOutput {
        files: vec![
            OutputFile::text("quiver_algebra.csv", csv.render()),
            OutputFile::json("quiver_algebra.json", &summary)?,
        ],
        seed_used: false,
        parameters,
    })
}

/// Minimum-energy occupations from one search method.
struct Found {
    energy: f64,
    states: Vec<Occupation>,
    diagnostics: Vec<PairingReport>,
}

impl Found {
    fn new(energy: f64, states: Vec<Occupation>, lattice: &Lattice) -> CliResult<Self> {
        let diagnostics = pairing_diagnostics(&states, lattice)?;
        Ok(Self {
            energy,
            states,
            diagnostics,
        })
    }

    /// Smallest adjacency and largest cluster over the degenerate set.
    fn extremes(&self) -> (usize, usize) {
        let adjacent = self
            .diagnostics
            .iter()
            .map(|d| d.adjacent_hole_pairs)
            .min()
            .unwrap_or(0);
        let cluster = self.diagnostics.iter().map(|d| d.max_cluster).max().unwrap_or(0);
        (adjacent, cluster)
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "energy": self.energy,
            "n_degenerate": self.states.len(),
            "occupations": self.states.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            "diagnostics": self.diagnostics,
        })
    }
}

pub fn quiver_ground(mut p: ParamReader, seed: u64) -> CliResult<CommandOutput> {
    let lx: usize = p.value("lx", 3)?;
    let ly: usize = p.value("ly", 3)?;
    let boundary = match p.choice("boundary", "open", &["open", "periodic"])? {
        "periodic" => Boundary::Periodic,
        _ => Boundary::Open,
    };
    let lattice = Lattice::new(lx, ly, boundary)?;
    let n_sites = lattice.n_sites();
    let electrons: usize = p.value("electrons", n_sites.saturating_sub(2))?;
    let params = QuiverParams {
        u: p.f64("U", 100.0)?,
        t: p.f64("t", 1.0)?,
        k: p.f64("k", 1.8)?,
        j: p.f64("J", 0.6)?,
        alpha_q: p.value("alpha_q", 0)?,
        beta_q: p.value("beta_q", 1)?,
        bond_convention: match p.choice("bond_convention", "ordered", &["ordered", "unordered"])? {
            "unordered" => BondConvention::Unordered,
            _ => BondConvention::Ordered,
        },
        nnn_rule: match p.choice("nnn_rule", "diagonal", &["diagonal", "all_distinct"])? {
            "all_distinct" => NnnRule::AllDistinct,
            _ => NnnRule::Diagonal,
        },
    };
    params.validate()?;
    let fits = 4u64.checked_pow(n_sites as u32).is_some_and(|s| s <= MAX_EXACT_STATES);
    let method = match p.choice("method", "auto", &["auto", "exact", "anneal", "both"])? {
        "auto" if fits => "exact",
        "auto" => "anneal",
        m => m,
    };
    let run_exact = method != "anneal";
    let run_anneal = method != "exact";
    let (runs, schedule) = if run_anneal {
        let defaults = AnnealSchedule::for_params(&params);
        let runs: usize = p.value("runs", 20)?;
        let schedule = AnnealSchedule {
            t_init: p.f64("t_init", defaults.t_init)?,
            cooling: p.f64("cooling", defaults.cooling)?,
            sweeps: p.value("sweeps", defaults.sweeps)?,
        };
        schedule.validate()?;
        if runs == 0 {
            return Err(CliError::Validation("runs must be positive".into()));
        }
        (runs, Some(schedule))
    } else {
        (0, None)
    };
    let parameters = p.finish()?;
    if electrons > 2 * n_sites {
        return Err(CliError::Validation(format!(
            "{electrons} electrons do not fit on {n_sites} sites"
        )));
    }

    let exact = if run_exact {
        let g = ground_search_exact(&lattice, &params, electrons)?;
        Some((Found::new(g.energy, g.argmins, &lattice)?, g.sector_size))
    } else {
        None
    };
    let anneal = match schedule {
        Some(schedule) => {
            let seeds: Vec<u64> = (0..runs as u64).map(|r| seed.wrapping_add(r)).collect();
            let results = anneal_seeds(&lattice, &params, electrons, &schedule, &seeds)?;
            let best = results.iter().map(|r| r.best_energy).fold(f64::INFINITY, f64::min);
            let distinct: BTreeSet<Occupation> = results
                .iter()
                .filter(|r| r.best_energy == best)
                .map(|r| r.best.clone())
                .collect();
            let found = Found::new(best, distinct.into_iter().collect(), &lattice)?;
            Some((found, seeds, results))
        }
        None => None,
    };

    let headline = exact
        .as_ref()
        .map(|e| &e.0)
        .or(anneal.as_ref().map(|a| &a.0))
        .expect("one method ran");
    let (adjacent, cluster) = headline.extremes();
    let holes = n_sites.saturating_sub(electrons);
    let mut csv = CsvTable::new(
        "Lx,Ly,boundary,electrons,H,alpha_q,beta_q,U,t,J,k,bond_convention,E_min,n_degenerate,adjacent_hole_pairs,max_cluster",
    );
    csv.push(vec![
        lx.to_string(),
        ly.to_string(),
        if boundary == Boundary::Periodic {
            "periodic"
        } else {
            "open"
        }
        .into(),
        electrons.to_string(),
        holes.to_string(),
        params.alpha_q.to_string(),
        params.beta_q.to_string(),
        num(params.u),
        num(params.t),
        num(params.j),
        num(params.k),
        params.bond_convention.as_str().into(),
        num(headline.energy),
        headline.states.len().to_string(),
        adjacent.to_string(),
        cluster.to_string(),
    ]);

    let estimates = energy_estimates(n_sites, holes.min(n_sites), &params)?;
    let mut summary = serde_json::Map::new();
    summary.insert("method".into(), json!(method));
    summary.insert("standard_scenario".into(), json!(params.is_standard_scenario()));
    summary.insert("estimates".into(), json!(estimates));
    if let Some((found, sector)) = &exact {
        let mut v = found.to_json();
        v["sector_size"] = json!(sector);
        summary.insert("exact".into(), v);
    }
    if let Some((found, seeds, results)) = &anneal {
        let mut v = found.to_json();
        v["runs"] = json!(seeds
            .iter()
            .zip(results)
            .map(|(s, r)| json!({ "seed": s, "best_energy": r.best_energy, "best": r.best.to_string() }))
            .collect::<Vec<_>>());
        if let Some((ex, _)) = &exact {
            let hits = results
                .iter()
                .filter(|r| (r.best_energy - ex.energy).abs() < 1e-9)
                .count();
            v["runs_reaching_exact"] = json!(hits);
            v["undercuts_exact"] = json!(results.iter().any(|r| r.best_energy < ex.energy - 1e-9));
        }
        summary.insert("anneal".into(), v);
    }
    Ok(CommandOutput {
        files: vec![
            OutputFile::text("quiver_ground.csv", csv.render()),
            OutputFile::json("quiver_ground.json", &summary)?,
        ],
        seed_used: run_anneal,
        parameters,
    })
}
