use bandmap_core::operator::SETTLE_TOLERANCE;
use bandmap_core::orthopoly::{evaluate_first_kind, gram_matrix};
use bandmap_core::quadrature::BandQuadrature;
use bandmap_core::{
    convergence_diagnostics, density_profile, maps::linear_grid, scan_bifurcation, settle_cycle,
    CycleSearch, ExtendedChain, GridSpec, LimitCycle, MapFamily, Setup, SpectralMeasure,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    BifurcateArgs, CycleArgs, Format, GridArgs, GridCommandArgs, MapArgs, OrthoArgs, PointArgs,
};
use crate::error::CliError;
use crate::output::{emit, Cell, Table};

/// Everything that determines a run, recorded in every sidecar.
#[derive(Debug, Serialize)]
struct RunConfig<'a> {
    family: &'a str,
    lambda: Option<f64>,
    seed: f64,
    depth: Option<usize>,
    burn_in: usize,
    tolerance: f64,
    grid: Option<GridSpec>,
    format: Format,
}

fn family(map: &MapArgs) -> Result<MapFamily, CliError> {
    MapFamily::lookup(&map.family).ok_or_else(|| {
        let known: Vec<_> = MapFamily::registered().collect();
        CliError::Usage(format!(
            "unknown family {:?}; known: {}",
            map.family,
            known.join(", ")
        ))
    })
}

fn search(map: &MapArgs) -> CycleSearch {
    let defaults = CycleSearch::default();
    CycleSearch {
        burn_in: map.burn_in,
        max_burn_in: defaults.max_burn_in.max(map.burn_in),
        tolerance: map.tolerance,
        ..defaults
    }
}

fn grid_spec(grid: &GridArgs) -> Result<GridSpec, CliError> {
    if grid.grid_points < 2 {
        return Err(CliError::Usage("--grid-points must be at least 2".into()));
    }
    Ok(match (grid.grid_min, grid.grid_max) {
        (Some(min), Some(max)) if min < max => GridSpec::Range {
            min,
            max,
            points: grid.grid_points,
        },
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--grid-min must be below --grid-max".into(),
            ))
        }
        _ => GridSpec::Auto {
            points: grid.grid_points,
        },
    })
}

fn config<'a>(
    map: &'a MapArgs,
    point: Option<&PointArgs>,
    grid: Option<GridSpec>,
    format: Format,
) -> RunConfig<'a> {
    RunConfig {
        family: &map.family,
        lambda: point.map(|p| p.lambda),
        seed: map.seed,
        depth: point.map(|p| p.depth),
        burn_in: map.burn_in,
        tolerance: map.tolerance,
        grid,
        format,
    }
}

fn cycle_json(c: &LimitCycle) -> Value {
    json!({
        "period": c.period,
        "converged": c.converged,
        "values": c.values,
        "residual": c.residual,
        "burn_in": c.burn_in,
    })
}

/// Maximal runs of grid points sharing a detected period.
fn period_windows(samples: &[(f64, LimitCycle)]) -> Vec<Value> {
    let mut windows = Vec::new();
    let mut start = 0;
    for i in 1..=samples.len() {
        let key = |j: usize| {
            let c = &samples[j].1;
            (c.converged, if c.converged { c.period } else { 0 })
        };
        if i == samples.len() || key(i) != key(start) {
            let (converged, period) = key(start);
            windows.push(json!({
                "period": if converged { Some(period) } else { None },
                "lambda_start": samples[start].0,
                "lambda_end": samples[i - 1].0,
                "samples": i - start,
            }));
            start = i;
        }
    }
    windows
}

pub fn bifurcate(args: &BifurcateArgs) -> Result<(), CliError> {
    let f = family(&args.map)?;
    if args.lambda_min.partial_cmp(&args.lambda_max) != Some(std::cmp::Ordering::Less)
        || args.lambda_steps < 2
    {
        return Err(CliError::Usage(
            "need --lambda-min < --lambda-max and --lambda-steps >= 2".into(),
        ));
    }
    let s = search(&args.map);
    let grid = linear_grid(args.lambda_min, args.lambda_max, args.lambda_steps);
    let diagram = scan_bifurcation(&f, &grid, args.map.seed, &s)?;

    let mut table = Table::new(["lambda", "period", "converged", "cycle_value"]);
    for (lambda, c) in &diagram.samples {
        for v in c.sorted_values() {
            table.push(vec![
                Cell::Real(*lambda),
                Cell::Int(c.period as i64),
                Cell::Int(c.converged as i64),
                Cell::Real(v),
            ]);
        }
    }
    let fraction = diagram.non_converged_fraction();
    let meta = json!({
        "command": "bifurcate",
        "config": config(&args.map, None, None, args.output.format),
        "lambda_min": args.lambda_min,
        "lambda_max": args.lambda_max,
        "lambda_steps": args.lambda_steps,
        "search": s,
        "detected_doublings": diagram.detected_doublings,
        "period_windows": period_windows(&diagram.samples),
        "non_converged_fraction": fraction,
    });
    emit(&args.output, &table, &meta)?;
    if fraction > 0.5 {
        return Err(CliError::NonConvergence(format!(
            "{:.0}% of parameter values did not settle on a cycle",
            100.0 * fraction
        )));
    }
    Ok(())
}

pub fn cycle(args: &CycleArgs) -> Result<(), CliError> {
    let f = family(&args.map)?;
    let s = search(&args.map);
    let c = settle_cycle(&f, args.lambda, args.map.seed, &s)?;
    let mut table = Table::new(["index", "value"]);
    for (i, v) in c.values.iter().enumerate() {
        table.push(vec![Cell::Int(i as i64), Cell::Real(*v)]);
    }
    let mut cfg = config(&args.map, None, None, args.output.format);
    cfg.lambda = Some(args.lambda);
    let meta = json!({
        "command": "cycle",
        "config": cfg,
        "search": s,
        "cycle": cycle_json(&c),
        "min_index": c.min_index(),
    });
    emit(&args.output, &table, &meta)?;
    if !c.converged {
        return Err(CliError::NonConvergence(format!(
            "no cycle up to period {} at lambda = {} (residual {:.3e})",
            s.max_period, args.lambda, c.residual
        )));
    }
    Ok(())
}

fn setup(point: &PointArgs) -> Result<Setup, CliError> {
    let f = family(&point.map)?;
    Ok(Setup::new(
        &f,
        point.lambda,
        point.map.seed,
        point.depth,
        &search(&point.map),
    )?)
}

/// Provenance shared by the spectral commands.
fn spectral_meta(
    command: &str,
    st: &Setup,
    measure: &SpectralMeasure,
    cfg: RunConfig<'_>,
) -> Value {
    let model = st.model();
    let quad = BandQuadrature::default();
    let band_mass = model.band_integral(&measure.bands, &quad, |_| 1.0);
    let bands: Vec<[f64; 2]> = measure.bands.bands().map(|(a, b)| [a, b]).collect();
    let gaps: Vec<[f64; 2]> = measure.bands.gaps().map(|(a, b)| [a, b]).collect();
    json!({
        "command": command,
        "config": cfg,
        "cycle": cycle_json(&st.cycle),
        "tail": {
            "period": st.tail.period(),
            "alpha": st.tail.alpha,
            "beta": st.tail.beta,
            "parity": st.tail.parity,
        },
        "deviations": convergence_diagnostics(&st.operator, &st.tail, SETTLE_TOLERANCE),
        "edges": measure.bands.edges,
        "bands": bands,
        "gaps": gaps,
        "atoms": measure.atoms,
        "band_mass": band_mass,
        "atom_mass": measure.atom_mass(),
        "quadrature": { "nodes_per_band": quad.nodes_per_band, "scheme": quad.scheme() },
    })
}

pub fn density(args: &GridCommandArgs) -> Result<(), CliError> {
    let grid = grid_spec(&args.grid)?;
    let st = setup(&args.point)?;
    let profile = density_profile(&st.operator, &st.tail, &grid)?;
    let mut table = Table::new(["y", "rho"]);
    for (y, rho) in profile.grid.iter().zip(&profile.values) {
        table.push(vec![Cell::Real(*y), Cell::Real(*rho)]);
    }
    let cfg = config(
        &args.point.map,
        Some(&args.point),
        Some(grid),
        args.point.output.format,
    );
    let meta = spectral_meta("density", &st, &profile.measure, cfg);
    emit(&args.point.output, &table, &meta)
}

pub fn bands(args: &PointArgs) -> Result<(), CliError> {
    let st = setup(args)?;
    let measure = st.model().spectral_measure()?;
    let mut table = Table::new(["band", "lower", "upper"]);
    for (i, (lo, hi)) in measure.bands.bands().enumerate() {
        table.push(vec![Cell::Int(i as i64), Cell::Real(lo), Cell::Real(hi)]);
    }
    let cfg = config(&args.map, Some(args), None, args.output.format);
    let meta = spectral_meta("bands", &st, &measure, cfg);
    emit(&args.output, &table, &meta)
}

pub fn ortho(args: &OrthoArgs) -> Result<(), CliError> {
    let grid = grid_spec(&args.grid)?;
    if args.nmax + 1 >= args.point.depth {
        return Err(CliError::Usage(format!(
            "--nmax must be below --depth - 1 = {}",
            args.point.depth - 1
        )));
    }
    let st = setup(&args.point)?;
    let measure = st.model().spectral_measure()?;
    let chain = ExtendedChain::new(&st.operator, &st.tail);
    let first = args.nmax.min(3);
    let mut table = Table::new(
        std::iter::once("y".to_string()).chain((first..=args.nmax).map(|n| format!("P_{n}"))),
    );
    let mut peak: f64 = 0.0;
    for y in grid.resolve(&measure.bands) {
        let p: Vec<f64> = evaluate_first_kind(&chain, y, args.nmax)?;
        let mut row = vec![Cell::Real(y)];
        for v in &p[first..] {
            if measure.bands.in_band(y) {
                peak = peak.max(v.abs());
            }
            row.push(Cell::Real(*v));
        }
        table.push(row);
    }
    let gram = gram_matrix(
        &st.operator,
        &st.tail,
        args.nmax,
        &BandQuadrature::default(),
    )?;
    let stems: Vec<Value> = measure
        .bands
        .edges
        .iter()
        .map(|e| json!({ "position": e, "height": peak }))
        .collect();
    let cfg = config(
        &args.point.map,
        Some(&args.point),
        Some(grid),
        args.point.output.format,
    );
    let mut meta = spectral_meta("ortho", &st, &measure, cfg);
    meta["nmax"] = json!(args.nmax);
    meta["gram"] = serde_json::to_value(&gram)?;
    meta["stems"] = json!(stems);
    emit(&args.point.output, &table, &meta)
}
