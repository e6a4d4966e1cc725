use std::path::{Path, PathBuf};

use anyhow::Context;
use scatter_sense::curves::{CurveParams, CurveRegistry};
use scatter_sense::rl_db::parse_angle_range;
use scatter_sense::scene::{synthesize, Probe, SynthesisOptions};
use scatter_sense::solver::{
    candidates_from_csv, candidates_from_json, candidates_to_csv, candidates_to_json, points_from_records,
    points_to_csv,
};
use scatter_sense::{generate_db, MaterialCatalog, Measurement, MethodRegistry, RlDatabase, Scene, SolverConfig, Vec3};

use crate::args::{
    CatalogArgs, Command, ConfigArgs, EmitCurvesArgs, ExportPointsArgs, GenDbArgs, ImportDbArgs, OutputFormat,
    SimulateArgs, SolveArgs,
};
use crate::output::{is_json, write_atomic};
use crate::{usage, Cli};

/// Grid used when `simulate` computes its own loss table.
const SIMULATION_GRID: &str = "0:89:0.1";

/// Frequency assumed for an imported table that does not record one.
const FALLBACK_FREQ_GHZ: f64 = 100.0;

pub fn dispatch(cli: Cli) -> anyhow::Result<Vec<PathBuf>> {
    match cli.command {
        Command::GenDb(a) => gen_db(a),
        Command::ImportDb(a) => import_db(a),
        Command::EmitCurves(a) => emit_curves(a),
        Command::Simulate(a) => simulate(a),
        Command::Solve(a) => solve(a),
        Command::ExportPoints(a) => export_points(a),
    }
}

fn catalog(args: &CatalogArgs) -> anyhow::Result<MaterialCatalog> {
    match &args.catalog {
        Some(p) => MaterialCatalog::from_path(p).with_context(|| format!("loading catalog {}", p.display())),
        None => Ok(MaterialCatalog::builtin()),
    }
}

fn angles(spec: &str) -> anyhow::Result<Vec<f64>> {
    parse_angle_range(spec).map_err(|e| usage(e.to_string()))
}

fn triple(flag: &str, text: &str) -> anyhow::Result<Vec3> {
    let nums: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("--{flag} expects x,y,z, got `{text}`")))?;
    match nums[..] {
        [x, y, z] => Ok(Vec3::new(x, y, z)),
        _ => Err(usage(format!("--{flag} expects x,y,z, got `{text}`"))),
    }
}

fn import(path: &Path) -> anyhow::Result<RlDatabase> {
    RlDatabase::import(path).with_context(|| format!("importing {}", path.display()))
}

fn gen_db(a: GenDbArgs) -> anyhow::Result<Vec<PathBuf>> {
    let grid = angles(&a.angles)?;
    let mats = catalog(&a.catalog)?.select(&a.materials)?;
    let db = generate_db(&mats, a.freq_ghz, &grid)?;
    let out = write_atomic(&a.out, &db.to_csv_string()?)?;
    println!(
        "wrote {}: {} materials x {} angles at {} GHz",
        out.display(),
        db.materials().len(),
        grid.len(),
        a.freq_ghz
    );
    Ok(vec![out])
}

fn import_db(a: ImportDbArgs) -> anyhow::Result<Vec<PathBuf>> {
    let db = import(&a.input)?;
    let shape = format!("{} materials x {} angles", db.materials().len(), db.angle_grid().len());
    match a.out {
        Some(path) => {
            let out = write_atomic(&path, &db.to_csv_string()?)?;
            println!("wrote {}: {shape} ({})", out.display(), db.materials().join(", "));
            Ok(vec![out])
        }
        None => {
            println!("{} is valid: {shape} ({})", a.input.display(), db.materials().join(", "));
            Ok(Vec::new())
        }
    }
}

fn emit_curves(a: EmitCurvesArgs) -> anyhow::Result<Vec<PathBuf>> {
    let registry = CurveRegistry::with_builtin();
    let emitter = registry.get(&a.kind).map_err(|e| usage(e.to_string()))?;
    let mut params = CurveParams::new(catalog(&a.catalog)?.select(&a.materials)?, a.freq_ghz, angles(&a.angles)?);
    if let Some(p) = &a.db {
        params.db = Some(import(p)?);
    }
    params.target_rl_db = a.target_rl_db;
    if let Some(t) = a.rl_tol {
        params.rl_tol = t;
    }
    if let Some(s) = a.angle_step {
        params.angle_step = s;
    }
    let table = emitter.emit(&params)?;
    let out = write_atomic(&a.out, &table.to_csv_string()?)?;
    println!("wrote {}: {} rows of {}", out.display(), table.len(), emitter.name());
    Ok(vec![out])
}

fn simulate(a: SimulateArgs) -> anyhow::Result<Vec<PathBuf>> {
    if a.noise_sigma_db > 0.0 && a.seed.is_none() {
        return Err(usage("--seed is required when --noise-sigma-db is positive"));
    }
    let (scene, probe) = Scene::load(&a.scene).with_context(|| format!("loading scene {}", a.scene.display()))?;
    let probe = resolve_probe(&a, probe)?;
    let db = match &a.db {
        Some(p) => import(p)?,
        None => {
            let mut names: Vec<&str> = Vec::new();
            for s in &scene.scatterers {
                if !names.contains(&s.material.as_str()) {
                    names.push(&s.material);
                }
            }
            let mats = catalog(&a.catalog)?.select(&names)?;
            generate_db(&mats, scene.frequency_ghz, &parse_angle_range(SIMULATION_GRID)?)?
        }
    };
    let opts = SynthesisOptions {
        noise_sigma_db: a.noise_sigma_db,
        n_samples: a.samples,
        seed: a.seed.unwrap_or(0),
        ..SynthesisOptions::default()
    };
    let m = synthesize(&scene, &probe.tx_ray()?, &probe.rx, &db, &opts)?
        .ok_or_else(|| anyhow::anyhow!("the probe ray never reaches the receiver in {}", a.scene.display()))?;
    let out = write_atomic(&a.out, &m.to_json_string()?)?;
    println!(
        "wrote {}: path {:.4} m, loss {:.4} dB (+/- {:.4})",
        out.display(),
        m.path_length_m,
        m.rl_measured_db,
        m.rl_uncertainty_db
    );
    Ok(vec![out])
}

fn resolve_probe(a: &SimulateArgs, stored: Option<Probe>) -> anyhow::Result<Probe> {
    let pick = |flag: &str, given: &Option<String>, fallback: Option<Vec3>| -> anyhow::Result<Vec3> {
        match (given, fallback) {
            (Some(t), _) => triple(flag, t),
            (None, Some(v)) => Ok(v),
            (None, None) => Err(usage(format!("the scene has no probe; pass --{flag}"))),
        }
    };
    Ok(Probe {
        tx: pick("tx", &a.tx, stored.map(|p| p.tx))?,
        aod: pick("aod", &a.aod, stored.map(|p| p.aod))?,
        rx: pick("rx", &a.rx, stored.map(|p| p.rx))?,
    })
}

fn solver_config(c: &ConfigArgs) -> anyhow::Result<SolverConfig> {
    let d = SolverConfig::default();
    let cfg = SolverConfig {
        delta_d: c.delta_d.unwrap_or(d.delta_d),
        path_tol: c.path_tol.unwrap_or(d.path_tol),
        rl_tol: c.rl_tol.unwrap_or(d.rl_tol),
        angle_step: c.angle_step.unwrap_or(d.angle_step),
        max_path: c.max_path.unwrap_or(d.max_path),
        extrapolation_bound: c.extrapolation_bound.unwrap_or(d.extrapolation_bound),
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn measurement(a: &SolveArgs, db: &RlDatabase) -> anyhow::Result<Measurement> {
    if let Some(p) = &a.measurement {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        return Measurement::from_json_str(&text).with_context(|| format!("parsing {}", p.display()));
    }
    let need = |flag: &str, v: &Option<String>| -> anyhow::Result<Vec3> {
        let t = v
            .as_ref()
            .ok_or_else(|| usage(format!("--{flag} is required without --measurement")))?;
        triple(flag, t)
    };
    let (tx, rx, aod, aoa) = (need("tx", &a.tx)?, need("rx", &a.rx)?, need("aod", &a.aod)?, need("aoa", &a.aoa)?);
    let path_m = match (a.path_m, a.tof_s) {
        (Some(d), _) => d,
        (None, Some(t)) => Measurement::path_length_from_tof(t),
        (None, None) => return Err(usage("one of --path-m or --tof-s is required")),
    };
    let freq = a.freq_ghz.or(db.frequency_ghz()).unwrap_or(FALLBACK_FREQ_GHZ);
    match (a.rl_db, a.p_tx_dbm, a.p_rx_dbm) {
        (Some(rl), _, _) => Ok(Measurement::new(tx, rx, aod, aoa, path_m, freq, rl, a.rl_unc)?),
        (None, Some(ptx), Some(prx)) => {
            Ok(Measurement::new(tx, rx, aod, aoa, path_m, freq, 0.0, a.rl_unc)?.with_powers(ptx, prx)?)
        }
        _ => Err(usage("one of --rl-db or --p-tx-dbm/--p-rx-dbm is required")),
    }
}

fn solve(a: SolveArgs) -> anyhow::Result<Vec<PathBuf>> {
    let registry = MethodRegistry::with_builtin();
    let method = registry.get(&a.method).map_err(|e| usage(e.to_string()))?;
    let cfg = solver_config(&a.config)?;
    let db = import(&a.db)?;
    let m = measurement(&a, &db)?;
    let report = method.solve(&m, &db, &cfg)?;

    let format = a.format.unwrap_or(match &a.out {
        Some(p) if is_json(p) => OutputFormat::Json,
        _ => OutputFormat::Csv,
    });
    let text = match format {
        OutputFormat::Csv => candidates_to_csv(&report.candidates)?,
        OutputFormat::Json => candidates_to_json(&report.candidates)? + "\n",
    };
    let headline = match (report.best(), report.diagnostic) {
        (Some(best), _) => format!(
            "{} candidates, rank 1 {} (loss residual {:.3} dB, path residual {:.4} m)",
            report.candidates.len(),
            best.materials,
            best.rl_residual,
            best.path_residual
        ),
        (None, Some(d)) => format!("no candidates ({d})"),
        (None, None) => "no candidates".to_string(),
    };
    match &a.out {
        Some(path) => {
            let out = write_atomic(path, &text)?;
            println!("wrote {}: {} {headline}", out.display(), method.name());
            Ok(vec![out])
        }
        None => {
            print!("{text}");
            eprintln!("{}: {headline}", method.name());
            Ok(Vec::new())
        }
    }
}

fn export_points(a: ExportPointsArgs) -> anyhow::Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(&a.candidates).with_context(|| format!("reading {}", a.candidates.display()))?;
    let mut records = if is_json(&a.candidates) {
        candidates_from_json(&text)?
    } else {
        candidates_from_csv(&text)?
    };
    if let Some(n) = a.top {
        records.retain(|r| r.rank <= n);
    }
    let points = points_from_records(&records);
    let out = write_atomic(&a.out, &points_to_csv(&points)?)?;
    println!("wrote {}: {} points from {} candidates", out.display(), points.len(), records.len());
    Ok(vec![out])
}
