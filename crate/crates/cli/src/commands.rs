use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use otdcov::center_outward::BallGrid;
use otdcov::geometry::pole_frame;
use otdcov::rng::derive_seed;
use otdcov::testkit::{
    canonical_sphere_grid, null_distribution, power_study, run_test, write_null_table, NullCache,
    Scenario, Space, TestConfig, TestReport, Variant,
};
use otdcov::{Chart, ScoreSpec, UnitDirection};

use crate::args::{GridArgs, NullTableArgs, PowerArgs, TestArgs, TestOptions};
use crate::dataset::{read_dataset, RENORMALIZE_LIMIT};
use crate::CliError;

fn config(opts: &TestOptions) -> Result<TestConfig, CliError> {
    let cfg = TestConfig {
        space: opts.space.parse()?,
        scores_x: ScoreSpec::parse(&opts.scores_x, opts.biloop_c)?,
        scores_y: ScoreSpec::parse(&opts.scores_y, opts.biloop_c)?,
        chart: opts.chart.parse::<Chart>()?,
        variant: opts.variant.parse::<Variant>()?,
        n_null_draws: opts.null_draws,
        alpha: opts.alpha,
        seed: opts.seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cache(opts: &TestOptions) -> Result<Option<NullCache>, CliError> {
    opts.null_cache
        .as_ref()
        .map(|dir| NullCache::with_dir(dir).map_err(CliError::from))
        .transpose()
}

/// Writes `text` to `out`, or to standard output.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::user(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::internal(format!("cannot write to stdout: {e}"))),
    }
}

#[derive(Serialize)]
struct TestOutput {
    #[serde(flatten)]
    report: TestReport,
    runtime_ms: u64,
}

pub fn test(args: &TestArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = config(&args.opts)?;
    let data = read_dataset(&args.input, args.opts.dx, args.opts.dy, cfg.space)?;
    for w in &data.warnings {
        eprintln!("otdcov: warning: {w}");
    }
    let cache = cache(&args.opts)?;
    let mut report = run_test(&data.x, &data.y, &cfg, cache.as_ref())?;
    let mut flags = data.warnings;
    flags.append(&mut report.flags);
    report.flags = flags;
    let out = TestOutput {
        report,
        runtime_ms: start.elapsed().as_millis() as u64,
    };
    let mut text = serde_json::to_string_pretty(&out)
        .map_err(|e| CliError::internal(format!("cannot serialize the report: {e}")))?;
    text.push('\n');
    emit(None, &text)
}

pub fn null_table(args: &NullTableArgs) -> Result<(), CliError> {
    let cfg = TestConfig {
        space: args.space.parse()?,
        scores_x: ScoreSpec::parse(&args.scores_x, args.biloop_c)?,
        scores_y: ScoreSpec::parse(&args.scores_y, args.biloop_c)?,
        n_null_draws: args.draws,
        seed: args.seed,
        ..TestConfig::new(Space::Euclidean)
    };
    let draws = null_distribution(&cfg, args.n, (args.dx, args.dy))?;
    write_null_table(&args.out, &cfg.null_fingerprint(args.n, args.dx, args.dy), &draws)?;
    Ok(())
}

fn parse_pole(raw: &str, d: usize) -> Result<UnitDirection, CliError> {
    let coords = raw
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| CliError::user(format!("--pole: '{c}' is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != d {
        return Err(CliError::user(format!("--pole has {} coordinates, expected {d}", coords.len())));
    }
    let len = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !len.is_finite() || (len - 1.0).abs() > RENORMALIZE_LIMIT {
        return Err(CliError::user(format!("--pole has norm {len}, not a unit vector")));
    }
    Ok(UnitDirection::new(coords)?)
}

fn grid_csv(d: usize, rows: impl Iterator<Item = (usize, Vec<f64>)>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["index".to_string(), "rank_level".to_string()];
    header.extend((1..=d).map(|k| format!("c{k}")));
    let err = |e: csv::Error| CliError::internal(format!("csv: {e}"));
    w.write_record(&header).map_err(err)?;
    for (index, (rank, coords)) in rows.enumerate() {
        let mut record = vec![index.to_string(), rank.to_string()];
        record.extend(coords.iter().map(|c| c.to_string()));
        w.write_record(&record).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::internal(e.to_string()))
}

/// The X-side grid that `test --seed <seed>` uses for samples of size n.
pub fn grid(args: &GridArgs) -> Result<(), CliError> {
    let space: Space = args.space.parse()?;
    let text = match space {
        Space::Euclidean => {
            if args.pole.is_some() {
                return Err(CliError::user("--pole applies to sphere grids only"));
            }
            let g = BallGrid::for_sample_size(args.n, args.d, derive_seed(args.seed, "grid-x", 0))?;
            grid_csv(
                args.d,
                (0..g.len()).map(|l| (g.rank_of(l), g.points()[l].clone())),
            )?
        }
        Space::Sphere => {
            let pole = match &args.pole {
                Some(raw) => parse_pole(raw, args.d)?,
                None => UnitDirection::north_pole(args.d)?,
            };
            let cfg = TestConfig { seed: args.seed, ..TestConfig::new(Space::Sphere) };
            let g = canonical_sphere_grid(&cfg, "x", args.n, args.d)?.rotated(&pole_frame(&pole)?)?;
            grid_csv(
                args.d,
                (0..g.len()).map(|l| (g.rank_of(l), g.points()[l].as_slice().to_vec())),
            )?
        }
    };
    emit(args.out.as_deref(), &text)
}

pub fn power(args: &PowerArgs) -> Result<(), CliError> {
    let cfg = config(&args.opts)?;
    let scenario: Scenario = args.scenario.parse()?;
    let n_values = args
        .n_list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::user(format!("--n-list: '{s}' is not a sample size")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cache = cache(&args.opts)?;
    let rows = power_study(
        scenario,
        &n_values,
        (args.opts.dx, args.opts.dy),
        &cfg,
        args.reps,
        cache.as_ref(),
    )?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::internal(format!("csv: {e}"));
    for row in &rows {
        w.serialize(row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::internal(format!("csv: {e}")))?;
    emit(
        args.out.as_deref(),
        &String::from_utf8(bytes).map_err(|e| CliError::internal(e.to_string()))?,
    )
}
