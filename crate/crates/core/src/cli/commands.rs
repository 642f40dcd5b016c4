use std::path::PathBuf;
use std::time::Instant;

use crate::cli::config::RunConfig;
use crate::cli::data::{format_observations, read_observations, DataFormat, Encoding};
use crate::cli::report::{
    to_json, write_atomic, ConditionalRow, CvReport, DataSummary, ElementAccounting, EstimateReport, FitView,
    QueryReport, Timing, SCHEMA_VERSION,
};
use crate::cli::{CvArgs, EstimateArgs, QueryArgs, SynthArgs};
use crate::cross_validation::{
    coordinate_descent_w, grid_search, CvOptions, LossKind, SearchError, SearchOutcome, SearchSpace,
};
use crate::error::{Error, Result, MAX_FULL_DIM};
use crate::estimators::{estimate_at, estimate_full, CountsVector, Estimator, EstimatorConfig};
use crate::walsh::CellIndex;

fn load_counts(
    flag: Option<&PathBuf>,
    encoding: Option<Encoding>,
    cfg: &RunConfig,
) -> Result<(PathBuf, DataFormat, CountsVector)> {
    let path = flag
        .cloned()
        .or_else(|| cfg.data.path.clone())
        .ok_or_else(|| Error::Config("no data file: pass --data or set data.path".into()))?;
    let mut format = cfg.data.format();
    if let Some(e) = encoding {
        format.encoding = e;
    }
    let points = read_observations(&path, &format)?;
    let counts = CountsVector::from_observations(&points)?;
    Ok((path, format, counts))
}

fn check_dim(cfg: &EstimatorConfig, counts: &CountsVector) -> Result<()> {
    let n = cfg.dim()?;
    if n != counts.dim() {
        return Err(Error::Shape(format!(
            "estimator has n = {n} but the data have n = {}",
            counts.dim()
        )));
    }
    Ok(())
}

/// `None` for "every cell"; otherwise parsed cells.
fn parse_cells(specs: &[String], n: usize) -> Result<Option<Vec<CellIndex>>> {
    let specs: Vec<&str> = specs
        .iter()
        .flat_map(|s| s.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if specs.is_empty() || specs == ["all"] {
        return Ok(None);
    }
    specs
        .iter()
        .map(|s| CellIndex::parse(s, n))
        .collect::<Result<_>>()
        .map(Some)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn estimate_cells(
    est: &Estimator,
    counts: &CountsVector,
    cells: Option<Vec<CellIndex>>,
    clamp: bool,
) -> Result<crate::estimators::DensityEstimate> {
    let mut out = match cells {
        Some(cells) => estimate_at(&cells, est, counts)?,
        None => {
            if est.dim() > MAX_FULL_DIM {
                return Err(Error::capacity(
                    "listing every cell (pass explicit cells instead)",
                    est.dim(),
                    MAX_FULL_DIM,
                ));
            }
            estimate_full(est, counts)?
        }
    };
    if clamp {
        out.clamp_and_renormalize()?;
    }
    Ok(out)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn summarize_values(out: &mut String, est: &crate::estimators::DensityEstimate) {
    const SHOWN: usize = 16;
    for (c, v) in est.cells.iter().zip(&est.values).take(SHOWN) {
        out.push_str(&format!("  {}  {:.6e}\n", c.to_sign_string(), v));
    }
    if est.cells.len() > SHOWN {
        out.push_str(&format!("  ... {} more cells\n", est.cells.len() - SHOWN));
    }
    if est.negative {
        out.push_str("  warning: some estimates are negative\n");
    }
}

pub fn estimate(args: &EstimateArgs) -> Result<String> {
    let start = Instant::now();
    let cfg = RunConfig::load(&args.config)?;
    let (path, format, counts) = load_counts(args.data.as_ref(), args.encoding, &cfg)?;
    let est_cfg = cfg.estimator()?.clone();
    check_dim(&est_cfg, &counts)?;
    let est = est_cfg.build()?;
    let cell_specs = if args.cells.is_empty() {
        &cfg.query.cells
    } else {
        &args.cells
    };
    let cells = parse_cells(cell_specs, counts.dim())?;
    let threads = args.threads.or(cfg.threads).unwrap_or(1);
    let estimate = in_pool(threads, || estimate_cells(&est, &counts, cells, cfg.query.clamp))??;
    let ms = elapsed_ms(start);
    let report = EstimateReport {
        schema_version: SCHEMA_VERSION,
        command: "estimate".into(),
        seed: cfg.seed,
        data: DataSummary::new(&path, format.encoding, &counts),
        nonnegative_guaranteed: est.is_nonnegative(),
        fitted: est_cfg,
        estimate,
        counts,
        timing: args.timing.then_some(Timing { total_ms: ms }),
    };
    write_atomic(&args.out, &to_json(&report)?)?;

    let mut s = format!(
        "estimate: {} estimator, n = {}, |K| = {}, {} cells -> {}\n",
        report.fitted.variant_name(),
        report.data.n,
        report.data.observations,
        report.estimate.cells.len(),
        args.out.display()
    );
    for z in &report.estimate.normalizers {
        s.push_str(&format!("  normalizer {:?}: ln Z = {:.6}\n", z.method, z.ln_value));
    }
    summarize_values(&mut s, &report.estimate);
    s.push_str(&format!("  time: {ms:.3} ms\n"));
    Ok(s)
}

/// Error from `cv` after a partial report has been written.
fn budget_error(budget: usize, grid_size: usize) -> Error {
    Error::Config(format!(
        "cv.budget = {budget} is smaller than the grid ({grid_size} points); \
         the report holds the best of the evaluated points"
    ))
}

pub fn cv(args: &CvArgs) -> Result<String> {
    let start = Instant::now();
    let cfg = RunConfig::load(&args.config)?;
    let (path, format, counts) = load_counts(args.data.as_ref(), args.encoding, &cfg)?;
    let base = cfg.estimator()?.clone();
    check_dim(&base, &counts)?;
    let section = cfg.cv.clone();
    let loss = args.loss.or(section.as_ref().map(|c| c.loss)).unwrap_or(LossKind::Kl);
    let opts = CvOptions::with_threads(args.threads.or(cfg.threads).unwrap_or(1));
    let space = SearchSpace {
        base,
        axes: section.as_ref().map(|c| c.axes.clone()).unwrap_or_default(),
        budget: section.as_ref().and_then(|c| c.budget),
    };
    let grid_size = space.size();

    let (outcome, complete): (SearchOutcome, bool) = match grid_search(&space, loss, &counts, opts) {
        Ok(o) => (o, true),
        Err(SearchError::BudgetExceeded {
            best_so_far: Some(best),
            ..
        }) => (*best, false),
        Err(SearchError::BudgetExceeded { budget, grid_size, .. }) => return Err(budget_error(budget, grid_size)),
        Err(SearchError::Failed(e)) => return Err(e),
    };

    let mut fitted = outcome.best.clone();
    let mut risk = outcome.report.clone();
    let mut descent = None;
    if let (true, Some(sweeps)) = (complete, section.as_ref().and_then(|c| c.sweeps)) {
        let (w, gamma) = fitted.as_waak().ok_or_else(|| {
            Error::Config(format!(
                "cv.sweeps needs a waak or aa_classic estimator, got {}",
                fitted.variant_name()
            ))
        })?;
        let grid = &section.as_ref().expect("sweeps set").weight_grid;
        let d = coordinate_descent_w(&w, gamma, loss, &counts, sweeps, grid, opts)?;
        fitted = EstimatorConfig::waak(d.weights.clone(), gamma);
        risk = d.report.clone();
        descent = Some(d);
    }
    let ms = elapsed_ms(start);
    let report = CvReport {
        schema_version: SCHEMA_VERSION,
        command: "cv".into(),
        seed: cfg.seed,
        data: DataSummary::new(&path, format.encoding, &counts),
        loss,
        grid_size,
        complete,
        best_label: outcome.best_label.clone(),
        fitted,
        accounting: ElementAccounting::new(&risk, &counts),
        risk,
        table: outcome.table.clone(),
        descent,
        counts,
        timing: args.timing.then_some(Timing { total_ms: ms }),
    };
    write_atomic(&args.out, &to_json(&report)?)?;
    if !complete {
        return Err(budget_error(space.budget.unwrap_or(0), grid_size));
    }

    let mut s = format!(
        "cv: {:?} loss over {} grid points, n = {}, |K| = {} -> {}\n",
        loss,
        grid_size,
        report.data.n,
        report.data.observations,
        args.out.display()
    );
    for row in report.table.iter().take(32) {
        let mark = if row.label == report.best_label { "*" } else { " " };
        s.push_str(&format!(" {mark} {:<40} {:.8e}\n", row.label, row.value));
    }
    if let Some(d) = &report.descent {
        s.push_str(&format!(
            "  coordinate descent: {} sweeps, {} evaluations, w = {:?}\n",
            d.sweeps_run, d.evaluations, d.weights
        ));
    }
    s.push_str(&format!(
        "  best: {} (surrogate {:.8e}); elements {} <= {}, squared {} <= {}\n",
        report.best_label,
        report.risk.value,
        report.accounting.element_evaluations,
        report.accounting.element_bound,
        report.accounting.squared_element_evaluations,
        report.accounting.squared_element_bound
    ));
    s.push_str(&format!("  time: {ms:.3} ms\n"));
    Ok(s)
}

/// `(p(x with x_r = +1), p(x with x_r = -1))` for each cell.
fn conditional_rows(
    est: &Estimator,
    counts: &CountsVector,
    cells: &[CellIndex],
    response: usize,
) -> Result<Vec<ConditionalRow>> {
    let n = est.dim();
    if response == 0 || response > n {
        return Err(Error::Config(format!("response coordinate {response} not in 1..={n}")));
    }
    let flip = CellIndex::from_vars(n, &[response])?;
    let mut pairs = Vec::with_capacity(2 * cells.len());
    for c in cells {
        let plus = if c.bit(response - 1) {
            c.product(&flip)?
        } else {
            c.clone()
        };
        let minus = plus.product(&flip)?;
        pairs.push(plus);
        pairs.push(minus);
    }
    let values = estimate_at(&pairs, est, counts)?.values;
    Ok(cells
        .iter()
        .zip(values.chunks_exact(2))
        .map(|(c, pm)| {
            let (p_plus, p_minus) = (pm[0], pm[1]);
            let total = p_plus + p_minus;
            ConditionalRow {
                cell: c.to_sign_string(),
                p_plus,
                p_minus,
                expectation: (total != 0.0).then(|| (p_plus - p_minus) / total),
            }
        })
        .collect())
}

pub fn query(args: &QueryArgs) -> Result<String> {
    let start = Instant::now();
    let fit = FitView::load(&args.fit)?;
    let est = fit.fitted.build()?;
    check_dim(&fit.fitted, &fit.counts)?;
    let cells = parse_cells(&args.cells, est.dim())?;
    let estimate = estimate_cells(&est, &fit.counts, cells, false)?;
    let conditional = match args.response {
        Some(r) => conditional_rows(&est, &fit.counts, &estimate.cells, r)?,
        None => Vec::new(),
    };
    let ms = elapsed_ms(start);
    let report = QueryReport {
        schema_version: SCHEMA_VERSION,
        command: "query".into(),
        fit: args.fit.display().to_string(),
        fitted: fit.fitted,
        estimate,
        response: args.response,
        conditional,
        timing: args.timing.then_some(Timing { total_ms: ms }),
    };
    write_atomic(&args.out, &to_json(&report)?)?;

    let mut s = format!(
        "query: {} cells from {} -> {}\n",
        report.estimate.cells.len(),
        args.fit.display(),
        args.out.display()
    );
    summarize_values(&mut s, &report.estimate);
    if let Some(r) = report.response {
        for row in report.conditional.iter().take(16) {
            match row.expectation {
                Some(e) => s.push_str(&format!("  E[X_{r} | {}] = {e:+.6}\n", row.cell)),
                None => s.push_str(&format!("  E[X_{r} | {}] undefined (zero mass)\n", row.cell)),
            }
        }
    }
    s.push_str(&format!("  time: {ms:.3} ms\n"));
    Ok(s)
}

pub fn synth(args: &SynthArgs) -> Result<String> {
    let cfg = RunConfig::load(&args.config)?;
    let section = cfg
        .synth
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [synth] block".into()))?;
    let count = args.count.unwrap_or(section.count);
    let seed = args.seed.unwrap_or(cfg.seed);
    let points = section.model.sample(count, seed)?;
    let mut format = cfg.data.format();
    if let Some(e) = args.encoding {
        format.encoding = e;
    }
    write_atomic(&args.out, &format_observations(&points, &format))?;
    Ok(format!(
        "synth: {count} observations, n = {}, seed = {seed} -> {}\n",
        section.model.dim(),
        args.out.display()
    ))
}
