use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use helixwave_core::io::{read_columns, read_contingency, read_time_series, write_curve, write_field_grid};
use helixwave_core::stats::TAU_MU_TABLE;
use helixwave_core::{
    engle_granger, fit_wave_train, n_soliton_field, ols, pearson, single_soliton_field, ConstraintMode,
    EntropyReport, Error, FieldGrid, FitConfig, SolitonSpec,
};
use serde::Serialize;

use crate::report::{self, OrderedMap};
use crate::{svg, CurveFormat, EntropyArgs, FitArgs, Mode, OutputArgs, SolitonArgs, ValidateArgs};

#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input, or an output that cannot be written.
    Input(String),
    /// Well-formed input that the computation rejects.
    Domain(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Domain(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<File, Failure> {
    File::create(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn display(path: &Option<PathBuf>) -> Option<String> {
    path.as_ref().map(|p| p.display().to_string())
}

fn emit<C: Serialize, R: Serialize>(out: &OutputArgs, command: &str, config: &C, result: &R) -> Result<(), Failure> {
    let bytes = report::to_bytes(command, config, result).map_err(|e| Failure::Domain(e.to_string()))?;
    let written = match &out.output {
        Some(p) => create(p)?.write_all(&bytes),
        None => io::stdout().lock().write_all(&bytes),
    };
    written.map_err(|e| Failure::Input(format!("writing report: {e}")))
}

#[derive(Serialize)]
struct EntropyConfig {
    input: String,
    output: Option<String>,
    log_base: f64,
}

#[derive(Serialize)]
struct EntropyResult<'a> {
    dimensions: Vec<&'a str>,
    subset_entropies: OrderedMap<'a, f64>,
    interaction: f64,
    redundancy: f64,
    log_base: f64,
}

pub fn entropy(args: &EntropyArgs) -> Outcome {
    let joint = read_contingency(open(&args.input)?, args.log_base)?;
    let rep = EntropyReport::compute(&joint)?;
    let keyed: Vec<(String, f64)> = rep
        .subset_entropies
        .iter()
        .map(|s| (s.dims.join(","), s.entropy))
        .collect();
    let config = EntropyConfig {
        input: args.input.display().to_string(),
        output: display(&args.out.output),
        log_base: args.log_base,
    };
    let result = EntropyResult {
        dimensions: joint.dims().iter().map(|d| d.label.as_str()).collect(),
        subset_entropies: OrderedMap(&keyed),
        interaction: rep.interaction,
        redundancy: rep.redundancy,
        log_base: rep.log_base,
    };
    emit(&args.out, "entropy", &config, &result)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct GridConfig {
    x_min: f64,
    x_max: f64,
    nx: usize,
    t_min: f64,
    t_max: f64,
    nt: usize,
}

#[derive(Serialize)]
struct SolitonConfig<'a> {
    k: &'a [f64],
    c1: f64,
    coeff: f64,
    prefactor: [f64; 3],
    grid: GridConfig,
    grid_output: Option<String>,
    output: Option<String>,
}

#[derive(Serialize)]
struct SolitonResult {
    /// `accelerating` (single soliton with drift) or `hirota`.
    solution: &'static str,
    dx: f64,
    dt: f64,
    residual: f64,
    field_min: f64,
    field_max: f64,
}

pub fn soliton(args: &SolitonArgs) -> Outcome {
    let [c, a, b] = [args.prefactor[0], args.prefactor[1], args.prefactor[2]];
    let spec = SolitonSpec::new(args.k.clone())?
        .with_c1(args.c1)?
        .with_prefactor(c, a, b)?;
    let grid = FieldGrid::new(args.x_min, args.x_max, args.nx, args.t_min, args.t_max, args.nt)?;
    let accelerating = args.c1 != 0.0;
    if accelerating && (args.k.len() != 1 || [c, a, b].iter().any(|v| *v != 0.0)) {
        return Err(Failure::Domain(
            "a nonzero drift constant needs exactly one wavenumber and no prefactor".into(),
        ));
    }
    let field = if accelerating {
        single_soliton_field(args.k[0], args.c1, &grid)?
    } else {
        n_soliton_field(&spec, &grid)?
    };
    let residual = helixwave_core::kdv_residual(&field, args.c1, args.coeff)?;
    if let Some(p) = &args.grid {
        let w = io::BufWriter::new(create(p)?);
        write_field_grid(w, &field)?;
    }
    let (lo, hi) = field
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let config = SolitonConfig {
        k: &args.k,
        c1: args.c1,
        coeff: args.coeff,
        prefactor: [c, a, b],
        grid: GridConfig {
            x_min: args.x_min,
            x_max: args.x_max,
            nx: args.nx,
            t_min: args.t_min,
            t_max: args.t_max,
            nt: args.nt,
        },
        grid_output: display(&args.grid),
        output: display(&args.out.output),
    };
    let result = SolitonResult {
        solution: if accelerating { "accelerating" } else { "hirota" },
        dx: grid.dx(),
        dt: grid.dt(),
        residual,
        field_min: lo,
        field_max: hi,
    };
    emit(&args.out, "soliton", &config, &result)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct FitRunConfig<'a> {
    input: String,
    #[serde(flatten)]
    fit: &'a FitConfig,
    curve: Option<String>,
    format: CurveFormat,
    dense: usize,
    output: Option<String>,
}

fn label_of(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn fit(args: &FitArgs) -> Outcome {
    let series = read_time_series(open(&args.input)?, &label_of(&args.input))?;
    let config = FitConfig {
        n_waves: args.waves,
        max_iterations: args.max_iterations,
        tolerance: args.tolerance,
        constraint_mode: match args.mode {
            Mode::Free => ConstraintMode::Free,
            Mode::RatioLocked => ConstraintMode::RatioLocked,
        },
        multistarts: args.multistarts,
        seed: args.seed,
        bounds: args.bounds.clone(),
        smoothing_window: args.smoothing_window,
        free_baseline: args.free_baseline,
        ratio_tolerance: args.ratio_tolerance,
        min_prominence_fraction: args.min_prominence,
    };
    let result = fit_wave_train(&series, &config)?;

    if let Some(path) = &args.curve {
        let t = series.t();
        let dense: Vec<f64> = if args.dense >= 2 {
            let (a, b) = (t[0], t[t.len() - 1]);
            (0..args.dense)
                .map(|i| a + (b - a) * i as f64 / (args.dense - 1) as f64)
                .collect()
        } else {
            Vec::new()
        };
        let mut times: Vec<f64> = t.iter().chain(&dense).copied().collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let model = result.train.sample(&times);
        let file = create(path)?;
        match args.format {
            CurveFormat::Csv => write_curve(io::BufWriter::new(file), &times, &model)?,
            CurveFormat::Svg => {
                let plot = svg::plot(t, series.y(), &times, &model);
                let mut w = io::BufWriter::new(file);
                w.write_all(plot.as_bytes())
                    .and_then(|_| w.flush())
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
        }
    }

    let run = FitRunConfig {
        input: args.input.display().to_string(),
        fit: &config,
        curve: display(&args.curve),
        format: args.format,
        dense: args.dense,
        output: display(&args.out.output),
    };
    emit(&args.out, "fit", &run, &result)?;
    if result.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("helixwave: fit did not converge within {} iterations", args.max_iterations);
        Ok(ExitCode::from(4))
    }
}

#[derive(Serialize)]
struct ValidateConfig {
    input: Option<String>,
    empirical: Option<String>,
    model: Option<String>,
    lags: usize,
    output: Option<String>,
}

#[derive(Serialize)]
struct ValidateResult {
    n: usize,
    pearson: f64,
    ols: helixwave_core::RegressionResult,
    engle_granger: helixwave_core::CointegrationResult,
}

fn load_pair(args: &ValidateArgs) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    match (&args.input, &args.empirical, &args.model) {
        (Some(p), _, _) => {
            let (_, mut cols) = read_columns(open(p)?, &["t", "empirical", "model"])?;
            let model = cols.pop().unwrap_or_default();
            let empirical = cols.pop().unwrap_or_default();
            Ok((empirical, model))
        }
        (None, Some(e), Some(m)) => {
            let e = read_time_series(open(e)?, "empirical")?;
            let m = read_time_series(open(m)?, "model")?;
            Ok((e.y().to_vec(), m.y().to_vec()))
        }
        _ => Err(Failure::Input("give --input, or both --empirical and --model".into())),
    }
}

pub fn validate(args: &ValidateArgs) -> Outcome {
    let (empirical, model) = load_pair(args)?;
    if empirical.len() != model.len() {
        return Err(Failure::Domain(format!(
            "series lengths differ: {} empirical vs {} model",
            empirical.len(),
            model.len()
        )));
    }
    let r = pearson(&empirical, &model)?;
    let fit = ols(&empirical, &model, true)?;
    let eg = engle_granger(&model, &empirical, args.lags)?;
    let config = ValidateConfig {
        input: display(&args.input),
        empirical: display(&args.empirical),
        model: display(&args.model),
        lags: args.lags,
        output: display(&args.out.output),
    };
    let result = ValidateResult {
        n: empirical.len(),
        pearson: r,
        ols: fit,
        engle_granger: eg,
    };
    emit(&args.out, "validate", &config, &result)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CriticalConfig {
    regression: &'static str,
    output: Option<String>,
}

pub fn critical_values(args: &OutputArgs) -> Outcome {
    let config = CriticalConfig {
        regression: "constant, no trend",
        output: display(&args.output),
    };
    emit(args, "critical-values", &config, &TAU_MU_TABLE)?;
    Ok(ExitCode::SUCCESS)
}
