use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use ldsp_core::edi::{compute_edi, EdiConfig, PropertyReport};
use ldsp_core::evaluation::{evaluate_property, lp_classifier, EvalError};
use ldsp_core::generation::{run_job_http, GenerationJob, RunOptions};
use ldsp_core::io::{
    decode_ldse, generate_synthetic, read_json, render_svg, write_json, write_ldse, write_report_csv, DataError,
    SvgReport, SyntheticSpec,
};
use ldsp_core::EmbeddingPairSet;
use serde_json::json;

use crate::config::{FileConfig, InputRecord, RunManifest};
use crate::error::CliError;
use crate::{AnalyzeArgs, ClassifyArgs, EvaluateArgs, GenArgs, Globals, SynthArgs};

fn file_config(globals: &Globals) -> Result<FileConfig, CliError> {
    globals.config.as_deref().map_or_else(|| Ok(FileConfig::default()), FileConfig::load)
}

fn out_dir(globals: &Globals) -> Result<&Path, CliError> {
    let dir = globals.out.as_deref().ok_or_else(|| CliError::Usage("--out is required".into()))?;
    std::fs::create_dir_all(dir).map_err(|source| DataError::Io { path: dir.to_path_buf(), source })?;
    Ok(dir)
}

fn not_found(path: &Path) -> CliError {
    DataError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
    }
    .into()
}

/// Expands directories to their files ending in `suffix`, sorted by name.
fn expand(paths: &[PathBuf], suffix: &str) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let entries = std::fs::read_dir(path).map_err(|source| DataError::Io { path: path.clone(), source })?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.to_string_lossy().ends_with(suffix))
                .collect();
            found.sort();
            if found.is_empty() {
                return Err(CliError::Usage(format!("{}: no *{suffix} files", path.display())));
            }
            files.extend(found);
        } else if path.is_file() {
            files.push(path.clone());
        } else {
            return Err(not_found(path));
        }
    }
    Ok(files)
}

struct Loaded {
    path: PathBuf,
    set: EmbeddingPairSet,
}

fn load_embeddings(paths: &[PathBuf], manifest: &mut RunManifest) -> Result<Vec<Loaded>, CliError> {
    let mut loaded: Vec<Loaded> = Vec::new();
    for path in expand(paths, ".ldse")? {
        let bytes = std::fs::read(&path).map_err(|source| DataError::Io { path: path.clone(), source })?;
        let set = decode_ldse(&bytes).map_err(|source| CliError::Data { path: Some(path.clone()), source })?;
        if let Some(prev) = loaded.iter().find(|l| l.set.property() == set.property()) {
            return Err(CliError::Usage(format!(
                "{} and {} both hold property `{}`",
                prev.path.display(),
                path.display(),
                set.property()
            )));
        }
        manifest.inputs.push(InputRecord::of(&path, &bytes));
        loaded.push(Loaded { path, set });
    }
    Ok(loaded)
}

fn write_artifact<T: serde::Serialize>(dir: &Path, name: String, value: &T, manifest: &mut RunManifest) -> Result<(), CliError> {
    let path = dir.join(name);
    write_json(&path, value)?;
    manifest.output(&path);
    Ok(())
}

fn config_json<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("config serializes")
}

pub fn analyze(globals: &Globals, args: &AnalyzeArgs) -> Result<(), CliError> {
    let file = file_config(globals)?;
    let mut edi: EdiConfig = file.edi;
    if let Some(v) = args.bins {
        edi.bins = v;
    }
    if let Some(v) = args.keep {
        edi.keep_count = v;
    }
    if let Some(v) = args.w1 {
        edi.w1 = v;
    }
    if let Some(v) = args.w2 {
        edi.w2 = v;
    }
    if let Some(v) = args.w3 {
        edi.w3 = v;
    }
    if let Some(v) = args.step_fraction {
        edi.step_fraction = v;
    }
    edi.validate().map_err(|source| CliError::Edi { path: globals.config.clone(), source })?;
    let plot_top = args.plot_top.or(file.plot_top_n).unwrap_or(25);

    let dir = out_dir(globals)?;
    let mut manifest = RunManifest::new("analyze", None, json!({ "edi": config_json(&edi), "plot_top_n": plot_top }));
    for Loaded { path, set } in load_embeddings(&args.embeddings, &mut manifest)? {
        log::info!("analyzing {} ({} pairs, {} dims)", path.display(), set.n_pairs(), set.dim());
        let report = compute_edi(&set, &edi).map_err(|source| CliError::Edi { path: Some(path.clone()), source })?;
        let stem = report.property.clone();
        write_artifact(dir, format!("{stem}.edi.json"), &report, &mut manifest)?;
        let csv = dir.join(format!("{stem}.edi.csv"));
        write_report_csv(&csv, &report)?;
        manifest.output(&csv);
        let svg = dir.join(format!("{stem}.analysis.svg"));
        render_svg(SvgReport::CombinedAnalysis { report: &report, top_n: plot_top }, &svg)?;
        manifest.output(&svg);
        log::info!("{stem}: {} dimensions at or above the EDI threshold", report.relevant_dims.len());
    }
    manifest.write(dir)?;
    Ok(())
}

pub fn evaluate(globals: &Globals, args: &EvaluateArgs) -> Result<(), CliError> {
    let file = file_config(globals)?;
    let mut eval = file.eval;
    eval.split.seed = globals.seed.or(file.seed).unwrap_or(eval.split.seed);
    if let Some(v) = args.stop {
        eval.stop_ratio = v;
    }
    if let Some(v) = args.bottom {
        eval.bottom_k = v;
    }
    if let Some(v) = args.cross_k {
        eval.cross_k = v;
    }
    if args.k_max.is_some() {
        eval.k_max = args.k_max;
    }

    let dir = out_dir(globals)?;
    let mut manifest = RunManifest::new("evaluate", Some(eval.split.seed), json!({ "eval": config_json(&eval) }));

    let mut reports: BTreeMap<String, (PathBuf, PropertyReport)> = BTreeMap::new();
    for path in expand(&args.edi, ".edi.json")? {
        let bytes = std::fs::read(&path).map_err(|source| DataError::Io { path: path.clone(), source })?;
        let report: PropertyReport = read_json(&path)?;
        manifest.inputs.push(InputRecord::of(&path, &bytes));
        reports.insert(report.property.clone(), (path, report));
    }

    for Loaded { path, set } in load_embeddings(&args.embeddings, &mut manifest)? {
        let property = set.property().to_string();
        let (report_path, report) = reports
            .get(&property)
            .ok_or_else(|| CliError::Usage(format!("{}: no EDI report for property `{property}`", path.display())))?;
        if report.dim_count() != set.dim() {
            return Err(CliError::Eval {
                path: Some(path.clone()),
                source: EvalError::DimensionMismatch {
                    expected: set.dim(),
                    found: report.dim_count(),
                    context: Some(format!("EDI report {}", report_path.display())),
                },
            });
        }
        let others: BTreeMap<String, Vec<usize>> = reports
            .iter()
            .filter(|(name, _)| **name != property)
            .map(|(name, (_, r))| (name.clone(), r.ranked_dims()))
            .collect();

        let mut config = eval.clone();
        if config.bottom_k > set.dim() {
            config.bottom_k = (set.dim() / 2).max(1);
            log::warn!(
                "{property}: bottom_k {} exceeds {} dimensions; using the lowest {}",
                eval.bottom_k,
                set.dim(),
                config.bottom_k
            );
        }
        let ev = evaluate_property(&set, &report.ranked_dims(), &others, &config)
            .map_err(|source| CliError::Eval { path: Some(path.clone()), source })?;
        write_artifact(dir, format!("{property}.eval.json"), &ev, &mut manifest)?;
        let csv = dir.join(format!("{property}.eval.csv"));
        write_report_csv(&csv, &ev)?;
        manifest.output(&csv);
        let svg = dir.join(format!("{property}.eval.svg"));
        render_svg(SvgReport::EvaluationCurve(&ev), &svg)?;
        manifest.output(&svg);
        log::info!(
            "{property}: baseline {:.4}, k_at_95 {}{}, low-EDI {:.4}",
            ev.baseline_accuracy,
            ev.k_at_95,
            if ev.reached { "" } else { " (not reached)" },
            ev.low_edi_accuracy
        );
    }
    manifest.write(dir)?;
    Ok(())
}

pub fn classify(globals: &Globals, args: &ClassifyArgs) -> Result<(), CliError> {
    let file = file_config(globals)?;
    let mut eval = file.eval;
    eval.split.seed = globals.seed.or(file.seed).unwrap_or(eval.split.seed);

    let dir = out_dir(globals)?;
    let mut manifest = RunManifest::new("classify", Some(eval.split.seed), json!({ "eval": config_json(&eval) }));
    let sets: BTreeMap<String, EmbeddingPairSet> = load_embeddings(&args.embeddings, &mut manifest)?
        .into_iter()
        .map(|l| (l.set.property().to_string(), l.set))
        .collect();
    if sets.len() < 2 {
        return Err(CliError::Usage(format!(
            "classify needs embeddings for at least 2 properties, got {}",
            sets.len()
        )));
    }
    let result =
        lp_classifier(&sets, &eval.split, &eval.logistic()).map_err(|source| CliError::Eval { path: None, source })?;
    write_artifact(dir, "classify.json".into(), &result, &mut manifest)?;
    let svg = dir.join("confusion.svg");
    render_svg(SvgReport::ConfusionHeatmap(&result.confusion), &svg)?;
    manifest.output(&svg);
    log::info!("{}-way accuracy {:.4}", sets.len(), result.accuracy);
    manifest.write(dir)?;
    Ok(())
}

pub fn synth(globals: &Globals, args: &SynthArgs) -> Result<(), CliError> {
    let out = globals.out.as_deref().ok_or_else(|| CliError::Usage("--out <file.ldse> is required".into()))?;
    let bytes = std::fs::read(&args.spec).map_err(|source| DataError::Io { path: args.spec.clone(), source })?;
    let mut spec: SyntheticSpec = read_json(&args.spec)?;
    if let Some(seed) = globals.seed.or(file_config(globals)?.seed) {
        spec.seed = seed;
    }
    let set = generate_synthetic(&spec).map_err(|source| CliError::Data { path: Some(args.spec.clone()), source })?;
    let parent = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(|source| DataError::Io { path: parent.to_path_buf(), source })?;
    write_ldse(out, &set)?;

    let mut manifest = RunManifest::new("synth", Some(spec.seed), json!({ "spec": config_json(&spec) }));
    manifest.inputs.push(InputRecord::of(&args.spec, &bytes));
    manifest.output(out);
    manifest.write(parent)?;
    Ok(())
}

pub fn gen(globals: &Globals, args: &GenArgs) -> Result<(), CliError> {
    let mut job = GenerationJob::for_property_name(&args.property, &args.endpoint, &args.model)?;
    job.total = args.total;
    job.batch_size = args.batch_size;
    job.api_key_env = args.api_key_env.clone();
    job.validate()?;

    let dir = out_dir(globals)?;
    let mut options = RunOptions::new(dir);
    options.max_attempts = args.max_attempts.max(1);
    options.base_delay = Duration::from_millis(args.retry_delay_ms);
    let outcome = run_job_http(&job, &options)?;

    let name = job.property.name();
    let mut manifest = RunManifest::new("gen", None, json!({ "job": config_json(&job), "max_attempts": options.max_attempts }));
    write_artifact(dir, format!("{name}.gen-log.json"), &outcome.log, &mut manifest)?;
    for suffix in ["csv", "rejected.csv", "flagged.csv", "ckpt.json"] {
        manifest.output(&dir.join(format!("{name}.{suffix}")));
    }
    log::info!(
        "{name}: {} accepted, {} flagged, {} rejected, {} retries",
        outcome.log.accepted,
        outcome.log.flagged,
        outcome.log.rejected,
        outcome.log.total_retries
    );
    manifest.write(dir)?;
    Ok(())
}
