use std::path::Path;
use std::time::Instant;

use super::report::*;
use super::{DatasetConfig, ExperimentConfig, Method, RunError, Scaling};
use crate::baselines::{evaluate_ensemble, guarded, train_centralized, EnsembleModel};
use crate::data::{infer_schema, load_csv, partition_horizontal, payload_bytes, train_test_split, Dataset, MinMaxScaler};
use crate::error::{Error, Result};
use crate::ovo::{evaluate, Example, OvoModel};
use crate::protocol::{elect_from_matrix, parallel_training_seconds, run_dsvm, AccuracyMatrix, DsvmRun, SiteData};

/// Median of a non-empty sample; the mean of the two middle values for even sizes.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

pub fn load_dataset(cfg: &DatasetConfig) -> Result<Dataset> {
    let mut schema = infer_schema(&cfg.path, cfg.has_header, cfg.label_column.clone())?;
    if let Some(names) = &cfg.class_names {
        schema.class_names.clone_from(names);
    }
    load_csv(&cfg.path, &schema)
}

/// Loads the configured dataset and runs every requested method.
pub fn cmd_run(config: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    config.validate()?;
    let dataset = load_dataset(&config.dataset).map_err(RunError::Data)?;
    run_on_dataset(config, dataset)
}

/// Like [`cmd_run`] for a dataset that is already in memory.
pub fn run_on_dataset(config: &ExperimentConfig, dataset: Dataset) -> Result<ExperimentReport, RunError> {
    config.validate()?;
    let report = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| RunError::Config(e.to_string()))?
            .install(|| execute(config, dataset)),
        None => execute(config, dataset),
    }?;
    if report.all_failed() {
        return Err(RunError::AllMethodsFailed(Box::new(report)));
    }
    Ok(report)
}

/// Election-only run on an injected accuracy matrix.
pub fn run_fixture(path: impl AsRef<Path>) -> Result<ExperimentReport, RunError> {
    let path = path.as_ref();
    let matrix = AccuracyMatrix::from_json_file(path).map_err(RunError::Data)?;
    Ok(fixture_report(path.display().to_string(), matrix))
}

pub fn fixture_report(name: String, matrix: AccuracyMatrix) -> ExperimentReport {
    let election = elect_from_matrix(matrix);
    ExperimentReport {
        name,
        mode: RunMode::Fixture,
        seed: 0,
        time_unit: TIME_UNIT.into(),
        dataset: None,
        methods: vec![MethodReport {
            method: Method::Dsvm,
            status: MethodStatus::ElectionOnly,
            accuracy: None,
            train_seconds: None,
            test_seconds: None,
            elected_site: Some(election.global_model() + 1),
            models_evaluated: None,
            failure: None,
        }],
        sites: Vec::new(),
        election: Some(election),
        broadcast: None,
    }
}

struct LocalOutcome {
    run: DsvmRun,
    per_site_seconds: Vec<f64>,
}

fn train_locals(config: &ExperimentConfig, sites: &[SiteData]) -> Result<LocalOutcome> {
    for site in sites {
        config.resource_cap.check(site.len()).map_err(|e| Error::Site {
            site: site.site_id,
            source: Box::new(e),
        })?;
    }
    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); sites.len()];
    let mut last = None;
    for _ in 0..config.timing_repeats {
        let (run, _) = guarded(|| run_dsvm(sites.to_vec(), &config.train, config.eval_policy))?;
        for (k, t) in run.timings.per_site_train_seconds.iter().enumerate() {
            samples[k].push(*t);
        }
        last = Some(run);
    }
    Ok(LocalOutcome {
        run: last.expect("timing_repeats >= 1"),
        per_site_seconds: samples.iter().map(|s| median(s)).collect(),
    })
}

fn test_model(model: &OvoModel, test: &[Example], repeats: usize) -> Result<(f64, f64)> {
    let mut secs = Vec::with_capacity(repeats);
    let mut accuracy = 0.0;
    for _ in 0..repeats {
        let (acc, t) = timed(|| evaluate(model, test))?;
        accuracy = acc;
        secs.push(t);
    }
    Ok((accuracy, median(&secs)))
}

fn execute(config: &ExperimentConfig, dataset: Dataset) -> Result<ExperimentReport, RunError> {
    let repeats = config.timing_repeats;
    let (mut train, mut test) = train_test_split(&dataset.examples, config.test_size, config.seed).map_err(RunError::Data)?;
    if config.scaling == Scaling::MinMax {
        let scaler = MinMaxScaler::fit(&train).map_err(RunError::Data)?;
        scaler.transform(&mut train);
        scaler.transform(&mut test);
    }
    let sites = partition_horizontal(&train, &config.partition).map_err(RunError::Data)?;
    let shard_rows: usize = sites.iter().map(SiteData::len).sum();

    let mut report = ExperimentReport {
        name: config.display_name(),
        mode: RunMode::Train,
        seed: config.seed,
        time_unit: TIME_UNIT.into(),
        dataset: Some(DatasetSummary {
            path: config.dataset.path.display().to_string(),
            rows: dataset.len(),
            features: dataset.schema.feature_count,
            classes: dataset.distinct_classes(),
            train_rows: shard_rows,
            test_rows: test.len(),
            site_sizes: sites.iter().map(SiteData::len).collect(),
        }),
        methods: Vec::new(),
        sites: Vec::new(),
        election: None,
        broadcast: None,
    };

    let wants = |m: Method| config.methods.contains(&m);
    let local = if wants(Method::Dsvm) || wants(Method::Ensemble) {
        Some(train_locals(config, &sites))
    } else {
        None
    };

    if let Some(Ok(outcome)) = &local {
        for (k, site) in sites.iter().enumerate() {
            let model = &outcome.run.local_models[k];
            report.sites.push(SiteReport {
                site_id: site.site_id,
                rows: site.len(),
                train_seconds: Some(outcome.per_site_seconds[k]),
                training_accuracy: evaluate(model, &site.examples).map_err(RunError::Data)?,
                test_accuracy: evaluate(model, &test).map_err(RunError::Data)?,
            });
        }
    }

    for &method in &config.methods {
        let row = match method {
            Method::Dsvm => match &local {
                Some(Ok(outcome)) => {
                    let run = &outcome.run;
                    report.election = Some(run.election.clone());
                    report.broadcast = Some(BroadcastReport {
                        payload_bytes: run.broadcast.payload_bytes,
                        bytes_transferred: run.broadcast.bytes_transferred,
                        recipients: run.broadcast.recipients,
                        shard_bytes: sites.iter().map(|s| payload_bytes(&s.examples)).sum(),
                    });
                    match test_model(&run.global, &test, repeats) {
                        Ok((accuracy, test_seconds)) => MethodReport {
                            method,
                            status: MethodStatus::Completed,
                            accuracy: Some(accuracy),
                            train_seconds: Some(parallel_training_seconds(&outcome.per_site_seconds)),
                            test_seconds: Some(test_seconds),
                            elected_site: Some(run.election.global_model() + 1),
                            models_evaluated: Some(1),
                            failure: None,
                        },
                        Err(e) => MethodReport::failed(method, e.to_string()),
                    }
                }
                Some(Err(e)) => MethodReport::failed(method, e.to_string()),
                None => unreachable!("local models are trained when dsvm is requested"),
            },
            Method::Ensemble => match &local {
                Some(Ok(outcome)) => ensemble_row(outcome, &test, repeats),
                Some(Err(e)) => MethodReport::failed(method, e.to_string()),
                None => unreachable!("local models are trained when ensemble is requested"),
            },
            Method::Centralized => centralized_row(config, &sites, &test),
        };
        report.methods.push(row);
    }
    Ok(report)
}

fn ensemble_row(outcome: &LocalOutcome, test: &[Example], repeats: usize) -> MethodReport {
    let result = EnsembleModel::new(outcome.run.local_models.clone()).and_then(|ensemble| {
        let mut secs = Vec::with_capacity(repeats);
        let mut accuracy = 0.0;
        for _ in 0..repeats {
            let eval = evaluate_ensemble(&ensemble, test)?;
            accuracy = eval.accuracy;
            secs.push(eval.test_seconds);
        }
        Ok((accuracy, median(&secs), ensemble.members().len()))
    });
    match result {
        Ok((accuracy, test_seconds, members)) => MethodReport {
            method: Method::Ensemble,
            status: MethodStatus::Completed,
            accuracy: Some(accuracy),
            // same parallel local training as dsvm
            train_seconds: Some(parallel_training_seconds(&outcome.per_site_seconds)),
            test_seconds: Some(test_seconds),
            elected_site: None,
            models_evaluated: Some(members),
            failure: None,
        },
        Err(e) => MethodReport::failed(Method::Ensemble, e.to_string()),
    }
}

fn centralized_row(config: &ExperimentConfig, sites: &[SiteData], test: &[Example]) -> MethodReport {
    let result = (|| {
        let mut secs = Vec::with_capacity(config.timing_repeats);
        let mut model = None;
        for _ in 0..config.timing_repeats {
            let fit = train_centralized(sites, &config.train, &config.resource_cap)?;
            secs.push(fit.train_seconds);
            model = Some(fit.model);
        }
        let model = model.expect("timing_repeats >= 1");
        let (accuracy, test_seconds) = test_model(&model, test, config.timing_repeats)?;
        Ok::<_, Error>((accuracy, median(&secs), test_seconds))
    })();
    match result {
        Ok((accuracy, train_seconds, test_seconds)) => MethodReport {
            method: Method::Centralized,
            status: MethodStatus::Completed,
            accuracy: Some(accuracy),
            train_seconds: Some(train_seconds),
            test_seconds: Some(test_seconds),
            elected_site: None,
            models_evaluated: Some(1),
            failure: None,
        },
        Err(e) => MethodReport::failed(Method::Centralized, e.to_string()),
    }
}
