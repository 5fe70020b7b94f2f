use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::endpoint::{ChatEndpoint, ChatMessage, EndpointFailure, HttpChatEndpoint};
use super::ordering::{validate_ordering, FlaggedRecord};
use super::prompt::{build_prompt, continuation_prompt};
use super::GenError;
use crate::io::{write_ldsp_csv, DataError, LdspRecord};
use crate::properties::LinguisticProperty;

pub const DEFAULT_API_KEY_ENV: &str = "LDSP_LLM_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationJob {
    pub property: LinguisticProperty,
    pub property_description: String,
    pub example_ldsp: LdspRecord,
    pub total: usize,
    pub batch_size: usize,
    pub endpoint_url: String,
    pub model_name: String,
    pub api_key_env: String,
}

impl GenerationJob {
    /// A 1000-pair job in batches of 100, with the registry's description and
    /// reference pair for `property`.
    pub fn new(property: LinguisticProperty, endpoint_url: impl Into<String>, model_name: impl Into<String>) -> Self {
        let (s1, s2) = property.example_pair();
        Self {
            property,
            property_description: property.description().to_string(),
            example_ldsp: LdspRecord { property, sentence1: s1.into(), sentence2: s2.into() },
            total: 1000,
            batch_size: 100,
            endpoint_url: endpoint_url.into(),
            model_name: model_name.into(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
        }
    }

    pub fn for_property_name(name: &str, endpoint_url: impl Into<String>, model_name: impl Into<String>) -> Result<Self, GenError> {
        let property = name.parse().map_err(|_| GenError::UnknownProperty(name.to_string()))?;
        Ok(Self::new(property, endpoint_url, model_name))
    }

    pub fn n_batches(&self) -> usize {
        self.total / self.batch_size
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.batch_size == 0 || self.total == 0 || !self.total.is_multiple_of(self.batch_size) {
            return Err(GenError::InvalidJob(format!(
                "total {} must be a positive multiple of batch_size {}",
                self.total, self.batch_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Attempts per batch, including the first.
    pub max_attempts: usize,
    /// Delay before the first retry; doubles on each further retry.
    pub base_delay: Duration,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self { out_dir: out_dir.into(), max_attempts: 3, base_delay: Duration::from_secs(1) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedRow {
    pub batch: usize,
    pub line: u64,
    pub content: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchLog {
    pub batch: usize,
    pub attempts: usize,
    pub retries: usize,
    pub accepted: usize,
    pub flagged: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub batches: Vec<BatchLog>,
    pub resumed_from_batch: usize,
    pub total_retries: usize,
    pub accepted: usize,
    pub flagged: usize,
    pub rejected: usize,
    pub flag_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    property: LinguisticProperty,
    model_name: String,
    total: usize,
    batch_size: usize,
    batches_done: usize,
    /// Raw assistant replies, one per completed batch.
    transcript: Vec<String>,
    records: Vec<LdspRecord>,
    flagged: Vec<FlaggedRecord>,
    rejected: Vec<RejectedRow>,
    batches: Vec<BatchLog>,
}

impl Checkpoint {
    fn fresh(job: &GenerationJob) -> Self {
        Self {
            property: job.property,
            model_name: job.model_name.clone(),
            total: job.total,
            batch_size: job.batch_size,
            batches_done: 0,
            transcript: Vec::new(),
            records: Vec::new(),
            flagged: Vec::new(),
            rejected: Vec::new(),
            batches: Vec::new(),
        }
    }

    fn matches(&self, job: &GenerationJob) -> bool {
        self.property == job.property
            && self.model_name == job.model_name
            && self.total == job.total
            && self.batch_size == job.batch_size
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationOutcome {
    pub records: Vec<LdspRecord>,
    pub log: GenerationLog,
}

pub fn checkpoint_path(out_dir: &Path, property: LinguisticProperty) -> PathBuf {
    out_dir.join(format!("{}.ckpt.json", property.name()))
}

/// Splits a reply into two-column rows. Markdown fences and a
/// `sentence1,sentence2` style header are skipped; anything else that is not
/// exactly two non-empty fields is rejected.
pub fn parse_batch(content: &str, property: LinguisticProperty, batch: usize) -> (Vec<LdspRecord>, Vec<RejectedRow>) {
    let body: String = content
        .lines()
        .filter(|l| !l.trim_start().starts_with("```"))
        .collect::<Vec<_>>()
        .join("\n");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                rejected.push(RejectedRow {
                    batch,
                    line: e.position().map_or(0, |p| p.line()),
                    content: String::new(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(i as u64 + 1, |p| p.line());
        if row.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && row.iter().any(|f| f.to_ascii_lowercase().contains("sentence")) {
            continue;
        }
        if row.len() == 2 && !row[0].is_empty() && !row[1].is_empty() {
            records.push(LdspRecord { property, sentence1: row[0].to_string(), sentence2: row[1].to_string() });
        } else {
            rejected.push(RejectedRow {
                batch,
                line,
                content: row.iter().collect::<Vec<_>>().join(","),
                reason: format!("expected 2 non-empty fields, found {}", row.len()),
            });
        }
    }
    (records, rejected)
}

fn conversation(job: &GenerationJob, transcript: &[String]) -> Vec<ChatMessage> {
    let mut messages = vec![ChatMessage::user(build_prompt(job))];
    for reply in transcript {
        messages.push(ChatMessage::assistant(reply.clone()));
        messages.push(ChatMessage::user(continuation_prompt(job.batch_size)));
    }
    messages
}

fn write_outputs(out_dir: &Path, ckpt: &Checkpoint) -> Result<(), GenError> {
    let name = ckpt.property.name();
    write_ldsp_csv(&out_dir.join(format!("{name}.csv")), &ckpt.records)?;

    let csv_err = |path: &Path, e: csv::Error| DataError::Io { path: path.to_path_buf(), source: std::io::Error::other(e) };

    let rejected_path = out_dir.join(format!("{name}.rejected.csv"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["batch", "line", "content", "reason"]).map_err(|e| csv_err(&rejected_path, e))?;
    for r in &ckpt.rejected {
        w.write_record([r.batch.to_string(), r.line.to_string(), r.content.clone(), r.reason.clone()])
            .map_err(|e| csv_err(&rejected_path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| csv_err(&rejected_path, e.into_error().into()))?;
    std::fs::write(&rejected_path, bytes).map_err(|e| DataError::io(&rejected_path, e))?;

    let flagged_path = out_dir.join(format!("{name}.flagged.csv"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["sentence1", "sentence2", "reason"]).map_err(|e| csv_err(&flagged_path, e))?;
    for f in &ckpt.flagged {
        w.write_record([&f.record.sentence1, &f.record.sentence2, &f.reason])
            .map_err(|e| csv_err(&flagged_path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| csv_err(&flagged_path, e.into_error().into()))?;
    std::fs::write(&flagged_path, bytes).map_err(|e| DataError::io(&flagged_path, e))?;
    Ok(())
}

fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<(), GenError> {
    let bytes = serde_json::to_vec_pretty(ckpt).map_err(|e| DataError::Json { path: path.to_path_buf(), source: e })?;
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, bytes).map_err(|e| DataError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| DataError::io(path, e))?;
    Ok(())
}

fn load_checkpoint(path: &Path, job: &GenerationJob) -> Result<Option<Checkpoint>, GenError> {
    if !path.exists() {
        return Ok(None);
    }
    let ckpt: Checkpoint = crate::io::read_json(path)?;
    if !ckpt.matches(job) {
        return Err(GenError::InvalidJob(format!(
            "checkpoint {} belongs to a different job; remove it to start over",
            path.display()
        )));
    }
    Ok(Some(ckpt))
}

/// Runs (or resumes) a batched generation job against `endpoint`, writing
/// `<property>.csv`, `<property>.rejected.csv`, `<property>.flagged.csv` and
/// the `<property>.ckpt.json` checkpoint after every batch.
pub fn run_job(job: &GenerationJob, endpoint: &dyn ChatEndpoint, options: &RunOptions) -> Result<GenerationOutcome, GenError> {
    job.validate()?;
    std::fs::create_dir_all(&options.out_dir).map_err(|e| DataError::io(&options.out_dir, e))?;
    let ckpt_path = checkpoint_path(&options.out_dir, job.property);
    let mut ckpt = load_checkpoint(&ckpt_path, job)?.unwrap_or_else(|| Checkpoint::fresh(job));
    let resumed_from_batch = ckpt.batches_done;
    if resumed_from_batch > 0 {
        log::info!("resuming {} at batch {}", job.property, resumed_from_batch + 1);
    }

    for batch in ckpt.batches_done..job.n_batches() {
        let messages = conversation(job, &ckpt.transcript);
        let mut attempts = 0;
        let reply = loop {
            attempts += 1;
            match endpoint.complete(&messages) {
                Ok(reply) => break reply,
                Err(EndpointFailure::Transient(msg)) if attempts < options.max_attempts => {
                    let delay = options.base_delay * 2u32.pow(attempts as u32 - 1);
                    log::warn!("batch {}: attempt {attempts} failed ({msg}); retrying in {delay:?}", batch + 1);
                    std::thread::sleep(delay);
                }
                Err(EndpointFailure::Transient(message) | EndpointFailure::Permanent(message)) => {
                    return Err(GenError::EndpointError { batch: batch + 1, attempts, message });
                }
            }
        };

        let (parsed, rejected) = parse_batch(&reply, job.property, batch + 1);
        let ordering = validate_ordering(parsed, job.property);
        ckpt.batches.push(BatchLog {
            batch: batch + 1,
            attempts,
            retries: attempts - 1,
            accepted: ordering.accepted.len(),
            flagged: ordering.flagged.len(),
            rejected: rejected.len(),
        });
        ckpt.records.extend(ordering.accepted);
        ckpt.flagged.extend(ordering.flagged);
        ckpt.rejected.extend(rejected);
        ckpt.transcript.push(reply);
        ckpt.batches_done = batch + 1;

        save_checkpoint(&ckpt_path, &ckpt)?;
        write_outputs(&options.out_dir, &ckpt)?;
    }
    if ckpt.batches_done == resumed_from_batch {
        write_outputs(&options.out_dir, &ckpt)?;
    }

    let screened = ckpt.records.len() + ckpt.flagged.len();
    let log = GenerationLog {
        total_retries: ckpt.batches.iter().map(|b| b.retries).sum(),
        accepted: ckpt.records.len(),
        flagged: ckpt.flagged.len(),
        rejected: ckpt.rejected.len(),
        flag_rate: if screened == 0 { 0.0 } else { ckpt.flagged.len() as f64 / screened as f64 },
        resumed_from_batch,
        batches: ckpt.batches,
    };
    Ok(GenerationOutcome { records: ckpt.records, log })
}

/// [`run_job`] against the job's HTTP endpoint, keyed from `job.api_key_env`.
pub fn run_job_http(job: &GenerationJob, options: &RunOptions) -> Result<GenerationOutcome, GenError> {
    let endpoint = HttpChatEndpoint::from_env(&job.endpoint_url, &job.model_name, &job.api_key_env)?;
    run_job(job, &endpoint, options)
}
