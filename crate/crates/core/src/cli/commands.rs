use std::collections::{BTreeMap, HashMap};
use std::fmt::Display;
use std::io::{BufRead, Read, Write};
use std::path::{Path, PathBuf};

use futures::stream::{self, StreamExt, TryStreamExt};
use serde::Deserialize;
use serde_json::{json, Value};

use super::config::AppConfig;
use super::{
    AnnotateCmd, CliError, Command, CorpusCmd, DatasetCmd, DialogueInput, EvalCmd, SomCmd,
    TaxonomyCmd, TextMetric,
};
use crate::annotation::{self, AnnotateError, AnnotateOptions, AnnotationJob};
use crate::backend::{BackendError, ChatBackend, HttpBackend, MockBackend, MockRole};
use crate::corpus::{self, CorpusError, SourceKind, SubDialogue, Turn};
use crate::evaluation::{
    self, one_decimal, AccuracyMode, Classifier, ClassifierTask, ClassifyError, HttpClassifier,
    MetricReport, MockClassifier, PredictionPair, SafetyLabel, SkillPrediction,
};
use crate::jsonl;
use crate::som::{self, GuidanceConfig, SomError};
use crate::taxonomy::{SkillMatch, Taxonomy};
use crate::templates::TemplateRegistry;

type Result<T, E = CliError> = std::result::Result<T, E>;

fn data(e: impl Display) -> CliError {
    CliError::Data(e.to_string())
}

/// Data error that names the offending file.
fn in_file<E: Display>(path: &Path) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

fn backend_err(e: BackendError) -> CliError {
    CliError::Backend(e.to_string())
}

fn som_err(e: SomError) -> CliError {
    match e {
        SomError::Backend(b) => backend_err(b),
        SomError::Config(msg) => CliError::Usage(msg),
        other => data(other),
    }
}

struct Ctx {
    config: AppConfig,
    seed: u64,
    mock: bool,
    json: bool,
    taxonomy: Taxonomy,
    registry: TemplateRegistry,
}

pub(super) fn load_taxonomy(config: &AppConfig) -> Result<Taxonomy> {
    match &config.taxonomy_file {
        None => Ok(Taxonomy::builtin()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
            let value: Value = serde_json::from_str(&text).map_err(data)?;
            Taxonomy::from_json(&value).map_err(data)
        }
    }
}

impl Ctx {
    fn new(global: &super::GlobalArgs) -> Result<Self> {
        let config = match &global.config {
            Some(path) => AppConfig::load(path).map_err(CliError::Data)?,
            None => AppConfig::default(),
        };
        let taxonomy = load_taxonomy(&config)?;
        let mut registry = TemplateRegistry::builtin();
        for path in &config.template_files {
            registry.load_file(path).map_err(data)?;
        }
        Ok(Ctx {
            seed: global.seed.unwrap_or(config.seed),
            mock: global.mock,
            json: global.json,
            config,
            taxonomy,
            registry,
        })
    }

    /// Prints `value` as one sorted-key line in JSON mode, `text` otherwise.
    fn emit(&self, text: impl FnOnce() -> String, value: &Value) {
        let out = if self.json { jsonl::to_line(value) } else { text() };
        println!("{out}");
    }

    fn chat_backend(&self, role: MockRole) -> Result<Box<dyn ChatBackend>> {
        if self.mock {
            return Ok(Box::new(MockBackend::new(role, &self.taxonomy)));
        }
        let cfg = match role {
            MockRole::Annotator => &self.config.annotator,
            MockRole::Planner => &self.config.planner,
            MockRole::Responder => &self.config.responder,
        };
        cfg.validate().map_err(CliError::Usage)?;
        Ok(Box::new(HttpBackend::new(cfg.clone()).map_err(backend_err)?))
    }

    fn write_reports(&self, name: &str, reports: &[MetricReport]) -> Result<()> {
        if let Some(dir) = &self.config.paths.reports {
            std::fs::create_dir_all(dir).map_err(data)?;
            jsonl::write_lines(&dir.join(format!("{name}.jsonl")), reports).map_err(data)?;
        }
        Ok(())
    }
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Backend(e.to_string()))
}

fn required(path: Option<PathBuf>, fallback: &Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    path.or_else(|| fallback.clone())
        .ok_or_else(|| CliError::Usage(format!("{flag} is required (or set it in the config paths)")))
}

/// `dir/name.jsonl` -> `dir/name.<suffix>.jsonl`
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.jsonl"))
}

pub(super) fn dispatch(cli: super::Cli) -> Result<()> {
    let ctx = Ctx::new(&cli.global)?;
    if cli.global.version {
        println!("{}", super::version_string(Some(&ctx.config)));
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(CliError::Usage("no command given; see --help".into()));
    };
    match command {
        Command::Taxonomy(cmd) => taxonomy(&ctx, cmd),
        Command::Corpus(cmd) => corpus_cmd(&ctx, cmd),
        Command::Annotate(cmd) => annotate(&ctx, cmd),
        Command::Dataset(cmd) => dataset(&ctx, cmd),
        Command::Som(cmd) => som_cmd(&ctx, cmd),
        Command::Eval(cmd) => eval(&ctx, cmd),
    }
}

fn match_json(m: &SkillMatch) -> Value {
    json!({
        "resolution": m.resolution.as_str(),
        "skill": m.name(),
        "category": m.skill.category.map(|c| c.display_name()),
    })
}

fn taxonomy(ctx: &Ctx, cmd: TaxonomyCmd) -> Result<()> {
    match cmd {
        TaxonomyCmd::List => {
            let text = || {
                let mut out = Vec::new();
                for category in crate::taxonomy::SkillCategory::ALL {
                    out.push(category.display_name().to_string());
                    out.extend(ctx.taxonomy.in_category(category).map(|s| format!("  - {}", s.canonical_name)));
                }
                let extended: Vec<_> = ctx.taxonomy.skills().iter().filter(|s| s.extended).collect();
                if !extended.is_empty() {
                    out.push("Extended".to_string());
                    out.extend(extended.iter().map(|s| format!("  - {}", s.canonical_name)));
                }
                out.join("\n")
            };
            ctx.emit(text, &ctx.taxonomy.to_json());
        }
        TaxonomyCmd::Resolve { name } => {
            let m = ctx.taxonomy.resolve(&name).map_err(data)?;
            let text = || {
                let category = m.skill.category.map_or("-", |c| c.display_name());
                format!("{}\t{}\t{}", m.name(), m.resolution.as_str(), category)
            };
            ctx.emit(text, &match_json(&m));
        }
    }
    Ok(())
}

fn corpus_cmd(ctx: &Ctx, cmd: CorpusCmd) -> Result<()> {
    let split = &ctx.config.split;
    match cmd {
        CorpusCmd::Split {
            input,
            output,
            stride,
            min_turns,
        } => {
            let input = required(input, &ctx.config.paths.corpus, "--input")?;
            let dialogues = corpus::load_corpus(&input).map_err(in_file(&input))?;
            let (stride, min_turns) = (stride.unwrap_or(split.stride_pairs), min_turns.unwrap_or(split.min_turns));
            let mut subs = Vec::new();
            let mut skipped = 0;
            for d in &dialogues {
                match corpus::split_one_sided(d, stride, min_turns) {
                    Ok(s) => subs.extend(s),
                    Err(CorpusError::TooShort { .. }) => skipped += 1,
                    Err(e @ CorpusError::InvalidStride) => return Err(CliError::Usage(e.to_string())),
                    Err(e) => return Err(data(e)),
                }
            }
            jsonl::write_lines(&output, &subs).map_err(data)?;
            let summary = json!({"dialogues": dialogues.len(), "subdialogues": subs.len(), "skipped": skipped});
            ctx.emit(
                || format!("{} sub-dialogues from {} dialogues ({} too short)", subs.len(), dialogues.len(), skipped),
                &summary,
            );
        }
        CorpusCmd::Sample {
            input,
            output,
            total,
            proportions,
        } => {
            let groups = corpus::group_by_source(corpus::load_subdialogues(&input).map_err(in_file(&input))?);
            let proportions: BTreeMap<SourceKind, f64> = match proportions {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(data)?;
                    serde_json::from_str(&text).map_err(data)?
                }
                None => corpus::uniform_proportions(groups.keys()),
            };
            let sample = corpus::proportional_sample(&groups, &proportions, total, ctx.seed).map_err(data)?;
            jsonl::write_lines(&output, &sample).map_err(data)?;
            ctx.emit(|| format!("sampled {} sub-dialogues", sample.len()), &json!({"sampled": sample.len()}));
        }
        CorpusCmd::Stats {
            input,
            stride,
            min_turns,
        } => {
            let input = required(input, &ctx.config.paths.corpus, "--input")?;
            let dialogues = corpus::load_corpus(&input).map_err(in_file(&input))?;
            let stats = corpus::corpus_stats(
                &dialogues,
                stride.unwrap_or(split.stride_pairs),
                min_turns.unwrap_or(split.min_turns),
            );
            let value = serde_json::to_value(&stats).map_err(data)?;
            let text = || {
                let mut lines = vec![format!("dialogues: {}", stats.dialogue_count)];
                for (source, n) in &stats.dialogues_per_source {
                    let subs = stats.subdialogues_per_source.get(source).copied().unwrap_or(0);
                    lines.push(format!("  {source}: {n} dialogues, {subs} sub-dialogues"));
                }
                lines.join("\n")
            };
            ctx.emit(text, &value);
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct MockOutput {
    id: String,
    output: String,
}

fn annotate(ctx: &Ctx, cmd: AnnotateCmd) -> Result<()> {
    let AnnotateCmd::Run {
        input,
        output,
        failures,
        mock_outputs,
        strict,
        concurrency,
    } = cmd;
    let output = required(output, &ctx.config.paths.dataset, "--output")?;
    let failures = failures.unwrap_or_else(|| sibling(&output, "failures"));
    let subs: Vec<SubDialogue> = corpus::load_subdialogues(&input).map_err(in_file(&input))?;
    let jobs = subs
        .iter()
        .map(|s| AnnotationJob::from_subdialogue(s, &ctx.registry, ctx.seed))
        .collect::<Result<Vec<_>, _>>()
        .map_err(data)?;

    let backend: Box<dyn ChatBackend> = match (ctx.mock, mock_outputs) {
        (true, fixtures) => {
            let fixtures: HashMap<String, String> = match fixtures {
                Some(path) => jsonl::read_lines::<MockOutput>(&path).map_err(in_file(&path))?
                    .into_iter()
                    .map(|m| (m.id, m.output))
                    .collect(),
                None => HashMap::new(),
            };
            Box::new(MockBackend::new(MockRole::Annotator, &ctx.taxonomy).with_fixtures(fixtures))
        }
        (false, Some(_)) => return Err(CliError::Usage("--mock-outputs requires --mock".into())),
        (false, None) => ctx.chat_backend(MockRole::Annotator)?,
    };
    let options = AnnotateOptions {
        max_concurrency: concurrency.unwrap_or(ctx.config.annotator.max_concurrency),
        strict,
    };
    let outcome = runtime()?
        .block_on(annotation::annotate_corpus(&jobs, backend.as_ref(), &ctx.taxonomy, options))
        .map_err(|e| match e {
            AnnotateError::Auth(b) => backend_err(b),
            AnnotateError::InvalidOptions(m) => CliError::Usage(m),
        })?;
    annotation::save_dataset(&outcome.entries, &output).map_err(data)?;
    jsonl::write_lines(&failures, &outcome.failures).map_err(data)?;
    let summary = json!({
        "inputs": jobs.len(),
        "entries": outcome.entries.len(),
        "failures": outcome.failures.len(),
    });
    ctx.emit(
        || {
            format!(
                "{} inputs: {} entries, {} failures (log: {})",
                jobs.len(),
                outcome.entries.len(),
                outcome.failures.len(),
                failures.display()
            )
        },
        &summary,
    );
    Ok(())
}

fn dataset(ctx: &Ctx, cmd: DatasetCmd) -> Result<()> {
    match cmd {
        DatasetCmd::Split {
            input,
            train,
            test,
            test_fraction,
        } => {
            let input = required(input, &ctx.config.paths.dataset, "--input")?;
            let entries = annotation::load_dataset(&input, &ctx.taxonomy).map_err(in_file(&input))?;
            let (train_set, test_set) = annotation::train_test_split(entries, test_fraction, ctx.seed)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let train = train.unwrap_or_else(|| sibling(&input, "train"));
            let test = test.unwrap_or_else(|| sibling(&input, "test"));
            annotation::save_dataset(&train_set, &train).map_err(data)?;
            annotation::save_dataset(&test_set, &test).map_err(data)?;
            ctx.emit(
                || format!("train: {} -> {}\ntest: {} -> {}", train_set.len(), train.display(), test_set.len(), test.display()),
                &json!({"train": train_set.len(), "test": test_set.len()}),
            );
        }
        DatasetCmd::ExportTrain { input, output } => {
            let entries = annotation::load_dataset(&input, &ctx.taxonomy).map_err(in_file(&input))?;
            let records =
                annotation::export_training_records(&entries, &ctx.registry, ctx.seed).map_err(data)?;
            jsonl::write_lines(&output, &records).map_err(data)?;
            ctx.emit(|| format!("exported {} records", records.len()), &json!({"records": records.len()}));
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct DialogueDoc {
    #[serde(alias = "turns")]
    context: Vec<Turn>,
    #[serde(default)]
    social_context_text: Option<String>,
    #[serde(default)]
    source: Option<SourceKind>,
    #[serde(default)]
    social_context: BTreeMap<String, String>,
}

fn read_dialogue(ctx: &Ctx, input: &DialogueInput) -> Result<(Option<String>, Vec<Turn>)> {
    let mut text = String::new();
    match input.input.as_deref() {
        Some(p) if p != Path::new("-") => {
            text = std::fs::read_to_string(p).map_err(|e| data(format!("{}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin().read_to_string(&mut text).map_err(data)?;
        }
    }
    let doc: DialogueDoc = serde_json::from_str(&text).map_err(data)?;
    if input.no_context {
        return Ok((None, doc.context));
    }
    let social = match (doc.social_context_text, doc.source) {
        (Some(t), _) => Some(t),
        (None, Some(source)) if !doc.social_context.is_empty() => Some(
            ctx.registry
                .render_social_context(source, &doc.social_context, ctx.seed, "inference")
                .map_err(data)?
                .text,
        ),
        _ => None,
    };
    Ok((social, doc.context))
}

fn guidance(ctx: &Ctx) -> Result<&GuidanceConfig> {
    ctx.config.guidance.validate().map_err(som_err)?;
    Ok(&ctx.config.guidance)
}

fn som_cmd(ctx: &Ctx, cmd: SomCmd) -> Result<()> {
    let rt = runtime()?;
    match cmd {
        SomCmd::Infer(input) => {
            let (social, context) = read_dialogue(ctx, &input)?;
            let planner = ctx.chat_backend(MockRole::Planner)?;
            let result = rt
                .block_on(som::infer_som(planner.as_ref(), social.as_deref(), &context, &ctx.taxonomy))
                .map_err(som_err)?;
            println!("{}", jsonl::to_line(&result.to_json()));
        }
        SomCmd::Respond { dialogue, baseline } => {
            let cfg = guidance(ctx)?;
            let (social, context) = read_dialogue(ctx, &dialogue)?;
            let planner = if baseline { None } else { Some(ctx.chat_backend(MockRole::Planner)?) };
            let responder = ctx.chat_backend(MockRole::Responder)?;
            let out = rt
                .block_on(som::guided_respond(
                    cfg,
                    planner.as_deref(),
                    responder.as_ref(),
                    social.as_deref(),
                    &context,
                    &ctx.taxonomy,
                ))
                .map_err(som_err)?;
            println!("{}", jsonl::to_line(&out.to_json()));
        }
        SomCmd::Chat { context, baseline } => {
            let cfg = guidance(ctx)?;
            let planner = if baseline { None } else { Some(ctx.chat_backend(MockRole::Planner)?) };
            let responder = ctx.chat_backend(MockRole::Responder)?;
            let mut turns: Vec<Turn> = Vec::new();
            let stdout = std::io::stdout();
            for line in std::io::stdin().lock().lines() {
                let line = line.map_err(data)?;
                let line = line.trim();
                if line == "/quit" {
                    break;
                }
                if line.is_empty() {
                    continue;
                }
                turns.push(Turn::new("User", line));
                let out = rt
                    .block_on(som::guided_respond(
                        cfg,
                        planner.as_deref(),
                        responder.as_ref(),
                        context.as_deref(),
                        &turns,
                        &ctx.taxonomy,
                    ))
                    .map_err(som_err)?;
                let mut handle = stdout.lock();
                if ctx.json {
                    writeln!(handle, "{}", jsonl::to_line(&out.to_json())).map_err(data)?;
                } else {
                    let tag = out.som.as_ref().map_or_else(|| "baseline".to_string(), |s| s.skill_names().join(", "));
                    writeln!(handle, "[{tag}] {}", out.response).map_err(data)?;
                }
                turns.push(Turn::new(cfg.responder_name.as_str(), out.response));
            }
        }
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn resolve(self, taxonomy: &Taxonomy) -> Result<Vec<SkillMatch>> {
        let names = match self {
            OneOrMany::One(s) => vec![s],
            OneOrMany::Many(v) => v,
        };
        names.iter().map(|n| taxonomy.resolve(n).map_err(data)).collect()
    }
}

#[derive(Deserialize)]
struct PredictionRow {
    predicted: OneOrMany,
    gold: OneOrMany,
}

#[derive(Deserialize)]
struct SafetyRow {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    text: Option<String>,
}

#[derive(Deserialize)]
struct LabelFixture {
    text: String,
    label: String,
}

fn classify_safety(ctx: &Ctx, rows: Vec<SafetyRow>, mock_labels: Option<PathBuf>) -> Result<Vec<SafetyLabel>> {
    let classifier: Box<dyn Classifier> = if ctx.mock {
        let fixtures = match mock_labels {
            Some(path) => jsonl::read_lines::<LabelFixture>(&path).map_err(in_file(&path))?
                .into_iter()
                .map(|f| (f.text, f.label))
                .collect(),
            None => HashMap::new(),
        };
        Box::new(MockClassifier::new(fixtures).with_fallback("casual"))
    } else {
        Box::new(HttpClassifier::new(ctx.config.classifier.clone()).map_err(|e| CliError::Backend(e.to_string()))?)
    };
    let classifier = classifier.as_ref();
    let limit = ctx.config.classifier.max_concurrency.max(1);
    runtime()?.block_on(
        stream::iter(rows)
            .map(|row| async move {
                let label = match (row.label, row.text) {
                    (Some(label), _) => label,
                    (None, Some(text)) => match classifier.classify(ClassifierTask::Safety, &text).await {
                        Ok(label) => label,
                        Err(ClassifyError::UnknownLabel { .. }) => "degenerate".to_string(),
                        Err(e) => return Err(CliError::Backend(e.to_string())),
                    },
                    (None, None) => return Err(data("safety row needs \"label\" or \"text\"")),
                };
                label.parse::<SafetyLabel>().map_err(data)
            })
            .buffered(limit)
            .try_collect(),
    )
}

fn eval(ctx: &Ctx, cmd: EvalCmd) -> Result<()> {
    let metrics = &ctx.config.metrics;
    match cmd {
        EvalCmd::Skills { input, exact } => {
            let rows: Vec<PredictionRow> = jsonl::read_lines(&input).map_err(in_file(&input))?;
            let preds = rows
                .into_iter()
                .map(|r| {
                    Ok(SkillPrediction {
                        predicted: r.predicted.resolve(&ctx.taxonomy)?,
                        gold: r.gold.resolve(&ctx.taxonomy)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mode = if exact { AccuracyMode::Exact } else { AccuracyMode::AnyMatch };
            let acc: f64 = evaluation::skill_accuracy(&preds, mode).map_err(data)?;
            let report = MetricReport::new("skill_accuracy", acc, json!({"mode": mode}), preds.len());
            ctx.emit(|| format!("skill_accuracy: {:.1}", one_decimal(acc)), &serde_json::to_value(&report).map_err(data)?);
            ctx.write_reports("skills", &[report])?;
        }
        EvalCmd::Text {
            input,
            metric,
            smoothing,
            beta,
        } => {
            let pairs: Vec<PredictionPair> = jsonl::read_lines(&input).map_err(in_file(&input))?;
            let smoothing = smoothing || metrics.bleu_smoothing;
            let beta = beta.unwrap_or(metrics.rouge_beta);
            let wanted = |m: TextMetric| metric == TextMetric::All || metric == m;
            let mut reports = Vec::new();
            for (m, n) in [(TextMetric::Bleu1, 1), (TextMetric::Bleu2, 2), (TextMetric::Bleu4, 4)] {
                if wanted(m) {
                    let v: f64 = evaluation::bleu(&pairs, n, smoothing).map_err(data)?;
                    reports.push(MetricReport::new(format!("bleu{n}"), v, json!({"smoothing": smoothing}), pairs.len()));
                }
            }
            if wanted(TextMetric::RougeL) {
                let v: f64 = evaluation::rouge_l(&pairs, beta).map_err(data)?;
                reports.push(MetricReport::new("rouge_l", v, json!({"beta": beta}), pairs.len()));
            }
            for r in &reports {
                ctx.emit(|| format!("{}: {:.4}", r.metric, r.value), &serde_json::to_value(r).map_err(data)?);
            }
            ctx.write_reports("text", &reports)?;
        }
        EvalCmd::Distribution { input, top_k } => {
            let entries = annotation::load_dataset(&input, &ctx.taxonomy).map_err(in_file(&input))?;
            let shares: Vec<evaluation::SkillShare<f64>> =
                evaluation::skill_distribution(&entries, top_k).map_err(data)?;
            let total: usize = entries.iter().map(|e| e.annotations.len()).sum();
            let reports: Vec<MetricReport> = shares
                .iter()
                .map(|s| MetricReport::new("skill_share", s.percentage, json!({"skill": s.skill, "count": s.count}), total))
                .collect();
            for (s, r) in shares.iter().zip(&reports) {
                ctx.emit(|| format!("{:<40} {:>5.1}%", s.skill, one_decimal(s.percentage)), &serde_json::to_value(r).map_err(data)?);
            }
            ctx.write_reports("distribution", &reports)?;
        }
        EvalCmd::Agreement { input, level } => {
            let level = level.unwrap_or(metrics.alpha_level);
            let matrices = evaluation::load_ratings(&input, level).map_err(in_file(&input))?;
            let mut reports = Vec::new();
            for (criterion, m) in &matrices {
                let r: evaluation::AlphaReport<f64> = evaluation::krippendorff_alpha(m).map_err(data)?;
                reports.push(MetricReport::new(
                    "krippendorff_alpha",
                    r.alpha,
                    json!({"criterion": criterion, "level": level, "by_convention": r.by_convention}),
                    r.n,
                ));
            }
            for r in &reports {
                ctx.emit(
                    || format!("{}: alpha = {:.3} (n = {})", r.config["criterion"].as_str().unwrap_or(""), r.value, r.n),
                    &serde_json::to_value(r).map_err(data)?,
                );
            }
            ctx.write_reports("agreement", &reports)?;
        }
        EvalCmd::Safety { input, mock_labels } => {
            let rows: Vec<SafetyRow> = jsonl::read_lines(&input).map_err(in_file(&input))?;
            let labels = classify_safety(ctx, rows, mock_labels)?;
            let r: evaluation::SafetyReport<f64> = evaluation::safety_ratio(&labels).map_err(data)?;
            let reports: Vec<MetricReport> = ["casual", "caution", "intervention", "degeneration"]
                .iter()
                .zip(r.components())
                .map(|(name, v)| MetricReport::new(format!("safety_{name}"), v, json!({}), r.n))
                .collect();
            let text = || {
                reports
                    .iter()
                    .map(|m| format!("{} {:.1}", m.metric.trim_start_matches("safety_"), one_decimal(m.value)))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            if ctx.json {
                for m in &reports {
                    println!("{}", m.to_line());
                }
            } else {
                println!("{}", text());
            }
            ctx.write_reports("safety", &reports)?;
        }
        EvalCmd::H2h { input } => {
            let records = evaluation::load_preferences(&input).map_err(in_file(&input))?;
            let r: evaluation::HeadToHeadReport<f64> = evaluation::head_to_head(&records).map_err(data)?;
            let mut reports = Vec::new();
            for t in &r.criteria {
                let config = json!({
                    "criterion": t.criterion,
                    "votes_a": t.votes_a,
                    "votes_b": t.votes_b,
                    "definite_a": t.definite_a,
                    "slight_a": t.slight_a,
                    "definite_b": t.definite_b,
                    "slight_b": t.slight_b,
                });
                let n = t.votes_a + t.votes_b;
                reports.push(MetricReport::new("h2h_win_a", t.win_a, config.clone(), n));
                reports.push(MetricReport::new("h2h_win_b", t.win_b, config, n));
            }
            if ctx.json {
                for m in &reports {
                    println!("{}", m.to_line());
                }
            } else {
                for t in &r.criteria {
                    let name = serde_json::to_value(t.criterion).map_err(data)?;
                    println!(
                        "{:<14} A {:>5.1}  B {:>5.1}  (n = {})",
                        name.as_str().unwrap_or_default(),
                        one_decimal(t.win_a),
                        one_decimal(t.win_b),
                        t.votes_a + t.votes_b
                    );
                }
            }
            ctx.write_reports("h2h", &reports)?;
        }
    }
    Ok(())
}
