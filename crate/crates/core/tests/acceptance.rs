//! Acceptance gate: one check per criterion, one line of output each.
//! Exits non-zero if any check fails.

mod oracle;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skillmind::annotation::{annotate_corpus, build_annotation_prompt, export_training_records, train_test_split, AnnotateOptions, AnnotationJob};
use skillmind::backend::{ChatBackend, ChatMessage, MockBackend, MockRole, Role};
use skillmind::corpus::{split_one_sided, Dialogue, SourceKind, SubDialogue, Turn};
use skillmind::evaluation::{
    bleu, head_to_head, krippendorff_alpha, one_decimal, rouge_l, safety_ratio, Choice, Criterion, Level,
    PredictionPair, PreferenceRecord, RatingMatrix, SafetyLabel, Strength,
};
use skillmind::som::{format_som_output, guided_respond, parse_som_output, GuidanceConfig, SomResult, SEPARATOR};
use skillmind::taxonomy::{Resolution, SkillCategory};
use skillmind::templates::SourceTemplates;
use skillmind::{builtin_registry, builtin_taxonomy};

type Check = Result<String, String>;
type Gate = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn block_on<F: std::future::Future>(f: F) -> F::Output {
    tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .unwrap()
        .block_on(f)
}

const SECTION_NAMES: [(&str, &[&str]); 5] = [
    (
        "interpersonal",
        &[
            "Empathy", "Personal Background", "Persona Recall", "Self-Disclosure", "Negotiation",
            "Conflict Resolution", "Conflict Avoidance", "Persuasion", "Commonsense Understanding",
            "Cultural Sensitivity", "Ethics", "Harmlessness", "Avoiding Social Bias", "Helpfulness",
            "Mentoring", "Image Commenting", "Image Sharing",
        ],
    ),
    ("memory", &["Memory Recall", "Knowledge Sharing", "Knowledge Acquisition", "Knowledge Searching"]),
    (
        "cognitive",
        &["Critical Thinking", "Logical Thinking", "Creative Problem Solving", "Factual Problem Solving", "Decision-Making"],
    ),
    (
        "communication",
        &[
            "Clarification", "Confirmation", "Rephrasing", "Echoing", "Topic Transition", "Rhetoric",
            "Active Listening", "Reflective Listening", "Immediate Response",
        ],
    ),
    ("task", &["Recommendation", "Task Execution", "Urgency Recognition"]),
];

fn taxonomy_fidelity() -> Check {
    let t = builtin_taxonomy();
    let canonical = t.canonical_skills().count();
    ensure(canonical == 38, || format!("{canonical} canonical skills"))?;
    let counts: Vec<usize> = SkillCategory::ALL.iter().map(|&c| t.in_category(c).count()).collect();
    ensure(counts == [17, 4, 5, 9, 3], || format!("category counts {counts:?}"))?;
    for (category, (label, names)) in SkillCategory::ALL.iter().zip(SECTION_NAMES) {
        for name in names {
            let m = t.resolve(name).map_err(|e| format!("{name}: {e}"))?;
            ensure(m.resolution == Resolution::Canonical, || format!("{name} resolved {:?}", m.resolution))?;
            ensure(m.skill.category == Some(*category), || format!("{name} not in {label}"))?;
        }
    }
    let fb = t.resolve("feedback giving").map_err(|e| e.to_string())?;
    ensure(fb.resolution == Resolution::OpenSet, || format!("feedback giving resolved {:?}", fb.resolution))?;
    Ok(format!("38 skills, counts {counts:?}, feedback giving open-set"))
}

fn alternating(id: &str, n: usize) -> Dialogue {
    Dialogue {
        id: id.into(),
        source: SourceKind::Soda,
        social_context: BTreeMap::new(),
        turns: (0..n)
            .map(|i| Turn::new(if i % 2 == 0 { "A" } else { "B" }, format!("turn {}", i + 1)))
            .collect(),
        golden_next: None,
    }
}

fn splitting() -> Check {
    let subs = split_one_sided(&alternating("d", 9), 2, 4).map_err(|e| e.to_string())?;
    let lens: Vec<usize> = subs.iter().map(|s| s.context.len()).collect();
    ensure(lens == [4, 8], || format!("context lengths {lens:?}"))?;
    let next: Vec<&str> = subs.iter().map(|s| s.next_response.text.as_str()).collect();
    ensure(next == ["turn 5", "turn 9"], || format!("next responses {next:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut emitted = 0usize;
    for k in 0..1000 {
        let n = rng.random_range(0..40);
        let stride = rng.random_range(1..5);
        let d = alternating(&format!("r{k}"), n);
        let Ok(subs) = split_one_sided(&d, stride, 4) else {
            ensure(n <= 4, || format!("{n}-turn dialogue produced nothing"))?;
            continue;
        };
        for s in &subs {
            let len = s.context.len();
            ensure(len >= 4 && len < n, || format!("context of {len} turns from {n}"))?;
            ensure(s.next_response == d.turns[len], || format!("wrong next turn for {}", s.id))?;
        }
        emitted += subs.len();
    }
    Ok(format!("[4, 8] on 9 turns; {emitted} random contexts all >= 4"))
}

fn read_fixture(rel: &str) -> Result<String, String> {
    std::fs::read_to_string(fixtures().join(rel)).map_err(|e| format!("{rel}: {e}"))
}

fn template_variants(source: SourceKind, group: Option<&str>) -> Result<Vec<String>, String> {
    let registry = builtin_registry();
    match registry.get(source) {
        SourceTemplates::Groups(sets) => sets
            .iter()
            .find(|s| s.group.as_deref() == group)
            .map(|s| s.variants.clone())
            .ok_or_else(|| format!("{source:?} has no group {group:?}")),
        SourceTemplates::PassThrough => Err(format!("{source:?} has no templates")),
    }
}

fn prompt_fidelity() -> Check {
    let turns = vec![
        Turn::new("Sawyer", "Hey Gregg, are you free to go grocery shopping tonight?"),
        Turn::new("Gregg", "Sure. Do we have a list yet?"),
        Turn::new("Sawyer", "Not really. I was thinking pasta and some vegetables."),
        Turn::new("Gregg", "").with_image("two pizzas on a table"),
    ];
    let next = Turn::new("Sawyer", "Ha, pizza works too. Let's grab some salad so we eat something green.");
    let msgs = build_annotation_prompt("Sawyer and Gregg are roommates planning dinner for the week.", &turns, &next)
        .map_err(|e| e.to_string())?;
    ensure(msgs.len() == 2 && msgs[0].role == Role::System && msgs[1].role == Role::User, || "message roles".into())?;
    ensure(msgs[0].content == read_fixture("prompt/system.txt")?, || "system message differs from fixture".into())?;
    ensure(msgs[1].content == read_fixture("prompt/user.txt")?, || "user message differs from fixture".into())?;
    for lit in ["[Sharing Image]", "[Skill Collections]", "form of a JSON list"] {
        ensure(msgs[1].content.contains(lit), || format!("prompt lacks {lit}"))?;
    }

    let cases = [
        ("prosocial", SourceKind::Prosocial, None),
        ("stark_first_round", SourceKind::Stark, Some("first_round")),
        ("stark_nth_round", SourceKind::Stark, Some("nth_round")),
        ("cactus", SourceKind::Cactus, None),
        ("syn_personachat", SourceKind::SynPersonachat, None),
        ("casino_sentence", SourceKind::Casino, Some("sentence")),
        ("casino_structured", SourceKind::Casino, Some("structured")),
        ("pearl", SourceKind::Pearl, None),
        ("persuasion_for_good", SourceKind::PersuasionForGood, None),
        ("empathetic_dialogues", SourceKind::EmpatheticDialogues, None),
    ];
    let mut total = 0;
    for (file, source, group) in cases {
        let raw = read_fixture(&format!("templates/{file}.txt"))?;
        let expected: Vec<&str> = raw.strip_suffix('\n').unwrap_or(&raw).split("\n%%\n").collect();
        let actual = template_variants(source, group)?;
        ensure(actual.len() == expected.len(), || {
            format!("{file}: {} variants, fixture has {}", actual.len(), expected.len())
        })?;
        for (i, (a, e)) in actual.iter().zip(&expected).enumerate() {
            ensure(a == e, || format!("{file} variant {i} differs"))?;
        }
        total += actual.len();
    }
    Ok(format!("prompt and {total} template variants match fixtures"))
}

const VOCAB: [&str; 14] = [
    "the", "cat", "sat", "on", "mat", "a", "dog", "ran", "home", "Home", "!", "?", "it's", "big,",
];

fn random_sentence(rng: &mut ChaCha8Rng, min: usize, max: usize) -> String {
    let n = rng.random_range(min..=max);
    (0..n).map(|_| *VOCAB.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn metric_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for corpus in 0..50 {
        let size = rng.random_range(1..=10);
        let raw: Vec<(String, Vec<String>)> = (0..size)
            .map(|_| {
                let refs = rng.random_range(1..=3);
                (random_sentence(&mut rng, 1, 12), (0..refs).map(|_| random_sentence(&mut rng, 1, 12)).collect())
            })
            .collect();
        let pairs: Vec<PredictionPair> = raw.iter().map(|(h, r)| PredictionPair::new(h.clone(), r.clone())).collect();
        for n in [1, 2, 4] {
            for smoothing in [false, true] {
                let got: f64 = bleu(&pairs, n, smoothing).map_err(|e| e.to_string())?;
                let want = oracle::bleu(&raw, n, smoothing);
                worst = worst.max((got - want).abs());
                ensure((got - want).abs() <= 1e-9, || {
                    format!("corpus {corpus} BLEU-{n} smoothing={smoothing}: {got} vs oracle {want}")
                })?;
            }
        }
        let got: f64 = rouge_l(&pairs, 1.0).map_err(|e| e.to_string())?;
        let want = oracle::rouge_l(&raw, 1.0);
        worst = worst.max((got - want).abs());
        ensure((got - want).abs() <= 1e-9, || format!("corpus {corpus} ROUGE-L: {got} vs oracle {want}"))?;

        let same: Vec<PredictionPair> = (0..size)
            .map(|_| {
                let s = random_sentence(&mut rng, 4, 12);
                PredictionPair::new(s.clone(), vec![s])
            })
            .collect();
        for n in [1, 2, 4] {
            let b: f64 = bleu(&same, n, false).map_err(|e| e.to_string())?;
            ensure(b == 1.0, || format!("identical corpus BLEU-{n} = {b}"))?;
        }
        let r: f64 = rouge_l(&same, 1.0).map_err(|e| e.to_string())?;
        ensure(r == 1.0, || format!("identical corpus ROUGE-L = {r}"))?;
    }
    Ok(format!("50 corpora, max |diff| {worst:.2e}; identical corpora score 1.0"))
}

fn alpha_oracle() -> Check {
    let levels = [
        (Level::Nominal, oracle::Metric::Nominal),
        (Level::Ordinal, oracle::Metric::Ordinal),
        (Level::Interval, oracle::Metric::Interval),
    ];
    let perfect = vec![vec![Some(1), Some(3), Some(2), None], vec![Some(1), Some(3), Some(2), Some(5)], vec![None, Some(3), Some(2), Some(5)]];
    for (level, _) in levels {
        let a: f64 = krippendorff_alpha(&RatingMatrix::from_rows(&perfect, level)).map_err(|e| e.to_string())?.alpha;
        ensure(a == 1.0, || format!("perfect agreement at {level:?} gave {a}"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    let mut worst = 0.0f64;
    while checked < 20 {
        let raters = rng.random_range(2..=5);
        let items = rng.random_range(2..=10);
        let top = rng.random_range(2..=5);
        let rows: Vec<Vec<Option<i64>>> = (0..raters)
            .map(|_| {
                (0..items)
                    .map(|_| if rng.random_bool(0.2) { None } else { Some(rng.random_range(1..=top)) })
                    .collect()
            })
            .collect();
        let units: Vec<Vec<i64>> = (0..items)
            .map(|i| rows.iter().filter_map(|r| r[i]).collect())
            .collect();
        if oracle::alpha(&units, oracle::Metric::Nominal).is_none() {
            continue;
        }
        for (level, metric) in levels {
            let got: f64 = krippendorff_alpha(&RatingMatrix::from_rows(&rows, level)).map_err(|e| e.to_string())?.alpha;
            let want = oracle::alpha(&units, metric).unwrap();
            worst = worst.max((got - want).abs());
            ensure((got - want).abs() <= 1e-9, || format!("matrix {checked} {level:?}: {got} vs oracle {want}"))?;
        }
        checked += 1;
    }
    Ok(format!("perfect agreement = 1; 20 matrices x 3 levels, max |diff| {worst:.2e}"))
}

const WORDS: [&str; 10] = ["I", "want", "to", "gently", "ask", "about", "her", "plans", "so", "today"];
const OPEN_NAMES: [&str; 4] = ["Feedback Giving", "Gift Giving", "Humor", "Small Talk"];

fn round_trip() -> Check {
    let t = builtin_taxonomy();
    let canonical: Vec<String> = t.canonical_skills().map(|s| s.canonical_name.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..200 {
        let n = rng.random_range(1..=25);
        let explanation = (0..n).map(|_| *WORDS.choose(&mut rng).unwrap()).collect::<Vec<_>>().join(" ") + ".";
        let k = rng.random_range(1..=4);
        let skills = (0..k)
            .map(|_| {
                let name = if rng.random_bool(0.2) {
                    OPEN_NAMES.choose(&mut rng).unwrap().to_string()
                } else {
                    canonical.choose(&mut rng).unwrap().clone()
                };
                t.resolve(&name).map_err(|e| e.to_string())
            })
            .collect::<Result<Vec<_>, _>>()?;
        let som = SomResult::new(&explanation, skills).map_err(|e| e.to_string())?;
        let back = parse_som_output(&format_som_output(&som), &t).map_err(|e| format!("case {i}: {e}"))?;
        ensure(back == som, || format!("case {i}: {som:?} came back as {back:?}"))?;
    }

    let subs: Vec<SubDialogue> = (0..30)
        .flat_map(|k| split_one_sided(&alternating(&format!("x{k}"), 5 + k % 9), 1, 4).unwrap())
        .collect();
    let registry = builtin_registry();
    let jobs: Vec<AnnotationJob> = subs
        .iter()
        .map(|s| AnnotationJob::from_subdialogue(s, &registry, 3).unwrap())
        .collect();
    let backend = MockBackend::new(MockRole::Annotator, &t);
    let outcome = block_on(annotate_corpus(&jobs, &backend, &t, AnnotateOptions::default())).map_err(|e| e.to_string())?;
    let (train, _) = train_test_split(outcome.entries, 0.1, 3).map_err(|e| e.to_string())?;
    let records = export_training_records(&train, &registry, 3).map_err(|e| e.to_string())?;
    let needle = format!(" {SEPARATOR} ");
    for r in &records {
        let hits = r.target.matches(&needle).count();
        ensure(hits == 1, || format!("target has {hits} separators: {}", r.target))?;
    }
    Ok(format!("200 round-trips; {} export targets with one separator", records.len()))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_skillmind"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

const MALFORMED: [&str; 10] = [
    "not json at all",
    "{\"skill\": \"Empathy\", \"explanation\": \"an object, not a list\"}",
    "[]",
    "[{\"skill\": \"Empathy\"}]",
    "[{\"explanation\": \"no skill given\"}]",
    "[{\"skill\": \"\", \"explanation\": \"blank skill\"}]",
    "[{\"skill\": \"Empathy\", \"explanation\": 7}]",
    "[\"Empathy\"]",
    "```json\n[{\"skill\": \"Empathy\", \"explanation\": \"unterminated\"\n```",
    "Sure! Here is the answer: [{\"skill\": \"Empathy\"",
];

fn write_pipeline_inputs(dir: &Path) -> Result<(), String> {
    let mut subs = Vec::new();
    let mut k = 0;
    while subs.len() < 50 {
        let mut d = alternating(&format!("syn-{k:03}"), 5 + k % 6);
        d.social_context.insert("narrative".into(), format!("Two friends catch up, take {k}."));
        for s in split_one_sided(&d, 2, 4).map_err(|e| e.to_string())? {
            if subs.len() < 50 {
                subs.push(s);
            }
        }
        k += 1;
    }
    let lines: Vec<String> = subs.iter().map(|s| serde_json::to_string(s).unwrap() + "\n").collect();
    std::fs::write(dir.join("subs.jsonl"), lines.concat()).map_err(|e| e.to_string())?;
    let fixtures: Vec<String> = subs
        .iter()
        .step_by(5)
        .zip(MALFORMED)
        .map(|(s, out)| serde_json::json!({"id": s.id, "output": out}).to_string() + "\n")
        .collect();
    std::fs::write(dir.join("mock.jsonl"), fixtures.concat()).map_err(|e| e.to_string())
}

fn count_lines(path: &Path) -> Result<usize, String> {
    Ok(std::fs::read_to_string(path).map_err(|e| e.to_string())?.lines().count())
}

fn pipeline_run(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    run_cli(&[
        "--mock", "--seed", "17", "annotate", "run", "--input", &p("subs.jsonl"), "--output", &p("ds.jsonl"),
        "--mock-outputs", &p("mock.jsonl"),
    ])?;
    let entries = count_lines(&dir.join("ds.jsonl"))?;
    let failures = count_lines(&dir.join("ds.failures.jsonl"))?;
    ensure(entries == 40 && failures == 10, || format!("{entries} entries + {failures} failures"))?;
    run_cli(&["--seed", "17", "dataset", "split", "--input", &p("ds.jsonl"), "--test-fraction", "0.1"])?;
    let train = count_lines(&dir.join("ds.train.jsonl"))?;
    let test = count_lines(&dir.join("ds.test.jsonl"))?;
    ensure(train == 36 && test == 4, || format!("split {train}/{test}"))?;
    ["ds.jsonl", "ds.failures.jsonl", "ds.train.jsonl", "ds.test.jsonl"]
        .iter()
        .map(|f| Ok((f.to_string(), std::fs::read(dir.join(f)).map_err(|e| e.to_string())?)))
        .collect()
}

fn mock_pipeline() -> Check {
    let mut artifacts = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        write_pipeline_inputs(dir.path())?;
        artifacts.push(pipeline_run(dir.path())?);
    }
    for ((name, a), (_, b)) in artifacts[0].iter().zip(&artifacts[1]) {
        ensure(a == b, || format!("{name} differs between runs"))?;
    }
    Ok("40 entries + 10 failures, split 36/4, artifacts byte-identical".into())
}

fn safety_arithmetic() -> Check {
    let mut labels = Vec::new();
    for (label, n) in [
        (SafetyLabel::Casual, 743),
        (SafetyLabel::NeedsCaution, 224),
        (SafetyLabel::NeedsIntervention, 22),
        (SafetyLabel::Degenerate, 11),
    ] {
        labels.extend(std::iter::repeat_n(label, n));
    }
    let r = safety_ratio::<f64>(&labels).map_err(|e| e.to_string())?;
    let shown: Vec<f64> = r.components().iter().map(|&x| one_decimal(x)).collect();
    ensure(shown == [74.3, 22.4, 2.2, 1.1], || format!("components {shown:?}"))?;
    let sum: f64 = r.components().iter().sum();
    ensure((sum - 100.0).abs() <= 1e-9, || format!("components sum to {sum}"))?;
    Ok(format!("{shown:?}, sum {sum}"))
}

fn responder_messages(planner: Option<&dyn ChatBackend>) -> Result<Vec<ChatMessage>, String> {
    let t = builtin_taxonomy();
    let responder = MockBackend::new(MockRole::Responder, &t);
    let context = vec![
        Turn::new("Sawyer", "My dog has been sick all week."),
        Turn::new("Gregg", "Oh no, is she eating at all?"),
        Turn::new("Sawyer", "A little. The vet visit is tomorrow."),
    ];
    block_on(guided_respond(
        &GuidanceConfig::default(),
        planner,
        &responder,
        Some("Sawyer and Gregg are neighbors."),
        &context,
        &t,
    ))
    .map_err(|e| e.to_string())?;
    let calls = responder.calls();
    ensure(calls.len() == 1, || format!("responder called {} times", calls.len()))?;
    Ok(calls[0].clone())
}

fn ablation_integrity() -> Check {
    let planner = MockBackend::new(MockRole::Planner, &builtin_taxonomy());
    let guided = responder_messages(Some(&planner))?;
    let baseline = responder_messages(None)?;
    let user = |m: &[ChatMessage]| m.iter().filter(|x| x.role == Role::User).map(|x| x.content.clone()).collect::<Vec<_>>();
    let system = |m: &[ChatMessage]| m.iter().filter(|x| x.role == Role::System).map(|x| x.content.clone()).collect::<Vec<_>>();
    ensure(guided.len() == baseline.len(), || "message counts differ".into())?;
    ensure(user(&guided) == user(&baseline), || "user messages differ".into())?;
    ensure(system(&guided) != system(&baseline), || "system messages are identical".into())?;
    Ok("user message identical, system message differs".into())
}

fn head_to_head_tally() -> Check {
    let records: Vec<PreferenceRecord> = (0..70)
        .map(|i| PreferenceRecord {
            rater: format!("rater{}", i % 3),
            item: format!("dialogue{i:02}"),
            criterion: Criterion::Overall,
            choice: if i < 40 { Choice::B } else { Choice::A },
            strength: if i % 2 == 0 { Strength::Definite } else { Strength::Slight },
        })
        .collect();
    let report = head_to_head::<f64>(&records).map_err(|e| e.to_string())?;
    let tally = report.get(Criterion::Overall).ok_or("no overall tally")?;
    let shown = (one_decimal(tally.win_b), one_decimal(tally.win_a));
    ensure(shown == (57.1, 42.9), || format!("B/A = {shown:?}"))?;
    Ok(format!("B {} / A {}", shown.0, shown.1))
}

fn main() {
    oracle::self_check();
    let criteria: [Gate; 10] = [
        ("taxonomy fidelity", Duration::from_secs(1), taxonomy_fidelity),
        ("splitting", Duration::from_secs(5), splitting),
        ("prompt/template fidelity", Duration::from_secs(1), prompt_fidelity),
        ("metric oracle equivalence", Duration::from_secs(30), metric_oracle),
        ("krippendorff alpha", Duration::from_secs(10), alpha_oracle),
        ("format round-trip", Duration::from_secs(5), round_trip),
        ("mock pipeline", Duration::from_secs(10), mock_pipeline),
        ("safety arithmetic", Duration::from_secs(1), safety_arithmetic),
        ("guided vs baseline", Duration::from_secs(1), ablation_integrity),
        ("head-to-head", Duration::from_secs(1), head_to_head_tally),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > *limit => Err(format!("{detail}; took {elapsed:?}, limit {limit:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("criterion {}: PASS {name} ({} ms): {detail}", i + 1, elapsed.as_millis()),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({} ms): {why}", i + 1, elapsed.as_millis());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
