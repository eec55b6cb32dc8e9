//! Acceptance criteria for the tutor. Each criterion prints one PASS/FAIL
//! line; the process exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use qtutor_core::sim::{prepare_lexicon, quantile, run_simulation, SimulationConfig, SimulationResult};
use qtutor_core::student::StudentLabel;
use qtutor_core::{
    next_item, record_outcome, select_action, session_rng, valid_level_actions, validate_answer, CefrLevel,
    EmbeddingIndex, LearningParams, LevelAction, Lexicon, QTable, Reward, RngSeed, SessionState, SimulatedStudent,
    TutorParams, WordAction, WordItem, WordState,
};
use rand::Rng;
use serde_json::{json, Value};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, format!("took {took:?}, limit {limit:?}"))
}

// 1. Q-learning update matches a direct evaluation on 1,000 random tuples.
fn eq1_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = session_rng(RngSeed(1001));
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut table: QTable<CefrLevel> = QTable::new("level");
        let mut values = BTreeMap::new();
        for level in CefrLevel::ALL {
            for a in valid_level_actions(level) {
                let q = rng.gen_range(-10.0..10.0);
                table.set(level, a, q).unwrap();
                values.insert((level.index(), a), q);
            }
        }
        let s = CefrLevel::ALL[rng.gen_range(0..6)];
        let actions = valid_level_actions(s);
        let a = actions[rng.gen_range(0..actions.len())];
        let s_next = qtutor_core::apply_level_action(s, a);
        let alpha = 1.0 - rng.gen::<f64>(); // (0, 1]
        let gamma = rng.gen::<f64>();
        let r = if rng.gen() { -1.0 } else { 1.0 };
        let reward = if r < 0.0 { Reward::CORRECT } else { Reward::INCORRECT };
        let params = LearningParams { alpha, gamma, epsilon: 0.95 };

        let q = values[&(s.index(), a)];
        let max_next = valid_level_actions(s_next).iter().map(|b| values[&(s_next.index(), *b)]).fold(f64::MIN, f64::max);
        let oracle = q + alpha * (r + gamma * max_next - q);

        let got = table.update(s, a, reward, s_next, &valid_level_actions(s_next), &params).map_err(|e| e.to_string())?;
        worst = worst.max((got - oracle).abs());
        for ((li, b), v) in &values {
            if (*li, *b) != (s.index(), a) {
                let l = CefrLevel::from_index(*li).unwrap();
                check(table.get(l, *b) == *v, "update touched another entry")?;
            }
        }
    }
    check(worst <= 1e-12, format!("max abs error {worst:e}"))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("max abs error {worst:e} over 1000 tuples"))
}

// 2. ε is the greedy probability.
fn epsilon_semantics() -> Outcome {
    let start = Instant::now();
    let mut table: QTable<CefrLevel> = QTable::new("level");
    table.set(CefrLevel::B1, LevelAction::Stay, 0.3).unwrap();
    let valid = valid_level_actions(CefrLevel::B1);
    check(valid.len() == 3, "expected three actions")?;
    let n = 100_000;
    let mut rng = session_rng(RngSeed(2002));
    let hits = (0..n)
        .filter(|_| select_action(&table, CefrLevel::B1, &valid, 0.95, &mut rng).unwrap() == LevelAction::Stay)
        .count();
    let freq = hits as f64 / n as f64;
    let expected = 0.95 + 0.05 / 3.0;
    check((freq - expected).abs() <= 0.005, format!("maximizer frequency {freq}, expected {expected:.4}"))?;
    let non_greedy = (0..n)
        .filter(|_| select_action(&table, CefrLevel::B1, &valid, 1.0, &mut rng).unwrap() != LevelAction::Stay)
        .count();
    check(non_greedy == 0, format!("{non_greedy} non-greedy picks at epsilon=1"))?;
    within(start, Duration::from_secs(5))?;
    Ok(format!("maximizer frequency {freq:.4} (target {expected:.4}), 0 non-greedy at epsilon=1"))
}

// 3. Matched-level pass rate and monotone success curve.
fn gompertz_calibration() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for s in SimulatedStudent::defaults() {
        worst = worst.max((s.success_probability(s.proficiency) - 0.75).abs());
        for i in 0..60 {
            let (lo, hi) = (i as f64 / 10.0, (i + 1) as f64 / 10.0);
            check(
                s.success_probability(hi) <= s.success_probability(lo)
                    && s.failure_probability(hi) > s.failure_probability(lo),
                format!("{} not decreasing between {lo} and {hi}", s.label),
            )?;
        }
    }
    check(worst <= 1e-12, format!("matched-level error {worst:e}"))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("matched-level |P-0.75| = {worst:e}; decreasing on 0..6 step 0.1 for all three students"))
}

fn default_simulation() -> &'static (SimulationResult, Duration) {
    static RUN: OnceLock<(SimulationResult, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let config = SimulationConfig::default();
        let lexicon = prepare_lexicon(&config).unwrap();
        let result = run_simulation(&config, &lexicon).unwrap();
        (result, start.elapsed())
    })
}

fn final_window_median(result: &SimulationResult, label: StudentLabel) -> f64 {
    let runs = result.runs_for(label).unwrap();
    let mut v: Vec<f64> = runs
        .iter()
        .flat_map(|t| t.points[t.points.len() - 20..].iter().map(|p| p.level.index() as f64))
        .collect();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

// 4. Level bands per student over the last 20 of 100 interactions, 20 runs.
fn figure1_levels() -> Outcome {
    let (result, took) = default_simulation();
    let b = final_window_median(result, StudentLabel::Beginner);
    let i = final_window_median(result, StudentLabel::Intermediate);
    let a = final_window_median(result, StudentLabel::Advanced);
    let summary = format!("medians beginner {b}, intermediate {i}, advanced {a}");
    check(b <= 1.5, format!("{summary}: beginner above 1.5"))?;
    check((1.5..=4.0).contains(&i), format!("{summary}: intermediate outside [1.5, 4.0]"))?;
    check(a >= 3.0, format!("{summary}: advanced below 3.0"))?;
    check(b < i && i < a, format!("{summary}: not strictly ordered"))?;
    check(*took < Duration::from_secs(30), format!("took {took:?}"))?;
    Ok(summary)
}

// 5. Cumulative reward ordering and ±1 steps.
fn figure2_rewards() -> Outcome {
    let (result, took) = default_simulation();
    let median_final = |label| {
        let mut v: Vec<f64> = result
            .runs_for(label)
            .unwrap()
            .iter()
            .map(|t| t.points.last().unwrap().cumulative_reward as f64)
            .collect();
        v.sort_by(f64::total_cmp);
        quantile(&v, 0.5)
    };
    let (b, i, a) =
        (median_final(StudentLabel::Beginner), median_final(StudentLabel::Intermediate), median_final(StudentLabel::Advanced));
    for t in result.trajectories() {
        check(t.points.len() == 100, "trajectory length")?;
        let mut prev = 0;
        for p in &t.points {
            check((p.cumulative_reward - prev).abs() == 1, format!("{} run {} step not ±1", t.student, t.run))?;
            prev = p.cumulative_reward;
        }
    }
    check(a <= i && i <= b, format!("final medians advanced {a}, intermediate {i}, beginner {b} out of order"))?;
    check(*took < Duration::from_secs(30), format!("took {took:?}"))?;
    Ok(format!("final cumulative reward medians advanced {a} <= intermediate {i} <= beginner {b}; all steps ±1"))
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

// 6. Two `simulate` invocations produce identical bytes.
fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sim.toml");
    std::fs::write(&config, "runs = 5\ninteractions = 100\nbase_seed = 123\n").unwrap();
    let mut trees = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_simulate"))
            .args(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "77", "--quiet"])
            .status()
            .map_err(|e| e.to_string())?;
        check(status.success(), format!("simulate exited with {status}"))?;
        trees.push(read_tree(&out));
    }
    let svgs = trees[0].keys().filter(|k| k.ends_with(".svg")).count();
    let csvs = trees[0].keys().filter(|k| k.ends_with(".csv")).count();
    check(svgs == 2 && csvs == 16, format!("{csvs} csv / {svgs} svg files"))?;
    check(trees[0] == trees[1], "outputs differ between invocations")?;
    let bad = Command::new(env!("CARGO_BIN_EXE_simulate"))
        .args(["--config", "/nonexistent.toml", "--quiet"])
        .stderr(Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    check(!bad.success(), "missing config should fail")?;
    Ok(format!("{csvs} CSV + {svgs} SVG files byte-identical across two runs"))
}

// 7. Word-model dynamics.
fn word_dynamics() -> Outcome {
    let lexicon = Lexicon::bundled();
    let params = TutorParams::default();

    let mut session = SessionState::new("always-right");
    let mut rng = session_rng(RngSeed(7007));
    for _ in 0..200 {
        let p = next_item(&session, &lexicon, &params, &mut rng).unwrap();
        record_outcome(&mut session, &p, true, &params).unwrap();
        let m = session.word_model(&p.word).unwrap();
        check(m.q.get(WordState::Active, WordAction::Remain) < 0.0, format!("{} Q not negative", p.word))?;
        check(m.state == WordState::Inactive, format!("{} still active after a correct answer", p.word))?;
    }

    let mut session = SessionState::new("fuzz");
    let mut rng = session_rng(RngSeed(7008));
    let mut answers = session_rng(RngSeed(7009));
    let mut violations = 0usize;
    let mut toggles = 0usize;
    for _ in 0..100_000 {
        let before: BTreeMap<String, WordState> =
            lexicon.items().iter().map(|w| (w.word.clone(), session.word_state(&w.word))).collect();
        let p = next_item(&session, &lexicon, &params, &mut rng).unwrap();
        record_outcome(&mut session, &p, answers.gen(), &params).unwrap();
        for (word, state) in before {
            if session.word_state(&word) != state {
                toggles += 1;
                if word != p.word {
                    violations += 1;
                }
            }
        }
        check(session.current_level <= CefrLevel::C2, "level out of range")?;
    }
    check(violations == 0, format!("{violations} words changed state without an update"))?;
    Ok(format!("always-correct student hides every word after one answer; 100000-step fuzz: {toggles} toggles, 0 violations"))
}

struct Server {
    child: Child,
    port: u16,
}

impl Server {
    fn start(data_dir: &Path, port: u16) -> Result<Self, String> {
        let child = Command::new(env!("CARGO_BIN_EXE_tutor-service"))
            .args(["--listen", &format!("127.0.0.1:{port}"), "--data-dir", data_dir.to_str().unwrap()])
            .env("RUST_LOG", "warn")
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| e.to_string())?;
        let server = Server { child, port };
        let deadline = Instant::now() + Duration::from_secs(20);
        while Instant::now() < deadline {
            if let Ok((200, _)) = server.request("GET", "/v1/healthz", None) {
                return Ok(server);
            }
            std::thread::sleep(Duration::from_millis(50));
        }
        Err("service did not become healthy".into())
    }

    fn request(&self, method: &str, path: &str, body: Option<&Value>) -> Result<(u16, Value), String> {
        let mut stream = TcpStream::connect(("127.0.0.1", self.port)).map_err(|e| e.to_string())?;
        let body = body.map(Value::to_string).unwrap_or_default();
        write!(
            stream,
            "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        )
        .map_err(|e| e.to_string())?;
        let mut raw = String::new();
        stream.read_to_string(&mut raw).map_err(|e| e.to_string())?;
        let status: u16 = raw.split_whitespace().nth(1).and_then(|s| s.parse().ok()).ok_or("bad status line")?;
        let payload = raw.split_once("\r\n\r\n").map(|(_, b)| b).unwrap_or("");
        let value = if payload.is_empty() { Value::Null } else { serde_json::from_str(payload).map_err(|e| e.to_string())? };
        Ok((status, value))
    }

    fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

fn pending_word(data_dir: &Path, id: &str) -> String {
    let path: PathBuf = data_dir.join("sessions").join(format!("{id}.json"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v["pending"]["word"].as_str().unwrap().to_string()
}

// 8. Scripted client, 50 cycles, killed and restarted halfway.
fn service_round_trip() -> Outcome {
    let data = tempfile::tempdir().unwrap();
    let mut server = Server::start(data.path(), free_port())?;
    let (status, created) = server.request("POST", "/v1/sessions", Some(&json!({ "seed": 8080 })))?;
    check(status == 201, format!("create returned {status}"))?;
    let id = created["session_id"].as_str().unwrap().to_string();
    let mut answers = session_rng(RngSeed(8081));
    let mut restarted_with_pending = false;

    for cycle in 1..=50 {
        let (status, q) = server.request("GET", &format!("/v1/sessions/{id}/next"), None)?;
        check(status == 200, format!("next returned {status}"))?;
        if cycle == 25 {
            // kill while a question is pending, then again after answering
            let before = server.request("GET", &format!("/v1/sessions/{id}/history"), None)?.1;
            let port = server.port;
            server.kill();
            server = Server::start(data.path(), port)?;
            let (_, again) = server.request("GET", &format!("/v1/sessions/{id}/next"), None)?;
            let after = server.request("GET", &format!("/v1/sessions/{id}/history"), None)?.1;
            check(again == q && before == after, "pending question or history lost across restart")?;
            restarted_with_pending = true;
        }
        let word = pending_word(data.path(), &id);
        let correct = answers.gen_bool(0.6);
        let text = if correct { word.to_uppercase() } else { "not-a-word".to_string() };
        let body = json!({ "question_id": q["question_id"], "text": text });
        let (status, a) = server.request("POST", &format!("/v1/sessions/{id}/answer"), Some(&body))?;
        check(status == 200, format!("answer returned {status}"))?;
        check(a["correct"] == correct && a["interaction_index"] == cycle, "answer response mismatch")?;
        let (status, _) = server.request("POST", &format!("/v1/sessions/{id}/answer"), Some(&body))?;
        check(status == 409, format!("resubmit returned {status}"))?;
        if cycle == 40 {
            let before = server.request("GET", &format!("/v1/sessions/{id}/history"), None)?.1;
            let port = server.port;
            server.kill();
            server = Server::start(data.path(), port)?;
            let after = server.request("GET", &format!("/v1/sessions/{id}/history"), None)?.1;
            check(before == after, "completed interactions lost across restart")?;
        }
    }

    let (_, h) = server.request("GET", &format!("/v1/sessions/{id}/history"), None)?;
    let records = h["history"].as_array().ok_or("history missing")?;
    check(records.len() == 50, format!("{} records", records.len()))?;
    let mut level = "A1".to_string();
    let mut sum = 0i64;
    for (i, r) in records.iter().enumerate() {
        check(r["index"] == i as u64 + 1, "index gap")?;
        check(r["level_before"] == level.as_str(), format!("record {} does not chain", i + 1))?;
        level = r["level_after"].as_str().unwrap().to_string();
        sum += r["reward"].as_i64().unwrap();
    }
    check(h["cumulative_reward"] == sum, "cumulative reward does not equal history sum")?;
    check(h["current_level"] == level.as_str(), "current level does not follow history")?;
    server.kill();
    check(restarted_with_pending, "restart not exercised")?;
    Ok(format!("50 cycles, 2 kill/restarts, chained history, cumulative reward {sum}"))
}

// 9. Synonym sets equal the committed brute-force oracle; normalization table.
fn answer_validation() -> Outcome {
    let oracle: BTreeMap<String, Vec<String>> =
        serde_json::from_str(include_str!("../../core/tests/fixtures/synonyms_oracle.json")).unwrap();
    let mut lexicon = Lexicon::bundled();
    lexicon.build_synonyms(&EmbeddingIndex::bundled(), 10).unwrap();
    let built = lexicon.synonym_map();
    check(built == oracle, "synonym sets differ from the oracle")?;

    let item = WordItem {
        word: "dog".into(),
        level: CefrLevel::A1,
        image_ref: "img/0001.svg".into(),
        synonyms: vec!["puppy".into(), "hound".into()],
    };
    let table = [
        ("dog", true),
        ("  Dog ", true),
        ("DOG", true),
        ("\tdog\n", true),
        ("puppy", true),
        (" PUPPY", true),
        ("Hound  ", true),
        ("cat", false),
        ("dogs", false),
        ("d og", false),
        ("", false),
    ];
    for (response, want) in table {
        check(validate_answer(response, &item) == want, format!("validate_answer({response:?}) != {want}"))?;
    }
    Ok(format!("{} synonym sets match the oracle; {} normalization cases", built.len(), table.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 q-update exactness", eq1_exactness),
        ("2 epsilon semantics", epsilon_semantics),
        ("3 gompertz calibration", gompertz_calibration),
        ("4 level bands (figure 1)", figure1_levels),
        ("5 cumulative reward (figure 2)", figure2_rewards),
        ("6 simulate determinism", cli_determinism),
        ("7 word-model dynamics", word_dynamics),
        ("8 service round-trip", service_round_trip),
        ("9 answer validation", answer_validation),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        match std::panic::catch_unwind(criterion) {
            Ok(Ok(detail)) => println!("PASS  {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  {name}: panicked");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
