//! One line per headline criterion, written past the test harness capture.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::time::{Duration, Instant};

use crafter_foundry::caption::{detect_events, detect_in, CaptionRecord, Rule};
use crafter_foundry::datakit::{noop_filter, parse_header, read_episode, relabel_masked, segment_events, EpisodeArrays, RelabelConfig};
use crafter_foundry::eval::{cfg_combine, crafter_score, measure_throughput, run_benchmark, run_task_episode, BuiltinAgent, SuccessRates, TaskSpec};
use crafter_foundry::expert::{generate_play, rollout, rollout_episode, ChainedAgent, Expert, PlayOptions};
use crafter_foundry::mechanics::{Achievement, Action, EnvConfig, EnvState, Item, Mob};
use crafter_foundry::seed::{Seed, Stream};
use crafter_foundry::world::{Direction, Pos, TileKind, WorldGrid};
use crafter_foundry::Error;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn check(name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let pass = o.pass && took <= budget;
    let verdict = if pass { "PASS" } else { "FAIL" };
    report(&format!("[{verdict}] {name}: {} ({:.2}s, budget {}s)", o.detail, took.as_secs_f64(), budget.as_secs()));
    pass
}

fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn metric_exactness() -> Outcome {
    let zero = crafter_score(&SuccessRates([0.0; 22]));
    let full = crafter_score(&SuccessRates([100.0; 22]));
    let mut one = [0.0; 22];
    one[0] = 100.0;
    let single = crafter_score(&SuccessRates(one));
    // 101^(1/22) - 1 to 50 significant digits.
    let oracle = 0.233_404_467_056_915_132_919_540_851_958_640_399_838_f64;
    let err = (single - oracle).abs();
    outcome(zero == 0.0 && full == 100.0 && err < 1e-12, format!("zero={zero} full={full} single err={err:.1e}"))
}

fn reward_contract() -> Outcome {
    let config = EnvConfig { death_penalty_enabled: true, ..EnvConfig::default() };
    let mut rng = Seed::new(77, Stream::Episode).rng();
    let (mut steps, mut episodes, mut deaths, mut bad) = (0, 0, 0, 0);
    while steps < 10_000 {
        let mut s = EnvState::reset(episodes, config.clone()).unwrap();
        let mut penalties = 0;
        while !s.done {
            let prev = s.clone();
            let out = s.step(Action::ALL[rng.below(17) as usize]).unwrap();
            steps += 1;
            let unlocks = (s.achievements.bits() & !prev.achievements.bits()).count_ones() as i32;
            let died = prev.player.health > 0 && s.player.health <= 0;
            let expect = 10 * unlocks + (s.player.health - prev.player.health) - if died { 100 } else { 0 };
            penalties += i32::from(died);
            bad += i32::from(out.reward.tenths() != expect);
        }
        deaths += i32::from(s.player.health <= 0);
        if s.player.health <= 0 && penalties != 1 || s.player.health > 0 && penalties != 0 {
            bad += 1;
        }
        episodes += 1;
    }
    outcome(bad == 0 && deaths > 0, format!("{steps} steps, {episodes} episodes, {deaths} deaths, {bad} mismatches"))
}

fn scenario(ground: TileKind, mobs: bool) -> EnvState {
    let config = if mobs { EnvConfig::default() } else { EnvConfig { mobs_enabled: false, ..EnvConfig::peaceful() } };
    let mut s = EnvState::reset(0, config).unwrap();
    let c = Pos::new(32, 32);
    s.grid = WorldGrid::filled(ground, c);
    s.mobs = Default::default();
    s.player.pos = c;
    s.player.facing = Direction::Up;
    s
}

fn play(mut s: EnvState, actions: &[Action]) -> Vec<CaptionRecord> {
    let mut states = vec![s.clone()];
    for &a in actions {
        s.step(a).unwrap();
        states.push(s.clone());
    }
    detect_in(0, &states, actions)
}

fn caption_suite() -> Outcome {
    use Action as A;
    let c = Pos::new(32, 32);
    let zombie = |pos: Pos, health: i32| Some(Mob { id: 1, pos, health, cooldown: 0, facing: Direction::Left });
    let inv = |s: &mut EnvState, item: Item, n: u8| s.player.inventory[item.index()] = n;
    let noops = |n: usize, tail: &[Action]| [vec![A::Noop; n], tail.to_vec()].concat();
    let mut cases: Vec<(Rule, &str, u32, (u32, u32), EnvState, Vec<Action>)> = Vec::new();

    let mut s = scenario(TileKind::Grass, false);
    s.grid.set(c.offset(0, -1), TileKind::Tree);
    cases.push((Rule::Harvest, "obtain wood", 2, (0, 3), s, noops(2, &[A::Do])));
    let mut s = scenario(TileKind::Grass, false);
    inv(&mut s, Item::Wood, 1);
    cases.push((Rule::Place, "place table on grass", 7, (3, 8), s, noops(7, &[A::PlaceTable])));
    let mut s = scenario(TileKind::Grass, false);
    s.grid.set(c.offset(-1, 0), TileKind::Table);
    inv(&mut s, Item::Wood, 1);
    cases.push((Rule::Craft, "craft wood pickaxe", 1, (0, 2), s, noops(1, &[A::MakeWoodPickaxe])));
    let mut s = scenario(TileKind::Grass, false);
    s.mobs.zombies[0] = zombie(c.offset(0, -1), 1);
    cases.push((Rule::Kill, "kill zombie", 0, (0, 1), s, vec![A::Do]));
    let mut s = scenario(TileKind::Grass, false);
    s.player.energy = 4;
    cases.push((Rule::Sleep, "go to sleep", 1, (0, 2), s, vec![A::MoveLeft, A::Sleep]));
    cases.push((Rule::Stay, "stay", 4, (0, 5), scenario(TileKind::Grass, false), noops(5, &[])));
    cases.push((Rule::Move, "move to east", 4, (0, 5), scenario(TileKind::Grass, false), vec![A::MoveRight; 5]));
    let mut s = scenario(TileKind::Grass, false);
    s.mobs.cows[0] = Some(Mob { id: 2, pos: c.offset(8, 0), health: 3, cooldown: 0, facing: Direction::Left });
    cases.push((Rule::Approach, "approach cow", 4, (0, 5), s, vec![A::MoveRight; 5]));
    let mut s = scenario(TileKind::Grass, false);
    s.mobs.zombies[0] = zombie(c.offset(-2, 0), 5);
    cases.push((Rule::Flee, "flee from zombie", 4, (0, 5), s, vec![A::MoveRight; 5]));
    cases.push((Rule::Explore, "go explore", 2, (0, 3), scenario(TileKind::Grass, false), vec![A::MoveDown; 3]));
    let mut s = scenario(TileKind::Grass, false);
    for d in [(-1, 0), (1, 0), (0, 1)] {
        s.grid.set(c.offset(d.0, d.1), TileKind::Stone);
    }
    inv(&mut s, Item::Stone, 1);
    cases.push((Rule::Shelter, "place stone to build shelter", 10, (6, 11), s, noops(10, &[A::PlaceStone])));
    let mut s = scenario(TileKind::Grass, false);
    s.grid.set(c.offset(0, -1), TileKind::Water);
    inv(&mut s, Item::Stone, 1);
    inv(&mut s, Item::WoodPickaxe, 1);
    cases.push((Rule::Path, "build path over water", 4, (0, 5), s, noops(3, &[A::PlaceStone, A::Do])));
    let mut s = scenario(TileKind::Grass, false);
    s.grid.set(c.offset(0, -1), TileKind::Stone);
    s.grid.set(c.offset(0, -2), TileKind::Stone);
    inv(&mut s, Item::WoodPickaxe, 1);
    cases.push((Rule::Tunnel, "dig a tunnel", 8, (4, 9), s, noops(6, &[A::Do, A::MoveUp, A::Do])));
    let mut s = scenario(TileKind::Sand, true);
    s.mobs.zombies[0] = zombie(c.offset(1, 0), 5);
    let mut probe = s.clone();
    let hit = (0..20u32).find(|_| {
        let before = probe.player.health;
        probe.step(A::Noop).unwrap();
        probe.player.health < before
    });
    let t = hit.unwrap_or(0);
    cases.push((Rule::AttackedBy, "attacked by zombie", t, (t.saturating_sub(4), t + 1), s, noops(t as usize + 1, &[])));
    let mut s = scenario(TileKind::Grass, false);
    s.mobs.zombies[0] = zombie(c.offset(0, -2), 5);
    inv(&mut s, Item::Stone, 1);
    cases.push((Rule::BlockAttack, "block attack from zombie with stone", 2, (0, 3), s, noops(2, &[A::PlaceStone])));

    let mut failures = Vec::new();
    let mut rules = BTreeSet::new();
    for (rule, caption, t, frames, state, actions) in cases {
        rules.insert(rule.id());
        let recs = play(state, &actions);
        let hits: Vec<_> = recs.iter().filter(|r| r.rule() == rule).collect();
        let good = hits.len() == 1
            && hits[0].caption == caption
            && hits[0].t == t
            && (hits[0].frame_start, hits[0].frame_end) == frames;
        if !good {
            failures.push(format!("{rule:?}"));
        }
    }
    outcome(failures.is_empty() && rules.len() == 15, format!("{} rules, failures {failures:?}", rules.len()))
}

fn noop_suite() -> Outcome {
    let mut rng = Seed::new(5, Stream::Episode).rng();
    let mut violations = 0;
    for _ in 0..10_000 {
        let len = rng.below(200) as usize;
        let mut actions = Vec::with_capacity(len);
        while actions.len() < len {
            let run = 1 + rng.below(30) as usize;
            let a = if rng.below(2) == 0 { Action::Noop } else { Action::ALL[1 + rng.below(16) as usize] };
            actions.extend(std::iter::repeat_n(a, run));
        }
        let mask = noop_filter(&actions, 20).unwrap();
        let mut i = 0;
        while i < actions.len() {
            let mut j = i;
            while j < actions.len() && actions[j] == actions[i] && mask.0[j] == mask.0[i] {
                j += 1;
            }
            if actions[i] != Action::Noop && !mask.0[i] {
                violations += 1;
            }
            if actions[i] == Action::Noop && mask.0[i] {
                // A kept noop run must be a whole maximal run of length >= 20.
                let whole = (i == 0 || actions[i - 1] != Action::Noop) && (j == actions.len() || actions[j] != Action::Noop);
                if !whole || j - i < 20 {
                    violations += 1;
                }
            }
            i = j;
        }
    }
    let b19 = noop_filter(&[Action::Noop; 19], 20).unwrap().kept() == 0;
    let b20 = noop_filter(&[Action::Noop; 20], 20).unwrap().kept() == 20;
    outcome(violations == 0 && b19 && b20, format!("10000 sequences, {violations} violations, 19-run dropped {b19}, 20-run kept {b20}"))
}

fn relabel_suite() -> Outcome {
    let cfg = RelabelConfig::default();
    let (mut chunks_total, mut nulls, mut bad) = (0usize, 0usize, 0usize);
    for ep in 0..100u64 {
        let traj = rollout_episode(ep, 1000 + ep, EnvConfig::expert(), &mut Expert::new(1000 + ep), 600, false).unwrap();
        let records = detect_events(&traj);
        let mask = noop_filter(&traj.actions, 20).unwrap();
        let kept = mask.kept_indices();
        let Ok(chunks) = relabel_masked(ep, &records, &mask, &cfg) else { continue };
        let mut seg_of = vec![0usize; traj.len()];
        for (i, s) in segment_events(&records, traj.len()).iter().enumerate() {
            seg_of[s.start as usize..=s.end as usize].fill(i);
        }
        let mut next = 0u32;
        for c in &chunks {
            let tiles = c.start == next && kept[c.start as usize] as u32 == c.t_start && kept[c.end as usize] as u32 == c.t_end;
            let one_segment = (c.t_start..=c.t_end).all(|t| seg_of[t as usize] == seg_of[c.t_start as usize]);
            let offset_ok = c.goal.is_none_or(|g| (1..=10).contains(&c.goal_offset()) && g.frame_end == c.t_end + 1);
            bad += usize::from(!(tiles && one_segment && offset_ok));
            nulls += usize::from(c.goal.is_none());
            next = c.end + 1;
        }
        bad += usize::from(next as usize != kept.len());
        chunks_total += chunks.len();
    }
    let n = chunks_total as f64;
    let sigma = (n * 0.1 * 0.9).sqrt();
    let within = (nulls as f64 - 0.1 * n).abs() <= 3.0 * sigma;
    outcome(
        bad == 0 && chunks_total >= 10_000 && within,
        format!("{chunks_total} chunks, {bad} violations, null fraction {:.4} (3 sigma = {:.4})", nulls as f64 / n, 3.0 * sigma / n),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let opts = PlayOptions { max_steps: 1000, ..PlayOptions::default() };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let m = generate_play(3, 10, &a, 2, &opts).unwrap();
    generate_play(3, 10, &b, 1, &opts).unwrap();
    let mut differing = 0;
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        differing += usize::from(fs::read(a.join(&name)).unwrap() != fs::read(b.join(&name)).unwrap());
    }
    let mut replay_fail = 0;
    for e in &m.entries {
        let arrays = read_episode(&m.container_path(e.episode_id)).unwrap();
        replay_fail += usize::from(arrays.to_trajectory().is_err());
    }
    outcome(differing == 0 && replay_fail == 0, format!("10 episodes, {differing} differing files, {replay_fail} replay mismatches"))
}

fn expert_capability() -> Outcome {
    let report = run_benchmark("expert", |s| BuiltinAgent::Expert.make(s), 100, &EnvConfig::default(), 2000).unwrap();
    let distinct = Achievement::ALL.iter().filter(|&&a| report.success_rates.get(a) > 0.0).count();
    let spec = TaskSpec::by_id("T1").unwrap();
    let t1 = (0..50u64)
        .filter(|&seed| {
            let mut agent = ChainedAgent::new(spec.clone(), seed).unwrap();
            run_task_episode(&spec, seed, |s, c| agent.act(s, c)).unwrap().completed
        })
        .count();
    outcome(distinct >= 12 && t1 >= 40, format!("{distinct} distinct achievements over 100 episodes, T1 {t1}/50, score {:.1}", report.score))
}

fn throughput() -> Outcome {
    let t = measure_throughput(1_000_000, 20_000, 0).unwrap();
    let note = if cfg!(debug_assertions) { " (debug assertions on)" } else { "" };
    outcome(
        t.steps_per_second >= 50_000.0 && t.frames_per_second >= 2_000.0,
        format!("{:.0} steps/s, {:.0} frames/s{note}", t.steps_per_second, t.frames_per_second),
    )
}

fn format_conformance() -> Outcome {
    let mut rng = Seed::new(9, Stream::Episode).rng();
    let mut mismatches = 0;
    let mut accepted_corrupt = 0;
    for i in 0..1000u64 {
        let n = 1 + rng.below(30) as usize;
        let actions: Vec<Action> = (0..n).map(|_| Action::ALL[rng.below(17) as usize]).collect();
        let mut script = actions.iter().copied();
        let mut policy = |_: &EnvState| script.next().unwrap_or(Action::Noop);
        let traj = rollout(i, EnvConfig::default(), &mut policy, n, i % 50 == 0).unwrap();
        let arrays = EpisodeArrays::from_trajectory(&traj);
        let bytes = arrays.to_bytes();
        match EpisodeArrays::from_bytes(&bytes) {
            Ok(back) if back == arrays && back.to_trajectory().is_ok_and(|t| t == traj) => {}
            _ => mismatches += 1,
        }
        // Structural corruption of the preamble or header.
        let hlen = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let mut bad = bytes.clone();
        match i % 5 {
            0 => bad[rng.below(4) as usize] ^= 1 + rng.below(255) as u8,
            1 => {
                let delta = 1 + rng.below(1000);
                let len = if rng.below(2) == 0 { hlen as u32 + delta } else { (hlen as u32).saturating_sub(delta) };
                bad[4..8].copy_from_slice(&len.to_le_bytes());
            }
            2 => bad.truncate(rng.below(8 + hlen as u32) as usize),
            3 => bad[8 + rng.below(hlen as u32) as usize] = 0,
            _ => {
                let text = String::from_utf8(bytes[8..8 + hlen].to_vec()).unwrap();
                let tampered = text.replacen("\"nbytes\":", "\"nbytes\":1", 1);
                bad = [&bytes[..4], &(tampered.len() as u32).to_le_bytes()[..], tampered.as_bytes(), &bytes[8 + hlen..]].concat();
            }
        }
        if !matches!(parse_header(&bad), Err(Error::MalformedContainer(_))) {
            accepted_corrupt += 1;
        }
    }
    outcome(
        mismatches == 0 && accepted_corrupt == 0,
        format!("1000 round trips, {mismatches} mismatches, {accepted_corrupt} corrupted headers accepted"),
    )
}

fn cfg_utility() -> Outcome {
    let cond = [1.0, 2.0];
    let identity = cfg_combine(&cond, &[0.0, 1.0], 0.0).unwrap() == cond;
    let fixed = cfg_combine(&cond, &cond, 3.0).unwrap() == cond;
    let example = cfg_combine(&cond, &[0.0, 1.0], 1.5).unwrap() == [2.5, 3.5];
    outcome(identity && fixed && example, format!("identity {identity}, fixed point {fixed}, example {example}"))
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let results = [
        check("metric exactness", s(1), metric_exactness),
        check("reward contract", s(30), reward_contract),
        check("caption rule suite", s(10), caption_suite),
        check("noop filter", s(10), noop_suite),
        check("relabeling", s(120), relabel_suite),
        check("determinism", s(120), determinism),
        check("expert capability", s(600), expert_capability),
        check("throughput", s(600), throughput),
        check("format conformance", s(600), format_conformance),
        check("cfg utility", s(1), cfg_utility),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    report(&format!("{passed}/{} criteria passed", results.len()));
    assert_eq!(passed, results.len());
}
