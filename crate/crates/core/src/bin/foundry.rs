use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crafter_foundry::bridge::{serve_stdio, TcpServer};
use crafter_foundry::caption::{generate_caption_dataset, load_paraphrases, CaptionDatasetOptions};
use crafter_foundry::datakit::{
    export_goal_dataset, inspect_episode, noop_filter, read_episode, KeepMask, RelabelConfig, DEFAULT_NOOP_THRESHOLD,
};
use crafter_foundry::eval::{
    measure_throughput, run_benchmark, run_task_episode, BuiltinAgent, TaskOutcome, TaskSpec, TASK_IDS,
};
use crafter_foundry::expert::{generate_play, ChainedAgent, PlayOptions, DEFAULT_MAX_STEPS};
use crafter_foundry::render::{export_gif, save_png};
use crafter_foundry::{EnvConfig, Error, Result};

/// Deterministic Crafter-compatible environment, dataset foundry and evaluation harness.
#[derive(Parser, Debug)]
#[command(name = "foundry", version)]
struct Cli {
    /// Default directory for outputs when a command's own path flag is omitted.
    #[arg(long, global = true, env = "FOUNDRY_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Roll out the scripted expert and write episode containers plus a manifest.
    GenPlay(GenPlay),
    /// Detect caption events over a play dataset.
    GenCaptions(GenCaptions),
    /// Filter noops and relabel a play dataset into goal-conditioned chunks.
    Relabel(Relabel),
    /// Show which steps of an episode survive noop filtering.
    FilterNoops(FilterNoops),
    /// Score an agent over seeds 0..n, or measure raw throughput.
    Benchmark(Benchmark),
    /// Run a sequenced task and print each episode's completion log.
    Task(Task),
    /// Export frames of an episode as PNG or GIF.
    Render(Render),
    /// Serve environments over the length-prefixed JSON protocol.
    Serve(Serve),
    /// Print a container header.
    Inspect(Inspect),
}

#[derive(Args, Debug)]
struct GenPlay {
    /// Base seed; episode i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    episodes: usize,
    /// Output directory [default: <out-dir>/play].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
    /// Store RGB frames in the containers.
    #[arg(long)]
    frames: bool,
    /// Disable mobs, decay and hazards (the default world adds a death penalty).
    #[arg(long)]
    peaceful: bool,
}

#[derive(Args, Debug)]
struct GenCaptions {
    /// Play dataset directory or its manifest.
    #[arg(long)]
    play: PathBuf,
    /// Output JSONL [default: <out-dir>/captions.jsonl].
    #[arg(long)]
    out: Option<PathBuf>,
    /// YAML paraphrase table; adds a sampled paraphrase to each record.
    #[arg(long)]
    paraphrases: Option<PathBuf>,
    /// Paraphrase options per caption, counting the original.
    #[arg(long, default_value_t = 41)]
    variants: usize,
    /// Subsample every category to the size of the rarest.
    #[arg(long)]
    balance: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Relabel {
    /// Play dataset directory or its manifest.
    #[arg(long)]
    play: PathBuf,
    /// Caption JSONL from gen-captions.
    #[arg(long)]
    captions: PathBuf,
    /// Output JSONL [default: <out-dir>/goals.jsonl].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shortest chunk, in kept steps.
    #[arg(long, default_value_t = 1)]
    min_goal_steps: u32,
    /// Longest chunk, in kept steps.
    #[arg(long, default_value_t = 10)]
    max_goal_steps: u32,
    /// Chance that a chunk gets no goal.
    #[arg(long, default_value_t = 0.1)]
    uncond_probability: f64,
    /// Ignore caption segments when chunking.
    #[arg(long)]
    packed: bool,
    /// Noop runs shorter than this are dropped.
    #[arg(long, default_value_t = DEFAULT_NOOP_THRESHOLD)]
    noop_threshold: usize,
    /// Keep every step.
    #[arg(long)]
    no_filter: bool,
}

#[derive(Args, Debug)]
struct FilterNoops {
    /// Episode container.
    episode: PathBuf,
    /// Noop runs shorter than this are dropped.
    #[arg(long, default_value_t = DEFAULT_NOOP_THRESHOLD)]
    threshold: usize,
    /// Write the mask as a JSON bool array.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Benchmark {
    /// expert, noop or random.
    #[arg(long, default_value = "expert")]
    agent: String,
    #[arg(long, default_value_t = 100)]
    episodes: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
    /// Report directory [default: <out-dir>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Measure stepping and rendering speed instead of scoring an agent.
    #[arg(long)]
    throughput: bool,
    /// Steps for the throughput run.
    #[arg(long, default_value_t = 1_000_000)]
    steps: u64,
    /// Frames for the throughput run.
    #[arg(long, default_value_t = 20_000)]
    render_frames: u64,
}

#[derive(Args, Debug)]
struct Task {
    /// T1..T4 or a single-instruction task name.
    #[arg(long)]
    id: String,
    /// chained, expert, noop or random.
    #[arg(long, default_value = "chained")]
    agent: String,
    #[arg(long, default_value_t = 1)]
    episodes: usize,
    /// First seed; episode i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write outcomes as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Render {
    /// Episode container.
    episode: PathBuf,
    /// Output file; `.gif` exports a clip, anything else one PNG frame.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Frame for PNG output, first frame for GIF output.
    #[arg(long, default_value_t = 0)]
    frame: usize,
    /// Last frame (inclusive) for GIF output [default: the final frame].
    #[arg(long)]
    end: Option<usize>,
    /// GIF frame delay in hundredths of a second.
    #[arg(long, default_value_t = 10)]
    delay: u16,
}

#[derive(Args, Debug)]
struct Serve {
    /// Speak the protocol on stdin/stdout.
    #[arg(long, conflicts_with = "tcp")]
    stdio: bool,
    /// TCP address to listen on.
    #[arg(long, default_value = "127.0.0.1:7878")]
    tcp: String,
    /// Default to the peaceful world for resets without a config.
    #[arg(long)]
    peaceful: bool,
}

#[derive(Args, Debug)]
struct Inspect {
    /// Episode container.
    episode: PathBuf,
}

fn config(peaceful: bool) -> EnvConfig {
    if peaceful {
        EnvConfig::peaceful()
    } else {
        EnvConfig::default()
    }
}

fn or_default(path: Option<PathBuf>, out_dir: &Path, name: &str) -> PathBuf {
    path.unwrap_or_else(|| out_dir.join(name))
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("value serializes")
}

fn write_text(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn usage(msg: String) -> Error {
    Error::InvalidConfig(msg)
}

fn run(cli: Cli) -> Result<()> {
    let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(usage("--workers must be at least 1".into()));
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    let out_dir = cli.out_dir;
    match cli.cmd {
        Cmd::GenPlay(a) => {
            let out = or_default(a.out, &out_dir, "play");
            let config = if a.peaceful { EnvConfig::peaceful() } else { EnvConfig::expert() };
            let opts = PlayOptions { config, max_steps: a.max_steps, record_frames: a.frames };
            let m = generate_play(a.seed, a.episodes, &out, workers, &opts)?;
            let survived = m.entries.iter().filter(|e| e.survived).count();
            println!("wrote {} episodes to {} ({survived} survived)", m.entries.len(), out.display());
        }
        Cmd::GenCaptions(a) => {
            let out = or_default(a.out, &out_dir, "captions.jsonl");
            let table = a.paraphrases.as_deref().map(load_paraphrases).transpose()?;
            let opts = CaptionDatasetOptions { balance: a.balance, seed: a.seed, variants_cap: a.variants };
            let s = generate_caption_dataset(&a.play, &out, table.as_ref(), &opts)?;
            println!("wrote {} of {} records from {} episodes to {}", s.written, s.detected, s.episodes, out.display());
            for (cat, n) in &s.per_category {
                println!("  {:<14}{n}", cat.name());
            }
        }
        Cmd::Relabel(a) => {
            let out = or_default(a.out, &out_dir, "goals.jsonl");
            let cfg = RelabelConfig {
                min_goal_steps: a.min_goal_steps,
                max_goal_steps: a.max_goal_steps,
                uncond_probability: a.uncond_probability,
                seed: a.seed,
                event_based: !a.packed,
            };
            let threshold = (!a.no_filter).then_some(a.noop_threshold);
            let s = export_goal_dataset(&a.play, &a.captions, &cfg, threshold, &out)?;
            println!(
                "wrote {} chunks ({} unconditional) over {} of {} steps in {} episodes to {}",
                s.chunks,
                s.null_goals,
                s.kept_steps,
                s.total_steps,
                s.episodes,
                out.display()
            );
        }
        Cmd::FilterNoops(a) => {
            let actions = read_episode(&a.episode)?.actions()?;
            let mask = noop_filter(&actions, a.threshold)?;
            println!("kept {} of {} steps", mask.kept(), mask.len());
            if let Some(out) = a.out {
                let KeepMask(flags) = mask;
                write_text(&out, &serde_json::to_string(&flags).expect("mask serializes"))?;
            }
        }
        Cmd::Benchmark(a) => {
            let out = a.out.unwrap_or(out_dir);
            if a.throughput {
                let t = measure_throughput(a.steps, a.render_frames, 0)?;
                println!("{:.0} steps/s, {:.0} frames/s", t.steps_per_second, t.frames_per_second);
                write_text(&out.join("throughput.json"), &json(&t))?;
                return Ok(());
            }
            let agent = BuiltinAgent::from_name(&a.agent)
                .ok_or_else(|| usage(format!("unknown agent {:?}; expected expert, noop or random", a.agent)))?;
            let report =
                run_benchmark(agent.name(), |seed| agent.make(seed), a.episodes, &EnvConfig::default(), a.max_steps)?;
            print!("{}", report.to_text());
            report.write(&out, &format!("benchmark_{}", agent.name()))?;
        }
        Cmd::Task(a) => {
            let spec = TaskSpec::by_id(&a.id)
                .map_err(|_| usage(format!("unknown task {:?}; expected one of {}", a.id, TASK_IDS.join(", "))))?;
            let mut outcomes: Vec<TaskOutcome> = Vec::new();
            for i in 0..a.episodes as u64 {
                let seed = a.seed + i;
                let outcome = if a.agent == "chained" {
                    let mut agent = ChainedAgent::new(spec.clone(), seed)?;
                    run_task_episode(&spec, seed, |s, cursor| agent.act(s, cursor))?
                } else {
                    let kind = BuiltinAgent::from_name(&a.agent)
                        .ok_or_else(|| usage(format!("unknown agent {:?}", a.agent)))?;
                    let mut agent = kind.make(seed);
                    run_task_episode(&spec, seed, |s, _| Ok(agent.act(s)))?
                };
                let log: Vec<String> = outcome.log.iter().map(|(t, ach)| format!("{ach}@{t}")).collect();
                println!(
                    "seed {seed}: {} in {} steps, reward {} [{}]",
                    if outcome.completed { "complete" } else { "incomplete" },
                    outcome.steps,
                    outcome.reward,
                    log.join(" ")
                );
                outcomes.push(outcome);
            }
            let done = outcomes.iter().filter(|o| o.completed).count();
            println!("{}: {done}/{} complete", spec.id, outcomes.len());
            if let Some(out) = a.out {
                write_text(&out, &json(&outcomes))?;
            }
        }
        Cmd::Render(a) => {
            let arrays = read_episode(&a.episode)?;
            let frames: Vec<_> = if arrays.has_frames() {
                (0..=arrays.actions()?.len()).filter_map(|i| arrays.frame(i)).collect()
            } else {
                arrays.to_trajectory()?.frames_or_render()
            };
            let end = a.end.unwrap_or(frames.len() - 1);
            if a.frame > end || end >= frames.len() {
                return Err(usage(format!("frame range {}..={end} outside 0..{}", a.frame, frames.len())));
            }
            let out = or_default(a.out, &out_dir, "frame.png");
            if out.extension().is_some_and(|e| e == "gif") {
                export_gif(&frames[a.frame..=end], &out, a.delay)?;
            } else {
                save_png(&frames[a.frame], &out)?;
            }
            println!("wrote {}", out.display());
        }
        Cmd::Serve(a) => {
            let cfg = config(a.peaceful);
            if a.stdio {
                serve_stdio(cfg)?;
            } else {
                let server = TcpServer::bind(&a.tcp, cfg)?;
                eprintln!("listening on {}", server.local_addr()?);
                server.run()?;
            }
        }
        Cmd::Inspect(a) => println!("{}", json(&inspect_episode(&a.episode)?)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ (Error::InvalidConfig(_) | Error::UnknownTask(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
