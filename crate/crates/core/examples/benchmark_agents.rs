//! Scores the built-in agents and runs the chained planner on every task.
//!
//! `cargo run --release --example benchmark_agents -- [episodes] [max_steps]`

use crafter_foundry::eval::{run_benchmark, run_task_episode, BuiltinAgent, TaskSpec, TASK_IDS};
use crafter_foundry::expert::ChainedAgent;
use crafter_foundry::EnvConfig;

fn main() -> crafter_foundry::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("numeric argument"));
    let episodes = args.next().unwrap_or(20);
    let max_steps = args.next().unwrap_or(2000);

    for agent in BuiltinAgent::ALL {
        let r = run_benchmark(agent.name(), |s| agent.make(s), episodes, &EnvConfig::default(), max_steps)?;
        println!("{:<7} score {:>6.2}  return {:>6.2}%  survival {:>5.1}%", agent.name(), r.score, r.normalized_return, r.survival_rate);
    }

    println!();
    for id in TASK_IDS {
        let spec = TaskSpec::by_id(id)?;
        let mut done = 0;
        for seed in 0..10 {
            let mut agent = ChainedAgent::new(spec.clone(), seed)?;
            done += run_task_episode(&spec, seed, |s, c| agent.act(s, c))?.completed as u32;
        }
        println!("{id:<20} {done}/10");
    }
    Ok(())
}
