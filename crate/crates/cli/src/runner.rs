//! Multi-worker search driver with periodic and interrupt-triggered
//! checkpointing.
//!
//! The frontier is a shared stack of nodes; expansion is a pure function, so
//! any worker may take any node and the result set cannot depend on
//! scheduling. Results are merged into an ordered set keyed by canonical
//! form and returned sorted, which makes the output identical for any worker
//! count. Checkpointing pauses intake, drains in-flight expansions, then
//! snapshots the frontier and results.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use spoof_core::search::{
    accept_result, expand, seeds, Expansion, SearchConfig, SearchContext, SearchNode,
};
use spoof_core::Factorization;

use crate::checkpoint::{self, Checkpoint, CheckpointError};

#[derive(Clone, Debug)]
pub struct RunnerConfig {
    pub search: SearchConfig,
    pub workers: usize,
    pub checkpoint_path: Option<PathBuf>,
    pub checkpoint_interval: Duration,
}

impl RunnerConfig {
    pub fn new(search: SearchConfig) -> Self {
        RunnerConfig {
            search,
            workers: 1,
            checkpoint_path: None,
            checkpoint_interval: Duration::from_secs(60),
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    /// Canonically sorted results; complete unless `interrupted`.
    pub results: Vec<Factorization>,
    /// True when the run stopped early on the stop flag.
    pub interrupted: bool,
}

struct Shared {
    frontier: Vec<SearchNode>,
    in_flight: usize,
    results: BTreeSet<Factorization>,
    /// Workers must not take new nodes while a snapshot is pending.
    pause_intake: bool,
    halt: bool,
}

struct Coordinator {
    state: Mutex<Shared>,
    wake: Condvar,
}

/// Runs the search to completion (or until `stop` is raised), streaming each
/// newly found factorization through `on_result`.
pub fn run(
    config: &RunnerConfig,
    resume: Option<Checkpoint>,
    stop: Option<&AtomicBool>,
    mut on_result: impl FnMut(&Factorization) + Send,
) -> Result<RunOutcome, CheckpointError> {
    let workers = config.workers.max(1);
    let (frontier, results) = match resume {
        Some(ck) => (ck.frontier, ck.results.into_iter().collect()),
        None => (seeds(&config.search), BTreeSet::new()),
    };
    let coordinator = Coordinator {
        state: Mutex::new(Shared {
            frontier,
            in_flight: 0,
            results,
            pause_intake: false,
            halt: false,
        }),
        wake: Condvar::new(),
    };
    // channel-free streaming: emissions are forwarded under the state lock
    let emit = Mutex::new(&mut on_result);

    let interrupted = std::thread::scope(|scope| -> Result<bool, CheckpointError> {
        for _ in 0..workers {
            scope.spawn(|| worker_loop(&coordinator, config, &emit));
        }
        let outcome = supervise(&coordinator, config, stop);
        // on supervisor error, make sure the workers still shut down
        if outcome.is_err() {
            let mut state = coordinator.state.lock().unwrap();
            state.halt = true;
            coordinator.wake.notify_all();
        }
        outcome
    })?;

    let state = coordinator.state.into_inner().unwrap();
    Ok(RunOutcome { results: state.results.into_iter().collect(), interrupted })
}

fn worker_loop(
    coordinator: &Coordinator,
    config: &RunnerConfig,
    emit: &Mutex<&mut (impl FnMut(&Factorization) + Send)>,
) {
    let mut ctx = SearchContext::new();
    loop {
        let node = {
            let mut state = coordinator.state.lock().unwrap();
            loop {
                if state.halt {
                    return;
                }
                if !state.pause_intake {
                    if let Some(node) = state.frontier.pop() {
                        state.in_flight += 1;
                        break node;
                    }
                    if state.in_flight == 0 {
                        // nothing left anywhere: search is complete
                        state.halt = true;
                        coordinator.wake.notify_all();
                        return;
                    }
                }
                state = coordinator.wake.wait(state).unwrap();
            }
        };
        let expansion = expand(&node, &config.search, &mut ctx);
        let mut state = coordinator.state.lock().unwrap();
        match expansion {
            Expansion::Complete(f) => {
                if accept_result(&f, &config.search) && state.results.insert(f.clone()) {
                    (emit.lock().unwrap())(&f);
                }
            }
            Expansion::Children(children) => state.frontier.extend(children),
        }
        state.in_flight -= 1;
        coordinator.wake.notify_all();
    }
}

/// Waits for completion, writing a checkpoint every interval and once more
/// on a stop request. Returns whether the run was interrupted.
fn supervise(
    coordinator: &Coordinator,
    config: &RunnerConfig,
    stop: Option<&AtomicBool>,
) -> Result<bool, CheckpointError> {
    let poll = Duration::from_millis(25);
    let mut since_checkpoint = Duration::ZERO;
    loop {
        {
            let state = coordinator.state.lock().unwrap();
            if state.halt {
                return Ok(false);
            }
        }
        std::thread::sleep(poll);
        since_checkpoint += poll;
        let stopping = stop.is_some_and(|flag| flag.load(Ordering::Relaxed));
        if stopping || (config.checkpoint_path.is_some() && since_checkpoint >= config.checkpoint_interval)
        {
            since_checkpoint = Duration::ZERO;
            let done = write_snapshot(coordinator, config, stopping)?;
            if stopping {
                return Ok(!done);
            }
        }
    }
}

/// Pauses intake, drains in-flight expansions, snapshots, and resumes (or
/// halts when `and_halt`). Returns true when the search had already finished
/// by the time the snapshot drained.
fn write_snapshot(
    coordinator: &Coordinator,
    config: &RunnerConfig,
    and_halt: bool,
) -> Result<bool, CheckpointError> {
    let mut state = coordinator.state.lock().unwrap();
    state.pause_intake = true;
    while state.in_flight > 0 && !state.halt {
        state = coordinator.wake.wait(state).unwrap();
    }
    let done = state.halt && state.frontier.is_empty() && state.in_flight == 0;
    let snapshot = config.checkpoint_path.as_ref().map(|path| {
        let checkpoint = Checkpoint {
            max_bases: config.search.max_bases,
            require_primitive: config.search.require_primitive,
            frontier: state.frontier.clone(),
            results: state.results.iter().cloned().collect(),
        };
        (checkpoint, path.clone())
    });
    state.pause_intake = false;
    if and_halt {
        state.halt = true;
    }
    coordinator.wake.notify_all();
    drop(state);
    if let Some((checkpoint, path)) = snapshot {
        checkpoint::save(&checkpoint, &path)?;
    }
    Ok(done)
}
