//! Multi-start optimization spread over threads.
//!
//! The result never depends on the thread count: starts run in batches, the
//! winner is picked in start order, and the early stop at `target_cost`
//! looks only at starts that precede the first one reaching it.

use oqsim_core::ansatz::OptResult;

/// Name of the environment variable holding the worker count.
pub const THREADS_ENV: &str = "OQSIM_THREADS";

/// Worker count from `OQSIM_THREADS`, else the machine's parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Run `run` from every start and return the same result a sequential loop
/// with early stopping at `target` would.
pub fn best_start<E, F>(inits: &[Vec<f64>], target: Option<f64>, threads: usize, run: F) -> Result<OptResult, E>
where
    E: Send,
    F: Fn(&[f64]) -> Result<OptResult, E> + Sync,
{
    let threads = threads.max(1);
    let mut best: Option<OptResult> = None;
    for batch in inits.chunks(threads) {
        let results: Vec<Result<OptResult, E>> = if batch.len() == 1 {
            vec![run(&batch[0])]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = batch.iter().map(|x0| s.spawn(|| run(x0))).collect();
                handles.into_iter().map(|h| h.join().expect("optimizer thread panicked")).collect()
            })
        };
        for r in results {
            let r = r?;
            let done = target.is_some_and(|t| r.best_cost <= t);
            if best.as_ref().is_none_or(|b| r.best_cost < b.best_cost) {
                best = Some(r);
            }
            if done {
                return Ok(best.expect("set above"));
            }
        }
    }
    Ok(best.expect("at least one start"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake(cost: f64) -> OptResult {
        OptResult { best_params: vec![cost], best_cost: cost, iterations: 0, converged: true, cost_history: vec![cost] }
    }

    #[test]
    fn thread_count_does_not_change_the_winner() {
        let inits: Vec<Vec<f64>> = [0.5, 0.3, 0.01, 0.001, 0.2].iter().map(|&c| vec![c]).collect();
        let run = |x: &[f64]| Ok::<_, ()>(fake(x[0]));
        for target in [None, Some(0.05)] {
            let serial = best_start(&inits, target, 1, run).unwrap();
            for t in 2..=6 {
                assert_eq!(best_start(&inits, target, t, run).unwrap(), serial);
            }
        }
        assert_eq!(best_start(&inits, Some(0.05), 4, run).unwrap().best_cost, 0.01);
        assert_eq!(best_start(&inits, None, 4, run).unwrap().best_cost, 0.001);
    }

    #[test]
    fn errors_propagate() {
        let inits = vec![vec![1.0], vec![2.0]];
        let r = best_start(&inits, None, 2, |x: &[f64]| if x[0] > 1.5 { Err("boom") } else { Ok(fake(x[0])) });
        assert_eq!(r, Err("boom"));
    }
}
