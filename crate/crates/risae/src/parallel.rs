//! Chunked Monte Carlo across worker threads.

use risae_core::baseline::ErrorCount;

/// Sums `run(c)` over chunks `0..n_chunks` using up to `workers` threads.
/// Worker `w` takes chunks `w, w + workers, …`; counts are integers, so
/// the total is the same for every worker count.
pub fn run_chunks<F>(n_chunks: u64, workers: usize, run: F) -> ErrorCount
where
    F: Fn(u64) -> ErrorCount + Sync,
{
    let workers = workers.clamp(1, n_chunks.max(1) as usize) as u64;
    if workers == 1 {
        return (0..n_chunks).map(&run).fold(ErrorCount::default(), ErrorCount::merge);
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let run = &run;
                scope.spawn(move || {
                    (w..n_chunks)
                        .step_by(workers as usize)
                        .map(run)
                        .fold(ErrorCount::default(), ErrorCount::merge)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .fold(ErrorCount::default(), ErrorCount::merge)
    })
}

/// Worker count used when none is given.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
