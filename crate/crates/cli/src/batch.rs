//! Parallel processing of a directory of problem files.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::format::ResultFile;
use crate::problem::Overrides;

/// `*.json` files of `dir`, sorted by name.
pub fn problem_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every file on a pool of worker threads, one instance per worker at
/// a time. Results come back in the order of `files`.
pub fn run_files(files: &[PathBuf], overrides: &Overrides) -> Vec<ResultFile> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(files.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<ResultFile>>> = Mutex::new(vec![None; files.len()]);
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                let result = run_path(path, overrides);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(result);
            });
        }
    });
    slots.into_inner().expect("workers joined").into_iter().map(|r| r.expect("every slot filled")).collect()
}

pub fn run_path(path: &Path, overrides: &Overrides) -> ResultFile {
    match crate::problem::read_problem(path, overrides) {
        Ok(p) => crate::runner::run(&p),
        Err(e) => crate::runner::invalid_input(&e),
    }
}
