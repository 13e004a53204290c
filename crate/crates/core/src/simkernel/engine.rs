//! Execution of independent, index-keyed tasks.
//!
//! Results always come back in index order, so any aggregation performed
//! afterwards is identical for every worker count.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon thread pool; `None` uses the global pool. Without the
    /// `parallel` feature this runs sequentially.
    Parallel { workers: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engine {
    execution: Execution,
}

impl Default for Engine {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Engine::parallel(None)
        } else {
            Engine::sequential()
        }
    }
}

impl Engine {
    pub fn sequential() -> Self {
        Engine {
            execution: Execution::Sequential,
        }
    }

    pub fn parallel(workers: Option<usize>) -> Self {
        Engine {
            execution: Execution::Parallel { workers },
        }
    }

    /// `Some(1)` maps to sequential execution, `None` to the default.
    pub fn with_workers(workers: Option<usize>) -> Self {
        match workers {
            Some(1) => Engine::sequential(),
            Some(n) => Engine::parallel(Some(n.max(1))),
            None => Engine::default(),
        }
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    /// `(0..n).map(f)`, possibly evaluated concurrently.
    pub fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self.execution {
            Execution::Sequential => (0..n).map(f).collect(),
            Execution::Parallel { workers } => parallel_map(n, workers, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(n: usize, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..n).into_par_iter().map(&f).collect();
    match workers {
        None => run(),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(run),
            Err(_) => (0..n).map(&f).collect(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(n: usize, _workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        for e in [Engine::sequential(), Engine::parallel(None), Engine::parallel(Some(3))] {
            let v = e.map_indexed(1000, |i| i * i);
            assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
        }
    }

    #[test]
    fn worker_mapping() {
        assert_eq!(Engine::with_workers(Some(1)).execution(), Execution::Sequential);
        assert_eq!(
            Engine::with_workers(Some(8)).execution(),
            Execution::Parallel { workers: Some(8) }
        );
    }
}
