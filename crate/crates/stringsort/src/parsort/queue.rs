use std::collections::VecDeque;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};

type Job<'s> = Box<dyn FnOnce(&JobQueue<'s>) + Send + 's>;

struct State<'s> {
    jobs: VecDeque<Job<'s>>,
    /// Jobs enqueued but not yet finished.
    pending: usize,
}

/// Shared job queue worked on by a fixed set of threads.
///
/// Jobs may enqueue further jobs. [`JobQueue::run`] returns once no job is
/// queued or running. Busy jobs consult [`JobQueue::has_idle`] to decide
/// whether to publish part of their work.
pub struct JobQueue<'s> {
    state: Mutex<State<'s>>,
    wake: Condvar,
    idle: AtomicUsize,
    threads: usize,
    enqueued: AtomicUsize,
    executed: AtomicUsize,
    shared: AtomicUsize,
}

/// Counters of a finished queue run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueueCounts {
    pub enqueued: usize,
    pub executed: usize,
    /// Jobs published by busy workers for idle ones.
    pub shared: usize,
}

impl<'s> JobQueue<'s> {
    pub fn new(threads: usize) -> Self {
        Self {
            state: Mutex::new(State { jobs: VecDeque::new(), pending: 0 }),
            wake: Condvar::new(),
            idle: AtomicUsize::new(0),
            threads: threads.max(1),
            enqueued: AtomicUsize::new(0),
            executed: AtomicUsize::new(0),
            shared: AtomicUsize::new(0),
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn enqueue(&self, job: impl FnOnce(&JobQueue<'s>) + Send + 's) {
        let mut state = self.state.lock().expect("queue lock");
        state.jobs.push_back(Box::new(job));
        state.pending += 1;
        self.enqueued.fetch_add(1, Ordering::Relaxed);
        drop(state);
        self.wake.notify_one();
    }

    /// Enqueues a job split off from a running one for an idle worker.
    pub fn share(&self, job: impl FnOnce(&JobQueue<'s>) + Send + 's) {
        self.shared.fetch_add(1, Ordering::Relaxed);
        self.enqueue(job);
    }

    /// Whether some worker waits for work. A relaxed read: stale answers
    /// only delay or add one publication.
    #[inline]
    pub fn has_idle(&self) -> bool {
        self.idle.load(Ordering::Relaxed) > 0
    }

    pub fn counts(&self) -> QueueCounts {
        QueueCounts {
            enqueued: self.enqueued.load(Ordering::Relaxed),
            executed: self.executed.load(Ordering::Relaxed),
            shared: self.shared.load(Ordering::Relaxed),
        }
    }

    /// Works through all jobs, including those enqueued while running, on
    /// `threads` threads (the caller's thread when there is one).
    pub fn run(&self) {
        if self.threads == 1 {
            self.worker();
            return;
        }
        std::thread::scope(|scope| {
            for _ in 0..self.threads {
                scope.spawn(|| self.worker());
            }
        });
    }

    fn worker(&self) {
        let mut state = self.state.lock().expect("queue lock");
        loop {
            if let Some(job) = state.jobs.pop_front() {
                drop(state);
                job(self);
                self.executed.fetch_add(1, Ordering::Relaxed);
                state = self.state.lock().expect("queue lock");
                state.pending -= 1;
                if state.pending == 0 {
                    self.wake.notify_all();
                }
            } else if state.pending == 0 {
                return;
            } else {
                self.idle.fetch_add(1, Ordering::Relaxed);
                state = self.wake.wait(state).expect("queue lock");
                self.idle.fetch_sub(1, Ordering::Relaxed);
            }
        }
    }
}
