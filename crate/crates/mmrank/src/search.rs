//! Randomized flip graph walk with greedy reductions, stall-triggered
//! escape splits and restarts from the best known scheme, plus the
//! multi-worker orchestration around it.
//!
//! The walk policy: apply every available reduction (re-scanning after
//! each), otherwise take one uniformly random flip. When no rank
//! improvement has happened for `escape_after` steps, inject a split,
//! capped at `max_splits_above_best` above the best known rank; after
//! `restart_after` stalled steps, restart from the best scheme. Workers
//! share a monotone best-rank register and may restart from the global
//! best; readers seeing a stale best only costs efficiency.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::io::serialize_with_notes;
use crate::scheme::{AnyScheme, Format, Gf2Scheme, Slot, Term};

/// Walk budget and policy knobs. All counts are per worker.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Flips + splits budget per worker.
    pub max_steps: u64,
    /// Steps without improvement before a split is injected.
    pub escape_after: u64,
    /// Cap on the current rank's excess over the best known rank.
    pub max_splits_above_best: u32,
    /// Steps without improvement before restarting from the best scheme.
    pub restart_after: u64,
    pub seed: u64,
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_rank: Option<usize>,
    /// Optional wall-clock bound; budget-based runs stay deterministic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit_secs: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_steps: 10_000_000,
            escape_after: 10_000,
            max_splits_above_best: 3,
            restart_after: 1_000_000,
            seed: 0,
            workers: 1,
            target_rank: None,
            time_limit_secs: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.escape_after == 0 || self.restart_after == 0 || self.workers == 0 {
            return Err(Error::InvalidScheme(
                "search config counts must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// The per-worker random stream: worker w draws from seed ^ w.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ worker as u64)
}

/// A best-rank improvement event.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Improvement {
    pub worker: usize,
    pub step: u64,
    pub rank: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct WorkerStats {
    pub worker: usize,
    /// Seed of this worker's random stream.
    pub seed: u64,
    pub steps: u64,
    pub flips: u64,
    pub splits: u64,
    pub reductions: u64,
    pub restarts: u64,
}

/// Final state of a run: the best verified scheme, the improvement
/// history and per-worker counters.
#[derive(Clone, Debug)]
pub struct RunState {
    pub best: Gf2Scheme,
    pub history: Vec<Improvement>,
    pub workers: Vec<WorkerStats>,
    pub wall: Duration,
}

impl RunState {
    pub fn best_rank(&self) -> usize {
        self.best.rank()
    }
}

/// Shared monotone best register. The rank hint never increases; the
/// scheme slot only ever holds verified schemes.
struct Register {
    inner: Mutex<RegisterInner>,
    rank_hint: AtomicUsize,
    stop: AtomicBool,
}

struct RegisterInner {
    best: Gf2Scheme,
    history: Vec<Improvement>,
    run_dir: Option<PathBuf>,
    io_error: Option<String>,
}

impl Register {
    fn new(best: Gf2Scheme, run_dir: Option<PathBuf>) -> Self {
        let rank = best.rank();
        Register {
            inner: Mutex::new(RegisterInner {
                best,
                history: Vec::new(),
                run_dir,
                io_error: None,
            }),
            rank_hint: AtomicUsize::new(rank),
            stop: AtomicBool::new(false),
        }
    }

    fn stopped(&self) -> bool {
        self.stop.load(Ordering::Relaxed)
    }

    fn best_rank_hint(&self) -> usize {
        self.rank_hint.load(Ordering::Relaxed)
    }

    fn best_clone(&self) -> Gf2Scheme {
        self.inner.lock().unwrap().best.clone()
    }

    /// Install a strictly better verified scheme; returns whether the
    /// global best improved.
    fn try_improve(
        &self,
        worker: usize,
        step: u64,
        scheme: Gf2Scheme,
        target: Option<usize>,
    ) -> bool {
        let rank = scheme.rank();
        let mut inner = self.inner.lock().unwrap();
        if rank >= inner.best.rank() {
            return false;
        }
        inner.best = scheme;
        inner.history.push(Improvement { worker, step, rank });
        self.rank_hint.store(rank, Ordering::Relaxed);
        if target.is_some_and(|t| rank <= t) {
            self.stop.store(true, Ordering::Relaxed);
        }
        if let Some(dir) = inner.run_dir.clone() {
            let notes = vec![
                format!("rank {rank} at step {step} by worker {worker}"),
            ];
            let text = serialize_with_notes(&AnyScheme::Gf2(inner.best.clone()), &notes);
            let write = std::fs::write(dir.join(format!("best-r{rank:03}-s{step}.scheme")), &text)
                .and_then(|_| std::fs::write(dir.join("best.scheme"), &text));
            if let Err(e) = write {
                inner.io_error.get_or_insert(e.to_string());
            }
        }
        true
    }
}

/// One component-equality group within a slot index.
struct Group {
    key: Gf2Matrix,
    members: Vec<u32>,
}

/// Terms grouped by one component slot, with the running count of
/// ordered flip pairs. Group order is event-driven and deterministic;
/// the hash map is only a key lookup.
#[derive(Default)]
struct SlotIndex {
    groups: Vec<Group>,
    lookup: HashMap<Gf2Matrix, u32>,
    pairs: u64,
}

impl SlotIndex {
    fn clear(&mut self) {
        self.groups.clear();
        self.lookup.clear();
        self.pairs = 0;
    }

    fn add(&mut self, key: &Gf2Matrix, id: u32) {
        match self.lookup.get(key) {
            Some(&g) => {
                let grp = &mut self.groups[g as usize];
                self.pairs += 2 * grp.members.len() as u64;
                grp.members.push(id);
            }
            None => {
                self.lookup.insert(key.clone(), self.groups.len() as u32);
                self.groups.push(Group {
                    key: key.clone(),
                    members: vec![id],
                });
            }
        }
    }

    fn remove(&mut self, key: &Gf2Matrix, id: u32) {
        let g = *self.lookup.get(key).expect("component is indexed") as usize;
        let grp = &mut self.groups[g];
        let pos = grp
            .members
            .iter()
            .position(|&x| x == id)
            .expect("term is in its group");
        grp.members.swap_remove(pos);
        self.pairs -= 2 * grp.members.len() as u64;
        if grp.members.is_empty() {
            self.lookup.remove(&grp.key);
            self.groups.swap_remove(g);
            if g < self.groups.len() {
                *self.lookup.get_mut(&self.groups[g].key).unwrap() = g as u32;
            }
        }
    }

    /// Term ids sharing the given component, including `id` itself.
    fn group_members(&self, key: &Gf2Matrix) -> &[u32] {
        match self.lookup.get(key) {
            Some(&g) => &self.groups[g as usize].members,
            None => &[],
        }
    }
}

struct Walker<'a> {
    format: Format,
    cfg: &'a SearchConfig,
    register: &'a Register,
    worker: usize,
    rng: ChaCha8Rng,
    terms: Vec<Option<Term<Gf2Matrix>>>,
    free: Vec<u32>,
    live: usize,
    index: [SlotIndex; 3],
    queue: Vec<u32>,
    best_rank: usize,
    steps: u64,
    flips: u64,
    splits: u64,
    reductions: u64,
    restarts: u64,
    last_improve_step: u64,
    last_escape_step: u64,
}

impl<'a> Walker<'a> {
    fn new(
        start: &Gf2Scheme,
        cfg: &'a SearchConfig,
        register: &'a Register,
        worker: usize,
        rng: ChaCha8Rng,
    ) -> Self {
        let mut w = Walker {
            format: start.format(),
            cfg,
            register,
            worker,
            rng,
            terms: Vec::with_capacity(start.rank() + 8),
            free: Vec::new(),
            live: 0,
            index: Default::default(),
            queue: Vec::new(),
            best_rank: start.rank(),
            steps: 0,
            flips: 0,
            splits: 0,
            reductions: 0,
            restarts: 0,
            last_improve_step: 0,
            last_escape_step: 0,
        };
        w.load(start.terms());
        w
    }

    fn load(&mut self, terms: &[Term<Gf2Matrix>]) {
        self.terms.clear();
        self.free.clear();
        self.live = 0;
        for idx in &mut self.index {
            idx.clear();
        }
        for t in terms {
            self.insert_term(t.clone());
        }
    }

    fn insert_term(&mut self, t: Term<Gf2Matrix>) -> u32 {
        let id = match self.free.pop() {
            Some(id) => id,
            None => {
                self.terms.push(None);
                (self.terms.len() - 1) as u32
            }
        };
        for slot in Slot::ALL {
            self.index[slot.index()].add(t.slot(slot), id);
        }
        self.terms[id as usize] = Some(t);
        self.live += 1;
        id
    }

    fn remove_term(&mut self, id: u32) -> Term<Gf2Matrix> {
        let t = self.terms[id as usize].take().expect("term is live");
        for slot in Slot::ALL {
            self.index[slot.index()].remove(t.slot(slot), id);
        }
        self.free.push(id);
        self.live -= 1;
        t
    }

    fn change_component(&mut self, id: u32, slot: Slot, new: Gf2Matrix) {
        let t = self.terms[id as usize].as_mut().expect("term is live");
        let old = std::mem::replace(t.slot_mut(slot), new);
        self.index[slot.index()].remove(&old, id);
        let t = self.terms[id as usize].as_ref().unwrap();
        self.index[slot.index()].add(t.slot(slot), id);
    }

    fn term(&self, id: u32) -> &Term<Gf2Matrix> {
        self.terms[id as usize].as_ref().expect("term is live")
    }

    /// Uniformly random flip over all shared-component ordered pairs.
    fn sample_flip(&mut self) -> Option<(Slot, u32, u32)> {
        let total: u64 = self.index.iter().map(|i| i.pairs).sum();
        if total == 0 {
            return None;
        }
        let mut x = self.rng.gen_range(0..total);
        for slot in Slot::ALL {
            let idx = &self.index[slot.index()];
            if x >= idx.pairs {
                x -= idx.pairs;
                continue;
            }
            for grp in &idx.groups {
                let g = grp.members.len() as u64;
                let cnt = g * (g - 1);
                if x < cnt {
                    let i = (x / (g - 1)) as usize;
                    let mut j = (x % (g - 1)) as usize;
                    if j >= i {
                        j += 1;
                    }
                    return Some((slot, grp.members[i], grp.members[j]));
                }
                x -= cnt;
            }
            unreachable!("pair counts are consistent");
        }
        unreachable!("pair counts are consistent");
    }

    /// Apply a flip in place: term i absorbs the sum in the slot after
    /// `shared`, term j in the remaining slot. A zeroed component drops
    /// its term. Created reductions are applied eagerly.
    fn apply_flip(&mut self, shared: Slot, i: u32, j: u32) {
        let u = shared.next();
        let v = u.next();
        let new_u = self.term(i).slot(u).xored(self.term(j).slot(u));
        let new_v = self.term(j).slot(v).xored(self.term(i).slot(v));
        debug_assert!(
            !(new_u.is_zero() && new_v.is_zero()),
            "identical terms are always reduced before the next flip"
        );
        self.queue.clear();
        if new_u.is_zero() {
            self.remove_term(i);
        } else {
            self.change_component(i, u, new_u);
            self.queue.push(i);
        }
        if new_v.is_zero() {
            self.remove_term(j);
        } else {
            self.change_component(j, v, new_v);
            self.queue.push(j);
        }
        self.scan_reductions();
    }

    /// Reduce every pair involving a queued term, re-scanning merged
    /// terms until no reduction remains.
    fn scan_reductions(&mut self) {
        while let Some(t_id) = self.queue.pop() {
            if self.terms[t_id as usize].is_none() {
                continue;
            }
            while let Some(partner) = self.find_reduction_partner(t_id) {
                let shared = self.term(t_id).shared_slots(self.term(partner));
                self.reductions += 1;
                if shared == 3 {
                    self.remove_term(t_id);
                    self.remove_term(partner);
                    break;
                }
                let diff = Slot::ALL
                    .into_iter()
                    .find(|&s| self.term(t_id).slot(s) != self.term(partner).slot(s))
                    .expect("exactly two slots shared");
                let other = self.remove_term(partner);
                let merged = self.term(t_id).slot(diff).xored(other.slot(diff));
                debug_assert!(!merged.is_zero());
                self.change_component(t_id, diff, merged);
            }
        }
    }

    fn full_reduction_pass(&mut self) {
        self.queue.clear();
        for id in 0..self.terms.len() as u32 {
            if self.terms[id as usize].is_some() {
                self.queue.push(id);
            }
        }
        self.scan_reductions();
    }

    /// Smallest live id sharing at least two slots with `t_id`.
    fn find_reduction_partner(&self, t_id: u32) -> Option<u32> {
        let t = self.term(t_id);
        let mut best: Option<u32> = None;
        for slot in Slot::ALL {
            for &cand in self.index[slot.index()].group_members(t.slot(slot)) {
                if cand == t_id || best.is_some_and(|b| b <= cand) {
                    continue;
                }
                if self.term(cand).shared_slots(t) >= 2 {
                    best = Some(cand);
                }
            }
        }
        best
    }

    /// Inject one escape split: uniform live term, uniform splittable
    /// slot, uniform valid mask. Masks that would duplicate an existing
    /// term are resampled, so the no-duplicates invariant holds.
    fn try_split(&mut self) -> bool {
        if self.live == 0 {
            return false;
        }
        let id = loop {
            let cand = self.rng.gen_range(0..self.terms.len()) as u32;
            if self.terms[cand as usize].is_some() {
                break cand;
            }
        };
        let slot = Slot::ALL[self.rng.gen_range(0..3)];
        let current = self.term(id).slot(slot).clone();
        if current.rows() * current.cols() == 1 {
            return false;
        }
        for _ in 0..16 {
            let mask = Gf2Matrix::random(current.rows(), current.cols(), &mut self.rng);
            if mask.is_zero() || mask == current {
                continue;
            }
            let sibling_comp = current.xored(&mask);
            let mut half_a = self.term(id).clone();
            *half_a.slot_mut(slot) = mask.clone();
            let mut half_b = self.term(id).clone();
            *half_b.slot_mut(slot) = sibling_comp;
            if self.would_duplicate(&half_a, id) || self.would_duplicate(&half_b, id) {
                continue;
            }
            self.change_component(id, slot, mask);
            self.insert_term(half_b);
            return true;
        }
        false
    }

    /// Whether a term equal to `t` already exists (ignoring `ignore`).
    fn would_duplicate(&self, t: &Term<Gf2Matrix>, ignore: u32) -> bool {
        self.index[0]
            .group_members(&t.a)
            .iter()
            .any(|&cand| cand != ignore && *self.term(cand) == *t)
    }

    fn collect_scheme(&self) -> Gf2Scheme {
        let terms: Vec<Term<Gf2Matrix>> =
            self.terms.iter().flatten().cloned().collect();
        Gf2Scheme::new_gf2(self.format, terms).expect("walker terms keep their dimensions")
    }

    /// After any rank drop: settle remaining reductions, verify and
    /// publish. Verification at store time keeps the register invariant
    /// that the best scheme always verifies.
    fn maybe_improve(&mut self) -> Result<()> {
        if self.live >= self.best_rank {
            return Ok(());
        }
        self.full_reduction_pass();
        let scheme = self.collect_scheme();
        if !scheme.verify() {
            return Err(Error::InvalidScheme(
                "internal error: walk produced a scheme that does not verify".into(),
            ));
        }
        self.best_rank = self.live;
        self.last_improve_step = self.steps;
        self.register
            .try_improve(self.worker, self.steps, scheme, self.cfg.target_rank);
        Ok(())
    }

    fn restart_from_best(&mut self) {
        let best = self.register.best_clone();
        self.best_rank = self.best_rank.min(best.rank());
        self.load(best.terms());
        self.restarts += 1;
        self.last_improve_step = self.steps;
        self.last_escape_step = self.steps;
    }

    fn run(&mut self) -> Result<()> {
        let deadline = self
            .cfg
            .time_limit_secs
            .map(|s| Instant::now() + Duration::from_secs(s));
        self.full_reduction_pass();
        self.maybe_improve()?;
        while !self.register.stopped() && self.steps < self.cfg.max_steps {
            if let Some(d) = deadline {
                if self.steps.is_multiple_of(8192) && Instant::now() >= d {
                    break;
                }
            }
            // adopt a better global best opportunistically
            if self.register.best_rank_hint() < self.best_rank {
                self.best_rank = self.register.best_rank_hint();
            }
            let stall = self.steps - self.last_improve_step;
            if stall >= self.cfg.restart_after && self.live > self.best_rank {
                self.restart_from_best();
                continue;
            }
            let split_allowed = (self.live as u64)
                < self.best_rank as u64 + self.cfg.max_splits_above_best as u64;
            if stall >= self.cfg.escape_after
                && self.steps - self.last_escape_step >= self.cfg.escape_after
                && split_allowed
                && self.try_split()
            {
                self.steps += 1;
                self.splits += 1;
                self.last_escape_step = self.steps;
                continue;
            }
            match self.sample_flip() {
                Some((slot, i, j)) => {
                    self.apply_flip(slot, i, j);
                    self.steps += 1;
                    self.flips += 1;
                    self.maybe_improve()?;
                }
                None => {
                    // flip graph dead end: escape, restart or stop
                    if split_allowed && self.try_split() {
                        self.steps += 1;
                        self.splits += 1;
                        self.last_escape_step = self.steps;
                    } else if self.live > self.best_rank {
                        self.restart_from_best();
                    } else {
                        break;
                    }
                }
            }
            #[cfg(debug_assertions)]
            if self.steps.is_multiple_of(65_536) {
                debug_assert!(self.collect_scheme().verify());
            }
        }
        Ok(())
    }

    fn stats(&self, seed: u64) -> WorkerStats {
        WorkerStats {
            worker: self.worker,
            seed,
            steps: self.steps,
            flips: self.flips,
            splits: self.splits,
            reductions: self.reductions,
            restarts: self.restarts,
        }
    }
}

fn prepare_start(start: &Gf2Scheme) -> Result<Gf2Scheme> {
    let start = start.normalized();
    if !start.verify() {
        return Err(Error::BrokenStart);
    }
    Ok(start)
}

/// Single random walk. Deterministic given the start scheme, the config
/// and the rng (see [`worker_rng`]).
pub fn walk(start: &Gf2Scheme, cfg: &SearchConfig, rng: ChaCha8Rng) -> Result<RunState> {
    cfg.validate()?;
    let start = prepare_start(start)?;
    let t0 = Instant::now();
    let register = Register::new(start.clone(), None);
    if cfg.target_rank.is_some_and(|t| start.rank() <= t) {
        register.stop.store(true, Ordering::Relaxed);
    }
    let mut walker = Walker::new(&start, cfg, &register, 0, rng);
    walker.run()?;
    let stats = walker.stats(cfg.seed);
    let inner = register.inner.into_inner().unwrap();
    Ok(RunState {
        best: inner.best,
        history: inner.history,
        workers: vec![stats],
        wall: t0.elapsed(),
    })
}

/// Multi-worker search: `cfg.workers` independent walkers with derived
/// seeds share the monotone best register. With one worker the result is
/// identical to [`walk`] with the same seed.
pub fn orchestrate(start: &Gf2Scheme, cfg: &SearchConfig) -> Result<RunState> {
    orchestrate_in(start, cfg, None)
}

/// [`orchestrate`] with persistence: the run directory receives a config
/// snapshot, one scheme file per improvement plus a rolling best, and a
/// final report, so interrupted runs can be resumed from best.scheme.
pub fn orchestrate_in(
    start: &Gf2Scheme,
    cfg: &SearchConfig,
    run_dir: Option<&Path>,
) -> Result<RunState> {
    cfg.validate()?;
    let start = prepare_start(start)?;
    let t0 = Instant::now();
    if let Some(dir) = run_dir {
        std::fs::create_dir_all(dir)?;
        let snapshot = toml::to_string_pretty(cfg)
            .map_err(|e| Error::Pipeline(format!("config snapshot: {e}")))?;
        std::fs::write(dir.join("config.toml"), snapshot)?;
    }
    let register = Register::new(start.clone(), run_dir.map(Path::to_path_buf));
    if cfg.target_rank.is_some_and(|t| start.rank() <= t) {
        register.stop.store(true, Ordering::Relaxed);
    }

    let mut stats: Vec<WorkerStats> = Vec::with_capacity(cfg.workers);
    if cfg.workers == 1 {
        let mut walker = Walker::new(&start, cfg, &register, 0, worker_rng(cfg.seed, 0));
        walker.run()?;
        stats.push(walker.stats(cfg.seed));
    } else {
        let results: Vec<Result<WorkerStats>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..cfg.workers)
                .map(|w| {
                    let start = &start;
                    let register = &register;
                    scope.spawn(move || {
                        let seed = cfg.seed ^ w as u64;
                        let mut walker =
                            Walker::new(start, cfg, register, w, worker_rng(cfg.seed, w));
                        walker.run()?;
                        Ok(walker.stats(seed))
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker thread panicked"))
                .collect()
        });
        for r in results {
            stats.push(r?);
        }
    }

    let inner = register.inner.into_inner().unwrap();
    if let Some(msg) = inner.io_error {
        return Err(Error::Pipeline(format!(
            "failed to persist improvement: {msg}"
        )));
    }
    let state = RunState {
        best: inner.best,
        history: inner.history,
        workers: stats,
        wall: t0.elapsed(),
    };
    if let Some(dir) = run_dir {
        std::fs::write(dir.join("report.txt"), run_report(&start, &state))?;
    }
    Ok(state)
}

/// Human-readable summary of a run.
pub fn run_report(start: &Gf2Scheme, state: &RunState) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let f = start.format();
    writeln!(
        out,
        "format {f}  start rank {}  best rank {}  wall {:.1}s",
        start.rank(),
        state.best_rank(),
        state.wall.as_secs_f64()
    )
    .unwrap();
    for w in &state.workers {
        writeln!(
            out,
            "worker {}: seed {} steps {} (flips {}, splits {}), reductions {}, restarts {}",
            w.worker, w.seed, w.steps, w.flips, w.splits, w.reductions, w.restarts
        )
        .unwrap();
    }
    for imp in &state.history {
        writeln!(
            out,
            "improved to rank {} at step {} (worker {})",
            imp.rank, imp.step, imp.worker
        )
        .unwrap();
    }
    out
}
