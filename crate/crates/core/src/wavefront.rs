//! Dependency-driven parallel execution: CTU-row wavefront schedules and
//! general task DAGs over a fixed-size worker pool.
//!
//! The executor guarantees that no node starts before its prerequisites
//! finish (observable in the recorded timestamps), that ready nodes are
//! claimed lowest-id-first (so single-worker completion order is
//! reproducible), and that results are identical for any worker count as
//! long as nodes only touch their declared disjoint data regions.
//!
//! Synthetic node costs are simulated as timed waits rather than CPU burn:
//! a scheduling experiment then measures the schedule's parallelism (the
//! `min(workers, total / critical path)` bound) instead of the host's core
//! count, which keeps scaling assertions portable to small machines.

use std::cell::UnsafeCell;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::frame::{BlockRect, Plane};

pub type NodeId = u32;

/// Dependency DAG of decode tasks. Nodes carry an optional synthetic cost
/// in microseconds; edges point from prerequisite to dependent.
#[derive(Debug, Clone, Default)]
pub struct TaskGraph {
    costs_us: Vec<u64>,
    edges: Vec<(NodeId, NodeId)>,
}

impl TaskGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, cost_us: u64) -> NodeId {
        let id = self.costs_us.len() as NodeId;
        self.costs_us.push(cost_us);
        id
    }

    pub fn add_edge(&mut self, prerequisite: NodeId, dependent: NodeId) -> Result<()> {
        let n = self.costs_us.len() as NodeId;
        if prerequisite >= n || dependent >= n {
            return Err(Error::contract(format!(
                "edge ({prerequisite} -> {dependent}) references a missing node"
            )));
        }
        if prerequisite == dependent {
            return Err(Error::contract("self-dependency forms a cycle"));
        }
        self.edges.push((prerequisite, dependent));
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.costs_us.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn cost_us(&self, id: NodeId) -> u64 {
        self.costs_us[id as usize]
    }

    pub fn set_uniform_cost(&mut self, cost_us: u64) {
        self.costs_us.fill(cost_us);
    }

    pub fn total_cost_us(&self) -> u64 {
        self.costs_us.iter().sum()
    }

    fn adjacency(&self) -> (Vec<Vec<NodeId>>, Vec<u32>) {
        let n = self.node_count();
        let mut dependents = vec![Vec::new(); n];
        let mut indegree = vec![0u32; n];
        for &(pre, dep) in &self.edges {
            dependents[pre as usize].push(dep);
            indegree[dep as usize] += 1;
        }
        (dependents, indegree)
    }

    /// Kahn topological order, lowest node id first among ready nodes.
    /// A cycle is a contract violation.
    pub fn topo_order(&self) -> Result<Vec<NodeId>> {
        let (dependents, mut indegree) = self.adjacency();
        let mut ready: BinaryHeap<Reverse<NodeId>> = indegree
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d == 0)
            .map(|(i, _)| Reverse(i as NodeId))
            .collect();
        let mut order = Vec::with_capacity(self.node_count());
        while let Some(Reverse(id)) = ready.pop() {
            order.push(id);
            for &dep in &dependents[id as usize] {
                indegree[dep as usize] -= 1;
                if indegree[dep as usize] == 0 {
                    ready.push(Reverse(dep));
                }
            }
        }
        if order.len() != self.node_count() {
            return Err(Error::contract("cycle detected in task graph"));
        }
        Ok(order)
    }
}

/// CTU-row wavefront dependencies over a `rows x cols` grid: task `(r, c)`
/// depends on its left neighbor and, when one exists, the above-right
/// neighbor. Node ids are row-major.
pub fn wpp_dependencies(rows: usize, cols: usize) -> Result<TaskGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::contract("wavefront grid must be at least 1x1"));
    }
    let mut g = TaskGraph::new();
    for _ in 0..rows * cols {
        g.add_node(0);
    }
    let id = |r: usize, c: usize| (r * cols + c) as NodeId;
    for r in 0..rows {
        for c in 0..cols {
            if c > 0 {
                g.add_edge(id(r, c - 1), id(r, c))?;
            }
            if r > 0 && c + 1 < cols {
                g.add_edge(id(r - 1, c + 1), id(r, c))?;
            }
        }
    }
    Ok(g)
}

/// Longest dependency chain counting nodes, via longest-path DP over a
/// topological order.
pub fn critical_path_length(g: &TaskGraph) -> Result<usize> {
    let order = g.topo_order()?;
    let (dependents, _) = g.adjacency();
    let mut depth = vec![1usize; g.node_count()];
    for &id in &order {
        for &dep in &dependents[id as usize] {
            depth[dep as usize] = depth[dep as usize].max(depth[id as usize] + 1);
        }
    }
    Ok(depth.into_iter().max().unwrap_or(0))
}

/// What each node does when executed.
#[derive(Clone, Copy)]
pub enum NodeWork<'a> {
    /// Simulate the node's synthetic cost as a timed wait.
    SyntheticCost,
    /// Run the callable with the node id.
    Run(&'a (dyn Fn(NodeId) + Sync)),
}

/// Execution record: wall makespan, per-worker busy time, completion order,
/// and per-node start/finish timestamps (nanoseconds from run start).
#[derive(Debug, Clone)]
pub struct RunStats {
    pub makespan_ns: u64,
    pub worker_busy_ns: Vec<u64>,
    pub completion_order: Vec<NodeId>,
    pub node_spans_ns: Vec<(u64, u64)>,
}

struct SchedState {
    ready: BinaryHeap<Reverse<NodeId>>,
    indegree: Vec<u32>,
    remaining: usize,
    panicked: Option<NodeId>,
    completion_order: Vec<NodeId>,
    spans: Vec<(u64, u64)>,
    busy: Vec<u64>,
}

fn simulate_cost(cost_us: u64) {
    if cost_us == 0 {
        return;
    }
    let target = Instant::now() + Duration::from_micros(cost_us);
    loop {
        let now = Instant::now();
        if now >= target {
            break;
        }
        std::thread::sleep(target - now);
    }
}

/// Executes the graph on exactly `workers` pool threads. No node starts
/// before all its prerequisites have finished; a panicking work item aborts
/// the run with the failing node id.
pub fn execute(g: &TaskGraph, workers: usize, work: NodeWork<'_>) -> Result<RunStats> {
    if workers == 0 {
        return Err(Error::contract("worker count must be at least 1"));
    }
    // Surfaces cycles before any thread spawns.
    g.topo_order()?;

    let n = g.node_count();
    let (dependents, indegree) = g.adjacency();
    let ready: BinaryHeap<Reverse<NodeId>> = indegree
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d == 0)
        .map(|(i, _)| Reverse(i as NodeId))
        .collect();
    let state = Mutex::new(SchedState {
        ready,
        indegree,
        remaining: n,
        panicked: None,
        completion_order: Vec::with_capacity(n),
        spans: vec![(0, 0); n],
        busy: vec![0; workers],
    });
    let cond = Condvar::new();
    let origin = Instant::now();

    std::thread::scope(|scope| {
        for worker in 0..workers {
            let state = &state;
            let cond = &cond;
            let dependents = &dependents;
            scope.spawn(move || loop {
                let id = {
                    let mut st = state.lock().unwrap();
                    loop {
                        if st.panicked.is_some() || st.remaining == 0 {
                            return;
                        }
                        if let Some(Reverse(id)) = st.ready.pop() {
                            break id;
                        }
                        st = cond.wait(st).unwrap();
                    }
                };
                let start = origin.elapsed().as_nanos() as u64;
                let outcome = catch_unwind(AssertUnwindSafe(|| match work {
                    NodeWork::SyntheticCost => simulate_cost(g.cost_us(id)),
                    NodeWork::Run(f) => f(id),
                }));
                let finish = origin.elapsed().as_nanos() as u64;

                let mut st = state.lock().unwrap();
                if outcome.is_err() {
                    st.panicked = Some(id);
                    cond.notify_all();
                    return;
                }
                st.spans[id as usize] = (start, finish);
                st.busy[worker] += finish - start;
                st.completion_order.push(id);
                st.remaining -= 1;
                for &dep in &dependents[id as usize] {
                    st.indegree[dep as usize] -= 1;
                    if st.indegree[dep as usize] == 0 {
                        st.ready.push(Reverse(dep));
                    }
                }
                cond.notify_all();
            });
        }
    });

    let st = state.into_inner().unwrap();
    if let Some(node) = st.panicked {
        return Err(Error::TaskPanicked { node });
    }
    let makespan_ns = st.spans.iter().map(|&(_, f)| f).max().unwrap_or(0);
    Ok(RunStats {
        makespan_ns,
        worker_busy_ns: st.busy,
        completion_order: st.completion_order,
        node_spans_ns: st.spans,
    })
}

/// One row of a thread-scaling sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupRow {
    pub workers: usize,
    pub makespan_ns: u64,
    pub speedup: f64,
}

/// Executes the graph once per worker count on identical inputs and reports
/// `makespan(1) / makespan(w)`. When 1 is not among the requested counts an
/// implicit single-worker baseline run supplies the denominator without
/// appearing in the rows.
pub fn speedup_report(
    g: &TaskGraph,
    worker_counts: &[usize],
    work: NodeWork<'_>,
) -> Result<Vec<SpeedupRow>> {
    if worker_counts.is_empty() {
        return Err(Error::contract("worker count list must be nonempty"));
    }
    let mut rows = Vec::with_capacity(worker_counts.len());
    let mut baseline = None;
    for &workers in worker_counts {
        let stats = execute(g, workers, work)?;
        if workers == 1 && baseline.is_none() {
            baseline = Some(stats.makespan_ns);
        }
        rows.push(SpeedupRow {
            workers,
            makespan_ns: stats.makespan_ns,
            speedup: 0.0,
        });
    }
    let baseline = match baseline {
        Some(b) => b,
        None => execute(g, 1, work)?.makespan_ns,
    };
    for row in &mut rows {
        row.speedup = if row.workers == 1 {
            1.0
        } else {
            baseline as f64 / row.makespan_ns.max(1) as f64
        };
    }
    Ok(rows)
}

/// A plane shared by concurrently executing nodes that write disjoint
/// regions. Writes go through raw pointers so no aliasing references are
/// ever formed; the disjointness contract is the caller's (the task
/// graph's) responsibility, mirroring how CTU tasks own their rectangles.
pub struct PlaneCell {
    inner: UnsafeCell<Plane>,
    ptr: *mut u16,
    stride: usize,
    width: usize,
    height: usize,
}

// Writers touch disjoint regions and readers only appear after the run
// quiesces, which is exactly the Sync contract required here.
unsafe impl Sync for PlaneCell {}
unsafe impl Send for PlaneCell {}

impl PlaneCell {
    pub fn new(plane: Plane) -> Self {
        let stride = plane.stride();
        let width = plane.width();
        let height = plane.height();
        let inner = UnsafeCell::new(plane);
        // The Vec backing store never reallocates while the cell owns it.
        let ptr = unsafe { (*inner.get()).data_mut().as_mut_ptr() };
        Self {
            inner,
            ptr,
            stride,
            width,
            height,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Writes a compact `rect.w x rect.h` sample buffer into the plane.
    ///
    /// # Safety
    /// `rect` must lie inside the plane, `samples` must hold `rect.area()`
    /// values, and no concurrent access may overlap `rect`.
    pub unsafe fn write_rect(&self, rect: BlockRect, samples: &[u16]) {
        debug_assert!(rect.x + rect.w <= self.width && rect.y + rect.h <= self.height);
        debug_assert_eq!(samples.len(), rect.area());
        for row in 0..rect.h {
            let dst = self.ptr.add((rect.y + row) * self.stride + rect.x);
            std::ptr::copy_nonoverlapping(samples.as_ptr().add(row * rect.w), dst, rect.w);
        }
    }

    /// Reclaims the plane after all writers have quiesced.
    pub fn into_plane(self) -> Plane {
        self.inner.into_inner()
    }
}
