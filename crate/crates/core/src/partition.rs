//! Assignment of components to processing elements.
//!
//! Components are cut into contiguous tasks. [`block_partition`] gives each
//! PE a single task in ascending order; [`task_round_robin_partition`] cuts
//! `n_pes * tasks_per_pe` tasks and deals them out so that task `t` lands on
//! PE `t % n_pes`. In both cases the first `n % n_tasks` tasks carry one
//! extra component.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("InvalidPeCount: n_pes = {n_pes} is not in [1, n = {n}]")]
    InvalidPeCount { n: usize, n_pes: usize },
    #[error("InvalidTaskCount: tasks_per_pe must be at least 1")]
    InvalidTaskCount,
    #[error("TooManyTasks: {n_pes} PEs x {tasks_per_pe} tasks per PE exceeds n = {n}")]
    TooManyTasks { n: usize, n_pes: usize, tasks_per_pe: usize },
    #[error("IndexOutOfRange: component {index} is outside 0..{n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("InvalidPlan: {0}")]
    InvalidPlan(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PartitionKind {
    Block,
    TaskRoundRobin { tasks_per_pe: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRange {
    #[serde(rename = "id")]
    pub task_id: usize,
    #[serde(rename = "first")]
    pub first_component: usize,
    #[serde(rename = "last")]
    pub last_component_exclusive: usize,
    #[serde(rename = "pe")]
    pub owner_pe: usize,
}

impl TaskRange {
    pub fn len(&self) -> usize {
        self.last_component_exclusive - self.first_component
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn components(&self) -> std::ops::Range<usize> {
        self.first_component..self.last_component_exclusive
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PlanWire", into = "PlanWire")]
pub struct PartitionPlan {
    kind: PartitionKind,
    n: usize,
    n_pes: usize,
    tasks: Vec<TaskRange>,
    owner_of: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PlanWire {
    kind: PartitionKind,
    n: usize,
    n_pes: usize,
    tasks: Vec<TaskRange>,
}

impl From<PartitionPlan> for PlanWire {
    fn from(p: PartitionPlan) -> Self {
        PlanWire { kind: p.kind, n: p.n, n_pes: p.n_pes, tasks: p.tasks }
    }
}

impl TryFrom<PlanWire> for PartitionPlan {
    type Error = PartitionError;

    fn try_from(w: PlanWire) -> Result<Self, Self::Error> {
        PartitionPlan::from_tasks(w.kind, w.n, w.n_pes, w.tasks)
    }
}

fn split_tasks(n: usize, n_tasks: usize, n_pes: usize) -> Vec<TaskRange> {
    let base = n / n_tasks;
    let extra = n % n_tasks;
    let mut first = 0;
    (0..n_tasks)
        .map(|t| {
            let len = base + usize::from(t < extra);
            let task = TaskRange {
                task_id: t,
                first_component: first,
                last_component_exclusive: first + len,
                owner_pe: t % n_pes,
            };
            first += len;
            task
        })
        .collect()
}

pub fn block_partition(n: usize, n_pes: usize) -> Result<PartitionPlan, PartitionError> {
    if n_pes == 0 || n_pes > n {
        return Err(PartitionError::InvalidPeCount { n, n_pes });
    }
    PartitionPlan::from_tasks(PartitionKind::Block, n, n_pes, split_tasks(n, n_pes, n_pes))
}

pub fn task_round_robin_partition(n: usize, n_pes: usize, tasks_per_pe: usize) -> Result<PartitionPlan, PartitionError> {
    if n_pes == 0 || n_pes > n {
        return Err(PartitionError::InvalidPeCount { n, n_pes });
    }
    if tasks_per_pe == 0 {
        return Err(PartitionError::InvalidTaskCount);
    }
    let n_tasks = n_pes
        .checked_mul(tasks_per_pe)
        .filter(|&t| t <= n)
        .ok_or(PartitionError::TooManyTasks { n, n_pes, tasks_per_pe })?;
    PartitionPlan::from_tasks(
        PartitionKind::TaskRoundRobin { tasks_per_pe },
        n,
        n_pes,
        split_tasks(n, n_tasks, n_pes),
    )
}

/// Round-robin plan parameterized by components per task rather than tasks
/// per PE. The task count is rounded up to a multiple of `n_pes`.
pub fn task_size_partition(n: usize, n_pes: usize, task_size: usize) -> Result<PartitionPlan, PartitionError> {
    if task_size == 0 {
        return Err(PartitionError::InvalidTaskCount);
    }
    if n_pes == 0 {
        return Err(PartitionError::InvalidPeCount { n, n_pes });
    }
    let tasks = n.div_ceil(task_size).max(1);
    task_round_robin_partition(n, n_pes, tasks.div_ceil(n_pes))
}

impl PartitionPlan {
    /// Rebuilds a plan from an explicit task list, checking that tasks are
    /// contiguous, cover `0..n` in id order and name valid PEs.
    pub fn from_tasks(
        kind: PartitionKind,
        n: usize,
        n_pes: usize,
        tasks: Vec<TaskRange>,
    ) -> Result<Self, PartitionError> {
        if n_pes == 0 || n_pes > n {
            return Err(PartitionError::InvalidPeCount { n, n_pes });
        }
        let mut owner_of = vec![0usize; n];
        let mut next = 0;
        for (t, task) in tasks.iter().enumerate() {
            if task.task_id != t || task.first_component != next || task.is_empty() || task.owner_pe >= n_pes {
                return Err(PartitionError::InvalidPlan(format!("task {t} is malformed: {task:?}")));
            }
            if task.last_component_exclusive > n {
                return Err(PartitionError::InvalidPlan(format!("task {t} runs past n = {n}")));
            }
            owner_of[task.components()].fill(task.owner_pe);
            next = task.last_component_exclusive;
        }
        if next != n {
            return Err(PartitionError::InvalidPlan(format!("tasks cover 0..{next}, expected 0..{n}")));
        }
        Ok(PartitionPlan { kind, n, n_pes, tasks, owner_of })
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_pes(&self) -> usize {
        self.n_pes
    }

    pub fn tasks(&self) -> &[TaskRange] {
        &self.tasks
    }

    /// Tasks per PE as used to build the plan (1 for block plans).
    pub fn tasks_per_pe(&self) -> usize {
        match self.kind {
            PartitionKind::Block => 1,
            PartitionKind::TaskRoundRobin { tasks_per_pe } => tasks_per_pe,
        }
    }

    pub fn owner_of(&self, i: usize) -> Result<usize, PartitionError> {
        self.owner_of.get(i).copied().ok_or(PartitionError::IndexOutOfRange { index: i, n: self.n })
    }

    #[inline]
    pub fn owners(&self) -> &[usize] {
        &self.owner_of
    }

    /// Components owned by `pe`, in task order (which is ascending).
    pub fn owned_components(&self, pe: usize) -> Vec<usize> {
        self.tasks.iter().filter(|t| t.owner_pe == pe).flat_map(|t| t.components()).collect()
    }
}
