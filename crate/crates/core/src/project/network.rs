use std::collections::BTreeSet;

use num_bigint::BigUint;

use super::money::Money;

/// Default upper bound on the number of paths `enumerate_paths` will materialize.
pub const DEFAULT_PATH_CAP: usize = 100_000;

/// One way of performing an activity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionMode {
    pub duration: u32,
    pub direct_cost: Money,
    pub decomposition: Option<CostDecomposition>,
}

/// Direct cost split into a fixed material part and a daily resource rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostDecomposition {
    pub material_cost: Money,
    pub daily_rate: Money,
}

impl ExecutionMode {
    pub fn new(duration: u32, direct_cost: Money) -> Self {
        ExecutionMode {
            duration,
            direct_cost,
            decomposition: None,
        }
    }

    /// Builds a mode whose direct cost is `material + duration * daily_rate`.
    pub fn decomposed(duration: u32, material_cost: Money, daily_rate: Money) -> Self {
        ExecutionMode {
            duration,
            direct_cost: material_cost + daily_rate.times_days(duration as u64),
            decomposition: Some(CostDecomposition {
                material_cost,
                daily_rate,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Activity {
    /// 1-based id; the dummy source is 0 and the dummy sink is `N + 1`.
    pub id: usize,
    pub modes: Vec<ExecutionMode>,
    /// Sorted successor ids. Empty means the activity feeds the sink.
    pub successors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("network has no activities")]
    Empty,
    #[error("activity at position {position} has id {id}, expected {expected}")]
    IdMismatch {
        position: usize,
        id: usize,
        expected: usize,
    },
    #[error("activity {activity} has no execution modes")]
    NoModes { activity: usize },
    #[error("activity {activity} lists dangling successor {successor}")]
    DanglingSuccessor { activity: usize, successor: usize },
    #[error("activity {activity} lists itself as a successor")]
    SelfLoop { activity: usize },
    #[error("precedence cycle through activity {activity}")]
    Cycle { activity: usize },
    #[error("activity {activity} mode {mode} has a negative cost")]
    NegativeCost { activity: usize, mode: usize },
    #[error(
        "activity {activity} mode {mode}: direct cost differs from material + duration x rate"
    )]
    DecompositionMismatch { activity: usize, mode: usize },
    #[error("negative indirect cost rate")]
    NegativeIndirectRate,
    #[error("deadline must be positive")]
    NonPositiveDeadline,
    #[error("budget must be positive")]
    NonPositiveBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignmentError {
    #[error("assignment has {got} entries, network has {expected} activities")]
    WrongLength { expected: usize, got: usize },
    #[error("invalid mode index {mode} for activity {activity} ({available} modes)")]
    ModeOutOfRange {
        activity: usize,
        mode: usize,
        available: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("network has more than {cap} source-to-sink paths")]
pub struct PathExplosion {
    pub cap: usize,
}

/// Chosen execution mode per activity, indexed by `activity id - 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(Vec<usize>);

impl Assignment {
    pub fn new(modes: Vec<usize>) -> Self {
        Assignment(modes)
    }

    pub fn modes(&self) -> &[usize] {
        &self.0
    }

    pub fn modes_mut(&mut self) -> &mut [usize] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl std::fmt::Display for Assignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for m in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
            first = false;
        }
        Ok(())
    }
}

/// Image of an assignment in objective space, with constraint status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ObjectivePoint {
    pub duration: u64,
    pub total_cost: Money,
    pub feasible_time: bool,
    pub feasible_cost: bool,
    /// Constraint violation `excess_t / t_max + excess_c / c_max`, scaled by
    /// `t_max * c_max` so it is an exact integer. Only comparable between points
    /// of the same network.
    pub violation: u128,
}

impl ObjectivePoint {
    /// An unconstrained, feasible point.
    pub fn new(duration: u64, total_cost: Money) -> Self {
        ObjectivePoint {
            duration,
            total_cost,
            feasible_time: true,
            feasible_cost: true,
            violation: 0,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible_time && self.feasible_cost
    }

    /// Objective vector in base units (days, cents).
    pub fn values(&self) -> [i64; 2] {
        [self.duration as i64, self.total_cost.cents()]
    }
}

/// A validated, immutable project network with implicit dummy endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectNetwork {
    activities: Vec<Activity>,
    indirect_rate: Money,
    t_max: Option<u64>,
    c_max: Option<Money>,
    /// Zero-based activity indices in topological order.
    topo_order: Vec<usize>,
}

impl ProjectNetwork {
    /// Validates and builds a network. `None` caps mean unbounded.
    ///
    /// A successor id equal to `N + 1` names the sink explicitly and is dropped.
    pub fn new(
        mut activities: Vec<Activity>,
        indirect_rate: Money,
        t_max: Option<u64>,
        c_max: Option<Money>,
    ) -> Result<Self, NetworkError> {
        let n = activities.len();
        if n == 0 {
            return Err(NetworkError::Empty);
        }
        if indirect_rate.is_negative() {
            return Err(NetworkError::NegativeIndirectRate);
        }
        if t_max == Some(0) {
            return Err(NetworkError::NonPositiveDeadline);
        }
        if matches!(c_max, Some(c) if c.cents() <= 0) {
            return Err(NetworkError::NonPositiveBudget);
        }
        for (pos, act) in activities.iter_mut().enumerate() {
            if act.id != pos + 1 {
                return Err(NetworkError::IdMismatch {
                    position: pos,
                    id: act.id,
                    expected: pos + 1,
                });
            }
            validate_modes(act)?;
            let mut succ = BTreeSet::new();
            for &s in &act.successors {
                if s == act.id {
                    return Err(NetworkError::SelfLoop { activity: act.id });
                }
                if s == 0 || s > n + 1 {
                    return Err(NetworkError::DanglingSuccessor {
                        activity: act.id,
                        successor: s,
                    });
                }
                if s != n + 1 {
                    succ.insert(s);
                }
            }
            act.successors = succ.into_iter().collect();
        }
        let topo_order = topological_order(&activities)?;
        Ok(ProjectNetwork {
            activities,
            indirect_rate,
            t_max,
            c_max,
            topo_order,
        })
    }

    pub fn activities(&self) -> &[Activity] {
        &self.activities
    }

    pub fn activity_count(&self) -> usize {
        self.activities.len()
    }

    pub fn mode_counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.activities.iter().map(|a| a.modes.len())
    }

    pub fn indirect_rate(&self) -> Money {
        self.indirect_rate
    }

    pub fn t_max(&self) -> Option<u64> {
        self.t_max
    }

    pub fn c_max(&self) -> Option<Money> {
        self.c_max
    }

    /// Zero-based activity indices in a topological order.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo_order
    }

    pub fn check_assignment(&self, a: &Assignment) -> Result<(), AssignmentError> {
        if a.len() != self.activities.len() {
            return Err(AssignmentError::WrongLength {
                expected: self.activities.len(),
                got: a.len(),
            });
        }
        for (act, &m) in self.activities.iter().zip(a.modes()) {
            if m >= act.modes.len() {
                return Err(AssignmentError::ModeOutOfRange {
                    activity: act.id,
                    mode: m,
                    available: act.modes.len(),
                });
            }
        }
        Ok(())
    }

    /// Duration and total cost of an assignment.
    pub fn evaluate(&self, a: &Assignment) -> Result<ObjectivePoint, AssignmentError> {
        self.check_assignment(a)?;
        Ok(self.evaluate_unchecked(a.modes()))
    }

    /// Evaluates a mode vector already known to be valid for this network.
    ///
    /// Project duration comes from a single forward pass in topological order:
    /// every successor starts no earlier than its predecessor finishes.
    pub fn evaluate_unchecked(&self, modes: &[usize]) -> ObjectivePoint {
        let mut start = vec![0u64; self.activities.len()];
        let mut duration = 0u64;
        let mut direct = Money::ZERO;
        for &i in &self.topo_order {
            let act = &self.activities[i];
            let mode = &act.modes[modes[i]];
            direct += mode.direct_cost;
            let finish = start[i] + mode.duration as u64;
            duration = duration.max(finish);
            for &s in &act.successors {
                let slot = &mut start[s - 1];
                *slot = (*slot).max(finish);
            }
        }
        let total_cost = direct + self.indirect_rate.times_days(duration);
        self.point(duration, total_cost)
    }

    /// Attaches feasibility flags and the scaled violation to raw objective values.
    pub fn point(&self, duration: u64, total_cost: Money) -> ObjectivePoint {
        let feasible_time = self.t_max.is_none_or(|t| duration < t);
        let feasible_cost = self.c_max.is_none_or(|c| total_cost < c);
        let t_scale = self.t_max.unwrap_or(1) as u128;
        let c_scale = self.c_max.map_or(1, |c| c.cents()) as u128;
        let t_excess = self.t_max.map_or(0, |t| duration.saturating_sub(t)) as u128;
        let c_excess = self
            .c_max
            .map_or(0, |c| (total_cost.cents() - c.cents()).max(0)) as u128;
        ObjectivePoint {
            duration,
            total_cost,
            feasible_time,
            feasible_cost,
            violation: t_excess * c_scale + c_excess * t_scale,
        }
    }

    /// Number of possible schedules, the product of all mode counts.
    pub fn count_schedules(&self) -> BigUint {
        self.mode_counts()
            .fold(BigUint::from(1u32), |acc, n| acc * BigUint::from(n))
    }

    /// Number of source-to-sink paths, counted without enumerating them.
    pub fn count_paths(&self) -> BigUint {
        let n = self.activities.len();
        // paths from each activity to the sink
        let mut to_sink = vec![BigUint::from(0u32); n];
        for &i in self.topo_order.iter().rev() {
            let act = &self.activities[i];
            to_sink[i] = if act.successors.is_empty() {
                BigUint::from(1u32)
            } else {
                act.successors.iter().map(|&s| &to_sink[s - 1]).sum()
            };
        }
        self.entry_activities().map(|i| &to_sink[i]).sum()
    }

    /// Zero-based indices of activities with no real predecessor.
    pub fn entry_activities(&self) -> impl Iterator<Item = usize> + '_ {
        let mut has_pred = vec![false; self.activities.len()];
        for act in &self.activities {
            for &s in &act.successors {
                has_pred[s - 1] = true;
            }
        }
        (0..self.activities.len()).filter(move |&i| !has_pred[i])
    }

    /// All source-to-sink paths as sequences of activity ids, in
    /// lexicographic order. Fails when there are more than `cap` paths.
    pub fn enumerate_paths(&self, cap: usize) -> Result<Vec<Vec<usize>>, PathExplosion> {
        if self.count_paths() > BigUint::from(cap) {
            return Err(PathExplosion { cap });
        }
        let mut paths = Vec::new();
        let mut stack = Vec::new();
        for entry in self.entry_activities() {
            self.walk_paths(entry, &mut stack, &mut paths);
        }
        Ok(paths)
    }

    fn walk_paths(&self, i: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let act = &self.activities[i];
        stack.push(act.id);
        if act.successors.is_empty() {
            out.push(stack.clone());
        } else {
            for &s in &act.successors {
                self.walk_paths(s - 1, stack, out);
            }
        }
        stack.pop();
    }

    /// Assignment choosing, per activity, the mode that minimizes `key`
    /// (first such mode on ties).
    pub fn assignment_by<K: Ord>(&self, key: impl Fn(&ExecutionMode) -> K) -> Assignment {
        Assignment::new(
            self.activities
                .iter()
                .map(|a| {
                    a.modes
                        .iter()
                        .enumerate()
                        .min_by_key(|(_, m)| key(m))
                        .map(|(j, _)| j)
                        .unwrap_or(0)
                })
                .collect(),
        )
    }
}

fn validate_modes(act: &Activity) -> Result<(), NetworkError> {
    if act.modes.is_empty() {
        return Err(NetworkError::NoModes { activity: act.id });
    }
    for (j, mode) in act.modes.iter().enumerate() {
        if mode.direct_cost.is_negative() {
            return Err(NetworkError::NegativeCost {
                activity: act.id,
                mode: j,
            });
        }
        if let Some(d) = mode.decomposition {
            if d.material_cost.is_negative() || d.daily_rate.is_negative() {
                return Err(NetworkError::NegativeCost {
                    activity: act.id,
                    mode: j,
                });
            }
            if d.material_cost + d.daily_rate.times_days(mode.duration as u64) != mode.direct_cost {
                return Err(NetworkError::DecompositionMismatch {
                    activity: act.id,
                    mode: j,
                });
            }
        }
    }
    Ok(())
}

/// Kahn's algorithm over successor lists; ties resolved by smallest index.
fn topological_order(activities: &[Activity]) -> Result<Vec<usize>, NetworkError> {
    let n = activities.len();
    let mut indegree = vec![0usize; n];
    for act in activities {
        for &s in &act.successors {
            indegree[s - 1] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &s in &activities[i].successors {
            indegree[s - 1] -= 1;
            if indegree[s - 1] == 0 {
                ready.insert(s - 1);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
        return Err(NetworkError::Cycle {
            activity: stuck + 1,
        });
    }
    Ok(order)
}
