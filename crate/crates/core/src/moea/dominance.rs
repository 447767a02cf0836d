use crate::project::ObjectivePoint;

/// Constrained Pareto dominance under minimization of (duration, cost).
///
/// A feasible point beats any infeasible one. Two infeasible points are ranked
/// by total constraint violation; equal violations fall back to plain Pareto
/// dominance, as do two feasible points.
pub fn dominates(a: &ObjectivePoint, b: &ObjectivePoint) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) if a.violation != b.violation => a.violation < b.violation,
        _ => pareto_dominates(a, b),
    }
}

/// Unconstrained Pareto dominance on the objective values.
pub fn pareto_dominates(a: &ObjectivePoint, b: &ObjectivePoint) -> bool {
    a.duration <= b.duration
        && a.total_cost <= b.total_cost
        && (a.duration < b.duration || a.total_cost < b.total_cost)
}

/// Indices of the points not dominated by any other point, in input order.
pub fn nondominated_indices(points: &[ObjectivePoint]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|q| dominates(q, &points[i])))
        .collect()
}
