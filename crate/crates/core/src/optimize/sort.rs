use super::{ObjectiveVector, ParetoSolution};

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    dominates_arr(&a.as_array(), &b.as_array())
}

fn dominates_arr(a: &[f64; 3], b: &[f64; 3]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// Fast non-dominated sort. Returns fronts of indices into `objs`, best
/// first, each in ascending index order.
pub fn non_dominated_sort(objs: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let arr: Vec<[f64; 3]> = objs.iter().map(ObjectiveVector::as_array).collect();
    let n = arr.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominating: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates_arr(&arr[i], &arr[j]) {
                dominating[i].push(j);
                dominated_by[j] += 1;
            } else if dominates_arr(&arr[j], &arr[i]) {
                dominating[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominating[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front` (same order). Boundary
/// members along any non-constant objective get `+∞`.
pub fn crowding_distance(objs: &[ObjectiveVector], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    let mut dist = vec![0.0; m];
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    for k in 0..3 {
        let val = |p: usize| objs[front[p]].as_array()[k];
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| val(a).total_cmp(&val(b)).then(front[a].cmp(&front[b])));
        let (lo, hi) = (val(order[0]), val(order[m - 1]));
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        for w in 1..m - 1 {
            dist[order[w]] += (val(order[w + 1]) - val(order[w - 1])) / range;
        }
    }
    dist
}

/// Non-dominated subset of `solutions`, in input order.
pub fn pareto_filter(solutions: &[ParetoSolution]) -> Vec<ParetoSolution> {
    solutions
        .iter()
        .filter(|s| {
            !solutions
                .iter()
                .any(|t| dominates(&t.objectives, &s.objectives))
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(u: i64, r: f64, f: f64) -> ObjectiveVector {
        ObjectiveVector {
            neg_unique: u,
            worst_res: r,
            neg_worst_fov: f,
        }
    }

    #[test]
    fn dominance() {
        assert!(dominates(&ov(-5, 1.0, 1.0), &ov(-4, 1.0, 1.0)));
        assert!(!dominates(&ov(-5, 1.0, 1.0), &ov(-5, 1.0, 1.0)));
        assert!(!dominates(&ov(-5, 2.0, 1.0), &ov(-4, 1.0, 1.0)));
    }

    #[test]
    fn fronts_and_crowding() {
        let objs = vec![
            ov(-5, 1.0, 0.0),
            ov(-4, 0.5, 0.0),
            ov(-4, 1.0, 0.0),
            ov(-3, 2.0, 0.0),
            ov(-4, 0.75, 0.0),
        ];
        let fronts = non_dominated_sort(&objs);
        assert_eq!(fronts, vec![vec![0, 1], vec![4], vec![2], vec![3]]);
        let objs = vec![ov(-1, 3.0, 0.0), ov(-2, 2.0, 0.0), ov(-3, 1.0, 0.0), ov(-4, 0.0, 0.0)];
        let d = crowding_distance(&objs, &[0, 1, 2, 3]);
        assert!(d[0].is_infinite() && d[3].is_infinite());
        assert!((d[1] - 4.0 / 3.0).abs() < 1e-12);
    }
}
