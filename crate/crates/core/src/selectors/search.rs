use super::argmax;

/// Objective differences below this are treated as ties.
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Greedy hill-climbing over feature subsets, maximizing `objective`.
///
/// Forward search starts empty and adds the best feature while that strictly
/// improves the objective. Backward search starts from all features and drops
/// the feature whose removal scores best as long as the objective does not
/// decrease. Ties go to the lowest feature index. The result is never empty:
/// if nothing is selected, the best singleton is returned.
///
/// `objective` receives subsets sorted ascending and must accept the empty
/// subset.
pub fn greedy_search<F>(direction: Direction, n_features: usize, mut objective: F) -> Vec<usize>
where
    F: FnMut(&[usize]) -> f64,
{
    if n_features == 0 {
        return Vec::new();
    }
    let selected = match direction {
        Direction::Forward => forward(n_features, &mut objective),
        Direction::Backward => backward(n_features, &mut objective),
    };
    if selected.is_empty() {
        let singles: Vec<f64> = (0..n_features).map(|f| objective(&[f])).collect();
        vec![argmax(&singles)]
    } else {
        selected
    }
}

fn with(subset: &[usize], f: usize) -> Vec<usize> {
    let mut s = subset.to_vec();
    let pos = s.partition_point(|&x| x < f);
    s.insert(pos, f);
    s
}

fn forward<F: FnMut(&[usize]) -> f64>(n: usize, objective: &mut F) -> Vec<usize> {
    let mut subset: Vec<usize> = Vec::new();
    let mut current = objective(&subset);
    loop {
        let mut best: Option<(f64, usize)> = None;
        for f in (0..n).filter(|f| !subset.contains(f)) {
            let score = objective(&with(&subset, f));
            if best.is_none_or(|(b, _)| score > b) {
                best = Some((score, f));
            }
        }
        match best {
            Some((score, f)) if score > current + EPS => {
                subset = with(&subset, f);
                current = score;
            }
            _ => return subset,
        }
    }
}

fn backward<F: FnMut(&[usize]) -> f64>(n: usize, objective: &mut F) -> Vec<usize> {
    let mut subset: Vec<usize> = (0..n).collect();
    let mut current = objective(&subset);
    while subset.len() > 1 {
        let mut best: Option<(f64, usize)> = None;
        for pos in 0..subset.len() {
            let mut reduced = subset.clone();
            reduced.remove(pos);
            let score = objective(&reduced);
            if best.is_none_or(|(b, _)| score > b) {
                best = Some((score, pos));
            }
        }
        match best {
            Some((score, pos)) if score >= current - EPS => {
                subset.remove(pos);
                current = score;
            }
            _ => break,
        }
    }
    subset
}
