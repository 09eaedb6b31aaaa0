//! Counting helpers shared by the entropy-based measures.

/// Shannon entropy in bits of a histogram.
pub(crate) fn entropy_of_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Marginal and joint entropies of paired nominal observations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct JointEntropy {
    pub hx: f64,
    pub hy: f64,
    pub hxy: f64,
    pub pairs: usize,
}

impl JointEntropy {
    pub fn mutual_information(&self) -> f64 {
        (self.hx + self.hy - self.hxy).max(0.0)
    }

    pub fn symmetric_uncertainty(&self) -> f64 {
        let denom = self.hx + self.hy;
        if denom <= 0.0 {
            0.0
        } else {
            (2.0 * self.mutual_information() / denom).clamp(0.0, 1.0)
        }
    }
}

pub(crate) fn joint_entropy(pairs: impl Iterator<Item = (u32, u32)> + Clone) -> JointEntropy {
    let (mut nx, mut ny) = (0usize, 0usize);
    for (x, y) in pairs.clone() {
        nx = nx.max(x as usize + 1);
        ny = ny.max(y as usize + 1);
    }
    let mut joint = vec![0usize; nx * ny];
    let mut cx = vec![0usize; nx];
    let mut cy = vec![0usize; ny];
    let mut n = 0;
    for (x, y) in pairs {
        joint[x as usize * ny + y as usize] += 1;
        cx[x as usize] += 1;
        cy[y as usize] += 1;
        n += 1;
    }
    JointEntropy {
        hx: entropy_of_counts(&cx),
        hy: entropy_of_counts(&cy),
        hxy: entropy_of_counts(&joint),
        pairs: n,
    }
}

/// Joint entropy over rows where both columns are observed.
pub(crate) fn joint_entropy_of(x: &[Option<u32>], y: &[Option<u32>]) -> JointEntropy {
    joint_entropy(x.iter().zip(y).filter_map(|(a, b)| Some(((*a)?, (*b)?))))
}

/// Joint entropy of a feature against a fully observed class.
pub(crate) fn joint_entropy_with_class(x: &[Option<u32>], class: &[u32]) -> JointEntropy {
    joint_entropy(x.iter().zip(class).filter_map(|(a, &c)| Some(((*a)?, c))))
}
