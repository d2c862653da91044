//! Proximal primitives for L1 problems.

/// `sign(z) * max(|z| - gamma, 0)`, the proximal operator of `gamma * |.|`.
#[inline]
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Euclidean projection of `v` onto the L1 ball of radius `sigma`.
pub fn project_l1(v: &[f64], sigma: f64) -> Vec<f64> {
    let norm: f64 = v.iter().map(|x| x.abs()).sum();
    if norm <= sigma {
        return v.to_vec();
    }
    if sigma <= 0.0 {
        return vec![0.0; v.len()];
    }
    let theta = l1_threshold(v, sigma);
    v.iter().map(|&x| soft_threshold(x, theta)).collect()
}

/// Threshold `theta` with `sum(max(|v_i| - theta, 0)) = sigma`, assuming
/// `||v||_1 > sigma > 0`.
fn l1_threshold(v: &[f64], sigma: f64) -> f64 {
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &m) in mags.iter().enumerate() {
        cumsum += m;
        let t = (cumsum - sigma) / (i + 1) as f64;
        if m > t {
            theta = t;
        } else {
            break;
        }
    }
    theta.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrinkage_values() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 0.5), -2.5);
    }

    #[test]
    fn projection_values() {
        assert_eq!(project_l1(&[3.0, 0.0], 1.0), vec![1.0, 0.0]);
        assert_eq!(project_l1(&[0.2, 0.3], 1.0), vec![0.2, 0.3]);
        let p = project_l1(&[2.0, 1.0], 2.0);
        assert!((p[0] - 1.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        assert_eq!(project_l1(&[2.0, -1.0], 0.0), vec![0.0, 0.0]);
        let q = project_l1(&[-2.0, 1.0], 2.0);
        assert!((q[0] + 1.5).abs() < 1e-15);
    }
}
