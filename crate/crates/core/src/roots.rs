//! Numeric roots of binary forms and matching of point sets on P¹ up to
//! fractional linear transformations.

use num_complex::Complex64;

/// A point `(a : b)` of the complex projective line.
pub type ProjectivePoint = [Complex64; 2];

/// Roots of a univariate polynomial `Σ coeffs[k] z^k` by Aberth–Ehrlich iteration.
///
/// `coeffs` is in ascending order; the leading coefficient must be nonzero.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    assert!(lead.norm() > 0.0, "leading coefficient must be nonzero");
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    // Cauchy bound on root moduli
    let radius = 1.0
        + monic[..degree]
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = std::f64::consts::TAU * (k as f64 + 0.25) / degree as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, angle)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for k in 0..degree {
            let (p, dp) = horner_with_derivative(&monic, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= step;
            max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // Newton polish on the original coefficients
    for root in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(&monic, *root);
            if dp.norm() == 0.0 {
                break;
            }
            *root -= p / dp;
        }
    }
    z
}

fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of the binary form `Σ coeffs[k] a^(n−k) b^k` as points `(a : b)`.
///
/// Exact zeros at either end of `coeffs` give roots at `(1:0)` and `(0:1)`;
/// the caller passes `exact_zero` flags for those, since floating-point
/// coefficients cannot distinguish them reliably.
pub fn binary_form_roots(coeffs: &[Complex64], exact_zero: &[bool]) -> Vec<ProjectivePoint> {
    let n = coeffs.len() - 1;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut roots = Vec::with_capacity(n);
    // coefficient of a^n vanishes ⇒ b divides the form ⇒ root (1:0)
    let lead_zeros = exact_zero.iter().take_while(|&&z| z).count();
    if lead_zeros == coeffs.len() {
        return roots;
    }
    let trail_zeros = exact_zero.iter().rev().take_while(|&&z| z).count();
    roots.extend(std::iter::repeat_n([one, zero], lead_zeros));
    roots.extend(std::iter::repeat_n([zero, one], trail_zeros));
    // remaining form in z = a/b: Σ c_k z^(n−k), ascending powers
    let inner: Vec<Complex64> = (lead_zeros..=n - trail_zeros)
        .rev()
        .map(|k| coeffs[k])
        .collect();
    let scale = inner.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
    let inner: Vec<Complex64> = inner.iter().map(|c| c / scale).collect();
    roots.extend(polynomial_roots(&inner).into_iter().map(|z| [z, one]));
    roots
}

fn bracket(p: &ProjectivePoint, q: &ProjectivePoint) -> Complex64 {
    p[0] * q[1] - p[1] * q[0]
}

/// Cross-ratio `[a,c][b,d] / ([a,d][b,c])` of four points of P¹.
pub fn cross_ratio(
    a: &ProjectivePoint,
    b: &ProjectivePoint,
    c: &ProjectivePoint,
    d: &ProjectivePoint,
) -> Complex64 {
    bracket(a, c) * bracket(b, d) / (bracket(a, d) * bracket(b, c))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MobiusMatch {
    /// `permutation[k]` is the index of the point matched with target `k`.
    pub permutation: Vec<usize>,
    /// Largest relative cross-ratio discrepancy under that permutation.
    pub max_error: f64,
}

/// Finds the bijection `points ↔ targets` under which the two configurations are
/// closest to being related by a fractional linear map.
///
/// The comparison uses the cross-ratios `(t₀,t₁;t₂,t_k)` for `k ≥ 3`, which
/// together determine an ordered configuration up to such maps.
pub fn match_up_to_mobius(points: &[ProjectivePoint], targets: &[ProjectivePoint]) -> MobiusMatch {
    assert_eq!(points.len(), targets.len());
    let n = targets.len();
    assert!(n >= 4, "need at least four points");
    let target_ratios: Vec<Complex64> = (3..n)
        .map(|k| cross_ratio(&targets[0], &targets[1], &targets[2], &targets[k]))
        .collect();
    let mut best = MobiusMatch {
        permutation: (0..n).collect(),
        max_error: f64::INFINITY,
    };
    for perm in permutations(n) {
        let err = (3..n)
            .map(|k| {
                let r = cross_ratio(
                    &points[perm[0]],
                    &points[perm[1]],
                    &points[perm[2]],
                    &points[perm[k]],
                );
                let t = target_ratios[k - 3];
                let e = (r - t).norm() / t.norm().max(1.0);
                if e.is_finite() {
                    e
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0_f64, f64::max);
        if err < best.max_error {
            best = MobiusMatch {
                permutation: perm,
                max_error: err,
            };
        }
    }
    best
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn expand(roots: &[Complex64]) -> Vec<Complex64> {
        let mut coeffs = vec![c(1.0)];
        for r in roots {
            let mut next = vec![c(0.0); coeffs.len() + 1];
            for (k, a) in coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            coeffs = next;
        }
        coeffs
    }

    #[test]
    fn recovers_known_roots() {
        let roots = [c(-1.5), c(0.25), Complex64::new(2.0, 1.0), Complex64::new(0.5, -3.0), c(4.0)];
        let found = polynomial_roots(&expand(&roots));
        for r in roots {
            let d = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-10, "root {r} missed by {d}");
        }
    }

    #[test]
    fn binary_form_with_roots_at_zero_and_infinity() {
        // a·b·(a − 2b)(a + b): coefficients of a^4, a^3 b, ..., b^4
        let coeffs = [c(0.0), c(1.0), c(-1.0), c(-2.0), c(0.0)];
        let flags = [true, false, false, false, true];
        let roots = binary_form_roots(&coeffs, &flags);
        assert_eq!(roots.len(), 4);
        let targets = [[c(1.0), c(0.0)], [c(0.0), c(1.0)], [c(2.0), c(1.0)], [c(-1.0), c(1.0)]];
        let m = match_up_to_mobius(&roots, &targets);
        assert!(m.max_error < 1e-12);
    }

    #[test]
    fn mobius_images_match_with_permutation() {
        let lambdas = [0.0, 1.0, -1.0, 2.0, 3.0, 5.0];
        let targets: Vec<ProjectivePoint> = lambdas.iter().map(|&l| [c(l), c(1.0)]).collect();
        // z ↦ (2z + 1)/(z − 7), then shuffle
        let images: Vec<ProjectivePoint> = lambdas
            .iter()
            .map(|&l| [c(2.0 * l + 1.0), c(l - 7.0)])
            .collect();
        let order = [3, 0, 5, 1, 4, 2];
        let shuffled: Vec<ProjectivePoint> = order.iter().map(|&k| images[k]).collect();
        let m = match_up_to_mobius(&shuffled, &targets);
        assert!(m.max_error < 1e-12);
        for (k, &p) in m.permutation.iter().enumerate() {
            assert_eq!(order[p], k);
        }
        let perturbed: Vec<ProjectivePoint> =
            targets.iter().map(|t| [t[0] + c(0.1) * t[0] * t[0], t[1]]).collect();
        assert!(match_up_to_mobius(&perturbed, &targets).max_error > 1e-3);
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(6).len(), 720);
        assert_eq!(permutations(1), vec![vec![0]]);
    }
}
