//! Numeric roots of monic univariate polynomials.
//!
//! Aberth–Ehrlich simultaneous iteration does the work; a companion-matrix
//! eigenvalue solve takes over if it stalls. Exact zero roots are deflated
//! up front, and the raw roots are then grouped into clusters so that the
//! multiplicity structure can be read off from floats.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::PolyError;

#[derive(Clone, Debug)]
pub struct RootOptions {
    pub max_iter: usize,
    /// Acceptance bound on `|p(r)|` relative to `Σ |c_i| |r|^i`.
    pub tol_root: f64,
    /// Unconditional merge radius relative to `1 + max|root|`.
    pub cluster_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { max_iter: 800, tol_root: 1e-8, cluster_tol: 1e-9 }
    }
}

/// All roots of the monic polynomial with coefficients `coeffs` (highest
/// degree first, `coeffs[0] == 1`), repeated by multiplicity and sorted
/// lexicographically by `(re, im)`. Members of a cluster are replaced by the
/// cluster center, so a multiple root appears as exactly equal entries.
pub fn roots_univariate(coeffs: &[Complex64], opts: &RootOptions) -> Result<Vec<Complex64>, PolyError> {
    if coeffs.len() < 2 {
        return Err(PolyError::Degree("root finding needs degree at least 1".into()));
    }
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(PolyError::NonConvergence { residual: f64::NAN });
    }
    if (coeffs[0] - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(PolyError::NotMonic);
    }
    let d = coeffs.len() - 1;
    let zeros = coeffs.iter().rev().take_while(|c| c.re == 0.0 && c.im == 0.0).count();
    let core = &coeffs[..coeffs.len() - zeros];
    let mut raw = vec![Complex64::new(0.0, 0.0); zeros];
    raw.extend(solve_nonzero(core, opts)?);
    debug_assert_eq!(raw.len(), d);

    let clustered = cluster(coeffs, &raw, zeros, opts.cluster_tol);
    let worst = clustered
        .iter()
        .map(|&r| horner(coeffs, r).norm() / abs_scale(coeffs, r.norm()))
        .fold(0.0, f64::max);
    if !(worst <= opts.tol_root) {
        return Err(PolyError::NonConvergence { residual: worst });
    }
    let mut out = clustered;
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * z + k)
}

fn horner_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &k in c {
        dp = dp * z + p;
        p = p * z + k;
    }
    (p, dp)
}

fn abs_scale(c: &[Complex64], r: f64) -> f64 {
    c.iter().fold(0.0, |acc, k| acc * r + k.norm())
}

/// Roots of a monic polynomial with nonzero constant term.
fn solve_nonzero(c: &[Complex64], opts: &RootOptions) -> Result<Vec<Complex64>, PolyError> {
    let d = c.len() - 1;
    match d {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-c[1]]),
        _ => {}
    }
    // Rescale x = s·y with s a power of two near the root magnitude.
    let s_raw = (1..=d).map(|i| c[i].norm().powf(1.0 / i as f64)).fold(0.0, f64::max);
    let s = if s_raw > 0.0 { 2f64.powi(s_raw.log2().round() as i32) } else { 1.0 };
    let mut scaled = Vec::with_capacity(d + 1);
    let mut f = 1.0;
    for &k in c {
        scaled.push(k / f);
        f *= s;
    }
    let roots = match aberth(&scaled, opts.max_iter) {
        Some(r) => r,
        None => companion_roots(&scaled)?,
    };
    Ok(roots.into_iter().map(|r| r * s).collect())
}

fn aberth(c: &[Complex64], max_iter: usize) -> Option<Vec<Complex64>> {
    let d = c.len() - 1;
    let centroid = -c[1] / d as f64;
    let radius = {
        let r = (1..=d).map(|i| c[i].norm().powf(1.0 / i as f64)).fold(0.0, f64::max);
        if r > 0.0 {
            r
        } else {
            1.0
        }
    };
    let mut z: Vec<Complex64> = (0..d)
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / d as f64 + 0.4;
            centroid + Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; d];
    let eps = f64::EPSILON;
    for _ in 0..max_iter {
        let mut all = true;
        for j in 0..d {
            if done[j] {
                continue;
            }
            let (p, dp) = horner_with_derivative(c, z[j]);
            let bound = 8.0 * d as f64 * eps * abs_scale(c, z[j].norm());
            if p.norm() <= bound {
                done[j] = true;
                continue;
            }
            all = false;
            let ratio = p / dp;
            let sum: Complex64 = (0..d)
                .filter(|&k| k != j)
                .map(|k| {
                    let diff = z[j] - z[k];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * sum;
            let step = if denom.norm() == 0.0 || !dp.is_finite() || dp.norm() == 0.0 {
                Complex64::new(radius * 1e-3, radius * 1e-3)
            } else {
                ratio / denom
            };
            if !step.is_finite() {
                return None;
            }
            z[j] -= step;
            if step.norm() <= eps * z[j].norm() {
                done[j] = true;
            }
        }
        if all {
            return Some(z);
        }
    }
    None
}

fn companion_roots(c: &[Complex64]) -> Result<Vec<Complex64>, PolyError> {
    let d = c.len() - 1;
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for j in 0..d {
        m[(0, j)] = -c[j + 1];
    }
    for i in 1..d {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let eig = m.schur().eigenvalues().ok_or(PolyError::NonConvergence { residual: f64::INFINITY })?;
    let mut roots: Vec<Complex64> = eig.iter().copied().collect();
    // Newton polish of each eigenvalue.
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(c, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *r - p / dp;
            if !next.is_finite() || horner(c, next).norm() >= p.norm() {
                break;
            }
            *r = next;
        }
    }
    Ok(roots)
}

/// Spread allowed for a validated cluster of multiplicity `m`, relative to
/// `1 + max|root|`. A perturbed m-fold root splits by roughly `ε^(1/m)`,
/// amplified when the other roots are close.
fn cluster_spread(m: usize) -> f64 {
    1e-8f64.powf(1.0 / m as f64).max(1e-9)
}

/// Taylor coefficients `p^(j)(c)/j!` for `j < count`, each paired with the
/// same quantity for the absolute-value polynomial at `max(|c|, radius)`.
fn taylor(coeffs: &[Complex64], c: Complex64, count: usize, radius: f64) -> Vec<(Complex64, f64)> {
    let mut work = coeffs.to_vec();
    let mut abs_work: Vec<f64> = coeffs.iter().map(|k| k.norm()).collect();
    let r = c.norm().max(radius);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        if work.is_empty() {
            out.push((Complex64::new(0.0, 0.0), 0.0));
            continue;
        }
        // Synthetic division by (x - c): the remainder is the next coefficient.
        let mut acc = Complex64::new(0.0, 0.0);
        let mut abs_acc = 0.0;
        let mut q = Vec::with_capacity(work.len());
        let mut abs_q = Vec::with_capacity(work.len());
        for (k, a) in work.iter().zip(&abs_work) {
            acc = acc * c + k;
            abs_acc = abs_acc * r + a;
            q.push(acc);
            abs_q.push(abs_acc);
        }
        let rem = q.pop().unwrap_or_default();
        let abs_rem = abs_q.pop().unwrap_or(0.0);
        out.push((rem, abs_rem));
        work = q;
        abs_work = abs_q;
    }
    out
}

/// Refines the center of a putative m-fold root by Newton on `p^(m-1)`,
/// which has a simple root there, then checks that `p, ..., p^(m-1)` all
/// vanish at the refined center to accuracy `tol` relative to the size of
/// the polynomial on the disk of radius `scale`.
fn validate_cluster(coeffs: &[Complex64], start: Complex64, m: usize, tol: f64, scale: f64) -> Option<Complex64> {
    let mut c = start;
    for _ in 0..8 {
        let t = taylor(coeffs, c, m + 1, scale);
        let (f, _) = t[m - 1];
        let (df, _) = t[m];
        if df.norm() == 0.0 {
            break;
        }
        let step = f / (df * m as f64);
        if !step.is_finite() {
            return None;
        }
        c -= step;
        if step.norm() <= f64::EPSILON * c.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let t = taylor(coeffs, c, m, scale);
    t.iter().all(|(v, s)| v.norm() <= tol * s.max(f64::MIN_POSITIVE)).then_some(c)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut k = i;
        while self.0[k] != r {
            let next = self.0[k];
            self.0[k] = r;
            k = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Groups raw roots into clusters and replaces each member by the cluster
/// mean. The first `zeros` entries are exact zero roots; any cluster that
/// contains one is centered at 0.
fn cluster(coeffs: &[Complex64], raw: &[Complex64], zeros: usize, tol: f64) -> Vec<Complex64> {
    let d = raw.len();
    let scale = 1.0 + raw.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut uf = UnionFind((0..d).collect());
    for i in 0..d {
        for j in i + 1..d {
            if (raw[i] - raw[j]).norm() <= tol * scale {
                uf.union(i, j);
            }
        }
    }

    // Validated clusters: for each seed, its m nearest roots with a small
    // spread and vanishing Taylor coefficients up to order m - 1.
    let mut candidates: Vec<(usize, f64, Vec<usize>, Complex64)> = Vec::new();
    for seed in 0..d {
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| (raw[a] - raw[seed]).norm().total_cmp(&(raw[b] - raw[seed]).norm()).then(a.cmp(&b)));
        for m in (2..=d).rev() {
            let mut members: Vec<usize> = order[..m].to_vec();
            members.sort_unstable();
            let center = mean(raw, &members, zeros);
            let spread = members.iter().map(|&i| (raw[i] - center).norm()).fold(0.0, f64::max);
            if spread > cluster_spread(m) * scale {
                continue;
            }
            let has_zero = members.iter().any(|&i| i < zeros);
            let refined = if has_zero {
                validate_cluster(coeffs, center, m, 1e-8, scale).map(|_| center)
            } else {
                validate_cluster(coeffs, center, m, 1e-8, scale)
            };
            if let Some(c) = refined {
                if (c - center).norm() <= cluster_spread(m) * scale {
                    candidates.push((m, spread, members, c));
                    break;
                }
            }
        }
    }
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut taken = vec![false; d];
    let mut refined_center: Vec<Option<Complex64>> = vec![None; d];
    for (_, _, members, c) in candidates {
        if members.iter().any(|&i| taken[i]) {
            continue;
        }
        for &i in &members {
            taken[i] = true;
            refined_center[i] = Some(c);
            uf.union(members[0], i);
        }
    }

    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for i in 0..d {
        let r = uf.find(i);
        groups.entry(r).or_default().push(i);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); d];
    for members in groups.values() {
        let validated: Vec<Complex64> = members.iter().filter_map(|&i| refined_center[i]).collect();
        let c = if members.iter().any(|&i| i < zeros) {
            Complex64::new(0.0, 0.0)
        } else if validated.len() == members.len() && validated.iter().all(|&v| v == validated[0]) {
            validated[0] + Complex64::new(0.0, 0.0)
        } else {
            mean(raw, members, zeros)
        };
        for &i in members {
            out[i] = c;
        }
    }
    out
}

fn mean(raw: &[Complex64], members: &[usize], zeros: usize) -> Complex64 {
    if members.iter().any(|&i| i < zeros) {
        return Complex64::new(0.0, 0.0);
    }
    let s: Complex64 = members.iter().map(|&i| raw[i]).sum();
    let c = s / members.len() as f64;
    // Normalize signed zeros so equal roots compare equal bitwise.
    Complex64::new(c.re + 0.0, c.im + 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(cs: &[f64]) -> Vec<Complex64> {
        cs.iter().map(|&x| c(x, 0.0)).collect()
    }

    fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
        let mut p = vec![c(1.0, 0.0)];
        for &r in roots {
            let mut next = p.clone();
            next.push(c(0.0, 0.0));
            for (i, &k) in p.iter().enumerate() {
                next[i + 1] -= k * r;
            }
            p = next;
        }
        p
    }

    #[test]
    fn simple_examples() {
        let o = RootOptions::default();
        let r = roots_univariate(&real(&[1.0, 0.0, -1.0]), &o).unwrap();
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-14 && (r[1] - c(1.0, 0.0)).norm() < 1e-14);
        let r = roots_univariate(&real(&[1.0, 0.0, 0.0, 0.0]), &o).unwrap();
        assert_eq!(r, vec![c(0.0, 0.0); 3]);
        let r = roots_univariate(&real(&[1.0, -2.0, 2.0]), &o).unwrap();
        assert!((r[0] - c(1.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - c(1.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn multiple_roots_cluster_exactly() {
        let o = RootOptions::default();
        // (x - 1)^3 (x + 2)^2 x
        let roots = [1.0, 1.0, 1.0, -2.0, -2.0, 0.0];
        let p = poly_from_roots(&real(&roots));
        let r = roots_univariate(&p, &o).unwrap();
        assert_eq!(r[0], r[1]);
        assert_eq!(r[3], r[4]);
        assert_eq!(r[4], r[5]);
        assert!((r[0] - c(-2.0, 0.0)).norm() < 1e-10);
        assert_eq!(r[2], c(0.0, 0.0));
        assert!((r[3] - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn close_but_distinct_roots_stay_apart() {
        let o = RootOptions::default();
        let p = poly_from_roots(&real(&[1.0, 1.001, -3.0]));
        let r = roots_univariate(&p, &o).unwrap();
        assert!((r[1] - r[2]).norm() > 5e-4);
    }

    #[test]
    fn rejects_bad_input() {
        let o = RootOptions::default();
        assert!(roots_univariate(&real(&[1.0]), &o).is_err());
        assert!(roots_univariate(&real(&[2.0, 1.0]), &o).is_err());
    }

    #[test]
    fn companion_fallback_agrees() {
        let p = poly_from_roots(&[c(1.0, 2.0), c(-0.5, 0.0), c(3.0, -1.0)]);
        let mut r = companion_roots(&p).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - c(-0.5, 0.0)).norm() < 1e-12);
        assert!((r[2] - c(3.0, -1.0)).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn product_reproduces_coefficients(
            parts in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..12)
        ) {
            let roots: Vec<Complex64> = parts.iter().map(|&(a, b)| c(a, b)).collect();
            let p = poly_from_roots(&roots);
            let found = roots_univariate(&p, &RootOptions::default()).unwrap();
            let q = poly_from_roots(&found);
            let scale: f64 = p.iter().map(|k| k.norm()).fold(0.0, f64::max);
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).norm() <= 1e-8 * scale);
            }
        }

        #[test]
        fn planted_multiplicities_recovered(
            centers in proptest::collection::vec((-3i32..3, -3i32..3), 1..4),
            mults in proptest::collection::vec(1usize..4, 4),
        ) {
            let mut distinct: Vec<Complex64> = Vec::new();
            for &(a, b) in &centers {
                let z = c(a as f64 * 0.5, b as f64 * 0.5);
                if !distinct.contains(&z) {
                    distinct.push(z);
                }
            }
            let mut roots = Vec::new();
            for (i, &z) in distinct.iter().enumerate() {
                for _ in 0..mults[i] {
                    roots.push(z);
                }
            }
            let p = poly_from_roots(&roots);
            let found = roots_univariate(&p, &RootOptions::default()).unwrap();
            let mut uniq = found.clone();
            uniq.dedup();
            prop_assert_eq!(uniq.len(), distinct.len());
        }
    }
}
