//! Dense Hermitian eigensolver.
//!
//! Householder reduction to Hermitian tridiagonal form, a diagonal phase
//! similarity that makes the off-diagonal real, then implicit QL iterations
//! with Wilkinson-style shifts. Eigenvector bases are stored as rows so every
//! rotation touches contiguous memory.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::DenseOperator;
use crate::scalar::{Real, C};

const MAX_QL_ITERATIONS: usize = 64;

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigh<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<C<T>>>,
}

/// Full eigendecomposition of a Hermitian matrix. Only the lower triangle's
/// Hermitian part is meaningful; callers are expected to validate hermiticity.
///
/// Each eigenvector is phase-fixed so its largest-magnitude entry (first such
/// index on ties) is real and positive.
pub fn eigh<T: Real>(a: &DenseOperator<T>) -> Result<Eigh<T>> {
    let (values, rows) = solve(a, true)?;
    let rows = rows.expect("vectors requested");
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        values[j]
            .partial_cmp(&values[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| values[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut v = rows[i].clone();
            fix_phase(&mut v);
            v
        })
        .collect();
    Ok(Eigh { values, vectors })
}

/// Eigenvalues only, descending.
pub fn eigvalsh<T: Real>(a: &DenseOperator<T>) -> Result<Vec<T>> {
    let (mut values, _) = solve(a, false)?;
    values.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}

/// Trace distance `||a - b||_1 / 2` between two Hermitian matrices.
pub fn trace_distance<T: Real>(a: &DenseOperator<T>, b: &DenseOperator<T>) -> Result<T> {
    let mut diff = a.sub(b);
    diff.symmetrize();
    let values = eigvalsh(&diff)?;
    Ok(values.iter().map(|v| v.abs()).sum::<T>() * T::lit(0.5))
}

fn fix_phase<T: Real>(v: &mut [C<T>]) {
    let mut best = 0;
    let mut best_mag = T::neg_infinity();
    for (i, a) in v.iter().enumerate() {
        let mag = a.norm();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    if best_mag > T::zero() {
        let phase = v[best].conj() / best_mag;
        for a in v.iter_mut() {
            *a = *a * phase;
        }
        v[best] = C::new(v[best].re, T::zero());
    }
}

type Solved<T> = (Vec<T>, Option<Vec<Vec<C<T>>>>);

fn solve<T: Real>(a: &DenseOperator<T>, want_vectors: bool) -> Result<Solved<T>> {
    let n = a.dim();
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(Vec::new)));
    }
    let mut work = a.entries().to_vec();
    // rows[j] holds column j of the accumulated unitary.
    let mut rows: Vec<Vec<C<T>>> = if want_vectors {
        (0..n)
            .map(|j| {
                let mut r = vec![C::zero(); n];
                r[j] = C::one();
                r
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut v = vec![C::<T>::zero(); n];
    let mut p = vec![C::<T>::zero(); n];
    let mut u = vec![C::<T>::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        // Column k below the diagonal, read from the Hermitian row k.
        let alpha = (lo..n)
            .map(|i| work[k * n + i].norm_sqr())
            .sum::<T>()
            .sqrt();
        if alpha == T::zero() {
            continue;
        }
        let x0 = work[k * n + lo].conj();
        let x0_abs = x0.norm();
        let phase = if x0_abs > T::zero() {
            x0 / x0_abs
        } else {
            C::one()
        };
        for i in lo..n {
            v[i] = work[k * n + i].conj();
        }
        v[lo] = v[lo] + phase * alpha;
        let vnorm2: T = (lo..n).map(|i| v[i].norm_sqr()).sum();
        let tau = T::lit(2.0) / vnorm2;

        for r in lo..n {
            let row = &work[r * n + lo..(r + 1) * n];
            let s = row
                .iter()
                .zip(&v[lo..n])
                .fold(C::zero(), |acc: C<T>, (x, y)| acc + x * y);
            p[r] = s * tau;
        }
        let vp = (lo..n).fold(C::<T>::zero(), |acc, i| acc + v[i].conj() * p[i]);
        let kk = vp.re * tau * T::lit(0.5);
        for i in lo..n {
            p[i] = p[i] - v[i] * kk;
        }
        for r in lo..n {
            let vr = v[r];
            let wr = p[r];
            let row = &mut work[r * n + lo..(r + 1) * n];
            for (c, a) in row.iter_mut().enumerate() {
                let c = c + lo;
                *a = *a - vr * p[c].conj() - wr * v[c].conj();
            }
        }
        let sub = -(phase * alpha);
        work[lo * n + k] = sub;
        work[k * n + lo] = sub.conj();
        for i in lo + 1..n {
            work[i * n + k] = C::zero();
            work[k * n + i] = C::zero();
        }

        if want_vectors {
            // Q <- Q (I - tau v v^dagger): every column j gets -tau conj(v_j) (Q v).
            for x in u.iter_mut() {
                *x = C::zero();
            }
            for i in lo..n {
                let vi = v[i];
                for (acc, q) in u.iter_mut().zip(&rows[i]) {
                    *acc = *acc + q * vi;
                }
            }
            for j in lo..n {
                let coef = v[j].conj() * tau;
                for (q, ui) in rows[j].iter_mut().zip(&u) {
                    *q = *q - ui * coef;
                }
            }
        }
        for x in v.iter_mut() {
            *x = C::zero();
        }
    }

    let mut diag: Vec<T> = (0..n).map(|k| work[k * n + k].re).collect();
    let mut off = vec![T::zero(); n];
    let mut phase = C::<T>::one();
    for k in 0..n - 1 {
        let e = work[(k + 1) * n + k];
        let mag = e.norm();
        off[k] = mag;
        if mag > T::zero() {
            phase = phase * (e / mag);
        }
        if want_vectors {
            for q in rows[k + 1].iter_mut() {
                *q = *q * phase;
            }
        }
    }

    tridiagonal_ql(&mut diag, &mut off, want_vectors.then_some(&mut rows))?;
    Ok((diag, want_vectors.then_some(rows)))
}

/// Implicit QL on a real symmetric tridiagonal matrix. `off[i]` couples
/// `i` and `i + 1`; `off[n-1]` must be zero on entry.
fn tridiagonal_ql<T: Real>(
    diag: &mut [T],
    off: &mut [T],
    mut rows: Option<&mut Vec<Vec<C<T>>>>,
) -> Result<()> {
    let n = diag.len();
    let two = T::lit(2.0);
    // Deflate against the matrix scale so clusters of near-zero eigenvalues converge.
    let scale = (0..n)
        .map(|i| diag[i].abs() + off[i].abs())
        .fold(T::zero(), T::max);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= T::epsilon() * dd.max(scale) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence);
            }
            let mut g = (diag[l + 1] - diag[l]) / (two * off[l]);
            let mut r = g.hypot(T::one());
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == T::zero() {
                    diag[i + 1] = diag[i + 1] - p;
                    off[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + two * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                if let Some(rows) = rows.as_deref_mut() {
                    let (head, tail) = rows.split_at_mut(i + 1);
                    let lower = &mut head[i];
                    let upper = &mut tail[0];
                    for (a, b) in lower.iter_mut().zip(upper.iter_mut()) {
                        let f = *b;
                        *b = *a * s + f * c;
                        *a = *a * c - f * s;
                    }
                }
            }
            if deflated {
                continue;
            }
            diag[l] = diag[l] - p;
            off[l] = g;
            off[m] = T::zero();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::inner;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(d: usize, seed: u64) -> DenseOperator<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DenseOperator::from_fn(d, |_, _| {
            C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        a.symmetrize();
        a
    }

    fn reconstruct(e: &Eigh<f64>) -> DenseOperator<f64> {
        let d = e.values.len();
        let mut out = DenseOperator::zeros(d);
        for (lam, v) in e.values.iter().zip(&e.vectors) {
            out.add_outer(v, *lam);
        }
        out
    }

    #[test]
    fn reconstructs_random_hermitian() {
        for (d, seed) in [(1, 1), (2, 2), (3, 3), (7, 4), (16, 5), (33, 6)] {
            let a = random_hermitian(d, seed);
            let e = eigh(&a).unwrap();
            let err = reconstruct(&e).max_abs_diff(&a);
            assert!(err < 1e-12, "d = {d}: {err}");
            for j in 0..d {
                for k in 0..d {
                    let ip = inner(&e.vectors[j], &e.vectors[k]);
                    let want = if j == k { 1.0 } else { 0.0 };
                    assert!((ip - C::new(want, 0.0)).norm() < 1e-12);
                }
            }
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn low_rank_large_matrix_converges() {
        let d = 256;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut a = DenseOperator::<f64>::zeros(d);
        for w in [0.4, 0.3, 0.2, 0.1] {
            let v: Vec<C<f64>> = (0..d)
                .map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let v: Vec<C<f64>> = v.iter().map(|x| x / n).collect();
            a.add_outer(&v, w);
        }
        let e = eigh(&a).unwrap();
        assert!(reconstruct(&e).max_abs_diff(&a) < 1e-12);
        assert!(e.values[4..].iter().all(|v| v.abs() < 1e-12));
        let zero = eigvalsh(&DenseOperator::<f64>::zeros(64)).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn eigenvalues_match_characteristic_2x2() {
        // [[a, b], [b*, c]]: (a+c)/2 +- sqrt(((a-c)/2)^2 + |b|^2)
        let b = C::new(0.3, -0.4);
        let a = DenseOperator::from_rows(2, vec![C::new(1.0, 0.0), b, b.conj(), C::new(-2.0, 0.0)])
            .unwrap();
        let vals = eigvalsh(&a).unwrap();
        let disc = (1.5f64 * 1.5 + b.norm_sqr()).sqrt();
        assert!((vals[0] - (-0.5 + disc)).abs() < 1e-14);
        assert!((vals[1] - (-0.5 - disc)).abs() < 1e-14);
    }

    #[test]
    fn degenerate_spectrum_is_orthonormal_and_phase_fixed() {
        let d = 8;
        let id = DenseOperator::<f64>::identity(d).scale(C::new(1.0 / d as f64, 0.0));
        let e = eigh(&id).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0 / d as f64).abs() < 1e-15));
        for v in &e.vectors {
            let (imax, _) = v
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
                .unwrap();
            assert!(v[imax].im == 0.0 && v[imax].re > 0.0);
        }
    }

    #[test]
    fn deterministic_bitwise() {
        let a = random_hermitian(24, 9);
        assert_eq!(eigh(&a).unwrap(), eigh(&a).unwrap());
    }

    #[test]
    fn f32_reconstruction() {
        let a = random_hermitian(12, 11).cast::<f32>();
        let e = eigh(&a).unwrap();
        let mut out = DenseOperator::<f32>::zeros(12);
        for (lam, v) in e.values.iter().zip(&e.vectors) {
            out.add_outer(v, *lam);
        }
        assert!(out.max_abs_diff(&a) < 1e-5);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let mut a = DenseOperator::<f64>::zeros(4);
        let mut b = DenseOperator::<f64>::zeros(4);
        a[(0, 0)] = C::new(1.0, 0.0);
        b[(3, 3)] = C::new(1.0, 0.0);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    }
}
