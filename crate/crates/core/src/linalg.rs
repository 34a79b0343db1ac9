//! Dense complex linear algebra used by the propagation engine.
//!
//! Eigenvalues come from nalgebra's complex Schur factorisation
//! `N = Q T Q^H`; eigenvectors are recovered by back substitution on the
//! triangular factor. The matrix exponential is an independent route
//! (Padé-13 scaling and squaring) that never touches the eigensolver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

const SCHUR_MAX_ITER: usize = 10_000;

/// Right eigenpairs, `N U = U diag(values)`, columns of `U` of unit 2-norm.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    pub vectors: CMat,
}

pub fn eigen(m: &CMat) -> Option<Eigen> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigen: matrix must be square");
    if n == 0 {
        return Some(Eigen {
            values: Vec::new(),
            vectors: CMat::zeros(0, 0),
        });
    }
    // Decoupled ladders are common (no chirp); keep them exact.
    let diagonal = (0..n).all(|c| (0..n).all(|r| r == c || m[(r, c)] == Complex64::new(0.0, 0.0)));
    if diagonal {
        return Some(Eigen {
            values: (0..n).map(|k| m[(k, k)]).collect(),
            vectors: CMat::identity(n, n),
        });
    }
    let scale = max_abs(m);
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)?;
    let (q, t) = schur.unpack();
    let values: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();

    // Triangular eigenvectors: x_k = 1, x_j = 0 for j > k and
    // (T_jj - λ_k) x_j = -Σ_{l=j+1..=k} T_jl x_l for j < k.
    let small = f64::EPSILON * scale;
    let mut x = CMat::zeros(n, n);
    for k in 0..n {
        let lambda = values[k];
        x[(k, k)] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut rhs = Complex64::new(0.0, 0.0);
            for l in j + 1..=k {
                rhs -= t[(j, l)] * x[(l, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            x[(j, k)] = rhs / denom;
        }
    }
    let mut vectors = q * x;
    for mut col in vectors.column_iter_mut() {
        let norm = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            col /= Complex64::new(norm, 0.0);
        }
    }
    Some(Eigen { values, vectors })
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().lu().try_inverse()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Maximum absolute column sum.
pub fn norm1(m: &CMat) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖m‖₁ ‖m⁻¹‖₁`, infinite when singular.
pub fn condition1(m: &CMat) -> f64 {
    match inverse(m) {
        Some(inv) => norm1(m) * norm1(&inv),
        None => f64::INFINITY,
    }
}

/// Padé(13/13) numerator coefficients.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest `‖A‖₁` for which the unscaled degree-13 approximant meets double
/// precision.
const THETA13: f64 = 5.371920351148152;

/// `exp(m)` by scaling and squaring with the degree-13 Padé approximant.
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "expm: matrix must be square");
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let norm = norm1(m);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = m * Complex64::new(0.5f64.powi(squarings), 0.0);

    let ident = CMat::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |k: usize| Complex64::new(PADE13[k], 0.0);

    let u_inner = &a6 * (&a6 * c(13) + &a4 * c(11) + &a2 * c(9)) + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &ident * c(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * c(12) + &a4 * c(10) + &a2 * c(8)) + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &ident * c(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular for scaled input");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn test_matrix(n: usize, seed: u64) -> CMat {
        let mut state = seed;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        CMat::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn eigen_reconstructs() {
        for seed in 1..6 {
            let m = test_matrix(17, seed);
            let e = eigen(&m).unwrap();
            let d = CMat::from_diagonal(&CVec::from_vec(e.values.clone()));
            let resid = max_abs(&(&m * &e.vectors - &e.vectors * d));
            assert!(resid < 1e-12 * max_abs(&m), "seed {seed}: {resid}");
        }
    }

    #[test]
    fn eigen_of_triangular_and_diagonal() {
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(2.0, 0.0),
                c(0.0, 1.0),
                c(0.0, 0.0),
                c(3.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-2.0, 0.5),
            ],
        );
        let e = eigen(&m).unwrap();
        let mut re: Vec<f64> = e.values.iter().map(|v| v.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 2.0).abs() < 1e-13 && (re[1] - 1.0).abs() < 1e-13 && (re[2] - 3.0).abs() < 1e-13);

        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(2.0, 1.0)]));
        let e = eigen(&d).unwrap();
        assert_eq!(e.values, vec![c(1.0, 0.0), c(2.0, 1.0)]);
        assert_eq!(e.vectors, CMat::identity(2, 2));
    }

    #[test]
    fn expm_diagonal_and_nilpotent() {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(0.5, 1.0), c(-30.0, 2.0), c(0.0, 40.0)]));
        let e = expm(&d);
        for k in 0..3 {
            assert!((e[(k, k)] - d[(k, k)].exp()).norm() < 1e-13 * d[(k, k)].exp().norm().max(1.0));
        }
        // exp([[0,1],[0,0]]) = [[1,1],[0,1]]
        let n = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e = expm(&n);
        assert!((e[(0, 1)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((e[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn expm_agrees_with_eigen_route() {
        let m = test_matrix(9, 42) * c(3.0, 0.0);
        let e = eigen(&m).unwrap();
        let inv = inverse(&e.vectors).unwrap();
        let d = CMat::from_diagonal(&CVec::from_vec(e.values.iter().map(|v| v.exp()).collect()));
        let via_eigen = &e.vectors * d * inv;
        let via_pade = expm(&m);
        assert!(max_abs(&(via_eigen - &via_pade)) < 1e-11 * max_abs(&via_pade));
    }

    #[test]
    fn expm_of_sum_of_commuting() {
        // exp(A) exp(-A) = I, up to cancellation of size ‖e^A‖‖e^-A‖.
        let m = test_matrix(6, 7) * c(10.0, 0.0);
        let (ep, em) = (expm(&m), expm(&(-&m)));
        let scale = norm1(&ep) * norm1(&em);
        assert!(max_abs(&(ep * em - CMat::identity(6, 6))) < 1e-13 * scale);
    }
}
