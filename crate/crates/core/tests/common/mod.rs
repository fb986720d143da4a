#![allow(dead_code)]

// Naive superoperator built from dense operator products, column by column.

use opo_core::{ModelParams, C64};

pub type Dense = Vec<Vec<C64>>;

fn zeros(n: usize) -> Dense {
    vec![vec![C64::new(0.0, 0.0); n]; n]
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

fn lin(terms: &[(C64, &Dense)]) -> Dense {
    let n = terms[0].1.len();
    let mut c = zeros(n);
    for (w, m) in terms {
        for i in 0..n {
            for j in 0..n {
                c[i][j] += *w * m[i][j];
            }
        }
    }
    c
}

fn dagger(a: &Dense) -> Dense {
    let n = a.len();
    let mut c = zeros(n);
    for i in 0..n {
        for j in 0..n {
            c[i][j] = a[j][i].conj();
        }
    }
    c
}

fn lower(n: usize) -> Dense {
    let mut a = zeros(n);
    for k in 1..n {
        a[k - 1][k] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// `L(E) = -i[H, E] + g D[a]E + (beta/2) D[a^2]E` with
/// `H = i(h/8)(a†² - a²) + iF(a† - a)`.
pub fn apply_naive(p: &ModelParams, e: &Dense) -> Dense {
    let n = e.len();
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let a = lower(n);
    let ad = dagger(&a);
    let a2 = mul(&a, &a);
    let ad2 = mul(&ad, &ad);
    let ham = lin(&[
        (i * (p.h() / 8.0), &ad2),
        (-i * (p.h() / 8.0), &a2),
        (i * p.field(), &ad),
        (-i * p.field(), &a),
    ]);
    let comm = lin(&[(one, &mul(&ham, e)), (-one, &mul(e, &ham))]);
    let dissipator = |l: &Dense, ld: &Dense| {
        let ldl = mul(ld, l);
        lin(&[
            (one, &mul(&mul(l, e), ld)),
            (C64::new(-0.5, 0.0), &mul(&ldl, e)),
            (C64::new(-0.5, 0.0), &mul(e, &ldl)),
        ])
    };
    lin(&[
        (-i, &comm),
        (C64::new(p.g(), 0.0), &dissipator(&a, &ad)),
        (C64::new(p.beta() / 2.0, 0.0), &dissipator(&a2, &ad2)),
    ])
}

pub fn naive_superoperator(p: &ModelParams) -> Dense {
    let n = p.n_max();
    let dim = n * n;
    let mut l = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    for s in 0..n {
        for r in 0..n {
            let mut e = zeros(n);
            e[r][s] = C64::new(1.0, 0.0);
            let out = apply_naive(p, &e);
            let q = r + n * s;
            for nn in 0..n {
                for m in 0..n {
                    l[m + n * nn][q] = out[m][nn];
                }
            }
        }
    }
    l
}

/// Largest entrywise deviation between the sparse assembly and the oracle,
/// and the oracle's count of entries above a few ulps.
pub fn oracle_deviation(p: &ModelParams) -> (f64, usize, usize) {
    let sparse = opo_core::liouvillian::build_liouvillian(p);
    let naive = naive_superoperator(p);
    let scale = sparse.max_abs();
    let dim = sparse.dim();
    let mut worst: f64 = 0.0;
    let mut nonzero = 0;
    for pi in 0..dim {
        for qi in 0..dim {
            worst = worst.max((sparse.get(pi, qi) - naive[pi][qi]).norm());
            if naive[pi][qi].norm() > ULPS * f64::EPSILON * scale {
                nonzero += 1;
            }
        }
    }
    (worst / scale, nonzero, sparse.nnz())
}

// Coefficients such as sqrt(m) sqrt(m - 1) and sqrt(m (m - 1)) may differ in
// the last bit, so "exact" means agreement to a few ulps of the largest entry.
pub const ULPS: f64 = 4.0;
