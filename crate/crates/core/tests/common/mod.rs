#![allow(dead_code)]

use migdet::linalg::{ComplexMatrix, ComplexVector};
use migdet::scenario::{steering_vector, SupportHypothesis};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

pub type NaMatrix = DMatrix<Complex64>;

pub fn cn(rng: &mut ChaCha8Rng) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(rows, cols, |_, _| cn(rng))
}

/// Random Hermitian positive-definite matrix `A A† / n + δ I`.
pub fn random_hpd(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix<f64> {
    let a = random_matrix(rng, n, 2 * n);
    let mut g = a.gram().scaled(1.0 / n as f64);
    g.add_assign(&ComplexMatrix::identity(n).scaled(0.1));
    g
}

/// A selection problem: primary data with a random target, training data and steering.
pub struct Instance {
    pub z: ComplexMatrix<f64>,
    pub r: ComplexMatrix<f64>,
    pub v: ComplexVector<f64>,
    pub truth: SupportHypothesis,
}

pub fn random_instance(rng: &mut ChaCha8Rng, n_p: usize, n_a: usize, k: usize) -> Instance {
    let nu: f64 = rng.random_range(-0.5..0.5);
    let v = steering_vector(n_a, nu);
    let truth = SupportHypothesis::draw(n_p, rng);
    let amp: f64 = 10f64.powf(rng.random_range(-1.0..1.0));
    let mut z = random_matrix(rng, n_a, n_p);
    for i in truth.indices() {
        let a = cn(rng) * amp;
        let mut col = z.column(i);
        col.axpy(a, &v);
        z.set_column(i, &col);
    }
    let r = random_matrix(rng, n_a, k);
    Instance { z, r, v, truth }
}

pub fn to_na(m: &ComplexMatrix<f64>) -> NaMatrix {
    NaMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn vec_to_na(v: &ComplexVector<f64>) -> NaMatrix {
    NaMatrix::from_fn(v.dim(), 1, |i, _| v[i])
}

pub fn inverse(m: &NaMatrix) -> NaMatrix {
    m.clone().try_inverse().expect("invertible")
}

/// `ln det` through an LU determinant.
pub fn ln_det(m: &NaMatrix) -> f64 {
    let d = m.clone().determinant();
    assert!(
        d.re > 0.0 && d.im.abs() <= 1e-8 * d.re,
        "determinant {d} of a PD matrix"
    );
    d.re.ln()
}

/// `ln det` through Hermitian eigenvalues.
pub fn ln_det_eigen(m: &NaMatrix) -> f64 {
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .map(|x| {
            assert!(*x > 0.0);
            x.ln()
        })
        .sum()
}

/// `x† A y`
pub fn form(x: &NaMatrix, a: &NaMatrix, y: &NaMatrix) -> Complex64 {
    (x.adjoint() * a * y)[(0, 0)]
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * 1f64.max(a.abs()).max(b.abs())
}

/// Every combination of `N_p ∈ {4, 8, 16}` and `N_a ∈ {2, 4, 8}`.
pub const SHAPES: [(usize, usize); 9] = [
    (4, 2),
    (4, 4),
    (4, 8),
    (8, 2),
    (8, 4),
    (8, 8),
    (16, 2),
    (16, 4),
    (16, 8),
];

pub fn amf_oracle(inst: &Instance) -> Vec<f64> {
    let r = to_na(&inst.r);
    let s_inv = inverse(&(&r * r.adjoint()));
    let v = vec_to_na(&inst.v);
    let denom = form(&v, &s_inv, &v).re;
    (0..inst.z.cols())
        .map(|i| {
            let z = vec_to_na(&inst.z.column(i));
            form(&z, &s_inv, &v).norm_sqr() / denom
        })
        .collect()
}

/// Literal `−2 log[f(R; M̂) f_{l,h}(Z; α̂, M̂)] + p_2`.
pub fn penalized_likelihood(inst: &Instance, support: SupportHypothesis, rho: f64) -> f64 {
    let (n_a, n_p, k) = (inst.v.dim(), inst.z.cols(), inst.r.cols());
    let r = to_na(&inst.r);
    let v = vec_to_na(&inst.v);
    let cols: Vec<NaMatrix> = (0..n_p).map(|i| vec_to_na(&inst.z.column(i))).collect();
    let mut s_prime = NaMatrix::zeros(n_a, n_a);
    for (i, z) in cols.iter().enumerate() {
        if !support.contains_index(i) {
            s_prime += z * z.adjoint();
        }
    }
    let s_lh = &r * r.adjoint() + &s_prime;
    let s_inv = inverse(&s_lh);
    let denom = form(&v, &s_inv, &v);
    let mut resid_scatter = NaMatrix::zeros(n_a, n_a);
    for i in support.indices() {
        let alpha = form(&v, &s_inv, &cols[i]) / denom;
        let e = &cols[i] - &v * alpha;
        resid_scatter += &e * e.adjoint();
    }
    let m_hat = (&s_lh + &resid_scatter) / Complex64::new((n_p + k) as f64, 0.0);
    let m_inv = inverse(&m_hat);
    let ld = ln_det(&m_hat);
    let log_f_r =
        -((n_a * k) as f64) * PI.ln() - k as f64 * ld - (&m_inv * (&r * r.adjoint())).trace().re;
    let log_f_z = -((n_a * n_p) as f64) * PI.ln()
        - n_p as f64 * ld
        - (&m_inv * (&resid_scatter + &s_prime)).trace().re;
    -2.0 * (log_f_r + log_f_z) + (1.0 + rho) * (2.0 * (support.h() + 1) as f64 + (n_a * n_a) as f64)
}

/// Literal `log[f(R; M̂_0) f_0(Z; M̂_0)]`, maximized over `M`.
pub fn null_log_likelihood(inst: &Instance) -> f64 {
    let (n_a, n_p, k) = (inst.v.dim(), inst.z.cols(), inst.r.cols());
    let r = to_na(&inst.r);
    let z = to_na(&inst.z);
    let m0 = (&r * r.adjoint() + &z * z.adjoint()) / Complex64::new((n_p + k) as f64, 0.0);
    let m_inv = inverse(&m0);
    let ld = ln_det(&m0);
    let log_f_r =
        -((n_a * k) as f64) * PI.ln() - k as f64 * ld - (&m_inv * (&r * r.adjoint())).trace().re;
    let log_f_z = -((n_a * n_p) as f64) * PI.ln()
        - n_p as f64 * ld
        - (&m_inv * (&z * z.adjoint())).trace().re;
    log_f_r + log_f_z
}

/// First minimizer in lexicographic `(l, h)` order.
pub fn brute_argmin(n_p: usize, f: impl Fn(SupportHypothesis) -> f64) -> (SupportHypothesis, f64) {
    let mut best: Option<(SupportHypothesis, f64)> = None;
    for s in SupportHypothesis::candidates(n_p) {
        let x = f(s);
        if best.is_none_or(|(_, b)| x < b) {
            best = Some((s, x));
        }
    }
    best.unwrap()
}

pub fn instances(seed: u64, n: usize) -> impl Iterator<Item = Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(move |i| {
        let (n_p, n_a) = SHAPES[i % SHAPES.len()];
        let k = n_a + rng.random_range(0..=n_a);
        random_instance(&mut rng, n_p, n_a, k)
    })
}
