//! Seeded sampling and local-polish utilities shared by the sampled-mode
//! solvers and the search routines.

use rand::rngs::StdRng;
use rand::Rng;

use crate::linalg::Vector;
use crate::norms::{norm, NormKind};
use crate::scalar::Scalar;

/// Standard normal via Box-Muller (keeps the RNG stream identical across
/// scalar types).
fn gaussian<S: Scalar>(rng: &mut StdRng) -> S {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    S::c((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos())
}

pub fn gaussian_vector<S: Scalar>(rng: &mut StdRng, dim: usize) -> Vector<S> {
    Vector::from_fn(dim, |_| gaussian(rng))
}

/// Uniform direction on the Euclidean unit sphere.
pub fn unit_sphere<S: Scalar>(rng: &mut StdRng, dim: usize) -> Vector<S> {
    loop {
        let v = gaussian_vector::<S>(rng, dim);
        let len = v.euclid();
        if len > S::c(1e-6) {
            return v.scale(len.recip());
        }
    }
}

/// A point of the closed unit ball of the given norm (boundary-biased: the
/// searches mostly care about extreme directions).
pub fn in_unit_ball<S: Scalar>(rng: &mut StdRng, kind: NormKind, dim: usize) -> Vector<S> {
    let dir = gaussian_vector::<S>(rng, dim);
    let len = norm(kind, &dir);
    if len <= S::c(1e-9) {
        return Vector::zeros(dim);
    }
    let radius = S::c(rng.gen_range(0.0f64..1.0).powf(0.25));
    dir.scale(radius / len)
}

/// Spherical coordinates: angles -> unit vector.
pub fn angles_to_unit<S: Scalar>(angles: &[S]) -> Vector<S> {
    let dim = angles.len() + 1;
    let mut v = Vector::zeros(dim);
    let mut sin_prod = S::one();
    for (k, &theta) in angles.iter().enumerate() {
        v[k] = sin_prod * theta.cos();
        sin_prod = sin_prod * theta.sin();
    }
    v[dim - 1] = sin_prod;
    v
}

/// Inverse of [`angles_to_unit`] (up to scale of the input).
pub fn unit_to_angles<S: Scalar>(v: &Vector<S>) -> Vec<S> {
    let dim = v.dim();
    let mut angles = Vec::with_capacity(dim - 1);
    for k in 0..dim - 1 {
        let tail = (k + 1..dim)
            .map(|i| v[i] * v[i])
            .fold(S::zero(), |acc, t| acc + t)
            .sqrt();
        if k == dim - 2 {
            angles.push(v[dim - 1].atan2(v[k]));
        } else {
            angles.push(tail.atan2(v[k]));
        }
    }
    angles
}

/// Golden-section minimization of `f` on `[lo, hi]`.
pub fn golden_section<S: Scalar>(mut f: impl FnMut(S) -> S, lo: S, hi: S, iters: usize) -> (S, S) {
    let phi = S::c(0.618_033_988_749_894_9);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Coordinate-wise golden-section descent over sphere angles, with shrinking
/// windows. `f` gets a unit vector; smaller is better; `+∞` marks infeasible.
pub fn polish_on_sphere<S: Scalar>(
    mut f: impl FnMut(&Vector<S>) -> S,
    start: &Vector<S>,
    rounds: usize,
) -> (Vector<S>, S) {
    let dim = start.dim();
    if dim == 1 {
        let pos = Vector::from_slice(&[S::one()]);
        let neg = Vector::from_slice(&[-S::one()]);
        let (fp, fn_) = (f(&pos), f(&neg));
        return if fp <= fn_ { (pos, fp) } else { (neg, fn_) };
    }
    let mut angles = unit_to_angles(start);
    let mut best = f(&angles_to_unit(&angles));
    let mut window = S::c(std::f64::consts::PI / 2.0);
    for _ in 0..rounds {
        for k in 0..angles.len() {
            let center = angles[k];
            let (theta, value) = golden_section(
                |t| {
                    let mut probe = angles.clone();
                    probe[k] = t;
                    f(&angles_to_unit(&probe))
                },
                center - window,
                center + window,
                28,
            );
            if value < best {
                best = value;
                angles[k] = theta;
            }
        }
        window = window * S::c(0.5);
    }
    (angles_to_unit(&angles), best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn sphere_roundtrip() {
        let mut rng = StdRng::seed_from_u64(7);
        for dim in 2..=4 {
            for _ in 0..50 {
                let v: Vector<f64> = unit_sphere(&mut rng, dim);
                let back = angles_to_unit(&unit_to_angles(&v));
                assert!(v.sub(&back).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, _) = golden_section(|t: f64| (t - 1.3) * (t - 1.3), -4.0, 4.0, 40);
        assert!((x - 1.3).abs() < 1e-6);
    }

    #[test]
    fn polish_descends() {
        // Minimize distance to a target direction on the 2-sphere.
        let target: Vector<f64> = Vector::from_slice(&[0.6, -0.64, 0.48]);
        let start = Vector::from_slice(&[1.0, 0.0, 0.0]);
        let (v, value) = polish_on_sphere(|y| y.sub(&target).euclid(), &start, 8);
        assert!(value < 0.05, "polish should approach target, got {value}");
        assert!(v.sub(&target).euclid() < 0.05);
    }
}
