//! Threshold bisection over a monotone feasibility oracle.

use crate::scalar::Scalar;

use super::DistanceError;

/// Bracket: lower 0, upper grows geometrically from 1 until feasible or until
/// `2^60` (then the threshold is `+∞`); termination at absolute + relative
/// `1e-9` or 60 iterations.
#[derive(Clone, Debug)]
pub struct BisectConfig<S> {
    pub abs_tol: S,
    pub rel_tol: S,
    pub max_iters: usize,
}

impl<S: Scalar> Default for BisectConfig<S> {
    fn default() -> Self {
        BisectConfig {
            abs_tol: S::c(1e-9),
            rel_tol: S::c(1e-9),
            max_iters: 60,
        }
    }
}

impl<S: Scalar> BisectConfig<S> {
    /// Tight variant for the final single-cell refinement.
    pub fn refined() -> Self {
        BisectConfig {
            abs_tol: S::c(1e-13),
            rel_tol: S::c(1e-13),
            max_iters: 80,
        }
    }
}

/// Outcome of a threshold search for `inf { t : oracle(t) feasible }`.
#[derive(Clone, Debug)]
pub enum Bracket<S, W> {
    Finite {
        /// Largest level proven infeasible (0 if feasible from the start).
        lo: S,
        /// Smallest level with a witness in hand.
        hi: S,
        witness: W,
    },
    /// No level up to `2^60` is feasible.
    Infinite,
}

/// The oracle must be monotone: feasible at `t` implies feasible at `t' ≥ t`.
pub fn bisect_threshold<S: Scalar, W>(
    cfg: &BisectConfig<S>,
    mut oracle: impl FnMut(S) -> Result<Option<W>, DistanceError>,
) -> Result<Bracket<S, W>, DistanceError> {
    let cap = S::c((2.0f64).powi(60));
    let mut lo = S::zero();
    let mut hi = S::one();
    let mut witness = loop {
        match oracle(hi)? {
            Some(w) => break w,
            None => {
                lo = hi;
                hi = hi * S::c(2.0);
                if hi > cap {
                    return Ok(Bracket::Infinite);
                }
            }
        }
    };
    for _ in 0..cfg.max_iters {
        if hi - lo <= cfg.abs_tol + cfg.rel_tol * hi {
            break;
        }
        let mid = (lo + hi) * S::c(0.5);
        match oracle(mid)? {
            Some(w) => {
                hi = mid;
                witness = w;
            }
            None => lo = mid,
        }
    }
    Ok(Bracket::Finite { lo, hi, witness })
}

/// Continue narrowing an existing bracket with a (possibly different) oracle.
pub fn refine_bracket<S: Scalar, W>(
    cfg: &BisectConfig<S>,
    mut lo: S,
    mut hi: S,
    mut witness: W,
    mut oracle: impl FnMut(S) -> Result<Option<W>, DistanceError>,
) -> Result<(S, S, W), DistanceError> {
    for _ in 0..cfg.max_iters {
        if hi - lo <= cfg.abs_tol + cfg.rel_tol * hi {
            break;
        }
        let mid = (lo + hi) * S::c(0.5);
        match oracle(mid)? {
            Some(w) => {
                hi = mid;
                witness = w;
            }
            None => lo = mid,
        }
    }
    Ok((lo, hi, witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_threshold() {
        let cfg = BisectConfig::<f64>::default();
        let out = bisect_threshold(&cfg, |t| Ok(if t >= 3.0 { Some(t) } else { None })).unwrap();
        match out {
            Bracket::Finite { lo, hi, .. } => {
                assert!(lo <= 3.0 && 3.0 <= hi);
                assert!(hi - lo <= 1e-9 + 1e-9 * hi);
            }
            Bracket::Infinite => panic!("finite threshold expected"),
        }
    }

    #[test]
    fn detects_infinite() {
        let cfg = BisectConfig::<f64>::default();
        let out = bisect_threshold::<f64, ()>(&cfg, |_| Ok(None)).unwrap();
        assert!(matches!(out, Bracket::Infinite));
    }
}
