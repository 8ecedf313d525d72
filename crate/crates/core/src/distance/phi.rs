//! The Φ function, quantity 4, and the theorem-of-the-alternative checker.
//!
//! `Φ((y_i)) = sup { min_i w_i/‖Q_i x‖ : Σ_i w_i y_i ∈ F(x), w_i > 0 }` is
//! evaluated through its dual expression: `Φ ≤ ψ` iff the system
//! `{ y* ≠ 0, ‖s_i‖ ≤ ψ⟨y*, y_i⟩, Σ_i Q_i* s_i ∈ A*(−y*) + K* }` is solvable
//! (with `s_i := ⟨y*, y_i⟩ u_i*`), which is jointly convex in `(y*, s)` — so
//! exact-mode cells are single LPs and bisection over `ψ` pins the value.

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::linalg::{Matrix, Vector};
use crate::lp::{LinearProgram, LpStatus};
use crate::norms::{ball_extreme_points, norm, ExtendedNonneg, NormKind, NormedSpace};
use crate::process::{ConicProcess, StructureBlock};
use crate::sampling::{in_unit_ball, polish_on_sphere, unit_sphere};
use crate::scalar::Scalar;

use super::bisect::{bisect_threshold, refine_bracket, BisectConfig, Bracket};
use super::{polar_violation, DistanceError, Mode, SolveConfig};

/// The `Q`-side of a structure block: `Φ` and the alternative theorem never
/// touch `P_i` or `V_i`.
#[derive(Clone, Debug)]
pub struct QChannel<S> {
    pub q: Matrix<S>,
    pub u_space: NormedSpace,
}

impl<S: Scalar> QChannel<S> {
    pub fn from_blocks(blocks: &[StructureBlock<S>]) -> Vec<QChannel<S>> {
        blocks
            .iter()
            .map(|b| QChannel {
                q: b.q.clone(),
                u_space: b.u_space.clone(),
            })
            .collect()
    }
}

/// Dual witness for a finite Φ value: `max_i ‖u_i*‖ ≤ value`,
/// `Σ_i ⟨y*, y_i⟩ Q_i* u_i* ∈ F*(−y*)`, `⟨y*, y_i⟩ ≥ 0`.
#[derive(Clone, Debug)]
pub struct PhiEvaluation<S> {
    pub y_list: Vec<Vector<S>>,
    pub value: ExtendedNonneg<S>,
    pub y_star: Option<Vector<S>>,
    pub u_star: Vec<Vector<S>>,
    /// `min_i ⟨y*, y_i⟩` (must be ≥ -tol) and the membership violation.
    pub pairing_min: S,
    pub residual: S,
}

fn check_exact_channels<S: Scalar>(channels: &[QChannel<S>]) -> Result<(), DistanceError> {
    for (i, ch) in channels.iter().enumerate() {
        if !ch.u_space.norm.is_polyhedral() {
            return Err(DistanceError::ExactNeedsPolyhedral {
                space: format!("U_{i}"),
            });
        }
    }
    Ok(())
}

/// Evaluate `Φ((y_i))` for the process `F` and the given `Q` channels.
pub fn phi<S: Scalar>(
    f: &ConicProcess<S>,
    channels: &[QChannel<S>],
    y_list: &[Vector<S>],
    mode: Mode,
    cfg: &SolveConfig<S>,
) -> Result<PhiEvaluation<S>, DistanceError> {
    assert_eq!(channels.len(), y_list.len(), "one y per channel");
    match mode {
        Mode::Exact => {
            check_exact_channels(channels)?;
            phi_exact(f, channels, y_list, cfg, None)
                .map(|opt| opt.expect("unbounded phi search returns a value"))
        }
        Mode::Sampled => phi_sampled(f, channels, y_list, cfg),
    }
}

/// Exact Φ; with `reject_above = Some(b)`, returns `None` as soon as the
/// value is known to exceed `b` (one feasibility probe), letting searches
/// discard non-improving directions cheaply.
pub(crate) fn phi_exact<S: Scalar>(
    f: &ConicProcess<S>,
    channels: &[QChannel<S>],
    y_list: &[Vector<S>],
    cfg: &SolveConfig<S>,
    reject_above: Option<S>,
) -> Result<Option<PhiEvaluation<S>>, DistanceError> {
    let mut state = PhiFeasibility {
        f,
        channels,
        y_list,
        cfg,
        last_winner: None,
    };
    let bracket = if let Some(bound) = reject_above {
        match state.feasible_at(bound)? {
            None => return Ok(None),
            Some(witness) => {
                // Value ≤ bound: bisect inside [0, bound].
                let (lo, hi, w) =
                    refine_bracket(&cfg.bisect.clone(), S::zero(), bound, witness, |psi| {
                        state.feasible_at(psi)
                    })?;
                Bracket::Finite { lo, hi, witness: w }
            }
        }
    } else {
        bisect_threshold(&cfg.bisect.clone(), |psi| state.feasible_at(psi))?
    };
    let Bracket::Finite { lo, hi, witness } = bracket else {
        return Ok(Some(PhiEvaluation {
            y_list: y_list.to_vec(),
            value: ExtendedNonneg::infinity(),
            y_star: None,
            u_star: Vec::new(),
            pairing_min: S::zero(),
            residual: S::zero(),
        }));
    };
    // Narrow within the winning normalization, then polish at the witness y*.
    let key = witness.1;
    let (_, hi, witness) = refine_bracket(
        &BisectConfig::refined(),
        lo,
        hi,
        witness,
        |psi| state.feasible_at_key(psi, key),
    )?;
    let is_clean = |eval: &PhiEvaluation<S>| {
        eval.residual <= S::c(1e-11) * (S::one() + eval.value.get().min(S::c(1e6)))
    };
    let mut best = phi_inner_at(f, channels, y_list, &witness.0, cfg.feas_tol, cfg)?;
    // High-accuracy pass: re-solve the winning normalization slightly above
    // the threshold at a tight tolerance (see the dual solver).
    let tight = S::c(1e-11).min(cfg.feas_tol);
    let level = best.as_ref().map_or(hi, |e| e.value.get()).max(hi);
    'tight: for tight in [tight, S::c(1e-10).min(cfg.feas_tol)] {
        let mut bump = S::c(1e-9);
        for _ in 0..7 {
            let probe = level * (S::one() + bump) + tight;
            if let Some(y) = state.solve_cell_tol(probe, key, tight)? {
                if let Some(eval) = phi_inner_at(f, channels, y_list, &y, tight, cfg)? {
                    let better = match &best {
                        None => true,
                        Some(incumbent) => match (is_clean(&eval), is_clean(incumbent)) {
                            (true, false) => true,
                            (false, true) => false,
                            _ => eval.value.get() < incumbent.value.get(),
                        },
                    };
                    if better {
                        best = Some(eval);
                    }
                }
                break 'tight;
            }
            bump = bump * S::c(4.0);
        }
    }
    let eval = match best {
        Some(eval) => eval,
        None => PhiEvaluation {
            y_list: y_list.to_vec(),
            value: ExtendedNonneg::finite(hi),
            y_star: Some(witness.0),
            u_star: Vec::new(),
            pairing_min: S::zero(),
            residual: S::zero(),
        },
    };
    Ok(Some(eval))
}

struct PhiFeasibility<'a, S> {
    f: &'a ConicProcess<S>,
    channels: &'a [QChannel<S>],
    y_list: &'a [Vector<S>],
    cfg: &'a SolveConfig<S>,
    last_winner: Option<usize>,
}

impl<'a, S: Scalar> PhiFeasibility<'a, S> {
    fn feasible_at(&mut self, psi: S) -> Result<Option<(Vector<S>, usize)>, DistanceError> {
        let m = self.f.y_dim();
        let mut order: Vec<usize> = (0..2 * m).collect();
        if let Some(w) = self.last_winner {
            order.retain(|&k| k != w);
            order.insert(0, w);
        }
        for key in order {
            if let Some(y) = self.solve_cell(psi, key)? {
                self.last_winner = Some(key);
                return Ok(Some((y, key)));
            }
        }
        Ok(None)
    }

    fn feasible_at_key(
        &mut self,
        psi: S,
        key: usize,
    ) -> Result<Option<(Vector<S>, usize)>, DistanceError> {
        Ok(self.solve_cell(psi, key)?.map(|y| (y, key)))
    }

    fn solve_cell(&self, psi: S, key: usize) -> Result<Option<Vector<S>>, DistanceError> {
        self.solve_cell_tol(psi, key, self.cfg.feas_tol)
    }

    fn solve_cell_tol(&self, psi: S, key: usize, feas: S) -> Result<Option<Vector<S>>, DistanceError> {
        let m = self.f.y_dim();
        let (j, sign) = (key / 2, if key % 2 == 0 { S::one() } else { -S::one() });
        let mut s_offset = Vec::new();
        let mut cursor = m;
        for ch in self.channels {
            s_offset.push(cursor);
            cursor += ch.u_space.dim;
        }
        let mut aux_offset = Vec::new();
        for ch in self.channels {
            if ch.u_space.norm == NormKind::Linf {
                aux_offset.push(Some(cursor));
                cursor += ch.u_space.dim;
            } else {
                aux_offset.push(None);
            }
        }
        let total = cursor;
        let mut lp = LinearProgram::new(total);
        lp.fix(j, sign);
        let mut row = vec![S::zero(); total];

        for (i, ch) in self.channels.iter().enumerate() {
            // ⟨y, y_i⟩ ≥ 0.
            row.iter_mut().for_each(|c| *c = S::zero());
            for r in 0..m {
                row[r] = self.y_list[i][r];
            }
            lp.add_ge(&row, S::zero())?;
            // ‖s_i‖_{U_i*} ≤ ψ ⟨y, y_i⟩; rows scaled by 1/max(1, ψ‖y_i‖_∞)
            // to stay well-conditioned during bracket growth.
            let cap_scale = (psi * self.y_list[i].max_abs()).max(S::one()).recip();
            let u_dim = ch.u_space.dim;
            match ch.u_space.norm {
                NormKind::L1 => {
                    for jj in 0..u_dim {
                        for s_sign in [S::one(), -S::one()] {
                            row.iter_mut().for_each(|c| *c = S::zero());
                            row[s_offset[i] + jj] = s_sign * cap_scale;
                            for r in 0..m {
                                row[r] = -psi * cap_scale * self.y_list[i][r];
                            }
                            lp.add_le(&row, S::zero())?;
                        }
                    }
                }
                NormKind::Linf => {
                    let aux = aux_offset[i].unwrap();
                    for jj in 0..u_dim {
                        lp.set_lower(aux + jj, S::zero());
                        for s_sign in [S::one(), -S::one()] {
                            row.iter_mut().for_each(|c| *c = S::zero());
                            row[s_offset[i] + jj] = s_sign;
                            row[aux + jj] = -S::one();
                            lp.add_le(&row, S::zero())?;
                        }
                    }
                    row.iter_mut().for_each(|c| *c = S::zero());
                    for jj in 0..u_dim {
                        row[aux + jj] = cap_scale;
                    }
                    for r in 0..m {
                        row[r] = -psi * cap_scale * self.y_list[i][r];
                    }
                    lp.add_le(&row, S::zero())?;
                }
                NormKind::L2 => unreachable!("gated"),
            }
        }
        // Σ Q_i^T s_i + A^T y ∈ K*.
        for ray in self.f.cone.rays() {
            row.iter_mut().for_each(|c| *c = S::zero());
            let a_ray = self.f.matrix.matvec(ray);
            for r in 0..m {
                row[r] = a_ray[r];
            }
            for (i, ch) in self.channels.iter().enumerate() {
                let q_ray = ch.q.matvec(ray);
                for jj in 0..ch.u_space.dim {
                    row[s_offset[i] + jj] = q_ray[jj];
                }
            }
            lp.add_le(&row, S::zero())?;
        }
        Ok(lp
            .feasible(feas)?
            .map(|p| Vector::from_fn(m, |r| p[r])))
    }
}

/// Fixed `y*`: the inner minimum `max_i ‖s_i‖/⟨y*, y_i⟩` as one LP
/// (pairings are constants). Returns `None` when `y*` is not usable
/// (negative pairing or infeasible membership).
fn phi_inner_at<S: Scalar>(
    f: &ConicProcess<S>,
    channels: &[QChannel<S>],
    y_list: &[Vector<S>],
    y_star: &Vector<S>,
    feas: S,
    cfg: &SolveConfig<S>,
) -> Result<Option<PhiEvaluation<S>>, DistanceError> {
    let _ = cfg;
    if y_star.max_abs() <= S::c(1e-6) {
        return Ok(None);
    }
    let y_star = &crate::cones::normalize_witness(y_star);
    let pairings: Vec<S> = y_list.iter().map(|yi| y_star.dot(yi)).collect();
    let pairing_min = pairings
        .iter()
        .fold(S::infinity(), |acc, &p| acc.min(p));
    if pairing_min < -cfg.feas_tol {
        return Ok(None);
    }
    let c: Vec<S> = pairings.iter().map(|&p| p.max(S::zero())).collect();

    let mut s_offset = Vec::new();
    let mut cursor = 1;
    for ch in channels {
        s_offset.push(cursor);
        cursor += ch.u_space.dim;
    }
    let mut aux_offset = Vec::new();
    for ch in channels {
        if ch.u_space.norm == NormKind::Linf {
            aux_offset.push(Some(cursor));
            cursor += ch.u_space.dim;
        } else {
            aux_offset.push(None);
        }
    }
    let total = cursor;
    let mut lp = LinearProgram::new(total);
    lp.set_lower(0, S::zero());
    lp.objective_coeff(0, S::one());
    let mut row = vec![S::zero(); total];
    for (i, ch) in channels.iter().enumerate() {
        let u_dim = ch.u_space.dim;
        match ch.u_space.norm {
            NormKind::L1 => {
                for jj in 0..u_dim {
                    for s_sign in [S::one(), -S::one()] {
                        row.iter_mut().for_each(|v| *v = S::zero());
                        row[s_offset[i] + jj] = s_sign;
                        row[0] = -c[i];
                        lp.add_le(&row, S::zero())?;
                    }
                }
            }
            NormKind::Linf => {
                let aux = aux_offset[i].unwrap();
                for jj in 0..u_dim {
                    lp.set_lower(aux + jj, S::zero());
                    for s_sign in [S::one(), -S::one()] {
                        row.iter_mut().for_each(|v| *v = S::zero());
                        row[s_offset[i] + jj] = s_sign;
                        row[aux + jj] = -S::one();
                        lp.add_le(&row, S::zero())?;
                    }
                }
                row.iter_mut().for_each(|v| *v = S::zero());
                for jj in 0..u_dim {
                    row[aux + jj] = S::one();
                }
                row[0] = -c[i];
                lp.add_le(&row, S::zero())?;
            }
            NormKind::L2 => {
                return Err(DistanceError::UnsupportedSampledStructure {
                    detail: "L2 U-norm Φ inner".into(),
                })
            }
        }
    }
    let a_t_y = f.matrix.matvec_transpose(y_star);
    for ray in f.cone.rays() {
        row.iter_mut().for_each(|v| *v = S::zero());
        for (i, ch) in channels.iter().enumerate() {
            let q_ray = ch.q.matvec(ray);
            for jj in 0..ch.u_space.dim {
                row[s_offset[i] + jj] = q_ray[jj];
            }
        }
        lp.add_le(&row, -ray.dot(&a_t_y))?;
    }
    let outcome = lp.solve(feas)?;
    let Some((point, _)) = outcome.optimal() else {
        return Ok(None);
    };
    let ztol = S::c(1e-13);
    let mut u_star = Vec::with_capacity(channels.len());
    let mut value = ExtendedNonneg::zero();
    let mut expr = a_t_y.clone();
    for (i, ch) in channels.iter().enumerate() {
        let s_i = Vector::from_fn(ch.u_space.dim, |jj| point[s_offset[i] + jj]);
        let len = norm(ch.u_space.norm.dual(), &s_i);
        expr = expr.add(&ch.q.matvec_transpose(&s_i));
        if len <= ztol {
            u_star.push(Vector::zeros(ch.u_space.dim));
        } else {
            value = value.max(ExtendedNonneg::ratio(len, c[i]));
            // u_i* = s_i / ⟨y*, y_i⟩ in the theorem's variables.
            u_star.push(if c[i] > ztol {
                s_i.scale(c[i].recip())
            } else {
                s_i
            });
        }
    }
    Ok(Some(PhiEvaluation {
        y_list: y_list.to_vec(),
        value,
        y_star: Some(y_star.clone()),
        u_star,
        pairing_min,
        residual: polar_violation(&f.cone, &expr),
    }))
}

fn phi_sampled<S: Scalar>(
    f: &ConicProcess<S>,
    channels: &[QChannel<S>],
    y_list: &[Vector<S>],
    cfg: &SolveConfig<S>,
) -> Result<PhiEvaluation<S>, DistanceError> {
    let m = f.y_dim();
    let all_polyhedral = channels.iter().all(|c| c.u_space.norm.is_polyhedral());
    let projection_ok = channels.len() == 1
        && channels[0].u_space.norm == NormKind::L2
        && channels[0].q == Matrix::identity(channels[0].q.cols());
    if !all_polyhedral && !projection_ok {
        return Err(DistanceError::UnsupportedSampledStructure {
            detail: "sampled Φ needs polyhedral U norms or a single unstructured l2 channel".into(),
        });
    }
    let value_at = |y: &Vector<S>| -> Result<ExtendedNonneg<S>, DistanceError> {
        if all_polyhedral {
            Ok(phi_inner_at(f, channels, y_list, y, cfg.feas_tol, cfg)?
                .map_or(ExtendedNonneg::infinity(), |e| e.value))
        } else {
            let pairing = y.dot(&y_list[0]);
            if pairing < -cfg.feas_tol {
                return Ok(ExtendedNonneg::infinity());
            }
            let target = f.matrix.matvec_transpose(y).neg();
            let s = super::dual::project_shifted_polar(&f.cone, &target);
            Ok(ExtendedNonneg::ratio(s.euclid(), pairing.max(S::zero())))
        }
    };
    let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x9e37_79b9);
    let mut best_y = unit_sphere::<S>(&mut rng, m);
    let mut best = value_at(&best_y)?;
    let samples = cfg.budget.clamp(16, 4000);
    for _ in 1..samples {
        let y = unit_sphere::<S>(&mut rng, m);
        let v = value_at(&y)?;
        if v < best {
            best = v;
            best_y = y;
        }
    }
    if m <= 4 {
        let mut err = None;
        let (y, _) = polish_on_sphere(
            |y| match value_at(y) {
                Ok(v) => v.get(),
                Err(e) => {
                    err = Some(e);
                    S::infinity()
                }
            },
            &best_y,
            8,
        );
        if let Some(e) = err {
            return Err(e);
        }
        if value_at(&y)? < best {
            best = value_at(&y)?;
            best_y = y;
        }
    }
    if all_polyhedral {
        if let Some(eval) = phi_inner_at(f, channels, y_list, &best_y, cfg.feas_tol, cfg)? {
            return Ok(eval);
        }
    }
    Ok(PhiEvaluation {
        y_list: y_list.to_vec(),
        value: best,
        y_star: if best.is_infinite() { None } else { Some(best_y) },
        u_star: Vec::new(),
        pairing_min: S::zero(),
        residual: S::zero(),
    })
}

// ---------------------------------------------------------------------------
// Quantity 4
// ---------------------------------------------------------------------------

/// Quantity 4: `inf { Φ((P_i v_i)) : v_i ∈ B_{V_i} }`, by seeded sampling plus
/// coordinate polish over the `v` directions. `extra_seeds` lets callers pass
/// the `v` data of other certificates (the rank-one search's directions and
/// the dual-derived norming directions).
pub fn quantity4<S: Scalar>(
    f: &ConicProcess<S>,
    blocks: &[StructureBlock<S>],
    mode: Mode,
    cfg: &SolveConfig<S>,
    extra_seeds: &[Vec<Vector<S>>],
) -> Result<(ExtendedNonneg<S>, Vec<Vector<S>>, Option<PhiEvaluation<S>>), DistanceError> {
    let channels = QChannel::from_blocks(blocks);
    if mode == Mode::Exact {
        check_exact_channels(&channels)?;
    }
    let y_of = |v_list: &[Vector<S>]| -> Vec<Vector<S>> {
        blocks
            .iter()
            .zip(v_list)
            .map(|(b, v)| b.p.matvec(v))
            .collect()
    };
    let clamp_ball = |block: &StructureBlock<S>, v: &Vector<S>| -> Vector<S> {
        let len = norm(block.v_space.norm, v);
        if len > S::one() {
            v.scale(len.recip())
        } else {
            v.clone()
        }
    };
    let evaluate = |v_list: &[Vector<S>],
                    bound: Option<S>|
     -> Result<Option<(ExtendedNonneg<S>, PhiEvaluation<S>)>, DistanceError> {
        let ys = y_of(v_list);
        match mode {
            Mode::Exact => Ok(phi_exact(f, &channels, &ys, cfg, bound)?
                .map(|e| (e.value, e))),
            Mode::Sampled => {
                let mut inner_cfg = cfg.clone();
                inner_cfg.budget = cfg.budget.clamp(16, 600);
                let e = phi_sampled(f, &channels, &ys, &inner_cfg)?;
                Ok(Some((e.value, e)))
            }
        }
    };

    let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x51ed_2701);
    let mut candidates: Vec<Vec<Vector<S>>> = Vec::new();
    for seed in extra_seeds {
        if seed.len() == blocks.len() {
            candidates.push(
                blocks
                    .iter()
                    .zip(seed)
                    .map(|(b, v)| clamp_ball(b, v))
                    .collect(),
            );
        }
    }
    let random_count = if mode == Mode::Exact {
        cfg.budget.clamp(8, 64)
    } else {
        cfg.budget.clamp(4, 24)
    };
    for _ in 0..random_count {
        candidates.push(
            blocks
                .iter()
                .map(|b| in_unit_ball(&mut rng, b.v_space.norm, b.v_space.dim))
                .collect(),
        );
    }

    let mut best: Option<(ExtendedNonneg<S>, Vec<Vector<S>>, PhiEvaluation<S>)> = None;
    for v_list in candidates {
        let bound = best
            .as_ref()
            .and_then(|(v, _, _)| v.is_finite().then(|| v.get() * S::c(1.0 + 1e-9)));
        if let Some((value, eval)) = evaluate(&v_list, bound)? {
            if best.as_ref().map_or(true, |(b, _, _)| value < *b) {
                best = Some((value, v_list, eval));
            }
        }
    }
    let Some((mut best_value, mut best_v, mut best_eval)) = best else {
        // No candidate evaluated below any bound: all Φ values are +∞.
        let eval = PhiEvaluation {
            y_list: y_of(&blocks
                .iter()
                .map(|b| Vector::zeros(b.v_space.dim))
                .collect::<Vec<_>>()),
            value: ExtendedNonneg::infinity(),
            y_star: None,
            u_star: Vec::new(),
            pairing_min: S::zero(),
            residual: S::zero(),
        };
        let zeros = blocks
            .iter()
            .map(|b| Vector::zeros(b.v_space.dim))
            .collect();
        return Ok((ExtendedNonneg::infinity(), zeros, Some(eval)));
    };

    // Coordinate polish on the v entries (projected back into the ball).
    if best_value.is_finite() {
        let rounds = if mode == Mode::Exact { 2 } else { 1 };
        let steps = [S::c(0.25), S::c(0.05), S::c(0.01)];
        for _ in 0..rounds {
            for bi in 0..blocks.len() {
                for coord in 0..blocks[bi].v_space.dim {
                    for &step in &steps {
                        for dir in [S::one(), -S::one()] {
                            let mut probe = best_v.clone();
                            probe[bi][coord] = probe[bi][coord] + dir * step;
                            probe[bi] = clamp_ball(&blocks[bi], &probe[bi]);
                            let bound = best_value.get() * (S::one() - S::c(1e-12));
                            if let Some((value, eval)) = evaluate(&probe, Some(bound))? {
                                if value < best_value {
                                    best_value = value;
                                    best_v = probe;
                                    best_eval = eval;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((best_value, best_v, Some(best_eval)))
}

// ---------------------------------------------------------------------------
// Theorem of the alternative
// ---------------------------------------------------------------------------

/// Exactly one of the two systems is solvable (for surjective `F`):
///   (i)  `Σ_i w_i y_i ∈ F(x)` with `‖Q_i x‖ < w_i`;
///   (ii) `Σ_i ⟨y*, y_i⟩ Q_i* u_i* ∈ F*(−y*)`, `y* ≠ 0`, `⟨y*, y_i⟩ ≥ 0`,
///        `‖u_i*‖ ≤ 1`.
#[derive(Clone, Debug)]
pub enum AlternativeOutcome<S> {
    SystemI {
        x: Vector<S>,
        w: Vec<S>,
        /// Slack of the strict inequalities at the witness.
        margin: S,
    },
    SystemII {
        y_star: Vector<S>,
        u_star: Vec<Vector<S>>,
        residual: S,
    },
}

/// Margin threshold deciding the strict system (i).
const STRICT_MARGIN: f64 = 1e-9;

pub fn alternative_check<S: Scalar>(
    f: &ConicProcess<S>,
    channels: &[QChannel<S>],
    y_list: &[Vector<S>],
    cfg: &SolveConfig<S>,
) -> Result<AlternativeOutcome<S>, DistanceError> {
    assert_eq!(channels.len(), y_list.len());
    check_exact_channels(channels)?;
    let system_one = solve_system_one(f, channels, y_list, cfg)?;
    let mut state = PhiFeasibility {
        f,
        channels,
        y_list,
        cfg,
        last_winner: None,
    };
    let system_two = state.feasible_at(S::one())?;

    match (system_one, system_two) {
        (Some((x, w, margin)), None) => Ok(AlternativeOutcome::SystemI { x, w, margin }),
        (None, Some((y, _))) => {
            let eval = phi_inner_at(f, channels, y_list, &y, cfg.feas_tol, cfg)?;
            let (u_star, residual) = match eval {
                Some(e) => (e.u_star, e.residual),
                None => (Vec::new(), S::zero()),
            };
            Ok(AlternativeOutcome::SystemII {
                y_star: y,
                u_star,
                residual,
            })
        }
        (Some((_, _, margin)), Some(_)) => Err(DistanceError::InconsistentAlternative {
            detail: format!("both systems solvable; system-one margin {margin}"),
        }),
        (None, None) => Err(DistanceError::InconsistentAlternative {
            detail: "neither system solvable within tolerance".into(),
        }),
    }
}

/// Strict system (i), decided by maximizing the margin `δ` in
/// `w_i ≥ ‖Q_i x‖ + δ` under the homogeneity normalization `Σ w_i = 1`:
/// solvable iff the optimum exceeds the strict-margin threshold.
fn solve_system_one<S: Scalar>(
    f: &ConicProcess<S>,
    channels: &[QChannel<S>],
    y_list: &[Vector<S>],
    cfg: &SolveConfig<S>,
) -> Result<Option<(Vector<S>, Vec<S>, S)>, DistanceError> {
    let n = f.x_dim();
    let m = f.y_dim();
    let k = channels.len();
    // Vars: x | w | δ.
    let total = n + k + 1;
    let delta = n + k;
    let mut lp = LinearProgram::new(total);
    let mut objective = vec![S::zero(); total];
    objective[delta] = -S::one(); // maximize δ
    lp.set_objective(&objective)?;

    let mut row = vec![S::zero(); total];
    for h in f.cone.halfspaces() {
        row.iter_mut().for_each(|c| *c = S::zero());
        for col in 0..n {
            row[col] = h[col];
        }
        lp.add_ge(&row, S::zero())?;
    }
    for r in 0..m {
        row.iter_mut().for_each(|c| *c = S::zero());
        for col in 0..n {
            row[col] = f.matrix[(r, col)];
        }
        for (i, yi) in y_list.iter().enumerate() {
            row[n + i] = -yi[r];
        }
        lp.add_eq(&row, S::zero())?;
    }
    for (i, ch) in channels.iter().enumerate() {
        let dual_kind = ch.u_space.norm.dual();
        for e in ball_extreme_points::<S>(dual_kind, ch.u_space.dim)? {
            let coeffs = ch.q.matvec_transpose(&e);
            row.iter_mut().for_each(|c| *c = S::zero());
            for col in 0..n {
                row[col] = coeffs[col];
            }
            row[n + i] = -S::one();
            row[delta] = S::one();
            lp.add_le(&row, S::zero())?;
        }
    }
    row.iter_mut().for_each(|c| *c = S::zero());
    for i in 0..k {
        row[n + i] = S::one();
    }
    lp.add_eq(&row, S::one())?;

    let outcome = lp.solve(cfg.feas_tol)?;
    if outcome.status != LpStatus::Optimal {
        return Ok(None);
    }
    let (point, _) = outcome.optimal().expect("optimal status carries a point");
    let margin = point[delta];
    if margin <= S::c(STRICT_MARGIN) {
        return Ok(None);
    }
    let x = Vector::from_fn(n, |col| point[col]);
    let w: Vec<S> = (0..k).map(|i| point[n + i]).collect();
    Ok(Some((x, w, margin)))
}

