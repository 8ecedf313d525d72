//! Quantity 3: the adjoint-side characterization
//! `inf { max_i z_i / ‖P_i* y*‖ : Σ_i z_i Q_i* u_i* ∈ A* y* + K*, ‖u_i*‖ ≤ 1, y* ≠ 0 }`.
//!
//! Exact mode substitutes `s_i := z_i u_i*` (so `‖s_i‖ ≤ t ‖P_i* y*‖`) and
//! decides feasibility at level `t` by small LPs: the nonlinearity
//! `‖P_i* y*‖` is linearized by enumerating which extreme point of `B_{V_i}`
//! attains it, and `y* ≠ 0` by fixing one coordinate to `±1` (valid because
//! the feasible set is a cone). Bisection over `t` plus a final polish at the
//! winning `y*` (an LP once `y*` is fixed) produces an attained certificate.

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::cones::PolyhedralCone;
use crate::linalg::{Matrix, Vector};
use crate::lp::LinearProgram;
use crate::norms::{ball_extreme_points, norm, norming_functional, ExtendedNonneg, NormKind};
use crate::process::{ConicProcess, PerturbationAssignment, StructureBlock};
use crate::sampling::{polish_on_sphere, unit_sphere};
use crate::scalar::Scalar;

use super::bisect::{bisect_threshold, refine_bracket, BisectConfig, Bracket};
use super::{polar_violation, DistanceError, Mode, SolveConfig};

/// Witness of quantity 3: `Σ_i z_i Q_i* u_i* ∈ A* y* + K*` with
/// `value = max_i z_i / ‖P_i* y*‖` under the `z/0` conventions.
#[derive(Clone, Debug)]
pub struct DualCertificate<S> {
    pub y_star: Vector<S>,
    pub u_star: Vec<Vector<S>>,
    pub z: Vec<S>,
    pub value: ExtendedNonneg<S>,
    /// How far `Σ z_i Q_i* u_i* − A* y*` sits outside `K*`.
    pub residual: S,
}

impl<S: Scalar> DualCertificate<S> {
    /// Recompute the membership residual against the instance.
    pub fn recompute_residual(
        &self,
        f: &ConicProcess<S>,
        blocks: &[StructureBlock<S>],
    ) -> S {
        let mut expr = f.matrix.matvec_transpose(&self.y_star).neg();
        for (block, (u, &zi)) in blocks.iter().zip(self.u_star.iter().zip(&self.z)) {
            expr = expr.add(&block.q.matvec_transpose(u).scale(zi));
        }
        polar_violation(&f.cone, &expr)
    }
}

pub(crate) fn check_exact_norms<S: Scalar>(
    blocks: &[StructureBlock<S>],
    need_v: bool,
) -> Result<(), DistanceError> {
    for block in blocks {
        if !block.u_space.norm.is_polyhedral() {
            return Err(DistanceError::ExactNeedsPolyhedral {
                space: format!("U_{}", block.index),
            });
        }
        if need_v && !block.v_space.norm.is_polyhedral() {
            return Err(DistanceError::ExactNeedsPolyhedral {
                space: format!("V_{}", block.index),
            });
        }
    }
    Ok(())
}

/// `‖P_i* y‖` for a concrete `y`: the `V_i`-dual norm of `P_i^T y`.
fn p_pullback_norm<S: Scalar>(block: &StructureBlock<S>, y: &Vector<S>) -> S {
    norm(block.v_space.norm.dual(), &block.p.matvec_transpose(y))
}

/// Quantity 3 of the main equality.
///
/// Nonsurjective `F` short-circuits to `α = 0` with the nonsurjectivity
/// witness as certificate; `+∞` (no certificate) means no perturbation level
/// makes the adjoint system feasible, e.g. all `P_i = 0`.
pub fn distance_dual<S: Scalar>(
    f: &ConicProcess<S>,
    blocks: &[StructureBlock<S>],
    mode: Mode,
    cfg: &SolveConfig<S>,
) -> Result<(ExtendedNonneg<S>, Option<DualCertificate<S>>), DistanceError> {
    for block in blocks {
        block.check_against(f)?;
    }
    if let Some(witness) = f.nonsurjectivity_witness()? {
        let cert = DualCertificate {
            u_star: blocks
                .iter()
                .map(|b| Vector::zeros(b.u_space.dim))
                .collect(),
            z: vec![S::zero(); blocks.len()],
            value: ExtendedNonneg::zero(),
            residual: polar_violation(&f.cone, &f.matrix.matvec_transpose(&witness).neg()),
            y_star: witness,
        };
        return Ok((ExtendedNonneg::zero(), Some(cert)));
    }
    match mode {
        Mode::Exact => {
            check_exact_norms(blocks, true)?;
            ExactDual::new(f, blocks, cfg).solve()
        }
        Mode::Sampled => sampled_dual(f, blocks, cfg),
    }
}

// ---------------------------------------------------------------------------
// Exact mode
// ---------------------------------------------------------------------------

struct ExactDual<'a, S> {
    f: &'a ConicProcess<S>,
    blocks: &'a [StructureBlock<S>],
    cfg: &'a SolveConfig<S>,
    /// Extreme points of each `B_{V_i}` (candidates attaining `‖P_i* y‖`).
    v_extpts: Vec<Vec<Vector<S>>>,
    cell_count: usize,
    key_count: usize,
    /// Highest level each key is proven infeasible at (monotone in `t`).
    infeasible_at: Vec<Option<S>>,
    last_winner: Option<usize>,
}

#[derive(Clone)]
struct RawWitness<S> {
    y: Vector<S>,
    key: usize,
}

impl<'a, S: Scalar> ExactDual<'a, S> {
    fn new(f: &'a ConicProcess<S>, blocks: &'a [StructureBlock<S>], cfg: &'a SolveConfig<S>) -> Self {
        let v_extpts: Vec<Vec<Vector<S>>> = blocks
            .iter()
            .map(|b| ball_extreme_points(b.v_space.norm, b.v_space.dim).expect("polyhedral V"))
            .collect();
        let cell_count = v_extpts.iter().map(Vec::len).product::<usize>().max(1);
        let key_count = 2 * f.y_dim() * cell_count;
        ExactDual {
            f,
            blocks,
            cfg,
            v_extpts,
            cell_count,
            key_count,
            infeasible_at: vec![None; key_count],
            last_winner: None,
        }
    }

    fn solve(mut self) -> Result<(ExtendedNonneg<S>, Option<DualCertificate<S>>), DistanceError> {
        let bisect_cfg = self.cfg.bisect.clone();
        let bracket = bisect_threshold(&bisect_cfg, |t| self.feasible_at(t, None))?;
        let Bracket::Finite { lo, hi, witness } = bracket else {
            return Ok((ExtendedNonneg::infinity(), None));
        };
        let mut candidates = vec![witness.clone()];
        // Narrow inside the winning cell; single LP per step.
        let key = witness.key;
        let (_, hi, refined) = refine_bracket(
            &BisectConfig::refined(),
            lo,
            hi,
            witness,
            |t| self.feasible_at(t, Some(key)),
        )?;
        candidates.push(refined);

        let tight = S::c(1e-11).min(self.cfg.feas_tol);
        let mut best: Option<(ExtendedNonneg<S>, DualCertificate<S>)> = None;
        // A certificate whose membership residual is at roundoff level is
        // trustworthy; one at the LP tolerance may misstate its value by far
        // more than the bisection gap. Clean beats dirty, then lower value.
        let is_clean = |cert: &DualCertificate<S>| {
            cert.residual <= S::c(1e-11) * (S::one() + cert.value.get().min(S::c(1e6)))
        };
        let consider = |cert: Option<DualCertificate<S>>,
                        best: &mut Option<(ExtendedNonneg<S>, DualCertificate<S>)>| {
            if let Some(cert) = cert {
                let better = match best {
                    None => true,
                    Some((v, incumbent)) => match (is_clean(&cert), is_clean(incumbent)) {
                        (true, false) => true,
                        (false, true) => false,
                        _ => cert.value.get() < v.get(),
                    },
                };
                if better {
                    *best = Some((cert.value, cert));
                }
            }
        };
        for raw in &candidates {
            let cert = self.polish(&raw.y, self.cfg.feas_tol)?;
            consider(cert, &mut best);
        }
        // High-accuracy pass: re-solve the winning cell a hair above the
        // threshold at a tight tolerance, then polish at the same tolerance;
        // this washes the coarse witness's residual out of the certificate.
        let level = best
            .as_ref()
            .map_or(hi, |(v, _)| v.get())
            .max(hi)
            * (S::one() + S::c(1e-9))
            + tight;
        // The loose verdicts can undershoot the true threshold by about the
        // feasibility tolerance, so escalate the level until the tight solve
        // succeeds; the polish minimizes afterward, washing the bump out.
        'tight: for tight in [tight, S::c(1e-10).min(self.cfg.feas_tol)] {
            let mut bump = S::c(1e-9);
            for _ in 0..7 {
                if let Some(y) = self.solve_cell_tol(level * (S::one() + bump) + tight, key, tight)? {
                    consider(self.polish(&y, tight)?, &mut best);
                    break 'tight;
                }
                bump = bump * S::c(4.0);
            }
        }
        match best {
            Some((value, cert)) => Ok((value, Some(cert))),
            // Fall back to the bisection level itself; should not happen for
            // a witness produced by a feasible cell.
            None => Ok((ExtendedNonneg::finite(hi), None)),
        }
    }

    fn feasible_at(
        &mut self,
        t: S,
        only_key: Option<usize>,
    ) -> Result<Option<RawWitness<S>>, DistanceError> {
        let keys: Vec<usize> = match only_key {
            Some(k) => vec![k],
            None => {
                let mut order: Vec<usize> = (0..self.key_count).collect();
                if let Some(w) = self.last_winner {
                    order.retain(|&k| k != w);
                    order.insert(0, w);
                }
                order
            }
        };
        for key in keys {
            if let Some(level) = self.infeasible_at[key] {
                if t <= level {
                    continue;
                }
            }
            if let Some(y) = self.solve_cell(t, key)? {
                self.last_winner = Some(key);
                return Ok(Some(RawWitness { y, key }));
            }
            let worse = self.infeasible_at[key].map_or(true, |level| t > level);
            if worse {
                self.infeasible_at[key] = Some(t);
            }
        }
        Ok(None)
    }

    fn decode_key(&self, key: usize) -> (usize, S, Vec<usize>) {
        let norm_idx = key / self.cell_count;
        let mut cell = key % self.cell_count;
        let j = norm_idx / 2;
        let sign = if norm_idx % 2 == 0 { S::one() } else { -S::one() };
        let mut choice = Vec::with_capacity(self.blocks.len());
        for pts in &self.v_extpts {
            choice.push(cell % pts.len());
            cell /= pts.len();
        }
        (j, sign, choice)
    }

    /// One feasibility LP: fixed normalization coordinate, fixed attaining
    /// extreme points, level `t`.
    fn solve_cell(&self, t: S, key: usize) -> Result<Option<Vector<S>>, DistanceError> {
        self.solve_cell_tol(t, key, self.cfg.feas_tol)
    }

    fn solve_cell_tol(&self, t: S, key: usize, feas: S) -> Result<Option<Vector<S>>, DistanceError> {
        let (j, sign, choice) = self.decode_key(key);
        let m = self.f.y_dim();
        // Layout: y | s_i blocks | aux blocks (L1-dual only).
        let mut s_offset = Vec::new();
        let mut cursor = m;
        for block in self.blocks {
            s_offset.push(cursor);
            cursor += block.u_space.dim;
        }
        let mut aux_offset = Vec::new();
        for block in self.blocks {
            if block.u_space.norm == NormKind::Linf {
                aux_offset.push(Some(cursor));
                cursor += block.u_space.dim;
            } else {
                aux_offset.push(None);
            }
        }
        let total = cursor;
        let mut lp = LinearProgram::new(total);
        lp.fix(j, sign);

        let mut row = vec![S::zero(); total];
        // Cell: the chosen extreme point attains max_e ⟨y, P_i e⟩.
        for (i, block) in self.blocks.iter().enumerate() {
            let chosen = &self.v_extpts[i][choice[i]];
            let attain = block.p.matvec(chosen);
            for (e_idx, other) in self.v_extpts[i].iter().enumerate() {
                if e_idx == choice[i] {
                    continue;
                }
                let gap = attain.sub(&block.p.matvec(other));
                row.iter_mut().for_each(|c| *c = S::zero());
                for r in 0..m {
                    row[r] = gap[r];
                }
                lp.add_ge(&row, S::zero())?;
            }
        }
        // Norm caps: ‖s_i‖_{U_i*} ≤ t ⟨y, P_i e_i⟩, scaled per block by
        // 1/max(1, t·‖P_i e_i‖_∞) so the rows stay well-conditioned while the
        // bracket search explores huge levels (and survive `P_i e_i = 0`).
        for (i, block) in self.blocks.iter().enumerate() {
            let chosen = &self.v_extpts[i][choice[i]];
            let attain = block.p.matvec(chosen);
            let cap_scale = (t * attain.max_abs()).max(S::one()).recip();
            let u_dim = block.u_space.dim;
            match block.u_space.norm {
                NormKind::L1 => {
                    // Dual ball is the box: |s_ij| ≤ t d_i(y).
                    for jj in 0..u_dim {
                        for s_sign in [S::one(), -S::one()] {
                            row.iter_mut().for_each(|c| *c = S::zero());
                            row[s_offset[i] + jj] = s_sign * cap_scale;
                            for r in 0..m {
                                row[r] = -t * cap_scale * attain[r];
                            }
                            lp.add_le(&row, S::zero())?;
                        }
                    }
                }
                NormKind::Linf => {
                    // Dual ball is the cross-polytope: Σ_j |s_ij| ≤ t d_i(y).
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
                        row[r] = -t * cap_scale * attain[r];
                    }
                    lp.add_le(&row, S::zero())?;
                }
                NormKind::L2 => unreachable!("exact mode is gated on polyhedral U"),
            }
        }
        // Membership: Σ_i Q_i^T s_i − A^T y ∈ K*, i.e. ⟨r, ·⟩ ≤ 0 per ray.
        for ray in self.f.cone.rays() {
            row.iter_mut().for_each(|c| *c = S::zero());
            let a_ray = self.f.matrix.matvec(ray);
            for r in 0..m {
                row[r] = -a_ray[r];
            }
            for (i, block) in self.blocks.iter().enumerate() {
                let q_ray = block.q.matvec(ray);
                for jj in 0..block.u_space.dim {
                    row[s_offset[i] + jj] = q_ray[jj];
                }
            }
            lp.add_le(&row, S::zero())?;
        }

        Ok(lp
            .feasible(feas)?
            .map(|point| Vector::from_fn(m, |r| point[r])))
    }

    fn polish(&self, y: &Vector<S>, feas: S) -> Result<Option<DualCertificate<S>>, DistanceError> {
        inner_min_at(self.f, self.blocks, y, feas, self.cfg)
    }
}

/// Fixed `y`: minimize `max_i ‖s_i‖/d_i` over `Σ Q_i^T s_i ∈ A^T y + K*` as a
/// single LP (the `d_i = ‖P_i* y‖` are constants now). Shared by the exact
/// polish and the sampled inner solver for polyhedral `U_i`.
fn inner_min_at<S: Scalar>(
    f: &ConicProcess<S>,
    blocks: &[StructureBlock<S>],
    y: &Vector<S>,
    feas: S,
    cfg: &SolveConfig<S>,
) -> Result<Option<DualCertificate<S>>, DistanceError> {
    let _ = cfg;
    // The certificate functional must be nonzero; normalize to ‖y‖_∞ = 1.
    if y.max_abs() <= S::c(1e-6) {
        return Ok(None);
    }
    let y = &crate::cones::normalize_witness(y);
    let d: Vec<S> = blocks.iter().map(|b| p_pullback_norm(b, y)).collect();
    // Layout: t | s blocks | aux blocks.
    let mut s_offset = Vec::new();
    let mut cursor = 1;
    for block in blocks {
        s_offset.push(cursor);
        cursor += block.u_space.dim;
    }
    let mut aux_offset = Vec::new();
    for block in blocks {
        if block.u_space.norm == NormKind::Linf {
            aux_offset.push(Some(cursor));
            cursor += block.u_space.dim;
        } else {
            aux_offset.push(None);
        }
    }
    let total = cursor;
    let mut lp = LinearProgram::new(total);
    lp.set_lower(0, S::zero());
    lp.objective_coeff(0, S::one());

    let mut row = vec![S::zero(); total];
    for (i, block) in blocks.iter().enumerate() {
        let u_dim = block.u_space.dim;
        match block.u_space.norm {
            NormKind::L1 => {
                for jj in 0..u_dim {
                    for s_sign in [S::one(), -S::one()] {
                        row.iter_mut().for_each(|c| *c = S::zero());
                        row[s_offset[i] + jj] = s_sign;
                        row[0] = -d[i];
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
                    row[aux + jj] = S::one();
                }
                row[0] = -d[i];
                lp.add_le(&row, S::zero())?;
            }
            NormKind::L2 => {
                return Err(DistanceError::UnsupportedSampledStructure {
                    detail: "L2 U-norm needs the projection path".into(),
                })
            }
        }
    }
    let a_t_y = f.matrix.matvec_transpose(y);
    for ray in f.cone.rays() {
        row.iter_mut().for_each(|c| *c = S::zero());
        for (i, block) in blocks.iter().enumerate() {
            let q_ray = block.q.matvec(ray);
            for jj in 0..block.u_space.dim {
                row[s_offset[i] + jj] = q_ray[jj];
            }
        }
        lp.add_le(&row, ray.dot(&a_t_y))?;
    }

    let outcome = lp.solve(feas)?;
    let Some((point, _)) = outcome.optimal() else {
        return Ok(None);
    };
    let s: Vec<Vector<S>> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| Vector::from_fn(b.u_space.dim, |jj| point[s_offset[i] + jj]))
        .collect();
    Ok(Some(certificate_from_parts(f, blocks, y, &s, &d)))
}

fn certificate_from_parts<S: Scalar>(
    f: &ConicProcess<S>,
    blocks: &[StructureBlock<S>],
    y: &Vector<S>,
    s: &[Vector<S>],
    d: &[S],
) -> DualCertificate<S> {
    let ztol = S::c(1e-13);
    let mut z = Vec::with_capacity(blocks.len());
    let mut u_star = Vec::with_capacity(blocks.len());
    let mut value = ExtendedNonneg::zero();
    for (i, block) in blocks.iter().enumerate() {
        let zi = norm(block.u_space.norm.dual(), &s[i]);
        if zi <= ztol {
            z.push(S::zero());
            u_star.push(Vector::zeros(block.u_space.dim));
        } else {
            z.push(zi);
            u_star.push(s[i].scale(zi.recip()));
            value = value.max(ExtendedNonneg::ratio(zi, d[i]));
        }
    }
    let cert = DualCertificate {
        y_star: y.clone(),
        u_star,
        z,
        value,
        residual: S::zero(),
    };
    let residual = cert.recompute_residual(f, blocks);
    DualCertificate { residual, ..cert }
}

// ---------------------------------------------------------------------------
// Sampled mode
// ---------------------------------------------------------------------------

enum InnerKind {
    PolyhedralU,
    /// Single unstructured-Q block with an L2 `U` norm: the minimal `s` is
    /// the metric projection of `A^T y` onto the shifted polar cone.
    ProjectionL2,
}

fn classify_inner<S: Scalar>(blocks: &[StructureBlock<S>]) -> Result<InnerKind, DistanceError> {
    if blocks
        .iter()
        .all(|b| b.u_space.norm.is_polyhedral())
    {
        return Ok(InnerKind::PolyhedralU);
    }
    if blocks.len() == 1
        && blocks[0].u_space.norm == NormKind::L2
        && blocks[0].q == Matrix::identity(blocks[0].q.cols())
    {
        return Ok(InnerKind::ProjectionL2);
    }
    Err(DistanceError::UnsupportedSampledStructure {
        detail: "mixed or structured L2 U-norms; supported: all-polyhedral U, or a single block with Q = I and U = l2".into(),
    })
}

fn sampled_dual<S: Scalar>(
    f: &ConicProcess<S>,
    blocks: &[StructureBlock<S>],
    cfg: &SolveConfig<S>,
) -> Result<(ExtendedNonneg<S>, Option<DualCertificate<S>>), DistanceError> {
    let kind = classify_inner(blocks)?;
    let m = f.y_dim();
    let value_of = |y: &Vector<S>| -> Result<ExtendedNonneg<S>, DistanceError> {
        match kind {
            InnerKind::PolyhedralU => Ok(inner_min_at(f, blocks, y, cfg.feas_tol, cfg)?
                .map_or(ExtendedNonneg::infinity(), |c| c.value)),
            InnerKind::ProjectionL2 => Ok(projection_inner(f, &blocks[0], y)),
        }
    };

    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut best_y = unit_sphere::<S>(&mut rng, m);
    let mut best = value_of(&best_y)?;
    for _ in 1..cfg.budget.max(1) {
        let y = unit_sphere::<S>(&mut rng, m);
        let v = value_of(&y)?;
        if v < best {
            best = v;
            best_y = y;
        }
    }
    if m <= 4 {
        let mut err: Option<DistanceError> = None;
        let (y, _) = polish_on_sphere(
            |y| match value_of(y) {
                Ok(v) => v.get(),
                Err(e) => {
                    err = Some(e);
                    S::infinity()
                }
            },
            &best_y,
            10,
        );
        if let Some(e) = err {
            return Err(e);
        }
        let polished = value_of(&y)?;
        if polished < best {
            best = polished;
            best_y = y;
        }
    }
    if best.is_infinite() {
        return Ok((ExtendedNonneg::infinity(), None));
    }
    let cert = match kind {
        InnerKind::PolyhedralU => inner_min_at(f, blocks, &best_y, cfg.feas_tol, cfg)?,
        InnerKind::ProjectionL2 => {
            let block = &blocks[0];
            let target = f.matrix.matvec_transpose(&best_y);
            let s = project_shifted_polar(&f.cone, &target);
            let d = p_pullback_norm(block, &best_y);
            Some(certificate_from_parts(f, blocks, &best_y, &[s], &[d]))
        }
    };
    let value = cert.as_ref().map_or(best, |c| c.value);
    Ok((value, cert))
}

/// `min ‖s‖_2` over `s ∈ A^T y + K*`, divided by `‖P* y‖`.
fn projection_inner<S: Scalar>(
    f: &ConicProcess<S>,
    block: &StructureBlock<S>,
    y: &Vector<S>,
) -> ExtendedNonneg<S> {
    let target = f.matrix.matvec_transpose(y);
    let s = project_shifted_polar(&f.cone, &target);
    ExtendedNonneg::ratio(s.euclid(), p_pullback_norm(block, y))
}

/// Euclidean projection of `0` onto `c + K*`, returned as the projected point.
/// Equivalently `c + Π_{K*}(−c)`; the cone is `{w : ⟨r, w⟩ ≤ 0}` over the
/// rays of `K`, projected by active-set enumeration (desk-scale ray counts).
pub(crate) fn project_shifted_polar<S: Scalar>(cone: &PolyhedralCone<S>, c: &Vector<S>) -> Vector<S> {
    if cone.is_full() {
        // K* = {0}.
        return c.clone();
    }
    if cone.is_zero() {
        // K* = everything: the projection of 0 is 0.
        return Vector::zeros(c.dim());
    }
    let p = c.neg();
    let proj = project_onto_halfspace_cone(cone.rays(), &p);
    c.add(&proj)
}

/// Projection of `p` onto `{w : ⟨rows_l, w⟩ ≤ 0}` by KKT active-set search.
fn project_onto_halfspace_cone<S: Scalar>(rows: &[Vector<S>], p: &Vector<S>) -> Vector<S> {
    let tol = S::c(1e-9);
    let n_rows = rows.len();
    let mut best: Option<(S, Vector<S>)> = None;
    for mask in 0..(1u64 << n_rows) {
        let active: Vec<usize> = (0..n_rows).filter(|&l| mask >> l & 1 == 1).collect();
        let k = active.len();
        // Solve (R_S R_S^T) μ = R_S p.
        let gram = Matrix::from_fn(k, k, |a, b| rows[active[a]].dot(&rows[active[b]]));
        let rhs = Vector::from_fn(k, |a| rows[active[a]].dot(p));
        let Some(mu) = crate::linalg::solve_linear(&gram, &rhs) else {
            continue;
        };
        if mu.iter().any(|&v| v < -tol) {
            continue;
        }
        let mut w = p.clone();
        for (a, &l) in active.iter().enumerate() {
            w = w.sub(&rows[l].scale(mu[a]));
        }
        let feasible = rows.iter().all(|r| r.dot(&w) <= tol * (S::one() + w.max_abs()));
        if feasible {
            return w;
        }
        let violation = rows
            .iter()
            .map(|r| r.dot(&w).max(S::zero()))
            .fold(S::zero(), |acc, v| acc.max(v));
        if best.as_ref().map_or(true, |(bv, _)| violation < *bv) {
            best = Some((violation, w));
        }
    }
    best.map(|(_, w)| w).unwrap_or_else(|| p.clone())
}

// ---------------------------------------------------------------------------
// Dual-built rank-one perturbation
// ---------------------------------------------------------------------------

/// Rank-one assignment rebuilt from a dual certificate:
/// `T_i = −(z_i / ‖P_i* y*‖) v̄_i ⊗ u_i*` with `v̄_i` norming for `P_i^T y*`.
/// By construction `−A'^T y* = (Σ z_i Q_i^T u_i* − A^T y*) ∈ K*` for the
/// perturbed matrix `A'`, so the perturbed process is nonsurjective with the
/// certificate's own residual. The certificate residual can sit right at the
/// feasibility tolerance, so the assignment is inflated by the smallest
/// factor (at most `1 + 1e-6`) that makes the surjectivity test agree.
pub fn dual_built_assignment<S: Scalar>(
    f: &ConicProcess<S>,
    blocks: &[StructureBlock<S>],
    cert: &DualCertificate<S>,
) -> Result<Option<PerturbationAssignment<S>>, DistanceError> {
    let ztol = S::c(1e-13);
    let mut mats = Vec::with_capacity(blocks.len());
    for (block, (&zi, u)) in blocks.iter().zip(cert.z.iter().zip(&cert.u_star)) {
        if zi <= ztol {
            mats.push(Matrix::zeros(block.v_space.dim, block.u_space.dim));
            continue;
        }
        let pullback = block.p.matvec_transpose(&cert.y_star);
        let d = norm(block.v_space.norm.dual(), &pullback);
        if d <= S::c(1e-13) {
            // z_i > 0 with a vanishing denominator: infinite value, no finite
            // perturbation to build.
            return Ok(None);
        }
        let v_bar = norming_functional(block.v_space.norm.dual(), &pullback)?;
        mats.push(Matrix::outer(&v_bar, u).scale(-(zi / d)));
    }
    let base = PerturbationAssignment::from_matrices(blocks, mats)?;
    let mut inflation = S::one();
    for _ in 0..8 {
        let candidate = base.scale(inflation);
        if !f.perturb(blocks, &candidate)?.is_surjective()? {
            return Ok(Some(candidate));
        }
        inflation = inflation + (inflation - S::one()).max(S::c(4e-9)) * S::c(3.0);
        if inflation > S::one() + S::c(1e-6) {
            break;
        }
    }
    Ok(Some(base))
}

/// The `v` directions at which `Φ((P_i v_i))` attains the distance, derived
/// from a dual certificate: `v_i = −(norming vector of P_i^T y*)`.
pub fn dual_seed_directions<S: Scalar>(
    blocks: &[StructureBlock<S>],
    cert: &DualCertificate<S>,
) -> Vec<Vector<S>> {
    blocks
        .iter()
        .map(|block| {
            let pullback = block.p.matvec_transpose(&cert.y_star);
            match norming_functional(block.v_space.norm.dual(), &pullback) {
                Ok(v) => v.neg(),
                Err(_) => Vector::zeros(block.v_space.dim),
            }
        })
        .collect()
}
