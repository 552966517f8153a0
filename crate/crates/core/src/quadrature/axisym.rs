//! Axisymmetric 2-D integration.
//!
//! Integrals over the half-space (or over a box of the `(r, y)` quadrant)
//! of axisymmetric integrands reduce to
//! `omega_{n-2} iint f(r, y) r^{n-2} dr dy` (the constant `2` at `n = 2`).
//! Cells are processed by an embedded degree 7 / degree 5 Genz-Malik pair
//! with worst-first refinement.  A singular point at the pole `(0, 1)` is
//! handled by geometric pre-refinement, a small excluded disc, and an
//! analytic restoration of the excluded mass from the declared local model
//! `f ~ A(theta) d^{-beta} (log(2/d))^{-gamma}`, calibrated on a sampling
//! ring.

use super::gk;
use super::{IntegralResult, QuadSpec};
use crate::special::sphere_area;
use crate::{Error, Result};
use std::collections::BinaryHeap;

/// Rectangle `[r0, r1] x [y0, y1]` in the axisymmetric plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub r0: f64,
    pub r1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(r0: f64, r1: f64, y0: f64, y1: f64) -> Self {
        Rect { r0, r1, y0, y1 }
    }

    fn area(&self) -> f64 {
        (self.r1 - self.r0) * (self.y1 - self.y0)
    }

    fn contains(&self, r: f64, y: f64) -> bool {
        r >= self.r0 && r <= self.r1 && y >= self.y0 && y <= self.y1
    }
}

/// Declared local behaviour of the integrand at the pole `(0, 1)`,
/// `|f| <= A d_-^{-beta} (log(2/d_-))^{-gamma}` with integrable exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoleModel {
    /// `f ~ A(theta) d^{-beta}`, `beta < n`.
    Power { beta: f64 },
    /// `f ~ A(theta) d^{-beta} (log(2/d))^{-gamma}`; needs `gamma > 1`
    /// when `beta = n`.
    PowerLog { beta: f64, gamma: f64 },
}

// Genz-Malik degree 7/5 rule for dimension 2.
const LAMBDA2: f64 = 0.358_568_582_800_318_9; // sqrt(9/70)
const LAMBDA4: f64 = 0.948_683_298_050_513_8; // sqrt(9/10)
const LAMBDA5: f64 = 0.688_247_201_611_685_3; // sqrt(9/19)
const W1: f64 = -3816.0 / 19683.0;
const W2: f64 = 980.0 / 6561.0;
const W3: f64 = 1020.0 / 19683.0;
const W4: f64 = 200.0 / 19683.0;
const W5: f64 = 6859.0 / 78732.0;
const E1: f64 = -971.0 / 729.0;
const E2: f64 = 245.0 / 486.0;
const E3: f64 = 65.0 / 1458.0;
const E4: f64 = 25.0 / 729.0;

struct RuleOut {
    val: f64,
    err: f64,
    diff_r: f64,
    diff_y: f64,
}

fn gm_rule<F: Fn(f64, f64) -> f64>(f: &F, c: &Rect) -> (RuleOut, u64) {
    let hr = 0.5 * (c.r1 - c.r0);
    let hy = 0.5 * (c.y1 - c.y0);
    let cr = 0.5 * (c.r0 + c.r1);
    let cy = 0.5 * (c.y0 + c.y1);
    let area = c.area();

    let fc = f(cr, cy);
    let l2r = [f(cr - LAMBDA2 * hr, cy), f(cr + LAMBDA2 * hr, cy)];
    let l2y = [f(cr, cy - LAMBDA2 * hy), f(cr, cy + LAMBDA2 * hy)];
    let l4r = [f(cr - LAMBDA4 * hr, cy), f(cr + LAMBDA4 * hr, cy)];
    let l4y = [f(cr, cy - LAMBDA4 * hy), f(cr, cy + LAMBDA4 * hy)];
    let s2 = l2r[0] + l2r[1] + l2y[0] + l2y[1];
    let s3 = l4r[0] + l4r[1] + l4y[0] + l4y[1];
    let mut s4 = 0.0;
    for sr in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            s4 += f(cr + sr * LAMBDA4 * hr, cy + sy * LAMBDA4 * hy);
        }
    }
    let mut s5 = 0.0;
    for sr in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            s5 += f(cr + sr * LAMBDA5 * hr, cy + sy * LAMBDA5 * hy);
        }
    }

    let rule7 = area * (W1 * fc + W2 * s2 + W3 * s3 + W4 * s4 + W5 * s5);
    let rule5 = area * (E1 * fc + E2 * s2 + E3 * s3 + E4 * s4);
    let ratio = (LAMBDA2 * LAMBDA2) / (LAMBDA4 * LAMBDA4);
    let diff_r = (l2r[0] + l2r[1] - 2.0 * fc - ratio * (l4r[0] + l4r[1] - 2.0 * fc)).abs();
    let diff_y = (l2y[0] + l2y[1] - 2.0 * fc - ratio * (l4y[0] + l4y[1] - 2.0 * fc)).abs();

    (
        RuleOut {
            val: rule7,
            err: (rule7 - rule5).abs(),
            diff_r,
            diff_y,
        },
        17,
    )
}

struct Cell {
    rect: Rect,
    val: f64,
    err: f64,
    diff_r: f64,
    diff_y: f64,
    depth: u32,
    seq: u64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

const MAX_EVALS_2D: u64 = 6_000_000;

struct Engine<'a, F: Fn(f64, f64) -> f64> {
    f: &'a F,
    heap: BinaryHeap<Cell>,
    total: f64,
    total_err: f64,
    frozen_err: f64,
    evals: u64,
    seq: u64,
    spec: QuadSpec,
}

impl<'a, F: Fn(f64, f64) -> f64> Engine<'a, F> {
    fn new(f: &'a F, spec: QuadSpec) -> Self {
        Engine {
            f,
            heap: BinaryHeap::new(),
            total: 0.0,
            total_err: 0.0,
            frozen_err: 0.0,
            evals: 0,
            seq: 0,
            spec,
        }
    }

    fn push_rect(&mut self, rect: Rect, depth: u32) {
        if rect.area() <= 0.0 {
            return;
        }
        let (out, ne) = gm_rule(self.f, &rect);
        self.evals += ne;
        self.total += out.val;
        self.total_err += out.err;
        self.heap.push(Cell {
            rect,
            val: out.val,
            err: out.err,
            diff_r: out.diff_r,
            diff_y: out.diff_y,
            depth,
            seq: self.seq,
        });
        self.seq += 1;
    }

    /// Adds a rectangle pre-split so no cell is wider than `feature`.
    fn push_rect_gridded(&mut self, rect: Rect, feature: Option<f64>) {
        match feature {
            None => self.push_rect(rect, 0),
            Some(fe) => {
                let nx = (((rect.r1 - rect.r0) / fe).ceil() as usize).clamp(1, 128);
                let ny = (((rect.y1 - rect.y0) / fe).ceil() as usize).clamp(1, 128);
                for i in 0..nx {
                    for j in 0..ny {
                        let r0 = rect.r0 + (rect.r1 - rect.r0) * i as f64 / nx as f64;
                        let r1 = rect.r0 + (rect.r1 - rect.r0) * (i + 1) as f64 / nx as f64;
                        let y0 = rect.y0 + (rect.y1 - rect.y0) * j as f64 / ny as f64;
                        let y1 = rect.y0 + (rect.y1 - rect.y0) * (j + 1) as f64 / ny as f64;
                        self.push_rect(Rect::new(r0, r1, y0, y1), 0);
                    }
                }
            }
        }
    }

    /// Splits cells containing the pole until they shrink to the exclusion
    /// scale, producing geometric refinement rings.
    fn presplit_pole(&mut self, pole: (f64, f64)) {
        let target = self.spec.pole_exclusion;
        loop {
            let holder: Vec<Cell> = {
                let mut tmp = Vec::new();
                let mut rest = BinaryHeap::new();
                while let Some(c) = self.heap.pop() {
                    let near = c.rect.contains(pole.0, pole.1)
                        && (c.rect.r1 - c.rect.r0).max(c.rect.y1 - c.rect.y0) > 2.0 * target;
                    if near {
                        tmp.push(c);
                    } else {
                        rest.push(c);
                    }
                }
                self.heap = rest;
                tmp
            };
            if holder.is_empty() {
                break;
            }
            for c in holder {
                // geometric pre-refinement does not consume depth budget
                self.split_axis(c, None, true);
            }
        }
    }

    fn split(&mut self, cell: Cell) {
        let split_r = if cell.diff_r == cell.diff_y {
            (cell.rect.r1 - cell.rect.r0) >= (cell.rect.y1 - cell.rect.y0)
        } else {
            cell.diff_r > cell.diff_y
        };
        self.split_axis(cell, Some(split_r), false);
    }

    /// Splits a cell along the chosen axis (`None` = the longer side).
    fn split_axis(&mut self, cell: Cell, along_r: Option<bool>, reset_depth: bool) {
        self.total -= cell.val;
        self.total_err -= cell.err;
        let r = cell.rect;
        let split_r =
            along_r.unwrap_or((r.r1 - r.r0) >= (r.y1 - r.y0));
        let (a, b) = if split_r {
            let mid = 0.5 * (r.r0 + r.r1);
            (Rect::new(r.r0, mid, r.y0, r.y1), Rect::new(mid, r.r1, r.y0, r.y1))
        } else {
            let mid = 0.5 * (r.y0 + r.y1);
            (Rect::new(r.r0, r.r1, r.y0, mid), Rect::new(r.r0, r.r1, mid, r.y1))
        };
        let depth = if reset_depth { 0 } else { cell.depth + 1 };
        self.push_rect(a, depth);
        self.push_rect(b, depth);
    }

    fn tol(&self) -> f64 {
        (self.spec.rel_tol * self.total.abs()).max(self.spec.abs_tol)
    }

    fn refine(&mut self) {
        while self.total_err + self.frozen_err > self.tol() && self.evals < MAX_EVALS_2D {
            let Some(worst) = self.heap.pop() else { break };
            if worst.depth >= self.spec.max_depth {
                self.total_err -= worst.err;
                self.frozen_err += worst.err;
                continue;
            }
            self.split(worst);
        }
    }

    fn result(&self) -> IntegralResult {
        let err = self.total_err + self.frozen_err;
        IntegralResult {
            value: self.total,
            error_estimate: err,
            evaluations: self.evals,
            converged: self.total.is_finite() && err.is_finite() && err <= self.tol(),
        }
    }
}

/// The axisymmetric surface measure factor `omega_{n-2} r^{n-2}` (which is
/// the constant `2` for `n = 2`).
pub(crate) fn axisym_weight(n: u32) -> Result<f64> {
    sphere_area(n - 1)
}

/// Integral of `f(r, y)` over a rectangle of the axisymmetric plane against
/// `omega_{n-2} r^{n-2} dr dy`.  `min_feature` pre-splits the grid so that
/// localized integrands cannot hide from the sampler.
pub fn integrate_axisym_box<F: Fn(f64, f64) -> f64>(
    n: u32,
    f: F,
    rect: Rect,
    min_feature: Option<f64>,
    spec: &QuadSpec,
) -> Result<IntegralResult> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::Domain("dimension must be >= 2".into()));
    }
    if rect.area() <= 0.0 || rect.r0 < 0.0 {
        return Err(Error::Domain("invalid axisymmetric rectangle".into()));
    }
    let w = axisym_weight(n)?;
    let nf = n as f64;
    let g = move |r: f64, y: f64| w * r.powf(nf - 2.0) * f(r, y);
    let mut engine = Engine::new(&g, *spec);
    engine.push_rect_gridded(rect, min_feature);
    engine.refine();
    Ok(engine.result())
}

fn model_value(model: &PoleModel, d: f64) -> f64 {
    match model {
        PoleModel::Power { beta } => d.powf(-beta),
        PoleModel::PowerLog { beta, gamma } => d.powf(-beta) * (2.0 / d).ln().powf(-gamma),
    }
}

/// Mass of the model inside the excluded disc:
/// `int_0^delta model(rho) rho^{n-1} drho`, via `u = log(2/rho)`.
fn model_disc_mass(n: u32, model: &PoleModel, delta: f64, spec: &QuadSpec) -> Result<IntegralResult> {
    let nf = n as f64;
    let (beta, gamma) = match model {
        PoleModel::Power { beta } => (*beta, 0.0),
        PoleModel::PowerLog { beta, gamma } => (*beta, *gamma),
    };
    if beta > nf || (beta == nf && gamma <= 1.0) {
        return Err(Error::Domain(format!(
            "pole model d^-{beta} log^-{gamma} is not integrable in dimension {n}"
        )));
    }
    let u0 = (2.0 / delta).ln();
    if (beta - nf).abs() < 1e-12 {
        // pure log model: int_{u0}^inf u^{-gamma} du in closed form
        let value = u0.powf(1.0 - gamma) / (gamma - 1.0);
        return Ok(IntegralResult {
            value,
            error_estimate: value * 1e-14,
            evaluations: 0,
            converged: true,
        });
    }
    let integrand = move |u: f64| {
        let rho_pow = 2f64.powf(nf - beta) * (-(nf - beta) * u).exp();
        rho_pow * u.powf(-gamma)
    };
    let res = gk::integrate_to_inf(&integrand, u0, &spec.tighter(4.0));
    res.require_converged()?;
    Ok(res)
}

/// Angular bracket on the sampling ring of radius `rho`:
/// `omega_{n-2} int_0^pi [f/model](ring(theta)) sin^{n-2}(theta) dtheta`.
fn ring_bracket<F: Fn(f64, f64) -> f64>(
    n: u32,
    f: &F,
    model: &PoleModel,
    rho: f64,
    spec: &QuadSpec,
) -> Result<IntegralResult> {
    let w = axisym_weight(n)?;
    let nf = n as f64;
    let m = model_value(model, rho);
    let g = move |theta: f64| {
        let (s, c) = theta.sin_cos();
        let r = rho * s;
        let y = 1.0 + rho * c;
        w * f(r, y) / m * s.powf(nf - 2.0)
    };
    Ok(gk::adaptive_pieces(&g, &[(0.0, std::f64::consts::PI)], &spec.tighter(4.0)))
}

/// Integral of an axisymmetric integrand over the half-space quadrant
/// `(0,inf)^2` against `omega_{n-2} r^{n-2} dr dy`, with optional
/// singular-point handling at the pole `(0,1)` and dyadic domain expansion
/// for the far field.
///
/// `support`: optional bounding box outside which the integrand vanishes
/// (skips the far-field expansion).  `min_feature`: initial grid pitch.
pub fn integrate_halfspace_axisym<F: Fn(f64, f64) -> f64>(
    n: u32,
    f: F,
    pole: Option<PoleModel>,
    support: Option<Rect>,
    min_feature: Option<f64>,
    spec: &QuadSpec,
) -> Result<IntegralResult> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::Domain("dimension must be >= 2".into()));
    }
    let w = axisym_weight(n)?;
    let nf = n as f64;
    let delta = spec.pole_exclusion;

    let pole_active = match (&pole, &support) {
        (None, _) => false,
        (Some(_), Some(rect)) => rect.contains(0.0, 1.0),
        (Some(_), None) => true,
    };

    // no declared model: probe for hidden singular mass at the pole
    if pole.is_none() && support.is_none_or(|rect| rect.contains(0.0, 1.0)) {
        let probe = |rho: f64| -> f64 {
            let mut m = 0.0f64;
            for k in 0..17 {
                let theta = std::f64::consts::PI * (k as f64 + 0.5) / 17.0;
                let (s, c) = theta.sin_cos();
                m = m.max(f(rho * s, 1.0 + rho * c).abs());
            }
            m
        };
        let near = probe(delta);
        let far = probe(8.0 * delta);
        if near > 3.0 * far && near * delta.powf(nf) * sphere_area(n)? > spec.abs_tol {
            return Err(Error::MissingSingularity);
        }
    }

    let fr = &f;
    let excluded = move |r: f64, y: f64| {
        if pole_active {
            let d2 = r * r + (y - 1.0) * (y - 1.0);
            if d2 < delta * delta {
                return 0.0;
            }
        }
        w * r.powf(nf - 2.0) * fr(r, y)
    };

    let mut engine = Engine::new(&excluded, *spec);

    let mut result = match support {
        Some(rect) => {
            engine.push_rect_gridded(rect, min_feature);
            if pole_active {
                engine.presplit_pole((0.0, 1.0));
            }
            engine.refine();
            engine.result()
        }
        None => {
            // base box always covers the pole region comfortably
            let base = 2.0f64;
            engine.push_rect_gridded(Rect::new(0.0, base, 0.0, base), min_feature);
            if pole_active {
                engine.presplit_pole((0.0, 1.0));
            }
            engine.refine();

            let mut prev_total = engine.total;
            let mut small_streak = 0u32;
            let mut side = base;
            let mut accepted = false;
            while side < spec.truncation {
                let next = side * 2.0;
                engine.push_rect(Rect::new(side, next, 0.0, side), 0);
                engine.push_rect(Rect::new(0.0, side, side, next), 0);
                engine.push_rect(Rect::new(side, next, side, next), 0);
                engine.refine();
                let increment = (engine.total - prev_total).abs();
                prev_total = engine.total;
                if increment <= (spec.rel_tol * engine.total.abs()).max(spec.abs_tol) {
                    small_streak += 1;
                } else {
                    small_streak = 0;
                }
                side = next;
                if small_streak >= 2 {
                    accepted = true;
                    break;
                }
            }
            let mut res = engine.result();
            res.converged &= accepted;
            res
        }
    };

    if pole_active {
        let model = pole.expect("pole_active implies a model");
        let disc = model_disc_mass(n, &model, delta, spec)?;
        let b1 = ring_bracket(n, &f, &model, delta, spec)?;
        let b2 = ring_bracket(n, &f, &model, 0.5 * delta, spec)?;
        let tail = b1.value * disc.value;
        let tail_alt = b2.value * disc.value;
        result.value += tail;
        result.error_estimate += (tail - tail_alt).abs() * 1.5
            + disc.error_estimate * b1.value.abs()
            + b1.error_estimate * disc.value.abs();
        result.evaluations += disc.evaluations + b1.evaluations + b2.evaluations;
        let tol = (spec.rel_tol * result.value.abs()).max(spec.abs_tol);
        result.converged &= result.error_estimate <= tol;
    }

    Ok(result)
}
