//! Bounded-variable revised simplex with a two-phase start, product-form
//! basis updates, and Farkas certificate extraction from phase-1 duals.
//!
//! Pivot selection is steepest-edge-like (reduced cost scaled by a static
//! column norm); Bland's rule takes over after a degenerate streak so that
//! cycling is impossible. All choices are deterministic.

use super::lu::{Eta, LuFactors, ZERO_PIVOT};
use super::{Basis, BasisEntry, LinearProgram, LpError, LpResult, LpStatus};

const DUAL_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;
const RATIO_TOL: f64 = 1e-9;
const REFRESH: usize = 64;
const DEGEN_LIMIT: usize = 400;
const REPAIR_ROUNDS: usize = 30;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum VState {
    Basic,
    AtLower,
    AtUpper,
    Free,
}

#[derive(Debug)]
pub(super) enum WarmFailure {
    /// Basis shape or content does not fit this program; caller cold-starts.
    Invalid,
    /// Repair loop stalled; caller cold-starts.
    Stalled,
}

enum IterOutcome {
    Optimal,
    Unbounded,
}

pub(super) struct Solver<'a> {
    lp: &'a LinearProgram,
    n: usize,
    m: usize,
    /// structural + slack + artificial columns, sparse by row
    cols: Vec<Vec<(usize, f64)>>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    /// working bounds (equal to lb/ub except during warm repair)
    wlb: Vec<f64>,
    wub: Vec<f64>,
    cost: Vec<f64>,
    pricing_norm: Vec<f64>,
    values: Vec<f64>,
    vstate: Vec<VState>,
    basis: Vec<usize>,
    /// row index of the artificial held by column j (usize::MAX for none)
    art_row: Vec<usize>,
    lu: Option<LuFactors>,
    etas: Vec<Eta>,
    iterations: usize,
    rhs_scale: f64,
    scratch_row: Vec<f64>,
}

impl<'a> Solver<'a> {
    pub(super) fn new(lp: &'a LinearProgram) -> Solver<'a> {
        let n = lp.num_vars();
        let m = lp.num_rows();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + m];
        for (i, row) in lp.rows().iter().enumerate() {
            for &(j, v) in &row.coeffs {
                cols[j].push((i, v));
            }
        }
        for c in cols.iter_mut().take(n) {
            c.sort_unstable_by_key(|e| e.0);
        }
        let mut lb = Vec::with_capacity(n + m);
        let mut ub = Vec::with_capacity(n + m);
        for j in 0..n {
            let (l, u) = lp.bounds()[j];
            lb.push(l);
            ub.push(u);
        }
        let mut rhs_scale: f64 = 1.0;
        for (i, row) in lp.rows().iter().enumerate() {
            cols[n + i].push((i, 1.0));
            let (sl, su) = row.relation.slack_bounds();
            lb.push(sl);
            ub.push(su);
            rhs_scale = rhs_scale.max(row.rhs.abs());
        }
        let mut cost = vec![0.0; n + m];
        cost[..n].copy_from_slice(lp.objective());
        let pricing_norm = cols
            .iter()
            .map(|c| (1.0 + c.iter().map(|e| e.1 * e.1).sum::<f64>()).sqrt())
            .collect();
        Solver {
            lp,
            n,
            m,
            cols,
            wlb: lb.clone(),
            wub: ub.clone(),
            lb,
            ub,
            cost,
            pricing_norm,
            values: Vec::new(),
            vstate: Vec::new(),
            basis: Vec::new(),
            art_row: vec![usize::MAX; n + m],
            lu: None,
            etas: Vec::new(),
            iterations: 0,
            rhs_scale,
            scratch_row: vec![0.0; m],
        }
    }

    fn push_artificial(&mut self, row: usize, sign: f64) -> usize {
        let j = self.cols.len();
        self.cols.push(vec![(row, sign)]);
        self.lb.push(0.0);
        self.ub.push(f64::INFINITY);
        self.wlb.push(0.0);
        self.wub.push(f64::INFINITY);
        self.cost.push(0.0);
        self.pricing_norm.push(std::f64::consts::SQRT_2);
        self.art_row.push(row);
        j
    }

    fn initial_bound_value(&self, j: usize) -> (f64, VState) {
        let (l, u) = (self.lb[j], self.ub[j]);
        if l.is_finite() {
            (l, VState::AtLower)
        } else if u.is_finite() {
            (u, VState::AtUpper)
        } else {
            (0.0, VState::Free)
        }
    }

    /// Cold start: slacks basic where the start point already satisfies their
    /// bounds, artificials elsewhere; then phase 1 if any residual remains.
    pub(super) fn solve_cold(&mut self) -> Result<LpResult, LpError> {
        let (n, m) = (self.n, self.m);
        self.values = vec![0.0; n + m];
        self.vstate = vec![VState::AtLower; n + m];
        for j in 0..n {
            let (v, s) = self.initial_bound_value(j);
            self.values[j] = v;
            self.vstate[j] = s;
        }
        // Row residuals at the initial point.
        let mut resid: Vec<f64> = self.lp.rows().iter().map(|r| r.rhs).collect();
        for j in 0..n {
            let xv = self.values[j];
            if xv != 0.0 {
                for &(i, a) in &self.cols[j] {
                    resid[i] -= a * xv;
                }
            }
        }
        self.basis = Vec::with_capacity(m);
        let mut need_phase1 = false;
        for i in 0..m {
            let s = n + i;
            let (sl, su) = (self.lb[s], self.ub[s]);
            if resid[i] >= sl - FEAS_TOL && resid[i] <= su + FEAS_TOL {
                self.values[s] = resid[i];
                self.vstate[s] = VState::Basic;
                self.basis.push(s);
            } else {
                let snap = resid[i].clamp(sl, su);
                let snap = if snap.is_finite() { snap } else { 0.0 };
                self.values[s] = snap;
                self.vstate[s] = if snap == su { VState::AtUpper } else { VState::AtLower };
                let t = resid[i] - snap;
                let a = self.push_artificial(i, if t >= 0.0 { 1.0 } else { -1.0 });
                self.values.push(t.abs());
                self.vstate.push(VState::Basic);
                self.basis.push(a);
                need_phase1 = true;
            }
        }
        self.refactorize()?;
        if need_phase1 {
            if let Some(res) = self.run_phase1()? {
                return Ok(res);
            }
        }
        self.finish_phase2()
    }

    /// Warm start from a previous basis; bound/rhs/objective changes allowed.
    pub(super) fn solve_warm(&mut self, warm: &Basis) -> Result<Result<LpResult, WarmFailure>, LpError> {
        let (n, m) = (self.n, self.m);
        if warm.state.len() != n + m || warm.basic.len() != m {
            return Ok(Err(WarmFailure::Invalid));
        }
        self.values = vec![0.0; n + m];
        self.vstate = vec![VState::AtLower; n + m];
        let mut seen = vec![false; n + m];
        self.basis = Vec::with_capacity(m);
        for entry in &warm.basic {
            match *entry {
                BasisEntry::Var(j) => {
                    if j >= n + m || seen[j] {
                        return Ok(Err(WarmFailure::Invalid));
                    }
                    seen[j] = true;
                    self.vstate[j] = VState::Basic;
                    self.basis.push(j);
                }
                BasisEntry::Art(row) => {
                    if row >= m {
                        return Ok(Err(WarmFailure::Invalid));
                    }
                    let a = self.push_artificial(row, 1.0);
                    self.values.push(0.0);
                    self.vstate.push(VState::Basic);
                    // artificials are permanently fixed at zero outside phase 1
                    self.wlb[a] = 0.0;
                    self.wub[a] = 0.0;
                    self.ub[a] = 0.0;
                    self.basis.push(a);
                }
            }
        }
        for j in 0..n + m {
            if self.vstate[j] == VState::Basic {
                continue;
            }
            let st = match warm.state[j] {
                1 => VState::AtLower,
                2 => VState::AtUpper,
                3 => VState::Free,
                _ => VState::AtLower,
            };
            let (v, s) = match st {
                VState::AtUpper if self.ub[j].is_finite() => (self.ub[j], VState::AtUpper),
                VState::Free if !self.lb[j].is_finite() && !self.ub[j].is_finite() => {
                    (0.0, VState::Free)
                }
                _ => self.initial_bound_value(j),
            };
            self.values[j] = v;
            self.vstate[j] = s;
        }
        if self.refactorize().is_err() {
            return Ok(Err(WarmFailure::Invalid));
        }
        self.recompute_basic_values();

        // Repair any basic variables that the new bounds leave infeasible.
        for _round in 0..REPAIR_ROUNDS {
            self.restore_true_bounds();
            // A variable that left the basis during repair may sit at a
            // stale expanded bound; snap every nonbasic back onto a real one.
            for j in 0..self.cols.len() {
                if self.vstate[j] == VState::Basic {
                    continue;
                }
                let (v, s) = match self.vstate[j] {
                    VState::AtUpper if self.ub[j].is_finite() => (self.ub[j], VState::AtUpper),
                    VState::Free if !self.lb[j].is_finite() && !self.ub[j].is_finite() => {
                        (0.0, VState::Free)
                    }
                    _ => self.initial_bound_value(j),
                };
                self.values[j] = v;
                self.vstate[j] = s;
            }
            self.recompute_basic_values();
            let mut nviol = 0usize;
            let mut repair_cost = vec![0.0; self.cols.len()];
            for &j in &self.basis {
                let v = self.values[j];
                if v > self.ub[j] + self.feas_tol() {
                    repair_cost[j] = 1.0;
                    self.wub[j] = v;
                    self.wlb[j] = self.lb[j];
                    nviol += 1;
                } else if v < self.lb[j] - self.feas_tol() {
                    repair_cost[j] = -1.0;
                    self.wlb[j] = v;
                    self.wub[j] = self.ub[j];
                    nviol += 1;
                }
            }
            if nviol == 0 {
                let res = self.finish_phase2()?;
                return Ok(Ok(res));
            }
            let before = self.total_violation();
            std::mem::swap(&mut self.cost, &mut repair_cost);
            let out = self.iterate(true);
            std::mem::swap(&mut self.cost, &mut repair_cost);
            out?;
            let after = self.total_violation();
            if after >= before - self.feas_tol() && after > self.feas_tol() {
                return Ok(Err(WarmFailure::Stalled));
            }
            if after <= self.feas_tol() {
                self.restore_true_bounds();
                let res = self.finish_phase2()?;
                return Ok(Ok(res));
            }
        }
        Ok(Err(WarmFailure::Stalled))
    }

    fn restore_true_bounds(&mut self) {
        for j in 0..self.cols.len() {
            self.wlb[j] = self.lb[j];
            self.wub[j] = self.ub[j];
        }
    }

    fn total_violation(&self) -> f64 {
        self.basis
            .iter()
            .map(|&j| {
                let v = self.values[j];
                (v - self.ub[j]).max(0.0) + (self.lb[j] - v).max(0.0)
            })
            .sum()
    }

    fn feas_tol(&self) -> f64 {
        FEAS_TOL * self.rhs_scale.max(1.0)
    }

    fn run_phase1(&mut self) -> Result<Option<LpResult>, LpError> {
        let mut p1cost = vec![0.0; self.cols.len()];
        for j in self.n + self.m..self.cols.len() {
            p1cost[j] = 1.0;
        }
        std::mem::swap(&mut self.cost, &mut p1cost);
        let out = self.iterate(true);
        std::mem::swap(&mut self.cost, &mut p1cost);
        out?;
        let infeas: f64 = (self.n + self.m..self.cols.len())
            .map(|j| self.values[j].max(0.0))
            .sum();
        if infeas > self.feas_tol() {
            // Phase-1 duals certify infeasibility.
            std::mem::swap(&mut self.cost, &mut p1cost);
            let pi = self.duals();
            std::mem::swap(&mut self.cost, &mut p1cost);
            let ray = self.validated_ray(pi)?;
            return Ok(Some(LpResult {
                status: LpStatus::Infeasible,
                primal: self.values[..self.n].to_vec(),
                dual: vec![0.0; self.m],
                reduced_costs: vec![0.0; self.n],
                objective: f64::INFINITY,
                farkas_ray: Some(ray),
                iterations: self.iterations,
                basis: self.export_basis(),
            }));
        }
        // Feasible: freeze artificials at zero.
        for j in self.n + self.m..self.cols.len() {
            self.ub[j] = 0.0;
            self.wub[j] = 0.0;
            if self.vstate[j] == VState::Basic {
                self.values[j] = 0.0;
            } else {
                self.vstate[j] = VState::AtLower;
                self.values[j] = 0.0;
            }
        }
        Ok(None)
    }

    fn validated_ray(&mut self, pi: Vec<f64>) -> Result<Vec<f64>, LpError> {
        // Certificate: pi' b  >  sup over bounds of (pi' A) x, where the slack
        // columns carry the row senses through their bounds.
        let mut value = 0.0;
        for (i, row) in self.lp.rows().iter().enumerate() {
            value += pi[i] * row.rhs;
        }
        let mut sup = 0.0;
        for j in 0..self.n + self.m {
            let mut w = 0.0;
            for &(i, a) in &self.cols[j] {
                w += pi[i] * a;
            }
            if w.abs() <= 1e-9 * self.rhs_scale.max(1.0) {
                continue;
            }
            let bound = if w > 0.0 { self.ub[j] } else { self.lb[j] };
            if !bound.is_finite() {
                return Err(LpError::NumericFailure(
                    "farkas ray has unbounded support".into(),
                ));
            }
            sup += w * bound;
        }
        if value - sup <= FEAS_TOL {
            return Err(LpError::NumericFailure(
                "phase-1 duals fail to certify infeasibility".into(),
            ));
        }
        Ok(pi)
    }

    /// Phase-2 loop plus result assembly.
    fn finish_phase2(&mut self) -> Result<LpResult, LpError> {
        match self.iterate(false)? {
            IterOutcome::Unbounded => Ok(LpResult {
                status: LpStatus::Unbounded,
                primal: self.values[..self.n].to_vec(),
                dual: vec![0.0; self.m],
                reduced_costs: vec![0.0; self.n],
                objective: f64::NEG_INFINITY,
                farkas_ray: None,
                iterations: self.iterations,
                basis: self.export_basis(),
            }),
            IterOutcome::Optimal => {
                let pi = self.duals();
                let mut reduced = Vec::with_capacity(self.n);
                for j in 0..self.n {
                    let mut d = self.cost[j];
                    for &(i, a) in &self.cols[j] {
                        d -= pi[i] * a;
                    }
                    reduced.push(d);
                }
                let objective = (0..self.n).map(|j| self.cost[j] * self.values[j]).sum();
                Ok(LpResult {
                    status: LpStatus::Optimal,
                    primal: self.values[..self.n].to_vec(),
                    dual: pi,
                    reduced_costs: reduced,
                    objective,
                    farkas_ray: None,
                    iterations: self.iterations,
                    basis: self.export_basis(),
                })
            }
        }
    }

    fn export_basis(&self) -> Basis {
        let mut state = vec![0u8; self.n + self.m];
        for j in 0..self.n + self.m {
            state[j] = match self.vstate[j] {
                VState::Basic => 0,
                VState::AtLower => 1,
                VState::AtUpper => 2,
                VState::Free => 3,
            };
        }
        let basic = self
            .basis
            .iter()
            .map(|&j| {
                if j < self.n + self.m {
                    BasisEntry::Var(j)
                } else {
                    BasisEntry::Art(self.art_row[j])
                }
            })
            .collect();
        Basis { state, basic }
    }

    fn duals(&mut self) -> Vec<f64> {
        let m = self.m;
        let mut cb = vec![0.0; m];
        for (slot, &j) in self.basis.iter().enumerate() {
            cb[slot] = self.cost[j];
        }
        for eta in self.etas.iter().rev() {
            eta.apply_transposed(&mut cb);
        }
        let mut pi = vec![0.0; m];
        if let Some(lu) = &self.lu {
            lu.btran(&cb, &mut pi);
        }
        pi
    }

    fn refactorize(&mut self) -> Result<(), LpError> {
        let cols = &self.cols;
        let basis = &self.basis;
        match LuFactors::factorize(self.m, |slot| cols[basis[slot]].as_slice()) {
            Ok(lu) => {
                self.lu = Some(lu);
                self.etas.clear();
                Ok(())
            }
            Err(_) => Err(LpError::NumericFailure("singular basis".into())),
        }
    }

    fn recompute_basic_values(&mut self) {
        let m = self.m;
        let mut r = vec![0.0; m];
        for (i, row) in self.lp.rows().iter().enumerate() {
            r[i] = row.rhs;
        }
        for j in 0..self.cols.len() {
            if self.vstate[j] != VState::Basic && self.values[j] != 0.0 {
                let xv = self.values[j];
                for &(i, a) in &self.cols[j] {
                    r[i] -= a * xv;
                }
            }
        }
        let mut xb = vec![0.0; m];
        if let Some(lu) = &self.lu {
            lu.ftran(&mut r, &mut xb);
        }
        for eta in &self.etas {
            eta.apply(&mut xb);
        }
        for (slot, &j) in self.basis.iter().enumerate() {
            self.values[j] = xb[slot];
        }
    }

    fn ftran_col(&mut self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut v = std::mem::take(&mut self.scratch_row);
        for e in v.iter_mut() {
            *e = 0.0;
        }
        for &(i, a) in &self.cols[j] {
            v[i] = a;
        }
        let mut alpha = vec![0.0; m];
        if let Some(lu) = &self.lu {
            lu.ftran(&mut v, &mut alpha);
        }
        self.scratch_row = v;
        for eta in &self.etas {
            eta.apply(&mut alpha);
        }
        alpha
    }

    /// Main pivoting loop for the current cost vector. `allow_art` keeps
    /// artificial columns pivotable (phase 1 / repair).
    fn iterate(&mut self, repair_or_phase1: bool) -> Result<IterOutcome, LpError> {
        let ncols = self.cols.len();
        let iter_limit = 50_000 + 50 * (self.m + self.n);
        let mut degen_streak = 0usize;
        let mut bland = false;
        let mut cleanup_rounds = 0usize;
        loop {
            if self.iterations > iter_limit {
                return Err(LpError::NumericFailure("iteration limit exceeded".into()));
            }
            let pi = self.duals();
            // Entering selection.
            let mut best: Option<(usize, f64, f64)> = None; // (col, dir, score)
            for j in 0..ncols {
                if self.vstate[j] == VState::Basic {
                    continue;
                }
                if !repair_or_phase1 && j >= self.n + self.m {
                    continue; // artificials stay out in phase 2
                }
                if self.wlb[j] == self.wub[j] {
                    continue; // fixed
                }
                let mut d = self.cost[j];
                for &(i, a) in &self.cols[j] {
                    d -= pi[i] * a;
                }
                let tol = DUAL_TOL * self.cost[j].abs().max(1.0);
                let dir = match self.vstate[j] {
                    VState::AtLower if d < -tol => 1.0,
                    VState::AtUpper if d > tol => -1.0,
                    VState::Free if d.abs() > tol => -d.signum(),
                    _ => continue,
                };
                if bland {
                    best = Some((j, dir, 0.0));
                    break;
                }
                let score = d.abs() / self.pricing_norm[j];
                match best {
                    Some((_, _, s)) if s >= score => {}
                    _ => best = Some((j, dir, score)),
                }
            }
            let (entering, dir) = match best {
                Some((j, dir, _)) => (j, dir),
                None => {
                    // Numerical cleanup: refresh factors once and re-price.
                    if !self.etas.is_empty() && cleanup_rounds < 3 {
                        cleanup_rounds += 1;
                        self.refactorize()?;
                        self.recompute_basic_values();
                        continue;
                    }
                    return Ok(IterOutcome::Optimal);
                }
            };
            let alpha = self.ftran_col(entering);

            // Ratio test over working bounds.
            let own_range = self.wub[entering] - self.wlb[entering];
            let mut t_min = if own_range.is_finite() { own_range } else { f64::INFINITY };
            let mut limiting: Vec<(usize, f64, f64)> = Vec::new(); // (slot, ratio, |alpha|)
            for (slot, &a) in alpha.iter().enumerate() {
                if a.abs() <= ZERO_PIVOT {
                    continue;
                }
                let bj = self.basis[slot];
                let delta = -dir * a;
                let ratio = if delta < 0.0 {
                    if self.wlb[bj].is_finite() {
                        (self.values[bj] - self.wlb[bj]).max(0.0) / -delta
                    } else {
                        continue;
                    }
                } else if self.wub[bj].is_finite() {
                    (self.wub[bj] - self.values[bj]).max(0.0) / delta
                } else {
                    continue;
                };
                limiting.push((slot, ratio, a.abs()));
                if ratio < t_min {
                    t_min = ratio;
                }
            }
            if t_min.is_infinite() {
                if repair_or_phase1 {
                    return Err(LpError::NumericFailure(
                        "auxiliary objective unbounded".into(),
                    ));
                }
                return Ok(IterOutcome::Unbounded);
            }
            // Choose the blocking row among near-ties.
            let window = t_min + RATIO_TOL * (1.0 + t_min.abs());
            let mut chosen: Option<(usize, f64)> = None; // (slot, |alpha|)
            for &(slot, ratio, amag) in &limiting {
                if ratio <= window {
                    let better = match chosen {
                        None => true,
                        Some((cs, ca)) => {
                            if bland {
                                self.basis[slot] < self.basis[cs]
                            } else {
                                amag > ca || (amag == ca && self.basis[slot] < self.basis[cs])
                            }
                        }
                    };
                    if better {
                        chosen = Some((slot, amag));
                    }
                }
            }
            let step = t_min;
            let flip = own_range.is_finite() && (chosen.is_none() || own_range <= window);
            // Apply the step to basic values.
            if step != 0.0 {
                for (slot, &a) in alpha.iter().enumerate() {
                    if a != 0.0 {
                        let bj = self.basis[slot];
                        self.values[bj] -= step * dir * a;
                    }
                }
            }
            self.iterations += 1;
            if flip {
                let target = if dir > 0.0 { self.wub[entering] } else { self.wlb[entering] };
                self.values[entering] = target;
                self.vstate[entering] = if dir > 0.0 { VState::AtUpper } else { VState::AtLower };
            } else {
                let (slot, _) = chosen.expect("blocking row exists when not flipping");
                let leaving = self.basis[slot];
                let a_r = alpha[slot];
                if a_r.abs() <= ZERO_PIVOT {
                    return Err(LpError::NumericFailure("vanishing pivot element".into()));
                }
                let delta = -dir * a_r;
                self.values[leaving] = if delta < 0.0 { self.wlb[leaving] } else { self.wub[leaving] };
                self.vstate[leaving] = if delta < 0.0 { VState::AtLower } else { VState::AtUpper };
                self.values[entering] += dir * step;
                self.vstate[entering] = VState::Basic;
                self.basis[slot] = entering;
                let off: Vec<(usize, f64)> = alpha
                    .iter()
                    .enumerate()
                    .filter(|&(s, &a)| s != slot && a != 0.0)
                    .map(|(s, &a)| (s, a))
                    .collect();
                self.etas.push(Eta { slot, diag: a_r, off });
                if self.etas.len() >= REFRESH {
                    self.refactorize()?;
                    self.recompute_basic_values();
                }
            }
            // Degeneracy bookkeeping for the Bland fallback.
            if step > 1e-12 {
                degen_streak = 0;
                bland = false;
            } else {
                degen_streak += 1;
                if degen_streak > DEGEN_LIMIT {
                    bland = true;
                }
            }
        }
    }
}
