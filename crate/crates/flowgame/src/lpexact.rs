//! Exact linear programming over arbitrary-precision rationals.
//!
//! A dense two-phase tableau simplex with Bland's pivot rule: slow but
//! exact and guaranteed to terminate. Structural variables are free (split
//! internally into nonnegative pairs), so callers state every bound they
//! want as an explicit row.
//!
//! The module also provides incremental vertex enumeration for bounded
//! polytopes, used where an explicit vertex representation is cheaper than
//! repeated optimization.

use std::collections::BTreeSet;

use num::{One, Signed, Zero};

use crate::Rat;

/// Direction of a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

/// A single linear constraint `coeffs . x  <relation>  rhs` with a label
/// identifying where it came from; labels deduplicate pool insertions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
    pub label: String,
}

impl Constraint {
    pub fn ge(coeffs: Vec<Rat>, rhs: Rat, label: impl Into<String>) -> Self {
        Constraint {
            coeffs,
            relation: Relation::Ge,
            rhs,
            label: label.into(),
        }
    }

    pub fn le(coeffs: Vec<Rat>, rhs: Rat, label: impl Into<String>) -> Self {
        Constraint {
            coeffs,
            relation: Relation::Le,
            rhs,
            label: label.into(),
        }
    }

    pub fn eq(coeffs: Vec<Rat>, rhs: Rat, label: impl Into<String>) -> Self {
        Constraint {
            coeffs,
            relation: Relation::Eq,
            rhs,
            label: label.into(),
        }
    }

    /// Signed slack of the row at a point: nonnegative iff satisfied, for
    /// equalities zero iff satisfied.
    pub fn slack_at(&self, x: &[Rat]) -> Rat {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Ge => lhs - &self.rhs,
            Relation::Le => self.rhs.clone() - lhs,
            Relation::Eq => lhs - &self.rhs,
        }
    }

    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        let s = self.slack_at(x);
        match self.relation {
            Relation::Eq => s.is_zero(),
            _ => !s.is_negative(),
        }
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// A growing set of constraints with label-based deduplication.
#[derive(Debug, Clone)]
pub struct ConstraintPool {
    dims: usize,
    rows: Vec<Constraint>,
    labels: BTreeSet<String>,
}

impl ConstraintPool {
    pub fn new(dims: usize) -> Self {
        ConstraintPool {
            dims,
            rows: Vec::new(),
            labels: BTreeSet::new(),
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Inserts a row unless a row with the same label is already present.
    /// Returns true when the row was added.
    pub fn push(&mut self, c: Constraint) -> bool {
        assert_eq!(c.coeffs.len(), self.dims, "row dimension mismatch");
        if !self.labels.insert(c.label.clone()) {
            return false;
        }
        self.rows.push(c);
        true
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        self.rows.iter().all(|c| c.satisfied_by(x))
    }
}

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Outcome of an exact LP solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Rat, Vec<Rat>)> {
        match self {
            LpOutcome::Optimal { value, point } => Some((value, point)),
            _ => None,
        }
    }
}

/// Optimizes a linear objective over free variables subject to the given
/// rows. All arithmetic is exact.
pub fn solve_lp<'a, I>(rows: I, dims: usize, objective: &[Rat], sense: Sense) -> LpOutcome
where
    I: IntoIterator<Item = &'a Constraint>,
{
    assert_eq!(objective.len(), dims);
    let rows: Vec<&Constraint> = rows.into_iter().collect();
    let m = rows.len();

    // Free variable x_j becomes y2j - y2j1 with both parts nonnegative.
    let split = 2 * dims;
    let slack_count = rows
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();

    // First pass: build rows over split + slack columns, normalize the right
    // side to be nonnegative, and decide which rows get an artificial.
    let mut body: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    let mut basis_col: Vec<Option<usize>> = Vec::with_capacity(m);
    let mut slack_idx = 0usize;
    for c in &rows {
        assert_eq!(c.coeffs.len(), dims, "row dimension mismatch");
        let mut row = vec![Rat::zero(); split + slack_count];
        for (j, a) in c.coeffs.iter().enumerate() {
            row[2 * j] = a.clone();
            row[2 * j + 1] = -a.clone();
        }
        let slack_sign = match c.relation {
            Relation::Le => Some(Rat::one()),
            Relation::Ge => Some(-Rat::one()),
            Relation::Eq => None,
        };
        let mut col = None;
        if let Some(sign) = slack_sign {
            col = Some(split + slack_idx);
            row[split + slack_idx] = sign;
            slack_idx += 1;
        }
        let mut b = c.rhs.clone();
        if b.is_negative() {
            for v in &mut row {
                *v = -v.clone();
            }
            b = -b;
        }
        // The slack column serves as the initial basis only if its
        // coefficient ended up +1 after normalization.
        let usable = col.filter(|&j| row[j].is_one());
        body.push(row);
        rhs.push(b);
        basis_col.push(usable);
    }

    // Append artificial columns where no slack is usable as a basis.
    let artificial_start = split + slack_count;
    let artificial_rows: Vec<usize> = (0..m).filter(|&i| basis_col[i].is_none()).collect();
    let ncols = artificial_start + artificial_rows.len();
    for row in &mut body {
        row.resize(ncols, Rat::zero());
    }
    for (k, &i) in artificial_rows.iter().enumerate() {
        body[i][artificial_start + k] = Rat::one();
        basis_col[i] = Some(artificial_start + k);
    }

    let mut tab = Tableau {
        body,
        rhs,
        basis: basis_col.into_iter().map(|c| c.unwrap()).collect(),
        allowed: vec![true; ncols],
        ncols,
    };

    // Phase 1: drive the artificials to zero.
    if !artificial_rows.is_empty() {
        let mut phase1 = vec![Rat::zero(); ncols];
        for j in artificial_start..ncols {
            phase1[j] = Rat::one();
        }
        match tab.run(&phase1) {
            RunResult::Optimal => {}
            RunResult::Unbounded => unreachable!("phase-1 objective is bounded below by zero"),
        }
        let infeasibility: Rat = (0..tab.basis.len())
            .filter(|&i| tab.basis[i] >= artificial_start)
            .fold(Rat::zero(), |acc, i| acc + &tab.rhs[i]);
        if !infeasibility.is_zero() {
            return LpOutcome::Infeasible;
        }
        tab.evict_artificials(artificial_start);
        for j in artificial_start..ncols {
            tab.allowed[j] = false;
        }
    }

    // Phase 2 on the sense-normalized objective (internally minimizing).
    let mut phase2 = vec![Rat::zero(); ncols];
    for j in 0..dims {
        let c = match sense {
            Sense::Minimize => objective[j].clone(),
            Sense::Maximize => -objective[j].clone(),
        };
        phase2[2 * j] = c.clone();
        phase2[2 * j + 1] = -c;
    }
    match tab.run(&phase2) {
        RunResult::Optimal => {}
        RunResult::Unbounded => return LpOutcome::Unbounded,
    }

    let mut point = vec![Rat::zero(); dims];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < split {
            let j = b / 2;
            if b % 2 == 0 {
                point[j] += &tab.rhs[i];
            } else {
                point[j] -= &tab.rhs[i];
            }
        }
    }
    let value = dot(objective, &point);
    LpOutcome::Optimal { value, point }
}

enum RunResult {
    Optimal,
    Unbounded,
}

struct Tableau {
    body: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    allowed: Vec<bool>,
    ncols: usize,
}

impl Tableau {
    /// Bland's rule simplex on the current basis, minimizing `cost`.
    fn run(&mut self, cost: &[Rat]) -> RunResult {
        let mut reduced = self.reduced_costs(cost);
        loop {
            let entering = (0..self.ncols)
                .find(|&j| self.allowed[j] && reduced[j].is_negative());
            let Some(col) = entering else {
                return RunResult::Optimal;
            };
            let mut leave: Option<(Rat, usize, usize)> = None; // ratio, basis col, row
            for i in 0..self.body.len() {
                if self.body[i][col].is_positive() {
                    let ratio = &self.rhs[i] / &self.body[i][col];
                    let better = match &leave {
                        None => true,
                        Some((best, bcol, _)) => {
                            ratio < *best || (ratio == *best && self.basis[i] < *bcol)
                        }
                    };
                    if better {
                        leave = Some((ratio, self.basis[i], i));
                    }
                }
            }
            let Some((_, _, row)) = leave else {
                return RunResult::Unbounded;
            };
            self.pivot(row, col);
            reduced = self.reduced_costs(cost);
        }
    }

    /// Reduced cost row for the current basis, rebuilt from scratch.
    fn reduced_costs(&self, cost: &[Rat]) -> Vec<Rat> {
        let mut r = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            let cb = cost[b].clone();
            for j in 0..self.ncols {
                if !self.body[i][j].is_zero() {
                    r[j] -= &cb * &self.body[i][j];
                }
            }
        }
        r
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.body[row][col].clone();
        for v in &mut self.body[row] {
            *v = &*v / &piv;
        }
        self.rhs[row] = &self.rhs[row] / &piv;
        for i in 0..self.body.len() {
            if i == row || self.body[i][col].is_zero() {
                continue;
            }
            let factor = self.body[i][col].clone();
            for j in 0..self.ncols {
                if !self.body[row][j].is_zero() {
                    let delta = &factor * &self.body[row][j];
                    self.body[i][j] -= delta;
                }
            }
            let delta = &factor * &self.rhs[row];
            self.rhs[i] -= delta;
        }
        self.basis[row] = col;
    }

    /// Pivots zero-valued artificials out of the basis; rows that cannot be
    /// pivoted are redundant and get dropped.
    fn evict_artificials(&mut self, artificial_start: usize) {
        let mut i = 0;
        while i < self.body.len() {
            if self.basis[i] < artificial_start {
                i += 1;
                continue;
            }
            let col = (0..artificial_start).find(|&j| !self.body[i][j].is_zero());
            match col {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.body.remove(i);
                    self.rhs.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut mat: Vec<Vec<Rat>> = rows.to_vec();
    let mut rank = 0;
    let ncols = mat.first().map_or(0, |r| r.len());
    for col in 0..ncols {
        let Some(pivot_row) = (rank..mat.len()).find(|&i| !mat[i][col].is_zero()) else {
            continue;
        };
        mat.swap(rank, pivot_row);
        let piv = mat[rank][col].clone();
        for j in col..ncols {
            mat[rank][j] = &mat[rank][j] / &piv;
        }
        for i in 0..mat.len() {
            if i == rank || mat[i][col].is_zero() {
                continue;
            }
            let f = mat[i][col].clone();
            for j in col..ncols {
                let delta = &f * &mat[rank][j];
                mat[i][j] -= delta;
            }
        }
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    rank
}

/// Incremental vertex enumeration for a bounded polytope, seeded with a
/// scaled standard simplex and refined one halfspace at a time.
#[derive(Debug, Clone)]
pub struct VertexEnumerator {
    dims: usize,
    /// Every row added so far in `coeffs . x >= rhs` form (equalities as two
    /// opposite rows); needed for the edge-rank test.
    rows: Vec<(Vec<Rat>, Rat)>,
    vertices: Vec<Vec<Rat>>,
}

impl VertexEnumerator {
    /// The polytope `{ x >= 0, sum x = total }`, whose vertices are
    /// `total . e_i`.
    pub fn simplex(dims: usize, total: Rat) -> Self {
        assert!(dims > 0);
        assert!(total.is_positive());
        let mut rows = Vec::new();
        for j in 0..dims {
            let mut c = vec![Rat::zero(); dims];
            c[j] = Rat::one();
            rows.push((c, Rat::zero()));
        }
        let ones = vec![Rat::one(); dims];
        rows.push((ones.clone(), total.clone()));
        rows.push((ones.iter().map(|c| -c).collect(), -total.clone()));
        let vertices = (0..dims)
            .map(|j| {
                let mut v = vec![Rat::zero(); dims];
                v[j] = total.clone();
                v
            })
            .collect();
        VertexEnumerator {
            dims,
            rows,
            vertices,
        }
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn add_constraint(&mut self, c: &Constraint) {
        assert_eq!(c.coeffs.len(), self.dims);
        match c.relation {
            Relation::Ge => self.add_halfspace(c.coeffs.clone(), c.rhs.clone()),
            Relation::Le => self.add_halfspace(
                c.coeffs.iter().map(|a| -a).collect(),
                -c.rhs.clone(),
            ),
            Relation::Eq => {
                self.add_halfspace(c.coeffs.clone(), c.rhs.clone());
                self.add_halfspace(c.coeffs.iter().map(|a| -a).collect(), -c.rhs.clone());
            }
        }
    }

    /// Intersects the current polytope with `coeffs . x >= rhs`, keeping the
    /// vertex set exact: surviving vertices plus crossing points of genuine
    /// edges between kept and cut vertices.
    fn add_halfspace(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        let value = |v: &[Rat]| dot(&coeffs, v) - &rhs;
        let signs: Vec<i8> = self
            .vertices
            .iter()
            .map(|v| {
                let d = value(v);
                if d.is_negative() {
                    -1
                } else if d.is_zero() {
                    0
                } else {
                    1
                }
            })
            .collect();

        if signs.iter().all(|&s| s >= 0) {
            self.rows.push((coeffs, rhs));
            return;
        }

        let mut new_vertices: Vec<Vec<Rat>> = Vec::new();
        for (v, &s) in self.vertices.iter().zip(&signs) {
            if s >= 0 {
                new_vertices.push(v.clone());
            }
        }
        for (pi, p) in self.vertices.iter().enumerate() {
            if signs[pi] <= 0 {
                continue;
            }
            for (ni, n) in self.vertices.iter().enumerate() {
                if signs[ni] >= 0 {
                    continue;
                }
                if !self.is_edge(p, n) {
                    continue;
                }
                // theta in (0,1) solves value(p + theta (n - p)) = 0.
                let vp = value(p);
                let vn = value(n);
                let theta = &vp / (&vp - &vn);
                let crossing: Vec<Rat> = p
                    .iter()
                    .zip(n)
                    .map(|(a, b)| a + &theta * (b - a))
                    .collect();
                if !new_vertices.contains(&crossing) {
                    new_vertices.push(crossing);
                }
            }
        }
        self.vertices = new_vertices;
        self.rows.push((coeffs, rhs));
    }

    /// Two vertices span an edge iff the rows tight at both have rank
    /// `dims - 1`.
    fn is_edge(&self, a: &[Rat], b: &[Rat]) -> bool {
        let tight: Vec<Vec<Rat>> = self
            .rows
            .iter()
            .filter(|(c, r)| (dot(c, a) - r).is_zero() && (dot(c, b) - r).is_zero())
            .map(|(c, _)| c.clone())
            .collect();
        rank(&tight) == self.dims - 1
    }
}

/// Whether `point` lies in the convex hull of `vertices`, decided by an
/// exact feasibility LP over the combination weights.
pub fn in_convex_hull(point: &[Rat], vertices: &[Vec<Rat>]) -> bool {
    if vertices.is_empty() {
        return false;
    }
    let k = vertices.len();
    let dims = point.len();
    let mut rows: Vec<Constraint> = Vec::new();
    for i in 0..k {
        let mut c = vec![Rat::zero(); k];
        c[i] = Rat::one();
        rows.push(Constraint::ge(c, Rat::zero(), format!("w{}", i)));
    }
    rows.push(Constraint::eq(
        vec![Rat::one(); k],
        Rat::one(),
        "w-total",
    ));
    for d in 0..dims {
        let coeffs: Vec<Rat> = vertices.iter().map(|v| v[d].clone()).collect();
        rows.push(Constraint::eq(coeffs, point[d].clone(), format!("c{}", d)));
    }
    let zero = vec![Rat::zero(); k];
    matches!(
        solve_lp(rows.iter(), k, &zero, Sense::Minimize),
        LpOutcome::Optimal { .. }
    )
}
