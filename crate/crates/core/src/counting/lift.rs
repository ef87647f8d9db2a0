//! Level-by-level Hensel lifting.
//!
//! A point mod `pi^(k+1)` above `x` mod `pi^k` has the form `x + pi^k v`, and
//! for `k >= 1` the Taylor expansion is exact to first order:
//! `f(x + pi^k v) = f(x) + pi^k J(x) v (mod pi^(k+1))`. The Jacobian mod `pi`
//! depends only on the residue point, so each residue solution gets one
//! solver that serves its whole subtree.

use std::sync::atomic::{AtomicU64, Ordering};

use super::residue::FieldPlan;
use super::tally::Tally;
use crate::error::{Error, Result};
use crate::linalg::FieldSolver;
use crate::polys::{CompiledPoly, PolySystem};
use crate::rings::{LocalRing, RingElement};

pub(crate) struct Lifter<'a> {
    ring: &'a LocalRing,
    field: LocalRing,
    polys: Vec<CompiledPoly>,
    jacobian: Vec<Vec<CompiledPoly>>,
    plan: FieldPlan,
    nvars: usize,
    node_budget: u64,
    nodes: AtomicU64,
}

impl<'a> Lifter<'a> {
    pub(crate) fn new(system: &PolySystem, ring: &'a LocalRing, node_budget: u64) -> Self {
        let field = ring.residue_field();
        // equations vanishing identically on R carry no information
        let kept: Vec<usize> = (0..system.len())
            .filter(|&i| !CompiledPoly::new(&system.polys()[i], ring).is_zero())
            .collect();
        let polys = kept
            .iter()
            .map(|&i| CompiledPoly::new(&system.polys()[i], ring))
            .collect();
        let jac = system.jacobian();
        let jacobian = kept
            .iter()
            .map(|&i| jac[i].iter().map(|d| CompiledPoly::new(d, &field)).collect())
            .collect();
        let plan = FieldPlan::new(system, &field);
        Lifter {
            ring,
            field,
            polys,
            jacobian,
            plan,
            nvars: system.nvars(),
            node_budget,
            nodes: AtomicU64::new(0),
        }
    }

    pub(crate) fn check_budget(&self, residue_budget: u64) -> Result<()> {
        self.plan.check_budget(&self.field, residue_budget)
    }

    pub(crate) fn count(&self) -> Result<Tally> {
        let m = self.ring.length();
        if m == 1 {
            return Ok(self.plan.count(&self.field));
        }
        let q = self.field.cardinality();
        let n = self.nvars as u64;
        let l = self.polys.len() as u64;
        self.plan.fold_solutions(&self.field, |residue_point, tally| {
            let matrix: Vec<Vec<RingElement>> = self
                .jacobian
                .iter()
                .map(|row| row.iter().map(|d| d.eval(&self.field, residue_point)).collect())
                .collect();
            let solver = FieldSolver::new(&self.field, &matrix, self.nvars);
            if solver.rank() as u64 == l {
                tally.add_pow(q, (n - l) * (m as u64 - 1));
                return Ok(());
            }
            let basis = solver.kernel_basis(&self.field);
            let mut x: Vec<RingElement> = residue_point
                .iter()
                .map(|&r| self.ring.embed_digit(r, 0))
                .collect();
            self.descend(&solver, &basis, &mut x, 1, tally)
        })
    }

    fn descend(
        &self,
        solver: &FieldSolver,
        basis: &[Vec<RingElement>],
        x: &mut Vec<RingElement>,
        k: usize,
        tally: &mut Tally,
    ) -> Result<()> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.node_budget {
            return Err(Error::budget(format!(
                "lifting tree exceeds {} nodes",
                self.node_budget
            )));
        }
        let ring = self.ring;
        let rhs: Vec<RingElement> = self
            .polys
            .iter()
            .map(|p| {
                let v = p.eval(ring, x);
                debug_assert!(ring.valuation(v) >= k);
                self.field.neg(ring.digit(v, k))
            })
            .collect();
        if k + 1 == ring.length() {
            if solver.is_consistent(&self.field, &rhs) {
                tally.add_pow(self.field.cardinality(), solver.nullity() as u64);
            }
            return Ok(());
        }
        let Some(particular) = solver.solve(&self.field, &rhs) else {
            return Ok(());
        };
        let base = x.clone();
        let mut result = Ok(());
        crate::linalg::for_each_affine_point(&self.field, &particular, basis, |v| {
            if result.is_err() {
                return;
            }
            for i in 0..self.nvars {
                x[i] = ring.add(base[i], ring.embed_digit(v[i], k));
            }
            result = self.descend(solver, basis, x, k + 1, tally);
        });
        x.copy_from_slice(&base);
        result
    }
}
