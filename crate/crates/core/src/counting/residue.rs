//! Solution sets of polynomial systems over a finite field.
//!
//! The solver peels off blocks of variables in which every remaining
//! equation is affine, solves those blocks by linear algebra, and enumerates
//! what is left by depth-first search that checks each equation as soon as
//! its variables are assigned. Jet systems, hypersurfaces with a linear
//! variable and determinant equations all reduce to a small search this way.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use super::tally::Tally;
use crate::error::{Error, Result};
use crate::linalg::{for_each_affine_point, FieldSolver};
use crate::par;
use crate::polys::{CompiledPoly, IntPoly, Monomial, PolySystem};
use crate::rings::{LocalRing, RingElement};

/// One affine block: `sum_v coeff[e][v] * x_v + constant[e] = 0`.
#[derive(Debug, Clone)]
struct LinearStage {
    vars: Vec<usize>,
    coeffs: Vec<Vec<CompiledPoly>>,
    constants: Vec<CompiledPoly>,
}

/// Evaluation plan for one system over one field.
#[derive(Debug, Clone)]
pub struct FieldPlan {
    nvars: usize,
    /// An equation reduced to a nonzero constant: no solutions at all.
    inconsistent: bool,
    base_vars: Vec<usize>,
    base_eqs: Vec<CompiledPoly>,
    /// `schedule[k]`: base equations whose variables are all among
    /// `base_vars[..=k]`.
    schedule: Vec<Vec<usize>>,
    /// Innermost first.
    stages: Vec<LinearStage>,
    free_vars: Vec<usize>,
}

fn reduce_mod(p: &IntPoly, modulus: u64) -> IntPoly {
    let m = BigInt::from(modulus);
    IntPoly::from_terms(
        p.vars().clone(),
        p.terms()
            .map(|(mono, c)| (mono.0.clone(), c % &m))
            .filter(|(_, c)| !c.is_zero()),
    )
}

fn support_set(p: &IntPoly) -> BTreeSet<usize> {
    p.support().into_iter().collect()
}

/// Greedy maximal set of variables in which every equation is jointly
/// affine.
fn linear_block(eqs: &[IntPoly], vars: &BTreeSet<usize>) -> Vec<usize> {
    let occurring: BTreeSet<usize> = eqs.iter().flat_map(support_set).collect();
    let candidates: Vec<usize> = vars
        .iter()
        .copied()
        .filter(|v| occurring.contains(v) && eqs.iter().all(|e| e.degree_in(*v) <= 1))
        .collect();
    let mut chosen: Vec<usize> = Vec::new();
    for &v in candidates.iter().rev() {
        let compatible = eqs.iter().all(|e| {
            e.terms().all(|(m, _)| m.0[v] == 0 || chosen.iter().all(|&u| m.0[u] == 0))
        });
        if compatible {
            chosen.push(v);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Splits `e` as `sum_v a_v x_v + b` for the block `block`.
fn split_affine(e: &IntPoly, block: &[usize]) -> (Vec<IntPoly>, IntPoly) {
    let vars = e.vars().clone();
    let mut coeff_terms: Vec<Vec<(Vec<u32>, BigInt)>> = vec![Vec::new(); block.len()];
    let mut const_terms = Vec::new();
    for (m, c) in e.terms() {
        match block.iter().position(|&v| m.0[v] > 0) {
            Some(k) => {
                let mut m2: Monomial = m.clone();
                m2.0[block[k]] -= 1;
                coeff_terms[k].push((m2.0, c.clone()));
            }
            None => const_terms.push((m.0.clone(), c.clone())),
        }
    }
    (
        coeff_terms
            .into_iter()
            .map(|t| IntPoly::from_terms(vars.clone(), t))
            .collect(),
        IntPoly::from_terms(vars, const_terms),
    )
}

impl FieldPlan {
    pub fn new(system: &PolySystem, field: &LocalRing) -> Self {
        debug_assert_eq!(field.length(), 1);
        let n = system.nvars();
        let eqs: Vec<IntPoly> = system
            .polys()
            .iter()
            .map(|p| reduce_mod(p, field.p()))
            .filter(|p| !p.is_zero())
            .collect();
        let inconsistent = eqs.iter().any(|p| p.support().is_empty());
        let occurring: BTreeSet<usize> = eqs.iter().flat_map(support_set).collect();
        let free_vars: Vec<usize> = (0..n).filter(|v| !occurring.contains(v)).collect();

        let mut remaining_vars = occurring.clone();
        let mut remaining_eqs = eqs;
        let mut stages_outer_first = Vec::new();
        loop {
            if remaining_eqs.is_empty() {
                break;
            }
            let block = linear_block(&remaining_eqs, &remaining_vars);
            if block.is_empty() {
                break;
            }
            let (involved, rest): (Vec<IntPoly>, Vec<IntPoly>) = remaining_eqs
                .into_iter()
                .partition(|e| block.iter().any(|&v| e.degree_in(v) > 0));
            let mut coeffs = Vec::new();
            let mut constants = Vec::new();
            for e in &involved {
                let (a, b) = split_affine(e, &block);
                coeffs.push(a.iter().map(|p| CompiledPoly::new(p, field)).collect());
                constants.push(CompiledPoly::new(&b, field));
            }
            stages_outer_first.push(LinearStage {
                vars: block.clone(),
                coeffs,
                constants,
            });
            for v in &block {
                remaining_vars.remove(v);
            }
            remaining_eqs = rest;
        }
        stages_outer_first.reverse();

        // order base variables so that small equations close early
        let mut order: Vec<&IntPoly> = remaining_eqs.iter().collect();
        order.sort_by_key(|e| e.support().len());
        let mut base_vars: Vec<usize> = Vec::new();
        for e in &order {
            for v in e.support() {
                if remaining_vars.contains(&v) && !base_vars.contains(&v) {
                    base_vars.push(v);
                }
            }
        }
        for &v in &remaining_vars {
            if !base_vars.contains(&v) {
                base_vars.push(v);
            }
        }
        let mut schedule = vec![Vec::new(); base_vars.len()];
        let mut base_eqs = Vec::new();
        for e in remaining_eqs.iter().filter(|e| !e.support().is_empty()) {
            let last = e
                .support()
                .iter()
                .map(|v| base_vars.iter().position(|b| b == v).expect("base var"))
                .max()
                .expect("nonempty support");
            schedule[last].push(base_eqs.len());
            base_eqs.push(CompiledPoly::new(e, field));
        }
        FieldPlan {
            nvars: n,
            inconsistent,
            base_vars,
            base_eqs,
            schedule,
            stages: stages_outer_first,
            free_vars,
        }
    }

    /// Size of the base search space, `q^(#base vars)`, if it fits.
    pub fn search_size(&self, field: &LocalRing) -> Option<u64> {
        field.cardinality().checked_pow(self.base_vars.len() as u32)
    }

    pub fn check_budget(&self, field: &LocalRing, budget: u64) -> Result<()> {
        match self.search_size(field) {
            Some(s) if s <= budget => Ok(()),
            _ => Err(Error::budget(format!(
                "residue search over F_{} in {} variables exceeds budget {}",
                field.cardinality(),
                self.base_vars.len(),
                budget
            ))),
        }
    }

    /// Number of solutions over the field.
    pub fn count(&self, field: &LocalRing) -> Tally {
        if self.inconsistent {
            return Tally::new();
        }
        let q = field.cardinality();
        let free = self.free_vars.len() as u64;
        self.fold_base(field, |point, tally: &mut Tally| {
            self.count_stages(field, point, 0, free, q, tally);
        })
    }

    /// Folds `visit` over every solution, in parallel over the top of the
    /// search tree. `visit` receives full points (free variables included).
    pub fn fold_solutions<F>(&self, field: &LocalRing, visit: F) -> Result<Tally>
    where
        F: Fn(&[RingElement], &mut Tally) -> Result<()> + Sync + Send,
    {
        if self.inconsistent {
            return Ok(Tally::new());
        }
        let error: std::sync::Mutex<Option<Error>> = std::sync::Mutex::new(None);
        let tally = self.fold_base(field, |point, tally: &mut Tally| {
            if error.lock().expect("poisoned").is_some() {
                return;
            }
            let mut failed = None;
            self.enumerate_stages(field, point, 0, &mut |full: &mut Vec<RingElement>| {
                if failed.is_some() {
                    return;
                }
                self.enumerate_free(field, full, 0, &mut |pt| {
                    if failed.is_none() {
                        if let Err(e) = visit(pt, tally) {
                            failed = Some(e);
                        }
                    }
                });
            });
            if let Some(e) = failed {
                let mut slot = error.lock().expect("poisoned");
                if slot.is_none() {
                    *slot = Some(e);
                }
            }
        });
        match error.into_inner().expect("poisoned") {
            Some(e) => Err(e),
            None => Ok(tally),
        }
    }

    /// Runs the base search; `leaf` is called once per base solution with a
    /// point whose base variables are set.
    fn fold_base<L>(&self, field: &LocalRing, leaf: L) -> Tally
    where
        L: Fn(&mut Vec<RingElement>, &mut Tally) + Sync + Send,
    {
        let q = field.cardinality();
        // split the first few levels into independent tasks
        let mut split = 0usize;
        let mut tasks: u64 = 1;
        while split < self.base_vars.len() && tasks < 256 {
            match tasks.checked_mul(q) {
                Some(t) if t <= 1 << 20 => {
                    tasks = t;
                    split += 1;
                }
                _ => break,
            }
        }
        par::map_reduce(
            tasks as usize,
            Tally::new(),
            |task| {
                let mut tally = Tally::new();
                let mut point = vec![field.zero(); self.nvars];
                let mut idx = task as u64;
                for k in 0..split {
                    point[self.base_vars[k]] = RingElement::from_index(idx % q);
                    idx /= q;
                    if !self.schedule[k]
                        .iter()
                        .all(|&e| field.is_zero(self.base_eqs[e].eval(field, &point)))
                    {
                        return tally;
                    }
                }
                self.search(field, &mut point, split, &leaf, &mut tally);
                tally
            },
            Tally::merge,
        )
    }

    fn search<L>(&self, field: &LocalRing, point: &mut Vec<RingElement>, depth: usize, leaf: &L, tally: &mut Tally)
    where
        L: Fn(&mut Vec<RingElement>, &mut Tally),
    {
        if depth == self.base_vars.len() {
            leaf(point, tally);
            return;
        }
        let v = self.base_vars[depth];
        let checks = &self.schedule[depth];
        for x in 0..field.cardinality() {
            point[v] = RingElement::from_index(x);
            if checks
                .iter()
                .all(|&e| field.is_zero(self.base_eqs[e].eval(field, point)))
            {
                self.search(field, point, depth + 1, leaf, tally);
            }
        }
        point[v] = field.zero();
    }

    fn stage_system(
        &self,
        field: &LocalRing,
        stage: &LinearStage,
        point: &[RingElement],
    ) -> (FieldSolver, Vec<RingElement>) {
        let matrix: Vec<Vec<RingElement>> = stage
            .coeffs
            .iter()
            .map(|row| row.iter().map(|a| a.eval(field, point)).collect())
            .collect();
        let rhs: Vec<RingElement> = stage
            .constants
            .iter()
            .map(|b| field.neg(b.eval(field, point)))
            .collect();
        (FieldSolver::new(field, &matrix, stage.vars.len()), rhs)
    }

    fn count_stages(
        &self,
        field: &LocalRing,
        point: &mut Vec<RingElement>,
        k: usize,
        free: u64,
        q: u64,
        tally: &mut Tally,
    ) {
        if k == self.stages.len() {
            tally.add_pow(q, free);
            return;
        }
        let stage = &self.stages[k];
        let (solver, rhs) = self.stage_system(field, stage, point);
        let Some(particular) = solver.solve(field, &rhs) else {
            return;
        };
        if k + 1 == self.stages.len() {
            tally.add_pow(q, free + solver.nullity() as u64);
            return;
        }
        let basis = solver.kernel_basis(field);
        for_each_affine_point(field, &particular, &basis, |sol| {
            for (i, &v) in stage.vars.iter().enumerate() {
                point[v] = sol[i];
            }
            self.count_stages(field, point, k + 1, free, q, tally);
        });
        for &v in &stage.vars {
            point[v] = field.zero();
        }
    }

    fn enumerate_stages(
        &self,
        field: &LocalRing,
        point: &mut Vec<RingElement>,
        k: usize,
        visit: &mut dyn FnMut(&mut Vec<RingElement>),
    ) {
        if k == self.stages.len() {
            visit(point);
            return;
        }
        let stage = &self.stages[k];
        let (solver, rhs) = self.stage_system(field, stage, point);
        let Some(particular) = solver.solve(field, &rhs) else {
            return;
        };
        let basis = solver.kernel_basis(field);
        for_each_affine_point(field, &particular, &basis, |sol| {
            for (i, &v) in stage.vars.iter().enumerate() {
                point[v] = sol[i];
            }
            self.enumerate_stages(field, point, k + 1, visit);
        });
        for &v in &stage.vars {
            point[v] = field.zero();
        }
    }

    fn enumerate_free(
        &self,
        field: &LocalRing,
        point: &mut Vec<RingElement>,
        k: usize,
        visit: &mut dyn FnMut(&[RingElement]),
    ) {
        if k == self.free_vars.len() {
            visit(point);
            return;
        }
        let v = self.free_vars[k];
        for x in 0..field.cardinality() {
            point[v] = RingElement::from_index(x);
            self.enumerate_free(field, point, k + 1, visit);
        }
        point[v] = field.zero();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polys::{parse_system, vars_from};
    use crate::rings::make_ring;

    fn brute(system: &PolySystem, field: &LocalRing) -> u64 {
        let compiled = system.compile(field);
        let n = system.nvars();
        let q = field.cardinality();
        let mut count = 0;
        for idx in 0..q.pow(n as u32) {
            let mut v = idx;
            let pt: Vec<RingElement> = (0..n)
                .map(|_| {
                    let x = v % q;
                    v /= q;
                    RingElement::from_index(x)
                })
                .collect();
            count += compiled.is_zero_at(field, &pt) as u64;
        }
        count
    }

    #[test]
    fn agrees_with_brute_force() {
        let cases: Vec<(Vec<&str>, Vec<&str>)> = vec![
            (vec!["x", "y", "z"], vec!["x*y - z^2"]),
            (vec!["x", "y"], vec!["y^2 - x^3"]),
            (vec!["a", "b", "c", "d"], vec!["a*d - b*c - 1"]),
            (vec!["x", "y"], vec!["x*y"]),
            (vec!["x", "y", "z"], vec!["x + y*z", "x*y - 1"]),
            (vec!["x", "y", "z"], vec!["x^2 + y^2 + z^2 - 1", "x - y"]),
            (vec!["x", "y"], vec![]),
            (vec!["x", "y"], vec!["3"]),
            (vec!["x", "y"], vec!["6*x*y - y"]),
        ];
        for field_spec in ["mixed:3^1:1", "mixed:5^1:1", "equal:2^2:1", "mixed:3^2:1"] {
            let field = make_ring(field_spec.parse().unwrap()).unwrap();
            for (vars, polys) in &cases {
                let sys = parse_system(&vars_from(vars), polys).unwrap();
                let plan = FieldPlan::new(&sys, &field);
                let expected = brute(&sys, &field);
                assert_eq!(
                    plan.count(&field).value(),
                    expected.into(),
                    "{polys:?} over {field_spec}"
                );
                let listed = plan
                    .fold_solutions(&field, |pt, t| {
                        assert!(sys.compile(&field).is_zero_at(&field, pt));
                        t.add_u128(1);
                        Ok(())
                    })
                    .unwrap();
                assert_eq!(listed.value(), expected.into());
            }
        }
    }

    #[test]
    fn jet_system_counted_by_blocks() {
        let sys = parse_system(&vars_from(&["x", "y", "z"]), &["x*y - z^2"]).unwrap();
        let jet = sys.jet_expand(2);
        let field = make_ring("mixed:3^1:1".parse().unwrap()).unwrap();
        let plan = FieldPlan::new(&jet, &field);
        assert!(!plan.stages.is_empty());
        assert_eq!(plan.count(&field).value(), brute(&jet, &field).into());
    }

    #[test]
    fn cone_plan_searches_two_variables() {
        let sys = parse_system(&vars_from(&["x", "y", "z"]), &["x*y - z^2"]).unwrap();
        let field = make_ring("mixed:101^1:1".parse().unwrap()).unwrap();
        let plan = FieldPlan::new(&sys, &field);
        assert_eq!(plan.base_vars.len(), 2);
        assert_eq!(plan.count(&field).value(), (101u64 * 101).into());
    }
}
