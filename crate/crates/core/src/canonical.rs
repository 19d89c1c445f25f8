//! Canonical frames, canonical SCMs, the independent-canonical construction,
//! and exact min/max bounds of counterfactual queries over all canonical SCMs.
//!
//! A canonical frame augments a causal model with one response variable per
//! endogenous variable, ranging over every function from parent assignments
//! to child values. Any response distribution whose marginal sums match the
//! conditional tables yields an SCM inducing the model; the set of such
//! distributions is a polytope per variable, and query extremes over the
//! family are attained at products of polytope vertices.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::assign::{Assignment, Atom};
use crate::dag::Dag;
use crate::error::{Caps, Error, Result};
use crate::model::CausalModel;
use crate::prob::ExactProb;
use crate::scm::{EquationTable, Scm};
use crate::signature::Signature;
use crate::space::Space;

/// One mechanism function: the child's value index at every assignment of
/// its parents (indexed through the parent space).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ResponseFunction {
    table: Vec<usize>,
}

impl ResponseFunction {
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn value_at(&self, pa_index: usize) -> usize {
        self.table[pa_index]
    }

    /// Label used as the response variable's range entry: the child value
    /// labels in parent-space order, joined by `|`.
    pub fn label(&self, child_range: &[String]) -> String {
        self.table
            .iter()
            .map(|&v| child_range[v].as_str())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// The canonical frame of a model: its signature and graph augmented with
/// one response root per endogenous variable.
#[derive(Debug, Clone)]
pub struct CanonicalFrame {
    base: CausalModel,
    signature: Signature,
    dag: Dag,
    /// Endogenous variable -> name of its response variable.
    response_vars: BTreeMap<String, String>,
    /// Endogenous variable -> all response functions, in range order.
    response_functions: BTreeMap<String, Vec<ResponseFunction>>,
}

impl CanonicalFrame {
    pub fn base(&self) -> &CausalModel {
        &self.base
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn response_var(&self, endogenous: &str) -> Result<&str> {
        self.response_vars
            .get(endogenous)
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownVariable(endogenous.to_string()))
    }

    pub fn response_functions(&self, endogenous: &str) -> Result<&[ResponseFunction]> {
        self.response_functions
            .get(endogenous)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownVariable(endogenous.to_string()))
    }

    /// The index of the response function with the given table.
    pub fn function_index(&self, endogenous: &str, table: &[usize]) -> Result<usize> {
        self.response_functions(endogenous)?
            .iter()
            .position(|f| f.table() == table)
            .ok_or_else(|| Error::InvalidModel("no such response function".into()))
    }
}

/// Builds the canonical frame. Fails loudly when some variable would need
/// more response functions than the cap allows.
pub fn canonical_frame(model: &CausalModel, caps: &Caps) -> Result<CanonicalFrame> {
    let sig = model.signature();
    let mut response_vars = BTreeMap::new();
    let mut response_functions = BTreeMap::new();
    let mut exo: Vec<(String, Vec<String>)> = sig
        .exogenous()
        .iter()
        .map(|u| (u.clone(), sig.range(u).unwrap().to_vec()))
        .collect();
    let mut taken: BTreeSet<String> = sig.all_vars().map(str::to_string).collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    for x in sig.endogenous() {
        for p in model.dag().parents(x)? {
            edges.push((p.clone(), x.clone()));
        }
    }
    for x in sig.endogenous() {
        let child_range = sig.range(x)?;
        let pa_space = model.cpd(x)?.pa_space();
        let count = (child_range.len() as u128).checked_pow(pa_space.size() as u32);
        match count {
            Some(c) if c <= caps.max_response_functions as u128 => {}
            _ => {
                return Err(Error::ModelTooLarge {
                    states: count.unwrap_or(u128::MAX),
                    cap: caps.max_response_functions as u128,
                });
            }
        }
        let functions = enumerate_functions(pa_space.size(), child_range.len());
        let mut name = format!("U_{}", x);
        while taken.contains(&name) {
            name.push('\'');
        }
        taken.insert(name.clone());
        let labels: Vec<String> = functions.iter().map(|f| f.label(child_range)).collect();
        exo.push((name.clone(), labels));
        edges.push((name.clone(), x.clone()));
        response_vars.insert(x.clone(), name);
        response_functions.insert(x.clone(), functions);
    }
    let endo: Vec<(String, Vec<String>)> = sig
        .endogenous()
        .iter()
        .map(|x| (x.clone(), sig.range(x).unwrap().to_vec()))
        .collect();
    let signature = Signature::new(exo, endo)?;
    let nodes: Vec<String> = signature.all_vars().map(str::to_string).collect();
    let dag = Dag::new(nodes, &edges)?;
    Ok(CanonicalFrame {
        base: model.clone(),
        signature,
        dag,
        response_vars,
        response_functions,
    })
}

/// All functions from a parent space of `pa_size` assignments into a child
/// range of `arity` values, enumerated with the first parent assignment as
/// the most significant digit.
fn enumerate_functions(pa_size: usize, arity: usize) -> Vec<ResponseFunction> {
    let total = arity.pow(pa_size as u32);
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut table = vec![0usize; pa_size];
        for slot in (0..pa_size).rev() {
            table[slot] = code % arity;
            code /= arity;
        }
        out.push(ResponseFunction { table });
    }
    out
}

/// Builds the canonical SCM for a frame from one response distribution per
/// endogenous variable (masses aligned with the frame's function order).
/// The distribution must satisfy the response polytope exactly: for every
/// `(value, parent assignment)` row, the mass of the functions mapping that
/// parent assignment to that value must equal the base conditional.
pub fn canonical_scm(
    frame: &CanonicalFrame,
    response_dists: &BTreeMap<String, Vec<ExactProb>>,
) -> Result<Scm> {
    let base_sig = frame.base.signature();
    for x in base_sig.endogenous() {
        let functions = frame.response_functions(x)?;
        let dist = response_dists.get(x).ok_or_else(|| {
            Error::InvalidModel(format!("missing response distribution for `{}`", x))
        })?;
        if dist.len() != functions.len() {
            return Err(Error::InvalidModel(format!(
                "response distribution for `{}` has the wrong arity",
                x
            )));
        }
        let table = frame.base.cpd(x)?;
        let child_range = base_sig.range(x)?;
        for pa in 0..table.pa_space().size() {
            let row = table.row_at(pa);
            for (value_idx, expected) in row.iter().enumerate() {
                let got: ExactProb = functions
                    .iter()
                    .zip(dist)
                    .filter(|(f, _)| f.value_at(pa) == value_idx)
                    .map(|(_, p)| p.clone())
                    .sum();
                if got != *expected {
                    return Err(Error::ResponseConstraintViolated {
                        variable: x.clone(),
                        value: child_range[value_idx].clone(),
                        parents: table
                            .pa_space()
                            .decode(&table.pa_space().indices_at(pa))
                            .to_string(),
                        expected: expected.to_string(),
                        got: got.to_string(),
                    });
                }
            }
        }
    }

    let sig = &frame.signature;
    let mut priors: BTreeMap<String, Vec<ExactProb>> = BTreeMap::new();
    for u in base_sig.exogenous() {
        priors.insert(u.clone(), frame.base.prior(u)?.to_vec());
    }
    for x in base_sig.endogenous() {
        priors.insert(
            frame.response_var(x)?.to_string(),
            response_dists[x].clone(),
        );
    }

    let mut equations: BTreeMap<String, EquationTable> = BTreeMap::new();
    for x in base_sig.endogenous() {
        let parents = frame.dag.parents(x)?.to_vec();
        let pa_space = Space::new(
            parents
                .iter()
                .map(|p| (p.clone(), sig.range(p).unwrap().to_vec()))
                .collect(),
            u128::MAX,
        )?;
        let response_var = frame.response_var(x)?;
        let response_pos = parents.iter().position(|p| p == response_var).unwrap();
        let base_table = frame.base.cpd(x)?;
        let base_parents = base_table.parents();
        let base_positions: Vec<usize> = base_parents
            .iter()
            .map(|p| parents.iter().position(|q| q == p).unwrap())
            .collect();
        let functions = frame.response_functions(x)?;
        let mut table = Vec::with_capacity(pa_space.size());
        let mut scratch = Vec::with_capacity(base_parents.len());
        for idx in pa_space.iter_indices() {
            scratch.clear();
            scratch.extend(base_positions.iter().map(|&p| idx[p]));
            let base_pa = base_table.pa_space().index_of(&scratch);
            let f = &functions[idx[response_pos]];
            table.push(f.value_at(base_pa));
        }
        equations.insert(
            x.clone(),
            EquationTable::from_parts(parents, pa_space, table)?,
        );
    }
    Scm::new(sig.clone(), frame.dag.clone(), equations, priors)
}

/// The independent canonical SCM: the response distribution of each
/// variable is the product, over parent assignments, of the base
/// conditional of the value the function assigns there.
pub fn independent_canonical(model: &CausalModel, caps: &Caps) -> Result<Scm> {
    let frame = canonical_frame(model, caps)?;
    let dists = independent_response_dists(&frame)?;
    canonical_scm(&frame, &dists)
}

/// The product-form response distributions shared by the independent
/// canonical construction and the product-form canonical SCM.
pub fn independent_response_dists(
    frame: &CanonicalFrame,
) -> Result<BTreeMap<String, Vec<ExactProb>>> {
    let mut out = BTreeMap::new();
    for x in frame.base.signature().endogenous() {
        let table = frame.base.cpd(x)?;
        let masses: Vec<ExactProb> = frame
            .response_functions(x)?
            .iter()
            .map(|f| {
                let mut p = ExactProb::one();
                for (pa, &value) in f.table().iter().enumerate() {
                    p = p * &table.row_at(pa)[value];
                    if p.is_zero() {
                        break;
                    }
                }
                p
            })
            .collect();
        out.insert(x.clone(), masses);
    }
    Ok(out)
}

/// The linear constraint system a response distribution for one variable
/// must satisfy: nonnegativity plus, for every `(value, parent assignment)`
/// row, a marginal-sum equality against the base conditional table.
#[derive(Debug, Clone)]
pub struct ResponsePolytope {
    variable: String,
    n_unknowns: usize,
    /// Rows as (indicator over functions, right-hand side).
    rows: Vec<(Vec<bool>, ExactProb)>,
}

impl ResponsePolytope {
    pub fn for_variable(frame: &CanonicalFrame, variable: &str) -> Result<Self> {
        let functions = frame.response_functions(variable)?;
        let table = frame.base.cpd(variable)?;
        let mut rows = Vec::new();
        let arity = frame.base.signature().range(variable)?.len();
        for pa in 0..table.pa_space().size() {
            for value_idx in 0..arity {
                let indicator: Vec<bool> = functions
                    .iter()
                    .map(|f| f.value_at(pa) == value_idx)
                    .collect();
                rows.push((indicator, table.row_at(pa)[value_idx].clone()));
            }
        }
        Ok(ResponsePolytope {
            variable: variable.to_string(),
            n_unknowns: functions.len(),
            rows,
        })
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn n_unknowns(&self) -> usize {
        self.n_unknowns
    }

    /// Whether a mass vector satisfies every row exactly.
    pub fn contains(&self, masses: &[ExactProb]) -> bool {
        if masses.len() != self.n_unknowns {
            return false;
        }
        self.rows.iter().all(|(indicator, rhs)| {
            let sum: ExactProb = indicator
                .iter()
                .zip(masses)
                .filter(|(on, _)| **on)
                .map(|(_, p)| p.clone())
                .sum();
            sum == *rhs
        })
    }
}

/// Enumerates the exact vertex set of a response polytope as basic feasible
/// solutions of its equality system, deduplicated and sorted.
pub fn polytope_vertices(polytope: &ResponsePolytope, caps: &Caps) -> Result<Vec<Vec<ExactProb>>> {
    let n = polytope.n_unknowns;
    // Row-reduce the augmented system to find its rank and an independent
    // row basis.
    let mut matrix: Vec<Vec<BigRational>> = polytope
        .rows
        .iter()
        .map(|(indicator, rhs)| {
            let mut row: Vec<BigRational> = indicator
                .iter()
                .map(|&on| {
                    if on {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect();
            row.push(rhs.ratio().clone());
            row
        })
        .collect();
    let rank = reduce_rows(&mut matrix);
    let reduced: Vec<Vec<BigRational>> = matrix.into_iter().take(rank).collect();

    let candidates = binomial(n as u128, rank as u128);
    if candidates > caps.max_basis_candidates {
        return Err(Error::VertexCapExceeded {
            detail: format!(
                "{} candidate bases for `{}` exceed the cap of {}",
                candidates, polytope.variable, caps.max_basis_candidates
            ),
        });
    }

    let mut vertices: BTreeSet<Vec<ExactProb>> = BTreeSet::new();
    let mut columns: Vec<usize> = (0..rank).collect();
    loop {
        if let Some(solution) = solve_basis(&reduced, &columns, n) {
            if solution.iter().all(|x| !x.is_negative()) {
                let vertex: Vec<ExactProb> = solution
                    .into_iter()
                    .map(|x| ExactProb::from_ratio(x).expect("feasible masses lie in [0,1]"))
                    .collect();
                vertices.insert(vertex);
            }
        }
        if !next_combination(&mut columns, n) {
            break;
        }
    }
    Ok(vertices.into_iter().collect())
}

/// In-place Gauss-Jordan reduction; returns the rank. The last column is
/// the right-hand side and is never chosen as a pivot.
fn reduce_rows(matrix: &mut [Vec<BigRational>]) -> usize {
    let rows = matrix.len();
    if rows == 0 {
        return 0;
    }
    let cols = matrix[0].len() - 1;
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(src) = (pivot_row..rows).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(pivot_row, src);
        let inv = matrix[pivot_row][col].clone();
        for entry in matrix[pivot_row].iter_mut() {
            *entry /= inv.clone();
        }
        for r in 0..rows {
            if r != pivot_row && !matrix[r][col].is_zero() {
                let factor = matrix[r][col].clone();
                for c in 0..=cols {
                    let delta = &factor * &matrix[pivot_row][c];
                    matrix[r][c] -= delta;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    pivot_row
}

/// Solves the reduced system restricted to the chosen columns; `None` when
/// the column basis is singular. The returned vector is over all `n`
/// unknowns, zero outside the basis.
fn solve_basis(
    reduced: &[Vec<BigRational>],
    columns: &[usize],
    n: usize,
) -> Option<Vec<BigRational>> {
    let r = reduced.len();
    debug_assert_eq!(columns.len(), r);
    let mut m: Vec<Vec<BigRational>> = reduced
        .iter()
        .map(|row| {
            let mut sub: Vec<BigRational> = columns.iter().map(|&c| row[c].clone()).collect();
            sub.push(row[row.len() - 1].clone());
            sub
        })
        .collect();
    // Gaussian elimination with exact pivots.
    for col in 0..r {
        let src = (col..r).find(|&row| !m[row][col].is_zero())?;
        m.swap(col, src);
        let inv = m[col][col].clone();
        for entry in m[col].iter_mut() {
            *entry /= inv.clone();
        }
        for row in 0..r {
            if row != col && !m[row][col].is_zero() {
                let factor = m[row][col].clone();
                for c in 0..=r {
                    let delta = &factor * &m[col][c];
                    m[row][c] -= delta;
                }
            }
        }
    }
    let mut full = vec![BigRational::zero(); n];
    for (i, &c) in columns.iter().enumerate() {
        full[c] = m[i][r].clone();
    }
    Some(full)
}

fn next_combination(columns: &mut [usize], n: usize) -> bool {
    let r = columns.len();
    if r == 0 {
        return false;
    }
    let mut i = r;
    while i > 0 {
        i -= 1;
        if columns[i] < n - (r - i) {
            columns[i] += 1;
            for j in i + 1..r {
                columns[j] = columns[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    let out = num / den;
    out.try_into().unwrap_or(u128::MAX)
}

/// Exact bounds of a counterfactual query over every canonical SCM of the
/// model: the query value is evaluated at every product of per-variable
/// polytope vertices and the minimum and maximum are returned. Conditional
/// queries are restricted to the canonical SCMs under which the evidence
/// has positive probability; if there are none the conditional is
/// undefined.
pub fn bound_query(
    model: &CausalModel,
    atoms: &[Atom],
    given: Option<&Assignment>,
    caps: &Caps,
) -> Result<(ExactProb, ExactProb)> {
    if let Some(given) = given {
        for (var, _) in given.iter() {
            if !model.signature().is_endogenous(var) {
                return Err(Error::Unsupported(
                    "bounds accept endogenous evidence only".into(),
                ));
            }
        }
    }
    let frame = canonical_frame(model, caps)?;
    let endo: Vec<String> = model.signature().endogenous().to_vec();
    let mut vertex_sets = Vec::with_capacity(endo.len());
    let mut products: u128 = 1;
    for x in &endo {
        let polytope = ResponsePolytope::for_variable(&frame, x)?;
        let vertices = polytope_vertices(&polytope, caps)?;
        debug_assert!(!vertices.is_empty(), "response polytope is never empty");
        products = products.saturating_mul(vertices.len() as u128);
        if products > caps.max_vertex_products {
            return Err(Error::VertexCapExceeded {
                detail: format!(
                    "vertex products exceed the cap of {}",
                    caps.max_vertex_products
                ),
            });
        }
        vertex_sets.push(vertices);
    }

    let mut lo: Option<ExactProb> = None;
    let mut hi: Option<ExactProb> = None;
    let mut choice = vec![0usize; endo.len()];
    loop {
        let dists: BTreeMap<String, Vec<ExactProb>> = endo
            .iter()
            .enumerate()
            .map(|(pos, x)| (x.clone(), vertex_sets[pos][choice[pos]].clone()))
            .collect();
        let scm = canonical_scm(&frame, &dists)?;
        let value = match given {
            None => Some(scm.complex_cf_with(atoms, caps)?),
            Some(given) => match scm.conditional_cf_with(atoms, given, caps) {
                Ok(v) => Some(v),
                Err(Error::UndefinedConditional) => None,
                Err(e) => return Err(e),
            },
        };
        if let Some(value) = value {
            match &mut lo {
                Some(lo) if *lo <= value => {}
                _ => lo = Some(value.clone()),
            }
            match &mut hi {
                Some(hi) if *hi >= value => {}
                _ => hi = Some(value),
            }
        }
        // Advance the mixed-radix product counter.
        let mut pos = endo.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < vertex_sets[pos].len() {
                break;
            }
            choice[pos] = 0;
            if pos == 0 {
                break;
            }
        }
        if choice.iter().all(|&c| c == 0) {
            break;
        }
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::UndefinedConditional),
    }
}
