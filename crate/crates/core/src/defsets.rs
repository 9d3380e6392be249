//! Definable subsets of the base sort: cells of the parameter arrangement,
//! maximal multi-intervals and the canonical decomposition.
//!
//! Fix a quantifier-free `phi(x, params)` with `x: R0` and let `B_i` be the
//! points of sort `i` in the substructure generated by the parameters. A
//! base element `x` sits in one cell per sort (a point of `B_i` or an open
//! gap between consecutive points). If some coordinate is a point then, by
//! injectivity of `f_i`, `x` is a base point of the substructure, so the
//! nonempty cells are the all-gap tuples and the base points themselves.
//! The truth of `phi` is constant on each of them.
//!
//! Multi-intervals with grid endpoints are boxes of gap ranges `[a, b]` per
//! sort: the open interval from the lower end of gap `a` to the upper end of
//! gap `b`, containing the points `a..b` in between.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::SemanticError;
use crate::model::{eval, odometer, render_endpoint, Arrangement, Assignment, Model, MultiInterval, SortCell};
use crate::syntax::{Formula, Sort, Var};

/// One cell per ordered sort.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CellId(pub Vec<SortCell>);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CellVerdict {
    In,
    Out,
    Empty,
}

/// Gap range `(first, last)` per sort, 0-based over sorts.
pub type GridBox = Vec<(usize, usize)>;

/// A set `{x : phi(x, params)}` together with its membership table over the
/// arrangement of the parameters.
#[derive(Clone, Debug)]
pub struct DefinableSet<E> {
    pub phi: Formula,
    pub x: Var,
    pub params: Assignment<E>,
    pub arr: Arrangement<E>,
    /// Grid coordinates of each base point, aligned with `arr.base`.
    base_pos: Vec<Vec<usize>>,
    base_in: Vec<bool>,
    dims: Vec<usize>,
    gap_in: Vec<bool>,
}

/// The free variable of `phi` outside `params`, which must be unique and of
/// sort `R0`.
pub fn defining_variable<E>(phi: &Formula, params: &Assignment<E>) -> Result<Var, SemanticError> {
    let rest: Vec<Var> = phi.free_vars().into_iter().filter(|v| !params.contains_key(v)).collect();
    match rest.as_slice() {
        [x] if x.sort.is_base() => Ok(x.clone()),
        _ => Err(SemanticError::BadFreeVariable {
            expected: Sort::BASE.to_string(),
            found: if rest.is_empty() {
                "none".into()
            } else {
                rest.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
            },
        }),
    }
}

/// The arrangement of the parameters, with `phi` evaluated on every
/// nonempty cell.
pub fn arrangement<M: Model>(
    model: &mut M,
    phi: &Formula,
    params: &Assignment<M::Elem>,
) -> Result<DefinableSet<M::Elem>, SemanticError> {
    if !phi.is_quantifier_free() {
        return Err(SemanticError::NotQuantifierFree);
    }
    let x = defining_variable(phi, params)?;
    let values: Vec<M::Elem> = params.values().cloned().collect();
    let arr = Arrangement::of(model, &values);
    let n = model.sorts();
    let base_pos = arr
        .base
        .iter()
        .map(|b| {
            (1..=n)
                .map(|i| match arr.locate(model, i, &model.apply_f(i, b)) {
                    SortCell::Point(k) => k,
                    SortCell::Gap(_) => unreachable!("images of generated points are generated"),
                })
                .collect()
        })
        .collect();
    let dims: Vec<usize> = (1..=n).map(|i| arr.gap_count(i)).collect();
    let mut set = DefinableSet {
        phi: phi.clone(),
        x,
        params: params.clone(),
        arr,
        base_pos,
        base_in: Vec::new(),
        dims,
        gap_in: Vec::new(),
    };
    set.base_in = (0..set.arr.base.len())
        .map(|k| {
            let b = set.arr.base[k].clone();
            set.holds_at(model, b)
        })
        .collect();
    set.gap_in = odometer(&set.dims)
        .into_iter()
        .map(|gaps| set.sample_gap_cell(model, &gaps))
        .collect();
    Ok(set)
}

impl<E: Clone + Eq + std::hash::Hash + std::fmt::Debug> DefinableSet<E> {
    pub fn sorts(&self) -> usize {
        self.dims.len()
    }

    fn holds_at<M: Model<Elem = E>>(&self, model: &mut M, e: E) -> bool {
        let mut asg = self.params.clone();
        asg.insert(self.x.clone(), e);
        eval(model, &self.phi, &asg).expect("assignment covers the formula")
    }

    fn sample_gap_cell<M: Model<Elem = E>>(&self, model: &mut M, gaps: &[usize]) -> bool {
        let snap = model.snapshot();
        let rep = model.sample_multi_interval(&self.arr.gap_cell(gaps), &self.arr.base);
        let v = self.holds_at(model, rep);
        model.restore(snap);
        v
    }

    fn gap_index(&self, gaps: &[usize]) -> usize {
        gaps.iter().zip(&self.dims).fold(0, |acc, (&g, &d)| acc * d + g)
    }

    /// Membership of an all-gap cell, from the table.
    pub fn gap_member(&self, gaps: &[usize]) -> bool {
        self.gap_in[self.gap_index(gaps)]
    }

    pub fn base_member(&self, k: usize) -> bool {
        self.base_in[k]
    }

    /// Cell of `e` in each sort.
    pub fn position<M: Model<Elem = E>>(&self, model: &M, e: &E) -> CellId {
        CellId((1..=self.sorts()).map(|i| self.arr.locate(model, i, &model.apply_f(i, e))).collect())
    }

    /// The base point occupying a cell with a pinned coordinate, if any.
    fn pinned_base(&self, cell: &CellId) -> Option<usize> {
        self.base_pos.iter().position(|pos| {
            cell.0.iter().zip(pos).all(|(c, &k)| *c == SortCell::Point(k))
        })
    }

    fn all_gaps(cell: &CellId) -> Option<Vec<usize>> {
        cell.0
            .iter()
            .map(|c| match c {
                SortCell::Gap(g) => Some(*g),
                SortCell::Point(_) => None,
            })
            .collect()
    }

    /// Truth of `phi` on a cell, evaluated afresh at one representative.
    pub fn cell_member<M: Model<Elem = E>>(&self, model: &mut M, cell: &CellId) -> CellVerdict {
        assert_eq!(cell.0.len(), self.sorts());
        let verdict = |b| if b { CellVerdict::In } else { CellVerdict::Out };
        if let Some(gaps) = Self::all_gaps(cell) {
            return verdict(self.sample_gap_cell(model, &gaps));
        }
        match self.pinned_base(cell) {
            Some(k) => {
                let b = self.arr.base[k].clone();
                verdict(self.holds_at(model, b))
            }
            None => CellVerdict::Empty,
        }
    }

    /// Membership of an arbitrary element, read from the table.
    pub fn contains<M: Model<Elem = E>>(&self, model: &M, e: &E) -> bool {
        let cell = self.position(model, e);
        match Self::all_gaps(&cell) {
            Some(gaps) => self.gap_member(&gaps),
            None => self.base_in[self.pinned_base(&cell).expect("a pinned element is a generated base point")],
        }
    }

    /// Whether the box lies inside the set.
    pub fn box_inside(&self, bx: &[(usize, usize)]) -> bool {
        let widths: Vec<usize> = bx.iter().map(|(a, b)| b - a + 1).collect();
        let gaps_ok = odometer(&widths).into_iter().all(|offs| {
            let gaps: Vec<usize> = offs.iter().zip(bx).map(|(o, (a, _))| a + o).collect();
            self.gap_member(&gaps)
        });
        gaps_ok
            && self.base_pos.iter().zip(&self.base_in).all(|(pos, &inside)| {
                inside || !pos.iter().zip(bx).all(|(&k, &(a, b))| a <= k && k < b)
            })
    }

    fn min_range(c: SortCell) -> (usize, usize) {
        match c {
            SortCell::Gap(g) => (g, g),
            SortCell::Point(k) => (k, k + 1),
        }
    }

    fn minimal_box(cell: &CellId) -> GridBox {
        cell.0.iter().map(|&c| Self::min_range(c)).collect()
    }

    /// Whether a member of the set lies in the exceptional set: the cells
    /// around it do not all belong to the set.
    pub fn is_exceptional(&self, cell: &CellId) -> bool {
        !self.box_inside(&Self::minimal_box(cell))
    }

    /// The maximal multi-interval around a cell, as a grid box: maximize the
    /// sort-1 range, then the sort-2 range given sort 1, and so on, keeping
    /// later sorts at their smallest range.
    pub fn maximal_box(&self, cell: &CellId) -> GridBox {
        let mut bx = Self::minimal_box(cell);
        debug_assert!(self.box_inside(&bx));
        for s in 0..self.sorts() {
            loop {
                if bx[s].0 == 0 {
                    break;
                }
                bx[s].0 -= 1;
                if !self.box_inside(&bx) {
                    bx[s].0 += 1;
                    break;
                }
            }
            loop {
                if bx[s].1 + 1 == self.dims[s] {
                    break;
                }
                bx[s].1 += 1;
                if !self.box_inside(&bx) {
                    bx[s].1 -= 1;
                    break;
                }
            }
        }
        bx
    }

    pub fn box_to_multi_interval(&self, bx: &[(usize, usize)]) -> MultiInterval<E> {
        MultiInterval(bx.iter().enumerate().map(|(s, &(a, b))| self.arr.span(s + 1, a, b)).collect())
    }

    /// Grid box of a multi-interval whose endpoints are arrangement points.
    pub fn multi_interval_box<M: Model<Elem = E>>(&self, model: &M, mi: &MultiInterval<E>) -> Option<GridBox> {
        (1..=self.sorts())
            .map(|i| {
                let iv = mi.sort(i);
                let a = match &iv.lo {
                    crate::model::Endpoint::NegInf => 0,
                    crate::model::Endpoint::At(e) => match self.arr.locate(model, i, e) {
                        SortCell::Point(k) => k + 1,
                        SortCell::Gap(_) => return None,
                    },
                    crate::model::Endpoint::PosInf => return None,
                };
                let b = match &iv.hi {
                    crate::model::Endpoint::PosInf => self.dims[i - 1] - 1,
                    crate::model::Endpoint::At(e) => match self.arr.locate(model, i, e) {
                        SortCell::Point(k) => k,
                        SortCell::Gap(_) => return None,
                    },
                    crate::model::Endpoint::NegInf => return None,
                };
                (a <= b).then_some((a, b))
            })
            .collect()
    }
}

/// The maximal multi-interval of the set containing `e`.
pub fn maximal_multi_interval<M: Model>(
    model: &M,
    set: &DefinableSet<M::Elem>,
    e: &M::Elem,
) -> Result<MultiInterval<M::Elem>, SemanticError> {
    if model.sort_of(e) != Sort::BASE {
        return Err(SemanticError::Element(format!("{} is not an element of R0", model.render(e))));
    }
    if !set.contains(model, e) {
        return Err(SemanticError::NotInSet);
    }
    let cell = set.position(model, e);
    if set.is_exceptional(&cell) {
        return Err(SemanticError::NotInteriorPoint);
    }
    Ok(set.box_to_multi_interval(&set.maximal_box(&cell)))
}

/// `E = E0 ∪ (union of intervals)` with pairwise distinct maximal
/// multi-intervals and `E0` the members contained in no multi-interval
/// inside `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalDecomposition<E> {
    pub e0: Vec<E>,
    pub intervals: Vec<MultiInterval<E>>,
    /// Grid boxes of the intervals in the arrangement used.
    pub boxes: Vec<GridBox>,
}

impl<E: Clone> CanonicalDecomposition<E> {
    pub fn to_json<M: Model<Elem = E>>(&self, model: &M) -> Value {
        json!({
            "e0": self.e0.iter().map(|e| model.render(e)).collect::<Vec<_>>(),
            "intervals": self.intervals.iter().map(|mi| {
                mi.0.iter()
                    .map(|iv| json!([render_endpoint(model, &iv.lo), render_endpoint(model, &iv.hi)]))
                    .collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })
    }

    pub fn render<M: Model<Elem = E>>(&self, model: &M) -> String {
        let mut out = String::new();
        let e0: Vec<String> = self.e0.iter().map(|e| model.render(e)).collect();
        out.push_str(&format!("E0 = {{{}}}\n", e0.join(", ")));
        for (k, mi) in self.intervals.iter().enumerate() {
            let parts: Vec<String> = mi
                .0
                .iter()
                .enumerate()
                .map(|(s, iv)| {
                    format!(
                        "f{}(x) in ({}, {})",
                        s + 1,
                        render_endpoint(model, &iv.lo),
                        render_endpoint(model, &iv.hi)
                    )
                })
                .collect();
            out.push_str(&format!("I{} = {}\n", k + 1, parts.join(" & ")));
        }
        out
    }
}

pub fn canonical_decomposition<M: Model>(_model: &M, set: &DefinableSet<M::Elem>) -> CanonicalDecomposition<M::Elem> {
    let mut e0 = Vec::new();
    let mut boxes: BTreeSet<GridBox> = BTreeSet::new();
    for (k, pos) in set.base_pos.iter().enumerate() {
        if !set.base_in[k] {
            continue;
        }
        let cell = CellId(pos.iter().map(|&p| SortCell::Point(p)).collect());
        if set.is_exceptional(&cell) {
            e0.push(set.arr.base[k].clone());
        } else {
            boxes.insert(set.maximal_box(&cell));
        }
    }
    for gaps in odometer(&set.dims) {
        if set.gap_member(&gaps) {
            let cell = CellId(gaps.into_iter().map(SortCell::Gap).collect());
            boxes.insert(set.maximal_box(&cell));
        }
    }
    // gap indices are monotone in the endpoints, so this order only depends
    // on the endpoints themselves
    let boxes: Vec<GridBox> = boxes.into_iter().collect();
    CanonicalDecomposition {
        e0,
        intervals: boxes.iter().map(|b| set.box_to_multi_interval(b)).collect(),
        boxes,
    }
}

/// Checks the four defining properties of a canonical decomposition against
/// freshly evaluated cells.
pub fn verify_decomposition<M: Model>(
    model: &mut M,
    set: &DefinableSet<M::Elem>,
    dec: &CanonicalDecomposition<M::Elem>,
) -> Result<(), String> {
    // extremities are generated points and each interval is a grid box
    let boxes: Vec<GridBox> = dec
        .intervals
        .iter()
        .map(|mi| set.multi_interval_box(model, mi).ok_or_else(|| "interval endpoint outside the arrangement".to_string()))
        .collect::<Result<_, _>>()?;
    for (k, b) in boxes.iter().enumerate() {
        if boxes[..k].contains(b) {
            return Err(format!("interval {} listed twice", k + 1));
        }
    }
    // fresh membership for every nonempty cell
    let mut gap_cells = Vec::new();
    for gaps in odometer(&set.dims) {
        let cell = CellId(gaps.iter().map(|&g| SortCell::Gap(g)).collect());
        let inside = set.cell_member(model, &cell) == CellVerdict::In;
        gap_cells.push((gaps, inside));
    }
    let mut base_cells = Vec::new();
    for (k, pos) in set.base_pos.iter().enumerate() {
        let cell = CellId(pos.iter().map(|&p| SortCell::Point(p)).collect());
        let inside = set.cell_member(model, &cell) == CellVerdict::In;
        base_cells.push((k, pos.clone(), inside));
    }
    let gap_ok = |gaps: &[usize]| gap_cells.iter().find(|(g, _)| g == gaps).map(|(_, v)| *v).unwrap();
    let base_ok = |k: usize| base_cells[k].2;
    let box_inside = |bx: &[(usize, usize)]| {
        let widths: Vec<usize> = bx.iter().map(|(a, b)| b - a + 1).collect();
        odometer(&widths).into_iter().all(|offs| {
            let gaps: Vec<usize> = offs.iter().zip(bx).map(|(o, (a, _))| a + o).collect();
            gap_ok(&gaps)
        }) && base_cells
            .iter()
            .all(|(_, pos, inside)| *inside || !pos.iter().zip(bx).all(|(&k, &(a, b))| a <= k && k < b))
    };
    // intervals are inside E and cannot be enlarged by one grid step
    for (k, bx) in boxes.iter().enumerate() {
        if !box_inside(bx) {
            return Err(format!("interval {} is not contained in the set", k + 1));
        }
        for s in 0..bx.len() {
            let mut wider = bx.clone();
            if wider[s].0 > 0 {
                wider[s].0 -= 1;
                if box_inside(&wider) {
                    return Err(format!("interval {} extends downward in sort {}", k + 1, s + 1));
                }
            }
            let mut wider = bx.clone();
            if wider[s].1 + 1 < set.dims[s] {
                wider[s].1 += 1;
                if box_inside(&wider) {
                    return Err(format!("interval {} extends upward in sort {}", k + 1, s + 1));
                }
            }
        }
    }
    // exceptional points: members contained in no multi-interval inside E
    for e in &dec.e0 {
        let k = set
            .arr
            .base
            .iter()
            .position(|b| b == e)
            .ok_or_else(|| format!("exceptional point {} is not generated", model.render(e)))?;
        if !base_ok(k) {
            return Err(format!("exceptional point {} is not in the set", model.render(e)));
        }
        let around: GridBox = base_cells[k].1.iter().map(|&p| (p, p + 1)).collect();
        if box_inside(&around) {
            return Err(format!("exceptional point {} is interior", model.render(e)));
        }
    }
    // the union is exactly E
    let covered = |cell_in_box: &dyn Fn(&GridBox) -> bool| boxes.iter().any(cell_in_box);
    for (gaps, inside) in &gap_cells {
        let c = covered(&|bx: &GridBox| gaps.iter().zip(bx).all(|(&g, &(a, b))| a <= g && g <= b));
        if c != *inside {
            return Err(format!("gap cell {gaps:?}: member {inside}, covered {c}"));
        }
    }
    for (k, pos, inside) in &base_cells {
        let in_e0 = dec.e0.contains(&set.arr.base[*k]);
        let c = in_e0 || covered(&|bx: &GridBox| pos.iter().zip(bx).all(|(&p, &(a, b))| a <= p && p < b));
        if c != *inside {
            return Err(format!("base point {}: member {inside}, covered {c}", model.render(&set.arr.base[*k])));
        }
        if *inside && !in_e0 && !box_inside(&pos.iter().map(|&p| (p, p + 1)).collect::<GridBox>()) {
            return Err(format!("base point {} should be exceptional", model.render(&set.arr.base[*k])));
        }
    }
    Ok(())
}
