//! Supports, rectangles and monochromatic-rectangle tests on two-axis
//! function tables, plus slice analysis of chain joints.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{conditional_entropy, entropy, FunctionTable, JointPmf, SUPPORT_EPS};

/// Largest alphabet for exhaustive rectangle enumeration.
pub const MAX_RECTANGLE_ALPHABET: usize = 12;

/// Tolerance used when comparing information quantities in reports.
const REPORT_TOL: f64 = 1e-9;

/// Cells carrying mass above round-off, as multi-indices in row-major order.
pub fn support(pmf: &JointPmf) -> Vec<Vec<usize>> {
    pmf.cells()
        .filter(|(_, p)| *p > SUPPORT_EPS)
        .map(|(i, _)| i)
        .collect()
}

/// A product set `sx × sy`. Both index lists are kept sorted and free of
/// duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Rectangle {
    pub sx: Vec<usize>,
    pub sy: Vec<usize>,
}

impl Rectangle {
    pub fn new(mut sx: Vec<usize>, mut sy: Vec<usize>) -> Self {
        sx.sort_unstable();
        sx.dedup();
        sy.sort_unstable();
        sy.dedup();
        Rectangle { sx, sy }
    }

    /// Smallest rectangle containing `cells` (the product of its projections).
    pub fn hull(cells: &[(usize, usize)]) -> Self {
        Self::new(
            cells.iter().map(|c| c.0).collect(),
            cells.iter().map(|c| c.1).collect(),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.sx.is_empty() || self.sy.is_empty()
    }

    pub fn area(&self) -> usize {
        self.sx.len() * self.sy.len()
    }

    fn check_within(&self, f: &FunctionTable) -> Result<()> {
        let d = f.domain_axes();
        if d.len() != 2 {
            return Err(Error::Shape(
                "rectangle tests need a two-axis function".into(),
            ));
        }
        if self.sx.iter().any(|&x| x >= d[0]) || self.sy.iter().any(|&y| y >= d[1]) {
            return Err(Error::Shape(format!(
                "rectangle {self:?} lies outside domain {d:?}"
            )));
        }
        Ok(())
    }
}

/// True iff `cells` equals the product of its projections. The empty set
/// counts as a rectangle.
pub fn is_rectangle(cells: &[(usize, usize)]) -> bool {
    let mut distinct = cells.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    Rectangle::hull(&distinct).area() == distinct.len()
}

/// `f` is constant along each row `{x} × sy` of the rectangle.
pub fn is_row_monochromatic(rect: &Rectangle, f: &FunctionTable) -> Result<bool> {
    rect.check_within(f)?;
    Ok(rect.sx.iter().all(|&x| {
        rect.sy
            .windows(2)
            .all(|w| f.eval2(x, w[0]) == f.eval2(x, w[1]))
    }))
}

/// `f` is constant along each column `sx × {y}` of the rectangle.
pub fn is_column_monochromatic(rect: &Rectangle, f: &FunctionTable) -> Result<bool> {
    rect.check_within(f)?;
    Ok(rect.sy.iter().all(|&y| {
        rect.sx
            .windows(2)
            .all(|w| f.eval2(w[0], y) == f.eval2(w[1], y))
    }))
}

/// `f` takes a single value on the whole rectangle.
pub fn is_monochromatic(rect: &Rectangle, f: &FunctionTable) -> Result<bool> {
    rect.check_within(f)?;
    let mut values = rect
        .sx
        .iter()
        .flat_map(|&x| rect.sy.iter().map(move |&y| (x, y)));
    let Some((x0, y0)) = values.next() else {
        return Ok(true);
    };
    let v0 = f.eval2(x0, y0);
    Ok(values.all(|(x, y)| f.eval2(x, y) == v0))
}

/// Shape of a slice's projection rectangle. A row is `{x} × S_Y`, a column
/// is `S_X × {y}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceTag {
    Empty,
    Singleton,
    Full,
    RowLike,
    ColumnLike,
    Other,
}

impl SliceTag {
    fn of(rect: &Rectangle, nx: usize, ny: usize) -> Self {
        match (rect.sx.len(), rect.sy.len()) {
            (0, _) | (_, 0) => SliceTag::Empty,
            (1, 1) => SliceTag::Singleton,
            (a, b) if a == nx && b == ny => SliceTag::Full,
            (1, _) => SliceTag::RowLike,
            (_, 1) => SliceTag::ColumnLike,
            _ => SliceTag::Other,
        }
    }
}

/// The `(x, y)` cells compatible with one auxiliary realization `u^t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceClass {
    pub u: Vec<usize>,
    pub tag: SliceTag,
    pub rectangle: Rectangle,
    pub cells: Vec<(usize, usize)>,
    pub is_rectangle: bool,
}

fn check_chain_joint(joint: &JointPmf) -> Result<()> {
    if joint.num_axes() < 2 {
        return Err(Error::Shape(
            "a chain joint has axes (X, Y, U_1, ..., U_t)".into(),
        ));
    }
    Ok(())
}

/// Groups the support of a joint over `(X, Y, U_1, ..., U_t)` by `u^t` and
/// classifies each slice. Only realizations with positive mass appear;
/// output is ordered by `u^t`.
pub fn classify_slices(chain_joint: &JointPmf) -> Result<Vec<SliceClass>> {
    check_chain_joint(chain_joint)?;
    let (nx, ny) = (chain_joint.axes()[0], chain_joint.axes()[1]);
    let mut groups: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
    for cell in support(chain_joint) {
        groups
            .entry(cell[2..].to_vec())
            .or_default()
            .push((cell[0], cell[1]));
    }
    Ok(groups
        .into_iter()
        .map(|(u, mut cells)| {
            cells.sort_unstable();
            cells.dedup();
            let rectangle = Rectangle::hull(&cells);
            SliceClass {
                tag: SliceTag::of(&rectangle, nx, ny),
                is_rectangle: rectangle.area() == cells.len(),
                u,
                rectangle,
                cells,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NotRectangle,
    RowNotMonochromaticA,
    ColumnNotMonochromaticB,
    NotMonochromatic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceViolation {
    pub u: Vec<usize>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Checked,
    /// `p_XY` lacks full support, so the slice structure is not implied.
    HypothesisNotMet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceReport {
    pub status: CheckStatus,
    pub slices_checked: usize,
    pub violations: Vec<SliceViolation>,
}

impl SliceReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Checked && self.violations.is_empty()
    }
}

/// Checks the slice structure a decodable chain must have when `p_XY` has
/// full support: every slice is a rectangle, row-wise `f_A`-monochromatic
/// and column-wise `f_B`-monochromatic, and monochromatic outright when
/// `f_A = f_B`.
pub fn lemma2_check(
    chain_joint: &JointPmf,
    f_a: &FunctionTable,
    f_b: &FunctionTable,
) -> Result<SliceReport> {
    check_chain_joint(chain_joint)?;
    let (nx, ny) = (chain_joint.axes()[0], chain_joint.axes()[1]);
    f_a.require_two_axes(nx, ny, "f_A")?;
    f_b.require_two_axes(nx, ny, "f_B")?;
    if !chain_joint.marginal(&[0, 1])?.has_full_support() {
        return Ok(SliceReport {
            status: CheckStatus::HypothesisNotMet,
            slices_checked: 0,
            violations: Vec::new(),
        });
    }
    let slices = classify_slices(chain_joint)?;
    let same = f_a == f_b;
    let mut violations = Vec::new();
    for s in &slices {
        let mut flag = |kind| {
            violations.push(SliceViolation {
                u: s.u.clone(),
                kind,
            })
        };
        if !s.is_rectangle {
            flag(ViolationKind::NotRectangle);
        }
        if !is_row_monochromatic(&s.rectangle, f_a)? {
            flag(ViolationKind::RowNotMonochromaticA);
        }
        if !is_column_monochromatic(&s.rectangle, f_b)? {
            flag(ViolationKind::ColumnNotMonochromaticB);
        }
        if same && !is_monochromatic(&s.rectangle, f_a)? {
            flag(ViolationKind::NotMonochromatic);
        }
    }
    Ok(SliceReport {
        status: CheckStatus::Checked,
        slices_checked: slices.len(),
        violations,
    })
}

/// Every pair of distinct `x` values is separated by some `y`:
/// `f_B(x1, y) != f_B(x2, y)`. Under full support this forces a single
/// message from A to carry all of `X`.
pub fn han_kobayashi_condition(f_b: &FunctionTable) -> Result<bool> {
    let d = f_b.domain_axes();
    if d.len() != 2 {
        return Err(Error::Shape("f_B must have a two-axis domain".into()));
    }
    let (nx, ny) = (d[0], d[1]);
    Ok((0..nx)
        .all(|x1| (x1 + 1..nx).all(|x2| (0..ny).any(|y| f_b.eval2(x1, y) != f_b.eval2(x2, y)))))
}

/// True iff every column-wise `f_B`-monochromatic rectangle lies inside a
/// single row or a single column, i.e. no rectangle with at least two `x`
/// values and two `y` values is column-wise monochromatic.
pub fn theorem3_condition_i(f_b: &FunctionTable) -> Result<bool> {
    let d = f_b.domain_axes();
    if d.len() != 2 {
        return Err(Error::Shape("f_B must have a two-axis domain".into()));
    }
    let (nx, ny) = (d[0], d[1]);
    if nx > MAX_RECTANGLE_ALPHABET || ny > MAX_RECTANGLE_ALPHABET {
        return Err(Error::Capacity(format!(
            "exhaustive rectangle search is limited to alphabets of size {MAX_RECTANGLE_ALPHABET}, got {nx} x {ny}"
        )));
    }
    // Column-wise monochromatic rectangles are closed under shrinking S_X,
    // so checking every S_X with |S_X| >= 2 for two constant columns covers
    // all candidates.
    for mask in 0u32..(1 << nx) {
        if mask.count_ones() < 2 {
            continue;
        }
        let xs: Vec<usize> = (0..nx).filter(|&x| mask >> x & 1 == 1).collect();
        let constant_columns = (0..ny)
            .filter(|&y| {
                xs.windows(2)
                    .all(|w| f_b.eval2(w[0], y) == f_b.eval2(w[1], y))
            })
            .count();
        if constant_columns >= 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which notion of monochromatic a rectangle search uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monochromatic {
    RowWise,
    ColumnWise,
    Full,
}

fn two_axes(f: &FunctionTable) -> Result<(usize, usize)> {
    let d = f.domain_axes();
    if d.len() != 2 {
        return Err(Error::Shape(
            "rectangle tests need a two-axis function".into(),
        ));
    }
    Ok((d[0], d[1]))
}

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// All nonempty rectangles that are monochromatic in the given sense and
/// cannot be enlarged by one more row or column, sorted.
///
/// Each maximal rectangle is determined by one of its sides (`S_X` for
/// column-wise and full, `S_Y` for row-wise), so only that side is
/// enumerated; it must have at most [`MAX_RECTANGLE_ALPHABET`] symbols.
pub fn maximal_monochromatic_rectangles(
    f: &FunctionTable,
    kind: Monochromatic,
) -> Result<Vec<Rectangle>> {
    let (nx, ny) = two_axes(f)?;
    let side = if kind == Monochromatic::RowWise {
        ny
    } else {
        nx
    };
    if side > MAX_RECTANGLE_ALPHABET {
        return Err(Error::Capacity(format!(
            "exhaustive rectangle search is limited to alphabets of size {MAX_RECTANGLE_ALPHABET}, got {side}"
        )));
    }
    let test = |r: &Rectangle| match kind {
        Monochromatic::RowWise => is_row_monochromatic(r, f),
        Monochromatic::ColumnWise => is_column_monochromatic(r, f),
        Monochromatic::Full => is_monochromatic(r, f),
    };
    let mut candidates = Vec::new();
    for mask in 1u32..(1 << side) {
        let chosen = members(mask, side);
        match kind {
            Monochromatic::RowWise => {
                let sx = (0..nx)
                    .filter(|&x| {
                        chosen
                            .windows(2)
                            .all(|w| f.eval2(x, w[0]) == f.eval2(x, w[1]))
                    })
                    .collect();
                candidates.push(Rectangle::new(sx, chosen));
            }
            Monochromatic::ColumnWise => {
                let sy = (0..ny)
                    .filter(|&y| {
                        chosen
                            .windows(2)
                            .all(|w| f.eval2(w[0], y) == f.eval2(w[1], y))
                    })
                    .collect();
                candidates.push(Rectangle::new(chosen, sy));
            }
            Monochromatic::Full => {
                for c in 0..f.range_size() {
                    let sy = (0..ny)
                        .filter(|&y| chosen.iter().all(|&x| f.eval2(x, y) == c))
                        .collect();
                    candidates.push(Rectangle::new(chosen.clone(), sy));
                }
            }
        }
    }
    let mut out = Vec::new();
    for r in candidates.into_iter().filter(|r| !r.is_empty()) {
        let mut grows = false;
        for x in (0..nx).filter(|x| !r.sx.contains(x)) {
            let mut sx = r.sx.clone();
            sx.push(x);
            grows |= test(&Rectangle::new(sx, r.sy.clone()))?;
        }
        for y in (0..ny).filter(|y| !r.sy.contains(y)) {
            let mut sy = r.sy.clone();
            sy.push(y);
            grows |= test(&Rectangle::new(r.sx.clone(), sy))?;
        }
        if !grows {
            out.push(r);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Outcome of checking a witness `(W, ψ, η)` with `Y = ψ(X, W)`,
/// `X = η(Y, W)` and `H(Y|X) = H(W)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WDecompositionReport {
    /// Largest absolute difference between the induced and the given `p_XY`.
    pub induced_pmf_error: f64,
    pub induced_matches: bool,
    /// `H(X | Y, W)` under the induced joint; zero when `η` is consistent.
    pub eta_residual: f64,
    pub eta_recovers_x: bool,
    pub h_y_given_x: f64,
    pub h_w: f64,
    pub entropy_matches: bool,
    /// `I(X; W)`, zero when `W` is independent of `X`.
    pub x_w_dependence: f64,
    /// `H(W | X, Y)`.
    pub h_w_given_xy: f64,
    pub valid: bool,
}

/// Verifies a user-supplied decomposition of `p_XY`. `w_pmf` is the joint
/// of `(X, W)`, `psi` maps `(x, w)` to `y` and `eta` maps `(y, w)` to `x`.
pub fn verify_w_decomposition(
    joint: &JointPmf,
    psi: &FunctionTable,
    eta: &FunctionTable,
    w_pmf: &JointPmf,
) -> Result<WDecompositionReport> {
    if joint.num_axes() != 2 || w_pmf.num_axes() != 2 {
        return Err(Error::Shape(
            "p_XY and p_XW must both be two-axis tables".into(),
        ));
    }
    let (nx, ny) = (joint.axes()[0], joint.axes()[1]);
    let nw = w_pmf.axes()[1];
    if w_pmf.axes()[0] != nx {
        return Err(Error::Shape(format!(
            "p_XW has {} x-values, p_XY has {nx}",
            w_pmf.axes()[0]
        )));
    }
    psi.require_two_axes(nx, nw, "psi")?;
    eta.require_two_axes(ny, nw, "eta")?;
    if psi.range_size() > ny {
        return Err(Error::Shape(format!(
            "psi range {} exceeds |Y| = {ny}",
            psi.range_size()
        )));
    }
    // Axes (X, W, Y).
    let xwy = w_pmf.augment(ny, |i| psi.eval2(i[0], i[1]))?;
    let induced = xwy.marginal(&[0, 2])?;
    let induced_pmf_error = induced
        .probs()
        .iter()
        .zip(joint.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    // H(X | Y, W) = 0 says X is a function of (Y, W); η must also be that function.
    let eta_consistent = xwy
        .cells()
        .filter(|(_, p)| *p > SUPPORT_EPS)
        .all(|(i, _)| eta.eval2(i[2], i[1]) == i[0]);
    let eta_residual = conditional_entropy(&xwy, &[0], &[2, 1])?;
    let h_y_given_x = conditional_entropy(&xwy, &[2], &[0])?;
    let h_w = entropy(&xwy, &[1])?;
    let x_w_dependence = crate::info::mutual_information(&xwy, &[0], &[1])?;
    let h_w_given_xy = conditional_entropy(&xwy, &[1], &[0, 2])?;
    let induced_matches = induced_pmf_error <= REPORT_TOL;
    let eta_recovers_x = eta_consistent && eta_residual <= REPORT_TOL;
    let entropy_matches = (h_y_given_x - h_w).abs() <= REPORT_TOL;
    Ok(WDecompositionReport {
        induced_pmf_error,
        induced_matches,
        eta_residual,
        eta_recovers_x,
        h_y_given_x,
        h_w,
        entropy_matches,
        x_w_dependence,
        h_w_given_xy,
        valid: induced_matches && eta_recovers_x && entropy_matches,
    })
}
