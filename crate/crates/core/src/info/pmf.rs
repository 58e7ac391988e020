use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization tolerance applied when a table is validated.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Largest dense table accepted, in cells.
pub const MAX_CELLS: usize = 1 << 24;

/// Dense probability table over a tuple of finite alphabets.
///
/// Cells are stored row-major with the last axis varying fastest, which is
/// also the order of the `probs` array in the JSON form
/// `{"axes": [n1, ..., nk], "probs": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPmf", into = "RawPmf")]
pub struct JointPmf {
    axes: Vec<usize>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPmf {
    axes: Vec<usize>,
    probs: Vec<f64>,
}

impl TryFrom<RawPmf> for JointPmf {
    type Error = Error;

    fn try_from(raw: RawPmf) -> Result<Self> {
        JointPmf::new(raw.axes, raw.probs)
    }
}

impl From<JointPmf> for RawPmf {
    fn from(pmf: JointPmf) -> Self {
        RawPmf {
            axes: pmf.axes,
            probs: pmf.probs,
        }
    }
}

pub(crate) fn cell_count(axes: &[usize]) -> Result<usize> {
    if axes.is_empty() {
        return Err(Error::Shape("at least one axis is required".into()));
    }
    let mut n: usize = 1;
    for (i, &a) in axes.iter().enumerate() {
        if a == 0 {
            return Err(Error::Shape(format!("axis {i} has size 0")));
        }
        n = n
            .checked_mul(a)
            .filter(|&n| n <= MAX_CELLS)
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "table over axes {axes:?} exceeds {MAX_CELLS} cells"
                ))
            })?;
    }
    Ok(n)
}

impl JointPmf {
    /// Validates and wraps a table. Entries must be finite and nonnegative
    /// and sum to one within [`NORMALIZATION_TOLERANCE`].
    pub fn new(axes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let n = cell_count(&axes)?;
        if probs.len() != n {
            return Err(Error::InvalidPmf(format!(
                "expected {n} probabilities for axes {axes:?}, got {}",
                probs.len()
            )));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidPmf(format!(
                "entry {i} = {p} is not a nonnegative number"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidPmf(format!(
                "probabilities sum to {total}, expected 1 within {NORMALIZATION_TOLERANCE:e}"
            )));
        }
        Ok(JointPmf { axes, probs })
    }

    /// Scales a nonnegative table so it sums to one.
    pub fn renormalized(axes: Vec<usize>, mut probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidPmf(format!(
                "cannot renormalize a table with total mass {total}"
            )));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Self::new(axes, probs)
    }

    /// Builds a table by evaluating `f` on every multi-index.
    pub fn from_fn(axes: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let n = cell_count(&axes)?;
        let mut probs = Vec::with_capacity(n);
        let mut idx = vec![0usize; axes.len()];
        for _ in 0..n {
            probs.push(f(&idx));
            advance(&mut idx, &axes);
        }
        Self::new(axes, probs)
    }

    pub fn uniform(axes: Vec<usize>) -> Result<Self> {
        let n = cell_count(&axes)?;
        Self::new(axes, vec![1.0 / n as f64; n])
    }

    pub fn point_mass(axes: Vec<usize>, at: &[usize]) -> Result<Self> {
        let n = cell_count(&axes)?;
        let flat = flat_index(&axes, at)?;
        let mut probs = vec![0.0; n];
        probs[flat] = 1.0;
        Self::new(axes, probs)
    }

    /// Product of independent marginals, one per axis.
    pub fn product(marginals: &[Vec<f64>]) -> Result<Self> {
        let axes: Vec<usize> = marginals.iter().map(Vec::len).collect();
        for (i, m) in marginals.iter().enumerate() {
            let s: f64 = m.iter().sum();
            if (s - 1.0).abs() > NORMALIZATION_TOLERANCE || m.iter().any(|p| !(*p >= 0.0)) {
                return Err(Error::InvalidPmf(format!("marginal {i} is not a pmf")));
            }
        }
        Self::from_fn(axes, |idx| {
            idx.iter().zip(marginals).map(|(&i, m)| m[i]).product()
        })
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn num_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, at: &[usize]) -> Result<f64> {
        Ok(self.probs[flat_index(&self.axes, at)?])
    }

    pub fn index_of(&self, at: &[usize]) -> Result<usize> {
        flat_index(&self.axes, at)
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (slot, &a) in idx.iter_mut().zip(&self.axes).rev() {
            *slot = flat % a;
            flat /= a;
        }
        idx
    }

    /// Iterates `(multi_index, probability)` over every cell.
    pub fn cells(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let mut idx = vec![0usize; self.axes.len()];
        self.probs.iter().map(move |&p| {
            let out = idx.clone();
            advance(&mut idx, &self.axes);
            (out, p)
        })
    }

    /// Marginal over `keep`, with axes laid out in the order given.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointPmf> {
        check_axes(self.axes.len(), keep, "marginal")?;
        if keep.is_empty() {
            return Err(Error::Shape("marginal needs at least one axis".into()));
        }
        let out_axes: Vec<usize> = keep.iter().map(|&a| self.axes[a]).collect();
        let out = self.project(keep);
        Ok(JointPmf {
            axes: out_axes,
            probs: out,
        })
    }

    /// Raw projected table; `keep` may be empty (returns `[1.0]`).
    pub(crate) fn project(&self, keep: &[usize]) -> Vec<f64> {
        let n_out: usize = keep.iter().map(|&a| self.axes[a]).product();
        let mut out = vec![0.0; n_out.max(1)];
        let mut idx = vec![0usize; self.axes.len()];
        for &p in &self.probs {
            if p != 0.0 {
                let mut o = 0;
                for &a in keep {
                    o = o * self.axes[a] + idx[a];
                }
                out[o] += p;
            }
            advance(&mut idx, &self.axes);
        }
        out
    }

    /// Appends a new axis of size `size` holding the deterministic value
    /// `f(multi_index)`.
    pub fn augment(&self, size: usize, mut f: impl FnMut(&[usize]) -> usize) -> Result<JointPmf> {
        let mut axes = self.axes.clone();
        axes.push(size);
        let n = cell_count(&axes)?;
        let mut probs = vec![0.0; n];
        let mut idx = vec![0usize; self.axes.len()];
        for (flat, &p) in self.probs.iter().enumerate() {
            let v = f(&idx);
            if v >= size {
                return Err(Error::Shape(format!(
                    "derived value {v} outside alphabet of size {size}"
                )));
            }
            probs[flat * size + v] = p;
            advance(&mut idx, &self.axes);
        }
        Ok(JointPmf { axes, probs })
    }

    /// Two-axis table with its axes swapped.
    pub fn transposed(&self) -> Result<JointPmf> {
        if self.axes.len() != 2 {
            return Err(Error::Shape("transpose needs a two-axis table".into()));
        }
        self.marginal(&[1, 0])
    }

    /// True when every cell carries positive mass.
    pub fn has_full_support(&self) -> bool {
        self.probs.iter().all(|&p| p > SUPPORT_EPS)
    }
}

/// Mass at or below this value is treated as round-off, not support.
pub const SUPPORT_EPS: f64 = 1e-12;

pub(crate) fn advance(idx: &mut [usize], axes: &[usize]) {
    for (i, &a) in idx.iter_mut().zip(axes).rev() {
        *i += 1;
        if *i < a {
            return;
        }
        *i = 0;
    }
}

pub(crate) fn flat_index(axes: &[usize], at: &[usize]) -> Result<usize> {
    if at.len() != axes.len() {
        return Err(Error::Shape(format!(
            "index {at:?} does not match axes {axes:?}"
        )));
    }
    let mut flat = 0;
    for (&i, &a) in at.iter().zip(axes) {
        if i >= a {
            return Err(Error::Shape(format!(
                "index {at:?} out of range for axes {axes:?}"
            )));
        }
        flat = flat * a + i;
    }
    Ok(flat)
}

pub(crate) fn check_axes(num_axes: usize, set: &[usize], what: &str) -> Result<()> {
    for (i, &a) in set.iter().enumerate() {
        if a >= num_axes {
            return Err(Error::Domain(format!(
                "{what}: axis {a} out of range (table has {num_axes} axes)"
            )));
        }
        if set[..i].contains(&a) {
            return Err(Error::Domain(format!("{what}: axis {a} listed twice")));
        }
    }
    Ok(())
}

/// Doubly symmetric binary source: uniform X, Y equal to X flipped with
/// probability `p`.
pub fn dsbs(p: f64) -> Result<JointPmf> {
    crate::error::check_probability("p", p)?;
    let same = 0.5 * (1.0 - p);
    let diff = 0.5 * p;
    JointPmf::new(vec![2, 2], vec![same, diff, diff, same])
}

/// Independent Bernoulli sources; axis `i` is 1 with probability `params[i]`.
pub fn bernoulli_product(params: &[f64]) -> Result<JointPmf> {
    if params.is_empty() {
        return Err(Error::Domain(
            "bernoulli_product needs at least one parameter".into(),
        ));
    }
    for (i, &p) in params.iter().enumerate() {
        crate::error::check_probability(&format!("params[{i}]"), p)?;
    }
    let marginals: Vec<Vec<f64>> = params.iter().map(|&p| vec![1.0 - p, p]).collect();
    JointPmf::product(&marginals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dsbs_entries() {
        let p = dsbs(0.25).unwrap();
        assert_eq!(p.probs(), &[0.375, 0.125, 0.125, 0.375]);
        assert_eq!(dsbs(0.0).unwrap().probs(), &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(dsbs(0.5).unwrap().probs(), &[0.25; 4]);
        assert!(dsbs(1.5).is_err());
    }

    #[test]
    fn bernoulli_product_cells() {
        let p = bernoulli_product(&[0.5, 0.5]).unwrap();
        assert_eq!(p.probs(), &[0.25; 4]);
        let one = bernoulli_product(&[1.0]).unwrap();
        assert_eq!(one.probs(), &[0.0, 1.0]);
        let three = bernoulli_product(&[0.2, 0.3, 0.4]).unwrap();
        assert!((three.prob(&[1, 1, 1]).unwrap() - 0.024).abs() < 1e-15);
        assert!(bernoulli_product(&[]).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            JointPmf::new(vec![2], vec![0.5, 0.4]),
            Err(Error::InvalidPmf(_))
        ));
        assert!(JointPmf::new(vec![2], vec![1.5, -0.5]).is_err());
        assert!(JointPmf::new(vec![2, 2], vec![0.5, 0.5]).is_err());
        assert!(JointPmf::new(vec![], vec![]).is_err());
        assert!(JointPmf::new(vec![0], vec![]).is_err());
        assert!(matches!(
            JointPmf::uniform(vec![1 << 13, 1 << 12]),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn renormalize_only_on_request() {
        let p = JointPmf::renormalized(vec![2], vec![1.0, 3.0]).unwrap();
        assert_eq!(p.probs(), &[0.25, 0.75]);
    }

    #[test]
    fn marginal_and_layout() {
        let p = JointPmf::from_fn(vec![2, 3], |i| (i[0] * 3 + i[1] + 1) as f64 / 21.0).unwrap();
        assert_eq!(p.unravel(4), vec![1, 1]);
        assert_eq!(p.index_of(&[1, 2]).unwrap(), 5);
        let mx = p.marginal(&[0]).unwrap();
        assert!((mx.probs()[0] - 6.0 / 21.0).abs() < 1e-15);
        let t = p.transposed().unwrap();
        assert_eq!(t.axes(), &[3, 2]);
        assert_eq!(t.prob(&[2, 0]).unwrap(), p.prob(&[0, 2]).unwrap());
    }

    #[test]
    fn augment_appends_function_axis() {
        let p = dsbs(0.25).unwrap();
        let z = p.augment(2, |i| i[0] ^ i[1]).unwrap();
        assert_eq!(z.axes(), &[2, 2, 2]);
        assert_eq!(z.prob(&[0, 1, 1]).unwrap(), 0.125);
        assert_eq!(z.prob(&[0, 1, 0]).unwrap(), 0.0);
    }

    #[test]
    fn json_shape() {
        let p = dsbs(0.5).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"axes":[2,2],"probs":[0.25,0.25,0.25,0.25]}"#);
        let bad: std::result::Result<JointPmf, _> =
            serde_json::from_str(r#"{"axes":[2],"probs":[0.5,0.4]}"#);
        assert!(bad.unwrap_err().to_string().contains("sum to"));
    }
}
