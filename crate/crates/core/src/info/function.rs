use serde::{Deserialize, Serialize};

use super::pmf::{advance, cell_count, flat_index};
use crate::error::{Error, Result};

/// Samplewise function over a product of finite alphabets, stored as a
/// row-major lookup table.
///
/// JSON form: `{"domain_axes": [...], "range_size": z, "values": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFunction", into = "RawFunction")]
pub struct FunctionTable {
    domain_axes: Vec<usize>,
    range_size: usize,
    values: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawFunction {
    domain_axes: Vec<usize>,
    range_size: usize,
    values: Vec<usize>,
}

impl TryFrom<RawFunction> for FunctionTable {
    type Error = Error;

    fn try_from(raw: RawFunction) -> Result<Self> {
        FunctionTable::new(raw.domain_axes, raw.range_size, raw.values)
    }
}

impl From<FunctionTable> for RawFunction {
    fn from(f: FunctionTable) -> Self {
        RawFunction {
            domain_axes: f.domain_axes,
            range_size: f.range_size,
            values: f.values,
        }
    }
}

impl FunctionTable {
    pub fn new(domain_axes: Vec<usize>, range_size: usize, values: Vec<usize>) -> Result<Self> {
        let n = cell_count(&domain_axes).map_err(|e| Error::InvalidFunction(e.to_string()))?;
        if range_size == 0 {
            return Err(Error::InvalidFunction(
                "range_size must be at least 1".into(),
            ));
        }
        if values.len() != n {
            return Err(Error::InvalidFunction(format!(
                "expected {n} values for domain {domain_axes:?}, got {}",
                values.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| **v >= range_size) {
            return Err(Error::InvalidFunction(format!(
                "value {v} at entry {i} is not below range_size {range_size}"
            )));
        }
        Ok(FunctionTable {
            domain_axes,
            range_size,
            values,
        })
    }

    pub fn from_fn(
        domain_axes: Vec<usize>,
        range_size: usize,
        mut f: impl FnMut(&[usize]) -> usize,
    ) -> Result<Self> {
        let n = cell_count(&domain_axes).map_err(|e| Error::InvalidFunction(e.to_string()))?;
        let mut idx = vec![0; domain_axes.len()];
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(f(&idx));
            advance(&mut idx, &domain_axes);
        }
        Self::new(domain_axes, range_size, values)
    }

    pub fn constant(domain_axes: Vec<usize>, value: usize) -> Result<Self> {
        Self::from_fn(domain_axes, value + 1, |_| value)
    }

    /// The all-zero function on `{0,1}^2`.
    pub fn zero2() -> Self {
        Self::constant(vec![2, 2], 0).expect("static table")
    }

    pub fn and2() -> Self {
        Self::from_fn(vec![2, 2], 2, |i| i[0] & i[1]).expect("static table")
    }

    pub fn or2() -> Self {
        Self::from_fn(vec![2, 2], 2, |i| i[0] | i[1]).expect("static table")
    }

    pub fn xor2() -> Self {
        Self::from_fn(vec![2, 2], 2, |i| i[0] ^ i[1]).expect("static table")
    }

    /// `f(x, y) = x` on an `nx` by `ny` domain.
    pub fn first(nx: usize, ny: usize) -> Result<Self> {
        Self::from_fn(vec![nx, ny], nx, |i| i[0])
    }

    /// `f(x, y) = y` on an `nx` by `ny` domain.
    pub fn second(nx: usize, ny: usize) -> Result<Self> {
        Self::from_fn(vec![nx, ny], ny, |i| i[1])
    }

    pub fn domain_axes(&self) -> &[usize] {
        &self.domain_axes
    }

    pub fn range_size(&self) -> usize {
        self.range_size
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn eval(&self, at: &[usize]) -> Result<usize> {
        Ok(self.values[flat_index(&self.domain_axes, at)?])
    }

    /// Unchecked lookup by flat row-major index.
    pub fn at_flat(&self, flat: usize) -> usize {
        self.values[flat]
    }

    /// Two-argument lookup; the table must have a two-axis domain.
    pub fn eval2(&self, x: usize, y: usize) -> usize {
        debug_assert_eq!(self.domain_axes.len(), 2);
        self.values[x * self.domain_axes[1] + y]
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// Two-axis table with the argument order swapped.
    pub fn transposed(&self) -> Result<Self> {
        if self.domain_axes.len() != 2 {
            return Err(Error::InvalidFunction(
                "transpose needs a two-axis domain".into(),
            ));
        }
        let (nx, ny) = (self.domain_axes[0], self.domain_axes[1]);
        Self::from_fn(vec![ny, nx], self.range_size, |i| self.eval2(i[1], i[0]))
    }

    pub(crate) fn require_two_axes(&self, nx: usize, ny: usize, name: &str) -> Result<()> {
        if self.domain_axes != [nx, ny] {
            return Err(Error::Shape(format!(
                "{name} has domain {:?}, expected [{nx}, {ny}]",
                self.domain_axes
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_tables() {
        assert_eq!(FunctionTable::and2().values(), &[0, 0, 0, 1]);
        assert_eq!(FunctionTable::xor2().values(), &[0, 1, 1, 0]);
        assert!(FunctionTable::zero2().is_constant());
        let f = FunctionTable::from_fn(vec![2, 3], 6, |i| i[0] * 3 + i[1]).unwrap();
        let t = f.transposed().unwrap();
        assert_eq!(t.eval2(2, 1), f.eval2(1, 2));
    }

    #[test]
    fn rejects_out_of_range_values() {
        let err = FunctionTable::new(vec![2], 2, vec![0, 2]).unwrap_err();
        assert!(err.to_string().contains("range_size"));
        assert!(FunctionTable::new(vec![2, 2], 2, vec![0, 1]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f: FunctionTable =
            serde_json::from_str(r#"{"domain_axes":[2,2],"range_size":2,"values":[0,0,0,1]}"#)
                .unwrap();
        assert_eq!(f, FunctionTable::and2());
    }
}
