use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{
    conditional_entropy, conditional_mutual_information, Bits, FunctionTable, JointPmf,
};

/// Row-sum tolerance for conditional tables.
pub const ROW_TOLERANCE: f64 = 1e-9;

/// Terminal that sends a given message. Terminal A observes `X`, terminal
/// B observes `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Location {
    A,
    B,
}

impl Location {
    pub fn other(self) -> Self {
        match self {
            Location::A => Location::B,
            Location::B => Location::A,
        }
    }
}

/// Message rates `R_1, ..., R_t` in bits per sample.
pub type RateVector = Vec<Bits>;

/// Largest alphabet the rate region needs for `U_j` (1-based `j`):
/// `|sender| * prod_{i<j} |U_i| + t - j + 3`.
pub fn cardinality_bound(j: usize, sender_size: usize, previous: &[usize], t: usize) -> usize {
    let prod = previous
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s));
    prod.and_then(|p| p.checked_mul(sender_size))
        .and_then(|p| p.checked_add(t + 3 - j))
        .unwrap_or(usize::MAX)
}

/// A `t`-message auxiliary chain. Message `j` (0-based) is drawn from
/// `p(u_j | own, u^{j-1})`, where `own` is the sender's source symbol; the
/// sender alternates starting from `start`.
///
/// `steps[j]` is row-major with rows indexed by
/// `own * prod_{i<j} |U_i| + flat(u^{j-1})` and `sizes[j]` entries per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChain", into = "RawChain")]
pub struct AuxChain {
    start: Location,
    x_size: usize,
    y_size: usize,
    sizes: Vec<usize>,
    steps: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawChain {
    initial_location: Location,
    x_size: usize,
    y_size: usize,
    sizes: Vec<usize>,
    steps: Vec<Vec<f64>>,
}

impl TryFrom<RawChain> for AuxChain {
    type Error = Error;

    fn try_from(r: RawChain) -> Result<Self> {
        AuxChain::new(r.initial_location, r.x_size, r.y_size, r.sizes, r.steps)
    }
}

impl From<AuxChain> for RawChain {
    fn from(c: AuxChain) -> Self {
        RawChain {
            initial_location: c.start,
            x_size: c.x_size,
            y_size: c.y_size,
            sizes: c.sizes,
            steps: c.steps,
        }
    }
}

impl AuxChain {
    pub fn new(
        start: Location,
        x_size: usize,
        y_size: usize,
        sizes: Vec<usize>,
        steps: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if x_size == 0 || y_size == 0 {
            return Err(Error::InvalidChain(
                "source alphabets must be nonempty".into(),
            ));
        }
        if sizes.len() != steps.len() {
            return Err(Error::InvalidChain(format!(
                "{} alphabet sizes for {} steps",
                sizes.len(),
                steps.len()
            )));
        }
        let chain = AuxChain {
            start,
            x_size,
            y_size,
            sizes,
            steps,
        };
        let t = chain.t();
        for j in 0..t {
            let s = chain.sizes[j];
            if s == 0 {
                return Err(Error::InvalidChain(format!(
                    "U_{} has an empty alphabet",
                    j + 1
                )));
            }
            let bound = cardinality_bound(j + 1, chain.own_size(j), &chain.sizes[..j], t);
            if s > bound {
                return Err(Error::InvalidChain(format!(
                    "|U_{}| = {s} exceeds the cardinality bound {bound}",
                    j + 1
                )));
            }
            let rows = chain
                .own_size(j)
                .checked_mul(chain.prefix_count(j))
                .filter(|&r| {
                    r.checked_mul(s)
                        .is_some_and(|n| n <= crate::info::MAX_CELLS)
                })
                .ok_or_else(|| Error::Capacity(format!("step {} table is too large", j + 1)))?;
            let table = &chain.steps[j];
            if table.len() != rows * s {
                return Err(Error::InvalidChain(format!(
                    "step {} has {} entries, expected {}",
                    j + 1,
                    table.len(),
                    rows * s
                )));
            }
            for (r, row) in table.chunks(s).enumerate() {
                if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                    return Err(Error::InvalidChain(format!(
                        "step {} row {r} has a negative entry",
                        j + 1
                    )));
                }
                let total: f64 = row.iter().sum();
                if (total - 1.0).abs() > ROW_TOLERANCE {
                    return Err(Error::InvalidChain(format!(
                        "step {} row {r} sums to {total}, expected 1",
                        j + 1
                    )));
                }
            }
        }
        Ok(chain)
    }

    /// Builds each row from `f(j, own, u_prefix)`, with `j` 0-based.
    pub fn from_fn(
        start: Location,
        x_size: usize,
        y_size: usize,
        sizes: Vec<usize>,
        mut f: impl FnMut(usize, usize, &[usize]) -> Vec<f64>,
    ) -> Result<Self> {
        let mut steps = Vec::with_capacity(sizes.len());
        for j in 0..sizes.len() {
            let own = sender_size(start, j, x_size, y_size);
            let prefix_axes = &sizes[..j];
            let prefixes: usize = prefix_axes.iter().product();
            let mut table = Vec::with_capacity(own * prefixes * sizes[j]);
            for o in 0..own {
                let mut u = vec![0; j];
                for _ in 0..prefixes {
                    let row = f(j, o, &u);
                    if row.len() != sizes[j] {
                        return Err(Error::InvalidChain(format!(
                            "step {} row has {} entries, expected {}",
                            j + 1,
                            row.len(),
                            sizes[j]
                        )));
                    }
                    table.extend(row);
                    crate::info::advance(&mut u, prefix_axes);
                }
            }
            steps.push(table);
        }
        Self::new(start, x_size, y_size, sizes, steps)
    }

    /// Chain whose messages are deterministic: `u_j = g(j, own, u^{j-1})`.
    pub fn deterministic(
        start: Location,
        x_size: usize,
        y_size: usize,
        sizes: Vec<usize>,
        mut g: impl FnMut(usize, usize, &[usize]) -> usize,
    ) -> Result<Self> {
        let sz = sizes.clone();
        Self::from_fn(start, x_size, y_size, sizes, |j, o, u| {
            let mut row = vec![0.0; sz[j]];
            if let Some(slot) = row.get_mut(g(j, o, u)) {
                *slot = 1.0;
            }
            row
        })
    }

    /// `t` messages that carry nothing.
    pub fn null(start: Location, x_size: usize, y_size: usize, t: usize) -> Self {
        Self::deterministic(start, x_size, y_size, vec![1; t], |_, _, _| 0)
            .expect("singleton chain is valid")
    }

    pub fn t(&self) -> usize {
        self.sizes.len()
    }

    pub fn start(&self) -> Location {
        self.start
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn steps(&self) -> &[Vec<f64>] {
        &self.steps
    }

    /// Sender of message `j` (0-based).
    pub fn sender(&self, j: usize) -> Location {
        if j % 2 == 0 {
            self.start
        } else {
            self.start.other()
        }
    }

    pub fn own_size(&self, j: usize) -> usize {
        sender_size(self.start, j, self.x_size, self.y_size)
    }

    /// Number of `u^{j-1}` prefixes before message `j` (0-based).
    pub fn prefix_count(&self, j: usize) -> usize {
        self.sizes[..j].iter().product()
    }

    /// The conditional pmf of `U_j` given the sender's symbol and the flat
    /// prefix index.
    pub fn row(&self, j: usize, own: usize, prefix: usize) -> &[f64] {
        let s = self.sizes[j];
        let r = own * self.prefix_count(j) + prefix;
        &self.steps[j][r * s..(r + 1) * s]
    }

    /// The same chain followed by one more message with a singleton
    /// alphabet. Rates and decodability are unchanged.
    pub fn padded(&self) -> AuxChain {
        let j = self.t();
        let rows = self.own_size(j) * self.prefix_count(j);
        let mut sizes = self.sizes.clone();
        sizes.push(1);
        let mut steps = self.steps.clone();
        steps.push(vec![1.0; rows]);
        AuxChain {
            start: self.start,
            x_size: self.x_size,
            y_size: self.y_size,
            sizes,
            steps,
        }
    }

    /// The chain seen with the terminals' labels exchanged: the same
    /// tables, with `X` and `Y` alphabets and the starting terminal swapped.
    pub fn relabeled_terminals(&self) -> AuxChain {
        AuxChain {
            start: self.start.other(),
            x_size: self.y_size,
            y_size: self.x_size,
            sizes: self.sizes.clone(),
            steps: self.steps.clone(),
        }
    }

    fn check_pmf(&self, p_xy: &JointPmf) -> Result<()> {
        if p_xy.axes() != [self.x_size, self.y_size] {
            return Err(Error::Shape(format!(
                "p_XY has axes {:?}, chain expects [{}, {}]",
                p_xy.axes(),
                self.x_size,
                self.y_size
            )));
        }
        Ok(())
    }
}

fn sender_size(start: Location, j: usize, x_size: usize, y_size: usize) -> usize {
    let a_sends = (j % 2 == 0) == (start == Location::A);
    if a_sends {
        x_size
    } else {
        y_size
    }
}

/// Joint pmf over `(X, Y, U_1, ..., U_t)` obtained by drawing each message
/// from its conditional table. The Markov constraints of the rate region
/// hold by construction.
pub fn chain_joint(p_xy: &JointPmf, chain: &AuxChain) -> Result<JointPmf> {
    chain.check_pmf(p_xy)?;
    let ny = chain.y_size;
    let mut axes = vec![chain.x_size, chain.y_size];
    axes.extend_from_slice(&chain.sizes);
    crate::info::cell_count(&axes)?;
    let mut table = p_xy.probs().to_vec();
    let mut prefixes = 1usize;
    for j in 0..chain.t() {
        let s = chain.sizes[j];
        let a_sends = chain.sender(j) == Location::A;
        let step = &chain.steps[j];
        let mut next = vec![0.0; table.len() * s];
        for (flat, &p) in table.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let prefix = flat % prefixes;
            let xy = flat / prefixes;
            let own = if a_sends { xy / ny } else { xy % ny };
            let r = (own * prefixes + prefix) * s;
            for (u, &q) in step[r..r + s].iter().enumerate() {
                next[flat * s + u] = p * q;
            }
        }
        table = next;
        prefixes *= s;
    }
    JointPmf::renormalized(axes, table)
}

/// `R_j = I(X; U_j | Y, U^{j-1})` when A sends message `j`, and
/// `I(Y; U_j | X, U^{j-1})` when B sends it.
pub fn message_rates(p_xy: &JointPmf, chain: &AuxChain) -> Result<RateVector> {
    let joint = chain_joint(p_xy, chain)?;
    rates_from_joint(&joint, chain)
}

pub(crate) fn rates_from_joint(joint: &JointPmf, chain: &AuxChain) -> Result<RateVector> {
    (0..chain.t())
        .map(|j| {
            let (own, other) = match chain.sender(j) {
                Location::A => (0, 1),
                Location::B => (1, 0),
            };
            let mut given = vec![other];
            given.extend(2..2 + j);
            conditional_mutual_information(joint, &[own], &[2 + j], &given).map(|r| r.max(0.0))
        })
        .collect()
}

/// `(H(f_A | X, U^t), H(f_B | Y, U^t))`. Both vanish exactly when each
/// terminal can evaluate its function from its source and the messages.
pub fn computability_residuals(
    p_xy: &JointPmf,
    chain: &AuxChain,
    f_a: &FunctionTable,
    f_b: &FunctionTable,
) -> Result<(Bits, Bits)> {
    let joint = chain_joint(p_xy, chain)?;
    residuals_from_joint(&joint, chain, f_a, f_b)
}

pub(crate) fn residuals_from_joint(
    joint: &JointPmf,
    chain: &AuxChain,
    f_a: &FunctionTable,
    f_b: &FunctionTable,
) -> Result<(Bits, Bits)> {
    let (nx, ny) = (chain.x_size, chain.y_size);
    f_a.require_two_axes(nx, ny, "f_A")?;
    f_b.require_two_axes(nx, ny, "f_B")?;
    let t = chain.t();
    let us: Vec<usize> = (2..2 + t).collect();
    let residual = |f: &FunctionTable, own: usize| -> Result<Bits> {
        let ext = joint.augment(f.range_size(), |i| f.eval2(i[0], i[1]))?;
        let mut given = vec![own];
        given.extend_from_slice(&us);
        Ok(conditional_entropy(&ext, &[2 + t], &given)?.max(0.0))
    };
    Ok((residual(f_a, 0)?, residual(f_b, 1)?))
}

/// True when `rates` dominate the chain's rates and both residuals are
/// within `tol`, which places `rates` in the `t`-message rate region.
pub fn check_membership(
    rates: &[Bits],
    p_xy: &JointPmf,
    chain: &AuxChain,
    f_a: &FunctionTable,
    f_b: &FunctionTable,
    tol: f64,
) -> Result<bool> {
    if rates.len() != chain.t() {
        return Err(Error::Shape(format!(
            "{} rates for a {}-message chain",
            rates.len(),
            chain.t()
        )));
    }
    let joint = chain_joint(p_xy, chain)?;
    let needed = rates_from_joint(&joint, chain)?;
    let (ra, rb) = residuals_from_joint(&joint, chain, f_a, f_b)?;
    Ok(rates.iter().zip(&needed).all(|(r, n)| *r >= n - tol) && ra <= tol && rb <= tol)
}
