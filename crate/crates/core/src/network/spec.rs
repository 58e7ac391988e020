use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{cell_count, FunctionTable, JointPmf};

/// Largest number of nodes for which every cut can be enumerated.
pub const MAX_CUT_NODES: usize = 12;

/// Largest alphabet of a grouped function value (the tuple of the functions
/// wanted on one side of a cut).
const MAX_TUPLE_RANGE: usize = 1 << 20;

/// Directed network of `m` nodes. Node `j` observes axis `j` of `joint`
/// and wants `functions[j]` of all sources. Nodes are numbered from 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkSpec {
    joint: JointPmf,
    edges: Vec<(usize, usize)>,
    functions: Vec<FunctionTable>,
}

impl NetworkSpec {
    pub fn new(
        joint: JointPmf,
        edges: Vec<(usize, usize)>,
        functions: Vec<FunctionTable>,
    ) -> Result<Self> {
        let m = joint.num_axes();
        if m < 2 {
            return Err(Error::InvalidNetwork(
                "a network needs at least two nodes".into(),
            ));
        }
        if functions.len() != m {
            return Err(Error::InvalidNetwork(format!(
                "{} functions for {m} nodes",
                functions.len()
            )));
        }
        for (j, f) in functions.iter().enumerate() {
            if f.domain_axes() != joint.axes() {
                return Err(Error::Shape(format!(
                    "function of node {j} has domain {:?}, sources have alphabets {:?}",
                    f.domain_axes(),
                    joint.axes()
                )));
            }
        }
        let mut edges = edges;
        for &(a, b) in &edges {
            if a >= m || b >= m {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({a}, {b}) references a node outside 0..{m}"
                )));
            }
            if a == b {
                return Err(Error::InvalidNetwork(format!("self-loop at node {a}")));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(NetworkSpec {
            joint,
            edges,
            functions,
        })
    }

    /// Every ordered pair of distinct nodes is a link.
    pub fn complete(joint: JointPmf, functions: Vec<FunctionTable>) -> Result<Self> {
        let m = joint.num_axes();
        let edges = (0..m)
            .flat_map(|a| (0..m).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        Self::new(joint, edges, functions)
    }

    /// Same sources and functions over a different link set.
    pub fn with_edges(&self, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(self.joint.clone(), edges, self.functions.clone())
    }

    pub fn m(&self) -> usize {
        self.joint.num_axes()
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn functions(&self) -> &[FunctionTable] {
        &self.functions
    }

    /// Validates a node subset for use as one side of a cut and returns it
    /// sorted.
    pub fn cut_side(&self, s: &[usize]) -> Result<Vec<usize>> {
        let m = self.m();
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        if let Some(&bad) = s.iter().find(|&&j| j >= m) {
            return Err(Error::InvalidNetwork(format!(
                "node {bad} is outside 0..{m}"
            )));
        }
        if s.is_empty() || s.len() == m {
            return Err(Error::InvalidNetwork(format!(
                "cut side {s:?} must be a proper nonempty subset of the nodes"
            )));
        }
        Ok(s)
    }

    pub fn complement(&self, s: &[usize]) -> Vec<usize> {
        (0..self.m()).filter(|j| !s.contains(j)).collect()
    }

    /// Collapses the cut `(S, S^c)` into a two-terminal problem: the pmf of
    /// `(X_S, X_{S^c})` with each side's sources flattened to one symbol, and
    /// the tuples of functions wanted on each side.
    pub fn group_cut(&self, s: &[usize]) -> Result<GroupedCut> {
        let s = self.cut_side(s)?;
        let sc = self.complement(&s);
        let axes = self.joint.axes();
        let size_of =
            |nodes: &[usize]| cell_count(&nodes.iter().map(|&j| axes[j]).collect::<Vec<_>>());
        let (na, nb) = (size_of(&s)?, size_of(&sc)?);
        let range_of = |nodes: &[usize]| -> Result<usize> {
            let r = nodes.iter().try_fold(1usize, |acc, &j| {
                acc.checked_mul(self.functions[j].range_size())
            });
            match r {
                Some(r) if r <= MAX_TUPLE_RANGE => Ok(r),
                _ => Err(Error::Capacity(format!(
                    "functions wanted at {nodes:?} have too many joint values"
                ))),
            }
        };
        let (ra, rb) = (range_of(&s)?, range_of(&sc)?);
        let flatten =
            |x: &[usize], nodes: &[usize]| nodes.iter().fold(0, |acc, &j| acc * axes[j] + x[j]);
        let tuple = |flat: usize, nodes: &[usize]| {
            nodes.iter().fold(0, |acc, &j| {
                acc * self.functions[j].range_size() + self.functions[j].at_flat(flat)
            })
        };
        let mut probs = vec![0.0; na * nb];
        let mut va = vec![0usize; na * nb];
        let mut vb = vec![0usize; na * nb];
        for (flat, (x, p)) in self.joint.cells().enumerate() {
            let cell = flatten(&x, &s) * nb + flatten(&x, &sc);
            probs[cell] = p;
            va[cell] = tuple(flat, &s);
            vb[cell] = tuple(flat, &sc);
        }
        Ok(GroupedCut {
            s,
            complement: sc,
            pmf: JointPmf::new(vec![na, nb], probs)?,
            f_s: FunctionTable::new(vec![na, nb], ra, va)?,
            f_complement: FunctionTable::new(vec![na, nb], rb, vb)?,
        })
    }
}

/// Two-terminal view of a cut: terminal A holds the sources of `s`, terminal
/// B those of `complement`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedCut {
    pub s: Vec<usize>,
    pub complement: Vec<usize>,
    pub pmf: JointPmf,
    pub f_s: FunctionTable,
    pub f_complement: FunctionTable,
}

/// Ordered list of active link sets, one per round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolSchedule {
    rounds: Vec<Vec<(usize, usize)>>,
}

impl ProtocolSchedule {
    /// Checks that every active link is a link of `net`.
    pub fn new(net: &NetworkSpec, rounds: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        for (i, round) in rounds.iter().enumerate() {
            for e in round {
                if net.edges.binary_search(e).is_err() {
                    return Err(Error::InvalidSchedule(format!(
                        "round {} uses link {e:?}, which is not in the network",
                        i + 1
                    )));
                }
            }
        }
        Ok(ProtocolSchedule { rounds })
    }

    pub fn rounds(&self) -> &[Vec<(usize, usize)>] {
        &self.rounds
    }

    pub fn t(&self) -> usize {
        self.rounds.len()
    }

    /// Links used in at least one round, sorted.
    pub fn active_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.rounds.iter().flatten().copied().collect();
        e.sort_unstable();
        e.dedup();
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{conditional_entropy, dsbs};

    fn xor_at_third(p: f64) -> NetworkSpec {
        let joint = JointPmf::product(&[vec![1.0 - p, p], vec![1.0 - p, p], vec![1.0]]).unwrap();
        let zero = FunctionTable::constant(vec![2, 2, 1], 0).unwrap();
        let xor = FunctionTable::from_fn(vec![2, 2, 1], 2, |x| x[0] ^ x[1]).unwrap();
        NetworkSpec::complete(joint, vec![zero.clone(), zero, xor]).unwrap()
    }

    #[test]
    fn validation() {
        let net = xor_at_third(0.2);
        assert_eq!(net.edges().len(), 6);
        assert!(net.with_edges(vec![(0, 0)]).is_err());
        assert!(net.with_edges(vec![(0, 3)]).is_err());
        assert!(net.cut_side(&[]).is_err());
        assert!(net.cut_side(&[0, 1, 2]).is_err());
        assert_eq!(net.cut_side(&[2, 0, 2]).unwrap(), vec![0, 2]);
        let sched = ProtocolSchedule::new(&net, vec![vec![(0, 1)], vec![(1, 2), (0, 1)]]).unwrap();
        assert_eq!(sched.active_edges(), vec![(0, 1), (1, 2)]);
        let star = net.with_edges(vec![(0, 2), (1, 2)]).unwrap();
        assert!(ProtocolSchedule::new(&star, vec![vec![(0, 1)]]).is_err());
    }

    #[test]
    fn grouping_preserves_the_source() {
        let joint = dsbs(0.2).unwrap();
        let f = FunctionTable::and2();
        let zero = FunctionTable::zero2();
        let net = NetworkSpec::complete(joint.clone(), vec![zero, f]).unwrap();
        let g = net.group_cut(&[0]).unwrap();
        assert_eq!(g.pmf, joint);
        assert_eq!(g.f_complement.values(), FunctionTable::and2().values());

        let net = xor_at_third(0.2);
        let g = net.group_cut(&[0]).unwrap();
        assert_eq!(g.pmf.axes(), &[2, 2]);
        let h = conditional_entropy(
            &g.pmf
                .augment(2, |x| g.f_complement.eval2(x[0], x[1]))
                .unwrap(),
            &[2],
            &[1],
        )
        .unwrap();
        assert!((h - crate::info::h2(0.2)).abs() < 1e-12);
    }
}
