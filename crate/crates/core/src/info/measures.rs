//! Shannon measures in bits, read directly from a [`JointPmf`].
//!
//! Conditional quantities are evaluated slice by slice
//! (`sum_g P(g) * H(T | G = g)`) rather than as differences of joint
//! entropies, so a target that is a deterministic function of the
//! conditioning axes comes out as exactly `0.0`.

use super::pmf::{check_axes, JointPmf};
use crate::error::{domain, Result};

/// Rates and information measures, in bits per sample.
pub type Bits = f64;

/// `-p log2 p`, with `0 log 0 = 0`.
#[inline]
pub fn neg_xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Binary entropy `h2(p)`; errors outside `[0, 1]`.
pub fn binary_entropy(p: f64) -> Result<Bits> {
    crate::error::check_probability("p", p)?;
    Ok(neg_xlog2x(p) + neg_xlog2x(1.0 - p))
}

/// Binary entropy for arguments produced by closed-form arithmetic.
/// Round-off up to 1e-12 outside `[0, 1]` is clamped; anything further out
/// yields NaN.
pub fn h2(p: f64) -> Bits {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return f64::NAN;
    }
    let p = p.clamp(0.0, 1.0);
    neg_xlog2x(p) + neg_xlog2x(1.0 - p)
}

/// Entropy of a probability vector (need not be normalized to one; a
/// sub-probability vector gives the partial sum).
pub fn entropy_of(probs: &[f64]) -> Bits {
    probs.iter().map(|&p| neg_xlog2x(p)).sum()
}

/// Entropy of the marginal on `axes`.
pub fn entropy(pmf: &JointPmf, axes: &[usize]) -> Result<Bits> {
    if axes.is_empty() {
        return Err(domain("entropy needs at least one axis"));
    }
    check_axes(pmf.num_axes(), axes, "entropy")?;
    Ok(entropy_of(&pmf.project(axes)))
}

fn check_disjoint(sets: &[(&str, &[usize])]) -> Result<()> {
    for (i, (na, a)) in sets.iter().enumerate() {
        for (nb, b) in &sets[i + 1..] {
            if let Some(x) = a.iter().find(|x| b.contains(x)) {
                return Err(domain(format!("axis {x} appears in both {na} and {nb}")));
            }
        }
    }
    Ok(())
}

/// Blocks of a `given`-major layout: the table is split into
/// `len / block` consecutive groups, one per conditioning value.
fn conditional_entropy_blocks(table: &[f64], block: usize) -> Bits {
    table
        .chunks(block)
        .map(|row| {
            let pg: f64 = row.iter().sum();
            if pg <= 0.0 {
                return 0.0;
            }
            row.iter()
                .filter(|&&p| p > 0.0 && p < pg)
                .map(|&p| p * (pg / p).log2())
                .sum::<f64>()
        })
        .sum()
}

/// `H(target | given)`.
pub fn conditional_entropy(pmf: &JointPmf, target: &[usize], given: &[usize]) -> Result<Bits> {
    if target.is_empty() {
        return Err(domain("conditional entropy needs a nonempty target"));
    }
    check_axes(pmf.num_axes(), target, "target")?;
    check_axes(pmf.num_axes(), given, "given")?;
    check_disjoint(&[("target", target), ("given", given)])?;
    let mut order = given.to_vec();
    order.extend_from_slice(target);
    let table = pmf.project(&order);
    let block: usize = target.iter().map(|&a| pmf.axes()[a]).product();
    Ok(conditional_entropy_blocks(&table, block))
}

/// `I(A; B | C)`; `given` may be empty.
pub fn conditional_mutual_information(
    pmf: &JointPmf,
    a: &[usize],
    b: &[usize],
    given: &[usize],
) -> Result<Bits> {
    if a.is_empty() || b.is_empty() {
        return Err(domain("mutual information needs nonempty axis sets"));
    }
    check_axes(pmf.num_axes(), a, "a")?;
    check_axes(pmf.num_axes(), b, "b")?;
    check_axes(pmf.num_axes(), given, "given")?;
    check_disjoint(&[("a", a), ("b", b), ("given", given)])?;
    let size = |s: &[usize]| -> usize { s.iter().map(|&x| pmf.axes()[x]).product() };
    let (na, nb) = (size(a), size(b));
    let mut order = given.to_vec();
    order.extend_from_slice(a);
    order.extend_from_slice(b);
    let table = pmf.project(&order);
    let mut total = 0.0;
    let mut pa = vec![0.0; na];
    let mut pb = vec![0.0; nb];
    for block in table.chunks(na * nb) {
        let pc: f64 = block.iter().sum();
        if pc <= 0.0 {
            continue;
        }
        pa.iter_mut().for_each(|v| *v = 0.0);
        pb.iter_mut().for_each(|v| *v = 0.0);
        for (i, row) in block.chunks(nb).enumerate() {
            for (j, &p) in row.iter().enumerate() {
                pa[i] += p;
                pb[j] += p;
            }
        }
        for (i, row) in block.chunks(nb).enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    total += p * ((p * pc) / (pa[i] * pb[j])).log2();
                }
            }
        }
    }
    Ok(total)
}

/// `I(A; B)`.
pub fn mutual_information(pmf: &JointPmf, a: &[usize], b: &[usize]) -> Result<Bits> {
    conditional_mutual_information(pmf, a, b, &[])
}
