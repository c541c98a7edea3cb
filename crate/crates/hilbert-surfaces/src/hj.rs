//! Hirzebruch–Jung continued fractions and the resolution chains of cyclic
//! quotient singularities.
//!
//! A singularity of type `(d, q)` is resolved by a chain of rational curves
//! with self-intersections `−c₁, …, −c_ℓ` where `d/q = c₁ − 1/(c₂ − …)`.
//! When the singularity sits over the cusp of a level `N` surface, the two
//! cusp fibres meet the chain with multiplicities `aᵢ` and `a'ᵢ` computed by
//! [`fiber_multiplicities`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, int, inverse_mod, modulo, Rational};
use crate::error::{domain, inconsistent, Result};

/// A cyclic quotient singularity `ℂ²/μ_d` with weights `(1, q)`.
///
/// `q` is stored reduced to `1..d`. The type with `d = 1` is a smooth point
/// and carries `q = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SingularityType {
    /// Order of the cyclic group.
    pub d: u64,
    /// Weight of the second coordinate, a unit modulo `d`.
    pub q: u64,
}

impl SingularityType {
    /// Normalises `q` modulo `d` and checks that it is a unit.
    pub fn new(d: u64, q: i64) -> Result<Self> {
        if d == 0 {
            return Err(domain!("singularity order must be positive"));
        }
        if d == 1 {
            return Ok(Self { d, q: 0 });
        }
        let q = modulo(q, d);
        if gcd(q as i64, d as i64) != 1 {
            return Err(domain!("type ({d},{q}) needs gcd(d, q) = 1"));
        }
        Ok(Self { d, q })
    }

    /// True for the smooth type `d = 1`.
    pub fn is_smooth(&self) -> bool {
        self.d == 1
    }

    /// The dual weight `q' = q⁻¹ mod d`.
    pub fn dual_q(&self) -> u64 {
        inverse_mod(self.q as i64, self.d).unwrap_or(0)
    }
}

impl fmt::Display for SingularityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.d, self.q)
    }
}

/// The Hirzebruch–Jung expansion `[[c₁, …, c_ℓ]]` of `d/q`, every `cᵢ ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HJChain {
    /// The coefficients `c₁, …, c_ℓ`.
    pub coefficients: Vec<u64>,
}

impl HJChain {
    /// Number of curves in the resolution chain.
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    /// True for the empty chain of a smooth point.
    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Self-intersections `−c₁, …, −c_ℓ` of the chain components.
    pub fn self_intersections(&self) -> Vec<i64> {
        self.coefficients.iter().map(|&c| -(c as i64)).collect()
    }

    /// The continuant `K(c₁, …, c_ℓ)`, which equals `d`.
    pub fn continuant(&self) -> u64 {
        continuant(&self.coefficients)
    }

    /// Evaluates `c₁ − 1/(c₂ − 1/(… − 1/c_ℓ))` exactly, which equals `d/q`.
    pub fn value(&self) -> Rational {
        let mut iter = self.coefficients.iter().rev();
        let Some(&last) = iter.next() else {
            return int(0);
        };
        let mut acc = int(last as i64);
        for &c in iter {
            acc = int(c as i64) - acc.recip();
        }
        acc
    }
}

impl fmt::Display for HJChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coefficients.iter().map(u64::to_string).collect();
        write!(f, "[[{}]]", parts.join(","))
    }
}

/// The continuant `K(c₁, …, c_n)` with `K() = 1` and
/// `K(c₁, …, c_n) = c_n·K(c₁, …, c_{n−1}) − K(c₁, …, c_{n−2})`.
pub fn continuant(cs: &[u64]) -> u64 {
    let (mut prev, mut cur) = (0i64, 1i64);
    for &c in cs {
        let next = c as i64 * cur - prev;
        prev = cur;
        cur = next;
    }
    cur as u64
}

/// Expands `d/q` by the ceiling recurrence `c = ⌈d/q⌉`, `(d, q) ← (q, cq − d)`.
pub fn hj_expansion(d: u64, q: i64) -> Result<HJChain> {
    if d < 2 {
        return Err(domain!("continued fraction needs d >= 2, got d = {d}"));
    }
    let sing = SingularityType::new(d, q)?;
    let (mut num, mut den) = (d, sing.q);
    let mut coefficients = Vec::new();
    while den > 0 {
        let c = num.div_ceil(den);
        coefficients.push(c);
        (num, den) = (den, c * den - num);
    }
    Ok(HJChain { coefficients })
}

/// The self-intersections of the minimal resolution of a type `(d, q)` point.
///
/// Type `(d, 1)` resolves to a single `(−d)`-curve and type `(d, −1)` to a
/// chain of `d − 1` curves of self-intersection `−2`.
pub fn resolution_of_type(d: u64, q: i64) -> Result<Vec<i64>> {
    Ok(hj_expansion(d, q)?.self_intersections())
}

/// A resolution chain over the cusp together with the multiplicities of the
/// two cusp fibres along it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberChain {
    /// The singularity being resolved.
    pub sing: SingularityType,
    /// Its Hirzebruch–Jung chain `[[c₁, …, c_ℓ]]`.
    pub chain: HJChain,
    /// The level `N` of the surface.
    pub level: u64,
    /// Multiplicities `a₀, …, a_{ℓ+1}` of the first fibre; `a₀ = N`, `a_{ℓ+1} = 0`.
    pub mult_j: Vec<u64>,
    /// Multiplicities `a'₀, …, a'_{ℓ+1}` of the second fibre; `a'₀ = 0`, `a'_{ℓ+1} = N`.
    pub mult_jprime: Vec<u64>,
}

impl FiberChain {
    /// Checks the boundary values, both recurrences and non-negativity.
    pub fn check(&self) -> Result<()> {
        let cs = &self.chain.coefficients;
        let l = cs.len();
        let (a, b) = (&self.mult_j, &self.mult_jprime);
        let n = self.level;
        if a.len() != l + 2 || b.len() != l + 2 {
            return Err(inconsistent!(
                "fiber chain for {} has wrong length",
                self.sing
            ));
        }
        if a[0] != n || a[l + 1] != 0 || b[0] != 0 || b[l + 1] != n {
            return Err(inconsistent!(
                "fiber chain for {} violates boundary values",
                self.sing
            ));
        }
        for i in 1..=l {
            let c = cs[i - 1];
            let ok_a = a[i - 1] + a[i + 1] == c * a[i];
            let ok_b = b[i - 1] + b[i + 1] == c * b[i];
            if !ok_a || !ok_b {
                return Err(inconsistent!(
                    "fiber chain for {} violates the recurrence at {i}",
                    self.sing
                ));
            }
        }
        Ok(())
    }
}

/// Solves the two-point boundary problem for the fibre multiplicities over a
/// type `(d, q)` cusp singularity on a level `N` surface.
///
/// The backward recurrence `a_{i−1} = cᵢ·aᵢ − a_{i+1}` is seeded with
/// `(a_{ℓ+1}, a_ℓ) = (0, 1)` and the forward recurrence
/// `a'_{i+1} = cᵢ·a'ᵢ − a'_{i−1}` with `(a'₀, a'₁) = (0, 1)`; both seeds
/// reach `d` at the far end, and scaling by `N/d` gives the multiplicities.
pub fn fiber_multiplicities(n: u64, sing: SingularityType) -> Result<FiberChain> {
    if sing.d < 2 || !n.is_multiple_of(sing.d) {
        return Err(domain!("type {sing} does not occur at level {n}"));
    }
    let chain = hj_expansion(sing.d, sing.q as i64)?;
    let cs = &chain.coefficients;
    let l = cs.len();
    let scale = (n / sing.d) as i64;

    let mut a = vec![0i64; l + 2];
    a[l] = 1;
    for i in (1..=l).rev() {
        a[i - 1] = cs[i - 1] as i64 * a[i] - a[i + 1];
    }
    let mut b = vec![0i64; l + 2];
    b[1] = 1;
    for i in 1..=l {
        b[i + 1] = cs[i - 1] as i64 * b[i] - b[i - 1];
    }
    if a.iter().chain(b.iter()).any(|&x| x < 0) {
        return Err(inconsistent!("negative fibre multiplicity for {sing}"));
    }
    let fc = FiberChain {
        sing,
        chain: chain.clone(),
        level: n,
        mult_j: a.iter().map(|&x| (x * scale) as u64).collect(),
        mult_jprime: b.iter().map(|&x| (x * scale) as u64).collect(),
    };
    fc.check()?;
    Ok(fc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn expansions() {
        assert_eq!(hj_expansion(17, 9).unwrap().coefficients, vec![2, 9]);
        assert_eq!(hj_expansion(7, 1).unwrap().coefficients, vec![7]);
        assert_eq!(
            hj_expansion(16, 5).unwrap().coefficients,
            vec![4, 2, 2, 2, 2]
        );
        assert_eq!(hj_expansion(20, 3).unwrap().coefficients, vec![7, 3]);
        assert!(hj_expansion(12, 4).is_err());
        assert!(hj_expansion(1, 0).is_err());
    }

    #[test]
    fn resolutions() {
        assert_eq!(resolution_of_type(5, 4).unwrap(), vec![-2, -2, -2, -2]);
        assert_eq!(resolution_of_type(7, 1).unwrap(), vec![-7]);
        assert_eq!(resolution_of_type(20, 3).unwrap(), vec![-7, -3]);
        assert_eq!(resolution_of_type(9, -1).unwrap().len(), 8);
    }

    #[test]
    fn chain_values() {
        let chain = hj_expansion(20, 3).unwrap();
        assert_eq!(chain.value(), rat(20, 3));
        assert_eq!(chain.continuant(), 20);
    }

    #[test]
    fn fibre_multiplicities() {
        let fc = fiber_multiplicities(17, SingularityType::new(17, 9).unwrap()).unwrap();
        assert_eq!(fc.mult_j, vec![17, 9, 1, 0]);
        assert_eq!(fc.mult_jprime, vec![0, 1, 2, 17]);
        let fc = fiber_multiplicities(15, SingularityType::new(5, 2).unwrap()).unwrap();
        assert_eq!(fc.mult_j, vec![15, 6, 3, 0]);
        assert_eq!(fc.mult_jprime, vec![0, 3, 9, 15]);
        let fc = fiber_multiplicities(16, SingularityType::new(16, 5).unwrap()).unwrap();
        assert_eq!(fc.mult_j, vec![16, 5, 4, 3, 2, 1, 0]);
        assert_eq!(fc.mult_jprime, vec![0, 1, 4, 7, 10, 13, 16]);
        assert!(fiber_multiplicities(16, SingularityType::new(3, 1).unwrap()).is_err());
    }
}
