//! Invariants of the surfaces `Z(N, r)` and `W(N, r)`.
//!
//! Starting from the level `(N, r)` this module builds the singularity census
//! of `Z(N, r)`, the components of the fixed locus of the swap involution,
//! the isolated fixed points, the blow-down corrections, and from these the
//! geometric genus, the canonical self-intersection and the Kodaira dimension
//! of `W(N, r)`. The two invariants `p_g(Z̃)` and `K²_Z̃` are inputs read from
//! [`BaseData`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    divides_exactly, divisors, euler_phi, gcd, h_3n2, h_4n2, int, is_unit_square, modulo, rat, rho,
    split_two, to_integer, units, Rational,
};
use crate::error::{domain, inconsistent, Error, Result};
use crate::gl2::{involution_families, InvolutionFamily};
use crate::hj::{fiber_multiplicities, FiberChain, SingularityType};
use crate::modular_curves::{
    c_infty_self_intersection, fricke_fixed_count, fricke_on_cusp, weyl_aux, weyl_family_signature,
    x0_cusps, x0_invariants, x0plus_is_rational, x1_genus, CurveSignature, CuspX0, WeylFamily,
    RATIONAL_X0_PLUS,
};

/// A surface label `(N, r)` with `r` a unit modulo `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Level {
    /// The level `N ≥ 2`.
    pub n: u64,
    /// The determinant class `r`, in `1..N`.
    pub r: u64,
    /// The 2-adic valuation of `N`.
    pub k: u32,
    /// The odd part of `N`.
    pub m: u64,
}

impl Level {
    /// The level `(N, r)` with `r` replaced by the least positive element of
    /// its square class `{x²r mod N}`.
    pub fn new(n: u64, r: i64) -> Result<Self> {
        let level = Self::with_representative(n, r)?;
        Ok(Self {
            r: square_class_representative(n, level.r),
            ..level
        })
    }

    /// The level `(N, r)` keeping the given representative, reduced into `1..N`.
    pub fn with_representative(n: u64, r: i64) -> Result<Self> {
        if n < 2 {
            return Err(domain!("level must satisfy N >= 2, got {n}"));
        }
        if gcd(r, n as i64) != 1 {
            return Err(domain!("r = {r} is not a unit modulo N = {n}"));
        }
        let r = if n == 2 { 1 } else { modulo(r, n) };
        let (k, m) = split_two(n);
        Ok(Self { n, r, k, m })
    }

    /// `r` as a signed integer.
    pub fn ri(&self) -> i64 {
        self.r as i64
    }

    fn r_mod(&self, q: u64) -> u64 {
        self.r % q
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.r)
    }
}

/// The least positive element of `{x²r mod N : x a unit}`.
pub fn square_class_representative(n: u64, r: u64) -> u64 {
    if n <= 2 {
        return 1;
    }
    units(n)
        .into_iter()
        .map(|x| ((x as u128 * x as u128 * r as u128) % n as u128) as u64)
        .min()
        .unwrap_or(r)
}

fn half(x: u64, what: &str) -> Result<u64> {
    if !x.is_multiple_of(2) {
        return Err(domain!("{what} = {x}/2 is not an integer"));
    }
    Ok(x / 2)
}

fn nonneg(x: i64, what: &str) -> Result<u64> {
    u64::try_from(x).map_err(|_| inconsistent!("{what} = {x} is negative"))
}

/// The singular points of `Z(N, r)` by type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularityCensus {
    /// Number of points of type `(2, 1)` above `j = 1728`.
    pub at_1728: u64,
    /// Points above `j = 0`, of types `(3, 1)` and `(3, 2)`.
    pub at_0: Vec<(SingularityType, u64)>,
    /// Points above `j = ∞`, of types `(d, q)` with `d | N`, `d ≠ 1`.
    pub at_infty: Vec<(SingularityType, u64)>,
}

impl SingularityCensus {
    /// All `(type, count)` pairs with nonzero count, `(2,1)` first.
    pub fn entries(&self) -> Vec<(SingularityType, u64)> {
        let mut out = Vec::new();
        if self.at_1728 > 0 {
            out.push((SingularityType { d: 2, q: 1 }, self.at_1728));
        }
        out.extend(
            self.at_0
                .iter()
                .chain(&self.at_infty)
                .filter(|(_, c)| *c > 0)
                .copied(),
        );
        out
    }

    /// Total number of exceptional curves in the minimal resolution.
    pub fn exceptional_curves(&self) -> Result<u64> {
        let mut total = 0;
        for (sing, count) in self.entries() {
            total += count * crate::hj::hj_expansion(sing.d, sing.q as i64)?.len() as u64;
        }
        Ok(total)
    }
}

/// The singular points of `Z(N, r)`: `h(−4N²)` points of type `(2,1)`,
/// `h(−3N²)` points above `j = 0` and `ρ(d, qr)·φ(N/d)/2` points of each type
/// `(d, q)` above the cusp.
///
/// Fails with a domain error when a count is not an integer, which happens
/// only for `N = 2` and `N = 4`.
pub fn singularity_census(level: &Level) -> Result<SingularityCensus> {
    let n = level.n;
    let h3 = h_3n2(n);
    let at_0 = if !n.is_multiple_of(3) {
        let c = half(h3, "points of type (3,q)")?;
        vec![
            (SingularityType::new(3, 1)?, c),
            (SingularityType::new(3, 2)?, c),
        ]
    } else {
        vec![(SingularityType::new(3, level.ri())?, h3)]
    };
    let mut at_infty = Vec::new();
    for d in divisors(n).into_iter().filter(|&d| d != 1) {
        for q in units(d) {
            let c = rho(d, q as i64 * level.ri()) * euler_phi(n / d);
            if c > 0 {
                at_infty.push((SingularityType::new(d, q as i64)?, half(c, "cusp points")?));
            }
        }
    }
    Ok(SingularityCensus {
        at_1728: h_4n2(n),
        at_0,
        at_infty,
    })
}

/// One irreducible family of curves in the fixed locus of the swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedLocusComponent {
    /// Which conjugacy class of involutions defines it.
    pub family: InvolutionFamily,
    /// Signature of one geometric component.
    pub signature: CurveSignature,
    /// The intersection number `K_Z̃·F̃`.
    pub k_dot: i64,
    /// Whether the component lies in the support `S` of the fixed curve on `Z°`.
    pub in_support_s: bool,
}

/// `K_Z̃·F̃` for a family, from the auxiliary quantities of the odd part.
pub fn k_dot_f(level: &Level, family: InvolutionFamily) -> Result<Rational> {
    let (k, r) = (level.k, level.ri());
    let a = weyl_aux(level.m, r)?;
    let p2 = |e: u32| int(1i64 << e);
    let third = rat(1, 3);
    let value = match (WeylFamily::of_involution(family), k) {
        (None, _) => int(-1),
        (Some(WeylFamily::Weyl), 0) => &third * &a.mu - int(2) * &a.einf - &third * &a.e3,
        (Some(WeylFamily::IWeyl), 1) => &third * &a.mu - &a.einf - &third * &a.e3,
        (Some(WeylFamily::AntidiagWeyl), 1) => &a.mu - int(3) * &a.einf,
        (Some(WeylFamily::AntidiagWeyl), k) if k >= 2 => {
            p2(2 * k - 2) * &a.mu - int(3) * p2(k - 1) * &a.einf
        }
        (Some(WeylFamily::NsWeyl), k) if k >= 2 => {
            p2(2 * k - 3) * &third * &a.mu - p2(k - 2) * &a.einf - rat(2, 3) * &a.e3
        }
        (Some(WeylFamily::SWeyl), k) if k >= 2 => {
            p2(2 * k - 3) * &a.mu - int(3) * p2(k - 2) * &a.einf
        }
        _ => return Err(domain!("family {family} does not occur at level {level}")),
    };
    Ok(value)
}

/// The components of the fixed curve of the swap on `Z̃(N, r)`, one per
/// conjugacy class of involutions, with signatures and `K_Z̃·F̃`.
///
/// The families `λ·g_I` and `λ·(g_borel, g_I)` give `(−1)`-curves that are
/// contracted before the quotient is taken, so they lie outside `S`.
pub fn fixed_locus(level: &Level) -> Result<Vec<FixedLocusComponent>> {
    let mut out = Vec::new();
    for family in involution_families(level.n, level.ri())? {
        let (signature, in_support_s) = match family {
            InvolutionFamily::Scalar { .. } => (CurveSignature::new(1, 1, 1, 1, 1)?, false),
            InvolutionFamily::Borel { .. } => (CurveSignature::new(3, 1, 0, 2, 1)?, false),
            other => {
                let wf = WeylFamily::of_involution(other)
                    .ok_or_else(|| inconsistent!("{other} has no closed form"))?;
                (weyl_family_signature(level.n, level.ri(), wf)?, true)
            }
        };
        let k_dot = to_integer(&k_dot_f(level, family)?, "K.F")?;
        out.push(FixedLocusComponent {
            family,
            signature,
            k_dot,
            in_support_s,
        });
    }
    Ok(out)
}

/// One divisor's contribution to [`err`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrTerm {
    /// The divisor `n` of `m`.
    pub n: u64,
    /// The type `(N, q)` met, with `m ≡ n²q (mod N)`.
    pub q: u64,
    /// The chain index `k(n)`.
    pub k: usize,
    /// The coefficient `s(n) > 0`.
    pub s: u64,
    /// The coefficient `t(n) ≥ 0`.
    pub t: u64,
    /// `φ(g)·((s + t)/g − 1)` with `g = gcd(s, t)`.
    pub contribution: u64,
}

/// The correction `err(N, m)` together with its per-divisor terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrBreakdown {
    /// The total.
    pub total: u64,
    /// One term per divisor of `m`.
    pub terms: Vec<ErrTerm>,
}

/// The type `(N, q)` with `m ≡ n²q (mod N)`, for `n` coprime to `N`.
fn cusp_type(n_level: u64, m: u64, n: u64) -> Result<SingularityType> {
    let inv = crate::arith::inverse_mod((n * n) as i64, n_level)
        .ok_or_else(|| domain!("{n} is not a unit modulo {n_level}"))?;
    let q = (m as u128 * inv as u128 % n_level as u128) as i64;
    SingularityType::new(n_level, q)
}

/// `err(N, m) = Σ_{n|m} φ(g)((s + t)/g − 1)`, where `(s, t)` expresses the
/// point `(m/n, n)` in the cone spanned by consecutive multiplicity vectors
/// `(a_k, a'_k)` and `(a_{k−1}, a'_{k−1})` of the chain of type `(N, q)`.
///
/// Requires `gcd(m, N) = 1`.
pub fn err(n_level: u64, m: u64) -> Result<ErrBreakdown> {
    if n_level < 2 || m == 0 || gcd(m as i64, n_level as i64) != 1 {
        return Err(domain!(
            "err needs N >= 2, m >= 1 and gcd(m, N) = 1, got N = {n_level}, m = {m}"
        ));
    }
    let mut terms = Vec::new();
    for n in divisors(m) {
        let sing = cusp_type(n_level, m, n)?;
        let fc = fiber_multiplicities(n_level, sing)?;
        let (a, b) = (&fc.mult_j, &fc.mult_jprime);
        let (mm, n2) = (m as i128, (n * n) as i128);
        let k = (1..a.len())
            .find(|&k| {
                let left = b[k - 1] == 0 || (a[k - 1] as i128) * n2 > mm * b[k - 1] as i128;
                let right = mm * b[k] as i128 >= (a[k] as i128) * n2;
                left && right
            })
            .ok_or_else(|| inconsistent!("no chain index for N = {n_level}, m = {m}, n = {n}"))?;
        let (ca, cb, cc, cd) = (
            a[k] as i128,
            a[k - 1] as i128,
            b[k] as i128,
            b[k - 1] as i128,
        );
        let det = (ca * cd - cb * cc) * n as i128;
        let s_num = mm * cd - cb * n2;
        let t_num = ca * n2 - cc * mm;
        if det == 0 || s_num % det != 0 || t_num % det != 0 {
            return Err(inconsistent!(
                "non-integral cone coordinates for N = {n_level}, m = {m}, n = {n}"
            ));
        }
        let (s, t) = (s_num / det, t_num / det);
        if s <= 0 || t < 0 {
            return Err(inconsistent!(
                "cone coordinates ({s}, {t}) out of range for N = {n_level}, m = {m}, n = {n}"
            ));
        }
        let (s, t) = (s as u64, t as u64);
        let g = gcd(s as i64, t as i64);
        let contribution = euler_phi(g) * ((s + t) / g - 1);
        terms.push(ErrTerm {
            n,
            q: sing.q,
            k,
            s,
            t,
            contribution,
        });
    }
    Ok(ErrBreakdown {
        total: terms.iter().map(|t| t.contribution).sum(),
        terms,
    })
}

fn check_fm_level(level: &Level, m: u64) -> Result<()> {
    if m == 0
        || gcd(m as i64, level.n as i64) != 1
        || !is_unit_square(level.n, m as i64 * level.ri())
    {
        return Err(domain!(
            "m = {m} must be coprime to N with m*r a square modulo N at level {level}"
        ));
    }
    Ok(())
}

/// How one cusp of `X₀(m)` meets the resolution chain over the cusp.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspIncidence {
    /// The cusp `[c, n]`.
    pub cusp: CuspX0,
    /// Width of the Fricke image of the cusp.
    pub fricke_width: u64,
    /// The chain met, with its fibre multiplicities.
    pub chain: FiberChain,
    /// Every nonnegative solution `(m₀, …, m_{ℓ+1})` of the width equations.
    pub solutions: Vec<Vec<u64>>,
}

impl CuspIncidence {
    /// True when exactly one multiplicity vector solves the width equations.
    pub fn is_unique(&self) -> bool {
        self.solutions.len() == 1
    }

    /// The solution when it is unique.
    pub fn multiplicities(&self) -> Option<&[u64]> {
        match self.solutions.as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }

    /// Chain components `1..=ℓ` met with positive multiplicity by the unique solution.
    pub fn chain_components_met(&self) -> Vec<usize> {
        let l = self.chain.chain.len();
        self.multiplicities()
            .map(|v| (1..=l).filter(|&i| v[i] > 0).collect())
            .unwrap_or_default()
    }

    /// Re-evaluates `Σ aᵢmᵢ` and `Σ a'ᵢmᵢ` for every solution against the two widths.
    pub fn widths_balance(&self) -> bool {
        !self.solutions.is_empty()
            && self.solutions.iter().all(|v| {
                let dot = |w: &[u64]| w.iter().zip(v).map(|(x, y)| x * y).sum::<u64>();
                dot(&self.chain.mult_j) == self.cusp.width
                    && dot(&self.chain.mult_jprime) == self.fricke_width
            })
    }
}

fn width_solutions(a: &[u64], b: &[u64], w1: u64, w2: u64) -> Vec<Vec<u64>> {
    fn go(
        i: usize,
        a: &[u64],
        b: &[u64],
        w1: u64,
        w2: u64,
        cur: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if i == a.len() {
            if w1 == 0 && w2 == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let max = w1.checked_div(a[i]).unwrap_or_else(|| w2 / b[i]);
        for x in 0..=max {
            if a[i] * x > w1 || b[i] * x > w2 {
                break;
            }
            cur.push(x);
            go(i + 1, a, b, w1 - a[i] * x, w2 - b[i] * x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, a, b, w1, w2, &mut Vec::new(), &mut out);
    out
}

/// For every cusp `[c, n]` of `X₀(m)`, the chain of type `(N, q)` with
/// `m ≡ n²q (mod N)` that `F̃_m` meets, and the multiplicities `mᵢ ≥ 0`
/// solving `Σ aᵢmᵢ = width([c, n])` and `Σ a'ᵢmᵢ = width(Fricke([c, n]))`.
pub fn fm_cusp_incidence(level: &Level, m: u64) -> Result<Vec<CuspIncidence>> {
    check_fm_level(level, m)?;
    let mut out = Vec::new();
    for cusp in x0_cusps(m)? {
        let chain = fiber_multiplicities(level.n, cusp_type(level.n, m, cusp.d)?)?;
        let fricke_width = fricke_on_cusp(&cusp)?.width;
        let solutions =
            width_solutions(&chain.mult_j, &chain.mult_jprime, cusp.width, fricke_width);
        if solutions.is_empty() {
            return Err(inconsistent!(
                "cusp {cusp} of X0({m}) has no multiplicity solution on chain {}",
                chain.chain
            ));
        }
        out.push(CuspIncidence {
            cusp,
            fricke_width,
            chain,
            solutions,
        });
    }
    Ok(out)
}

/// A CM datum `(D, a, b)` with `4m² − a² = b²D` that could carry a singular
/// point of `F̃_m` away from the cusp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmObstruction {
    /// The positive integer `D`, with `−D` the discriminant.
    pub disc: u64,
    /// `0 ≤ a < 2m`.
    pub a: u64,
    /// A nonzero multiple of `N`.
    pub b: i64,
}

/// All `(D, a, b)` with `0 ≤ a < 2m`, `N | b ≠ 0`, `4m² − a² = b²D`, and
/// either `−D ≡ 0 (mod 4)` with `a/2 ≡ ±1 (mod N)` or `−D ≡ 1 (mod 4)` with
/// `(a − b)/2 ≡ ±1 (mod N)`. An empty list certifies that `F̃_m` is smooth
/// away from the cusp.
pub fn fm_smoothness_obstructions(level: &Level, m: u64) -> Result<Vec<CmObstruction>> {
    check_fm_level(level, m)?;
    let n = level.n as i64;
    let four_m2 = 4 * (m * m) as i64;
    let pm_one = |x: i64| matches!(x.rem_euclid(n), 1) || (x + 1).rem_euclid(n) == 0;
    let mut out = Vec::new();
    let mut b = n;
    while b * b <= four_m2 {
        for a in 0..2 * m as i64 {
            let v = four_m2 - a * a;
            if v % (b * b) != 0 {
                continue;
            }
            let disc = v / (b * b);
            match disc.rem_euclid(4) {
                0 if a % 2 == 0 && pm_one(a / 2) => {
                    out.push(CmObstruction {
                        disc: disc as u64,
                        a: a as u64,
                        b,
                    });
                }
                3 => {
                    for sb in [b, -b] {
                        if (a - sb) % 2 == 0 && pm_one((a - sb) / 2) {
                            out.push(CmObstruction {
                                disc: disc as u64,
                                a: a as u64,
                                b: sb,
                            });
                        }
                    }
                }
                _ => {}
            }
        }
        b += n;
    }
    Ok(out)
}

/// Isolated fixed points of the swap on `Z̃(N, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolatedFixedPoints {
    /// Points of type `P₁`: `ρ(N, r)/2`.
    pub p1: u64,
    /// Points of types `P₂` and `P₂′` together: `ρ(N, 2r)` for odd `N`.
    pub p2: u64,
    /// Points of type `P₃`: `ρ(N, 3r)/2`.
    pub p3: u64,
    /// Points over the cusp.
    pub p_inf: u64,
}

impl IsolatedFixedPoints {
    /// The total count.
    pub fn total(&self) -> u64 {
        self.p1 + self.p2 + self.p3 + self.p_inf
    }
}

/// Curve components and isolated points of the fixed locus, together with
/// the counts `s₂,₁` and `s₃,₂` of fixed singular points above `j = 1728`
/// and `j = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointCensus {
    /// One-dimensional components.
    pub components: Vec<FixedLocusComponent>,
    /// Isolated points.
    pub isolated: IsolatedFixedPoints,
    /// `s₂,₁(N, r)`.
    pub s21: u64,
    /// `s₃,₂(N, r)`.
    pub s32: u64,
}

/// `s₂,₁(N, r)`: `h(−4N²)/2` if `4 ∤ N`, `h(−4N²)` if `4 | N` and
/// `r ≡ 3 (mod 4)`, and `0` otherwise.
pub fn s21(level: &Level) -> Result<u64> {
    let h = h_4n2(level.n);
    if !level.n.is_multiple_of(4) {
        half(h, "s21")
    } else if level.r_mod(4) == 3 {
        Ok(h)
    } else {
        Ok(0)
    }
}

/// `s₃,₂(N, r)`: `h(−3N²)/2` if `3 ∤ N`, `h(−3N²)` if `3 | N` and
/// `r ≡ 2 (mod 3)`, and `0` otherwise.
pub fn s32(level: &Level) -> Result<u64> {
    let h = h_3n2(level.n);
    if !level.n.is_multiple_of(3) {
        half(h, "s32")
    } else if level.r_mod(3) == 2 {
        Ok(h)
    } else {
        Ok(0)
    }
}

/// Isolated fixed points over the cusp, keyed by `(k, r mod 8)`.
fn cusp_fixed_points(level: &Level) -> Result<u64> {
    let (n, k, m, r) = (level.n, level.k, level.m, level.ri());
    Ok(match k {
        0 => half(rho(n, r), "P_inf")?,
        1 => half(rho(m, r), "P_inf")?,
        2 if level.r_mod(4) == 3 => rho(m, r),
        2 => 0,
        _ => {
            let r8 = level.r_mod(8);
            if (k >= 4 && r8 == 1) || (k == 3 && r8 == 5) {
                2 * rho(m, r)
            } else {
                0
            }
        }
    })
}

/// The fixed-point census of the swap on `Z̃(N, r)`, for `N ≥ 5`.
pub fn fixed_point_census(level: &Level) -> Result<FixedPointCensus> {
    if level.n < 5 {
        return Err(domain!("fixed-point census needs N >= 5, got {level}"));
    }
    let (n, r) = (level.n, level.ri());
    let isolated = IsolatedFixedPoints {
        p1: half(rho(n, r), "P1")?,
        p2: if n % 2 == 1 { rho(n, 2 * r) } else { 0 },
        p3: half(rho(n, 3 * r), "P3")?,
        p_inf: cusp_fixed_points(level)?,
    };
    Ok(FixedPointCensus {
        components: fixed_locus(level)?,
        isolated,
        s21: s21(level)?,
        s32: s32(level)?,
    })
}

/// Surface classes of the Enriques–Kodaira classification that occur here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EKClass {
    /// Kodaira dimension `−1`.
    Rational,
    /// Kodaira dimension `0`: an elliptic K3 surface, possibly blown up.
    #[serde(rename = "blown_up_elliptic_K3")]
    BlownUpEllipticK3,
    /// Kodaira dimension `1`.
    ProperlyElliptic,
    /// Kodaira dimension `2`.
    GeneralType,
}

impl EKClass {
    /// The Kodaira dimension.
    pub fn kappa(self) -> i8 {
        match self {
            Self::Rational => -1,
            Self::BlownUpEllipticK3 => 0,
            Self::ProperlyElliptic => 1,
            Self::GeneralType => 2,
        }
    }

    /// The class with Kodaira dimension `min(2, p_g − 1)`.
    pub fn from_geometric_genus(pg: i64) -> Self {
        match (pg - 1).min(2) {
            i64::MIN..=-1 => Self::Rational,
            0 => Self::BlownUpEllipticK3,
            1 => Self::ProperlyElliptic,
            _ => Self::GeneralType,
        }
    }
}

impl fmt::Display for EKClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rational => "rational",
            Self::BlownUpEllipticK3 => "blown_up_elliptic_K3",
            Self::ProperlyElliptic => "properly_elliptic",
            Self::GeneralType => "general_type",
        })
    }
}

fn listed(level: &Level, pairs: &[(u64, u64)]) -> bool {
    pairs.contains(&(level.n, square_class_representative(level.n, level.r)))
}

/// The classification of `Z(N, r)` from the explicit lists.
pub fn classify_z_by_list(level: &Level) -> EKClass {
    if level.n <= 5 || listed(level, &[(6, 1), (7, 1), (8, 1)]) {
        EKClass::Rational
    } else if listed(level, &[(6, 5), (7, 3), (8, 3), (8, 5), (9, 1), (12, 1)]) {
        EKClass::BlownUpEllipticK3
    } else if listed(level, &[(8, 7), (9, 2), (10, 1), (10, 3), (11, 1)]) {
        EKClass::ProperlyElliptic
    } else {
        EKClass::GeneralType
    }
}

/// The classification of `W(N, r)` from the explicit lists.
pub fn classify_w_by_list(level: &Level) -> EKClass {
    let rational = [
        (15, 1),
        (15, 2),
        (15, 11),
        (16, 1),
        (16, 3),
        (16, 7),
        (18, 5),
        (20, 11),
        (24, 23),
    ];
    if level.n <= 14 || listed(level, &rational) {
        EKClass::Rational
    } else if level.n == 17 || listed(level, &[(16, 5), (18, 1), (20, 1), (20, 3), (21, 2)]) {
        EKClass::BlownUpEllipticK3
    } else if level.n == 19 || listed(level, &[(15, 7), (21, 5), (22, 1), (24, 11)]) {
        EKClass::ProperlyElliptic
    } else {
        EKClass::GeneralType
    }
}

/// Classifies `Z(N, r)`; when base data covers the level, the list result is
/// checked against `min(2, p_g(Z̃) − 1)`.
pub fn classify_z(level: &Level, base: &BaseData) -> Result<EKClass> {
    let by_list = classify_z_by_list(level);
    if let Ok(row) = base.get(level) {
        let by_genus = EKClass::from_geometric_genus(row.pg_z);
        if by_genus != by_list {
            return Err(inconsistent!(
                "Z{level}: list gives {by_list}, p_g gives {by_genus}"
            ));
        }
    }
    Ok(by_list)
}

/// Classifies `W(N, r)`; when base data covers the level, the list result is
/// checked against `min(2, p_g(W) − 1)`.
pub fn classify_w(level: &Level, base: &BaseData) -> Result<EKClass> {
    let by_list = classify_w_by_list(level);
    if classify_z_by_list(level) != EKClass::Rational && base.get(level).is_ok() {
        let by_genus = EKClass::from_geometric_genus(pg_w(level, base)?);
        if by_genus != by_list {
            return Err(inconsistent!(
                "W{level}: list gives {by_list}, p_g gives {by_genus}"
            ));
        }
    }
    Ok(by_list)
}

fn require_z_nonrational(level: &Level) -> Result<()> {
    if classify_z_by_list(level) == EKClass::Rational {
        return Err(domain!("Z{level} is rational"));
    }
    Ok(())
}

/// The corrections `(ΔK², Δ_KF)` from contracting the `(−1)`-curves in the
/// fixed locus and over the cusp, keyed by `(k, r mod 8)`.
pub fn blowdown_deltas(level: &Level) -> Result<(i64, i64)> {
    require_z_nonrational(level)?;
    let (n, k, m, r) = (level.n, level.k, level.m, level.ri());
    let rh = |d: u64, x: i64| rho(d, x) as i64;
    let halves = |twice: i64| -> Result<i64> {
        if twice % 2 != 0 {
            return Err(inconsistent!(
                "blow-down delta {twice}/2 at {level} is not integral"
            ));
        }
        Ok(twice / 2)
    };
    Ok(match k {
        0 => (
            halves(4 * rh(n, r) + 2 * rh(n, 2 * r) + rh(n, 3 * r))?,
            halves(3 * rh(n, r) + 2 * rh(n, 2 * r) + rh(n, 3 * r))?,
        ),
        1 => (
            halves(6 * rh(m, r) + rh(m, 3 * r))?,
            halves(4 * rh(m, r) + rh(m, 3 * r))?,
        ),
        2 if level.r_mod(4) == 1 => (5 * rh(m, r), 3 * rh(m, r)),
        2 => {
            let v = rh(m, r) + rh(m, 3 * r);
            (v, v)
        }
        _ => match level.r_mod(8) {
            1 if k == 3 => (10 * rh(m, r), 6 * rh(m, r)),
            1 => (12 * rh(m, r), 8 * rh(m, r)),
            3 => (2 * rh(m, 3 * r), 2 * rh(m, 3 * r)),
            5 if k == 3 => (2 * rh(m, r), 2 * rh(m, r)),
            _ => (0, 0),
        },
    })
}

fn support_components(level: &Level) -> Result<Vec<FixedLocusComponent>> {
    Ok(fixed_locus(level)?
        .into_iter()
        .filter(|c| c.in_support_s)
        .collect())
}

/// The geometric genus of `W(N, r)`:
/// `(p_g(Z̃) − (Σ_S K·F − Δ_KF)/4 − 1)/2`.
pub fn pg_w(level: &Level, base: &BaseData) -> Result<i64> {
    require_z_nonrational(level)?;
    let row = base.get(level)?;
    let (_, dkf) = blowdown_deltas(level)?;
    let kf: i64 = support_components(level)?.iter().map(|c| c.k_dot).sum();
    let value = (int(row.pg_z) - rat(kf - dkf, 4) - int(1)) / int(2);
    let pg = to_integer(&value, "p_g(W)")?;
    nonneg(pg, "p_g(W)")?;
    Ok(pg)
}

/// `K_W² = (K²_Z̃ − Σ_S(3K·F − 2g(F) + 2) + ΔK² + 3Δ_KF)/2`.
pub fn kw_squared(level: &Level, base: &BaseData) -> Result<i64> {
    require_z_nonrational(level)?;
    let row = base.get(level)?;
    let (dk2, dkf) = blowdown_deltas(level)?;
    let two_kf_minus_f2: i64 = support_components(level)?
        .iter()
        .map(|c| 3 * c.k_dot - 2 * c.signature.genus as i64 + 2)
        .sum();
    let twice = row.c1sq_z - two_kf_minus_f2 + dk2 + 3 * dkf;
    if twice % 2 != 0 {
        return Err(inconsistent!(
            "K_W^2 = {twice}/2 at {level} is not integral"
        ));
    }
    Ok(twice / 2)
}

/// `K_W̄·C̄_∞ = 2g(X₁(N)) − 2 − C²_{∞,1} − φ(N)/2 − ½Σ_{d|N, d≠1} ρ(d, −r)φ(N/d)`.
pub fn kwbar_dot_cinf(level: &Level) -> Result<i64> {
    require_z_nonrational(level)?;
    let n = level.n;
    let cusp_sum: u64 = divisors(n)
        .into_iter()
        .filter(|&d| d != 1)
        .map(|d| rho(d, -level.ri()) * euler_phi(n / d))
        .sum();
    let value = int(2 * x1_genus(n)? as i64 - 2)
        - c_infty_self_intersection(n, level.ri())?
        - rat(euler_phi(n) as i64, 2)
        - rat(cusp_sum as i64, 2);
    to_integer(&value, "K_W.C_inf")
}

/// The upper bound `½(ψ(m)/3 − ν_∞(m) − ν₃(m)/3 − err(N, m) − f(m))` for
/// `K_W·F*_m`.
pub fn kw_dot_fm_bound(level: &Level, m: u64) -> Result<Rational> {
    check_fm_level(level, m)?;
    if m < 2 {
        return Err(domain!("m must be at least 2, got {m}"));
    }
    let x0 = x0_invariants(m)?;
    let e = err(level.n, m)?.total;
    let f = fricke_fixed_count(m)?;
    Ok((rat(x0.psi as i64, 3)
        - int(x0.nu_inf as i64)
        - rat(x0.nu3 as i64, 3)
        - int(e as i64)
        - int(f as i64))
        / int(2))
}

/// `𝔪(N, r)` and the levels `m` that contribute to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrakM {
    /// `½Σ ρ(N, mr)` over the contributing `m`.
    pub value: Rational,
    /// The contributing `m`, ascending.
    pub contributing: Vec<u64>,
}

/// `𝔪(N, r) = ½Σ ρ(N, mr)` over `m ≥ 5` with `X₀⁺(m)` rational, `gcd(m, N) = 1`,
/// `mr` a square modulo `N` and `K_W·F*_m` bounded by `−1`.
pub fn frak_m(level: &Level) -> Result<FrakM> {
    let mut value = Rational::zero();
    let mut contributing = Vec::new();
    for &m in RATIONAL_X0_PLUS.iter().filter(|&&m| m >= 5) {
        if gcd(m as i64, level.n as i64) != 1 {
            continue;
        }
        let roots = rho(level.n, m as i64 * level.ri());
        if roots == 0 {
            continue;
        }
        debug_assert!(x0plus_is_rational(m));
        if kw_dot_fm_bound(level, m)? <= int(-1) {
            value += rat(roots as i64, 2);
            contributing.push(m);
        }
    }
    Ok(FrakM {
        value,
        contributing,
    })
}

fn indicator(b: bool) -> i64 {
    i64::from(b)
}

/// `K²_small`: `K_W²` plus the contributions of the curves contracted on the
/// way to the small model.
pub fn k_small_squared(level: &Level, base: &BaseData) -> Result<i64> {
    if classify_w_by_list(level) == EKClass::Rational {
        return Err(domain!("W{level} is rational"));
    }
    let (n, m, r) = (level.n, level.m, level.ri());
    let rh = |d: u64, x: i64| int(rho(d, x) as i64);
    let mut t = int(kw_squared(level, base)?);
    for d in divisors(n).into_iter().filter(|&d| d != 1) {
        t += rat(((d / 2) * rho(d, -r) * euler_phi(n / d)) as i64, 2);
    }
    t += int(s21(level)? as i64) + int(s32(level)? as i64);
    t += rh(n, 3 * r) / int(2) + frak_m(level)?.value + rh(n, 5 * r) / int(2);
    let sharp = int(2 * indicator(divides_exactly(2, n)))
        + int(indicator(divides_exactly(4, n))) * rh(4, 3 * r)
        + int(indicator(divides_exactly(8, n))) * rh(8, 5 * r)
        + int(indicator(n % 16 == 0)) * rh(8, r);
    t += rh(m, r) / int(4) * sharp;
    t += int(indicator(divides_exactly(2, n))) * rh(m, 2 * r);
    t += rh(n, r) / int(4) * int(2 * indicator(divides_exactly(4, n)) + indicator(n % 8 == 0));
    t += int(indicator(n % 2 == 0)) * rh(n, 3 * r) / int(2);
    if divides_exactly(3, n) {
        t += rh(n / 3, r) / int(4) * (int(4) * rh(3, r) + int(5) * rh(3, 2 * r));
    }
    to_integer(&t, "K_small^2")
}

/// One row of the invariants table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantRow {
    /// The level.
    pub n: u64,
    /// The normalised determinant class.
    pub r: u64,
    /// `p_g(Z̃)`.
    pub pg_z: i64,
    /// `κ(Z)`.
    pub kappa_z: i8,
    /// `p_g(W)`.
    pub pg_w: i64,
    /// `K_W̄·C̄_∞`.
    pub kwbar_cinf: i64,
    /// `K_W²`.
    pub kw_sq: i64,
    /// `K²_small`, absent when `W` is rational.
    pub ksmall_sq: Option<i64>,
    /// `κ(W)`.
    pub kappa_w: i8,
}

/// Computes the table row of a level whose `Z` is not rational.
pub fn invariant_row(level: &Level, base: &BaseData) -> Result<InvariantRow> {
    require_z_nonrational(level)?;
    let row = base.get(level)?;
    let class_w = classify_w(level, base)?;
    let ksmall_sq = if class_w == EKClass::Rational {
        None
    } else {
        Some(k_small_squared(level, base)?)
    };
    Ok(InvariantRow {
        n: level.n,
        r: level.r,
        pg_z: row.pg_z,
        kappa_z: classify_z(level, base)?.kappa(),
        pg_w: pg_w(level, base)?,
        kwbar_cinf: kwbar_dot_cinf(level)?,
        kw_sq: kw_squared(level, base)?,
        ksmall_sq,
        kappa_w: class_w.kappa(),
    })
}

/// The normalised levels `(N, r)` with `min_n ≤ N ≤ max_n` whose `Z` is not
/// rational, one per square class, ordered by `N` then `r`.
pub fn table_levels(min_n: u64, max_n: u64) -> Result<Vec<Level>> {
    let mut out = Vec::new();
    for n in min_n.max(2)..=max_n {
        let mut reps: Vec<u64> = units(n)
            .into_iter()
            .map(|r| square_class_representative(n, r))
            .collect();
        reps.sort_unstable();
        reps.dedup();
        for r in reps {
            let level = Level::new(n, r as i64)?;
            if classify_z_by_list(&level) != EKClass::Rational {
                out.push(level);
            }
        }
    }
    Ok(out)
}

/// Table rows for every level in `min_n..=max_n`, computed in parallel and
/// returned in level order.
pub fn invariant_table(min_n: u64, max_n: u64, base: &BaseData) -> Result<Vec<InvariantRow>> {
    if min_n > max_n {
        return Err(domain!("empty range {min_n}..{max_n}"));
    }
    if min_n < BUNDLED_MIN_N {
        return Err(domain!(
            "the table starts at N = {BUNDLED_MIN_N}, got {min_n}"
        ));
    }
    for n in [min_n, max_n] {
        base.check_range(n)?;
    }
    table_levels(min_n, max_n)?
        .par_iter()
        .map(|level| invariant_row(level, base))
        .collect()
}

/// The two invariants of `Z̃(N, r)` taken as input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseRow {
    /// The geometric genus `p_g(Z̃)`.
    pub pg_z: i64,
    /// The Chern number `c₁²(Z̃) = K²_Z̃`.
    pub c1sq_z: i64,
}

#[derive(Debug, Deserialize)]
struct BaseRecord {
    #[serde(rename = "N")]
    n: u64,
    r: i64,
    #[serde(rename = "pg_Z")]
    pg_z: i64,
    #[serde(rename = "c1sq_Z")]
    c1sq_z: i64,
}

/// Lowest level covered by the bundled base data.
pub const BUNDLED_MIN_N: u64 = 6;
/// Highest level covered by the bundled base data.
pub const BUNDLED_MAX_N: u64 = 33;

const BUNDLED_CSV: &str = include_str!("../data/base_invariants.csv");

/// Values of `p_g(Z̃)` and `K²_Z̃` keyed by normalised level.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BaseData {
    rows: BTreeMap<(u64, u64), BaseRow>,
    extended: bool,
}

impl BaseData {
    /// Parses CSV text with header `N,r,pg_Z,c1sq_Z`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = BTreeMap::new();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        for record in reader.deserialize::<BaseRecord>() {
            let rec = record.map_err(|e| Error::Data(format!("malformed base data: {e}")))?;
            let level = Level::new(rec.n, rec.r)?;
            rows.insert(
                (level.n, level.r),
                BaseRow {
                    pg_z: rec.pg_z,
                    c1sq_z: rec.c1sq_z,
                },
            );
        }
        Ok(Self {
            rows,
            extended: false,
        })
    }

    /// The bundled values for `6 ≤ N ≤ 33`.
    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED_CSV).expect("bundled base data parses")
    }

    /// The bundled values overridden and extended by a CSV file.
    pub fn with_override(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
        let mut data = Self::bundled();
        data.rows.extend(Self::from_csv(&text)?.rows);
        data.extended = true;
        Ok(data)
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// True when no rows are present.
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// All rows in level order.
    pub fn iter(&self) -> impl Iterator<Item = (Level, BaseRow)> + '_ {
        self.rows.iter().map(|(&(n, r), &row)| {
            (
                Level::new(n, r as i64).expect("stored levels are valid"),
                row,
            )
        })
    }

    fn check_range(&self, n: u64) -> Result<()> {
        if !self.extended && !(BUNDLED_MIN_N..=BUNDLED_MAX_N).contains(&n) {
            return Err(Error::Data(format!(
                "p_g(Z~) and K^2(Z~) for N = {n} are not bundled (bundled range is \
                 {BUNDLED_MIN_N}..={BUNDLED_MAX_N}); they come from the Kani-Schanz formulas \
                 and must be supplied with --base-data"
            )));
        }
        Ok(())
    }

    /// The row for a level, normalising `r` first.
    pub fn get(&self, level: &Level) -> Result<BaseRow> {
        self.check_range(level.n)?;
        let key = (level.n, square_class_representative(level.n, level.r));
        self.rows
            .get(&key)
            .copied()
            .ok_or_else(|| Error::Data(format!("no base data for level ({},{})", key.0, key.1)))
    }
}

/// `(p_g(Z̃), K²_Z̃)` from the bundled data.
pub fn base_data(level: &Level) -> Result<BaseRow> {
    BaseData::bundled().get(level)
}

/// Everything computed for one level, for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    /// The table row.
    pub row: InvariantRow,
    /// `Z̃` classification.
    pub class_z: EKClass,
    /// `W` classification.
    pub class_w: EKClass,
    /// The singularity census.
    pub census: SingularityCensus,
    /// The fixed locus and isolated fixed points.
    pub fixed_points: FixedPointCensus,
    /// `(ΔK², Δ_KF)`.
    pub deltas: (i64, i64),
    /// `𝔪(N, r)` as an exact fraction.
    pub frak_m: String,
    /// The `m` contributing to `𝔪(N, r)`.
    pub frak_m_levels: Vec<u64>,
}

/// Assembles a [`LevelReport`].
pub fn level_report(level: &Level, base: &BaseData) -> Result<LevelReport> {
    let row = invariant_row(level, base)?;
    let fm = frak_m(level)?;
    Ok(LevelReport {
        row,
        class_z: classify_z(level, base)?,
        class_w: classify_w(level, base)?,
        census: singularity_census(level)?,
        fixed_points: fixed_point_census(level)?,
        deltas: blowdown_deltas(level)?,
        frak_m: fm.value.to_string(),
        frak_m_levels: fm.contributing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(n: u64, r: i64) -> Level {
        Level::new(n, r).unwrap()
    }

    #[test]
    fn normalisation() {
        assert_eq!(lv(17, 4).r, 1);
        assert_eq!(lv(20, 9).r, 1);
        assert_eq!(lv(16, 13).r, 5);
        assert!(Level::new(12, 3).is_err());
    }

    #[test]
    fn census_examples() {
        assert_eq!(singularity_census(&lv(7, 3)).unwrap().at_1728, 4);
        let c = singularity_census(&lv(17, 1)).unwrap();
        let top: Vec<_> = c.at_infty.iter().filter(|(s, _)| s.d == 17).collect();
        assert_eq!(top.len(), 8);
        assert!(top.iter().all(|(_, count)| *count == 1));
        let c9 = singularity_census(&lv(9, 1)).unwrap();
        assert_eq!(c9.at_0.len(), 1);
        assert_eq!(c9.at_0[0].0, SingularityType::new(3, 1).unwrap());
    }

    #[test]
    fn fixed_locus_examples() {
        let f = fixed_locus(&lv(17, 1)).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.iter().filter(|c| c.in_support_s).count(), 1);
        let f = fixed_locus(&lv(24, 5)).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].family, InvolutionFamily::AntidiagWeyl);
        assert_eq!(fixed_locus(&lv(22, 1)).unwrap().len(), 4);
    }

    #[test]
    fn err_examples() {
        assert_eq!(err(5, 6).unwrap().total, 2);
        assert_eq!(err(17, 9).unwrap().total, 0);
        assert!(err(6, 4).is_err());
    }

    #[test]
    fn isolated_points_17_1() {
        let c = fixed_point_census(&lv(17, 1)).unwrap();
        assert_eq!(c.isolated.total(), 4);
        assert_eq!(s21(&lv(20, 1)).unwrap(), 0);
        assert_eq!(s32(&lv(21, 1)).unwrap(), 0);
    }

    #[test]
    fn deltas_17_1() {
        assert_eq!(blowdown_deltas(&lv(17, 1)).unwrap().0, 6);
        assert!(blowdown_deltas(&lv(7, 1)).is_err());
    }

    #[test]
    fn spot_values() {
        let base = BaseData::bundled();
        let l = lv(17, 1);
        assert_eq!(pg_w(&l, &base).unwrap(), 1);
        assert_eq!(kw_squared(&l, &base).unwrap(), -20);
        assert_eq!(k_small_squared(&l, &base).unwrap(), -2);
        assert_eq!(kwbar_dot_cinf(&l).unwrap(), 3);
        assert_eq!(frak_m(&l).unwrap().contributing, vec![8, 9, 19]);
    }

    #[test]
    fn smoothness_obstructions() {
        assert!(fm_smoothness_obstructions(&lv(16, 5), 21)
            .unwrap()
            .is_empty());
        assert!(fm_smoothness_obstructions(&lv(17, 1), 21)
            .unwrap()
            .is_empty());
        let found = fm_smoothness_obstructions(&lv(21, 2), 29).unwrap();
        assert!(found.contains(&CmObstruction {
            disc: 4,
            a: 40,
            b: 21
        }));
    }

    #[test]
    fn base_data_range() {
        assert_eq!(base_data(&lv(17, 1)).unwrap().pg_z, 10);
        assert_eq!(base_data(&lv(24, 23)).unwrap().pg_z, 37);
        assert!(matches!(base_data(&lv(40, 1)), Err(Error::Data(_))));
    }
}
