//! Invariants of modular curves.
//!
//! Covers the classical invariants of `X₀(m)` with its cusps and Fricke
//! involution, the Fricke fixed-point count `f(m)`, the closed-form
//! signatures of the curves `X_g⁺` attached to the involution families, the
//! genus of `X₁(N)` with the self-intersection of its cusp section, and an
//! orbit-counting oracle that computes the signature of `X(H)` for an
//! explicit subgroup `H`.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{
    divisors, euler_phi, factorize, frac, gcd, h, h_4n2, int, inverse_mod, kronecker,
    prime_divisors, rat, rho, split_two, to_integer, units, Rational,
};
use crate::error::{domain, inconsistent, Result};
use crate::gl2::{
    enumeration_guard, extended_centralizer, involution_classes, InvolutionFamily, ResidueMatrix,
    SubgroupH, MAX_ENUMERATION_LEVEL,
};

/// The classical invariants of `X₀(m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct X0Invariants {
    /// The index `ψ(m) = m∏(1 + 1/p)`.
    pub psi: u64,
    /// Elliptic points of order 2.
    pub nu2: u64,
    /// Elliptic points of order 3.
    pub nu3: u64,
    /// Number of cusps.
    pub nu_inf: u64,
    /// The genus.
    pub genus: u64,
}

/// Index, elliptic points, cusps and genus of `X₀(m)`.
pub fn x0_invariants(m: u64) -> Result<X0Invariants> {
    if m < 2 {
        return Err(domain!("X0(m) needs m >= 2, got {m}"));
    }
    let ps = prime_divisors(m);
    let psi = ps.iter().fold(m, |acc, &p| acc / p * (p + 1));
    let local = |d: i64| -> u64 {
        ps.iter()
            .map(|&p| (1 + kronecker(d, p as i64)) as u64)
            .product()
    };
    let nu2 = if m.is_multiple_of(4) { 0 } else { local(-4) };
    let nu3 = if m.is_multiple_of(9) { 0 } else { local(-3) };
    let nu_inf = divisors(m)
        .iter()
        .map(|&d| euler_phi(gcd(d as i64, (m / d) as i64)))
        .sum();
    let twelve_g = 12 + psi as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * nu_inf as i64;
    if twelve_g % 12 != 0 || twelve_g < 0 {
        return Err(inconsistent!(
            "genus of X0({m}) is not a nonnegative integer"
        ));
    }
    Ok(X0Invariants {
        psi,
        nu2,
        nu3,
        nu_inf,
        genus: (twelve_g / 12) as u64,
    })
}

/// A cusp `[c, d]` of `X₀(m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CuspX0 {
    /// The level `m`.
    pub m: u64,
    /// A divisor of `m`.
    pub d: u64,
    /// A unit modulo `t = gcd(d, m/d)`, taken in `1..=t`.
    pub c: u64,
    /// The width `m/(d·t)`.
    pub width: u64,
}

impl CuspX0 {
    /// The cusp `[c, d]` of `X₀(m)`, with `c` reduced modulo `gcd(d, m/d)`.
    pub fn new(m: u64, c: i64, d: u64) -> Result<Self> {
        if d == 0 || !m.is_multiple_of(d) {
            return Err(domain!("{d} does not divide {m}"));
        }
        let t = gcd(d as i64, (m / d) as i64);
        let c = if t == 1 {
            1
        } else {
            c.rem_euclid(t as i64) as u64
        };
        if gcd(c as i64, t as i64) != 1 {
            return Err(domain!("c = {c} is not a unit modulo {t}"));
        }
        Ok(Self {
            m,
            d,
            c,
            width: m / (d * t),
        })
    }

    /// `t = gcd(d, m/d)`.
    pub fn t(&self) -> u64 {
        gcd(self.d as i64, (self.m / self.d) as i64)
    }
}

impl fmt::Display for CuspX0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.c, self.d)
    }
}

/// Every cusp of `X₀(m)`, ordered by `d` and then `c`.
pub fn x0_cusps(m: u64) -> Result<Vec<CuspX0>> {
    if m < 2 {
        return Err(domain!("X0(m) needs m >= 2, got {m}"));
    }
    let mut out = Vec::new();
    for d in divisors(m) {
        let t = gcd(d as i64, (m / d) as i64);
        let cs = if t == 1 { vec![1] } else { units(t) };
        for c in cs {
            out.push(CuspX0::new(m, c as i64, d)?);
        }
    }
    Ok(out)
}

/// The Fricke involution on cusps, `[c, d] ↦ [c⁻¹, m/d]`.
pub fn fricke_on_cusp(cusp: &CuspX0) -> Result<CuspX0> {
    let t = cusp.t();
    let c_inv = inverse_mod(cusp.c as i64, t).unwrap_or(1);
    CuspX0::new(cusp.m, c_inv as i64, cusp.m / cusp.d)
}

/// The levels `m` for which `X₀⁺(m)` is rational.
pub const RATIONAL_X0_PLUS: [u64; 37] = [
    2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 23, 24, 25, 26, 27, 29,
    31, 32, 35, 36, 39, 41, 47, 49, 50, 59, 71,
];

/// True when `X₀⁺(m)` is a rational curve.
pub fn x0plus_is_rational(m: u64) -> bool {
    RATIONAL_X0_PLUS.contains(&m)
}

/// The number `f(m)` of fixed points of the Fricke involution on `X₀(m)`:
/// `h(−4m) + h(−m)` when `m ≡ 3 (mod 4)` and `h(−4m)` otherwise.
pub fn fricke_fixed_count(m: u64) -> Result<u64> {
    if m < 2 {
        return Err(domain!("f(m) needs m >= 2, got {m}"));
    }
    let m_i = m as i64;
    Ok(if m % 4 == 3 {
        h(-4 * m_i)? + h(-m_i)?
    } else {
        h(-4 * m_i)?
    })
}

/// The halved auxiliary quantities `μ⁺, e₂⁺, e₃⁺, e_∞⁺` of an odd level `M`.
///
/// For `M = 1` the formulas give `μ⁺ = e₃⁺ = e_∞⁺ = ½` and `e₂⁺ = 3/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylAux {
    /// `μ⁺ = ½·M²∏(1 + (−r/p)/p)`.
    pub mu: Rational,
    /// `e₂⁺ = ρ(M, r)/2 + h(−4M²)`.
    pub e2: Rational,
    /// `e₃⁺ = ρ(M, 3r)/2`.
    pub e3: Rational,
    /// `e_∞⁺ = ½∏(φ(p^v) + Σ_{l<v}(1 + (−r/p))φ(p^l))`.
    pub einf: Rational,
}

/// The auxiliary quantities for the odd part `M` of the level and the
/// determinant `r`.
pub fn weyl_aux(m: u64, r: i64) -> Result<WeylAux> {
    if m.is_multiple_of(2) {
        return Err(domain!("auxiliary quantities need odd M, got {m}"));
    }
    let mut mu = int((m * m) as i64);
    let mut einf: i64 = 1;
    for (p, v) in factorize(m) {
        let chi = kronecker(-r, p as i64) as i64;
        mu *= rat(p as i64 + chi, p as i64);
        let tail: i64 = (0..v).map(|l| (1 + chi) * euler_phi(p.pow(l)) as i64).sum();
        einf *= euler_phi(p.pow(v)) as i64 + tail;
    }
    Ok(WeylAux {
        mu: mu / int(2),
        e2: rat(rho(m, r) as i64, 2) + int(h_4n2(m) as i64),
        e3: rat(rho(m, 3 * r) as i64, 2),
        einf: rat(einf, 2),
    })
}

/// Index, elliptic points, cusps, genus and number of geometric components
/// of a modular curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveSignature {
    /// The index `η`.
    pub index: u64,
    /// Elliptic points of order 2.
    pub e2: u64,
    /// Elliptic points of order 3.
    pub e3: u64,
    /// Number of cusps.
    pub cusps: u64,
    /// The genus `1 + (η − 3ε₂ − 4ε₃ − 6ε_∞)/12`.
    pub genus: u64,
    /// Number `d_g` of geometrically irreducible components.
    pub components: u64,
}

impl CurveSignature {
    /// Builds a signature, checking that the genus formula yields a
    /// nonnegative integer.
    pub fn new(index: u64, e2: u64, e3: u64, cusps: u64, components: u64) -> Result<Self> {
        let twelve_g = 12 + index as i64 - 3 * e2 as i64 - 4 * e3 as i64 - 6 * cusps as i64;
        if twelve_g < 0 || twelve_g % 12 != 0 {
            return Err(inconsistent!(
                "signature ({index}, {e2}, {e3}, {cusps}) has non-integral or negative genus"
            ));
        }
        Ok(Self {
            index,
            e2,
            e3,
            cusps,
            genus: (twelve_g / 12) as u64,
            components,
        })
    }

    /// Builds a signature from exact rationals that must be integers.
    pub fn from_rationals(
        index: &Rational,
        e2: &Rational,
        e3: &Rational,
        cusps: &Rational,
    ) -> Result<Self> {
        let conv = |x: &Rational, what: &str| -> Result<u64> {
            let v = to_integer(x, what)?;
            u64::try_from(v).map_err(|_| inconsistent!("{what} = {v} is negative"))
        };
        Self::new(
            conv(index, "index")?,
            conv(e2, "e2")?,
            conv(e3, "e3")?,
            conv(cusps, "cusps")?,
            1,
        )
    }
}

impl fmt::Display for CurveSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(index {}, e2 {}, e3 {}, cusps {}, genus {}, components {})",
            self.index, self.e2, self.e3, self.cusps, self.genus, self.components
        )
    }
}

/// The curve families whose signatures have closed forms in terms of the
/// auxiliary quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeylFamily {
    /// `g_weyl`, odd `N`.
    Weyl,
    /// `(g_I, g_weyl)`, `N = 2M`.
    IWeyl,
    /// `(g_antidiag, g_weyl)`, even `N`.
    AntidiagWeyl,
    /// `(g_ns, g_weyl)`, `4 | N`.
    NsWeyl,
    /// `(g_s, g_weyl)`, `4 | N`.
    SWeyl,
}

impl fmt::Display for WeylFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Weyl => "weyl",
            Self::IWeyl => "(I,weyl)",
            Self::AntidiagWeyl => "(antidiag,weyl)",
            Self::NsWeyl => "(ns,weyl)",
            Self::SWeyl => "(s,weyl)",
        })
    }
}

impl WeylFamily {
    /// The closed-form family of an involution class, if it has one.
    pub fn of_involution(family: InvolutionFamily) -> Option<Self> {
        match family {
            InvolutionFamily::Scalar { .. } | InvolutionFamily::Borel { .. } => None,
            InvolutionFamily::Weyl => Some(Self::Weyl),
            InvolutionFamily::IWeyl => Some(Self::IWeyl),
            InvolutionFamily::AntidiagWeyl => Some(Self::AntidiagWeyl),
            InvolutionFamily::NsWeyl { .. } => Some(Self::NsWeyl),
            InvolutionFamily::SWeyl { .. } => Some(Self::SWeyl),
        }
    }
}

/// The rational quadruple `(η⁺, ε₂⁺, ε₃⁺, ε_∞⁺)` of a family before integrality checks.
pub fn weyl_family_quantities(n: u64, r: i64, family: WeylFamily) -> Result<[Rational; 4]> {
    if n < 2 || gcd(r, n as i64) != 1 {
        return Err(domain!(
            "need N >= 2 and gcd(r, N) = 1, got N = {n}, r = {r}"
        ));
    }
    let (k, m) = split_two(n);
    let a = weyl_aux(m, r)?;
    let p2 = |e: u32| int(1i64 << e);
    let zero = Rational::zero();
    let quad = match (family, k) {
        (WeylFamily::Weyl, 0) => [a.mu, a.e2, a.e3, a.einf],
        (WeylFamily::IWeyl, 1) => [a.mu, a.e2, a.e3, a.einf],
        (WeylFamily::AntidiagWeyl, 1) => [int(3) * &a.mu, a.e2, zero, int(2) * &a.einf],
        (WeylFamily::AntidiagWeyl, k) if k >= 2 => {
            let e2 = if r.rem_euclid(4) == 1 {
                rho(n, r)
            } else {
                h_4n2(n)
            };
            [
                int(3) * p2(2 * k - 2) * &a.mu,
                int(e2 as i64),
                zero,
                p2(k) * &a.einf,
            ]
        }
        (WeylFamily::NsWeyl, k) if k >= 2 => [
            p2(2 * k - 3) * &a.mu,
            int(h_4n2(n / 2) as i64),
            int(2) * &a.e3,
            p2(k - 2) * &a.einf,
        ],
        (WeylFamily::SWeyl, k) if k >= 2 => [
            int(3) * p2(2 * k - 3) * &a.mu,
            int(h_4n2(n / 2) as i64),
            zero,
            int(3) * p2(k - 2) * &a.einf,
        ],
        _ => {
            return Err(domain!(
                "family {family} does not occur at level {n} = 2^{k}*{m}"
            ))
        }
    };
    Ok(quad)
}

/// The closed-form signature of one geometric component of `X_g⁺` for the
/// involution `g` of the given family at level `(N, r)`.
///
/// Fails with a domain error when the closed form is not integral, which
/// among levels `N ≤ 24` happens only for `(ns, weyl)` at `(4, 3)`.
pub fn weyl_family_signature(n: u64, r: i64, family: WeylFamily) -> Result<CurveSignature> {
    let [eta, e2, e3, einf] = weyl_family_quantities(n, r, family)?;
    if [&eta, &e2, &e3, &einf].iter().any(|x| !x.is_integer()) {
        return Err(domain!(
            "closed form for {family} at N = {n}, r = {r} is not integral: ({eta}, {e2}, {e3}, {einf})"
        ));
    }
    CurveSignature::from_rationals(&eta, &e2, &e3, &einf)
}

/// Computes the signature of `X(H)` by counting right cosets of
/// `H' = H ∩ SL₂(ℤ/Nℤ)` in `SL₂(ℤ/Nℤ)` fixed by `(0 −1; 1 0)` and by
/// `(0 −1; 1 1)`, and the orbits of `(1 1; 0 1)` on them.
pub fn xh_signature_oracle(group: &SubgroupH) -> Result<CurveSignature> {
    let n = group.modulus;
    enumeration_guard(n, MAX_ENUMERATION_LEVEL)?;
    if !group.contains_minus_identity() {
        return Err(domain!("the subgroup must contain -I"));
    }
    let special = group.special_part();
    let one = 1 % n;
    let n_i = n as i64;
    let sl2: Vec<ResidueMatrix> = (0..n_i.pow(4))
        .map(|x| {
            ResidueMatrix::new(
                n,
                x / n_i.pow(3),
                x / n_i.pow(2) % n_i,
                x / n_i % n_i,
                x % n_i,
            )
        })
        .filter(|g| g.det() == one)
        .collect();
    let mut coset_of = vec![u32::MAX; (n as usize).pow(4)];
    let mut reps = Vec::new();
    for g in &sl2 {
        if coset_of[g.index()] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        for h in &special.elements {
            coset_of[h.mul(g).index()] = id;
        }
        reps.push(*g);
    }
    let act = |i: usize, x: &ResidueMatrix| coset_of[reps[i].mul(x).index()] as usize;
    let s = ResidueMatrix::new(n, 0, -1, 1, 0);
    let rr = ResidueMatrix::new(n, 0, -1, 1, 1);
    let t = ResidueMatrix::new(n, 1, 1, 0, 1);
    let count = reps.len();
    let e2 = (0..count).filter(|&i| act(i, &s) == i).count() as u64;
    let e3 = (0..count).filter(|&i| act(i, &rr) == i).count() as u64;
    let mut seen = vec![false; count];
    let mut cusps = 0;
    for i in 0..count {
        if seen[i] {
            continue;
        }
        cusps += 1;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = act(j, &t);
        }
    }
    CurveSignature::new(count as u64, e2, e3, cusps, group.det_index())
}

/// Outcome of [`verify_family_signatures`] at one level.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureCheck {
    /// Classes whose closed form matched the enumeration.
    pub checked: usize,
    /// Classes whose closed form is rejected as non-integral.
    pub rejected: usize,
}

/// Compares closed-form and oracle signatures for every involution class at
/// `(N, r)` that has a closed form.
pub fn verify_family_signatures(n: u64, r: i64) -> Result<SignatureCheck> {
    let mut out = SignatureCheck::default();
    for class in involution_classes(n, r)? {
        let Some(family) = WeylFamily::of_involution(class.family) else {
            continue;
        };
        let closed = match weyl_family_signature(n, r, family) {
            Ok(s) => s,
            Err(crate::Error::Domain(_)) => {
                out.rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let oracle = xh_signature_oracle(&extended_centralizer(&class.matrix)?)?;
        if closed != oracle {
            return Err(inconsistent!(
                "N={n}, r={r}, {}: closed form {closed} but enumeration gives {oracle}",
                class.family
            ));
        }
        out.checked += 1;
    }
    Ok(out)
}

/// The genus `1 + (N²/24)∏(1 − 1/p²) − ¼Σ_{d|N} φ(d)φ(N/d)` of `X₁(N)`.
pub fn x1_genus(n: u64) -> Result<u64> {
    if n < 5 {
        return Err(domain!("the X1 genus formula needs N >= 5, got {n}"));
    }
    let mut g = rat((n * n) as i64, 24);
    for p in prime_divisors(n) {
        g *= rat((p * p - 1) as i64, (p * p) as i64);
    }
    let cusp_sum: u64 = divisors(n)
        .iter()
        .map(|&d| euler_phi(d) * euler_phi(n / d))
        .sum();
    g += int(1) - rat(cusp_sum as i64, 4);
    let g = to_integer(&g, "genus of X1(N)")?;
    u64::try_from(g).map_err(|_| inconsistent!("genus of X1({n}) is negative"))
}

/// The self-intersection `C²_{∞,1} = −½Σ_{v=1}^{N−1} φ(g)⟨v²r/(N·g)⟩`
/// with `g = gcd(v, N)`.
pub fn c_infty_self_intersection(n: u64, r: i64) -> Result<Rational> {
    if n < 2 || gcd(r, n as i64) != 1 {
        return Err(domain!(
            "need N >= 2 and gcd(r, N) = 1, got N = {n}, r = {r}"
        ));
    }
    let mut sum = Rational::zero();
    for v in 1..n {
        let g = gcd(v as i64, n as i64);
        let x = rat((v * v) as i64 * r, (n * g) as i64);
        sum += int(euler_phi(g) as i64) * frac(&x);
    }
    Ok(-sum / int(2))
}
