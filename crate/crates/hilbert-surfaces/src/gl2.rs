//! Linear algebra over `ℤ/Nℤ`.
//!
//! Provides 2×2 residue matrices, the named class representatives `g_•`,
//! the closed-form list of conjugacy classes of `g ∈ GL₂(ℤ/Nℤ)/{±1}` with
//! `g² = ±det(g)`, CM action matrices, and brute-force enumeration of
//! conjugacy classes, centralisers and extended centralisers used as oracles.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{
    gcd, inverse_mod, is_unit_square, kronecker, lambda_reps, modulo, prime_divisors, split_two,
    units, Discriminant,
};
use crate::error::{domain, inconsistent, Error, Result};

/// Largest level accepted by the brute-force enumerations.
pub const MAX_ENUMERATION_LEVEL: u64 = 24;

/// Rejects levels above `limit` with a resource error.
pub fn enumeration_guard(n: u64, limit: u64) -> Result<()> {
    if n > limit {
        return Err(Error::Resource(format!(
            "enumeration of GL2(Z/{n}Z) exceeds the guard level {limit}"
        )));
    }
    Ok(())
}

/// A 2×2 matrix `(a b; c d)` with entries in `ℤ/Nℤ`, stored in `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueMatrix {
    /// The modulus `N`.
    pub modulus: u64,
    /// Top-left entry.
    pub a: u64,
    /// Top-right entry.
    pub b: u64,
    /// Bottom-left entry.
    pub c: u64,
    /// Bottom-right entry.
    pub d: u64,
}

impl ResidueMatrix {
    /// Reduces the integer matrix `(a b; c d)` modulo `modulus`.
    pub fn new(modulus: u64, a: i64, b: i64, c: i64, d: i64) -> Self {
        Self {
            modulus,
            a: modulo(a, modulus),
            b: modulo(b, modulus),
            c: modulo(c, modulus),
            d: modulo(d, modulus),
        }
    }

    /// The identity matrix modulo `n`.
    pub fn identity(n: u64) -> Self {
        Self::scalar(n, 1)
    }

    /// The scalar matrix `λI` modulo `n`.
    pub fn scalar(n: u64, lambda: i64) -> Self {
        Self::new(n, lambda, 0, 0, lambda)
    }

    /// The entries `[a, b, c, d]`.
    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Dense index of the matrix among all `N⁴` residue matrices.
    pub fn index(&self) -> usize {
        let n = self.modulus as usize;
        ((self.a as usize * n + self.b as usize) * n + self.c as usize) * n + self.d as usize
    }

    fn wide(&self) -> [i128; 4] {
        [
            self.a as i128,
            self.b as i128,
            self.c as i128,
            self.d as i128,
        ]
    }

    /// The determinant `ad − bc` in `0..N`.
    pub fn det(&self) -> u64 {
        let [a, b, c, d] = self.wide();
        (a * d - b * c).rem_euclid(self.modulus as i128) as u64
    }

    /// The trace `a + d` in `0..N`.
    pub fn trace(&self) -> u64 {
        (self.a + self.d) % self.modulus
    }

    /// True when the determinant is a unit.
    pub fn is_invertible(&self) -> bool {
        gcd(self.det() as i64, self.modulus as i64) == 1
    }

    /// Matrix product `self · other`.
    ///
    /// # Panics
    ///
    /// Panics if the moduli differ.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modulus, other.modulus, "moduli must agree");
        let n = self.modulus as i128;
        let [a, b, c, d] = self.wide();
        let [e, f, g, h] = other.wide();
        let r = |x: i128| (x.rem_euclid(n)) as u64;
        Self {
            modulus: self.modulus,
            a: r(a * e + b * g),
            b: r(a * f + b * h),
            c: r(c * e + d * g),
            d: r(c * f + d * h),
        }
    }

    /// The negation `−g`.
    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    /// The scalar multiple `λg`.
    pub fn scale(&self, lambda: i64) -> Self {
        let n = self.modulus as i128;
        let l = lambda as i128;
        let r = |x: u64| ((x as i128 * l).rem_euclid(n)) as u64;
        Self {
            modulus: self.modulus,
            a: r(self.a),
            b: r(self.b),
            c: r(self.c),
            d: r(self.d),
        }
    }

    /// The inverse matrix, failing when the determinant is not a unit.
    pub fn inverse(&self) -> Result<Self> {
        let inv = inverse_mod(self.det() as i64, self.modulus)
            .ok_or_else(|| domain!("matrix {self} is not invertible"))?;
        let i = inv as i64;
        Ok(Self::new(
            self.modulus,
            self.d as i64 * i,
            -(self.b as i64) * i,
            -(self.c as i64) * i,
            self.a as i64 * i,
        ))
    }

    /// The conjugate `h g h⁻¹`.
    pub fn conjugate_by(&self, h: &Self) -> Result<Self> {
        Ok(h.mul(self).mul(&h.inverse()?))
    }

    /// True when `g² = ±det(g)·I`.
    pub fn squares_to_pm_det(&self) -> bool {
        let sq = self.mul(self);
        let det = self.det() as i64;
        sq == Self::scalar(self.modulus, det) || sq == Self::scalar(self.modulus, -det)
    }

    /// Reduction modulo a divisor `m` of the modulus.
    pub fn reduce(&self, m: u64) -> Self {
        Self {
            modulus: m,
            a: self.a % m,
            b: self.b % m,
            c: self.c % m,
            d: self.d % m,
        }
    }
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} {}; {} {}) mod {}",
            self.a, self.b, self.c, self.d, self.modulus
        )
    }
}

/// The solution `x mod mn` of `x ≡ a (mod m)`, `x ≡ b (mod n)` for coprime `m, n`.
pub fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    let m_inv = inverse_mod(m as i64, n).expect("CRT moduli must be coprime");
    let t = ((b as i128 - a as i128) * m_inv as i128).rem_euclid(n as i128);
    (a as i128 + m as i128 * t) as u64
}

/// Glues matrices modulo coprime moduli into one matrix modulo their product.
pub fn crt_combine(x: &ResidueMatrix, y: &ResidueMatrix) -> Result<ResidueMatrix> {
    let (m, n) = (x.modulus, y.modulus);
    if gcd(m as i64, n as i64) != 1 {
        return Err(domain!("moduli {m} and {n} are not coprime"));
    }
    let e: Vec<u64> = x
        .entries()
        .iter()
        .zip(y.entries())
        .map(|(&p, q)| crt(p, m, q, n))
        .collect();
    Ok(ResidueMatrix {
        modulus: m * n,
        a: e[0],
        b: e[1],
        c: e[2],
        d: e[3],
    })
}

/// The labels of the named projective elements `g_•(p^k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    /// The identity, `r = 1`.
    I,
    /// `(1 2^{k−1}; 2^{k−1} 2^{k−1}+1)` for `p = 2`.
    ISharp,
    /// `(1 p^{k−1}; 0 1)`.
    Borel,
    /// `(1 p^{k−ℓ}; 0 1)` for the stored `ℓ`.
    BorelPow(u32),
    /// `(1 0; 0 2^{k−1}+1)` for `p = 2`, `k ≥ 2`.
    BorelSharp,
    /// The split Cartan normaliser `(1 0; 0 −1)`, `r = −1`.
    S,
    /// The non-split Cartan normaliser: `(0 ξ; 1 0)` for odd `p`, `(1 2; −2 −1)` for `p = 2`.
    Ns,
    /// `(1 1; −1 1)` for `p = 3`, `k = 1`.
    NsBar,
    /// `(0 −r; 1 0)`.
    Antidiag,
    /// `g_s` when `(−r/p) = 1` and `g_ns` otherwise, for odd `p`.
    Weyl,
}

/// A named element `g_•(p^k)` of `PGL₂(ℤ/p^kℤ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassLabel {
    /// Which named element.
    pub tag: Tag,
    /// The prime `p`.
    pub p: u64,
    /// The exponent `k ≥ 1`.
    pub k: u32,
}

impl ClassLabel {
    /// Builds a label, checking that the tag exists for `p^k`.
    pub fn new(tag: Tag, p: u64, k: u32) -> Result<Self> {
        if k == 0 || prime_divisors(p) != vec![p] {
            return Err(domain!("{p}^{k} is not a prime power"));
        }
        let ok = match tag {
            Tag::I | Tag::Borel | Tag::S | Tag::Ns | Tag::Antidiag => true,
            Tag::BorelPow(l) => (1..=k).contains(&l),
            Tag::ISharp => p == 2,
            Tag::BorelSharp => p == 2 && k >= 2,
            Tag::NsBar => p == 3 && k == 1,
            Tag::Weyl => p != 2,
        };
        if !ok {
            return Err(domain!("label {tag:?} is not defined modulo {p}^{k}"));
        }
        Ok(Self { tag, p, k })
    }

    /// The modulus `p^k`.
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }
}

/// The least quadratic non-residue modulo the odd prime `p`.
fn least_non_residue(p: u64) -> i64 {
    (2..p as i64)
        .find(|&x| kronecker(x, p as i64) == -1)
        .unwrap_or(2)
}

/// The projective matrix of a label, before lifting to determinant `r`.
fn projective(label: &ClassLabel, r: i64) -> Result<ResidueMatrix> {
    let q = label.modulus();
    let p = label.p as i64;
    let pk1 = p.pow(label.k - 1);
    let m = |a: i64, b: i64, c: i64, d: i64| ResidueMatrix::new(q, a, b, c, d);
    Ok(match label.tag {
        Tag::I => m(1, 0, 0, 1),
        Tag::Borel => m(1, pk1, 0, 1),
        Tag::BorelPow(l) => m(1, p.pow(label.k - l), 0, 1),
        Tag::ISharp => m(1, pk1, pk1, pk1 + 1),
        Tag::BorelSharp => m(1, 0, 0, pk1 + 1),
        Tag::S => m(1, 0, 0, -1),
        Tag::Ns if label.p == 2 => m(1, 2, -2, -1),
        Tag::Ns => m(0, least_non_residue(label.p), 1, 0),
        Tag::NsBar => m(1, 1, -1, 1),
        Tag::Antidiag => m(0, -r, 1, 0),
        Tag::Weyl => {
            let tag = if kronecker(-r, p) == 1 {
                Tag::S
            } else {
                Tag::Ns
            };
            return projective(&ClassLabel { tag, ..*label }, r);
        }
    })
}

/// A lift of `g_•(p^k)` with determinant exactly `r`.
///
/// Among the scalar multiples `u·P` of the tabulated projective matrix `P`
/// with `u²·det(P) ≡ r`, the lexicographically least entry tuple is chosen.
pub fn standard_generator(label: ClassLabel, r: i64) -> Result<ResidueMatrix> {
    let q = label.modulus();
    if gcd(r, q as i64) != 1 {
        return Err(domain!("r = {r} is not a unit modulo {q}"));
    }
    let base = projective(&label, r)?;
    let target = modulo(r, q);
    units(q)
        .into_iter()
        .map(|u| base.scale(u as i64))
        .filter(|g| g.det() == target % q)
        .min_by_key(|g| g.entries())
        .ok_or_else(|| {
            domain!(
                "label {:?} modulo {q} has no lift of determinant {r}",
                label.tag
            )
        })
}

/// `g_weyl(M, r)` for odd `M ≥ 3`, glued by CRT from the prime-power pieces.
pub fn weyl_generator(m: u64, r: i64) -> Result<ResidueMatrix> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(domain!("g_weyl needs an odd modulus >= 3, got {m}"));
    }
    let mut acc: Option<ResidueMatrix> = None;
    for (p, e) in crate::arith::factorize(m) {
        let g = standard_generator(ClassLabel::new(Tag::Weyl, p, e)?, r)?;
        acc = Some(match acc {
            None => g,
            Some(prev) => crt_combine(&prev, &g)?,
        });
    }
    acc.ok_or_else(|| domain!("empty factorisation of {m}"))
}

/// The conjugacy-class families of `g ∈ GL₂(ℤ/Nℤ)/{±1}` with `g² = ±det(g)`,
/// written against `N = 2^k·M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InvolutionFamily {
    /// `λ·g_I` for `λ ∈ Λ(N, r)`.
    Scalar {
        /// The scalar `λ`.
        lambda: u64,
    },
    /// `λ·(g_borel, g_I)` for `λ ∈ Λ(N, r)`, `k ≥ 1`.
    Borel {
        /// The scalar `λ`.
        lambda: u64,
    },
    /// `g_weyl` for odd `N`.
    Weyl,
    /// `(g_I, g_weyl)` for `k = 1`.
    IWeyl,
    /// `(g_antidiag, g_weyl)` for `k ≥ 1`.
    AntidiagWeyl,
    /// `(g_s, g_weyl)`, or `(ω·g_s, g_weyl)` with `ω = 2^{k−1}+1` when `omega`.
    SWeyl {
        /// Whether the 2-part is multiplied by `ω`.
        omega: bool,
    },
    /// `(g_ns, g_weyl)`, or `(ω·g_ns, g_weyl)` when `omega`.
    NsWeyl {
        /// Whether the 2-part is multiplied by `ω`.
        omega: bool,
    },
}

impl fmt::Display for InvolutionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Scalar { lambda } => write!(f, "{lambda}*I"),
            Self::Borel { lambda } => write!(f, "{lambda}*(borel,I)"),
            Self::Weyl => write!(f, "weyl"),
            Self::IWeyl => write!(f, "(I,weyl)"),
            Self::AntidiagWeyl => write!(f, "(antidiag,weyl)"),
            Self::SWeyl { omega: false } => write!(f, "(s,weyl)"),
            Self::SWeyl { omega: true } => write!(f, "(w*s,weyl)"),
            Self::NsWeyl { omega: false } => write!(f, "(ns,weyl)"),
            Self::NsWeyl { omega: true } => write!(f, "(w*ns,weyl)"),
        }
    }
}

/// A representative matrix for one conjugacy class, tagged by its family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvolutionClass {
    /// The family label.
    pub family: InvolutionFamily,
    /// A representative with determinant `r`.
    pub matrix: ResidueMatrix,
}

/// Glues a 2-primary part and an odd part, either of which may be trivial.
fn glue(two: Option<ResidueMatrix>, odd: Option<ResidueMatrix>) -> Result<ResidueMatrix> {
    match (two, odd) {
        (Some(x), Some(y)) => crt_combine(&x, &y),
        (Some(x), None) | (None, Some(x)) => Ok(x),
        (None, None) => Err(domain!("level 1 has no matrices")),
    }
}

/// The representative matrix of a family at level `N` and determinant `r`.
pub fn family_representative(n: u64, r: i64, family: InvolutionFamily) -> Result<ResidueMatrix> {
    if n < 2 || gcd(r, n as i64) != 1 {
        return Err(domain!(
            "need N >= 2 and gcd(r, N) = 1, got N = {n}, r = {r}"
        ));
    }
    let (k, m) = split_two(n);
    let two = |tag: Tag, det: i64| -> Result<Option<ResidueMatrix>> {
        if k == 0 {
            return Err(domain!("family needs even N, got {n}"));
        }
        standard_generator(ClassLabel::new(tag, 2, k)?, det).map(Some)
    };
    let weyl = || -> Result<Option<ResidueMatrix>> {
        if m == 1 {
            Ok(None)
        } else {
            weyl_generator(m, r).map(Some)
        }
    };
    let identity_odd = (m > 1).then(|| ResidueMatrix::identity(m));
    let omega = |g: Option<ResidueMatrix>, on: bool| {
        g.map(|g| {
            if on {
                g.scale((1i64 << (k - 1)) + 1)
            } else {
                g
            }
        })
    };
    let g = match family {
        InvolutionFamily::Scalar { lambda } => ResidueMatrix::scalar(n, lambda as i64),
        InvolutionFamily::Borel { lambda } => {
            glue(two(Tag::Borel, 1)?, identity_odd)?.scale(lambda as i64)
        }
        InvolutionFamily::Weyl => {
            if k != 0 {
                return Err(domain!("g_weyl alone needs odd N, got {n}"));
            }
            weyl_generator(m, r)?
        }
        InvolutionFamily::IWeyl => {
            if k != 1 {
                return Err(domain!("(I,weyl) needs N = 2M, got {n}"));
            }
            glue(two(Tag::I, r)?, weyl()?)?
        }
        InvolutionFamily::AntidiagWeyl => glue(two(Tag::Antidiag, r)?, weyl()?)?,
        InvolutionFamily::SWeyl { omega: on } => {
            if k < 2 {
                return Err(domain!("(s,weyl) needs 4 | N, got {n}"));
            }
            glue(omega(two(Tag::S, r)?, on), weyl()?)?
        }
        InvolutionFamily::NsWeyl { omega: on } => {
            if k < 2 {
                return Err(domain!("(ns,weyl) needs 4 | N, got {n}"));
            }
            glue(omega(two(Tag::Ns, r)?, on), weyl()?)?
        }
    };
    Ok(g)
}

/// The family list of the closed-form classification, keyed by
/// `(k, r mod 2^min(k,3), r square mod M)`.
///
/// At `N = 2` the antidiagonal element is conjugate to `g_borel`, so only
/// `g_I` and `g_borel` are listed.
pub fn involution_families(n: u64, r: i64) -> Result<Vec<InvolutionFamily>> {
    if n < 2 || gcd(r, n as i64) != 1 {
        return Err(domain!(
            "need N >= 2 and gcd(r, N) = 1, got N = {n}, r = {r}"
        ));
    }
    let (k, m) = split_two(n);
    let square_odd = is_unit_square(m, r);
    let lambdas = || lambda_reps(n, r);
    let scalar_and_borel = |with_borel: bool| -> Vec<InvolutionFamily> {
        let mut out: Vec<InvolutionFamily> = lambdas()
            .into_iter()
            .map(|lambda| InvolutionFamily::Scalar { lambda })
            .collect();
        if with_borel {
            out.extend(
                lambdas()
                    .into_iter()
                    .map(|lambda| InvolutionFamily::Borel { lambda }),
            );
        }
        out
    };
    let mut out = Vec::new();
    match k {
        0 => {
            if square_odd {
                out.extend(scalar_and_borel(false));
            }
            out.push(InvolutionFamily::Weyl);
        }
        1 if m == 1 => out.extend(scalar_and_borel(true)),
        1 => {
            if square_odd {
                out.extend(scalar_and_borel(true));
            }
            out.push(InvolutionFamily::IWeyl);
            out.push(InvolutionFamily::AntidiagWeyl);
        }
        2 => {
            if modulo(r, 4) == 1 {
                if square_odd {
                    out.extend(scalar_and_borel(true));
                }
            } else {
                out.push(InvolutionFamily::SWeyl { omega: false });
                out.push(InvolutionFamily::NsWeyl { omega: false });
            }
            out.push(InvolutionFamily::AntidiagWeyl);
        }
        _ => {
            match modulo(r, 8) {
                1 if square_odd => out.extend(scalar_and_borel(true)),
                3 => {
                    out.push(InvolutionFamily::NsWeyl { omega: false });
                    out.push(InvolutionFamily::NsWeyl { omega: true });
                }
                7 => {
                    out.push(InvolutionFamily::SWeyl { omega: false });
                    out.push(InvolutionFamily::SWeyl { omega: true });
                }
                _ => {}
            }
            out.push(InvolutionFamily::AntidiagWeyl);
        }
    }
    Ok(out)
}

/// One representative per conjugacy class of `g ∈ GL₂(ℤ/Nℤ)/{±1}` with
/// `det g = r` and `g² = ±det(g)`, from the closed-form classification.
pub fn involution_classes(n: u64, r: i64) -> Result<Vec<InvolutionClass>> {
    involution_families(n, r)?
        .into_iter()
        .map(|family| {
            let matrix = family_representative(n, r, family)?;
            if matrix.det() != modulo(r, n) || !matrix.squares_to_pm_det() {
                return Err(inconsistent!(
                    "representative {matrix} of {family} is not an involution of determinant {r}"
                ));
            }
            Ok(InvolutionClass { family, matrix })
        })
        .collect()
}

/// All residue matrices modulo `n` with unit determinant.
pub fn gl2_elements(n: u64) -> Result<Vec<ResidueMatrix>> {
    enumeration_guard(n, MAX_ENUMERATION_LEVEL)?;
    let n_i = n as i64;
    let mut out = Vec::new();
    for a in 0..n_i {
        for b in 0..n_i {
            for c in 0..n_i {
                for d in 0..n_i {
                    let g = ResidueMatrix::new(n, a, b, c, d);
                    if g.is_invertible() {
                        out.push(g);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Generators of `GL₂(ℤ/nℤ)`: the two elementary unipotents and `diag(u, 1)`
/// for every unit `u`.
pub fn gl2_generators(n: u64) -> Vec<ResidueMatrix> {
    let mut gens = vec![
        ResidueMatrix::new(n, 1, 1, 0, 1),
        ResidueMatrix::new(n, 1, 0, 1, 1),
    ];
    gens.extend(
        units(n)
            .into_iter()
            .map(|u| ResidueMatrix::new(n, u as i64, 0, 0, 1)),
    );
    gens
}

/// The brute-force partition of the involutions of determinant `r` into
/// conjugacy classes modulo `±1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvolutionPartition {
    /// The level `N`.
    pub modulus: u64,
    /// The determinant `r`.
    pub r: u64,
    /// Each class as its sorted list of elements.
    pub classes: Vec<Vec<ResidueMatrix>>,
}

impl InvolutionPartition {
    /// The index of the class containing `g`, if any.
    pub fn locate(&self, g: &ResidueMatrix) -> Option<usize> {
        self.classes.iter().position(|c| c.binary_search(g).is_ok())
    }
}

/// Enumerates every `g` with `det g = r` and `g² = ±det(g)`, then splits them
/// into orbits under conjugation and negation.
pub fn brute_involution_classes(n: u64, r: i64) -> Result<InvolutionPartition> {
    enumeration_guard(n, MAX_ENUMERATION_LEVEL)?;
    if n < 2 || gcd(r, n as i64) != 1 {
        return Err(domain!(
            "need N >= 2 and gcd(r, N) = 1, got N = {n}, r = {r}"
        ));
    }
    let target = modulo(r, n);
    let members: Vec<ResidueMatrix> = gl2_elements(n)?
        .into_iter()
        .filter(|g| g.det() == target && g.squares_to_pm_det())
        .collect();
    let position: HashMap<ResidueMatrix, usize> =
        members.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let gens = gl2_generators(n);
    let mut class_of = vec![usize::MAX; members.len()];
    let mut classes = Vec::new();
    for start in 0..members.len() {
        if class_of[start] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut stack = vec![start];
        let mut orbit = Vec::new();
        class_of[start] = id;
        while let Some(i) = stack.pop() {
            let g = members[i];
            orbit.push(g);
            let mut next = vec![g.neg()];
            for h in &gens {
                next.push(g.conjugate_by(h)?);
            }
            for x in next {
                let j = *position
                    .get(&x)
                    .ok_or_else(|| inconsistent!("conjugate {x} left the involution set"))?;
                if class_of[j] == usize::MAX {
                    class_of[j] = id;
                    stack.push(j);
                }
            }
        }
        orbit.sort_unstable();
        classes.push(orbit);
    }
    Ok(InvolutionPartition {
        modulus: n,
        r: target,
        classes,
    })
}

/// Checks the closed-form classification against brute force at `(N, r)`:
/// the representatives must fall into pairwise distinct classes and exhaust them.
pub fn verify_involution_classes(n: u64, r: i64) -> Result<()> {
    verify_class_list(n, r, &involution_classes(n, r)?)
}

/// Checks an arbitrary list of class representatives at `(N, r)` against
/// brute force, naming the first offending class on failure.
pub fn verify_class_list(n: u64, r: i64, closed: &[InvolutionClass]) -> Result<()> {
    let brute = brute_involution_classes(n, r)?;
    let mut seen = vec![None; brute.classes.len()];
    for class in closed {
        let idx = brute
            .locate(&class.matrix)
            .ok_or_else(|| inconsistent!("N={n}, r={r}: {} is not an involution", class.family))?;
        if let Some(other) = seen[idx] {
            return Err(inconsistent!(
                "N={n}, r={r}: {} and {} are conjugate",
                other,
                class.family
            ));
        }
        seen[idx] = Some(class.family);
    }
    if closed.len() != brute.classes.len() {
        return Err(inconsistent!(
            "N={n}, r={r}: closed form lists {} classes, enumeration finds {}",
            closed.len(),
            brute.classes.len()
        ));
    }
    Ok(())
}

/// Which subgroup a [`SubgroupH`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubgroupKind {
    /// All of `GL₂(ℤ/Nℤ)`.
    Full,
    /// The centraliser `H_g`.
    Centralizer,
    /// The extended centraliser `H_g⁺ = {h : g h g⁻¹ = ±h}`.
    ExtendedCentralizer,
    /// The intersection with `SL₂(ℤ/Nℤ)`.
    SpecialIntersection,
    /// A subgroup given by an explicit element list.
    Custom,
}

/// An explicit subgroup of `GL₂(ℤ/Nℤ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupH {
    /// The level `N`.
    pub modulus: u64,
    /// What the subgroup is.
    pub kind: SubgroupKind,
    /// Its elements, sorted.
    pub elements: Vec<ResidueMatrix>,
}

impl SubgroupH {
    fn from_elements(modulus: u64, kind: SubgroupKind, mut elements: Vec<ResidueMatrix>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        Self {
            modulus,
            kind,
            elements,
        }
    }

    /// Wraps an explicit element list, checking closure under products.
    pub fn custom(modulus: u64, elements: Vec<ResidueMatrix>) -> Result<Self> {
        let h = Self::from_elements(modulus, SubgroupKind::Custom, elements);
        if h.elements
            .iter()
            .any(|g| g.modulus != modulus || !g.is_invertible())
        {
            return Err(domain!(
                "elements must be invertible matrices modulo {modulus}"
            ));
        }
        for x in &h.elements {
            for y in &h.elements {
                if !h.contains(&x.mul(y)) {
                    return Err(domain!("element list is not closed under multiplication"));
                }
            }
        }
        Ok(h)
    }

    /// Number of elements.
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Membership test.
    pub fn contains(&self, g: &ResidueMatrix) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    /// True when `−I` lies in the subgroup.
    pub fn contains_minus_identity(&self) -> bool {
        self.contains(&ResidueMatrix::scalar(self.modulus, -1))
    }

    /// The subgroup `H ∩ SL₂(ℤ/Nℤ)`.
    pub fn special_part(&self) -> Self {
        let one = 1 % self.modulus;
        Self::from_elements(
            self.modulus,
            SubgroupKind::SpecialIntersection,
            self.elements
                .iter()
                .copied()
                .filter(|g| g.det() == one)
                .collect(),
        )
    }

    /// The index `[(ℤ/Nℤ)^× : det(H)]`.
    pub fn det_index(&self) -> u64 {
        let mut dets: Vec<u64> = self.elements.iter().map(ResidueMatrix::det).collect();
        dets.sort_unstable();
        dets.dedup();
        units(self.modulus).len() as u64 / dets.len() as u64
    }
}

/// `GL₂(ℤ/nℤ)` as an explicit subgroup.
pub fn full_group(n: u64) -> Result<SubgroupH> {
    Ok(SubgroupH::from_elements(
        n,
        SubgroupKind::Full,
        gl2_elements(n)?,
    ))
}

fn checked_inverse(g: &ResidueMatrix) -> Result<ResidueMatrix> {
    g.inverse().map_err(|_| domain!("{g} is not invertible"))
}

/// The centraliser `H_g = {h : g h g⁻¹ = h}`.
pub fn centralizer(g: &ResidueMatrix) -> Result<SubgroupH> {
    let gi = checked_inverse(g)?;
    let elements = gl2_elements(g.modulus)?
        .into_iter()
        .filter(|h| g.mul(h).mul(&gi) == *h)
        .collect();
    Ok(SubgroupH::from_elements(
        g.modulus,
        SubgroupKind::Centralizer,
        elements,
    ))
}

/// The extended centraliser `H_g⁺ = {h : g h g⁻¹ = ±h}`.
pub fn extended_centralizer(g: &ResidueMatrix) -> Result<SubgroupH> {
    let gi = checked_inverse(g)?;
    let elements = gl2_elements(g.modulus)?
        .into_iter()
        .filter(|h| {
            let x = g.mul(h).mul(&gi);
            x == *h || x == h.neg()
        })
        .collect();
    Ok(SubgroupH::from_elements(
        g.modulus,
        SubgroupKind::ExtendedCentralizer,
        elements,
    ))
}

/// Size of the conjugacy class of `g` in `GL₂(ℤ/Nℤ)`, by orbit enumeration.
pub fn conjugacy_class_size(g: &ResidueMatrix) -> Result<usize> {
    enumeration_guard(g.modulus, MAX_ENUMERATION_LEVEL)?;
    let gens = gl2_generators(g.modulus);
    let mut seen = std::collections::HashSet::from([*g]);
    let mut stack = vec![*g];
    while let Some(x) = stack.pop() {
        for h in &gens {
            let y = x.conjugate_by(h)?;
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    Ok(seen.len())
}

/// The matrix of multiplication by `ψ = a + bφ` on `E[N]` for an elliptic
/// curve with CM by the order of discriminant `D`.
///
/// With `D = −4d` and `φ = √−d` the matrix is `(a −bd; b a)`; with
/// `D = −d ≡ 1 (mod 4)` and `φ = (1 + √−d)/2` it is `(a −b(d+1)/4; b a+b)`.
pub fn cm_action_matrix(disc: Discriminant, a: i64, b: i64, n: u64) -> Result<ResidueMatrix> {
    let dv = disc.value();
    let (g, norm) = if dv.rem_euclid(4) == 0 {
        let d = -dv / 4;
        (ResidueMatrix::new(n, a, -b * d, b, a), a * a + d * b * b)
    } else {
        let d = -dv;
        let t = (d + 1) / 4;
        (
            ResidueMatrix::new(n, a, -b * t, b, a + b),
            a * a + a * b + t * b * b,
        )
    };
    if gcd(norm, n as i64) != 1 {
        return Err(domain!(
            "norm {norm} of {a} + {b}*phi is not coprime to {n}"
        ));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: i64) -> Discriminant {
        Discriminant::new(v).unwrap()
    }

    #[test]
    fn generators_have_determinant_r() {
        let s = standard_generator(ClassLabel::new(Tag::S, 5, 1).unwrap(), -1).unwrap();
        assert_eq!(s, ResidueMatrix::new(5, 1, 0, 0, -1));
        let ad = standard_generator(ClassLabel::new(Tag::Antidiag, 2, 3).unwrap(), 5).unwrap();
        assert_eq!(ad, ResidueMatrix::new(8, 0, -5, 1, 0).scale(3));
        assert_eq!(ad.det(), 5);
        let w = weyl_generator(15, 2).unwrap();
        assert_eq!(w.det(), 2);
        assert_eq!(w.mul(&w), ResidueMatrix::scalar(15, -2));
        assert!(standard_generator(ClassLabel::new(Tag::S, 5, 1).unwrap(), 2).is_err());
        assert!(ClassLabel::new(Tag::BorelSharp, 2, 1).is_err());
        assert!(ClassLabel::new(Tag::NsBar, 5, 1).is_err());
    }

    #[test]
    fn cm_matrices() {
        assert_eq!(
            cm_action_matrix(d(-4), 1, 1, 21).unwrap(),
            ResidueMatrix::new(21, 1, -1, 1, 1)
        );
        assert_eq!(
            cm_action_matrix(d(-11), -1, 3, 18).unwrap(),
            ResidueMatrix::new(18, -1, -9, 3, 2)
        );
        assert_eq!(
            cm_action_matrix(d(-8), 0, 1, 15).unwrap(),
            ResidueMatrix::new(15, 0, -2, 1, 0)
        );
        assert!(cm_action_matrix(d(-4), 1, 1, 2).is_err());
    }

    #[test]
    fn centralizer_orders() {
        let full = centralizer(&ResidueMatrix::identity(5)).unwrap();
        assert_eq!(full.order(), 480);
        let s = standard_generator(ClassLabel::new(Tag::S, 5, 1).unwrap(), -1).unwrap();
        assert_eq!(centralizer(&s).unwrap().order(), 16);
    }

    #[test]
    fn brute_counts() {
        assert_eq!(brute_involution_classes(7, 3).unwrap().classes.len(), 1);
        assert_eq!(brute_involution_classes(8, 7).unwrap().classes.len(), 3);
        verify_involution_classes(12, 11).unwrap();
    }

    #[test]
    fn guard_trips() {
        assert!(matches!(gl2_elements(25), Err(Error::Resource(_))));
    }
}
