//! The bihomogeneous coordinate ring `C[s,t,u,v]/(s²u)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::exact_linalg::Rational;

/// Exponents of `s, t, u, v`.
pub type Exps = [u32; 4];

pub const VARS: [&str; 4] = ["s", "t", "u", "v"];

/// True unless the monomial is a multiple of `s²u`.
pub fn is_normal(e: &Exps) -> bool {
    e[0] < 2 || e[2] == 0
}

pub fn bidegree_of(e: &Exps) -> (i64, i64) {
    ((e[0] + e[1]) as i64, (e[2] + e[3]) as i64)
}

pub fn monomial_string(e: &Exps) -> String {
    let parts: Vec<String> = e
        .iter()
        .zip(VARS)
        .filter(|(&x, _)| x > 0)
        .map(|(&x, v)| if x == 1 { v.to_string() } else { format!("{v}^{x}") })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" ")
    }
}

/// Normal-form monomial basis of the bidegree `(a, b)` part of `C[s,t,u,v]/(s²u)`,
/// ordered by increasing `s`-exponent, then decreasing `u`-exponent.
pub fn sections_curve(a: i64, b: i64) -> Vec<Exps> {
    let mut out = Vec::new();
    if a < 0 || b < 0 {
        return out;
    }
    for i in 0..=a as u32 {
        for k in (0..=b as u32).rev() {
            let e = [i, a as u32 - i, k, b as u32 - k];
            if is_normal(&e) {
                out.push(e);
            }
        }
    }
    out
}

/// A bihomogeneous element of `C[s,t,u,v]/(s²u)` kept in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveRingElement {
    bideg: (i64, i64),
    terms: BTreeMap<Exps, Rational>,
}

impl CurveRingElement {
    pub fn zero(bideg: (i64, i64)) -> Self {
        CurveRingElement {
            bideg,
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial([0, 0, 0, 0])
    }

    pub fn monomial(e: Exps) -> Self {
        Self::term(e, Rational::one())
    }

    pub fn term(e: Exps, c: Rational) -> Self {
        let mut x = Self::zero(bidegree_of(&e));
        if is_normal(&e) && !c.is_zero() {
            x.terms.insert(e, c);
        }
        x
    }

    /// `s^i t^j u^k v^l`.
    pub fn stuv(i: u32, j: u32, k: u32, l: u32) -> Self {
        Self::monomial([i, j, k, l])
    }

    /// Sum of terms, all of which must have bidegree `bideg`.
    pub fn from_terms<I>(bideg: (i64, i64), terms: I) -> Option<Self>
    where
        I: IntoIterator<Item = (Exps, Rational)>,
    {
        let mut x = Self::zero(bideg);
        for (e, c) in terms {
            if bidegree_of(&e) != bideg {
                return None;
            }
            x.add_term(e, c);
        }
        Some(x)
    }

    fn add_term(&mut self, e: Exps, c: Rational) {
        if !is_normal(&e) || c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn bideg(&self) -> (i64, i64) {
        self.bideg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &Exps) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// The single term of a monomial multiple, if this element is one.
    pub fn as_monomial(&self) -> Option<(Exps, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut x = Self::zero(self.bideg);
        for (e, v) in &self.terms {
            x.add_term(*e, v * c);
        }
        x
    }
}

impl Add for &CurveRingElement {
    type Output = CurveRingElement;
    fn add(self, rhs: &CurveRingElement) -> CurveRingElement {
        let mut x = self.clone();
        if x.is_zero() {
            x.bideg = rhs.bideg;
        }
        for (e, c) in &rhs.terms {
            x.add_term(*e, c.clone());
        }
        x
    }
}

impl Sub for &CurveRingElement {
    type Output = CurveRingElement;
    fn sub(self, rhs: &CurveRingElement) -> CurveRingElement {
        self + &(-rhs)
    }
}

impl Neg for &CurveRingElement {
    type Output = CurveRingElement;
    fn neg(self) -> CurveRingElement {
        self.scale(&-Rational::one())
    }
}

impl Mul for &CurveRingElement {
    type Output = CurveRingElement;
    fn mul(self, rhs: &CurveRingElement) -> CurveRingElement {
        let mut x = CurveRingElement::zero((self.bideg.0 + rhs.bideg.0, self.bideg.1 + rhs.bideg.1));
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let e = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                x.add_term(e, ca * cb);
            }
        }
        x
    }
}

impl fmt::Display for CurveRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let m = monomial_string(e);
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if abs.is_one() {
                write!(f, "{m}")?;
            } else if m == "1" {
                write!(f, "{abs}")?;
            } else {
                write!(f, "{abs} {m}")?;
            }
        }
        Ok(())
    }
}

/// Matrix of ring elements, indexed `[target summand][source summand]`.
pub type RingMatrix = Vec<Vec<CurveRingElement>>;

/// `f ∘ g` for matrices of maps between split bundles.
pub fn compose(f: &RingMatrix, g: &RingMatrix) -> RingMatrix {
    let inner = g.len();
    let cols = g.first().map(|r| r.len()).unwrap_or(0);
    f.iter()
        .map(|frow| {
            (0..cols)
                .map(|a| {
                    let mut acc: Option<CurveRingElement> = None;
                    for b in 0..inner {
                        let term = &frow[b] * &g[b][a];
                        acc = Some(match acc {
                            None => term,
                            Some(x) => &x + &term,
                        });
                    }
                    acc.unwrap_or_else(|| CurveRingElement::zero((0, 0)))
                })
                .collect()
        })
        .collect()
}

pub fn is_zero_matrix(m: &RingMatrix) -> bool {
    m.iter().all(|r| r.iter().all(|x| x.is_zero()))
}
