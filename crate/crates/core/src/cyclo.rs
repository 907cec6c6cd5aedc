//! Exact arithmetic in the cyclotomic ring `Z[ζ_K]`, with `ζ_K = exp(-2πi/K)`.
//!
//! Values are kept in the group-ring form `Σ_j c_j ζ_K^j` with one integer
//! coefficient per exponent. That form is not unique (`1 + ζ_3 + ζ_3² = 0`),
//! so equality and zero tests reduce modulo the cyclotomic polynomial `Φ_K`.
//! Multiplication is a cyclic convolution of exponents and conjugation is the
//! index permutation `j ↦ -j mod K`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest ring order any construction is allowed to reach.
pub const MAX_ORDER: usize = 10_000;

/// An element of `Z[ζ_K]` in unreduced group-ring form.
#[derive(Clone, Debug)]
pub struct CycloNum {
    order: usize,
    coeffs: Vec<BigInt>,
}

impl CycloNum {
    pub fn new(order: usize, coeffs: Vec<BigInt>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(order));
        }
        if coeffs.len() != order {
            return Err(Error::CoeffCount {
                order,
                got: coeffs.len(),
            });
        }
        Ok(CycloNum { order, coeffs })
    }

    pub fn from_i64s(order: usize, coeffs: &[i64]) -> Result<Self> {
        Self::new(order, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        assert!(order > 0, "cyclotomic order must be positive");
        CycloNum {
            order,
            coeffs: vec![BigInt::zero(); order],
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The rational integer `n`, as an element of order 1.
    pub fn from_int(n: i64) -> Self {
        CycloNum {
            order: 1,
            coeffs: vec![BigInt::from(n)],
        }
    }

    /// `ζ_order^exponent`.
    pub fn root(order: usize, exponent: i64) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[exponent.rem_euclid(order as i64) as usize] = BigInt::one();
        z
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Re-expresses the value in `Z[ζ_target]`; `target` must be a multiple of the order.
    pub fn promote(&self, target: usize) -> Result<Self> {
        if target == 0 || !target.is_multiple_of(self.order) {
            return Err(Error::BadPromotion {
                from: self.order,
                to: target,
            });
        }
        Ok(self.promote_unchecked(target))
    }

    fn promote_unchecked(&self, target: usize) -> Self {
        if target == self.order {
            return self.clone();
        }
        let step = target / self.order;
        let mut coeffs = vec![BigInt::zero(); target];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[j * step] = c.clone();
            }
        }
        CycloNum { order: target, coeffs }
    }

    pub fn conj(&self) -> Self {
        let k = self.order;
        let mut coeffs = vec![BigInt::zero(); k];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[(k - j) % k] = c.clone();
        }
        CycloNum { order: k, coeffs }
    }

    /// True iff the represented value is exactly zero.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(Zero::is_zero) {
            return true;
        }
        self.reduced().iter().all(Zero::is_zero)
    }

    /// Remainder of the coefficient polynomial modulo `Φ_order`, padded to
    /// `φ(order)` entries. Two values of the same order are equal iff their
    /// reduced forms are equal.
    pub fn reduced(&self) -> Vec<BigInt> {
        let phi = cyclotomic_polynomial(self.order);
        poly_rem_monic(&self.coeffs, &phi)
    }

    /// The canonical representative at this order: the reduced remainder
    /// written back into a full coefficient vector.
    pub fn normalized(&self) -> Self {
        let mut coeffs = self.reduced();
        coeffs.resize(self.order, BigInt::zero());
        CycloNum {
            order: self.order,
            coeffs,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let k = self.order as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let theta = -2.0 * std::f64::consts::PI * (j as f64) / k;
            let w = c.to_f64().unwrap_or(f64::NAN);
            acc += Complex64::from_polar(w, theta);
        }
        acc
    }

    /// Returns the rational integer value if the element reduces to one.
    pub fn as_integer(&self) -> Option<BigInt> {
        let r = self.reduced();
        if r.iter().skip(1).all(Zero::is_zero) {
            Some(r.first().cloned().unwrap_or_default())
        } else {
            None
        }
    }

    /// Returns `e` when the element equals `ζ_order^e` exactly (after reduction
    /// at this order), `None` otherwise.
    pub fn as_root_of_unity(&self) -> Option<usize> {
        (0..self.order).find(|&e| *self == CycloNum::root(self.order, e as i64))
    }

    fn binary<F>(&self, other: &Self, mut f: F) -> Self
    where
        F: FnMut(&mut BigInt, &BigInt),
    {
        let k = self.order.lcm(&other.order);
        let mut out = self.promote_unchecked(k);
        let step = k / other.order;
        for (j, c) in other.coeffs.iter().enumerate() {
            if !c.is_zero() {
                f(&mut out.coeffs[j * step], c);
            }
        }
        out
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl Eq for CycloNum {}

impl<'a> Add<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: &CycloNum) -> CycloNum {
        self.binary(rhs, |a, b| *a += b)
    }
}

impl<'a> Sub<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: &CycloNum) -> CycloNum {
        self.binary(rhs, |a, b| *a -= b)
    }
}

impl<'a> Mul<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: &CycloNum) -> CycloNum {
        let k = self.order.lcm(&rhs.order);
        let (sa, sb) = (k / self.order, k / rhs.order);
        let mut coeffs = vec![BigInt::zero(); k];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                mul_add(&mut coeffs[(i * sa + j * sb) % k], a, b);
            }
        }
        CycloNum { order: k, coeffs }
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: CycloNum) -> CycloNum {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            match (j, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "z{}^{}", self.order, j)?,
                (_, false) => write!(f, "{mag}*z{}^{}", self.order, j)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `acc += a * b`, avoiding a temporary big integer when both factors are small.
#[inline]
fn mul_add(acc: &mut BigInt, a: &BigInt, b: &BigInt) {
    if let (Some(x), Some(y)) = (a.to_i64(), b.to_i64()) {
        if let Some(p) = x.checked_mul(y) {
            *acc += p;
            return;
        }
    }
    *acc += a * b;
}

/// Running sum of products `a * conj(b)` at a fixed ring order.
///
/// The order must be a common multiple of every operand order.
#[derive(Debug)]
pub(crate) struct ConjProductSum {
    order: usize,
    coeffs: Vec<BigInt>,
}

impl ConjProductSum {
    pub(crate) fn new(order: usize) -> Self {
        ConjProductSum {
            order,
            coeffs: vec![BigInt::zero(); order],
        }
    }

    pub(crate) fn add_product_conj(&mut self, a: &CycloNum, b: &CycloNum) {
        let k = self.order;
        debug_assert!(k.is_multiple_of(a.order) && k.is_multiple_of(b.order));
        let (sa, sb) = (k / a.order, k / b.order);
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let idx = (i * sa + k - (j * sb) % k) % k;
                mul_add(&mut self.coeffs[idx], x, y);
            }
        }
    }

    pub(crate) fn finish(self) -> CycloNum {
        CycloNum {
            order: self.order,
            coeffs: self.coeffs,
        }
    }
}

fn phi_cache() -> &'static Mutex<HashMap<usize, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The cyclotomic polynomial `Φ_k`, coefficients from the constant term upward.
///
/// Computed as `(x^k - 1) / Π_{d | k, d < k} Φ_d` by exact division and memoised.
pub fn cyclotomic_polynomial(k: usize) -> Arc<Vec<BigInt>> {
    assert!(k > 0, "cyclotomic polynomial index must be positive");
    if let Some(p) = phi_cache().lock().unwrap().get(&k) {
        return Arc::clone(p);
    }
    let mut num = vec![BigInt::zero(); k + 1];
    num[0] = BigInt::from(-1);
    num[k] = BigInt::one();
    for d in (1..k).filter(|d| k.is_multiple_of(*d)) {
        let div = cyclotomic_polynomial(d);
        let (q, r) = poly_divmod_monic(&num, &div);
        debug_assert!(r.iter().all(Zero::is_zero));
        num = q;
    }
    let phi = Arc::new(num);
    phi_cache().lock().unwrap().insert(k, Arc::clone(&phi));
    phi
}

/// Euclidean division by a monic polynomial; both in ascending-coefficient form.
pub(crate) fn poly_divmod_monic(num: &[BigInt], div: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let dd = div.len() - 1;
    debug_assert!(div[dd].is_one());
    let mut rem = num.to_vec();
    if num.len() <= dd {
        rem.resize(dd, BigInt::zero());
        return (vec![BigInt::zero()], rem);
    }
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for i in (dd..num.len()).rev() {
        let lead = std::mem::take(&mut rem[i]);
        if lead.is_zero() {
            continue;
        }
        for (j, c) in div.iter().enumerate().take(dd) {
            if !c.is_zero() {
                rem[i - dd + j] -= &lead * c;
            }
        }
        quot[i - dd] = lead;
    }
    rem.truncate(dd);
    (quot, rem)
}

fn poly_rem_monic(num: &[BigInt], div: &[BigInt]) -> Vec<BigInt> {
    poly_divmod_monic(num, div).1
}

/// Euler's totient, used for sanity checks on `deg Φ_k`.
pub fn totient(n: usize) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}
