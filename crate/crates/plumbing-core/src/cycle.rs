use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Q;

/// Integral cycle: coefficient vector indexed by the canonical vertex order of
/// the graph it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cycle(pub Vec<i64>);

/// Rational cycle, an element of `L ⊗ Q`. Elements of the dual lattice `L'`
/// are represented this way.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RatCycle(pub Vec<Q>);

impl Cycle {
    pub fn zero(n: usize) -> Self {
        Cycle(vec![0; n])
    }

    /// Reduced cycle `E_I` of a vertex set.
    pub fn reduced(n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Cycle::zero(n);
        for v in support {
            c.0[v] = 1;
        }
        c
    }

    pub fn unit(n: usize, v: usize) -> Self {
        Cycle::reduced(n, [v])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Vertices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, _)| i).collect()
    }

    pub fn support_mask(&self) -> Vec<bool> {
        self.0.iter().map(|&c| c != 0).collect()
    }

    /// Reduced cycle on the support.
    pub fn support_cycle(&self) -> Cycle {
        Cycle(self.0.iter().map(|&c| i64::from(c != 0)).collect())
    }

    /// Componentwise `a <= b`.
    pub fn le(&self, other: &Cycle) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn meet(&self, other: &Cycle) -> Cycle {
        Cycle(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn join(&self, other: &Cycle) -> Cycle {
        Cycle(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// Copy with coefficients outside `mask` set to zero.
    pub fn masked(&self, mask: &[bool]) -> Cycle {
        Cycle(self.0.iter().zip(mask).map(|(&c, &m)| if m { c } else { 0 }).collect())
    }

    pub fn to_rational(&self) -> RatCycle {
        RatCycle(self.0.iter().map(|&c| Q::from_integer(BigInt::from(c))).collect())
    }
}

impl Index<usize> for Cycle {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Cycle {
    fn index_mut(&mut self, i: usize) -> &mut i64 {
        &mut self.0[i]
    }
}

impl Add for &Cycle {
    type Output = Cycle;
    fn add(self, rhs: &Cycle) -> Cycle {
        Cycle(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Cycle {
    type Output = Cycle;
    fn sub(self, rhs: &Cycle) -> Cycle {
        Cycle(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Cycle {
    type Output = Cycle;
    fn neg(self) -> Cycle {
        Cycle(self.0.iter().map(|a| -a).collect())
    }
}

impl RatCycle {
    pub fn zero(n: usize) -> Self {
        RatCycle(vec![Q::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.denom().is_one())
    }

    /// Integral cycle if every coefficient is an integer that fits in `i64`.
    pub fn to_integral(&self) -> Option<Cycle> {
        self.0
            .iter()
            .map(|c| if c.denom().is_one() { i64::try_from(c.numer()).ok() } else { None })
            .collect::<Option<Vec<_>>>()
            .map(Cycle)
    }

    pub fn scaled(&self, k: &Q) -> RatCycle {
        RatCycle(self.0.iter().map(|c| c * k).collect())
    }

    /// Representative in the half-open unit cube: subtracts the integer part
    /// of every coefficient.
    pub fn fractional_part(&self) -> RatCycle {
        RatCycle(self.0.iter().map(|c| c - c.floor()).collect())
    }

    /// Componentwise floor.
    pub fn floor(&self) -> Vec<BigInt> {
        self.0.iter().map(|c| c.numer().div_floor(c.denom())).collect()
    }

    pub fn has_negative(&self) -> bool {
        self.0.iter().any(Signed::is_negative)
    }
}

impl Index<usize> for RatCycle {
    type Output = Q;
    fn index(&self, i: usize) -> &Q {
        &self.0[i]
    }
}

impl IndexMut<usize> for RatCycle {
    fn index_mut(&mut self, i: usize) -> &mut Q {
        &mut self.0[i]
    }
}

impl Add for &RatCycle {
    type Output = RatCycle;
    fn add(self, rhs: &RatCycle) -> RatCycle {
        RatCycle(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RatCycle {
    type Output = RatCycle;
    fn sub(self, rhs: &RatCycle) -> RatCycle {
        RatCycle(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RatCycle {
    type Output = RatCycle;
    fn neg(self) -> RatCycle {
        RatCycle(self.0.iter().map(|a| -a).collect())
    }
}

impl From<&Cycle> for RatCycle {
    fn from(c: &Cycle) -> Self {
        c.to_rational()
    }
}

/// Converts an integral rational to `i64`.
pub(crate) fn q_to_i64(q: &Q) -> Option<i64> {
    if q.denom().is_one() {
        i64::try_from(q.numer()).ok()
    } else {
        None
    }
}

pub(crate) fn q_from_i64(k: i64) -> Q {
    Q::from_integer(BigInt::from(k))
}
