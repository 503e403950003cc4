//! Arithmetic in the prime field `F_p`.

use crate::error::Error;

/// Context for a prime field `F_p`. Residues are stored as `u32` in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

/// A single element of `F_p`, carrying its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    pub residue: u32,
    pub p: u32,
}

impl Fp {
    /// Largest modulus accepted. Products of two residues must fit in `u64`.
    pub const MAX_PRIME: u32 = 1 << 30;

    pub fn new(p: u32) -> Result<Self, Error> {
        if !(2..=Self::MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidField(p));
        }
        Ok(Fp { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        self.reduce(t0)
    }

    pub fn scalar(self, x: i64) -> FieldScalar {
        FieldScalar {
            residue: self.reduce(x),
            p: self.p,
        }
    }
}

impl FieldScalar {
    fn field(self) -> Fp {
        Fp { p: self.p }
    }

    pub fn is_zero(self) -> bool {
        self.residue == 0
    }

    pub fn inverse(self) -> Option<FieldScalar> {
        (!self.is_zero()).then(|| FieldScalar {
            residue: self.field().inv(self.residue),
            p: self.p,
        })
    }
}

impl core::ops::Add for FieldScalar {
    type Output = FieldScalar;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        FieldScalar {
            residue: self.field().add(self.residue, rhs.residue),
            p: self.p,
        }
    }
}

impl core::ops::Sub for FieldScalar {
    type Output = FieldScalar;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        FieldScalar {
            residue: self.field().sub(self.residue, rhs.residue),
            p: self.p,
        }
    }
}

impl core::ops::Mul for FieldScalar {
    type Output = FieldScalar;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        FieldScalar {
            residue: self.field().mul(self.residue, rhs.residue),
            p: self.p,
        }
    }
}

impl core::ops::Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> Self {
        FieldScalar {
            residue: self.field().neg(self.residue),
            p: self.p,
        }
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
