//! Table-driven arithmetic in GF(2^m), 2 ≤ m ≤ 8.

use crate::error::{Error, Result};

pub type Symbol = u16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    m: u32,
    order: usize,
    exp: Vec<Symbol>,
    log: Vec<Symbol>,
}

impl GaloisField {
    /// Builds the field from a primitive polynomial given with its x^m term,
    /// e.g. `0b1_0011` for x⁴ + x + 1.
    pub fn new(m: u32, primitive_poly: u32) -> Result<Self> {
        if !(2..=8).contains(&m) || primitive_poly >> m != 1 {
            return Err(Error::Config(format!(
                "bad field definition m = {m}, poly = {primitive_poly:#x}"
            )));
        }
        let size = 1usize << m;
        let order = size - 1;
        let mut exp = vec![0; 2 * order];
        let mut log = vec![0; size];
        let mut x = 1u32;
        for (i, e) in exp.iter_mut().take(order).enumerate() {
            if i > 0 && x == 1 {
                return Err(Error::Config(format!(
                    "polynomial {primitive_poly:#x} is not primitive"
                )));
            }
            *e = x as Symbol;
            log[x as usize] = i as Symbol;
            x <<= 1;
            if x & size as u32 != 0 {
                x ^= primitive_poly;
            }
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Self { m, order, exp, log })
    }

    /// GF(16) from x⁴ + x + 1.
    pub fn gf16() -> Self {
        Self::new(4, 0b1_0011).expect("x^4 + x + 1 is primitive")
    }

    pub fn bits(&self) -> u32 {
        self.m
    }

    /// Number of nonzero elements, 2^m − 1.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of field elements, 2^m.
    pub fn size(&self) -> usize {
        self.order + 1
    }

    pub fn contains(&self, a: Symbol) -> bool {
        (a as usize) <= self.order
    }

    pub fn alpha_pow(&self, e: i64) -> Symbol {
        self.exp[e.rem_euclid(self.order as i64) as usize]
    }

    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    pub fn inv(&self, a: Symbol) -> Symbol {
        assert!(a != 0, "zero has no inverse");
        self.exp[(self.order - self.log[a as usize] as usize) % self.order]
    }

    pub fn div(&self, a: Symbol, b: Symbol) -> Symbol {
        self.mul(a, self.inv(b))
    }

    /// Evaluates a polynomial with coefficients lowest degree first.
    pub fn eval_low_first(&self, poly: &[Symbol], x: Symbol) -> Symbol {
        poly.iter().rev().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }

    /// Evaluates a polynomial with coefficients highest degree first.
    pub fn eval_high_first(&self, poly: &[Symbol], x: Symbol) -> Symbol {
        poly.iter().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_gf16() {
        let f = GaloisField::gf16();
        assert_eq!(f.order(), 15);
        assert_eq!(f.size(), 16);
        for a in 1..16 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            for b in 0..16 {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..16 {
                    assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
                }
            }
        }
        // α^4 = α + 1
        assert_eq!(f.alpha_pow(4), 0b0011);
    }

    #[test]
    fn rejects_non_primitive() {
        // x^4 + x^3 + x^2 + x + 1 has order 5
        assert!(GaloisField::new(4, 0b1_1111).is_err());
        assert!(GaloisField::new(9, 0b10_0001_0001).is_err());
    }
}
