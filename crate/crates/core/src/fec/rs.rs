//! Systematic Reed–Solomon codes over GF(2^m), decoded with Berlekamp–Massey,
//! Chien search and Forney's formula.
//!
//! Codeword symbols are stored highest degree first: the first `k` symbols
//! are the message, the last `n − k` the remainder of `m(x)·x^(n−k)` modulo
//! the generator `g(x) = Π_{i=1}^{n−k} (x − α^i)`.

use super::gf::{GaloisField, Symbol};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RsOutcome {
    Decoded {
        message: Vec<Symbol>,
        corrected: usize,
    },
    Failure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReedSolomon {
    field: GaloisField,
    n: usize,
    k: usize,
    /// Highest degree first, monic.
    generator: Vec<Symbol>,
}

impl ReedSolomon {
    pub fn new(field: GaloisField, n: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= n || n > field.order() {
            return Err(Error::Config(format!(
                "invalid RS({n}, {k}) over GF(2^{})",
                field.bits()
            )));
        }
        let mut generator: Vec<Symbol> = vec![1];
        for i in 1..=(n - k) {
            let root = field.alpha_pow(i as i64);
            let mut next = vec![0; generator.len() + 1];
            for (j, &c) in generator.iter().enumerate() {
                next[j] ^= c;
                next[j + 1] ^= field.mul(c, root);
            }
            generator = next;
        }
        Ok(Self {
            field,
            n,
            k,
            generator,
        })
    }

    /// RS(15, 11) over GF(16).
    pub fn rs15_11() -> Self {
        Self::new(GaloisField::gf16(), 15, 11).expect("valid parameters")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        (self.n - self.k) / 2
    }

    pub fn d_min(&self) -> usize {
        self.n - self.k + 1
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn generator(&self) -> &[Symbol] {
        &self.generator
    }

    pub fn encode(&self, message: &[Symbol]) -> Result<Vec<Symbol>> {
        if message.len() != self.k {
            return Err(Error::Length {
                expected: self.k,
                got: message.len(),
            });
        }
        if let Some(&bad) = message.iter().find(|&&s| !self.field.contains(s)) {
            return Err(Error::Domain(format!(
                "symbol {bad} outside GF(2^{})",
                self.field.bits()
            )));
        }
        let parity_len = self.n - self.k;
        let mut work: Vec<Symbol> = message.to_vec();
        work.resize(self.n, 0);
        for i in 0..self.k {
            let coef = work[i];
            if coef != 0 {
                for (j, &g) in self.generator.iter().enumerate().skip(1) {
                    work[i + j] ^= self.field.mul(g, coef);
                }
            }
        }
        let mut codeword = message.to_vec();
        codeword.extend_from_slice(&work[self.k..self.k + parity_len]);
        Ok(codeword)
    }

    fn syndromes(&self, received: &[Symbol]) -> Vec<Symbol> {
        (1..=(self.n - self.k))
            .map(|j| {
                self.field
                    .eval_high_first(received, self.field.alpha_pow(j as i64))
            })
            .collect()
    }

    /// Error locator Λ(x), lowest degree first.
    fn berlekamp_massey(&self, syn: &[Symbol]) -> Vec<Symbol> {
        let f = &self.field;
        let mut lambda: Vec<Symbol> = vec![1];
        let mut prev: Vec<Symbol> = vec![1];
        let mut l = 0usize;
        let mut shift = 1usize;
        let mut prev_disc: Symbol = 1;
        for r in 0..syn.len() {
            let mut disc = syn[r];
            for i in 1..=l.min(lambda.len() - 1) {
                disc ^= f.mul(lambda[i], syn[r - i]);
            }
            if disc == 0 {
                shift += 1;
                continue;
            }
            let scale = f.div(disc, prev_disc);
            let mut next = lambda.clone();
            if next.len() < prev.len() + shift {
                next.resize(prev.len() + shift, 0);
            }
            for (i, &p) in prev.iter().enumerate() {
                next[i + shift] ^= f.mul(scale, p);
            }
            if 2 * l <= r {
                prev = lambda;
                l = r + 1 - l;
                prev_disc = disc;
                shift = 1;
            } else {
                shift += 1;
            }
            lambda = next;
        }
        lambda.truncate(l + 1);
        lambda
    }

    pub fn decode(&self, received: &[Symbol]) -> Result<RsOutcome> {
        if received.len() != self.n {
            return Err(Error::Length {
                expected: self.n,
                got: received.len(),
            });
        }
        if let Some(&bad) = received.iter().find(|&&s| !self.field.contains(s)) {
            return Err(Error::Domain(format!(
                "symbol {bad} outside GF(2^{})",
                self.field.bits()
            )));
        }
        let f = &self.field;
        let syn = self.syndromes(received);
        if syn.iter().all(|&s| s == 0) {
            return Ok(RsOutcome::Decoded {
                message: received[..self.k].to_vec(),
                corrected: 0,
            });
        }
        let lambda = self.berlekamp_massey(&syn);
        let n_errors = lambda.len() - 1;
        if n_errors == 0 || n_errors > self.t() {
            return Ok(RsOutcome::Failure);
        }

        // Chien search over the positions of a length-n word.
        let positions: Vec<usize> = (0..self.n)
            .filter(|&i| {
                let power = (self.n - 1 - i) as i64;
                f.eval_low_first(&lambda, f.alpha_pow(-power)) == 0
            })
            .collect();
        if positions.len() != n_errors {
            return Ok(RsOutcome::Failure);
        }

        // Ω(x) = S(x) Λ(x) mod x^(2t)
        let two_t = syn.len();
        let mut omega = vec![0; two_t];
        for (i, &s) in syn.iter().enumerate() {
            for (j, &lc) in lambda.iter().enumerate() {
                if i + j < two_t {
                    omega[i + j] ^= f.mul(s, lc);
                }
            }
        }
        // Formal derivative: odd-degree terms survive in characteristic 2.
        let lambda_prime: Vec<Symbol> = lambda
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
            .collect();

        let mut corrected = received.to_vec();
        for &i in &positions {
            let power = (self.n - 1 - i) as i64;
            let x_inv = f.alpha_pow(-power);
            let denom = f.eval_low_first(&lambda_prime, x_inv);
            if denom == 0 {
                return Ok(RsOutcome::Failure);
            }
            corrected[i] ^= f.div(f.eval_low_first(&omega, x_inv), denom);
        }
        if self.syndromes(&corrected).iter().any(|&s| s != 0) {
            return Ok(RsOutcome::Failure);
        }
        Ok(RsOutcome::Decoded {
            message: corrected[..self.k].to_vec(),
            corrected: n_errors,
        })
    }
}

pub fn rs_encode(message: &[Symbol]) -> Result<Vec<Symbol>> {
    ReedSolomon::rs15_11().encode(message)
}

pub fn rs_decode(received: &[Symbol]) -> Result<RsOutcome> {
    ReedSolomon::rs15_11().decode(received)
}
