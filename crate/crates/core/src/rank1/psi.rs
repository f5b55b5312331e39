//! Genus-zero descendant integrals `<tau_{i_1} ... tau_{i_n}>`.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Gw0Error, Result};
use crate::rational::Rational;

/// Memo table for the string-equation recursion, keyed by sorted exponents.
#[derive(Default, Debug)]
pub struct PsiTable {
    memo: HashMap<Vec<u32>, Rational>,
}

impl PsiTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `int_{M_{0,n}} psi_1^{i_1} ... psi_n^{i_n}` for `n >= 3`.
    pub fn get(&mut self, exponents: &[u32]) -> Result<Rational> {
        if exponents.len() < 3 {
            return Err(Gw0Error::InvalidArgument(format!(
                "need at least three marked points, got {}",
                exponents.len()
            )));
        }
        let mut key = exponents.to_vec();
        key.sort_unstable();
        Ok(self.eval(key))
    }

    fn eval(&mut self, key: Vec<u32>) -> Rational {
        let n = key.len();
        let total: u64 = key.iter().map(|&i| i as u64).sum();
        if total != n as u64 - 3 {
            return Rational::zero();
        }
        if n == 3 {
            return Rational::one();
        }
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        // Every nonzero integral has a tau_0 (otherwise sum i_j >= n > n - 3).
        // String equation: <tau_0 prod tau_{k_j}> = sum_j <... tau_{k_j - 1} ...>.
        let rest = &key[1..];
        let mut acc = Rational::zero();
        for j in 0..rest.len() {
            if rest[j] == 0 || (j + 1 < rest.len() && rest[j] == rest[j + 1]) {
                // equal exponents give equal terms; count them once below
                continue;
            }
            let mult = rest.iter().filter(|&&x| x == rest[j]).count();
            let mut next = rest.to_vec();
            next[j] -= 1;
            next.sort_unstable();
            acc += self.eval(next) * Rational::from_integer(mult.into());
        }
        self.memo.insert(key, acc.clone());
        acc
    }
}

pub fn psi_intersection(exponents: &[u32]) -> Result<Rational> {
    PsiTable::new().get(exponents)
}
