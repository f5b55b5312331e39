use std::sync::Arc;

use crate::potential::Potential;
use crate::rank1::psi::PsiTable;
use crate::rational::{factorial, Rational};
use crate::series::{FormalSeries, Frame, Monomial, VarId};

/// The point potential in normal form, strata `n <= degcap`, levels `<= zmax`.
///
/// Resumming the dilaton variable gives
/// `c_n = (-1)^n sum_K <tau_K> q_K / |Aut K|` over multisets `K` of `n` levels
/// from `{0, 2, 3, ..., zmax}` with level sum `n - 3`.
pub fn point_potential(degcap: usize, zmax: usize) -> Potential {
    let frame = Arc::new(Frame::rank_one());
    let mut s = FormalSeries::zero(frame, zmax, degcap);
    let mut table = PsiTable::new();
    let levels: Vec<u32> = std::iter::once(0).chain(2..=zmax as u32).collect();
    for n in 3..=degcap {
        let mut cur = Vec::with_capacity(n);
        each_multiset(&levels, 0, n, (n - 3) as u32, &mut cur, &mut |k| {
            let psi = table.get(k).expect("n >= 3");
            let mut mono = Vec::new();
            let mut aut = num_bigint::BigInt::from(1);
            let mut i = 0;
            while i < k.len() {
                let mut j = i;
                while j < k.len() && k[j] == k[i] {
                    j += 1;
                }
                aut *= factorial((j - i) as u64);
                mono.push((VarId::new(1, k[i] as u16), (j - i) as u32));
                i = j;
            }
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let coeff = psi * Rational::new(sign.into(), aut);
            s.add_term(2 - n as i64, Monomial::from_factors(mono), coeff).expect("valid variables");
        });
    }
    Potential::new(s).expect("weight two by construction")
}

/// Nondecreasing sequences of length `len` from `levels[start..]` with the given sum.
fn each_multiset(levels: &[u32], start: usize, len: usize, sum: u32, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if len == 0 {
        if sum == 0 {
            f(cur);
        }
        return;
    }
    for idx in start..levels.len() {
        let l = levels[idx];
        if l * len as u32 > sum {
            break;
        }
        cur.push(l);
        each_multiset(levels, idx, len - 1, sum - l, cur, f);
        cur.pop();
    }
}
