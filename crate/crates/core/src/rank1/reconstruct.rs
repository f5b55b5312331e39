use num_traits::Zero;

use crate::error::{Gw0Error, Result};
use crate::potential::Potential;
use crate::rank1::cube::{antidiagonal, even_from_odd, LinearForm};
use crate::rank1::relations::{BetaTable, Strata};
use crate::rational::{int, rat, Rational};
use crate::series::{FormalSeries, Frame};

/// Fills in `alpha_i` for `i <= 2 zmax + 1`: the given ones up to the support
/// (at least `zmax`), odd ones beyond it as zero, even ones from the odd ones.
fn complete_alphas(l: &LinearForm, zmax: usize) -> Result<Vec<Rational>> {
    let top = 2 * zmax + 1;
    let known = l.support().max(zmax);
    let mut alpha = vec![Rational::zero(); top.max(known) + 1];
    for (&i, a) in l.alphas() {
        alpha[i] = a.clone();
    }
    if !alpha[2].is_zero() {
        return Err(Gw0Error::ConstraintViolation("alpha_2 must vanish".into()));
    }
    for i in (4..alpha.len()).step_by(2) {
        let want = even_from_odd(&|j: usize| alpha[j].clone(), i / 2);
        if i <= known {
            if alpha[i] != want {
                return Err(Gw0Error::ConstraintViolation(format!("alpha_{i} is not determined by the odd coefficients")));
            }
        } else {
            alpha[i] = want;
        }
    }
    Ok(alpha)
}

/// The unique potential with `c_3 = -L^3/6`, built from DE, SE and `TRR_{0,1,1}` only.
///
/// Coefficients `alpha_i` with `zmax < i <= 2 zmax + 1` influence `c_2`; pass a
/// form that contains them (see `extract_extended`) to reproduce a given orbit
/// element exactly. Missing odd ones are taken to be zero.
pub fn reconstruct_from_c3(l: &LinearForm, degcap: usize, zmax: usize) -> Result<Potential> {
    let alpha = complete_alphas(l, zmax)?;
    let a = |i: usize| alpha.get(i).cloned().unwrap_or_else(Rational::zero);
    let frame = std::sync::Arc::new(Frame::rank_one());
    let pot = Potential::zero(frame.clone(), zmax, degcap);
    let mut st = Strata::of(&pot);

    // beta_{i,j}, levels in {0, 2..zmax}
    let mut beta = BetaTable::from_potential(&pot)?;
    for s in 2..=zmax {
        beta.set(s, 0, a(s + 1));
    }
    for i in 2..=zmax {
        for j in i..=zmax {
            let s = i + j;
            let (sign, rest) = antidiagonal(&a, s, j);
            let v = a(s + 1) * int(sign) + rest;
            if j != i {
                let (sign2, rest2) = antidiagonal(&a, s, i);
                if a(s + 1) * int(sign2) + rest2 != v {
                    return Err(Gw0Error::Inconsistent(format!("beta_({i},{j}) is not symmetric")));
                }
            }
            beta.set(i, j, v);
        }
    }

    let mut c = vec![st.zero(); degcap + 1];
    if degcap >= 3 {
        let lin = l.to_series(zmax, degcap);
        c[3] = lin.pow(3).scale(&rat(-1, 6));
    }
    if degcap >= 2 {
        c[2] = beta.to_series(&frame, degcap);
    }
    if degcap >= 1 {
        let mut c1 = st.zero();
        for i in 2..=zmax {
            c1 = &c1 - &st.q(i).scale(&a(i + 2));
        }
        c[1] = c1;
    }
    c[0] = FormalSeries::constant(frame.clone(), zmax, degcap, -a(3) * rat(1, 2));
    st.c = c;

    for n in 4..=degcap as i64 {
        // SE at stratum 3 - n gives d_0 c_n
        let d0 = -&(&st.q(2).mul(&st.get(n - 2)).scale(&int(4 - n)) + &st.shift_operator(&st.get(n - 1)));
        // TRR_{0,1,1}: (2-n)(1-n)(-n) c_n = sum (2-n2)(1-n2) d_0^2 c_{n1} d_0 c_{n2}
        let mut rhs = st.zero();
        for n2 in 3..=n {
            let n1 = n + 3 - n2;
            let dd = if n1 == n { st.d(&d0, 0) } else { st.d(&st.d(&st.get(n1), 0), 0) };
            let d = if n2 == n { d0.clone() } else { st.d(&st.get(n2), 0) };
            rhs = &rhs + &dd.mul(&d).scale(&int((2 - n2) * (1 - n2)));
        }
        let cn = rhs.scale(&rat(1, (2 - n) * (1 - n) * (-n)));
        if st.d(&cn, 0).raw_terms() != d0.raw_terms() {
            return Err(Gw0Error::Inconsistent(format!("d_0 c_{n} from the string equation disagrees with c_{n}")));
        }
        st.c[n as usize] = cn;
    }
    Potential::from_strata(frame, zmax, degcap, degcap as i64, &st.c)
}
