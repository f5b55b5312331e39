//! Linear changes of variables, including the shift `q_1^1 -> q_1^1 + u`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{Accumulator, Frame, FormalSeries, Monomial, Var, VarId};
use crate::error::{Gw0Error, Result};
use crate::rational::{binomial, Rational};

/// A weight-one image: `dist * q_1^1 + sum c_v * v`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearImage {
    pub dist: Rational,
    pub plain: Vec<(VarId, Rational)>,
}

impl LinearImage {
    pub fn var(v: Var) -> Self {
        match v {
            Var::Dist => LinearImage { dist: Rational::one(), plain: vec![] },
            Var::Plain(id) => LinearImage { dist: Rational::zero(), plain: vec![(id, Rational::one())] },
        }
    }

    pub fn add(&mut self, v: Var, c: &Rational) {
        match v {
            Var::Dist => self.dist += c,
            Var::Plain(id) => match self.plain.iter_mut().find(|p| p.0 == id) {
                Some(p) => p.1 += c,
                None => self.plain.push((id, c.clone())),
            },
        }
        self.plain.retain(|p| !p.1.is_zero());
    }

    fn to_series(&self, frame: &Arc<Frame>, zmax: usize, degcap: usize) -> FormalSeries {
        let mut s = FormalSeries::zero(frame.clone(), zmax, degcap);
        s.push_term(1, Monomial::one(), self.dist.clone());
        if degcap >= 1 {
            for (v, c) in &self.plain {
                s.push_term(0, Monomial::var(*v), c.clone());
            }
        }
        s
    }
}

/// Substitution of linear images for the variables of a series.
///
/// Variables without an explicit image map to themselves, which requires the
/// source and target frames to agree. The distinguished variable must map to
/// `q_1^1 + u` with `u` free of `q_1^1`; negative powers of `q_1^1 + u` are
/// re-expanded by the binomial series up to `degcap`. Because `u` has degree
/// one, output degree `d` only sees input degrees `<= d`, so the shift alone
/// keeps the reliable degree.
///
/// If an ordinary variable maps to something containing `q_1^1`, output degree
/// `d` receives contributions from every input degree `>= d`, including the
/// discarded ones. The reliable degree then survives only if the caller
/// certifies that the input has no terms above its `degcap`; otherwise it drops
/// to the fallback bound (default `-1`, nothing reliable).
#[derive(Clone, Debug)]
pub struct Substitution {
    target: Arc<Frame>,
    target_zmax: usize,
    images: BTreeMap<Var, LinearImage>,
    certified_complete: bool,
    fallback_reliable: i64,
}

impl Substitution {
    pub fn new(target: Arc<Frame>, target_zmax: usize) -> Self {
        Substitution {
            target,
            target_zmax,
            images: BTreeMap::new(),
            certified_complete: false,
            fallback_reliable: -1,
        }
    }

    pub fn target_frame(&self) -> &Arc<Frame> {
        &self.target
    }

    pub fn certify_complete(mut self) -> Self {
        self.certified_complete = true;
        self
    }

    pub fn with_fallback_reliable(mut self, r: i64) -> Self {
        self.fallback_reliable = r;
        self
    }

    fn check_target_var(&self, v: VarId) -> Result<()> {
        if v.is_distinguished() {
            return Err(Gw0Error::InvalidSubstitution("q_1^1 listed as an ordinary variable".into()));
        }
        if v.alpha == 0 || v.alpha as usize > self.target.dim() || v.level as usize > self.target_zmax {
            return Err(Gw0Error::InvalidSubstitution(format!("image uses invalid variable {v:?}")));
        }
        Ok(())
    }

    pub fn set(&mut self, v: Var, image: LinearImage) -> Result<()> {
        for (id, _) in &image.plain {
            self.check_target_var(*id)?;
        }
        if v == Var::Dist && !image.dist.is_one() {
            return Err(Gw0Error::InvalidSubstitution(
                "the image of q_1^1 must be q_1^1 + u with u free of q_1^1".into(),
            ));
        }
        self.images.insert(v, image);
        Ok(())
    }

    /// Builds images from series, which must be homogeneous linear of weight one.
    pub fn from_series(
        target: Arc<Frame>,
        target_zmax: usize,
        images: impl IntoIterator<Item = (Var, FormalSeries)>,
    ) -> Result<Self> {
        let mut sub = Substitution::new(target, target_zmax);
        for (v, s) in images {
            if *s.frame() != *sub.target {
                return Err(Gw0Error::FrameMismatch("substitution image over a different frame".into()));
            }
            let mut img = LinearImage::default();
            for (e, m, c) in s.terms() {
                match (*e, m.degree()) {
                    (1, 0) => img.dist += c,
                    (0, 1) => img.plain.push((m.factors()[0].0, c.clone())),
                    _ => {
                        return Err(Gw0Error::InvalidSubstitution(format!(
                            "image of {v:?} is not linear in the variables"
                        )))
                    }
                }
            }
            sub.set(v, img)?;
        }
        Ok(sub)
    }

    fn image_for(&self, v: Var, source: &FormalSeries) -> Result<LinearImage> {
        if let Some(img) = self.images.get(&v) {
            return Ok(img.clone());
        }
        if *source.frame() != *self.target {
            return Err(Gw0Error::InvalidSubstitution(format!(
                "{v:?} has no image and the frames differ"
            )));
        }
        if v.level() as usize > self.target_zmax {
            return Err(Gw0Error::InvalidSubstitution(format!("{v:?} has no image above target zmax")));
        }
        Ok(LinearImage::var(v))
    }

    pub fn apply(&self, a: &FormalSeries) -> Result<FormalSeries> {
        let degcap = a.degcap();
        let zmax = self.target_zmax;
        let frame = &self.target;

        let dist_image = self.image_for(Var::Dist, a)?;
        let shift = LinearImage { dist: Rational::zero(), plain: dist_image.plain.clone() };
        let shift_series = shift.to_series(frame, zmax, degcap);
        let has_shift = !shift.plain.is_empty();

        let mut plain_images: HashMap<VarId, FormalSeries> = HashMap::new();
        let mut dist_in_images = false;
        for (_, m, _) in a.terms() {
            for (v, _) in m.factors() {
                if !plain_images.contains_key(v) {
                    let img = self.image_for(Var::Plain(*v), a)?;
                    dist_in_images |= !img.dist.is_zero();
                    plain_images.insert(*v, img.to_series(frame, zmax, degcap));
                }
            }
        }
        let mut powers: HashMap<(VarId, u32), FormalSeries> = HashMap::new();
        let mut power = |v: VarId, k: u32| -> FormalSeries {
            if let Some(p) = powers.get(&(v, k)) {
                return p.clone();
            }
            let p = plain_images[&v].pow(k);
            powers.insert((v, k), p.clone());
            p
        };
        let mut shift_powers: Vec<FormalSeries> =
            vec![FormalSeries::constant(frame.clone(), zmax, degcap, Rational::one())];

        let mut total = Accumulator::new();
        let terms: Vec<_> = a.raw_terms().iter().collect();
        let mut start = 0;
        while start < terms.len() {
            let e = terms[start].0 .0;
            let mut end = start;
            while end < terms.len() && terms[end].0 .0 == e {
                end += 1;
            }
            // Compose the polynomial multiplying x^e, sharing monomial prefixes.
            let mut block = Accumulator::new();
            let mut stack: Vec<((VarId, u32), FormalSeries)> = Vec::new();
            for ((_, mono), c) in &terms[start..end] {
                let f = mono.factors();
                let mut common = 0;
                while common < stack.len() && common < f.len() && stack[common].0 == f[common] {
                    common += 1;
                }
                stack.truncate(common);
                for i in common..f.len() {
                    let p = power(f[i].0, f[i].1);
                    let next = if i == 0 { p } else { stack[i - 1].1.mul(&p) };
                    stack.push((f[i], next));
                }
                match stack.last() {
                    Some((_, prod)) if !f.is_empty() => block.add_scaled(prod, c),
                    _ => block.add((0, Monomial::one()), (*c).clone()),
                }
            }
            let q = FormalSeries::from_parts(frame.clone(), zmax, degcap, degcap as i64, block.finish());
            let composed = if has_shift {
                // (x + u)^e = sum_j binom(e, j) x^(e-j) u^j, truncated at degcap
                let jmax = if e >= 0 { (e as usize).min(degcap) } else { degcap };
                while shift_powers.len() <= jmax {
                    let next = shift_powers.last().unwrap().mul(&shift_series);
                    shift_powers.push(next);
                }
                let mut expansion = Accumulator::new();
                for (j, up) in shift_powers.iter().enumerate().take(jmax + 1) {
                    let b = binomial(e, j as u64);
                    if b.is_zero() {
                        continue;
                    }
                    expansion.add_scaled(&up.shift_laurent(e - j as i64), &b);
                }
                let x = FormalSeries::from_parts(frame.clone(), zmax, degcap, degcap as i64, expansion.finish());
                q.mul(&x)
            } else {
                q.shift_laurent(e)
            };
            total.add_scaled(&composed, &Rational::one());
            start = end;
        }

        let reliable = if dist_in_images && !self.certified_complete {
            a.reliable().min(self.fallback_reliable)
        } else {
            a.reliable()
        };
        Ok(FormalSeries::from_parts(frame.clone(), zmax, degcap, reliable, total.finish()))
    }
}
