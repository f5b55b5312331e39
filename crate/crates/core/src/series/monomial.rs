use std::fmt;

/// Coordinate `q_level^alpha` on the big phase space (alpha is 1-based).
///
/// `(1, 1)` is the distinguished Laurent variable and never appears in a monomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub alpha: u16,
    pub level: u16,
}

impl VarId {
    pub const fn new(alpha: u16, level: u16) -> Self {
        VarId { alpha, level }
    }

    pub fn is_distinguished(&self) -> bool {
        self.alpha == 1 && self.level == 1
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}^{}", self.level, self.alpha)
    }
}

/// Either the distinguished variable `q_1^1` or an ordinary coordinate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Var {
    Dist,
    Plain(VarId),
}

impl Var {
    pub fn q(alpha: u16, level: u16) -> Self {
        if alpha == 1 && level == 1 {
            Var::Dist
        } else {
            Var::Plain(VarId::new(alpha, level))
        }
    }

    pub fn alpha(&self) -> u16 {
        match self {
            Var::Dist => 1,
            Var::Plain(v) => v.alpha,
        }
    }

    pub fn level(&self) -> u16 {
        match self {
            Var::Dist => 1,
            Var::Plain(v) => v.level,
        }
    }
}

/// Sparse monomial: sorted `(variable, exponent)` pairs, exponents positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Builds from arbitrary factors, merging repeats and dropping zero exponents.
    pub fn from_factors(factors: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut fs: Vec<(VarId, u32)> = factors.into_iter().filter(|f| f.1 > 0).collect();
        fs.sort_by_key(|f| f.0);
        let mut out: Vec<(VarId, u32)> = Vec::with_capacity(fs.len());
        for (v, e) in fs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|f| f.1).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0.binary_search_by_key(&v, |f| f.0).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn max_level(&self) -> u16 {
        self.0.iter().map(|f| f.0.level).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Lowers the exponent of `v` by one; returns the old exponent (0 when absent).
    pub fn differentiate(&self, v: VarId) -> Option<(u32, Monomial)> {
        let idx = self.0.binary_search_by_key(&v, |f| f.0).ok()?;
        let mut out = self.0.clone();
        let e = out[idx].1;
        if e == 1 {
            out.remove(idx);
        } else {
            out[idx].1 -= 1;
        }
        Some((e, Monomial(out)))
    }

    pub fn all_vars(&self, keep: impl Fn(VarId) -> bool) -> bool {
        self.0.iter().all(|f| keep(f.0))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { format!("{v:?}") } else { format!("{v:?}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}
