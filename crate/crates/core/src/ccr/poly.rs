use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{CcrError, CommutationTable, Generator, GeneratorSet};
use crate::scalar::Coeff;

/// Exponent vector in the context's generator order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketMode {
    /// Noncommutative product, bracket = commutator.
    Quantum,
    /// Commutative product, bracket = Poisson biderivation built from the table.
    Poisson,
}

/// A polynomial in normal order. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalPoly<C> {
    gens: Arc<GeneratorSet>,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> NormalPoly<C> {
    pub fn zero(gens: Arc<GeneratorSet>) -> Self {
        Self {
            gens,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(gens: Arc<GeneratorSet>, c: C) -> Self {
        let n = gens.len();
        let mut p = Self::zero(gens);
        p.add_term(Monomial::one(n), c);
        p
    }

    pub fn generators(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Same as [`is_zero`](Self::is_zero): zero is the polynomial without terms.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// The scalar value if the polynomial has no generator content.
    pub fn scalar_value(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.degree() == 0)
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let sum = old.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn same_context(&self, other: &Self) -> Result<(), CcrError> {
        if Arc::ptr_eq(&self.gens, &other.gens) || *self.gens == *other.gens {
            Ok(())
        } else {
            Err(CcrError::Context)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, CcrError> {
        self.same_context(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CcrError> {
        self.add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.gens.clone());
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Partial derivative with respect to generator `k`, treating the symbols as commuting.
    fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.gens.clone());
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e > 0 {
                let mut d = m.clone();
                d.0[k] -= 1;
                out.add_term(d, c.clone() * C::from_int(e as i64));
            }
        }
        out
    }

    fn render_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (k, &e) in m.0.iter().enumerate() {
            let name = &self.gens.get(k).name;
            match e {
                0 => {}
                1 => parts.push(name.clone()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        parts.join("*")
    }
}

impl<C: Coeff> fmt::Display for NormalPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| b.cmp(a)));
        for (idx, (m, c)) in ordered.into_iter().enumerate() {
            let mono = self.render_monomial(m);
            let term = if mono.is_empty() {
                c.render()
            } else if c.is_one() {
                mono
            } else if (-c.clone()).is_one() {
                format!("-{mono}")
            } else {
                format!("{}*{mono}", c.render())
            };
            match (idx, term.strip_prefix('-')) {
                (0, _) => write!(f, "{term}")?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {term}")?,
            }
        }
        Ok(())
    }
}

/// A generator context together with its bracket table.
#[derive(Debug, Clone)]
pub struct Algebra<C> {
    gens: Arc<GeneratorSet>,
    table: CommutationTable<C>,
    mode: BracketMode,
}

impl<C: Coeff> Algebra<C> {
    pub fn new(gens: Vec<Generator>, mode: BracketMode) -> Result<Self, CcrError> {
        let gens = Arc::new(GeneratorSet::new(gens)?);
        let table = CommutationTable::new(gens.len());
        Ok(Self { gens, table, mode })
    }

    /// Builds a context from a plain-text table (see [`CommutationTable::parse_text`]).
    pub fn from_table_text(
        gens: Vec<Generator>,
        mode: BracketMode,
        text: &str,
    ) -> Result<Self, CcrError> {
        let mut alg = Self::new(gens, mode)?;
        alg.table = CommutationTable::parse_text(text, &alg.gens)?;
        Ok(alg)
    }

    /// Declares `[a, b] = c` (or `{a, b} = c` in Poisson mode).
    pub fn set_bracket(&mut self, a: &str, b: &str, c: C) -> Result<(), CcrError> {
        let i = self.gens.index_of(a)?;
        let j = self.gens.index_of(b)?;
        self.table.set(i, j, c, &self.gens)
    }

    pub fn with_bracket(mut self, a: &str, b: &str, c: C) -> Result<Self, CcrError> {
        self.set_bracket(a, b, c)?;
        Ok(self)
    }

    pub fn mode(&self) -> BracketMode {
        self.mode
    }

    pub fn table(&self) -> &CommutationTable<C> {
        &self.table
    }

    pub fn generators(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn zero(&self) -> NormalPoly<C> {
        NormalPoly::zero(self.gens.clone())
    }

    pub fn constant(&self, c: C) -> NormalPoly<C> {
        NormalPoly::constant(self.gens.clone(), c)
    }

    pub fn gen(&self, name: &str) -> Result<NormalPoly<C>, CcrError> {
        let k = self.gens.index_of(name)?;
        let mut m = Monomial::one(self.gens.len());
        m.0[k] = 1;
        let mut p = self.zero();
        p.add_term(m, C::one());
        Ok(p)
    }

    /// Linear combination `sum c_k g_k`.
    pub fn linear(&self, parts: &[(&str, C)]) -> Result<NormalPoly<C>, CcrError> {
        let mut p = self.zero();
        for (name, c) in parts {
            p = p.add(&self.gen(name)?.scale(c))?;
        }
        Ok(p)
    }

    fn check(&self, p: &NormalPoly<C>) -> Result<(), CcrError> {
        if Arc::ptr_eq(&self.gens, &p.gens) || *self.gens == *p.gens {
            Ok(())
        } else {
            Err(CcrError::Context)
        }
    }

    // terms * g_k, restoring normal order.
    fn times_generator(&self, terms: &BTreeMap<Monomial, C>, k: usize, out: &mut NormalPoly<C>) {
        let n = self.gens.len();
        for (m, c) in terms {
            let mut raised = m.clone();
            raised.0[k] += 1;
            out.add_term(raised, c.clone());
            if self.mode == BracketMode::Poisson {
                continue;
            }
            // g_j^a g_k = g_k g_j^a + a [g_j, g_k] g_j^(a-1) for every g_j ordered after g_k
            for j in (k + 1)..n {
                let a = m.0[j];
                if a == 0 {
                    continue;
                }
                let cjk = self.table.get(j, k);
                if cjk.is_zero() {
                    continue;
                }
                let mut lowered = m.clone();
                lowered.0[j] -= 1;
                out.add_term(lowered, c.clone() * cjk * C::from_int(a as i64));
            }
        }
    }

    /// Normal-ordered product `p q`.
    pub fn mul(&self, p: &NormalPoly<C>, q: &NormalPoly<C>) -> Result<NormalPoly<C>, CcrError> {
        self.check(p)?;
        self.check(q)?;
        let mut result = self.zero();
        for (mq, cq) in &q.terms {
            let mut acc = p.clone();
            for (k, &e) in mq.0.iter().enumerate() {
                for _ in 0..e {
                    let mut next = self.zero();
                    self.times_generator(&acc.terms, k, &mut next);
                    acc = next;
                }
            }
            for (m, c) in acc.terms {
                result.add_term(m, c * cq.clone());
            }
        }
        Ok(result)
    }

    /// `pq - qp` in quantum mode, the Poisson bracket `{p, q}` in Poisson mode.
    pub fn commutator(
        &self,
        p: &NormalPoly<C>,
        q: &NormalPoly<C>,
    ) -> Result<NormalPoly<C>, CcrError> {
        match self.mode {
            BracketMode::Quantum => self.mul(p, q)?.sub(&self.mul(q, p)?),
            BracketMode::Poisson => self.poisson(p, q),
        }
    }

    /// `pq + qp` (equal to `2pq` in Poisson mode).
    pub fn anticommutator(
        &self,
        p: &NormalPoly<C>,
        q: &NormalPoly<C>,
    ) -> Result<NormalPoly<C>, CcrError> {
        self.mul(p, q)?.add(&self.mul(q, p)?)
    }

    fn poisson(&self, p: &NormalPoly<C>, q: &NormalPoly<C>) -> Result<NormalPoly<C>, CcrError> {
        self.check(p)?;
        self.check(q)?;
        let mut out = self.zero();
        for (i, j, c) in self.table.nonzero_pairs() {
            // {p,q} = sum_{i<j} c_ij (d_i p d_j q - d_j p d_i q)
            let a = self.mul(&p.derivative(i), &q.derivative(j))?;
            let b = self.mul(&p.derivative(j), &q.derivative(i))?;
            out = out.add(&a.sub(&b)?.scale(c))?;
        }
        Ok(out)
    }
}

pub fn multiply<C: Coeff>(
    p: &NormalPoly<C>,
    q: &NormalPoly<C>,
    alg: &Algebra<C>,
) -> Result<NormalPoly<C>, CcrError> {
    alg.mul(p, q)
}

pub fn commutator<C: Coeff>(
    p: &NormalPoly<C>,
    q: &NormalPoly<C>,
    alg: &Algebra<C>,
) -> Result<NormalPoly<C>, CcrError> {
    alg.commutator(p, q)
}

pub fn anticommutator<C: Coeff>(
    p: &NormalPoly<C>,
    q: &NormalPoly<C>,
    alg: &Algebra<C>,
) -> Result<NormalPoly<C>, CcrError> {
    alg.anticommutator(p, q)
}
