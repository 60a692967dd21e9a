//! Sparse multivariate polynomials over the integers, and Laurent
//! expressions of the form `polynomial / monomial`.
//!
//! Coefficients are arbitrary-precision (`BigInt`): matching counts grow
//! like Fibonacci in the number of snake tiles, so fixed-width integers
//! would overflow long before interesting sizes. Variables are interned
//! small ids; a [`VarPool`] maps ids back to names for printing.
//!
//! The monomial order is graded lexicographic throughout (total degree
//! first, then lex with lower-id variables ranked higher). Exact division
//! peels leading terms under this order.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Interned variable identifier. Ordering follows interning order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

/// Registry mapping variable names ("x1", "z3_4") to ids and back.
#[derive(Clone, Debug, Default)]
pub struct VarPool {
    names: Vec<String>,
    index: BTreeMap<String, VarId>,
}

impl VarPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `name`, interning it on first use.
    pub fn intern(&mut self, name: &str) -> VarId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = VarId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Errors from polynomial arithmetic and parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyError {
    /// No exact quotient exists. In mutation contexts this signals a bug,
    /// since the Laurent phenomenon guarantees divisibility.
    NotDivisible,
    /// Malformed polynomial text.
    Parse(String),
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::NotDivisible => write!(f, "no exact polynomial quotient exists"),
            PolyError::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl core::error::Error for PolyError {}

/// Product of variables with positive exponents, kept in canonical sparse
/// form: no zero exponents are stored.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Monomial {
    exps: BTreeMap<VarId, u32>,
}

impl Monomial {
    /// The empty product.
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: VarId) -> Self {
        let mut exps = BTreeMap::new();
        exps.insert(v, 1);
        Self { exps }
    }

    /// Builds a monomial from (variable, exponent) pairs; zero exponents
    /// are dropped, repeated variables accumulate.
    pub fn from_exps<I: IntoIterator<Item = (VarId, u32)>>(pairs: I) -> Self {
        let mut exps: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *exps.entry(v).or_insert(0) += e;
            }
        }
        Self { exps }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exp(&self, v: VarId) -> u32 {
        self.exps.get(&v).copied().unwrap_or(0)
    }

    pub fn exps(&self) -> impl Iterator<Item = (VarId, u32)> + '_ {
        self.exps.iter().map(|(&v, &e)| (v, e))
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.values().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (&v, &e) in &other.exps {
            *exps.entry(v).or_insert(0) += e;
        }
        Monomial { exps }
    }

    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        let exps = self.exps.iter().map(|(&v, &e)| (v, e * k)).collect();
        Monomial { exps }
    }

    /// Whether `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().all(|(v, &e)| other.exp(*v) >= e)
    }

    /// `self / other`, if the quotient exists.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = self.exps.clone();
        for (&v, &e) in &other.exps {
            let slot = exps.get_mut(&v)?;
            if *slot < e {
                return None;
            }
            *slot -= e;
            if *slot == 0 {
                exps.remove(&v);
            }
        }
        Some(Monomial { exps })
    }

    /// Componentwise minimum: the largest common divisor of two monomials.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let exps = self
            .exps
            .iter()
            .filter_map(|(&v, &e)| {
                let m = e.min(other.exp(v));
                (m > 0).then_some((v, m))
            })
            .collect();
        Monomial { exps }
    }

    /// Componentwise maximum.
    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut exps = other.exps.clone();
        for (&v, &e) in &self.exps {
            let slot = exps.entry(v).or_insert(0);
            *slot = (*slot).max(e);
        }
        Monomial { exps }
    }

    pub fn display<'a>(&'a self, pool: &'a VarPool) -> MonomialDisplay<'a> {
        MonomialDisplay { m: self, pool }
    }

    pub fn to_text(&self, pool: &VarPool) -> String {
        use alloc::string::ToString;
        self.display(pool).to_string()
    }
}

// Graded lexicographic: total degree first, ties broken by the earliest
// variable id with differing exponent (larger exponent ranks higher).
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.exps.iter();
        let mut b = other.exps.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                // Exhausted side has exponent 0 at the other's next var,
                // which ranks it lower at that position.
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((va, ea)), Some((vb, eb))) => {
                    match va.cmp(vb) {
                        // Smaller id present only on one side: that side has
                        // the larger exponent at the first difference.
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => match ea.cmp(eb) {
                            Ordering::Equal => {}
                            ord => return ord,
                        },
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct MonomialDisplay<'a> {
    m: &'a Monomial,
    pool: &'a VarPool,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m.is_one() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.m.exps().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}", self.pool.name(v))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial with integer coefficients: a map from monomial to
/// nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Self { terms }
    }

    pub fn constant_i64(c: i64) -> Self {
        Self::constant(BigInt::from(c))
    }

    pub fn var(v: VarId) -> Self {
        Self::from_monomial(Monomial::var(v), BigInt::one())
    }

    pub fn from_monomial(m: Monomial, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(pairs: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in pairs {
            p.accumulate(m, c);
        }
        p
    }

    fn accumulate(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::one())
                .is_some_and(|c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Leading term under the graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), -c.clone()))
            .collect();
        Polynomial { terms }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.accumulate(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| (t.mul(m), c.clone()))
            .collect();
        Polynomial { terms }
    }

    pub fn mul_scalar(&self, c: &BigInt) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, k)| (m.clone(), k * c))
            .collect();
        Polynomial { terms }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Exact quotient `self / divisor`, by repeated leading-term division
    /// under the graded-lex order. Fails with [`PolyError::NotDivisible`]
    /// when no exact quotient over the integers exists.
    pub fn exact_div(&self, divisor: &Polynomial) -> Result<Polynomial, PolyError> {
        let (lm_b, lc_b) = divisor.leading().ok_or(PolyError::NotDivisible)?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while let Some((lm_r, lc_r)) = rem.leading() {
            let m = lm_r.checked_div(lm_b).ok_or(PolyError::NotDivisible)?;
            let c = lc_r / lc_b;
            if (lc_r - &c * lc_b) != BigInt::zero() {
                return Err(PolyError::NotDivisible);
            }
            let t = Polynomial::from_monomial(m, c);
            rem = rem.sub(&t.mul(divisor));
            quot = quot.add(&t);
        }
        Ok(quot)
    }

    /// Divides every term by `m`; requires `m` to divide each monomial.
    pub fn div_monomial_exact(&self, m: &Monomial) -> Result<Polynomial, PolyError> {
        let mut terms = BTreeMap::new();
        for (t, c) in &self.terms {
            let q = t.checked_div(m).ok_or(PolyError::NotDivisible)?;
            terms.insert(q, c.clone());
        }
        Ok(Polynomial { terms })
    }

    /// Sum of coefficients, i.e. the value at every variable set to 1.
    pub fn eval_ones(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Largest monomial dividing every term (componentwise minimum of the
    /// support); `1` for the zero polynomial.
    pub fn content_monomial(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    /// `Some(+1)` / `Some(-1)` when all coefficients are strictly positive
    /// or strictly negative; `None` for the zero polynomial or mixed signs.
    pub fn uniform_coeff_sign(&self) -> Option<i32> {
        let mut it = self.terms.values();
        let first = it.next()?;
        let sign = if first.is_positive() { 1 } else { -1 };
        for c in it {
            let s = if c.is_positive() { 1 } else { -1 };
            if s != sign {
                return None;
            }
        }
        Some(sign)
    }

    pub fn display<'a>(&'a self, pool: &'a VarPool) -> PolyDisplay<'a> {
        PolyDisplay { p: self, pool }
    }

    pub fn to_text(&self, pool: &VarPool) -> String {
        use alloc::string::ToString;
        self.display(pool).to_string()
    }

    /// Parses the text format produced by [`Polynomial::display`]:
    /// terms joined by ` + ` / ` - `, each a decimal coefficient and/or
    /// `*`-separated variable powers such as `3*x1^2*x6`.
    pub fn parse(input: &str, pool: &mut VarPool) -> Result<Polynomial, PolyError> {
        parse_polynomial(input, pool)
    }
}

pub struct PolyDisplay<'a> {
    p: &'a Polynomial,
    pool: &'a VarPool,
}

// Printing walks terms in descending graded-lex order so output is stable
// and the leading term comes first.
impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.p.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.magnitude();
            if !mag.is_one() || m.is_one() {
                write!(f, "{mag}")?;
                if !m.is_one() {
                    write!(f, "*")?;
                }
            }
            if !m.is_one() {
                write!(f, "{}", m.display(self.pool))?;
            }
        }
        Ok(())
    }
}

fn parse_polynomial(input: &str, pool: &mut VarPool) -> Result<Polynomial, PolyError> {
    let mut parser = Parser {
        rest: input.trim(),
        pool,
    };
    let poly = parser.polynomial()?;
    if !parser.rest.is_empty() {
        return Err(PolyError::Parse(alloc::format!(
            "unexpected trailing input: {:?}",
            parser.rest
        )));
    }
    Ok(poly)
}

struct Parser<'a, 'p> {
    rest: &'a str,
    pool: &'p mut VarPool,
}

impl<'a> Parser<'a, '_> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn eat(&mut self, ch: char) -> bool {
        if let Some(r) = self.rest.strip_prefix(ch) {
            self.rest = r;
            true
        } else {
            false
        }
    }

    fn polynomial(&mut self) -> Result<Polynomial, PolyError> {
        let mut out = Polynomial::zero();
        self.skip_ws();
        let mut negate = false;
        if self.eat('-') {
            negate = true;
        } else {
            let _ = self.eat('+');
        }
        loop {
            self.skip_ws();
            let (m, c) = self.term()?;
            out.accumulate(m, if negate { -c } else { c });
            self.skip_ws();
            if self.eat('+') {
                negate = false;
            } else if self.eat('-') {
                negate = true;
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, BigInt), PolyError> {
        let mut coeff: Option<BigInt> = None;
        let mut mono = Monomial::one();
        let mut first = true;
        loop {
            self.skip_ws();
            if first && self.peek_digit() {
                coeff = Some(self.integer()?);
            } else if self.peek_alpha() {
                let name = self.ident();
                let exp = if self.eat('^') {
                    let e = self.integer()?;
                    u32::try_from(e)
                        .map_err(|_| PolyError::Parse("exponent out of range".into()))?
                } else {
                    1
                };
                let v = self.pool.intern(name);
                mono = mono.mul(&Monomial::var(v).pow(exp));
            } else if first {
                return Err(PolyError::Parse(alloc::format!(
                    "expected term at {:?}",
                    self.rest
                )));
            } else {
                return Err(PolyError::Parse(alloc::format!(
                    "expected factor after '*' at {:?}",
                    self.rest
                )));
            }
            first = false;
            self.skip_ws();
            if !self.eat('*') {
                break;
            }
        }
        Ok((mono, coeff.unwrap_or_else(BigInt::one)))
    }

    fn peek_digit(&self) -> bool {
        self.rest.chars().next().is_some_and(|c| c.is_ascii_digit())
    }

    fn peek_alpha(&self) -> bool {
        self.rest
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        let digits: usize = self
            .rest
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .count();
        if digits == 0 {
            return Err(PolyError::Parse(alloc::format!(
                "expected integer at {:?}",
                self.rest
            )));
        }
        let (num, rest) = self.rest.split_at(digits);
        self.rest = rest;
        num.parse::<BigInt>()
            .map_err(|_| PolyError::Parse("bad integer".into()))
    }

    fn ident(&mut self) -> &'a str {
        let end = self
            .rest
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map(|(i, _)| i)
            .unwrap_or(self.rest.len());
        let (name, rest) = self.rest.split_at(end);
        self.rest = rest;
        name
    }
}

/// A Laurent expression `numerator / denominator` with monomial
/// denominator, kept canonical: no variable divides every numerator term
/// while also appearing in the denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentExpr {
    num: Polynomial,
    den: Monomial,
}

impl LaurentExpr {
    /// Builds and canonicalizes: the largest monomial dividing all
    /// numerator terms is cancelled against the denominator.
    pub fn new(num: Polynomial, den: Monomial) -> Self {
        if num.is_zero() {
            return Self {
                num,
                den: Monomial::one(),
            };
        }
        let common = num.content_monomial().gcd(&den);
        if common.is_one() {
            return Self { num, den };
        }
        let num = num
            .div_monomial_exact(&common)
            .expect("content monomial divides every term");
        let den = den
            .checked_div(&common)
            .expect("gcd divides the denominator");
        Self { num, den }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self {
            num: p,
            den: Monomial::one(),
        }
    }

    pub fn var(v: VarId) -> Self {
        Self::from_poly(Polynomial::var(v))
    }

    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Monomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, other: &LaurentExpr) -> LaurentExpr {
        LaurentExpr::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn add(&self, other: &LaurentExpr) -> LaurentExpr {
        let den = self.den.lcm(&other.den);
        let lift_a = den.checked_div(&self.den).expect("lcm is divisible");
        let lift_b = den.checked_div(&other.den).expect("lcm is divisible");
        let num = self
            .num
            .mul_monomial(&lift_a)
            .add(&other.num.mul_monomial(&lift_b));
        LaurentExpr::new(num, den)
    }

    /// Exact division. The divisor's numerator must divide exactly; a
    /// failure would require a polynomial denominator, which this
    /// representation deliberately rejects.
    pub fn div(&self, other: &LaurentExpr) -> Result<LaurentExpr, PolyError> {
        let num = self.num.mul_monomial(&other.den).exact_div(&other.num)?;
        Ok(LaurentExpr::new(num, self.den.clone()))
    }

    pub fn pow(&self, k: u32) -> LaurentExpr {
        LaurentExpr::new(self.num.pow(k), self.den.pow(k))
    }

    /// Cross-multiplied equality: `a/b == c/d` iff `a*d == c*b`. Agrees
    /// with structural equality on canonical values; kept as the
    /// definitional check.
    pub fn cross_eq(&self, other: &LaurentExpr) -> bool {
        self.num.mul_monomial(&other.den) == other.num.mul_monomial(&self.den)
    }

    pub fn display<'a>(&'a self, pool: &'a VarPool) -> LaurentDisplay<'a> {
        LaurentDisplay { l: self, pool }
    }

    pub fn to_text(&self, pool: &VarPool) -> String {
        use alloc::string::ToString;
        self.display(pool).to_string()
    }
}

pub struct LaurentDisplay<'a> {
    l: &'a LaurentExpr,
    pool: &'a VarPool,
}

impl fmt::Display for LaurentDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.l.den.is_one() {
            return write!(f, "{}", self.l.num.display(self.pool));
        }
        if self.l.num.num_terms() > 1 {
            write!(f, "({})", self.l.num.display(self.pool))?;
        } else {
            write!(f, "{}", self.l.num.display(self.pool))?;
        }
        write!(f, "/{}", self.l.den.display(self.pool))
    }
}
