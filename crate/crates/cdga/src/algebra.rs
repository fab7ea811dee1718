//! Free graded-commutative algebras over $\mathbb{Q}$.
//!
//! A [`DGAlgebra`] is free on named generators of positive degree, with a
//! degree-+1 differential given on generators and extended by the graded
//! Leibniz rule. Generators commute up to the Koszul sign
//! $xy = (-1)^{|x||y|} yx$, so odd generators square to zero and every
//! product has a canonical normal form: factors sorted by generator
//! creation order. Creation order (not degree order) keeps monomials
//! stable when the fibration machinery extends an algebra with new
//! generators.
//!
//! All values here are immutable; operations return fresh values.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Identifies a generator inside one algebra: its creation-order index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub usize);

impl GenId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A named generator of positive degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: GenId,
    pub name: String,
    pub degree: usize,
}

/// A canonical monomial: factors sorted by generator id, exponents >= 1,
/// odd-degree generators with exponent exactly 1. The empty factor list is
/// the unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    factors: Vec<(GenId, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn generator(id: GenId) -> Self {
        Monomial {
            factors: vec![(id, 1)],
        }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(GenId, u32)] {
        &self.factors
    }

    /// Number of generator factors counted with multiplicity.
    pub fn length(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent_of(&self, id: GenId) -> u32 {
        self.factors
            .iter()
            .find(|&&(g, _)| g == id)
            .map_or(0, |&(_, e)| e)
    }

    /// Construct directly from a canonical factor list. Callers must ensure
    /// ids are strictly increasing; used by enumeration code.
    pub(crate) fn from_sorted(factors: Vec<(GenId, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|&(_, e)| e >= 1));
        Monomial { factors }
    }
}

/// A finite Q-linear combination of canonical monomials. Zero coefficients
/// are never stored; the empty map is zero.
///
/// Elements carry no back-reference to their algebra. An element of a base
/// algebra is literally an element of any extension, which is what the
/// tower construction relies on; membership is checked by the operations
/// that need generator data.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    terms: BTreeMap<Monomial, BigRational>,
}

/// Homogeneity of an element with respect to a fixed algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementDegree {
    Zero,
    Homogeneous(usize),
    Mixed,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn one() -> Self {
        Element::from_term(Monomial::one(), BigRational::one())
    }

    pub fn scalar(c: BigRational) -> Self {
        Element::from_term(Monomial::one(), c)
    }

    pub fn from_term(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Element { terms }
    }

    pub fn generator(id: GenId) -> Self {
        Element::from_term(Monomial::generator(id), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Element {
        Element {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }
}

fn rational_from_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl From<i64> for Element {
    fn from(n: i64) -> Self {
        Element::scalar(rational_from_i64(n))
    }
}

/// A free graded-commutative algebra over Q with a differential defined on
/// generators. `differential[i]` is d of generator `i`; the zero element is
/// the default for generators without an explicit assignment.
///
/// Degree-0 generators are rejected at construction: the algebras here are
/// connected, with the unit in degree 0 implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DGAlgebra {
    generators: Vec<Generator>,
    differential: Vec<Element>,
}

impl DGAlgebra {
    /// The trivial algebra Q: no generators.
    pub fn trivial() -> Self {
        DGAlgebra {
            generators: Vec::new(),
            differential: Vec::new(),
        }
    }

    /// Free algebra on the given (name, degree) list, zero differential.
    pub fn free<S: Into<String>>(gens: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut alg = DGAlgebra::trivial();
        for (name, degree) in gens {
            alg.push_generator(name.into(), degree)?;
        }
        Ok(alg)
    }

    fn push_generator(&mut self, name: String, degree: usize) -> Result<GenId> {
        if degree == 0 {
            return Err(Error::ZeroDegreeGenerator { name, degree });
        }
        if self.generators.iter().any(|g| g.name == name) {
            return Err(Error::DuplicateName(name));
        }
        let id = GenId(self.generators.len());
        self.generators.push(Generator { id, name, degree });
        self.differential.push(Element::zero());
        Ok(id)
    }

    /// A copy of this algebra with one more generator (zero differential).
    pub fn with_generator(&self, name: impl Into<String>, degree: usize) -> Result<(Self, GenId)> {
        let mut alg = self.clone();
        let id = alg.push_generator(name.into(), degree)?;
        Ok((alg, id))
    }

    /// A copy with d(generator) replaced. The image must be homogeneous of
    /// degree `deg(g) + 1` (or zero); d^2 = 0 is *not* checked here — that
    /// is `validate`'s job, so invalid differentials can be constructed and
    /// then reported on.
    pub fn with_differential(&self, id: GenId, image: Element) -> Result<Self> {
        let gen = self.generator(id)?;
        match self.degree_of(&image)? {
            ElementDegree::Zero => {}
            ElementDegree::Homogeneous(n) if n == gen.degree + 1 => {}
            other => {
                return Err(Error::DifferentialDegree {
                    name: gen.name.clone(),
                    degree: gen.degree,
                    expected: gen.degree + 1,
                    found: match other {
                        ElementDegree::Homogeneous(n) => format!("degree {n}"),
                        _ => "a mixed-degree element".to_string(),
                    },
                });
            }
        }
        let mut alg = self.clone();
        alg.differential[id.index()] = image;
        Ok(alg)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, id: GenId) -> Result<&Generator> {
        self.generators
            .get(id.index())
            .ok_or(Error::UnknownGenerator(id.index()))
    }

    pub fn by_name(&self, name: &str) -> Result<GenId> {
        self.generators
            .iter()
            .find(|g| g.name == name)
            .map(|g| g.id)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn differential_of(&self, id: GenId) -> Result<&Element> {
        self.generator(id)?;
        Ok(&self.differential[id.index()])
    }

    /// Degree of a canonical monomial.
    pub fn monomial_degree(&self, m: &Monomial) -> Result<usize> {
        let mut deg = 0;
        for &(id, e) in m.factors() {
            deg += self.generator(id)?.degree * e as usize;
        }
        Ok(deg)
    }

    /// Homogeneity classification of an element.
    pub fn degree_of(&self, e: &Element) -> Result<ElementDegree> {
        let mut found: Option<usize> = None;
        for (m, _) in e.terms() {
            let d = self.monomial_degree(m)?;
            match found {
                None => found = Some(d),
                Some(prev) if prev == d => {}
                Some(_) => return Ok(ElementDegree::Mixed),
            }
        }
        Ok(match found {
            None => ElementDegree::Zero,
            Some(d) => ElementDegree::Homogeneous(d),
        })
    }

    /// Homogeneous degree or an error (zero passes for any expectation).
    pub fn expect_homogeneous(&self, e: &Element) -> Result<Option<usize>> {
        match self.degree_of(e)? {
            ElementDegree::Zero => Ok(None),
            ElementDegree::Homogeneous(n) => Ok(Some(n)),
            ElementDegree::Mixed => Err(Error::NotHomogeneous),
        }
    }

    /// Canonical form of an unordered factor sequence.
    ///
    /// Sorts by generator id, accumulating a (-1) for every transposition of
    /// two odd-degree factors; returns sign 0 (encoded as `None`) when an
    /// odd generator would acquire exponent >= 2.
    pub fn normalize(&self, factors: &[(GenId, u32)]) -> Result<Option<(i8, Monomial)>> {
        let mut entries: Vec<(usize, u32, usize)> = Vec::with_capacity(factors.len());
        for &(id, e) in factors {
            let gen = self.generator(id)?;
            if e == 0 {
                continue;
            }
            if gen.degree % 2 == 1 && e >= 2 {
                return Ok(None);
            }
            entries.push((id.index(), e, gen.degree));
        }

        // Sign: one transposition per out-of-order pair of odd factors.
        // Odd entries all have exponent 1 at this point.
        let odd_ids: Vec<usize> = entries
            .iter()
            .filter(|&&(_, _, d)| d % 2 == 1)
            .map(|&(id, _, _)| id)
            .collect();
        let mut negative = false;
        for i in 0..odd_ids.len() {
            for j in (i + 1)..odd_ids.len() {
                if odd_ids[i] == odd_ids[j] {
                    return Ok(None);
                }
                if odd_ids[i] > odd_ids[j] {
                    negative = !negative;
                }
            }
        }

        entries.sort_by_key(|&(id, _, _)| id);
        let mut merged: Vec<(GenId, u32)> = Vec::with_capacity(entries.len());
        for (id, e, degree) in entries {
            match merged.last_mut() {
                Some((last, exp)) if last.index() == id => {
                    *exp += e;
                    if degree % 2 == 1 {
                        return Ok(None);
                    }
                }
                _ => merged.push((GenId(id), e)),
            }
        }
        let sign = if negative { -1 } else { 1 };
        Ok(Some((sign, Monomial::from_sorted(merged))))
    }

    /// Product of two canonical monomials, with Koszul sign.
    pub fn monomial_product(&self, a: &Monomial, b: &Monomial) -> Result<Option<(i8, Monomial)>> {
        let mut factors = Vec::with_capacity(a.factors().len() + b.factors().len());
        factors.extend_from_slice(a.factors());
        factors.extend_from_slice(b.factors());
        self.normalize(&factors)
    }

    /// Bilinear extension of the monomial product.
    pub fn multiply(&self, e1: &Element, e2: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (m1, c1) in e1.terms() {
            for (m2, c2) in e2.terms() {
                if let Some((sign, m)) = self.monomial_product(m1, m2)? {
                    let mut c = c1 * c2;
                    if sign < 0 {
                        c = -c;
                    }
                    out.add_term(m, c);
                }
            }
        }
        Ok(out)
    }

    pub fn power(&self, e: &Element, n: u32) -> Result<Element> {
        let mut out = Element::one();
        for _ in 0..n {
            out = self.multiply(&out, e)?;
        }
        Ok(out)
    }

    /// d extended to arbitrary elements by the graded Leibniz rule
    /// d(xy) = (dx)y + (-1)^{|x|} x (dy).
    pub fn apply_d(&self, e: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            out = out.add(&self.monomial_d(m)?.scale(c));
        }
        Ok(out)
    }

    fn monomial_d(&self, m: &Monomial) -> Result<Element> {
        let mut out = Element::zero();
        let factors = m.factors();
        let mut prefix_degree = 0usize;
        for (i, &(id, exp)) in factors.iter().enumerate() {
            let gen = self.generator(id)?;
            let dg = &self.differential[id.index()];
            if !dg.is_zero() {
                // prefix * d(g) * (g^{e-1} * suffix), with the Leibniz sign
                // from moving d past the prefix and a factor e for the even
                // exponent rule d(g^e) = e g^{e-1} dg.
                let prefix = Monomial::from_sorted(factors[..i].to_vec());
                let mut rest: Vec<(GenId, u32)> = Vec::new();
                if exp > 1 {
                    rest.push((id, exp - 1));
                }
                rest.extend_from_slice(&factors[i + 1..]);
                let rest = Monomial::from_sorted(rest);

                let term = self.multiply(
                    &self.multiply(&Element::from_term(prefix, BigRational::one()), dg)?,
                    &Element::from_term(rest, BigRational::one()),
                )?;
                let mut coeff = BigRational::from_integer(BigInt::from(exp));
                if prefix_degree % 2 == 1 {
                    coeff = -coeff;
                }
                out = out.add(&term.scale(&coeff));
            }
            prefix_degree += gen.degree * exp as usize;
        }
        Ok(out)
    }

    /// d^2 = 0 and degree-homogeneity of each generator differential,
    /// checked for all generators of degree <= cutoff. Violations are
    /// reported, never raised.
    pub fn validate(&self, cutoff: usize) -> ValidationReport {
        let mut violations = Vec::new();
        for gen in &self.generators {
            if gen.degree > cutoff {
                continue;
            }
            let dg = &self.differential[gen.id.index()];
            match self.degree_of(dg) {
                Ok(ElementDegree::Zero) => {}
                Ok(ElementDegree::Homogeneous(n)) if n == gen.degree + 1 => {}
                Ok(other) => {
                    violations.push(ValidationViolation::WrongDegree {
                        generator: gen.name.clone(),
                        expected: gen.degree + 1,
                        found: match other {
                            ElementDegree::Homogeneous(n) => Some(n),
                            _ => None,
                        },
                    });
                    continue;
                }
                Err(_) => {
                    violations.push(ValidationViolation::ForeignSupport {
                        generator: gen.name.clone(),
                    });
                    continue;
                }
            }
            match self.apply_d(dg) {
                Ok(dd) if dd.is_zero() => {}
                Ok(dd) => violations.push(ValidationViolation::DSquareNonzero {
                    generator: gen.name.clone(),
                    image: self.render(&dd),
                }),
                Err(_) => violations.push(ValidationViolation::ForeignSupport {
                    generator: gen.name.clone(),
                }),
            }
        }
        ValidationReport { cutoff, violations }
    }

    /// The canonical augmentation: the morphism to Q sending every
    /// generator to 0.
    pub fn augmentation(&self) -> Morphism {
        Morphism {
            source: self.clone(),
            target: DGAlgebra::trivial(),
            images: vec![Element::zero(); self.generators.len()],
        }
    }

    /// Identity morphism.
    pub fn identity(&self) -> Morphism {
        Morphism {
            source: self.clone(),
            target: self.clone(),
            images: self
                .generators
                .iter()
                .map(|g| Element::generator(g.id))
                .collect(),
        }
    }

    /// The subalgebra on a selection of generators, which must be closed
    /// under d. Returns the new algebra and the map new id -> old id.
    /// Selection order is ignored; creation order is preserved.
    pub fn subalgebra_on(&self, keep: &[GenId]) -> Result<(DGAlgebra, Vec<GenId>)> {
        let mut ids: Vec<GenId> = keep.to_vec();
        ids.sort();
        ids.dedup();
        for &id in &ids {
            self.generator(id)?;
        }
        let mut old_to_new: Vec<Option<GenId>> = vec![None; self.generators.len()];
        for (new, &old) in ids.iter().enumerate() {
            old_to_new[old.index()] = Some(GenId(new));
        }
        let mut alg = DGAlgebra::trivial();
        for &old in &ids {
            let g = &self.generators[old.index()];
            alg.push_generator(g.name.clone(), g.degree)?;
        }
        for (new, &old) in ids.iter().enumerate() {
            let image = self.differential[old.index()].clone();
            let remapped = remap_element(&image, &old_to_new).map_err(|_| {
                Error::NotClosedUnderDifferential {
                    gen: self.generators[old.index()].name.clone(),
                }
            })?;
            alg.differential[new] = remapped;
        }
        Ok((alg, ids))
    }

    /// Render an element with this algebra's generator names, in canonical
    /// monomial order. The output parses back under the `.dga` expression
    /// grammar (except for the bare constants `0`/rationals, which only
    /// occur in displayed values, never in differentials).
    pub fn render(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in e.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let coeff_is_one = abs.is_one();
            let mono = self.render_monomial(m);
            if m.is_one() {
                out.push_str(&format_rational(&abs));
            } else if coeff_is_one {
                out.push_str(&mono);
            } else {
                out.push_str(&format_rational(&abs));
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }

    fn render_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".to_string();
        }
        m.factors()
            .iter()
            .map(|&(id, e)| {
                let name = &self.generators[id.index()].name;
                if e == 1 {
                    name.clone()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

pub(crate) fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Rewrite an element through a generator relabeling. Fails when a monomial
/// uses a generator the map does not cover.
pub(crate) fn remap_element(e: &Element, old_to_new: &[Option<GenId>]) -> Result<Element> {
    let mut out = Element::zero();
    for (m, c) in e.terms() {
        let mut factors = Vec::with_capacity(m.factors().len());
        for &(id, exp) in m.factors() {
            let new = old_to_new
                .get(id.index())
                .copied()
                .flatten()
                .ok_or(Error::UnknownGenerator(id.index()))?;
            factors.push((new, exp));
        }
        // A monotone relabeling preserves factor order, so no signs move.
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        out.add_term(Monomial::from_sorted(factors), c.clone());
    }
    Ok(out)
}

/// Outcome of `DGAlgebra::validate`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub cutoff: usize,
    pub violations: Vec<ValidationViolation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationViolation {
    WrongDegree {
        generator: String,
        expected: usize,
        found: Option<usize>,
    },
    DSquareNonzero {
        generator: String,
        image: String,
    },
    ForeignSupport {
        generator: String,
    },
}

impl fmt::Display for ValidationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationViolation::WrongDegree {
                generator,
                expected,
                found,
            } => match found {
                Some(n) => write!(f, "d({generator}) must be degree {expected}, got {n}"),
                None => write!(f, "d({generator}) must be homogeneous of degree {expected}"),
            },
            ValidationViolation::DSquareNonzero { generator, image } => {
                write!(f, "d(d({generator})) = {image} != 0")
            }
            ValidationViolation::ForeignSupport { generator } => {
                write!(f, "d({generator}) uses generators outside this algebra")
            }
        }
    }
}

/// A degree-preserving algebra map determined by generator images.
/// The chain-map condition is checked by [`Morphism::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    source: DGAlgebra,
    target: DGAlgebra,
    images: Vec<Element>,
}

impl Morphism {
    /// Build a morphism, checking arity and degree preservation.
    pub fn new(source: DGAlgebra, target: DGAlgebra, images: Vec<Element>) -> Result<Self> {
        if images.len() != source.num_generators() {
            return Err(Error::MorphismArity {
                expected: source.num_generators(),
                found: images.len(),
            });
        }
        for (gen, image) in source.generators().iter().zip(&images) {
            match target.degree_of(image)? {
                ElementDegree::Zero => {}
                ElementDegree::Homogeneous(n) if n == gen.degree => {}
                other => {
                    return Err(Error::MorphismDegree {
                        name: gen.name.clone(),
                        degree: gen.degree,
                        found: match other {
                            ElementDegree::Homogeneous(n) => format!("degree {n}"),
                            _ => "a mixed-degree element".to_string(),
                        },
                    });
                }
            }
        }
        Ok(Morphism {
            source,
            target,
            images,
        })
    }

    pub fn source(&self) -> &DGAlgebra {
        &self.source
    }

    pub fn target(&self) -> &DGAlgebra {
        &self.target
    }

    pub fn image_of(&self, id: GenId) -> Result<&Element> {
        self.images
            .get(id.index())
            .ok_or(Error::UnknownGenerator(id.index()))
    }

    /// Multiplicative, linear extension of the generator images.
    pub fn apply(&self, e: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            let mut value = Element::one();
            for &(id, exp) in m.factors() {
                let image = self.image_of(id)?;
                for _ in 0..exp {
                    value = self.target.multiply(&value, image)?;
                    if value.is_zero() {
                        break;
                    }
                }
                if value.is_zero() {
                    break;
                }
            }
            out = out.add(&value.scale(c));
        }
        Ok(out)
    }

    /// Chain-map check f(dg) = d(f(g)) on every source generator of degree
    /// <= cutoff.
    pub fn validate(&self, cutoff: usize) -> MorphismReport {
        let mut violations = Vec::new();
        for gen in self.source.generators() {
            if gen.degree > cutoff {
                continue;
            }
            let lhs = self
                .source
                .differential_of(gen.id)
                .and_then(|dg| self.apply(dg));
            let rhs = self
                .image_of(gen.id)
                .and_then(|img| self.target.apply_d(img));
            match (lhs, rhs) {
                (Ok(l), Ok(r)) if l == r => {}
                (Ok(l), Ok(r)) => violations.push(MorphismViolation {
                    generator: gen.name.clone(),
                    f_dg: self.target.render(&l),
                    d_fg: self.target.render(&r),
                }),
                _ => violations.push(MorphismViolation {
                    generator: gen.name.clone(),
                    f_dg: "<error>".to_string(),
                    d_fg: "<error>".to_string(),
                }),
            }
        }
        MorphismReport { cutoff, violations }
    }

    /// Composition `other . self` when the algebras line up.
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        let images = self
            .images
            .iter()
            .map(|img| other.apply(img))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(self.source.clone(), other.target.clone(), images)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismReport {
    pub cutoff: usize,
    pub violations: Vec<MorphismViolation>,
}

impl MorphismReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismViolation {
    pub generator: String,
    pub f_dg: String,
    pub d_fg: String,
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f(d {g}) = {l} but d f({g}) = {r}",
            g = self.generator,
            l = self.f_dg,
            r = self.d_fg
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    /// Lambda(a_2, b_3; db = a^2): the S^2 model.
    fn s2_model() -> DGAlgebra {
        let alg = DGAlgebra::free([("a", 2), ("b", 3)]).unwrap();
        let a = alg.by_name("a").unwrap();
        let b = alg.by_name("b").unwrap();
        let a2 = alg.power(&Element::generator(a), 2).unwrap();
        alg.with_differential(b, a2).unwrap()
    }

    /// Lambda(a_2, b_3, x_1; db = a^2, dx = a): the rational Hopf total space.
    fn hopf_total() -> DGAlgebra {
        let alg = s2_model();
        let (alg, x) = alg.with_generator("x", 1).unwrap();
        let a = alg.by_name("a").unwrap();
        alg.with_differential(x, Element::generator(a)).unwrap()
    }

    #[test]
    fn rejects_degree_zero_and_duplicates() {
        assert!(DGAlgebra::free([("a", 0)]).is_err());
        assert!(DGAlgebra::free([("a", 2), ("a", 3)]).is_err());
    }

    #[test]
    fn normalize_odd_square_is_zero() {
        let alg = DGAlgebra::free([("x", 3)]).unwrap();
        let x = alg.by_name("x").unwrap();
        assert_eq!(alg.normalize(&[(x, 1), (x, 1)]).unwrap(), None);
        assert_eq!(alg.normalize(&[(x, 2)]).unwrap(), None);
    }

    #[test]
    fn normalize_odd_even_swap_is_plus() {
        let alg = DGAlgebra::free([("a", 2), ("b", 3)]).unwrap();
        let a = alg.by_name("a").unwrap();
        let b = alg.by_name("b").unwrap();
        let (sign, m) = alg.normalize(&[(b, 1), (a, 1)]).unwrap().unwrap();
        assert_eq!(sign, 1);
        assert_eq!(m, Monomial::from_sorted(vec![(a, 1), (b, 1)]));
    }

    #[test]
    fn normalize_odd_odd_swap_is_minus() {
        let alg = DGAlgebra::free([("x", 3), ("y", 3)]).unwrap();
        let x = alg.by_name("x").unwrap();
        let y = alg.by_name("y").unwrap();
        let (sign, m) = alg.normalize(&[(y, 1), (x, 1)]).unwrap().unwrap();
        assert_eq!(sign, -1);
        assert_eq!(m, Monomial::from_sorted(vec![(x, 1), (y, 1)]));
    }

    #[test]
    fn normalize_rejects_unknown_ids() {
        let alg = DGAlgebra::free([("x", 3)]).unwrap();
        assert!(alg.normalize(&[(GenId(7), 1)]).is_err());
    }

    #[test]
    fn normalize_is_idempotent_on_canonical_input() {
        let alg = DGAlgebra::free([("a", 2), ("x", 1), ("y", 3)]).unwrap();
        let a = alg.by_name("a").unwrap();
        let x = alg.by_name("x").unwrap();
        let y = alg.by_name("y").unwrap();
        let (s1, m) = alg.normalize(&[(y, 1), (a, 2), (x, 1)]).unwrap().unwrap();
        assert_eq!(s1, -1); // y moved past x
        let (s2, m2) = alg.normalize(m.factors()).unwrap().unwrap();
        assert_eq!(s2, 1);
        assert_eq!(m, m2);
    }

    #[test]
    fn multiply_unit_and_odd_square() {
        let alg = DGAlgebra::free([("a", 2), ("b", 3)]).unwrap();
        let a = Element::generator(alg.by_name("a").unwrap());
        let b = Element::generator(alg.by_name("b").unwrap());
        let sum = a.add(&b);
        assert_eq!(alg.multiply(&sum, &Element::one()).unwrap(), sum);
        assert!(alg.multiply(&b, &b).unwrap().is_zero());
    }

    #[test]
    fn multiply_difference_of_squares_with_odd_factor() {
        // (a + x)(a - x) = a^2 for |a| = 2, |x| = 1: the cross terms cancel
        // because xa = ax.
        let alg = DGAlgebra::free([("a", 2), ("x", 1)]).unwrap();
        let a = Element::generator(alg.by_name("a").unwrap());
        let x = Element::generator(alg.by_name("x").unwrap());
        let lhs = alg.multiply(&a.add(&x), &a.sub(&x)).unwrap();
        let a2 = alg.power(&a, 2).unwrap();
        assert_eq!(lhs, a2);
    }

    #[test]
    fn derivation_examples() {
        // d(a^2) = 0 when da = 0.
        let alg = DGAlgebra::free([("a", 2)]).unwrap();
        let a = Element::generator(alg.by_name("a").unwrap());
        let a2 = alg.power(&a, 2).unwrap();
        assert!(alg.apply_d(&a2).unwrap().is_zero());

        // d(x a) = a^2 in Lambda(a_2, x_1; dx = a).
        let alg = DGAlgebra::free([("a", 2), ("x", 1)]).unwrap();
        let aid = alg.by_name("a").unwrap();
        let xid = alg.by_name("x").unwrap();
        let alg = alg.with_differential(xid, Element::generator(aid)).unwrap();
        let xa = alg
            .multiply(&Element::generator(xid), &Element::generator(aid))
            .unwrap();
        let a2 = alg.power(&Element::generator(aid), 2).unwrap();
        assert_eq!(alg.apply_d(&xa).unwrap(), a2);

        // d(b - x a) = 0 in the Hopf total space.
        let alg = hopf_total();
        let a = Element::generator(alg.by_name("a").unwrap());
        let b = Element::generator(alg.by_name("b").unwrap());
        let x = Element::generator(alg.by_name("x").unwrap());
        let z = b.sub(&alg.multiply(&x, &a).unwrap());
        assert!(alg.apply_d(&z).unwrap().is_zero());
    }

    #[test]
    fn derivation_even_power_rule() {
        let alg = DGAlgebra::free([("a", 2), ("b", 3)]).unwrap();
        let aid = alg.by_name("a").unwrap();
        let bid = alg.by_name("b").unwrap();
        let a = Element::generator(aid);
        let alg = alg
            .with_differential(bid, alg.power(&a, 2).unwrap())
            .unwrap();
        // d(a^2 b) = a^2 * a^2 = a^4.
        let a2b = alg
            .multiply(&alg.power(&a, 2).unwrap(), &Element::generator(bid))
            .unwrap();
        let a4 = alg.power(&a, 4).unwrap();
        assert_eq!(alg.apply_d(&a2b).unwrap(), a4);
    }

    #[test]
    fn validate_passes_s2_and_catches_degree_mismatch() {
        assert!(s2_model().validate(10).passed());

        let alg = DGAlgebra::free([("a", 2), ("b", 3)]).unwrap();
        let a = alg.by_name("a").unwrap();
        let b = alg.by_name("b").unwrap();
        // db = a is rejected at construction (degree 3 expected 4).
        assert!(alg.with_differential(b, Element::generator(a)).is_err());
    }

    #[test]
    fn validate_catches_d_square() {
        // Lambda(x_3, v_2, w_3; dv = x, dw = v^2): d^2 w = 2 v x != 0.
        let alg = DGAlgebra::free([("x", 3), ("v", 2), ("w", 3)]).unwrap();
        let x = alg.by_name("x").unwrap();
        let v = alg.by_name("v").unwrap();
        let w = alg.by_name("w").unwrap();
        let alg = alg.with_differential(v, Element::generator(x)).unwrap();
        let v2 = alg.power(&Element::generator(v), 2).unwrap();
        let alg = alg.with_differential(w, v2).unwrap();
        let report = alg.validate(6);
        assert!(!report.passed());
        assert!(matches!(
            &report.violations[0],
            ValidationViolation::DSquareNonzero { generator, .. } if generator == "w"
        ));
    }

    #[test]
    fn augmentation_and_identity() {
        let alg = s2_model();
        let eps = alg.augmentation();
        let a = Element::generator(alg.by_name("a").unwrap());
        let one_plus_a = Element::one().add(&a);
        assert_eq!(eps.apply(&one_plus_a).unwrap(), Element::one());
        assert!(eps.validate(10).passed());

        let id = alg.identity();
        let b = Element::generator(alg.by_name("b").unwrap());
        let e = alg.multiply(&a, &b).unwrap().add(&a.scale(&q(3)));
        assert_eq!(id.apply(&e).unwrap(), e);
    }

    #[test]
    fn morphism_annihilating_factor() {
        // psi: Hopf total -> Lambda(eta_3), x,a |-> 0, b |-> 0; psi(x a) = 0,
        // psi(3x) = 0. A map keeping x: x |-> eta would not preserve degree
        // (|x| = 1), so use the b |-> eta example from the chain-map check.
        let src = hopf_total();
        let tgt = DGAlgebra::free([("eta", 3)]).unwrap();
        let eta = Element::generator(tgt.by_name("eta").unwrap());
        let psi = Morphism::new(
            src.clone(),
            tgt.clone(),
            vec![Element::zero(), eta.clone(), Element::zero()],
        )
        .unwrap();
        let x = Element::generator(src.by_name("x").unwrap());
        let a = Element::generator(src.by_name("a").unwrap());
        let xa = src.multiply(&x, &a).unwrap();
        assert!(psi.apply(&xa).unwrap().is_zero());
        let b = Element::generator(src.by_name("b").unwrap());
        assert_eq!(psi.apply(&b.scale(&q(3))).unwrap(), eta.scale(&q(3)));
    }

    #[test]
    fn chain_map_check_on_quotient_style_map() {
        // In Lambda(a_2, b_3; db = a^2), send b |-> eta and a |-> 0:
        // psi(db) = psi(a^2) = 0 = d psi(b), so the check passes.
        let src = s2_model();
        let tgt = DGAlgebra::free([("eta", 3)]).unwrap();
        let eta = Element::generator(tgt.by_name("eta").unwrap());
        let psi = Morphism::new(src, tgt, vec![Element::zero(), eta]).unwrap();
        assert!(psi.validate(8).passed());
    }

    #[test]
    fn inclusion_into_extension_is_chain_map() {
        let base = s2_model();
        let (total, x) = base.with_generator("x", 1).unwrap();
        let a = total.by_name("a").unwrap();
        let total = total.with_differential(x, Element::generator(a)).unwrap();
        let incl = Morphism::new(
            base.clone(),
            total,
            base.generators()
                .iter()
                .map(|g| Element::generator(g.id))
                .collect(),
        )
        .unwrap();
        assert!(incl.validate(10).passed());
    }

    #[test]
    fn subalgebra_closure() {
        let alg = hopf_total();
        let a = alg.by_name("a").unwrap();
        let b = alg.by_name("b").unwrap();
        let x = alg.by_name("x").unwrap();
        // {a, b} is closed; {b} alone is not (db = a^2).
        let (sub, map) = alg.subalgebra_on(&[b, a]).unwrap();
        assert_eq!(sub.num_generators(), 2);
        assert_eq!(map, vec![a, b]);
        assert!(sub.validate(10).passed());
        assert!(alg.subalgebra_on(&[b]).is_err());
        // {x} alone is not closed either (dx = a).
        assert!(alg.subalgebra_on(&[x]).is_err());
    }

    #[test]
    fn render_is_canonical() {
        let alg = hopf_total();
        let a = Element::generator(alg.by_name("a").unwrap());
        let b = Element::generator(alg.by_name("b").unwrap());
        let x = Element::generator(alg.by_name("x").unwrap());
        let e = b.sub(&alg.multiply(&x, &a).unwrap());
        // a*x sorts before b.
        assert_eq!(alg.render(&e), "-a*x + b");
        assert_eq!(alg.render(&Element::zero()), "0");
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(alg.render(&a.scale(&half)), "1/2*a");
    }
}
