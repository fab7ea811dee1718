//! Support code for the integration and acceptance test suites: a seeded
//! generator of valid random algebras, and an independent dense-rank Betti
//! oracle that shares no code with the sparse fraction-free path it checks.
//!
//! Not part of the public API surface; kept in-tree so every test target
//! can use the same oracles.
#![doc(hidden)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{DGAlgebra, Element, GenId};
use crate::cohomology::{basis_of_degree, differential_matrix};

/// SplitMix64: deterministic, seedable, no dependencies.
pub struct TestRng(pub u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.wrapping_add(0x9e3779b97f4a7c15))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn coeff(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }
}

/// A random valid DGA: generators added one at a time, each differential a
/// random cocycle over the earlier generators, so d^2 = 0 by construction.
pub fn random_dga(rng: &mut TestRng, extra_gens: usize, max_degree: usize) -> DGAlgebra {
    let n = 2 + rng.below(extra_gens + 1);
    let mut alg = DGAlgebra::trivial();
    for i in 0..n {
        let degree = 1 + rng.below(max_degree);
        let prefix = alg.clone();
        let (next, id) = alg
            .with_generator(format!("g{i}"), degree)
            .expect("fresh names");
        alg = next;
        if rng.below(3) == 0 {
            continue; // keep d = 0 for a third of the generators
        }
        let cocycles = differential_matrix(&prefix, degree + 1)
            .expect("prefix is valid")
            .kernel_basis();
        if cocycles.is_empty() {
            continue;
        }
        let basis = basis_of_degree(&prefix, degree + 1);
        let mut image = Element::zero();
        for vector in &cocycles {
            let c = rng.coeff(-2, 2);
            if c == 0 {
                continue;
            }
            let scaled: Vec<BigRational> = vector
                .iter()
                .map(|v| v * BigRational::from_integer(BigInt::from(c)))
                .collect();
            image = image.add(&basis.element(&scaled));
        }
        if image.is_zero() {
            continue;
        }
        alg = alg.with_differential(id, image).expect("cocycle image");
    }
    alg
}

/// A random element supported in one degree, with small coefficients.
pub fn random_homogeneous(
    rng: &mut TestRng,
    dga: &DGAlgebra,
    degree: usize,
) -> Element {
    let basis = basis_of_degree(dga, degree);
    let mut e = Element::zero();
    for m in &basis.monomials {
        let c = rng.coeff(-3, 3);
        if c != 0 {
            e = e.add(&Element::from_term(
                m.clone(),
                BigRational::from_integer(BigInt::from(c)),
            ));
        }
    }
    e
}

/// Independent enumeration of the degree-n monomials as exponent vectors,
/// by a plain odometer (not the library's recursive generator).
fn exponent_vectors(dga: &DGAlgebra, n: usize) -> Vec<Vec<u32>> {
    let degrees: Vec<usize> = dga.generators().iter().map(|g| g.degree).collect();
    let caps: Vec<u32> = degrees
        .iter()
        .map(|&d| if d % 2 == 1 { 1 } else { (n / d) as u32 })
        .collect();
    let mut out = Vec::new();
    let mut v = vec![0u32; degrees.len()];
    loop {
        let total: usize = v
            .iter()
            .zip(&degrees)
            .map(|(&e, &d)| e as usize * d)
            .sum();
        if total == n {
            out.push(v.clone());
        }
        // Odometer step.
        let mut i = 0;
        loop {
            if i == v.len() {
                return out;
            }
            if v[i] < caps[i] {
                v[i] += 1;
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

fn element_of_exponents(dga: &DGAlgebra, v: &[u32]) -> Element {
    let factors: Vec<(GenId, u32)> = v
        .iter()
        .enumerate()
        .filter(|&(_, &e)| e > 0)
        .map(|(i, &e)| (GenId(i), e))
        .collect();
    let (sign, monomial) = dga
        .normalize(&factors)
        .expect("own generators")
        .expect("sorted factors never vanish");
    assert_eq!(sign, 1);
    Element::from_term(monomial, BigRational::from_integer(BigInt::from(1)))
}

/// Plain rational Gaussian elimination, first-nonzero pivoting. Shares
/// nothing with the fraction-free engine.
#[allow(clippy::needless_range_loop)] // updates row r against row rank in place
pub fn naive_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let height = rows.len();
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..height).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank][col].clone();
        for j in 0..width {
            rows[rank][j] = &rows[rank][j] / &p;
        }
        for r in 0..height {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for j in 0..width {
                    let sub = &rows[rank][j] * &f;
                    rows[r][j] = &rows[r][j] - &sub;
                }
            }
        }
        rank += 1;
        if rank == height {
            break;
        }
    }
    rank
}

/// Dense-enumeration Betti oracle: own monomial enumeration, dense d
/// matrices, naive rational rank.
pub fn oracle_betti(dga: &DGAlgebra, max: usize) -> Vec<usize> {
    let bases: Vec<Vec<Vec<u32>>> = (0..=max + 1).map(|n| exponent_vectors(dga, n)).collect();
    let index: Vec<HashMap<Vec<u32>, usize>> = bases
        .iter()
        .map(|b| {
            b.iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), i))
                .collect()
        })
        .collect();
    let mut ranks = Vec::with_capacity(max + 1);
    for n in 0..=max {
        let rows = bases[n + 1].len();
        let cols = bases[n].len();
        let mut dense = vec![vec![BigRational::zero(); cols]; rows];
        for (j, v) in bases[n].iter().enumerate() {
            let m = element_of_exponents(dga, v);
            let dm = dga.apply_d(&m).expect("valid algebra");
            for (mono, c) in dm.terms() {
                let mut target = vec![0u32; dga.num_generators()];
                for &(id, e) in mono.factors() {
                    target[id.index()] = e;
                }
                let row = index[n + 1][&target];
                dense[row][j] = c.clone();
            }
        }
        ranks.push(naive_rank(dense));
    }
    let mut betti = Vec::with_capacity(max + 1);
    for n in 0..=max {
        let dim = bases[n].len();
        let prev = if n == 0 { 0 } else { ranks[n - 1] };
        betti.push(dim - ranks[n] - prev);
    }
    betti
}

/// Brute-force Lyndon word count: words of length `len` over `alphabet`
/// letters that are strictly smaller than all their proper rotations.
/// Cross-checks the Witt formula independently.
pub fn lyndon_count(alphabet: usize, len: usize) -> u64 {
    if len == 0 {
        return 0;
    }
    let mut count = 0u64;
    let total = (alphabet as u64).pow(len as u32);
    'words: for code in 0..total {
        let mut w = Vec::with_capacity(len);
        let mut c = code;
        for _ in 0..len {
            w.push((c % alphabet as u64) as u8);
            c /= alphabet as u64;
        }
        for r in 1..len {
            let rotation: Vec<u8> = w[r..].iter().chain(w[..r].iter()).copied().collect();
            if rotation <= w {
                continue 'words;
            }
        }
        count += 1;
    }
    count
}

// ---------------------------------------------------------------------------
// Seeded property checks shared by the property and acceptance suites.
// Each panics on failure.

use crate::cohomology::betti;
use crate::format::{parse, parse_element, print_algebra, ParsedInput};

/// Graded commutativity: e1 e2 = (-1)^{|e1||e2|} e2 e1.
pub fn check_koszul_sign(seed: u64) {
    let mut rng = TestRng::new(seed);
    let dga = random_dga(&mut rng, 3, 4);
    let d1 = 1 + rng.below(5);
    let d2 = 1 + rng.below(5);
    let e1 = random_homogeneous(&mut rng, &dga, d1);
    let e2 = random_homogeneous(&mut rng, &dga, d2);
    let lhs = dga.multiply(&e1, &e2).unwrap();
    let mut rhs = dga.multiply(&e2, &e1).unwrap();
    if d1 % 2 == 1 && d2 % 2 == 1 {
        rhs = rhs.neg();
    }
    assert_eq!(lhs, rhs, "koszul sign law failed (|e1|={d1}, |e2|={d2})");
}

/// Graded Leibniz rule: d(e1 e2) = d(e1) e2 + (-1)^{|e1|} e1 d(e2).
pub fn check_leibniz(seed: u64) {
    let mut rng = TestRng::new(seed);
    let dga = random_dga(&mut rng, 3, 4);
    let d1 = 1 + rng.below(5);
    let d2 = 1 + rng.below(5);
    let e1 = random_homogeneous(&mut rng, &dga, d1);
    let e2 = random_homogeneous(&mut rng, &dga, d2);
    let lhs = dga.apply_d(&dga.multiply(&e1, &e2).unwrap()).unwrap();
    let mut second = dga.multiply(&e1, &dga.apply_d(&e2).unwrap()).unwrap();
    if d1 % 2 == 1 {
        second = second.neg();
    }
    let rhs = dga
        .multiply(&dga.apply_d(&e1).unwrap(), &e2)
        .unwrap()
        .add(&second);
    assert_eq!(lhs, rhs, "leibniz failed (|e1|={d1})");
}

/// d(d(e)) = 0 on random elements of valid algebras.
pub fn check_d_square(seed: u64) {
    let mut rng = TestRng::new(seed);
    let dga = random_dga(&mut rng, 3, 4);
    assert!(dga.validate(8).passed());
    let degree = 1 + rng.below(6);
    let e = random_homogeneous(&mut rng, &dga, degree);
    let dd = dga.apply_d(&dga.apply_d(&e).unwrap()).unwrap();
    assert!(dd.is_zero(), "d^2 != 0 on a degree-{degree} element");
}

/// Rank-nullity per degree: dim B^n = rank d_n + dim ker d_n, with the
/// rank cross-checked against the naive dense oracle.
pub fn check_rank_nullity(seed: u64) {
    let mut rng = TestRng::new(seed);
    let dga = random_dga(&mut rng, 3, 4);
    let n = rng.below(7);
    let dim = basis_of_degree(&dga, n).dimension();
    let m = differential_matrix(&dga, n).unwrap();
    let rank = m.rank();
    let nullity = m.kernel_basis().len();
    assert_eq!(dim, rank + nullity, "rank-nullity failed in degree {n}");

    // Dense oracle agreement on the same matrix.
    let mut dense = vec![vec![BigRational::zero(); m.num_cols()]; m.num_rows()];
    #[allow(clippy::needless_range_loop)]
    for j in 0..m.num_cols() {
        for (i, v) in m.column(j) {
            dense[*i][j] = v.clone();
        }
    }
    assert_eq!(rank, naive_rank(dense), "rank disagrees with dense oracle");
}

/// Betti numbers do not depend on generator creation order.
pub fn check_betti_ordering_invariance(seed: u64) {
    let mut rng = TestRng::new(seed);
    let dga = random_dga(&mut rng, 2, 4);
    let max = 5;
    let reference = betti(&dga, max).unwrap();

    // Random permutation of the creation order; differentials are carried
    // over by rendering against the old names and parsing under the new.
    let n = dga.num_generators();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        order.swap(i, j);
    }
    let mut permuted = DGAlgebra::trivial();
    for &old in &order {
        let g = &dga.generators()[old];
        let (next, _) = permuted.with_generator(g.name.clone(), g.degree).unwrap();
        permuted = next;
    }
    for &old in &order {
        let g = &dga.generators()[old];
        let image = dga.differential_of(g.id).unwrap();
        if image.is_zero() {
            continue;
        }
        let text = dga.render(image);
        let remapped = parse_element(&permuted, &text).unwrap();
        let id = permuted.by_name(&g.name).unwrap();
        permuted = permuted.with_differential(id, remapped).unwrap();
    }
    assert_eq!(
        betti(&permuted, max).unwrap(),
        reference,
        "betti changed under creation-order permutation"
    );
}

/// print . parse round-trip: parsing a printed algebra reproduces it, and
/// printing is a fixed point.
pub fn check_parse_print_round_trip(seed: u64) {
    let mut rng = TestRng::new(seed);
    let dga = random_dga(&mut rng, 3, 4);
    let text = print_algebra(&dga);
    let reparsed = parse(&text).unwrap();
    let ParsedInput::Algebra(back) = reparsed else {
        panic!("printed algebra parsed as a fibration");
    };
    assert_eq!(back, dga, "parse(print(A)) != A");
    assert_eq!(print_algebra(&back), text, "print not a fixed point");
}
