//! Algebraic fibrations: inclusions B -> B (x) Lambda(V) with stage-filtered
//! fiber generators, odd spherical attachments with Euler classes, the
//! Gysin-sequence checker, the even-cohomology-killing tower, and the fiber
//! and push-forward constructions.
//!
//! The stage filtration is the relative-model condition: a stage-0
//! generator has its differential in the base, a stage-n generator in the
//! base tensor the earlier stages. Tower generators are named
//! `s{m}_{k}_{i}` (stage, degree of the killed class, basis index) so
//! reports and sub-tower extraction stay reproducible.

use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{remap_element, DGAlgebra, Element, GenId, Morphism};
use crate::cohomology::{betti, cohomology_basis, is_exact, CohomologyClass};
use crate::error::{Error, Result};
use crate::linalg::{row_space_rank, same_row_space};

/// A fiber generator of the total algebra with its filtration stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiberGenerator {
    pub id: GenId,
    pub stage: usize,
}

/// An algebraic fibration: a base algebra included as the leading
/// generators of a total algebra, plus stage-tagged fiber generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fibration {
    base: DGAlgebra,
    total: DGAlgebra,
    fiber: Vec<FiberGenerator>,
}

impl Fibration {
    /// Assemble a fibration, checking the structural invariant that the
    /// base is the leading sub-DGAlgebra of the total and that the fiber
    /// list covers exactly the remaining generators in creation order.
    /// The stage filtration is *not* checked here; `validate` reports on it.
    pub fn from_parts(
        base: DGAlgebra,
        total: DGAlgebra,
        fiber: Vec<FiberGenerator>,
    ) -> Result<Self> {
        let nb = base.num_generators();
        if total.num_generators() != nb + fiber.len() {
            return Err(Error::BadFibration(format!(
                "total has {} generators, expected base {} + fiber {}",
                total.num_generators(),
                nb,
                fiber.len()
            )));
        }
        for (bg, tg) in base.generators().iter().zip(total.generators()) {
            if bg.name != tg.name || bg.degree != tg.degree {
                return Err(Error::BadFibration(format!(
                    "base generator `{}` does not lead the total algebra",
                    bg.name
                )));
            }
            let bd = base.differential_of(bg.id)?;
            let td = total.differential_of(tg.id)?;
            if bd != td {
                return Err(Error::BadFibration(format!(
                    "differential of base generator `{}` changes in the total algebra",
                    bg.name
                )));
            }
        }
        for (offset, fg) in fiber.iter().enumerate() {
            if fg.id.index() != nb + offset {
                return Err(Error::BadFibration(
                    "fiber generators must follow the base in creation order".to_string(),
                ));
            }
        }
        Ok(Fibration { base, total, fiber })
    }

    /// The trivial fibration: total = base, empty fiber.
    pub fn trivial(base: DGAlgebra) -> Self {
        Fibration {
            total: base.clone(),
            base,
            fiber: Vec::new(),
        }
    }

    pub fn base(&self) -> &DGAlgebra {
        &self.base
    }

    pub fn total(&self) -> &DGAlgebra {
        &self.total
    }

    pub fn fiber(&self) -> &[FiberGenerator] {
        &self.fiber
    }

    /// The inclusion of the base into the total algebra.
    pub fn inclusion(&self) -> Morphism {
        Morphism::new(
            self.base.clone(),
            self.total.clone(),
            self.base
                .generators()
                .iter()
                .map(|g| Element::generator(g.id))
                .collect(),
        )
        .expect("inclusion is degree-preserving")
    }

    /// Filtration and minimality report.
    pub fn validate(&self) -> FibrationReport {
        let nb = self.base.num_generators();
        let mut filtration_violations = Vec::new();
        let mut nonminimal = Vec::new();
        for fg in &self.fiber {
            let gen = &self.total.generators()[fg.id.index()];
            let image = self
                .total
                .differential_of(fg.id)
                .cloned()
                .unwrap_or_default();
            let mut minimal_here = true;
            for (m, _) in image.terms() {
                let mut fiber_multiplicity = 0u32;
                let mut has_base_factor = false;
                for &(id, exp) in m.factors() {
                    if id.index() < nb {
                        has_base_factor = true;
                    } else {
                        fiber_multiplicity += exp;
                        let fstage = self.fiber[id.index() - nb].stage;
                        if fstage >= fg.stage {
                            filtration_violations.push(FiltrationViolation {
                                generator: gen.name.clone(),
                                stage: fg.stage,
                                offending: self.total.generators()[id.index()].name.clone(),
                                offending_stage: fstage,
                            });
                        }
                    }
                }
                if !has_base_factor && fiber_multiplicity < 2 {
                    minimal_here = false;
                }
            }
            if !minimal_here {
                nonminimal.push(gen.name.clone());
            }
        }
        FibrationReport {
            filtration_violations,
            nonminimal_generators: nonminimal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationViolation {
    pub generator: String,
    pub stage: usize,
    pub offending: String,
    pub offending_stage: usize,
}

/// Outcome of `Fibration::validate`: the stage filtration check, plus the
/// minimality criterion Im(d) in B+ (x) Lambda V + B (x) Lambda^{>=2} V,
/// reported separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibrationReport {
    pub filtration_violations: Vec<FiltrationViolation>,
    pub nonminimal_generators: Vec<String>,
}

impl FibrationReport {
    pub fn filtration_ok(&self) -> bool {
        self.filtration_violations.is_empty()
    }

    pub fn minimal(&self) -> bool {
        self.nonminimal_generators.is_empty()
    }
}

/// The Euler data of a single odd spherical attachment: the attached
/// generator and the class of its differential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerData {
    pub attached: GenId,
    pub euler_class: CohomologyClass,
}

fn fresh_stage_name(alg: &DGAlgebra, stage: usize, killed_degree: usize, index: usize) -> String {
    let mut name = format!("s{stage}_{killed_degree}_{index}");
    let mut bump = 0usize;
    while alg.by_name(&name).is_ok() {
        bump += 1;
        name = format!("s{stage}_{killed_degree}_{index}_{bump}");
    }
    name
}

fn fresh_stage_label(alg: &DGAlgebra) -> usize {
    let mut label = 0usize;
    loop {
        let prefix = format!("s{label}_");
        if alg.generators().iter().any(|g| g.name.starts_with(&prefix)) {
            label += 1;
        } else {
            return label;
        }
    }
}

/// Adjoin one odd generator x of degree 2k-1 with dx = the chosen
/// representative of `beta`, a class of positive even degree 2k. The
/// attachment is a single-stage fibration and `beta` becomes its Euler
/// class.
pub fn attach_odd_sphere(
    base: &DGAlgebra,
    beta: &CohomologyClass,
) -> Result<(Fibration, EulerData)> {
    if beta.degree == 0 || beta.degree % 2 == 1 {
        return Err(Error::NotPositiveEven(beta.degree));
    }
    if !base.apply_d(&beta.representative)?.is_zero() {
        return Err(Error::NotCocycle {
            degree: beta.degree,
        });
    }
    let label = fresh_stage_label(base);
    let name = fresh_stage_name(base, label, beta.degree, 0);
    let (total, x) = base.with_generator(name, beta.degree - 1)?;
    let total = total.with_differential(x, beta.representative.clone())?;
    let fib = Fibration {
        base: base.clone(),
        total,
        fiber: vec![FiberGenerator { id: x, stage: 0 }],
    };
    let euler = EulerData {
        attached: x,
        euler_class: beta.clone(),
    };
    Ok((fib, euler))
}

/// One node of the Gysin sequence check: exactness at the three spots
/// around degree i, plus the kernel law ker(phi_*) = H^i(B).beta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GysinNode {
    pub i: usize,
    pub exact_at_upper_base: bool,
    pub exact_at_total: bool,
    pub exact_at_connecting: bool,
    pub kernel_law: bool,
}

impl GysinNode {
    pub fn passed(&self) -> bool {
        self.exact_at_upper_base
            && self.exact_at_total
            && self.exact_at_connecting
            && self.kernel_law
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GysinReport {
    pub cutoff: usize,
    pub euler_degree: usize,
    pub nodes: Vec<GysinNode>,
}

impl GysinReport {
    pub fn passed(&self) -> bool {
        self.nodes.iter().all(GysinNode::passed)
    }

    pub fn first_failure(&self) -> Option<&GysinNode> {
        self.nodes.iter().find(|n| !n.passed())
    }
}

/// Verify the Gysin sequence of a single odd attachment:
/// H^i(B) --cup e--> H^{i+2k}(B) --phi--> H^{i+2k}(T) --del--> H^{i+1}(B),
/// exact at every node with i <= cutoff - 2k, and the kernel of phi_* equal
/// to H^i(B).beta as a subspace. Overall signs of the maps do not affect
/// the image/kernel comparisons.
pub fn gysin_verify(fib: &Fibration, cutoff: usize) -> Result<GysinReport> {
    if fib.fiber.len() != 1 {
        return Err(Error::BadFibration(
            "gysin_verify expects a single-attachment fibration".to_string(),
        ));
    }
    let x = fib.fiber[0].id;
    let base = &fib.base;
    let total = &fib.total;
    let x_degree = total.generator(x)?.degree;
    let two_k = x_degree + 1;
    let euler = total.differential_of(x)?.clone();
    match base.degree_of(&euler)? {
        crate::algebra::ElementDegree::Zero => {}
        crate::algebra::ElementDegree::Homogeneous(n) if n == two_k => {}
        _ => {
            return Err(Error::BadFibration(
                "attached generator must have dx in the base, homogeneous of degree |x|+1"
                    .to_string(),
            ))
        }
    }

    let mut nodes = Vec::new();
    let mut i = 0usize;
    while i + two_k <= cutoff {
        let h_low = cohomology_basis(base, i)?;
        let h_mid = cohomology_basis(base, i + two_k)?;
        let h_tot = cohomology_basis(total, i + two_k)?;
        let h_conn = cohomology_basis(base, i + 1)?;
        let h_next = cohomology_basis(base, i + 1 + two_k)?;

        // cup e : H^i(B) -> H^{i+2k}(B), one column per representative.
        let cup_cols: Vec<Vec<BigRational>> = h_low
            .representatives
            .iter()
            .map(|r| {
                let prod = base.multiply(r, &euler)?;
                h_mid.coordinates(base, &prod)
            })
            .collect::<Result<Vec<_>>>()?;

        // phi_* : H^{i+2k}(B) -> H^{i+2k}(T); base cocycles are literally
        // total cocycles.
        let phi_cols: Vec<Vec<BigRational>> = h_mid
            .representatives
            .iter()
            .map(|r| h_tot.coordinates(total, r))
            .collect::<Result<Vec<_>>>()?;

        // del : H^{i+2k}(T) -> H^{i+1}(B), the x-coefficient projection.
        let del_cols: Vec<Vec<BigRational>> = h_tot
            .representatives
            .iter()
            .map(|r| {
                let b1 = x_coefficient(total, r, x)?;
                h_conn.coordinates(base, &b1)
            })
            .collect::<Result<Vec<_>>>()?;

        // cup e : H^{i+1}(B) -> H^{i+1+2k}(B).
        let cup_next_cols: Vec<Vec<BigRational>> = h_conn
            .representatives
            .iter()
            .map(|r| {
                let prod = base.multiply(r, &euler)?;
                h_next.coordinates(base, &prod)
            })
            .collect::<Result<Vec<_>>>()?;

        let exact_at_upper_base = exact_at(&cup_cols, h_mid.dimension(), &phi_cols);
        let exact_at_total = exact_at(&phi_cols, h_tot.dimension(), &del_cols);
        let exact_at_connecting = exact_at(&del_cols, h_conn.dimension(), &cup_next_cols);

        // Kernel law: ker(phi_*) = span of the cup-e image columns.
        let phi_kernel = kernel_of_map(&phi_cols);
        let kernel_law = same_row_space(&phi_kernel, &cup_cols, h_mid.dimension());

        nodes.push(GysinNode {
            i,
            exact_at_upper_base,
            exact_at_total,
            exact_at_connecting,
            kernel_law,
        });
        i += 1;
    }
    Ok(GysinReport {
        cutoff,
        euler_degree: two_k,
        nodes,
    })
}

/// Extract b1 from z = b0 + b1*x. Canonical monomials contain x at most
/// once; moving the x factor out to the right costs a Koszul sign for each
/// odd factor it passes.
pub(crate) fn x_coefficient(total: &DGAlgebra, z: &Element, x: GenId) -> Result<Element> {
    let x_degree = total.generator(x)?.degree;
    let mut out = Element::zero();
    for (m, c) in z.terms() {
        let mut rest: Vec<(GenId, u32)> = Vec::new();
        let mut seen = false;
        let mut sign_flips = 0usize;
        for &(id, exp) in m.factors() {
            if id == x {
                seen = true;
                continue;
            }
            if seen && total.generator(id)?.degree % 2 == 1 && x_degree % 2 == 1 {
                sign_flips += exp as usize;
            }
            rest.push((id, exp));
        }
        if !seen {
            continue;
        }
        let coeff = if sign_flips % 2 == 1 { -c } else { c.clone() };
        out.add_term(crate::algebra::Monomial::from_sorted(rest), coeff);
    }
    Ok(out)
}

/// Exactness of  A --f--> M --g--> B  at M, with the columns of f written
/// in M-coordinates and one column of g per M basis vector: g.f = 0 and
/// rank f + rank g = dim M.
fn exact_at(f_cols: &[Vec<BigRational>], dim_mid: usize, g_cols: &[Vec<BigRational>]) -> bool {
    debug_assert_eq!(g_cols.len(), dim_mid);
    let rank_f = row_space_rank(f_cols, dim_mid);
    let g_width = g_cols.first().map_or(0, |c| c.len());
    let rank_g = row_space_rank(g_cols, g_width);
    let composite_zero = f_cols
        .iter()
        .all(|col| apply_cols(g_cols, col).iter().all(|v| v.is_zero()));
    composite_zero && rank_f + rank_g == dim_mid
}

/// Matrix-vector product where the matrix is given by columns and `v` lives
/// in the column-index space.
fn apply_cols(cols: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
    let out_dim = cols.first().map_or(0, |c| c.len());
    let mut out = vec![BigRational::zero(); out_dim];
    for (c, coeff) in cols.iter().zip(v) {
        if coeff.is_zero() {
            continue;
        }
        for (o, entry) in out.iter_mut().zip(c) {
            *o = &*o + &(entry * coeff);
        }
    }
    out
}

/// Kernel of the linear map whose j-th column is `cols[j]`.
fn kernel_of_map(cols: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let rows = cols.first().map_or(0, |c| c.len());
    let mut m = crate::linalg::RationalMatrix::zero(rows, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            if !v.is_zero() {
                m.set_entry(i, j, v.clone());
            }
        }
    }
    m.kernel_basis()
}

/// For every even degree 0 < 2k <= cutoff, attach one degree-(2k-1)
/// generator per cohomology-basis representative, with d = that
/// representative. The inclusion then induces the zero map on H^{2k} for
/// all 0 < 2k <= cutoff.
pub fn kill_even_stage(current: &DGAlgebra, cutoff: usize) -> Result<Fibration> {
    let report = current.validate(cutoff + 1);
    if !report.passed() {
        return Err(Error::Validation(
            report
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    let label = fresh_stage_label(current);
    let mut new_gens: Vec<(String, usize, Element)> = Vec::new();
    let mut k = 2usize;
    while k <= cutoff {
        let h = cohomology_basis(current, k)?;
        for (i, rep) in h.representatives.iter().enumerate() {
            new_gens.push((fresh_stage_name(current, label, k, i), k - 1, rep.clone()));
        }
        k += 2;
    }
    let mut total = current.clone();
    let mut fiber = Vec::with_capacity(new_gens.len());
    for (name, degree, rep) in new_gens {
        let (next, id) = total.with_generator(name, degree)?;
        total = next.with_differential(id, rep)?;
        fiber.push(FiberGenerator { id, stage: 0 });
    }
    Ok(Fibration {
        base: current.clone(),
        total,
        fiber,
    })
}

/// A truncated even-killing tower: snapshots A_0 c A_1 c ... as fibrations
/// over the starting algebra. `stages[0]` is the trivial fibration.
#[derive(Debug, Clone)]
pub struct Tower {
    pub stages: Vec<Fibration>,
    pub cutoff: usize,
    pub converged: bool,
    /// Nonzero even Betti numbers of the last stage when not converged.
    pub residual_even: Vec<(usize, usize)>,
}

impl Tower {
    pub fn base(&self) -> &DGAlgebra {
        self.stages[0].base()
    }

    pub fn last(&self) -> &Fibration {
        self.stages.last().expect("tower has at least the base stage")
    }

    pub fn rounds(&self) -> usize {
        self.stages.len() - 1
    }

    /// Names of the generators added at round m (1-based).
    pub fn generators_added_at(&self, round: usize) -> Vec<String> {
        let prev = self.stages[round - 1].total().num_generators();
        self.stages[round].total().generators()[prev..]
            .iter()
            .map(|g| g.name.clone())
            .collect()
    }

    /// The constructive zero-map property: every even representative of a
    /// stage becomes exact in the next stage. Returns the first failing
    /// (round, degree), or None.
    pub fn verify_zero_map(&self) -> Result<Option<(usize, usize)>> {
        for m in 1..self.stages.len() {
            let prev = self.stages[m - 1].total();
            let next = self.stages[m].total();
            let mut k = 2usize;
            while k <= self.cutoff {
                for rep in &cohomology_basis(prev, k)?.representatives {
                    if is_exact(next, rep)?.is_none() {
                        return Ok(Some((m, k)));
                    }
                }
                k += 2;
            }
        }
        Ok(None)
    }
}

fn even_residual(betti: &[usize], cutoff: usize) -> Vec<(usize, usize)> {
    (2..=cutoff)
        .step_by(2)
        .filter(|&n| betti[n] != 0)
        .map(|n| (n, betti[n]))
        .collect()
}

/// Iterate `kill_even_stage` until all positive even cohomology vanishes
/// through the cutoff, or `max_stages` rounds have run. Hitting the bound
/// is a reported state (`converged = false`), not an error.
pub fn build_tower(a0: &DGAlgebra, cutoff: usize, max_stages: usize) -> Result<Tower> {
    let mut stages = vec![Fibration::trivial(a0.clone())];
    let nb = a0.num_generators();
    loop {
        let current = stages.last().expect("nonempty").total().clone();
        let b = betti(&current, cutoff)?;
        let residual = even_residual(&b, cutoff);
        if residual.is_empty() {
            return Ok(Tower {
                stages,
                cutoff,
                converged: true,
                residual_even: Vec::new(),
            });
        }
        if stages.len() > max_stages {
            return Ok(Tower {
                stages,
                cutoff,
                converged: false,
                residual_even: residual,
            });
        }
        let round = stages.len();
        let killed = kill_even_stage(&current, cutoff)?;
        let mut fiber: Vec<FiberGenerator> = stages.last().unwrap().fiber().to_vec();
        for fg in killed.fiber() {
            fiber.push(FiberGenerator {
                id: fg.id,
                stage: round - 1,
            });
        }
        debug_assert_eq!(killed.total().num_generators(), nb + fiber.len());
        stages.push(Fibration {
            base: a0.clone(),
            total: killed.total().clone(),
            fiber,
        });
    }
}

/// The minimal prefix of attached generators, transitively closed under
/// differential support, forming a finitely iterated fibration over the
/// tower base in which `alpha` maps to zero.
pub fn finite_subtower(tower: &Tower, alpha: &CohomologyClass) -> Result<Fibration> {
    let base = tower.base();
    if !base.apply_d(&alpha.representative)?.is_zero() {
        return Err(Error::NotCocycle {
            degree: alpha.degree,
        });
    }
    let nb = base.num_generators();
    for stage in &tower.stages {
        let total = stage.total();
        if let Some(theta) = is_exact(total, &alpha.representative)? {
            let mut selected: Vec<bool> = vec![false; stage.fiber().len()];
            let mut queue: Vec<GenId> = Vec::new();
            let visit = |e: &Element, selected: &mut Vec<bool>, queue: &mut Vec<GenId>| {
                for (m, _) in e.terms() {
                    for &(id, _) in m.factors() {
                        if id.index() >= nb && !selected[id.index() - nb] {
                            selected[id.index() - nb] = true;
                            queue.push(id);
                        }
                    }
                }
            };
            visit(&theta, &mut selected, &mut queue);
            while let Some(id) = queue.pop() {
                let image = total.differential_of(id)?.clone();
                visit(&image, &mut selected, &mut queue);
            }
            let mut keep: Vec<GenId> = (0..nb).map(GenId).collect();
            let mut kept_stages = Vec::new();
            for (offset, fg) in stage.fiber().iter().enumerate() {
                if selected[offset] {
                    keep.push(fg.id);
                    kept_stages.push(fg.stage);
                }
            }
            let (sub, _map) = total.subalgebra_on(&keep)?;
            let fiber = kept_stages
                .into_iter()
                .enumerate()
                .map(|(offset, st)| FiberGenerator {
                    id: GenId(nb + offset),
                    stage: st,
                })
                .collect();
            return Fibration::from_parts(base.clone(), sub, fiber);
        }
    }
    Err(Error::ClassNotKilled)
}

/// The algebraic fiber (Lambda V, d-bar): fiber generators only, with every
/// positive-degree base generator set to zero in each differential.
pub fn algebraic_fiber(fib: &Fibration) -> Result<DGAlgebra> {
    let nb = fib.base.num_generators();
    let total = &fib.total;
    let mut old_to_new: Vec<Option<GenId>> = vec![None; total.num_generators()];
    let mut alg = DGAlgebra::trivial();
    for fg in &fib.fiber {
        let g = total.generator(fg.id)?;
        let (next, id) = alg.with_generator(g.name.clone(), g.degree)?;
        alg = next;
        old_to_new[fg.id.index()] = Some(id);
    }
    for fg in &fib.fiber {
        let image = total.differential_of(fg.id)?;
        let mut reduced = Element::zero();
        for (m, c) in image.terms() {
            if m.factors().iter().any(|&(id, _)| id.index() < nb) {
                continue;
            }
            reduced.add_term(m.clone(), c.clone());
        }
        let remapped = remap_element(&reduced, &old_to_new)?;
        let new_id = old_to_new[fg.id.index()].expect("fiber generator mapped");
        alg = alg.with_differential(new_id, remapped)?;
    }
    Ok(alg)
}

/// Evidence verdict on the cohomological dimension of the fiber, relative
/// to a cutoff. Not a proof of finiteness: `FiniteUpTo(d)` only says the
/// top nonzero Betti degree d clears the cutoff by `margin`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiberVerdict {
    FiniteUpTo(usize),
    NonzeroNearCutoff { nonzero_degrees: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberProbe {
    pub cutoff: usize,
    pub margin: usize,
    pub fiber_betti: Vec<usize>,
    pub verdict: FiberVerdict,
}

pub const DEFAULT_PROBE_MARGIN: usize = 2;

/// Compute the fiber's Betti numbers through the cutoff and classify.
pub fn fiber_dimension_probe(
    fib: &Fibration,
    cutoff: usize,
    margin: Option<usize>,
) -> Result<FiberProbe> {
    let margin = margin.unwrap_or(DEFAULT_PROBE_MARGIN);
    let fiber = algebraic_fiber(fib)?;
    let b = betti(&fiber, cutoff)?;
    let top = (0..=cutoff).rev().find(|&n| b[n] != 0).unwrap_or(0);
    let verdict = if top + margin <= cutoff {
        FiberVerdict::FiniteUpTo(top)
    } else {
        FiberVerdict::NonzeroNearCutoff {
            nonzero_degrees: (0..=cutoff).filter(|&n| b[n] != 0).collect(),
        }
    };
    Ok(FiberProbe {
        cutoff,
        margin,
        fiber_betti: b,
        verdict,
    })
}

/// Push a fibration forward along a morphism of bases: the same fiber
/// generators over the new base, with differentials (psi (x) 1)(d v). The
/// stage filtration carries over unchanged.
pub fn pushforward(fib: &Fibration, psi: &Morphism) -> Result<Fibration> {
    if psi.source() != &fib.base {
        return Err(Error::BadFibration(
            "push-forward morphism must start at the fibration base".to_string(),
        ));
    }
    let max_deg = fib
        .fiber
        .iter()
        .map(|fg| fib.total.generators()[fg.id.index()].degree)
        .max()
        .unwrap_or(0);
    let chain = psi.validate(max_deg + 1);
    if !chain.passed() {
        return Err(Error::Validation(format!(
            "push-forward morphism is not a chain map: {}",
            chain.violations[0]
        )));
    }
    let target = psi.target().clone();
    let nb_old = fib.base.num_generators();
    let nb_new = target.num_generators();

    let mut total = target.clone();
    let mut fiber = Vec::with_capacity(fib.fiber.len());
    for fg in &fib.fiber {
        let g = fib.total.generator(fg.id)?;
        let (next, id) = total.with_generator(g.name.clone(), g.degree).map_err(|e| {
            Error::BadFibration(format!("fiber generator collides with target base: {e}"))
        })?;
        total = next;
        fiber.push(FiberGenerator {
            id,
            stage: fg.stage,
        });
    }
    let mut images: Vec<Element> = Vec::with_capacity(fib.total.num_generators());
    for g in fib.total.generators() {
        if g.id.index() < nb_old {
            images.push(psi.image_of(g.id)?.clone());
        } else {
            images.push(Element::generator(GenId(nb_new + (g.id.index() - nb_old))));
        }
    }
    let extended = Morphism::new(fib.total.clone(), total.clone(), images)?;
    for (fg_old, fg_new) in fib.fiber.iter().zip(&fiber) {
        let image = extended.apply(fib.total.differential_of(fg_old.id)?)?;
        total = total.with_differential(fg_new.id, image)?;
    }
    let out = Fibration {
        base: target,
        total,
        fiber,
    };
    let report = out.total.validate(max_deg + 2);
    if !report.passed() {
        return Err(Error::Validation(format!(
            "push-forward total fails d^2 = 0: {}",
            report.violations[0]
        )));
    }
    Ok(out)
}

/// Error unless H^{2k}(dga) = 0 for all 0 < 2k <= through.
pub fn check_even_cohomology_vanishes(dga: &DGAlgebra, through: usize) -> Result<()> {
    let b = betti(dga, through)?;
    for n in (2..=through).step_by(2) {
        if b[n] != 0 {
            return Err(Error::EvenCohomologyPresent {
                degree: n,
                dimension: b[n],
                through,
            });
        }
    }
    Ok(())
}
