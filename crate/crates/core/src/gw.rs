//! Twisted Gromov-Witten invariants of classifying stacks, the underlying
//! degree-zero CohFT with its gluing axioms, the center/sector transforms
//! `I` and `J`, and exact verification of the decomposition and product
//! identities for banded gerbes.
//!
//! Every invariant is evaluated through the semisimple structure of the
//! twisted group algebra: an insertion is expanded in the idempotent basis
//! and `⟨∏ τ_{a_i}(δ_i)⟩_g = Σ_ρ (∏_i e_ρ(δ_i)) ν_ρ^{1−g} ∫ ∏ψ^{a_i}`.

use serde::Serialize;

use crate::cocycle::{
    character_value, extract_cocycle, product_cocycle, unflatten, CentralExtensionData,
    TwoCocycleA,
};
use crate::cyclotomic::Cyclotomic;
use crate::error::Error;
use crate::group::FiniteGroup;
use crate::psi::{psi_integral, PsiSpec};
use crate::rational::{rat, rat_pow, Rational};
use crate::twisted::{AlgebraElement, TwistedAlgebra};
use crate::Result;

/// A descendant Gromov-Witten query over a fixed twisted algebra.
#[derive(Clone, Debug)]
pub struct GwQuery {
    pub genus: usize,
    pub insertions: Vec<AlgebraElement>,
    pub exponents: Vec<usize>,
}

/// `⟨∏ τ_{a_i}(δ_i)⟩_g^{BG,c}`: expands every insertion in the idempotent
/// basis, then sums `ν_ρ^{1−g} ∏_i e_ρ(δ_i)` against the exact
/// Witten-Kontsevich integral.
pub fn gw_bg(algebra: &TwistedAlgebra, query: &GwQuery) -> Result<Cyclotomic> {
    let n = query.insertions.len();
    if n != query.exponents.len() {
        return Err(Error::InvalidInput("insertion and exponent counts differ".into()));
    }
    if n == 0 || 2 * query.genus + n <= 2 {
        return Err(Error::Unstable { genus: query.genus, points: n });
    }
    let psi = psi_integral(&PsiSpec::new(query.genus, query.exponents.clone()))?;
    if psi == Rational::from_integer(0.into()) {
        return Ok(Cyclotomic::zero());
    }
    let lambda = lambda_cohft(algebra, query.genus, &query.insertions)?;
    Ok(lambda.scale(&psi))
}

/// The degree-zero invariant `Λ_{g,n} = Σ_ρ (∏ e_ρ(δ_i)) ν_ρ^{1−g}`,
/// defined for every `g ≥ 0`, `n ≥ 1` (no stability needed without
/// descendants). Insertions must be central.
pub fn lambda_cohft(
    algebra: &TwistedAlgebra,
    genus: usize,
    insertions: &[AlgebraElement],
) -> Result<Cyclotomic> {
    if insertions.is_empty() {
        return Err(Error::InvalidInput("at least one insertion is required".into()));
    }
    let coords: Vec<Vec<Cyclotomic>> = insertions
        .iter()
        .map(|d| algebra.expand_in_idempotents(d))
        .collect::<Result<_>>()?;
    Ok(lambda_from_coords(algebra, genus, &coords.iter().collect::<Vec<_>>()))
}

fn lambda_from_coords(
    algebra: &TwistedAlgebra,
    genus: usize,
    coords: &[&Vec<Cyclotomic>],
) -> Cyclotomic {
    let mut total = Cyclotomic::zero();
    for rho in 0..algebra.irreps().len() {
        let mut term = Cyclotomic::from_rational(
            rat_pow(&algebra.nu(rho), 1 - genus as i64).expect("nu is positive"),
        );
        for c in coords {
            if term.is_zero() {
                break;
            }
            term = term.mul(&c[rho]);
        }
        total = total.add(&term);
    }
    total
}

/// Idempotent coordinates of the `c`-regular class sums, computed once per
/// algebra; the sweeps below evaluate `Λ` through this table.
struct ClassSumCoords {
    algebra: TwistedAlgebra,
    /// `coords[i][ρ]` for the i-th c-regular class.
    coords: Vec<Vec<Cyclotomic>>,
    /// centralizer orders of the c-regular class representatives
    centralizers: Vec<i64>,
    /// position of the inverse class within the c-regular list
    inverse_position: Vec<usize>,
}

impl ClassSumCoords {
    fn new(algebra: &TwistedAlgebra) -> Result<Self> {
        let regular = algebra.c_regular_class_indices().to_vec();
        let group = algebra.group().clone();
        let mut coords = Vec::with_capacity(regular.len());
        let mut centralizers = Vec::with_capacity(regular.len());
        let mut inverse_position = Vec::with_capacity(regular.len());
        for &ci in &regular {
            coords.push(algebra.expand_in_idempotents(&algebra.class_sum(ci))?);
            let rep = algebra.classes()[ci].representative;
            centralizers.push((group.order() / algebra.classes()[ci].size()) as i64);
            let inv_class = algebra.class_of(group.inv(rep));
            let pos = regular
                .iter()
                .position(|&cj| cj == inv_class)
                .ok_or_else(|| Error::Defect("inverse of a c-regular class is not c-regular".into()))?;
            inverse_position.push(pos);
        }
        Ok(ClassSumCoords { algebra: algebra.clone(), coords, centralizers, inverse_position })
    }

    fn count(&self) -> usize {
        self.coords.len()
    }

    /// `Λ_{g,n}` over the class sums at the given positions.
    fn lambda(&self, genus: usize, positions: &[usize]) -> Cyclotomic {
        let picked: Vec<&Vec<Cyclotomic>> = positions.iter().map(|&p| &self.coords[p]).collect();
        lambda_from_coords(&self.algebra, genus, &picked)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CohftRow {
    pub axiom: String,
    pub genus: usize,
    /// Positions within the c-regular class list.
    pub tuple: Vec<usize>,
    pub detail: String,
    pub lhs: Cyclotomic,
    pub rhs: Cyclotomic,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohftReport {
    pub rows: Vec<CohftRow>,
    pub all_pass: bool,
}

/// Checks the three CohFT gluing axioms — forgetting tails, cutting loops,
/// cutting edges — exactly, over all tuples of `c`-regular class sums with
/// `g ≤ max_g`, `n ≤ max_n`.
pub fn cohft_axioms_check(
    algebra: &TwistedAlgebra,
    max_g: usize,
    max_n: usize,
) -> Result<CohftReport> {
    let cache = ClassSumCoords::new(algebra)?;
    let k = cache.count();
    let mut rows = Vec::new();
    for genus in 0..=max_g {
        for n in 1..=max_n {
            for tuple in tuples(k, n) {
                let base = cache.lambda(genus, &tuple);
                // Forgetting tails: prepend the identity class sum
                // (position 0 — the identity class is always c-regular).
                let mut with_tail = vec![0usize];
                with_tail.extend_from_slice(&tuple);
                let tails = cache.lambda(genus, &with_tail);
                rows.push(CohftRow {
                    axiom: "forgetting-tails".into(),
                    genus,
                    tuple: tuple.clone(),
                    detail: String::new(),
                    lhs: base.clone(),
                    rhs: tails.clone(),
                    equal: base == tails,
                });
                // Cutting loops: Σ_{(g0)} |C(g0)| Λ_{g−1,n+2}((g0),(g0⁻¹),…).
                if genus >= 1 {
                    let mut sum = Cyclotomic::zero();
                    for z in 0..k {
                        let mut glued = vec![z, cache.inverse_position[z]];
                        glued.extend_from_slice(&tuple);
                        let term = cache.lambda(genus - 1, &glued);
                        sum = sum.add(&term.scale(&rat(cache.centralizers[z], 1)));
                    }
                    rows.push(CohftRow {
                        axiom: "cutting-loops".into(),
                        genus,
                        tuple: tuple.clone(),
                        detail: String::new(),
                        lhs: base.clone(),
                        rhs: sum.clone(),
                        equal: base == sum,
                    });
                }
                // Cutting edges over genus splits and bipartitions.
                for g1 in 0..=genus {
                    let g2 = genus - g1;
                    for mask in 0..(1u32 << n) {
                        let left: Vec<usize> =
                            (0..n).filter(|i| mask >> i & 1 == 1).map(|i| tuple[i]).collect();
                        let right: Vec<usize> =
                            (0..n).filter(|i| mask >> i & 1 == 0).map(|i| tuple[i]).collect();
                        let mut sum = Cyclotomic::zero();
                        for z in 0..k {
                            let mut a = left.clone();
                            a.push(z);
                            let mut b = vec![cache.inverse_position[z]];
                            b.extend_from_slice(&right);
                            let term = cache.lambda(g1, &a).mul(&cache.lambda(g2, &b));
                            sum = sum.add(&term.scale(&rat(cache.centralizers[z], 1)));
                        }
                        rows.push(CohftRow {
                            axiom: "cutting-edges".into(),
                            genus,
                            tuple: tuple.clone(),
                            detail: format!("split g={g1}+{g2}, mask={mask:b}"),
                            lhs: base.clone(),
                            rhs: sum.clone(),
                            equal: base == sum,
                        });
                    }
                }
            }
        }
    }
    let all_pass = rows.iter().all(|r| r.equal);
    Ok(CohftReport { rows, all_pass })
}

/// The center splitting of a group: `Z(G) → G → K` with the extracted
/// cocycle `ν` and one twisted algebra `C*(K, λ∘ν)` per character `λ` of
/// the center.
pub struct GerbeSplitting {
    pub group: FiniteGroup,
    pub untwisted: TwistedAlgebra,
    pub ext: CentralExtensionData,
    pub nu: TwoCocycleA,
    pub sectors: Vec<Sector>,
}

pub struct Sector {
    /// Dual exponents of `λ` against the cyclic factors of the center.
    pub lambda: Vec<u64>,
    pub algebra: TwistedAlgebra,
}

impl GerbeSplitting {
    pub fn new(group: &FiniteGroup) -> Result<Self> {
        let z = group.center();
        let (ext, nu) = extract_cocycle(group, &z)?;
        let z_order = ext.fiber_order() as u64;
        let mut sectors = Vec::with_capacity(z_order as usize);
        for flat in 0..z_order {
            let lambda = unflatten(&ext.fiber_factors, flat);
            let pushed = nu.push_by_character(&lambda)?;
            sectors.push(Sector { lambda, algebra: TwistedAlgebra::new(pushed)? });
        }
        Ok(GerbeSplitting {
            group: group.clone(),
            untwisted: TwistedAlgebra::untwisted(group.clone())?,
            ext,
            nu,
            sectors,
        })
    }

    pub fn center_order(&self) -> usize {
        self.ext.fiber_order()
    }

    /// The `λ`-sector of the transform `I`:
    /// `I_λ(δ)(k) = Σ_{z∈Z} δ(z·s(k)) λ(z)`, verified central in
    /// `C*(K, λ∘ν)`.
    pub fn transform_i(&self, sector: usize, delta: &AlgebraElement) -> Result<AlgebraElement> {
        if *delta.algebra() != self.untwisted {
            return Err(Error::MismatchedAlgebras);
        }
        let sec = &self.sectors[sector];
        let k_order = self.ext.quotient.order();
        let mut items = Vec::with_capacity(k_order);
        for k in 0..k_order {
            let mut coeff = Cyclotomic::zero();
            for flat in 0..self.ext.fiber_order() as u64 {
                let z = self.ext.fiber_embed[flat as usize];
                let g_elt = self.group.mul(z, self.ext.section[k]);
                let term = delta
                    .coeff(g_elt)
                    .mul(&character_value(&self.ext.fiber_factors, &sec.lambda, flat));
                coeff = coeff.add(&term);
            }
            items.push((k, coeff));
        }
        let out = sec.algebra.element_from_iter(items);
        if !sec.algebra.is_central(&out)? {
            return Err(Error::Defect("transform I produced a non-central element".into()));
        }
        Ok(out)
    }

    /// All sectors at once, in sector order.
    pub fn transform_i_all(&self, delta: &AlgebraElement) -> Result<Vec<AlgebraElement>> {
        (0..self.sectors.len()).map(|s| self.transform_i(s, delta)).collect()
    }

    /// The inverse transform:
    /// `J({β_λ})(z·s(k)) = (1/|Z|) Σ_λ β_λ(k) λ(z)⁻¹`.
    pub fn transform_j(&self, sectors: &[AlgebraElement]) -> Result<AlgebraElement> {
        if sectors.len() != self.sectors.len() {
            return Err(Error::InvalidInput("one sector element per center character required".into()));
        }
        for (beta, sec) in sectors.iter().zip(&self.sectors) {
            if *beta.algebra() != sec.algebra {
                return Err(Error::MismatchedAlgebras);
            }
            if !sec.algebra.is_central(beta)? {
                return Err(Error::NonCentralInsertion);
            }
        }
        let scale = rat(1, self.center_order() as i64);
        let mut items = Vec::with_capacity(self.group.order());
        for x in 0..self.group.order() {
            let (a_flat, k) = self.ext.decompose(x);
            let mut coeff = Cyclotomic::zero();
            for (beta, sec) in sectors.iter().zip(&self.sectors) {
                let lam = character_value(&self.ext.fiber_factors, &sec.lambda, a_flat as u64);
                coeff = coeff.add(&beta.coeff(k).mul(&lam.conj()));
            }
            items.push((x, coeff.scale(&scale)));
        }
        Ok(self.untwisted.element_from_iter(items))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowCollection {
    All,
    FailuresOnly,
}

#[derive(Clone, Debug)]
pub struct DecompositionOptions {
    pub max_genus: usize,
    pub max_points: usize,
    /// Cap on `2g + n`; `None` applies no cap beyond the ranges above.
    pub sum_cap: Option<usize>,
    /// Cap on the number of descendant exponent tuples per `(g, n)`.
    pub descendant_budget: usize,
    pub collect: RowCollection,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        DecompositionOptions {
            max_genus: 1,
            max_points: 3,
            sum_cap: None,
            descendant_budget: usize::MAX,
            collect: RowCollection::All,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionRow {
    pub genus: usize,
    /// Class indices of the class-sum insertions.
    pub insertions: Vec<usize>,
    pub exponents: Vec<usize>,
    pub lhs: Cyclotomic,
    pub rhs_abelian: Cyclotomic,
    pub rhs_full: Cyclotomic,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub group_order: usize,
    pub center_order: usize,
    pub sector_count: usize,
    pub total_rows: usize,
    pub failures: usize,
    pub rows: Vec<DecompositionRow>,
}

impl DecompositionReport {
    pub fn all_equal(&self) -> bool {
        self.failures == 0
    }
}

/// Verifies the decomposition identity on `BG`: for class-sum insertion
/// tuples and every admissible descendant tuple,
/// `⟨∏τ_{a_j}(δ_j)⟩^{BG}` (untwisted) equals both the center route
/// `Σ_λ (1/|Z|)^{2−2g} ⟨∏τ_{a_j}(I_λ δ_j)⟩^{BK, λ∘ν}` and the full-dual
/// route `Σ_ρ (dim V_ρ/|G|)^{2−2g} (∏_j e_ρ(δ_j)) ∫∏ψ^{a_j}`.
pub fn verify_decomposition(
    group: &FiniteGroup,
    opts: &DecompositionOptions,
) -> Result<DecompositionReport> {
    let split = GerbeSplitting::new(group)?;
    let untwisted = &split.untwisted;
    let class_count = untwisted.classes().len();
    let order = group.order() as i64;

    // Coordinates of every class sum: in C*(G), and of its I-transform in
    // every sector algebra.
    let mut full_coords = Vec::with_capacity(class_count);
    let mut sector_coords: Vec<Vec<Vec<Cyclotomic>>> =
        vec![Vec::with_capacity(class_count); split.sectors.len()];
    for ci in 0..class_count {
        let delta = untwisted.class_sum(ci);
        full_coords.push(untwisted.expand_in_idempotents(&delta)?);
        for (s, sec) in split.sectors.iter().enumerate() {
            let transformed = split.transform_i(s, &delta)?;
            sector_coords[s].push(sec.algebra.expand_in_idempotents(&transformed)?);
        }
    }

    let mut rows = Vec::new();
    let mut total_rows = 0usize;
    let mut failures = 0usize;
    for genus in 0..=opts.max_genus {
        for n in 1..=opts.max_points {
            if 2 * genus + n <= 2 {
                continue;
            }
            if let Some(cap) = opts.sum_cap {
                if 2 * genus + n > cap {
                    continue;
                }
            }
            let dimension = 3 * genus + n - 3;
            let mut exponent_tuples = tuples_with_sum(n, dimension);
            exponent_tuples.truncate(opts.descendant_budget);
            let psis: Vec<Rational> = exponent_tuples
                .iter()
                .map(|a| psi_integral(&PsiSpec::new(genus, a.clone())))
                .collect::<Result<_>>()?;
            let center_weight = rat_pow(&rat(1, split.center_order() as i64), 2 - 2 * genus as i64)?;

            for tuple in tuples(class_count, n) {
                // Λ for the untwisted side.
                let picked: Vec<&Vec<Cyclotomic>> =
                    tuple.iter().map(|&c| &full_coords[c]).collect();
                let lambda_lhs = lambda_from_coords(untwisted, genus, &picked);
                // Full-dual route: Σ_ρ (dim/|G|)^{2−2g} ∏ e_ρ.
                let mut lambda_full = Cyclotomic::zero();
                for (rho, irrep) in untwisted.irreps().iter().enumerate() {
                    let mut term = Cyclotomic::from_rational(rat_pow(
                        &rat(irrep.dim as i64, order),
                        2 - 2 * genus as i64,
                    )?);
                    for c in &picked {
                        term = term.mul(&c[rho]);
                    }
                    lambda_full = lambda_full.add(&term);
                }
                // Center route: Σ_λ (1/|Z|)^{2−2g} Λ^{sector}.
                let mut lambda_ab = Cyclotomic::zero();
                for (s, sec) in split.sectors.iter().enumerate() {
                    let picked_s: Vec<&Vec<Cyclotomic>> =
                        tuple.iter().map(|&c| &sector_coords[s][c]).collect();
                    let sector_lambda = lambda_from_coords(&sec.algebra, genus, &picked_s);
                    lambda_ab = lambda_ab.add(&sector_lambda.scale(&center_weight));
                }

                for (a, psi) in exponent_tuples.iter().zip(&psis) {
                    let lhs = lambda_lhs.scale(psi);
                    let rhs_full = lambda_full.scale(psi);
                    let rhs_abelian = lambda_ab.scale(psi);
                    let equal = lhs == rhs_abelian && lhs == rhs_full;
                    total_rows += 1;
                    if !equal {
                        failures += 1;
                    }
                    if opts.collect == RowCollection::All || !equal {
                        rows.push(DecompositionRow {
                            genus,
                            insertions: tuple.clone(),
                            exponents: a.clone(),
                            lhs,
                            rhs_abelian,
                            rhs_full,
                            equal,
                        });
                    }
                }
            }
        }
    }
    Ok(DecompositionReport {
        group_order: group.order(),
        center_order: split.center_order(),
        sector_count: split.sectors.len(),
        total_rows,
        failures,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductRow {
    pub kind: String,
    pub genus: usize,
    pub exponents: Vec<usize>,
    pub detail: String,
    pub lhs: Cyclotomic,
    pub rhs: Cyclotomic,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    pub total_rows: usize,
    pub failures: usize,
    pub rows: Vec<ProductRow>,
}

impl ProductReport {
    pub fn all_equal(&self) -> bool {
        self.failures == 0
    }
}

/// Verifies the product identities on `(K_1 × K_2, c_1 ⊠ c_2)`:
/// idempotent insertions `α_i ⊗ f_{ρ_i}` reduce to
/// `(dim V_ρ/|K_2|)^{2−2g} ⟨∏τ(α_i)⟩^{K_1,c_1}` when all `ρ_i` agree and
/// vanish otherwise; class-sum insertions `α_i ⊗ 1_{(h_i)}` factor through
/// `Λ^{K_2,c_2}`.
pub fn verify_product(
    left: &TwistedAlgebra,
    right: &TwistedAlgebra,
    max_g: usize,
    max_n: usize,
    descendant_budget: usize,
    collect: RowCollection,
) -> Result<ProductReport> {
    let product_cocycle = product_cocycle(left.cocycle(), right.cocycle())?;
    let product = TwistedAlgebra::new(product_cocycle)?;
    let right_order = right.group().order();

    // Tensor an element of the left algebra with one of the right algebra.
    let tensor = |a: &AlgebraElement, b: &AlgebraElement| -> AlgebraElement {
        let mut items = Vec::new();
        for (&x, cx) in a.coeffs() {
            for (&y, cy) in b.coeffs() {
                items.push((x * right_order + y, cx.mul(cy)));
            }
        }
        product.element_from_iter(items)
    };

    let left_basis = left.center_basis()?;
    let left_positions: Vec<usize> = (0..left_basis.len()).collect();
    let right_idempotents: Vec<AlgebraElement> =
        (0..right.irreps().len()).map(|r| right.idempotent(r)).collect();
    let right_basis = right.center_basis()?;

    let mut rows = Vec::new();
    let mut total_rows = 0usize;
    let mut failures = 0usize;
    let mut push = |row: ProductRow| {
        total_rows += 1;
        if !row.equal {
            failures += 1;
        }
        if collect == RowCollection::All || !row.equal {
            rows.push(row);
        }
    };

    for genus in 0..=max_g {
        for n in 1..=max_n {
            if 2 * genus + n <= 2 {
                continue;
            }
            let dimension = 3 * genus + n - 3;
            let mut exponent_tuples = tuples_with_sum(n, dimension);
            exponent_tuples.truncate(descendant_budget);

            for alpha_tuple in tuples(left_positions.len(), n) {
                let alphas: Vec<&AlgebraElement> =
                    alpha_tuple.iter().map(|&i| &left_basis[i]).collect();
                // Idempotent form over all ρ-tuples (mixed ones must vanish).
                for rho_tuple in tuples(right_idempotents.len(), n) {
                    let insertions: Vec<AlgebraElement> = alphas
                        .iter()
                        .zip(&rho_tuple)
                        .map(|(a, &r)| tensor(a, &right_idempotents[r]))
                        .collect();
                    let all_same = rho_tuple.iter().all(|&r| r == rho_tuple[0]);
                    for a in &exponent_tuples {
                        let lhs = gw_bg(
                            &product,
                            &GwQuery {
                                genus,
                                insertions: insertions.clone(),
                                exponents: a.clone(),
                            },
                        )?;
                        let rhs = if all_same {
                            let weight = rat_pow(
                                &rat(right.irreps()[rho_tuple[0]].dim as i64, right_order as i64),
                                2 - 2 * genus as i64,
                            )?;
                            gw_bg(
                                left,
                                &GwQuery {
                                    genus,
                                    insertions: alphas.iter().map(|a| (*a).clone()).collect(),
                                    exponents: a.clone(),
                                },
                            )?
                            .scale(&weight)
                        } else {
                            Cyclotomic::zero()
                        };
                        push(ProductRow {
                            kind: "idempotent".into(),
                            genus,
                            exponents: a.clone(),
                            detail: format!("alpha={alpha_tuple:?} rho={rho_tuple:?}"),
                            equal: lhs == rhs,
                            lhs,
                            rhs,
                        });
                    }
                }
                // Class-sum form: ⟨∏τ(α_i ⊗ 1_{(h_i)})⟩ =
                // ⟨∏τ(α_i)⟩ · Λ^{K_2,c_2}(1_{(h_1)},…,1_{(h_n)}).
                for h_tuple in tuples(right_basis.len(), n) {
                    let insertions: Vec<AlgebraElement> = alphas
                        .iter()
                        .zip(&h_tuple)
                        .map(|(a, &h)| tensor(a, &right_basis[h]))
                        .collect();
                    let lambda_right = lambda_cohft(
                        right,
                        genus,
                        &h_tuple.iter().map(|&h| right_basis[h].clone()).collect::<Vec<_>>(),
                    )?;
                    for a in &exponent_tuples {
                        let lhs = gw_bg(
                            &product,
                            &GwQuery {
                                genus,
                                insertions: insertions.clone(),
                                exponents: a.clone(),
                            },
                        )?;
                        let rhs = gw_bg(
                            left,
                            &GwQuery {
                                genus,
                                insertions: alphas.iter().map(|x| (*x).clone()).collect(),
                                exponents: a.clone(),
                            },
                        )?
                        .mul(&lambda_right);
                        push(ProductRow {
                            kind: "class-sum".into(),
                            genus,
                            exponents: a.clone(),
                            detail: format!("alpha={alpha_tuple:?} h={h_tuple:?}"),
                            equal: lhs == rhs,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
    }
    Ok(ProductReport { total_rows, failures, rows })
}

/// All `n`-tuples over `0..k`, lexicographic.
fn tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    loop {
        out.push(current.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            current[i] += 1;
            if current[i] < k {
                break;
            }
            current[i] = 0;
        }
    }
}

/// All `n`-tuples of nonnegative integers with the given sum, lexicographic.
fn tuples_with_sum(n: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            rec(n - 1, total - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, total, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin;

    fn untwisted(name: &str) -> TwistedAlgebra {
        TwistedAlgebra::untwisted(builtin(name).unwrap()).unwrap()
    }

    fn twisted_v4() -> TwistedAlgebra {
        let q8 = builtin("Q8").unwrap();
        let (_, nu) = extract_cocycle(&q8, &q8.center()).unwrap();
        TwistedAlgebra::new(nu.push_by_character(&[1]).unwrap()).unwrap()
    }

    #[test]
    fn invariants_of_idempotent_insertions() {
        for alg in [untwisted("C2"), untwisted("S3"), untwisted("Q8"), twisted_v4()] {
            for rho in 0..alg.irreps().len() {
                let f = alg.idempotent(rho);
                let value = gw_bg(
                    &alg,
                    &GwQuery {
                        genus: 0,
                        insertions: vec![f.clone(), f.clone(), f.clone()],
                        exponents: vec![0, 0, 0],
                    },
                )
                .unwrap();
                assert_eq!(value, Cyclotomic::from_rational(alg.nu(rho)));
                // Mixed idempotents vanish.
                for sigma in 0..alg.irreps().len() {
                    if sigma == rho {
                        continue;
                    }
                    let g = alg.idempotent(sigma);
                    let mixed = gw_bg(
                        &alg,
                        &GwQuery {
                            genus: 0,
                            insertions: vec![f.clone(), g.clone(), g.clone()],
                            exponents: vec![0, 0, 0],
                        },
                    )
                    .unwrap();
                    assert!(mixed.is_zero());
                }
            }
        }
        // Trivial group: ⟨τ_0(e)³⟩_0 = 1.
        let triv = untwisted("C1");
        let e = triv.identity();
        let v = gw_bg(
            &triv,
            &GwQuery { genus: 0, insertions: vec![e.clone(), e.clone(), e], exponents: vec![0, 0, 0] },
        )
        .unwrap();
        assert!(v.is_one());
    }

    #[test]
    fn class_sum_insertions_match_counting() {
        // ⟨∏τ_{a_j}(1_{(g_j)})⟩_g = Ω_g((g_1),…,(g_n)) · ∫∏ψ^{a_j}.
        use crate::counting::{Counter, SurfaceGroupInstance};
        for name in ["C4", "S3", "Q8"] {
            let alg = untwisted(name);
            let counter = Counter::new(alg.group()).unwrap();
            let r = alg.classes().len();
            for genus in 1..=2usize {
                for k1 in 0..r {
                    for k2 in 0..r {
                        let insertions = vec![alg.class_sum(k1), alg.class_sum(k2)];
                        for a in tuples_with_sum(2, 3 * genus + 2 - 3) {
                            let gw = gw_bg(
                                &alg,
                                &GwQuery { genus, insertions: insertions.clone(), exponents: a.clone() },
                            )
                            .unwrap();
                            let omega = counter
                                .omega(&SurfaceGroupInstance::untwisted(genus, vec![k1, k2]))
                                .unwrap();
                            let psi =
                                psi_integral(&PsiSpec::new(genus, a.clone())).unwrap();
                            assert_eq!(
                                gw,
                                Cyclotomic::from_rational(omega * psi),
                                "{name} g={genus} classes=({k1},{k2}) a={a:?}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn multilinearity() {
        let alg = untwisted("S3");
        let a = alg.class_sum(1);
        let b = alg.class_sum(2);
        let scaled = a.scale(&rat(3, 7));
        let q = |ins: Vec<AlgebraElement>| {
            gw_bg(&alg, &GwQuery { genus: 1, insertions: ins, exponents: vec![1, 0] }).unwrap()
        };
        let base = q(vec![a.clone(), b.clone()]);
        assert_eq!(q(vec![scaled, b.clone()]), base.scale(&rat(3, 7)));
        let sum = q(vec![a.add(&b), b.clone()]);
        assert_eq!(sum, base.add(&q(vec![b.clone(), b.clone()])));
    }

    #[test]
    fn lambda_unchanged_by_identity_insertion() {
        for alg in [untwisted("S3"), twisted_v4()] {
            let basis = alg.center_basis().unwrap();
            for genus in 0..=2usize {
                for b in &basis {
                    let lhs = lambda_cohft(&alg, genus, std::slice::from_ref(b)).unwrap();
                    let rhs =
                        lambda_cohft(&alg, genus, &[alg.identity(), b.clone()]).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn lambda_burnside() {
        // Λ_{1,1}(1_{(1)}) over the untwisted algebra counts classes.
        for name in ["C2", "S3", "Q8", "A4"] {
            let alg = untwisted(name);
            let v = lambda_cohft(&alg, 1, &[alg.class_sum(0)]).unwrap();
            assert_eq!(v, Cyclotomic::from_int(alg.classes().len() as i64), "{name}");
        }
    }

    #[test]
    fn cohft_axioms_small() {
        for alg in [untwisted("C1"), untwisted("C2"), untwisted("S3"), twisted_v4()] {
            let report = cohft_axioms_check(&alg, 2, 2).unwrap();
            assert!(report.all_pass);
        }
    }

    #[test]
    fn transform_round_trips() {
        use rand::{Rng, SeedableRng};
        for name in ["Q8", "D4", "C4", "C2xC2"] {
            let group = builtin(name).unwrap();
            let split = GerbeSplitting::new(&group).unwrap();
            let basis = split.untwisted.center_basis().unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            for _ in 0..20 {
                let mut delta = split.untwisted.zero();
                for b in &basis {
                    let num = rng.gen_range(-6i64..=6);
                    let den = rng.gen_range(1i64..=4);
                    delta = delta.add(&b.scale(&rat(num, den)));
                }
                let sectors = split.transform_i_all(&delta).unwrap();
                let back = split.transform_j(&sectors).unwrap();
                assert_eq!(back, delta, "{name}: J∘I = id");
                // I∘J = id sector-wise.
                let again = split.transform_i_all(&back).unwrap();
                for (a, b) in again.iter().zip(&sectors) {
                    assert_eq!(a, b, "{name}: I∘J = id");
                }
            }
        }
    }

    #[test]
    fn transform_i_sends_idempotents_to_single_sectors() {
        let group = builtin("Q8").unwrap();
        let split = GerbeSplitting::new(&group).unwrap();
        for rho in 0..split.untwisted.irreps().len() {
            let f = split.untwisted.idempotent(rho);
            let sectors = split.transform_i_all(&f).unwrap();
            let nonzero: Vec<usize> =
                (0..sectors.len()).filter(|&s| !sectors[s].is_zero()).collect();
            assert_eq!(nonzero.len(), 1, "idempotent lands in exactly one sector");
            // And the image is one of that sector's idempotents.
            let s = nonzero[0];
            let img = &sectors[s];
            let alg = &split.sectors[s].algebra;
            let matches = (0..alg.irreps().len()).any(|r| alg.idempotent(r) == *img);
            assert!(matches, "image is a sector idempotent");
        }
    }

    #[test]
    fn decomposition_on_small_ranges() {
        for name in ["Q8", "D4"] {
            let group = builtin(name).unwrap();
            let report = verify_decomposition(
                &group,
                &DecompositionOptions {
                    max_genus: 1,
                    max_points: 3,
                    sum_cap: None,
                    descendant_budget: usize::MAX,
                    collect: RowCollection::FailuresOnly,
                },
            )
            .unwrap();
            assert!(report.all_equal(), "{name}: {} failures", report.failures);
            assert!(report.total_rows > 0);
        }
        // Abelian group: both routes collapse; still exact.
        let report = verify_decomposition(
            &builtin("C6").unwrap(),
            &DecompositionOptions::default(),
        )
        .unwrap();
        assert!(report.all_equal());
    }

    #[test]
    fn decomposition_rows_match_direct_gw() {
        // The factored sweep agrees with direct gw_bg evaluation.
        let group = builtin("Q8").unwrap();
        let split = GerbeSplitting::new(&group).unwrap();
        let alg = &split.untwisted;
        let report = verify_decomposition(
            &group,
            &DecompositionOptions { max_genus: 1, max_points: 2, ..Default::default() },
        )
        .unwrap();
        for row in report.rows.iter().take(40) {
            let insertions: Vec<AlgebraElement> =
                row.insertions.iter().map(|&c| alg.class_sum(c)).collect();
            let direct = gw_bg(
                alg,
                &GwQuery { genus: row.genus, insertions, exponents: row.exponents.clone() },
            )
            .unwrap();
            assert_eq!(direct, row.lhs);
        }
    }

    #[test]
    fn product_identities_small() {
        let c2 = untwisted("C2");
        let v4t = twisted_v4();
        let report = verify_product(&c2, &v4t, 1, 2, usize::MAX, RowCollection::FailuresOnly).unwrap();
        assert!(report.all_equal(), "{} failures", report.failures);
        // An untwisted right factor exercises the mixed-ρ zero branch.
        let s3 = untwisted("S3");
        let report = verify_product(&c2, &s3, 1, 2, 4, RowCollection::FailuresOnly).unwrap();
        assert!(report.all_equal(), "{} failures", report.failures);
        // Trivial right factor: identity check.
        let triv = untwisted("C1");
        let report = verify_product(&s3, &triv, 1, 2, usize::MAX, RowCollection::FailuresOnly).unwrap();
        assert!(report.all_equal());
    }

    #[test]
    fn unstable_queries_rejected() {
        let alg = untwisted("C2");
        let e = alg.identity();
        assert!(matches!(
            gw_bg(&alg, &GwQuery { genus: 0, insertions: vec![e.clone()], exponents: vec![0] }),
            Err(Error::Unstable { .. })
        ));
        let x = alg.single(1);
        // Central in C2 (abelian), but a non-central element elsewhere fails.
        let s3 = untwisted("S3");
        let bad = s3.single(1);
        assert!(gw_bg(
            &s3,
            &GwQuery { genus: 1, insertions: vec![bad], exponents: vec![1] }
        )
        .is_err());
        let _ = x;
    }
}
