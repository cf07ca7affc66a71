//! Normalized counts of surface-group representation tuples: the number of
//! solutions of `∏[α_i,β_i] = c·σ_1⋯σ_n` with `σ_j` in prescribed
//! conjugacy classes, divided by `|G|`. Two independent routes are
//! provided: the exact character-sum formula and a direct enumeration
//! oracle. On top of these sit the fiber-class decomposition of central
//! extensions, the aggregated degree formula, and the loop/edge gluing
//! identities.

use serde::Serialize;

use crate::chartab::CharacterTable;
use crate::cocycle::CentralExtensionData;
use crate::cyclotomic::Cyclotomic;
use crate::error::Error;
use crate::group::FiniteGroup;
use crate::rational::{rat, rat_pow, rat_to_string, Rational};
use crate::Result;

/// Default cap on enumerated tuples for the brute-force oracle.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

/// A counting query: genus, one conjugacy class per marked point, and a
/// central twist element (identity for the untwisted count).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceGroupInstance {
    pub genus: usize,
    pub class_indices: Vec<usize>,
    pub central_twist: usize,
}

impl SurfaceGroupInstance {
    pub fn untwisted(genus: usize, class_indices: Vec<usize>) -> Self {
        SurfaceGroupInstance { genus, class_indices, central_twist: 0 }
    }
}

/// Counting engine for one fixed group; owns its character table.
pub struct Counter {
    table: CharacterTable,
}

impl Counter {
    pub fn new(group: &FiniteGroup) -> Result<Self> {
        Ok(Counter { table: CharacterTable::compute(group)? })
    }

    pub fn from_table(table: CharacterTable) -> Self {
        Counter { table }
    }

    pub fn group(&self) -> &FiniteGroup {
        self.table.group()
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn class_count(&self) -> usize {
        self.table.classes().len()
    }

    fn check_instance(&self, inst: &SurfaceGroupInstance) -> Result<()> {
        let g = self.group();
        if inst.class_indices.is_empty() {
            return Err(Error::InvalidInput("at least one marked point is required".into()));
        }
        if inst.class_indices.iter().any(|&c| c >= self.class_count()) {
            return Err(Error::InvalidInput("class index out of range".into()));
        }
        if inst.central_twist >= g.order() {
            return Err(Error::InvalidInput("central twist out of range".into()));
        }
        if (0..g.order()).any(|x| g.mul(inst.central_twist, x) != g.mul(x, inst.central_twist)) {
            return Err(Error::NotCentral(inst.central_twist));
        }
        Ok(())
    }

    /// `Ω_{g,c}` by the character formula
    /// `(1/∏|C(g_j)|) Σ_α α_c (∏_j χ_α(g_j)) (dim V_α/|G|)^{2−2g−n}`.
    /// The imaginary parts cancel exactly; a non-rational sum is a defect.
    pub fn omega(&self, inst: &SurfaceGroupInstance) -> Result<Rational> {
        self.check_instance(inst)?;
        let g = self.group();
        let order = g.order() as i64;
        let n = inst.class_indices.len();
        let exponent = 2 - 2 * inst.genus as i64 - n as i64;
        let mut sum = Cyclotomic::zero();
        for (alpha, irrep) in self.table.irreps().iter().enumerate() {
            let alpha_c = self.table.central_character(alpha, inst.central_twist)?;
            let mut term = alpha_c;
            for &k in &inst.class_indices {
                term = term.mul(&self.table.value(alpha, k));
            }
            let weight = rat_pow(&rat(irrep.dim as i64, order), exponent)?;
            sum = sum.add(&term.scale(&weight));
        }
        let mut value = sum
            .to_rational()
            .ok_or_else(|| Error::Defect("character sum is not rational".into()))?;
        for &k in &inst.class_indices {
            let centralizer = order / self.table.classes()[k].size() as i64;
            value /= Rational::from_integer(centralizer.into());
        }
        Ok(value)
    }

    /// The defining enumeration: counts tuples
    /// `(α_1,…,α_g,β_1,…,β_g,σ_1,…,σ_n)` with `∏[α_i,β_i] = c·∏σ_j` and
    /// `σ_j ∈ (g_j)`, divided by `|G|`. The last `σ` is determined by the
    /// relation, so the scan runs over `|G|^{2g}·∏_{j<n}|(g_j)|` tuples.
    pub fn omega_brute_force(&self, inst: &SurfaceGroupInstance, cap: u64) -> Result<Rational> {
        self.check_instance(inst)?;
        let g = self.group();
        let order = g.order() as u64;
        let n = inst.class_indices.len();
        let mut work = 1u64;
        for _ in 0..2 * inst.genus {
            work = work
                .checked_mul(order)
                .filter(|&w| w <= cap)
                .ok_or_else(|| Error::CapExceeded("enumeration exceeds tuple cap".into()))?;
        }
        for &k in &inst.class_indices[..n - 1] {
            work = work
                .checked_mul(self.table.classes()[k].size() as u64)
                .filter(|&w| w <= cap)
                .ok_or_else(|| Error::CapExceeded("enumeration exceeds tuple cap".into()))?;
        }

        let last_class = &self.table.classes()[inst.class_indices[n - 1]];
        let mut in_last = vec![false; g.order()];
        for &m in &last_class.members {
            in_last[m] = true;
        }

        // Commutator part outer, class members inner.
        let mut count = 0u64;
        let mut commutator_stack = vec![0usize];
        enumerate_commutators(g, inst.genus, 0, &mut commutator_stack, &mut |p| {
            // p = ∏[α_i, β_i]; now scan σ_1..σ_{n−1} and solve for σ_n:
            // σ_n = (c σ_1 ⋯ σ_{n−1})⁻¹ p.
            let c = inst.central_twist;
            let mut partial = vec![g.mul(c, 0); 1];
            count += count_sigma(
                g,
                &self.table,
                &inst.class_indices[..n - 1],
                &in_last,
                p,
                &mut partial,
            );
        });
        Ok(rat(count as i64, g.order() as i64))
    }

    /// Aggregated degree: `Σ_{(g_1)∈𝗅_1,…,(g_n)∈𝗅_n} Ω_{g,c}((g_1),…,(g_n))`,
    /// evaluated through the character form, which factorizes per irrep.
    pub fn degree(&self, genus: usize, selections: &[Vec<usize>], central: usize) -> Result<Rational> {
        if selections.is_empty() {
            return Err(Error::InvalidInput("at least one marked point is required".into()));
        }
        let g = self.group();
        let order = g.order() as i64;
        if (0..g.order()).any(|x| g.mul(central, x) != g.mul(x, central)) {
            return Err(Error::NotCentral(central));
        }
        for sel in selections {
            if sel.is_empty() {
                return Err(Error::InvalidInput("empty class selection".into()));
            }
            if sel.iter().any(|&c| c >= self.class_count()) {
                return Err(Error::InvalidInput("class index out of range".into()));
            }
        }
        let exponent = 2 - 2 * genus as i64;
        let mut sum = Cyclotomic::zero();
        for (alpha, irrep) in self.table.irreps().iter().enumerate() {
            let alpha_c = self.table.central_character(alpha, central)?;
            let weight = rat_pow(&rat(irrep.dim as i64, order), exponent)?;
            let mut term = alpha_c.scale(&weight);
            for sel in selections {
                let mut slot = Cyclotomic::zero();
                for &k in sel {
                    let size = self.table.classes()[k].size() as i64;
                    slot = slot.add(
                        &self.table.value(alpha, k).scale(&rat(size, irrep.dim as i64)),
                    );
                }
                term = term.mul(&slot);
            }
            sum = sum.add(&term);
        }
        sum.to_rational().ok_or_else(|| Error::Defect("degree sum is not rational".into()))
    }

    /// Abelian closed form `(1/|G|)^{1−2g} · #{g_i ∈ 𝗅_i : g_1⋯g_n c = 1}`;
    /// classes are singletons, so selections are read as element sets.
    pub fn degree_abelian_count(
        &self,
        genus: usize,
        selections: &[Vec<usize>],
        central: usize,
    ) -> Result<Rational> {
        let g = self.group();
        if !g.is_abelian() {
            return Err(Error::InvalidInput("closed form requires an abelian group".into()));
        }
        let elements: Vec<Vec<usize>> = selections
            .iter()
            .map(|sel| sel.iter().map(|&k| self.table.classes()[k].representative).collect())
            .collect();
        let mut count = 0u64;
        let mut stack = Vec::new();
        count_products(g, &elements, central, 0, &mut stack, &mut count);
        let weight = rat_pow(&rat(1, g.order() as i64), 1 - 2 * genus as i64)?;
        Ok(weight * Rational::from_integer(count.into()))
    }

    /// Checks the loop-gluing identity
    /// `Σ_{(ζ)} |C(ζ)| Ω_{g−1}(…,(ζ),(ζ⁻¹)) = Ω_g(…)` and the separating
    /// splits `Σ_{(ζ)} |C(ζ)| Ω_{g1}(A,(ζ)) Ω_{g2}((ζ⁻¹),B) = Ω_g(A∪B)`.
    pub fn gluing_check(&self, genus: usize, class_indices: &[usize]) -> Result<GluingReport> {
        if genus == 0 {
            return Err(Error::InvalidInput("gluing checks need genus at least one".into()));
        }
        let g = self.group();
        let r = self.class_count();
        let inv_class: Vec<usize> = (0..r)
            .map(|k| {
                let rep = self.table.classes()[k].representative;
                self.table.class_of(g.inv(rep))
            })
            .collect();
        let centralizer_size =
            |k: usize| (g.order() / self.table.classes()[k].size()) as i64;

        let mut rows = Vec::new();
        let target = self.omega(&SurfaceGroupInstance::untwisted(genus, class_indices.to_vec()))?;

        // Loop gluing.
        let mut loop_sum = Rational::from_integer(0.into());
        for zeta in 0..r {
            let mut classes = class_indices.to_vec();
            classes.push(zeta);
            classes.push(inv_class[zeta]);
            let omega = self.omega(&SurfaceGroupInstance::untwisted(genus - 1, classes))?;
            loop_sum += Rational::from_integer(centralizer_size(zeta).into()) * omega;
        }
        rows.push(GluingRow {
            kind: "loop".into(),
            detail: format!("genus {genus} -> {}", genus - 1),
            lhs: rat_to_string(&loop_sum),
            rhs: rat_to_string(&target),
            equal: loop_sum == target,
        });

        // Separating splits over genus and insertions.
        let n = class_indices.len();
        for g1 in 0..=genus {
            let g2 = genus - g1;
            for mask in 0..(1u32 << n) {
                let left: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| class_indices[i]).collect();
                let right: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).map(|i| class_indices[i]).collect();
                let mut edge_sum = Rational::from_integer(0.into());
                for zeta in 0..r {
                    let mut a = left.clone();
                    a.push(zeta);
                    let mut b = vec![inv_class[zeta]];
                    b.extend_from_slice(&right);
                    let oa = self.omega(&SurfaceGroupInstance::untwisted(g1, a))?;
                    let ob = self.omega(&SurfaceGroupInstance::untwisted(g2, b))?;
                    edge_sum += Rational::from_integer(centralizer_size(zeta).into()) * oa * ob;
                }
                rows.push(GluingRow {
                    kind: "edge".into(),
                    detail: format!("genus {g1}+{g2}, split mask {mask:b}"),
                    lhs: rat_to_string(&edge_sum),
                    rhs: rat_to_string(&target),
                    equal: edge_sum == target,
                });
            }
        }
        let all_equal = rows.iter().all(|r| r.equal);
        Ok(GluingReport { rows, all_equal })
    }
}

fn enumerate_commutators(
    g: &FiniteGroup,
    genus: usize,
    depth: usize,
    products: &mut Vec<usize>,
    visit: &mut impl FnMut(usize),
) {
    if depth == genus {
        visit(*products.last().unwrap());
        return;
    }
    let current = *products.last().unwrap();
    for a in 0..g.order() {
        for b in 0..g.order() {
            products.push(g.mul(current, g.commutator(a, b)));
            enumerate_commutators(g, genus, depth + 1, products, visit);
            products.pop();
        }
    }
}

/// Counts completions `σ_1,…,σ_n` with `σ_j` in the prescribed classes and
/// `c·σ_1⋯σ_n = p`; the final `σ` is forced and tested by membership.
fn count_sigma(
    g: &FiniteGroup,
    table: &CharacterTable,
    free_classes: &[usize],
    in_last: &[bool],
    p: usize,
    partial: &mut Vec<usize>,
) -> u64 {
    if free_classes.is_empty() {
        let prefix = *partial.last().unwrap();
        let forced = g.mul(g.inv(prefix), p);
        return u64::from(in_last[forced]);
    }
    let mut total = 0;
    let class = &table.classes()[free_classes[0]];
    for &sigma in &class.members {
        partial.push(g.mul(*partial.last().unwrap(), sigma));
        total += count_sigma(g, table, &free_classes[1..], in_last, p, partial);
        partial.pop();
    }
    total
}

fn count_products(
    g: &FiniteGroup,
    elements: &[Vec<usize>],
    central: usize,
    depth: usize,
    stack: &mut Vec<usize>,
    count: &mut u64,
) {
    if depth == elements.len() {
        let mut prod = 0usize;
        for &x in stack.iter() {
            prod = g.mul(prod, x);
        }
        if g.mul(prod, central) == 0 {
            *count += 1;
        }
        return;
    }
    for &x in &elements[depth] {
        stack.push(x);
        count_products(g, elements, central, depth + 1, stack, count);
        stack.pop();
    }
}

/// Decomposition of a conjugacy class of a central extension into fiber
/// translates of its image class.
#[derive(Clone, Debug, Serialize)]
pub struct FiberClassData {
    /// Class index in the total group.
    pub class_index: usize,
    /// Class index of the image in the quotient.
    pub image_class: usize,
    /// Flat fiber indices `a` with `a·s(q) ∈ 𝔩` for every `q` in the image
    /// class.
    pub fiber_parts: Vec<usize>,
}

/// Splits a conjugacy class `𝔩` of the total group of a central extension
/// as the disjoint union of `a · s(π(𝔩))` over fiber elements `a`; the
/// tiling is verified element by element.
pub fn fiber_classes(ext: &CentralExtensionData, class_index: usize) -> Result<FiberClassData> {
    let total = &ext.total;
    let classes = total.conjugacy_classes();
    if class_index >= classes.len() {
        return Err(Error::InvalidInput("class index out of range".into()));
    }
    let members = &classes[class_index].members;
    let q_classes = ext.quotient.conjugacy_classes();
    let q_class_of = ext.quotient.class_map(&q_classes);
    let image_class = q_class_of[ext.projection[members[0]]];
    // All members must project into one class.
    for &m in members {
        if q_class_of[ext.projection[m]] != image_class {
            return Err(Error::Defect("class projects onto two quotient classes".into()));
        }
    }
    let mut fiber_parts: Vec<usize> = members
        .iter()
        .map(|&m| ext.decompose(m).0)
        .collect();
    fiber_parts.sort_unstable();
    fiber_parts.dedup();
    // Exact tiling: 𝔩 = {a·s(q)} over parts × image-class members.
    let mut tiled: Vec<usize> = Vec::new();
    for &a in &fiber_parts {
        for &q in &q_classes[image_class].members {
            tiled.push(total.mul(ext.fiber_embed[a], ext.section[q]));
        }
    }
    tiled.sort_unstable();
    let mut expected = members.clone();
    expected.sort_unstable();
    if tiled != expected {
        return Err(Error::Defect("fiber translates do not tile the class".into()));
    }
    Ok(FiberClassData { class_index, image_class, fiber_parts })
}

#[derive(Clone, Debug, Serialize)]
pub struct GluingRow {
    pub kind: String,
    pub detail: String,
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GluingReport {
    pub rows: Vec<GluingRow>,
    pub all_equal: bool,
}
