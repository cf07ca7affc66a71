//! The twisted group algebra `C*(K, c)` for a root-of-unity valued
//! 2-cocycle `c`: twisted multiplication, the center and its class-sum
//! basis over `c`-regular classes, twisted irreducible characters obtained
//! through the central extension `μ_m ×_c K`, the orthogonal central
//! idempotents `f_ρ`, the Poincaré pairing, and exact expansion of central
//! elements in the idempotent basis.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chartab::CharacterTable;
use crate::cocycle::{build_extension, TwoCocycleA, U1Cocycle};
use crate::cyclotomic::Cyclotomic;
use crate::error::Error;
use crate::group::{ConjClass, FiniteGroup, DEFAULT_ORDER_CAP};
use crate::linalg;
use crate::rational::{rat, Rational};
use crate::Result;

/// An irreducible `c`-twisted character, stored per group element (twisted
/// characters are class functions only on `c`-regular classes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedIrrep {
    pub dim: usize,
    pub values: Vec<Cyclotomic>,
}

#[derive(Debug)]
struct AlgebraCore {
    group: FiniteGroup,
    cocycle: U1Cocycle,
    classes: Vec<ConjClass>,
    class_of: Vec<usize>,
    /// Indices into `classes` of the `c`-regular ones.
    regular_classes: Vec<usize>,
    irreps: Vec<TwistedIrrep>,
}

/// A twisted group algebra with its semisimple structure precomputed.
#[derive(Clone, Debug)]
pub struct TwistedAlgebra {
    core: Arc<AlgebraCore>,
}

impl PartialEq for TwistedAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.core, &other.core)
            || (self.core.group == other.core.group && self.core.cocycle == other.core.cocycle)
    }
}

impl TwistedAlgebra {
    /// Builds the algebra, its `c`-regular classes and twisted irreps. The
    /// irreps come from the character table of the extension `μ_m ×_c K`:
    /// the rows whose central character on the embedded `μ_m` is the
    /// standard one restrict along `k ↦ (1, k)` to the twisted characters.
    pub fn new(cocycle: U1Cocycle) -> Result<Self> {
        let group = cocycle.base().clone();
        let n = group.order();
        let classes = group.conjugacy_classes();
        let class_of = group.class_map(&classes);

        let mut regular_classes = Vec::new();
        for (idx, class) in classes.iter().enumerate() {
            let regular = class.members.iter().all(|&g| {
                group
                    .centralizer(g)
                    .iter()
                    .all(|&h| cocycle.exponent(g, h) == cocycle.exponent(h, g))
            });
            if regular {
                regular_classes.push(idx);
            }
        }

        let m = cocycle.modulus();
        let nu = TwoCocycleA::new(
            group.clone(),
            vec![m],
            (0..n).map(|a| (0..n).map(|b| cocycle.exponent(a, b)).collect()).collect(),
        )?;
        let ext = build_extension(&nu, DEFAULT_ORDER_CAP)?;
        let table = CharacterTable::compute(&ext.total)?;
        let standard = Cyclotomic::root_of_unity(m, 1);

        let mut irreps = Vec::new();
        for (i, row) in table.irreps().iter().enumerate() {
            let selected = if m == 1 {
                true
            } else {
                table.central_character(i, ext.fiber_embed[1])? == standard
            };
            if !selected {
                continue;
            }
            // Restrict along the section k ↦ (1, k), which indexes as k.
            let values: Vec<Cyclotomic> =
                (0..n).map(|k| table.value_at(i, ext.section[k]).clone()).collect();
            irreps.push(TwistedIrrep { dim: row.dim, values });
        }

        // Semisimplicity bookkeeping.
        if irreps.len() != regular_classes.len() {
            return Err(Error::Defect(format!(
                "{} twisted irreps against {} c-regular classes",
                irreps.len(),
                regular_classes.len()
            )));
        }
        let dim_sq: usize = irreps.iter().map(|r| r.dim * r.dim).sum();
        if dim_sq != n {
            return Err(Error::Defect("twisted degrees do not sum to the group order".into()));
        }
        // Twisted characters vanish off c-regular classes.
        let regular_set: Vec<bool> = {
            let mut v = vec![false; classes.len()];
            for &r in &regular_classes {
                v[r] = true;
            }
            v
        };
        for irrep in &irreps {
            for g in 0..n {
                if !regular_set[class_of[g]] && !irrep.values[g].is_zero() {
                    return Err(Error::Defect(
                        "twisted character does not vanish off c-regular classes".into(),
                    ));
                }
            }
        }
        irreps.sort_by(|a, b| {
            a.dim.cmp(&b.dim).then_with(|| {
                for (x, y) in a.values.iter().zip(b.values.iter()) {
                    let c = x.sort_cmp(y);
                    if c != std::cmp::Ordering::Equal {
                        return c;
                    }
                }
                std::cmp::Ordering::Equal
            })
        });

        Ok(TwistedAlgebra {
            core: Arc::new(AlgebraCore {
                group,
                cocycle,
                classes,
                class_of,
                regular_classes,
                irreps,
            }),
        })
    }

    /// The ordinary group algebra `C*(G)`.
    pub fn untwisted(group: FiniteGroup) -> Result<Self> {
        TwistedAlgebra::new(U1Cocycle::trivial(group))
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.core.group
    }

    pub fn cocycle(&self) -> &U1Cocycle {
        &self.core.cocycle
    }

    pub fn classes(&self) -> &[ConjClass] {
        &self.core.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.core.class_of[g]
    }

    /// The `c`-regular conjugacy classes.
    pub fn c_regular_classes(&self) -> Vec<&ConjClass> {
        self.core.regular_classes.iter().map(|&i| &self.core.classes[i]).collect()
    }

    pub fn c_regular_class_indices(&self) -> &[usize] {
        &self.core.regular_classes
    }

    pub fn is_class_regular(&self, class_idx: usize) -> bool {
        self.core.regular_classes.contains(&class_idx)
    }

    pub fn irreps(&self) -> &[TwistedIrrep] {
        &self.core.irreps
    }

    /// `ν_ρ = (dim V_ρ / |K|)²`.
    pub fn nu(&self, rho: usize) -> Rational {
        let d = self.core.irreps[rho].dim as i64;
        let n = self.core.group.order() as i64;
        rat(d, n) * rat(d, n)
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement { algebra: self.clone(), coeffs: BTreeMap::new() }
    }

    /// The basis element `g` with coefficient 1.
    pub fn single(&self, g: usize) -> AlgebraElement {
        self.element_from_iter([(g, Cyclotomic::one())])
    }

    pub fn identity(&self) -> AlgebraElement {
        self.single(self.core.group.identity())
    }

    /// `1_{(g)} = Σ_{g' ∈ (g)} g'` for the class with the given index.
    pub fn class_sum(&self, class_idx: usize) -> AlgebraElement {
        self.element_from_iter(
            self.core.classes[class_idx].members.iter().map(|&g| (g, Cyclotomic::one())),
        )
    }

    pub fn element_from_iter(
        &self,
        items: impl IntoIterator<Item = (usize, Cyclotomic)>,
    ) -> AlgebraElement {
        let mut coeffs = BTreeMap::new();
        for (g, c) in items {
            if !c.is_zero() {
                let entry = coeffs.entry(g).or_insert_with(Cyclotomic::zero);
                *entry = entry.add(&c);
            }
        }
        coeffs.retain(|_, c: &mut Cyclotomic| !c.is_zero());
        AlgebraElement { algebra: self.clone(), coeffs }
    }

    /// The central idempotent
    /// `f_ρ = (dim V_ρ/|K|) Σ_{g c-regular} c(g,g⁻¹)⁻¹ χ_ρ(g⁻¹) g`.
    pub fn idempotent(&self, rho: usize) -> AlgebraElement {
        let core = &self.core;
        let g = &core.group;
        let dim_over_order = rat(core.irreps[rho].dim as i64, g.order() as i64);
        let mut items = Vec::new();
        for &ci in &core.regular_classes {
            for &x in &core.classes[ci].members {
                let xinv = g.inv(x);
                let twist =
                    Cyclotomic::root_of_unity(core.cocycle.modulus(), -(core.cocycle.exponent(x, xinv) as i64));
                let coeff =
                    twist.mul(&core.irreps[rho].values[xinv]).scale(&dim_over_order);
                items.push((x, coeff));
            }
        }
        self.element_from_iter(items)
    }

    /// The class sums of the `c`-regular classes, each verified central.
    pub fn center_basis(&self) -> Result<Vec<AlgebraElement>> {
        let mut out = Vec::new();
        for &ci in &self.core.regular_classes {
            let e = self.class_sum(ci);
            if !self.is_central(&e)? {
                return Err(Error::Defect(format!("class sum {ci} fails centrality")));
            }
            out.push(e);
        }
        Ok(out)
    }

    /// Commutes the element against every basis element.
    pub fn is_central(&self, a: &AlgebraElement) -> Result<bool> {
        for g in 0..self.core.group.order() {
            let b = self.single(g);
            if a.mul(&b)? != b.mul(a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `(a, b) = (1/|K|) · coefficient of the identity in a∘b`.
    pub fn pairing(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<Cyclotomic> {
        let prod = a.mul(b)?;
        let at_identity =
            prod.coeffs.get(&self.core.group.identity()).cloned().unwrap_or_else(Cyclotomic::zero);
        Ok(at_identity.scale(&rat(1, self.core.group.order() as i64)))
    }

    /// Coordinates `e_ρ` with `δ = Σ_ρ e_ρ f_ρ`, by an exact linear solve
    /// in the center (evaluated at c-regular class representatives), then
    /// verified by exact reconstruction. Errors when `δ` is not central.
    pub fn expand_in_idempotents(&self, delta: &AlgebraElement) -> Result<Vec<Cyclotomic>> {
        self.check_owned(delta)?;
        if !self.is_central(delta)? {
            return Err(Error::NonCentralInsertion);
        }
        let idempotents: Vec<AlgebraElement> =
            (0..self.core.irreps.len()).map(|r| self.idempotent(r)).collect();
        let reps: Vec<usize> =
            self.core.regular_classes.iter().map(|&ci| self.core.classes[ci].representative).collect();
        let matrix: Vec<Vec<Cyclotomic>> = reps
            .iter()
            .map(|rep| {
                idempotents
                    .iter()
                    .map(|f| f.coeffs.get(rep).cloned().unwrap_or_else(Cyclotomic::zero))
                    .collect()
            })
            .collect();
        let rhs: Vec<Cyclotomic> = reps
            .iter()
            .map(|rep| delta.coeffs.get(rep).cloned().unwrap_or_else(Cyclotomic::zero))
            .collect();
        let coords = linalg::solve(&matrix, &rhs, &linalg::CYCLOTOMIC_FIELD)
            .ok_or_else(|| Error::Defect("idempotent coordinate system is singular".into()))?;
        // Exact reconstruction check over all coefficients.
        let mut rebuilt = self.zero();
        for (e, f) in coords.iter().zip(&idempotents) {
            rebuilt = rebuilt.add(&f.scale_cyc(e));
        }
        if rebuilt != *delta {
            return Err(Error::Defect("idempotent expansion does not reconstruct the element".into()));
        }
        Ok(coords)
    }

    fn check_owned(&self, a: &AlgebraElement) -> Result<()> {
        if a.algebra != *self {
            return Err(Error::MismatchedAlgebras);
        }
        Ok(())
    }
}

/// An element of a twisted group algebra: finitely many cyclotomic
/// coefficients over group elements; zeros are never stored.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    algebra: TwistedAlgebra,
    coeffs: BTreeMap<usize, Cyclotomic>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.coeffs == other.coeffs
    }
}

impl AlgebraElement {
    pub fn algebra(&self) -> &TwistedAlgebra {
        &self.algebra
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, Cyclotomic> {
        &self.coeffs
    }

    pub fn coeff(&self, g: usize) -> Cyclotomic {
        self.coeffs.get(&g).cloned().unwrap_or_else(Cyclotomic::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut coeffs = self.coeffs.clone();
        for (&g, c) in &other.coeffs {
            let entry = coeffs.entry(g).or_insert_with(Cyclotomic::zero);
            *entry = entry.add(c);
        }
        coeffs.retain(|_, c| !c.is_zero());
        AlgebraElement { algebra: self.algebra.clone(), coeffs }
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        self.add(&other.scale_cyc(&Cyclotomic::from_int(-1)))
    }

    pub fn scale(&self, r: &Rational) -> AlgebraElement {
        self.scale_cyc(&Cyclotomic::from_rational(r.clone()))
    }

    pub fn scale_cyc(&self, s: &Cyclotomic) -> AlgebraElement {
        if s.is_zero() {
            return self.algebra.zero();
        }
        let coeffs = self.coeffs.iter().map(|(&g, c)| (g, c.mul(s))).collect();
        AlgebraElement { algebra: self.algebra.clone(), coeffs }
    }

    /// Twisted product: bilinear extension of `g∘h = c(g,h)·gh`.
    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        if self.algebra != other.algebra {
            return Err(Error::MismatchedAlgebras);
        }
        let core = &self.algebra.core;
        let mut acc: BTreeMap<usize, Cyclotomic> = BTreeMap::new();
        for (&g, cg) in &self.coeffs {
            for (&h, ch) in &other.coeffs {
                let twist = core.cocycle.value(g, h);
                let term = cg.mul(ch).mul(&twist);
                if term.is_zero() {
                    continue;
                }
                let target = core.group.mul(g, h);
                let entry = acc.entry(target).or_insert_with(Cyclotomic::zero);
                *entry = entry.add(&term);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(AlgebraElement { algebra: self.algebra.clone(), coeffs: acc })
    }
}

impl Serialize for AlgebraElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut outer = serializer.serialize_map(Some(1))?;
        struct CoeffMap<'a>(&'a BTreeMap<usize, Cyclotomic>);
        impl Serialize for CoeffMap<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (g, c) in self.0 {
                    m.serialize_entry(&g.to_string(), c)?;
                }
                m.end()
            }
        }
        outer.serialize_entry("coeffs", &CoeffMap(&self.coeffs))?;
        outer.end()
    }
}

/// Deserialized coefficient data awaiting an owning algebra.
#[derive(Clone, Debug, Default)]
pub struct ElementData {
    pub coeffs: BTreeMap<usize, Cyclotomic>,
}

impl ElementData {
    pub fn into_element(self, algebra: &TwistedAlgebra) -> Result<AlgebraElement> {
        if self.coeffs.keys().any(|&g| g >= algebra.group().order()) {
            return Err(Error::InvalidInput("element index out of range for algebra".into()));
        }
        Ok(algebra.element_from_iter(self.coeffs))
    }
}

impl<'de> Deserialize<'de> for ElementData {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ElementData;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an algebra element {coeffs: {index: cyclotomic}}")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<ElementData, A::Error> {
                let mut data = ElementData::default();
                while let Some(key) = access.next_key::<String>()? {
                    if key != "coeffs" {
                        return Err(serde::de::Error::unknown_field(&key, &["coeffs"]));
                    }
                    let raw: BTreeMap<String, Cyclotomic> = access.next_value()?;
                    for (k, v) in raw {
                        let idx: usize =
                            k.parse().map_err(|_| serde::de::Error::custom("bad element index"))?;
                        if !v.is_zero() {
                            data.coeffs.insert(idx, v);
                        }
                    }
                }
                Ok(data)
            }
        }
        deserializer.deserialize_map(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::extract_cocycle;
    use crate::group::builtin;
    use crate::rational::rat_int;

    /// C2×C2 with the nontrivial cocycle pushed from the Q8 extension.
    pub(crate) fn twisted_v4() -> TwistedAlgebra {
        let q8 = builtin("Q8").unwrap();
        let z = q8.center();
        let (_, nu) = extract_cocycle(&q8, &z).unwrap();
        let c = nu.push_by_character(&[1]).unwrap();
        TwistedAlgebra::new(c).unwrap()
    }

    fn untwisted(name: &str) -> TwistedAlgebra {
        TwistedAlgebra::untwisted(builtin(name).unwrap()).unwrap()
    }

    #[test]
    fn untwisted_product_matches_group_algebra() {
        let a = untwisted("S3");
        let g = a.group().clone();
        let x = a.single(1);
        let y = a.single(2);
        let prod = x.mul(&y).unwrap();
        assert_eq!(prod, a.single(g.mul(1, 2)));
    }

    #[test]
    fn twisted_v4_anticommutes() {
        let alg = twisted_v4();
        // Two commuting generators of C2×C2 anticommute in the algebra.
        let x = alg.single(1);
        let y = alg.single(2);
        let xy = x.mul(&y).unwrap();
        let yx = y.mul(&x).unwrap();
        assert_eq!(xy, yx.scale_cyc(&Cyclotomic::from_int(-1)));
        assert_ne!(xy, yx);
    }

    #[test]
    fn associativity_on_pseudorandom_triples() {
        for alg in [untwisted("S3"), twisted_v4()] {
            let n = alg.group().order();
            let mk = |seed: usize| {
                alg.element_from_iter((0..n).map(|g| {
                    (g, Cyclotomic::from_rational(rat_int(((seed * 31 + g * 17) % 7) as i64 - 3)))
                }))
            };
            for s in 0..4 {
                let (a, b, c) = (mk(s), mk(s + 5), mk(s + 11));
                let lhs = a.mul(&b).unwrap().mul(&c).unwrap();
                let rhs = a.mul(&b.mul(&c).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn c_regular_classes_examples() {
        let s3 = untwisted("S3");
        assert_eq!(s3.c_regular_classes().len(), 3);
        let v4 = twisted_v4();
        let regular = v4.c_regular_classes();
        assert_eq!(regular.len(), 1);
        assert_eq!(regular[0].representative, 0);
    }

    #[test]
    fn center_basis_counts() {
        let s3 = untwisted("S3");
        assert_eq!(s3.center_basis().unwrap().len(), 3);
        let v4 = twisted_v4();
        let basis = v4.center_basis().unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0], v4.identity());
    }

    #[test]
    fn twisted_irreps_shapes() {
        // Trivial cocycle: ordinary character table rows.
        let c2 = untwisted("C2");
        assert_eq!(c2.irreps().len(), 2);
        assert!(c2.irreps().iter().all(|r| r.dim == 1));
        let s3 = untwisted("S3");
        let t = CharacterTable::compute(s3.group()).unwrap();
        for (tw, row) in s3.irreps().iter().zip(t.irreps()) {
            assert_eq!(tw.dim, row.dim);
            for g in 0..6 {
                assert_eq!(&tw.values[g], t.value_at(g_row_index(&t, row), g));
            }
        }
        // Twisted V4: exactly one irrep, dimension 2.
        let v4 = twisted_v4();
        assert_eq!(v4.irreps().len(), 1);
        assert_eq!(v4.irreps()[0].dim, 2);
    }

    fn g_row_index(t: &CharacterTable, row: &crate::chartab::Irrep) -> usize {
        t.irreps().iter().position(|r| r == row).unwrap()
    }

    #[test]
    fn idempotent_examples() {
        // C1: the identity.
        let triv = untwisted("C1");
        assert_eq!(triv.idempotent(0), triv.identity());
        // C2 untwisted: (e ± x)/2.
        let c2 = untwisted("C2");
        let f0 = c2.idempotent(0);
        let f1 = c2.idempotent(1);
        let half = rat(1, 2);
        let plus = c2.element_from_iter([
            (0, Cyclotomic::from_rational(half.clone())),
            (1, Cyclotomic::from_rational(half.clone())),
        ]);
        let minus = c2.element_from_iter([
            (0, Cyclotomic::from_rational(half.clone())),
            (1, Cyclotomic::from_rational(-half)),
        ]);
        assert!(f0 == plus && f1 == minus || f0 == minus && f1 == plus);
        // Twisted V4: the single idempotent is the identity.
        let v4 = twisted_v4();
        assert_eq!(v4.idempotent(0), v4.identity());
    }

    #[test]
    fn idempotent_relations_all_test_algebras() {
        for alg in [untwisted("C2"), untwisted("C6"), untwisted("S3"), untwisted("Q8"), untwisted("D4"), twisted_v4()] {
            let count = alg.irreps().len();
            let fs: Vec<AlgebraElement> = (0..count).map(|r| alg.idempotent(r)).collect();
            let mut total = alg.zero();
            for (i, fi) in fs.iter().enumerate() {
                total = total.add(fi);
                for (j, fj) in fs.iter().enumerate() {
                    let prod = fi.mul(fj).unwrap();
                    if i == j {
                        assert_eq!(prod, *fi, "f_{i} idempotent");
                    } else {
                        assert!(prod.is_zero(), "f_{i}∘f_{j} zero");
                    }
                }
            }
            assert_eq!(total, alg.identity(), "Σf_ρ = 1");
        }
    }

    #[test]
    fn pairing_reproduces_nu() {
        for alg in [untwisted("C2"), untwisted("S3"), untwisted("Q8"), twisted_v4()] {
            let count = alg.irreps().len();
            for i in 0..count {
                for j in 0..count {
                    let p = alg.pairing(&alg.idempotent(i), &alg.idempotent(j)).unwrap();
                    let expect = if i == j {
                        Cyclotomic::from_rational(alg.nu(i))
                    } else {
                        Cyclotomic::zero()
                    };
                    assert_eq!(p, expect);
                }
            }
        }
        let triv = untwisted("C1");
        assert!(triv.pairing(&triv.identity(), &triv.identity()).unwrap().is_one());
    }

    #[test]
    fn expansion_round_trips() {
        for alg in [untwisted("S3"), untwisted("Q8"), twisted_v4()] {
            // δ = f_ρ gives a unit coordinate vector.
            for r in 0..alg.irreps().len() {
                let coords = alg.expand_in_idempotents(&alg.idempotent(r)).unwrap();
                for (i, c) in coords.iter().enumerate() {
                    assert_eq!(c.is_one(), i == r);
                    assert_eq!(c.is_zero(), i != r);
                }
            }
            // Untwisted class sums: e_ρ = |(g)| χ_ρ(g)/dim.
            if alg.cocycle().is_trivial() {
                for (ci, class) in alg.classes().to_vec().iter().enumerate() {
                    let coords = alg.expand_in_idempotents(&alg.class_sum(ci)).unwrap();
                    for (r, irrep) in alg.irreps().iter().enumerate() {
                        let expect = irrep.values[class.representative]
                            .scale(&rat(class.size() as i64, irrep.dim as i64));
                        assert_eq!(coords[r], expect);
                    }
                }
            }
            // Pseudo-random central element.
            let mut delta = alg.zero();
            for (ci, basis) in alg.center_basis().unwrap().iter().enumerate() {
                delta = delta.add(&basis.scale(&rat(ci as i64 + 2, 3)));
            }
            let coords = alg.expand_in_idempotents(&delta).unwrap();
            let mut rebuilt = alg.zero();
            for (r, c) in coords.iter().enumerate() {
                rebuilt = rebuilt.add(&alg.idempotent(r).scale_cyc(c));
            }
            assert_eq!(rebuilt, delta);
        }
    }

    #[test]
    fn non_central_rejected() {
        let s3 = untwisted("S3");
        let x = s3.single(1);
        assert!(matches!(
            s3.expand_in_idempotents(&x),
            Err(Error::NonCentralInsertion)
        ));
    }

    #[test]
    fn mismatched_algebras_rejected() {
        let a = untwisted("C2");
        let b = untwisted("C3");
        assert!(matches!(a.identity().mul(&b.identity()), Err(Error::MismatchedAlgebras)));
    }

    #[test]
    fn central_class_sums_commute() {
        for alg in [untwisted("S3"), twisted_v4(), untwisted("Q8")] {
            let basis = alg.center_basis().unwrap();
            for a in &basis {
                for b in &basis {
                    assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                }
            }
        }
    }

    #[test]
    fn element_serde_round_trip() {
        let alg = untwisted("S3");
        let e = alg.element_from_iter([
            (0, Cyclotomic::from_rational(rat(3, 2))),
            (4, Cyclotomic::root_of_unity(3, 1)),
        ]);
        let json = serde_json::to_string(&e).unwrap();
        let data: ElementData = serde_json::from_str(&json).unwrap();
        let back = data.into_element(&alg).unwrap();
        assert_eq!(back, e);
    }
}
