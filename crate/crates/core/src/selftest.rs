//! The full verification matrix, shared by the `selftest` CLI subcommand
//! and the acceptance integration suite. Every check is an exact equality;
//! a criterion passes only when every one of its instances does.

use crate::chartab::CharacterTable;
use crate::cocycle::extract_cocycle;
use crate::counting::{Counter, SurfaceGroupInstance, DEFAULT_ENUMERATION_CAP};
use crate::cyclotomic::Cyclotomic;
use crate::group::{builtin, FiniteGroup};
use crate::gw::{
    cohft_axioms_check, verify_decomposition, verify_product, DecompositionOptions,
    GerbeSplitting, RowCollection,
};
use crate::psi::{PsiCache, PsiSpec};
use crate::rational::{rat, rat_int, Rational};
use crate::twisted::TwistedAlgebra;
use crate::Result;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

const COUNTING_GROUPS: [&str; 9] = ["C2", "C3", "C4", "C2xC2", "C6", "S3", "D4", "Q8", "A4"];

fn group_list() -> Vec<FiniteGroup> {
    COUNTING_GROUPS.iter().map(|n| builtin(n).expect("builtin")).collect()
}

/// C2×C2 with the nontrivial cocycle pushed from the Q8 center extension.
fn twisted_v4() -> Result<TwistedAlgebra> {
    let q8 = builtin("Q8")?;
    let (_, nu) = extract_cocycle(&q8, &q8.center())?;
    TwistedAlgebra::new(nu.push_by_character(&[1])?)
}

fn test_algebras() -> Result<Vec<(String, TwistedAlgebra)>> {
    let mut out = Vec::new();
    for name in COUNTING_GROUPS {
        out.push((name.to_string(), TwistedAlgebra::untwisted(builtin(name)?)?));
    }
    out.push(("C2xC2-twisted".to_string(), twisted_v4()?));
    Ok(out)
}

fn all_tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < k {
                break;
            }
            cur[i] = 0;
        }
    }
}

fn compositions(n: usize, total: usize) -> Vec<Vec<usize>> {
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

fn result(id: usize, name: &str, outcome: Result<(usize, String)>) -> CriterionResult {
    match outcome {
        Ok((checks, extra)) => CriterionResult {
            id,
            name: name.to_string(),
            passed: true,
            detail: if extra.is_empty() {
                format!("{checks} checks")
            } else {
                format!("{checks} checks; {extra}")
            },
        },
        Err(e) => CriterionResult { id, name: name.to_string(), passed: false, detail: e.to_string() },
    }
}

fn fail(msg: String) -> crate::Error {
    crate::Error::Defect(msg)
}

/// Criterion 1: character formula equals the brute-force enumeration for
/// every test group, every `(g,n)` in the matrix, every class tuple, every
/// central twist.
fn criterion_counting_oracle() -> Result<(usize, String)> {
    let mut checks = 0usize;
    for group in group_list() {
        let counter = Counter::new(&group)?;
        let centre = group.center();
        let r = counter.class_count();
        for &(genus, n) in &[(0usize, 3usize), (0, 4), (1, 1), (1, 2), (2, 1)] {
            for tuple in all_tuples(r, n) {
                for &z in centre.elements() {
                    let inst = SurfaceGroupInstance {
                        genus,
                        class_indices: tuple.clone(),
                        central_twist: z,
                    };
                    let fast = counter.omega(&inst)?;
                    let slow = counter.omega_brute_force(&inst, DEFAULT_ENUMERATION_CAP)?;
                    if fast != slow {
                        return Err(fail(format!(
                            "omega mismatch: G={:?} g={genus} tuple={tuple:?} twist={z}: {fast} vs {slow}",
                            group.name()
                        )));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok((checks, String::new()))
}

/// Criterion 2: the closed one- and two-point values at genus zero.
fn criterion_paper_special_cases() -> Result<(usize, String)> {
    let mut checks = 0usize;
    for group in group_list() {
        let counter = Counter::new(&group)?;
        let order = group.order() as i64;
        let one_point = counter.omega(&SurfaceGroupInstance::untwisted(0, vec![0]))?;
        if one_point != rat(1, order) {
            return Err(fail(format!("Ω_0((1)) ≠ 1/|G| for {:?}", group.name())));
        }
        checks += 1;
        for k in 0..counter.class_count() {
            let rep = counter.table().classes()[k].representative;
            let inv_k = counter.table().class_of(group.inv(rep));
            let size = counter.table().classes()[k].size() as i64;
            let two_point =
                counter.omega(&SurfaceGroupInstance::untwisted(0, vec![k, inv_k]))?;
            if two_point != rat(size, order) {
                return Err(fail(format!(
                    "Ω_0((g),(g⁻¹)) ≠ |(g)|/|G| for {:?} class {k}",
                    group.name()
                )));
            }
            checks += 1;
        }
    }
    Ok((checks, String::new()))
}

/// Criterion 3: pinned ψ-integral values, the string and dilaton equations
/// over the full sweep `3g−3+n ≤ 12`, and recursion overdetermination.
fn criterion_psi() -> Result<(usize, String)> {
    let cache = PsiCache::default();
    let mut checks = 0usize;
    let pinned: [(usize, &[usize], Rational); 4] = [
        (0, &[0, 0, 0], rat_int(1)),
        (1, &[1], rat(1, 24)),
        (1, &[0, 2], rat(1, 24)),
        (2, &[4], rat(1, 1152)),
    ];
    for (g, a, want) in pinned {
        let got = cache.integral(&PsiSpec::new(g, a.to_vec()))?;
        if got != want {
            return Err(fail(format!("ψ value mismatch at g={g} a={a:?}: {got}")));
        }
        checks += 1;
    }
    for g in 0..=4usize {
        for n in 1..=6usize {
            if 2 * g + n <= 2 {
                continue;
            }
            let dim = 3 * g + n - 3;
            if dim > 12 {
                continue;
            }
            for a in compositions(n, dim) {
                let mut with_zero = a.clone();
                with_zero.push(0);
                let lhs = cache.integral(&PsiSpec::new(g, with_zero))?;
                let mut rhs = Rational::from_integer(0.into());
                for j in 0..a.len() {
                    if a[j] >= 1 {
                        let mut sub = a.clone();
                        sub[j] -= 1;
                        rhs += cache.integral(&PsiSpec::new(g, sub))?;
                    }
                }
                if lhs != rhs {
                    return Err(fail(format!("string equation fails at g={g} a={a:?}")));
                }
                let mut with_one = a.clone();
                with_one.push(1);
                let dil = cache.integral(&PsiSpec::new(g, with_one))?;
                let factor = rat_int(2 * g as i64 - 2 + n as i64);
                if dil != factor * cache.integral(&PsiSpec::new(g, a.clone()))? {
                    return Err(fail(format!("dilaton equation fails at g={g} a={a:?}")));
                }
                checks += 2;
            }
        }
    }
    // Overdetermination: every admissible pivot gives the same value.
    for g in 0..=2usize {
        for n in 1..=3usize {
            if 2 * g + n <= 2 {
                continue;
            }
            let dim = 3 * g + n - 3;
            if dim > 8 {
                continue;
            }
            for a in compositions(n, dim) {
                let spec = PsiSpec::new(g, a.clone());
                let reference = cache.integral(&spec)?;
                for p in 0..spec.exponents.len() {
                    if spec.exponents[p] == 0 {
                        continue;
                    }
                    let alt = cache.integral_with_pivot(&spec, p)?;
                    if alt != reference {
                        return Err(fail(format!("pivot {p} differs at g={g} a={a:?}")));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok((checks, String::new()))
}

/// Criterion 4: both orthogonality relations and `Σ dim² = |G|` on every
/// builtin, plus the pinned Q8 table shape.
fn criterion_character_tables() -> Result<(usize, String)> {
    let mut checks = 0usize;
    for name in ["C2", "C3", "C4", "C2xC2", "C6", "S3", "D4", "Q8", "A4", "S4", "Heis3"] {
        let group = builtin(name)?;
        let table = CharacterTable::compute(&group)?;
        table.verify()?; // row orthogonality, degrees, identity column
        let r = table.classes().len();
        for a in 0..r {
            for b in 0..r {
                let mut s = Cyclotomic::zero();
                for i in 0..r {
                    s = s.add(&table.value(i, a).mul(&table.value(i, b).conj()));
                }
                let expect = if a == b {
                    Cyclotomic::from_int(
                        (group.order() / table.classes()[a].size()) as i64,
                    )
                } else {
                    Cyclotomic::zero()
                };
                if s != expect {
                    return Err(fail(format!("column orthogonality fails for {name} at ({a},{b})")));
                }
                checks += 1;
            }
        }
    }
    let q8 = builtin("Q8")?;
    let table = CharacterTable::compute(&q8)?;
    let dims: Vec<usize> = table.irreps().iter().map(|i| i.dim).collect();
    if dims != vec![1, 1, 1, 1, 2] {
        return Err(fail(format!("Q8 dims {dims:?}")));
    }
    let two = &table.irreps()[4];
    for (k, class) in table.classes().iter().enumerate() {
        let expect = match (class.size(), q8.element_order(class.representative)) {
            (1, 1) => Cyclotomic::from_int(2),
            (1, 2) => Cyclotomic::from_int(-2),
            _ => Cyclotomic::zero(),
        };
        if two.values[k] != expect {
            return Err(fail(format!("Q8 two-dimensional row wrong at class {k}")));
        }
        checks += 1;
    }
    Ok((checks, String::new()))
}

/// Criterion 5: the twisted C2×C2 structure and the idempotent/pairing
/// relations on every test algebra.
fn criterion_twisted_algebra() -> Result<(usize, String)> {
    let mut checks = 0usize;
    let v4 = twisted_v4()?;
    if v4.c_regular_classes().len() != 1 {
        return Err(fail("twisted V4: c-regular class count differs from 1".into()));
    }
    if v4.irreps().len() != 1 || v4.irreps()[0].dim != 2 {
        return Err(fail("twisted V4: expected a single irrep of dimension 2".into()));
    }
    checks += 2;
    for (name, alg) in test_algebras()? {
        let count = alg.irreps().len();
        let dim_sq: usize = alg.irreps().iter().map(|r| r.dim * r.dim).sum();
        if dim_sq != alg.group().order() {
            return Err(fail(format!("{name}: Σdim² ≠ |K|")));
        }
        let fs: Vec<_> = (0..count).map(|r| alg.idempotent(r)).collect();
        let mut total = alg.zero();
        for (i, fi) in fs.iter().enumerate() {
            total = total.add(fi);
            for (j, fj) in fs.iter().enumerate() {
                let prod = fi.mul(fj)?;
                let expect_prod = if i == j { fi.clone() } else { alg.zero() };
                if prod != expect_prod {
                    return Err(fail(format!("{name}: f_{i}∘f_{j} wrong")));
                }
                let pairing = alg.pairing(fi, fj)?;
                let expect_pair = if i == j {
                    Cyclotomic::from_rational(alg.nu(i))
                } else {
                    Cyclotomic::zero()
                };
                if pairing != expect_pair {
                    return Err(fail(format!("{name}: (f_{i},f_{j}) wrong")));
                }
                checks += 2;
            }
        }
        if total != alg.identity() {
            return Err(fail(format!("{name}: Σf_ρ ≠ 1")));
        }
        checks += 1;
    }
    Ok((checks, String::new()))
}

/// Criterion 6: CohFT gluing axioms on every test algebra (g ≤ 2, n ≤ 3)
/// and the counting-level loop/edge gluing identities on every test group.
fn criterion_cohft() -> Result<(usize, String)> {
    let mut checks = 0usize;
    for (name, alg) in test_algebras()? {
        let report = cohft_axioms_check(&alg, 2, 3)?;
        if !report.all_pass {
            let bad = report.rows.iter().find(|r| !r.equal).unwrap();
            return Err(fail(format!(
                "{name}: axiom {} fails at g={} tuple={:?}",
                bad.axiom, bad.genus, bad.tuple
            )));
        }
        checks += report.rows.len();
    }
    for group in group_list() {
        let counter = Counter::new(&group)?;
        for genus in 1..=2usize {
            for classes in [vec![0usize], vec![counter.class_count() - 1]] {
                let report = counter.gluing_check(genus, &classes)?;
                if !report.all_equal {
                    return Err(fail(format!(
                        "gluing fails for {:?} at genus {genus}",
                        group.name()
                    )));
                }
                checks += report.rows.len();
            }
        }
    }
    Ok((checks, String::new()))
}

/// Criterion 7 (headline): the decomposition identity on Q8 and D4 over
/// all `(g,n)` with `2g−2+n > 0`, `2g+n ≤ 6`, all class-sum insertion
/// tuples, all admissible descendant tuples.
fn criterion_decomposition() -> Result<(usize, String)> {
    let mut checks = 0usize;
    let mut detail = String::new();
    for name in ["Q8", "D4"] {
        let group = builtin(name)?;
        let report = verify_decomposition(
            &group,
            &DecompositionOptions {
                max_genus: 2,
                max_points: 6,
                sum_cap: Some(6),
                descendant_budget: usize::MAX,
                collect: RowCollection::FailuresOnly,
            },
        )?;
        if !report.all_equal() {
            return Err(fail(format!("{name}: {} decomposition rows fail", report.failures)));
        }
        checks += report.total_rows;
        detail.push_str(&format!("{name}: {} rows; ", report.total_rows));
    }
    Ok((checks, detail.trim_end_matches("; ").to_string()))
}

/// Criterion 8: the product identities for (C2, trivial) and (S3, trivial)
/// against the twisted C2×C2, g ≤ 2; the mixed-idempotent zero branch is
/// vacuous there (a single twisted irrep), so an untwisted right factor
/// exercises it too.
fn criterion_product() -> Result<(usize, String)> {
    let mut checks = 0usize;
    let v4 = twisted_v4()?;
    for left_name in ["C2", "S3"] {
        let left = TwistedAlgebra::untwisted(builtin(left_name)?)?;
        let report = verify_product(&left, &v4, 2, 3, usize::MAX, RowCollection::FailuresOnly)?;
        if !report.all_equal() {
            return Err(fail(format!(
                "product check {left_name} × twisted V4: {} failures",
                report.failures
            )));
        }
        checks += report.total_rows;
    }
    let c2 = TwistedAlgebra::untwisted(builtin("C2")?)?;
    let s3 = TwistedAlgebra::untwisted(builtin("S3")?)?;
    let report = verify_product(&c2, &s3, 2, 2, 6, RowCollection::FailuresOnly)?;
    if !report.all_equal() {
        return Err(fail(format!("product check C2 × S3: {} failures", report.failures)));
    }
    checks += report.total_rows;
    Ok((checks, String::new()))
}

/// Criterion 9: the abelian closed form of the degree and the `I`/`J`
/// round trips on 100 pseudorandom central elements per group.
fn criterion_degree_and_transforms() -> Result<(usize, String)> {
    let mut checks = 0usize;
    for name in ["C2", "C3", "C4", "C2xC2", "C6"] {
        let group = builtin(name)?;
        let counter = Counter::new(&group)?;
        let r = counter.class_count();
        // All nonempty class subsets when small; a deterministic cover of
        // subsets otherwise.
        let subsets: Vec<Vec<usize>> = if r <= 4 {
            (1..(1u32 << r)).map(|m| (0..r).filter(|i| m >> i & 1 == 1).collect()).collect()
        } else {
            let mut subs: Vec<Vec<usize>> =
                (0..r).map(|k| vec![k]).chain([(0..r).collect()]).collect();
            subs.push((0..r).step_by(2).collect());
            subs.push((0..r).filter(|k| k % 3 != 0).collect());
            subs
        };
        for genus in 0..=2usize {
            for z in 0..group.order() {
                for s1 in &subsets {
                    for s2 in &subsets {
                        let selections = vec![s1.clone(), s2.clone()];
                        let lhs = counter.degree(genus, &selections, z)?;
                        let rhs = counter.degree_abelian_count(genus, &selections, z)?;
                        if lhs != rhs {
                            return Err(fail(format!(
                                "degree mismatch {name} g={genus} z={z} sel={selections:?}"
                            )));
                        }
                        checks += 1;
                    }
                }
            }
        }
    }
    // I/J round trips with a deterministic linear-congruential stream.
    for name in ["C2", "C4", "C2xC2", "C6", "S3", "D4", "Q8", "A4"] {
        let group = builtin(name)?;
        let split = GerbeSplitting::new(&group)?;
        let basis = split.untwisted.center_basis()?;
        let mut state = 0x2545f49u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 13) as i64 - 6
        };
        for _ in 0..100 {
            let mut delta = split.untwisted.zero();
            for b in &basis {
                delta = delta.add(&b.scale(&rat(next(), 1 + next().unsigned_abs() as i64)));
            }
            let sectors = split.transform_i_all(&delta)?;
            let back = split.transform_j(&sectors)?;
            if back != delta {
                return Err(fail(format!("J∘I ≠ id on {name}")));
            }
            let forward = split.transform_i_all(&back)?;
            if forward != sectors {
                return Err(fail(format!("I∘J ≠ id on {name}")));
            }
            checks += 2;
        }
    }
    Ok((checks, String::new()))
}

/// Runs one criterion by its 1-based number.
pub fn run_criterion(id: usize) -> CriterionResult {
    match id {
        1 => result(1, "counting oracle equivalence (omega = brute force)", criterion_counting_oracle()),
        2 => result(2, "genus-zero one/two-point closed forms", criterion_paper_special_cases()),
        3 => result(3, "psi integrals: pinned values, string/dilaton, pivots", criterion_psi()),
        4 => result(4, "character tables: orthogonality and Q8 shape", criterion_character_tables()),
        5 => result(5, "twisted algebra: idempotents and pairing", criterion_twisted_algebra()),
        6 => result(6, "CohFT gluing axioms and counting gluing identities", criterion_cohft()),
        7 => result(7, "decomposition identity on Q8 and D4", criterion_decomposition()),
        8 => result(8, "product identities against the twisted C2xC2", criterion_product()),
        9 => result(9, "abelian degree closed form and I/J round trips", criterion_degree_and_transforms()),
        _ => CriterionResult {
            id,
            name: "unknown criterion".into(),
            passed: false,
            detail: "criterion ids run from 1 to 9".into(),
        },
    }
}

pub const CRITERION_COUNT: usize = 9;

/// Runs the whole matrix in order.
pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERION_COUNT).map(run_criterion).collect()
}
