//! Embedding construction `X ↪ P^(n+4)(M)` and its certificate checker.
//!
//! The construction, for `G_M ⊆ G_X`:
//!
//! 1. `z` is the chain of initial segments of a well-order of `M`; its
//!    stabilizer is exactly `G_M`.
//! 2. For an orbit of `X` with point stabilizer `H ⊇ G_M`, the coset tag
//!    `Hz = {h·z : h ∈ H}` lives in `M_3` and has stabilizer exactly `H`, so
//!    its orbit is a copy of `G/H`.
//! 3. Each orbit gets its own `Sym(M)`-orbit class `[w]` at level `n+2`. The
//!    class is fixed by all of `G`, and pairing with distinct classes keeps
//!    the copies of different orbits disjoint.
//! 4. `g·y ↦ ⟨{…{g·Hz}…}, [w]⟩` with `n−1` singleton wrappings; Kuratowski
//!    pairing adds two levels, landing in `M_(n+4)`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{all_permutations, Group, Subgroup};
use crate::gset::{GSet, HSetGSet, IsoWitness};
use crate::hset::{HSet, LevelTag, SizedEnumerator};

/// Largest `|M|` for which `Sym(M)` is enumerated.
pub const MAX_M_POINTS: usize = 8;
/// Largest group order accepted by [`embed`].
pub const MAX_GROUP_ORDER: usize = 24;
/// Largest `|X|` accepted by [`embed`].
pub const MAX_X_POINTS: usize = 64;
/// Node-count ceiling for the class-representative search.
pub const MAX_REP_NODES: usize = 64;
/// Candidate ceiling for the class-representative search.
pub const MAX_REP_CANDIDATES: usize = 200_000;

/// Exponents up to this value are expanded into an exact `2^e`.
const MATERIALIZE_EXPONENT: u64 = 1 << 20;

/// A well-order of `M`'s points: position `γ` holds `m_γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellOrder(Vec<usize>);

impl WellOrder {
    pub fn new(sequence: Vec<usize>) -> Result<Self> {
        if !crate::group::is_permutation(&sequence) {
            return Err(Error::Input(
                "well-order must list every point exactly once".into(),
            ));
        }
        Ok(WellOrder(sequence))
    }

    pub fn identity(m: usize) -> Self {
        WellOrder((0..m).collect())
    }

    pub fn sequence(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// An exact natural number from the tower `c_0 = m, c_(i+1) = 2^(c_i)`.
///
/// Values whose exponent is too large to expand are kept as `2^e`.
/// Comparison is exact in all cases.
#[derive(Debug, Clone)]
pub enum TowerCard {
    Exact(BigUint),
    /// `2^e` with `e > 2^20`.
    PowerOfTwo(Box<TowerCard>),
}

impl TowerCard {
    pub fn exact(v: impl Into<BigUint>) -> Self {
        TowerCard::Exact(v.into())
    }

    pub fn pow2(exponent: TowerCard) -> Self {
        match exponent {
            TowerCard::Exact(e) if e <= BigUint::from(MATERIALIZE_EXPONENT) => {
                let shift = u64::try_from(&e).expect("bounded exponent");
                TowerCard::Exact(BigUint::from(1u8) << shift)
            }
            other => TowerCard::PowerOfTwo(Box::new(other)),
        }
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            TowerCard::Exact(v) => Some(v),
            TowerCard::PowerOfTwo(_) => None,
        }
    }
}

/// Compares `2^e` with an exact `y`.
fn cmp_pow2_exact(e: &TowerCard, y: &BigUint) -> Ordering {
    if y.bits() == 0 {
        return Ordering::Greater;
    }
    // 2^(L-1) ≤ y < 2^L with L = bits(y).
    let bits = y.bits();
    match e.cmp(&TowerCard::exact(bits - 1)) {
        Ordering::Greater => Ordering::Greater,
        Ordering::Less => Ordering::Less,
        Ordering::Equal if y.count_ones() == 1 => Ordering::Equal,
        Ordering::Equal => Ordering::Less,
    }
}

impl Ord for TowerCard {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TowerCard::Exact(a), TowerCard::Exact(b)) => a.cmp(b),
            (TowerCard::PowerOfTwo(e), TowerCard::Exact(b)) => cmp_pow2_exact(e, b),
            (TowerCard::Exact(a), TowerCard::PowerOfTwo(e)) => cmp_pow2_exact(e, a).reverse(),
            (TowerCard::PowerOfTwo(a), TowerCard::PowerOfTwo(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for TowerCard {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for TowerCard {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for TowerCard {}

impl fmt::Display for TowerCard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerCard::Exact(v) if v.bits() <= 256 => write!(f, "{v}"),
            TowerCard::Exact(v) => write!(f, "<{}-bit number>", v.bits()),
            TowerCard::PowerOfTwo(e) => write!(f, "2^({e})"),
        }
    }
}

/// The cardinalities `|M_i|` for `|M| = m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardTower {
    pub m: usize,
}

impl CardTower {
    pub fn new(m: usize) -> Self {
        CardTower { m }
    }

    /// `c_i`.
    pub fn card(&self, i: usize) -> TowerCard {
        (0..i).fold(TowerCard::exact(self.m), |c, _| TowerCard::pow2(c))
    }

    /// Decides `c_(n+1) > c_n · m!` exactly.
    pub fn exceeds_scaled_predecessor(&self, n: usize) -> bool {
        let factorial: BigUint = (1..=self.m).map(BigUint::from).product();
        let fbits = factorial.bits();
        match self.card(n) {
            TowerCard::Exact(c) if c <= BigUint::from(MATERIALIZE_EXPONENT) => {
                let shift = u64::try_from(&c).expect("bounded exponent");
                (BigUint::from(1u8) << shift) > c * factorial
            }
            // c·m! < 2^(bits(c) + bits(m!)) ≤ 2^c whenever c ≥ bits(c) + bits(m!).
            TowerCard::Exact(c) => c >= BigUint::from(c.bits() + fbits),
            // c = 2^e with e ≥ bits(m!) and e ≥ 1 gives c ≥ 2e ≥ e + bits(m!),
            // and c·m! < 2^(e + bits(m!)) ≤ 2^c.
            TowerCard::PowerOfTwo(e) => *e >= TowerCard::exact(fbits.max(1)),
        }
    }

    /// Least `n ≥ 1` with `c_n ≥ k`.
    pub fn choose_level(&self, k: usize) -> usize {
        let target = TowerCard::exact(k);
        let mut c = TowerCard::exact(self.m);
        let mut n = 0;
        loop {
            c = TowerCard::pow2(c);
            n += 1;
            if c >= target {
                return n;
            }
        }
    }
}

pub fn tower_card(m: usize, i: usize) -> TowerCard {
    CardTower::new(m).card(i)
}

pub fn choose_level(k: usize, m: usize) -> usize {
    CardTower::new(m).choose_level(k)
}

/// Both kernels and the verdict on `G_M ⊆ G_X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    /// `|X| < χ(M)`; holds for every finite `X` since `|P^n(M)|` is unbounded.
    pub cond1: bool,
    pub cond1_note: &'static str,
    pub cond2: bool,
    pub kernel_m: Subgroup,
    pub kernel_x: Subgroup,
}

pub fn check_conditions(m: &GSet, x: &GSet) -> Result<ConditionReport> {
    if !m.same_group(x) {
        return Err(Error::GroupMismatch);
    }
    let kernel_m = m.fixed_kernel();
    let kernel_x = x.fixed_kernel();
    Ok(ConditionReport {
        cond1: true,
        cond1_note: "card X is finite and card P^n(M) grows without bound",
        cond2: kernel_m.is_subset_of(&kernel_x),
        kernel_m,
        kernel_x,
    })
}

/// `{{m_γ : γ < β} : β ≤ |M|}` for the given order.
pub fn chain_element(m: &GSet, order: &WellOrder) -> Result<HSet> {
    if order.len() != m.size() {
        return Err(Error::Input(format!(
            "well-order has {} points, M has {}",
            order.len(),
            m.size()
        )));
    }
    let seq = order.sequence();
    Ok(HSet::from_members((0..=seq.len()).map(|beta| {
        HSet::from_members(seq[..beta].iter().map(|&p| HSet::atom(p)))
    })))
}

pub fn stabilizer_of_hset(m: &GSet, h: &HSet) -> Subgroup {
    let group = m.group();
    Subgroup::new(group, group.elements().filter(|&g| h.act(g, m) == *h))
        .expect("stabilizers are subgroups")
}

fn raw_coset_tag(m: &GSet, h: &Subgroup, z: &HSet) -> HSet {
    HSet::from_members(h.members().iter().map(|&g| z.act(g, m)))
}

/// `Hz = {h·z : h ∈ H}`, which has stabilizer exactly `H` when `G_M ⊆ H`.
pub fn coset_tag(m: &GSet, h: &Subgroup, z: &HSet) -> Result<HSet> {
    if !m.fixed_kernel().is_subset_of(h) {
        return Err(Error::Precondition("coset tag needs G_M ⊆ H".to_string()));
    }
    Ok(raw_coset_tag(m, h, z))
}

/// The orbit of `Hz` in `M_3` together with the map from `coset_gset(G, H)`.
#[derive(Debug, Clone)]
pub struct TransitiveEmbedding {
    pub coset_tag: HSet,
    pub orbit: HSetGSet,
    /// Coset `i` (as ordered by `left_cosets`) goes to orbit point `map[i]`.
    pub witness: IsoWitness,
}

pub fn transitive_embed(m: &GSet, h: &Subgroup) -> Result<TransitiveEmbedding> {
    let z = chain_element(m, &WellOrder::identity(m.size()))?;
    let hz = coset_tag(m, h, &z)?;
    let cosets = m.group().left_cosets(h);
    let points: Vec<HSet> = cosets.iter().map(|c| hz.act(c[0], m)).collect();
    let orbit = HSetGSet::from_points(m, 3, points)?;
    let witness = IsoWitness {
        map: (0..cosets.len()).collect(),
    };
    Ok(TransitiveEmbedding {
        coset_tag: hz,
        orbit,
        witness,
    })
}

fn check_sym_guard(m: usize) -> Result<()> {
    if m > MAX_M_POINTS {
        return Err(Error::capacity(
            "|M| for Sym(M) enumeration",
            MAX_M_POINTS,
            m,
        ));
    }
    Ok(())
}

/// `[w] = {f(w) : f ∈ Sym(M)}`, the class of `w` under relabelling atoms.
pub fn bij_orbit_class(m: &GSet, w: &HSet, level: impl Into<LevelTag>) -> Result<HSet> {
    let level = level.into();
    check_sym_guard(m.size())?;
    if !w.has_level(level) || !w.atoms_below(m.size()) {
        return Err(Error::Precondition(format!(
            "{w} is not an element of M_{}",
            level.0
        )));
    }
    Ok(sym_class(w, &all_permutations(m.size())))
}

fn sym_class(w: &HSet, perms: &[Vec<usize>]) -> HSet {
    HSet::from_members(perms.iter().map(|f| w.apply_bijection(f)))
}

/// The first `k` level-`level` HSets, in enumeration order (node count,
/// then canonical order), that lie in pairwise distinct `Sym(M)` classes.
pub fn distinct_class_reps(m: &GSet, k: usize, level: impl Into<LevelTag>) -> Result<Vec<HSet>> {
    let LevelTag(level) = level.into();
    if k == 0 {
        return Ok(Vec::new());
    }
    check_sym_guard(m.size())?;
    let perms = all_permutations(m.size());
    let mut enumerator = SizedEnumerator::new(m.size());
    let mut seen: HashSet<HSet> = HashSet::new();
    let mut reps = Vec::with_capacity(k);
    let mut examined = 0usize;
    for size in 1..=MAX_REP_NODES {
        for h in enumerator.of_size(level, size) {
            examined += 1;
            if examined > MAX_REP_CANDIDATES {
                return Err(Error::capacity(
                    "class representative candidates",
                    MAX_REP_CANDIDATES,
                    examined,
                ));
            }
            if seen.insert(sym_class(&h, &perms)) {
                reps.push(h);
                if reps.len() == k {
                    return Ok(reps);
                }
            }
        }
    }
    Err(Error::capacity(
        "class representative node count",
        MAX_REP_NODES,
        format!("{k} classes at level {level}, found {}", reps.len()),
    ))
}

/// `⟨{…{x}…}, [w]⟩` with `n−1` wrappings; an element of `M_(n+4)`.
pub fn tagged_copy(x: &HSet, w_class: &HSet, n: usize) -> Result<HSet> {
    if n == 0 {
        return Err(Error::Precondition("tagged copy needs n ≥ 1".into()));
    }
    if !x.has_level(3) {
        return Err(Error::Precondition(format!("{x} is not at level 3")));
    }
    if !w_class.has_level(n + 2) {
        return Err(Error::Precondition(format!(
            "class {w_class} is not at level {}",
            n + 2
        )));
    }
    Ok(HSet::kuratowski_pair(&x.wrap_singletons(n - 1), w_class))
}

/// Per-orbit construction record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPlan {
    /// Label of the orbit's base point.
    pub base: String,
    /// Stabilizer of the base point.
    #[serde(rename = "H")]
    pub stabilizer: Vec<usize>,
    pub w: HSet,
    pub class: HSet,
}

/// An explicit subobject witness `X ↪ M_target_level`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCertificate {
    pub target_level: usize,
    pub n: usize,
    pub z: HSet,
    pub orbit_plan: Vec<OrbitPlan>,
    /// Image of each point of `X`, keyed by point label, in point order.
    pub map: IndexMap<String, HSet>,
}

fn check_embed_guards(m: &GSet, x: &GSet) -> Result<()> {
    if !m.same_group(x) {
        return Err(Error::GroupMismatch);
    }
    if m.group().order() > MAX_GROUP_ORDER {
        return Err(Error::capacity("|G|", MAX_GROUP_ORDER, m.group().order()));
    }
    if x.size() > MAX_X_POINTS {
        return Err(Error::capacity("|X|", MAX_X_POINTS, x.size()));
    }
    check_sym_guard(m.size())
}

/// Builds the certificate for `X` when `G_M ⊆ G_X`.
pub fn embed(m: &GSet, x: &GSet) -> Result<EmbeddingCertificate> {
    embed_with_order(m, x, &WellOrder::identity(m.size()))
}

pub fn embed_with_order(m: &GSet, x: &GSet, order: &WellOrder) -> Result<EmbeddingCertificate> {
    check_embed_guards(m, x)?;
    if !check_conditions(m, x)?.cond2 {
        return Err(Error::KernelCondition);
    }
    build_certificate(m, x, order)
}

/// Runs the construction without checking `G_M ⊆ G_X`. When the condition
/// fails the result is not a valid certificate; this exists so checkers can
/// be exercised on near-miss candidates.
pub fn embed_unchecked(m: &GSet, x: &GSet) -> Result<EmbeddingCertificate> {
    check_embed_guards(m, x)?;
    build_certificate(m, x, &WellOrder::identity(m.size()))
}

fn build_certificate(m: &GSet, x: &GSet, order: &WellOrder) -> Result<EmbeddingCertificate> {
    let z = chain_element(m, order)?;
    if x.is_empty() {
        return Ok(EmbeddingCertificate {
            target_level: 1,
            n: 0,
            z,
            orbit_plan: Vec::new(),
            map: IndexMap::new(),
        });
    }
    let orbits = x.orbits();
    let tower = CardTower::new(m.size());
    let n = tower.choose_level(orbits.len());
    // |M_(n+1)/R| ≥ c_(n+1)/m! > c_n ≥ k guarantees enough classes.
    if !tower.exceeds_scaled_predecessor(n) {
        return Err(Error::Precondition(format!(
            "class count bound fails at n = {n}"
        )));
    }
    let reps = distinct_class_reps(m, orbits.len(), n + 1)?;
    let perms = all_permutations(m.size());

    let mut images: Vec<Option<HSet>> = vec![None; x.size()];
    let mut orbit_plan = Vec::with_capacity(orbits.len());
    for (orbit, w) in orbits.iter().zip(reps) {
        let base = orbit[0];
        let stabilizer = x.stabilizer(base);
        let class = sym_class(&w, &perms);
        let hz = raw_coset_tag(m, &stabilizer, &z);
        for &p in orbit {
            let g = x.transporter(base, p).expect("p lies in the orbit of base");
            images[p] = Some(tagged_copy(&hz.act(g, m), &class, n)?);
        }
        orbit_plan.push(OrbitPlan {
            base: x.label(base),
            stabilizer: stabilizer.members().to_vec(),
            w,
            class,
        });
    }
    let map = images
        .into_iter()
        .enumerate()
        .map(|(p, h)| (x.label(p), h.expect("orbits cover X")))
        .collect();
    Ok(EmbeddingCertificate {
        target_level: n + 4,
        n,
        z,
        orbit_plan,
        map,
    })
}

/// The individual checks run by [`verify_certificate`], in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Group,
    Map,
    Level,
    Injectivity,
    Equivariance,
    Plan,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Check::Group => "group",
            Check::Map => "map",
            Check::Level => "level",
            Check::Injectivity => "injectivity",
            Check::Equivariance => "equivariance",
            Check::Plan => "plan",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub check: Check,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub failure: Option<Failure>,
}

impl VerificationReport {
    fn pass() -> Self {
        VerificationReport {
            passed: true,
            failure: None,
        }
    }

    fn fail(check: Check, detail: impl Into<String>) -> Self {
        VerificationReport {
            passed: false,
            failure: Some(Failure {
                check,
                detail: detail.into(),
            }),
        }
    }
}

/// Re-checks a certificate from scratch against `M` and `X`, reporting the
/// first failing check.
pub fn verify_certificate(m: &GSet, x: &GSet, cert: &EmbeddingCertificate) -> VerificationReport {
    match run_checks(m, x, cert) {
        Ok(()) => VerificationReport::pass(),
        Err((check, detail)) => VerificationReport::fail(check, detail),
    }
}

type CheckResult = std::result::Result<(), (Check, String)>;

fn run_checks(m: &GSet, x: &GSet, cert: &EmbeddingCertificate) -> CheckResult {
    if !m.same_group(x) {
        return Err((Check::Group, "M and X are over different groups".into()));
    }
    let group = m.group();

    // Map: exactly one image per point of X.
    if cert.map.len() != x.size() {
        return Err((
            Check::Map,
            format!("{} entries for {} points", cert.map.len(), x.size()),
        ));
    }
    let mut images = Vec::with_capacity(x.size());
    for p in 0..x.size() {
        let label = x.label(p);
        let image = cert
            .map
            .get(&label)
            .ok_or_else(|| (Check::Map, format!("no image for point {label}")))?;
        if !image.atoms_below(m.size()) {
            return Err((Check::Map, format!("image of {label} uses atoms outside M")));
        }
        images.push(image);
    }

    // Level.
    if !x.is_empty() && cert.target_level != cert.n + 4 {
        return Err((
            Check::Level,
            format!(
                "target level {} is not n+4 = {}",
                cert.target_level,
                cert.n + 4
            ),
        ));
    }
    if let Some(p) = (0..x.size()).find(|&p| !images[p].has_level(cert.target_level)) {
        return Err((
            Check::Level,
            format!("image of {} is not in M_{}", x.label(p), cert.target_level),
        ));
    }

    // Injectivity.
    let mut first: HashMap<&HSet, usize> = HashMap::with_capacity(x.size());
    for (p, image) in images.iter().enumerate() {
        if let Some(q) = first.insert(image, p) {
            return Err((
                Check::Injectivity,
                format!("{} and {} share an image", x.label(q), x.label(p)),
            ));
        }
    }

    // Equivariance: f(g·p) = g·f(p).
    for g in group.elements() {
        for p in 0..x.size() {
            if *images[x.image(g, p)] != images[p].act(g, m) {
                return Err((
                    Check::Equivariance,
                    format!(
                        "f({}·{}) ≠ {}·f({})",
                        group.element_name(g),
                        x.label(p),
                        group.element_name(g),
                        x.label(p)
                    ),
                ));
            }
        }
    }

    if !x.is_empty() {
        check_plan(m, x, cert, &images)?;
    }
    Ok(())
}

fn check_plan(m: &GSet, x: &GSet, cert: &EmbeddingCertificate, images: &[&HSet]) -> CheckResult {
    let plan_err = |detail: String| Err((Check::Plan, detail));
    let group = m.group();
    if !cert.z.has_level(2) || !cert.z.atoms_below(m.size()) {
        return plan_err("z is not an element of M_2".into());
    }
    if stabilizer_of_hset(m, &cert.z) != m.fixed_kernel() {
        return plan_err("Stab(z) ≠ G_M".into());
    }
    if cert.n == 0 {
        return plan_err("n must be at least 1".into());
    }
    let labels: HashMap<String, usize> = (0..x.size()).map(|p| (x.label(p), p)).collect();
    let mut orbit_id = vec![usize::MAX; x.size()];
    let orbits = x.orbits();
    for (i, orbit) in orbits.iter().enumerate() {
        for &p in orbit {
            orbit_id[p] = i;
        }
    }
    if cert.orbit_plan.len() != orbits.len() {
        return plan_err(format!(
            "{} plan entries for {} orbits",
            cert.orbit_plan.len(),
            orbits.len()
        ));
    }
    let mut covered = vec![false; orbits.len()];
    let mut classes: HashSet<&HSet> = HashSet::new();
    for entry in &cert.orbit_plan {
        let Some(&base) = labels.get(&entry.base) else {
            return plan_err(format!("unknown base point {}", entry.base));
        };
        if std::mem::replace(&mut covered[orbit_id[base]], true) {
            return plan_err(format!("orbit of {} planned twice", entry.base));
        }
        let h = match Subgroup::new(group, entry.stabilizer.iter().copied()) {
            Ok(h) => h,
            Err(e) => return plan_err(format!("H for {}: {e}", entry.base)),
        };
        if h != x.stabilizer(base) {
            return plan_err(format!("H is not the stabilizer of {}", entry.base));
        }
        let hz = raw_coset_tag(m, &h, &cert.z);
        if stabilizer_of_hset(m, &hz) != h {
            return plan_err(format!("Stab(Hz) ≠ H for {}", entry.base));
        }
        if !entry.w.has_level(cert.n + 1) || !entry.w.atoms_below(m.size()) {
            return plan_err(format!("w for {} is not in M_{}", entry.base, cert.n + 1));
        }
        match bij_orbit_class(m, &entry.w, cert.n + 1) {
            Ok(class) if class == entry.class => {}
            Ok(_) => return plan_err(format!("class for {} is not [w]", entry.base)),
            Err(e) => return plan_err(e.to_string()),
        }
        if let Some(g) = group
            .elements()
            .find(|&g| entry.class.act(g, m) != entry.class)
        {
            return plan_err(format!(
                "{} moves the class of {}",
                group.element_name(g),
                entry.base
            ));
        }
        if !classes.insert(&entry.class) {
            return plan_err(format!("class of {} repeats", entry.base));
        }
        match tagged_copy(&hz, &entry.class, cert.n) {
            Ok(expected) if expected == *images[base] => {}
            Ok(_) => return plan_err(format!("image of {} is not ⟨Hz, [w]⟩", entry.base)),
            Err(e) => return plan_err(e.to_string()),
        }
    }
    Ok(())
}

/// A random local change to a certificate. Used to fuzz the checker.
pub fn mutate_certificate<R: Rng>(
    cert: &EmbeddingCertificate,
    m: &GSet,
    rng: &mut R,
) -> EmbeddingCertificate {
    let mut out = cert.clone();
    let group: &Group = m.group();
    let len = out.map.len();
    loop {
        match rng.gen_range(0..9) {
            0 if len >= 2 => {
                let (i, j) = distinct_pair(rng, len);
                let a = out.map[i].clone();
                let b = std::mem::replace(&mut out.map[j], a);
                out.map[i] = b;
            }
            1 if len >= 2 => {
                let (i, j) = distinct_pair(rng, len);
                out.map[i] = out.map[j].clone();
            }
            2 if len >= 1 => {
                let i = rng.gen_range(0..len);
                let g = rng.gen_range(0..group.order());
                out.map[i] = out.map[i].act(g, m);
            }
            3 => {
                out.target_level = if out.target_level > 0 && rng.gen_bool(0.5) {
                    out.target_level - 1
                } else {
                    out.target_level + 1
                };
            }
            4 if len >= 1 => {
                let i = rng.gen_range(0..len);
                let perms = all_permutations(m.size().min(MAX_M_POINTS));
                let f = &perms[rng.gen_range(0..perms.len())];
                if m.size() <= MAX_M_POINTS {
                    out.map[i] = out.map[i].apply_bijection(f);
                }
            }
            5 if len >= 1 => {
                let i = rng.gen_range(0..len);
                let level = out.target_level.max(1);
                out.map[i] = HSet::empty().wrap_singletons(level - 1);
            }
            6 => {
                out.n = if out.n > 0 && rng.gen_bool(0.5) {
                    out.n - 1
                } else {
                    out.n + 1
                };
            }
            7 if len >= 1 => {
                let i = rng.gen_range(0..len);
                out.map.shift_remove_index(i);
            }
            8 if !out.orbit_plan.is_empty() => {
                let i = rng.gen_range(0..out.orbit_plan.len());
                out.orbit_plan[i].stabilizer = group.elements().collect();
            }
            _ => continue,
        }
        if out != *cert {
            return out;
        }
    }
}

fn distinct_pair<R: Rng>(rng: &mut R, len: usize) -> (usize, usize) {
    let i = rng.gen_range(0..len);
    let j = (i + rng.gen_range(1..len)) % len;
    (i, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn a(i: usize) -> HSet {
        HSet::atom(i)
    }

    fn set(v: Vec<HSet>) -> HSet {
        HSet::from_members(v)
    }

    fn c2() -> Arc<Group> {
        Arc::new(Group::cyclic(2))
    }

    fn swap_m(g: Arc<Group>) -> GSet {
        GSet::new(g, 2, vec![vec![0, 1], vec![1, 0]]).unwrap()
    }

    fn c3_cyclic() -> GSet {
        let g = Arc::new(Group::cyclic(3));
        GSet::new(g, 3, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap()
    }

    #[test]
    fn check_conditions_examples() {
        let g = c2();
        let m = swap_m(Arc::clone(&g));
        let x = GSet::trivial(Arc::clone(&g), 1);
        assert!(check_conditions(&m, &x).unwrap().cond2);
        assert!(
            !check_conditions(&GSet::trivial(Arc::clone(&g), 2), &m)
                .unwrap()
                .cond2
        );
        assert!(
            check_conditions(&GSet::trivial(Arc::clone(&g), 2), &GSet::trivial(g, 0))
                .unwrap()
                .cond2
        );
    }

    #[test]
    fn chain_element_examples() {
        let g = c2();
        let empty = GSet::trivial(Arc::clone(&g), 0);
        assert_eq!(
            chain_element(&empty, &WellOrder::identity(0)).unwrap(),
            set(vec![HSet::empty()])
        );
        let m = swap_m(g);
        let z = chain_element(&m, &WellOrder::identity(2)).unwrap();
        assert_eq!(
            z,
            set(vec![HSet::empty(), set(vec![a(0)]), set(vec![a(0), a(1)])])
        );
        assert!(z.has_level(2));
        let m3 = c3_cyclic();
        let z3 = chain_element(&m3, &WellOrder::identity(3)).unwrap();
        assert_eq!(z3.to_string(), "{{},{A0},{A0,A1},{A0,A1,A2}}");
        assert!(chain_element(&m3, &WellOrder::identity(2)).is_err());
    }

    #[test]
    fn stabilizer_of_hset_examples() {
        let m = swap_m(c2());
        let z = chain_element(&m, &WellOrder::identity(2)).unwrap();
        assert_eq!(stabilizer_of_hset(&m, &z), m.fixed_kernel());
        assert_eq!(stabilizer_of_hset(&m, &HSet::empty()).order(), 2);
        let m3 = c3_cyclic();
        let z3 = chain_element(&m3, &WellOrder::identity(3)).unwrap();
        assert_eq!(stabilizer_of_hset(&m3, &z3).order(), 1);
    }

    #[test]
    fn coset_tag_examples() {
        let g = c2();
        let m = swap_m(Arc::clone(&g));
        let z = chain_element(&m, &WellOrder::identity(2)).unwrap();
        assert_eq!(
            coset_tag(&m, &g.trivial_subgroup(), &z).unwrap(),
            set(vec![z.clone()])
        );
        let hz = coset_tag(&m, &g.whole(), &z).unwrap();
        assert_eq!(hz, set(vec![z.clone(), z.act(1, &m)]));
        assert_eq!(stabilizer_of_hset(&m, &hz), g.whole());

        let m3 = c3_cyclic();
        let z3 = chain_element(&m3, &WellOrder::identity(3)).unwrap();
        let hz3 = coset_tag(&m3, &m3.group().whole(), &z3).unwrap();
        assert_eq!(hz3.members().len(), 3);
        assert_eq!(stabilizer_of_hset(&m3, &hz3).order(), 3);

        let fixed = GSet::trivial(Arc::clone(&g), 2);
        assert!(matches!(
            coset_tag(&fixed, &g.trivial_subgroup(), &z),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn transitive_embed_examples() {
        let g = c2();
        let m = swap_m(Arc::clone(&g));
        let whole = transitive_embed(&m, &g.whole()).unwrap();
        assert_eq!(whole.orbit.points().len(), 1);
        let regular = transitive_embed(&m, &g.trivial_subgroup()).unwrap();
        assert_eq!(regular.orbit.points().len(), 2);
        let cosets = GSet::coset_gset(Arc::clone(&g), &g.trivial_subgroup());
        assert!(
            crate::gset::check_equivariant_injection(
                &regular.witness.map,
                &cosets,
                regular.orbit.gset()
            )
            .subobject
        );
    }

    #[test]
    fn bij_orbit_class_examples() {
        let m = swap_m(c2());
        assert_eq!(
            bij_orbit_class(&m, &HSet::empty(), 1).unwrap(),
            set(vec![HSet::empty()])
        );
        assert_eq!(
            bij_orbit_class(&m, &set(vec![a(0)]), 1).unwrap(),
            set(vec![set(vec![a(0)]), set(vec![a(1)])])
        );
        assert!(bij_orbit_class(&m, &a(0), 1).is_err());
    }

    #[test]
    fn distinct_class_reps_examples() {
        let m = swap_m(c2());
        assert_eq!(distinct_class_reps(&m, 0, 2).unwrap(), vec![]);
        assert_eq!(distinct_class_reps(&m, 1, 2).unwrap(), vec![HSet::empty()]);
        let reps = distinct_class_reps(&m, 3, 2).unwrap();
        assert_eq!(
            reps,
            vec![
                HSet::empty(),
                set(vec![HSet::empty()]),
                set(vec![set(vec![a(0)])])
            ]
        );
        let level1 = distinct_class_reps(&m, 3, 1).unwrap();
        let classes: Vec<String> = level1
            .iter()
            .map(|w| bij_orbit_class(&m, w, 1).unwrap().to_string())
            .collect();
        assert_eq!(classes, vec!["{{}}", "{{A0},{A1}}", "{{A0,A1}}"]);
        assert!(matches!(
            distinct_class_reps(&m, 4, 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn tower_examples() {
        let t = CardTower::new(2);
        let cs: Vec<TowerCard> = (0..4).map(|i| t.card(i)).collect();
        assert_eq!(
            cs,
            vec![
                TowerCard::exact(2u32),
                TowerCard::exact(4u32),
                TowerCard::exact(16u32),
                TowerCard::exact(65536u32)
            ]
        );
        assert_eq!(choose_level(3, 2), 1);
        assert_eq!(choose_level(5, 2), 2);
        assert_eq!(choose_level(1, 0), 1);
        assert_eq!(choose_level(3, 0), 3);
        // m = 3, n = 1: c_2 = 256 > c_1 · 3! = 48.
        assert_eq!(tower_card(3, 2), TowerCard::exact(256u32));
        assert!(CardTower::new(3).exceeds_scaled_predecessor(1));
    }

    #[test]
    fn tower_comparison_beyond_materialization() {
        let huge = tower_card(6, 3);
        assert!(matches!(huge, TowerCard::PowerOfTwo(_)));
        assert!(huge > tower_card(6, 2));
        assert!(tower_card(6, 4) > huge);
        assert!(huge > TowerCard::exact(u64::MAX));
        assert_eq!(
            TowerCard::pow2(TowerCard::exact(1u64 << 21)),
            TowerCard::pow2(TowerCard::exact(1u64 << 21))
        );
    }

    #[test]
    fn tagged_copy_examples() {
        let m = swap_m(c2());
        let z = chain_element(&m, &WellOrder::identity(2)).unwrap();
        let x = set(vec![z.clone()]);
        let class2 = set(vec![HSet::empty()]);
        let t1 = tagged_copy(&x, &set(vec![HSet::empty()]), 1).unwrap();
        assert_eq!(
            t1,
            set(vec![
                set(vec![x.clone()]),
                set(vec![x.clone(), class2.clone()])
            ])
        );
        assert!(t1.has_level(5));
        let class4 = bij_orbit_class(&m, &a(0).wrap_singletons(3), 3).unwrap();
        let t2 = tagged_copy(&x, &class4, 2).unwrap();
        assert!(t2.has_level(6));
        assert_eq!(
            tagged_copy(&x.act(1, &m), &class4, 2).unwrap(),
            t2.act(1, &m)
        );
        assert!(tagged_copy(&x, &class4, 1).is_err());
        assert!(tagged_copy(&z, &class2, 1).is_err());
    }

    #[test]
    fn embed_examples() {
        let g = c2();
        let m = swap_m(Arc::clone(&g));
        let z = chain_element(&m, &WellOrder::identity(2)).unwrap();
        let sz = z.act(1, &m);
        let class = set(vec![HSet::empty()]);

        let point = GSet::trivial(Arc::clone(&g), 1);
        let cert = embed(&m, &point).unwrap();
        assert_eq!(cert.target_level, 5);
        let hz = set(vec![z.clone(), sz.clone()]);
        assert_eq!(cert.map["x0"], HSet::kuratowski_pair(&hz, &class));
        assert!(verify_certificate(&m, &point, &cert).passed);

        let regular = GSet::coset_gset(Arc::clone(&g), &g.trivial_subgroup());
        let cert = embed(&m, &regular).unwrap();
        assert_eq!(cert.map["x0"], HSet::kuratowski_pair(&set(vec![z]), &class));
        assert_eq!(
            cert.map["x1"],
            HSet::kuratowski_pair(&set(vec![sz]), &class)
        );
        assert!(verify_certificate(&m, &regular, &cert).passed);

        let empty = GSet::trivial(Arc::clone(&g), 0);
        let cert = embed(&m, &empty).unwrap();
        assert_eq!(cert.target_level, 1);
        assert!(cert.map.is_empty());
        assert!(verify_certificate(&m, &empty, &cert).passed);

        assert_eq!(
            embed(&GSet::trivial(Arc::clone(&g), 2), &m),
            Err(Error::KernelCondition)
        );
    }

    #[test]
    fn verify_rejects_collapsed_and_relevelled() {
        let g = c2();
        let m = swap_m(Arc::clone(&g));
        let x = GSet::coset_gset(Arc::clone(&g), &g.trivial_subgroup());
        let cert = embed(&m, &x).unwrap();

        let mut collapsed = cert.clone();
        collapsed.map["x1"] = collapsed.map["x0"].clone();
        let r = verify_certificate(&m, &x, &collapsed);
        assert_eq!(r.failure.unwrap().check, Check::Injectivity);

        let mut relevelled = cert.clone();
        relevelled.target_level = 6;
        let r = verify_certificate(&m, &x, &relevelled);
        assert_eq!(r.failure.unwrap().check, Check::Level);

        let mut swapped = cert.clone();
        let a0 = swapped.map["x0"].clone();
        swapped.map["x0"] = swapped.map["x1"].clone();
        swapped.map["x1"] = a0;
        let r = verify_certificate(&m, &x, &swapped);
        assert_eq!(r.failure.unwrap().check, Check::Plan);
    }

    #[test]
    fn reordering_changes_certificate_not_validity() {
        let s3 = Arc::new(Group::symmetric(3));
        let perms = all_permutations(3);
        let m = GSet::new(Arc::clone(&s3), 3, perms).unwrap();
        let x = GSet::coset_gset(Arc::clone(&s3), &s3.subgroup_generated(&[1]).unwrap());
        let a = embed_with_order(&m, &x, &WellOrder::identity(3)).unwrap();
        let b = embed_with_order(&m, &x, &WellOrder::new(vec![2, 0, 1]).unwrap()).unwrap();
        assert_ne!(a, b);
        assert!(verify_certificate(&m, &x, &a).passed);
        assert!(verify_certificate(&m, &x, &b).passed);
    }

    #[test]
    fn certificate_json_shape() {
        let g = c2();
        let m = swap_m(Arc::clone(&g));
        let cert = embed(&m, &GSet::trivial(g, 1)).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["target_level"], 5);
        assert_eq!(json["n"], 1);
        assert_eq!(json["z"], serde_json::json!([[], [0], [0, 1]]));
        assert_eq!(json["orbit_plan"][0]["H"], serde_json::json!([0, 1]));
        assert_eq!(json["orbit_plan"][0]["base"], "x0");
        let back: EmbeddingCertificate = serde_json::from_value(json).unwrap();
        assert_eq!(back, cert);
    }
}
