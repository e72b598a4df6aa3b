//! Reproducible random corpus of nested symmetric domain pairs, and the
//! cross-module verification suites that sweep over it.
//!
//! Generation is deterministic: a xoshiro256** stream seeded through
//! splitmix64 from the config seed, with rejection sampling against
//! geometric separation rules and rasterization validity at every
//! configured resolution. Suites fan out over instances with rayon and
//! merge results in input order, so reports are byte-stable for a given
//! config.

use rand::Rng;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{check_nested, rasterize, Box2, DomainSpec, SymmetricDomainGrid};
use crate::homology::DomainAnalysis;
use crate::planar::{class_from_cycle, cycle_from_class, separating_class, H1Class};
use crate::quat::{ImaginaryUnit, Quaternion};
use crate::runge::{runge_decide, RungeError};
use crate::stem::{norm_bounds_check, ComplexRational, PoleTerm, RationalStem};
use num_complex::Complex64;

#[derive(Clone, Debug, Serialize)]
pub struct CorpusConfig {
    pub seed: u64,
    /// Number of domain pairs; each is exercised at every resolution.
    pub count: usize,
    pub resolutions: Vec<usize>,
    /// Inclusive range of hole primitives carved from the outer shape.
    pub min_primitives: usize,
    pub max_primitives: usize,
    pub box2: Box2,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 42,
            count: 200,
            resolutions: vec![65, 129, 257],
            min_primitives: 1,
            max_primitives: 3,
            box2: Box2::square(2.5),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DomainPair {
    pub name: String,
    pub d: DomainSpec,
    pub d1: DomainSpec,
}

/// One decided instance; the stable CSV row of `cmd verify`.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictRecord {
    pub pair: String,
    pub resolution: usize,
    /// FNV-1a over resolution, box bits, and both masks.
    pub hash: String,
    pub runge: bool,
    pub restriction_injective: bool,
    pub induced_injective: bool,
    pub components_meet: bool,
    pub merged_components_meet: bool,
    pub b1_d: usize,
    pub b2_d: usize,
    pub b3_d: usize,
    pub b1_d1: usize,
    pub b2_d1: usize,
    pub b3_d1: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub instances: usize,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &str) -> Self {
        SuiteOutcome {
            name: name.to_string(),
            instances: 0,
            failures: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

// --- generation --------------------------------------------------------------

#[derive(Clone, Debug)]
enum Hole {
    // mirror-symmetric pair of closed discs (overlapping pairs allowed)
    MirrorDiscs { cx: f64, cy: f64, r: f64 },
    AxisDisc { cx: f64, r: f64 },
    Puncture { cx: f64 },
    Slab { t: f64 },
}

impl Hole {
    fn spec(&self) -> DomainSpec {
        match *self {
            Hole::MirrorDiscs { cx, cy, r } => DomainSpec::Symmetrize {
                of: Box::new(DomainSpec::ClosedDisc { center: [cx, cy], radius: r }),
            },
            Hole::AxisDisc { cx, r } => DomainSpec::ClosedDisc { center: [cx, 0.0], radius: r },
            Hole::Puncture { cx } => DomainSpec::ClosedDisc { center: [cx, 0.0], radius: 0.0 },
            Hole::Slab { t } => DomainSpec::ClosedStrip { y: [-t, t] },
        }
    }

    // generous circumscribing data for separation tests: (cx, |cy|, r)
    fn extent(&self) -> (f64, f64, f64) {
        match *self {
            Hole::MirrorDiscs { cx, cy, r } => (cx, cy, r),
            Hole::AxisDisc { cx, r } => (cx, 0.0, r),
            Hole::Puncture { cx } => (cx, 0.0, 0.0),
            Hole::Slab { .. } => (0.0, 0.0, 0.0),
        }
    }

    fn shrunk(&self, rng: &mut Xoshiro256StarStar) -> Option<Hole> {
        match *self {
            Hole::MirrorDiscs { cx, cy, r } => {
                if rng.gen_bool(0.4) {
                    None
                } else {
                    Some(Hole::MirrorDiscs { cx, cy, r: r * rng.gen_range(0.35..0.7) })
                }
            }
            Hole::AxisDisc { cx, r } => {
                if rng.gen_bool(0.4) {
                    None
                } else {
                    Some(Hole::AxisDisc { cx, r: r * rng.gen_range(0.35..0.7) })
                }
            }
            Hole::Puncture { cx } => rng.gen_bool(0.5).then_some(Hole::Puncture { cx }),
            Hole::Slab { t } => {
                if rng.gen_bool(0.4) {
                    None
                } else {
                    Some(Hole::Slab { t: t * rng.gen_range(0.4..0.7) })
                }
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Outer {
    Whole,
    Disc { cx: f64, r: f64 },
    Rect { w: f64, h: f64 },
}

impl Outer {
    fn spec(&self) -> DomainSpec {
        match *self {
            Outer::Whole => DomainSpec::All,
            Outer::Disc { cx, r } => DomainSpec::Disc { center: [cx, 0.0], radius: r },
            Outer::Rect { w, h } => DomainSpec::Rect { x: [-w, w], y: [-h, h] },
        }
    }

    // does the disc (cx, +-cy, r) with a clearance ring fit inside?
    fn admits(&self, cx: f64, cy: f64, r: f64, ring: f64) -> bool {
        match *self {
            Outer::Whole => cx.abs() + r + ring <= 2.1 && cy + r + ring <= 2.1,
            Outer::Disc { cx: ox, r: or } => {
                ((cx - ox).powi(2) + cy.powi(2)).sqrt() + r + ring <= or
            }
            Outer::Rect { w, h } => cx.abs() + r + ring <= w && cy + r + ring <= h,
        }
    }

    fn grown(&self, rng: &mut Xoshiro256StarStar) -> Outer {
        if rng.gen_bool(0.5) {
            return *self;
        }
        let g = rng.gen_range(0.01..0.12);
        match *self {
            Outer::Whole => Outer::Whole,
            Outer::Disc { cx, r } => Outer::Disc { cx, r: (r + g).min(2.25) },
            Outer::Rect { w, h } => Outer::Rect { w: (w + g).min(2.25), h: (h + g).min(2.25) },
        }
    }
}

fn draw_holes(rng: &mut Xoshiro256StarStar, outer: Outer, n: usize) -> Option<Vec<Hole>> {
    let mut holes: Vec<Hole> = Vec::new();
    let gap = 0.25;
    'outer: for _ in 0..n {
        for _attempt in 0..40 {
            let kind = rng.gen_range(0..100u32);
            let cand = if kind < 55 {
                let r: f64 = rng.gen_range(0.3..0.5);
                let cx = rng.gen_range(-1.3..1.3);
                let cy: f64 = rng.gen_range(0.0..1.3);
                // reject the band where a disc grazes its own mirror image
                if cy > 0.0 && (2.0 * cy - 2.0 * r).abs() < gap {
                    continue;
                }
                Hole::MirrorDiscs { cx, cy, r }
            } else if kind < 80 {
                Hole::AxisDisc { cx: rng.gen_range(-1.3..1.3), r: rng.gen_range(0.3..0.5) }
            } else if kind < 92 {
                Hole::Puncture { cx: rng.gen_range(-1.3..1.3) }
            } else {
                Hole::Slab { t: rng.gen_range(0.2..0.35) }
            };

            let (cx, cy, r) = cand.extent();
            let fits = match cand {
                Hole::Slab { .. } => {
                    matches!(outer, Outer::Disc { .. } | Outer::Rect { .. })
                        && !holes.iter().any(|h| matches!(h, Hole::Slab { .. }))
                }
                _ => outer.admits(cx, cy, r, 0.3),
            };
            if !fits {
                continue;
            }
            let separated = holes.iter().all(|h| match (h, &cand) {
                (Hole::Slab { t }, _) | (_, Hole::Slab { t }) => {
                    // everything else must clear the slab vertically; this
                    // also kicks out axis-touching holes, which the slab
                    // would swallow
                    let (_, ocy, or) = if matches!(h, Hole::Slab { .. }) {
                        cand.extent()
                    } else {
                        h.extent()
                    };
                    ocy - or >= t + gap
                }
                _ => {
                    let (hx, hy, hr) = h.extent();
                    let min_gap = hr + r + gap;
                    let d_direct = ((hx - cx).powi(2) + (hy - cy).powi(2)).sqrt();
                    let d_mirror = ((hx - cx).powi(2) + (hy + cy).powi(2)).sqrt();
                    d_direct >= min_gap && d_mirror >= min_gap
                }
            });
            if separated {
                holes.push(cand);
                continue 'outer;
            }
        }
        return None; // could not place this hole; redraw the whole pair
    }
    Some(holes)
}

fn assemble(outer: Outer, holes: &[Hole]) -> DomainSpec {
    let base = outer.spec();
    if holes.is_empty() {
        return base;
    }
    let minus = DomainSpec::Union { parts: holes.iter().map(Hole::spec).collect() };
    DomainSpec::Difference { from: Box::new(base), minus: Box::new(minus) }
}

fn pair_is_valid(pair: &DomainPair, config: &CorpusConfig) -> bool {
    for &res in &config.resolutions {
        let (Ok(d), Ok(d1)) = (
            rasterize(&pair.d, config.box2, res, res),
            rasterize(&pair.d1, config.box2, res, res),
        ) else {
            return false;
        };
        if d.inside_count() == 0 || !d.is_well_composed() || !d1.is_well_composed() {
            return false;
        }
        if check_nested(&d, &d1) != Ok(true) {
            return false;
        }
    }
    true
}

/// Deterministic corpus for the given config.
///
/// # Panics
/// Panics if a pair cannot be generated after many rejections; the built-in
/// parameter ranges cannot reach that.
pub fn generate_corpus(config: &CorpusConfig) -> Vec<DomainPair> {
    assert!(
        config.min_primitives <= config.max_primitives,
        "empty primitive-count range"
    );
    let mut rng = Xoshiro256StarStar::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.count);
    for idx in 0..config.count {
        let mut found = None;
        for _attempt in 0..400 {
            let outer = match rng.gen_range(0..100u32) {
                0..=49 => Outer::Disc {
                    cx: rng.gen_range(-0.25..0.25),
                    r: rng.gen_range(1.7..2.15),
                },
                50..=79 => Outer::Rect {
                    w: rng.gen_range(1.6..2.15),
                    h: rng.gen_range(1.4..2.15),
                },
                _ => Outer::Whole,
            };
            let n = rng.gen_range(config.min_primitives..=config.max_primitives);
            let Some(holes) = draw_holes(&mut rng, outer, n) else {
                continue;
            };
            let shrunk: Vec<Hole> = holes.iter().filter_map(|h| h.shrunk(&mut rng)).collect();
            let pair = DomainPair {
                name: format!("pair-{idx:03}"),
                d: assemble(outer, &holes),
                d1: assemble(outer.grown(&mut rng), &shrunk),
            };
            if pair_is_valid(&pair, config) {
                found = Some(pair);
                break;
            }
        }
        out.push(found.expect("corpus generation exhausted its rejection budget"));
    }
    out
}

/// FNV-1a fingerprint of a rasterized pair.
pub fn pair_hash(d: &SymmetricDomainGrid, d1: &SymmetricDomainGrid) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    let mut eat = |byte: u8| {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    for v in [d.nx() as u64, d.ny() as u64] {
        v.to_le_bytes().into_iter().for_each(&mut eat);
    }
    for v in [d.box2().x_min, d.box2().x_max, d.box2().y_min, d.box2().y_max] {
        v.to_bits().to_le_bytes().into_iter().for_each(&mut eat);
    }
    for g in [d, d1] {
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                eat(g.inside(i, j) as u8);
            }
        }
    }
    h
}

// --- suites ------------------------------------------------------------------

fn instances(config: &CorpusConfig) -> Vec<(DomainPair, usize)> {
    let pairs = generate_corpus(config);
    let mut out = Vec::with_capacity(pairs.len() * config.resolutions.len());
    for p in pairs {
        for &res in &config.resolutions {
            out.push((p.clone(), res));
        }
    }
    out
}

fn warn_if_empty(outcome: &mut SuiteOutcome) {
    if outcome.instances == 0 {
        outcome.warnings.push("empty corpus: vacuous pass".to_string());
    }
}

fn analyze_pair(
    pair: &DomainPair,
    box2: Box2,
    res: usize,
) -> Result<(DomainAnalysis, DomainAnalysis), String> {
    let d = rasterize(&pair.d, box2, res, res).map_err(|e| format!("{}: {e}", pair.name))?;
    let d1 = rasterize(&pair.d1, box2, res, res).map_err(|e| format!("{}: {e}", pair.name))?;
    Ok((DomainAnalysis::new(d), DomainAnalysis::new(d1)))
}

/// Runs the four-criteria decision on every instance. `inject_bug` flips
/// the first instance's restriction verdict in the record to prove the
/// agreement check can fail.
pub fn equivalence_suite(
    config: &CorpusConfig,
    inject_bug: bool,
) -> (SuiteOutcome, Vec<VerdictRecord>) {
    let mut outcome = SuiteOutcome::new("equivalence");
    let insts = instances(config);
    outcome.instances = insts.len();
    warn_if_empty(&mut outcome);

    let results: Vec<Result<VerdictRecord, String>> = insts
        .par_iter()
        .map(|(pair, res)| {
            let (d, d1) = analyze_pair(pair, config.box2, *res)?;
            let report = match runge_decide(&d, &d1) {
                Ok(r) => r,
                Err(RungeError::EquivalenceViolation(msg)) => {
                    return Err(format!("{} @{res}: criteria disagree: {msg}", pair.name))
                }
                Err(e) => return Err(format!("{} @{res}: {e}", pair.name)),
            };
            let (bd, bd1) = (d.betti(), d1.betti());
            Ok(VerdictRecord {
                pair: pair.name.clone(),
                resolution: *res,
                hash: format!("{:016x}", pair_hash(d.grid(), d1.grid())),
                runge: report.runge,
                restriction_injective: report.restriction_injective,
                induced_injective: report.h1_injective && report.h3_injective,
                components_meet: report.components_meet,
                merged_components_meet: report.merged_components_meet,
                b1_d: bd.b1,
                b2_d: bd.b2,
                b3_d: bd.b3,
                b1_d1: bd1.b1,
                b2_d1: bd1.b2,
                b3_d1: bd1.b3,
            })
        })
        .collect();

    let mut records = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(msg) => outcome.failures.push(msg),
        }
    }
    if inject_bug {
        if let Some(rec) = records.first_mut() {
            rec.restriction_injective = !rec.restriction_injective;
        }
    }
    for rec in &records {
        let vs = [
            rec.restriction_injective,
            rec.induced_injective,
            rec.components_meet,
            rec.merged_components_meet,
        ];
        if vs.iter().any(|&v| v != vs[0]) {
            outcome
                .failures
                .push(format!("{} @{}: recorded verdicts disagree", rec.pair, rec.resolution));
        }
    }
    (outcome, records)
}

/// Rank identities of the axis split and of the cokernel presentation, on
/// every corpus domain at every resolution.
pub fn exact_sequence_suite(config: &CorpusConfig) -> SuiteOutcome {
    let mut outcome = SuiteOutcome::new("exact-sequence");
    let insts = instances(config);
    outcome.instances = insts.len() * 2;
    warn_if_empty(&mut outcome);

    let failures: Vec<String> = insts
        .par_iter()
        .flat_map(|(pair, res)| {
            let mut local = Vec::new();
            match analyze_pair(pair, config.box2, *res) {
                Err(e) => local.push(e),
                Ok((d, d1)) => {
                    for (tag, a) in [("D", &d), ("D1", &d1)] {
                        let split = a.axis_split_check();
                        if !split.ok {
                            local.push(format!(
                                "{} {tag} @{res}: axis split failed: {split:?}",
                                pair.name
                            ));
                        }
                        let pres = a.h3_presentation();
                        let b = a.betti();
                        let hhat = a.hhat0();
                        if pres.rank != b.b3 || pres.rank != a.upper_h1_rank() + hhat.rank {
                            local.push(format!(
                                "{} {tag} @{res}: cokernel rank {} vs b3 {} vs split {}+{}",
                                pair.name,
                                pres.rank,
                                b.b3,
                                a.upper_h1_rank(),
                                hhat.rank
                            ));
                        }
                    }
                }
            }
            local
        })
        .collect();
    outcome.failures = failures;
    outcome
}

/// Smith diagonals of every relation presentation stay in {0, 1}.
pub fn torsion_suite(config: &CorpusConfig) -> SuiteOutcome {
    let mut outcome = SuiteOutcome::new("torsion");
    let insts = instances(config);
    outcome.instances = insts.len() * 2;
    warn_if_empty(&mut outcome);

    let failures: Vec<String> = insts
        .par_iter()
        .flat_map(|(pair, res)| {
            let mut local = Vec::new();
            match analyze_pair(pair, config.box2, *res) {
                Err(e) => local.push(e),
                Ok((d, d1)) => {
                    for (tag, a) in [("D", &d), ("D1", &d1)] {
                        let pres = a.h3_presentation();
                        if !pres.torsion_free
                            || pres.snf_diagonal.iter().any(|&s| s != 0 && s != 1)
                        {
                            local.push(format!(
                                "{} {tag} @{res}: torsion in diagonal {:?}",
                                pair.name, pres.snf_diagonal
                            ));
                        }
                    }
                }
            }
            local
        })
        .collect();
    outcome.failures = failures;
    outcome
}

fn collars_ok(a: &DomainAnalysis) -> bool {
    // mirrors the insulation demand of cycle construction
    a.atlas().bounded().iter().all(|&b| {
        separating_class(a.atlas(), b)
            .and_then(|one| cycle_from_class(a.grid(), a.atlas(), &one))
            .is_ok()
    })
}

/// Class -> cycle -> class and cycle -> class -> cycle identities over all
/// classes with entries in {-lim..lim} on qualifying corpus domains.
pub fn roundtrip_suite(config: &CorpusConfig, domains: usize, lim: i64) -> SuiteOutcome {
    let mut outcome = SuiteOutcome::new("roundtrip");
    let pairs = generate_corpus(config);
    if pairs.is_empty() || domains == 0 {
        warn_if_empty(&mut outcome);
        return outcome;
    }
    let res = config.resolutions.iter().copied().min().unwrap_or(65);

    // qualifying: 1..=3 bounded components, all insulated enough to draw
    let mut picked = Vec::new();
    'scan: for pair in &pairs {
        for spec in [&pair.d, &pair.d1] {
            if picked.len() >= domains {
                break 'scan;
            }
            let Ok(g) = rasterize(spec, config.box2, res, res) else { continue };
            let a = DomainAnalysis::new(g);
            let nb = a.atlas().bounded().len();
            if (1..=3).contains(&nb) && collars_ok(&a) {
                picked.push(a);
            }
        }
    }
    if picked.len() < domains {
        outcome.failures.push(format!(
            "only {} of {domains} requested domains qualify for cycle drawing",
            picked.len()
        ));
    }

    let failures: Vec<String> = picked
        .par_iter()
        .enumerate()
        .flat_map(|(di, a)| {
            let mut local = Vec::new();
            let nb = a.atlas().bounded().len();
            let span = (2 * lim + 1) as usize;
            let total = span.pow(nb as u32);
            for code in 0..total {
                let mut c = code;
                let values: Vec<i64> = (0..nb)
                    .map(|_| {
                        let v = (c % span) as i64 - lim;
                        c /= span;
                        v
                    })
                    .collect();
                let class = H1Class { values };
                let cycle = match cycle_from_class(a.grid(), a.atlas(), &class) {
                    Ok(c) => c,
                    Err(e) => {
                        local.push(format!("domain {di}: cycle_from_class {e}"));
                        continue;
                    }
                };
                match class_from_cycle(a.grid(), a.atlas(), &cycle) {
                    Ok(back) if back == class => {}
                    Ok(back) => {
                        local.push(format!(
                            "domain {di}: class {:?} came back as {:?}",
                            class.values, back.values
                        ));
                        continue;
                    }
                    Err(e) => {
                        local.push(format!("domain {di}: class_from_cycle {e}"));
                        continue;
                    }
                }
                // converse: re-drawing the read class reproduces the cycle
                match cycle_from_class(a.grid(), a.atlas(), &class) {
                    Ok(again) if again.canonicalized() == cycle.canonicalized() => {}
                    Ok(_) => local.push(format!(
                        "domain {di}: cycle for {:?} not reproduced",
                        class.values
                    )),
                    Err(e) => local.push(format!("domain {di}: redraw {e}")),
                }
            }
            local
        })
        .collect();
    outcome.instances = picked.len();
    outcome.failures.extend(failures);
    warn_if_empty(&mut outcome);
    outcome
}

fn random_symmetric_scalar(rng: &mut Xoshiro256StarStar) -> ComplexRational {
    let deg = rng.gen_range(0..=3);
    let poly: Vec<Complex64> =
        (0..=deg).map(|_| Complex64::new(rng.gen_range(-2.0..2.0), 0.0)).collect();
    let mut poles = Vec::new();
    for _ in 0..rng.gen_range(0..=2u32) {
        let order = rng.gen_range(1..=3);
        if rng.gen_bool(0.3) {
            poles.push(PoleTerm {
                location: Complex64::new(rng.gen_range(-2.0..2.0), 0.0),
                order,
                coeff: Complex64::new(rng.gen_range(-2.0..2.0), 0.0),
            });
        } else {
            let location =
                Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..1.5));
            let coeff =
                Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            poles.push(PoleTerm { location, order, coeff });
            poles.push(PoleTerm { location: location.conj(), order, coeff: coeff.conj() });
        }
    }
    ComplexRational::new(poly, poles)
}

fn random_stem(rng: &mut Xoshiro256StarStar) -> RationalStem {
    let n = rng.gen_range(1..=3);
    let terms = (0..n)
        .map(|_| {
            let q = Quaternion::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            (random_symmetric_scalar(rng), q)
        })
        .collect();
    RationalStem::new(terms).expect("constructed scalars are symmetric")
}

/// Two-sided sqrt(2) norm comparison between stem values and slice values
/// on random stems, points, and units.
pub fn norm_lemma_suite(seed: u64, samples: usize, slack: f64) -> SuiteOutcome {
    let mut outcome = SuiteOutcome::new("norm-lemma");
    outcome.instances = samples;
    warn_if_empty(&mut outcome);
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let per_stem = 20;
    let mut done = 0usize;
    while done < samples {
        let stem = random_stem(&mut rng);
        let batch = per_stem.min(samples - done);
        let mut pts = Vec::with_capacity(batch);
        while pts.len() < batch {
            let x = rng.gen_range(-2.4..2.4);
            let y = rng.gen_range(-2.4..2.4);
            if stem.distance_to_poles(Complex64::new(x, y)) < 0.05
                || stem.distance_to_poles(Complex64::new(x, -y)) < 0.05
            {
                continue;
            }
            let u = ImaginaryUnit::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            match u {
                Some(u) => pts.push((x, y, u)),
                None => continue,
            }
        }
        match norm_bounds_check(&stem, &pts, slack) {
            Ok(report) if report.ok => {}
            Ok(report) => outcome.failures.push(format!(
                "sample {done}: violation {:.3e} exceeds slack {slack:.1e}",
                report.worst_violation
            )),
            Err(e) => outcome.failures.push(format!("sample {done}: {e}")),
        }
        done += batch;
    }
    outcome
}

/// Stable CSV of records: fixed header, one line per instance, no floats.
pub fn records_to_csv(records: &[VerdictRecord]) -> String {
    let mut out = String::from(
        "pair,resolution,hash,runge,restriction_injective,induced_injective,\
         components_meet,merged_components_meet,b1_d,b2_d,b3_d,b1_d1,b2_d1,b3_d1\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.pair,
            r.resolution,
            r.hash,
            r.runge,
            r.restriction_injective,
            r.induced_injective,
            r.components_meet,
            r.merged_components_meet,
            r.b1_d,
            r.b2_d,
            r.b3_d,
            r.b1_d1,
            r.b2_d1,
            r.b3_d1,
        ));
    }
    out
}
