//! Fuchsian groups given by generators: enumeration of orbit points in
//! distance balls, the orbit-counting bound, and surface constants derived
//! from the tangle-free parameter.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{compose, distance, Isometry, Point};

/// Default cap on the number of nodes visited by an enumeration.
pub const DEFAULT_FRONTIER_CAP: usize = 10_000_000;

/// Grid used to hash matrices for deduplication.
const HASH_GRID: f64 = 1e-7;
/// Two matrices closer than this (projectively) are the same element.
const ELEMENT_TOL: f64 = 1e-8;

/// On-disk group definition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    /// Row-major `[a, b, c, d]` entries.
    pub generators: Vec<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub includes_inverses: bool,
    /// The group is known to be free on its generators.
    #[serde(default)]
    pub free: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injrad_hint: Option<f64>,
    #[serde(default, rename = "tanglefree_L_hint", skip_serializing_if = "Option::is_none")]
    pub tanglefree_l_hint: Option<f64>,
}

/// One letter of a group word: a generator index raised to `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub exponent: i8,
}

#[derive(Clone, Debug)]
pub struct GroupPresentation {
    pub name: String,
    pub generators: Vec<Isometry>,
    pub labels: Vec<String>,
    /// When set, the generator list is already closed under inverses and
    /// words only use positive exponents.
    pub includes_inverses: bool,
    pub free: bool,
    pub injrad_hint: Option<f64>,
    pub tanglefree_l_hint: Option<f64>,
    letters: Vec<Letter>,
    letter_inverse: Vec<usize>,
}

impl GroupPresentation {
    pub fn new(name: impl Into<String>, generators: Vec<Isometry>, free: bool) -> Result<Self> {
        let labels = default_labels(generators.len());
        Self::build(name.into(), generators, labels, false, free, None, None)
    }

    fn build(
        name: String,
        generators: Vec<Isometry>,
        labels: Vec<String>,
        includes_inverses: bool,
        free: bool,
        injrad_hint: Option<f64>,
        tanglefree_l_hint: Option<f64>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidGeometry("group needs at least one generator".into()));
        }
        if labels.len() != generators.len() {
            return Err(Error::invalid("labels", "one label per generator required"));
        }
        for (g, label) in generators.iter().zip(&labels) {
            if (g.det() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidGeometry(format!("generator {label} has det {}", g.det())));
            }
            if g.is_identity(1e-9) {
                return Err(Error::InvalidGeometry(format!("generator {label} is the identity")));
            }
        }
        let mut letters = Vec::new();
        let mut letter_inverse = Vec::new();
        if includes_inverses {
            for i in 0..generators.len() {
                letters.push(Letter {
                    generator: i,
                    exponent: 1,
                });
            }
            for (i, g) in generators.iter().enumerate() {
                let inv = g.inverse();
                let j = generators.iter().position(|h| h.approx_eq(&inv, 1e-8)).ok_or_else(|| {
                    Error::InvalidGeometry(format!(
                        "generator {} has no inverse in a list flagged as closed under inverses",
                        labels[i]
                    ))
                })?;
                letter_inverse.push(j);
            }
        } else {
            for i in 0..generators.len() {
                letters.push(Letter {
                    generator: i,
                    exponent: 1,
                });
                letters.push(Letter {
                    generator: i,
                    exponent: -1,
                });
                letter_inverse.push(2 * i + 1);
                letter_inverse.push(2 * i);
            }
        }
        Ok(GroupPresentation {
            name,
            generators,
            labels,
            includes_inverses,
            free,
            injrad_hint,
            tanglefree_l_hint,
            letters,
            letter_inverse,
        })
    }

    pub fn from_file(file: GroupFile) -> Result<Self> {
        let generators = file
            .generators
            .iter()
            .map(|m| Isometry::from_row_major(*m))
            .collect::<Result<Vec<_>>>()?;
        let labels = file.labels.unwrap_or_else(|| default_labels(generators.len()));
        Self::build(
            file.name,
            generators,
            labels,
            file.includes_inverses,
            file.free,
            file.injrad_hint,
            file.tanglefree_l_hint,
        )
    }

    pub fn from_json_str(s: &str, origin: &str) -> Result<Self> {
        let file: GroupFile = serde_json::from_str(s).map_err(|source| Error::Json {
            path: origin.to_string(),
            source,
        })?;
        Self::from_file(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            name: self.name.clone(),
            generators: self.generators.iter().map(|g| g.to_row_major()).collect(),
            labels: Some(self.labels.clone()),
            includes_inverses: self.includes_inverses,
            free: self.free,
            injrad_hint: self.injrad_hint,
            tanglefree_l_hint: self.tanglefree_l_hint,
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter_matrix(&self, letter: Letter) -> Isometry {
        let g = self.generators[letter.generator];
        if letter.exponent < 0 {
            g.inverse()
        } else {
            g
        }
    }

    /// Product of the letters of `word`, left to right.
    pub fn evaluate(&self, word: &[Letter]) -> Isometry {
        word.iter()
            .fold(Isometry::IDENTITY, |acc, l| compose(&acc, &self.letter_matrix(*l)))
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "e".to_string();
        }
        word.iter()
            .map(|l| {
                if l.exponent < 0 {
                    format!("{}^-1", self.labels[l.generator])
                } else {
                    self.labels[l.generator].clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Largest displacement `d(w, g w)` over the alphabet.
    pub fn max_displacement(&self, w: Point) -> f64 {
        self.letters
            .iter()
            .map(|l| distance(w, self.letter_matrix(*l).apply(w)))
            .fold(0.0, f64::max)
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("g{i}")
            }
        })
        .collect()
}

const CYCLIC_JSON: &str = include_str!("../data/groups/cyclic.json");
const PINGPONG_JSON: &str = include_str!("../data/groups/pingpong.json");
const BOLZA_JSON: &str = include_str!("../data/groups/bolza.json");

/// Names of the groups shipped with the crate.
pub const BUILTIN_GROUPS: [&str; 3] = ["cyclic", "pingpong", "bolza"];

/// One of the shipped example groups: `cyclic` (translation length 1),
/// `pingpong` (free group on two length-3 translations with perpendicular
/// axes through `i`) and `bolza` (genus-2 octagon side pairings).
pub fn builtin_group(name: &str) -> Option<GroupPresentation> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    let text = match stem {
        "cyclic" => CYCLIC_JSON,
        "pingpong" => PINGPONG_JSON,
        "bolza" => BOLZA_JSON,
        _ => return None,
    };
    GroupPresentation::from_json_str(text, stem).ok()
}

/// The cyclic group generated by a translation of length `ell` along the
/// imaginary axis.
pub fn cyclic_group(ell: f64) -> GroupPresentation {
    GroupPresentation::new(format!("cyclic({ell})"), vec![Isometry::translation(ell)], true)
        .expect("translation is a valid generator")
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub matrix: Isometry,
    pub word: Vec<Letter>,
}

/// An element of an enumerated ball together with `d(z, γ w)`.
#[derive(Clone, Debug)]
pub struct BallElement {
    pub element: GroupElement,
    pub distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Breadth-first search over reduced words, expanding only nodes with
    /// `d(z, γw) <= radius + max_displacement(w)`.
    Pruned,
    /// Every reduced word up to the given length.
    Brute { max_word_len: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    pub mode: SearchMode,
    pub frontier_cap: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            mode: SearchMode::Pruned,
            frontier_cap: DEFAULT_FRONTIER_CAP,
        }
    }
}

impl EnumerateOptions {
    pub fn brute(max_word_len: usize) -> Self {
        EnumerateOptions {
            mode: SearchMode::Brute { max_word_len },
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    matrix: Isometry,
    parent: usize,
    letter: usize,
    len: usize,
}

const ROOT: usize = usize::MAX;

/// Set of group elements keyed by sign-normalized matrices on a `1e-7` grid.
#[derive(Default)]
struct ElementSet {
    buckets: HashMap<[i64; 4], Vec<usize>>,
}

impl ElementSet {
    fn keys(m: &Isometry) -> Vec<[i64; 4]> {
        let entries = m.sign_normalized().to_row_major();
        let mut keys = vec![[0i64; 4]];
        for (k, v) in entries.iter().enumerate() {
            let scaled = v / HASH_GRID;
            let main = scaled.round();
            let frac = scaled - main;
            let alt = if frac.abs() > 0.4 {
                Some(main + frac.signum())
            } else {
                None
            };
            let mut next = Vec::with_capacity(keys.len() * 2);
            for key in &keys {
                let mut a = *key;
                a[k] = main as i64;
                next.push(a);
                if let Some(alt) = alt {
                    let mut b = *key;
                    b[k] = alt as i64;
                    next.push(b);
                }
            }
            keys = next;
        }
        keys
    }

    fn find(&self, m: &Isometry, nodes: &[Node]) -> Option<usize> {
        for key in Self::keys(m) {
            if let Some(ids) = self.buckets.get(&key) {
                if let Some(&id) = ids.iter().find(|&&id| nodes[id].matrix.approx_eq(m, ELEMENT_TOL)) {
                    return Some(id);
                }
            }
        }
        None
    }

    fn insert(&mut self, m: &Isometry, id: usize) {
        let key = Self::keys(m)[0];
        self.buckets.entry(key).or_default().push(id);
    }
}

struct Search<'a> {
    group: &'a GroupPresentation,
    nodes: Vec<Node>,
    seen: ElementSet,
    cap: usize,
}

impl<'a> Search<'a> {
    fn new(group: &'a GroupPresentation, cap: usize) -> Self {
        let mut seen = ElementSet::default();
        let root = Node {
            matrix: Isometry::IDENTITY,
            parent: ROOT,
            letter: 0,
            len: 0,
        };
        seen.insert(&root.matrix, 0);
        Search {
            group,
            nodes: vec![root],
            seen,
            cap,
        }
    }

    fn word(&self, mut id: usize) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.nodes[id].len);
        while self.nodes[id].parent != ROOT {
            out.push(self.group.letters[self.nodes[id].letter]);
            id = self.nodes[id].parent;
        }
        out.reverse();
        out
    }

    /// Children of each frontier node, computed in parallel; order is fixed
    /// by frontier position then letter index.
    fn expand(&self, frontier: &[usize]) -> Vec<Node> {
        let group = self.group;
        let nodes = &self.nodes;
        frontier
            .par_iter()
            .flat_map_iter(|&id| {
                let parent = nodes[id];
                let forbidden = if parent.parent == ROOT {
                    None
                } else {
                    Some(group.letter_inverse[parent.letter])
                };
                group.letters.iter().enumerate().filter_map(move |(li, l)| {
                    if Some(li) == forbidden {
                        return None;
                    }
                    Some(Node {
                        matrix: compose(&parent.matrix, &group.letter_matrix(*l)),
                        parent: id,
                        letter: li,
                        len: parent.len + 1,
                    })
                })
            })
            .collect()
    }

    /// Adds a child unless its element is already known. Returns the new id.
    fn admit(&mut self, child: Node) -> Result<Option<usize>> {
        if let Some(existing) = self.seen.find(&child.matrix, &self.nodes) {
            if self.group.free {
                let first = self.group.format_word(&self.word(existing));
                let mut second = self.word(child.parent);
                second.push(self.group.letters[child.letter]);
                return Err(Error::NotDiscrete {
                    first,
                    second: self.group.format_word(&second),
                });
            }
            return Ok(None);
        }
        if self.nodes.len() >= self.cap {
            return Err(Error::FrontierOverflow { cap: self.cap });
        }
        let id = self.nodes.len();
        self.seen.insert(&child.matrix, id);
        self.nodes.push(child);
        Ok(Some(id))
    }

    fn element(&self, id: usize) -> GroupElement {
        GroupElement {
            matrix: self.nodes[id].matrix,
            word: self.word(id),
        }
    }
}

/// All distinct elements reachable by reduced words of length at most
/// `max_word_len`, in breadth-first order.
#[derive(Clone, Debug)]
pub struct WordTable {
    pub elements: Vec<GroupElement>,
    pub max_word_len: usize,
}

impl WordTable {
    pub fn build(group: &GroupPresentation, max_word_len: usize, frontier_cap: usize) -> Result<Self> {
        let mut search = Search::new(group, frontier_cap);
        let mut frontier = vec![0usize];
        for _ in 0..max_word_len {
            let children = search.expand(&frontier);
            let mut next = Vec::with_capacity(children.len());
            for child in children {
                if let Some(id) = search.admit(child)? {
                    next.push(id);
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        let elements = (0..search.nodes.len()).map(|id| search.element(id)).collect();
        Ok(WordTable { elements, max_word_len })
    }

    /// Elements of the table with `d(z, γw) <= radius`, sorted.
    pub fn ball(&self, z: Point, w: Point, radius: f64) -> Vec<BallElement> {
        let mut out: Vec<BallElement> = self
            .elements
            .par_iter()
            .filter_map(|e| {
                let d = distance(z, e.matrix.apply(w));
                (d <= radius).then(|| BallElement {
                    element: e.clone(),
                    distance: d,
                })
            })
            .collect();
        sort_ball(&mut out);
        out
    }
}

fn sort_ball(v: &mut [BallElement]) {
    v.sort_by(|p, q| {
        p.distance
            .total_cmp(&q.distance)
            .then(p.element.word.len().cmp(&q.element.word.len()))
            .then_with(|| p.element.word.cmp(&q.element.word))
    });
}

/// Group elements `γ` with `d(z, γw) <= radius`, sorted by distance, then
/// word length, then word.
pub fn enumerate_ball(
    group: &GroupPresentation,
    z: Point,
    w: Point,
    radius: f64,
    opts: &EnumerateOptions,
) -> Result<Vec<BallElement>> {
    if !(radius >= 0.0) {
        return Ok(Vec::new());
    }
    match opts.mode {
        SearchMode::Brute { max_word_len } => {
            Ok(WordTable::build(group, max_word_len, opts.frontier_cap)?.ball(z, w, radius))
        }
        SearchMode::Pruned => enumerate_pruned(group, z, w, radius, opts.frontier_cap),
    }
}

fn enumerate_pruned(
    group: &GroupPresentation,
    z: Point,
    w: Point,
    radius: f64,
    cap: usize,
) -> Result<Vec<BallElement>> {
    let expand_limit = radius + group.max_displacement(w);
    let mut search = Search::new(group, cap);
    let mut dist = vec![distance(z, w)];
    // the root is always expanded
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let children = search.expand(&frontier);
        let child_dist: Vec<f64> = children.par_iter().map(|c| distance(z, c.matrix.apply(w))).collect();
        let mut next = Vec::new();
        for (child, d) in children.into_iter().zip(child_dist) {
            if let Some(id) = search.admit(child)? {
                dist.push(d);
                if d <= expand_limit {
                    next.push(id);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<BallElement> = dist
        .iter()
        .enumerate()
        .filter(|(_, &d)| d <= radius)
        .map(|(id, &d)| BallElement {
            element: search.element(id),
            distance: d,
        })
        .collect();
    sort_ball(&mut out);
    Ok(out)
}

/// `|{γ : d(z, γw) <= radius}|` by pruned enumeration.
pub fn count_ball(group: &GroupPresentation, z: Point, w: Point, radius: f64) -> Result<usize> {
    count_ball_with(group, z, w, radius, &EnumerateOptions::default())
}

pub fn count_ball_with(
    group: &GroupPresentation,
    z: Point,
    w: Point,
    radius: f64,
    opts: &EnumerateOptions,
) -> Result<usize> {
    Ok(enumerate_ball(group, z, w, radius, opts)?.len())
}

/// Count of `{γ^n : |n| ℓ <= r}` for a translation of length `ℓ`, seen from
/// a point on its axis: `1 + 2 floor(r / ℓ)`.
pub fn cyclic_count_oracle(ell: f64, r: f64) -> usize {
    if r < 0.0 {
        return 0;
    }
    1 + 2 * (r / ell).floor() as usize
}

/// The function `δ -> C₀(δ)` of the orbit-counting condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum C0Rule {
    /// `3 e^{1/δ}`, valid for tangle-free surfaces.
    TangleFree,
    Constant(f64),
}

impl C0Rule {
    pub fn eval(&self, delta: f64) -> f64 {
        match self {
            C0Rule::TangleFree => 3.0 * delta.recip().exp(),
            C0Rule::Constant(c) => *c,
        }
    }
}

/// Surface constants entering the counting condition
/// `|{γ : d(z,γw) <= r}| <= Cx C₀(δ) e^{δr}` for `r <= R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "Cx")]
    pub cx: f64,
    pub injrad: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub c0: C0Rule,
    pub default_delta: f64,
}

impl GeometryParams {
    pub fn c0(&self, delta: f64) -> f64 {
        self.c0.eval(delta)
    }

    /// Bound `Cx C₀(δ) e^{δr}` on the orbit count at radius `r`.
    pub fn counting_bound(&self, delta: f64, r: f64) -> f64 {
        self.cx * self.c0(delta) * (delta * r).exp()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) {
            return Err(Error::invalid("R", "must be positive"));
        }
        if !(self.cx >= 1.0) {
            return Err(Error::invalid("Cx", "must be at least 1"));
        }
        if !(self.injrad > 0.0) {
            return Err(Error::invalid("injrad", "must be positive"));
        }
        if !(self.l >= 2.0 * self.injrad) {
            return Err(Error::invalid("L", "must be at least 2 * injrad"));
        }
        if let C0Rule::Constant(c) = self.c0 {
            if !(c >= 1.0) {
                return Err(Error::invalid("c0", "must be at least 1"));
            }
        }
        Ok(())
    }
}

/// Constants for an `L`-tangle-free surface: `R = L/4`,
/// `Cx = 1/min(1, injrad)`, `C₀(δ) = 3e^{1/δ}`.
pub fn params_from_tanglefree(l: f64, injrad: f64, default_delta: f64) -> Result<GeometryParams> {
    if !(l > 0.0) || !(injrad > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "L = {l} and injrad = {injrad} must both be positive"
        )));
    }
    if l < 2.0 * injrad {
        return Err(Error::InvalidGeometry(format!(
            "L = {l} is below 2 * injrad = {}; every surface is 2 InjRad-tangle-free",
            2.0 * injrad
        )));
    }
    Ok(GeometryParams {
        r: l / 4.0,
        cx: 1.0 / injrad.min(1.0),
        injrad,
        l,
        c0: C0Rule::TangleFree,
        default_delta,
    })
}

/// Parameters from the group's `injrad_hint` / `tanglefree_L_hint`.
pub fn params_from_hints(group: &GroupPresentation, default_delta: f64) -> Result<GeometryParams> {
    let injrad = group
        .injrad_hint
        .ok_or_else(|| Error::invalid("injrad_hint", format!("group {} has no hint", group.name)))?;
    let l = group.tanglefree_l_hint.unwrap_or(2.0 * injrad);
    params_from_tanglefree(l, injrad, default_delta)
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingEntry {
    pub z: Point,
    pub w: Point,
    pub radius: f64,
    pub count: usize,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingReport {
    pub group: String,
    pub delta: f64,
    pub entries: Vec<CountingEntry>,
    /// Largest `count / bound`; zero when nothing was checked.
    pub worst_ratio: f64,
    pub pass: bool,
}

/// Checks `count_ball(z, w, r) <= Cx C₀(δ) e^{δr}` for every sample pair and radius.
pub fn verify_counting_bound(
    group: &GroupPresentation,
    params: &GeometryParams,
    sample_pairs: &[(Point, Point)],
    radii: &[f64],
    delta: f64,
    opts: &EnumerateOptions,
) -> Result<CountingReport> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "must be positive"));
    }
    if let Some(r) = radii.iter().find(|&&r| r > params.r * (1.0 + 1e-12)) {
        return Err(Error::HypothesisViolated(format!(
            "radius {r} exceeds R = {}",
            params.r
        )));
    }
    let mut entries = Vec::new();
    let mut worst_ratio = 0.0f64;
    for &(z, w) in sample_pairs {
        for &radius in radii {
            let count = count_ball_with(group, z, w, radius, opts)?;
            let bound = params.counting_bound(delta, radius);
            let ratio = count as f64 / bound;
            worst_ratio = worst_ratio.max(ratio);
            entries.push(CountingEntry {
                z,
                w,
                radius,
                count,
                bound,
                pass: count as f64 <= bound,
            });
        }
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(CountingReport {
        group: group.name.clone(),
        delta,
        entries,
        worst_ratio,
        pass,
    })
}

/// Half the smallest displacement `d(z, γz)` over sample points and
/// non-identity words up to `max_word_len`.
///
/// This is an upper estimate of the injectivity radius over the sampled
/// region, not a certified lower bound.
pub fn estimate_injrad(group: &GroupPresentation, sample_points: &[Point], max_word_len: usize) -> Result<f64> {
    let table = WordTable::build(group, max_word_len, DEFAULT_FRONTIER_CAP)?;
    let mut best = f64::INFINITY;
    for e in table.elements.iter().filter(|e| !e.word.is_empty()) {
        for &z in sample_points {
            best = best.min(distance(z, e.matrix.apply(z)));
        }
    }
    if !best.is_finite() {
        return Err(Error::NoNonIdentityFound { max_word_len });
    }
    Ok(0.5 * best)
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.matrix;
        write!(
            f,
            "[[{}, {}], [{}, {}]] ({} letters)",
            m.a,
            m.b,
            m.c,
            m.d,
            self.word.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cyclic() -> GroupPresentation {
        builtin_group("cyclic").unwrap()
    }

    #[test]
    fn builtins_load_and_are_unimodular() {
        for name in BUILTIN_GROUPS {
            let g = builtin_group(name).unwrap();
            assert!(g.generators.iter().all(|m| (m.det() - 1.0).abs() < 1e-12), "{name}");
        }
        assert!(builtin_group("cyclic.json").is_some());
        assert!(builtin_group("nope").is_none());
    }

    #[test]
    fn bolza_relation_is_identity() {
        let g = builtin_group("bolza").unwrap();
        let l = |i: usize, e: i8| Letter {
            generator: i,
            exponent: e,
        };
        let word = [
            l(0, 1),
            l(1, -1),
            l(2, 1),
            l(3, -1),
            l(0, -1),
            l(1, 1),
            l(2, -1),
            l(3, 1),
        ];
        assert!(g.evaluate(&word).is_identity(1e-9));
    }

    #[test]
    fn cyclic_ball_on_axis() {
        let g = cyclic();
        let ball = enumerate_ball(&g, Point::I, Point::I, 2.5, &EnumerateOptions::default()).unwrap();
        assert_eq!(ball.len(), 5);
        assert!(ball[0].element.word.is_empty());
        let d: Vec<f64> = ball.iter().map(|b| b.distance).collect();
        assert!((d[1] - 1.0).abs() < 1e-12 && (d[4] - 2.0).abs() < 1e-12);
        for b in &ball {
            assert!(g.evaluate(&b.element.word).approx_eq(&b.element.matrix, 1e-8));
        }
    }

    #[test]
    fn count_examples() {
        let g = cyclic();
        let i = Point::I;
        assert_eq!(count_ball(&g, i, i, 2.5).unwrap(), 5);
        assert_eq!(count_ball(&g, i, i, -1.0).unwrap(), 0);
        assert_eq!(count_ball(&g, i, i, 0.99).unwrap(), 1);
        for name in BUILTIN_GROUPS {
            let g = builtin_group(name).unwrap();
            let ball = enumerate_ball(&g, i, i, 0.0, &EnumerateOptions::default()).unwrap();
            assert_eq!(ball.len(), 1);
            assert!(ball[0].element.word.is_empty());
        }
    }

    #[test]
    fn identity_excluded_when_points_far_apart() {
        let g = cyclic();
        let z = Point::I;
        let w = Point::new(3.0, 1.0).unwrap();
        let ball = enumerate_ball(&g, z, w, 1.0, &EnumerateOptions::default()).unwrap();
        assert!(ball.iter().all(|b| !b.element.word.is_empty()));
    }

    #[test]
    fn cyclic_oracle_examples() {
        assert_eq!(cyclic_count_oracle(1.0, 2.5), 5);
        assert_eq!(cyclic_count_oracle(1.0, 0.0), 1);
        assert_eq!(cyclic_count_oracle(2.0, 1.99), 1);
    }

    #[test]
    fn cyclic_exactness_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let ell: f64 = rng.gen_range(0.3..2.0);
            let r: f64 = rng.gen_range(0.0..6.0);
            let g = cyclic_group(ell);
            let count = count_ball(&g, Point::I, Point::I, r).unwrap();
            assert_eq!(count, cyclic_count_oracle(ell, r), "ell={ell} r={r}");
        }
    }

    #[test]
    fn pruned_matches_brute_on_pingpong() {
        let g = builtin_group("pingpong").unwrap();
        let table = WordTable::build(&g, 8, DEFAULT_FRONTIER_CAP).unwrap();
        let z = Point::new(0.2, 0.9).unwrap();
        let w = Point::new(-0.3, 1.3).unwrap();
        let pruned = enumerate_ball(&g, z, w, 3.0, &EnumerateOptions::default()).unwrap();
        let brute = table.ball(z, w, 3.0);
        assert_eq!(pruned.len(), brute.len());
        for (p, b) in pruned.iter().zip(&brute) {
            assert!(p.element.matrix.approx_eq(&b.element.matrix, 1e-8));
        }
    }

    #[test]
    fn monotone_in_radius() {
        let g = builtin_group("bolza").unwrap();
        let z = Point::new(0.1, 1.2).unwrap();
        let mut last = 0;
        for k in 0..12 {
            let c = count_ball(&g, z, Point::I, 0.5 * k as f64).unwrap();
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn frontier_overflow_reported() {
        let g = builtin_group("pingpong").unwrap();
        let opts = EnumerateOptions {
            mode: SearchMode::Pruned,
            frontier_cap: 10,
        };
        let err = enumerate_ball(&g, Point::I, Point::I, 8.0, &opts).unwrap_err();
        assert!(matches!(err, Error::FrontierOverflow { cap: 10 }));
    }

    #[test]
    fn free_flag_violation_reported() {
        // a and a^2 together: a^2 a^-1 = a collides with a
        let a = Isometry::translation(1.0);
        let g = GroupPresentation::new("bad", vec![a, compose(&a, &a)], true).unwrap();
        let err = WordTable::build(&g, 2, DEFAULT_FRONTIER_CAP).unwrap_err();
        assert!(matches!(err, Error::NotDiscrete { .. }));
        let g = GroupPresentation::new("ok", vec![a, compose(&a, &a)], false).unwrap();
        let t = WordTable::build(&g, 2, DEFAULT_FRONTIER_CAP).unwrap();
        // a^k for |k| <= 4
        assert_eq!(t.elements.len(), 9);
    }

    #[test]
    fn tanglefree_params() {
        let p = params_from_tanglefree(4.0, 1.0, 0.25).unwrap();
        assert_eq!(p.r, 1.0);
        assert_eq!(p.cx, 1.0);
        assert!((p.c0(0.25) - 3.0 * 4f64.exp()).abs() < 1e-12);
        let p = params_from_tanglefree(8.0, 0.5, 0.25).unwrap();
        assert_eq!((p.r, p.cx), (2.0, 2.0));
        assert!(matches!(
            params_from_tanglefree(0.5, 1.0, 0.25),
            Err(Error::InvalidGeometry(_))
        ));
        p.validate().unwrap();
    }

    #[test]
    fn counting_bound_cyclic() {
        let g = cyclic();
        let params = params_from_tanglefree(16.0, 0.5, 0.25).unwrap();
        let radii: Vec<f64> = (1..=20).map(|k| params.r * k as f64 / 20.0).collect();
        let pairs = vec![(Point::I, Point::I), (Point::I, Point::new(0.3, 1.4).unwrap())];
        let rep = verify_counting_bound(&g, &params, &pairs, &radii, 0.25, &EnumerateOptions::default()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.entries.len(), 40);

        let empty = verify_counting_bound(&g, &params, &pairs, &[], 0.25, &EnumerateOptions::default()).unwrap();
        assert!(empty.pass);

        let mut shrunk = params;
        shrunk.c0 = C0Rule::Constant(0.01);
        let rep =
            verify_counting_bound(&g, &shrunk, &[(Point::I, Point::I)], &[2.5], 0.25, &Default::default()).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.entries[0].count, 5);

        let err = verify_counting_bound(&g, &params, &pairs, &[params.r + 1.0], 0.25, &Default::default());
        assert!(matches!(err, Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn injrad_estimates() {
        let g = cyclic();
        assert!((estimate_injrad(&g, &[Point::I], 3).unwrap() - 0.5).abs() < 1e-12);
        // off the axis at hyperbolic distance h: cosh d = cosh^2 h cosh l - sinh^2 h
        let mut last = f64::INFINITY;
        for h in [1.0f64, 0.5, 0.1, 0.01] {
            let z = Point::new(h.sinh() / h.cosh(), 1.0 / h.cosh()).unwrap();
            assert!((distance(Point::I, z) - h).abs() < 1e-12);
            let est = estimate_injrad(&g, &[z], 3).unwrap();
            let expect = 0.5 * (h.cosh().powi(2) * 1f64.cosh() - h.sinh().powi(2)).acosh();
            assert!((est - expect).abs() < 1e-12);
            assert!(est > 0.5 && est < last);
            last = est;
        }
        assert!(matches!(
            estimate_injrad(&g, &[Point::I], 0),
            Err(Error::NoNonIdentityFound { max_word_len: 0 })
        ));
    }

    #[test]
    fn group_file_round_trip() {
        let g = builtin_group("pingpong").unwrap();
        let json = serde_json::to_string(&g.to_file()).unwrap();
        let back = GroupPresentation::from_json_str(&json, "mem").unwrap();
        assert_eq!(back.generators, g.generators);
        assert_eq!(back.tanglefree_l_hint, g.tanglefree_l_hint);
    }

    #[test]
    fn includes_inverses_alphabet() {
        let a = Isometry::translation(1.0);
        let file = GroupFile {
            name: "closed".into(),
            generators: vec![a.to_row_major(), a.inverse().to_row_major()],
            labels: None,
            includes_inverses: true,
            free: false,
            injrad_hint: None,
            tanglefree_l_hint: None,
        };
        let g = GroupPresentation::from_file(file).unwrap();
        let t = WordTable::build(&g, 3, DEFAULT_FRONTIER_CAP).unwrap();
        assert_eq!(t.elements.len(), 7);
    }
}
