//! Measurements as finite partial labelings and their order ideals.
//!
//! A measurement attributes labels from `Y` to finitely many objects of `X`.
//! `f <= g` when `f` is obtained from `g` by forgetting objects and relabeling.
//! Order ideals of this quasiorder correspond one-to-one to partitions of
//! `X ∪ {a}`, where the block of the distinguished element `a` collects the
//! objects that are never measured. Ideals are therefore handled only through
//! their canonical [`PartitionPlus`].

use crate::error::{Error, Result};
use num_rational::Rational64;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

/// Orders identifiers with embedded digit runs numerically (`"2" < "10"`).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    if a.is_empty() || b.is_empty() {
        return a.cmp(b);
    }
    for ((da, ca), (db, cb)) in chunks(a).into_iter().zip(chunks(b)) {
        let ord = if da && db {
            let ta = ca.trim_start_matches('0');
            let tb = cb.trim_start_matches('0');
            ta.len().cmp(&tb.len()).then(ta.cmp(tb)).then(ca.len().cmp(&cb.len()))
        } else {
            ca.cmp(cb)
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len()).then(a.cmp(b))
}

/// The objects `X` together with the distinguished element `a ∉ X`.
///
/// Elements are kept in natural order, which fixes object indices for every
/// value built over the same set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectSet {
    elements: Vec<String>,
    distinguished: String,
}

impl ObjectSet {
    pub fn new<I, S>(elements: I, distinguished: impl Into<String>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let distinguished = distinguished.into();
        let mut elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        elements.sort_by(|a, b| natural_cmp(a, b));
        for w in elements.windows(2) {
            if w[0] == w[1] {
                return Err(Error::validation(format!("duplicate object '{}'", w[0])));
            }
        }
        if elements.contains(&distinguished) {
            return Err(Error::validation(format!(
                "distinguished element '{distinguished}' is also an object"
            )));
        }
        Ok(ObjectSet {
            elements,
            distinguished,
        })
    }

    /// Objects named `"1"..="n"` with distinguished element `"a"`.
    pub fn numbered(n: usize) -> Self {
        ObjectSet::new((1..=n).map(|k| k.to_string()), "a").expect("distinct names")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn distinguished(&self) -> &str {
        &self.distinguished
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn elem_of(&self, name: &str) -> Option<Elem> {
        if name == self.distinguished {
            Some(Elem::Distinguished)
        } else {
            self.index_of(name).map(Elem::Object)
        }
    }

    pub fn name(&self, elem: Elem) -> &str {
        match elem {
            Elem::Distinguished => &self.distinguished,
            Elem::Object(i) => &self.elements[i],
        }
    }
}

/// The labels `Y`, optionally carrying a strict total order by rational rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSet {
    values: Vec<String>,
    ranks: Option<Vec<Rational64>>,
}

impl LabelSet {
    pub fn new<I, S>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        let distinct: BTreeSet<&String> = values.iter().collect();
        if distinct.len() != values.len() {
            return Err(Error::validation("duplicate label"));
        }
        Ok(LabelSet {
            values,
            ranks: None,
        })
    }

    pub fn ordered<S: Into<String>>(values: Vec<(S, Rational64)>) -> Result<Self> {
        let (names, ranks): (Vec<String>, Vec<Rational64>) =
            values.into_iter().map(|(s, r)| (s.into(), r)).unzip();
        let mut set = LabelSet::new(names)?;
        let distinct: BTreeSet<&Rational64> = ranks.iter().collect();
        if distinct.len() != ranks.len() {
            return Err(Error::validation("label ranks must be pairwise distinct"));
        }
        set.ranks = Some(ranks);
        Ok(set)
    }

    /// Labels `"0".."n-1"`, ranked by their integer value.
    pub fn numbered(n: usize) -> Self {
        LabelSet::ordered(
            (0..n)
                .map(|k| (k.to_string(), Rational64::from_integer(k as i64)))
                .collect(),
        )
        .expect("distinct")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.values.iter().position(|v| v == name)
    }

    pub fn ranks(&self) -> Option<&[Rational64]> {
        self.ranks.as_deref()
    }

    pub fn is_ordered(&self) -> bool {
        self.ranks.is_some()
    }
}

/// A finite partial map from object indices to label indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialLabeling {
    entries: BTreeMap<usize, usize>,
}

impl PartialLabeling {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        PartialLabeling {
            entries: pairs.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, object: usize, label: usize) {
        self.entries.insert(object, label);
    }

    pub fn get(&self, object: usize) -> Option<usize> {
        self.entries.get(&object).copied()
    }

    pub fn contains(&self, object: usize) -> bool {
        self.entries.contains_key(&object)
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn entries(&self) -> &BTreeMap<usize, usize> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A total map `X -> Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scale {
    map: Vec<usize>,
}

impl Scale {
    pub fn new(map: Vec<usize>) -> Self {
        Scale { map }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn is_injective(&self) -> bool {
        let distinct: BTreeSet<_> = self.map.iter().collect();
        distinct.len() == self.map.len()
    }

    pub fn as_labeling(&self) -> PartialLabeling {
        PartialLabeling::from_pairs(self.map.iter().copied().enumerate())
    }
}

/// An element of `X ∪ {a}`; the distinguished element sorts first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Distinguished,
    Object(usize),
}

/// A partition of `X ∪ {a}` in canonical form: elements sorted within blocks,
/// blocks sorted by least element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionPlus {
    objects: ObjectSet,
    blocks: Vec<Vec<Elem>>,
}

impl PartitionPlus {
    pub fn new(objects: ObjectSet, blocks: Vec<Vec<Elem>>) -> Result<Self> {
        let n = objects.len();
        let mut seen = vec![false; n + 1];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::validation("empty block"));
            }
            for &e in block {
                let slot = match e {
                    Elem::Distinguished => 0,
                    Elem::Object(i) if i < n => i + 1,
                    Elem::Object(i) => {
                        return Err(Error::validation(format!("object index {i} out of range")))
                    }
                };
                if seen[slot] {
                    return Err(Error::validation(format!(
                        "element '{}' occurs in more than one block",
                        objects.name(e)
                    )));
                }
                seen[slot] = true;
            }
        }
        if let Some(slot) = seen.iter().position(|s| !s) {
            let e = if slot == 0 {
                Elem::Distinguished
            } else {
                Elem::Object(slot - 1)
            };
            return Err(Error::validation(format!(
                "element '{}' is not covered",
                objects.name(e)
            )));
        }
        Ok(Self::canonical(objects, blocks))
    }

    fn canonical(objects: ObjectSet, mut blocks: Vec<Vec<Elem>>) -> Self {
        for b in &mut blocks {
            b.sort();
        }
        blocks.sort_by_key(|b| b[0]);
        PartitionPlus { objects, blocks }
    }

    pub fn from_names(objects: ObjectSet, blocks: &[Vec<String>]) -> Result<Self> {
        let mut converted = Vec::with_capacity(blocks.len());
        for block in blocks {
            let mut b = Vec::with_capacity(block.len());
            for name in block {
                let e = objects
                    .elem_of(name)
                    .ok_or_else(|| Error::validation(format!("unknown element '{name}'")))?;
                b.push(e);
            }
            converted.push(b);
        }
        PartitionPlus::new(objects, converted)
    }

    /// All singletons: the finest partition.
    pub fn discrete(objects: ObjectSet) -> Self {
        let mut blocks = vec![vec![Elem::Distinguished]];
        blocks.extend((0..objects.len()).map(|i| vec![Elem::Object(i)]));
        PartitionPlus { objects, blocks }
    }

    /// `{a} ∪ X` as a single block: the partition of the trivial ideal.
    pub fn indiscrete(objects: ObjectSet) -> Self {
        let mut block = vec![Elem::Distinguished];
        block.extend((0..objects.len()).map(Elem::Object));
        PartitionPlus {
            objects,
            blocks: vec![block],
        }
    }

    fn from_classes(objects: &ObjectSet, class_of: &[usize]) -> Self {
        // class_of is indexed by slot: 0 = a, i + 1 = object i.
        let mut groups: BTreeMap<usize, Vec<Elem>> = BTreeMap::new();
        for (slot, &c) in class_of.iter().enumerate() {
            let e = if slot == 0 {
                Elem::Distinguished
            } else {
                Elem::Object(slot - 1)
            };
            groups.entry(c).or_default().push(e);
        }
        Self::canonical(objects.clone(), groups.into_values().collect())
    }

    pub fn objects(&self) -> &ObjectSet {
        &self.objects
    }

    pub fn blocks(&self) -> &[Vec<Elem>] {
        &self.blocks
    }

    pub fn named_blocks(&self) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&e| self.objects.name(e).to_string()).collect())
            .collect()
    }

    /// Block index for each slot (0 = a, i + 1 = object i).
    fn class_vector(&self) -> Vec<usize> {
        let mut out = vec![0; self.objects.len() + 1];
        for (k, block) in self.blocks.iter().enumerate() {
            for &e in block {
                out[slot(e)] = k;
            }
        }
        out
    }

    pub fn block_of(&self, e: Elem) -> usize {
        self.class_vector()[slot(e)]
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &PartitionPlus) -> bool {
        let theirs = other.class_vector();
        self.blocks.iter().all(|b| {
            let k = theirs[slot(b[0])];
            b.iter().all(|&e| theirs[slot(e)] == k)
        })
    }

    fn same_objects(&self, other: &PartitionPlus) -> Result<()> {
        if self.objects != other.objects {
            return Err(Error::validation("partitions over different object sets"));
        }
        Ok(())
    }

    /// Meet in the refinement order: nonempty pairwise block intersections.
    pub fn common_refinement(&self, other: &PartitionPlus) -> Result<PartitionPlus> {
        self.same_objects(other)?;
        let mine = self.class_vector();
        let theirs = other.class_vector();
        let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let classes: Vec<usize> = mine
            .iter()
            .zip(&theirs)
            .map(|(&p, &q)| {
                let next = ids.len();
                *ids.entry((p, q)).or_insert(next)
            })
            .collect();
        Ok(Self::from_classes(&self.objects, &classes))
    }

    /// Join in the refinement order: transitive closure of block overlap.
    pub fn common_coarsening(&self, other: &PartitionPlus) -> Result<PartitionPlus> {
        self.same_objects(other)?;
        let n = self.objects.len() + 1;
        let mut uf = UnionFind::new(n);
        for block in self.blocks.iter().chain(&other.blocks) {
            for w in block.windows(2) {
                uf.union(slot(w[0]), slot(w[1]));
            }
        }
        let classes: Vec<usize> = (0..n).map(|s| uf.find(s)).collect();
        Ok(Self::from_classes(&self.objects, &classes))
    }

    /// Every partition of `X ∪ {a}`, enumerated by restricted growth strings.
    pub fn enumerate(objects: &ObjectSet) -> Vec<PartitionPlus> {
        let n = objects.len() + 1;
        let mut out = Vec::new();
        let mut rgs = vec![0usize; n];
        loop {
            out.push(Self::from_classes(objects, &rgs));
            // Advance to the next restricted growth string.
            let mut i = n;
            loop {
                if i <= 1 {
                    return out;
                }
                i -= 1;
                let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
                if rgs[i] <= max_prefix {
                    rgs[i] += 1;
                    for r in rgs.iter_mut().skip(i + 1) {
                        *r = 0;
                    }
                    break;
                }
            }
        }
    }
}

fn slot(e: Elem) -> usize {
    match e {
        Elem::Distinguished => 0,
        Elem::Object(i) => i + 1,
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller root so class ids are stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Total preorder on the measured objects, lowest level first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceOrder {
    pub levels: Vec<Vec<usize>>,
    pub unmeasured: Vec<usize>,
}

/// The measurement structure over fixed objects and labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    objects: ObjectSet,
    labels: LabelSet,
}

impl Frame {
    pub fn new(objects: ObjectSet, labels: LabelSet) -> Self {
        Frame { objects, labels }
    }

    pub fn objects(&self) -> &ObjectSet {
        &self.objects
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn check(&self, f: &PartialLabeling) -> Result<()> {
        for (&x, &y) in f.entries() {
            if x >= self.objects.len() {
                return Err(Error::validation(format!("object index {x} outside X")));
            }
            if y >= self.labels.len() {
                return Err(Error::validation(format!("label index {y} outside Y")));
            }
        }
        Ok(())
    }

    fn check_scale(&self, s: &Scale) -> Result<()> {
        if s.map().len() != self.objects.len() {
            return Err(Error::validation(format!(
                "scale defines {} values for {} objects",
                s.map().len(),
                self.objects.len()
            )));
        }
        if let Some(&y) = s.map().iter().find(|&&y| y >= self.labels.len()) {
            return Err(Error::validation(format!("label index {y} outside Y")));
        }
        Ok(())
    }

    fn check_partition(&self, p: &PartitionPlus) -> Result<()> {
        if p.objects() != &self.objects {
            return Err(Error::validation("partition over a different object set"));
        }
        Ok(())
    }

    /// Builds a labeling from `(object, label)` names.
    pub fn labeling(&self, pairs: &[(&str, &str)]) -> Result<PartialLabeling> {
        let mut f = PartialLabeling::new();
        for &(x, y) in pairs {
            let xi = self
                .objects
                .index_of(x)
                .ok_or_else(|| Error::validation(format!("unknown object '{x}'")))?;
            let yi = self
                .labels
                .index_of(y)
                .ok_or_else(|| Error::validation(format!("unknown label '{y}'")))?;
            if f.contains(xi) {
                return Err(Error::validation(format!("object '{x}' labeled twice")));
            }
            f.insert(xi, yi);
        }
        Ok(f)
    }

    /// `f <= g`: `f` is a relabeling of a restriction of `g`.
    pub fn le(&self, f: &PartialLabeling, g: &PartialLabeling) -> Result<bool> {
        self.check(f)?;
        self.check(g)?;
        if !f.domain().all(|x| g.contains(x)) {
            return Ok(false);
        }
        let dom: Vec<usize> = f.domain().collect();
        for (i, &x) in dom.iter().enumerate() {
            for &y in &dom[i + 1..] {
                if g.get(x) == g.get(y) && f.get(x) != f.get(y) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Preference variant of [`Frame::le`]: the relabeling must be nondecreasing.
    pub fn pref_le(&self, f: &PartialLabeling, g: &PartialLabeling) -> Result<bool> {
        let ranks = self.labels.ranks().ok_or(Error::UnsupportedOrder)?;
        self.check(f)?;
        self.check(g)?;
        if !f.domain().all(|x| g.contains(x)) {
            return Ok(false);
        }
        let rank = |h: &PartialLabeling, x: usize| ranks[h.get(x).expect("in domain")];
        for x in f.domain() {
            for y in f.domain() {
                if rank(g, x) <= rank(g, y) && rank(f, x) > rank(f, y) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The partition `π` of the ideal generated by `fs`.
    ///
    /// Unmeasured objects join the block of `a`; two measured objects are
    /// equivalent when every labeling defined on both agrees on them. Fails if
    /// that relation is not transitive, which means `fs` is not contained in
    /// any order ideal.
    pub fn pi_of_family(&self, fs: &[PartialLabeling]) -> Result<PartitionPlus> {
        for f in fs {
            self.check(f)?;
        }
        let n = self.objects.len();
        let mut in_dom = vec![false; n];
        for f in fs {
            for x in f.domain() {
                in_dom[x] = true;
            }
        }
        let mut related = vec![vec![true; n]; n];
        for f in fs {
            let dom: Vec<usize> = f.domain().collect();
            for (i, &x) in dom.iter().enumerate() {
                for &y in &dom[i + 1..] {
                    if f.get(x) != f.get(y) {
                        related[x][y] = false;
                        related[y][x] = false;
                    }
                }
            }
        }
        let measured: Vec<usize> = (0..n).filter(|&x| in_dom[x]).collect();
        for &x in &measured {
            for &y in &measured {
                if y == x || !related[x][y] {
                    continue;
                }
                for &z in &measured {
                    if z != x && z != y && related[y][z] && !related[x][z] {
                        let name = |i: usize| self.objects.elements()[i].clone();
                        return Err(Error::NonIdealFamily {
                            x: name(x),
                            y: name(y),
                            z: name(z),
                        });
                    }
                }
            }
        }
        let mut classes = vec![0usize; n + 1];
        for &x in &measured {
            // Smallest related index names the class; offset past a's class 0.
            let rep = measured
                .iter()
                .copied()
                .find(|&y| related[x][y])
                .unwrap_or(x);
            classes[x + 1] = rep + 1;
        }
        Ok(PartitionPlus::from_classes(&self.objects, &classes))
    }

    /// Membership of `f` in the ideal `j(P)`.
    pub fn j_membership(&self, p: &PartitionPlus, f: &PartialLabeling) -> Result<bool> {
        self.check_partition(p)?;
        self.check(f)?;
        let classes = p.class_vector();
        let a_class = classes[0];
        let mut block_label: BTreeMap<usize, usize> = BTreeMap::new();
        for (&x, &y) in f.entries() {
            let c = classes[x + 1];
            if c == a_class {
                return Ok(false);
            }
            if *block_label.entry(c).or_insert(y) != y {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_directed(&self, p: &PartitionPlus) -> Result<usize> {
        let blocks = p.blocks().len() - 1;
        if self.labels.len() < blocks {
            return Err(Error::InsufficientLabels {
                labels: self.labels.len(),
                objects: blocks,
            });
        }
        Ok(blocks)
    }

    /// A common upper bound of `f` and `g` inside `j(P)`, labeling each block met
    /// by `dom f ∪ dom g` with its own label.
    pub fn upper_bound(
        &self,
        p: &PartitionPlus,
        f: &PartialLabeling,
        g: &PartialLabeling,
    ) -> Result<PartialLabeling> {
        self.check_directed(p)?;
        if !self.j_membership(p, f)? || !self.j_membership(p, g)? {
            return Err(Error::validation("labelings are not members of j(P)"));
        }
        let classes = p.class_vector();
        let mut out = PartialLabeling::new();
        for x in f.domain().chain(g.domain()) {
            // Block index 0 is a's block, never met by members.
            out.insert(x, classes[x + 1] - 1);
        }
        Ok(out)
    }

    /// Every labeling of `j(P)`: the ideal as a finite family.
    pub fn ideal_members(&self, p: &PartitionPlus) -> Result<Vec<PartialLabeling>> {
        self.check_partition(p)?;
        self.check_directed(p)?;
        let mut out = Vec::new();
        for f in self.all_labelings() {
            if self.j_membership(p, &f)? {
                out.push(f);
            }
        }
        Ok(out)
    }

    /// All `(|Y|+1)^|X|` partial labelings.
    pub fn all_labelings(&self) -> impl Iterator<Item = PartialLabeling> + '_ {
        let n = self.objects.len();
        let base = self.labels.len() + 1;
        let total = (base as u64).pow(n as u32);
        (0..total).map(move |mut code| {
            let mut f = PartialLabeling::new();
            for x in 0..n {
                let digit = (code % base as u64) as usize;
                code /= base as u64;
                if digit > 0 {
                    f.insert(x, digit - 1);
                }
            }
            f
        })
    }

    /// Maximality in the finite case: the ideal of the discrete partition is
    /// the only observable.
    pub fn is_observable(&self, p: &PartitionPlus) -> Result<bool> {
        self.check_partition(p)?;
        if self.labels.len() < self.objects.len() {
            return Err(Error::InsufficientLabels {
                labels: self.labels.len(),
                objects: self.objects.len(),
            });
        }
        Ok(p.is_discrete())
    }

    /// `{a}` together with the fibers of `s`.
    pub fn scale_to_partition(&self, s: &Scale) -> Result<PartitionPlus> {
        self.check_scale(s)?;
        let mut classes = vec![0usize; self.objects.len() + 1];
        for (x, &y) in s.map().iter().enumerate() {
            classes[x + 1] = y + 1;
        }
        Ok(PartitionPlus::from_classes(&self.objects, &classes))
    }

    /// Partition of the pushforward of the scalable ideal `O(s)` along `h`.
    ///
    /// A non-constant `h` separates any two fibers of `s` after a suitable
    /// relabeling, so the fibers survive; a constant `h` merges all of `X`.
    pub fn hat_scalable(&self, h: &[usize], s: &Scale) -> Result<PartitionPlus> {
        if h.len() != self.labels.len() {
            return Err(Error::validation(format!(
                "relabeling defines {} values for {} labels",
                h.len(),
                self.labels.len()
            )));
        }
        if let Some(&y) = h.iter().find(|&&y| y >= self.labels.len()) {
            return Err(Error::validation(format!("label index {y} outside Y")));
        }
        self.check_scale(s)?;
        let constant = h.windows(2).all(|w| w[0] == w[1]);
        if constant {
            let mut classes = vec![1usize; self.objects.len() + 1];
            classes[0] = 0;
            Ok(PartitionPlus::from_classes(&self.objects, &classes))
        } else {
            self.scale_to_partition(s)
        }
    }

    /// Reconstructs the total preorder carried by a family of preference
    /// measurements: `x ≼ y` iff every labeling defined on both ranks `x` at
    /// most as high as `y`.
    pub fn preference_order(&self, fs: &[PartialLabeling]) -> Result<PreferenceOrder> {
        let ranks = self.labels.ranks().ok_or(Error::UnsupportedOrder)?;
        for f in fs {
            self.check(f)?;
        }
        let n = self.objects.len();
        let mut measured = vec![false; n];
        let mut below = vec![vec![true; n]; n];
        for f in fs {
            for x in f.domain() {
                measured[x] = true;
                for y in f.domain() {
                    if ranks[f.get(x).unwrap()] > ranks[f.get(y).unwrap()] {
                        below[x][y] = false;
                    }
                }
            }
        }
        let dom: Vec<usize> = (0..n).filter(|&x| measured[x]).collect();
        for &x in &dom {
            for &y in &dom {
                if !below[x][y] && !below[y][x] {
                    return Err(Error::validation(format!(
                        "objects '{}' and '{}' are incomparable",
                        self.objects.elements()[x],
                        self.objects.elements()[y]
                    )));
                }
                for &z in &dom {
                    if below[x][y] && below[y][z] && !below[x][z] {
                        return Err(Error::validation("preference relation is not transitive"));
                    }
                }
            }
        }
        // Level of x = number of objects strictly below it.
        let mut by_level: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &x in &dom {
            let strictly_below = dom
                .iter()
                .filter(|&&y| below[y][x] && !below[x][y])
                .count();
            by_level.entry(strictly_below).or_default().push(x);
        }
        Ok(PreferenceOrder {
            levels: by_level.into_values().collect(),
            unmeasured: (0..n).filter(|&x| !measured[x]).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(n: usize, m: usize) -> Frame {
        Frame::new(ObjectSet::numbered(n), LabelSet::numbered(m))
    }

    fn blocks(p: &PartitionPlus) -> Vec<Vec<String>> {
        p.named_blocks()
    }

    fn names(blocks: &[&[&str]]) -> Vec<Vec<String>> {
        blocks.iter()
            .map(|b| b.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn natural_order() {
        assert_eq!(natural_cmp("2", "10"), Ordering::Less);
        assert_eq!(natural_cmp("a2", "a10"), Ordering::Less);
        assert_eq!(natural_cmp("b", "a"), Ordering::Greater);
        let xs = ObjectSet::new(["10", "2", "1"], "a").unwrap();
        assert_eq!(xs.elements(), &["1", "2", "10"]);
        assert!(ObjectSet::new(["a"], "a").is_err());
        assert!(ObjectSet::new(["1", "1"], "a").is_err());
    }

    #[test]
    fn le_examples() {
        let fr = frame(2, 2);
        let empty = PartialLabeling::new();
        let g1 = fr.labeling(&[("1", "0")]).unwrap();
        assert!(fr.le(&empty, &g1).unwrap());
        let f = fr.labeling(&[("1", "0"), ("2", "0")]).unwrap();
        let g = fr.labeling(&[("1", "0"), ("2", "1")]).unwrap();
        assert!(fr.le(&f, &g).unwrap());
        assert!(!fr.le(&g, &f).unwrap());
        assert!(fr.le(&f, &PartialLabeling::from_pairs([(5, 0)])).is_err());
    }

    #[test]
    fn pref_le_examples() {
        let fr = frame(2, 2);
        let f = fr.labeling(&[("1", "0"), ("2", "0")]).unwrap();
        let g = fr.labeling(&[("1", "0"), ("2", "1")]).unwrap();
        let rev = fr.labeling(&[("1", "1"), ("2", "0")]).unwrap();
        assert!(fr.pref_le(&g, &g).unwrap());
        assert!(fr.pref_le(&f, &g).unwrap());
        assert!(!fr.pref_le(&rev, &g).unwrap());
        let unordered = Frame::new(ObjectSet::numbered(2), LabelSet::new(["0", "1"]).unwrap());
        assert_eq!(unordered.pref_le(&f, &g), Err(Error::UnsupportedOrder));
    }

    #[test]
    fn pi_of_family_examples() {
        let fr = frame(4, 2);
        assert_eq!(
            blocks(&fr.pi_of_family(&[]).unwrap()),
            names(&[&["a", "1", "2", "3", "4"]])
        );
        let f = fr.labeling(&[("1", "0"), ("2", "0"), ("3", "1")]).unwrap();
        assert_eq!(
            blocks(&fr.pi_of_family(&[f]).unwrap()),
            names(&[&["a", "4"], &["1", "2"], &["3"]])
        );
        let fs = [
            fr.labeling(&[("1", "0"), ("2", "0")]).unwrap(),
            fr.labeling(&[("2", "0"), ("3", "0")]).unwrap(),
            fr.labeling(&[("1", "0"), ("3", "1")]).unwrap(),
        ];
        assert_eq!(
            fr.pi_of_family(&fs),
            Err(Error::NonIdealFamily {
                x: "1".into(),
                y: "2".into(),
                z: "3".into()
            })
        );
    }

    #[test]
    fn j_membership_examples() {
        let fr = Frame::new(ObjectSet::numbered(2), LabelSet::numbered(6));
        let xs = fr.objects().clone();
        let disc = PartitionPlus::discrete(xs.clone());
        for f in fr.all_labelings() {
            assert!(fr.j_membership(&disc, &f).unwrap());
        }
        let p = PartitionPlus::from_names(xs.clone(), &names(&[&["a", "1"], &["2"]])).unwrap();
        assert!(!fr.j_membership(&p, &fr.labeling(&[("1", "0")]).unwrap()).unwrap());
        let q = PartitionPlus::from_names(xs, &names(&[&["a"], &["1", "2"]])).unwrap();
        assert!(!fr
            .j_membership(&q, &fr.labeling(&[("1", "0"), ("2", "1")]).unwrap())
            .unwrap());
        assert!(fr
            .j_membership(&q, &fr.labeling(&[("1", "5"), ("2", "5")]).unwrap())
            .unwrap());
    }

    #[test]
    fn refinement_and_coarsening() {
        let xs = ObjectSet::numbered(3);
        let p = PartitionPlus::from_names(xs.clone(), &names(&[&["a"], &["1", "2", "3"]])).unwrap();
        let q = PartitionPlus::from_names(xs.clone(), &names(&[&["a"], &["1", "2"], &["3"]])).unwrap();
        assert_eq!(p.common_refinement(&p).unwrap(), p);
        assert_eq!(p.common_refinement(&q).unwrap(), q);
        let disc = PartitionPlus::discrete(xs.clone());
        assert_eq!(disc.common_refinement(&disc).unwrap(), disc);

        let r = PartitionPlus::from_names(xs.clone(), &names(&[&["a"], &["1"], &["2", "3"]])).unwrap();
        assert_eq!(
            blocks(&q.common_coarsening(&r).unwrap()),
            names(&[&["a"], &["1", "2", "3"]])
        );
        assert_eq!(q.common_coarsening(&q).unwrap(), q);
        assert_eq!(disc.common_coarsening(&r).unwrap(), r);
        assert!(q.refines(&p) && !p.refines(&q));
    }

    #[test]
    fn partition_validation() {
        let xs = ObjectSet::numbered(2);
        assert!(PartitionPlus::from_names(xs.clone(), &names(&[&["a", "1"], &["1", "2"]])).is_err());
        assert!(PartitionPlus::from_names(xs.clone(), &names(&[&["a", "1"]])).is_err());
        assert!(PartitionPlus::from_names(xs, &names(&[&["a", "1", "2", "3"]])).is_err());
    }

    #[test]
    fn enumeration_counts_bell_numbers() {
        let bell = [1, 2, 5, 15, 52, 203];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(PartitionPlus::enumerate(&ObjectSet::numbered(n)).len(), b);
        }
    }

    #[test]
    fn scales() {
        let fr = frame(3, 3);
        let inj = fr.scale_to_partition(&Scale::new(vec![2, 0, 1])).unwrap();
        assert!(inj.is_discrete());
        let constant = fr.scale_to_partition(&Scale::new(vec![1, 1, 1])).unwrap();
        assert_eq!(blocks(&constant), names(&[&["a"], &["1", "2", "3"]]));
        let s = fr.scale_to_partition(&Scale::new(vec![0, 0, 1])).unwrap();
        assert_eq!(blocks(&s), names(&[&["a"], &["1", "2"], &["3"]]));
    }

    #[test]
    fn observables() {
        let fr = frame(3, 3);
        let xs = fr.objects().clone();
        assert!(fr.is_observable(&PartitionPlus::discrete(xs.clone())).unwrap());
        let p = PartitionPlus::from_names(xs.clone(), &names(&[&["a"], &["1", "2"], &["3"]])).unwrap();
        assert!(!fr.is_observable(&p).unwrap());
        let small = frame(3, 2);
        assert_eq!(
            small.is_observable(&PartitionPlus::discrete(xs)),
            Err(Error::InsufficientLabels {
                labels: 2,
                objects: 3
            })
        );
    }

    #[test]
    fn hat_examples() {
        let fr = frame(3, 3);
        let s = Scale::new(vec![0, 0, 1]);
        assert_eq!(
            fr.hat_scalable(&[2, 0, 1], &s).unwrap(),
            fr.scale_to_partition(&s).unwrap()
        );
        assert_eq!(
            blocks(&fr.hat_scalable(&[1, 1, 1], &s).unwrap()),
            names(&[&["a"], &["1", "2", "3"]])
        );
        let inj = Scale::new(vec![0, 1, 2]);
        assert!(fr.hat_scalable(&[0, 0, 1], &inj).unwrap().is_discrete());
    }

    #[test]
    fn upper_bounds_need_enough_labels() {
        let fr = frame(3, 2);
        let p = PartitionPlus::discrete(fr.objects().clone());
        let f = fr.labeling(&[("1", "0")]).unwrap();
        assert!(matches!(
            fr.upper_bound(&p, &f, &f),
            Err(Error::InsufficientLabels { .. })
        ));
        let fr = frame(3, 3);
        let g = fr.labeling(&[("2", "0"), ("3", "2")]).unwrap();
        let h = fr.upper_bound(&p, &f, &g).unwrap();
        assert!(fr.le(&f, &h).unwrap() && fr.le(&g, &h).unwrap());
        assert!(fr.j_membership(&p, &h).unwrap());
    }

    #[test]
    fn preference_reconstruction() {
        let fr = frame(3, 3);
        let s = Scale::new(vec![2, 0, 1]).as_labeling();
        let ideal: Vec<_> = fr
            .all_labelings()
            .filter(|f| fr.pref_le(f, &s).unwrap())
            .collect();
        let order = fr.preference_order(&ideal).unwrap();
        assert_eq!(order.levels, vec![vec![1], vec![2], vec![0]]);
        assert!(order.unmeasured.is_empty());
    }
}
