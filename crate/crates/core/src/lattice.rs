//! Arrow fields of branching-coalescing random walks on the even lattice and
//! their exactly coupled duals.
//!
//! Forward sites are `(x, t)` with `x + t` even. Each carries a left arrow
//! to `(x-1, t+1)`, a right arrow to `(x+1, t+1)`, or both. The dual site
//! `(x, t+1)` sits directly above and carries the mirror image: its left
//! arrow (to `(x-1, t)`) exists iff the forward site has a right arrow.
//! A forward and a dual segment can only intersect at a `Both` site.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Arrow storage above this many bytes is refused.
pub const MAX_FIELD_BYTES: u128 = 1 << 32;

/// Coordinates beyond this are rejected so window arithmetic cannot overflow.
pub const COORD_LIMIT: i64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arrow {
    LeftOnly = 1,
    RightOnly = 2,
    Both = 3,
}

impl Arrow {
    #[inline]
    pub fn has_left(self) -> bool {
        (self as u8) & 1 != 0
    }

    #[inline]
    pub fn has_right(self) -> bool {
        (self as u8) & 2 != 0
    }

    #[inline]
    pub fn is_both(self) -> bool {
        self == Arrow::Both
    }

    /// Dual mask of the site directly above: left and right swap.
    #[inline]
    pub fn mirror(self) -> Arrow {
        match self {
            Arrow::LeftOnly => Arrow::RightOnly,
            Arrow::RightOnly => Arrow::LeftOnly,
            Arrow::Both => Arrow::Both,
        }
    }

    #[inline]
    fn from_bits(b: u8) -> Arrow {
        match b {
            1 => Arrow::LeftOnly,
            2 => Arrow::RightOnly,
            _ => Arrow::Both,
        }
    }

    /// Number of outgoing arrows.
    pub fn out_degree(self) -> u8 {
        if self.is_both() {
            2
        } else {
            1
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Arrow::LeftOnly => 'L',
            Arrow::RightOnly => 'R',
            Arrow::Both => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Arrow> {
        match c {
            'L' => Some(Arrow::LeftOnly),
            'R' => Some(Arrow::RightOnly),
            'B' => Some(Arrow::Both),
            _ => None,
        }
    }

    /// Arrow selected by a uniform word: `Both` with probability ε, the
    /// single arrows with probability (1−ε)/2 each.
    #[inline]
    pub fn from_word(word: u64, epsilon: f64) -> Arrow {
        let u = rng::unit_f64(word);
        if u < epsilon {
            Arrow::Both
        } else if u < epsilon + 0.5 * (1.0 - epsilon) {
            Arrow::LeftOnly
        } else {
            Arrow::RightOnly
        }
    }
}

/// Window and law of an arrow field.
///
/// Arrows are generated on `[x_lo - margin, x_hi + margin] × [t_lo, t_hi]`;
/// `margin` only widens the stored window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub epsilon: f64,
    pub x_lo: i64,
    pub x_hi: i64,
    pub t_lo: i64,
    pub t_hi: i64,
    pub seed: u64,
    #[serde(default)]
    pub margin: i64,
}

impl LatticeConfig {
    pub fn new(epsilon: f64, x_lo: i64, x_hi: i64, t_lo: i64, t_hi: i64, seed: u64) -> Self {
        LatticeConfig { epsilon, x_lo, x_hi, t_lo, t_hi, seed, margin: 0 }
    }

    pub fn with_margin(mut self, margin: i64) -> Self {
        self.margin = margin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidConfig(format!("epsilon {} not in [0,1]", self.epsilon)));
        }
        let coords = [self.x_lo, self.x_hi, self.t_lo, self.t_hi, self.margin];
        if coords.iter().any(|c| c.unsigned_abs() > COORD_LIMIT as u64) {
            return Err(Error::InvalidConfig(format!("window bounds and margin must lie within ±{COORD_LIMIT}")));
        }
        if self.x_lo >= self.x_hi || (self.x_hi - self.x_lo) % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "need x_lo < x_hi with even width, got [{}, {}]",
                self.x_lo, self.x_hi
            )));
        }
        if self.t_lo >= self.t_hi {
            return Err(Error::InvalidConfig(format!("need t_lo < t_hi, got [{}, {}]", self.t_lo, self.t_hi)));
        }
        if self.margin < 0 {
            return Err(Error::InvalidConfig("margin must be non-negative".into()));
        }
        Ok(())
    }

    /// Spatial bounds of the stored window.
    pub fn stored_x(&self) -> (i64, i64) {
        (self.x_lo - self.margin, self.x_hi + self.margin)
    }

    pub fn stored_bytes(&self) -> u128 {
        let (lo, hi) = self.stored_x();
        let slots = ((hi - lo) / 2 + 1) as u128;
        let rows = (self.t_hi - self.t_lo + 1) as u128;
        (slots * rows).div_ceil(32) * 8
    }
}

/// Immutable forward arrows, 2 bits per site, row-major.
#[derive(Clone, Debug)]
pub struct ArrowField {
    config: LatticeConfig,
    sx_lo: i64,
    sx_hi: i64,
    slots: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl ArrowField {
    fn allocate(config: &LatticeConfig) -> Result<ArrowField> {
        config.validate()?;
        let needed = config.stored_bytes();
        if needed > MAX_FIELD_BYTES {
            return Err(Error::Capacity { needed, limit: MAX_FIELD_BYTES });
        }
        let (sx_lo, sx_hi) = config.stored_x();
        let slots = ((sx_hi - sx_lo) / 2 + 1) as usize;
        let words_per_row = slots.div_ceil(32);
        let rows = (config.t_hi - config.t_lo + 1) as usize;
        Ok(ArrowField {
            config: config.clone(),
            sx_lo,
            sx_hi,
            slots,
            words_per_row,
            words: vec![0; words_per_row * rows],
        })
    }

    /// Build a field from an explicit rule, e.g. a hand-made fixture.
    pub fn from_fn(config: &LatticeConfig, mut f: impl FnMut(i64, i64) -> Arrow) -> Result<ArrowField> {
        let mut field = ArrowField::allocate(config)?;
        for t in config.t_lo..=config.t_hi {
            let mut x = field.first_x(t);
            while x <= field.sx_hi {
                let a = f(x, t);
                field.set(x, t, a);
                x += 2;
            }
        }
        Ok(field)
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn epsilon(&self) -> f64 {
        self.config.epsilon
    }

    pub fn t_lo(&self) -> i64 {
        self.config.t_lo
    }

    pub fn t_hi(&self) -> i64 {
        self.config.t_hi
    }

    /// Spatial bounds of the stored window (configured window plus margin).
    pub fn x_lo(&self) -> i64 {
        self.sx_lo
    }

    pub fn x_hi(&self) -> i64 {
        self.sx_hi
    }

    /// Smallest stored forward x on row `t`.
    pub fn first_x(&self, t: i64) -> i64 {
        if (self.sx_lo + t).rem_euclid(2) == 0 {
            self.sx_lo
        } else {
            self.sx_lo + 1
        }
    }

    /// Stored forward sites on row `t`, left to right.
    pub fn row_sites(&self, t: i64) -> impl Iterator<Item = i64> {
        let hi = self.sx_hi;
        (self.first_x(t)..=hi).step_by(2)
    }

    /// Stored dual sites on dual row `t` (`t_lo < t <= t_hi + 1`).
    pub fn dual_row_sites(&self, t: i64) -> impl Iterator<Item = i64> {
        self.row_sites(t - 1)
    }

    #[inline]
    pub fn contains(&self, x: i64, t: i64) -> bool {
        t >= self.config.t_lo
            && t <= self.config.t_hi
            && x >= self.sx_lo
            && x <= self.sx_hi
            && (x + t).rem_euclid(2) == 0
    }

    #[inline]
    pub fn contains_dual(&self, x: i64, t: i64) -> bool {
        (x + t).rem_euclid(2) == 1 && self.contains(x, t - 1)
    }

    #[inline]
    fn index(&self, x: i64, t: i64) -> (usize, u32) {
        let slot = ((x - self.sx_lo) / 2) as usize;
        let row = (t - self.config.t_lo) as usize;
        (row * self.words_per_row + slot / 32, 2 * (slot % 32) as u32)
    }

    fn set(&mut self, x: i64, t: i64, a: Arrow) {
        let (w, shift) = self.index(x, t);
        self.words[w] = (self.words[w] & !(3u64 << shift)) | ((a as u64) << shift);
    }

    /// Arrow at a stored forward site; `None` off the window or off parity.
    #[inline]
    pub fn get(&self, x: i64, t: i64) -> Option<Arrow> {
        if !self.contains(x, t) {
            return None;
        }
        let (w, shift) = self.index(x, t);
        Some(Arrow::from_bits(((self.words[w] >> shift) & 3) as u8))
    }

    pub fn mask(&self, x: i64, t: i64) -> Result<Arrow> {
        if (x + t).rem_euclid(2) != 0 {
            return Err(Error::Parity { x, t });
        }
        self.get(x, t).ok_or(Error::OutOfWindow { x, t })
    }

    /// Dual arrows at dual site `(x, t)`, the mirror of forward `(x, t-1)`.
    #[inline]
    pub fn get_dual(&self, x: i64, t: i64) -> Option<Arrow> {
        if (x + t).rem_euclid(2) != 1 {
            return None;
        }
        self.get(x, t - 1).map(Arrow::mirror)
    }

    pub fn dual_mask(&self, x: i64, t: i64) -> Result<Arrow> {
        if (x + t).rem_euclid(2) != 1 {
            return Err(Error::Parity { x, t });
        }
        self.get_dual(x, t).ok_or(Error::OutOfWindow { x, t })
    }

    /// Number of stored forward sites.
    pub fn site_count(&self) -> usize {
        (self.config.t_lo..=self.config.t_hi).map(|t| self.row_sites(t).count()).sum()
    }

    /// Debug dump: header line, then one line of `L`/`R`/`B` per row.
    ///
    /// The header records the stored window, so a parsed dump has margin 0.
    pub fn dump(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "epsilon={} window={},{},{},{} seed={}\n",
            c.epsilon, self.sx_lo, self.sx_hi, c.t_lo, c.t_hi, c.seed
        );
        for t in c.t_lo..=c.t_hi {
            out.extend(self.row_sites(t).map(|x| self.get(x, t).unwrap().to_char()));
            out.push('\n');
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<ArrowField> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty dump".into()))?;
        let mut epsilon = None;
        let mut window = None;
        let mut seed = None;
        for part in header.split_whitespace() {
            let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("bad header token {part:?}")))?;
            let bad = |_| Error::Parse(format!("bad value in {part:?}"));
            match k {
                "epsilon" => epsilon = Some(v.parse::<f64>().map_err(|_| Error::Parse(part.into()))?),
                "seed" => seed = Some(v.parse::<u64>().map_err(|_| Error::Parse(part.into()))?),
                "window" => {
                    let w: Vec<i64> =
                        v.split(',').map(|s| s.parse::<i64>()).collect::<std::result::Result<_, _>>().map_err(bad)?;
                    if w.len() != 4 {
                        return Err(Error::Parse("window needs four integers".into()));
                    }
                    window = Some((w[0], w[1], w[2], w[3]));
                }
                _ => return Err(Error::Parse(format!("unknown header key {k:?}"))),
            }
        }
        let (Some(epsilon), Some((x_lo, x_hi, t_lo, t_hi)), Some(seed)) = (epsilon, window, seed) else {
            return Err(Error::Parse("header needs epsilon, window and seed".into()));
        };
        let config = LatticeConfig::new(epsilon, x_lo, x_hi, t_lo, t_hi, seed);
        let mut field = ArrowField::allocate(&config)?;
        for t in t_lo..=t_hi {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {t}")))?;
            let xs: Vec<i64> = field.row_sites(t).collect();
            let chars: Vec<char> = line.trim_end().chars().collect();
            if chars.len() != xs.len() {
                return Err(Error::Parse(format!("row {t} has {} sites, expected {}", chars.len(), xs.len())));
            }
            for (x, c) in xs.into_iter().zip(chars) {
                let a = Arrow::from_char(c).ok_or_else(|| Error::Parse(format!("bad site char {c:?}")))?;
                field.set(x, t, a);
            }
        }
        Ok(field)
    }
}

/// Sample the field of `config`. Each site is decided by
/// `rng::site_word(seed, x, t)`, so the result does not depend on thread
/// count or traversal order.
pub fn sample_arrow_field(config: &LatticeConfig) -> Result<ArrowField> {
    let mut field = ArrowField::allocate(config)?;
    let eps = config.epsilon;
    let seed = config.seed;
    let t_lo = config.t_lo;
    let sx_lo = field.sx_lo;
    let slots = field.slots;
    let wpr = field.words_per_row;
    let fill_row = |(r, row): (usize, &mut [u64])| {
        let t = t_lo + r as i64;
        let x0 = if (sx_lo + t).rem_euclid(2) == 0 { sx_lo } else { sx_lo + 1 };
        for slot in 0..slots {
            let x = x0 + 2 * slot as i64;
            if x > field_x_hi(sx_lo, slots) {
                break;
            }
            let a = Arrow::from_word(rng::site_word(seed, x, t), eps);
            row[slot / 32] |= (a as u64) << (2 * (slot % 32));
        }
    };
    if field.words.len() > 1 << 16 {
        field.words.par_chunks_mut(wpr).enumerate().for_each(fill_row);
    } else {
        field.words.chunks_mut(wpr).enumerate().for_each(fill_row);
    }
    Ok(field)
}

#[inline]
fn field_x_hi(sx_lo: i64, slots: usize) -> i64 {
    sx_lo + 2 * (slots as i64 - 1)
}

/// Read-only dual view of a field.
#[derive(Clone, Copy)]
pub struct DualView<'a> {
    field: &'a ArrowField,
}

impl DualView<'_> {
    pub fn get(&self, x: i64, t: i64) -> Option<Arrow> {
        self.field.get_dual(x, t)
    }
}

pub fn dual_arrows(field: &ArrowField) -> DualView<'_> {
    DualView { field }
}

/// Conditional step law of a forward right-most walker beside a dual
/// left-most walker, derived from the site law and the mirror rule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelTable {
    pub epsilon: f64,
    /// P[step right] with no dual walker adjacent.
    pub off_contact_right: f64,
    /// P[step right] at a left contact: the dual walker at `(x+1, t+1)`
    /// stepped right to `(x, t)`'s right neighbour slot, i.e. the two
    /// segments would cross. This is the crossing probability.
    pub left_contact_right: f64,
    /// P[step right] at a right contact (dual walker stepped left); `None`
    /// when that event has probability zero.
    pub right_contact_right: Option<f64>,
}

/// Enumerate the three site states to obtain the contact kernel.
///
/// The dual left-most path takes its right arrow when it has one; a dual
/// right arrow exists iff the forward site has a left arrow.
pub fn transition_kernel_check(epsilon: f64) -> KernelTable {
    let law =
        [(Arrow::LeftOnly, 0.5 * (1.0 - epsilon)), (Arrow::RightOnly, 0.5 * (1.0 - epsilon)), (Arrow::Both, epsilon)];
    let mut p_right = 0.0;
    let (mut dual_r, mut dual_r_and_fwd_r) = (0.0, 0.0);
    let (mut dual_l, mut dual_l_and_fwd_r) = (0.0, 0.0);
    for (a, p) in law {
        if a.has_right() {
            p_right += p;
        }
        if a.mirror().has_right() {
            dual_r += p;
            if a.has_right() {
                dual_r_and_fwd_r += p;
            }
        } else {
            dual_l += p;
            if a.has_right() {
                dual_l_and_fwd_r += p;
            }
        }
    }
    KernelTable {
        epsilon,
        off_contact_right: p_right,
        left_contact_right: dual_r_and_fwd_r / dual_r,
        right_contact_right: if dual_l > 0.0 { Some(dual_l_and_fwd_r / dual_l) } else { None },
    }
}

/// Empirical left-contact statistics gathered from sampled fields.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContactSample {
    pub epsilon: f64,
    pub events: u64,
    pub crossings: u64,
    pub exact: f64,
}

impl ContactSample {
    pub fn frequency(&self) -> f64 {
        self.crossings as f64 / self.events as f64
    }

    pub fn stderr(&self) -> f64 {
        (self.exact * (1.0 - self.exact) / self.events as f64).sqrt()
    }
}

const CONTACT_WIDTH: i64 = 2048;
const CONTACT_HEIGHT: i64 = 16;

/// Count left-contact events between forward right-most and dual left-most
/// walkers, and how often the forward walker steps right (crosses).
///
/// Each field releases a right-most walker from every bottom site and a
/// dual left-most walker from every top dual site. A site `(y, s)` is an
/// event when it is visited by a forward walker and the dual walker at
/// `(y, s+1)` steps right past it. The visit depends on rows below `s`, the
/// dual step on row `s` only through the mirror rule, so each event is a
/// fresh draw from the conditional kernel.
pub fn contact_kernel_sample(epsilon: f64, min_events: u64, seed: u64) -> Result<ContactSample> {
    let exact = transition_kernel_check(epsilon).left_contact_right;
    let batch = 16u64;
    let mut events = 0u64;
    let mut crossings = 0u64;
    let mut next = 0u64;
    while events < min_events {
        let counts: Vec<Result<(u64, u64)>> = (next..next + batch)
            .into_par_iter()
            .map(|i| {
                let cfg =
                    LatticeConfig::new(epsilon, 0, CONTACT_WIDTH, 0, CONTACT_HEIGHT, rng::replicate_seed(seed, i));
                contact_events_in_field(&sample_arrow_field(&cfg)?)
            })
            .collect();
        for c in counts {
            let (e, k) = c?;
            events += e;
            crossings += k;
        }
        next += batch;
    }
    Ok(ContactSample { epsilon, events, crossings, exact })
}

fn contact_events_in_field(field: &ArrowField) -> Result<(u64, u64)> {
    let (t_lo, t_hi) = (field.t_lo(), field.t_hi());
    let (x_lo, x_hi) = (field.x_lo(), field.x_hi());
    let width = (x_hi - x_lo + 1) as usize;
    let rows = (t_hi - t_lo + 2) as usize;
    // fwd[t][x]: visited by a forward right-most walker from the bottom row.
    let mut fwd = vec![vec![false; width]; rows];
    for x in field.row_sites(t_lo) {
        fwd[0][(x - x_lo) as usize] = true;
    }
    for t in t_lo..t_hi {
        for x in field.row_sites(t) {
            if fwd[(t - t_lo) as usize][(x - x_lo) as usize] {
                let a = field.get(x, t).unwrap();
                let nx = if a.has_right() { x + 1 } else { x - 1 };
                if nx >= x_lo && nx <= x_hi {
                    fwd[(t + 1 - t_lo) as usize][(nx - x_lo) as usize] = true;
                }
            }
        }
    }
    // dual[t][x]: visited by a dual left-most walker from the top dual row.
    let mut dual = vec![vec![false; width]; rows];
    for x in field.dual_row_sites(t_hi + 1) {
        dual[(t_hi + 1 - t_lo) as usize][(x - x_lo) as usize] = true;
    }
    let (mut events, mut crossings) = (0, 0);
    for t in (t_lo + 1..=t_hi + 1).rev() {
        for x in field.dual_row_sites(t) {
            if !dual[(t - t_lo) as usize][(x - x_lo) as usize] {
                continue;
            }
            let d = field.get_dual(x, t).unwrap();
            let steps_right = d.has_right();
            if steps_right && fwd[(t - 1 - t_lo) as usize][(x - x_lo) as usize] {
                events += 1;
                if field.get(x, t - 1).unwrap().has_right() {
                    crossings += 1;
                }
            }
            let nx = if steps_right { x + 1 } else { x - 1 };
            if nx >= x_lo && nx <= x_hi {
                dual[(t - 1 - t_lo) as usize][(nx - x_lo) as usize] = true;
            }
        }
    }
    Ok((events, crossings))
}
