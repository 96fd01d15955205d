//! Cyclic chain words with one or more distinguished entries, the boundary
//! operator they share, cochains with cup product, and the non-unital
//! variant of the chain complex with its circle action.
//!
//! A [`Word`] is a cyclic tensor word with `p >= 1` distinguished
//! ("bold") entries, each followed by a string of plain tensor entries.
//! For `p = 1` this is an ordinary cyclic bar word; for larger `p` it is a
//! chain on the `p`-fold tensor power of the diagonal bimodule. One engine,
//! [`boundary_word`], computes the boundary for every fold count: it applies
//! a structure map to each cyclically consecutive segment containing at most
//! one bold entry, with signs from [`crate::signs`] (segments through a bold
//! entry use the diagonal bimodule twist). The boundary used throughout the
//! crate is MINUS the raw rule; the orientation is fixed once by the oracle
//! test `monomial_boundary_values` and everything downstream (cycle
//! generators, witness identities, the action matrices) is consistent with
//! it.
//!
//! Degrees: bold entries count with their unshifted degree, string entries
//! with the shifted one. The parity of a word is the sum.

use std::collections::BTreeMap;
use std::fmt;

use crate::ainfty::{gen_words, string_parity, Gen, MinimalModel, PreMor};
use crate::linear::{sv_add_scaled, sv_scale, sv_zero, SparseVec};
use crate::scalars::Field;
use crate::signs::{insertion, rotation, Parity, Sign, EVEN, MINUS, ODD, PLUS};

/// Cyclic chain word: `p` blocks, each a bold entry followed by its string.
/// The last block's string is the one that cyclically precedes the first
/// bold entry.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Word {
    pub blocks: Vec<(Gen, Vec<Gen>)>,
}

impl Word {
    pub fn single(bold: Gen, string: Vec<Gen>) -> Self {
        Word {
            blocks: vec![(bold, string)],
        }
    }

    pub fn new(blocks: Vec<(Gen, Vec<Gen>)>) -> Self {
        assert!(!blocks.is_empty(), "a chain word has at least one block");
        Word { blocks }
    }

    /// Number of distinguished entries.
    pub fn fold(&self) -> usize {
        self.blocks.len()
    }

    /// Total number of tensor entries, bold ones included.
    pub fn len(&self) -> usize {
        self.fold() + self.string_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total number of plain string entries.
    pub fn string_len(&self) -> usize {
        self.blocks.iter().map(|(_, s)| s.len()).sum()
    }

    /// Mod-2 degree: unshifted on bold entries, shifted on string entries.
    pub fn parity(&self) -> Parity {
        let mut p = EVEN;
        for (bold, s) in &self.blocks {
            p += bold.parity();
            p += string_parity(s);
        }
        p
    }

    /// Number of odd-generator entries, bold ones included.
    pub fn odd_count(&self) -> usize {
        self.blocks
            .iter()
            .map(|(bold, s)| {
                usize::from(*bold == Gen::D) + s.iter().filter(|g| **g == Gen::D).count()
            })
            .sum()
    }

    /// True when no string entry is the unit (bold entries may be).
    pub fn is_normalized(&self) -> bool {
        self.blocks
            .iter()
            .all(|(_, s)| s.iter().all(|g| *g != Gen::E))
    }

    /// Compact text form: each block as `[bold]` followed by its string.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (bold, s) in &self.blocks {
            write!(f, "[{}]", bold.label())?;
            for g in s {
                write!(f, "{}", g.label())?;
            }
        }
        Ok(())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.fold()
            .cmp(&other.fold())
            .then(self.len().cmp(&other.len()))
            .then_with(|| self.blocks.cmp(&other.blocks))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Chains are finitely supported combinations of words.
pub type Chain<F> = SparseVec<Word, F>;

/// The shared orientation of every chain-side boundary operator: the raw
/// segment rule is negated. See the module documentation.
const CHAIN_FLIP: Sign = MINUS;

/// Boundary of a single word. With `normalized` set, output words with a
/// unit in a string position are dropped (the quotient by degenerate words;
/// the escape terms cancel in pairs, which `degenerate_words_stay_degenerate`
/// checks).
pub fn boundary_word<F: Field>(
    model: &MinimalModel<F>,
    w: &Word,
    normalized: bool,
) -> Chain<F> {
    let p = w.fold();
    let mut out: Chain<F> = sv_zero();
    let total = w.parity();

    // structure map on a segment interior to one string
    for bi in 0..p {
        let s = &w.blocks[bi].1;
        for a in 0..s.len() {
            for b in (a + 2)..=s.len() {
                let inner = model.mu(&s[a..b]);
                if inner.is_empty() {
                    continue;
                }
                let mut right = string_parity(&s[b..]);
                for (bold, t) in &w.blocks[bi + 1..] {
                    right += bold.parity();
                    right += string_parity(t);
                }
                let sign = CHAIN_FLIP * insertion(ODD, right);
                for (g, c) in &inner {
                    let mut blocks = w.blocks.clone();
                    let string = &mut blocks[bi].1;
                    string.splice(a..b, std::iter::once(*g));
                    let word = Word { blocks };
                    if normalized && !word.is_normalized() {
                        continue;
                    }
                    sv_add_scaled(&mut out, &crate::linear::sv_unit(word), &sign.apply(c.clone()));
                }
            }
        }
    }

    // structure map around a bold entry: consumes the tail of the preceding
    // string and the head of its own string
    for bi in 0..p {
        let prev = (bi + p - 1) % p;
        let bold = w.blocks[bi].0;
        let own_len = w.blocks[bi].1.len();
        let prev_len = w.blocks[prev].1.len();
        for r in 0..=prev_len {
            for s in 0..=own_len {
                if r + s == 0 {
                    continue;
                }
                if p == 1 && r + s > own_len {
                    break;
                }
                let (left_args, right_args) = if p == 1 {
                    (&w.blocks[0].1[own_len - r..], &w.blocks[0].1[..s])
                } else {
                    (&w.blocks[prev].1[prev_len - r..], &w.blocks[bi].1[..s])
                };
                let val = model.mu_diag(left_args, bold, right_args);
                if val.is_empty() {
                    continue;
                }

                // wrap rotation: the consumed tail of the last string moves
                // in front of the first bold entry
                let mut sign = CHAIN_FLIP;
                if bi == 0 && r > 0 {
                    let moved = string_parity(left_args);
                    sign = sign * rotation(moved, total + moved);
                }

                // entries to the right of the consumed segment
                let mut right = string_parity(&w.blocks[bi].1[s..]);
                if p == 1 {
                    right = string_parity(&w.blocks[0].1[s..own_len - r]);
                } else {
                    for (j, (b2, t)) in w.blocks.iter().enumerate().skip(bi + 1) {
                        right += b2.parity();
                        if bi == 0 && j == prev {
                            right += string_parity(&t[..prev_len - r]);
                        } else {
                            right += string_parity(t);
                        }
                    }
                }
                let sign = sign * insertion(ODD, right);

                for (g, c) in &val {
                    let mut blocks = w.blocks.clone();
                    if p == 1 {
                        let string = blocks[0].1[s..own_len - r].to_vec();
                        blocks[0] = (*g, string);
                    } else {
                        blocks[prev].1.truncate(prev_len - r);
                        let string = blocks[bi].1[s..].to_vec();
                        blocks[bi] = (*g, string);
                    }
                    let word = Word { blocks };
                    if normalized && !word.is_normalized() {
                        continue;
                    }
                    sv_add_scaled(&mut out, &crate::linear::sv_unit(word), &sign.apply(c.clone()));
                }
            }
        }
    }

    out
}

/// Linear extension of [`boundary_word`].
pub fn boundary<F: Field>(model: &MinimalModel<F>, c: &Chain<F>, normalized: bool) -> Chain<F> {
    let mut out = sv_zero();
    for (w, x) in c {
        let dw = boundary_word(model, w, normalized);
        sv_add_scaled(&mut out, &dw, x);
    }
    out
}

/// Projection onto the span of normalized words.
pub fn project_normalized<F: Field>(c: &Chain<F>) -> Chain<F> {
    c.iter()
        .filter(|(w, _)| w.is_normalized())
        .map(|(w, x)| (w.clone(), x.clone()))
        .collect()
}

/// Cyclic rotation of blocks: the last block (bold entry plus its string)
/// moves in front, with the rotation sign (the moved bold entry counts with
/// its unshifted degree).
pub fn tau_word(w: &Word) -> (Sign, Word) {
    let p = w.fold();
    if p <= 1 {
        return (PLUS, w.clone());
    }
    let last = w.blocks[p - 1].clone();
    let moved = last.0.parity() + string_parity(&last.1);
    let sign = rotation(moved, w.parity() + moved);
    let mut blocks = Vec::with_capacity(p);
    blocks.push(last);
    blocks.extend_from_slice(&w.blocks[..p - 1]);
    (sign, Word { blocks })
}

/// Linear extension of [`tau_word`].
pub fn tau<F: Field>(c: &Chain<F>) -> Chain<F> {
    let mut out = sv_zero();
    for (w, x) in c {
        let (sign, rot) = tau_word(w);
        sv_add_scaled(&mut out, &crate::linear::sv_unit(rot), &sign.apply(x.clone()));
    }
    out
}

/// Sum of all block rotations `1 + tau + ... + tau^{p-1}`, applied per word
/// with the word's own fold count.
pub fn rotation_norm<F: Field>(c: &Chain<F>) -> Chain<F> {
    let mut out = sv_zero();
    for (w, x) in c {
        let mut cur = crate::linear::sv_unit(w.clone());
        sv_add_scaled(&mut out, &sv_scale(&cur, x), &F::one());
        for _ in 1..w.fold() {
            cur = tau(&cur);
            sv_add_scaled(&mut out, &sv_scale(&cur, x), &F::one());
        }
    }
    out
}

/// All words with the given fold count whose strings consist of `string_len`
/// odd generators in total, distributed over the blocks in every way, with
/// every choice of bold entries. This is the normalized basis in one
/// odd-generator count.
pub fn normalized_words(fold: usize, string_len: usize) -> Vec<Word> {
    fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
        if parts == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 0..=total {
            for mut rest in compositions(parts - 1, total - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut out = Vec::new();
    for bolds in gen_words(fold) {
        for comp in compositions(fold, string_len) {
            let blocks = bolds
                .iter()
                .zip(&comp)
                .map(|(b, n)| (*b, vec![Gen::D; *n]))
                .collect();
            out.push(Word { blocks });
        }
    }
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Cochains
// ---------------------------------------------------------------------------

/// Normalized multilinear cochain, determined by its values on strings of
/// odd generators; it vanishes whenever an input entry is the unit. The
/// stored parity is the unshifted mod-2 degree of the map.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<F: Field> {
    pub parity: Parity,
    pub comp: BTreeMap<usize, SparseVec<Gen, F>>,
}

impl<F: Field> Cochain<F> {
    pub fn zero(parity: Parity) -> Self {
        Cochain {
            parity,
            comp: BTreeMap::new(),
        }
    }

    /// The cochain supported in one arity, sending the string of `arity` odd
    /// generators to `out`.
    pub fn basis(arity: usize, out: Gen) -> Self {
        let mut comp = BTreeMap::new();
        comp.insert(arity, crate::linear::sv_unit::<_, F>(out));
        Cochain {
            parity: out.parity(),
            comp,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comp.values().all(|v| v.is_empty())
    }

    /// Value on an arbitrary word; zero if any entry is the unit.
    pub fn eval(&self, word: &[Gen]) -> SparseVec<Gen, F> {
        if word.iter().any(|g| *g == Gen::E) {
            return sv_zero();
        }
        self.comp.get(&word.len()).cloned().unwrap_or_default()
    }

    pub fn coefficient(&self, arity: usize, out: Gen) -> F {
        self.comp
            .get(&arity)
            .and_then(|v| v.get(&out).cloned())
            .unwrap_or_else(F::zero)
    }

    pub fn add_scaled(&mut self, other: &Self, c: &F) {
        assert_eq!(self.parity, other.parity);
        for (k, v) in &other.comp {
            let mut cur = self.comp.remove(k).unwrap_or_default();
            sv_add_scaled(&mut cur, v, c);
            if !cur.is_empty() {
                self.comp.insert(*k, cur);
            }
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        Cochain {
            parity: self.parity,
            comp: self
                .comp
                .iter()
                .map(|(k, v)| (*k, sv_scale(v, c)))
                .collect(),
        }
    }

    /// Cochain differential: structure maps applied around the cochain, plus
    /// (-1)^(parity) times the cochain applied around inner structure maps
    /// (the shifted parity carries the customary leading minus). Components
    /// are produced for input arities up to `max_arity`.
    pub fn differential(&self, model: &MinimalModel<F>, max_arity: usize) -> Self {
        let mut out = Cochain::zero(self.parity.flip());
        for n in 0..=max_arity {
            let word = vec![Gen::D; n];
            let mut acc: SparseVec<Gen, F> = sv_zero();

            // mu around the cochain's output
            for (&k, val) in &self.comp {
                if k > n {
                    continue;
                }
                for r in 0..=(n - k) {
                    let s = n - k - r;
                    let sign = insertion(self.parity, string_parity(&word[..s]));
                    for (g, c) in val {
                        let mut args = Vec::with_capacity(r + 1 + s);
                        args.extend_from_slice(&word[..r]);
                        args.push(*g);
                        args.extend_from_slice(&word[..s]);
                        let outer = model.mu(&args);
                        sv_add_scaled(&mut acc, &outer, &sign.apply(c.clone()));
                    }
                }
            }

            // cochain around an inner structure map
            let outer_sign = Sign::from_parity(self.parity);
            for a in 0..n {
                for m in 2..=(n - a) {
                    let inner = model.mu(&word[..m]);
                    if inner.is_empty() {
                        continue;
                    }
                    let sign = outer_sign * insertion(ODD, string_parity(&word[..n - a - m]));
                    for (g, c) in &inner {
                        let mut args = Vec::with_capacity(n - m + 1);
                        args.extend_from_slice(&word[..a]);
                        args.push(*g);
                        args.extend_from_slice(&word[..n - a - m]);
                        let val = self.eval(&args);
                        sv_add_scaled(&mut acc, &val, &sign.apply(c.clone()));
                    }
                }
            }

            if !acc.is_empty() {
                out.comp.insert(n, acc);
            }
        }
        out
    }

    /// Cup product: one structure map consuming both cochains' outputs, the
    /// first factor's block to the left of the second's. Components are
    /// produced for input arities up to `max_arity`.
    pub fn cup(&self, other: &Self, model: &MinimalModel<F>, max_arity: usize) -> Self {
        let mut out = Cochain::zero(self.parity + other.parity);
        for n in 0..=max_arity {
            let word = vec![Gen::D; n];
            let mut acc: SparseVec<Gen, F> = sv_zero();
            for (&r, val1) in &self.comp {
                for (&l, val2) in &other.comp {
                    if r + l > n {
                        continue;
                    }
                    for i in 0..=(n - r - l) {
                        for mid in 0..=(n - r - l - i) {
                            let tail = n - r - l - i - mid;
                            let tail_par = string_parity(&word[..tail]);
                            let mid_par = string_parity(&word[..mid]);
                            let sign = insertion(self.parity, tail_par + mid_par)
                                * insertion(other.parity, tail_par);
                            for (g1, c1) in val1 {
                                for (g2, c2) in val2 {
                                    let mut args = Vec::with_capacity(n - r - l + 2);
                                    args.extend_from_slice(&word[..i]);
                                    args.push(*g1);
                                    args.extend_from_slice(&word[..mid]);
                                    args.push(*g2);
                                    args.extend_from_slice(&word[..tail]);
                                    let outer = model.mu(&args);
                                    let c = sign.apply(c1.clone()) * c2.clone();
                                    sv_add_scaled(&mut acc, &outer, &c);
                                }
                            }
                        }
                    }
                }
            }
            if !acc.is_empty() {
                out.comp.insert(n, acc);
            }
        }
        out
    }

    /// The bimodule premorphism induced by a cochain: the cochain consumes a
    /// consecutive block of the right string and its output joins the
    /// remaining entries under one diagonal bimodule structure map, with the
    /// cochain's parity passing the trailing entries. Components are
    /// produced for string lengths up to the given caps.
    pub fn premorphism(
        &self,
        model: &MinimalModel<F>,
        left_cap: usize,
        right_cap: usize,
    ) -> PreMor<F> {
        let mut acc: BTreeMap<(Vec<Gen>, Gen, Vec<Gen>), SparseVec<Gen, F>> = BTreeMap::new();
        for k in 0..=left_cap {
            for l in 0..=right_cap {
                for word in gen_words(k + l + 1) {
                    let (x, rest) = word.split_at(k);
                    let bold = rest[0];
                    let y = &rest[1..];
                    let mut val: SparseVec<Gen, F> = sv_zero();
                    for (&r, phi_val) in &self.comp {
                        if r > l {
                            continue;
                        }
                        for i in 0..=(l - r) {
                            let block = &y[i..i + r];
                            if block.iter().any(|g| *g == Gen::E) {
                                continue;
                            }
                            let sign = insertion(self.parity, string_parity(&y[i + r..]));
                            for (g, c) in phi_val {
                                let mut right = Vec::with_capacity(l - r + 1);
                                right.extend_from_slice(&y[..i]);
                                right.push(*g);
                                right.extend_from_slice(&y[i + r..]);
                                let outer = model.mu_diag(x, bold, &right);
                                sv_add_scaled(&mut val, &outer, &sign.apply(c.clone()));
                            }
                        }
                    }
                    if !val.is_empty() {
                        acc.insert((x.to_vec(), bold, y.to_vec()), val);
                    }
                }
            }
        }
        let mut out = PreMor::zero(self.parity);
        for ((left, bold, right), val) in acc {
            out.set(left, bold, right, val);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Non-unital chain complex and the circle action
// ---------------------------------------------------------------------------

/// Element of the two-summand chain model: an ordinary cyclic word, or a
/// plain bar word with no distinguished entry.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum NuWord {
    Cyc(Word),
    Bar(Vec<Gen>),
}

impl fmt::Display for NuWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NuWord::Cyc(w) => write!(f, "{w}"),
            NuWord::Bar(v) => {
                write!(f, "(")?;
                for g in v {
                    write!(f, "{}", g.label())?;
                }
                write!(f, ")")
            }
        }
    }
}

pub type NuChain<F> = SparseVec<NuWord, F>;

fn nu_add<F: Field>(out: &mut NuChain<F>, w: NuWord, c: F) {
    if c.is_zero() {
        return;
    }
    let entry = out.entry(w).or_insert_with(F::zero);
    *entry = entry.clone() + c;
    // drop exact cancellations to keep supports small
    let dead: Vec<NuWord> = out
        .iter()
        .filter(|(_, v)| v.is_zero())
        .map(|(k, _)| k.clone())
        .collect();
    for k in dead {
        out.remove(&k);
    }
}

/// Bar differential: one structure map on each consecutive segment, sign
/// from the entries to its right, negated like every chain-side boundary.
fn bar_boundary<F: Field>(model: &MinimalModel<F>, v: &[Gen]) -> NuChain<F> {
    let mut out: NuChain<F> = sv_zero();
    for a in 0..v.len() {
        for b in (a + 2)..=v.len() {
            let inner = model.mu(&v[a..b]);
            if inner.is_empty() {
                continue;
            }
            let sign = CHAIN_FLIP * insertion(ODD, string_parity(&v[b..]));
            for (g, c) in &inner {
                let mut spliced = v.to_vec();
                spliced.splice(a..b, std::iter::once(*g));
                nu_add(&mut out, NuWord::Bar(spliced), sign.apply(c.clone()));
            }
        }
    }
    out
}

/// The two ways a bar word re-enters the cyclic summand: its last entry
/// promoted to the bold position in front (with the unshifted-degree
/// rotation sign and a leading minus), and its first entry promoted in
/// place (with the sign of the remaining entries).
fn seam<F: Field>(v: &[Gen]) -> NuChain<F> {
    let mut out: NuChain<F> = sv_zero();
    let d = v.len();
    if d == 0 {
        return out;
    }
    let last = v[d - 1];
    let sign1 = CHAIN_FLIP * MINUS * Sign::koszul(last.parity(), string_parity(&v[..d - 1]));
    nu_add(
        &mut out,
        NuWord::Cyc(Word::single(last, v[..d - 1].to_vec())),
        sign1.unit::<F>(),
    );
    let sign2 = CHAIN_FLIP * Sign::from_parity(string_parity(&v[1..]));
    nu_add(
        &mut out,
        NuWord::Cyc(Word::single(v[0], v[1..].to_vec())),
        sign2.unit::<F>(),
    );
    out
}

/// Differential of the two-summand complex: the cyclic boundary on the
/// first summand; the seam map plus the bar differential on the second.
pub fn nu_boundary<F: Field>(model: &MinimalModel<F>, w: &NuWord) -> NuChain<F> {
    match w {
        NuWord::Cyc(word) => boundary_word(model, word, false)
            .into_iter()
            .map(|(w, c)| (NuWord::Cyc(w), c))
            .collect(),
        NuWord::Bar(v) => {
            let mut out = seam(v);
            for (w, c) in bar_boundary(model, v) {
                nu_add(&mut out, w, c);
            }
            out
        }
    }
}

pub fn nu_boundary_chain<F: Field>(model: &MinimalModel<F>, c: &NuChain<F>) -> NuChain<F> {
    let mut out = sv_zero();
    for (w, x) in c {
        for (term, c2) in nu_boundary(model, w) {
            nu_add(&mut out, term, c2 * x.clone());
        }
    }
    out
}

/// Circle operator: every cyclic rotation of a one-bold word lands in the
/// bar summand with all entries on their shifted degree; bar words are
/// annihilated.
pub fn connes_word<F: Field>(w: &NuWord) -> NuChain<F> {
    let mut out: NuChain<F> = sv_zero();
    let word = match w {
        NuWord::Bar(_) => return out,
        NuWord::Cyc(word) => word,
    };
    assert_eq!(word.fold(), 1, "the circle operator acts on one-bold words");
    let mut full = vec![word.blocks[0].0];
    full.extend_from_slice(&word.blocks[0].1);
    let k = full.len();
    let total = string_parity(&full);
    let bold_red = full[0].reduced();
    for i in 1..=k {
        let moved = string_parity(&full[k - i..]);
        let kept = total + moved;
        let mut exponent = if moved.is_odd() && kept.is_odd() { ODD } else { EVEN };
        exponent += bold_red;
        exponent += total;
        exponent += ODD;
        let sign = Sign::from_parity(exponent);
        let mut bar = full[k - i..].to_vec();
        bar.extend_from_slice(&full[..k - i]);
        nu_add(&mut out, NuWord::Bar(bar), sign.unit::<F>());
    }
    out
}

pub fn connes_chain<F: Field>(c: &NuChain<F>) -> NuChain<F> {
    let mut out = sv_zero();
    for (w, x) in c {
        for (term, c2) in connes_word::<F>(w) {
            nu_add(&mut out, term, c2 * x.clone());
        }
    }
    out
}

/// One step of the cyclic differential on a polynomial in the degree-two
/// formal variable: coefficient `j` of the image is the boundary of
/// coefficient `j` plus the circle operator applied to coefficient `j - 1`.
pub fn cyclic_boundary<F: Field>(
    model: &MinimalModel<F>,
    coeffs: &[NuChain<F>],
) -> Vec<NuChain<F>> {
    let mut out: Vec<NuChain<F>> = Vec::with_capacity(coeffs.len() + 1);
    for j in 0..=coeffs.len() {
        let mut acc: NuChain<F> = sv_zero();
        if j < coeffs.len() {
            for (w, c) in nu_boundary_chain(model, &coeffs[j]) {
                nu_add(&mut acc, w, c);
            }
        }
        if j > 0 {
            for (w, c) in connes_chain(&coeffs[j - 1]) {
                nu_add(&mut acc, w, c);
            }
        }
        out.push(acc);
    }
    while out.last().is_some_and(|c| c.is_empty()) {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::sv_unit;
    use crate::scalars::{rat, Fp, Rat};
    use proptest::prelude::*;

    fn d_word(fold_bolds: &[(Gen, usize)]) -> Word {
        Word::new(
            fold_bolds
                .iter()
                .map(|(b, n)| (*b, vec![Gen::D; *n]))
                .collect(),
        )
    }

    #[test]
    fn monomial_boundary_values() {
        // the orientation oracle: over the degree-n monomial model,
        // b([d]d^k) = n [1]d^{k-n+1} and b([1]d^k) = 0 in the normalized
        // complex
        for n in [3usize, 4] {
            let m = MinimalModel::<Rat>::monomial(n);
            for k in n - 1..n + 3 {
                let w = d_word(&[(Gen::D, k)]);
                let b = boundary_word(&m, &w, true);
                let mut expect: Chain<Rat> = sv_zero();
                expect.insert(d_word(&[(Gen::E, k + 1 - n)]), rat(n as i64, 1));
                assert_eq!(b, expect, "n = {n}, k = {k}");

                let w = d_word(&[(Gen::E, k)]);
                assert!(boundary_word(&m, &w, true).is_empty(), "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn short_words_are_cycles() {
        let m = MinimalModel::<Rat>::monomial(4);
        for k in 0..3 {
            assert!(boundary_word(&m, &d_word(&[(Gen::D, k)]), true).is_empty());
        }
    }

    #[test]
    fn three_fold_generator_words_are_cycles() {
        // sum over all string splittings with bold entries (1, 1, d) of a
        // fixed total odd count k < n - 1
        let n = 5;
        let m = MinimalModel::<Rat>::monomial(n);
        for k in 0..n - 1 {
            let mut c: Chain<Rat> = sv_zero();
            for k1 in 0..=k {
                for k2 in 0..=k - k1 {
                    let k3 = k - k1 - k2;
                    c.insert(
                        d_word(&[(Gen::E, k1), (Gen::E, k2), (Gen::D, k3)]),
                        rat(1, 1),
                    );
                }
            }
            assert!(boundary(&m, &c, true).is_empty(), "k = {k}");
        }
    }

    #[test]
    fn tau_moves_the_last_block_in_front() {
        let w = Word::new(vec![
            (Gen::E, vec![]),
            (Gen::E, vec![]),
            (Gen::D, vec![]),
        ]);
        let (sign, rot) = tau_word(&w);
        assert_eq!(sign, PLUS);
        assert_eq!(
            rot,
            Word::new(vec![
                (Gen::D, vec![]),
                (Gen::E, vec![]),
                (Gen::E, vec![]),
            ])
        );
    }

    #[test]
    fn degenerate_words_stay_degenerate() {
        // the boundary of a word with a unit string entry projects to zero:
        // the two escape terms cancel
        let m = MinimalModel::<Rat>::monomial(3);
        let mut w = d_word(&[(Gen::D, 3)]);
        w.blocks[0].1[1] = Gen::E;
        let b = boundary_word(&m, &w, false);
        assert!(project_normalized(&b).is_empty());
        assert!(boundary_word(&m, &w, true).is_empty());
    }

    fn arb_gen() -> impl Strategy<Value = Gen> {
        prop_oneof![Just(Gen::E), Just(Gen::D)]
    }

    fn arb_word(max_fold: usize, max_string: usize) -> impl Strategy<Value = Word> {
        (1..=max_fold)
            .prop_flat_map(move |p| {
                prop::collection::vec(
                    (arb_gen(), prop::collection::vec(arb_gen(), 0..=max_string)),
                    p,
                )
            })
            .prop_map(|blocks| Word { blocks })
    }

    fn arb_model() -> impl Strategy<Value = MinimalModel<Fp<7>>> {
        (1i64..7, 0i64..7, 0i64..7).prop_map(|(a, b, c)| {
            MinimalModel::new(crate::ainfty::Potential::new([
                (2, Fp::<7>::new(a)),
                (3, Fp::<7>::new(b)),
                (4, Fp::<7>::new(c)),
            ]))
        })
    }

    proptest! {
        #[test]
        fn boundary_squares_to_zero(m in arb_model(), w in arb_word(3, 3)) {
            let b = boundary_word(&m, &w, false);
            prop_assert!(boundary(&m, &b, false).is_empty());
        }

        #[test]
        fn normalized_boundary_squares_to_zero(m in arb_model(), w in arb_word(3, 3)) {
            prop_assume!(w.is_normalized());
            let b = boundary_word(&m, &w, true);
            prop_assert!(boundary(&m, &b, true).is_empty());
        }

        #[test]
        fn normalization_is_a_chain_map(m in arb_model(), w in arb_word(3, 3)) {
            // project after the full boundary = normalized boundary of the
            // projection
            let lhs = project_normalized(&boundary_word(&m, &w, false));
            let rhs = if w.is_normalized() {
                boundary_word(&m, &w, true)
            } else {
                sv_zero()
            };
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn rotation_commutes_with_the_boundary(m in arb_model(), w in arb_word(3, 3)) {
            let lhs = tau(&boundary_word(&m, &w, false));
            let rhs = boundary(&m, &tau(&sv_unit(w)), false);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn rotation_has_the_fold_count_as_order(w in arb_word(4, 3)) {
            let mut c: Chain<Fp<7>> = sv_unit(w.clone());
            for _ in 0..w.fold() {
                c = tau(&c);
            }
            prop_assert_eq!(c, sv_unit::<_, Fp<7>>(w));
        }

        #[test]
        fn odd_count_is_conserved_mod_the_weight(w in arb_word(3, 3)) {
            let n = 3usize;
            let m = MinimalModel::<Fp<7>>::monomial(n);
            let k = w.odd_count();
            for (term, _) in boundary_word(&m, &w, false) {
                prop_assert_eq!(term.odd_count() % n, k % n);
            }
        }

        #[test]
        fn nu_boundary_squares_to_zero(m in arb_model(), v in prop::collection::vec(arb_gen(), 1..5)) {
            let b = nu_boundary(&m, &NuWord::Bar(v));
            prop_assert!(nu_boundary_chain(&m, &b).is_empty());
        }

        #[test]
        fn circle_operator_squares_to_zero(w in arb_word(1, 4)) {
            let b: NuChain<Fp<7>> = connes_word(&NuWord::Cyc(w));
            prop_assert!(connes_chain(&b).is_empty());
        }

        #[test]
        fn circle_operator_anticommutes_with_the_boundary(
            m in arb_model(),
            w in arb_word(1, 3),
        ) {
            let x = NuWord::Cyc(w);
            let mut lhs: NuChain<Fp<7>> = connes_chain(&nu_boundary(&m, &x));
            for (term, c) in nu_boundary_chain(&m, &connes_word(&x)) {
                nu_add(&mut lhs, term, c);
            }
            prop_assert!(lhs.is_empty());
        }

        #[test]
        fn cyclic_boundary_squares_to_zero(
            m in arb_model(),
            w in arb_word(1, 3),
            v in prop::collection::vec(arb_gen(), 1..4),
        ) {
            let coeffs = vec![
                sv_unit::<_, Fp<7>>(NuWord::Cyc(w)),
                sv_unit::<_, Fp<7>>(NuWord::Bar(v)),
            ];
            let once = cyclic_boundary(&m, &coeffs);
            let twice = cyclic_boundary(&m, &once);
            prop_assert!(twice.iter().all(|c| c.is_empty()));
        }
    }

    #[test]
    fn cochain_differential_matches_structure_coefficients() {
        // over the degree-n monomial model: the odd arity-k cochain maps to
        // n times the even arity-(k+n-1) cochain; even cochains are closed
        let n = 4usize;
        let m = MinimalModel::<Rat>::monomial(n);
        for k in 0..4 {
            let phi = Cochain::<Rat>::basis(k, Gen::D);
            let d = phi.differential(&m, k + n + 2);
            let mut expect = Cochain::<Rat>::basis(k + n - 1, Gen::E).scale(&rat(n as i64, 1));
            expect.parity = phi.parity.flip();
            assert_eq!(d, expect, "k = {k}");

            let phi = Cochain::<Rat>::basis(k, Gen::E);
            assert!(phi.differential(&m, k + n + 2).is_zero(), "k = {k}");
        }
    }

    #[test]
    fn cup_powers_of_the_degree_one_class() {
        let n = 6usize;
        let m = MinimalModel::<Rat>::monomial(n);
        let phi1 = Cochain::<Rat>::basis(1, Gen::E);
        let mut power = phi1.clone();
        for k in 2..=4 {
            power = power.cup(&phi1, &m, 8);
            assert_eq!(power, Cochain::basis(k, Gen::E), "k = {k}");
        }
    }

    #[test]
    fn cup_unit_laws() {
        // the arity-zero unit cochain is a right unit on the nose; as a left
        // unit it carries the orientation twist (-1)^(output degree)
        let m = MinimalModel::<Rat>::monomial(3);
        let unit = Cochain::<Rat>::basis(0, Gen::E);
        let odd = Cochain::<Rat>::basis(2, Gen::D);
        let even = Cochain::<Rat>::basis(3, Gen::E);
        assert_eq!(odd.cup(&unit, &m, 6), odd);
        assert_eq!(even.cup(&unit, &m, 6), even);
        assert_eq!(unit.cup(&even, &m, 6), even);
        assert_eq!(unit.cup(&odd, &m, 6), odd.scale(&rat(-1, 1)));
    }

    proptest! {
        #[test]
        fn cochain_differential_squares_to_zero(
            m in arb_model(),
            arity in 0usize..4,
            out in arb_gen(),
        ) {
            let phi = Cochain::<Fp<7>>::basis(arity, out);
            let d = phi.differential(&m, arity + 8);
            let dd = d.differential(&m, arity + 8);
            prop_assert!(dd.is_zero());
        }

        #[test]
        fn cup_satisfies_the_leibniz_rule(
            m in arb_model(),
            a in 0usize..3,
            b in 0usize..3,
            ga in arb_gen(),
            gb in arb_gen(),
        ) {
            // d(x cup y) = dx cup y + (-1)^(shifted degree of x) x cup dy
            let pa = Cochain::<Fp<7>>::basis(a, ga);
            let pb = Cochain::<Fp<7>>::basis(b, gb);
            let cap = a + b + 10;
            let lhs = pa.cup(&pb, &m, cap + 4).differential(&m, cap);
            let mut rhs = pa.differential(&m, cap + 4).cup(&pb, &m, cap);
            let sign = Sign::from_parity(pa.parity.flip());
            rhs.add_scaled(&pa.cup(&pb.differential(&m, cap + 4), &m, cap), &sign.unit());
            for k in 0..=cap {
                let l = lhs.comp.get(&k).cloned().unwrap_or_default();
                let r = rhs.comp.get(&k).cloned().unwrap_or_default();
                prop_assert_eq!(l, r, "arity {}", k);
            }
        }
    }

    #[test]
    fn degree_one_class_induces_the_unit_insertion() {
        // the induced premorphism has the single component with no left
        // string and the one-entry right string, acting as the identity on
        // the distinguished entry
        let m = MinimalModel::<Rat>::monomial(4);
        let phi1 = Cochain::<Rat>::basis(1, Gen::E);
        let f = phi1.premorphism(&m, 2, 3);
        let mut expect = PreMor::<Rat>::zero(EVEN);
        expect.set(vec![], Gen::E, vec![Gen::D], sv_unit(Gen::E));
        expect.set(vec![], Gen::D, vec![Gen::D], sv_unit(Gen::D));
        assert_eq!(f.comp, expect.comp);
    }

    proptest! {
        #[test]
        fn induced_premorphism_is_a_chain_map_up_to_the_parity_twist(
            m in arb_model(),
            arity in 0usize..3,
            out in arb_gen(),
        ) {
            // the two differentials weight their second family by plain
            // versus shifted parity, so the intertwining relation is
            // delta(psi(phi)) = (-1)^(parity of phi) psi(d(phi)); closed
            // cochains still induce closed premorphisms
            let phi = Cochain::<Fp<7>>::basis(arity, out);
            let twist = Sign::from_parity(phi.parity);
            let (lc, rc) = (2usize, 4usize);
            let lhs = phi.differential(&m, rc + 4).premorphism(&m, lc, rc);
            let rhs = phi.premorphism(&m, lc, rc + 4).differential(&m, lc, rc);
            for k in 0..=lc {
                for l in 0..=rc {
                    for word in gen_words(k + l + 1) {
                        let (x, rest) = word.split_at(k);
                        let a = lhs.eval(x, rest[0], &rest[1..]);
                        let b = rhs.eval(x, rest[0], &rest[1..]);
                        prop_assert_eq!(crate::linear::sv_scale(&a, &twist.unit()), b,
                            "component ({}, {})", k, l);
                    }
                }
            }
        }
    }
}
