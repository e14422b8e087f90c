use std::ops::Range;

use rustc_hash::FxHashSet;

use super::{GenError, Reachability};
use crate::engine::{NondetValues, SimError};
use crate::ir::{CompiledExpr, CompiledModel};
use crate::par;

/// Bit position of one state slot inside the packed words.
#[derive(Debug, Clone, Copy)]
struct Field {
    word: usize,
    shift: u32,
    mask: u64,
    lo: i64,
}

#[derive(Debug, Clone)]
struct Layout {
    fields: Vec<Field>,
    words: usize,
}

impl Layout {
    fn new(model: &CompiledModel) -> Self {
        let mut fields = Vec::with_capacity(model.state_len());
        let (mut word, mut used) = (0usize, 0u32);
        for slot in 0..model.state_len() {
            let (lo, hi) = model.slot_domain(slot).code_range();
            let span = (hi as i128 - lo as i128) as u128;
            let bits = 128 - span.leading_zeros();
            assert!(bits <= 64, "domain too wide to pack");
            if used + bits > 64 {
                word += 1;
                used = 0;
            }
            let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
            fields.push(Field {
                word,
                shift: used,
                mask,
                lo,
            });
            used += bits;
        }
        Self {
            fields,
            words: word + 1,
        }
    }

    fn pack(&self, state: &[i64], out: &mut [u64]) {
        out.fill(0);
        for (f, v) in self.fields.iter().zip(state) {
            out[f.word] |= ((v.wrapping_sub(f.lo)) as u64 & f.mask) << f.shift;
        }
    }

    fn get(&self, packed: &[u64], slot: usize) -> i64 {
        let f = self.fields[slot];
        (((packed[f.word] >> f.shift) & f.mask) as i64).wrapping_add(f.lo)
    }

    fn unpack(&self, packed: &[u64], env: &mut [i64]) {
        for (slot, v) in env.iter_mut().enumerate().take(self.fields.len()) {
            *v = self.get(packed, slot);
        }
    }
}

enum Visited {
    Narrow(FxHashSet<u64>),
    Wide(FxHashSet<Box<[u64]>>),
}

impl Visited {
    fn contains(&self, key: &[u64]) -> bool {
        match self {
            Visited::Narrow(s) => s.contains(&key[0]),
            Visited::Wide(s) => s.contains(key),
        }
    }

    fn insert(&mut self, key: &[u64]) -> bool {
        match self {
            Visited::Narrow(s) => s.insert(key[0]),
            Visited::Wide(s) => s.insert(key.into()),
        }
    }
}

/// Breadth-first exploration shared by all goals of a run.
///
/// Nodes are stored in discovery order, layer by layer; within a layer the
/// order is (parent, input combination), so the first node satisfying a goal
/// is a shortest witness with lexicographically least inputs. Layers are
/// built lazily, only as deep as some goal needs.
pub struct Explorer<'m> {
    model: &'m CompiledModel,
    layout: Layout,
    radices: Vec<(i64, u64)>,
    combos: u64,
    states: Vec<u64>,
    parent: Vec<u32>,
    combo: Vec<u32>,
    /// `layer_start[d]..layer_start[d + 1]` are the nodes at depth `d`.
    layer_start: Vec<usize>,
    visited: Visited,
    closed: bool,
    cap: usize,
}

/// Successor candidates of one chunk of a layer, in (parent, combo) order.
type Candidates = Vec<(u32, u32, Box<[u64]>)>;

impl<'m> Explorer<'m> {
    pub fn new(model: &'m CompiledModel, cap: usize) -> Result<Self, GenError> {
        let layout = Layout::new(model);
        let radices: Vec<(i64, u64)> = (0..model.nondet_len())
            .map(|i| {
                let d = model.nondet_domain(i);
                (d.code_range().0, d.size())
            })
            .collect();
        let combos = radices
            .iter()
            .try_fold(1u128, |acc, (_, s)| acc.checked_mul(*s as u128))
            .unwrap_or(u128::MAX);
        if combos > u32::MAX as u128 {
            return Err(GenError::Branching(combos));
        }
        let mut root = vec![0u64; layout.words];
        layout.pack(&crate::engine::init_state(model), &mut root);
        let mut visited = if layout.words == 1 {
            Visited::Narrow(FxHashSet::default())
        } else {
            Visited::Wide(FxHashSet::default())
        };
        visited.insert(&root);
        Ok(Self {
            model,
            layout,
            radices,
            combos: combos as u64,
            states: root,
            parent: vec![u32::MAX],
            combo: vec![0],
            layer_start: vec![0, 1],
            visited,
            closed: false,
            cap,
        })
    }

    /// Number of distinct states discovered so far.
    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// Deepest layer built so far.
    pub fn depth(&self) -> usize {
        self.layer_start.len() - 2
    }

    fn node(&self, i: usize) -> &[u64] {
        &self.states[i * self.layout.words..(i + 1) * self.layout.words]
    }

    /// Writes the values of combination `c` into `out`, first variable most significant.
    fn decode_combo(&self, mut c: u64, out: &mut [i64]) {
        for (slot, (lo, size)) in out.iter_mut().zip(&self.radices).rev() {
            *slot = lo + (c % size) as i64;
            c /= size;
        }
    }

    fn expand_chunk(&self, nodes: Range<usize>) -> Result<Candidates, SimError> {
        let n_state = self.model.state_len();
        let mut base = vec![0i64; n_state + self.model.nondet_len()];
        let mut env = base.clone();
        let mut packed = vec![0u64; self.layout.words];
        let mut local: FxHashSet<Box<[u64]>> = FxHashSet::default();
        let mut out = Vec::new();
        for i in nodes {
            self.layout.unpack(self.node(i), &mut base[..n_state]);
            for c in 0..self.combos {
                env.copy_from_slice(&base);
                self.decode_combo(c, &mut env[n_state..]);
                self.model.step_env(&mut env)?;
                self.layout.pack(&env[..n_state], &mut packed);
                if self.visited.contains(&packed) || local.contains(packed.as_slice()) {
                    continue;
                }
                let key: Box<[u64]> = packed.as_slice().into();
                local.insert(key.clone());
                out.push((i as u32, c as u32, key));
            }
        }
        Ok(out)
    }

    /// Builds the next layer. Returns false once no new states appear.
    fn expand(&mut self) -> Result<bool, GenError> {
        if self.closed {
            return Ok(false);
        }
        let d = self.depth();
        let layer = self.layer_start[d]..self.layer_start[d + 1];
        let chunk = (layer.len() / (4 * rayon_threads())).clamp(1, 4096);
        let parts = par::map_ranges(layer, chunk, |nodes| self.expand_chunk(nodes));
        for part in parts {
            for (parent, combo, key) in part? {
                if self.visited.insert(&key) {
                    self.states.extend_from_slice(&key);
                    self.parent.push(parent);
                    self.combo.push(combo);
                    if self.parent.len() > self.cap {
                        return Err(GenError::StateCapExceeded { cap: self.cap });
                    }
                }
            }
        }
        self.layer_start.push(self.parent.len());
        if self.layer_start[d + 2] == self.layer_start[d + 1] {
            self.layer_start.pop();
            self.closed = true;
            return Ok(false);
        }
        Ok(true)
    }

    fn path(&self, mut i: usize) -> Vec<NondetValues> {
        let mut cols = Vec::new();
        while self.parent[i] != u32::MAX {
            let mut col = vec![0; self.model.nondet_len()];
            self.decode_combo(self.combo[i] as u64, &mut col);
            cols.push(col);
            i = self.parent[i] as usize;
        }
        cols.reverse();
        cols
    }
}

#[cfg(feature = "parallel")]
fn rayon_threads() -> usize {
    rayon::current_num_threads()
}

#[cfg(not(feature = "parallel"))]
fn rayon_threads() -> usize {
    1
}

impl Explorer<'_> {
    /// First node of layer `d` satisfying a goal over state slots only.
    fn scan_states(&self, pred: &CompiledExpr, slots: &[usize], d: usize) -> Option<usize> {
        let layer = self.layer_start[d]..self.layer_start[d + 1];
        let width = self.model.state_len() + self.model.nondet_len();
        let hits = par::map_ranges(layer, 8192, |mut nodes| {
            let mut env = vec![0i64; width];
            nodes.find(|&i| {
                let packed = self.node(i);
                for &s in slots {
                    env[s] = self.layout.get(packed, s);
                }
                pred.holds(&env)
            })
        });
        hits.into_iter().flatten().next()
    }

    /// First (node of layer `d`, combination) whose step satisfies a goal
    /// that also reads the applied column.
    fn scan_steps(&self, pred: &CompiledExpr, d: usize) -> Result<Option<(usize, u64)>, GenError> {
        let layer = self.layer_start[d]..self.layer_start[d + 1];
        let n_state = self.model.state_len();
        let chunk = (8192 / self.combos.max(1) as usize).max(1);
        let hits = par::map_ranges(layer, chunk, |nodes| -> Result<Option<(usize, u64)>, SimError> {
            let mut base = vec![0i64; n_state + self.model.nondet_len()];
            let mut env = base.clone();
            for i in nodes {
                self.layout.unpack(self.node(i), &mut base[..n_state]);
                for c in 0..self.combos {
                    env.copy_from_slice(&base);
                    self.decode_combo(c, &mut env[n_state..]);
                    self.model.step_env(&mut env)?;
                    if pred.holds(&env) {
                        return Ok(Some((i, c)));
                    }
                }
            }
            Ok(None)
        });
        for h in hits {
            if let Some(hit) = h? {
                return Ok(Some(hit));
            }
        }
        Ok(None)
    }
}

impl Reachability for Explorer<'_> {
    fn reach(
        &mut self,
        pred: &CompiledExpr,
        max_len: usize,
    ) -> Result<Option<(usize, Vec<NondetValues>)>, GenError> {
        let n_state = self.model.state_len();
        let mut slots = Vec::new();
        pred.code.for_each_slot(&mut |s| slots.push(s as usize));
        slots.sort_unstable();
        slots.dedup();

        if pred.uses_nondet() {
            // A hit at depth d + 1 leaves from some state first reached at depth d.
            for d in 0..max_len {
                if d > self.depth() && !self.expand()? {
                    return Ok(None);
                }
                if let Some((i, c)) = self.scan_steps(pred, d)? {
                    let mut cols = self.path(i);
                    let mut col = vec![0; self.model.nondet_len()];
                    self.decode_combo(c, &mut col);
                    cols.push(col);
                    return Ok(Some((d + 1, cols)));
                }
            }
            return Ok(None);
        }

        slots.retain(|&s| s < n_state);
        for d in 0..=max_len {
            if d > self.depth() && !self.expand()? {
                return Ok(None);
            }
            if let Some(i) = self.scan_states(pred, &slots, d) {
                return Ok(Some((d, self.path(i))));
            }
        }
        Ok(None)
    }
}
