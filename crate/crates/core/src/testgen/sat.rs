//! Gate-level circuits over a SAT solver and signed bit-vectors built on them.

use batsat::{lbool, BasicSolver, Lit, SolverInterface};
use rustc_hash::FxHashMap;

/// Widest bit-vector the encoder will build.
pub(crate) const MAX_WIDTH: u32 = 62;

/// Hash-consed AND/XOR gates with constant folding.
pub(crate) struct Circuit {
    solver: BasicSolver,
    t: Lit,
    ands: FxHashMap<(Lit, Lit), Lit>,
    xors: FxHashMap<(Lit, Lit), Lit>,
}

impl Circuit {
    pub(crate) fn new() -> Self {
        let mut solver = BasicSolver::default();
        let t = Lit::new(solver.new_var_default(), true);
        solver.add_clause_reuse(&mut vec![t]);
        Self {
            solver,
            t,
            ands: FxHashMap::default(),
            xors: FxHashMap::default(),
        }
    }

    pub(crate) fn tru(&self) -> Lit {
        self.t
    }

    pub(crate) fn fls(&self) -> Lit {
        !self.t
    }

    pub(crate) fn constant(&self, b: bool) -> Lit {
        if b {
            self.t
        } else {
            !self.t
        }
    }

    pub(crate) fn fresh(&mut self) -> Lit {
        Lit::new(self.solver.new_var_default(), true)
    }

    pub(crate) fn clause(&mut self, lits: &[Lit]) {
        self.solver.add_clause_reuse(&mut lits.to_vec());
    }

    pub(crate) fn and(&mut self, a: Lit, b: Lit) -> Lit {
        let (t, f) = (self.t, !self.t);
        if a == f || b == f || a == !b {
            return f;
        }
        if a == t || a == b {
            return b;
        }
        if b == t {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&x) = self.ands.get(&key) {
            return x;
        }
        let x = self.fresh();
        self.clause(&[!x, a]);
        self.clause(&[!x, b]);
        self.clause(&[x, !a, !b]);
        self.ands.insert(key, x);
        x
    }

    pub(crate) fn or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and(!a, !b)
    }

    pub(crate) fn or_all(&mut self, lits: &[Lit]) -> Lit {
        let mut acc = self.fls();
        for &l in lits {
            acc = self.or(acc, l);
        }
        acc
    }

    pub(crate) fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        let t = self.t;
        if a == !t {
            return b;
        }
        if b == !t {
            return a;
        }
        if a == t {
            return !b;
        }
        if b == t {
            return !a;
        }
        if a == b {
            return !t;
        }
        if a == !b {
            return t;
        }
        let flip = a.sign() != b.sign();
        let (pa, pb) = (Lit::new(a.var(), true), Lit::new(b.var(), true));
        let key = if pa < pb { (pa, pb) } else { (pb, pa) };
        let x = match self.xors.get(&key) {
            Some(&x) => x,
            None => {
                let x = self.fresh();
                let (p, q) = key;
                self.clause(&[!x, p, q]);
                self.clause(&[!x, !p, !q]);
                self.clause(&[x, !p, q]);
                self.clause(&[x, p, !q]);
                self.xors.insert(key, x);
                x
            }
        };
        if flip {
            !x
        } else {
            x
        }
    }

    pub(crate) fn mux(&mut self, c: Lit, a: Lit, b: Lit) -> Lit {
        if a == b {
            return a;
        }
        let x = self.and(c, a);
        let y = self.and(!c, b);
        self.or(x, y)
    }

    /// Solves under `assumptions`. `None` means the solver gave up.
    pub(crate) fn solve(&mut self, assumptions: &[Lit]) -> Option<bool> {
        let r = self.solver.solve_limited(assumptions);
        if r == lbool::TRUE {
            Some(true)
        } else if r == lbool::FALSE {
            Some(false)
        } else {
            None
        }
    }

    /// Value of `l` in the last satisfying assignment.
    pub(crate) fn value(&self, l: Lit) -> bool {
        self.solver.value_lit(l) == lbool::TRUE
    }
}

/// Bits needed to hold `[lo, hi]` in two's complement.
pub(crate) fn width_of(lo: i128, hi: i128) -> u32 {
    let mut w = 1;
    while lo < -(1i128 << (w - 1)) || hi >= (1i128 << (w - 1)) {
        w += 1;
    }
    w
}

/// Signed bit-vector, least significant bit first, with a value interval.
#[derive(Debug, Clone)]
pub(crate) struct Bv {
    pub bits: Vec<Lit>,
    pub lo: i128,
    pub hi: i128,
}

fn interval(lo: i128, hi: i128) -> Result<(i128, i128), String> {
    if width_of(lo, hi) > MAX_WIDTH {
        return Err(format!("value range [{lo}, {hi}] needs more than {MAX_WIDTH} bits"));
    }
    Ok((lo, hi))
}

impl Circuit {
    pub(crate) fn bv_const(&self, v: i64) -> Bv {
        let v = v as i128;
        let w = width_of(v, v);
        Bv {
            bits: (0..w).map(|i| self.constant((v >> i) & 1 == 1)).collect(),
            lo: v,
            hi: v,
        }
    }

    pub(crate) fn bv_bool(&self, b: Lit) -> Bv {
        Bv {
            bits: vec![b, self.fls()],
            lo: 0,
            hi: 1,
        }
    }

    /// Fresh vector constrained to `[lo, hi]`.
    pub(crate) fn bv_input(&mut self, lo: i64, hi: i64) -> Bv {
        let (lo, hi) = (lo as i128, hi as i128);
        let w = width_of(lo, hi);
        let mut bits: Vec<Lit> = (0..w).map(|_| self.fresh()).collect();
        if lo >= 0 {
            bits[w as usize - 1] = self.fls();
        }
        let raw = Bv {
            bits,
            lo: -(1i128 << (w - 1)),
            hi: (1i128 << (w - 1)) - 1,
        };
        let out = self.outside(&raw, lo, hi);
        self.clause(&[!out]);
        Bv { lo, hi, ..raw }
    }

    /// Sign-extends or truncates to `w` bits.
    fn resize(&self, a: &Bv, w: u32) -> Vec<Lit> {
        let w = w as usize;
        let mut bits = a.bits.clone();
        let sign = *bits.last().unwrap();
        bits.resize(w, sign);
        bits.truncate(w);
        bits
    }

    /// Re-labels `a` with a known interval, narrowing its bits to fit.
    pub(crate) fn bv_fit(&self, a: &Bv, lo: i128, hi: i128) -> Bv {
        Bv {
            bits: self.resize(a, width_of(lo, hi)),
            lo,
            hi,
        }
    }

    fn ripple(&mut self, a: &[Lit], b: &[Lit], mut carry: Lit) -> (Vec<Lit>, Lit) {
        let mut out = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let p = self.xor(x, y);
            out.push(self.xor(p, carry));
            let g = self.and(x, y);
            let c = self.and(carry, p);
            carry = self.or(g, c);
        }
        (out, carry)
    }

    pub(crate) fn bv_add(&mut self, a: &Bv, b: &Bv) -> Result<Bv, String> {
        let (lo, hi) = interval(a.lo + b.lo, a.hi + b.hi)?;
        let w = width_of(lo, hi);
        let (x, y) = (self.resize(a, w), self.resize(b, w));
        let (bits, _) = self.ripple(&x, &y, self.fls());
        Ok(Bv { bits, lo, hi })
    }

    pub(crate) fn bv_sub(&mut self, a: &Bv, b: &Bv) -> Result<Bv, String> {
        let (lo, hi) = interval(a.lo - b.hi, a.hi - b.lo)?;
        let w = width_of(lo, hi);
        let x = self.resize(a, w);
        let y: Vec<Lit> = self.resize(b, w).into_iter().map(|l| !l).collect();
        let (bits, _) = self.ripple(&x, &y, self.tru());
        Ok(Bv { bits, lo, hi })
    }

    pub(crate) fn bv_neg(&mut self, a: &Bv) -> Result<Bv, String> {
        let zero = self.bv_const(0);
        self.bv_sub(&zero, a)
    }

    pub(crate) fn bv_mul(&mut self, a: &Bv, b: &Bv) -> Result<Bv, String> {
        let corners = [a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi];
        let (lo, hi) = interval(*corners.iter().min().unwrap(), *corners.iter().max().unwrap())?;
        let w = width_of(lo, hi) as usize;
        let (x, y) = (self.resize(a, w as u32), self.resize(b, w as u32));
        let mut acc = vec![self.fls(); w];
        for (i, &yi) in y.iter().enumerate() {
            if yi == self.fls() {
                continue;
            }
            let mut row = vec![self.fls(); w];
            for j in 0..w - i {
                row[i + j] = self.and(x[j], yi);
            }
            acc = self.ripple(&acc, &row, self.fls()).0;
        }
        Ok(Bv { bits: acc, lo, hi })
    }

    pub(crate) fn bv_lt(&mut self, a: &Bv, b: &Bv) -> Lit {
        if a.hi < b.lo {
            return self.tru();
        }
        if a.lo >= b.hi {
            return self.fls();
        }
        let w = a.bits.len().max(b.bits.len()) as u32 + 1;
        let x = self.resize(a, w);
        let y: Vec<Lit> = self.resize(b, w).into_iter().map(|l| !l).collect();
        let (d, _) = self.ripple(&x, &y, self.tru());
        d[w as usize - 1]
    }

    pub(crate) fn bv_eq(&mut self, a: &Bv, b: &Bv) -> Lit {
        if a.hi < b.lo || b.hi < a.lo {
            return self.fls();
        }
        let w = a.bits.len().max(b.bits.len()) as u32;
        let (x, y) = (self.resize(a, w), self.resize(b, w));
        let mut acc = self.tru();
        for (&p, &q) in x.iter().zip(&y) {
            let d = self.xor(p, q);
            acc = self.and(acc, !d);
        }
        acc
    }

    /// True when the value of `a` lies outside `[lo, hi]`.
    pub(crate) fn outside(&mut self, a: &Bv, lo: i128, hi: i128) -> Lit {
        let below = if a.lo < lo {
            let l = self.bv_const(lo as i64);
            self.bv_lt(a, &l)
        } else {
            self.fls()
        };
        let above = if a.hi > hi {
            let h = self.bv_const(hi as i64);
            self.bv_lt(&h, a)
        } else {
            self.fls()
        };
        self.or(below, above)
    }

    pub(crate) fn bv_nonzero(&mut self, a: &Bv) -> Lit {
        let bits = a.bits.clone();
        self.or_all(&bits)
    }

    pub(crate) fn bv_mux(&mut self, c: Lit, a: &Bv, b: &Bv) -> Bv {
        if c == self.tru() {
            return a.clone();
        }
        if c == self.fls() {
            return b.clone();
        }
        let (lo, hi) = (a.lo.min(b.lo), a.hi.max(b.hi));
        let w = width_of(lo, hi);
        let (x, y) = (self.resize(a, w), self.resize(b, w));
        let bits = x.iter().zip(&y).map(|(&p, &q)| self.mux(c, p, q)).collect();
        Bv { bits, lo, hi }
    }

    /// Unsigned magnitude of `a` as exactly `n` bits.
    fn magnitude(&mut self, a: &Bv, n: usize) -> Result<Vec<Lit>, String> {
        let neg = self.bv_neg(a)?;
        let sign = *a.bits.last().unwrap();
        let abs = self.bv_mux(sign, &neg, a);
        let mut bits = abs.bits;
        bits.resize(n, self.fls());
        bits.truncate(n);
        Ok(bits)
    }

    /// Euclidean quotient and remainder. Values are unspecified when `b` is 0.
    pub(crate) fn bv_divmod(&mut self, a: &Bv, b: &Bv) -> Result<(Bv, Bv), String> {
        let amax = a.lo.abs().max(a.hi.abs());
        let bmax = b.lo.abs().max(b.hi.abs()).max(1);
        let na = (128 - (amax as u128).leading_zeros()).max(1) as usize;
        let nb = (128 - (bmax as u128).leading_zeros()).max(1) as usize;
        let ua = self.magnitude(a, na)?;
        let mut ub = self.magnitude(b, nb)?;
        ub.push(self.fls());
        let not_ub: Vec<Lit> = ub.iter().map(|&l| !l).collect();

        let mut rem = vec![self.fls(); nb + 1];
        let mut q = vec![self.fls(); na];
        for i in (0..na).rev() {
            rem.pop();
            rem.insert(0, ua[i]);
            let (diff, no_borrow) = self.ripple(&rem, &not_ub, self.tru());
            q[i] = no_borrow;
            rem = rem
                .iter()
                .zip(&diff)
                .map(|(&r, &d)| self.mux(no_borrow, d, r))
                .collect();
        }

        let a_neg = *a.bits.last().unwrap();
        let b_neg = *b.bits.last().unwrap();
        let f = self.fls();
        let unsigned = |mut bits: Vec<Lit>, hi: i128| {
            bits.push(f);
            Bv { bits, lo: 0, hi }
        };
        let r0 = unsigned(rem, bmax - 1);
        let q0 = unsigned(q, amax);
        let r_nonzero = self.bv_nonzero(&r0);
        let bump = self.and(a_neg, r_nonzero);
        let bump = self.bv_bool(bump);
        let big_q = self.bv_add(&q0, &bump)?;
        let big_q = self.bv_fit(&big_q, 0, amax);
        let neg_q = self.bv_neg(&big_q)?;
        let flip = self.xor(a_neg, b_neg);
        let quot = self.bv_mux(flip, &neg_q, &big_q);

        let babs = unsigned(ub[..nb].to_vec(), bmax);
        let back = self.bv_sub(&babs, &r0)?;
        let back = self.bv_fit(&back, 0, bmax);
        let fixed = self.bv_mux(a_neg, &back, &r0);
        let zero = self.bv_const(0);
        let r = self.bv_mux(r_nonzero, &fixed, &zero);
        Ok((quot, self.bv_fit(&r, 0, bmax - 1)))
    }

    /// Value of `a` in the last satisfying assignment.
    pub(crate) fn bv_value(&self, a: &Bv) -> i64 {
        let w = a.bits.len();
        let mut v: i128 = 0;
        for (i, &l) in a.bits.iter().enumerate() {
            if self.value(l) {
                v |= 1 << i;
            }
        }
        if self.value(a.bits[w - 1]) {
            v -= 1 << w;
        }
        v as i64
    }
}
