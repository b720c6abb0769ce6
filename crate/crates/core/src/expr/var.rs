use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// Role of a plain symbol. Parameters are not symbols: they live in the
/// coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SymbolKind {
    /// Independent variable with its direction index (0 = x, 1 = t).
    Independent(u8),
    /// Group parameter such as `s` or `eps`.
    GroupParameter,
    /// Similarity variable introduced by a reduction.
    Reduction,
    /// Unknown or integration constant (`c1`, `c`, ...).
    Constant,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: Arc<str>,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn new(name: &str, kind: SymbolKind) -> Self {
        Symbol {
            name: Arc::from(name),
            kind,
        }
    }

    pub fn independent(name: &str, dir: u8) -> Self {
        Symbol::new(name, SymbolKind::Independent(dir))
    }

    pub fn group(name: &str) -> Self {
        Symbol::new(name, SymbolKind::GroupParameter)
    }

    pub fn constant(name: &str) -> Self {
        Symbol::new(name, SymbolKind::Constant)
    }

    pub fn reduction(name: &str) -> Self {
        Symbol::new(name, SymbolKind::Reduction)
    }

    pub fn direction(&self) -> Option<usize> {
        match self.kind {
            SymbolKind::Independent(d) => Some(d as usize),
            _ => None,
        }
    }
}

impl Ord for Symbol {
    fn cmp(&self, o: &Self) -> Ordering {
        // constants last so unknown coefficients trail in printed monomials
        let rank = |k: &SymbolKind| match k {
            SymbolKind::Reduction => 0,
            SymbolKind::Independent(_) => 1,
            SymbolKind::GroupParameter => 2,
            SymbolKind::Constant => 3,
        };
        rank(&self.kind)
            .cmp(&rank(&o.kind))
            .then_with(|| self.kind.cmp(&o.kind))
            .then_with(|| self.name.cmp(&o.name))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Derivative counts `(k1, k2)` in the two independent directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct MultiIndex(pub [u32; 2]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0, 0]);

    pub fn new(kx: u32, kt: u32) -> Self {
        MultiIndex([kx, kt])
    }

    pub fn order(&self) -> u32 {
        self.0[0] + self.0[1]
    }

    pub fn bump(&self, dir: usize) -> Self {
        let mut k = self.0;
        k[dir] += 1;
        MultiIndex(k)
    }

    pub fn add(&self, o: &MultiIndex) -> Self {
        MultiIndex([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }

    /// `self - o` when `o <= self` componentwise.
    pub fn checked_sub(&self, o: &MultiIndex) -> Option<Self> {
        Some(MultiIndex([
            self.0[0].checked_sub(o.0[0])?,
            self.0[1].checked_sub(o.0[1])?,
        ]))
    }

    /// All multi-indices with `0 < order <= n`, ordered by order then x-count.
    pub fn up_to(n: u32) -> Vec<MultiIndex> {
        let mut v = Vec::new();
        for k in 1..=n {
            for kx in (0..=k).rev() {
                v.push(MultiIndex::new(kx, k - kx));
            }
        }
        v
    }
}

/// Derivative coordinate `dep_{x^k1 t^k2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JetVar {
    pub dep: Arc<str>,
    pub idx: MultiIndex,
}

impl JetVar {
    pub fn new(dep: &str, idx: MultiIndex) -> Self {
        JetVar {
            dep: Arc::from(dep),
            idx,
        }
    }

    pub fn base(dep: &str) -> Self {
        JetVar::new(dep, MultiIndex::ZERO)
    }

    pub fn order(&self) -> u32 {
        self.idx.order()
    }

    pub fn bump(&self, dir: usize) -> Self {
        JetVar {
            dep: self.dep.clone(),
            idx: self.idx.bump(dir),
        }
    }
}

impl Ord for JetVar {
    fn cmp(&self, o: &Self) -> Ordering {
        o.order()
            .cmp(&self.order())
            .then_with(|| self.dep.cmp(&o.dep))
            .then_with(|| o.idx.0[0].cmp(&self.idx.0[0]))
    }
}

impl PartialOrd for JetVar {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Derivative of an unknown function of point coordinates, e.g. `xi_{x,u}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncVar {
    pub name: Arc<str>,
    pub args: Arc<[Var]>,
    pub derivs: Vec<u32>,
}

impl FuncVar {
    pub fn new(name: &str, args: &[Var]) -> Self {
        FuncVar {
            name: Arc::from(name),
            args: Arc::from(args.to_vec()),
            derivs: vec![0; args.len()],
        }
    }

    pub fn diff(&self, arg: usize) -> Self {
        let mut f = self.clone();
        f.derivs[arg] += 1;
        f
    }
}

/// Atom of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Jet(JetVar),
    Func(FuncVar),
    Sym(Symbol),
    /// `exp(s)` for a group parameter `s`; `exp(q s)` is its `q`-th power.
    Exp(Symbol),
}

impl Var {
    pub fn jet(dep: &str, kx: u32, kt: u32) -> Self {
        Var::Jet(JetVar::new(dep, MultiIndex::new(kx, kt)))
    }

    pub fn sym(s: Symbol) -> Self {
        Var::Sym(s)
    }

    pub fn as_jet(&self) -> Option<&JetVar> {
        match self {
            Var::Jet(j) => Some(j),
            _ => None,
        }
    }

    /// Short name used when the variable appears as a function argument.
    pub fn arg_name(&self) -> String {
        match self {
            Var::Jet(j) if j.idx == MultiIndex::ZERO => j.dep.to_string(),
            Var::Sym(s) => s.name.to_string(),
            other => format!("{:?}", other),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::var_string(self, &super::Context::default()))
    }
}
