use std::fmt;
use std::str::FromStr;

use super::primes::is_prime_u64;
use super::DiscError;

/// Sign of a Jordan constituent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i8(s: i8) -> Sign {
        if s < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, o: Sign) -> Sign {
        if self == o {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Type and oddity of a 2-adic constituent: `TypeII` (even) or `TypeI(t)`
/// with oddity `t ∈ 0..8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Oddity {
    TypeII,
    TypeI(u8),
}

/// One constituent `(p^k)^{±n}` of a genus symbol; `oddity` is present iff `p = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolComponent {
    pub prime: u64,
    pub exponent: u32,
    pub rank: u32,
    pub sign: Sign,
    pub oddity: Option<Oddity>,
}

impl SymbolComponent {
    pub fn scale(&self) -> u64 {
        self.prime.pow(self.exponent)
    }

    pub fn is_type_one(&self) -> bool {
        matches!(self.oddity, Some(Oddity::TypeI(_)))
    }
}

impl fmt::Display for SymbolComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.scale())?;
        match self.oddity {
            Some(Oddity::TypeII) => write!(f, "_II")?,
            Some(Oddity::TypeI(t)) => write!(f, "_{t}")?,
            None => {}
        }
        write!(f, "^{}{}", self.sign.as_char(), self.rank)
    }
}

/// Conway–Sloane genus symbol of a discriminant form, without the unimodular
/// constituent. Components are kept sorted by `(p, k)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenusSymbol {
    components: Vec<SymbolComponent>,
}

impl GenusSymbol {
    /// Build from components; sorts them and rejects duplicates or malformed entries.
    pub fn new(mut components: Vec<SymbolComponent>) -> Result<Self, DiscError> {
        components.retain(|c| c.rank > 0);
        components.sort_by_key(|c| (c.prime, c.exponent));
        for w in components.windows(2) {
            if (w[0].prime, w[0].exponent) == (w[1].prime, w[1].exponent) {
                return Err(DiscError::Malformed(format!("two constituents of scale {}", w[0].scale())));
            }
        }
        for c in &components {
            if !is_prime_u64(c.prime) {
                return Err(DiscError::Malformed(format!("{} is not prime", c.prime)));
            }
            if c.exponent == 0 {
                return Err(DiscError::Malformed("scale exponent must be at least 1".into()));
            }
            match (c.prime, c.oddity) {
                (2, None) => return Err(DiscError::Malformed(format!("missing oddity at scale {}", c.scale()))),
                (2, Some(Oddity::TypeII)) if c.rank % 2 == 1 => {
                    return Err(DiscError::Malformed(format!("even constituent {c} has odd rank")))
                }
                (2, Some(Oddity::TypeI(t))) if t > 7 => {
                    return Err(DiscError::Malformed(format!("oddity {t} out of range")))
                }
                (p, Some(_)) if p != 2 => {
                    return Err(DiscError::Malformed(format!("oddity given for odd prime {p}")))
                }
                _ => {}
            }
        }
        Ok(GenusSymbol { components })
    }

    pub fn empty() -> Self {
        GenusSymbol::default()
    }

    pub fn components(&self) -> &[SymbolComponent] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Order of the discriminant group, `Π (p^k)^n`.
    pub fn group_order(&self) -> u128 {
        self.components.iter().map(|c| (c.scale() as u128).pow(c.rank)).product()
    }

    /// Components of the `p`-part.
    pub fn p_components(&self, p: u64) -> impl Iterator<Item = &SymbolComponent> {
        self.components.iter().filter(move |c| c.prime == p)
    }

    /// Symbol of the orthogonal sum: constituents of equal scale are merged
    /// (ranks add, signs multiply, oddities add, type II only if both are).
    pub fn merge(&self, other: &GenusSymbol) -> GenusSymbol {
        let mut out: Vec<SymbolComponent> = self.components.clone();
        for c in &other.components {
            match out.iter_mut().find(|d| (d.prime, d.exponent) == (c.prime, c.exponent)) {
                Some(d) => {
                    d.rank += c.rank;
                    d.sign = d.sign.times(c.sign);
                    d.oddity = match (d.oddity, c.oddity) {
                        (Some(Oddity::TypeII), Some(Oddity::TypeII)) => Some(Oddity::TypeII),
                        (Some(a), Some(b)) => Some(Oddity::TypeI((oddity_value(a) + oddity_value(b)) % 8)),
                        _ => None,
                    };
                }
                None => out.push(*c),
            }
        }
        GenusSymbol::new(out).expect("merge of valid symbols")
    }

    pub fn parse(s: &str) -> Result<Self, DiscError> {
        parse_symbol(s)
    }
}

pub(crate) fn oddity_value(o: Oddity) -> u8 {
    match o {
        Oddity::TypeII => 0,
        Oddity::TypeI(t) => t,
    }
}

impl fmt::Display for GenusSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("1");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for GenusSymbol {
    type Err = DiscError;
    fn from_str(s: &str) -> Result<Self, DiscError> {
        parse_symbol(s)
    }
}

/// Render a symbol in the text grammar.
pub fn format_symbol(sym: &GenusSymbol) -> String {
    sym.to_string()
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    base: usize,
}

impl Cursor<'_> {
    fn err(&self, msg: impl Into<String>) -> DiscError {
        DiscError::Syntax { pos: self.base + self.pos, msg: msg.into() }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64, DiscError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| DiscError::Syntax { pos: self.base + start, msg: "number too large".into() })
    }

    /// Either `{inner}` or a bare `inner`.
    fn braced<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T, DiscError>) -> Result<T, DiscError> {
        if self.eat(b'{') {
            let v = f(self)?;
            if !self.eat(b'}') {
                return Err(self.err("expected '}'"));
            }
            Ok(v)
        } else {
            f(self)
        }
    }
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d) || d * d > q).map(|d| if q.is_multiple_of(d) { d } else { q })?;
    let (mut m, mut k) = (q, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

/// Parse `SCALE[_ODDITY]^SIGN RANK` tokens separated by commas. Braces as in
/// `2_{II}^{+8}` are accepted. The trivial form is written `1`; the empty
/// string is accepted for it as well.
pub fn parse_symbol(s: &str) -> Result<GenusSymbol, DiscError> {
    let mut comps = Vec::new();
    if s.trim().is_empty() || s.trim() == "1" {
        return Ok(GenusSymbol::empty());
    }
    let mut base = 0;
    for tok in s.split(',') {
        let lead = tok.len() - tok.trim_start().len();
        let t = tok.trim();
        let mut c = Cursor { s: t.as_bytes(), pos: 0, base: base + lead };
        let scale = c.number()?;
        let (p, k) = prime_power(scale).ok_or_else(|| {
            DiscError::Syntax { pos: base + lead, msg: format!("scale {scale} is not a prime power") }
        })?;
        let oddity = if c.eat(b'_') {
            let o = c.braced(|c| {
                if c.eat(b'I') {
                    if c.eat(b'I') {
                        Ok(Oddity::TypeII)
                    } else {
                        Err(c.err("expected \"II\""))
                    }
                } else {
                    let v = c.number()?;
                    if v > 7 {
                        return Err(c.err("oddity must lie in 0..7"));
                    }
                    Ok(Oddity::TypeI(v as u8))
                }
            })?;
            if p != 2 {
                return Err(DiscError::Syntax { pos: base + lead, msg: format!("oddity given for odd prime {p}") });
            }
            Some(o)
        } else {
            if p == 2 {
                return Err(c.err("2-adic constituent needs an oddity (\"_t\" or \"_II\")"));
            }
            None
        };
        if !c.eat(b'^') {
            return Err(c.err("expected '^'"));
        }
        let (sign, rank) = c.braced(|c| {
            let sign = if c.eat(b'+') {
                Sign::Plus
            } else if c.eat(b'-') {
                Sign::Minus
            } else {
                return Err(c.err("expected '+' or '-'"));
            };
            let n = c.number()?;
            Ok((sign, n))
        })?;
        if c.pos != t.len() {
            return Err(c.err("unexpected trailing characters"));
        }
        let rank = u32::try_from(rank).map_err(|_| c.err("rank too large"))?;
        if rank == 0 {
            return Err(c.err("rank must be positive"));
        }
        comps.push(SymbolComponent { prime: p, exponent: k, rank, sign, oddity });
        base += tok.len() + 1;
    }
    GenusSymbol::new(comps)
}

/// Oddities `t` realizable by a type I constituent of rank `n` and sign `sign`.
pub(crate) fn feasible_oddities(n: u32, sign: Sign) -> u8 {
    let mut mask = 0u8;
    for t in 0..8u8 {
        if realize_units(n, sign, t).is_some() {
            mask |= 1 << t;
        }
    }
    mask
}

/// Odd units (mod 8) whose sum is `t` and whose Jacobi sign is `sign`; all but
/// at most three of them equal 1.
pub(crate) fn realize_units(n: u32, sign: Sign, t: u8) -> Option<Vec<u8>> {
    let free = n.min(3) as usize;
    let ones = n as usize - free;
    let units = [1u8, 3, 5, 7];
    let mut idx = vec![0usize; free];
    loop {
        let chosen: Vec<u8> = idx.iter().map(|&i| units[i]).collect();
        let sum = (ones + chosen.iter().map(|&u| u as usize).sum::<usize>()) % 8;
        let minus = chosen.iter().filter(|&&u| u == 3 || u == 5).count() % 2 == 1;
        if sum == t as usize && minus == (sign == Sign::Minus) {
            let mut out = vec![1u8; ones];
            out.extend(chosen);
            return Some(out);
        }
        let mut i = 0;
        loop {
            if i == free {
                return None;
            }
            idx[i] += 1;
            if idx[i] < 4 {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Distribute a compartment's total oddity over its constituents, choosing
/// the smallest feasible oddity for each in turn. `None` if impossible.
pub(crate) fn distribute_oddity(parts: &[(u32, Sign)], total: u8) -> Option<Vec<u8>> {
    let masks: Vec<u8> = parts.iter().map(|&(n, s)| feasible_oddities(n, s)).collect();
    // reach[i] = set of totals attainable by parts[i..]
    let mut reach = vec![0u8; parts.len() + 1];
    reach[parts.len()] = 1;
    for i in (0..parts.len()).rev() {
        let mut r = 0u8;
        for t in 0..8 {
            if masks[i] & (1 << t) != 0 {
                for u in 0..8 {
                    if reach[i + 1] & (1 << u) != 0 {
                        r |= 1 << ((t + u) % 8);
                    }
                }
            }
        }
        reach[i] = r;
    }
    if reach[0] & (1 << total) == 0 {
        return None;
    }
    let mut out = Vec::new();
    let mut rem = total;
    for i in 0..parts.len() {
        let t = (0..8u8)
            .find(|&t| masks[i] & (1 << t) != 0 && reach[i + 1] & (1 << ((rem + 8 - t) % 8)) != 0)
            .expect("reachability guarantees a choice");
        out.push(t);
        rem = (rem + 8 - t) % 8;
    }
    Some(out)
}

/// 2-adic constituents indexed by scale exponent, with the virtual scale-1 slot at 0.
struct TwoAdic {
    dim: Vec<u32>,
    type_one: Vec<bool>,
    sign: Vec<Sign>,
    oddity: Vec<u8>,
}

impl TwoAdic {
    fn from_components(cs: &[SymbolComponent]) -> Self {
        let kmax = cs.iter().map(|c| c.exponent).max().unwrap_or(0) as usize;
        let len = kmax + 2;
        let mut t = TwoAdic {
            dim: vec![0; len],
            type_one: vec![false; len],
            sign: vec![Sign::Plus; len],
            oddity: vec![0; len],
        };
        for c in cs {
            let k = c.exponent as usize;
            t.dim[k] = c.rank;
            t.sign[k] = c.sign;
            if let Some(Oddity::TypeI(o)) = c.oddity {
                t.type_one[k] = true;
                t.oddity[k] = o;
            }
        }
        t
    }

    fn is_member(&self, k: usize) -> bool {
        k == 0 || self.dim[k] > 0
    }

    fn is_odd(&self, k: usize) -> bool {
        self.dim[k] > 0 && self.type_one[k]
    }

    /// Compartment index per scale (type I constituents only).
    fn compartments(&self) -> Vec<Option<usize>> {
        let mut id = vec![None; self.dim.len()];
        let mut next = 0;
        for k in 0..self.dim.len() {
            if self.is_odd(k) {
                if k > 0 && id[k - 1].is_some() {
                    id[k] = id[k - 1];
                } else {
                    id[k] = Some(next);
                    next += 1;
                }
            }
        }
        id
    }
}

/// Deterministic representative of the isomorphism class of the underlying
/// finite quadratic form.
///
/// On the 2-part the complete invariant is the sign pattern obtained by
/// walking every minus sign to the first member of its train (where the
/// virtual scale-1 constituent absorbs it), together with the compartment
/// oddity totals. Such a walked symbol need not be realizable constituent by
/// constituent, so the displayed representative is the first realizable sign
/// pattern reachable from it, preferring fewer minus signs and then minus
/// signs at smaller scales. Each compartment total is then spread by giving
/// every constituent in turn the smallest oddity that keeps the rest
/// realizable. Odd-prime constituents are already canonical.
pub fn canonicalize(sym: &GenusSymbol) -> Result<GenusSymbol, DiscError> {
    let two: Vec<SymbolComponent> = sym.p_components(2).copied().collect();
    let mut out: Vec<SymbolComponent> = sym.components.iter().filter(|c| c.prime != 2).copied().collect();
    if two.is_empty() {
        return GenusSymbol::new(out);
    }
    let unrealizable = || DiscError::Unrealizable(format!("2-adic part of {sym}"));
    let mut t = TwoAdic::from_components(&two);
    let comp = t.compartments();
    let ncomp = comp.iter().flatten().max().map_or(0, |m| m + 1);
    let mut total = vec![0u8; ncomp];
    for k in 0..t.dim.len() {
        if let Some(c) = comp[k] {
            total[c] = (total[c] + t.oddity[k]) % 8;
        }
    }
    let comp_scales: Vec<Vec<usize>> = (0..ncomp).map(|c| (0..t.dim.len()).filter(|&k| comp[k] == Some(c)).collect()).collect();
    let linked = |t: &TwoAdic, a: usize, b: usize| {
        (b == a + 1 && (t.is_odd(a) || t.is_odd(b))) || (b == a + 2 && t.is_odd(a) && t.is_odd(b))
    };
    let members: Vec<usize> = (0..t.dim.len()).filter(|&k| t.is_member(k)).collect();
    let mut trains: Vec<Vec<usize>> = Vec::new();
    for &k in &members {
        match trains.last_mut() {
            Some(tr) if linked(&t, *tr.last().unwrap(), k) => tr.push(k),
            _ => trains.push(vec![k]),
        }
    }
    // flipping the edge (a, b) of a train adds 4 to each compartment it touches
    let edge_comps = |a: usize, b: usize| -> Vec<usize> {
        let mut v: Vec<usize> = [comp[a], comp[b]].into_iter().flatten().collect();
        v.dedup();
        v
    };
    for tr in &trains {
        for w in (1..tr.len()).rev() {
            let (a, b) = (tr[w - 1], tr[w]);
            if t.sign[b] == Sign::Minus {
                t.sign[b] = Sign::Plus;
                t.sign[a] = t.sign[a].flip();
                for c in edge_comps(a, b) {
                    total[c] = (total[c] + 4) % 8;
                }
            }
        }
        if tr[0] == 0 {
            t.sign[0] = Sign::Plus;
        }
        let edges = tr.len() - 1;
        if edges > 20 {
            return Err(DiscError::TooLarge);
        }
        let train_comps: Vec<usize> = {
            let mut v: Vec<usize> = tr.iter().filter_map(|&k| comp[k]).collect();
            v.dedup();
            v
        };
        let mut best: Option<(Vec<usize>, Vec<Sign>, Vec<u8>)> = None;
        for mask in 0u32..(1u32 << edges) {
            let mut signs: Vec<Sign> = tr.iter().map(|&k| t.sign[k]).collect();
            let mut tot = total.clone();
            for e in 0..edges {
                if mask & (1 << e) != 0 {
                    signs[e] = signs[e].flip();
                    signs[e + 1] = signs[e + 1].flip();
                    for c in edge_comps(tr[e], tr[e + 1]) {
                        tot[c] = (tot[c] + 4) % 8;
                    }
                }
            }
            let key: Vec<usize> = (0..tr.len()).filter(|&i| tr[i] != 0 && signs[i] == Sign::Minus).collect();
            if best.as_ref().is_some_and(|(bk, _, _)| (bk.len(), bk) <= (key.len(), &key)) {
                continue;
            }
            let feasible = train_comps.iter().all(|&c| {
                let parts: Vec<(u32, Sign)> = comp_scales[c]
                    .iter()
                    .map(|&k| (t.dim[k], signs[tr.iter().position(|&m| m == k).unwrap()]))
                    .collect();
                distribute_oddity(&parts, tot[c]).is_some()
            });
            if feasible {
                best = Some((key, signs, tot));
            }
        }
        let (_, signs, tot) = best.ok_or_else(unrealizable)?;
        for (i, &k) in tr.iter().enumerate() {
            t.sign[k] = signs[i];
        }
        for &c in &train_comps {
            total[c] = tot[c];
        }
    }
    for (c, ks) in comp_scales.iter().enumerate() {
        let parts: Vec<(u32, Sign)> = ks.iter().map(|&k| (t.dim[k], t.sign[k])).collect();
        let odds = distribute_oddity(&parts, total[c]).ok_or_else(unrealizable)?;
        for (k, o) in ks.iter().zip(odds) {
            t.oddity[*k] = o;
        }
    }
    for k in 1..t.dim.len() {
        if t.dim[k] > 0 {
            out.push(SymbolComponent {
                prime: 2,
                exponent: k as u32,
                rank: t.dim[k],
                sign: t.sign[k],
                oddity: Some(if t.type_one[k] { Oddity::TypeI(t.oddity[k]) } else { Oddity::TypeII }),
            });
        }
    }
    GenusSymbol::new(out)
}

/// Symbol of `-q` computed constituent-wise: odd units are negated, which
/// flips oddities and multiplies odd-prime signs by `(-1/p)^n`.
pub(crate) fn negate_raw(sym: &GenusSymbol) -> GenusSymbol {
    let comps = sym
        .components
        .iter()
        .map(|c| {
            let mut c = *c;
            match c.oddity {
                Some(Oddity::TypeI(t)) => c.oddity = Some(Oddity::TypeI((8 - t) % 8)),
                Some(Oddity::TypeII) => {}
                None => {
                    if c.prime % 4 == 3 && c.rank % 2 == 1 {
                        c.sign = c.sign.flip();
                    }
                }
            }
            c
        })
        .collect();
    GenusSymbol { components: comps }
}

/// Check that a symbol describes some finite quadratic form.
pub fn validate(sym: &GenusSymbol) -> Result<(), DiscError> {
    canonicalize(sym).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(s: &str) -> String {
        canonicalize(&parse_symbol(s).unwrap()).unwrap().to_string()
    }

    #[test]
    fn parse_examples() {
        let s = parse_symbol("2_II^-6,4_3^-1").unwrap();
        assert_eq!(
            s.components(),
            &[
                SymbolComponent { prime: 2, exponent: 1, rank: 6, sign: Sign::Minus, oddity: Some(Oddity::TypeII) },
                SymbolComponent { prime: 2, exponent: 2, rank: 1, sign: Sign::Minus, oddity: Some(Oddity::TypeI(3)) },
            ]
        );
        let s = parse_symbol("7^+3").unwrap();
        assert_eq!(s.components(), &[SymbolComponent { prime: 7, exponent: 1, rank: 3, sign: Sign::Plus, oddity: None }]);
        assert!(parse_symbol("").unwrap().is_empty());
        assert!(parse_symbol("1").unwrap().is_empty());
        assert_eq!(GenusSymbol::empty().to_string(), "1");
        assert_eq!(parse_symbol("2_{II}^{+8}").unwrap().to_string(), "2_II^+8");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_symbol("3_1^+1"), Err(DiscError::Syntax { .. })));
        assert!(matches!(parse_symbol("6^+1"), Err(DiscError::Syntax { .. })));
        assert!(matches!(parse_symbol("2^+1"), Err(DiscError::Syntax { .. })));
        match parse_symbol("2_II^+2,4_1^*1") {
            Err(DiscError::Syntax { pos, .. }) => assert_eq!(pos, 12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_symbol("2_II^+3"), Err(DiscError::Malformed(_))));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canon("3^+6"), "3^+6");
        assert_eq!(canon("2_II^+8"), "2_II^+8");
        assert_eq!(canon("2_3^-1"), "2_7^+1");
        assert_eq!(canon("2_5^-1"), "2_1^+1");
        assert_eq!(canon("2_6^+2"), "2_6^+2");
        assert!(canonicalize(&parse_symbol("2_3^+1").unwrap()).is_err());
    }

    #[test]
    fn unit_realization() {
        for n in 1..6 {
            for s in [Sign::Plus, Sign::Minus] {
                for t in 0..8 {
                    if let Some(u) = realize_units(n, s, t) {
                        assert_eq!(u.len(), n as usize);
                        assert_eq!(u.iter().map(|&x| x as u32).sum::<u32>() % 8, t as u32);
                    }
                }
            }
        }
        assert_eq!(feasible_oddities(1, Sign::Plus), (1 << 1) | (1 << 7));
        assert_eq!(feasible_oddities(2, Sign::Minus), (1 << 2) | (1 << 4) | (1 << 6));
        assert_eq!(feasible_oddities(3, Sign::Minus), 0b1010_1010);
    }
}
