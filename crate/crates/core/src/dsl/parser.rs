use std::collections::{HashMap, HashSet};

use crate::dsl::ast::{ElementExpr, GroupDefinition, SubgroupExpr};
use crate::dsl::lexer::{lex, Tok};
use crate::error::{Error, Pos, Result};
use crate::perm::Permutation;
use crate::wreath::Vertex;

/// Largest accepted tree degree.
pub const MAX_DEGREE: usize = 256;

const MAX_NESTING: usize = 200;

const RESERVED: &[&str] = &[
    "tree", "degree", "gen", "sub", "G", "ncl", "derived", "gamma", "join", "gens", "stab", "rist",
    "ristlevel",
];

struct Parser<'a> {
    toks: &'a [(Tok, Pos)],
    at: usize,
    degree: usize,
    depth: usize,
    /// Element identifiers used, for resolution after all `gen` names are known.
    uses: Vec<(String, Pos)>,
    /// Subgroup names declared so far.
    subs: HashSet<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Error {
        Error::parse(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<Pos> {
        match self.peek() {
            Tok::Ident(s) if s == word => Ok(self.bump().1),
            _ => Err(self.unexpected(&format!("`{word}`"))),
        }
    }

    fn ident(&mut self) -> Result<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let p = self.bump().1;
                Ok((s, p))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn int(&mut self) -> Result<(u64, Pos)> {
        match *self.peek() {
            Tok::Int(n) => {
                let p = self.bump().1;
                Ok((n, p))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(Error::parse(self.pos(), "expression nested too deeply"));
        }
        Ok(())
    }

    fn elem(&mut self) -> Result<ElementExpr> {
        self.enter()?;
        let mut terms = vec![self.term()?];
        while *self.peek() == Tok::Star {
            self.bump();
            terms.push(self.term()?);
        }
        self.depth -= 1;
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            ElementExpr::Product(terms)
        })
    }

    fn term(&mut self) -> Result<ElementExpr> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match *self.peek() {
            Tok::Minus => {
                self.bump();
                let (n, _) = self.int()?;
                Ok(ElementExpr::Power(Box::new(base), -(n as i64)))
            }
            Tok::Int(n) => {
                self.bump();
                Ok(ElementExpr::Power(Box::new(base), n as i64))
            }
            _ => {
                let by = self.atom()?;
                Ok(ElementExpr::Conjugate(Box::new(base), Box::new(by)))
            }
        }
    }

    fn atom(&mut self) -> Result<ElementExpr> {
        self.enter()?;
        let out = match self.peek().clone() {
            Tok::Int(1) => {
                self.bump();
                ElementExpr::One
            }
            Tok::Ident(name) => {
                let p = self.bump().1;
                self.uses.push((name.clone(), p));
                ElementExpr::Id(name)
            }
            Tok::LBracket => {
                self.bump();
                let x = self.elem()?;
                self.expect(Tok::Comma)?;
                let y = self.elem()?;
                self.expect(Tok::RBracket)?;
                ElementExpr::Commutator(Box::new(x), Box::new(y))
            }
            Tok::At => {
                let p = self.cycles()?;
                if p.is_identity() {
                    ElementExpr::One
                } else {
                    ElementExpr::Rooted(p)
                }
            }
            Tok::LParen => {
                let open = self.bump().1;
                let mut items = vec![self.elem()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    items.push(self.elem()?);
                }
                self.expect(Tok::RParen)?;
                let root = if *self.peek() == Tok::At {
                    Some(self.cycles()?)
                } else {
                    None
                };
                if items.len() == 1 && root.is_none() && self.degree != 1 {
                    items.pop().expect("one item")
                } else if items.len() != self.degree {
                    return Err(Error::parse(
                        open,
                        format!(
                            "tuple has {} entries but the tree degree is {}",
                            items.len(),
                            self.degree
                        ),
                    ));
                } else {
                    ElementExpr::Tuple(items, root.filter(|p| !p.is_identity()))
                }
            }
            _ => return Err(self.unexpected("an element")),
        };
        self.depth -= 1;
        Ok(out)
    }

    /// `@` followed by disjoint cycles on `{1..degree}`.
    fn cycles(&mut self) -> Result<Permutation> {
        let at = self.expect(Tok::At)?;
        let mut cycles = Vec::new();
        while *self.peek() == Tok::LParen {
            self.bump();
            let mut cycle = Vec::new();
            while let Tok::Int(n) = *self.peek() {
                let p = self.bump().1;
                if n == 0 || n as usize > self.degree {
                    return Err(Error::parse(
                        p,
                        format!("point {n} outside 1..{}", self.degree),
                    ));
                }
                cycle.push(n as usize);
            }
            if cycle.is_empty() {
                return Err(self.unexpected("a point"));
            }
            self.expect(Tok::RParen)?;
            cycles.push(cycle);
        }
        if cycles.is_empty() {
            return Err(self.unexpected("a cycle"));
        }
        Permutation::from_cycles(self.degree, &cycles)
            .map_err(|e| Error::parse(at, format!("invalid cycle notation: {e}")))
    }

    fn elem_list(&mut self) -> Result<Vec<ElementExpr>> {
        self.expect(Tok::LParen)?;
        let mut items = Vec::new();
        if *self.peek() != Tok::RParen {
            items.push(self.elem()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                items.push(self.elem()?);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(items)
    }

    fn level(&mut self) -> Result<usize> {
        let (n, p) = self.int()?;
        usize::try_from(n).map_err(|_| Error::parse(p, "level too large"))
    }

    fn subexpr(&mut self) -> Result<SubgroupExpr> {
        self.enter()?;
        let (name, p) = self.ident()?;
        let out = match name.as_str() {
            "G" => SubgroupExpr::Whole,
            "ncl" => SubgroupExpr::NormalClosure(self.elem_list()?),
            "gens" => SubgroupExpr::Gens(self.elem_list()?),
            "derived" => {
                self.expect(Tok::LParen)?;
                let e = self.subexpr()?;
                self.expect(Tok::RParen)?;
                SubgroupExpr::Derived(Box::new(e))
            }
            "gamma" => {
                self.expect(Tok::LParen)?;
                let e = self.subexpr()?;
                self.expect(Tok::Comma)?;
                let (i, ip) = self.int()?;
                if i == 0 {
                    return Err(Error::parse(ip, "gamma index must be at least 1"));
                }
                self.expect(Tok::RParen)?;
                SubgroupExpr::Gamma(Box::new(e), i as usize)
            }
            "join" => {
                self.expect(Tok::LParen)?;
                let x = self.subexpr()?;
                self.expect(Tok::Comma)?;
                let y = self.subexpr()?;
                self.expect(Tok::RParen)?;
                SubgroupExpr::Join(Box::new(x), Box::new(y))
            }
            "stab" => {
                self.expect(Tok::LParen)?;
                let n = self.level()?;
                self.expect(Tok::RParen)?;
                SubgroupExpr::Stab(n)
            }
            "ristlevel" => {
                self.expect(Tok::LParen)?;
                let n = self.level()?;
                self.expect(Tok::RParen)?;
                SubgroupExpr::RistLevel(n)
            }
            "rist" => {
                self.expect(Tok::LParen)?;
                self.expect(Tok::LBracket)?;
                let mut path = Vec::new();
                if *self.peek() != Tok::RBracket {
                    loop {
                        let (x, xp) = self.int()?;
                        if x == 0 || x as usize > self.degree {
                            return Err(Error::parse(
                                xp,
                                format!("vertex entry {x} outside 1..{}", self.degree),
                            ));
                        }
                        path.push(x as usize);
                        if *self.peek() != Tok::Comma {
                            break;
                        }
                        self.bump();
                    }
                }
                self.expect(Tok::RBracket)?;
                self.expect(Tok::RParen)?;
                SubgroupExpr::Rist(Vertex::new(path))
            }
            _ if self.subs.contains(&name) => SubgroupExpr::Named(name),
            _ => return Err(Error::UnknownIdentifier { pos: p, name }),
        };
        self.depth -= 1;
        Ok(out)
    }

    fn check_uses(&self, known: &HashSet<String>) -> Result<()> {
        match self.uses.iter().find(|(n, _)| !known.contains(n)) {
            Some((name, pos)) => Err(Error::UnknownIdentifier {
                pos: *pos,
                name: name.clone(),
            }),
            None => Ok(()),
        }
    }

    fn expect_eof(&self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

fn is_alias(e: &ElementExpr) -> bool {
    !matches!(e, ElementExpr::Tuple(..) | ElementExpr::Rooted(_) | ElementExpr::One)
}

/// Identifiers an expression depends on outside any tuple.
fn unguarded(e: &ElementExpr, out: &mut Vec<String>) {
    match e {
        ElementExpr::Id(n) => out.push(n.clone()),
        ElementExpr::Product(v) => v.iter().for_each(|x| unguarded(x, out)),
        ElementExpr::Power(x, _) => unguarded(x, out),
        ElementExpr::Commutator(x, y) | ElementExpr::Conjugate(x, y) => {
            unguarded(x, out);
            unguarded(y, out);
        }
        ElementExpr::One | ElementExpr::Tuple(..) | ElementExpr::Rooted(_) => {}
    }
}

/// Rejects `gen` aliases that depend on themselves without passing through
/// a tuple; returns the name of the first offender.
pub(crate) fn find_unguarded_cycle(generators: &[(String, ElementExpr)]) -> Option<String> {
    let deps: HashMap<&str, Vec<String>> = generators
        .iter()
        .filter(|(_, e)| is_alias(e))
        .map(|(n, e)| {
            let mut v = Vec::new();
            unguarded(e, &mut v);
            (n.as_str(), v)
        })
        .collect();
    // Depth-first search with colours: 1 = on stack, 2 = finished.
    fn visit<'a>(
        n: &'a str,
        deps: &'a HashMap<&'a str, Vec<String>>,
        colour: &mut HashMap<&'a str, u8>,
    ) -> bool {
        match colour.get(n) {
            Some(1) => return true,
            Some(_) => return false,
            None => {}
        }
        colour.insert(n, 1);
        if let Some(ds) = deps.get(n) {
            for d in ds {
                if deps.contains_key(d.as_str()) && visit(d.as_str(), deps, colour) {
                    return true;
                }
            }
        }
        colour.insert(n, 2);
        false
    }
    let mut colour = HashMap::new();
    for (n, _) in generators {
        if deps.contains_key(n.as_str()) && visit(n.as_str(), &deps, &mut colour) {
            return Some(n.clone());
        }
    }
    None
}

/// Parses a group definition, checking that every identifier resolves.
pub fn parse(text: &str) -> Result<GroupDefinition> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        at: 0,
        degree: 0,
        depth: 0,
        uses: Vec::new(),
        subs: HashSet::new(),
    };
    p.keyword("tree")?;
    p.keyword("degree")?;
    let (d, dp) = p.int()?;
    if d < 2 || d as usize > MAX_DEGREE {
        return Err(Error::parse(dp, format!("tree degree must be in 2..={MAX_DEGREE}, got {d}")));
    }
    p.degree = d as usize;
    let mut generators: Vec<(String, ElementExpr)> = Vec::new();
    let mut subgroups = Vec::new();
    let mut names: HashSet<String> = HashSet::new();
    let mut gen_pos: HashMap<String, Pos> = HashMap::new();
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(kw) if kw == "gen" || kw == "sub" => {
                p.bump();
                let (name, np) = p.ident()?;
                if RESERVED.contains(&name.as_str()) {
                    return Err(Error::parse(np, format!("`{name}` is a reserved word")));
                }
                if !names.insert(name.clone()) {
                    return Err(Error::parse(np, format!("`{name}` is declared twice")));
                }
                p.expect(Tok::Eq)?;
                if kw == "gen" {
                    let e = p.elem()?;
                    gen_pos.insert(name.clone(), np);
                    generators.push((name, e));
                } else {
                    let e = p.subexpr()?;
                    p.subs.insert(name.clone());
                    subgroups.push((name, e));
                }
            }
            _ => return Err(p.unexpected("`gen`, `sub` or end of input")),
        }
    }
    let known: HashSet<String> = generators.iter().map(|(n, _)| n.clone()).collect();
    p.check_uses(&known)?;
    if let Some(name) = find_unguarded_cycle(&generators) {
        return Err(Error::parse(
            gen_pos[&name],
            format!("`{name}` refers to itself outside of any tuple"),
        ));
    }
    Ok(GroupDefinition {
        degree: p.degree,
        generators,
        subgroups,
    })
}

fn standalone<T>(
    text: &str,
    defn: &GroupDefinition,
    f: impl FnOnce(&mut Parser) -> Result<T>,
) -> Result<T> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        at: 0,
        degree: defn.degree,
        depth: 0,
        uses: Vec::new(),
        subs: defn.subgroups.iter().map(|(n, _)| n.clone()).collect(),
    };
    let out = f(&mut p)?;
    p.expect_eof()?;
    let known: HashSet<String> = defn.generators.iter().map(|(n, _)| n.clone()).collect();
    p.check_uses(&known)?;
    Ok(out)
}

/// Parses an element expression over the generators of `defn`.
pub fn parse_element(text: &str, defn: &GroupDefinition) -> Result<ElementExpr> {
    standalone(text, defn, |p| p.elem())
}

/// Parses a subgroup expression that may name any subgroup of `defn`.
pub fn parse_subgroup(text: &str, defn: &GroupDefinition) -> Result<SubgroupExpr> {
    standalone(text, defn, |p| p.subexpr())
}
