//! The spec file format shared by every command.
//!
//! ```text
//! modulus 4;
//! domain 0..3;
//! atom double(e1, e2) := (e1 is out(x)) implies (e2 == out(2*x));
//! imp echo { loop { input x; output x } }
//! imp other = "other.imp";
//! lts TS1 { states q0 q1; init q0; q0 -a-> q1; q1 -b-> q1; }
//! query forall echo exists echo : always double;
//! proof init. sync. step (2 * v1). deriv. step. deriv. cycle. qed
//! ```
//!
//! File references are resolved relative to the spec file. Comments start
//! with `#`.

use std::path::{Path, PathBuf};

use crate::error::{Error, ParseError, Result};
use crate::imp::parse::parse_embedded;
use crate::imp::{compile_lts, parse_program, ImpOptions, Prog};
use crate::kernel::script::parse_tactics;
use crate::kernel::{Kernel, KernelOptions, System, SystemDef, Tactic};
use crate::lts::{parse_lts_body, EventLabel, Lts};
use crate::relspec::atoms::parse_atom_decl;
use crate::relspec::formula::parse_formula;
use crate::relspec::{AtomTable, Formula};
use crate::solver::HyperQuery;
use crate::syntax::{Cursor, Tok};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryDecl {
    pub universal: Vec<String>,
    pub existential: Vec<String>,
    pub formula: Formula,
}

impl QueryDecl {
    pub fn arity(&self) -> usize {
        self.universal.len() + self.existential.len()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.universal.iter().chain(&self.existential)
    }
}

#[derive(Clone, Debug)]
pub struct SpecFile {
    pub atoms: AtomTable,
    pub systems: Vec<System>,
    pub query: Option<QueryDecl>,
    pub modulus: Option<i64>,
    pub domain: Option<(i64, i64)>,
    pub proof: Option<Vec<Tactic>>,
}

/// Engine settings after combining the file with command-line overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub modulus: i64,
    pub domain: Option<(i64, i64)>,
    pub max_states: usize,
}

impl Settings {
    pub fn imp_options(&self) -> ImpOptions {
        ImpOptions {
            modulus: self.modulus,
            input_domain: self.domain.map(|(a, b)| (a..=b).collect()),
            max_states: self.max_states,
            ..Default::default()
        }
    }
}

fn read(base: &Path, rel: &str) -> Result<String> {
    let path = base.join(rel);
    std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn names(cur: &mut Cursor) -> std::result::Result<Vec<String>, ParseError> {
    let mut out = vec![cur.ident()?];
    while cur.eat(&Tok::Comma) {
        out.push(cur.ident()?);
    }
    Ok(out)
}

impl SpecFile {
    pub fn load(path: impl AsRef<Path>) -> Result<SpecFile> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        SpecFile::parse(&src, &base)
    }

    /// Parses a spec; file references are resolved against `base`.
    pub fn parse(src: &str, base: &Path) -> Result<SpecFile> {
        let mut cur = Cursor::new(src)?;
        let mut spec = SpecFile {
            atoms: AtomTable::new(),
            systems: Vec::new(),
            query: None,
            modulus: None,
            domain: None,
            proof: None,
        };
        while !cur.at_eof() {
            let pos = cur.pos();
            let kw = cur.ident()?;
            match kw.as_str() {
                "modulus" => {
                    let m = cur.int()?;
                    if m < 1 {
                        return Err(ParseError::new(pos, "the modulus must be at least 1").into());
                    }
                    spec.modulus = Some(m);
                    cur.expect(&Tok::Semi)?;
                }
                "domain" => {
                    let a = cur.int()?;
                    cur.expect(&Tok::DotDot)?;
                    let b = cur.int()?;
                    if a > b {
                        return Err(ParseError::new(pos, "empty input domain").into());
                    }
                    spec.domain = Some((a, b));
                    cur.expect(&Tok::Semi)?;
                }
                "atom" => {
                    let def = parse_atom_decl(&mut cur)?;
                    spec.atoms.insert(def).map_err(|e| at(pos, e))?;
                }
                "lts" => {
                    if matches!(cur.peek_at(1), Tok::Eq | Tok::Assign) {
                        let name = cur.ident()?;
                        cur.bump();
                        let file = cur.string()?;
                        cur.expect(&Tok::Semi)?;
                        let lts = Lts::parse(&read(base, &file)?)?;
                        spec.add(pos, name, SystemDef::Lts(lts))?;
                    } else {
                        let lts = parse_lts_body(&mut cur)?;
                        spec.add(pos, lts.name().to_string(), SystemDef::Lts(lts))?;
                    }
                }
                "imp" => {
                    let name = cur.ident()?;
                    let prog = if cur.eat(&Tok::Eq) || cur.eat(&Tok::Assign) {
                        let file = cur.string()?;
                        cur.expect(&Tok::Semi)?;
                        parse_program(&read(base, &file)?)?
                    } else {
                        cur.expect(&Tok::LBrace)?;
                        let p: Prog = parse_embedded(&mut cur)?;
                        cur.expect(&Tok::RBrace)?;
                        p
                    };
                    spec.add(pos, name, SystemDef::Imp(prog))?;
                }
                "query" => {
                    if spec.query.is_some() {
                        return Err(ParseError::new(pos, "only one query per file").into());
                    }
                    cur.expect_kw("forall")?;
                    let universal = names(&mut cur)?;
                    let existential = if cur.eat_kw("exists") { names(&mut cur)? } else { Vec::new() };
                    cur.expect(&Tok::Colon)?;
                    let formula = parse_formula(&mut cur)?;
                    cur.expect(&Tok::Semi)?;
                    spec.query = Some(QueryDecl { universal, existential, formula });
                }
                "proof" => {
                    if spec.proof.is_some() {
                        return Err(ParseError::new(pos, "only one proof per file").into());
                    }
                    spec.proof = Some(parse_tactics(&mut cur)?);
                }
                other => {
                    return Err(ParseError::new(pos, format!("unknown declaration `{other}`")).into());
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    fn add(&mut self, pos: crate::syntax::Pos, name: String, def: SystemDef) -> Result<()> {
        if self.system(&name).is_some() {
            return Err(ParseError::new(pos, format!("system `{name}` is declared twice")).into());
        }
        self.systems.push(System { name, def });
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if let Some(q) = &self.query {
            for n in q.names() {
                if self.system(n).is_none() {
                    return Err(Error::input(format!("the query mentions undeclared system `{n}`")));
                }
            }
            q.formula.check_atoms(&self.atoms, q.arity())?;
        }
        Ok(())
    }

    pub fn system(&self, name: &str) -> Option<&System> {
        self.systems.iter().find(|s| s.name == name)
    }

    pub fn query(&self) -> Result<&QueryDecl> {
        self.query.as_ref().ok_or_else(|| Error::input("the spec has no `query` declaration"))
    }

    /// Whether any queried system is a program.
    pub fn uses_programs(&self) -> bool {
        self.query.as_ref().is_some_and(|q| {
            q.names().any(|n| matches!(self.system(n).map(|s| &s.def), Some(SystemDef::Imp(_))))
        })
    }

    /// Combines file settings with overrides (which win).
    pub fn settings(&self, modulus: Option<i64>, domain: Option<(i64, i64)>, max_states: Option<usize>) -> Settings {
        Settings {
            modulus: modulus.or(self.modulus).unwrap_or(crate::imp::DEFAULT_MODULUS),
            domain: domain.or(self.domain),
            max_states: max_states.unwrap_or(crate::imp::DEFAULT_MAX_STATES),
        }
    }

    /// The atom table, with modular arithmetic when programs are involved.
    pub fn atoms_for(&self, s: &Settings) -> AtomTable {
        let mut atoms = self.atoms.clone();
        if self.uses_programs() {
            atoms.set_modulus(Some(s.modulus));
        }
        atoms
    }

    fn lts_of(&self, name: &str, s: &Settings) -> Result<Lts> {
        let sys = self.system(name).ok_or_else(|| Error::input(format!("undeclared system `{name}`")))?;
        match &sys.def {
            SystemDef::Lts(l) => Ok(l.clone()),
            SystemDef::Imp(p) => Ok(compile_lts(name, p, &s.imp_options())?.lts),
        }
    }

    /// The query over finite systems, compiling programs at the modulus.
    pub fn hyper_query(&self, s: &Settings) -> Result<HyperQuery> {
        let q = self.query()?;
        let universal = q.universal.iter().map(|n| self.lts_of(n, s)).collect::<Result<Vec<_>>>()?;
        let existential = q.existential.iter().map(|n| self.lts_of(n, s)).collect::<Result<Vec<_>>>()?;
        let hq = HyperQuery::new(universal, existential, q.formula.clone(), self.atoms_for(s));
        hq.validate()?;
        Ok(hq)
    }

    /// The event alphabet of each queried system, in query order.
    pub fn alphabets(&self, s: &Settings) -> Result<Vec<Vec<EventLabel>>> {
        let q = self.query()?;
        q.names()
            .map(|n| {
                let sys = self.system(n).ok_or_else(|| Error::input(format!("undeclared system `{n}`")))?;
                Ok(match &sys.def {
                    SystemDef::Lts(l) => l.alphabet().to_vec(),
                    SystemDef::Imp(_) => {
                        (0..s.modulus).map(EventLabel::In).chain((0..s.modulus).map(EventLabel::Out)).collect()
                    }
                })
            })
            .collect()
    }

    /// A kernel for the binary query `forall A exists B`.
    pub fn kernel(&self, s: &Settings, budget: usize, max_closure: usize) -> Result<Kernel> {
        let q = self.query()?;
        if q.universal.len() != 1 || q.existential.len() != 1 {
            return Err(Error::input("proofs need a query of the form `forall A exists B`"));
        }
        let get = |n: &str| self.system(n).cloned().ok_or_else(|| Error::input(format!("undeclared system `{n}`")));
        let opts = KernelOptions {
            modulus: s.modulus,
            input_domain: s.domain.map(|(a, b)| (a..=b).collect()),
            budget,
            max_closure,
        };
        Kernel::new(get(&q.universal[0])?, get(&q.existential[0])?, &q.formula, self.atoms.clone(), &opts)
    }
}

fn at(pos: crate::syntax::Pos, e: Error) -> Error {
    match e {
        Error::Parse(p) => Error::Parse(p),
        other => ParseError::new(pos, other.to_string()).into(),
    }
}
