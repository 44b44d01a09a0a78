//! Connectives, order-types and signatures, including the expansion with
//! residuals, normalizations and black adjoints.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// One entry of an order-type: `One` (monotone-like) or `Partial` (antitone-like).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    One,
    Partial,
}

impl Polarity {
    pub fn opposite(self) -> Polarity {
        match self {
            Polarity::One => Polarity::Partial,
            Polarity::Partial => Polarity::One,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Polarity::One => '1',
            Polarity::Partial => 'd',
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderType(Vec<Polarity>);

impl OrderType {
    pub fn new(entries: Vec<Polarity>) -> Self {
        OrderType(entries)
    }

    /// Parses strings like `d1`; `-` or the empty string denote the nullary order-type.
    pub fn parse(s: &str) -> Option<Self> {
        if s == "-" {
            return Some(OrderType(Vec::new()));
        }
        s.chars()
            .map(|c| match c {
                '1' => Some(Polarity::One),
                'd' | 'D' => Some(Polarity::Partial),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(OrderType)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Polarity {
        self.0[i]
    }

    pub fn entries(&self) -> &[Polarity] {
        &self.0
    }

    pub fn opposite(&self) -> OrderType {
        OrderType(self.0.iter().map(|p| p.opposite()).collect())
    }
}

impl fmt::Display for OrderType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        for p in &self.0 {
            write!(f, "{}", p)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    FNormal,
    FRegular,
    GNormal,
    GRegular,
}

impl Family {
    pub fn is_f(self) -> bool {
        matches!(self, Family::FNormal | Family::FRegular)
    }

    pub fn is_g(self) -> bool {
        !self.is_f()
    }

    pub fn is_regular(self) -> bool {
        matches!(self, Family::FRegular | Family::GRegular)
    }

    pub fn code(self) -> &'static str {
        match self {
            Family::FNormal => "fn",
            Family::FRegular => "fr",
            Family::GNormal => "gn",
            Family::GRegular => "gr",
        }
    }

    pub fn from_code(s: &str) -> Option<Family> {
        match s {
            "fn" => Some(Family::FNormal),
            "fr" => Some(Family::FRegular),
            "gn" => Some(Family::GNormal),
            "gr" => Some(Family::GRegular),
            _ => None,
        }
    }

    /// The family of the same connective read in the order-dual lattice.
    pub fn dual(self) -> Family {
        match self {
            Family::FNormal => Family::GNormal,
            Family::FRegular => Family::GRegular,
            Family::GNormal => Family::FNormal,
            Family::GRegular => Family::FRegular,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Base,
    /// Residual in the given (0-based) coordinate.
    Residual { parent: String, coordinate: usize },
    Normalization { parent: String },
    /// Black adjoint of the normalization of a regular connective.
    Adjoint { parent: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Connective {
    pub name: String,
    pub family: Family,
    pub order_type: OrderType,
    pub origin: Origin,
}

impl Connective {
    pub fn arity(&self) -> usize {
        self.order_type.len()
    }

    pub fn is_base(&self) -> bool {
        self.origin == Origin::Base
    }

    /// Residuals and black adjoints, i.e. the connectives of the expanded
    /// language that do not come from the base signature or normalization.
    pub fn is_adjoint_like(&self) -> bool {
        matches!(self.origin, Origin::Residual { .. } | Origin::Adjoint { .. })
    }

    /// Names made of operator characters are printed infix when binary.
    pub fn is_symbolic(&self) -> bool {
        self.name
            .chars()
            .next()
            .map(|c| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(false)
    }
}

/// A connective declaration before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectiveDecl {
    pub name: String,
    pub family: Family,
    pub arity: usize,
    pub order_type: OrderType,
}

impl ConnectiveDecl {
    pub fn new(name: &str, family: Family, order_type: &str) -> Self {
        let order_type = OrderType::parse(order_type).expect("order-type over {1,d}");
        ConnectiveDecl {
            name: name.to_string(),
            family,
            arity: order_type.len(),
            order_type,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate connective name `{0}`")]
    DuplicateName(String),
    #[error("regular connective `{name}` must be unary, got arity {arity}")]
    RegularArityViolation { name: String, arity: usize },
    #[error("connective `{name}` has arity {arity} but order-type of length {len}")]
    OrderTypeLengthMismatch { name: String, arity: usize, len: usize },
    #[error("invalid connective name `{0}`")]
    InvalidName(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    conns: BTreeMap<String, Arc<Connective>>,
    expanded: bool,
}

const RESERVED: [&str; 6] = ["/\\", "\\/", "<=", "(", ")", ","];

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != "top"
        && name != "bot"
        && !name.starts_with('#')
        && !name.starts_with('@')
        && !name.chars().any(|c| c.is_whitespace() || c == '(' || c == ')' || c == ',')
        && !RESERVED.iter().any(|r| name.contains(r))
}

/// Order-type and side of the residual of a connective in coordinate `i`.
/// Returns `(is_f, order_type)` of the residual.
pub fn residual_shape(is_f: bool, ot: &OrderType, i: usize) -> (bool, OrderType) {
    match ot.get(i) {
        Polarity::One => {
            let entries = ot
                .entries()
                .iter()
                .enumerate()
                .map(|(j, p)| if j == i { Polarity::One } else { p.opposite() })
                .collect();
            (!is_f, OrderType(entries))
        }
        Polarity::Partial => (is_f, ot.clone()),
    }
}

pub fn residual_name(c: &Connective, i: usize) -> String {
    if c.family.is_f() {
        format!("{}#{}", c.name, i + 1)
    } else {
        format!("{}b{}", c.name, i + 1)
    }
}

pub fn normalization_name(c: &Connective) -> String {
    let prefix = match (c.family.is_f(), c.order_type.get(0)) {
        (true, Polarity::One) => "dia_",
        (true, Polarity::Partial) => "tri_",
        (false, Polarity::One) => "box_",
        (false, Polarity::Partial) => "trr_",
    };
    format!("{}{}", prefix, c.name)
}

pub fn black_adjoint_name(c: &Connective) -> String {
    let prefix = match (c.family.is_f(), c.order_type.get(0)) {
        (true, Polarity::One) => "bbox_",
        (true, Polarity::Partial) => "btl_",
        (false, Polarity::One) => "bdia_",
        (false, Polarity::Partial) => "btr_",
    };
    format!("{}{}", prefix, c.name)
}

impl Signature {
    /// Validates a list of declarations into a base signature.
    pub fn new(decls: Vec<ConnectiveDecl>) -> Result<Signature, SignatureError> {
        let mut conns = BTreeMap::new();
        for d in decls {
            if !valid_name(&d.name) {
                return Err(SignatureError::InvalidName(d.name));
            }
            if d.order_type.len() != d.arity {
                return Err(SignatureError::OrderTypeLengthMismatch {
                    name: d.name,
                    arity: d.arity,
                    len: d.order_type.len(),
                });
            }
            if d.family.is_regular() && d.arity != 1 {
                return Err(SignatureError::RegularArityViolation { name: d.name, arity: d.arity });
            }
            if conns.contains_key(&d.name) {
                return Err(SignatureError::DuplicateName(d.name));
            }
            let c = Connective {
                name: d.name.clone(),
                family: d.family,
                order_type: d.order_type,
                origin: Origin::Base,
            };
            conns.insert(d.name, Arc::new(c));
        }
        let sig = Signature { conns, expanded: false };
        // Generated names must not collide with declared ones.
        let mut seen: BTreeMap<String, ()> = sig.conns.keys().map(|k| (k.clone(), ())).collect();
        for c in sig.generated() {
            if seen.insert(c.name.clone(), ()).is_some() {
                return Err(SignatureError::DuplicateName(c.name));
            }
        }
        Ok(sig)
    }

    /// Parses the line-oriented signature file format.
    pub fn parse(text: &str) -> Result<Signature, SignatureError> {
        let mut decls = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with("//") || line.starts_with('%') {
                continue;
            }
            let syntax = |msg: &str| SignatureError::Syntax { line: idx + 1, msg: msg.to_string() };
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts[0] != "conn" {
                return Err(syntax("expected `conn`"));
            }
            if parts.len() < 4 || parts.len() > 5 {
                return Err(syntax("expected `conn <name> <family> <arity> <ordertype>`"));
            }
            let family = Family::from_code(parts[2]).ok_or_else(|| syntax("unknown family"))?;
            let arity: usize = parts[3].parse().map_err(|_| syntax("bad arity"))?;
            let ot_text = parts.get(4).copied().unwrap_or("");
            let order_type = OrderType::parse(ot_text).ok_or_else(|| syntax("bad order-type"))?;
            decls.push(ConnectiveDecl { name: parts[1].to_string(), family, arity, order_type });
        }
        Signature::new(decls)
    }

    pub fn is_expanded(&self) -> bool {
        self.expanded
    }

    pub fn get(&self, name: &str) -> Option<&Arc<Connective>> {
        self.conns.get(name)
    }

    pub fn connectives(&self) -> impl Iterator<Item = &Arc<Connective>> {
        self.conns.values()
    }

    pub fn base_connectives(&self) -> impl Iterator<Item = &Arc<Connective>> {
        self.conns.values().filter(|c| c.is_base())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.conns.keys().map(|s| s.as_str())
    }

    fn generated(&self) -> Vec<Connective> {
        let mut out = Vec::new();
        for c in self.base_connectives() {
            if c.family.is_regular() {
                let normal = if c.family.is_f() { Family::FNormal } else { Family::GNormal };
                out.push(Connective {
                    name: normalization_name(c),
                    family: normal,
                    order_type: c.order_type.clone(),
                    origin: Origin::Normalization { parent: c.name.clone() },
                });
                let (is_f, ot) = residual_shape(c.family.is_f(), &c.order_type, 0);
                out.push(Connective {
                    name: black_adjoint_name(c),
                    family: if is_f { Family::FNormal } else { Family::GNormal },
                    order_type: ot,
                    origin: Origin::Adjoint { parent: c.name.clone() },
                });
            } else {
                for i in 0..c.arity() {
                    let (is_f, ot) = residual_shape(c.family.is_f(), &c.order_type, i);
                    out.push(Connective {
                        name: residual_name(c, i),
                        family: if is_f { Family::FNormal } else { Family::GNormal },
                        order_type: ot,
                        origin: Origin::Residual { parent: c.name.clone(), coordinate: i },
                    });
                }
            }
        }
        out
    }

    /// Adds residuals of normal connectives, normalizations of regular ones and
    /// the black adjoints of those normalizations. Idempotent.
    pub fn expand(&self) -> Signature {
        if self.expanded {
            return self.clone();
        }
        let mut conns = self.conns.clone();
        for c in self.generated() {
            conns.insert(c.name.clone(), Arc::new(c));
        }
        Signature { conns, expanded: true }
    }

    /// Residual of a normal connective (base or normalization) in coordinate `i`.
    pub fn residual(&self, c: &Connective, i: usize) -> Option<&Arc<Connective>> {
        match &c.origin {
            Origin::Base if !c.family.is_regular() => self.get(&residual_name(c, i)),
            Origin::Normalization { parent } if i == 0 => {
                let p = self.get(parent)?;
                self.get(&black_adjoint_name(p))
            }
            _ => None,
        }
    }

    pub fn normalization(&self, c: &Connective) -> Option<&Arc<Connective>> {
        if c.is_base() && c.family.is_regular() {
            self.get(&normalization_name(c))
        } else {
            None
        }
    }

    pub fn black_adjoint(&self, c: &Connective) -> Option<&Arc<Connective>> {
        if c.is_base() && c.family.is_regular() {
            self.get(&black_adjoint_name(c))
        } else {
            None
        }
    }

    /// For a residual or black adjoint, the connective it is adjoint to and the coordinate.
    pub fn adjoint_source(&self, c: &Connective) -> Option<(&Arc<Connective>, usize)> {
        match &c.origin {
            Origin::Residual { parent, coordinate } => Some((self.get(parent)?, *coordinate)),
            Origin::Adjoint { parent } => {
                let p = self.get(parent)?;
                Some((self.normalization(p)?, 0))
            }
            _ => None,
        }
    }

    /// The same base connectives read over the order dual: F and G swap.
    pub fn dual(&self) -> Signature {
        let decls = self
            .base_connectives()
            .map(|c| ConnectiveDecl {
                name: c.name.clone(),
                family: c.family.dual(),
                arity: c.arity(),
                order_type: c.order_type.clone(),
            })
            .collect();
        let sig = Signature::new(decls).expect("dual of a valid signature is valid");
        if self.expanded {
            sig.expand()
        } else {
            sig
        }
    }

    /// Renders the base declarations in the file format.
    pub fn to_file_format(&self) -> String {
        let mut out = String::new();
        for c in self.base_connectives() {
            out.push_str(&format!(
                "conn {} {} {} {}\n",
                c.name,
                c.family.code(),
                c.arity(),
                c.order_type
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Polarity::{One, Partial};

    fn arrow_sig() -> Signature {
        Signature::new(vec![ConnectiveDecl::new("->", Family::GNormal, "d1")]).unwrap()
    }

    #[test]
    fn validates_arrow() {
        let sig = arrow_sig();
        let c = sig.get("->").unwrap();
        assert_eq!(c.arity(), 2);
        assert_eq!(c.order_type.entries(), &[Partial, One]);
    }

    #[test]
    fn rejects_binary_regular() {
        let err = Signature::new(vec![ConnectiveDecl::new("h", Family::FRegular, "11")]).unwrap_err();
        assert!(matches!(err, SignatureError::RegularArityViolation { arity: 2, .. }));
    }

    #[test]
    fn rejects_duplicates_and_length_mismatch() {
        let d = ConnectiveDecl::new("f", Family::FNormal, "1");
        assert_eq!(
            Signature::new(vec![d.clone(), d]).unwrap_err(),
            SignatureError::DuplicateName("f".into())
        );
        let bad = ConnectiveDecl {
            name: "f".into(),
            family: Family::FNormal,
            arity: 2,
            order_type: OrderType::parse("1").unwrap(),
        };
        assert!(matches!(
            Signature::new(vec![bad]).unwrap_err(),
            SignatureError::OrderTypeLengthMismatch { .. }
        ));
    }

    #[test]
    fn rejects_generated_name_collision() {
        let err = Signature::new(vec![
            ConnectiveDecl::new("f", Family::FNormal, "1"),
            ConnectiveDecl::new("f#1", Family::GNormal, "1"),
        ])
        .unwrap_err();
        assert_eq!(err, SignatureError::DuplicateName("f#1".into()));
    }

    #[test]
    fn residual_order_types_of_binary_f() {
        let sig = Signature::new(vec![ConnectiveDecl::new("f", Family::FNormal, "1d")])
            .unwrap()
            .expand();
        let r1 = sig.get("f#1").unwrap();
        let r2 = sig.get("f#2").unwrap();
        assert_eq!(r1.order_type.to_string(), "11");
        assert_eq!(r1.family, Family::GNormal);
        assert_eq!(r2.order_type.to_string(), "1d");
        assert_eq!(r2.family, Family::FNormal);
    }

    #[test]
    fn arrow_residuals() {
        let sig = arrow_sig().expand();
        let fusion = sig.get("->b2").unwrap();
        assert_eq!(fusion.family, Family::FNormal);
        assert_eq!(fusion.order_type.to_string(), "11");
        let left = sig.get("->b1").unwrap();
        assert_eq!(left.family, Family::GNormal);
        assert_eq!(left.order_type.to_string(), "d1");
    }

    #[test]
    fn regular_expansion() {
        let sig = Signature::new(vec![
            ConnectiveDecl::new("f", Family::FRegular, "1"),
            ConnectiveDecl::new("t", Family::FRegular, "d"),
            ConnectiveDecl::new("g", Family::GRegular, "1"),
            ConnectiveDecl::new("u", Family::GRegular, "d"),
        ])
        .unwrap()
        .expand();
        let expect = [
            ("dia_f", Family::FNormal, "1"),
            ("bbox_f", Family::GNormal, "1"),
            ("tri_t", Family::FNormal, "d"),
            ("btl_t", Family::FNormal, "d"),
            ("box_g", Family::GNormal, "1"),
            ("bdia_g", Family::FNormal, "1"),
            ("trr_u", Family::GNormal, "d"),
            ("btr_u", Family::GNormal, "d"),
        ];
        for (name, fam, ot) in expect {
            let c = sig.get(name).unwrap_or_else(|| panic!("missing {name}"));
            assert_eq!(c.family, fam, "{name}");
            assert_eq!(c.order_type.to_string(), ot, "{name}");
        }
        let dia = sig.get("dia_f").unwrap().clone();
        assert_eq!(sig.residual(&dia, 0).unwrap().name, "bbox_f");
    }

    #[test]
    fn expansion_is_idempotent() {
        let e = arrow_sig().expand();
        assert_eq!(e.expand(), e);
    }

    #[test]
    fn parses_file_format() {
        let sig = Signature::parse("// frege\nconn -> gn 2 d1\nconn dia fr 1 1\n").unwrap();
        assert_eq!(sig.get("->").unwrap().family, Family::GNormal);
        assert_eq!(Signature::parse(&sig.to_file_format()).unwrap(), sig);
        assert!(matches!(
            Signature::parse("conn x zz 1 1").unwrap_err(),
            SignatureError::Syntax { line: 1, .. }
        ));
    }

    #[test]
    fn order_type_opposite_involution() {
        let ot = OrderType::parse("1dd1").unwrap();
        assert_eq!(ot.opposite().opposite(), ot);
        assert_eq!(ot.opposite().to_string(), "d11d");
    }
}
