//! JSON system files.
//!
//! Every coefficient is a string holding an exact expression over integers
//! and named parameters: `"-49/10"`, `"a"`, `"(b - 8)/8"`, `"2*c^2"`. Floats
//! never appear.
//!
//! ```json
//! {
//!   "name": "example4",
//!   "params": { "a": "1/34" },
//!   "rotational": { "u": ["6", "-11", "6", "-1"], "v": ["2", "-1"] },
//!   "P": [{ "c": "a", "i": 2, "j": 3 }],
//!   "Q": []
//! }
//! ```
//!
//! `P` and `Q` are added to the rotational part when both are present. The
//! optional `Pt`, `Qt` inside `rotational` are scaled by the expression `eps`.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bipoly::{BiPoly, SystemSpec};
use crate::certify::DulacPair;
use crate::exactalg::rat::format_rat;
use crate::exactalg::{Rat, RatPoly};
use crate::polarize::rotational_system;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub c: String,
    pub i: u32,
    pub j: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub k: String,
    /// Coefficients of `w(r)`, lowest degree first.
    pub w: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationalSpec {
    /// Coefficients of `u(s)`, lowest degree first.
    pub u: Vec<String>,
    pub v: Vec<String>,
    #[serde(rename = "Pt", default, skip_serializing_if = "Vec::is_empty")]
    pub pt: Vec<Monomial>,
    #[serde(rename = "Qt", default, skip_serializing_if = "Vec::is_empty")]
    pub qt: Vec<Monomial>,
    #[serde(default = "zero_string")]
    pub eps: String,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotational: Option<RotationalSpec>,
    #[serde(rename = "P", default)]
    pub p: Vec<Monomial>,
    #[serde(rename = "Q", default)]
    pub q: Vec<Monomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSpec>,
}

#[derive(Debug, Error)]
pub enum SysFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed system file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("in {field}: {message}")]
    Expr { field: String, message: String },
    #[error("unknown parameter {0:?}")]
    UnknownParam(String),
    #[error("OriginNotSingular: {0} has a nonzero constant term")]
    OriginNotSingular(&'static str),
    #[error("invalid pair: {0}")]
    InvalidPair(String),
}

/// The perturbation family of a file with a `rotational` block.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationalFamily {
    pub u: RatPoly,
    pub v: RatPoly,
    pub pt: BiPoly,
    pub qt: BiPoly,
    pub eps: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSystem {
    pub name: String,
    pub system: SystemSpec,
    pub pair: Option<DulacPair>,
    pub rotational: Option<RotationalFamily>,
    pub params: BTreeMap<String, Rat>,
}

impl SystemFile {
    pub fn from_json(text: &str) -> Result<Self, SysFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, SysFileError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SysFileError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    /// Literal file for a concrete system, without parameters.
    pub fn from_system(name: &str, sys: &SystemSpec) -> Self {
        let list = |b: &BiPoly| b.terms().map(|(&(i, j), c)| Monomial { c: format_rat(c), i, j }).collect();
        SystemFile {
            name: name.into(),
            description: None,
            params: BTreeMap::new(),
            rotational: None,
            p: list(sys.p()),
            q: list(sys.q()),
            pair: None,
        }
    }

    /// Evaluates every expression, with `overrides` replacing or adding
    /// parameters.
    pub fn resolve(&self, overrides: &[(String, Rat)]) -> Result<ResolvedSystem, SysFileError> {
        let mut params = BTreeMap::new();
        for (name, text) in &self.params {
            let v = eval_expr(text, &BTreeMap::new())
                .map_err(|message| SysFileError::Expr { field: format!("params.{name}"), message })?;
            params.insert(name.clone(), v);
        }
        for (name, v) in overrides {
            params.insert(name.clone(), v.clone());
        }
        let ev = |field: &str, text: &str| {
            eval_expr(text, &params).map_err(|message| match message.strip_prefix(UNKNOWN) {
                Some(name) => SysFileError::UnknownParam(name.to_string()),
                None => SysFileError::Expr { field: field.to_string(), message },
            })
        };
        let bipoly = |field: &str, list: &[Monomial]| -> Result<BiPoly, SysFileError> {
            let mut out = BiPoly::zero();
            for (n, m) in list.iter().enumerate() {
                let c = ev(&format!("{field}[{n}].c"), &m.c)?;
                out = &out + &BiPoly::monomial(c, m.i, m.j);
            }
            Ok(out)
        };
        let univariate = |field: &str, list: &[String]| -> Result<RatPoly, SysFileError> {
            list.iter()
                .enumerate()
                .map(|(n, s)| ev(&format!("{field}[{n}]"), s))
                .collect::<Result<Vec<_>, _>>()
                .map(RatPoly::new)
        };

        let (mut p, mut q) = (bipoly("P", &self.p)?, bipoly("Q", &self.q)?);
        let rotational = match &self.rotational {
            Some(rot) => {
                let fam = RotationalFamily {
                    u: univariate("rotational.u", &rot.u)?,
                    v: univariate("rotational.v", &rot.v)?,
                    pt: bipoly("rotational.Pt", &rot.pt)?,
                    qt: bipoly("rotational.Qt", &rot.qt)?,
                    eps: ev("rotational.eps", &rot.eps)?,
                };
                let base = rotational_system(&fam.u, &fam.v);
                p = &(&p + base.p()) + &fam.pt.scale(&fam.eps);
                q = &(&q + base.q()) + &fam.qt.scale(&fam.eps);
                Some(fam)
            }
            None => None,
        };
        if !p.coeff(0, 0).is_zero() {
            return Err(SysFileError::OriginNotSingular("P"));
        }
        if !q.coeff(0, 0).is_zero() {
            return Err(SysFileError::OriginNotSingular("Q"));
        }
        let system = SystemSpec::new(p, q).expect("constant terms checked");
        let pair = match &self.pair {
            Some(spec) => {
                let k = ev("pair.k", &spec.k)?;
                let w = univariate("pair.w", &spec.w)?;
                Some(DulacPair::new(k, w).map_err(|e| SysFileError::InvalidPair(e.to_string()))?)
            }
            None => None,
        };
        Ok(ResolvedSystem { name: self.name.clone(), system, pair, rotational, params })
    }
}

const UNKNOWN: &str = "unknown parameter ";

/// Exact value of an arithmetic expression over integers and `params`.
///
/// Grammar: sums and differences of products and quotients of signed powers
/// `atom ^ integer`, where an atom is an integer, a parameter name or a
/// parenthesised expression.
pub fn eval_expr(text: &str, params: &BTreeMap<String, Rat>) -> Result<Rat, String> {
    let text = text.replace('\u{2212}', "-");
    let mut parser = Parser { src: text.as_bytes(), pos: 0, params };
    let v = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(format!("unexpected {:?} at offset {}", parser.rest(), parser.pos));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    params: &'a BTreeMap<String, Rat>,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn rest(&self) -> String {
        String::from_utf8_lossy(&self.src[self.pos..]).into_owned()
    }

    fn expr(&mut self) -> Result<Rat, String> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Rat, String> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            if op == b'*' {
                acc *= rhs;
            } else if rhs.is_zero() {
                return Err("division by zero".into());
            } else {
                acc /= rhs;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Rat, String> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Rat, String> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            _ => false,
        };
        let e: u32 = self.integer()?.parse().map_err(|_| "exponent too large".to_string())?;
        if e > 4096 {
            return Err("exponent too large".into());
        }
        if negative && base.is_zero() {
            return Err("division by zero".into());
        }
        let mut v = Rat::one();
        for _ in 0..e {
            v *= &base;
        }
        Ok(if negative { v.recip() } else { v })
    }

    fn integer(&mut self) -> Result<String, String> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected a number at offset {start}"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<Rat, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(format!("missing ')' at offset {}", self.pos));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b) if b.is_ascii_digit() => {
                let digits = self.integer()?;
                Ok(Rat::from_integer(digits.parse().expect("ascii digits")))
            }
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_') {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                self.params.get(&name).cloned().ok_or_else(|| format!("{UNKNOWN}{name}"))
            }
            Some(_) => Err(format!("unexpected {:?} at offset {}", self.rest(), self.pos)),
            None => Err("unexpected end of expression".into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::exactalg::rat::{int, rat};

    fn params(items: &[(&str, Rat)]) -> BTreeMap<String, Rat> {
        items.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn expressions() {
        let ps = params(&[("b", rat(-1, 2)), ("a", rat(1, 34))]);
        assert_eq!(eval_expr("-49/10", &ps).unwrap(), rat(-49, 10));
        assert_eq!(eval_expr("\u{2212}49/10", &ps).unwrap(), rat(-49, 10));
        assert_eq!(eval_expr("(b - 8)/8", &ps).unwrap(), rat(-17, 16));
        assert_eq!(eval_expr("2*a^2 - -1", &ps).unwrap(), rat(2, 1156) + int(1));
        assert_eq!(eval_expr("2^-3", &ps).unwrap(), rat(1, 8));
        assert_eq!(eval_expr("1/2/2", &ps).unwrap(), rat(1, 4));
        assert_eq!(eval_expr("-2^2", &ps).unwrap(), int(-4));
        for bad in ["", "1.5", "1/0", "(1", "1 2", "c", "0^-1", "3^"] {
            assert!(eval_expr(bad, &ps).is_err(), "{bad}");
        }
    }

    #[test]
    fn literal_round_trip() {
        let sys = corpus::system_1_3();
        let file = SystemFile::from_system("s", &sys);
        let text = serde_json::to_string(&file).unwrap();
        let back = SystemFile::from_json(&text).unwrap().resolve(&[]).unwrap();
        assert_eq!(back.system, sys);
        assert!(back.pair.is_none());
    }

    #[test]
    fn rotational_block_with_params() {
        let text = r#"{
            "name": "example4",
            "params": { "a": "1/34" },
            "rotational": { "u": ["6", "-11", "6", "-1"], "v": ["2", "-1"] },
            "P": [{ "c": "a", "i": 2, "j": 3 }],
            "Q": []
        }"#;
        let file = SystemFile::from_json(text).unwrap();
        assert_eq!(file.resolve(&[]).unwrap().system, corpus::example4(&rat(1, 34)));
        let other = file.resolve(&[("a".into(), rat(1, 10))]).unwrap();
        assert_eq!(other.system, corpus::example4(&rat(1, 10)));
    }

    #[test]
    fn perturbation_scaled_by_eps() {
        let text = r#"{
            "name": "fam",
            "params": { "eps": "1/100" },
            "rotational": { "u": ["2", "-3", "1"], "v": ["1"],
                            "Pt": [{ "c": "1", "i": 2, "j": 1 }], "Qt": [], "eps": "eps" }
        }"#;
        let r = SystemFile::from_json(text).unwrap().resolve(&[]).unwrap();
        let fam = r.rotational.unwrap();
        assert_eq!(fam.eps, rat(1, 100));
        let base = rotational_system(&fam.u, &fam.v);
        assert_eq!(r.system, base.perturbed(&fam.eps, &fam.pt, &fam.qt).unwrap());
    }

    #[test]
    fn input_errors() {
        let constant =
            r#"{"name": "c", "P": [{"c": "1", "i": 0, "j": 0}], "Q": [{"c": "1", "i": 1, "j": 0}]}"#;
        let err = SystemFile::from_json(constant).unwrap().resolve(&[]).unwrap_err();
        assert!(matches!(err, SysFileError::OriginNotSingular("P")));
        assert!(err.to_string().contains("OriginNotSingular"));

        let unknown = r#"{"name": "u", "P": [{"c": "z", "i": 1, "j": 0}], "Q": []}"#;
        let err = SystemFile::from_json(unknown).unwrap().resolve(&[]).unwrap_err();
        assert!(matches!(err, SysFileError::UnknownParam(ref n) if n == "z"));

        let float = r#"{"name": "f", "P": [{"c": "0.5", "i": 1, "j": 0}], "Q": []}"#;
        assert!(matches!(SystemFile::from_json(float).unwrap().resolve(&[]), Err(SysFileError::Expr { .. })));
        assert!(SystemFile::from_json(r#"{"name": "x", "P": [{"c": 1, "i": 1, "j": 0}]}"#).is_err());
        assert!(SystemFile::from_json(r#"{"name": "x", "bogus": 1}"#).is_err());

        let bad_pair =
            r#"{"name": "p", "P": [{"c": "1", "i": 1, "j": 0}], "Q": [], "pair": {"k": "0", "w": ["1"]}}"#;
        assert!(matches!(
            SystemFile::from_json(bad_pair).unwrap().resolve(&[]),
            Err(SysFileError::InvalidPair(_))
        ));
    }
}
