//! JSON interchange format for polynomials.
//!
//! ```json
//! {"vars":["x","u"],"terms":[{"exp":[2,1],"re":"3/2","im":"0"}]}
//! ```
//!
//! Exponent arrays align with `vars`, coefficients are reduced `num/den`
//! strings, and terms are listed in descending graded-lex order.

use serde::{Deserialize, Serialize};

use super::gaussian::parse_rational;
use super::{GaussianRational, Poly, VariableContext};
use crate::error::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub exp: Vec<u16>,
    pub re: String,
    pub im: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyDoc {
    pub vars: Vec<String>,
    pub terms: Vec<TermDoc>,
}

impl From<&Poly> for PolyDoc {
    fn from(p: &Poly) -> Self {
        PolyDoc {
            vars: p.context().names().to_vec(),
            terms: p
                .terms()
                .rev()
                .map(|(m, c)| TermDoc {
                    exp: m.exps().to_vec(),
                    re: c.re.to_string(),
                    im: c.im.to_string(),
                })
                .collect(),
        }
    }
}

impl PolyDoc {
    pub fn to_poly(&self) -> Result<Poly, AlgebraError> {
        let ctx = VariableContext::new(&self.vars)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok((
                    t.exp.clone(),
                    GaussianRational::new(parse_rational(&t.re)?, parse_rational(&t.im)?),
                ))
            })
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        Poly::from_terms(&ctx, terms)
    }
}

pub fn to_json(p: &Poly) -> String {
    serde_json::to_string(&PolyDoc::from(p)).expect("polynomial documents always serialize")
}

pub fn from_json(s: &str) -> Result<Poly, AlgebraError> {
    let doc: PolyDoc = serde_json::from_str(s).map_err(|e| AlgebraError::Parse(e.to_string()))?;
    doc.to_poly()
}
