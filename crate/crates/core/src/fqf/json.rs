use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{FiniteQuadraticForm, Rational};
use crate::error::Error;

#[derive(Serialize, Deserialize)]
pub(crate) struct FormJson {
    orders: Vec<i64>,
    q: Vec<String>,
    b: Vec<Vec<String>>,
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    Rational::from_str(s.trim()).map_err(|_| Error::Parse {
        token: s.to_string(),
        reason: "expected a rational of the form a/b".into(),
    })
}

impl From<FiniteQuadraticForm> for FormJson {
    fn from(f: FiniteQuadraticForm) -> Self {
        FormJson {
            orders: f.orders.clone(),
            q: f.q.iter().map(format_rational).collect(),
            b: f.b
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect(),
        }
    }
}

impl TryFrom<FormJson> for FiniteQuadraticForm {
    type Error = Error;

    fn try_from(j: FormJson) -> Result<Self, Error> {
        let q =
            j.q.iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>, _>>()?;
        let b =
            j.b.iter()
                .map(|row| {
                    row.iter()
                        .map(|s| parse_rational(s))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
        FiniteQuadraticForm::new(j.orders, q, b)
    }
}
