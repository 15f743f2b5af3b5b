//! Named residual outcomes shared by the verification suites.

use std::collections::BTreeMap;

use crate::linalg::Residual;

/// Tolerance for identities among eps = 0 quantities.
pub const TOL_EXACT: f64 = 1e-10;
/// Tolerance for the modified Serre relations.
pub const TOL_SERREMD: f64 = 1e-9;
/// Tolerance for identities that need the eps limit.
pub const TOL_LIMIT: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub params: String,
    pub residual: Residual,
    pub tol: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, params: impl Into<String>, residual: Residual, tol: f64) -> Self {
        Check { name: name.into(), params: params.into(), residual, tol }
    }

    pub fn passed(&self) -> bool {
        self.residual.passes(self.tol)
    }
}

/// Keeps the worst residual per identity name, in first-seen order.
#[derive(Default)]
pub struct Worst {
    order: Vec<String>,
    map: BTreeMap<String, Residual>,
}

impl Worst {
    pub fn add(&mut self, name: &str, r: Residual) {
        match self.map.get_mut(name) {
            Some(w) => *w = Residual::worst(*w, r),
            None => {
                self.order.push(name.to_string());
                self.map.insert(name.to_string(), r);
            }
        }
    }

    pub fn into_checks(self, params: &str, tol: f64) -> Vec<Check> {
        self.order
            .into_iter()
            .map(|n| {
                let r = self.map[&n];
                Check::new(n, params, r, tol)
            })
            .collect()
    }
}
