use super::LpError;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId(pub usize);

/// A decision variable; `None` bounds are infinite.
#[derive(Clone, Debug)]
pub struct Variable<S> {
    pub name: String,
    pub lower: Option<S>,
    pub upper: Option<S>,
}

#[derive(Clone, Debug)]
pub struct Constraint<S> {
    pub name: String,
    pub coeffs: Vec<(usize, S)>,
    pub relation: Relation,
    pub rhs: S,
}

#[derive(Clone, Debug)]
pub struct LinearProgram<S = f64> {
    pub sense: Sense,
    pub variables: Vec<Variable<S>>,
    pub constraints: Vec<Constraint<S>>,
    /// Sparse objective coefficients.
    pub objective: Vec<(usize, S)>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: Option<S>, upper: Option<S>) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        VarId(self.variables.len() - 1)
    }

    /// Adds a variable with bounds `[0, +inf)`.
    pub fn add_nonneg(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, Some(S::zero()), None)
    }

    pub fn add_free(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, None, None)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(VarId, S)>,
        relation: Relation,
        rhs: S,
    ) -> RowId {
        let coeffs = merge_terms(coeffs.into_iter().map(|(v, c)| (v.0, c)).collect());
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs,
            relation,
            rhs,
        });
        RowId(self.constraints.len() - 1)
    }

    pub fn set_objective(&mut self, coeffs: Vec<(VarId, S)>) {
        self.objective = merge_terms(coeffs.into_iter().map(|(v, c)| (v.0, c)).collect());
    }

    pub fn add_objective_term(&mut self, var: VarId, coeff: S) {
        self.objective.push((var.0, coeff));
        self.objective = merge_terms(std::mem::take(&mut self.objective));
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Dense objective vector.
    pub fn objective_dense(&self) -> Vec<S> {
        let mut c = vec![S::zero(); self.num_vars()];
        for (j, v) in &self.objective {
            c[*j] = c[*j].clone() + v.clone();
        }
        c
    }

    pub fn objective_value(&self, x: &[S]) -> S {
        self.objective
            .iter()
            .fold(S::zero(), |acc, (j, c)| acc + c.clone() * x[*j].clone())
    }

    pub fn row_activity(&self, row: usize, x: &[S]) -> S {
        self.constraints[row]
            .coeffs
            .iter()
            .fold(S::zero(), |acc, (j, a)| acc + a.clone() * x[*j].clone())
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.variables.is_empty() {
            return Err(LpError::Empty);
        }
        let n = self.num_vars();
        let finite = |s: &S, what: &str| -> Result<(), LpError> {
            if s.to_f64().is_finite() {
                Ok(())
            } else {
                Err(LpError::NonFinite(what.to_string()))
            }
        };
        for v in &self.variables {
            if let Some(l) = &v.lower {
                finite(l, &v.name)?;
            }
            if let Some(u) = &v.upper {
                finite(u, &v.name)?;
            }
        }
        for c in &self.constraints {
            finite(&c.rhs, &c.name)?;
            for (j, a) in &c.coeffs {
                if *j >= n {
                    return Err(LpError::BadVariable(*j));
                }
                finite(a, &c.name)?;
            }
        }
        for (j, a) in &self.objective {
            if *j >= n {
                return Err(LpError::BadVariable(*j));
            }
            finite(a, "objective")?;
        }
        Ok(())
    }

    /// Converts every coefficient to another scalar type.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LinearProgram<T> {
        LinearProgram {
            sense: self.sense,
            variables: self
                .variables
                .iter()
                .map(|v| Variable {
                    name: v.name.clone(),
                    lower: v.lower.as_ref().map(&f),
                    upper: v.upper.as_ref().map(&f),
                })
                .collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    name: c.name.clone(),
                    coeffs: c.coeffs.iter().map(|(j, a)| (*j, f(a))).collect(),
                    relation: c.relation,
                    rhs: f(&c.rhs),
                })
                .collect(),
            objective: self.objective.iter().map(|(j, a)| (*j, f(a))).collect(),
        }
    }
}

fn merge_terms<S: Scalar>(mut terms: Vec<(usize, S)>) -> Vec<(usize, S)> {
    terms.sort_by_key(|(j, _)| *j);
    let mut out: Vec<(usize, S)> = Vec::with_capacity(terms.len());
    for (j, c) in terms {
        match out.last_mut() {
            Some((k, acc)) if *k == j => *acc = acc.clone() + c,
            _ => out.push((j, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}
