use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Feature,
    Sensitive,
    Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Continuous,
    Binary,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub role: Role,
    pub kind: Kind,
    /// Ordered category labels; position gives the encoded value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

impl ColumnSchema {
    pub fn new(name: impl Into<String>, role: Role, kind: Kind) -> Self {
        Self { name: name.into(), role, kind, categories: None }
    }

    pub fn with_categories<S: Into<String>>(mut self, cats: impl IntoIterator<Item = S>) -> Self {
        self.categories = Some(cats.into_iter().map(Into::into).collect());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<ColumnSchema>,
}

impl Schema {
    pub fn new(columns: Vec<ColumnSchema>) -> Result<Self> {
        let schema = Self { columns };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        let outcomes = self.columns.iter().filter(|c| c.role == Role::Outcome).count();
        if outcomes != 1 {
            return Err(Error::Schema(format!("expected exactly one outcome column, found {outcomes}")));
        }
        if !self.columns.iter().any(|c| c.role == Role::Sensitive) {
            return Err(Error::Schema("at least one sensitive column is required".into()));
        }
        for (i, c) in self.columns.iter().enumerate() {
            if self.columns[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::Schema(format!("duplicate column '{}'", c.name)));
            }
            if let Some(cats) = &c.categories {
                if cats.is_empty() {
                    return Err(Error::Schema(format!("column '{}' declares no categories", c.name)));
                }
                if c.kind == Kind::Binary && cats.len() != 2 {
                    return Err(Error::Schema(format!(
                        "binary column '{}' must declare exactly two categories",
                        c.name
                    )));
                }
            }
            if c.role == Role::Outcome && c.kind == Kind::Categorical {
                let ok = c.categories.as_ref().is_some_and(|cats| cats.len() == 2);
                if !ok {
                    return Err(Error::Schema(format!(
                        "categorical outcome '{}' must declare exactly two categories",
                        c.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn outcome(&self) -> &ColumnSchema {
        self.columns.iter().find(|c| c.role == Role::Outcome).expect("validated schema has an outcome")
    }

    pub fn sensitive(&self) -> impl Iterator<Item = &ColumnSchema> {
        self.columns.iter().filter(|c| c.role == Role::Sensitive)
    }

    pub fn features(&self) -> impl Iterator<Item = &ColumnSchema> {
        self.columns.iter().filter(|c| c.role == Role::Feature)
    }
}
