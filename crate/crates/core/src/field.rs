//! Evaluable real functions on `[0,1]` or `[0,1]²`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::expr::{self, Expr, ParseError};

/// Upper end of the per-axis domain on which catalog functions are declared.
pub const BUILTIN_DOMAIN_UPPER: f64 = 1.5;

type FieldFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

#[derive(Clone)]
enum Repr {
    Expr(Arc<Expr>),
    Closure(Arc<FieldFn>),
}

/// A real function of `(x, y)`; univariate fields ignore `y`.
///
/// `domain_upper` is the largest per-axis argument at which the field is
/// declared evaluable (the lower end is always 0).
#[derive(Clone)]
pub struct ScalarField {
    name: String,
    repr: Repr,
    bivariate: bool,
    domain_upper: f64,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("bivariate", &self.bivariate)
            .field("domain_upper", &self.domain_upper)
            .finish()
    }
}

impl ScalarField {
    /// Parses `src`; the field is bivariate iff the expression mentions `y`.
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        Ok(Self::from_expr(src.trim().to_string(), expr::parse(src)?))
    }

    pub fn from_expr(name: impl Into<String>, e: Expr) -> Self {
        Self {
            name: name.into(),
            bivariate: e.mentions_y(),
            repr: Repr::Expr(Arc::new(e)),
            domain_upper: f64::INFINITY,
        }
    }

    pub fn bivariate(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            repr: Repr::Closure(Arc::new(f)),
            bivariate: true,
            domain_upper: f64::INFINITY,
        }
    }

    pub fn univariate(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            repr: Repr::Closure(Arc::new(move |x, _| f(x))),
            bivariate: false,
            domain_upper: f64::INFINITY,
        }
    }

    pub fn with_domain_upper(mut self, upper: f64) -> Self {
        self.domain_upper = upper;
        self
    }

    /// Looks up a catalog function by name (see [`catalog`]).
    pub fn builtin(name: &str) -> Option<Self> {
        catalog().iter().find(|b| b.name == name).map(Builtin::field)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_bivariate(&self) -> bool {
        self.bivariate
    }

    pub fn domain_upper(&self) -> f64 {
        self.domain_upper
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.repr {
            Repr::Expr(e) => e.eval_xy(x, y),
            Repr::Closure(f) => f(x, y),
        }
    }

    #[inline]
    pub fn eval1(&self, x: f64) -> f64 {
        self.eval(x, 0.0)
    }

    /// Pointwise product, used for `K(fg)`.
    pub fn product(&self, other: &ScalarField) -> ScalarField {
        let (a, b) = (self.clone(), other.clone());
        ScalarField {
            name: format!("({})*({})", self.name, other.name),
            bivariate: self.bivariate || other.bivariate,
            domain_upper: self.domain_upper.min(other.domain_upper),
            repr: Repr::Closure(Arc::new(move |x, y| a.eval(x, y) * b.eval(x, y))),
        }
    }
}

/// Exact first and second partial derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Partials {
    pub fx: f64,
    pub fy: f64,
    pub fxx: f64,
    pub fyy: f64,
    pub fxy: f64,
}

/// A catalog function with hand-coded derivatives.
#[derive(Clone, Copy)]
pub struct Builtin {
    pub name: &'static str,
    pub formula: &'static str,
    pub bivariate: bool,
    pub f: fn(f64, f64) -> f64,
    pub partials: fn(f64, f64) -> Partials,
}

impl Builtin {
    pub fn field(&self) -> ScalarField {
        let f = self.f;
        ScalarField {
            name: self.name.to_string(),
            repr: Repr::Closure(Arc::new(f)),
            bivariate: self.bivariate,
            domain_upper: BUILTIN_DOMAIN_UPPER,
        }
    }
}

impl fmt::Debug for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Builtin({} = {})", self.name, self.formula)
    }
}

fn example1(x: f64, y: f64) -> f64 {
    let s = (x * y).sin();
    (-x).exp() * s * s
}

fn example1_partials(x: f64, y: f64) -> Partials {
    let ex = (-x).exp();
    let s = (x * y).sin();
    let s2 = (2.0 * x * y).sin();
    let c2 = (2.0 * x * y).cos();
    Partials {
        fx: ex * (y * s2 - s * s),
        fy: ex * x * s2,
        fxx: ex * (s * s - 2.0 * y * s2 + 2.0 * y * y * c2),
        fyy: ex * 2.0 * x * x * c2,
        fxy: ex * (s2 + 2.0 * x * y * c2 - x * s2),
    }
}

fn example2(x: f64, y: f64) -> f64 {
    x.powi(4) * y * y - 2.0 * x * x * y.powi(3) + x * y * y
}

fn example2_partials(x: f64, y: f64) -> Partials {
    Partials {
        fx: 4.0 * x.powi(3) * y * y - 4.0 * x * y.powi(3) + y * y,
        fy: 2.0 * x.powi(4) * y - 6.0 * x * x * y * y + 2.0 * x * y,
        fxx: 12.0 * x * x * y * y - 4.0 * y.powi(3),
        fyy: 2.0 * x.powi(4) - 12.0 * x * x * y + 2.0 * x,
        fxy: 8.0 * x.powi(3) * y - 12.0 * x * y * y + 2.0 * y,
    }
}

fn example3(x: f64, y: f64) -> f64 {
    y * y * x.cos()
}

fn example3_partials(x: f64, y: f64) -> Partials {
    Partials {
        fx: -y * y * x.sin(),
        fy: 2.0 * y * x.cos(),
        fxx: -y * y * x.cos(),
        fyy: 2.0 * x.cos(),
        fxy: -2.0 * y * x.sin(),
    }
}

static CATALOG: [Builtin; 10] = [
    Builtin {
        name: "e0",
        formula: "1",
        bivariate: false,
        f: |_, _| 1.0,
        partials: |_, _| Partials::default(),
    },
    Builtin {
        name: "e1",
        formula: "x",
        bivariate: false,
        f: |x, _| x,
        partials: |_, _| Partials {
            fx: 1.0,
            ..Partials::default()
        },
    },
    Builtin {
        name: "e2",
        formula: "x^2",
        bivariate: false,
        f: |x, _| x * x,
        partials: |x, _| Partials {
            fx: 2.0 * x,
            fxx: 2.0,
            ..Partials::default()
        },
    },
    Builtin {
        name: "e01",
        formula: "y",
        bivariate: true,
        f: |_, y| y,
        partials: |_, _| Partials {
            fy: 1.0,
            ..Partials::default()
        },
    },
    Builtin {
        name: "e02",
        formula: "y^2",
        bivariate: true,
        f: |_, y| y * y,
        partials: |_, y| Partials {
            fy: 2.0 * y,
            fyy: 2.0,
            ..Partials::default()
        },
    },
    Builtin {
        name: "ts",
        formula: "x*y",
        bivariate: true,
        f: |x, y| x * y,
        partials: |x, y| Partials {
            fx: y,
            fy: x,
            fxy: 1.0,
            ..Partials::default()
        },
    },
    Builtin {
        name: "sinpi",
        formula: "sin(pi*x)",
        bivariate: false,
        f: |x, _| (PI * x).sin(),
        partials: |x, _| Partials {
            fx: PI * (PI * x).cos(),
            fxx: -PI * PI * (PI * x).sin(),
            ..Partials::default()
        },
    },
    Builtin {
        name: "example1",
        formula: "exp(-x)*sin(x*y)^2",
        bivariate: true,
        f: example1,
        partials: example1_partials,
    },
    Builtin {
        name: "example2",
        formula: "x^4*y^2 - 2*x^2*y^3 + x*y^2",
        bivariate: true,
        f: example2,
        partials: example2_partials,
    },
    Builtin {
        name: "example3",
        formula: "y^2*cos(x)",
        bivariate: true,
        f: example3,
        partials: example3_partials,
    },
];

/// The builtin function catalog: monomials `e0, e1, e2, e01, e02`, the
/// product `ts`, `sinpi`, and the three worked-example surfaces.
///
/// Every entry is declared on `[0, 1.5]` per axis so the affine operator
/// can sample slightly beyond the unit interval.
pub fn catalog() -> &'static [Builtin] {
    &CATALOG
}
