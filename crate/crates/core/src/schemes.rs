//! Affine schemes over `Z` given by integer polynomial systems.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polys::{self, determinant, parse_system, IntPoly, PolySystem, Vars};

/// User-asserted hypotheses on the generic fibre. They are never verified;
/// reports echo them verbatim.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub lci: bool,
    pub reduced: bool,
    pub abs_irreducible: bool,
}

/// Whether the dimension was supplied by the user or derived as the
/// expected value of a construction (jets).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimSource {
    Declared,
    Expected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineScheme {
    pub name: String,
    pub system: PolySystem,
    pub declared_dim: usize,
    pub dim_source: DimSource,
    pub hypotheses: Hypotheses,
}

impl AffineScheme {
    pub fn new(
        name: impl Into<String>,
        system: PolySystem,
        declared_dim: usize,
        hypotheses: Hypotheses,
    ) -> Result<Self> {
        if declared_dim > system.nvars() {
            return Err(Error::invalid(format!(
                "declared dimension {declared_dim} exceeds the {} variables",
                system.nvars()
            )));
        }
        Ok(AffineScheme {
            name: name.into(),
            system,
            declared_dim,
            dim_source: DimSource::Declared,
            hypotheses,
        })
    }

    /// Parses a scheme from variable names and polynomial strings.
    pub fn parse<S: AsRef<str>, T: AsRef<str>>(
        name: &str,
        vars: &[S],
        polys: &[T],
        dim: usize,
        hypotheses: Hypotheses,
    ) -> Result<Self> {
        let system = parse_system(&polys::vars_from(vars), polys)?;
        Self::new(name, system, dim, hypotheses)
    }

    pub fn nvars(&self) -> usize {
        self.system.nvars()
    }

    pub fn num_equations(&self) -> usize {
        self.system.len()
    }

    /// Canonical text form: name, variables, dimension, hypotheses and
    /// normalized polynomials. Equal schemes have equal canonical forms.
    pub fn canonical_form(&self) -> String {
        format!(
            "name={};vars={};dim={};lci={};reduced={};irreducible={};polys={}",
            self.name,
            self.system.vars().join(","),
            self.declared_dim,
            self.hypotheses.lci,
            self.hypotheses.reduced,
            self.hypotheses.abs_irreducible,
            self.system
        )
    }
}

impl fmt::Display for AffineScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} in A^{} ({} dim {}): {}",
            self.name,
            self.nvars(),
            match self.dim_source {
                DimSource::Declared => "declared",
                DimSource::Expected => "expected",
            },
            self.declared_dim,
            self.system
        )
    }
}

/// On-disk scheme description (JSON).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeDocument {
    pub name: String,
    pub vars: Vec<String>,
    #[serde(default)]
    pub polys: Vec<String>,
    #[serde(default, alias = "declared_dim")]
    pub dim: Option<usize>,
    #[serde(default)]
    pub lci: bool,
    #[serde(default)]
    pub reduced: bool,
    #[serde(default, alias = "abs_irreducible")]
    pub irreducible: bool,
}

impl SchemeDocument {
    pub fn from_scheme(x: &AffineScheme) -> Self {
        SchemeDocument {
            name: x.name.clone(),
            vars: x.system.vars().to_vec(),
            polys: x.system.polys().iter().map(|p| p.to_string()).collect(),
            dim: Some(x.declared_dim),
            lci: x.hypotheses.lci,
            reduced: x.hypotheses.reduced,
            irreducible: x.hypotheses.abs_irreducible,
        }
    }
}

/// Builds a scheme from a parsed document.
pub fn load_scheme(doc: &SchemeDocument) -> Result<AffineScheme> {
    let dim = doc
        .dim
        .ok_or_else(|| Error::invalid(format!("scheme `{}` is missing `dim`", doc.name)))?;
    AffineScheme::parse(
        &doc.name,
        &doc.vars,
        &doc.polys,
        dim,
        Hypotheses {
            lci: doc.lci,
            reduced: doc.reduced,
            abs_irreducible: doc.irreducible,
        },
    )
}

/// Parses a JSON scheme document.
pub fn load_scheme_json(text: &str) -> Result<AffineScheme> {
    let doc: SchemeDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    load_scheme(&doc)
}

/// `A^d` with coordinates `x1..xd`.
pub fn affine_space(d: usize) -> AffineScheme {
    let names: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let vars: Vars = names.into();
    AffineScheme {
        name: format!("A{d}"),
        system: PolySystem::empty(vars),
        declared_dim: d,
        dim_source: DimSource::Declared,
        hypotheses: Hypotheses {
            lci: true,
            reduced: true,
            abs_irreducible: true,
        },
    }
}

/// The `m`-th jet scheme, whose `k`-points are the `k[t]/t^(m+1)`-points of
/// `x`. Its dimension is recorded as the expected value `(m+1) dim X`.
pub fn jet_scheme(x: &AffineScheme, m: usize) -> AffineScheme {
    AffineScheme {
        name: format!("Jet{m}({})", x.name),
        system: x.system.jet_expand(m),
        declared_dim: (m + 1) * x.declared_dim,
        dim_source: DimSource::Expected,
        hypotheses: x.hypotheses,
    }
}

fn fresh_name(vars: &Vars, base: &str) -> String {
    let mut name = base.to_string();
    while vars.contains(&name) {
        name.push('_');
    }
    name
}

/// The open subscheme `g != 0`, realised as `{x in X, w g(x) = 1}`.
pub fn distinguished_open(x: &AffineScheme, g: &IntPoly) -> Result<AffineScheme> {
    if g.vars() != x.system.vars() {
        return Err(Error::invalid("localizing polynomial over different variables"));
    }
    let old = x.system.vars();
    let n = old.len();
    let mut names: Vec<String> = old.to_vec();
    names.push(fresh_name(old, "w"));
    let vars: Vars = names.into();
    let map: Vec<usize> = (0..n).collect();
    let mut polys: Vec<IntPoly> = x
        .system
        .polys()
        .iter()
        .map(|p| p.relabel(vars.clone(), &map))
        .collect();
    let w = IntPoly::var(vars.clone(), n);
    let g2 = g.relabel(vars.clone(), &map);
    polys.push(w.mul(&g2).sub(&IntPoly::constant(vars.clone(), 1)));
    Ok(AffineScheme {
        name: format!("{}[1/({g})]", x.name),
        system: PolySystem::new(vars, polys)?,
        declared_dim: x.declared_dim,
        dim_source: x.dim_source,
        hypotheses: x.hypotheses,
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The equations of `x` together with every `c x c` minor of its Jacobian,
/// `c = nvars - declared_dim`. Its points are the non-smooth points of `x`
/// (when the declared dimension is right).
pub fn singular_subscheme(x: &AffineScheme) -> Result<AffineScheme> {
    let n = x.nvars();
    let l = x.num_equations();
    let c = n - x.declared_dim;
    if c > l {
        return Err(Error::invalid(format!(
            "codimension {c} exceeds the number of equations {l}; declared dimension inconsistent"
        )));
    }
    let vars = x.system.vars().clone();
    let jac = x.system.jacobian();
    let mut polys: Vec<IntPoly> = x.system.polys().to_vec();
    for rows in combinations(l, c) {
        for cols in combinations(n, c) {
            let minor: Vec<Vec<IntPoly>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| jac[i][j].clone()).collect())
                .collect();
            let d = determinant(&minor, &vars);
            if !d.is_zero() && !polys.contains(&d) {
                polys.push(d);
            }
        }
    }
    Ok(AffineScheme {
        name: format!("Sing({})", x.name),
        system: PolySystem::new(vars, polys)?,
        declared_dim: 0,
        dim_source: DimSource::Expected,
        hypotheses: Hypotheses::default(),
    })
}

/// Group types with deformation-variety support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupType {
    SL,
}

impl std::str::FromStr for GroupType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SL" => Ok(GroupType::SL),
            other => Err(Error::invalid(format!("unsupported group type `{other}`"))),
        }
    }
}

type PolyMatrix = Vec<Vec<IntPoly>>;

fn mat_mul(a: &PolyMatrix, b: &PolyMatrix, vars: &Vars) -> PolyMatrix {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..d).fold(IntPoly::zero(vars.clone()), |acc, k| {
                        acc.add(&a[i][k].mul(&b[k][j]))
                    })
                })
                .collect()
        })
        .collect()
}

fn adjugate(a: &PolyMatrix, vars: &Vars) -> PolyMatrix {
    let d = a.len();
    if d == 1 {
        return vec![vec![IntPoly::constant(vars.clone(), 1)]];
    }
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    // cofactor of entry (j, i)
                    let minor: PolyMatrix = (0..d)
                        .filter(|&r| r != j)
                        .map(|r| {
                            (0..d)
                                .filter(|&c| c != i)
                                .map(|c| a[r][c].clone())
                                .collect()
                        })
                        .collect();
                    let m = determinant(&minor, vars);
                    if (i + j) % 2 == 0 {
                        m
                    } else {
                        m.neg()
                    }
                })
                .collect()
        })
        .collect()
}

/// Deformation variety `Def_{G,n}`: tuples `(g_1, h_1, ..., g_n, h_n)` in
/// `SL_d` with `[g_1,h_1] ... [g_n,h_n] = 1`.
///
/// Variables are the matrix entries `g{i}_{r}{c}`, `h{i}_{r}{c}`. Inverses are
/// adjugates (exact because of the determinant equations). The determinant
/// equations come first, then the entries of `W - I`.
pub fn def_scheme(group: GroupType, d: usize, n: usize) -> Result<AffineScheme> {
    let GroupType::SL = group;
    if d < 2 || n < 1 {
        return Err(Error::invalid("def_scheme needs d >= 2 and n >= 1"));
    }
    if d > 9 {
        return Err(Error::invalid("matrix size above 9 is not supported"));
    }
    let mut names = Vec::new();
    for i in 1..=n {
        for sym in ["g", "h"] {
            for r in 1..=d {
                for c in 1..=d {
                    names.push(format!("{sym}{i}_{r}{c}"));
                }
            }
        }
    }
    let vars: Vars = names.into();
    let d2 = d * d;
    let matrix = |offset: usize| -> PolyMatrix {
        (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| IntPoly::var(vars.clone(), offset + r * d + c))
                    .collect()
            })
            .collect()
    };
    let one = IntPoly::constant(vars.clone(), 1);
    let mut dets = Vec::new();
    let mut word: PolyMatrix = (0..d)
        .map(|r| {
            (0..d)
                .map(|c| if r == c { one.clone() } else { IntPoly::zero(vars.clone()) })
                .collect()
        })
        .collect();
    for i in 0..n {
        let g = matrix(2 * i * d2);
        let h = matrix((2 * i + 1) * d2);
        dets.push(determinant(&g, &vars).sub(&one));
        dets.push(determinant(&h, &vars).sub(&one));
        let comm = mat_mul(
            &mat_mul(&mat_mul(&g, &h, &vars), &adjugate(&g, &vars), &vars),
            &adjugate(&h, &vars),
            &vars,
        );
        word = mat_mul(&word, &comm, &vars);
    }
    let mut polys = dets;
    for (r, row) in word.into_iter().enumerate() {
        for (c, entry) in row.into_iter().enumerate() {
            polys.push(if r == c { entry.sub(&one) } else { entry });
        }
    }
    Ok(AffineScheme {
        name: format!("Def(SL{d},{n})"),
        system: PolySystem::new(vars, polys)?,
        declared_dim: (2 * n - 1) * (d2 - 1),
        dim_source: DimSource::Declared,
        hypotheses: Hypotheses {
            lci: true,
            reduced: true,
            abs_irreducible: true,
        },
    })
}

/// Small reference schemes used throughout tests, benches and the CLI.
pub mod corpus {
    use super::*;

    fn make(name: &str, vars: &[&str], polys: &[&str], dim: usize, irreducible: bool) -> AffineScheme {
        AffineScheme::parse(
            name,
            vars,
            polys,
            dim,
            Hypotheses {
                lci: true,
                reduced: true,
                abs_irreducible: irreducible,
            },
        )
        .expect("corpus schemes parse")
    }

    pub fn affine_plane() -> AffineScheme {
        let mut a = affine_space(2);
        a.name = "A2".into();
        a
    }

    /// `xy = z^2`.
    pub fn cone() -> AffineScheme {
        make("cone", &["x", "y", "z"], &["x*y - z^2"], 2, true)
    }

    /// `y^2 = x^3`.
    pub fn cusp() -> AffineScheme {
        make("cusp", &["x", "y"], &["y^2 - x^3"], 1, true)
    }

    /// `xy = 0`: two lines.
    pub fn crossing() -> AffineScheme {
        make("xy0", &["x", "y"], &["x*y"], 1, false)
    }

    /// `x^2 + y^2 = 0`.
    pub fn sum_of_squares() -> AffineScheme {
        make("x2y2", &["x", "y"], &["x^2 + y^2"], 1, false)
    }

    /// `SL_2` as `ad - bc = 1`.
    pub fn sl2() -> AffineScheme {
        make("SL2", &["a", "b", "c", "d"], &["a*d - b*c - 1"], 3, true)
    }

    /// The origin of `A^1`.
    pub fn point() -> AffineScheme {
        make("point", &["x"], &["x"], 0, true)
    }

    pub fn def_sl2_1() -> AffineScheme {
        def_scheme(GroupType::SL, 2, 1).expect("valid parameters")
    }

    /// The engine-equivalence corpus.
    pub fn all() -> Vec<AffineScheme> {
        vec![
            affine_plane(),
            cone(),
            cusp(),
            crossing(),
            sum_of_squares(),
            sl2(),
            def_sl2_1(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_documents() {
        let cone = load_scheme_json(
            r#"{"name":"cone","vars":["x","y","z"],"polys":["x*y - z^2"],"dim":2}"#,
        )
        .unwrap();
        assert_eq!(cone.name, "cone");
        assert_eq!(cone.nvars(), 3);
        assert_eq!(cone.declared_dim, 2);
        let cusp = load_scheme_json(
            r#"{"name":"cusp","vars":["x","y"],"polys":["y^2 - x^3"],"dim":1,"lci":true}"#,
        )
        .unwrap();
        assert!(cusp.hypotheses.lci);
        assert!(!cusp.hypotheses.abs_irreducible);

        let bad = load_scheme_json(r#"{"name":"b","vars":["x"],"polys":["x^-1"],"dim":0}"#);
        assert!(matches!(bad, Err(Error::Parse { line: 1, .. })));
        let unknown = load_scheme_json(r#"{"name":"b","vars":["x"],"polys":["y"],"dim":0}"#);
        assert!(matches!(unknown, Err(Error::Parse { .. })));
        let missing = load_scheme_json(r#"{"name":"b","vars":["x"],"polys":["x"]}"#);
        assert!(matches!(missing, Err(Error::Invalid(_))));
        let too_big = load_scheme_json(r#"{"name":"b","vars":["x"],"polys":[],"dim":2}"#);
        assert!(too_big.is_err());
        let syntax = load_scheme_json("{\"name\": ");
        assert!(matches!(syntax, Err(Error::Parse { .. })));
    }

    #[test]
    fn document_round_trip() {
        for x in corpus::all() {
            let doc = SchemeDocument::from_scheme(&x);
            let back = load_scheme(&doc).unwrap();
            assert_eq!(back.system, x.system);
            assert_eq!(back.canonical_form(), x.canonical_form());
        }
    }

    #[test]
    fn jet_scheme_shapes() {
        let a1 = affine_space(1);
        let j = jet_scheme(&a1, 3);
        assert_eq!(j.nvars(), 4);
        assert_eq!(j.num_equations(), 0);
        assert_eq!(j.declared_dim, 4);

        let j = jet_scheme(&corpus::cone(), 1);
        assert_eq!((j.nvars(), j.num_equations(), j.declared_dim), (6, 2, 4));
        assert_eq!(j.dim_source, DimSource::Expected);

        let j0 = jet_scheme(&corpus::cusp(), 0);
        assert_eq!(j0.num_equations(), 1);
        assert_eq!(j0.system.vars().to_vec(), vec!["x_0", "y_0"]);
    }

    #[test]
    fn distinguished_open_shapes() {
        let cone = corpus::cone();
        let x = IntPoly::var(cone.system.vars().clone(), 0);
        let u = distinguished_open(&cone, &x).unwrap();
        assert_eq!(u.nvars(), 4);
        assert_eq!(u.system.polys()[1].to_string(), "x*w - 1");
        assert_eq!(u.declared_dim, 2);
    }

    #[test]
    fn singular_subscheme_equations() {
        let s = singular_subscheme(&corpus::cusp()).unwrap();
        let strs: Vec<String> = s.system.polys().iter().map(|p| p.to_string()).collect();
        assert_eq!(strs, vec!["-x^3 + y^2", "-3*x^2", "2*y"]);
        let s = singular_subscheme(&corpus::cone()).unwrap();
        assert_eq!(s.num_equations(), 4);
        let s = singular_subscheme(&affine_space(1)).unwrap();
        assert_eq!(s.system.polys()[0].to_string(), "1");
        let mut bad = corpus::cone();
        bad.declared_dim = 0;
        assert!(singular_subscheme(&bad).is_err());
    }

    #[test]
    fn def_scheme_shape() {
        let x = def_scheme(GroupType::SL, 2, 1).unwrap();
        assert_eq!(x.nvars(), 8);
        assert_eq!(x.num_equations(), 6);
        assert_eq!(x.declared_dim, 3);
        let x2 = def_scheme(GroupType::SL, 2, 2).unwrap();
        assert_eq!(x2.nvars(), 2 * 2 * 4);
        assert_eq!(x2.declared_dim, 9);
        assert!(def_scheme(GroupType::SL, 1, 1).is_err());
        assert!("Sp".parse::<GroupType>().is_err());
    }

    #[test]
    fn def_scheme_word_vanishes_on_commuting_integer_pairs() {
        use num_bigint::BigInt;
        let x = def_scheme(GroupType::SL, 2, 1).unwrap();
        // g = [[2,1],[1,1]], h = g^2 = [[5,3],[3,2]]: commuting, det 1
        let pt: Vec<BigInt> = [2, 1, 1, 1, 5, 3, 3, 2].iter().map(|&v| BigInt::from(v)).collect();
        for p in x.system.polys() {
            assert_eq!(p.eval_int(&pt), BigInt::from(0));
        }
        // g, h = [[1,1],[0,1]] do not commute with [[1,0],[1,1]]
        let pt: Vec<BigInt> = [1, 1, 0, 1, 1, 0, 1, 1].iter().map(|&v| BigInt::from(v)).collect();
        assert!(x.system.polys().iter().any(|p| p.eval_int(&pt) != BigInt::from(0)));
    }
}
