use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use germ_cli::fmt_ranges;
use germ_cli::parse::{parse_binding, parse_branch, parse_poly};
use germ_core::arith::rat::{self, Rat};
use germ_core::arith::BiPoly;
use germ_core::invariants::{classify_weighted, fukui_set, Relation, SignMode, Verdict};
use germ_core::numeric::{build_phi, critical_data, match_critical_values, verify_conjugacy, Family, FloatPoly, Region};
use germ_core::polygon::{edge_polynomial, order_function, relative_polygon};
use germ_core::puiseux::DemiBranch;
use germ_core::tree::{blow_analytic_equivalent, build_real_tree, canonical_code, Mode};
use germ_core::GermError;
use num_traits::FromPrimitive;
use serde_json::{json, Value};

const GRAMMAR: &str = "\
Germs are polynomials in x and y: integer or rational literals, + - * /, ^ with
natural exponents, parentheses, and parameters bound with --param t=1/2.
Division is by nonzero constants only. Example: \"x*(x^3 - y^5)\".

Branches x = λ(y) are sums of terms c*y^(p/q) with c a rational, sqrt(r), or a
product of both. Example: \"y^(3/2) + sqrt(2)*y^2\". \"0\" is the axis x = 0.

Exit codes: 0 computed, 1 negative verdict, 2 input error, 3 resource limit.";

#[derive(Parser)]
#[command(name = "germ", version, about = "Invariants of real plane curve germs", after_help = GRAMMAR)]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Bind a parameter, as name=p/q. Repeatable.
    #[arg(long = "param", global = true, value_parser = parse_binding)]
    params: Vec<(String, Rat)>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Newton polygon of f relative to a branch.
    Polygon {
        f: String,
        #[arg(long, default_value = "0")]
        branch: String,
    },
    /// Order function ξ ↦ ord f(λ(y) + z y^ξ, y) for generic z.
    Ordfn {
        f: String,
        #[arg(long, default_value = "0")]
        branch: String,
    },
    /// Edge polynomial at a given exponent.
    Edgepoly {
        f: String,
        #[arg(long)]
        xi: String,
        #[arg(long, default_value = "0")]
        branch: String,
    },
    /// Real tree model.
    Tree { f: String },
    /// Blow-analytic equivalence through the real tree models.
    Equiv {
        f: String,
        g: String,
        #[arg(long)]
        orientation_preserving: bool,
    },
    /// Fukui set of arc orders up to a bound.
    Fukui {
        f: String,
        #[arg(long)]
        bound: u64,
        #[arg(long, value_parser = ["+", "-"])]
        sign: Option<String>,
    },
    /// Classification of weighted homogeneous germs.
    Weighted {
        f: String,
        g: String,
        #[arg(long, value_enum)]
        relation: Rel,
        #[arg(long)]
        orientation_preserving: bool,
    },
    /// Numeric construction and sampled check of an explicit conjugacy.
    VerifyExample {
        #[arg(value_parser = ["5.1", "5.2"])]
        example: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rel {
    C1,
    Bilip,
}

enum Failure {
    Input(String),
    Limit(String),
}

impl From<GermError> for Failure {
    fn from(e: GermError) -> Self {
        match e {
            GermError::InvalidInput(_) | GermError::NotMiniRegular => Failure::Input(e.to_string()),
            _ => Failure::Limit(e.to_string()),
        }
    }
}

struct Ctx {
    json: bool,
    params: BTreeMap<String, Rat>,
}

impl Ctx {
    fn poly(&self, s: &str) -> Result<BiPoly, Failure> {
        parse_poly(s, &self.params).map(|g| g.poly).map_err(|e| Failure::Input(format!("{s:?}: {e}")))
    }

    fn branch(&self, s: &str) -> Result<DemiBranch, Failure> {
        parse_branch(s).map_err(|e| Failure::Input(format!("{s:?}: {e}")))
    }

    /// Prints `v` as JSON or `text`, returning the exit code.
    fn emit(&self, v: Value, text: String, ok: bool) -> u8 {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        } else {
            print!("{text}");
        }
        if ok {
            0
        } else {
            1
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx { json: cli.json, params: cli.params.into_iter().collect() };
    match run(&ctx, cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Limit(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(ctx: &Ctx, cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::Polygon { f, branch } => {
            let p = relative_polygon(&ctx.poly(&f)?, &ctx.branch(&branch)?)?;
            let mut t = String::from("vertices:");
            for (i, j) in &p.vertices {
                t.push_str(&format!(" ({i}, {})", rat::fmt_rat(j)));
            }
            t.push('\n');
            for e in p.edges() {
                t.push_str(&format!(
                    "edge ({}, {}) -- ({}, {}) slope {} xi {}\n",
                    e.left.0,
                    rat::fmt_rat(&e.left.1),
                    e.right.0,
                    rat::fmt_rat(&e.right.1),
                    rat::fmt_rat(&e.slope),
                    rat::fmt_rat(&e.xi)
                ));
            }
            Ok(ctx.emit(p.to_json(), t, true))
        }
        Cmd::Ordfn { f, branch } => {
            let o = order_function(&ctx.poly(&f)?, &ctx.branch(&branch)?)?;
            let mut t = String::new();
            for ((xi, v), s) in o.breakpoints.iter().zip(&o.slopes) {
                t.push_str(&format!("from xi = {}: ord = {}, slope {s}\n", rat::fmt_rat(xi), rat::fmt_rat(v)));
            }
            Ok(ctx.emit(o.to_json(), t, true))
        }
        Cmd::Edgepoly { f, xi, branch } => {
            let x = rat::parse_rat(&xi).ok_or_else(|| Failure::Input(format!("bad rational {xi:?}")))?;
            let e = edge_polynomial(&ctx.poly(&f)?, &ctx.branch(&branch)?, &x)?;
            let t = format!("P(z) = {}\nord = {}\n", e.poly, rat::fmt_rat(&e.ord));
            Ok(ctx.emit(e.to_json(), t, true))
        }
        Cmd::Tree { f } => {
            let t = build_real_tree(&ctx.poly(&f)?)?;
            let j = t.to_json();
            let text = format!("{}\n{}\n", t.render_ascii(), serde_json::to_string(&j).unwrap());
            Ok(ctx.emit(j, text, true))
        }
        Cmd::Equiv { f, g, orientation_preserving } => {
            let (f, g) = (ctx.poly(&f)?, ctx.poly(&g)?);
            let mode = if orientation_preserving { Mode::OrientationPreserving } else { Mode::Free };
            let eq = blow_analytic_equivalent(&f, &g, mode)?;
            let mut v = json!({ "equivalent": eq, "mode": if orientation_preserving { "orientation-preserving" } else { "free" } });
            let mut text = format!("equivalent: {eq}\n");
            if !eq {
                let cf = canonical_code(&build_real_tree(&f)?, mode)?;
                let cg = canonical_code(&build_real_tree(&g)?, mode)?;
                let pos = cf.iter().zip(&cg).position(|(a, b)| a != b).unwrap_or(cf.len().min(cg.len()));
                v["first_difference"] = json!(pos);
                text.push_str(&format!("canonical codes first differ at byte {pos}\n"));
            }
            Ok(ctx.emit(v, text, eq))
        }
        Cmd::Fukui { f, bound, sign } => {
            let mode = match sign.as_deref() {
                Some("+") => SignMode::NonNeg,
                Some("-") => SignMode::NonPos,
                _ => SignMode::All,
            };
            let a = fukui_set(&ctx.poly(&f)?, bound, mode)?;
            let mut t = format!("A(f) up to {bound}: {}", fmt_ranges(&a.members));
            if a.infinity {
                t.push_str(" + infinity");
            }
            t.push('\n');
            if let Some(n) = a.tail_from {
                t.push_str(&format!("contains every n >= {n}\n"));
            }
            Ok(ctx.emit(a.to_json(), t, true))
        }
        Cmd::Weighted { f, g, relation, orientation_preserving } => {
            let rel = match relation {
                Rel::C1 => Relation::C1,
                Rel::Bilip => Relation::BiLipschitz,
            };
            let v = classify_weighted(&ctx.poly(&f)?, &ctx.poly(&g)?, rel, orientation_preserving)?;
            let (j, t, ok) = match v {
                Verdict::Equivalent(c) => {
                    let t = format!("equivalent\ncertificate: {c}\n");
                    (json!({"verdict": "equivalent", "certificate": c}), t, true)
                }
                Verdict::NotEquivalent(r) => (json!({"verdict": "not-equivalent", "reason": r}), format!("not equivalent: {r}\n"), false),
                Verdict::Inconclusive(r) => (json!({"verdict": "inconclusive", "reason": r}), format!("inconclusive: {r}\n"), true),
            };
            Ok(ctx.emit(j, t, ok))
        }
        Cmd::VerifyExample { example, samples, seed } => verify_example(ctx, &example, samples, seed),
    }
}

fn verify_example(ctx: &Ctx, example: &str, samples: usize, seed: u64) -> Result<u8, Failure> {
    let (f, g, extra) = if example == "5.1" {
        (ctx.poly("x*(x^3 - y^5)")?, ctx.poly("x*(x^3 + y^5)")?, json!({}))
    } else {
        let f = ctx.poly("x*(x^3 - y^5)*(x^3 + y^5)")?;
        let target: Vec<f64> = critical_data(&FloatPoly::from_bipoly(&f)).iter().map(|c| c.1).collect();
        let m = match_critical_values(&target, Family::TwoCubics, 1e-15)?;
        let (a, b) = (Rat::from_f64(m.a).unwrap(), Rat::from_f64(m.b).unwrap());
        let mut params = ctx.params.clone();
        params.insert("a".into(), a);
        params.insert("b".into(), b);
        let g = parse_poly("x*(x^3 - a*y^5)*(x^3 - b*y^5)", &params).map_err(|e| Failure::Input(e.to_string()))?.poly;
        (f, g, json!({ "a": m.a, "b": m.b, "match_residual": m.residual }))
    };
    let phi = build_phi(&FloatPoly::from_bipoly(&f), &FloatPoly::from_bipoly(&g), rat::rat(5, 3))?;
    let r = verify_conjugacy(&f, &g, &phi, Region::default(), samples, seed);
    let grid = phi.max_residual(10.0, 10_000);
    let (d1, d2) = phi.derivative_bounds(1e4, 2001);
    let ok = r.residual_max < 1e-8 && r.monotonicity_violations == 0 && grid < 1e-8;
    let mut v = serde_json::to_value(&r).unwrap();
    v["example"] = json!(example);
    v["phi_grid_residual"] = json!(grid);
    v["phi_derivative_bound"] = json!(d1);
    v["phi_homogeneity_bound"] = json!(d2);
    if let Value::Object(m) = extra {
        for (k, x) in m {
            v[k] = x;
        }
    }
    let text = format!(
        "example {example}\nf = {f}\ng = {g}\nresidual_max = {:.3e}\nlipschitz ratios in [{:.4}, {:.4}]\nmonotonicity violations = {}\nsamples = {}, seed = {}\n",
        r.residual_max, r.lipschitz_min, r.lipschitz_max, r.monotonicity_violations, r.samples, r.seed
    );
    Ok(ctx.emit(v, text, ok))
}
