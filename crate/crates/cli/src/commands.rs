use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use torelli_core::configs::{self, PointOrders, RnString};
use torelli_core::curve::{parse_curve_spec, CurvePoint, HyperellipticCurve};
use torelli_core::ff::FieldDesc;
use torelli_core::isogeny::{self, Verdict};
use torelli_core::jacgrp::{enumerate_jacobian_capped, JacobianGroupTable};
use torelli_core::recon::{self, Exclusion};
use torelli_core::zeta::{self, ZetaReport};
use torelli_core::{nt, Error, Jacobian};

use crate::{Command, Context, Failure, Output};

fn curve(spec: &str) -> Result<HyperellipticCurve, Failure> {
    Ok(parse_curve_spec(spec)?)
}

/// Arguments as JSON with curve specs replaced by their normal form.
fn normalized<A: Serialize>(args: &A, curves: &[(&str, &HyperellipticCurve)]) -> Value {
    let mut v = serde_json::to_value(args).expect("serializable");
    for (key, c) in curves {
        v[*key] = Value::String(c.spec());
    }
    v
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

/// `inf`, or `(x,y)` with both coordinates given by their encodings.
fn parse_point(k: &FieldDesc, s: &str) -> Result<CurvePoint, Failure> {
    let s = s.trim();
    if s == "inf" {
        return Ok(CurvePoint::infinity());
    }
    let bad = || Failure::Usage(format!("bad point {s:?}; expected inf or (x,y)"));
    let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
    let (x, y) = inner.split_once(',').ok_or_else(bad)?;
    let coord = |t: &str| {
        t.trim()
            .parse::<u64>()
            .ok()
            .and_then(|c| k.element(c))
            .ok_or_else(bad)
    };
    Ok(CurvePoint::Affine {
        x: coord(x)?,
        y: coord(y)?,
    })
}

pub fn run(cmd: &Command, ctx: &Context) -> Result<Output, Failure> {
    match cmd {
        Command::Zeta(a) => {
            let c = curve(&a.curve)?;
            let poly = zeta::frob_charpoly_capped(&c, ctx.cap)?;
            let report = ZetaReport::new(&poly, a.nmax);
            let mut text = format!("curve: {}\nP(T) = {}\n", c.spec(), poly.display());
            for (n, v) in &report.orders {
                let _ = writeln!(text, "F({n}) = {v}");
            }
            let _ = writeln!(
                text,
                "weil: functional equation {}, max root deviation {:e}",
                report.weil.functional_eq, report.weil.max_root_dev
            );
            Ok(Output {
                args: normalized(a, &[("curve", &c)]),
                result: to_value(&report),
                text,
                not_proven: false,
            })
        }
        Command::Order(a) => {
            let c = curve(&a.curve)?;
            let poly = zeta::frob_charpoly_capped(&c, ctx.cap)?;
            let args = normalized(a, &[("curve", &c)]);
            match &a.divisor {
                None => {
                    let seq = zeta::group_order_seq(&poly, a.nmax);
                    let mut text = String::new();
                    for (n, v) in &seq.values {
                        let _ = writeln!(text, "F({n}) = {v}");
                    }
                    Ok(Output {
                        args,
                        result: json!({ "orders": to_value(&seq) }),
                        text,
                        not_proven: false,
                    })
                }
                Some(ds) => {
                    let jac = Jacobian::new(&c, a.ext)?;
                    let d = jac.parse_divisor(ds)?;
                    let n = poly.group_order(a.ext);
                    let n64: u64 = (&n)
                        .try_into()
                        .map_err(|_| Error::FactorizationIncomplete(n.to_string()))?;
                    let order = jac.element_order_factored(&d, &nt::factorize(n64)?)?;
                    let shown = jac.format_divisor(&d);
                    Ok(Output {
                        args,
                        result: json!({
                            "divisor": shown,
                            "ext": a.ext,
                            "group_order": n64,
                            "order": order,
                        }),
                        text: format!("ord({shown}) = {order} in a group of order {n64}\n"),
                        not_proven: false,
                    })
                }
            }
        }
        Command::Isogeny(a) => {
            let ca = curve(&a.curve_a)?;
            let cb = curve(&a.curve_b)?;
            let cert = isogeny::isogeny_pipeline_capped(&ca, &cb, a.nmax, a.div, ctx.cap)?;
            let mut text = format!(
                "verdict: {}\n",
                match cert.verdict {
                    Verdict::Isogenous => "isogenous",
                    Verdict::NotProven => "not-proven",
                }
            );
            if let Some(n) = cert.base_change {
                let _ = writeln!(text, "charpolys agree over F_{{p^{n}}}");
            }
            if let Some(d) = &cert.divisibility {
                let _ = writeln!(text, "divisibility: {} of {} terms hold ({})", d.holds, d.n_max, d.note);
            }
            Ok(Output {
                args: normalized(a, &[("curve_a", &ca), ("curve_b", &cb)]),
                result: to_value(&cert),
                text,
                not_proven: cert.verdict == Verdict::NotProven,
            })
        }
        Command::Configs(a) => {
            let c = curve(&a.curve)?;
            let string = RnString::parse(&a.string, c.p())?;
            let po = PointOrders::compute_capped(&c, a.ext, ctx.cap)?;
            let mut confs = configs::configurations_from(&po, &string);
            if let Some(b) = &a.base {
                let base = parse_point(po.jacobian().field(), b)?;
                if po.index_of(&base).is_none() {
                    return Err(Failure::Usage(format!("base point {b} is not on the curve")));
                }
                confs.retain(|x| x.base == base);
            }
            let sig = configs::signature_from(&po, a.order_cap);
            let audit = configs::audit_from(&po);
            let stab = configs::stabilizer_audit(&c, a.ext)?;
            let stab: Vec<String> = stab.iter().map(|d| po.jacobian().format_divisor(d)).collect();
            let mut text = format!("{} configurations realizing {}\n", confs.len(), a.string);
            for x in &confs {
                let pts: Vec<String> = x.points.iter().map(|p| p.to_string()).collect();
                let _ = writeln!(text, "{} -> {}", x.base, pts.join(" "));
            }
            let _ = writeln!(text, "signature: {}\nsignature hash: {}", sig, sig.hash());
            let _ = writeln!(
                text,
                "audit: {} violations, {} equality cases; stabilizer of order {}",
                audit.violations.len(),
                audit.equality_cases.len(),
                stab.len()
            );
            Ok(Output {
                args: normalized(a, &[("curve", &c)]),
                result: json!({
                    "string": string.entries(),
                    "count": confs.len(),
                    "configurations": to_value(&confs),
                    "signature": { "text": sig.to_string(), "hash": sig.hash() },
                    "audit": to_value(&audit),
                    "stabilizer": stab,
                }),
                text,
                not_proven: false,
            })
        }
        Command::Tower(a) => {
            let c = curve(&a.curve)?;
            let rep = recon::tower_report_capped(&c, a.depth, a.ell, ctx.cap)?;
            let mut text = format!("tower over F_{} with l = {}\n", rep.q, rep.ell);
            for l in &rep.levels {
                let _ = write!(text, "degree {}: v = {}", l.degree, l.valuation);
                if let Some(j) = l.jump {
                    let _ = write!(text, ", jump {j}");
                }
                if let Some(eq) = l.jump_equals_2g {
                    let _ = write!(text, " (J[l] rational, jump = 2g: {eq})");
                }
                text.push('\n');
            }
            Ok(Output {
                args: normalized(a, &[("curve", &c)]),
                result: to_value(&rep),
                text,
                not_proven: false,
            })
        }
        Command::Cminus(a) => {
            let c = curve(&a.curve)?;
            let rep = recon::c_minus_set_capped(&c, ctx.cap)?;
            let pts: Vec<String> = rep.members.iter().map(|p| p.to_string()).collect();
            let text = format!(
                "#C(k1)^- = {} (q = {}, deviation {}, bound {:.3}, paths agree: {})\n{}\n",
                rep.size,
                rep.q,
                rep.deviation,
                rep.bound,
                rep.paths_agree,
                pts.join(" ")
            );
            Ok(Output {
                args: normalized(a, &[("curve", &c)]),
                result: to_value(&rep),
                text,
                not_proven: false,
            })
        }
        Command::Generate(a) => {
            let c = curve(&a.curve)?;
            let exclusion = match a.exclude.trim() {
                "cminus" => Exclusion::CMinus,
                "none" => Exclusion::Points(Vec::new()),
                list => {
                    let k = c.extension(2)?.field;
                    let pts = list
                        .split(';')
                        .map(|s| parse_point(&k, s))
                        .collect::<Result<Vec<_>, _>>()?;
                    Exclusion::Points(pts)
                }
            };
            let rep = recon::generation_check_capped(&c, &exclusion, ctx.cap)?;
            let text = format!(
                "index {} (|H| = {}, #J(k1) = {}), epsilon {:.4}, bound {:.3}, within bound: {}\n",
                rep.index,
                rep.subgroup_order,
                rep.group_order,
                rep.epsilon,
                rep.bound,
                match rep.within_bound {
                    Some(b) => b.to_string(),
                    None => "not checked".into(),
                }
            );
            Ok(Output {
                args: normalized(a, &[("curve", &c)]),
                result: to_value(&rep),
                text,
                not_proven: false,
            })
        }
        Command::Group(a) => {
            let (table, args) = match (&a.curve, &a.load) {
                (_, Some(path)) => {
                    let text = std::fs::read_to_string(path)?;
                    (JacobianGroupTable::from_text(&text)?, to_value(a))
                }
                (Some(spec), None) => {
                    let c = curve(spec)?;
                    let t = enumerate_jacobian_capped(&c, a.ext, ctx.cap)?;
                    let args = normalized(a, &[("curve", &c)]);
                    (t, args)
                }
                (None, None) => return Err(Failure::Usage("--curve or --load is required".into())),
            };
            if let Some(path) = &a.save {
                std::fs::write(path, table.to_text())?;
            }
            let jac = table.jacobian();
            let structure = table.group_structure();
            let shape: Vec<String> = structure.iter().map(|n| format!("Z/{n}")).collect();
            let mut text = format!(
                "J over F_{}: order {}, structure {}\n",
                jac.field().q(),
                table.order(),
                if shape.is_empty() { "trivial".into() } else { shape.join(" x ") }
            );
            let elements: Option<Vec<String>> =
                a.list.then(|| table.elements().map(|d| jac.format_divisor(&d)).collect());
            if let Some(e) = &elements {
                for s in e {
                    let _ = writeln!(text, "{s}");
                }
            }
            let mut result = json!({
                "curve": jac.curve().spec(),
                "ext": jac.degree(),
                "order": table.order(),
                "structure": structure,
            });
            if let Some(e) = elements {
                result["elements"] = to_value(&e);
            }
            Ok(Output {
                args,
                result,
                text,
                not_proven: false,
            })
        }
        Command::Scan(a) => scan(a, ctx),
    }
}

const CSV_HEADER: [&str; 8] = ["curve", "p", "m", "charpoly", "F1", "F2", "signature_hash", "violations"];

fn scan(a: &crate::ScanArgs, ctx: &Context) -> Result<Output, Failure> {
    let curves = match (&a.p, &a.curves) {
        (_, Some(path)) => std::fs::read_to_string(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(curve)
            .collect::<Result<Vec<_>, _>>()?,
        (Some(p), None) => configs::odd_models(*p, a.genus)?,
        (None, None) => return Err(Failure::Usage("--p or --curves is required".into())),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = a.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Failure::Usage(e.to_string()))?;
    let rows = pool.install(|| configs::scan(&curves, a.mmax, a.order_cap, a.dedup, ctx.cap))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in &rows {
        let charpoly: Vec<String> = r.charpoly.iter().map(|c| c.to_string()).collect();
        w.write_record([
            r.curve.clone(),
            r.p.to_string(),
            r.m.to_string(),
            charpoly.join(" "),
            r.f1.to_string(),
            r.f2.to_string(),
            r.signature_hash.clone(),
            r.violations.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    let csv_text = String::from_utf8(bytes).expect("csv output is utf-8");
    let violations: usize = rows.iter().map(|r| r.violations).sum();
    let text = match &a.out {
        Some(path) => {
            std::fs::write(path, &csv_text)?;
            String::new()
        }
        None if ctx.json => String::new(),
        None => csv_text,
    };
    Ok(Output {
        args: to_value(a),
        result: json!({
            "curves": curves.len(),
            "rows": to_value(&rows),
            "violations": violations,
        }),
        text,
        not_proven: false,
    })
}
