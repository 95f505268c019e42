use std::fmt::Write as _;
use std::path::PathBuf;

use fermat_cubic::correspondence::{self, CorrespondenceError, FermatSolution, QPointImage};
use fermat_cubic::curve::{self, CurveError};
use fermat_cubic::pipeline::{self, PipelineError, PipelineReport, Verdict};
use fermat_cubic::quad::{self, QuadError};
use fermat_cubic::reference::{self, Comparison, ReferenceEntry, ReferenceError, RemoteCache};
use fermat_cubic::{CurvePoint, MordellCurve, QuadElem, QuadField, Rational, SearchBounds};
use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use crate::output::{self, string, CliError, Report, EXIT_VERIFICATION};
use crate::{CurveKind, Direction, OperandList};

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::Parse(_) | QuadError::FieldMismatch(..) => CliError::usage(e.to_string()),
            QuadError::NotOnVariety => CliError::verification(e.to_string()),
            _ => CliError::precondition(e.to_string()),
        }
    }
}

impl From<quad::ParseError> for CliError {
    fn from(e: quad::ParseError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::NotOnCurve(_) | CurveError::NonIntegralImage { .. } => CliError::verification(e.to_string()),
            CurveError::FieldMismatch { .. } => CliError::usage(e.to_string()),
            _ => CliError::precondition(e.to_string()),
        }
    }
}

impl From<CorrespondenceError> for CliError {
    fn from(e: CorrespondenceError) -> Self {
        use CorrespondenceError as E;
        match e {
            E::Curve(c) => c.into(),
            E::Quad(q) => q.into(),
            E::NotOnVariety(_) | E::UnexpectedShape(_) | E::UnexpectedTrivial(_) => {
                CliError::verification(e.to_string())
            }
            E::InvalidK(_) | E::SumZero | E::ProductZeroWithNontrivialK(_) | E::PointAtInfinity | E::ExcludedD(_) => {
                CliError::precondition(e.to_string())
            }
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Correspondence(c) => c.into(),
            PipelineError::Curve(c) => c.into(),
            PipelineError::WitnessCheck(_) => CliError::verification(e.to_string()),
            PipelineError::Search(_) => CliError::usage(e.to_string()),
            PipelineError::ZeroD | PipelineError::NonPositiveK(_) | PipelineError::RationalField { .. } => {
                CliError::precondition(e.to_string())
            }
        }
    }
}

fn field(d: &BigInt) -> Result<QuadField, CliError> {
    QuadField::new(d).map_err(|_| {
        CliError::precondition(format!("d = {d} does not define a quadratic field (its squarefree part is 0 or 1)"))
    })
}

fn cubefree_k(k: &BigInt) -> Result<(), CliError> {
    if *k < BigInt::one() || !fermat_cubic::arith::is_cubefree(k) {
        return Err(CliError::precondition(format!("k = {k} must be a positive cubefree integer")));
    }
    Ok(())
}

fn parse_elem(field: &QuadField, text: &str) -> Result<QuadElem, CliError> {
    Ok(field.parse(text)?)
}

fn parse_rational(text: &str) -> Result<Rational, CliError> {
    Ok(quad::parse_rational(text)?)
}

fn parse_triple(field: &QuadField, values: &[String; 3]) -> Result<[QuadElem; 3], CliError> {
    Ok([
        parse_elem(field, &values[0])?,
        parse_elem(field, &values[1])?,
        parse_elem(field, &values[2])?,
    ])
}

fn expect_point(operands: &OperandList) -> Result<(&str, &str), CliError> {
    match operands {
        OperandList::Point(x, y) => Ok((x, y)),
        OperandList::Triple(_) => Err(CliError::usage("this direction takes a point `x y` or --x/--y")),
    }
}

fn expect_triple(operands: &OperandList) -> Result<&[String; 3], CliError> {
    match operands {
        OperandList::Triple(t) => Ok(t),
        OperandList::Point(..) => Err(CliError::usage("this direction takes a triple `x y z`")),
    }
}

fn equation(d: &BigInt, k: &BigInt) -> String {
    if k.is_one() {
        format!("x^3 + y^3 = z^3 over Q(sqrt({d}))")
    } else {
        format!("x^3 + y^3 = {k} z^3 over Q(sqrt({d}))")
    }
}

fn reference_json(entry: &ReferenceEntry) -> Value {
    json!({
        "d": string(entry.d),
        "k": string(entry.k),
        "label": entry.label,
        "reduced_coefficient": string(entry.reduced_coefficient),
        "rank": string(entry.rank),
        "torsion": string(entry.torsion),
        "conclusion": entry.conclusion,
    })
}

fn reference_text(entry: &ReferenceEntry) -> String {
    format!(
        "{}: d = {}, k = {}, y^2 = x^3 + ({}), rank {}, torsion {}, {}",
        entry.label, entry.d, entry.k, entry.reduced_coefficient, entry.rank, entry.torsion, entry.conclusion
    )
}

pub fn classify(d: &BigInt, k: &BigInt) -> Result<Report, CliError> {
    let input = pipeline::normalize(d, k)?;
    if input.d.is_one() && !input.k.is_one() {
        return Err(PipelineError::RationalField { d: d.clone() }.into());
    }
    let diag = pipeline::diagnostics(&input.d, &input.k)?;
    let coefficient = pipeline::fermat_coefficient(&input.d, &input.k);
    let entry = reference::lookup(&input.d, &input.k);

    let mut text = String::new();
    writeln!(text, "d = {}, k = {}", input.d, input.k).unwrap();
    writeln!(text, "curve: y^2 = x^3 + ({coefficient}) over Q").unwrap();
    writeln!(text, "torsion: {}", diag.torsion).unwrap();
    writeln!(text, "root number: {}", diag.root_number.w).unwrap();
    writeln!(text, "  {}", output::root_number_text(&diag.root_number)).unwrap();
    match diag.root_number_shortcut {
        Some(w) => writeln!(text, "root number (d mod 3 shortcut): {w}").unwrap(),
        None => writeln!(text, "root number (d mod 3 shortcut): not applicable").unwrap(),
    }
    writeln!(text, "criterion |d| mod 9 in {{2, 5, 6, 8}}: {}", diag.criterion).unwrap();
    if let Some(entry) = entry {
        writeln!(text, "reference: {}", reference_text(entry)).unwrap();
    }
    for note in &diag.notes {
        writeln!(text, "note: {note}").unwrap();
    }

    let body = json!({
        "input": { "d": string(d), "k": string(k) },
        "normalized": {
            "d": string(&input.d),
            "k": string(&input.k),
            "k_cube_root": string(&input.k_cube_root),
        },
        "coefficient": string(&coefficient),
        "torsion": string(diag.torsion),
        "root_number": output::root_number(&diag.root_number),
        "root_number_shortcut": diag.root_number_shortcut.map(string),
        "criterion": diag.criterion,
        "reference": entry.map(reference_json),
        "notes": diag.notes,
    });
    Ok(Report::ok(text, body))
}

pub fn solve(d: &BigInt, k: &BigInt, max_denom: u64, max_height: u64) -> Result<Report, CliError> {
    let bounds = SearchBounds::new(max_denom, max_height).map_err(|e| CliError::usage(e.to_string()))?;
    let report = pipeline::full_pipeline(d, k, &bounds)?;
    Ok(render_solve(&report))
}

fn render_solve(report: &PipelineReport) -> Report {
    let input = &report.input;
    let diag = &report.diagnostics;
    let mut text = String::new();
    writeln!(text, "equation: {}", equation(&input.d, &input.k)).unwrap();
    writeln!(text, "curve: y^2 = x^3 + ({}) over Q", report.coefficient).unwrap();
    if matches!(report.verdict, Verdict::TrivialOnlyKnown(_)) {
        writeln!(text, "search: not run").unwrap();
    } else {
        writeln!(
            text,
            "search: e <= {}, |x| <= {}, {} point(s) examined",
            report.bounds.max_denominator(),
            report.bounds.max_height(),
            report.points_examined
        )
        .unwrap();
    }
    writeln!(text, "verdict: {}", report.verdict).unwrap();

    let verdict = match &report.verdict {
        Verdict::ProvenNontrivial(w) => {
            writeln!(text, "Q-point: {}", w.qpoint).unwrap();
            writeln!(text, "K-point: {}", w.kpoint).unwrap();
            writeln!(text, "solution: {}", w.solution).unwrap();
            writeln!(text, "witness: {}", w.integral).unwrap();
            writeln!(text, "scale: {}", w.scale).unwrap();
            let mut witness = json!({
                "qpoint": output::point(&w.qpoint),
                "kpoint": output::point(&w.kpoint),
                "solution": output::triple(&w.solution),
                "integral": output::triple(&w.integral),
                "scale": string(&w.scale),
                "induced_qpoint": output::point(&w.induced_qpoint),
            });
            if !input.k_cube_root.is_one() {
                let [x, y, z] = &w.original_k_triple;
                writeln!(text, "witness for k = {}: ({x}, {y}, {z})", input.k_input).unwrap();
                witness["original_k"] = json!({
                    "k": string(&input.k_input),
                    "triple": [string(x), string(y), string(z)],
                });
            }
            json!({ "kind": report.verdict.name(), "witness": witness })
        }
        Verdict::TrivialOnlyKnown(entry) => {
            writeln!(text, "reference: {}", reference_text(entry)).unwrap();
            json!({ "kind": report.verdict.name(), "reference": reference_json(entry) })
        }
        Verdict::ExpectedNontrivialBsd | Verdict::Unknown => json!({ "kind": report.verdict.name() }),
    };
    writeln!(text, "torsion: {}", diag.torsion).unwrap();
    writeln!(text, "root number: {}", diag.root_number.w).unwrap();
    writeln!(text, "criterion: {}", diag.criterion).unwrap();
    for note in &diag.notes {
        writeln!(text, "note: {note}").unwrap();
    }

    let body = json!({
        "input": { "d": string(&input.d_input), "k": string(&input.k_input) },
        "normalized": {
            "d": string(&input.d),
            "k": string(&input.k),
            "k_cube_root": string(&input.k_cube_root),
        },
        "coefficient": string(&report.coefficient),
        "bounds": {
            "max_denominator": string(report.bounds.max_denominator()),
            "max_height": string(report.bounds.max_height()),
        },
        "points_examined": string(report.points_examined),
        "verdict": verdict,
        "diagnostics": {
            "torsion": string(diag.torsion),
            "root_number": output::root_number(&diag.root_number),
            "root_number_shortcut": diag.root_number_shortcut.map(string),
            "criterion": diag.criterion,
            "notes": diag.notes,
        },
    });
    Report::ok(text, body)
}

pub fn transform(d: &BigInt, k: &BigInt, direction: Direction, operands: &OperandList) -> Result<Report, CliError> {
    let field = field(d)?;
    cubefree_k(k)?;
    let name = direction_name(direction);
    let (text, image) = match direction {
        Direction::SolToKpoint => {
            let [x, y, z] = parse_triple(&field, expect_triple(operands)?)?;
            let solution = FermatSolution::new(x, y, z, k.clone())?;
            let p = correspondence::solution_to_kpoint(&solution)?;
            check_on_curve(&MordellCurve::fermat_k_curve(&field, k)?, &p)?;
            (p.to_string(), output::point(&p))
        }
        Direction::KpointToSol => {
            let (x, y) = expect_point(operands)?;
            let p = CurvePoint::affine(parse_elem(&field, x)?, parse_elem(&field, y)?);
            let s = correspondence::kpoint_to_solution(&p, k)?;
            (s.to_string(), output::triple(&s))
        }
        Direction::KpointToQpoint => {
            let (x, y) = expect_point(operands)?;
            let p = CurvePoint::affine(parse_elem(&field, x)?, parse_elem(&field, y)?);
            match correspondence::kpoint_to_qpoint(&p, k)? {
                QPointImage::Point(q) => {
                    check_on_curve(&MordellCurve::fermat_q_curve(field.d(), k)?, &q)?;
                    (q.to_string(), output::point(&q))
                }
                QPointImage::SigmaInvariant(_) => {
                    return Err(CliError::precondition(format!(
                        "{p} is fixed by conjugation, so P - sigma(P) is the point at infinity and has no image"
                    )))
                }
            }
        }
        Direction::QpointToKpoint => {
            let (x, y) = expect_point(operands)?;
            let q = CurvePoint::affine(parse_rational(x)?, parse_rational(y)?);
            let p = correspondence::qpoint_to_kpoint(&q, &field, k)?;
            check_on_curve(&MordellCurve::fermat_k_curve(&field, k)?, &p)?;
            (p.to_string(), output::point(&p))
        }
        Direction::QpointToSol => {
            let (x, y) = expect_point(operands)?;
            let q = CurvePoint::affine(parse_rational(x)?, parse_rational(y)?);
            let s = correspondence::qpoint_to_solution(&q, &field, k)?;
            (s.to_string(), output::triple(&s))
        }
    };
    let body = json!({
        "d": string(field.d()),
        "k": string(k),
        "direction": name,
        "image": image,
        "verified": true,
    });
    Ok(Report::ok(format!("{text}\n"), body))
}

fn direction_name(direction: Direction) -> &'static str {
    match direction {
        Direction::SolToKpoint => "sol-to-kpoint",
        Direction::KpointToSol => "kpoint-to-sol",
        Direction::KpointToQpoint => "kpoint-to-qpoint",
        Direction::QpointToKpoint => "qpoint-to-kpoint",
        Direction::QpointToSol => "qpoint-to-sol",
    }
}

fn check_on_curve<F>(curve: &MordellCurve, p: &CurvePoint<F>) -> Result<(), CliError>
where
    F: curve::Coordinate + std::fmt::Display,
{
    if curve.contains(p)? {
        Ok(())
    } else {
        Err(CliError::verification(format!("image {p} is not on the curve")))
    }
}

pub fn verify(d: &BigInt, k: &BigInt, operands: &OperandList, curve_kind: CurveKind) -> Result<Report, CliError> {
    let field = field(d)?;
    match operands {
        OperandList::Triple(values) => verify_solution(&field, k, values),
        OperandList::Point(x, y) => match curve_kind {
            CurveKind::Q => {
                let p = CurvePoint::affine(parse_rational(x)?, parse_rational(y)?);
                let curve = MordellCurve::fermat_q_curve(field.d(), k)?;
                verify_point(&field, k, &curve, &p, "q", 12)
            }
            CurveKind::K => {
                let p = CurvePoint::affine(parse_elem(&field, x)?, parse_elem(&field, y)?);
                let curve = MordellCurve::fermat_k_curve(&field, k)?;
                verify_point(&field, k, &curve, &p, "k", 18)
            }
        },
    }
}

fn verify_solution(field: &QuadField, k: &BigInt, values: &[String; 3]) -> Result<Report, CliError> {
    cubefree_k(k)?;
    let [x, y, z] = parse_triple(field, values)?;
    let head = format!("({x}, {y}, {z}) on {}", equation(field.d(), k));
    let mut body = json!({
        "d": string(field.d()),
        "k": string(k),
        "object": "solution",
        "triple": [string(&x), string(&y), string(&z)],
    });
    match FermatSolution::new(x, y, z, k.clone()) {
        Ok(s) => {
            let class = correspondence::classify_solution(&s)?;
            body["valid"] = true.into();
            body["classification"] = string(class);
            body["trivial"] = class.is_trivial().into();
            body["integral"] = s.is_integral().into();
            let suffix = if class.is_trivial() { " (trivial)" } else { "" };
            Ok(Report::ok(format!("{head}: valid, {class}{suffix}\n"), body))
        }
        Err(CorrespondenceError::NotOnVariety(_)) => {
            let [x, y, z] = parse_triple(field, values)?;
            let defect = quad::fermat_defect(&x, &y, &z, k);
            body["valid"] = false.into();
            body["defect"] = string(&defect);
            Ok(Report::with_code(
                EXIT_VERIFICATION,
                format!("{head}: invalid, x^3 + y^3 - k z^3 = {defect}\n"),
                body,
            ))
        }
        Err(e) => Err(e.into()),
    }
}

fn verify_point<F>(
    field: &QuadField,
    k: &BigInt,
    curve: &MordellCurve,
    p: &CurvePoint<F>,
    kind: &str,
    order_bound: u32,
) -> Result<Report, CliError>
where
    F: curve::Coordinate + std::fmt::Display,
{
    let head = format!("{p} on y^2 = x^3 + ({})", curve.coefficient());
    let mut body = json!({
        "d": string(field.d()),
        "k": string(k),
        "object": "point",
        "curve": kind,
        "coefficient": string(curve.coefficient()),
        "point": output::point(p),
    });
    if !curve.contains(p)? {
        body["valid"] = false.into();
        return Ok(Report::with_code(EXIT_VERIFICATION, format!("{head}: invalid\n"), body));
    }
    body["valid"] = true.into();
    // torsion orders over Q and over quadratic fields are bounded by 12 and 18
    let order = curve.order_up_to(p, order_bound)?;
    let order_text = order.map_or_else(|| "infinite".to_string(), |n| n.to_string());
    body["order"] = order_text.clone().into();
    Ok(Report::ok(format!("{head}: valid, order {order_text}\n"), body))
}

pub fn clear_denominators(d: &BigInt, k: &BigInt, values: &[String]) -> Result<Report, CliError> {
    let field = field(d)?;
    let values: &[String; 3] = values
        .try_into()
        .map_err(|_| CliError::usage("expected a triple `x y z`"))?;
    let [x, y, z] = parse_triple(&field, values)?;
    if !quad::satisfies_fermat(&x, &y, &z, k) {
        return Err(CliError::verification(format!(
            "({x}, {y}, {z}) does not satisfy {}",
            equation(field.d(), k)
        )));
    }
    let (scale, [x, y, z]) = quad::clear_denominators(&x, &y, &z, k)?;
    let integral = [&x, &y, &z].iter().all(|c| c.is_integral());
    let body = json!({
        "d": string(field.d()),
        "k": string(k),
        "scale": string(&scale),
        "triple": [string(&x), string(&y), string(&z)],
        "integral": integral,
        "verified": quad::satisfies_fermat(&x, &y, &z, k),
    });
    Ok(Report::ok(format!("scale {scale}: ({x}, {y}, {z})\n"), body))
}

pub fn reference(
    d: Option<&BigInt>,
    k: Option<&BigInt>,
    label: Option<&str>,
    online: bool,
    cache: Option<PathBuf>,
) -> Result<Report, CliError> {
    let selected: Vec<&'static ReferenceEntry> = match (label, d) {
        (Some(label), _) => match reference::lookup_label(label) {
            Some(e) => vec![e],
            None if online => Vec::new(),
            None => return Err(CliError::precondition(format!("no embedded entry for label {label}"))),
        },
        (None, Some(d)) => {
            let one = BigInt::one();
            let input = pipeline::normalize(d, k.unwrap_or(&one))?;
            match reference::lookup(&input.d, &input.k) {
                Some(e) => vec![e],
                None => {
                    return Err(CliError::precondition(format!(
                        "no embedded entry for d = {}, k = {}",
                        input.d, input.k
                    )))
                }
            }
        }
        (None, None) => reference::entries().iter().collect(),
    };

    let mut text = String::new();
    let mut entries = Vec::new();
    let mut code = output::EXIT_OK;
    let cache = online.then(|| cache.or_else(default_cache_path).map(RemoteCache::new)).flatten();

    for entry in &selected {
        writeln!(text, "{}", reference_text(entry)).unwrap();
        let mut value = reference_json(entry);
        if online {
            match reference::fetch_remote(entry.label, cache.as_ref()) {
                Ok(remote) => {
                    let cmp = Comparison::new(entry, remote);
                    if !cmp.agrees() {
                        code = EXIT_VERIFICATION;
                    }
                    writeln!(
                        text,
                        "  remote: rank {}, torsion {} ({})",
                        cmp.remote.rank,
                        cmp.remote.torsion,
                        if cmp.agrees() { "agrees" } else { "MISMATCH; embedded data kept" }
                    )
                    .unwrap();
                    value["remote"] = remote_json(&cmp);
                }
                Err(e) => {
                    writeln!(text, "  remote: unavailable ({e}); embedded data stands").unwrap();
                    value["remote"] = json!({ "error": e.to_string() });
                }
            }
        }
        entries.push(value);
    }

    // a label outside the table can still be looked up remotely
    let mut unlisted = Value::Null;
    if let (Some(label), true, true) = (label, online, selected.is_empty()) {
        match reference::fetch_remote(label, cache.as_ref()) {
            Ok(r) => {
                writeln!(text, "{label}: not embedded; remote rank {}, torsion {}", r.rank, r.torsion).unwrap();
                unlisted = json!({
                    "label": label,
                    "rank": string(r.rank),
                    "torsion": string(r.torsion),
                    "fetched_at": string(r.fetched_at),
                });
            }
            Err(ReferenceError::NotFound(_)) => {
                return Err(CliError::precondition(format!("label {label} not found remotely")))
            }
            Err(e) => return Err(CliError::precondition(format!("remote lookup for {label} failed: {e}"))),
        }
    }

    let mut body = json!({ "entries": entries, "online": online });
    if !unlisted.is_null() {
        body["unlisted"] = unlisted;
    }
    Ok(Report::with_code(code, text, body))
}

fn remote_json(cmp: &Comparison) -> Value {
    json!({
        "rank": string(cmp.remote.rank),
        "torsion": string(cmp.remote.torsion),
        "fetched_at": string(cmp.remote.fetched_at),
        "rank_matches": cmp.rank_matches,
        "torsion_matches": cmp.torsion_matches,
    })
}

fn default_cache_path() -> Option<PathBuf> {
    if let Some(path) = std::env::var_os("FERMAT_CUBIC_CACHE") {
        return Some(PathBuf::from(path));
    }
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
    Some(base.join("fermat-cubic").join("lmfdb.json"))
}
