mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tv_core::bounds::{self, BoundConfig, BoundReport, Params, PrescribedPlace};
use tv_core::construct::{self, LocalPlan, SearchCaps, TowerPlan};
use tv_core::extensions::{census_row, CensusRow, Step};
use tv_core::places::{self, count_places_degree, enumerate_places, weil_floor};
use tv_core::towers::{self, FieldCase, PhiVector, Tower};
use tv_core::{Error, ExtensionSpec, Place, PlaceSet};

use report::{emit_report, Format, Report};

#[derive(Parser)]
#[command(name = "tv", version, about = "Places, cyclic extensions, towers and effective bounds for global fields")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// JSON file of bound constants.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for censuses; the output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count, list and measure places of F_r(t).
    Places(PlacesArgs),
    /// Genus, ramification, decomposition and census of one cyclic step.
    Extension(ExtensionArgs),
    /// Build a tower of steps and count places in it.
    Tower(TowerArgs),
    /// Finite-level invariants, fundamental inequality and defect.
    Invariants(InvariantsArgs),
    /// Evaluate an effective bound: `--case NAME --key value ...`.
    Bounds(BoundsArgs),
    /// Verified constructions.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Prime-counting utilities.
    Primes(PrimesArgs),
}

#[derive(Args)]
struct PlacesArgs {
    #[arg(long = "r")]
    r: Option<u32>,
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Include the places themselves.
    #[arg(long)]
    list: bool,
    /// Genus for the Weil lower bound.
    #[arg(long, default_value_t = 0)]
    genus: u64,
    /// Report pi, pi', a_S and |S| for a `;`-separated place set instead.
    #[arg(long)]
    stats: Option<String>,
}

#[derive(Args)]
struct ExtensionArgs {
    /// `kummer,l,f,GF(r)`, `as,u,GF(r)` or a JSON spec record.
    #[arg(long)]
    spec: String,
    /// Places to decompose.
    #[arg(long = "place")]
    places: Vec<String>,
    /// Census of all base places of degree <= D.
    #[arg(long)]
    census: Option<u32>,
}

#[derive(Args)]
struct TowerSource {
    #[arg(long = "r")]
    r: Option<u32>,
    /// Base places whose fibers are tracked.
    #[arg(long, default_value = "")]
    track: String,
    /// Steps in order; each generator is written in its level's parameter `t`.
    #[arg(long = "spec")]
    specs: Vec<String>,
    /// Tower JSON as printed by `tv tower`.
    #[arg(long)]
    from: Option<PathBuf>,
}

#[derive(Args)]
struct TowerArgs {
    #[command(flatten)]
    src: TowerSource,
    /// Count places of norm r^m above base places of degree <= D.
    #[arg(long)]
    counts: Option<u32>,
    #[arg(long)]
    level: Option<usize>,
}

#[derive(Args)]
struct InvariantsArgs {
    #[command(flatten)]
    src: TowerSource,
    #[arg(long = "d-max", default_value_t = 4)]
    d_max: u32,
    /// Explicit invariants `q=value;q=value`.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long = "case", default_value = "CF")]
    case: String,
    #[arg(long = "phi-r", default_value_t = 0.0)]
    phi_r: f64,
    #[arg(long = "phi-c", default_value_t = 0.0)]
    phi_c: f64,
    /// Evaluate the truncated zeta product at this `s` instead.
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long = "q-cut", default_value_t = 1_000_000)]
    q_cut: u64,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0..)]
    args: Vec<String>,
}

#[derive(Args)]
struct CapsArgs {
    #[arg(long = "generator-degree")]
    generator_degree: Option<u32>,
    #[arg(long = "place-degree")]
    place_degree: Option<u32>,
    #[arg(long = "max-candidates")]
    max_candidates: Option<u64>,
}

impl CapsArgs {
    fn caps(&self) -> SearchCaps {
        let d = SearchCaps::default();
        SearchCaps {
            generator_degree: self.generator_degree.unwrap_or(d.generator_degree),
            place_degree: self.place_degree.unwrap_or(d.place_degree),
            candidates: self.max_candidates.unwrap_or(d.candidates),
        }
    }
}

#[derive(Args)]
struct LocalArgs {
    #[arg(long = "r")]
    r: u32,
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long, default_value = "")]
    split: String,
    #[arg(long, default_value = "")]
    inert: String,
    /// Places where ramification may occur.
    #[arg(long)]
    allowed: Option<String>,
    #[command(flatten)]
    caps: CapsArgs,
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Artin–Schreier generator with prescribed split and inert places.
    As(LocalArgs),
    /// Kummer generator with prescribed split and inert places.
    Kummer(LocalArgs),
    /// Basis of the Kummer group V_S^T.
    Vgroup {
        #[arg(long = "r")]
        r: u32,
        #[arg(long)]
        ell: u32,
        #[arg(long = "T")]
        t: String,
        #[arg(long = "S", default_value = "")]
        s: String,
    },
    /// Annihilating set Q for V^P.
    Q {
        #[arg(long = "r")]
        r: u32,
        #[arg(long)]
        ell: u32,
        #[arg(long = "P")]
        p: String,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// Tower with prescribed norms: `--plan` JSON text or a path to it.
    Tower {
        #[arg(long)]
        plan: String,
        #[command(flatten)]
        caps: CapsArgs,
    },
}

#[derive(Args)]
struct PrimesArgs {
    /// theta, nth_prime, S_n, omega, omega_lcm or vartheta_ratio.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    arg: u64,
}

enum Fail {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        match e {
            Error::Parse(m) => Fail::Usage(m),
            e => Fail::Domain(e),
        }
    }
}

type Out = Result<Report, Fail>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Fail> {
    Err(Fail::Usage(msg.into()))
}

fn read_text(s: &str) -> Result<String, Fail> {
    if s.trim_start().starts_with('{') {
        return Ok(s.to_string());
    }
    std::fs::read_to_string(s).or_else(|e| usage(format!("cannot read {s}: {e}")))
}

// places may omit their `@GF(r)` suffix when r is known
fn place_set(s: &str, r: Option<u32>) -> Result<PlaceSet, Fail> {
    let parts: Vec<String> = s
        .split(';')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| match r {
            Some(r) if !x.contains('@') => format!("{x}@GF({r})"),
            _ => x.to_string(),
        })
        .collect();
    Ok(parts.join(";").parse::<PlaceSet>()?)
}

fn parse_spec(s: &str) -> Result<ExtensionSpec, Fail> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).or_else(|e| usage(format!("bad spec record: {e}")));
    }
    Ok(s.parse()?)
}

fn places(a: &PlacesArgs) -> Out {
    if let Some(s) = &a.stats {
        let set = place_set(s, a.r)?;
        return Ok(Report::new(&places::place_set_stats(set.places())?));
    }
    let Some(r) = a.r else { return usage("--r is required") };
    let count = count_places_degree(r, a.d)?;
    // sum of e N_e over finite places only, which is r^d
    let mut sum = 0u128;
    for e in (1..=a.d).filter(|e| a.d % e == 0) {
        sum += e as u128 * count_places_degree(r, e)?;
    }
    sum -= 1;
    let mut out = json!({
        "r": r,
        "d": a.d,
        "count": count.to_string().parse::<u64>().map_err(|_| Error::Cap("count exceeds u64".into()))?,
        "genus": a.genus,
        "weil_floor": weil_floor(r, a.genus, a.d),
        "finite_degree_sum": sum as f64,
    });
    let mut rep_rows = Vec::new();
    if a.list {
        let ps = enumerate_places(r, a.d)?;
        rep_rows = ps.iter().map(|p| format!("{p},{}", p.degree())).collect();
        out["places"] = json!(ps);
    }
    let rep = Report::new(&out);
    Ok(if a.list {
        rep.with_csv("place,degree", rep_rows)
    } else {
        let row = format!("{r},{},{count},{}", a.d, weil_floor(r, a.genus, a.d));
        rep.with_csv("r,d,count,weil_floor", vec![row])
    })
}

fn census(step: &Step, d_max: u32, jobs: usize) -> Result<BTreeMap<u32, CensusRow>, Fail> {
    let degrees: Vec<u32> = (1..=d_max).collect();
    let jobs = jobs.clamp(1, degrees.len().max(1));
    let mut out = BTreeMap::new();
    let results: Vec<Result<(u32, CensusRow), Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let mine: Vec<u32> = degrees.iter().copied().skip(j).step_by(jobs).collect();
                s.spawn(move || mine.into_iter().map(|d| census_row(step, d).map(|row| (d, row))).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("census worker")).collect()
    });
    for r in results {
        let (d, row) = r?;
        out.insert(d, row);
    }
    Ok(out)
}

fn extension(a: &ExtensionArgs, jobs: usize) -> Out {
    let spec = parse_spec(&a.spec)?;
    let step = Step::new(&spec)?;
    let mut out = json!({
        "spec": spec,
        "degree": step.degree(),
        "genus": step.genus(),
        "ramified": step.ramified().iter().map(|(p, e)| json!({"place": p, "exponent": e})).collect::<Vec<_>>(),
    });
    if !a.places.is_empty() {
        let mut rows = Vec::new();
        for s in &a.places {
            let p: Place = if s.contains('@') { s.parse()? } else { format!("{s}@GF({})", spec.r).parse()? };
            let dt = step.decompose(&p)?;
            rows.push(json!({
                "place": p,
                "e": dt.e,
                "f": dt.f,
                "g": dt.g,
                "behaviour": dt.behaviour(),
                "frobenius": step.frobenius_class(&p)?,
            }));
        }
        out["places"] = json!(rows);
    }
    let mut csv_rows = None;
    if let Some(d) = a.census {
        let c = census(&step, d, jobs)?;
        let total = c.values().fold(CensusRow::default(), |t, r| CensusRow {
            split: t.split + r.split,
            inert: t.inert + r.inert,
            ramified: t.ramified + r.ramified,
        });
        out["census"] = json!(c
            .iter()
            .map(|(d, r)| json!({"degree": d, "split": r.split, "inert": r.inert, "ramified": r.ramified}))
            .collect::<Vec<_>>());
        out["split"] = json!(total.split);
        out["inert"] = json!(total.inert);
        out["ramified"] = json!(total.ramified);
        csv_rows = Some(c.iter().map(|(d, r)| format!("{d},{},{},{}", r.split, r.inert, r.ramified)).collect());
    }
    let rep = Report::new(&out);
    Ok(match csv_rows {
        Some(rows) => rep.with_csv("degree,split,inert,ramified", rows),
        None => rep,
    })
}

fn load_tower(src: &TowerSource) -> Result<Tower, Fail> {
    if let Some(path) = &src.from {
        if src.r.is_some() || !src.specs.is_empty() {
            return usage("--from excludes --r and --spec");
        }
        let text = std::fs::read_to_string(path).or_else(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        return serde_json::from_str(&text).or_else(|e| Err(Fail::Domain(Error::Invalid(format!("bad tower: {e}")))));
    }
    let specs: Vec<ExtensionSpec> =
        src.specs.iter().enumerate().map(|(i, s)| parse_spec(s).map(|x| x.at_level(i))).collect::<Result<_, _>>()?;
    let r = match (src.r, specs.first()) {
        (Some(r), _) => r,
        (None, Some(s)) => s.r,
        (None, None) => return usage("--r, --spec or --from is required"),
    };
    let tracked = place_set(&src.track, Some(r))?;
    Ok(Tower::from_specs(r, tracked, &specs)?)
}

fn tower(a: &TowerArgs) -> Out {
    let t = load_tower(&a.src)?;
    let Some(d) = a.counts else { return Ok(Report::new(&t)) };
    let level = a.level.unwrap_or(t.height());
    let c = towers::phi_counts(&t, level, d)?;
    let mut rows: Vec<String> = c.phi_q.iter().map(|(q, n)| format!("*,{q},{n}")).collect();
    rows.extend(c.phi_pq.iter().map(|x| format!("{},{},{}", x.place, x.q, x.count)));
    Ok(Report::new(&c).with_csv("place,q,count", rows))
}

fn parse_phi(s: &str) -> Result<BTreeMap<u64, f64>, Fail> {
    let mut out = BTreeMap::new();
    for part in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
        let Some((q, v)) = part.split_once('=') else { return usage(format!("expected q=value, got `{part}`")) };
        let q: u64 = q.trim().parse().or_else(|_| usage(format!("bad q `{q}`")))?;
        let v: f64 = v.trim().parse().or_else(|_| usage(format!("bad value `{v}`")))?;
        out.insert(q, v);
    }
    Ok(out)
}

fn invariants(a: &InvariantsArgs) -> Out {
    let case: FieldCase = a.case.parse()?;
    let vector = match &a.phi {
        Some(s) => {
            let map = parse_phi(s)?;
            match case {
                FieldCase::Cf => {
                    let Some(r) = a.src.r else { return usage("--r is required for CF invariants") };
                    PhiVector::function_field(r, map)
                }
                _ => PhiVector::number_field(case, map, a.phi_r, a.phi_c),
            }
        }
        None => {
            let t = load_tower(&a.src)?;
            let est = towers::phi_estimates(&t, a.d_max)?;
            if a.zeta.is_none() {
                let defect = towers::fundamental_and_defect(&est.by_genus).ok();
                return Ok(Report::new(&json!({"estimates": est, "defect": defect})));
            }
            est.by_genus
        }
    };
    if let Some(s) = a.zeta {
        let z = towers::zeta_partial(&vector, s, a.q_cut)?;
        return Ok(Report::new(&json!({"s": s, "q_cut": a.q_cut, "zeta": z}))
            .with_csv("s,q_cut,zeta", vec![format!("{s},{},{z}", a.q_cut)]));
    }
    let rep = towers::fundamental_and_defect(&vector)?;
    let csv = rep.to_csv();
    let mut lines = csv.lines();
    let header = lines.next().unwrap_or_default().to_string();
    Ok(Report::new(&rep).with_csv(&header, lines.map(String::from).collect()))
}

const STRING_KEYS: [&str; 6] = ["case", "family", "group", "avoid", "field", "config"];

struct BoundArgs {
    strings: BTreeMap<String, Vec<String>>,
    params: Params,
    config: BoundConfig,
}

fn parse_bound_args(raw: &[String], config_path: Option<&PathBuf>, format: &mut Format) -> Result<BoundArgs, Fail> {
    let mut strings: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut numbers: BTreeMap<String, f64> = BTreeMap::new();
    let mut it = raw.iter();
    while let Some(k) = it.next() {
        let Some(key) = k.strip_prefix("--") else { return usage(format!("unexpected argument `{k}`")) };
        let Some(v) = it.next() else { return usage(format!("--{key} needs a value")) };
        if key == "format" {
            *format = match v.as_str() {
                "json" => Format::Json,
                "csv" => Format::Csv,
                "text" => Format::Text,
                _ => return usage(format!("unsupported format `{v}`")),
            };
        } else if STRING_KEYS.contains(&key) {
            strings.entry(key.into()).or_default().push(v.clone());
        } else {
            let x: f64 = v.parse().or_else(|_| usage(format!("--{key} needs a number, got `{v}`")))?;
            if numbers.insert(key.into(), x).is_some() {
                return usage(format!("--{key} given twice"));
            }
        }
    }
    let path = strings.get("config").and_then(|v| v.last()).map(PathBuf::from).or(config_path.cloned());
    let mut config = match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).or_else(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).or_else(|e| usage(format!("bad config: {e}")))?
        }
        None => BoundConfig::default(),
    };
    let mut params = Params::new();
    let recurrence = strings.get("case").is_some_and(|c| c.iter().any(|c| c == "recurrence"));
    for (k, v) in numbers {
        if BoundConfig::KEYS.contains(&k.as_str()) && !(recurrence && k == "c") {
            config.set(&k, v)?;
        } else {
            params = params.with(&k, v);
        }
    }
    Ok(BoundArgs { strings, params, config })
}

fn one<'a>(a: &'a BoundArgs, key: &str) -> Result<Option<&'a str>, Fail> {
    match a.strings.get(key).map(Vec::as_slice) {
        None => Ok(None),
        Some([v]) => Ok(Some(v)),
        Some(_) => usage(format!("--{key} given twice")),
    }
}

fn parse_case<T: serde::de::DeserializeOwned>(s: &str) -> Option<T> {
    serde_json::from_value(json!(s)).ok()
}

fn bound_report(r: BoundReport) -> Report {
    let row = r.csv_row();
    Report::new(&r).with_csv(BoundReport::CSV_HEADER, vec![row])
}

fn scalar(name: &str, value: f64, a: &BoundArgs) -> Report {
    let inputs: Vec<String> = a.params.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
    Report::new(&json!({"name": name, "value": value, "inputs": a.params.0}))
        .with_csv(BoundReport::CSV_HEADER, vec![format!("{name},{value},{}", inputs.join(";"))])
}

fn field_case(a: &BoundArgs) -> Result<FieldCase, Fail> {
    Ok(one(a, "field")?.unwrap_or("CF").parse()?)
}

fn bounds_cmd(raw: &[String], config: Option<&PathBuf>, format: &mut Format) -> Out {
    let a = parse_bound_args(raw, config, format)?;
    let Some(case) = one(&a, "case")? else { return usage("--case is required") };
    let family = one(&a, "family")?;
    let p = &a.params;
    let cfg = &a.config;
    if family == Some("class-number") {
        let Some(c) = parse_case(case) else { return usage(format!("unknown class-number case `{case}`")) };
        return Ok(bound_report(bounds::class_number_bound(c, p)?));
    }
    if let Some(c) = parse_case(&case.to_lowercase()) {
        return Ok(bound_report(bounds::chebotarev_bound(c, p, cfg)?));
    }
    if let Some(c) = parse_case(case) {
        return Ok(bound_report(bounds::genus_bound(c, p, cfg)?));
    }
    if let Some(c) = parse_case(case) {
        return Ok(bound_report(bounds::schmidt_pi_bounds(c, p, cfg)?));
    }
    if let Some(c) = parse_case(case) {
        return Ok(bound_report(bounds::special_case_defect(c, p, cfg)?));
    }
    match case {
        "theorem-a" => {
            let mut plan = Vec::new();
            for g in a.strings.get("group").into_iter().flatten() {
                let Some((pl, ds)) = g.rsplit_once(':') else { return usage(format!("expected place:d1,d2, got `{g}`")) };
                let degrees = ds
                    .split(',')
                    .map(|d| d.trim().parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .or_else(|_| usage(format!("bad degree list `{ds}`")))?;
                plan.push(PrescribedPlace { place: pl.trim().parse()?, degrees });
            }
            let avoid = place_set(one(&a, "avoid")?.unwrap_or(""), None)?;
            let t = bounds::theorem_a_bounds(&plan, avoid.places(), cfg)?;
            let row = format!("theorem-a,{},N={};f={};g={};defect_bound={}", t.h, t.n, t.f, t.g, t.defect_bound);
            Ok(Report::new(&t).with_csv(BoundReport::CSV_HEADER, vec![row]))
        }
        "prop-b" => Ok(scalar(case, bounds::prop_b_budget(p.get("piS")?, field_case(&a)?)?, &a)),
        "phi-infty" => Ok(Report::new(&bounds::phi_infty_sandwich(p.get("piS")?, field_case(&a)?)?)),
        "recurrence" => {
            let m = p.get("m")?;
            if m < 0.0 || m.fract() != 0.0 {
                return Err(Fail::Domain(Error::Invalid("m must be a nonnegative integer".into())));
            }
            let c = bounds::recurrence_check(p.get("A")?, p.get("ell")?, p.get("c")?, m as usize)?;
            Ok(Report::new(&c))
        }
        "shafarevich" => {
            let int = |k: &str| -> Result<u32, Fail> {
                let v = p.get_or(k, 0.0);
                if v < 0.0 || v.fract() != 0.0 {
                    return usage(format!("--{k} must be a nonnegative integer"));
                }
                Ok(v as u32)
            };
            let d = bounds::shafarevich_dim(
                int("clT")?,
                int("r1")?,
                int("r2")?,
                int("T")?,
                p.get_or("delta", 0.0) != 0.0,
                p.get_or("cf", 0.0) != 0.0,
            )?;
            Ok(scalar(case, d as f64, &a))
        }
        "class-number-exact" => {
            let n2 = p.opt("N2").map(|x| x as u64);
            let h = bounds::class_number_from_counts(p.get("r")? as u64, p.get("g")? as u32, p.get("N1")? as u64, n2)?;
            Ok(scalar(case, h as f64, &a))
        }
        _ => usage(format!("unknown case `{case}`")),
    }
}

fn local_plan(a: &LocalArgs) -> Result<LocalPlan, Fail> {
    let mut plan = LocalPlan::new(place_set(&a.split, Some(a.r))?, place_set(&a.inert, Some(a.r))?);
    if let Some(s) = &a.allowed {
        plan.allowed_ramification = Some(place_set(s, Some(a.r))?);
    }
    Ok(plan)
}

fn construct_cmd(c: &ConstructCmd) -> Out {
    match c {
        ConstructCmd::As(a) => {
            let plan = local_plan(a)?;
            Ok(Report::new(&construct::find_as_generator(&plan, a.r, &a.caps.caps())?))
        }
        ConstructCmd::Kummer(a) => {
            let Some(ell) = a.ell else { return usage("--ell is required") };
            let plan = local_plan(a)?;
            Ok(Report::new(&construct::find_kummer_generator(&plan, ell, a.r, &a.caps.caps())?))
        }
        ConstructCmd::Vgroup { r, ell, t, s } => {
            let v = construct::v_group_basis(&place_set(s, Some(*r))?, &place_set(t, Some(*r))?, *ell, *r)?;
            Ok(Report::new(&v))
        }
        ConstructCmd::Q { r, ell, p, caps } => {
            Ok(Report::new(&construct::find_Q_annihilators(&place_set(p, Some(*r))?, *ell, *r, &caps.caps())?))
        }
        ConstructCmd::Tower { plan, caps } => {
            let text = read_text(plan)?;
            let plan: TowerPlan = serde_json::from_str(&text).or_else(|e| usage(format!("bad tower plan: {e}")))?;
            let built = construct::build_norm_prescribed_tower(&plan, &caps.caps())?;
            let rows = built
                .checks
                .iter()
                .map(|c| format!("{},{},{},{},{},{},{}", c.place, c.n, c.degree, c.norm, c.count, c.n_l, c.ok))
                .collect();
            Ok(Report::new(&built).with_csv("place,n,degree,norm,count,n_L,ok", rows))
        }
    }
}

fn primes(a: &PrimesArgs) -> Out {
    let kind: bounds::PrimeKind = a.kind.parse()?;
    let v = bounds::prime_analytics(kind, a.arg)?;
    Ok(Report::new(&json!({"kind": a.kind, "arg": a.arg, "value": v}))
        .with_csv("kind,arg,value", vec![format!("{},{},{v}", a.kind, a.arg)]))
}

fn run(cli: &Cli, format: &mut Format) -> Out {
    match &cli.cmd {
        Cmd::Places(a) => places(a),
        Cmd::Extension(a) => extension(a, cli.jobs),
        Cmd::Tower(a) => tower(a),
        Cmd::Invariants(a) => invariants(a),
        Cmd::Bounds(a) => bounds_cmd(&a.args, cli.config.as_ref(), format),
        Cmd::Construct(c) => construct_cmd(c),
        Cmd::Primes(a) => primes(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut format = cli.format;
    let report = match run(&cli, &mut format) {
        Ok(r) => r,
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
        Err(Fail::Domain(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match emit_report(&report, format) {
        Ok(bytes) => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            if out.write_all(&bytes).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(m) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
