//! Shipped tableaus with their reference metrics.

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::construct::parallel_iterated;
use crate::exact::{parse_rational, to_f64, RMatrix, Rational};
use crate::tableau::Tableau;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown method {name:?}; available: {}", available.join(", "))]
    Unknown { name: String, available: Vec<String> },
}

/// Reference metrics for a catalog method.
#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub stages: usize,
    pub order: usize,
    pub wso: usize,
    /// Principal error norm `A^(p+1)` as published, four significant digits.
    pub principal_error: f64,
    /// Largest coefficient magnitude as published.
    pub d: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub tableau: Tableau,
    pub aliases: Vec<String>,
    pub source: String,
    pub expected: Expected,
}

impl CatalogEntry {
    pub fn name(&self) -> &str {
        self.tableau.name()
    }

    /// `s = p + q − 1`
    pub fn is_minimal_stage(&self) -> bool {
        self.expected.stages + 1 == self.expected.order + self.expected.wso
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogRow {
    pub name: String,
    pub source: String,
    pub stages: usize,
    pub order: usize,
    pub wso: usize,
    pub principal_error: f64,
    pub d: f64,
}

struct RawExpected {
    stages: usize,
    order: usize,
    wso: usize,
    principal_error: f64,
    d: &'static str,
}

struct Raw {
    name: &'static str,
    aliases: &'static [&'static str],
    source: &'static str,
    expected: RawExpected,
    /// strictly lower part of `A`, row by row
    lower: &'static [&'static [&'static str]],
    b: &'static [&'static str],
    c: &'static [&'static str],
}

fn parse_all(values: &[&str]) -> Vec<Rational> {
    values
        .iter()
        .map(|v| parse_rational(v).expect("catalog literal"))
        .collect()
}

fn build(raw: &Raw) -> CatalogEntry {
    let s = raw.b.len();
    let mut a = RMatrix::zeros(s, s);
    for (i, row) in raw.lower.iter().enumerate() {
        for (j, v) in parse_all(row).into_iter().enumerate() {
            a.set(i, j, v);
        }
    }
    let e = &raw.expected;
    let tableau = Tableau::new(raw.name, a, parse_all(raw.b), Some(parse_all(raw.c)))
        .expect("catalog tableau is stage consistent")
        .with_claims(Some(e.order as u32), Some(e.wso as u32));
    CatalogEntry {
        tableau,
        aliases: raw.aliases.iter().map(|s| s.to_string()).collect(),
        source: raw.source.to_string(),
        expected: Expected {
            stages: e.stages,
            order: e.order,
            wso: e.wso,
            principal_error: e.principal_error,
            d: parse_rational(e.d).expect("catalog literal"),
        },
    }
}

fn entries() -> &'static [CatalogEntry] {
    static ENTRIES: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| RAW.iter().map(build).collect())
}

fn normalize(name: &str) -> String {
    name.trim()
        .replace(['\u{2013}', '\u{2014}'], "-")
        .replace(' ', "")
        .to_lowercase()
}

/// Canonical names of all catalog methods, in table order.
pub fn names() -> Vec<String> {
    entries().iter().map(|e| e.name().to_string()).collect()
}

/// Catalog entry by name or alias (case-insensitive).
pub fn get(name: &str) -> Result<&'static CatalogEntry, CatalogError> {
    let key = normalize(name);
    entries()
        .iter()
        .find(|e| normalize(e.name()) == key || e.aliases.iter().any(|a| normalize(a) == key))
        .ok_or_else(|| CatalogError::Unknown {
            name: name.to_string(),
            available: available(),
        })
}

pub fn list() -> Vec<CatalogRow> {
    entries()
        .iter()
        .map(|e| CatalogRow {
            name: e.name().to_string(),
            source: e.source.clone(),
            stages: e.expected.stages,
            order: e.expected.order,
            wso: e.expected.wso,
            principal_error: e.expected.principal_error,
            d: to_f64(&e.expected.d),
        })
        .collect()
}

/// Four-point Gauss–Legendre nodes on `[0, 1]`, ten decimal places.
pub const GAUSS4_NODES: [&str; 4] = ["0.0694318442", "0.3300094782", "0.6699905218", "0.9305681558"];

pub const ITERATED_933: &str = "(9,3,3)";

/// The 9-stage parallel-iterated third-order method on Gauss nodes.
pub fn iterated_933() -> &'static Tableau {
    static T: OnceLock<Tableau> = OnceLock::new();
    T.get_or_init(|| {
        parallel_iterated(3, &parse_all(&GAUSS4_NODES)).expect("Gauss nodes are distinct")
    })
}

fn available() -> Vec<String> {
    let mut all = names();
    all.push(ITERATED_933.to_string());
    all
}

/// Any runnable method: catalog entries plus the constructed `(9,3,3)`.
pub fn resolve(name: &str) -> Result<Tableau, CatalogError> {
    if normalize(name) == ITERATED_933 {
        return Ok(iterated_933().clone());
    }
    get(name).map(|e| e.tableau.clone())
}

static RAW: &[Raw] = &[
    Raw {
        name: "(3,2,2)",
        aliases: &[],
        source: "minimal-stage family, optimal member",
        expected: RawExpected { stages: 3, order: 2, wso: 2, principal_error: 2.357e-1, d: "2" },
        lower: &[
            &[],
            &["1/2"],
            &["1", "0"],
        ],
        b: &["-1/2", "2", "-1/2"],
        c: &["0", "1/2", "1"],
    },
    Raw {
        name: "Shu-Osher",
        aliases: &["shu-osher", "ssprk3", "(3,3,1)"],
        source: "Shu and Osher (1988)",
        expected: RawExpected { stages: 3, order: 3, wso: 1, principal_error: 7.217e-2, d: "1" },
        lower: &[
            &[],
            &["1"],
            &["1/4", "1/4"],
        ],
        b: &["1/6", "1/6", "2/3"],
        c: &["0", "1", "1/2"],
    },
    Raw {
        name: "(4,3,2)",
        aliases: &[],
        source: "minimal-stage family, optimized",
        expected: RawExpected { stages: 4, order: 3, wso: 2, principal_error: 5.893e-2, d: "1.003" },
        lower: &[
            &[],
            &["3/10"],
            &["2/3", "0"],
            &["-21/320", "45/44", "-729/3520"],
        ],
        b: &["7/108", "500/891", "-27/44", "80/81"],
        c: &["0", "3/10", "2/3", "3/4"],
    },
    Raw {
        name: "ERK312",
        aliases: &["erk312"],
        source: "Skvortsov (2017)",
        expected: RawExpected { stages: 4, order: 3, wso: 2, principal_error: 7.217e-2, d: "2" },
        lower: &[
            &[],
            &["1/2"],
            &["1", "0"],
            &["-1/2", "2", "-1/2"],
        ],
        b: &["1/6", "2/3", "-1/6", "1/3"],
        c: &["0", "1/2", "1", "1"],
    },
    Raw {
        name: "(5,3,3)",
        aliases: &[],
        source: "minimal-stage family, optimized",
        expected: RawExpected { stages: 5, order: 3, wso: 3, principal_error: 7.217e-2, d: "1.858" },
        lower: &[
            &[],
            &["3/11"],
            &["285645/493487", "103950/493487"],
            &["3075805/5314896", "1353275/5314896", "0"],
            &["196687/177710", "-129383023/426077496", "48013/42120", "-2268/2405"],
        ],
        b: &["5626/4725", "-25289/13608", "569297/340200", "324/175", "-13/7"],
        c: &["0", "3/11", "15/19", "5/6", "1"],
    },
    Raw {
        name: "ERK313",
        aliases: &["erk313"],
        source: "Skvortsov (2017)",
        expected: RawExpected { stages: 5, order: 3, wso: 3, principal_error: 1.443e-1, d: "3.75" },
        lower: &[
            &[],
            &["1/3"],
            &["2/3", "0"],
            &["1", "0", "0"],
            &["-11/12", "3/2", "-3/4", "1/6"],
        ],
        b: &["1/4", "-3", "15/4", "-1", "1"],
        c: &["0", "1/3", "2/3", "1", "0"],
    },
    Raw {
        name: "RK4",
        aliases: &["rk4", "(4,4,1)"],
        source: "Kutta (1901)",
        expected: RawExpected { stages: 4, order: 4, wso: 1, principal_error: 1.450e-2, d: "1" },
        lower: &[
            &[],
            &["1/2"],
            &["0", "1/2"],
            &["0", "0", "1"],
        ],
        b: &["1/6", "1/3", "1/3", "1/6"],
        c: &["0", "1/2", "1/2", "1"],
    },
    Raw {
        name: "(6,4,3)",
        aliases: &[],
        source: "minimal-stage family, optimized",
        expected: RawExpected { stages: 6, order: 4, wso: 3, principal_error: 1.443e-2, d: "1.144" },
        lower: &[
            &[],
            &["1"],
            &["461/3920", "99/3920"],
            &["314/605", "126/605", "0"],
            &["13193/197316", "39332/443961", "86632/190269", "-294151/5327532"],
            &["884721/773750", "52291/696375", "-155381744/135793125", "-53297233/355151250", "74881422/85499375"],
        ],
        b: &["113/2880", "7/1296", "91238/363285", "-1478741/1321920", "147987/194480", "77375/72864"],
        c: &["0", "1", "1/7", "8/11", "5/9", "4/5"],
    },
    Raw {
        name: "(7,4,4)",
        aliases: &[],
        source: "minimal-stage family, optimized",
        expected: RawExpected { stages: 7, order: 4, wso: 4, principal_error: 1.667e-2, d: "6.187" },
        lower: &[
            &[],
            &["13/15"],
            &["354503406167294455217584527356969321310499849/679624939387359702842360408541392160411699600", "29553225679453489752042741666497760730650643/2038874818162079108527081225624176481235098800"],
            &["599677/612720", "1/185", "1/69"],
            &["11942118300581357822967470312387413892866711/90616658584981293712314721138852288054893280", "79816622789357424004900970571545142906303/18123331716996258742462944227770457610978656", "10939005/8358742409", "0"],
            &["-2057331211140587771882165942948945576060485224020471/5094460906663329618583273674295283629198217174096496", "37580055896186727391837634951840677945750522481251/448734898514386546714588872865387677183262652640624", "-235459427251516205060/1472801902839731775141", "-787608360/15627214069", "24/43"],
            &["793706393429237444430333112845341360638504851726921024780703/806700576848993242482064062984309812448909584075544854292960", "-33849235109708152171969081938954415033838967121633968102863/23685509164823635789628823956361427999363493832960729746080", "1821188984566562706805723220601/956185881514873346828934914081", "615685898929080/887641386333269", "-88/41", "63/79"],
        ],
        b: &["-27983058641859756462867613/8486495976646364788361250", "266859550993073190375211/43133823812456533406250", "-3642903731392259905073408/613543193666469780107625", "-59466320887669359732170224/16752980798131655841946875", "22530099787083474288594398/3662271198716324657203125", "13086932957294488/71277904341826875", "12256178974/9710853075"],
        c: &["0", "13/15", "193/360", "719/720", "11/80", "1/36", "193/240"],
    },
    Raw {
        name: "Dormand-Prince",
        aliases: &["dormand-prince", "dp5", "(7,5,1)"],
        source: "Dormand and Prince (1980)",
        expected: RawExpected { stages: 7, order: 5, wso: 1, principal_error: 3.991e-4, d: "11.60" },
        lower: &[
            &[],
            &["1/5"],
            &["3/40", "9/40"],
            &["44/45", "-56/15", "32/9"],
            &["19372/6561", "-25360/2187", "64448/6561", "-212/729"],
            &["9017/3168", "-355/33", "46732/5247", "49/176", "-5103/18656"],
            &["35/384", "0", "500/1113", "125/192", "-2187/6784", "11/84"],
        ],
        b: &["35/384", "0", "500/1113", "125/192", "-2187/6784", "11/84", "0"],
        c: &["0", "1/5", "3/10", "4/5", "8/9", "1", "1"],
    },
    Raw {
        name: "(8,5,4)",
        aliases: &[],
        source: "minimal-stage family, optimized",
        expected: RawExpected { stages: 8, order: 5, wso: 4, principal_error: 1.217e-2, d: "25.33" },
        lower: &[
            &[],
            &["2/31"],
            &["8/39", "0"],
            &["15/38", "0", "0"],
            &["23/38", "0", "0", "0"],
            &["-281846119171/64200240000", "289705767137/45358567000", "-779567154093/524247088000", "199824989/614863125", "-1/25"],
            &["-5647052528401825871/514607937760800000", "80442150849469599005477/4661884215626994720000", "-271390788610093/44561002480000", "16919854802127127/33068912912100000", "918241790299/2569461804000", "-1/8"],
            &["-69373518431251442108053395141546348749/4382652560085449761027489727918400000", "28436161533578442493717377903973791583/1122666693846436666675352841982200000", "-5846309065854115413909270194602947869/606644216141135157002900448063680000", "6129203519106929754603252009272053/11862175903109203056563899370081250", "242980026698914693640761833099573847/314274501092549835332737438438856250", "-38588365882306831/818781973666952750", "-508578133539464/4816364550982075"],
        ],
        b: &["-13932812614910970806212030308137/1494246680966212236480728656800", "442315248050515865700725458450027/23731641831739396945145366137800", "-21619621692735791984774655801338457/1572963107476970769686133552792800", "4931046639398139760440943293895907/887688100270302681290608525794300", "-808732636620048337464280245511529/1567883987541272156723519232078580", "52162695/22722574", "-42525800/8688043", "190120171223750/63572266692433"],
        c: &["0", "2/31", "8/39", "15/38", "23/38", "31/39", "29/31", "1"],
    },
    Raw {
        name: "(9,5,5)",
        aliases: &[],
        source: "minimal-stage family, optimized",
        expected: RawExpected { stages: 9, order: 5, wso: 5, principal_error: 3.316e-2, d: "44.42" },
        lower: &[
            &[],
            &["1/19"],
            &["1/6", "0"],
            &["5/16", "0", "0"],
            &["1/2", "0", "0", "0"],
            &["11/16", "0", "0", "0", "0"],
            &["11448031/2850816", "-67411795275/16590798848", "51073011/43237376", "-23353/64148", "583825/8077312", "-1/116"],
            &["30521441823091/1986340257792", "-745932230071621375/35792226257928192", "42324456085/5966757888", "775674925/6453417096", "-38065236125/28020473856", "18388001255/24775053336", "-25/138"],
            &["544015925591990906117739018863/21097279127167116142731264000", "-51819957177912933732533469147783191/1292529408768612025127952939417600", "15141148893501140337719772533/769541606770966638202880000", "-22062343808701233885761491/5740046662014404900523000", "-180818957612953115541011736739/146721986657116762265358336000", "18393837528018836258241002593/22366927394951953576613895000", "-14372715851/701966192290", "-3316780581/34682124125"],
        ],
        b: &["201919428075343316424206867/7205146638186855485778750", "-979811820279525173317561445351/23232888464237446713644747250", "-659616477161155066954978/262813990730721440278125", "10343523856053877739219144704/232857239079584284108576875", "-2224588357354685208355760476/50108519801935858605643125", "704220346724742597999572733952/31288349276326419946994221875", "-13778944/1751475", "92889088/11941875", "-714103988224/149255126145"],
        c: &["0", "1/19", "1/6", "5/16", "1/2", "11/16", "5/6", "16/17", "1"],
    },
];
