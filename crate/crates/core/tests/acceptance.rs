//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use affhecke::checks::{
    affine_elements_up_to, all_passed, check_centrality, check_inverse_kl_recursion,
    check_q1_family, check_qp_identity, check_rpoly_recursion, check_theta_independence,
    check_wakimoto_exhaustive, check_wakimoto_property_p, check_wakimoto_random, table_checks,
    CheckOutcome,
};
use affhecke::golden;
use affhecke::{
    c_property_p, m_compute, m_minuscule_poincare_oracle, Coweight, Family, KlStore, LaurentPoly,
    MultiplicityTable, RootDatum,
};

const SEED: u64 = 20240611;

/// Group, coweight and number of admissible alcoves of the reference tables.
const CASES: &[(&str, &str, usize)] = &[
    ("GL4", "1,1,0,0", 33),
    ("GL5", "1,1,0,0,0", 131),
    ("GL6", "1,1,0,0,0,0", 473),
    ("GL3", "2,2,0", 19),
    ("GL3", "3,1,0", 49),
    ("GL4", "2,0,0,0", 65),
    ("GL4", "2,1,0,0", 143),
    ("GSp4", "1,1,0,0", 13),
    ("GSp6", "1,1,1,0,0,0", 79),
    ("G2", "2,1,0", 41),
];

struct Case {
    group: &'static str,
    mu_text: &'static str,
    expected_adm: usize,
    store: Arc<KlStore>,
    table: MultiplicityTable,
    seconds: f64,
}

fn datum(group: &str) -> Arc<RootDatum> {
    let id: affhecke::DatumId = group.parse().unwrap();
    Arc::new(RootDatum::new(id.family, id.rank).unwrap())
}

fn q_poly(c: &[i64]) -> LaurentPoly {
    LaurentPoly::from_q_coeffs(c.to_vec())
}

/// Gaussian binomial `[n choose k]_q` via Pascal's rule.
fn gaussian_binomial(n: usize, k: usize) -> LaurentPoly {
    if k == 0 || k == n {
        return LaurentPoly::one();
    }
    let a = gaussian_binomial(n - 1, k - 1);
    let b = gaussian_binomial(n - 1, k);
    &a + &(&b * &LaurentPoly::q_pow(k as i32))
}

/// Poincare polynomial of the Lagrangian Grassmannian of a `2n`-dimensional space.
fn lagrangian_grassmannian(n: usize) -> LaurentPoly {
    (1..=n).fold(LaurentPoly::one(), |acc, i| {
        &acc * &(&LaurentPoly::one() + &LaurentPoly::q_pow(i as i32))
    })
}

fn all_ones(table: &MultiplicityTable) -> bool {
    table.rows().iter().all(|r| {
        let top = (table.mu_length() - r.length()) as usize;
        r.mult == q_poly(&vec![1; top + 1])
    })
}

struct Report {
    lines: Vec<(usize, bool, String)>,
    clock: Instant,
}

impl Report {
    fn record(&mut self, criterion: usize, outcomes: &[CheckOutcome], summary: String) {
        for o in outcomes.iter().filter(|o| !o.passed) {
            println!("    failed: {} ({})", o.name, o.detail);
        }
        let ok = all_passed(outcomes);
        let secs = self.clock.elapsed().as_secs_f64();
        self.clock = Instant::now();
        println!(
            "criterion {criterion}: {} {summary} [{secs:.1}s]",
            if ok { "PASS" } else { "FAIL" }
        );
        self.lines.push((criterion, ok, summary));
    }
}

fn main() {
    let start = Instant::now();
    let mut report = Report {
        lines: Vec::new(),
        clock: Instant::now(),
    };
    let mut stores: BTreeMap<&str, Arc<KlStore>> = BTreeMap::new();
    let mut cases: Vec<Case> = Vec::new();
    for &(group, mu_text, expected_adm) in CASES {
        let store = Arc::clone(
            stores
                .entry(group)
                .or_insert_with(|| Arc::new(KlStore::new(&datum(group)))),
        );
        let mu = store.datum().parse_coweight(mu_text).unwrap();
        let t = Instant::now();
        let table = m_compute(&store, &mu).unwrap();
        let seconds = t.elapsed().as_secs_f64();
        cases.push(Case {
            group,
            mu_text,
            expected_adm,
            store,
            table,
            seconds,
        });
    }

    // 1. admissible set sizes
    let outcomes: Vec<CheckOutcome> = cases
        .iter()
        .map(|c| {
            let limit = if c.group == "GL6" { 120.0 } else { 10.0 };
            CheckOutcome::new(
                format!("|Adm| {} mu=({})", c.group, c.mu_text),
                c.table.rows().len() == c.expected_adm && c.seconds < limit,
                format!(
                    "{} (expected {}), {:.2}s",
                    c.table.rows().len(),
                    c.expected_adm,
                    c.seconds
                ),
            )
        })
        .collect();
    report.record(
        1,
        &outcomes,
        format!("admissible set sizes for {} tables", cases.len()),
    );

    // 2. full tables
    let outcomes: Vec<CheckOutcome> = cases
        .iter()
        .map(|c| {
            let case = golden::find(c.group, c.mu_text).expect("reference table present");
            let diff = golden::compare(case, &c.table);
            CheckOutcome::new(
                format!("table {} mu=({})", c.group, c.mu_text),
                diff.is_ok(),
                diff.err().unwrap_or_default(),
            )
        })
        .collect();
    let total: f64 = cases.iter().map(|c| c.seconds).sum();
    report.record(
        2,
        &outcomes,
        format!("{} tables verbatim, {total:.2}s total", cases.len()),
    );

    // 3. all-ones multiplicities
    let mut outcomes = Vec::new();
    for n in 1..=6 {
        let d = Arc::new(RootDatum::new(Family::GL, n).unwrap());
        let store = KlStore::new(&d);
        let mut mu = vec![0; n];
        mu[0] = 1;
        let table = m_compute(&store, &Coweight(mu)).unwrap();
        outcomes.push(CheckOutcome::new(
            format!("Drinfeld GL{n}"),
            all_ones(&table),
            "",
        ));
    }
    let gl2 = Arc::new(RootDatum::new(Family::GL, 2).unwrap());
    let store = KlStore::new(&gl2);
    let mut gl2_count = 0;
    for a in 0..=5 {
        for b in 0..=a {
            let table = m_compute(&store, &Coweight(vec![a, b])).unwrap();
            gl2_count += 1;
            outcomes.push(CheckOutcome::new(
                format!("GL2 mu=({a},{b})"),
                all_ones(&table),
                "",
            ));
        }
    }
    report.record(
        3,
        &outcomes,
        format!("m(x,i)=1 for Drinfeld GL1..GL6 and {gl2_count} GL2 coweights up to (5,0)"),
    );

    // 4. minuscule tau multiplicities
    let mut outcomes = Vec::new();
    for c in &cases {
        let d = c.table.datum();
        if !d.is_minuscule(c.table.mu()) {
            continue;
        }
        let tau = c.table.tau().map(|r| r.mult.clone()).unwrap_or_default();
        let coset = m_minuscule_poincare_oracle(d, c.table.mu()).unwrap();
        let independent = match d.family() {
            Family::GL => {
                let k = c.table.mu().0.iter().filter(|&&x| x == 1).count();
                Some(gaussian_binomial(d.rank(), k))
            }
            Family::GSp => Some(lagrangian_grassmannian(d.rank())),
            Family::G2 => None,
        };
        let ok = tau == coset && independent.as_ref().is_none_or(|p| *p == tau);
        outcomes.push(CheckOutcome::new(
            format!("{} mu=({})", c.group, c.mu_text),
            ok,
            format!("m(tau) = {}", tau.to_q_string()),
        ));
    }
    let k = outcomes.len();
    report.record(
        4,
        &outcomes,
        format!("m(tau) = coset Poincare polynomial in {k} minuscule cases"),
    );

    // 5. oracle equivalences
    let mut outcomes = Vec::new();
    let gl3 = datum("GL3");
    let gsp4 = datum("GSp4");
    for d in [&gl3, &gsp4] {
        let store = KlStore::new(d);
        outcomes.push(check_rpoly_recursion(&store, 6));
    }
    let mut qp_pairs = 0;
    let mut rec_pairs = 0;
    for c in &cases {
        let adm: Vec<_> = c.table.adm().cloned().collect();
        let (pairs, bad) = check_qp_identity(&c.store, &adm);
        qp_pairs += pairs;
        outcomes.push(CheckOutcome::new(
            format!("P/Q inverse on Adm {} ({})", c.group, c.mu_text),
            bad == 0,
            format!("{bad} bad"),
        ));
        let (pairs, bad) = check_inverse_kl_recursion(&c.store, &adm);
        rec_pairs += pairs;
        outcomes.push(CheckOutcome::new(
            format!("Q recursion on Adm {} ({})", c.group, c.mu_text),
            bad == 0,
            format!("{bad} bad"),
        ));
    }
    let mut interval_pairs = 0;
    for d in [&gl3, &gsp4] {
        let store = KlStore::new(d);
        let elems = affine_elements_up_to(d, 6);
        let (pairs, bad) = check_inverse_kl_recursion(&store, &elems);
        interval_pairs += pairs;
        outcomes.push(CheckOutcome::new(
            format!("Q.R identity {} l<=6", d.id()),
            bad == 0,
            format!("{bad} bad"),
        ));
    }
    for d in [&gl3, &gsp4] {
        outcomes.push(check_wakimoto_random(d, SEED, 200, 8));
    }
    for d in [&gl3, &gsp4] {
        outcomes.push(check_wakimoto_exhaustive(d, 8));
    }
    report.record(
        5,
        &outcomes,
        format!(
            "R recursion, P/Q inverse ({qp_pairs} pairs), Q recursion ({rec_pairs} pairs), interval identity ({interval_pairs} pairs), Wakimoto closed form"
        ),
    );

    // 6. structural properties
    let mut outcomes = Vec::new();
    for c in &cases {
        outcomes.push(check_centrality(c.table.datum(), c.table.mu()));
        outcomes.push(CheckOutcome::new(
            format!("(P) for trace {} ({})", c.group, c.mu_text),
            c_property_p(c.table.trace(), c.table.mu_length() as i64),
            "",
        ));
    }
    for g in ["GL2", "GL3", "GL4", "GSp4", "GSp6", "G2"] {
        outcomes.push(check_theta_independence(&datum(g), SEED, 20, 3));
    }
    for d in [&gl3, &gsp4] {
        outcomes.push(check_wakimoto_property_p(d, SEED, 60, 8));
    }
    let store2 = KlStore::new(&gl2);
    let store3 = KlStore::new(&gl3);
    for mu in [vec![1, 0], vec![2, 0]] {
        outcomes.push(check_q1_family(&store2, &Coweight(mu)));
    }
    for mu in [vec![1, 0, 0], vec![2, 0, 0], vec![1, 1, 0]] {
        outcomes.push(check_q1_family(&store3, &Coweight(mu)));
    }
    report.record(
        6,
        &outcomes,
        "centrality, Theta well defined, property (P), q=1 specialization".into(),
    );

    // 7. observations on every table
    let outcomes: Vec<CheckOutcome> = cases
        .iter()
        .flat_map(|c| table_checks(&c.store, &c.table))
        .collect();
    report.record(
        7,
        &outcomes,
        format!("(A)(B)(C) and eps-sum identity, {} checks", outcomes.len()),
    );

    // 8. determinism across thread counts
    let render = |threads: usize| -> String {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let d = datum("GL4");
            let store = KlStore::new(&d);
            let table = m_compute(&store, &d.parse_coweight("2,1,0,0").unwrap()).unwrap();
            format!(
                "{}\n{}\n{}",
                table.to_text(),
                table.to_csv(),
                table.to_json()
            )
        })
    };
    let one = render(1);
    let eight = render(8);
    report.record(
        8,
        &[CheckOutcome::new(
            "GL4 (2,1,0,0) at 1 and 8 threads",
            one == eight,
            "",
        )],
        format!("byte-identical text/csv/json output ({} bytes)", one.len()),
    );

    let failed: Vec<usize> = report.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    println!(
        "acceptance finished in {:.1}s",
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
