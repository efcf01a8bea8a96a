use std::process::{Command, Output};

use abcalc::parse_element;
use abcalc_core::abalg::AbOperator;
use abcalc_core::series::rat;
use proptest::prelude::*;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn abcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abcalc"))
        .args(args)
        .env("ABCALC_ORDER", "8")
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = abcalc(args);
    assert!(
        out.status.success(),
        "abcalc {args:?}: {}",
        String::from_utf8_lossy(&out.stdout)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn operator_goldens() {
    let cases: [(&[&str], &str); 5] = [
        (&["eval", "--expr", "b*a"], "{\"result\":\"ab - b^2\"}\n"),
        (
            &["mul", "--expr", "a", "--expr", "b"],
            "{\"result\":\"ab\"}\n",
        ),
        (
            &["divide", "--lambda", "1", "--expr", "a^2"],
            "{\"Q\":\"a + b\",\"R\":\"2b^2\"}\n",
        ),
        (
            &["invert", "--expr", "1+a", "--order", "4"],
            "{\"result\":\"-a^3 + a^2 - a + 1\"}\n",
        ),
        (&["eval", "--expr", "b*a", "--text"], "result: ab - b^2\n"),
    ];
    for (args, expected) in cases {
        assert_eq!(stdout_of(args), expected, "abcalc {args:?}");
    }
}

#[test]
fn module_goldens() {
    let xi = fixture("xi.json");
    let cases: [(&[&str], &str); 6] = [
        (
            &["bernstein", "--module", &xi],
            "{\"roots\":[\"-1/2\",\"-1/2\",\"-1/2\"]}\n",
        ),
        (
            &["filtration", "--module", &xi],
            "{\"ranks\":[1,1,1],\"d\":3}\n",
        ),
        (
            &["embed", "--module", &xi],
            "{\"log_depth\":2,\"alphas\":[\"1/2\"],\"valid_order\":7}\n",
        ),
        (
            &[
                "module-apply",
                "--module",
                &xi,
                "--expr",
                "a",
                "--vector",
                "[[\"1\"],[\"0\"],[\"0\"]]",
            ],
            "{\"vector\":[[\"0\",\"1/2\"],[\"0\"],[\"0\"]]}\n",
        ),
        (
            &[
                "solve",
                "--module",
                &xi,
                "--lambda",
                "1/3",
                "--vector",
                "[[\"1\"],[\"0\"],[\"0\"]]",
            ],
            "{\"vector\":[[\"6\"],[\"0\"],[\"0\"]]}\n",
        ),
        (
            &["saturate", "--module", &xi],
            concat!(
                "{\"codim\":0,\"shift\":0,\"module\":{\"rank\":3,\"b_order\":8,\"amat\":",
                "[[[\"0\",\"1/2\"],[\"0\"],[\"0\"]],[[\"0\",\"1\"],[\"0\",\"1/2\"],[\"0\"]],",
                "[[\"0\"],[\"0\",\"1\"],[\"0\",\"1/2\"]]]}}\n"
            ),
        ),
    ];
    for (args, expected) in cases {
        assert_eq!(stdout_of(args), expected, "abcalc {args:?}");
    }
}

#[test]
fn fresco_goldens() {
    let theme = fixture("theme.json");
    let cases: [(&[&str], &str); 4] = [
        (
            &["bernstein", "--fresco", &theme],
            "{\"roots\":[\"-1/2\",\"-1/2\"]}\n",
        ),
        (
            &["jh", "--fresco", &theme],
            "{\"lambdas\":[\"3/2\",\"1/2\"],\"principal\":[\"3/2\",\"1/2\"]}\n",
        ),
        (
            &["higher-bernstein", "--fresco", &theme],
            "{\"polynomials\":[[\"-1/2\"],[\"-1/2\"]]}\n",
        ),
        (
            &["semisimple", "--fresco", &theme],
            "{\"semisimple\":false}\n",
        ),
    ];
    for (args, expected) in cases {
        assert_eq!(stdout_of(args), expected, "abcalc {args:?}");
    }
}

#[test]
fn json_mode_embeds_order() {
    assert_eq!(
        stdout_of(&["eval", "--expr", "a", "--json"]),
        "{\"verb\":\"eval\",\"b_order\":8,\"result\":\"a\",\"right\":\"a\"}\n"
    );
}

#[test]
fn syntax_error_reports_offset() {
    let out = abcalc(&["eval", "--expr", "a +"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "{\"error\":\"SyntaxError\",\"message\":\"syntax error at offset 3: unexpected end of input\",\"offset\":3}\n"
    );
}

#[test]
fn domain_error_exits_one() {
    let xi = fixture("xi.json");
    let out = abcalc(&[
        "solve",
        "--module",
        &xi,
        "--lambda",
        "1/2",
        "--vector",
        "[[\"1\"],[\"0\"],[\"0\"]]",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("{\"error\":\"Resonance\""));
}

#[test]
fn missing_file_exits_two() {
    let out = abcalc(&["filtration", "--module", "no-such-module.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("{\"error\":\"IoError\""));
}

fn operator(n: usize) -> impl Strategy<Value = AbOperator> {
    let term = ((0usize..5, 0usize..n), (-9i64..=9, 1i64..=6));
    prop::collection::vec(term, 0..7).prop_map(move |ts| {
        AbOperator::from_terms(n, ts.into_iter().map(|(pq, (p, q))| (pq, rat(p, q))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_operators_parse_back(x in operator(10)) {
        let printed = x.to_string();
        let back = parse_element(&printed, 10).unwrap();
        prop_assert_eq!(&back, &x);
        prop_assert_eq!(back.to_string(), printed);
    }
}
