use ks_core::exact::{int, rat};
use ks_core::text::{parse_matrix_series, parse_series, render_matrix_series, render_series, render_series_in};
use ks_core::{Rational, ScalarSeries};
use proptest::prelude::*;

const CORPUS: [(&str, &str); 20] = [
    ("z - 1/4 z^-2", "z - 1/4 z^-2"),
    ("0", "0"),
    ("1", "1"),
    ("-1", "-1"),
    ("1 - 1/4 z^-2 + 5 z^-5", "1 - 1/4 z^-2 + 5 z^-5"),
    ("z^-2 - 1/4 + z", "z - 1/4 + z^-2"),
    ("2/4 z", "1/2 z"),
    ("1 z^1", "z"),
    ("-1 z^0", "-1"),
    ("z + z", "2 z"),
    ("z - z", "0"),
    ("+3 z^-1", "3 z^-1"),
    ("  -  z^3  +  7/3  ", "-z^3 + 7/3"),
    ("z^+2", "z^2"),
    ("3 * z^-4", "3 z^-4"),
    ("-6/-1", ""),
    ("1 + z^-1 + O(z^-10)", "1 + z^-1 + O(z^-10)"),
    ("O(z^-3)", "O(z^-3)"),
    ("100000000000000000000/3 z^7", "100000000000000000000/3 z^7"),
    ("0 z^5 + 0", "0"),
];

#[test]
fn corpus_normalizes() {
    for (input, normal) in CORPUS {
        if normal.is_empty() {
            assert!(parse_series(input).is_err(), "{input:?} should be rejected");
            continue;
        }
        let s = parse_series(input).unwrap_or_else(|e| panic!("{input:?}: {e}"));
        assert_eq!(render_series(&s), normal, "{input:?}");
        assert_eq!(parse_series(normal).unwrap(), s, "{normal:?}");
    }
}

#[test]
fn kdv_potential() {
    let s = parse_series("zeta - 1/4 zeta^-2").unwrap();
    assert_eq!(s.coeff(1).unwrap(), int(1));
    assert_eq!(s.coeff(-2).unwrap(), rat(-1, 4));
    assert_eq!(s.coeff(0).unwrap(), int(0));
    assert_eq!(render_series_in(&s, "zeta"), "zeta - 1/4 zeta^-2");
}

#[test]
fn floors_survive() {
    let s = parse_series("z + O(z^-6)").unwrap();
    assert_eq!(s.floor(), Some(-5));
    assert!(s.coeff(-6).is_err());
}

fn series_strategy() -> impl Strategy<Value = ScalarSeries> {
    (
        prop::collection::vec((-20i64..20, -50i64..50, 1i64..9), 0..8),
        prop::option::of(-25i64..-20),
    )
        .prop_map(|(terms, floor)| {
            let terms: Vec<(i64, Rational)> = terms.into_iter().map(|(k, p, q)| (k, rat(p, q))).collect();
            let mut acc = ScalarSeries::scalar_zero(None);
            for (k, c) in terms {
                acc = &acc + &ScalarSeries::term(c, k);
            }
            match floor {
                Some(f) => acc.truncate(f),
                None => acc,
            }
        })
}

proptest! {
    #[test]
    fn render_parse_round_trip(s in series_strategy()) {
        let text = render_series(&s);
        let back = parse_series(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(render_series(&back), text);
    }

    #[test]
    fn matrix_round_trip(entries in prop::collection::vec((-3i64..3, -9i64..9, 1i64..5), 1..6)) {
        let mut text = String::new();
        for (i, (k, p, q)) in entries.iter().enumerate() {
            if i > 0 {
                text.push_str(" + ");
            }
            text.push_str(&format!("[[{}, 0], [1, {}]] z^{k}", rat(*p, *q), -p));
        }
        let s = parse_matrix_series(&text, (2, 2)).unwrap();
        let canon = render_matrix_series(&s);
        prop_assert_eq!(parse_matrix_series(&canon, (2, 2)).unwrap(), s);
    }
}
