mod common;

use common::{frontend_dumps, golden, LISTINGS};

#[test]
fn listings_match_golden_dumps() {
    for name in LISTINGS {
        let (tokens, ast) = frontend_dumps(name);
        golden(&format!("{name}.tokens"), &tokens).unwrap();
        golden(&format!("{name}.ast"), &ast).unwrap();
    }
}

#[test]
fn dumps_are_stable() {
    for name in LISTINGS {
        assert_eq!(frontend_dumps(name), frontend_dumps(name));
    }
}
