//! Named example groups.
//!
//! | id              | group                                   |
//! |-----------------|-----------------------------------------|
//! | `G_s:<s>`       | `<T, K_s>` in SL(2, Q)                  |
//! | `H4sp:<t>:<s>`  | `<a(t), b(s)>` in Sp(4, Q), antidiagonal form |
//! | `H4sl:<t>:<r>`  | `<a(t), c(r)>` in SL(4, Q)              |
//! | `H3:<k>`        | `<a_3(k), b_3(k)>` in SL(5, Q)          |
//! | `G1`, `G2`, `G3`| thin subgroups of SL(2, Z)              |
//! | `soifer`        | two-generator profinitely dense subgroup of SL(3, Z) |
//!
//! `G1`, `G2`, `G3` and `soifer` carry their known nonsurjective prime sets.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exact::{int, parse_rat, Rat, RatMatrix};

use super::{antidiagonal_form4, GroupKind, GroupSpec};

pub const CATALOG_IDS: &[&str] = &[
    "G_s:<s>",
    "H4sp:<t>:<s>",
    "H4sl:<t>:<r>",
    "H3:<k>",
    "G1",
    "G2",
    "G3",
    "soifer",
];

fn mat(rows: &[&[&str]]) -> RatMatrix {
    let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
    RatMatrix::parse_rows(&rows).expect("catalog literal")
}

fn from_rats(rows: Vec<Vec<Rat>>) -> RatMatrix {
    RatMatrix::from_rows(rows).expect("catalog literal")
}

pub fn t_matrix() -> RatMatrix {
    mat(&[&["0", "1"], &["-1", "0"]])
}

pub fn k_matrix(s: &Rat) -> RatMatrix {
    from_rats(vec![vec![int(0), -s.clone()], vec![s.recip(), int(1)]])
}

pub fn a4(t: &Rat) -> RatMatrix {
    let t2 = t * t;
    let t3 = &t2 * t;
    let z = || int(0);
    let o = || int(1);
    from_rats(vec![
        vec![o(), t.clone(), &t2 / int(2), &t3 / int(6)],
        vec![z(), o(), t.clone(), &t2 / int(2)],
        vec![z(), z(), o(), t.clone()],
        vec![z(), z(), z(), o()],
    ])
}

pub fn b4(s: &Rat) -> RatMatrix {
    let mut m = RatMatrix::identity(4);
    m.set(3, 0, s.clone());
    m
}

pub fn c4(r: &Rat) -> RatMatrix {
    let r2 = r * r;
    let r3 = &r2 * r;
    let z = || int(0);
    let o = || int(1);
    from_rats(vec![
        vec![o(), z(), z(), z()],
        vec![int(8) * r, o(), z(), z()],
        vec![int(48) * &r2, int(12) * r, o(), z()],
        vec![int(224) * &r3, int(84) * &r2, int(14) * r, o()],
    ])
}

/// Generators `a_3(k), b_3(k)` of the degree-5 triangle-group family.
pub fn h3_generators(k: &Rat) -> (RatMatrix, RatMatrix) {
    let c = |x: i64| int(x);
    let k2 = k * k;
    let k3 = &k2 * k;
    let z = || int(0);
    // entries shared by both generators
    let e13 = c(-3) - c(2) * k - c(8) * &k2;
    let e14 = c(-1) + c(10) * k + c(32) * &k3;
    let e15 = c(-5) - c(16) * &k2;
    let one_plus_k = c(1) + k;
    let a = from_rats(vec![
        vec![c(1), z(), e13.clone(), e14.clone(), e15.clone()],
        vec![
            z(),
            c(4) * (c(-1) + k),
            c(-13) - c(4) * k,
            c(3) + c(16) * &one_plus_k * &one_plus_k,
            c(-4) + c(16) * k,
        ],
        vec![
            z(),
            c(1) - k + c(4) * &k2,
            c(3) - c(2) * k + c(8) * &k2,
            c(-2) * (c(1) + c(3) * k + c(16) * &k3),
            c(3) + c(16) * &k2,
        ],
        vec![z(), k.clone(), c(2) * k, c(1) - c(2) * k - c(8) * &k2, c(1) + c(4) * k],
        vec![z(), z(), c(3) * k, c(3) * (c(-1) + k - c(4) * &k2), c(-2)],
    ]);
    let b = from_rats(vec![
        vec![z(), z(), e13, e14, e15],
        vec![
            z(),
            c(1),
            c(3) + c(4) * k,
            c(-13) - c(8) * k - c(16) * &k2,
            c(4) - c(16) * k,
        ],
        vec![
            z(),
            z(),
            c(-2) * (c(1) + k + c(4) * &k2),
            c(6) * k + c(32) * &k3,
            c(-3) - c(16) * &k2,
        ],
        vec![c(1), z(), c(-2) * &one_plus_k, c(-1) + c(2) * k + c(8) * &k2, c(-1) - c(4) * k],
        vec![c(2) * k, z(), c(1) - c(2) * k, c(-4) * k, c(1)],
    ]);
    (a, b)
}

pub fn g1_generators() -> Vec<RatMatrix> {
    vec![
        mat(&[&["946549", "-1531420"], &["-28215", "45649"]]),
        mat(&[&["281823", "-631463"], &["181643", "-406996"]]),
        mat(&[&["47149", "1057765"], &["32466", "728359"]]),
    ]
}

pub fn g2_generators() -> Vec<RatMatrix> {
    vec![
        mat(&[&["-11", "-105"], &["2", "19"]]),
        mat(&[&["9", "161"], &["1", "18"]]),
        mat(&[&["-4", "-17"], &["1", "4"]]),
    ]
}

pub fn g3_generators() -> Vec<RatMatrix> {
    vec![
        mat(&[
            &["-23653189915040069676", "78121325235187312055"],
            &["-9796772300912447255", "32356601283956634324"],
        ]),
        mat(&[
            &[
                "-1557884485479161873562328016576807435",
                "3819960293513731249430174164790804354",
            ],
            &[
                "-1900057682869268441725410979144592304",
                "4658975021318032809514788603728789629",
            ],
        ]),
        mat(&[&["-389", "-285"], &["1455", "1066"]]),
        mat(&[&["166", "-225"], &["-45", "61"]]),
    ]
}

/// The explicit two-generator pair `(a, b)` in SL(3, Z).
pub fn soifer_generators() -> Vec<RatMatrix> {
    vec![
        mat(&[
            &["-176379047", "1936571625", "-17817867"],
            &["-1941616205", "21318171799", "-196142682"],
            &["10", "-121", "1"],
        ]),
        mat(&[
            &["-40193888", "-3684209", "-44180039"],
            &["396162230", "36312596", "435450841"],
            &["3829559", "351021", "4209349"],
        ]),
    ]
}

/// Humphries' generators `f_1, f_2, f_3` at parameter `x`.
pub fn humphries_generators(x: i64) -> [RatMatrix; 3] {
    let f1 = RatMatrix::from_int_rows(&[&[1, x * x + 1, x], &[0, 1, 0], &[0, 0, 1]]).expect("square");
    let f2 = RatMatrix::from_int_rows(&[&[1, 0, 0], &[x, 1, x + 1], &[0, 0, 1]]).expect("square");
    let f3 = RatMatrix::from_int_rows(&[&[1, 0, 0], &[0, 1, 0], &[-x + 1, x * x, 1]]).expect("square");
    [f1, f2, f3]
}

fn primes(list: &[u64]) -> Option<BTreeSet<u64>> {
    Some(list.iter().copied().collect())
}

fn parse_param(id: &str, s: &str) -> Result<Rat> {
    let r = parse_rat(s).map_err(|_| Error::Parse(format!("bad parameter {s:?} in catalog id {id:?}")))?;
    if r == int(0) {
        return Err(Error::Domain(format!("parameter must be nonzero in {id:?}")));
    }
    Ok(r)
}

/// Resolve a catalog id to a validated group.
pub fn lookup(id: &str) -> Result<GroupSpec> {
    let parts: Vec<&str> = id.split(':').collect();
    let sl = GroupKind::SpecialLinear;
    let spec = match parts.as_slice() {
        ["G1"] => GroupSpec::new(sl, g1_generators(), None, primes(&[11]), true)?,
        ["G2"] => GroupSpec::new(sl, g2_generators(), None, primes(&[]), true)?,
        ["G3"] => GroupSpec::new(sl, g3_generators(), None, primes(&[5]), true)?,
        ["soifer"] => GroupSpec::new(sl, soifer_generators(), None, primes(&[]), true)?,
        ["G_s", s] => {
            let s = parse_param(id, s)?;
            GroupSpec::new(sl, vec![t_matrix(), k_matrix(&s)], None, None, true)?
        }
        ["H4sp", t, s] => {
            let (t, s) = (parse_param(id, t)?, parse_param(id, s)?);
            GroupSpec::new(
                GroupKind::Symplectic,
                vec![a4(&t), b4(&s)],
                Some(antidiagonal_form4()),
                None,
                true,
            )?
        }
        ["H4sl", t, r] => {
            let (t, r) = (parse_param(id, t)?, parse_param(id, r)?);
            GroupSpec::new(sl, vec![a4(&t), c4(&r)], None, None, true)?
        }
        ["H3", k] => {
            let k = parse_param(id, k)?;
            let (a, b) = h3_generators(&k);
            GroupSpec::new(sl, vec![a, b], None, None, true)?
        }
        _ => {
            return Err(Error::Parse(format!(
                "unknown catalog id {id:?}; known forms: {}",
                CATALOG_IDS.join(", ")
            )))
        }
    };
    Ok(spec.with_name(id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{factorize, rat};
    use crate::group::is_transvection;

    #[test]
    fn every_family_validates() {
        for id in [
            "G1", "G2", "G3", "soifer", "G_s:11", "G_s:11/3", "G_s:11/5", "G_s:11/7",
            "H4sp:25/3:29/3", "H4sp:27/2:29/3", "H4sp:100:16/3", "H4sl:10:1/3", "H4sl:15:7/4",
            "H3:1/3", "H3:2/5", "H3:11/5",
        ] {
            lookup(id).unwrap_or_else(|e| panic!("{id}: {e}"));
        }
    }

    #[test]
    fn rings_of_catalog_groups() {
        assert!(lookup("G2").unwrap().mu().is_one());
        assert_eq!(lookup("G_s:11").unwrap().mu(), &factorize(11).unwrap());
        assert_eq!(lookup("G_s:11/3").unwrap().mu(), &factorize(33).unwrap());
        assert_eq!(lookup("H4sp:25/3:29/3").unwrap().mu(), &factorize(6).unwrap());
        assert_eq!(lookup("G_s:11/3").unwrap().s_set(), vec!["1/3", "1/11"]);
    }

    #[test]
    fn soifer_pair_matches_its_word_definition() {
        let [f1, f2, f3] = humphries_generators(11);
        let i1 = f1.inverse().unwrap();
        let i2 = f2.inverse().unwrap();
        let i3 = f3.inverse().unwrap();
        let a = [&f2, &f1, &i2, &i1, &f2, &i1, &i3]
            .iter()
            .fold(RatMatrix::identity(3), |acc, m| acc.mul(m).unwrap());
        let inner = [&i1, &i3, &i3, &f2, &i3]
            .iter()
            .fold(RatMatrix::identity(3), |acc, m| acc.mul(m).unwrap());
        let b = inner.conjugate_by(&f2).unwrap();
        let expected = soifer_generators();
        assert_eq!(a, expected[0]);
        assert_eq!(b, expected[1]);
    }

    #[test]
    fn b_is_a_transvection() {
        assert!(is_transvection(&b4(&int(3))));
        assert!(is_transvection(&b4(&rat(29, 3))));
        assert!(!is_transvection(&a4(&int(3))));
    }

    #[test]
    fn unknown_ids_are_parse_errors() {
        assert!(matches!(lookup("G4"), Err(Error::Parse(_))));
        assert!(matches!(lookup("G_s:x"), Err(Error::Parse(_))));
        assert!(matches!(lookup("G_s:0"), Err(Error::Domain(_))));
    }
}
