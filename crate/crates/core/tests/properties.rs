//! Randomized invariants.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use num_integer::Integer;
use proptest::prelude::*;

use densikit::engine::{
    full_order, order_bfs, order_lifted, order_stabchain, BfsOutcome, EngineConfig, FiniteImage,
    MatRing, ModMat,
};
use densikit::exact::{factorize, int, rat, FactoredInt, Rat, RatMatrix};
use densikit::group::{catalog, derive_ring, GroupKind, GroupSpec};
use densikit::level::{DeltaOracle, LevelConfig};
use densikit::scan::scan_pi;

fn f(m: u64) -> FactoredInt {
    factorize(m).unwrap()
}

fn set(v: &[u64]) -> BTreeSet<u64> {
    v.iter().copied().collect()
}

static G1: LazyLock<GroupSpec> = LazyLock::new(|| catalog::lookup("G1").unwrap());
static G2: LazyLock<GroupSpec> = LazyLock::new(|| catalog::lookup("G2").unwrap());
static G11: LazyLock<GroupSpec> = LazyLock::new(|| catalog::lookup("G_s:11/3").unwrap());
static H4: LazyLock<GroupSpec> = LazyLock::new(|| catalog::lookup("H4sp:25/3:29/3").unwrap());

static O1: LazyLock<DeltaOracle<'static>> = LazyLock::new(|| DeltaOracle::new(&G1, LevelConfig::default()));
static O2: LazyLock<DeltaOracle<'static>> = LazyLock::new(|| DeltaOracle::new(&G2, LevelConfig::default()));

// (level, closure index) of G1 and G2, computed once
static L1: LazyLock<(FactoredInt, FactoredInt)> = LazyLock::new(|| {
    let r = O1.report(&set(&[11]), true).unwrap();
    (r.level, r.closure_index)
});
static L2: LazyLock<(FactoredInt, FactoredInt)> = LazyLock::new(|| {
    let r = O2.report(&set(&[]), true).unwrap();
    (r.level, r.closure_index)
});

fn small_rat() -> impl Strategy<Value = Rat> {
    (-40i64..40, 1i64..40).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    small_rat().prop_filter("nonzero", |r| *r != int(0))
}

/// A word of length `len` in the generators of `spec` and their inverses.
fn word(spec: &GroupSpec, letters: &[(usize, bool)]) -> RatMatrix {
    letters.iter().fold(RatMatrix::identity(spec.degree()), |acc, &(i, inv)| {
        let i = i % spec.generators().len();
        let g = if inv { &spec.inverses()[i] } else { &spec.generators()[i] };
        acc.mul(g).unwrap()
    })
}

fn sl2_elem(ring: &MatRing, x: u64, y: u64, z: u64) -> ModMat {
    let m = ring.modulus();
    let u: ModMat = [1, x % m, 0, 1].into_iter().collect();
    let l: ModMat = [1, 0, y % m, 1].into_iter().collect();
    let u2: ModMat = [1, z % m, 0, 1].into_iter().collect();
    ring.mul(&ring.mul(&u, &l), &u2)
}

fn coprime_to(mu: &FactoredInt, max: u64) -> impl Strategy<Value = u64> {
    let mu = mu.clone();
    (2..=max).prop_filter("coprime to mu", move |m| f(*m).is_coprime(&mu))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factorization_roundtrips(k in 1u64..=1_000_000_000) {
        let fk = f(k);
        prop_assert_eq!(fk.to_u64(), Some(k));
        for p in fk.primes() {
            prop_assert_eq!(f(p).num_primes(), 1);
            prop_assert_eq!(f(p).exponent(p), 1);
        }
    }

    #[test]
    fn gcd_and_lcm_match_integers(a in 1u64..=1_000_000, b in 1u64..=1_000_000) {
        prop_assert_eq!(f(a).gcd(&f(b)).to_u64(), Some(a.gcd(&b)));
        prop_assert_eq!(f(a).lcm(&f(b)).to_u64(), Some(a.lcm(&b)));
        prop_assert_eq!(f(a).divides(&f(b)), b % a == 0);
    }

    #[test]
    fn rational_arithmetic_is_exact(a in small_rat(), c in small_rat()) {
        prop_assert_eq!((a.clone() + c.clone()) - c, a);
    }

    #[test]
    fn reduction_is_functorial(letters in prop::collection::vec((0usize..2, any::<bool>()), 1..12),
                               a in coprime_to(&f(33), 60), b in coprime_to(&f(33), 60)) {
        let spec = &*G11;
        let ab = f(a).mul(&f(b));
        let big = spec.reduce_mod(&ab).unwrap();
        let small = spec.reduce_mod(&f(a)).unwrap();
        let projected = big.project(&f(a)).unwrap();
        prop_assert_eq!(projected.generators(), small.generators());
        // words reduce letter by letter
        let w = word(spec, &letters);
        let ring = *big.ring();
        let direct = ring.from_rat(&w).unwrap();
        let stepwise = letters.iter().fold(ring.identity(), |acc, &(i, inv)| {
            let g = big.generators()[i % 2].clone();
            let g = if inv { ring.inverse_sl(&g) } else { g };
            ring.mul(&acc, &g)
        });
        prop_assert_eq!(direct, stepwise);
    }

    #[test]
    fn symplectic_words_preserve_the_form(letters in prop::collection::vec((0usize..2, any::<bool>()), 1..10),
                                          m in coprime_to(&f(6), 400)) {
        let spec = &*H4;
        let img = spec.reduce_mod(&f(m)).unwrap();
        let ring = *img.ring();
        let w = ring.from_rat(&word(spec, &letters)).unwrap();
        let phi = img.form().unwrap();
        let lhs = ring.mul(&ring.mul(&ring.transpose(&w), phi), &w);
        prop_assert_eq!(&lhs, phi);
        // exactly, too
        let w = word(spec, &letters);
        let form = spec.form().unwrap();
        prop_assert_eq!(&w.transpose().mul(form).unwrap().mul(&w).unwrap(), form);
    }

    #[test]
    fn ring_ignores_redundant_generators(s in nonzero_rat(), letters in prop::collection::vec((0usize..2, any::<bool>()), 1..6)) {
        let gens = vec![catalog::t_matrix(), catalog::k_matrix(&s)];
        let spec = GroupSpec::new(GroupKind::SpecialLinear, gens.clone(), None, None, false).unwrap();
        let mut more = gens.clone();
        more.push(word(&spec, &letters));
        prop_assert_eq!(derive_ring(&gens).unwrap(), derive_ring(&more).unwrap());
    }

    #[test]
    fn bfs_agrees_with_chain(m in 2u64..=200, seeds in prop::collection::vec((0u64..200, 0u64..200, 0u64..200), 1..3)) {
        let ring = MatRing::new(2, m).unwrap();
        let gens: Vec<ModMat> = seeds.iter().map(|&(x, y, z)| sl2_elem(&ring, x, y, z)).collect();
        let img = FiniteImage::new(GroupKind::SpecialLinear, f(m), ring, gens, None).unwrap();
        let chain = order_stabchain(&img, &EngineConfig::default()).unwrap();
        prop_assert!(chain.divides(&img.ambient_order()));
        // large images only bound the order from below
        match order_bfs(&img, 400_000) {
            BfsOutcome::Order(o) => prop_assert_eq!(chain.to_u64(), Some(o)),
            BfsOutcome::Exceeded => prop_assert!(chain.to_u64().unwrap() > 400_000),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subdirect_bounds(a in 2u64..=40, b in 2u64..=40, seeds in prop::collection::vec((0u64..99, 0u64..99, 0u64..99), 1..3)) {
        prop_assume!(a.gcd(&b) == 1);
        let cfg = EngineConfig::default();
        let ring = MatRing::new(2, a * b).unwrap();
        let gens: Vec<ModMat> = seeds.iter().map(|&(x, y, z)| sl2_elem(&ring, x, y, z)).collect();
        let img = FiniteImage::new(GroupKind::SpecialLinear, f(a * b), ring, gens, None).unwrap();
        let whole = img.order(&cfg).unwrap();
        let oa = img.project(&f(a)).unwrap().order(&cfg).unwrap();
        let ob = img.project(&f(b)).unwrap().order(&cfg).unwrap();
        prop_assert!(oa.lcm(&ob).divides(&whole));
        prop_assert!(whole.divides(&oa.mul(&ob)));
    }

    #[test]
    fn kernel_layers_are_bounded(p in prop::sample::select(vec![5u64, 7, 13, 17]), k in 1u32..3) {
        let cfg = EngineConfig::default();
        let lo = order_lifted(&G11, p, k, &cfg).unwrap();
        let hi = order_lifted(&G11, p, k + 1, &cfg).unwrap();
        let ratio = hi.checked_div(&lo).unwrap();
        prop_assert!(ratio.primes().all(|q| q == p));
        prop_assert!(ratio.exponent(p) <= 3);
    }

    #[test]
    fn orders_are_compatible_with_reduction(a in coprime_to(&f(33), 40), c in 1u64..6) {
        let cfg = EngineConfig::default();
        let ab = f(a).mul(&f(c.max(1)).restrict(|p| p != 3 && p != 11));
        let big = G11.reduce_mod(&ab).unwrap();
        let small = G11.reduce_mod(&f(a)).unwrap();
        prop_assert!(small.order(&cfg).unwrap().divides(&big.order(&cfg).unwrap()));
    }

    #[test]
    fn index_divides_along_divisibility(d in 2u64..=60, k in 1u64..=8) {
        for o in [&*O1, &*O2] {
            let dd = o.delta(&f(d)).unwrap();
            let dm = o.delta(&f(d * k)).unwrap();
            prop_assert!(dd.divides(&dm));
        }
    }

    #[test]
    fn index_depends_only_on_the_level_part(m in 2u64..=10_000) {
        for (o, (level, _)) in [(&*O1, &*L1), (&*O2, &*L2)] {
            let m = f(m);
            let g = m.gcd(level);
            let direct = o.spec().reduce_mod(&m).and_then(|img| {
                let full = img.ambient_order();
                Ok(full.checked_div(&img.order(&o.config().engine)?).unwrap())
            });
            // moduli beyond the engine are skipped
            if let Ok(direct) = direct {
                prop_assert_eq!(direct, o.delta(&g).unwrap());
            }
        }
    }

    #[test]
    fn index_is_constant_above_the_level(k in 1u64..=12) {
        for (o, (level, index)) in [(&*O1, &*L1), (&*O2, &*L2)] {
            let m = level.mul(&f(k + 1));
            prop_assert_eq!(&o.delta(&m).unwrap(), index);
        }
    }

    #[test]
    fn quotient_matches_direct_order(m in 2u64..=3_000) {
        let o = &*O1;
        let report = o.closure_index().unwrap();
        let q = o.quotient_descriptor(&report, &f(m)).unwrap();
        prop_assert_eq!(q.a.mul(&q.b).mul(&q.c), f(m));
        prop_assert!(q.a.gcd(&q.c).is_one());
        prop_assert!(q.b.primes().all(|p| q.a.exponent(p) > 0));
        let direct = G1.reduce_mod(&f(m)).unwrap().order(&EngineConfig::default()).unwrap();
        prop_assert_eq!(q.order_phi_m, direct);
    }

    #[test]
    fn large_surjective_primes_stay_out_of_the_level(p in prop::sample::select(vec![7u64, 13, 17, 19, 23, 29, 31])) {
        for (o, (level, index)) in [(&*O1, &*L1), (&*O2, &*L2)] {
            prop_assume!(o.delta_u64(p).unwrap().is_one());
            prop_assert_eq!(&o.delta(&level.mul(&f(p))).unwrap(), index);
            prop_assert_eq!(level.exponent(p), 0);
        }
    }
}

#[test]
fn level_matches_exceptional_primes() {
    for (o, pi) in [(&*O1, set(&[11])), (&*O2, set(&[]))] {
        let r = o.report(&pi, true).unwrap();
        let tilde: BTreeSet<u64> = r.level.primes().collect();
        assert_eq!(tilde, r.pi_tilde.iter().copied().collect());
        assert!(pi.is_subset(&tilde));
        assert!(r.level.is_coprime(o.spec().mu()));
        assert_eq!(o.delta(&r.level).unwrap(), r.closure_index);
    }
}

#[test]
fn trace_is_monotone_along_divisibility() {
    let o = DeltaOracle::new(&G2, LevelConfig::default());
    o.report(&set(&[]), true).unwrap();
    let trace = o.trace();
    for a in &trace {
        for b in &trace {
            if a.modulus.divides(&b.modulus) {
                assert!(a.delta.divides(&b.delta), "{} vs {}", a.modulus, b.modulus);
            }
        }
    }
}

#[test]
fn scans_are_monotone_in_the_bound() {
    for spec in [&*G1, &*G11] {
        let lo = scan_pi(spec, 60).unwrap();
        let hi = scan_pi(spec, 150).unwrap();
        assert!(lo.nonsurjective.is_subset(&hi.nonsurjective));
        let cut: BTreeSet<u64> = hi.nonsurjective.iter().copied().filter(|&p| p <= 60).collect();
        assert_eq!(cut, lo.nonsurjective);
        for c in &hi.checks {
            let d = c.delta.as_ref().unwrap();
            assert_eq!(!d.is_one(), hi.nonsurjective.contains(&c.prime));
            assert!(!spec.mu().primes().any(|q| q == c.prime));
        }
    }
}

#[test]
fn ambient_formulas_match_enumeration() {
    let check = |kind: GroupKind, n: usize, m: u64, gens: Vec<ModMat>, ring: MatRing| {
        let form = (kind == GroupKind::Symplectic).then(|| {
            ring.from_rat(&densikit::group::block_form(n)).unwrap()
        });
        let img = FiniteImage::new(kind, f(m), ring, gens, form).unwrap();
        assert_eq!(order_bfs(&img, 5_000_000), BfsOutcome::Order(full_order(kind, n, &f(m)).to_u64().unwrap()), "{kind} {n} {m}");
    };
    for m in 2..=20u64 {
        let ring = MatRing::new(2, m).unwrap();
        check(GroupKind::SpecialLinear, 2, m, vec![sl2_elem(&ring, 1, 0, 0), sl2_elem(&ring, 0, 1, 0)], ring);
    }
    for m in [2u64, 3] {
        let ring = MatRing::new(3, m).unwrap();
        let gens = [(0, 1), (1, 2), (2, 0)]
            .iter()
            .map(|&(i, j)| ring.from_rat(&RatMatrix::elementary(3, i, j, int(1))).unwrap())
            .collect();
        check(GroupKind::SpecialLinear, 3, m, gens, ring);
    }
    for m in [2u64, 3] {
        let ring = MatRing::new(4, m).unwrap();
        // transvections I + v (v^T J) for the block form J
        let j = densikit::group::block_form(4);
        let vs: [[i64; 4]; 5] = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 1, 0]];
        let mut gens = Vec::new();
        for v in vs.iter().chain([[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 0, 1]].iter()) {
            let vm: Vec<Rat> = v.iter().map(|&x| int(x)).collect();
            let mut g = RatMatrix::identity(4);
            for r in 0..4 {
                for c in 0..4 {
                    let mut s = int(0);
                    for k in 0..4 {
                        s += vm[k].clone() * j.get(k, c).clone();
                    }
                    let e = g.get(r, c).clone() + vm[r].clone() * s;
                    g.set(r, c, e);
                }
            }
            gens.push(ring.from_rat(&g).unwrap());
        }
        check(GroupKind::Symplectic, 4, m, gens, ring);
    }
}
