use super::gen;
use super::oracle::{self, Labeling};
use super::Tally;
use crate::dynamics::{
    compress_state, complementary_pair, concatenate_detailed, evolve, expectation, oscillator_hamiltonian,
    propagator, variance, DensityMatrix, SpectralFunction, StateVector,
};
use crate::fhlogic::{
    alpha_value, decompose_equivariant, fh_apply, modularity_check, orthogonal, refute_density,
    subspace_join, subspace_meet, window, zero_sum_compatible, Atom, FHOperator, FiniteSupportVector,
    SymbolicSubspace, SymbolicTrace,
};
use crate::finitary::{
    diagonalize, functional_calculus, is_intrinsically_effective, EigenSystem, HermitianMatrix, Polynomial,
};
use crate::linalg::{basis_vector, c64, real, CMatrix, CVector, C64};
use crate::measurement::{Elem, Frame, LabelSet, ObjectSet, PartialLabeling, PartitionPlus, Scale};
use crate::socks::{
    flip, inner_t, least_support, tau, FlipAction, PairVector, SignedTensor, TruncatedFockVector,
    DEFAULT_SUPPORT_TOL,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};
use std::f64::consts::{SQRT_2, TAU};

/// Oracle partitions keyed on `(image(h), s)`.
type HatCache = HashMap<(Vec<usize>, Vec<usize>), Option<Vec<Vec<usize>>>>;

pub(super) const NAMES: [&str; 13] = [
    "ideal-partition round trip",
    "information order oracle",
    "pushforward partition oracle",
    "eigen reconstruction",
    "functional calculus",
    "evolution",
    "concatenation",
    "state compression",
    "complementary pair",
    "oscillator spectrum",
    "socks tensors",
    "fh decomposition",
    "subspace lattice",
];

pub(super) fn run(id: u8, t: &mut Tally, rng: &mut ChaCha8Rng) {
    match id {
        1 => ideal_round_trip(t),
        2 => information_order(t),
        3 => pushforward(t),
        4 => eigen_reconstruction(t, rng),
        5 => functional_calculus_consistency(t, rng),
        6 => evolution(t, rng),
        7 => concatenation(t, rng),
        8 => state_compression(t, rng),
        9 => complementarity(t, rng),
        10 => oscillator(t),
        11 => socks_tensors(t, rng),
        12 => fh_decomposition(t, rng),
        13 => subspace_lattice(t, rng),
        _ => unreachable!("ids are checked by the caller"),
    }
}

fn slots(p: &PartitionPlus) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = p
        .blocks()
        .iter()
        .map(|b| {
            let mut s: Vec<usize> = b
                .iter()
                .map(|e| match e {
                    Elem::Distinguished => 0,
                    Elem::Object(i) => i + 1,
                })
                .collect();
            s.sort_unstable();
            s
        })
        .collect();
    blocks.sort();
    blocks
}

fn sorted_blocks(mut blocks: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort();
    blocks
}

fn as_oracle(f: &PartialLabeling) -> Labeling {
    f.entries().clone()
}

/// Bell numbers from the Bell triangle.
fn bell(n: usize) -> usize {
    let mut row = vec![1usize];
    for _ in 0..n {
        let mut next = vec![*row.last().expect("nonempty")];
        for &v in &row {
            next.push(next.last().expect("nonempty") + v);
        }
        row = next;
    }
    row[0]
}

fn ideal_round_trip(t: &mut Tally) {
    for n in 0..=5 {
        let frame = Frame::new(ObjectSet::numbered(n), LabelSet::numbered(n.max(1)));
        let parts = PartitionPlus::enumerate(frame.objects());
        t.check(parts.len() == bell(n + 1), || {
            format!("|X|={n}: {} partitions, expected {}", parts.len(), bell(n + 1))
        });
        for p in parts {
            t.case();
            let Some(members) = t.ok(frame.ideal_members(&p), || format!("members of {:?}", p.named_blocks()))
            else {
                continue;
            };
            if let Some(pi) = t.ok(frame.pi_of_family(&members), || format!("pi of {:?}", p.named_blocks())) {
                t.check(pi == p, || format!("{:?} came back as {:?}", p.named_blocks(), pi.named_blocks()));
            }
            let family: Vec<Labeling> = members.iter().map(as_oracle).collect();
            let expected = Some(slots(&p));
            let got = oracle::family_partition(n, &family).map(sorted_blocks);
            t.check(got == expected, || format!("oracle partition for {:?}: {got:?}", p.named_blocks()));
        }
    }
}

fn information_order(t: &mut Tally) {
    for x in 0..=3 {
        for y in 1..=3 {
            let frame = Frame::new(ObjectSet::numbered(x), LabelSet::numbered(y));
            let ranks: Vec<i64> = (0..y as i64).collect();
            let labelings: Vec<PartialLabeling> = frame.all_labelings().collect();
            for f in &labelings {
                for g in &labelings {
                    t.case();
                    let (fo, go) = (as_oracle(f), as_oracle(g));
                    if let Some(le) = t.ok(frame.le(f, g), || "le".into()) {
                        let expected = oracle::relabel_le(&fo, &go, y);
                        t.check(le == expected, || format!("le({fo:?}, {go:?}) = {le}, oracle {expected}"));
                    }
                    if let Some(le) = t.ok(frame.pref_le(f, g), || "pref_le".into()) {
                        let expected = oracle::monotone_le(&fo, &go, &ranks);
                        t.check(le == expected, || {
                            format!("pref_le({fo:?}, {go:?}) = {le}, oracle {expected}")
                        });
                    }
                }
            }
        }
    }
}

fn pushforward(t: &mut Tally) {
    for x in 0..=4 {
        for y in 1..=3 {
            let frame = Frame::new(ObjectSet::numbered(x), LabelSet::numbered(y));
            // The oracle depends on `h` only through its image.
            let mut cache: HatCache = HashMap::new();
            let scales: Vec<Vec<usize>> = (0..y.pow(x as u32))
                .map(|mut code| {
                    (0..x)
                        .map(|_| {
                            let d = code % y;
                            code /= y;
                            d
                        })
                        .collect()
                })
                .collect();
            for h in oracle::all_maps(y) {
                let image: Vec<usize> = h.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
                for s in &scales {
                    t.case();
                    let Some(p) = t.ok(frame.hat_scalable(&h, &Scale::new(s.clone())), || {
                        format!("hat_scalable h={h:?} s={s:?}")
                    }) else {
                        continue;
                    };
                    let expected = cache
                        .entry((image.clone(), s.clone()))
                        .or_insert_with(|| oracle::hat_partition(&h, s, y).map(sorted_blocks))
                        .clone();
                    let got = Some(slots(&p));
                    t.check(got == expected, || format!("h={h:?} s={s:?}: {got:?} vs oracle {expected:?}"));
                }
            }
        }
    }
}

/// `Σ λ v v†` assembled from the eigenpairs.
fn dense(es: &EigenSystem) -> CMatrix {
    let d = es.dim();
    es.pairs()
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, p| acc + &p.vector * p.vector.adjoint() * real(p.value))
}

fn hermitian(m: CMatrix) -> HermitianMatrix {
    HermitianMatrix::new(m).expect("generated matrices are Hermitian")
}

fn degenerate_spectrum(rng: &mut ChaCha8Rng, d: usize, pool: &[f64]) -> Vec<f64> {
    let distinct = rng.random_range(1..=d.min(pool.len()));
    let mut chosen: Vec<f64> = pool.choose_multiple(rng, distinct).copied().collect();
    while chosen.len() < d {
        let v = chosen[rng.random_range(0..distinct)];
        chosen.push(v);
    }
    chosen.shuffle(rng);
    chosen
}

fn eigen_reconstruction(t: &mut Tally, rng: &mut ChaCha8Rng) {
    for i in 0..100 {
        t.case();
        let d = 1 + i % 8;
        let m = if i % 3 == 0 {
            let values = degenerate_spectrum(rng, d, &[-3.0, -1.0, 0.0, 0.5, 2.0, 4.5]);
            gen::hermitian_with_spectrum(rng, &values)
        } else {
            let scale = rng.random_range(0.1..10.0);
            gen::hermitian(rng, d, scale)
        };
        let Some(es) = t.ok(diagonalize(&hermitian(m.clone())), || format!("case {i}")) else {
            continue;
        };
        // The zero matrix falls back to the absolute error.
        let norm = if m.norm() > 0.0 { m.norm() } else { 1.0 };
        t.within((dense(&es) - &m).norm() / norm, 1e-8, || format!("case {i} reconstruction"));
        let v = CMatrix::from_fn(d, es.count(), |r, c| es.pairs()[c].vector[r]);
        let gram = v.adjoint() * &v - CMatrix::identity(es.count(), es.count());
        t.within(gram.norm(), 1e-9, || format!("case {i} orthonormality"));
        t.check(es.is_full(), || format!("case {i}: {} of {d} eigenvectors", es.count()));
    }
}

fn functional_calculus_consistency(t: &mut Tally, rng: &mut ChaCha8Rng) {
    for i in 0..50 {
        t.case();
        let d = 1 + i % 6;
        let s = if i % 2 == 0 {
            let values = degenerate_spectrum(rng, d, &[-0.8, -0.3, 0.3, 0.8]);
            gen::hermitian_with_spectrum(rng, &values)
        } else {
            let m = gen::hermitian(rng, d, 1.0);
            let n = m.norm();
            m / real(n)
        };
        let pd = rng.random_range(0..=3);
        let qd = rng.random_range(0..=3);
        let p = Polynomial::new(gen::real_coeffs(rng, pd));
        let q = Polynomial::new(gen::real_coeffs(rng, qd));
        let a = oracle::matrix_polynomial(p.coeffs(), &s);
        let b = oracle::matrix_polynomial(q.coeffs(), &s);
        let systems = (
            diagonalize(&hermitian(s.clone())),
            diagonalize(&hermitian(a.clone())),
            diagonalize(&hermitian(b.clone())),
        );
        let (Some(se), Some(ae), Some(be)) = (
            t.ok(systems.0, || format!("case {i} S")),
            t.ok(systems.1, || format!("case {i} p(S)")),
            t.ok(systems.2, || format!("case {i} q(S)")),
        ) else {
            continue;
        };
        let pq = p.mul(&q);
        let pcq = p.compose(&q);
        let checks: [(&str, crate::Result<EigenSystem>, CMatrix); 6] = [
            ("sum", functional_calculus(|l| l[0] + l[1], &[ae.clone(), be.clone()]), &a + &b),
            ("product", functional_calculus(|l| l[0] * l[1], &[ae.clone(), be.clone()]), &a * &b),
            ("square", functional_calculus(|l| l[0] * l[0], std::slice::from_ref(&ae)), &a * &a),
            (
                "composite",
                functional_calculus(|l| p.eval(l[0]), std::slice::from_ref(&be)),
                oracle::matrix_polynomial(pcq.coeffs(), &s),
            ),
            (
                "composition",
                functional_calculus(|l| pcq.eval(l[0]), std::slice::from_ref(&se)),
                oracle::matrix_polynomial(p.coeffs(), &b),
            ),
            ("homomorphism", functional_calculus(|l| pq.eval(l[0]), std::slice::from_ref(&se)), &a * &b),
        ];
        for (what, got, expected) in checks {
            if let Some(es) = t.ok(got, || format!("case {i} {what}")) {
                t.within((dense(&es) - expected).norm(), 1e-8, || format!("case {i} {what}"));
            }
        }
    }
}

fn evolution(t: &mut Tally, rng: &mut ChaCha8Rng) {
    for i in 0..50 {
        t.case();
        let d = 1 + i % 8;
        let scale = rng.random_range(0.2..3.0);
        let h = gen::hermitian(rng, d, scale);
        let psi = StateVector::new(gen::unit_vector(rng, d)).expect("unit");
        let t1 = rng.random_range(-10.0..10.0);
        let t2 = rng.random_range(-10.0..10.0);
        let Some(es) = t.ok(diagonalize(&hermitian(h.clone())), || format!("case {i}")) else {
            continue;
        };
        let (Some(v1), Some(v12), Some(u)) = (
            t.ok(evolve(&es, &psi, t1), || format!("case {i} evolve")),
            t.ok(evolve(&es, &psi, t1 + t2), || format!("case {i} evolve")),
            t.ok(propagator(&es, t1), || format!("case {i} propagator")),
        ) else {
            continue;
        };
        t.within((v1.vector().norm() - 1.0).abs(), 1e-10, || format!("case {i} norm"));
        if let Some(v2) = t.ok(evolve(&es, &v1, t2), || format!("case {i} evolve")) {
            t.within((v2.vector() - v12.vector()).norm(), 1e-9, || format!("case {i} group law"));
        }
        let exact = oracle::expm(&(&h * c64(0.0, -t1)));
        t.within((&exact * psi.vector() - v1.vector()).norm(), 1e-8, || format!("case {i} state vs expm"));
        t.within((&exact - u.matrix()).norm(), 1e-8, || format!("case {i} propagator vs expm"));
    }
}

fn minus_i(m: &CMatrix) -> CMatrix {
    m * c64(0.0, -1.0)
}

fn concatenation(t: &mut Tally, rng: &mut ChaCha8Rng) {
    for i in 0..70 {
        t.case();
        let d = 1 + i % 6;
        let commuting = i >= 50;
        let (a, b, expected) = if commuting {
            let u = gen::unitary(rng, d);
            let (xs, ys, sums) = loop {
                let xs: Vec<f64> = (0..d).map(|_| rng.random_range(-7.0..7.0)).collect();
                let ys: Vec<f64> = (0..d).map(|_| rng.random_range(-7.0..7.0)).collect();
                let sums: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| (x + y).rem_euclid(TAU)).collect();
                if sums.iter().all(|s| s.min(TAU - s) > 1e-6) {
                    break (xs, ys, sums);
                }
            };
            let conj = |v: &[f64]| &u * crate::linalg::real_diagonal(v) * u.adjoint();
            (conj(&xs), conj(&ys), Some(sums))
        } else {
            let sa = rng.random_range(0.5..4.0);
            let sb = rng.random_range(0.5..4.0);
            (gen::hermitian(rng, d, sa), gen::hermitian(rng, d, sb), None)
        };
        let Some(cat) = t.ok(concatenate_detailed(&hermitian(a.clone()), &hermitian(b.clone())), || {
            format!("case {i}")
        }) else {
            continue;
        };
        let c = cat.c.matrix();
        let r = oracle::expm(&minus_i(&a)) * oracle::expm(&minus_i(&b));
        t.within((oracle::expm(&minus_i(c)) - r).norm(), 1e-8, || format!("case {i} exp(-iC)"));
        t.within((c - c.adjoint()).norm(), 1e-10, || format!("case {i} Hermitian defect"));
        t.check(cat.angles.iter().all(|&x| (0.0..TAU).contains(&x)), || {
            format!("case {i}: angles {:?} outside [0, 2π)", cat.angles)
        });
        let mut angles = cat.angles.clone();
        angles.sort_by(f64::total_cmp);
        let mut spectrum: Vec<f64> = c.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        spectrum.sort_by(f64::total_cmp);
        let drift = angles.iter().zip(&spectrum).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        t.within(drift, 1e-8, || format!("case {i} spectrum of C vs angles"));
        if let Some(mut sums) = expected {
            sums.sort_by(f64::total_cmp);
            let err = angles.iter().zip(&sums).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            t.within(err, 1e-9, || format!("case {i} modular sums"));
        }
    }
}

fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

fn state_compression(t: &mut Tally, rng: &mut ChaCha8Rng) {
    for i in 0..20 {
        t.case();
        let d = 3 + i % 6;
        let values = degenerate_spectrum(rng, d.min(5) - 1, &[-1.5, -0.5, 0.0, 0.75, 1.25]);
        let mut values = values;
        while values.len() < d {
            let v = values[rng.random_range(0..values.len())];
            values.push(v);
        }
        let tm = gen::hermitian_with_spectrum(rng, &values);
        let dm = gen::density(rng, d);
        let Some(te) = t.ok(diagonalize(&hermitian(tm.clone())), || format!("case {i}")) else {
            continue;
        };
        let Some(dens) = t.ok(DensityMatrix::new(dm.clone()), || format!("case {i} density")) else {
            continue;
        };
        let Some(b) = t.ok(compress_state(&te, &dens), || format!("case {i} compress")) else {
            continue;
        };
        let bm = b.matrix();
        t.within((&tm * bm - bm * &tm).norm(), 1e-9, || format!("case {i} [T, B]"));
        for degree in 0..=6 {
            let coeffs = gen::real_coeffs(rng, degree);
            let ft = oracle::matrix_polynomial(&coeffs, &tm);
            let on_d = trace(&(&ft * &dm));
            let on_b = trace(&(&ft * bm));
            t.within((on_d - on_b).norm(), 1e-9, || format!("case {i} degree {degree} tr(fB)"));
            let f = SpectralFunction::Poly(Polynomial::new(coeffs));
            if let Some(e) = t.ok(expectation(&f, &te, &dens), || format!("case {i} expectation")) {
                t.within((on_d - real(e)).norm(), 1e-9, || format!("case {i} degree {degree} expectation"));
            }
        }
    }
}

fn complementarity(t: &mut Tally, rng: &mut ChaCha8Rng) {
    for k in 2..=3 {
        for d in 2 * k + 1..=2 * k + 3 {
            for draw in 0..4 {
                t.case();
                let a0 = rng.random_range(-2.0..2.0);
                let gap = if draw == 0 {
                    SQRT_2
                } else {
                    rng.random_range(0.25..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }
                };
                let mut alphas = vec![a0, a0 - gap];
                alphas.extend((2..k).map(|_| rng.random_range(-2.0..2.0)));
                let seed = rng.random();
                let label = format!("k={k} d={d} gap={gap:.6}");
                let Some(pair) = t.ok(complementary_pair(d, &alphas, seed), || label.clone()) else {
                    continue;
                };
                t.check(pair.intersection.len() == 1, || {
                    format!("{label}: intersection has dimension {}", pair.intersection.len())
                });
                if let Some(v) = pair.intersection.first() {
                    t.within(1.0 - v[0].norm(), 1e-12, || format!("{label}: intersection vs e0"));
                }
                let e0 = basis_vector(d, 0);
                let w = StateVector::new(e0.clone()).expect("unit");
                let (Some(vs), Some(vt)) = (
                    t.ok(variance(&pair.s, &w), || format!("{label} V(S)")),
                    t.ok(variance(&pair.t, &w), || format!("{label} V(T)")),
                ) else {
                    continue;
                };
                let brute = oracle::centered_variance(&dense(&pair.s), &e0);
                let brute_t = oracle::centered_variance(&dense(&pair.t), &e0);
                t.within((vs - vt).abs(), 1e-12, || format!("{label}: V(S) vs V(T)"));
                t.within((vs - brute).abs(), 1e-12, || format!("{label}: V(S) vs oracle"));
                t.within((vt - brute_t).abs(), 1e-12, || format!("{label}: V(T) vs oracle"));
                let closed = gap * gap / 4.0;
                t.within((brute - closed).abs(), 1e-12 * (1.0 + closed), || format!("{label}: gap²/4"));
                if draw == 0 {
                    t.within((vs - 0.5).abs(), 1e-12, || format!("{label}: variance 1/2"));
                    t.within((vs * vt - 0.25).abs(), 1e-12, || format!("{label}: product 1/4"));
                }
            }
        }
    }
}

fn oscillator(t: &mut Tally) {
    t.case();
    let Some(h) = t.ok(oscillator_hamiltonian(400, 10.0, 1.0, 1.0, 1.0), || "assemble".into()) else {
        return;
    };
    let Some(es) = t.ok(diagonalize(&h), || "diagonalize".into()) else {
        return;
    };
    t.check(es.is_full() && es.count() == 400, || format!("{} eigenvectors", es.count()));
    t.check(is_intrinsically_effective(&es), || "not intrinsically effective".into());
    let values = es.values();
    let gaps: Vec<f64> = values.windows(2).take(5).map(|w| w[1] - w[0]).collect();
    for (j, g) in gaps.iter().enumerate() {
        t.within((g / gaps[0] - 1.0).abs(), 0.01, || format!("gap {j} vs gap 0"));
        t.within((g - 1.0).abs(), 0.01, || format!("gap {j} vs ħω"));
    }
    t.within((values[0] - 0.5).abs(), 0.01, || "ground level".into());
}

fn rational(rng: &mut ChaCha8Rng) -> C64 {
    let q = f64::from(rng.random_range(1..=4));
    c64(
        f64::from(rng.random_range(-6..=6)) / q,
        f64::from(rng.random_range(-6..=6)) / q,
    )
}

fn socks_tensors(t: &mut Tally, rng: &mut ChaCha8Rng) {
    for i in 0..50 {
        t.case();
        let n = 1 + i % 6;
        let xs: Vec<PairVector> = (0..n).map(|k| PairVector::new(k, rational(rng))).collect();
        let ys: Vec<PairVector> = (0..n).map(|k| PairVector::new(k, rational(rng))).collect();
        let explicit = |v: &[PairVector]| -> Vec<[C64; 2]> { v.iter().map(|x| [x.value, -x.value]).collect() };
        let (ex, ey) = (explicit(&xs), explicit(&ys));
        let closed = xs
            .iter()
            .zip(&ys)
            .fold(real(2f64.powi(n as i32)), |acc, (x, y)| acc * x.value * y.value.conj());
        let bound = 1e-12 * (1.0 + closed.norm());
        let summed = oracle::tensor_inner(&ex, &ey);
        let product = oracle::product_of_inners(&ex, &ey);
        t.within((summed - closed).norm(), bound, || format!("case {i} φ-sum vs closed form"));
        t.within((product - closed).norm(), bound, || format!("case {i} product vs closed form"));
        let pairwise = xs.iter().zip(&ys).fold(real(1.0), |acc, (x, y)| acc * x.inner(y));
        t.within((pairwise - product).norm(), bound, || format!("case {i} pair inner products"));
        let lib = tau(&xs).and_then(|x| tau(&ys).and_then(|y| inner_t(&x, &y)));
        if let Some(z) = t.ok(lib, || format!("case {i} inner_T")) {
            t.within((z - summed).norm(), bound, || format!("case {i} inner_T vs φ-sum"));
        }
    }

    for n in 0..=5 {
        for draw in 0..5 {
            t.case();
            let xs: Vec<PairVector> = (0..n).map(|k| PairVector::new(k, rational(rng))).collect();
            let Some(x) = t.ok(tau(&xs), || format!("N={n} tau")) else {
                continue;
            };
            let table = x.table();
            let scale = table.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let mut defect: f64 = 0.0;
            for phi in 0..table.len() {
                for k in 0..n {
                    defect = defect.max((table[phi ^ (1 << k)] + table[phi]).norm());
                }
            }
            t.within(defect, 1e-12 * (1.0 + scale), || format!("N={n} draw {draw} single swaps"));
            t.check(x.is_antisymmetric_exhaustive(1e-12 * (1.0 + scale)), || {
                format!("N={n} draw {draw}: exhaustive check failed")
            });
            if n > 0 {
                let mut broken = table.to_vec();
                broken[1] += real(1.0);
                t.check(SignedTensor::new(n, broken).is_err(), || format!("N={n}: broken table accepted"));
            }
        }
    }

    for m in 0..=6usize {
        for pattern in 0..1usize << (m + 1) {
            t.case();
            let coeffs: Vec<C64> = (0..=m)
                .map(|k| {
                    if pattern >> k & 1 == 1 {
                        let z = rational(rng);
                        if z.norm() == 0.0 {
                            real(1.0)
                        } else {
                            z
                        }
                    } else {
                        C64::default()
                    }
                })
                .collect();
            let Some(v) = t.ok(TruncatedFockVector::new(coeffs.clone()), || format!("M={m}")) else {
                continue;
            };
            let sign = |f: usize, n: usize| if (f & ((1 << n) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            let fixes = |f: usize| coeffs.iter().enumerate().all(|(n, c)| *c * sign(f, n) == *c);
            for f in 0..1usize << m {
                let lib = flip(&FlipAction::new((0..m).filter(|k| f >> k & 1 == 1)), &v);
                let same = lib
                    .coeffs()
                    .iter()
                    .enumerate()
                    .all(|(n, c)| *c == coeffs[n] * sign(f, n));
                t.check(same, || format!("M={m} pattern {pattern:b}: flip {f:b} disagrees"));
            }
            let full = (1usize << m) - 1;
            let supports: Vec<usize> = (0..1usize << m)
                .filter(|&e| (0..1usize << m).filter(|&f| f & e == 0).all(fixes))
                .collect();
            let least = supports.iter().fold(full, |acc, &e| acc & e);
            t.check(supports.contains(&least), || format!("M={m} pattern {pattern:b}: no least support"));
            let expected: BTreeSet<usize> = (0..m).filter(|k| least >> k & 1 == 1).collect();
            let got = least_support(&v, DEFAULT_SUPPORT_TOL);
            t.check(got == expected, || format!("M={m} pattern {pattern:b}: {got:?} vs oracle {expected:?}"));
        }
    }
}

fn dense_vector(v: &FiniteSupportVector, atoms: &[Atom]) -> CVector {
    CVector::from_iterator(atoms.len(), atoms.iter().map(|&a| v.get(a)))
}

fn fh_decomposition(t: &mut Tally, rng: &mut ChaCha8Rng) {
    for i in 0..50 {
        t.case();
        let m = 3 + (i % 10) as u32;
        let win = window(m);
        let s = rng.random_range(0..=m as usize - 2);
        let support = gen::atoms(rng, &win, s);
        let Some(op) = t.ok(gen::fh_operator(rng, support), || format!("case {i}")) else {
            continue;
        };
        let canon = op.canonicalize(0.0);
        t.check(canon.is_canonical(0.0), || format!("case {i}: canonical form not canonical"));
        let Some(dense) = t.ok(canon.expand(&win), || format!("case {i} expand")) else {
            continue;
        };
        if let Some(back) = t.ok(decompose_equivariant(&dense, &win, 0.0), || format!("case {i} decompose")) {
            t.check(back == canon, || format!("case {i}: round trip changed support {:?}", canon.support()));
        }
        let v = gen::sparse_vector(rng, &win);
        let image = fh_apply(&op, &v);
        let err = (dense_vector(&image, &win) - &dense * dense_vector(&v, &win)).norm();
        t.within(err, 1e-12, || format!("case {i} action vs dense matrix"));
    }

    for i in 0..50 {
        t.case();
        let m = 1 + (i % 10) as u32;
        let win = window(m);
        let s = rng.random_range(0..=m as usize);
        let support = gen::atoms(rng, &win, s);
        let Some(mut op) = t.ok(gen::fh_operator(rng, support), || format!("case {i}")) else {
            continue;
        };
        let compatible = i % 2 == 0;
        if compatible {
            let mut f = op.matrix().clone();
            for j in 0..f.ncols() {
                let off: C64 = (0..f.nrows()).filter(|&r| r != j).map(|r| f[(r, j)]).sum();
                f[(j, j)] = op.tail() - off;
            }
            op = FHOperator::new(op.support().to_vec(), f, op.tail()).expect("same shape");
        }
        let probes: Vec<Atom> = win.iter().copied().chain([Atom(m + 1), Atom(m + 2)]).collect();
        let mut preserved = true;
        for (j, &a) in probes.iter().enumerate() {
            for &b in &probes[j + 1..] {
                let w = fh_apply(&op, &FiniteSupportVector::difference(a, b));
                preserved &= w.coordinate_sum().norm() <= 1e-9;
            }
        }
        let lib = zero_sum_compatible(&op, 1e-9);
        t.check(lib == preserved, || format!("case {i}: criterion {lib}, probes {preserved}"));
        t.check(!compatible || preserved, || format!("case {i}: adjusted operator fails the probes"));
    }
}

const DENSE_ATOMS: u32 = 9;

/// The subspace inside `ℓ2(a1..a9)`; the atoms past the generator window stand
/// in for the infinite tail.
fn dense_subspace(s: &SymbolicSubspace) -> CMatrix {
    let atoms = window(DENSE_ATOMS);
    let mut columns: Vec<CVector> = s.finite_part().iter().map(|v| dense_vector(v, &atoms)).collect();
    if let Some(excluded) = s.cofinite_excluding() {
        for (k, a) in atoms.iter().enumerate() {
            if !excluded.contains(a) {
                columns.push(basis_vector(atoms.len(), k));
            }
        }
    }
    let n = atoms.len();
    oracle::column_space(&CMatrix::from_fn(n, columns.len(), |r, c| columns[c][r]))
}

fn projector_gap(a: &CMatrix, b: &CMatrix) -> f64 {
    (oracle::dense_projector(a) - oracle::dense_projector(b)).norm()
}

fn finite_subspace(rng: &mut ChaCha8Rng, win: &[Atom]) -> SymbolicSubspace {
    let count = rng.random_range(0..=3);
    let vectors = (0..count)
        .map(|_| {
            let k = rng.random_range(1..=win.len());
            let support = gen::atoms(rng, win, k);
            gen::sparse_vector(rng, &support)
        })
        .collect();
    SymbolicSubspace::span(vectors).expect("finite spans are valid")
}

fn subspace_lattice(t: &mut Tally, rng: &mut ChaCha8Rng) {
    let win = window(6);
    for i in 0..250 {
        t.case();
        let triple = if i < 200 {
            (gen::subspace(rng, &win), gen::subspace(rng, &win), gen::subspace(rng, &win))
        } else {
            let small = window(4);
            (
                Ok(finite_subspace(rng, &small)),
                Ok(finite_subspace(rng, &small)),
                Ok(finite_subspace(rng, &small)),
            )
        };
        let (Some(x), Some(y), Some(z)) = (
            t.ok(triple.0, || format!("triple {i} x")),
            t.ok(triple.1, || format!("triple {i} y")),
            t.ok(triple.2, || format!("triple {i} z")),
        ) else {
            continue;
        };
        t.check(modularity_check(&x, &y, &z), || format!("triple {i}: shearing identity fails"));
        let (dx, dy, dz) = (dense_subspace(&x), dense_subspace(&y), dense_subspace(&z));
        let lhs = oracle::dense_meet(&dx, &oracle::dense_join(&dy, &dz));
        let inner = oracle::dense_meet(&dy, &oracle::dense_join(&dx, &dz));
        let rhs = oracle::dense_meet(&dx, &oracle::dense_join(&inner, &dz));
        t.within(projector_gap(&lhs, &rhs), 1e-8, || format!("triple {i}: dense shearing identity"));
        let symbolic = subspace_meet(&x, &subspace_join(&y, &z));
        t.within(projector_gap(&dense_subspace(&symbolic), &lhs), 1e-8, || {
            format!("triple {i}: symbolic x∧(y∨z) vs dense")
        });
        let laws = [
            subspace_meet(&x, &y).same_as(&subspace_meet(&y, &x)),
            subspace_join(&x, &y).same_as(&subspace_join(&y, &x)),
            subspace_meet(&x, &subspace_join(&x, &y)).same_as(&x),
            subspace_join(&x, &subspace_meet(&x, &y)).same_as(&x),
            subspace_meet(&x, &x).same_as(&x),
            subspace_join(&x, &x).same_as(&x),
        ];
        t.check(laws.iter().all(|&ok| ok), || format!("triple {i}: lattice laws {laws:?}"));
    }

    t.check(alpha_value(&SymbolicSubspace::zero()) == 0, || "α(0) ≠ 0".into());
    t.check(alpha_value(&SymbolicSubspace::cofinite([])) == 1, || "α(ℓ2(A)) ≠ 1".into());
    for i in 0..60 {
        t.case();
        let size = 1 + i % 4;
        let u = gen::unitary(rng, win.len());
        let mut assigned: Vec<Vec<FiniteSupportVector>> = vec![Vec::new(); size];
        for c in 0..win.len() {
            let owner = rng.random_range(0..=size);
            if owner < size {
                let col = u.column(c);
                assigned[owner].push(FiniteSupportVector::new(win.iter().enumerate().map(|(r, &a)| (a, col[r]))));
            }
        }
        let with_cofinite = rng.random_bool(0.5);
        let family: Vec<SymbolicSubspace> = assigned
            .into_iter()
            .enumerate()
            .map(|(j, vs)| {
                let tail = (j == 0 && with_cofinite).then(|| win.iter().copied().collect());
                SymbolicSubspace::new(vs, tail).expect("valid family member")
            })
            .collect();
        for (j, a) in family.iter().enumerate() {
            for b in &family[j + 1..] {
                t.check(orthogonal(a, b), || format!("family {i}: members {j} not orthogonal"));
            }
        }
        let join = family.iter().fold(SymbolicSubspace::zero(), |acc, s| subspace_join(&acc, s));
        let total: u32 = family.iter().map(|s| u32::from(alpha_value(s))).sum();
        t.check(u32::from(alpha_value(&join)) == total, || {
            format!("family {i}: α(join) = {}, Σα = {total}", alpha_value(&join))
        });
        t.check(total == u32::from(with_cofinite), || format!("family {i}: Σα = {total}"));
    }

    for i in 0..20 {
        t.case();
        let m = 2 + (i % 5) as u32;
        let w = window(m);
        let s = rng.random_range(1..=m as usize);
        let support = gen::atoms(rng, &w, s);
        let genuine = i % 2 == 0;
        let (f, tail) = if genuine {
            (gen::density(rng, s), 0.0)
        } else {
            (gen::hermitian(rng, s, 1.0), gen::dyadic(rng, true))
        };
        let Some(d) = t.ok(FHOperator::new(support, f, real(tail)), || format!("candidate {i}")) else {
            continue;
        };
        let Some(r) = t.ok(refute_density(&d), || format!("candidate {i}")) else {
            continue;
        };
        t.check(r.refutes(), || format!("candidate {i}: no refutation"));
        t.check(r.alpha == 1, || format!("candidate {i}: α(P_E) = {}", r.alpha));
        t.check(r.witness.finite_dim() == 0, || format!("candidate {i}: witness has a finite part"));
        let excluded = r.witness.cofinite_excluding().cloned().unwrap_or_default();
        t.check(r.witness.is_cofinite() && d.support().iter().all(|a| excluded.contains(a)), || {
            format!("candidate {i}: witness meets the support")
        });
        let outside: Vec<Atom> = w
            .iter()
            .copied()
            .chain((1..=3).map(|k| Atom(m + k)))
            .filter(|a| !excluded.contains(a))
            .collect();
        let scalar = outside
            .iter()
            .all(|&a| fh_apply(&d, &FiniteSupportVector::unit(a)).approx_eq(&FiniteSupportVector::unit(a).scaled(real(tail)), 0.0));
        t.check(scalar, || format!("candidate {i}: operator is not scalar on the witness"));
        let expected = if tail == 0.0 {
            SymbolicTrace::Finite(C64::default())
        } else {
            SymbolicTrace::Infinite
        };
        t.check(r.trace == expected, || format!("candidate {i}: trace {:?}", r.trace));
    }
}
