//! Acceptance criteria 1 to 14. Each check prints one PASS/FAIL line to
//! stderr (uncaptured) and fails if it misses its time budget.
//!
//! Slow items are `#[ignore]`d; run them with `cargo test --release
//! --test acceptance -- --ignored`.

use std::collections::{BTreeSet, HashSet};
use std::io::Write;
use std::time::{Duration, Instant};

use necs_core::asymptotics::{
    characteristic_residual, constants, eval_m, eval_m_prime, find_alpha, find_beta, find_tau,
    gcd_ratio_check, identity_residuals, point, ratio_check,
};
use necs_core::counting::{count_from_primitive, count_size_gcd, lcm_value_count};
use necs_core::ecs::{enumerate_ecs, EcsConfig, SearchStatus};
use necs_core::enumeration::{enumerate_necs, for_each_necs, render_table, shift_class_count};
use necs_core::polybasis::{backward_difference, binomial_coeffs, BinomialTable};
use necs_core::series::{
    a_series, am_series, mobius_series, phi_series, schroeder_series, IntSeries,
};
use necs_core::trees::enumerate_trees;
use necs_core::CoveringSystem;
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

const TABLE1: &str = include_str!("../../../data/table1.tsv");
const TABLE2: &str = include_str!("../../../data/table2.csv");

const TAU: &str = "0.32299391330283353998122564696308569320205174841752276244233373344634953499";
const BETA: &str = "-0.562976540744649358189645954216416402249939799218087618317349878994076506622";
const ALPHA: &str = "0.580294623807326723064776237226780436649";
const RHO: &str = "0.18223393401633630828235226904174072905168066104";
const M2: &str = "-4.426886252469575251674551833111186610459374194161738";
const GAMMA: &str = "5.48745218829746214756744529323030925532004291024";
const C: &str = "0.08094229418609730035861577123355531751035381267";
const S: [usize; 12] = [1, 1, 2, 4, 10, 26, 75, 226, 718, 2368, 8083, 28367];
const T: [usize; 12] = [1, 1, 2, 3, 6, 8, 15, 18, 31, 35, 56, 62];

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs one criterion, reports it, and panics on failure or overrun.
fn criterion(id: &str, title: &str, budget: Duration, body: impl FnOnce() -> Check) {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let result = result.and_then(|()| {
        ensure(elapsed <= budget, || {
            format!("took {elapsed:.2?}, budget {budget:?}")
        })
    });
    let line = match &result {
        Ok(()) => format!("PASS {id}: {title} ({elapsed:.2?})\n"),
        Err(e) => format!("FAIL {id}: {title} ({elapsed:.2?}): {e}\n"),
    };
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    if let Err(e) = result {
        panic!("criterion {id} failed: {e}");
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn prefix(s: &str, frac: usize) -> &str {
    let dot = s.find('.').unwrap();
    &s[..(dot + 1 + frac).min(s.len())]
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn c01_reversion_coefficients() {
    criterion(
        "1",
        "coefficients 1..8 of the reversion of M",
        secs(1),
        || {
            let a = mobius_series(8).revert(8).map_err(|e| e.to_string())?;
            let got = &a.coeffs()[1..=8];
            ensure(
                got == ints(&[1, 1, 3, 10, 39, 160, 691, 3081]).as_slice(),
                || format!("{got:?}"),
            )
        },
    );
}

#[test]
fn c02_functional_equation() {
    criterion("2", "M(A(x)) = x through order 64", secs(30), || {
        let a = a_series(64);
        let composed = mobius_series(64)
            .compose(&a, 64)
            .map_err(|e| e.to_string())?;
        ensure(composed == IntSeries::x(64), || {
            "composition differs from x".into()
        })
    });
}

#[test]
fn c03_size_gcd_table() {
    criterion(
        "3",
        "size/gcd table through 13 and row sums through 22",
        secs(60),
        || {
            let table = count_size_gcd(22);
            ensure(table.truncated(13).to_csv() == TABLE2, || {
                "table through 13 differs from golden".into()
            })?;
            let a = a_series(22);
            for k in 1..=22 {
                let sum = BigInt::from(table.row_sum(k));
                ensure(&sum == a.coeff(k), || {
                    format!("row {k}: {sum} vs {}", a.coeff(k))
                })?;
            }
            ensure(table.row_sum(13) == BigUint::from(7_266_979u32), || {
                "row 13 total".into()
            })
        },
    );
}

#[test]
fn c04_power_sums() {
    criterion(
        "4",
        "A^n = sum over d of A_(nd), n = 2..6, order 24",
        secs(60),
        || {
            let order = 24;
            let a = a_series(order);
            for n in 2..=6u32 {
                let lhs = a.power(n, order);
                let mut rhs = IntSeries::zero(order);
                let mut d = 1;
                while (n * d) as usize <= order {
                    rhs = rhs.add(&am_series(n * d, order));
                    d += 1;
                }
                ensure(lhs == rhs, || format!("n = {n}"))?;
            }
            Ok(())
        },
    );
}

#[test]
fn c05_enumeration() {
    criterion(
        "5",
        "enumeration sizes 1..10 without duplicates; Table 1 layout",
        secs(300),
        || {
            let a = a_series(10);
            for k in 1..=10 {
                let mut seen = HashSet::new();
                let mut n = 0u64;
                for_each_necs(k, None, |c| {
                    n += 1;
                    seen.insert(c.clone());
                });
                let expect = a.coeff(k).clone();
                ensure(BigInt::from(n) == expect, || {
                    format!("k = {k}: {n} systems, expected {expect}")
                })?;
                ensure(seen.len() as u64 == n, || {
                    format!("k = {k}: {} duplicates", n - seen.len() as u64)
                })?;
            }
            ensure(render_table(4) == TABLE1, || {
                "table of sizes <= 4 differs from golden".into()
            })
        },
    );
}

#[test]
fn c06_tree_oracle() {
    criterion(
        "6",
        "images of split trees and Schröder counts, sizes 1..9",
        secs(300),
        || {
            let a = a_series(9);
            let schroeder = schroeder_series(9);
            for k in 1..=9 {
                let trees = enumerate_trees(k);
                ensure(BigInt::from(trees.len()) == *schroeder.coeff(k), || {
                    format!("k = {k}: {} trees", trees.len())
                })?;
                let images: HashSet<CoveringSystem> = trees.iter().map(|t| t.chi()).collect();
                ensure(BigInt::from(images.len()) == *a.coeff(k), || {
                    format!("k = {k}: {} images", images.len())
                })?;
                if k <= 8 {
                    let direct: HashSet<CoveringSystem> =
                        enumerate_necs(k, None).into_iter().collect();
                    ensure(direct == images, || format!("k = {k}: generators disagree"))?;
                }
            }
            Ok(())
        },
    );
}

#[test]
fn c07_shift_classes() {
    criterion("7", "shift classes s(k) for k <= 10", secs(600), || {
        for k in 1..=10 {
            let s = shift_class_count(k);
            ensure(s == S[k - 1], || {
                format!("s({k}) = {s}, expected {}", S[k - 1])
            })?;
        }
        Ok(())
    });
}

#[test]
#[ignore = "slow: s(11) and s(12)"]
fn c07_shift_classes_slow() {
    criterion("7 (slow)", "shift classes s(11), s(12)", secs(3600), || {
        for k in 11..=12 {
            let s = shift_class_count(k);
            ensure(s == S[k - 1], || {
                format!("s({k}) = {s}, expected {}", S[k - 1])
            })?;
        }
        Ok(())
    });
}

#[test]
fn c08_distinct_lcms() {
    criterion(
        "8",
        "distinct lcm values t(k) for k <= 12",
        secs(60),
        || {
            for k in 1..=12 {
                let t = lcm_value_count(k);
                ensure(t == T[k - 1], || {
                    format!("t({k}) = {t}, expected {}", T[k - 1])
                })?;
            }
            Ok(())
        },
    );
}

#[test]
fn c09_constants() {
    criterion(
        "9",
        "certified constants against printed digits",
        secs(60),
        || {
            let err = |e: necs_core::Error| e.to_string();
            let k = constants(60).map_err(err)?;
            ensure(k.tau.matches_printed(prefix(TAU, 50)), || {
                format!("tau {}", k.tau)
            })?;
            for (name, x, printed) in [
                ("rho", &k.rho, RHO),
                ("gamma", &k.gamma, GAMMA),
                ("M''(tau)", &k.m2_tau, M2),
                ("c", &k.c, C),
            ] {
                ensure(x.matches_printed(printed), || format!("{name} {x}"))?;
            }
            ensure(C.len() - 2 >= 40 && RHO.len() - 2 >= 40, || {
                "fewer than 40 printed digits".into()
            })?;
            let alpha = find_alpha(45).map_err(err)?;
            ensure(alpha.matches_printed(ALPHA), || format!("alpha {alpha}"))?;
            let beta = find_beta(50).map_err(err)?;
            ensure(beta.matches_printed(prefix(BETA, 50)), || {
                format!("beta {beta}")
            })?;
            let ma = eval_m_prime(&alpha).map_err(err)?;
            ensure(ma.matches_printed("-1.5863869"), || {
                format!("M'(alpha) {ma}")
            })?;
            let m07 = eval_m(&point("0.7", 20).map_err(err)?).map_err(err)?;
            ensure(m07.neg().matches_printed("0.2582108"), || {
                format!("M(0.7) {m07}")
            })?;
            for (name, x, printed) in [
                ("tau", &k.tau, "0.3229939"),
                ("c", &k.c, "0.0809423"),
                ("gamma", &k.gamma, "5.4874522"),
            ] {
                ensure(x.matches_printed(printed), || format!("{name} to 7 digits"))?;
            }
            Ok(())
        },
    );
}

#[test]
#[ignore = "slow: full printed digits of tau and beta"]
fn c09_constants_slow() {
    criterion(
        "9 (slow)",
        "tau to 74 digits at D = 80, beta to 75 digits",
        secs(600),
        || {
            let err = |e: necs_core::Error| e.to_string();
            let k = constants(80).map_err(err)?;
            ensure(k.tau.matches_printed(TAU), || format!("tau {}", k.tau))?;
            let tau = find_tau(80).map_err(err)?;
            ensure(tau.matches_printed(TAU), || format!("tau {tau}"))?;
            let beta = find_beta(80).map_err(err)?;
            ensure(beta.matches_printed(BETA), || format!("beta {beta}"))
        },
    );
}

#[test]
fn c10_phi_coefficients() {
    criterion(
        "10",
        "phi coefficients 0..9 and nonnegativity through 200",
        secs(10),
        || {
            let phi = phi_series(200);
            ensure(
                phi.coeffs()[..10] == ints(&[1, 1, 2, 3, 6, 9, 17, 28, 50, 83]),
                || format!("{:?}", &phi.coeffs()[..10]),
            )?;
            let neg = phi.coeffs().iter().position(|c| c.is_negative());
            ensure(neg.is_none(), || format!("phi_{} < 0", neg.unwrap()))
        },
    );
}

#[test]
fn c11_identity_residuals() {
    criterion(
        "11",
        "series identity residuals at tau below 1e-30",
        secs(10),
        || {
            let err = |e: necs_core::Error| e.to_string();
            let tau = find_tau(40).map_err(err)?;
            let res = identity_residuals(&tau, 30).map_err(err)?;
            ensure(res.lambert.certainly_below(30), || {
                format!("lambert {}", res.lambert)
            })?;
            ensure(res.derivative.certainly_below(30), || {
                format!("derivative {}", res.derivative)
            })?;
            let ch = characteristic_residual(&tau).map_err(err)?;
            ensure(ch.certainly_below(30), || format!("characteristic {ch}"))
        },
    );
}

#[test]
fn c12_binomial_basis() {
    criterion(
        "12",
        "binomial-basis polynomials, diagonals, backward differences",
        secs(60),
        || {
            let printed: [&[i64]; 6] = [
                &[1],
                &[3, 1],
                &[10, 6, 1],
                &[39, 29, 9, 1],
                &[160, 138, 57, 12, 1],
                &[691, 654, 324, 94, 15, 1],
            ];
            for (i, p) in printed.iter().enumerate() {
                let got = binomial_coeffs(i + 1).coeffs;
                ensure(got == ints(p), || format!("f_{}: {got:?}", i + 1))?;
            }
            let t = count_size_gcd(22);
            for n in 1..=6 {
                let f = binomial_coeffs(n);
                for g in n + 1..=16 {
                    let v = f.eval(g as u64);
                    ensure(v == BigInt::from(t.get(g + n, g)), || {
                        format!("f_{n}({g}) = {v}")
                    })?;
                }
            }
            let table = BinomialTable::new(21);
            for l in 0..=5usize {
                for m in l.max(1)..=16 {
                    let d = backward_difference(&table, l, m);
                    ensure(d == BigInt::from(3).pow(l as u32), || {
                        format!("l = {l}, m = {m}: {d}")
                    })?;
                }
            }
            Ok(())
        },
    );
}

#[test]
fn c13_convergence_trend() {
    criterion(
        "13",
        "normalized counts approach c monotonically, k = 15..22",
        secs(60),
        || {
            let consts = constants(30).map_err(|e| e.to_string())?;
            let table = count_size_gcd(22);
            let a: Vec<BigUint> = (0..=22)
                .map(|k| {
                    if k == 0 {
                        BigUint::zero()
                    } else {
                        table.row_sum(k)
                    }
                })
                .collect();
            let r = ratio_check(&a, 15..=22, &consts);
            ensure(r.monotone, || "|ratio - c| not decreasing".into())?;
            let last = r.rows.last().unwrap();
            ensure(last.gap.abs() < 0.10, || {
                format!("gap {} at k = 22", last.gap)
            })?;
            for m in 2..=3u32 {
                let col: Vec<BigUint> = (0..=22)
                    .map(|k| {
                        if k >= m as usize {
                            table.get(k, m as usize)
                        } else {
                            BigUint::zero()
                        }
                    })
                    .collect();
                let g = gcd_ratio_check(&col, 15..=22, m, &consts).map_err(|e| e.to_string())?;
                ensure(g.monotone, || format!("m = {m}: not decreasing"))?;
                ensure(g.rows.last().unwrap().gap.abs() < 0.10, || {
                    format!("m = {m}: gap too large")
                })?;
            }
            Ok(())
        },
    );
}

#[test]
fn c14_exact_cover_search_small() {
    criterion(
        "14",
        "exact-cover search equals natural enumeration, k <= 6",
        secs(600),
        || {
            for k in 1..=6 {
                let report = enumerate_ecs(k, &EcsConfig::default());
                ensure(report.status == SearchStatus::Complete, || {
                    format!("k = {k}: {:?}", report.status)
                })?;
                let found: BTreeSet<CoveringSystem> = report.systems.into_iter().collect();
                let natural: BTreeSet<CoveringSystem> =
                    enumerate_necs(k, None).into_iter().collect();
                ensure(found == natural, || {
                    format!("k = {k}: {} vs {}", found.len(), natural.len())
                })?;
            }
            Ok(())
        },
    );
}

#[test]
#[ignore = "slow: gcd-1 exact covers of size 13 and the total count"]
fn c14_exact_cover_search_13() {
    let title = "30 non-natural gcd-1 exact covers of size 13; total 7267009";
    criterion("14 (slow)", title, secs(7200), || {
        let config = EcsConfig {
            gcd_one: true,
            ..EcsConfig::default()
        };
        // gcd-1 counts per size; the full table follows by contraction.
        let mut primitive = vec![BigUint::zero(); 14];
        primitive[1] = BigUint::from(1u32);
        for k in 2..=13 {
            let r = enumerate_ecs(k, &config);
            ensure(r.status == SearchStatus::Complete, || {
                format!("k = {k}: {:?}", r.status)
            })?;
            for c in &r.systems {
                ensure(c.is_exact() && c.gcd() == 1 && c.size() == k, || {
                    format!("bad system {c}")
                })?;
                ensure(!c.is_natural().map_err(|e| e.to_string())?, || {
                    format!("{c} is natural")
                })?;
            }
            primitive[k] = BigUint::from(r.systems.len());
        }
        ensure(primitive[2..13].iter().all(Zero::is_zero), || {
            format!("{primitive:?}")
        })?;
        ensure(primitive[13] == BigUint::from(30u32), || {
            format!("{} systems at k = 13", primitive[13])
        })?;
        let table = count_from_primitive(&primitive);
        ensure(table.row_sum(13) == BigUint::from(7_267_009u32), || {
            format!("total {}", table.row_sum(13))
        })
    });
}
