//! Verification checks shared by the subcommands.

use kleinzeta_core::counting::{count_klein, count_weierstrass, preferred_algorithm, verify_fermat_cover, WeierstrassCurve};
use kleinzeta_core::ffield::{build_field, is_prime};
use kleinzeta_core::gdcohom::cohomology_summary;
use kleinzeta_core::hecke::{ap_f, h3_local_factor_product, split_type, trace_prediction, LEVEL_PRIME};
use kleinzeta_core::lfunc::{counts_to_power_sums, expand_product, power_sums_to_local_factor, weil_bound_check, PURITY_TOLERANCE};
use kleinzeta_core::thetasupp::{max_equivariance_residual, scan_all, ClaimStatus, CosetType, ScanBox};
use kleinzeta_core::{Algorithm, CountOptions, LocalFactor, SplitType};
use serde_json::{json, Value};

use crate::cache::CountCache;
use crate::report::{Check, Status};
use crate::CliError;

pub const L3_PRIME: u64 = 3;
/// Extension degrees needed to pin down a degree-10 factor with its
/// functional equation.
pub const EXTENSIONS: u32 = 5;
pub const PURITY_PRIMES: [u64; 6] = [2, 3, 5, 7, 13, 23];
pub const ARCHIMEDEAN_SAMPLES: usize = 1000;
pub const ARCHIMEDEAN_TOLERANCE: f64 = 1e-12;

/// `(1 + 3x + 27x^2)(1 - 3x - 18x^2 + 135x^3 + 81x^4 + 3645x^5 - 13122x^6 - 59049x^7 + 531441x^8)`.
pub fn expected_l3() -> Vec<i128> {
    expand_product(&[&[1, 3, 27], &[1, -3, -18, 135, 81, 3645, -13122, -59049, 531441]]).expect("small coefficients")
}

pub struct Counter {
    pub cache: CountCache,
    pub options: CountOptions,
}

pub struct Count {
    pub count: u128,
    pub algorithm: Algorithm,
    pub cached: bool,
    pub elapsed_ms: u64,
}

impl Counter {
    pub fn count(&mut self, p: u64, k: u32, algorithm: Option<Algorithm>) -> Result<Count, CliError> {
        let algorithm = algorithm.unwrap_or_else(|| preferred_algorithm(p, k));
        if let Some(count) = self.cache.get(p, k, algorithm) {
            return Ok(Count {
                count,
                algorithm,
                cached: true,
                elapsed_ms: 0,
            });
        }
        let rec = count_klein(p, k, algorithm, &self.options)?;
        self.cache.insert(p, k, algorithm, rec.count)?;
        Ok(Count {
            count: rec.count,
            algorithm,
            cached: false,
            elapsed_ms: rec.elapsed_ms,
        })
    }

    fn local_factor(&mut self, p: u64, algorithm: Option<Algorithm>) -> Result<Result<LocalFactor, String>, CliError> {
        let counts = (1..=EXTENSIONS)
            .map(|k| self.count(p, k, algorithm).map(|c| c.count))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(counts_to_power_sums(&counts, p)
            .and_then(|ps| power_sums_to_local_factor(&ps))
            .map_err(|e| e.to_string()))
    }
}

fn err(e: impl ToString) -> Value {
    json!({ "error": e.to_string() })
}

pub fn l3_checks(counter: &mut Counter) -> Result<Vec<Check>, CliError> {
    let expected = expected_l3();
    let start = std::time::Instant::now();
    let lf = counter.local_factor(L3_PRIME, Some(Algorithm::QuadFiber))?;
    let mut counting = Check::compare("l3-counting-route", &expected, || lf.as_ref().map_or_else(err, |lf| json!(lf.coeffs())));
    counting.elapsed_ms = start.elapsed().as_millis() as u64;
    let product = Check::compare("l3-product-route", &expected, || {
        h3_local_factor_product(L3_PRIME).map_or_else(err, |lf| json!(lf.coeffs()))
    });
    Ok(vec![counting, product])
}

fn good_primes(max: u64) -> impl Iterator<Item = u64> {
    (2..=max).filter(|&p| is_prime(p) && p != LEVEL_PRIME)
}

pub fn trace_sweep(counter: &mut Counter, max: u64) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for p in good_primes(max) {
        let expected = trace_prediction(p).map(|t| 1 + p as i128 + (p as i128).pow(2) + (p as i128).pow(3) - t);
        let start = std::time::Instant::now();
        let got = counter.count(p, 1, None)?;
        let (status, expected) = match expected {
            Ok(e) => (Status::from_bool(e == got.count as i128), json!(e)),
            Err(e) => (Status::Fail, err(e)),
        };
        out.push(Check {
            name: format!("trace p={p}"),
            status,
            expected,
            actual: json!(got.count),
            elapsed_ms: start.elapsed().as_millis() as u64,
        });
    }
    Ok(out)
}

/// Dichotomy and Hasse bound up to `max_ap`, agreement with the curve model up to `max_curve`.
pub fn cm_checks(max_ap: u64, max_curve: u64) -> Vec<Check> {
    let primes: Vec<u64> = good_primes(max_ap).collect();
    let dichotomy = Check::compare("cm-vanishing-off-split", Vec::<u64>::new(), || {
        let bad: Vec<u64> = primes
            .iter()
            .copied()
            .filter(|&p| (ap_f(p).unwrap() == 0) == (split_type(p).unwrap() == SplitType::Split))
            .collect();
        json!(bad)
    });
    let hasse = Check::compare("hasse-bound", Vec::<u64>::new(), || {
        json!(primes
            .iter()
            .copied()
            .filter(|&p| (ap_f(p).unwrap().pow(2) as u64) > 4 * p)
            .collect::<Vec<_>>())
    });
    let curve = WeierstrassCurve::cm_conductor_121();
    let model = Check::compare("curve-model-agreement", Vec::<u64>::new(), || {
        let bad: Vec<u64> = good_primes(max_curve)
            .filter(|&p| {
                let n = count_weierstrass(&curve, &build_field(p, 1).unwrap()).unwrap() as i64;
                ap_f(p).unwrap() != p as i64 + 1 - n
            })
            .collect();
        json!(bad)
    });
    vec![dichotomy, hasse, model]
}

pub fn fermat_check() -> Check {
    Check::compare("fermat-cover", true, || json!(verify_fermat_cover()))
}

pub fn cohomology_checks() -> (Value, Vec<Check>) {
    let summary = match cohomology_summary() {
        Ok(s) => s,
        Err(e) => return (err(&e), vec![Check::compare("cohomology", "summary", || err(e))]),
    };
    let eig: Vec<(usize, usize)> = summary.eigenspaces.iter().map(|s| (s.dimension, s.fil2_dimension)).collect();
    let checks = vec![
        Check::compare("h3-dimension", 10, || json!(summary.h3_dim)),
        Check::compare("fil2-rank", 5, || json!(summary.fil2_rank)),
        Check::compare("jacobian-ring-dims", [1, 5, 10, 10, 5, 1, 0], || json!(summary.graded_dims)),
        Check::compare("alpha-order", 5, || json!(summary.alpha_order)),
        Check::compare("eigenspaces-dim-and-fil2", [(2, 1); 5], || json!(eig)),
        Check::compare("gorenstein-pairing-rank", 5, || json!(summary.gorenstein_rank)),
    ];
    (serde_json::to_value(&summary).expect("summary serializes"), checks)
}

pub fn theta_checks(p: u64, types: &[CosetType], scan_box: &ScanBox) -> Result<(Value, Vec<Check>), CliError> {
    let start = std::time::Instant::now();
    let report = scan_all(p, types, scan_box)?;
    let elapsed = start.elapsed().as_millis() as u64;
    let mut checks: Vec<Check> = report
        .types
        .iter()
        .map(|t| Check {
            name: format!("theta p={p} type {}", t.ty),
            status: match t.status {
                ClaimStatus::Certified => Status::Pass,
                ClaimStatus::Fail => Status::Fail,
                ClaimStatus::Inconclusive => Status::Inconclusive,
            },
            expected: json!(t.claim),
            actual: json!(t.detail),
            elapsed_ms: elapsed,
        })
        .collect();
    checks.push(Check::compare(format!("char-sums p={p}"), true, || json!(report.char_sums_vanish)));
    let mut summary = serde_json::to_value(&report).expect("theta report serializes");
    // Per-cell tallies are large and only useful when asked for.
    if let Some(types) = summary["types"].as_array_mut() {
        for t in types {
            t.as_object_mut().map(|o| o.remove("cells"));
        }
    }
    Ok((summary, checks))
}

pub fn archimedean_check() -> Check {
    Check::timed("archimedean-equivariance", || {
        let r = max_equivariance_residual(ARCHIMEDEAN_SAMPLES, 0);
        (
            Status::from_bool(r < ARCHIMEDEAN_TOLERANCE),
            json!(format!("< {ARCHIMEDEAN_TOLERANCE:e}")),
            json!(r),
        )
    })
}

pub fn purity_checks(counter: &mut Counter) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for p in PURITY_PRIMES {
        let start = std::time::Instant::now();
        let lf = counter.local_factor(p, None)?;
        let actual = match &lf {
            Ok(lf) => weil_bound_check(lf).map_or_else(err, |ok| json!(ok)),
            Err(e) => err(e),
        };
        let status = Status::from_bool(actual == json!(true));
        out.push(Check {
            name: format!("purity p={p}"),
            status,
            expected: json!(format!("true (relative tolerance {PURITY_TOLERANCE:e})")),
            actual,
            elapsed_ms: start.elapsed().as_millis() as u64,
        });
    }
    Ok(out)
}
