//! Reference values computed independently (mpmath at 40 digits, scipy,
//! numpy LAPACK) and frozen here.

use specbound::calibration::{g_cb, g_cb_case2, g_cb_case3, g_cb_sup, g_cb_sup_detail};
use specbound::operator::{frechet_expm_operator, hilbert_matrix, FrechetMethod, HilbertIndexing};
use specbound::special::{chi2_cdf, erf, erfc, std_normal_cdf, wchi2_cdf, wchi2_pdf};
use specbound::{dense_svd, RandomSource};

fn close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got:.17e}, want {want:.17e}, diff {:.3e}",
        (got - want).abs()
    );
}

#[test]
fn erf_values() {
    let table = [
        (0.1, 0.1124629160182848984),
        (0.5, 0.52049987781304653768),
        (1.0, 0.84270079294971486934),
        (2.0, 0.99532226501895273416),
        (2.4, 0.99931148610335492111),
        (2.6, 0.99976396558347065091),
        (3.5, 0.99999925690162765859),
        (5.0, 0.99999999999846254021),
    ];
    for (x, want) in table {
        close(erf(x), want, 1e-15, &format!("erf({x})"));
        close(erf(-x), -want, 1e-15, &format!("erf(-{x})"));
    }
}

#[test]
fn erfc_tail_is_relative_accurate() {
    let table = [
        (2.6, 0.00023603441652934908781),
        (4.0, 1.5417257900280018852e-8),
        (6.0, 2.1519736712498913117e-17),
        (10.0, 2.088487583762544757e-45),
    ];
    for (x, want) in table {
        let rel = (erfc(x) - want).abs() / want;
        assert!(rel < 1e-13, "erfc({x}) rel err {rel:e}");
    }
}

#[test]
fn normal_cdf_values() {
    let table = [
        (-3.0, 0.0013498980316300945267),
        (-1.0, 0.15865525393145705141),
        (1.0, 0.84134474606854294859),
        (2.5, 0.99379033467422386483),
    ];
    for (x, want) in table {
        close(std_normal_cdf(x), want, 1e-14, &format!("Phi({x})"));
    }
    assert_eq!(std_normal_cdf(0.0), 0.5);
    assert!(std_normal_cdf(8.0) > 1.0 - 1e-14);
}

#[test]
fn chi2_cdf_values() {
    let table = [
        (3, 0.5, 0.081108588345324140636),
        (3, 7.0, 0.92810222750353487254),
        (5, 2.0, 0.15085496391539036377),
        (5, 12.0, 0.96521221949375815008),
        (7, 3.0, 0.11499776835684935873),
        (10, 9.0, 0.46789642362528452244),
        (10, 25.0, 0.9946544945128659357),
        (1, 0.3, 0.41611757922963482135),
        (4, 2.0, 0.26424111765711535681),
    ];
    for (k, t, want) in table {
        close(chi2_cdf(k, t).unwrap(), want, 1e-12, &format!("chi2_cdf({k}, {t})"));
    }
}

#[test]
fn weighted_chi2_cdf_values() {
    let table = [
        (0.5, 0.25, 0.16124292927613687794),
        (0.5, 1.0, 0.49958384272784595314),
        (2.0, 1.0, 0.29517512458407520735),
        (2.0, 4.0, 0.74253364002819309913),
        (6.0, 0.25, 0.049225862111319737841),
        (6.0, 0.5, 0.095051789912785838627),
        (6.0, 4.0, 0.50263542884214185367),
        (0.1, 0.5, 0.46178789891991354088),
    ];
    for (a, t, want) in table {
        close(wchi2_cdf(a, t).unwrap(), want, 1e-9, &format!("wchi2_cdf({a}, {t})"));
    }
    close(wchi2_cdf(0.0, 1.0).unwrap(), 0.6826894921370859, 1e-12, "alpha = 0");
    close(wchi2_cdf(1.0, 1.0).unwrap(), 1.0 - (-0.5f64).exp(), 1e-9, "alpha = 1");
}

#[test]
fn weighted_chi2_pdf_values() {
    let table = [
        (0.5, 0.25, 0.58678472381039834569),
        (2.0, 1.0, 0.24394357536678953478),
        (6.0, 0.5, 0.17690376190438706088),
        (6.0, 4.0, 0.0750888078361763542),
        (0.1, 0.5, 0.53663010774654868459),
        (3.0, 10.0, 0.018791380119931145822),
    ];
    for (a, t, want) in table {
        close(wchi2_pdf(a, t).unwrap(), want, 1e-9, &format!("wchi2_pdf({a}, {t})"));
    }
}

/// `I_0` by its power series; fine for the moderate arguments used here.
fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

#[test]
fn weighted_chi2_pdf_matches_bessel_form() {
    for alpha in [0.05f64, 0.3, 0.9, 2.0, 6.0, 15.0] {
        for i in 1..=40 {
            let t = 0.1 * i as f64;
            let want = 0.5 / alpha.sqrt()
                * (-(1.0 + alpha) * t / (4.0 * alpha)).exp()
                * bessel_i0((alpha - 1.0) * t / (4.0 * alpha));
            close(wchi2_pdf(alpha, t).unwrap(), want, 1e-9, &format!("p({alpha}, {t})"));
        }
    }
}

#[test]
fn weighted_chi2_cdf_matches_monte_carlo() {
    let (alpha, t) = (6.0, 0.25);
    let n = 10_000_000u64;
    let mut s = RandomSource::new(2718, 0).stream();
    let mut hits = 0u64;
    for _ in 0..n {
        let x = s.next_normal();
        let y = s.next_normal();
        if x * x + alpha * y * y <= t {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    let want = wchi2_cdf(alpha, t).unwrap();
    let se = (want * (1.0 - want) / n as f64).sqrt();
    assert!((p - want).abs() <= 3.0 * se, "MC {p} vs {want} (se {se:e})");
}

#[test]
fn bound_pieces_match_reference() {
    // (theta, rho, convolution piece, chi-squared piece)
    let table = [
        (1.58, 1.5, 0.067637522638003705, 0.19484834510176628),
        (1.58, 3.0, 0.065847287389735527, 0.5032838683923603),
        (2.46, 1.1, 0.015938248476643177, 0.028702969741108803),
        (1.28, 1.3, 0.12546949083378847, 0.24005503101665756),
        (5.1, 1.02, 0.0017005729330829788, 0.0027729332306115929),
        (1.0, 7.0, 0.15881820728363784, 1.0),
        (2.0, 1.2, 0.031262263155758114, 0.065880354634958921),
    ];
    for (theta, rho, c2, c3) in table {
        close(g_cb_case2(theta, rho).unwrap(), c2, 1e-9, &format!("case2({theta}, {rho})"));
        close(g_cb_case3(theta, rho).unwrap(), c3, 1e-9, &format!("case3({theta}, {rho})"));
    }
    // Dispatch: rho < 1 + theta^-2 selects the chi-squared piece.
    close(g_cb(2.46, 1.1).unwrap(), 0.028702969741108803, 1e-9, "g(2.46, 1.1)");
    close(g_cb(1.58, 3.0).unwrap(), 0.065847287389735527, 1e-9, "g(1.58, 3)");
    close(g_cb(1.0, 7.0).unwrap(), 0.125, 1e-15, "g(1, 7) takes the smaller piece");
}

#[test]
fn bound_supremum_matches_reference() {
    // The supremum is the left limit at rho = 1 + theta^-2 of the
    // chi-squared piece (mpmath, with the piece checked monotone on [1, 1 + e]).
    let table = [
        (1.28, 0.366122504629119),
        (1.58, 0.169436766888639),
        (2.46, 0.037953823707005),
        (5.10, 0.00387920178920996),
    ];
    for (theta, want) in table {
        let got = g_cb_sup_detail(theta).unwrap();
        assert!(got.value <= want + 1e-9, "sup({theta}) overshoots: {}", got.value);
        assert!((got.value - want).abs() / want < 1e-5, "sup({theta}) = {} vs {want}", got.value);
        let rho = got.rho.expect("finite maximizer");
        assert!((rho - (1.0 + theta.powi(-2))).abs() < 1e-5, "argmax {rho}");
    }
}

#[test]
fn bound_supremum_is_monotone_in_theta() {
    let mut prev = f64::INFINITY;
    for i in 0..=18 {
        let theta = 1.0 + 0.5 * i as f64;
        let v = g_cb_sup(theta).unwrap();
        assert!(v <= prev, "sup not decreasing at theta = {theta}");
        prev = v;
    }
}

#[test]
fn hilbert_reference_spectrum() {
    let h = hilbert_matrix(100, HilbertIndexing::Classical).unwrap();
    let t = dense_svd(&h).unwrap();
    close(t.spectral_norm, 2.182696097757424, 1e-12, "classical norm");
    close(t.effective_rank, 1.1521969570257646, 1e-10, "classical rank");
    let h = hilbert_matrix(100, HilbertIndexing::OneBased).unwrap();
    let t = dense_svd(&h).unwrap();
    close(t.spectral_norm, 1.8800088259272276, 1e-12, "one-based norm");
    close(t.effective_rank, 1.091895587271587, 1e-10, "one-based rank");
}

#[test]
fn frechet_reference_spectrum() {
    let op = frechet_expm_operator(10, -0.01)
        .unwrap()
        .with_method(FrechetMethod::Spectral)
        .unwrap();
    let t = op.ground_truth().unwrap();
    assert_eq!(t.singular_values.len(), 10_000);
    close(t.spectral_norm, 0.9999799967302481, 1e-13, "norm");
    close(t.frobenius_norm, 99.95063267435526, 1e-9, "frobenius");
    close(t.effective_rank, 9990.528654485655, 1e-7, "effective rank");
}
