#include "qdho/deformation.hpp"
#include "qdho/fock.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace qdho;
using Catch::Approx;

namespace {

// Noncommutative word algebra over {'d' = b^+, 'b' = b}, used to expand x^l p^r literally.
using Word = std::string;
using Poly = std::map<Word, std::complex<double>>;

Poly multiply(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [wa, ca] : a)
        for (const auto& [wb, cb] : b) out[wa + wb] += ca * cb;
    return out;
}

// Reorders every word to d...d b...b (dropping commutator corrections) and tallies.
std::map<std::pair<int, int>, std::complex<double>> normal_order_by_fiat(const Poly& p) {
    std::map<std::pair<int, int>, std::complex<double>> out;
    for (const auto& [w, c] : p) {
        int d = 0;
        for (char ch : w) d += ch == 'd';
        out[{d, static_cast<int>(w.size()) - d}] += c;
    }
    return out;
}

double brute_q_number(int n, double q) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += std::pow(q, k);
    return s;
}

}  // namespace

TEST_CASE("frame derivation matches hand values", "[deformation]") {
    const auto f = derive_frame(1.0 / 3, 1.0 / 3);
    CHECK(f.q == Approx(2.0).epsilon(1e-14));
    CHECK(f.m_alpha == Approx(std::sqrt(4.0 / 3)).epsilon(1e-14));
    CHECK(f.m_beta == Approx(1.1547005383792515).epsilon(1e-14));
    CHECK(f.m_alpha * f.m_beta == Approx(4.0 / 3).epsilon(1e-14));

    const auto g = derive_frame(0.25, 1.0 / 9);
    CHECK(g.q == Approx(7.0 / 5).epsilon(1e-14));
    CHECK(g.m_alpha == Approx(std::sqrt(2.5)).epsilon(1e-14));
    CHECK(g.m_beta == Approx(std::sqrt(10.0 / 9)).epsilon(1e-14));
    CHECK(g.m_alpha * g.m_beta == Approx(2.0 * (1.0 - 1.0 / 6)).epsilon(1e-14));
}

TEST_CASE("frame tends to the undeformed oscillator", "[deformation]") {
    const auto f = derive_frame(1e-12, 1e-12);
    CHECK(f.q == Approx(1.0).margin(1e-11));
    CHECK(f.m_alpha == Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("frame rejects parameters outside the realization", "[deformation]") {
    CHECK_THROWS_AS(derive_frame(2.0, 1.0), DomainError);
    CHECK_THROWS_AS(derive_frame(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(derive_frame(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(derive_frame(0.5, -0.1), DomainError);
    CHECK_THROWS_AS(derive_frame(std::nan(""), 0.1), DomainError);
    CHECK_THROWS_AS(QContext(0.5), DomainError);
}

TEST_CASE("q-numbers, factorials and energies", "[deformation]") {
    const QContext two(2.0);
    CHECK(q_number(0, two) == 0.0);
    CHECK(q_number(5, two) == 31.0);
    for (double q : {1.0, 1.3, 7.0}) CHECK(q_number(2, QContext(q)) == Approx(1.0 + q));
    CHECK(q_factorial(0, two) == 1.0);
    CHECK(q_factorial(3, two) == 21.0);
    CHECK(q_factorial(2, QContext(1.5)) == Approx(2.5));
    CHECK(energy_level(0, QContext(3.0)) == 0.5);
    CHECK(energy_level(1, two) == 2.0);
    CHECK(energy_level(2, two) == 5.0);
    CHECK(q_number(7, QContext(1.0)) == 7.0);
    CHECK(q_factorial(5, QContext(1.0)) == 120.0);
}

TEST_CASE("log-domain q-numbers agree with the direct sum and survive overflow", "[deformation]") {
    for (double q : {1.0 + 1e-9, 1.05, 2.0, 50.0})
        for (int n : {1, 2, 10, 40}) {
            const QContext ctx(q);
            CHECK(log_q_number(n, ctx) == Approx(std::log(brute_q_number(n, q))).epsilon(1e-12));
        }
    const QContext two(2.0);
    CHECK_THROWS_AS(q_number(2000, two), OverflowError);
    CHECK(log_q_number(2000, two) == Approx(1999 * std::log(2.0) + std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(q_factorial(200, two), OverflowError);
    double lf = 0.0;
    for (int k = 1; k <= 200; ++k) lf += log_q_number(k, two);
    CHECK(log_q_factorial(200, two) == Approx(lf).epsilon(1e-12));
}

TEST_CASE("ladder matrices", "[fock]") {
    const auto [b2, bt2] = build_ladder(2, QContext(2.0));
    CHECK(b2(0, 1) == std::complex<double>(1.0, 0.0));
    CHECK(b2.entries().cwiseAbs().sum() == 1.0);
    const auto [b3, bt3] = build_ladder(3, QContext(2.0));
    CHECK(b3(1, 2).real() == Approx(std::sqrt(3.0)));
    CHECK(bt3(2, 1).real() == Approx(std::sqrt(3.0)));
    const auto [b1, bt1] = build_ladder(3, QContext(1.0));
    CHECK(b1(0, 1).real() == 1.0);
    CHECK(b1(1, 2).real() == Approx(std::sqrt(2.0)));
    CHECK(b3.label() == OperatorLabel::annihilator);
    CHECK(bt3.label() == OperatorLabel::creator);
    CHECK_THROWS_AS(build_ladder(1, QContext(2.0)), DomainError);
}

TEST_CASE("position and momentum matrices", "[fock]") {
    const auto f = derive_frame(1.0 / 3, 1.0 / 3);
    const auto x2 = build_position(f, 2);
    CHECK(x2(0, 1).real() == Approx(0.8660254037844386));
    const auto x = build_position(f, 5);
    CHECK(x(2, 3).real() == Approx(2.2912878474779199));
    CHECK(x.entries().isApprox(x.entries().adjoint()));

    const auto g = derive_frame(0.25, 1.0 / 9);
    const auto p = build_momentum(g, 6);
    const double x1b = 1.0 / g.m_beta;
    CHECK(p(1, 0).imag() == Approx(x1b));
    CHECK(p(0, 1).imag() == Approx(-x1b));
    CHECK(p(1, 0).real() == 0.0);
    CHECK(p.entries().isApprox(p.entries().adjoint()));
}

TEST_CASE("q-commutator residual", "[fock]") {
    const auto r2 = commutator_residual(QContext(2.0), 2);
    CHECK(std::abs(r2(0, 0)) < 1e-15);
    CHECK(r2(1, 1).real() == Approx(-3.0));
    const auto r1 = commutator_residual(QContext(1.0), 3);
    CHECK(r1(2, 2).real() == Approx(-3.0));
    CHECK(interior_max_abs(r1, 1) < 1e-15);
    const auto r = commutator_residual(QContext(1.1), 16);
    CHECK(interior_max_abs(r, 14) < 1e-12);
}

TEST_CASE("theta identity holds on the interior", "[fock]") {
    CHECK(interior_max_abs(theta_identity_residual(derive_frame(1.0 / 3, 1.0 / 3), 8), 5) < 1e-10);
    CHECK(interior_max_abs(theta_identity_residual(derive_frame(0.25, 1.0 / 9), 12), 10) < 1e-10);
    const auto f = derive_frame(1e-9, 1e-9);
    const auto x = build_position(f, 8).entries();
    const auto p = build_momentum(f, 8).entries();
    const Eigen::MatrixXcd c = x * p - p * x;
    for (int i = 0; i < 7; ++i) CHECK(std::abs(c(i, i) - std::complex<double>(0, 1)) < 1e-6);
    const auto cut = theta_identity_residual(derive_frame(0.2, 0.3), 6);
    CHECK(std::abs(cut(5, 5)) > 1e-3);
}

TEST_CASE("theta matrix matches its closed form", "[fock]") {
    // Below the cutoff the diagonal is 1 + s/(1-s) ([n] + [n+1]), s = sqrt(alpha beta).
    const auto f = derive_frame(0.3, 0.2);
    const auto theta = build_theta(f, 8);
    const double s = std::sqrt(f.alpha * f.beta);
    const QContext ctx(f);
    for (int n = 0; n < 7; ++n)
        CHECK(theta(n, n).real() ==
              Approx(1.0 + s / (1.0 - s) * (q_number(n, ctx) + q_number(n + 1, ctx))).epsilon(1e-12));
    CHECK(theta.entries().isApprox(theta.entries().adjoint()));
}

TEST_CASE("uncertainty bound", "[fock]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int t = 0; t < 20; ++t) {
        const double a = u(rng);
        const double b = u(rng) * 0.99 / a;
        if (a * b >= 0.98) continue;
        const auto f = derive_frame(a, b);
        std::vector<std::complex<double>> vac(16, 0.0);
        vac[0] = 1.0;
        CHECK(std::abs(uncertainty_check(vac, f, 16)) < 1e-10);
    }
    const auto f = derive_frame(1.0 / 3, 1.0 / 3);
    std::vector<std::complex<double>> one(16, 0.0);
    one[1] = 1.0;
    CHECK(uncertainty_check(one, f, 16) > 0.0);
    std::vector<std::complex<double>> sup(16, 0.0);
    sup[0] = sup[1] = 1.0 / std::sqrt(2.0);
    CHECK(uncertainty_check(sup, f, 16) >= 0.0);
    std::vector<std::complex<double>> bad(16, 0.0);
    bad[0] = 2.0;
    CHECK_THROWS_AS(uncertainty_check(bad, f, 16), DomainError);
}

TEST_CASE("normal-order expansion equals literal word expansion reordered by fiat", "[fock]") {
    const auto f = derive_frame(0.3, 0.2);
    const Poly x{{"d", 1.0 / f.m_alpha}, {"b", 1.0 / f.m_alpha}};
    const Poly p{{"d", std::complex<double>(0, 1.0 / f.m_beta)}, {"b", std::complex<double>(0, -1.0 / f.m_beta)}};
    for (int l = 0; l <= 3; ++l)
        for (int r = 0; r <= 3; ++r) {
            Poly word{{"", 1.0}};
            for (int i = 0; i < l; ++i) word = multiply(word, x);
            for (int i = 0; i < r; ++i) word = multiply(word, p);
            auto expected = normal_order_by_fiat(word);
            std::erase_if(expected, [](const auto& kv) { return std::abs(kv.second) < 1e-14; });
            const auto merged = merge_normal_words(normal_order_expansion(l, r, f));
            INFO("l=" << l << " r=" << r);
            REQUIRE(merged.size() == expected.size());
            for (const auto& w : merged) {
                const auto it = expected.find({w.dagger_power, w.plain_power});
                REQUIRE(it != expected.end());
                CHECK(std::abs(w.coefficient - it->second) < 1e-12 * std::max(1.0, std::abs(it->second)));
            }
        }
}

TEST_CASE("normal-order expansion small cases", "[fock]") {
    const auto f = derive_frame(1.0 / 3, 1.0 / 3);
    const auto x = normal_order_expansion(1, 0, f);
    REQUIRE(x.size() == 2);
    CHECK(x[0].dagger_power == 1);
    CHECK(x[1].plain_power == 1);
    CHECK(x[0].coefficient.real() == Approx(1.0 / f.m_alpha));
    const auto p = merge_normal_words(normal_order_expansion(0, 1, f));
    REQUIRE(p.size() == 2);
    CHECK(p[0].dagger_power == 0);  // sorted: b first
    CHECK(p[0].coefficient.imag() == Approx(-1.0 / f.m_beta));
    CHECK(p[1].coefficient.imag() == Approx(1.0 / f.m_beta));
    const auto xp = normal_order_expansion(1, 1, f);
    CHECK(xp.size() == 4);
    const auto merged = merge_normal_words(xp);
    CHECK(merged.size() == 2);  // the two b^+ b words cancel
    CHECK_THROWS_AS(normal_order_expansion(-1, 0, f), DomainError);
}

TEST_CASE("q-exponential coefficients annihilate every excited state", "[fock]") {
    // sum_k c_k [n]!/[n-k]! = delta_{n0} evaluated directly as a scalar sum.
    for (double q : {1.0, 1.5, 2.0}) {
        const QContext ctx(q);
        for (int n = 0; n <= 10; ++n) {
            long double sum = 0.0L;
            long double c = 1.0L;
            for (int k = 0; k <= n; ++k) {
                if (k > 0) c = -c * std::pow(static_cast<long double>(q), k - 1) / q_number(k, ctx);
                long double falling = 1.0L;
                for (int i = 0; i < k; ++i) falling *= q_number(n - i, ctx);
                sum += c * falling;
            }
            INFO("q=" << q << " n=" << n);
            CHECK(std::abs(static_cast<double>(sum) - (n == 0 ? 1.0 : 0.0)) < 1e-9 * std::pow(q, n * n / 2.0));
        }
    }
}

TEST_CASE("vacuum projector series", "[fock]") {
    const auto p = vacuum_projector_series(QContext(2.0), 12);
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(12, 12);
    e(0, 0) = 1.0;
    CHECK((p.entries() - e).topLeftCorner(11, 11).cwiseAbs().maxCoeff() < 1e-12);
    const auto plain = vacuum_projector_series(QContext(2.0), 12, ProjectorCoefficients::plain_factorial);
    CHECK(plain(2, 2).real() == Approx(-0.5).margin(1e-12));
    // At q = 1 both laws coincide.
    const auto a = vacuum_projector_series(QContext(1.0), 10);
    const auto b = vacuum_projector_series(QContext(1.0), 10, ProjectorCoefficients::plain_factorial);
    CHECK((a.entries() - b.entries()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ket-bra from the projector series", "[fock]") {
    for (int m = 0; m <= 4; ++m)
        for (int n = 0; n <= 4; ++n) {
            const auto kb = ketbra(m, n, QContext(1.7), 12);
            Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(12, 12);
            e(m, n) = 1.0;
            CHECK((kb.entries() - e).topLeftCorner(10, 10).cwiseAbs().maxCoeff() < 1e-10);
        }
    CHECK_THROWS_AS(ketbra(10, 0, QContext(2.0), 12), DomainError);
}

TEST_CASE("operators reject dimensions that overflow double", "[fock]") {
    CHECK_THROWS_AS(build_hamiltonian(QContext(1e3), 120), OverflowError);
}
