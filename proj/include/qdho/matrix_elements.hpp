#pragma once

// Closed-form ladder-word matrix elements in the q-deformed number basis,
//
//   <m| (b^+)^l b^r |n> = sqrt([n]! [n-r+l]!) / [n-r]!        at m = n - r + l,
//   <m| b^r (b^+)^l |n> = [n+l]! / sqrt([n]! [n+l-r]!)        at m = n + l - r,
//
// (Gamma_q(k+1) = [k]_q!), the normal-ordered <m| :x^l p^r: |n> built from them,
// and brute-force counterparts that multiply truncated Fock matrices instead.

#include "qdho/deformation.hpp"
#include "qdho/fock.hpp"

#include <complex>
#include <string>

namespace qdho {

enum class ElementKind { normal_word, antinormal_word, normal_ordered_xp };
enum class Provenance { closed_form, matrix_oracle };

inline std::string to_string(ElementKind k) {
    switch (k) {
        case ElementKind::normal_word: return "normal";
        case ElementKind::antinormal_word: return "antinormal";
        case ElementKind::normal_ordered_xp: return "xp";
    }
    return "normal";
}

inline std::string to_string(Provenance p) {
    return p == Provenance::closed_form ? "closed_form" : "matrix_oracle";
}

struct MatrixElementQuery {
    ElementKind kind = ElementKind::normal_word;
    int l = 0;
    int r = 0;
    int m = 0;
    int n = 0;
};

struct MatrixElementResult {
    std::complex<double> value;
    Provenance provenance;
};

/// Row selected by the Kronecker delta of a ladder word: n - r + l for both orderings.
inline int selected_row(int l, int r, int n) { return n - r + l; }

namespace detail {

inline void require_nonnegative(int l, int r, int n) {
    if (l < 0 || r < 0 || n < 0) throw DomainError("matrix elements require l, r, n >= 0");
}

inline double finite_or_throw(double v, const char* what) {
    if (!std::isfinite(v)) throw OverflowError(std::string(what) + " exceeds the double range");
    return v;
}

}  // namespace detail

/// <n-r+l| (b^+)^l b^r |n>; zero when n < r.
inline double normal_word_element(int l, int r, int n, const QContext& ctx) {
    detail::require_nonnegative(l, r, n);
    if (n < r) return 0.0;
    const double log_value =
        0.5 * (log_q_factorial(n, ctx) + log_q_factorial(n - r + l, ctx)) - log_q_factorial(n - r, ctx);
    return detail::finite_or_throw(std::exp(log_value), "normal word element");
}

/// <n+l-r| b^r (b^+)^l |n>; zero when n + l < r.
inline double antinormal_word_element(int l, int r, int n, const QContext& ctx) {
    detail::require_nonnegative(l, r, n);
    if (n + l < r) return 0.0;
    const double log_value =
        log_q_factorial(n + l, ctx) - 0.5 * (log_q_factorial(n, ctx) + log_q_factorial(n + l - r, ctx));
    return detail::finite_or_throw(std::exp(log_value), "antinormal word element");
}

/// <m| :x^l p^r: |n> as the double binomial sum over closed-form normal words.
inline std::complex<double> normal_ordered_xp_element(int l, int r, int m, int n,
                                                      const DeformedFrame& frame) {
    detail::require_nonnegative(l, r, n);
    if (m < 0) throw DomainError("matrix elements require m >= 0");
    const QContext ctx(frame);
    std::complex<double> prefactor{1.0, 0.0};
    for (int k = 0; k < r; ++k) prefactor *= std::complex<double>(0.0, 1.0);
    prefactor /= std::pow(frame.m_alpha, l) * std::pow(frame.m_beta, r);

    double sum = 0.0;
    for (int s = 0; s <= l; ++s) {
        for (int t = 0; t <= r; ++t) {
            const int daggers = l - s + t;
            const int plains = s + r - t;
            if (selected_row(daggers, plains, n) != m) continue;
            const double sign = ((r - t) % 2 == 0) ? 1.0 : -1.0;
            sum += sign * detail::binomial(l, s) * detail::binomial(r, t) *
                   normal_word_element(daggers, plains, n, ctx);
        }
    }
    return prefactor * sum;
}

/// Closed-form ladder-word element from q alone; the x-p kind needs a full frame.
inline MatrixElementResult evaluate(const MatrixElementQuery& query, const QContext& ctx) {
    if (query.kind == ElementKind::normal_ordered_xp)
        throw DomainError("normal-ordered x-p elements need alpha and beta, not q alone");
    const bool on_row = query.m == selected_row(query.l, query.r, query.n);
    const double v = !on_row ? 0.0
                     : query.kind == ElementKind::normal_word
                         ? normal_word_element(query.l, query.r, query.n, ctx)
                         : antinormal_word_element(query.l, query.r, query.n, ctx);
    return {v, Provenance::closed_form};
}

/// Closed-form evaluation of any query, zero off the selection rule.
inline MatrixElementResult evaluate(const MatrixElementQuery& query, const DeformedFrame& frame) {
    const QContext ctx(frame);
    switch (query.kind) {
        case ElementKind::normal_word:
            return {query.m == selected_row(query.l, query.r, query.n)
                        ? normal_word_element(query.l, query.r, query.n, ctx)
                        : 0.0,
                    Provenance::closed_form};
        case ElementKind::antinormal_word:
            return {query.m == selected_row(query.l, query.r, query.n)
                        ? antinormal_word_element(query.l, query.r, query.n, ctx)
                        : 0.0,
                    Provenance::closed_form};
        case ElementKind::normal_ordered_xp:
            return {normal_ordered_xp_element(query.l, query.r, query.m, query.n, frame),
                    Provenance::closed_form};
    }
    return {0.0, Provenance::closed_form};
}

namespace oracle {

/// Truncation that keeps every intermediate state of an (l, r) word on |n> off the cutoff.
inline int dimension_for(int l, int r, int n) { return n + l + r + 4; }

/// Entry (m, n) of (B^+)^l B^r (normal) or B^r (B^+)^l (antinormal) from dense truncated
/// matrices of size dimension_for(l, r, max(m, n)).
inline double ladder_word_by_matrices(ElementKind kind, int l, int r, int m, int n, const QContext& ctx) {
    if (kind == ElementKind::normal_ordered_xp)
        throw DomainError("ladder_word_by_matrices handles ladder words only");
    detail::require_nonnegative(l, r, n);
    if (m < 0) throw DomainError("matrix elements require m >= 0");
    const int dim = dimension_for(l, r, std::max(m, n));
    const auto b = ladder_matrix<double>(dim, ctx);
    const RealMatrix<double> bt = b.transpose();
    const RealMatrix<double> word = kind == ElementKind::normal_word
                                        ? RealMatrix<double>(detail::matrix_power<double>(bt, l) *
                                                             detail::matrix_power<double>(b, r))
                                        : RealMatrix<double>(detail::matrix_power<double>(b, r) *
                                                             detail::matrix_power<double>(bt, l));
    return detail::finite_or_throw(word(m, n), "ladder word oracle");
}

/// <m| :x^l p^r: |n> from the NormalWord expansion contracted with matrix products.
inline std::complex<double> normal_ordered_xp_by_words(int l, int r, int m, int n,
                                                       const DeformedFrame& frame) {
    const QContext ctx(frame);
    std::complex<double> sum = 0.0;
    for (const auto& w : merge_normal_words(normal_order_expansion(l, r, frame)))
        sum += w.coefficient *
               ladder_word_by_matrices(ElementKind::normal_word, w.dagger_power, w.plain_power, m, n, ctx);
    return sum;
}

inline MatrixElementResult evaluate(const MatrixElementQuery& query, const DeformedFrame& frame) {
    if (query.kind == ElementKind::normal_ordered_xp)
        return {normal_ordered_xp_by_words(query.l, query.r, query.m, query.n, frame),
                Provenance::matrix_oracle};
    return {ladder_word_by_matrices(query.kind, query.l, query.r, query.m, query.n, QContext(frame)),
            Provenance::matrix_oracle};
}

}  // namespace oracle
}  // namespace qdho
