#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace orthobox {

/// Marginals p1, p2, p3 of a three-element minimal non-Specker set in the
/// perfectly correlated state: each strictly between 0 and 1, pairwise sums at most 1.
class TripleMarginals {
public:
    TripleMarginals(Rational p1, Rational p2, Rational p3) : p_{std::move(p1), std::move(p2), std::move(p3)} {
        for (std::size_t i = 0; i < 3; ++i) {
            if (p_[i] <= 0 || p_[i] >= 1) {
                throw PreconditionError("p" + std::to_string(i + 1) + " = " + to_fraction(p_[i]) +
                                        " must lie strictly between 0 and 1");
            }
        }
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = i + 1; j < 3; ++j) {
                if (p_[i] + p_[j] > 1) {
                    throw PreconditionError("p" + std::to_string(i + 1) + " + p" + std::to_string(j + 1) +
                                            " exceeds 1 for orthogonal propositions");
                }
            }
        }
    }

    static bool valid(const Rational& p1, const Rational& p2, const Rational& p3) {
        const std::array<const Rational*, 3> p{&p1, &p2, &p3};
        for (auto* v : p) {
            if (*v <= 0 || *v >= 1) return false;
        }
        return p1 + p2 <= 1 && p2 + p3 <= 1 && p1 + p3 <= 1;
    }

    /// 1-based access, matching the proposition indices.
    const Rational& operator()(int i) const {
        if (i < 1 || i > 3) throw PreconditionError("proposition index must be 1, 2 or 3");
        return p_[static_cast<std::size_t>(i - 1)];
    }
    const Rational& p1() const { return p_[0]; }
    const Rational& p2() const { return p_[1]; }
    const Rational& p3() const { return p_[2]; }

private:
    std::array<Rational, 3> p_;
};

/// Bob's conditional p(A_i = 1 | A_j = 0) split by Alice's outcome for A_k:
/// `alpha` when A_k = 1, `beta` when A_k = 0.
struct AlphaBeta {
    Rational alpha;
    Rational beta;
    int i = 1, j = 2, k = 3;
};

/// p(A_i = x | A_j = y) for a jointly measured orthogonal pair.
struct ConditionalProbs {
    Rational one_given_one;    // p(A_i=1 | A_j=1)
    Rational zero_given_one;   // p(A_i=0 | A_j=1)
    Rational one_given_zero;   // p(A_i=1 | A_j=0)
    Rational zero_given_zero;  // p(A_i=0 | A_j=0)
};

inline ConditionalProbs conditional_probs(const Rational& p_i, const Rational& p_j) {
    if (p_i < 0 || p_i > 1 || p_j < 0 || p_j > 1) throw PreconditionError("marginals must lie in [0,1]");
    if (p_i + p_j > 1) throw PreconditionError("orthogonal marginals must sum to at most 1");
    if (p_j == 1) throw PreconditionError("p(A_i | A_j = 0) is undefined when p_j = 1");
    const Rational one_given_zero = p_i / (1 - p_j);
    return {Rational(0), Rational(1), one_given_zero, (1 - p_i - p_j) / (1 - p_j)};
}

namespace detail {

inline void require_indices(const AlphaBeta& ab) {
    const bool in_range = ab.i >= 1 && ab.i <= 3 && ab.j >= 1 && ab.j <= 3 && ab.k >= 1 && ab.k <= 3;
    if (!in_range || ab.i == ab.j || ab.j == ab.k || ab.i == ab.k) {
        throw PreconditionError("alpha/beta indices must be a permutation of 1, 2, 3");
    }
}

}  // namespace detail

/// p_k alpha + (1 - p_k) beta - p_i / (1 - p_j); zero exactly when Bob's
/// averaged conditional is unaffected by Alice measuring A_k.
inline Rational nosig_constraint_residual(const AlphaBeta& ab, const TripleMarginals& t) {
    detail::require_indices(ab);
    return t(ab.k) * ab.alpha + (1 - t(ab.k)) * ab.beta - t(ab.i) / (1 - t(ab.j));
}

/// Bob's p(A1=1) and p(A2=1) in the four cases of Alice's protocol
/// (measure A3, then A1 or A2 depending on the outcome).
struct CaseMarginals {
    struct Pair {
        Rational a1;
        Rational a2;
    };
    Pair case_i;    // A3 = 1, then A1
    Pair case_ii;   // A3 = 1, then A2
    Pair case_iii;  // A3 = 0, then A1
    Pair case_iv;   // A3 = 0, then A2
};

inline CaseMarginals case_marginals(const TripleMarginals& t, const AlphaBeta& ab21, const AlphaBeta& ab12) {
    if (ab21.i != 2 || ab21.j != 1 || ab21.k != 3) throw PreconditionError("first parameters must be alpha_21^3, beta_21^3");
    if (ab12.i != 1 || ab12.j != 2 || ab12.k != 3) throw PreconditionError("second parameters must be alpha_12^3, beta_12^3");
    for (const auto* ab : {&ab21, &ab12}) {
        if (ab->alpha < 0 || ab->alpha > 1 || ab->beta < 0 || ab->beta > 1) {
            throw PreconditionError("alpha and beta must be probabilities");
        }
        if (nosig_constraint_residual(*ab, t) != 0) {
            throw PreconditionError("alpha_" + std::to_string(ab->i) + std::to_string(ab->j) +
                                    " / beta violate the no-signalling constraint (residual " +
                                    to_fraction(nosig_constraint_residual(*ab, t)) + ")");
        }
    }
    const Rational& p1 = t.p1();
    const Rational& p2 = t.p2();
    const Rational& p3 = t.p3();
    CaseMarginals out;
    out.case_i = {Rational(0), ab21.alpha};
    out.case_ii = {ab12.alpha, Rational(0)};
    out.case_iii = {p1 / (1 - p3), ab21.beta * (1 - p1 - p3) / (1 - p3)};
    out.case_iv = {ab12.beta * (1 - p2 - p3) / (1 - p3), p2 / (1 - p3)};
    return out;
}

/// The alpha_12^3 / beta_12^3 that leave Bob's p(A1=1) as high as the
/// constraint allows after Alice's best choice (case I on A3=1, case IV on A3=0).
///
/// beta = p1 / ((1-p2)(1-p3)) with alpha = 0, unless that beta exceeds 1; then
/// beta is clamped to 1 and alpha is recovered from the constraint.
inline AlphaBeta worst_case_params(const TripleMarginals& t) {
    const Rational target = t.p1() / (1 - t.p2());
    const Rational beta = target / (1 - t.p3());
    if (beta <= 1) return AlphaBeta{Rational(0), beta, 1, 2, 3};
    return AlphaBeta{(target - (1 - t.p3())) / t.p3(), Rational(1), 1, 2, 3};
}

/// Bob's p(A1=1) when Alice runs the protocol against worst-case parameters.
inline Rational protocol_bob_p1(const TripleMarginals& t) {
    const AlphaBeta worst = worst_case_params(t);
    // p3 * (case I: 0) + (1 - p3) * (case IV).
    return worst.beta * (1 - t.p2() - t.p3());
}

/// How far Alice lowers Bob's p(A1=1) below p1; strictly positive on every valid triple.
inline Rational signalling_gap(const TripleMarginals& t) { return t.p1() - protocol_bob_p1(t); }

/// Unclamped closed form p1 - p1(1-p2-p3)/((1-p2)(1-p3)).
inline Rational closed_form_gap(const TripleMarginals& t) {
    return t.p1() - t.p1() * (1 - t.p2() - t.p3()) / ((1 - t.p2()) * (1 - t.p3()));
}

/// Candidate values for each of p1, p2, p3; invalid combinations are skipped.
struct GridSpec {
    std::vector<Rational> values;

    /// {1/n, 2/n, ..., (n-1)/n}.
    static GridSpec uniform(int n) {
        if (n < 2) throw PreconditionError("grid denominator must be at least 2");
        GridSpec g;
        for (int k = 1; k < n; ++k) g.values.emplace_back(k, n);
        return g;
    }

    /// Every fraction strictly between 0 and 1 with denominator at most n, ascending.
    static GridSpec farey(int n) {
        if (n < 2) throw PreconditionError("grid denominator must be at least 2");
        std::set<Rational> seen;
        for (int d = 2; d <= n; ++d) {
            for (int k = 1; k < d; ++k) seen.emplace(k, d);
        }
        return GridSpec{{seen.begin(), seen.end()}};
    }
};

struct GapRow {
    Rational p1, p2, p3;
    Rational beta_worst, alpha_worst;
    Rational bob_p1;
    Rational gap;
};

/// Same values as worst_case_params / protocol_bob_p1 per point, with 1 - p
/// precomputed per grid value.
inline std::vector<GapRow> sweep_gap(const GridSpec& grid) {
    std::vector<Rational> values = grid.values;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<Rational> comp;
    comp.reserve(values.size());
    for (const auto& v : values) comp.push_back(1 - v);

    std::vector<GapRow> rows;
    for (std::size_t a = 0; a < values.size(); ++a) {
        const Rational& p1 = values[a];
        if (p1 <= 0 || p1 >= 1) continue;
        for (std::size_t b = 0; b < values.size(); ++b) {
            const Rational& p2 = values[b];
            if (p2 <= 0) continue;
            if (p2 > comp[a] || p2 >= 1) break;
            const Rational target = p1 / comp[b];
            for (std::size_t c = 0; c < values.size(); ++c) {
                const Rational& p3 = values[c];
                if (p3 <= 0) continue;
                if (p3 > comp[a] || p3 > comp[b] || p3 >= 1) break;
                GapRow row{p1, p2, p3, target / comp[c], Rational(0), Rational(0), Rational(0)};
                if (row.beta_worst > 1) {
                    row.alpha_worst = (target - comp[c]) / p3;
                    row.beta_worst = 1;
                }
                row.bob_p1 = row.beta_worst * (comp[b] - p3);
                row.gap = p1 - row.bob_p1;
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

}  // namespace orthobox
