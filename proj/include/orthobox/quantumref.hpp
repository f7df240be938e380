#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"

namespace orthobox::quantum {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double tolerance = 1e-12;

inline double max_entry(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

/// Two-outcome projective measurement {P+, P-}.
struct ProjectorPair {
    Matrix plus;
    Matrix minus;

    Eigen::Index dimension() const { return plus.rows(); }

    /// Largest violation of idempotence, self-adjointness and completeness.
    double defect() const {
        if (plus.rows() != plus.cols() || minus.rows() != minus.cols() || plus.rows() != minus.rows()) {
            throw PreconditionError("projector pair must consist of square matrices of one dimension");
        }
        const Matrix id = Matrix::Identity(plus.rows(), plus.cols());
        double d = max_entry(plus + minus - id);
        for (const Matrix* p : {&plus, &minus}) {
            d = std::max(d, max_entry(*p * *p - *p));
            d = std::max(d, max_entry(*p - p->adjoint()));
        }
        return d;
    }

    bool valid() const { return defect() <= tolerance; }
};

struct PovmCheck {
    double deviation = 0;    // max-entry distance of the effects' sum from the identity
    double input_defect = 0; // how far the inputs are from projector pairs
    bool inputs_valid = true;
};

/// Sum of the effects C+ A+ C+, C+ A- C+, C- B+ C-, C- B- C- minus the identity.
inline PovmCheck povm_identity_check(const ProjectorPair& a, const ProjectorPair& b, const ProjectorPair& c) {
    const auto n = a.dimension();
    if (b.dimension() != n || c.dimension() != n) throw PreconditionError("projector pairs differ in dimension");
    PovmCheck r;
    r.input_defect = std::max({a.defect(), b.defect(), c.defect()});
    r.inputs_valid = r.input_defect <= tolerance;
    const Matrix sum = c.plus * a.plus * c.plus + c.plus * a.minus * c.plus + c.minus * b.plus * c.minus +
                       c.minus * b.minus * c.minus;
    r.deviation = max_entry(sum - Matrix::Identity(n, n));
    return r;
}

/// Random source for the reference checks: complex Gaussian entries from a
/// seeded mt19937_64.
class RandomMatrices {
public:
    explicit RandomMatrices(std::uint64_t seed = 0) : engine_(seed) {}

    Matrix gaussian(Eigen::Index rows, Eigen::Index cols) {
        Matrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(normal_(engine_), normal_(engine_));
        }
        return m;
    }

    Matrix unitary(Eigen::Index n) {
        Eigen::HouseholderQR<Matrix> qr(gaussian(n, n));
        return qr.householderQ() * Matrix::Identity(n, n);
    }

    /// P+ projects onto a random `rank`-dimensional subspace, P- = 1 - P+.
    ProjectorPair projector_pair(Eigen::Index n, Eigen::Index rank) {
        if (rank < 0 || rank > n) throw PreconditionError("projector rank out of range");
        const Matrix q = unitary(n).leftCols(rank);
        Matrix plus = q * q.adjoint();
        return {plus, Matrix::Identity(n, n) - plus};
    }

    /// Rank drawn uniformly from 0..n.
    ProjectorPair projector_pair(Eigen::Index n) {
        std::uniform_int_distribution<Eigen::Index> rank(0, n);
        return projector_pair(n, rank(engine_));
    }

    Matrix density_matrix(Eigen::Index n) {
        const Matrix g = gaussian(n, n);
        Matrix rho = g * g.adjoint();
        return rho / rho.trace().real();
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Spin-1 operators in the S_z eigenbasis (m = +1, 0, -1).
inline std::array<Matrix, 3> spin_one_operators() {
    const double r = 1.0 / std::sqrt(2.0);
    const Complex i(0, 1);
    Matrix sx(3, 3), sy(3, 3), sz(3, 3);
    sx << 0, r, 0, r, 0, r, 0, r, 0;
    sy << 0, -i * r, 0, i * r, 0, -i * r, 0, i * r, 0;
    sz << 1, 0, 0, 0, 0, 0, 0, 0, -1;
    return {sx, sy, sz};
}

/// Rank-one projectors onto the spin-0 states along x, y, z.
struct SpinOneFrame {
    std::array<Vector, 3> zero_states;
    std::array<Matrix, 3> projectors;

    /// Spin-0 eigenvectors of S_x, S_y, S_z, optionally rotated by `u`.
    static SpinOneFrame standard(const Matrix& u = Matrix::Identity(3, 3)) {
        SpinOneFrame f;
        const auto ops = spin_one_operators();
        for (std::size_t d = 0; d < 3; ++d) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(ops[d]);
            Eigen::Index k = 0;
            es.eigenvalues().cwiseAbs().minCoeff(&k);
            Vector v = u * es.eigenvectors().col(k);
            // Fix the global phase so the largest component is real positive.
            Eigen::Index j = 0;
            v.cwiseAbs().maxCoeff(&j);
            v *= std::conj(v(j)) / std::abs(v(j));
            f.zero_states[d] = v;
            f.projectors[d] = v * v.adjoint();
        }
        return f;
    }

    /// S_d written in the frame: (S_d)_{ij} = -i eps_{dij} on the spin-0 states,
    /// so its own spin-0 state is zero_states[d].
    Matrix spin_component(std::size_t d) const {
        Matrix s = Matrix::Zero(3, 3);
        const Complex minus_i(0, -1);
        const std::size_t i = (d + 1) % 3, j = (d + 2) % 3;
        s += minus_i * zero_states[i] * zero_states[j].adjoint();
        s -= minus_i * zero_states[j] * zero_states[i].adjoint();
        return s;
    }

    /// Largest violation of rank-one projection, mutual orthogonality and completeness.
    double defect() const {
        const Matrix id = Matrix::Identity(3, 3);
        Matrix sum = Matrix::Zero(3, 3);
        double d = 0;
        for (std::size_t a = 0; a < 3; ++a) {
            const Matrix& p = projectors[a];
            if (p.rows() != 3 || p.cols() != 3) throw PreconditionError("spin-1 frame projectors must be 3x3");
            d = std::max(d, max_entry(p * p - p));
            d = std::max(d, max_entry(p - p.adjoint()));
            d = std::max(d, std::abs(p.trace() - Complex(1, 0)));
            for (std::size_t b = a + 1; b < 3; ++b) d = std::max(d, max_entry(p * projectors[b]));
            sum += p;
        }
        return std::max(d, max_entry(sum - id));
    }
};

/// Distribution over which direction registered spin 0: x, y, z, or none.
/// `multiple` is the probability that more than one direction fired.
struct LudersDistribution {
    std::array<double, 4> p{};
    double multiple = 0;
};

inline void require_state(const Matrix& rho, Eigen::Index n) {
    if (rho.rows() != n || rho.cols() != n) throw PreconditionError("state has the wrong dimension");
    if (std::abs(rho.trace() - Complex(1, 0)) > 1e-9) throw PreconditionError("state is not normalized");
    if (max_entry(rho - rho.adjoint()) > 1e-9) throw PreconditionError("state is not self-adjoint");
}

/// Three sequential yes/no Lüders measurements {P_d, 1 - P_d}, in `order`.
inline LudersDistribution luders_sequence(const SpinOneFrame& frame, const std::array<int, 3>& order, const Matrix& rho) {
    require_state(rho, 3);
    std::array<bool, 3> seen{};
    for (int d : order) {
        if (d < 0 || d > 2 || seen[static_cast<std::size_t>(d)]) throw PreconditionError("order must be a permutation of 0, 1, 2");
        seen[static_cast<std::size_t>(d)] = true;
    }
    const Matrix id = Matrix::Identity(3, 3);
    LudersDistribution out;
    for (unsigned pattern = 0; pattern < 8; ++pattern) {
        Matrix state = rho;
        for (std::size_t step = 0; step < 3; ++step) {
            const auto d = static_cast<std::size_t>(order[step]);
            const Matrix k = (pattern >> d) & 1U ? frame.projectors[d] : Matrix(id - frame.projectors[d]);
            state = k * state * k;
        }
        const double p = state.trace().real();
        switch (pattern) {
            case 0: out.p[3] += p; break;
            case 1: out.p[0] += p; break;
            case 2: out.p[1] += p; break;
            case 4: out.p[2] += p; break;
            default: out.multiple += p; break;
        }
    }
    return out;
}

inline const std::array<std::array<int, 3>, 6>& all_orders() {
    static const std::array<std::array<int, 3>, 6> orders{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    return orders;
}

/// Largest difference between the distributions of any two orders.
inline double luders_order_spread(const SpinOneFrame& frame, const Matrix& rho) {
    const auto ref = luders_sequence(frame, all_orders()[0], rho);
    double spread = 0;
    for (const auto& order : all_orders()) {
        const auto d = luders_sequence(frame, order, rho);
        for (std::size_t i = 0; i < 4; ++i) spread = std::max(spread, std::abs(d.p[i] - ref.p[i]));
        spread = std::max(spread, std::abs(d.multiple - ref.multiple));
    }
    return spread;
}

struct DirectionCorrelation {
    double alice_marginal = 0;       // p(P_d fires) on the first system
    double bob_marginal = 0;         // p(P_d fires) on the second system
    double agreement = 0;            // p(both fire or neither fires)
    double correlation = 0;          // Pearson coefficient of the two indicators
    double spin_anticorrelation = 0; // p(m_A = -m_B) when both measure S_d
};

/// Matching measurements on (1/sqrt 3) sum_d |0_d>|0_d>. This state is the
/// total-spin-zero state of two spin-1 systems, so the two readings of the
/// same report differ only in convention: the rank-one spin-0 projections come
/// out perfectly correlated while the spin components come out perfectly
/// anticorrelated.
struct EntanglementReport {
    std::array<DirectionCorrelation, 3> directions;
    double max_defect = 0;  // worst distance from the ideal values (1/3, 1, 1, 1)
};

inline EntanglementReport entangled_spin1_correlations(const SpinOneFrame& frame) {
    if (frame.defect() > tolerance) throw PreconditionError("spin-1 frame is not an orthogonal resolution of the identity");
    Vector psi = Vector::Zero(9);
    for (const auto& v : frame.zero_states) psi += kron(v, v);
    psi /= std::sqrt(3.0);
    const Matrix rho = psi * psi.adjoint();
    const Matrix id = Matrix::Identity(3, 3);

    auto expect = [&](const Matrix& a, const Matrix& b) {
        return (rho * kron(a, b)).trace().real();
    };

    EntanglementReport r;
    for (std::size_t d = 0; d < 3; ++d) {
        const Matrix& p = frame.projectors[d];
        auto& c = r.directions[d];
        c.alice_marginal = expect(p, id);
        c.bob_marginal = expect(id, p);
        const double both = expect(p, p);
        const double neither = expect(id - p, id - p);
        c.agreement = both + neither;
        const double var = c.alice_marginal * (1 - c.alice_marginal) * c.bob_marginal * (1 - c.bob_marginal);
        c.correlation = (both - c.alice_marginal * c.bob_marginal) / std::sqrt(var);

        // Eigenprojectors of the frame's spin component along d, for m = +1, 0, -1.
        Eigen::SelfAdjointEigenSolver<Matrix> es(frame.spin_component(d));
        std::array<Matrix, 3> eig;
        std::array<double, 3> m{};
        for (Eigen::Index k = 0; k < 3; ++k) {
            const Vector v = es.eigenvectors().col(k);
            eig[static_cast<std::size_t>(k)] = v * v.adjoint();
            m[static_cast<std::size_t>(k)] = std::round(es.eigenvalues()(k));
        }
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) {
                if (m[a] == -m[b]) c.spin_anticorrelation += expect(eig[a], eig[b]);
            }
        }
        for (double v : {std::abs(c.alice_marginal - 1.0 / 3), std::abs(c.bob_marginal - 1.0 / 3),
                         std::abs(c.agreement - 1), std::abs(c.correlation - 1), std::abs(c.spin_anticorrelation - 1)}) {
            r.max_defect = std::max(r.max_defect, v);
        }
    }
    return r;
}

}  // namespace orthobox::quantum
