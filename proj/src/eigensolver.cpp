#include "dimeron/eigensystem.hpp"

#include "dimeron/errors.hpp"
#include "dimeron/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dimeron {

namespace {

// On return `a` holds the eigenvectors (columns, ascending eigenvalues).
Eigen::VectorXd eigh_in_place(Eigen::MatrixXd& a) {
    if (a.rows() == 0)
        return Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw NonConvergence("symmetric eigensolver did not converge (dimension " +
                             std::to_string(a.rows()) + ")");
    Eigen::VectorXd w = solver.eigenvalues();
    a = solver.eigenvectors();
    return w;
}

}  // namespace

EigenSystem diagonalize(Hamiltonian&& h) {
    EigenSystem out;
    out.hamiltonian_norm = h.matrix.norm();
    out.labels = std::move(h.labels);
    out.vectors = std::move(h.matrix);
    out.energies = eigh_in_place(out.vectors);
    return out;
}

EigenSystem diagonalize_blocks(const Hamiltonian& h, const std::vector<int>& block_of) {
    const Eigen::Index n = h.matrix.rows();
    std::map<int, std::vector<Eigen::Index>> blocks;
    for (Eigen::Index i = 0; i < n; ++i)
        blocks[block_of[static_cast<std::size_t>(i)]].push_back(i);

    Eigen::VectorXd energies(n);
    Eigen::MatrixXd vectors = Eigen::MatrixXd::Zero(n, n);
    Eigen::Index column = 0;
    for (const auto& [id, members] : blocks) {
        const auto m = static_cast<Eigen::Index>(members.size());
        Eigen::MatrixXd sub(m, m);
        for (Eigen::Index r = 0; r < m; ++r)
            for (Eigen::Index c = 0; c < m; ++c)
                sub(r, c) = h.matrix(members[r], members[c]);
        const Eigen::VectorXd w = eigh_in_place(sub);
        for (Eigen::Index c = 0; c < m; ++c, ++column) {
            energies(column) = w(c);
            for (Eigen::Index r = 0; r < m; ++r)
                vectors(members[r], column) = sub(r, c);
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return energies(a) < energies(b); });

    EigenSystem out;
    out.hamiltonian_norm = h.matrix.norm();
    out.labels = h.labels;
    out.energies.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        out.energies(c) = energies(order[static_cast<std::size_t>(c)]);
        out.vectors.col(c) = vectors.col(order[static_cast<std::size_t>(c)]);
    }
    return out;
}

EigenSystem diagonalize_subspaces(const Eigen::SparseMatrix<double>& h,
                                  const std::vector<Eigen::SparseMatrix<double>>& subspaces,
                                  std::vector<BasisLabel> labels, std::size_t threads) {
    const Eigen::Index n = h.rows();
    Eigen::Index total = 0;
    for (const auto& u : subspaces)
        total += u.cols();
    if (total != n)
        throw std::invalid_argument("diagonalize_subspaces: subspace dimensions do not add up");

    struct Block {
        Eigen::VectorXd w;
        Eigen::MatrixXd v;
    };
    auto solve = [&](std::size_t b) {
        const auto& u = subspaces[b];
        Eigen::MatrixXd sub = Eigen::MatrixXd(Eigen::SparseMatrix<double>(u.transpose() * h * u));
        Block out;
        out.w = eigh_in_place(sub);
        out.v = std::move(sub);
        return out;
    };
    const auto blocks = parallel_map(subspaces.size(), solve, threads);

    std::vector<std::pair<std::size_t, Eigen::Index>> order;
    order.reserve(static_cast<std::size_t>(n));
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (Eigen::Index c = 0; c < blocks[b].w.size(); ++c)
            order.emplace_back(b, c);
    std::stable_sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
        return blocks[x.first].w(x.second) < blocks[y.first].w(y.second);
    });

    EigenSystem out;
    out.hamiltonian_norm = h.norm();
    out.labels = std::move(labels);
    out.energies.resize(n);
    out.vectors = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto [b, col] = order[static_cast<std::size_t>(c)];
        out.energies(c) = blocks[b].w(col);
        out.vectors.col(c) = subspaces[b] * blocks[b].v.col(col);
    }
    return out;
}

double max_residual(const Eigen::MatrixXd& h, const EigenSystem& eigs) {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < eigs.energies.size(); ++c) {
        const Eigen::VectorXd r = h * eigs.vectors.col(c) - eigs.energies(c) * eigs.vectors.col(c);
        worst = std::max(worst, r.norm());
    }
    return worst;
}

}  // namespace dimeron
