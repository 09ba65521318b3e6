#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <vector>

namespace dimeron {

/// Which sector of a Fano Hamiltonian a basis vector belongs to.
enum class Sector {
    Macrodimer,        // two-atom: vibrational mode `index`
    EvenContinuum,     // two-atom: cos wave `index`
    OddContinuum,      // two-atom: sin wave `index`
    Excited,           // three-atom: |e_site, k1, k2>
    DimerLink,         // three-atom: macrodimer on link `site`, free momentum `index`
};

struct BasisLabel {
    Sector sector;
    int site = 0;     // excited site (0..2) or link (0..1) for three-atom sectors
    int index = 0;    // mode / momentum index
    int index2 = 0;   // second momentum index for three-atom excited states
};

/// Real symmetric Hamiltonian together with its basis labels.
struct Hamiltonian {
    Eigen::MatrixXd matrix;
    std::vector<BasisLabel> labels;
};

/// Energies (ascending), orthonormal eigenvectors as columns, and labels.
struct EigenSystem {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
    std::vector<BasisLabel> labels;
    /// Frobenius norm of the diagonalized matrix, for relative tolerances.
    double hamiltonian_norm = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
};

/// Dense symmetric diagonalization (Householder tridiagonalization + implicit
/// QL). Consumes the matrix storage.
EigenSystem diagonalize(Hamiltonian&& h);

/// Diagonalize independent blocks given by `block_of[i]` (basis index → block
/// id) and scatter the results back into the full basis, sorted by energy.
/// Off-block matrix elements must vanish.
EigenSystem diagonalize_blocks(const Hamiltonian& h, const std::vector<int>& block_of);

/// Diagonalize a sparse symmetric H inside invariant subspaces. Each entry of
/// `subspaces` is an n×m matrix with orthonormal columns spanning an
/// H-invariant subspace; together they must span the full space. Blocks are
/// solved on up to `threads` workers and the results merged by energy.
EigenSystem diagonalize_subspaces(const Eigen::SparseMatrix<double>& h,
                                  const std::vector<Eigen::SparseMatrix<double>>& subspaces,
                                  std::vector<BasisLabel> labels, std::size_t threads = 1);

/// max_n ‖H v_n − E_n v_n‖.
double max_residual(const Eigen::MatrixXd& h, const EigenSystem& eigs);

}  // namespace dimeron
