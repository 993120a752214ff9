#pragma once

#include <span>
#include <vector>

namespace fedecay {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed-row storage of a symmetric matrix. Duplicate triplets are summed
/// in a fixed order, so assembly results do not depend on insertion order.
class SparseSPDMatrix {
public:
    static SparseSPDMatrix from_triplets(int n, std::vector<Triplet> triplets);

    int size() const { return n_; }
    std::size_t nonzeros() const { return values_.size(); }

    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    double coeff(int row, int col) const;
    std::vector<double> diagonal() const;

    /// Largest |a_ij - a_ji| relative to the largest entry magnitude.
    double symmetry_defect() const;

    /// Principal submatrix for the given index subset (sorted, duplicate-free).
    SparseSPDMatrix restrict_to(std::span<const int> indices) const;

private:
    int n_ = 0;
    std::vector<int> row_ptr_;
    std::vector<int> cols_;
    std::vector<double> values_;
};

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0;  // final ||Ax - b|| / ||b||
};

/// Jacobi-preconditioned conjugate gradients. Stops when the unpreconditioned
/// residual satisfies ||Ax - b|| <= tol * ||b||; throws SolverError when the
/// iteration cap is reached first. An optional initial guess may be supplied.
CgResult cg_solve(const SparseSPDMatrix& matrix, std::span<const double> rhs, double tol,
                  int max_iter, std::span<const double> x0 = {});

}  // namespace fedecay
