#include "fedecay/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "fedecay/errors.hpp"

namespace fedecay {

SparseSPDMatrix SparseSPDMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
    if (n <= 0) throw std::invalid_argument("SparseSPDMatrix: dimension must be positive");
    for (const auto& t : triplets)
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw std::invalid_argument("SparseSPDMatrix: triplet index out of range");

    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseSPDMatrix m;
    m.n_ = n;
    m.row_ptr_.assign(n + 1, 0);
    m.cols_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    for (std::size_t i = 0; i < triplets.size();) {
        const int r = triplets[i].row, c = triplets[i].col;
        double sum = 0.0;
        while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c)
            sum += triplets[i++].value;
        m.cols_.push_back(c);
        m.values_.push_back(sum);
        ++m.row_ptr_[r + 1];
    }
    for (int r = 0; r < n; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
}

void SparseSPDMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (int r = 0; r < n_; ++r) {
        double sum = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) sum += values_[k] * x[cols_[k]];
        y[r] = sum;
    }
}

std::vector<double> SparseSPDMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(n_);
    multiply(x, y);
    return y;
}

double SparseSPDMatrix::coeff(int row, int col) const {
    for (int k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k)
        if (cols_[k] == col) return values_[k];
    return 0.0;
}

std::vector<double> SparseSPDMatrix::diagonal() const {
    std::vector<double> d(n_, 0.0);
    for (int r = 0; r < n_; ++r) d[r] = coeff(r, r);
    return d;
}

double SparseSPDMatrix::symmetry_defect() const {
    double max_entry = 0.0, max_defect = 0.0;
    for (int r = 0; r < n_; ++r) {
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            max_entry = std::max(max_entry, std::abs(values_[k]));
            if (cols_[k] >= r) continue;
            max_defect = std::max(max_defect, std::abs(values_[k] - coeff(cols_[k], r)));
        }
    }
    return max_entry > 0.0 ? max_defect / max_entry : 0.0;
}

SparseSPDMatrix SparseSPDMatrix::restrict_to(std::span<const int> indices) const {
    std::unordered_map<int, int> to_local;
    to_local.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) to_local.emplace(indices[i], static_cast<int>(i));

    std::vector<Triplet> triplets;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const int r = indices[i];
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            auto it = to_local.find(cols_[k]);
            if (it != to_local.end())
                triplets.push_back({static_cast<int>(i), it->second, values_[k]});
        }
    }
    return from_triplets(static_cast<int>(indices.size()), std::move(triplets));
}

CgResult cg_solve(const SparseSPDMatrix& matrix, std::span<const double> rhs, double tol,
                  int max_iter, std::span<const double> x0) {
    const int n = matrix.size();
    if (static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("cg_solve: rhs size mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("cg_solve: tolerance must be positive");

    CgResult result;
    result.x.assign(n, 0.0);
    if (!x0.empty()) {
        if (static_cast<int>(x0.size()) != n)
            throw std::invalid_argument("cg_solve: initial guess size mismatch");
        std::copy(x0.begin(), x0.end(), result.x.begin());
    }

    double b_norm2 = 0.0;
    for (double v : rhs) b_norm2 += v * v;
    if (b_norm2 == 0.0) {
        result.x.assign(n, 0.0);
        return result;
    }
    const double b_norm = std::sqrt(b_norm2);

    std::vector<double> inv_diag = matrix.diagonal();
    for (double& d : inv_diag) {
        if (!(d > 0.0))
            throw SolverError("cg_solve: nonpositive diagonal entry, matrix is not SPD", 0.0, 0);
        d = 1.0 / d;
    }

    std::vector<double> r(n), z(n), p(n), ap(n);
    matrix.multiply(result.x, ap);
    for (int i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];

    auto norm2 = [n](const std::vector<double>& v) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += v[i] * v[i];
        return s;
    };

    double r_norm = std::sqrt(norm2(r));
    if (r_norm <= tol * b_norm) {
        result.residual = r_norm / b_norm;
        return result;
    }

    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (int i = 0; i < n; ++i) rz += r[i] * z[i];

    for (int iter = 1; iter <= max_iter; ++iter) {
        matrix.multiply(p, ap);
        double pap = 0.0;
        for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (!(pap > 0.0))
            throw SolverError("cg_solve: direction of nonpositive curvature, matrix is not SPD",
                              r_norm / b_norm, iter);
        const double alpha = rz / pap;
        for (int i = 0; i < n; ++i) {
            result.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        r_norm = std::sqrt(norm2(r));
        if (r_norm <= tol * b_norm) {
            result.iterations = iter;
            result.residual = r_norm / b_norm;
            return result;
        }
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        double rz_next = 0.0;
        for (int i = 0; i < n; ++i) rz_next += r[i] * z[i];
        const double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw SolverError("cg_solve: no convergence within " + std::to_string(max_iter) +
                          " iterations, residual " + std::to_string(r_norm / b_norm),
                      r_norm / b_norm, max_iter);
}

}  // namespace fedecay
