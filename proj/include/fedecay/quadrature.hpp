#pragma once

#include <vector>

namespace fedecay {

struct QuadPoint {
    double b0, b1, b2;  // barycentric coordinates on the reference triangle
    double w;           // weight; weights of a rule sum to the reference area 1/2
};

class QuadratureRule {
public:
    QuadratureRule(std::vector<QuadPoint> points, int exactness);

    const std::vector<QuadPoint>& points() const { return points_; }
    int exactness() const { return exactness_; }

private:
    std::vector<QuadPoint> points_;
    int exactness_;
};

/// Smallest shipped symmetric rule exact to at least the requested degree.
/// Shipped degrees: 1, 2, 4, 6. Requests above 6 are rejected.
const QuadratureRule& quadrature(int exactness);

namespace detail {
/// Collapsed 5x5 Gauss rule, exact to degree 8. Internal: used where products
/// of quadratics are squared (interpolation-stability measurements).
const QuadratureRule& quadrature_degree8();
}  // namespace detail

}  // namespace fedecay
