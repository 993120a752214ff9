#include "fedecay/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fedecay {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// Exact integral of x^i y^j over the reference triangle {x,y >= 0, x+y <= 1}.
double monomial_integral(int i, int j) {
    return factorial(i) * factorial(j) / factorial(i + j + 2);
}

void verify_rule(const std::vector<QuadPoint>& pts, int exactness) {
    double wsum = 0.0;
    for (const auto& p : pts) {
        if (!(p.w > 0.0)) throw std::logic_error("quadrature: nonpositive weight");
        wsum += p.w;
    }
    if (std::abs(wsum - 0.5) > 1e-13) throw std::logic_error("quadrature: weights must sum to 1/2");
    for (int i = 0; i + 0 <= exactness; ++i) {
        for (int j = 0; i + j <= exactness; ++j) {
            double sum = 0.0;
            for (const auto& p : pts)
                sum += p.w * std::pow(p.b1, i) * std::pow(p.b2, j);
            if (std::abs(sum - monomial_integral(i, j)) > 1e-13)
                throw std::logic_error("quadrature: rule not exact for x^" + std::to_string(i) +
                                       " y^" + std::to_string(j));
        }
    }
}

std::vector<QuadPoint> orbit1(double w) {  // centroid
    return {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w}};
}

std::vector<QuadPoint> orbit3(double a, double w) {  // (1-2a, a, a) permutations
    const double b = 1.0 - 2.0 * a;
    return {{b, a, a, w}, {a, b, a, w}, {a, a, b, w}};
}

std::vector<QuadPoint> append(std::vector<QuadPoint> dst, const std::vector<QuadPoint>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
    return dst;
}

QuadratureRule make_degree1() {
    return QuadratureRule(orbit1(0.5), 1);
}

QuadratureRule make_degree2() {
    return QuadratureRule(orbit3(1.0 / 6.0, 1.0 / 6.0), 2);
}

QuadratureRule make_degree4() {
    auto pts = append(orbit3(0.445948490915965, 0.5 * 0.223381589678011),
                      orbit3(0.091576213509771, 0.5 * 0.109951743655322));
    return QuadratureRule(std::move(pts), 4);
}

QuadratureRule make_degree6() {
    auto pts = append(orbit3(0.063089014491502, 0.5 * 0.050844906370207),
                      orbit3(0.249286745170910, 0.5 * 0.116786275726379));
    // 6-point orbit: all permutations of (a, b, 1-a-b).
    const double a = 0.310352451033785, b = 0.053145049844816;
    const double c = 1.0 - a - b;
    const double w = 0.5 * 0.082851075618374;
    for (auto [x, y] : {std::pair{a, b}, {b, a}, {a, c}, {c, a}, {b, c}, {c, b}})
        pts.push_back({1.0 - x - y, x, y, w});
    return QuadratureRule(std::move(pts), 6);
}

/// Degree-8 rule from a collapsed 5x5 Gauss-Legendre grid on the unit square:
/// x = s, y = t(1-s), weight w_s * w_t * (1-s).
QuadratureRule make_degree8() {
    const double gl_x[5] = {-0.906179845938663993, -0.538469310105683091, 0.0,
                            0.538469310105683091, 0.906179845938663993};
    const double gl_w[5] = {0.236926885056189088, 0.478628670499366468, 0.568888888888888889,
                            0.478628670499366468, 0.236926885056189088};
    std::vector<QuadPoint> pts;
    pts.reserve(25);
    for (int is = 0; is < 5; ++is) {
        const double s = 0.5 * (gl_x[is] + 1.0);
        const double ws = 0.5 * gl_w[is];
        for (int it = 0; it < 5; ++it) {
            const double t = 0.5 * (gl_x[it] + 1.0);
            const double wt = 0.5 * gl_w[it];
            const double x = s, y = t * (1.0 - s);
            pts.push_back({1.0 - x - y, x, y, ws * wt * (1.0 - s)});
        }
    }
    return QuadratureRule(std::move(pts), 8);
}

}  // namespace

QuadratureRule::QuadratureRule(std::vector<QuadPoint> points, int exactness)
    : points_(std::move(points)), exactness_(exactness) {
    verify_rule(points_, exactness_);
}

const QuadratureRule& quadrature(int exactness) {
    static const QuadratureRule deg1 = make_degree1();
    static const QuadratureRule deg2 = make_degree2();
    static const QuadratureRule deg4 = make_degree4();
    static const QuadratureRule deg6 = make_degree6();
    if (exactness < 0 || exactness > 6)
        throw std::invalid_argument("quadrature: unsupported exactness degree " +
                                    std::to_string(exactness));
    if (exactness <= 1) return deg1;
    if (exactness <= 2) return deg2;
    if (exactness <= 4) return deg4;
    return deg6;
}

namespace detail {
const QuadratureRule& quadrature_degree8() {
    static const QuadratureRule deg8 = make_degree8();
    return deg8;
}
}  // namespace detail

}  // namespace fedecay
