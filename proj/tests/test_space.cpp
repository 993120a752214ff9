#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>
#include <sstream>

#include "fedecay/mesh.hpp"
#include "fedecay/space.hpp"

using namespace fedecay;

namespace {

Mesh unit_square_two_triangles() { return generate_rectangle_mesh(1, 1, 1, 1); }

/// Structured mesh with interior vertices jittered by up to `amount` cells.
Mesh jittered_mesh(int nx, int ny, double amount, unsigned seed) {
    const Mesh base = generate_rectangle_mesh(1.0, 1.0, nx, ny);
    std::vector<Vec2> vertices = base.vertices();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-amount / nx, amount / nx);
    for (int v = 0; v < base.n_vertices(); ++v)
        if (!base.vertex_on_boundary(v)) vertices[v] = vertices[v] + Vec2{d(rng), d(rng)};
    return Mesh(std::move(vertices), base.triangles(), base.boundary_edges());
}

std::vector<double> random_coeffs(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> c(n);
    for (double& v : c) v = gauss(rng);
    return c;
}

}  // namespace

TEST_SUITE("space") {

TEST_CASE("dof counts") {
    const Mesh square = unit_square_two_triangles();
    CHECK(build_space(square, 1).n_dofs() == 4);
    CHECK(build_space(square, 2).n_dofs() == 9);  // 4 vertices + 5 edges

    const Mesh grid = generate_rectangle_mesh(2, 1, 6, 4);
    CHECK(build_space(grid, 1).n_dofs() == 7 * 5);
}

TEST_CASE("unsupported degree is rejected") {
    const Mesh square = unit_square_two_triangles();
    CHECK_THROWS_AS(build_space(square, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_space(square, 0), std::invalid_argument);
}

TEST_CASE("interpolation of constants gives the all-ones vector") {
    for (int k : {1, 2}) {
        const Mesh mesh = generate_rectangle_mesh(2, 1, 3, 2);
        const FESpace space(mesh, k);
        const auto coeffs = nodal_interpolate(space, [](Vec2) { return 1.0; });
        for (double c : coeffs) CHECK(c == 1.0);
    }
}

TEST_CASE("P1 reproduces affine functions pointwise") {
    const Mesh mesh = generate_rectangle_mesh(2, 1, 4, 3);
    const FESpace space(mesh, 1);
    auto f = [](Vec2 p) { return 2.0 * p.x - p.y; };
    const auto coeffs = nodal_interpolate(space, f);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.9);
    for (int trial = 0; trial < 50; ++trial) {
        const int t = trial % mesh.n_triangles();
        double b0 = u(rng), b1 = u(rng) * (1.0 - b0);
        const double b2 = 1.0 - b0 - b1;
        const auto r = space.evaluate(coeffs, t, b0, b1, b2);
        const auto& tri = mesh.triangle(t);
        const Vec2 x = mesh.vertex(tri[0]) * b0 + mesh.vertex(tri[1]) * b1 +
                       mesh.vertex(tri[2]) * b2;
        CHECK(r.value == doctest::Approx(f(x)).epsilon(1e-13));
        CHECK(r.gradient.x == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(r.gradient.y == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("P2 reproduces quadratics pointwise") {
    const Mesh mesh = generate_rectangle_mesh(1, 1, 2, 2);
    const FESpace space(mesh, 2);
    auto f = [](Vec2 p) { return p.x * p.x + 0.5 * p.x * p.y - p.y; };
    auto fg = [](Vec2 p) { return Vec2{2.0 * p.x + 0.5 * p.y, 0.5 * p.x - 1.0}; };
    const auto coeffs = nodal_interpolate(space, f);

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto r = space.evaluate(coeffs, t, 0.2, 0.3, 0.5);
        const auto& tri = mesh.triangle(t);
        const Vec2 x = mesh.vertex(tri[0]) * 0.2 + mesh.vertex(tri[1]) * 0.3 +
                       mesh.vertex(tri[2]) * 0.5;
        CHECK(r.value == doctest::Approx(f(x)).epsilon(1e-12));
        CHECK(r.gradient.x == doctest::Approx(fg(x).x).epsilon(1e-11));
        CHECK(r.gradient.y == doctest::Approx(fg(x).y).epsilon(1e-11));
    }
}

TEST_CASE("hat function gradient on the unit right triangle") {
    const Mesh mesh({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}},
                    {{0, 1, BoundaryTag::GammaC},
                     {1, 2, BoundaryTag::GammaC},
                     {2, 0, BoundaryTag::GammaC}});
    const FESpace space(mesh, 1);
    std::vector<double> hat = {1.0, 0.0, 0.0};
    const auto r = space.evaluate(hat, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3);
    // Distance from (0,0) to the opposite edge x + y = 1 is 1/sqrt(2).
    CHECK(r.gradient.x == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(r.gradient.y == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(norm(r.gradient) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("evaluation is continuous across shared edges") {
    for (int k : {1, 2}) {
        const Mesh mesh = generate_rectangle_mesh(1, 1, 1, 1);
        const FESpace space(mesh, k);
        const auto coeffs = random_coeffs(space.n_dofs(), 11);
        // Shared edge runs between vertices 0 = (0,0) and 3 = (1,1): it is
        // (local 0, local 2) in element 0 and (local 0, local 1) in element 1.
        for (double s : {0.25, 0.5, 0.75}) {
            const auto a = space.evaluate(coeffs, 0, 1.0 - s, 0.0, s);
            const auto b = space.evaluate(coeffs, 1, 1.0 - s, s, 0.0);
            CHECK(a.value == doctest::Approx(b.value).epsilon(1e-13));
        }
    }
}

TEST_CASE("nodal interpolation is the identity on the space") {
    for (int k : {1, 2}) {
        const Mesh mesh = generate_rectangle_mesh(2, 1, 3, 2);
        const FESpace space(mesh, k);
        const auto coeffs = random_coeffs(space.n_dofs(), 23);
        // Evaluating at a nodal point returns that dof's coefficient, so the
        // interpolant of the FE function has identical coefficients.
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const auto dofs = space.element_dofs(t);
            constexpr double nodes[6][3] = {{1, 0, 0},      {0, 1, 0},      {0, 0, 1},
                                            {0.5, 0.5, 0},  {0, 0.5, 0.5},  {0.5, 0, 0.5}};
            for (int i = 0; i < space.dofs_per_element(); ++i) {
                const auto r =
                    space.evaluate(coeffs, t, nodes[i][0], nodes[i][1], nodes[i][2]);
                CHECK(r.value == doctest::Approx(coeffs[dofs[i]]).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("evaluate rejects invalid input") {
    const Mesh mesh = unit_square_two_triangles();
    const FESpace space(mesh, 1);
    const std::vector<double> coeffs(space.n_dofs(), 0.0);
    CHECK_THROWS_AS(space.evaluate(coeffs, 5, 1, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(space.evaluate(coeffs, -1, 1, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(space.evaluate(coeffs, 0, 0.5, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(space.evaluate(coeffs, 0, -0.2, 0.6, 0.6), std::invalid_argument);
    const std::vector<double> wrong_size(space.n_dofs() + 1, 0.0);
    CHECK_THROWS_AS(space.evaluate(wrong_size, 0, 1, 0, 0), std::invalid_argument);
}

TEST_CASE("evaluate is equivariant under rotation and translation") {
    const Mesh mesh = jittered_mesh(4, 4, 0.25, 5);
    const double theta = 0.6;
    const double ct = std::cos(theta), st = std::sin(theta);
    const Vec2 shift{1.5, -0.75};
    std::vector<Vec2> moved(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const Vec2 p = mesh.vertex(v);
        moved[v] = Vec2{ct * p.x - st * p.y, st * p.x + ct * p.y} + shift;
    }
    const Mesh rotated(std::move(moved), mesh.triangles(), mesh.boundary_edges());

    for (int k : {1, 2}) {
        const FESpace space(mesh, k), moved_space(rotated, k);
        // Connectivity is unchanged, so both spaces share one dof numbering.
        const auto coeffs = random_coeffs(space.n_dofs(), 31);
        for (int t = 0; t < mesh.n_triangles(); t += 3) {
            const auto a = space.evaluate(coeffs, t, 0.3, 0.25, 0.45);
            const auto b = moved_space.evaluate(coeffs, t, 0.3, 0.25, 0.45);
            CHECK(b.value == doctest::Approx(a.value).epsilon(1e-12));
            CHECK(b.gradient.x ==
                  doctest::Approx(ct * a.gradient.x - st * a.gradient.y).epsilon(1e-11));
            CHECK(b.gradient.y ==
                  doctest::Approx(st * a.gradient.x + ct * a.gradient.y).epsilon(1e-11));
        }
    }
}

TEST_CASE("edge midpoint dofs are addressable") {
    const Mesh mesh = unit_square_two_triangles();
    const FESpace space(mesh, 2);
    const int dof = space.edge_dof(0, 3);
    REQUIRE(dof >= 0);
    CHECK(space.dof_point(dof).x == doctest::Approx(0.5));
    CHECK(space.dof_point(dof).y == doctest::Approx(0.5));
    CHECK(space.edge_dof(0, 99) == -1);
    CHECK(build_space(mesh, 1).edge_dof(0, 3) == -1);
}

TEST_CASE("product interpolation stability constant stays below the cap") {
    for (int k : {1, 2}) {
        for (const Mesh& mesh :
             {generate_rectangle_mesh(1, 1, 8, 8), jittered_mesh(8, 8, 0.25, 17)}) {
            const FESpace space(mesh, k);
            const auto stability = measure_product_interpolation_stability(space, 100, 2024);
            CHECK(stability.c0 > 0.0);
            CHECK(stability.c1 > 0.0);
            CHECK(stability.c0 < 10.0);
            CHECK(stability.c1 < 10.0);
        }
    }
}

TEST_CASE("coefficient csv dump") {
    std::ostringstream out;
    write_coefficients_csv(std::vector<double>{1.5, -2.0}, out);
    CHECK(out.str() == "dof,value\n0,1.5\n1,-2\n");
}

}  // TEST_SUITE
