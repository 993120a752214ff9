#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "fedecay/assembly.hpp"
#include "fedecay/errors.hpp"

using namespace fedecay;

namespace {

Mesh unit_right_triangle() {
    return Mesh({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}},
                {{0, 1, BoundaryTag::GammaC},
                 {1, 2, BoundaryTag::GammaC},
                 {2, 0, BoundaryTag::GammaC}});
}

Mesh left_tagged_rectangle(int nx, int ny) {
    return boundary_partition(generate_rectangle_mesh(2, 1, nx, ny),
                              [](Vec2 p) { return p.x < 1e-12; });
}

}  // namespace

TEST_SUITE("assembly") {

TEST_CASE("P1 stiffness of the unit right triangle") {
    const Mesh mesh = unit_right_triangle();
    const FESpace space(mesh, 1);
    const auto s = assemble_stiffness(space, CoefficientField::identity());
    const double expected[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(s.coeff(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-14));
}

TEST_CASE("stiffness row sums vanish (constants in the kernel)") {
    for (int k : {1, 2}) {
        const Mesh mesh = generate_rectangle_mesh(2, 1, 5, 3);
        const FESpace space(mesh, k);
        const auto s = assemble_stiffness(space, CoefficientField::identity());
        const std::vector<double> ones(space.n_dofs(), 1.0);
        for (double v : s.multiply(ones)) CHECK(std::abs(v) < 1e-13);
    }
}

TEST_CASE("stiffness is linear in the coefficient") {
    const Mesh mesh = generate_rectangle_mesh(1, 1, 3, 3);
    const FESpace space(mesh, 1);
    const auto s1 = assemble_stiffness(space, CoefficientField::identity());
    const auto s2 = assemble_stiffness(space, CoefficientField::constant({2.0, 0.0, 2.0}));
    for (int i = 0; i < space.n_dofs(); ++i)
        CHECK(s2.coeff(i, i) == doctest::Approx(2.0 * s1.coeff(i, i)).epsilon(1e-14));
}

TEST_CASE("P1 mass matrix of a single triangle") {
    const Mesh mesh = unit_right_triangle();
    const FESpace space(mesh, 1);
    const auto m = assemble_mass(space);
    const double area = 0.5;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(m.coeff(i, j) ==
                  doctest::Approx(area / 12.0 * (i == j ? 2.0 : 1.0)).epsilon(1e-14));
}

TEST_CASE("mass entries sum to the domain area") {
    for (int k : {1, 2}) {
        const Mesh mesh = generate_rectangle_mesh(2, 1, 6, 3);
        const FESpace space(mesh, k);
        const auto m = assemble_mass(space);
        const std::vector<double> ones(space.n_dofs(), 1.0);
        double total = 0.0;
        for (double v : m.multiply(ones)) total += v;
        CHECK(total == doctest::Approx(2.0).epsilon(1e-13));
    }
}

TEST_CASE("mass matrix is positive definite") {
    const Mesh mesh = generate_rectangle_mesh(1, 1, 4, 4);
    const FESpace space(mesh, 1);
    const auto m = assemble_mass(space);
    std::mt19937 rng(9);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(space.n_dofs());
        for (double& v : x) v = gauss(rng);
        const auto mx = m.multiply(x);
        double q = 0.0;
        for (int i = 0; i < space.n_dofs(); ++i) q += x[i] * mx[i];
        CHECK(q > 0.0);
    }
}

TEST_CASE("assembled matrices are numerically symmetric") {
    const Mesh mesh = left_tagged_rectangle(6, 4);
    for (int k : {1, 2}) {
        const FESpace space(mesh, k);
        CHECK(assemble_stiffness(space, CoefficientField::identity()).symmetry_defect() < 1e-12);
        CHECK(assemble_mass(space).symmetry_defect() < 1e-12);
    }
}

TEST_CASE("nodal lifting basics") {
    const Mesh mesh = left_tagged_rectangle(8, 5);
    const FESpace space(mesh, 1);

    SUBCASE("zero datum gives the zero vector") {
        const auto lift = nodal_lifting(space, [](Vec2) { return 0.0; });
        for (double v : lift) CHECK(v == 0.0);
    }
    SUBCASE("unit datum sets exactly the Gamma dofs") {
        const auto lift = nodal_lifting(space, [](Vec2) { return 1.0; });
        int ones = 0;
        for (double v : lift) {
            CHECK((v == 0.0 || v == 1.0));
            if (v == 1.0) ++ones;
        }
        CHECK(ones == 5 + 1);  // ny + 1 left-edge vertices
    }
}

TEST_CASE("lifting support is one element layer around Gamma") {
    const int nx = 8, ny = 5;
    const Mesh mesh = left_tagged_rectangle(nx, ny);
    const FESpace space(mesh, 1);
    const DiscreteSolution sol =
        solve_dirichlet(space, CoefficientField::identity(), 0.0, [](Vec2) { return 1.0; });
    // Column 0 holds every element owning a left-edge vertex.
    std::vector<int> expected;
    for (int j = 0; j < ny; ++j) {
        expected.push_back(2 * (j * nx));
        expected.push_back(2 * (j * nx) + 1);
    }
    CHECK(sol.lifting_support == CellSet(expected, mesh.n_triangles()));
}

TEST_CASE("zero data gives the zero solution") {
    const Mesh mesh = left_tagged_rectangle(4, 3);
    const FESpace space(mesh, 1);
    const DiscreteSolution sol =
        solve_dirichlet(space, CoefficientField::identity(), 1.5, [](Vec2) { return 0.0; });
    for (double v : sol.u) CHECK(v == 0.0);
}

TEST_CASE("whole-boundary Dirichlet with lambda = 0 is rejected") {
    const Mesh mesh =
        boundary_partition(generate_rectangle_mesh(1, 1, 3, 3), [](Vec2) { return true; });
    const FESpace space(mesh, 1);
    CHECK_THROWS_AS(
        solve_dirichlet(space, CoefficientField::identity(), 0.0, [](Vec2) { return 1.0; }),
        SingularProblemError);
    // With lambda > 0 the same setup is coercive and solvable.
    CHECK_NOTHROW(
        solve_dirichlet(space, CoefficientField::identity(), 2.0, [](Vec2) { return 1.0; }));
}

TEST_CASE("P1 reproduces a discrete-harmonic affine solution exactly") {
    // u(x, y) = x is harmonic, vanishes on the left edge (GammaC) and is
    // affine, so the P1 solution reproduces it to solver tolerance.
    const Mesh mesh = boundary_partition(generate_rectangle_mesh(2, 1, 6, 4),
                                         [](Vec2 p) { return p.x > 1e-12; });
    const FESpace space(mesh, 1);
    const DiscreteSolution sol = solve_dirichlet(space, CoefficientField::identity(), 0.0,
                                                 [](Vec2 p) { return p.x; });
    for (int d = 0; d < space.n_dofs(); ++d)
        CHECK(sol.u[d] == doctest::Approx(space.dof_point(d).x).epsilon(1e-9));
}

TEST_CASE("energy norm identities") {
    const Mesh mesh = left_tagged_rectangle(10, 5);
    const FESpace space(mesh, 1);
    const double lambda = 2.0;
    const DiscreteSolution sol = solve_dirichlet(space, CoefficientField::identity(), lambda,
                                                 [](Vec2 p) { return std::sin(M_PI * p.y); });

    SUBCASE("zero solution has zero energy") {
        DiscreteSolution zero = sol;
        std::fill(zero.u.begin(), zero.u.end(), 0.0);
        CHECK(energy_norm(zero) == 0.0);
    }
    SUBCASE("quadrature energy equals the algebraic quadratic form") {
        const auto s = assemble_stiffness(space, sol.field);
        const auto m = assemble_mass(space);
        const auto su = s.multiply(sol.u);
        const auto mu = m.multiply(sol.u);
        double quad_form = 0.0;
        for (int i = 0; i < space.n_dofs(); ++i)
            quad_form += sol.u[i] * (su[i] + lambda * lambda * mu[i]);
        const double e2 = energy_norm(sol) * energy_norm(sol);
        CHECK(e2 == doctest::Approx(quad_form).epsilon(1e-12));
    }
    SUBCASE("a-priori bound by the lifting H1 norm") {
        const auto s = assemble_stiffness(space, CoefficientField::identity());
        const auto m = assemble_mass(space);
        const auto sg = s.multiply(sol.u_g);
        const auto mg = m.multiply(sol.u_g);
        double h1_sq = 0.0;
        for (int i = 0; i < space.n_dofs(); ++i) h1_sq += sol.u_g[i] * (sg[i] + mg[i]);
        const double bound = 2.0 * std::max(1.0, lambda) * std::sqrt(h1_sq);
        CHECK(energy_norm(sol) <= bound);
    }
}

TEST_CASE("Galerkin residual is orthogonal to interior test vectors") {
    const Mesh mesh = left_tagged_rectangle(10, 5);
    const FESpace space(mesh, 1);
    const double lambda = 1.0, tol = 1e-12;
    const DiscreteSolution sol =
        solve_dirichlet(space, CoefficientField::identity(), lambda,
                        [](Vec2 p) { return std::sin(M_PI * p.y); }, nullptr, tol);

    const auto s = assemble_stiffness(space, sol.field);
    const auto m = assemble_mass(space);
    std::vector<int> interior;
    for (int d = 0; d < space.n_dofs(); ++d)
        if (!space.dof_on_boundary(d)) interior.push_back(d);

    // r = b - A u0 on interior dofs, with b = -(S + l^2 M) u_g there.
    const auto su = s.multiply(sol.u);
    const auto mu = m.multiply(sol.u);
    std::vector<double> residual(interior.size());
    double b_norm = 0.0;
    {
        const auto sg = s.multiply(sol.u_g);
        const auto mg = m.multiply(sol.u_g);
        for (std::size_t i = 0; i < interior.size(); ++i) {
            const int d = interior[i];
            residual[i] = -(su[d] + lambda * lambda * mu[d]);
            const double b = -(sg[d] + lambda * lambda * mg[d]);
            b_norm += b * b;
        }
        b_norm = std::sqrt(b_norm);
    }

    std::mt19937 rng(77);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(interior.size());
        double n2 = 0.0;
        for (double& x : v) {
            x = gauss(rng);
            n2 += x * x;
        }
        double dotp = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) dotp += v[i] * residual[i];
        CHECK(std::abs(dotp) / std::sqrt(n2) <= 10.0 * tol * b_norm);
    }
}

TEST_CASE("scaling the problem leaves the solution unchanged") {
    const Mesh mesh = left_tagged_rectangle(6, 4);
    const FESpace space(mesh, 1);
    const double s = 3.0;
    const DiscreteSolution base = solve_dirichlet(space, CoefficientField::identity(), 2.0,
                                                  [](Vec2 p) { return std::sin(M_PI * p.y); });
    const DiscreteSolution scaled =
        solve_dirichlet(space, CoefficientField::constant({s, 0.0, s}), 2.0 * std::sqrt(s),
                        [](Vec2 p) { return std::sin(M_PI * p.y); });
    for (int d = 0; d < space.n_dofs(); ++d)
        CHECK(scaled.u[d] == doctest::Approx(base.u[d]).epsilon(1e-9));
    const double e_base = energy_norm(base), e_scaled = energy_norm(scaled);
    CHECK(e_scaled * e_scaled == doctest::Approx(s * e_base * e_base).epsilon(1e-9));
}

TEST_CASE("coefficient field validates positive definiteness") {
    CHECK_THROWS_AS(CoefficientField::constant({1.0, 2.0, 1.0}), std::invalid_argument);
    const auto f = CoefficientField::constant({2.0, 0.5, 1.0});
    CHECK(f.alpha() > 0.0);
    CHECK(f.beta() >= f.alpha());
}

}  // TEST_SUITE
