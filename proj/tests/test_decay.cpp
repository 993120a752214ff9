#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "fedecay/decay.hpp"

using namespace fedecay;

namespace {

struct RectangleExperiment {
    Mesh mesh;
    FESpace space;
    DiscreteSolution solution;
    CellSet d_h;
    PatchLadder ladder;

    RectangleExperiment(int nx, int ny, double lambda, Box d_h_box)
        : mesh(boundary_partition(generate_rectangle_mesh(2, 1, nx, ny),
                                  [](Vec2 p) { return p.x < 1e-12; })),
          space(mesh, 1),
          solution(solve_dirichlet(space, CoefficientField::identity(), lambda,
                                   [](Vec2 p) { return std::sin(M_PI * p.y); })),
          d_h(select_cells_in_box(mesh, d_h_box)),
          ladder(build_ladder(mesh, d_h, solution.lifting_support)) {}
};

}  // namespace

TEST_SUITE("decay") {

TEST_CASE("patch energy is additive and consistent with the energy norm") {
    RectangleExperiment ex(20, 10, 2.0, {{1.8, 0.4}, {2.0, 0.6}});
    const CellSet all = CellSet::all(ex.mesh.n_triangles());

    const double total = patch_energy(ex.solution, all);
    const double norm = energy_norm(ex.solution);
    CHECK(total == doctest::Approx(norm * norm).epsilon(1e-13));
    CHECK(patch_energy(ex.solution, CellSet()) == 0.0);

    REQUIRE(ex.ladder.ell_max() >= 2);
    const int ell = 1;
    const double ring = patch_energy(ex.solution, boundary_layer(ex.ladder, ell + 1));
    const double diff = patch_energy(ex.solution, ex.ladder.patch(ell + 1)) -
                        patch_energy(ex.solution, ex.ladder.patch(ell));
    CHECK(ring == doctest::Approx(diff).epsilon(1e-11));
}

TEST_CASE("energy profile invariants on the rectangle experiment") {
    RectangleExperiment ex(40, 20, 0.0, {{1.9, 0.4}, {2.0, 0.6}});
    const DecayProfile profile = energy_profile(ex.solution, ex.ladder);

    REQUIRE(profile.ell_max() == ex.ladder.ell_max());
    for (int ell = 0; ell < profile.ell_max(); ++ell)
        CHECK(profile.energy[ell] <= profile.energy[ell + 1]);  // exact monotonicity
    for (double rel : profile.relative_energy) {
        CHECK(rel >= 0.0);
        CHECK(rel <= 1.0);
    }
    for (double q : profile.quotients) {
        CHECK(q > 0.0);
        CHECK(q < 1.0);
    }
    REQUIRE(profile.rho_hat.has_value());
    CHECK(*profile.rho_hat > 0.0);
    CHECK(*profile.rho_hat < 1.0);
    REQUIRE(profile.mad.has_value());
    CHECK(*profile.mad >= 0.0);
    CHECK(profile.energy.back() <= profile.total_energy);
}

TEST_CASE("zero datum gives a degenerate profile") {
    const Mesh mesh = boundary_partition(generate_rectangle_mesh(2, 1, 10, 5),
                                         [](Vec2 p) { return p.x < 1e-12; });
    const FESpace space(mesh, 1);
    const DiscreteSolution sol =
        solve_dirichlet(space, CoefficientField::identity(), 1.0, [](Vec2) { return 0.0; });
    // No lifting support: grow D_h freely, then the profile has zero energy.
    const PatchLadder ladder =
        build_ladder(mesh, select_cells_in_box(mesh, {{1.6, 0.4}, {2.0, 0.6}}), CellSet());
    CHECK_THROWS_AS(energy_profile(sol, ladder), std::domain_error);
}

TEST_CASE("single-layer ladder yields a profile without quotients") {
    // D_h one element layer away from the lifting support: ell_max = 0.
    const int nx = 5;
    const Mesh mesh = boundary_partition(generate_rectangle_mesh(5, 1, nx, 1),
                                         [](Vec2 p) { return p.x < 1e-12; });
    const FESpace space(mesh, 1);
    const DiscreteSolution sol = solve_dirichlet(space, CoefficientField::identity(), 1.0,
                                                 [](Vec2) { return 1.0; });
    const CellSet d_h({4, 5}, mesh.n_triangles());  // column 2
    const PatchLadder ladder = build_ladder(mesh, d_h, sol.lifting_support);
    REQUIRE(ladder.ell_max() == 0);
    const DecayProfile profile = energy_profile(sol, ladder);
    CHECK(profile.energy.size() == 1);
    CHECK(profile.quotients.empty());
    CHECK(!profile.rho_hat.has_value());
}

TEST_CASE("scaled rate arithmetic") {
    DecayProfile profile;
    profile.rho_hat = 1.0;
    profile.h = 0.37;
    CHECK(scaled_rate(profile) == doctest::Approx(1.0));
    profile.rho_hat = 0.5;
    profile.h = 0.5;
    CHECK(scaled_rate(profile) == doctest::Approx(0.25).epsilon(1e-14));
    profile.rho_hat.reset();
    CHECK_THROWS_AS(scaled_rate(profile), std::domain_error);
}

TEST_CASE("flux identity holds at solver accuracy for lambda > 0") {
    RectangleExperiment ex(30, 15, 2.0, {{1.8, 0.4}, {2.0, 0.6}});
    REQUIRE(ex.ladder.ell_max() >= 3);
    for (int ell = 0; ell < ex.ladder.ell_max(); ++ell)
        CHECK(flux_identity_residual(ex.solution, ex.ladder, ell) <= 1e-8);
    CHECK_THROWS_AS(flux_identity_residual(ex.solution, ex.ladder, ex.ladder.ell_max()),
                    std::invalid_argument);
}

TEST_CASE("flux identity holds for lambda = 0 with boundary-touching patches") {
    // D_h touches the right boundary, so the shift constant is forced to zero.
    RectangleExperiment ex(30, 15, 0.0, {{1.8, 0.4}, {2.0, 0.6}});
    for (int ell = 0; ell < ex.ladder.ell_max(); ++ell)
        CHECK(flux_identity_residual(ex.solution, ex.ladder, ell) <= 1e-8);
}

TEST_CASE("flux identity uses the mean shift on interior patches") {
    // D_h in the middle of the domain: small patches stay interior, so the
    // lambda = 0 branch runs with the area-mean shift.
    RectangleExperiment ex(30, 15, 0.0, {{1.25, 0.4}, {1.45, 0.6}});
    REQUIRE(ex.ladder.ell_max() >= 2);
    for (int ell = 0; ell < std::min(2, ex.ladder.ell_max()); ++ell)
        CHECK(flux_identity_residual(ex.solution, ex.ladder, ell) <= 1e-8);
}

TEST_CASE("fixed width ratio") {
    RectangleExperiment ex(30, 15, 2.0, {{1.8, 0.4}, {2.0, 0.6}});
    const DecayProfile profile = energy_profile(ex.solution, ex.ladder);

    SUBCASE("below one cell width the ratio is one") {
        CHECK(fixed_width_ratio(ex.solution, ex.ladder, 0.5 * ex.mesh.h_min()) == 1.0);
    }
    SUBCASE("matches the profile energies") {
        const double delta = 3.2 * ex.mesh.h_min();
        const double expected = profile.energy[0] / profile.energy[3];
        CHECK(fixed_width_ratio(ex.solution, ex.ladder, delta) ==
              doctest::Approx(expected).epsilon(1e-13));
    }
    SUBCASE("too large a width is rejected") {
        CHECK_THROWS_AS(
            fixed_width_ratio(ex.solution, ex.ladder, (ex.ladder.ell_max() + 1) * ex.mesh.h_min()),
            std::invalid_argument);
    }
}

}  // TEST_SUITE
