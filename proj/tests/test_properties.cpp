#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace spinlab;

namespace {

ModelSpec random_spec(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    ModelSpec s;
    s.kind = static_cast<ModelKind>(rng() % 3);
    s.j = u(rng);
    s.d = u(rng);
    s.n = 2 + static_cast<int>(rng() % 3);
    s.boundary = rng() % 2 ? Boundary::Open : Boundary::Periodic;
    if (s.kind == ModelKind::XxzDm) {
        s.delta = u(rng);
        s.delta_sign = rng() % 2 ? DeltaSign::Plus : DeltaSign::Minus;
    }
    if (s.kind == ModelKind::IsingDmField)
        s.h = u(rng);
    return s;
}

double c12(const ModelSpec& s, double t) {
    return pairwise_concurrence(thermal_state(build_hamiltonian(s), t), 1, 2).value;
}

} // namespace

TEST(Properties, ThermalStatesOnRandomModels) {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> logt(-3.0, 1.5);
    constexpr int kCases = 1200;
    for (int c = 0; c < kCases; ++c) {
        const auto s = random_spec(rng);
        const auto spec = hermitian_eig(build_hamiltonian(s));
        std::vector<double> ts{0.0};
        for (int k = 0; k < 3; ++k)
            ts.push_back(std::pow(10.0, logt(rng)));
        std::sort(ts.begin(), ts.end());
        double last_purity = 2.0;
        for (double t : ts) {
            const auto rho = thermal_state(spec, t);
            const auto& m = rho.matrix();
            ASSERT_TRUE(m.is_hermitian(1e-12)) << to_text(s);
            ASSERT_NEAR(m.trace().real(), 1.0, 1e-12) << to_text(s);
            ASSERT_GE(hermitian_eig(m).eigenvalues.front(), -1e-12) << to_text(s);
            ASSERT_LE(rho.purity(), last_purity + 1e-12) << to_text(s) << " t=" << t;
            last_purity = rho.purity();
            for (int i = 1; i <= s.n; ++i)
                for (int j = i + 1; j <= s.n; ++j) {
                    const double v = pairwise_concurrence(rho, i, j).value;
                    ASSERT_GE(v, 0.0);
                    ASSERT_LE(v, 1.0);
                }
        }
    }
}

TEST(Properties, ConcurrenceOnRandomTwoQubitStates) {
    std::mt19937_64 rng(1002);
    for (int c = 0; c < 1000; ++c) {
        const auto rho = oracle::random_density(rng, 4, 1 + c % 4);
        const auto r = concurrence(DensityMatrix::from_matrix(rho));
        ASSERT_GE(r.value, 0.0);
        ASSERT_LE(r.value, 1.0);
        for (int k = 0; k < 3; ++k)
            ASSERT_GE(r.lambdas[k], r.lambdas[k + 1]);
        ASSERT_GE(r.lambdas[3], 0.0);
    }
}

TEST(Properties, ReferenceStatesUnderLocalRotation) {
    // Concurrence of Bell, product, Werner, GHZ-pair and W-pair states is
    // unchanged by random local unitaries.
    std::mt19937_64 rng(1003);
    const double a = 1.0 / std::sqrt(2.0);
    const auto bell = oracle::projector({a, 0.0, 0.0, a});
    const auto product = oracle::projector({1.0, 0.0, 0.0, 0.0});
    const std::vector<std::pair<ComplexMatrix, double>> states{
        {bell, 1.0},
        {product, 0.0},
        {0.6 * bell + 0.1 * ComplexMatrix::identity(4), 0.4},
        {(1.0 / 3.0) * bell + (1.0 / 6.0) * ComplexMatrix::identity(4), 0.0},
        {0.5 * (oracle::projector({1.0, 0.0, 0.0, 0.0}) + oracle::projector({0.0, 0.0, 0.0, 1.0})), 0.0},
        {(1.0 / 3.0) * (oracle::projector({1.0, 0.0, 0.0, 0.0}) +
                        oracle::projector({0.0, a, a, 0.0}) * 2.0),
         2.0 / 3.0},
    };
    int cases = 0;
    for (int c = 0; c < 200; ++c)
        for (const auto& [rho, expected] : states) {
            const auto u = kron(hermitian_eig(oracle::random_hermitian(rng, 2)).eigenvectors,
                                hermitian_eig(oracle::random_hermitian(rng, 2)).eigenvectors);
            ComplexMatrix r = u * rho * u.adjoint();
            r = 0.5 * (r + r.adjoint());
            ASSERT_NEAR(concurrence(DensityMatrix::from_matrix(r)).value, expected, 1e-12) << c;
            ++cases;
        }
    EXPECT_GE(cases, 1000);
}

TEST(Properties, SignOfDAndFieldIrrelevant) {
    std::mt19937_64 rng(1004);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_real_distribution<double> ut(0.0, 2.0);
    for (int c = 0; c < 50; ++c) {
        ModelSpec s;
        s.delta = u(rng);
        s.d = u(rng);
        const double t = c % 5 == 0 ? 0.0 : ut(rng);
        auto m = s;
        m.d = -s.d;
        EXPECT_LT(std::abs(c12(s, t) - c12(m, t)), 1e-10);

        ModelSpec f;
        f.kind = ModelKind::IsingDmField;
        f.j = u(rng);
        f.d = u(rng);
        f.h = u(rng);
        auto fm = f;
        fm.h = -f.h;
        EXPECT_LT(std::abs(c12(f, t) - c12(fm, t)), 1e-10);
    }
}
