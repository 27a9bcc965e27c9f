#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace spinlab;

namespace {

ModelSpec xxz(double j, double delta, double d, int n = 3, DeltaSign sign = DeltaSign::Plus) {
    ModelSpec s;
    s.j = j;
    s.delta = delta;
    s.d = d;
    s.n = n;
    s.delta_sign = sign;
    return s;
}

ModelSpec idm_field(double j, double d, double h) {
    ModelSpec s;
    s.kind = ModelKind::IsingDmField;
    s.j = j;
    s.d = d;
    s.h = h;
    return s;
}

std::vector<double> spectrum(const ModelSpec& s) { return hermitian_eig(build_hamiltonian(s)).eigenvalues; }

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

} // namespace

TEST(PauliOnSite, SingleSiteIsPauli) { EXPECT_EQ(pauli_on_site(PauliAxis::Z, 1, 1), pauli(PauliAxis::Z)); }

TEST(PauliOnSite, SecondOfTwo) {
    EXPECT_EQ(pauli_on_site(PauliAxis::X, 2, 2), kron(ComplexMatrix::identity(2), pauli(PauliAxis::X)));
}

TEST(PauliOnSite, DisjointSitesCommute) {
    const auto c = commutator(pauli_on_site(PauliAxis::X, 1, 3), pauli_on_site(PauliAxis::Y, 2, 3));
    EXPECT_EQ(c.max_abs(), 0.0);
}

TEST(PauliOnSite, SiteOutOfRange) {
    EXPECT_THROW(pauli_on_site(PauliAxis::X, 0, 3), ContractError);
    EXPECT_THROW(pauli_on_site(PauliAxis::X, 4, 3), ContractError);
}

TEST(BuildHamiltonian, TwoSiteXY) {
    const auto h = build_hamiltonian(xxz(1, 0, 0, 2));
    const auto x = pauli(PauliAxis::X), y = pauli(PauliAxis::Y);
    EXPECT_LT(max_abs_diff(h, 0.25 * (kron(x, x) + kron(y, y))), 1e-16);
    EXPECT_LT(max_diff(hermitian_eig(h).eigenvalues, {-0.5, 0.0, 0.0, 0.5}), 1e-15);
}

TEST(BuildHamiltonian, IsingWithoutDmIsClassical) {
    ModelSpec s;
    s.kind = ModelKind::IsingDm;
    const auto h = build_hamiltonian(s);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            if (i != j) {
                EXPECT_EQ(h(i, j), cplx{});
            }
    EXPECT_LT(max_diff(spectrum(s), oracle::ising_chain_energies(3, 1.0)), 1e-15);
}

TEST(BuildHamiltonian, MatchesPauliStringAssembly) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 30; ++trial) {
        ModelSpec s;
        s.kind = static_cast<ModelKind>(trial % 3);
        s.j = u(rng);
        s.d = u(rng);
        s.n = 2 + trial % 4;
        s.boundary = trial % 2 ? Boundary::Periodic : Boundary::Open;
        if (s.kind == ModelKind::XxzDm) {
            s.delta = u(rng);
            s.delta_sign = trial % 4 < 2 ? DeltaSign::Plus : DeltaSign::Minus;
        }
        if (s.kind == ModelKind::IsingDmField)
            s.h = u(rng);
        EXPECT_LT(max_abs_diff(build_hamiltonian(s), oracle::hamiltonian_from_paulis(s)), 1e-14) << to_text(s);
    }
}

TEST(BuildHamiltonian, ExplicitFieldForm) {
    // (J/4)[z1z2 + z2z3 + D(x1y2 - y1x2) + D(x2y3 - y2x3) + h(z1 + z2 + z3)]
    const auto s = idm_field(1.3, 0.7, 2.0);
    auto p = [](PauliAxis a, int i) { return pauli_on_site(a, i, 3); };
    using enum PauliAxis;
    ComplexMatrix ref = p(Z, 1) * p(Z, 2) + p(Z, 2) * p(Z, 3) + 0.7 * (p(X, 1) * p(Y, 2) - p(Y, 1) * p(X, 2)) +
                        0.7 * (p(X, 2) * p(Y, 3) - p(Y, 2) * p(X, 3)) + 2.0 * (p(Z, 1) + p(Z, 2) + p(Z, 3));
    ref *= 1.3 / 4.0;
    EXPECT_LT(max_abs_diff(build_hamiltonian(s), ref), 1e-15);
}

TEST(BuildHamiltonian, ConservesMagnetization) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 30; ++trial) {
        ModelSpec s;
        s.kind = static_cast<ModelKind>(trial % 3);
        s.d = u(rng);
        s.j = u(rng);
        if (s.kind == ModelKind::XxzDm)
            s.delta = u(rng);
        if (s.kind == ModelKind::IsingDmField)
            s.h = u(rng);
        s.boundary = trial % 2 ? Boundary::Periodic : Boundary::Open;
        const auto h = build_hamiltonian(s);
        EXPECT_TRUE(h.is_hermitian(1e-12));
        EXPECT_LT(commutator(h, total_sz(s.n)).max_abs(), 1e-12);
    }
}

TEST(BuildHamiltonian, SpectrumEvenInDAndH) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = xxz(u(rng), u(rng), u(rng));
        auto m = s;
        m.d = -s.d;
        EXPECT_LT(max_diff(spectrum(s), spectrum(m)), 1e-10);
        auto f = idm_field(u(rng), u(rng), u(rng));
        auto fm = f;
        fm.h = -f.h;
        EXPECT_LT(max_diff(spectrum(f), spectrum(fm)), 1e-10);
        fm = f;
        fm.d = -f.d;
        EXPECT_LT(max_diff(spectrum(f), spectrum(fm)), 1e-10);
    }
}

TEST(BuildHamiltonian, DimensionCap) {
    ModelSpec s;
    s.n = 13;
    EXPECT_THROW(build_hamiltonian(s), DimensionError);
    s.n = 1;
    EXPECT_THROW(build_hamiltonian(s), ContractError);
}

TEST(ModelSpec, ValidationRules) {
    ModelSpec s;
    s.kind = ModelKind::IsingDm;
    s.delta = 0.5;
    EXPECT_THROW(s.validate(), ContractError);
    s.delta = 0.0;
    s.h = 1.0;
    EXPECT_THROW(s.validate(), ContractError);
    s.kind = ModelKind::IsingDmField;
    EXPECT_NO_THROW(s.validate());
}

TEST(ModelSpec, TextFormRoundTrip) {
    ModelSpec s;
    s.kind = ModelKind::IsingDmField;
    s.j = -1.0;
    s.d = 0.1;
    s.h = 2.5;
    s.n = 4;
    s.boundary = Boundary::Periodic;
    EXPECT_EQ(parse_model_spec(to_text(s)), s);
}

TEST(ModelSpec, TextFormCommentsAndErrors) {
    const auto s = parse_model_spec("# comment\nkind = xxz-dm\n delta=-1.5  # inline\nd=2\n\n");
    EXPECT_EQ(s.delta, -1.5);
    EXPECT_EQ(s.d, 2.0);
    EXPECT_THROW(parse_model_spec("gamma=1"), ContractError);
    EXPECT_THROW(parse_model_spec("delta"), ContractError);
    EXPECT_THROW(parse_model_spec("delta=abc"), ContractError);
    EXPECT_THROW(parse_model_spec("kind=heisenberg"), ContractError);
}

TEST(FerroToAf, FlipsSignOfAnisotropyTerm) {
    const auto out = ferro_to_af_map(xxz(-1.0, 0.7, 0.0));
    EXPECT_EQ(out.j, 1.0);
    EXPECT_EQ(out.delta, 0.7);
    EXPECT_EQ(out.delta_sign, DeltaSign::Minus);
}

TEST(FerroToAf, DeltaZeroSelfDual) {
    for (auto sign : {DeltaSign::Plus, DeltaSign::Minus}) {
        const auto in = xxz(-1.0, 0.0, 0.4, 3, sign);
        const auto out = ferro_to_af_map(in);
        EXPECT_EQ(out.j, 1.0);
        EXPECT_LT(max_diff(spectrum(in), spectrum(out)), 1e-12);
    }
}

TEST(FerroToAf, SpectraAgreeAndUnitaryConjugates) {
    const auto in = xxz(-1.0, 1.3, 0.8);
    const auto out = ferro_to_af_map(in);
    EXPECT_LT(max_diff(spectrum(in), spectrum(out)), 1e-12);
    const auto u = sublattice_rotation(3);
    EXPECT_LT(max_abs_diff(u * build_hamiltonian(in) * u.adjoint(), build_hamiltonian(out)), 1e-15);
}

TEST(FerroToAf, SpectrumPreservedOnFuzz) {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto in = xxz(u(rng), u(rng), u(rng), 2 + trial % 4, trial % 2 ? DeltaSign::Plus : DeltaSign::Minus);
        EXPECT_LT(max_diff(spectrum(in), spectrum(ferro_to_af_map(in))), 1e-12);
    }
}

TEST(FerroToAf, Preconditions) {
    auto s = xxz(-1, 0.5, 0);
    s.boundary = Boundary::Periodic;
    EXPECT_THROW(ferro_to_af_map(s), ContractError);
    EXPECT_THROW(ferro_to_af_map(idm_field(-1, 1, 1)), ContractError);
}
