#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "confgeo/metric.hpp"
#include "confgeo/tg_oracle.hpp"
#include "oracles.hpp"

using namespace confgeo;
using std::numbers::pi;

TEST(MetricParams, RejectsNegativeAlpha) {
    EXPECT_THROW(MetricParams(-1.0), std::invalid_argument);
    EXPECT_NO_THROW(MetricParams(0.0));
}

TEST(DiscretePath, Invariants) {
    EXPECT_THROW(DiscretePath({Polynomial{0.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(DiscretePath({Polynomial{0.0, 1.0}, Polynomial{0.0, 1.0, 0.0}}), std::invalid_argument);
    const DiscretePath path({Polynomial{0.0, 1.0}, Polynomial{0.0, 2.0}, Polynomial{0.0, 3.0}, Polynomial{0.0, 4.0}});
    EXPECT_EQ(path.intervals(), 3u);
    EXPECT_DOUBLE_EQ(path.h(), 1.0 / 3.0);
    EXPECT_EQ(path.reversed()[0], (Polynomial{0.0, 4.0}));
}

TEST(Lagrangian, Examples) {
    const Polynomial z{0.0, 1.0};
    for (double alpha : {0.0, 1.0, 50.0}) EXPECT_EQ(lagrangian(z, Polynomial(2), MetricParams(alpha)), 0.0);
    // 1/2 <z, z> with <z, z> from the quadrature oracle.
    EXPECT_NEAR(lagrangian(z, z, MetricParams(0.0)), 0.5 * oracle::quadrature_inner(z, z).real(), 1e-10);
    EXPECT_NEAR(lagrangian(z, z, MetricParams(0.0)), pi / 4.0, 1e-15);
    EXPECT_NEAR(lagrangian(z, Polynomial{1.0, 0.0}, MetricParams(5.0)), pi / 2.0, 1e-15);
}

TEST(DiscreteLagrangian, Examples) {
    const Polynomial z{0.0, 1.0};
    EXPECT_EQ(discrete_lagrangian(z, z, 0.05, MetricParams(3.0)), 0.0);

    const double h = 0.05;
    const Polynomial moved{0.0, 1.0 + h};
    // Oracle: midpoint derivative 1 + h/2 times displacement h z, squared norm by quadrature.
    const Polynomial product{0.0, (1.0 + h / 2.0) * h};
    const double expected = oracle::quadrature_inner(product, product).real() / (2.0 * h);
    EXPECT_NEAR(expected, h / 2.0 * (1.0 + h / 2.0) * (1.0 + h / 2.0) * pi / 2.0, 1e-10);
    EXPECT_NEAR(discrete_lagrangian(z, moved, h, MetricParams(0.0)), expected, 1e-10);

    const double h2 = 0.1;
    EXPECT_NEAR(discrete_lagrangian(z, Polynomial{h2, 1.0}, h2, MetricParams(1.0)), h2 / 2.0 * pi, 1e-15);
}

TEST(DiscreteLagrangian, RejectsBadInput) {
    const Polynomial z{0.0, 1.0};
    EXPECT_THROW(discrete_lagrangian(z, z, 0.0, MetricParams()), std::invalid_argument);
    EXPECT_THROW(discrete_lagrangian(z, z, -0.1, MetricParams()), std::invalid_argument);
    EXPECT_THROW(discrete_lagrangian(z, Polynomial{0.0, 1.0, 0.0}, 0.1, MetricParams()), std::invalid_argument);
}

TEST(DiscreteLagrangian, SymmetricInEndpoints) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Polynomial a = oracle::random_polynomial(rng, 8), b = oracle::random_polynomial(rng, 8);
        const MetricParams params(0.7);
        const double ab = discrete_lagrangian(a, b, 0.1, params), ba = discrete_lagrangian(b, a, 0.1, params);
        EXPECT_NEAR(ab, ba, 1e-13 * ab);
    }
}

TEST(DiscreteAction, ConstantPathIsZero) {
    const DiscretePath path(std::vector<Polynomial>(6, Polynomial{0.3, 1.0, Complex(0.1, 0.2)}));
    EXPECT_EQ(discrete_action(path, MetricParams(2.0)), 0.0);
    EXPECT_NEAR(discrete_action(path, MetricParams(2.0), ActionMode::fft), 0.0, 1e-15);
}

TEST(DiscreteAction, TwoStepScalingByHand) {
    const DiscretePath path({Polynomial{0.0, 1.0}, Polynomial{0.0, 0.75}, Polynomial{0.0, 0.5}});
    auto ld = [](double a, double b, double h) {
        const double mid = 0.5 * (a + b), d = b - a;
        return h / 2.0 * mid * mid * (d / h) * (d / h) * pi / 2.0;
    };
    const double expected = ld(1.0, 0.75, 0.5) + ld(0.75, 0.5, 0.5);
    EXPECT_NEAR(discrete_action(path, MetricParams(0.0)), expected, 1e-15);
    EXPECT_NEAR(discrete_action(path, MetricParams(0.0), ActionMode::fft), expected, 1e-14);
}

TEST(DiscreteAction, FftMatchesNaive) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const DiscretePath path = oracle::random_path(rng, 16, 20);
        for (double alpha : {0.0, 0.1, 100.0}) {
            const double naive = discrete_action(path, MetricParams(alpha));
            const double fast = discrete_action(path, MetricParams(alpha), ActionMode::fft);
            EXPECT_LE(std::abs(naive - fast), 1e-10 * naive);
        }
    }
}

TEST(DiscreteAction, NonnegativeZeroOnlyWithoutIncrements) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        DiscretePath path = oracle::random_path(rng, 6, 4);
        EXPECT_GT(discrete_action(path, MetricParams(0.0)), 0.0);
        path[2] = path[1];
        path[3] = path[1];
        path[4] = path[1];
        path[0] = path[1];
        EXPECT_EQ(discrete_action(path, MetricParams(0.3)), 0.0);
    }
}

TEST(DiscreteAction, ReversalInvariant) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const DiscretePath path = oracle::random_path(rng, 10, 7);
        const MetricParams params(0.4);
        const double fwd = discrete_action(path, params), bwd = discrete_action(path.reversed(), params);
        EXPECT_NEAR(fwd, bwd, 1e-13 * fwd);
    }
}

// The midpoint rule is exact on the alpha = 0 scaling geodesic: m' d = (c_{k+1}^2 - c_k^2)/2 and c^2 is affine.
TEST(DiscreteAction, ExactOnSampledScalingGeodesic) {
    const double c1 = 0.5;
    const double energy = pi / 4.0 * std::pow((c1 * c1 - 1.0) / 2.0, 2);
    for (std::size_t N : {10u, 20u, 40u, 80u}) {
        std::vector<Polynomial> steps;
        for (std::size_t k = 0; k <= N; ++k) steps.push_back(Polynomial{0.0, tg_closed_form(1.0, c1, 0.0, double(k) / double(N))});
        EXPECT_NEAR(discrete_action(DiscretePath(steps), MetricParams(0.0)), energy, 1e-14) << N;
    }
}

// Second-order consistency on a smooth non-geodesic path against Gauss-Legendre quadrature of L(phi, phidot).
TEST(DiscreteAction, SecondOrderConsistency) {
    auto phi = [](double t) { return Polynomial{0.1 * t, 1.0 - 0.2 * t, Complex(0.3 * t, 0.1 * t * t), 0.1 * t * t * t}; };
    auto phidot = [](double t) { return Polynomial{0.1, -0.2, Complex(0.3, 0.2 * t), 0.3 * t * t}; };
    const MetricParams params(0.5);
    const auto [nodes, weights] = oracle::gauss_legendre01(40);
    double energy = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) energy += weights[i] * lagrangian(phi(nodes[i]), phidot(nodes[i]), params);

    std::vector<double> errors;
    for (std::size_t N : {10u, 20u, 40u, 80u}) {
        std::vector<Polynomial> steps;
        for (std::size_t k = 0; k <= N; ++k) steps.push_back(phi(double(k) / double(N)));
        errors.push_back(std::abs(discrete_action(DiscretePath(steps), params) - energy));
    }
    const double order = std::log2(errors.front() / errors.back()) / 3.0;
    EXPECT_GE(order, 1.9);
    EXPECT_LE(order, 2.1);
}

TEST(ActionGradient, ConstantPathIsZero) {
    const DiscretePath path(std::vector<Polynomial>(5, Polynomial{0.2, 0.9, 0.1}));
    for (const auto& g : action_gradient(path, MetricParams(1.0))) {
        for (auto c : g.coeffs()) EXPECT_EQ(c, Complex{});
    }
}

TEST(ActionGradient, RequiresTwoIntervals) {
    const DiscretePath path({Polynomial{0.0, 1.0}, Polynomial{0.0, 2.0}});
    EXPECT_THROW(action_gradient(path, MetricParams()), std::invalid_argument);
}

TEST(ActionGradient, MatchesCentralDifferences) {
    std::mt19937_64 rng(55);
    for (double alpha : {0.0, 0.1, 10.0}) {
        const DiscretePath path = oracle::random_path(rng, 8, 5);
        const MetricParams params(alpha);
        const auto grad = action_gradient(path, params);
        ASSERT_EQ(grad.size(), 4u);
        for (std::size_t k = 1; k < 5; ++k) {
            for (std::size_t j = 0; j < 8; ++j) {
                for (bool imag : {false, true}) {
                    const double fd = oracle::action_central_difference(path, params, k, j, imag, 1e-6);
                    const double an = imag ? grad[k - 1][j].imag() : grad[k - 1][j].real();
                    EXPECT_LE(std::abs(an - fd), 1e-6 * std::max(1.0, std::abs(fd))) << k << "," << j << "," << imag;
                }
            }
        }
    }
}

TEST(ActionGradient, SingleDirectionRichardson) {
    std::mt19937_64 rng(56);
    const DiscretePath path = oracle::random_path(rng, 8, 5);
    const MetricParams params(0.3);
    const auto grad = action_gradient(path, params);
    const double limit = oracle::action_richardson(path, params, 3, 5, true, 1e-3);
    EXPECT_NEAR(grad[2][5].imag(), limit, 1e-8 * std::max(1.0, std::abs(limit)));
}

TEST(ActionAlongLine, MatchesDirectEvaluation) {
    std::mt19937_64 rng(90);
    const DiscretePath path = oracle::random_path(rng, 6, 5);
    std::vector<Polynomial> dir;
    for (int k = 0; k < 4; ++k) dir.push_back(oracle::random_polynomial(rng, 6));
    const MetricParams params(0.2);
    const QuarticLine line = action_along_line(path, dir, params);
    const double base = discrete_action(path, params);
    for (double t : {-0.7, 0.01, 0.3, 1.5}) {
        DiscretePath moved = path;
        for (std::size_t k = 1; k < 5; ++k) moved[k] += dir[k - 1] * t;
        const double direct = discrete_action(moved, params) - base;
        EXPECT_NEAR(line.delta(t), direct, 1e-11 * std::max(1.0, std::abs(direct)));
    }
    // The linear coefficient is the directional derivative.
    const auto grad = action_gradient(path, params);
    double dd = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t j = 0; j < 6; ++j) dd += grad[k][j].real() * dir[k][j].real() + grad[k][j].imag() * dir[k][j].imag();
    }
    EXPECT_NEAR(line.coeff[0], dd, 1e-10 * std::abs(dd));
}
