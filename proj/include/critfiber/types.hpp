#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace critfiber {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

// All randomness in a run flows from one engine seeded by the run-level seed.
using Rng = std::mt19937_64;

inline constexpr Complex kImaginaryUnit{0.0, 1.0};

inline std::span<const Complex> as_span(const VectorXc& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

inline VectorXc to_vector(std::span<const Complex> values) {
    VectorXc v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
    return v;
}

inline double inf_norm(const VectorXc& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Standard complex Gaussian sample (real and imaginary parts N(0, 1/2)).
inline Complex complex_gaussian(Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

inline VectorXc random_complex_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
    VectorXc v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * complex_gaussian(rng);
    return v;
}

inline Complex random_unit_complex(Rng& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    return std::polar(1.0, angle(rng));
}

}  // namespace critfiber
