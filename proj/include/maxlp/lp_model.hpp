#ifndef MAXLP_LP_MODEL_HPP
#define MAXLP_LP_MODEL_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace maxlp {

// All-pole predictor A(z) = 1 - sum_{k=1..K} a_k z^-k.
// coefficients holds a_1..a_K.
struct LpModel {
    std::size_t order = 0;
    std::vector<double> coefficients;
    double residual_energy = 0.0;  // sum of squared residual

    LpModel() = default;
    LpModel(std::vector<double> coeffs, double energy)
        : order(coeffs.size()), coefficients(std::move(coeffs)), residual_energy(energy) {}
};

// Roots of A(z) in the z-plane.
struct PoleReport {
    std::vector<std::complex<double>> roots;
    double max_modulus = 0.0;
};

// Per-sample weights for weighted-l2 analysis, aligned with frame samples.
struct WeightVector {
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

}  // namespace maxlp

#endif
