#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nilcmc/field.hpp"

namespace nilcmc {

/// Residual statistics exclude a 1-node boundary rim unless rim=0 is requested;
/// `exclude` marks additional nodes (nonzero byte) left out and counted as flagged.
struct StatOptions {
    int rim = 1;
    const std::vector<std::uint8_t>* exclude = nullptr;
};

struct ResidualReport {
    std::string name;
    double max = 0.0;
    double l2 = 0.0;
    std::size_t flagged = 0;
    std::optional<double> order;
};

ResidualReport field_report(std::string name, const ComplexField& r, const StatOptions& opt = {});
ResidualReport field_report(std::string name, const RealField& r, const StatOptions& opt = {});

/// log2(coarse/fine); the empirical convergence order between spacings h and h/2.
double estimate_order(double coarse, double fine);

/// Shortest 17-significant-digit decimal form, identical across runs.
std::string fmt17(double x);

} // namespace nilcmc
