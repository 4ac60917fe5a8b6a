#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace flowlab {

// Quadrature nodes and weights over a compact set; weights sum to the
// measure of the set (midpoint rules are exact for that).
struct Quadrature {
    std::vector<double> nodes;  // n x d row-major
    std::vector<double> weights;
    int count = 0;
    int dimension = 0;
    double measure = 0.0;

    std::span<const double> node(int i) const {
        return {nodes.data() + static_cast<std::size_t>(i) * dimension,
                static_cast<std::size_t>(dimension)};
    }
};

// Compact integration domain: an axis-aligned box or a disc in R^2, with a
// deterministic midpoint grid or seeded Monte Carlo quadrature.
class DomainSpec {
   public:
    enum class Kind { Box, Disc };
    enum class Rule { Grid, MonteCarlo };

    static DomainSpec box(std::vector<double> lo, std::vector<double> hi,
                          std::vector<int> resolution = {});
    static DomainSpec disc(std::vector<double> center, double radius, int radial = 128,
                           int angular = 256);

    DomainSpec& with_monte_carlo(int num_points, std::uint64_t seed);

    Kind kind() const { return kind_; }
    Rule rule() const { return rule_; }
    int dimension() const { return dimension_; }
    double measure() const;

    Quadrature quadrature() const;

    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }
    const std::vector<double>& center() const { return center_; }
    double radius() const { return radius_; }

   private:
    Kind kind_ = Kind::Box;
    Rule rule_ = Rule::Grid;
    int dimension_ = 0;
    std::vector<double> lo_, hi_;
    std::vector<int> resolution_;
    std::vector<double> center_;
    double radius_ = 0.0;
    int radial_ = 128;
    int angular_ = 256;
    int mc_points_ = 0;
    std::uint64_t mc_seed_ = 0;
};

inline constexpr int kDefaultBoxResolution = 101;

}  // namespace flowlab
